// Exact draws on the three-state example chain with the multigamma coupler,
// compared with the stationary law and the geometric residual mixture.

use splitchain::fixtures;
use splitchain::oracle::{gof_report, stationary_exact, tv_distance};
use splitchain::perfect::{corollary1_exact, multigamma_sample, residual_matrix};
use splitchain::rng::par_batch;
use splitchain::Minorization;

pub fn run_example() -> splitchain::Result<()> {
    let chain = fixtures::figure1_chain();
    let minor = fixtures::figure1_minorization();
    println!("epsilon = {:.6}, nu = {:?}", minor.epsilon(), minor.nu());
    for (x, row) in residual_matrix(&chain, &minor)?.iter().enumerate() {
        println!("R({x}, .) = {row:?}");
    }

    let pi = stationary_exact(chain.rows())?;
    let series = corollary1_exact(&chain, &minor, 1e-12)?;
    println!(
        "pi = {:?}; residual series with {} terms is {:.2e} away",
        pi.weights(),
        series.terms,
        tv_distance(&series.mixture, pi.weights())?
    );

    let draws = par_batch(100_000, 42, |rng| multigamma_sample(&chain, &minor, rng))?;
    let fit = gof_report(&draws, &pi)?;
    println!(
        "{} samples: empirical TV {:.4} (threshold {:.4}), chi-square {:.2}",
        fit.n_samples, fit.empirical_tv, fit.threshold, fit.chi_square
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(e.exit_code().into());
    }
}
