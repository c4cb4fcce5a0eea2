// Regeneration tours of the split chain on the five-state drift chain.
// Tour lengths from both transition strategies are compared with the exact
// regeneration-time law, and their mean with the return-time identity.

use splitchain::fixtures;
use splitchain::oracle::{stationary_exact, tau_tail_exact, TabooKernel};
use splitchain::rng::par_batch;
use splitchain::{Minorization, SplitChain, Strategy};

pub fn run_example() -> splitchain::Result<()> {
    let fx = fixtures::drift5();
    let minor = fx.minorization();
    let split = SplitChain::new(&fx.chain, &minor);

    let pi = stationary_exact(fx.chain.rows())?;
    let k = TabooKernel::new(fx.chain.rows(), &minor)?;
    let tails = tau_tail_exact(&k, minor.nu(), 10)?;
    let kac = 1.0 / (minor.epsilon() * pi.mass_on(&fx.small_set));
    println!("E(tau) = {:.10} exact, 1/(eps pi(C)) = {kac:.10}", tails.e_tau);

    for strategy in [Strategy::Forward, Strategy::Retrospective] {
        let lengths = par_batch(100_000, 5, |rng| split.tour_length(strategy, rng))?;
        let n = lengths.len() as f64;
        let mean = lengths.iter().sum::<usize>() as f64 / n;
        let var = lengths.iter().map(|&l| (l as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
        println!("{strategy:?}: mean tour {mean:.4} +- {:.4}", (var / n).sqrt());
        for t in 1..=4 {
            let emp = lengths.iter().filter(|&&l| l >= t).count() as f64 / n;
            println!("  Pr(tau >= {t}): {emp:.4} vs {:.4}", tails.tails[t - 1]);
        }
    }

    let tour = split.simulate_tour(Strategy::Forward, &mut splitchain::RngStream::from_seed(9))?;
    println!("one tour: {:?}", tour.path);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(e.exit_code().into());
    }
}
