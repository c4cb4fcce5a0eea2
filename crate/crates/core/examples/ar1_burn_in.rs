// A Gaussian AR(1) chain on the real line: constants by quadrature, a
// truncation level for a 0.1 budget, and chains started from the truncated
// mixture so that no burn-in is discarded.

use splitchain::ar1::{Ar1Chain, Ar1Constants, Ar1Minorization};
use splitchain::bounds::plan_bounds;
use splitchain::commands::trajectory;
use splitchain::mixture::{sample_pi_tilde, DEFAULT_ATTEMPT_CAP};
use splitchain::oracle::ks_statistic;
use splitchain::rng::par_batch;
use splitchain::{SplitChain, Strategy};
use statrs::distribution::{ContinuousCDF, Normal};

pub fn run_example() -> splitchain::Result<()> {
    let chain = Ar1Chain::new(0.5, 1.0)?;
    let minor = Ar1Minorization::new(&chain, -2.0, 2.0)?;
    let k = Ar1Constants::compute(&chain, &minor)?;
    println!(
        "eps {:.10}  lambda {:.6}  b {:.6}  A {:.6}  nu(V) {:.6}",
        k.epsilon, k.lambda, k.b, k.a, k.nu_v
    );
    let plan = plan_bounds(&k.drift(), k.epsilon, 0.1)?;
    println!("M = {} at beta = {:.5}", plan.m, plan.beta);

    let split = SplitChain::new(&chain, &minor);
    let m = plan.m as usize;
    let starts = par_batch(4_000, 21, |rng| {
        let x0 = sample_pi_tilde(&split, m, Strategy::Forward, rng, DEFAULT_ATTEMPT_CAP)?.state;
        Ok(trajectory(&chain, x0, 10, rng))
    })?;
    let law = Normal::new(0.0, chain.stationary_sd()).expect("positive sd");
    for step in [0, 1, 10] {
        let xs: Vec<f64> = starts.iter().map(|path| path[step]).collect();
        let ks = ks_statistic(&xs, |x| law.cdf(x));
        println!("step {step:>2}: KS distance to N(0, 4/3) = {ks:.4}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(e.exit_code().into());
    }
}
