// Approximate stationary draws when the small set is not the whole space:
// plan the truncation level from the drift constants, then draw from the
// truncated mixture and compare with the exact laws.

use splitchain::bounds::plan_bounds;
use splitchain::commands::truncation_oracle;
use splitchain::fixtures;
use splitchain::mixture::{sample_pi_tilde, DEFAULT_ATTEMPT_CAP};
use splitchain::oracle::{gof_report, FiniteDistribution};
use splitchain::rng::par_batch;
use splitchain::{Minorization, SplitChain, Strategy};

pub fn run_example() -> splitchain::Result<()> {
    let fx = fixtures::drift5();
    let minor = fx.minorization();
    let drift = fx.drift()?;
    let split = SplitChain::new(&fx.chain, &minor);

    for gamma in [0.2, 0.1, 0.05, 0.01] {
        let plan = plan_bounds(&drift, minor.epsilon(), gamma)?;
        let exact = truncation_oracle(&fx.chain, &minor, plan.m as usize)?;
        println!(
            "gamma {gamma:<5} M {:>3} (beta {:.4}): TV(pi, pi~) = {:.3e}, weight budget {:.3e}",
            plan.m, plan.beta, exact.tv_pi_pi_tilde, exact.tv_budget
        );
    }

    let plan = plan_bounds(&drift, minor.epsilon(), 0.05)?;
    let m = plan.m as usize;
    let draws = par_batch(50_000, 3, |rng| sample_pi_tilde(&split, m, Strategy::Forward, rng, DEFAULT_ATTEMPT_CAP))?;
    let states: Vec<usize> = draws.iter().map(|d| d.state).collect();
    let tours: usize = draws.iter().map(|d| d.t_attempts + d.q_attempts).sum();
    let target = FiniteDistribution::new(truncation_oracle(&fx.chain, &minor, m)?.pi_tilde)?;
    let fit = gof_report(&states, &target)?;
    println!(
        "{} draws at M = {m} used {tours} tours; empirical TV to pi~ {:.4}",
        states.len(),
        fit.empirical_tv
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
