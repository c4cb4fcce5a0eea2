// Regeneration-time tail bounds and truncation levels from raw drift
// constants, without a model.

use splitchain::bounds::{plan_bounds, DriftSpec, NuV};

pub fn run_example() -> splitchain::Result<()> {
    // eps = 0.5, lambda = 0.5, A = 0.9 puts J below 1.
    let drift = DriftSpec {
        lambda: 0.5,
        b: 0.4,
        d: 1.0,
        a: 0.9,
        nu_v: NuV::BoundedByRemark,
    };
    let report = plan_bounds(&drift, 0.5, 0.1)?;
    println!(
        "J = {:.3}, beta* = {:.4}, nu(V) <= {:.3}, chosen beta = {:.6}, M = {}",
        report.j, report.beta_star, report.nu_v, report.beta, report.m
    );

    let ar1_like = DriftSpec {
        lambda: 0.6,
        b: 1.4,
        d: 5.0,
        a: 3.0,
        nu_v: NuV::Exact(1.474864723839019),
    };
    println!("gamma      M   beta     g");
    let mut gamma = 0.4;
    while gamma > 1e-3 {
        let r = plan_bounds(&ar1_like, 0.3173105078629141, gamma)?;
        println!("{gamma:<8.4} {:>4}  {:.4}  {:.3}", r.m, r.beta, r.g);
        gamma /= 2.0;
    }

    let r = plan_bounds(&ar1_like, 0.3173105078629141, 0.1)?;
    for (t, b) in r.tail_curve(100).into_iter().step_by(20) {
        println!("Pr(tau >= {t:>3}) <= {b:.3e}");
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
