//! Tail bounds on the regeneration time under a geometric drift condition,
//! and the truncation level they imply.
//!
//! With `PV ≤ λ V + b 1_C`, `d = sup_C V`, `A = sup_C PV` and
//! `J = (A − ε)/λ`, the generating function `E(β^τ)` is finite for
//! `β ∈ (1, β*)` and
//!
//! ```text
//! Pr(τ ≥ t) ≤ β ν(V)^φ(β) · (1 − β(1−ε)) / (1 − (1−ε)(J/(1−ε))^φ(β)) · β^−t
//!           = g(β, ε, J) β^−t,           φ(β) = log β / log λ⁻¹.
//! ```
//!
//! Truncating the weight law at any `M > log[2g / (γ(β−1))] / log β` keeps
//! the approximate mixture within `γ` of the stationary law.
//!
//! All products are formed in log space.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of `β` values tried by [`plan_bounds`].
pub const BETA_GRID_POINTS: usize = 64;
/// Relative margin kept from both ends of `(1, β*)`.
pub const BETA_GRID_MARGIN: f64 = 1e-6;
/// Largest truncation level [`compute_m`] will return.
pub const M_CAP: u64 = 10_000_000;
/// `λ` used when `C` is the whole space and the drift constraint is vacuous.
pub const WHOLE_SPACE_LAMBDA: f64 = 0.5;

/// `ν(V)`, either known or to be replaced by `b / (ε (1 − λ))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NuV {
    Exact(f64),
    BoundedByRemark,
}

/// Constants of a geometric drift condition `PV ≤ λ V + b 1_C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    pub lambda: f64,
    pub b: f64,
    /// `sup_C V`. Carried for reporting; the tail bound does not use it.
    pub d: f64,
    /// `sup_C PV`.
    pub a: f64,
    pub nu_v: NuV,
}

/// Tightest `(λ, b)` for a given `V` and `C` on a finite chain.
pub fn fit_drift_finite(rows: &[Vec<f64>], small_set: &[usize], v: &[f64], nu: Option<&[f64]>) -> Result<DriftSpec> {
    let n = rows.len();
    if v.len() != n {
        return Err(Error::DimensionMismatch(v.len(), n));
    }
    if let Some(bad) = v.iter().find(|&&x| !(x >= 1.0)) {
        return Err(Error::InvalidArgument(format!("V must be at least 1 everywhere, found {bad}")));
    }
    if small_set.is_empty() {
        return Err(Error::InvalidArgument("small set is empty".into()));
    }
    let mut in_c = vec![false; n];
    for &x in small_set {
        *in_c.get_mut(x).ok_or(Error::UnknownLabel(x))? = true;
    }
    let pv: Vec<f64> = rows
        .iter()
        .map(|r| r.iter().zip(v).map(|(p, w)| p * w).sum())
        .collect();
    let lambda = if in_c.iter().all(|&c| c) {
        WHOLE_SPACE_LAMBDA
    } else {
        (0..n)
            .filter(|&x| !in_c[x])
            .map(|x| pv[x] / v[x])
            .fold(0.0, f64::max)
    };
    if lambda >= 1.0 {
        return Err(Error::NoDrift(lambda));
    }
    let b = small_set
        .iter()
        .map(|&x| pv[x] - lambda * v[x])
        .fold(0.0, f64::max);
    let d = small_set.iter().map(|&x| v[x]).fold(f64::NEG_INFINITY, f64::max);
    let a = small_set.iter().map(|&x| pv[x]).fold(f64::NEG_INFINITY, f64::max);
    let nu_v = match nu {
        Some(nu) => NuV::Exact(nu.iter().zip(v).map(|(p, w)| p * w).sum()),
        None => NuV::BoundedByRemark,
    };
    Ok(DriftSpec { lambda, b, d, a, nu_v })
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::BoundHypothesis(format!("{name} = {x} is not in (0, 1)")))
    }
}

/// `J = (A − ε) / λ`.
pub fn compute_j(a: f64, epsilon: f64, lambda: f64) -> Result<f64> {
    check_unit("lambda", lambda)?;
    if a < epsilon {
        return Err(Error::BoundHypothesis(format!("A = {a} is below epsilon = {epsilon}")));
    }
    Ok((a - epsilon) / lambda)
}

/// Radius of convergence `β*` of the regeneration-time generating function.
pub fn beta_star(j: f64, lambda: f64, epsilon: f64) -> Result<f64> {
    check_unit("lambda", lambda)?;
    check_unit("epsilon", epsilon)?;
    if !(j >= 0.0) {
        return Err(Error::BoundHypothesis(format!("J = {j} is negative")));
    }
    if j < 1.0 {
        return Ok(1.0 / lambda);
    }
    let ln_q = (-epsilon).ln_1p();
    Ok((lambda.ln() * ln_q / (j.ln() - ln_q)).exp())
}

/// `φ(β) = log β / log λ⁻¹`.
pub fn phi(beta: f64, lambda: f64) -> f64 {
    beta.ln() / -lambda.ln()
}

/// `log g(β, ε, J)`.
pub fn ln_g_factor(beta: f64, epsilon: f64, j: f64, lambda: f64, nu_v: f64) -> Result<f64> {
    check_unit("lambda", lambda)?;
    check_unit("epsilon", epsilon)?;
    if !(nu_v >= 1.0) {
        return Err(Error::BoundHypothesis(format!("nu(V) = {nu_v} is below 1")));
    }
    let invalid = |reason: String| Error::InvalidBeta { beta, reason };
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(invalid("beta must exceed 1".into()));
    }
    let bs = beta_star(j, lambda, epsilon)?;
    if beta >= bs {
        return Err(invalid(format!("beta must be below beta* = {bs}")));
    }
    let ln_q = (-epsilon).ln_1p();
    let num = 1.0 - beta * (1.0 - epsilon);
    if !(num > 0.0) {
        return Err(invalid(format!("1 - beta(1 - eps) = {num} is not positive")));
    }
    let f = phi(beta, lambda);
    let den = if j == 0.0 {
        1.0
    } else {
        // 1 − (1−ε)(J/(1−ε))^φ
        -(ln_q + f * (j.ln() - ln_q)).exp_m1()
    };
    if !(den > 0.0) {
        return Err(invalid(format!("denominator 1 - (1-eps)(J/(1-eps))^phi = {den} is not positive")));
    }
    let ln_g = beta.ln() + f * nu_v.ln() + num.ln() - den.ln();
    if !ln_g.is_finite() {
        return Err(invalid(format!("log g = {ln_g} is not finite")));
    }
    Ok(ln_g)
}

/// `g(β, ε, J)`, the prefactor of the geometric tail bound.
pub fn g_factor(beta: f64, epsilon: f64, j: f64, lambda: f64, nu_v: f64) -> Result<f64> {
    let g = ln_g_factor(beta, epsilon, j, lambda, nu_v)?.exp();
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::InvalidBeta {
            beta,
            reason: format!("g = {g} is not finite and positive"),
        });
    }
    Ok(g)
}

/// `ν(V) ≤ b / (ε (1 − λ))`. Errors when the bound is below 1, which no
/// `V ≥ 1` can satisfy.
pub fn nu_v_bound(b: f64, lambda: f64, epsilon: f64) -> Result<f64> {
    check_unit("lambda", lambda)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::BoundHypothesis(format!("epsilon = {epsilon} is not in (0, 1]")));
    }
    let bound = b / (epsilon * (1.0 - lambda));
    if !(bound >= 1.0) {
        return Err(Error::BoundHypothesis(format!(
            "nu(V) bound {bound} is below 1; degenerate drift constants (b = {b})"
        )));
    }
    Ok(bound)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailBound {
    /// `min(1, g β^−t)`.
    pub value: f64,
    /// `g β^−t` before clamping.
    pub raw: f64,
    /// True when `raw ≥ 1`, i.e. the bound says nothing.
    pub vacuous: bool,
}

/// `Pr(τ ≥ t) ≤ g(β, ε, J) β^−t`.
pub fn tail_bound(t: u64, beta: f64, epsilon: f64, j: f64, lambda: f64, nu_v: f64) -> Result<TailBound> {
    let ln_g = ln_g_factor(beta, epsilon, j, lambda, nu_v)?;
    Ok(tail_from_ln_g(t, beta, ln_g))
}

fn tail_from_ln_g(t: u64, beta: f64, ln_g: f64) -> TailBound {
    let raw = (ln_g - t as f64 * beta.ln()).exp();
    TailBound {
        value: raw.min(1.0),
        raw,
        vacuous: raw >= 1.0,
    }
}

fn ln_m_threshold(gamma: f64, beta: f64, ln_g: f64) -> f64 {
    (std::f64::consts::LN_2 + ln_g - gamma.ln() - (beta - 1.0).ln()) / beta.ln()
}

fn m_from_threshold(q: f64) -> Result<u64> {
    if !(q < M_CAP as f64) {
        return Err(Error::TruncationTooLarge { m: q, cap: M_CAP });
    }
    Ok(((q.floor() + 1.0).max(1.0)) as u64)
}

/// Smallest integer above `log[2g / (γ(β−1))] / log β`, at least 1.
pub fn compute_m(gamma: f64, beta: f64, g: f64) -> Result<u64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must be positive")));
    }
    if !(beta > 1.0) {
        return Err(Error::InvalidBeta {
            beta,
            reason: "beta must exceed 1".into(),
        });
    }
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::InvalidArgument(format!("g = {g} must be finite and positive")));
    }
    m_from_threshold(ln_m_threshold(gamma, beta, g.ln()))
}

/// Nu(V) source recorded in a [`BoundReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NuVSource {
    Exact,
    RemarkBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub epsilon: f64,
    pub lambda: f64,
    pub b: f64,
    pub d: f64,
    pub a: f64,
    pub nu_v: f64,
    pub nu_v_source: NuVSource,
    pub j: f64,
    pub beta_star: f64,
    pub beta: f64,
    pub phi: f64,
    pub g: f64,
    pub m: u64,
    pub gamma: f64,
    pub grid_points: usize,
    pub invalid_grid_points: usize,
    pub valid: bool,
    pub reasons: Vec<String>,
}

impl BoundReport {
    pub fn tail_bound(&self, t: u64) -> TailBound {
        tail_from_ln_g(t, self.beta, self.g.ln())
    }

    /// `(t, min(1, g β^−t))` for `t = 1..=t_max`.
    pub fn tail_curve(&self, t_max: u64) -> Vec<(u64, f64)> {
        (1..=t_max).map(|t| (t, self.tail_bound(t).value)).collect()
    }
}

/// The `β` values [`plan_bounds`] tries: log-spaced over
/// `[1 + δ, β*(1 − δ)]`.
pub fn beta_grid(beta_star: f64) -> Vec<f64> {
    let lo = (1.0 + BETA_GRID_MARGIN).ln();
    let hi = (beta_star * (1.0 - BETA_GRID_MARGIN)).ln();
    let step = (hi - lo) / (BETA_GRID_POINTS - 1) as f64;
    (0..BETA_GRID_POINTS).map(|i| (lo + step * i as f64).exp()).collect()
}

/// Choose `β` on a log-spaced grid to minimize `M`, ties going to the
/// smaller `β`.
pub fn plan_bounds(drift: &DriftSpec, epsilon: f64, gamma: f64) -> Result<BoundReport> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must be positive")));
    }
    let mut reasons = Vec::new();
    let (nu_v, nu_v_source) = match drift.nu_v {
        NuV::Exact(v) => (v, NuVSource::Exact),
        NuV::BoundedByRemark => {
            reasons.push("nu(V) replaced by b / (eps (1 - lambda))".to_string());
            (nu_v_bound(drift.b, drift.lambda, epsilon)?, NuVSource::RemarkBound)
        }
    };
    let j = compute_j(drift.a, epsilon, drift.lambda)?;
    let bs = beta_star(j, drift.lambda, epsilon)?;
    let grid = beta_grid(bs);
    let mut best: Option<(u64, f64, f64)> = None;
    let mut invalid = Vec::new();
    for &beta in &grid {
        let attempt = ln_g_factor(beta, epsilon, j, drift.lambda, nu_v)
            .and_then(|ln_g| m_from_threshold(ln_m_threshold(gamma, beta, ln_g)).map(|m| (m, ln_g)));
        match attempt {
            Ok((m, ln_g)) => {
                if best.is_none_or(|(bm, _, _)| m < bm) {
                    best = Some((m, beta, ln_g));
                }
            }
            Err(e) => invalid.push(format!("beta = {beta}: {e}")),
        }
    }
    let Some((m, beta, ln_g)) = best else {
        return Err(Error::NoValidBeta(invalid));
    };
    if !invalid.is_empty() {
        reasons.push(format!("{} of {} grid points invalid, first: {}", invalid.len(), grid.len(), invalid[0]));
    }
    Ok(BoundReport {
        epsilon,
        lambda: drift.lambda,
        b: drift.b,
        d: drift.d,
        a: drift.a,
        nu_v,
        nu_v_source,
        j,
        beta_star: bs,
        beta,
        phi: phi(beta, drift.lambda),
        g: ln_g.exp(),
        m,
        gamma,
        grid_points: grid.len(),
        invalid_grid_points: invalid.len(),
        valid: true,
        reasons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn j_examples() {
        assert!((compute_j(3.0, 0.5, 0.5).unwrap() - 5.0).abs() < 1e-15);
        assert!((compute_j(0.9, 0.5, 0.5).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(compute_j(0.5, 0.5, 0.5).unwrap(), 0.0);
        assert!(compute_j(0.4, 0.5, 0.5).is_err());
    }

    #[test]
    fn beta_star_examples() {
        assert!((beta_star(0.8, 0.5, 0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!((beta_star(1.0, 0.5, 0.5).unwrap() - 2.0).abs() < 1e-14);
        let bs = beta_star(4.47, 0.6, 0.3173).unwrap();
        // 50-digit evaluation of the closed form.
        assert!((bs - 1.109_338_803_736_755_3).abs() < 1e-12, "{bs}");
        assert!(bs <= 1.0 / 0.6);
    }

    #[test]
    fn nu_v_bound_examples() {
        assert!((nu_v_bound(1.4, 0.6, 0.35).unwrap() - 10.0).abs() < 1e-12);
        assert!(nu_v_bound(0.0, 0.6, 0.35).is_err());
    }

    #[test]
    fn g_invalid_when_numerator_nonpositive() {
        // J < 1 so beta* = 1/lambda = 4, but 1 - beta(1 - eps) <= 0 for beta >= 2.
        assert!(matches!(g_factor(2.5, 0.5, 0.5, 0.25, 1.0), Err(Error::InvalidBeta { .. })));
        assert!(g_factor(1.5, 0.5, 0.5, 0.25, 1.0).is_ok());
    }

    #[test]
    fn g_matches_high_precision_transcription() {
        // Direct transcription evaluated at 50 digits.
        let cases = [
            (1.000001, 0.3173, 4.47, 0.6, 1.474864723839019, 1.000_007_523_836_083_715_7),
            (1.01, 0.3173, 4.47, 0.6, 1.474864723839019, 1.082_617_235_846_905_590_4),
            (1.05, 0.3173, 4.47, 0.6, 1.474864723839019, 1.685_339_890_165_827_495_0),
            (1.2, 0.8, 0.7 / 0.75, 0.75, 1.25, 2.239_522_968_333_602_433_7),
        ];
        for (beta, eps, j, lam, nuv, expect) in cases {
            let g = g_factor(beta, eps, j, lam, nuv).unwrap();
            assert!(((g - expect) / expect).abs() < 1e-12, "beta {beta}: {g} vs {expect}");
        }
    }

    #[test]
    fn g_blows_up_near_beta_star() {
        let (eps, j, lam, nuv) = (0.3, 3.0, 0.6, 2.0);
        let bs = beta_star(j, lam, eps).unwrap();
        let mut prev = 0.0;
        for rel in [1e-2, 1e-4, 1e-6, 1e-8] {
            let g = g_factor(bs * (1.0 - rel), eps, j, lam, nuv).unwrap();
            assert!(g > prev);
            prev = g;
        }
        assert!(prev > 1e6);
    }

    #[test]
    fn tail_bound_is_geometric() {
        let fx = fixtures::drift5();
        let drift = fx.drift().unwrap();
        let rep = plan_bounds(&drift, 0.8, 0.05).unwrap();
        for t in 1..50 {
            let a = rep.tail_bound(t);
            let b = rep.tail_bound(t + 1);
            assert!((b.raw * rep.beta / a.raw - 1.0).abs() < 1e-12);
            assert!(b.raw < a.raw);
        }
        assert!(rep.tail_bound(1).raw >= 1.0 || rep.tail_bound(1).vacuous == false);
    }

    #[test]
    fn m_examples() {
        assert_eq!(compute_m(1e6, 1.5, 1.0).unwrap(), 1);
        let (beta, g) = (1.2, 7.0);
        for gamma in [0.4, 0.2, 0.1, 0.05, 0.01] {
            let m1 = compute_m(gamma, beta, g).unwrap();
            let m2 = compute_m(gamma / 2.0, beta, g).unwrap();
            let step = (2f64.ln() / beta.ln()).ceil() as u64 + 1;
            assert!(m2 >= m1 && m2 - m1 <= step);
        }
        assert!(matches!(compute_m(1e-300, 1.0 + 1e-9, 1e300), Err(Error::TruncationTooLarge { .. })));
    }

    #[test]
    fn drift_fit_whole_space_convention() {
        let rows = fixtures::figure1_chain().rows().to_vec();
        let d = fit_drift_finite(&rows, &[0, 1, 2], &[1.0, 2.0, 3.0], None).unwrap();
        assert_eq!(d.lambda, 0.5);
        // PV = (2, 2.5, 4/3); PV - V/2 = (1.5, 1.5, -1/6).
        assert!((d.b - 1.5).abs() < 1e-12);
    }

    #[test]
    fn drift_fit_constant_v_fails() {
        let fx = fixtures::drift5();
        assert!(matches!(
            fit_drift_finite(fx.chain.rows(), &fx.small_set, &[1.0; 5], None),
            Err(Error::NoDrift(_))
        ));
    }

    #[test]
    fn drift5_fit_matches_hand_computation() {
        let d = fixtures::drift5().drift().unwrap();
        // PV = (1.2, 1.5, 1.5, 2.8, 4.2); off C: 1.5/2, 2.8/4, 4.2/8.
        assert!((d.lambda - 0.75).abs() < 1e-12);
        assert!((d.b - 0.75).abs() < 1e-12);
        assert_eq!(d.d, 1.0);
        assert!((d.a - 1.5).abs() < 1e-12);
        assert_eq!(d.nu_v, NuV::Exact(1.25));
    }

    #[test]
    fn remark_bound_plans_are_looser() {
        let fx = fixtures::drift5();
        let exact = fx.drift().unwrap();
        let loose = DriftSpec {
            nu_v: NuV::BoundedByRemark,
            ..exact
        };
        for gamma in [0.2, 0.1, 0.05, 0.01] {
            let a = plan_bounds(&exact, 0.8, gamma).unwrap();
            let b = plan_bounds(&loose, 0.8, gamma).unwrap();
            assert!(b.m >= a.m);
            assert_eq!(b.nu_v_source, NuVSource::RemarkBound);
        }
    }

    #[test]
    fn grid_choice_beats_endpoints() {
        let fx = fixtures::drift5();
        let drift = fx.drift().unwrap();
        let rep = plan_bounds(&drift, 0.8, 0.05).unwrap();
        let grid = beta_grid(rep.beta_star);
        for &beta in [grid[0], grid[grid.len() - 1]].iter() {
            if let Ok(g) = g_factor(beta, 0.8, rep.j, drift.lambda, rep.nu_v) {
                if let Ok(m) = compute_m(0.05, beta, g) {
                    assert!(rep.m <= m);
                }
            }
        }
    }
}
