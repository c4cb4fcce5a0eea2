//! Batch workflows behind the `splitchain` binary: perfect sampling,
//! approximate sampling from `π̃`, bound planning, MCMC from a `π̃` start
//! and the fixture verification suite.
//!
//! Every workflow is a pure function of `(spec, arguments, seed)`. Reports
//! hold no timestamps or paths, so identical inputs give byte-identical
//! files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::spec_file::Ar1Model;
use crate::bounds::{plan_bounds, BoundReport, DriftSpec, NuV};
use crate::fixtures::{self, FiniteFixture};
use crate::mixture::{sample_pi_tilde, tv_budget, TruncatedWeights, DEFAULT_ATTEMPT_CAP};
use crate::oracle::{
    gof_report, ks_statistic, pi_tilde_exact, reconstruct_pi, stationarity_residual, stationary_exact,
    tau_tail_exact, tv_distance, FiniteDistribution, TabooKernel, TauTails,
};
use crate::perfect::{corollary1_exact, exact_block_law, multigamma_sample};
use crate::rng::{par_batch, RngStream, GENERATOR_DESCRIPTION};
use crate::spec_file::{FiniteModel, Model, ModelSpec};
use crate::split::{
    validate_model, FiniteChain, FiniteMinorization, MarkovKernel, Minorization, SplitChain, Strategy,
};
use crate::{Error, Result};

/// Sampled states, one per output line.
#[derive(Clone, Debug, PartialEq)]
pub enum Samples {
    Finite(Vec<usize>),
    Continuous(Vec<f64>),
}

impl Samples {
    pub fn len(&self) -> usize {
        match self {
            Samples::Finite(v) => v.len(),
            Samples::Continuous(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Integer labels, or reals with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Samples::Finite(v) => v.iter().for_each(|x| writeln!(out, "{x}").unwrap()),
            Samples::Continuous(v) => v.iter().for_each(|x| writeln!(out, "{x:.16e}").unwrap()),
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub algorithm: String,
    pub seed: u64,
    pub generator: String,
    pub model: ModelSpec,
    pub parameters: BTreeMap<String, Value>,
    pub samples: usize,
    pub acceptance_rates: BTreeMap<String, f64>,
    pub attempts: BTreeMap<String, u64>,
    pub oracle: BTreeMap<String, Value>,
}

impl RunReport {
    fn new(command: &str, algorithm: &str, seed: u64, model: &ModelSpec) -> Self {
        Self {
            command: command.into(),
            algorithm: algorithm.into(),
            seed,
            generator: GENERATOR_DESCRIPTION.into(),
            model: model.clone(),
            parameters: BTreeMap::new(),
            samples: 0,
            acceptance_rates: BTreeMap::new(),
            attempts: BTreeMap::new(),
            oracle: BTreeMap::new(),
        }
    }

    fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(key.into(), json!(value));
    }

    fn oracle(&mut self, key: &str, value: impl Serialize) {
        self.oracle.insert(key.into(), json!(value));
    }
}

/// Samples plus the report describing how they were drawn.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub samples: Samples,
    pub report: RunReport,
}

impl RunOutput {
    pub fn write(&self, samples: &Path, report: &Path) -> Result<()> {
        std::fs::write(samples, self.samples.to_text())?;
        write_json(report, &self.report)
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(std::fs::write(path, text)?)
}

fn finite_part(model: &Model) -> Option<&FiniteModel> {
    match model {
        Model::Finite(f) => Some(f),
        Model::Map { finite, .. } => Some(finite),
        Model::Ar1(_) => None,
    }
}

/// Refuse to sample from a finite model whose minorization is false.
fn require_valid(f: &FiniteModel) -> Result<()> {
    let report = validate_model(&f.chain, &f.minor, 0, &mut RngStream::from_seed(0));
    if let Some(v) = report.violations().first() {
        return Err(Error::MinorizationViolation {
            x: v.x.clone(),
            y: v.y.clone(),
            lhs: v.lhs,
            rhs: v.rhs,
        });
    }
    if !report.passed {
        return Err(Error::Precondition(format!("model validation failed: {:?}", report.row_errors)));
    }
    Ok(())
}

/// Goodness of fit when the sample is large enough, else the empirical TV.
fn compare_finite(samples: &[usize], target: &FiniteDistribution) -> Result<Value> {
    if samples.len() >= 100 * target.len() {
        Ok(json!(gof_report(samples, target)?))
    } else {
        let emp = FiniteDistribution::empirical(samples, target.len())?;
        Ok(json!({ "empirical_tv": tv_distance(emp.weights(), target.weights())? }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerfectAlgo {
    Multigamma,
    ReadOnce,
}

pub fn cmd_perfect(spec: &ModelSpec, algo: PerfectAlgo, n: usize, seed: u64) -> Result<RunOutput> {
    let model = spec.build()?;
    match algo {
        PerfectAlgo::Multigamma => {
            let mut report = RunReport::new("perfect", "multigamma", seed, spec);
            report.param("n", n);
            let samples = match &model {
                Model::Ar1(_) => return Err(Error::Precondition("multigamma needs C = X".into())),
                m => {
                    let f = finite_part(m).expect("finite");
                    require_valid(f)?;
                    if !f.minor.covers_space() {
                        return Err(Error::Precondition("multigamma needs C = X".into()));
                    }
                    report.param("epsilon", f.minor.epsilon());
                    let draws = par_batch(n, seed, |rng| multigamma_sample(&f.chain, &f.minor, rng))?;
                    let pi = stationary_exact(f.chain.rows())?;
                    report.oracle("pi", pi.weights());
                    report.oracle("fit_to_pi", compare_finite(&draws, &pi)?);
                    Samples::Finite(draws)
                }
            };
            report.samples = samples.len();
            Ok(RunOutput { samples, report })
        }
        PerfectAlgo::ReadOnce => {
            let Model::Map { map, finite } = &model else {
                return Err(Error::Precondition("read-once needs a random-map model".into()));
            };
            let mut report = RunReport::new("perfect", "read-once", seed, spec);
            report.param("n", n);
            report.param("k", map.k);
            let mut stream = map.read_once(RngStream::from_seed(seed));
            let draws = (0..n).map(|_| stream.next_sample()).collect::<Result<Vec<_>>>()?;
            let blocks = stream.blocks_consumed();
            // Every emission ends in one coalescent block, plus the first seed.
            let coalescent = if n > 0 { n as u64 + 1 } else { 0 };
            report.attempts.insert("blocks".into(), blocks);
            if blocks > 0 {
                report.acceptance_rates.insert("block_coalescence".into(), coalescent as f64 / blocks as f64);
            }
            if let Ok(law) = exact_block_law(map) {
                report.oracle("block_epsilon", law.epsilon);
            }
            let pi = stationary_exact(finite.chain.rows())?;
            report.oracle("pi", pi.weights());
            report.oracle("fit_to_pi", compare_finite(&draws, &pi)?);
            report.samples = n;
            Ok(RunOutput {
                samples: Samples::Finite(draws),
                report,
            })
        }
    }
}

/// Tails `Pr(τ ≥ t)` out to the numerical cutoff and at least `m` terms.
fn full_tails(k: &TabooKernel, nu: &[f64], m: usize) -> Result<TauTails> {
    let probe = tau_tail_exact(k, nu, m.max(1))?;
    tau_tail_exact(k, nu, probe.terms.max(m))
}

/// Exact oracle quantities for `π̃` with truncation `m`.
#[derive(Clone, Debug, Serialize)]
pub struct TruncationOracle {
    pub pi: Vec<f64>,
    pub pi_tilde: Vec<f64>,
    pub tv_pi_pi_tilde: f64,
    pub tv_budget: f64,
    pub p_tilde: Vec<f64>,
}

pub fn truncation_oracle(chain: &FiniteChain, minor: &FiniteMinorization, m: usize) -> Result<TruncationOracle> {
    let pi = stationary_exact(chain.rows())?;
    let k = TabooKernel::new(chain.rows(), minor)?;
    let tails = full_tails(&k, minor.nu(), m)?;
    let weights = TruncatedWeights::from_tails(&tails.tails, m, 0.0)?;
    let p_tilde = weights.p_tilde.expect("built from tails");
    let pt = pi_tilde_exact(&k, minor.nu(), m)?;
    Ok(TruncationOracle {
        tv_pi_pi_tilde: tv_distance(pi.weights(), pt.weights())?,
        tv_budget: tv_budget(&tails.p, &p_tilde),
        pi: pi.weights().to_vec(),
        pi_tilde: pt.weights().to_vec(),
        p_tilde,
    })
}

fn plan(model: &Model, gamma: f64) -> Result<BoundReport> {
    match model {
        Model::Ar1(a) => plan_bounds(&a.constants.drift(), a.minor.epsilon, gamma),
        m => {
            let f = finite_part(m).expect("finite");
            plan_bounds(&f.drift()?, f.minor.epsilon(), gamma)
        }
    }
}

fn record_plan(report: &mut RunReport, plan: &BoundReport) {
    report.param("gamma", plan.gamma);
    report.param("M", plan.m);
    report.param("beta", plan.beta);
    report.param("epsilon", plan.epsilon);
    report.param("g", plan.g);
}

/// KS statistic against the AR(1) stationary law and the pass threshold
/// `γ + 1.63/√n`.
pub fn ar1_stationary_check(a: &Ar1Model, samples: &[f64], gamma: f64) -> Value {
    let law = Normal::new(0.0, a.chain.stationary_sd()).expect("positive sd");
    let ks = ks_statistic(samples, |x| law.cdf(x));
    let threshold = gamma + 1.63 / (samples.len() as f64).sqrt();
    json!({
        "stationary_sd": a.chain.stationary_sd(),
        "ks_statistic": ks,
        "threshold": threshold,
        "pass": ks <= threshold,
    })
}

struct Drawn<S> {
    states: Vec<S>,
    t_attempts: u64,
    q_attempts: u64,
}

fn draw_pi_tilde<K, M>(kernel: &K, minor: &M, m: usize, strategy: Strategy, n: usize, seed: u64) -> Result<Drawn<K::State>>
where
    K: MarkovKernel,
    M: Minorization<K::State>,
{
    let chain = SplitChain::new(kernel, minor);
    let draws = par_batch(n, seed, |rng| sample_pi_tilde(&chain, m, strategy, rng, DEFAULT_ATTEMPT_CAP))?;
    Ok(Drawn {
        t_attempts: draws.iter().map(|d| d.t_attempts as u64).sum(),
        q_attempts: draws.iter().map(|d| d.q_attempts as u64).sum(),
        states: draws.into_iter().map(|d| d.state).collect(),
    })
}

fn record_attempts<S>(report: &mut RunReport, d: &Drawn<S>) {
    let n = d.states.len() as f64;
    report.attempts.insert("t_tilde".into(), d.t_attempts);
    report.attempts.insert("q_t".into(), d.q_attempts);
    if !d.states.is_empty() {
        report.acceptance_rates.insert("t_tilde".into(), n / d.t_attempts as f64);
        report.acceptance_rates.insert("q_t".into(), n / d.q_attempts as f64);
    }
}

pub fn cmd_approx(spec: &ModelSpec, gamma: f64, n: usize, strategy: Strategy, seed: u64) -> Result<RunOutput> {
    let model = spec.build()?;
    let plan = plan(&model, gamma)?;
    let m = plan.m as usize;
    let mut report = RunReport::new("approx", "pi-tilde", seed, spec);
    record_plan(&mut report, &plan);
    report.param("n", n);
    report.param("strategy", strategy);
    let samples = match &model {
        Model::Ar1(a) => {
            let d = draw_pi_tilde(&a.chain, &a.minor, m, strategy, n, seed)?;
            record_attempts(&mut report, &d);
            report.param("constants", a.constants);
            report.oracle("stationary_fit", ar1_stationary_check(a, &d.states, gamma));
            Samples::Continuous(d.states)
        }
        other => {
            let f = finite_part(other).expect("finite");
            require_valid(f)?;
            let d = draw_pi_tilde(&f.chain, &f.minor, m, strategy, n, seed)?;
            record_attempts(&mut report, &d);
            let t = truncation_oracle(&f.chain, &f.minor, m)?;
            report.oracle("tv_pi_pi_tilde", t.tv_pi_pi_tilde);
            report.oracle("tv_budget", t.tv_budget);
            report.oracle("guarantee_holds", t.tv_pi_pi_tilde <= gamma);
            report.oracle("fit_to_pi_tilde", compare_finite(&d.states, &FiniteDistribution::new(t.pi_tilde.clone())?)?);
            report.oracle("pi", &t.pi);
            report.oracle("pi_tilde", &t.pi_tilde);
            Samples::Finite(d.states)
        }
    };
    report.samples = samples.len();
    Ok(RunOutput { samples, report })
}

/// Where the drift constants come from.
#[derive(Clone, Debug)]
pub enum BoundsInput {
    Spec(ModelSpec),
    Raw { epsilon: f64, drift: DriftSpec },
}

/// Relative slack allowed when comparing a tail bound with the exact tail;
/// absorbs rounding where the bound is attained.
pub const DOMINANCE_REL_TOL: f64 = 1e-12;

/// Oracle tail dominance `g β^{−t} ≥ Pr(τ ≥ t)` over `t ≤ t_max`.
#[derive(Clone, Debug, Serialize)]
pub struct DominanceCheck {
    pub t_max: u64,
    /// `min_t (bound − tail) / tail`.
    pub worst_relative_margin: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsDocument {
    #[serde(flatten)]
    pub report: BoundReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_dominance: Option<DominanceCheck>,
}

#[derive(Clone, Debug)]
pub struct BoundsOutput {
    pub document: BoundsDocument,
    pub curve: Vec<(u64, f64)>,
}

impl BoundsOutput {
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("t,bound\n");
        for (t, b) in &self.curve {
            writeln!(out, "{t},{b:.16e}").unwrap();
        }
        out
    }

    pub fn write(&self, curve: &Path, report: &Path) -> Result<()> {
        std::fs::write(curve, self.curve_csv())?;
        write_json(report, &self.document)
    }
}

pub fn tail_dominance(report: &BoundReport, tails: &[f64], t_max: u64) -> DominanceCheck {
    let worst = worst_relative_margin(|t| report.tail_bound(t).value, tails, t_max);
    DominanceCheck {
        t_max,
        worst_relative_margin: worst,
        holds: worst >= -DOMINANCE_REL_TOL,
    }
}

fn worst_relative_margin(bound: impl Fn(u64) -> f64, tails: &[f64], t_max: u64) -> f64 {
    (1..=t_max)
        .filter_map(|t| {
            let oracle = tails.get(t as usize - 1).copied().unwrap_or(0.0);
            (oracle > 0.0).then(|| (bound(t) - oracle) / oracle)
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn cmd_bounds(input: &BoundsInput, gamma: f64, t_max: u64) -> Result<BoundsOutput> {
    let (report, dominance) = match input {
        BoundsInput::Raw { epsilon, drift } => (plan_bounds(drift, *epsilon, gamma)?, None),
        BoundsInput::Spec(spec) => {
            let model = spec.build()?;
            let report = plan(&model, gamma)?;
            let dominance = match finite_part(&model) {
                Some(f) => {
                    let k = TabooKernel::new(f.chain.rows(), &f.minor)?;
                    let tails = tau_tail_exact(&k, f.minor.nu(), t_max as usize)?;
                    Some(tail_dominance(&report, &tails.tails, t_max))
                }
                None => None,
            };
            (report, dominance)
        }
    };
    Ok(BoundsOutput {
        curve: report.tail_curve(t_max),
        document: BoundsDocument {
            report,
            oracle_dominance: dominance,
        },
    })
}

/// Starting point of an MCMC run.
#[derive(Clone, Debug, PartialEq)]
pub enum Start {
    /// A state label, or a real for continuous models.
    Point(String),
    PiTilde { gamma: f64 },
}

/// Run the original kernel `steps` times from `x0`; the result has
/// `steps + 1` states.
pub fn trajectory<K: MarkovKernel>(kernel: &K, x0: K::State, steps: usize, rng: &mut RngStream) -> Vec<K::State> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(x0);
    for i in 0..steps {
        let next = kernel.sample_next(&out[i], rng);
        out.push(next);
    }
    out
}

pub fn cmd_mcmc_run(spec: &ModelSpec, start: &Start, steps: usize, strategy: Strategy, seed: u64) -> Result<RunOutput> {
    let model = spec.build()?;
    let mut report = RunReport::new("mcmc-run", "plain-kernel", seed, spec);
    report.param("steps", steps);
    let mut rng = RngStream::from_seed(seed);
    let planned = match start {
        Start::Point(x) => {
            report.param("start", json!({ "point": x }));
            None
        }
        Start::PiTilde { gamma } => {
            let p = plan(&model, *gamma)?;
            report.param("start", json!({ "pi_tilde": { "gamma": gamma } }));
            record_plan(&mut report, &p);
            report.param("strategy", strategy);
            // Total variation cannot grow under the kernel, so the budget
            // bounds the marginal error at every step.
            report.oracle("marginal_tv_bound", gamma);
            Some(p.m as usize)
        }
    };
    let samples = match &model {
        Model::Ar1(a) => {
            let x0 = match (start, planned) {
                (Start::Point(x), _) => x
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidArgument(format!("start point {x:?}: {e}")))?,
                (_, Some(m)) => {
                    sample_pi_tilde(&SplitChain::new(&a.chain, &a.minor), m, strategy, &mut rng, DEFAULT_ATTEMPT_CAP)?.state
                }
                _ => unreachable!(),
            };
            Samples::Continuous(trajectory(&a.chain, x0, steps, &mut rng))
        }
        other => {
            let f = finite_part(other).expect("finite");
            let x0 = match (start, planned) {
                (Start::Point(x), _) => {
                    let label = x
                        .parse::<usize>()
                        .map_err(|e| Error::InvalidArgument(format!("start label {x:?}: {e}")))?;
                    if label >= f.chain.n_states() {
                        return Err(Error::UnknownLabel(label));
                    }
                    label
                }
                (_, Some(m)) => {
                    require_valid(f)?;
                    let t = truncation_oracle(&f.chain, &f.minor, m)?;
                    report.oracle("tv_pi_pi_tilde", t.tv_pi_pi_tilde);
                    sample_pi_tilde(&SplitChain::new(&f.chain, &f.minor), m, strategy, &mut rng, DEFAULT_ATTEMPT_CAP)?.state
                }
                _ => unreachable!(),
            };
            Samples::Finite(trajectory(&f.chain, x0, steps, &mut rng))
        }
    };
    report.samples = samples.len();
    Ok(RunOutput { samples, report })
}

/// One verified invariant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub fixture: String,
    pub seed: u64,
    pub generator: String,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Fixture names accepted by [`cmd_verify`].
pub const VERIFY_FIXTURES: &[&str] = &["figure1", "drift5", "figure1-corrupted"];

const VERIFY_SAMPLES: usize = 20_000;
const RECONSTRUCTION_HORIZONS: [usize; 6] = [1, 2, 5, 10, 50, 500];
const VERIFY_GAMMAS: [f64; 4] = [0.2, 0.1, 0.05, 0.01];

/// Figure 1 with `ε = 1/2`, which exceeds the true minimum of `P(x, 1)`.
fn corrupted() -> (FiniteFixture, FiniteMinorization) {
    let fx = fixtures::figure1();
    let minor = fx.minorization().with_epsilon(0.5).expect("0.5 is a valid probability");
    (fx, minor)
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn run(&mut self, name: &str, f: impl FnOnce() -> Result<(bool, Value)>) {
        let (pass, measured) = f().unwrap_or_else(|e| (false, json!({ "error": e.to_string() })));
        self.checks.push(Check {
            name: name.into(),
            pass,
            measured,
        });
    }
}

pub fn cmd_verify(fixture: &str, seed: u64) -> Result<VerifyReport> {
    let (fx, minor) = match fixture {
        "figure1-corrupted" => corrupted(),
        name => {
            let fx = fixtures::by_name(name)?;
            let m = fx.minorization();
            (fx, m)
        }
    };
    let chain = &fx.chain;
    let rows = chain.rows();
    let mut suite = Suite { checks: Vec::new() };

    suite.run("minorization", || {
        let r = validate_model(chain, &minor, 0, &mut RngStream::from_seed(seed));
        Ok((r.passed, json!(r)))
    });
    suite.run("stationary-solve", || {
        let pi = stationary_exact(rows)?;
        let res = stationarity_residual(rows, pi.weights());
        Ok((res <= 1e-12, json!({ "pi": pi.weights(), "residual": res })))
    });
    suite.run("kac-identity", || {
        let pi = stationary_exact(rows)?;
        let k = TabooKernel::new(rows, &minor)?;
        let tails = tau_tail_exact(&k, minor.nu(), 1)?;
        let kac = 1.0 / (minor.epsilon() * pi.mass_on(&minor.small_set_indices()));
        let err = (tails.e_tau - kac).abs();
        Ok((err <= 1e-10, json!({ "e_tau": tails.e_tau, "kac": kac, "error": err })))
    });
    suite.run("reconstruction-within-defect", || {
        let pi = stationary_exact(rows)?;
        let k = TabooKernel::new(rows, &minor)?;
        let mut pass = true;
        let mut rows_out = Vec::new();
        for t in RECONSTRUCTION_HORIZONS {
            let r = reconstruct_pi(&k, minor.nu(), t)?;
            let tv = r.tv_to(pi.weights())?;
            pass &= tv <= r.defect + 1e-12;
            rows_out.push(json!({ "T": t, "tv": tv, "defect": r.defect }));
        }
        let last = reconstruct_pi(&k, minor.nu(), 500)?.defect;
        Ok((pass && last <= 1e-8, json!(rows_out)))
    });
    if minor.covers_space() {
        suite.run("corollary1-exact", || {
            let pi = stationary_exact(rows)?;
            let c = corollary1_exact(chain, &minor, 1e-12)?;
            let tv = tv_distance(&c.mixture, pi.weights())?;
            Ok((tv <= 1e-10, json!({ "tv": tv, "terms": c.terms })))
        });
        suite.run("multigamma-fit", || {
            let pi = stationary_exact(rows)?;
            let draws = par_batch(VERIFY_SAMPLES, seed, |rng| multigamma_sample(chain, &minor, rng))?;
            let g = gof_report(&draws, &pi)?;
            Ok((g.pass, json!(g)))
        });
    }
    let drift = crate::bounds::fit_drift_finite(rows, &minor.small_set_indices(), &fx.v, Some(minor.nu()));
    suite.run("tail-dominance", || {
        let drift = drift.as_ref().map(|d| *d).map_err(|e| Error::Precondition(e.to_string()))?;
        let k = TabooKernel::new(rows, &minor)?;
        let tails = tau_tail_exact(&k, minor.nu(), 100)?;
        let plan = plan_bounds(&drift, minor.epsilon(), 0.1)?;
        let mut worst = f64::INFINITY;
        for beta in crate::bounds::beta_grid(plan.beta_star) {
            let Ok(ln_g) = crate::bounds::ln_g_factor(beta, minor.epsilon(), plan.j, drift.lambda, plan.nu_v) else {
                continue;
            };
            let bound = |t: u64| (ln_g - t as f64 * beta.ln()).exp().min(1.0);
            worst = worst.min(worst_relative_margin(bound, &tails.tails, 100));
        }
        Ok((worst >= -DOMINANCE_REL_TOL, json!({ "worst_relative_margin": worst, "t_max": 100 })))
    });
    suite.run("truncation-guarantee", || {
        let drift = drift.as_ref().map(|d| *d).map_err(|e| Error::Precondition(e.to_string()))?;
        let mut pass = true;
        let mut out = Vec::new();
        for gamma in VERIFY_GAMMAS {
            let plan = plan_bounds(&drift, minor.epsilon(), gamma)?;
            let t = truncation_oracle(chain, &minor, plan.m as usize)?;
            pass &= t.tv_pi_pi_tilde <= gamma && t.tv_budget >= t.tv_pi_pi_tilde;
            out.push(json!({ "gamma": gamma, "M": plan.m, "tv": t.tv_pi_pi_tilde, "budget": t.tv_budget }));
        }
        Ok((pass, json!(out)))
    });

    let passed = suite.checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        fixture: fixture.into(),
        seed,
        generator: GENERATOR_DESCRIPTION.into(),
        checks: suite.checks,
        passed,
    })
}

/// Drift constants given directly rather than through a model.
pub fn raw_drift(lambda: f64, b: f64, d: f64, a: f64, nu_v: Option<f64>) -> DriftSpec {
    DriftSpec {
        lambda,
        b,
        d,
        a,
        nu_v: nu_v.map_or(NuV::BoundedByRemark, NuV::Exact),
    }
}
