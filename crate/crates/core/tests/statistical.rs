//! Distributional agreement between samplers that should share a law.

use splitchain::commands::trajectory;
use splitchain::fixtures;
use splitchain::mixture::{sample_pi_tilde, DEFAULT_ATTEMPT_CAP};
use splitchain::oracle::{stationary_exact, two_sample_tv, tv_distance, FiniteDistribution};
use splitchain::perfect::{multigamma_sample, RandomMapModel};
use splitchain::rng::par_batch;
use splitchain::{Minorization, RngStream, SplitChain, Strategy};

const N: usize = 100_000;
const TWO_SAMPLE_TV: f64 = 0.02;
const LENGTH_BINS: usize = 40;

fn binned(lengths: &[usize]) -> Vec<usize> {
    lengths.iter().map(|&l| l.min(LENGTH_BINS) - 1).collect()
}

#[test]
fn forward_and_retrospective_tours_agree() {
    for fx in [fixtures::figure1(), fixtures::drift5()] {
        let minor = fx.minorization();
        let split = SplitChain::new(&fx.chain, &minor);
        let fwd = par_batch(N, 1, |rng| split.tour_length(Strategy::Forward, rng)).unwrap();
        let retro = par_batch(N, 2, |rng| split.tour_length(Strategy::Retrospective, rng)).unwrap();
        let tv = two_sample_tv(&binned(&fwd), &binned(&retro), LENGTH_BINS).unwrap();
        assert!(tv <= TWO_SAMPLE_TV, "{}: {tv}", fx.name);
    }
}

#[test]
fn multigamma_and_read_once_agree() {
    let chain = fixtures::figure1_chain();
    let minor = fixtures::figure1_minorization();
    let a = par_batch(N, 3, |rng| multigamma_sample(&chain, &minor, rng)).unwrap();
    let model = RandomMapModel::new(fixtures::figure1_map(), 2).unwrap();
    let b = model
        .read_once(RngStream::from_seed(4))
        .take(N)
        .collect::<splitchain::Result<Vec<_>>>()
        .unwrap();
    let tv = two_sample_tv(&a, &b, 3).unwrap();
    assert!(tv <= TWO_SAMPLE_TV, "{tv}");
}

#[test]
fn states_at_regeneration_times_follow_pi() {
    let chain = fixtures::figure1_chain();
    let minor = fixtures::figure1_minorization();
    let split = SplitChain::new(&chain, &minor);
    let pi = stationary_exact(chain.rows()).unwrap();
    let mut rng = RngStream::from_seed(8);
    let mut x = 0usize;
    let mut flagged = Vec::with_capacity(N);
    while flagged.len() < N {
        let step = split.advance(&x, Strategy::Forward, &mut rng).unwrap();
        if step.regenerated {
            flagged.push(x);
        }
        x = step.next;
    }
    let emp = FiniteDistribution::empirical(&flagged, 3).unwrap();
    let tv = tv_distance(emp.weights(), pi.weights()).unwrap();
    assert!(tv <= TWO_SAMPLE_TV, "{tv}");
}

#[test]
fn multigamma_law_follows_relabeling() {
    let chain = fixtures::figure1_chain();
    let minor = fixtures::figure1_minorization();
    let perm = [2usize, 0, 1];
    let pchain = chain.permuted(&perm).unwrap();
    let pminor = minor.permuted(&perm).unwrap();
    let a = par_batch(N, 5, |rng| multigamma_sample(&chain, &minor, rng)).unwrap();
    let b = par_batch(N, 6, |rng| multigamma_sample(&pchain, &pminor, rng)).unwrap();
    let a_relabeled: Vec<usize> = a.iter().map(|&x| perm[x]).collect();
    let tv = two_sample_tv(&a_relabeled, &b, 3).unwrap();
    assert!(tv <= TWO_SAMPLE_TV, "{tv}");
    let pi = stationary_exact(chain.rows()).unwrap();
    let ppi = stationary_exact(pchain.rows()).unwrap();
    for x in 0..3 {
        assert!((pi.weights()[x] - ppi.weights()[perm[x]]).abs() < 1e-12);
    }
}

#[test]
fn pi_tilde_start_is_close_to_pi_at_time_zero() {
    let fx = fixtures::figure1();
    let minor = fx.minorization();
    let drift = fx.drift().unwrap();
    let plan = splitchain::bounds::plan_bounds(&drift, minor.epsilon(), 0.01).unwrap();
    let split = SplitChain::new(&fx.chain, &minor);
    let reps = 10_000;
    let paths = par_batch(reps, 12, |rng| {
        let x0 = sample_pi_tilde(&split, plan.m as usize, Strategy::Forward, rng, DEFAULT_ATTEMPT_CAP)?.state;
        Ok(trajectory(&fx.chain, x0, 1_000, rng))
    })
    .unwrap();
    let pi = stationary_exact(fx.chain.rows()).unwrap();
    let sampling = 3.0 * (3.0 / reps as f64).sqrt();
    for step in [0, 1_000] {
        let xs: Vec<usize> = paths.iter().map(|p| p[step]).collect();
        let emp = FiniteDistribution::empirical(&xs, 3).unwrap();
        let tv = tv_distance(emp.weights(), pi.weights()).unwrap();
        assert!(tv <= 0.01 + sampling, "step {step}: {tv}");
    }
}

#[test]
fn single_term_truncation_gives_nu() {
    let fx = fixtures::drift5();
    let minor = fx.minorization();
    // The planned M follows the formula even for a loose budget.
    let plan = splitchain::bounds::plan_bounds(&fx.drift().unwrap(), minor.epsilon(), 1.9).unwrap();
    let q = (2.0 * plan.g / (1.9 * (plan.beta - 1.0))).ln() / plan.beta.ln();
    assert_eq!(plan.m, q.floor() as u64 + 1);
    assert_eq!(splitchain::bounds::compute_m(1e3, plan.beta, plan.g).unwrap(), 1);

    let split = SplitChain::new(&fx.chain, &minor);
    let xs = par_batch(20_000, 13, |rng| {
        Ok(sample_pi_tilde(&split, 1, Strategy::Forward, rng, DEFAULT_ATTEMPT_CAP)?.state)
    })
    .unwrap();
    let emp = FiniteDistribution::empirical(&xs, 5).unwrap();
    assert!(tv_distance(emp.weights(), minor.nu()).unwrap() <= 0.02);
}

#[test]
fn retrospective_q3_matches_exact() {
    let chain = fixtures::figure1_chain();
    let minor = fixtures::figure1_minorization();
    let split = SplitChain::new(&chain, &minor);
    let mut rng = RngStream::from_seed(14);
    let xs: Vec<usize> = (0..20_000)
        .map(|_| splitchain::mixture::sample_qt(&split, 3, Strategy::Retrospective, &mut rng, 1_000).unwrap().state)
        .collect();
    let emp = FiniteDistribution::empirical(&xs, 3).unwrap();
    assert!(tv_distance(emp.weights(), &[0.75, 1.0 / 16.0, 3.0 / 16.0]).unwrap() <= 0.02);
}
