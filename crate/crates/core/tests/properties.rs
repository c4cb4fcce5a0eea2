use proptest::prelude::*;

use splitchain::bounds::{beta_star, compute_j, compute_m, plan_bounds, DriftSpec, NuV};
use splitchain::commands::truncation_oracle;
use splitchain::mixture::{tv_budget, TruncatedWeights};
use splitchain::oracle::{
    qt_exact, reconstruct_pi, stationary_exact, tau_tail_exact, tv_distance, TabooKernel,
};
use splitchain::perfect::{exact_block_law, residual_matrix, RandomMapModel, ThresholdMap};
use splitchain::rng::{cumulative, sample_cumulative};
use splitchain::split::residual_distribution;
use splitchain::{FiniteChain, FiniteMinorization, Minorization};

/// Irreducible chains: integer weights plus a cycle `x → x+1`.
fn chain_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<usize>)> {
    (2usize..6)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(proptest::collection::vec(0u32..6, n), n),
                proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n),
            )
        })
        .prop_map(|(w, c)| {
            let n = w.len();
            let rows = w
                .iter()
                .enumerate()
                .map(|(x, r)| {
                    let mut r: Vec<f64> = r.iter().map(|&v| v as f64).collect();
                    r[(x + 1) % n] += 1.0;
                    let s: f64 = r.iter().sum();
                    r.iter().map(|v| v / s).collect()
                })
                .collect();
            (rows, c)
        })
}

fn minorized() -> impl Strategy<Value = (FiniteChain, FiniteMinorization)> {
    chain_strategy().prop_filter_map("no minorization", |(rows, c)| {
        let m = splitchain::split::auto_minorization_finite(&rows, &c).ok()?;
        Some((FiniteChain::new(rows).ok()?, m))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn minorization_holds_pointwise((chain, m) in minorized()) {
        for x in m.small_set_indices() {
            for (y, &p) in chain.row(x).iter().enumerate() {
                prop_assert!(m.epsilon() * m.nu()[y] <= p + 1e-12);
            }
        }
    }

    #[test]
    fn residual_round_trip((chain, m) in minorized()) {
        prop_assume!(m.epsilon() < 1.0);
        for x in m.small_set_indices() {
            let r = residual_distribution(&chain, &m, &x).unwrap();
            let r = r.as_exact().unwrap();
            prop_assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for y in 0..chain.n_states() {
                prop_assert!(r[y] >= 0.0);
                let back = m.epsilon() * m.nu()[y] + (1.0 - m.epsilon()) * r[y];
                prop_assert!((back - chain.row(x)[y]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn taboo_rows((chain, m) in minorized()) {
        let k = TabooKernel::new(chain.rows(), &m).unwrap();
        for x in 0..chain.n_states() {
            let c = if m.in_small_set(&x) { m.epsilon() } else { 0.0 };
            for y in 0..chain.n_states() {
                let expect = (chain.row(x)[y] - c * m.nu()[y]).max(0.0);
                prop_assert!((k.rows()[x][y] - expect).abs() < 1e-12);
            }
            prop_assert!((k.rows()[x].iter().sum::<f64>() - (1.0 - c)).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_weights_are_a_nonincreasing_law((chain, m) in minorized()) {
        let k = TabooKernel::new(chain.rows(), &m).unwrap();
        let probe = tau_tail_exact(&k, m.nu(), 1).unwrap();
        let tails = tau_tail_exact(&k, m.nu(), probe.terms).unwrap();
        prop_assert!(tails.p.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        prop_assert!((tails.p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let pi = stationary_exact(chain.rows()).unwrap();
        let kac = 1.0 / (m.epsilon() * pi.mass_on(&m.small_set_indices()));
        prop_assert!((tails.e_tau - kac).abs() <= 1e-9 * kac);
    }

    #[test]
    fn reconstruction_within_defect((chain, m) in minorized(), t in 1usize..60) {
        let k = TabooKernel::new(chain.rows(), &m).unwrap();
        let pi = stationary_exact(chain.rows()).unwrap();
        let r = reconstruct_pi(&k, m.nu(), t).unwrap();
        prop_assert!(r.tv_to(pi.weights()).unwrap() <= r.defect + 1e-12);
    }

    #[test]
    fn whole_space_tails_are_geometric((chain, _m) in minorized(), t in 1usize..8) {
        let all: Vec<usize> = (0..chain.n_states()).collect();
        let Ok(m) = splitchain::split::auto_minorization_finite(chain.rows(), &all) else {
            return Ok(());
        };
        prop_assume!(m.epsilon() < 1.0);
        let eps = m.epsilon();
        let k = TabooKernel::new(chain.rows(), &m).unwrap();
        let tails = tau_tail_exact(&k, m.nu(), t).unwrap();
        for (i, &p) in tails.p.iter().enumerate() {
            prop_assert!((p - eps * (1.0 - eps).powi(i as i32)).abs() < 1e-12);
        }
        // Q_t = ν R^{t−1}.
        let r = residual_matrix(&chain, &m).unwrap();
        let mut q = m.nu().to_vec();
        for _ in 1..t {
            q = (0..q.len()).map(|y| q.iter().zip(&r).map(|(w, row)| w * row[y]).sum()).collect();
        }
        let exact = qt_exact(&k, m.nu(), t).unwrap();
        prop_assert!(tv_distance(exact.weights(), &q).unwrap() < 1e-12);
    }

    #[test]
    fn truncation_budget_bounds_tv((chain, m) in minorized(), big_m in 1usize..40) {
        let t = truncation_oracle(&chain, &m, big_m).unwrap();
        prop_assert!(t.p_tilde.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        prop_assert!(t.tv_pi_pi_tilde <= t.tv_budget + 1e-12);
    }

    #[test]
    fn beta_star_limits(eps in 0.01f64..0.99, lambda in 0.01f64..0.99, extra in 0.0f64..20.0) {
        // A = sup_C PV is at least 1 because V is.
        let a = 1.0 + extra;
        let j = compute_j(a, eps, lambda).unwrap();
        let bs = beta_star(j, lambda, eps).unwrap();
        prop_assert!(bs > 1.0);
        prop_assert!(bs <= 1.0 / lambda * (1.0 + 1e-12));
        if j >= 1.0 {
            prop_assert!(bs <= 1.0 / (1.0 - eps) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn halving_gamma_adds_bounded_truncation(
        eps in 0.05f64..0.95,
        lambda in 0.05f64..0.95,
        extra in 0.0f64..5.0,
        nu_v in 1.0f64..10.0,
        gamma in 0.001f64..0.5,
    ) {
        let drift = DriftSpec { lambda, b: 1.0, d: 1.0, a: 1.0 + extra, nu_v: NuV::Exact(nu_v) };
        let (Ok(p1), Ok(p2)) = (plan_bounds(&drift, eps, gamma), plan_bounds(&drift, eps, gamma / 2.0)) else {
            return Ok(());
        };
        prop_assert!(p2.m >= p1.m);
        let step = (std::f64::consts::LN_2 / p1.beta.ln()).ceil() as u64 + 1;
        prop_assert!(p2.m <= p1.m + step, "{} -> {} (beta {})", p1.m, p2.m, p1.beta);
    }

    #[test]
    fn compute_m_is_smallest_integer_above(gamma in 0.001f64..1.0, beta in 1.01f64..3.0, g in 1.0f64..100.0) {
        let m = compute_m(gamma, beta, g).unwrap();
        let q = (2.0 * g / (gamma * (beta - 1.0))).ln() / beta.ln();
        prop_assert!(m >= 1);
        prop_assert!((m as f64) > q);
        prop_assert!(m == 1 || ((m - 1) as f64) <= q);
    }

    #[test]
    fn budget_is_symmetric(p in proptest::collection::vec(0.0f64..1.0, 1..10), q in proptest::collection::vec(0.0f64..1.0, 1..10)) {
        prop_assert_eq!(tv_budget(&p, &q), tv_budget(&q, &p));
        prop_assert!(tv_budget(&p, &p) == 0.0);
    }

    #[test]
    fn inversion_never_picks_zero_mass(w in proptest::collection::vec(0u32..4, 1..8), u in 0.0f64..1.0) {
        prop_assume!(w.iter().any(|&x| x > 0));
        let total: u32 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|&x| x as f64 / total as f64).collect();
        let i = sample_cumulative(&cumulative(&p), u);
        prop_assert!(p[i] > 0.0);
    }

    #[test]
    fn truncated_weights_are_proportional_to_tails(tails in proptest::collection::vec(0.01f64..1.0, 1..20)) {
        let mut sorted = tails.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let w = TruncatedWeights::from_tails(&sorted, sorted.len(), 0.1).unwrap();
        let p = w.p_tilde.unwrap();
        let s: f64 = sorted.iter().sum();
        for (pt, t) in p.iter().zip(&sorted) {
            prop_assert!((pt - t / s).abs() < 1e-12);
        }
    }
}

/// Random threshold maps on up to 4 states with breakpoints on a 1/8 grid.
fn map_strategy() -> impl Strategy<Value = ThresholdMap> {
    (2usize..5).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec((1u32..8, 0..n), 1..4), n).prop_map(|tables| {
            let tables = tables
                .into_iter()
                .map(|mut t| {
                    t.sort_by_key(|&(b, _)| b);
                    t.dedup_by_key(|&mut (b, _)| b);
                    let mut out: Vec<(f64, usize)> = t.iter().map(|&(b, y)| (b as f64 / 8.0, y)).collect();
                    let last = out.last().unwrap().1;
                    out.push((1.0, last));
                    out
                })
                .collect();
            ThresholdMap::new(tables).unwrap()
        })
    })
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter()
        .map(|r| (0..b[0].len()).map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum()).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_decomposition_matches_k_step_kernel(map in map_strategy(), k in 1usize..4) {
        let s = map.transition_rows();
        let mut sk = s.clone();
        for _ in 1..k {
            sk = mat_mul(&sk, &s);
        }
        let model = RandomMapModel::new(map, k).unwrap();
        let law = exact_block_law(&model).unwrap();
        for (x, row) in sk.iter().enumerate() {
            for (y, &p) in row.iter().enumerate() {
                let back = law.epsilon * law.nu[y] + (1.0 - law.epsilon) * law.residual[x][y];
                prop_assert!((back - p).abs() < 1e-9, "x {x} y {y}: {back} vs {p}");
            }
        }
    }

    #[test]
    fn relabeling_permutes_stationary_law((rows, _c) in chain_strategy(), seed in 0u64..1000) {
        let n = rows.len();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left((seed as usize) % n);
        let chain = FiniteChain::new(rows).unwrap();
        let pchain = chain.permuted(&perm).unwrap();
        let pi = stationary_exact(chain.rows()).unwrap();
        let ppi = stationary_exact(pchain.rows()).unwrap();
        for x in 0..n {
            prop_assert!((pi.weights()[x] - ppi.weights()[perm[x]]).abs() < 1e-10);
        }
    }
}

#[test]
fn continuous_sample_text_round_trips() {
    use splitchain::commands::Samples;
    let xs = vec![0.1, -1.0 / 3.0, 1e-300, 123456.789, f64::MIN_POSITIVE, -2.5e17];
    let text = Samples::Continuous(xs.clone()).to_text();
    let back: Vec<f64> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(xs, back);
}
