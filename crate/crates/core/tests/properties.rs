mod common;

use lisf_core::align::{match_bipartite, ruzicka};
use lisf_core::chainlab::{exact_hitting_cdf, random_ergodic_chain, reversible_chain};
use lisf_core::corpus::PatternId;
use lisf_core::linalg::Matrix;
use lisf_core::markov::{balance_residual, equilibrium, row_normalize};
use lisf_core::qa::{damp, QueryIndex};
use lisf_core::semantics::{entropy_rate, fingerprint, recurrence_matrix};
use proptest::prelude::*;

fn stochastic(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(0.01f64..1.0, n * n).prop_map(move |v| {
        let w = Matrix::from_fn(n, n, |i, j| v[i * n + j]);
        row_normalize(&w).unwrap()
    })
}

fn nonneg_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..10.0], len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ruzicka_is_symmetric_and_reflexive(a in nonneg_vec(6), b in nonneg_vec(6)) {
        if let Ok(s) = ruzicka(&a, &b) {
            prop_assert_eq!(Some(s), ruzicka(&b, &a).ok());
            prop_assert!((0.0..=1.0).contains(&s));
        }
        if a.iter().any(|&x| x > 0.0) {
            prop_assert_eq!(ruzicka(&a, &a).unwrap(), 1.0);
        }
    }

    #[test]
    fn ruzicka_grows_with_shared_block(a in nonneg_vec(4), b in nonneg_vec(4), c in nonneg_vec(3)) {
        if let Ok(s) = ruzicka(&a, &b) {
            let ac: Vec<f64> = a.iter().chain(&c).copied().collect();
            let bc: Vec<f64> = b.iter().chain(&c).copied().collect();
            prop_assert!(ruzicka(&ac, &bc).unwrap() >= s - 1e-15);
        }
    }

    #[test]
    fn matching_beats_greedy_and_ignores_zero_padding(v in prop::collection::vec(0.0f64..1.0, 25)) {
        let w = Matrix::from_fn(5, 5, |i, j| v[i * 5 + j]);
        let best = match_bipartite(&w);
        // Greedy: repeatedly take the largest remaining entry.
        let mut used_r = [false; 5];
        let mut used_c = [false; 5];
        let mut greedy = 0.0;
        for _ in 0..5 {
            let mut top = (0, 0, -1.0);
            for i in 0..5 {
                for j in 0..5 {
                    if !used_r[i] && !used_c[j] && w[(i, j)] > top.2 {
                        top = (i, j, w[(i, j)]);
                    }
                }
            }
            used_r[top.0] = true;
            used_c[top.1] = true;
            greedy += top.2;
        }
        prop_assert!(best.total >= greedy - 1e-12);
        let padded = Matrix::from_fn(6, 6, |i, j| if i < 5 && j < 5 { w[(i, j)] } else { 0.0 });
        let again = match_bipartite(&padded);
        prop_assert!((again.total - best.total).abs() < 1e-12);
        let mut rows: Vec<usize> = best.pairs.iter().map(|p| p.1).collect();
        rows.sort_unstable();
        rows.dedup();
        prop_assert_eq!(rows.len(), best.pairs.len());
    }

    #[test]
    fn powers_stay_stochastic(p in stochastic(6), k in 1u32..40) {
        for s in p.pow(k).row_sums() {
            prop_assert!((s - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn equilibrium_is_a_fixed_point(p in stochastic(7)) {
        let pi = equilibrium(&p).unwrap();
        let next = p.left_mul(&pi);
        let res: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        prop_assert!(res < 1e-12);
        prop_assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(pi.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn equilibrium_follows_relabeling(p in stochastic(5), shift in 1usize..5) {
        let perm: Vec<usize> = (0..5).map(|k| (k + shift) % 5).collect();
        let q = Matrix::from_fn(5, 5, |i, j| p[(perm[i], perm[j])]);
        let a = equilibrium(&p).unwrap();
        let b = equilibrium(&q).unwrap();
        for i in 0..5 {
            prop_assert!((b[i] - a[perm[i]]).abs() < 1e-10);
        }
    }

    #[test]
    fn reversible_chains_balance(n in 2usize..12, seed in any::<u64>()) {
        let c = reversible_chain(n, seed).unwrap();
        for k in 1..=5 {
            prop_assert!(balance_residual(&c.p, &c.pi, k) <= 1e-12);
        }
    }

    #[test]
    fn hitting_cdf_is_monotone(n in 2usize..8, seed in any::<u64>()) {
        let c = random_ergodic_chain(n, seed).unwrap();
        let h = exact_hitting_cdf(&c, &[n - 1], 60).unwrap();
        prop_assert!(h.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        prop_assert!(h.iter().all(|&x| x <= 1.0 + 1e-15));
    }

    #[test]
    fn fingerprint_ignores_order_of_non_center_members(p in stochastic(6), shift in 1usize..5) {
        let pi = equilibrium(&p).unwrap();
        let eta = entropy_rate(&p, &pi);
        prop_assert!(eta >= 0.0 && eta <= (6.0f64).ln() + 1e-12);
        let a = fingerprint(&recurrence_matrix(&p), eta, 8).unwrap();
        let perm: Vec<usize> = std::iter::once(0).chain((0..5).map(|k| 1 + (k + shift) % 5)).collect();
        let q = Matrix::from_fn(6, 6, |i, j| p[(perm[i], perm[j])]);
        let b = fingerprint(&recurrence_matrix(&q), eta, 8).unwrap();
        for (x, y) in a.magnitudes.iter().zip(&b.magnitudes) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        prop_assert!((1..=6).contains(&a.cutoff));
        prop_assert!(a.magnitudes.iter().all(|&m| m <= 1.0 - 1e-9));
    }

    #[test]
    fn damping_floor_and_score_additivity(n in 1usize..7, v in prop::collection::vec(0.0f64..1.0, 49),
                                          a in prop::collection::vec(0u32..7, 0..6),
                                          b in prop::collection::vec(0u32..7, 0..6)) {
        let w = Matrix::from_fn(n, n, |i, j| v[i * 7 + j]);
        let ids: Vec<PatternId> = (0..n as u32).map(PatternId).collect();
        let idx = QueryIndex::new(vec![ids[0]], ids.clone(), &w, 0.85).unwrap();
        for i in 0..n {
            let row = idx.damped.row(i);
            prop_assert!(row.iter().all(|&x| x >= 0.15 / n as f64 - 1e-15));
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        prop_assert!(idx.pagerank.iter().all(|&x| x > 0.0));
        prop_assert!((idx.pagerank.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let fixed = idx.damped.left_mul(&idx.pagerank);
        prop_assert!(fixed.iter().zip(&idx.pagerank).all(|(x, y)| (x - y).abs() < 1e-10));
        let a: Vec<PatternId> = a.into_iter().map(PatternId).collect();
        let b: Vec<PatternId> = b.into_iter().map(PatternId).collect();
        let ab: Vec<PatternId> = a.iter().chain(&b).copied().collect();
        let (sa, _) = idx.score(&a);
        let (sb, _) = idx.score(&b);
        let (sab, _) = idx.score(&ab);
        prop_assert!((sab - sa - sb).abs() < 1e-12);
        prop_assert!(sa >= 0.0);
    }

    #[test]
    fn damp_matches_formula(p in stochastic(4)) {
        let d = damp(&p, 0.85);
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((d[(i, j)] - (0.85 * p[(i, j)] + 0.15 / 4.0)).abs() < 1e-15);
            }
        }
    }
}
