//! Structural invariants checked exhaustively on small spaces and by
//! property tests on random inputs.

use std::f64::consts::E;

use noisysort::closedform::{
    energy_for_error, from_staircase, outlier_pi, to_staircase, BinarySpec, Staircase,
};
use noisysort::exact::{
    arborescence_bruteforce, arborescence_weight, build_matrix, detailed_balance_residual,
    enumerate_states, gibbs_distribution, kolmogorov_cycle_ratio, stationary_solve,
    stationary_tree, tree_distribution, Stochastic,
};
use noisysort::kernels::transition_probability;
use noisysort::mixing::{distances_from, mixing_time_of, tv_distance};
use noisysort::seq::{displacement_inversion, sorted_of, swap_probability};
use noisysort::{weighted_inversion, ChainKind, Energy, Sequence};
use proptest::prelude::*;

fn seq(v: &[f64]) -> Sequence {
    Sequence::new(v.to_vec()).unwrap()
}

/// Direct pairwise definition of the disorder metric.
fn naive_w(s: &[f64]) -> f64 {
    let mut w = 0.0;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s[i] > s[j] {
                w += s[i] - s[j];
            }
        }
    }
    w
}

#[test]
fn displacement_identity_exhaustive() {
    let multisets: [&[f64]; 5] = [
        &[1., 2., 3., 4., 5., 6., 7.],
        &[1., 1., 2., 3., 3., 4., 5.],
        &[0., 0., 0., 1., 1., 2., 2.],
        &[-2.5, 0.25, 0.25, 3.0, 7.75, 10.0],
        &[5., 5., 5., 5.],
    ];
    for ms in multisets {
        let space = enumerate_states(&seq(ms), 5040).unwrap();
        for s in space.states() {
            let w = weighted_inversion(s);
            assert_eq!(w, naive_w(s.as_slice()), "{s:?}");
            let d = displacement_inversion(s);
            assert!(
                (w - d).abs() <= 1e-9 * w.abs().max(1.0),
                "{s:?}: {w} vs {d}"
            );
            assert_eq!(w == 0.0, s.is_sorted());
        }
        // sorted first, reversed last, reversed maximal
        let sorted = space.state(space.sorted_index());
        assert_eq!(sorted, &sorted_of(&seq(ms)));
        let top = weighted_inversion(space.state(space.reversed_index()));
        assert!(space.states().iter().all(|s| weighted_inversion(s) <= top));
    }
}

#[test]
fn state_counts_are_multinomial() {
    for (ms, count) in [
        (vec![1., 2., 3., 4., 5.], 120),
        (vec![1., 1., 2., 2., 3.], 30),
        (vec![1., 1., 1., 2., 2., 2.], 20),
        (vec![4.], 1),
    ] {
        let sp = enumerate_states(&seq(&ms), 5040).unwrap();
        assert_eq!(sp.len(), count);
        let mut states = sp.states().to_vec();
        states.sort();
        states.dedup();
        assert_eq!(states.len(), count);
    }
}

#[test]
fn kernel_entries_match_transition_probability() {
    let e = Energy::new(1.7).unwrap();
    for ms in [seq(&[1., 2., 3., 4.]), seq(&[1., 1., 2., 3.])] {
        for kind in ChainKind::ALL {
            let m = build_matrix(kind, &ms, &e, 5040).unwrap();
            let sp = m.space();
            for (i, s) in sp.states().iter().enumerate() {
                for (j, t) in sp.states().iter().enumerate() {
                    let p = transition_probability(kind, s, t, &e).unwrap();
                    assert!((p - m.get(i, j)).abs() <= 1e-15, "{kind} {s:?} → {t:?}");
                }
            }
        }
    }
}

#[test]
fn tree_matches_solve_on_120_states() {
    let ms = seq(&[1., 2., 3., 4., 5.]);
    for l in [(0.2f64).exp(), E, 0.8] {
        let e = Energy::new(l).unwrap();
        for kind in ChainKind::ALL {
            let m = build_matrix(kind, &ms, &e, 5040).unwrap();
            let tv = tv_distance(
                &stationary_tree(&m).unwrap(),
                &stationary_solve(&m).unwrap(),
            )
            .unwrap();
            assert!(tv <= 1e-8, "{kind} λ={l}: {tv}");
        }
    }
}

#[test]
fn reversible_chains_have_unit_cycle_ratios() {
    let e = Energy::new(E).unwrap();
    let ms = seq(&[1., 2., 3.]);
    // 123 → 213 → 231 → 321 → 123, every edge is a single transposition
    let cycle = [0, 2, 3, 5];
    let star = build_matrix(ChainKind::AnyStar, &ms, &e, 100).unwrap();
    assert!((kolmogorov_cycle_ratio(&star, &cycle).unwrap() - 1.0).abs() < 1e-12);
    let any = build_matrix(ChainKind::Any, &ms, &e, 100).unwrap();
    let r = kolmogorov_cycle_ratio(&any, &cycle).unwrap();
    assert!((r.ln() + 4.0).abs() < 1e-12, "{r}");
    // the reversed traversal gives the reciprocal
    let back = [0, 5, 3, 2];
    assert!((kolmogorov_cycle_ratio(&any, &back).unwrap() * r - 1.0).abs() < 1e-12);
}

#[test]
fn staircase_round_trip_exhaustive() {
    for n in 2..=12 {
        for n_a in 1..n {
            let spec = BinarySpec::new(0.0, 1.5, n_a, n - n_a).unwrap();
            let space = enumerate_states(&spec.sorted(), 5040).unwrap();
            let mut seen = std::collections::HashSet::new();
            for s in space.states() {
                let v = to_staircase(s, &spec).unwrap();
                assert!(v.as_slice().windows(2).all(|w| w[0] >= w[1]));
                assert!(v.as_slice().iter().all(|&x| x <= n_a));
                // each b contributes gap × (number of a's after it)
                let sum: usize = v.as_slice().iter().sum();
                assert_eq!(weighted_inversion(s), 1.5 * sum as f64);
                assert_eq!(&from_staircase(&v, &spec).unwrap(), s);
                let text = v.to_string();
                assert_eq!(text.parse::<Staircase>().unwrap(), v);
                seen.insert(v.as_slice().to_vec());
            }
            assert_eq!(seen.len(), space.len());
        }
    }
}

#[test]
fn any_star_outlier_matches_adjacent_law() {
    for n in 2..=7 {
        let mut v = vec![1.0; n - 1];
        v.push(2.0);
        for p in [0.1, 0.3, 0.5] {
            let e = energy_for_error(p, 1.0).unwrap();
            let m = build_matrix(ChainKind::AnyStar, &seq(&v), &e, 100).unwrap();
            let pi = stationary_solve(&m).unwrap();
            for (k, s) in m.space().states().iter().enumerate() {
                let i = s.as_slice().iter().position(|&x| x == 2.0).unwrap() + 1;
                let closed = outlier_pi(ChainKind::AnyStar, n, p, i).unwrap();
                assert!((closed - pi.get(k)).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn adjacent_diameter_is_max_inversions() {
    // under adjacent swaps the distance from sorted equals the inversion count
    let ms = seq(&[1., 2., 3., 4., 5.]);
    let e = Energy::new(2.0).unwrap();
    let m = build_matrix(ChainKind::Adj, &ms, &e, 5040).unwrap();
    let d = distances_from(ChainKind::Adj, m.space(), m.space().sorted_index());
    for (k, s) in m.space().states().iter().enumerate() {
        let v = s.as_slice();
        let inv = (0..5)
            .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
            .filter(|&(i, j)| v[i] > v[j])
            .count();
        assert_eq!(d[k], Some(inv));
    }
}

#[test]
fn mixing_time_is_monotone_in_eps() {
    let e = energy_for_error(0.3, 1.0).unwrap();
    let ms = seq(&[1., 1., 1., 2., 2., 2.]);
    for kind in ChainKind::ALL {
        let m = build_matrix(kind, &ms, &e, 5040).unwrap();
        let ts: Vec<usize> = [0.5, 0.25, 0.1, 0.01, 1e-4]
            .iter()
            .map(|&eps| mixing_time_of(&m, eps).unwrap())
            .collect();
        assert!(ts.windows(2).all(|w| w[0] <= w[1]), "{kind}: {ts:?}");
    }
}

fn multiset() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u8..=6, 1..=5).prop_map(|v| v.into_iter().map(f64::from).collect())
}

/// Random row-stochastic matrix with strictly positive off-diagonal mass.
fn stochastic(max: usize) -> impl Strategy<Value = Stochastic> {
    (2..=max).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(0.0f64..1.0, n), n).prop_map(move |raw| {
            let rows = raw
                .into_iter()
                .enumerate()
                .map(|(i, mut r)| {
                    r[(i + 1) % n] += 0.05;
                    let s: f64 = r.iter().sum();
                    r.iter().map(|x| x / s).collect()
                })
                .collect();
            Stochastic::from_rows(rows).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn comparator_is_complementary(a in -50.0f64..50.0, b in -50.0f64..50.0, l in 0.05f64..20.0) {
        let e = Energy::new(l).unwrap();
        let s = swap_probability(a, b, &e).unwrap() + swap_probability(b, a, &e).unwrap();
        prop_assert!((s - 1.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn gibbs_law_for_reversible_chains(v in multiset(), l in 0.3f64..6.0) {
        let e = Energy::new(l).unwrap();
        let ms = Sequence::new(v).unwrap();
        for kind in [ChainKind::Adj, ChainKind::AnyStar] {
            let m = build_matrix(kind, &ms, &e, 5040).unwrap();
            let pi = stationary_solve(&m).unwrap();
            let g = gibbs_distribution(m.space(), &e);
            prop_assert!(tv_distance(&pi, &g).unwrap() <= 1e-10);
            prop_assert!(detailed_balance_residual(&m, &pi) <= 1e-10);
        }
    }

    #[test]
    fn sorted_state_is_most_likely(v in multiset(), l in 1.05f64..6.0) {
        let e = Energy::new(l).unwrap();
        let ms = Sequence::new(v).unwrap();
        for kind in ChainKind::ALL {
            let m = build_matrix(kind, &ms, &e, 5040).unwrap();
            let pi = stationary_solve(&m).unwrap();
            prop_assert_eq!(pi.argmax(), m.space().sorted_index());
        }
    }

    #[test]
    fn minors_match_bruteforce_on_random_chains(p in stochastic(6)) {
        for root in 0..p.dim() {
            let brute = arborescence_bruteforce(&p, root).unwrap();
            let minor = arborescence_weight(&p, root);
            prop_assert!((brute - minor).abs() <= 1e-12 * brute, "{} vs {}", brute, minor);
        }
        let pi = tree_distribution(&p).unwrap();
        let solved = stationary_solve(&p).unwrap();
        prop_assert!(tv_distance(&pi, &solved).unwrap() <= 1e-10);
    }

    #[test]
    fn rows_are_stochastic(v in multiset(), l in 0.2f64..8.0) {
        let e = Energy::new(l).unwrap();
        let ms = Sequence::new(v).unwrap();
        for kind in ChainKind::ALL {
            let m = build_matrix(kind, &ms, &e, 5040).unwrap();
            for i in 0..m.dim() {
                let row = m.matrix().row(i);
                prop_assert!(row.iter().all(|&x| x >= 0.0));
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
        }
    }
}
