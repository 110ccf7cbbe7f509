//! Property tests for the exact-arithmetic identities.

use std::collections::BTreeMap;

use proptest::prelude::*;

use branchlink_core::graph::{truncate, GraphProvider, LevelSeed};
use branchlink_core::group::GroupElement;
use branchlink_core::harmonic::{check_harmonic, pullback};
use branchlink_core::link::{kappa_dim, standard_link, validate_link, weights};
use branchlink_core::ratio::Ratio;
use branchlink_core::sample::random_layered_graph;
use branchlink_core::uq::{build_uq, QParam, Signature};

fn ratio_strategy() -> impl Strategy<Value = Ratio> {
    (-200i64..200, 1i64..60).prop_map(|(p, q)| Ratio::new(p, q))
}

fn positive_ratio_strategy() -> impl Strategy<Value = Ratio> {
    (1i64..500, 1i64..500).prop_map(|(p, q)| Ratio::new(p, q))
}

proptest! {
    #[test]
    fn ratio_text_round_trip(r in ratio_strategy()) {
        let parsed: Ratio = r.to_string().parse().unwrap();
        prop_assert_eq!(parsed, r);
    }

    #[test]
    fn ratio_ring_laws(a in ratio_strategy(), b in ratio_strategy(), c in ratio_strategy()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &Ratio::zero(), a.clone());
        prop_assert_eq!(&a * &Ratio::one(), a);
    }

    #[test]
    fn group_element_value_round_trip(r in positive_ratio_strategy()) {
        let g = GroupElement::from_ratio(&r).unwrap();
        prop_assert_eq!(g.value(), r);
    }

    #[test]
    fn group_element_laws(a in positive_ratio_strategy(), b in positive_ratio_strategy()) {
        let ga = GroupElement::from_ratio(&a).unwrap();
        let gb = GroupElement::from_ratio(&b).unwrap();
        prop_assert_eq!(ga.mul(&gb).value(), &a * &b);
        prop_assert_eq!(ga.mul(&ga.inv()), GroupElement::identity());
        prop_assert_eq!(ga.mul(&gb), gb.mul(&ga));
    }

    #[test]
    fn standard_link_collapse_on_random_graphs(
        seed in 0u64..1000,
        sizes in proptest::collection::vec(1usize..5, 1..5),
    ) {
        let mut level_sizes = vec![1usize];
        level_sizes.extend(sizes);
        let g = random_layered_graph(seed, &level_sizes);
        let LevelSeed::Finite(tops) = g.level_seed(level_sizes.len() - 1) else {
            unreachable!()
        };
        let t = truncate(&g, &tops).unwrap();
        let k = standard_link(&t);
        prop_assert!(validate_link(&t, &k).ok());
        let ws = weights(&t, &k, kappa_dim(&t, &k).unwrap()).unwrap();
        for v in t.vertices() {
            prop_assert_eq!(ws.kdim(v).unwrap(), &Ratio::from_biguint(t.dim(v).unwrap()));
        }
        prop_assert!(ws.rho_entries().all(|(_, r)| r.is_one()));
    }

    #[test]
    fn truncate_is_idempotent_on_random_graphs(seed in 0u64..1000) {
        let g = random_layered_graph(seed, &[1, 3, 4, 2]);
        let LevelSeed::Finite(tops) = g.level_seed(3) else { unreachable!() };
        let t = truncate(&g, &tops).unwrap();
        let t2 = truncate(&t, &tops).unwrap();
        let edges: Vec<_> = t.edges().map(|(e, m)| (e.clone(), m.clone())).collect();
        let edges2: Vec<_> = t2.edges().map(|(e, m)| (e.clone(), m.clone())).collect();
        prop_assert_eq!(edges, edges2);
    }

    #[test]
    fn random_pullbacks_are_harmonic(
        seed in 0u64..500,
        masses in proptest::collection::vec(0u32..6, 4),
    ) {
        prop_assume!(masses.iter().sum::<u32>() > 0);
        let g = random_layered_graph(seed, &[1, 2, 3, 4]);
        let LevelSeed::Finite(tops) = g.level_seed(3) else { unreachable!() };
        let t = truncate(&g, &tops).unwrap();
        let k = standard_link(&t);
        let total: u32 = masses.iter().sum();
        let top: BTreeMap<_, _> = t
            .level(3)
            .iter()
            .zip(&masses)
            .filter(|(_, m)| **m > 0)
            .map(|(v, m)| {
                (
                    v.clone(),
                    Ratio::from_int(*m as i64) / Ratio::from_int(total as i64),
                )
            })
            .collect();
        let nu = pullback(&t, &k, &top).unwrap();
        prop_assert!(check_harmonic(&t, &k, &nu).ok());
        for n in 0..=3 {
            let sum: Ratio = nu.level_support(n).values().cloned().sum();
            prop_assert!(sum.is_one());
        }
    }

    #[test]
    fn uq_kdim_is_q_inversion_symmetric(p in 2i64..6, parts in proptest::collection::vec(0u64..4, 1..3)) {
        let mut parts = parts;
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let lambda = Signature::new(parts).unwrap();
        let q = QParam::new(Ratio::new(1, p)).unwrap();
        let q_inv = QParam::new(Ratio::from_int(p)).unwrap();
        let (_, _, ws) = build_uq(&q, std::slice::from_ref(&lambda)).unwrap();
        let (_, _, ws_inv) = build_uq(&q_inv, std::slice::from_ref(&lambda)).unwrap();
        let v = lambda.to_vertex();
        prop_assert_eq!(ws.kdim(&v).unwrap(), ws_inv.kdim(&v).unwrap());
    }
}
