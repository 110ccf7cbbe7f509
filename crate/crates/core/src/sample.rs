//! Deterministic pseudo-random layered graphs.
//!
//! Used by the self-test suite and tests to exercise the pipeline on
//! graphs with no special structure. A fixed seed gives a fixed graph,
//! so reports built from these stay byte-identical across runs. All
//! multiplicities are 1 and both branching-graph surjectivity
//! conditions hold by construction.

use num_bigint::BigUint;
use num_traits::One;
use rand_chacha::ChaCha8Rng;
use rand::{Rng, SeedableRng};

use crate::graph::{ExplicitGraph, VertexKey};

/// Random layered graph with the given level sizes (level 0 is forced
/// to a single root). Every vertex has at least one parent and, below
/// the top, at least one child.
pub fn random_layered_graph(seed: u64, level_sizes: &[usize]) -> ExplicitGraph {
    assert!(!level_sizes.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut sizes = level_sizes.to_vec();
    sizes[0] = 1;
    let key = |n: usize, i: usize| VertexKey::tuple(vec![n as i64, i as i64]);

    let levels: Vec<Vec<VertexKey>> = sizes
        .iter()
        .enumerate()
        .map(|(n, &size)| (0..size).map(|i| key(n, i)).collect())
        .collect();

    let mut edges: Vec<(VertexKey, VertexKey, BigUint)> = Vec::new();
    for n in 1..sizes.len() {
        let mut has_child = vec![false; sizes[n - 1]];
        for i in 0..sizes[n] {
            let mut any = false;
            for (p, covered) in has_child.iter_mut().enumerate() {
                if rng.gen_bool(0.5) {
                    edges.push((key(n, i), key(n - 1, p), BigUint::one()));
                    *covered = true;
                    any = true;
                }
            }
            if !any {
                let p = rng.gen_range(0..sizes[n - 1]);
                edges.push((key(n, i), key(n - 1, p), BigUint::one()));
                has_child[p] = true;
            }
        }
        for (p, covered) in has_child.into_iter().enumerate() {
            if !covered {
                let i = rng.gen_range(0..sizes[n]);
                edges.push((key(n, i), key(n - 1, p), BigUint::one()));
            }
        }
    }

    ExplicitGraph::new(levels, edges).expect("generated graph is well-formed")
}
