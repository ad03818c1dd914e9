//! Seeded random graph generation for benchmarks and test sweeps.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Uniform-ish connected G(n, m): a random attachment tree ensures
/// connectivity, then distinct extra pairs are rejection-sampled until `m`
/// edges exist. Fully reproducible from the seed.
pub fn connected_gnm(vertex_count: usize, edge_count: usize, seed: u64) -> Result<Graph> {
    if vertex_count == 0 {
        return Err(Error::ParamDomain("need at least one vertex".into()));
    }
    if edge_count + 1 < vertex_count {
        return Err(Error::ParamDomain(format!(
            "{edge_count} edges cannot connect {vertex_count} vertices"
        )));
    }
    let max = vertex_count * (vertex_count - 1) / 2;
    if edge_count > max {
        return Err(Error::ParamDomain(format!(
            "{edge_count} edges exceed C({vertex_count}, 2) = {max}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: HashSet<(usize, usize)> = HashSet::with_capacity(edge_count);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(edge_count);
    for v in 1..vertex_count {
        let u = rng.gen_range(0..v);
        pairs.insert((u, v));
        edges.push((u, v));
    }
    while edges.len() < edge_count {
        let a = rng.gen_range(0..vertex_count);
        let b = rng.gen_range(0..vertex_count);
        if a == b {
            continue;
        }
        let p = (a.min(b), a.max(b));
        if pairs.insert(p) {
            edges.push(p);
        }
    }
    Graph::unweighted(vertex_count, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::connected_components;

    #[test]
    fn generates_connected_graphs() {
        for seed in 0..5 {
            let g = connected_gnm(20, 35, seed).unwrap();
            assert_eq!(g.vertex_count, 20);
            assert_eq!(g.edge_count(), 35);
            assert_eq!(connected_components(&g).component_count, 1);
            g.validate().unwrap();
        }
    }

    #[test]
    fn is_deterministic_per_seed() {
        let a = connected_gnm(15, 30, 7).unwrap();
        let b = connected_gnm(15, 30, 7).unwrap();
        assert_eq!(a.edges, b.edges);
        let c = connected_gnm(15, 30, 8).unwrap();
        assert_ne!(a.edges, c.edges);
    }

    #[test]
    fn boundary_sizes() {
        // Tree and complete graph are both representable.
        let tree = connected_gnm(10, 9, 0).unwrap();
        assert_eq!(tree.edge_count(), 9);
        let complete = connected_gnm(5, 10, 0).unwrap();
        assert_eq!(complete.edge_count(), 10);
        let lone = connected_gnm(1, 0, 0).unwrap();
        assert_eq!(lone.vertex_count, 1);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(connected_gnm(0, 0, 0).is_err());
        assert!(connected_gnm(10, 8, 0).is_err());
        assert!(connected_gnm(5, 11, 0).is_err());
    }
}
