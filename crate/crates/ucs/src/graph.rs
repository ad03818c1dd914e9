//! Graph representation, edge-list ingestion, connectivity, and the
//! incidence/Laplacian machinery everything downstream is built on.
//!
//! Conventions:
//! - vertices are reindexed to `0..vertex_count` on parse; the original ids
//!   are kept in `original_ids` so user-facing output can be mapped back;
//! - every stored edge is oriented `u < v`; the Laplacian does not depend on
//!   the orientation, fixing it makes reruns byte-identical;
//! - weights are strictly positive and finite.

use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected weighted edge with canonical endpoint order `u < v`.
///
/// Serializes as the 3-tuple `[u, v, w]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Serialize for Edge {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.u, self.v, self.w).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (u, v, w) = <(usize, usize, f64)>::deserialize(d)?;
        Ok(Edge { u, v, w })
    }
}

/// Undirected weighted graph over vertices `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub vertex_count: usize,
    pub edges: Vec<Edge>,
    /// Maps internal vertex id to the id it carried in the source data.
    pub original_ids: Vec<u64>,
}

impl Graph {
    /// Builds a graph from `(u, v, w)` triples, canonicalizing endpoint
    /// order. Original ids default to the identity map.
    pub fn new(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let edges = edges
            .iter()
            .map(|&(u, v, w)| Edge { u: u.min(v), v: u.max(v), w })
            .collect();
        let g = Graph {
            vertex_count,
            edges,
            original_ids: (0..vertex_count as u64).collect(),
        };
        g.validate()?;
        Ok(g)
    }

    /// Unit-weight convenience constructor.
    pub fn unweighted(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let triples: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Graph::new(vertex_count, &triples)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.original_ids.len() != self.vertex_count {
            return Err(Error::Validation(format!(
                "original_ids has length {}, expected {}",
                self.original_ids.len(),
                self.vertex_count
            )));
        }
        let mut seen = HashMap::new();
        for (idx, e) in self.edges.iter().enumerate() {
            if e.u == e.v {
                return Err(Error::Validation(format!("edge {idx} is a self-loop on {}", e.u)));
            }
            if e.u > e.v {
                return Err(Error::Validation(format!(
                    "edge {idx} is not canonically oriented: ({}, {})",
                    e.u, e.v
                )));
            }
            if e.v >= self.vertex_count {
                return Err(Error::Validation(format!(
                    "edge {idx} references vertex {} outside 0..{}",
                    e.v, self.vertex_count
                )));
            }
            if !(e.w > 0.0) || !e.w.is_finite() {
                return Err(Error::Validation(format!("edge {idx} has non-positive weight {}", e.w)));
            }
            if seen.insert((e.u, e.v), idx).is_some() {
                return Err(Error::Validation(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: Graph = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        g.validate()?;
        Ok(g)
    }
}

/// Connected-component labeling; component ids are assigned in order of the
/// smallest vertex they contain.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentLabeling {
    pub labels: Vec<usize>,
    pub component_count: usize,
}

pub fn connected_components(g: &Graph) -> ComponentLabeling {
    let mut adj = vec![Vec::new(); g.vertex_count];
    for e in &g.edges {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut labels = vec![usize::MAX; g.vertex_count];
    let mut next = 0;
    for start in 0..g.vertex_count {
        if labels[start] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        labels[start] = next;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if labels[w] == usize::MAX {
                    labels[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    ComponentLabeling { labels, component_count: next }
}

/// Signed incidence matrix (one row per edge: +1 at `u`, −1 at `v`), the
/// edge weights, and the Laplacian `L = Bᵀ·diag(W)·B`.
#[derive(Debug, Clone)]
pub struct IncidenceSystem {
    pub b: DMatrix<f64>,
    pub weights: Vec<f64>,
    pub laplacian: DMatrix<f64>,
}

pub fn incidence_system(g: &Graph) -> IncidenceSystem {
    let m = g.edge_count();
    let nv = g.vertex_count;
    let mut b = DMatrix::zeros(m, nv);
    let mut l = DMatrix::zeros(nv, nv);
    let mut weights = Vec::with_capacity(m);
    for (i, e) in g.edges.iter().enumerate() {
        b[(i, e.u)] = 1.0;
        b[(i, e.v)] = -1.0;
        weights.push(e.w);
        l[(e.u, e.u)] += e.w;
        l[(e.v, e.v)] += e.w;
        l[(e.u, e.v)] -= e.w;
        l[(e.v, e.u)] -= e.w;
    }
    IncidenceSystem { b, weights, laplacian: l }
}

/// Evaluates `xᵀLx` as the sum of weighted squared endpoint differences.
pub fn quadratic_form(g: &Graph, x: &[f64]) -> Result<f64> {
    if x.len() != g.vertex_count {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} vs vertex count {}",
            x.len(),
            g.vertex_count
        )));
    }
    Ok(g.edges.iter().map(|e| e.w * (x[e.u] - x[e.v]).powi(2)).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeListFormat {
    /// Tab- or space-separated `u v` pairs, `#`-prefixed comment lines.
    Snap,
    /// Whitespace-separated `u v w` triples.
    Weighted,
}

/// A parsed graph plus the ingestion counters for dropped input lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub duplicate_count: usize,
    pub self_loop_count: usize,
}

/// Parses an edge list. Vertices are reindexed by first appearance;
/// duplicate undirected pairs keep the first weight seen; self-loops are
/// dropped. Both events increment their counter instead of failing.
pub fn parse_edge_list(text: &str, format: EdgeListFormat) -> Result<ParsedGraph> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut original_ids: Vec<u64> = Vec::new();
    let mut index_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut duplicate_count = 0;
    let mut self_loop_count = 0;

    let mut intern = |id: u64, original_ids: &mut Vec<u64>| -> usize {
        *ids.entry(id).or_insert_with(|| {
            original_ids.push(id);
            original_ids.len() - 1
        })
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let expected = match format {
            EdgeListFormat::Snap => 2,
            EdgeListFormat::Weighted => 3,
        };
        if tokens.len() != expected {
            return Err(Error::Parse {
                line,
                message: format!("expected {expected} fields, found {}", tokens.len()),
            });
        }
        let parse_id = |tok: &str| -> Result<u64> {
            tok.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid vertex id {tok:?}"),
            })
        };
        let ou = parse_id(tokens[0])?;
        let ov = parse_id(tokens[1])?;
        let w = match format {
            EdgeListFormat::Snap => 1.0,
            EdgeListFormat::Weighted => {
                let w: f64 = tokens[2].parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("invalid weight {:?}", tokens[2]),
                })?;
                if !(w > 0.0) || !w.is_finite() {
                    return Err(Error::Validation(format!(
                        "line {line}: weight must be strictly positive, got {w}"
                    )));
                }
                w
            }
        };
        let u = intern(ou, &mut original_ids);
        let v = intern(ov, &mut original_ids);
        if u == v {
            self_loop_count += 1;
            continue;
        }
        let key = (u.min(v), u.max(v));
        if index_of.contains_key(&key) {
            duplicate_count += 1;
            continue;
        }
        index_of.insert(key, edges.len());
        edges.push(Edge { u: key.0, v: key.1, w });
    }

    let graph = Graph { vertex_count: original_ids.len(), edges, original_ids };
    graph.validate()?;
    Ok(ParsedGraph { graph, duplicate_count, self_loop_count })
}

/// Writes a graph back out in one of the edge-list formats, using original
/// vertex ids in edge order (so a reparse reproduces the graph exactly).
pub fn write_edge_list(g: &Graph, format: EdgeListFormat) -> String {
    let mut out = String::new();
    for e in &g.edges {
        let ou = g.original_ids[e.u];
        let ov = g.original_ids[e.v];
        match format {
            EdgeListFormat::Snap => out.push_str(&format!("{ou}\t{ov}\n")),
            EdgeListFormat::Weighted => out.push_str(&format!("{ou} {ov} {}\n", e.w)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::unweighted(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn parse_dedups_and_drops_self_loops() {
        let parsed = parse_edge_list("#c\n1\t2\n2\t1\n1\t1\n", EdgeListFormat::Snap).unwrap();
        assert_eq!(parsed.graph.vertex_count, 2);
        assert_eq!(parsed.graph.edges, vec![Edge { u: 0, v: 1, w: 1.0 }]);
        assert_eq!(parsed.duplicate_count, 1);
        assert_eq!(parsed.self_loop_count, 1);
        assert_eq!(parsed.graph.original_ids, vec![1, 2]);
    }

    #[test]
    fn parse_empty_stream() {
        let parsed = parse_edge_list("", EdgeListFormat::Snap).unwrap();
        assert_eq!(parsed.graph.vertex_count, 0);
        assert_eq!(parsed.graph.edge_count(), 0);
    }

    #[test]
    fn parse_weighted_first_weight_wins() {
        let parsed =
            parse_edge_list("5 7 2.5\n7 5 9.0\n", EdgeListFormat::Weighted).unwrap();
        assert_eq!(parsed.graph.edges, vec![Edge { u: 0, v: 1, w: 2.5 }]);
        assert_eq!(parsed.duplicate_count, 1);
    }

    #[test]
    fn parse_rejects_bad_lines() {
        let err = parse_edge_list("1 2 3 4\n", EdgeListFormat::Weighted).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_edge_list("a\tb\n", EdgeListFormat::Snap).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_edge_list("1 2 -3\n", EdgeListFormat::Weighted).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn components_by_smallest_vertex() {
        let g = triangle();
        assert_eq!(connected_components(&g).component_count, 1);

        let g = Graph::unweighted(4, &[(0, 1), (2, 3)]).unwrap();
        let lab = connected_components(&g);
        assert_eq!(lab.component_count, 2);
        assert_eq!(lab.labels, vec![0, 0, 1, 1]);

        let g = Graph::unweighted(5, &[]).unwrap();
        let lab = connected_components(&g);
        assert_eq!(lab.component_count, 5);
        assert_eq!(lab.labels, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn incidence_single_edge() {
        let g = Graph::unweighted(2, &[(0, 1)]).unwrap();
        let sys = incidence_system(&g);
        assert_eq!(sys.laplacian, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        assert_eq!(sys.b, DMatrix::from_row_slice(1, 2, &[1.0, -1.0]));
    }

    #[test]
    fn incidence_weighted_edge() {
        let g = Graph::new(2, &[(0, 1, 3.0)]).unwrap();
        let sys = incidence_system(&g);
        assert_eq!(sys.laplacian, DMatrix::from_row_slice(2, 2, &[3.0, -3.0, -3.0, 3.0]));
    }

    #[test]
    fn incidence_triangle() {
        let sys = incidence_system(&triangle());
        let expect = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        assert_eq!(sys.laplacian, expect);
        for i in 0..3 {
            assert_eq!(sys.b.row(i).sum(), 0.0);
        }
    }

    #[test]
    fn quadratic_form_values() {
        let g = triangle();
        assert_eq!(quadratic_form(&g, &[5.0, 5.0, 5.0]).unwrap(), 0.0);
        assert_eq!(quadratic_form(&g, &[1.0, 0.0, 0.0]).unwrap(), 2.0);
        let e = Graph::unweighted(2, &[(0, 1)]).unwrap();
        assert_eq!(quadratic_form(&e, &[0.0, 1.0]).unwrap(), 1.0);
        assert!(quadratic_form(&e, &[0.0]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = triangle();
        let back = Graph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
        assert!(g.to_json().contains("\"edges\":[[0,1,1.0],[0,2,1.0],[1,2,1.0]]"));
    }

    #[test]
    fn edge_list_round_trip_preserves_original_ids() {
        let parsed =
            parse_edge_list("9 4 1.5\n4 2 0.25\n9 2 3\n", EdgeListFormat::Weighted).unwrap();
        let text = write_edge_list(&parsed.graph, EdgeListFormat::Weighted);
        let reparsed = parse_edge_list(&text, EdgeListFormat::Weighted).unwrap();
        assert_eq!(parsed.graph, reparsed.graph);
    }

    #[test]
    fn validation_catches_bad_graphs() {
        assert!(Graph::new(2, &[(0, 0, 1.0)]).is_err());
        assert!(Graph::new(2, &[(0, 3, 1.0)]).is_err());
        assert!(Graph::new(2, &[(0, 1, 0.0)]).is_err());
        assert!(Graph::new(2, &[(0, 1, 1.0), (1, 0, 2.0)]).is_err());
    }
}
