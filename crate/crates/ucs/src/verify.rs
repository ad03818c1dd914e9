//! Certificate verification, exhaustive baselines, and bound tables.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bounds::{
    approx_kappa_inv, choose_t, ddsss_bound, kappa_lower_bound, ramanujan_factor, BoundReport,
};
use crate::error::{Error, Result};
use crate::spectra::{generalized_extremes, sym_eigvals, OrthonormalEdgeBasis};

pub const DEFAULT_SANDWICH_TOL: f64 = 1e-8;
/// `brute_force_best` refuses instances with more than this many subsets.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;
/// Subset values this close (relative) count as tied; the lexicographically
/// earlier subset is kept.
const TIE_TOL: f64 = 1e-12;

/// Spectral sandwich check for a claimed sparsifier: the subset accumulation
/// must satisfy `κ⁻¹ ≤ λ_min(A_F)` and `λ_max(A_F) ≤ 1`, both up to `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    pub lower: f64,
    pub upper: f64,
    pub kappa_inv_claimed: f64,
    pub pass: bool,
}

pub fn verify_sandwich(
    basis: &OrthonormalEdgeBasis,
    subset: &[usize],
    kappa_inv_claimed: f64,
    tol: f64,
) -> Result<SandwichReport> {
    if !(tol >= 0.0) {
        return Err(Error::ParamDomain("tolerance must be non-negative".into()));
    }
    if !kappa_inv_claimed.is_finite() {
        return Err(Error::NonFinite("claimed condition bound".into()));
    }
    let (lower, upper) = generalized_extremes(basis, subset)?;
    let pass = upper <= 1.0 + tol && lower >= kappa_inv_claimed - tol;
    Ok(SandwichReport { lower, upper, kappa_inv_claimed, pass })
}

/// `C(m, k)`, or `None` on u128 overflow.
fn binomial(m: u128, k: u128) -> Option<u128> {
    if k > m {
        return Some(0);
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(m - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

fn search_subsets(
    basis: &OrthonormalEdgeBasis,
    ell: usize,
    start: usize,
    a: &DMatrix<f64>,
    prefix: &mut Vec<usize>,
    best: &mut Option<(f64, Vec<usize>)>,
) -> Result<()> {
    if prefix.len() == ell {
        let value = if basis.dimension() == 0 { 1.0 } else { sym_eigvals(a)?.smallest() };
        match best {
            None => *best = Some((value, prefix.clone())),
            Some((bv, _)) => {
                if value > *bv + TIE_TOL * (1.0 + bv.abs()) {
                    *best = Some((value, prefix.clone()));
                }
            }
        }
        return Ok(());
    }
    let remaining = ell - prefix.len();
    for i in start..=(basis.edge_count() - remaining) {
        let mut next = a.clone();
        let u = basis.column(i);
        next.ger(1.0, &u, &u, 1.0);
        prefix.push(i);
        search_subsets(basis, ell, i + 1, &next, prefix, best)?;
        prefix.pop();
    }
    Ok(())
}

/// Exhaustively maximizes `λ_min(A_F)` over all `ℓ`-subsets, enumerating in
/// lexicographic order; among subsets tied within `1e-12` (relative) the
/// first — lexicographically smallest — is returned. Guarded: instances
/// with `C(m, ℓ)` beyond [`BRUTE_FORCE_LIMIT`] are refused.
pub fn brute_force_best(basis: &OrthonormalEdgeBasis, ell: usize) -> Result<(f64, Vec<usize>)> {
    let m = basis.edge_count();
    if ell > m {
        return Err(Error::ParamDomain(format!("need ell <= m, got ell={ell}, m={m}")));
    }
    match binomial(m as u128, ell as u128) {
        Some(count) if count <= BRUTE_FORCE_LIMIT => {}
        Some(count) => {
            return Err(Error::CombinatorialGuard(format!(
                "C({m},{ell}) = {count} subsets exceed the limit {BRUTE_FORCE_LIMIT}"
            )));
        }
        None => {
            return Err(Error::CombinatorialGuard(format!(
                "C({m},{ell}) overflows; far beyond the limit {BRUTE_FORCE_LIMIT}"
            )));
        }
    }
    let n = basis.dimension();
    let mut best = None;
    let mut prefix = Vec::with_capacity(ell);
    search_subsets(basis, ell, 0, &DMatrix::zeros(n, n), &mut prefix, &mut best)?;
    best.ok_or_else(|| Error::Internal("subset enumeration produced no candidate".into()))
}

/// A bound-table input excluded from the output, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedTriple {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
    pub reason: String,
}

/// All bound quantities for one `(n, m, ell)` triple.
pub fn bound_row(n: usize, m: usize, ell: usize) -> Result<BoundReport> {
    let choice = choose_t(n, m, ell)?;
    Ok(BoundReport {
        n,
        m,
        ell,
        t_hat_star: choice.t_hat_star,
        f_at_star: choice.f_at_star,
        t: choice.t,
        kappa_inv_ucs: kappa_lower_bound(n, m, ell)?,
        kappa_inv_ddsss: ddsss_bound(n, m, ell)?,
        ramanujan_factor: ramanujan_factor(n, ell),
        kappa_inv_approx: approx_kappa_inv(n, m, ell),
    })
}

/// Evaluates every triple, splitting valid rows from skipped inputs.
pub fn bound_table(
    triples: &[(usize, usize, usize)],
) -> (Vec<BoundReport>, Vec<SkippedTriple>) {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &(n, m, ell) in triples {
        match bound_row(n, m, ell) {
            Ok(row) => rows.push(row),
            Err(e) => skipped.push(SkippedTriple { n, m, ell, reason: e.to_string() }),
        }
    }
    (rows, skipped)
}

/// Renders rows as CSV. Floats use the shortest round-trip form; an absent
/// Ramanujan factor leaves its cell empty.
pub fn bound_table_csv(rows: &[BoundReport]) -> String {
    let mut out = String::from(
        "n,m,ell,T_hat_star,F_at_star,T,kappa_inv_ucs,kappa_inv_ddsss,ramanujan_factor\n",
    );
    for r in rows {
        let ram = r.ramanujan_factor.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n, r.m, r.ell, r.t_hat_star, r.f_at_star, r.t, r.kappa_inv_ucs, r.kappa_inv_ddsss, ram
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::selection::{sparsify, SelectionParams};

    fn k4() -> Graph {
        Graph::unweighted(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn basis_of(g: &Graph) -> OrthonormalEdgeBasis {
        OrthonormalEdgeBasis::from_graph(g).unwrap()
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(6, 5), Some(6));
        assert_eq!(binomial(30, 15), Some(155_117_520));
        assert_eq!(binomial(4, 0), Some(1));
        assert_eq!(binomial(3, 5), Some(0));
    }

    #[test]
    fn brute_force_triangle() {
        let g = Graph::unweighted(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let (value, subset) = brute_force_best(&basis_of(&g), 2).unwrap();
        assert!((value - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(subset, vec![0, 1]);
    }

    #[test]
    fn brute_force_k4() {
        let basis = basis_of(&k4());
        let (value, subset) = brute_force_best(&basis, 5).unwrap();
        assert!((value - 0.5).abs() < 1e-12);
        assert_eq!(subset, vec![0, 1, 2, 3, 4]);

        let (value, subset) = brute_force_best(&basis, 6).unwrap();
        assert!((value - 1.0).abs() < 1e-10);
        assert_eq!(subset, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn brute_force_k4_minus_edge() {
        let g = Graph::unweighted(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let (value, subset) = brute_force_best(&basis_of(&g), 4).unwrap();
        assert!((value - 0.5).abs() < 1e-9);
        assert_eq!(subset, vec![1, 2, 3, 4]);
    }

    #[test]
    fn brute_force_guard() {
        // Path on 31 vertices: C(30, 15) ≈ 1.55e8 subsets.
        let edges: Vec<(usize, usize)> = (0..30).map(|i| (i, i + 1)).collect();
        let g = Graph::unweighted(31, &edges).unwrap();
        let err = brute_force_best(&basis_of(&g), 15).unwrap_err();
        assert!(matches!(err, Error::CombinatorialGuard(_)));

        assert!(brute_force_best(&basis_of(&k4()), 7).is_err());
    }

    #[test]
    fn sandwich_full_graph_passes() {
        let basis = basis_of(&k4());
        let rep = verify_sandwich(&basis, &[0, 1, 2, 3, 4, 5], 1.0, DEFAULT_SANDWICH_TOL).unwrap();
        assert!(rep.pass);
        assert!((rep.lower - 1.0).abs() < 1e-10);
        assert!((rep.upper - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sandwich_empty_subset_fails() {
        let basis = basis_of(&k4());
        let rep = verify_sandwich(&basis, &[], 0.01, DEFAULT_SANDWICH_TOL).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.lower, 0.0);
    }

    #[test]
    fn sandwich_accepts_greedy_output() {
        let g = k4();
        let params = SelectionParams::for_graph(&g, 5).unwrap();
        let res = sparsify(&g, &params).unwrap();
        let basis = basis_of(&g);
        let rep =
            verify_sandwich(&basis, &res.selected, res.kappa_inv_bound, DEFAULT_SANDWICH_TOL)
                .unwrap();
        assert!(rep.pass);
        assert!(rep.lower >= res.kappa_inv_bound);
        assert!(res.lambda_min_achieved <= {
            let (brute, _) = brute_force_best(&basis, 5).unwrap();
            brute + 1e-10
        });
    }

    #[test]
    fn bound_table_splits_valid_and_skipped() {
        let (rows, skipped) = bound_table(&[(2, 4, 3), (3, 3, 3), (1, 3, 2)]);
        assert_eq!(rows.len(), 2);
        assert_eq!(skipped.len(), 1);
        assert_eq!((skipped[0].n, skipped[0].m, skipped[0].ell), (3, 3, 3));
        assert!(skipped[0].reason.contains("ell"));
        assert_eq!(rows[0].ell, 3);
        assert!(rows[0].ramanujan_factor.is_some());
        assert!(rows[1].ramanujan_factor.is_none());
    }

    #[test]
    fn csv_layout() {
        let (rows, _) = bound_table(&[(2, 4, 3), (1, 3, 2)]);
        let csv = bound_table_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "n,m,ell,T_hat_star,F_at_star,T,kappa_inv_ucs,kappa_inv_ddsss,ramanujan_factor"
        );
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("2,4,3,"));
        assert_eq!(lines[1].split(',').count(), 9);
        // n = 1 leaves the Ramanujan cell empty.
        assert!(lines[2].starts_with("1,3,2,"));
        assert!(lines[2].ends_with(','));
    }
}
