//! The greedy unweighted column selection loop.
//!
//! Each iteration works against the current accumulation `A_t`:
//!
//! 1. solve `tr(A_t − λI)^{-1} = T` for the unique `λ < λ_min(A_t)`;
//! 2. solve `f(λ̂) = 0` on `(λ, λ_min(A_t))` where
//!    ```text
//!    f(x) = (x−λ)·[m−t + ∑ⱼ(1−λⱼ)/(λⱼ−λ)]
//!           − [∑ⱼ(1−λⱼ)/((λⱼ−λ)(λⱼ−x))] / [∑ⱼ 1/((λⱼ−λ)(λⱼ−x))]
//!    ```
//! 3. pick an unselected edge whose rank-one update keeps the shifted
//!    inverse trace within the budget, testing candidates in O(n²) each via
//!    the Sherman-Morrison identity;
//! 4. add the column: `A_{t+1} = A_t + u_iu_iᵀ`.
//!
//! After `ℓ` rounds the selected set certifies
//! `λ_min(A_ℓ) > F(T̂*)/(1+F(T̂*))`.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::time::{Duration, Instant};

use nalgebra::base::storage::Storage;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn, Vector, U1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{choose_t, kappa_lower_bound};
use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};
use crate::spectra::{sym_eigvals, EigenSpectrum, OrthonormalEdgeBasis};

pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
/// `trace_slack` defaults to this times the budget `T`.
pub const TRACE_SLACK_FACTOR: f64 = 1e-9;
/// Candidate traces this close (relative) count as tied in best-fit mode,
/// so that mathematically symmetric candidates resolve to the smallest
/// index instead of to floating-point noise.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// Smallest admissible index (the default; scan order is the edge order).
    FirstFit,
    /// Minimal candidate trace; ties go to the smaller index.
    BestFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionParams {
    pub ell: usize,
    /// Barrier budget `T`.
    pub t: f64,
    pub tie_rule: TieRule,
    /// Relative tolerance for both root solves.
    pub root_tol: f64,
    /// Absolute slack added to `T` in the candidate test.
    pub trace_slack: f64,
}

impl SelectionParams {
    /// Params with an explicit budget; derived slack, first-fit, default
    /// tolerances.
    pub fn new(ell: usize, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::ParamDomain(format!("budget T must be positive, got {t}")));
        }
        Ok(SelectionParams {
            ell,
            t,
            tie_rule: TieRule::FirstFit,
            root_tol: DEFAULT_ROOT_TOL,
            trace_slack: TRACE_SLACK_FACTOR * t,
        })
    }

    /// Default parameters for dimension `n` and edge count `m`: budget from
    /// `choose_t`, which also enforces `n < ell < m`.
    pub fn for_counts(n: usize, m: usize, ell: usize) -> Result<Self> {
        let choice = choose_t(n, m, ell)?;
        SelectionParams::new(ell, choice.t)
    }

    pub fn for_graph(g: &Graph, ell: usize) -> Result<Self> {
        let r = connected_components(g).component_count;
        SelectionParams::for_counts(g.vertex_count - r, g.edge_count(), ell)
    }

    pub fn with_tie_rule(mut self, tie_rule: TieRule) -> Self {
        self.tie_rule = tie_rule;
        self
    }

    pub fn with_root_tol(mut self, root_tol: f64) -> Result<Self> {
        if !(root_tol > 0.0) {
            return Err(Error::ParamDomain("root_tol must be positive".into()));
        }
        self.root_tol = root_tol;
        Ok(self)
    }

    pub fn with_trace_slack(mut self, trace_slack: f64) -> Result<Self> {
        if !(trace_slack >= 0.0) {
            return Err(Error::ParamDomain("trace_slack must be non-negative".into()));
        }
        self.trace_slack = trace_slack;
        Ok(self)
    }
}

/// One row of the per-iteration diagnostics log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    pub lambda: f64,
    pub lambda_hat: f64,
    pub chosen: usize,
    pub candidates_examined: usize,
}

#[derive(Debug, Clone)]
pub struct SparsifierResult {
    /// Selected edge indices in selection order.
    pub selected: Vec<usize>,
    pub lambda_min_achieved: f64,
    pub kappa_inv_bound: f64,
    pub per_iteration: Vec<IterationRecord>,
    pub wall_time: Duration,
}

/// Mutable loop state: the accumulation, the selected set, and (between
/// `prepare` and `apply`) the solved shifts with their cached inverses.
#[derive(Debug, Clone)]
pub struct SelectionState {
    round: usize,
    selected: Vec<usize>,
    selected_mask: Vec<bool>,
    a: DMatrix<f64>,
    prepared: Option<PreparedIteration>,
}

#[derive(Debug, Clone)]
struct PreparedIteration {
    spectrum: EigenSpectrum,
    lambda: f64,
    lambda_hat: f64,
    m_inv: DMatrix<f64>,
    m_inv2: DMatrix<f64>,
    base_trace: f64,
}

impl SelectionState {
    pub fn new(dimension: usize, edge_count: usize) -> Self {
        SelectionState {
            round: 0,
            selected: Vec::new(),
            selected_mask: vec![false; edge_count],
            a: DMatrix::zeros(dimension, dimension),
            prepared: None,
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn is_selected(&self, i: usize) -> bool {
        self.selected_mask[i]
    }

    pub fn accumulated(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn lambda(&self) -> Option<f64> {
        self.prepared.as_ref().map(|p| p.lambda)
    }

    pub fn lambda_hat(&self) -> Option<f64> {
        self.prepared.as_ref().map(|p| p.lambda_hat)
    }

    pub fn spectrum(&self) -> Option<&EigenSpectrum> {
        self.prepared.as_ref().map(|p| &p.spectrum)
    }

    /// Solves both shifts for the current `A_t` and caches
    /// `(A_t − λ̂I)^{-1}`, its square, and its trace.
    pub fn prepare(&mut self, params: &SelectionParams) -> Result<()> {
        let spectrum = sym_eigvals(&self.a)?;
        let lambda = solve_lambda(&spectrum, params.t, params.root_tol)?;
        let lambda_hat = solve_lambda_hat(
            &spectrum,
            lambda,
            self.selected_mask.len(),
            self.round,
            params.root_tol,
        )?;
        if !(lambda < lambda_hat && lambda_hat < spectrum.smallest()) {
            return Err(Error::Internal(format!(
                "shift ordering violated: lambda={lambda}, lambda_hat={lambda_hat}, min eig={}",
                spectrum.smallest()
            )));
        }
        let n = self.a.nrows();
        let mut shifted = self.a.clone();
        for i in 0..n {
            shifted[(i, i)] -= lambda_hat;
        }
        let m_inv = Cholesky::new(shifted)
            .ok_or_else(|| Error::Internal("shifted accumulation lost positive definiteness".into()))?
            .inverse();
        let m_inv2 = &m_inv * &m_inv;
        let base_trace = m_inv.trace();
        self.prepared = Some(PreparedIteration { spectrum, lambda, lambda_hat, m_inv, m_inv2, base_trace });
        Ok(())
    }

    /// Adds column `i` to the accumulation and invalidates the prepared
    /// shifts.
    pub fn apply(&mut self, i: usize, basis: &OrthonormalEdgeBasis) -> Result<()> {
        if i >= self.selected_mask.len() {
            return Err(Error::ParamDomain(format!("edge index {i} out of range")));
        }
        if self.selected_mask[i] {
            return Err(Error::ParamDomain(format!("edge index {i} already selected")));
        }
        let u = basis.column(i);
        self.a.ger(1.0, &u, &u, 1.0);
        self.selected.push(i);
        self.selected_mask[i] = true;
        self.round += 1;
        self.prepared = None;
        Ok(())
    }
}

/// Solves `∑ⱼ 1/(λⱼ − λ) = T` for the unique `λ < λ_n`. The root is
/// bracketed in `[λ_n − n/T, λ_n)`; Newton steps are taken inside the
/// bracket with bisection as the safeguard.
pub fn solve_lambda(spec: &EigenSpectrum, t_budget: f64, tol: f64) -> Result<f64> {
    if spec.is_empty() {
        return Err(Error::ParamDomain("empty spectrum".into()));
    }
    if !(t_budget > 0.0) || !t_budget.is_finite() {
        return Err(Error::ParamDomain(format!("budget T must be positive, got {t_budget}")));
    }
    if !(tol > 0.0) {
        return Err(Error::ParamDomain("tolerance must be positive".into()));
    }
    let n = spec.len() as f64;
    let lam_n = spec.smallest();
    let mut lo = lam_n - n / t_budget;
    let mut hi = lam_n;
    let mut x = lo;
    for _ in 0..128 {
        let mut g = -t_budget;
        let mut gp = 0.0;
        for &l in spec.values() {
            let d = l - x;
            g += 1.0 / d;
            gp += 1.0 / (d * d);
        }
        if g.abs() <= tol * t_budget {
            return Ok(x);
        }
        if g < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - g / gp;
        x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    Err(Error::Solver(format!("inverse-trace shift did not converge for T={t_budget}")))
}

/// Finds `λ̂ ∈ (λ, λ_n)` with `f(λ̂) = 0` (see the module docs for `f`).
/// `f(λ) < 0` structurally and `f` turns positive approaching `λ_n`, so the
/// sign change is located by probing towards `λ_n` and then bisecting.
pub fn solve_lambda_hat(
    spec: &EigenSpectrum,
    lambda: f64,
    edge_count: usize,
    round: usize,
    tol: f64,
) -> Result<f64> {
    if spec.is_empty() {
        return Err(Error::ParamDomain("empty spectrum".into()));
    }
    if round >= edge_count {
        return Err(Error::ParamDomain(format!(
            "iteration {round} must stay below the edge count {edge_count}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::ParamDomain("tolerance must be positive".into()));
    }
    let lam_n = spec.smallest();
    if !(lambda < lam_n) {
        return Err(Error::ParamDomain(format!(
            "lambda {lambda} is not strictly below the smallest eigenvalue {lam_n}"
        )));
    }

    let c1: f64 = (edge_count - round) as f64
        + spec.values().iter().map(|&l| (1.0 - l) / (l - lambda)).sum::<f64>();
    let eval = |x: f64| -> (f64, f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for &l in spec.values() {
            let a = (l - lambda) * (l - x);
            num += (1.0 - l) / a;
            den += 1.0 / a;
        }
        let t1 = (x - lambda) * c1;
        let t2 = num / den;
        (t1 - t2, t1, t2)
    };

    let width = lam_n - lambda;
    let mut delta = 1e-3 * width;
    let mut hi = lam_n - delta;
    if hi <= lambda {
        hi = 0.5 * (lambda + lam_n);
        delta = lam_n - hi;
    }
    let mut probes = 0;
    while eval(hi).0 <= 0.0 {
        probes += 1;
        if probes > 60 {
            return Err(Error::Solver("no sign change below the smallest eigenvalue".into()));
        }
        delta *= 0.5;
        hi = lam_n - delta;
    }
    let mut lo = lambda;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(mid).0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (f_root, t1, t2) = eval(hi);
    if f_root.abs() <= tol * (1.0 + t1.abs() + t2.abs()) {
        Ok(hi)
    } else {
        Err(Error::Solver(format!(
            "bisection residual {f_root:e} exceeds tolerance at x={hi}"
        )))
    }
}

/// Trace of `(M + uuᵀ)^{-1}` from the cached `M^{-1}`, `M^{-2}`, and
/// `tr(M^{-1})` via Sherman-Morrison:
/// `tr((M+uuᵀ)^{-1}) = tr(M^{-1}) − uᵀM^{-2}u / (1 + uᵀM^{-1}u)`.
pub fn candidate_trace<S: Storage<f64, Dyn, U1>>(
    m_inv: &DMatrix<f64>,
    m_inv2: &DMatrix<f64>,
    base_trace: f64,
    u: &Vector<f64, Dyn, S>,
) -> Result<f64> {
    let n = m_inv.nrows();
    if m_inv.ncols() != n || m_inv2.nrows() != n || m_inv2.ncols() != n || u.nrows() != n {
        return Err(Error::DimensionMismatch("candidate_trace operand shapes".into()));
    }
    let mut y = DVector::zeros(n);
    y.gemv(1.0, m_inv, u, 0.0);
    let denom = 1.0 + u.dot(&y);
    if denom.abs() < 1e-14 {
        return Err(Error::DegenerateUpdate { denominator: denom });
    }
    y.gemv(1.0, m_inv2, u, 0.0);
    let value = base_trace - u.dot(&y) / denom;
    if !value.is_finite() {
        return Err(Error::NonFinite("candidate trace".into()));
    }
    Ok(value)
}

/// Picks the next edge index per the tie rule. The state must be prepared.
/// The candidate scan runs in parallel but its result is defined — and
/// asserted by tests — to match the sequential ascending scan.
pub fn select_index(
    state: &SelectionState,
    basis: &OrthonormalEdgeBasis,
    params: &SelectionParams,
) -> Result<usize> {
    let p = state
        .prepared
        .as_ref()
        .ok_or_else(|| Error::Internal("select_index called before prepare".into()))?;
    let threshold = params.t + params.trace_slack;
    let candidates: Vec<usize> =
        (0..basis.edge_count()).filter(|&i| !state.selected_mask[i]).collect();
    if candidates.is_empty() {
        return Err(Error::Infeasible {
            iteration: state.round,
            message: "no remaining candidates".into(),
        });
    }
    let trace_of = |i: usize| candidate_trace(&p.m_inv, &p.m_inv2, p.base_trace, &basis.column(i));
    match params.tie_rule {
        TieRule::FirstFit => candidates
            .par_iter()
            .copied()
            .find_first(|&i| matches!(trace_of(i), Ok(v) if v <= threshold))
            .ok_or_else(|| Error::Infeasible {
                iteration: state.round,
                message: format!("no candidate trace within budget {threshold}"),
            }),
        TieRule::BestFit => {
            let traces: Vec<(usize, f64)> = candidates
                .par_iter()
                .map(|&i| (i, trace_of(i).unwrap_or(f64::INFINITY)))
                .collect();
            let mut best = traces[0];
            for &(i, v) in &traces[1..] {
                if v < best.1 - TIE_TOL * (1.0 + best.1.abs()) {
                    best = (i, v);
                }
            }
            if best.1 <= threshold {
                Ok(best.0)
            } else {
                Err(Error::Infeasible {
                    iteration: state.round,
                    message: format!("best candidate trace {} exceeds budget {threshold}", best.1),
                })
            }
        }
    }
}

/// Runs the full greedy loop against a prebuilt basis.
pub fn sparsify_basis(
    basis: &OrthonormalEdgeBasis,
    params: &SelectionParams,
) -> Result<SparsifierResult> {
    let start = Instant::now();
    let n = basis.dimension();
    let m = basis.edge_count();
    if !(n < params.ell && params.ell < m) {
        return Err(Error::ParamDomain(format!(
            "need n < ell < m, got n={n}, ell={}, m={m}",
            params.ell
        )));
    }
    let kappa_inv_bound = kappa_lower_bound(n, m, params.ell)?;
    let mut state = SelectionState::new(n, m);
    let mut per_iteration = Vec::with_capacity(params.ell);
    for t in 0..params.ell {
        state.prepare(params)?;
        let chosen = select_index(&state, basis, params)?;
        let candidates_examined = match params.tie_rule {
            TieRule::FirstFit => (0..=chosen).filter(|&i| !state.is_selected(i)).count(),
            TieRule::BestFit => m - t,
        };
        per_iteration.push(IterationRecord {
            t,
            lambda: state.lambda().unwrap(),
            lambda_hat: state.lambda_hat().unwrap(),
            chosen,
            candidates_examined,
        });
        state.apply(chosen, basis)?;
    }
    let lambda_min_achieved = sym_eigvals(state.accumulated())?.smallest();
    if !(lambda_min_achieved > kappa_inv_bound) {
        return Err(Error::Internal(format!(
            "achieved lambda_min {lambda_min_achieved} does not clear the certified bound {kappa_inv_bound}"
        )));
    }
    Ok(SparsifierResult {
        selected: state.selected,
        lambda_min_achieved,
        kappa_inv_bound,
        per_iteration,
        wall_time: start.elapsed(),
    })
}

/// Builds the basis for `g` and runs the greedy loop.
pub fn sparsify(g: &Graph, params: &SelectionParams) -> Result<SparsifierResult> {
    let basis = OrthonormalEdgeBasis::from_graph(g)?;
    sparsify_basis(&basis, params)
}

/// Extracts an acyclic spanning edge set (|V| − r edges) by sparsifying at
/// `ℓ = n+1` and removing the newest edge of the one cycle that budget must
/// close. Degenerate sizes skip the sparsifier: a forest (`m = n`) is
/// returned whole, and `m = n+1` admits no valid `ℓ` so the cycle is
/// removed from the full edge set directly.
pub fn spanning_structure(g: &Graph) -> Result<Vec<usize>> {
    let labeling = connected_components(g);
    let n = g.vertex_count - labeling.component_count;
    let m = g.edge_count();
    if m == n {
        return Ok((0..m).collect());
    }
    let order: Vec<usize> = if m == n + 1 {
        (0..m).collect()
    } else {
        let params = SelectionParams::for_counts(n, m, n + 1)?;
        sparsify(g, &params)?.selected
    };

    let timestamp: HashMap<usize, usize> =
        order.iter().enumerate().map(|(ts, &e)| (e, ts)).collect();
    let mut alive = vec![false; m];
    let mut degree = vec![0usize; g.vertex_count];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count];
    for &e in &order {
        alive[e] = true;
        let (u, v) = (g.edges[e].u, g.edges[e].v);
        degree[u] += 1;
        degree[v] += 1;
        incident[u].push(e);
        incident[v].push(e);
    }
    // Strip leaves; whatever survives is the unique cycle.
    let mut queue: VecDeque<usize> =
        (0..g.vertex_count).filter(|&v| degree[v] == 1).collect();
    while let Some(v) = queue.pop_front() {
        if degree[v] != 1 {
            continue;
        }
        let Some(&e) = incident[v].iter().find(|&&e| alive[e]) else {
            continue;
        };
        alive[e] = false;
        let (a, b) = (g.edges[e].u, g.edges[e].v);
        degree[a] -= 1;
        degree[b] -= 1;
        let other = if a == v { b } else { a };
        if degree[other] == 1 {
            queue.push_back(other);
        }
    }
    let cycle: Vec<usize> = (0..m).filter(|&e| alive[e]).collect();
    let Some(&drop) = cycle.iter().max_by_key(|e| timestamp[e]) else {
        return Err(Error::Internal(
            "n+1 edges on a rank-n structure must contain a cycle".into(),
        ));
    };
    let mut result: Vec<usize> = order.into_iter().filter(|&e| e != drop).collect();
    result.sort_unstable();
    if result.len() != n {
        return Err(Error::Internal(format!(
            "spanning structure has {} edges, expected {n}",
            result.len()
        )));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Graph {
        Graph::unweighted(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn k4_minus_edge() -> Graph {
        Graph::unweighted(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
    }

    fn triangle() -> Graph {
        Graph::unweighted(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn spectrum(values: &[f64]) -> EigenSpectrum {
        EigenSpectrum::new(values.to_vec()).unwrap()
    }

    #[test]
    fn solve_lambda_goldens() {
        let s = spectrum(&[0.0; 4]);
        assert!((solve_lambda(&s, 8.0, 1e-12).unwrap() + 0.5).abs() < 1e-12);

        let s = spectrum(&[2.0]);
        assert!((solve_lambda(&s, 4.0, 1e-12).unwrap() - 1.75).abs() < 1e-12);

        let s = spectrum(&[1.0, 2.0]);
        let expect = (7.0 - 13.0_f64.sqrt()) / 6.0;
        assert!((solve_lambda(&s, 3.0, 1e-12).unwrap() - expect).abs() < 1e-10);
    }

    #[test]
    fn solve_lambda_rejects_bad_input() {
        let s = spectrum(&[1.0]);
        assert!(solve_lambda(&s, 0.0, 1e-12).is_err());
        assert!(solve_lambda(&s, 1.0, 0.0).is_err());
        assert!(solve_lambda(&spectrum(&[]), 1.0, 1e-12).is_err());
    }

    #[test]
    fn solve_lambda_hat_goldens() {
        let s = spectrum(&[0.0; 4]);
        let hat = solve_lambda_hat(&s, -0.5, 10, 0, 1e-12).unwrap();
        assert!((hat - (-0.5 + 1.0 / 18.0)).abs() < 1e-10);

        let s = spectrum(&[0.5]);
        let hat = solve_lambda_hat(&s, 0.25, 3, 0, 1e-12).unwrap();
        assert!((hat - 0.35).abs() < 1e-10);
    }

    #[test]
    fn solve_lambda_hat_stays_in_range() {
        let s = spectrum(&[0.1, 0.4, 0.9]);
        let lambda = solve_lambda(&s, 25.0, 1e-12).unwrap();
        let hat = solve_lambda_hat(&s, lambda, 12, 3, 1e-12).unwrap();
        assert!(lambda < hat && hat < 0.1);
    }

    #[test]
    fn solve_lambda_hat_domain_errors() {
        let s = spectrum(&[0.5]);
        assert!(solve_lambda_hat(&s, 0.6, 3, 0, 1e-12).is_err());
        assert!(solve_lambda_hat(&s, 0.25, 3, 3, 1e-12).is_err());
    }

    #[test]
    fn candidate_trace_goldens() {
        // M = diag(0.4, 0.15), so M⁻¹ = diag(2.5, 20/3), base trace 55/6.
        let m_inv = DMatrix::from_diagonal(&DVector::from_vec(vec![2.5, 20.0 / 3.0]));
        let m_inv2 = &m_inv * &m_inv;
        let base = m_inv.trace();

        let u = DVector::from_vec(vec![1.0, 0.0]);
        let v = candidate_trace(&m_inv, &m_inv2, base, &u).unwrap();
        assert!((v - 155.0 / 21.0).abs() < 1e-12);

        let u = DVector::from_vec(vec![0.0, 1.0]);
        let v = candidate_trace(&m_inv, &m_inv2, base, &u).unwrap();
        assert!((v - 155.0 / 46.0).abs() < 1e-12);

        let u = DVector::zeros(2);
        assert_eq!(candidate_trace(&m_inv, &m_inv2, base, &u).unwrap(), base);
    }

    #[test]
    fn candidate_trace_degenerate_denominator() {
        let m_inv = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0]));
        let m_inv2 = &m_inv * &m_inv;
        let u = DVector::from_vec(vec![1.0]);
        let err = candidate_trace(&m_inv, &m_inv2, -1.0, &u).unwrap_err();
        assert!(matches!(err, Error::DegenerateUpdate { .. }));
    }

    #[test]
    fn select_index_triangle_first_fit() {
        let basis = OrthonormalEdgeBasis::from_graph(&triangle()).unwrap();
        let params = SelectionParams::new(2, 8.0).unwrap();
        let mut state = SelectionState::new(basis.dimension(), basis.edge_count());
        state.prepare(&params).unwrap();
        assert_eq!(select_index(&state, &basis, &params).unwrap(), 0);
    }

    #[test]
    fn select_index_k4_best_fit_breaks_ties_low() {
        let g = k4();
        let basis = OrthonormalEdgeBasis::from_graph(&g).unwrap();
        let params = SelectionParams::for_graph(&g, 5)
            .unwrap()
            .with_tie_rule(TieRule::BestFit);
        let mut state = SelectionState::new(basis.dimension(), basis.edge_count());
        state.prepare(&params).unwrap();
        assert_eq!(select_index(&state, &basis, &params).unwrap(), 0);
    }

    #[test]
    fn sparsify_k4_first_fit() {
        let g = k4();
        let params = SelectionParams::for_graph(&g, 5).unwrap();
        let res = sparsify(&g, &params).unwrap();
        assert_eq!(res.selected, vec![0, 1, 2, 3, 4]);
        assert!((res.lambda_min_achieved - 0.5).abs() < 1e-10);
        assert!((res.kappa_inv_bound - 0.050032939234314173).abs() < 1e-12);

        let expect = [
            (-0.154158431858, -0.114881903841),
            (-0.112189267517, -0.070130503716),
            (-0.066337899181, -0.020617979964),
            (0.140691107463, 0.185315296267),
            (0.189187693930, 0.239812146426),
        ];
        assert_eq!(res.per_iteration.len(), 5);
        for (rec, &(lam, hat)) in res.per_iteration.iter().zip(&expect) {
            assert!((rec.lambda - lam).abs() < 1e-8, "t={}: {} vs {lam}", rec.t, rec.lambda);
            assert!((rec.lambda_hat - hat).abs() < 1e-8);
            assert!(rec.lambda < rec.lambda_hat);
        }
        for pair in res.per_iteration.windows(2) {
            assert!(pair[0].lambda_hat <= pair[1].lambda + 1e-10);
        }
    }

    #[test]
    fn sparsify_k4_best_fit_reaches_half() {
        let g = k4();
        let params = SelectionParams::for_graph(&g, 5)
            .unwrap()
            .with_tie_rule(TieRule::BestFit);
        let res = sparsify(&g, &params).unwrap();
        assert_eq!(res.selected.len(), 5);
        assert_eq!(res.selected[0], 0);
        assert!((res.lambda_min_achieved - 0.5).abs() < 1e-10);
        for rec in &res.per_iteration {
            assert_eq!(rec.candidates_examined, 6 - rec.t);
        }
    }

    #[test]
    fn sparsify_k4_minus_edge_first_fit() {
        let g = k4_minus_edge();
        let params = SelectionParams::for_graph(&g, 4).unwrap();
        let res = sparsify(&g, &params).unwrap();
        assert_eq!(res.selected, vec![0, 1, 2, 3]);
        assert!((res.lambda_min_achieved - 0.375).abs() < 1e-10);
    }

    #[test]
    fn sparsify_k4_minus_edge_best_fit_clears_bound() {
        let g = k4_minus_edge();
        let params = SelectionParams::for_graph(&g, 4)
            .unwrap()
            .with_tie_rule(TieRule::BestFit);
        let res = sparsify(&g, &params).unwrap();
        assert_eq!(res.selected.len(), 4);
        assert!(res.lambda_min_achieved > res.kappa_inv_bound);
        assert!(res.lambda_min_achieved <= 0.5 + 1e-10);
    }

    #[test]
    fn sparsify_rejects_bad_ell() {
        let g = k4();
        assert!(SelectionParams::for_graph(&g, 2).is_err());
        assert!(SelectionParams::for_graph(&g, 3).is_err());
        assert!(SelectionParams::for_graph(&g, 6).is_err());
    }

    #[test]
    fn sparsify_is_deterministic() {
        let g = k4_minus_edge();
        let params = SelectionParams::for_graph(&g, 4).unwrap();
        let a = sparsify(&g, &params).unwrap();
        let b = sparsify(&g, &params).unwrap();
        assert_eq!(a.selected, b.selected);
        assert_eq!(a.per_iteration, b.per_iteration);
        assert_eq!(a.lambda_min_achieved, b.lambda_min_achieved);
    }

    #[test]
    fn spanning_structure_triangle_fallback() {
        assert_eq!(spanning_structure(&triangle()).unwrap(), vec![0, 1]);
    }

    #[test]
    fn spanning_structure_k4() {
        let g = k4();
        let tree = spanning_structure(&g).unwrap();
        assert_eq!(tree.len(), 3);
        let sub_edges: Vec<(usize, usize)> =
            tree.iter().map(|&e| (g.edges[e].u, g.edges[e].v)).collect();
        let sub = Graph::unweighted(4, &sub_edges).unwrap();
        assert_eq!(connected_components(&sub).component_count, 1);
    }

    #[test]
    fn spanning_structure_forest_passthrough() {
        let g = Graph::unweighted(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(spanning_structure(&g).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn spanning_structure_two_components() {
        // Two triangles sharing nothing: 6 vertices, 6 edges, n = 4.
        let g = Graph::unweighted(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        let tree = spanning_structure(&g).unwrap();
        assert_eq!(tree.len(), 4);
        let sub_edges: Vec<(usize, usize)> =
            tree.iter().map(|&e| (g.edges[e].u, g.edges[e].v)).collect();
        let sub = Graph::unweighted(6, &sub_edges).unwrap();
        assert_eq!(connected_components(&sub).component_count, 2);
    }
}
