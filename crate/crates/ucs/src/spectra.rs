//! Dense symmetric spectra, the orthonormal edge basis, and shifted-inverse
//! traces.
//!
//! The basis comes from the thin SVD of the weighted incidence matrix
//! `W^{1/2}B` (m×|V|): exactly `n = |V| − r` singular values are nonzero for
//! a graph with `r` components, and the corresponding left factor, stored
//! transposed as the n×m matrix `U` with one column per edge, satisfies
//! `U·Uᵀ = I` and `∑ᵢ uᵢuᵢᵀ = I`. Everything the selection loop touches is
//! phrased in terms of those columns.

use nalgebra::{DMatrix, DVectorView};

use crate::error::{Error, Result};
use crate::graph::{connected_components, incidence_system, ComponentLabeling, Graph, IncidenceSystem};

/// Descending-sorted eigenvalues of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    values: Vec<f64>,
}

impl EigenSpectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("eigenvalue".into()));
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(EigenSpectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// λ_1. Panics on an empty spectrum.
    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    /// λ_n. Panics on an empty spectrum.
    pub fn smallest(&self) -> f64 {
        *self.values.last().expect("empty spectrum")
    }
}

/// Eigenvalues of `(A+Aᵀ)/2`, descending. The input must be symmetric to
/// within `1e−12` relative asymmetry; the explicit symmetrization only mops
/// up rounding.
pub fn sym_eigvals(a: &DMatrix<f64>) -> Result<EigenSpectrum> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", a.nrows(), a.ncols())));
    }
    let mut scale: f64 = 0.0;
    let mut asym: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let x = a[(i, j)];
            if !x.is_finite() {
                return Err(Error::NonFinite(format!("matrix entry ({i}, {j})")));
            }
            scale = scale.max(x.abs());
            asym = asym.max((x - a[(j, i)]).abs());
        }
    }
    if asym > 1e-12 * scale {
        return Err(Error::Validation(format!(
            "matrix is not symmetric: max asymmetry {asym:e} vs scale {scale:e}"
        )));
    }
    let sym = (a + a.transpose()) * 0.5;
    EigenSpectrum::new(sym.symmetric_eigenvalues().iter().copied().collect())
}

/// The n×m orthonormal edge basis together with the singular values and
/// right factor of the thin SVD it came from.
#[derive(Debug, Clone)]
pub struct OrthonormalEdgeBasis {
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    vt: DMatrix<f64>,
    vertex_count: usize,
}

/// Default numerical-rank cutoff, relative to the largest singular value.
pub fn default_rank_tol(edge_count: usize, vertex_count: usize) -> f64 {
    1e-10 * edge_count.max(vertex_count) as f64
}

impl OrthonormalEdgeBasis {
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let sys = incidence_system(g);
        let labeling = connected_components(g);
        edge_orthonormal_basis(&sys, &labeling, default_rank_tol(g.edge_count(), g.vertex_count))
    }

    /// Basis dimension n = |V| − r.
    pub fn dimension(&self) -> usize {
        self.u.nrows()
    }

    pub fn edge_count(&self) -> usize {
        self.u.ncols()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn vt(&self) -> &DMatrix<f64> {
        &self.vt
    }

    pub fn column(&self, i: usize) -> DVectorView<'_, f64> {
        self.u.column(i)
    }

    /// `∑_{i∈subset} uᵢuᵢᵀ`. Rejects out-of-range or repeated indices.
    pub fn accumulate(&self, subset: &[usize]) -> Result<DMatrix<f64>> {
        let n = self.dimension();
        let m = self.edge_count();
        let mut seen = vec![false; m];
        let mut a = DMatrix::zeros(n, n);
        for &i in subset {
            if i >= m {
                return Err(Error::ParamDomain(format!("edge index {i} out of range 0..{m}")));
            }
            if seen[i] {
                return Err(Error::ParamDomain(format!("edge index {i} repeated in subset")));
            }
            seen[i] = true;
            let u = self.u.column(i);
            a.ger(1.0, &u, &u, 1.0);
        }
        Ok(a)
    }
}

/// Computes the orthonormal edge basis by thin SVD of `W^{1/2}B`, keeping
/// exactly the `|V| − r` singular values above `rank_tol·σ_max` and failing
/// if the numerical rank disagrees with the component structure.
pub fn edge_orthonormal_basis(
    sys: &IncidenceSystem,
    labeling: &ComponentLabeling,
    rank_tol: f64,
) -> Result<OrthonormalEdgeBasis> {
    let m = sys.b.nrows();
    let nv = sys.b.ncols();
    let expected = nv - labeling.component_count;
    if m == 0 {
        if expected != 0 {
            return Err(Error::RankMismatch { expected, found: 0 });
        }
        return Ok(OrthonormalEdgeBasis {
            u: DMatrix::zeros(0, 0),
            sigma: Vec::new(),
            vt: DMatrix::zeros(0, nv),
            vertex_count: nv,
        });
    }

    let mut scaled = sys.b.clone();
    for (i, &w) in sys.weights.iter().enumerate() {
        let f = w.sqrt();
        scaled.row_mut(i).iter_mut().for_each(|x| *x *= f);
    }
    let svd = scaled.svd(true, true);
    let u_full = svd.u.as_ref().expect("svd with compute_u");
    let vt_full = svd.v_t.as_ref().expect("svd with compute_v");
    let sv = &svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap());
    let sigma_max = sv[order[0]];
    let found = order.iter().filter(|&&i| sv[i] > rank_tol * sigma_max).count();
    if found != expected {
        return Err(Error::RankMismatch { expected, found });
    }

    let mut u = DMatrix::zeros(expected, m);
    let mut vt = DMatrix::zeros(expected, nv);
    let mut sigma = Vec::with_capacity(expected);
    for (row, &k) in order[..expected].iter().enumerate() {
        u.row_mut(row).tr_copy_from(&u_full.column(k));
        vt.row_mut(row).copy_from(&vt_full.row(k));
        sigma.push(sv[k]);
    }
    Ok(OrthonormalEdgeBasis { u, sigma, vt, vertex_count: nv })
}

/// `∑ⱼ 1/(λⱼ − shift)` for a shift strictly below the smallest eigenvalue.
pub fn shifted_inverse_trace(spec: &EigenSpectrum, shift: f64) -> Result<f64> {
    if spec.is_empty() {
        return Err(Error::ParamDomain("empty spectrum".into()));
    }
    if !(shift < spec.smallest()) {
        return Err(Error::ParamDomain(format!(
            "shift {shift} is not strictly below the smallest eigenvalue {}",
            spec.smallest()
        )));
    }
    Ok(spec.values().iter().map(|&l| 1.0 / (l - shift)).sum())
}

/// Extreme eigenvalues `(λ_min, λ_max)` of the subset accumulation `A_F`;
/// these are the extreme generalized Rayleigh quotients of the sparsifier
/// against the original graph. A zero-dimensional basis (edgeless graph)
/// sandwiches vacuously and reports `(1, 1)`.
pub fn generalized_extremes(basis: &OrthonormalEdgeBasis, selected: &[usize]) -> Result<(f64, f64)> {
    if basis.dimension() == 0 {
        return Ok((1.0, 1.0));
    }
    let a = basis.accumulate(selected)?;
    let spec = sym_eigvals(&a)?;
    Ok((spec.smallest(), spec.largest()))
}
