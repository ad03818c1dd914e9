//! Barrier-budget selection and the closed-form approximation bounds.
//!
//! For `n < ℓ < m` define
//!
//! ```text
//! D = m + (ℓ+1)/2 − n        E = m − (ℓ−1)/2
//! F(T̂) = ((ℓ−n)·T̂ − n·D) / (T̂·(E − n + T̂))
//! ```
//!
//! `F` is maximized at `T̂* = (n·D + √(n·ℓ·E·D)) / (ℓ−n)`; the greedy loop
//! runs with budget `T = T̂*·(1+F(T̂*))` and is then guaranteed to reach
//! `λ_min > F(T̂*)/(1+F(T̂*))`. That quotient is the authoritative `1/κ`;
//! the equivalent closed form
//! `(ℓ−n)² / ((√(nD)+√(ℓE))² + (ℓ−n)²)` is kept as an independent
//! cross-check (the two are algebraically identical).

use serde::Serialize;

use crate::error::{Error, Result};

/// The maximizing budget `T̂*`, the objective value there, and the derived
/// running budget `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetChoice {
    pub t_hat_star: f64,
    pub f_at_star: f64,
    pub t: f64,
}

/// One row of a bound table. `ramanujan_factor` and `kappa_inv_approx` are
/// absent when `n = 1` (their `d = ℓ/(n−1)` is undefined there).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
    #[serde(rename = "T_hat_star")]
    pub t_hat_star: f64,
    #[serde(rename = "F_at_star")]
    pub f_at_star: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub kappa_inv_ucs: f64,
    pub kappa_inv_ddsss: f64,
    pub ramanujan_factor: Option<f64>,
    pub kappa_inv_approx: Option<f64>,
}

fn validate_triple(n: usize, m: usize, ell: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::ParamDomain("n must be at least 1".into()));
    }
    if ell <= n {
        return Err(Error::ParamDomain(format!("need ell > n, got ell={ell}, n={n}")));
    }
    if ell >= m {
        return Err(Error::ParamDomain(format!("need ell < m, got ell={ell}, m={m}")));
    }
    Ok(())
}

fn d_term(n: usize, m: usize, ell: usize) -> f64 {
    m as f64 + (ell as f64 + 1.0) / 2.0 - n as f64
}

fn e_term(m: usize, ell: usize) -> f64 {
    m as f64 - (ell as f64 - 1.0) / 2.0
}

/// The objective `F(T̂)` whose maximizer fixes the barrier budget.
pub fn budget_objective(n: usize, m: usize, ell: usize, t_hat: f64) -> f64 {
    let (nf, lf) = (n as f64, ell as f64);
    let d = d_term(n, m, ell);
    let c = e_term(m, ell) - nf;
    ((lf - nf) * t_hat - nf * d) / (t_hat * (c + t_hat))
}

/// Closed-form maximizer of `F`, the value there, and `T = T̂*(1+F(T̂*))`.
pub fn choose_t(n: usize, m: usize, ell: usize) -> Result<BudgetChoice> {
    validate_triple(n, m, ell)?;
    let (nf, lf) = (n as f64, ell as f64);
    let d = d_term(n, m, ell);
    let e = e_term(m, ell);
    let t_hat_star = (nf * d + (nf * lf * e * d).sqrt()) / (lf - nf);
    let f_at_star = budget_objective(n, m, ell, t_hat_star);
    let t = t_hat_star * (1.0 + f_at_star);
    Ok(BudgetChoice { t_hat_star, f_at_star, t })
}

/// Certified sparsification quality `1/κ = F(T̂*)/(1+F(T̂*))`, in `(0, 1)`.
pub fn kappa_lower_bound(n: usize, m: usize, ell: usize) -> Result<f64> {
    let choice = choose_t(n, m, ell)?;
    Ok(choice.f_at_star / (1.0 + choice.f_at_star))
}

/// Independent closed-form route to the same `1/κ`; used to cross-check
/// `kappa_lower_bound`, never as the reported value.
pub fn kappa_lower_bound_closed(n: usize, m: usize, ell: usize) -> Result<f64> {
    validate_triple(n, m, ell)?;
    let (nf, lf) = (n as f64, ell as f64);
    let d = d_term(n, m, ell);
    let e = e_term(m, ell);
    let gap = lf - nf;
    let s = ((nf * d).sqrt() + (lf * e).sqrt()).powi(2);
    Ok(gap * gap / (s + gap * gap))
}

/// The dual-set deterministic sparsification guarantee
/// `(√ℓ−√n)² / ((√ℓ+√(m−n))² + (√ℓ−√n)²)`, for comparison tables.
pub fn ddsss_bound(n: usize, m: usize, ell: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::ParamDomain("n must be at least 1".into()));
    }
    if ell < n || ell > m || m <= n {
        return Err(Error::ParamDomain(format!(
            "need n <= ell <= m and m > n, got n={n}, m={m}, ell={ell}"
        )));
    }
    let (nf, mf, lf) = (n as f64, m as f64, ell as f64);
    let num = (lf.sqrt() - nf.sqrt()).powi(2);
    let den = (lf.sqrt() + (mf - nf).sqrt()).powi(2) + num;
    Ok(num / den)
}

/// Comparison factor `(√d+1)²/(√d−1)²` of twice-Ramanujan sparsifiers at
/// average degree `d = ℓ/(n−1)`; undefined for `n = 1`.
pub fn ramanujan_factor(n: usize, ell: usize) -> Option<f64> {
    if n <= 1 {
        return None;
    }
    let d = ell as f64 / (n as f64 - 1.0);
    let rd = d.sqrt();
    Some((rd + 1.0).powi(2) / (rd - 1.0).powi(2))
}

/// Large-graph approximation `1/κ ≈ (√d−1)²/(m/n + d/2 + (√d−1)²)` with
/// `d = ℓ/(n−1)`; undefined for `n = 1`. Only accurate for large `n`
/// (see the sanity-band tests).
pub fn approx_kappa_inv(n: usize, m: usize, ell: usize) -> Option<f64> {
    if n <= 1 {
        return None;
    }
    let d = ell as f64 / (n as f64 - 1.0);
    let s = (d.sqrt() - 1.0).powi(2);
    Some(s / (m as f64 / n as f64 + d / 2.0 + s))
}
