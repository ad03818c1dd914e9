//! Unweighted spectral sparsification of graphs by greedy column selection.
//!
//! Given a graph with `|V|` vertices, `m` edges, and `r` connected
//! components (`n = |V| − r`), this crate selects exactly `ℓ` edges — all
//! kept at unit weight — whose subgraph spectrally approximates the whole:
//! for every vector `x`,
//!
//! ```text
//! κ⁻¹ · xᵀL_G x  ≤  (m/ℓ) · xᵀL_H x  ≤  xᵀL_G x
//! ```
//!
//! with a condition bound `κ` computed a priori from `(n, m, ℓ)` alone.
//! The selection is a barrier-style greedy: edges become columns of an
//! orthonormal basis ([`spectra`]), each round solves two spectral shifts
//! and admits a column through a Sherman-Morrison trace test
//! ([`selection`]), and the budget that drives it is chosen by maximizing a
//! closed-form objective ([`bounds`]). Results can be re-checked from
//! scratch ([`verify`]) and drawn ([`layout`]).
//!
//! Modules:
//!
//! - [`graph`] — edge lists, parsing, components, incidence and Laplacian;
//! - [`spectra`] — eigenvalue helpers and the orthonormal edge basis;
//! - [`bounds`] — budget choice `T` and the condition-number bounds;
//! - [`selection`] — the greedy loop, its root solvers, and spanning
//!   structures;
//! - [`verify`] — sandwich certification, exhaustive baselines, bound
//!   tables;
//! - [`layout`] — force-directed drawing and SVG output;
//! - [`synth`] — seeded random connected graphs.

pub mod bounds;
pub mod error;
pub mod graph;
pub mod layout;
pub mod selection;
pub mod spectra;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
