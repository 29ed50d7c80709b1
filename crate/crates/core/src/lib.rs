//! Ground states of the doubly-nonlinear Schrödinger energy on star graphs.
//!
//! The energy under study combines a standard focusing power nonlinearity
//! with a pointwise (delta-type) nonlinearity at the vertex of a star graph
//! of `N` half-lines,
//!
//! ```text
//! F(u) = 1/2 ∫ |u'|^2 − 1/p ∫ |u|^p − 1/q |u(0)|^q,     ∫ |u|^2 = μ,
//! ```
//!
//! with exponents `p ∈ (2,6)`, `q ∈ (2,4)`. The crate computes
//!
//! * closed-form line solitons and their energy level ([`soliton`]),
//! * the radial stationary family on the star graph obtained by matching
//!   soliton pieces at the vertex ([`stationary`]),
//! * ground-state existence verdicts, critical masses and the critical
//!   half-line count in the balanced regime `q = p/2 + 1` ([`existence`]),
//! * orbital-stability certificates through the reduced energy on the
//!   multi-soliton manifold ([`reduced`]),
//! * a brute-force discretized minimizer used to cross-validate all of the
//!   above ([`discrete`]).
//!
//! All solvers are pure functions of their inputs and are safe to call
//! concurrently from parameter sweeps.

// Validations use `!(x > 0.0)` on purpose: the negation also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrete;
pub mod error;
pub mod existence;
pub mod quadrature;
pub mod reduced;
mod roots;
pub mod soliton;
pub mod stationary;

pub use error::{Error, Result};

/// Solver tolerances shared by the root-finding and quadrature layers.
///
/// The defaults reproduce every documented accuracy contract; `fast` trades
/// roughly two digits for speed in large sweeps, `precise` tightens the
/// quadrature floor for reference runs.
#[derive(Clone, Copy, Debug)]
pub struct Config {
    /// Absolute tolerance for the parameter integrals.
    pub quad_abs_tol: f64,
    /// Relative tolerance for scalar root finding (matching variable, piece solves).
    pub root_rel_tol: f64,
    /// Relative tolerance on the frequency when inverting mass maps.
    pub omega_rel_tol: f64,
    /// Mass bracket floor/ceiling for threshold searches.
    pub mu_bracket: (f64, f64),
    /// Upper cap for the sequential critical-N scan.
    pub critical_n_cap: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            quad_abs_tol: 1e-12,
            root_rel_tol: 1e-12,
            omega_rel_tol: 1e-10,
            mu_bracket: (1e-8, 1e8),
            critical_n_cap: 10_000,
        }
    }
}

impl Config {
    /// Looser tolerances for broad parameter scans.
    pub fn fast() -> Self {
        Config {
            quad_abs_tol: 1e-10,
            root_rel_tol: 1e-10,
            omega_rel_tol: 1e-8,
            ..Config::default()
        }
    }

    /// Tightened tolerances for reference computations.
    pub fn precise() -> Self {
        Config {
            quad_abs_tol: 1e-13,
            root_rel_tol: 1e-14,
            omega_rel_tol: 1e-12,
            ..Config::default()
        }
    }
}
