//! Closed-form solitons on the real line.
//!
//! For `p ∈ (2, 6)` and every frequency `ω > 0` the line problem
//! `u'' + u^{p-1} = ω u` has the unique even positive solution
//!
//! ```text
//! φ_ω(x) = [ (p/2) ω sech²( (p/2 − 1) √ω x ) ]^{1/(p−2)},
//! ```
//!
//! whose mass grows monotonically in `ω`, so the frequency/mass map can be
//! inverted in closed form. The mass-μ ground-state level on the line,
//! `E(μ) = −θ_p μ^{2β+1}`, is the benchmark every graph configuration is
//! compared against.

use crate::error::{Error, Result};
use crate::quadrature::{integral_i, IntegralParams};
use crate::Config;
use serde::Serialize;

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(p > 2.0 && p < 6.0) || !p.is_finite() {
        return Err(Error::domain(format!(
            "standard exponent p = {p} must lie in the open window (2, 6)"
        )));
    }
    Ok(())
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if !(q > 2.0 && q < 4.0) || !q.is_finite() {
        return Err(Error::domain(format!(
            "vertex exponent q = {q} must lie in the open window (2, 4)"
        )));
    }
    Ok(())
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!("frequency {omega} must be positive")));
    }
    Ok(())
}

pub(crate) fn check_mass(mu: f64) -> Result<()> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("mass {mu} must be positive")));
    }
    Ok(())
}

/// Relative strength of the vertex nonlinearity against the standard one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `q < p/2 + 1`: the pointwise term is the weaker one.
    WeakVertex,
    /// `q = p/2 + 1` (within `BALANCED_TOL`): both terms scale identically.
    Balanced,
    /// `q > p/2 + 1`: the pointwise term dominates.
    StrongVertex,
}

/// Absolute tolerance on `q − (p/2 + 1)` for the balanced classification.
pub const BALANCED_TOL: f64 = 1e-12;

/// The exponent pair `(p, q)` with its derived quantities.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NonlinearParams {
    p: f64,
    q: f64,
}

impl NonlinearParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        check_p(p)?;
        check_q(q)?;
        Ok(NonlinearParams { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `α = 2/(6 − p)`, the mass-scaling exponent of the soliton amplitude.
    pub fn alpha(&self) -> f64 {
        2.0 / (6.0 - self.p)
    }

    /// `β = (p − 2)/(6 − p)`, the mass-scaling exponent of the frequency.
    pub fn beta(&self) -> f64 {
        (self.p - 2.0) / (6.0 - self.p)
    }

    /// Signed distance `q − (p/2 + 1)` from the balanced line.
    pub fn balance_gap(&self) -> f64 {
        self.q - (0.5 * self.p + 1.0)
    }

    pub fn regime(&self) -> Regime {
        let gap = self.balance_gap();
        if gap.abs() <= BALANCED_TOL {
            Regime::Balanced
        } else if gap < 0.0 {
            Regime::WeakVertex
        } else {
            Regime::StrongVertex
        }
    }

    pub fn is_balanced(&self) -> bool {
        self.regime() == Regime::Balanced
    }
}

/// sech(z), stable for large |z|.
fn sech(z: f64) -> f64 {
    let e = (-z.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// Pointwise soliton value `φ_ω(x)`; even in `x`, decaying at infinity.
pub fn soliton_value(p: f64, omega: f64, x: f64) -> Result<f64> {
    check_p(p)?;
    check_omega(omega)?;
    Ok(soliton_value_unchecked(p, omega, x))
}

pub(crate) fn soliton_value_unchecked(p: f64, omega: f64, x: f64) -> f64 {
    let k = (0.5 * p - 1.0) * omega.sqrt();
    let s = sech(k * x);
    (0.5 * p * omega * (s * s)).powf(1.0 / (p - 2.0))
}

/// Derivative `φ_ω'(x) = −√ω tanh(kx) φ_ω(x)`, odd in `x`.
pub fn soliton_slope(p: f64, omega: f64, x: f64) -> Result<f64> {
    check_p(p)?;
    check_omega(omega)?;
    Ok(soliton_slope_unchecked(p, omega, x))
}

pub(crate) fn soliton_slope_unchecked(p: f64, omega: f64, x: f64) -> f64 {
    let k = (0.5 * p - 1.0) * omega.sqrt();
    -omega.sqrt() * (k * x).tanh() * soliton_value_unchecked(p, omega, x)
}

/// Prefactor of every mass formula: `4 (p/2)^{2/(p−2)} ω^{(6−p)/(2(p−2))} / (p−2)`
/// without the integral factor. The half-line variants use half of it.
pub(crate) fn mass_prefactor(p: f64, omega: f64) -> f64 {
    4.0 * (0.5 * p).powf(2.0 / (p - 2.0)) * omega.powf((6.0 - p) / (2.0 * (p - 2.0))) / (p - 2.0)
}

/// Line mass `‖φ_ω‖₂²`, strictly increasing and unbounded in `ω`.
pub fn soliton_mass(p: f64, omega: f64, cfg: &Config) -> Result<f64> {
    check_p(p)?;
    check_omega(omega)?;
    let i0 = integral_i(&IntegralParams::with_tol(p, 0.0, cfg.quad_abs_tol)?)?;
    Ok(mass_prefactor(p, omega) * i0)
}

/// Closed-form inverse of [`soliton_mass`]: the unique `ω(μ)` with `‖φ_ω‖₂² = μ`.
pub fn omega_of_mass_line(p: f64, mu: f64, cfg: &Config) -> Result<f64> {
    check_p(p)?;
    check_mass(mu)?;
    let i0 = integral_i(&IntegralParams::with_tol(p, 0.0, cfg.quad_abs_tol)?)?;
    let base = mu * (p - 2.0) / (4.0 * (0.5 * p).powf(2.0 / (p - 2.0)) * i0);
    Ok(base.powf(2.0 * (p - 2.0) / (6.0 - p)))
}

/// Coefficient `θ_p > 0` of the line ground-state level `E(μ) = −θ_p μ^{2β+1}`.
pub fn theta_p(p: f64, cfg: &Config) -> Result<f64> {
    Ok((6.0 - p) / (2.0 * (p + 2.0)) * omega_of_mass_line(p, 1.0, cfg)?)
}

/// Line ground-state energy `E(μ) = −(6−p)/(2(p+2)) ω(μ) μ = −θ_p μ^{2β+1}`.
pub fn line_energy(p: f64, mu: f64, cfg: &Config) -> Result<f64> {
    Ok(-(6.0 - p) / (2.0 * (p + 2.0)) * omega_of_mass_line(p, mu, cfg)? * mu)
}

/// A solved line soliton.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Soliton {
    pub p: f64,
    pub omega: f64,
    pub mass: f64,
    pub energy: f64,
}

impl Soliton {
    pub fn from_omega(p: f64, omega: f64, cfg: &Config) -> Result<Self> {
        let mass = soliton_mass(p, omega, cfg)?;
        Ok(Soliton {
            p,
            omega,
            mass,
            energy: -(6.0 - p) / (2.0 * (p + 2.0)) * omega * mass,
        })
    }

    pub fn from_mass(p: f64, mu: f64, cfg: &Config) -> Result<Self> {
        let omega = omega_of_mass_line(p, mu, cfg)?;
        Ok(Soliton {
            p,
            omega,
            mass: mu,
            energy: -(6.0 - p) / (2.0 * (p + 2.0)) * omega * mu,
        })
    }

    /// Peak amplitude `φ_ω(0) = (pω/2)^{1/(p−2)}`.
    pub fn peak(&self) -> f64 {
        soliton_value_unchecked(self.p, self.omega, 0.0)
    }
}
