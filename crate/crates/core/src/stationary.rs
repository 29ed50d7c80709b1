//! Radial and bump-type stationary states on the star graph.
//!
//! Positive solutions of the stationary system on `S_N` are built from
//! soliton pieces: `J` edges carry a shifted soliton containing its peak,
//! the remaining `N − 2J ≥ 1` edges carry pure tails, and the common shift
//! `a > 0` is fixed by the nonlinear flux condition at the vertex. In the
//! variable `t = tanh((p/2 − 1)√ω a)` the matching condition reads
//!
//! ```text
//! f(t) = t (1 − t²)^{−(q−2)/(p−2)} = (p/2)^{(q−2)/(p−2)} ω^{(2q−2−p)/(2(p−2))} / (N − 2J),
//! ```
//!
//! with `f` strictly increasing from 0 to +∞ on (0, 1), so the root is
//! unique. The solver works in the variable `y = ln(1 − t²)`, where the
//! equation stays well-conditioned all the way into the `t → 1` regime, and
//! polishes small roots in `t` itself.

use crate::error::{Error, Result};
use crate::quadrature::{integral_i, singular_exponent, IntegralParams};
use crate::roots::newton_bisect;
use crate::soliton::{
    check_mass, mass_prefactor, omega_of_mass_line, soliton_slope_unchecked,
    soliton_value_unchecked, NonlinearParams,
};
use crate::Config;
use serde::Serialize;

/// A star graph: `N ≥ 2` half-lines glued at one vertex.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StarTopology {
    n_edges: u32,
}

impl StarTopology {
    pub fn new(n_edges: u32) -> Result<Self> {
        if n_edges < 2 {
            return Err(Error::domain(format!(
                "a star graph needs at least 2 half-lines, got {n_edges}"
            )));
        }
        Ok(StarTopology { n_edges })
    }

    pub fn n_edges(&self) -> u32 {
        self.n_edges
    }

    /// Largest admissible number of peak-carrying edges, `⌊(N−1)/2⌋`.
    pub fn max_bumps(&self) -> u32 {
        (self.n_edges - 1) / 2
    }
}

fn check_bumps(topo: StarTopology, bumps: u32) -> Result<()> {
    if bumps > topo.max_bumps() {
        return Err(Error::domain(format!(
            "bump count J = {bumps} exceeds (N-1)/2 = {} on N = {} edges",
            topo.max_bumps(),
            topo.n_edges()
        )));
    }
    Ok(())
}

fn check_omega(omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!("frequency {omega} must be positive")));
    }
    Ok(omega)
}

/// Solve the matching condition; returns `(t, 1 - t²)`.
///
/// The second component keeps full relative accuracy when `t` is close to 1.
pub(crate) fn solve_t_tau(
    params: &NonlinearParams,
    topo: StarTopology,
    bumps: u32,
    omega: f64,
    cfg: &Config,
) -> Result<(f64, f64)> {
    check_bumps(topo, bumps)?;
    check_omega(omega)?;
    let (p, q) = (params.p(), params.q());
    let m = (q - 2.0) / (p - 2.0);
    let kappa = (2.0 * q - 2.0 - p) / (2.0 * (p - 2.0));
    let denom = (topo.n_edges() - 2 * bumps) as f64;
    let ln_rhs = m * (0.5 * p).ln() + kappa * omega.ln() - denom.ln();

    // g(y) = ln f(t(y)) - ln rhs with y = ln(1 - t^2); strictly decreasing.
    let g = |y: f64| {
        let tau = y.exp();
        let val = 0.5 * (-tau).ln_1p() - m * y - ln_rhs;
        let deriv = -0.5 * tau / (1.0 - tau) - m;
        (val, deriv)
    };

    let lo = -700.0;
    if g(lo).0 < 0.0 {
        return Err(Error::SearchFailure(format!(
            "matching variable out of representable range (rhs = {})",
            ln_rhs.exp()
        )));
    }
    let mut hi = -0.5;
    let mut guard = 0;
    while g(hi).0 >= 0.0 {
        hi *= 0.5;
        guard += 1;
        if guard > 1100 {
            return Err(Error::SearchFailure(
                "matching-variable bracket collapsed towards t = 0".into(),
            ));
        }
    }
    let y = newton_bisect(g, lo, hi, cfg.root_rel_tol.min(1e-13));
    let tau = y.exp();
    let mut t = (1.0 - tau).max(0.0).sqrt();

    // Small roots lose relative accuracy through 1 - tau; polish in t itself.
    if t <= 0.3 && t > 0.0 {
        let rhs = ln_rhs.exp();
        for _ in 0..3 {
            let one_mt2 = 1.0 - t * t;
            let f = t * one_mt2.powf(-m);
            let df = one_mt2.powf(-m - 1.0) * (1.0 + (2.0 * m - 1.0) * t * t);
            let step = (f - rhs) / df;
            t -= step;
            if step.abs() <= 1e-16 * t {
                break;
            }
        }
        return Ok((t, 1.0 - t * t));
    }
    Ok((t, tau))
}

/// Unique root of the vertex matching condition, in (0, 1).
pub fn solve_t(
    params: &NonlinearParams,
    topo: StarTopology,
    bumps: u32,
    omega: f64,
    cfg: &Config,
) -> Result<f64> {
    solve_t_tau(params, topo, bumps, omega, cfg).map(|(t, _)| t)
}

/// Shift `a = artanh(t) / ((p/2 − 1)√ω)` corresponding to a matching root.
pub fn shift_from_t(p: f64, omega: f64, t: f64) -> Result<f64> {
    crate::soliton::check_p(p)?;
    check_omega(omega)?;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::domain(format!(
            "matching variable t = {t} must lie in (0, 1)"
        )));
    }
    Ok(t.atanh() / ((0.5 * p - 1.0) * omega.sqrt()))
}

/// Mass `‖η_J^ω‖₂²` of the stationary state at frequency `ω`.
pub fn mass_eta(
    params: &NonlinearParams,
    topo: StarTopology,
    bumps: u32,
    omega: f64,
    cfg: &Config,
) -> Result<f64> {
    let (t, _) = solve_t_tau(params, topo, bumps, omega, cfg)?;
    let p = params.p();
    let i0 = integral_i(&IntegralParams::with_tol(p, 0.0, cfg.quad_abs_tol)?)?;
    let it = integral_i(&IntegralParams::with_tol(p, t, cfg.quad_abs_tol)?)?;
    let tails = (topo.n_edges() - 2 * bumps) as f64;
    Ok(0.5 * mass_prefactor(p, omega) * (2.0 * bumps as f64 * i0 + tails * it))
}

/// Derivative of the matching root with respect to `ω`; zero in the balanced regime.
pub(crate) fn t_prime(
    params: &NonlinearParams,
    topo: StarTopology,
    bumps: u32,
    omega: f64,
    t: f64,
    tau: f64,
) -> f64 {
    let (p, q) = (params.p(), params.q());
    let m = (q - 2.0) / (p - 2.0);
    let kappa = (2.0 * q - 2.0 - p) / (2.0 * (p - 2.0));
    if kappa == 0.0 {
        return 0.0;
    }
    let denom = (topo.n_edges() - 2 * bumps) as f64;
    let a = (0.5 * p).powf(m) / denom;
    a * kappa * omega.powf(kappa - 1.0) * tau.powf(m + 1.0) / (t * t * (2.0 * m - 1.0) + 1.0)
}

/// Analytic `d‖η_J^ω‖₂²/dω`, strictly positive.
pub fn dmass_domega(
    params: &NonlinearParams,
    topo: StarTopology,
    bumps: u32,
    omega: f64,
    cfg: &Config,
) -> Result<f64> {
    let (t, tau) = solve_t_tau(params, topo, bumps, omega, cfg)?;
    let p = params.p();
    let i0 = integral_i(&IntegralParams::with_tol(p, 0.0, cfg.quad_abs_tol)?)?;
    let it = integral_i(&IntegralParams::with_tol(p, t, cfg.quad_abs_tol)?)?;
    Ok(dmass_from_parts(params, topo, bumps, omega, t, tau, i0, it))
}

#[allow(clippy::too_many_arguments)]
fn dmass_from_parts(
    params: &NonlinearParams,
    topo: StarTopology,
    bumps: u32,
    omega: f64,
    t: f64,
    tau: f64,
    i0: f64,
    it: f64,
) -> f64 {
    let p = params.p();
    let gamma = (6.0 - p) / (2.0 * (p - 2.0));
    let c = 0.5 * mass_prefactor(p, omega);
    let tails = (topo.n_edges() - 2 * bumps) as f64;
    let tp = t_prime(params, topo, bumps, omega, t, tau);
    let e = singular_exponent(p);
    c / omega * (gamma * 2.0 * bumps as f64 * i0 + tails * (gamma * it - omega * tau.powf(e) * tp))
}

/// Unique `ω > 0` with `‖η_J^ω‖₂² = μ`.
///
/// Bracketed from the line-soliton power law (a radial state resembles `N`
/// half-solitons of mass `2μ/N`), then solved by safeguarded Newton using the
/// analytic mass derivative.
pub fn omega_of_mass_eta(
    params: &NonlinearParams,
    topo: StarTopology,
    bumps: u32,
    mu: f64,
    cfg: &Config,
) -> Result<f64> {
    check_bumps(topo, bumps)?;
    check_mass(mu)?;
    let p = params.p();
    let i0 = integral_i(&IntegralParams::with_tol(p, 0.0, cfg.quad_abs_tol)?)?;
    let seed = omega_of_mass_line(p, 2.0 * mu / topo.n_edges() as f64, cfg)?;

    let mass_at = |omega: f64| -> Result<(f64, f64)> {
        let (t, tau) = solve_t_tau(params, topo, bumps, omega, cfg)?;
        let it = integral_i(&IntegralParams::with_tol(p, t, cfg.quad_abs_tol)?)?;
        let tails = (topo.n_edges() - 2 * bumps) as f64;
        let mass = 0.5 * mass_prefactor(p, omega) * (2.0 * bumps as f64 * i0 + tails * it);
        let dmass = dmass_from_parts(params, topo, bumps, omega, t, tau, i0, it);
        Ok((mass - mu, dmass))
    };

    let mut lo = seed;
    let mut hi = seed;
    let mut guard = 0;
    while mass_at(lo)?.0 > 0.0 {
        lo *= 0.25;
        guard += 1;
        if guard > 300 {
            return Err(Error::SearchFailure(format!(
                "frequency bracket expansion failed below omega = {lo:.3e} for mu = {mu}"
            )));
        }
    }
    guard = 0;
    while mass_at(hi)?.0 < 0.0 {
        hi *= 4.0;
        guard += 1;
        if guard > 300 {
            return Err(Error::SearchFailure(format!(
                "frequency bracket expansion failed above omega = {hi:.3e} for mu = {mu}"
            )));
        }
    }
    let mut failed = None;
    let omega = newton_bisect(
        |w| match mass_at(w) {
            Ok(pair) => pair,
            Err(err) => {
                failed = Some(err);
                (f64::NAN, f64::NAN)
            }
        },
        lo,
        hi,
        cfg.omega_rel_tol.min(1e-13),
    );
    match failed {
        Some(err) => Err(err),
        None => Ok(omega),
    }
}

/// Energy of the mass-μ stationary state through the algebraic identity
/// `F(η) = −(6−p)/(2(p+2)) ω μ + (2/(p+2) − 1/q) |η(0)|^q`.
pub fn energy_eta(
    params: &NonlinearParams,
    topo: StarTopology,
    bumps: u32,
    mu: f64,
    cfg: &Config,
) -> Result<f64> {
    Ok(solve_stationary(params, topo, bumps, mu, cfg)?.energy)
}

/// A fully solved stationary state `η_J^ω` at prescribed mass.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StationaryState {
    pub params: NonlinearParams,
    pub topology: StarTopology,
    /// Number of peak-carrying edges.
    pub bumps: u32,
    pub omega: f64,
    /// Matching variable `t = tanh((p/2−1)√ω a)`.
    pub t: f64,
    /// Soliton shift `a > 0`.
    pub shift: f64,
    pub mass: f64,
    /// Common value at the vertex.
    pub vertex_value: f64,
    pub energy: f64,
}

/// Solve the full stationary problem at mass `μ`.
pub fn solve_stationary(
    params: &NonlinearParams,
    topo: StarTopology,
    bumps: u32,
    mu: f64,
    cfg: &Config,
) -> Result<StationaryState> {
    let omega = omega_of_mass_eta(params, topo, bumps, mu, cfg)?;
    let (t, tau) = solve_t_tau(params, topo, bumps, omega, cfg)?;
    let (p, q) = (params.p(), params.q());
    let vertex_value = (0.5 * p * omega * tau).powf(1.0 / (p - 2.0));
    let energy = -(6.0 - p) / (2.0 * (p + 2.0)) * omega * mu
        + (2.0 / (p + 2.0) - 1.0 / q) * vertex_value.powf(q);
    Ok(StationaryState {
        params: *params,
        topology: topo,
        bumps,
        omega,
        t,
        shift: shift_from_t(p, omega, t)?,
        mass: mu,
        vertex_value,
        energy,
    })
}

impl StationaryState {
    /// Value of the state at coordinate `x ≥ 0` on the given edge.
    ///
    /// Edges `0..bumps` carry the peak (`φ_ω(x − a)`), the rest the tail
    /// (`φ_ω(x + a)`).
    pub fn value_on_edge(&self, edge: usize, x: f64) -> f64 {
        assert!(edge < self.topology.n_edges() as usize, "edge out of range");
        let p = self.params.p();
        if (edge as u32) < self.bumps {
            soliton_value_unchecked(p, self.omega, x - self.shift)
        } else {
            soliton_value_unchecked(p, self.omega, x + self.shift)
        }
    }

    /// Spatial derivative along the given edge.
    pub fn slope_on_edge(&self, edge: usize, x: f64) -> f64 {
        assert!(edge < self.topology.n_edges() as usize, "edge out of range");
        let p = self.params.p();
        if (edge as u32) < self.bumps {
            soliton_slope_unchecked(p, self.omega, x - self.shift)
        } else {
            soliton_slope_unchecked(p, self.omega, x + self.shift)
        }
    }

    /// Residual of the vertex flux condition, `Σᵢ ηᵢ'(0⁺) + η(0)^{q−1}`.
    pub fn vertex_flux_residual(&self) -> f64 {
        let n = self.topology.n_edges() as usize;
        let slopes: f64 = (0..n).map(|edge| self.slope_on_edge(edge, 0.0)).sum();
        slopes + self.vertex_value.powf(self.params.q() - 1.0)
    }
}
