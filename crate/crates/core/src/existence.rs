//! Ground-state existence: verdicts, critical masses, critical edge counts.
//!
//! The decision rule is the competition between the radial stationary state
//! and the line soliton: a ground state at mass `μ` exists exactly when
//! `F_rad(μ) ≤ E(μ)`, where `F_rad` is the energy of the radial stationary
//! state and `E(μ) = −θ_p μ^{2β+1}` the line level. Away from the balanced
//! regime the normalized gap `K(μ) = F_rad(μ)/μ^{2β+1}` is strictly
//! monotone, so the verdict flips at a single critical mass. On the
//! balanced line `q = p/2 + 1` both sides scale identically and existence
//! reduces to the mass-independent condition `N·I(t_N)/I(0) ≤ 2` with
//! `t_N = √(p/(p + 2N²))`, which holds up to a critical number of edges.

use crate::error::{Error, Result};
use crate::quadrature::{integral_i, integral_i_log_tol, IntegralParams};
use crate::roots::bisect;
use crate::soliton::{check_mass, line_energy, NonlinearParams, Regime};
use crate::stationary::{solve_stationary, StarTopology};
use crate::Config;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Existence verdict for one `(p, q, N, μ)` cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Exists,
    NotExists,
}

/// Outcome of the existence criterion at a single mass.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExistenceReport {
    pub params: NonlinearParams,
    pub n_edges: u32,
    pub mu: f64,
    /// Energy of the radial stationary state (the candidate ground state).
    pub radial_energy: f64,
    /// Line soliton level at the same mass.
    pub line_energy: f64,
    /// `radial_energy − line_energy`; existence means `margin ≤ 0`.
    pub margin: f64,
    pub verdict: Verdict,
    pub regime: Regime,
    /// Set when the margin is within `1e-9·|line_energy|` of zero.
    pub boundary: bool,
}

/// Decide ground-state existence at mass `μ` on `N` edges.
///
/// Equality counts as existence; margins within `±1e-9·|line_energy|` of
/// zero are labelled `exists` and flagged as boundary cases.
pub fn exists_ground_state(
    params: &NonlinearParams,
    topo: StarTopology,
    mu: f64,
    cfg: &Config,
) -> Result<ExistenceReport> {
    check_mass(mu)?;
    let radial = solve_stationary(params, topo, 0, mu, cfg)?.energy;
    let line = line_energy(params.p(), mu, cfg)?;
    let margin = radial - line;
    let band = 1e-9 * line.abs();
    let verdict = if margin <= band {
        Verdict::Exists
    } else {
        Verdict::NotExists
    };
    Ok(ExistenceReport {
        params: *params,
        n_edges: topo.n_edges(),
        mu,
        radial_energy: radial,
        line_energy: line,
        margin,
        verdict,
        regime: params.regime(),
        boundary: margin.abs() <= band,
    })
}

/// Normalized radial level `K(μ) = F_rad(μ)/μ^{2β+1}`.
pub fn k_value(
    params: &NonlinearParams,
    topo: StarTopology,
    mu: f64,
    cfg: &Config,
) -> Result<f64> {
    check_mass(mu)?;
    let radial = solve_stationary(params, topo, 0, mu, cfg)?.energy;
    Ok(radial / mu.powf(2.0 * params.beta() + 1.0))
}

/// Analytic `K'(μ) = (p+2−2q)/(q(6−p)) · |η₀(0)|^q / μ^{2β+2}`.
///
/// Positive in the weak-vertex regime, negative in the strong-vertex one,
/// identically zero on the balanced line.
pub fn k_derivative(
    params: &NonlinearParams,
    topo: StarTopology,
    mu: f64,
    cfg: &Config,
) -> Result<f64> {
    check_mass(mu)?;
    let (p, q) = (params.p(), params.q());
    if params.is_balanced() {
        return Ok(0.0);
    }
    let state = solve_stationary(params, topo, 0, mu, cfg)?;
    Ok((p + 2.0 - 2.0 * q) / (q * (6.0 - p)) * state.vertex_value.powf(q)
        / mu.powf(2.0 * params.beta() + 2.0))
}

/// Which side of the critical mass carries existence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSide {
    /// Weak vertex: ground states exist for `μ ≤ μ_c`.
    ExistsBelow,
    /// Strong vertex: ground states exist for `μ ≥ μ_c`.
    ExistsAbove,
}

/// A located critical mass.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CriticalMassResult {
    pub params: NonlinearParams,
    pub n_edges: u32,
    pub mu_critical: f64,
    /// Final bracket around the sign change of the margin.
    pub bracket: (f64, f64),
    pub iterations: u32,
    pub side: ThresholdSide,
}

/// Locate the critical mass `μ_{p,q}` on `N ≥ 3` edges.
///
/// Rejects the balanced regime (no threshold in `μ` exists there) and
/// `N = 2` (existence holds at every mass). The sign change of the margin
/// is bracketed by geometric expansion inside the configured mass window
/// and then bisected in log space to `rel_tol`.
pub fn critical_mass(
    params: &NonlinearParams,
    topo: StarTopology,
    rel_tol: f64,
    cfg: &Config,
) -> Result<CriticalMassResult> {
    if params.is_balanced() {
        return Err(Error::Regime(format!(
            "no critical mass on the balanced line q = p/2 + 1 (p = {}, q = {}); \
             existence is decided by the edge count alone",
            params.p(),
            params.q()
        )));
    }
    if topo.n_edges() == 2 {
        return Err(Error::NoThreshold(
            "on N = 2 edges ground states exist at every mass; no finite threshold".into(),
        ));
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::domain(format!(
            "relative tolerance {rel_tol} must lie in (0, 1)"
        )));
    }
    let margin_at = |mu: f64| -> Result<f64> {
        Ok(exists_ground_state(params, topo, mu, cfg)?.margin)
    };
    let (floor, ceil) = cfg.mu_bracket;
    let sign0 = margin_at(1.0)?.is_sign_positive();
    let mut iterations = 0u32;
    let mut lo = 1.0f64;
    let mut hi = 1.0f64;
    let mut bracketed = false;
    while lo * 0.25 >= floor {
        iterations += 1;
        lo *= 0.25;
        if margin_at(lo)?.is_sign_positive() != sign0 {
            hi = lo * 4.0;
            bracketed = true;
            break;
        }
    }
    if !bracketed {
        hi = 1.0;
        loop {
            if hi * 4.0 > ceil {
                return Err(Error::SearchFailure(format!(
                    "no sign change of the existence margin inside mu in [{floor:.1e}, {ceil:.1e}] \
                     (p = {}, q = {}, N = {})",
                    params.p(),
                    params.q(),
                    topo.n_edges(),
                )));
            }
            iterations += 1;
            hi *= 4.0;
            if margin_at(hi)?.is_sign_positive() != sign0 {
                lo = hi * 0.25;
                break;
            }
        }
    }

    // Bisect in log(mu); the margin changes sign exactly once by monotonicity
    // of K. A step of w in log(mu) is a relative step of ~w in mu, so the
    // stopping width is rel_tol itself.
    let mut ln_lo = lo.ln();
    let mut ln_hi = hi.ln();
    let mut lo_positive = margin_at(ln_lo.exp())?.is_sign_positive();
    let mut count = iterations + 1;
    while ln_hi - ln_lo > rel_tol {
        let mid = 0.5 * (ln_lo + ln_hi);
        if mid == ln_lo || mid == ln_hi {
            break;
        }
        count += 1;
        if margin_at(mid.exp())?.is_sign_positive() == lo_positive {
            ln_lo = mid;
            lo_positive = margin_at(ln_lo.exp())?.is_sign_positive();
        } else {
            ln_hi = mid;
        }
    }
    let bracket = (ln_lo.exp(), ln_hi.exp());
    let mu_critical = (0.5 * (ln_lo + ln_hi)).exp();
    let side = match params.regime() {
        Regime::WeakVertex => ThresholdSide::ExistsBelow,
        Regime::StrongVertex => ThresholdSide::ExistsAbove,
        Regime::Balanced => unreachable!("balanced rejected above"),
    };
    Ok(CriticalMassResult {
        params: *params,
        n_edges: topo.n_edges(),
        mu_critical,
        bracket,
        iterations: count,
        side,
    })
}

/// Energy of the radial exponential trial function `A e^{−Bx}` at mass `μ`.
///
/// Closed form; always an upper bound for the radial ground-state level.
pub fn trial_exponential_energy(
    params: &NonlinearParams,
    topo: StarTopology,
    mu: f64,
) -> Result<f64> {
    check_mass(mu)?;
    let (p, q) = (params.p(), params.q());
    let n = topo.n_edges() as f64;
    let amplitude = (2.0 * mu / (n * n)).powf(1.0 / (4.0 - q));
    Ok(-(1.0 / q - 0.25) * amplitude.powf(q) - n * n / (p * p) * amplitude.powf(p - q + 2.0))
}

/// Left-hand side of the balanced existence condition, `N·I(t_N)/I(0)` with
/// `t_N = √(p/(p + 2N²))`. Existence on `N` edges means the value is ≤ 2.
///
/// `p = 6` is admitted to reproduce the boundary identities.
pub fn condcrit_lhs(p: f64, n_edges: u32, cfg: &Config) -> Result<f64> {
    if n_edges < 1 {
        return Err(Error::domain("edge count must be at least 1"));
    }
    let n = n_edges as f64;
    let t = (p / (p + 2.0 * n * n)).sqrt();
    let i0 = integral_i(&IntegralParams::with_tol(p, 0.0, cfg.quad_abs_tol)?)?;
    let it = integral_i(&IntegralParams::with_tol(p, t, cfg.quad_abs_tol)?)?;
    Ok(n * it / i0)
}

/// Analytic certificate for the balanced condition when `p ∈ (2, 4)`.
///
/// Evaluates the chain bound
/// `(2N/(p−2)) (2N²/(p+2N²))^{(4−p)/(p−2)} (1 − √(p/(p+2N²))) ≤ 2`;
/// whenever it holds, `condcrit_lhs(p, N) ≤ 2` follows, so `N_p ≥ N`.
pub fn critical_n_lower_bound(p: f64, n_edges: u32) -> Result<bool> {
    if !(p > 2.0 && p < 4.0) {
        return Err(Error::domain(format!(
            "the certified bound requires p in (2, 4), got {p}"
        )));
    }
    if n_edges < 1 {
        return Err(Error::domain("edge count must be at least 1"));
    }
    let n = n_edges as f64;
    let base = 2.0 * n * n / (p + 2.0 * n * n);
    let value = 2.0 * n / (p - 2.0)
        * base.powf((4.0 - p) / (p - 2.0))
        * (1.0 - (p / (p + 2.0 * n * n)).sqrt());
    Ok(value <= 2.0)
}

/// Critical edge count `N_p`: the largest `N` with `condcrit_lhs(p, N) ≤ 2`.
///
/// The left-hand side is below 2 at `N = 2`, non-decreasing in `N` and
/// divergent, so the scan is a sequential walk with early exit. For `p`
/// close to 2 the analytic certificate is consulted first to skip ahead.
pub fn critical_n(p: f64, cfg: &Config) -> Result<u32> {
    crate::soliton::check_p(p)?;
    let mut start = 2u32;
    if p < 4.0 {
        // Certified edges need no quadrature at all.
        let mut n = 2u32;
        while n < cfg.critical_n_cap && critical_n_lower_bound(p, n + 1)? {
            n += 1;
        }
        start = n.max(2);
    }
    let mut last_ok = start;
    for n in start..=cfg.critical_n_cap {
        if condcrit_lhs(p, n, cfg)? <= 2.0 {
            last_ok = n;
        } else {
            return Ok(last_ok);
        }
    }
    Err(Error::SearchFailure(format!(
        "critical edge count for p = {p} exceeds the configured cap {}",
        cfg.critical_n_cap
    )))
}

/// `G(N) = N⁴ − 2πN³ + π²N² − 6πN + 3π²`; positive for all `N ≥ 5`.
pub fn g_polynomial(n_edges: u32) -> Result<f64> {
    if n_edges < 1 {
        return Err(Error::domain("G is evaluated at integers N >= 1"));
    }
    let n = n_edges as f64;
    Ok(n.powi(4) - 2.0 * PI * n.powi(3) + PI * PI * n * n - 6.0 * PI * n + 3.0 * PI * PI)
}

/// `R(p) = I(√(p/(p+18)))/I(0)`, the balanced condition at `N = 3` up to
/// the factor 3. Defined for `p ∈ (2, 6]`.
pub fn r_value(p: f64, cfg: &Config) -> Result<f64> {
    Ok(condcrit_lhs(p, 3, cfg)? / 3.0)
}

/// Sampled graph of `R(p)`, one `(p, R(p))` row per grid point.
pub fn r_curve(p_grid: &[f64], cfg: &Config) -> Result<Vec<(f64, f64)>> {
    p_grid.iter().map(|&p| Ok((p, r_value(p, cfg)?))).collect()
}

/// Analytic derivative `R'(p)`, assembled from the parameter integrals and
/// their log-weighted variants.
pub fn r_derivative(p: f64, cfg: &Config) -> Result<f64> {
    if !(p > 2.0 && p <= 6.0) {
        return Err(Error::domain(format!(
            "R'(p) is defined for p in (2, 6], got {p}"
        )));
    }
    let t = (p / (p + 18.0)).sqrt();
    let tol = cfg.quad_abs_tol;
    let i0 = integral_i(&IntegralParams::with_tol(p, 0.0, tol)?)?;
    let it = integral_i(&IntegralParams::with_tol(p, t, tol)?)?;
    let log0 = integral_i_log_tol(p, 0.0, 1.0, tol)?;
    let logt = integral_i_log_tol(p, t, 1.0, tol)?;
    let dt_dp = 9.0 * (p + 18.0).sqrt() / (p.sqrt() * (p + 18.0) * (p + 18.0));
    let exponent_rate = 2.0 / ((p - 2.0) * (p - 2.0));
    let boundary = dt_dp * (18.0 / (p + 18.0)).powf((4.0 - p) / (p - 2.0));
    Ok(((-boundary - exponent_rate * logt) * i0 + exponent_rate * it * log0) / (i0 * i0))
}

/// One cell of a phase-diagram scan. Cells that fail keep their inputs and
/// carry the error message instead of a report.
#[derive(Clone, Debug, Serialize)]
pub struct PhaseDiagramRow {
    pub p: f64,
    pub q: f64,
    pub n_edges: u32,
    pub mu: f64,
    pub report: Option<ExistenceReport>,
    pub error: Option<String>,
}

/// Existence scan over the full grid `p × q × N × μ`, row-major in that
/// order. Cells run in parallel; the output order is the grid order.
pub fn phase_diagram(
    p_grid: &[f64],
    q_grid: &[f64],
    n_grid: &[u32],
    mu_grid: &[f64],
    cfg: &Config,
) -> Vec<PhaseDiagramRow> {
    let mut cells = Vec::new();
    for &p in p_grid {
        for &q in q_grid {
            for &n in n_grid {
                for &mu in mu_grid {
                    cells.push((p, q, n, mu));
                }
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(p, q, n, mu)| {
            let outcome = NonlinearParams::new(p, q).and_then(|params| {
                let topo = StarTopology::new(n)?;
                exists_ground_state(&params, topo, mu, cfg)
            });
            match outcome {
                Ok(report) => PhaseDiagramRow {
                    p,
                    q,
                    n_edges: n,
                    mu,
                    report: Some(report),
                    error: None,
                },
                Err(err) => PhaseDiagramRow {
                    p,
                    q,
                    n_edges: n,
                    mu,
                    report: None,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect()
}
