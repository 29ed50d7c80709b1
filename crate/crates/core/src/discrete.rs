//! Brute-force validation on a truncated, discretized star graph.
//!
//! The energy functional is discretized with forward differences for the
//! derivative and the trapezoidal rule for the integrals; the vertex node is
//! a single shared unknown and the far ends carry homogeneous Dirichlet
//! conditions, justified by the exponential decay of every profile of
//! interest. The constrained minimizer is a projected gradient descent:
//! full gradient step, renormalize back to the mass sphere, backtrack until
//! the energy decreases. Nothing here knows about the closed-form machinery
//! in the rest of the crate, which is exactly what makes it a useful
//! cross-check.

use crate::error::{Error, Result};
use crate::soliton::{check_mass, NonlinearParams};
use crate::stationary::StationaryState;
use crate::Config;
use serde::Serialize;
use std::io::Write;

/// Geometry of the truncated star graph.
///
/// `length/dx` must be integral; each edge carries `length/dx + 1` nodes
/// counting the shared vertex node at `x = 0` and the clamped far node at
/// `x = length`. Choose `length` per experiment so that the reference decay
/// `e^{−√ω length}` is negligible against the tolerances in play.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridSpec {
    n_edges: u32,
    length: f64,
    dx: f64,
}

impl GridSpec {
    pub fn new(n_edges: u32, length: f64, dx: f64) -> Result<Self> {
        if n_edges < 2 {
            return Err(Error::domain("a star graph needs at least 2 edges"));
        }
        if !(dx > 0.0) || !(length > 0.0) {
            return Err(Error::domain(format!(
                "grid needs positive length and spacing, got L = {length}, dx = {dx}"
            )));
        }
        let intervals = length / dx;
        if (intervals - intervals.round()).abs() > 1e-9 * intervals.max(1.0) {
            return Err(Error::domain(format!(
                "length/dx = {intervals} must be an integer"
            )));
        }
        Ok(GridSpec { n_edges, length, dx })
    }

    pub fn n_edges(&self) -> u32 {
        self.n_edges
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Number of intervals per edge.
    pub fn intervals(&self) -> usize {
        (self.length / self.dx).round() as usize
    }

    /// Nodes per edge including the vertex node, `L/dx + 1`.
    pub fn nodes_per_edge(&self) -> usize {
        self.intervals() + 1
    }
}

/// A sampled function on the truncated star graph.
///
/// The vertex value is stored once and shared by all edges; `edges[e][i]`
/// holds the value at `x = (i+1)·dx` on edge `e`, the last entry being the
/// Dirichlet node at `x = L`.
#[derive(Clone, Debug)]
pub struct DiscreteField {
    grid: GridSpec,
    vertex: f64,
    edges: Vec<Vec<f64>>,
}

impl DiscreteField {
    /// Build a field from a per-edge profile `f(edge, x)`.
    ///
    /// Continuity is enforced by evaluating the vertex value once, on edge 0;
    /// the far node is clamped to zero.
    pub fn from_fn(grid: GridSpec, f: impl Fn(usize, f64) -> f64) -> Self {
        let m = grid.intervals();
        let vertex = f(0, 0.0);
        let edges = (0..grid.n_edges() as usize)
            .map(|e| {
                (1..=m)
                    .map(|i| if i == m { 0.0 } else { f(e, i as f64 * grid.dx()) })
                    .collect()
            })
            .collect();
        DiscreteField { grid, vertex, edges }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_fn(grid, |_, _| 0.0)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn vertex_value(&self) -> f64 {
        self.vertex
    }

    /// Node value at index `i` (0 is the vertex) on the given edge.
    pub fn value(&self, edge: usize, node: usize) -> f64 {
        if node == 0 {
            self.vertex
        } else {
            self.edges[edge][node - 1]
        }
    }

    /// Serialize as CSV rows `edge,node,x,value`.
    pub fn to_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "edge,node,x,value")?;
        for e in 0..self.grid.n_edges() as usize {
            for i in 0..self.grid.nodes_per_edge() {
                writeln!(
                    out,
                    "{e},{i},{:.17e},{:.17e}",
                    i as f64 * self.grid.dx(),
                    self.value(e, i)
                )?;
            }
        }
        Ok(())
    }

    fn all_finite(&self) -> bool {
        self.vertex.is_finite() && self.edges.iter().flatten().all(|v| v.is_finite())
    }
}

/// Trapezoidal mass `∫ |u|² dx` over the whole graph.
pub fn discrete_mass(field: &DiscreteField) -> f64 {
    (0..field.edges.len()).map(|e| edge_mass(field, e)).sum()
}

/// Trapezoidal mass carried by a single edge (the shared vertex node counts
/// towards every edge's own integral).
pub fn edge_mass(field: &DiscreteField, edge: usize) -> f64 {
    let dx = field.grid.dx();
    let mut prev = field.vertex;
    let mut acc = 0.0;
    for &v in &field.edges[edge] {
        acc += prev * prev + v * v;
        prev = v;
    }
    0.5 * acc * dx
}

/// Forward-difference kinetic term `∫ |u'|² dx` (not halved).
pub fn discrete_kinetic(field: &DiscreteField) -> f64 {
    let dx = field.grid.dx();
    let mut total = 0.0;
    for edge in &field.edges {
        let mut prev = field.vertex;
        let mut acc = 0.0;
        for &v in edge {
            let d = v - prev;
            acc += d * d;
            prev = v;
        }
        total += acc / dx;
    }
    total
}

/// Discretized energy `½∫|u'|² − (1/p)∫|u|^p − (1/q)|u(0)|^q`.
///
/// Second-order accurate in `dx` for smooth fields.
pub fn discrete_energy(field: &DiscreteField, params: &NonlinearParams) -> f64 {
    let (p, q) = (params.p(), params.q());
    let dx = field.grid.dx();
    let mut pterm = 0.0;
    for edge in &field.edges {
        let mut prev = field.vertex.abs().powf(p);
        let mut acc = 0.0;
        for &v in edge {
            let vp = v.abs().powf(p);
            acc += prev + vp;
            prev = vp;
        }
        pterm += 0.5 * acc * dx;
    }
    0.5 * discrete_kinetic(field) - pterm / p - field.vertex.abs().powf(q) / q
}

/// Scale a field to the exact target mass.
pub fn renormalize(field: &DiscreteField, mu: f64) -> Result<DiscreteField> {
    check_mass(mu)?;
    let mass = discrete_mass(field);
    if mass <= 0.0 {
        return Err(Error::domain(
            "cannot renormalize a field with zero mass",
        ));
    }
    let scale = (mu / mass).sqrt();
    let mut out = field.clone();
    out.vertex *= scale;
    for edge in &mut out.edges {
        for v in edge.iter_mut() {
            *v *= scale;
        }
    }
    Ok(out)
}

/// Coercivity floor from the Gagliardo-Nirenberg inequalities with the
/// (non-sharp) constant `K_p = 1`:
/// `F ≥ ½k − (1/p) μ^{(p+2)/4} k^{(p−2)/4} − (1/q) μ^{q/4} k^{q/4}`,
/// where `k = ∫|u'|²`. No discrete energy at mass `μ` may fall below it.
pub fn gn_coercivity_bound(params: &NonlinearParams, mu: f64, kinetic: f64) -> f64 {
    let (p, q) = (params.p(), params.q());
    if kinetic <= 0.0 {
        return 0.0;
    }
    0.5 * kinetic
        - mu.powf(0.25 * (p + 2.0)) * kinetic.powf(0.25 * (p - 2.0)) / p
        - mu.powf(0.25 * q) * kinetic.powf(0.25 * q) / q
}

/// Per-iteration record kept by the minimizer.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IterStat {
    pub energy: f64,
    pub kinetic: f64,
    pub mass: f64,
}

/// Options for [`minimize`].
#[derive(Clone, Copy, Debug)]
pub struct MinimizeOptions {
    pub max_iter: usize,
    /// Stop when the relative energy decrease stays below this three times in a row.
    pub tol: f64,
    pub initial_step: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_iter: 20_000,
            tol: 1e-10,
            initial_step: 1e-5,
        }
    }
}

/// Result of a constrained minimization run.
#[derive(Clone, Debug)]
pub struct MinimizeOutcome {
    pub field: DiscreteField,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<IterStat>,
}

/// Exact gradient of the discrete energy with respect to all free nodes.
///
/// Returns `(vertex_component, per-edge interior components)`; the Dirichlet
/// node at `x = L` is held at zero. Keeping the gradient exactly compatible
/// with [`discrete_energy`] is what makes the backtracking line search
/// reliable.
fn gradient(field: &DiscreteField, params: &NonlinearParams) -> (f64, Vec<Vec<f64>>) {
    let (p, q) = (params.p(), params.q());
    let dx = field.grid.dx();
    let m = field.grid.intervals();
    let mut gv = 0.0;
    let mut gedges = Vec::with_capacity(field.edges.len());
    for edge in &field.edges {
        // Kinetic part: d/du_i of sum (u_{i+1}-u_i)^2 / (2 dx).
        gv += (field.vertex - edge[0]) / dx;
        let mut g: Vec<f64> = Vec::with_capacity(m);
        for i in 0..m - 1 {
            let left = if i == 0 { field.vertex } else { edge[i - 1] };
            g.push((2.0 * edge[i] - left - edge[i + 1]) / dx);
        }
        g.push(0.0); // Dirichlet node
        // p-nonlinearity with trapezoid weights (interior dx, endpoints dx/2).
        for (i, gi) in g.iter_mut().enumerate().take(m - 1) {
            let u = edge[i];
            *gi -= u.abs().powf(p - 2.0) * u * dx;
        }
        gedges.push(g);
    }
    let v = field.vertex;
    gv -= v.abs().powf(p - 2.0) * v * (0.5 * dx) * field.edges.len() as f64;
    gv -= v.abs().powf(q - 2.0) * v;
    (gv, gedges)
}

/// Projected gradient descent under the mass constraint.
///
/// Monotone in energy by construction; non-convergence is reported through
/// the `converged` flag, never as an error.
pub fn minimize(
    params: &NonlinearParams,
    init: &DiscreteField,
    mu: f64,
    opts: &MinimizeOptions,
) -> Result<MinimizeOutcome> {
    check_mass(mu)?;
    if !init.all_finite() {
        return Err(Error::domain("initial field has non-finite values"));
    }
    if discrete_mass(init) <= 0.0 {
        return Err(Error::domain("initial field must carry positive mass"));
    }
    let mut field = renormalize(init, mu)?;
    let mut energy = discrete_energy(&field, params);
    let mut step = opts.initial_step;
    let mut trace = Vec::new();
    trace.push(IterStat {
        energy,
        kinetic: discrete_kinetic(&field),
        mass: discrete_mass(&field),
    });
    let mut quiet_streak = 0usize;
    let mut iterations = 0usize;
    let mut converged = false;

    while iterations < opts.max_iter {
        iterations += 1;
        let (gv, gedges) = gradient(&field, params);
        let mut accepted = false;
        while step > 1e-18 {
            let mut candidate = field.clone();
            candidate.vertex -= step * gv;
            for (edge, g) in candidate.edges.iter_mut().zip(&gedges) {
                for (v, gi) in edge.iter_mut().zip(g) {
                    *v -= step * gi;
                }
            }
            let candidate = renormalize(&candidate, mu)?;
            let cand_energy = discrete_energy(&candidate, params);
            if cand_energy <= energy {
                let decrease = (energy - cand_energy) / energy.abs().max(1e-300);
                field = candidate;
                energy = cand_energy;
                accepted = true;
                quiet_streak = if decrease < opts.tol { quiet_streak + 1 } else { 0 };
                break;
            }
            step *= 0.5;
        }
        trace.push(IterStat {
            energy,
            kinetic: discrete_kinetic(&field),
            mass: discrete_mass(&field),
        });
        if !accepted || quiet_streak >= 3 {
            converged = true;
            break;
        }
        step *= 1.3;
    }

    Ok(MinimizeOutcome {
        field,
        energy,
        iterations,
        converged,
        trace,
    })
}

/// Sample a solved stationary state onto a grid.
pub fn sample_state(state: &StationaryState, grid: GridSpec) -> Result<DiscreteField> {
    if grid.n_edges() != state.topology.n_edges() {
        return Err(Error::domain(format!(
            "grid has {} edges but the state lives on {}",
            grid.n_edges(),
            state.topology.n_edges()
        )));
    }
    Ok(DiscreteField::from_fn(grid, |edge, x| {
        state.value_on_edge(edge, x)
    }))
}

/// A line soliton of mass `μ` centred at `x = center` on one edge, continued
/// by its own tail on the other edges, then renormalized to mass exactly `μ`.
///
/// This is the natural "escaped to infinity" competitor: its energy is close
/// to the line level and its vertex value is exponentially small.
pub fn line_soliton_bump(
    p: f64,
    mu: f64,
    edge: usize,
    center: f64,
    grid: GridSpec,
    cfg: &Config,
) -> Result<DiscreteField> {
    if edge >= grid.n_edges() as usize {
        return Err(Error::domain(format!(
            "bump edge {edge} out of range for {} edges",
            grid.n_edges()
        )));
    }
    let omega = crate::soliton::omega_of_mass_line(p, mu, cfg)?;
    let field = DiscreteField::from_fn(grid, |e, x| {
        if e == edge {
            crate::soliton::soliton_value_unchecked(p, omega, x - center)
        } else {
            crate::soliton::soliton_value_unchecked(p, omega, x + center)
        }
    });
    renormalize(&field, mu)
}

/// Multiply every node by `1 + amplitude·ξ` with `ξ` uniform in `[−1, 1]`
/// from a deterministic xorshift stream, then renormalize to the original mass.
pub fn perturb(field: &DiscreteField, amplitude: f64, seed: u64) -> Result<DiscreteField> {
    let mass = discrete_mass(field);
    let mut state = seed.max(1);
    let mut next = || {
        // xorshift64*
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        let bits = state.wrapping_mul(0x2545_F491_4F6C_DD1D);
        (bits >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    let mut out = field.clone();
    out.vertex *= 1.0 + amplitude * next();
    let m = out.grid.intervals();
    for edge in &mut out.edges {
        for (i, v) in edge.iter_mut().enumerate() {
            if i + 1 < m {
                *v *= 1.0 + amplitude * next();
            }
        }
    }
    renormalize(&out, mass)
}

/// Mass centroid `∫ x u² / ∫ u²` over the whole graph; larger means the mass
/// sits farther from the vertex.
pub fn mass_centroid(field: &DiscreteField) -> f64 {
    let dx = field.grid.dx();
    let mut num = 0.0;
    for edge in &field.edges {
        let mut prev = 0.0; // x * u^2 at the vertex is zero
        let mut acc = 0.0;
        for (i, &v) in edge.iter().enumerate() {
            let x = (i + 1) as f64 * dx;
            let cur = x * v * v;
            acc += prev + cur;
            prev = cur;
        }
        num += 0.5 * acc * dx;
    }
    num / discrete_mass(field)
}
