//! Shared quadrature oracles for the integration tests: sample profiles,
//! differentiate numerically, integrate with Simpson's rule. Independent of
//! the algebraic identities they validate.

use starnls::soliton::soliton_value;
use starnls::stationary::StationaryState;

/// Simpson integration of `f` over `[a, b]` with `m` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    assert!(m.is_multiple_of(2));
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Truncation point where the soliton drops below 1e-10.
pub fn truncation(p: f64, omega: f64) -> f64 {
    let mut x = 1.0 / omega.sqrt();
    while soliton_value(p, omega, x).unwrap() > 1e-10 {
        x *= 1.5;
    }
    x
}

/// Full graph energy of a stationary state by sampling, numeric
/// differentiation and Simpson quadrature.
pub fn graph_energy_oracle(state: &StationaryState) -> f64 {
    let p = state.params.p();
    let q = state.params.q();
    let omega = state.omega;
    let x_max = state.shift + truncation(p, omega);
    let h = 1e-5 / omega.sqrt();
    let mut kinetic = 0.0;
    let mut pnorm = 0.0;
    for edge in 0..state.topology.n_edges() as usize {
        let value = |x: f64| state.value_on_edge(edge, x);
        let dvalue = |x: f64| {
            if x >= h {
                (value(x + h) - value(x - h)) / (2.0 * h)
            } else {
                (value(x + h) - value(x)) / h
            }
        };
        kinetic += simpson(|x| dvalue(x) * dvalue(x), 0.0, x_max, 16000);
        pnorm += simpson(|x| value(x).powf(p), 0.0, x_max, 16000);
    }
    0.5 * kinetic - pnorm / p - state.vertex_value.powf(q) / q
}
