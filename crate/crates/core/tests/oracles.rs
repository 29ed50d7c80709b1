//! Independent quadrature oracles for the closed-form energy identities.
//!
//! Everything here recomputes energies the slow way: sample the profile,
//! differentiate numerically, integrate with Simpson's rule on a truncated
//! domain. None of it reuses the algebraic identities under test.

mod common;

use common::{graph_energy_oracle, simpson, truncation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use starnls::reduced::{solve_piece, SolitonPiece};
use starnls::soliton::{line_energy, omega_of_mass_line, soliton_value, NonlinearParams};
use starnls::stationary::{mass_eta, solve_stationary, StarTopology};
use starnls::Config;

fn cfg() -> Config {
    Config::default()
}

/// Line soliton energy by numeric differentiation plus Simpson quadrature.
fn line_energy_oracle(p: f64, mu: f64) -> f64 {
    let omega = omega_of_mass_line(p, mu, &cfg()).unwrap();
    let x_max = truncation(p, omega);
    let h = 1e-5 / omega.sqrt();
    let phi = |x: f64| soliton_value(p, omega, x).unwrap();
    let dphi = |x: f64| (phi(x + h) - phi(x - h)) / (2.0 * h);
    let kinetic = 2.0 * simpson(|x| dphi(x) * dphi(x), 0.0, x_max, 8000);
    let pnorm = 2.0 * simpson(|x| phi(x).powf(p), 0.0, x_max, 8000);
    0.5 * kinetic - pnorm / p
}

#[test]
fn line_energy_matches_direct_quadrature() {
    for &p in &[2.5, 3.0, 4.0, 5.0, 5.5] {
        for &mu in &[1.0, 4.0] {
            let identity = line_energy(p, mu, &cfg()).unwrap();
            let oracle = line_energy_oracle(p, mu);
            let rel = ((identity - oracle) / oracle).abs();
            assert!(
                rel <= 1e-6,
                "line energy mismatch at p={p}, mu={mu}: identity {identity}, oracle {oracle}"
            );
        }
    }
}

#[test]
fn stationary_energy_identity_matches_direct_quadrature() {
    let cases: [(f64, f64, u32, u32, f64); 3] = [
        (4.0, 3.0, 3, 0, 6.0 * (1.0 - (2.0f64 / 11.0).sqrt())),
        (4.0, 2.5, 3, 1, 5.0),
        (3.5, 3.2, 4, 0, 2.0),
    ];
    for (p, q, n, bumps, mu) in cases {
        let params = NonlinearParams::new(p, q).unwrap();
        let topo = StarTopology::new(n).unwrap();
        let state = solve_stationary(&params, topo, bumps, mu, &cfg()).unwrap();
        let oracle = graph_energy_oracle(&state);
        let rel = ((state.energy - oracle) / oracle).abs();
        assert!(
            rel <= 1e-6,
            "energy identity mismatch at ({p},{q},{n},J={bumps},mu={mu}): \
             identity {}, oracle {oracle}",
            state.energy
        );
    }
}

#[test]
fn stationary_profile_solves_the_ode() {
    // eta'' + eta^{p-1} - omega eta = 0, checked with a Richardson-extrapolated
    // second difference on samples.
    let params = NonlinearParams::new(4.0, 2.5).unwrap();
    let topo = StarTopology::new(3).unwrap();
    let state = solve_stationary(&params, topo, 1, 2.0, &cfg()).unwrap();
    let p = params.p();
    for edge in [0usize, 2] {
        let value = |x: f64| state.value_on_edge(edge, x);
        let h = 1e-3 / state.omega.sqrt();
        for k in 0..60 {
            let x = 0.05 + 0.1 * k as f64;
            let second = |hh: f64| (value(x + hh) - 2.0 * value(x) + value(x - hh)) / (hh * hh);
            let d2 = (4.0 * second(0.5 * h) - second(h)) / 3.0;
            let u = value(x);
            let residual = d2 + u.powf(p - 1.0) - state.omega * u;
            assert!(
                residual.abs() <= 1e-8 * (1.0 + state.omega * u),
                "ODE residual {residual} at x = {x} on edge {edge}"
            );
        }
    }
}

#[test]
fn sampled_mass_confirms_bump_ordering() {
    // The J = 1 state is heavier than J = 0 at equal omega; confirm both
    // masses against plain Simpson quadrature of the sampled profiles.
    let params = NonlinearParams::new(4.0, 2.5).unwrap();
    let topo = StarTopology::new(3).unwrap();
    let mut masses = Vec::new();
    for bumps in [0u32, 1] {
        let analytic = mass_eta(&params, topo, bumps, 1.0, &cfg()).unwrap();
        let mu = analytic;
        let state = solve_stationary(&params, topo, bumps, mu, &cfg()).unwrap();
        let x_max = state.shift + truncation(4.0, state.omega);
        let mut sampled = 0.0;
        for edge in 0..3 {
            let value = |x: f64| state.value_on_edge(edge, x);
            sampled += simpson(|x| value(x) * value(x), 0.0, x_max, 16000);
        }
        let rel = ((sampled - analytic) / analytic).abs();
        assert!(
            rel <= 1e-4,
            "sampled mass {sampled} vs analytic {analytic} at J = {bumps}"
        );
        masses.push(analytic);
    }
    assert!(masses[1] > masses[0]);
}

#[test]
fn solve_piece_round_trip_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for &p in &[3.0, 4.0, 5.0] {
        for _ in 0..50 {
            let omega = 10f64.powf(rng.gen_range(-1.0..1.0));
            let a = rng.gen_range(-2.5..2.5);
            let fwd = SolitonPiece::from_omega_shift(p, omega, a, &cfg()).unwrap();
            let back = solve_piece(p, fwd.mass, fwd.endpoint_value, &cfg()).unwrap();
            let rel_w = ((back.omega - omega) / omega).abs();
            assert!(
                rel_w <= 1e-8,
                "omega round-trip failed at p={p}, omega={omega}, a={a}: got {}",
                back.omega
            );
            // The forward map must also reproduce (m, h) from the recovered pair.
            let again = SolitonPiece::from_omega_shift(p, back.omega, back.shift, &cfg()).unwrap();
            let rel_m = ((again.mass - fwd.mass) / fwd.mass).abs();
            let rel_h = ((again.endpoint_value - fwd.endpoint_value) / fwd.endpoint_value).abs();
            assert!(rel_m <= 1e-8 && rel_h <= 1e-8);
        }
    }
}
