use gplab_core::numkernel::{quad_radial, RadialGrid};
use gplab_core::shooting::*;
use gplab_core::{Error, RadialProfile};
use proptest::prelude::*;

fn opts() -> ShootingOptions {
    ShootingOptions::default()
}

fn is_positive_decreasing(p: &RadialProfile) -> bool {
    p.values.iter().all(|&v| v > 0.0) && p.values.windows(2).all(|w| w[1] < w[0])
}

/// `(‖u‖_X² - ω‖u‖², ‖u‖_{2*}^{2*})` for a profile with its derivative.
fn energy_pair(sol: &ShotSolution) -> (f64, f64) {
    let d = sol.params.d;
    let grid = sol.profile.grid.clone();
    let du = RadialProfile::new(grid.clone(), sol.derivative.clone(), "du").unwrap();
    let xu = RadialProfile::from_fn(grid.clone(), "xu", |r| r).unwrap();
    let xu_vals: Vec<f64> = xu.values.iter().zip(&sol.profile.values).map(|(r, u)| r * u).collect();
    let xu = RadialProfile::new(grid, xu_vals, "xu").unwrap();
    let grad = quad_radial(&du, 2.0);
    let moment = quad_radial(&xu, 2.0);
    let mass = quad_radial(&sol.profile, 2.0);
    let crit = 2.0 * f64::from(d) / (f64::from(d) - 2.0);
    (grad + moment - sol.params.omega * mass, quad_radial(&sol.profile, crit))
}

#[test]
fn linear_gaussian_mode() {
    let grid = RadialGrid::log_uniform(1e-7, 6.0, 3000, 3).unwrap();
    for d in [3u32, 5, 8] {
        let grid = grid.with_dim(d);
        let res = integrate_ivp(ProblemParams::linear(d, f64::from(d)), 1.0, &grid, 1e-13).unwrap();
        assert_eq!(res.event, ShotEvent::ReachedEnd);
        let worst = res
            .profile
            .iter()
            .map(|(r, u)| (u - (-r * r / 2.0).exp()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "d = {d}: {worst}");
    }
}

#[test]
fn small_and_large_amplitudes_fall_in_different_classes() {
    let grid = RadialGrid::log_uniform(1e-7, 12.0, 2000, 5).unwrap();
    let params = ProblemParams::critical(5, 2.0).unwrap();
    let small = integrate_ivp(params, 1.0, &grid, 1e-12).unwrap();
    let large = integrate_ivp(params, 1e3, &grid, 1e-12).unwrap();
    assert_ne!(small.event.crosses(), large.event.crosses());
    assert!(small.event.crosses().is_some() && large.event.crosses().is_some());
}

#[test]
fn ground_state_d5() {
    let sol = find_ground_state(5, 2.0, &opts()).unwrap();
    assert!(sol.b > 0.0);
    assert!(sol.decay_certified);
    assert!(sol.ode_residual <= 1e-7, "{}", sol.ode_residual);
    assert!(is_positive_decreasing(&sol.profile));
}

#[test]
fn ground_states_in_each_regime() {
    for (d, w) in [(3u32, 1.2), (4, 0.5), (6, 0.1), (7, 0.4)] {
        let sol = find_ground_state(d, w, &opts()).unwrap();
        assert!(sol.decay_certified, "d = {d}");
        assert!(sol.ode_residual <= 1e-7, "d = {d}: {}", sol.ode_residual);
        assert!(is_positive_decreasing(&sol.profile), "d = {d}");
        let (lhs, rhs) = energy_pair(&sol);
        assert!(((lhs - rhs) / rhs).abs() < 1e-5, "d = {d}: {lhs} vs {rhs}");
    }
}

#[test]
fn nonexistence_outside_the_window() {
    for (d, w) in [(5u32, 5.5), (3, 0.5), (5, -1.0), (4, 4.0)] {
        match find_ground_state(d, w, &opts()) {
            Err(Error::NoSolution { .. }) => {}
            other => panic!("d = {d}, ω = {w}: {:?}", other.map(|s| s.b)),
        }
    }
}

#[test]
fn amplitude_falls_toward_the_linear_limit() {
    let bs: Vec<f64> = [4.0, 4.4, 4.8]
        .iter()
        .map(|&w| find_ground_state(5, w, &opts()).unwrap().b)
        .collect();
    assert!(bs[0] > bs[1] && bs[1] > bs[2], "{bs:?}");
}

#[test]
fn omega_b_window_d13() {
    let w = omega_b_only(13, 10.0, &opts()).unwrap();
    assert!(w > 9.0 && w < 13.0, "{w}");
    let sol = find_omega_b(13, 10.0, &opts()).unwrap();
    assert!((sol.params.omega - w).abs() < 1e-10);
    assert!(sol.decay_certified);
    assert!(sol.ode_residual <= 1e-7);
    assert!(is_positive_decreasing(&sol.profile));
}

#[test]
fn singular_solution_invariants_d13() {
    let s = find_singular(13, 1e-4, &opts()).unwrap();
    assert!(s.omega_inf > 9.0 && s.omega_inf < 13.0);
    assert!((s.inner_constant - 10f64.sqrt()).abs() < 1e-15);
    assert!(s.decay_certified);
    assert!(s.ode_residual <= 1e-7, "{}", s.ode_residual);
    let f: Vec<f64> = s.profile.iter().map(|(r, u)| r * u).collect();
    assert!(f[0] <= s.inner_constant);
    assert!((f[0] - s.inner_constant).abs() < 1e-6);
    assert!(f.windows(2).all(|w| w[1] < w[0]));
    assert!(s.profile.iter().all(|(r, u)| u < s.inner_constant / r));

    let half = omega_inf_only(13, 5e-5, &opts()).unwrap();
    assert!((half - s.omega_inf).abs() < 1e-6);

    let near = (omega_b_only(13, 1e3, &opts()).unwrap() - s.omega_inf).abs();
    let far = (omega_b_only(13, 10.0, &opts()).unwrap() - s.omega_inf).abs();
    assert!(near < far);
}

#[test]
fn omega_b_oscillates_for_d8_and_not_d16() {
    let bs = [10.0, 1e2, 1e3, 1e4];
    let w8 = omega_inf_only(8, 1e-4, &opts()).unwrap();
    let dev8: Vec<f64> = sweep_b(8, &bs, &opts()).into_iter().map(|p| p.omega_b.unwrap() - w8).collect();
    assert!(dev8.windows(2).any(|w| w[0] * w[1] < 0.0), "{dev8:?}");

    let w16 = omega_inf_only(16, 1e-4, &opts()).unwrap();
    let dev16: Vec<f64> = sweep_b(16, &bs[..3], &opts())
        .into_iter()
        .map(|p| (p.omega_b.unwrap() - w16).abs())
        .collect();
    assert!(dev16.windows(2).all(|w| w[1] < w[0]), "{dev16:?}");
}

#[test]
fn sweep_keeps_order_and_flags_failures() {
    let pts = sweep_b(8, &[100.0, -1.0, 10.0], &opts());
    assert_eq!(pts.iter().map(|p| p.b).collect::<Vec<_>>(), vec![100.0, -1.0, 10.0]);
    assert!(pts[0].omega_b.is_ok() && pts[2].omega_b.is_ok());
    assert!(pts[1].omega_b.is_err());
}

#[test]
fn rejected_inputs() {
    assert!(matches!(find_omega_b(4, 10.0, &opts()), Err(Error::Dimension { .. })));
    assert!(find_singular(13, 0.5, &opts()).is_err());
    assert!(ProblemParams::critical(2, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn energy_routes_agree(d in 4u32..=7, frac in 0.15f64..0.85) {
        let w = d as f64 * frac;
        let sol = find_ground_state(d, w, &opts()).unwrap();
        prop_assert!(sol.decay_certified);
        let (lhs, rhs) = energy_pair(&sol);
        prop_assert!(((lhs - rhs) / rhs).abs() < 1e-5, "d = {}, ω = {}: {} vs {}", d, w, lhs, rhs);
    }
}
