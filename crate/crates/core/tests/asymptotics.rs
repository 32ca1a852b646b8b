use gplab_core::asymptotics::*;
use gplab_core::bubble::{bubble_constants, bubble_derivative, bubble_eval};
use gplab_core::greenfn::{default_green_grid, solve_green};
use gplab_core::numkernel::{quad_radial_simpson, RadialGrid};
use gplab_core::shooting::{find_ground_state, ProblemParams, ShootingOptions, ShotSolution};
use gplab_core::{Error, RadialProfile};

/// A bubble dressed up as a solver output.
fn bubble_solution(d: u32, eps: f64, omega: f64) -> ShotSolution {
    let grid = RadialGrid::log_linear(1e-4 * eps, 400.0, 40_000, d, 1.0).unwrap();
    let r = grid.nodes().to_vec();
    let profile = RadialProfile::new(grid, r.iter().map(|&x| bubble_eval(d, eps, x)).collect(), "U").unwrap();
    ShotSolution {
        params: ProblemParams::critical(d, omega).unwrap(),
        b: bubble_eval(d, eps, 0.0),
        derivative: r.iter().map(|&x| bubble_derivative(d, eps, x)).collect(),
        profile,
        ode_residual: 0.0,
        decay_certified: true,
        r_trusted: 400.0,
        tail_constant: 0.0,
    }
}

#[test]
fn peak_inversion_recovers_bubble_scale() {
    for (d, eps) in [(3u32, 0.3), (5, 0.01), (7, 0.123), (10, 1.7)] {
        let sol = bubble_solution(d, eps, 0.0);
        let got = extract_eps(&sol).unwrap();
        assert!((got / eps - 1.0).abs() < 1e-14, "d = {d}: {got}");
        assert!((fit_eps_core(&sol).unwrap() / eps - 1.0).abs() < 1e-6);
    }
}

#[test]
fn energy_routes_agree_on_a_bubble() {
    // ω chosen so that ∫r²U² - ω∫U² = 0, leaving ∫|∇U|² = ∫U^{2*}
    let d = 7;
    let probe = bubble_solution(d, 0.2, 0.0);
    let xu: Vec<f64> = probe.profile.iter().map(|(r, u)| r * u).collect();
    let xu = RadialProfile::new(probe.profile.grid.clone(), xu, "xU").unwrap();
    let omega = quad_radial_simpson(&xu, 2.0) / quad_radial_simpson(&probe.profile, 2.0);
    let sol = bubble_solution(d, 0.2, omega);
    let e = energy_level(&sol).unwrap();
    let s = bubble_constants::<f64>(d).unwrap().sobolev_s;
    assert!(e.mismatch < 1e-6, "{e:?}");
    assert!((e.critical_norm / s - 1.0).abs() < 1e-6, "{} vs {s}", e.critical_norm);
}

#[test]
fn remainder_vanishes_on_a_bubble() {
    let sol = bubble_solution(8, 0.1, 0.0);
    let rem = remainder_norm(&sol, 0.1).unwrap();
    assert!(rem < 1e-12, "{rem}");
    assert!(remainder_norm(&sol, 0.11).unwrap() > 1e-3);
}

#[test]
fn uncertified_profiles_are_refused() {
    let mut sol = bubble_solution(7, 0.2, 0.0);
    sol.decay_certified = false;
    assert!(matches!(energy_level(&sol), Err(Error::DecayNotCertified(_))));
}

#[test]
fn d3_law_constant() {
    let green = solve_green(3, &default_green_grid(3).unwrap()).unwrap();
    let bub = bubble_constants::<f64>(3).unwrap();
    let law = target_constants(3, Some(&green), &bub).unwrap();
    assert_eq!(law.kind, LawKind::D3Linear);
    let g2 = 2.0 * std::f64::consts::PI.powf(1.5);
    let want = 3f64.powf(1.25) * g2 / (20.0 * std::f64::consts::PI);
    for w in [1.2, 1.025] {
        assert!((law.eps(w) / (w - 1.0) / want - 1.0).abs() < 1e-5);
    }
}

#[test]
fn d4_law_in_log_form() {
    let green = solve_green(4, &default_green_grid(4).unwrap()).unwrap();
    let bub = bubble_constants::<f64>(4).unwrap();
    let law = target_constants(4, Some(&green), &bub).unwrap();
    let l3 = bub.norm_l3_cubed_d4().unwrap();
    let sphere = 2.0 * std::f64::consts::PI.powi(2);
    let a = 3.0 * 2f64.sqrt() * 0.5 * l3 / (4.0 * sphere);
    for w in [0.8, 0.3] {
        assert!((w * law.eps(w).ln() + a).abs() < 1e-6 * a);
    }
    // the gap law is √2 S^{-2} H(0) ‖U‖³ ε²
    let w = 0.5;
    let gap = 2f64.sqrt() * 0.5 * l3 / bub.sobolev_s.powi(2) * law.eps(w).powi(2);
    assert!((law.energy_gap(w) / gap - 1.0).abs() < 1e-6);
}

#[test]
fn d5_needs_green_data() {
    let bub = bubble_constants::<f64>(5).unwrap();
    assert!(matches!(target_constants(5, None, &bub), Err(Error::MissingGreen { d: 5 })));
    let green = solve_green(4, &default_green_grid(4).unwrap()).unwrap();
    assert!(target_constants(5, Some(&green), &bub).is_err());
}

fn ground_samples(d: u32, omegas: &[f64]) -> Vec<AsymptoticSample> {
    let opts = ShootingOptions::default();
    omegas
        .iter()
        .map(|&w| AsymptoticSample::from_solution(&find_ground_state(d, w, &opts).unwrap(), true).unwrap())
        .collect()
}

#[test]
fn d7_trend_toward_the_law() {
    let bub = bubble_constants::<f64>(7).unwrap();
    let law = target_constants(7, None, &bub).unwrap();
    let samples = ground_samples(7, &[0.4, 0.2, 0.1, 0.05]);
    let fit = fit_law(&samples, &law).unwrap();
    assert!(fit.monotone && fit.energy_ordered && fit.eps_ordered);
    // ratios fall toward 1 from above, each step within 10%
    assert!(fit.eps_ratios.windows(2).all(|w| w[1] < w[0] && w[1] > 1.0 && w[0] / w[1] < 1.1));
    let rems: Vec<f64> = fit.samples.iter().map(|s| s.remainder.unwrap()).collect();
    assert!(rems.windows(2).all(|w| w[1] < w[0]), "{rems:?}");
    assert_eq!(fit.law_kind.name(), "d7plus_sqrt");
}

#[test]
fn d3_energy_ordering_and_core_fit() {
    let opts = ShootingOptions::default();
    let sols: Vec<ShotSolution> =
        [1.2, 1.1, 1.05].iter().map(|&w| find_ground_state(3, w, &opts).unwrap()).collect();
    let s = bubble_constants::<f64>(3).unwrap().sobolev_s;
    let energies: Vec<f64> = sols.iter().map(|x| energy_level(x).unwrap().value()).collect();
    assert!(energies.iter().all(|&e| e > 0.0 && e < s));
    assert!(energies.windows(2).all(|w| s - w[1] < s - w[0]));
    let last = sols.last().unwrap();
    let peak = extract_eps(last).unwrap();
    let core = fit_eps_core(last).unwrap();
    assert!((core / peak - 1.0).abs() < 0.05);
    let rems: Vec<f64> = sols.iter().map(|x| remainder_norm(x, extract_eps(x).unwrap()).unwrap()).collect();
    assert!(rems.windows(2).all(|w| w[1] < w[0]), "{rems:?}");
}

#[test]
fn fit_rejects_thin_sample_sets() {
    let bub = bubble_constants::<f64>(7).unwrap();
    let law = target_constants(7, None, &bub).unwrap();
    let sample = |w: f64| AsymptoticSample { omega: w, eps: law.eps(w), energy: 1.0, b: 1.0, remainder: None };
    let three: Vec<_> = [0.4, 0.2, 0.1].iter().map(|&w| sample(w)).collect();
    assert!(fit_law(&three, &law).is_err());
    let narrow: Vec<_> = [0.4, 0.3, 0.25, 0.2].iter().map(|&w| sample(w)).collect();
    assert!(fit_law(&narrow, &law).is_err());
    let exact: Vec<_> = [0.05, 0.4, 0.1, 0.2].iter().map(|&w| sample(w)).collect();
    let fit = fit_law(&exact, &law).unwrap();
    assert!(fit.relative_error < 1e-14);
    assert_eq!(fit.samples[0].omega, 0.4);
}
