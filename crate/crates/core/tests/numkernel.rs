use gplab_core::numkernel::power_integral;
use gplab_core::Error;
use proptest::prelude::*;

/// `∫_0^∞ r^a (1+r²)^{-b} dr` by double-exponential quadrature after r = t/(1-t).
fn by_quadrature(a: f64, b: f64) -> f64 {
    let f = |t: f64| {
        let s = 1.0 - t;
        if s <= 0.0 || t <= 0.0 {
            return 0.0;
        }
        let r = t / s;
        r.powf(a) * (1.0 + r * r).powf(-b) / (s * s)
    };
    let rough = quadrature::double_exponential::integrate(f, 0.0, 1.0, 1e-10).integral;
    quadrature::double_exponential::integrate(f, 0.0, 1.0, 1e-15 * rough).integral
}

#[test]
fn divergent_pairs_are_flagged() {
    for (a, b) in [(-1.0, 2.0), (-3.0, 5.0), (2.0, 1.5), (4.0, 1.0)] {
        assert!(matches!(power_integral(a, b), Err(Error::Divergent(_))), "({a}, {b})");
    }
}

proptest! {
    #[test]
    fn beta_form_matches_quadrature(a in 0.0f64..20.0, gap in 0.5f64..10.0) {
        let b = (a + 1.0) / 2.0 + gap;
        let exact = power_integral(a, b).unwrap();
        let quad = by_quadrature(a, b);
        prop_assert!(((exact - quad) / exact).abs() < 1e-10, "a={a} b={b}: {exact} vs {quad}");
    }
}
