use proptest::prelude::*;
use triprod::quadrature::{
    integrate, integrate_1d, integrate_endpoint_singular, reg_power_integral, Domain, Locus, QuadOptions, RegOptions,
    SingularityPlan,
};
use triprod::{Complex64, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pow_abs(t: f64, s: Complex64) -> Complex64 {
    (s * t.abs().ln()).exp()
}

fn gauss(t: f64) -> Complex64 {
    c((-t * t).exp(), 0.0)
}

// ∫_{-R}^{R} |t|^s φ(t) dt by plain quadrature with the endpoint substitution
fn direct<F: Fn(f64) -> Complex64>(s: Complex64, phi: F, r: f64) -> Complex64 {
    let o = QuadOptions::abs(1e-13);
    let right = integrate_endpoint_singular(|p| pow_abs(p.from_a, s) * phi(p.x), 0.0, r, Some(s), None, &o);
    let left = integrate_endpoint_singular(|p| pow_abs(p.to_b, s) * phi(p.x), -r, 0.0, None, Some(s), &o);
    right.value + left.value
}

fn smooth_step(x: f64) -> f64 {
    let psi = |y: f64| if y > 0.0 { (-1.0 / y).exp() } else { 0.0 };
    psi(x) / (psi(x) + psi(1.0 - x))
}

// 1 on [-1, 1], smoothly down to 0 at |t| = 2
fn plateau(t: f64) -> Complex64 {
    c(smooth_step(2.0 - t.abs()), 0.0)
}

#[test]
fn gaussian_moments_match_gamma() {
    // continuation of ∫ |t|^s e^{-t²} dt = Γ((s+1)/2), frozen from mpmath
    let cases = [
        (c(-0.5, 0.0), c(3.625_609_908_221_908_3, 0.0)),
        (c(0.7, 0.0), c(1.112_483_736_948_465_3, 0.0)),
        (c(-1.5, 0.0), c(-4.901_666_809_860_710_6, 0.0)),
        (c(-2.5, 0.0), c(-4.834_146_544_295_877_7, 0.0)),
        (c(-3.5, 0.0), c(3.921_333_447_888_568_5, 0.0)),
        (c(-2.5, 1.0), c(-1.280_377_022_667_340_9, 0.889_516_553_730_873_2)),
        (c(0.3, -2.0), c(0.384_455_887_904_584_9, 0.345_891_521_976_040_5)),
    ];
    for (s, want) in cases {
        let r = reg_power_integral(s, gauss, 8.0, &RegOptions::default()).unwrap();
        assert!((r.value - want).norm() <= 1e-8 * want.norm(), "s = {s}: {} vs {want}", r.value);
    }
}

#[test]
fn odd_parity_gaussian_moments() {
    // ∫ |t|^s sgn(t) t e^{-t²} dt = Γ((s+2)/2)
    let cases = [
        (c(-2.5, 0.0), c(-4.901_666_809_860_710_6, 0.0)),
        (c(-1.7, 0.4), c(1.975_695_979_412_255_6, -3.049_980_844_673_268_5)),
    ];
    let opts = RegOptions::default().with_parity(1);
    for (s, want) in cases {
        let r = reg_power_integral(s, |t| gauss(t) * t, 8.0, &opts).unwrap();
        assert!((r.value - want).norm() <= 1e-8 * want.norm(), "s = {s}: {} vs {want}", r.value);
    }
}

#[test]
fn plateau_case_uses_the_closed_form() {
    let s = c(-1.5, 0.0);
    let tail = integrate_1d(|t| pow_abs(t, s) * plateau(t), 1.0, 2.0, &QuadOptions::abs(1e-14));
    let want = 2.0 / (s + 1.0) + tail.value * 2.0;
    assert!((2.0 / (s + 1.0) - c(-4.0, 0.0)).norm() < 1e-15);
    let r = reg_power_integral(s, plateau, 2.0, &RegOptions::default()).unwrap();
    assert!((r.value - want).norm() <= 1e-8 * want.norm(), "{} vs {want}", r.value);
}

#[test]
fn integer_pole_is_reported() {
    let r = reg_power_integral(c(-1.0, 0.0), plateau, 2.0, &RegOptions::default());
    assert!(matches!(r, Err(Error::RegularizationPole { j: 0, .. })));
    let r = reg_power_integral(c(-3.0, 0.0), gauss, 8.0, &RegOptions::default());
    assert!(matches!(r, Err(Error::RegularizationPole { j: 2, .. })));
}

#[test]
fn integrable_diagonal_in_two_dimensions() {
    // ∫_0^1 ∫_0^1 |x - y|^{-1/2} dx dy = 8/3
    let s = c(-0.5, 0.0);
    let dom = Domain::new(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
    let plan = SingularityPlan::new().with(Locus::Diagonal(0, 1), s);
    let r = integrate(|p| pow_abs(p[0] - p[1], s), &dom, Some(&plan), &QuadOptions::abs(1e-11)).unwrap();
    assert!((r.value - c(8.0 / 3.0, 0.0)).norm() < 1e-9, "{}", r.value);
}

#[test]
fn oscillatory_integral_with_frequency_hint() {
    // ∫_0^{10} e^{i 40 t} dt
    let w = 40.0;
    let want = (c(0.0, w * 10.0).exp() - 1.0) / c(0.0, w);
    let r = integrate_1d(|t| c(0.0, w * t).exp(), 0.0, 10.0, &QuadOptions::abs(1e-12).with_freq(w));
    assert!(r.converged);
    assert!((r.value - want).norm() < 1e-11);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn matches_direct_quadrature_above_minus_one(
        sre in -0.9f64..1.5,
        sim in -3.0f64..3.0,
        shift in -0.5f64..0.5,
        width in 0.5f64..2.0,
    ) {
        let s = c(sre, sim);
        let phi = |t: f64| c((-(t - shift) * (t - shift) / width).exp(), 0.0) * c(1.0, 0.3 * t);
        let r = reg_power_integral(s, phi, 9.0, &RegOptions::default().with_tol(1e-12)).unwrap();
        let d = direct(s, phi, 9.0);
        prop_assert!((r.value - d).norm() <= 1e-8 * d.norm(), "{} vs {}", r.value, d);
    }

    #[test]
    fn continuation_is_smooth_across_minus_one(x in -1.5f64..-0.5, y in 0.2f64..1.0) {
        // second differences of an analytic function are O(h²)
        let h = 0.02;
        let f = |s: Complex64| reg_power_integral(s, plateau, 2.0, &RegOptions::default().with_tol(1e-12)).unwrap().value;
        let s = c(x, y);
        let d2 = f(s + h) - f(s) * 2.0 + f(s - h);
        let scale = f(s).norm().max(1.0) / (y * y * y);
        prop_assert!(d2.norm() <= 20.0 * h * h * scale, "{d2} at {s}");
    }
}
