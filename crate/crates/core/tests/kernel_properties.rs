use pearcey_core::kernels::{
    airy_ai, airy_ai_prime, airy_ai_prime_zeros, airy_ai_zeros, find_zeros, phi4, phi4_derivative,
    phi4_moment, phi4_series, phi4_zeros, AI0,
};
use pearcey_core::quadrature::QuadratureSpec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn phi4_is_even(x in 0.0f64..12.0) {
        prop_assert!((phi4(x).unwrap() - phi4(-x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn series_agrees_with_quadrature(x in -4.0f64..4.0) {
        let q = phi4(x).unwrap();
        let s = phi4_series(x, 80).unwrap();
        prop_assert!((q - s).abs() < 1e-9, "x={x}: {q} vs {s}");
    }

    #[test]
    fn recurrence_agrees_with_moment_quadrature(x in -4.0f64..4.0, j in 3usize..=6) {
        let spec = QuadratureSpec::default().with_density(12.0);
        let moment = phi4_moment(x, j, &spec).unwrap();
        let rec = phi4_derivative(x, j).unwrap();
        prop_assert!((moment - rec).abs() < 1e-8, "j={j}, x={x}: {moment} vs {rec}");
    }
}

#[test]
fn first_zero_of_phi4_matches_published_value() {
    let z = phi4_zeros(3).unwrap();
    assert!((z.values[0] - 2.44197).abs() < 1e-4, "{:?}", z.values);
    assert!(phi4(2.44197).unwrap().abs() < 1e-5);
    assert!(phi4(-2.44197).unwrap().abs() < 1e-5);
    assert!(phi4_series(2.44197, 60).unwrap().abs() < 1e-6);
}

#[test]
fn zero_lists_are_separated_and_straddle_sign_changes() {
    type Target = fn(f64) -> f64;
    let checks: Vec<(pearcey_core::kernels::ZeroList, Target)> = vec![
        (phi4_zeros(6).unwrap(), |x| phi4(x).unwrap()),
        (airy_ai_zeros(6).unwrap(), airy_ai),
        (airy_ai_prime_zeros(6).unwrap(), airy_ai_prime),
    ];
    for (zeros, f) in checks {
        let tol = zeros.achieved_tolerance;
        for w in zeros.values.windows(2) {
            assert!((w[1] - w[0]).abs() > 10.0 * tol);
        }
        for &z in &zeros.values {
            let (a, b) = (f(z - tol), f(z + tol));
            assert!(
                a.signum() != b.signum() || a == 0.0 || b == 0.0,
                "zero {z}: {a:e} {b:e}"
            );
        }
    }
}

#[test]
fn published_airy_zeros() {
    assert!(airy_ai(-2.33811).abs() < 1e-5);
    assert!(airy_ai_prime(-1.01879).abs() < 1e-5);
    assert!((airy_ai(0.0) - AI0).abs() < 1e-15);
    // 3^{-2/3}/Γ(2/3)
    assert!((AI0 - 0.355_028_053_887_817_2).abs() < 1e-15);
    assert!((airy_ai_zeros(1).unwrap().values[0] + 2.33811).abs() < 1e-4);
    assert!((airy_ai_prime_zeros(1).unwrap().values[0] + 1.01879).abs() < 1e-4);
}

#[test]
fn quadratic_has_root_at_one() {
    let z = find_zeros(|x| Ok(x * x - 1.0), (0.0, 3.0), 1, 1e-12).unwrap();
    assert!((z.values[0] - 1.0).abs() < 1e-12);
}
