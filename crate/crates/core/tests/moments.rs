use cantor_frame::frame::{assemble_kinf_truncated, compression_2x2, truncation_error_bound};
use cantor_frame::moments::{
    moments_closed, moments_operator_oracle, moments_recursive, renormalization_residual,
    renormalization_residual_with,
};
use cantor_frame::series::LaurentTail;
use cantor_frame::spectral::{eigh, SpectralData};
use num_rational::BigRational;
use proptest::prelude::*;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn rational_recursion_matches_closed_forms() {
    for p in [r(1, 2), r(1, 3), r(2, 5), r(7, 10)] {
        let seq = moments_recursive(&p, 3).unwrap();
        let (m1, m2, m3) = moments_closed(&p).unwrap();
        assert_eq!(seq.values[0], r(1, 1));
        assert_eq!(seq.values[1], m1);
        assert_eq!(seq.values[2], m2);
        assert_eq!(seq.values[3], m3);
    }
}

#[test]
fn float_recursion_matches_closed_forms() {
    for p in [0.3, 0.5, 0.61, 0.9] {
        let seq = moments_recursive(&p, 3).unwrap();
        let (m1, m2, m3) = moments_closed(&p).unwrap();
        for (got, want) in seq.values[1..].iter().zip([m1, m2, m3]) {
            assert!((got - want).abs() <= 1e-12 * want.max(1.0));
        }
        let q = p * p + (1.0 - p) * (1.0 - p);
        assert!((m1 - 1.0 / (1.0 - q)).abs() <= 1e-12);
    }
}

#[test]
fn symmetric_moments_are_powers_of_two() {
    let seq = moments_recursive(&r(1, 2), 20).unwrap();
    for (n, v) in seq.values.iter().enumerate() {
        assert_eq!(*v, BigRational::from_integer(num_bigint::BigInt::from(1u64 << n)));
    }
}

#[test]
fn recursion_within_operator_bound() {
    for p in [0.3, 0.5, 0.7] {
        let rec = moments_recursive(&p, 5).unwrap();
        let oracle = moments_operator_oracle(p, 10, 5).unwrap();
        for (n, ((v, err), mu)) in oracle.iter().zip(&rec.values).enumerate() {
            assert!((v - mu).abs() <= *err, "p={p} n={n}: {v} vs {mu} (bound {err})");
        }
    }
}

#[test]
fn hausdorff_envelope() {
    for p in [0.2, 0.3, 0.5, 0.7] {
        let k = assemble_kinf_truncated(p, 8).unwrap();
        let top = eigh(&k).unwrap().max_eigenvalue() + truncation_error_bound(p, 8).unwrap();
        let seq = moments_recursive(&p, 10).unwrap();
        for (n, mu) in seq.values.iter().enumerate() {
            assert!(*mu > 0.0);
            assert!(*mu <= top.powi(n as i32) * (1.0 + 1e-12), "p={p} n={n}");
        }
        let (_, lower) = compression_2x2(p).unwrap();
        assert!(seq.values[10].powf(0.1) <= top);
        assert!(lower <= top);
    }
}

#[test]
fn symmetric_identity_and_large_z() {
    let (res, tol) = renormalization_residual(0.5, 4.0, 25).unwrap();
    assert!(res <= 1e-12 && res <= tol);
    let sd = SpectralData::symmetric_limit(25).unwrap();
    for z in [1e3, 1e5] {
        let check = renormalization_residual_with(&sd, z).unwrap();
        assert!((check.lhs * z - 1.0).abs() < 4.0 / z);
        assert!((check.rhs * z - 1.0).abs() < 4.0 / z);
        assert!(check.holds());
    }
}

#[test]
fn identity_off_symmetry() {
    for p in [0.3, 0.65] {
        for z in [6.0, 8.0] {
            let (res, tol) = renormalization_residual(p, z, 8).unwrap();
            assert!(res <= tol, "p={p} z={z}");
        }
    }
}

#[test]
fn series_order_mismatch() {
    let a = LaurentTail::<f64>::zero(3);
    let b = LaurentTail::<f64>::zero(4);
    assert!(a.mul(&b).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_convex(p in 0.05f64..0.95) {
        let mu = moments_recursive(&p, 10).unwrap().values;
        for n in 1..=9 {
            prop_assert!(mu[n] * mu[n] <= mu[n - 1] * mu[n + 1] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn moment_zero_is_one(p in 0.01f64..0.99, n in 0usize..12) {
        let mu = moments_recursive(&p, n).unwrap().values;
        prop_assert_eq!(mu.len(), n + 1);
        prop_assert_eq!(mu[0], 1.0);
        prop_assert!(mu.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn rational_first_moment(num in 1i64..50, extra in 1i64..50) {
        let p = r(num, num + extra);
        let seq = moments_recursive(&p, 1).unwrap();
        let one = r(1, 1);
        prop_assert_eq!(seq.values[1].clone(), one.clone() / (r(2, 1) * p.clone() * (one - p)));
    }
}
