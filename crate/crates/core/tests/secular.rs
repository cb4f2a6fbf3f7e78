use cantor_frame::frame::{compression_2x2, Operator};
use cantor_frame::secular::{
    secular_value, simplicity_report, solve_top_eigenvalue, solve_top_eigenvalue_with,
};
use cantor_frame::spectral::{eigh, limit_spectral_data, SpectralData};
use cantor_frame::{Error, Provenance, SymMatrix};
use faer::Mat;

#[test]
fn symmetric_root_is_two() {
    for depth in [4, 12, 20, 30] {
        let s = solve_top_eigenvalue(0.5, depth, 1e-12).unwrap();
        assert!((s.lambda_star - 2.0).abs() <= 1e-8, "M={depth}");
    }
    let sd = SpectralData::symmetric_limit(20).unwrap();
    // m(z) = 1/(z-2): 2/(4-2) - 1 = 0 at λ = 2
    let (v, r) = secular_value(2.0, &sd, 0.5).unwrap();
    assert!(v.abs() <= 1e-12 + r);
}

#[test]
fn two_routes_agree() {
    for p in [0.3, 0.4, 0.6, 0.7] {
        let sd = limit_spectral_data(p, 9).unwrap();
        let s = solve_top_eigenvalue_with(&sd, 1e-10).unwrap();
        assert!(
            (s.lambda_star - s.direct_lambda).abs() <= s.combined_tolerance + 1e-8,
            "p={p}"
        );
        assert!(s.lambda_star > p.max(1.0 - p) * s.direct_lambda);
        let (_, lower) = compression_2x2(p).unwrap();
        assert!(s.lambda_star >= lower - s.combined_tolerance);
        assert!(simplicity_report(&sd).certified_simple);
    }
}

#[test]
fn reflection_symmetry() {
    let a = solve_top_eigenvalue(0.35, 8, 1e-12).unwrap();
    let b = solve_top_eigenvalue(0.65, 8, 1e-12).unwrap();
    assert!((a.lambda_star - b.lambda_star).abs() <= 1e-9);
    assert!((a.direct_lambda - b.direct_lambda).abs() <= 1e-9);
}

#[test]
fn monotone_refinement() {
    for p in [0.3, 0.6] {
        let a = solve_top_eigenvalue(p, 6, 1e-12).unwrap();
        let b = solve_top_eigenvalue(p, 8, 1e-12).unwrap();
        assert!(
            (a.lambda_star - b.lambda_star).abs() <= a.combined_tolerance + b.combined_tolerance
        );
    }
}

#[test]
fn secular_is_decreasing() {
    let sd = limit_spectral_data(0.4, 7).unwrap();
    let lo = 0.6 * sd.certified_spectral_radius() + 1e-4;
    let values: Vec<f64> = (0..200)
        .map(|i| secular_value(lo + i as f64 * 0.01, &sd, 0.4).unwrap().0)
        .collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    assert!((secular_value(1e9, &sd, 0.4).unwrap().0 + 1.0).abs() < 1e-8);
}

#[test]
fn bracket_failure_on_inflated_tail() {
    let k = SymMatrix::new(Mat::identity(1, 1), 0, 0.5, Provenance::ClosedForm)
        .unwrap()
        .with_operator(Operator::Other, Some(100.0));
    let sd = eigh(&k).unwrap();
    assert!(matches!(
        solve_top_eigenvalue_with(&sd, 1e-10),
        Err(Error::BracketFailure { .. })
    ));
}
