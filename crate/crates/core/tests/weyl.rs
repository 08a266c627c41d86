use heisenfan::fan::{CellRule, FanGrid, FanPoint};
use heisenfan::field::*;
use heisenfan::specfun::{hermite_functions, laguerre_functions_upto};
use heisenfan::twisted::laguerre_field;
use heisenfan::weyl::*;
use heisenfan::C64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn trunc(m: usize) -> HermiteTruncation {
    HermiteTruncation::new(m).unwrap()
}

fn desk() -> GridSpec {
    GridSpec::desk()
}

/// Holds phi_k for k <= 4 at |lambda| = 1 without truncation.
fn big() -> GridSpec {
    GridSpec::new(12.0, 96).unwrap()
}

fn off_centre(cx: f64, cy: f64) -> ZProfile {
    ZProfile::Gaussian { sigma: 1.0, cx, cy }
}

/// Plain trapezoid in xi of `e^{i lambda (x xi + x y / 2)} Phi_beta(xi + y) Phi_alpha(xi)`.
fn element_by_trapezoid(lambda: f64, x: f64, y: f64, alpha: usize, beta: usize) -> C64 {
    let s = lambda.abs().sqrt();
    let phi = |k: usize, xi: f64| lambda.abs().powf(0.25) * hermite_functions(k + 1, s * xi)[k];
    let (lo, hi, count) = (-30.0, 30.0, 24_001);
    let h = (hi - lo) / (count - 1) as f64;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..count {
        let xi = lo + h * i as f64;
        acc += C64::from_polar(phi(beta, xi + y) * phi(alpha, xi), lambda * (x * xi + 0.5 * x * y));
    }
    acc * h
}

#[test]
fn truncation_must_be_positive() {
    assert!(HermiteTruncation::new(0).is_err());
    assert_eq!(HermiteTruncation::default().m(), 32);
}

#[test]
fn identity_at_the_origin() {
    let p = pi_matrix(0.8, 0.0, 0.0, 12).unwrap();
    for a in 0..12 {
        for b in 0..12 {
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((p.get(a, b) - want).norm() < 1e-12, "{a} {b}");
        }
    }
    assert!(pi_matrix_element(0.0, 1.0, 1.0, 0, 0).is_err());
}

#[test]
fn elements_match_direct_quadrature() {
    for (lambda, x, y) in [(1.0, 0.7, -0.4), (-0.6, -1.3, 0.9), (2.5, 0.2, 1.1)] {
        for (a, b) in [(0, 0), (3, 1), (2, 5), (7, 7)] {
            let got = pi_matrix_element(lambda, x, y, a, b).unwrap();
            let want = element_by_trapezoid(lambda, x, y, a, b);
            assert!((got - want).norm() < 1e-10, "l={lambda} z=({x},{y}) ({a},{b}): {got} vs {want}");
        }
    }
}

#[test]
fn columns_are_unit_vectors() {
    let p = pi_matrix(1.3, 0.7, -0.4, 70).unwrap();
    for beta in 0..=6 {
        let s: f64 = (0..70).map(|a| p.get(a, beta).norm_sqr()).sum();
        assert!((s - 1.0).abs() < 1e-8, "beta={beta}: {s}");
    }
}

#[test]
fn diagonal_is_the_laguerre_function() {
    for lambda in [1.0, -0.7] {
        let (x, y) = (0.9, -1.2);
        let p = pi_matrix(lambda, x, y, 8).unwrap();
        let phis = laguerre_functions_upto(7, 1, lambda, x.hypot(y));
        for k in 0..8 {
            assert!((p.get(k, k) - phis[k]).norm() < 1e-8, "k={k}: {} vs {}", p.get(k, k), phis[k]);
        }
    }
}

#[test]
fn low_quadrature_order_warns() {
    let (_, w) = pi_matrix_with_order(1.0, 3.0, 0.5, 16, 8).unwrap();
    assert!(w.is_some());
    let (_, w) = pi_matrix_with_order(1.0, 3.0, 0.5, 16, quadrature_order(16, 1.0, 3.0)).unwrap();
    assert!(w.is_none());
}

#[test]
fn sections_are_contractions() {
    for (lambda, x, y) in [(1.0, 0.5, 0.5), (-2.0, 1.5, -0.3), (0.4, -3.0, 2.0)] {
        let p = pi_matrix(lambda, x, y, 32).unwrap();
        assert!(p.operator_norm() <= 1.0 + 1e-6, "{}", p.operator_norm());
    }
}

#[test]
fn ground_state_goes_to_rank_one() {
    let lambda = 1.0;
    let w = weyl_transform(&laguerre_field(big(), 0, lambda), lambda, trunc(32)).unwrap();
    let want = WeylMatrix::projection(32, lambda, 0).unwrap().scale(C64::new(2.0 * PI / lambda, 0.0));
    let err = w.sub(&want).unwrap().hs_norm();
    assert!(err < 1e-5, "{err}");
    let z = weyl_transform(&ZField::zeros(desk()), lambda, trunc(8)).unwrap();
    assert_eq!(z.hs_norm(), 0.0);
}

#[test]
fn weyl_plancherel_on_gaussians() {
    let g = off_centre(0.4, -0.2).sample(desk());
    let norm2 = l2_norm_z(&g).powi(2);
    for lambda in [1.0, -0.5] {
        let mut errs = vec![];
        for m in [8, 16, 32] {
            let w = weyl_transform(&g, lambda, trunc(m)).unwrap();
            errs.push(((w.hs_norm().powi(2) * lambda.abs() - 2.0 * PI * norm2) / (2.0 * PI * norm2)).abs());
        }
        eprintln!("lambda={lambda} plancherel errors by M: {errs:?}");
        assert!(errs[2] <= 1e-3);
        assert!(errs[1] < errs[0] && errs[2] <= errs[1]);
    }
}

#[test]
fn heat_kernel_is_diagonal() {
    let b = 0.5;
    for lambda in [1.0, -1.5] {
        let w = group_fourier(&HField::HeatKernel { b }, lambda, trunc(16), desk()).unwrap();
        for a in 0..16 {
            for c in 0..16 {
                let want = if a == c { (-b * (2 * a + 1) as f64 * lambda.abs()).exp() } else { 0.0 };
                assert!((w.get(a, c) - want).norm() < 1e-4, "({a},{c}) {}", w.get(a, c));
            }
        }
    }
}

#[test]
fn group_fourier_composes() {
    let f = HField::Separable { u: off_centre(0.3, 0.1), v: CentralProfile::Gaussian { sigma: 1.0, shift: 0.5 } };
    let lambda = 0.75;
    let direct = weyl_transform(&central_transform(&f, lambda, desk()).unwrap(), lambda, trunc(12)).unwrap();
    let via = group_fourier(&f, lambda, trunc(12), desk()).unwrap();
    assert_eq!(direct, via);
    assert_eq!(group_fourier(&HField::zero(), lambda, trunc(4), desk()).unwrap().hs_norm(), 0.0);
}

#[test]
fn projection_identity() {
    let g = off_centre(0.5, -0.3).sample(big());
    for lambda in [1.0, -1.0] {
        for k in 0..=4 {
            let r = projection_identity_residual(&g, lambda, k, trunc(32)).unwrap();
            assert!(r <= 1e-3, "l={lambda} k={k}: {r}");
        }
    }
    assert_eq!(projection_identity_residual(&ZField::zeros(desk()), 1.0, 1, trunc(8)).unwrap(), 0.0);
    assert!(projection_identity_residual(&g, 1.0, 8, trunc(8)).is_err());
}

#[test]
fn projection_of_other_laguerre_functions_vanishes() {
    let lambda = 1.5;
    let g = laguerre_field(desk(), 2, lambda);
    let c = heisenfan::twisted::twisted_conv(&g, &laguerre_field(desk(), 1, lambda), lambda).unwrap();
    let lhs = weyl_transform(&c, lambda, trunc(16)).unwrap().hs_norm() * lambda / (2.0 * PI);
    let rhs = weyl_transform(&g, lambda, trunc(16)).unwrap().column_block(1).unwrap().hs_norm();
    assert!(lhs < 1e-5 && rhs < 1e-5, "{lhs} {rhs}");
}

#[test]
fn twisted_convolution_becomes_a_product() {
    let f = off_centre(0.5, 0.0).sample(desk());
    let g = off_centre(-0.2, 0.6).sample(desk());
    for lambda in [1.0, -0.75] {
        let r = product_residual(&f, &g, lambda, trunc(32)).unwrap();
        assert!(r <= 1e-3, "l={lambda}: {r}");
    }
}

#[test]
fn slice_norms_match_the_matrix_column() {
    let f = HField::gaussian(1.0, 1.0);
    for (k, lambda) in [(0, 1.0), (2, -1.0), (3, 1.5)] {
        let s = hs_slice_relation(&f, &FanPoint::ray(k, lambda, 1).unwrap(), trunc(32), desk()).unwrap();
        assert!((s.lhs - s.rhs).abs() <= 1e-2 * s.lhs, "k={k} l={lambda}: {s:?}");
        assert!((s.lhs - s.rhs_mirror).abs() <= 1e-2 * s.lhs, "k={k} l={lambda}: {s:?}");
    }
    let zero = hs_slice_relation(&HField::zero(), &FanPoint::ray(1, 1.0, 1).unwrap(), trunc(8), desk()).unwrap();
    assert_eq!((zero.lhs, zero.rhs), (0.0, 0.0));
    assert!(hs_slice_relation(&f, &FanPoint::limit(1.0, 1).unwrap(), trunc(8), desk()).is_err());
}

#[test]
fn single_laguerre_content_lives_in_one_column() {
    let lambda = 1.0;
    let f = HField::Separable {
        u: ZProfile::Laguerre { k: 2, lambda },
        v: CentralProfile::Gaussian { sigma: 1.0, shift: 0.0 },
    };
    let grid = GridSpec::new(12.0, 96).unwrap();
    let on = hs_slice_relation(&f, &FanPoint::ray(2, lambda, 1).unwrap(), trunc(16), grid).unwrap();
    for k in [0, 1, 3, 5] {
        let off = hs_slice_relation(&f, &FanPoint::ray(k, lambda, 1).unwrap(), trunc(16), grid).unwrap();
        assert!(off.rhs <= 1e-5 * on.rhs, "k={k}: {off:?} vs {on:?}");
    }
}

#[test]
fn slice_carries_the_mirrored_operator() {
    // z e^{-|z|^2/2} is complex: fhat(lambda) and fhat(-lambda) have different columns
    let f = HField::Separable {
        u: ZProfile::Harmonic { p: 1, q: 0, sigma: 1.0 },
        v: CentralProfile::Gaussian { sigma: 1.0, shift: 0.0 },
    };
    let s = hs_slice_relation(&f, &FanPoint::ray(1, 1.0, 1).unwrap(), trunc(32), desk()).unwrap();
    assert!((s.lhs - s.rhs_mirror).abs() <= 1e-3 * s.lhs, "{s:?}");
    assert!((s.lhs - s.rhs).abs() > 0.1 * s.lhs, "{s:?}");
}

#[test]
fn parseval_polarization() {
    let f = HField::gaussian(1.0, 1.0);
    let g = HField::Separable { u: off_centre(0.5, -0.25), v: CentralProfile::Gaussian { sigma: 1.0, shift: 0.3 } };
    let fan = FanGrid::uniform(1, 0.0, 3.0, 12, 0, vec![], CellRule::default()).unwrap();
    let spectral = parseval_pairing(&f, &g, &fan, trunc(24), desk()).unwrap();
    // <u_f, u_g> <v_f, v_g>: Gaussians in closed form
    let uz = PI * (-(0.5f64.powi(2) + 0.25f64.powi(2)) / 4.0).exp();
    let vt = PI.sqrt() * (-0.3f64.powi(2) / 4.0).exp();
    let direct = uz * vt;
    let err = (spectral - direct).norm() / direct;
    eprintln!("parseval pairing {spectral} vs {direct}: {err:e}");
    assert!(err <= 1e-2);
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let w = pi_matrix(0.5, 0.3, -0.2, 4).unwrap();
    w.write_csv(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("row,col,re,im\n0,0,"));
    let back = WeylMatrix::read_csv(&path).unwrap();
    assert_eq!(back, w);
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("w.json")).unwrap()).unwrap();
    assert_eq!(side["m"], 4);
    assert_eq!(side["lambda"], 0.5);
}

#[test]
fn tail_mass_monitors_truncation() {
    let g = off_centre(0.0, 0.0).sample(desk());
    let small = weyl_transform(&g, 0.25, trunc(6)).unwrap().tail_mass();
    let large = weyl_transform(&g, 0.25, trunc(32)).unwrap().tail_mass();
    assert!(large < small && large < 1e-6, "{small} {large}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn truncated_columns_never_exceed_unit_norm(lambda in -3.0f64..3.0, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        prop_assume!(lambda.abs() > 0.05);
        let p = pi_matrix(lambda, x, y, 12).unwrap();
        for beta in 0..12 {
            let s: f64 = (0..12).map(|a| p.get(a, beta).norm_sqr()).sum();
            prop_assert!(s <= 1.0 + 1e-9);
        }
    }
}
