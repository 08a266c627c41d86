use heisenfan::fan::FanPoint;
use heisenfan::field::*;
use heisenfan::hecke::*;
use heisenfan::C64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn gauss() -> HField {
    HField::gaussian(1.0, 1.0)
}

/// Large enough to hold phi_k for k <= 6 at |lambda| >= 0.5 around a unit Gaussian.
fn big() -> GridSpec {
    GridSpec::new(12.0, 96).unwrap()
}

fn deg(p: usize, q: usize) -> HarmonicDegree {
    HarmonicDegree::new(p, q).unwrap()
}

fn harmonic(p: usize, q: usize) -> HField {
    HField::Separable { u: ZProfile::Harmonic { p, q, sigma: 1.0 }, v: CentralProfile::Gaussian { sigma: 1.0, shift: 0.0 } }
}

#[test]
fn degrees_must_be_harmonic() {
    assert!(HarmonicDegree::new(1, 1).is_err());
    assert_eq!(deg(2, 0).frequency(), 2);
    assert_eq!(deg(0, 3).swapped(), deg(3, 0));
}

#[test]
fn circle_coefficients_of_simple_functions() {
    let grid = big();
    let radial = ZProfile::Gaussian { sigma: 1.0, cx: 0.0, cy: 0.0 }.sample(grid);
    let zg = ZProfile::Harmonic { p: 1, q: 0, sigma: 1.0 }.sample(grid);
    for r in [0.3f64, 1.0, 2.2] {
        let g0 = (-r * r / 2.0).exp();
        assert!(circle_coefficient(&radial, deg(1, 0), r).unwrap().norm() < 1e-12);
        assert!(circle_coefficient(&radial, deg(0, 2), r).unwrap().norm() < 1e-12);
        assert!((circle_coefficient(&radial, deg(0, 0), r).unwrap() - g0).norm() < 1e-8);
        assert!((circle_coefficient(&zg, deg(1, 0), r).unwrap() - r * g0).norm() < 1e-8);
        assert!(circle_coefficient(&zg, deg(0, 1), r).unwrap().norm() < 1e-12);
    }
    assert!(circle_coefficient(&radial, deg(0, 0), 11.9).is_err());
    let f = harmonic(1, 0);
    let v = circle_coefficient_at(&f, deg(1, 0), 1.0, 0.5, grid).unwrap();
    assert!((v - (-0.5f64).exp() * (-0.125f64).exp()).norm() < 1e-8);
}

#[test]
fn fan_shift_examples() {
    let a = FanPoint::ray(2, 1.0, 1).unwrap();
    match a_shift(&a, deg(1, 0)).unwrap() {
        Shifted::Point(b) => {
            assert_eq!(b.n(), 2);
            assert!((heisenfan::fan::tau_of(&b) - 6.0).abs() < 1e-15);
        }
        Shifted::Annihilated => panic!(),
    }
    assert_eq!(a_shift(&a, deg(0, 0)).unwrap(), Shifted::Point(a));
    assert_eq!(a_shift(&FanPoint::ray(0, 1.0, 1).unwrap(), deg(0, 1)).unwrap(), Shifted::Annihilated);
    assert_eq!(
        a_shift(&FanPoint::ray(0, -1.0, 1).unwrap(), deg(1, 0)).unwrap(),
        Shifted::Point(FanPoint::Ray { k: 0, lambda: -1.0, n: 2 })
    );
    assert!(a_shift(&FanPoint::limit(1.0, 1).unwrap(), deg(1, 0)).is_err());
}

#[test]
fn dimension_shift_identity() {
    let grid = big();
    let mut worst: f64 = 0.0;
    for (p, q) in [(1, 0), (0, 1), (2, 0)] {
        for lambda in [-1.0, -0.5, 0.5, 1.0] {
            for k in 0..=6 {
                let c = hecke_bochner_residual(&gauss(), deg(p, q), k, lambda, grid).unwrap();
                let drop = if lambda > 0.0 { p } else { q };
                if k < drop {
                    assert!(c.rhs_norm == 0.0 && c.lhs_norm <= 1e-3 * c.f_norm, "({p},{q}) k={k} l={lambda}: {c:?}");
                } else {
                    worst = worst.max(c.residual);
                    assert!(c.residual <= 1e-2, "({p},{q}) k={k} l={lambda}: {c:?}");
                }
            }
        }
    }
    eprintln!("worst dimension-shift residual {worst:e}");
}

#[test]
fn trivial_degree_reduces_to_the_radial_factorization() {
    let grid = big();
    let c = hecke_bochner_residual(&gauss(), deg(0, 0), 2, 1.0, grid).unwrap();
    let r = heisenfan::gelfand::radial_factorization_residual(&gauss(), &FanPoint::ray(2, -1.0, 1).unwrap(), grid).unwrap();
    assert!(c.residual <= 1e-4 && r <= 1e-4, "{c:?} {r}");
}

#[test]
fn coefficient_theorem_on_z_times_gaussian() {
    let grid = big();
    let radii = [0.5, 1.0, 1.5, 2.5];
    for lambda in [1.0, -1.0, 0.5] {
        for k in 0..=3 {
            let a = FanPoint::ray(k, lambda, 1).unwrap();
            let c = coefficient_theorem_residual(&harmonic(1, 0), deg(1, 0), &a, &radii, grid).unwrap();
            if c.rhs_norm == 0.0 {
                assert!(c.lhs_norm <= 1e-6 * c.f_norm, "k={k} l={lambda}: {c:?}");
            } else {
                assert!(c.residual <= 1e-2, "k={k} l={lambda}: {c:?}");
            }
        }
    }
    // radial input has no (1,0) component on either side
    let c = coefficient_theorem_residual(&gauss(), deg(1, 0), &FanPoint::ray(1, 1.0, 1).unwrap(), &radii, grid).unwrap();
    assert!(c.lhs_norm <= 1e-10 * c.f_norm && c.rhs_norm <= 1e-10 * c.f_norm, "{c:?}");
}

#[test]
fn coefficient_theorem_needs_even_t_dependence() {
    // the slice carries f^{-lambda} while the right side pairs with f^{lambda}
    let grid = big();
    let shifted = HField::Separable {
        u: ZProfile::Harmonic { p: 1, q: 0, sigma: 1.0 },
        v: CentralProfile::Gaussian { sigma: 1.0, shift: 0.8 },
    };
    let c = coefficient_theorem_residual(&shifted, deg(1, 0), &FanPoint::ray(1, 1.0, 1).unwrap(), &[0.5, 1.0, 2.0], grid).unwrap();
    // |1 - e^{-2i lambda shift}| = 2 sin(0.8)
    assert!((c.residual - 2.0 * 0.8f64.sin()).abs() < 1e-2, "{c:?}");
}

#[test]
fn negative_lambda_mirrors_under_conjugation() {
    let grid = big();
    let radii = [0.5, 1.2, 2.0];
    for k in 0..=3 {
        let a = FanPoint::ray(k, 1.0, 1).unwrap();
        let b = FanPoint::ray(k, -1.0, 1).unwrap();
        let r1 = coefficient_theorem_residual(&harmonic(1, 0), deg(1, 0), &a, &radii, grid).unwrap();
        let r2 = coefficient_theorem_residual(&harmonic(0, 1), deg(0, 1), &b, &radii, grid).unwrap();
        assert!((r1.residual - r2.residual).abs() <= 1e-10, "k={k}: {r1:?} {r2:?}");
        assert!((r1.lhs_norm - r2.lhs_norm).abs() <= 1e-10 * (1.0 + r1.lhs_norm));
    }
}

#[test]
fn slices_of_radial_functions_carry_only_degree_zero() {
    let grid = big();
    let f = gauss();
    for (k, lambda) in [(0, 1.0), (2, -0.75), (4, 1.5)] {
        let fl = central_transform(&f, -lambda, grid).unwrap();
        let s = heisenfan::twisted::twisted_conv(&fl, &heisenfan::twisted::laguerre_field(grid, k, lambda), -lambda).unwrap();
        for r in [0.5, 1.5, 3.0] {
            let all = circle_coefficients(&s, &(-4..=4).collect::<Vec<_>>(), r).unwrap();
            let scale = all[4].norm().max(s.max_abs() * 1e-3);
            for (i, c) in all.iter().enumerate() {
                if i != 4 {
                    assert!(c.norm() <= 1e-6 * scale, "k={k} r={r} m={}: {c}", i as i64 - 4);
                }
            }
        }
    }
}

#[test]
fn off_centre_gaussian_is_rebuilt_from_few_harmonics() {
    let grid = big();
    let u = ZProfile::Gaussian { sigma: 1.0, cx: 0.3, cy: -0.1 };
    let g = u.sample(grid);
    let thetas: Vec<f64> = (0..17).map(|i| 2.0 * PI * i as f64 / 17.0).collect();
    for r in [0.5, 1.5, 3.0] {
        let rebuilt = harmonic_reconstruction(&g, 8, r, &thetas).unwrap();
        for (th, v) in thetas.iter().zip(&rebuilt) {
            let truth = u.eval(r * th.cos(), r * th.sin());
            assert!((v - truth).norm() <= 1e-6, "r={r} th={th}: {v} vs {truth}");
        }
    }
}

#[test]
fn residual_table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    write_hecke_csv(&path, &[HeckeRow { p: 1, q: 0, k: 2, lambda: -0.5, residual: 1e-3 }]).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "p,q,k,lambda,residual\n1,0,2,-5e-1,1e-3\n");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_preserves_tau_formula(k in 0usize..40, p in 0usize..4, lambda in -3.0f64..3.0) {
        prop_assume!(lambda.abs() > 1e-3);
        let d = deg(p, 0);
        for dd in [d, d.swapped()] {
            let a = FanPoint::ray(k, lambda, 1).unwrap();
            if let Shifted::Point(b) = a_shift(&a, dd).unwrap() {
                let tau = (2 * k + dd.p + 1) as f64 - dd.q as f64;
                prop_assert!((heisenfan::fan::tau_of(&b) - tau * lambda.abs()).abs() < 1e-12 * (1.0 + tau));
                prop_assert_eq!(b.lambda(), lambda);
            }
        }
        let _ = C64::new(0.0, 0.0);
    }
}
