mod common;

use std::sync::Arc;

use approx::assert_abs_diff_eq;
use nalgebra::{Matrix2, Vector2};
use proptest::prelude::*;
use rectiform::{Christoffel, SurfacePatch};

/// Christoffel symbols by solving the Gram system
/// `[E F; F G] [G1_ij; G2_ij] = [phi_ij . phi_u; phi_ij . phi_v]`.
fn gram_oracle(patch: &SurfacePatch, u: f64, v: f64) -> [f64; 6] {
    let j = patch.jet(u, v).unwrap();
    let gram = Matrix2::new(j.pu.dot(&j.pu), j.pu.dot(&j.pv), j.pu.dot(&j.pv), j.pv.dot(&j.pv));
    let inv = gram.try_inverse().unwrap();
    let solve = |x: &rectiform::Vec3| inv * Vector2::new(x.dot(&j.pu), x.dot(&j.pv));
    let (a, b, c) = (solve(&j.puu), solve(&j.puv), solve(&j.pvv));
    [a[0], a[1], b[0], b[1], c[0], c[1]]
}

fn fixtures() -> Vec<(&'static str, Arc<SurfacePatch>)> {
    vec![
        ("plane", common::plane()),
        ("sphere", common::sphere()),
        ("cylinder", common::cylinder()),
        ("cone", common::cone()),
        ("skew", common::skew()),
    ]
}

fn unit_point() -> impl Strategy<Value = (f64, f64)> {
    (0.0..1.0f64, 0.0..1.0f64)
}

fn at(patch: &SurfacePatch, (a, b): (f64, f64)) -> (f64, f64) {
    let d = patch.domain();
    (d.u[0] + a * (d.u[1] - d.u[0]), d.v[0] + b * (d.v[1] - d.v[0]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn christoffel_matches_gram_oracle(p in unit_point()) {
        for (name, patch) in fixtures() {
            let (u, v) = at(&patch, p);
            let got = patch.christoffel(u, v).unwrap().to_array();
            let want = gram_oracle(&patch, u, v);
            for k in 0..6 {
                prop_assert!((got[k] - want[k]).abs() < 1e-9, "{name} {} at ({u}, {v}): {} vs {}",
                    Christoffel::NAMES[k], got[k], want[k]);
            }
        }
    }

    #[test]
    fn second_derivative_dot_products(p in unit_point()) {
        for (_, patch) in fixtures() {
            let (u, v) = at(&patch, p);
            let j = patch.jet(u, v).unwrap();
            let [eu, ev, fu, fv, gu, gv] = patch.metric(u, v).unwrap().first_derivatives();
            let pairs = [
                (j.puu.dot(&j.pu), eu / 2.0),
                (j.puu.dot(&j.pv), fu - ev / 2.0),
                (j.puv.dot(&j.pu), ev / 2.0),
                (j.puv.dot(&j.pv), gu / 2.0),
                (j.pvv.dot(&j.pv), gv / 2.0),
                (j.pvv.dot(&j.pu), fv - gu / 2.0),
            ];
            for (x, y) in pairs {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unit_normal_is_orthonormal(p in unit_point()) {
        for (_, patch) in fixtures() {
            let (u, v) = at(&patch, p);
            let j = patch.jet(u, v).unwrap();
            let n = patch.fundamental_forms(u, v).unwrap().unit_normal();
            prop_assert!((n.norm() - 1.0).abs() < 1e-14);
            prop_assert!(n.dot(&j.pu).abs() < 1e-13);
            prop_assert!(n.dot(&j.pv).abs() < 1e-13);
            prop_assert!(j.pu.cross(&j.pv).dot(&n) > 0.0);
        }
    }

    #[test]
    fn printed_christoffel_agrees_when_orthogonal(p in unit_point()) {
        for (name, patch) in fixtures() {
            if name == "skew" {
                continue;
            }
            let (u, v) = at(&patch, p);
            let m = patch.metric(u, v).unwrap();
            let d = Christoffel::from_metric(&m).max_abs_diff(&Christoffel::from_metric_as_printed(&m));
            prop_assert!(d < 1e-14);
        }
    }
}

#[test]
fn printed_christoffel_differs_on_skew_patch() {
    let patch = common::skew();
    let m = patch.metric(0.4, -0.3).unwrap();
    let printed = Christoffel::from_metric_as_printed(&m).to_array();
    let oracle = gram_oracle(&patch, 0.4, -0.3);
    assert!((printed[1] - oracle[1]).abs() > 1e-3 || (printed[5] - oracle[5]).abs() > 1e-3);
}

#[test]
fn sphere_forms_by_hand() {
    let f = common::sphere().fundamental_forms(0.5, 0.2).unwrap();
    assert_abs_diff_eq!(f.e, 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(f.f, 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(f.g, 0.5f64.cos().powi(2), epsilon = 1e-15);
    assert_abs_diff_eq!(f.l.abs(), 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(f.n.abs(), 0.5f64.cos().powi(2), epsilon = 1e-14);
}
