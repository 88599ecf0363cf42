mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rectiform::theorems::{check_geodesic_curvature, check_normal_component, CheckSpec};
use rectiform::{AmbientMap, Classification, ConformalPair, PairOptions, PairSpec, SurfacePatch, TheoremId};

fn patch_pair(source: Arc<SurfacePatch>, image: SurfacePatch) -> ConformalPair {
    ConformalPair::build(source, PairSpec::Patch(Arc::new(image)), PairOptions::default()).unwrap()
}

fn ambient_pair(source: Arc<SurfacePatch>, x: &str, y: &str, z: &str) -> ConformalPair {
    let map = AmbientMap::parse(x, y, z).unwrap();
    ConformalPair::build(source, PairSpec::Ambient(map), PairOptions::default()).unwrap()
}

/// Holomorphic maps of the plane, as (real part, imaginary part) over a
/// square avoiding their critical points.
const HOLOMORPHIC: [(&str, &str, [f64; 2], [f64; 2]); 5] = [
    ("exp(u)*cos(v)", "exp(u)*sin(v)", [-1.0, 1.0], [-1.0, 1.0]),
    ("u^2-v^2", "2*u*v", [0.5, 1.5], [-1.0, 1.0]),
    ("sin(u)*(exp(v)+exp(-v))/2", "cos(u)*(exp(v)-exp(-v))/2", [-1.0, 1.0], [0.3, 1.2]),
    ("u^3-3*u*v^2", "3*u^2*v-v^3", [0.5, 1.5], [-0.5, 0.5]),
    ("u/(u^2+v^2)", "-v/(u^2+v^2)", [0.5, 1.5], [-1.0, 1.0]),
];

fn plane_fixtures() -> Vec<ConformalPair> {
    HOLOMORPHIC
        .iter()
        .map(|(p, q, du, dv)| {
            let plane = Arc::new(SurfacePatch::parse("u", "v", "0", *du, *dv).unwrap());
            patch_pair(plane, SurfacePatch::parse(p, q, "0", *du, *dv).unwrap())
        })
        .collect()
}

fn mercator_pair() -> ConformalPair {
    ConformalPair::build(common::sphere(), PairSpec::Patch(common::mercator()), PairOptions::default()).unwrap()
}

#[test]
fn barred_christoffel_law_on_grids() {
    let mut pairs = plane_fixtures();
    pairs.push(mercator_pair());
    for pair in &pairs {
        assert_eq!(pair.classification(), Classification::Conformal);
        for (u, v) in pair.source().domain().grid(20) {
            let b = pair.barred_christoffel(u, v).unwrap();
            assert!(b.residual < 1e-7, "residual {:e} at ({u}, {v})", b.residual);
        }
    }
}

#[test]
fn corrections_vanish_iff_dilation_is_constant() {
    let constant = [
        ambient_pair(common::sphere(), "2*x", "2*y", "2*z"),
        ambient_pair(common::cone(), "x", "y", "z"),
        ambient_pair(common::cone(), "-y", "x", "z"),
    ];
    for pair in &constant {
        assert!(pair.classification().is_homothetic());
        for (u, v) in pair.source().domain().grid(9) {
            assert!(pair.epsilon_corrections(u, v).unwrap().max_abs() < 1e-12);
        }
    }
    let mut varying = plane_fixtures();
    varying.push(mercator_pair());
    for pair in &varying {
        assert!(pair.classification().constant().is_none());
        let worst = pair
            .source()
            .domain()
            .grid(9)
            .into_iter()
            .map(|(u, v)| pair.epsilon_corrections(u, v).unwrap().max_abs())
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }
}

#[test]
fn classification_is_nested() {
    let iso = ambient_pair(common::sphere(), "y", "-x", "z").classification();
    let homo = ambient_pair(common::sphere(), "3*x", "3*y", "3*z").classification();
    let conf = mercator_pair().classification();
    assert!(iso.is_isometric() && iso.is_homothetic());
    assert!(!homo.is_isometric() && homo.is_homothetic());
    assert!(!conf.is_isometric() && !conf.is_homothetic());
    assert_eq!(homo.constant(), Some(3.0));
}

#[test]
fn ambient_metric_paths_agree() {
    let pair = ambient_pair(common::plane(), "exp(x)*cos(y)", "exp(x)*sin(y)", "z");
    for (u, v) in pair.source().domain().grid(7) {
        assert!(pair.ambient_metric_consistency(u, v).unwrap() < 1e-8);
    }
}

#[test]
fn shear_is_rejected() {
    let map = AmbientMap::parse("x", "y", "z+x").unwrap();
    let err = ConformalPair::build(common::cone(), PairSpec::Ambient(map), PairOptions::default()).unwrap_err();
    assert!(matches!(err, rectiform::Error::NotConformal { .. }));
}

#[test]
fn constant_dilation_invariants() {
    for (c, pair) in [
        (1.0, ambient_pair(common::cone(), "-y", "x", "z")),
        (2.0, ambient_pair(common::cone(), "2*x", "2*y", "2*z")),
    ] {
        let curve = common::sec_curve();
        let spec = CheckSpec::new(TheoremId::NormalComponent, "p", Some("c"));
        let reports = check_normal_component(&pair, &curve, &spec).unwrap();
        assert!(reports[0].details["h_max_abs"] < 1e-9);
        assert!(reports[1].residual_max < 1e-9, "c = {c}");
        let reports = check_geodesic_curvature(&pair, &curve, &spec).unwrap();
        assert!(reports[1].residual_max < 1e-9, "c = {c}");
        for (u, v) in pair.source().domain().grid(5) {
            let b = pair.barred_christoffel(u, v).unwrap();
            let src = pair.source().christoffel(u, v).unwrap();
            assert!(b.direct.max_abs_diff(&src) < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_rule_matches_direct_metric_derivatives(a in 0.0..1.0f64, b in 0.0..1.0f64, k in 0usize..5) {
        let pair = &plane_fixtures()[k];
        let d = pair.source().domain();
        let (u, v) = (d.u[0] + a * (d.u[1] - d.u[0]), d.v[0] + b * (d.v[1] - d.v[0]));
        let md = pair.metric_coefficient_derivatives(u, v).unwrap();
        let scale = md.direct.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        prop_assert!(md.product_rule_residual < 1e-9 * scale);
    }
}
