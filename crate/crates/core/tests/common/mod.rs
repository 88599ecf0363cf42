#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use rectiform::{CurveOnSurface, CurveOptions, ParamCurve, SurfacePatch};

pub fn plane() -> Arc<SurfacePatch> {
    Arc::new(SurfacePatch::parse("u", "v", "0", [-1.0, 1.0], [-1.0, 1.0]).unwrap())
}

pub fn sphere() -> Arc<SurfacePatch> {
    Arc::new(SurfacePatch::parse("cos(u)*cos(v)", "cos(u)*sin(v)", "sin(u)", [-1.2, 1.2], [-PI, PI]).unwrap())
}

pub fn cylinder() -> Arc<SurfacePatch> {
    Arc::new(SurfacePatch::parse("cos(v)", "sin(v)", "u", [-2.0, 2.0], [-PI, PI]).unwrap())
}

pub fn mercator() -> Arc<SurfacePatch> {
    Arc::new(SurfacePatch::parse("cos(v)", "sin(v)", "log(sec(u)+tan(u))", [-1.2, 1.2], [-PI, PI]).unwrap())
}

pub fn cone() -> Arc<SurfacePatch> {
    Arc::new(SurfacePatch::parse("u*cos(v)", "u*sin(v)", "u", [0.5, 3.0], [-PI, PI]).unwrap())
}

/// A patch with `F != 0` everywhere.
pub fn skew() -> Arc<SurfacePatch> {
    Arc::new(SurfacePatch::parse("u+v/2", "v+u*v/3", "sin(u)*cos(v)", [-1.0, 1.0], [-1.0, 1.0]).unwrap())
}

pub fn on(patch: &Arc<SurfacePatch>, u: &str, v: &str, range: [f64; 2]) -> CurveOnSurface {
    let c = ParamCurve::parse(u, v, range).unwrap();
    CurveOnSurface::reparameterize(patch.clone(), c, CurveOptions::default()).unwrap()
}

pub fn cone_geodesic() -> CurveOnSurface {
    on(&cone(), "sec(t/sqrt(2))", "t", [-1.0, 1.0])
}

pub fn sec_curve() -> CurveOnSurface {
    on(&cone(), "sec(t)/sqrt(2)", "sqrt(2)*t", [-0.5, 0.5])
}

pub fn latitude() -> CurveOnSurface {
    on(&sphere(), "pi/6", "t", [-1.0, 1.0])
}

/// Fixture curves with nonvanishing curvature, one per surface family.
pub fn fixture_curves() -> Vec<(&'static str, CurveOnSurface)> {
    vec![
        ("latitude", latitude()),
        ("sphere_wave", on(&sphere(), "0.4*sin(t)", "t", [-2.0, 2.0])),
        ("helix", on(&cylinder(), "t", "t", [-1.5, 1.5])),
        ("cone_geodesic", cone_geodesic()),
        ("sec_curve", sec_curve()),
        ("skew_arc", on(&skew(), "0.6*cos(t)", "0.5*sin(t)", [0.2, 2.8])),
        ("plane_spiral", on(&plane(), "0.2*exp(t/3)*cos(t)", "0.2*exp(t/3)*sin(t)", [0.0, 4.0])),
    ]
}
