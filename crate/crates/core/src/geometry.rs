//! Parametric surface patches and their local invariants.
//!
//! Orientation follows the chart order: the unit normal is
//! `(phi_u x phi_v) / W`, and every signed quantity (second fundamental form,
//! normal and geodesic curvature) inherits that choice.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Jet3};
use crate::Vec3;

/// Default lower bound on `EG - F^2` below which a point counts as degenerate.
pub const DEFAULT_W_MIN: f64 = 1e-10;

const DOMAIN_SLACK: f64 = 1e-9;

/// Rectangular parameter domain `[u0, u1] x [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

impl Domain {
    pub fn new(u: [f64; 2], v: [f64; 2]) -> Result<Domain> {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
        if !ok(u) || !ok(v) {
            return Err(Error::Invalid(format!("invalid domain {u:?} x {v:?}")));
        }
        Ok(Domain { u, v })
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u[0] - DOMAIN_SLACK
            && u <= self.u[1] + DOMAIN_SLACK
            && v >= self.v[0] - DOMAIN_SLACK
            && v <= self.v[1] + DOMAIN_SLACK
    }

    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.u[0] + self.u[1]),
            0.5 * (self.v[0] + self.v[1]),
        )
    }

    /// `n x n` grid including the boundary, row-major in `u`.
    pub fn grid(&self, n: usize) -> Vec<(f64, f64)> {
        let n = n.max(2);
        let lerp = |r: [f64; 2], k: usize| r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (lerp(self.u, i), lerp(self.v, j))))
            .collect()
    }
}

/// Position and partial derivatives of a patch at one chart point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet {
    pub p: Vec3,
    pub pu: Vec3,
    pub pv: Vec3,
    pub puu: Vec3,
    pub puv: Vec3,
    pub pvv: Vec3,
    pub puuu: Vec3,
    pub puuv: Vec3,
    pub puvv: Vec3,
    pub pvvv: Vec3,
}

impl SurfaceJet {
    pub fn from_components(c: &[Jet3; 3]) -> SurfaceJet {
        let pick = |i: usize, j: usize| Vec3::new(c[0].partial(i, j), c[1].partial(i, j), c[2].partial(i, j));
        SurfaceJet {
            p: pick(0, 0),
            pu: pick(1, 0),
            pv: pick(0, 1),
            puu: pick(2, 0),
            puv: pick(1, 1),
            pvv: pick(0, 2),
            puuu: pick(3, 0),
            puuv: pick(2, 1),
            puvv: pick(1, 2),
            pvvv: pick(0, 3),
        }
    }

    pub fn normal_unnormalized(&self) -> Vec3 {
        self.pu.cross(&self.pv)
    }
}

/// First fundamental form coefficients with their jets, so that `E_u`, `E_v`,
/// ... are exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    pub e: Jet3,
    pub f: Jet3,
    pub g: Jet3,
}

impl Metric {
    pub fn from_components(c: &[Jet3; 3]) -> Metric {
        let du: Vec<Jet3> = c.iter().map(|j| j.derivative(0)).collect();
        let dv: Vec<Jet3> = c.iter().map(|j| j.derivative(1)).collect();
        let dot = |a: &[Jet3], b: &[Jet3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        Metric {
            e: dot(&du, &du),
            f: dot(&du, &dv),
            g: dot(&dv, &dv),
        }
    }

    pub fn w2(&self) -> f64 {
        self.e.value() * self.g.value() - self.f.value() * self.f.value()
    }

    pub fn scaled(&self, k: f64) -> Metric {
        Metric {
            e: self.e.scale(k),
            f: self.f.scale(k),
            g: self.g.scale(k),
        }
    }

    /// `[E_u, E_v, F_u, F_v, G_u, G_v]`.
    pub fn first_derivatives(&self) -> [f64; 6] {
        [
            self.e.du(),
            self.e.dv(),
            self.f.du(),
            self.f.dv(),
            self.g.du(),
            self.g.dv(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FundamentalForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    /// Area element `sqrt(EG - F^2)`.
    pub w: f64,
    pub normal: [f64; 3],
}

impl FundamentalForms {
    pub fn unit_normal(&self) -> Vec3 {
        Vec3::from(self.normal)
    }

    pub fn w2(&self) -> f64 {
        self.w * self.w
    }
}

/// Christoffel symbols of the second kind. Field `gK_IJ` holds the symbol with
/// upper index `K` and lower indices `I, J`; `IJ = 12` also stands for `21`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Christoffel {
    pub g1_11: f64,
    pub g2_11: f64,
    pub g1_12: f64,
    pub g2_12: f64,
    pub g1_22: f64,
    pub g2_22: f64,
}

impl Christoffel {
    pub const NAMES: [&'static str; 6] = ["G1_11", "G2_11", "G1_12", "G2_12", "G1_22", "G2_22"];

    pub fn from_array(a: [f64; 6]) -> Christoffel {
        Christoffel {
            g1_11: a[0],
            g2_11: a[1],
            g1_12: a[2],
            g2_12: a[3],
            g1_22: a[4],
            g2_22: a[5],
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.g1_11, self.g2_11, self.g1_12, self.g2_12, self.g1_22, self.g2_22,
        ]
    }

    /// Symbols from the metric and its first derivatives.
    pub fn from_metric(m: &Metric) -> Christoffel {
        let (e, f, g) = (m.e.value(), m.f.value(), m.g.value());
        let [eu, ev, fu, fv, gu, gv] = m.first_derivatives();
        let d = 2.0 * (e * g - f * f);
        Christoffel {
            g1_11: (g * eu + f * (ev - 2.0 * fu)) / d,
            g2_11: (e * (2.0 * fu - ev) - f * eu) / d,
            g1_12: (g * ev - f * gu) / d,
            g2_12: (e * gu - f * ev) / d,
            g1_22: (g * (2.0 * fv - gu) - f * gv) / d,
            g2_22: (e * gv + f * (gu - 2.0 * fv)) / d,
        }
    }

    /// The symbols exactly as tabulated in the source material, whose
    /// `G2_11` carries `F E_v` where [`from_metric`](Self::from_metric) has
    /// `F E_u`, and whose `G2_22` carries `F G_v` in place of `F G_u`. The
    /// two agree whenever `F = 0`.
    pub fn from_metric_as_printed(m: &Metric) -> Christoffel {
        let (e, f, g) = (m.e.value(), m.f.value(), m.g.value());
        let [eu, ev, fu, fv, gu, gv] = m.first_derivatives();
        let d = 2.0 * (e * g - f * f);
        Christoffel {
            g1_11: (g * eu + f * (ev - 2.0 * fu)) / d,
            g2_11: (e * (2.0 * fu - ev) - f * ev) / d,
            g1_12: (g * ev - f * gu) / d,
            g2_12: (e * gu - f * ev) / d,
            g1_22: (g * (2.0 * fv - gu) - f * gv) / d,
            g2_22: (e * gv + f * (gv - 2.0 * fv)) / d,
        }
    }

    pub fn offset(&self, delta: [f64; 6]) -> Christoffel {
        let mut a = self.to_array();
        a.iter_mut().zip(delta).for_each(|(x, d)| *x += d);
        Christoffel::from_array(a)
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Second-form coefficients of a Monge patch `(u, v, f(u, v))`, in two variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MongeForms {
    /// `f_uu / W^2`, `f_uv / W^2`, `f_vv / W^2`: the variant that divides by `W^2`.
    pub paper: [f64; 3],
    /// `f_uu / W`, `f_uv / W`, `f_vv / W`: the textbook second fundamental form.
    pub classical: [f64; 3],
    /// `paper - classical`.
    pub difference: [f64; 3],
    /// `1 + f_u^2 + f_v^2`.
    pub w2: f64,
}

/// A parametric immersion `phi(u, v) = (x, y, z)` over a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePatch {
    components: [Expr; 3],
    domain: Domain,
    w_min: f64,
}

impl SurfacePatch {
    pub fn new(x: Expr, y: Expr, z: Expr, domain: Domain) -> Result<SurfacePatch> {
        for c in [&x, &y, &z] {
            if c.vars() != ["u", "v"] {
                return Err(Error::Invalid(format!(
                    "patch components must be expressions in (u, v), got variables {:?}",
                    c.vars()
                )));
            }
        }
        Ok(SurfacePatch {
            components: [x, y, z],
            domain,
            w_min: DEFAULT_W_MIN,
        })
    }

    pub fn parse(x: &str, y: &str, z: &str, u: [f64; 2], v: [f64; 2]) -> Result<SurfacePatch> {
        let p = |s: &str| Expr::parse(s, &["u", "v"]);
        SurfacePatch::new(p(x)?, p(y)?, p(z)?, Domain::new(u, v)?)
    }

    pub fn with_w_min(mut self, w_min: f64) -> SurfacePatch {
        self.w_min = w_min;
        self
    }

    pub fn components(&self) -> &[Expr; 3] {
        &self.components
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn w_min(&self) -> f64 {
        self.w_min
    }

    /// True when the patch reads `(u, v, f(u, v))` structurally.
    pub fn is_monge(&self) -> bool {
        self.components[0].is_var(0) && self.components[1].is_var(1)
    }

    fn check_domain(&self, u: f64, v: f64) -> Result<()> {
        if !self.domain.contains(u, v) {
            return Err(Error::OutOfDomain { u, v });
        }
        Ok(())
    }

    pub fn position(&self, u: f64, v: f64) -> Result<Vec3> {
        self.check_domain(u, v)?;
        let mut p = Vec3::zeros();
        for (k, c) in self.components.iter().enumerate() {
            p[k] = c.eval(&[u, v])?;
        }
        Ok(p)
    }

    pub fn component_jets(&self, u: f64, v: f64) -> Result<[Jet3; 3]> {
        self.check_domain(u, v)?;
        let j = |k: usize| self.components[k].eval_jet3(&[u, v]);
        Ok([j(0)?, j(1)?, j(2)?])
    }

    /// All partials of `phi` up to order 3.
    pub fn jet(&self, u: f64, v: f64) -> Result<SurfaceJet> {
        Ok(SurfaceJet::from_components(&self.component_jets(u, v)?))
    }

    pub fn metric(&self, u: f64, v: f64) -> Result<Metric> {
        let m = Metric::from_components(&self.component_jets(u, v)?);
        self.check_regular(u, v, m.w2())?;
        Ok(m)
    }

    fn check_regular(&self, u: f64, v: f64, w2: f64) -> Result<()> {
        if !(w2 >= self.w_min) {
            return Err(Error::Degenerate { u, v, w2 });
        }
        Ok(())
    }

    pub fn fundamental_forms(&self, u: f64, v: f64) -> Result<FundamentalForms> {
        let jet = self.jet(u, v)?;
        forms_from_jet(&jet, self.w_min).map_err(|w2| Error::Degenerate { u, v, w2 })
    }

    pub fn christoffel(&self, u: f64, v: f64) -> Result<Christoffel> {
        Ok(Christoffel::from_metric(&self.metric(u, v)?))
    }

    /// Second-form coefficients of a Monge patch, both divided by `W^2` and by `W`.
    pub fn monge_second_forms(&self, u: f64, v: f64) -> Result<MongeForms> {
        if !self.is_monge() {
            return Err(Error::NotMonge);
        }
        self.check_domain(u, v)?;
        let f = self.components[2].eval_jet3(&[u, v])?;
        let w2 = 1.0 + f.du() * f.du() + f.dv() * f.dv();
        let w = w2.sqrt();
        let second = [f.duu(), f.duv(), f.dvv()];
        let paper = second.map(|x| x / w2);
        let classical = second.map(|x| x / w);
        let difference = [0, 1, 2].map(|k| paper[k] - classical[k]);
        Ok(MongeForms {
            paper,
            classical,
            difference,
            w2,
        })
    }
}

/// Forms from a surface jet; the error carries `EG - F^2` when degenerate.
pub fn forms_from_jet(jet: &SurfaceJet, w_min: f64) -> std::result::Result<FundamentalForms, f64> {
    let e = jet.pu.dot(&jet.pu);
    let f = jet.pu.dot(&jet.pv);
    let g = jet.pv.dot(&jet.pv);
    let w2 = e * g - f * f;
    if !(w2 >= w_min) {
        return Err(w2);
    }
    let cross = jet.normal_unnormalized();
    let w = cross.norm();
    let normal = cross / w;
    Ok(FundamentalForms {
        e,
        f,
        g,
        l: jet.puu.dot(&normal),
        m: jet.puv.dot(&normal),
        n: jet.pvv.dot(&normal),
        w,
        normal: normal.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn plane() -> SurfacePatch {
        SurfacePatch::parse("u", "v", "0", [-2.0, 2.0], [-2.0, 2.0]).unwrap()
    }

    fn sphere() -> SurfacePatch {
        SurfacePatch::parse(
            "cos(u)*cos(v)",
            "cos(u)*sin(v)",
            "sin(u)",
            [-1.4, 1.4],
            [-PI, PI],
        )
        .unwrap()
    }

    fn cylinder() -> SurfacePatch {
        SurfacePatch::parse("cos(v)", "sin(v)", "u", [-2.0, 2.0], [-PI, PI]).unwrap()
    }

    fn mercator() -> SurfacePatch {
        SurfacePatch::parse(
            "cos(v)",
            "sin(v)",
            "log(sec(u)+tan(u))",
            [-1.3, 1.3],
            [-PI, PI],
        )
        .unwrap()
    }

    fn assert_vec(a: Vec3, b: [f64; 3]) {
        assert_abs_diff_eq!(a, Vec3::from(b), epsilon = 1e-14);
    }

    #[test]
    fn plane_jet_is_flat() {
        let j = plane().jet(0.3, -0.7).unwrap();
        assert_vec(j.pu, [1.0, 0.0, 0.0]);
        assert_vec(j.pv, [0.0, 1.0, 0.0]);
        for second in [j.puu, j.puv, j.pvv, j.puuu, j.puuv, j.puvv, j.pvvv] {
            assert_vec(second, [0.0; 3]);
        }
    }

    #[test]
    fn sphere_jet_at_origin() {
        // phi_u = (-sin u cos v, -sin u sin v, cos u), phi_uu = -(cos u cos v, cos u sin v, sin u)
        let j = sphere().jet(0.0, 0.0).unwrap();
        assert_vec(j.pu, [0.0, 0.0, 1.0]);
        assert_vec(j.pv, [0.0, 1.0, 0.0]);
        assert_vec(j.puu, [-1.0, 0.0, 0.0]);
    }

    #[test]
    fn cylinder_jet_at_origin() {
        let j = cylinder().jet(0.0, 0.0).unwrap();
        assert_vec(j.pu, [0.0, 0.0, 1.0]);
        assert_vec(j.pvv, [-1.0, 0.0, 0.0]);
    }

    #[test]
    fn plane_forms() {
        let f = plane().fundamental_forms(1.0, 1.0).unwrap();
        assert_eq!((f.e, f.f, f.g, f.w), (1.0, 0.0, 1.0, 1.0));
        assert_eq!((f.l, f.m, f.n), (0.0, 0.0, 0.0));
    }

    #[test]
    fn sphere_forms() {
        let f = sphere().fundamental_forms(0.0, 0.0).unwrap();
        assert_abs_diff_eq!(f.e, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.f, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.g, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.w, 1.0, epsilon = 1e-15);
        assert_vec(f.unit_normal(), [-1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(f.l, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.m, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.n, 1.0, epsilon = 1e-15);

        let f = sphere().fundamental_forms(FRAC_PI_4, 0.0).unwrap();
        assert_abs_diff_eq!(f.e, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.f, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.g, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.w, 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn christoffel_fixtures() {
        let c = plane().christoffel(0.2, 0.4).unwrap();
        assert_eq!(c.to_array(), [0.0; 6]);

        let c = sphere().christoffel(FRAC_PI_4, 0.3).unwrap();
        assert_abs_diff_eq!(c.g1_22, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(c.g2_12, -1.0, epsilon = 1e-14);
        for x in [c.g1_11, c.g2_11, c.g1_12, c.g2_22] {
            assert_abs_diff_eq!(x, 0.0, epsilon = 1e-14);
        }

        let c = mercator().christoffel(FRAC_PI_4, 1.0).unwrap();
        assert_abs_diff_eq!(c.g1_11, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.g1_22, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn printed_table_matches_when_chart_is_orthogonal() {
        let m = sphere().metric(0.4, 0.1).unwrap();
        assert_eq!(
            Christoffel::from_metric(&m),
            Christoffel::from_metric_as_printed(&m)
        );
        // F != 0: the two G2_11 / G2_22 entries part ways
        let skew = SurfacePatch::parse("u+v^2", "v", "u*v", [-1.0, 1.0], [-1.0, 1.0]).unwrap();
        let m = skew.metric(0.3, 0.5).unwrap();
        let a = Christoffel::from_metric(&m);
        let b = Christoffel::from_metric_as_printed(&m);
        assert!((a.g2_11 - b.g2_11).abs() > 1e-3);
        assert_eq!(a.g1_11, b.g1_11);
        assert_eq!(a.g1_22, b.g1_22);
    }

    #[test]
    fn degenerate_points_are_rejected() {
        // the chart collapses at the poles
        let err = sphere()
            .with_w_min(1e-10)
            .fundamental_forms(FRAC_PI_2 - 1e-9, 0.0);
        assert!(matches!(err, Err(Error::OutOfDomain { .. })));
        let wide = SurfacePatch::parse("cos(u)*cos(v)", "cos(u)*sin(v)", "sin(u)", [-2.0, 2.0], [-PI, PI]).unwrap();
        assert!(matches!(
            wide.fundamental_forms(FRAC_PI_2, 0.0),
            Err(Error::Degenerate { .. })
        ));
        assert!(matches!(wide.christoffel(FRAC_PI_2, 0.0), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn monge_variants() {
        let flat = SurfacePatch::parse("u", "v", "0", [-1.0, 1.0], [-1.0, 1.0]).unwrap();
        let m = flat.monge_second_forms(0.5, 0.5).unwrap();
        assert_eq!(m.paper, [0.0; 3]);
        assert_eq!(m.classical, [0.0; 3]);

        let bowl = SurfacePatch::parse("u", "v", "(u^2+v^2)/2", [-2.0, 2.0], [-2.0, 2.0]).unwrap();
        let m = bowl.monge_second_forms(0.0, 0.0).unwrap();
        assert_eq!(m.paper, [1.0, 0.0, 1.0]);
        assert_eq!(m.classical, [1.0, 0.0, 1.0]);

        let m = bowl.monge_second_forms(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(m.paper[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.classical[0], 0.5f64.sqrt(), epsilon = 1e-15);
        // the classical variant is the actual second fundamental form
        let forms = bowl.fundamental_forms(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(forms.l, m.classical[0], epsilon = 1e-15);

        assert!(matches!(sphere().monge_second_forms(0.0, 0.0), Err(Error::NotMonge)));
    }

    #[test]
    fn grid_covers_boundary() {
        let d = Domain::new([0.0, 1.0], [-1.0, 1.0]).unwrap();
        let g = d.grid(3);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], (0.0, -1.0));
        assert_eq!(g[8], (1.0, 1.0));
        assert!(Domain::new([1.0, 0.0], [0.0, 1.0]).is_err());
    }
}
