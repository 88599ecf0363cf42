//! Curves `alpha(t) = phi(u(t), v(t))` on a patch.
//!
//! Curves come in an arbitrary regular parameter `t` and are reparameterized
//! by arc length once, into an immutable table. Every query afterwards works
//! in the arc-length parameter `s`; derivatives with respect to `s` are
//! obtained from exact `t`-jets by the chain rule, so the table only fixes
//! which `t` a given `s` labels.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{forms_from_jet, Christoffel, SurfaceJet, SurfacePatch};
use crate::Vec3;

/// A chart-space curve `(u(t), v(t))` for `t` in `[t0, t1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCurve {
    u: Expr,
    v: Expr,
    range: [f64; 2],
}

impl ParamCurve {
    pub fn new(u: Expr, v: Expr, range: [f64; 2]) -> Result<ParamCurve> {
        for e in [&u, &v] {
            if e.vars() != ["t"] {
                return Err(Error::Invalid(format!(
                    "curve components must be expressions in t, got variables {:?}",
                    e.vars()
                )));
            }
        }
        if !(range[0] < range[1]) || !range.iter().all(|x| x.is_finite()) {
            return Err(Error::Invalid(format!("invalid parameter range {range:?}")));
        }
        Ok(ParamCurve { u, v, range })
    }

    pub fn parse(u: &str, v: &str, range: [f64; 2]) -> Result<ParamCurve> {
        ParamCurve::new(Expr::parse(u, &["t"])?, Expr::parse(v, &["t"])?, range)
    }

    pub fn u(&self) -> &Expr {
        &self.u
    }

    pub fn v(&self) -> &Expr {
        &self.v
    }

    pub fn range(&self) -> [f64; 2] {
        self.range
    }

    /// `[x, x', x'', x''']` in `t` for both chart coordinates.
    fn t_jets(&self, t: f64) -> Result<([f64; 4], [f64; 4])> {
        let ju = self.u.eval_jet3(&[t])?;
        let jv = self.v.eval_jet3(&[t])?;
        Ok((
            [ju.value(), ju.du(), ju.duu(), ju.duuu()],
            [jv.value(), jv.du(), jv.duu(), jv.duuu()],
        ))
    }
}

/// Tunables for reparameterization and the Frenet/rectifying gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveOptions {
    /// Initial number of quadrature panels.
    pub panels: usize,
    /// Relative tolerance on total length between successive refinements.
    pub tol: f64,
    /// Minimum speed `|d alpha / dt|`.
    pub c_min: f64,
    /// Minimum curvature for which a Frenet frame is produced.
    pub kappa_min: f64,
    /// Threshold on `max |alpha . n|` for a curve to count as rectifying.
    pub rect_tol: f64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions {
            panels: 512,
            tol: 1e-10,
            c_min: 1e-8,
            kappa_min: 1e-8,
            rect_tol: 1e-6,
        }
    }
}

const MAX_PANELS: usize = 1 << 17;

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Monotone map between the curve parameter and arc length, sampled at the
/// panel boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcLengthTable {
    t: Vec<f64>,
    s: Vec<f64>,
}

impl ArcLengthTable {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.s.iter().copied())
    }

    pub fn length(&self) -> f64 {
        *self.s.last().unwrap_or(&0.0)
    }
}

/// Chain rule for `d/dx phi(u(x), v(x))` up to third order, given
/// `[u', u'', u''']` and `[v', v'', v''']` in the same parameter `x`.
pub fn chain_derivatives(jet: &SurfaceJet, du: [f64; 3], dv: [f64; 3]) -> [Vec3; 3] {
    let [u1, u2, u3] = du;
    let [v1, v2, v3] = dv;
    let d1 = jet.pu * u1 + jet.pv * v1;
    let d2 = jet.pu * u2
        + jet.pv * v2
        + jet.puu * (u1 * u1)
        + jet.puv * (2.0 * u1 * v1)
        + jet.pvv * (v1 * v1);
    let d3 = jet.pu * u3
        + jet.pv * v3
        + jet.puu * (3.0 * u1 * u2)
        + jet.puv * (3.0 * (u2 * v1 + u1 * v2))
        + jet.pvv * (3.0 * v1 * v2)
        + jet.puuu * (u1 * u1 * u1)
        + jet.puuv * (3.0 * u1 * u1 * v1)
        + jet.puvv * (3.0 * u1 * v1 * v1)
        + jet.pvvv * (v1 * v1 * v1);
    [d1, d2, d3]
}

/// Everything known about the curve at one arc-length value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub v: f64,
    /// `[u', u'', u''']` with respect to arc length.
    pub du: [f64; 3],
    /// `[v', v'', v''']` with respect to arc length.
    pub dv: [f64; 3],
    /// `ds/dt`.
    pub speed: f64,
    pub jet: SurfaceJet,
    pub alpha: Vec3,
    /// `[alpha', alpha'', alpha''']` with respect to arc length.
    pub d: [Vec3; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrenetData {
    pub s: f64,
    pub tangent: [f64; 3],
    pub normal: [f64; 3],
    pub binormal: [f64; 3],
    pub kappa: f64,
    pub tau: f64,
    pub u1: f64,
    pub v1: f64,
    pub u2: f64,
    pub v2: f64,
}

impl FrenetData {
    pub fn t(&self) -> Vec3 {
        Vec3::from(self.tangent)
    }
    pub fn n(&self) -> Vec3 {
        Vec3::from(self.normal)
    }
    pub fn b(&self) -> Vec3 {
        Vec3::from(self.binormal)
    }
}

/// Maxima over the samples of the three rectifying-curve conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChenMaxima {
    pub xi_prime_minus_one: f64,
    pub mu_prime: f64,
    pub xi_kappa_minus_mu_tau: f64,
}

/// `alpha = xi t + mu b` (plus the normal residual) sampled along a curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RectifyingDecomposition {
    pub s: Vec<f64>,
    pub xi: Vec<f64>,
    pub mu: Vec<f64>,
    /// `mu / kappa`, the coefficient multiplying `t x t'` in the chart expansion.
    pub mu_over_kappa: Vec<f64>,
    /// `alpha . n` per sample.
    pub residual: Vec<f64>,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub max_residual: f64,
    pub chen: ChenMaxima,
    /// `max |alpha - (xi t + mu b)|`.
    pub reconstruction_error: f64,
    pub rect_tol: f64,
    pub is_rectifying: bool,
}

/// A regular curve on a patch together with its arc-length table.
#[derive(Debug, Clone)]
pub struct CurveOnSurface {
    patch: Arc<SurfacePatch>,
    curve: ParamCurve,
    table: ArcLengthTable,
    opts: CurveOptions,
}

impl CurveOnSurface {
    /// Builds the arc-length table, checking regularity and that the curve stays
    /// inside the patch domain at every quadrature node.
    pub fn reparameterize(
        patch: Arc<SurfacePatch>,
        curve: ParamCurve,
        opts: CurveOptions,
    ) -> Result<CurveOnSurface> {
        let mut panels = opts.panels.max(2);
        let mut coarse = build_table(&patch, &curve, &opts, panels)?;
        let table = loop {
            if panels >= MAX_PANELS {
                break coarse;
            }
            panels *= 2;
            let fine = build_table(&patch, &curve, &opts, panels)?;
            let (a, b) = (coarse.length(), fine.length());
            if (a - b).abs() <= opts.tol * b.max(1.0) {
                break fine;
            }
            coarse = fine;
        };
        Ok(CurveOnSurface {
            patch,
            curve,
            table,
            opts,
        })
    }

    pub fn patch(&self) -> &Arc<SurfacePatch> {
        &self.patch
    }

    pub fn curve(&self) -> &ParamCurve {
        &self.curve
    }

    pub fn table(&self) -> &ArcLengthTable {
        &self.table
    }

    pub fn options(&self) -> &CurveOptions {
        &self.opts
    }

    pub fn length(&self) -> f64 {
        self.table.length()
    }

    /// Arc length from `t0` to `t`.
    pub fn s_at(&self, t: f64) -> Result<f64> {
        let [t0, t1] = self.curve.range;
        if t < t0 - 1e-12 || t > t1 + 1e-12 {
            return Err(Error::Invalid(format!("t = {t} outside [{t0}, {t1}]")));
        }
        let k = match self.table.t.partition_point(|&x| x <= t) {
            0 => 0,
            k => (k - 1).min(self.table.t.len() - 2),
        };
        Ok(self.table.s[k] + self.partial_length(self.table.t[k], t)?)
    }

    /// Parameter value at arc length `s`.
    pub fn t_at(&self, s: f64) -> Result<f64> {
        let length = self.length();
        let slack = 1e-12 * length.max(1.0);
        if !(s >= -slack && s <= length + slack) {
            return Err(Error::ArcLengthOutOfRange { s, length });
        }
        let s = s.clamp(0.0, length);
        let (ts, ss) = (&self.table.t, &self.table.s);
        let k = match ss.partition_point(|&x| x <= s) {
            0 => 0,
            k => (k - 1).min(ts.len() - 2),
        };
        let (mut lo, mut hi) = (ts[k], ts[k + 1]);
        let frac = if ss[k + 1] > ss[k] {
            (s - ss[k]) / (ss[k + 1] - ss[k])
        } else {
            0.0
        };
        let mut t = lo + frac * (hi - lo);
        // Safeguarded Newton on s(t) - s within the bracketing panel.
        for _ in 0..50 {
            let f = ss[k] + self.partial_length(ts[k], t)? - s;
            if f.abs() <= 4.0 * f64::EPSILON * length.max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - f / self.speed(t)?;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if next == t {
                break;
            }
            t = next;
        }
        Ok(t)
    }

    fn speed(&self, t: f64) -> Result<f64> {
        speed(&self.patch, &self.curve, t)
    }

    fn partial_length(&self, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut acc = 0.0;
        for (x, w) in GL5 {
            acc += w * self.speed(mid + half * x)?;
        }
        Ok(acc * half)
    }

    /// Full local data at parameter value `t`.
    pub fn point_at_t(&self, t: f64) -> Result<CurvePoint> {
        let s = self.s_at(t)?;
        self.point_with(s, t)
    }

    /// Full local data at arc length `s`.
    pub fn point(&self, s: f64) -> Result<CurvePoint> {
        let t = self.t_at(s)?;
        self.point_with(s, t)
    }

    fn point_with(&self, s: f64, t: f64) -> Result<CurvePoint> {
        let (ju, jv) = self.curve.t_jets(t)?;
        let (u, v) = (ju[0], jv[0]);
        let jet = self.patch.jet(u, v)?;
        let [a1, a2, a3] = chain_derivatives(&jet, [ju[1], ju[2], ju[3]], [jv[1], jv[2], jv[3]]);
        let sp = a1.norm();
        if sp < self.opts.c_min {
            return Err(Error::Irregular { t, speed: sp });
        }
        let sp2 = a1.dot(&a2) / sp;
        let sp3 = (a2.dot(&a2) + a1.dot(&a3) - sp2 * sp2) / sp;
        // derivatives of the inverse map t(s)
        let t1 = 1.0 / sp;
        let t2 = -sp2 * t1 * t1 * t1;
        let t3 = -sp3 * t1.powi(4) + 3.0 * sp2 * sp2 * t1.powi(5);
        let reparam = |x: [f64; 4]| {
            [
                x[1] * t1,
                x[2] * t1 * t1 + x[1] * t2,
                x[3] * t1 * t1 * t1 + 3.0 * x[2] * t1 * t2 + x[1] * t3,
            ]
        };
        let du = reparam(ju);
        let dv = reparam(jv);
        let d = chain_derivatives(&jet, du, dv);
        Ok(CurvePoint {
            s,
            t,
            u,
            v,
            du,
            dv,
            speed: sp,
            jet,
            alpha: jet.p,
            d,
        })
    }

    pub fn frenet(&self, s: f64) -> Result<FrenetData> {
        frenet_at(&self.point(s)?, self.opts.kappa_min)
    }

    /// `u'^2 L + 2 u'v' M + v'^2 N`.
    pub fn normal_curvature(&self, s: f64) -> Result<f64> {
        let p = self.point(s)?;
        let forms = forms_from_jet(&p.jet, self.patch.w_min()).map_err(|w2| Error::Degenerate {
            u: p.u,
            v: p.v,
            w2,
        })?;
        Ok(normal_curvature_from(&p, forms.l, forms.m, forms.n))
    }

    /// Geodesic curvature from the Christoffel symbols and the area element.
    pub fn geodesic_curvature(&self, s: f64) -> Result<f64> {
        let p = self.point(s)?;
        let metric = self.patch.metric(p.u, p.v)?;
        let gamma = Christoffel::from_metric(&metric);
        Ok(geodesic_curvature_from(&p, &gamma, metric.w2().sqrt()))
    }

    /// `n` arc-length values spread evenly over `[0, L]`, endpoints included.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let length = self.length();
        (0..n).map(|k| length * k as f64 / (n - 1) as f64).collect()
    }

    /// `n` cell-centred arc-length values, away from the endpoints.
    pub fn midpoints(&self, n: usize) -> Vec<f64> {
        let n = n.max(1);
        let length = self.length();
        (0..n).map(|k| length * (k as f64 + 0.5) / n as f64).collect()
    }

    /// Splits the position vector along the Frenet frame at `n` evenly spaced
    /// samples and evaluates the rectifying conditions, with `xi'` and `mu'`
    /// taken by finite differences over the sample grid.
    pub fn rectifying_decompose(&self, n: usize) -> Result<RectifyingDecomposition> {
        let n = n.max(3);
        let s = self.grid(n);
        let mut xi = Vec::with_capacity(n);
        let mut mu = Vec::with_capacity(n);
        let mut residual = Vec::with_capacity(n);
        let mut kappa = Vec::with_capacity(n);
        let mut tau = Vec::with_capacity(n);
        let mut reconstruction_error: f64 = 0.0;
        for &sk in &s {
            let p = self.point(sk)?;
            let fr = frenet_at(&p, self.opts.kappa_min)?;
            let (x, m) = (p.alpha.dot(&fr.t()), p.alpha.dot(&fr.b()));
            xi.push(x);
            mu.push(m);
            residual.push(p.alpha.dot(&fr.n()));
            kappa.push(fr.kappa);
            tau.push(fr.tau);
            reconstruction_error =
                reconstruction_error.max((p.alpha - (fr.t() * x + fr.b() * m)).norm());
        }
        let h = s[1] - s[0];
        let dxi = finite_difference(&xi, h);
        let dmu = finite_difference(&mu, h);
        let max_abs = |it: &mut dyn Iterator<Item = f64>| it.map(f64::abs).fold(0.0, f64::max);
        let chen = ChenMaxima {
            xi_prime_minus_one: max_abs(&mut dxi.iter().map(|d| d - 1.0)),
            mu_prime: max_abs(&mut dmu.iter().copied()),
            xi_kappa_minus_mu_tau: max_abs(&mut (0..n).map(|k| xi[k] * kappa[k] - mu[k] * tau[k])),
        };
        let max_residual = max_abs(&mut residual.iter().copied());
        let mu_over_kappa = mu.iter().zip(&kappa).map(|(m, k)| m / k).collect();
        Ok(RectifyingDecomposition {
            s,
            xi,
            mu,
            mu_over_kappa,
            residual,
            kappa,
            tau,
            max_residual,
            chen,
            reconstruction_error,
            rect_tol: self.opts.rect_tol,
            is_rectifying: max_residual < self.opts.rect_tol,
        })
    }
}

/// Frenet frame from unit-speed derivative data.
pub fn frenet_at(p: &CurvePoint, kappa_min: f64) -> Result<FrenetData> {
    let [d1, d2, d3] = p.d;
    let kappa = d2.norm();
    if !(kappa >= kappa_min) {
        return Err(Error::FrenetUndefined { s: p.s, kappa });
    }
    let n = d2 / kappa;
    let b = d1.cross(&n);
    let c = d1.cross(&d2);
    let tau = c.dot(&d3) / c.norm_squared();
    Ok(FrenetData {
        s: p.s,
        tangent: d1.into(),
        normal: n.into(),
        binormal: b.into(),
        kappa,
        tau,
        u1: p.du[0],
        v1: p.dv[0],
        u2: p.du[1],
        v2: p.dv[1],
    })
}

/// The binormal assembled term by term from chart data:
/// `(1/kappa) [(u'v'' - u''v') phi_u x phi_v + u'^3 phi_u x phi_uu + ...]`.
pub fn binormal_expanded(p: &CurvePoint, kappa: f64) -> Vec3 {
    let j = &p.jet;
    let [u1, u2, _] = p.du;
    let [v1, v2, _] = p.dv;
    let sum = j.pu.cross(&j.pv) * (u1 * v2 - u2 * v1)
        + j.pu.cross(&j.puu) * (u1 * u1 * u1)
        + j.pu.cross(&j.puv) * (2.0 * u1 * u1 * v1)
        + j.pu.cross(&j.pvv) * (u1 * v1 * v1)
        + j.pv.cross(&j.puu) * (u1 * u1 * v1)
        + j.pv.cross(&j.puv) * (2.0 * u1 * v1 * v1)
        + j.pv.cross(&j.pvv) * (v1 * v1 * v1);
    sum / kappa
}

pub fn normal_curvature_from(p: &CurvePoint, l: f64, m: f64, n: f64) -> f64 {
    let (u1, v1) = (p.du[0], p.dv[0]);
    u1 * u1 * l + 2.0 * u1 * v1 * m + v1 * v1 * n
}

/// The bracket `G2_11 u'^3 + (2 G2_12 - G1_11) u'^2 v' + (G2_22 - 2 G1_12) u' v'^2 - G1_22 v'^3`
/// shared by the geodesic-curvature formula and its conformal correction.
pub fn geodesic_bracket(sym: [f64; 6], u1: f64, v1: f64) -> f64 {
    let [g1_11, g2_11, g1_12, g2_12, g1_22, g2_22] = sym;
    g2_11 * u1 * u1 * u1 + (2.0 * g2_12 - g1_11) * u1 * u1 * v1 + (g2_22 - 2.0 * g1_12) * u1 * v1 * v1
        - g1_22 * v1 * v1 * v1
}

pub fn geodesic_curvature_from(p: &CurvePoint, gamma: &Christoffel, w: f64) -> f64 {
    let (u1, v1) = (p.du[0], p.dv[0]);
    let (u2, v2) = (p.du[1], p.dv[1]);
    (geodesic_bracket(gamma.to_array(), u1, v1) + u1 * v2 - u2 * v1) * w
}

fn speed(patch: &SurfacePatch, curve: &ParamCurve, t: f64) -> Result<f64> {
    let ju = curve.u.eval_jet3(&[t])?;
    let jv = curve.v.eval_jet3(&[t])?;
    let (u, v) = (ju.value(), jv.value());
    if !patch.domain().contains(u, v) {
        return Err(Error::CurveOutsideDomain { t, u, v });
    }
    let jet = patch.jet(u, v)?;
    Ok((jet.pu * ju.du() + jet.pv * jv.du()).norm())
}

fn build_table(
    patch: &SurfacePatch,
    curve: &ParamCurve,
    opts: &CurveOptions,
    panels: usize,
) -> Result<ArcLengthTable> {
    let [t0, t1] = curve.range;
    let h = (t1 - t0) / panels as f64;
    let mut t = Vec::with_capacity(panels + 1);
    let mut s = Vec::with_capacity(panels + 1);
    let node = |k: usize| if k == panels { t1 } else { t0 + h * k as f64 };
    let checked = |x: f64| -> Result<f64> {
        let sp = speed(patch, curve, x)?;
        if !(sp >= opts.c_min) {
            return Err(Error::Irregular { t: x, speed: sp });
        }
        Ok(sp)
    };
    let mut left = checked(t0)?;
    let mut acc = 0.0;
    t.push(t0);
    s.push(0.0);
    for k in 0..panels {
        let (a, b) = (node(k), node(k + 1));
        let mid = speed(patch, curve, 0.5 * (a + b))?;
        let right = checked(b)?;
        acc += (b - a) / 6.0 * (left + 4.0 * mid + right);
        t.push(b);
        s.push(acc);
        left = right;
    }
    Ok(ArcLengthTable { t, s })
}

fn finite_difference(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|k| {
            if k == 0 {
                (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
            } else if k == n - 1 {
                (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h)
            } else {
                (f[k + 1] - f[k - 1]) / (2.0 * h)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI};

    fn plane() -> Arc<SurfacePatch> {
        Arc::new(SurfacePatch::parse("u", "v", "0", [-3.0, 3.0], [-3.0, 3.0]).unwrap())
    }

    fn sphere() -> Arc<SurfacePatch> {
        Arc::new(
            SurfacePatch::parse("cos(u)*cos(v)", "cos(u)*sin(v)", "sin(u)", [-1.4, 1.4], [-PI, PI])
                .unwrap(),
        )
    }

    fn on(patch: Arc<SurfacePatch>, u: &str, v: &str, range: [f64; 2]) -> Result<CurveOnSurface> {
        CurveOnSurface::reparameterize(
            patch,
            ParamCurve::parse(u, v, range).unwrap(),
            CurveOptions::default(),
        )
    }

    #[test]
    fn unit_circle_is_already_arc_length() {
        let c = on(plane(), "cos(t)", "sin(t)", [0.0, 2.0]).unwrap();
        assert_abs_diff_eq!(c.length(), 2.0, epsilon = 1e-12);
        for (t, s) in c.table().nodes() {
            assert_abs_diff_eq!(t, s, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(c.t_at(1.234).unwrap(), 1.234, epsilon = 1e-13);
    }

    #[test]
    fn speed_two_circle_doubles_arc_length() {
        let c = on(plane(), "cos(2*t)", "sin(2*t)", [0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(c.length(), 2.0, epsilon = 1e-12);
        let p = c.point_at_t(0.3).unwrap();
        assert_abs_diff_eq!(p.speed, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.s, 0.6, epsilon = 1e-13);
        assert_abs_diff_eq!(c.t_at(0.6).unwrap(), 0.3, epsilon = 1e-13);
    }

    #[test]
    fn stalled_parameterization_is_irregular() {
        let err = on(plane(), "t^2", "0", [-1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Irregular { t, .. } if t.abs() < 1e-12));
    }

    #[test]
    fn curve_leaving_domain_is_rejected() {
        let err = on(plane(), "t", "0", [0.0, 5.0]).unwrap_err();
        assert!(matches!(err, Error::CurveOutsideDomain { .. }));
    }

    #[test]
    fn great_circle_frenet() {
        let c = on(sphere(), "0", "t", [-1.0, 1.0]).unwrap();
        let f = c.frenet(0.7).unwrap();
        assert_abs_diff_eq!(f.kappa, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.tau, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.b(), Vec3::new(0.0, 0.0, 1.0), epsilon = 1e-12);
        assert_abs_diff_eq!(c.normal_curvature(0.7).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.geodesic_curvature(0.7).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn helix_on_cylinder() {
        let cyl = Arc::new(SurfacePatch::parse("cos(v)", "sin(v)", "u", [-5.0, 5.0], [-5.0, 5.0]).unwrap());
        let c = on(cyl, "t", "t", [-2.0, 2.0]).unwrap();
        assert_abs_diff_eq!(c.length(), 4.0 * 2f64.sqrt(), epsilon = 1e-11);
        for s in [0.5, 2.0, 5.0] {
            let f = c.frenet(s).unwrap();
            assert_abs_diff_eq!(f.kappa, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(f.tau, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn straight_line_has_no_frenet_frame() {
        let c = on(plane(), "t", "0", [0.0, 1.0]).unwrap();
        assert!(matches!(c.frenet(0.5), Err(Error::FrenetUndefined { .. })));
        assert_eq!(c.normal_curvature(0.5).unwrap(), 0.0);
        assert_eq!(c.geodesic_curvature(0.5).unwrap(), 0.0);
    }

    #[test]
    fn latitude_circles() {
        let c = on(sphere(), &format!("{FRAC_PI_3}"), "t", [-1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(c.normal_curvature(0.3).unwrap(), 1.0, epsilon = 1e-12);
        let c = on(sphere(), "pi/6", "t", [-1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(
            c.geodesic_curvature(0.3).unwrap(),
            -FRAC_PI_6.tan(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn circle_is_not_rectifying() {
        let c = on(plane(), "cos(t)", "sin(t)", [0.0, 3.0]).unwrap();
        let d = c.rectifying_decompose(16).unwrap();
        assert!(!d.is_rectifying);
        for r in &d.residual {
            // position antiparallel to the principal normal
            assert_abs_diff_eq!(*r, -1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(d.max_residual, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn out_of_range_arc_length() {
        let c = on(plane(), "t", "t", [0.0, 1.0]).unwrap();
        assert!(matches!(c.t_at(-0.1), Err(Error::ArcLengthOutOfRange { .. })));
        assert!(matches!(c.t_at(2.0), Err(Error::ArcLengthOutOfRange { .. })));
    }
}
