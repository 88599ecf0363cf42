//! Conformal correspondences between two patches over the same chart.
//!
//! A pair is given either by an ambient map `J: R^3 -> R^3` applied to the
//! source patch, or by an explicit image patch. In both cases the dilation
//! field is recovered from the metrics, `lambda = sqrt(E_bar / E)`, and the pair
//! is accepted only if the whole first fundamental form scales by the same
//! factor on a sample grid.

use std::sync::Arc;

use nalgebra::Matrix3;
use serde::Serialize;

use crate::curves::{chain_derivatives, frenet_at, CurveOnSurface, CurvePoint};
use crate::error::{Error, Result};
use crate::expr::{Expr, Jet3};
use crate::geometry::{Christoffel, Metric, SurfaceJet, SurfacePatch};
use crate::Vec3;

const AMBIENT_VARS: [&str; 3] = ["x", "y", "z"];

/// A smooth map of space given by three expressions in `(x, y, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientMap {
    components: [Expr; 3],
    /// `d X_i / d x_j`.
    jacobian: [[Expr; 3]; 3],
}

impl AmbientMap {
    pub fn new(x: Expr, y: Expr, z: Expr) -> Result<AmbientMap> {
        for c in [&x, &y, &z] {
            if c.vars() != AMBIENT_VARS {
                return Err(Error::Invalid(format!(
                    "ambient map components must be expressions in (x, y, z), got {:?}",
                    c.vars()
                )));
            }
        }
        let d = |c: &Expr, v: &str| c.differentiate(v).expect("declared variable");
        let jacobian = [&x, &y, &z].map(|c| AMBIENT_VARS.map(|v| d(c, v)));
        Ok(AmbientMap {
            components: [x, y, z],
            jacobian,
        })
    }

    pub fn parse(x: &str, y: &str, z: &str) -> Result<AmbientMap> {
        let p = |s: &str| Expr::parse(s, &AMBIENT_VARS);
        AmbientMap::new(p(x)?, p(y)?, p(z)?)
    }

    pub fn components(&self) -> &[Expr; 3] {
        &self.components
    }

    pub fn apply(&self, p: Vec3) -> Result<Vec3> {
        let at = [p.x, p.y, p.z];
        let mut out = Vec3::zeros();
        for (k, c) in self.components.iter().enumerate() {
            out[k] = c.eval(&at)?;
        }
        Ok(out)
    }

    pub fn jacobian_at(&self, p: Vec3) -> Result<Matrix3<f64>> {
        let at = [p.x, p.y, p.z];
        let mut m = Matrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = self.jacobian[i][j].eval(&at)?;
            }
        }
        Ok(m)
    }

    /// The image patch `J o phi`.
    pub fn compose(&self, patch: &SurfacePatch) -> Result<SurfacePatch> {
        let [px, py, pz] = patch.components();
        let args = [px, py, pz];
        let [x, y, z] = self.components.clone().map(|c| c.substitute(&args));
        SurfacePatch::new(x, y, z, *patch.domain()).map(|p| p.with_w_min(patch.w_min()))
    }

    fn pulled_back_jacobian(&self, patch: &SurfacePatch) -> [[Expr; 3]; 3] {
        let [px, py, pz] = patch.components();
        let args = [px, py, pz];
        self.jacobian.clone().map(|row| row.map(|e| e.substitute(&args)))
    }
}

/// How the image of a pair is specified.
#[derive(Debug, Clone)]
pub enum PairSpec {
    Ambient(AmbientMap),
    Patch(Arc<SurfacePatch>),
}

#[derive(Debug, Clone)]
enum Mode {
    Ambient {
        map: AmbientMap,
        /// Jacobian entries composed with the source patch, as functions of `(u, v)`.
        jacobian: Box<[[Expr; 3]; 3]>,
    },
    Patch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Conformal,
    Homothetic { c: f64 },
    Isometric,
}

impl Classification {
    pub fn is_homothetic(&self) -> bool {
        !matches!(self, Classification::Conformal)
    }

    pub fn is_isometric(&self) -> bool {
        matches!(self, Classification::Isometric)
    }

    /// The constant dilation factor, if there is one.
    pub fn constant(&self) -> Option<f64> {
        match self {
            Classification::Conformal => None,
            Classification::Homothetic { c } => Some(*c),
            Classification::Isometric => Some(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOptions {
    /// Points per axis of the validation grid.
    pub grid: usize,
    pub conf_tol: f64,
    /// Spread of `lambda` below which it counts as constant.
    pub constant_tol: f64,
}

impl Default for PairOptions {
    fn default() -> Self {
        PairOptions {
            grid: 21,
            conf_tol: 1e-8,
            constant_tol: 1e-9,
        }
    }
}

/// `lambda` and its first partials at a chart point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dilation {
    pub lambda: f64,
    pub lambda_u: f64,
    pub lambda_v: f64,
}

/// Additive change of each Christoffel symbol under a conformal rescaling of
/// the metric; same index layout as [`Christoffel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonCorrections {
    pub e1_11: f64,
    pub e2_11: f64,
    pub e1_12: f64,
    pub e2_12: f64,
    pub e1_22: f64,
    pub e2_22: f64,
}

impl EpsilonCorrections {
    /// Corrections from the source metric values and the dilation field.
    pub fn new(e: f64, f: f64, g: f64, d: &Dilation) -> EpsilonCorrections {
        let (lu, lv) = (d.lambda_u, d.lambda_v);
        let den = d.lambda * (e * g - f * f);
        EpsilonCorrections {
            e1_11: (e * g * lu - 2.0 * f * f * lu + f * e * lv) / den,
            e2_11: (e * f * lu - e * e * lv) / den,
            e1_12: (e * g * lv - f * g * lu) / den,
            e2_12: (e * g * lu - f * e * lv) / den,
            e1_22: (g * f * lv - g * g * lu) / den,
            e2_22: (e * g * lv - 2.0 * f * f * lv + f * g * lu) / den,
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.e1_11, self.e2_11, self.e1_12, self.e2_12, self.e1_22, self.e2_22,
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().map(|x| x.abs()).fold(0.0, f64::max)
    }
}

/// Image metric derivatives computed three ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricDerivatives {
    /// `[E_u, E_v, F_u, F_v, G_u, G_v]` of the image, straight from its jets.
    pub direct: [f64; 6],
    /// `2 lambda lambda_i X + lambda^2 X_i` for each coefficient `X` and direction `i`.
    pub product_rule: [f64; 6],
    /// The variant whose second term always uses the `v`-derivative `X_v`.
    pub printed: [f64; 6],
    pub product_rule_residual: f64,
    pub printed_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarredChristoffel {
    /// Source symbols plus the epsilon corrections.
    pub via_correction: Christoffel,
    /// Symbols of the image patch computed from its own metric.
    pub direct: Christoffel,
    pub residual: f64,
}

/// Jacobian of the ambient map along the source patch, with its chart derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianBundle {
    pub j: Matrix3<f64>,
    pub j_u: Matrix3<f64>,
    pub j_v: Matrix3<f64>,
}

/// Frame of the image curve `phi_bar(u(s), v(s))` in the source parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageFrame {
    pub alpha: Vec3,
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
    /// Curvature of the image curve in its own arc length.
    pub kappa: f64,
    pub jet: SurfaceJet,
}

impl ImageFrame {
    /// `alpha_bar . n_bar`; zero for a rectifying image.
    pub fn rectifying_residual(&self) -> f64 {
        self.alpha.dot(&self.normal)
    }
    pub fn xi(&self) -> f64 {
        self.alpha.dot(&self.tangent)
    }
    pub fn mu(&self) -> f64 {
        self.alpha.dot(&self.binormal)
    }
}

/// Outcome of evaluating the sufficient condition for the image of a
/// rectifying curve to be rectifying, at one arc-length value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageCondition {
    pub s: f64,
    /// Right-hand side of the condition: the `mu/kappa`-weighted correction sum
    /// plus `lambda J_* alpha`.
    pub rhs: Vec3,
    /// `J(alpha(s))`.
    pub image_alpha: Vec3,
    /// `|image_alpha - rhs|`.
    pub difference: f64,
    pub mu_over_kappa: f64,
    pub image_residual: f64,
    pub image_xi: f64,
    pub image_mu: f64,
}

/// Conformality check of a map over a whole grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSummary {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub residual: f64,
    pub worst: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct ConformalPair {
    source: Arc<SurfacePatch>,
    image: Arc<SurfacePatch>,
    mode: Mode,
    classification: Classification,
    summary: GridSummary,
    opts: PairOptions,
    user_lambda: Option<(Expr, f64)>,
}

impl ConformalPair {
    /// Validates conformality on a grid and classifies the dilation field.
    pub fn build(source: Arc<SurfacePatch>, spec: PairSpec, opts: PairOptions) -> Result<ConformalPair> {
        let (image, mode) = match spec {
            PairSpec::Ambient(map) => {
                let image = Arc::new(map.compose(&source)?);
                let jacobian = Box::new(map.pulled_back_jacobian(&source));
                (image, Mode::Ambient { map, jacobian })
            }
            PairSpec::Patch(image) => {
                if image.domain() != source.domain() {
                    return Err(Error::Invalid(
                        "image patch must share the source's (u, v) domain".into(),
                    ));
                }
                (image, Mode::Patch)
            }
        };
        let summary = conformality_on_grid(&source, &image, opts.grid)?;
        if !(summary.residual < opts.conf_tol) {
            return Err(Error::NotConformal {
                u: summary.worst.0,
                v: summary.worst.1,
                residual: summary.residual,
            });
        }
        let classification = if (summary.lambda_max - 1.0).abs() <= opts.constant_tol
            && (summary.lambda_min - 1.0).abs() <= opts.constant_tol
        {
            Classification::Isometric
        } else if summary.lambda_max - summary.lambda_min <= opts.constant_tol {
            Classification::Homothetic {
                c: 0.5 * (summary.lambda_min + summary.lambda_max),
            }
        } else {
            Classification::Conformal
        };
        Ok(ConformalPair {
            source,
            image,
            mode,
            classification,
            summary,
            opts,
            user_lambda: None,
        })
    }

    /// Cross-checks a user-supplied dilation expression in `(u, v)` against the
    /// recovered field; the maximum relative error is kept on the pair.
    pub fn with_user_lambda(mut self, lambda: Expr) -> Result<ConformalPair> {
        let mut worst: f64 = 0.0;
        for (u, v) in self.source.domain().grid(self.opts.grid) {
            let given = lambda.eval(&[u, v])?;
            let actual = self.dilation(u, v)?.lambda;
            worst = worst.max(((given - actual) / actual).abs());
        }
        self.user_lambda = Some((lambda, worst));
        Ok(self)
    }

    pub fn source(&self) -> &Arc<SurfacePatch> {
        &self.source
    }

    pub fn image(&self) -> &Arc<SurfacePatch> {
        &self.image
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn summary(&self) -> &GridSummary {
        &self.summary
    }

    pub fn options(&self) -> &PairOptions {
        &self.opts
    }

    pub fn user_lambda(&self) -> Option<(&Expr, f64)> {
        self.user_lambda.as_ref().map(|(e, err)| (e, *err))
    }

    pub fn ambient_map(&self) -> Option<&AmbientMap> {
        match &self.mode {
            Mode::Ambient { map, .. } => Some(map),
            Mode::Patch => None,
        }
    }

    pub fn is_ambient(&self) -> bool {
        matches!(self.mode, Mode::Ambient { .. })
    }

    pub fn mode_name(&self) -> &'static str {
        if self.is_ambient() {
            "ambient"
        } else {
            "patch"
        }
    }

    fn dilation_jet(&self, u: f64, v: f64) -> Result<(Metric, Metric, Jet3)> {
        let src = self.source.metric(u, v)?;
        let img = self.image.metric(u, v)?;
        Ok((src, img, img.e / src.e))
    }

    pub fn dilation(&self, u: f64, v: f64) -> Result<Dilation> {
        let (_, _, lambda2) = self.dilation_jet(u, v)?;
        Ok(dilation_from(&lambda2))
    }

    pub fn metric_coefficient_derivatives(&self, u: f64, v: f64) -> Result<MetricDerivatives> {
        let (src, img, lambda2) = self.dilation_jet(u, v)?;
        let d = dilation_from(&lambda2);
        let (l, lu, lv) = (d.lambda, d.lambda_u, d.lambda_v);
        let direct = img.first_derivatives();
        let mut product_rule = [0.0; 6];
        let mut printed = [0.0; 6];
        for (k, x) in [src.e, src.f, src.g].iter().enumerate() {
            product_rule[2 * k] = 2.0 * l * lu * x.value() + l * l * x.du();
            product_rule[2 * k + 1] = 2.0 * l * lv * x.value() + l * l * x.dv();
            printed[2 * k] = 2.0 * l * lu * x.value() + l * l * x.dv();
            printed[2 * k + 1] = 2.0 * l * lv * x.value() + l * l * x.dv();
        }
        let diff = |a: &[f64; 6]| a.iter().zip(&direct).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        Ok(MetricDerivatives {
            direct,
            product_rule_residual: diff(&product_rule),
            printed_residual: diff(&printed),
            product_rule,
            printed,
        })
    }

    pub fn epsilon_corrections(&self, u: f64, v: f64) -> Result<EpsilonCorrections> {
        let (src, _, lambda2) = self.dilation_jet(u, v)?;
        Ok(EpsilonCorrections::new(
            src.e.value(),
            src.f.value(),
            src.g.value(),
            &dilation_from(&lambda2),
        ))
    }

    pub fn barred_christoffel(&self, u: f64, v: f64) -> Result<BarredChristoffel> {
        let (src, img, lambda2) = self.dilation_jet(u, v)?;
        let eps = EpsilonCorrections::new(
            src.e.value(),
            src.f.value(),
            src.g.value(),
            &dilation_from(&lambda2),
        );
        let via_correction = Christoffel::from_metric(&src).offset(eps.to_array());
        let direct = Christoffel::from_metric(&img);
        Ok(BarredChristoffel {
            residual: via_correction.max_abs_diff(&direct),
            via_correction,
            direct,
        })
    }

    /// Largest relative gap between `E_bar` from the image jets, `|J_* phi_u|^2`
    /// and `lambda^2 E` (likewise for `F`, `G`). Ambient pairs only.
    pub fn ambient_metric_consistency(&self, u: f64, v: f64) -> Result<f64> {
        let bundle = self.jacobian_bundle(u, v)?;
        let src_jet = self.source.jet(u, v)?;
        let (src, img, lambda2) = self.dilation_jet(u, v)?;
        let (a, b) = (bundle.j * src_jet.pu, bundle.j * src_jet.pv);
        let pushed = [a.dot(&a), a.dot(&b), b.dot(&b)];
        let direct = [img.e.value(), img.f.value(), img.g.value()];
        let scaled = [src.e, src.f, src.g].map(|x| lambda2.value() * x.value());
        let scale = direct[0].max(direct[2]);
        Ok((0..3)
            .map(|k| ((direct[k] - pushed[k]).abs()).max((direct[k] - scaled[k]).abs()) / scale)
            .fold(0.0, f64::max))
    }

    pub fn jacobian_bundle(&self, u: f64, v: f64) -> Result<JacobianBundle> {
        let Mode::Ambient { jacobian, .. } = &self.mode else {
            return Err(Error::Capability("an ambient-map pair"));
        };
        let mut out = JacobianBundle {
            j: Matrix3::zeros(),
            j_u: Matrix3::zeros(),
            j_v: Matrix3::zeros(),
        };
        for i in 0..3 {
            for k in 0..3 {
                let jet = jacobian[i][k].eval_jet3(&[u, v])?;
                out.j[(i, k)] = jet.value();
                out.j_u[(i, k)] = jet.du();
                out.j_v[(i, k)] = jet.dv();
            }
        }
        Ok(out)
    }

    /// The image curve's frame at a source curve point, keeping the source
    /// parameter `s` and chart derivatives.
    pub fn image_frame(&self, p: &CurvePoint, kappa_min: f64) -> Result<ImageFrame> {
        let jet = self.image.jet(p.u, p.v)?;
        let [d1, d2, _] = chain_derivatives(&jet, p.du, p.dv);
        let speed = d1.norm();
        let tangent = d1 / speed;
        let perp = d2 - tangent * d2.dot(&tangent);
        let kappa = perp.norm() / (speed * speed);
        if !(kappa >= kappa_min) {
            return Err(Error::FrenetUndefined { s: p.s, kappa });
        }
        let normal = perp / perp.norm();
        Ok(ImageFrame {
            alpha: jet.p,
            tangent,
            normal,
            binormal: tangent.cross(&normal),
            kappa,
            jet,
        })
    }

    /// Evaluates the sufficient condition for `J o alpha` to be rectifying at
    /// arc length `s`, alongside the actual image point and its rectifying
    /// residual.
    pub fn rectifying_image_condition(&self, curve: &CurveOnSurface, s: f64) -> Result<ImageCondition> {
        let Mode::Ambient { map, .. } = &self.mode else {
            return Err(Error::Capability("an ambient-map pair"));
        };
        self.check_curve(curve)?;
        let kappa_min = curve.options().kappa_min;
        let p = curve.point(s)?;
        let fr = frenet_at(&p, kappa_min)?;
        let mu_over_kappa = p.alpha.dot(&fr.b()) / fr.kappa;
        let d = self.dilation(p.u, p.v)?;
        let jb = self.jacobian_bundle(p.u, p.v)?;
        let (pu, pv) = (p.jet.pu, p.jet.pv);
        let (l, lu, lv) = (d.lambda, d.lambda_u, d.lambda_v);
        let (a, b) = (jb.j * pu, jb.j * pv);
        let uu = a * lu + jb.j_u * pu * l;
        let vu = a * lv + jb.j_v * pu * l;
        let vv = b * lv + jb.j_v * pv * l;
        let uv = b * lu + jb.j_u * pv * l;
        let (u1, v1) = (p.du[0], p.dv[0]);
        let (la, lb) = (a * l, b * l);
        let sum = la.cross(&uu) * (u1 * u1 * u1)
            + la.cross(&vu) * (2.0 * u1 * u1 * v1)
            + la.cross(&vv) * (u1 * v1 * v1)
            + lb.cross(&uu) * (u1 * u1 * v1)
            + lb.cross(&uv) * (2.0 * u1 * v1 * v1)
            + lb.cross(&vv) * (v1 * v1 * v1);
        let rhs = sum * mu_over_kappa + jb.j * p.alpha * l;
        let image_alpha = map.apply(p.alpha)?;
        let frame = self.image_frame(&p, kappa_min)?;
        Ok(ImageCondition {
            s,
            rhs,
            image_alpha,
            difference: (image_alpha - rhs).norm(),
            mu_over_kappa,
            image_residual: frame.rectifying_residual(),
            image_xi: frame.xi(),
            image_mu: frame.mu(),
        })
    }

    pub(crate) fn check_curve(&self, curve: &CurveOnSurface) -> Result<()> {
        if curve.patch().as_ref() != self.source.as_ref() {
            return Err(Error::Invalid("curve does not lie on the pair's source patch".into()));
        }
        Ok(())
    }
}

fn dilation_from(lambda2: &Jet3) -> Dilation {
    let lambda = lambda2.value().sqrt();
    Dilation {
        lambda,
        lambda_u: lambda2.du() / (2.0 * lambda),
        lambda_v: lambda2.dv() / (2.0 * lambda),
    }
}

/// `lambda` range and the worst metric-proportionality residual over an
/// `n x n` grid: `|E_bar - l^2 E| / E_bar`, `|G_bar - l^2 G| / G_bar` and
/// `|F_bar - l^2 F| / max(E_bar, G_bar)` with `l^2 = E_bar / E`.
pub fn conformality_on_grid(source: &SurfacePatch, image: &SurfacePatch, n: usize) -> Result<GridSummary> {
    let mut out = GridSummary {
        lambda_min: f64::INFINITY,
        lambda_max: 0.0,
        residual: 0.0,
        worst: source.domain().center(),
    };
    for (u, v) in source.domain().grid(n) {
        let src = source.metric(u, v)?;
        let img = image.metric(u, v)?;
        let (e, f, g) = (src.e.value(), src.f.value(), src.g.value());
        let (eb, fb, gb) = (img.e.value(), img.f.value(), img.g.value());
        let l2 = eb / e;
        let r = ((eb - l2 * e).abs() / eb)
            .max((gb - l2 * g).abs() / gb)
            .max((fb - l2 * f).abs() / eb.max(gb));
        if r > out.residual || r.is_nan() {
            out.residual = r;
            out.worst = (u, v);
        }
        let l = l2.sqrt();
        out.lambda_min = out.lambda_min.min(l);
        out.lambda_max = out.lambda_max.max(l);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

    fn sphere() -> Arc<SurfacePatch> {
        Arc::new(
            SurfacePatch::parse("cos(u)*cos(v)", "cos(u)*sin(v)", "sin(u)", [-1.2, 1.2], [-PI, PI])
                .unwrap(),
        )
    }

    fn mercator() -> Arc<SurfacePatch> {
        Arc::new(
            SurfacePatch::parse("cos(v)", "sin(v)", "log(sec(u)+tan(u))", [-1.2, 1.2], [-PI, PI])
                .unwrap(),
        )
    }

    fn mercator_pair() -> ConformalPair {
        ConformalPair::build(sphere(), PairSpec::Patch(mercator()), PairOptions::default()).unwrap()
    }

    #[test]
    fn uniform_scaling_is_homothetic() {
        let map = AmbientMap::parse("2*x", "2*y", "2*z").unwrap();
        let pair = ConformalPair::build(sphere(), PairSpec::Ambient(map), PairOptions::default()).unwrap();
        match pair.classification() {
            Classification::Homothetic { c } => assert_abs_diff_eq!(c, 2.0, epsilon = 1e-12),
            other => panic!("expected homothety, got {other:?}"),
        }
        assert!(pair.classification().is_homothetic());
        assert!(!pair.classification().is_isometric());
    }

    #[test]
    fn identity_is_isometric() {
        let map = AmbientMap::parse("x", "y", "z").unwrap();
        let pair = ConformalPair::build(sphere(), PairSpec::Ambient(map), PairOptions::default()).unwrap();
        assert_eq!(pair.classification(), Classification::Isometric);
        assert!(pair.classification().is_homothetic());
        assert_eq!(pair.classification().constant(), Some(1.0));
    }

    #[test]
    fn mercator_dilation() {
        let pair = mercator_pair();
        assert_eq!(pair.classification(), Classification::Conformal);
        let d = pair.dilation(FRAC_PI_4, 0.3).unwrap();
        assert_abs_diff_eq!(d.lambda, SQRT_2, epsilon = 1e-13);
        // lambda_u = sec u tan u
        assert_abs_diff_eq!(d.lambda_u, SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(d.lambda_v, 0.0, epsilon = 1e-14);
        let pair = pair.with_user_lambda(Expr::parse("sec(u)", &["u", "v"]).unwrap()).unwrap();
        assert!(pair.user_lambda().unwrap().1 < 1e-12);
    }

    #[test]
    fn plane_to_sphere_is_rejected() {
        let plane = Arc::new(SurfacePatch::parse("u", "v", "0", [-1.2, 1.2], [-PI, PI]).unwrap());
        let err = ConformalPair::build(plane, PairSpec::Patch(sphere()), PairOptions::default()).unwrap_err();
        match err {
            // worst where cos^2 u is smallest
            Error::NotConformal { u, residual, .. } => {
                assert_abs_diff_eq!(u.abs(), 1.2, epsilon = 1e-12);
                let c2 = 1.2f64.cos().powi(2);
                assert_abs_diff_eq!(residual, (1.0 - c2) / c2, epsilon = 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn metric_derivative_routes() {
        let pair = mercator_pair();
        let md = pair.metric_coefficient_derivatives(FRAC_PI_4, 0.0).unwrap();
        assert_abs_diff_eq!(md.direct[0], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(md.product_rule[0], 4.0, epsilon = 1e-12);
        assert!(md.product_rule_residual < 1e-12);
        // G = cos^2 u has G_u = -1 here while G_v = 0; the printed row misses it
        assert!(md.printed_residual > 0.1);
    }

    #[test]
    fn mercator_epsilon_at_quarter_turn() {
        let eps = mercator_pair().epsilon_corrections(FRAC_PI_4, 0.5).unwrap();
        assert_abs_diff_eq!(eps.e1_11, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eps.e2_12, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eps.e1_22, -0.5, epsilon = 1e-12);
        for x in [eps.e2_11, eps.e1_12, eps.e2_22] {
            assert_abs_diff_eq!(x, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn mercator_barred_christoffel() {
        let b = mercator_pair().barred_christoffel(FRAC_PI_4, 0.5).unwrap();
        assert_abs_diff_eq!(b.via_correction.g1_22, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.direct.g1_22, 0.0, epsilon = 1e-12);
        assert!(b.residual < 1e-9);
    }

    #[test]
    fn constant_dilation_has_no_corrections() {
        let map = AmbientMap::parse("3*y+1", "-3*x", "3*z").unwrap();
        let pair = ConformalPair::build(sphere(), PairSpec::Ambient(map), PairOptions::default()).unwrap();
        let eps = pair.epsilon_corrections(0.3, 0.2).unwrap();
        assert!(eps.max_abs() < 1e-12);
        let b = pair.barred_christoffel(0.3, 0.2).unwrap();
        assert!(b.residual < 1e-12);
        assert!(pair.ambient_metric_consistency(0.3, 0.2).unwrap() < 1e-12);
    }

    #[test]
    fn patch_pairs_lack_ambient_capabilities() {
        let pair = mercator_pair();
        assert!(!pair.is_ambient());
        assert!(matches!(pair.jacobian_bundle(0.0, 0.0), Err(Error::Capability(_))));
    }

    #[test]
    fn jacobian_along_patch() {
        // J(x, y, z) = (x^2, y, z): J_* = diag(2x, 1, 1); along the sphere x = cos u cos v
        let map = AmbientMap::parse("x^2", "y", "z").unwrap();
        let image = map.compose(&sphere()).unwrap();
        let (u, v) = (0.3f64, 0.2f64);
        let want = (u.cos() * v.cos()).powi(2);
        assert_abs_diff_eq!(image.position(u, v).unwrap().x, want, epsilon = 1e-15);
        let pair = ConformalPair {
            source: sphere(),
            image: Arc::new(image),
            mode: Mode::Ambient {
                jacobian: Box::new(map.pulled_back_jacobian(&sphere())),
                map,
            },
            classification: Classification::Conformal,
            summary: GridSummary {
                lambda_min: 0.0,
                lambda_max: 0.0,
                residual: 0.0,
                worst: (0.0, 0.0),
            },
            opts: PairOptions::default(),
            user_lambda: None,
        };
        let jb = pair.jacobian_bundle(u, v).unwrap();
        assert_abs_diff_eq!(jb.j[(0, 0)], 2.0 * u.cos() * v.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(jb.j_u[(0, 0)], -2.0 * u.sin() * v.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(jb.j_v[(0, 0)], -2.0 * u.cos() * v.sin(), epsilon = 1e-15);
        assert_eq!(jb.j_u[(1, 1)], 0.0);
    }
}
