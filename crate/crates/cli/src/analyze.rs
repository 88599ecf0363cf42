use rectiform::curves::{frenet_at, geodesic_curvature_from, normal_curvature_from};
use rectiform::geometry::Christoffel;
use rectiform::{CurveOnSurface, Error};
use serde::Serialize;

pub const COLUMNS: [&str; 11] = [
    "s",
    "u",
    "v",
    "kappa",
    "tau",
    "kappa_n",
    "kappa_g",
    "xi",
    "mu",
    "alpha_dot_n",
    "status",
];

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub s: f64,
    pub u: f64,
    pub v: f64,
    pub kappa: f64,
    pub tau: Option<f64>,
    pub kappa_n: f64,
    pub kappa_g: f64,
    pub xi: f64,
    pub mu: Option<f64>,
    pub alpha_dot_n: Option<f64>,
    pub status: &'static str,
}

impl Row {
    pub fn flagged(&self) -> bool {
        self.status != "ok"
    }

    pub fn record(&self) -> Vec<String> {
        let num = |x: f64| format!("{x:.16e}");
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        vec![
            num(self.s),
            num(self.u),
            num(self.v),
            num(self.kappa),
            opt(self.tau),
            num(self.kappa_n),
            num(self.kappa_g),
            num(self.xi),
            opt(self.mu),
            opt(self.alpha_dot_n),
            self.status.to_string(),
        ]
    }
}

/// One row per arc-length sample; samples where the Frenet frame is undefined
/// are kept and flagged. Other failures carry the sample index.
pub fn rows(curve: &CurveOnSurface, n: usize) -> Result<Vec<Row>, (usize, Error)> {
    let patch = curve.patch();
    curve
        .grid(n)
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            let row = || -> Result<Row, Error> {
                let p = curve.point(s)?;
                let forms = patch.fundamental_forms(p.u, p.v)?;
                let metric = patch.metric(p.u, p.v)?;
                let kappa_g = geodesic_curvature_from(&p, &Christoffel::from_metric(&metric), forms.w);
                let mut row = Row {
                    s,
                    u: p.u,
                    v: p.v,
                    kappa: p.d[1].norm(),
                    tau: None,
                    kappa_n: normal_curvature_from(&p, forms.l, forms.m, forms.n),
                    kappa_g,
                    xi: p.alpha.dot(&p.d[0]),
                    mu: None,
                    alpha_dot_n: None,
                    status: "ok",
                };
                match frenet_at(&p, curve.options().kappa_min) {
                    Ok(fr) => {
                        row.tau = Some(fr.tau);
                        row.mu = Some(p.alpha.dot(&fr.b()));
                        row.alpha_dot_n = Some(p.alpha.dot(&fr.n()));
                    }
                    Err(Error::FrenetUndefined { .. }) => row.status = "frenet-undefined",
                    Err(e) => return Err(e),
                }
                Ok(row)
            };
            row().map_err(|e| (k, e))
        })
        .collect()
}
