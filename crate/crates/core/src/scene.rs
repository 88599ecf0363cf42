//! JSON scene files: named surfaces, curves on them, conformal pairs and the
//! checks to run.
//!
//! ```json
//! {
//!   "surfaces": { "sphere": { "x": "cos(u)*cos(v)", "y": "cos(u)*sin(v)", "z": "sin(u)",
//!                             "domain": [[-1.2, 1.2], [-3.14159, 3.14159]] } },
//!   "curves":   { "lat": { "surface": "sphere", "u": "pi/6", "v": "t", "range": [-1, 1] } },
//!   "maps":     { "twice": { "mode": "ambient", "source": "sphere", "x": "2*x", "y": "2*y", "z": "2*z" } },
//!   "checks":   [ { "theorem": "GEODESIC_CURVATURE", "pair": "twice", "curve": "lat" } ]
//! }
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::conformal::{AmbientMap, ConformalPair, PairOptions, PairSpec};
use crate::curves::{CurveOnSurface, CurveOptions, ParamCurve};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{Domain, SurfacePatch};
use crate::theorems::{CheckSpec, TheoremId, DEFAULT_SAMPLES, DEFAULT_TOL};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    #[serde(default)]
    surfaces: BTreeMap<String, SurfaceDef>,
    #[serde(default)]
    curves: BTreeMap<String, CurveDef>,
    #[serde(default)]
    maps: BTreeMap<String, MapDef>,
    #[serde(default)]
    checks: Vec<CheckDef>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceDef {
    x: String,
    y: String,
    z: String,
    domain: [[f64; 2]; 2],
    w_min: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveDef {
    surface: String,
    u: String,
    v: String,
    range: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
enum MapDef {
    Ambient {
        source: String,
        x: String,
        y: String,
        z: String,
        lambda: Option<String>,
        grid: Option<usize>,
    },
    Patch {
        source: String,
        image: String,
        lambda: Option<String>,
        grid: Option<usize>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckDef {
    theorem: String,
    pair: String,
    curve: Option<String>,
    samples: Option<usize>,
    tol: Option<f64>,
    tangent: Option<[f64; 2]>,
}

/// A validated scene: every expression parsed, every curve reparameterized,
/// every pair built and classified.
#[derive(Debug, Clone)]
pub struct Scene {
    surfaces: BTreeMap<String, Arc<SurfacePatch>>,
    curves: BTreeMap<String, CurveOnSurface>,
    curve_surface: BTreeMap<String, String>,
    pairs: BTreeMap<String, ConformalPair>,
    pair_source: BTreeMap<String, String>,
    checks: Vec<CheckSpec>,
}

fn pointer(parts: &[&str]) -> String {
    parts
        .iter()
        .map(|p| format!("/{}", p.replace('~', "~0").replace('/', "~1")))
        .collect()
}

impl Scene {
    pub fn load(path: impl AsRef<Path>) -> Result<Scene> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Scene::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Scene> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: SceneFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let pointer = if path == "." {
                String::new()
            } else {
                pointer(&path.split('.').collect::<Vec<_>>())
            };
            Error::Schema {
                pointer,
                message: e.into_inner().to_string(),
            }
        })?;
        Scene::build(file)
    }

    fn build(file: SceneFile) -> Result<Scene> {
        let mut surfaces = BTreeMap::new();
        for (name, def) in &file.surfaces {
            let at = |field: &str| pointer(&["surfaces", name, field]);
            let parse = |field: &str, src: &str| Expr::parse(src, &["u", "v"]).map_err(Error::at(at(field)));
            let domain = Domain::new(def.domain[0], def.domain[1]).map_err(Error::at(at("domain")))?;
            let mut patch = SurfacePatch::new(parse("x", &def.x)?, parse("y", &def.y)?, parse("z", &def.z)?, domain)
                .map_err(Error::at(pointer(&["surfaces", name])))?;
            if let Some(w) = def.w_min {
                patch = patch.with_w_min(w);
            }
            surfaces.insert(name.clone(), Arc::new(patch));
        }

        let resolve = |name: &str, at: String| -> Result<Arc<SurfacePatch>> {
            surfaces.get(name).cloned().ok_or(Error::Unresolved {
                kind: "surface",
                name: name.to_string(),
                pointer: at,
            })
        };

        let mut curves = BTreeMap::new();
        let mut curve_surface = BTreeMap::new();
        for (name, def) in &file.curves {
            let at = |field: &str| pointer(&["curves", name, field]);
            let patch = resolve(&def.surface, at("surface"))?;
            let parse = |field: &str, src: &str| Expr::parse(src, &["t"]).map_err(Error::at(at(field)));
            let curve = ParamCurve::new(parse("u", &def.u)?, parse("v", &def.v)?, def.range)
                .map_err(Error::at(at("range")))?;
            let on = CurveOnSurface::reparameterize(patch, curve, CurveOptions::default())
                .map_err(Error::at(pointer(&["curves", name])))?;
            curves.insert(name.clone(), on);
            curve_surface.insert(name.clone(), def.surface.clone());
        }

        let mut pairs = BTreeMap::new();
        let mut pair_source = BTreeMap::new();
        for (name, def) in &file.maps {
            let at = |field: &str| pointer(&["maps", name, field]);
            let (source, spec, lambda, grid) = match def {
                MapDef::Ambient {
                    source,
                    x,
                    y,
                    z,
                    lambda,
                    grid,
                } => {
                    let parse = |field: &str, src: &str| Expr::parse(src, &["x", "y", "z"]).map_err(Error::at(at(field)));
                    let map = AmbientMap::new(parse("x", x)?, parse("y", y)?, parse("z", z)?)
                        .map_err(Error::at(pointer(&["maps", name])))?;
                    (source, PairSpec::Ambient(map), lambda, grid)
                }
                MapDef::Patch {
                    source,
                    image,
                    lambda,
                    grid,
                } => (source, PairSpec::Patch(resolve(image, at("image"))?), lambda, grid),
            };
            let patch = resolve(source, at("source"))?;
            let mut opts = PairOptions::default();
            if let Some(n) = grid {
                opts.grid = *n;
            }
            let mut pair = ConformalPair::build(patch, spec, opts).map_err(Error::at(pointer(&["maps", name])))?;
            if let Some(src) = lambda {
                let expr = Expr::parse(src, &["u", "v"]).map_err(Error::at(at("lambda")))?;
                pair = pair.with_user_lambda(expr).map_err(Error::at(at("lambda")))?;
            }
            pairs.insert(name.clone(), pair);
            pair_source.insert(name.clone(), source.clone());
        }

        let mut checks = Vec::with_capacity(file.checks.len());
        for (k, def) in file.checks.iter().enumerate() {
            let idx = k.to_string();
            let at = |field: &str| pointer(&["checks", &idx, field]);
            let theorem: TheoremId = def.theorem.parse().map_err(|message| Error::Schema {
                pointer: at("theorem"),
                message,
            })?;
            let Some(source) = pair_source.get(&def.pair) else {
                return Err(Error::Unresolved {
                    kind: "pair",
                    name: def.pair.clone(),
                    pointer: at("pair"),
                });
            };
            if let Some(curve) = &def.curve {
                let Some(surface) = curve_surface.get(curve) else {
                    return Err(Error::Unresolved {
                        kind: "curve",
                        name: curve.clone(),
                        pointer: at("curve"),
                    });
                };
                if surface != source {
                    return Err(Error::At {
                        pointer: at("curve"),
                        source: Box::new(Error::Invalid(format!(
                            "curve {curve:?} lies on {surface:?}, but pair {:?} starts from {source:?}",
                            def.pair
                        ))),
                    });
                }
            } else if theorem.needs_curve() {
                return Err(Error::Schema {
                    pointer: at("curve"),
                    message: format!("{theorem} needs a curve"),
                });
            }
            checks.push(CheckSpec {
                theorem,
                pair: def.pair.clone(),
                curve: def.curve.clone(),
                samples: def.samples.unwrap_or(DEFAULT_SAMPLES),
                tol: def.tol.unwrap_or(DEFAULT_TOL),
                tangent: def.tangent.unwrap_or([1.0, 1.0]),
            });
        }

        Ok(Scene {
            surfaces,
            curves,
            curve_surface,
            pairs,
            pair_source,
            checks,
        })
    }

    pub fn surfaces(&self) -> &BTreeMap<String, Arc<SurfacePatch>> {
        &self.surfaces
    }

    pub fn surface(&self, name: &str) -> Option<&Arc<SurfacePatch>> {
        self.surfaces.get(name)
    }

    pub fn curves(&self) -> &BTreeMap<String, CurveOnSurface> {
        &self.curves
    }

    pub fn curve(&self, name: &str) -> Option<&CurveOnSurface> {
        self.curves.get(name)
    }

    /// Name of the surface a curve lies on.
    pub fn curve_surface(&self, name: &str) -> Option<&str> {
        self.curve_surface.get(name).map(String::as_str)
    }

    pub fn pairs(&self) -> &BTreeMap<String, ConformalPair> {
        &self.pairs
    }

    pub fn pair(&self, name: &str) -> Option<&ConformalPair> {
        self.pairs.get(name)
    }

    /// Name of the source surface of a pair.
    pub fn pair_source(&self, name: &str) -> Option<&str> {
        self.pair_source.get(name).map(String::as_str)
    }

    pub fn checks(&self) -> &[CheckSpec] {
        &self.checks
    }
}
