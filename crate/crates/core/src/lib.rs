//! Differential geometry of parametric surfaces and curves on them, plus a
//! harness that checks how rectifying curves and their curvatures behave under
//! conformal, homothetic and isometric maps.
//!
//! The crate is organised bottom-up:
//!
//! * [`expr`]: analytic expressions and exact order-3 derivative jets;
//! * [`geometry`]: surface patches, fundamental forms, Christoffel symbols;
//! * [`curves`]: curves on patches, arc length, Frenet apparatus, rectifying
//!   decomposition;
//! * [`conformal`]: conformal pairs, dilation field and the correction terms of
//!   the Christoffel symbols;
//! * [`theorems`]: numerical checks that emit [`DeviationReport`]s;
//! * [`scene`]: JSON scene files tying named surfaces, curves, maps and checks
//!   together.

pub mod conformal;
pub mod curves;
mod error;
pub mod expr;
pub mod geometry;
pub mod scene;
pub mod theorems;

pub use error::{Error, Result};
pub use expr::{Expr, Jet3};
pub use conformal::{AmbientMap, Classification, ConformalPair, EpsilonCorrections, PairOptions, PairSpec};
pub use curves::{CurveOnSurface, CurveOptions, FrenetData, ParamCurve, RectifyingDecomposition};
pub use scene::Scene;
pub use theorems::{CheckSpec, DeviationReport, TheoremId, Verdict};
pub use geometry::{Christoffel, Domain, FundamentalForms, SurfaceJet, SurfacePatch};

/// Three-vectors used throughout.
pub type Vec3 = nalgebra::Vector3<f64>;
