use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("point ({u}, {v}) lies outside the patch domain")]
    OutOfDomain { u: f64, v: f64 },

    #[error("degenerate patch at ({u}, {v}): EG-F^2 = {w2:e}")]
    Degenerate { u: f64, v: f64, w2: f64 },

    #[error("patch is not in Monge form (u, v, f(u,v))")]
    NotMonge,

    #[error("curve is not regular at t = {t}: speed {speed:e}")]
    Irregular { t: f64, speed: f64 },

    #[error("curve leaves the patch domain at t = {t} (u = {u}, v = {v})")]
    CurveOutsideDomain { t: f64, u: f64, v: f64 },

    #[error("Frenet frame undefined at s = {s}: curvature {kappa:e}")]
    FrenetUndefined { s: f64, kappa: f64 },

    #[error("arc length {s} outside [0, {length}]")]
    ArcLengthOutOfRange { s: f64, length: f64 },

    #[error("curve is not rectifying: max |alpha . n| = {residual:e}")]
    NotRectifying { residual: f64 },

    #[error("pair is not conformal: residual {residual:e} at ({u}, {v})")]
    NotConformal { u: f64, v: f64, residual: f64 },

    #[error("operation requires {0}")]
    Capability(&'static str),

    #[error("{0}")]
    Invalid(String),

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("schema violation at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error("unresolved {kind} {name:?} referenced at {pointer}")]
    Unresolved {
        kind: &'static str,
        name: String,
        pointer: String,
    },

    #[error("{pointer}: {source}")]
    At { pointer: String, source: Box<Error> },
}

impl Error {
    /// True for failures caused by numerical degeneracy rather than bad input.
    pub fn is_numerical(&self) -> bool {
        if let Error::At { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::Eval(_)
                | Error::Degenerate { .. }
                | Error::Irregular { .. }
                | Error::FrenetUndefined { .. }
        )
    }

    /// JSON pointer into the scene file, when the error came from one.
    pub fn pointer(&self) -> Option<&str> {
        match self {
            Error::Schema { pointer, .. } | Error::Unresolved { pointer, .. } | Error::At { pointer, .. } => {
                Some(pointer)
            }
            _ => None,
        }
    }

    pub(crate) fn at<E: Into<Error>>(pointer: impl Into<String>) -> impl FnOnce(E) -> Error {
        let pointer = pointer.into();
        move |source| Error::At {
            pointer,
            source: Box::new(source.into()),
        }
    }
}
