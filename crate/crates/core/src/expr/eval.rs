use thiserror::Error;

use super::{Func, Jet3, Node, NodeDisplay};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{reason} in `{subexpr}` (argument {arg})")]
    Domain {
        reason: &'static str,
        subexpr: String,
        arg: f64,
    },
    #[error("expected {expected} coordinate(s), got {got}")]
    Arity { expected: usize, got: usize },
    #[error("jets support at most two variables, expression declares {0}")]
    TooManyVariables(usize),
}

impl EvalError {
    pub(crate) fn arity(expected: usize, got: usize) -> Self {
        EvalError::Arity { expected, got }
    }
}

// |cos x| below this makes tan and sec undefined.
const POLE_GUARD: f64 = 1e-12;

trait Scalar: Copy {
    /// Whether derivatives are carried (sqrt(0) is fine for values only).
    const JET: bool;
    fn lift(c: f64) -> Self;
    fn var(value: f64, index: usize) -> Self;
    fn value(&self) -> f64;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn neg(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn apply(self, g: [f64; 4]) -> Self;
    fn finite(&self) -> bool;
}

impl Scalar for f64 {
    const JET: bool = false;
    fn lift(c: f64) -> Self {
        c
    }
    fn var(value: f64, _: usize) -> Self {
        value
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn neg(self) -> Self {
        -self
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn apply(self, g: [f64; 4]) -> Self {
        g[0]
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Jet3 {
    const JET: bool = true;
    fn lift(c: f64) -> Self {
        Jet3::constant(c)
    }
    fn var(value: f64, index: usize) -> Self {
        Jet3::variable(value, index)
    }
    fn value(&self) -> f64 {
        Jet3::value(self)
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn neg(self) -> Self {
        -self
    }
    fn powi(self, n: i32) -> Self {
        Jet3::powi(&self, n)
    }
    fn apply(self, g: [f64; 4]) -> Self {
        self.compose(g)
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

pub(super) fn eval_value(node: &Node, point: &[f64], vars: &[String]) -> Result<f64, EvalError> {
    Evaluator { point, vars }.eval::<f64>(node)
}

pub(super) fn eval_jet(node: &Node, point: &[f64], vars: &[String]) -> Result<Jet3, EvalError> {
    Evaluator { point, vars }.eval::<Jet3>(node)
}

struct Evaluator<'a> {
    point: &'a [f64],
    vars: &'a [String],
}

impl Evaluator<'_> {
    fn domain(&self, reason: &'static str, node: &Node, arg: f64) -> EvalError {
        EvalError::Domain {
            reason,
            subexpr: NodeDisplay {
                node,
                vars: self.vars,
            }
            .to_string(),
            arg,
        }
    }

    fn eval<S: Scalar>(&self, node: &Node) -> Result<S, EvalError> {
        let out = match node {
            Node::Const(c) => S::lift(*c),
            Node::Var(i) => S::var(self.point[*i], *i),
            Node::Neg(a) => self.eval::<S>(a)?.neg(),
            Node::Add(a, b) => self.eval::<S>(a)?.add(self.eval(b)?),
            Node::Sub(a, b) => self.eval::<S>(a)?.sub(self.eval(b)?),
            Node::Mul(a, b) => self.eval::<S>(a)?.mul(self.eval(b)?),
            Node::Div(a, b) => {
                let num = self.eval::<S>(a)?;
                let den = self.eval::<S>(b)?;
                let x = den.value();
                if x == 0.0 {
                    return Err(self.domain("division by zero", node, x));
                }
                num.mul(den.apply(recip_derivs(x)))
            }
            Node::Pow(base, exp) => self.pow::<S>(node, base, exp)?,
            Node::Call(func, arg) => {
                let a = self.eval::<S>(arg)?;
                let g = func_derivs::<S>(*func, a.value()).map_err(|r| self.domain(r, node, a.value()))?;
                a.apply(g)
            }
        };
        if !out.finite() {
            return Err(self.domain("non-finite result", node, out.value()));
        }
        Ok(out)
    }

    fn pow<S: Scalar>(&self, node: &Node, base: &Node, exp: &Node) -> Result<S, EvalError> {
        let b = self.eval::<S>(base)?;
        if let Some(c) = constant_value(exp) {
            if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 {
                let n = c as i32;
                if n < 0 && b.value() == 0.0 {
                    return Err(self.domain("division by zero", node, 0.0));
                }
                return Ok(b.powi(n));
            }
            let x = b.value();
            if x <= 0.0 {
                return Err(self.domain("non-integer power of non-positive base", node, x));
            }
            let g = [
                x.powf(c),
                c * x.powf(c - 1.0),
                c * (c - 1.0) * x.powf(c - 2.0),
                c * (c - 1.0) * (c - 2.0) * x.powf(c - 3.0),
            ];
            return Ok(b.apply(g));
        }
        // General exponent: b^e = exp(e log b), defined for b > 0.
        let x = b.value();
        if x <= 0.0 {
            return Err(self.domain("non-constant power of non-positive base", node, x));
        }
        let e = self.eval::<S>(exp)?;
        let log_b = b.apply(log_derivs(x));
        let prod = e.mul(log_b);
        let y = prod.value().exp();
        Ok(prod.apply([y; 4]))
    }
}

/// Value of a constant subtree such as `2`, `-1` or `-(0.5)`.
/// Value of a variable-free subtree, if it evaluates to a finite number.
fn constant_value(node: &Node) -> Option<f64> {
    let v = match node {
        Node::Const(c) => *c,
        Node::Var(_) => return None,
        Node::Neg(a) => -constant_value(a)?,
        Node::Add(a, b) => constant_value(a)? + constant_value(b)?,
        Node::Sub(a, b) => constant_value(a)? - constant_value(b)?,
        Node::Mul(a, b) => constant_value(a)? * constant_value(b)?,
        Node::Div(a, b) => constant_value(a)? / constant_value(b)?,
        Node::Pow(a, b) => {
            let (x, e) = (constant_value(a)?, constant_value(b)?);
            if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
                x.powi(e as i32)
            } else {
                x.powf(e)
            }
        }
        Node::Call(f, a) => {
            let x = constant_value(a)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Sec => 1.0 / x.cos(),
                Func::Exp => x.exp(),
                Func::Log => x.ln(),
                Func::Sqrt => x.sqrt(),
            }
        }
    };
    v.is_finite().then_some(v)
}

fn recip_derivs(x: f64) -> [f64; 4] {
    let r = 1.0 / x;
    [r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]
}

fn log_derivs(x: f64) -> [f64; 4] {
    let r = 1.0 / x;
    [x.ln(), r, -r * r, 2.0 * r * r * r]
}

fn func_derivs<S: Scalar>(func: Func, x: f64) -> Result<[f64; 4], &'static str> {
    Ok(match func {
        Func::Sin => {
            let (s, c) = x.sin_cos();
            [s, c, -s, -c]
        }
        Func::Cos => {
            let (s, c) = x.sin_cos();
            [c, -s, -c, s]
        }
        Func::Tan => {
            if x.cos().abs() < POLE_GUARD {
                return Err("tan at a pole");
            }
            let t = x.tan();
            let s2 = 1.0 + t * t;
            [t, s2, 2.0 * t * s2, s2 * (2.0 + 6.0 * t * t)]
        }
        Func::Sec => {
            let c = x.cos();
            if c.abs() < POLE_GUARD {
                return Err("sec at a pole");
            }
            let s = 1.0 / c;
            let t = x.tan();
            [
                s,
                s * t,
                s * t * t + s * s * s,
                s * t * t * t + 5.0 * s * s * s * t,
            ]
        }
        Func::Exp => {
            let e = x.exp();
            [e; 4]
        }
        Func::Log => {
            if x <= 0.0 {
                return Err("log of non-positive argument");
            }
            log_derivs(x)
        }
        Func::Sqrt => {
            if x < 0.0 || (S::JET && x == 0.0) {
                return Err("sqrt of non-positive argument");
            }
            let r = x.sqrt();
            if S::JET {
                [r, 0.5 / r, -0.25 / (r * r * r), 0.375 / (r * r * r * r * r)]
            } else {
                [r, 0.0, 0.0, 0.0]
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn jet(src: &str, point: &[f64]) -> Result<Jet3, EvalError> {
        let vars: &[&str] = if point.len() == 1 { &["u"] } else { &["u", "v"] };
        Expr::parse(src, vars).unwrap().eval_jet3(point)
    }

    #[test]
    fn polynomial_jet() {
        let j = jet("u^2+v", &[1.0, 2.0]).unwrap();
        assert_eq!(j.value(), 3.0);
        assert_eq!(j.du(), 2.0);
        assert_eq!(j.dv(), 1.0);
        assert_eq!(j.duu(), 2.0);
        assert_eq!(j.duv(), 0.0);
        assert_eq!(j.dvv(), 0.0);
    }

    #[test]
    fn sine_taylor_tower() {
        let j = jet("sin(u)", &[0.0]).unwrap();
        assert_eq!(j.value(), 0.0);
        assert_eq!(j.du(), 1.0);
        assert_eq!(j.duu(), 0.0);
        assert_eq!(j.duuu(), -1.0);
        assert_eq!(j.dv(), 0.0);
        assert_eq!(j.dvvv(), 0.0);
    }

    #[test]
    fn secant_at_quarter_turn() {
        let j = jet("sec(u)", &[FRAC_PI_4]).unwrap();
        assert!((j.value() - SQRT_2).abs() < 1e-15);
        // sec' = sec tan, sec'' = sec tan^2 + sec^3
        assert!((j.du() - SQRT_2).abs() < 1e-14);
        assert!((j.duu() - (SQRT_2 + 2.0 * SQRT_2)).abs() < 1e-13);
    }

    #[test]
    fn domain_violations_name_the_subexpression() {
        match jet("1 + log(u - 1)", &[0.5]).unwrap_err() {
            EvalError::Domain { subexpr, .. } => assert_eq!(subexpr, "log(u-1.0)"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            jet("u/(v-2)", &[1.0, 2.0]),
            Err(EvalError::Domain { reason: "division by zero", .. })
        ));
        assert!(jet("sec(u)", &[FRAC_PI_2]).is_err());
        assert!(jet("tan(u)", &[3.0 * FRAC_PI_2]).is_err());
        assert!(jet("u^0.5", &[-1.0]).is_err());
        assert!(jet("sqrt(u)", &[0.0]).is_err());
        // values alone are fine at sqrt(0)
        assert_eq!(Expr::parse("sqrt(u)", &["u"]).unwrap().eval(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn integer_powers_allow_negative_base() {
        let j = jet("u^3", &[-2.0]).unwrap();
        assert_eq!(j.value(), -8.0);
        assert_eq!(j.du(), 12.0);
        let j = jet("u^-2", &[-2.0]).unwrap();
        assert_eq!(j.value(), 0.25);
        assert_eq!(j.du(), 0.25);
    }

    #[test]
    fn real_and_variable_exponents() {
        let j = jet("u^1.5", &[4.0]).unwrap();
        assert!((j.value() - 8.0).abs() < 1e-14);
        assert!((j.du() - 3.0).abs() < 1e-14);
        assert!((j.duu() - 0.375).abs() < 1e-15);
        // u^v at (2, 3): d/dv = u^v ln u
        let j = jet("u^v", &[2.0, 3.0]).unwrap();
        assert!((j.value() - 8.0).abs() < 1e-13);
        assert!((j.dv() - 8.0 * 2f64.ln()).abs() < 1e-13);
        assert!((j.du() - 12.0).abs() < 1e-13);
    }

    #[test]
    fn arity_and_variable_count_checked() {
        let e = Expr::parse("x+y+z", &["x", "y", "z"]).unwrap();
        assert_eq!(e.eval(&[1.0, 2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(e.eval_jet3(&[1.0, 2.0, 3.0]), Err(EvalError::TooManyVariables(3)));
        assert!(matches!(e.eval(&[1.0]), Err(EvalError::Arity { .. })));
    }
}
