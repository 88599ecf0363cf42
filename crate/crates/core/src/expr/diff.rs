//! Symbolic differentiation with light constant folding.

use super::{Func, Node};

fn is_const(n: &Node, c: f64) -> bool {
    matches!(n, Node::Const(x) if *x == c)
}

fn constant_of(n: &Node) -> Option<f64> {
    match n {
        Node::Const(c) => Some(*c),
        Node::Neg(inner) => constant_of(inner).map(|c| -c),
        _ => None,
    }
}

fn add(a: Node, b: Node) -> Node {
    match (constant_of(&a), constant_of(&b)) {
        (Some(x), Some(y)) => Node::Const(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Node::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Node, b: Node) -> Node {
    match (constant_of(&a), constant_of(&b)) {
        (Some(x), Some(y)) => Node::Const(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => Node::Sub(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Node) -> Node {
    match a {
        Node::Const(c) => Node::Const(-c),
        Node::Neg(inner) => *inner,
        other => Node::Neg(Box::new(other)),
    }
}

fn mul(a: Node, b: Node) -> Node {
    match (constant_of(&a), constant_of(&b)) {
        (Some(x), Some(y)) => Node::Const(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Node::Const(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        _ => Node::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Node, b: Node) -> Node {
    if is_const(&a, 0.0) {
        return Node::Const(0.0);
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Node::Div(Box::new(a), Box::new(b))
}

fn pow(a: Node, exp: Node) -> Node {
    match constant_of(&exp) {
        Some(e) if e == 1.0 => a,
        Some(e) if e == 0.0 => Node::Const(1.0),
        _ => Node::Pow(Box::new(a), Box::new(exp)),
    }
}

fn call(f: Func, a: Node) -> Node {
    Node::Call(f, Box::new(a))
}

pub(super) fn derivative(node: &Node, var: usize) -> Node {
    let d = |n: &Node| derivative(n, var);
    match node {
        Node::Const(_) => Node::Const(0.0),
        Node::Var(i) => Node::Const(if *i == var { 1.0 } else { 0.0 }),
        Node::Neg(a) => neg(d(a)),
        Node::Add(a, b) => add(d(a), d(b)),
        Node::Sub(a, b) => sub(d(a), d(b)),
        Node::Mul(a, b) => add(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
        Node::Div(a, b) => {
            // (a/b)' = a'/b - a b'/b^2
            let first = div(d(a), (**b).clone());
            let second = div(
                mul((**a).clone(), d(b)),
                pow((**b).clone(), Node::Const(2.0)),
            );
            sub(first, second)
        }
        Node::Pow(base, exp) => match constant_of(exp) {
            Some(c) => mul(
                mul(Node::Const(c), pow((**base).clone(), Node::Const(c - 1.0))),
                d(base),
            ),
            None => {
                // (b^e)' = b^e (e' log b + e b'/b)
                let inner = add(
                    mul(d(exp), call(Func::Log, (**base).clone())),
                    div(mul((**exp).clone(), d(base)), (**base).clone()),
                );
                mul(node.clone(), inner)
            }
        },
        Node::Call(f, a) => {
            let a0 = (**a).clone();
            let outer = match f {
                Func::Sin => call(Func::Cos, a0),
                Func::Cos => neg(call(Func::Sin, a0)),
                Func::Tan => pow(call(Func::Sec, a0), Node::Const(2.0)),
                Func::Sec => mul(call(Func::Sec, a0.clone()), call(Func::Tan, a0)),
                Func::Exp => call(Func::Exp, a0),
                Func::Log => div(Node::Const(1.0), a0),
                Func::Sqrt => div(Node::Const(1.0), mul(Node::Const(2.0), call(Func::Sqrt, a0))),
            };
            mul(outer, d(a))
        }
    }
}
