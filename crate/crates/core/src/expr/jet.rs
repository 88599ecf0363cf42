use std::ops::{Add, Div, Mul, Neg, Sub};

// Multi-indices (i, j) with i + j <= 3, in storage order.
const EXPONENTS: [(usize, usize); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

const fn slot(i: usize, j: usize) -> usize {
    let n = i + j;
    n * (n + 1) / 2 + j
}

const FACTORIAL: [f64; 4] = [1.0, 1.0, 2.0, 6.0];

/// Order-3 truncated Taylor expansion of a scalar in up to two variables.
///
/// Coefficients are stored in Taylor form, `c[i,j] = d^(i+j) f / du^i dv^j / (i! j!)`,
/// so that products are plain truncated convolutions. Each mixed partial has a
/// single slot. Univariate jets leave every `v` slot at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    c: [f64; 10],
}

impl Jet3 {
    pub const ZERO: Jet3 = Jet3 { c: [0.0; 10] };

    pub fn constant(value: f64) -> Jet3 {
        let mut c = [0.0; 10];
        c[0] = value;
        Jet3 { c }
    }

    /// The independent variable `u` (slot 0) or `v` (slot 1) at `value`.
    pub fn variable(value: f64, which: usize) -> Jet3 {
        assert!(which < 2, "jets carry at most two variables");
        let mut c = [0.0; 10];
        c[0] = value;
        c[1 + which] = 1.0;
        Jet3 { c }
    }

    /// Builds a jet from partial derivatives `d^(i+j) f / du^i dv^j`, listed as
    /// `[f, f_u, f_v, f_uu, f_uv, f_vv, f_uuu, f_uuv, f_uvv, f_vvv]`.
    pub fn from_partials(p: [f64; 10]) -> Jet3 {
        let mut c = [0.0; 10];
        for (k, &(i, j)) in EXPONENTS.iter().enumerate() {
            c[k] = p[k] / (FACTORIAL[i] * FACTORIAL[j]);
        }
        Jet3 { c }
    }

    pub fn partials(&self) -> [f64; 10] {
        let mut p = [0.0; 10];
        for (k, &(i, j)) in EXPONENTS.iter().enumerate() {
            p[k] = self.c[k] * FACTORIAL[i] * FACTORIAL[j];
        }
        p
    }

    /// `d^(i+j) f / du^i dv^j` for `i + j <= 3`.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        assert!(i + j <= 3, "jets are truncated at total order 3");
        self.c[slot(i, j)] * FACTORIAL[i] * FACTORIAL[j]
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }
    pub fn du(&self) -> f64 {
        self.partial(1, 0)
    }
    pub fn dv(&self) -> f64 {
        self.partial(0, 1)
    }
    pub fn duu(&self) -> f64 {
        self.partial(2, 0)
    }
    pub fn duv(&self) -> f64 {
        self.partial(1, 1)
    }
    pub fn dvv(&self) -> f64 {
        self.partial(0, 2)
    }
    pub fn duuu(&self) -> f64 {
        self.partial(3, 0)
    }
    pub fn duuv(&self) -> f64 {
        self.partial(2, 1)
    }
    pub fn duvv(&self) -> f64 {
        self.partial(1, 2)
    }
    pub fn dvvv(&self) -> f64 {
        self.partial(0, 3)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    /// `g(self)` for a scalar function with derivatives `[g, g', g'', g''']`
    /// at `self.value()`.
    pub fn compose(&self, g: [f64; 4]) -> Jet3 {
        let mut d = *self;
        d.c[0] = 0.0;
        let d2 = d * d;
        let d3 = d2 * d;
        let mut out = Jet3::constant(g[0]);
        for k in 1..10 {
            out.c[k] = g[1] * d.c[k] + g[2] / 2.0 * d2.c[k] + g[3] / 6.0 * d3.c[k];
        }
        out
    }

    pub fn recip(&self) -> Jet3 {
        let x = self.value();
        let r = 1.0 / x;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn sqrt(&self) -> Jet3 {
        let r = self.value().sqrt();
        self.compose([
            r,
            0.5 / r,
            -0.25 / (r * r * r),
            0.375 / (r * r * r * r * r),
        ])
    }

    pub fn powi(&self, n: i32) -> Jet3 {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Jet3::constant(1.0);
        let mut base = *self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Partial derivative with respect to slot `which`, as a jet of order 2
    /// (the order-3 slots of the result are zero).
    pub fn derivative(&self, which: usize) -> Jet3 {
        assert!(which < 2, "jets carry at most two variables");
        let mut c = [0.0; 10];
        for (k, &(i, j)) in EXPONENTS.iter().enumerate() {
            let (power, lowered) = if which == 0 {
                (i, i.checked_sub(1).map(|i1| (i1, j)))
            } else {
                (j, j.checked_sub(1).map(|j1| (i, j1)))
            };
            if let Some((a, b)) = lowered {
                c[slot(a, b)] += power as f64 * self.c[k];
            }
        }
        Jet3 { c }
    }

    pub fn scale(&self, k: f64) -> Jet3 {
        let mut out = *self;
        out.c.iter_mut().for_each(|x| *x *= k);
        out
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(mut self, rhs: Jet3) -> Jet3 {
        for k in 0..10 {
            self.c[k] += rhs.c[k];
        }
        self
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(mut self, rhs: Jet3) -> Jet3 {
        for k in 0..10 {
            self.c[k] -= rhs.c[k];
        }
        self
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(-1.0)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        let mut c = [0.0; 10];
        for (a, &(ia, ja)) in EXPONENTS.iter().enumerate() {
            if self.c[a] == 0.0 {
                continue;
            }
            for (b, &(ib, jb)) in EXPONENTS.iter().enumerate() {
                let (i, j) = (ia + ib, ja + jb);
                if i + j <= 3 {
                    c[slot(i, j)] += self.c[a] * rhs.c[b];
                }
            }
        }
        Jet3 { c }
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    fn div(self, rhs: Jet3) -> Jet3 {
        self * rhs.recip()
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, k: f64) -> Jet3 {
        self.scale(k)
    }
}

impl Add<f64> for Jet3 {
    type Output = Jet3;
    fn add(mut self, k: f64) -> Jet3 {
        self.c[0] += k;
        self
    }
}
