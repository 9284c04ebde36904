//! Truncated bivariate Taylor (jet) arithmetic.
//!
//! A [`Jet2`] of order `K` at a base point carries the normalized Taylor
//! coefficients `c[i][j] = ∂_x^i ∂_y^j f / (i! j!)` for `i + j <= K`.
//! Arithmetic and composition with the analytic primitives are exact at the
//! truncation order, so every partial derivative up to order `K` of an
//! expression is available to machine precision — no finite differencing
//! anywhere in the curvature pipeline.

use thiserror::Error;

use crate::expr::Expr2;

/// Default truncation order; covers `∇^k R` for `k <= 8`.
pub const DEFAULT_JET_ORDER: usize = 10;

#[derive(Debug, Error)]
pub enum JetError {
    #[error("primitive undefined at ({x}, {y}): {reason}")]
    Domain { x: f64, y: f64, reason: String },
    #[error("non-finite jet coefficient at ({x}, {y})")]
    Overflow { x: f64, y: f64 },
    #[error("requested derivative order ({i}, {j}) exceeds jet order {order}")]
    Order { i: usize, j: usize, order: usize },
}

/// Truncated Taylor expansion of a scalar function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    order: usize,
    /// Row-major `(order+1) x (order+1)`; entries with `i + j > order` are 0.
    c: Vec<f64>,
}

impl Jet2 {
    pub fn zero(order: usize) -> Self {
        Jet2 {
            order,
            c: vec![0.0; (order + 1) * (order + 1)],
        }
    }

    pub fn constant(order: usize, v: f64) -> Self {
        let mut j = Jet2::zero(order);
        j.c[0] = v;
        j
    }

    /// The jet of the coordinate `x` at `x0`.
    pub fn var_x(order: usize, x0: f64) -> Self {
        let mut j = Jet2::zero(order);
        j.set(0, 0, x0);
        if order >= 1 {
            j.set(1, 0, 1.0);
        }
        j
    }

    /// The jet of the coordinate `y` at `y0`.
    pub fn var_y(order: usize, y0: f64) -> Self {
        let mut j = Jet2::zero(order);
        j.set(0, 0, y0);
        if order >= 1 {
            j.set(0, 1, 1.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.c[i * (self.order + 1) + j]
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.c[i * (self.order + 1) + j] = v;
    }

    /// Point value `f(x0, y0)`.
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Unnormalized partial `∂_x^i ∂_y^j f` at the base point.
    pub fn partial(&self, i: usize, j: usize) -> Result<f64, JetError> {
        if i + j > self.order {
            return Err(JetError::Order {
                i,
                j,
                order: self.order,
            });
        }
        Ok(self.coeff(i, j) * factorial(i) * factorial(j))
    }

    /// Largest coefficient magnitude; used for scale-aware zero thresholds.
    pub fn scale(&self) -> f64 {
        self.c.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    /// Jet of `∂f/∂x`, one order lower.
    pub fn d_dx(&self) -> Jet2 {
        let k = self.order.saturating_sub(1);
        let mut out = Jet2::zero(k);
        for i in 0..=k {
            for j in 0..=(k - i) {
                out.set(i, j, (i + 1) as f64 * self.coeff(i + 1, j));
            }
        }
        out
    }

    /// Jet of `∂f/∂y`, one order lower.
    pub fn d_dy(&self) -> Jet2 {
        let k = self.order.saturating_sub(1);
        let mut out = Jet2::zero(k);
        for i in 0..=k {
            for j in 0..=(k - i) {
                out.set(i, j, (j + 1) as f64 * self.coeff(i, j + 1));
            }
        }
        out
    }

    /// Truncate (or keep) at order `k`.
    pub fn truncated(&self, k: usize) -> Jet2 {
        let k = k.min(self.order);
        let mut out = Jet2::zero(k);
        for i in 0..=k {
            for j in 0..=(k - i) {
                out.set(i, j, self.coeff(i, j));
            }
        }
        out
    }

    pub fn add(&self, other: &Jet2) -> Jet2 {
        let k = self.order.min(other.order);
        let mut out = Jet2::zero(k);
        for i in 0..=k {
            for j in 0..=(k - i) {
                out.set(i, j, self.coeff(i, j) + other.coeff(i, j));
            }
        }
        out
    }

    pub fn sub(&self, other: &Jet2) -> Jet2 {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Jet2 {
        let mut out = self.clone();
        for v in &mut out.c {
            *v = -*v;
        }
        out
    }

    pub fn scaled(&self, k: f64) -> Jet2 {
        let mut out = self.clone();
        for v in &mut out.c {
            *v *= k;
        }
        out
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Jet2) -> Jet2 {
        let k = self.order.min(other.order);
        let mut out = Jet2::zero(k);
        for i1 in 0..=k {
            for j1 in 0..=(k - i1) {
                let a = self.coeff(i1, j1);
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..=(k - i1 - j1) {
                    for j2 in 0..=(k - i1 - j1 - i2) {
                        let b = other.coeff(i2, j2);
                        if b != 0.0 {
                            let idx = (i1 + i2) * (k + 1) + (j1 + j2);
                            out.c[idx] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// Compose with a univariate analytic function given its Taylor
    /// coefficients `d[n] = g^(n)(u0)/n!` about `u0 = self.value()`:
    /// returns the jet of `g(self)`.
    fn compose(&self, d: &[f64]) -> Jet2 {
        let k = self.order;
        // u_hat = self - u0 has no constant term, so u_hat^(k+1) == 0.
        let mut u_hat = self.clone();
        u_hat.c[0] = 0.0;
        let mut out = Jet2::constant(k, d[0]);
        let mut pw = Jet2::constant(k, 1.0);
        for dn in d.iter().take(k + 1).skip(1) {
            pw = pw.mul(&u_hat);
            out = out.add(&pw.scaled(*dn));
        }
        out
    }

    pub fn powi(&self, e: i32, x: f64, y: f64) -> Result<Jet2, JetError> {
        if e >= 0 {
            let mut out = Jet2::constant(self.order, 1.0);
            for _ in 0..e {
                out = out.mul(self);
            }
            Ok(out)
        } else {
            let inv = self.recip(x, y)?;
            inv.powi(-e, x, y)
        }
    }

    pub fn recip(&self, x: f64, y: f64) -> Result<Jet2, JetError> {
        let u0 = self.value();
        if u0 == 0.0 {
            return Err(JetError::Domain {
                x,
                y,
                reason: "reciprocal of zero".into(),
            });
        }
        let mut d = vec![0.0; self.order + 1];
        let mut t = 1.0 / u0;
        for dn in d.iter_mut() {
            *dn = t;
            t *= -1.0 / u0;
        }
        Ok(self.compose(&d))
    }

    pub fn exp(&self) -> Jet2 {
        let e0 = self.value().exp();
        let mut d = vec![0.0; self.order + 1];
        for (n, dn) in d.iter_mut().enumerate() {
            *dn = e0 / factorial(n);
        }
        self.compose(&d)
    }

    pub fn ln(&self, x: f64, y: f64) -> Result<Jet2, JetError> {
        let u0 = self.value();
        if u0 <= 0.0 {
            return Err(JetError::Domain {
                x,
                y,
                reason: "log of non-positive argument".into(),
            });
        }
        let mut d = vec![0.0; self.order + 1];
        d[0] = u0.ln();
        let mut sign = 1.0;
        let mut p = 1.0 / u0;
        for n in 1..=self.order {
            d[n] = sign * p / n as f64;
            sign = -sign;
            p /= u0;
        }
        Ok(self.compose(&d))
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let mut d = vec![0.0; self.order + 1];
        for (n, dn) in d.iter_mut().enumerate() {
            *dn = cycle[n % 4] / factorial(n);
        }
        self.compose(&d)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let mut d = vec![0.0; self.order + 1];
        for (n, dn) in d.iter_mut().enumerate() {
            *dn = cycle[n % 4] / factorial(n);
        }
        self.compose(&d)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Evaluate `expr` and all partial derivatives up to total order `order`
/// at `point`.
pub fn jet_eval(expr: &Expr2, point: (f64, f64), order: usize) -> Result<Jet2, JetError> {
    let (x, y) = point;
    let j = eval_rec(expr, x, y, order)?;
    if j.is_finite() {
        Ok(j)
    } else {
        Err(JetError::Overflow { x, y })
    }
}

fn eval_rec(expr: &Expr2, x: f64, y: f64, order: usize) -> Result<Jet2, JetError> {
    Ok(match expr {
        Expr2::Const(c) => Jet2::constant(order, *c),
        Expr2::X => Jet2::var_x(order, x),
        Expr2::Y => Jet2::var_y(order, y),
        Expr2::Add(a, b) => eval_rec(a, x, y, order)?.add(&eval_rec(b, x, y, order)?),
        Expr2::Neg(a) => eval_rec(a, x, y, order)?.neg(),
        Expr2::Mul(a, b) => eval_rec(a, x, y, order)?.mul(&eval_rec(b, x, y, order)?),
        Expr2::Pow(a, e) => eval_rec(a, x, y, order)?.powi(*e, x, y)?,
        Expr2::Exp(a) => eval_rec(a, x, y, order)?.exp(),
        Expr2::Ln(a) => eval_rec(a, x, y, order)?.ln(x, y)?,
        Expr2::Sin(a) => eval_rec(a, x, y, order)?.sin(),
        Expr2::Cos(a) => eval_rec(a, x, y, order)?.cos(),
    })
}

/// The partial derivative `∂_x^i ∂_y^j expr` at `point`.
pub fn partial(expr: &Expr2, point: (f64, f64), i: usize, j: usize) -> Result<f64, JetError> {
    jet_eval(expr, point, i + j)?.partial(i, j)
}
