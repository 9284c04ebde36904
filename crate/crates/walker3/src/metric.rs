//! Tensor quantities of the Walker metric `g_f` at a point.
//!
//! The metric in adapted coordinates `(x, y, x̃)` is
//! `g(∂x,∂x) = −2 f(x,y)`, `g(∂x,∂x̃) = g(∂y,∂y) = 1`, everything else
//! zero.  All curvature quantities are computed generically from the
//! Christoffel symbols with jet-valued components: the curvature tensor by
//! the coordinate formula, higher covariant derivatives by recursion on the
//! full component table.  The closed-form component lists (`R(∂x,∂y,∂y,∂x)
//! = f_yy` and friends) are reserved for the test oracles.

use serde_json::{json, Value};
use thiserror::Error;

use crate::expr::Expr2;
use crate::jet::{jet_eval, Jet2, JetError, DEFAULT_JET_ORDER};
use crate::tensor::{Connection, CovTensor, JetTensor, SymTable, DIM};

pub const X: usize = 0;
pub const Y: usize = 1;
pub const XT: usize = 2;

#[derive(Debug, Error)]
pub enum WalkerError {
    #[error(transparent)]
    Domain(#[from] JetError),
    #[error("covariant derivative order {k} needs jets of order {needed}, have {available}")]
    Order {
        k: usize,
        needed: usize,
        available: usize,
    },
    #[error("recurrence 1-form undefined: f_yy = 0 at ({0}, {1})")]
    ZeroCurvature(f64, f64),
}

/// Metric and inverse at a point.
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    pub g: SymTable,
    pub g_inv: SymTable,
    pub det: f64,
}

/// Recurrence 1-form `ω` with components over `(x, y, x̃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneForm {
    pub x: f64,
    pub y: f64,
    pub xt: f64,
}

impl OneForm {
    pub fn component(&self, i: usize) -> f64 {
        match i {
            X => self.x,
            Y => self.y,
            _ => self.xt,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"x": self.x, "y": self.y, "xt": self.xt})
    }
}

/// All jet-level geometry of `g_f` at one point; the entry point for the
/// per-operation wrappers below.
pub struct Geometry {
    pub point: (f64, f64),
    jet_order: usize,
    f: Jet2,
}

impl Geometry {
    pub fn new(f: &Expr2, point: (f64, f64), jet_order: usize) -> Result<Self, WalkerError> {
        let f = jet_eval(f, point, jet_order)?;
        Ok(Geometry {
            point,
            jet_order,
            f,
        })
    }

    pub fn jet_order(&self) -> usize {
        self.jet_order
    }

    pub fn f_jet(&self) -> &Jet2 {
        &self.f
    }

    /// Unnormalized partial `f_{x^i y^j}` at the point.
    pub fn f_partial(&self, i: usize, j: usize) -> Result<f64, WalkerError> {
        Ok(self.f.partial(i, j)?)
    }

    pub fn metric(&self) -> MetricAtPoint {
        let fv = self.f.value();
        let mut g = SymTable::zero();
        g.set(X, X, -2.0 * fv);
        g.set(X, XT, 1.0);
        g.set(Y, Y, 1.0);
        let mut g_inv = SymTable::zero();
        g_inv.set(X, XT, 1.0);
        g_inv.set(Y, Y, 1.0);
        g_inv.set(XT, XT, 2.0 * fv);
        MetricAtPoint {
            g,
            g_inv,
            det: -1.0,
        }
    }

    /// Metric with jet-valued entries (only `g_xx` is non-constant).
    fn metric_jets(&self) -> JetTensor {
        let k = self.jet_order;
        let mut g = JetTensor::zero(2, k);
        g.set(&[X, X], self.f.scaled(-2.0));
        g.set(&[X, XT], Jet2::constant(k, 1.0));
        g.set(&[XT, X], Jet2::constant(k, 1.0));
        g.set(&[Y, Y], Jet2::constant(k, 1.0));
        g
    }

    fn inverse_metric_jets(&self) -> JetTensor {
        let k = self.jet_order;
        let mut g = JetTensor::zero(2, k);
        g.set(&[X, XT], Jet2::constant(k, 1.0));
        g.set(&[XT, X], Jet2::constant(k, 1.0));
        g.set(&[Y, Y], Jet2::constant(k, 1.0));
        g.set(&[XT, XT], self.f.scaled(2.0));
        g
    }

    /// Christoffel symbols with jet entries.  The non-zero symbols of `g_f`
    /// are `Γ^x̃_xx = −f_x`, `Γ^y_xx = f_y`, `Γ^x̃_xy = Γ^x̃_yx = −f_y`.
    pub fn connection(&self) -> Connection {
        let fx = self.f.d_dx();
        let fy = self.f.d_dy();
        let mut conn = Connection::new(self.jet_order.saturating_sub(1));
        conn.set(XT, X, X, fx.neg());
        conn.set(Y, X, X, fy.clone());
        conn.set(XT, X, Y, fy.neg());
        conn.set(XT, Y, X, fy.neg());
        conn
    }

    /// Point values `Γ^c_{ab}`.
    pub fn christoffel(&self) -> [[[f64; DIM]; DIM]; DIM] {
        let conn = self.connection();
        let mut out = [[[0.0; DIM]; DIM]; DIM];
        for (c, row) in out.iter_mut().enumerate() {
            for (a, col) in row.iter_mut().enumerate() {
                for (b, v) in col.iter_mut().enumerate() {
                    *v = conn.get(c, a, b).value();
                }
            }
        }
        out
    }

    /// `(0,4)` curvature tensor with jet entries, from the coordinate
    /// formula `R^d_{abc} = ∂_a Γ^d_{bc} − ∂_b Γ^d_{ac} + Γ^e_{bc} Γ^d_{ae}
    /// − Γ^e_{ac} Γ^d_{be}` lowered with the metric.
    pub fn riemann_jets(&self) -> JetTensor {
        let conn = self.connection();
        let order = self.jet_order.saturating_sub(2);
        let g = self.metric_jets();
        let mut r = JetTensor::zero(4, order);
        for a in 0..DIM {
            for b in 0..DIM {
                for c in 0..DIM {
                    // upper-index components R^d_{abc}
                    let mut upper = Vec::with_capacity(DIM);
                    for d in 0..DIM {
                        let mut v = deriv(conn.get(d, b, c), a)
                            .sub(&deriv(conn.get(d, a, c), b))
                            .truncated(order);
                        for e in 0..DIM {
                            v = v
                                .add(&conn.get(e, b, c).mul(conn.get(d, a, e)).truncated(order))
                                .sub(&conn.get(e, a, c).mul(conn.get(d, b, e)).truncated(order));
                        }
                        upper.push(v);
                    }
                    for d in 0..DIM {
                        let mut low = Jet2::zero(order);
                        for (e, up) in upper.iter().enumerate() {
                            low = low.add(&up.mul(g.get(&[e, d])).truncated(order));
                        }
                        r.set(&[a, b, c, d], low);
                    }
                }
            }
        }
        r
    }

    /// `∇^k R` with jet entries, by repeated covariant differentiation.
    pub fn nabla_k_jets(&self, k: usize) -> Result<JetTensor, WalkerError> {
        if k + 2 > self.jet_order {
            return Err(WalkerError::Order {
                k,
                needed: k + 2,
                available: self.jet_order,
            });
        }
        let conn = self.connection();
        let mut t = self.riemann_jets();
        for _ in 0..k {
            t = t.covariant_derivative(&conn);
        }
        Ok(t)
    }

    /// Ricci tensor, scalar curvature, and Schouten tensor
    /// `S = Ric − (Sc/4) g` as jet tensors.
    fn ricci_jets(&self) -> (JetTensor, Jet2, JetTensor) {
        let order = self.jet_order.saturating_sub(2);
        let r = self.riemann_jets();
        let ginv = self.inverse_metric_jets();
        let g = self.metric_jets();
        let mut ric = JetTensor::zero(2, order);
        for a in 0..DIM {
            for b in 0..DIM {
                let mut v = Jet2::zero(order);
                for c in 0..DIM {
                    for d in 0..DIM {
                        let w = ginv.get(&[c, d]);
                        if w.scale() == 0.0 {
                            continue;
                        }
                        v = v.add(&w.mul(r.get(&[c, a, b, d])).truncated(order));
                    }
                }
                ric.set(&[a, b], v);
            }
        }
        let mut sc = Jet2::zero(order);
        for a in 0..DIM {
            for b in 0..DIM {
                sc = sc.add(&ginv.get(&[a, b]).mul(ric.get(&[a, b])).truncated(order));
            }
        }
        let mut schouten = JetTensor::zero(2, order);
        for a in 0..DIM {
            for b in 0..DIM {
                let corr = sc.mul(g.get(&[a, b])).truncated(order).scaled(0.25);
                schouten.set(&[a, b], ric.get(&[a, b]).sub(&corr));
            }
        }
        (ric, sc, schouten)
    }
}

fn deriv(j: &Jet2, c: usize) -> Jet2 {
    match c {
        X => j.d_dx(),
        Y => j.d_dy(),
        _ => Jet2::zero(j.order().saturating_sub(1)),
    }
}

/// Metric, inverse, and determinant of `g_f` at `point`.
pub fn metric_at(f: &Expr2, point: (f64, f64)) -> Result<MetricAtPoint, WalkerError> {
    Ok(Geometry::new(f, point, 2)?.metric())
}

/// Christoffel symbols `Γ^c_{ab}` of `g_f` at `point`.
pub fn christoffel(f: &Expr2, point: (f64, f64)) -> Result<[[[f64; DIM]; DIM]; DIM], WalkerError> {
    Ok(Geometry::new(f, point, 3)?.christoffel())
}

/// `(0,4)` curvature tensor at `point`.
pub fn riemann(f: &Expr2, point: (f64, f64)) -> Result<CovTensor, WalkerError> {
    let geo = Geometry::new(f, point, 4)?;
    Ok(geo.riemann_jets().evaluate(point))
}

/// `∇^k R` at `point`, using the default jet order (or `k + 2` if larger).
pub fn nabla_k_r(f: &Expr2, point: (f64, f64), k: usize) -> Result<CovTensor, WalkerError> {
    let order = DEFAULT_JET_ORDER.max(k + 2);
    nabla_k_r_with_order(f, point, k, order)
}

/// `∇^k R` at `point` with an explicit jet order; errors if `k + 2`
/// exceeds it.
pub fn nabla_k_r_with_order(
    f: &Expr2,
    point: (f64, f64),
    k: usize,
    jet_order: usize,
) -> Result<CovTensor, WalkerError> {
    let geo = Geometry::new(f, point, jet_order)?;
    Ok(geo.nabla_k_jets(k)?.evaluate(point))
}

/// Ricci tensor, scalar curvature, and Schouten tensor at `point`.
pub fn ricci_scalar_schouten(
    f: &Expr2,
    point: (f64, f64),
) -> Result<(SymTable, f64, SymTable), WalkerError> {
    let geo = Geometry::new(f, point, 4)?;
    let (ric, sc, s) = geo.ricci_jets();
    let mut ric_t = SymTable::zero();
    let mut s_t = SymTable::zero();
    for a in 0..DIM {
        for b in a..DIM {
            ric_t.set(a, b, ric.get(&[a, b]).value());
            s_t.set(a, b, s.get(&[a, b]).value());
        }
    }
    Ok((ric_t, sc.value(), s_t))
}

/// Output of [`cotton`]: the `(0,3)` tensor, its `(0,2)` dual, and the
/// orientation convention used for the dual.
#[derive(Debug, Clone)]
pub struct CottonTensors {
    pub c3: CovTensor,
    pub c2: SymTable,
    /// `+1` means `ε^{x y x̃} = +1` was used in the duality contraction.
    pub sign: f64,
}

impl CottonTensors {
    pub fn to_json(&self) -> Value {
        json!({
            "c3": self.c3.to_json(),
            "c2": self.c2.to_json(),
            "epsilon_convention": {"epsilon_x_y_xt": self.sign},
        })
    }
}

/// Cotton tensors at `point`.
///
/// The `(0,3)` tensor is `C_{ijk} = (∇_i S)_{jk} − (∇_j S)_{ik}`.  The
/// `(0,2)` dual contracts with the Levi-Civita symbol normalized so that
/// antisymmetric index pairs are counted once; with `sign = +1`
/// (`ε^{x y x̃} = +1`) the single non-zero entry is `C(∂x,∂x) = −½ f_yyy`.
pub fn cotton(f: &Expr2, point: (f64, f64), sign: f64) -> Result<CottonTensors, WalkerError> {
    let geo = Geometry::new(f, point, 5)?;
    let conn = geo.connection();
    let (_, _, schouten) = geo.ricci_jets();
    let ds = schouten.covariant_derivative(&conn);
    let order = ds.get(&[0, 0, 0]).order();
    let mut c3 = JetTensor::zero(3, order);
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                // (∇S) stores the derivative index last
                let v = ds.get(&[j, k, i]).sub(ds.get(&[i, k, j]));
                c3.set(&[i, j, k], v);
            }
        }
    }
    let c3_pt = c3.evaluate(point);
    let g = geo.metric().g;
    // sqrt|det g| = 1 for every Walker metric in adapted coordinates
    let mut c2 = SymTable::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            let mut v = 0.0;
            for n in 0..DIM {
                for m in 0..DIM {
                    for l in 0..DIM {
                        let eps = levi_civita(n, m, l);
                        if eps == 0.0 {
                            continue;
                        }
                        v += eps * c3_pt.get(&[n, m, i]) * g.get(l, j);
                    }
                }
            }
            c2.0[i][j] = sign * 0.25 * v;
        }
    }
    // symmetrize away rounding asymmetry
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            let avg = 0.5 * (c2.0[i][j] + c2.0[j][i]);
            c2.0[i][j] = avg;
            c2.0[j][i] = avg;
        }
    }
    Ok(CottonTensors {
        c3: c3_pt,
        c2,
        sign,
    })
}

fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Recurrence 1-form `ω = ((ln f_yy)_x, (ln f_yy)_y, 0)` and the max-norm
/// residual of `∇R − ω ⊗ R` at `point`.
pub fn recurrence_form(f: &Expr2, point: (f64, f64)) -> Result<(OneForm, f64), WalkerError> {
    let geo = Geometry::new(f, point, DEFAULT_JET_ORDER.max(4))?;
    let fyy = geo.f_partial(0, 2)?;
    if fyy == 0.0 {
        return Err(WalkerError::ZeroCurvature(point.0, point.1));
    }
    let omega = OneForm {
        x: geo.f_partial(1, 2)? / fyy,
        y: geo.f_partial(0, 3)? / fyy,
        xt: 0.0,
    };
    let r = geo.riemann_jets().evaluate(point);
    let nr = geo.nabla_k_jets(1)?.evaluate(point);
    let mut residual = 0.0_f64;
    for (idx, v) in nr.iter() {
        let base = &idx[..4];
        let expect = omega.component(idx[4]) * r.get(base);
        residual = residual.max((v - expect).abs());
    }
    Ok((omega, residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f_eps_y2(eps: f64) -> Expr2 {
        Expr2::pow(Expr2::y(), 2).scale(eps)
    }

    #[test]
    fn metric_examples() {
        // f = 3y^2 at (0,1): g_xx = -6
        let m = metric_at(&f_eps_y2(3.0), (0.0, 1.0)).unwrap();
        assert_eq!(m.g.get(X, X), -6.0);
        assert_eq!(m.det, -1.0);
        // flat
        let m0 = metric_at(&Expr2::constant(0.0), (2.0, -1.0)).unwrap();
        assert_eq!(m0.g.get(X, X), 0.0);
        assert_eq!(m0.det, -1.0);
        // g_inv(xt, xt) = 2f
        let f = Expr2::parse("exp(y) + x*y", &[]).unwrap();
        let m2 = metric_at(&f, (0.5, 0.3)).unwrap();
        let fv = f.eval(0.5, 0.3).unwrap();
        assert!((m2.g_inv.get(XT, XT) - 2.0 * fv).abs() < 1e-12);
        // g * g_inv = I
        for a in 0..DIM {
            for b in 0..DIM {
                let mut s = 0.0;
                for c in 0..DIM {
                    s += m2.g.get(a, c) * m2.g_inv.get(c, b);
                }
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn christoffel_examples() {
        // f = e^y (b=1 family) at (0,0): Gamma^y_xx = f_y = 1
        let f = Expr2::exp(Expr2::y());
        let gam = christoffel(&f, (0.0, 0.0)).unwrap();
        assert!((gam[Y][X][X] - 1.0).abs() < 1e-12);
        // f = gamma(x) only: Gamma^y_xx = 0, Gamma^xt_xx = -gamma_x
        let g = Expr2::pow(Expr2::x(), 3);
        let gam2 = christoffel(&g, (2.0, 5.0)).unwrap();
        assert_eq!(gam2[Y][X][X], 0.0);
        assert!((gam2[XT][X][X] - (-12.0)).abs() < 1e-12);
    }

    #[test]
    fn riemann_examples() {
        // f = eps y^2, eps = 1: R_{xyyx} = 2
        let r = riemann(&f_eps_y2(1.0), (0.4, -0.2)).unwrap();
        assert!((r.get(&[X, Y, Y, X]) - 2.0).abs() < 1e-12);
        // linear in y: flat
        let lin = Expr2::parse("3*y + x", &[]).unwrap();
        let r0 = riemann(&lin, (1.0, 1.0)).unwrap();
        assert!(r0.max_abs() < 1e-14);
        // f = y^3 + xy at (1,2): f_yy = 6y = 12
        let f = Expr2::parse("y^3 + x*y", &[]).unwrap();
        let r2 = riemann(&f, (1.0, 2.0)).unwrap();
        assert!((r2.get(&[X, Y, Y, X]) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn nabla_examples() {
        // f = e^{2y}/4 at (0,0), k=1: (..; y) = f_yyy = 2
        let f = Expr2::parse("exp(2*y)/4", &[]).unwrap();
        let t = nabla_k_r(&f, (0.0, 0.0), 1).unwrap();
        assert!((t.get(&[X, Y, Y, X, Y]) - 2.0).abs() < 1e-12);
        // f = eps y^2: locally symmetric
        let t0 = nabla_k_r(&f_eps_y2(2.5), (1.0, -3.0), 1).unwrap();
        assert!(t0.max_abs() < 1e-12);
        // f = 1/2 y^2 (x+1)^-2, k = 3 at x = 0: only (..; x,x,x) nonzero,
        // equal to alpha_xxx = -24
        let alpha = Expr2::pow(Expr2::parse("x+1", &[]).unwrap(), -2);
        let f3 = Expr2::mul(Expr2::pow(Expr2::y(), 2).scale(0.5), alpha);
        let t3 = nabla_k_r(&f3, (0.0, 0.7), 3).unwrap();
        assert!((t3.get(&[X, Y, Y, X, X, X, X]) - (-24.0)).abs() < 1e-8);
        for (idx, v) in t3.iter() {
            if idx[4..] != [X, X, X] && !idx[..4].contains(&XT) {
                // everything outside the (ab)(cd) antisymmetry images of
                // the x-derivative slot vanishes
                if idx[4..].contains(&Y) || idx[4..].contains(&XT) {
                    assert!(v.abs() < 1e-8, "unexpected component {idx:?} = {v}");
                }
            }
        }
    }

    #[test]
    fn order_error() {
        let f = Expr2::exp(Expr2::y());
        let e = nabla_k_r_with_order(&f, (0.0, 0.0), 3, 4);
        assert!(matches!(e, Err(WalkerError::Order { .. })));
    }

    #[test]
    fn ricci_examples() {
        let (ric, sc, s) = ricci_scalar_schouten(&f_eps_y2(1.0), (0.0, 0.0)).unwrap();
        assert!((ric.get(X, X) - 2.0).abs() < 1e-12);
        assert!(sc.abs() < 1e-12);
        assert!((s.get(X, X) - ric.get(X, X)).abs() < 1e-12);
        // flat
        let (ric0, _, _) = ricci_scalar_schouten(&Expr2::constant(0.0), (0.0, 0.0)).unwrap();
        assert!(ric0.max_abs() < 1e-14);
    }

    #[test]
    fn ricci_operator_nilpotent() {
        let f = Expr2::parse("exp(y) + x^2*y^2", &[]).unwrap();
        let point = (0.3, 0.8);
        let (ric, _, _) = ricci_scalar_schouten(&f, point).unwrap();
        let m = metric_at(&f, point).unwrap();
        // (1,1) Ricci operator
        let mut op = [[0.0; DIM]; DIM];
        for a in 0..DIM {
            for b in 0..DIM {
                for c in 0..DIM {
                    op[a][b] += m.g_inv.get(a, c) * ric.get(c, b);
                }
            }
        }
        for a in 0..DIM {
            for b in 0..DIM {
                let mut sq = 0.0;
                for c in 0..DIM {
                    sq += op[a][c] * op[c][b];
                }
                assert!(sq.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cotton_examples() {
        // f = y^3: |C(x,x)| = 3, printed value -1/2 f_yyy = -3
        let f = Expr2::pow(Expr2::y(), 3);
        let c = cotton(&f, (0.0, 0.0), 1.0).unwrap();
        assert!((c.c2.get(X, X) - (-3.0)).abs() < 1e-10);
        // quadratic in y: conformally flat
        let q = Expr2::parse("y^2 + 3*y + x^2", &[]).unwrap();
        let c0 = cotton(&q, (1.0, 1.0), 1.0).unwrap();
        assert!(c0.c2.max_abs() < 1e-10);
        assert!(c0.c3.max_abs() < 1e-10);
        // trace-free
        let g = Expr2::parse("exp(y)*(2 + sin(x))", &[]).unwrap();
        let point = (0.2, -0.4);
        let ct = cotton(&g, point, 1.0).unwrap();
        let m = metric_at(&g, point).unwrap();
        let mut trace = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                trace += m.g_inv.get(i, j) * ct.c2.get(i, j);
            }
        }
        assert!(trace.abs() < 1e-10);
        // sign flag flips the dual
        let cm = cotton(&f, (0.0, 0.0), -1.0).unwrap();
        assert!((cm.c2.get(X, X) - 3.0).abs() < 1e-10);
    }

    #[test]
    fn recurrence_examples() {
        // f = e^y: omega = (0, 1, 0)
        let f = Expr2::exp(Expr2::y());
        let (omega, res) = recurrence_form(&f, (0.7, -0.2)).unwrap();
        assert!(omega.x.abs() < 1e-12);
        assert!((omega.y - 1.0).abs() < 1e-12);
        assert_eq!(omega.xt, 0.0);
        assert!(res < 1e-10);
        // f = 1/2 y^2 (x+1)^-2 at x=0: omega_x = alpha_x/alpha = -2
        let alpha = Expr2::pow(Expr2::parse("x+1", &[]).unwrap(), -2);
        let f2 = Expr2::mul(Expr2::pow(Expr2::y(), 2).scale(0.5), alpha);
        let (omega2, res2) = recurrence_form(&f2, (0.0, 1.0)).unwrap();
        assert!((omega2.x - (-2.0)).abs() < 1e-10);
        assert!(omega2.y.abs() < 1e-12);
        assert!(res2 < 1e-10);
        // f_yy = 0 rejected
        let lin = Expr2::y();
        assert!(matches!(
            recurrence_form(&lin, (0.0, 0.0)),
            Err(WalkerError::ZeroCurvature(_, _))
        ));
    }
}
