//! Curvature-homogeneity classification and isometries onto the model
//! manifolds.
//!
//! The classes are decided by two scalar invariants of `g_f`:
//! `b = f_yyy/f_yy` (an isometry invariant) and, when `b = 0`,
//! `c = f_xyy·f_yy^{−3/2}`.  Isometries are coordinate transformations
//! `T(x,y,x̃) = (σx+τ, y+φ(x), ρx̃ − ρφ_x y + ψ(x))` with `σρ = 1`, which
//! pull `g_f` back to `g_f̃` with
//! `f̃ = σ²f(σx+τ, y+φ) + φ_xx y − σψ_x − ½φ_x²`.

use std::rc::Rc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::expr::{Expr2, ExprError, Var};
use crate::frames::{frame_1, model_invariants, FrameError};
use crate::jet::{jet_eval, JetError};
use crate::metric::{metric_at, WalkerError};
use crate::ode::{integrate, OdeOptions, Termination};
use crate::tensor::DIM;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("classification requires f_yy > 0 on the grid, got {value} at ({x}, {y})")]
    Sign { x: f64, y: f64, value: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("family is not classified as one of the three model families: {0}")]
    Unclassified(String),
    #[error("ODE solve for the isometry failed: {0}")]
    OdeSolve(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Walker(#[from] WalkerError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Rectangular (x, y) domain on which a family is considered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl DomainBox {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        DomainBox { x0, x1, y0, y1 }
    }

    /// `nx × ny` sample grid including the box corners.
    pub fn grid(&self, nx: usize, ny: usize) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            let tx = if nx == 1 { 0.5 } else { i as f64 / (nx - 1) as f64 };
            let x = self.x0 + tx * (self.x1 - self.x0);
            for j in 0..ny {
                let ty = if ny == 1 { 0.5 } else { j as f64 / (ny - 1) as f64 };
                pts.push((x, self.y0 + ty * (self.y1 - self.y0)));
            }
        }
        pts
    }

    pub fn x_samples(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| self.x0 + (self.x1 - self.x0) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// A defining function together with its structural form, when known.
#[derive(Debug, Clone)]
pub enum StructuredFamily {
    /// `f = b⁻²α(x)e^{by} + β(x)y + γ(x)` with `b ≠ 0`, `α > 0`.
    ExpY {
        alpha: Expr2,
        b: f64,
        beta: Expr2,
        gamma: Expr2,
        domain: DomainBox,
    },
    /// `f = ½y²α(x) + β(x)y + γ(x)` with `α > 0` (or `α ≡ 0`: flat).
    QuadY {
        alpha: Expr2,
        beta: Expr2,
        gamma: Expr2,
        domain: DomainBox,
    },
    /// No structural information; classified by sampling.
    Generic { f: Expr2, domain: DomainBox },
}

impl StructuredFamily {
    pub fn domain(&self) -> DomainBox {
        match self {
            StructuredFamily::ExpY { domain, .. }
            | StructuredFamily::QuadY { domain, .. }
            | StructuredFamily::Generic { domain, .. } => *domain,
        }
    }

    /// Assemble the defining function `f(x, y)`.
    pub fn f_expr(&self) -> Expr2 {
        match self {
            StructuredFamily::ExpY {
                alpha,
                b,
                beta,
                gamma,
                ..
            } => Expr2::add(
                Expr2::add(
                    Expr2::mul(alpha.clone(), Expr2::exp(Expr2::y().scale(*b)))
                        .scale(1.0 / (b * b)),
                    Expr2::mul(beta.clone(), Expr2::y()),
                ),
                gamma.clone(),
            ),
            StructuredFamily::QuadY {
                alpha,
                beta,
                gamma,
                ..
            } => Expr2::add(
                Expr2::add(
                    Expr2::mul(alpha.clone(), Expr2::pow(Expr2::y(), 2)).scale(0.5),
                    Expr2::mul(beta.clone(), Expr2::y()),
                ),
                gamma.clone(),
            ),
            StructuredFamily::Generic { f, .. } => f.clone(),
        }
    }
}

/// Classification outcome per Theorems 1.3/1.4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassTag {
    Flat,
    LocallySymmetricCw { eps: f64 },
    HomogeneousN { b: f64 },
    HomogeneousP { c: f64 },
    OneCurvHomOnlyN1 { b: f64 },
    NotOneCurvHom,
}

/// Invariant samples backing a classification decision.
#[derive(Debug, Clone, Copy)]
pub struct EvidenceRow {
    pub x: f64,
    pub y: f64,
    pub f_yy: f64,
    /// `f_yyy / f_yy`
    pub b_ratio: f64,
    /// `f_xyy · f_yy^{−3/2}`
    pub c_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub tag: ClassTag,
    pub evidence: Vec<EvidenceRow>,
}

impl Classification {
    pub fn to_json(&self) -> Value {
        let (tag, params) = match self.tag {
            ClassTag::Flat => ("Flat", json!({})),
            ClassTag::LocallySymmetricCw { eps } => ("LocallySymmetricCW", json!({"eps": eps})),
            ClassTag::HomogeneousN { b } => ("Homogeneous_N", json!({"b": b})),
            ClassTag::HomogeneousP { c } => ("Homogeneous_P", json!({"c": c})),
            ClassTag::OneCurvHomOnlyN1 { b } => ("OneCurvHomOnly_N1", json!({"b": b})),
            ClassTag::NotOneCurvHom => ("NotOneCurvHom", json!({})),
        };
        let rows: Vec<Value> = self
            .evidence
            .iter()
            .map(|r| {
                json!({
                    "x": r.x, "y": r.y, "f_yy": r.f_yy,
                    "b_ratio": r.b_ratio, "c_ratio": r.c_ratio,
                })
            })
            .collect();
        json!({"tag": tag, "parameters": params, "evidence": rows})
    }
}

/// Constancy test of the design decisions: constant when
/// `(max − min) ≤ 1e-7·(1 + |mean|)`; returns the mean if so.
fn constant_value(vals: &[f64]) -> Option<f64> {
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    if max - min <= 1e-7 * (1.0 + mean.abs()) {
        Some(mean)
    } else {
        None
    }
}

const B_ZERO_TIE: f64 = 1e-8;

fn evidence_rows(f: &Expr2, grid: &[(f64, f64)]) -> Result<Vec<EvidenceRow>, ClassifyError> {
    let mut rows = Vec::with_capacity(grid.len());
    for &(x, y) in grid {
        let jet = jet_eval(f, (x, y), 4)?;
        let fyy = jet.partial(0, 2)?;
        let fyyy = jet.partial(0, 3)?;
        let fxyy = jet.partial(1, 2)?;
        let (b_ratio, c_ratio) = if fyy > 0.0 {
            (fyyy / fyy, fxyy * fyy.powf(-1.5))
        } else {
            (f64::NAN, f64::NAN)
        };
        rows.push(EvidenceRow {
            x,
            y,
            f_yy: fyy,
            b_ratio,
            c_ratio,
        });
    }
    Ok(rows)
}

/// Classify by sampling invariant ratios on a `5 × 5` grid over `domain`.
pub fn classify_sampled(f: &Expr2, domain: DomainBox) -> Result<Classification, ClassifyError> {
    let grid = domain.grid(5, 5);
    let rows = evidence_rows(f, &grid)?;
    let scale = rows.iter().fold(0.0_f64, |m, r| m.max(r.f_yy.abs()));
    if scale <= 1e-9 {
        return Ok(Classification {
            tag: ClassTag::Flat,
            evidence: rows,
        });
    }
    if let Some(bad) = rows.iter().find(|r| r.f_yy <= 0.0) {
        return Err(ClassifyError::Sign {
            x: bad.x,
            y: bad.y,
            value: bad.f_yy,
        });
    }
    let b_ratios: Vec<f64> = rows.iter().map(|r| r.b_ratio).collect();
    let Some(b) = constant_value(&b_ratios) else {
        return Ok(Classification {
            tag: ClassTag::NotOneCurvHom,
            evidence: rows,
        });
    };
    if b.abs() <= B_ZERO_TIE {
        // b = 0 branch: f_yy = α(x); decide by c = α_x α^{−3/2}
        let c_ratios: Vec<f64> = rows.iter().map(|r| r.c_ratio).collect();
        let c_scale = c_ratios.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if c_scale <= B_ZERO_TIE {
            let fyy_vals: Vec<f64> = rows.iter().map(|r| r.f_yy).collect();
            if let Some(alpha) = constant_value(&fyy_vals) {
                return Ok(Classification {
                    tag: ClassTag::LocallySymmetricCw { eps: alpha / 2.0 },
                    evidence: rows,
                });
            }
        }
        let tag = match constant_value(&c_ratios) {
            Some(c) if c.abs() > B_ZERO_TIE => ClassTag::HomogeneousP { c },
            _ => ClassTag::NotOneCurvHom,
        };
        return Ok(Classification {
            tag,
            evidence: rows,
        });
    }
    // b ≠ 0: at least 1-curvature homogeneous; refine by the ∇² slot
    // of the frame_1 model record, which must equal −1 for 𝔑₂(b).
    let mut dd11s = Vec::with_capacity(grid.len());
    for &p in &grid {
        let fr = frame_1(f, p)?;
        let rec = model_invariants(f, p, &fr, 2)?;
        dd11s.push(rec.dd.unwrap()[0]);
    }
    let tag = match constant_value(&dd11s) {
        Some(dd11) if (dd11 + 1.0).abs() <= 1e-7 => ClassTag::HomogeneousN { b },
        _ => ClassTag::OneCurvHomOnlyN1 { b },
    };
    Ok(Classification {
        tag,
        evidence: rows,
    })
}

/// Classify using the structural form of the family.
pub fn classify_structured(fam: &StructuredFamily) -> Result<Classification, ClassifyError> {
    let domain = fam.domain();
    let evidence = evidence_rows(&fam.f_expr(), &domain.grid(5, 5))?;
    match fam {
        StructuredFamily::Generic { f, domain } => classify_sampled(f, *domain),
        StructuredFamily::ExpY { alpha, b, beta, .. } => {
            if b.abs() <= B_ZERO_TIE {
                return Err(ClassifyError::Domain(
                    "ExpY requires b != 0 (use QuadY for the b = 0 branch)".into(),
                ));
            }
            let xs = domain.x_samples(25);
            // β must match b⁻¹α⁻¹(α_xx − α_x²/α) for full homogeneity
            let ax = alpha.diff(Var::X);
            let axx = ax.diff(Var::X);
            let mut matches = true;
            for &x in &xs {
                let a = alpha.eval(x, 0.0)?;
                if a <= 0.0 {
                    return Err(ClassifyError::Domain(format!(
                        "alpha(x) must be positive, got {a} at x = {x}"
                    )));
                }
                let axv = ax.eval(x, 0.0)?;
                let axxv = axx.eval(x, 0.0)?;
                let beta_req = (axxv - axv * axv / a) / (b * a);
                let beta_v = beta.eval(x, 0.0)?;
                if (beta_v - beta_req).abs() > 1e-7 * (1.0 + beta_req.abs()) {
                    matches = false;
                }
            }
            let tag = if matches {
                ClassTag::HomogeneousN { b: *b }
            } else {
                ClassTag::OneCurvHomOnlyN1 { b: *b }
            };
            Ok(Classification { tag, evidence })
        }
        StructuredFamily::QuadY { alpha, .. } => {
            let xs = domain.x_samples(25);
            let ax = alpha.diff(Var::X);
            let mut a_vals = Vec::with_capacity(xs.len());
            let mut c_vals = Vec::with_capacity(xs.len());
            for &x in &xs {
                let a = alpha.eval(x, 0.0)?;
                a_vals.push(a);
                if a > 0.0 {
                    c_vals.push(ax.eval(x, 0.0)? * a.powf(-1.5));
                }
            }
            let a_scale = a_vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if a_scale <= 1e-9 {
                return Ok(Classification {
                    tag: ClassTag::Flat,
                    evidence,
                });
            }
            if let Some(&bad) = a_vals.iter().find(|v| **v <= 0.0) {
                return Err(ClassifyError::Domain(format!(
                    "alpha(x) must be positive on the domain, found {bad}"
                )));
            }
            if let Some(alpha_c) = constant_value(&a_vals) {
                return Ok(Classification {
                    tag: ClassTag::LocallySymmetricCw {
                        eps: alpha_c / 2.0,
                    },
                    evidence,
                });
            }
            let tag = match constant_value(&c_vals) {
                Some(c) if c.abs() > B_ZERO_TIE => ClassTag::HomogeneousP { c },
                _ => ClassTag::NotOneCurvHom,
            };
            Ok(Classification { tag, evidence })
        }
    }
}

/// `(value, first derivative, second derivative)` of a function of `x`.
type FnOfX3 = Rc<dyn Fn(f64) -> [f64; 3]>;
/// `(value, first derivative)` of a function of `x`.
type FnOfX2 = Rc<dyn Fn(f64) -> [f64; 2]>;

/// Coordinate transformation
/// `T(x,y,x̃) = (σx+τ, y+φ(x), ρx̃ − ρφ_x(x) y + ψ(x) + s)` with
/// `ρ = 1/σ`; every isometry used in this crate has this shape.
#[derive(Clone)]
pub struct Transform {
    pub sigma: f64,
    pub tau: f64,
    pub xt_shift: f64,
    phi: FnOfX3,
    psi: FnOfX2,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform")
            .field("sigma", &self.sigma)
            .field("tau", &self.tau)
            .field("xt_shift", &self.xt_shift)
            .finish_non_exhaustive()
    }
}

impl Transform {
    pub fn new(sigma: f64, tau: f64, xt_shift: f64, phi: FnOfX3, psi: FnOfX2) -> Self {
        assert!(sigma != 0.0);
        Transform {
            sigma,
            tau,
            xt_shift,
            phi,
            psi,
        }
    }

    pub fn identity() -> Self {
        Transform::shear(Rc::new(|_| [0.0; 3]), Rc::new(|_| [0.0; 2]))
    }

    /// Pure shear `T(x,y,x̃) = (x, y+φ, x̃ − φ_x y + ψ)`.
    pub fn shear(phi: FnOfX3, psi: FnOfX2) -> Self {
        Transform::new(1.0, 0.0, 0.0, phi, psi)
    }

    pub fn rho(&self) -> f64 {
        1.0 / self.sigma
    }

    pub fn phi(&self, x: f64) -> [f64; 3] {
        (self.phi)(x)
    }

    pub fn psi(&self, x: f64) -> [f64; 2] {
        (self.psi)(x)
    }

    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        let [x, y, xt] = p;
        let ph = self.phi(x);
        let ps = self.psi(x);
        let rho = self.rho();
        [
            self.sigma * x + self.tau,
            y + ph[0],
            rho * xt - rho * ph[1] * y + ps[0] + self.xt_shift,
        ]
    }

    /// Columns `T_*∂x, T_*∂y, T_*∂x̃` at `(x, y)`.
    pub fn jacobian(&self, x: f64, y: f64) -> [[f64; DIM]; DIM] {
        let ph = self.phi(x);
        let ps = self.psi(x);
        let rho = self.rho();
        [
            [self.sigma, ph[1], -rho * ph[2] * y + ps[1]],
            [0.0, 1.0, -rho * ph[1]],
            [0.0, 0.0, rho],
        ]
    }

    /// Evaluator for the pulled-back defining function
    /// `f̃ = σ²f(σx+τ, y+φ) + φ_xx y − σψ_x − ½φ_x²`.
    pub fn pullback_f<'a>(
        &'a self,
        f: &'a Expr2,
    ) -> impl Fn(f64, f64) -> Result<f64, ExprError> + 'a {
        move |x, y| {
            let ph = self.phi(x);
            let ps = self.psi(x);
            let fv = f.eval(self.sigma * x + self.tau, y + ph[0])?;
            Ok(self.sigma * self.sigma * fv + ph[2] * y
                - self.sigma * ps[1]
                - 0.5 * ph[1] * ph[1])
        }
    }
}

/// Push the coordinate frame through `T`, evaluate `g_f` on the images,
/// and compare with `g_{f_target}` at the source point; returns the max
/// componentwise deviation over `samples`.
pub fn verify_isometry(
    t: &Transform,
    f: &Expr2,
    f_target: &Expr2,
    samples: &[(f64, f64)],
) -> Result<f64, ClassifyError> {
    let mut worst = 0.0_f64;
    for &(x, y) in samples {
        let image = t.apply([x, y, 0.0]);
        let jac = t.jacobian(x, y);
        let g_img = metric_at(f, (image[0], image[1]))?.g;
        let g_src = metric_at(f_target, (x, y))?.g;
        for a in 0..DIM {
            for b in 0..DIM {
                let mut v = 0.0;
                for i in 0..DIM {
                    for j in 0..DIM {
                        v += jac[a][i] * g_img.get(i, j) * jac[b][j];
                    }
                }
                worst = worst.max((v - g_src.get(a, b)).abs());
            }
        }
    }
    Ok(worst)
}

/// Transform plus the model function it pulls back.
pub struct IsometryToModel {
    pub transform: Transform,
    /// Defining function of the model manifold; the transform pulls
    /// `g_{model}` back to `g_f` for the family's `f`.
    pub model_f: Expr2,
}

/// Build the §4 isometry from the family onto its model manifold.
///
/// The returned transform `T` satisfies `T*(g_model) = g_f`, i.e. the
/// pullback of `model_f` under `T` is the family's defining function.
pub fn build_isometry_to_model(fam: &StructuredFamily) -> Result<IsometryToModel, ClassifyError> {
    let class = classify_structured(fam)?;
    let domain = fam.domain();
    match (&class.tag, fam) {
        (
            ClassTag::HomogeneousN { b },
            StructuredFamily::ExpY {
                alpha, gamma, ..
            },
        ) => {
            // φ = ln(α)/b exactly; ψ_x = −γ − ½φ_x²
            let b = *b;
            let phi_e = Expr2::ln(alpha.clone()).scale(1.0 / b);
            let phi_x = phi_e.diff(Var::X);
            let phi_xx = phi_x.diff(Var::X);
            let (p0, p1, p2, g0) = (phi_e, phi_x, phi_xx, gamma.clone());
            let psi_x = {
                let p1 = p1.clone();
                let g0 = g0.clone();
                move |x: f64| -g0.eval(x, 0.0).unwrap_or(f64::NAN)
                    - 0.5 * p1.eval(x, 0.0).unwrap_or(f64::NAN).powi(2)
            };
            let psi_val = integral_table(domain.x0, domain.x1, 2001, &psi_x);
            let phi_fn: FnOfX3 = Rc::new(move |x| {
                [
                    p0.eval(x, 0.0).unwrap_or(f64::NAN),
                    p1.eval(x, 0.0).unwrap_or(f64::NAN),
                    p2.eval(x, 0.0).unwrap_or(f64::NAN),
                ]
            });
            let psi_fn: FnOfX2 = Rc::new(move |x| [psi_val(x), psi_x(x)]);
            let model_f = Expr2::exp(Expr2::y().scale(b)).scale(1.0 / (b * b));
            Ok(IsometryToModel {
                transform: Transform::shear(phi_fn, psi_fn),
                model_f,
            })
        }
        (
            ClassTag::HomogeneousP { .. } | ClassTag::LocallySymmetricCw { .. },
            StructuredFamily::QuadY {
                alpha,
                beta,
                gamma,
                ..
            },
        ) => {
            // solve φ'' = β − αφ, ψ' = ½αφ² − ½φ'² − γ over the domain
            let (a_e, b_e, g_e) = (alpha.clone(), beta.clone(), gamma.clone());
            let opts = OdeOptions {
                max_step: (domain.x1 - domain.x0) / 400.0,
                ..OdeOptions::with_tol(1e-12)
            };
            let sol = integrate(
                |x, s, ds| {
                    let (Ok(a), Ok(b), Ok(g)) =
                        (a_e.eval(x, 0.0), b_e.eval(x, 0.0), g_e.eval(x, 0.0))
                    else {
                        return false;
                    };
                    ds[0] = s[1];
                    ds[1] = b - a * s[0];
                    ds[2] = 0.5 * a * s[0] * s[0] - 0.5 * s[1] * s[1] - g;
                    true
                },
                domain.x0,
                &[0.0, 0.0, 0.0],
                domain.x1,
                &opts,
            );
            if sol.termination != Termination::ReachedTmax {
                return Err(ClassifyError::OdeSolve(format!(
                    "phi solve stopped early: {:?} at x = {}",
                    sol.termination,
                    sol.t_end()
                )));
            }
            let sol = Rc::new(sol);
            let (a_e2, b_e2, g_e2) = (alpha.clone(), beta.clone(), gamma.clone());
            let sol_phi = Rc::clone(&sol);
            let phi_fn: FnOfX3 = Rc::new(move |x| {
                let s = sol_phi.sample(x);
                let a = a_e2.eval(x, 0.0).unwrap_or(f64::NAN);
                let b = b_e2.eval(x, 0.0).unwrap_or(f64::NAN);
                [s[0], s[1], b - a * s[0]]
            });
            let (a_e3, g_e3) = (alpha.clone(), gamma.clone());
            let psi_fn: FnOfX2 = Rc::new(move |x| {
                let s = sol.sample(x);
                let a = a_e3.eval(x, 0.0).unwrap_or(f64::NAN);
                let g = g_e3.eval(x, 0.0).unwrap_or(f64::NAN);
                [s[2], 0.5 * a * s[0] * s[0] - 0.5 * s[1] * s[1] - g]
            });
            let _ = (b_e, g_e2);
            let model_f = Expr2::mul(alpha.clone(), Expr2::pow(Expr2::y(), 2)).scale(0.5);
            Ok(IsometryToModel {
                transform: Transform::shear(phi_fn, psi_fn),
                model_f,
            })
        }
        (tag, _) => Err(ClassifyError::Unclassified(format!(
            "classification {tag:?} has no model isometry (or family form mismatch)"
        ))),
    }
}

/// Cumulative trapezoid table of `g` on `[x0, x1]` (n nodes) anchored at
/// `x0`; returns a linear-interpolation evaluator.
fn integral_table(x0: f64, x1: f64, n: usize, g: &impl Fn(f64) -> f64) -> impl Fn(f64) -> f64 {
    let h = (x1 - x0) / (n - 1) as f64;
    let mut vals = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut prev = g(x0);
    vals.push(0.0);
    for i in 1..n {
        let x = x0 + h * i as f64;
        let v = g(x);
        acc += 0.5 * h * (prev + v);
        prev = v;
        vals.push(acc);
    }
    move |x: f64| {
        let t = ((x - x0) / h).clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n - 2);
        let frac = t - i as f64;
        vals[i] * (1.0 - frac) + vals[i + 1] * frac
    }
}

/// Explicit homogeneity map of `𝒩_b` (`f = b⁻²e^{by}`):
/// `T(x,y,x̃) = (e^{−b a₂/2}x + a₁, y + a₂, e^{b a₂/2}x̃ + a₃)`; exact.
pub fn nb_homogeneity_map(b: f64, a1: f64, a2: f64, a3: f64) -> Transform {
    Transform::new(
        (-b * a2 / 2.0).exp(),
        a1,
        a3,
        Rc::new(move |_| [a2, 0.0, 0.0]),
        Rc::new(|_| [0.0, 0.0]),
    )
}

/// Explicit homogeneity map of `𝒞𝒲_ε` (`f = εy²`, `ε > 0`):
/// `φ = a₂cos(√(2ε) x)` solves `2εφ + φ_xx = 0` and
/// `ψ_x = εφ² − ½φ_x² = εa₂²cos(2√(2ε) x)` integrates in closed form.
pub fn cw_homogeneity_map(eps: f64, a1: f64, a2: f64, a3: f64) -> Transform {
    let w = (2.0 * eps).sqrt();
    let phi: FnOfX3 = Rc::new(move |x| {
        [
            a2 * (w * x).cos(),
            -a2 * w * (w * x).sin(),
            -a2 * w * w * (w * x).cos(),
        ]
    });
    let psi: FnOfX2 = Rc::new(move |x| {
        [
            a3 + eps * a2 * a2 * (2.0 * w * x).sin() / (2.0 * w),
            eps * a2 * a2 * (2.0 * w * x).cos(),
        ]
    });
    Transform::new(1.0, a1, 0.0, phi, psi)
}

/// Explicit local-homogeneity map of `𝒫` instances `f = c y²(x+1)^{−2}`
/// on `x > −1` (`a₁ > −1`).
///
/// The map is `T = (σx + a₁, y + φ, σ^{−1}x̃ − σ^{−1}φ_x y + ψ)` with
/// `σ = a₁ + 1`; `φ` solves the Euler equation `φ_xx + 2c(x+1)^{−2}φ = 0`
/// in closed form with `φ(0) = a₂`, `φ_x(0) = dphi0`, and
/// `ψ_x = (c(x+1)^{−2}φ² − ½φ_x²)/σ` with `ψ(0) = a₃`.
pub fn pc_homogeneity_map(
    c: f64,
    a1: f64,
    a2: f64,
    a3: f64,
    dphi0: f64,
    domain_x: (f64, f64),
) -> Transform {
    assert!(a1 > -1.0, "pc map needs a1 > -1");
    let disc = 1.0 - 8.0 * c;
    // closed-form Euler solutions in u = x + 1
    let phi_raw: Rc<dyn Fn(f64) -> [f64; 2]> = if disc < 0.0 {
        let w = (-disc).sqrt() / 2.0;
        let a = a2;
        let b = (dphi0 - a2 / 2.0) / w;
        Rc::new(move |u: f64| {
            let l = u.ln();
            let (s, co) = ((w * l).sin(), (w * l).cos());
            let val = u.sqrt() * (a * co + b * s);
            let d = u.powf(-0.5) * ((a / 2.0 + b * w) * co + (b / 2.0 - a * w) * s);
            [val, d]
        })
    } else if disc > 0.0 {
        let r = disc.sqrt();
        let (lp, lm) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
        // A + B = a2, lp·A + lm·B = dphi0
        let a = (dphi0 - lm * a2) / (lp - lm);
        let b = a2 - a;
        Rc::new(move |u: f64| {
            [
                a * u.powf(lp) + b * u.powf(lm),
                a * lp * u.powf(lp - 1.0) + b * lm * u.powf(lm - 1.0),
            ]
        })
    } else {
        let a = a2;
        let b = dphi0 - a2 / 2.0;
        Rc::new(move |u: f64| {
            let l = u.ln();
            [
                u.sqrt() * (a + b * l),
                u.powf(-0.5) * (a / 2.0 + b * (1.0 + l / 2.0)),
            ]
        })
    };
    let sigma = a1 + 1.0;
    let phi_for_psi = Rc::clone(&phi_raw);
    let psi_x = move |x: f64| {
        let u = x + 1.0;
        let [p, px] = phi_for_psi(u);
        (c * u.powi(-2) * p * p - 0.5 * px * px) / sigma
    };
    let table = integral_table(domain_x.0, domain_x.1, 4001, &psi_x);
    let anchor = table(0.0);
    let phi_fn: FnOfX3 = Rc::new(move |x| {
        let u = x + 1.0;
        let [p, px] = phi_raw(u);
        [p, px, -2.0 * c * u.powi(-2) * p]
    });
    let psi_fn: FnOfX2 = Rc::new(move |x| [a3 + table(x) - anchor, psi_x(x)]);
    Transform::new(sigma, a1, 0.0, phi_fn, psi_fn)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> DomainBox {
        DomainBox::new(-1.0, 1.0, -1.0, 1.0)
    }

    #[test]
    fn classify_exp_y() {
        // f = e^y -> Homogeneous_N(1)
        let f = Expr2::exp(Expr2::y());
        let c = classify_sampled(&f, unit_box()).unwrap();
        match c.tag {
            ClassTag::HomogeneousN { b } => assert!((b - 1.0).abs() < 1e-9),
            t => panic!("expected Homogeneous_N, got {t:?}"),
        }
    }

    #[test]
    fn classify_exy_not_hom() {
        // positive-x window keeps f_yy = x^2 e^{xy} > 0
        let f = Expr2::parse("exp(x*y)", &[]).unwrap();
        let c = classify_sampled(&f, DomainBox::new(0.5, 1.5, -0.5, 0.5)).unwrap();
        assert_eq!(c.tag, ClassTag::NotOneCurvHom);
    }

    #[test]
    fn classify_p_both_branches() {
        // f = 1/2 y^2 chat (x - x0)^-2 with chat = 4, x0 = 0
        // x > x0: c = -2 chat^{-1/2} = -1; x < x0: c = +1
        let f = Expr2::parse("2*y^2/x^2", &[]).unwrap();
        let right = classify_sampled(&f, DomainBox::new(1.0, 3.0, -1.0, 1.0)).unwrap();
        match right.tag {
            ClassTag::HomogeneousP { c } => assert!((c - (-1.0)).abs() < 1e-7),
            t => panic!("expected Homogeneous_P on x>0, got {t:?}"),
        }
        let left = classify_sampled(&f, DomainBox::new(-3.0, -1.0, -1.0, 1.0)).unwrap();
        match left.tag {
            ClassTag::HomogeneousP { c } => assert!((c - 1.0).abs() < 1e-7),
            t => panic!("expected Homogeneous_P on x<0, got {t:?}"),
        }
    }

    #[test]
    fn classify_cw_and_flat() {
        let f = Expr2::parse("3*y^2", &[]).unwrap();
        let c = classify_sampled(&f, unit_box()).unwrap();
        match c.tag {
            ClassTag::LocallySymmetricCw { eps } => assert!((eps - 3.0).abs() < 1e-9),
            t => panic!("expected CW, got {t:?}"),
        }
        let flat = classify_sampled(&Expr2::parse("x + 2*y", &[]).unwrap(), unit_box()).unwrap();
        assert_eq!(flat.tag, ClassTag::Flat);
    }

    #[test]
    fn classify_structured_matches_sampled() {
        // ExpY with the exact Theorem 1.4(1) beta
        let alpha = Expr2::parse("1+x^2", &[]).unwrap();
        let beta = Expr2::parse("(2 - 4*x^2/(1+x^2))/(2*(1+x^2))", &[]).unwrap();
        let fam = StructuredFamily::ExpY {
            alpha: alpha.clone(),
            b: 2.0,
            beta,
            gamma: Expr2::parse("sin(x)", &[]).unwrap(),
            domain: unit_box(),
        };
        let cs = classify_structured(&fam).unwrap();
        let cg = classify_sampled(&fam.f_expr(), unit_box()).unwrap();
        match (cs.tag, cg.tag) {
            (ClassTag::HomogeneousN { b: b1 }, ClassTag::HomogeneousN { b: b2 }) => {
                assert!((b1 - 2.0).abs() < 1e-9);
                assert!((b2 - 2.0).abs() < 1e-7);
            }
            other => panic!("mismatch: {other:?}"),
        }
        // wrong beta -> only 1-curvature homogeneous
        let fam2 = StructuredFamily::ExpY {
            alpha,
            b: 2.0,
            beta: Expr2::constant(1.0),
            gamma: Expr2::constant(0.0),
            domain: unit_box(),
        };
        let c2 = classify_structured(&fam2).unwrap();
        assert!(matches!(c2.tag, ClassTag::OneCurvHomOnlyN1 { .. }));
        let c2g = classify_sampled(&fam2.f_expr(), unit_box()).unwrap();
        assert!(matches!(c2g.tag, ClassTag::OneCurvHomOnlyN1 { .. }));
    }

    #[test]
    fn pullback_identity_and_n_family() {
        let f = Expr2::parse("exp(y) + x*y", &[]).unwrap();
        let t = Transform::identity();
        let pb = t.pullback_f(&f);
        for &(x, y) in &[(0.0, 0.0), (1.0, -0.5)] {
            assert!((pb(x, y).unwrap() - f.eval(x, y).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn n_model_isometry() {
        let alpha = Expr2::parse("1+x^2", &[]).unwrap();
        let b = 2.0;
        let beta = Expr2::parse("(2 - 4*x^2/(1+x^2))/(2*(1+x^2))", &[]).unwrap();
        let gamma = Expr2::parse("cos(x)", &[]).unwrap();
        let fam = StructuredFamily::ExpY {
            alpha,
            b,
            beta,
            gamma,
            domain: unit_box(),
        };
        let iso = build_isometry_to_model(&fam).unwrap();
        // φ must be ln(α)/b
        let ph = iso.transform.phi(0.5);
        assert!((ph[0] - (1.25_f64).ln() / b).abs() < 1e-12);
        let fexpr = fam.f_expr();
        // pullback of the model reproduces the family f
        let pb = iso.transform.pullback_f(&iso.model_f);
        for &(x, y) in &[(0.0, 0.0), (0.5, 0.5), (-0.8, 0.3)] {
            assert!((pb(x, y).unwrap() - fexpr.eval(x, y).unwrap()).abs() < 1e-9);
        }
        let samples: Vec<(f64, f64)> = unit_box().grid(7, 7);
        let res = verify_isometry(&iso.transform, &iso.model_f, &fexpr, &samples).unwrap();
        assert!(res < 1e-7, "residual {res}");
    }

    #[test]
    fn cw_model_isometry_via_ode() {
        let fam = StructuredFamily::QuadY {
            alpha: Expr2::constant(2.0),
            beta: Expr2::parse("sin(x)", &[]).unwrap(),
            gamma: Expr2::parse("x^2", &[]).unwrap(),
            domain: unit_box(),
        };
        let iso = build_isometry_to_model(&fam).unwrap();
        let fexpr = fam.f_expr();
        let samples = unit_box().grid(7, 7);
        let res = verify_isometry(&iso.transform, &iso.model_f, &fexpr, &samples).unwrap();
        assert!(res < 1e-7, "residual {res}");
    }

    #[test]
    fn p_model_isometry_via_ode() {
        // alpha = (x+3)^-2 (positive on the box), beta, gamma arbitrary
        let fam = StructuredFamily::QuadY {
            alpha: Expr2::parse("(x+3)^-2", &[]).unwrap(),
            beta: Expr2::parse("cos(x)/10", &[]).unwrap(),
            gamma: Expr2::parse("x/5", &[]).unwrap(),
            domain: unit_box(),
        };
        let iso = build_isometry_to_model(&fam).unwrap();
        let fexpr = fam.f_expr();
        let samples = unit_box().grid(7, 7);
        let res = verify_isometry(&iso.transform, &iso.model_f, &fexpr, &samples).unwrap();
        assert!(res < 1e-7, "residual {res}");
    }

    #[test]
    fn explicit_maps_are_exact_isometries() {
        let samples = unit_box().grid(6, 6);
        // N_b
        let b = 1.5;
        let f_n = Expr2::parse("exp(b*y)/(b*b)", &[("b", b)]).unwrap();
        let t_n = nb_homogeneity_map(b, 0.7, -0.4, 2.0);
        let r_n = verify_isometry(&t_n, &f_n, &f_n, &samples).unwrap();
        assert!(r_n < 1e-10, "N residual {r_n}");
        // CW
        let f_cw = Expr2::parse("2*y^2", &[]).unwrap();
        let t_cw = cw_homogeneity_map(2.0, 0.3, 0.8, -1.0);
        let r_cw = verify_isometry(&t_cw, &f_cw, &f_cw, &samples).unwrap();
        assert!(r_cw < 1e-10, "CW residual {r_cw}");
        // P_c on x > -1
        let c = 1.0;
        let f_p = Expr2::parse("c*y^2/(x+1)^2", &[("c", c)]).unwrap();
        let t_p = pc_homogeneity_map(c, 0.5, 0.2, 0.0, 0.1, (-0.5, 2.0));
        let p_samples = DomainBox::new(-0.4, 1.8, -1.0, 1.0).grid(6, 6);
        let r_p = verify_isometry(&t_p, &f_p, &f_p, &p_samples).unwrap();
        assert!(r_p < 1e-10, "P residual {r_p}");
        // the P map moves the base point as announced: T(0,0,0) = (a1,a2,a3)
        let img = t_p.apply([0.0, 0.0, 0.0]);
        assert!((img[0] - 0.5).abs() < 1e-12);
        assert!((img[1] - 0.2).abs() < 1e-12);
        assert!(img[2].abs() < 1e-12);
    }

    #[test]
    fn pc_real_exponent_branch() {
        // c < 1/8 gives real Euler exponents
        let c = 0.1;
        let f_p = Expr2::parse("c*y^2/(x+1)^2", &[("c", c)]).unwrap();
        let t_p = pc_homogeneity_map(c, 0.2, -0.3, 0.4, 0.0, (-0.5, 2.0));
        let samples = DomainBox::new(-0.4, 1.8, -1.0, 1.0).grid(6, 6);
        let r = verify_isometry(&t_p, &f_p, &f_p, &samples).unwrap();
        assert!(r < 1e-10, "residual {r}");
    }
}
