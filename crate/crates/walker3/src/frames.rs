//! Pseudo-orthonormal frames and curvature models.
//!
//! The frames are `ξ1 = a11(∂x + f ∂x̃ + a12 ∂y + a13 ∂x̃)`,
//! `ξ2 = a22 ∂y + a23 ∂x̃`, `ξ3 = a33 ∂x̃`, normalized so that the only
//! non-zero inner products are `⟨ξ1,ξ3⟩ = ⟨ξ2,ξ2⟩ = 1`.  Evaluating
//! `∇^l R` on such a frame yields a small list of slot values which are
//! matched against the reference models `𝔄₀`, `𝔑₁(b)`, `𝔓₁(c)`,
//! `𝔑₂(b)`, `𝔓₂(c)` and the symmetric `𝒞𝒲` model.
//!
//! Reading note: the `𝔑₁(b)` slot written elsewhere as
//! `∇𝓡(ξ1,ξ2,ξ2,ξ2;ξ2)` is taken to mean `∇𝓡(ξ1,ξ2,ξ2,ξ1;ξ2)`, the
//! slot that actually carries the invariant `f_yyy/f_yy`.

use serde_json::{json, Value};
use thiserror::Error;

use crate::expr::Expr2;
use crate::metric::{Geometry, WalkerError};
use crate::tensor::DIM;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("frame requires f_yy > 0, got {0}")]
    Sign(f64),
    #[error("frame_1 requires f_yyy != 0")]
    Division,
    #[error("model record is not curvature-normalized: R slot = {0}")]
    NotNormalized(f64),
    #[error(transparent)]
    Walker(#[from] WalkerError),
}

/// Coefficients of a pseudo-orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCoeffs {
    pub a11: f64,
    pub a12: f64,
    pub a13: f64,
    pub a22: f64,
    pub a23: f64,
    pub a33: f64,
}

impl FrameCoeffs {
    /// Frame from the two free parameters; the rest follow from the
    /// normalization `a22 = 1`, `a11 a33 = 1`, `a23 = −a12`,
    /// `a13 = −½ a12²`.
    pub fn from_free(a11: f64, a12: f64) -> Self {
        FrameCoeffs {
            a11,
            a12,
            a13: -0.5 * a12 * a12,
            a22: 1.0,
            a23: -a12,
            a33: 1.0 / a11,
        }
    }

    /// Coordinate components of `(ξ1, ξ2, ξ3)` given the value of `f`.
    pub fn vectors(&self, f_value: f64) -> [[f64; DIM]; DIM] {
        [
            [
                self.a11,
                self.a11 * self.a12,
                self.a11 * (f_value + self.a13),
            ],
            [0.0, self.a22, self.a23],
            [0.0, 0.0, self.a33],
        ]
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a11": self.a11, "a12": self.a12, "a13": self.a13,
            "a22": self.a22, "a23": self.a23, "a33": self.a33,
        })
    }
}

/// Slot values of `∇^l R` (`l ≤ k`) on a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelRecord {
    pub k: usize,
    /// `R(ξ1,ξ2,ξ2,ξ1)`
    pub r1221: f64,
    /// `(∇R(…;ξ1), ∇R(…;ξ2))` when `k ≥ 1`
    pub d: Option<(f64, f64)>,
    /// `∇²R(…;ξi,ξj)` in the order `(ξ1ξ1, ξ1ξ2, ξ2ξ1, ξ2ξ2)` when `k ≥ 2`
    pub dd: Option<[f64; 4]>,
}

impl ModelRecord {
    pub fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("k".into(), json!(self.k));
        m.insert("R_1221".into(), json!(self.r1221));
        if let Some((d1, d2)) = self.d {
            m.insert("dR_1221_1".into(), json!(d1));
            m.insert("dR_1221_2".into(), json!(d2));
        }
        if let Some([a, b, c, d]) = self.dd {
            m.insert("ddR_1221_11".into(), json!(a));
            m.insert("ddR_1221_12".into(), json!(b));
            m.insert("ddR_1221_21".into(), json!(c));
            m.insert("ddR_1221_22".into(), json!(d));
        }
        Value::Object(m)
    }
}

/// Identified curvature model with fitted parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelTag {
    A0,
    N1(f64),
    P1(f64),
    N2(f64),
    P2(f64),
    Cw,
    NoMatch,
}

impl ModelTag {
    pub fn to_json(&self) -> Value {
        match self {
            ModelTag::A0 => json!({"model": "A0"}),
            ModelTag::N1(b) => json!({"model": "N1", "b": b}),
            ModelTag::P1(c) => json!({"model": "P1", "c": c}),
            ModelTag::N2(b) => json!({"model": "N2", "b": b}),
            ModelTag::P2(c) => json!({"model": "P2", "c": c}),
            ModelTag::Cw => json!({"model": "CW"}),
            ModelTag::NoMatch => json!({"model": "none"}),
        }
    }
}

fn f_yy(geo: &Geometry) -> Result<f64, FrameError> {
    Ok(geo.f_partial(0, 2)?)
}

/// Order-0 normalized frame with `a12` free; `R(ξ1,ξ2,ξ2,ξ1) = 1`.
pub fn frame_0(f: &Expr2, point: (f64, f64), a12: f64) -> Result<FrameCoeffs, FrameError> {
    let geo = Geometry::new(f, point, 4)?;
    let fyy = f_yy(&geo)?;
    if fyy <= 0.0 {
        return Err(FrameError::Sign(fyy));
    }
    Ok(FrameCoeffs::from_free(fyy.powf(-0.5), a12))
}

/// Order-1 normalized frame: `a12 = −f_xyy/f_yyy` kills the
/// `∇R(…;ξ1)` slot.
pub fn frame_1(f: &Expr2, point: (f64, f64)) -> Result<FrameCoeffs, FrameError> {
    let geo = Geometry::new(f, point, 4)?;
    let fyy = f_yy(&geo)?;
    if fyy <= 0.0 {
        return Err(FrameError::Sign(fyy));
    }
    let fyyy = geo.f_partial(0, 3)?;
    if fyyy == 0.0 {
        return Err(FrameError::Division);
    }
    let fxyy = geo.f_partial(1, 2)?;
    Ok(FrameCoeffs::from_free(fyy.powf(-0.5), -fxyy / fyyy))
}

/// Evaluate the model slots of `∇^l R` (`l ≤ k`, `k ≤ 2`) on `frame`.
pub fn model_invariants(
    f: &Expr2,
    point: (f64, f64),
    frame: &FrameCoeffs,
    k: usize,
) -> Result<ModelRecord, FrameError> {
    let geo = Geometry::new(f, point, (k + 2).max(4))?;
    let xi = frame.vectors(geo.f_jet().value());
    let (x1, x2) = (xi[0], xi[1]);
    let r = geo.riemann_jets().evaluate(point);
    let r1221 = r.contract(&[x1, x2, x2, x1]);
    let d = if k >= 1 {
        let nr = geo.nabla_k_jets(1)?.evaluate(point);
        Some((
            nr.contract(&[x1, x2, x2, x1, x1]),
            nr.contract(&[x1, x2, x2, x1, x2]),
        ))
    } else {
        None
    };
    let dd = if k >= 2 {
        let nnr = geo.nabla_k_jets(2)?.evaluate(point);
        Some([
            nnr.contract(&[x1, x2, x2, x1, x1, x1]),
            nnr.contract(&[x1, x2, x2, x1, x1, x2]),
            nnr.contract(&[x1, x2, x2, x1, x2, x1]),
            nnr.contract(&[x1, x2, x2, x1, x2, x2]),
        ])
    } else {
        None
    };
    Ok(ModelRecord { k, r1221, d, dd })
}

const MATCH_TOL: f64 = 1e-7;

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= MATCH_TOL * (1.0 + b.abs())
}

fn is_zero(a: f64) -> bool {
    a.abs() <= MATCH_TOL
}

/// Match a slot record against the reference models.
///
/// The parameter `b` is read from the `∇R(…;ξ2)` slot and `c` from
/// `∇R(…;ξ1)`; order-2 slots are then checked against `(−1, 0, 0, b²)`
/// for `𝔑₂(b)` and `((3/2)c², 0, 0, 0)` for `𝔓₂(c)`.  If only the
/// order-1 pattern holds the order-1 model is returned.
pub fn match_model(record: &ModelRecord) -> Result<ModelTag, FrameError> {
    if !near(record.r1221, 1.0) {
        return Err(FrameError::NotNormalized(record.r1221));
    }
    let Some((d1, d2)) = record.d else {
        return Ok(ModelTag::A0);
    };
    if is_zero(d1) && is_zero(d2) {
        // every derivative slot of the symmetric model vanishes
        if let Some(dd) = record.dd {
            if !dd.iter().all(|v| is_zero(*v)) {
                return Ok(ModelTag::NoMatch);
            }
        }
        return Ok(ModelTag::Cw);
    }
    if is_zero(d1) {
        let b = d2;
        match record.dd {
            None => Ok(ModelTag::N1(b)),
            Some([dd11, dd12, dd21, dd22]) => {
                if near(dd11, -1.0) && is_zero(dd12) && is_zero(dd21) && near(dd22, b * b) {
                    Ok(ModelTag::N2(b))
                } else {
                    Ok(ModelTag::N1(b))
                }
            }
        }
    } else if is_zero(d2) {
        let c = d1;
        match record.dd {
            None => Ok(ModelTag::P1(c)),
            Some([dd11, dd12, dd21, dd22]) => {
                if near(dd11, 1.5 * c * c) && is_zero(dd12) && is_zero(dd21) && is_zero(dd22) {
                    Ok(ModelTag::P2(c))
                } else {
                    Ok(ModelTag::P1(c))
                }
            }
        }
    } else {
        Ok(ModelTag::NoMatch)
    }
}

/// Kowalski–Vanžurová frame: `λ = f_yyy/f_yy`, `a12 = −f_xyy/f_yyy`,
/// `a11 = λ f_yy^{−1/2}`, so the `λ^{−(2+l)}`-weighted slots are
/// `(1, 0, 1)`.
pub fn kv_frame(f: &Expr2, point: (f64, f64)) -> Result<(f64, FrameCoeffs), FrameError> {
    let geo = Geometry::new(f, point, 4)?;
    let fyy = f_yy(&geo)?;
    if fyy <= 0.0 {
        return Err(FrameError::Sign(fyy));
    }
    let fyyy = geo.f_partial(0, 3)?;
    if fyyy <= 0.0 {
        return Err(FrameError::Sign(fyyy));
    }
    let fxyy = geo.f_partial(1, 2)?;
    let lambda = fyyy / fyy;
    Ok((
        lambda,
        FrameCoeffs::from_free(lambda * fyy.powf(-0.5), -fxyy / fyyy),
    ))
}

/// `λ^{−(2+l)}`-weighted slot values `(c_1221, c_12211, c_12212)` of the
/// KV frame; `(1, 0, 1)` for every admissible `f`.
pub fn kv_weighted_slots(f: &Expr2, point: (f64, f64)) -> Result<(f64, f64, f64), FrameError> {
    let (lambda, frame) = kv_frame(f, point)?;
    let rec = model_invariants(f, point, &frame, 1)?;
    let (d1, d2) = rec.d.unwrap();
    Ok((
        rec.r1221 / lambda.powi(2),
        d1 / lambda.powi(3),
        d2 / lambda.powi(3),
    ))
}
