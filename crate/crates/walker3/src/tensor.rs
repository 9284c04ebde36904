//! Component tables for tensors at a point of a Walker three-manifold.
//!
//! Indices run over the adapted coordinates in the fixed order
//! `(x, y, x̃)`.  Internally a tensor is carried with [`Jet2`] entries so
//! covariant derivatives can be taken to arbitrary order; [`CovTensor`] is
//! the point evaluation handed to callers.

use serde_json::{json, Value};

use crate::jet::Jet2;

pub const DIM: usize = 3;

pub const INDEX_LABELS: [&str; DIM] = ["x", "y", "xt"];

/// Rank-`n` tensor with jet-valued components (functions of `x`, `y` near
/// the base point; nothing depends on `x̃`).
#[derive(Debug, Clone)]
pub struct JetTensor {
    rank: usize,
    comps: Vec<Jet2>,
}

/// Christoffel symbols `Γ^c_{ab}` with jet-valued entries, indexed
/// `[c][a][b]`.
#[derive(Debug, Clone)]
pub struct Connection {
    gamma: Vec<Jet2>,
}

impl Connection {
    pub fn new(order: usize) -> Self {
        Connection {
            gamma: vec![Jet2::zero(order); DIM * DIM * DIM],
        }
    }

    pub fn get(&self, c: usize, a: usize, b: usize) -> &Jet2 {
        &self.gamma[(c * DIM + a) * DIM + b]
    }

    pub fn set(&mut self, c: usize, a: usize, b: usize, j: Jet2) {
        self.gamma[(c * DIM + a) * DIM + b] = j;
    }
}

impl JetTensor {
    pub fn zero(rank: usize, order: usize) -> Self {
        JetTensor {
            rank,
            comps: vec![Jet2::zero(order); DIM.pow(rank as u32)],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * DIM + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Jet2 {
        &self.comps[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], j: Jet2) {
        let f = self.flat(idx);
        self.comps[f] = j;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &Jet2)> {
        let rank = self.rank;
        self.comps.iter().enumerate().map(move |(f, j)| {
            let mut idx = vec![0; rank];
            let mut rem = f;
            for slot in (0..rank).rev() {
                idx[slot] = rem % DIM;
                rem /= DIM;
            }
            (idx, j)
        })
    }

    /// Coordinate derivative of a jet-valued component: `∂_x`, `∂_y`, or
    /// `∂_x̃` (identically zero).
    fn coord_derivative(j: &Jet2, c: usize) -> Jet2 {
        match c {
            0 => j.d_dx(),
            1 => j.d_dy(),
            _ => Jet2::zero(j.order().saturating_sub(1)),
        }
    }

    /// Covariant derivative; the new derivative index is appended last:
    /// `(∇T)_{i1..in c} = ∂_c T_{i1..in} − Σ_k Γ^d_{c i_k} T_{i1..d..in}`.
    pub fn covariant_derivative(&self, conn: &Connection) -> JetTensor {
        let order = self.comps[0].order().saturating_sub(1);
        let mut out = JetTensor::zero(self.rank + 1, order);
        let mut idx = vec![0usize; self.rank + 1];
        loop {
            let c = idx[self.rank];
            let base = &idx[..self.rank];
            let mut v = Self::coord_derivative(self.get(base), c);
            for k in 0..self.rank {
                for d in 0..DIM {
                    let g = conn.get(d, c, idx[k]);
                    if g.scale() == 0.0 {
                        continue;
                    }
                    let mut swapped = base.to_vec();
                    swapped[k] = d;
                    v = v.sub(&g.mul(self.get(&swapped)).truncated(order));
                }
            }
            out.set(&idx.clone(), v);
            // advance odometer
            let mut slot = self.rank + 1;
            loop {
                if slot == 0 {
                    return out;
                }
                slot -= 1;
                idx[slot] += 1;
                if idx[slot] < DIM {
                    break;
                }
                idx[slot] = 0;
            }
        }
    }

    /// Point evaluation into a [`CovTensor`] with `deriv_order = rank - 4`.
    pub fn evaluate(&self, point: (f64, f64)) -> CovTensor {
        CovTensor {
            k: self.rank.saturating_sub(4),
            rank: self.rank,
            point,
            components: self.comps.iter().map(Jet2::value).collect(),
            scale: self.comps.iter().fold(0.0_f64, |m, j| m.max(j.scale())),
        }
    }
}

/// Component table of `∇^k R` (or any rank-`n` covariant tensor) at a point.
#[derive(Debug, Clone)]
pub struct CovTensor {
    /// Covariant-derivative order when the tensor is `∇^k R`.
    pub k: usize,
    rank: usize,
    pub point: (f64, f64),
    components: Vec<f64>,
    /// Largest jet coefficient encountered while producing the table.
    pub scale: f64,
}

impl CovTensor {
    pub fn from_components(
        k: usize,
        rank: usize,
        point: (f64, f64),
        components: Vec<f64>,
        scale: f64,
    ) -> Self {
        assert_eq!(components.len(), DIM.pow(rank as u32));
        CovTensor {
            k,
            rank,
            point,
            components,
            scale,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * DIM + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.components[self.flat(idx)]
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Scale-aware zero test: `|v| <= 1e-9 (1 + scale)`.
    pub fn is_zero_component(&self, v: f64) -> bool {
        v.abs() <= 1e-9 * (1.0 + self.scale)
    }

    /// Full contraction with `rank` vectors given in coordinate components.
    pub fn contract(&self, vectors: &[[f64; DIM]]) -> f64 {
        assert_eq!(vectors.len(), self.rank);
        let mut total = 0.0;
        for (f, &comp) in self.components.iter().enumerate() {
            if comp == 0.0 {
                continue;
            }
            let mut weight = 1.0;
            let mut rem = f;
            for slot in (0..self.rank).rev() {
                weight *= vectors[slot][rem % DIM];
                rem /= DIM;
            }
            total += comp * weight;
        }
        total
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let rank = self.rank;
        self.components.iter().enumerate().map(move |(f, &v)| {
            let mut idx = vec![0; rank];
            let mut rem = f;
            for slot in (0..rank).rev() {
                idx[slot] = rem % DIM;
                rem /= DIM;
            }
            (idx, v)
        })
    }

    /// JSON table with explicit index labels; zero components are omitted.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .iter()
            .filter(|(_, v)| !self.is_zero_component(*v))
            .map(|(idx, v)| {
                let labels: Vec<&str> = idx.iter().map(|&i| INDEX_LABELS[i]).collect();
                json!({"indices": labels, "value": v})
            })
            .collect();
        json!({
            "k": self.k,
            "rank": self.rank,
            "point": {"x": self.point.0, "y": self.point.1},
            "components": entries,
        })
    }
}

/// Symmetric 3×3 table (metric, Ricci, Hessian, Lie derivative, ...).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTable(pub [[f64; DIM]; DIM]);

impl SymTable {
    pub fn zero() -> Self {
        SymTable([[0.0; DIM]; DIM])
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.0[a][b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: f64) {
        self.0[a][b] = v;
        self.0[b][a] = v;
    }

    pub fn add(&self, other: &SymTable) -> SymTable {
        let mut out = SymTable::zero();
        for a in 0..DIM {
            for b in 0..DIM {
                out.0[a][b] = self.0[a][b] + other.0[a][b];
            }
        }
        out
    }

    pub fn sub(&self, other: &SymTable) -> SymTable {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, k: f64) -> SymTable {
        let mut out = *self;
        for row in &mut out.0 {
            for v in row.iter_mut() {
                *v *= k;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn to_json(&self) -> Value {
        let mut entries = Vec::new();
        for a in 0..DIM {
            for b in a..DIM {
                if self.0[a][b] != 0.0 {
                    entries.push(json!({
                        "indices": [INDEX_LABELS[a], INDEX_LABELS[b]],
                        "value": self.0[a][b],
                    }));
                }
            }
        }
        json!({"components": entries})
    }
}
