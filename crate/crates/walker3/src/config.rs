//! Run configuration shared by the CLI commands: tolerances, jet order,
//! sample grid, and the Cotton orientation sign.  Values come from an
//! optional `key=value` config file, with command-line flags taking
//! precedence.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::classify::DomainBox;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("key {key}: {message}")]
    Value { key: String, message: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
}

/// Sample grid specification: `nx × ny` points over a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub domain: DomainBox,
}

impl GridSpec {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.domain.grid(self.nx, self.ny)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Threshold below which a sampled invariant counts as zero.
    pub zero_threshold: f64,
    /// ODE integrator tolerance.
    pub ode_tol: f64,
    /// Residual tolerance for verification reports.
    pub residual_tol: f64,
    /// Jet truncation order for curvature computations.
    pub jet_order: usize,
    pub grid: GridSpec,
    /// Cotton orientation sign, `+1` or `−1`.
    pub cotton_sign: i32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            zero_threshold: 1e-8,
            ode_tol: 1e-10,
            residual_tol: 1e-7,
            jet_order: 10,
            grid: GridSpec {
                nx: 5,
                ny: 5,
                domain: DomainBox::new(-1.0, 1.0, -1.0, 1.0),
            },
            cotton_sign: 1,
        }
    }
}

impl RunConfig {
    /// Parse a `key=value` file.  Blank lines and `#` comments allowed.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = RunConfig::default();
        let mut pairs = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    text: raw.to_string(),
                });
            };
            pairs.insert(k.trim().to_string(), v.trim().to_string());
        }
        for (k, v) in pairs {
            cfg.apply(&k, &v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Apply one `key=value` override.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let num = |v: &str| -> Result<f64, ConfigError> {
            v.parse::<f64>().map_err(|e| ConfigError::Value {
                key: key.to_string(),
                message: e.to_string(),
            })
        };
        match key {
            "zero_threshold" => self.zero_threshold = num(value)?,
            "ode_tol" => self.ode_tol = num(value)?,
            "residual_tol" => self.residual_tol = num(value)?,
            "jet_order" => {
                self.jet_order = value.parse().map_err(|e| ConfigError::Value {
                    key: key.into(),
                    message: format!("{e}"),
                })?
            }
            "cotton_sign" => {
                let s: i32 = value.parse().map_err(|e| ConfigError::Value {
                    key: key.into(),
                    message: format!("{e}"),
                })?;
                self.cotton_sign = s;
            }
            "grid" => self.grid = parse_grid(value).map_err(|m| ConfigError::Value {
                key: key.into(),
                message: m,
            })?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("zero_threshold", self.zero_threshold),
            ("ode_tol", self.ode_tol),
            ("residual_tol", self.residual_tol),
        ];
        for (k, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(ConfigError::Value {
                    key: k.into(),
                    message: format!("must be > 0, got {v}"),
                });
            }
        }
        if self.jet_order < 4 {
            return Err(ConfigError::Value {
                key: "jet_order".into(),
                message: format!("must be ≥ 4, got {}", self.jet_order),
            });
        }
        if self.cotton_sign != 1 && self.cotton_sign != -1 {
            return Err(ConfigError::Value {
                key: "cotton_sign".into(),
                message: format!("must be ±1, got {}", self.cotton_sign),
            });
        }
        if self.grid.nx == 0 || self.grid.ny == 0 {
            return Err(ConfigError::Value {
                key: "grid".into(),
                message: "grid must have at least one point per axis".into(),
            });
        }
        Ok(())
    }
}

/// Parse `NX,NY,X0,X1,Y0,Y1`.
pub fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(format!("expected NX,NY,X0,X1,Y0,Y1, got {s:?}"));
    }
    let nx: usize = parts[0].parse().map_err(|e| format!("NX: {e}"))?;
    let ny: usize = parts[1].parse().map_err(|e| format!("NY: {e}"))?;
    let mut vals = [0.0_f64; 4];
    for (i, p) in parts[2..].iter().enumerate() {
        vals[i] = p.parse().map_err(|e| format!("bound {}: {e}", i + 1))?;
    }
    if vals[1] <= vals[0] || vals[3] <= vals[2] {
        return Err("grid box must have positive extent".into());
    }
    Ok(GridSpec {
        nx,
        ny,
        domain: DomainBox::new(vals[0], vals[1], vals[2], vals[3]),
    })
}
