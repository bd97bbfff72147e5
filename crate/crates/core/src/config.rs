//! Tolerances and solver budgets, overridable through dotted configuration keys.

use crate::error::{Error, Result};

/// Numerical tolerances used across the library.
///
/// The unitarity and reconstruction tolerances scale with the matrix
/// dimension; the others are absolute.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// per-dimension factor for the unitarity defect ‖u*u − I‖_F
    pub unitary_per_dim: f64,
    /// per-dimension factor for eigendecomposition reconstruction residuals
    pub recon_per_dim: f64,
    /// symmetry defect ‖w − wᵗ‖_F
    pub sym: f64,
    /// commutator norm for joint diagonalization inputs
    pub commute: f64,
    /// closure residual ‖u₁⋯u_l − I‖_F
    pub product: f64,
    /// circular multiset distance for spectra / class membership
    pub spec: f64,
    /// componentwise fixed-point defect for involutions
    pub fix: f64,
    /// residual for intertwiner equations
    pub twine: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unitary_per_dim: 1e-10,
            recon_per_dim: 1e-9,
            sym: 1e-9,
            commute: 1e-9,
            product: 1e-8,
            spec: 1e-8,
            fix: 1e-8,
            twine: 1e-7,
        }
    }
}

impl Tolerances {
    /// Unitarity tolerance for dimension `n`.
    pub fn unitary(&self, n: usize) -> f64 {
        self.unitary_per_dim * n as f64
    }

    /// Reconstruction tolerance for dimension `n`.
    pub fn recon(&self, n: usize) -> f64 {
        self.recon_per_dim * n as f64
    }
}

/// Search budget and acceptance thresholds for the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub restarts: usize,
    pub max_iter: usize,
    /// product residual below which a state counts as closed
    pub tol_product: f64,
    /// per-class spectral residual below which membership holds
    pub tol_class: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restarts: 32,
            max_iter: 5000,
            tol_product: 1e-8,
            tol_class: 1e-6,
        }
    }
}

/// Shared runtime configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub tol: Tolerances,
    pub solver: SolverConfig,
}

impl Config {
    /// Applies one `key=value` override. Unknown keys are rejected and every
    /// tolerance must be strictly positive.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn positive(key: &str, value: &str) -> Result<f64> {
            let x: f64 = value.parse().map_err(|_| Error::InvalidConfigValue {
                key: key.to_string(),
                reason: format!("not a number: {value:?}"),
            })?;
            if !x.is_finite() || x <= 0.0 {
                return Err(Error::InvalidConfigValue {
                    key: key.to_string(),
                    reason: format!("must be a positive finite number, got {x}"),
                });
            }
            Ok(x)
        }
        fn count(key: &str, value: &str) -> Result<usize> {
            let k: usize = value.parse().map_err(|_| Error::InvalidConfigValue {
                key: key.to_string(),
                reason: format!("not a non-negative integer: {value:?}"),
            })?;
            if k == 0 {
                return Err(Error::InvalidConfigValue {
                    key: key.to_string(),
                    reason: "must be at least 1".to_string(),
                });
            }
            Ok(k)
        }

        match key {
            "tol.unitary" => self.tol.unitary_per_dim = positive(key, value)?,
            "tol.recon" => self.tol.recon_per_dim = positive(key, value)?,
            "tol.sym" => self.tol.sym = positive(key, value)?,
            "tol.commute" => self.tol.commute = positive(key, value)?,
            "tol.product" => self.tol.product = positive(key, value)?,
            "tol.spec" => self.tol.spec = positive(key, value)?,
            "tol.fix" => self.tol.fix = positive(key, value)?,
            "tol.twine" => self.tol.twine = positive(key, value)?,
            "solver.restarts" => self.solver.restarts = count(key, value)?,
            "solver.max_iter" => self.solver.max_iter = count(key, value)?,
            "solver.tol_product" => self.solver.tol_product = positive(key, value)?,
            "solver.tol_class" => self.solver.tol_class = positive(key, value)?,
            _ => return Err(Error::UnknownConfigKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies a defaults file: a JSON object mapping dotted keys to numbers.
    pub fn apply_defaults_json(&mut self, text: &str) -> Result<()> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Malformed(format!("defaults file: {e}")))?;
        let map = value
            .as_object()
            .ok_or_else(|| Error::Malformed("defaults file: expected a JSON object".into()))?;
        for (key, v) in map {
            let s = match v {
                serde_json::Value::Number(x) => x.to_string(),
                serde_json::Value::String(x) => x.clone(),
                _ => {
                    return Err(Error::InvalidConfigValue {
                        key: key.clone(),
                        reason: "expected a number".to_string(),
                    })
                }
            };
            self.set(key, &s)?;
        }
        Ok(())
    }
}
