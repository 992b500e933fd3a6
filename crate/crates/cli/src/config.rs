use std::path::{Path, PathBuf};

use difflab::ffield::is_prime;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    TwistedCount,
    Jacobi,
    Bezout,
    Growth,
    DegreeAsymptotics,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::TwistedCount => "twisted_count",
            Kind::Jacobi => "jacobi",
            Kind::Bezout => "bezout",
            Kind::Growth => "growth",
            Kind::DegreeAsymptotics => "degree_asymptotics",
        }
    }
}

/// One experiment. Polynomials are strings in the difference-polynomial
/// grammar (`x1@2` is `σ²(x1)`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub p: u64,
    /// `q = p^e` for each `e` (all kinds but growth).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_exponents: Option<Vec<u32>>,
    /// Extension degrees (growth).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<Vec<u32>>,
    /// Stage counts (growth), default `0..=3`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    /// Variables per stage (growth), default 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default)]
    pub system: Vec<String>,
    /// Seeded random 2×2 systems (bezout) in place of `system`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_systems: Option<usize>,
    /// Label for the `system_id` / `fixture` column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default)]
    pub seed: u64,
    /// Kind-specific default when absent: residual constant 10 for
    /// twisted counts, slope slack 0.3 for jacobi, dimension slack 0.25 for
    /// growth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Expected `(a, b)` of a growth profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<(i64, i64)>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Largest `q` accepted from a config.
pub const MAX_Q: u64 = 1 << 40;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn strictly_increasing<T: PartialOrd>(name: &str, v: &[T]) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(invalid(format!("{name} must be nonempty")));
    }
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !is_prime(self.p) {
            return Err(invalid(format!("p must be prime, got {}", self.p)));
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t >= 0.0) {
                return Err(invalid("tolerance must be a nonnegative number"));
            }
        }
        match self.kind {
            Kind::Growth => {
                let s = self.s_grid.as_deref().ok_or_else(|| invalid("growth needs s_grid"))?;
                strictly_increasing("s_grid", s)?;
                if s[0] == 0 {
                    return Err(invalid("s_grid entries must be positive"));
                }
                strictly_increasing("n_grid", &self.n_grid())?;
                if self.d() == 0 || self.d() > 2 {
                    return Err(invalid("d must be 1 or 2"));
                }
            }
            _ => {
                let e = self.q_exponents.as_deref().ok_or_else(|| invalid(format!("{} needs q_exponents", self.kind.name())))?;
                strictly_increasing("q_exponents", e)?;
                if e[0] == 0 {
                    return Err(invalid("q_exponents entries must be positive"));
                }
                for &k in e {
                    if self.p.checked_pow(k).is_none_or(|q| q > MAX_Q) {
                        return Err(invalid(format!("q = {}^{k} is too large", self.p)));
                    }
                }
            }
        }
        let needs_system = !(self.kind == Kind::Bezout && self.random_systems.is_some()) && self.kind != Kind::Growth;
        if needs_system && self.system.is_empty() {
            return Err(invalid(format!("{} needs a nonempty system", self.kind.name())));
        }
        if self.random_systems.is_some() && self.kind != Kind::Bezout {
            return Err(invalid("random_systems applies to bezout only"));
        }
        if self.random_systems.is_some() && !self.system.is_empty() {
            return Err(invalid("give either system or random_systems"));
        }
        Ok(())
    }

    pub fn q_grid(&self) -> Vec<u64> {
        self.q_exponents
            .as_deref()
            .unwrap_or_default()
            .iter()
            .map(|&e| self.p.pow(e))
            .collect()
    }

    pub fn n_grid(&self) -> Vec<usize> {
        self.n_grid.clone().unwrap_or_else(|| vec![0, 1, 2, 3])
    }

    pub fn d(&self) -> usize {
        self.d.unwrap_or(1)
    }

    pub fn id(&self) -> String {
        self.id.clone().unwrap_or_else(|| "s0".into())
    }
}
