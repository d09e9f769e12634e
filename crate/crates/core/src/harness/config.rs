use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::testvectors::DEFAULT_M;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Invariance,
    Lowerbound,
    Phase,
    Moments,
    Norms,
    KtypeDecay,
    ChooseM,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Invariance,
        Experiment::Lowerbound,
        Experiment::Phase,
        Experiment::Moments,
        Experiment::Norms,
        Experiment::KtypeDecay,
        Experiment::ChooseM,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Invariance => "invariance",
            Experiment::Lowerbound => "lowerbound",
            Experiment::Phase => "phase",
            Experiment::Moments => "moments",
            Experiment::Norms => "norms",
            Experiment::KtypeDecay => "ktype-decay",
            Experiment::ChooseM => "choose-m",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment `{s}`")))
    }
}

/// Which pair of representations carries the test vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `D_k × D_k` against `V_λ` (weight `k` from the config).
    #[default]
    Discrete,
    /// Three principal series.
    Maass,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(Family::Discrete),
            "maass" => Ok(Family::Maass),
            _ => Err(Error::InvalidArgument(format!("unknown family `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidArgument(format!("unknown format `{s}`"))),
        }
    }
}

/// `count` values of `|λ|` as multiples of `T` in `[lo, hi]`. With `lo = 0`
/// the grid is `hi·j/count`, `j = 1..=count`, so `λ = 0` never appears.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub count: usize,
    pub lo: f64,
    pub hi: f64,
}

impl LambdaGrid {
    pub fn points(&self, t: f64) -> Vec<f64> {
        let n = self.count;
        if self.lo <= 0.0 {
            return (1..=n).map(|j| t * self.hi * j as f64 / n as f64).collect();
        }
        if n == 1 {
            return vec![t * self.hi];
        }
        (0..n)
            .map(|j| t * (self.lo + (self.hi - self.lo) * j as f64 / (n - 1) as f64))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub family: Family,
    pub t_list: Vec<f64>,
    pub k_list: Vec<i64>,
    /// Parity of the third representation.
    pub eps: u8,
    pub lambda_grid: LambdaGrid,
    /// Explicit `|λ|` values for the experiments that do not scale with `T`
    /// (invariance, K-type decay).
    pub lambdas: Vec<f64>,
    /// Imaginary parts of the labels of the first two slots (Maass family).
    pub tau: f64,
    pub tau_p: f64,
    /// One value: used as is. Several: the best is picked by the `choose-m`
    /// scan first.
    pub m_list: Vec<f64>,
    pub z_min: f64,
    pub z_max: f64,
    pub z_points: usize,
    pub tol: f64,
    /// Number of random group elements.
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub const M_SCAN: [f64; 9] = [2.0, 3.0, 4.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0];

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let mut c = ExperimentConfig {
            experiment,
            family: Family::Discrete,
            t_list: vec![50.0, 100.0, 200.0],
            k_list: vec![2],
            eps: 0,
            lambda_grid: LambdaGrid {
                count: 16,
                lo: 0.5,
                hi: 1.0,
            },
            lambdas: vec![],
            tau: 0.0,
            tau_p: 0.0,
            m_list: vec![DEFAULT_M],
            z_min: 10.0,
            z_max: 20.0,
            z_points: 11,
            tol: 1e-8,
            samples: 8,
            seed: 1,
            out: None,
            format: Format::Csv,
        };
        match experiment {
            Experiment::Invariance => {
                c.lambdas = vec![2.0, 10.0];
                c.tol = 1e-10;
            }
            Experiment::Moments => {
                c.k_list = vec![2, 4, 6, 10];
                c.tol = 1e-14;
            }
            Experiment::Norms => {
                c.t_list = vec![1.0, 10.0, 100.0];
                c.k_list = vec![2, 4, 6];
                c.tol = 1e-12;
            }
            Experiment::KtypeDecay => {
                c.k_list = vec![2, 4];
                c.lambdas = vec![5.0, 10.0, 20.0, 40.0];
                c.tol = 1e-13;
            }
            Experiment::ChooseM => {
                c.m_list = M_SCAN.to_vec();
                c.t_list = vec![50.0, 100.0];
                c.lambda_grid.count = 8;
                c.z_points = 6;
            }
            Experiment::Lowerbound | Experiment::Phase => {}
        }
        c
    }

    /// Overrides every field set in `patch`.
    pub fn apply(&mut self, patch: &ConfigPatch) {
        macro_rules! set {
            ($($f:ident),*) => {$(
                if let Some(v) = &patch.$f {
                    self.$f = v.clone();
                }
            )*};
        }
        set!(family, t_list, k_list, eps, lambdas, tau, tau_p, m_list, z_min, z_max, z_points, tol, samples, seed, format);
        if let Some(n) = patch.lambda_count {
            self.lambda_grid.count = n;
        }
        if let Some(v) = patch.lambda_lo {
            self.lambda_grid.lo = v;
        }
        if let Some(v) = patch.lambda_hi {
            self.lambda_grid.hi = v;
        }
        if patch.family == Some(Family::Maass) && patch.lambda_lo.is_none() {
            // |λ| ≤ T in the Maass case
            self.lambda_grid.lo = 0.0;
        }
        if let Some(p) = &patch.out {
            self.out = Some(p.clone());
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.t_list.is_empty() || self.t_list.iter().any(|&t| !(t >= 1.0) || !t.is_finite()) {
            return bad(format!("T-list must be non-empty with every T >= 1, got {:?}", self.t_list));
        }
        if self.k_list.is_empty() || self.k_list.iter().any(|&k| k < 2 || k % 2 != 0) {
            return bad(format!("k must be even and >= 2, got {:?}", self.k_list));
        }
        if self.eps > 1 {
            return bad(format!("eps must be 0 or 1, got {}", self.eps));
        }
        let g = &self.lambda_grid;
        if g.count == 0 || !(g.lo >= 0.0) || !(g.hi > g.lo) {
            return bad(format!("lambda grid needs count >= 1 and 0 <= lo < hi, got {g:?}"));
        }
        if self.lambdas.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return bad(format!("explicit |lambda| values must be positive, got {:?}", self.lambdas));
        }
        if self.m_list.is_empty() || self.m_list.iter().any(|&m| !(m >= 2.0) || !m.is_finite()) {
            return bad(format!("M-list must be non-empty with every M >= 2, got {:?}", self.m_list));
        }
        if !(self.z_min < self.z_max) || self.z_points == 0 {
            return bad(format!("z-range must satisfy z_min < z_max, got [{}, {}]", self.z_min, self.z_max));
        }
        // z must stay off the supports, which reach up to 1 + (M + 0.1)/T
        let reach = self
            .t_list
            .iter()
            .flat_map(|&t| self.m_list.iter().map(move |&m| 1.0 + (m + 0.1) / t))
            .fold(1.1, f64::max);
        if self.z_min <= reach && self.z_max >= -0.1 {
            return bad(format!("z-range [{}, {}] meets the test-vector supports (up to {reach})", self.z_min, self.z_max));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return bad(format!("tolerance must be positive, got {}", self.tol));
        }
        if self.experiment == Experiment::Invariance && self.samples == 0 {
            return bad("invariance needs at least one random group element".into());
        }
        Ok(())
    }

    pub fn z_grid(&self) -> Vec<f64> {
        if self.z_points == 1 {
            return vec![0.5 * (self.z_min + self.z_max)];
        }
        let n = (self.z_points - 1) as f64;
        (0..self.z_points)
            .map(|j| self.z_min + (self.z_max - self.z_min) * j as f64 / n)
            .collect()
    }
}

/// Partial configuration: a JSON config file or the command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigPatch {
    pub family: Option<Family>,
    #[serde(alias = "T")]
    pub t_list: Option<Vec<f64>>,
    #[serde(alias = "k")]
    pub k_list: Option<Vec<i64>>,
    pub eps: Option<u8>,
    pub lambda_count: Option<usize>,
    pub lambda_lo: Option<f64>,
    pub lambda_hi: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    pub tau: Option<f64>,
    pub tau_p: Option<f64>,
    #[serde(alias = "M")]
    pub m_list: Option<Vec<f64>>,
    pub z_min: Option<f64>,
    pub z_max: Option<f64>,
    pub z_points: Option<usize>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Defaults, then the config file, then the flags.
pub fn resolve(experiment: Experiment, file: Option<&ConfigPatch>, flags: &ConfigPatch) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::defaults(experiment);
    if let Some(f) = file {
        c.apply(f);
    }
    c.apply(flags);
    c.validate()?;
    Ok(c)
}
