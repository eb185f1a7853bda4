//! Scenario configuration: JSON schema, validation and construction of the
//! splitting, vacuum sequence and scattering data.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::hierarchy::{Family, VacuumSequence, Window};
use crate::matrix::Mat;
use crate::scalar::{c, C64};
use crate::series::Series;
use crate::splitting::{sample_negative_element, SigmaForm, SplittingSpec, TauForm, Variant};
use crate::virasoro::GammaPreset;

pub const SCHEMA_VERSION: u32 = 1;

/// Name of the seeded generator, recorded in configs and reports.
pub const PRNG: &str = "chacha8:seed_from_u64:top53bits:uniform[-1,1)";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Numerical {
        stage: String,
        #[source]
        source: Error,
    },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl ScenarioError {
    pub fn numerical(stage: &str) -> impl FnOnce(Error) -> ScenarioError + '_ {
        move |source| ScenarioError::Numerical { stage: stage.to_string(), source }
    }

    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) | ScenarioError::Io { .. } => 2,
            ScenarioError::Numerical { .. } => 3,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Config(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Factorization,
    Flows,
    Tau,
    Virasoro,
    ProofIdentities,
    Recovery,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Factorization, Suite::Flows, Suite::Tau, Suite::Virasoro, Suite::ProofIdentities, Suite::Recovery];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Factorization => "factorization",
            Suite::Flows => "flows",
            Suite::Tau => "tau",
            Suite::Virasoro => "virasoro",
            Suite::ProofIdentities => "proof_identities",
            Suite::Recovery => "recovery",
        }
    }
}

/// `σ` as written in a config: `"inverse_transpose"` or `{"conjugator": [[[re, im], …], …]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaConfig {
    InverseTranspose,
    Conjugator(Vec<Vec<[f64; 2]>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauConfig {
    InverseConjTranspose,
    Conj,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeded {
    pub seed: u64,
    pub depth: usize,
    pub amplitude: f64,
}

/// One coefficient `f_k` of an explicit `f`, as real and imaginary row lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub degree: i32,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

/// Explicit `f`: inline Laurent-polynomial terms, or the `t = 0` rows of an
/// `M` dump (a truncated series, trusted down to its lowest listed degree).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Explicit {
    Terms(Vec<Term>),
    Csv(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FSource {
    Seeded(Seeded),
    Explicit(Explicit),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VirasoroSettings {
    #[serde(default = "default_ells")]
    pub ells: Vec<i32>,
    #[serde(default = "default_gammas")]
    pub gammas: Vec<GammaPreset>,
}

fn default_ells() -> Vec<i32> {
    vec![-1, 0, 1, 2, 3]
}

fn default_gammas() -> Vec<GammaPreset> {
    vec![GammaPreset::Zero, GammaPreset::Xi0]
}

impl Default for VirasoroSettings {
    fn default() -> Self {
        VirasoroSettings { ells: default_ells(), gammas: default_gammas() }
    }
}

fn default_variant() -> String {
    "standard".into()
}

fn default_prng() -> String {
    PRNG.into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub family: String,
    pub n: usize,
    #[serde(default = "default_variant")]
    pub variant: String,
    #[serde(default)]
    pub sigma: Option<SigmaConfig>,
    #[serde(default)]
    pub tau: Option<TauConfig>,
    #[serde(default)]
    pub traceless: bool,
    /// Diagonal of `a` as `[re, im]` pairs. Required for gl_n, optional for
    /// akns_sl2 (default `diag(i, −i)`), fixed for the other families.
    #[serde(default)]
    pub a: Option<Vec<[f64; 2]>>,
    /// Active flow exponents `j` (gl_n: every `e_kkλ^j`, k = 1..n).
    pub exponents: Vec<u32>,
    pub order: usize,
    #[serde(default)]
    pub window_lo: Option<i32>,
    pub f: FSource,
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub virasoro: VirasoroSettings,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_prng")]
    pub prng: String,
}

/// Everything a run needs, built from a validated config.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub seq: VacuumSequence,
    pub spec: SplittingSpec,
    pub window: Window,
    pub f: Series<C64>,
    /// Directory used to resolve relative paths in the config.
    pub base_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(config_err)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    pub fn family(&self) -> Result<Family, ScenarioError> {
        Family::parse(&self.family).map_err(config_err)
    }

    pub fn variant(&self) -> Result<Variant, ScenarioError> {
        Variant::parse(&self.variant).map_err(config_err)
    }

    fn a_diag(&self) -> Option<Vec<C64>> {
        self.a.as_ref().map(|v| v.iter().map(|p| c(p[0], p[1])).collect())
    }

    fn build_seq(&self, family: Family) -> Result<VacuumSequence, ScenarioError> {
        let n = self.n;
        let seq = match family {
            Family::AknsSl2 => {
                if n != 2 {
                    return Err(config_err("akns_sl2 requires n = 2"));
                }
                let a = self.a_diag().unwrap_or_else(|| vec![c(0.0, 1.0), c(0.0, -1.0)]);
                if a.len() != 2 {
                    return Err(config_err("akns_sl2 needs two diagonal entries for a"));
                }
                VacuumSequence::akns([a[0], a[1]], &self.exponents)
            }
            Family::VectorAkns => {
                if n < 2 {
                    return Err(config_err("vector_akns requires n >= 2"));
                }
                if self.a.is_some() {
                    return Err(config_err("vector_akns fixes a = diag(iI, −i); omit the a field"));
                }
                VacuumSequence::vector_akns(n - 1, &self.exponents)
            }
            Family::GlN => {
                let a = self.a_diag().ok_or_else(|| config_err("gl_n requires the a field"))?;
                if a.len() != n {
                    return Err(config_err(format!("gl_n: a has {} entries, n = {n}", a.len())));
                }
                VacuumSequence::gl_n(&a, &self.exponents)
            }
            Family::KdvTwisted => {
                if n != 2 {
                    return Err(config_err("kdv_twisted requires n = 2"));
                }
                if self.a.is_some() {
                    return Err(config_err("kdv_twisted fixes a; omit the a field"));
                }
                VacuumSequence::kdv_twisted(&self.exponents)
            }
        };
        seq.map_err(config_err)
    }

    fn build_spec(&self, family: Family) -> Result<SplittingSpec, ScenarioError> {
        let variant = self.variant()?;
        let sigma = match &self.sigma {
            None | Some(SigmaConfig::InverseTranspose) => SigmaForm::InverseTranspose,
            Some(SigmaConfig::Conjugator(rows)) => {
                let m: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|p| c(p[0], p[1])).collect()).collect();
                if m.len() != self.n || m.iter().any(|r| r.len() != self.n) {
                    return Err(config_err("sigma conjugator must be n×n"));
                }
                SigmaForm::Conjugator(Mat::from_rows(&m))
            }
        };
        let tau = match self.tau.unwrap_or(TauConfig::InverseConjTranspose) {
            TauConfig::InverseConjTranspose => TauForm::InverseConjTranspose,
            TauConfig::Conj => TauForm::Conj,
        };
        if (family == Family::KdvTwisted) != (variant == Variant::KdvTwisted) {
            return Err(config_err("the kdv_twisted family and variant go together"));
        }
        SplittingSpec::new(variant, self.n, sigma, tau, self.traceless).map_err(config_err)
    }

    /// Validate and construct the scenario. Relative paths resolve against `base_dir`.
    pub fn build(&self, base_dir: &Path) -> Result<Scenario, ScenarioError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_err(format!("schema_version {} (expected {SCHEMA_VERSION})", self.schema_version)));
        }
        if self.prng != PRNG {
            return Err(config_err(format!("unsupported prng {:?} (expected {PRNG:?})", self.prng)));
        }
        if self.order == 0 {
            return Err(config_err("order must be >= 1"));
        }
        if self.suites.is_empty() {
            return Err(config_err("no suites selected"));
        }
        let family = self.family()?;
        let seq = self.build_seq(family)?;
        let spec = self.build_spec(family)?;
        for s in &self.suites {
            match s {
                Suite::ProofIdentities if family != Family::GlN => {
                    return Err(config_err("proof_identities applies to gl_n"));
                }
                Suite::Recovery if family != Family::VectorAkns => {
                    return Err(config_err("recovery applies to vector_akns"));
                }
                _ => {}
            }
        }
        if self.virasoro.ells.iter().any(|&l| l < -1) {
            return Err(config_err("Virasoro indices must be >= −1"));
        }
        for (name, &tol) in &self.tolerances {
            if crate::catalog::lookup(name).is_none() {
                return Err(config_err(format!("tolerance override for unknown check {name:?}")));
            }
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(config_err(format!("tolerance for {name:?} must be finite and non-negative")));
            }
        }
        let mut window = seq.window(self.order);
        if let Some(lo) = self.window_lo {
            if lo >= -1 {
                return Err(config_err("window_lo must be negative"));
            }
            window.lo = lo;
        }
        let f = match &self.f {
            FSource::Seeded(s) => {
                if s.depth == 0 || !(s.amplitude.is_finite()) {
                    return Err(config_err("seeded f needs depth >= 1 and a finite amplitude"));
                }
                sample_negative_element(&spec, s.seed, s.depth, s.amplitude, window.lo).map_err(ScenarioError::numerical("sampling"))?
            }
            FSource::Explicit(Explicit::Terms(terms)) => explicit_terms(self.n, window.lo, terms)?,
            FSource::Explicit(Explicit::Csv(p)) => {
                let path = if p.is_absolute() { p.clone() } else { base_dir.join(p) };
                crate::dump::read_frame_at_origin(&path, self.n, window.lo)?
            }
        };
        if matches!(self.f, FSource::Explicit(_)) {
            crate::scattering::check_negative_loop(&f).map_err(|e| config_err(format!("explicit f: {e}")))?;
            let d = spec.reality_defect(&f).map_err(ScenarioError::numerical("reality check"))?;
            if d > 1e-9 {
                return Err(config_err(format!("explicit f violates the {} reality conditions (defect {d:e})", spec.variant.name())));
            }
        }
        Ok(Scenario { config: self.clone(), seq, spec, window, f, base_dir: base_dir.to_path_buf() })
    }
}

fn explicit_terms(n: usize, lo: i32, terms: &[Term]) -> Result<Series<C64>, ScenarioError> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if t.degree < lo {
            return Err(config_err(format!("term degree {} below the window floor {lo}", t.degree)));
        }
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&t.re) || t.im.as_ref().is_some_and(|im| !shape_ok(im)) {
            return Err(config_err(format!("term of degree {} is not {n}×{n}", t.degree)));
        }
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let im = t.im.as_ref().map_or(0.0, |x| x[i][j]);
                m.set(i, j, c(t.re[i][j], im));
            }
        }
        out.push((t.degree, m));
    }
    Ok(Series::from_terms(n, lo, &out))
}

impl Scenario {
    pub fn tolerance(&self, name: &str) -> f64 {
        self.config
            .tolerances
            .get(name)
            .copied()
            .or_else(|| crate::catalog::lookup(name).map(|c| c.tolerance))
            .unwrap_or(1e-9)
    }

    pub fn has_suite(&self, s: Suite) -> bool {
        self.config.suites.contains(&s)
    }
}
