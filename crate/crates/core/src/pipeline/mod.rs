//! End-to-end orchestration: run configuration, `construct` (parameters →
//! congruence target → sieve → manifest), `analyze` (manifest → one field
//! report per `(m, j)`) and the named verification suites.

mod verify;

pub use verify::{run_suite, SuiteReport, CheckOutcome, SUITES};

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, FactorBudget, FactorCache};
use crate::classnum::{assemble_report, unit_data, ClassnumError, FieldReport};
use crate::construction::{
    build_congruence_target, derive_params, sieve_admissible, ConstructionError, ConstructionParams,
    Overrides, RunManifest, SieveMode, DEFAULT_Q_BITS_CAP, MANIFEST_SCHEMA,
};
use crate::lseries::{default_cutoff, log_L1_proxy};
use crate::purefield::{pure_field_from_factorization, FieldError, FieldOptions, StenderUnit};
use crate::symbols::is_lth_power_residue;

pub const ANALYSIS_SCHEMA: &str = "purefields.analysis/1";

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("I/O on {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("no admissible m in 1..={m_max} (progression of {len} terms)")]
    Empty { m_max: u64, len: u64 },
    #[error("analysis produced no reports ({failures} field failures)")]
    NoReports { failures: usize },
    #[error("unknown verification suite {0:?}; known: {known}", known = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl PipelineError {
    /// 2 usage/config, 3 empty result, 4 invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io { .. } | Self::UnknownSuite(_) => 2,
            Self::Empty { .. } | Self::NoReports { .. } => 3,
            Self::VerifyFailed(_) => 4,
            Self::Construction(e) => match e {
                ConstructionError::Invariant(_)
                | ConstructionError::LemmaViolated { .. }
                | ConstructionError::Field(_) => 4,
                _ => 2,
            },
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub l: u32,
    pub k: u32,
    pub epsilon: f64,
    #[serde(with = "crate::bigserde::biguint")]
    pub x: BigUint,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_prime_ceiling: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol_prime_ceiling: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", with = "crate::bigserde::opt_biguint")]
    pub z: Option<BigUint>,
    /// Euler-product cutoff; `(log D)^ε` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proxy_cutoff: Option<u64>,
    /// Certified decimal digits of unit logarithms.
    pub precision: u32,
    pub mode: SieveMode,
    pub out: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache: Option<PathBuf>,
    /// Worker threads; 0 means one per core.
    pub jobs: usize,
    pub q_bits_cap: u64,
    pub max_rho_iterations: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            l: 3,
            k: 2,
            epsilon: 0.9,
            x: BigUint::from(1_000_000_000u64),
            small_prime_ceiling: None,
            symbol_prime_ceiling: None,
            z: None,
            proxy_cutoff: None,
            precision: 30,
            mode: SieveMode::Direct,
            out: PathBuf::from("out"),
            cache: None,
            jobs: 0,
            q_bits_cap: DEFAULT_Q_BITS_CAP,
            max_rho_iterations: FactorBudget::default().max_rho_iterations,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn overrides(&self) -> Overrides {
        Overrides {
            small_prime_ceiling: self.small_prime_ceiling,
            symbol_prime_ceiling: self.symbol_prime_ceiling,
            z: self.z.clone(),
        }
    }

    pub fn budget(&self) -> FactorBudget {
        FactorBudget::iterations(self.max_rho_iterations)
    }

    /// Derived construction parameters; fails before any work is done.
    pub fn params(&self) -> Result<ConstructionParams, PipelineError> {
        if self.precision == 0 {
            return Err(PipelineError::Config("precision must be at least 1 digit".into()));
        }
        if self.max_rho_iterations == 0 {
            return Err(PipelineError::Config("max_rho_iterations must be positive".into()));
        }
        let mut p = derive_params(self.l, self.k, self.epsilon, &self.x, &self.overrides())?;
        p.q_bits_cap = self.q_bits_cap;
        Ok(p)
    }

    pub fn load_cache(&self) -> Result<Option<FactorCache>, PipelineError> {
        match &self.cache {
            Some(p) if p.exists() => FactorCache::load(p).map(Some).map_err(|e| io_err(p, e)),
            Some(_) => Ok(Some(FactorCache::new())),
            None => Ok(None),
        }
    }
}

/// Runs `f` with at most `jobs` worker threads (0 = rayon default).
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if jobs > 0 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                return pool.install(f);
            }
        }
    }
    let _ = jobs;
    f()
}

pub fn run_construct(cfg: &RunConfig, cache: Option<&FactorCache>) -> Result<RunManifest, PipelineError> {
    let params = cfg.params()?;
    let target = build_congruence_target(&params)?;
    let budget = cfg.budget();
    let outcome = with_jobs(cfg.jobs, || sieve_admissible(&target, &params, cfg.mode, &budget, cache))?;
    Ok(RunManifest {
        schema: MANIFEST_SCHEMA.into(),
        params,
        mode: cfg.mode,
        target,
        admissible: outcome.admissible,
        gaps: outcome.gaps,
        stats: outcome.stats,
    })
}

/// Residue-symbol re-check of one lemma-search prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolCheck {
    pub m: u64,
    pub j: u32,
    pub p: u64,
    /// `Δ(m) + j` is a nonzero l-th power residue mod `p`.
    pub passed: bool,
    /// Same test on the discriminant `D_j`; `None` when `p | D_j`.
    pub discriminant_residue: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldEntry {
    pub m: u64,
    pub j: u32,
    pub report: FieldReport,
    /// Set when `j | l n^(l-1)` but the unit computation failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldFailure {
    pub m: u64,
    pub j: u32,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub schema: String,
    pub l: u32,
    pub k: u32,
    pub proxy_cutoff: Option<u64>,
    pub precision: u32,
    pub reports: Vec<FieldEntry>,
    pub failures: Vec<FieldFailure>,
    pub symbol_checks: Vec<SymbolCheck>,
    pub symbols_verified: bool,
}

impl Analysis {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("analysis serializes")
    }
}

#[derive(Debug, thiserror::Error)]
enum FieldFault {
    #[error("manifest factorization of Δ(m)+j is inconsistent: {0}")]
    Manifest(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Classnum(#[from] ClassnumError),
}

pub fn run_analyze(manifest: &RunManifest, cfg: &RunConfig) -> Result<Analysis, PipelineError> {
    let params = &manifest.params;
    let jobs: Vec<(u64, u32)> = manifest
        .admissible
        .iter()
        .flat_map(|a| a.per_j.iter().map(move |pj| (a.m, pj.j)))
        .collect();
    let results = with_jobs(cfg.jobs, || {
        crate::par_map(&jobs, |&(m, j)| {
            let run = catch_unwind(AssertUnwindSafe(|| analyze_field(manifest, m, j, cfg)));
            match run {
                Ok(r) => r.map_err(|e| e.to_string()),
                Err(panic) => Err(format!("panic: {}", panic_message(&panic))),
            }
        })
    });
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (&(m, j), r) in jobs.iter().zip(results) {
        match r {
            Ok(entry) => reports.push(entry),
            Err(error) => failures.push(FieldFailure { m, j, error }),
        }
    }

    let lemma_primes: Vec<u64> = manifest.target.lemma_primes().collect();
    let mut symbol_checks = Vec::new();
    for a in &manifest.admissible {
        for pj in &a.per_j {
            let value = BigInt::from(&a.delta + pj.j);
            let disc = BigInt::from(pj.discriminant.clone());
            for &p in &lemma_primes {
                let passed = is_lth_power_residue(&value, p, params.l).unwrap_or(false);
                let discriminant_residue = if (&pj.discriminant % p).is_zero() {
                    None
                } else {
                    is_lth_power_residue(&disc, p, params.l).ok()
                };
                symbol_checks.push(SymbolCheck {
                    m: a.m,
                    j: pj.j,
                    p,
                    passed,
                    discriminant_residue,
                });
            }
        }
    }
    let symbols_verified = symbol_checks.iter().all(|c| c.passed);
    Ok(Analysis {
        schema: ANALYSIS_SCHEMA.into(),
        l: params.l,
        k: params.k,
        proxy_cutoff: cfg.proxy_cutoff,
        precision: cfg.precision,
        reports,
        failures,
        symbol_checks,
        symbols_verified,
    })
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown".into())
}

fn analyze_field(manifest: &RunManifest, m: u64, j: u32, cfg: &RunConfig) -> Result<FieldEntry, FieldFault> {
    let params = &manifest.params;
    let adm = manifest
        .admissible
        .iter()
        .find(|a| a.m == m)
        .ok_or_else(|| FieldFault::Manifest(format!("m = {m} missing")))?;
    let pj = adm
        .per_j
        .iter()
        .find(|p| p.j == j)
        .ok_or_else(|| FieldFault::Manifest(format!("j = {j} missing for m = {m}")))?;
    let value = params.delta(m) + j;
    if pj.factorization.value() != value {
        return Err(FieldFault::Manifest(format!("product ≠ Δ({m}) + {j}")));
    }
    if let Some((p, _)) = pj.factorization.entries().iter().find(|(p, _)| !is_prime(p)) {
        return Err(FieldFault::Manifest(format!("{p} is not prime")));
    }
    let opts = FieldOptions {
        validate: true,
        budget: cfg.budget(),
    };
    let field = pure_field_from_factorization(&value, &pj.factorization, params.l, &opts)?;
    let cutoff = cfg
        .proxy_cutoff
        .unwrap_or_else(|| default_cutoff(&field.discriminant, params.epsilon));
    let proxy = log_L1_proxy(&field.radicand, params.l, cutoff);

    let n = BigUint::from(m) * &params.period;
    let r = BigUint::from(j);
    let divides = (BigUint::from(params.l) * n.pow(params.l - 1) % &r).is_zero();
    let (unit, unit_error) = if divides {
        match StenderUnit::new(n, r, params.l).and_then(|su| unit_data(&su, cfg.precision)) {
            Ok(u) => (Some(u), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let report = assemble_report(&field, &proxy, unit)?;
    Ok(FieldEntry {
        m,
        j,
        report,
        unit_error,
    })
}

/// `manifest.json` in the output directory.
pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<PathBuf, PipelineError> {
    write_text(dir, "manifest.json", &manifest.to_json())
}

/// `reports.json` in the output directory.
pub fn write_analysis(dir: &Path, analysis: &Analysis) -> Result<PathBuf, PipelineError> {
    write_text(dir, "reports.json", &analysis.to_json())
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, PipelineError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join(name);
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    std::fs::write(&path, body).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
    if manifest.schema != MANIFEST_SCHEMA {
        return Err(PipelineError::Config(format!(
            "{}: schema {:?}, expected {MANIFEST_SCHEMA:?}",
            path.display(),
            manifest.schema
        )));
    }
    Ok(manifest)
}
