//! `purefields`: construct runs of consecutive radicands, analyze their
//! fields, run verification suites and print reports.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 empty result,
//! 4 invariant violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::Zero;

use purefields::arith::{exact_root, FactorCache};
use purefields::classnum::{assemble_report, unit_data};
use purefields::construction::{RunManifest, SieveMode, MANIFEST_SCHEMA};
use purefields::lseries::{default_cutoff, log_L1_proxy};
use purefields::pipeline::{
    read_manifest, run_analyze, run_construct, run_suite, write_analysis, write_manifest, write_text,
    Analysis, PipelineError, RunConfig, ANALYSIS_SCHEMA,
};
use purefields::purefield::{make_pure_field_with, FieldOptions, StenderUnit};

/// `println!` that exits quietly when stdout is a closed pipe.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("writing to stdout: {e}");
        }
    }};
}

#[derive(Parser)]
#[command(name = "purefields", version, about = "Pure prime-degree fields with large class-number proxies")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Derive parameters, build the congruence target and sieve admissible m.
    Construct(RunArgs),
    /// Field reports for every admissible m and j = 1..k of a manifest.
    Analyze {
        #[command(flatten)]
        run: RunArgs,
        /// Manifest to analyze (default: <out>/manifest.json).
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Run a named verification suite, or "all".
    Verify {
        suite: String,
        /// Emit JSON instead of PASS/FAIL lines.
        #[arg(long)]
        json: bool,
    },
    /// Summarize a manifest or reports file, or report on a single radicand.
    Report {
        #[command(flatten)]
        run: RunArgs,
        /// manifest.json or reports.json to summarize.
        input: Option<PathBuf>,
        /// Single radicand to report on.
        #[arg(long, value_parser = parse_big)]
        a: Option<BigUint>,
        /// Write the λ-series CSV for --a into the output directory.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Args, Default, Clone)]
struct RunArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Search ceiling; accepts 1000000, 10^9 or 1e9.
    #[arg(long, value_parser = parse_big)]
    x: Option<BigUint>,
    #[arg(long = "small-ceiling")]
    small_ceiling: Option<u64>,
    #[arg(long = "symbol-ceiling")]
    symbol_ceiling: Option<u64>,
    #[arg(long, value_parser = parse_big)]
    z: Option<BigUint>,
    /// staged or direct.
    #[arg(long)]
    mode: Option<SieveMode>,
    #[arg(long = "proxy-cutoff")]
    proxy_cutoff: Option<u64>,
    /// Certified digits for unit logarithms.
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Factorization cache (CSV), read at start and written at exit.
    #[arg(long)]
    cache: Option<PathBuf>,
}

fn parse_big(s: &str) -> Result<BigUint, String> {
    let s = s.trim().replace('_', "");
    let bad = || format!("not a nonnegative integer: {s:?}");
    if let Some((b, e)) = s.split_once('^') {
        let b: BigUint = b.parse().map_err(|_| bad())?;
        let e: u32 = e.parse().map_err(|_| bad())?;
        return Ok(b.pow(e));
    }
    if let Some((m, e)) = s.split_once(['e', 'E']) {
        let m: BigUint = m.parse().map_err(|_| bad())?;
        let e: u32 = e.parse().map_err(|_| bad())?;
        return Ok(m * BigUint::from(10u32).pow(e));
    }
    s.parse().map_err(|_| bad())
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, PipelineError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident => $g:ident),*) => {$(
                if let Some(v) = &self.$f { c.$g = v.clone(); }
            )*};
        }
        set!(l => l, k => k, epsilon => epsilon, x => x, mode => mode,
             precision => precision, jobs => jobs, out => out);
        if self.small_ceiling.is_some() {
            c.small_prime_ceiling = self.small_ceiling;
        }
        if self.symbol_ceiling.is_some() {
            c.symbol_prime_ceiling = self.symbol_ceiling;
        }
        if self.z.is_some() {
            c.z = self.z.clone();
        }
        if self.proxy_cutoff.is_some() {
            c.proxy_cutoff = self.proxy_cutoff;
        }
        if self.cache.is_some() {
            c.cache = self.cache.clone();
        }
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<u8, PipelineError> {
    match cli.cmd {
        Cmd::Construct(args) => construct(&args.config()?),
        Cmd::Analyze { run, manifest } => {
            let cfg = run.config()?;
            let path = manifest.unwrap_or_else(|| cfg.out.join("manifest.json"));
            analyze(&cfg, &read_manifest(&path)?)
        }
        Cmd::Verify { suite, json } => verify(&suite, json),
        Cmd::Report { run, input, a, csv } => {
            let cfg = run.config()?;
            match (input, a) {
                (Some(p), None) => summarize(&p),
                (None, Some(a)) => single_field(&cfg, &a, csv),
                _ => Err(PipelineError::Config("report takes either a file or --a".into())),
            }
        }
    }
}

fn save_cache(cfg: &RunConfig, cache: Option<&FactorCache>) -> Result<(), PipelineError> {
    if let (Some(path), Some(c)) = (&cfg.cache, cache) {
        c.save(path).map_err(|e| PipelineError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
    }
    Ok(())
}

fn construct(cfg: &RunConfig) -> Result<u8, PipelineError> {
    cfg.params()?;
    let cache = cfg.load_cache()?;
    let manifest = run_construct(cfg, cache.as_ref())?;
    save_cache(cfg, cache.as_ref())?;
    write_text(&cfg.out, "config.toml", &cfg.to_toml())?;
    let path = write_manifest(&cfg.out, &manifest)?;
    let ms: Vec<String> = manifest.admissible.iter().map(|a| a.m.to_string()).collect();
    out!(
        "M = {}, q = {}, m0 = {}, progression {} terms, {} admissible, {} gaps{}",
        manifest.params.m_max,
        manifest.target.q,
        manifest.target.m0,
        manifest.stats.progression_len,
        ms.len(),
        manifest.gaps.len(),
        if manifest.params.override_regime { " (override regime)" } else { "" }
    );
    for w in &manifest.target.warnings {
        out!("warning: {w}");
    }
    if !ms.is_empty() {
        let shown = ms.len().min(20);
        let more = if ms.len() > shown { format!(" ... ({} more)", ms.len() - shown) } else { String::new() };
        out!("m: {}{more}", ms[..shown].join(" "));
    }
    out!("wrote {}", path.display());
    if manifest.admissible.is_empty() {
        let e = PipelineError::Empty {
            m_max: manifest.params.m_max,
            len: manifest.stats.progression_len,
        };
        eprintln!("{e}");
        return Ok(3);
    }
    Ok(0)
}

fn analyze(cfg: &RunConfig, manifest: &RunManifest) -> Result<u8, PipelineError> {
    let analysis = run_analyze(manifest, cfg)?;
    let path = write_analysis(&cfg.out, &analysis)?;
    for f in &analysis.failures {
        eprintln!("field (m = {}, j = {}) failed: {}", f.m, f.j, f.error);
    }
    out!(
        "{} reports, {} failures, {} symbol checks ({})",
        analysis.reports.len(),
        analysis.failures.len(),
        analysis.symbol_checks.len(),
        if analysis.symbols_verified { "all pass" } else { "FAILURES" }
    );
    out!("wrote {}", path.display());
    if !analysis.symbols_verified {
        return Ok(4);
    }
    if analysis.reports.is_empty() {
        return Ok(3);
    }
    Ok(0)
}

fn verify(suite: &str, json: bool) -> Result<u8, PipelineError> {
    let reports = run_suite(suite)?;
    if json {
        out!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize"));
    } else {
        for r in &reports {
            for c in &r.checks {
                out!(
                    "{} {}: {} ({} checked, {} failed; {})",
                    if c.passed { "PASS" } else { "FAIL" },
                    r.suite,
                    c.invariant,
                    c.checked,
                    c.failures,
                    c.detail
                );
            }
        }
    }
    Ok(if reports.iter().all(|r| r.passed) { 0 } else { 4 })
}

fn summarize(path: &Path) -> Result<u8, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(MANIFEST_SCHEMA) => {
            let m = read_manifest(path)?;
            out!("{:>8} {:>3} {:>6} {:>6} {:>5}", "m", "j", "log10D", "S_j", "bound");
            for a in &m.admissible {
                for pj in &a.per_j {
                    out!(
                        "{:>8} {:>3} {:>6.2} {:>6} {:>5}",
                        a.m,
                        pj.j,
                        purefields::arith::ln_big(&pj.discriminant) / std::f64::consts::LN_10,
                        pj.stripped_power,
                        pj.bound_holds
                    );
                }
            }
            Ok(if m.admissible.is_empty() { 3 } else { 0 })
        }
        Some(ANALYSIS_SCHEMA) => {
            let an: Analysis = serde_json::from_value(value)
                .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
            out!(
                "{:>8} {:>3} {:>6} {:>9} {:>10} {:>10} {:>10}",
                "m", "j", "log10D", "proxy", "hR", "h", "R/logD"
            );
            let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
            for e in &an.reports {
                let r = &e.report;
                out!(
                    "{:>8} {:>3} {:>6.2} {:>9.4} {:>10.4e} {:>10} {:>10}",
                    e.m,
                    e.j,
                    purefields::arith::ln_big(&r.field.discriminant) / std::f64::consts::LN_10,
                    r.proxy.sum,
                    r.hr_estimate,
                    opt(r.h_estimate),
                    opt(r.ratios.map(|b| b.regulator_over_log_d)),
                );
            }
            out!("{}", purefields::classnum::ESTIMATE_LABEL);
            Ok(if an.reports.is_empty() { 3 } else { 0 })
        }
        other => Err(PipelineError::Config(format!(
            "{}: unrecognized schema {other:?}",
            path.display()
        ))),
    }
}

/// `a = n^l + r` with `n = floor(a^(1/l))` when `r | l n^(l-1)`.
fn stender_split(a: &BigUint, l: u32) -> Option<StenderUnit> {
    let n = a.nth_root(l);
    let r = a - n.pow(l);
    if n.is_zero() || r.is_zero() || exact_root(a, l).is_some() {
        return None;
    }
    StenderUnit::new(n, r, l).ok()
}

fn single_field(cfg: &RunConfig, a: &BigUint, csv: bool) -> Result<u8, PipelineError> {
    let cache = cfg.load_cache()?;
    let opts = FieldOptions {
        validate: true,
        budget: cfg.budget(),
    };
    let field = make_pure_field_with(a, cfg.l, &opts, cache.as_ref())
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    save_cache(cfg, cache.as_ref())?;
    let cutoff = cfg
        .proxy_cutoff
        .unwrap_or_else(|| default_cutoff(&field.discriminant, cfg.epsilon));
    let proxy = log_L1_proxy(&field.radicand, cfg.l, cutoff);
    let unit = match stender_split(&field.radicand, cfg.l) {
        Some(su) => match unit_data(&su, cfg.precision) {
            Ok(u) => Some(u),
            Err(e) => {
                eprintln!("unit omitted: {e}");
                None
            }
        },
        None => None,
    };
    let report = assemble_report(&field, &proxy, unit).map_err(|e| PipelineError::Config(e.to_string()))?;
    out!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if csv {
        let path = write_text(&cfg.out, &format!("lambda_{}_{}.csv", field.radicand, cfg.l), &proxy.to_csv())?;
        eprintln!("wrote {}", path.display());
    }
    Ok(0)
}
