use crate::error::{CliError, CliResult};
use crate::io;
use clap::{Args, ValueEnum};
use serde::Serialize;
use spectral_cosets::actions::{
    artin_check, verify_actions_oracle, verify_braid_relations, verify_kernel_element, CheckReport, GroupWord,
};
use spectral_cosets::haar::{
    verify_branch_equiprobability, verify_pair_law, verify_uniform_n3, verify_weighted_n4, Box6, GofReport,
    QuadratureSpec, TestFunction,
};
use spectral_cosets::parallel::McConfig;
use spectral_cosets::polygon::verify_pure_braid_action;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// χ² uniformity of (s12, s13, s23) for n = 3.
    HaarN3,
    /// Weighted law for n = 4 against quadrature on three interior boxes.
    HaarN4,
    /// Equiprobable completion branches for n ≥ 5.
    HaarBranch,
    /// Marginal law of a single entry s12 (Kolmogorov–Smirnov).
    Pair,
    /// Closed-form actions against the matrix oracle.
    ActionsOracle,
    /// Braid relations on tuples.
    BraidRelations,
    /// The squared full twist acts trivially on cosets.
    Kernel,
    /// Artin conditions for --word.
    Artin,
    /// Pure braids preserve side lengths and closure of spherical polygons.
    PolygonPure,
}

impl Suite {
    fn default_n(self) -> usize {
        match self {
            Suite::HaarN3 => 3,
            Suite::HaarN4 => 4,
            Suite::HaarBranch => 6,
            Suite::Pair => 2,
            Suite::Kernel => 4,
            Suite::ActionsOracle | Suite::BraidRelations | Suite::Artin => 5,
            Suite::PolygonPure => 4,
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Suite::HaarN3 => 1_000_000,
            Suite::HaarN4 => 10_000_000,
            Suite::HaarBranch | Suite::Pair => 100_000,
            Suite::ActionsOracle => 10_000,
            Suite::BraidRelations => 1_000,
            Suite::Kernel | Suite::Artin | Suite::PolygonPure => 100,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Tuple length (polygon-pure: number of sides); defaults per suite.
    #[arg(long)]
    n: Option<usize>,
    /// Sample or trial count; defaults per suite.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: u64,
    /// Worker threads (0: all cores). Results do not depend on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Relative tolerance for haar-n4 (default 0.02).
    #[arg(long)]
    tol: Option<f64>,
    /// Word for artin and polygon-pure.
    #[arg(long, allow_hyphen_values = true)]
    word: Option<String>,
    /// Bins per axis for haar-n3.
    #[arg(long, default_value_t = 10)]
    bins: usize,
    /// Comma-separated side lengths for polygon-pure.
    #[arg(long, value_delimiter = ',', default_value = "1.0,1.2,1.4,1.6")]
    theta: Vec<f64>,
    /// Write the histogram as CSV (bin_id, expected, observed).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Report {
    Gof(GofReport),
    Check(CheckReport),
}

impl Report {
    fn pass(&self) -> bool {
        match self {
            Report::Gof(r) => r.pass,
            Report::Check(r) => r.pass,
        }
    }

    fn failures(&self) -> Vec<&str> {
        let components = match self {
            Report::Gof(r) => &r.components,
            Report::Check(r) => &r.components,
        };
        components.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

fn parse_word(word: Option<&str>, default: Option<&str>) -> CliResult<GroupWord> {
    let text = word
        .or(default)
        .ok_or_else(|| CliError::usage("this suite needs --word"))?;
    text.parse().map_err(|e| CliError::usage(format!("--word: {e}")))
}

pub fn cmd_verify(a: &VerifyArgs) -> CliResult<ExitCode> {
    let n = a.n.unwrap_or(a.suite.default_n());
    let samples = a.samples.unwrap_or(a.suite.default_samples());
    let cfg = McConfig::new(a.seed).with_threads(a.threads);
    if a.tol.is_some() && a.suite != Suite::HaarN4 {
        return Err(CliError::usage("--tol only applies to haar-n4"));
    }
    let fixed_n = |expected: usize| {
        if n == expected {
            Ok(())
        } else {
            Err(CliError::usage(format!(
                "this suite runs at n = {expected}, got --n {n}"
            )))
        }
    };
    let report = match a.suite {
        Suite::HaarN3 => {
            fixed_n(3)?;
            Report::Gof(verify_uniform_n3(samples, a.bins, &cfg)?)
        }
        Suite::HaarN4 => {
            fixed_n(4)?;
            let functions = Box6::reference_set().map(TestFunction::Indicator);
            let tol = a.tol.unwrap_or(0.02);
            Report::Gof(verify_weighted_n4(
                samples,
                &functions,
                QuadratureSpec::default(),
                tol,
                &cfg,
            )?)
        }
        Suite::HaarBranch => Report::Gof(verify_branch_equiprobability(n, samples, &cfg)?),
        Suite::Pair => {
            fixed_n(2)?;
            Report::Gof(verify_pair_law(samples, &cfg)?)
        }
        Suite::ActionsOracle => Report::Check(verify_actions_oracle(n, samples, &cfg)?),
        Suite::BraidRelations => Report::Check(verify_braid_relations(n, samples, &cfg)?),
        Suite::Kernel => Report::Check(verify_kernel_element(n, samples, &cfg)?),
        Suite::Artin => Report::Check(artin_check(&parse_word(a.word.as_deref(), None)?, n, samples, &cfg)?),
        Suite::PolygonPure => {
            if a.n.is_some_and(|n| n != a.theta.len()) {
                return Err(CliError::usage("--n must match the number of --theta side lengths"));
            }
            let w = parse_word(a.word.as_deref(), Some("s1 s1 s2^-1 s2^-1"))?;
            Report::Check(verify_pure_braid_action(&a.theta, &w, samples, &cfg)?)
        }
    };
    if let Some(path) = &a.csv {
        write_csv(path, &report)?;
    }
    let mut out = io::output(a.out.as_deref())?;
    io::emit(&mut out, &report)?;
    io::finish(out)?;
    if report.pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{}", serde_json::json!({ "failures": report.failures() }));
        Ok(ExitCode::from(1))
    }
}

fn write_csv(path: &PathBuf, report: &Report) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    w.write_record(["bin_id", "expected", "observed"])
        .map_err(|e| CliError::io(e.to_string()))?;
    if let Report::Gof(r) = report {
        for row in &r.histogram {
            w.write_record([
                row.bin_id.to_string(),
                format!("{:.16e}", row.expected),
                format!("{}", row.observed),
            ])
            .map_err(|e| CliError::io(e.to_string()))?;
        }
    }
    Ok(w.flush()?)
}
