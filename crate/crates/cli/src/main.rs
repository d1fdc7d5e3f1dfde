//! `spectral-cosets`: sampling, invariants, actions and verification suites over JSON lines.
//!
//! Exit codes: 0 success or all checks pass, 1 a check failed, 2 usage or schema error,
//! 3 numerical degeneracy.

mod error;
mod io;
mod verify;

use clap::{Args, Parser, Subcommand};
use error::{CliError, CliResult};
use rayon::prelude::*;
use serde_json::Value;
use spectral_cosets::actions::{act_tuple, form_act, GroupWord, SignRule};
use spectral_cosets::coset::{reconstruct, CosetTuple, SheetedForm};
use spectral_cosets::parallel::{stream_rng, CHUNK};
use spectral_cosets::polygon::{pure_braid_act, SphericalPolygon};
use std::path::PathBuf;
use std::process::ExitCode;

const WORD_HELP: &str = "Whitespace-separated tokens applied left to right: perm:2,4,3,5 (new \
positions 2..n take the listed old positions), inv:k (g_k <- g_k^-1), lmul:j,k (g_k <- g_j g_k), \
sk and sk^-1 (braid generators on positions k+1, k+2).";

#[derive(Debug, Parser)]
#[command(
    name = "spectral-cosets",
    version,
    about = "Double cosets of SU(2)^n through spectral forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw Haar-random tuples, one JSON record per line.
    Sample(SampleArgs),
    /// Spectral form and sheet of every input tuple.
    Zeta(StreamArgs),
    /// A representative tuple for every input sheeted form.
    Reconstruct(StreamArgs),
    /// Apply a word to every input record (tuple, sheeted form or polygon).
    #[command(after_help = WORD_HELP)]
    Act(ActArgs),
    /// Run a verification suite and print its report.
    Verify(verify::VerifyArgs),
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Tuple length, at least 2.
    #[arg(long)]
    n: usize,
    /// Number of tuples.
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    /// Worker threads; the output does not depend on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StreamArgs {
    /// JSON-lines input; stdin when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ActArgs {
    #[arg(long, allow_hyphen_values = true)]
    word: String,
    /// Resolve closed-form signs from a reconstructed representative instead of the θ rule.
    #[arg(long)]
    oracle_signs: bool,
    #[command(flatten)]
    stream: StreamArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => cmd_sample(&a),
        Command::Zeta(a) => cmd_zeta(&a),
        Command::Reconstruct(a) => cmd_reconstruct(&a),
        Command::Act(a) => cmd_act(&a),
        Command::Verify(a) => verify::cmd_verify(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            e.report();
            e.exit_code()
        }
    }
}

fn cmd_sample(a: &SampleArgs) -> CliResult<ExitCode> {
    if a.n < 2 {
        return Err(CliError::usage(format!("--n {} is too small, need n >= 2", a.n)));
    }
    let mut out = io::output(a.out.as_deref())?;
    let chunks = a.samples.div_ceil(CHUNK);
    let window = a.threads.max(1);
    let pool = io::thread_pool(a.threads)?;
    for first in (0..chunks).step_by(window) {
        let last = (first + window).min(chunks);
        let draw = |k: usize| {
            let mut rng = stream_rng(a.seed, k as u64);
            let count = CHUNK.min(a.samples - k * CHUNK);
            (0..count)
                .map(|_| CosetTuple::random(a.n, &mut rng))
                .collect::<Result<Vec<_>, _>>()
        };
        let batch: Vec<_> = pool.install(|| (first..last).into_par_iter().map(draw).collect());
        for tuples in batch {
            for t in tuples? {
                io::emit(&mut out, &t)?;
            }
        }
    }
    io::finish(out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_zeta(a: &StreamArgs) -> CliResult<ExitCode> {
    let mut out = io::output(a.out.as_deref())?;
    for record in io::records::<CosetTuple>(a.input.as_deref())? {
        let (_, t) = record?;
        io::emit(&mut out, &SheetedForm::of_tuple(&t))?;
    }
    io::finish(out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_reconstruct(a: &StreamArgs) -> CliResult<ExitCode> {
    let mut out = io::output(a.out.as_deref())?;
    for record in io::records::<SheetedForm>(a.input.as_deref())? {
        let (line, sf) = record?;
        let t = reconstruct(&sf).map_err(|e| CliError::from(e).at(line))?;
        io::emit(&mut out, &t)?;
    }
    io::finish(out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_act(a: &ActArgs) -> CliResult<ExitCode> {
    let word: GroupWord = a.word.parse().map_err(|e| CliError::usage(format!("--word: {e}")))?;
    let rule = if a.oracle_signs {
        SignRule::Oracle
    } else {
        SignRule::Theta
    };
    let mut out = io::output(a.stream.out.as_deref())?;
    for record in io::records::<Value>(a.stream.input.as_deref())? {
        let (line, value) = record?;
        let at = |e: CliError| e.at(line);
        let obj = value
            .as_object()
            .ok_or_else(|| CliError::schema(line, "record is not a JSON object"))?;
        if obj.contains_key("vertices") {
            let p: SphericalPolygon = io::decode(line, value)?;
            io::emit(&mut out, &pure_braid_act(&p, &word).map_err(|e| at(e.into()))?)?;
        } else if obj.contains_key("elements") {
            let t: CosetTuple = io::decode(line, value)?;
            io::emit(&mut out, &act_tuple(&t, &word).map_err(|e| at(e.into()))?)?;
        } else if obj.contains_key("upper") {
            let sf: SheetedForm = io::decode(line, value)?;
            io::emit(&mut out, &form_act(&sf, &word, rule).map_err(|e| at(e.into()))?.form)?;
        } else {
            return Err(CliError::schema(line, "expected a tuple, a sheeted form or a polygon"));
        }
    }
    io::finish(out)?;
    Ok(ExitCode::SUCCESS)
}
