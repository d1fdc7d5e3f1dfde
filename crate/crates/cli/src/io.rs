use crate::error::{CliError, CliResult};
use serde::de::DeserializeOwned;
use serde::Serialize;
use spectral_cosets::json::{write_line, JsonLines};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub type Output = BufWriter<Box<dyn Write>>;

pub fn output(path: Option<&Path>) -> CliResult<Output> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    Ok(BufWriter::new(sink))
}

pub fn records<T: DeserializeOwned>(path: Option<&Path>) -> CliResult<JsonLines<Box<dyn BufRead>, T>> {
    let source: Box<dyn BufRead> = match path {
        Some(p) => Box::new(BufReader::new(
            File::open(p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    Ok(JsonLines::new(source))
}

pub fn decode<T: DeserializeOwned>(line: usize, value: serde_json::Value) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| CliError::schema(line, e.to_string()))
}

pub fn emit<T: Serialize + ?Sized>(out: &mut Output, value: &T) -> CliResult<()> {
    Ok(write_line(out, value)?)
}

pub fn finish(mut out: Output) -> CliResult<()> {
    Ok(out.flush()?)
}

pub fn thread_pool(threads: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(format!("--threads {threads}: {e}")))
}
