//! JSON-lines encoding with fixed 17-significant-digit floats.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::ser::Formatter;
use std::io::{self, BufRead, Write};
use thiserror::Error;

/// Writes every finite float as `d.dddddddddddddddde±x` (17 significant digits).
#[derive(Debug, Clone, Copy, Default)]
pub struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

#[derive(Debug, Error)]
pub enum JsonLineError {
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("line {line}: {source}")]
    Io { line: usize, source: io::Error },
}

impl JsonLineError {
    pub fn line(&self) -> usize {
        match self {
            Self::Schema { line, .. } | Self::Io { line, .. } => *line,
        }
    }
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value
        .serialize(&mut ser)
        .expect("serialization into memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits utf-8")
}

/// Writes `value` followed by a newline.
pub fn write_line<W: Write, T: Serialize + ?Sized>(writer: &mut W, value: &T) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut *writer, SeventeenDigits);
    value.serialize(&mut ser).map_err(io::Error::other)?;
    writer.write_all(b"\n")
}

pub fn from_str<T: DeserializeOwned>(s: &str) -> Result<T, serde_json::Error> {
    serde_json::from_str(s)
}

/// Iterates over the records of a JSON-lines stream. Blank lines are skipped; line numbers
/// are 1-based.
pub struct JsonLines<R, T> {
    reader: R,
    line: usize,
    buf: String,
    _record: std::marker::PhantomData<fn() -> T>,
}

impl<R: BufRead, T: DeserializeOwned> JsonLines<R, T> {
    pub fn new(reader: R) -> Self {
        Self {
            reader,
            line: 0,
            buf: String::new(),
            _record: std::marker::PhantomData,
        }
    }
}

impl<R: BufRead, T: DeserializeOwned> Iterator for JsonLines<R, T> {
    type Item = Result<(usize, T), JsonLineError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            self.line += 1;
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(source) => {
                    return Some(Err(JsonLineError::Io {
                        line: self.line,
                        source,
                    }))
                }
            }
            let text = self.buf.trim();
            if text.is_empty() {
                continue;
            }
            return Some(
                serde_json::from_str(text)
                    .map(|v| (self.line, v))
                    .map_err(|e| JsonLineError::Schema {
                        line: self.line,
                        message: e.to_string(),
                    }),
            );
        }
    }
}
