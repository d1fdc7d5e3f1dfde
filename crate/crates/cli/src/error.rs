use serde::Serialize;
use spectral_cosets::actions::ActionError;
use spectral_cosets::coset::CosetError;
use spectral_cosets::haar::HaarError;
use spectral_cosets::json::JsonLineError;
use spectral_cosets::polygon::PolygonError;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Usage,
    Schema,
    Degenerate,
    Io,
}

/// Printed to stderr as one JSON object.
#[derive(Debug, Serialize)]
pub struct CliError {
    pub error: Kind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    fn new(error: Kind, message: impl Into<String>) -> Self {
        Self {
            error,
            line: None,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(Kind::Usage, message)
    }

    pub fn schema(line: usize, message: impl Into<String>) -> Self {
        Self::new(Kind::Schema, message).at(line)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(Kind::Io, message)
    }

    pub fn at(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }

    pub fn exit_code(&self) -> ExitCode {
        match self.error {
            Kind::Usage | Kind::Schema | Kind::Io => ExitCode::from(2),
            Kind::Degenerate => ExitCode::from(3),
        }
    }

    pub fn report(&self) {
        eprintln!(
            "{}",
            serde_json::to_string(self).unwrap_or_else(|_| self.message.clone())
        );
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<JsonLineError> for CliError {
    fn from(e: JsonLineError) -> Self {
        match e {
            JsonLineError::Schema { line, message } => Self::schema(line, message),
            JsonLineError::Io { line, source } => Self::io(source.to_string()).at(line),
        }
    }
}

impl From<CosetError> for CliError {
    fn from(e: CosetError) -> Self {
        use CosetError::*;
        let kind = match e {
            TooShort { .. }
            | DimensionMismatch(_)
            | NotUnit { .. }
            | NotCanonical(_)
            | InvalidForm(_)
            | SheetMismatch { .. }
            | MissingEntry { .. } => Kind::Schema,
            _ => Kind::Degenerate,
        };
        Self::new(kind, e.to_string())
    }
}

impl From<ActionError> for CliError {
    fn from(e: ActionError) -> Self {
        match e {
            ActionError::Parse { .. } | ActionError::Index(_) => Self::usage(e.to_string()),
            ActionError::NegativeDiscriminant { .. } => Self::new(Kind::Degenerate, e.to_string()),
            ActionError::Coset(c) => c.into(),
        }
    }
}

impl From<HaarError> for CliError {
    fn from(e: HaarError) -> Self {
        match e {
            HaarError::NotInDomain { .. } => Self::new(Kind::Degenerate, e.to_string()),
            HaarError::Coset(c) => c.into(),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<PolygonError> for CliError {
    fn from(e: PolygonError) -> Self {
        match e {
            PolygonError::Unsamplable { .. } => Self::new(Kind::Degenerate, e.to_string()),
            PolygonError::Action(a) => a.into(),
            PolygonError::NotPure(_) => Self::usage(e.to_string()),
            _ => Self::new(Kind::Schema, e.to_string()),
        }
    }
}
