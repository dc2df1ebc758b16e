//! OpenQASM 2.0 frontend: a practical subset parsed into [`CircuitIR`], and
//! the inverse emitter.
//!
//! Supported statements are `qreg`/`creg` declarations, `include
//! "qelib1.inc"` (built in, never read from disk), `gate` macro definitions
//! (expanded at the call site), `barrier`, `measure` and applications of
//! `u1 u2 u3 rz sx x h t tdg s sdg cx` plus `U`/`CX`. `ccx` and `swap` are
//! decomposed while parsing. Everything else is rejected with a positioned
//! [`Diagnostic`].

mod emit;
pub mod expr;
mod lexer;
mod parser;

use std::fmt;
use std::path::Path;

pub use emit::emit_qasm;
pub use parser::{ccx_decomposition, parse_qasm};

use crate::circuit::CircuitIR;

/// Program text plus where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceProgram {
    pub text: String,
    pub origin: String,
}

impl SourceProgram {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> SourceProgram {
        SourceProgram {
            text: text.into(),
            origin: origin.into(),
        }
    }

    pub fn from_file(path: &Path) -> std::io::Result<SourceProgram> {
        let text = std::fs::read_to_string(path)?;
        Ok(SourceProgram::new(text, path.display().to_string()))
    }

    /// Circuit name derived from the origin: the file stem for paths.
    pub fn name(&self) -> String {
        Path::new(&self.origin)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.origin.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A positioned message. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, line: usize, column: usize) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            line: line.max(1),
            column: column.max(1),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `path:line:col: severity: message`
    pub fn render(&self, path: &str) -> String {
        format!(
            "{path}:{}:{}: {}: {}",
            self.line, self.column, self.severity, self.message
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.line, self.column, self.severity, self.message
        )
    }
}

/// Convenience wrapper for inline sources.
pub fn parse_str(text: &str, origin: &str) -> Result<CircuitIR, Vec<Diagnostic>> {
    parse_qasm(&SourceProgram::new(text, origin))
}
