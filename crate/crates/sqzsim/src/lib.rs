//! File formats, IO and the command-line front-end on top of `sqzsim-core`.

pub mod cli;
pub mod format;
pub mod report;
pub mod simulate;
pub mod trace_csv;

use std::path::PathBuf;

pub use sqzsim_core as core;

/// Exit codes of the `sqzsim` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const DOMAIN: i32 = 2;
    pub const IO: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Netlist error; `source_name` is the file it came from, if known.
    #[error("{source_name}:{error}")]
    Parse {
        source_name: String,
        error: sqzsim_core::netlist::ParseError,
    },
    #[error("{0}")]
    Model(#[from] sqzsim_core::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl From<sqzsim_core::netlist::ParseError> for AppError {
    fn from(error: sqzsim_core::netlist::ParseError) -> Self {
        AppError::Parse {
            source_name: "<input>".into(),
            error,
        }
    }
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    /// Attaches a file name to a netlist error.
    pub fn in_file(self, path: &std::path::Path) -> Self {
        match self {
            AppError::Parse { error, .. } => AppError::Parse {
                source_name: path.display().to_string(),
                error,
            },
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Io { .. } => exit::IO,
            AppError::Csv(e) if e.is_io_error() => exit::IO,
            _ => exit::DOMAIN,
        }
    }
}
