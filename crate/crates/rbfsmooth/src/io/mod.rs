//! Text file formats: delimited data tables, model files, study reports and
//! the grid flag syntax.

mod grid;
mod model_file;
mod report;
mod table;

pub use grid::{parse_grid, parse_region};
pub use model_file::{load_model, model_from_str, model_to_string, save_model, MODEL_VERSION};
pub use report::{density_csv, search_csv, study_csv};
pub use table::{parse_table, read_csv, read_points, DataTable, Delimiter, ReadOptions};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}, line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] rbfsmooth_core::Error),
}

impl Error {
    /// True unless the failure was numerical (solve, constraint or search).
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Core(e) => e.is_input_error(),
            _ => true,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
