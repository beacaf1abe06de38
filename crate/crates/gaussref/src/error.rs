use std::path::{Path, PathBuf};

use gaussref_core::camera::CameraError;
use gaussref_core::mesh::MeshError;
use gaussref_core::solver::{PipelineError, SolverError};
use gaussref_core::synth::SynthError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}:{line}: face index {index} out of range (1..={count})", path.display())]
    FaceIndex {
        path: PathBuf,
        line: usize,
        index: i64,
        count: usize,
    },
    #[error("{}: {source}", path.display())]
    Mesh {
        path: PathBuf,
        #[source]
        source: MeshError,
    },
    #[error("{}: camera {id}: {source}", path.display())]
    Camera {
        path: PathBuf,
        id: String,
        #[source]
        source: CameraError,
    },
    #[error("{}: truncated or empty image file", path.display())]
    Truncated { path: PathBuf },
    #[error("{}: unsupported image format", path.display())]
    UnsupportedImage { path: PathBuf },
    #[error("{}: {message}", path.display())]
    Image { path: PathBuf, message: String },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("{0}")]
    Check(String),
}

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    /// Process exit status: 2 for numerical failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Pipeline(PipelineError::Solver(
                SolverError::NonFiniteEnergy { .. } | SolverError::NonFiniteGradient { .. },
            ))
            | Error::Check(_) => 2,
            _ => 1,
        }
    }
}
