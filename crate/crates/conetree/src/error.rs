use std::fmt;

/// Pipeline stages, named in errors and in the run log.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Config,
    Generate,
    Base,
    Separate,
    Verify,
    Grid,
    Trees,
    Embed,
    Radial,
    Fit,
    Load,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Generate => "generate",
            Stage::Base => "build_base",
            Stage::Separate => "separate",
            Stage::Verify => "verify_char_seq",
            Stage::Grid => "build_grid",
            Stage::Trees => "build_tree",
            Stage::Embed => "embed_grid",
            Stage::Radial => "radial_check",
            Stage::Fit => "fit_qi",
            Stage::Load => "load",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("[{stage}] {source}")]
    Core {
        stage: Stage,
        #[source]
        source: conetree_core::Error,
    },
    /// A stage's input or output failed a re-check.
    #[error("[{stage}] check failed: {message}")]
    Check { stage: Stage, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Core { stage, .. } | Error::Check { stage, .. } => Some(*stage),
            Error::Config(_) => Some(Stage::Config),
            _ => None,
        }
    }

    pub(crate) fn check(stage: Stage, message: impl Into<String>) -> Self {
        Error::Check {
            stage,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Tags core errors with the stage they came from.
pub(crate) trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T>;
}

impl<T> AtStage<T> for conetree_core::Result<T> {
    fn at(self, stage: Stage) -> Result<T> {
        self.map_err(|source| Error::Core { stage, source })
    }
}
