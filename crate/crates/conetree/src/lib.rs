//! File formats, configuration, the end-to-end pipeline and the command
//! line around `conetree-core`.

pub mod config;
pub mod error;
pub mod formats;
pub mod generate;
pub mod pipeline;
pub mod verify;

pub use config::PipelineConfig;
pub use error::{Error, Result, Stage};
pub use generate::Generator;
pub use pipeline::{run_pipeline, Bundle, QiReport, Run};
