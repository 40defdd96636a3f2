//! Dataset model, JSONL interchange and synthetic data.

mod jsonl;
mod model;
mod synth;

pub use jsonl::{frame_to_line, read_dataset, read_from, write_dataset, write_to};
pub use model::{Dataset, DatasetMeta, Echo, Frame, Label, LabelKind, Point, PointDims};
pub use synth::{generate_synthetic, SynthConfig, SynthLabel};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
