//! File formats, dataset loading, experiment sweeps and the command-line
//! front end around [`sparsenet_core`].

pub mod checkpoint;
pub mod cli;
pub mod dataset_io;
pub mod error;
pub mod pattern_io;
pub mod plot;
pub mod report;
pub mod sweep;
mod textfile;

pub use error::{Error, Result};
pub use sparsenet_core as core;
