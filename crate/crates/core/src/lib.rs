pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod labeling;
pub mod models;
pub mod pipeline;
pub mod readability;
pub mod synth;

pub use error::{Error, Result};
