pub mod anonymise;
pub mod corpus;
pub mod cli;
pub mod crf;
pub mod eval;
pub mod error;
pub mod rules;
pub mod synth;
pub mod tagger;

pub use error::{Error, Result};
pub use tagger::Tagger;
