use crate::corpus::{BioLabel, Sentence};

/// Anything that labels a tokenized sentence.
pub trait Tagger: Send + Sync {
    fn name(&self) -> &str;

    fn tag(&self, sentence: &Sentence) -> Vec<BioLabel>;
}
