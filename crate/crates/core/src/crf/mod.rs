//! Linear-chain CRF tagger.

mod features;
mod inference;
mod io;
pub mod owlqn;
mod train;

pub use features::{extract_features, FeatureVector};
pub use inference::{forward_backward, sequence_score, viterbi, ForwardBackward};
pub use io::{from_bytes, load_model, save_model, to_bytes, FORMAT_VERSION};
pub use train::{fit_crf, TrainingStats};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{BioLabel, LabelSet, LabelledSentence, Sentence};
use crate::error::{Error, Result};
use crate::tagger::Tagger;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrfConfig {
    pub max_iterations: usize,
    pub c1: f64,
    pub c2: f64,
    pub all_transitions: bool,
    pub window: Vec<i32>,
    pub convergence_tol: f64,
}

impl Default for CrfConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            c1: 0.1,
            c2: 0.1,
            all_transitions: true,
            window: vec![-1, 0, 1],
            convergence_tol: 1e-5,
        }
    }
}

impl CrfConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return Err(Error::InvalidConfig(format!("c1 = {}, c2 = {} must be non-negative", self.c1, self.c2)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if self.window.is_empty() {
            return Err(Error::InvalidConfig("feature window is empty".into()));
        }
        Ok(())
    }
}

/// Feature names with dense ids, frozen once training starts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureAlphabet {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl FeatureAlphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

impl<S: AsRef<str>> FromIterator<S> for FeatureAlphabet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut a = FeatureAlphabet::new();
        for n in iter {
            a.intern(n.as_ref());
        }
        a
    }
}

/// One sentence with features resolved to ids.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub feats: Vec<Vec<(u32, f64)>>,
    pub labels: Vec<usize>,
}

/// Trained model. Parameters are laid out as `F × L` state weights
/// followed by the `L × L` transition block.
#[derive(Debug, Clone, PartialEq)]
pub struct CrfModel {
    labels: LabelSet,
    features: FeatureAlphabet,
    weights: Vec<f64>,
    config: CrfConfig,
}

impl CrfModel {
    /// A zero-weight model over the given alphabets.
    pub fn new(labels: LabelSet, features: FeatureAlphabet, config: CrfConfig) -> Self {
        let l = labels.num_labels();
        let weights = vec![0.0; features.len() * l + l * l];
        Self {
            labels,
            features,
            weights,
            config,
        }
    }

    /// Builds the feature alphabet from the training sentences.
    pub fn from_training(labels: LabelSet, train: &[LabelledSentence], config: CrfConfig) -> Result<Self> {
        let mut alphabet = FeatureAlphabet::new();
        for ls in train {
            for i in 0..ls.sentence.len() {
                for (name, _) in extract_features(&ls.sentence, i, &config.window)?.iter() {
                    alphabet.intern(name);
                }
            }
        }
        Ok(Self::new(labels, alphabet, config))
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn features(&self) -> &FeatureAlphabet {
        &self.features
    }

    pub fn config(&self) -> &CrfConfig {
        &self.config
    }

    pub fn num_labels(&self) -> usize {
        self.labels.num_labels()
    }

    pub fn num_parameters(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<()> {
        if weights.len() != self.weights.len() {
            return Err(Error::InvalidConfig(format!(
                "expected {} weights, got {}",
                self.weights.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::NumericalOverflow(format!("non-finite weight {w}")));
        }
        self.weights = weights;
        Ok(())
    }

    fn transition_offset(&self) -> usize {
        self.features.len() * self.num_labels()
    }

    pub fn state_weight(&self, feature: u32, label: usize) -> f64 {
        self.weights[feature as usize * self.num_labels() + label]
    }

    pub fn transition(&self, prev: usize, cur: usize) -> f64 {
        self.weights[self.transition_offset() + prev * self.num_labels() + cur]
    }

    pub fn set_transition(&mut self, prev: usize, cur: usize, w: f64) {
        let off = self.transition_offset() + prev * self.num_labels() + cur;
        self.weights[off] = w;
    }

    pub fn transitions(&self) -> &[f64] {
        &self.weights[self.transition_offset()..]
    }

    /// Features of every token, with names outside the alphabet dropped.
    pub(crate) fn compile_sentence(&self, sentence: &Sentence) -> Result<Vec<Vec<(u32, f64)>>> {
        (0..sentence.len())
            .map(|i| {
                let fv = extract_features(sentence, i, &self.config.window)?;
                Ok(fv.iter().filter_map(|(n, v)| Some((self.features.get(n)?, v))).collect())
            })
            .collect()
    }

    pub(crate) fn compile(&self, batch: &[LabelledSentence]) -> Result<Vec<Compiled>> {
        batch
            .iter()
            .map(|ls| {
                if ls.labels.len() != ls.sentence.len() {
                    return Err(Error::LengthMismatch {
                        gold: ls.labels.len(),
                        pred: ls.sentence.len(),
                    });
                }
                let labels = ls
                    .labels
                    .iter()
                    .map(|l| self.labels.label_id(l).ok_or_else(|| Error::UnknownLabel(l.to_string())))
                    .collect::<Result<_>>()?;
                Ok(Compiled {
                    feats: self.compile_sentence(&ls.sentence)?,
                    labels,
                })
            })
            .collect()
    }

    pub(crate) fn emissions(weights: &[f64], l: usize, feats: &[Vec<(u32, f64)>]) -> Vec<f64> {
        let mut e = vec![0.0; feats.len() * l];
        for (t, fs) in feats.iter().enumerate() {
            let row = &mut e[t * l..(t + 1) * l];
            for &(f, v) in fs {
                let w = &weights[f as usize * l..(f as usize + 1) * l];
                row.iter_mut().zip(w).for_each(|(r, w)| *r += v * w);
            }
        }
        e
    }

    /// `T × L` state scores for a sentence.
    pub fn emission_scores(&self, sentence: &Sentence) -> Result<Vec<f64>> {
        Ok(Self::emissions(&self.weights, self.num_labels(), &self.compile_sentence(sentence)?))
    }

    /// Negative conditional log-likelihood of `batch` plus `c2 |w|^2`, and
    /// its gradient.
    pub fn log_likelihood_and_gradient(&self, batch: &[LabelledSentence]) -> Result<(f64, Vec<f64>)> {
        let data = self.compile(batch)?;
        let mut grad = vec![0.0; self.weights.len()];
        let f = train::objective(&self.weights, &data, self.num_labels(), self.config.c2, &mut grad)?;
        Ok((f, grad))
    }

    pub fn viterbi(&self, sentence: &Sentence) -> Vec<BioLabel> {
        let e = self.emission_scores(sentence).expect("indices are in range");
        viterbi(&e, self.transitions(), self.num_labels())
            .into_iter()
            .map(|id| self.labels.label(id).expect("label id from alphabet"))
            .collect()
    }

    /// Per-token label marginals, `T × L`.
    pub fn marginals(&self, sentence: &Sentence) -> Result<Vec<f64>> {
        let e = self.emission_scores(sentence)?;
        Ok(forward_backward(&e, self.transitions(), self.num_labels())?.marginals)
    }
}

impl Tagger for CrfModel {
    fn name(&self) -> &str {
        "crf"
    }

    fn tag(&self, sentence: &Sentence) -> Vec<BioLabel> {
        self.viterbi(sentence)
    }
}
