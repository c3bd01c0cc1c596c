//! Document-level corpus splits and nested training subsets.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{labelled_sentences, Document, LabelledSentence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, dev: f64, test: f64) -> Result<Self> {
        let r = Self { train, dev, test };
        let parts = [train, dev, test];
        if parts.iter().any(|p| !(0.0..=1.0).contains(p)) || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidRatios(parts.to_vec()));
        }
        Ok(r)
    }

    /// Distributes `n` items by largest-remainder rounding; remainder ties go
    /// to the earlier part (train, then dev).
    pub fn sizes(&self, n: usize) -> [usize; 3] {
        let quotas = [self.train, self.dev, self.test].map(|r| r * n as f64);
        let mut sizes = quotas.map(|q| q.floor() as usize);
        let assigned: usize = sizes.iter().sum();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            let (fa, fb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
            fb.partial_cmp(&fa).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
        });
        for &k in order.iter().take(n.saturating_sub(assigned)) {
            sizes[k] += 1;
        }
        sizes
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.72,
            dev: 0.08,
            test: 0.20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSplit {
    pub train: Vec<Document>,
    pub dev: Vec<Document>,
    pub test: Vec<Document>,
    pub seed: u64,
    pub ratios: SplitRatios,
}

/// Shuffles documents with `seed` and cuts them into train/dev/test.
/// Each part keeps the documents' original relative order.
pub fn split_corpus(docs: &[Document], ratios: SplitRatios, seed: u64) -> Result<CorpusSplit> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut order: Vec<usize> = (0..docs.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let [n_train, n_dev, _] = ratios.sizes(docs.len());
    let pick = |idx: &[usize]| {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| docs[i].clone()).collect::<Vec<_>>()
    };
    Ok(CorpusSplit {
        train: pick(&order[..n_train]),
        dev: pick(&order[n_train..n_train + n_dev]),
        test: pick(&order[n_train + n_dev..]),
        seed,
        ratios,
    })
}

/// Indices (ascending) of the `fraction`% subset of `n` items. Subsets for
/// the same seed are prefixes of one permutation, so they are nested.
pub fn subsample_indices(n: usize, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    if !(fraction > 0.0 && fraction <= 100.0) {
        return Err(Error::InvalidConfig(format!("fraction {fraction} outside (0, 100]")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let k = ((n as f64 * fraction / 100.0) + 1e-9).floor() as usize;
    let mut picked = order[..k.min(n)].to_vec();
    picked.sort_unstable();
    Ok(picked)
}

/// Sentence-level training subset of `split.train`. At 100% this is the full
/// training set in corpus order.
pub fn subsample_train(split: &CorpusSplit, fraction: f64, seed: u64) -> Result<Vec<LabelledSentence>> {
    let all = labelled_sentences(&split.train)?;
    let idx = subsample_indices(all.len(), fraction, seed)?;
    Ok(idx.into_iter().map(|i| all[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(n: usize) -> Vec<Document> {
        (0..n).map(|i| Document::new(format!("d{i:03}"), format!("texto {i}."))).collect()
    }

    #[test]
    fn exact_ratios_on_round_counts() {
        let s = split_corpus(&docs(100), SplitRatios::default(), 13).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (72, 8, 20));
    }

    #[test]
    fn deterministic_and_disjoint() {
        let d = docs(57);
        let a = split_corpus(&d, SplitRatios::default(), 13).unwrap();
        let b = split_corpus(&d, SplitRatios::default(), 13).unwrap();
        assert_eq!(a, b);
        let mut ids: Vec<&str> = a.train.iter().chain(&a.dev).chain(&a.test).map(|d| d.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 57);
        let c = split_corpus(&d, SplitRatios::default(), 14).unwrap();
        assert_ne!(a.train, c.train);
    }

    #[test]
    fn largest_remainder_on_five_docs() {
        // Quotas 3.6 / 0.4 / 1.0: floors 3/0/1, the spare goes to train.
        assert_eq!(SplitRatios::default().sizes(5), [4, 0, 1]);
        let s = split_corpus(&docs(5), SplitRatios::default(), 1).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (4, 0, 1));
    }

    #[test]
    fn empty_corpus_and_bad_ratios() {
        assert!(matches!(split_corpus(&[], SplitRatios::default(), 0), Err(Error::EmptyCorpus)));
        assert!(SplitRatios::new(0.5, 0.5, 0.1).is_err());
        assert!(SplitRatios::new(0.7, 0.1, 0.2).is_ok());
    }

    #[test]
    fn one_percent_of_train_set() {
        assert_eq!(subsample_indices(23_079, 1.0, 5).unwrap().len(), 230);
        assert_eq!(subsample_indices(23_079, 100.0, 5).unwrap(), (0..23_079).collect::<Vec<_>>());
        assert!(subsample_indices(10, 0.0, 5).is_err());
        assert!(subsample_indices(10, 101.0, 5).is_err());
    }

    #[test]
    fn subsets_are_nested() {
        for seed in 0..5 {
            let small = subsample_indices(1000, 1.0, seed).unwrap();
            let big = subsample_indices(1000, 5.0, seed).unwrap();
            assert!(small.iter().all(|i| big.binary_search(i).is_ok()));
        }
    }
}
