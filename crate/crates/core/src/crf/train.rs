use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::owlqn::{self, OwlqnParams, StopReason};
use super::{forward_backward, Compiled, CrfConfig, CrfModel};
use crate::corpus::{LabelSet, LabelledSentence};
use crate::error::{Error, Result};

/// Gradient work is split into this many contiguous sentence chunks and
/// summed in chunk order, so results do not depend on the thread count.
const CHUNKS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingStats {
    pub iterations: usize,
    /// Penalised objective (NLL + c2 |w|^2 + c1 |w|_1) at the start and
    /// after every accepted step.
    pub objective_history: Vec<f64>,
    pub gradient_norm: f64,
    pub wall_time_secs: f64,
    pub converged: bool,
    pub num_features: usize,
    pub num_labels: usize,
    /// Token accuracy on the development set, if one was given.
    pub dev_token_accuracy: Option<f64>,
}

fn sentence_nll(weights: &[f64], l: usize, trans_off: usize, s: &Compiled, grad: &mut [f64]) -> Result<f64> {
    let t_len = s.labels.len();
    if t_len == 0 {
        return Ok(0.0);
    }
    let transitions = &weights[trans_off..];
    let e = CrfModel::emissions(weights, l, &s.feats);
    let fb = forward_backward(&e, transitions, l)?;
    let gold = super::sequence_score(&e, transitions, l, &s.labels);

    for (t, fs) in s.feats.iter().enumerate() {
        let p = &fb.marginals[t * l..(t + 1) * l];
        for &(f, v) in fs {
            let g = &mut grad[f as usize * l..(f as usize + 1) * l];
            g.iter_mut().zip(p).for_each(|(g, p)| *g += v * p);
            g[s.labels[t]] -= v;
        }
    }
    let tg = &mut grad[trans_off..];
    for t in 1..t_len {
        let pm = &fb.pair_marginals[(t - 1) * l * l..t * l * l];
        tg.iter_mut().zip(pm).for_each(|(g, p)| *g += p);
        tg[s.labels[t - 1] * l + s.labels[t]] -= 1.0;
    }
    Ok(fb.log_z - gold)
}

/// NLL over `data` plus `c2 |w|^2`; writes the gradient into `grad`.
pub(crate) fn objective(weights: &[f64], data: &[Compiled], l: usize, c2: f64, grad: &mut [f64]) -> Result<f64> {
    let trans_off = weights.len() - l * l;
    let chunk = data.len().div_ceil(CHUNKS).max(1);
    let partials: Vec<Result<(f64, Vec<f64>)>> = data
        .par_chunks(chunk)
        .map(|part| {
            let mut g = vec![0.0; weights.len()];
            let mut f = 0.0;
            for s in part {
                f += sentence_nll(weights, l, trans_off, s, &mut g)?;
            }
            Ok((f, g))
        })
        .collect();
    grad.iter_mut().for_each(|g| *g = 0.0);
    let mut total = 0.0;
    for p in partials {
        let (f, g) = p?;
        total += f;
        grad.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
    }
    let mut sq = 0.0;
    for (g, w) in grad.iter_mut().zip(weights) {
        sq += w * w;
        *g += 2.0 * c2 * w;
    }
    Ok(total + c2 * sq)
}

/// Label pairs observed in the training data, as a mask over the
/// transition block.
fn observed_transitions(data: &[Compiled], l: usize) -> Vec<bool> {
    let mut seen = vec![false; l * l];
    for s in data {
        for w in s.labels.windows(2) {
            seen[w[0] * l + w[1]] = true;
        }
    }
    seen
}

/// Trains a CRF on `train` by penalised maximum likelihood. `dev` is only
/// used to report token accuracy.
pub fn fit_crf(
    train: &[LabelledSentence],
    dev: &[LabelledSentence],
    labels: &LabelSet,
    config: &CrfConfig,
) -> Result<(CrfModel, TrainingStats)> {
    config.validate()?;
    if train.iter().all(|s| s.sentence.is_empty()) {
        return Err(Error::EmptyTrainingSet);
    }
    let started = Instant::now();
    let mut model = CrfModel::from_training(labels.clone(), train, config.clone())?;
    let data = model.compile(train)?;
    let l = model.num_labels();
    let trans_off = model.transition_offset();
    let mask = (!config.all_transitions).then(|| observed_transitions(&data, l));
    log::info!(
        "training CRF: {} sentences, {} features, {} labels, {} parameters",
        data.len(),
        model.features.len(),
        l,
        model.num_parameters()
    );

    let params = OwlqnParams {
        c1: config.c1,
        max_iterations: config.max_iterations,
        tolerance: config.convergence_tol,
        ..OwlqnParams::default()
    };
    let result = owlqn::minimize(vec![0.0; model.num_parameters()], &params, |w, g| {
        let f = objective(w, &data, l, config.c2, g)?;
        if let Some(mask) = &mask {
            for (g, &keep) in g[trans_off..].iter_mut().zip(mask) {
                if !keep {
                    *g = 0.0;
                }
            }
        }
        Ok(f)
    })?;
    log::info!(
        "CRF stopped after {} iterations ({:?}), objective {:.4}",
        result.iterations,
        result.stop,
        result.objective
    );
    model.set_weights(result.x)?;

    let dev_token_accuracy = (!dev.is_empty()).then(|| {
        let (mut hit, mut total) = (0usize, 0usize);
        for ls in dev {
            let pred = model.viterbi(&ls.sentence);
            hit += pred.iter().zip(&ls.labels).filter(|(a, b)| a == b).count();
            total += ls.labels.len();
        }
        hit as f64 / total.max(1) as f64
    });
    let stats = TrainingStats {
        iterations: result.iterations,
        objective_history: result.history,
        gradient_norm: result.gradient_norm,
        wall_time_secs: started.elapsed().as_secs_f64(),
        converged: result.stop == StopReason::Converged,
        num_features: model.features.len(),
        num_labels: l,
        dev_token_accuracy,
    };
    Ok((model, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{BioLabel, Sentence};

    fn ls(words: &[&str], labels: &[&str]) -> LabelledSentence {
        LabelledSentence {
            sentence: Sentence::from_words(words),
            labels: labels.iter().map(|l| l.parse().unwrap()).collect(),
        }
    }

    fn toy() -> Vec<LabelledSentence> {
        vec![
            ls(&["Ingreso", "el", "12/01/2016", "."], &["O", "O", "B-Date", "O"]),
            ls(&["Alta", "el", "3/2/2017"], &["O", "O", "B-Date"]),
            ls(&["Paciente", "de", "64", "años"], &["O", "O", "B-Age", "I-Age"]),
            ls(&["Mujer", "de", "30", "años", "."], &["O", "O", "B-Age", "I-Age", "O"]),
        ]
    }

    #[test]
    fn learns_toy_data() {
        let labels = LabelSet::new(["Date", "Age"]);
        let cfg = CrfConfig { c1: 0.0, c2: 0.01, ..Default::default() };
        let (m, stats) = fit_crf(&toy(), &[], &labels, &cfg).unwrap();
        assert!(stats.objective_history.windows(2).all(|w| w[1] <= w[0]));
        for s in toy() {
            assert_eq!(m.viterbi(&s.sentence), s.labels);
        }
    }

    #[test]
    fn duplicated_sentence_doubles_contribution() {
        let labels = LabelSet::new(["Date", "Age"]);
        let cfg = CrfConfig { c2: 0.0, ..Default::default() };
        let (m, _) = fit_crf(&toy(), &[], &labels, &CrfConfig { max_iterations: 3, ..cfg.clone() }).unwrap();
        let one = &toy()[..1];
        let two = [one[0].clone(), one[0].clone()];
        let mut m0 = m.clone();
        m0.config.c2 = 0.0;
        let (f1, _) = m0.log_likelihood_and_gradient(one).unwrap();
        let (f2, _) = m0.log_likelihood_and_gradient(&two).unwrap();
        assert!((f2 - 2.0 * f1).abs() < 1e-9 * f2.abs().max(1.0));
    }

    #[test]
    fn extreme_regularisation_zeroes_weights() {
        let labels = LabelSet::new(["Date", "Age"]);
        let cfg = CrfConfig { c1: 1e6, c2: 1e6, ..Default::default() };
        let (m, _) = fit_crf(&toy(), &[], &labels, &cfg).unwrap();
        assert!(m.weights().iter().all(|w| w.abs() < 1e-6));
        for s in toy() {
            assert!(m.viterbi(&s.sentence).iter().all(|l| *l == BioLabel::O));
        }
    }

    #[test]
    fn training_is_deterministic() {
        let labels = LabelSet::new(["Date", "Age"]);
        let cfg = CrfConfig { max_iterations: 20, ..Default::default() };
        let (a, _) = fit_crf(&toy(), &[], &labels, &cfg).unwrap();
        let (b, _) = fit_crf(&toy(), &[], &labels, &cfg).unwrap();
        assert_eq!(a.weights(), b.weights());
    }

    #[test]
    fn unseen_transitions_stay_zero_without_all_transitions() {
        let labels = LabelSet::new(["Date", "Age"]);
        let cfg = CrfConfig { all_transitions: false, max_iterations: 20, ..Default::default() };
        let (m, _) = fit_crf(&toy(), &[], &labels, &cfg).unwrap();
        let b_date = labels.label_id(&"B-Date".parse().unwrap()).unwrap();
        let b_age = labels.label_id(&"B-Age".parse().unwrap()).unwrap();
        assert_eq!(m.transition(b_date, b_age), 0.0);
    }

    #[test]
    fn empty_training_set() {
        let labels = LabelSet::nubes();
        assert!(matches!(fit_crf(&[], &[], &labels, &CrfConfig::default()), Err(Error::EmptyTrainingSet)));
    }
}
