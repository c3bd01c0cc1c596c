use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{evaluate_tagger, Metrics, Scenario};
use crate::corpus::{labelled_sentences, subsample_train, CorpusSplit, LabelSet, LabelledSentence};
use crate::crf::{fit_crf, CrfConfig};
use crate::error::{Error, Result};
use crate::rules::{MatchOptions, RuleSet};
use crate::tagger::Tagger;

/// Training-set percentages used when none are given.
pub const DEFAULT_FRACTIONS: [f64; 8] = [1.0, 5.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0];

/// A tagger that can be rebuilt from a training subset.
pub trait TrainableSystem: Sync {
    fn name(&self) -> &str;
    fn train(&self, train: &[LabelledSentence], dev: &[LabelledSentence]) -> Result<Box<dyn Tagger>>;
}

pub struct CrfSystem {
    pub labels: LabelSet,
    pub config: CrfConfig,
}

impl TrainableSystem for CrfSystem {
    fn name(&self) -> &str {
        "crf"
    }

    fn train(&self, train: &[LabelledSentence], dev: &[LabelledSentence]) -> Result<Box<dyn Tagger>> {
        let (model, _) = fit_crf(train, dev, &self.labels, &self.config)?;
        Ok(Box::new(model))
    }
}

/// Default patterns and name list; gazetteers compiled from the subset.
#[derive(Default)]
pub struct RuleSystem {
    pub options: MatchOptions,
}

impl TrainableSystem for RuleSystem {
    fn name(&self) -> &str {
        "rules"
    }

    fn train(&self, train: &[LabelledSentence], _dev: &[LabelledSentence]) -> Result<Box<dyn Tagger>> {
        Ok(Box::new(RuleSet::compile_from_sentences(train).with_options(self.options)))
    }
}

/// SHA-256 over the `(document, sentence index)` identities of a subset.
pub fn subset_hash(sentences: &[LabelledSentence]) -> String {
    let mut h = Sha256::new();
    for s in sentences {
        h.update(s.sentence.doc_id.as_bytes());
        h.update(b"\t");
        h.update(s.sentence.index.to_string().as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationEntry {
    pub system: String,
    pub fraction: f64,
    pub train_sentences: usize,
    pub subset_hash: String,
    pub metrics: Vec<Metrics>,
}

impl AblationEntry {
    pub fn metric(&self, scenario: Scenario) -> Option<&Metrics> {
        self.metrics.iter().find(|m| m.scenario == scenario)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub seed: u64,
    pub fractions: Vec<f64>,
    pub entries: Vec<AblationEntry>,
}

impl AblationReport {
    pub fn entry(&self, system: &str, fraction: f64) -> Option<&AblationEntry> {
        self.entries.iter().find(|e| e.system == system && e.fraction == fraction)
    }

    /// F1 per fraction for one system and scenario, in fraction order.
    pub fn curve(&self, system: &str, scenario: Scenario) -> Vec<(f64, f64)> {
        self.entries
            .iter()
            .filter(|e| e.system == system)
            .filter_map(|e| Some((e.fraction, e.metric(scenario)?.f1)))
            .collect()
    }

    /// `system,fraction,scenario,precision,recall,f1,tp,fp,fn`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("system,fraction,scenario,precision,recall,f1,tp,fp,fn\n");
        for e in &self.entries {
            for m in &e.metrics {
                out.push_str(&format!(
                    "{},{},{},{:.6},{:.6},{:.6},{},{},{}\n",
                    e.system, e.fraction, m.scenario, m.precision, m.recall, m.f1, m.tp, m.fp, m.fn_
                ));
            }
        }
        out
    }

    /// `system,scenario,fraction,f1,delta_f1`, where the delta is taken
    /// against the largest fraction run (100% when present).
    pub fn deltas_csv(&self) -> String {
        let mut out = String::from("system,scenario,fraction,f1,delta_f1\n");
        let mut systems: Vec<&str> = Vec::new();
        for e in &self.entries {
            if !systems.contains(&e.system.as_str()) {
                systems.push(&e.system);
            }
        }
        for system in systems {
            for scenario in Scenario::ALL {
                let curve = self.curve(system, scenario);
                let Some(&(_, reference)) = curve.iter().max_by(|a, b| a.0.total_cmp(&b.0)) else {
                    continue;
                };
                for (fraction, f1) in curve {
                    out.push_str(&format!("{system},{scenario},{fraction},{f1:.6},{:.6}\n", f1 - reference));
                }
            }
        }
        out
    }
}

/// Retrains every system on nested training subsets and scores each on
/// the test split. All systems see the same subsets.
pub fn ablation_run(
    systems: &[&dyn TrainableSystem],
    split: &CorpusSplit,
    fractions: &[f64],
    seed: u64,
) -> Result<AblationReport> {
    let mut fractions = fractions.to_vec();
    fractions.sort_by(f64::total_cmp);
    fractions.dedup();
    let dev = labelled_sentences(&split.dev)?;
    let mut entries = Vec::new();
    for &fraction in &fractions {
        let subset = subsample_train(split, fraction, seed)?;
        let hash = subset_hash(&subset);
        for system in systems {
            let wrap = |e: Error| Error::Training {
                system: system.name().to_string(),
                fraction,
                source: Box::new(e),
            };
            log::info!("{} at {fraction}%: {} sentences", system.name(), subset.len());
            let tagger = system.train(&subset, &dev).map_err(wrap)?;
            let metrics = evaluate_tagger(tagger.as_ref(), &split.test).map_err(wrap)?;
            entries.push(AblationEntry {
                system: system.name().to_string(),
                fraction,
                train_sentences: subset.len(),
                subset_hash: hash.clone(),
                metrics,
            });
        }
    }
    Ok(AblationReport { seed, fractions, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{split_corpus, Document, SplitRatios};

    fn corpus() -> Vec<Document> {
        (0..20)
            .map(|i| {
                let text = format!("Ingreso el {}/03/2016 . Paciente de {} años .", i % 28 + 1, 20 + i);
                let mut d = Document::new(format!("d{i:02}"), text.clone());
                let date = format!("{}/03/2016", i % 28 + 1);
                let s = text.find(&date).unwrap();
                d.annotate("Date", s, s + date.chars().count()).unwrap();
                let age = format!("{} años", 20 + i);
                let s = text.chars().count() - age.chars().count() - 2;
                d.annotate("Age", s, s + age.chars().count()).unwrap();
                d
            })
            .collect()
    }

    #[test]
    fn systems_share_subsets_and_report_all_scenarios() {
        let split = split_corpus(&corpus(), SplitRatios::default(), 7).unwrap();
        let crf = CrfSystem {
            labels: LabelSet::nubes(),
            config: CrfConfig { max_iterations: 10, ..Default::default() },
        };
        let rules = RuleSystem::default();
        let report = ablation_run(&[&crf, &rules], &split, &[50.0, 100.0], 3).unwrap();
        assert_eq!(report.entries.len(), 4);
        for f in [50.0, 100.0] {
            let a = report.entry("crf", f).unwrap();
            let b = report.entry("rules", f).unwrap();
            assert_eq!(a.subset_hash, b.subset_hash);
            assert_eq!(a.metrics.len(), 5);
        }
        assert_eq!(report.to_csv().lines().count(), 1 + 4 * 5);
        assert!(report.deltas_csv().contains("crf,token-strict,100,"));
    }

    #[test]
    fn full_fraction_equals_single_run() {
        let split = split_corpus(&corpus(), SplitRatios::default(), 7).unwrap();
        let crf = CrfSystem {
            labels: LabelSet::nubes(),
            config: CrfConfig { max_iterations: 10, ..Default::default() },
        };
        let report = ablation_run(&[&crf], &split, &[100.0], 3).unwrap();
        let train = labelled_sentences(&split.train).unwrap();
        let dev = labelled_sentences(&split.dev).unwrap();
        let tagger = crf.train(&train, &dev).unwrap();
        let direct = evaluate_tagger(tagger.as_ref(), &split.test).unwrap();
        assert_eq!(report.entries[0].metrics, direct);
    }
}
