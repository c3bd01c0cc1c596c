//! Token- and entity-level scoring, confusion matrices and the
//! training-data reduction study.

mod ablation;
mod confusion;
mod entity;

pub use ablation::{ablation_run, subset_hash, AblationEntry, AblationReport, CrfSystem, RuleSystem, TrainableSystem, DEFAULT_FRACTIONS};
pub use confusion::{confusion_matrix, ConfusionMatrix};
pub use entity::{entity_counts, entity_metrics, EntityMode};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use std::collections::BTreeMap;

use crate::corpus::{decode_bio, encode_bio, encode_document, BioLabel, Document, InterchangeSentence, RepairPolicy};
use crate::error::{Error, Result};
use crate::tagger::Tagger;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    TokenDetection,
    TokenRelaxed,
    TokenStrict,
    EntityDetection,
    EntityClassification,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::TokenDetection,
        Scenario::TokenRelaxed,
        Scenario::TokenStrict,
        Scenario::EntityDetection,
        Scenario::EntityClassification,
    ];

    pub const TOKEN: [Scenario; 3] = [Scenario::TokenDetection, Scenario::TokenRelaxed, Scenario::TokenStrict];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::TokenDetection => "token-detection",
            Scenario::TokenRelaxed => "token-relaxed",
            Scenario::TokenStrict => "token-strict",
            Scenario::EntityDetection => "entity-detection",
            Scenario::EntityClassification => "entity-classification",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scenario {s:?}")))
    }
}

/// Raw match counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Counts {
    pub fn add(&mut self, other: Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub scenario: Scenario,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Metrics {
    /// Micro-averaged scores; empty denominators give 0.
    pub fn from_counts(scenario: Scenario, c: Counts) -> Self {
        let precision = ratio(c.tp, c.tp + c.fp);
        let recall = ratio(c.tp, c.tp + c.fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            scenario,
            precision,
            recall,
            f1,
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
        }
    }

    pub fn counts(&self) -> Counts {
        Counts {
            tp: self.tp,
            fp: self.fp,
            fn_: self.fn_,
        }
    }
}

/// Counts for one aligned label sequence. A non-O prediction that does not
/// match a non-O gold label counts as both a false positive and a false
/// negative.
pub fn token_counts(gold: &[BioLabel], pred: &[BioLabel], scenario: Scenario) -> Result<Counts> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut c = Counts::default();
    for (g, p) in gold.iter().zip(pred) {
        let hit = match scenario {
            Scenario::TokenDetection => !g.is_outside() && !p.is_outside(),
            Scenario::TokenRelaxed => !g.is_outside() && g.category() == p.category(),
            Scenario::TokenStrict => !g.is_outside() && g == p,
            _ => return Err(Error::InvalidConfig(format!("{scenario} is not a token scenario"))),
        };
        if hit {
            c.tp += 1;
        } else {
            c.fp += usize::from(!p.is_outside());
            c.fn_ += usize::from(!g.is_outside());
        }
    }
    Ok(c)
}

pub fn token_metrics(gold: &[BioLabel], pred: &[BioLabel], scenario: Scenario) -> Result<Metrics> {
    Ok(Metrics::from_counts(scenario, token_counts(gold, pred, scenario)?))
}

/// Gold and predicted labels for one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSentence {
    pub gold: Vec<BioLabel>,
    pub pred: Vec<BioLabel>,
}

/// Token-scenario metrics summed over many sentences.
pub fn token_metrics_corpus(sentences: &[AlignedSentence], scenario: Scenario) -> Result<Metrics> {
    let mut c = Counts::default();
    for s in sentences {
        c.add(token_counts(&s.gold, &s.pred, scenario)?);
    }
    Ok(Metrics::from_counts(scenario, c))
}

/// All five scenarios for predicted label sequences (token level) and
/// predicted documents (entity level).
pub fn score_all(aligned: &[AlignedSentence], gold_docs: &[Document], pred_docs: &[Document]) -> Result<Vec<Metrics>> {
    let mut out = Vec::with_capacity(5);
    for s in Scenario::TOKEN {
        out.push(token_metrics_corpus(aligned, s)?);
    }
    out.push(entity_metrics(gold_docs, pred_docs, EntityMode::Detection)?);
    out.push(entity_metrics(gold_docs, pred_docs, EntityMode::Classification)?);
    Ok(out)
}

/// Runs `tagger` over `docs` and returns per-sentence alignments plus
/// documents carrying the decoded predicted annotations.
pub fn tag_documents(tagger: &dyn Tagger, docs: &[Document]) -> Result<(Vec<AlignedSentence>, Vec<Document>)> {
    let mut aligned = Vec::new();
    let mut pred_docs = Vec::with_capacity(docs.len());
    for doc in docs {
        let mut tokens = Vec::new();
        let mut labels = Vec::new();
        for ls in encode_document(doc)? {
            let pred = tagger.tag(&ls.sentence);
            if pred.len() != ls.sentence.len() {
                return Err(Error::LengthMismatch {
                    gold: ls.sentence.len(),
                    pred: pred.len(),
                });
            }
            tokens.extend(ls.sentence.tokens.iter().cloned());
            labels.extend(pred.iter().cloned());
            aligned.push(AlignedSentence { gold: ls.labels, pred });
        }
        let mut pd = Document::new(doc.id.clone(), doc.text.clone());
        pd.annotations = decode_bio(&doc.text, &tokens, &labels, RepairPolicy::IAsB)?;
        pred_docs.push(pd);
    }
    Ok((aligned, pred_docs))
}

/// Tags `docs` and scores the output in all five scenarios.
pub fn evaluate_tagger(tagger: &dyn Tagger, docs: &[Document]) -> Result<Vec<Metrics>> {
    let (aligned, pred_docs) = tag_documents(tagger, docs)?;
    score_all(&aligned, docs, &pred_docs)
}

/// Token alignments for predictions given as documents: each gold
/// sentence is labelled once from the gold spans and once from the
/// predicted spans of the document with the same id. Gold documents with
/// no prediction count as all-`O`.
pub fn align_documents(gold: &[Document], pred: &[Document]) -> Result<Vec<AlignedSentence>> {
    let by_id: BTreeMap<&str, &Document> = pred.iter().map(|d| (d.id.as_str(), d)).collect();
    let gold_ids: std::collections::BTreeSet<&str> = gold.iter().map(|d| d.id.as_str()).collect();
    if let Some(stray) = pred.iter().find(|d| !gold_ids.contains(d.id.as_str())) {
        return Err(Error::CrossDocumentAnnotation(stray.id.clone()));
    }
    let mut out = Vec::new();
    for doc in gold {
        let pred_anns = by_id.get(doc.id.as_str()).map_or(&[][..], |d| &d.annotations[..]);
        for ls in encode_document(doc)? {
            let pred = encode_bio(&ls.sentence, pred_anns)?;
            out.push(AlignedSentence { gold: ls.labels, pred });
        }
    }
    Ok(out)
}

/// Rebuilds predicted documents from interchange rows, taking text from
/// the gold documents of the same id.
pub fn documents_from_interchange(sentences: &[InterchangeSentence], gold: &[Document]) -> Result<Vec<Document>> {
    let texts: BTreeMap<&str, &Document> = gold.iter().map(|d| (d.id.as_str(), d)).collect();
    let mut grouped: BTreeMap<&str, (Vec<crate::corpus::Token>, Vec<BioLabel>)> = BTreeMap::new();
    for s in sentences {
        let pred = s
            .pred
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("interchange rows carry no pred column".into()))?;
        let entry = grouped.entry(s.sentence.doc_id.as_str()).or_default();
        entry.0.extend(s.sentence.tokens.iter().cloned());
        entry.1.extend(pred.iter().cloned());
    }
    let mut out = Vec::with_capacity(grouped.len());
    for (id, (tokens, labels)) in grouped {
        let doc = texts.get(id).ok_or_else(|| Error::CrossDocumentAnnotation(id.to_string()))?;
        let mut pd = Document::new(id, doc.text.clone());
        pd.annotations = decode_bio(&doc.text, &tokens, &labels, RepairPolicy::IAsB)?;
        out.push(pd);
    }
    Ok(out)
}

/// Fixed-width table, one row per scenario.
pub fn render_metrics_table(metrics: &[Metrics]) -> String {
    let mut out = format!(
        "{:<22} {:>9} {:>9} {:>9} {:>7} {:>7} {:>7}\n",
        "scenario", "precision", "recall", "f1", "tp", "fp", "fn"
    );
    for m in metrics {
        out.push_str(&format!(
            "{:<22} {:>9.4} {:>9.4} {:>9.4} {:>7} {:>7} {:>7}\n",
            m.scenario.as_str(),
            m.precision,
            m.recall,
            m.f1,
            m.tp,
            m.fp,
            m.fn_
        ));
    }
    out
}
