use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Counts, Metrics, Scenario};
use crate::corpus::{Annotation, Document};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntityMode {
    /// Offsets must match exactly; categories are ignored.
    Detection,
    /// Offsets and category must match exactly.
    Classification,
}

impl EntityMode {
    pub fn scenario(self) -> Scenario {
        match self {
            EntityMode::Detection => Scenario::EntityDetection,
            EntityMode::Classification => Scenario::EntityClassification,
        }
    }
}

fn key(a: &Annotation, mode: EntityMode) -> (usize, usize, String) {
    let cat = match mode {
        EntityMode::Detection => String::new(),
        EntityMode::Classification => a.category.clone(),
    };
    (a.start, a.end, cat)
}

/// Exact-match counts for the annotations of a single document.
pub fn entity_counts(gold: &[Annotation], pred: &[Annotation], mode: EntityMode) -> Counts {
    let mut remaining: BTreeMap<(usize, usize, String), usize> = BTreeMap::new();
    for g in gold {
        *remaining.entry(key(g, mode)).or_default() += 1;
    }
    let mut c = Counts::default();
    for p in pred {
        match remaining.get_mut(&key(p, mode)) {
            Some(n) if *n > 0 => {
                *n -= 1;
                c.tp += 1;
            }
            _ => c.fp += 1,
        }
    }
    c.fn_ = gold.len() - c.tp;
    c
}

/// Micro-averaged entity scores over documents matched by id. Gold
/// documents without a prediction count all their annotations as missed.
pub fn entity_metrics(gold: &[Document], pred: &[Document], mode: EntityMode) -> Result<Metrics> {
    let gold_by_id: HashMap<&str, &Document> = gold.iter().map(|d| (d.id.as_str(), d)).collect();
    let mut pred_by_id: HashMap<&str, Vec<&Annotation>> = HashMap::new();
    for d in pred {
        if !gold_by_id.contains_key(d.id.as_str()) {
            return Err(Error::CrossDocumentAnnotation(d.id.clone()));
        }
        pred_by_id.entry(d.id.as_str()).or_default().extend(&d.annotations);
    }
    let mut c = Counts::default();
    for g in gold {
        let p: Vec<Annotation> = pred_by_id
            .get(g.id.as_str())
            .map(|v| v.iter().map(|a| (*a).clone()).collect())
            .unwrap_or_default();
        c.add(entity_counts(&g.annotations, &p, mode));
    }
    Ok(Metrics::from_counts(mode.scenario(), c))
}
