//! Category label sets and the BIO label alphabet built on top of them.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NUBES_LABELS: &str = include_str!("../../resources/labels/nubes.txt");
const MEDDOCAN_LABELS: &str = include_str!("../../resources/labels/meddocan.txt");

/// A closed, ordered set of sensitive-information categories.
///
/// Label ids are assigned as `O = 0`, `B-cat_i = 1 + 2i`, `I-cat_i = 2 + 2i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    categories: Vec<String>,
}

impl LabelSet {
    pub fn new<I, S>(categories: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for c in categories {
            let c = c.into();
            if !out.contains(&c) {
                out.push(c);
            }
        }
        Self { categories: out }
    }

    /// The eleven categories of the Spanish clinical corpus used by default.
    pub fn nubes() -> Self {
        Self::parse(NUBES_LABELS)
    }

    pub fn meddocan() -> Self {
        Self::parse(MEDDOCAN_LABELS)
    }

    /// One category per line; blank lines and `#` comments are skipped.
    pub fn parse(content: &str) -> Self {
        Self::new(
            content
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::FileMissing(path.to_path_buf()));
        }
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn contains(&self, category: &str) -> bool {
        self.categories.iter().any(|c| c == category)
    }

    pub fn category_index(&self, category: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == category)
    }

    /// Size of the BIO alphabet, `2 * |categories| + 1`.
    pub fn num_labels(&self) -> usize {
        2 * self.categories.len() + 1
    }

    pub fn label_id(&self, label: &BioLabel) -> Option<usize> {
        match label {
            BioLabel::O => Some(0),
            BioLabel::B(c) => self.category_index(c).map(|i| 1 + 2 * i),
            BioLabel::I(c) => self.category_index(c).map(|i| 2 + 2 * i),
        }
    }

    pub fn label(&self, id: usize) -> Option<BioLabel> {
        if id == 0 {
            return Some(BioLabel::O);
        }
        let cat = self.categories.get((id - 1) / 2)?.clone();
        Some(if id % 2 == 1 {
            BioLabel::B(cat)
        } else {
            BioLabel::I(cat)
        })
    }

    pub fn alphabet(&self) -> Vec<BioLabel> {
        (0..self.num_labels()).filter_map(|i| self.label(i)).collect()
    }

    /// Parses a label string and checks its category against the set.
    pub fn parse_label(&self, s: &str) -> Result<BioLabel> {
        let label: BioLabel = s.parse()?;
        match label.category() {
            Some(c) if !self.contains(c) => Err(Error::UnknownLabel(c.to_string())),
            _ => Ok(label),
        }
    }
}

impl Default for LabelSet {
    fn default() -> Self {
        Self::nubes()
    }
}

/// Per-token tag: outside, or the beginning/inside of a span of some category.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BioLabel {
    O,
    B(String),
    I(String),
}

impl BioLabel {
    pub fn category(&self) -> Option<&str> {
        match self {
            BioLabel::O => None,
            BioLabel::B(c) | BioLabel::I(c) => Some(c),
        }
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, BioLabel::O)
    }

    pub fn is_begin(&self) -> bool {
        matches!(self, BioLabel::B(_))
    }

    pub fn is_inside(&self) -> bool {
        matches!(self, BioLabel::I(_))
    }
}

impl fmt::Display for BioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BioLabel::O => f.write_str("O"),
            BioLabel::B(c) => write!(f, "B-{c}"),
            BioLabel::I(c) => write!(f, "I-{c}"),
        }
    }
}

impl FromStr for BioLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "O" {
            return Ok(BioLabel::O);
        }
        match s.split_once('-') {
            Some(("B", c)) if !c.is_empty() => Ok(BioLabel::B(c.to_string())),
            Some(("I", c)) if !c.is_empty() => Ok(BioLabel::I(c.to_string())),
            _ => Err(Error::UnknownLabel(s.to_string())),
        }
    }
}
