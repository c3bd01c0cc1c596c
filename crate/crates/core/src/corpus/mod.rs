//! Documents, annotations, tokens and the conversions between them.
//!
//! All offsets are Unicode scalar value indices into the document text,
//! matching the BRAT standoff convention. Byte offsets never leave this module.

mod bio;
mod brat;
mod interchange;
mod labels;
mod split;
mod tokenize;

pub use bio::{decode_bio, decode_spans, encode_bio, encode_document, labelled_sentences, RepairPolicy, Span};
pub use brat::{parse_brat, read_brat_dir, serialize_brat, write_brat_dir};
pub use interchange::{read_interchange, write_interchange, InterchangeSentence};
pub use labels::{BioLabel, LabelSet};
pub use split::{split_corpus, subsample_indices, subsample_train, CorpusSplit, SplitRatios};
pub use tokenize::{split_sentences, tokenize};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sensitive span, `[start, end)` in characters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub id: String,
    pub category: String,
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

impl Annotation {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Annotation) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub annotations: Vec<Annotation>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            annotations: Vec::new(),
        }
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }

    /// Characters `[start, end)` of the text, or `None` when out of range.
    pub fn slice(&self, start: usize, end: usize) -> Option<&str> {
        char_slice(&self.text, start, end)
    }

    /// Appends an annotation with the next free `T<n>` id and the surface
    /// taken from the text.
    pub fn annotate(&mut self, category: &str, start: usize, end: usize) -> Result<&Annotation> {
        let surface = self
            .slice(start, end)
            .filter(|_| start < end)
            .ok_or(Error::OffsetOutOfRange {
                start,
                end,
                len: self.char_len(),
            })?
            .to_string();
        let next = self
            .annotations
            .iter()
            .filter_map(|a| a.id.strip_prefix('T')?.parse::<usize>().ok())
            .max()
            .unwrap_or(0)
            + 1;
        self.annotations.push(Annotation {
            id: format!("T{next}"),
            category: category.to_string(),
            start,
            end,
            surface,
        });
        Ok(self.annotations.last().expect("just pushed"))
    }

    /// Checks offsets, surfaces and categories against `labels`.
    pub fn validate(&self, labels: &LabelSet) -> Result<()> {
        let offsets = CharOffsets::new(&self.text);
        for a in &self.annotations {
            if !labels.contains(&a.category) {
                return Err(Error::UnknownLabel(a.category.clone()));
            }
            if a.start >= a.end || a.end > offsets.char_len() {
                return Err(Error::OffsetOutOfRange {
                    start: a.start,
                    end: a.end,
                    len: offsets.char_len(),
                });
            }
            let slice = offsets.slice(&self.text, a.start, a.end);
            if slice != a.surface {
                return Err(Error::OffsetMismatch {
                    id: a.id.clone(),
                    surface: a.surface.clone(),
                    slice: slice.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Resolves overlaps by keeping the longest annotation (ties: earliest
    /// start, then file order) and sorts the survivors by offset. Returns the
    /// dropped annotations.
    pub fn normalize(&mut self) -> Vec<Annotation> {
        let mut order: Vec<usize> = (0..self.annotations.len()).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&self.annotations[a], &self.annotations[b]);
            y.len().cmp(&x.len()).then(x.start.cmp(&y.start)).then(a.cmp(&b))
        });
        let mut kept: Vec<usize> = Vec::new();
        let mut dropped = Vec::new();
        for i in order {
            let a = &self.annotations[i];
            if kept.iter().any(|&k| self.annotations[k].overlaps(a)) {
                dropped.push(a.clone());
            } else {
                kept.push(i);
            }
        }
        let mut survivors: Vec<Annotation> = kept.into_iter().map(|i| self.annotations[i].clone()).collect();
        survivors.sort_by_key(|a| (a.start, a.end));
        self.annotations = survivors;
        dropped
    }
}

/// Optional linguistic features produced by an external analyser.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenFeatures {
    pub lemma: Option<String>,
    pub pos: Option<String>,
    pub ner: Option<String>,
}

impl TokenFeatures {
    pub fn is_empty(&self) -> bool {
        self.lemma.is_none() && self.pos.is_none() && self.ner.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    pub sentence_index: usize,
    #[serde(default)]
    pub features: TokenFeatures,
}

impl Token {
    pub fn new(surface: impl Into<String>, start: usize, end: usize) -> Self {
        Self {
            surface: surface.into(),
            start,
            end,
            sentence_index: 0,
            features: TokenFeatures::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub doc_id: String,
    pub index: usize,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// A free-standing sentence built from bare token strings, with offsets
    /// as if the tokens were joined by single spaces.
    pub fn from_words<S: AsRef<str>>(words: &[S]) -> Self {
        let mut tokens = Vec::with_capacity(words.len());
        let mut pos = 0;
        for w in words {
            let w = w.as_ref();
            let n = w.chars().count();
            tokens.push(Token::new(w, pos, pos + n));
            pos += n + 1;
        }
        Self {
            doc_id: String::new(),
            index: 0,
            tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn words(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }
}

/// A sentence with one gold label per token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledSentence {
    pub sentence: Sentence,
    pub labels: Vec<BioLabel>,
}

/// Byte positions of every character boundary of a string.
pub(crate) struct CharOffsets {
    bytes: Vec<usize>,
}

impl CharOffsets {
    pub(crate) fn new(text: &str) -> Self {
        let mut bytes: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        bytes.push(text.len());
        Self { bytes }
    }

    pub(crate) fn char_len(&self) -> usize {
        self.bytes.len() - 1
    }

    /// Panics when out of range; callers check `char_len` first.
    pub(crate) fn slice<'a>(&self, text: &'a str, start: usize, end: usize) -> &'a str {
        &text[self.bytes[start]..self.bytes[end]]
    }
}

pub(crate) fn char_slice(text: &str, start: usize, end: usize) -> Option<&str> {
    if start > end {
        return None;
    }
    let mut it = text.char_indices().map(|(b, _)| b).chain(std::iter::once(text.len()));
    let b0 = it.nth(start)?;
    let b1 = if end == start { b0 } else { it.nth(end - start - 1)? };
    Some(&text[b0..b1])
}
