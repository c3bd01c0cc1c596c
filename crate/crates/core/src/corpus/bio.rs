//! Span ⟷ BIO conversion.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{split_sentences, Annotation, BioLabel, CharOffsets, Document, LabelledSentence, Sentence, Token};
use crate::error::{Error, Result};

/// How [`decode_bio`] treats an `I-x` that does not continue an `x` span.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepairPolicy {
    /// Start a new span, as if the label were `B-x`.
    #[default]
    IAsB,
    /// Reject the sequence.
    Strict,
}

impl FromStr for RepairPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i-as-b" => Ok(Self::IAsB),
            "strict" => Ok(Self::Strict),
            other => Err(Error::InvalidConfig(format!("unknown repair policy {other:?}"))),
        }
    }
}

/// A decoded span without surface text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub category: String,
}

/// Labels the tokens of `sentence` from character-offset annotations.
///
/// An annotation covers every token it overlaps, so boundaries inside a
/// token snap outward. Annotations touching no token of the sentence are
/// ignored.
pub fn encode_bio(sentence: &Sentence, annotations: &[Annotation]) -> Result<Vec<BioLabel>> {
    let mut labels = vec![BioLabel::O; sentence.len()];
    let mut owner: Vec<Option<usize>> = vec![None; sentence.len()];
    for (ai, a) in annotations.iter().enumerate() {
        let mut first = true;
        for (ti, tok) in sentence.tokens.iter().enumerate() {
            if !(tok.start < a.end && a.start < tok.end) {
                continue;
            }
            if let Some(prev) = owner[ti] {
                return Err(Error::OverlapError {
                    first: annotations[prev].id.clone(),
                    second: a.id.clone(),
                });
            }
            owner[ti] = Some(ai);
            labels[ti] = if first {
                BioLabel::B(a.category.clone())
            } else {
                BioLabel::I(a.category.clone())
            };
            first = false;
        }
    }
    Ok(labels)
}

/// Groups maximal `B I*` runs into spans covering first-to-last token.
pub fn decode_spans(tokens: &[Token], labels: &[BioLabel], repair: RepairPolicy) -> Result<Vec<Span>> {
    if tokens.len() != labels.len() {
        return Err(Error::LengthMismatch {
            gold: tokens.len(),
            pred: labels.len(),
        });
    }
    let mut spans: Vec<Span> = Vec::new();
    let mut open: Option<Span> = None;
    for (i, (tok, label)) in tokens.iter().zip(labels).enumerate() {
        match label {
            BioLabel::O => spans.extend(open.take()),
            BioLabel::B(c) => {
                spans.extend(open.take());
                open = Some(Span {
                    start: tok.start,
                    end: tok.end,
                    category: c.clone(),
                });
            }
            BioLabel::I(c) => match open.as_mut() {
                Some(span) if &span.category == c => span.end = tok.end,
                _ => {
                    if repair == RepairPolicy::Strict {
                        return Err(Error::IllFormedSequence {
                            position: i,
                            label: label.to_string(),
                        });
                    }
                    spans.extend(open.take());
                    open = Some(Span {
                        start: tok.start,
                        end: tok.end,
                        category: c.clone(),
                    });
                }
            },
        }
    }
    spans.extend(open);
    Ok(spans)
}

/// Decodes labels back into annotations whose surfaces are read from `text`.
/// Ids are `T1..Tn` in order of appearance.
pub fn decode_bio(text: &str, tokens: &[Token], labels: &[BioLabel], repair: RepairPolicy) -> Result<Vec<Annotation>> {
    let spans = decode_spans(tokens, labels, repair)?;
    let offsets = CharOffsets::new(text);
    spans
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            if s.end > offsets.char_len() {
                return Err(Error::OffsetOutOfRange {
                    start: s.start,
                    end: s.end,
                    len: offsets.char_len(),
                });
            }
            Ok(Annotation {
                id: format!("T{}", i + 1),
                surface: offsets.slice(text, s.start, s.end).to_string(),
                category: s.category,
                start: s.start,
                end: s.end,
            })
        })
        .collect()
}

/// Sentence-splits and labels one document.
pub fn encode_document(doc: &Document) -> Result<Vec<LabelledSentence>> {
    split_sentences(doc)
        .into_iter()
        .map(|sentence| {
            let labels = encode_bio(&sentence, &doc.annotations)?;
            Ok(LabelledSentence { sentence, labels })
        })
        .collect()
}

pub fn labelled_sentences(docs: &[Document]) -> Result<Vec<LabelledSentence>> {
    let mut out = Vec::new();
    for doc in docs {
        out.extend(encode_document(doc)?);
    }
    Ok(out)
}
