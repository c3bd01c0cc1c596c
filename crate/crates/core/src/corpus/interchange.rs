//! Token-per-row TSV exchanged with external taggers.
//!
//! ```text
//! # columns: token start end gold pred [lemma pos ner]
//! # doc: <document id>
//! Paciente	0	8	O	O
//! ...
//!                                  <- blank line ends a sentence
//! ```
//!
//! `-` marks an absent cell. Other `#` lines are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::{BioLabel, LabelSet, Sentence, Token, TokenFeatures};
use crate::error::{Error, Result};

const BASE_COLUMNS: [&str; 5] = ["token", "start", "end", "gold", "pred"];
const FEATURE_COLUMNS: [&str; 3] = ["lemma", "pos", "ner"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterchangeSentence {
    pub sentence: Sentence,
    pub gold: Option<Vec<BioLabel>>,
    pub pred: Option<Vec<BioLabel>>,
}

pub fn read_interchange(path: impl AsRef<Path>, labels: &LabelSet) -> Result<Vec<InterchangeSentence>> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::FileMissing(path.to_path_buf()));
    }
    parse_interchange(&std::fs::read_to_string(path)?, labels)
}

pub fn write_interchange(path: impl AsRef<Path>, sentences: &[InterchangeSentence]) -> Result<()> {
    if let Some(parent) = path.as_ref().parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, render_interchange(sentences))?;
    Ok(())
}

#[derive(Default)]
struct Pending {
    tokens: Vec<Token>,
    gold: Vec<Option<BioLabel>>,
    pred: Vec<Option<BioLabel>>,
    first_line: usize,
}

pub fn parse_interchange(content: &str, labels: &LabelSet) -> Result<Vec<InterchangeSentence>> {
    let mut n_columns: Option<usize> = None;
    let mut doc_id = String::new();
    let mut index_in_doc = 0usize;
    let mut out = Vec::new();
    let mut pending = Pending::default();

    let mut flush = |pending: &mut Pending, doc_id: &str, index_in_doc: &mut usize| -> Result<()> {
        if pending.tokens.is_empty() {
            return Ok(());
        }
        let p = std::mem::take(pending);
        let column = |cells: Vec<Option<BioLabel>>, name: &str| -> Result<Option<Vec<BioLabel>>> {
            let present = cells.iter().filter(|c| c.is_some()).count();
            if present == 0 {
                Ok(None)
            } else if present == cells.len() {
                Ok(Some(cells.into_iter().flatten().collect()))
            } else {
                Err(Error::MalformedRow {
                    line: p.first_line,
                    reason: format!("sentence mixes present and absent {name} labels"),
                })
            }
        };
        let gold = column(p.gold, "gold")?;
        let pred = column(p.pred, "pred")?;
        let mut tokens = p.tokens;
        for t in &mut tokens {
            t.sentence_index = *index_in_doc;
        }
        out.push(InterchangeSentence {
            sentence: Sentence {
                doc_id: doc_id.to_string(),
                index: *index_in_doc,
                tokens,
            },
            gold,
            pred,
        });
        *index_in_doc += 1;
        Ok(())
    };

    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if let Some(rest) = line.strip_prefix("# columns:") {
            let cols: Vec<&str> = rest.split_whitespace().collect();
            let ok = cols == BASE_COLUMNS || cols.iter().eq(BASE_COLUMNS.iter().chain(&FEATURE_COLUMNS));
            if !ok {
                return Err(Error::MalformedRow {
                    line: lineno,
                    reason: format!("unsupported column header {cols:?}"),
                });
            }
            n_columns = Some(cols.len());
            continue;
        }
        if let Some(rest) = line.strip_prefix("# doc:") {
            flush(&mut pending, &doc_id, &mut index_in_doc)?;
            doc_id = rest.trim().to_string();
            index_in_doc = 0;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            flush(&mut pending, &doc_id, &mut index_in_doc)?;
            continue;
        }
        let expected = n_columns.ok_or_else(|| Error::MalformedRow {
            line: lineno,
            reason: "row before `# columns:` header".into(),
        })?;
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != expected {
            return Err(Error::MalformedRow {
                line: lineno,
                reason: format!("expected {expected} columns, found {}", cells.len()),
            });
        }
        let offset = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::MalformedRow {
                line: lineno,
                reason: format!("non-numeric offset {s:?}"),
            })
        };
        let label = |s: &str| -> Result<Option<BioLabel>> {
            if s == "-" {
                return Ok(None);
            }
            labels.parse_label(s).map(Some).map_err(|_| Error::LabelVocabularyError {
                line: lineno,
                label: s.to_string(),
            })
        };
        let feature = |s: &str| (s != "-").then(|| s.to_string());
        if pending.tokens.is_empty() {
            pending.first_line = lineno;
        }
        let mut token = Token::new(cells[0], offset(cells[1])?, offset(cells[2])?);
        if expected == 8 {
            token.features = TokenFeatures {
                lemma: feature(cells[5]),
                pos: feature(cells[6]),
                ner: feature(cells[7]),
            };
        }
        pending.tokens.push(token);
        pending.gold.push(label(cells[3])?);
        pending.pred.push(label(cells[4])?);
    }
    flush(&mut pending, &doc_id, &mut index_in_doc)?;
    Ok(out)
}

pub fn render_interchange(sentences: &[InterchangeSentence]) -> String {
    let with_features = sentences
        .iter()
        .any(|s| s.sentence.tokens.iter().any(|t| !t.features.is_empty()));
    let mut out = String::from("# columns: token start end gold pred");
    if with_features {
        out.push_str(" lemma pos ner");
    }
    out.push('\n');
    let mut current_doc: Option<&str> = None;
    for s in sentences {
        if current_doc != Some(s.sentence.doc_id.as_str()) {
            let _ = writeln!(out, "# doc: {}", s.sentence.doc_id);
            current_doc = Some(&s.sentence.doc_id);
        }
        for (i, t) in s.sentence.tokens.iter().enumerate() {
            let cell = |labels: &Option<Vec<BioLabel>>| labels.as_ref().map_or("-".to_string(), |l| l[i].to_string());
            let _ = write!(out, "{}\t{}\t{}\t{}\t{}", t.surface, t.start, t.end, cell(&s.gold), cell(&s.pred));
            if with_features {
                let f = |v: &Option<String>| v.clone().unwrap_or_else(|| "-".into());
                let _ = write!(out, "\t{}\t{}\t{}", f(&t.features.lemma), f(&t.features.pos), f(&t.features.ner));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
