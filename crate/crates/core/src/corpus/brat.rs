//! BRAT standoff reader and writer (entity lines only).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use log::warn;

use super::{Annotation, CharOffsets, Document, LabelSet};
use crate::error::{Error, Result};

/// Parses a `.txt`/`.ann` pair. Non-entity lines are skipped, overlapping
/// entities are resolved by [`Document::normalize`].
pub fn parse_brat(id: &str, text: &str, ann: &str, labels: &LabelSet) -> Result<Document> {
    let offsets = CharOffsets::new(text);
    let mut doc = Document::new(id, text);
    for (lineno, line) in ann.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        if !line.starts_with('T') {
            warn!("{id}:{lineno}: skipping non-entity line");
            continue;
        }
        let mut fields = line.splitn(3, '\t');
        let (ann_id, middle, surface) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(m), Some(s)) => (a, m, s),
            _ => {
                return Err(Error::MalformedLine {
                    line: lineno,
                    reason: "expected three tab-separated fields".into(),
                })
            }
        };
        if middle.contains(';') {
            warn!("{id}:{lineno}: skipping discontinuous entity {ann_id}");
            continue;
        }
        let parts: Vec<&str> = middle.split(' ').collect();
        if parts.len() != 3 {
            return Err(Error::MalformedLine {
                line: lineno,
                reason: format!("expected `<label> <start> <end>`, got {middle:?}"),
            });
        }
        let parse_offset = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::MalformedLine {
                line: lineno,
                reason: format!("non-numeric offset {s:?}"),
            })
        };
        let (label, start, end) = (parts[0], parse_offset(parts[1])?, parse_offset(parts[2])?);
        if !labels.contains(label) {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        if start >= end || end > offsets.char_len() {
            return Err(Error::OffsetOutOfRange {
                start,
                end,
                len: offsets.char_len(),
            });
        }
        let slice = offsets.slice(text, start, end);
        // BRAT flattens newlines inside the surface column.
        if slice.replace('\n', " ") != surface {
            return Err(Error::OffsetMismatch {
                id: ann_id.to_string(),
                surface: surface.to_string(),
                slice: slice.to_string(),
            });
        }
        doc.annotations.push(Annotation {
            id: ann_id.to_string(),
            category: label.to_string(),
            start,
            end,
            surface: slice.to_string(),
        });
    }
    for dropped in doc.normalize() {
        warn!("{id}: dropping overlapping annotation {} ({:?})", dropped.id, dropped.surface);
    }
    Ok(doc)
}

/// Renders a document as `(txt, ann)` contents, entity lines in id order.
pub fn serialize_brat(doc: &Document) -> (String, String) {
    let mut anns: Vec<&Annotation> = doc.annotations.iter().collect();
    anns.sort_by(|a, b| id_key(&a.id).cmp(&id_key(&b.id)));
    let mut out = String::new();
    for a in anns {
        let _ = writeln!(
            out,
            "{}\t{} {} {}\t{}",
            a.id,
            a.category,
            a.start,
            a.end,
            a.surface.replace('\n', " ")
        );
    }
    (doc.text.clone(), out)
}

fn id_key(id: &str) -> (usize, &str) {
    let n = id.strip_prefix('T').and_then(|n| n.parse().ok()).unwrap_or(usize::MAX);
    (n, id)
}

/// Reads every `<stem>.txt` in `dir` with its `<stem>.ann` (missing `.ann`
/// means no annotations). Documents are returned sorted by id.
pub fn read_brat_dir(dir: impl AsRef<Path>, labels: &LabelSet) -> Result<Vec<Document>> {
    let dir = dir.as_ref();
    if !dir.is_dir() {
        return Err(Error::FileMissing(dir.to_path_buf()));
    }
    let mut stems: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .collect();
    stems.sort();
    stems
        .into_iter()
        .map(|stem| {
            let text = fs::read_to_string(dir.join(format!("{stem}.txt")))?;
            let ann_path = dir.join(format!("{stem}.ann"));
            let ann = if ann_path.exists() {
                fs::read_to_string(ann_path)?
            } else {
                String::new()
            };
            parse_brat(&stem, &text, &ann, labels)
        })
        .collect()
}

pub fn write_brat_dir(dir: impl AsRef<Path>, docs: &[Document]) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    for doc in docs {
        let (txt, ann) = serialize_brat(doc);
        fs::write(dir.join(format!("{}.txt", doc.id)), txt)?;
        fs::write(dir.join(format!("{}.ann", doc.id)), ann)?;
    }
    Ok(())
}
