//! Rendering de-identified text: masks, category placeholders, or
//! surrogate values.

mod surrogate;

pub use surrogate::{default_pools, shift_age, shift_date, SurrogatePools, Surrogator};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{char_slice, Annotation, Document};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Mask,
    Placeholder,
    Surrogate,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mask" => Ok(Mode::Mask),
            "placeholder" => Ok(Mode::Placeholder),
            "surrogate" => Ok(Mode::Surrogate),
            _ => Err(Error::InvalidConfig(format!("unknown anonymisation mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Mode::Mask => "mask",
            Mode::Placeholder => "placeholder",
            Mode::Surrogate => "surrogate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnonymisationPolicy {
    pub mode: Mode,
    pub mask_char: char,
    /// Placeholder template with `{CAT}` for the upper-cased category.
    /// When unset, dashes pad the tag to the span's length: a 7-character
    /// Age span becomes `[-AGE-]`, a 10-character Date `[--DATE--]`.
    pub placeholder_format: Option<String>,
    pub surrogate_seed: u64,
    /// Inclusive range for the per-document date shift.
    pub date_shift_days: (i64, i64),
    /// Inclusive range for per-span age shifts.
    pub age_shift_years: (i64, i64),
}

impl Default for AnonymisationPolicy {
    fn default() -> Self {
        Self {
            mode: Mode::Placeholder,
            mask_char: 'X',
            placeholder_format: None,
            surrogate_seed: 0,
            date_shift_days: (-365, 365),
            age_shift_years: (-5, 5),
        }
    }
}

impl AnonymisationPolicy {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }
}

/// Placeholder for one span, e.g. `[--DOCTOR--]`.
pub fn placeholder(category: &str, span_len: usize, format: Option<&str>) -> String {
    let tag = category.to_uppercase();
    if let Some(f) = format {
        return f.replace("{CAT}", &tag);
    }
    let dashes = span_len.saturating_sub(tag.chars().count() + 2).max(2);
    let left = dashes / 2;
    let right = dashes - left;
    format!("[{}{tag}{}]", "-".repeat(left), "-".repeat(right))
}

/// One replaced span, with its position in the output text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingEntry {
    pub id: String,
    pub category: String,
    pub original: String,
    pub replacement: String,
    pub source_start: usize,
    pub source_end: usize,
    pub output_start: usize,
    pub output_end: usize,
}

fn check(doc: &Document, annotations: &[Annotation]) -> Result<Vec<Annotation>> {
    let len = doc.char_len();
    let mut sorted = annotations.to_vec();
    sorted.sort_by_key(|a| (a.start, a.end));
    for a in &sorted {
        if a.start >= a.end || a.end > len {
            return Err(Error::OffsetOutOfRange {
                start: a.start,
                end: a.end,
                len,
            });
        }
    }
    for w in sorted.windows(2) {
        if w[0].overlaps(&w[1]) {
            return Err(Error::OverlapError {
                first: w[0].id.clone(),
                second: w[1].id.clone(),
            });
        }
    }
    Ok(sorted)
}

/// Anonymised text plus the side table of replacements.
pub fn anonymise_with_mapping(
    doc: &Document,
    annotations: &[Annotation],
    policy: &AnonymisationPolicy,
    pools: &SurrogatePools,
) -> Result<(String, Vec<MappingEntry>)> {
    let sorted = check(doc, annotations)?;
    let mut surrogator = Surrogator::for_document(&doc.id, policy, pools);
    let mut replacements = Vec::with_capacity(sorted.len());
    for a in &sorted {
        let original = char_slice(&doc.text, a.start, a.end).expect("checked").to_string();
        let replacement = match policy.mode {
            Mode::Mask => original.chars().map(|c| if c == '\n' { c } else { policy.mask_char }).collect(),
            Mode::Placeholder => placeholder(&a.category, a.len(), policy.placeholder_format.as_deref()),
            Mode::Surrogate => {
                let mut with_surface = a.clone();
                with_surface.surface = original.clone();
                surrogator.surrogate(&with_surface)?
            }
        };
        replacements.push((a, original, replacement));
    }

    // Right-to-left so earlier character offsets stay valid.
    let mut chars: Vec<char> = doc.text.chars().collect();
    for (a, _, r) in replacements.iter().rev() {
        chars.splice(a.start..a.end, r.chars());
    }
    let mut mapping = Vec::with_capacity(replacements.len());
    let mut delta: i64 = 0;
    for (a, original, replacement) in replacements {
        let n = replacement.chars().count();
        let output_start = (a.start as i64 + delta) as usize;
        delta += n as i64 - a.len() as i64;
        mapping.push(MappingEntry {
            id: a.id.clone(),
            category: a.category.clone(),
            original,
            replacement,
            source_start: a.start,
            source_end: a.end,
            output_start,
            output_end: output_start + n,
        });
    }
    Ok((chars.into_iter().collect(), mapping))
}

/// Anonymised text for `doc` with the given spans replaced.
pub fn anonymise(doc: &Document, annotations: &[Annotation], policy: &AnonymisationPolicy) -> Result<String> {
    let pools = if policy.mode == Mode::Surrogate {
        SurrogatePools::default()
    } else {
        SurrogatePools::empty()
    };
    Ok(anonymise_with_mapping(doc, annotations, policy, &pools)?.0)
}

/// Puts the originals back using a side table.
pub fn restore(output: &str, mapping: &[MappingEntry]) -> Result<String> {
    let mut chars: Vec<char> = output.chars().collect();
    let mut entries: Vec<&MappingEntry> = mapping.iter().collect();
    entries.sort_by_key(|m| std::cmp::Reverse(m.output_start));
    for m in entries {
        if m.output_end > chars.len() || m.output_start > m.output_end {
            return Err(Error::OffsetOutOfRange {
                start: m.output_start,
                end: m.output_end,
                len: chars.len(),
            });
        }
        let current: String = chars[m.output_start..m.output_end].iter().collect();
        if current != m.replacement {
            return Err(Error::OffsetMismatch {
                id: m.id.clone(),
                surface: m.replacement.clone(),
                slice: current,
            });
        }
        chars.splice(m.output_start..m.output_end, m.original.chars());
    }
    Ok(chars.into_iter().collect())
}

/// Annotations whose original surface still occurs in `output`.
pub fn leak_scan<'a>(output: &str, annotations: &'a [Annotation]) -> Vec<&'a Annotation> {
    annotations
        .iter()
        .filter(|a| !a.surface.trim().is_empty() && output.contains(a.surface.as_str()))
        .collect()
}
