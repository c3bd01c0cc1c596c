//! Token feature template.
//!
//! For each context offset in the window, the token at that offset
//! contributes: 2- and 3-character prefixes and suffixes, its length,
//! all-letters / number / all-punctuation / contains-`@` flags, a casing
//! class, and the uppercase, digit and punctuation ratios. The focus token
//! also contributes `bias`, the sentence length, and `BOS`/`EOS`. Lemma,
//! POS and NER values are added when the token carries them.
//!
//! Features of neighbouring tokens are prefixed with their offset
//! (`-1:suffix3=ños`); the focus token's features are unprefixed.

use crate::corpus::Sentence;
use crate::error::{Error, Result};

/// Sparse `(name, value)` list. Binary features have value 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector {
    entries: Vec<(String, f64)>,
}

impl FeatureVector {
    fn push(&mut self, name: String, value: f64) {
        self.entries.push((name, value));
    }

    fn flag(&mut self, name: String, on: bool) {
        if on {
            self.entries.push((name, 1.0));
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| n == name)
    }

    /// Value of a feature, 0 when absent.
    pub fn value(&self, name: &str) -> f64 {
        self.entries.iter().find(|(n, _)| n == name).map_or(0.0, |(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(n, v)| (n.as_str(), *v))
    }
}

fn is_punct_char(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

fn is_number(s: &str) -> bool {
    let mut seen_digit = false;
    let mut seen_sep = false;
    for c in s.chars() {
        if c.is_ascii_digit() {
            seen_digit = true;
        } else if (c == '.' || c == ',') && seen_digit && !seen_sep {
            seen_sep = true;
        } else {
            return false;
        }
    }
    seen_digit && !s.ends_with(['.', ','])
}

fn casing(s: &str) -> &'static str {
    let letters: Vec<char> = s.chars().filter(|c| c.is_alphabetic()).collect();
    if letters.is_empty() {
        "none"
    } else if letters.iter().all(|c| c.is_uppercase()) {
        "upper"
    } else if letters.iter().all(|c| c.is_lowercase()) {
        "lower"
    } else if letters[0].is_uppercase() && letters[1..].iter().all(|c| c.is_lowercase()) {
        "title"
    } else {
        "mixed"
    }
}

fn affix(chars: &[char], n: usize, from_end: bool) -> String {
    let n = n.min(chars.len());
    if from_end {
        chars[chars.len() - n..].iter().collect()
    } else {
        chars[..n].iter().collect()
    }
}

fn token_features(out: &mut FeatureVector, prefix: &str, surface: &str) {
    let chars: Vec<char> = surface.chars().collect();
    let len = chars.len().max(1) as f64;
    out.push(format!("{prefix}prefix2={}", affix(&chars, 2, false)), 1.0);
    out.push(format!("{prefix}prefix3={}", affix(&chars, 3, false)), 1.0);
    out.push(format!("{prefix}suffix2={}", affix(&chars, 2, true)), 1.0);
    out.push(format!("{prefix}suffix3={}", affix(&chars, 3, true)), 1.0);
    out.push(format!("{prefix}len={}", chars.len()), 1.0);
    out.flag(format!("{prefix}is_alpha"), !chars.is_empty() && chars.iter().all(|c| c.is_alphabetic()));
    out.flag(format!("{prefix}is_number"), is_number(surface));
    out.flag(format!("{prefix}is_punct"), !chars.is_empty() && chars.iter().all(|&c| is_punct_char(c)));
    out.flag(format!("{prefix}contains_at"), surface.contains('@'));
    out.push(format!("{prefix}casing={}", casing(surface)), 1.0);
    let ratio = |pred: &dyn Fn(char) -> bool| chars.iter().filter(|&&c| pred(c)).count() as f64 / len;
    for (name, r) in [
        ("upper_ratio", ratio(&|c| c.is_uppercase())),
        ("digit_ratio", ratio(&|c| c.is_numeric())),
        ("punct_ratio", ratio(&is_punct_char)),
    ] {
        if r > 0.0 {
            out.push(format!("{prefix}{name}"), r);
        }
    }
}

/// Features of token `index` for the given context offsets.
pub fn extract_features(sentence: &Sentence, index: usize, window: &[i32]) -> Result<FeatureVector> {
    let n = sentence.len();
    if index >= n {
        return Err(Error::IndexOutOfRange { index, len: n });
    }
    let mut out = FeatureVector::default();
    out.push("bias".into(), 1.0);
    out.push(format!("sent_len={n}"), 1.0);
    out.flag("BOS".into(), index == 0);
    out.flag("EOS".into(), index + 1 == n);
    for &offset in window {
        let pos = index as i64 + offset as i64;
        if pos < 0 || pos >= n as i64 {
            continue;
        }
        let tok = &sentence.tokens[pos as usize];
        let prefix = if offset == 0 { String::new() } else { format!("{offset:+}:") };
        token_features(&mut out, &prefix, &tok.surface);
        let f = &tok.features;
        for (key, value) in [("lemma", &f.lemma), ("pos", &f.pos), ("ner", &f.ner)] {
            if let Some(v) = value {
                out.push(format!("{prefix}{key}={v}"), 1.0);
            }
        }
    }
    Ok(out)
}
