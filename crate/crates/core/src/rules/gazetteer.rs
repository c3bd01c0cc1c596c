use std::collections::BTreeSet;

use crate::corpus::tokenize;

/// Case-folded multi-token phrases with longest-match lookup.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gazetteer {
    entries: BTreeSet<Vec<String>>,
    max_phrase_len: usize,
}

/// Lowercases without touching accents: "Clínica" → "clínica".
pub(crate) fn fold(token: &str) -> String {
    token.to_lowercase()
}

impl Gazetteer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a phrase, tokenized the same way as running text.
    pub fn insert(&mut self, phrase: &str) {
        let toks: Vec<String> = tokenize(phrase).iter().map(|t| fold(&t.surface)).collect();
        if toks.is_empty() {
            return;
        }
        self.max_phrase_len = self.max_phrase_len.max(toks.len());
        self.entries.insert(toks);
    }

    pub fn contains(&self, phrase: &str) -> bool {
        let toks: Vec<String> = tokenize(phrase).iter().map(|t| fold(&t.surface)).collect();
        self.entries.contains(&toks)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_phrase_len(&self) -> usize {
        self.max_phrase_len
    }

    /// Entries as space-joined phrases, sorted.
    pub fn phrases(&self) -> impl Iterator<Item = String> + '_ {
        self.entries.iter().map(|e| e.join(" "))
    }

    /// End of the longest entry starting at `i` over already-folded tokens.
    pub fn longest_match(&self, folded: &[String], i: usize) -> Option<usize> {
        let max = self.max_phrase_len.min(folded.len().saturating_sub(i));
        (1..=max).rev().find_map(|n| self.entries.contains(&folded[i..i + n]).then_some(i + n))
    }
}

impl<S: AsRef<str>> FromIterator<S> for Gazetteer {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut g = Gazetteer::new();
        for p in iter {
            g.insert(p.as_ref());
        }
        g
    }
}
