//! Regular-expression detectors for Date, Time, Age and Doctor.
//!
//! Each detector looks at the token window starting at a trigger position
//! and returns the matched token range `[start, end)`.

use std::collections::BTreeMap;

use regex::Regex;

use crate::error::{Error, Result};

pub(crate) const DEFAULT_PATTERNS: &str = include_str!("../../resources/rules/patterns.txt");

const REQUIRED_KEYS: &[&str] = &[
    "date.numeric",
    "date.day",
    "date.month",
    "date.year",
    "date.of",
    "date.joiner",
    "time.clock",
    "time.hour",
    "time.unit",
    "age.number",
    "age.unit",
    "age.and",
    "age.fraction",
    "doctor.honorific",
    "doctor.article",
    "name.capitalized",
];

/// Named token regexes used by the detectors.
#[derive(Debug, Clone)]
pub struct PatternInventory {
    source: String,
    patterns: BTreeMap<String, Regex>,
}

impl PatternInventory {
    pub fn parse(source: &str) -> Result<Self> {
        let mut patterns = BTreeMap::new();
        for (n, line) in source.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, re) = line.split_once('=').ok_or_else(|| Error::MalformedLine {
                line: n + 1,
                reason: "expected `key = regex`".into(),
            })?;
            patterns.insert(key.trim().to_string(), Regex::new(re.trim())?);
        }
        if let Some(missing) = REQUIRED_KEYS.iter().find(|k| !patterns.contains_key(**k)) {
            return Err(Error::InvalidConfig(format!("pattern inventory lacks `{missing}`")));
        }
        Ok(Self {
            source: source.to_string(),
            patterns,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    fn is(&self, key: &str, token: Option<&&str>) -> bool {
        token.is_some_and(|t| self.patterns[key].is_match(t))
    }
}

impl Default for PatternInventory {
    fn default() -> Self {
        Self::parse(DEFAULT_PATTERNS).expect("shipped patterns are valid")
    }
}

/// Detector switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchOptions {
    /// Maximum number of capitalized name tokens after a trigger.
    pub window: usize,
    /// Keep "Dr"/"Dra" inside Doctor spans.
    pub include_honorific: bool,
    /// Extend Doctor spans leftward over a preceding "el"/"la".
    pub include_article: bool,
    /// Accept "y medio" / "y N meses" after an age.
    pub extended_age: bool,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            window: 3,
            include_honorific: true,
            include_article: true,
            extended_age: true,
        }
    }
}

pub type TokenRange = (usize, usize);

/// `d/m/y`, `d de mes [de año]`, `mes de año`, and a bare day that is
/// coordinated with a following full date ("15 y 22 de junio").
pub fn match_date(tokens: &[&str], i: usize, inv: &PatternInventory) -> Option<TokenRange> {
    let at = |k: usize| tokens.get(k);
    if inv.is("date.numeric", at(i)) {
        return Some((i, i + 1));
    }
    if let Some(end) = day_month(tokens, i, inv) {
        return Some((i, end));
    }
    if inv.is("date.month", at(i)) && inv.is("date.of", at(i + 1)) && inv.is("date.year", at(i + 2)) {
        return Some((i, i + 3));
    }
    if inv.is("date.day", at(i)) && inv.is("date.joiner", at(i + 1)) {
        let mut j = i + 2;
        while j < tokens.len() {
            if day_month(tokens, j, inv).is_some() {
                return Some((i, i + 1));
            }
            if inv.is("date.day", at(j)) && inv.is("date.joiner", at(j + 1)) {
                j += 2;
            } else {
                break;
            }
        }
    }
    None
}

fn day_month(tokens: &[&str], i: usize, inv: &PatternInventory) -> Option<usize> {
    let at = |k: usize| tokens.get(k);
    if !(inv.is("date.day", at(i)) && inv.is("date.of", at(i + 1)) && inv.is("date.month", at(i + 2))) {
        return None;
    }
    if inv.is("date.of", at(i + 3)) && inv.is("date.year", at(i + 4)) {
        Some(i + 5)
    } else {
        Some(i + 3)
    }
}

/// `hh:mm [h]` or `hh horas`.
pub fn match_time(tokens: &[&str], i: usize, inv: &PatternInventory) -> Option<TokenRange> {
    let at = |k: usize| tokens.get(k);
    if inv.is("time.clock", at(i)) {
        let end = if inv.is("time.unit", at(i + 1)) { i + 2 } else { i + 1 };
        return Some((i, end));
    }
    if inv.is("time.hour", at(i)) && inv.is("time.unit", at(i + 1)) {
        return Some((i, i + 2));
    }
    None
}

/// `N años|meses|días`, optionally followed by "y medio" or "y N <unit>".
pub fn match_age(tokens: &[&str], i: usize, inv: &PatternInventory, opts: &MatchOptions) -> Option<TokenRange> {
    let at = |k: usize| tokens.get(k);
    if !(inv.is("age.number", at(i)) && inv.is("age.unit", at(i + 1))) {
        return None;
    }
    let mut end = i + 2;
    if opts.extended_age && inv.is("age.and", at(end)) {
        if inv.is("age.fraction", at(end + 1)) {
            end += 2;
        } else if inv.is("age.number", at(end + 1)) && inv.is("age.unit", at(end + 2)) {
            end += 3;
        }
    }
    Some((i, end))
}

/// `[el|la] Dr|Dra [.] Name{1,window}`, triggered at the honorific.
pub fn match_doctor(tokens: &[&str], i: usize, inv: &PatternInventory, opts: &MatchOptions) -> Option<TokenRange> {
    let at = |k: usize| tokens.get(k);
    if !inv.is("doctor.honorific", at(i)) {
        return None;
    }
    let mut j = i + 1;
    if at(j) == Some(&".") {
        j += 1;
    }
    let names_start = j;
    while j < tokens.len() && j - names_start < opts.window && inv.is("name.capitalized", at(j)) {
        j += 1;
    }
    if j == names_start {
        return None;
    }
    let start = if !opts.include_honorific {
        names_start
    } else if opts.include_article && i > 0 && inv.is("doctor.article", at(i - 1)) {
        i - 1
    } else {
        i
    };
    Some((start, j))
}

/// Capitalized tokens following position `i`, at most `window` of them.
pub(crate) fn capitalized_run(tokens: &[&str], i: usize, inv: &PatternInventory, window: usize) -> usize {
    let mut j = i;
    while j < tokens.len() && j - i < window && inv.is("name.capitalized", tokens.get(j)) {
        j += 1;
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv() -> PatternInventory {
        PatternInventory::default()
    }

    fn toks(s: &str) -> Vec<&str> {
        s.split(' ').collect()
    }

    #[test]
    fn numeric_and_textual_dates() {
        let inv = inv();
        assert_eq!(match_date(&toks("12/01/2016"), 0, &inv), Some((0, 1)));
        assert_eq!(match_date(&toks("el 3-5-19 ."), 1, &inv), Some((1, 2)));
        assert_eq!(match_date(&toks("22 de junio )"), 0, &inv), Some((0, 3)));
        assert_eq!(match_date(&toks("22 de junio de 2016"), 0, &inv), Some((0, 5)));
        assert_eq!(match_date(&toks("marzo de 2015"), 0, &inv), Some((0, 3)));
        assert_eq!(match_date(&toks("marzo pasado"), 0, &inv), None);
        assert_eq!(match_date(&toks("40 de junio"), 0, &inv), None);
    }

    #[test]
    fn coordinated_day_is_a_date() {
        let t = toks("control ( 15 y 22 de junio )");
        let inv = inv();
        assert_eq!(match_date(&t, 2, &inv), Some((2, 3)));
        assert_eq!(match_date(&t, 4, &inv), Some((4, 7)));
        assert_eq!(match_date(&toks("15 y 20 mg"), 0, &inv), None);
        assert_eq!(match_date(&toks("1 , 2 y 3 de mayo"), 0, &inv), Some((0, 1)));
    }

    #[test]
    fn times() {
        let inv = inv();
        assert_eq!(match_time(&toks("10:30"), 0, &inv), Some((0, 1)));
        assert_eq!(match_time(&toks("10:30 h"), 0, &inv), Some((0, 2)));
        assert_eq!(match_time(&toks("8 horas"), 0, &inv), Some((0, 2)));
        assert_eq!(match_time(&toks("25:00"), 0, &inv), None);
        assert_eq!(match_time(&toks("8 mg"), 0, &inv), None);
    }

    #[test]
    fn ages_with_qualifier() {
        let inv = inv();
        let t = toks("Niño de 4 años y medio");
        let on = MatchOptions::default();
        let off = MatchOptions { extended_age: false, ..on };
        assert_eq!(match_age(&t, 2, &inv, &on), Some((2, 6)));
        assert_eq!(match_age(&t, 2, &inv, &off), Some((2, 4)));
        assert_eq!(match_age(&toks("64 años"), 0, &inv, &on), Some((0, 2)));
        assert_eq!(match_age(&toks("2 años y 3 meses"), 0, &inv, &on), Some((0, 5)));
        assert_eq!(match_age(&toks("64 kg"), 0, &inv, &on), None);
    }

    #[test]
    fn doctor_with_article_and_honorific() {
        let inv = inv();
        let t = toks("por la Dra Lopez");
        let on = MatchOptions::default();
        assert_eq!(match_doctor(&t, 2, &inv, &on), Some((1, 4)));
        let no_article = MatchOptions { include_article: false, ..on };
        assert_eq!(match_doctor(&t, 2, &inv, &no_article), Some((2, 4)));
        let no_honorific = MatchOptions { include_honorific: false, ..on };
        assert_eq!(match_doctor(&t, 2, &inv, &no_honorific), Some((3, 4)));
        assert_eq!(match_doctor(&toks("Dr . García Pérez"), 0, &inv, &on), Some((0, 4)));
        assert_eq!(match_doctor(&toks("Dra sin nombre"), 0, &inv, &on), None);
    }

    #[test]
    fn window_caps_name_length() {
        let inv = inv();
        let opts = MatchOptions { window: 2, ..MatchOptions::default() };
        assert_eq!(match_doctor(&toks("Dr Uno Dos Tres"), 0, &inv, &opts), Some((0, 3)));
    }

    #[test]
    fn inventory_requires_all_keys() {
        assert!(PatternInventory::parse("date.numeric = ^x$").is_err());
        assert!(PatternInventory::parse("nonsense").is_err());
    }
}
