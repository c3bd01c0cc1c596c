use std::collections::BTreeMap;

use chrono::{Datelike, Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use sha2::{Digest, Sha256};

use super::{placeholder, AnonymisationPolicy};
use crate::corpus::{Annotation, Document, LabelSet};
use crate::error::{Error, Result};
use crate::synth::{name_pools, vocab};

/// Replacement values per category plus the name lists.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogatePools {
    pub female_names: Vec<String>,
    pub male_names: Vec<String>,
    pub surnames: Vec<String>,
    pub categories: BTreeMap<String, Vec<String>>,
}

impl SurrogatePools {
    /// No pools: every sampled category falls back to a placeholder.
    pub fn empty() -> Self {
        Self {
            female_names: Vec::new(),
            male_names: Vec::new(),
            surnames: Vec::new(),
            categories: BTreeMap::new(),
        }
    }

    /// Adds every annotated surface of `docs` to its category's pool.
    pub fn extend_from_documents(&mut self, docs: &[Document]) {
        for a in docs.iter().flat_map(|d| &d.annotations) {
            if matches!(a.category.as_str(), "Date" | "Time" | "Age" | "Doctor" | "Patient" | "Other") {
                continue;
            }
            let pool = self.categories.entry(a.category.clone()).or_default();
            if !pool.contains(&a.surface) {
                pool.push(a.surface.clone());
            }
        }
    }
}

impl SurrogatePools {
    fn shipped() -> Self {
        let (female_names, male_names, surnames) = name_pools();
        let mut categories = BTreeMap::new();
        let hospitals = vocab::HOSPITAL_HEADS
            .iter()
            .flat_map(|h| vocab::HOSPITAL_NAMES.iter().map(move |n| format!("{h} {n}")))
            .collect();
        categories.insert("Hospital".to_string(), hospitals);
        let own = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        categories.insert("Location".to_string(), own(vocab::LOCATIONS));
        categories.insert("Job".to_string(), own(vocab::JOBS));
        categories.insert("Kinship".to_string(), own(vocab::KINSHIP));
        categories.insert("Sex".to_string(), own(vocab::SEX_FIELD));
        Self {
            female_names,
            male_names,
            surnames,
            categories,
        }
    }
}

/// Shipped name lists and category vocabularies.
pub fn default_pools() -> SurrogatePools {
    SurrogatePools::shipped()
}

fn is_upper_initial(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
}

fn match_case(template: &str, word: &str) -> String {
    if is_upper_initial(template) {
        let mut c = word.chars();
        c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
    } else {
        word.to_string()
    }
}

fn month_index(word: &str) -> Option<usize> {
    let w = word.to_lowercase();
    let w = if w == "setiembre" { "septiembre".to_string() } else { w };
    vocab::MONTHS.iter().position(|m| *m == w)
}

fn pad(value: u32, like: &str) -> String {
    format!("{value:0width$}", width = like.len())
}

/// Shifts a date expression by `days`, keeping its textual format: field
/// widths and separators of numeric dates, month-name capitalisation of
/// written ones. Partial dates (month only, year only, bare day) shift the
/// part they carry. Returns `None` for strings it cannot read.
pub fn shift_date(surface: &str, days: i64) -> Option<String> {
    let numeric = Regex::new(r"^(\d{1,2})([/.-])(\d{1,2})(?:([/.-])(\d{2}|\d{4}))?$").unwrap();
    if let Some(c) = numeric.captures(surface) {
        let (d, sep, m) = (&c[1], &c[2], &c[3]);
        let year_str = c.get(5).map(|y| y.as_str());
        if c.get(4).is_some_and(|s| s.as_str() != sep) {
            return None;
        }
        let year = match year_str {
            Some(y) if y.len() == 2 => {
                let v: i32 = y.parse().ok()?;
                if v < 50 {
                    2000 + v
                } else {
                    1900 + v
                }
            }
            Some(y) => y.parse().ok()?,
            None => 2000,
        };
        let date = NaiveDate::from_ymd_opt(year, m.parse().ok()?, d.parse().ok()?)? + Duration::days(days);
        let mut out = format!("{}{sep}{}", pad(date.day(), d), pad(date.month(), m));
        if let Some(y) = year_str {
            let yv = if y.len() == 2 { date.year().rem_euclid(100) } else { date.year() };
            out.push_str(&format!("{sep}{yv:0width$}", width = y.len()));
        }
        return Some(out);
    }
    let written = Regex::new(r"^(\d{1,2}) (de) (\p{L}+)(?: (de|del) (\d{4}))?$").unwrap();
    if let Some(c) = written.captures(surface) {
        let mi = month_index(&c[3])?;
        let year: i32 = c.get(5).map_or(Some(2000), |y| y.as_str().parse().ok())?;
        let date = NaiveDate::from_ymd_opt(year, mi as u32 + 1, c[1].parse().ok()?)? + Duration::days(days);
        let month = match_case(&c[3], vocab::MONTHS[date.month0() as usize]);
        let mut out = format!("{} {} {month}", date.day(), &c[2]);
        if let Some(of) = c.get(4) {
            out.push_str(&format!(" {} {}", of.as_str(), date.year()));
        }
        return Some(out);
    }
    let month_year = Regex::new(r"^(\p{L}+) (de|del) (\d{4})$").unwrap();
    if let Some(c) = month_year.captures(surface) {
        let mi = month_index(&c[1])?;
        let date = NaiveDate::from_ymd_opt(c[3].parse().ok()?, mi as u32 + 1, 15)? + Duration::days(days);
        let month = match_case(&c[1], vocab::MONTHS[date.month0() as usize]);
        return Some(format!("{month} {} {}", &c[2], date.year()));
    }
    if let Some(mi) = month_index(surface) {
        let date = NaiveDate::from_ymd_opt(2001, mi as u32 + 1, 15)? + Duration::days(days);
        return Some(match_case(surface, vocab::MONTHS[date.month0() as usize]));
    }
    if surface.len() == 4 && surface.chars().all(|c| c.is_ascii_digit()) {
        let date = NaiveDate::from_ymd_opt(surface.parse().ok()?, 7, 1)? + Duration::days(days);
        return Some(date.year().to_string());
    }
    if (1..=2).contains(&surface.len()) && surface.chars().all(|c| c.is_ascii_digit()) {
        let date = NaiveDate::from_ymd_opt(2001, 1, surface.parse().ok()?)? + Duration::days(days);
        return Some(pad(date.day(), surface));
    }
    None
}

fn number_word_value(w: &str) -> Option<i64> {
    vocab::NUMBER_WORDS
        .iter()
        .position(|n| *n == w.to_lowercase())
        .map(|i| 20 + 10 * i as i64)
}

/// Adds `years` to the first number in an age expression, keeping the
/// rest ("64 años" → "59 años" for −5). Written tens become digits.
pub fn shift_age(surface: &str, years: i64) -> Option<String> {
    let digits = Regex::new(r"\d+").unwrap();
    if let Some(m) = digits.find(surface) {
        let v: i64 = m.as_str().parse().ok()?;
        let shifted = (v + years).max(1);
        return Some(format!("{}{shifted}{}", &surface[..m.start()], &surface[m.end()..]));
    }
    let (first, rest) = surface.split_once(' ').unwrap_or((surface, ""));
    let v = number_word_value(first)?;
    let shifted = (v + years).max(1);
    Some(if rest.is_empty() { shifted.to_string() } else { format!("{shifted} {rest}") })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Gender {
    Female,
    Male,
}

/// Per-document surrogate generator. The date shift is drawn once per
/// document from a seed mixing the policy seed with a hash of the id.
pub struct Surrogator<'a> {
    rng: ChaCha8Rng,
    policy: &'a AnonymisationPolicy,
    pools: &'a SurrogatePools,
    date_shift: i64,
}

fn doc_seed(seed: u64, doc_id: &str) -> u64 {
    let h = Sha256::digest(doc_id.as_bytes());
    seed ^ u64::from_le_bytes(h[..8].try_into().expect("8 bytes"))
}

impl<'a> Surrogator<'a> {
    pub fn for_document(doc_id: &str, policy: &'a AnonymisationPolicy, pools: &'a SurrogatePools) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(doc_seed(policy.surrogate_seed, doc_id));
        let (lo, hi) = policy.date_shift_days;
        let date_shift = if lo >= hi { lo } else { rng.gen_range(lo..=hi) };
        Self {
            rng,
            policy,
            pools,
            date_shift,
        }
    }

    pub fn date_shift(&self) -> i64 {
        self.date_shift
    }

    fn fallback(&self, a: &Annotation) -> String {
        placeholder(&a.category, a.len(), self.policy.placeholder_format.as_deref())
    }

    fn sample_other<'p>(&mut self, pool: &'p [String], avoid: &[&str]) -> Option<&'p str> {
        let allowed: Vec<&String> = pool
            .iter()
            .filter(|p| !avoid.iter().any(|a| a.to_lowercase() == p.to_lowercase()))
            .collect();
        if allowed.is_empty() {
            return None;
        }
        Some(allowed[self.rng.gen_range(0..allowed.len())].as_str())
    }

    fn time(&mut self, surface: &str) -> Option<String> {
        let clock = Regex::new(r"^(\d{1,2}):(\d{2})(.*)$").unwrap();
        if let Some(c) = clock.captures(surface) {
            let h = self.rng.gen_range(0..24u32);
            let m = self.rng.gen_range(0..60u32);
            return Some(format!("{}:{m:02}{}", pad(h, &c[1]), &c[3]));
        }
        let hour = Regex::new(r"^(\d{1,2})(\s.*)?$").unwrap();
        let c = hour.captures(surface)?;
        let h = self.rng.gen_range(1..24u32);
        Some(format!("{h}{}", c.get(2).map_or("", |m| m.as_str())))
    }

    fn name(&mut self, a: &Annotation) -> Option<String> {
        let tokens: Vec<&str> = a.surface.split_whitespace().collect();
        let mut i = 0;
        let article = tokens.first().filter(|t| matches!(t.to_lowercase().as_str(), "el" | "la")).copied();
        let mut gender = article.map(|t| if t.eq_ignore_ascii_case("la") { Gender::Female } else { Gender::Male });
        i += usize::from(article.is_some());
        let honorific = tokens.get(i).filter(|t| {
            let t = t.trim_end_matches('.').to_lowercase();
            t == "dr" || t == "dra"
        });
        if let Some(h) = honorific {
            gender = gender.or(Some(if h.trim_end_matches('.').to_lowercase() == "dra" {
                Gender::Female
            } else {
                Gender::Male
            }));
            i += 1;
        }
        let names = &tokens[i..];
        let mut given_first = false;
        if a.category == "Patient" && honorific.is_none() {
            if let Some(first) = names.first() {
                if self.pools.female_names.iter().any(|n| n.split(' ').next() == Some(first)) {
                    given_first = true;
                    gender = gender.or(Some(Gender::Female));
                } else if self.pools.male_names.iter().any(|n| n.split(' ').next() == Some(first)) {
                    given_first = true;
                    gender = gender.or(Some(Gender::Male));
                }
            }
        }
        let gender = gender.unwrap_or(if self.rng.gen_bool(0.5) { Gender::Female } else { Gender::Male });

        let mut out: Vec<String> = Vec::new();
        if let Some(art) = article {
            out.push(match_case(art, if gender == Gender::Female { "la" } else { "el" }));
        }
        if let Some(h) = honorific {
            let dot = if h.ends_with('.') { "." } else { "" };
            out.push(format!("{}{dot}", if gender == Gender::Female { "Dra" } else { "Dr" }));
        }
        for (k, _) in names.iter().enumerate() {
            let pool = if k == 0 && given_first {
                if gender == Gender::Female {
                    &self.pools.female_names
                } else {
                    &self.pools.male_names
                }
            } else {
                &self.pools.surnames
            };
            let pool = pool.clone();
            out.push(self.sample_other(&pool, names)?.to_string());
        }
        if names.is_empty() {
            let pool = self.pools.surnames.clone();
            out.push(self.sample_other(&pool, &[])?.to_string());
        }
        Some(out.join(" "))
    }

    /// Replacement for one annotation whose `surface` holds the original.
    pub fn surrogate(&mut self, a: &Annotation) -> Result<String> {
        let s = a.surface.as_str();
        let value = match a.category.as_str() {
            "Date" => shift_date(s, self.date_shift),
            "Age" => {
                let (lo, hi) = self.policy.age_shift_years;
                let shift = if lo >= hi { lo } else { self.rng.gen_range(lo..=hi) };
                shift_age(s, shift)
            }
            "Time" => self.time(s),
            "Doctor" | "Patient" => self.name(a),
            "Other" => None,
            cat => match self.pools.categories.get(cat) {
                Some(pool) => self.sample_other(pool, &[s]).map(|v| match_case(s, v)),
                None if LabelSet::nubes().contains(cat) => None,
                None => return Err(Error::UnknownCategory(cat.to_string())),
            },
        };
        Ok(value.unwrap_or_else(|| self.fallback(a)))
    }
}

impl Default for SurrogatePools {
    fn default() -> Self {
        Self::shipped()
    }
}
