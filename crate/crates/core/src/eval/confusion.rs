use serde::{Deserialize, Serialize};

use crate::corpus::BioLabel;
use crate::error::{Error, Result};

/// Token confusion counts over the categories plus `O` (last row and
/// column). Rows are gold, columns predicted; B/I prefixes are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn new(categories: &[String]) -> Self {
        let mut classes = categories.to_vec();
        classes.push("O".into());
        let n = classes.len();
        Self {
            classes,
            counts: vec![vec![0; n]; n],
        }
    }

    fn index(&self, label: &BioLabel) -> Result<usize> {
        let name = label.category().unwrap_or("O");
        self.classes
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownCategory(name.to_string()))
    }

    pub fn add(&mut self, gold: &[BioLabel], pred: &[BioLabel]) -> Result<()> {
        if gold.len() != pred.len() {
            return Err(Error::LengthMismatch {
                gold: gold.len(),
                pred: pred.len(),
            });
        }
        for (g, p) in gold.iter().zip(pred) {
            let (r, c) = (self.index(g)?, self.index(p)?);
            self.counts[r][c] += 1;
        }
        Ok(())
    }

    pub fn row_total(&self, row: usize) -> usize {
        self.counts[row].iter().sum()
    }

    /// Row-normalised view in hundredths, rounded half-up; `None` for rows
    /// with no gold tokens. When per-cell rounding drifts a row more than
    /// one hundredth from 1.00, the cells with the largest rounding loss
    /// (or gain) are adjusted until it is within one hundredth.
    pub fn normalized_cents(&self) -> Vec<Option<Vec<u64>>> {
        (0..self.classes.len())
            .map(|r| {
                let t = self.row_total(r) as u64;
                if t == 0 {
                    return None;
                }
                let row = &self.counts[r];
                let mut cents: Vec<u64> = row.iter().map(|&c| (200 * c as u64 + t) / (2 * t)).collect();
                // Residual in units of 1/(100 t): exact minus rounded.
                let mut resid: Vec<i64> = row
                    .iter()
                    .zip(&cents)
                    .map(|(&c, &k)| 100 * c as i64 - (k * t) as i64)
                    .collect();
                loop {
                    let sum: i64 = cents.iter().sum::<u64>() as i64;
                    if (sum - 100).abs() <= 1 {
                        break;
                    }
                    let step: i64 = if sum < 100 { 1 } else { -1 };
                    let pick = (0..cents.len())
                        .filter(|&i| step > 0 || cents[i] > 0)
                        .max_by_key(|&i| (resid[i] * step, std::cmp::Reverse(i)))
                        .expect("row has a nonzero cell");
                    cents[pick] = (cents[pick] as i64 + step) as u64;
                    resid[pick] -= step * t as i64;
                }
                Some(cents)
            })
            .collect()
    }

    /// Tab-separated normalised matrix with two decimals. Rows without
    /// gold tokens are omitted.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("gold\\pred");
        for c in &self.classes {
            out.push('\t');
            out.push_str(c);
        }
        out.push('\n');
        for (r, row) in self.normalized_cents().into_iter().enumerate() {
            let Some(row) = row else { continue };
            out.push_str(&self.classes[r]);
            for v in row {
                out.push_str(&format!("\t{}.{:02}", v / 100, v % 100));
            }
            out.push('\n');
        }
        out
    }

    /// Tab-separated raw counts, every row.
    pub fn counts_tsv(&self) -> String {
        let mut out = String::from("gold\\pred");
        for c in &self.classes {
            out.push('\t');
            out.push_str(c);
        }
        out.push('\n');
        for (name, row) in self.classes.iter().zip(&self.counts) {
            out.push_str(name);
            for v in row {
                out.push_str(&format!("\t{v}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn confusion_matrix(gold: &[BioLabel], pred: &[BioLabel], categories: &[String]) -> Result<ConfusionMatrix> {
    let mut m = ConfusionMatrix::new(categories);
    m.add(gold, pred)?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(s: &str) -> Vec<BioLabel> {
        s.split_whitespace().map(|l| l.parse().unwrap()).collect()
    }

    fn cats() -> Vec<String> {
        vec!["Date".into(), "Age".into(), "Other".into()]
    }

    #[test]
    fn perfect_is_identity() {
        let g = labels("B-Date I-Date O B-Age B-Other");
        let m = confusion_matrix(&g, &g, &cats()).unwrap();
        for (r, row) in m.normalized_cents().into_iter().enumerate() {
            let row = row.unwrap();
            for (c, v) in row.into_iter().enumerate() {
                assert_eq!(v, if r == c { 100 } else { 0 });
            }
        }
    }

    #[test]
    fn other_fully_leaked() {
        let g = labels("B-Other I-Other B-Other");
        let p = labels("O O O");
        let m = confusion_matrix(&g, &p, &cats()).unwrap();
        let rows = m.normalized_cents();
        assert_eq!(rows[2].as_ref().unwrap(), &vec![0, 0, 0, 100]);
        assert!(rows[0].is_none());
        assert!(m.to_tsv().contains("Other\t0.00\t0.00\t0.00\t1.00"));
    }

    #[test]
    fn hand_counted_ten_tokens() {
        let g = labels("B-Date I-Date I-Date B-Age I-Age O O O B-Other O");
        let p = labels("B-Date I-Date O B-Date I-Age O B-Age O O O");
        let m = confusion_matrix(&g, &p, &cats()).unwrap();
        // rows: Date, Age, Other, O ; cols: Date, Age, Other, O
        assert_eq!(m.counts[0], vec![2, 0, 0, 1]);
        assert_eq!(m.counts[1], vec![1, 1, 0, 0]);
        assert_eq!(m.counts[2], vec![0, 0, 0, 1]);
        assert_eq!(m.counts[3], vec![0, 1, 0, 3]);
        let rows = m.normalized_cents();
        assert_eq!(rows[0].as_ref().unwrap(), &vec![67, 0, 0, 33]);
        assert_eq!(rows[1].as_ref().unwrap(), &vec![50, 50, 0, 0]);
        assert_eq!(rows[3].as_ref().unwrap(), &vec![0, 25, 0, 75]);
    }

    #[test]
    fn rounding_drift_is_bounded() {
        // Seven equal cells: 14.2857 each rounds to 14, summing to 98.
        let mut m = ConfusionMatrix::new(&(0..6).map(|i| format!("C{i}")).collect::<Vec<_>>());
        m.counts[0] = vec![1; 7];
        let row = m.normalized_cents()[0].clone().unwrap();
        let sum: u64 = row.iter().sum();
        assert!((99..=101).contains(&sum), "{row:?}");
    }

    #[test]
    fn unknown_category() {
        assert!(confusion_matrix(&labels("B-Job"), &labels("O"), &cats()).is_err());
    }
}
