//! Kruskal-Wallis testing and the per-algorithm comparison table.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Significance level: an algorithm is tied with the best when the test's
/// p-value exceeds it.
pub const SIGNIFICANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallis {
    pub h: f64,
    pub p_value: f64,
}

/// Rank-based H statistic with average ranks for ties and tie correction;
/// the p-value is the chi-squared survival function with `k - 1` degrees
/// of freedom.
pub fn kruskal_wallis<G: AsRef<[f64]>>(groups: &[G]) -> Result<KruskalWallis> {
    if groups.len() < 2 || groups.iter().any(|g| g.as_ref().is_empty()) {
        return Err(Error::Contract(
            "Kruskal-Wallis needs at least two non-empty groups".into(),
        ));
    }
    let mut pooled: Vec<(f64, usize)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, values)| values.as_ref().iter().map(move |&v| (v, g)))
        .collect();
    let n = pooled.len();
    if n < 3 {
        return Err(Error::Contract(
            "Kruskal-Wallis needs at least three values".into(),
        ));
    }
    if pooled.iter().any(|(v, _)| v.is_nan()) {
        return Err(Error::Contract("Kruskal-Wallis input contains NaN".into()));
    }
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut rank_sums = vec![0.0; groups.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let t = (j - i) as f64;
        let average = (i + j + 1) as f64 / 2.0;
        for &(_, g) in &pooled[i..j] {
            rank_sums[g] += average;
        }
        tie_term += t * t * t - t;
        i = j;
    }

    let nf = n as f64;
    let correction = 1.0 - tie_term / (nf * nf * nf - nf);
    if correction <= 0.0 {
        return Ok(KruskalWallis {
            h: 0.0,
            p_value: 1.0,
        });
    }
    let sum: f64 = groups
        .iter()
        .zip(&rank_sums)
        .map(|(g, r)| r * r / g.as_ref().len() as f64)
        .sum();
    let h = ((12.0 / (nf * (nf + 1.0)) * sum - 3.0 * (nf + 1.0)) / correction).max(0.0);
    let df = (groups.len() - 1) as f64;
    let chi = ChiSquared::new(df).map_err(|e| Error::Contract(e.to_string()))?;
    Ok(KruskalWallis {
        h,
        p_value: chi.sf(h),
    })
}

/// Per-run indicator values of one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorBatch {
    pub algorithm: String,
    pub run_seeds: Vec<u64>,
    pub hypervolume: Vec<f64>,
    pub igd_plus: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub algorithm: String,
    pub mean: f64,
    pub std: f64,
    pub max: f64,
    pub best: bool,
    /// Statistically indistinguishable from the best.
    pub tied: bool,
    /// Pairwise p-value against the best; absent on the best row and when
    /// the pair holds fewer than three runs.
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorTable {
    pub indicator: String,
    pub higher_is_better: bool,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub significance: f64,
    pub tables: Vec<IndicatorTable>,
}

fn summarize(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (mean, std, max)
}

fn table(
    indicator: &str,
    higher_is_better: bool,
    batches: &[IndicatorBatch],
    values: impl Fn(&IndicatorBatch) -> &[f64],
) -> Result<IndicatorTable> {
    let stats: Vec<(f64, f64, f64)> = batches.iter().map(|b| summarize(values(b))).collect();
    let mut best = 0;
    for (i, s) in stats.iter().enumerate() {
        let better = if higher_is_better {
            s.0 > stats[best].0
        } else {
            s.0 < stats[best].0
        };
        if better {
            best = i;
        }
    }
    let mut rows = Vec::with_capacity(batches.len());
    for (i, (b, &(mean, std, max))) in batches.iter().zip(&stats).enumerate() {
        let pair = [values(&batches[best]), values(b)];
        let p_value = if i == best || pair[0].len() + pair[1].len() < 3 {
            None
        } else {
            Some(kruskal_wallis(&pair)?.p_value)
        };
        rows.push(Row {
            algorithm: b.algorithm.clone(),
            mean,
            std,
            max,
            best: i == best,
            tied: p_value.is_some_and(|p| p > SIGNIFICANCE),
            p_value,
        });
    }
    Ok(IndicatorTable {
        indicator: indicator.to_string(),
        higher_is_better,
        rows,
    })
}

/// Mean, sample standard deviation and maximum of each indicator per
/// algorithm; the best mean is marked and every other algorithm is tested
/// against it pairwise.
pub fn compare_algorithms(batches: &[IndicatorBatch]) -> Result<Comparison> {
    if batches.is_empty() {
        return Err(Error::Contract("no batches to compare".into()));
    }
    for b in batches {
        if b.hypervolume.is_empty() || b.hypervolume.len() != b.igd_plus.len() {
            return Err(Error::Contract(format!(
                "batch {} needs one hypervolume and one IGD+ value per run",
                b.algorithm
            )));
        }
    }
    Ok(Comparison {
        significance: SIGNIFICANCE,
        tables: vec![
            table("hypervolume", true, batches, |b| &b.hypervolume)?,
            table("igd_plus", false, batches, |b| &b.igd_plus)?,
        ],
    })
}

impl Comparison {
    pub fn table(&self, indicator: &str) -> Option<&IndicatorTable> {
        self.tables.iter().find(|t| t.indicator == indicator)
    }

    /// Markdown rendering: one section per indicator with mean, std and
    /// max rows and one column per algorithm.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        for t in &self.tables {
            let title = match t.indicator.as_str() {
                "hypervolume" => "Hypervolume",
                "igd_plus" => "IGD+",
                other => other,
            };
            out.push_str(&format!("### {title}\n\n|      |"));
            for r in &t.rows {
                let mark = if r.best {
                    " (best)"
                } else if r.tied {
                    " (tied)"
                } else {
                    ""
                };
                out.push_str(&format!(" {}{mark} |", r.algorithm));
            }
            out.push_str("\n|------|");
            out.push_str(&"---|".repeat(t.rows.len()));
            out.push('\n');
            for (label, get) in [
                ("mean", (|r: &Row| r.mean) as fn(&Row) -> f64),
                ("std", |r: &Row| r.std),
                ("max", |r: &Row| r.max),
            ] {
                out.push_str(&format!("| {label} |"));
                for r in &t.rows {
                    out.push_str(&format!(" {:.6} |", get(r)));
                }
                out.push('\n');
            }
            out.push_str("| p-value |");
            for r in &t.rows {
                match r.p_value {
                    Some(p) => out.push_str(&format!(" {p:.4} |")),
                    None => out.push_str(" - |"),
                }
            }
            out.push_str("\n\n");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_statistic() {
        let kw = kruskal_wallis(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert!((kw.h - 3.857).abs() < 1e-3);
        assert!((kw.p_value - 0.0495).abs() < 1e-3);
    }

    #[test]
    fn identical_values() {
        let kw = kruskal_wallis(&[vec![2.0; 4], vec![2.0; 3]]).unwrap();
        assert_eq!((kw.h, kw.p_value), (0.0, 1.0));
    }

    #[test]
    fn ties_use_average_ranks() {
        // ranks: 1, 2.5, 2.5 | 4, 5; tie correction 1 - 6/120
        let kw = kruskal_wallis(&[vec![1.0, 2.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let raw: f64 = 12.0 / 30.0 * (6.0f64.powi(2) / 3.0 + 9.0f64.powi(2) / 2.0) - 18.0;
        assert!((kw.h - raw / 0.95).abs() < 1e-12);
    }

    fn batch(name: &str, hv: Vec<f64>, igd: Vec<f64>) -> IndicatorBatch {
        IndicatorBatch {
            algorithm: name.into(),
            run_seeds: (0..hv.len() as u64).collect(),
            hypervolume: hv,
            igd_plus: igd,
        }
    }

    #[test]
    fn strict_winner_has_no_ties() {
        let a = batch(
            "A",
            (0..10).map(|i| 10.0 + i as f64).collect(),
            vec![0.0; 10],
        );
        let b = batch("B", (0..10).map(|i| i as f64).collect(), vec![1.0; 10]);
        let c = compare_algorithms(&[a, b]).unwrap();
        for t in &c.tables {
            assert!(t.rows[0].best && !t.rows[1].best && !t.rows[1].tied);
        }
    }

    #[test]
    fn single_runs_are_summarized_without_a_test() {
        let c = compare_algorithms(&[
            batch("a", vec![0.5], vec![0.1]),
            batch("b", vec![0.4], vec![0.2]),
        ])
        .unwrap();
        let t = c.table("hypervolume").unwrap();
        assert!(t.rows[0].best);
        assert_eq!((t.rows[1].p_value, t.rows[1].tied), (None, false));
    }

    #[test]
    fn identical_batches_tie() {
        let a = batch("A", vec![1.0, 2.0, 3.0], vec![0.1, 0.2, 0.3]);
        let mut b = a.clone();
        b.algorithm = "B".into();
        let c = compare_algorithms(&[a, b]).unwrap();
        let hv = c.table("hypervolume").unwrap();
        assert!(hv.rows[1].tied);
        assert_eq!(hv.rows[1].p_value, Some(1.0));
        assert!(c.to_markdown().contains("(tied)"));
    }
}
