//! Edit distance and summary statistics over experiment results.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{MutationKind, Pitch};
use crate::pipeline::RunResult;

/// Levenshtein distance with unit costs, two-row dynamic programme.
pub fn levenshtein(a: &[Pitch], b: &[Pitch]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Five-number summary and mean of the edit distances of one kind.
#[derive(Clone, Debug, PartialEq)]
pub struct KindSummary {
    pub kind: MutationKind,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Quantile of sorted data by linear interpolation between closest ranks
/// (position `p * (n - 1)`).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = p * (n - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

/// Per-kind summaries in index order; kinds without data have `count == 0`
/// and NaN statistics.
pub fn summarize_by_kind<I>(measurements: I) -> Vec<KindSummary>
where
    I: IntoIterator<Item = (MutationKind, usize)>,
{
    let mut by_kind: BTreeMap<MutationKind, Vec<f64>> = BTreeMap::new();
    for (kind, ed) in measurements {
        by_kind.entry(kind).or_default().push(ed as f64);
    }
    MutationKind::ALL
        .into_iter()
        .map(|kind| {
            let mut v = by_kind.remove(&kind).unwrap_or_default();
            v.sort_by(f64::total_cmp);
            let mean = if v.is_empty() {
                f64::NAN
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            };
            KindSummary {
                kind,
                count: v.len(),
                min: v.first().copied().unwrap_or(f64::NAN),
                q1: quantile(&v, 0.25),
                median: quantile(&v, 0.5),
                q3: quantile(&v, 0.75),
                max: v.last().copied().unwrap_or(f64::NAN),
                mean,
            }
        })
        .collect()
}

/// Means across runs at one step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepMeans {
    pub step: usize,
    pub ed_vs_original: f64,
    pub length: f64,
    pub pai: f64,
}

pub fn trajectory_means(results: &[RunResult]) -> Result<Vec<StepMeans>> {
    let Some(first) = results.first() else {
        return Ok(Vec::new());
    };
    let steps = first.trajectory.len();
    if let Some(bad) = results.iter().find(|r| r.trajectory.len() != steps) {
        return Err(Error::LengthMismatch {
            expected: steps,
            got: bad.trajectory.len(),
        });
    }
    let n = results.len() as f64;
    Ok((0..steps)
        .map(|k| {
            let mut m = StepMeans {
                step: first.trajectory[k].step,
                ed_vs_original: 0.0,
                length: 0.0,
                pai: 0.0,
            };
            for r in results {
                let rec = &r.trajectory[k];
                m.ed_vs_original += rec.ed_vs_original as f64;
                m.length += rec.length as f64;
                m.pai += rec.pai as f64;
            }
            m.ed_vs_original /= n;
            m.length /= n;
            m.pai /= n;
            m
        })
        .collect())
}
