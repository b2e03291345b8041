//! Corpus-level experiments and their CSV tables.
//!
//! Work fans out per tune on the current rayon pool; rows always come back
//! in corpus order.

use std::collections::BTreeSet;
use std::io::Write;

use rayon::prelude::*;

use crate::corpus::CorpusTune;
use crate::error::Result;
use crate::model::MutationKind;
use crate::pipeline::{derive_seed, run, run_per_kind, RunConfig, RunResult};
use crate::sequitur::{induce, to_intervals};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerKindRow {
    pub tune_id: String,
    pub kind: MutationKind,
    pub ed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingRow {
    pub tune_id: String,
    pub pai_pitch: usize,
    pub pai_interval: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuneRun {
    pub tune_id: String,
    pub result: RunResult,
}

/// One application of every applicable kind to every tune.
pub fn per_kind(corpus: &[CorpusTune], seed: u64) -> Result<Vec<PerKindRow>> {
    let nested: Vec<Vec<PerKindRow>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, ct)| {
            let eds = run_per_kind(&ct.tune, derive_seed(seed, i as u64, 0))?;
            Ok(eds
                .into_iter()
                .filter_map(|(kind, ed)| {
                    ed.map(|ed| PerKindRow {
                        tune_id: ct.id.clone(),
                        kind,
                        ed,
                    })
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// `runs_per_tune` independent runs of `steps` steps for every tune.
pub fn trajectories(
    corpus: &[CorpusTune],
    steps: usize,
    seed: u64,
    excluded: &BTreeSet<MutationKind>,
    runs_per_tune: usize,
) -> Result<Vec<TuneRun>> {
    let jobs: Vec<(usize, usize)> = (0..corpus.len())
        .flat_map(|i| (0..runs_per_tune).map(move |r| (i, r)))
        .collect();
    jobs.par_iter()
        .map(|&(i, r)| {
            let cfg = RunConfig::new(steps, derive_seed(seed, i as u64, r as u64))
                .with_excluded(excluded.clone());
            Ok(TuneRun {
                tune_id: corpus[i].id.clone(),
                result: run(&corpus[i].tune, &cfg)?,
            })
        })
        .collect()
}

/// PAI of the pitch and interval encodings of every tune.
pub fn encoding(corpus: &[CorpusTune]) -> Result<Vec<EncodingRow>> {
    corpus
        .par_iter()
        .map(|ct| {
            Ok(EncodingRow {
                tune_id: ct.id.clone(),
                pai_pitch: induce(&ct.tune)?.pai(),
                pai_interval: induce(&to_intervals(&ct.tune)?)?.pai(),
            })
        })
        .collect()
}

pub fn write_per_kind_csv(rows: &[PerKindRow], mut out: impl Write) -> std::io::Result<()> {
    out.write_all(b"tune_id,kind,ed\n")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.tune_id, r.kind, r.ed)?;
    }
    Ok(())
}

pub fn write_trajectories_csv(runs: &[TuneRun], mut out: impl Write) -> std::io::Result<()> {
    out.write_all(b"tune_id,step,kind,ed_vs_original,ed_vs_previous,length,pai\n")?;
    for run in runs {
        write_trajectory_rows(&run.tune_id, &run.result, &mut out)?;
    }
    Ok(())
}

/// Trajectory rows without a header; `tune_id` may be empty.
pub fn write_trajectory_rows(
    tune_id: &str,
    result: &RunResult,
    mut out: impl Write,
) -> std::io::Result<()> {
    for rec in &result.trajectory {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            tune_id,
            rec.step,
            rec.kind,
            rec.ed_vs_original,
            rec.ed_vs_previous,
            rec.length,
            rec.pai
        )?;
    }
    Ok(())
}

pub fn write_encoding_csv(rows: &[EncodingRow], mut out: impl Write) -> std::io::Result<()> {
    out.write_all(b"tune_id,pai_pitch,pai_interval\n")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.tune_id, r.pai_pitch, r.pai_interval)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Tune;
    use std::path::PathBuf;

    fn corpus() -> Vec<CorpusTune> {
        [
            vec![1, 2, 3, 1, 2, 3, 4, 4],
            vec![5, 5, 6, 5, 5, 6, 7],
            vec![2, 11, 7, 4, 4, 7, 4, 4],
        ]
        .into_iter()
        .enumerate()
        .map(|(i, n)| CorpusTune {
            id: format!("t{i}"),
            tune: Tune::from(n),
            source_path: PathBuf::new(),
        })
        .collect()
    }

    #[test]
    fn row_counts_and_headers() {
        let c = corpus();
        let runs = trajectories(&c, 5, 1, &BTreeSet::new(), 2).unwrap();
        assert_eq!(runs.len(), 6);
        let mut buf = Vec::new();
        write_trajectories_csv(&runs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 6 * 5);
        assert!(text.starts_with("tune_id,step,kind,"));

        let rows = per_kind(&c, 3).unwrap();
        assert!(rows.len() <= 3 * 19);
        assert!(rows
            .windows(2)
            .all(|w| (&w[0].tune_id, w[0].kind) < (&w[1].tune_id, w[1].kind)));

        let enc = encoding(&c).unwrap();
        assert_eq!(
            enc.iter().map(|r| r.tune_id.as_str()).collect::<Vec<_>>(),
            ["t0", "t1", "t2"]
        );
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let c = corpus();
        let with = |n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(|| {
                    trajectories(&c, 8, 42, &crate::mutation::default_excluded(), 3).unwrap()
                })
        };
        assert_eq!(with(1), with(4));
    }
}
