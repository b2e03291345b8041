//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so every line is printed; exits nonzero if any criterion fails.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tunegram::corpus::{load_corpus, CorpusTune};
use tunegram::experiment::{per_kind, trajectories, TuneRun};
use tunegram::metrics::{levenshtein, summarize_by_kind, trajectory_means};
use tunegram::mutation::{apply_edit, default_excluded, random_mutation, Edit, RandomSource};
use tunegram::pipeline::RunResult;
use tunegram::sequitur::induce;
use tunegram::{Grammar, MutationKind, Pitch, Tune};

const ABRACADABRA: [Pitch; 11] = [0, 1, 2, 0, 3, 0, 4, 0, 1, 2, 0];
const PITCH_LIST: [Pitch; 16] = [2, 11, 7, 4, 4, 7, 4, 4, 2, 11, 7, 4, 4, 7, 4, 4];
const INTERVAL_LIST: [Pitch; 16] = [0, 9, -4, -3, 0, 3, -3, 0, -2, 9, -4, -3, 0, 3, -3, 0];

const EXAMPLE_GRAMMAR: &str = "\
p0 -> 2 p1 p2 9 p3 p3 6 9 p2 p1 2 4 p4 11 9 p4 4 6 p5
p1 -> 11 p6 p6 7 11
p2 -> 2 1 2
p3 -> p4 2
p4 -> 6 2
p5 -> 4 4
p6 -> 7 p5
";
const EXAMPLE_TUNE: [Pitch; 46] = [
    2, 11, 7, 4, 4, 7, 4, 4, 7, 11, 2, 1, 2, 9, 6, 2, 2, 6, 2, 2, 6, 9, 2, 1, 2, 11, 7, 4, 4, 7, 4,
    4, 7, 11, 2, 4, 6, 2, 11, 9, 6, 2, 4, 6, 4, 4,
];
const MUTATED_TUNE: [Pitch; 49] = [
    2, 11, 7, 2, 1, 2, 7, 2, 1, 2, 7, 11, 4, 4, 9, 6, 2, 2, 6, 2, 2, 6, 9, 4, 4, 11, 7, 2, 1, 2, 7,
    2, 1, 2, 7, 11, 2, 4, 6, 2, 11, 9, 6, 2, 4, 6, 2, 1, 2,
];
const EXAMPLE_ED: usize = 21;
const REFERENCE_MEAN_ED_AT_100: f64 = 178.0;

const C4_MAX_LEN: usize = 8;
const C4_SAMPLED: usize = 20_000;
const C5_TUNES: usize = 1000;
const C6_TRIALS: usize = 10_000;
const C7_SEEDS: u64 = 100;
const C8_RUNS_PER_TUNE: usize = 10;
const C8_STEPS: usize = 100;
const C8_SEED: u64 = 2024;
const C10_STEPS: usize = 100;
const C10_SEED: u64 = 7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn mini_corpus() -> Vec<CorpusTune> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/mini");
    load_corpus(&dir).expect("bundled mini-corpus").tunes
}

fn c1_abracadabra() -> Outcome {
    let g = induce(&Tune::from(ABRACADABRA.to_vec())).unwrap();
    outcome(g.pai() == 7, format!("PAI {} (expected 7)", g.pai()))
}

fn c2_encoding() -> Outcome {
    let pitch = induce(&Tune::from(PITCH_LIST.to_vec())).unwrap().pai();
    let interval = induce(&Tune::from(INTERVAL_LIST.to_vec())).unwrap().pai();
    outcome(
        pitch == 6 && interval == 10,
        format!("pitch PAI {pitch} (expected 6), interval PAI {interval} (expected 10)"),
    )
}

fn c3_swap_definitions() -> Outcome {
    let g = Grammar::parse(EXAMPLE_GRAMMAR).unwrap();
    let original = g.expand().unwrap();
    let mutated = apply_edit(&g, &Edit::SwapDefinitions { a: 2, b: 5 })
        .unwrap()
        .grammar
        .expand()
        .unwrap();
    let ed = levenshtein(original.notes(), mutated.notes());
    outcome(
        original.notes() == EXAMPLE_TUNE && mutated.notes() == MUTATED_TUNE && ed == EXAMPLE_ED,
        format!(
            "{} -> {} notes, ED {ed} (expected {EXAMPLE_ED})",
            original.len(),
            mutated.len()
        ),
    )
}

fn brute_force_ed(a: &[Pitch], b: &[Pitch]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((x, ra)), Some((y, rb))) => {
            let sub = brute_force_ed(ra, rb) + usize::from(x != y);
            sub.min(brute_force_ed(ra, b) + 1)
                .min(brute_force_ed(a, rb) + 1)
        }
    }
}

fn all_strings(max_len: usize) -> Vec<Vec<Pitch>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        frontier = frontier
            .iter()
            .flat_map(|s: &Vec<Pitch>| {
                (0..3).map(move |c| {
                    let mut t = s.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

fn memo_ed(a: &[Pitch], b: &[Pitch]) -> usize {
    fn go(a: &[Pitch], b: &[Pitch], memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if let Some(&d) = memo.get(&(a.len(), b.len())) {
            return d;
        }
        let d = match (a.split_first(), b.split_first()) {
            (None, _) => b.len(),
            (_, None) => a.len(),
            (Some((x, ra)), Some((y, rb))) => (go(ra, rb, memo) + usize::from(x != y))
                .min(go(ra, b, memo) + 1)
                .min(go(a, rb, memo) + 1),
        };
        memo.insert((a.len(), b.len()), d);
        d
    }
    go(a, b, &mut HashMap::new())
}

fn c4_levenshtein() -> Outcome {
    let word = |s: &str| s.bytes().map(Pitch::from).collect::<Vec<_>>();
    let kitten = levenshtein(&word("kitten"), &word("sitting"));
    // Exhaustive against the plain recursion for both lengths up to 4
    // (this includes all 81 x 81 pairs of length exactly 4); seeded pairs
    // up to length 8 against the memoized recursion.
    let short = all_strings(4);
    let long = all_strings(C4_MAX_LEN);
    let mut pairs = 0usize;
    let mut mismatches = 0usize;
    for a in &short {
        for b in &short {
            pairs += 1;
            mismatches += usize::from(levenshtein(a, b) != brute_force_ed(a, b));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..C4_SAMPLED {
        let a = &long[rng.random_range(0..long.len())];
        let b = &long[rng.random_range(0..long.len())];
        pairs += 1;
        mismatches += usize::from(levenshtein(a, b) != memo_ed(a, b));
    }
    outcome(
        kitten == 3 && mismatches == 0,
        format!("kitten/sitting {kitten}; {pairs} oracle pairs, {mismatches} mismatches"),
    )
}

fn c5_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tunes: Vec<Tune> = (0..C5_TUNES)
        .map(|_| {
            let len = rng.random_range(1..=512);
            let alphabet = rng.random_range(1..=24);
            (0..len).map(|_| rng.random_range(0..alphabet)).collect()
        })
        .collect();
    let corpus = mini_corpus();
    tunes.extend(corpus.iter().map(|c| c.tune.clone()));
    let failures = tunes
        .iter()
        .filter(|t| {
            let g = induce(t).unwrap();
            g.expand().unwrap() != **t || !g.validate().is_canonical()
        })
        .count();
    outcome(
        failures == 0 && corpus.len() == 20,
        format!(
            "{} tunes ({} from the mini-corpus), {failures} failures",
            tunes.len(),
            corpus.len()
        ),
    )
}

fn c6_mutation_safety() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = 0usize;
    let mut kinds = BTreeSet::new();
    for trial in 0..C6_TRIALS {
        let len = rng.random_range(1..=96);
        let alphabet_size = rng.random_range(1..=12);
        let tune: Tune = (0..len)
            .map(|_| rng.random_range(0..alphabet_size))
            .collect();
        let alphabet = tune.alphabet().unwrap();
        let g = induce(&tune).unwrap();
        let mut source = RandomSource::new(trial as u64);
        let ok = match random_mutation(&g, &alphabet, &mut source, &BTreeSet::new()) {
            Ok(out) => {
                kinds.insert(out.kind);
                out.grammar.validate().is_structurally_valid()
                    && out
                        .grammar
                        .expand()
                        .map(|t| t.notes().iter().all(|n| alphabet.contains(*n)))
                        .unwrap_or(false)
            }
            Err(_) => false,
        };
        failures += usize::from(!ok);
    }
    outcome(
        failures == 0 && kinds.len() == 19,
        format!(
            "{C6_TRIALS} trials, {failures} failures, {} kinds exercised",
            kinds.len()
        ),
    )
}

fn c7_define_rule_dominates(corpus: &[CorpusTune]) -> Outcome {
    let mut measurements = Vec::new();
    for seed in 0..C7_SEEDS {
        measurements.extend(
            per_kind(corpus, seed)
                .unwrap()
                .into_iter()
                .map(|r| (r.kind, r.ed)),
        );
    }
    let summaries = summarize_by_kind(measurements);
    let define = &summaries[usize::from(MutationKind::DefineRule.index() - 1)];
    let runner_up = summaries
        .iter()
        .filter(|s| s.kind != MutationKind::DefineRule && s.count > 0)
        .max_by(|a, b| a.median.total_cmp(&b.median))
        .unwrap();
    outcome(
        define.median > runner_up.median,
        format!(
            "kind 18 median {:.1} (mean {:.1}); next largest kind {} median {:.1} (mean {:.1})",
            define.median, define.mean, runner_up.kind, runner_up.median, runner_up.mean
        ),
    )
}

fn c8_shrinking(runs: &[TuneRun]) -> Outcome {
    let n = runs.len() as f64;
    let mean =
        |f: &dyn Fn(&RunResult) -> usize| runs.iter().map(|r| f(&r.result) as f64).sum::<f64>() / n;
    let len0 = mean(&|r| r.original.len());
    let len1 = mean(&|r| r.final_tune.len());
    let pai0 = mean(&|r| induce(&r.original).unwrap().pai());
    let pai1 = mean(&|r| r.trajectory.last().unwrap().pai);
    let shorter = runs
        .iter()
        .filter(|r| r.result.final_tune.len() < r.result.original.len())
        .count();
    outcome(
        runs.len() >= 200 && len1 < len0 && pai1 < pai0,
        format!(
            "{} runs: mean length {len0:.1} -> {len1:.1}, mean PAI {pai0:.1} -> {pai1:.1}, {shorter} runs ended shorter",
            runs.len()
        ),
    )
}

fn c9_ed_growth(runs: &[TuneRun]) -> Outcome {
    let results: Vec<RunResult> = runs.iter().map(|r| r.result.clone()).collect();
    let means = trajectory_means(&results).unwrap();
    let at = |step: usize| means[step - 1].ed_vs_original;
    let (e1, e20, e100) = (at(1), at(20), at(C8_STEPS));
    outcome(
        e100 > e20 && e20 > e1,
        format!(
            "mean ED step 1 {e1:.1}, step 20 {e20:.1}, step 100 {e100:.1} (published dataset mean: {REFERENCE_MEAN_ED_AT_100})"
        ),
    )
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/mini");
    let run = |jobs: usize, name: &str| -> Vec<u8> {
        let out: PathBuf = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_tunegram"))
            .args(["experiment", "trajectories", "--exclude", "18"])
            .arg("--corpus")
            .arg(&corpus)
            .args([
                "--steps",
                &C10_STEPS.to_string(),
                "--seed",
                &C10_SEED.to_string(),
            ])
            .args(["--jobs", &jobs.to_string()])
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let a = run(1, "a.csv");
    let b = run(1, "b.csv");
    let c = run(4, "c.csv");
    let rows = a.iter().filter(|&&c| c == b'\n').count();
    outcome(
        a == b && a == c && rows == 1 + 20 * C10_STEPS,
        format!(
            "{rows} lines; repeat identical {}, 1 vs 4 workers identical {}",
            a == b,
            a == c
        ),
    )
}

fn c11_pitch_vs_interval(corpus: &[CorpusTune]) -> Outcome {
    let rows = tunegram::experiment::encoding(corpus).unwrap();
    let n = rows.len() as f64;
    let pitch = rows.iter().map(|r| r.pai_pitch as f64).sum::<f64>() / n;
    let interval = rows.iter().map(|r| r.pai_interval as f64).sum::<f64>() / n;
    outcome(
        pitch < interval,
        format!("mean pitch PAI {pitch:.2}, mean interval PAI {interval:.2}"),
    )
}

fn main() -> ExitCode {
    let corpus = mini_corpus();
    let start = Instant::now();
    let shared = trajectories(
        &corpus,
        C8_STEPS,
        C8_SEED,
        &default_excluded(),
        C8_RUNS_PER_TUNE,
    )
    .unwrap();
    let run_time = start.elapsed();

    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(&str, Duration, Check)> = vec![
        (
            "1 abracadabra PAI",
            Duration::from_millis(1),
            Box::new(c1_abracadabra),
        ),
        (
            "2 pitch vs interval PAI",
            Duration::from_millis(1),
            Box::new(c2_encoding),
        ),
        (
            "3 mutation 17 golden",
            Duration::from_millis(1),
            Box::new(c3_swap_definitions),
        ),
        (
            "4 levenshtein oracle",
            Duration::from_secs(10),
            Box::new(c4_levenshtein),
        ),
        (
            "5 round trip",
            Duration::from_secs(10),
            Box::new(c5_round_trip),
        ),
        (
            "6 mutation safety",
            Duration::from_secs(30),
            Box::new(c6_mutation_safety),
        ),
        (
            "7 kind 18 dominance",
            Duration::from_secs(60),
            Box::new(|| c7_define_rule_dominates(&corpus)),
        ),
        (
            "8 length and PAI decrease",
            Duration::from_secs(300),
            Box::new(|| c8_shrinking(&shared)),
        ),
        (
            "9 ED growth",
            Duration::from_secs(300),
            Box::new(|| c9_ed_growth(&shared)),
        ),
        (
            "10 CSV determinism",
            Duration::from_secs(60),
            Box::new(c10_determinism),
        ),
        (
            "11 corpus pitch vs interval",
            Duration::from_secs(5),
            Box::new(|| c11_pitch_vs_interval(&corpus)),
        ),
    ];

    let mut failed = 0;
    for (name, budget, check) in &criteria {
        let start = Instant::now();
        let out = check();
        let mut elapsed = start.elapsed();
        if name.starts_with('8') || name.starts_with('9') {
            elapsed += run_time;
        }
        let pass = out.pass && elapsed <= *budget;
        failed += usize::from(!pass);
        println!(
            "{} criterion {name}: {} [{:.3?} / {:?}]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed,
            budget
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
