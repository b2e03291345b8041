use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tunegram::corpus::{load_corpus, read_tune, write_tune, Corpus};
use tunegram::experiment::{
    encoding, per_kind, trajectories, write_encoding_csv, write_per_kind_csv,
    write_trajectories_csv, write_trajectory_rows,
};
use tunegram::metrics::levenshtein;
use tunegram::midi::{export_midi, DEFAULT_BASE_NOTE};
use tunegram::mutation::default_excluded;
use tunegram::pipeline::{run, run_with, FixedKind, RunConfig};
use tunegram::sequitur::{induce, to_intervals};
use tunegram::{Error, MutationKind};

#[derive(Parser)]
#[command(
    name = "tunegram",
    version,
    about = "Grammar-based variation of monophonic tunes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the induced grammar and its PAI.
    Parse { file: PathBuf },
    /// Print the PAI of a tune.
    Pai {
        file: PathBuf,
        /// Use the interval encoding (differences of consecutive notes).
        #[arg(long)]
        intervals: bool,
    },
    /// Run the mutation loop; prints the trajectory as CSV.
    Mutate {
        file: PathBuf,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        exclude: ExcludeArg,
        /// Apply only this kind (index or code) at every step.
        #[arg(long)]
        kind: Option<MutationKind>,
        /// Write the final tune here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the final tune as MIDI here.
        #[arg(long)]
        midi: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BASE_NOTE)]
        base_note: i32,
    },
    /// Print the edit distance between two tunes.
    Ed { a: PathBuf, b: PathBuf },
    /// Corpus experiments writing CSV tables.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Subcommand)]
enum Experiment {
    /// One application of every kind to every tune: tune_id,kind,ed
    PerKind {
        #[command(flatten)]
        common: CorpusArgs,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Mutation runs: tune_id,step,kind,ed_vs_original,ed_vs_previous,length,pai
    Trajectories {
        #[command(flatten)]
        common: CorpusArgs,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Independent runs per tune.
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        exclude: ExcludeArg,
    },
    /// PAI of pitch and interval encodings: tune_id,pai_pitch,pai_interval
    Encoding {
        #[command(flatten)]
        common: CorpusArgs,
    },
}

#[derive(Args)]
struct CorpusArgs {
    /// Tune file or directory of .txt/.csv tune files.
    #[arg(long)]
    corpus: PathBuf,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 picks the number of CPUs.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct SeedArg {
    #[arg(long, env = "TUNEGRAM_SEED")]
    seed: u64,
}

#[derive(Args)]
struct ExcludeArg {
    /// Kinds never drawn at random (index or code, comma separated, or
    /// `none`). Defaults to 18.
    #[arg(long, value_delimiter = ',', value_parser = parse_excluded)]
    exclude: Option<Vec<Option<MutationKind>>>,
}

impl ExcludeArg {
    fn set(&self) -> BTreeSet<MutationKind> {
        match &self.exclude {
            None => default_excluded(),
            Some(kinds) => kinds.iter().flatten().copied().collect(),
        }
    }
}

fn parse_excluded(s: &str) -> Result<Option<MutationKind>, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> Result<(), Error> {
    let stdout = io::stdout();
    match command {
        Command::Parse { file } => {
            let g = induce(&read_tune(&file)?)?;
            let mut out = stdout.lock();
            write!(out, "{g}").map_err(stdout_error)?;
            writeln!(out, "pai {}", g.pai()).map_err(stdout_error)?;
        }
        Command::Pai { file, intervals } => {
            let mut tune = read_tune(&file)?;
            if intervals {
                tune = to_intervals(&tune)?;
            }
            println!("{}", induce(&tune)?.pai());
        }
        Command::Mutate {
            file,
            steps,
            seed,
            exclude,
            kind,
            out,
            midi,
            base_note,
        } => {
            let tune = read_tune(&file)?;
            let cfg = RunConfig::new(steps, seed.seed).with_excluded(exclude.set());
            let result = match kind {
                Some(kind) => run_with(&tune, &cfg, &mut FixedKind(kind))?,
                None => run(&tune, &cfg)?,
            };
            let id = file
                .file_stem()
                .map(|s| s.to_string_lossy())
                .unwrap_or_default();
            let mut w = stdout.lock();
            w.write_all(b"tune_id,step,kind,ed_vs_original,ed_vs_previous,length,pai\n")
                .and_then(|()| write_trajectory_rows(&id, &result, &mut w))
                .map_err(stdout_error)?;
            if let Some(path) = out {
                write_tune(&result.final_tune, &path)?;
            }
            if let Some(path) = midi {
                export_midi(&result.final_tune, &path, base_note)?;
            }
        }
        Command::Ed { a, b } => {
            let (a, b) = (read_tune(&a)?, read_tune(&b)?);
            println!("{}", levenshtein(a.notes(), b.notes()));
        }
        Command::Experiment(exp) => experiment(exp)?,
    }
    Ok(())
}

fn experiment(exp: Experiment) -> Result<(), Error> {
    let common = match &exp {
        Experiment::PerKind { common, .. }
        | Experiment::Trajectories { common, .. }
        | Experiment::Encoding { common } => common,
    };
    let corpus = load(&common.corpus)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut buf = Vec::new();
    pool.install(|| -> Result<(), Error> {
        match &exp {
            Experiment::PerKind { seed, .. } => {
                write_per_kind_csv(&per_kind(&corpus.tunes, seed.seed)?, &mut buf)
            }
            Experiment::Trajectories {
                steps,
                runs,
                seed,
                exclude,
                ..
            } => {
                RunConfig::new(*steps, seed.seed)
                    .with_excluded(exclude.set())
                    .validate()?;
                let runs = trajectories(&corpus.tunes, *steps, seed.seed, &exclude.set(), *runs)?;
                write_trajectories_csv(&runs, &mut buf)
            }
            Experiment::Encoding { .. } => write_encoding_csv(&encoding(&corpus.tunes)?, &mut buf),
        }
        .expect("writing to a Vec cannot fail");
        Ok(())
    })?;
    match &common.out {
        Some(path) => {
            let mut f = File::create(path)
                .map(BufWriter::new)
                .map_err(|e| io_error(path, e))?;
            f.write_all(&buf)
                .and_then(|()| f.flush())
                .map_err(|e| io_error(path, e))
        }
        None => io::stdout().lock().write_all(&buf).map_err(stdout_error),
    }
}

fn load(path: &Path) -> Result<Corpus, Error> {
    let corpus = load_corpus(path)?;
    if corpus.skipped_empty > 0 {
        eprintln!(
            "warning: skipped {} empty tune file(s)",
            corpus.skipped_empty
        );
    }
    Ok(corpus)
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn stdout_error(source: io::Error) -> Error {
    io_error(Path::new("<stdout>"), source)
}
