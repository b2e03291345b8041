//! The variation loop: parse, mutate, expand, reparse, repeat.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::metrics::levenshtein;
use crate::model::{Grammar, MutationKind, NoteAlphabet, TrajectoryRecord, Tune};
use crate::mutation::{
    applicable, apply_mutation, default_excluded, random_mutation, MutationOutcome, RandomSource,
    MAX_ATTEMPTS,
};
use crate::sequitur::induce;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub steps: usize,
    pub seed: u64,
    pub excluded: BTreeSet<MutationKind>,
    /// Re-induce the grammar from the expanded tune before every mutation.
    /// When false, each mutation edits the previous mutated grammar.
    pub reparse_each_step: bool,
}

impl RunConfig {
    pub fn new(steps: usize, seed: u64) -> Self {
        RunConfig {
            steps,
            seed,
            excluded: default_excluded(),
            reparse_each_step: true,
        }
    }

    pub fn with_excluded(mut self, excluded: BTreeSet<MutationKind>) -> Self {
        self.excluded = excluded;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if self.excluded.len() >= MutationKind::ALL.len() {
            return Err(Error::InvalidConfig(
                "every mutation kind is excluded".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub original: Tune,
    pub final_tune: Tune,
    pub trajectory: Vec<TrajectoryRecord>,
    pub kinds_applied: Vec<MutationKind>,
}

/// Chooses and applies the mutation of one step.
pub trait Mutator {
    fn mutate(
        &mut self,
        step: usize,
        grammar: &Grammar,
        alphabet: &NoteAlphabet,
        rng: &mut RandomSource,
    ) -> Result<MutationOutcome>;
}

/// Uniform choice among the kinds not excluded.
#[derive(Clone, Debug)]
pub struct RandomMutator {
    pub excluded: BTreeSet<MutationKind>,
}

impl Mutator for RandomMutator {
    fn mutate(
        &mut self,
        _step: usize,
        grammar: &Grammar,
        alphabet: &NoteAlphabet,
        rng: &mut RandomSource,
    ) -> Result<MutationOutcome> {
        random_mutation(grammar, alphabet, rng, &self.excluded)
    }
}

/// Always the same kind, random targets.
#[derive(Clone, Copy, Debug)]
pub struct FixedKind(pub MutationKind);

impl Mutator for FixedKind {
    fn mutate(
        &mut self,
        _step: usize,
        grammar: &Grammar,
        alphabet: &NoteAlphabet,
        rng: &mut RandomSource,
    ) -> Result<MutationOutcome> {
        apply_mutation(grammar, self.0, alphabet, rng)
    }
}

impl<F> Mutator for F
where
    F: FnMut(usize, &Grammar, &NoteAlphabet, &mut RandomSource) -> Result<MutationOutcome>,
{
    fn mutate(
        &mut self,
        step: usize,
        grammar: &Grammar,
        alphabet: &NoteAlphabet,
        rng: &mut RandomSource,
    ) -> Result<MutationOutcome> {
        self(step, grammar, alphabet, rng)
    }
}

/// Mutates `grammar` and expands the result, redrawing if the expansion
/// comes out empty.
fn mutate_and_expand(
    step: usize,
    grammar: &Grammar,
    alphabet: &NoteAlphabet,
    rng: &mut RandomSource,
    mutator: &mut dyn Mutator,
) -> Result<(Tune, MutationOutcome)> {
    for _ in 0..MAX_ATTEMPTS {
        let outcome = mutator.mutate(step, grammar, alphabet, rng)?;
        let tune = outcome.grammar.expand()?;
        if !tune.is_empty() {
            return Ok((tune, outcome));
        }
    }
    Err(Error::EmptyTune)
}

/// One iteration: induce, mutate with a random non-excluded kind, expand.
pub fn step(
    current: &Tune,
    alphabet: &NoteAlphabet,
    rng: &mut RandomSource,
    excluded: &BTreeSet<MutationKind>,
) -> Result<(Tune, MutationKind)> {
    let mut mutator = RandomMutator {
        excluded: excluded.clone(),
    };
    let (tune, outcome) = step_with(current, alphabet, rng, &mut mutator)?;
    Ok((tune, outcome.kind))
}

/// One iteration with a caller-supplied mutator.
pub fn step_with(
    current: &Tune,
    alphabet: &NoteAlphabet,
    rng: &mut RandomSource,
    mutator: &mut dyn Mutator,
) -> Result<(Tune, MutationOutcome)> {
    if current.is_empty() {
        return Err(Error::EmptyTune);
    }
    let grammar = induce(current)?;
    mutate_and_expand(1, &grammar, alphabet, rng, mutator)
}

/// Runs `cfg.steps` random mutations starting from `tune`.
pub fn run(tune: &Tune, cfg: &RunConfig) -> Result<RunResult> {
    let mut mutator = RandomMutator {
        excluded: cfg.excluded.clone(),
    };
    run_with(tune, cfg, &mut mutator)
}

/// Runs the loop with a caller-supplied mutator. `cfg.excluded` is only
/// validated here; honouring it is the mutator's job.
pub fn run_with(tune: &Tune, cfg: &RunConfig, mutator: &mut dyn Mutator) -> Result<RunResult> {
    cfg.validate()?;
    if tune.is_empty() {
        return Err(Error::EmptyTune);
    }
    let alphabet = tune.alphabet()?;
    let mut rng = RandomSource::new(cfg.seed);
    let mut current = tune.clone();
    let mut grammar = induce(tune)?;
    let mut trajectory = Vec::with_capacity(cfg.steps);
    let mut kinds = Vec::with_capacity(cfg.steps);

    for step in 1..=cfg.steps {
        let wrap = |e: Error| Error::Step {
            step,
            source: Box::new(e),
        };
        let (next, outcome) =
            mutate_and_expand(step, &grammar, &alphabet, &mut rng, mutator).map_err(wrap)?;
        let reparsed = induce(&next).map_err(wrap)?;
        trajectory.push(TrajectoryRecord {
            step,
            kind: outcome.kind,
            ed_vs_original: levenshtein(tune.notes(), next.notes()),
            ed_vs_previous: levenshtein(current.notes(), next.notes()),
            length: next.len(),
            pai: reparsed.pai(),
        });
        kinds.push(outcome.kind);
        grammar = if cfg.reparse_each_step {
            reparsed
        } else {
            outcome.grammar
        };
        current = next;
    }

    Ok(RunResult {
        original: tune.clone(),
        final_tune: current,
        trajectory,
        kinds_applied: kinds,
    })
}

/// Edit distance of one application of each kind to `induce(tune)`; `None`
/// where the kind does not apply. Each kind draws from its own stream.
pub fn run_per_kind(tune: &Tune, seed: u64) -> Result<Vec<(MutationKind, Option<usize>)>> {
    if tune.is_empty() {
        return Err(Error::EmptyTune);
    }
    let alphabet = tune.alphabet()?;
    let grammar = induce(tune)?;
    MutationKind::ALL
        .into_iter()
        .map(|kind| {
            if !applicable(&grammar, kind) {
                return Ok((kind, None));
            }
            let mut rng = RandomSource::new(derive_seed(seed, u64::from(kind.index()), 0));
            let mut mutator = FixedKind(kind);
            match mutate_and_expand(1, &grammar, &alphabet, &mut rng, &mut mutator) {
                Ok((mutated, _)) => Ok((kind, Some(levenshtein(tune.notes(), mutated.notes())))),
                Err(Error::ResamplingExhausted { .. }) => Ok((kind, None)),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Mixes a master seed with two indices (SplitMix64 finaliser), so parallel
/// runs get independent streams regardless of scheduling.
pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(master) ^ a) ^ b.rotate_left(32))
}
