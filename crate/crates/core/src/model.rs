//! Shared domain types: tunes, grammar symbols, grammars, mutation kinds and
//! trajectory records.
//!
//! A [`Grammar`] is a plain value. It can hold structurally broken rule sets
//! (cycles, dangling references) so that [`Grammar::validate`] can report on
//! them; every operation that needs a well-formed grammar checks first.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A pitch value. MIDI note numbers or pitch classes; the core imposes no range.
pub type Pitch = i32;

/// Rule identifier, rendered as `p<id>`.
pub type RuleId = u32;

/// The entry rule of every grammar.
pub const ROOT: RuleId = 0;

/// A monophonic tune: a sequence of pitch values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Tune(Vec<Pitch>);

impl Tune {
    pub fn new(notes: Vec<Pitch>) -> Self {
        Tune(notes)
    }

    pub fn notes(&self) -> &[Pitch] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_notes(self) -> Vec<Pitch> {
        self.0
    }

    /// Distinct pitches of this tune.
    pub fn alphabet(&self) -> Result<NoteAlphabet> {
        NoteAlphabet::from_tune(self)
    }
}

impl From<Vec<Pitch>> for Tune {
    fn from(notes: Vec<Pitch>) -> Self {
        Tune(notes)
    }
}

impl From<&[Pitch]> for Tune {
    fn from(notes: &[Pitch]) -> Self {
        Tune(notes.to_vec())
    }
}

impl FromIterator<Pitch> for Tune {
    fn from_iter<I: IntoIterator<Item = Pitch>>(iter: I) -> Self {
        Tune(iter.into_iter().collect())
    }
}

impl AsRef<[Pitch]> for Tune {
    fn as_ref(&self) -> &[Pitch] {
        &self.0
    }
}

/// Comma-separated, the same format the corpus loader reads.
impl fmt::Display for Tune {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// A grammar symbol: a pitch terminal or a reference to another rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Terminal(Pitch),
    Rule(RuleId),
}

impl Symbol {
    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::Terminal(_))
    }

    pub fn is_rule(&self) -> bool {
        matches!(self, Symbol::Rule(_))
    }

    pub fn rule_ref(&self) -> Option<RuleId> {
        match *self {
            Symbol::Rule(id) => Some(id),
            Symbol::Terminal(_) => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Terminal(v) => write!(f, "{v}"),
            Symbol::Rule(id) => write!(f, "p{id}"),
        }
    }
}

/// A set of rewriting rules with entry point `p0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Grammar {
    rules: BTreeMap<RuleId, Vec<Symbol>>,
}

impl Grammar {
    pub fn from_rules<I>(rules: I) -> Self
    where
        I: IntoIterator<Item = (RuleId, Vec<Symbol>)>,
    {
        Grammar {
            rules: rules.into_iter().collect(),
        }
    }

    /// Parses the canonical text rendering (`p<id> -> sym sym ...` per line).
    /// Commas between symbols are accepted, as in hand-written listings.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::InvalidGrammar(format!("missing `->` in `{line}`")))?;
            let id = parse_rule_name(lhs.trim())?;
            let rhs = rhs
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    if t.starts_with('p') {
                        parse_rule_name(t).map(Symbol::Rule)
                    } else {
                        t.parse::<Pitch>()
                            .map(Symbol::Terminal)
                            .map_err(|_| Error::InvalidGrammar(format!("bad symbol `{t}`")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            if rules.insert(id, rhs).is_some() {
                return Err(Error::InvalidGrammar(format!("p{id} defined twice")));
            }
        }
        Ok(Grammar { rules })
    }

    pub fn rule(&self, id: RuleId) -> Option<&[Symbol]> {
        self.rules.get(&id).map(Vec::as_slice)
    }

    pub fn contains(&self, id: RuleId) -> bool {
        self.rules.contains_key(&id)
    }

    /// Rules in id order.
    pub fn rules(&self) -> impl ExactSizeIterator<Item = (RuleId, &[Symbol])> + '_ {
        self.rules.iter().map(|(&id, rhs)| (id, rhs.as_slice()))
    }

    pub fn rule_ids(&self) -> Vec<RuleId> {
        self.rules.keys().copied().collect()
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Smallest id strictly greater than every id in use.
    pub fn next_rule_id(&self) -> RuleId {
        self.rules.keys().next_back().map_or(ROOT, |&id| id + 1)
    }

    pub(crate) fn rules_mut(&mut self) -> &mut BTreeMap<RuleId, Vec<Symbol>> {
        &mut self.rules
    }

    /// Number of references to each rule across all right-hand sides.
    pub fn reference_counts(&self) -> BTreeMap<RuleId, usize> {
        let mut counts: BTreeMap<RuleId, usize> = self.rules.keys().map(|&id| (id, 0)).collect();
        for rhs in self.rules.values() {
            for id in rhs.iter().filter_map(Symbol::rule_ref) {
                *counts.entry(id).or_default() += 1;
            }
        }
        counts
    }

    /// Rules reachable from `from` through one or more references, plus `from`.
    pub fn reachable_from(&self, from: RuleId) -> BTreeSet<RuleId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            if let Some(rhs) = self.rules.get(&id) {
                stack.extend(rhs.iter().filter_map(Symbol::rule_ref));
            }
        }
        seen
    }

    /// True if the reference relation has no cycle (dangling references ignored).
    pub fn is_acyclic(&self) -> bool {
        self.find_cycles().is_empty()
    }

    fn find_cycles(&self) -> Vec<RuleId> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut marks: HashMap<RuleId, Mark> = HashMap::new();
        let mut cyclic = BTreeSet::new();
        for &start in self.rules.keys() {
            if marks.contains_key(&start) {
                continue;
            }
            // iterative DFS: (rule, next child index)
            let mut stack: Vec<(RuleId, usize)> = vec![(start, 0)];
            marks.insert(start, Mark::Open);
            while let Some(&mut (id, ref mut pos)) = stack.last_mut() {
                let rhs = &self.rules[&id];
                let next = rhs[*pos..]
                    .iter()
                    .position(Symbol::is_rule)
                    .map(|off| *pos + off);
                match next {
                    Some(i) => {
                        *pos = i + 1;
                        let child = rhs[i].rule_ref().unwrap_or(ROOT);
                        if !self.rules.contains_key(&child) {
                            continue;
                        }
                        match marks.get(&child) {
                            Some(Mark::Open) => {
                                cyclic.insert(child);
                            }
                            Some(Mark::Done) => {}
                            None => {
                                marks.insert(child, Mark::Open);
                                stack.push((child, 0));
                            }
                        }
                    }
                    None => {
                        marks.insert(id, Mark::Done);
                        stack.pop();
                    }
                }
            }
        }
        cyclic.into_iter().collect()
    }

    /// Checks structural validity and Sequitur canonicality separately.
    pub fn validate(&self) -> ValidityReport {
        let mut structural = Vec::new();
        if !self.rules.contains_key(&ROOT) {
            structural.push(Violation::MissingRoot);
        }
        for (&id, rhs) in &self.rules {
            if rhs.is_empty() {
                structural.push(Violation::EmptyRule(id));
            }
            for target in rhs.iter().filter_map(Symbol::rule_ref) {
                if !self.rules.contains_key(&target) {
                    structural.push(Violation::DanglingReference { rule: id, target });
                }
            }
        }
        structural.extend(self.find_cycles().into_iter().map(Violation::Cycle));

        let mut canonical = Vec::new();
        // digram census; an occurrence overlapping the first one is not a repeat
        let mut first_seen: HashMap<(Symbol, Symbol), (RuleId, usize)> = HashMap::new();
        for (&id, rhs) in &self.rules {
            for (i, pair) in rhs.windows(2).enumerate() {
                let key = (pair[0], pair[1]);
                match first_seen.get(&key) {
                    None => {
                        first_seen.insert(key, (id, i));
                    }
                    Some(&(r, j)) if r == id && j + 1 == i => {}
                    Some(&first) => {
                        canonical.push(Violation::RepeatedDigram {
                            digram: key,
                            first,
                            second: (id, i),
                        });
                    }
                }
            }
        }
        for (id, uses) in self.reference_counts() {
            if id != ROOT && uses < 2 && self.rules.contains_key(&id) {
                canonical.push(Violation::UnderusedRule { rule: id, uses });
            }
        }
        ValidityReport {
            structural,
            canonical,
        }
    }

    /// Returns an error naming the first structural violation, if any.
    pub fn check_structure(&self) -> Result<()> {
        let report = self.validate();
        match report.structural.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidGrammar(v.to_string())),
        }
    }

    /// Sum over rules of (rhs length - 1).
    pub fn pai(&self) -> usize {
        self.rules
            .values()
            .map(|rhs| rhs.len().saturating_sub(1))
            .sum()
    }

    /// Expansion of `p0`.
    pub fn expand(&self) -> Result<Tune> {
        self.expand_rule(ROOT)
    }

    /// Expansion of a single rule.
    pub fn expand_rule(&self, id: RuleId) -> Result<Tune> {
        if !self.rules.contains_key(&id) {
            return Err(Error::UnknownRule(id));
        }
        self.check_structure()?;
        Ok(self.expand_unchecked(id))
    }

    /// Expansion without validation; caller guarantees an acyclic, resolvable grammar.
    pub(crate) fn expand_unchecked(&self, id: RuleId) -> Tune {
        let mut out = Vec::new();
        let mut stack: Vec<std::slice::Iter<'_, Symbol>> = vec![self.rules[&id].iter()];
        while let Some(top) = stack.last_mut() {
            match top.next() {
                Some(Symbol::Terminal(v)) => out.push(*v),
                Some(Symbol::Rule(r)) => stack.push(self.rules[r].iter()),
                None => {
                    stack.pop();
                }
            }
        }
        Tune(out)
    }

    /// Grammar equality up to rule renumbering: equal expansions and equal
    /// multisets of rhs lengths.
    pub fn equivalent(&self, other: &Grammar) -> bool {
        let lengths = |g: &Grammar| {
            let mut v: Vec<usize> = g.rules.values().map(Vec::len).collect();
            v.sort_unstable();
            v
        };
        match (self.expand(), other.expand()) {
            (Ok(a), Ok(b)) => a == b && lengths(self) == lengths(other),
            _ => false,
        }
    }
}

fn parse_rule_name(s: &str) -> Result<RuleId> {
    s.strip_prefix(['p', 'P'])
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| Error::InvalidGrammar(format!("bad rule name `{s}`")))
}

/// Canonical rendering: one rule per line, sorted by id.
impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (id, rhs) in &self.rules {
            write!(f, "p{id} ->")?;
            for s in rhs {
                write!(f, " {s}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MissingRoot,
    EmptyRule(RuleId),
    DanglingReference {
        rule: RuleId,
        target: RuleId,
    },
    Cycle(RuleId),
    RepeatedDigram {
        digram: (Symbol, Symbol),
        first: (RuleId, usize),
        second: (RuleId, usize),
    },
    UnderusedRule {
        rule: RuleId,
        uses: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingRoot => write!(f, "root rule p0 is missing"),
            Violation::EmptyRule(id) => write!(f, "p{id} has an empty right-hand side"),
            Violation::DanglingReference { rule, target } => {
                write!(f, "p{rule} references undefined rule p{target}")
            }
            Violation::Cycle(id) => write!(f, "cycle through p{id}"),
            Violation::RepeatedDigram {
                digram: (a, b),
                first,
                second,
            } => write!(
                f,
                "digram `{a} {b}` occurs at p{}[{}] and p{}[{}]",
                first.0, first.1, second.0, second.1
            ),
            Violation::UnderusedRule { rule, uses } => {
                write!(f, "p{rule} is referenced {uses} time(s)")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidityReport {
    pub structural: Vec<Violation>,
    pub canonical: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_structurally_valid(&self) -> bool {
        self.structural.is_empty()
    }

    /// Structurally valid and Sequitur-canonical.
    pub fn is_canonical(&self) -> bool {
        self.structural.is_empty() && self.canonical.is_empty()
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.structural.iter().chain(&self.canonical)
    }
}

/// The 19 grammar mutation operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MutationKind {
    AddRule,
    RemoveRule,
    MoveRuleWithin,
    MoveRuleAcross,
    SwapRulesWithin,
    SwapRulesAcross,
    AddNumber,
    RemoveNumber,
    MoveNumberWithin,
    MoveNumberAcross,
    SwapNumbersWithin,
    SwapNumbersAcross,
    SwapRuleNumberWithin,
    SwapRuleNumberAcross,
    Reverse,
    ReversePartially,
    SwapDefinitions,
    DefineRule,
    RemoveDefinition,
}

impl MutationKind {
    pub const ALL: [MutationKind; 19] = [
        MutationKind::AddRule,
        MutationKind::RemoveRule,
        MutationKind::MoveRuleWithin,
        MutationKind::MoveRuleAcross,
        MutationKind::SwapRulesWithin,
        MutationKind::SwapRulesAcross,
        MutationKind::AddNumber,
        MutationKind::RemoveNumber,
        MutationKind::MoveNumberWithin,
        MutationKind::MoveNumberAcross,
        MutationKind::SwapNumbersWithin,
        MutationKind::SwapNumbersAcross,
        MutationKind::SwapRuleNumberWithin,
        MutationKind::SwapRuleNumberAcross,
        MutationKind::Reverse,
        MutationKind::ReversePartially,
        MutationKind::SwapDefinitions,
        MutationKind::DefineRule,
        MutationKind::RemoveDefinition,
    ];

    const CODES: [&'static str; 19] = [
        "1A1", "1A2", "1A3A", "1A3B", "1A4A", "1A4B", "1B1", "1B2", "1B3A", "1B3B", "1B4A", "1B4B",
        "1C1A", "1C1B", "1C2", "1C3", "1D", "2A1", "2A2",
    ];

    /// 1-based operator number.
    pub fn index(self) -> u8 {
        self as u8 + 1
    }

    pub fn code(self) -> &'static str {
        Self::CODES[self as usize]
    }

    pub fn from_index(index: u8) -> Option<Self> {
        Self::ALL.get(usize::from(index).checked_sub(1)?).copied()
    }

    pub fn from_code(code: &str) -> Option<Self> {
        Self::CODES
            .iter()
            .position(|c| c.eq_ignore_ascii_case(code))
            .map(|i| Self::ALL[i])
    }
}

/// What a mutation does to the amount of material in a grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Effect {
    Inserts,
    Deletes,
    Rearranges,
    /// Creates a new rule (and a reference to it).
    Defines,
}

impl MutationKind {
    pub fn effect(self) -> Effect {
        use MutationKind::*;
        match self {
            AddRule | AddNumber => Effect::Inserts,
            RemoveRule | RemoveNumber | RemoveDefinition => Effect::Deletes,
            DefineRule => Effect::Defines,
            _ => Effect::Rearranges,
        }
    }
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Accepts either the index (`17`) or the code (`1D`).
impl FromStr for MutationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        s.parse::<u8>()
            .ok()
            .and_then(MutationKind::from_index)
            .or_else(|| MutationKind::from_code(s))
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// Distinct pitches available to note-generating mutations, frozen at the
/// original tune.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NoteAlphabet(Vec<Pitch>);

impl NoteAlphabet {
    pub fn from_tune(tune: &Tune) -> Result<Self> {
        Self::new(tune.notes().iter().copied())
    }

    pub fn new(notes: impl IntoIterator<Item = Pitch>) -> Result<Self> {
        let set: BTreeSet<Pitch> = notes.into_iter().collect();
        if set.is_empty() {
            return Err(Error::EmptyTune);
        }
        Ok(NoteAlphabet(set.into_iter().collect()))
    }

    /// Sorted, distinct.
    pub fn notes(&self) -> &[Pitch] {
        &self.0
    }

    pub fn contains(&self, p: Pitch) -> bool {
        self.0.binary_search(&p).is_ok()
    }
}

/// One step of a mutation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub kind: MutationKind,
    pub ed_vs_original: usize,
    pub ed_vs_previous: usize,
    pub length: usize,
    pub pai: usize,
}

impl TrajectoryRecord {
    /// Signed change of the distance to the original relative to `prev_ed`.
    pub fn ed_change(&self, prev_ed: usize) -> i64 {
        self.ed_vs_original as i64 - prev_ed as i64
    }
}
