//! The 19 grammar mutation operators.
//!
//! Every mutation is first resolved into a concrete [`Edit`] (which rule,
//! which position, which symbol) and then applied. Random mutation draws the
//! edit from a [`RandomSource`]; tests and forced runs build the edit by hand
//! and call [`apply_edit`] directly, which consumes no random draws.
//!
//! Candidate edits that would break the grammar (a cycle, an empty rule, a
//! purge that empties `p0`) are rejected and new targets are drawn, up to
//! [`MAX_ATTEMPTS`] times.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Grammar, MutationKind, NoteAlphabet, Pitch, RuleId, Symbol, ROOT};

pub const MAX_ATTEMPTS: u32 = 100;

/// Right-hand side length range of rules created by [`MutationKind::DefineRule`].
pub const NEW_RULE_LEN: std::ops::RangeInclusive<usize> = 2..=8;

/// Seeded ChaCha8 stream. The same seed and call sequence give the same
/// draws on every platform.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn in_range(&mut self, range: std::ops::RangeInclusive<usize>) -> usize {
        self.rng.random_range(range)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> Option<&'a T> {
        if items.is_empty() {
            None
        } else {
            Some(&items[self.below(items.len())])
        }
    }
}

/// A position in a rule's right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub rule: RuleId,
    pub index: usize,
}

impl Site {
    pub fn new(rule: RuleId, index: usize) -> Self {
        Site { rule, index }
    }
}

/// A fully resolved mutation. Indices refer to the grammar the edit is
/// applied to; `to` positions of moves index the sequence after removal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Edit {
    AddRule {
        rule: RuleId,
        host: RuleId,
        index: usize,
    },
    RemoveRule {
        site: Site,
    },
    MoveRuleWithin {
        site: Site,
        to: usize,
    },
    MoveRuleAcross {
        site: Site,
        target: RuleId,
        to: usize,
    },
    SwapRulesWithin {
        rule: RuleId,
        a: usize,
        b: usize,
    },
    SwapRulesAcross {
        a: Site,
        b: Site,
    },
    AddNumber {
        host: RuleId,
        index: usize,
        value: Pitch,
    },
    RemoveNumber {
        site: Site,
    },
    MoveNumberWithin {
        site: Site,
        to: usize,
    },
    MoveNumberAcross {
        site: Site,
        target: RuleId,
        to: usize,
    },
    SwapNumbersWithin {
        rule: RuleId,
        a: usize,
        b: usize,
    },
    SwapNumbersAcross {
        a: Site,
        b: Site,
    },
    SwapRuleNumberWithin {
        rule: RuleId,
        rule_at: usize,
        number_at: usize,
    },
    SwapRuleNumberAcross {
        rule_site: Site,
        number_site: Site,
    },
    Reverse {
        rule: RuleId,
    },
    ReversePartially {
        rule: RuleId,
        start: usize,
        len: usize,
    },
    SwapDefinitions {
        a: RuleId,
        b: RuleId,
    },
    DefineRule {
        rhs: Vec<Symbol>,
        host: RuleId,
        index: usize,
    },
    RemoveDefinition {
        rule: RuleId,
    },
}

impl Edit {
    pub fn kind(&self) -> MutationKind {
        use MutationKind as K;
        match self {
            Edit::AddRule { .. } => K::AddRule,
            Edit::RemoveRule { .. } => K::RemoveRule,
            Edit::MoveRuleWithin { .. } => K::MoveRuleWithin,
            Edit::MoveRuleAcross { .. } => K::MoveRuleAcross,
            Edit::SwapRulesWithin { .. } => K::SwapRulesWithin,
            Edit::SwapRulesAcross { .. } => K::SwapRulesAcross,
            Edit::AddNumber { .. } => K::AddNumber,
            Edit::RemoveNumber { .. } => K::RemoveNumber,
            Edit::MoveNumberWithin { .. } => K::MoveNumberWithin,
            Edit::MoveNumberAcross { .. } => K::MoveNumberAcross,
            Edit::SwapNumbersWithin { .. } => K::SwapNumbersWithin,
            Edit::SwapNumbersAcross { .. } => K::SwapNumbersAcross,
            Edit::SwapRuleNumberWithin { .. } => K::SwapRuleNumberWithin,
            Edit::SwapRuleNumberAcross { .. } => K::SwapRuleNumberAcross,
            Edit::Reverse { .. } => K::Reverse,
            Edit::ReversePartially { .. } => K::ReversePartially,
            Edit::SwapDefinitions { .. } => K::SwapDefinitions,
            Edit::DefineRule { .. } => K::DefineRule,
            Edit::RemoveDefinition { .. } => K::RemoveDefinition,
        }
    }
}

/// Result of one mutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationOutcome {
    pub kind: MutationKind,
    pub edit: Edit,
    pub grammar: Grammar,
    /// Rules whose right-hand side changed, were created, or were deleted.
    pub touched: Vec<RuleId>,
    /// Target draws used, including the successful one.
    pub attempts: u32,
}

fn reject(msg: impl Into<String>) -> Error {
    Error::InvalidEdit(msg.into())
}

struct Editor {
    grammar: Grammar,
    touched: BTreeSet<RuleId>,
}

impl Editor {
    fn new(grammar: &Grammar) -> Self {
        Editor {
            grammar: grammar.clone(),
            touched: BTreeSet::new(),
        }
    }

    fn rhs(&mut self, id: RuleId) -> Result<&mut Vec<Symbol>> {
        self.touched.insert(id);
        self.grammar
            .rules_mut()
            .get_mut(&id)
            .ok_or(Error::UnknownRule(id))
    }

    fn symbol_at(&self, site: Site) -> Result<Symbol> {
        self.grammar
            .rule(site.rule)
            .ok_or(Error::UnknownRule(site.rule))?
            .get(site.index)
            .copied()
            .ok_or_else(|| reject(format!("p{} has no index {}", site.rule, site.index)))
    }

    fn expect(&self, site: Site, want_rule: bool) -> Result<Symbol> {
        let sym = self.symbol_at(site)?;
        if sym.is_rule() != want_rule {
            let what = if want_rule {
                "rule reference"
            } else {
                "number"
            };
            return Err(reject(format!(
                "p{}[{}] is not a {what}",
                site.rule, site.index
            )));
        }
        Ok(sym)
    }

    fn insert(&mut self, host: RuleId, index: usize, sym: Symbol) -> Result<()> {
        let rhs = self.rhs(host)?;
        if index > rhs.len() {
            return Err(reject(format!("index {index} past the end of p{host}")));
        }
        rhs.insert(index, sym);
        Ok(())
    }

    fn remove(&mut self, site: Site) -> Result<Symbol> {
        let rhs = self.rhs(site.rule)?;
        if site.index >= rhs.len() {
            return Err(reject(format!(
                "p{} has no index {}",
                site.rule, site.index
            )));
        }
        Ok(rhs.remove(site.index))
    }

    fn set(&mut self, site: Site, sym: Symbol) -> Result<()> {
        let rhs = self.rhs(site.rule)?;
        *rhs.get_mut(site.index)
            .ok_or_else(|| reject(format!("p{} has no index {}", site.rule, site.index)))? = sym;
        Ok(())
    }

    fn move_within(&mut self, site: Site, to: usize) -> Result<()> {
        if to == site.index {
            return Err(reject("move to the same index"));
        }
        let sym = self.remove(site)?;
        self.insert(site.rule, to, sym)
    }

    fn move_across(&mut self, site: Site, target: RuleId, to: usize) -> Result<()> {
        if target == site.rule {
            return Err(reject("move across needs two distinct rules"));
        }
        if !self.grammar.contains(target) {
            return Err(Error::UnknownRule(target));
        }
        let sym = self.remove(site)?;
        self.insert(target, to, sym)
    }

    fn swap_within(&mut self, rule: RuleId, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(reject("swap needs two distinct positions"));
        }
        let rhs = self.rhs(rule)?;
        if a.max(b) >= rhs.len() {
            return Err(reject(format!("p{rule} is too short for swap")));
        }
        rhs.swap(a, b);
        Ok(())
    }

    fn swap_across(&mut self, a: Site, b: Site) -> Result<()> {
        if a.rule == b.rule {
            return Err(reject("swap across needs two distinct rules"));
        }
        let sa = self.symbol_at(a)?;
        let sb = self.symbol_at(b)?;
        self.set(a, sb)?;
        self.set(b, sa)
    }

    /// Deletes `rule` and every reference to it; hosts left empty are
    /// deleted in turn.
    fn purge(&mut self, rule: RuleId) -> Result<()> {
        if rule == ROOT {
            return Err(reject("p0 cannot be removed"));
        }
        if !self.grammar.contains(rule) {
            return Err(Error::UnknownRule(rule));
        }
        let mut queue = VecDeque::from([rule]);
        while let Some(victim) = queue.pop_front() {
            if victim == ROOT {
                return Err(reject("removal would empty p0"));
            }
            if self.grammar.rules_mut().remove(&victim).is_none() {
                continue;
            }
            self.touched.insert(victim);
            for (&id, rhs) in self.grammar.rules_mut().iter_mut() {
                let before = rhs.len();
                rhs.retain(|s| *s != Symbol::Rule(victim));
                if rhs.len() != before {
                    self.touched.insert(id);
                    if rhs.is_empty() {
                        queue.push_back(id);
                    }
                }
            }
        }
        Ok(())
    }

    fn finish(self, edit: &Edit) -> Result<MutationOutcome> {
        let report = self.grammar.validate();
        if let Some(v) = report.structural.first() {
            return Err(reject(v.to_string()));
        }
        let refs_root = self
            .grammar
            .rules()
            .any(|(_, rhs)| rhs.contains(&Symbol::Rule(ROOT)));
        if refs_root {
            return Err(reject("p0 must not be referenced"));
        }
        Ok(MutationOutcome {
            kind: edit.kind(),
            edit: edit.clone(),
            grammar: self.grammar,
            touched: self.touched.into_iter().collect(),
            attempts: 1,
        })
    }
}

/// Applies a concrete edit. Fails with [`Error::InvalidEdit`] if the edit
/// does not fit the grammar or would leave it structurally invalid.
pub fn apply_edit(grammar: &Grammar, edit: &Edit) -> Result<MutationOutcome> {
    grammar.check_structure()?;
    let mut ed = Editor::new(grammar);
    match *edit {
        Edit::AddRule { rule, host, index } => {
            if rule == ROOT {
                return Err(reject("p0 cannot be referenced"));
            }
            if !grammar.contains(rule) {
                return Err(Error::UnknownRule(rule));
            }
            ed.insert(host, index, Symbol::Rule(rule))?;
        }
        Edit::RemoveRule { site } => {
            ed.expect(site, true)?;
            ed.remove(site)?;
        }
        Edit::MoveRuleWithin { site, to } => {
            ed.expect(site, true)?;
            ed.move_within(site, to)?;
        }
        Edit::MoveRuleAcross { site, target, to } => {
            ed.expect(site, true)?;
            ed.move_across(site, target, to)?;
        }
        Edit::SwapRulesWithin { rule, a, b } => {
            ed.expect(Site::new(rule, a), true)?;
            ed.expect(Site::new(rule, b), true)?;
            ed.swap_within(rule, a, b)?;
        }
        Edit::SwapRulesAcross { a, b } => {
            ed.expect(a, true)?;
            ed.expect(b, true)?;
            ed.swap_across(a, b)?;
        }
        Edit::AddNumber { host, index, value } => {
            ed.insert(host, index, Symbol::Terminal(value))?;
        }
        Edit::RemoveNumber { site } => {
            ed.expect(site, false)?;
            ed.remove(site)?;
        }
        Edit::MoveNumberWithin { site, to } => {
            ed.expect(site, false)?;
            ed.move_within(site, to)?;
        }
        Edit::MoveNumberAcross { site, target, to } => {
            ed.expect(site, false)?;
            ed.move_across(site, target, to)?;
        }
        Edit::SwapNumbersWithin { rule, a, b } => {
            ed.expect(Site::new(rule, a), false)?;
            ed.expect(Site::new(rule, b), false)?;
            ed.swap_within(rule, a, b)?;
        }
        Edit::SwapNumbersAcross { a, b } => {
            ed.expect(a, false)?;
            ed.expect(b, false)?;
            ed.swap_across(a, b)?;
        }
        Edit::SwapRuleNumberWithin {
            rule,
            rule_at,
            number_at,
        } => {
            ed.expect(Site::new(rule, rule_at), true)?;
            ed.expect(Site::new(rule, number_at), false)?;
            ed.swap_within(rule, rule_at, number_at)?;
        }
        Edit::SwapRuleNumberAcross {
            rule_site,
            number_site,
        } => {
            ed.expect(rule_site, true)?;
            ed.expect(number_site, false)?;
            ed.swap_across(rule_site, number_site)?;
        }
        Edit::Reverse { rule } => {
            ed.rhs(rule)?.reverse();
        }
        Edit::ReversePartially { rule, start, len } => {
            let rhs = ed.rhs(rule)?;
            if len < 2 || len >= rhs.len() || start + len > rhs.len() {
                return Err(reject(format!(
                    "span {start}+{len} is not a strict sub-span of p{rule}"
                )));
            }
            rhs[start..start + len].reverse();
        }
        Edit::SwapDefinitions { a, b } => {
            if a == b {
                return Err(reject("swap needs two distinct rules"));
            }
            let ra = ed.rhs(a)?.clone();
            let rb = std::mem::replace(ed.rhs(b)?, ra);
            *ed.rhs(a)? = rb;
        }
        Edit::DefineRule {
            ref rhs,
            host,
            index,
        } => {
            if rhs.is_empty() {
                return Err(reject("new rule needs a non-empty definition"));
            }
            if let Some(&bad) = rhs.iter().find(|s| {
                s.rule_ref()
                    .is_some_and(|id| id == ROOT || !grammar.contains(id))
            }) {
                return Err(reject(format!("new rule cannot reference {bad}")));
            }
            if !grammar.contains(host) {
                return Err(Error::UnknownRule(host));
            }
            let id = grammar.next_rule_id();
            ed.grammar.rules_mut().insert(id, rhs.clone());
            ed.touched.insert(id);
            ed.insert(host, index, Symbol::Rule(id))?;
        }
        Edit::RemoveDefinition { rule } => ed.purge(rule)?,
    }
    ed.finish(edit)
}

/// All positions holding a rule reference (`refs == true`) or a number.
fn sites(g: &Grammar, refs: bool) -> Vec<Site> {
    g.rules()
        .flat_map(|(id, rhs)| {
            rhs.iter()
                .enumerate()
                .filter(move |(_, s)| s.is_rule() == refs)
                .map(move |(i, _)| Site::new(id, i))
        })
        .collect()
}

fn non_root(g: &Grammar) -> Vec<RuleId> {
    g.rule_ids().into_iter().filter(|&id| id != ROOT).collect()
}

fn rhs_len(g: &Grammar, id: RuleId) -> usize {
    g.rule(id).map_or(0, <[Symbol]>::len)
}

/// Uniform `to` index for moving one symbol within a rule of length `len`,
/// excluding the identity move. Returns `from` when no other index exists.
fn other_index(rng: &mut RandomSource, len: usize, from: usize) -> usize {
    if len < 2 {
        return from;
    }
    let to = rng.below(len - 1);
    if to >= from {
        to + 1
    } else {
        to
    }
}

/// Draws one candidate edit of `kind`. `None` when the grammar has no
/// sites of the required shape at all.
pub fn sample_edit(
    g: &Grammar,
    kind: MutationKind,
    alphabet: &NoteAlphabet,
    rng: &mut RandomSource,
) -> Option<Edit> {
    use MutationKind as K;
    let ids = g.rule_ids();
    let edit = match kind {
        K::AddRule => {
            let rule = *rng.pick(&non_root(g))?;
            let host = *rng.pick(&ids)?;
            let index = rng.below(rhs_len(g, host) + 1);
            Edit::AddRule { rule, host, index }
        }
        K::RemoveRule => Edit::RemoveRule {
            site: *rng.pick(&sites(g, true))?,
        },
        K::RemoveNumber => Edit::RemoveNumber {
            site: *rng.pick(&sites(g, false))?,
        },
        K::MoveRuleWithin | K::MoveNumberWithin => {
            let site = *rng.pick(&sites(g, kind == K::MoveRuleWithin))?;
            let to = other_index(rng, rhs_len(g, site.rule), site.index);
            if kind == K::MoveRuleWithin {
                Edit::MoveRuleWithin { site, to }
            } else {
                Edit::MoveNumberWithin { site, to }
            }
        }
        K::MoveRuleAcross | K::MoveNumberAcross => {
            let site = *rng.pick(&sites(g, kind == K::MoveRuleAcross))?;
            let others: Vec<RuleId> = ids.iter().copied().filter(|&r| r != site.rule).collect();
            let target = *rng.pick(&others)?;
            let to = rng.below(rhs_len(g, target) + 1);
            if kind == K::MoveRuleAcross {
                Edit::MoveRuleAcross { site, target, to }
            } else {
                Edit::MoveNumberAcross { site, target, to }
            }
        }
        K::SwapRulesWithin | K::SwapNumbersWithin => {
            let refs = kind == K::SwapRulesWithin;
            let all = sites(g, refs);
            let eligible: Vec<Site> = all
                .iter()
                .copied()
                .filter(|s| all.iter().filter(|o| o.rule == s.rule).count() >= 2)
                .collect();
            let a = *rng.pick(&eligible)?;
            let partners: Vec<usize> = eligible
                .iter()
                .filter(|o| o.rule == a.rule && o.index != a.index)
                .map(|o| o.index)
                .collect();
            let b = *rng.pick(&partners)?;
            if refs {
                Edit::SwapRulesWithin {
                    rule: a.rule,
                    a: a.index,
                    b,
                }
            } else {
                Edit::SwapNumbersWithin {
                    rule: a.rule,
                    a: a.index,
                    b,
                }
            }
        }
        K::SwapRulesAcross | K::SwapNumbersAcross => {
            let all = sites(g, kind == K::SwapRulesAcross);
            let a = *rng.pick(&all)?;
            let partners: Vec<Site> = all.iter().copied().filter(|o| o.rule != a.rule).collect();
            let b = *rng.pick(&partners)?;
            if kind == K::SwapRulesAcross {
                Edit::SwapRulesAcross { a, b }
            } else {
                Edit::SwapNumbersAcross { a, b }
            }
        }
        K::AddNumber => {
            let host = *rng.pick(&ids)?;
            let index = rng.below(rhs_len(g, host) + 1);
            let value = *rng.pick(alphabet.notes())?;
            Edit::AddNumber { host, index, value }
        }
        K::SwapRuleNumberWithin => {
            let numbers = sites(g, false);
            let refs: Vec<Site> = sites(g, true)
                .into_iter()
                .filter(|s| numbers.iter().any(|n| n.rule == s.rule))
                .collect();
            let r = *rng.pick(&refs)?;
            let candidates: Vec<usize> = numbers
                .iter()
                .filter(|n| n.rule == r.rule)
                .map(|n| n.index)
                .collect();
            let number_at = *rng.pick(&candidates)?;
            Edit::SwapRuleNumberWithin {
                rule: r.rule,
                rule_at: r.index,
                number_at,
            }
        }
        K::SwapRuleNumberAcross => {
            let numbers = sites(g, false);
            let refs: Vec<Site> = sites(g, true)
                .into_iter()
                .filter(|s| numbers.iter().any(|n| n.rule != s.rule))
                .collect();
            let rule_site = *rng.pick(&refs)?;
            let candidates: Vec<Site> = numbers
                .into_iter()
                .filter(|n| n.rule != rule_site.rule)
                .collect();
            let number_site = *rng.pick(&candidates)?;
            Edit::SwapRuleNumberAcross {
                rule_site,
                number_site,
            }
        }
        K::Reverse => Edit::Reverse {
            rule: *rng.pick(&ids)?,
        },
        K::ReversePartially => {
            let eligible: Vec<RuleId> = ids
                .iter()
                .copied()
                .filter(|&r| rhs_len(g, r) >= 3)
                .collect();
            let rule = *rng.pick(&eligible)?;
            let n = rhs_len(g, rule);
            // spans of length 2..n-1; length l has n-l+1 starts
            let total: usize = (2..n).map(|l| n - l + 1).sum();
            let mut k = rng.below(total);
            let mut len = 2;
            while k > n - len {
                k -= n - len + 1;
                len += 1;
            }
            Edit::ReversePartially {
                rule,
                start: k,
                len,
            }
        }
        K::SwapDefinitions => {
            let a = *rng.pick(&ids)?;
            let others: Vec<RuleId> = ids.iter().copied().filter(|&r| r != a).collect();
            let b = *rng.pick(&others)?;
            Edit::SwapDefinitions { a, b }
        }
        K::DefineRule => {
            let existing = non_root(g);
            let len = rng.in_range(NEW_RULE_LEN);
            let rhs = (0..len)
                .map(|_| {
                    if rng.coin() && !existing.is_empty() {
                        Symbol::Rule(existing[rng.below(existing.len())])
                    } else {
                        Symbol::Terminal(alphabet.notes()[rng.below(alphabet.notes().len())])
                    }
                })
                .collect();
            let host = *rng.pick(&ids)?;
            let index = rng.below(rhs_len(g, host) + 1);
            Edit::DefineRule { rhs, host, index }
        }
        K::RemoveDefinition => Edit::RemoveDefinition {
            rule: *rng.pick(&non_root(g))?,
        },
    };
    Some(edit)
}

/// True iff at least one concrete edit of `kind` applies to `g`.
pub fn applicable(g: &Grammar, kind: MutationKind) -> bool {
    use MutationKind as K;
    if g.check_structure().is_err() {
        return false;
    }
    let refs = sites(g, true);
    let numbers = sites(g, false);
    let len = |id: RuleId| rhs_len(g, id);
    let ids = g.rule_ids();
    let ok = |edit: Edit| apply_edit(g, &edit).is_ok();
    match kind {
        K::AddRule => non_root(g).into_iter().any(|r| {
            let reach = g.reachable_from(r);
            ids.iter().any(|h| !reach.contains(h))
        }),
        K::RemoveRule | K::MoveRuleWithin => refs.iter().any(|s| len(s.rule) >= 2),
        K::RemoveNumber | K::MoveNumberWithin => numbers.iter().any(|s| len(s.rule) >= 2),
        K::MoveRuleAcross => refs.iter().any(|s| {
            if len(s.rule) < 2 {
                return false;
            }
            let Some(Symbol::Rule(r)) = g.rule(s.rule).map(|rhs| rhs[s.index]) else {
                return false;
            };
            let reach = g.reachable_from(r);
            ids.iter().any(|&t| t != s.rule && !reach.contains(&t))
        }),
        K::MoveNumberAcross => ids.len() >= 2 && numbers.iter().any(|s| len(s.rule) >= 2),
        K::SwapRulesWithin => ids
            .iter()
            .any(|&id| refs.iter().filter(|s| s.rule == id).count() >= 2),
        K::SwapNumbersWithin => ids
            .iter()
            .any(|&id| numbers.iter().filter(|s| s.rule == id).count() >= 2),
        K::SwapRulesAcross => refs.iter().any(|&a| {
            refs.iter()
                .any(|&b| a.rule < b.rule && ok(Edit::SwapRulesAcross { a, b }))
        }),
        K::SwapNumbersAcross => numbers
            .iter()
            .any(|a| numbers.iter().any(|b| a.rule != b.rule)),
        K::AddNumber | K::Reverse | K::DefineRule => true,
        K::SwapRuleNumberWithin => refs
            .iter()
            .any(|r| numbers.iter().any(|n| n.rule == r.rule)),
        K::SwapRuleNumberAcross => refs.iter().any(|&rule_site| {
            let Some(Symbol::Rule(r)) = g.rule(rule_site.rule).map(|rhs| rhs[rule_site.index])
            else {
                return false;
            };
            let reach = g.reachable_from(r);
            numbers
                .iter()
                .any(|n| n.rule != rule_site.rule && !reach.contains(&n.rule))
        }),
        K::ReversePartially => ids.iter().any(|&id| len(id) >= 3),
        K::SwapDefinitions => ids.iter().any(|&a| {
            ids.iter()
                .any(|&b| a < b && ok(Edit::SwapDefinitions { a, b }))
        }),
        K::RemoveDefinition => non_root(g)
            .into_iter()
            .any(|rule| ok(Edit::RemoveDefinition { rule })),
    }
}

/// Applies one mutation of `kind` with randomly drawn targets.
pub fn apply_mutation(
    g: &Grammar,
    kind: MutationKind,
    alphabet: &NoteAlphabet,
    rng: &mut RandomSource,
) -> Result<MutationOutcome> {
    if !applicable(g, kind) {
        return Err(Error::InapplicableKind(kind));
    }
    for attempt in 1..=MAX_ATTEMPTS {
        let Some(edit) = sample_edit(g, kind, alphabet, rng) else {
            break;
        };
        match apply_edit(g, &edit) {
            Ok(mut outcome) => {
                outcome.attempts = attempt;
                return Ok(outcome);
            }
            Err(Error::InvalidEdit(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ResamplingExhausted {
        kind,
        attempts: MAX_ATTEMPTS,
    })
}

/// Draws a kind uniformly from those not in `excluded`, redrawing (without
/// replacement) while the drawn kind cannot be applied.
pub fn random_mutation(
    g: &Grammar,
    alphabet: &NoteAlphabet,
    rng: &mut RandomSource,
    excluded: &BTreeSet<MutationKind>,
) -> Result<MutationOutcome> {
    let mut pool: Vec<MutationKind> = MutationKind::ALL
        .into_iter()
        .filter(|k| !excluded.contains(k))
        .collect();
    if pool.is_empty() {
        return Err(Error::InvalidConfig(
            "every mutation kind is excluded".into(),
        ));
    }
    while !pool.is_empty() {
        let kind = pool.remove(rng.below(pool.len()));
        if !applicable(g, kind) {
            continue;
        }
        match apply_mutation(g, kind, alphabet, rng) {
            Ok(outcome) => return Ok(outcome),
            Err(Error::ResamplingExhausted { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoApplicableMutation)
}

/// The default exclusion set: [`MutationKind::DefineRule`] only.
pub fn default_excluded() -> BTreeSet<MutationKind> {
    BTreeSet::from([MutationKind::DefineRule])
}
