//! Sequitur grammar induction, expansion and the pathway assembly index.
//!
//! The inducer is the classic online algorithm: symbols are appended to the
//! root rule one at a time, and after each append two constraints are
//! restored.
//!
//! * digram uniqueness: no pair of adjacent symbols occurs twice in the
//!   grammar (overlapping occurrences such as `a a a` excepted);
//! * rule utility: every rule other than the root is used at least twice.
//!
//! Rules are doubly linked lists of nodes stored in an arena, each closed by a
//! guard node, and a hash index maps every digram to its one occurrence.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{Grammar, Pitch, RuleId, Symbol, Tune, ROOT};

/// Builds the Sequitur grammar of `tune`.
pub fn induce(tune: &Tune) -> Result<Grammar> {
    if tune.is_empty() {
        return Err(Error::EmptyTune);
    }
    let mut builder = Builder::new();
    for &note in tune.notes() {
        builder.push(note);
    }
    Ok(builder.finish())
}

/// Expansion of `p0`.
pub fn expand(grammar: &Grammar) -> Result<Tune> {
    grammar.expand()
}

/// Expansion of one rule.
pub fn expand_rule(grammar: &Grammar, id: RuleId) -> Result<Tune> {
    grammar.expand_rule(id)
}

/// Pathway assembly index: joins summed over all rules.
pub fn pai(grammar: &Grammar) -> usize {
    grammar.pai()
}

/// Successive differences; one element shorter than the input.
pub fn to_intervals(tune: &Tune) -> Result<Tune> {
    if tune.len() < 2 {
        return Err(Error::TuneTooShort {
            needed: 2,
            got: tune.len(),
        });
    }
    Ok(tune.notes().windows(2).map(|w| w[1] - w[0]).collect())
}

type NodeId = usize;
type Slot = usize;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Key {
    Term(Pitch),
    Rule(Slot),
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Guard(Slot),
    Term(Pitch),
    Rule(Slot),
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    prev: NodeId,
    next: NodeId,
}

#[derive(Debug)]
struct RuleSlot {
    guard: NodeId,
    uses: usize,
    live: bool,
}

struct Builder {
    nodes: Vec<Node>,
    rules: Vec<RuleSlot>,
    digrams: HashMap<(Key, Key), NodeId>,
}

impl Builder {
    fn new() -> Self {
        let mut b = Builder {
            nodes: Vec::new(),
            rules: Vec::new(),
            digrams: HashMap::new(),
        };
        b.new_rule();
        b
    }

    fn new_rule(&mut self) -> Slot {
        let slot = self.rules.len();
        let guard = self.nodes.len();
        self.nodes.push(Node {
            kind: Kind::Guard(slot),
            prev: guard,
            next: guard,
        });
        self.rules.push(RuleSlot {
            guard,
            uses: 0,
            live: true,
        });
        slot
    }

    fn new_node(&mut self, kind: Kind) -> NodeId {
        if let Kind::Rule(slot) = kind {
            self.rules[slot].uses += 1;
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            kind,
            prev: id,
            next: id,
        });
        id
    }

    fn next(&self, n: NodeId) -> NodeId {
        self.nodes[n].next
    }

    fn prev(&self, n: NodeId) -> NodeId {
        self.nodes[n].prev
    }

    fn is_linked(&self, n: NodeId) -> bool {
        self.nodes[n].next != n
    }

    fn is_guard(&self, n: NodeId) -> bool {
        matches!(self.nodes[n].kind, Kind::Guard(_))
    }

    fn key(&self, n: NodeId) -> Key {
        match self.nodes[n].kind {
            Kind::Term(v) => Key::Term(v),
            Kind::Rule(s) => Key::Rule(s),
            Kind::Guard(_) => unreachable!("guard has no digram key"),
        }
    }

    fn digram_key(&self, n: NodeId) -> Option<(Key, Key)> {
        let m = self.next(n);
        if self.is_guard(n) || self.is_guard(m) {
            None
        } else {
            Some((self.key(n), self.key(m)))
        }
    }

    fn first(&self, slot: Slot) -> NodeId {
        self.next(self.rules[slot].guard)
    }

    fn last(&self, slot: Slot) -> NodeId {
        self.prev(self.rules[slot].guard)
    }

    /// Removes the index entry for the digram starting at `n` if it points at `n`.
    fn forget_digram(&mut self, n: NodeId) {
        if let Some(key) = self.digram_key(n) {
            if self.digrams.get(&key) == Some(&n) {
                self.digrams.remove(&key);
            }
        }
    }

    fn join(&mut self, left: NodeId, right: NodeId) {
        if self.is_linked(left) {
            self.forget_digram(left);
            // `x x x`: the surviving overlapped occurrence must stay indexed
            if self.is_triple(right) {
                let key = (self.key(right), self.key(right));
                self.digrams.insert(key, right);
            }
            if self.is_triple(left) {
                let p = self.prev(left);
                let key = (self.key(left), self.key(left));
                self.digrams.insert(key, p);
            }
        }
        self.nodes[left].next = right;
        self.nodes[right].prev = left;
    }

    /// Whether `n` is a middle of three identical, linked, non-guard symbols.
    fn is_triple(&self, n: NodeId) -> bool {
        let node = &self.nodes[n];
        if node.prev == n || node.next == n || self.is_guard(n) {
            return false;
        }
        let (p, q) = (node.prev, node.next);
        if self.is_guard(p) || self.is_guard(q) {
            return false;
        }
        let k = self.key(n);
        self.key(p) == k && self.key(q) == k
    }

    fn insert_after(&mut self, left: NodeId, node: NodeId) {
        let right = self.next(left);
        self.join(node, right);
        self.join(left, node);
    }

    /// Unlinks `n`, releasing its digrams and its rule use.
    fn delete(&mut self, n: NodeId) {
        let (p, q) = (self.prev(n), self.next(n));
        self.join(p, q);
        self.forget_digram(n);
        if let Kind::Rule(slot) = self.nodes[n].kind {
            self.rules[slot].uses -= 1;
        }
        self.nodes[n].prev = n;
        self.nodes[n].next = n;
    }

    fn push(&mut self, note: Pitch) {
        let root_last = self.last(0);
        let node = self.new_node(Kind::Term(note));
        self.insert_after(root_last, node);
        let prev = self.prev(node);
        self.check(prev);
    }

    /// Enforces digram uniqueness for the digram starting at `n`. Returns
    /// true if the digram was already indexed (and therefore handled).
    fn check(&mut self, n: NodeId) -> bool {
        if !self.is_linked(n) {
            return false;
        }
        let Some(key) = self.digram_key(n) else {
            return false;
        };
        match self.digrams.get(&key).copied() {
            None => {
                self.digrams.insert(key, n);
                false
            }
            Some(m) if m == n => false,
            Some(m) if !self.is_linked(m) || self.digram_key(m) != Some(key) => {
                self.digrams.insert(key, n);
                false
            }
            Some(m) => {
                if self.next(m) != n && self.next(n) != m {
                    self.matched(n, m);
                }
                true
            }
        }
    }

    /// `new` and `old` start the same digram.
    fn matched(&mut self, new: NodeId, old: NodeId) {
        let slot = if self.is_guard(self.prev(old)) && self.is_guard(self.next(self.next(old))) {
            let Kind::Guard(slot) = self.nodes[self.prev(old)].kind else {
                unreachable!()
            };
            self.substitute(new, slot);
            slot
        } else {
            let slot = self.new_rule();
            let a = self.nodes[new].kind;
            let b = self.nodes[self.next(new)].kind;
            for kind in [a, b] {
                let node = self.new_node(kind);
                let last = self.last(slot);
                self.insert_after(last, node);
            }
            self.substitute(old, slot);
            self.substitute(new, slot);
            let first = self.first(slot);
            if let Some(key) = self.digram_key(first) {
                self.digrams.insert(key, first);
            }
            slot
        };
        let first = self.first(slot);
        self.inline_if_underused(first);
    }

    fn inline_if_underused(&mut self, n: NodeId) {
        if let Kind::Rule(inner) = self.nodes[n].kind {
            if self.rules[inner].uses == 1 {
                self.expand_use(n);
            }
        }
    }

    /// Replaces the digram starting at `n` with a reference to rule `slot`.
    fn substitute(&mut self, n: NodeId, slot: Slot) {
        let q = self.prev(n);
        let a = self.next(q);
        self.delete(a);
        let b = self.next(q);
        self.delete(b);
        let node = self.new_node(Kind::Rule(slot));
        self.insert_after(q, node);
        if !self.check(q) {
            let next = self.next(q);
            self.check(next);
        }
    }

    /// Inlines the rule referenced by `n`, which is its only use.
    fn expand_use(&mut self, n: NodeId) {
        let Kind::Rule(slot) = self.nodes[n].kind else {
            return;
        };
        let left = self.prev(n);
        let right = self.next(n);
        let first = self.first(slot);
        let last = self.last(slot);

        self.forget_digram(n);
        self.rules[slot].live = false;
        self.rules[slot].uses = 0;
        let guard = self.rules[slot].guard;
        self.nodes[guard].next = guard;
        self.nodes[guard].prev = guard;
        self.nodes[n].prev = n;
        self.nodes[n].next = n;

        self.join(left, first);
        self.join(last, right);
        if let Some(key) = self.digram_key(last) {
            self.digrams.insert(key, last);
        }
    }

    /// Collects live rules, numbering them breadth-first from the root.
    fn finish(self) -> Grammar {
        let mut ids: HashMap<Slot, RuleId> = HashMap::new();
        ids.insert(0, ROOT);
        let mut order = vec![0];
        let mut queue = VecDeque::from([0]);
        while let Some(slot) = queue.pop_front() {
            for kind in self.rule_kinds(slot) {
                if let Kind::Rule(s) = kind {
                    if let Entry::Vacant(e) = ids.entry(s) {
                        e.insert(order.len() as RuleId);
                        order.push(s);
                        queue.push_back(s);
                    }
                }
            }
        }
        Grammar::from_rules(order.iter().map(|&slot| {
            let rhs = self
                .rule_kinds(slot)
                .map(|k| match k {
                    Kind::Term(v) => Symbol::Terminal(v),
                    Kind::Rule(s) => Symbol::Rule(ids[&s]),
                    Kind::Guard(_) => unreachable!(),
                })
                .collect();
            (ids[&slot], rhs)
        }))
    }

    fn rule_kinds(&self, slot: Slot) -> impl Iterator<Item = Kind> + '_ {
        let guard = self.rules[slot].guard;
        let mut cur = self.next(guard);
        std::iter::from_fn(move || {
            if cur == guard {
                None
            } else {
                let k = self.nodes[cur].kind;
                cur = self.next(cur);
                Some(k)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tune(v: &[Pitch]) -> Tune {
        Tune::from(v)
    }

    fn encode(s: &str) -> Tune {
        s.bytes().map(Pitch::from).collect()
    }

    #[test]
    fn empty_tune_rejected() {
        assert!(matches!(induce(&Tune::default()), Err(Error::EmptyTune)));
    }

    #[test]
    fn single_note() {
        let g = induce(&tune(&[5])).unwrap();
        assert_eq!(g.to_string(), "p0 -> 5\n");
        assert_eq!(pai(&g), 0);
    }

    #[test]
    fn repeated_pair_becomes_rule() {
        let g = induce(&tune(&[1, 2, 1, 2])).unwrap();
        assert_eq!(g.to_string(), "p0 -> p1 p1\np1 -> 1 2\n");
    }

    #[test]
    fn overlapping_runs() {
        for n in 1..40 {
            let t = tune(&vec![4; n]);
            let g = induce(&t).unwrap();
            assert_eq!(expand(&g).unwrap(), t, "n={n}\n{g}");
            assert!(
                g.validate().is_canonical(),
                "n={n}\n{g}\n{:?}",
                g.validate()
            );
        }
    }

    #[test]
    fn kitten_style_words_round_trip() {
        for w in [
            "abracadabra",
            "mississippi",
            "abcabcabcabc",
            "aabaaab",
            "banana",
        ] {
            let g = induce(&encode(w)).unwrap();
            assert_eq!(expand(&g).unwrap(), encode(w), "{w}");
            assert!(g.validate().is_canonical(), "{w}\n{g}");
        }
    }

    #[test]
    fn intervals() {
        assert_eq!(to_intervals(&tune(&[2, 11, 7])).unwrap().notes(), &[9, -4]);
        assert_eq!(to_intervals(&tune(&[4, 4, 4])).unwrap().notes(), &[0, 0]);
        assert!(matches!(
            to_intervals(&tune(&[1])),
            Err(Error::TuneTooShort { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn deterministic_rendering() {
        let t = encode("the quick brown fox jumps over the lazy dog the quick brown fox");
        assert_eq!(
            induce(&t).unwrap().to_string(),
            induce(&t).unwrap().to_string()
        );
    }
}
