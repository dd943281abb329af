//! Marked ε-NFAs for regular expressions and their counter products.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::formula::{Formula, PropFormula, Regex, COLOR_PROP};

/// Thompson automaton whose states may carry a test formula.
///
/// Every component has a unique final state without outgoing edges, which
/// keeps the "pass through" and "accept" cases of ε-removal disjoint.
#[derive(Debug, Clone)]
pub struct MarkedNfa {
    pub names: Vec<String>,
    pub initial: usize,
    pub finals: Vec<bool>,
    pub eps: Vec<Vec<usize>>,
    pub letters: Vec<Vec<(PropFormula, usize)>>,
    pub marking: Vec<Option<Formula>>,
}

/// One simple ε-path from a fixed source, summarized by its endpoint and the
/// tests marked on the visited states.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EpsPath {
    pub target: usize,
    pub tests: BTreeSet<Formula>,
    pub is_final: bool,
}

impl MarkedNfa {
    fn empty() -> Self {
        MarkedNfa { names: vec![], initial: 0, finals: vec![], eps: vec![], letters: vec![], marking: vec![] }
    }

    fn add_state(&mut self) -> usize {
        let id = self.names.len();
        self.names.push(format!("q{id}"));
        self.finals.push(false);
        self.eps.push(Vec::new());
        self.letters.push(Vec::new());
        self.marking.push(None);
        id
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn final_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states()).filter(|&q| self.finals[q])
    }

    /// Simple ε-paths from `q` (including the trivial one), with dominated
    /// paths removed: of two paths to the same endpoint, the one whose test
    /// set contains the other's is dropped.
    pub fn epsilon_paths(&self, q: usize) -> Vec<EpsPath> {
        let mut found: HashMap<usize, Vec<BTreeSet<Formula>>> = HashMap::new();
        let mut on_path = vec![false; self.num_states()];
        let mut tests = Vec::new();
        self.walk(q, &mut on_path, &mut tests, &mut found);
        let mut out = Vec::new();
        for (target, sets) in found {
            let mut sets = sets;
            sets.sort_by_key(|s| s.len());
            sets.dedup();
            let mut kept: Vec<BTreeSet<Formula>> = Vec::new();
            for s in sets {
                if !kept.iter().any(|k| k.is_subset(&s)) {
                    kept.push(s);
                }
            }
            out.extend(kept.into_iter().map(|tests| EpsPath { target, tests, is_final: self.finals[target] }));
        }
        out.sort();
        out
    }

    fn walk(&self, q: usize, on_path: &mut [bool], tests: &mut Vec<Formula>, found: &mut HashMap<usize, Vec<BTreeSet<Formula>>>) {
        on_path[q] = true;
        let marked = self.marking[q].clone();
        if let Some(t) = &marked {
            tests.push(t.clone());
        }
        found.entry(q).or_default().push(tests.iter().cloned().collect());
        for &next in &self.eps[q] {
            if !on_path[next] {
                self.walk(next, on_path, tests, found);
            }
        }
        if marked.is_some() {
            tests.pop();
        }
        on_path[q] = false;
    }

    /// Whether the automaton accepts the finite word `word`, where a marked
    /// state may only be visited at position `i` if `test(psi, i)` holds.
    pub fn accepts(&self, word: &[PropAssignment<'_>], test: &dyn Fn(&Formula, usize) -> bool) -> bool {
        let mut current = self.closure(&[self.initial], 0, test);
        for (i, letter) in word.iter().enumerate() {
            let mut next = Vec::new();
            for q in current.iter().copied() {
                for (g, t) in &self.letters[q] {
                    if g.eval(letter) {
                        next.push(*t);
                    }
                }
            }
            current = self.closure(&next, i + 1, test);
        }
        current.iter().any(|&q| self.finals[q])
    }

    fn closure(&self, from: &[usize], pos: usize, test: &dyn Fn(&Formula, usize) -> bool) -> BTreeSet<usize> {
        let ok = |q: usize| self.marking[q].as_ref().is_none_or(|t| test(t, pos));
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = from.iter().copied().filter(|&q| ok(q)).collect();
        while let Some(q) = stack.pop() {
            if seen.insert(q) {
                stack.extend(self.eps[q].iter().copied().filter(|&n| ok(n)));
            }
        }
        seen
    }
}

/// Truth assignment for one letter.
pub type PropAssignment<'a> = &'a dyn Fn(&str) -> bool;

/// Builds the marked ε-NFA of `r` by the Thompson construction.
pub fn thompson(r: &Regex) -> MarkedNfa {
    let mut nfa = MarkedNfa::empty();
    let (init, fin) = build(r, &mut nfa);
    nfa.initial = init;
    nfa.finals[fin] = true;
    nfa
}

fn build(r: &Regex, nfa: &mut MarkedNfa) -> (usize, usize) {
    match r {
        Regex::Prop(g) => {
            let (s, t) = (nfa.add_state(), nfa.add_state());
            nfa.letters[s].push((g.clone(), t));
            (s, t)
        }
        Regex::Test(body) => {
            let (s, t) = (nfa.add_state(), nfa.add_state());
            nfa.marking[s] = Some((**body).clone());
            nfa.eps[s].push(t);
            (s, t)
        }
        Regex::Choice(l, rhs) => {
            let s = nfa.add_state();
            let (l0, l1) = build(l, nfa);
            let (r0, r1) = build(rhs, nfa);
            let t = nfa.add_state();
            nfa.eps[s].extend([l0, r0]);
            nfa.eps[l1].push(t);
            nfa.eps[r1].push(t);
            (s, t)
        }
        Regex::Seq(l, rhs) => {
            let (l0, l1) = build(l, nfa);
            let (r0, r1) = build(rhs, nfa);
            nfa.eps[l1].push(r0);
            (l0, r1)
        }
        Regex::Star(inner) => {
            let s = nfa.add_state();
            let (i0, i1) = build(inner, nfa);
            let t = nfa.add_state();
            nfa.eps[s].extend([i0, t]);
            nfa.eps[i1].extend([i0, t]);
            (s, t)
        }
    }
}

/// The deterministic six-state automaton over the color bit that accepts the
/// finite words with at most one internal color change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChangepointDfa;

impl ChangepointDfa {
    pub const NAMES: [&'static str; 6] = ["e", "b", "y", "by", "yb", "s"];
    pub const INITIAL: usize = 0;
    pub const SINK: usize = 5;

    /// `colored` is the truth value of the color proposition in the letter.
    pub fn step(state: usize, colored: bool) -> usize {
        match (state, colored) {
            (0, true) => 1,
            (0, false) => 2,
            (1, true) => 1,
            (1, false) => 3,
            (2, false) => 2,
            (2, true) => 4,
            (3, false) => 3,
            (4, true) => 4,
            _ => Self::SINK,
        }
    }

    pub fn accepting(state: usize) -> bool {
        state != Self::SINK
    }

    pub fn accepts(colors: &[bool]) -> bool {
        Self::accepting(colors.iter().fold(Self::INITIAL, |s, &c| Self::step(s, c)))
    }
}

/// A deterministic counter run alongside a regex automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Counter {
    /// At most one color change inside the matched infix.
    Changepoint,
    /// At most this many letters in the matched infix.
    Length(u64),
}

/// Product of `nfa` with a counter; ε-moves keep the counter, only
/// reachable pairs are built, and pairs whose counter has overflowed are
/// dropped (they can never reach a final pair).
pub fn counter_product(nfa: &MarkedNfa, counter: Counter) -> MarkedNfa {
    let mut out = MarkedNfa::empty();
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let label = |q: usize, c: usize| match counter {
        Counter::Changepoint => format!("{}.{}", nfa.names[q], ChangepointDfa::NAMES[c]),
        Counter::Length(_) => format!("{}.{}", nfa.names[q], c),
    };
    let mut intern = |q: usize, c: usize, out: &mut MarkedNfa, queue: &mut VecDeque<(usize, usize)>| -> usize {
        *ids.entry((q, c)).or_insert_with(|| {
            let id = out.add_state();
            out.names[id] = label(q, c);
            out.finals[id] = nfa.finals[q];
            out.marking[id] = nfa.marking[q].clone();
            queue.push_back((q, c));
            id
        })
    };
    out.initial = intern(nfa.initial, 0, &mut out, &mut queue);
    while let Some((q, c)) = queue.pop_front() {
        let id = intern(q, c, &mut out, &mut queue);
        for &n in &nfa.eps[q] {
            let t = intern(n, c, &mut out, &mut queue);
            out.eps[id].push(t);
        }
        for (g, n) in &nfa.letters[q] {
            match counter {
                Counter::Changepoint => {
                    for colored in [true, false] {
                        let c2 = ChangepointDfa::step(c, colored);
                        if !ChangepointDfa::accepting(c2) {
                            continue;
                        }
                        let color = PropFormula::var(COLOR_PROP);
                        let lit = if colored { color } else { color.not() };
                        let t = intern(*n, c2, &mut out, &mut queue);
                        out.letters[id].push((g.clone().and(lit), t));
                    }
                }
                Counter::Length(limit) => {
                    if (c as u64) < limit {
                        let t = intern(*n, c + 1, &mut out, &mut queue);
                        out.letters[id].push((g.clone(), t));
                    }
                }
            }
        }
    }
    out
}
