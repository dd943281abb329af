//! Nondeterministic Büchi automata over explicit letters.
//!
//! Alternation is removed with the Miyano–Hayashi breakpoint construction:
//! a state `(S, O)` tracks the current level `S` of a run DAG and the
//! obligations `O ⊆ S` that still owe a visit to an accepting state; it is
//! accepting when `O` is empty.

use std::collections::HashMap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::automata::posbool::{conjoin, StateSet};
use crate::automata::{Aba, Alphabet, Mask, PosBool};
use crate::graph::{accepting_lasso, reachable, sccs, Lasso};
use crate::semantics::LassoWord;

pub const DEFAULT_STATE_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NbaError {
    #[error("alternation removal exceeded {0} states")]
    Cap(usize),
}

#[derive(Debug, Clone)]
pub struct Nba {
    alphabet: Alphabet,
    names: Vec<String>,
    accepting: Vec<bool>,
    initial: usize,
    /// `succ[q][letter]` indexes into `sets`.
    succ: Vec<Vec<u32>>,
    sets: Vec<Vec<usize>>,
}

/// Successor-set interner shared by construction helpers.
#[derive(Default)]
struct SetPool {
    sets: Vec<Vec<usize>>,
    ids: HashMap<Vec<usize>, u32>,
}

impl SetPool {
    fn intern(&mut self, mut set: Vec<usize>) -> u32 {
        set.sort_unstable();
        set.dedup();
        if let Some(&id) = self.ids.get(&set) {
            return id;
        }
        let id = self.sets.len() as u32;
        self.sets.push(set.clone());
        self.ids.insert(set, id);
        id
    }
}

impl Nba {
    /// Builds an NBA from an explicit table `delta[q][letter] = targets`.
    pub fn from_table(alphabet: Alphabet, initial: usize, accepting: Vec<bool>, delta: Vec<Vec<Vec<usize>>>) -> Self {
        let mut pool = SetPool::default();
        let succ = delta.into_iter().map(|row| row.into_iter().map(|t| pool.intern(t)).collect()).collect();
        let names = (0..accepting.len()).map(|i| format!("n{i}")).collect();
        Nba { alphabet, names, accepting, initial, succ, sets: pool.sets }
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn successors(&self, q: usize, letter: Mask) -> &[usize] {
        &self.sets[self.succ[q][letter as usize] as usize]
    }

    /// Letter-independent successor lists.
    pub fn graph(&self) -> Vec<Vec<usize>> {
        (0..self.num_states())
            .map(|q| {
                let mut out: Vec<usize> = self.succ[q].iter().flat_map(|&s| self.sets[s as usize].iter().copied()).collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect()
    }

    /// Whether every state has at most one successor per letter.
    pub fn is_deterministic(&self) -> bool {
        self.succ.iter().flatten().all(|&s| self.sets[s as usize].len() <= 1)
    }

    /// `w ∈ L(self)`, decided on the product with the lasso's positions.
    pub fn membership(&self, w: &LassoWord) -> bool {
        let positions = w.period_len();
        let masks: Vec<Mask> = (0..positions).map(|i| self.alphabet.mask(w.letter(i))).collect();
        let id = |q: usize, i: usize| q * positions + i;
        let mut succ = vec![Vec::new(); self.num_states() * positions];
        for q in 0..self.num_states() {
            for i in 0..positions {
                let next = w.succ(i);
                succ[id(q, i)] = self.successors(q, masks[i]).iter().map(|&t| id(t, next)).collect();
            }
        }
        accepting_lasso(&succ, &[id(self.initial, 0)], &|v| self.accepting[v / positions]).is_some()
    }

    /// `None` if the language is empty, otherwise an accepted lasso word.
    pub fn is_empty(&self) -> Option<LassoWord> {
        let run = accepting_lasso(&self.graph(), &[self.initial], &|q| self.accepting[q])?;
        Some(self.word_of_run(&run))
    }

    /// Letters labeling a lasso-shaped run.
    pub fn word_of_run(&self, run: &Lasso<usize>) -> LassoWord {
        let letter = |from: usize, to: usize| {
            let m = self.alphabet.masks().find(|&m| self.successors(from, m).contains(&to)).expect("edge exists");
            self.alphabet.letter(m)
        };
        let mut prefix = Vec::new();
        for (i, &v) in run.prefix.iter().enumerate() {
            let next = run.prefix.get(i + 1).copied().unwrap_or(run.cycle[0]);
            prefix.push(letter(v, next));
        }
        let cycle: Vec<_> = (0..run.cycle.len()).map(|i| letter(run.cycle[i], run.cycle[(i + 1) % run.cycle.len()])).collect();
        LassoWord::new(prefix, cycle).expect("cycle is non-empty")
    }

    /// Removes states that are unreachable or cannot reach an accepting cycle.
    pub fn trim(&self) -> Nba {
        let graph = self.graph();
        let (order, _) = reachable(&graph, &[self.initial]);
        // Live states: those in or reaching a non-trivial SCC with an accepting state.
        let mut live = vec![false; self.num_states()];
        for comp in sccs(&graph, &[self.initial]) {
            let nontrivial = comp.len() > 1 || graph[comp[0]].contains(&comp[0]);
            if nontrivial && comp.iter().any(|&q| self.accepting[q]) {
                comp.iter().for_each(|&q| live[q] = true);
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for &q in &order {
                if !live[q] && graph[q].iter().any(|&t| live[t]) {
                    live[q] = true;
                    changed = true;
                }
            }
        }
        let mut keep: Vec<usize> = order.into_iter().filter(|&q| live[q]).collect();
        if !live[self.initial] {
            keep = vec![self.initial];
        }
        let mut index = vec![usize::MAX; self.num_states()];
        for (i, &q) in keep.iter().enumerate() {
            index[q] = i;
        }
        let mut pool = SetPool::default();
        let succ = keep
            .iter()
            .map(|&q| {
                self.succ[q]
                    .iter()
                    .map(|&s| {
                        let t: Vec<usize> = self.sets[s as usize].iter().filter(|&&t| index[t] != usize::MAX).map(|&t| index[t]).collect();
                        pool.intern(t)
                    })
                    .collect()
            })
            .collect();
        Nba {
            alphabet: self.alphabet.clone(),
            names: keep.iter().map(|&q| self.names[q].clone()).collect(),
            accepting: keep.iter().map(|&q| self.accepting[q] && live[q]).collect(),
            initial: index[self.initial],
            succ,
            sets: pool.sets,
        }
    }

    fn edges(&self, q: usize) -> Vec<(String, usize)> {
        let mut by_target: HashMap<usize, FixedBitSet> = HashMap::new();
        for m in self.alphabet.masks() {
            for &t in self.successors(q, m) {
                by_target.entry(t).or_insert_with(|| FixedBitSet::with_capacity(self.alphabet.size())).insert(m as usize);
            }
        }
        let mut out: Vec<_> = by_target.into_iter().map(|(t, set)| (self.alphabet.guard(&set).to_string(), t)).collect();
        out.sort_by(|a, b| (self.name(a.1), &a.0).cmp(&(self.name(b.1), &b.0)));
        out
    }

    pub fn to_text(&self) -> String {
        let acc: Vec<&str> = (0..self.num_states()).filter(|&q| self.accepting[q]).map(|q| self.name(q)).collect();
        let mut s = format!("nba states={} initial={} accepting={}\n", self.num_states(), self.name(self.initial), acc.join(","));
        for q in 0..self.num_states() {
            for (g, t) in self.edges(q) {
                let _ = writeln!(s, "trans {} {} {}", self.name(q), g, self.name(t));
            }
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph nba {\n  rankdir=LR;\n  init [shape=point];\n");
        for q in 0..self.num_states() {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  \"{}\" [shape={shape}];", self.name(q));
        }
        let _ = writeln!(s, "  init -> \"{}\";", self.name(self.initial));
        for q in 0..self.num_states() {
            for (g, t) in self.edges(q) {
                let _ = writeln!(s, "  \"{}\" -> \"{}\" [label=\"{}\"];", self.name(q), self.name(t), g);
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Miyano–Hayashi construction with the default state cap.
pub fn remove_alternation(a: &Aba) -> Result<Nba, NbaError> {
    remove_alternation_with_cap(a, DEFAULT_STATE_CAP)
}

pub fn remove_alternation_with_cap(a: &Aba, cap: usize) -> Result<Nba, NbaError> {
    let n = a.num_states();
    let alphabet = a.alphabet().clone();
    let letters = alphabet.size();

    // Self-looping sinks fold to constants: an accepting one imposes nothing,
    // a rejecting one can never be left.
    let sink = |q: usize| (*a.delta(q) == PosBool::State(q)).then_some(a.is_accepting(q));
    let models: Vec<Vec<Vec<StateSet>>> = (0..n)
        .map(|q| {
            alphabet
                .masks()
                .map(|m| a.step(q, m).substitute(&|s| sink(s)).minimal_models(n))
                .collect()
        })
        .collect();
    let accepting: FixedBitSet = (0..n).filter(|&q| a.is_accepting(q)).collect::<FixedBitSet>();
    let successors_of = |set: &StateSet, m: usize| -> Vec<StateSet> {
        let mut acc = vec![StateSet::with_capacity(n)];
        for q in set.ones() {
            acc = conjoin(&acc, &models[q][m]);
            if acc.is_empty() {
                break;
            }
        }
        acc
    };
    let minus_accepting = |s: &StateSet| {
        let mut o = s.clone();
        o.difference_with(&accepting);
        o
    };

    let mut init_s = StateSet::with_capacity(n);
    let init_q = a.initial();
    let init_is_sink = sink(init_q);
    if init_is_sink.is_none() {
        init_s.insert(init_q);
    }
    let init_o = minus_accepting(&init_s);
    let mut ids: HashMap<(StateSet, StateSet), usize> = HashMap::new();
    let mut states: Vec<(StateSet, StateSet)> = Vec::new();
    let mut pool = SetPool::default();
    let mut succ: Vec<Vec<u32>> = Vec::new();
    let mut acc_flags = Vec::new();

    let dead = init_is_sink == Some(false);
    ids.insert((init_s.clone(), init_o.clone()), 0);
    states.push((init_s, init_o));
    let mut next = 0;
    while next < states.len() {
        let (s, o) = states[next].clone();
        acc_flags.push(o.count_ones(..) == 0 && !dead);
        let mut row = Vec::with_capacity(letters);
        for m in 0..letters {
            let mut targets = Vec::new();
            if !dead {
                let mut children: Vec<(StateSet, StateSet)> = Vec::new();
                if o.count_ones(..) == 0 {
                    for s2 in successors_of(&s, m) {
                        let o2 = minus_accepting(&s2);
                        children.push((s2, o2));
                    }
                } else {
                    let mut rest = s.clone();
                    rest.difference_with(&o);
                    let owed = successors_of(&o, m);
                    if !owed.is_empty() {
                        let free = successors_of(&rest, m);
                        for y in &owed {
                            for x in &free {
                                let mut s2 = y.clone();
                                s2.union_with(x);
                                children.push((s2, minus_accepting(y)));
                            }
                        }
                    }
                }
                for child in children {
                    let id = match ids.get(&child) {
                        Some(&id) => id,
                        None => {
                            let id = states.len();
                            if id >= cap {
                                return Err(NbaError::Cap(cap));
                            }
                            ids.insert(child.clone(), id);
                            states.push(child);
                            id
                        }
                    };
                    targets.push(id);
                }
            }
            row.push(pool.intern(targets));
        }
        succ.push(row);
        next += 1;
    }
    let names = (0..states.len()).map(|i| format!("n{i}")).collect();
    Ok(Nba { alphabet, names, accepting: acc_flags, initial: 0, succ, sets: pool.sets })
}
