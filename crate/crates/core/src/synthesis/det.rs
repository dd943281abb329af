//! Safra-style determinization of Büchi automata into max-parity automata.
//!
//! States are compact Safra trees: every node has a name in `1..=|Q|`,
//! younger nodes carry larger names, and names are compacted after each
//! step. A step spawns a child holding the accepting part of each label,
//! moves all labels, merges horizontally (a state stays only in the oldest
//! branch holding it), drops empty nodes and collapses nodes whose children
//! cover them (those turn green). The smallest green or removed name gives
//! the priority of the step.

use std::collections::HashMap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::automata::{Alphabet, Mask};
use crate::nba::Nba;
use crate::semantics::LassoWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetError {
    #[error("determinization exceeded {0} states")]
    Cap(usize),
}

/// Deterministic parity automaton; a run is accepting iff the largest
/// priority seen infinitely often is even.
#[derive(Debug, Clone)]
pub struct Dpa {
    alphabet: Alphabet,
    names: Vec<String>,
    /// Safra tree of each state, for diagnostics.
    trees: Vec<String>,
    delta: Vec<Vec<u32>>,
    priority: Vec<u32>,
    initial: usize,
}

impl Dpa {
    pub fn from_table(alphabet: Alphabet, initial: usize, priority: Vec<u32>, delta: Vec<Vec<u32>>) -> Self {
        let names = (0..priority.len()).map(|i| format!("d{i}")).collect();
        let trees = vec![String::new(); priority.len()];
        Dpa { alphabet, names, trees, delta, priority, initial }
    }

    pub fn num_states(&self) -> usize {
        self.priority.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn tree(&self, q: usize) -> &str {
        &self.trees[q]
    }

    pub fn priority(&self, q: usize) -> u32 {
        self.priority[q]
    }

    pub fn step(&self, q: usize, letter: Mask) -> usize {
        self.delta[q][letter as usize] as usize
    }

    pub fn max_priority(&self) -> u32 {
        self.priority.iter().copied().max().unwrap_or(0)
    }

    pub fn membership(&self, w: &LassoWord) -> bool {
        let masks: Vec<Mask> = (0..w.period_len()).map(|i| self.alphabet.mask(w.letter(i))).collect();
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut trail = Vec::new();
        let (mut q, mut pos) = (self.initial, 0);
        loop {
            if let Some(&start) = seen.get(&(q, pos)) {
                let top = trail[start..].iter().map(|&s| self.priority[s]).max().unwrap();
                return top % 2 == 0;
            }
            seen.insert((q, pos), trail.len());
            trail.push(q);
            q = self.step(q, masks[pos]);
            pos = w.succ(pos);
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("dpa states={} initial={} priorities={}\n", self.num_states(), self.name(self.initial), self.max_priority());
        for q in 0..self.num_states() {
            let _ = writeln!(s, "state {} priority={} tree={}", self.name(q), self.priority[q], self.trees[q]);
        }
        for q in 0..self.num_states() {
            let mut by_target: HashMap<usize, FixedBitSet> = HashMap::new();
            for m in self.alphabet.masks() {
                by_target.entry(self.step(q, m)).or_insert_with(|| FixedBitSet::with_capacity(self.alphabet.size())).insert(m as usize);
            }
            let mut edges: Vec<(usize, String)> = by_target.into_iter().map(|(t, set)| (t, self.alphabet.guard(&set).to_string())).collect();
            edges.sort();
            for (t, g) in edges {
                let _ = writeln!(s, "trans {} {} {}", self.name(q), g, self.name(t));
            }
        }
        s
    }
}

#[derive(Debug, Clone)]
struct Node {
    name: usize,
    parent: Option<usize>,
    label: FixedBitSet,
    children: Vec<usize>,
    alive: bool,
    newborn: bool,
}

/// Canonical encoding: per node in name order, `name, parent name (0 for
/// the root), label size, label states`.
type TreeKey = Vec<u32>;

fn decode(key: &[u32], n: usize) -> Vec<Node> {
    let mut nodes: Vec<Node> = Vec::new();
    let mut i = 0;
    while i < key.len() {
        let (name, parent_name, len) = (key[i] as usize, key[i + 1] as usize, key[i + 2] as usize);
        let mut label = FixedBitSet::with_capacity(n);
        for &q in &key[i + 3..i + 3 + len] {
            label.insert(q as usize);
        }
        let parent = (parent_name != 0).then(|| nodes.iter().position(|x| x.name == parent_name).expect("parent precedes child"));
        let idx = nodes.len();
        if let Some(p) = parent {
            nodes[p].children.push(idx);
        }
        nodes.push(Node { name, parent, label, children: Vec::new(), alive: true, newborn: false });
        i += 3 + len;
    }
    nodes
}

fn encode(nodes: &[Node]) -> TreeKey {
    let mut live: Vec<usize> = (0..nodes.len()).filter(|&v| nodes[v].alive).collect();
    live.sort_by_key(|&v| nodes[v].name);
    let mut rename = HashMap::new();
    for (i, &v) in live.iter().enumerate() {
        rename.insert(v, i as u32 + 1);
    }
    let mut key = Vec::new();
    for &v in &live {
        key.push(rename[&v]);
        key.push(nodes[v].parent.map_or(0, |p| rename[&p]));
        key.push(nodes[v].label.count_ones(..) as u32);
        key.extend(nodes[v].label.ones().map(|q| q as u32));
    }
    key
}

struct Stepper<'a> {
    nba: &'a Nba,
    accepting: FixedBitSet,
}

impl Stepper<'_> {
    fn n(&self) -> usize {
        self.nba.num_states()
    }

    /// Successor tree and min-parity priority (`2|Q|+1` when nothing happens).
    fn step(&self, key: &[u32], letter: Mask) -> (TreeKey, u32) {
        let n = self.n();
        let mut nodes = decode(key, n);
        let existing = nodes.len();
        let mut next_name = nodes.iter().map(|x| x.name).max().unwrap_or(0) + 1;
        for v in 0..existing {
            let mut fin = nodes[v].label.clone();
            fin.intersect_with(&self.accepting);
            if !fin.is_clear() {
                let idx = nodes.len();
                nodes.push(Node { name: next_name, parent: Some(v), label: fin, children: Vec::new(), alive: true, newborn: true });
                nodes[v].children.push(idx);
                next_name += 1;
            }
        }
        for node in nodes.iter_mut() {
            let mut next = FixedBitSet::with_capacity(n);
            for q in node.label.ones() {
                for &t in self.nba.successors(q, letter) {
                    next.insert(t);
                }
            }
            node.label = next;
        }
        if let Some(root) = (0..nodes.len()).find(|&v| nodes[v].parent.is_none()) {
            merge_horizontally(&mut nodes, root);
        }
        let mut red = usize::MAX;
        let mut green = usize::MAX;
        for v in 0..nodes.len() {
            if nodes[v].label.is_clear() {
                nodes[v].alive = false;
                if !nodes[v].newborn {
                    red = red.min(nodes[v].name);
                }
            }
        }
        // Parents precede children in `nodes` except for newborns, which have
        // no children of their own, so index order is a valid top-down order.
        for v in 0..nodes.len() {
            if !nodes[v].alive {
                continue;
            }
            let live_children: Vec<usize> = nodes[v].children.iter().copied().filter(|&c| nodes[c].alive).collect();
            if live_children.is_empty() {
                continue;
            }
            let mut union = FixedBitSet::with_capacity(n);
            for &c in &live_children {
                union.union_with(&nodes[c].label);
            }
            if union == nodes[v].label {
                green = green.min(nodes[v].name);
                let mut stack = live_children;
                while let Some(d) = stack.pop() {
                    if nodes[d].alive {
                        nodes[d].alive = false;
                        if !nodes[d].newborn {
                            red = red.min(nodes[d].name);
                        }
                        stack.extend(nodes[d].children.iter().copied());
                    }
                }
            }
        }
        let p = if green < red {
            2 * green
        } else if red != usize::MAX {
            2 * red - 1
        } else {
            2 * n + 1
        };
        (encode(&nodes), p as u32)
    }
}

fn merge_horizontally(nodes: &mut [Node], v: usize) {
    let mut taken = FixedBitSet::with_capacity(nodes[v].label.len());
    let children = nodes[v].children.clone();
    let parent_label = nodes[v].label.clone();
    for c in children {
        nodes[c].label.intersect_with(&parent_label);
        nodes[c].label.difference_with(&taken);
        taken.union_with(&nodes[c].label);
        merge_horizontally(nodes, c);
    }
}

fn describe(key: &[u32]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < key.len() {
        let len = key[i + 2] as usize;
        let label: Vec<String> = key[i + 3..i + 3 + len].iter().map(u32::to_string).collect();
        let _ = write!(out, "{}<{}:{{{}}}", key[i], key[i + 1], label.join(","));
        i += 3 + len;
        if i < key.len() {
            out.push(' ');
        }
    }
    if out.is_empty() {
        out.push_str("empty");
    }
    out
}

/// Determinizes `nba`; priorities lie in `1..=2|Q|+1`.
pub fn determinize(nba: &Nba, cap: usize) -> Result<Dpa, DetError> {
    let n = nba.num_states();
    let stepper = Stepper { nba, accepting: (0..n).filter(|&q| nba.is_accepting(q)).collect::<FixedBitSet>() };
    let to_max = |p: u32| 2 * n as u32 + 2 - p;
    let root: TreeKey = vec![1, 0, 1, nba.initial() as u32];
    let start = (root, 1u32);
    let mut ids: HashMap<(TreeKey, u32), usize> = HashMap::new();
    let mut states = vec![start.clone()];
    ids.insert(start, 0);
    let mut delta = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let key = states[i].0.clone();
        let mut row = Vec::with_capacity(nba.alphabet().size());
        for m in nba.alphabet().masks() {
            let (next, p) = stepper.step(&key, m);
            let target = (next, to_max(p));
            let id = match ids.get(&target) {
                Some(&id) => id,
                None => {
                    if states.len() >= cap {
                        return Err(DetError::Cap(cap));
                    }
                    ids.insert(target.clone(), states.len());
                    states.push(target);
                    states.len() - 1
                }
            };
            row.push(id as u32);
        }
        delta.push(row);
        i += 1;
    }
    let names = states.iter().enumerate().map(|(i, _)| format!("d{i}")).collect();
    let trees = states.iter().map(|s| describe(&s.0)).collect();
    let priority = states.iter().map(|s| s.1).collect();
    Ok(Dpa { alphabet: nba.alphabet().clone(), names, trees, delta, priority, initial: 0 })
}
