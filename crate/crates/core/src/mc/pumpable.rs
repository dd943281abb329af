//! Colored Büchi graphs and the search for pumpable fair paths.
//!
//! A path is pumpable when every block (maximal single-color infix) repeats
//! some vertex; a final infinite block repeats one trivially. The search
//! runs a Büchi emptiness check on an augmented graph whose vertices carry a
//! guessed vertex to be seen twice in the current block and a flag recording
//! whether that already happened; leaving a block requires the flag.

use std::collections::HashMap;

use crate::graph::{accepting_lasso, Lasso};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    pub succ: Vec<Vec<usize>>,
    pub initial: usize,
    pub colored: Vec<bool>,
    pub fair: Vec<bool>,
}

impl ColoredGraph {
    pub fn num_vertices(&self) -> usize {
        self.succ.len()
    }
}

/// Augmented search graph: vertex `(v, guess, done)` where `guess == |V|`
/// means no guess is pending.
#[derive(Debug, Clone)]
pub struct Augmented {
    pub succ: Vec<Vec<usize>>,
    pub roots: Vec<usize>,
    n: usize,
}

impl Augmented {
    pub fn num_vertices(&self) -> usize {
        self.succ.len()
    }

    fn id(&self, v: usize, guess: usize, done: bool) -> usize {
        (v * (self.n + 1) + guess) * 2 + done as usize
    }

    pub fn vertex(&self, id: usize) -> usize {
        id / 2 / (self.n + 1)
    }
}

/// Successors of augmented vertex `(v, guess, done)`; `guess == |V|` means
/// no pending guess.
fn augmented_successors(g: &ColoredGraph, v: usize, guess: usize, done: bool, out: &mut Vec<(usize, usize, bool)>) {
    let none = g.num_vertices();
    out.clear();
    for &t in &g.succ[v] {
        if g.colored[t] == g.colored[v] {
            if done {
                out.push((t, none, true));
            } else if guess == none {
                out.push((t, none, false));
                out.push((t, t, false));
            } else if t == guess {
                out.push((t, none, true));
            } else {
                out.push((t, guess, false));
            }
        } else if done {
            out.push((t, none, false));
            out.push((t, t, false));
        }
    }
}

/// The full augmented graph, with all `|V|·(|V|+1)·2` vertices.
pub fn augment(g: &ColoredGraph) -> Augmented {
    let n = g.num_vertices();
    let mut aug = Augmented { succ: vec![Vec::new(); n * (n + 1) * 2], roots: Vec::new(), n };
    aug.roots = vec![aug.id(g.initial, n, false), aug.id(g.initial, g.initial, false)];
    let mut buf = Vec::new();
    for v in 0..n {
        for guess in 0..=n {
            for done in [false, true] {
                augmented_successors(g, v, guess, done, &mut buf);
                let from = aug.id(v, guess, done);
                aug.succ[from] = buf.iter().map(|&(t, h, d)| aug.id(t, h, d)).collect();
            }
        }
    }
    aug
}

/// A pumpable fair initial path, projected back to `g`. Only the reachable
/// part of the augmented graph is materialized.
pub fn pumpable_fair_path(g: &ColoredGraph) -> Option<Lasso<usize>> {
    let n = g.num_vertices();
    type Key = (usize, usize, bool);
    let mut ids: HashMap<Key, usize> = HashMap::new();
    let mut keys: Vec<Key> = vec![(g.initial, n, false), (g.initial, g.initial, false)];
    ids.insert(keys[0], 0);
    ids.insert(keys[1], 1);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut buf = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let (v, guess, done) = keys[i];
        augmented_successors(g, v, guess, done, &mut buf);
        let row = buf
            .iter()
            .map(|k| {
                *ids.entry(*k).or_insert_with(|| {
                    keys.push(*k);
                    keys.len() - 1
                })
            })
            .collect();
        succ.push(row);
        i += 1;
    }
    let run = accepting_lasso(&succ, &[0, 1], &|a| g.fair[keys[a].0])?;
    Some(run.map(|&a| keys[a].0))
}

/// Reference decision procedure that tracks the full set of vertices seen in
/// the current block (exponential, for small graphs only).
pub fn pumpable_fair_path_naive(g: &ColoredGraph) -> bool {
    assert!(g.num_vertices() <= 64, "naive search supports at most 64 vertices");
    type Key = (usize, u64, bool);
    let mut ids: HashMap<Key, usize> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let start = (g.initial, 1u64 << g.initial, false);
    ids.insert(start, 0);
    keys.push(start);
    let mut i = 0;
    while i < keys.len() {
        let (v, seen, repeated) = keys[i];
        let mut out = Vec::new();
        for &t in &g.succ[v] {
            let next = if g.colored[t] == g.colored[v] {
                Some((t, seen | 1 << t, repeated || seen >> t & 1 == 1))
            } else if repeated {
                Some((t, 1 << t, false))
            } else {
                None
            };
            if let Some(key) = next {
                let id = *ids.entry(key).or_insert_with(|| {
                    keys.push(key);
                    keys.len() - 1
                });
                out.push(id);
            }
        }
        succ.push(out);
        i += 1;
    }
    accepting_lasso(&succ, &[0], &|k| g.fair[keys[k].0]).is_some()
}

/// Repeats a vertex-repeating cycle inside every block of `path` until each
/// block has length at least `k`. The loop is first rotated to start at a
/// changepoint so that no block wraps around it. Paths whose loop never
/// changes color are returned unchanged.
pub fn pump(path: &Lasso<usize>, colored: &dyn Fn(usize) -> bool, k: usize) -> Lasso<usize> {
    let (p, l) = (path.prefix.len(), path.cycle.len());
    let color = |n: usize| colored(*path.at(n));
    let Some(j) = (p + 1..=p + l).find(|&j| color(j) != color(j - 1)) else {
        return path.clone();
    };
    let prefix: Vec<usize> = (0..j).map(|n| *path.at(n)).collect();
    let cycle: Vec<usize> = (j..j + l).map(|n| *path.at(n)).collect();
    let stretch = |seq: &[usize]| -> Vec<usize> {
        let mut out = Vec::new();
        let mut start = 0;
        while start < seq.len() {
            let mut end = start + 1;
            while end < seq.len() && colored(seq[end]) == colored(seq[start]) {
                end += 1;
            }
            let block = &seq[start..end];
            out.extend(stretch_block(block, k));
            start = end;
        }
        out
    };
    Lasso { prefix: stretch(&prefix), cycle: stretch(&cycle) }
}

fn stretch_block(block: &[usize], k: usize) -> Vec<usize> {
    let mut first_seen = HashMap::new();
    for (i, v) in block.iter().enumerate() {
        if let Some(&a) = first_seen.get(v) {
            let segment = &block[a..i];
            let mut out = block[..a].to_vec();
            let mut len = block.len();
            out.extend_from_slice(segment);
            while len < k {
                out.extend_from_slice(segment);
                len += segment.len();
            }
            out.extend_from_slice(&block[i..]);
            return out;
        }
        first_seen.insert(*v, i);
    }
    block.to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(succ: Vec<Vec<usize>>, colored: Vec<bool>, fair: Vec<bool>) -> ColoredGraph {
        ColoredGraph { succ, initial: 0, colored, fair }
    }

    #[test]
    fn color_flipping_every_step_is_not_pumpable() {
        let g = graph(vec![vec![1], vec![0]], vec![false, true], vec![true, true]);
        assert!(pumpable_fair_path(&g).is_none());
        assert!(!pumpable_fair_path_naive(&g));
    }

    #[test]
    fn constant_color_self_loop_is_pumpable() {
        let g = graph(vec![vec![0]], vec![false], vec![true]);
        let path = pumpable_fair_path(&g).unwrap();
        assert_eq!(path.cycle, vec![0]);
        assert!(pumpable_fair_path_naive(&g));
    }

    #[test]
    fn blocks_with_self_loops_are_pumpable() {
        // 0 (uncolored, self-loop) <-> 1 (colored, self-loop)
        let g = graph(vec![vec![0, 1], vec![1, 0]], vec![false, true], vec![false, true]);
        assert!(pumpable_fair_path(&g).is_some());
        assert!(pumpable_fair_path_naive(&g));
    }

    #[test]
    fn augmented_size() {
        let g = graph(vec![vec![1], vec![2], vec![0]], vec![false, true, false], vec![true; 3]);
        assert_eq!(augment(&g).num_vertices(), 3 * 4 * 2);
    }

    #[test]
    fn pumping_lengthens_every_block() {
        let colored = |v: usize| v >= 2;
        // blocks: [0 0] [2 2] repeated
        let path = Lasso { prefix: vec![], cycle: vec![0, 0, 2, 2] };
        let pumped = pump(&path, &colored, 5);
        let n = pumped.len() * 3;
        let mut run = 1;
        for i in pumped.prefix.len() + 1..n {
            if colored(*pumped.at(i)) == colored(*pumped.at(i - 1)) {
                run += 1;
            } else {
                assert!(run >= 5 || i <= pumped.prefix.len() + run, "short block");
                run = 1;
            }
        }
    }
}
