//! Parity games: the arena built from a DPA and Zielonka's algorithm.

use fixedbitset::FixedBitSet;
use thiserror::Error;

use super::det::Dpa;
use crate::automata::Mask;
use crate::formula::COLOR_PROP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    /// Chooses inputs; wins when the largest priority seen infinitely often is odd.
    Input,
    /// Chooses outputs; wins on even.
    Output,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Input => Player::Output,
            Player::Output => Player::Input,
        }
    }

    fn of_priority(p: u32) -> Player {
        if p % 2 == 0 {
            Player::Output
        } else {
            Player::Input
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
}

impl ParityGame {
    pub fn num_vertices(&self) -> usize {
        self.owner.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("proposition `{0}` is both an input and an output")]
    Overlap(String),
    #[error("proposition `{0}` is neither an input nor an output")]
    Unassigned(String),
}

/// The arena `Q ∪ (Q × 2^I)`: at `q` the input player picks `i`, at `(q, i)`
/// the output player picks `o ⊆ O ∪ {_cp}` and the play moves to
/// `δ(q, i ∪ o)`. `Q` vertices come first, then `(q, i)` at
/// `|Q| + q·2^|I| + i`.
#[derive(Debug, Clone)]
pub struct SynthesisGame {
    pub game: ParityGame,
    pub num_automaton_states: usize,
    /// Letter masks (over the DPA alphabet) of each input choice.
    pub input_masks: Vec<Mask>,
    /// Letter masks of each output choice.
    pub output_masks: Vec<Mask>,
    /// For `(q, i)` vertices: the output choice of each edge in `succ`.
    pub labels: Vec<Vec<usize>>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl SynthesisGame {
    pub fn q_vertex(&self, q: usize) -> usize {
        q
    }

    pub fn choice_vertex(&self, q: usize, i: usize) -> usize {
        self.num_automaton_states + q * self.input_masks.len() + i
    }
}

/// Builds the synthesis arena. Only propositions of the DPA alphabet are
/// used; the color proposition always belongs to the outputs.
pub fn build_game(dpa: &Dpa, inputs: &[String], outputs: &[String]) -> Result<SynthesisGame, GameError> {
    if let Some(p) = inputs.iter().find(|p| outputs.contains(p)) {
        return Err(GameError::Overlap(p.clone()));
    }
    if inputs.iter().any(|p| p == COLOR_PROP) {
        return Err(GameError::Overlap(COLOR_PROP.into()));
    }
    let alphabet = dpa.alphabet();
    let mut in_props = Vec::new();
    let mut out_props = Vec::new();
    for p in alphabet.props() {
        if inputs.contains(p) {
            in_props.push(p.clone());
        } else if outputs.contains(p) || p == COLOR_PROP {
            out_props.push(p.clone());
        } else {
            return Err(GameError::Unassigned(p.clone()));
        }
    }
    let masks_of = |props: &[String]| -> Vec<Mask> {
        let bits: Vec<Mask> = props.iter().map(|p| 1 << alphabet.index(p).unwrap()).collect();
        (0..1usize << bits.len())
            .map(|sel| bits.iter().enumerate().filter(|(j, _)| sel >> j & 1 == 1).fold(0, |m, (_, b)| m | b))
            .collect()
    };
    let input_masks = masks_of(&in_props);
    let output_masks = masks_of(&out_props);
    let nq = dpa.num_states();
    let ni = input_masks.len();
    let total = nq * (1 + ni);
    let mut owner = vec![Player::Input; total];
    let mut priority = vec![0; total];
    let mut succ = vec![Vec::new(); total];
    let mut labels = vec![Vec::new(); total];
    for q in 0..nq {
        priority[q] = dpa.priority(q);
        succ[q] = (0..ni).map(|i| nq + q * ni + i).collect();
        for (i, &im) in input_masks.iter().enumerate() {
            let v = nq + q * ni + i;
            owner[v] = Player::Output;
            priority[v] = dpa.priority(q);
            for (o, &om) in output_masks.iter().enumerate() {
                let t = dpa.step(q, im | om);
                if !succ[v].contains(&t) {
                    succ[v].push(t);
                    labels[v].push(o);
                }
            }
        }
    }
    Ok(SynthesisGame {
        game: ParityGame { owner, priority, succ },
        num_automaton_states: nq,
        input_masks,
        output_masks,
        labels,
        inputs: in_props,
        outputs: out_props,
    })
}

/// Winning regions and positional strategies (successor choice for every
/// vertex owned by the player winning it).
#[derive(Debug, Clone)]
pub struct Solution {
    pub winner: Vec<Player>,
    pub strategy: Vec<Option<usize>>,
}

/// Zielonka's recursive algorithm.
pub fn solve_parity(g: &ParityGame) -> Solution {
    let n = g.num_vertices();
    let mut strategy = vec![None; n];
    let all: FixedBitSet = (0..n).collect();
    let (w_out, _) = zielonka(g, &all, &mut strategy);
    let winner = (0..n).map(|v| if w_out.contains(v) { Player::Output } else { Player::Input }).collect();
    Solution { winner, strategy }
}

/// Returns `(W_Output, W_Input)` inside `sub`, recording strategies.
fn zielonka(g: &ParityGame, sub: &FixedBitSet, strategy: &mut [Option<usize>]) -> (FixedBitSet, FixedBitSet) {
    let n = g.num_vertices();
    if sub.is_clear() {
        return (FixedBitSet::with_capacity(n), FixedBitSet::with_capacity(n));
    }
    let d = sub.ones().map(|v| g.priority[v]).max().unwrap();
    let p = Player::of_priority(d);
    let top: FixedBitSet = sub.ones().filter(|&v| g.priority[v] == d).collect_with_capacity(n);
    let a = attractor(g, sub, &top, p, strategy);
    let mut rest = sub.clone();
    rest.difference_with(&a);
    let (w0, w1) = zielonka(g, &rest, strategy);
    let (_, wo) = split(p, w0, w1);
    if wo.is_clear() {
        // `p` wins everywhere: at top vertices it may move anywhere inside.
        for v in top.ones() {
            if g.owner[v] == p {
                strategy[v] = g.succ[v].iter().copied().find(|&t| sub.contains(t));
            }
        }
        let empty = FixedBitSet::with_capacity(n);
        return join(p, sub.clone(), empty);
    }
    let b = attractor(g, sub, &wo, p.opponent(), strategy);
    let mut rest2 = sub.clone();
    rest2.difference_with(&b);
    let (v0, v1) = zielonka(g, &rest2, strategy);
    let (vp, mut vo) = split(p, v0, v1);
    vo.union_with(&b);
    join(p, vp, vo)
}

fn split(p: Player, w_out: FixedBitSet, w_in: FixedBitSet) -> (FixedBitSet, FixedBitSet) {
    match p {
        Player::Output => (w_out, w_in),
        Player::Input => (w_in, w_out),
    }
}

fn join(p: Player, wp: FixedBitSet, wo: FixedBitSet) -> (FixedBitSet, FixedBitSet) {
    match p {
        Player::Output => (wp, wo),
        Player::Input => (wo, wp),
    }
}

trait CollectWithCapacity {
    fn collect_with_capacity(self, n: usize) -> FixedBitSet;
}

impl<I: Iterator<Item = usize>> CollectWithCapacity for I {
    fn collect_with_capacity(self, n: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        s.extend(self);
        s
    }
}

/// Attractor of `target` for `p` inside `sub`; vertices of `p` added to it
/// get the strategy edge leading into it.
fn attractor(g: &ParityGame, sub: &FixedBitSet, target: &FixedBitSet, p: Player, strategy: &mut [Option<usize>]) -> FixedBitSet {
    let mut attr = target.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for v in sub.ones() {
            if attr.contains(v) {
                continue;
            }
            let inside: Vec<usize> = g.succ[v].iter().copied().filter(|&t| sub.contains(t)).collect();
            if g.owner[v] == p {
                if let Some(&t) = inside.iter().find(|&&t| attr.contains(t)) {
                    attr.insert(v);
                    strategy[v] = Some(t);
                    changed = true;
                }
            } else if !inside.is_empty() && inside.iter().all(|&t| attr.contains(t)) {
                attr.insert(v);
                changed = true;
            }
        }
    }
    attr
}

/// Checks that `p`'s recorded strategy wins from every vertex of its
/// winning region: in the graph where `p` follows the strategy, no cycle
/// reachable from the region has a top priority of the opponent's parity.
pub fn verify_strategy(g: &ParityGame, sol: &Solution, p: Player) -> bool {
    let n = g.num_vertices();
    let mut succ = vec![Vec::new(); n];
    for v in 0..n {
        if sol.winner[v] != p {
            continue;
        }
        if g.owner[v] == p {
            match sol.strategy[v] {
                Some(t) => succ[v].push(t),
                None => return false,
            }
        } else {
            succ[v] = g.succ[v].clone();
        }
        if succ[v].iter().any(|&t| sol.winner[t] != p) {
            return false;
        }
    }
    let roots: Vec<usize> = (0..n).filter(|&v| sol.winner[v] == p).collect();
    let bad_priorities = g.priority.iter().copied().filter(|&d| Player::of_priority(d) != p);
    for d in bad_priorities.collect::<std::collections::BTreeSet<_>>() {
        let low: Vec<Vec<usize>> = (0..n)
            .map(|v| if g.priority[v] <= d { succ[v].iter().copied().filter(|&t| g.priority[t] <= d).collect() } else { Vec::new() })
            .collect();
        let starts: Vec<usize> = roots.iter().copied().filter(|&v| g.priority[v] <= d).collect();
        if crate::graph::accepting_lasso(&low, &starts, &|v| g.priority[v] == d).is_some() {
            return false;
        }
    }
    true
}

/// Winner of each vertex by exhaustive search over positional strategy pairs
/// (tiny games only).
pub fn solve_brute_force(g: &ParityGame) -> Vec<Player> {
    let n = g.num_vertices();
    let of = |p: Player| -> Vec<usize> { (0..n).filter(|&v| g.owner[v] == p).collect() };
    let (out_vs, in_vs) = (of(Player::Output), of(Player::Input));
    let choices = |vs: &[usize]| -> Vec<Vec<usize>> {
        let mut all = vec![vec![0; n]];
        for &v in vs {
            all = all
                .into_iter()
                .flat_map(|c| {
                    (0..g.succ[v].len()).map(move |k| {
                        let mut c = c.clone();
                        c[v] = k;
                        c
                    })
                })
                .collect();
        }
        all
    };
    let (out_strats, in_strats) = (choices(&out_vs), choices(&in_vs));
    let outcome = |start: usize, so: &[usize], si: &[usize]| -> Player {
        let mut pos = vec![usize::MAX; n];
        let mut path = Vec::new();
        let mut v = start;
        while pos[v] == usize::MAX {
            pos[v] = path.len();
            path.push(v);
            let k = if g.owner[v] == Player::Output { so[v] } else { si[v] };
            v = g.succ[v][k];
        }
        Player::of_priority(path[pos[v]..].iter().map(|&u| g.priority[u]).max().unwrap())
    };
    (0..n)
        .map(|v| {
            let wins = out_strats.iter().any(|so| in_strats.iter().all(|si| outcome(v, so, si) == Player::Output));
            if wins {
                Player::Output
            } else {
                Player::Input
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn single(priority: u32) -> ParityGame {
        ParityGame { owner: vec![Player::Input], priority: vec![priority], succ: vec![vec![0]] }
    }

    #[test]
    fn single_vertex_games() {
        assert_eq!(solve_parity(&single(0)).winner, vec![Player::Output]);
        assert_eq!(solve_parity(&single(1)).winner, vec![Player::Input]);
    }

    fn random_game(rng: &mut StdRng, n: usize) -> ParityGame {
        let owner = (0..n).map(|_| if rng.gen_bool(0.5) { Player::Output } else { Player::Input }).collect();
        let priority = (0..n).map(|_| rng.gen_range(0..5)).collect();
        let succ = (0..n)
            .map(|_| {
                let d = rng.gen_range(1..=2);
                let mut out: Vec<usize> = (0..d).map(|_| rng.gen_range(0..n)).collect();
                out.dedup();
                out
            })
            .collect();
        ParityGame { owner, priority, succ }
    }

    fn check_strategy(g: &ParityGame, sol: &Solution) {
        for v in 0..g.num_vertices() {
            if g.owner[v] == sol.winner[v] {
                let t = sol.strategy[v].expect("winner has a move");
                assert!(g.succ[v].contains(&t));
                assert_eq!(sol.winner[t], sol.winner[v], "strategy leaves the winning region");
            }
        }
    }

    #[test]
    fn zielonka_matches_brute_force() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rng.gen_range(1..=8);
            let g = random_game(&mut rng, n);
            let sol = solve_parity(&g);
            assert_eq!(sol.winner, solve_brute_force(&g), "{g:?}");
            check_strategy(&g, &sol);
            assert!(verify_strategy(&g, &sol, Player::Output) && verify_strategy(&g, &sol, Player::Input), "{g:?}");
        }
    }
}
