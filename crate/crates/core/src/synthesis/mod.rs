//! Realizability of PLDL specifications and strategy extraction.
//!
//! The alternating-color rewrite of the box-free specification is compiled
//! to an NBA, determinized into a parity automaton and turned into a game
//! where the output player also chooses the color. A winning strategy with
//! `n` states realizes the specification with `2n + 2` on every diamond
//! variable.

mod det;
mod game;

pub use det::{determinize, DetError, Dpa};
pub use game::{build_game, solve_brute_force, solve_parity, verify_strategy, GameError, ParityGame, Player, Solution, SynthesisGame};

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::automata::{build_aba, build_aba_with_valuation, AutomataError};
use crate::formula::{color_transform, eliminate_boxes, Formula, TransformError, COLOR_PROP};
use crate::nba::{remove_alternation_with_cap, Nba, NbaError, DEFAULT_STATE_CAP};
use crate::semantics::{LassoWord, Letter, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("formula is not well-formed: a variable bounds both a diamond and a box")]
    NotWellFormed,
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Nba(#[from] NbaError),
    #[error(transparent)]
    Det(#[from] DetError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Moore-style transducer: after reading an input the machine moves to a
/// new state and emits that state's output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    names: Vec<String>,
    initial: usize,
    /// `delta[s][i]`, where bit `j` of `i` is `inputs[j]`.
    delta: Vec<Vec<usize>>,
    out: Vec<Letter>,
    color: Vec<bool>,
}

impl Transducer {
    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn step(&self, s: usize, input: &Letter) -> usize {
        let i = self.inputs.iter().enumerate().filter(|(_, p)| input.contains(*p)).fold(0, |m, (j, _)| m | 1 << j);
        self.delta[s][i]
    }

    /// Output of a state, without the color proposition.
    pub fn output(&self, s: usize) -> &Letter {
        &self.out[s]
    }

    /// Whether the strategy colors the position emitted by `s`.
    pub fn color(&self, s: usize) -> bool {
        self.color[s]
    }

    fn play(&self, inputs: &LassoWord, colored: bool) -> LassoWord {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut letters = Vec::new();
        let (mut s, mut pos) = (self.initial, 0);
        loop {
            if let Some(&start) = seen.get(&(s, pos)) {
                let cycle = letters.split_off(start);
                return LassoWord::new(letters, cycle).expect("non-empty cycle");
            }
            seen.insert((s, pos), letters.len());
            let input = inputs.letter(pos);
            s = self.step(s, input);
            let mut letter: Letter = input.iter().filter(|p| self.inputs.contains(p)).cloned().collect();
            letter.extend(self.out[s].iter().cloned());
            if colored && self.color[s] {
                letter.insert(COLOR_PROP.to_string());
            }
            letters.push(letter);
            pos = inputs.succ(pos);
        }
    }

    /// The play against an ultimately periodic input sequence.
    pub fn outcome(&self, inputs: &LassoWord) -> LassoWord {
        self.play(inputs, false)
    }

    /// The play including the strategy's coloring.
    pub fn colored_outcome(&self, inputs: &LassoWord) -> LassoWord {
        self.play(inputs, true)
    }

    fn input_set(&self, i: usize) -> String {
        let props: Vec<&str> = self.inputs.iter().enumerate().filter(|(j, _)| i >> j & 1 == 1).map(|(_, p)| p.as_str()).collect();
        format!("{{{}}}", props.join(","))
    }

    fn output_set(&self, s: usize) -> String {
        let props: Vec<&str> = self.out[s].iter().map(String::as_str).collect();
        format!("{{{}}}", props.join(","))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "transducer states={} initial={} inputs={} outputs={}\n",
            self.num_states(),
            self.name(self.initial),
            self.inputs.join(","),
            self.outputs.join(",")
        );
        for q in 0..self.num_states() {
            let _ = writeln!(s, "state {} out={}", self.name(q), self.output_set(q));
        }
        for q in 0..self.num_states() {
            for (i, &t) in self.delta[q].iter().enumerate() {
                let _ = writeln!(s, "on {} {} -> {}", self.name(q), self.input_set(i), self.name(t));
            }
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph transducer {\n  rankdir=LR;\n  init [shape=point];\n");
        for q in 0..self.num_states() {
            let _ = writeln!(s, "  \"{}\" [shape=box, label=\"{}\\n{}\"];", self.name(q), self.name(q), self.output_set(q));
        }
        let _ = writeln!(s, "  init -> \"{}\";", self.name(self.initial));
        for q in 0..self.num_states() {
            for (i, &t) in self.delta[q].iter().enumerate() {
                let _ = writeln!(s, "  \"{}\" -> \"{}\" [label=\"{}\"];", self.name(q), self.name(t), self.input_set(i));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Reads a transducer off the output player's positional strategy: the
/// states are the initial state plus the reachable `(q, i)` vertices.
pub fn extract_transducer(sg: &SynthesisGame, dpa: &Dpa, sol: &Solution) -> Transducer {
    let nq = sg.num_automaton_states;
    let ni = sg.input_masks.len();
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut vertices: Vec<Option<usize>> = vec![None];
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    // Q vertex from which the input of each transducer state is read.
    let mut from_q = vec![dpa.initial()];
    while let Some(s) = queue.pop_front() {
        let q = from_q[s];
        let mut row = Vec::with_capacity(ni);
        for i in 0..ni {
            let v = sg.choice_vertex(q, i);
            let id = *ids.entry(v).or_insert_with(|| {
                let t = sol.strategy[v].expect("winning vertex has a move");
                vertices.push(Some(v));
                from_q.push(t);
                queue.push_back(vertices.len() - 1);
                vertices.len() - 1
            });
            row.push(id);
        }
        if delta.len() <= s {
            delta.resize(s + 1, Vec::new());
        }
        delta[s] = row;
    }
    let alphabet = dpa.alphabet();
    let mut out = Vec::new();
    let mut color = Vec::new();
    let mut names = Vec::new();
    for (k, v) in vertices.iter().enumerate() {
        match v {
            None => {
                names.push("init".to_string());
                out.push(Letter::new());
                color.push(false);
            }
            Some(v) => {
                let t = sol.strategy[*v].unwrap();
                let edge = sg.game.succ[*v].iter().position(|&x| x == t).unwrap();
                let letter = alphabet.letter(sg.output_masks[sg.labels[*v][edge]]);
                color.push(letter.contains(COLOR_PROP));
                out.push(letter.into_iter().filter(|p| p != COLOR_PROP).collect());
                names.push(format!("t{k}"));
            }
        }
    }
    debug_assert!(vertices.iter().flatten().all(|&v| v >= nq));
    Transducer {
        inputs: sg.inputs.clone(),
        outputs: sg.outputs.iter().filter(|p| *p != COLOR_PROP).cloned().collect(),
        names,
        initial: 0,
        delta,
        out,
        color,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realizability {
    Realizable { strategy: Transducer, valuation: Valuation, bound: u64 },
    Unrealizable,
}

#[derive(Debug, Clone)]
pub struct SynthReport {
    pub verdict: Realizability,
    pub nba_states: usize,
    pub dpa_states: usize,
    pub game_vertices: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    pub nba_cap: usize,
    pub det_cap: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { nba_cap: DEFAULT_STATE_CAP, det_cap: DEFAULT_STATE_CAP }
    }
}

fn props_list(props: &BTreeSet<String>) -> Vec<String> {
    props.iter().cloned().collect()
}

/// Solves the game of an NBA; the transducer if the output player wins.
fn solve_nba(nba: &Nba, inputs: &[String], outputs: &[String], det_cap: usize) -> Result<(Option<Transducer>, usize, usize), SynthError> {
    let dpa = determinize(nba, det_cap)?;
    let sg = build_game(&dpa, inputs, outputs)?;
    let sol = solve_parity(&sg.game);
    let wins = sol.winner[sg.q_vertex(dpa.initial())] == Player::Output;
    let t = wins.then(|| extract_transducer(&sg, &dpa, &sol));
    Ok((t, dpa.num_states(), sg.game.num_vertices()))
}

pub fn realize(f: &Formula, inputs: &BTreeSet<String>, outputs: &BTreeSet<String>) -> Result<SynthReport, SynthError> {
    realize_with(f, inputs, outputs, SynthOptions::default())
}

pub fn realize_with(f: &Formula, inputs: &BTreeSet<String>, outputs: &BTreeSet<String>, opts: SynthOptions) -> Result<SynthReport, SynthError> {
    if !f.is_well_formed() {
        return Err(SynthError::NotWellFormed);
    }
    let c = color_transform(&eliminate_boxes(f))?;
    let nba = remove_alternation_with_cap(&build_aba(&c)?, opts.nba_cap)?.trim();
    let (strategy, dpa_states, game_vertices) = solve_nba(&nba, &props_list(inputs), &props_list(outputs), opts.det_cap)?;
    let verdict = match strategy {
        None => Realizability::Unrealizable,
        Some(strategy) => {
            let bound = 2 * strategy.num_states() as u64 + 2;
            let vars = f.var_sets();
            let mut valuation = Valuation::new();
            for x in &vars.diamonds {
                valuation.set(x.clone(), bound);
            }
            for z in &vars.boxes {
                valuation.set(z.clone(), 0);
            }
            Realizability::Realizable { strategy, valuation, bound }
        }
    };
    Ok(SynthReport { verdict, nba_states: nba.num_states(), dpa_states, game_vertices })
}

/// Realizability under a fixed valuation, with bounded operators expanded by
/// letter counters and no coloring.
pub fn realize_with_valuation(
    f: &Formula,
    inputs: &BTreeSet<String>,
    outputs: &BTreeSet<String>,
    alpha: &Valuation,
    opts: SynthOptions,
) -> Result<Option<Transducer>, SynthError> {
    let nba = remove_alternation_with_cap(&build_aba_with_valuation(f, alpha)?, opts.nba_cap)?.trim();
    Ok(solve_nba(&nba, &props_list(inputs), &props_list(outputs), opts.det_cap)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::random::lasso;
    use crate::semantics::{evaluate, is_k_bounded};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn set(props: &[&str]) -> BTreeSet<String> {
        props.iter().map(|p| p.to_string()).collect()
    }

    fn check_plays(f: &Formula, t: &Transducer, alpha: &Valuation, seed: u64) {
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..100 {
            let input = lasso(&mut rng, &t.inputs, 6);
            let w = t.outcome(&input);
            assert!(evaluate(f, &w, 0, alpha).unwrap(), "{f} fails on {w}");
            assert!(is_k_bounded(&t.colored_outcome(&input), t.num_states() + 1));
        }
    }

    #[test]
    fn eventually_respond() {
        let f = parse("<tt*>{<=x} resp").unwrap();
        let report = realize(&f, &set(&[]), &set(&["resp"])).unwrap();
        let Realizability::Realizable { strategy, valuation, bound } = report.verdict else { panic!("unrealizable") };
        assert_eq!(valuation.get("x").unwrap(), bound);
        assert_eq!(bound, 2 * strategy.num_states() as u64 + 2);
        check_plays(&f, &strategy, &valuation, 1);
        let fixed = realize_with_valuation(&f, &set(&[]), &set(&["resp"]), &Valuation::new().with("x", 0), SynthOptions::default()).unwrap();
        assert!(fixed.is_some());
    }

    #[test]
    fn respond_to_every_request() {
        let f = parse("[tt*](req -> <tt*>{<=x} resp)").unwrap();
        let report = realize(&f, &set(&["req"]), &set(&["resp"])).unwrap();
        let Realizability::Realizable { strategy, valuation, .. } = report.verdict else { panic!("unrealizable") };
        check_plays(&f, &strategy, &valuation, 2);
        assert!(strategy.to_text().starts_with("transducer"));
    }

    #[test]
    fn uncontrollable_input_is_unrealizable() {
        let f = parse("[tt*]<tt*>{<=x} q").unwrap();
        let report = realize(&f, &set(&["q"]), &set(&[])).unwrap();
        assert_eq!(report.verdict, Realizability::Unrealizable);
    }

    #[test]
    fn overlapping_partition_is_rejected() {
        let f = parse("<tt*>p").unwrap();
        assert!(matches!(realize(&f, &set(&["p"]), &set(&["p"])), Err(SynthError::Game(GameError::Overlap(_)))));
        assert!(matches!(realize(&f, &set(&[]), &set(&[])), Err(SynthError::Game(GameError::Unassigned(_)))));
    }

    #[test]
    fn game_arena_size() {
        let f = parse("<tt*>{<=x} resp").unwrap();
        let c = color_transform(&eliminate_boxes(&f)).unwrap();
        let nba = remove_alternation_with_cap(&build_aba(&c).unwrap(), DEFAULT_STATE_CAP).unwrap().trim();
        let dpa = determinize(&nba, DEFAULT_STATE_CAP).unwrap();
        let sg = build_game(&dpa, &[], &["resp".to_string()]).unwrap();
        assert_eq!(sg.game.num_vertices(), dpa.num_states() * 2);
        for q in 0..dpa.num_states() {
            assert_eq!(sg.game.priority[sg.choice_vertex(q, 0)], sg.game.priority[q]);
        }
        assert!(sg.game.succ.iter().all(|s| !s.is_empty()));
    }
}
