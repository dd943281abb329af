//! Model checking of PLDL against finite transition systems.
//!
//! The property is negated after box elimination and the alternating-color
//! rewrite; a pumpable fair path through the product of the resulting NBA
//! with the system refutes the property under every valuation. Without one,
//! the valuation `2·|Q|·|S| + 1` on diamond variables is sufficient.

mod pumpable;
mod ts;

pub use pumpable::{augment, pump, pumpable_fair_path, pumpable_fair_path_naive, Augmented, ColoredGraph};
pub use ts::{parse_ts, TransitionSystem, TsError};

use thiserror::Error;

use crate::automata::{build_aba, build_aba_with_valuation, AutomataError};
use crate::formula::{eliminate_boxes, rel, theta_inf, Formula, TransformError, COLOR_PROP};
use crate::graph::{accepting_lasso, reachable, sccs, Lasso};
use crate::nba::{remove_alternation_with_cap, Nba, NbaError, DEFAULT_STATE_CAP};
use crate::semantics::{LassoWord, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McError {
    #[error("formula is not well-formed: a variable bounds both a diamond and a box")]
    NotWellFormed,
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Nba(#[from] NbaError),
}

/// Product of an NBA over `props ∪ {_cp}` with a system, colored by `_cp`.
/// Vertex `(q, s, c)` has index `(q·|S| + s)·2 + c`.
pub fn build_product(nba: &Nba, ts: &TransitionSystem) -> ColoredGraph {
    let (nq, ns) = (nba.num_states(), ts.num_states());
    let id = |q: usize, s: usize, c: usize| (q * ns + s) * 2 + c;
    let alphabet = nba.alphabet();
    let color_bit = alphabet.index(COLOR_PROP).map_or(0, |i| 1 << i);
    let mut succ = vec![Vec::new(); nq * ns * 2];
    let mut colored = vec![false; nq * ns * 2];
    let mut fair = vec![false; nq * ns * 2];
    for q in 0..nq {
        for s in 0..ns {
            let base = alphabet.mask(ts.label(s));
            for c in 0..2 {
                let v = id(q, s, c);
                colored[v] = c == 1;
                fair[v] = nba.is_accepting(q);
                let letter = if c == 1 { base | color_bit } else { base };
                for &q2 in nba.successors(q, letter) {
                    for &s2 in ts.successors(s) {
                        succ[v].extend([id(q2, s2, 0), id(q2, s2, 1)]);
                    }
                }
            }
        }
    }
    ColoredGraph { succ, initial: id(nba.initial(), ts.initial(), 0), colored, fair }
}

/// The vertices of `g` that are reachable from the initial vertex and can
/// reach a cycle through a fair vertex, with the map from new to old
/// indices. `None` if the initial vertex itself is pruned.
pub fn live_part(g: &ColoredGraph) -> Option<(ColoredGraph, Vec<usize>)> {
    let n = g.num_vertices();
    let (order, _) = reachable(&g.succ, &[g.initial]);
    let mut live = vec![false; n];
    for comp in sccs(&g.succ, &[g.initial]) {
        let nontrivial = comp.len() > 1 || g.succ[comp[0]].contains(&comp[0]);
        if nontrivial && comp.iter().any(|&v| g.fair[v]) {
            comp.iter().for_each(|&v| live[v] = true);
        }
    }
    let mut pred = vec![Vec::new(); n];
    for &v in &order {
        for &t in &g.succ[v] {
            pred[t].push(v);
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| live[v]).collect();
    while let Some(v) = stack.pop() {
        for &u in &pred[v] {
            if !live[u] {
                live[u] = true;
                stack.push(u);
            }
        }
    }
    if !live[g.initial] {
        return None;
    }
    let keep: Vec<usize> = order.into_iter().filter(|&v| live[v]).collect();
    let mut new_id = vec![usize::MAX; n];
    for (i, &v) in keep.iter().enumerate() {
        new_id[v] = i;
    }
    let sub = ColoredGraph {
        succ: keep.iter().map(|&v| g.succ[v].iter().filter(|&&t| live[t]).map(|&t| new_id[t]).collect()).collect(),
        initial: new_id[g.initial],
        colored: keep.iter().map(|&v| g.colored[v]).collect(),
        fair: keep.iter().map(|&v| g.fair[v]).collect(),
    };
    Some((sub, keep))
}

/// An initial lasso path of the system together with the coloring that the
/// product run guessed for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub states: Lasso<usize>,
    pub colors: Lasso<bool>,
    /// Automaton states of the refuting run.
    pub run: Lasso<usize>,
}

impl Counterexample {
    pub fn trace(&self, ts: &TransitionSystem) -> LassoWord {
        ts.trace(&self.states.prefix, &self.states.cycle)
    }

    /// The trace with `_cp` marking the colored positions.
    pub fn colored_trace(&self, ts: &TransitionSystem) -> LassoWord {
        let paint = |s: &usize, c: &bool| {
            let mut l = ts.label(*s).clone();
            if *c {
                l.insert(COLOR_PROP.to_string());
            }
            l
        };
        let prefix = self.states.prefix.iter().zip(&self.colors.prefix).map(|(s, c)| paint(s, c)).collect();
        let cycle = self.states.cycle.iter().zip(&self.colors.cycle).map(|(s, c)| paint(s, c)).collect();
        LassoWord::new(prefix, cycle).expect("non-empty loop")
    }

    /// Stretches every block to length at least `k` by repeating a cycle of
    /// the product run inside it; the trace then refutes the property for
    /// every valuation bounded by `k - 1`.
    pub fn pumped(&self, k: usize) -> Counterexample {
        let triple = |i: usize| (*self.run.at(i), *self.states.at(i), *self.colors.at(i));
        let joint = Lasso {
            prefix: (0..self.states.prefix.len()).map(triple).collect::<Vec<_>>(),
            cycle: (self.states.prefix.len()..self.states.len()).map(triple).collect::<Vec<_>>(),
        };
        // Pumping works on indices into a table of distinct product vertices.
        let mut table: Vec<(usize, usize, bool)> = Vec::new();
        let mut lookup = |x: &(usize, usize, bool)| match table.iter().position(|y| y == x) {
            Some(i) => i,
            None => {
                table.push(*x);
                table.len() - 1
            }
        };
        let idx = Lasso {
            prefix: joint.prefix.iter().map(&mut lookup).collect::<Vec<_>>(),
            cycle: joint.cycle.iter().map(&mut lookup).collect::<Vec<_>>(),
        };
        let pumped = pump(&idx, &|i| table[i].2, k);
        Counterexample {
            states: pumped.map(|&i| table[i].1),
            colors: pumped.map(|&i| table[i].2),
            run: pumped.map(|&i| table[i].0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Satisfied { valuation: Valuation, bound: u64 },
    Violated(Counterexample),
}

#[derive(Debug, Clone)]
pub struct McReport {
    pub verdict: Verdict,
    pub nba_states: usize,
    pub product_vertices: usize,
    /// `2·|Q|·|S| + 1`.
    pub alpha_star: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub state_cap: usize,
    pub tighten: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { state_cap: DEFAULT_STATE_CAP, tighten: false }
    }
}

/// The NBA for `¬rel(φ') ∧ θ∞(_cp) ∧ θ∞(¬_cp)` with `φ'` the box-free
/// version of `φ`.
pub fn colored_negation_nba(f: &Formula, cap: usize) -> Result<Nba, McError> {
    if !f.is_well_formed() {
        return Err(McError::NotWellFormed);
    }
    let relaxed = rel(&eliminate_boxes(f))?;
    let psi = relaxed.negate().and(theta_inf(Formula::atom(COLOR_PROP))).and(theta_inf(Formula::neg_atom(COLOR_PROP)));
    Ok(remove_alternation_with_cap(&build_aba(&psi)?, cap)?.trim())
}

pub fn model_check(ts: &TransitionSystem, f: &Formula) -> Result<McReport, McError> {
    model_check_with(ts, f, McOptions::default())
}

pub fn model_check_with(ts: &TransitionSystem, f: &Formula, opts: McOptions) -> Result<McReport, McError> {
    let nba = colored_negation_nba(f, opts.state_cap)?;
    let product = build_product(&nba, ts);
    let alpha_star = 2 * nba.num_states() as u64 * ts.num_states() as u64 + 1;
    let path = live_part(&product).and_then(|(sub, to_full)| Some(pumpable_fair_path(&sub)?.map(|&v| to_full[v])));
    let verdict = match path {
        Some(full) => {
            let states = full.map(|&v| v / 2 % ts.num_states());
            let colors = full.map(|&v| v % 2 == 1);
            let run = full.map(|&v| v / 2 / ts.num_states());
            Verdict::Violated(Counterexample { states, colors, run })
        }
        None => {
            let vars = f.var_sets();
            let mut valuation = Valuation::new();
            for x in &vars.diamonds {
                valuation.set(x.clone(), alpha_star);
            }
            for z in &vars.boxes {
                valuation.set(z.clone(), 0);
            }
            if opts.tighten {
                valuation = tighten(ts, f, &valuation, opts.state_cap)?;
            }
            Verdict::Satisfied { valuation, bound: alpha_star }
        }
    };
    Ok(McReport { verdict, nba_states: nba.num_states(), product_vertices: product.num_vertices(), alpha_star })
}

/// Whether every trace of `ts` satisfies `f` under `alpha`, through the NBA
/// of the negation with counter-bounded operators.
pub fn check_valuation(ts: &TransitionSystem, f: &Formula, alpha: &Valuation) -> Result<bool, McError> {
    check_valuation_with_cap(ts, f, alpha, DEFAULT_STATE_CAP)
}

pub fn check_valuation_with_cap(ts: &TransitionSystem, f: &Formula, alpha: &Valuation, cap: usize) -> Result<bool, McError> {
    Ok(violating_trace(ts, f, alpha, cap)?.is_none())
}

/// A trace of `ts` refuting `f` under `alpha`, if any.
pub fn violating_trace(ts: &TransitionSystem, f: &Formula, alpha: &Valuation, cap: usize) -> Result<Option<LassoWord>, McError> {
    let nba = remove_alternation_with_cap(&build_aba_with_valuation(&f.negate(), alpha)?, cap)?.trim();
    let ns = ts.num_states();
    let id = |q: usize, s: usize| q * ns + s;
    let mut succ = vec![Vec::new(); nba.num_states() * ns];
    for q in 0..nba.num_states() {
        for s in 0..ns {
            let letter = nba.alphabet().mask(ts.label(s));
            for &q2 in nba.successors(q, letter) {
                succ[id(q, s)].extend(ts.successors(s).iter().map(|&s2| id(q2, s2)));
            }
        }
    }
    let run = accepting_lasso(&succ, &[id(nba.initial(), ts.initial())], &|v| nba.is_accepting(v / ns));
    Ok(run.map(|r| {
        let states = r.map(|&v| v % ns);
        ts.trace(&states.prefix, &states.cycle)
    }))
}

/// Lowers each diamond variable in turn by binary search, keeping the
/// valuation sufficient; monotonicity makes each search exact for the
/// coordinate, but the result need not be a global optimum.
pub fn tighten(ts: &TransitionSystem, f: &Formula, alpha: &Valuation, cap: usize) -> Result<Valuation, McError> {
    let mut current = alpha.clone();
    for x in &f.var_sets().diamonds {
        let (mut lo, mut hi) = (0, current.get(x).map_err(AutomataError::from)?);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if check_valuation_with_cap(ts, f, &current.clone().with(x.clone(), mid), cap)? {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        current.set(x.clone(), lo);
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::semantics::{evaluate, is_k_spaced};

    fn rr() -> TransitionSystem {
        parse_ts("state a init {req}\nstate b {resp}\nedge a b\nedge b a\n").unwrap()
    }

    #[test]
    fn product_has_expected_shape() {
        let f = parse("<tt*>p").unwrap();
        let nba = colored_negation_nba(&f, DEFAULT_STATE_CAP).unwrap();
        let g = build_product(&nba, &rr());
        assert_eq!(g.num_vertices(), nba.num_states() * 2 * 2);
        assert_eq!(g.initial, nba.initial() * 4);
        assert!(!g.colored[g.initial]);
    }

    #[test]
    fn responsive_system_satisfies_bounded_response() {
        let f = parse("[tt*](req -> <tt*>{<=x} resp)").unwrap();
        let ts = rr();
        let report = model_check(&ts, &f).unwrap();
        let Verdict::Satisfied { valuation, bound } = &report.verdict else { panic!("expected Satisfied") };
        assert_eq!(valuation.get("x").unwrap(), *bound);
        assert!(check_valuation(&ts, &f, valuation).unwrap());
        let tight = tighten(&ts, &f, valuation, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(tight.get("x").unwrap(), 1);
        assert!(!check_valuation(&ts, &f, &Valuation::new().with("x", 0)).unwrap());
    }

    #[test]
    fn constant_p_needs_no_delay() {
        let ts = parse_ts("state s init {p}\nedge s s").unwrap();
        let f = parse("[tt*]<tt*>{<=x} p").unwrap();
        assert!(matches!(model_check(&ts, &f).unwrap().verdict, Verdict::Satisfied { .. }));
        assert!(check_valuation(&ts, &f, &Valuation::new().with("x", 0)).unwrap());
    }

    #[test]
    fn unanswered_requests_are_violated() {
        let ts = parse_ts("state a init {req}\nstate b {}\nedge a b\nedge b a").unwrap();
        let f = parse("[tt*](req -> <tt*>{<=x} resp)").unwrap();
        let report = model_check(&ts, &f).unwrap();
        let Verdict::Violated(cex) = &report.verdict else { panic!("expected Violated") };
        let w = cex.trace(&ts);
        for x in [0, 3, 10, report.alpha_star] {
            assert!(!evaluate(&f, &w, 0, &Valuation::new().with("x", x)).unwrap());
        }
        assert!(!check_valuation(&ts, &f, &Valuation::new().with("x", 10)).unwrap());
    }

    #[test]
    fn pumped_counterexample_refutes_large_valuations() {
        // Every request is eventually answered, but only after an unbounded wait.
        let ts = parse_ts(
            "state i init {}\nstate r {req}\nstate w {}\nstate a {resp}\n\
             edge i i\nedge i r\nedge r w\nedge w w\nedge w a\nedge a i",
        )
        .unwrap();
        let f = parse("[tt*](req -> <tt*>{<=x} resp)").unwrap();
        let report = model_check(&ts, &f).unwrap();
        let Verdict::Violated(cex) = &report.verdict else { panic!("expected Violated") };
        for k in [5usize, 12, 40] {
            let p = cex.pumped(k + 1);
            assert!(is_k_spaced(&p.colored_trace(&ts), k + 1));
            let w = p.trace(&ts);
            assert!(!evaluate(&f, &w, 0, &Valuation::new().with("x", k as u64)).unwrap(), "k={k} w={w}");
        }
    }

    #[test]
    fn variable_free_agrees_with_plain_emptiness() {
        let ts = rr();
        for (src, holds) in [("[tt*]<tt*>resp", true), ("[tt*]req", false), ("[tt*](req -> <tt>resp)", true), ("<tt*>[tt*]req", false)] {
            let f = parse(src).unwrap();
            let sat = matches!(model_check(&ts, &f).unwrap().verdict, Verdict::Satisfied { .. });
            assert_eq!(sat, holds, "{src}");
            assert_eq!(check_valuation(&ts, &f, &Valuation::new()).unwrap(), holds, "{src}");
        }
    }
}
