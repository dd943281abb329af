//! Alternating Büchi automata for LDL_cp, built bottom-up over the formula.
//!
//! Atoms get the three-state automata (initial state plus accepting and
//! rejecting sinks), Boolean connectives one fresh initial state, and a
//! temporal operator `<r> psi` / `[r] psi` contributes the letter-reachable
//! states of the Thompson automaton of `r`, with ε-paths removed and their
//! tests wired to the test automata. Changepoint-bounded operators run the
//! same construction over the product with [`nfa::ChangepointDfa`].

pub mod alphabet;
pub mod nfa;
pub mod posbool;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use alphabet::{Alphabet, AlphabetTooLarge, Mask};
pub use nfa::{counter_product, thompson, ChangepointDfa, Counter, EpsPath, MarkedNfa};
pub use posbool::{PosBool, StateSet};

use crate::formula::{Bound, Formula, PropFormula, COLOR_PROP};
use crate::semantics::{LassoWord, Valuation, ValuationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("parameterized operator `{0}` needs a valuation or the color rewrite first")]
    Parameterized(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Alphabet(#[from] AlphabetTooLarge),
}

/// Alternating Büchi automaton with symbolic (guarded) transitions.
#[derive(Debug, Clone)]
pub struct Aba {
    alphabet: Alphabet,
    names: Vec<String>,
    delta: Vec<PosBool>,
    accepting: Vec<bool>,
    initial: usize,
}

impl Aba {
    pub fn num_states(&self) -> usize {
        self.names.len()
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

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    /// Symbolic transition of `q`, valid for every letter.
    pub fn delta(&self, q: usize) -> &PosBool {
        &self.delta[q]
    }

    /// `delta(q, letter)`.
    pub fn step(&self, q: usize, letter: Mask) -> PosBool {
        self.delta[q].at(&self.alphabet, letter)
    }

    fn grouped(&self, q: usize) -> Vec<(PropFormula, PosBool)> {
        let mut groups: HashMap<PosBool, FixedBitSet> = HashMap::new();
        for m in self.alphabet.masks() {
            groups
                .entry(self.step(q, m))
                .or_insert_with(|| FixedBitSet::with_capacity(self.alphabet.size()))
                .insert(m as usize);
        }
        let mut out: Vec<_> = groups.into_iter().map(|(b, set)| (self.alphabet.guard(&set), b)).collect();
        out.sort_by_key(|(g, _)| g.to_string());
        out
    }

    fn order(&self) -> Vec<usize> {
        let mut qs: Vec<usize> = (0..self.num_states()).collect();
        qs.sort_by(|a, b| self.names[*a].cmp(&self.names[*b]));
        qs
    }

    /// Line-based export, ordered by state name.
    pub fn to_text(&self) -> String {
        let acc: Vec<&str> = self.order().into_iter().filter(|&q| self.accepting[q]).map(|q| self.name(q)).collect();
        let mut s = format!("aba states={} initial={} accepting={}\n", self.num_states(), self.name(self.initial), acc.join(","));
        let names = |q: usize| self.names[q].clone();
        for q in self.order() {
            for (g, b) in self.grouped(q) {
                let _ = writeln!(s, "trans {} {} {}", self.name(q), g, b.display(&names));
            }
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph aba {\n  rankdir=LR;\n  init [shape=point];\n");
        for q in self.order() {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  \"{}\" [shape={shape}];", self.name(q));
        }
        let _ = writeln!(s, "  init -> \"{}\";", self.name(self.initial));
        for q in self.order() {
            for (g, b) in self.grouped(q) {
                let mut targets = Vec::new();
                b.states(&mut targets);
                targets.sort();
                targets.dedup();
                for t in targets {
                    let _ = writeln!(s, "  \"{}\" -> \"{}\" [label=\"{}\"];", self.name(q), self.name(t), g);
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Builds the ABA of an LDL_cp formula (no parameter bounds).
pub fn build_aba(f: &Formula) -> Result<Aba, AutomataError> {
    Builder::new(None).finish(f)
}

/// Builds an ABA where every `{<=z}` bound is enforced by a letter counter
/// of size `alpha(z)`, so the automaton accepts `{w | (w, alpha) |= f}`.
pub fn build_aba_with_valuation(f: &Formula, alpha: &Valuation) -> Result<Aba, AutomataError> {
    Builder::new(Some(alpha)).finish(f)
}

/// Membership of a lasso word, through alternation removal.
pub fn aba_membership(a: &Aba, w: &LassoWord) -> Result<bool, crate::nba::NbaError> {
    Ok(crate::nba::remove_alternation(a)?.membership(w))
}

fn not_guard(g: &PropFormula) -> PropFormula {
    match g {
        PropFormula::True => PropFormula::False,
        PropFormula::False => PropFormula::True,
        PropFormula::Not(inner) => (**inner).clone(),
        other => other.clone().not(),
    }
}

struct Builder<'a> {
    valuation: Option<&'a Valuation>,
    names: Vec<String>,
    delta: Vec<PosBool>,
    accepting: Vec<bool>,
    sinks: Option<(usize, usize)>,
    memo: HashMap<Formula, usize>,
}

impl<'a> Builder<'a> {
    fn new(valuation: Option<&'a Valuation>) -> Self {
        Builder { valuation, names: vec![], delta: vec![], accepting: vec![], sinks: None, memo: HashMap::new() }
    }

    fn state(&mut self, name: String, accepting: bool) -> usize {
        self.names.push(name);
        self.delta.push(PosBool::False);
        self.accepting.push(accepting);
        self.names.len() - 1
    }

    fn sinks(&mut self) -> (usize, usize) {
        if let Some(s) = self.sinks {
            return s;
        }
        let acc = self.state("acc".into(), true);
        let rej = self.state("rej".into(), false);
        self.delta[acc] = PosBool::State(acc);
        self.delta[rej] = PosBool::State(rej);
        self.sinks = Some((acc, rej));
        (acc, rej)
    }

    fn finish(mut self, f: &Formula) -> Result<Aba, AutomataError> {
        let root = self.build(f, "r")?;
        let mut props = f.props();
        if f.has_changepoint_bounds() {
            props.insert(COLOR_PROP.to_string());
        }
        let alphabet = Alphabet::new(props)?;

        // Keep only states reachable from the root.
        let mut index: BTreeMap<usize, usize> = BTreeMap::new();
        let mut order = vec![root];
        index.insert(root, 0);
        let mut i = 0;
        while i < order.len() {
            let mut next = Vec::new();
            self.delta[order[i]].states(&mut next);
            for q in next {
                if let std::collections::btree_map::Entry::Vacant(e) = index.entry(q) {
                    e.insert(order.len());
                    order.push(q);
                }
            }
            i += 1;
        }
        let rename = |q: usize| index[&q];
        Ok(Aba {
            alphabet,
            names: order.iter().map(|&q| self.names[q].clone()).collect(),
            delta: order.iter().map(|&q| self.delta[q].map_states(&rename)).collect(),
            accepting: order.iter().map(|&q| self.accepting[q]).collect(),
            initial: 0,
        })
    }

    fn build(&mut self, f: &Formula, path: &str) -> Result<usize, AutomataError> {
        if let Some(&q) = self.memo.get(f) {
            return Ok(q);
        }
        let q = match f {
            Formula::Atom(p) | Formula::NegAtom(p) => {
                let (acc, rej) = self.sinks();
                let q = self.state(path.to_string(), false);
                let mut g = PropFormula::var(p.clone());
                if matches!(f, Formula::NegAtom(_)) {
                    g = g.not();
                }
                let neg = not_guard(&g);
                self.delta[q] = PosBool::guard(g)
                    .and(PosBool::State(acc))
                    .or(PosBool::guard(neg).and(PosBool::State(rej)));
                q
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                let lq = self.build(l, &format!("{path}.l"))?;
                let rq = self.build(r, &format!("{path}.r"))?;
                let q = self.state(path.to_string(), false);
                let (a, b) = (self.delta[lq].clone(), self.delta[rq].clone());
                self.delta[q] = if matches!(f, Formula::And(..)) { a.and(b) } else { a.or(b) };
                q
            }
            Formula::Diamond(re, body, bound) | Formula::Box(re, body, bound) => {
                let universal = matches!(f, Formula::Box(..));
                let base = thompson(re);
                let nfa = match bound {
                    Bound::None => base,
                    Bound::Changepoint => counter_product(&base, Counter::Changepoint),
                    Bound::Var(z) => match self.valuation {
                        Some(alpha) => counter_product(&base, Counter::Length(alpha.get(z)?)),
                        None => return Err(AutomataError::Parameterized(f.to_string())),
                    },
                };
                self.temporal(&nfa, body, universal, path)?
            }
        };
        self.memo.insert(f.clone(), q);
        Ok(q)
    }

    fn temporal(&mut self, nfa: &MarkedNfa, body: &Formula, universal: bool, path: &str) -> Result<usize, AutomataError> {
        let body_q = self.build(body, &format!("{path}.b"))?;
        let body_delta = self.delta[body_q].clone();

        // Test automata: the test itself for diamonds, its negation for boxes.
        let mut test_delta: HashMap<Formula, PosBool> = HashMap::new();
        for (i, t) in nfa.marking.iter().flatten().enumerate() {
            if test_delta.contains_key(t) {
                continue;
            }
            let target = if universal { t.negate() } else { t.clone() };
            let q = self.build(&target, &format!("{path}.t{i}"))?;
            test_delta.insert(t.clone(), self.delta[q].clone());
        }

        // States of the regex automaton that survive ε-removal.
        let mut keep = vec![false; nfa.num_states()];
        keep[nfa.initial] = true;
        for edges in &nfa.letters {
            for (_, t) in edges {
                keep[*t] = true;
            }
        }
        let mut ids = HashMap::new();
        for q in (0..nfa.num_states()).filter(|&q| keep[q]) {
            let id = self.state(format!("{path}.{}", nfa.names[q]), universal);
            ids.insert(q, id);
        }

        for (&q, &id) in &ids {
            let mut parts = Vec::new();
            for p in nfa.epsilon_paths(q) {
                let tests = p.tests.iter().map(|t| test_delta[t].clone());
                let part = if universal {
                    let escape = PosBool::any(tests);
                    if p.is_final {
                        body_delta.clone().or(escape)
                    } else {
                        PosBool::all(nfa.letters[p.target].iter().map(|(g, t)| {
                            PosBool::guard(not_guard(g)).or(PosBool::State(ids[t])).or(escape.clone())
                        }))
                    }
                } else {
                    let required = PosBool::all(tests);
                    if p.is_final {
                        body_delta.clone().and(required)
                    } else {
                        PosBool::any(
                            nfa.letters[p.target].iter().map(|(g, t)| PosBool::guard(g.clone()).and(PosBool::State(ids[t]))),
                        )
                        .and(required)
                    }
                };
                parts.push(part);
            }
            self.delta[id] = if universal { PosBool::all(parts) } else { PosBool::any(parts) };
        }
        Ok(ids[&nfa.initial])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, parse_with, ParseOptions};

    fn aba(src: &str) -> Aba {
        build_aba(&parse_with(src, ParseOptions { allow_reserved: true }).unwrap()).unwrap()
    }

    fn accepts(a: &Aba, w: &str) -> bool {
        aba_membership(a, &w.parse().unwrap()).unwrap()
    }

    #[test]
    fn atom_automaton_has_three_states() {
        let a = aba("p");
        assert_eq!(a.num_states(), 3);
        assert!(accepts(&a, "$ {p}"));
        assert!(!accepts(&a, "{} $ {p}"));
    }

    #[test]
    fn eventually_and_always() {
        let f = aba("<tt*>p");
        assert!(accepts(&f, "{}{} $ {p}"));
        assert!(!accepts(&f, "$ {}"));
        let g = aba("[tt*]p");
        assert!(accepts(&g, "$ {p}"));
        assert!(!accepts(&g, "{p}{p} $ {p}{}"));
    }

    #[test]
    fn empty_regex_diamond_is_false() {
        let a = aba("<ff>tt");
        assert!(!accepts(&a, "$ {}"));
        assert!(!accepts(&a, "$ {p}"));
    }

    #[test]
    fn changepoint_diamond() {
        let a = aba("<tt*>{cp} p");
        assert!(accepts(&a, "$ {_cp}{_cp}{}{p}"));
        assert!(!accepts(&a, "$ {_cp}{}{_cp}{p}"));
    }

    #[test]
    fn parameterized_input_is_rejected() {
        let f = parse("<tt*>{<=x} p").unwrap();
        assert!(matches!(build_aba(&f), Err(AutomataError::Parameterized(_))));
        let a = build_aba_with_valuation(&f, &Valuation::new().with("x", 2)).unwrap();
        assert!(aba_membership(&a, &"$ {}{}{p}".parse().unwrap()).unwrap());
        let a1 = build_aba_with_valuation(&f, &Valuation::new().with("x", 1)).unwrap();
        assert!(!aba_membership(&a1, &"$ {}{}{p}".parse().unwrap()).unwrap());
    }

    #[test]
    fn text_export_is_stable() {
        let a = aba("p");
        let text = a.to_text();
        assert!(text.starts_with("aba states=3 initial=r accepting=acc\n"), "{text}");
        assert!(text.contains("trans r p acc"));
        assert!(text.contains("trans r !p rej"));
        assert_eq!(text, aba("p").to_text());
        assert!(a.to_dot().starts_with("digraph aba"));
    }
}
