use std::fmt;

use fixedbitset::FixedBitSet;

use super::alphabet::{Alphabet, Mask};
use crate::formula::PropFormula;

/// Positive Boolean combination of automaton states.
///
/// `Guard` leaves are letter conditions: once a letter is fixed they fold to
/// constants ([`PosBool::at`]), so a single value describes the transition
/// of a state for every letter without enumerating the alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PosBool {
    True,
    False,
    State(usize),
    Guard(PropFormula),
    And(Box<PosBool>, Box<PosBool>),
    Or(Box<PosBool>, Box<PosBool>),
}

/// A set of automaton states (one model of a positive formula).
pub type StateSet = FixedBitSet;

impl PosBool {
    pub fn guard(g: PropFormula) -> Self {
        match g {
            PropFormula::True => PosBool::True,
            PropFormula::False => PosBool::False,
            g => PosBool::Guard(g),
        }
    }

    pub fn and(self, rhs: PosBool) -> Self {
        match (self, rhs) {
            (PosBool::False, _) | (_, PosBool::False) => PosBool::False,
            (PosBool::True, x) | (x, PosBool::True) => x,
            (l, r) => PosBool::And(Box::new(l), Box::new(r)),
        }
    }

    pub fn or(self, rhs: PosBool) -> Self {
        match (self, rhs) {
            (PosBool::True, _) | (_, PosBool::True) => PosBool::True,
            (PosBool::False, x) | (x, PosBool::False) => x,
            (l, r) => PosBool::Or(Box::new(l), Box::new(r)),
        }
    }

    pub fn all(items: impl IntoIterator<Item = PosBool>) -> Self {
        items.into_iter().fold(PosBool::True, PosBool::and)
    }

    pub fn any(items: impl IntoIterator<Item = PosBool>) -> Self {
        items.into_iter().fold(PosBool::False, PosBool::or)
    }

    /// The formula for one letter: guards become constants.
    pub fn at(&self, alphabet: &Alphabet, letter: Mask) -> PosBool {
        match self {
            PosBool::Guard(g) => {
                if alphabet.eval(g, letter) {
                    PosBool::True
                } else {
                    PosBool::False
                }
            }
            PosBool::And(l, r) => l.at(alphabet, letter).and(r.at(alphabet, letter)),
            PosBool::Or(l, r) => l.at(alphabet, letter).or(r.at(alphabet, letter)),
            other => other.clone(),
        }
    }

    /// Substitutes constants for states according to `fix`.
    pub fn substitute(&self, fix: &dyn Fn(usize) -> Option<bool>) -> PosBool {
        match self {
            PosBool::State(q) => match fix(*q) {
                Some(true) => PosBool::True,
                Some(false) => PosBool::False,
                None => PosBool::State(*q),
            },
            PosBool::And(l, r) => l.substitute(fix).and(r.substitute(fix)),
            PosBool::Or(l, r) => l.substitute(fix).or(r.substitute(fix)),
            other => other.clone(),
        }
    }

    pub fn states(&self, out: &mut Vec<usize>) {
        match self {
            PosBool::State(q) => out.push(*q),
            PosBool::And(l, r) | PosBool::Or(l, r) => {
                l.states(out);
                r.states(out);
            }
            _ => {}
        }
    }

    pub fn map_states(&self, f: &dyn Fn(usize) -> usize) -> PosBool {
        match self {
            PosBool::State(q) => PosBool::State(f(*q)),
            PosBool::And(l, r) => l.map_states(f).and(r.map_states(f)),
            PosBool::Or(l, r) => l.map_states(f).or(r.map_states(f)),
            other => other.clone(),
        }
    }

    /// Truth under the model `set`; guards must have been folded away.
    pub fn satisfied_by(&self, set: &StateSet) -> bool {
        match self {
            PosBool::True => true,
            PosBool::False => false,
            PosBool::State(q) => set.contains(*q),
            PosBool::Guard(_) => panic!("guard left in a letter-specific formula"),
            PosBool::And(l, r) => l.satisfied_by(set) && r.satisfied_by(set),
            PosBool::Or(l, r) => l.satisfied_by(set) || r.satisfied_by(set),
        }
    }

    /// All subset-minimal models over `n` states; guards must have been folded.
    pub fn minimal_models(&self, n: usize) -> Vec<StateSet> {
        match self {
            PosBool::True => vec![StateSet::with_capacity(n)],
            PosBool::False => Vec::new(),
            PosBool::State(q) => {
                let mut s = StateSet::with_capacity(n);
                s.insert(*q);
                vec![s]
            }
            PosBool::Guard(_) => panic!("guard left in a letter-specific formula"),
            PosBool::Or(l, r) => {
                let mut all = l.minimal_models(n);
                all.extend(r.minimal_models(n));
                minimize(all)
            }
            PosBool::And(l, r) => conjoin(&l.minimal_models(n), &r.minimal_models(n)),
        }
    }

    pub fn display<'a>(&'a self, names: &'a dyn Fn(usize) -> String) -> impl fmt::Display + 'a {
        Shown { b: self, names }
    }
}

/// Drops every set that is a superset of another one (and duplicates).
pub fn minimize(mut sets: Vec<StateSet>) -> Vec<StateSet> {
    sets.sort_by_key(|s| (s.count_ones(..), s.ones().collect::<Vec<_>>()));
    sets.dedup();
    let mut kept: Vec<StateSet> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept
}

/// Minimal models of a conjunction, given minimal models of both sides.
pub fn conjoin(a: &[StateSet], b: &[StateSet]) -> Vec<StateSet> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            let mut u = x.clone();
            u.union_with(y);
            out.push(u);
        }
    }
    minimize(out)
}

struct Shown<'a> {
    b: &'a PosBool,
    names: &'a dyn Fn(usize) -> String,
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |b| Shown { b, names: self.names };
        match self.b {
            PosBool::True => write!(f, "tt"),
            PosBool::False => write!(f, "ff"),
            PosBool::State(q) => write!(f, "{}", (self.names)(*q)),
            PosBool::Guard(g) => write!(f, "[{g}]"),
            PosBool::And(l, r) => write!(f, "({} & {})", sub(l), sub(r)),
            PosBool::Or(l, r) => write!(f, "({} | {})", sub(l), sub(r)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, xs: &[usize]) -> StateSet {
        let mut s = StateSet::with_capacity(n);
        xs.iter().for_each(|&x| s.insert(x));
        s
    }

    #[test]
    fn constants_fold() {
        assert_eq!(PosBool::State(1).and(PosBool::True), PosBool::State(1));
        assert_eq!(PosBool::State(1).or(PosBool::True), PosBool::True);
        assert_eq!(PosBool::all([]), PosBool::True);
        assert_eq!(PosBool::any([]), PosBool::False);
    }

    #[test]
    fn minimal_models_of_mixed_formula() {
        // (0 | 1) & (0 | 2)  ->  {0}, {1,2}
        let b = PosBool::State(0).or(PosBool::State(1)).and(PosBool::State(0).or(PosBool::State(2)));
        assert_eq!(b.minimal_models(3), vec![set(3, &[0]), set(3, &[1, 2])]);
        for m in b.minimal_models(3) {
            assert!(b.satisfied_by(&m));
        }
        assert!(PosBool::False.minimal_models(3).is_empty());
        assert_eq!(PosBool::True.minimal_models(3), vec![set(3, &[])]);
    }

    #[test]
    fn guards_fold_per_letter() {
        let a = Alphabet::new(["p".to_string()]).unwrap();
        let b = PosBool::guard(PropFormula::var("p")).and(PosBool::State(0));
        assert_eq!(b.at(&a, 1), PosBool::State(0));
        assert_eq!(b.at(&a, 0), PosBool::False);
    }
}
