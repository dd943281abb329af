//! Brute-force reference semantics over ultimately periodic words.
//!
//! Truth of every formula at a position only depends on the suffix from that
//! position, so all truth values live on the canonical positions
//! `0 .. |u|+|v|`. The match relation is computed per operator flavor:
//!
//! * unbounded operators use the relation folded onto canonical positions,
//!   with star as a reachability closure;
//! * parameter-bounded operators enumerate explicit offsets `0..=alpha(z)`;
//! * changepoint-bounded operators carry, per match, the number of color
//!   changes strictly inside the matched infix and the color of its last
//!   letter, so that sequential composition can count the change at the seam.

mod word;

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use fixedbitset::FixedBitSet;

pub use word::{LassoWord, Letter, Valuation, ValuationError, WordError};

use crate::formula::{Bound, Formula, PropFormula, Regex};

pub type EvalError = ValuationError;

/// `(w, n, alpha) |= f`.
pub fn evaluate(f: &Formula, w: &LassoWord, n: usize, alpha: &Valuation) -> Result<bool, EvalError> {
    let mut ev = Evaluator::new(w, alpha);
    let t = ev.truth(f)?;
    Ok(t[w.canonical(n)])
}

/// Pairs `(n, n+j)` of the match relation with `n` canonical and `j <= horizon`.
pub fn match_relation(r: &Regex, w: &LassoWord, alpha: &Valuation, horizon: usize) -> Result<BTreeSet<(usize, usize)>, EvalError> {
    let mut ev = Evaluator::new(w, alpha);
    let rel = ev.bounded(r, horizon)?;
    let mut out = BTreeSet::new();
    for (n, offs) in rel.iter().enumerate() {
        for j in offs.ones() {
            out.insert((n, n + j));
        }
    }
    Ok(out)
}

/// Reference evaluator; memo tables live for one evaluator.
pub struct Evaluator<'a> {
    w: &'a LassoWord,
    alpha: &'a Valuation,
    memo: HashMap<Formula, Rc<Vec<bool>>>,
}

const EMPTY: usize = 0;
const KINDS: usize = 5;

fn kind(changes: usize, last: bool) -> usize {
    1 + 2 * changes + last as usize
}

/// Joins two consecutive matched infixes; `seam` is the color of the first
/// letter of the second infix. `None` once more than one change occurred.
fn combine(k1: usize, k2: usize, seam: bool) -> Option<usize> {
    if k1 == EMPTY {
        return Some(k2);
    }
    if k2 == EMPTY {
        return Some(k1);
    }
    let (c1, last1) = ((k1 - 1) / 2, (k1 - 1) % 2 == 1);
    let (c2, last2) = ((k2 - 1) / 2, (k2 - 1) % 2 == 1);
    let c = c1 + c2 + (last1 != seam) as usize;
    (c <= 1).then(|| kind(c, last2))
}

impl<'a> Evaluator<'a> {
    pub fn new(w: &'a LassoWord, alpha: &'a Valuation) -> Self {
        Evaluator { w, alpha, memo: HashMap::new() }
    }

    fn len(&self) -> usize {
        self.w.period_len()
    }

    fn letter_sat(&self, n: usize, p: &PropFormula) -> bool {
        let letter = self.w.letter(n);
        p.eval(&|x| letter.contains(x))
    }

    /// Truth value of `f` at every canonical position.
    pub fn truth(&mut self, f: &Formula) -> Result<Rc<Vec<bool>>, EvalError> {
        if let Some(t) = self.memo.get(f) {
            return Ok(t.clone());
        }
        let n = self.len();
        let t: Vec<bool> = match f {
            Formula::Atom(p) => (0..n).map(|i| self.w.letter(i).contains(p)).collect(),
            Formula::NegAtom(p) => (0..n).map(|i| !self.w.letter(i).contains(p)).collect(),
            Formula::And(l, r) => {
                let (a, b) = (self.truth(l)?, self.truth(r)?);
                a.iter().zip(b.iter()).map(|(x, y)| *x && *y).collect()
            }
            Formula::Or(l, r) => {
                let (a, b) = (self.truth(l)?, self.truth(r)?);
                a.iter().zip(b.iter()).map(|(x, y)| *x || *y).collect()
            }
            Formula::Diamond(re, body, bound) | Formula::Box(re, body, bound) => {
                let existential = matches!(f, Formula::Diamond(..));
                let target = self.truth(body)?;
                let ends = self.endpoints(re, bound)?;
                ends.iter()
                    .map(|es| {
                        if existential {
                            es.iter().any(|&m| target[m])
                        } else {
                            es.iter().all(|&m| target[m])
                        }
                    })
                    .collect()
            }
        };
        let t = Rc::new(t);
        self.memo.insert(f.clone(), t.clone());
        Ok(t)
    }

    /// Canonical end positions of admissible matches, per canonical start.
    fn endpoints(&mut self, re: &Regex, bound: &Bound) -> Result<Vec<Vec<usize>>, EvalError> {
        Ok(match bound {
            Bound::None => self.unbounded(re)?.iter().map(|s| s.ones().collect()).collect(),
            Bound::Var(z) => {
                let limit = self.alpha.get(z)? as usize;
                self.bounded(re, limit)?
                    .iter()
                    .enumerate()
                    .map(|(n, offs)| offs.ones().map(|j| self.w.canonical(n + j)).collect())
                    .collect()
            }
            Bound::Changepoint => self
                .changepoint(re)?
                .iter()
                .map(|s| {
                    let ends: BTreeSet<usize> = s.ones().map(|i| i / KINDS).collect();
                    ends.into_iter().collect()
                })
                .collect(),
        })
    }

    /// Match relation folded onto canonical positions: `rel[n]` holds the ends.
    pub fn unbounded(&mut self, re: &Regex) -> Result<Vec<FixedBitSet>, EvalError> {
        let n = self.len();
        Ok(match re {
            Regex::Prop(p) => (0..n)
                .map(|i| {
                    let mut s = FixedBitSet::with_capacity(n);
                    if self.letter_sat(i, p) {
                        s.insert(self.w.succ(i));
                    }
                    s
                })
                .collect(),
            Regex::Test(body) => {
                let t = self.truth(body)?;
                (0..n)
                    .map(|i| {
                        let mut s = FixedBitSet::with_capacity(n);
                        if t[i] {
                            s.insert(i);
                        }
                        s
                    })
                    .collect()
            }
            Regex::Choice(l, r) => {
                let mut a = self.unbounded(l)?;
                let b = self.unbounded(r)?;
                for (x, y) in a.iter_mut().zip(&b) {
                    x.union_with(y);
                }
                a
            }
            Regex::Seq(l, r) => {
                let a = self.unbounded(l)?;
                let b = self.unbounded(r)?;
                a.iter()
                    .map(|mids| {
                        let mut s = FixedBitSet::with_capacity(n);
                        for m in mids.ones() {
                            s.union_with(&b[m]);
                        }
                        s
                    })
                    .collect()
            }
            Regex::Star(inner) => {
                let a = self.unbounded(inner)?;
                (0..n)
                    .map(|start| {
                        let mut seen = FixedBitSet::with_capacity(n);
                        let mut stack = vec![start];
                        seen.insert(start);
                        while let Some(m) = stack.pop() {
                            for next in a[m].ones() {
                                if !seen.put(next) {
                                    stack.push(next);
                                }
                            }
                        }
                        seen
                    })
                    .collect()
            }
        })
    }

    /// Offsets `j <= limit` with `(n, n+j)` in the match relation, per canonical `n`.
    pub fn bounded(&mut self, re: &Regex, limit: usize) -> Result<Vec<FixedBitSet>, EvalError> {
        let n = self.len();
        let width = limit + 1;
        let empty = || FixedBitSet::with_capacity(width);
        Ok(match re {
            Regex::Prop(p) => (0..n)
                .map(|i| {
                    let mut s = empty();
                    if limit >= 1 && self.letter_sat(i, p) {
                        s.insert(1);
                    }
                    s
                })
                .collect(),
            Regex::Test(body) => {
                let t = self.truth(body)?;
                (0..n)
                    .map(|i| {
                        let mut s = empty();
                        if t[i] {
                            s.insert(0);
                        }
                        s
                    })
                    .collect()
            }
            Regex::Choice(l, r) => {
                let mut a = self.bounded(l, limit)?;
                let b = self.bounded(r, limit)?;
                for (x, y) in a.iter_mut().zip(&b) {
                    x.union_with(y);
                }
                a
            }
            Regex::Seq(l, r) => {
                let a = self.bounded(l, limit)?;
                let b = self.bounded(r, limit)?;
                (0..n)
                    .map(|i| {
                        let mut s = empty();
                        for j in a[i].ones() {
                            for k in b[self.w.canonical(i + j)].ones() {
                                if j + k <= limit {
                                    s.insert(j + k);
                                }
                            }
                        }
                        s
                    })
                    .collect()
            }
            Regex::Star(inner) => {
                let a = self.bounded(inner, limit)?;
                (0..n)
                    .map(|i| {
                        let mut s = empty();
                        s.insert(0);
                        for j in 0..=limit {
                            if !s.contains(j) {
                                continue;
                            }
                            for k in a[self.w.canonical(i + j)].ones() {
                                if j + k <= limit {
                                    s.insert(j + k);
                                }
                            }
                        }
                        s
                    })
                    .collect()
            }
        })
    }

    /// Matches annotated with the color-change count of the infix; bit
    /// `m * 5 + kind` of `rel[n]` is set for a match ending at canonical `m`.
    fn changepoint(&mut self, re: &Regex) -> Result<Vec<FixedBitSet>, EvalError> {
        let n = self.len();
        let width = n * KINDS;
        let empty = || FixedBitSet::with_capacity(width);
        Ok(match re {
            Regex::Prop(p) => (0..n)
                .map(|i| {
                    let mut s = empty();
                    if self.letter_sat(i, p) {
                        s.insert(self.w.succ(i) * KINDS + kind(0, self.w.has_color(i)));
                    }
                    s
                })
                .collect(),
            Regex::Test(body) => {
                let t = self.truth(body)?;
                (0..n)
                    .map(|i| {
                        let mut s = empty();
                        if t[i] {
                            s.insert(i * KINDS + EMPTY);
                        }
                        s
                    })
                    .collect()
            }
            Regex::Choice(l, r) => {
                let mut a = self.changepoint(l)?;
                let b = self.changepoint(r)?;
                for (x, y) in a.iter_mut().zip(&b) {
                    x.union_with(y);
                }
                a
            }
            Regex::Seq(l, r) => {
                let a = self.changepoint(l)?;
                let b = self.changepoint(r)?;
                (0..n)
                    .map(|i| {
                        let mut s = empty();
                        for x in a[i].ones() {
                            let (mid, k1) = (x / KINDS, x % KINDS);
                            let seam = self.w.has_color(mid);
                            for y in b[mid].ones() {
                                if let Some(k) = combine(k1, y % KINDS, seam) {
                                    s.insert((y / KINDS) * KINDS + k);
                                }
                            }
                        }
                        s
                    })
                    .collect()
            }
            Regex::Star(inner) => {
                let a = self.changepoint(inner)?;
                (0..n)
                    .map(|i| {
                        let mut seen = empty();
                        seen.insert(i * KINDS + EMPTY);
                        let mut stack = vec![i * KINDS + EMPTY];
                        while let Some(x) = stack.pop() {
                            let (mid, k1) = (x / KINDS, x % KINDS);
                            let seam = self.w.has_color(mid);
                            for y in a[mid].ones() {
                                if let Some(k) = combine(k1, y % KINDS, seam) {
                                    let id = (y / KINDS) * KINDS + k;
                                    if !seen.put(id) {
                                        stack.push(id);
                                    }
                                }
                            }
                        }
                        seen
                    })
                    .collect()
            }
        })
    }
}

/// Changepoints among the first `horizon` positions of the unfolded word.
pub fn changepoints(w: &LassoWord, horizon: usize) -> Vec<usize> {
    (0..horizon).filter(|&n| n == 0 || w.has_color(n) != w.has_color(n - 1)).collect()
}

/// Whether the color flips infinitely often.
pub fn has_infinitely_many_changepoints(w: &LassoWord) -> bool {
    let u = w.prefix().len();
    let v = w.lasso().len();
    let first = w.has_color(u);
    (u..u + v).any(|n| w.has_color(n) != first)
}

/// Lengths of every block that starts before `|u| + |v|`. Returns `None` when
/// the color is eventually constant (the last block is infinite).
pub fn block_lengths(w: &LassoWord) -> Option<Vec<usize>> {
    if !has_infinitely_many_changepoints(w) {
        return None;
    }
    let span = w.period_len();
    // Every block is shorter than `span`, so two extra periods close all blocks.
    let horizon = 3 * span + 1;
    let cps = changepoints(w, horizon);
    Some(cps.windows(2).filter(|pair| pair[0] < span).map(|pair| pair[1] - pair[0]).collect())
}

/// Infinitely many changepoints and every block at least `k` long.
pub fn is_k_spaced(w: &LassoWord, k: usize) -> bool {
    block_lengths(w).is_some_and(|bs| bs.iter().all(|&b| b >= k))
}

/// Every block at most `k` long (which forces infinitely many changepoints).
pub fn is_k_bounded(w: &LassoWord, k: usize) -> bool {
    block_lengths(w).is_some_and(|bs| bs.iter().all(|&b| b <= k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, parse_with, ParseOptions, COLOR_PROP};

    fn word(s: &str) -> LassoWord {
        s.parse().unwrap()
    }

    fn holds(f: &str, w: &str, alpha: &Valuation) -> bool {
        let f = parse_with(f, ParseOptions { allow_reserved: true }).unwrap();
        evaluate(&f, &word(w), 0, alpha).unwrap()
    }

    #[test]
    fn infinitely_often() {
        let e = Valuation::new();
        assert!(holds("[tt*]<tt*>p", "$ {p}{}", &e));
        assert!(!holds("[tt*]<tt*>p", "{p} $ {}", &e));
        assert!(holds("<tt*>p", "$ {p}", &e));
    }

    #[test]
    fn bounded_eventually_needs_enough_budget() {
        for (x, expected) in [(0, false), (1, false), (2, true), (3, true)] {
            let a = Valuation::new().with("x", x);
            assert_eq!(holds("<tt*>{<=x} p", "$ {}{}{p}", &a), expected, "x = {x}");
        }
    }

    #[test]
    fn even_distance_response() {
        let f = "[tt*](q -> <(tt;tt)*;p>tt)";
        // q at 0, p only at odd positions: the even-distance response never comes.
        assert!(!holds(f, "{q} $ {p}{}", &Valuation::new()));
        assert!(holds(f, "{q} $ {}{p}", &Valuation::new()));
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let f = parse("<tt*>{<=x} p").unwrap();
        assert_eq!(evaluate(&f, &word("$ {p}"), 0, &Valuation::new()), Err(ValuationError::Unbound("x".into())));
    }

    #[test]
    fn match_relation_atoms() {
        let w = word("$ {p}{}");
        let e = Valuation::new();
        let rel = match_relation(&Regex::prop(PropFormula::var("p")), &w, &e, 3).unwrap();
        assert_eq!(rel, [(0, 1)].into_iter().collect());

        let test = match_relation(&Regex::test(Formula::atom("p")), &w, &e, 3).unwrap();
        assert!(test.iter().all(|(a, b)| a == b));
        assert_eq!(test.len(), 1);

        let star = match_relation(&Regex::prop(PropFormula::var("q")).star(), &w, &e, 3).unwrap();
        assert!(star.contains(&(0, 0)) && star.contains(&(1, 1)));
    }

    #[test]
    fn changepoint_bound_allows_one_internal_change() {
        let e = Valuation::new();
        // color: c c _ _ c c ...; p at position 3
        let w = "$ {_cp}{_cp}{}{p}";
        assert!(holds("<tt*>{cp} p", w, &e));
        // p two color changes away
        let far = "$ {_cp}{}{_cp}{p}";
        assert!(!holds("<tt*>{cp} p", far, &e));
        assert!(holds("<tt*> p", far, &e));
        assert!(holds("[tt*]{cp} !p", far, &e));
    }

    #[test]
    fn changepoints_and_blocks() {
        let w = word("$ {_cp}{_cp}{}{}");
        assert_eq!(changepoints(&w, 8), vec![0, 2, 4, 6]);

        let spaced = word("$ {_cp}{_cp}{_cp}{}{}{}");
        assert!(is_k_spaced(&spaced, 3));
        assert!(!is_k_spaced(&spaced, 4));
        assert!(is_k_bounded(&spaced, 3));

        let constant = word(&format!("{{{COLOR_PROP}}} $ {{{COLOR_PROP}}}"));
        assert_eq!(changepoints(&constant, 10), vec![0]);
        assert!(!has_infinitely_many_changepoints(&constant));
        assert!(!is_k_spaced(&constant, 1));
    }
}
