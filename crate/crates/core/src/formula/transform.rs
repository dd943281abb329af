//! Box elimination and the alternating-color rewrite.

use thiserror::Error;

use super::{Bound, Formula, PropFormula, Regex, COLOR_PROP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("formula contains a parameterized box `{0}`; eliminate boxes first")]
    ParameterizedBox(String),
    #[error("formula mixes changepoint bounds with parameter bounds")]
    MixedBounds,
}

/// Replaces every `[r]{<=y} psi` by `[r^] psi`, where `r^` is the single test
/// matching exactly the diagonal part of `r`.
pub fn eliminate_boxes(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::NegAtom(_) => f.clone(),
        Formula::And(l, r) => eliminate_boxes(l).and(eliminate_boxes(r)),
        Formula::Or(l, r) => eliminate_boxes(l).or(eliminate_boxes(r)),
        Formula::Diamond(re, body, b) => Formula::diamond(eliminate_in_tests(re), eliminate_boxes(body), b.clone()),
        Formula::Box(re, body, Bound::Var(_)) => {
            let hat = diagonal_test(&eliminate_in_tests(re));
            Formula::boxed(hat, eliminate_boxes(body), Bound::None)
        }
        Formula::Box(re, body, b) => Formula::boxed(eliminate_in_tests(re), eliminate_boxes(body), b.clone()),
    }
}

fn eliminate_in_tests(re: &Regex) -> Regex {
    re.map_tests::<std::convert::Infallible>(&mut |t| Ok(eliminate_boxes(t))).unwrap()
}

enum Diag {
    /// The expression is (still) a propositional atom.
    Prop,
    Test(Formula),
}

/// Rewrites `r` into one test: stars become `tt?`; a propositional atom
/// absorbs a sequence into `ff?` and vanishes from a choice; remaining tests
/// merge by disjunction (choice) and conjunction (sequence).
fn diagonal_test(re: &Regex) -> Regex {
    fn go(re: &Regex) -> Diag {
        match re {
            Regex::Star(_) => Diag::Test(Formula::tt()),
            Regex::Prop(_) => Diag::Prop,
            Regex::Test(body) => Diag::Test((**body).clone()),
            Regex::Seq(l, r) => match (go(l), go(r)) {
                (Diag::Test(a), Diag::Test(b)) => Diag::Test(a.and(b)),
                _ => Diag::Test(Formula::ff()),
            },
            Regex::Choice(l, r) => match (go(l), go(r)) {
                (Diag::Prop, other) | (other, Diag::Prop) => other,
                (Diag::Test(a), Diag::Test(b)) => Diag::Test(a.or(b)),
            },
        }
    }
    match go(re) {
        Diag::Prop => Regex::test(Formula::ff()),
        Diag::Test(f) => Regex::test(f),
    }
}

/// `rel`: every parameterized diamond becomes changepoint-bounded, tests included.
pub fn rel(f: &Formula) -> Result<Formula, TransformError> {
    Ok(match f {
        Formula::Atom(_) | Formula::NegAtom(_) => f.clone(),
        Formula::And(l, r) => rel(l)?.and(rel(r)?),
        Formula::Or(l, r) => rel(l)?.or(rel(r)?),
        Formula::Diamond(re, body, b) => {
            let bound = match b {
                Bound::Var(_) => Bound::Changepoint,
                Bound::Changepoint => return Err(TransformError::MixedBounds),
                Bound::None => Bound::None,
            };
            Formula::diamond(re.map_tests(&mut |t| rel(t))?, rel(body)?, bound)
        }
        Formula::Box(_, _, Bound::Var(_)) => return Err(TransformError::ParameterizedBox(f.to_string())),
        Formula::Box(_, _, Bound::Changepoint) => return Err(TransformError::MixedBounds),
        Formula::Box(re, body, Bound::None) => Formula::boxed(re.map_tests(&mut |t| rel(t))?, rel(body)?, Bound::None),
    })
}

/// `[tt*]<tt*> lit`: the literal holds infinitely often.
pub fn theta_inf(lit: Formula) -> Formula {
    let always = Regex::Prop(PropFormula::True).star();
    Formula::boxed(always.clone(), Formula::diamond(always, lit, Bound::None), Bound::None)
}

/// `c(phi) = rel(phi) & theta_inf(_cp) & theta_inf(!_cp)`.
pub fn color_transform(f: &Formula) -> Result<Formula, TransformError> {
    Ok(rel(f)?.and(theta_inf(Formula::atom(COLOR_PROP))).and(theta_inf(Formula::neg_atom(COLOR_PROP))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn psi() -> Formula {
        Formula::atom("s")
    }

    #[test]
    fn star_becomes_tt_test() {
        let f = parse("[(q?;a)*]{<=y} s").unwrap();
        assert_eq!(eliminate_boxes(&f), Formula::boxed(Regex::test(Formula::tt()), psi(), Bound::None));
    }

    #[test]
    fn propositional_sequence_becomes_ff_test() {
        let f = parse("[a;b]{<=y} s").unwrap();
        assert_eq!(eliminate_boxes(&f), Formula::boxed(Regex::test(Formula::ff()), psi(), Bound::None));
        let single = parse("[a]{<=y} s").unwrap();
        assert_eq!(eliminate_boxes(&single), Formula::boxed(Regex::test(Formula::ff()), psi(), Bound::None));
    }

    #[test]
    fn test_choice_merges_into_disjunction() {
        let f = parse("[p? + q?]{<=y} s").unwrap();
        let expected = Formula::boxed(Regex::test(Formula::atom("p").or(Formula::atom("q"))), psi(), Bound::None);
        assert_eq!(eliminate_boxes(&f), expected);
        let g = parse("[a + p?;q?]{<=y} s").unwrap();
        let expected = Formula::boxed(Regex::test(Formula::atom("p").and(Formula::atom("q"))), psi(), Bound::None);
        assert_eq!(eliminate_boxes(&g), expected);
    }

    #[test]
    fn unparameterized_boxes_are_kept() {
        let f = parse("[tt*]<tt*>{<=x} p").unwrap();
        assert_eq!(eliminate_boxes(&f), f);
    }

    #[test]
    fn rel_on_simple_diamond() {
        let f = parse("<tt*>{<=x} p").unwrap();
        let c = color_transform(&f).unwrap();
        let expected = parse("<tt*>{cp} p").unwrap().and(theta_inf(Formula::atom(COLOR_PROP))).and(theta_inf(Formula::neg_atom(COLOR_PROP)));
        assert_eq!(c, expected);
    }

    #[test]
    fn rel_is_identity_on_ldl() {
        let f = parse("[tt*](a -> <tt*>b)").unwrap();
        assert_eq!(rel(&f).unwrap(), f);
    }

    #[test]
    fn rel_reaches_into_tests() {
        let f = parse("<(<tt*>{<=x} q)?;a>{<=x} p").unwrap();
        assert_eq!(rel(&f).unwrap(), parse("<(<tt*>{cp} q)?;a>{cp} p").unwrap());
    }

    #[test]
    fn rel_rejects_parameterized_box() {
        let f = parse("[a]{<=y} p").unwrap();
        assert!(matches!(color_transform(&f), Err(TransformError::ParameterizedBox(_))));
    }
}
