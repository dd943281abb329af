//! Abstract syntax of PLDL formulas and test-carrying regular expressions.
//!
//! Formulas are kept in negation normal form: negation exists only on
//! atomic propositions, and [`Formula::negate`] pushes a negation through
//! the operator dualities.

mod parse;
mod print;
mod transform;

use std::collections::BTreeSet;

pub use parse::{parse, parse_with, ParseError, ParseOptions};
pub use transform::{color_transform, eliminate_boxes, rel, theta_inf, TransformError};

/// Fresh proposition used for the alternating color technique.
pub const COLOR_PROP: &str = "_cp";

/// Canonical proposition over which `tt`/`ff` are encoded in formula position.
pub const TRUTH_PROP: &str = "_tt";

/// Returns true for identifiers that are owned by the toolkit.
pub fn is_reserved(prop: &str) -> bool {
    prop == COLOR_PROP || prop == TRUTH_PROP
}

/// Scope bound of a temporal operator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    None,
    Var(String),
    Changepoint,
}

/// A Boolean combination of propositions, used as a letter-consuming regex atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropFormula {
    True,
    False,
    Var(String),
    Not(Box<PropFormula>),
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
}

impl PropFormula {
    pub fn var(name: impl Into<String>) -> Self {
        PropFormula::Var(name.into())
    }

    pub fn not(self) -> Self {
        PropFormula::Not(Box::new(self))
    }

    pub fn and(self, rhs: PropFormula) -> Self {
        PropFormula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: PropFormula) -> Self {
        PropFormula::Or(Box::new(self), Box::new(rhs))
    }

    /// Evaluates under the assignment that makes exactly `holds` true.
    pub fn eval(&self, holds: &dyn Fn(&str) -> bool) -> bool {
        match self {
            PropFormula::True => true,
            PropFormula::False => false,
            PropFormula::Var(p) => holds(p),
            PropFormula::Not(f) => !f.eval(holds),
            PropFormula::And(l, r) => l.eval(holds) && r.eval(holds),
            PropFormula::Or(l, r) => l.eval(holds) || r.eval(holds),
        }
    }

    pub fn props(&self, out: &mut BTreeSet<String>) {
        match self {
            PropFormula::True | PropFormula::False => {}
            PropFormula::Var(p) => {
                out.insert(p.clone());
            }
            PropFormula::Not(f) => f.props(out),
            PropFormula::And(l, r) | PropFormula::Or(l, r) => {
                l.props(out);
                r.props(out);
            }
        }
    }
}

/// Regular expressions over propositional letters and formula tests.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regex {
    Prop(PropFormula),
    Test(Box<Formula>),
    Choice(Box<Regex>, Box<Regex>),
    Seq(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn prop(p: PropFormula) -> Self {
        Regex::Prop(p)
    }

    pub fn tt() -> Self {
        Regex::Prop(PropFormula::True)
    }

    pub fn test(f: Formula) -> Self {
        Regex::Test(Box::new(f))
    }

    pub fn choice(self, rhs: Regex) -> Self {
        Regex::Choice(Box::new(self), Box::new(rhs))
    }

    pub fn seq(self, rhs: Regex) -> Self {
        Regex::Seq(Box::new(self), Box::new(rhs))
    }

    pub fn star(self) -> Self {
        Regex::Star(Box::new(self))
    }

    /// Length of the expression: one per propositional atom, two per test
    /// (the atom and its `?`), one per choice, sequence or star node.
    pub fn len(&self) -> usize {
        match self {
            Regex::Prop(_) => 1,
            Regex::Test(_) => 2,
            Regex::Choice(l, r) | Regex::Seq(l, r) => 1 + l.len() + r.len(),
            Regex::Star(r) => 1 + r.len(),
        }
    }

    /// Test bodies in left-to-right order.
    pub fn tests(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.collect_tests(&mut out);
        out
    }

    fn collect_tests<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        match self {
            Regex::Prop(_) => {}
            Regex::Test(f) => out.push(f),
            Regex::Choice(l, r) | Regex::Seq(l, r) => {
                l.collect_tests(out);
                r.collect_tests(out);
            }
            Regex::Star(r) => r.collect_tests(out),
        }
    }

    /// Rebuilds the expression with every test body replaced by `f(body)`.
    pub fn map_tests<E>(&self, f: &mut impl FnMut(&Formula) -> Result<Formula, E>) -> Result<Regex, E> {
        Ok(match self {
            Regex::Prop(p) => Regex::Prop(p.clone()),
            Regex::Test(body) => Regex::Test(Box::new(f(body)?)),
            Regex::Choice(l, r) => Regex::Choice(Box::new(l.map_tests(f)?), Box::new(r.map_tests(f)?)),
            Regex::Seq(l, r) => Regex::Seq(Box::new(l.map_tests(f)?), Box::new(r.map_tests(f)?)),
            Regex::Star(r) => Regex::Star(Box::new(r.map_tests(f)?)),
        })
    }

    fn props(&self, out: &mut BTreeSet<String>) {
        match self {
            Regex::Prop(p) => p.props(out),
            Regex::Test(f) => f.collect_props(out),
            Regex::Choice(l, r) | Regex::Seq(l, r) => {
                l.props(out);
                r.props(out);
            }
            Regex::Star(r) => r.props(out),
        }
    }
}

/// A PLDL (or LDL_cp) formula in negation normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    NegAtom(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Diamond(Regex, Box<Formula>, Bound),
    Box(Regex, Box<Formula>, Bound),
}

/// Parameters of a formula, split by the kind of operator they bound.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarSets {
    pub diamonds: BTreeSet<String>,
    pub boxes: BTreeSet<String>,
}

impl VarSets {
    pub fn all(&self) -> BTreeSet<String> {
        self.diamonds.union(&self.boxes).cloned().collect()
    }
}

impl Formula {
    pub fn atom(p: impl Into<String>) -> Self {
        Formula::Atom(p.into())
    }

    pub fn neg_atom(p: impl Into<String>) -> Self {
        Formula::NegAtom(p.into())
    }

    /// `tt` in formula position: `_tt | !_tt`.
    pub fn tt() -> Self {
        Formula::Or(Box::new(Formula::atom(TRUTH_PROP)), Box::new(Formula::neg_atom(TRUTH_PROP)))
    }

    /// `ff` in formula position: `_tt & !_tt`.
    pub fn ff() -> Self {
        Formula::And(Box::new(Formula::atom(TRUTH_PROP)), Box::new(Formula::neg_atom(TRUTH_PROP)))
    }

    pub fn is_tt(&self) -> bool {
        *self == Formula::tt()
    }

    pub fn is_ff(&self) -> bool {
        *self == Formula::ff()
    }

    pub fn and(self, rhs: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn diamond(r: Regex, body: Formula, bound: Bound) -> Self {
        Formula::Diamond(r, Box::new(body), bound)
    }

    pub fn boxed(r: Regex, body: Formula, bound: Bound) -> Self {
        Formula::Box(r, Box::new(body), bound)
    }

    /// Dual formula: satisfied exactly where `self` is not.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Atom(p) => Formula::NegAtom(p.clone()),
            Formula::NegAtom(p) => Formula::Atom(p.clone()),
            Formula::And(l, r) => Formula::Or(Box::new(l.negate()), Box::new(r.negate())),
            Formula::Or(l, r) => Formula::And(Box::new(l.negate()), Box::new(r.negate())),
            Formula::Diamond(re, body, b) => Formula::Box(re.clone(), Box::new(body.negate()), b.clone()),
            Formula::Box(re, body, b) => Formula::Diamond(re.clone(), Box::new(body.negate()), b.clone()),
        }
    }

    /// All subformulas, including test bodies; regular expressions are not members.
    pub fn closure(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            out.insert(f.clone());
        });
        out
    }

    /// Pre-order walk over every formula node, descending into test bodies.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => {}
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Formula::Diamond(re, body, _) | Formula::Box(re, body, _) => {
                for t in re.tests() {
                    t.visit(f);
                }
                body.visit(f);
            }
        }
    }

    /// Number of formula nodes (subformula occurrences) plus the lengths of
    /// all regular expressions, both counted with multiplicity.
    pub fn size(&self) -> usize {
        let mut nodes = 0;
        let mut regex_len = 0;
        self.visit(&mut |f| {
            nodes += 1;
            if let Formula::Diamond(re, _, _) | Formula::Box(re, _, _) = f {
                regex_len += re.len();
            }
        });
        nodes + regex_len
    }

    pub fn var_sets(&self) -> VarSets {
        let mut vs = VarSets::default();
        self.visit(&mut |f| match f {
            Formula::Diamond(_, _, Bound::Var(z)) => {
                vs.diamonds.insert(z.clone());
            }
            Formula::Box(_, _, Bound::Var(z)) => {
                vs.boxes.insert(z.clone());
            }
            _ => {}
        });
        vs
    }

    /// No variable bounds both a diamond and a box.
    pub fn is_well_formed(&self) -> bool {
        let vs = self.var_sets();
        vs.diamonds.is_disjoint(&vs.boxes)
    }

    /// No variable occurs inside a test of a box's regex. Such tests are
    /// read with flipped polarity, so raising a diamond bound there can
    /// falsify the formula; monotonicity in the parameters (and with it box
    /// elimination) is only guaranteed when this holds.
    pub fn is_monotone(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |f| {
            if let Formula::Box(re, _, _) = f {
                ok &= re.tests().iter().all(|t| t.is_variable_free());
            }
        });
        ok
    }

    pub fn is_variable_free(&self) -> bool {
        let vs = self.var_sets();
        vs.diamonds.is_empty() && vs.boxes.is_empty()
    }

    pub fn has_changepoint_bounds(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if let Formula::Diamond(_, _, Bound::Changepoint) | Formula::Box(_, _, Bound::Changepoint) = f {
                found = true;
            }
        });
        found
    }

    /// Propositions mentioned anywhere, including inside regexes, excluding `_tt`.
    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out.remove(TRUTH_PROP);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(p) | Formula::NegAtom(p) => {
                out.insert(p.clone());
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_props(out);
                r.collect_props(out);
            }
            Formula::Diamond(re, body, _) | Formula::Box(re, body, _) => {
                re.props(out);
                body.collect_props(out);
            }
        }
    }
}

/// Free-function form of [`Formula::negate`].
pub fn negate(f: &Formula) -> Formula {
    f.negate()
}

pub fn closure(f: &Formula) -> BTreeSet<Formula> {
    f.closure()
}

pub fn size(f: &Formula) -> usize {
    f.size()
}

pub fn var_sets(f: &Formula) -> VarSets {
    f.var_sets()
}

pub fn check_well_formed(f: &Formula) -> bool {
    f.is_well_formed()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        Formula::atom(s)
    }

    #[test]
    fn parameters_in_box_tests_break_monotonicity() {
        let f = parse("[(<tt>{<=y} !q)?] <tt;q>p").unwrap();
        assert!(!f.is_monotone());
        assert!(parse("[tt*](req -> <tt*>{<=x} resp)").unwrap().is_monotone());
        assert!(parse("<(<tt>{<=y} q)?> p").unwrap().is_monotone());
    }

    fn test_seq() -> Formula {
        // <p?;q>{<=x} r
        let r = Regex::test(p("p")).seq(Regex::prop(PropFormula::var("q")));
        Formula::diamond(r, p("r"), Bound::Var("x".into()))
    }

    #[test]
    fn closure_of_parameterized_test_sequence() {
        let f = test_seq();
        let cl = f.closure();
        let expected: BTreeSet<_> = [p("p"), p("r"), f.clone()].into_iter().collect();
        assert_eq!(cl, expected);
    }

    #[test]
    fn closure_of_atom_and_conjunction() {
        assert_eq!(p("p").closure().len(), 1);
        let c = p("p").and(p("q"));
        let expected: BTreeSet<_> = [c.clone(), p("p"), p("q")].into_iter().collect();
        assert_eq!(c.closure(), expected);
    }

    #[test]
    fn size_conventions() {
        assert_eq!(p("p").size(), 1);
        assert_eq!(test_seq().size(), 7);
    }

    #[test]
    fn negation_dualities() {
        assert_eq!(p("p").negate(), Formula::neg_atom("p"));
        let d = Formula::diamond(Regex::tt().star(), p("q"), Bound::Var("x".into()));
        assert_eq!(
            d.negate(),
            Formula::boxed(Regex::tt().star(), Formula::neg_atom("q"), Bound::Var("x".into()))
        );
        assert_eq!(d.negate().negate(), d);
        assert_eq!(d.negate().size(), d.size());
    }

    #[test]
    fn var_sets_and_well_formedness() {
        let r = || Regex::prop(PropFormula::var("r"));
        let dx = Formula::diamond(Regex::tt().star(), p("p"), Bound::Var("x".into()));
        assert_eq!(dx.var_sets().diamonds, ["x".to_string()].into_iter().collect());
        assert!(dx.var_sets().boxes.is_empty());

        let nested = Formula::boxed(r(), Formula::diamond(r(), p("p"), Bound::Var("x".into())), Bound::Var("y".into()));
        let vs = nested.var_sets();
        assert_eq!(vs.diamonds.len(), 1);
        assert_eq!(vs.boxes, ["y".to_string()].into_iter().collect());

        let shared = Formula::diamond(r(), p("p"), Bound::Var("x".into()))
            .and(Formula::boxed(r(), p("q"), Bound::Var("x".into())));
        assert!(!shared.is_well_formed());
        let disjoint = Formula::diamond(r(), p("p"), Bound::Var("x".into()))
            .and(Formula::boxed(r(), p("q"), Bound::Var("y".into())));
        assert!(disjoint.is_well_formed());

        let ldl = Formula::boxed(Regex::tt().star(), Formula::diamond(Regex::tt().star(), p("p"), Bound::None), Bound::None);
        assert!(ldl.is_variable_free());
        assert!(ldl.is_well_formed());
    }

    #[test]
    fn props_skip_truth_prop() {
        let f = Formula::tt().and(p("a"));
        assert_eq!(f.props(), ["a".to_string()].into_iter().collect());
    }
}
