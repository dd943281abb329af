//! Proptest strategies shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use pldl::formula::{Bound, Formula, PropFormula, Regex};
use pldl::mc::ColoredGraph;
use pldl::semantics::{LassoWord, Letter, Valuation};
use proptest::prelude::*;
use proptest::sample::select;

pub const PROPS: &[&str] = &["p", "q", "r"];

fn prop_formula(props: &'static [&'static str]) -> impl Strategy<Value = PropFormula> {
    let leaf = prop_oneof![
        3 => select(props).prop_map(PropFormula::var),
        1 => select(props).prop_map(|p| PropFormula::var(p).not()),
        1 => Just(PropFormula::True),
    ];
    leaf.prop_recursive(1, 3, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.or(b)),
        ]
    })
}

fn regex(props: &'static [&'static str], tests: BoxedStrategy<Formula>) -> BoxedStrategy<Regex> {
    let leaf = prop_oneof![4 => prop_formula(props).prop_map(Regex::prop), 1 => tests.prop_map(Regex::test)];
    leaf.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.choice(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.seq(b)),
            inner.prop_map(Regex::star),
        ]
    })
    .boxed()
}

/// Formulas whose diamonds carry a bound drawn from `diamonds` and whose
/// boxes carry one from `boxes`.
pub fn formula(props: &'static [&'static str], diamonds: Vec<Bound>, boxes: Vec<Bound>) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        select(props).prop_map(Formula::atom),
        select(props).prop_map(Formula::neg_atom),
        Just(Formula::tt()),
        Just(Formula::ff()),
    ];
    leaf.prop_recursive(4, 20, 2, move |inner| {
        let re = regex(props, inner.clone());
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (re.clone(), inner.clone(), select(diamonds.clone())).prop_map(|(r, f, b)| Formula::diamond(r, f, b)),
            (re, inner, select(boxes.clone())).prop_map(|(r, f, b)| Formula::boxed(r, f, b)),
        ]
    })
    .boxed()
}

fn var(x: &str) -> Bound {
    Bound::Var(x.to_string())
}

pub fn ldl() -> BoxedStrategy<Formula> {
    formula(PROPS, vec![Bound::None], vec![Bound::None])
}

pub fn ldl_cp() -> BoxedStrategy<Formula> {
    formula(PROPS, vec![Bound::None, Bound::Changepoint], vec![Bound::None, Bound::Changepoint])
}

/// Well-formed PLDL: `x`, `y` bound diamonds and `z` bounds boxes.
pub fn pldl() -> BoxedStrategy<Formula> {
    formula(PROPS, vec![Bound::None, var("x"), var("y")], vec![Bound::None, var("z")])
}

pub fn pldl_diamond() -> BoxedStrategy<Formula> {
    formula(PROPS, vec![Bound::None, var("x"), var("y")], vec![Bound::None])
}

pub fn letter(props: &'static [&'static str]) -> impl Strategy<Value = Letter> {
    proptest::sample::subsequence(props, 0..=props.len()).prop_map(|ps| ps.into_iter().map(String::from).collect::<BTreeSet<_>>())
}

/// Lassos with `|u| + |v| <= 8`.
pub fn lasso(props: &'static [&'static str]) -> impl Strategy<Value = LassoWord> {
    (prop::collection::vec(letter(props), 0..=4), prop::collection::vec(letter(props), 1..=4))
        .prop_map(|(u, v)| LassoWord::new(u, v).expect("non-empty loop"))
}

pub fn valuation(max: u64) -> impl Strategy<Value = Valuation> {
    (0..=max, 0..=max, 0..=max).prop_map(|(x, y, z)| Valuation::new().with("x", x).with("y", y).with("z", z))
}

pub fn colored_graph(max_vertices: usize) -> impl Strategy<Value = ColoredGraph> {
    (1..=max_vertices).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(0..n, 1..=3), n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(prop::bool::weighted(0.4), n),
        )
            .prop_map(|(succ, colored, fair)| ColoredGraph { succ, initial: 0, colored, fair })
    })
}
