use std::fmt;

use super::{Bound, Formula, PropFormula, Regex};

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::None => Ok(()),
            Bound::Var(z) => write!(f, "{{<={z}}}"),
            Bound::Changepoint => write!(f, "{{cp}}"),
        }
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropFormula::True => write!(f, "tt"),
            PropFormula::False => write!(f, "ff"),
            PropFormula::Var(p) => write!(f, "{p}"),
            PropFormula::Not(inner) => write!(f, "!{inner}"),
            PropFormula::And(l, r) => write!(f, "({l} & {r})"),
            PropFormula::Or(l, r) => write!(f, "({l} | {r})"),
        }
    }
}

// Binding strength: choice < sequence < star/atom.
fn prec(r: &Regex) -> u8 {
    match r {
        Regex::Choice(..) => 0,
        Regex::Seq(..) => 1,
        _ => 2,
    }
}

fn write_regex(r: &Regex, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(r) < min {
        write!(f, "(")?;
        write_regex(r, 0, f)?;
        return write!(f, ")");
    }
    match r {
        Regex::Prop(p) => write!(f, "{p}"),
        Regex::Test(body) => write!(f, "{body}?"),
        Regex::Choice(l, rhs) => {
            write_regex(l, 0, f)?;
            write!(f, " + ")?;
            write_regex(rhs, 1, f)
        }
        Regex::Seq(l, rhs) => {
            write_regex(l, 1, f)?;
            write!(f, ";")?;
            write_regex(rhs, 2, f)
        }
        Regex::Star(inner) => {
            match inner.as_ref() {
                // `p?*` would re-parse fine, but a parenthesized body is easier to read.
                Regex::Prop(_) | Regex::Star(_) => write_regex(inner, 2, f)?,
                _ => {
                    write!(f, "(")?;
                    write_regex(inner, 0, f)?;
                    write!(f, ")")?;
                }
            }
            write!(f, "*")
        }
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_regex(self, 0, f)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_tt() {
            return write!(f, "tt");
        }
        if self.is_ff() {
            return write!(f, "ff");
        }
        match self {
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::NegAtom(p) => write!(f, "!{p}"),
            Formula::And(l, r) => write!(f, "({l} & {r})"),
            Formula::Or(l, r) => write!(f, "({l} | {r})"),
            Formula::Diamond(re, body, b) => write!(f, "<{re}>{b} {body}"),
            Formula::Box(re, body, b) => write!(f, "[{re}]{b} {body}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::formula::{parse, parse_with, ParseOptions};

    #[test]
    fn prints_the_concrete_grammar() {
        let f = parse("[tt*](req -> <tt*>{<=x} resp)").unwrap();
        assert_eq!(f.to_string(), "[tt*] (!req | <tt*>{<=x} resp)");
        let g = parse("<(p?;q) + r;s*>{cp} tt").unwrap();
        assert_eq!(g.to_string(), "<p?;q + r;s*>{cp} tt");
    }

    #[test]
    fn right_nested_operators_keep_parentheses() {
        for src in ["<a;(b;c)>p", "<a + (b + c)>p", "<(a + b);c>p", "<((a;b)*)*>p", "<(p?)*>q", "[(a | b) + !c]ff"] {
            let f = parse(src).unwrap();
            let back = parse_with(&f.to_string(), ParseOptions { allow_reserved: true }).unwrap();
            assert_eq!(back, f, "{src} printed as {f}");
        }
    }
}
