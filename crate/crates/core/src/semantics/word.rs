use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::formula::COLOR_PROP;

pub type Letter = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("lasso word needs a non-empty loop")]
    EmptyLoop,
    #[error("malformed lasso word at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// The ultimately periodic word `prefix . loop^omega`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWord {
    prefix: Vec<Letter>,
    lasso: Vec<Letter>,
}

impl LassoWord {
    pub fn new(prefix: Vec<Letter>, lasso: Vec<Letter>) -> Result<Self, WordError> {
        if lasso.is_empty() {
            return Err(WordError::EmptyLoop);
        }
        Ok(LassoWord { prefix, lasso })
    }

    /// Builds a word from string slices, e.g. `from_sets(&[&["p"], &[]], &[&["q"]])`.
    pub fn from_sets(prefix: &[&[&str]], lasso: &[&[&str]]) -> Self {
        let conv = |xs: &[&[&str]]| xs.iter().map(|s| s.iter().map(|p| p.to_string()).collect()).collect();
        LassoWord::new(conv(prefix), conv(lasso)).expect("non-empty loop")
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn lasso(&self) -> &[Letter] {
        &self.lasso
    }

    /// `|u| + |v|`: number of canonical positions.
    pub fn period_len(&self) -> usize {
        self.prefix.len() + self.lasso.len()
    }

    /// Folds any position into `[0, |u|+|v|)`.
    pub fn canonical(&self, n: usize) -> usize {
        let u = self.prefix.len();
        if n < u {
            n
        } else {
            u + (n - u) % self.lasso.len()
        }
    }

    /// Canonical successor of a canonical position.
    pub fn succ(&self, n: usize) -> usize {
        self.canonical(n + 1)
    }

    pub fn letter(&self, n: usize) -> &Letter {
        let c = self.canonical(n);
        if c < self.prefix.len() {
            &self.prefix[c]
        } else {
            &self.lasso[c - self.prefix.len()]
        }
    }

    pub fn has_color(&self, n: usize) -> bool {
        self.letter(n).contains(COLOR_PROP)
    }

    /// Propositions occurring in some letter.
    pub fn props(&self) -> BTreeSet<String> {
        self.prefix.iter().chain(&self.lasso).flatten().cloned().collect()
    }

    /// The word with every letter restricted to `keep`.
    pub fn restrict(&self, keep: &dyn Fn(&str) -> bool) -> LassoWord {
        let f = |xs: &[Letter]| xs.iter().map(|l| l.iter().filter(|p| keep(p)).cloned().collect()).collect();
        LassoWord { prefix: f(&self.prefix), lasso: f(&self.lasso) }
    }

    /// Unrolled letters `w_0 .. w_{len-1}`.
    pub fn unroll(&self, len: usize) -> Vec<Letter> {
        (0..len).map(|i| self.letter(i).clone()).collect()
    }
}

fn write_sets(f: &mut fmt::Formatter<'_>, sets: &[Letter]) -> fmt::Result {
    for s in sets {
        write!(f, "{{")?;
        for (i, p) in s.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")?;
    }
    Ok(())
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sets(f, &self.prefix)?;
        if !self.prefix.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "$ ")?;
        write_sets(f, &self.lasso)
    }
}

fn parse_sets(text: &str, base: usize) -> Result<Vec<Letter>, WordError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b if (b as char).is_whitespace() => i += 1,
            b'{' => {
                let close = text[i..]
                    .find('}')
                    .ok_or(WordError::Syntax { pos: base + i, msg: "unclosed `{`".into() })?;
                let body = &text[i + 1..i + close];
                let mut set = Letter::new();
                for item in body.split(',') {
                    let item = item.trim();
                    if item.is_empty() {
                        continue;
                    }
                    let ok = item.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                    if !ok {
                        return Err(WordError::Syntax { pos: base + i, msg: format!("bad proposition `{item}`") });
                    }
                    set.insert(item.to_string());
                }
                out.push(set);
                i += close + 1;
            }
            _ => return Err(WordError::Syntax { pos: base + i, msg: "expected `{`".into() }),
        }
    }
    Ok(out)
}

impl FromStr for LassoWord {
    type Err = WordError;

    /// Reads `SETS $ SETS`, e.g. `{p}{} $ {p,q}`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let dollar = s.find('$').ok_or(WordError::Syntax { pos: s.len(), msg: "missing `$`".into() })?;
        let prefix = parse_sets(&s[..dollar], 0)?;
        let lasso = parse_sets(&s[dollar + 1..], dollar + 1)?;
        LassoWord::new(prefix, lasso)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("variable `{0}` has no value")]
    Unbound(String),
    #[error("malformed assignment `{0}`")]
    Syntax(String),
}

/// Maps parameter variables to naturals, with an optional default.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    values: BTreeMap<String, u64>,
    default: Option<u64>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every variable maps to `value`.
    pub fn constant(value: u64) -> Self {
        Valuation { values: BTreeMap::new(), default: Some(value) }
    }

    pub fn with(mut self, var: impl Into<String>, value: u64) -> Self {
        self.values.insert(var.into(), value);
        self
    }

    pub fn set(&mut self, var: impl Into<String>, value: u64) {
        self.values.insert(var.into(), value);
    }

    pub fn set_default(&mut self, value: Option<u64>) {
        self.default = value;
    }

    pub fn get(&self, var: &str) -> Result<u64, ValuationError> {
        self.values
            .get(var)
            .copied()
            .or(self.default)
            .ok_or_else(|| ValuationError::Unbound(var.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &u64)> {
        self.values.iter()
    }

    pub fn max_value(&self) -> u64 {
        self.values.values().copied().chain(self.default).max().unwrap_or(0)
    }

    /// Parses `x=3,y=0`; an empty string is the empty valuation.
    pub fn parse(s: &str) -> Result<Valuation, ValuationError> {
        let mut v = Valuation::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part.split_once('=').ok_or_else(|| ValuationError::Syntax(part.to_string()))?;
            let value: u64 = value.trim().parse().map_err(|_| ValuationError::Syntax(part.to_string()))?;
            v.set(name.trim(), value);
        }
        Ok(v)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints_lasso_format() {
        let w: LassoWord = "{p}{} $ {p,q}".parse().unwrap();
        assert_eq!(w.prefix().len(), 2);
        assert_eq!(w.lasso().len(), 1);
        assert!(w.letter(7).contains("q"));
        assert_eq!(w.to_string(), "{p}{} $ {p,q}");
        let back: LassoWord = w.to_string().parse().unwrap();
        assert_eq!(back, w);

        let no_prefix: LassoWord = "$ {}".parse().unwrap();
        assert!(no_prefix.prefix().is_empty());
        assert_eq!(no_prefix.to_string(), "$ {}");
    }

    #[test]
    fn rejects_bad_words() {
        assert_eq!("{p} $".parse::<LassoWord>(), Err(WordError::EmptyLoop));
        assert!("{p}".parse::<LassoWord>().is_err());
        assert!("{p $ {}".parse::<LassoWord>().is_err());
        assert!("x $ {}".parse::<LassoWord>().is_err());
    }

    #[test]
    fn canonical_positions_fold_into_the_loop() {
        let w = LassoWord::from_sets(&[&["a"]], &[&["b"], &["c"]]);
        assert_eq!(w.canonical(0), 0);
        assert_eq!(w.canonical(3), 1);
        assert_eq!(w.canonical(4), 2);
        assert_eq!(w.succ(2), 1);
    }

    #[test]
    fn valuation_parsing() {
        let v = Valuation::parse("x=3, y=0").unwrap();
        assert_eq!(v.get("x"), Ok(3));
        assert_eq!(v.get("z"), Err(ValuationError::Unbound("z".into())));
        assert!(Valuation::parse("").unwrap().iter().next().is_none());
        assert!(Valuation::parse("x").is_err());
        assert_eq!(Valuation::constant(4).get("q"), Ok(4));
    }
}
