use thiserror::Error;

use super::{Bound, Formula, PropFormula, Regex, COLOR_PROP, TRUTH_PROP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("reserved identifier `{name}` at position {pos}")]
    Reserved { pos: usize, name: String },
    #[error("unknown bound suffix at position {pos}")]
    UnknownBound { pos: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::Reserved { pos, .. } | ParseError::UnknownBound { pos } => *pos,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept the reserved `_cp` / `_tt` propositions. Needed to read back
    /// formulas produced by the color transform.
    pub allow_reserved: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lt,
    Gt,
    LBrack,
    RBrack,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Le,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Plus,
    Semi,
    Star,
    Quest,
    Eof,
}

const KEYWORDS: &[&str] = &["tt", "ff", "X", "F", "G", "U", "cp"];

fn lex(text: &str, opts: ParseOptions) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '<' if bytes.get(i + 1) == Some(&b'=') => {
                i += 2;
                Tok::Le
            }
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Tok::Arrow
            }
            '<' | '>' | '[' | ']' | '(' | ')' | '{' | '}' | '!' | '&' | '|' | '+' | ';' | '*' | '?' => {
                i += 1;
                match c {
                    '<' => Tok::Lt,
                    '>' => Tok::Gt,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '!' => Tok::Bang,
                    '&' => Tok::Amp,
                    '|' => Tok::Pipe,
                    '+' => Tok::Plus,
                    ';' => Tok::Semi,
                    '*' => Tok::Star,
                    _ => Tok::Quest,
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                if word.starts_with('_') {
                    let known = word == COLOR_PROP || word == TRUTH_PROP;
                    if !known {
                        return Err(ParseError::Syntax { pos: start, msg: format!("invalid identifier `{word}`") });
                    }
                    if !opts.allow_reserved {
                        return Err(ParseError::Reserved { pos: start, name: word.to_string() });
                    }
                }
                Tok::Ident(word.to_string())
            }
            other => {
                return Err(ParseError::Syntax { pos: start, msg: format!("unexpected character `{other}`") });
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

/// Parses a formula in the concrete syntax; rejects reserved identifiers.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, ParseOptions::default())
}

pub fn parse_with(text: &str, opts: ParseOptions) -> Result<Formula, ParseError> {
    let toks = lex(text, opts)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    p.expect(&Tok::Eof, "end of input")?;
    Ok(f)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn error(&self, msg: String) -> ParseError {
        ParseError::Syntax { pos: self.offset(), msg }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.conj()?;
            f = f.or(rhs);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.implication()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.implication()?;
            f = f.and(rhs);
        }
        Ok(f)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(lhs.negate().or(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(self.unary()?.negate())
            }
            Tok::LParen => {
                self.bump();
                let lhs = self.formula()?;
                if self.is_keyword("U") {
                    self.bump();
                    let rhs = self.formula()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    let step = Regex::test(lhs).seq(Regex::tt()).star();
                    return Ok(Formula::diamond(step, rhs, Bound::None));
                }
                self.expect(&Tok::RParen, "`)`")?;
                Ok(lhs)
            }
            Tok::Lt => {
                self.bump();
                let r = self.regex()?;
                self.expect(&Tok::Gt, "`>`")?;
                let b = self.bound()?;
                let body = self.unary()?;
                Ok(Formula::diamond(r, body, b))
            }
            Tok::LBrack => {
                self.bump();
                let r = self.regex()?;
                self.expect(&Tok::RBrack, "`]`")?;
                let b = self.bound()?;
                let body = self.unary()?;
                Ok(Formula::boxed(r, body, b))
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "tt" => Ok(Formula::tt()),
                    "ff" => Ok(Formula::ff()),
                    "X" => {
                        let body = self.unary()?;
                        Ok(Formula::diamond(Regex::tt(), body, Bound::None))
                    }
                    "F" => {
                        let b = self.bound()?;
                        let body = self.unary()?;
                        Ok(Formula::diamond(Regex::tt().star(), body, b))
                    }
                    "G" => {
                        let b = self.bound()?;
                        let body = self.unary()?;
                        Ok(Formula::boxed(Regex::tt().star(), body, b))
                    }
                    kw if KEYWORDS.contains(&kw) => Err(ParseError::Syntax {
                        pos: self.toks[self.pos - 1].1,
                        msg: format!("unexpected keyword `{kw}`"),
                    }),
                    _ => Ok(Formula::Atom(name)),
                }
            }
            _ => Err(self.error("expected a formula".into())),
        }
    }

    fn bound(&mut self) -> Result<Bound, ParseError> {
        if *self.peek() != Tok::LBrace {
            return Ok(Bound::None);
        }
        let at = self.offset();
        self.bump();
        if self.eat(&Tok::Le) {
            let name = match self.bump() {
                Tok::Ident(n) if !KEYWORDS.contains(&n.as_str()) && !n.starts_with('_') => n,
                _ => return Err(ParseError::UnknownBound { pos: at }),
            };
            if !self.eat(&Tok::RBrace) {
                return Err(ParseError::UnknownBound { pos: at });
            }
            return Ok(Bound::Var(name));
        }
        if self.is_keyword("cp") {
            self.bump();
            if self.eat(&Tok::RBrace) {
                return Ok(Bound::Changepoint);
            }
        }
        Err(ParseError::UnknownBound { pos: at })
    }

    fn regex(&mut self) -> Result<Regex, ParseError> {
        let mut r = self.rseq()?;
        while self.eat(&Tok::Plus) {
            let rhs = self.rseq()?;
            r = r.choice(rhs);
        }
        Ok(r)
    }

    fn rseq(&mut self) -> Result<Regex, ParseError> {
        let mut r = self.rstar()?;
        while self.eat(&Tok::Semi) {
            let rhs = self.rstar()?;
            r = r.seq(rhs);
        }
        Ok(r)
    }

    fn rstar(&mut self) -> Result<Regex, ParseError> {
        let mut r = self.ratom()?;
        while self.eat(&Tok::Star) {
            r = r.star();
        }
        Ok(r)
    }

    /// `formula ?`, then `( regex )`, then a propositional formula; the first
    /// alternative that parses wins.
    fn ratom(&mut self) -> Result<Regex, ParseError> {
        let save = self.pos;
        let first_err = match self.formula() {
            Ok(f) if self.eat(&Tok::Quest) => return Ok(Regex::test(f)),
            Ok(_) => None,
            Err(e) => Some(e),
        };
        self.pos = save;
        if self.eat(&Tok::LParen) {
            if let Ok(r) = self.regex() {
                if self.eat(&Tok::RParen) {
                    return Ok(r);
                }
            }
            self.pos = save;
        }
        match self.prop_disj() {
            Ok(p) => Ok(Regex::Prop(p)),
            Err(e) => {
                // A reserved-identifier error is more informative than the generic one.
                if let Some(ParseError::Reserved { .. }) = first_err {
                    return Err(first_err.unwrap());
                }
                Err(e)
            }
        }
    }

    fn prop_disj(&mut self) -> Result<PropFormula, ParseError> {
        let mut p = self.prop_conj()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.prop_conj()?;
            p = p.or(rhs);
        }
        Ok(p)
    }

    fn prop_conj(&mut self) -> Result<PropFormula, ParseError> {
        let mut p = self.prop_unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.prop_unary()?;
            p = p.and(rhs);
        }
        Ok(p)
    }

    fn prop_unary(&mut self) -> Result<PropFormula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(self.prop_unary()?.not())
            }
            Tok::LParen => {
                self.bump();
                let p = self.prop_disj()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(p)
            }
            Tok::Ident(name) => match name.as_str() {
                "tt" => {
                    self.bump();
                    Ok(PropFormula::True)
                }
                "ff" => {
                    self.bump();
                    Ok(PropFormula::False)
                }
                kw if KEYWORDS.contains(&kw) => Err(self.error(format!("unexpected keyword `{kw}` in regex"))),
                _ => {
                    self.bump();
                    Ok(PropFormula::Var(name))
                }
            },
            _ => Err(self.error("expected a regular expression".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_tt() -> Regex {
        Regex::tt().star()
    }

    #[test]
    fn infinitely_often() {
        let f = parse("[tt*]<tt*>p").unwrap();
        let expected = Formula::boxed(star_tt(), Formula::diamond(star_tt(), Formula::atom("p"), Bound::None), Bound::None);
        assert_eq!(f, expected);
    }

    #[test]
    fn tt_is_canonical_tautology() {
        assert_eq!(parse("tt").unwrap(), Formula::Or(Box::new(Formula::atom(TRUTH_PROP)), Box::new(Formula::neg_atom(TRUTH_PROP))));
    }

    #[test]
    fn request_response_with_bound() {
        let f = parse("[tt*](req -> <tt*>{<=x} resp)").unwrap();
        let expected = Formula::boxed(
            star_tt(),
            Formula::neg_atom("req").or(Formula::diamond(star_tt(), Formula::atom("resp"), Bound::Var("x".into()))),
            Bound::None,
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn ltl_sugar() {
        assert_eq!(parse("X p").unwrap(), Formula::diamond(Regex::tt(), Formula::atom("p"), Bound::None));
        assert_eq!(
            parse("F{<=x} p").unwrap(),
            Formula::diamond(star_tt(), Formula::atom("p"), Bound::Var("x".into()))
        );
        assert_eq!(
            parse("G{<=y} p").unwrap(),
            Formula::boxed(star_tt(), Formula::atom("p"), Bound::Var("y".into()))
        );
        let until = parse("(a U b)").unwrap();
        let step = Regex::test(Formula::atom("a")).seq(Regex::tt()).star();
        assert_eq!(until, Formula::diamond(step, Formula::atom("b"), Bound::None));
    }

    #[test]
    fn negation_sugar_is_pushed_inward() {
        assert_eq!(parse("!(a & <b>c)").unwrap(), parse("!a | [b]!c").unwrap());
    }

    #[test]
    fn regex_atoms() {
        let f = parse("<(p & q)?;(a | b);(c;d)*>{cp} r").unwrap();
        let r = Regex::test(Formula::atom("p").and(Formula::atom("q")))
            .seq(Regex::prop(PropFormula::var("a").or(PropFormula::var("b"))))
            .seq(Regex::prop(PropFormula::var("c")).seq(Regex::prop(PropFormula::var("d"))).star());
        assert_eq!(f, Formula::diamond(r, Formula::atom("r"), Bound::Changepoint));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("p & _cp"), Err(ParseError::Reserved { pos: 4, .. })));
        assert!(matches!(parse("<a>{<x} p"), Err(ParseError::UnknownBound { pos: 3 })));
        assert!(matches!(parse("<a>{foo} p"), Err(ParseError::UnknownBound { .. })));
        assert!(matches!(parse("p &"), Err(ParseError::Syntax { pos: 3, .. })));
        assert!(matches!(parse("p q"), Err(ParseError::Syntax { .. })));
        assert!(parse_with("<tt*>_cp", ParseOptions { allow_reserved: true }).is_ok());
    }
}
