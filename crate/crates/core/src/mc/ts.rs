use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::semantics::{LassoWord, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: state `{name}` declared twice")]
    DuplicateState { line: usize, name: String },
    #[error("line {line}: second initial state `{name}`")]
    DuplicateInit { line: usize, name: String },
    #[error("no initial state")]
    MissingInit,
    #[error("line {line}: unknown state `{name}`")]
    UnknownState { line: usize, name: String },
    #[error("non-total: state `{0}` has no outgoing edge")]
    NonTotal(String),
}

/// Finite labeled transition system with a total edge relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    names: Vec<String>,
    labels: Vec<Letter>,
    succ: Vec<Vec<usize>>,
    initial: usize,
}

impl TransitionSystem {
    pub fn new(names: Vec<String>, labels: Vec<Letter>, succ: Vec<Vec<usize>>, initial: usize) -> Result<Self, TsError> {
        if let Some(s) = (0..names.len()).find(|&s| succ[s].is_empty()) {
            return Err(TsError::NonTotal(names[s].clone()));
        }
        Ok(TransitionSystem { names, labels, succ, initial })
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn label(&self, s: usize) -> &Letter {
        &self.labels[s]
    }

    pub fn successors(&self, s: usize) -> &[usize] {
        &self.succ[s]
    }

    /// Trace of a lasso-shaped state path.
    pub fn trace(&self, prefix: &[usize], cycle: &[usize]) -> LassoWord {
        let labels = |xs: &[usize]| xs.iter().map(|&s| self.labels[s].clone()).collect();
        LassoWord::new(labels(prefix), labels(cycle)).expect("non-empty cycle")
    }
}

fn parse_set(text: &str, line: usize) -> Result<Letter, TsError> {
    let syntax = |msg: &str| TsError::Syntax { line, msg: msg.to_string() };
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| syntax("expected a label set `{p,q}`"))?;
    let mut out = Letter::new();
    for p in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if !p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax(&format!("bad proposition `{p}`")));
        }
        out.insert(p.to_string());
    }
    Ok(out)
}

/// Reads the line format `state <id> [init] {p,q}` / `edge <from> <to>`,
/// with `#` comments.
pub fn parse_ts(text: &str) -> Result<TransitionSystem, TsError> {
    let mut names = Vec::new();
    let mut labels = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut initial = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        match words.next() {
            Some("state") => {
                let name = words.next().ok_or(TsError::Syntax { line, msg: "missing state id".into() })?.to_string();
                let mut rest = content.splitn(3, char::is_whitespace).nth(2).unwrap_or("").trim();
                let mut is_init = false;
                if let Some(r) = rest.strip_prefix("init") {
                    is_init = true;
                    rest = r.trim();
                }
                let label = parse_set(rest, line)?;
                if ids.contains_key(&name) {
                    return Err(TsError::DuplicateState { line, name });
                }
                if is_init {
                    if initial.is_some() {
                        return Err(TsError::DuplicateInit { line, name });
                    }
                    initial = Some(names.len());
                }
                ids.insert(name.clone(), names.len());
                names.push(name);
                labels.push(label);
            }
            Some("edge") => {
                let from = words.next();
                let to = words.next();
                match (from, to, words.next()) {
                    (Some(a), Some(b), None) => edges.push((line, a.to_string(), b.to_string())),
                    _ => return Err(TsError::Syntax { line, msg: "expected `edge <from> <to>`".into() }),
                }
            }
            Some(other) => return Err(TsError::Syntax { line, msg: format!("unknown directive `{other}`") }),
            None => unreachable!(),
        }
    }
    let mut succ = vec![Vec::new(); names.len()];
    for (line, a, b) in edges {
        let lookup = |n: &str| ids.get(n).copied().ok_or_else(|| TsError::UnknownState { line, name: n.to_string() });
        let (x, y) = (lookup(&a)?, lookup(&b)?);
        if !succ[x].contains(&y) {
            succ[x].push(y);
        }
    }
    let initial = initial.ok_or(TsError::MissingInit)?;
    TransitionSystem::new(names, labels, succ, initial)
}

impl fmt::Display for TransitionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in 0..self.num_states() {
            let init = if s == self.initial { " init" } else { "" };
            let label: Vec<&str> = self.labels[s].iter().map(String::as_str).collect();
            writeln!(f, "state {}{init} {{{}}}", self.names[s], label.join(","))?;
        }
        for s in 0..self.num_states() {
            for &t in &self.succ[s] {
                writeln!(f, "edge {} {}", self.names[s], self.names[t])?;
            }
        }
        Ok(())
    }
}
