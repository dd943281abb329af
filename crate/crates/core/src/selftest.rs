//! Quick randomized cross-checks of the pipeline against the oracles.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::automata::build_aba;
use crate::mc::{pumpable_fair_path, pumpable_fair_path_naive, ColoredGraph};
use crate::nba::remove_alternation;
use crate::random::{lasso, valuation, Flavor, FormulaGen};
use crate::semantics::{evaluate, Valuation};
use crate::synthesis::{determinize, solve_brute_force, solve_parity, ParityGame, Player};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// First failing case, if any.
    pub example: Option<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, cases: 0, failures: 0, example: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            self.example.get_or_insert_with(describe);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

/// NBA membership against the oracle on random LDL_cp formulas.
pub fn oracle_equivalence(rng: &mut StdRng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::new("nba-vs-oracle");
    let gen = FormulaGen::new(&["p", "q", "r"], Flavor::LdlCp, 20);
    let props = strings(&["p", "q", "r", crate::formula::COLOR_PROP]);
    for _ in 0..cases {
        let f = gen.sample(rng);
        let nba = match build_aba(&f).map_err(|e| e.to_string()).and_then(|a| remove_alternation(&a).map_err(|e| e.to_string())) {
            Ok(n) => n,
            Err(e) => {
                r.record(false, || format!("{f}: {e}"));
                continue;
            }
        };
        let w = lasso(rng, &props, 8);
        let expected = evaluate(&f, &w, 0, &Valuation::new()).unwrap();
        r.record(nba.membership(&w) == expected, || format!("{f} on {w}"));
    }
    r
}

/// Negation complements the oracle's verdict.
pub fn negation(rng: &mut StdRng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::new("negation");
    let gen = FormulaGen::new(&["p", "q"], Flavor::Pldl, 16);
    let props = strings(&["p", "q"]);
    for _ in 0..cases {
        let f = gen.sample(rng);
        let w = lasso(rng, &props, 8);
        let alpha = valuation(rng, &["x", "y", "z"], 4);
        let a = evaluate(&f, &w, 0, &alpha).unwrap();
        let b = evaluate(&f.negate(), &w, 0, &alpha).unwrap();
        r.record(a != b, || format!("{f} on {w} with {alpha}"));
    }
    r
}

fn random_colored_graph(rng: &mut StdRng) -> ColoredGraph {
    let n = rng.gen_range(1..=8);
    ColoredGraph {
        succ: (0..n)
            .map(|_| {
                let mut out: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
                if out.is_empty() {
                    out.push(rng.gen_range(0..n));
                }
                out
            })
            .collect(),
        initial: 0,
        colored: (0..n).map(|_| rng.gen_bool(0.5)).collect(),
        fair: (0..n).map(|_| rng.gen_bool(0.4)).collect(),
    }
}

/// Augmented-graph pumpable search against the explicit block-set search.
pub fn pumpable(rng: &mut StdRng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::new("pumpable-vs-naive");
    for _ in 0..cases {
        let g = random_colored_graph(rng);
        r.record(pumpable_fair_path(&g).is_some() == pumpable_fair_path_naive(&g), || format!("{g:?}"));
    }
    r
}

/// DPA against NBA membership.
pub fn determinization(rng: &mut StdRng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::new("dpa-vs-nba");
    let gen = FormulaGen::new(&["p", "q"], Flavor::LdlCp, 12);
    let props = strings(&["p", "q", crate::formula::COLOR_PROP]);
    for _ in 0..cases {
        let f = gen.sample(rng);
        let nba = remove_alternation(&build_aba(&f).expect("variable-free")).expect("small formula").trim();
        match determinize(&nba, crate::nba::DEFAULT_STATE_CAP) {
            Ok(dpa) => {
                let w = lasso(rng, &props, 8);
                r.record(dpa.membership(&w) == nba.membership(&w), || format!("{f} on {w}"));
            }
            Err(e) => r.record(false, || format!("{f}: {e}")),
        }
    }
    r
}

/// Zielonka against exhaustive positional strategies.
pub fn parity_games(rng: &mut StdRng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::new("zielonka-vs-brute-force");
    for _ in 0..cases {
        let n = rng.gen_range(1..=8);
        let g = ParityGame {
            owner: (0..n).map(|_| if rng.gen_bool(0.5) { Player::Output } else { Player::Input }).collect(),
            priority: (0..n).map(|_| rng.gen_range(0..5)).collect(),
            succ: (0..n)
                .map(|_| {
                    let mut out = vec![rng.gen_range(0..n), rng.gen_range(0..n)];
                    out.dedup();
                    out
                })
                .collect(),
        };
        r.record(solve_parity(&g).winner == solve_brute_force(&g), || format!("{g:?}"));
    }
    r
}

/// All suites with `cases` cases each.
pub fn run(seed: u64, cases: usize) -> Vec<SuiteResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    vec![
        oracle_equivalence(&mut rng, cases),
        negation(&mut rng, cases),
        pumpable(&mut rng, cases),
        determinization(&mut rng, cases),
        parity_games(&mut rng, cases),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn small_run_passes() {
        for suite in super::run(1, 20) {
            assert!(suite.passed(), "{suite:?}");
        }
    }
}
