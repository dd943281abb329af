//! `pldl`: parse, compile, model-check and synthesize PLDL specifications.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pldl::automata::{build_aba, build_aba_with_valuation};
use pldl::formula::{parse, Formula};
use pldl::mc::{self, McOptions, Verdict};
use pldl::nba::{remove_alternation_with_cap, DEFAULT_STATE_CAP};
use pldl::selftest;
use pldl::semantics::{evaluate, LassoWord, Valuation};
use pldl::synthesis::{self, Realizability, SynthOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Dot,
    JsonLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    Aba,
    Nba,
}

#[derive(Parser)]
#[command(name = "pldl", version, about = "Parametric Linear Dynamic Logic toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormulaArg {
    /// Formula text.
    #[arg(long, short = 'f', conflicts_with = "formula_file")]
    formula: Option<String>,
    /// File holding the formula.
    #[arg(long)]
    formula_file: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Print the formula, its size, its variables and whether it is well-formed.
    Parse {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        out: Output,
    },
    /// Print the negation normal form of the negated formula.
    Negate {
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Build the alternating or nondeterministic Büchi automaton.
    Compile {
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long, value_enum, default_value = "nba")]
        stage: Stage,
        /// Expand parameterized bounds with this valuation.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        max_nba_states: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate the formula on a lasso word such as `{p}{} $ {q}`.
    Eval {
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long)]
        word: String,
        /// Variable valuation, e.g. `x=3,y=0`.
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 0)]
        position: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Model-check a transition system.
    Mc {
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long, short = 's')]
        system: PathBuf,
        /// Lower each reported variable as far as the system allows.
        #[arg(long)]
        tighten: bool,
        /// Check this valuation instead of searching for one.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        max_nba_states: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Decide realizability and print a strategy.
    Realize {
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        outputs: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        max_nba_states: usize,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        max_det_states: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Run the randomized cross-checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[command(flatten)]
        out: Output,
    },
}

/// Failure with exit code 2.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

fn read_formula(arg: &FormulaArg) -> Result<Formula, Fatal> {
    let text = match (&arg.formula, &arg.formula_file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => fs::read_to_string(path).map_err(|e| Fatal(format!("{}: {e}", path.display())))?,
        (None, None) => return Err(Fatal("one of --formula or --formula-file is required".into())),
    };
    Ok(parse(text.trim())?)
}

fn well_formed(f: &Formula) -> Result<(), Fatal> {
    if f.is_well_formed() {
        Ok(())
    } else {
        let vars = f.var_sets();
        let shared: Vec<String> = vars.diamonds.intersection(&vars.boxes).cloned().collect();
        Err(Fatal(format!("not well-formed: {} bound both diamonds and boxes", shared.join(","))))
    }
}

/// The existential answers rest on monotonicity in the parameters, which
/// fails when a parameter sits inside a box's test.
fn warn_if_not_monotone(f: &Formula) {
    if !f.is_monotone() {
        eprintln!("warning: a parameter occurs inside a test of a box regex; the verdict assumes monotonicity and may be wrong");
    }
}

fn valuation_json(v: &Valuation) -> serde_json::Value {
    v.iter().map(|(k, x)| (k.clone(), json!(x))).collect::<serde_json::Map<_, _>>().into()
}

fn names(vars: &BTreeSet<String>) -> String {
    vars.iter().cloned().collect::<Vec<_>>().join(",")
}

fn verdict_code(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

fn run(cli: Cli) -> Result<u8, Fatal> {
    match cli.command {
        Command::Parse { formula, out } => {
            let f = read_formula(&formula)?;
            let vars = f.var_sets();
            if out.format == Format::JsonLines {
                let line = json!({
                    "formula": f.to_string(),
                    "size": f.size(),
                    "diamond_vars": vars.diamonds,
                    "box_vars": vars.boxes,
                    "well_formed": f.is_well_formed(),
                });
                println!("{line}");
            } else {
                println!("formula: {f}");
                println!("ast: {f:?}");
                println!("size: {}", f.size());
                println!("diamond vars: {}", names(&vars.diamonds));
                println!("box vars: {}", names(&vars.boxes));
                println!("well-formed: {}", f.is_well_formed());
            }
            well_formed(&f)?;
            Ok(0)
        }
        Command::Negate { formula } => {
            println!("{}", read_formula(&formula)?.negate());
            Ok(0)
        }
        Command::Compile { formula, stage, alpha, max_nba_states, out } => {
            let f = read_formula(&formula)?;
            let aba = match alpha {
                Some(a) => build_aba_with_valuation(&f, &Valuation::parse(&a)?)?,
                None => build_aba(&f)?,
            };
            let (kind, states, text, dot) = match stage {
                Stage::Aba => ("aba", aba.num_states(), aba.to_text(), aba.to_dot()),
                Stage::Nba => {
                    let nba = remove_alternation_with_cap(&aba, max_nba_states)?.trim();
                    ("nba", nba.num_states(), nba.to_text(), nba.to_dot())
                }
            };
            match out.format {
                Format::Text => print!("{text}"),
                Format::Dot => print!("{dot}"),
                Format::JsonLines => println!("{}", json!({ "automaton": kind, "states": states, "size": f.size(), "text": text })),
            }
            Ok(0)
        }
        Command::Eval { formula, word, alpha, position, out } => {
            let f = read_formula(&formula)?;
            let w: LassoWord = word.parse()?;
            let alpha = Valuation::parse(&alpha)?;
            let holds = evaluate(&f, &w, position, &alpha)?;
            match out.format {
                Format::JsonLines => println!("{}", json!({ "holds": holds })),
                _ => println!("{holds}"),
            }
            Ok(verdict_code(holds))
        }
        Command::Mc { formula, system, tighten, alpha, max_nba_states, out } => {
            let f = read_formula(&formula)?;
            well_formed(&f)?;
            let text = fs::read_to_string(&system).map_err(|e| Fatal(format!("{}: {e}", system.display())))?;
            let ts = mc::parse_ts(&text)?;
            if let Some(a) = alpha {
                let alpha = Valuation::parse(&a)?;
                let trace = mc::violating_trace(&ts, &f, &alpha, max_nba_states)?;
                match (out.format, &trace) {
                    (Format::JsonLines, _) => println!("{}", json!({ "holds": trace.is_none(), "alpha": valuation_json(&alpha), "trace": trace.as_ref().map(|w| w.to_string()) })),
                    (_, None) => println!("satisfied\nalpha: {alpha}"),
                    (_, Some(w)) => println!("violated\nalpha: {alpha}\ntrace: {w}"),
                }
                return Ok(verdict_code(trace.is_none()));
            }
            warn_if_not_monotone(&f);
            let report = mc::model_check_with(&ts, &f, McOptions { state_cap: max_nba_states, tighten })?;
            match &report.verdict {
                Verdict::Satisfied { valuation, bound } => {
                    if out.format == Format::JsonLines {
                        println!("{}", json!({ "verdict": "satisfied", "alpha": valuation_json(valuation), "bound": bound, "nba_states": report.nba_states }));
                    } else {
                        println!("satisfied");
                        println!("alpha: {valuation}");
                        println!("bound: {bound} (2*|Q|*|S|+1 with |Q|={}, |S|={})", report.nba_states, ts.num_states());
                    }
                    Ok(0)
                }
                Verdict::Violated(cex) => {
                    let state_names = |xs: &[usize]| xs.iter().map(|&s| ts.name(s)).collect::<Vec<_>>().join(" ");
                    let states = format!("{} $ {}", state_names(&cex.states.prefix), state_names(&cex.states.cycle));
                    let trace = cex.trace(&ts);
                    if out.format == Format::JsonLines {
                        println!(
                            "{}",
                            json!({ "verdict": "violated", "states": states.trim(), "trace": trace.to_string(), "colored_trace": cex.colored_trace(&ts).to_string() })
                        );
                    } else {
                        println!("violated");
                        println!("states: {}", states.trim());
                        println!("trace: {trace}");
                        println!("colored trace: {}", cex.colored_trace(&ts));
                    }
                    Ok(1)
                }
            }
        }
        Command::Realize { formula, inputs, outputs, max_nba_states, max_det_states, out } => {
            let f = read_formula(&formula)?;
            well_formed(&f)?;
            warn_if_not_monotone(&f);
            let set = |xs: Vec<String>| xs.into_iter().map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect::<BTreeSet<_>>();
            let opts = SynthOptions { nba_cap: max_nba_states, det_cap: max_det_states };
            let report = synthesis::realize_with(&f, &set(inputs), &set(outputs), opts)?;
            match &report.verdict {
                Realizability::Realizable { strategy, valuation, bound } => {
                    match out.format {
                        Format::JsonLines => println!(
                            "{}",
                            json!({ "verdict": "realizable", "alpha": valuation_json(valuation), "bound": bound, "states": strategy.num_states(), "transducer": strategy.to_text() })
                        ),
                        Format::Dot => print!("{}", strategy.to_dot()),
                        Format::Text => {
                            println!("realizable");
                            println!("alpha: {valuation}");
                            println!("bound: {bound} (2n+2 with n={})", strategy.num_states());
                            print!("{}", strategy.to_text());
                        }
                    }
                    Ok(0)
                }
                Realizability::Unrealizable => {
                    match out.format {
                        Format::JsonLines => println!("{}", json!({ "verdict": "unrealizable", "dpa_states": report.dpa_states })),
                        _ => println!("unrealizable"),
                    }
                    Ok(1)
                }
            }
        }
        Command::Selftest { seed, cases, out } => {
            let results = selftest::run(seed, cases);
            for r in &results {
                match out.format {
                    Format::JsonLines => println!("{}", json!({ "suite": r.name, "cases": r.cases, "failures": r.failures, "example": r.example })),
                    _ => {
                        let status = if r.passed() { "pass" } else { "FAIL" };
                        println!("{status} {} ({} cases, {} failures)", r.name, r.cases, r.failures);
                        if let Some(e) = &r.example {
                            println!("  first failure: {e}");
                        }
                    }
                }
            }
            Ok(verdict_code(results.iter().all(|r| r.passed())))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Fatal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
