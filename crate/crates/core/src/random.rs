//! Random formulas, words and colorings for the randomized test suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::mc::TransitionSystem;
use crate::formula::{Bound, Formula, PropFormula, Regex, COLOR_PROP};
use crate::semantics::{LassoWord, Letter, Valuation};

/// Which operator bounds a generated formula may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// Unbounded operators only.
    Ldl,
    /// Unbounded and changepoint-bounded operators.
    LdlCp,
    /// Parameterized diamonds (`x`, `y`) and boxes (`z`): well-formed PLDL.
    Pldl,
    /// Parameterized diamonds only.
    PldlDiamond,
}

#[derive(Debug, Clone)]
pub struct FormulaGen {
    pub props: Vec<String>,
    pub flavor: Flavor,
    pub min_size: usize,
    pub max_size: usize,
    pub depth: usize,
}

impl FormulaGen {
    pub fn new(props: &[&str], flavor: Flavor, max_size: usize) -> Self {
        FormulaGen { props: props.iter().map(|p| p.to_string()).collect(), flavor, min_size: max_size / 2, max_size, depth: 4 }
    }

    /// Samples until the size lies in `min_size..=max_size`; after many
    /// misses any formula within the upper limit is accepted.
    pub fn sample(&self, rng: &mut impl Rng) -> Formula {
        for attempt in 0.. {
            let f = self.formula(rng, self.depth);
            let size = f.size();
            if size <= self.max_size && (size >= self.min_size || attempt > 200) {
                return f;
            }
        }
        unreachable!()
    }

    fn prop(&self, rng: &mut impl Rng) -> String {
        self.props.choose(rng).expect("at least one proposition").clone()
    }

    fn bound(&self, rng: &mut impl Rng, diamond: bool) -> Bound {
        match self.flavor {
            Flavor::Ldl => Bound::None,
            Flavor::LdlCp => {
                if rng.gen_bool(0.5) {
                    Bound::Changepoint
                } else {
                    Bound::None
                }
            }
            Flavor::Pldl | Flavor::PldlDiamond => {
                if !rng.gen_bool(0.6) {
                    Bound::None
                } else if diamond {
                    Bound::Var(["x", "y"].choose(rng).unwrap().to_string())
                } else if self.flavor == Flavor::Pldl {
                    Bound::Var("z".into())
                } else {
                    Bound::None
                }
            }
        }
    }

    pub fn formula(&self, rng: &mut impl Rng, depth: usize) -> Formula {
        let choice = if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..7) };
        match choice {
            0 => Formula::atom(self.prop(rng)),
            1 => Formula::neg_atom(self.prop(rng)),
            2 => self.formula(rng, depth - 1).and(self.formula(rng, depth - 1)),
            3 => self.formula(rng, depth - 1).or(self.formula(rng, depth - 1)),
            4 | 5 => {
                let r = self.regex(rng, depth - 1);
                Formula::diamond(r, self.formula(rng, depth - 1), self.bound(rng, true))
            }
            _ => {
                let r = self.regex(rng, depth - 1);
                Formula::boxed(r, self.formula(rng, depth - 1), self.bound(rng, false))
            }
        }
    }

    fn prop_formula(&self, rng: &mut impl Rng) -> PropFormula {
        match rng.gen_range(0..4) {
            0 => PropFormula::True,
            1 => PropFormula::var(self.prop(rng)).not(),
            _ => PropFormula::var(self.prop(rng)),
        }
    }

    pub fn regex(&self, rng: &mut impl Rng, depth: usize) -> Regex {
        let choice = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..7) };
        match choice {
            0 | 1 => Regex::prop(self.prop_formula(rng)),
            2 => Regex::test(self.formula(rng, depth.saturating_sub(1).min(1))),
            3 => self.regex(rng, depth - 1).choice(self.regex(rng, depth - 1)),
            4 | 5 => self.regex(rng, depth - 1).seq(self.regex(rng, depth - 1)),
            _ => self.regex(rng, depth - 1).star(),
        }
    }
}

/// A random letter over `props`.
pub fn letter(rng: &mut impl Rng, props: &[String]) -> Letter {
    props.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// A random lasso with `|u| + |v| <= max_len`.
pub fn lasso(rng: &mut impl Rng, props: &[String], max_len: usize) -> LassoWord {
    let total = rng.gen_range(1..=max_len.max(1));
    let loop_len = rng.gen_range(1..=total);
    let prefix = (0..total - loop_len).map(|_| letter(rng, props)).collect();
    let lasso = (0..loop_len).map(|_| letter(rng, props)).collect();
    LassoWord::new(prefix, lasso).expect("non-empty loop")
}

/// A random valuation of `vars` with values in `0..=max`.
pub fn valuation(rng: &mut impl Rng, vars: &[&str], max: u64) -> Valuation {
    let mut v = Valuation::new();
    for x in vars {
        v.set(*x, rng.gen_range(0..=max));
    }
    v
}

/// A random total transition system with `n` states over `props`.
pub fn transition_system(rng: &mut impl Rng, props: &[String], n: usize) -> TransitionSystem {
    let n = n.max(1);
    let names = (0..n).map(|i| format!("s{i}")).collect();
    let labels = (0..n).map(|_| letter(rng, props)).collect();
    let succ = (0..n)
        .map(|_| {
            let mut out: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
            if out.is_empty() {
                out.push(rng.gen_range(0..n));
            }
            out
        })
        .collect();
    TransitionSystem::new(names, labels, succ, 0).expect("total by construction")
}

/// Block lengths of a coloring: `k`-spaced means every block is at least
/// `k` long, `k`-bounded at most `k` long.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockShape {
    Spaced(usize),
    Bounded(usize),
}

fn blocks(rng: &mut impl Rng, shape: BlockShape, total: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut left = total;
    match shape {
        BlockShape::Bounded(k) => {
            while left > 0 {
                let b = rng.gen_range(1..=k.min(left));
                out.push(b);
                left -= b;
            }
        }
        BlockShape::Spaced(k) => {
            while left >= 2 * k {
                let b = rng.gen_range(k..=(2 * k).min(left - k));
                out.push(b);
                left -= b;
            }
            if left > 0 {
                if left >= k || out.is_empty() {
                    out.push(left);
                } else {
                    *out.last_mut().unwrap() += left;
                }
            }
        }
    }
    out
}

/// A random coloring of `w` with the given block shape, starting with the
/// color proposition false. The result has infinitely many changepoints.
pub fn coloring(rng: &mut impl Rng, w: &LassoWord, shape: BlockShape) -> LassoWord {
    let (u, v) = (w.prefix().len(), w.lasso().len());
    let k = match shape {
        BlockShape::Spaced(k) | BlockShape::Bounded(k) => k.max(1),
    };
    // Prefix blocks cover at least |u| positions.
    let mut pre = Vec::new();
    let mut covered = 0;
    while covered < u {
        let b = match shape {
            BlockShape::Spaced(_) => rng.gen_range(k..=2 * k),
            BlockShape::Bounded(_) => rng.gen_range(1..=k),
        };
        pre.push(b);
        covered += b;
    }
    // The loop spans a multiple of |v| and holds an even number of blocks,
    // so colors repeat with it.
    let reps = match shape {
        BlockShape::Spaced(_) => (2 * k).div_ceil(v).max(1) + rng.gen_range(0..2),
        BlockShape::Bounded(_) => 2 * k * rng.gen_range(1..=2),
    };
    let mut lp = blocks(rng, shape, v * reps);
    if lp.len() % 2 == 1 {
        match shape {
            BlockShape::Bounded(_) => {
                // An odd count with all blocks of length one is impossible as
                // the total is even, so some block can be split.
                let i = lp.iter().position(|&b| b >= 2).expect("even total");
                let b = lp[i];
                lp[i] = b / 2;
                lp.insert(i + 1, b - b / 2);
            }
            BlockShape::Spaced(_) => {
                if lp.len() == 1 {
                    let b = lp[0];
                    lp = vec![b / 2, b - b / 2];
                } else {
                    let last = lp.pop().unwrap();
                    *lp.last_mut().unwrap() += last;
                }
            }
        }
    }
    let mut colors = Vec::new();
    for (i, b) in pre.iter().chain(&lp).enumerate() {
        colors.extend(std::iter::repeat_n(i % 2 == 1, *b));
    }
    let prefix_len = covered;
    let paint = |n: usize, c: bool| {
        let mut l = w.letter(n).clone();
        if c {
            l.insert(COLOR_PROP.to_string());
        }
        l
    };
    let prefix = (0..prefix_len).map(|n| paint(n, colors[n])).collect();
    let lasso = (prefix_len..colors.len()).map(|n| paint(n, colors[n])).collect();
    LassoWord::new(prefix, lasso).expect("non-empty loop")
}

/// Colors `w` by `n mod 2k < k`: the `k`-spaced and `k`-bounded coloring
/// whose first block is colored.
pub fn periodic_coloring(w: &LassoWord, k: usize) -> LassoWord {
    let k = k.max(1);
    let (u, v) = (w.prefix().len(), w.lasso().len());
    let period = v * 2 * k / gcd(v, 2 * k);
    let start = u.div_ceil(2 * k) * 2 * k;
    let paint = |n: usize| {
        let mut l = w.letter(n).clone();
        if n % (2 * k) < k {
            l.insert(COLOR_PROP.to_string());
        }
        l
    };
    LassoWord::new((0..start).map(paint).collect(), (start..start + period).map(paint).collect()).expect("non-empty loop")
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{block_lengths, is_k_bounded, is_k_spaced};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generated_formulas_respect_flavor_and_size() {
        let mut rng = StdRng::seed_from_u64(1);
        for flavor in [Flavor::Ldl, Flavor::LdlCp, Flavor::Pldl, Flavor::PldlDiamond] {
            let g = FormulaGen::new(&["p", "q"], flavor, 20);
            for _ in 0..200 {
                let f = g.sample(&mut rng);
                assert!(f.size() <= 20);
                assert!(f.is_well_formed());
                match flavor {
                    Flavor::Ldl => assert!(f.is_variable_free() && !f.has_changepoint_bounds()),
                    Flavor::LdlCp => assert!(f.is_variable_free()),
                    Flavor::Pldl => assert!(!f.has_changepoint_bounds()),
                    Flavor::PldlDiamond => assert!(f.var_sets().boxes.is_empty()),
                }
            }
        }
    }

    #[test]
    fn colorings_have_the_requested_shape() {
        let mut rng = StdRng::seed_from_u64(2);
        let props = vec!["p".to_string()];
        for _ in 0..300 {
            let w = lasso(&mut rng, &props, 8);
            let k = rng.gen_range(1..=4);
            let s = coloring(&mut rng, &w, BlockShape::Spaced(k));
            assert!(is_k_spaced(&s, k), "{s} not {k}-spaced");
            assert_eq!(s.restrict(&|p| p != COLOR_PROP).unroll(30), w.unroll(30));
            let b = coloring(&mut rng, &w, BlockShape::Bounded(k));
            assert!(is_k_bounded(&b, k), "{b} not {k}-bounded: {:?}", block_lengths(&b));
            assert_eq!(b.restrict(&|p| p != COLOR_PROP).unroll(30), w.unroll(30));
            let p = periodic_coloring(&w, k);
            assert!(is_k_spaced(&p, k) && is_k_bounded(&p, k));
            assert_eq!(p.restrict(&|x| x != COLOR_PROP).unroll(30), w.unroll(30));
        }
    }
}
