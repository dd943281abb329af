use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::formula::PropFormula;
use crate::semantics::Letter;

/// Largest number of propositions for which letters are enumerated explicitly.
pub const MAX_PROPS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0} propositions exceed the explicit alphabet limit of {MAX_PROPS}")]
pub struct AlphabetTooLarge(pub usize);

/// A finite proposition set; letters are bitmasks over its (sorted) members.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    props: Vec<String>,
}

pub type Mask = u32;

impl Alphabet {
    pub fn new(props: impl IntoIterator<Item = String>) -> Result<Self, AlphabetTooLarge> {
        let props: BTreeSet<String> = props.into_iter().collect();
        if props.len() > MAX_PROPS {
            return Err(AlphabetTooLarge(props.len()));
        }
        Ok(Alphabet { props: props.into_iter().collect() })
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn index(&self, prop: &str) -> Option<usize> {
        self.props.binary_search_by(|p| p.as_str().cmp(prop)).ok()
    }

    /// Number of letters, `2^|props|`.
    pub fn size(&self) -> usize {
        1 << self.props.len()
    }

    pub fn masks(&self) -> std::ops::Range<Mask> {
        0..self.size() as Mask
    }

    /// Projects a letter onto the alphabet; other propositions are dropped.
    pub fn mask(&self, letter: &Letter) -> Mask {
        letter.iter().filter_map(|p| self.index(p)).fold(0, |m, i| m | 1 << i)
    }

    pub fn letter(&self, mask: Mask) -> Letter {
        self.props.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p.clone()).collect()
    }

    pub fn holds(&self, mask: Mask, prop: &str) -> bool {
        self.index(prop).is_some_and(|i| mask >> i & 1 == 1)
    }

    pub fn eval(&self, guard: &PropFormula, mask: Mask) -> bool {
        guard.eval(&|p| self.holds(mask, p))
    }

    /// A compact guard covering exactly the letters in `set`, found by
    /// merging minterms that differ in a single proposition.
    pub fn guard(&self, set: &FixedBitSet) -> PropFormula {
        let n = self.props.len();
        let full: Mask = if n == 0 { 0 } else { (1 << n) - 1 };
        if set.count_ones(..) == self.size() {
            return PropFormula::True;
        }
        // A cube is (values, cared-for positions).
        let mut cubes: BTreeSet<(Mask, Mask)> = set.ones().map(|m| (m as Mask, full)).collect();
        let mut primes = BTreeSet::new();
        while !cubes.is_empty() {
            let mut merged = BTreeSet::new();
            let mut used = BTreeSet::new();
            let list: Vec<_> = cubes.iter().copied().collect();
            for (i, &(v1, c1)) in list.iter().enumerate() {
                for &(v2, c2) in &list[i + 1..] {
                    let diff = v1 ^ v2;
                    if c1 == c2 && diff.count_ones() == 1 {
                        merged.insert((v1 & !diff, c1 & !diff));
                        used.insert((v1, c1));
                        used.insert((v2, c2));
                    }
                }
            }
            primes.extend(cubes.difference(&used).copied());
            cubes = merged;
        }
        // Greedy cover of the minterms by prime cubes.
        let mut uncovered: BTreeSet<Mask> = set.ones().map(|m| m as Mask).collect();
        let mut chosen = Vec::new();
        while !uncovered.is_empty() {
            let best = primes
                .iter()
                .max_by_key(|(v, c)| uncovered.iter().filter(|&&m| m & c == *v).count())
                .copied()
                .expect("every minterm is covered by some prime");
            uncovered.retain(|&m| m & best.1 != best.0);
            chosen.push(best);
        }
        chosen
            .into_iter()
            .map(|(v, c)| {
                (0..n)
                    .filter(|i| c >> i & 1 == 1)
                    .map(|i| {
                        let p = PropFormula::var(&self.props[i]);
                        if v >> i & 1 == 1 {
                            p
                        } else {
                            p.not()
                        }
                    })
                    .reduce(PropFormula::and)
                    .unwrap_or(PropFormula::True)
            })
            .reduce(PropFormula::or)
            .unwrap_or(PropFormula::False)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphabet() -> Alphabet {
        Alphabet::new(["q".to_string(), "p".to_string()]).unwrap()
    }

    #[test]
    fn masks_follow_sorted_props() {
        let a = alphabet();
        let letter: Letter = ["q".to_string(), "zzz".to_string()].into_iter().collect();
        assert_eq!(a.mask(&letter), 0b10);
        assert_eq!(a.letter(0b01), ["p".to_string()].into_iter().collect());
    }

    #[test]
    fn guards_cover_exactly_their_letters() {
        let a = alphabet();
        for bits in 0u32..16 {
            let mut set = FixedBitSet::with_capacity(4);
            for m in 0..4 {
                if bits >> m & 1 == 1 {
                    set.insert(m);
                }
            }
            let g = a.guard(&set);
            for m in a.masks() {
                assert_eq!(a.eval(&g, m), set.contains(m as usize), "set {bits:04b} guard {g}");
            }
        }
    }

    #[test]
    fn single_proposition_guard_is_small() {
        let a = alphabet();
        let mut set = FixedBitSet::with_capacity(4);
        set.insert(0b01);
        set.insert(0b11);
        assert_eq!(a.guard(&set), PropFormula::var("p"));
    }
}
