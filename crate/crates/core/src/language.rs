//! Factor languages of substitution shifts up to a length bound.

use std::collections::{BTreeSet, HashSet};
use std::ops::Range;

use crate::error::{check_range, Error, Result};
use crate::substitution::Substitution;
use crate::word::{Alphabet, Letter, LetterSet, Word};

/// All factors of length `1..=n_max` of a shift, sorted lexicographically per
/// length, with their one-letter left and right extensions.
///
/// Extension data exists for lengths `0..n_max` (it is read off the next
/// level), so special-factor queries are limited to `n <= n_max - 1`.
#[derive(Debug, Clone)]
pub struct FactorTable {
    alphabet: Alphabet,
    n_max: usize,
    /// `levels[n]` holds `Fact(n)`; `levels[0] == [ε]`.
    levels: Vec<Vec<Word>>,
    left_ext: Vec<Vec<LetterSet>>,
    right_ext: Vec<Vec<LetterSet>>,
}

impl FactorTable {
    /// Factor table of the shift generated by a primitive substitution.
    ///
    /// Every two-letter factor `cd` is iterated under `θ`, harvesting the
    /// length-`n_max` factors of `θ^k(cd)`. Once every `θ^k(a)` has length
    /// at least `n_max`, each length-`n_max` factor of the language lies across
    /// at most two consecutive blocks `θ^k(c)θ^k(d)`, so the harvest is
    /// complete; one further iteration is run and must add nothing. Shorter
    /// levels are the prefixes of the top level (the language is
    /// right-prolongable).
    pub fn build(sub: &Substitution, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidInput("n_max must be at least 1".into()));
        }
        if !sub.is_primitive().primitive {
            return Err(Error::Precondition(
                "factor tables need a primitive substitution".into(),
            ));
        }
        if sub.images().iter().all(|w| w.len() == 1) {
            // A primitive letter permutation lives on a one-letter alphabet: a -> a.
            let top = BTreeSet::from([vec![0; n_max]]);
            return Ok(Self::from_top_level(sub.alphabet().clone(), n_max, top));
        }
        let pairs = two_letter_factors(sub);
        let mut seeds: Vec<Word> = pairs.into_iter().collect();
        let mut harvested: HashSet<Word> = HashSet::new();
        let mut letter_images: Vec<Word> = sub.alphabet().codes().map(|a| vec![a]).collect();
        let mut complete = false;
        loop {
            let before = harvested.len();
            for seed in &seeds {
                harvest_windows(seed, n_max, &mut harvested);
            }
            if complete {
                debug_assert_eq!(before, harvested.len(), "harvest grew after completion");
                if before == harvested.len() {
                    break;
                }
            }
            complete = letter_images.iter().all(|w| w.len() >= n_max);
            seeds = seeds.iter().map(|w| sub.apply(w)).collect();
            letter_images = letter_images.iter().map(|w| sub.apply(w)).collect();
        }
        let top: BTreeSet<Word> = harvested.into_iter().collect();
        Ok(Self::from_top_level(sub.alphabet().clone(), n_max, top))
    }

    /// Factor table harvested from a finite sample of words: level `n` holds
    /// every length-`n` window of the samples. The result is only a shift's
    /// language when the samples are long enough to exhibit it.
    pub fn from_words<W: AsRef<[Letter]>>(alphabet: Alphabet, words: &[W], n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidInput("n_max must be at least 1".into()));
        }
        for w in words {
            alphabet.validate(w.as_ref())?;
        }
        let mut levels = vec![vec![Vec::new()]];
        for n in 1..=n_max {
            let mut set = HashSet::new();
            for w in words {
                harvest_windows(w.as_ref(), n, &mut set);
            }
            let mut level: Vec<Word> = set.into_iter().collect();
            level.sort();
            levels.push(level);
        }
        Ok(Self::from_levels(alphabet, n_max, levels))
    }

    fn from_top_level(alphabet: Alphabet, n_max: usize, top: BTreeSet<Word>) -> Self {
        let top: Vec<Word> = top.into_iter().collect();
        let mut levels = Vec::with_capacity(n_max + 1);
        for n in 0..n_max {
            let mut level: Vec<Word> = top.iter().map(|w| w[..n].to_vec()).collect();
            level.dedup();
            levels.push(level);
        }
        levels.push(top);
        Self::from_levels(alphabet, n_max, levels)
    }

    fn from_levels(alphabet: Alphabet, n_max: usize, levels: Vec<Vec<Word>>) -> Self {
        let mut left_ext = Vec::with_capacity(n_max);
        let mut right_ext = Vec::with_capacity(n_max);
        for n in 0..n_max {
            let mut left = vec![LetterSet::EMPTY; levels[n].len()];
            let mut right = vec![LetterSet::EMPTY; levels[n].len()];
            for w in &levels[n + 1] {
                if let Ok(i) = levels[n].binary_search_by(|v| v.as_slice().cmp(&w[1..])) {
                    left[i].insert(w[0]);
                }
                if let Ok(i) = levels[n].binary_search_by(|v| v.as_slice().cmp(&w[..n])) {
                    right[i].insert(w[n]);
                }
            }
            left_ext.push(left);
            right_ext.push(right);
        }
        Self {
            alphabet,
            n_max,
            levels,
            left_ext,
            right_ext,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `Fact(n)` in lexicographic order.
    pub fn factors(&self, n: usize) -> Result<&[Word]> {
        check_range("factor length", n, 0, self.n_max)?;
        Ok(&self.levels[n])
    }

    /// Factor complexity `p(n)`.
    pub fn complexity(&self, n: usize) -> Result<usize> {
        check_range("factor length", n, 1, self.n_max)?;
        Ok(self.levels[n].len())
    }

    /// Position of `w` in the lexicographic listing of `Fact(|w|)`.
    pub fn index_of(&self, w: &[Letter]) -> Option<usize> {
        self.levels
            .get(w.len())?
            .binary_search_by(|v| v.as_slice().cmp(w))
            .ok()
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        self.index_of(w).is_some()
    }

    /// Index range in `Fact(n)` of the factors having `prefix` as a prefix.
    /// Factors sharing a prefix are contiguous in lexicographic order.
    pub fn prefix_range(&self, prefix: &[Letter], n: usize) -> Result<Range<usize>> {
        check_range("factor length", n, prefix.len(), self.n_max)?;
        let level = &self.levels[n];
        let k = prefix.len();
        let start = level.partition_point(|v| &v[..k] < prefix);
        let end = start + level[start..].partition_point(|v| &v[..k] == prefix);
        Ok(start..end)
    }

    /// `p(u, n)`: number of length-`n` factors with prefix `u`.
    /// Non-factors give 0.
    pub fn restricted_complexity(&self, u: &[Letter], n: usize) -> Result<usize> {
        Ok(self.prefix_range(u, n)?.len())
    }

    fn extension_index(&self, w: &[Letter]) -> Result<Option<usize>> {
        check_range("factor length", w.len(), 0, self.n_max.saturating_sub(1))?;
        Ok(self.index_of(w))
    }

    /// Letters `x` with `x·w` a factor; empty for non-factors.
    pub fn left_extensions(&self, w: &[Letter]) -> Result<LetterSet> {
        Ok(self
            .extension_index(w)?
            .map_or(LetterSet::EMPTY, |i| self.left_ext[w.len()][i]))
    }

    /// Letters `y` with `w·y` a factor; empty for non-factors.
    pub fn right_extensions(&self, w: &[Letter]) -> Result<LetterSet> {
        Ok(self
            .extension_index(w)?
            .map_or(LetterSet::EMPTY, |i| self.right_ext[w.len()][i]))
    }

    pub fn is_left_special(&self, w: &[Letter]) -> Result<bool> {
        Ok(self.left_extensions(w)?.len() >= 2)
    }

    pub fn is_right_special(&self, w: &[Letter]) -> Result<bool> {
        Ok(self.right_extensions(w)?.len() >= 2)
    }

    fn special(&self, n: usize, ext: &[Vec<LetterSet>]) -> Result<Vec<Word>> {
        check_range("factor length", n, 0, self.n_max.saturating_sub(1))?;
        Ok(self.levels[n]
            .iter()
            .zip(&ext[n])
            .filter(|(_, e)| e.len() >= 2)
            .map(|(w, _)| w.clone())
            .collect())
    }

    /// Left special factors of length `n`, sorted.
    pub fn left_special(&self, n: usize) -> Result<Vec<Word>> {
        self.special(n, &self.left_ext)
    }

    /// Right special factors of length `n`, sorted.
    pub fn right_special(&self, n: usize) -> Result<Vec<Word>> {
        self.special(n, &self.right_ext)
    }

    /// `sp_l(n)`, the number of left special factors of length `n`.
    pub fn left_special_count(&self, n: usize) -> Result<usize> {
        check_range("factor length", n, 0, self.n_max.saturating_sub(1))?;
        Ok(self.left_ext[n].iter().filter(|e| e.len() >= 2).count())
    }

    /// `sp_r(n)`, the number of right special factors of length `n`.
    pub fn right_special_count(&self, n: usize) -> Result<usize> {
        check_range("factor length", n, 0, self.n_max.saturating_sub(1))?;
        Ok(self.right_ext[n].iter().filter(|e| e.len() >= 2).count())
    }

    /// Length-`n` left special factors that are prefixes of some left special
    /// factor of length `n + margin`: a finite-depth view of the prefixes of
    /// infinite left special words.
    pub fn persistent_left_special(&self, n: usize, margin: usize) -> Result<Vec<Word>> {
        if n + margin + 1 > self.n_max {
            return Err(Error::InvalidInput(format!(
                "n + margin = {} needs a table of depth {}, have {}",
                n + margin,
                n + margin + 1,
                self.n_max
            )));
        }
        let mut out: Vec<Word> = self
            .left_special(n + margin)?
            .into_iter()
            .map(|w| w[..n].to_vec())
            .collect();
        out.dedup();
        Ok(out)
    }

    pub fn default_margin(&self) -> usize {
        self.n_max / 2
    }

    /// First `n` with `p(n) <= n`, if any. By the Morse–Hedlund theorem such
    /// an `n` means the shift is periodic, and the approximation scheme
    /// degenerates (slopes equal to 1, no special factors of large length).
    pub fn periodicity_witness(&self) -> Option<usize> {
        (1..=self.n_max).find(|&n| self.levels[n].len() <= n)
    }
}

fn harvest_windows(word: &[Letter], n: usize, into: &mut HashSet<Word>) {
    if word.len() >= n {
        for window in word.windows(n) {
            if !into.contains(window) {
                into.insert(window.to_vec());
            }
        }
    }
}

/// Two-letter factors: the least set containing the two-letter factors of
/// every `θ(a)` and closed under `cd ↦ 2-factors of θ(cd)`.
fn two_letter_factors(sub: &Substitution) -> BTreeSet<Word> {
    let mut found = BTreeSet::new();
    for image in sub.images() {
        for w in image.windows(2) {
            found.insert(w.to_vec());
        }
    }
    let mut pending: Vec<Word> = found.iter().cloned().collect();
    while let Some(pair) = pending.pop() {
        for w in sub.apply(&pair).windows(2) {
            if found.insert(w.to_vec()) {
                pending.push(w.to_vec());
            }
        }
    }
    if found.is_empty() {
        // Every image is a single letter: θ only permutes letters.
        for a in sub.alphabet().codes() {
            found.insert(vec![a, sub.image(a)[0]]);
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixture;

    fn table(f: Fixture, n: usize) -> FactorTable {
        FactorTable::build(&f.substitution(), n).unwrap()
    }

    fn words(t: &FactorTable, ws: &[Word]) -> Vec<String> {
        ws.iter().map(|w| t.alphabet().render(w)).collect()
    }

    #[test]
    fn thue_morse_levels() {
        let t = table(Fixture::ThueMorse, 8);
        assert_eq!(words(&t, t.factors(1).unwrap()), ["a", "b"]);
        assert_eq!(words(&t, t.factors(2).unwrap()), ["aa", "ab", "ba", "bb"]);
        assert_eq!(
            words(&t, t.factors(3).unwrap()),
            ["aab", "aba", "abb", "baa", "bab", "bba"]
        );
        assert_eq!(t.complexity(4).unwrap(), 10);
        assert_eq!(t.complexity(5).unwrap(), 12);
        assert!(t.contains(&t.alphabet().parse("bbab").unwrap()));
    }

    #[test]
    fn fibonacci_level_one() {
        let t = table(Fixture::Fibonacci, 1);
        assert_eq!(words(&t, t.factors(1).unwrap()), ["a", "b"]);
    }

    #[test]
    fn zero_depth_and_non_primitive_rejected() {
        assert!(FactorTable::build(&Fixture::ThueMorse.substitution(), 0).is_err());
        let alpha = Alphabet::latin(2).unwrap();
        let s = Substitution::from_rules(alpha, &[('a', "ab"), ('b', "b")]).unwrap();
        assert!(matches!(FactorTable::build(&s, 4), Err(Error::Precondition(_))));
    }

    #[test]
    fn complexity_range() {
        let t = table(Fixture::ThueMorse, 6);
        assert_eq!(t.complexity(2).unwrap(), 4);
        assert!(t.complexity(0).is_err());
        assert!(t.complexity(7).is_err());
    }

    #[test]
    fn special_factor_examples() {
        let t = table(Fixture::ThueMorse, 8);
        assert_eq!(words(&t, &t.left_special(1).unwrap()), ["a", "b"]);
        assert_eq!(words(&t, &t.left_special(2).unwrap()), ["ab", "ba"]);
        assert_eq!(
            words(&t, &t.left_special(3).unwrap()),
            ["aba", "abb", "baa", "bab"]
        );
        assert_eq!(words(&t, &t.left_special(4).unwrap()), ["abba", "baab"]);
        assert!(t.left_special(8).is_err());
        let f = table(Fixture::Fibonacci, 8);
        assert_eq!(words(&f, &f.left_special(2).unwrap()), ["ab"]);
        assert_eq!(f.right_special_count(3).unwrap(), 1);
    }

    #[test]
    fn restricted_complexity_examples() {
        let t = table(Fixture::ThueMorse, 8);
        let p = |u: &str, n| {
            t.restricted_complexity(&t.alphabet().parse(u).unwrap(), n)
                .unwrap()
        };
        assert_eq!(p("a", 2), 2);
        assert_eq!(p("bb", 3), 1);
        assert_eq!(p("bbb", 3), 0);
        assert_eq!(p("bbb", 6), 0);
        assert_eq!(p("", 5), 12);
        for u in t.factors(4).unwrap() {
            assert_eq!(t.restricted_complexity(u, 4).unwrap(), 1);
        }
        assert!(t.restricted_complexity(&[0, 0, 1], 2).is_err());
    }

    #[test]
    fn persistent_left_special_examples() {
        let t = table(Fixture::ThueMorse, 40);
        assert_eq!(t.persistent_left_special(8, 20).unwrap().len(), 2);
        assert!(t.persistent_left_special(20, 20).is_err());
        let f = table(Fixture::Fibonacci, 40);
        assert_eq!(f.persistent_left_special(8, 20).unwrap().len(), 1);
    }

    #[test]
    fn periodic_substitution_is_flagged() {
        let alpha = Alphabet::latin(2).unwrap();
        let s = Substitution::from_rules(alpha, &[('a', "ab"), ('b', "ab")]).unwrap();
        let t = FactorTable::build(&s, 10).unwrap();
        assert_eq!(t.complexity(6).unwrap(), 2);
        assert_eq!(t.periodicity_witness(), Some(2));
        assert_eq!(table(Fixture::ThueMorse, 30).periodicity_witness(), None);
    }

    #[test]
    fn from_words_harvests_each_length() {
        let alpha = Alphabet::latin(2).unwrap();
        let w = alpha.parse("abaababaab").unwrap();
        let t = FactorTable::from_words(alpha, &[w], 3).unwrap();
        assert_eq!(t.complexity(1).unwrap(), 2);
        assert_eq!(t.complexity(2).unwrap(), 3);
        assert_eq!(t.complexity(3).unwrap(), 4);
    }
}
