//! Cylinder measure estimates `p(u, n) / p(n)` and the invariance defects
//! that certify them.
//!
//! All quantities are exact rationals; floating point appears only when a
//! caller asks for a decimal.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{check_range, Error, Result};
use crate::language::FactorTable;
use crate::word::{Letter, Word};

pub(crate) fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `p(u, n) / p(n)`: the length of the interval of `Cyl(u)` on the source
/// axis of the level-`n` approximant.
pub fn cylinder_measure_estimate(table: &FactorTable, u: &[Letter], n: usize) -> Result<BigRational> {
    table.alphabet().validate(u)?;
    check_range("measure level", n, u.len().max(1), table.n_max())?;
    Ok(ratio(table.restricted_complexity(u, n)?, table.complexity(n)?))
}

/// `Σ_{a : a·u ∈ Fact} p(a·u, n) - p(u, n-1)`.
///
/// For a factor `u` this counts, over the length-`(n-1)` factors starting
/// with `u`, the surplus left extensions; it lies in `[0, |A|·sp_l(n-1)]`.
pub fn invariance_defect(table: &FactorTable, u: &[Letter], n: usize) -> Result<i64> {
    table.alphabet().validate(u)?;
    if u.is_empty() || u.len() >= n || n > table.n_max() {
        return Err(Error::InvalidInput(format!(
            "invariance defect needs 1 <= |u| < n <= {}, got |u| = {}, n = {n}",
            table.n_max(),
            u.len()
        )));
    }
    let mut extended = Vec::with_capacity(u.len() + 1);
    let mut total = 0usize;
    for a in table.alphabet().codes() {
        extended.clear();
        extended.push(a);
        extended.extend_from_slice(u);
        total += table.restricted_complexity(&extended, n)?;
    }
    let base = table.restricted_complexity(u, n - 1)?;
    Ok(total as i64 - base as i64)
}

/// Two-sided bound on the drift `p(u,n)/p(n) - p(u,n-1)/p(n-1)` between
/// consecutive levels.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftBounds {
    pub drift: BigRational,
    /// `-|A| · p(u,n-1)/p(n) · sp_l(n-1)/p(n-1)`
    pub lower: BigRational,
    /// `|A| · sp_l(n-1)/p(n-1)`
    pub upper: BigRational,
}

impl DriftBounds {
    pub fn holds(&self) -> bool {
        self.lower <= self.drift && self.drift <= self.upper
    }
}

pub fn drift_bounds(table: &FactorTable, u: &[Letter], n: usize) -> Result<DriftBounds> {
    check_range("measure level", n, u.len().max(1) + 1, table.n_max())?;
    let alphabet = table.alphabet().len();
    let p_n = table.complexity(n)?;
    let p_prev = table.complexity(n - 1)?;
    let sp = table.left_special_count(n - 1)?;
    let count_prev = table.restricted_complexity(u, n - 1)?;
    let drift = cylinder_measure_estimate(table, u, n)? - cylinder_measure_estimate(table, u, n - 1)?;
    let upper = ratio(alphabet * sp, p_prev);
    let lower = -(ratio(count_prev, p_n) * ratio(alphabet * sp, p_prev));
    Ok(DriftBounds { drift, lower, upper })
}

/// Comparison of the estimates at `n` and `n / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCertificate {
    pub at_n: BigRational,
    pub at_half: BigRational,
    pub difference: f64,
    pub certified: bool,
}

pub const DEFAULT_CONVERGENCE_THRESHOLD: f64 = 0.02;

pub fn certify_convergence(
    table: &FactorTable,
    u: &[Letter],
    n: usize,
    threshold: f64,
) -> Result<ConvergenceCertificate> {
    let at_n = cylinder_measure_estimate(table, u, n)?;
    let at_half = cylinder_measure_estimate(table, u, (n / 2).max(u.len()).max(1))?;
    let difference = to_f64(&(&at_n - &at_half)).abs();
    Ok(ConvergenceCertificate {
        certified: difference <= threshold,
        at_n,
        at_half,
        difference,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureEntry {
    pub count: usize,
    pub estimate: BigRational,
    /// Present when `1 <= |u| < n`.
    pub defect: Option<i64>,
}

/// Measure estimates at a fixed level for a set of words.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureTable {
    pub n_used: usize,
    /// `p(n_used)`.
    pub total: usize,
    pub entries: BTreeMap<Word, MeasureEntry>,
    /// Estimates for the single letters, in alphabet order.
    pub letter_frequencies: Vec<BigRational>,
    /// `max_u defect(u) / p(n_used - 1)` over entries that have a defect.
    pub max_normalized_defect: BigRational,
}

impl MeasureTable {
    pub fn estimate(&self, u: &[Letter]) -> Option<&BigRational> {
        self.entries.get(u).map(|e| &e.estimate)
    }

    pub fn entry(&self, u: &[Letter]) -> Option<&MeasureEntry> {
        self.entries.get(u)
    }
}

/// Estimates for every requested word plus every single letter at level `n`.
pub fn measure_table(table: &FactorTable, words: &[Word], n: usize) -> Result<MeasureTable> {
    check_range("measure level", n, 1, table.n_max())?;
    let total = table.complexity(n)?;
    let letters: Vec<Word> = table.alphabet().codes().map(|a| vec![a]).collect();
    let mut entries = BTreeMap::new();
    for u in letters.iter().chain(words) {
        if entries.contains_key(u) {
            continue;
        }
        let count = table.restricted_complexity(u, n)?;
        let estimate = cylinder_measure_estimate(table, u, n)?;
        let defect = if !u.is_empty() && u.len() < n {
            Some(invariance_defect(table, u, n)?)
        } else {
            None
        };
        entries.insert(
            u.clone(),
            MeasureEntry {
                count,
                estimate,
                defect,
            },
        );
    }
    let max_normalized_defect = if n >= 2 {
        let p_prev = table.complexity(n - 1)?;
        entries
            .values()
            .filter_map(|e| e.defect)
            .map(|d| BigRational::new(BigInt::from(d), BigInt::from(p_prev)))
            .max()
            .unwrap_or_else(BigRational::zero)
    } else {
        BigRational::zero()
    };
    let letter_frequencies = letters.iter().map(|u| entries[u].estimate.clone()).collect();
    Ok(MeasureTable {
        n_used: n,
        total,
        entries,
        letter_frequencies,
        max_normalized_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixture;
    use num_traits::One;

    fn table(f: Fixture, n: usize) -> FactorTable {
        FactorTable::build(&f.substitution(), n).unwrap()
    }

    #[test]
    fn empty_word_has_full_measure() {
        let t = table(Fixture::ThueMorse, 30);
        for n in [1, 7, 30] {
            assert!(cylinder_measure_estimate(&t, &[], n).unwrap().is_one());
        }
    }

    #[test]
    fn letter_estimates_at_level_100() {
        let tm = table(Fixture::ThueMorse, 100);
        assert!((to_f64(&cylinder_measure_estimate(&tm, &[0], 100).unwrap()) - 0.5).abs() <= 0.01);
        let fib = table(Fixture::Fibonacci, 100);
        let a = to_f64(&cylinder_measure_estimate(&fib, &[0], 100).unwrap());
        assert!((a - 0.618).abs() <= 0.01, "{a}");
    }

    #[test]
    fn defect_examples() {
        let t = table(Fixture::ThueMorse, 10);
        assert_eq!(invariance_defect(&t, &[0], 3).unwrap(), 1);
        let bb = invariance_defect(&t, &[1, 1], 4).unwrap();
        assert!((0..=2 * t.left_special_count(3).unwrap() as i64).contains(&bb));
        // aaa is not a factor: both terms vanish.
        assert_eq!(invariance_defect(&t, &[0, 0, 0], 6).unwrap(), 0);
        assert!(invariance_defect(&t, &[], 3).is_err());
        assert!(invariance_defect(&t, &[0, 1], 2).is_err());
    }

    #[test]
    fn estimate_range_errors() {
        let t = table(Fixture::ThueMorse, 10);
        assert!(cylinder_measure_estimate(&t, &[0, 1, 1], 2).is_err());
        assert!(cylinder_measure_estimate(&t, &[0], 11).is_err());
        assert!(cylinder_measure_estimate(&t, &[9], 3).is_err());
    }

    #[test]
    fn fibonacci_pair_frequencies() {
        let t = table(Fixture::Fibonacci, 100);
        let words: Vec<Word> = ["aa", "ab", "ba"]
            .iter()
            .map(|s| t.alphabet().parse(s).unwrap())
            .collect();
        let m = measure_table(&t, &words, 100).unwrap();
        let got: Vec<f64> = words.iter().map(|w| to_f64(m.estimate(w).unwrap())).collect();
        let inv = (5f64.sqrt() - 1.0) / 2.0;
        let expected = [2.0 * inv - 1.0, 1.0 - inv, 1.0 - inv];
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 0.01, "{got:?}");
        }
        let letters: BigRational = m.letter_frequencies.iter().sum();
        assert!(letters.is_one());
    }

    #[test]
    fn drift_bounds_hold_on_thue_morse() {
        let t = table(Fixture::ThueMorse, 40);
        for n in 3..=40 {
            for u in t.factors(2).unwrap() {
                assert!(drift_bounds(&t, u, n).unwrap().holds(), "n={n}");
            }
        }
    }

    #[test]
    fn convergence_certificate_for_letters() {
        let t = table(Fixture::Fibonacci, 100);
        let c = certify_convergence(&t, &[0], 100, DEFAULT_CONVERGENCE_THRESHOLD).unwrap();
        assert!(c.certified, "{}", c.difference);
    }
}
