//! Natural coding of finite interval exchanges with breakpoints in `ℚ(√5)`,
//! and the golden rotation whose coding is the Fibonacci shift.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ietmap::{compare_on_grid, ConvergenceReport, PiecewiseAffineMap};
use crate::language::FactorTable;
use crate::substitution::Substitution;
use crate::word::{Alphabet, Letter, Word};

/// `a + b·√5` with rational `a`, `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    pub a: BigRational,
    pub b: BigRational,
}

impl QuadraticNumber {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        Self::new(a, BigRational::zero())
    }

    pub fn from_ints(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> Self {
        Self::new(
            BigRational::new(a_num.into(), a_den.into()),
            BigRational::new(b_num.into(), b_den.into()),
        )
    }

    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    /// `1/ρ = (√5 - 1)/2` for the golden ratio `ρ`.
    pub fn inverse_golden() -> Self {
        Self::from_ints(-1, 2, 1, 2)
    }

    /// Sign of `a + b√5`, decided exactly from the signs of `a`, `b` and the
    /// comparison of `a²` with `5b²`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            (sa, _) => {
                let a2 = &self.a * &self.a;
                let b2 = &self.b * &self.b * BigInt::from(5);
                // a dominates iff a² > 5b²; a² = 5b² only for a = b = 0.
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    _ => sa.reverse(),
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * 5f64.sqrt()
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn add(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        QuadraticNumber::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl<'a> Sub<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn sub(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        QuadraticNumber::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Neg for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber::new(-&self.a, -&self.b)
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·√5", self.a, self.b)
    }
}

/// A finite interval exchange of `[0,1)`: interval `i` is
/// `[breakpoints[i], breakpoints[i+1])` (the last one ends at 1) and is
/// translated by `translations[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteIet {
    breakpoints: Vec<QuadraticNumber>,
    translations: Vec<QuadraticNumber>,
}

impl FiniteIet {
    pub fn new(breakpoints: Vec<QuadraticNumber>, translations: Vec<QuadraticNumber>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints[0] != QuadraticNumber::zero() {
            return Err(Error::InvalidInput("breakpoints must start at 0".into()));
        }
        if breakpoints.len() != translations.len() {
            return Err(Error::InvalidInput("need one translation per interval".into()));
        }
        let one = QuadraticNumber::one();
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) || breakpoints.last().unwrap() >= &one {
            return Err(Error::InvalidInput(
                "breakpoints must increase strictly inside [0,1)".into(),
            ));
        }
        let iet = Self {
            breakpoints,
            translations,
        };
        let mut images = iet.image_intervals();
        images.sort();
        let tiles = images[0].0 == QuadraticNumber::zero()
            && images.windows(2).all(|w| w[0].1 == w[1].0)
            && images.last().unwrap().1 == one;
        if !tiles {
            return Err(Error::InvalidInput("image intervals do not tile [0,1)".into()));
        }
        Ok(iet)
    }

    /// The two-interval exchange with breakpoint `1/ρ`: a rotation by `1/ρ²`.
    pub fn golden() -> Self {
        let inv = QuadraticNumber::inverse_golden();
        let shift = &QuadraticNumber::one() - &inv;
        Self::new(vec![QuadraticNumber::zero(), inv.clone()], vec![shift, -&inv])
            .expect("golden rotation is an exchange")
    }

    pub fn breakpoints(&self) -> &[QuadraticNumber] {
        &self.breakpoints
    }

    pub fn translations(&self) -> &[QuadraticNumber] {
        &self.translations
    }

    pub fn interval(&self, i: usize) -> (QuadraticNumber, QuadraticNumber) {
        let end = self
            .breakpoints
            .get(i + 1)
            .cloned()
            .unwrap_or_else(QuadraticNumber::one);
        (self.breakpoints[i].clone(), end)
    }

    /// `[l + k, r + k)` for each interval, in interval order.
    pub fn image_intervals(&self) -> Vec<(QuadraticNumber, QuadraticNumber)> {
        (0..self.breakpoints.len())
            .map(|i| {
                let (l, r) = self.interval(i);
                let k = &self.translations[i];
                (&l + k, &r + k)
            })
            .collect()
    }

    fn locate(&self, x: &QuadraticNumber) -> usize {
        self.breakpoints.partition_point(|b| b <= x) - 1
    }

    pub fn apply(&self, x: &QuadraticNumber) -> Result<QuadraticNumber> {
        check_unit(x)?;
        Ok(x + &self.translations[self.locate(x)])
    }

    pub fn apply_f64(&self, x: f64) -> f64 {
        let i = self
            .breakpoints
            .partition_point(|b| b.to_f64() <= x)
            .saturating_sub(1);
        x + self.translations[i].to_f64()
    }
}

fn check_unit(x: &QuadraticNumber) -> Result<()> {
    if x < &QuadraticNumber::zero() || x >= &QuadraticNumber::one() {
        return Err(Error::InvalidInput(format!("x = {x} is outside [0,1)")));
    }
    Ok(())
}

/// A coding partition: interval `i` starts at `breakpoints[i]` and is
/// labelled `letters[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingPartition {
    pub breakpoints: Vec<QuadraticNumber>,
    pub letters: Vec<Letter>,
}

impl CodingPartition {
    /// One letter per exchanged interval, in order.
    pub fn by_intervals(iet: &FiniteIet) -> Self {
        Self {
            breakpoints: iet.breakpoints().to_vec(),
            letters: (0..iet.breakpoints().len() as Letter).collect(),
        }
    }

    /// A single interval carrying one letter.
    pub fn trivial(letter: Letter) -> Self {
        Self {
            breakpoints: vec![QuadraticNumber::zero()],
            letters: vec![letter],
        }
    }

    fn letter_at(&self, x: &QuadraticNumber) -> Letter {
        self.letters[self.breakpoints.partition_point(|b| b <= x) - 1]
    }
}

/// The symbolic orbit of `x`: the partition letters of `x, T x, ..., T^{len-1} x`.
pub fn code_orbit(
    iet: &FiniteIet,
    partition: &CodingPartition,
    x: &QuadraticNumber,
    len: usize,
) -> Result<Word> {
    check_unit(x)?;
    let mut word = Vec::with_capacity(len);
    let mut point = x.clone();
    for _ in 0..len {
        word.push(partition.letter_at(&point));
        point = iet.apply(&point)?;
    }
    Ok(word)
}

/// Starting points that stay exactly representable: 0 and `1/ρ - q` for
/// small rationals `q`.
pub fn sample_points(count: usize) -> Vec<QuadraticNumber> {
    let inv = QuadraticNumber::inverse_golden();
    let mut out = vec![QuadraticNumber::zero()];
    let mut k = 1;
    while out.len() < count {
        let q = QuadraticNumber::from_ints(1, k + 1, 0, 1);
        let x = &inv - &q;
        if x >= QuadraticNumber::zero() {
            out.push(x);
        }
        k += 1;
    }
    out.truncate(count);
    out
}

/// Orbit length used when harvesting factors up to `n_max`.
pub fn orbit_length(n_max: usize) -> usize {
    4 * n_max + 64
}

/// Factor sets of the coded orbits of `samples` starting points.
pub fn coded_factor_table(
    iet: &FiniteIet,
    partition: &CodingPartition,
    alphabet: &Alphabet,
    n_max: usize,
    samples: usize,
) -> Result<FactorTable> {
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let orbits = sample_points(samples)
        .iter()
        .map(|x| code_orbit(iet, partition, x, orbit_length(n_max)))
        .collect::<Result<Vec<_>>>()?;
    FactorTable::from_words(alphabet.clone(), &orbits, n_max)
}

pub const DEFAULT_APPROXIMANT_LEVEL: usize = 100;
pub const DEFAULT_ROUNDTRIP_THRESHOLD: f64 = 0.05;
pub const DEFAULT_GRID: usize = 1000;

/// Sup distance between an approximant and a finite exchange on a grid,
/// skipping points within `1/p(n)` of the exchange's breakpoints.
pub fn approximation_error(map: &PiecewiseAffineMap, iet: &FiniteIet, grid_size: usize) -> ConvergenceReport {
    let radius = 1.0 / map.grid().0 as f64;
    let cuts: Vec<f64> = iet.breakpoints().iter().map(|b| b.to_f64()).collect();
    compare_on_grid(grid_size, &cuts, radius, |g| {
        let x = g as f64 / grid_size as f64;
        (map.evaluate_grid(g, grid_size) - iet.apply_f64(x)).abs()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripReport {
    pub n_max: usize,
    pub factor_sets_equal: bool,
    /// First factor (by length, then order) found in exactly one of the two
    /// languages, with `true` when it belongs to the substitution side.
    pub first_mismatch: Option<(Word, bool)>,
    pub approximant_level: usize,
    pub approximation: ConvergenceReport,
    pub threshold: f64,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.factor_sets_equal && self.approximation.sup_diff < self.threshold
    }
}

/// Checks that a substitution and a finite exchange describe the same shift:
/// equal factor sets up to `n_max`, and approximants close to the exchange.
pub fn roundtrip_check(
    sub: &Substitution,
    iet: &FiniteIet,
    partition: &CodingPartition,
    n_max: usize,
) -> Result<RoundtripReport> {
    roundtrip_check_with(
        sub,
        iet,
        partition,
        n_max,
        DEFAULT_APPROXIMANT_LEVEL,
        DEFAULT_ROUNDTRIP_THRESHOLD,
    )
}

pub fn roundtrip_check_with(
    sub: &Substitution,
    iet: &FiniteIet,
    partition: &CodingPartition,
    n_max: usize,
    approximant_level: usize,
    threshold: f64,
) -> Result<RoundtripReport> {
    let depth = n_max.max(approximant_level);
    let table = FactorTable::build(sub, depth)?;
    let coded = coded_factor_table(iet, partition, sub.alphabet(), n_max, 3)?;
    let mut first_mismatch = None;
    'levels: for n in 1..=n_max {
        let ours = table.factors(n)?;
        let theirs = coded.factors(n)?;
        if let Some(w) = ours.iter().find(|w| !coded.contains(w)) {
            first_mismatch = Some((w.clone(), true));
            break 'levels;
        }
        if let Some(w) = theirs.iter().find(|w| !table.contains(w)) {
            first_mismatch = Some((w.clone(), false));
            break 'levels;
        }
    }
    let map = PiecewiseAffineMap::build(&table, approximant_level)?;
    Ok(RoundtripReport {
        n_max,
        factor_sets_equal: first_mismatch.is_none(),
        first_mismatch,
        approximant_level,
        approximation: approximation_error(&map, iet, DEFAULT_GRID),
        threshold,
    })
}

/// Rational orbit points are handy in tests and the demo.
pub fn rational_point(num: i64, den: i64) -> QuadraticNumber {
    QuadraticNumber::from_ints(num, den, 0, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixture;

    fn q(a: i64, b: i64) -> QuadraticNumber {
        QuadraticNumber::from_ints(a, 1, b, 1)
    }

    #[test]
    fn quadratic_signs() {
        assert_eq!(q(3, -1).signum(), Ordering::Greater); // 3 > √5
        assert_eq!(q(2, -1).signum(), Ordering::Less);
        assert_eq!(q(-3, 1).signum(), Ordering::Less);
        assert_eq!(q(-2, 1).signum(), Ordering::Greater);
        assert_eq!(q(0, 0).signum(), Ordering::Equal);
        assert_eq!(q(0, -1).signum(), Ordering::Less);
        let inv = QuadraticNumber::inverse_golden();
        assert!((inv.to_f64() - 0.6180339887498949).abs() < 1e-15);
        assert!(inv > rational_point(618, 1000) && inv < rational_point(619, 1000));
    }

    #[test]
    fn golden_exchange() {
        let iet = FiniteIet::golden();
        let inv = QuadraticNumber::inverse_golden();
        let one = QuadraticNumber::one();
        assert_eq!(iet.apply(&QuadraticNumber::zero()).unwrap(), &one - &inv);
        let images = iet.image_intervals();
        assert_eq!(images[0], (&one - &inv, one.clone()));
        assert_eq!(images[1], (QuadraticNumber::zero(), &one - &inv));
        assert!(iet.apply(&one).is_err());
    }

    #[test]
    fn non_tiling_exchange_rejected() {
        let half = rational_point(1, 2);
        let res = FiniteIet::new(
            vec![QuadraticNumber::zero(), half.clone()],
            vec![half.clone(), QuadraticNumber::zero()],
        );
        assert!(res.is_err());
    }

    #[test]
    fn orbit_examples() {
        let iet = FiniteIet::golden();
        let part = CodingPartition::by_intervals(&iet);
        assert_eq!(
            code_orbit(&iet, &part, &QuadraticNumber::zero(), 1).unwrap(),
            vec![0]
        );
        let fib = FactorTable::build(&Fixture::Fibonacci.substitution(), 12).unwrap();
        let w = code_orbit(&iet, &part, &QuadraticNumber::zero(), 12).unwrap();
        assert!(fib.contains(&w));
        assert!(code_orbit(&iet, &part, &rational_point(-1, 3), 4).is_err());
    }

    #[test]
    fn trivial_partition_codes_one_letter() {
        let iet = FiniteIet::golden();
        let alpha = Alphabet::latin(1).unwrap();
        let t = coded_factor_table(&iet, &CodingPartition::trivial(0), &alpha, 6, 2).unwrap();
        assert!((1..=6).all(|n| t.complexity(n).unwrap() == 1));
    }

    #[test]
    fn roundtrip_examples() {
        let iet = FiniteIet::golden();
        let part = CodingPartition::by_intervals(&iet);
        let fib = Fixture::Fibonacci.substitution();
        assert!(roundtrip_check(&fib, &iet, &part, 15).unwrap().passed());
        assert!(roundtrip_check(&fib, &iet, &part, 1).unwrap().passed());
        let tm = roundtrip_check(&Fixture::ThueMorse.substitution(), &iet, &part, 5).unwrap();
        assert!(!tm.passed());
        assert!(!tm.factor_sets_equal);
    }

    #[test]
    fn sample_points_in_unit_interval() {
        for x in sample_points(6) {
            assert!(x >= QuadraticNumber::zero() && x < QuadraticNumber::one());
        }
    }
}
