//! Piecewise-affine approximants `T_n` of the interval exchange conjugate
//! to a shift.
//!
//! The source axis `[0,1)` is cut into `p(n)` equal right-open intervals, one
//! per length-`n` factor in lexicographic order; the target axis into
//! `p(n-1)` intervals for the length-`(n-1)` factors. The piece of `v` maps
//! its source interval affinely onto the target interval of `v` minus its
//! first letter, with slope `p(n)/p(n-1)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{check_range, Error, Result};
use crate::language::FactorTable;
use crate::measure::{ratio, to_f64};
use crate::partition::PartitionResult;
use crate::word::Word;

/// One affine piece: source `[i/p(n), (i+1)/p(n))` onto target
/// `[j/p(n-1), (j+1)/p(n-1))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub factor: Word,
    pub source_index: usize,
    pub target_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseAffineMap {
    n: usize,
    p_n: usize,
    p_prev: usize,
    pieces: Vec<Piece>,
}

impl PiecewiseAffineMap {
    /// Builds `T_n` for `2 <= n <= n_max`.
    pub fn build(table: &FactorTable, n: usize) -> Result<Self> {
        check_range("approximant level", n, 2, table.n_max())?;
        let sources = table.factors(n)?;
        let pieces = sources
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let target_index = table.index_of(&v[1..]).expect("suffix of a factor is a factor");
                Piece {
                    factor: v.clone(),
                    source_index: i,
                    target_index,
                }
            })
            .collect();
        Ok(Self {
            n,
            p_n: sources.len(),
            p_prev: table.complexity(n - 1)?,
            pieces,
        })
    }

    pub fn level(&self) -> usize {
        self.n
    }

    /// `(p(n), p(n-1))`.
    pub fn grid(&self) -> (usize, usize) {
        (self.p_n, self.p_prev)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn slope(&self) -> BigRational {
        ratio(self.p_n, self.p_prev)
    }

    pub fn source_interval(&self, piece: &Piece) -> (BigRational, BigRational) {
        (
            ratio(piece.source_index, self.p_n),
            ratio(piece.source_index + 1, self.p_n),
        )
    }

    pub fn target_interval(&self, piece: &Piece) -> (BigRational, BigRational) {
        (
            ratio(piece.target_index, self.p_prev),
            ratio(piece.target_index + 1, self.p_prev),
        )
    }

    /// Exact evaluation at `x ∈ [0,1)`.
    pub fn evaluate(&self, x: &BigRational) -> Result<BigRational> {
        if x.is_negative() || *x >= BigRational::one() {
            return Err(Error::InvalidInput(format!("x = {x} is outside [0,1)")));
        }
        let scaled = x * BigInt::from(self.p_n);
        let i = scaled.floor().to_integer().to_usize().expect("index fits");
        let piece = &self.pieces[i];
        let offset = scaled - BigRational::from_integer(BigInt::from(i));
        Ok((offset + BigInt::from(piece.target_index)) / BigInt::from(self.p_prev))
    }

    /// Evaluation at the grid point `g / grid`, locating the piece with
    /// integer arithmetic.
    pub fn evaluate_grid(&self, g: usize, grid: usize) -> f64 {
        let (i, rem) = (g * self.p_n).div_rem(&grid);
        let piece = &self.pieces[i];
        (piece.target_index as f64 + rem as f64 / grid as f64) / self.p_prev as f64
    }

    pub fn evaluate_f64(&self, x: f64) -> f64 {
        let scaled = x.clamp(0.0, 1.0) * self.p_n as f64;
        let i = (scaled.floor() as usize).min(self.p_n - 1);
        let piece = &self.pieces[i];
        (piece.target_index as f64 + (scaled - i as f64)) / self.p_prev as f64
    }

    /// Internal breakpoints `i/p(n)` where the left limit of the previous
    /// piece differs from the value of the next one.
    pub fn discontinuities(&self) -> Vec<BigRational> {
        self.discontinuity_indices().map(|i| ratio(i, self.p_n)).collect()
    }

    pub fn discontinuity_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.pieces
            .windows(2)
            .filter(|w| w[1].target_index != w[0].target_index + 1)
            .map(|w| w[1].source_index)
    }

    pub fn discontinuities_f64(&self) -> Vec<f64> {
        self.discontinuity_indices()
            .map(|i| i as f64 / self.p_n as f64)
            .collect()
    }

    /// Checks that on the source block of each cylinder word the map is a
    /// single affine function: consecutive pieces have consecutive targets.
    pub fn block_affinity_check(
        &self,
        table: &FactorTable,
        partition: &PartitionResult,
    ) -> Result<Vec<BlockAffinity>> {
        let longest = partition.max_cylinder_len();
        if longest > self.n {
            return Err(Error::InvalidInput(format!(
                "cylinder of length {longest} exceeds the approximant level {}",
                self.n
            )));
        }
        partition
            .cylinders
            .iter()
            .map(|c| {
                let range = table.prefix_range(&c.word, self.n)?;
                let jumps = self.pieces[range.clone()]
                    .windows(2)
                    .filter(|w| w[1].target_index != w[0].target_index + 1)
                    .count();
                Ok(BlockAffinity {
                    index: c.index,
                    pieces: range.len(),
                    internal_jumps: jumps,
                    passed: jumps == 0 && !range.is_empty(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockAffinity {
    pub index: usize,
    pub pieces: usize,
    pub internal_jumps: usize,
    pub passed: bool,
}

/// Limit interval data for one cylinder word.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitInterval {
    pub index: usize,
    pub word: Word,
    /// `o_k`: estimated measure of the factors of length `|v|` below `v`.
    pub left: BigRational,
    pub length: BigRational,
    /// `o'_k`: same for `v` minus its first letter, at the level below.
    pub image_left: BigRational,
    pub image_length: BigRational,
    /// `K_k = o'_k - o_k`.
    pub translation: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitIntervalSet {
    pub level: usize,
    /// Sorted by left endpoint.
    pub intervals: Vec<LimitInterval>,
    pub residual: BigRational,
}

impl LimitIntervalSet {
    pub fn is_ordered_and_disjoint(&self) -> bool {
        self.intervals
            .windows(2)
            .all(|w| &w[0].left + &w[0].length <= w[1].left)
    }
}

/// Estimates the intervals `I^(k)` and their translations at level `n`.
pub fn limit_intervals(
    table: &FactorTable,
    partition: &PartitionResult,
    n: usize,
) -> Result<LimitIntervalSet> {
    check_range(
        "approximant level",
        n,
        partition.max_cylinder_len().max(2),
        table.n_max(),
    )?;
    let p_n = table.complexity(n)?;
    let p_prev = table.complexity(n - 1)?;
    let mut intervals = Vec::with_capacity(partition.cylinders.len());
    let mut covered = BigRational::zero();
    for c in &partition.cylinders {
        let src = table.prefix_range(&c.word, n)?;
        let img = table.prefix_range(&c.word[1..], n - 1)?;
        let left = ratio(src.start, p_n);
        let image_left = ratio(img.start, p_prev);
        let length = ratio(src.len(), p_n);
        covered += &length;
        intervals.push(LimitInterval {
            index: c.index,
            word: c.word.clone(),
            translation: &image_left - &left,
            left,
            length,
            image_left,
            image_length: ratio(img.len(), p_prev),
        });
    }
    intervals.sort_by(|a, b| a.left.cmp(&b.left));
    Ok(LimitIntervalSet {
        level: n,
        intervals,
        residual: BigRational::one() - covered,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub sup_diff: f64,
    /// Fraction of grid points dropped for lying near a discontinuity.
    pub excluded_mass: f64,
    pub compared_points: usize,
}

/// Sup distance between `T_{n1}` and `T_{n2}` on the grid `g / grid_size`,
/// skipping points within `1/p(n1)` of a discontinuity of either map.
pub fn convergence_report(
    table: &FactorTable,
    n1: usize,
    n2: usize,
    grid_size: usize,
) -> Result<ConvergenceReport> {
    if n1 > n2 {
        return Err(Error::InvalidInput(format!("n1 = {n1} exceeds n2 = {n2}")));
    }
    if grid_size == 0 {
        return Err(Error::InvalidInput("grid size must be positive".into()));
    }
    let coarse = PiecewiseAffineMap::build(table, n1)?;
    let fine = PiecewiseAffineMap::build(table, n2)?;
    let radius = 1.0 / coarse.grid().0 as f64;
    let mut cuts = coarse.discontinuities_f64();
    cuts.extend(fine.discontinuities_f64());
    cuts.sort_by(f64::total_cmp);
    Ok(compare_on_grid(grid_size, &cuts, radius, |g| {
        (coarse.evaluate_grid(g, grid_size) - fine.evaluate_grid(g, grid_size)).abs()
    }))
}

/// Shared grid comparison: `distance(g)` at every grid point farther than
/// `radius` from all sorted `cuts`.
pub fn compare_on_grid(
    grid_size: usize,
    cuts: &[f64],
    radius: f64,
    distance: impl Fn(usize) -> f64,
) -> ConvergenceReport {
    let mut sup_diff = 0.0f64;
    let mut excluded = 0usize;
    for g in 0..grid_size {
        let x = g as f64 / grid_size as f64;
        let i = cuts.partition_point(|&c| c < x);
        let near = [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter_map(|j| cuts.get(j))
            .any(|&c| (c - x).abs() <= radius);
        if near {
            excluded += 1;
        } else {
            sup_diff = sup_diff.max(distance(g));
        }
    }
    ConvergenceReport {
        sup_diff,
        excluded_mass: excluded as f64 / grid_size as f64,
        compared_points: grid_size - excluded,
    }
}

pub const DEFAULT_CLUSTER_MIN: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub center: f64,
    pub low: f64,
    pub high: f64,
    pub size: usize,
}

/// Single-linkage clusters of points at scale `epsilon`, keeping clusters
/// with at least `min_size` members.
pub fn accumulation_clusters(points: &[f64], epsilon: f64, min_size: usize) -> Result<Vec<Cluster>> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > epsilon {
            let members = &sorted[start..i];
            if !members.is_empty() && members.len() >= min_size {
                clusters.push(Cluster {
                    center: members.iter().sum::<f64>() / members.len() as f64,
                    low: members[0],
                    high: members[members.len() - 1],
                    size: members.len(),
                });
            }
            start = i;
        }
    }
    Ok(clusters)
}

/// Two grid points on the flanks of distinct clusters whose images are
/// within `1/p(n-1)` of each other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonInjectivityWitness {
    pub x: f64,
    pub x_other: f64,
    pub image_gap: f64,
}

/// Searches the grid points within `flank` of each cluster for a pair from
/// different clusters with nearly equal images. A numeric observation only.
pub fn non_injectivity_witness(
    map: &PiecewiseAffineMap,
    clusters: &[Cluster],
    flank: f64,
    grid_size: usize,
) -> Option<NonInjectivityWitness> {
    let tolerance = 1.0 / map.grid().1 as f64;
    let near = |c: &Cluster| -> Vec<(f64, f64)> {
        (0..grid_size)
            .map(|g| (g, g as f64 / grid_size as f64))
            .filter(|&(_, x)| x >= c.low - flank && x <= c.high + flank)
            .map(|(g, x)| (x, map.evaluate_grid(g, grid_size)))
            .collect()
    };
    let flanks: Vec<Vec<(f64, f64)>> = clusters.iter().map(near).collect();
    let mut best: Option<NonInjectivityWitness> = None;
    for (i, a) in flanks.iter().enumerate() {
        for b in &flanks[i + 1..] {
            for &(x, y) in a {
                for &(x2, y2) in b {
                    let gap = (y - y2).abs();
                    if x != x2 && gap < tolerance && best.is_none_or(|w| gap < w.image_gap) {
                        best = Some(NonInjectivityWitness {
                            x,
                            x_other: x2,
                            image_gap: gap,
                        });
                    }
                }
            }
        }
    }
    best
}

/// Decimal endpoints of a piece: `(x_left, x_right, y_left, y_right)`.
pub fn piece_endpoints_f64(map: &PiecewiseAffineMap, piece: &Piece) -> (f64, f64, f64, f64) {
    let (p_n, p_prev) = map.grid();
    (
        piece.source_index as f64 / p_n as f64,
        (piece.source_index + 1) as f64 / p_n as f64,
        piece.target_index as f64 / p_prev as f64,
        (piece.target_index + 1) as f64 / p_prev as f64,
    )
}

pub fn rational_f64(x: &BigRational) -> f64 {
    to_f64(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixture;
    use crate::partition::refine;

    fn table(f: Fixture, n: usize) -> FactorTable {
        FactorTable::build(&f.substitution(), n).unwrap()
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn fibonacci_t2() {
        let t = table(Fixture::Fibonacci, 4);
        let m = PiecewiseAffineMap::build(&t, 2).unwrap();
        assert_eq!(m.grid(), (3, 2));
        assert_eq!(m.slope(), r(3, 2));
        let targets: Vec<_> = m.pieces().iter().map(|p| m.target_interval(p)).collect();
        assert_eq!(
            targets,
            vec![(r(0, 1), r(1, 2)), (r(1, 2), r(1, 1)), (r(0, 1), r(1, 2))]
        );
        assert_eq!(m.source_interval(&m.pieces()[1]), (r(1, 3), r(2, 3)));
        assert_eq!(m.discontinuities(), vec![r(2, 3)]);
        assert_eq!(m.evaluate(&r(0, 1)).unwrap(), r(0, 1));
        assert_eq!(m.evaluate(&r(1, 6)).unwrap(), r(1, 4));
        assert_eq!(m.evaluate(&r(5, 6)).unwrap(), r(1, 4));
        assert!(m.evaluate(&r(1, 1)).is_err());
    }

    #[test]
    fn thue_morse_t3() {
        let t = table(Fixture::ThueMorse, 4);
        let m = PiecewiseAffineMap::build(&t, 3).unwrap();
        assert_eq!(m.pieces().len(), 6);
        assert_eq!(m.slope(), r(6, 4));
        assert!(PiecewiseAffineMap::build(&t, 1).is_err());
        assert!(PiecewiseAffineMap::build(&t, 5).is_err());
    }

    #[test]
    fn origin_fixed_when_least_factor_has_least_suffix() {
        let mut anchored = 0;
        for f in Fixture::ALL {
            let t = table(f, 12);
            for n in 2..=12 {
                let m = PiecewiseAffineMap::build(&t, n).unwrap();
                let at_zero = m.evaluate(&BigRational::zero()).unwrap();
                let least = &t.factors(n).unwrap()[0];
                if t.index_of(&least[1..]) == Some(0) {
                    anchored += 1;
                    assert!(at_zero.is_zero());
                } else {
                    assert!(at_zero.is_positive());
                }
            }
        }
        assert!(anchored > 0);
    }

    #[test]
    fn grid_and_exact_evaluation_agree() {
        let t = table(Fixture::Tribonacci, 30);
        let m = PiecewiseAffineMap::build(&t, 30).unwrap();
        for g in (0..1000).step_by(37) {
            let exact = to_f64(&m.evaluate(&r(g, 1000)).unwrap());
            assert!((exact - m.evaluate_grid(g as usize, 1000)).abs() < 1e-12);
        }
    }

    #[test]
    fn block_affinity_examples() {
        let tm = table(Fixture::ThueMorse, 30);
        let part = refine(&tm, 5).unwrap();
        let m = PiecewiseAffineMap::build(&tm, 20).unwrap();
        let report = m.block_affinity_check(&tm, &part).unwrap();
        assert_eq!(report.len(), 6);
        assert!(report.iter().all(|b| b.passed));
        let short = PiecewiseAffineMap::build(&tm, 4).unwrap();
        assert!(short.block_affinity_check(&tm, &part).is_err());

        let fib = table(Fixture::Fibonacci, 12);
        let part = refine(&fib, 3).unwrap();
        let m = PiecewiseAffineMap::build(&fib, 10).unwrap();
        assert!(m.block_affinity_check(&fib, &part).unwrap()[0].passed);
    }

    #[test]
    fn single_piece_map_has_no_discontinuities() {
        let alpha = crate::word::Alphabet::latin(1).unwrap();
        let s = crate::substitution::Substitution::from_rules(alpha, &[('a', "aa")]).unwrap();
        let t = FactorTable::build(&s, 5).unwrap();
        let m = PiecewiseAffineMap::build(&t, 3).unwrap();
        assert_eq!(m.pieces().len(), 1);
        assert!(m.discontinuities().is_empty());
    }

    #[test]
    fn identical_levels_do_not_differ() {
        let t = table(Fixture::ThueMorse, 30);
        let rep = convergence_report(&t, 30, 30, 500).unwrap();
        assert_eq!(rep.sup_diff, 0.0);
        assert!(convergence_report(&t, 20, 10, 500).is_err());
    }

    #[test]
    fn thue_morse_discontinuities_accumulate_at_two_points() {
        let t = table(Fixture::ThueMorse, 200);
        let counts: Vec<usize> = [50, 100, 200]
            .iter()
            .map(|&n| PiecewiseAffineMap::build(&t, n).unwrap().discontinuities().len())
            .collect();
        assert_eq!(counts, [11, 13, 15]);
        let t100 = PiecewiseAffineMap::build(&t, 100).unwrap().discontinuities_f64();
        // At this level each accumulation holds four points within 0.02.
        let clusters = accumulation_clusters(&t100, 0.02, 4).unwrap();
        assert_eq!(clusters.len(), 2);
        assert!(clusters.iter().all(|c| c.size == 4));
        assert!((clusters[0].center - 1.0 / 6.0).abs() < 0.02);
        assert!((clusters[1].center - 5.0 / 6.0).abs() < 0.02);
        assert!(accumulation_clusters(&t100, 0.02, DEFAULT_CLUSTER_MIN)
            .unwrap()
            .is_empty());
        let t200 = PiecewiseAffineMap::build(&t, 200).unwrap().discontinuities_f64();
        assert_eq!(
            accumulation_clusters(&t200, 0.02, DEFAULT_CLUSTER_MIN)
                .unwrap()
                .len(),
            2
        );
        assert_eq!(
            accumulation_clusters(&t100, 1.0, DEFAULT_CLUSTER_MIN)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn fibonacci_jumps_stay_few() {
        let t = table(Fixture::Fibonacci, 100);
        for n in [10, 50, 100] {
            let d = PiecewiseAffineMap::build(&t, n).unwrap().discontinuities_f64();
            assert_eq!(d.len(), 1);
            assert!(
                accumulation_clusters(&d, 0.02, DEFAULT_CLUSTER_MIN)
                    .unwrap()
                    .len()
                    <= 2
            );
        }
    }

    #[test]
    fn non_injectivity_near_thue_morse_accumulations() {
        let t = table(Fixture::ThueMorse, 100);
        let m = PiecewiseAffineMap::build(&t, 100).unwrap();
        let clusters = accumulation_clusters(&m.discontinuities_f64(), 0.02, 4).unwrap();
        let w = non_injectivity_witness(&m, &clusters, 0.01, 2000).expect("witness");
        assert!(w.x < 0.5 && w.x_other > 0.5);
        assert!(w.image_gap < 1.0 / m.grid().1 as f64);
    }

    #[test]
    fn limit_intervals_fibonacci() {
        let t = table(Fixture::Fibonacci, 100);
        let part = refine(&t, 3).unwrap();
        let set = limit_intervals(&t, &part, 100).unwrap();
        assert!(set.is_ordered_and_disjoint());
        let ab = &set.intervals[0];
        assert_eq!(t.alphabet().render(&ab.word), "ab");
        assert!((to_f64(&ab.left) - 0.236).abs() < 0.01);
        assert!((to_f64(&ab.length) - 0.382).abs() < 0.01);
        let total: BigRational = set.intervals.iter().map(|i| &i.length).sum::<BigRational>() + &set.residual;
        assert!(total.is_one());
    }

    #[test]
    fn limit_intervals_thue_morse() {
        let t = table(Fixture::ThueMorse, 100);
        let part = refine(&t, 5).unwrap();
        let set = limit_intervals(&t, &part, 100).unwrap();
        assert_eq!(set.intervals.len(), 6);
        assert!(set.is_ordered_and_disjoint());
        assert!(limit_intervals(&t, &part, 4).is_err());
    }

    #[test]
    fn clustering_basics() {
        let pts = [0.1, 0.105, 0.11, 0.5, 0.9, 0.901];
        let c = accumulation_clusters(&pts, 0.02, 2).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].size, 3);
        assert_eq!(accumulation_clusters(&pts, 1.0, 1).unwrap().len(), 1);
        assert!(accumulation_clusters(&pts, 0.0, 1).is_err());
    }
}
