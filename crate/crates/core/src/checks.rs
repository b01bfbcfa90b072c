//! Invariant suite run by `verify`: every check reports its module, an id,
//! and a counterexample on failure.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coding::{roundtrip_check, CodingPartition, FiniteIet};
use crate::error::Result;
use crate::ietmap::PiecewiseAffineMap;
use crate::language::FactorTable;
use crate::measure::{self, ratio};
use crate::partition::refine;
use crate::substitution::Substitution;
use crate::word::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub module: &'static str,
    pub id: &'static str,
    pub description: &'static str,
    /// `None` when the check passed.
    pub counterexample: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "PASS\t{}\t{}\t{}", self.module, self.id, self.description),
            Some(c) => write!(
                f,
                "FAIL\t{}\t{}\t{}\tcounterexample: {c}",
                self.module, self.id, self.description
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub n_max: usize,
    pub depth_cap: usize,
    pub measure_level: usize,
    /// Levels for the exact tiling checks (clipped to `n_max`).
    pub tiling_levels: Vec<usize>,
    /// Length bound for the brute-force factor comparison.
    pub oracle_len: usize,
    /// Also run the golden-rotation roundtrip (only meaningful for Fibonacci).
    pub roundtrip: bool,
}

impl SuiteConfig {
    pub fn new(n_max: usize) -> Self {
        Self {
            n_max,
            depth_cap: n_max / 2,
            measure_level: n_max.min(100),
            tiling_levels: vec![5, 20, 100],
            oracle_len: 12,
            roundtrip: false,
        }
    }
}

type Check = std::result::Result<(), String>;

fn outcome(module: &'static str, id: &'static str, description: &'static str, res: Check) -> CheckOutcome {
    CheckOutcome {
        module,
        id,
        description,
        counterexample: res.err(),
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// All words of length `<= max_len` over `size` letters, shortest first.
pub fn all_words(size: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Word| {
                (0..size as Letter).map(move |a| {
                    let mut next = w.clone();
                    next.push(a);
                    next
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Brute-force factor sets of a fixed-point prefix of length `10·k²`.
pub fn brute_force_factors(sub: &Substitution, k: usize) -> Result<Vec<BTreeSet<Word>>> {
    let (_, prefix) = sub.any_fixed_point_prefix(10 * k * k)?;
    Ok((0..=k)
        .map(|n| {
            prefix
                .windows(n.max(1))
                .filter(|_| n > 0)
                .map(<[Letter]>::to_vec)
                .collect()
        })
        .collect())
}

/// Runs the full suite against `sub`. Errors only when the table itself
/// cannot be built.
pub fn run_suite(sub: &Substitution, cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let table = FactorTable::build(sub, cfg.n_max)?;
    let mut out = Vec::new();
    substitution_checks(sub, &mut out);
    language_checks(sub, &table, cfg, &mut out);
    partition_checks(&table, cfg, &mut out);
    measure_checks(&table, cfg, &mut out);
    ietmap_checks(&table, cfg, &mut out);
    if cfg.roundtrip {
        let iet = FiniteIet::golden();
        let part = CodingPartition::by_intervals(&iet);
        let res = roundtrip_check(sub, &iet, &part, cfg.n_max.min(15))
            .map_err(|e| e.to_string())
            .and_then(|r| {
                ensure(r.passed(), || match &r.first_mismatch {
                    Some((w, ours)) => format!(
                        "factor {} only in the {} language",
                        sub.alphabet().render(w),
                        if *ours { "substitution" } else { "coded" }
                    ),
                    None => format!("sup distance {:.4} >= {}", r.approximation.sup_diff, r.threshold),
                })
            });
        out.push(outcome("coding", "C1", "golden rotation roundtrip", res));
    }
    Ok(out)
}

fn substitution_checks(sub: &Substitution, out: &mut Vec<CheckOutcome>) {
    let alpha = sub.alphabet();
    let words = all_words(alpha.len(), if alpha.len() <= 2 { 4 } else { 3 });
    let length_law = words.iter().try_for_each(|w| {
        let expected: usize = w.iter().map(|&a| sub.image(a).len()).sum();
        ensure(sub.apply(w).len() == expected, || alpha.render(w))
    });
    out.push(outcome("substitution", "S1", "|θ(w)| = Σ|θ(w_i)|", length_law));

    let morphism = words.iter().try_for_each(|u| {
        words.iter().try_for_each(|v| {
            let uv: Word = u.iter().chain(v).copied().collect();
            let mut split = sub.apply(u);
            split.extend(sub.apply(v));
            ensure(sub.apply(&uv) == split, || {
                format!("u={} v={}", alpha.render(u), alpha.render(v))
            })
        })
    });
    out.push(outcome("substitution", "S2", "θ(uv) = θ(u)θ(v)", morphism));

    let prefixes = sub
        .any_fixed_point_prefix(200)
        .map_err(|e| e.to_string())
        .and_then(|(seed, long)| {
            let power = sub.power(seed.power);
            [1, 7, 50, 199].iter().try_for_each(|&m| {
                let short = power
                    .fixed_point_prefix(seed.letter, m)
                    .map_err(|e| e.to_string())?;
                ensure(long.starts_with(&short), || format!("m={m}"))
            })
        });
    out.push(outcome(
        "substitution",
        "S3",
        "fixed-point prefixes are nested",
        prefixes,
    ));

    let stable = ensure(
        sub.is_primitive().primitive == sub.power(2).is_primitive().primitive,
        || "θ and θ² disagree".into(),
    );
    out.push(outcome(
        "substitution",
        "S4",
        "primitivity is power-stable",
        stable,
    ));

    let perron = sub.perron_frequencies().map_err(|e| e.to_string()).and_then(|f| {
        let total: f64 = f.iter().sum();
        ensure((total - 1.0).abs() <= 1e-12 && f.iter().all(|&x| x > 0.0), || {
            format!("{f:?}")
        })
    });
    out.push(outcome(
        "substitution",
        "S5",
        "Perron frequencies positive, sum 1",
        perron,
    ));
}

fn language_checks(sub: &Substitution, t: &FactorTable, cfg: &SuiteConfig, out: &mut Vec<CheckOutcome>) {
    let alpha = t.alphabet();
    let n_max = t.n_max();
    let prolongable = (0..n_max).try_for_each(|n| {
        t.factors(n).unwrap().iter().try_for_each(|w| {
            let l = t.left_extensions(w).unwrap();
            let r = t.right_extensions(w).unwrap();
            ensure(!l.is_empty() && !r.is_empty(), || alpha.render(w))
        })
    });
    out.push(outcome(
        "language",
        "L1",
        "every factor extends left and right",
        prolongable,
    ));

    let factorial = (1..=n_max).try_for_each(|n| {
        t.factors(n)
            .unwrap()
            .iter()
            .try_for_each(|w| ensure(t.contains(&w[1..]) && t.contains(&w[..n - 1]), || alpha.render(w)))
    });
    out.push(outcome(
        "language",
        "L2",
        "prefixes and suffixes of factors are factors",
        factorial,
    ));

    let increasing = (2..=n_max).try_for_each(|n| {
        let (a, b) = (t.complexity(n - 1).unwrap(), t.complexity(n).unwrap());
        ensure(b > a, || format!("p({})={a}, p({n})={b}", n - 1))
    });
    out.push(outcome("language", "L3", "p(n) strictly increasing", increasing));

    let ls_closed = (1..n_max).try_for_each(|n| {
        t.left_special(n)
            .unwrap()
            .iter()
            .try_for_each(|w| ensure(t.is_left_special(&w[..n - 1]).unwrap(), || alpha.render(w)))
    });
    out.push(outcome(
        "language",
        "L4",
        "prefixes of left special factors are left special",
        ls_closed,
    ));

    let bound_n = n_max.min(20);
    let first_p = (2..=bound_n).try_for_each(|n| {
        let cap = alpha.len() as i64 * t.left_special_count(n - 1).unwrap() as i64;
        (1..n.min(7)).try_for_each(|len| {
            t.factors(len).unwrap().iter().try_for_each(|u| {
                let d = measure::invariance_defect(t, u, n).unwrap();
                ensure((0..=cap).contains(&d), || {
                    format!("u={} n={n} defect={d} cap={cap}", alpha.render(u))
                })
            })
        })
    });
    out.push(outcome(
        "language",
        "L5",
        "0 <= Σ_a p(au,n) - p(u,n-1) <= |A| sp_l(n-1)",
        first_p,
    ));

    let k = cfg.oracle_len.min(n_max);
    let oracle = brute_force_factors(sub, k)
        .map_err(|e| e.to_string())
        .and_then(|sets| {
            (1..=k).try_for_each(|n| {
                let ours: BTreeSet<Word> = t.factors(n).unwrap().iter().cloned().collect();
                ensure(ours == sets[n], || {
                    let diff: Vec<String> = ours
                        .symmetric_difference(&sets[n])
                        .map(|w| alpha.render(w))
                        .collect();
                    format!("n={n}: {}", diff.join(" "))
                })
            })
        });
    out.push(outcome(
        "language",
        "L6",
        "table equals brute-force enumeration",
        oracle,
    ));

    let diffs: Vec<usize> = (2..=n_max)
        .map(|n| {
            t.complexity(n)
                .unwrap()
                .saturating_sub(t.complexity(n - 1).unwrap())
        })
        .collect();
    let half = diffs.len() / 2;
    let early = diffs[..half.max(1).min(diffs.len())]
        .iter()
        .max()
        .copied()
        .unwrap_or(0);
    let late = diffs[half..].iter().max().copied().unwrap_or(0);
    out.push(outcome(
        "language",
        "L7",
        "p(n) - p(n-1) does not grow",
        ensure(late <= early.max(1) * 2, || {
            format!("early max {early}, late max {late}")
        }),
    ));
}

fn partition_checks(t: &FactorTable, cfg: &SuiteConfig, out: &mut Vec<CheckOutcome>) {
    let alpha = t.alphabet();
    let depth = cfg.depth_cap.clamp(2, t.n_max().saturating_sub(1).max(2));
    let part = match refine(t, depth) {
        Ok(p) => p,
        Err(e) => {
            out.push(outcome("partition", "P0", "refinement runs", Err(e.to_string())));
            return;
        }
    };
    let words: Vec<&Word> = part.cylinders.iter().map(|c| &c.word).collect();
    let disjoint = words.iter().enumerate().try_for_each(|(i, a)| {
        words.iter().enumerate().try_for_each(|(j, b)| {
            ensure(i == j || !b.starts_with(a), || {
                format!("{} prefixes {}", alpha.render(a), alpha.render(b))
            })
        })
    });
    out.push(outcome(
        "partition",
        "P1",
        "cylinder words pairwise non-prefix",
        disjoint,
    ));

    let unique = words.iter().try_for_each(|v| {
        let ext = t.left_extensions(&v[1..]).unwrap();
        ensure(ext.len() == 1 && ext.contains(v[0]), || alpha.render(v))
    });
    out.push(outcome(
        "partition",
        "P2",
        "tail of each cylinder word has the unique left extension",
        unique,
    ));

    let cover = (2..=depth.min(16)).try_for_each(|d| {
        let r = refine(t, d).unwrap();
        t.factors(d).unwrap().iter().try_for_each(|w| {
            let hits = r.cylinders.iter().filter(|c| w.starts_with(&c.word)).count()
                + r.unresolved.iter().filter(|u| *u == w).count();
            ensure(hits == 1, || {
                format!("depth {d}: {} has {hits} classifiers", alpha.render(w))
            })
        })
    });
    out.push(outcome(
        "partition",
        "P3",
        "cylinders and unresolved words cover Fact(d)",
        cover,
    ));

    let monotone = (2..depth).try_for_each(|d| {
        let shallow = refine(t, d).unwrap();
        let deep = refine(t, d + 1).unwrap();
        ensure(deep.cylinders.starts_with(&shallow.cylinders), || {
            format!("depth {d}")
        })
    });
    out.push(outcome(
        "partition",
        "P4",
        "refinement is monotone in the depth cap",
        monotone,
    ));
}

fn measure_checks(t: &FactorTable, cfg: &SuiteConfig, out: &mut Vec<CheckOutcome>) {
    let alpha = t.alphabet();
    let n_max = t.n_max();
    let sums = (1..=n_max).try_for_each(|n| {
        let total: BigRational = t
            .factors(n)
            .unwrap()
            .iter()
            .map(|v| measure::cylinder_measure_estimate(t, v, n).unwrap())
            .sum();
        ensure(total.is_one(), || format!("n={n}: {total}"))
    });
    out.push(outcome("measure", "M1", "Σ_v p(v,n)/p(n) = 1", sums));

    let split = [n_max / 4, n_max / 2, n_max]
        .iter()
        .filter(|&&n| n >= 2)
        .try_for_each(|&n| {
            (0..n.min(5)).try_for_each(|len| {
                t.factors(len).unwrap().iter().try_for_each(|u| {
                    let whole = measure::cylinder_measure_estimate(t, u, n).unwrap();
                    let parts: BigRational = alpha
                        .codes()
                        .map(|x| {
                            let mut ux = u.clone();
                            ux.push(x);
                            measure::cylinder_measure_estimate(t, &ux, n).unwrap()
                        })
                        .sum();
                    ensure(whole == parts, || format!("u={} n={n}", alpha.render(u)))
                })
            })
        });
    out.push(outcome("measure", "M2", "estimate(u) = Σ_x estimate(ux)", split));

    let n = cfg.measure_level.clamp(2, n_max);
    let words: Vec<Word> = (1..=4.min(n - 1))
        .flat_map(|len| t.factors(len).unwrap().to_vec())
        .collect();
    let normalized = measure::measure_table(t, &words, n)
        .map_err(|e| e.to_string())
        .and_then(|m| {
            let p_prev = t.complexity(n - 1).unwrap();
            let bound = ratio(alpha.len() * t.left_special_count(n - 1).unwrap(), p_prev);
            ensure(m.max_normalized_defect <= bound, || {
                format!("max {} > bound {}", m.max_normalized_defect, bound)
            })
        });
    out.push(outcome(
        "measure",
        "M3",
        "normalized defect <= |A| sp_l(n-1)/p(n-1)",
        normalized,
    ));

    let drift = (3..=n_max.min(40)).try_for_each(|n| {
        (1..=3.min(n - 1)).try_for_each(|len| {
            t.factors(len).unwrap().iter().try_for_each(|u| {
                let b = measure::drift_bounds(t, u, n).unwrap();
                ensure(b.holds(), || format!("u={} n={n}", alpha.render(u)))
            })
        })
    });
    out.push(outcome(
        "measure",
        "M4",
        "two-sided drift bound between levels",
        drift,
    ));
}

fn ietmap_checks(t: &FactorTable, cfg: &SuiteConfig, out: &mut Vec<CheckOutcome>) {
    let alpha = t.alphabet();
    let n_max = t.n_max();
    let slopes = (2..=n_max).try_for_each(|n| {
        let m = PiecewiseAffineMap::build(t, n).unwrap();
        ensure(m.slope() > BigRational::one(), || {
            format!("n={n} slope {}", m.slope())
        })
    });
    out.push(outcome(
        "ietmap",
        "T1",
        "every slope p(n)/p(n-1) exceeds 1",
        slopes,
    ));

    let levels: Vec<usize> = cfg
        .tiling_levels
        .iter()
        .copied()
        .filter(|&n| (2..=n_max).contains(&n))
        .collect();
    let tiling = levels.iter().try_for_each(|&n| {
        let m = PiecewiseAffineMap::build(t, n).unwrap();
        let p_n = t.complexity(n).unwrap();
        ensure(m.pieces().len() == p_n, || {
            format!("n={n}: {} pieces", m.pieces().len())
        })?;
        let mut cover = vec![0usize; t.complexity(n - 1).unwrap()];
        for piece in m.pieces() {
            cover[piece.target_index] += 1;
        }
        let mut total = 0;
        for (u, &hits) in t.factors(n - 1).unwrap().iter().zip(&cover) {
            let ext = t.left_extensions(u).unwrap().len();
            total += ext;
            ensure(hits == ext, || {
                format!(
                    "n={n}: {} covered {hits} times, {ext} extensions",
                    alpha.render(u)
                )
            })?;
            // Preimage of u's target interval has length |left_ext(u)|/p(n).
            let preimage: BigRational = m
                .pieces()
                .iter()
                .filter(|p| p.factor[1..] == u[..])
                .map(|p| {
                    let (l, r) = m.source_interval(p);
                    r - l
                })
                .sum();
            ensure(preimage == ratio(ext, p_n), || {
                format!("n={n}: preimage of {}", alpha.render(u))
            })?;
        }
        ensure(total == p_n, || format!("n={n}: Σ|left_ext| = {total} != {p_n}"))
    });
    out.push(outcome(
        "ietmap",
        "T2",
        "targets covered |left_ext(u)| times; Σ = p(n)",
        tiling,
    ));

    let depth = cfg.depth_cap.clamp(2, n_max.saturating_sub(1).max(2)).min(12);
    let affinity = refine(t, depth).map_err(|e| e.to_string()).and_then(|part| {
        let start = part.max_cylinder_len().max(2);
        (start..=n_max)
            .step_by(((n_max - start) / 6).max(1))
            .try_for_each(|n| {
                let m = PiecewiseAffineMap::build(t, n).unwrap();
                m.block_affinity_check(t, &part)
                    .unwrap()
                    .iter()
                    .try_for_each(|b| {
                        ensure(b.passed, || {
                            format!("n={n}: cylinder {} has {} jumps", b.index, b.internal_jumps)
                        })
                    })
            })
    });
    out.push(outcome(
        "ietmap",
        "T3",
        "approximants are affine on each cylinder block",
        affinity,
    ));

    if n_max >= 100 {
        let (a, b) = (t.complexity(99).unwrap(), t.complexity(100).unwrap());
        let ok = b * 100 < a * 105 && b > a;
        out.push(outcome(
            "ietmap",
            "T4",
            "1 < p(100)/p(99) < 1.05",
            ensure(ok, || format!("p(100)/p(99) = {b}/{a}")),
        ));
    }

    let ordered = [2, n_max / 2, n_max]
        .iter()
        .filter(|&&n| n >= 2)
        .try_for_each(|&n| {
            let m = PiecewiseAffineMap::build(t, n).unwrap();
            let (p_n, _) = m.grid();
            (0..p_n).try_for_each(|i| {
                let lo = m.evaluate(&ratio(4 * i + 1, 4 * p_n)).unwrap();
                let hi = m.evaluate(&ratio(4 * i + 3, 4 * p_n)).unwrap();
                ensure(lo < hi && !(&hi - &lo).is_zero(), || format!("n={n} piece {i}"))
            })
        });
    out.push(outcome(
        "ietmap",
        "T5",
        "evaluation increases within each piece",
        ordered,
    ));
}
