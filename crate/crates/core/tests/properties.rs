use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use shift2iet::coding::{code_orbit, coded_factor_table, CodingPartition, FiniteIet, QuadraticNumber};
use shift2iet::measure::{cylinder_measure_estimate, drift_bounds, invariance_defect};
use shift2iet::{refine, Alphabet, FactorTable, Fixture, PiecewiseAffineMap, Word};

const N_MAX: usize = 120;

fn table(f: Fixture) -> &'static FactorTable {
    static TABLES: OnceLock<Vec<FactorTable>> = OnceLock::new();
    let all = TABLES.get_or_init(|| {
        Fixture::ALL
            .iter()
            .map(|f| FactorTable::build(&f.substitution(), N_MAX).unwrap())
            .collect()
    });
    &all[Fixture::ALL.iter().position(|g| *g == f).unwrap()]
}

fn fixture() -> impl Strategy<Value = Fixture> {
    prop::sample::select(Fixture::ALL.to_vec())
}

fn word_over(f: Fixture, max_len: usize) -> impl Strategy<Value = Word> {
    let size = f.substitution().alphabet().len() as u8;
    prop::collection::vec(0..size, 0..=max_len)
}

fn factor(f: Fixture, n: usize, seed: usize) -> Word {
    let fs = table(f).factors(n).unwrap();
    fs[seed % fs.len()].clone()
}

fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new(a.into(), b.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn morphism_and_length_laws((f, u, v) in fixture().prop_flat_map(|f| (Just(f), word_over(f, 12), word_over(f, 12)))) {
        let s = f.substitution();
        let uv: Word = u.iter().chain(&v).copied().collect();
        let mut joined = s.apply(&u);
        joined.extend(s.apply(&v));
        prop_assert_eq!(s.apply(&uv), joined);
        let lens: usize = uv.iter().map(|&a| s.image(a).len()).sum();
        prop_assert_eq!(s.apply(&uv).len(), lens);
    }

    #[test]
    fn fixed_point_prefixes_nest(f in fixture(), m in 1usize..300, extra in 0usize..300) {
        let s = f.substitution();
        let seed = s.prolongable_seed().unwrap();
        let p = s.power(seed.power);
        let short = p.fixed_point_prefix(seed.letter, m).unwrap();
        let long = p.fixed_point_prefix(seed.letter, m + extra).unwrap();
        prop_assert!(short.len() >= m);
        prop_assert!(long.starts_with(&short) || short.starts_with(&long));
        let head = p.apply(&short[..1]);
        prop_assert_eq!(head.first(), short.first());
    }

    #[test]
    fn primitivity_survives_squaring(f in fixture(), k in 1usize..4) {
        let s = f.substitution().power(k);
        prop_assert!(s.is_primitive().primitive);
        prop_assert!(s.power(2).is_primitive().primitive);
    }

    #[test]
    fn factor_closure_and_extension(f in fixture(), n in 1usize..N_MAX, seed in any::<usize>()) {
        let t = table(f);
        let w = factor(f, n, seed);
        prop_assert!(t.contains(&w[1..]));
        prop_assert!(t.contains(&w[..n - 1]));
        prop_assert!(!t.left_extensions(&w).unwrap().is_empty());
        prop_assert!(!t.right_extensions(&w).unwrap().is_empty());
    }

    #[test]
    fn complexity_increases_with_bounded_steps(f in fixture(), n in 2usize..=N_MAX) {
        let t = table(f);
        let (a, b) = (t.complexity(n - 1).unwrap(), t.complexity(n).unwrap());
        prop_assert!(b > a);
        let alpha = t.alphabet().len();
        prop_assert!(b - a <= (alpha - 1) * t.left_special_count(n - 1).unwrap());
    }

    #[test]
    fn left_special_prefix_closed(f in fixture(), n in 2usize..N_MAX, seed in any::<usize>()) {
        let t = table(f);
        let ls = t.left_special(n).unwrap();
        prop_assume!(!ls.is_empty());
        let w = &ls[seed % ls.len()];
        for k in 0..n {
            prop_assert!(t.is_left_special(&w[..k]).unwrap());
        }
    }

    #[test]
    fn defect_between_zero_and_special_bound(f in fixture(), len in 1usize..=6, n in 8usize..=20, seed in any::<usize>()) {
        let t = table(f);
        let u = factor(f, len, seed);
        let d = invariance_defect(t, &u, n).unwrap();
        let cap = (t.alphabet().len() * t.left_special_count(n - 1).unwrap()) as i64;
        prop_assert!((0..=cap).contains(&d), "defect {} cap {}", d, cap);
    }

    #[test]
    fn estimates_split_over_children(f in fixture(), len in 0usize..6, n in 6usize..=N_MAX, seed in any::<usize>()) {
        let t = table(f);
        let u = if len == 0 { Vec::new() } else { factor(f, len, seed) };
        let whole = cylinder_measure_estimate(t, &u, n).unwrap();
        let parts: BigRational = t.alphabet().codes().map(|x| {
            let mut ux = u.clone();
            ux.push(x);
            cylinder_measure_estimate(t, &ux, n).unwrap()
        }).sum();
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn drift_within_bounds(f in fixture(), len in 1usize..5, n in 10usize..=N_MAX, seed in any::<usize>()) {
        let t = table(f);
        let b = drift_bounds(t, &factor(f, len, seed), n).unwrap();
        prop_assert!(b.holds());
    }

    #[test]
    fn partition_invariants(f in fixture(), depth in 2usize..30) {
        let t = table(f);
        let r = refine(t, depth).unwrap();
        for (i, a) in r.cylinders.iter().enumerate() {
            for (j, b) in r.cylinders.iter().enumerate() {
                prop_assert!(i == j || !b.word.starts_with(&a.word));
            }
            let ext = t.left_extensions(&a.word[1..]).unwrap();
            prop_assert_eq!(ext.len(), 1);
            prop_assert!(ext.contains(a.word[0]));
            prop_assert_eq!(a.step, a.word.len() - 1);
        }
        for w in t.factors(depth).unwrap() {
            let hits = r.cylinders.iter().filter(|c| w.starts_with(&c.word)).count()
                + r.unresolved.iter().filter(|u| *u == w).count();
            prop_assert_eq!(hits, 1);
        }
        let deeper = refine(t, depth + 1).unwrap();
        prop_assert!(deeper.cylinders.starts_with(&r.cylinders));
    }

    #[test]
    fn approximant_tiles_the_level_below(f in fixture(), n in 2usize..=N_MAX) {
        let t = table(f);
        let m = PiecewiseAffineMap::build(t, n).unwrap();
        prop_assert!(m.slope() > BigRational::one());
        let below = t.factors(n - 1).unwrap();
        let mut hits = vec![0usize; below.len()];
        for p in m.pieces() {
            hits[p.target_index] += 1;
        }
        let mut total = 0;
        for (u, h) in below.iter().zip(hits) {
            let e = t.left_extensions(u).unwrap().len();
            prop_assert_eq!(h, e);
            total += e;
        }
        prop_assert_eq!(total, t.complexity(n).unwrap());
    }

    #[test]
    fn approximant_affine_on_cylinders(f in fixture(), depth in 2usize..20, extra in 0usize..60) {
        let t = table(f);
        let r = refine(t, depth).unwrap();
        let n = (r.max_cylinder_len().max(2) + extra).min(N_MAX);
        let m = PiecewiseAffineMap::build(t, n).unwrap();
        for b in m.block_affinity_check(t, &r).unwrap() {
            prop_assert!(b.passed, "cylinder {} at n={}", b.index, n);
        }
    }

    #[test]
    fn exact_evaluation_is_piecewise_translation(f in fixture(), n in 2usize..40, num in 0u32..10_000) {
        let t = table(f);
        let m = PiecewiseAffineMap::build(t, n).unwrap();
        let x = ratio(num as usize, 10_000);
        let y = m.evaluate(&x).unwrap();
        let (p_n, p_prev) = m.grid();
        let i = (&x * BigRational::from_integer(p_n.into())).floor().to_integer();
        let i: usize = i.try_into().unwrap();
        let piece = &m.pieces()[i];
        let expected = ratio(piece.target_index, p_prev) + (&x - ratio(i, p_n)) * m.slope();
        prop_assert_eq!(y, expected);
    }

    #[test]
    fn golden_rotation_codes_a_sturmian_word(start in 0u32..1000, len in 1usize..=15) {
        let iet = FiniteIet::golden();
        let part = CodingPartition::by_intervals(&iet);
        let x = QuadraticNumber::from_ints(start as i64, 1000, 0, 1);
        let y = iet.apply(&x).unwrap();
        let from_x = code_orbit(&iet, &part, &x, len + 1).unwrap();
        let from_y = code_orbit(&iet, &part, &y, len).unwrap();
        prop_assert_eq!(&from_x[1..], &from_y[..]);
    }
}

#[test]
fn coded_golden_rotation_has_complexity_n_plus_one() {
    let iet = FiniteIet::golden();
    let part = CodingPartition::by_intervals(&iet);
    let alpha = Alphabet::latin(2).unwrap();
    let t = coded_factor_table(&iet, &part, &alpha, 15, 8).unwrap();
    for n in 1..=15 {
        assert_eq!(t.complexity(n).unwrap(), n + 1, "n={n}");
    }
    let fib = table(Fixture::Fibonacci);
    for n in 1..=15 {
        let a: BTreeSet<&Word> = t.factors(n).unwrap().iter().collect();
        let b: BTreeSet<&Word> = fib.factors(n).unwrap().iter().collect();
        assert_eq!(a, b);
    }
}

#[test]
fn golden_rotation_preserves_order_inside_intervals() {
    let iet = FiniteIet::golden();
    let pts: Vec<QuadraticNumber> = (0..200)
        .map(|k| QuadraticNumber::from_ints(k, 200, 0, 1))
        .collect();
    let b = iet.breakpoints();
    for w in pts.windows(2) {
        let same = b.iter().filter(|c| **c <= w[0]).count() == b.iter().filter(|c| **c <= w[1]).count();
        if same {
            assert!(iet.apply(&w[0]).unwrap() < iet.apply(&w[1]).unwrap());
        }
    }
}

#[test]
fn approximants_are_nearly_isometries_at_level_100() {
    for f in Fixture::ALL {
        let t = table(f);
        let (a, b) = (t.complexity(99).unwrap(), t.complexity(100).unwrap());
        assert!(b * 100 < a * 105, "{f}: {b}/{a}");
    }
}

#[test]
fn perron_frequencies_are_a_distribution() {
    for f in Fixture::ALL {
        let fr = f.substitution().perron_frequencies().unwrap();
        assert!((fr.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(fr.iter().all(|&x| x > 0.0));
    }
}
