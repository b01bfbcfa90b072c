//! Browser bindings: an approximant plot, complexity rows and the cylinder
//! partition for the built-in substitutions.
//!
//! The `*_text` functions do the work and are tested natively; the exported
//! wrappers only convert errors.

use std::fmt::Write;

use shift2iet::export::approximant_svg;
use shift2iet::ietmap::{accumulation_clusters, DEFAULT_CLUSTER_MIN};
use shift2iet::measure::{measure_table, to_f64};
use shift2iet::{refine, FactorTable, Fixture, PiecewiseAffineMap, Word};
use wasm_bindgen::prelude::*;

/// Largest level the page may request; keeps a page interaction well under a second.
pub const MAX_LEVEL: usize = 200;

fn fixture(name: &str) -> Result<Fixture, String> {
    name.parse().map_err(|e: shift2iet::Error| e.to_string())
}

fn table(name: &str, n_max: usize) -> Result<FactorTable, String> {
    if n_max > MAX_LEVEL {
        return Err(format!("level {n_max} exceeds the demo limit {MAX_LEVEL}"));
    }
    FactorTable::build(&fixture(name)?.substitution(), n_max).map_err(|e| e.to_string())
}

/// SVG graph of `T_n`, with discontinuity clusters at scale `epsilon` marked.
pub fn approximant_svg_text(name: &str, n: usize, epsilon: f64) -> Result<String, String> {
    let t = table(name, n.max(2))?;
    let map = PiecewiseAffineMap::build(&t, n).map_err(|e| e.to_string())?;
    let clusters = accumulation_clusters(&map.discontinuities_f64(), epsilon, DEFAULT_CLUSTER_MIN)
        .map_err(|e| e.to_string())?;
    Ok(approximant_svg(&map, &format!("T_{n} for {name}"), &clusters))
}

/// Tab-separated `n, p(n), sp_left(n), sp_right(n), left special factors`
/// for `n <= n_max`; factor lists are given up to length 8.
pub fn complexity_text(name: &str, n_max: usize) -> Result<String, String> {
    let t = table(name, n_max + 1)?;
    let alpha = t.alphabet();
    let mut out = String::from("n\tp\tsp_left\tsp_right\tleft_special\n");
    for n in 1..=n_max {
        let ls = t.left_special(n).map_err(|e| e.to_string())?;
        let listed = if n <= 8 {
            ls.iter().map(|w| alpha.render(w)).collect::<Vec<_>>().join(" ")
        } else {
            String::new()
        };
        writeln!(
            out,
            "{n}\t{}\t{}\t{}\t{listed}",
            t.complexity(n).unwrap(),
            ls.len(),
            t.right_special_count(n).unwrap()
        )
        .unwrap();
    }
    Ok(out)
}

/// Tab-separated cylinder words `k, v, step, estimate` at level
/// `max(100, depth + 1)` capped by the demo limit.
pub fn partition_text(name: &str, depth: usize) -> Result<String, String> {
    let level = (depth + 1).clamp(100, MAX_LEVEL);
    let t = table(name, level)?;
    let part = refine(&t, depth).map_err(|e| e.to_string())?;
    let words: Vec<Word> = part.cylinders.iter().map(|c| c.word.clone()).collect();
    let m = measure_table(&t, &words, level).map_err(|e| e.to_string())?;
    let mut out = String::from("k\tv\tstep\testimate\n");
    for c in &part.cylinders {
        let e = m.estimate(&c.word).expect("requested");
        writeln!(
            out,
            "{}\t{}\t{}\t{:.6}",
            c.index,
            t.alphabet().render(&c.word),
            c.step,
            to_f64(e)
        )
        .unwrap();
    }
    let residual = part.residual_mass(&m).map_err(|e| e.to_string())?;
    writeln!(out, "residual\t-\t-\t{:.6}", to_f64(&residual)).unwrap();
    Ok(out)
}

#[wasm_bindgen(js_name = approximantSvg)]
pub fn approximant_svg_js(fixture: &str, n: usize, epsilon: f64) -> Result<String, JsError> {
    approximant_svg_text(fixture, n, epsilon).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = complexityTable)]
pub fn complexity_js(fixture: &str, n_max: usize) -> Result<String, JsError> {
    complexity_text(fixture, n_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = partitionTable)]
pub fn partition_js(fixture: &str, depth: usize) -> Result<String, JsError> {
    partition_text(fixture, depth).map_err(|e| JsError::new(&e))
}
