//! Subcommands. Each one builds its tables, writes its files in a fixed
//! order, and returns a text summary for stdout.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use shift2iet::checks::{run_suite, SuiteConfig};
use shift2iet::coding::{
    roundtrip_check_with, CodingPartition, FiniteIet, DEFAULT_APPROXIMANT_LEVEL, DEFAULT_ROUNDTRIP_THRESHOLD,
};
use shift2iet::export::{approximant_csv, approximant_svg};
use shift2iet::ietmap::{accumulation_clusters, convergence_report, Cluster, DEFAULT_CLUSTER_MIN};
use shift2iet::measure::{certify_convergence, measure_table, to_f64, DEFAULT_CONVERGENCE_THRESHOLD};
use shift2iet::{refine, FactorTable, Fixture, PiecewiseAffineMap, Word};

use crate::config::RunConfig;

/// Longest words listed in `measures.tsv`.
pub const MEASURE_WORD_LEN: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Partition,
    Measures,
    Approx,
    Plot,
    Verify,
    Roundtrip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    VerificationFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::VerificationFailed => 1,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{command}: {source}")]
    Core {
        command: &'static str,
        source: shift2iet::Error,
    },
    #[error("{command}: {message}")]
    Input { command: &'static str, message: String },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Partition => "partition",
            Command::Measures => "measures",
            Command::Approx => "approx",
            Command::Plot => "plot",
            Command::Verify => "verify",
            Command::Roundtrip => "roundtrip",
        }
    }
}

struct Emitter {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Emitter {
    fn new(dir: &PathBuf) -> Result<Self, RunError> {
        fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(Self {
            dir: dir.clone(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
        self.files.push(path);
        Ok(())
    }
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, RunError> {
    let name = cmd.name();
    let core = |source| RunError::Core {
        command: name,
        source,
    };
    if cmd == Command::Roundtrip {
        return roundtrip(cfg);
    }
    let table = FactorTable::build(&cfg.substitution, cfg.n_max).map_err(core)?;
    let mut out = Emitter::new(&cfg.out_dir)?;
    let mut summary = String::new();
    let mut status = Status::Ok;
    match cmd {
        Command::Analyze => {
            out.write("analyze.tsv", &analyze_tsv(&table))?;
            summary = analyze_summary(cfg, &table).map_err(core)?;
        }
        Command::Partition => {
            let (tsv, residual) = partition_tsv(cfg, &table).map_err(core)?;
            out.write("partition.tsv", &tsv)?;
            writeln!(summary, "residual mass at depth {}: {residual:.6}", cfg.depth_cap).unwrap();
        }
        Command::Measures => {
            out.write("measures.tsv", &measures_tsv(cfg, &table).map_err(core)?)?;
            let m = measure_table(&table, &[], cfg.n).map_err(core)?;
            for (a, f) in m.letter_frequencies.iter().enumerate() {
                let letter = table.alphabet().symbol(a as u8);
                writeln!(summary, "estimate({letter}) at n={}: {:.6}", cfg.n, to_f64(f)).unwrap();
            }
        }
        Command::Approx => {
            let map = PiecewiseAffineMap::build(&table, cfg.n).map_err(core)?;
            out.write(
                &format!("approx_{}.csv", cfg.n),
                &approximant_csv(&map, table.alphabet()),
            )?;
            summary = approx_summary(cfg, &table, &map).map_err(core)?;
        }
        Command::Plot => {
            let map = PiecewiseAffineMap::build(&table, cfg.n).map_err(core)?;
            let clusters = clusters(cfg, &map).map_err(core)?;
            let title = format!("T_{} for {}", cfg.n, cfg.label());
            out.write(
                &format!("approx_{}.svg", cfg.n),
                &approximant_svg(&map, &title, &clusters),
            )?;
            writeln!(
                summary,
                "{} segments, {} marked clusters",
                map.pieces().len(),
                clusters.len()
            )
            .unwrap();
        }
        Command::Verify => {
            let mut suite = SuiteConfig::new(cfg.n_max);
            suite.depth_cap = cfg.depth_cap;
            suite.measure_level = cfg.n;
            suite.roundtrip = cfg.fixture() == Some(Fixture::Fibonacci);
            let (results, artifacts) = rayon::join(
                || run_suite(&cfg.substitution, &suite),
                || -> shift2iet::Result<_> {
                    let map = PiecewiseAffineMap::build(&table, cfg.n)?;
                    Ok((
                        analyze_tsv(&table),
                        partition_tsv(cfg, &table)?.0,
                        measures_tsv(cfg, &table)?,
                        approximant_csv(&map, table.alphabet()),
                        approximant_svg(
                            &map,
                            &format!("T_{} for {}", cfg.n, cfg.label()),
                            &clusters(cfg, &map)?,
                        ),
                    ))
                },
            );
            let results = results.map_err(core)?;
            let (analyze, partition, measures, csv, svg) = artifacts.map_err(core)?;
            out.write("analyze.tsv", &analyze)?;
            out.write("partition.tsv", &partition)?;
            out.write("measures.tsv", &measures)?;
            out.write(&format!("approx_{}.csv", cfg.n), &csv)?;
            out.write(&format!("approx_{}.svg", cfg.n), &svg)?;
            let mut log = String::new();
            writeln!(log, "substitution\t{}", cfg.substitution).unwrap();
            writeln!(
                log,
                "n_max\t{}\tdepth_cap\t{}\tn\t{}",
                cfg.n_max, cfg.depth_cap, cfg.n
            )
            .unwrap();
            for r in &results {
                writeln!(log, "{r}").unwrap();
            }
            let failed = results.iter().filter(|r| !r.passed()).count();
            writeln!(log, "{} checks, {failed} failed", results.len()).unwrap();
            out.write("verify.log", &log)?;
            for r in results.iter().filter(|r| !r.passed()) {
                writeln!(summary, "{r}").unwrap();
            }
            writeln!(summary, "{} checks, {failed} failed", results.len()).unwrap();
            if failed > 0 {
                status = Status::VerificationFailed;
            }
        }
        Command::Roundtrip => unreachable!(),
    }
    Ok(Outcome {
        status,
        files: out.files,
        summary,
    })
}

fn roundtrip(cfg: &RunConfig) -> Result<Outcome, RunError> {
    if cfg.fixture() != Some(Fixture::Fibonacci) {
        return Err(RunError::Input {
            command: "roundtrip",
            message: format!(
                "no finite exchange is known for {}; only fibonacci is supported",
                cfg.label()
            ),
        });
    }
    let iet = FiniteIet::golden();
    let part = CodingPartition::by_intervals(&iet);
    let report = roundtrip_check_with(
        &cfg.substitution,
        &iet,
        &part,
        cfg.n_max,
        DEFAULT_APPROXIMANT_LEVEL,
        DEFAULT_ROUNDTRIP_THRESHOLD,
    )
    .map_err(|source| RunError::Core {
        command: "roundtrip",
        source,
    })?;
    let mut summary = String::new();
    writeln!(
        summary,
        "factor sets equal for n <= {}: {}",
        report.n_max, report.factor_sets_equal
    )
    .unwrap();
    if let Some((w, ours)) = &report.first_mismatch {
        let side = if *ours { "substitution" } else { "coded" };
        writeln!(
            summary,
            "first mismatch: {} (only in the {side} language)",
            cfg.substitution.alphabet().render(w)
        )
        .unwrap();
    }
    writeln!(
        summary,
        "sup |T_{} - golden| = {:.6} (threshold {}, {:.3} of the grid excluded)",
        report.approximant_level,
        report.approximation.sup_diff,
        report.threshold,
        report.approximation.excluded_mass
    )
    .unwrap();
    writeln!(summary, "{}", if report.passed() { "PASS" } else { "FAIL" }).unwrap();
    Ok(Outcome {
        status: if report.passed() {
            Status::Ok
        } else {
            Status::VerificationFailed
        },
        files: Vec::new(),
        summary,
    })
}

fn clusters(cfg: &RunConfig, map: &PiecewiseAffineMap) -> shift2iet::Result<Vec<Cluster>> {
    accumulation_clusters(&map.discontinuities_f64(), cfg.epsilon, DEFAULT_CLUSTER_MIN)
}

/// One row per length: complexity, its increment, special factor counts and
/// the slope of `T_n`.
pub fn analyze_tsv(table: &FactorTable) -> String {
    let n_max = table.n_max();
    let margin = table.default_margin();
    let rows: Vec<String> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let p = table.complexity(n).unwrap();
            let (delta, slope) = match n {
                1 => ("-".to_string(), "-".to_string()),
                _ => {
                    let prev = table.complexity(n - 1).unwrap();
                    (
                        (p as i64 - prev as i64).to_string(),
                        format!("{:.6}", p as f64 / prev as f64),
                    )
                }
            };
            let special = |count: shift2iet::Result<usize>| count.map_or("-".to_string(), |c| c.to_string());
            let persistent = table
                .persistent_left_special(n, margin)
                .map_or("-".to_string(), |w| w.len().to_string());
            format!(
                "{n}\t{p}\t{delta}\t{}\t{}\t{persistent}\t{slope}\n",
                special(table.left_special_count(n)),
                special(table.right_special_count(n)),
            )
        })
        .collect();
    let mut out = String::from("n\tp\tdelta\tsp_left\tsp_right\tpersistent_left\tslope\n");
    out.extend(rows);
    out
}

fn analyze_summary(cfg: &RunConfig, table: &FactorTable) -> shift2iet::Result<String> {
    let sub = &cfg.substitution;
    let mut s = String::new();
    writeln!(s, "substitution: {sub}").unwrap();
    let prim = sub.is_primitive();
    match prim.witness_power {
        Some(k) => writeln!(s, "primitive: yes (M^{k} > 0)").unwrap(),
        None => writeln!(s, "primitive: no").unwrap(),
    }
    if let Some(seed) = sub.prolongable_seed() {
        let prefix = sub.power(seed.power).fixed_point_prefix(seed.letter, 40)?;
        writeln!(
            s,
            "fixed point of θ^{} from {}: {}...",
            seed.power,
            sub.alphabet().symbol(seed.letter),
            sub.alphabet().render(&prefix)
        )
        .unwrap();
    }
    let freqs = sub.perron_frequencies()?;
    let rendered: Vec<String> = sub
        .alphabet()
        .letters()
        .iter()
        .zip(&freqs)
        .map(|(c, f)| format!("{c}={f:.6}"))
        .collect();
    writeln!(s, "letter frequencies: {}", rendered.join(" ")).unwrap();
    writeln!(s, "p({}) = {}", cfg.n_max, table.complexity(cfg.n_max)?).unwrap();
    Ok(s)
}

/// Cylinder words with their estimated measures, then the unresolved words.
/// Returns the residual mass as well.
pub fn partition_tsv(cfg: &RunConfig, table: &FactorTable) -> shift2iet::Result<(String, f64)> {
    let part = refine(table, cfg.depth_cap)?;
    let level = cfg.n.max(cfg.depth_cap);
    let words: Vec<Word> = part
        .cylinders
        .iter()
        .map(|c| c.word.clone())
        .chain(part.unresolved.clone())
        .collect();
    let m = measure_table(table, &words, level)?;
    let alpha = table.alphabet();
    let mut out = String::from("kind\tk\tv\tstep\tlevel\testimate\testimate_f64\n");
    for c in &part.cylinders {
        let e = &m.entry(&c.word).expect("requested").estimate;
        writeln!(
            out,
            "cylinder\t{}\t{}\t{}\t{level}\t{e}\t{:.12}",
            c.index,
            alpha.render(&c.word),
            c.step,
            to_f64(e)
        )
        .unwrap();
    }
    for u in &part.unresolved {
        let e = &m.entry(u).expect("requested").estimate;
        writeln!(
            out,
            "unresolved\t-\t{}\t-\t{level}\t{e}\t{:.12}",
            alpha.render(u),
            to_f64(e)
        )
        .unwrap();
    }
    let residual = to_f64(&part.residual_mass(&m)?);
    Ok((out, residual))
}

/// Every factor of length at most [`MEASURE_WORD_LEN`]: count, estimate,
/// invariance defect and the comparison with level `n / 2`.
pub fn measures_tsv(cfg: &RunConfig, table: &FactorTable) -> shift2iet::Result<String> {
    let n = cfg.n;
    let words: Vec<Word> = (1..=MEASURE_WORD_LEN.min(n - 1))
        .map(|len| table.factors(len).map(<[Word]>::to_vec))
        .collect::<shift2iet::Result<Vec<_>>>()?
        .concat();
    let m = measure_table(table, &words, n)?;
    let p_prev = table.complexity(n - 1)?;
    let alpha = table.alphabet();
    let rows = words
        .par_iter()
        .map(|u| -> shift2iet::Result<String> {
            let e = m.entry(u).expect("requested");
            let cert = certify_convergence(table, u, n, DEFAULT_CONVERGENCE_THRESHOLD)?;
            let defect = e.defect.expect("|u| < n");
            Ok(format!(
                "{}\t{}\t{}\t{}\t{:.12}\t{defect}\t{:.12}\t{:.12}\t{}\n",
                alpha.render(u),
                u.len(),
                e.count,
                e.estimate,
                to_f64(&e.estimate),
                defect as f64 / p_prev as f64,
                cert.difference,
                if cert.certified { "yes" } else { "no" }
            ))
        })
        .collect::<shift2iet::Result<Vec<_>>>()?;
    let mut out = String::from(
        "u\tlen\tcount\testimate\testimate_f64\tdefect\tnormalized_defect\tdiff_half\tcertified\n",
    );
    out.extend(rows);
    Ok(out)
}

fn approx_summary(
    cfg: &RunConfig,
    table: &FactorTable,
    map: &PiecewiseAffineMap,
) -> shift2iet::Result<String> {
    let (p_n, p_prev) = map.grid();
    let jumps = map.discontinuities_f64();
    let mut s = String::new();
    writeln!(
        s,
        "T_{}: {p_n} pieces, slope {p_n}/{p_prev} = {:.6}",
        cfg.n,
        p_n as f64 / p_prev as f64
    )
    .unwrap();
    writeln!(s, "{} discontinuities", jumps.len()).unwrap();
    for c in clusters(cfg, map)? {
        writeln!(
            s,
            "cluster of {} near {:.4} in [{:.4}, {:.4}]",
            c.size, c.center, c.low, c.high
        )
        .unwrap();
    }
    if cfg.n >= 4 {
        let r = convergence_report(table, cfg.n / 2, cfg.n, cfg.grid)?;
        writeln!(
            s,
            "sup |T_{} - T_{}| = {:.6} off {:.3} of the grid",
            cfg.n / 2,
            cfg.n,
            r.sup_diff,
            r.excluded_mass
        )
        .unwrap();
    }
    Ok(s)
}
