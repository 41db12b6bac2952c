use std::fmt;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aupcr::{solve_amm, solve_mcamm};
use crate::classic::{max_cardinality_matching, solve_fm, solve_pom, solve_popular, solve_rmm};
use crate::error::{Error, Result};
use crate::gen::{cell_seed, generate, Density, GenSpec, Model};
use crate::instance::{Instance, Matching};
use crate::metrics::{evaluate_all, fixed6, MetricsRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "POM")]
    Pom,
    #[serde(rename = "RMM")]
    Rmm,
    #[serde(rename = "POPM")]
    Popm,
    #[serde(rename = "FM")]
    Fm,
    #[serde(rename = "AMM")]
    Amm,
    #[serde(rename = "MCAMM")]
    Mcamm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Pom,
        Algorithm::Rmm,
        Algorithm::Popm,
        Algorithm::Fm,
        Algorithm::Amm,
        Algorithm::Mcamm,
    ];

    /// The five matchers compared in the rank tables.
    pub const TABLE: [Algorithm; 5] = [
        Algorithm::Pom,
        Algorithm::Rmm,
        Algorithm::Popm,
        Algorithm::Fm,
        Algorithm::Amm,
    ];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Pom => "POM",
            Algorithm::Rmm => "RMM",
            Algorithm::Popm => "POPM",
            Algorithm::Fm => "FM",
            Algorithm::Amm => "AMM",
            Algorithm::Mcamm => "MCAMM",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm `{s}`")))
    }
}

/// Runs one matcher. The flag is set when the result is a non-exact
/// least-unpopular fallback.
pub fn solve_with(algo: Algorithm, inst: &Instance) -> Result<(Matching, bool)> {
    Ok(match algo {
        Algorithm::Pom => (solve_pom(inst)?, false),
        Algorithm::Rmm => (solve_rmm(inst)?, false),
        Algorithm::Fm => (solve_fm(inst)?, false),
        Algorithm::Amm => (solve_amm(inst)?, false),
        Algorithm::Mcamm => (solve_mcamm(inst)?, false),
        Algorithm::Popm => {
            let r = solve_popular(inst)?;
            (r.matching, r.heuristic)
        }
    })
}

#[derive(Debug, Clone)]
pub struct GridConfig {
    pub models: Vec<Model>,
    pub sizes: Vec<usize>,
    pub densities: Vec<Density>,
    pub replicates: usize,
    pub algorithms: Vec<Algorithm>,
    pub master_seed: u64,
    /// Worker threads; `None` uses every core.
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
    /// Where to write instances on which AMM is not a maximum matching.
    pub counterexample_dir: Option<PathBuf>,
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Error::InvalidConfig(format!("no {what} given"));
        if self.models.is_empty() {
            return Err(empty("models"));
        }
        if self.sizes.is_empty() {
            return Err(empty("sizes"));
        }
        if self.densities.is_empty() {
            return Err(empty("densities"));
        }
        if self.algorithms.is_empty() {
            return Err(empty("algorithms"));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        if self.sizes.contains(&0) {
            return Err(Error::InvalidConfig("sizes must be positive".into()));
        }
        Ok(())
    }

    pub fn row_count(&self) -> usize {
        self.models.len()
            * self.sizes.len()
            * self.densities.len()
            * self.replicates
            * self.algorithms.len()
    }
}

/// One CSV row; column order is the file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub model: Model,
    pub n: usize,
    pub d: String,
    pub replicate: usize,
    pub algorithm: Algorithm,
    pub cardinality: u64,
    pub unpopularity: String,
    pub rank1: u64,
    pub aupcr: String,
    pub rhpl: u64,
    pub avg_rank: Option<String>,
    pub worst_rank: Option<u64>,
    pub wall_time_ms: String,
    pub heuristic_flag: bool,
}

impl CsvRow {
    fn from_record(
        model: Model,
        n: usize,
        d: Density,
        replicate: usize,
        algorithm: Algorithm,
        rec: &MetricsRecord,
    ) -> Self {
        CsvRow {
            model,
            n,
            d: d.to_string(),
            replicate,
            algorithm,
            cardinality: rec.cardinality,
            unpopularity: fixed6(*rec.unpopularity.numer(), *rec.unpopularity.denom()),
            rank1: rec.rank1,
            aupcr: fixed6(rec.aupcr.numerator, rec.aupcr.denominator),
            rhpl: rec.rhpl,
            avg_rank: rec.avg_rank.map(|r| fixed6(*r.numer(), *r.denom())),
            worst_rank: rec.worst_rank,
            wall_time_ms: format!("{:.3}", rec.wall_time_ms),
            heuristic_flag: rec.heuristic_flag,
        }
    }

    pub fn cell_key(&self) -> (Model, usize, String, usize) {
        (self.model, self.n, self.d.clone(), self.replicate)
    }
}

#[derive(Debug, Clone, Default)]
pub struct GridReport {
    pub rows: Vec<CsvRow>,
    /// Cells where AMM returned fewer pairs than a maximum matching.
    pub amm_below_max: Vec<String>,
}

struct Cell {
    model: Model,
    n: usize,
    density: Density,
    replicate: usize,
}

impl Cell {
    fn label(&self) -> String {
        format!(
            "{}/n={}/d={}/rep={}",
            self.model, self.n, self.density, self.replicate
        )
    }
}

fn run_cell(cfg: &GridConfig, cell: &Cell) -> Result<(Vec<CsvRow>, Option<String>)> {
    let inst = generate(&GenSpec {
        model: cell.model,
        n_applicants: cell.n,
        n_posts: cell.n,
        density: cell.density,
        seed: cell_seed(
            cfg.master_seed,
            cell.model,
            cell.n,
            cell.density,
            cell.replicate,
        ),
    })?;
    let mut rows = Vec::with_capacity(cfg.algorithms.len());
    let mut short = None;
    for &algo in &cfg.algorithms {
        let start = Instant::now();
        let (m, heuristic) = solve_with(algo, &inst)?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let mut rec = evaluate_all(&inst, &m, elapsed)?;
        rec.heuristic_flag = heuristic;
        if algo == Algorithm::Amm {
            let max_card = max_cardinality_matching(&inst).iter().flatten().count();
            if m.len() < max_card {
                short = Some(cell.label());
                if let Some(dir) = &cfg.counterexample_dir {
                    std::fs::create_dir_all(dir)?;
                    let name = format!(
                        "amm_below_max_{}_{}_{}_{}.txt",
                        cell.model, cell.n, cell.density, cell.replicate
                    );
                    std::fs::write(dir.join(name), inst.to_text())?;
                }
            }
        }
        rows.push(CsvRow::from_record(
            cell.model,
            cell.n,
            cell.density,
            cell.replicate,
            algo,
            &rec,
        ));
    }
    Ok((rows, short))
}

/// Runs every (model, n, d, replicate) cell, one row per algorithm, with
/// applicants = posts = n. Rows come back in canonical order regardless of
/// scheduling, and are written to `cfg.output` when set.
pub fn run_grid(cfg: &GridConfig) -> Result<GridReport> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for &model in &cfg.models {
        for &n in &cfg.sizes {
            for &density in &cfg.densities {
                for replicate in 0..cfg.replicates {
                    cells.push(Cell {
                        model,
                        n,
                        density,
                        replicate,
                    });
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let results: Vec<Result<(Vec<CsvRow>, Option<String>)>> = pool.install(|| {
        cells
            .par_iter()
            .map(|c| {
                run_cell(cfg, c).map_err(|e| Error::Cell {
                    cell: c.label(),
                    source: Box::new(e),
                })
            })
            .collect()
    });

    let mut report = GridReport::default();
    for r in results {
        let (rows, short) = r?;
        report.rows.extend(rows);
        report.amm_below_max.extend(short);
    }
    report.rows.sort_by(|a, b| {
        (a.model, a.n, density_key(&a.d), a.replicate, a.algorithm).cmp(&(
            b.model,
            b.n,
            density_key(&b.d),
            b.replicate,
            b.algorithm,
        ))
    });
    if let Some(path) = &cfg.output {
        let file = std::fs::File::create(path)?;
        write_rows(std::io::BufWriter::new(file), &report.rows)?;
    }
    Ok(report)
}

fn density_key(d: &str) -> u32 {
    d.parse::<Density>()
        .map(Density::millionths)
        .unwrap_or(u32::MAX)
}

pub fn write_rows<W: Write>(w: W, rows: &[CsvRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(r: R) -> Result<Vec<CsvRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Parses `a..b:step`, a comma list, or a single value.
pub fn parse_size_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidConfig(format!("invalid size range `{s}`"));
    if let Some((range, step)) = s.split_once(':') {
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        let step: usize = step.trim().parse().map_err(|_| bad())?;
        if step == 0 || lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| bad()))
        .collect()
}

/// Density version of [`parse_size_range`], computed in exact millionths.
pub fn parse_density_range(s: &str) -> Result<Vec<Density>> {
    let bad = || Error::InvalidConfig(format!("invalid density range `{s}`"));
    if let Some((range, step)) = s.split_once(':') {
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo: Density = lo.parse()?;
        let hi: Density = hi.parse()?;
        let step: Density = step.parse()?;
        if step.millionths() == 0 || lo > hi {
            return Err(bad());
        }
        return (lo.millionths()..=hi.millionths())
            .step_by(step.millionths() as usize)
            .map(Density::from_millionths)
            .collect();
    }
    s.split(',').map(str::parse).collect()
}
