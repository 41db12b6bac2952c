use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::gen::{Density, Model};

use super::grid::{Algorithm, CsvRow};

/// The seven table metrics, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Cardinality,
    Unpopularity,
    Rank1,
    Aupcr,
    Rhpl,
    AvgRank,
    WorstRank,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Cardinality,
        Metric::Unpopularity,
        Metric::Rank1,
        Metric::Aupcr,
        Metric::Rhpl,
        Metric::AvgRank,
        Metric::WorstRank,
    ];

    fn higher_is_better(self) -> bool {
        matches!(
            self,
            Metric::Cardinality | Metric::Rank1 | Metric::Aupcr | Metric::Rhpl
        )
    }

    /// Value in millionths; `None` (absent average/worst rank) ranks last.
    fn value(self, row: &CsvRow) -> Result<Option<i64>> {
        let int = |v: u64| Some(v as i64 * 1_000_000);
        Ok(match self {
            Metric::Cardinality => int(row.cardinality),
            Metric::Rank1 => int(row.rank1),
            Metric::Rhpl => int(row.rhpl),
            Metric::WorstRank => row.worst_rank.and_then(int),
            Metric::Unpopularity => Some(micros(&row.unpopularity)?),
            Metric::Aupcr => Some(micros(&row.aupcr)?),
            Metric::AvgRank => row.avg_rank.as_deref().map(micros).transpose()?,
        })
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Cardinality => "card",
            Metric::Unpopularity => "unpop",
            Metric::Rank1 => "rank1",
            Metric::Aupcr => "aupcr",
            Metric::Rhpl => "rhpl",
            Metric::AvgRank => "avg_rank",
            Metric::WorstRank => "worst_rank",
        })
    }
}

/// Parses a non-negative decimal with at most six fractional digits exactly.
fn micros(s: &str) -> Result<i64> {
    let bad = || Error::InvalidConfig(format!("bad number `{s}`"));
    let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 6 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let whole: i64 = whole.parse().map_err(|_| bad())?;
    let frac: i64 = if frac.is_empty() {
        0
    } else {
        format!("{frac:0<6}").parse().map_err(|_| bad())?
    };
    if whole < 0 {
        return Err(bad());
    }
    Ok(whole * 1_000_000 + frac)
}

/// Dense ranks of `values` (best = 1); ties share a rank.
pub fn dense_ranks(values: &[Option<i64>], higher_is_better: bool) -> Vec<usize> {
    let key = |v: &Option<i64>| match v {
        // absent values sort after every present one
        None => (1, 0),
        Some(x) => (0, if higher_is_better { -x } else { *x }),
    };
    let mut distinct: Vec<(i32, i64)> = values.iter().map(key).collect();
    distinct.sort_unstable();
    distinct.dedup();
    values
        .iter()
        .map(|v| distinct.binary_search(&key(v)).expect("present") + 1)
        .collect()
}

/// Mean dense rank per (metric, algorithm) for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub model: Model,
    pub algorithms: Vec<Algorithm>,
    /// `mean[metric][algorithm]`, indexed like [`Metric::ALL`] and `algorithms`.
    pub mean: Vec<Vec<f64>>,
    /// Column average of `mean` per algorithm.
    pub rank_mean: Vec<f64>,
}

impl RankTable {
    pub fn get(&self, metric: Metric, algo: Algorithm) -> Option<f64> {
        let m = Metric::ALL.iter().position(|&x| x == metric)?;
        let a = self.algorithms.iter().position(|&x| x == algo)?;
        Some(self.mean[m][a])
    }

    pub fn rank_mean_of(&self, algo: Algorithm) -> Option<f64> {
        let a = self.algorithms.iter().position(|&x| x == algo)?;
        Some(self.rank_mean[a])
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Ranks `algorithms` on every cell and metric, then averages the ranks over
/// replicates, then densities, then sizes. One table per model present.
pub fn rank_means(rows: &[CsvRow], algorithms: &[Algorithm]) -> Result<Vec<RankTable>> {
    if algorithms.is_empty() {
        return Err(Error::InvalidConfig("no algorithms to rank".into()));
    }
    // model -> n -> d -> replicate -> algorithm -> row
    type Cells<'a> = BTreeMap<
        Model,
        BTreeMap<usize, BTreeMap<u32, BTreeMap<usize, BTreeMap<Algorithm, &'a CsvRow>>>>,
    >;
    let mut cells: Cells = BTreeMap::new();
    for row in rows {
        let d: Density = row.d.parse()?;
        cells
            .entry(row.model)
            .or_default()
            .entry(row.n)
            .or_default()
            .entry(d.millionths())
            .or_default()
            .entry(row.replicate)
            .or_default()
            .insert(row.algorithm, row);
    }

    let mut tables = Vec::new();
    for (model, by_n) in &cells {
        // ranks[metric][algo] at each aggregation level
        let mut per_n = Vec::new();
        for (n, by_d) in by_n {
            let mut per_d = Vec::new();
            for (d, by_rep) in by_d {
                let mut per_rep = Vec::new();
                for (rep, by_algo) in by_rep {
                    let picked: Vec<&CsvRow> = algorithms
                        .iter()
                        .map(|a| {
                            by_algo.get(a).copied().ok_or_else(|| {
                                Error::InvalidConfig(format!(
                                    "cell {model}/n={n}/d={}/rep={rep} has no {a} row",
                                    Density::from_millionths(*d)
                                        .map(|d| d.to_string())
                                        .unwrap_or_default()
                                ))
                            })
                        })
                        .collect::<Result<_>>()?;
                    let mut ranks = Vec::with_capacity(Metric::ALL.len());
                    for metric in Metric::ALL {
                        let values = picked
                            .iter()
                            .map(|r| metric.value(r))
                            .collect::<Result<Vec<_>>>()?;
                        let r = dense_ranks(&values, metric.higher_is_better());
                        ranks.push(r.into_iter().map(|x| x as f64).collect::<Vec<_>>());
                    }
                    per_rep.push(ranks);
                }
                per_d.push(average(&per_rep));
            }
            per_n.push(average(&per_d));
        }
        let mean_table = average(&per_n);
        let rank_mean = (0..algorithms.len())
            .map(|a| mean(mean_table.iter().map(|row| row[a])))
            .collect();
        tables.push(RankTable {
            model: *model,
            algorithms: algorithms.to_vec(),
            mean: mean_table,
            rank_mean,
        });
    }
    Ok(tables)
}

fn average(tables: &[Vec<Vec<f64>>]) -> Vec<Vec<f64>> {
    let rows = tables[0].len();
    let cols = tables[0][0].len();
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| mean(tables.iter().map(|t| t[i][j])))
                .collect()
        })
        .collect()
}

/// Writes `model,metric,<algorithms...>` rows, ending each model with `rank_mean`.
pub fn write_rank_tables<W: Write>(w: W, tables: &[RankTable]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    if let Some(first) = tables.first() {
        let mut header = vec!["model".to_string(), "metric".to_string()];
        header.extend(first.algorithms.iter().map(Algorithm::to_string));
        wtr.write_record(&header)?;
    }
    for t in tables {
        for (metric, row) in Metric::ALL.iter().zip(&t.mean) {
            let mut rec = vec![t.model.to_string(), metric.to_string()];
            rec.extend(row.iter().map(|x| format!("{x:.4}")));
            wtr.write_record(&rec)?;
        }
        let mut rec = vec![t.model.to_string(), "rank_mean".to_string()];
        rec.extend(t.rank_mean.iter().map(|x| format!("{x:.4}")));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_ranking() {
        let card = [Some(10), Some(10), Some(10), Some(9), Some(8)];
        assert_eq!(dense_ranks(&card, true), vec![1, 1, 1, 2, 3]);
        assert_eq!(dense_ranks(&card, false), vec![3, 3, 3, 2, 1]);
        assert_eq!(dense_ranks(&[Some(1), None, Some(3)], false), vec![1, 3, 2]);
        assert_eq!(dense_ranks(&[Some(4), Some(4)], true), vec![1, 1]);
    }

    #[test]
    fn exact_decimals() {
        assert_eq!(micros("0.770833").unwrap(), 770_833);
        assert_eq!(micros("2.142857").unwrap(), 2_142_857);
        assert_eq!(micros("1").unwrap(), 1_000_000);
        assert!(micros("x").is_err());
    }
}
