//! Evaluation metrics for a matching of an instance.

use num_rational::Ratio;
use serde::Serialize;

use crate::aupcr::{aupcr_from_counts, AupcrValue};
use crate::error::Result;
use crate::instance::{signature_of, Instance, Matching};
use crate::wmatch::{max_weight_matching, WeightedBipartiteGraph};

/// Best-response margin of `m` and a matching attaining it.
///
/// The margin is the largest `p(M″, m) − p(m, M″)` over all matchings `M″`,
/// where `p(X, Y)` counts applicants preferring `X` to `Y`. Since `M″ = m`
/// scores 0 the margin is never negative, and `m` is popular iff it is 0.
pub fn unpopularity_witness(inst: &Instance, m: &Matching) -> Result<(i64, Matching)> {
    let ranks = inst.ranks_under(m)?;
    // each applicant's vote is shifted by its "stay unmatched" vote so that all
    // weights are non-negative: w = vote(q) - vote(unmatched)
    let mut g: WeightedBipartiteGraph<i64> =
        WeightedBipartiteGraph::new(inst.n_applicants(), inst.n_posts());
    for (a, p, rank) in inst.edges() {
        let w = match ranks[a] {
            None => 1,
            Some(cur) if rank < cur => 2,
            Some(cur) if rank == cur => 1,
            Some(_) => 0,
        };
        g.add_edge(a, p, w)?;
    }
    let witness = max_weight_matching(&g, false)?;
    let shifted: i64 = witness
        .pairs()
        .iter()
        .map(|&(a, p)| *g.weight(a, p).expect("witness edge"))
        .sum();
    Ok((shifted - m.len() as i64, witness))
}

pub fn unpopularity_margin(inst: &Instance, m: &Matching) -> Result<i64> {
    Ok(unpopularity_witness(inst, m)?.0)
}

/// One evaluated matching.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub cardinality: u64,
    /// Best-response margin; `unpopularity` is this divided by `|A|`.
    pub margin: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub unpopularity: Ratio<u64>,
    pub rank1: u64,
    #[serde(serialize_with = "ser_aupcr")]
    pub aupcr: AupcrValue,
    pub rhpl: u64,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub avg_rank: Option<Ratio<u64>>,
    pub worst_rank: Option<u64>,
    pub wall_time_ms: f64,
    pub heuristic_flag: bool,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fixed6(*r.numer(), *r.denom()))
}

fn ser_opt_ratio<S: serde::Serializer>(r: &Option<Ratio<u64>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => ser_ratio(r, s),
        None => s.serialize_none(),
    }
}

fn ser_aupcr<S: serde::Serializer>(v: &AupcrValue, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fixed6(v.numerator, v.denominator))
}

/// Decimal rendering with six fractional digits, rounding half up.
pub fn fixed6(num: u64, den: u64) -> String {
    let scaled = (u128::from(num) * 2_000_000 + u128::from(den)) / (2 * u128::from(den));
    format!("{}.{:06}", scaled / 1_000_000, scaled % 1_000_000)
}

/// All metrics for `m`; `wall_time_ms` is the caller's measurement.
pub fn evaluate_all(inst: &Instance, m: &Matching, wall_time_ms: f64) -> Result<MetricsRecord> {
    let ranks = inst.ranks_under(m)?;
    let sig = signature_of(inst, m)?;
    let margin = unpopularity_margin(inst, m)?;
    let matched: Vec<(usize, usize)> = ranks
        .iter()
        .enumerate()
        .filter_map(|(a, r)| r.map(|r| (a, r)))
        .collect();
    let cardinality = matched.len() as u64;
    let rhpl = matched
        .iter()
        .filter(|&&(a, r)| r <= inst.prefs(a).len().div_ceil(2))
        .count() as u64;
    let rank_sum: u64 = matched.iter().map(|&(_, r)| r as u64).sum();
    Ok(MetricsRecord {
        cardinality,
        margin: margin as u64,
        unpopularity: Ratio::new(margin as u64, inst.n_applicants() as u64),
        rank1: sig.per_rank.first().copied().unwrap_or(0),
        aupcr: aupcr_from_counts(inst.n_applicants(), inst.n_posts(), &sig.per_rank),
        rhpl,
        avg_rank: (cardinality > 0).then(|| Ratio::new(rank_sum, cardinality)),
        worst_rank: matched.iter().map(|&(_, r)| r as u64).max(),
        wall_time_ms,
        heuristic_flag: false,
    })
}
