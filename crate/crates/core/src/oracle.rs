//! Exhaustive ground truth for small instances.
//!
//! Everything here works by enumerating all matchings and never calls the
//! weighted matching solver, so it can be used to check it.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::aupcr::{aupcr_from_counts, AupcrValue};
use crate::error::{Error, Result};
use crate::instance::{compare_fair, compare_rank_maximal, Instance, Matching, Signature};

pub const DEFAULT_CAP: usize = 8;

/// Rank used for an unmatched applicant when comparing profiles.
const UNMATCHED: u32 = u32::MAX;

fn check_cap(inst: &Instance, cap: usize) -> Result<()> {
    if inst.n_applicants() > cap {
        return Err(Error::InstanceTooLarge {
            n: inst.n_applicants(),
            cap,
        });
    }
    Ok(())
}

/// Calls `f` with every matching as a per-applicant assignment, in a fixed
/// order (applicant 1 unmatched first, then its choices by rank). Stops early
/// when `f` breaks.
pub fn for_each_assignment<F>(inst: &Instance, cap: usize, mut f: F) -> Result<()>
where
    F: FnMut(&[Option<usize>]) -> ControlFlow<()>,
{
    check_cap(inst, cap)?;
    let mut assign = vec![None; inst.n_applicants()];
    let mut used = vec![false; inst.n_posts()];
    let _ = walk(inst, 0, &mut assign, &mut used, &mut f);
    Ok(())
}

fn walk<F>(
    inst: &Instance,
    a: usize,
    assign: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[Option<usize>]) -> ControlFlow<()>,
{
    if a == inst.n_applicants() {
        return f(assign);
    }
    assign[a] = None;
    walk(inst, a + 1, assign, used, f)?;
    for &p in inst.prefs(a) {
        if !used[p] {
            used[p] = true;
            assign[a] = Some(p);
            let flow = walk(inst, a + 1, assign, used, f);
            used[p] = false;
            assign[a] = None;
            flow?;
        }
    }
    ControlFlow::Continue(())
}

/// Every matching of `inst`, including the empty one, each exactly once.
pub fn enumerate_matchings(
    inst: &Instance,
    max_applicants: usize,
) -> Result<impl Iterator<Item = Matching>> {
    let mut out = Vec::new();
    for_each_assignment(inst, max_applicants, |asg| {
        out.push(Matching::from_assignment(asg));
        ControlFlow::Continue(())
    })?;
    Ok(out.into_iter())
}

fn profile(inst: &Instance, asg: &[Option<usize>]) -> Vec<u32> {
    asg.iter()
        .enumerate()
        .map(|(a, p)| match p {
            Some(p) => inst.rank_of(a, *p).expect("edge") as u32,
            None => UNMATCHED,
        })
        .collect()
}

fn vote(new: u32, old: u32) -> i64 {
    match new.cmp(&old) {
        Ordering::Less => 1,
        Ordering::Equal => 0,
        Ordering::Greater => -1,
    }
}

/// Largest `p(M″, m) − p(m, M″)` over all matchings `M″`, by a memoized
/// search over applicants and the set of posts already taken.
pub fn brute_force_margin(inst: &Instance, m: &Matching) -> Result<i64> {
    inst.validate_matching(m)?;
    let cur = profile(inst, &m.assignment(inst.n_applicants()));
    Ok(MarginSearch::new(inst).margin(&cur))
}

struct MarginSearch<'a> {
    inst: &'a Instance,
    /// compressed index of each post that appears on some list
    post_bit: Vec<Option<usize>>,
    bits: usize,
}

impl<'a> MarginSearch<'a> {
    fn new(inst: &'a Instance) -> Self {
        let mut post_bit = vec![None; inst.n_posts()];
        let mut bits = 0;
        for (_, p, _) in inst.edges() {
            if post_bit[p].is_none() {
                post_bit[p] = Some(bits);
                bits += 1;
            }
        }
        MarginSearch {
            inst,
            post_bit,
            bits,
        }
    }

    fn margin(&self, cur: &[u32]) -> i64 {
        if self.bits <= 10 {
            let width = 1usize << self.bits;
            let mut memo = vec![i64::MIN; (cur.len() + 1) * width];
            self.best_dense(0, 0, cur, &mut memo, width)
        } else {
            let mut memo = HashMap::new();
            self.best_sparse(0, &mut Vec::new(), cur, &mut memo)
        }
    }

    fn best_dense(&self, a: usize, mask: u128, cur: &[u32], memo: &mut [i64], width: usize) -> i64 {
        if a == cur.len() {
            return 0;
        }
        let slot = a * width + mask as usize;
        if memo[slot] != i64::MIN {
            return memo[slot];
        }
        let mut best = vote(UNMATCHED, cur[a]) + self.best_dense(a + 1, mask, cur, memo, width);
        for (i, &p) in self.inst.prefs(a).iter().enumerate() {
            let bit = 1u128 << self.post_bit[p].expect("listed post");
            if mask & bit == 0 {
                let v = vote(i as u32 + 1, cur[a])
                    + self.best_dense(a + 1, mask | bit, cur, memo, width);
                best = best.max(v);
            }
        }
        memo[slot] = best;
        best
    }

    fn best_sparse(
        &self,
        a: usize,
        used: &mut Vec<usize>,
        cur: &[u32],
        memo: &mut HashMap<(usize, Vec<usize>), i64>,
    ) -> i64 {
        if a == cur.len() {
            return 0;
        }
        let mut key = used.clone();
        key.sort_unstable();
        let key = (a, key);
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let mut best = vote(UNMATCHED, cur[a]) + self.best_sparse(a + 1, used, cur, memo);
        for (i, &p) in self.inst.prefs(a).iter().enumerate() {
            if !used.contains(&p) {
                used.push(p);
                let v = vote(i as u32 + 1, cur[a]) + self.best_sparse(a + 1, used, cur, memo);
                used.pop();
                best = best.max(v);
            }
        }
        memo.insert(key, best);
        best
    }
}

/// Exhaustive optima of every objective the solvers claim to optimize.
#[derive(Debug, Clone)]
pub struct OracleOptima {
    pub max_aupcr: AupcrValue,
    /// Largest cardinality among matchings of maximum AUPCR.
    pub mcamm_card: usize,
    /// Smallest cardinality among matchings of maximum AUPCR.
    pub min_amm_card: usize,
    pub rank_maximal_signature: Signature,
    /// Fairness-best signature among maximum-cardinality matchings.
    pub fair_signature: Signature,
    pub max_cardinality: usize,
    pub min_margin: i64,
    pub popular_exists: bool,
    pub matching_count: usize,
    /// Distinct AUPC numerators over all matchings, ascending.
    pub aupc_values: Vec<u64>,
    profiles: Vec<Vec<u32>>,
}

impl OracleOptima {
    /// True iff no matching leaves every applicant at least as well off and
    /// one strictly better off.
    pub fn is_pareto_optimal(&self, inst: &Instance, m: &Matching) -> bool {
        let mine = profile(inst, &m.assignment(inst.n_applicants()));
        !self.profiles.iter().any(|q| {
            q.iter().zip(&mine).all(|(x, y)| x <= y) && q.iter().zip(&mine).any(|(x, y)| x < y)
        })
    }
}

fn signature_from_profile(p: &[u32], max_rank: usize) -> Signature {
    let mut per_rank = vec![0u64; max_rank];
    let mut unmatched = 0;
    for &r in p {
        if r == UNMATCHED {
            unmatched += 1;
        } else {
            per_rank[r as usize - 1] += 1;
        }
    }
    Signature {
        per_rank,
        unmatched,
    }
}

pub fn oracle_optima(inst: &Instance) -> Result<OracleOptima> {
    oracle_optima_capped(inst, DEFAULT_CAP)
}

pub fn oracle_optima_capped(inst: &Instance, cap: usize) -> Result<OracleOptima> {
    let mut profiles = Vec::new();
    for_each_assignment(inst, cap, |asg| {
        profiles.push(profile(inst, asg));
        ControlFlow::Continue(())
    })?;

    let r = inst.max_rank();
    let na = inst.n_applicants();
    let np = inst.n_posts();
    let sigs: Vec<Signature> = profiles
        .iter()
        .map(|p| signature_from_profile(p, r))
        .collect();
    let cards: Vec<usize> = sigs.iter().map(|s| s.cardinality() as usize).collect();
    let aupcs: Vec<u64> = sigs
        .iter()
        .map(|s| aupcr_from_counts(na, np, &s.per_rank).numerator)
        .collect();

    let max_aupc = *aupcs.iter().max().expect("empty matching always exists");
    let amm_cards = || {
        (0..sigs.len())
            .filter(|&i| aupcs[i] == max_aupc)
            .map(|i| cards[i])
    };
    let mcamm_card = amm_cards().max().unwrap_or(0);
    let min_amm_card = amm_cards().min().unwrap_or(0);
    let max_cardinality = *cards.iter().max().unwrap_or(&0);
    let rank_maximal_signature = sigs
        .iter()
        .max_by(|x, y| compare_rank_maximal(x, y))
        .cloned()
        .expect("non-empty");
    let fair_signature = sigs
        .iter()
        .zip(&cards)
        .filter(|(_, &c)| c == max_cardinality)
        .map(|(s, _)| s)
        .max_by(|x, y| compare_fair(x, y))
        .cloned()
        .expect("non-empty");

    // margins are never negative, so the scan can stop at the first popular matching
    let search = MarginSearch::new(inst);
    let mut min_margin = i64::MAX;
    for p in &profiles {
        min_margin = min_margin.min(search.margin(p));
        if min_margin == 0 {
            break;
        }
    }
    let mut aupc_values = aupcs.clone();
    aupc_values.sort_unstable();
    aupc_values.dedup();

    Ok(OracleOptima {
        max_aupcr: AupcrValue {
            numerator: max_aupc,
            denominator: (na * np) as u64,
        },
        mcamm_card,
        min_amm_card,
        rank_maximal_signature,
        fair_signature,
        max_cardinality,
        min_margin,
        popular_exists: min_margin == 0,
        matching_count: profiles.len(),
        aupc_values,
        profiles,
    })
}
