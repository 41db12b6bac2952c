//! The benchmark matchers: maximum-cardinality Pareto optimal, rank-maximal,
//! fair, and popular (with a least-unpopular fallback).

use std::ops::ControlFlow;

use crate::error::Result;
use crate::instance::{Instance, Matching};
use crate::metrics::{unpopularity_margin, unpopularity_witness};
use crate::oracle;
use crate::wmatch::{max_weight_matching, SmallVector, WeightedBipartiteGraph};

/// Largest instance solved exactly by the least-unpopular fallback.
pub const EXACT_UNPOPULAR_CAP: usize = 8;
/// Iteration cap of the best-response descent.
pub const DESCENT_ROUNDS: usize = 50;

/// Maximum cardinality matching by augmenting paths, seeded greedily in rank order.
pub fn max_cardinality_matching(inst: &Instance) -> Vec<Option<usize>> {
    let na = inst.n_applicants();
    let mut mate_a: Vec<Option<usize>> = vec![None; na];
    let mut mate_p: Vec<Option<usize>> = vec![None; inst.n_posts()];
    for a in 0..na {
        if let Some(&p) = inst.prefs(a).iter().find(|&&p| mate_p[p].is_none()) {
            mate_a[a] = Some(p);
            mate_p[p] = Some(a);
        }
    }

    fn augment(
        inst: &Instance,
        a: usize,
        seen: &mut [bool],
        mate_a: &mut [Option<usize>],
        mate_p: &mut [Option<usize>],
    ) -> bool {
        for &p in inst.prefs(a) {
            if seen[p] {
                continue;
            }
            seen[p] = true;
            let free = match mate_p[p] {
                None => true,
                Some(b) => augment(inst, b, seen, mate_a, mate_p),
            };
            if free {
                mate_a[a] = Some(p);
                mate_p[p] = Some(a);
                return true;
            }
        }
        false
    }

    let mut seen = vec![false; inst.n_posts()];
    for a in 0..na {
        if mate_a[a].is_none() {
            seen.fill(false);
            augment(inst, a, &mut seen, &mut mate_a, &mut mate_p);
        }
    }
    mate_a
}

/// Maximum-cardinality Pareto optimal matching: a maximum matching made
/// trade-in-free and then coalition-free.
pub fn solve_pom(inst: &Instance) -> Result<Matching> {
    let mut mate_a = max_cardinality_matching(inst);
    let mut owner: Vec<Option<usize>> = vec![None; inst.n_posts()];
    for (a, p) in mate_a.iter().enumerate() {
        if let Some(p) = p {
            owner[*p] = Some(a);
        }
    }
    let rank = |a: usize, p: usize| inst.rank_of(a, p).expect("matched edge");

    // trade-ins: a matched applicant moves to a free post it prefers
    loop {
        let mut moved = false;
        for a in 0..inst.n_applicants() {
            let Some(cur) = mate_a[a] else { continue };
            let better = &inst.prefs(a)[..rank(a, cur) - 1];
            if let Some(&q) = better.iter().find(|&&q| owner[q].is_none()) {
                owner[cur] = None;
                owner[q] = Some(a);
                mate_a[a] = Some(q);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }

    // coalitions: cycles in the "prefers the post held by" relation
    while let Some(cycle) = find_coalition(inst, &mate_a, &owner) {
        let posts: Vec<usize> = cycle
            .iter()
            .map(|&a| {
                let next = cycle[(cycle.iter().position(|&x| x == a).unwrap() + 1) % cycle.len()];
                mate_a[next].expect("matched")
            })
            .collect();
        for (&a, &p) in cycle.iter().zip(&posts) {
            mate_a[a] = Some(p);
            owner[p] = Some(a);
        }
    }
    Ok(Matching::from_assignment(&mate_a))
}

/// A cycle `a₀ → a₁ → … → a₀` where each applicant prefers the next one's post.
fn find_coalition(
    inst: &Instance,
    mate_a: &[Option<usize>],
    owner: &[Option<usize>],
) -> Option<Vec<usize>> {
    let na = inst.n_applicants();
    let envies = |a: usize| -> Vec<usize> {
        let Some(cur) = mate_a[a] else {
            return Vec::new();
        };
        inst.prefs(a)
            .iter()
            .take_while(|&&q| q != cur)
            .filter_map(|&q| owner[q])
            .collect()
    };
    // 0 = new, 1 = on stack, 2 = finished
    let mut color = vec![0u8; na];
    let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    for start in 0..na {
        if color[start] != 0 || mate_a[start].is_none() {
            continue;
        }
        color[start] = 1;
        stack.push((start, envies(start), 0));
        while let Some((node, succ, idx)) = stack.last_mut() {
            if *idx == succ.len() {
                color[*node] = 2;
                stack.pop();
                continue;
            }
            let next = succ[*idx];
            *idx += 1;
            match color[next] {
                0 => {
                    color[next] = 1;
                    let s = envies(next);
                    stack.push((next, s, 0));
                }
                1 => {
                    let pos = stack.iter().position(|(n, _, _)| *n == next).unwrap();
                    return Some(stack[pos..].iter().map(|(n, _, _)| *n).collect());
                }
                _ => {}
            }
        }
    }
    None
}

fn solve_lex<F>(inst: &Instance, dim: usize, weight: F) -> Result<Matching>
where
    F: Fn(usize) -> SmallVector,
{
    if dim == 0 {
        return Ok(Matching::empty());
    }
    let mut g = WeightedBipartiteGraph::new(inst.n_applicants(), inst.n_posts());
    for (a, p, rank) in inst.edges() {
        g.add_edge(a, p, weight(rank))?;
    }
    max_weight_matching(&g, false)
}

/// Rank-maximal matching: a rank-`i` edge weighs the unit vector `e_i`, so the
/// lexicographically heaviest matching has the best signature.
pub fn solve_rmm(inst: &Instance) -> Result<Matching> {
    let r = inst.max_rank();
    solve_lex(inst, r, |rank| {
        let mut w = vec![0; r];
        w[rank - 1] = 1;
        SmallVector(w)
    })
}

/// Fair matching: a rank-`i` edge weighs `(1, 0, …, -1 at r-i+1, …)`, which
/// maximizes cardinality, then minimizes rank-`r` matches, then rank `r-1`, …
pub fn solve_fm(inst: &Instance) -> Result<Matching> {
    let r = inst.max_rank();
    solve_lex(inst, r + 1, |rank| {
        let mut w = vec![0; r + 1];
        w[0] = 1;
        w[r - rank + 1] = -1;
        SmallVector(w)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopularResult {
    pub matching: Matching,
    pub popular_exists: bool,
    /// Best-response margin of `matching`; 0 iff it is popular.
    pub margin: i64,
    /// Set when the matching came from the non-exact descent.
    pub heuristic: bool,
}

/// Maximum-cardinality popular matching on the f-post/s-post reduced graph,
/// or `None` when no popular matching exists.
pub fn max_card_popular(inst: &Instance) -> Result<Option<Matching>> {
    let na = inst.n_applicants();
    let np = inst.n_posts();
    let mut is_f = vec![false; np];
    for a in 0..na {
        if let Some(&f) = inst.prefs(a).first() {
            is_f[f] = true;
        }
    }
    let f_count = is_f.iter().filter(|&&x| x).count() as i64;

    // right side: real posts, then one last-resort post per applicant.
    // weight = (applicant matched, f-post matched, real post matched)
    let mut g = WeightedBipartiteGraph::new(na, np + na);
    for a in 0..na {
        let prefs = inst.prefs(a);
        if let Some(&f) = prefs.first() {
            g.add_edge(a, f, SmallVector(vec![1, 1, 1]))?;
        }
        match prefs.iter().find(|&&p| !is_f[p]) {
            Some(&s) => g.add_edge(a, s, SmallVector(vec![1, 0, 1]))?,
            None => g.add_edge(a, np + a, SmallVector(vec![1, 0, 0]))?,
        }
    }
    let m = max_weight_matching(&g, false)?;
    let applicants = m.len() as i64;
    let f_matched = m
        .pairs()
        .iter()
        .filter(|&&(_, p)| p < np && is_f[p])
        .count() as i64;
    if applicants != na as i64 || f_matched != f_count {
        return Ok(None);
    }
    let real: Vec<(usize, usize)> = m.pairs().iter().copied().filter(|&(_, p)| p < np).collect();
    Ok(Some(Matching::new(real)?))
}

pub fn solve_popular(inst: &Instance) -> Result<PopularResult> {
    if let Some(m) = max_card_popular(inst)? {
        let margin = unpopularity_margin(inst, &m)?;
        return Ok(PopularResult {
            matching: m,
            popular_exists: true,
            margin,
            heuristic: false,
        });
    }
    let (matching, margin, exact) = least_unpopular(inst)?;
    Ok(PopularResult {
        matching,
        popular_exists: false,
        margin,
        heuristic: !exact,
    })
}

pub fn least_unpopular_heuristic(inst: &Instance) -> Result<Matching> {
    Ok(least_unpopular(inst)?.0)
}

/// Minimum-margin matching: exact by enumeration up to
/// [`EXACT_UNPOPULAR_CAP`] applicants, otherwise best-response descent from a
/// fair matching. Returns the matching, its margin, and whether it is exact.
pub fn least_unpopular(inst: &Instance) -> Result<(Matching, i64, bool)> {
    if inst.n_applicants() <= EXACT_UNPOPULAR_CAP {
        let floor = if max_card_popular(inst)?.is_some() {
            0
        } else {
            1
        };
        let mut best: Option<(Matching, i64)> = None;
        let mut failure = None;
        oracle::for_each_assignment(inst, EXACT_UNPOPULAR_CAP, |asg| {
            let m = Matching::from_assignment(asg);
            match unpopularity_margin(inst, &m) {
                Ok(margin) => {
                    if best.as_ref().is_none_or(|(_, b)| margin < *b) {
                        best = Some((m, margin));
                    }
                    if margin <= floor {
                        return ControlFlow::Break(());
                    }
                }
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        let (m, margin) = best.expect("the empty matching is always enumerated");
        return Ok((m, margin, true));
    }

    let mut cur = solve_fm(inst)?;
    let (mut cur_margin, mut witness) = unpopularity_witness(inst, &cur)?;
    let mut best = (cur.clone(), cur_margin);
    for _ in 0..DESCENT_ROUNDS {
        let (w_margin, w_witness) = unpopularity_witness(inst, &witness)?;
        if w_margin >= cur_margin {
            break;
        }
        cur = witness;
        cur_margin = w_margin;
        witness = w_witness;
        if cur_margin < best.1 {
            best = (cur.clone(), cur_margin);
        }
    }
    Ok((best.0, best.1, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::{parse_instance, signature_of};
    use crate::oracle::oracle_optima;

    #[test]
    fn pom_on_fix_a_is_maximum() {
        let inst = fixtures::fix_a();
        let m = solve_pom(&inst).unwrap();
        assert_eq!(m.len(), 4);
        assert!(oracle_optima(&inst).unwrap().is_pareto_optimal(&inst, &m));
    }

    #[test]
    fn pom_identity_assignment() {
        let inst = parse_instance("3 3\n1: 1\n2: 2\n3: 3\n").unwrap();
        let m = solve_pom(&inst).unwrap();
        assert_eq!(m.pairs(), &[(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn pom_resolves_coalitions() {
        // greedy start assigns a1-b2, a2-b1 only if forced; build a swap case
        let inst = parse_instance("2 2\n1: 1 2\n2: 2 1\n").unwrap();
        let m = solve_pom(&inst).unwrap();
        assert_eq!(m.pairs(), &[(0, 0), (1, 1)]);
        let inst = parse_instance("3 3\n1: 2 1\n2: 3 2\n3: 1 3\n").unwrap();
        let m = solve_pom(&inst).unwrap();
        assert_eq!(m.pairs(), &[(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn single_edge() {
        let inst = parse_instance("1 1\n1: 1\n").unwrap();
        for m in [solve_rmm(&inst).unwrap(), solve_fm(&inst).unwrap()] {
            assert_eq!(m.pairs(), &[(0, 0)]);
        }
    }

    #[test]
    fn fm_on_fix_c() {
        let inst = fixtures::fix_c();
        let s = signature_of(&inst, &solve_fm(&inst).unwrap()).unwrap();
        assert_eq!(s.per_rank, vec![4, 0, 1, 2, 0]);
        assert_eq!(s.unmatched, 0);
    }

    #[test]
    fn rmm_on_fix_c() {
        let inst = fixtures::fix_c();
        let s = signature_of(&inst, &solve_rmm(&inst).unwrap()).unwrap();
        assert_eq!(s.per_rank[0], 4);
        assert_eq!(s, oracle_optima(&inst).unwrap().rank_maximal_signature);
    }

    #[test]
    fn empty_lists_everywhere() {
        let inst = parse_instance("2 2\n1:\n2:\n").unwrap();
        assert!(solve_rmm(&inst).unwrap().is_empty());
        assert!(solve_fm(&inst).unwrap().is_empty());
        assert!(solve_pom(&inst).unwrap().is_empty());
        let p = solve_popular(&inst).unwrap();
        assert!(p.popular_exists);
        assert!(p.matching.is_empty());
    }

    #[test]
    fn popular_with_distinct_first_choices() {
        let inst = parse_instance("3 4\n1: 1 2\n2: 2 1\n3: 3 4\n").unwrap();
        let p = solve_popular(&inst).unwrap();
        assert!(p.popular_exists);
        assert_eq!(p.margin, 0);
        assert_eq!(p.matching.pairs(), &[(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn two_applicants_one_post() {
        // either single assignment ties the other 1-1, so it is popular
        let inst = parse_instance("2 1\n1: 1\n2: 1\n").unwrap();
        let p = solve_popular(&inst).unwrap();
        assert!(p.popular_exists);
        assert_eq!(p.matching.len(), 1);
        assert_eq!(p.margin, 0);
    }

    #[test]
    fn no_popular_matching() {
        // three applicants with identical lists over three posts
        let inst = parse_instance("3 3\n1: 1 2 3\n2: 1 2 3\n3: 1 2 3\n").unwrap();
        let p = solve_popular(&inst).unwrap();
        assert!(!p.popular_exists);
        let o = oracle_optima(&inst).unwrap();
        assert!(!o.popular_exists);
        assert_eq!(p.margin, o.min_margin);
        assert!(!p.heuristic);
    }
}
