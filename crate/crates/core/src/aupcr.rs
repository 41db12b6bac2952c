//! Area under the profile curve ratio (AUPCR) and the reductions that
//! maximize it.
//!
//! For a matching with `n_i` applicants at rank `i`,
//! `AUPC = Σ (|P| - i + 1) n_i` and `AUPCR = AUPC / (|A| |P|)`.
//!
//! Both solvers build a doubled graph `G'` with left side `A₁ ∪ P₂` and right
//! side `P₁ ∪ A₂`. Every preference edge of rank `i` appears as `A₁–P₁` and as
//! `P₂–A₂` with weight `|P| - i + 1`, and every vertex is linked to its copy by
//! an identity edge. A maximum-weight perfect matching of `G'` restricted to
//! `A₁ × P₁` maximizes AUPCR. For the max-cardinality variant all rank weights
//! are scaled by `|A| + |P|` and the `A₁–A₂` identity edges get weight `-1`, so
//! leaving an applicant unmatched costs strictly less than one AUPC unit.

use std::cmp::Ordering;
use std::fmt;

use crate::error::Result;
use crate::instance::{Instance, Matching};
use crate::wmatch::{max_weight_matching, WeightedBipartiteGraph};

/// Exact AUPCR as `AUPC / TA`. Equality and order compare the fractions'
/// values, so `2/4 == 1/2`.
#[derive(Debug, Clone, Copy)]
pub struct AupcrValue {
    pub numerator: u64,
    pub denominator: u64,
}

impl AupcrValue {
    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl PartialEq for AupcrValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for AupcrValue {}

impl Ord for AupcrValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = u128::from(self.numerator) * u128::from(other.denominator);
        let r = u128::from(other.numerator) * u128::from(self.denominator);
        l.cmp(&r)
    }
}

impl PartialOrd for AupcrValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AupcrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// AUPC contribution of one edge of rank `rank`.
pub fn rank_weight(n_posts: usize, rank: usize) -> u64 {
    (n_posts + 1 - rank) as u64
}

/// AUPCR from per-rank counts.
pub fn aupcr_from_counts(n_applicants: usize, n_posts: usize, per_rank: &[u64]) -> AupcrValue {
    let numerator = per_rank
        .iter()
        .enumerate()
        .map(|(i, &n)| rank_weight(n_posts, i + 1) * n)
        .sum();
    AupcrValue {
        numerator,
        denominator: (n_applicants * n_posts) as u64,
    }
}

pub fn compute_aupcr(inst: &Instance, m: &Matching) -> Result<AupcrValue> {
    let numerator = inst
        .ranks_under(m)?
        .into_iter()
        .flatten()
        .map(|r| rank_weight(inst.n_posts(), r))
        .sum();
    Ok(AupcrValue {
        numerator,
        denominator: (inst.n_applicants() * inst.n_posts()) as u64,
    })
}

/// The doubled graph `G'` plus its vertex maps.
///
/// Left vertex `a < |A|` is `A₁(a)` and `|A| + p` is `P₂(p)`; right vertex
/// `p < |P|` is `P₁(p)` and `|P| + a` is `A₂(a)`.
#[derive(Debug, Clone)]
pub struct ReductionGraph {
    pub graph: WeightedBipartiteGraph<i64>,
    pub n_applicants: usize,
    pub n_posts: usize,
    /// Identity edges as `(left, right)` graph indices.
    pub identity: Vec<(usize, usize)>,
}

impl ReductionGraph {
    fn build(inst: &Instance, scale: i64, applicant_identity: i64) -> Result<Self> {
        let na = inst.n_applicants();
        let np = inst.n_posts();
        let mut graph = WeightedBipartiteGraph::new(na + np, np + na);
        for (a, p, rank) in inst.edges() {
            let w = rank_weight(np, rank) as i64 * scale;
            graph.add_edge(a, p, w)?;
            graph.add_edge(na + p, np + a, w)?;
        }
        let mut identity = Vec::with_capacity(na + np);
        for a in 0..na {
            graph.add_edge(a, np + a, applicant_identity)?;
            identity.push((a, np + a));
        }
        for p in 0..np {
            graph.add_edge(na + p, p, 0)?;
            identity.push((na + p, p));
        }
        Ok(ReductionGraph {
            graph,
            n_applicants: na,
            n_posts: np,
            identity,
        })
    }

    /// Splits a perfect matching of `G'` into its `A₁–P₁` and `A₂–P₂`
    /// restrictions, both as `(applicant, post)` pairs.
    pub fn split(&self, full: &Matching) -> (Matching, Matching) {
        let (na, np) = (self.n_applicants, self.n_posts);
        let mut first = Vec::new();
        let mut second = Vec::new();
        for &(l, r) in full.pairs() {
            if l < na && r < np {
                first.push((l, r));
            } else if l >= na && r >= np {
                second.push((r - np, l - na));
            }
        }
        (
            Matching::new(first).expect("restriction of a matching"),
            Matching::new(second).expect("restriction of a matching"),
        )
    }

    /// Maximum-weight perfect matching of `G'`.
    pub fn solve_full(&self) -> Result<Matching> {
        max_weight_matching(&self.graph, true)
    }

    /// Solves and restricts to `A₁ × P₁`.
    pub fn solve(&self) -> Result<Matching> {
        Ok(self.split(&self.solve_full()?).0)
    }
}

/// `G'` for AUPCR maximization: rank weights `|P| - i + 1`, identity edges 0.
pub fn build_amm_reduction(inst: &Instance) -> Result<ReductionGraph> {
    ReductionGraph::build(inst, 1, 0)
}

/// `G'` for max-cardinality AUPCR maximization, scaled by `|A| + |P|` so the
/// applicant identity penalty is the integer `-1`.
pub fn build_mcamm_reduction(inst: &Instance) -> Result<ReductionGraph> {
    let scale = (inst.n_applicants() + inst.n_posts()) as i64;
    ReductionGraph::build(inst, scale, -1)
}

/// A matching of maximum AUPCR.
pub fn solve_amm(inst: &Instance) -> Result<Matching> {
    build_amm_reduction(inst)?.solve()
}

/// A maximum-cardinality matching among those of maximum AUPCR.
pub fn solve_mcamm(inst: &Instance) -> Result<Matching> {
    build_mcamm_reduction(inst)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::parse_instance;
    use crate::wmatch::matching_weight;

    #[test]
    fn worked_profile_example() {
        let v = aupcr_from_counts(8, 6, &[4, 0, 2, 1, 1, 0]);
        assert_eq!((v.numerator, v.denominator), (37, 48));
        assert!((v.to_f64() - 0.771).abs() < 5e-4);
        let half = AupcrValue {
            numerator: 1,
            denominator: 2,
        };
        let same = AupcrValue {
            numerator: 2,
            denominator: 4,
        };
        assert_eq!(half, same);
        assert!(v > half);
    }

    #[test]
    fn empty_matching_scores_zero() {
        let inst = fixtures::fix_a();
        let v = compute_aupcr(&inst, &Matching::empty()).unwrap();
        assert_eq!((v.numerator, v.denominator), (0, 16));
    }

    #[test]
    fn all_first_choices_score_one() {
        let inst = parse_instance("3 3\n1: 1 2\n2: 2\n3: 3 1\n").unwrap();
        let m = Matching::new(vec![(0, 0), (1, 1), (2, 2)]).unwrap();
        let v = compute_aupcr(&inst, &m).unwrap();
        assert_eq!(v.numerator, v.denominator);
    }

    #[test]
    fn amm_reduction_shape() {
        let inst = fixtures::fix_a();
        let red = build_amm_reduction(&inst).unwrap();
        assert_eq!(red.graph.left_count(), 8);
        assert_eq!(red.graph.right_count(), 8);
        assert_eq!(red.graph.edge_count(), 2 * 9 + 8);
        assert_eq!(red.identity.len(), 8);
        for (l, r, w) in red.graph.edges() {
            if l < 4 && r < 4 {
                assert!((1..=4).contains(w));
                // mirrored copy with equal weight
                assert_eq!(red.graph.weight(4 + r, 4 + l), Some(w));
            }
        }
        for &(l, r) in &red.identity {
            assert_eq!(red.graph.weight(l, r), Some(&0));
        }
    }

    #[test]
    fn single_edge_reductions() {
        let inst = parse_instance("1 1\n1: 1\n").unwrap();
        let amm = build_amm_reduction(&inst).unwrap();
        assert_eq!(amm.graph.weight(0, 0), Some(&1));
        assert_eq!(amm.graph.weight(1, 1), Some(&1));
        assert_eq!(amm.graph.weight(0, 1), Some(&0));
        assert_eq!(amm.graph.weight(1, 0), Some(&0));
        let mc = build_mcamm_reduction(&inst).unwrap();
        assert_eq!(mc.graph.weight(0, 0), Some(&2));
        assert_eq!(mc.graph.weight(0, 1), Some(&-1));
        assert_eq!(mc.graph.weight(1, 0), Some(&0));
    }

    #[test]
    fn mcamm_scaling_on_fix_a() {
        let inst = fixtures::fix_a();
        let mc = build_mcamm_reduction(&inst).unwrap();
        // a1 ranks b1 first: 4 * (4 + 4)
        assert_eq!(mc.graph.weight(0, 0), Some(&32));
        assert_eq!(mc.graph.weight(0, 4), Some(&-1));
    }

    #[test]
    fn restricted_weight_matches_aupc() {
        let inst = fixtures::fix_a();
        let red = build_amm_reduction(&inst).unwrap();
        let m = Matching::new(vec![(0, 0), (2, 1), (3, 2)]).unwrap();
        assert_eq!(matching_weight(&red.graph, &m, &0).unwrap(), 12);
        assert_eq!(compute_aupcr(&inst, &m).unwrap().numerator, 12);
    }

    #[test]
    fn fixture_optima() {
        let a = fixtures::fix_a();
        let m = solve_amm(&a).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(compute_aupcr(&a, &m).unwrap().numerator, 12);

        let b = fixtures::fix_b();
        for m in [solve_amm(&b).unwrap(), solve_mcamm(&b).unwrap()] {
            let v = compute_aupcr(&b, &m).unwrap();
            // a1-b6 a2-b3 a3-b4 a4-b1 a5-b5 a6-b2 reaches 4·6 + 2·5
            assert_eq!((v.numerator, v.denominator), (34, 36));
        }
        assert_eq!(solve_mcamm(&b).unwrap().len(), 6);
        assert_eq!(solve_mcamm(&a).unwrap().len(), 3);
    }

    #[test]
    fn copies_match_the_same_vertices() {
        for inst in [fixtures::fix_a(), fixtures::fix_b(), fixtures::fix_c()] {
            for red in [
                build_amm_reduction(&inst).unwrap(),
                build_mcamm_reduction(&inst).unwrap(),
            ] {
                let full = red.solve_full().unwrap();
                assert_eq!(full.len(), inst.n_applicants() + inst.n_posts());
                let (m1, m2) = red.split(&full);
                let vs = |m: &Matching| {
                    let mut a: Vec<_> = m.pairs().iter().map(|p| p.0).collect();
                    let mut p: Vec<_> = m.pairs().iter().map(|p| p.1).collect();
                    a.sort();
                    p.sort();
                    (a, p)
                };
                assert_eq!(vs(&m1), vs(&m2));
            }
        }
    }
}
