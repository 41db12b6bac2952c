//! Exact maximum-weight bipartite matching.
//!
//! The solver runs successive shortest augmenting paths on the min-cost-flow
//! form of the problem (cost = -weight) and keeps Johnson potentials so every
//! Dijkstra pass sees non-negative reduced costs. Weights live in any ordered
//! abelian group implementing [`Weight`]: scalars, fixed-width integer vectors
//! under lexicographic order, or arbitrary-precision [`WeightVector`]s.
//!
//! Fixed-width weights are only used while a magnitude bound guarantees every
//! intermediate potential fits in an `i64`; otherwise the graph is promoted to
//! [`WeightVector`] before solving.
//!
//! In non-perfect mode only edges of strictly positive weight are considered and
//! an augmentation is applied only if it strictly increases the total weight.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::Matching;

/// Ordered additive weight domain.
pub trait Weight: Clone + Ord + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn add_assign(&mut self, other: &Self);
    fn sub_assign(&mut self, other: &Self);
    fn negated(&self) -> Self;
    /// Number of components (1 for scalars).
    fn dim(&self) -> usize;
    /// Largest absolute component for fixed-width types, `None` when the
    /// type cannot overflow.
    fn fixed_magnitude(&self) -> Option<u128>;
    fn to_vector(&self) -> WeightVector;

    fn is_positive(&self) -> bool {
        *self > self.zero_like()
    }
}

impl Weight for i64 {
    fn zero_like(&self) -> Self {
        0
    }
    fn add_assign(&mut self, other: &Self) {
        *self = self.checked_add(*other).expect("weight overflow");
    }
    fn sub_assign(&mut self, other: &Self) {
        *self = self.checked_sub(*other).expect("weight overflow");
    }
    fn negated(&self) -> Self {
        self.checked_neg().expect("weight overflow")
    }
    fn dim(&self) -> usize {
        1
    }
    fn fixed_magnitude(&self) -> Option<u128> {
        Some(u128::from(self.unsigned_abs()))
    }
    fn to_vector(&self) -> WeightVector {
        WeightVector::scalar(*self)
    }
}

/// Fixed-width integer vector compared lexicographically from component 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SmallVector(pub Vec<i64>);

impl Weight for SmallVector {
    fn zero_like(&self) -> Self {
        SmallVector(vec![0; self.0.len()])
    }
    fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.0.len(), other.0.len());
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            *x = x.checked_add(*y).expect("weight overflow");
        }
    }
    fn sub_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.0.len(), other.0.len());
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            *x = x.checked_sub(*y).expect("weight overflow");
        }
    }
    fn negated(&self) -> Self {
        SmallVector(
            self.0
                .iter()
                .map(|x| x.checked_neg().expect("weight overflow"))
                .collect(),
        )
    }
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn fixed_magnitude(&self) -> Option<u128> {
        Some(
            self.0
                .iter()
                .map(|x| u128::from(x.unsigned_abs()))
                .max()
                .unwrap_or(0),
        )
    }
    fn to_vector(&self) -> WeightVector {
        WeightVector::from_i64s(&self.0)
    }
}

/// Arbitrary-precision integer vector; addition is componentwise and the
/// order is lexicographic from component 0. Scalars are length-1 vectors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightVector(Vec<BigInt>);

impl WeightVector {
    pub fn zero(len: usize) -> Self {
        WeightVector(vec![BigInt::zero(); len])
    }

    pub fn scalar(v: i64) -> Self {
        WeightVector(vec![BigInt::from(v)])
    }

    pub fn from_i64s(vs: &[i64]) -> Self {
        WeightVector(vs.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn from_components(cs: Vec<BigInt>) -> Self {
        WeightVector(cs)
    }

    pub fn components(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &WeightVector {
    type Output = WeightVector;
    fn add(self, rhs: Self) -> WeightVector {
        assert_eq!(self.len(), rhs.len(), "weight vectors differ in length");
        WeightVector(self.0.iter().zip(&rhs.0).map(|(x, y)| x + y).collect())
    }
}

impl Sub for &WeightVector {
    type Output = WeightVector;
    fn sub(self, rhs: Self) -> WeightVector {
        assert_eq!(self.len(), rhs.len(), "weight vectors differ in length");
        WeightVector(self.0.iter().zip(&rhs.0).map(|(x, y)| x - y).collect())
    }
}

impl Neg for &WeightVector {
    type Output = WeightVector;
    fn neg(self) -> WeightVector {
        WeightVector(self.0.iter().map(|x| -x).collect())
    }
}

impl Weight for WeightVector {
    fn zero_like(&self) -> Self {
        WeightVector::zero(self.len())
    }
    fn add_assign(&mut self, other: &Self) {
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            *x += y;
        }
    }
    fn sub_assign(&mut self, other: &Self) {
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            *x -= y;
        }
    }
    fn negated(&self) -> Self {
        -self
    }
    fn dim(&self) -> usize {
        self.len()
    }
    fn fixed_magnitude(&self) -> Option<u128> {
        None
    }
    fn to_vector(&self) -> WeightVector {
        self.clone()
    }
}

/// Bipartite graph with weighted edges; weights of one graph share a dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedBipartiteGraph<W = WeightVector> {
    left_count: usize,
    right_count: usize,
    adj: Vec<Vec<(usize, W)>>,
    dim: Option<usize>,
}

impl<W: Weight> WeightedBipartiteGraph<W> {
    pub fn new(left_count: usize, right_count: usize) -> Self {
        WeightedBipartiteGraph {
            left_count,
            right_count,
            adj: vec![Vec::new(); left_count],
            dim: None,
        }
    }

    pub fn add_edge(&mut self, left: usize, right: usize, weight: W) -> Result<()> {
        if left >= self.left_count || right >= self.right_count {
            return Err(Error::InvalidGraph(format!(
                "edge ({left}, {right}) out of range"
            )));
        }
        match self.dim {
            Some(d) if d != weight.dim() => {
                return Err(Error::InvalidGraph(format!(
                    "weight of dimension {} in a graph of dimension {d}",
                    weight.dim()
                )))
            }
            _ => self.dim = Some(weight.dim()),
        }
        if self.adj[left].iter().any(|&(r, _)| r == right) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({left}, {right})"
            )));
        }
        self.adj[left].push((right, weight));
        Ok(())
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &W)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(l, es)| es.iter().map(move |(r, w)| (l, *r, w)))
    }

    pub fn weight(&self, left: usize, right: usize) -> Option<&W> {
        self.adj
            .get(left)?
            .iter()
            .find(|(r, _)| *r == right)
            .map(|(_, w)| w)
    }

    fn to_vector_graph(&self) -> WeightedBipartiteGraph<WeightVector> {
        WeightedBipartiteGraph {
            left_count: self.left_count,
            right_count: self.right_count,
            adj: self
                .adj
                .iter()
                .map(|es| es.iter().map(|(r, w)| (*r, w.to_vector())).collect())
                .collect(),
            dim: self.dim,
        }
    }
}

/// Total weight of `m`; `zero` fixes the dimension for the empty matching.
pub fn matching_weight<W: Weight>(
    g: &WeightedBipartiteGraph<W>,
    m: &Matching,
    zero: &W,
) -> Result<W> {
    let mut total = zero.clone();
    for &(l, r) in m.pairs() {
        let w = g.weight(l, r).ok_or_else(|| {
            Error::InvalidMatching(format!("pair ({l}, {r}) is not an edge of the graph"))
        })?;
        total.add_assign(w);
    }
    Ok(total)
}

/// Maximum-weight matching, or maximum-weight perfect matching when
/// `require_perfect` is set (which needs equal side sizes).
pub fn max_weight_matching<W: Weight>(
    g: &WeightedBipartiteGraph<W>,
    require_perfect: bool,
) -> Result<Matching> {
    if require_perfect && g.left_count != g.right_count {
        return Err(Error::InvalidGraph(format!(
            "perfect matching requested on a {}x{} graph",
            g.left_count, g.right_count
        )));
    }
    let Some(first) = g.edges().next().map(|(_, _, w)| w.clone()) else {
        return if require_perfect && g.left_count > 0 {
            Err(Error::InfeasiblePerfect)
        } else {
            Ok(Matching::empty())
        };
    };

    let bound: Option<u128> = g
        .edges()
        .map(|(_, _, w)| w.fixed_magnitude())
        .try_fold(0u128, |acc, m| m.map(|m| acc.max(m)));
    if let Some(b) = bound {
        // every potential and tentative distance stays within 8(V+2)B
        let nodes = (g.left_count + g.right_count + 2) as u128;
        if b.saturating_mul(8).saturating_mul(nodes + 2) > i64::MAX as u128 {
            let vg = g.to_vector_graph();
            let zero = first.to_vector().zero_like();
            let mate = solve(&vg, &zero, require_perfect)?;
            return Ok(Matching::from_assignment(&mate));
        }
    }
    let zero = first.zero_like();
    let mate = solve(g, &zero, require_perfect)?;
    Ok(Matching::from_assignment(&mate))
}

const UNSEEN: u8 = 0;
const QUEUED: u8 = 1;
const DONE: u8 = 2;

fn solve<W: Weight>(
    g: &WeightedBipartiteGraph<W>,
    zero: &W,
    perfect: bool,
) -> Result<Vec<Option<usize>>> {
    let nl = g.left_count;
    let nr = g.right_count;
    let src = nl + nr;
    let sink = src + 1;
    let n = sink + 1;

    // forward residual costs (negated weights); non-perfect mode drops edges
    // that could never strictly improve a matching
    let cost: Vec<Vec<(usize, W)>> = g
        .adj
        .iter()
        .map(|es| {
            es.iter()
                .filter(|(_, w)| perfect || w.is_positive())
                .map(|(r, w)| (*r, w.negated()))
                .collect()
        })
        .collect();

    let mut pot: Vec<W> = vec![zero.clone(); n];
    let mut has_in = vec![false; nr];
    for es in &cost {
        for (r, c) in es {
            if !has_in[*r] || *c < pot[nl + r] {
                pot[nl + r] = c.clone();
                has_in[*r] = true;
            }
        }
    }
    if let Some(min_right) = (0..nr).map(|r| &pot[nl + r]).min().cloned() {
        pot[sink] = min_right;
    }

    let mut mate_l: Vec<Option<usize>> = vec![None; nl];
    let mut mate_r: Vec<Option<usize>> = vec![None; nr];
    // cost of the matched forward edge, indexed by right vertex
    let mut mate_cost: Vec<W> = vec![zero.clone(); nr];
    let mut matched = 0usize;

    let mut dist: Vec<W> = vec![zero.clone(); n];
    let mut state = vec![UNSEEN; n];
    let mut parent = vec![usize::MAX; n];
    let mut heap: BinaryHeap<Reverse<(W, usize)>> = BinaryHeap::new();
    let mut base = zero.clone();
    let mut tmp = zero.clone();
    let mut stopped_on_sign = false;

    loop {
        if perfect && matched == nl {
            break;
        }
        state.fill(UNSEEN);
        heap.clear();
        dist[src].clone_from(zero);
        state[src] = QUEUED;
        heap.push(Reverse((zero.clone(), src)));

        while let Some(Reverse((d, u))) = heap.pop() {
            if state[u] == DONE || d > dist[u] {
                continue;
            }
            state[u] = DONE;
            if u == sink {
                break;
            }
            base.clone_from(&d);
            base.add_assign(&pot[u]);
            let mut relax = |v: usize, c: &W, dist: &mut Vec<W>, state: &mut Vec<u8>| {
                if state[v] == DONE {
                    return;
                }
                tmp.clone_from(&base);
                tmp.add_assign(c);
                tmp.sub_assign(&pot[v]);
                if state[v] == UNSEEN || tmp < dist[v] {
                    dist[v].clone_from(&tmp);
                    state[v] = QUEUED;
                    parent[v] = u;
                    heap.push(Reverse((tmp.clone(), v)));
                }
            };
            if u == src {
                for a in 0..nl {
                    if mate_l[a].is_none() {
                        relax(a, zero, &mut dist, &mut state);
                    }
                }
            } else if u < nl {
                for (r, c) in &cost[u] {
                    if mate_l[u] != Some(*r) {
                        relax(nl + r, c, &mut dist, &mut state);
                    }
                }
            } else {
                let r = u - nl;
                match mate_r[r] {
                    Some(a) => {
                        let back = mate_cost[r].negated();
                        relax(a, &back, &mut dist, &mut state);
                    }
                    None => relax(sink, zero, &mut dist, &mut state),
                }
            }
        }

        if state[sink] != DONE {
            if perfect {
                return Err(Error::InfeasiblePerfect);
            }
            break;
        }

        let reach = dist[sink].clone();
        for v in 0..n {
            if state[v] == DONE && dist[v] < reach {
                pot[v].add_assign(&dist[v]);
            } else {
                pot[v].add_assign(&reach);
            }
        }
        // pot[sink] - pot[src] is now the true cost of the shortest path
        if !perfect {
            let mut path_cost = pot[sink].clone();
            path_cost.sub_assign(&pot[src]);
            if path_cost >= *zero {
                stopped_on_sign = true;
                break;
            }
        }

        let mut r = parent[sink] - nl;
        loop {
            let a = parent[nl + r];
            let prev = mate_l[a];
            mate_l[a] = Some(r);
            mate_r[r] = Some(a);
            mate_cost[r] = cost[a]
                .iter()
                .find(|(rr, _)| *rr == r)
                .map(|(_, c)| c.clone())
                .expect("augmenting edge exists");
            if parent[a] == src {
                break;
            }
            r = parent[a] - nl;
            debug_assert_eq!(prev, Some(r));
        }
        matched += 1;
    }

    certify(&cost, &pot, &mate_l, &mate_r, &mate_cost, zero, src, sink)?;
    if stopped_on_sign {
        let mut gap = pot[sink].clone();
        gap.sub_assign(&pot[src]);
        if gap < *zero {
            return Err(Error::Certificate(
                "an improving augmenting path remains".into(),
            ));
        }
    }
    Ok(mate_l)
}

/// Checks that every residual arc has non-negative reduced cost, i.e. the
/// potentials are a feasible dual and no negative residual cycle exists.
#[allow(clippy::too_many_arguments)]
fn certify<W: Weight>(
    cost: &[Vec<(usize, W)>],
    pot: &[W],
    mate_l: &[Option<usize>],
    mate_r: &[Option<usize>],
    mate_cost: &[W],
    zero: &W,
    src: usize,
    sink: usize,
) -> Result<()> {
    let nl = mate_l.len();
    let reduced = |c: &W, u: usize, v: usize| {
        let mut t = c.clone();
        t.add_assign(&pot[u]);
        t.sub_assign(&pot[v]);
        t
    };
    for (a, es) in cost.iter().enumerate() {
        if mate_l[a].is_none() && reduced(zero, src, a) < *zero {
            return Err(Error::Certificate(format!("source arc to {a}")));
        }
        for (r, c) in es {
            let rc = if mate_l[a] == Some(*r) {
                reduced(&c.negated(), nl + r, a)
            } else {
                reduced(c, a, nl + r)
            };
            if rc < *zero {
                return Err(Error::Certificate(format!("arc ({a}, {r})")));
            }
        }
    }
    for (r, m) in mate_r.iter().enumerate() {
        if m.is_none() && reduced(zero, nl + r, sink) < *zero {
            return Err(Error::Certificate(format!("sink arc from {r}")));
        }
        if let Some(a) = m {
            debug_assert!(cost[*a]
                .iter()
                .any(|(rr, c)| rr == &r && c == &mate_cost[r]));
        }
    }
    Ok(())
}
