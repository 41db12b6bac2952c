//! Problem data: instances with one-sided strict preference lists, matchings,
//! and rank signatures.
//!
//! Indices are 0-based in memory. The text formats are 1-based:
//!
//! ```text
//! # instance: header "<applicants> <posts>", then one line per applicant
//! 4 4
//! 1: 1
//! 2: 1 2
//! 3: 2 1 3
//! 4: 3 1 4
//! ```
//!
//! A matching file holds one `<applicant> <post>` pair per line. Lines starting
//! with `#` and blank lines are ignored in both formats.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Bipartite instance where every applicant ranks a subset of posts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    n_posts: usize,
    prefs: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds an instance from 0-based preference lists, best post first.
    pub fn new(n_posts: usize, prefs: Vec<Vec<usize>>) -> Result<Self> {
        if prefs.is_empty() {
            return Err(Error::InvalidInstance("no applicants".into()));
        }
        if n_posts == 0 {
            return Err(Error::InvalidInstance("no posts".into()));
        }
        for (a, list) in prefs.iter().enumerate() {
            let mut seen = vec![false; n_posts];
            for &p in list {
                if p >= n_posts {
                    return Err(Error::InvalidInstance(format!(
                        "applicant {} lists post {} but there are {} posts",
                        a + 1,
                        p + 1,
                        n_posts
                    )));
                }
                if std::mem::replace(&mut seen[p], true) {
                    return Err(Error::InvalidInstance(format!(
                        "applicant {} lists post {} twice",
                        a + 1,
                        p + 1
                    )));
                }
            }
        }
        Ok(Instance { n_posts, prefs })
    }

    pub fn n_applicants(&self) -> usize {
        self.prefs.len()
    }

    pub fn n_posts(&self) -> usize {
        self.n_posts
    }

    /// Preference list of applicant `a`, best first.
    pub fn prefs(&self, a: usize) -> &[usize] {
        &self.prefs[a]
    }

    pub fn pref_lists(&self) -> &[Vec<usize>] {
        &self.prefs
    }

    /// Longest preference list length (the largest rank in use).
    pub fn max_rank(&self) -> usize {
        self.prefs.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.prefs.iter().map(Vec::len).sum()
    }

    /// 1-based rank of post `p` on applicant `a`'s list.
    pub fn rank_of(&self, a: usize, p: usize) -> Option<usize> {
        self.prefs[a].iter().position(|&q| q == p).map(|i| i + 1)
    }

    /// Iterates over `(applicant, post, rank)` triples.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.prefs
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().enumerate().map(move |(i, &p)| (a, p, i + 1)))
    }

    /// Checks that every pair of `m` is an edge and that indices are in range.
    pub fn validate_matching(&self, m: &Matching) -> Result<()> {
        for &(a, p) in m.pairs() {
            if a >= self.n_applicants() || p >= self.n_posts {
                return Err(Error::InvalidMatching(format!(
                    "pair ({}, {}) is out of range",
                    a + 1,
                    p + 1
                )));
            }
            if self.rank_of(a, p).is_none() {
                return Err(Error::InvalidMatching(format!(
                    "applicant {} does not list post {}",
                    a + 1,
                    p + 1
                )));
            }
        }
        Ok(())
    }

    /// Rank of every applicant under `m` (`None` when unmatched).
    pub fn ranks_under(&self, m: &Matching) -> Result<Vec<Option<usize>>> {
        let mut ranks = vec![None; self.n_applicants()];
        for &(a, p) in m.pairs() {
            let r = self
                .prefs
                .get(a)
                .and_then(|_| self.rank_of(a, p))
                .ok_or_else(|| {
                    Error::InvalidMatching(format!("pair ({}, {}) is not an edge", a + 1, p + 1))
                })?;
            ranks[a] = Some(r);
        }
        Ok(ranks)
    }

    /// Serializes to the 1-based text format.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n_applicants(), self.n_posts)?;
        for (a, list) in self.prefs.iter().enumerate() {
            write!(f, "{}:", a + 1)?;
            for p in list {
                write!(f, " {}", p + 1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_index(tok: &str, line: usize, what: &str, limit: usize) -> Result<usize> {
    let v: usize = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))?;
    if v == 0 || v > limit {
        return Err(Error::parse(
            line,
            format!("{what} {v} out of range 1..={limit}"),
        ));
    }
    Ok(v - 1)
}

/// Parses the instance text format.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))?;
    let nums: Vec<&str> = header.split_whitespace().collect();
    let [na, np] = nums.as_slice() else {
        return Err(Error::parse(hline, "header must be `<applicants> <posts>`"));
    };
    let n_applicants: usize = na
        .parse()
        .map_err(|_| Error::parse(hline, format!("invalid applicant count `{na}`")))?;
    let n_posts: usize = np
        .parse()
        .map_err(|_| Error::parse(hline, format!("invalid post count `{np}`")))?;
    if n_applicants == 0 || n_posts == 0 {
        return Err(Error::parse(hline, "counts must be positive"));
    }

    let mut prefs: Vec<Option<Vec<usize>>> = vec![None; n_applicants];
    for (ln, line) in lines {
        let (id, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(ln, "expected `<applicant>: <posts...>`"))?;
        let a = parse_index(id.trim(), ln, "applicant", n_applicants)?;
        if prefs[a].is_some() {
            return Err(Error::parse(
                ln,
                format!("duplicate line for applicant {}", a + 1),
            ));
        }
        let mut seen = vec![false; n_posts];
        let mut list = Vec::new();
        for tok in rest.split_whitespace() {
            let p = parse_index(tok, ln, "post", n_posts)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::parse(ln, format!("post {} listed twice", p + 1)));
            }
            list.push(p);
        }
        prefs[a] = Some(list);
    }
    let last = text.lines().count();
    let prefs = prefs
        .into_iter()
        .enumerate()
        .map(|(a, l)| {
            l.ok_or_else(|| Error::parse(last, format!("missing line for applicant {}", a + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(n_posts, prefs)
}

/// A set of `(left, right)` pairs with no shared endpoint, sorted by left index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        let mut rights: Vec<usize> = pairs.iter().map(|&(_, r)| r).collect();
        rights.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidMatching("left vertex matched twice".into()));
        }
        if rights.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidMatching("right vertex matched twice".into()));
        }
        Ok(Matching { pairs })
    }

    pub fn empty() -> Self {
        Matching::default()
    }

    /// Builds a matching from a per-left-vertex assignment.
    pub fn from_assignment(assign: &[Option<usize>]) -> Self {
        Matching {
            pairs: assign
                .iter()
                .enumerate()
                .filter_map(|(a, p)| p.map(|p| (a, p)))
                .collect(),
        }
    }

    /// Per-left-vertex assignment for `n_left` vertices.
    pub fn assignment(&self, n_left: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_left];
        for &(a, p) in &self.pairs {
            if a < n_left {
                out[a] = Some(p);
            }
        }
        out
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn partner_of(&self, left: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&left, |&(a, _)| a)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    /// Serializes as 1-based `<applicant> <post>` lines.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(a, p) in &self.pairs {
            writeln!(f, "{} {}", a + 1, p + 1)?;
        }
        Ok(())
    }
}

/// Parses a matching file. Indices are validated against an instance separately.
pub fn parse_matching(text: &str) -> Result<Matching> {
    let mut pairs = Vec::new();
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [a, p] = toks.as_slice() else {
            return Err(Error::parse(ln, "expected `<applicant> <post>`"));
        };
        let a = parse_index(a, ln, "applicant", usize::MAX)?;
        let p = parse_index(p, ln, "post", usize::MAX)?;
        pairs.push((a, p));
    }
    Matching::new(pairs)
}

/// Number of applicants matched at each rank, plus the number left unmatched.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    pub per_rank: Vec<u64>,
    pub unmatched: u64,
}

impl Signature {
    pub fn cardinality(&self) -> u64 {
        self.per_rank.iter().sum()
    }

    /// Copy padded with zero counts up to `len` ranks.
    pub fn padded(&self, len: usize) -> Signature {
        let mut per_rank = self.per_rank.clone();
        if per_rank.len() < len {
            per_rank.resize(len, 0);
        }
        Signature {
            per_rank,
            unmatched: self.unmatched,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for x in &self.per_rank {
            write!(f, "{x},")?;
        }
        write!(f, "{})", self.unmatched)
    }
}

/// Signature of `m`, with one slot per rank up to the instance's max rank.
pub fn signature_of(inst: &Instance, m: &Matching) -> Result<Signature> {
    let mut per_rank = vec![0u64; inst.max_rank()];
    for r in inst.ranks_under(m)?.into_iter().flatten() {
        per_rank[r - 1] += 1;
    }
    Ok(Signature {
        per_rank,
        unmatched: (inst.n_applicants() - m.len()) as u64,
    })
}

fn rank_slot(s: &Signature, i: usize) -> u64 {
    s.per_rank.get(i).copied().unwrap_or(0)
}

/// Rank-maximality order: more rank-1 matches wins, then rank 2, and so on.
/// The unmatched count does not take part.
pub fn compare_rank_maximal(s1: &Signature, s2: &Signature) -> Ordering {
    let len = s1.per_rank.len().max(s2.per_rank.len());
    (0..len)
        .map(|i| rank_slot(s1, i).cmp(&rank_slot(s2, i)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Fairness order: scanning from the unmatched slot towards rank 1, the
/// signature with fewer applicants at the first differing position wins.
pub fn compare_fair(s1: &Signature, s2: &Signature) -> Ordering {
    let len = s1.per_rank.len().max(s2.per_rank.len());
    let tail = s2.unmatched.cmp(&s1.unmatched);
    if tail.is_ne() {
        return tail;
    }
    (0..len)
        .rev()
        .map(|i| rank_slot(s2, i).cmp(&rank_slot(s1, i)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(per_rank: &[u64], unmatched: u64) -> Signature {
        Signature {
            per_rank: per_rank.to_vec(),
            unmatched,
        }
    }

    #[test]
    fn parses_empty_list() {
        let inst = parse_instance("1 1\n1:\n").unwrap();
        assert_eq!(inst.n_applicants(), 1);
        assert!(inst.prefs(0).is_empty());
        assert_eq!(inst.max_rank(), 0);
    }

    #[test]
    fn rejects_duplicate_post() {
        let err = parse_instance("2 2\n1: 1 1\n2: 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_out_of_range_and_duplicate_applicant() {
        assert!(matches!(
            parse_instance("2 2\n1: 3\n2: 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_instance("2 2\n1: 1\n1: 2\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_instance("2\n1: 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_instance("2 2\n1: 1\n").is_err());
    }

    #[test]
    fn tolerates_comments_and_whitespace() {
        let inst = parse_instance("# hi\n  2   3 \n\n2:3  1\n  1 :  2\n").unwrap();
        assert_eq!(inst.prefs(0), &[1]);
        assert_eq!(inst.prefs(1), &[2, 0]);
    }

    #[test]
    fn matching_rejects_shared_endpoints() {
        assert!(Matching::new(vec![(0, 1), (0, 2)]).is_err());
        assert!(Matching::new(vec![(0, 1), (2, 1)]).is_err());
        let m = parse_matching("# m\n2 1\n1 3\n").unwrap();
        assert_eq!(m.pairs(), &[(0, 2), (1, 0)]);
        assert_eq!(m.partner_of(1), Some(0));
        assert_eq!(m.partner_of(3), None);
    }

    #[test]
    fn signature_of_empty_matching() {
        let inst = crate::fixtures::fix_a();
        let s = signature_of(&inst, &Matching::empty()).unwrap();
        assert_eq!(s, sig(&[0, 0, 0], 4));
    }

    #[test]
    fn signature_rejects_non_edge() {
        let inst = crate::fixtures::fix_a();
        let m = Matching::new(vec![(0, 3)]).unwrap();
        assert!(signature_of(&inst, &m).is_err());
    }

    #[test]
    fn rank_maximal_order() {
        assert_eq!(
            compare_rank_maximal(&sig(&[4, 0, 1, 2, 0], 0), &sig(&[3, 3, 0, 0, 1], 0)),
            Ordering::Greater
        );
        assert_eq!(
            compare_rank_maximal(&sig(&[2, 0], 0), &sig(&[1, 5], 0)),
            Ordering::Greater
        );
        let s = sig(&[1, 2, 3], 1);
        assert_eq!(compare_rank_maximal(&s, &s), Ordering::Equal);
        // unmatched slot is ignored
        assert_eq!(
            compare_rank_maximal(&sig(&[1, 1], 0), &sig(&[1, 1], 3)),
            Ordering::Equal
        );
    }

    #[test]
    fn fair_order() {
        assert_eq!(
            compare_fair(&sig(&[3, 3, 0, 0, 1], 0), &sig(&[4, 0, 1, 2, 0], 0)),
            Ordering::Less
        );
        let s = sig(&[1, 2, 3], 1);
        assert_eq!(compare_fair(&s, &s), Ordering::Equal);
        assert_eq!(
            compare_fair(&sig(&[5, 0], 0), &sig(&[5, 0], 1)),
            Ordering::Greater
        );
        // padding does not change the order
        assert_eq!(
            compare_fair(&sig(&[1, 1], 0), &sig(&[1, 1, 0, 0], 0)),
            Ordering::Equal
        );
    }
}
