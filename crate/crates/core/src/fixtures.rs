//! Small hand-built instances with known optima.

use crate::instance::{parse_instance, Instance, Matching};

/// 4×4 instance on which every AUPCR maximizer has cardinality 3 while a
/// maximum matching has cardinality 4.
pub const FIX_A: &str = include_str!("../tests/data/fix_a.txt");

/// 6×6 instance with AUPCR maximizers of cardinality 5 and 6 (AUPCR 30/36).
pub const FIX_B: &str = include_str!("../tests/data/fix_b.txt");

/// 7×7 instance where the fair matching beats the AUPCR maximizer on rank-maximality.
pub const FIX_C: &str = include_str!("../tests/data/fix_c.txt");

pub fn fix_a() -> Instance {
    parse_instance(FIX_A).expect("fixture A parses")
}

pub fn fix_b() -> Instance {
    parse_instance(FIX_B).expect("fixture B parses")
}

pub fn fix_c() -> Instance {
    parse_instance(FIX_C).expect("fixture C parses")
}

/// The fair matching of fixture C with signature (4,0,1,2,0):
/// a1-b1, a2-b2, a3-b3, a7-b7 at rank 1, a4-b4 at rank 3, a5-b5 and a6-b6 at rank 4.
pub fn fix_c_fair_matching() -> Matching {
    Matching::new(vec![(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (6, 6)])
        .expect("valid matching")
}
