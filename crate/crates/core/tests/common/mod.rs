#![allow(dead_code)]

use prefmatch::Instance;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// Instances with `1..=max_a` applicants over `1..=max_p` posts.
pub fn instances(max_a: usize, max_p: usize) -> impl Strategy<Value = Instance> {
    (1..=max_a, 1..=max_p)
        .prop_flat_map(|(na, np)| {
            let list = Just((0..np).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_flat_map(move |perm| (Just(perm), 0..=np))
                .prop_map(|(perm, len)| perm[..len].to_vec());
            (Just(np), prop::collection::vec(list, na))
        })
        .prop_map(|(np, prefs)| Instance::new(np, prefs).unwrap())
}

/// A random instance with list density drawn per applicant.
pub fn random_instance<R: Rng>(rng: &mut R, na: usize, np: usize) -> Instance {
    let density: f64 = rng.gen_range(0.1..=1.0);
    let prefs = (0..na)
        .map(|_| {
            let mut posts: Vec<usize> = (0..np).filter(|_| rng.gen_bool(density)).collect();
            posts.shuffle(rng);
            posts
        })
        .collect();
    Instance::new(np, prefs).unwrap()
}
