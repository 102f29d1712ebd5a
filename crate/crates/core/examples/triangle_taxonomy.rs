//! Lower-adjacency triangles at (3,3,3) classified from the subspaces and
//! from the lower graph alone.
//!
//! cargo run --release --example triangle_taxonomy

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use symplectica::grassmann::{AdjacencyKind, GrassmannSpace, TriangleClassifier, TriangleMethod};
use symplectica::symplectic::SymplecticSpace;

fn main() {
    let s = SymplecticSpace::standard(3, 3).unwrap();
    let g = GrassmannSpace::new(&s, 3).unwrap();
    let lower = g.graph(AdjacencyKind::Lower);
    let c = TriangleClassifier::new(&g, &lower).unwrap();
    let mut rng = SplitMix64::seed_from_u64(1);
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    let mut disagreements = 0;
    let mut drawn = 0;
    while drawn < 200 {
        let a = rng.gen_range(0..g.len()) as u32;
        let nb = lower.neighbors(a as usize);
        let b = nb[rng.gen_range(0..nb.len())];
        let common = lower.common_neighbors(&[a, b]);
        if common.is_empty() {
            continue;
        }
        let t = [a, b, common[rng.gen_range(0..common.len())]];
        drawn += 1;
        let truth = c.classify(t, TriangleMethod::GroundTruth).unwrap();
        let seen = c.classify(t, TriangleMethod::AdjacencyOnly).unwrap();
        disagreements += (truth != seen) as usize;
        *tally.entry(format!("{truth:?}")).or_default() += 1;
    }
    println!("{drawn} lower triangles at (3,3,3)");
    for (class, count) in &tally {
        println!("  {class:<17} {count}");
    }
    println!("adjacency-only classification disagreed {disagreements} times");
}
