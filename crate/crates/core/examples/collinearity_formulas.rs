//! Ternary collinearity recovered from adjacency, compared with pencil
//! membership. The collinearity formula is exact at (3,3,3) but rejects
//! every collinear triple on a copolar level such as (3,2,3); the lower
//! formula needs 1 < k < n-1.
//!
//! cargo run --release --example collinearity_formulas

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use symplectica::grassmann::{AdjacencyKind, GrassmannSpace, TriangleClassifier};
use symplectica::reconstruct::{collinear_from_adjacency, collinear_from_lower};
use symplectica::symplectic::SymplecticSpace;

fn main() {
    let small = GrassmannSpace::new(&SymplecticSpace::standard(3, 2).unwrap(), 3).unwrap();
    let coll = small.graph(AdjacencyKind::Collinear);
    let n = small.len() as u32;
    let (mut total, mut wrong) = (0, 0);
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                total += 1;
                wrong += (collinear_from_adjacency(&coll, a, b, c) != small.collinear(a, b, c)) as u32;
            }
        }
    }
    println!("(3,2,3): {wrong} of {total} triples disagree");

    let s = SymplecticSpace::standard(3, 3).unwrap();
    let g = GrassmannSpace::new(&s, 3).unwrap();
    let coll = g.graph(AdjacencyKind::Collinear);
    let lower = g.graph(AdjacencyKind::Lower);
    let classifier = TriangleClassifier::new(&g, &lower).unwrap();
    let pencils = g.pencils();
    let mut rng = SplitMix64::seed_from_u64(7);
    let (mut adj_wrong, mut low_wrong, mut collinear) = (0, 0, 0);
    let samples = 40;
    for i in 0..samples {
        // alternate triples on a pencil with triples through a common neighbour
        let t = if i % 2 == 0 {
            let pen = &pencils[rng.gen_range(0..pencils.len())];
            let pick = |r: &mut SplitMix64| pen.members[r.gen_range(0..pen.members.len())];
            [pick(&mut rng), pick(&mut rng), pick(&mut rng)]
        } else {
            let a = rng.gen_range(0..g.len()) as u32;
            let nb = coll.neighbors(a as usize);
            let b = nb[rng.gen_range(0..nb.len())];
            let common = coll.common_neighbors(&[a, b]);
            [a, b, common[rng.gen_range(0..common.len())]]
        };
        if t[0] == t[1] {
            continue;
        }
        let truth = g.collinear(t[0], t[1], t[2]);
        collinear += truth as u32;
        adj_wrong += (collinear_from_adjacency(&coll, t[0], t[1], t[2]) != truth) as u32;
        low_wrong += (collinear_from_lower(&classifier, t[0], t[1], t[2]) != truth) as u32;
    }
    println!("(3,3,3): {samples} sampled triples, {collinear} collinear");
    println!("  collinearity formula disagreements: {adj_wrong}");
    println!("  lower formula disagreements: {low_wrong}");
}
