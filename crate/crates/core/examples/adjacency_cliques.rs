//! The three adjacencies of an even level coincide, and the maximal cliques
//! of collinearity are exactly the stars and tops.
//!
//! cargo run --release --example adjacency_cliques

use symplectica::graph::{maximal_cliques, DEFAULT_CLIQUE_BUDGET};
use symplectica::grassmann::{AdjacencyKind, GrassmannSpace};
use symplectica::symplectic::SymplecticSpace;

fn main() {
    let s = SymplecticSpace::standard(3, 2).unwrap();
    for k in 1..=3 {
        let g = GrassmannSpace::new(&s, k).unwrap();
        let edges: Vec<usize> = AdjacencyKind::ALL.iter().map(|&kind| g.graph(kind).edge_count()).collect();
        println!("k={k}: {} points, edges (collinear, lower, upper) = {edges:?}", g.len());
    }

    let g = GrassmannSpace::new(&s, 2).unwrap();
    let coll = g.graph(AdjacencyKind::Collinear);
    let same = AdjacencyKind::ALL.iter().all(|&kind| g.graph(kind).graph == coll.graph);
    println!("k=2: all three adjacencies equal: {same}");

    let cliques = maximal_cliques(&coll, DEFAULT_CLIQUE_BUDGET).unwrap();
    let mut structures: Vec<Vec<u32>> = (0..g.star_centres().len())
        .map(|i| g.star_members(i).to_vec())
        .chain((0..g.top_carriers().len()).map(|j| g.top_members(j).to_vec()))
        .collect();
    structures.sort();
    println!(
        "{} maximal cliques of sizes {:?}; equal to the {} stars and {} tops: {}",
        cliques.len(),
        cliques.iter().map(Vec::len).collect::<std::collections::BTreeSet<_>>(),
        g.star_centres().len(),
        g.top_carriers().len(),
        cliques == structures
    );
}
