//! Adjacency-preserving maps: lifted similitudes and the duality U -> U^perp
//! preserve all three adjacencies, and the full automorphism group of the
//! middle level is twice the symplectic group.
//!
//! cargo run --release --example automorphisms

use symplectica::grassmann::{AdjacencyKind, GrassmannSpace};
use symplectica::reconstruct::{automorphism_count, is_automorphism, is_isomorphism, lift_kappa, lift_similitude};
use symplectica::symplectic::{sp_order, SymplecticSpace};

fn main() {
    let s = SymplecticSpace::standard(3, 2).unwrap();
    for k in 1..=3 {
        let g = GrassmannSpace::new(&s, k).unwrap();
        let graphs: Vec<_> = AdjacencyKind::ALL.iter().map(|&kind| g.graph(kind)).collect();
        let lifted_ok = (0..20u64).all(|seed| {
            let perm = lift_similitude(&g, &s.random_similitude(seed, false));
            graphs.iter().all(|gr| is_automorphism(gr, &perm))
        });
        let dual = GrassmannSpace::new(&s, s.n() - k).unwrap();
        let perm = lift_kappa(&g, &dual);
        let kappa_ok = AdjacencyKind::ALL
            .iter()
            .zip(&graphs)
            .all(|(&kind, gr)| is_isomorphism(gr, &dual.graph(kind.dual()), &perm));
        let count = automorphism_count(&graphs[0], 512).unwrap();
        println!(
            "k={k}: 20 similitudes preserve adjacency: {lifted_ok}; duality maps onto level {}: {kappa_ok}; |Aut| = {count}",
            s.n() - k
        );
    }
    println!("|Sp(4,3)| = {}", sp_order(2, 3));
}
