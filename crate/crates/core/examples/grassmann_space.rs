//! One Grassmann level: its points, pencils, stars and tops.
//!
//! cargo run --release --example grassmann_space -- 3 2 2

use std::collections::BTreeMap;

use symplectica::grassmann::GrassmannSpace;
use symplectica::symplectic::SymplecticSpace;

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let (p, m, k) = (args.first().copied().unwrap_or(3), args.get(1).copied().unwrap_or(2), args.get(2).copied().unwrap_or(2));
    let s = SymplecticSpace::standard(p as u32, m).unwrap();
    let g = GrassmannSpace::new(&s, k).unwrap();
    println!("(T-R)_{k} in F_{p}^{}: {} points", s.n(), g.len());

    let pencils = g.pencils();
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for pen in &pencils {
        *sizes.entry(pen.members.len()).or_default() += 1;
    }
    println!("{} pencils, by size: {sizes:?}", pencils.len());
    if let Some(pen) = pencils.first() {
        println!("first pencil: centre {:?}, carrier {:?}", pen.h.to_nested(), pen.b.to_nested());
        for &x in &pen.members {
            println!("  {:?}", g.point(x).to_nested());
        }
    }

    let star_sizes: BTreeMap<usize, usize> = (0..g.star_centres().len()).fold(BTreeMap::new(), |mut acc, i| {
        *acc.entry(g.star_members(i).len()).or_default() += 1;
        acc
    });
    let top_sizes: BTreeMap<usize, usize> = (0..g.top_carriers().len()).fold(BTreeMap::new(), |mut acc, j| {
        *acc.entry(g.top_members(j).len()).or_default() += 1;
        acc
    });
    println!("stars: {} with sizes {star_sizes:?}", g.star_centres().len());
    println!("tops: {} with sizes {top_sizes:?}", g.top_carriers().len());
}
