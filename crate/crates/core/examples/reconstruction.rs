//! Recovers the projective space and its orthogonality from the bare
//! collinearity graph of one level, then compares with the true geometry.
//!
//! cargo run --release --example reconstruction -- 3 3 2

use std::time::Instant;

use symplectica::reconstruct::full_pipeline;
use symplectica::symplectic::SymplecticSpace;

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let (p, m, k) = (args.first().copied().unwrap_or(3), args.get(1).copied().unwrap_or(2), args.get(2).copied().unwrap_or(1));
    let s = SymplecticSpace::standard(p as u32, m).unwrap();
    let start = Instant::now();
    match full_pipeline(&s, k, 100_000) {
        Ok(out) => {
            let r = &out.report;
            for l in &r.levels {
                println!(
                    "level k={}: {} points, {} edges, {} stars, {} tops recovered",
                    l.k, l.points, l.edges, l.stars, l.tops
                );
            }
            println!(
                "recovered {} points, {} lines ({} copolar, {} isotropic), {} orthogonal pairs",
                r.recovered_points, r.recovered_lines, r.copolar_lines, r.isotropic_lines, r.orthogonal_pairs
            );
            println!("matches the original geometry: {} ({:.1} s)", r.matches, start.elapsed().as_secs_f64());
            for mm in &r.mismatches {
                println!("  mismatch: {mm}");
            }
        }
        Err(e) => println!("refused: {e}"),
    }
}
