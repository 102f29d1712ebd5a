//! Subspace census of a symplectic space: for every dimension k, how many
//! subspaces are isotropic, regular, tangential, and in (T-R)_k.
//!
//! cargo run --release --example census -- 3 2

use symplectica::algebra::{all_subspaces, gaussian_binomial};
use symplectica::symplectic::SymplecticSpace;

fn main() {
    let args: Vec<u32> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let (p, m) = (args.first().copied().unwrap_or(3), args.get(1).copied().unwrap_or(2) as usize);
    let s = SymplecticSpace::standard(p, m).expect("odd prime p and m >= 1");
    let n = s.n();
    println!("F_{p}^{n}, Witt index {m}");
    println!("gram matrix:");
    for row in s.gram().to_nested() {
        println!("  {row:?}");
    }
    println!("{:>3} {:>8} {:>8} {:>8} {:>8} {:>8}", "k", "all", "isotr.", "regular", "tang.", "T-R");
    for k in 0..=n {
        let all = all_subspaces(s.field(), n, k);
        assert_eq!(all.len() as u128, gaussian_binomial(n, k, p as u64));
        let rd: Vec<usize> = all.iter().map(|u| s.rdim(u)).collect();
        let count = |f: &dyn Fn(usize) -> bool| rd.iter().filter(|&&r| f(r)).count();
        println!(
            "{k:>3} {:>8} {:>8} {:>8} {:>8} {:>8}",
            all.len(),
            count(&|r| r == k),
            count(&|r| r == 0),
            count(&|r| r == 1),
            count(&|r| r <= 1)
        );
    }
}
