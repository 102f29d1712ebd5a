//! Order of the automorphism group of a small graph by partition refinement
//! and backtracking.
//!
//! The order is the product of the orbit lengths along a base: for each base
//! point the search tries every vertex of its refined cell and keeps the
//! ones reachable by an automorphism fixing the earlier base points.
//! Automorphisms found deeper down are reused as generators, so most
//! targets are settled by an orbit computation instead of a search.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;

use crate::graph::{BudgetExceeded, Graph};

/// Default vertex budget for automorphism counting.
pub const DEFAULT_AUTOMORPHISM_BUDGET: usize = 512;

type Partition = Vec<Vec<u32>>;

struct Refined {
    cells: Partition,
    trace: u64,
}

struct Search<'a> {
    g: &'a Graph,
    n: usize,
}

impl Search<'_> {
    /// Colour refinement to the coarsest equitable partition finer than
    /// `cells`. Split cells keep their position and are ordered by neighbour
    /// signature, so the result and its trace are isomorphism invariant.
    fn refine(&self, mut cells: Partition) -> Refined {
        let mut hasher = DefaultHasher::new();
        let mut cell_of = vec![0u32; self.n];
        loop {
            for (ci, c) in cells.iter().enumerate() {
                for &v in c {
                    cell_of[v as usize] = ci as u32;
                }
            }
            let mut next: Partition = Vec::with_capacity(cells.len());
            for (ci, c) in cells.iter().enumerate() {
                if c.len() == 1 {
                    next.push(c.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<(u32, u32)>, u32)> = c
                    .iter()
                    .map(|&v| {
                        let mut sig: Vec<u32> = self.g.neighbors(v as usize).iter().map(|&w| cell_of[w as usize]).collect();
                        sig.sort_unstable();
                        let mut packed: Vec<(u32, u32)> = Vec::new();
                        for x in sig {
                            match packed.last_mut() {
                                Some((c, m)) if *c == x => *m += 1,
                                _ => packed.push((x, 1)),
                            }
                        }
                        (packed, v)
                    })
                    .collect();
                keyed.sort_unstable();
                for group in keyed.chunk_by(|a, b| a.0 == b.0) {
                    (ci, group.len(), &group[0].0).hash(&mut hasher);
                    next.push(group.iter().map(|x| x.1).collect());
                }
            }
            let stable = next.len() == cells.len();
            cells = next;
            if stable {
                break;
            }
        }
        cells.iter().map(Vec::len).collect::<Vec<_>>().hash(&mut hasher);
        Refined { cells, trace: hasher.finish() }
    }

    fn individualize(cells: &Partition, v: u32) -> Partition {
        let mut out = Vec::with_capacity(cells.len() + 1);
        for c in cells {
            if c.len() > 1 && c.contains(&v) {
                out.push(vec![v]);
                out.push(c.iter().copied().filter(|&w| w != v).collect());
            } else {
                out.push(c.clone());
            }
        }
        out
    }

    fn is_automorphism(&self, perm: &[u32]) -> bool {
        (0..self.n).all(|v| {
            let pv = perm[v] as usize;
            self.g.degree(v) == self.g.degree(pv)
                && self.g.neighbors(v).iter().all(|&w| self.g.has_edge(pv, perm[w as usize] as usize))
        })
    }

    /// Looks for an automorphism mapping the ordered partition `left` onto
    /// `right` cell by cell.
    fn find(&self, left: &Refined, right: &Refined) -> Option<Vec<u32>> {
        if left.trace != right.trace || left.cells.len() != right.cells.len() {
            return None;
        }
        let Some(ci) = left.cells.iter().position(|c| c.len() > 1) else {
            let mut perm = vec![0u32; self.n];
            for (a, b) in left.cells.iter().zip(&right.cells) {
                perm[a[0] as usize] = b[0];
            }
            return self.is_automorphism(&perm).then_some(perm);
        };
        let x = left.cells[ci][0];
        let l2 = self.refine(Self::individualize(&left.cells, x));
        for &y in &right.cells[ci] {
            let r2 = self.refine(Self::individualize(&right.cells, y));
            if let Some(p) = self.find(&l2, &r2) {
                return Some(p);
            }
        }
        None
    }
}

fn orbit(start: u32, gens: &[Vec<u32>], n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[start as usize] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for g in gens {
            let w = g[v as usize];
            if !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Exact order of the automorphism group of `g`.
pub fn automorphism_count(g: &Graph, budget: usize) -> Result<BigUint, BudgetExceeded> {
    let n = g.vertex_count();
    if n > budget {
        return Err(BudgetExceeded { vertices: n, budget });
    }
    let mut order = BigUint::from(1u32);
    if n == 0 {
        return Ok(order);
    }
    let search = Search { g, n };
    let mut levels = vec![search.refine(vec![(0..n as u32).collect()])];
    let mut base: Vec<(u32, usize)> = Vec::new();
    while let Some(ci) = levels.last().unwrap().cells.iter().position(|c| c.len() > 1) {
        let last = levels.last().unwrap();
        let b = last.cells[ci][0];
        let next = search.refine(Search::individualize(&last.cells, b));
        base.push((b, ci));
        levels.push(next);
    }
    let mut gens: Vec<Vec<u32>> = Vec::new();
    for i in (0..base.len()).rev() {
        let (b, ci) = base[i];
        let mut reach = orbit(b, &gens, n);
        for &t in &levels[i].cells[ci] {
            if reach[t as usize] {
                continue;
            }
            let right = search.refine(Search::individualize(&levels[i].cells, t));
            if let Some(perm) = search.find(&levels[i + 1], &right) {
                gens.push(perm);
                reach = orbit(b, &gens, n);
            }
        }
        order *= reach.iter().filter(|&&x| x).count();
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i as u32, ((i + 1) % n) as u32)).collect();
        Graph::from_edges(n, &edges)
    }

    #[test]
    fn small_groups() {
        assert_eq!(automorphism_count(&Graph::complete(5), 10).unwrap(), BigUint::from(120u32));
        assert_eq!(automorphism_count(&cycle(5), 10).unwrap(), BigUint::from(10u32));
        assert_eq!(automorphism_count(&cycle(6), 10).unwrap(), BigUint::from(12u32));
        // path on 4 vertices
        let path = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(automorphism_count(&path, 10).unwrap(), BigUint::from(2u32));
        // empty graph on 4 vertices
        assert_eq!(automorphism_count(&Graph::from_lists(vec![vec![]; 4]), 10).unwrap(), BigUint::from(24u32));
        assert!(automorphism_count(&cycle(5), 4).is_err());
    }

    #[test]
    fn petersen_graph() {
        let mut edges = Vec::new();
        for i in 0..5u32 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        let g = Graph::from_edges(10, &edges);
        assert_eq!(automorphism_count(&g, 10).unwrap(), BigUint::from(120u32));
    }

    #[test]
    fn disjoint_triangles() {
        // two disjoint triangles: (3!)^2 * 2 = 72
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        assert_eq!(automorphism_count(&g, 10).unwrap(), BigUint::from(72u32));
    }
}
