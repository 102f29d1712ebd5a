//! Simple undirected graphs in compressed adjacency form, plus the generic
//! searches used on them: components, distances, common neighbours and
//! maximal cliques.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("graph has {vertices} vertices, above the budget of {budget}")]
pub struct BudgetExceeded {
    pub vertices: usize,
    pub budget: usize,
}

/// Default vertex budget for maximal clique enumeration.
pub const DEFAULT_CLIQUE_BUDGET: usize = 5000;

/// Irreflexive symmetric graph on vertices `0..n`, stored as sorted
/// neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Graph {
    /// Builds a graph from per-vertex neighbour lists. Lists are sorted and
    /// deduplicated; loops are dropped. The caller provides both directions.
    pub fn from_lists(mut lists: Vec<Vec<u32>>) -> Self {
        lists.par_iter_mut().enumerate().for_each(|(v, l)| {
            l.sort_unstable();
            l.dedup();
            l.retain(|&w| w as usize != v);
        });
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut total = 0;
        for l in &lists {
            total += l.len();
            offsets.push(total);
        }
        let mut targets = Vec::with_capacity(total);
        for l in lists {
            targets.extend(l);
        }
        Graph { offsets, targets }
    }

    /// Builds a graph from an undirected edge list.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut lists = vec![Vec::new(); n];
        for &(a, b) in edges {
            lists[a as usize].push(b);
            lists[b as usize].push(a);
        }
        Self::from_lists(lists)
    }

    pub fn complete(n: usize) -> Self {
        let lists = (0..n).map(|v| (0..n as u32).filter(|&w| w as usize != v).collect()).collect();
        Self::from_lists(lists)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.vertex_count()).flat_map(move |v| {
            self.neighbors(v).iter().filter(move |&&w| w as usize > v).map(move |&w| (v as u32, w))
        })
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.vertex_count()).all(|v| self.neighbors(v).iter().all(|&w| w as usize != v && self.has_edge(w as usize, v)))
    }

    /// Edge-set intersection of two graphs on the same vertex set.
    pub fn intersection(&self, other: &Graph) -> Graph {
        assert_eq!(self.vertex_count(), other.vertex_count());
        let lists = (0..self.vertex_count())
            .into_par_iter()
            .map(|v| intersect_sorted(self.neighbors(v), other.neighbors(v)))
            .collect();
        Graph::from_lists(lists)
    }

    /// Vertices adjacent to every seed; seeds themselves never appear.
    pub fn common_neighbors(&self, seeds: &[u32]) -> Vec<u32> {
        let Some((&first, rest)) = seeds.split_first() else {
            return Vec::new();
        };
        let mut acc = self.neighbors(first as usize).to_vec();
        for &s in rest {
            acc = intersect_sorted(&acc, self.neighbors(s as usize));
        }
        acc.retain(|v| !seeds.contains(v));
        acc
    }

    /// Connected components, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s as u32];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                        queue.push_back(w as usize);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() <= 1 || self.components().len() == 1
    }

    /// Breadth-first distances from `s`; `None` for unreachable vertices.
    pub fn distances(&self, s: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in self.neighbors(v) {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(d + 1);
                    queue.push_back(w as usize);
                }
            }
        }
        dist
    }

    /// Largest distance between two vertices, `None` if disconnected.
    pub fn diameter(&self) -> Option<u32> {
        (0..self.vertex_count())
            .into_par_iter()
            .map(|s| self.distances(s).into_iter().try_fold(0, |m, d| d.map(|d| m.max(d))))
            .try_reduce(|| 0, |a, b| Some(a.max(b)))
    }

    /// Adjacency rows as bitsets.
    pub fn bit_rows(&self) -> Vec<FixedBitSet> {
        let n = self.vertex_count();
        (0..n)
            .into_par_iter()
            .map(|v| {
                let mut row = FixedBitSet::with_capacity(n);
                for &w in self.neighbors(v) {
                    row.insert(w as usize);
                }
                row
            })
            .collect()
    }

    /// True iff the given vertices are pairwise adjacent.
    pub fn is_clique(&self, vs: &[u32]) -> bool {
        vs.iter().enumerate().all(|(i, &a)| vs[i + 1..].iter().all(|&b| self.has_edge(a as usize, b as usize)))
    }

    /// Subgraph induced on `vs`, relabelled `0..vs.len()` in the given order.
    pub fn induced(&self, vs: &[u32]) -> Graph {
        let mut pos = std::collections::HashMap::with_capacity(vs.len());
        for (i, &v) in vs.iter().enumerate() {
            pos.insert(v, i as u32);
        }
        let lists = vs
            .iter()
            .map(|&v| self.neighbors(v as usize).iter().filter_map(|w| pos.get(w).copied()).collect())
            .collect();
        Graph::from_lists(lists)
    }
}

pub fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// All maximal cliques, each sorted, the list sorted.
///
/// Bron–Kerbosch with pivoting, run once per vertex `v` on the subgraph
/// induced by its neighbourhood with later neighbours as candidates and
/// earlier ones excluded, so each clique is reported from its least vertex.
pub fn maximal_cliques(g: &Graph, budget: usize) -> Result<Vec<Vec<u32>>, BudgetExceeded> {
    let n = g.vertex_count();
    if n > budget {
        return Err(BudgetExceeded { vertices: n, budget });
    }
    let mut out: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|v| cliques_from(g, v))
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn cliques_from(g: &Graph, v: usize) -> Vec<Vec<u32>> {
    let nbrs = g.neighbors(v);
    let d = nbrs.len();
    let rows: Vec<FixedBitSet> = nbrs
        .iter()
        .map(|&a| {
            let mut row = FixedBitSet::with_capacity(d);
            let common = intersect_sorted(g.neighbors(a as usize), nbrs);
            for c in common {
                row.insert(nbrs.binary_search(&c).unwrap());
            }
            row
        })
        .collect();
    let mut p = FixedBitSet::with_capacity(d);
    let mut x = FixedBitSet::with_capacity(d);
    for (i, &w) in nbrs.iter().enumerate() {
        if (w as usize) > v {
            p.insert(i);
        } else {
            x.insert(i);
        }
    }
    let mut out = Vec::new();
    let mut r = Vec::new();
    bron_kerbosch(&rows, &mut r, p, x, &mut |clique: &[usize]| {
        let mut c: Vec<u32> = clique.iter().map(|&i| nbrs[i]).collect();
        c.push(v as u32);
        c.sort_unstable();
        out.push(c);
    });
    out
}

fn bron_kerbosch(
    rows: &[FixedBitSet],
    r: &mut Vec<usize>,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    emit: &mut dyn FnMut(&[usize]),
) {
    if p.is_clear() {
        if x.is_clear() {
            emit(r);
        }
        return;
    }
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| (p.intersection_count(&rows[u]), std::cmp::Reverse(u)))
        .unwrap();
    let mut cand = p.clone();
    cand.difference_with(&rows[pivot]);
    for w in cand.ones() {
        let mut p2 = p.clone();
        p2.intersect_with(&rows[w]);
        let mut x2 = x.clone();
        x2.intersect_with(&rows[w]);
        r.push(w);
        bron_kerbosch(rows, r, p2, x2, emit);
        r.pop();
        p.set(w, false);
        x.insert(w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i as u32, ((i + 1) % n) as u32)).collect();
        Graph::from_edges(n, &edges)
    }

    #[test]
    fn cliques_of_small_graphs() {
        assert_eq!(maximal_cliques(&Graph::complete(5), 10).unwrap(), vec![vec![0, 1, 2, 3, 4]]);
        let c5 = cycle(5);
        let cl = maximal_cliques(&c5, 10).unwrap();
        assert_eq!(cl.len(), 5);
        assert!(cl.iter().all(|c| c.len() == 2));
        let empty = Graph::from_lists(vec![vec![]; 3]);
        assert_eq!(maximal_cliques(&empty, 10).unwrap(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(maximal_cliques(&c5, 4), Err(BudgetExceeded { vertices: 5, budget: 4 }));
    }

    #[test]
    fn distances_and_components() {
        let c6 = cycle(6);
        assert_eq!(c6.diameter(), Some(3));
        assert!(c6.is_connected());
        let two = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        assert_eq!(two.components(), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(two.diameter(), None);
        assert_eq!(c6.common_neighbors(&[0, 2]), vec![1]);
        assert_eq!(c6.common_neighbors(&[0]), vec![1, 5]);
    }

    fn brute_force_cliques(g: &Graph) -> Vec<Vec<u32>> {
        let n = g.vertex_count();
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            let vs: Vec<u32> = (0..n as u32).filter(|&i| mask >> i & 1 == 1).collect();
            if !g.is_clique(&vs) {
                continue;
            }
            let maximal = (0..n as u32).filter(|v| !vs.contains(v)).all(|v| vs.iter().any(|&u| !g.has_edge(u as usize, v as usize)));
            if maximal {
                out.push(vs);
            }
        }
        out.sort();
        out
    }

    proptest! {
        #[test]
        fn cliques_match_brute_force(bits in proptest::collection::vec(any::<bool>(), 45)) {
            let n = 10;
            let mut edges = Vec::new();
            let mut t = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[t] { edges.push((i as u32, j as u32)); }
                    t += 1;
                    if t == bits.len() { t = 0; }
                }
            }
            let g = Graph::from_edges(n, &edges);
            prop_assert!(g.is_symmetric());
            prop_assert_eq!(maximal_cliques(&g, 100).unwrap(), brute_force_cliques(&g));
        }
    }
}
