//! Structure recovered from adjacency alone: collinearity formulas, triangle
//! spans and their closures, stars and tops, the level-by-level descent to
//! the copolar space and the projective space with its polarity, and the
//! lifting of similitudes to vertex permutations.
//!
//! Every decision procedure here receives only graphs, point-id sets and the
//! numeric parameters (p, n, k). Subspaces are carried alongside by
//! [`full_pipeline`] for the final comparison and are never consulted on the
//! way down.

use std::collections::{HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Subspace;
use crate::graph::{intersect_sorted, maximal_cliques, BudgetExceeded, Graph};
use crate::grassmann::{enumerate_subspaces, AdjacencyKind, GrassmannError, GrassmannSpace, TriangleClassifier};
use crate::symplectic::{Similitude, SymplecticSpace};

pub use crate::automorphism::{automorphism_count, DEFAULT_AUTOMORPHISM_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("not a partial linear space: {0}")]
    NotPartialLinear(String),
    #[error("degenerate triangle {0:?}")]
    DegenerateTriangle([u32; 3]),
    #[error(
        "k = {k} is the middle level of n = {n}: stars and tops have equal size and adjacency-preserving maps \
         may be a composition of the duality U -> U^perp with a collineation, so the level cannot be descended"
    )]
    MiddleLevel { k: usize, n: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Ternary collinearity from the collinearity graph alone.
///
/// L(U1,U2,U3) holds iff U1 ~ U2 and there are distinct W1, W2, both
/// adjacent to U1 and U2 and not adjacent to each other, such that all
/// distinct common neighbours of U1, U2, W1, W2 are pairwise adjacent and
/// U3 is one of them. The case U3 ∈ {U1, U2} is collinear by definition.
///
/// The outer quantifier ranges over common neighbours of U1, U2 and the
/// inner one over common neighbours of U1, U2, W1, W2; the formula's own
/// antecedents force these memberships.
pub fn collinear_from_adjacency(g: &Graph, u1: u32, u2: u32, u3: u32) -> bool {
    if u1 == u2 || !g.has_edge(u1 as usize, u2 as usize) {
        return false;
    }
    if u3 == u1 || u3 == u2 {
        return true;
    }
    let c = g.common_neighbors(&[u1, u2]);
    if c.binary_search(&u3).is_err() {
        return false;
    }
    let near: Vec<u32> = c.iter().copied().filter(|&w| w != u3 && g.has_edge(u3 as usize, w as usize)).collect();
    for (i, &w1) in near.iter().enumerate() {
        for &w2 in &near[i + 1..] {
            if g.has_edge(w1 as usize, w2 as usize) {
                continue;
            }
            let x = g.common_neighbors(&[u1, u2, w1, w2]);
            if g.is_clique(&x) {
                return true;
            }
        }
    }
    false
}

/// Ternary collinearity from the lower adjacency alone. The
/// triple is collinear iff the common lower neighbourhood of U1, U2, U3
/// contains both an S-triangle and a T-triangle.
pub fn collinear_from_lower(c: &TriangleClassifier<'_>, u1: u32, u2: u32, u3: u32) -> bool {
    let mut seeds = vec![u1, u2, u3];
    seeds.sort_unstable();
    seeds.dedup();
    let x = c.common(&seeds);
    let (mut found_s, mut found_t) = (false, false);
    for w in c.triangles_in(&x) {
        let xw = c.common(&w);
        if c.is_clique(&xw) {
            found_s = true;
        } else if !found_t && !c.nonadjacency_transitive(&xw) && !c.contains_s_triangle(&xw) {
            found_t = true;
        }
        if found_s && found_t {
            return true;
        }
    }
    false
}

/// Points and lines, two points sharing at most one line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialLinearSpace {
    point_count: usize,
    lines: Vec<Vec<u32>>,
    point_lines: Vec<Vec<u32>>,
    collinearity: Graph,
}

impl PartialLinearSpace {
    pub fn new(point_count: usize, lines: Vec<Vec<u32>>) -> Result<Self, ReconstructError> {
        let mut lines: Vec<Vec<u32>> = lines
            .into_iter()
            .map(|mut l| {
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        lines.sort_unstable();
        lines.dedup();
        let mut point_lines = vec![Vec::new(); point_count];
        let mut adj = vec![Vec::new(); point_count];
        for (i, l) in lines.iter().enumerate() {
            if l.len() < 2 {
                return Err(ReconstructError::NotPartialLinear(format!("line {i} has fewer than two points")));
            }
            for &a in l {
                if a as usize >= point_count {
                    return Err(ReconstructError::NotPartialLinear(format!("point {a} out of range")));
                }
                point_lines[a as usize].push(i as u32);
                adj[a as usize].extend(l.iter().copied().filter(|&b| b != a));
            }
        }
        for (a, list) in adj.iter_mut().enumerate() {
            let before = list.len();
            list.sort_unstable();
            list.dedup();
            if list.len() != before {
                return Err(ReconstructError::NotPartialLinear(format!("point {a} shares two lines with another point")));
            }
        }
        let collinearity = Graph::from_lists(adj);
        Ok(PartialLinearSpace { point_count, lines, point_lines, collinearity })
    }

    /// The Grassmann space itself: points of the level and its pencils.
    pub fn from_grassmann(g: &GrassmannSpace) -> Self {
        let lines = g.pencils().into_iter().map(|p| p.members).collect();
        Self::new(g.len(), lines).expect("pencils form a partial linear space")
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn lines(&self) -> &[Vec<u32>] {
        &self.lines
    }

    pub fn lines_through(&self, a: u32) -> &[u32] {
        &self.point_lines[a as usize]
    }

    pub fn collinearity(&self) -> &Graph {
        &self.collinearity
    }

    #[inline]
    pub fn collinear(&self, a: u32, b: u32) -> bool {
        self.collinearity.has_edge(a as usize, b as usize)
    }

    pub fn line_through(&self, a: u32, b: u32) -> Option<u32> {
        if a == b {
            return None;
        }
        self.point_lines[a as usize].iter().copied().find(|&l| self.lines[l as usize].binary_search(&b).is_ok())
    }

    /// Pairwise collinear, and not all on one line.
    pub fn is_triangle(&self, t: [u32; 3]) -> bool {
        let [a, b, c] = t;
        self.collinear(a, b)
            && self.collinear(b, c)
            && self.collinear(a, c)
            && self.lines[self.line_through(a, b).unwrap() as usize].binary_search(&c).is_err()
    }

    /// All triangles a < b < c.
    pub fn triangles(&self) -> Vec<[u32; 3]> {
        let g = &self.collinearity;
        (0..self.point_count as u32)
            .into_par_iter()
            .flat_map_iter(|a| {
                let later: Vec<u32> = g.neighbors(a as usize).iter().copied().filter(|&b| b > a).collect();
                let mut out = Vec::new();
                for (i, &b) in later.iter().enumerate() {
                    for &c in &later[i + 1..] {
                        if self.is_triangle([a, b, c]) {
                            out.push([a, b, c]);
                        }
                    }
                }
                out
            })
            .collect()
    }

    /// Does line `m` share a point with line `l`?
    fn meets(&self, m: u32, l: u32) -> bool {
        m == l || !intersect_sorted(&self.lines[m as usize], &self.lines[l as usize]).is_empty()
    }
}

/// A plane recovered from a triangle: its points, and the point missing
/// from it when one can be identified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopolarPlane {
    pub span: Vec<u32>,
    pub hole: Option<u32>,
}

fn span_points(pls: &PartialLinearSpace, t: [u32; 3]) -> Result<Vec<u32>, ReconstructError> {
    if !pls.is_triangle(t) {
        return Err(ReconstructError::DegenerateTriangle(t));
    }
    let [a, b, c] = t;
    let sides = [pls.line_through(a, b).unwrap(), pls.line_through(b, c).unwrap(), pls.line_through(a, c).unwrap()];
    let mut out = FixedBitSet::with_capacity(pls.point_count);
    let mut tried = HashSet::new();
    for &side in &sides {
        for &y in &pls.lines[side as usize] {
            for &m in pls.lines_through(y) {
                if tried.insert(m) && sides.iter().all(|&s| pls.meets(m, s)) {
                    for &z in &pls.lines[m as usize] {
                        out.insert(z as usize);
                    }
                }
            }
        }
    }
    Ok(out.ones().map(|z| z as u32).collect())
}

/// The points on lines that meet all three sides of the triangle `t`.
/// `hole` is the unique point off the span collinear with none of it, if
/// there is exactly one.
pub fn triangle_span(pls: &PartialLinearSpace, t: [u32; 3]) -> Result<CopolarPlane, ReconstructError> {
    let span = span_points(pls, t)?;
    let inside: HashSet<u32> = span.iter().copied().collect();
    let mut holes = (0..pls.point_count as u32)
        .filter(|z| !inside.contains(z) && span.iter().all(|&x| !pls.collinear(*z, x)));
    let hole = match (holes.next(), holes.next()) {
        (Some(h), None) => Some(h),
        _ => None,
    };
    Ok(CopolarPlane { span, hole })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PlaneRelation {
    pub wedge: bool,
    pub diamond: bool,
}

/// Wedge: pairwise collinear a1..a4 with a3, a4 in both spans, a1 in the
/// first, a2 in the second, neither a1 nor a2 on the line a3a4.
/// Diamond: non-collinear a3, a4 in both spans and a1, a2 from the
/// respective spans with a1 ~ a2 and both collinear with a3 and a4.
pub fn plane_related(pls: &PartialLinearSpace, s1: &[u32], s2: &[u32]) -> PlaneRelation {
    let common = intersect_sorted(s1, s2);
    let mut rel = PlaneRelation::default();
    for (i, &a3) in common.iter().enumerate() {
        for &a4 in &common[i + 1..] {
            let collinear34 = pls.collinear(a3, a4);
            if collinear34 && rel.wedge || !collinear34 && rel.diamond {
                continue;
            }
            let line34 = if collinear34 { Some(&pls.lines[pls.line_through(a3, a4).unwrap() as usize]) } else { None };
            let ok = |x: u32| {
                x != a3
                    && x != a4
                    && pls.collinear(x, a3)
                    && pls.collinear(x, a4)
                    && line34.is_none_or(|l| l.binary_search(&x).is_err())
            };
            let c1: Vec<u32> = s1.iter().copied().filter(|&x| ok(x)).collect();
            let c2: Vec<u32> = s2.iter().copied().filter(|&x| ok(x)).collect();
            let found = c1.iter().any(|&a1| c2.iter().any(|&a2| pls.collinear(a1, a2)));
            if found {
                if collinear34 {
                    rel.wedge = true;
                } else {
                    rel.diamond = true;
                }
            }
            if rel.wedge && rel.diamond {
                return rel;
            }
        }
    }
    rel
}

/// The closure Δ̃: union of all spans reachable from the span of `t` through
/// wedge and diamond steps.
///
/// Candidate neighbours of a span S are spans of triangles built on two of
/// its points a3, a4 and a common neighbour x: the triangle a3 a4 x when
/// a3 ~ a4, or x a3 w with w on the line x a4 when a3, a4 are not collinear.
/// A triangle inside an already reached span is skipped, as its span is
/// that span. The search stops once every point is covered.
pub fn delta_closure(pls: &PartialLinearSpace, t: [u32; 3]) -> Result<Vec<u32>, ReconstructError> {
    let s0 = span_points(pls, t)?;
    let mut covering: Vec<Vec<u32>> = vec![Vec::new(); pls.point_count];
    let mut spans: Vec<Vec<u32>> = Vec::new();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut queue = VecDeque::new();
    let add = |s: Vec<u32>,
               spans: &mut Vec<Vec<u32>>,
               covering: &mut Vec<Vec<u32>>,
               seen: &mut HashSet<Vec<u32>>,
               queue: &mut VecDeque<usize>| {
        let id = spans.len() as u32;
        for &x in &s {
            covering[x as usize].push(id);
        }
        seen.insert(s.clone());
        spans.push(s);
        queue.push_back(id as usize);
    };
    add(s0, &mut spans, &mut covering, &mut seen, &mut queue);
    let g = pls.collinearity();
    while let Some(id) = queue.pop_front() {
        if covering.iter().all(|c| !c.is_empty()) {
            break;
        }
        let s = spans[id].clone();
        let mut candidates: Vec<[u32; 3]> = Vec::new();
        for (i, &a3) in s.iter().enumerate() {
            for &a4 in &s[i + 1..] {
                for x in g.common_neighbors(&[a3, a4]) {
                    if pls.collinear(a3, a4) {
                        candidates.push([a3, a4, x]);
                    } else {
                        let l = &pls.lines[pls.line_through(x, a4).unwrap() as usize];
                        for &w in l {
                            if w != x && w != a4 && pls.collinear(w, a3) {
                                candidates.push([x, a3, w]);
                            }
                        }
                    }
                }
            }
        }
        for tri in candidates {
            if !pls.is_triangle(tri) {
                continue;
            }
            let in_known = intersect_sorted(
                &intersect_sorted(&covering[tri[0] as usize], &covering[tri[1] as usize]),
                &covering[tri[2] as usize],
            );
            if !in_known.is_empty() {
                continue;
            }
            let s2 = span_points(pls, tri)?;
            if seen.contains(&s2) {
                continue;
            }
            let rel = plane_related(pls, &s, &s2);
            if rel.wedge || rel.diamond {
                add(s2, &mut spans, &mut covering, &mut seen, &mut queue);
            }
        }
    }
    let mut out: Vec<u32> = spans.into_iter().flatten().collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// The numeric shape of a Grassmann level: field size, ambient dimension,
/// level. These are the only facts about the geometry the recovery uses
/// beyond the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelShape {
    pub p: u32,
    pub n: usize,
    pub k: usize,
}

impl LevelShape {
    fn pow(&self, e: usize) -> usize {
        (self.p as usize).pow(e as u32)
    }

    fn projective(&self, dim: usize) -> usize {
        (self.pow(dim) - 1) / (self.p as usize - 1)
    }

    /// Expected (star size, top size).
    pub fn structure_sizes(&self) -> (usize, usize) {
        let (n, k) = (self.n, self.k);
        if k % 2 == 0 {
            (self.pow(n - k), self.pow(k))
        } else {
            (self.projective(n - k + 1), self.projective(k + 1))
        }
    }

    pub fn is_copolar(&self) -> bool {
        self.k == 1 || self.k + 1 == self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StructureTag {
    Star,
    Top,
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxStructure {
    pub members: Vec<u32>,
    pub tag: StructureTag,
}

fn tag_by_size(shape: &LevelShape, size: usize) -> StructureTag {
    let (star, top) = shape.structure_sizes();
    match (size == star, size == top) {
        (true, true) => StructureTag::Ambiguous,
        (true, false) => StructureTag::Star,
        (false, true) => StructureTag::Top,
        (false, false) => StructureTag::Ambiguous,
    }
}

/// Lines of a copolar level recovered from orthogonality: with x ⊥ y meaning
/// x = y or x, y not adjacent, the line through adjacent a, b is
/// {z : every q ⊥ a, b also satisfies q ⊥ z}.
pub fn copolar_lines(g: &Graph) -> PartialLinearSpace {
    let n = g.vertex_count();
    let perp = perp_rows(g);
    let lines: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let perp = &perp;
            g.neighbors(a).iter().filter(move |&&b| b as usize > a).map(move |&b| perp_line(perp, a, b as usize))
        })
        .collect();
    PartialLinearSpace::new(n, lines).expect("copolar lines form a partial linear space")
}

fn perp_rows(g: &Graph) -> Vec<FixedBitSet> {
    let mut rows = g.bit_rows();
    for (v, row) in rows.iter_mut().enumerate() {
        row.toggle_range(..);
        row.insert(v);
    }
    rows
}

fn perp_line(perp: &[FixedBitSet], a: usize, b: usize) -> Vec<u32> {
    let mut q = perp[a].clone();
    q.intersect_with(&perp[b]);
    (0..perp.len()).filter(|&z| q.is_subset(&perp[z])).map(|z| z as u32).collect()
}

/// Lines of a level recovered from its collinearity graph: the
/// orthogonality route on copolar levels (k = 1 or n-1), the adjacency formula
/// elsewhere at odd k.
pub fn lines_from_adjacency(g: &Graph, shape: &LevelShape) -> Result<PartialLinearSpace, ReconstructError> {
    if shape.is_copolar() {
        return Ok(copolar_lines(g));
    }
    if shape.k % 2 == 0 {
        return Err(ReconstructError::Unsupported("line recovery by the adjacency formula is used at odd levels only".into()));
    }
    let n = g.vertex_count();
    let lines: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            g.neighbors(a)
                .iter()
                .filter(move |&&b| b as usize > a)
                .map(move |&b| {
                    let mut line = vec![a as u32, b];
                    line.extend(
                        g.common_neighbors(&[a as u32, b])
                            .into_iter()
                            .filter(|&c| collinear_from_adjacency(g, a as u32, b, c)),
                    );
                    line
                })
                .collect::<Vec<_>>()
        })
        .collect();
    PartialLinearSpace::new(n, lines)
}

/// Maximal stars and tops of a level, from its collinearity graph.
///
/// Even k: the maximal cliques. Odd k: the Δ̃ closures of triangles, plus
/// the lines themselves on copolar levels (the stars of level n-1 and the
/// tops of level 1 are single lines). Tags come from sizes only.
pub fn recover_max_structures(g: &Graph, shape: &LevelShape, budget: usize) -> Result<Vec<MaxStructure>, ReconstructError> {
    let mut sets: Vec<Vec<u32>> = if shape.k % 2 == 0 {
        maximal_cliques(g, budget)?
    } else {
        let pls = lines_from_adjacency(g, shape)?;
        let mut found: Vec<Vec<u32>> = Vec::new();
        let mut member_of: Vec<Vec<u32>> = vec![Vec::new(); pls.point_count()];
        for t in pls.triangles() {
            let shared = intersect_sorted(
                &intersect_sorted(&member_of[t[0] as usize], &member_of[t[1] as usize]),
                &member_of[t[2] as usize],
            );
            if !shared.is_empty() {
                continue;
            }
            let closure = delta_closure(&pls, t)?;
            for &x in &closure {
                member_of[x as usize].push(found.len() as u32);
            }
            found.push(closure);
        }
        if shape.is_copolar() {
            found.extend(pls.lines().iter().cloned());
        }
        found
    };
    sets.sort_unstable();
    sets.dedup();
    Ok(sets
        .into_iter()
        .map(|members| {
            let tag = tag_by_size(shape, members.len());
            MaxStructure { members, tag }
        })
        .collect())
}

/// An abstract level: its shape and collinearity graph, nothing else.
#[derive(Debug, Clone)]
pub struct AbstractLevel {
    pub shape: LevelShape,
    pub graph: Graph,
}

/// One step of the descent (or ascent): the new level and, for each of its
/// points, the member set of the structure it came from.
#[derive(Debug, Clone)]
pub struct LevelStep {
    pub level: AbstractLevel,
    pub members: Vec<Vec<u32>>,
    pub stars: usize,
    pub tops: usize,
}

fn step(level: &AbstractLevel, budget: usize, down: bool) -> Result<LevelStep, ReconstructError> {
    let shape = level.shape;
    if 2 * shape.k == shape.n {
        return Err(ReconstructError::MiddleLevel { k: shape.k, n: shape.n });
    }
    let next_k = if down { shape.k - 1 } else { shape.k + 1 };
    let next_copolar = next_k == 1 || next_k + 1 == shape.n;
    if next_k % 2 == 1 && !next_copolar {
        return Err(ReconstructError::Unsupported(format!(
            "collinearity at odd intermediate level {next_k} would need reconstruction from a one-sided adjacency"
        )));
    }
    let structures = recover_max_structures(&level.graph, &shape, budget)?;
    if structures.iter().any(|s| s.tag == StructureTag::Ambiguous) {
        return Err(ReconstructError::MiddleLevel { k: shape.k, n: shape.n });
    }
    let want = if down { StructureTag::Star } else { StructureTag::Top };
    let stars = structures.iter().filter(|s| s.tag == StructureTag::Star).count();
    let tops = structures.len() - stars;
    let members: Vec<Vec<u32>> = structures.into_iter().filter(|s| s.tag == want).map(|s| s.members).collect();
    // Two stars meet iff their centres span a member (upper adjacency one
    // level down); two tops meet iff their carriers intersect in a member
    // (lower adjacency one level up). At even or copolar levels that is the
    // collinearity.
    let mut containing: Vec<Vec<u32>> = vec![Vec::new(); level.graph.vertex_count()];
    for (i, m) in members.iter().enumerate() {
        for &v in m {
            containing[v as usize].push(i as u32);
        }
    }
    let mut lists = vec![Vec::new(); members.len()];
    for c in &containing {
        for &a in c {
            lists[a as usize].extend(c.iter().copied());
        }
    }
    let graph = Graph::from_lists(lists);
    Ok(LevelStep {
        level: AbstractLevel { shape: LevelShape { k: next_k, ..shape }, graph },
        members,
        stars,
        tops,
    })
}

/// From level k to level k-1 through the stars.
pub fn descend(level: &AbstractLevel, budget: usize) -> Result<LevelStep, ReconstructError> {
    step(level, budget, true)
}

/// From level k to level k+1 through the tops.
pub fn ascend(level: &AbstractLevel, budget: usize) -> Result<LevelStep, ReconstructError> {
    step(level, budget, false)
}

/// Projective lines and orthogonality recovered from a copolar space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveredGeometry {
    pub point_count: usize,
    /// Copolar lines first, then the recovered isotropic lines; each sorted.
    pub lines: Vec<Vec<u32>>,
    pub copolar_line_count: usize,
    /// Distinct orthogonal pairs (non-collinear in the copolar space); every
    /// point is also orthogonal to itself.
    pub perp: Graph,
}

/// Adds to the copolar lines one isotropic line per non-collinear pair,
/// recovered as {z : every q ⊥ a, b also satisfies q ⊥ z}.
pub fn recover_projective(copolar: &PartialLinearSpace) -> RecoveredGeometry {
    let g = copolar.collinearity();
    let n = copolar.point_count();
    let perp = perp_rows(g);
    let mut covered: HashSet<(u32, u32)> = HashSet::new();
    let mut iso: Vec<Vec<u32>> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if perp[a].contains(b) && !covered.contains(&(a as u32, b as u32)) {
                let line = perp_line(&perp, a, b);
                for (i, &x) in line.iter().enumerate() {
                    for &y in &line[i + 1..] {
                        covered.insert((x, y));
                    }
                }
                iso.push(line);
            }
        }
    }
    iso.sort_unstable();
    let mut lines = copolar.lines().to_vec();
    let copolar_line_count = lines.len();
    lines.extend(iso);
    let perp_graph = Graph::from_lists(
        (0..n).map(|v| perp[v].ones().filter(|&w| w != v).map(|w| w as u32).collect()).collect(),
    );
    RecoveredGeometry { point_count: n, lines, copolar_line_count, perp: perp_graph }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub k: usize,
    pub points: usize,
    pub edges: usize,
    pub stars: usize,
    pub tops: usize,
}

/// Outcome of the end-to-end reconstruction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub p: u32,
    pub n: usize,
    pub k: usize,
    pub levels: Vec<LevelSummary>,
    pub recovered_points: usize,
    pub recovered_lines: usize,
    pub copolar_lines: usize,
    pub isotropic_lines: usize,
    pub orthogonal_pairs: usize,
    pub matches: bool,
    pub mismatches: Vec<String>,
}

/// Recovered geometry together with the subspace each recovered point came
/// from (used only for the final comparison).
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: PipelineReport,
    pub geometry: RecoveredGeometry,
    pub provenance: Vec<Subspace>,
}

/// Builds the collinearity graph of level k, walks stars down (k < n-k) or
/// tops up (k > n-k) to a copolar level, recovers the projective space with
/// its orthogonality, and compares the result with the true geometry.
pub fn full_pipeline(s: &SymplecticSpace, k: usize, budget: usize) -> Result<PipelineOutput, ReconstructError> {
    let n = s.n();
    if k == 0 || k >= n {
        return Err(GrassmannError::Level { k, max: n - 1 }.into());
    }
    if 2 * k == n {
        return Err(ReconstructError::MiddleLevel { k, n });
    }
    let f = s.field();
    let grass = GrassmannSpace::new(s, k)?;
    let graph = grass.graph(AdjacencyKind::Collinear).graph;
    let mut provenance: Vec<Subspace> = grass.points().to_vec();
    drop(grass);
    let mut level = AbstractLevel { shape: LevelShape { p: f.p() as u32, n, k }, graph };
    let mut levels = Vec::new();
    while !level.shape.is_copolar() {
        let down = 2 * level.shape.k < n;
        let next = if down { descend(&level, budget)? } else { ascend(&level, budget)? };
        levels.push(LevelSummary {
            k: level.shape.k,
            points: level.graph.vertex_count(),
            edges: level.graph.edge_count(),
            stars: next.stars,
            tops: next.tops,
        });
        provenance = next
            .members
            .par_iter()
            .map(|m| {
                let mut acc = provenance[m[0] as usize].clone();
                for &v in &m[1..] {
                    let u = &provenance[v as usize];
                    acc = if down { acc.intersect(f, u).unwrap() } else { acc.sum(f, u).unwrap() };
                }
                acc
            })
            .collect();
        level = next.level;
    }
    let copolar = copolar_lines(&level.graph);
    levels.push(LevelSummary {
        k: level.shape.k,
        points: level.graph.vertex_count(),
        edges: level.graph.edge_count(),
        stars: 0,
        tops: 0,
    });
    let geometry = recover_projective(&copolar);
    if level.shape.k != 1 {
        provenance = provenance.iter().map(|u| s.perp(u)).collect();
    }
    let mismatches = compare_with_truth(s, &geometry, &provenance);
    let report = PipelineReport {
        p: f.p() as u32,
        n,
        k,
        levels,
        recovered_points: geometry.point_count,
        recovered_lines: geometry.lines.len(),
        copolar_lines: geometry.copolar_line_count,
        isotropic_lines: geometry.lines.len() - geometry.copolar_line_count,
        orthogonal_pairs: geometry.perp.edge_count(),
        matches: mismatches.is_empty(),
        mismatches,
    };
    Ok(PipelineOutput { report, geometry, provenance })
}

/// Checks that recovered points are exactly the projective points, recovered
/// lines exactly the projective lines, and orthogonality that of the form.
pub fn compare_with_truth(s: &SymplecticSpace, geo: &RecoveredGeometry, prov: &[Subspace]) -> Vec<String> {
    let f = s.field();
    let mut out = Vec::new();
    let mut sorted = prov.to_vec();
    sorted.sort();
    if sorted != enumerate_subspaces(s, 1) {
        out.push("recovered points are not in bijection with the projective points".to_string());
        return out;
    }
    let mut spans = Vec::with_capacity(geo.lines.len());
    for (i, line) in geo.lines.iter().enumerate() {
        let span = line.iter().fold(Subspace::zero(s.n()), |acc, &x| acc.sum(f, &prov[x as usize]).unwrap());
        if span.dim() != 2 || line.len() != f.order() + 1 {
            out.push(format!("recovered line {i} does not span a projective line"));
            continue;
        }
        spans.push(span);
    }
    let mut sorted_spans = spans.clone();
    sorted_spans.sort();
    let before = sorted_spans.len();
    sorted_spans.dedup();
    if before != sorted_spans.len() {
        out.push("a projective line was recovered twice".to_string());
    }
    if sorted_spans != enumerate_subspaces(s, 2) {
        out.push(format!(
            "recovered {} distinct lines, expected {}",
            sorted_spans.len(),
            enumerate_subspaces(s, 2).len()
        ));
    }
    let n = geo.point_count;
    let bad = (0..n)
        .into_par_iter()
        .filter(|&a| {
            (0..n).any(|b| {
                a != b && geo.perp.has_edge(a, b) != (s.form(prov[a].row(0), prov[b].row(0)) == 0)
            })
        })
        .count();
    if bad > 0 {
        out.push(format!("orthogonality disagrees at {bad} points"));
    }
    out
}

/// The permutation of (T-R)_k induced by U -> M U.
pub fn lift_similitude(level: &GrassmannSpace, sim: &Similitude) -> Vec<u32> {
    let f = level.space().field();
    level
        .points()
        .par_iter()
        .map(|u| level.index_of(&sim.apply(f, u)).expect("similitudes preserve (T-R)"))
        .collect()
}

/// The bijection (T-R)_k -> (T-R)_{n-k} given by U -> U^perp.
pub fn lift_kappa(from: &GrassmannSpace, to: &GrassmannSpace) -> Vec<u32> {
    let s = from.space();
    from.points().par_iter().map(|u| to.index_of(&s.perp(u)).expect("perp preserves (T-R)")).collect()
}

/// True iff `perm` maps the edges of `a` exactly onto the edges of `b`.
pub fn is_isomorphism(a: &Graph, b: &Graph, perm: &[u32]) -> bool {
    let n = a.vertex_count();
    if b.vertex_count() != n || perm.len() != n || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut seen = vec![false; n];
    for &x in perm {
        if x as usize >= n || std::mem::replace(&mut seen[x as usize], true) {
            return false;
        }
    }
    (0..n).into_par_iter().all(|v| {
        let pv = perm[v] as usize;
        a.degree(v) == b.degree(pv) && a.neighbors(v).iter().all(|&w| b.has_edge(pv, perm[w as usize] as usize))
    })
}

pub fn is_automorphism(g: &Graph, perm: &[u32]) -> bool {
    is_isomorphism(g, g, perm)
}

/// Index map from a structure's member list to its position, used when
/// matching recovered structures with known ones.
pub fn index_sets(sets: &[Vec<u32>]) -> HashMap<Vec<u32>, usize> {
    sets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{star, top};

    fn s32() -> SymplecticSpace {
        SymplecticSpace::standard(3, 2).unwrap()
    }

    #[test]
    fn adjacency_formula_trivial_cases() {
        let s = s32();
        let g = GrassmannSpace::new(&s, 3).unwrap();
        let coll = g.graph(AdjacencyKind::Collinear);
        let u1 = 0u32;
        let u2 = coll.neighbors(0)[0];
        assert!(collinear_from_adjacency(&coll, u1, u2, u1));
        let far = (0..g.len() as u32).find(|&v| v != u1 && !coll.has_edge(0, v as usize)).unwrap();
        assert!(!collinear_from_adjacency(&coll, u1, u2, far));
    }

    #[test]
    fn formulas_agree_with_pencils_at_level3() {
        use rand::{Rng, SeedableRng};
        let s = SymplecticSpace::standard(3, 3).unwrap();
        let g = GrassmannSpace::new(&s, 3).unwrap();
        let coll = g.graph(AdjacencyKind::Collinear);
        let lower = g.graph(AdjacencyKind::Lower);
        let cl = TriangleClassifier::new(&g, &lower).unwrap();
        let pls = PartialLinearSpace::from_grassmann(&g);
        let mut rng = rand_xoshiro::SplitMix64::seed_from_u64(7);
        for i in 0..120 {
            let a = rng.gen_range(0..g.len()) as u32;
            let nb = coll.neighbors(a as usize);
            let b = nb[rng.gen_range(0..nb.len())];
            let c = if i % 2 == 0 {
                let line = &pls.lines()[pls.line_through(a, b).unwrap() as usize];
                line[rng.gen_range(0..line.len())]
            } else {
                let cn = coll.common_neighbors(&[a, b]);
                cn[rng.gen_range(0..cn.len())]
            };
            let truth = g.collinear(a, b, c);
            assert_eq!(collinear_from_adjacency(&coll, a, b, c), truth, "{a} {b} {c}");
            if i < 30 {
                assert_eq!(collinear_from_lower(&cl, a, b, c), truth, "{a} {b} {c}");
            }
        }
    }

    #[test]
    fn copolar_spans_and_closure() {
        let s = s32();
        let g = GrassmannSpace::new(&s, 1).unwrap();
        let pls = PartialLinearSpace::from_grassmann(&g);
        assert_eq!(pls.lines().len(), 90);
        let tris = pls.triangles();
        let t = tris[0];
        let plane = triangle_span(&pls, t).unwrap();
        assert_eq!(plane.span.len(), 12);
        assert!(t.iter().all(|v| plane.span.contains(v)));
        // the hole is the radical of the plane
        let f = s.field();
        let pi = t.iter().fold(Subspace::zero(4), |a, &v| a.sum(f, g.point(v)).unwrap());
        let (rad, _) = s.radical(&pi);
        assert_eq!(plane.hole, g.index_of(&rad));
        assert_eq!(delta_closure(&pls, t).unwrap(), (0..40).collect::<Vec<u32>>());
        let b = tris.iter().find(|x| !plane.span.contains(&x[0])).unwrap();
        let other = triangle_span(&pls, *b).unwrap();
        let _ = plane_related(&pls, &plane.span, &other.span);
        let disjoint = plane_related(&pls, &[0, 1], &[2, 3]);
        assert_eq!(disjoint, PlaneRelation::default());
    }

    #[test]
    fn structures_at_n4() {
        let s = s32();
        for k in 1..=3 {
            let g = GrassmannSpace::new(&s, k).unwrap();
            let coll = g.graph(AdjacencyKind::Collinear);
            let shape = LevelShape { p: 3, n: 4, k };
            let found = recover_max_structures(&coll, &shape, 5000).unwrap();
            let mut expected: Vec<(Vec<u32>, StructureTag)> = Vec::new();
            for (i, h) in g.star_centres().iter().enumerate() {
                assert_eq!(star(&s, h, k).unwrap().len(), g.star_members(i).len());
                let tag = if k == 2 { StructureTag::Ambiguous } else { StructureTag::Star };
                expected.push((g.star_members(i).to_vec(), tag));
            }
            for (i, b) in g.top_carriers().iter().enumerate() {
                assert_eq!(top(&s, b, k).unwrap().len(), g.top_members(i).len());
                let tag = if k == 2 { StructureTag::Ambiguous } else { StructureTag::Top };
                expected.push((g.top_members(i).to_vec(), tag));
            }
            expected.sort();
            let got: Vec<(Vec<u32>, StructureTag)> = found.into_iter().map(|m| (m.members, m.tag)).collect();
            assert_eq!(got, expected, "k={k}");
        }
    }

    #[test]
    fn projective_recovery_at_n4() {
        let s = s32();
        let g = GrassmannSpace::new(&s, 1).unwrap();
        let coll = g.graph(AdjacencyKind::Collinear);
        let geo = recover_projective(&copolar_lines(&coll));
        assert_eq!(geo.lines.len(), 130);
        assert_eq!(geo.copolar_line_count, 90);
        assert!(geo.lines[90..].iter().all(|l| l.len() == 4));
        assert!(compare_with_truth(&s, &geo, g.points()).is_empty());
    }

    #[test]
    fn pipeline_small_cases() {
        let s = s32();
        for k in [1, 3] {
            let out = full_pipeline(&s, k, 5000).unwrap();
            assert!(out.report.matches, "k={k}: {:?}", out.report.mismatches);
            assert_eq!(out.report.recovered_lines, 130);
        }
        assert!(matches!(full_pipeline(&s, 2, 5000), Err(ReconstructError::MiddleLevel { .. })));
    }

    #[test]
    fn lifts_are_automorphisms() {
        let s = s32();
        let g = GrassmannSpace::new(&s, 2).unwrap();
        let graphs: Vec<_> = AdjacencyKind::ALL.iter().map(|&kind| g.graph(kind)).collect();
        let id = lift_similitude(&g, &s.identity_similitude());
        assert_eq!(id, (0..90).collect::<Vec<u32>>());
        for seed in 0..10 {
            let perm = lift_similitude(&g, &s.random_similitude(seed, false));
            assert!(graphs.iter().all(|gr| is_automorphism(gr, &perm)));
        }
        let kappa = lift_kappa(&g, &g);
        assert!(graphs.iter().all(|gr| is_automorphism(gr, &kappa)));
        // kappa maps stars onto tops at the middle level
        let tops: HashSet<Vec<u32>> = (0..g.top_carriers().len()).map(|i| g.top_members(i).to_vec()).collect();
        for i in 0..g.star_centres().len() {
            let mut img: Vec<u32> = g.star_members(i).iter().map(|&v| kappa[v as usize]).collect();
            img.sort_unstable();
            assert!(tops.contains(&img));
        }
    }
}
