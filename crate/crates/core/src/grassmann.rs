//! Grassmann spaces of regular and tangential subspaces: points, pencils,
//! stars and tops, the three adjacencies, and the triangle taxonomy of the
//! lower adjacency.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{all_subspaces, Subspace};
use crate::graph::{intersect_sorted, BudgetExceeded, Graph};
use crate::symplectic::SymplecticSpace;

pub use crate::graph::{maximal_cliques, DEFAULT_CLIQUE_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrassmannError {
    #[error("level k = {k} outside 1..={max}")]
    Level { k: usize, max: usize },
    #[error("{0:?} is not regular or tangential")]
    NotTr(Subspace),
    #[error("{0:?} has dimension {1}, expected {2}")]
    WrongDim(Subspace, usize, usize),
    #[error("{0:?} is not contained in {1:?}")]
    NotIncident(Subspace, Subspace),
    #[error("vertex {0} out of range")]
    Vertex(u32),
    #[error("not a triangle: {0}")]
    NotTriangle(String),
    #[error("triangle taxonomy needs odd k with 1 < k < n-1 (got k = {k}, n = {n})")]
    TaxonomyLevel { k: usize, n: usize },
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Which of the three adjacencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum AdjacencyKind {
    /// U ~ W: both lower and upper adjacent (collinear in the Grassmann space).
    Collinear,
    /// U ⊓ W: the intersection is a regular or tangential hyperplane of both.
    Lower,
    /// U ⊔ W: the sum is a regular or tangential (k+1)-space.
    Upper,
}

impl AdjacencyKind {
    pub const ALL: [AdjacencyKind; 3] = [AdjacencyKind::Collinear, AdjacencyKind::Lower, AdjacencyKind::Upper];

    pub fn as_str(self) -> &'static str {
        match self {
            AdjacencyKind::Collinear => "collinear",
            AdjacencyKind::Lower => "lower",
            AdjacencyKind::Upper => "upper",
        }
    }

    /// The kind this one turns into under the duality U -> U^perp.
    pub fn dual(self) -> Self {
        match self {
            AdjacencyKind::Collinear => AdjacencyKind::Collinear,
            AdjacencyKind::Lower => AdjacencyKind::Upper,
            AdjacencyKind::Upper => AdjacencyKind::Lower,
        }
    }
}

impl fmt::Display for AdjacencyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdjacencyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "collinear" => Ok(AdjacencyKind::Collinear),
            "lower" => Ok(AdjacencyKind::Lower),
            "upper" => Ok(AdjacencyKind::Upper),
            other => Err(format!("unknown adjacency kind {other:?}")),
        }
    }
}

/// Every k-subspace, sorted by canonical basis bytes.
pub fn enumerate_subspaces(s: &SymplecticSpace, k: usize) -> Vec<Subspace> {
    all_subspaces(s.field(), s.n(), k)
}

/// The regular and tangential k-subspaces (radical dimension at most 1), in
/// enumeration order.
pub fn enumerate_tr(s: &SymplecticSpace, k: usize) -> Vec<Subspace> {
    enumerate_subspaces(s, k).into_par_iter().filter(|u| s.in_tr(u)).collect()
}

fn check_tr(s: &SymplecticSpace, u: &Subspace, dim: usize) -> Result<(), GrassmannError> {
    if u.dim() != dim {
        return Err(GrassmannError::WrongDim(u.clone(), u.dim(), dim));
    }
    if !s.in_tr(u) {
        return Err(GrassmannError::NotTr(u.clone()));
    }
    Ok(())
}

fn extend(s: &SymplecticSpace, h: &Subspace, v: &[u8]) -> Subspace {
    h.sum(s.field(), &Subspace::span(s.field(), s.n(), &[v])).expect("same ambient")
}

/// Every k-subspace U with H ⊂ U ⊂ B, where dim H = k-1 and dim B = k+1.
fn projective_pencil(s: &SymplecticSpace, h: &Subspace, b: &Subspace) -> Vec<Subspace> {
    let f = s.field();
    let mut extra: Vec<Vec<u8>> = Vec::new();
    let mut acc = h.clone();
    for row in b.rows() {
        if !acc.contains_vector(f, row) {
            extra.push(row.to_vec());
            acc = extend(s, &acc, row);
        }
    }
    debug_assert_eq!(extra.len(), 2);
    let (a, c) = (&extra[0], &extra[1]);
    let mut out = vec![extend(s, h, a)];
    for t in 0..f.p() {
        let v: Vec<u8> = c.iter().zip(a).map(|(&x, &y)| f.add(x, f.mul(t, y))).collect();
        out.push(extend(s, h, &v));
    }
    out.sort();
    out
}

/// The star S(H): all regular or tangential k-subspaces containing H.
///
/// For odd k, H is regular and the star is {H + q : q a point of H^perp}.
/// For even k, H is tangential with radical r and the star is
/// {H + <u> : u not in r^perp}.
pub fn star(s: &SymplecticSpace, h: &Subspace, k: usize) -> Result<Vec<Subspace>, GrassmannError> {
    check_tr(s, h, k - 1)?;
    let f = s.field();
    let mut out: Vec<Subspace> = if k % 2 == 1 {
        s.perp(h).points(f).iter().map(|q| h.sum(f, q).unwrap()).collect()
    } else {
        let (rad, _) = s.radical(h);
        let r = rad.row(0);
        h.superspaces(f)
            .into_iter()
            .filter(|u| {
                let v = u.rows().find(|row| !h.contains_vector(f, row)).unwrap();
                s.form(v, r) != 0
            })
            .collect()
    };
    out.sort();
    Ok(out)
}

/// The top T(B): all regular or tangential k-subspaces contained in B.
///
/// For odd k, B is regular and the top is {B ∩ q^perp : q a point of B}.
/// For even k, B is tangential and the top consists of the hyperplanes of B
/// complementary to its radical.
pub fn top(s: &SymplecticSpace, b: &Subspace, k: usize) -> Result<Vec<Subspace>, GrassmannError> {
    check_tr(s, b, k + 1)?;
    let f = s.field();
    let mut out: Vec<Subspace> = if k % 2 == 1 {
        b.points(f).iter().map(|q| b.intersect(f, &s.perp(q)).unwrap()).collect()
    } else {
        let (rad, _) = s.radical(b);
        b.hyperplanes(f).into_iter().filter(|u| !u.contains(f, &rad).unwrap()).collect()
    };
    out.sort();
    Ok(out)
}

/// The pencil p(H, B) = S(H) ∩ T(B).
///
/// For odd k this is the full projective pencil. For even k it is empty when
/// Rad(B) ⊆ H and otherwise the projective pencil minus H + Rad(B).
pub fn pencil(s: &SymplecticSpace, h: &Subspace, b: &Subspace, k: usize) -> Result<Vec<Subspace>, GrassmannError> {
    check_tr(s, h, k - 1)?;
    check_tr(s, b, k + 1)?;
    let f = s.field();
    if !b.contains(f, h).unwrap() {
        return Err(GrassmannError::NotIncident(h.clone(), b.clone()));
    }
    let all = projective_pencil(s, h, b);
    if k % 2 == 1 {
        return Ok(all);
    }
    let (rad, _) = s.radical(b);
    if h.contains(f, &rad).unwrap() {
        return Ok(Vec::new());
    }
    let excluded = h.sum(f, &rad).unwrap();
    Ok(all.into_iter().filter(|u| *u != excluded).collect())
}

/// Direct evaluation of an adjacency from the definitions.
pub fn adjacent(s: &SymplecticSpace, u: &Subspace, w: &Subspace, kind: AdjacencyKind) -> Result<bool, GrassmannError> {
    let k = u.dim();
    if w.dim() != k {
        return Err(GrassmannError::WrongDim(w.clone(), w.dim(), k));
    }
    let f = s.field();
    let lower = || {
        let i = u.intersect(f, w).unwrap();
        i.dim() + 1 == k && s.in_tr(&i)
    };
    let upper = || {
        let b = u.sum(f, w).unwrap();
        u != w && b.dim() == k + 1 && s.in_tr(&b)
    };
    Ok(match kind {
        AdjacencyKind::Lower => lower(),
        AdjacencyKind::Upper => upper(),
        AdjacencyKind::Collinear => lower() && upper(),
    })
}

/// A line of the Grassmann space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pencil {
    pub h: Subspace,
    pub b: Subspace,
    pub members: Vec<u32>,
}

/// The point set (T-R)_k with its incidences to levels k-1 and k+1.
#[derive(Debug, Clone)]
pub struct GrassmannSpace {
    space: SymplecticSpace,
    k: usize,
    points: Vec<Subspace>,
    lower: Vec<Subspace>,
    upper: Vec<Subspace>,
    below: Vec<Vec<u32>>,
    above: Vec<Vec<u32>>,
    stars: Vec<Vec<u32>>,
    tops: Vec<Vec<u32>>,
}

impl GrassmannSpace {
    pub fn new(space: &SymplecticSpace, k: usize) -> Result<Self, GrassmannError> {
        let n = space.n();
        if k == 0 || k >= n {
            return Err(GrassmannError::Level { k, max: n - 1 });
        }
        let s = space.clone();
        let f = s.field();
        let points = enumerate_tr(&s, k);
        let lower = enumerate_tr(&s, k - 1);
        let upper = enumerate_tr(&s, k + 1);
        let lookup = |list: &[Subspace], u: &Subspace| list.binary_search(u).ok().map(|i| i as u32);
        let (below, above): (Vec<Vec<u32>>, Vec<Vec<u32>>) = points
            .par_iter()
            .map(|u| {
                let b: Vec<u32> = u.hyperplanes(f).iter().filter_map(|h| lookup(&lower, h)).collect();
                let a: Vec<u32> = u.superspaces(f).iter().filter_map(|w| lookup(&upper, w)).collect();
                (b, a)
            })
            .unzip();
        let mut stars = vec![Vec::new(); lower.len()];
        let mut tops = vec![Vec::new(); upper.len()];
        for (v, (b, a)) in below.iter().zip(&above).enumerate() {
            for &h in b {
                stars[h as usize].push(v as u32);
            }
            for &w in a {
                tops[w as usize].push(v as u32);
            }
        }
        Ok(GrassmannSpace { space: s, k, points, lower, upper, below, above, stars, tops })
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[Subspace] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, v: u32) -> &Subspace {
        &self.points[v as usize]
    }

    pub fn index_of(&self, u: &Subspace) -> Option<u32> {
        self.points.binary_search(u).ok().map(|i| i as u32)
    }

    /// (T-R)_{k-1}, the possible star centres.
    pub fn star_centres(&self) -> &[Subspace] {
        &self.lower
    }

    /// (T-R)_{k+1}, the possible top carriers.
    pub fn top_carriers(&self) -> &[Subspace] {
        &self.upper
    }

    /// Members of the star of the i-th element of (T-R)_{k-1}.
    pub fn star_members(&self, i: usize) -> &[u32] {
        &self.stars[i]
    }

    /// Members of the top of the i-th element of (T-R)_{k+1}.
    pub fn top_members(&self, i: usize) -> &[u32] {
        &self.tops[i]
    }

    /// Indices into (T-R)_{k-1} of the hyperplanes of point `v`.
    pub fn hyperplane_ids(&self, v: u32) -> &[u32] {
        &self.below[v as usize]
    }

    /// Indices into (T-R)_{k+1} of the (k+1)-spaces above point `v`.
    pub fn superspace_ids(&self, v: u32) -> &[u32] {
        &self.above[v as usize]
    }

    /// All nonempty pencils, grouped by B and then by H.
    pub fn pencils(&self) -> Vec<Pencil> {
        (0..self.upper.len())
            .into_par_iter()
            .flat_map_iter(|b| {
                let mut pairs: Vec<(u32, u32)> = self.tops[b]
                    .iter()
                    .flat_map(|&v| self.below[v as usize].iter().map(move |&h| (h, v)))
                    .collect();
                pairs.sort_unstable();
                let mut out = Vec::new();
                for group in pairs.chunk_by(|x, y| x.0 == y.0) {
                    out.push(Pencil {
                        h: self.lower[group[0].0 as usize].clone(),
                        b: self.upper[b].clone(),
                        members: group.iter().map(|x| x.1).collect(),
                    });
                }
                out
            })
            .collect()
    }

    fn lower_lists(&self) -> Vec<Vec<u32>> {
        (0..self.len())
            .into_par_iter()
            .map(|v| self.below[v].iter().flat_map(|&h| self.stars[h as usize].iter().copied()).collect())
            .collect()
    }

    fn upper_lists(&self) -> Vec<Vec<u32>> {
        (0..self.len())
            .into_par_iter()
            .map(|v| self.above[v].iter().flat_map(|&b| self.tops[b as usize].iter().copied()).collect())
            .collect()
    }

    pub fn graph(&self, kind: AdjacencyKind) -> AdjacencyGraph {
        let graph = match kind {
            AdjacencyKind::Lower => Graph::from_lists(self.lower_lists()),
            AdjacencyKind::Upper => Graph::from_lists(self.upper_lists()),
            AdjacencyKind::Collinear => {
                Graph::from_lists(self.lower_lists()).intersection(&Graph::from_lists(self.upper_lists()))
            }
        };
        AdjacencyGraph { k: self.k, kind, graph }
    }

    /// Ground-truth ternary collinearity: U1 ≠ U2 are collinear and U3 lies
    /// on the pencil through them.
    pub fn collinear(&self, a: u32, b: u32, c: u32) -> bool {
        if a == b {
            return false;
        }
        let f = self.space.field();
        let (u1, u2, u3) = (self.point(a), self.point(b), self.point(c));
        if !adjacent(&self.space, u1, u2, AdjacencyKind::Collinear).unwrap() {
            return false;
        }
        let h = u1.intersect(f, u2).unwrap();
        let bsum = u1.sum(f, u2).unwrap();
        u3.contains(f, &h).unwrap() && bsum.contains(f, u3).unwrap()
    }
}

/// One adjacency relation on a Grassmann level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyGraph {
    pub k: usize,
    pub kind: AdjacencyKind,
    pub graph: Graph,
}

impl Deref for AdjacencyGraph {
    type Target = Graph;
    fn deref(&self) -> &Graph {
        &self.graph
    }
}

pub fn build_adjacency_graph(g: &GrassmannSpace, kind: AdjacencyKind) -> AdjacencyGraph {
    g.graph(kind)
}

/// Vertices adjacent to all seeds.
pub fn common_neighbors(g: &Graph, seeds: &[u32]) -> Vec<u32> {
    g.common_neighbors(seeds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriangleClass {
    /// The three points lie on one pencil.
    PencilDegenerate,
    /// Common hyperplane, not in one pencil.
    STriangle,
    /// Contained in a regular (k+1)-space.
    TTriangle,
    /// Contained in a (k+1)-space whose radical is a line.
    TStarTriangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriangleMethod {
    GroundTruth,
    AdjacencyOnly,
}

/// Classifies lower-adjacency triangles, either from the subspaces or from
/// the lower adjacency graph alone.
///
/// An upper adjacency graph is accepted as well; U -> U^perp carries it onto
/// the lower adjacency of level n-k, and ground truth is read off the perps.
///
/// Adjacency rows are kept as bitsets, which costs n^2/8 bytes.
pub struct TriangleClassifier<'a> {
    level: &'a GrassmannSpace,
    lower: &'a AdjacencyGraph,
    rows: Vec<FixedBitSet>,
}

impl<'a> TriangleClassifier<'a> {
    pub fn new(level: &'a GrassmannSpace, lower: &'a AdjacencyGraph) -> Result<Self, GrassmannError> {
        let (k, n) = (level.k(), level.space().n());
        if k % 2 == 0 || k <= 1 || k + 1 >= n {
            return Err(GrassmannError::TaxonomyLevel { k, n });
        }
        assert_ne!(lower.kind, AdjacencyKind::Collinear, "triangles are classified for lower or upper adjacency");
        Ok(TriangleClassifier { level, lower, rows: lower.bit_rows() })
    }

    pub fn graph(&self) -> &AdjacencyGraph {
        self.lower
    }

    #[inline]
    pub fn adjacent(&self, a: u32, b: u32) -> bool {
        self.rows[a as usize].contains(b as usize)
    }

    /// The common lower neighbours ⟨seeds⟩ of the seeds.
    pub fn common(&self, seeds: &[u32]) -> Vec<u32> {
        match seeds {
            [] => Vec::new(),
            [a] => self.lower.neighbors(*a as usize).to_vec(),
            [a, rest @ ..] => {
                let mut acc = self.lower.neighbors(*a as usize).to_vec();
                if rest.len() == 1 {
                    return intersect_sorted(&acc, self.lower.neighbors(rest[0] as usize))
                        .into_iter()
                        .filter(|v| !seeds.contains(v))
                        .collect();
                }
                acc.retain(|&v| !seeds.contains(&v) && rest.iter().all(|&s| self.adjacent(s, v)));
                acc
            }
        }
    }

    pub fn is_clique(&self, vs: &[u32]) -> bool {
        vs.iter().enumerate().all(|(i, &a)| vs[i + 1..].iter().all(|&b| self.adjacent(a, b)))
    }

    pub fn is_triangle(&self, t: [u32; 3]) -> bool {
        t[0] != t[1] && t[1] != t[2] && t[0] != t[2] && self.is_clique(&t)
    }

    pub fn classify(&self, t: [u32; 3], method: TriangleMethod) -> Result<TriangleClass, GrassmannError> {
        for &v in &t {
            if v as usize >= self.level.len() {
                return Err(GrassmannError::Vertex(v));
            }
        }
        if !self.is_triangle(t) {
            return Err(GrassmannError::NotTriangle(format!("{t:?} is not an adjacency clique")));
        }
        match method {
            TriangleMethod::GroundTruth => self.classify_ground_truth(t),
            TriangleMethod::AdjacencyOnly => Ok(self.classify_by_adjacency(t)),
        }
    }

    fn classify_ground_truth(&self, t: [u32; 3]) -> Result<TriangleClass, GrassmannError> {
        let s = self.level.space();
        let f = s.field();
        let [a, b, c] = t.map(|v| match self.lower.kind {
            AdjacencyKind::Upper => s.perp(self.level.point(v)),
            _ => self.level.point(v).clone(),
        });
        let k = a.dim();
        let (a, b, c) = (&a, &b, &c);
        let h = a.intersect(f, b).unwrap().intersect(f, c).unwrap();
        let sum = a.sum(f, b).unwrap().sum(f, c).unwrap();
        Ok(match (h.dim() + 1 == k, sum.dim() == k + 1) {
            (true, true) => TriangleClass::PencilDegenerate,
            (true, false) => TriangleClass::STriangle,
            (false, true) => match s.rdim(&sum) {
                0 => TriangleClass::TTriangle,
                2 => TriangleClass::TStarTriangle,
                r => return Err(GrassmannError::NotTriangle(format!("span has radical dimension {r}"))),
            },
            (false, false) => return Err(GrassmannError::NotTriangle("no common hyperplane or span".into())),
        })
    }

    /// S iff the common neighbourhood X is a clique. Otherwise the triple lies
    /// on a pencil iff X contains an S-triangle; failing that, it is T* iff
    /// non-adjacency is transitive on X.
    fn classify_by_adjacency(&self, t: [u32; 3]) -> TriangleClass {
        let x = self.common(&t);
        if self.is_clique(&x) {
            return TriangleClass::STriangle;
        }
        if self.contains_s_triangle(&x) {
            return TriangleClass::PencilDegenerate;
        }
        if self.nonadjacency_transitive(&x) {
            TriangleClass::TStarTriangle
        } else {
            TriangleClass::TTriangle
        }
    }

    /// True iff `t` is an S-triangle, judged by adjacency alone.
    pub fn is_s_triangle(&self, t: [u32; 3]) -> bool {
        self.is_clique(&self.common(&t))
    }

    /// True iff `t` is a T-triangle, judged by adjacency alone.
    pub fn is_t_triangle(&self, t: [u32; 3]) -> bool {
        let x = self.common(&t);
        !self.is_clique(&x) && !self.nonadjacency_transitive(&x) && !self.contains_s_triangle(&x)
    }

    pub fn contains_s_triangle(&self, x: &[u32]) -> bool {
        self.triangles_in(x).any(|w| self.is_s_triangle(w))
    }

    /// Triangles (pairwise adjacent triples) inside a sorted vertex list.
    pub fn triangles_in<'b>(&'b self, x: &'b [u32]) -> impl Iterator<Item = [u32; 3]> + 'b {
        (0..x.len()).flat_map(move |i| {
            (i + 1..x.len()).filter(move |&j| self.adjacent(x[i], x[j])).flat_map(move |j| {
                (j + 1..x.len())
                    .filter(move |&l| self.adjacent(x[i], x[l]) && self.adjacent(x[j], x[l]))
                    .map(move |l| [x[i], x[j], x[l]])
            })
        })
    }

    /// Whether "distinct and not adjacent" is transitive on `x`.
    pub fn nonadjacency_transitive(&self, x: &[u32]) -> bool {
        for &a in x {
            for &b in x {
                if a == b || self.adjacent(a, b) {
                    continue;
                }
                for &c in x {
                    if c != a && c != b && !self.adjacent(b, c) && self.adjacent(a, c) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gaussian_binomial;

    fn s32() -> SymplecticSpace {
        SymplecticSpace::standard(3, 2).unwrap()
    }

    fn sp(s: &SymplecticSpace, rows: &[[u8; 4]]) -> Subspace {
        Subspace::span(s.field(), 4, rows)
    }

    const E1: [u8; 4] = [1, 0, 0, 0];
    const F1: [u8; 4] = [0, 1, 0, 0];
    const E2: [u8; 4] = [0, 0, 1, 0];
    const F2: [u8; 4] = [0, 0, 0, 1];

    #[test]
    fn counts_at_p3_n4() {
        let s = s32();
        assert_eq!(enumerate_subspaces(&s, 1).len(), 40);
        assert_eq!(enumerate_subspaces(&s, 2).len(), 130);
        assert_eq!(enumerate_subspaces(&s, 3).len(), 40);
        assert_eq!(enumerate_tr(&s, 1).len(), 40);
        assert_eq!(enumerate_tr(&s, 2).len(), 90);
        assert_eq!(enumerate_tr(&s, 3).len(), 40);
        assert_eq!(gaussian_binomial(4, 2, 3), 130);
    }

    #[test]
    fn star_top_pencil_examples() {
        let s = s32();
        assert_eq!(star(&s, &sp(&s, &[E1, F1]), 3).unwrap().len(), 4);
        assert_eq!(star(&s, &sp(&s, &[E1]), 2).unwrap().len(), 9);
        assert_eq!(top(&s, &sp(&s, &[E1, F1, E2]), 2).unwrap().len(), 9);
        assert_eq!(top(&s, &Subspace::full(4), 3).unwrap().len(), 40);
        let pen = pencil(&s, &sp(&s, &[E1]), &sp(&s, &[E1, F1, E2]), 2).unwrap();
        assert_eq!(
            pen,
            vec![sp(&s, &[E1, F1]), sp(&s, &[E1, [0, 1, 1, 0]]), sp(&s, &[E1, [0, 1, 2, 0]])]
        );
        assert!(pencil(&s, &sp(&s, &[E2]), &sp(&s, &[E1, F1, E2]), 2).unwrap().is_empty());
        assert_eq!(pencil(&s, &sp(&s, &[E1, F1]), &Subspace::full(4), 3).unwrap().len(), 4);
        assert!(star(&s, &sp(&s, &[E1, E2]), 3).is_err());
        assert!(pencil(&s, &sp(&s, &[E1]), &sp(&s, &[F1, E2, F2]), 2).is_err());
    }

    #[test]
    fn adjacency_examples() {
        let s = s32();
        let u = sp(&s, &[E1, F1]);
        let w = sp(&s, &[E1, [0, 1, 1, 0]]);
        for kind in AdjacencyKind::ALL {
            assert!(adjacent(&s, &u, &w, kind).unwrap());
            assert!(!adjacent(&s, &u, &sp(&s, &[E2, F2]), kind).unwrap());
        }
        assert!(adjacent(&s, &u, &sp(&s, &[E1]), AdjacencyKind::Lower).is_err());
    }

    #[test]
    fn grassmann_lines_at_p3_n4() {
        let s = s32();
        for k in 1..=3 {
            let g = GrassmannSpace::new(&s, k).unwrap();
            let lines = g.pencils();
            let size = if k % 2 == 1 { 4 } else { 3 };
            assert!(lines.iter().all(|l| l.members.len() == size), "k={k}");
            if k == 1 {
                assert_eq!(lines.len(), 90);
            }
            let coll = g.graph(AdjacencyKind::Collinear);
            assert!(coll.is_symmetric());
            assert!(coll.is_connected());
            // each collinear pair lies on exactly one line
            let pairs: usize = lines.iter().map(|l| l.members.len() * (l.members.len() - 1) / 2).sum();
            assert_eq!(pairs, coll.edge_count());
        }
        assert!(GrassmannSpace::new(&s, 0).is_err());
        assert!(GrassmannSpace::new(&s, 4).is_err());
    }

    #[test]
    fn graphs_match_direct_definitions() {
        let s = s32();
        for k in 1..=3 {
            let g = GrassmannSpace::new(&s, k).unwrap();
            for kind in AdjacencyKind::ALL {
                let graph = g.graph(kind);
                for a in 0..g.len() {
                    for b in 0..g.len() {
                        let direct = a != b && adjacent(&s, g.point(a as u32), g.point(b as u32), kind).unwrap();
                        assert_eq!(graph.has_edge(a, b), direct, "k={k} {kind}");
                    }
                }
            }
        }
    }

    #[test]
    fn stars_tops_match_brute_force() {
        let s = s32();
        let f = s.field();
        for k in 1..=3 {
            let g = GrassmannSpace::new(&s, k).unwrap();
            for (i, h) in g.star_centres().iter().enumerate() {
                let brute: Vec<Subspace> = g.points().iter().filter(|u| u.contains(f, h).unwrap()).cloned().collect();
                assert_eq!(star(&s, h, k).unwrap(), brute);
                let idx: Vec<Subspace> = g.star_members(i).iter().map(|&v| g.point(v).clone()).collect();
                assert_eq!(idx, brute);
            }
            for b in g.top_carriers() {
                let brute: Vec<Subspace> = g.points().iter().filter(|u| b.contains(f, u).unwrap()).cloned().collect();
                assert_eq!(top(&s, b, k).unwrap(), brute);
            }
        }
    }

    #[test]
    fn maximal_cliques_are_stars_and_tops() {
        let s = s32();
        let g = GrassmannSpace::new(&s, 2).unwrap();
        let coll = g.graph(AdjacencyKind::Collinear);
        let cliques = maximal_cliques(&coll, DEFAULT_CLIQUE_BUDGET).unwrap();
        assert_eq!(cliques.len(), 80);
        assert!(cliques.iter().all(|c| c.len() == 9));
        let mut expected: Vec<Vec<u32>> = (0..g.star_centres().len()).map(|i| g.star_members(i).to_vec()).collect();
        expected.extend((0..g.top_carriers().len()).map(|i| g.top_members(i).to_vec()));
        expected.sort();
        assert_eq!(cliques, expected);
    }

    #[test]
    fn taxonomy_needs_middle_odd_level() {
        let s = s32();
        let g = GrassmannSpace::new(&s, 3).unwrap();
        let lower = g.graph(AdjacencyKind::Lower);
        assert!(matches!(TriangleClassifier::new(&g, &lower), Err(GrassmannError::TaxonomyLevel { .. })));
    }
}
