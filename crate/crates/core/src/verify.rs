//! Property suites A–H over finite instances, with machine-readable reports
//! and replayable counterexamples.
//!
//! Every check has a string id (`"B.wedge-witness"`, `"C.adjacency"`, ...) and takes a
//! list of matrices as input: canonical bases of subspaces, or a similitude
//! matrix for `G.similitude`. Suites only generate (id, inputs) items; the
//! single [`evaluate`] entry point scores them, so a failure record can be
//! re-run on its own with [`replay`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{all_subspaces, gaussian_binomial, AlgebraError, Matrix, Subspace};
use crate::graph::{intersect_sorted, BudgetExceeded};
use crate::grassmann::{
    enumerate_tr, maximal_cliques, star, top, AdjacencyGraph, AdjacencyKind, GrassmannError, GrassmannSpace,
    TriangleClassifier, TriangleMethod,
};
use crate::reconstruct::{
    automorphism_count, collinear_from_adjacency, collinear_from_lower, delta_closure, full_pipeline, is_automorphism,
    is_isomorphism, lift_kappa, lift_similitude, plane_related, triangle_span, PartialLinearSpace, PipelineReport,
    ReconstructError,
    DEFAULT_AUTOMORPHISM_BUDGET,
};
use crate::symplectic::{sp_order, SymplecticError, SymplecticSpace};

/// Exhaustive runs of suites quantifying over triples (B, D, F) are refused
/// above this many points.
pub const TRIPLE_BOUND: usize = 200;
/// Exhaustive runs of the remaining suites are refused above this many points.
pub const PAIR_BOUND: usize = 20_000;
/// Cap on rejected draws per sampled check family.
pub const REJECTION_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("suite {suite} needs a level k")]
    MissingLevel { suite: SuiteId },
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error(
        "exhaustive suite {suite} refused: {points} points exceeds the bound {bound}; use sampled mode (--mode sample)"
    )]
    SizeBound { suite: SuiteId, points: usize, bound: usize },
    #[error("malformed record: {0}")]
    MalformedRecord(String),
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SuiteId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl SuiteId {
    pub const ALL: [SuiteId; 8] =
        [SuiteId::A, SuiteId::B, SuiteId::C, SuiteId::D, SuiteId::E, SuiteId::F, SuiteId::G, SuiteId::H];

    pub fn title(self) -> &'static str {
        match self {
            SuiteId::A => "classification laws",
            SuiteId::B => "copolar plane facts",
            SuiteId::C => "Grassmann structure",
            SuiteId::D => "collinearity formulas",
            SuiteId::E => "connectedness",
            SuiteId::F => "triangle taxonomy",
            SuiteId::G => "adjacency-preserving maps",
            SuiteId::H => "reconstruction",
        }
    }

    fn needs_level(self) -> bool {
        !matches!(self, SuiteId::A | SuiteId::B)
    }

    fn bound(self) -> usize {
        match self {
            SuiteId::B | SuiteId::D | SuiteId::F => TRIPLE_BOUND,
            _ => PAIR_BOUND,
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for SuiteId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(SuiteId::A),
            "B" => Ok(SuiteId::B),
            "C" => Ok(SuiteId::C),
            "D" => Ok(SuiteId::D),
            "E" => Ok(SuiteId::E),
            "F" => Ok(SuiteId::F),
            "G" => Ok(SuiteId::G),
            "H" => Ok(SuiteId::H),
            _ => Err(format!("unknown suite {s:?} (expected A..H)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub p: u32,
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Exhaustive,
    Sampled { seed: u64, count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub suite: SuiteId,
    pub instance: Instance,
    pub mode: Mode,
    /// Negates the outcome of every check whose id starts with this string.
    /// Used to exercise failure reporting and replay.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject_fault: Option<String>,
}

impl SuiteSpec {
    pub fn new(suite: SuiteId, p: u32, m: usize, k: Option<usize>, mode: Mode) -> Self {
        SuiteSpec { suite, instance: Instance { p, m, k }, mode, inject_fault: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FailureRecord {
    pub check: String,
    pub inputs: Vec<Vec<Vec<u8>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: SuiteId,
    pub instance: Instance,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks_run: u64,
    pub failures: Vec<FailureRecord>,
    pub elapsed_ms: u64,
    pub pass: bool,
    pub details: BTreeMap<String, Value>,
}

type Inputs = Vec<Vec<Vec<u8>>>;

#[derive(Debug, Clone)]
struct Item {
    check: String,
    inputs: Inputs,
}

fn item(check: &str, subs: &[&Subspace]) -> Item {
    Item { check: check.to_string(), inputs: subs.iter().map(|u| u.to_nested()).collect() }
}

/// Lazily built structures for one instance.
pub struct Env {
    space: SymplecticSpace,
    k: Option<usize>,
    fault: Option<String>,
    levels: Vec<OnceLock<GrassmannSpace>>,
    graphs: Vec<[OnceLock<AdjacencyGraph>; 3]>,
    copolar: OnceLock<PartialLinearSpace>,
    copolar_rows: OnceLock<Vec<FixedBitSet>>,
    pipeline: OnceLock<Result<PipelineReport, String>>,
}

impl Env {
    pub fn new(spec: &SuiteSpec) -> Result<Self, VerifyError> {
        let Instance { p, m, k } = spec.instance;
        if m == 0 {
            return Err(VerifyError::Instance("m must be at least 1".into()));
        }
        let space = SymplecticSpace::standard(p, m)?;
        let n = space.n();
        if let Some(k) = k {
            if k == 0 || k >= n {
                return Err(GrassmannError::Level { k, max: n - 1 }.into());
            }
        }
        Ok(Env {
            space,
            k,
            fault: spec.inject_fault.clone(),
            levels: (0..=n).map(|_| OnceLock::new()).collect(),
            graphs: (0..=n).map(|_| Default::default()).collect(),
            copolar: OnceLock::new(),
            copolar_rows: OnceLock::new(),
            pipeline: OnceLock::new(),
        })
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    fn n(&self) -> usize {
        self.space.n()
    }

    fn level(&self, k: usize) -> &GrassmannSpace {
        self.levels[k].get_or_init(|| GrassmannSpace::new(&self.space, k).expect("level in range"))
    }

    fn graph(&self, k: usize, kind: AdjacencyKind) -> &AdjacencyGraph {
        let slot = AdjacencyKind::ALL.iter().position(|&x| x == kind).unwrap();
        self.graphs[k][slot].get_or_init(|| self.level(k).graph(kind))
    }

    fn copolar(&self) -> &PartialLinearSpace {
        self.copolar.get_or_init(|| PartialLinearSpace::from_grassmann(self.level(1)))
    }

    fn copolar_rows(&self) -> &[FixedBitSet] {
        self.copolar_rows.get_or_init(|| self.copolar().collinearity().bit_rows())
    }

    fn pipeline(&self, k: usize) -> Result<&PipelineReport, VerifyError> {
        self.pipeline
            .get_or_init(|| full_pipeline(&self.space, k, PAIR_BOUND).map(|o| o.report).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| VerifyError::Instance(e.clone()))
    }

    fn k(&self) -> Result<usize, VerifyError> {
        self.k.ok_or_else(|| VerifyError::MalformedRecord("check needs a level k".into()))
    }

    fn sub(&self, rows: &[Vec<u8>]) -> Result<Subspace, VerifyError> {
        Subspace::from_canonical(self.space.field(), self.n(), rows)
            .ok_or_else(|| VerifyError::MalformedRecord(format!("{rows:?} is not a canonical basis")))
    }

    fn subs(&self, inputs: &[Vec<Vec<u8>>], count: usize) -> Result<Vec<Subspace>, VerifyError> {
        if inputs.len() != count {
            return Err(VerifyError::MalformedRecord(format!("expected {count} inputs, got {}", inputs.len())));
        }
        inputs.iter().map(|r| self.sub(r)).collect()
    }

    fn id(&self, k: usize, u: &Subspace) -> Result<u32, VerifyError> {
        if u.dim() != k {
            return Err(VerifyError::MalformedRecord(format!("{u:?} should have dimension {k}")));
        }
        self.level(k).index_of(u).ok_or_else(|| VerifyError::MalformedRecord(format!("{u:?} is not in (T-R)_{k}")))
    }

    fn contains(&self, big: &Subspace, small: &Subspace) -> bool {
        big.contains(self.space.field(), small).unwrap()
    }

    /// Ids of the points of `u` other than its radical point, sorted.
    fn plane_span(&self, u: &Subspace) -> Vec<u32> {
        let (rad, _) = self.space.radical(u);
        let mut ids: Vec<u32> = u
            .points(self.space.field())
            .iter()
            .filter(|q| **q != rad)
            .map(|q| self.level(1).index_of(q).unwrap())
            .collect();
        ids.sort_unstable();
        ids
    }

    fn faulty(&self, check: &str) -> bool {
        self.fault.as_deref().is_some_and(|f| check.starts_with(f))
    }
}

/// Re-evaluates one check. `Ok(true)` means the property holds.
pub fn evaluate(env: &Env, check: &str, inputs: &[Vec<Vec<u8>>]) -> Result<bool, VerifyError> {
    let (base, arg) = match check.split_once('@') {
        Some((b, a)) => (b, Some(a)),
        None => (check, None),
    };
    let holds = match base {
        "A.parity" | "A.radical" | "A.perp" | "A.classes" | "A.tangential-form" | "A.rdim-bound" => {
            let u = &env.subs(inputs, 1)?[0];
            check_a(env, base, u)
        }
        "A.count" => {
            let k: usize = arg.and_then(|a| a.parse().ok()).ok_or_else(|| malformed("A.count needs @k"))?;
            if k > env.n() {
                return Err(malformed("level out of range"));
            }
            check_a_count(env, k)
        }
        b if b.starts_with("B.") => check_b(env, b, inputs)?,
        b if b.starts_with("C.") => check_c(env, b, inputs)?,
        b if b.starts_with("D.") => check_d(env, b, inputs)?,
        b if b.starts_with("E.") => check_e(env, b, arg, inputs)?,
        b if b.starts_with("F.") => check_f(env, b, inputs)?,
        b if b.starts_with("G.") => check_g(env, b, inputs)?,
        b if b.starts_with("H.") => check_h(env, b, inputs)?,
        _ => return Err(VerifyError::UnknownCheck(check.to_string())),
    };
    Ok(holds != env.faulty(check))
}

fn malformed(msg: &str) -> VerifyError {
    VerifyError::MalformedRecord(msg.to_string())
}

/// Re-runs the single check of a failure record.
pub fn replay(spec: &SuiteSpec, record: &FailureRecord) -> Result<bool, VerifyError> {
    let env = Env::new(spec)?;
    evaluate(&env, &record.check, &record.inputs)
}

// ---------------------------------------------------------------- suite A

fn check_a(env: &Env, check: &str, u: &Subspace) -> bool {
    let s = &env.space;
    let f = s.field();
    let n = s.n();
    let d = u.dim();
    let r = s.rdim(u);
    match check {
        "A.parity" => (d - r) % 2 == 0,
        "A.radical" => {
            let (rad, rd) = s.radical(u);
            let up = s.perp(u);
            rad.dim() == rd && rd == r && env.contains(u, &rad) && env.contains(&up, &rad) && rad == u.intersect(f, &up).unwrap()
        }
        "A.perp" => {
            let up = s.perp(u);
            up.dim() == n - d && s.perp(&up) == *u && s.rdim(&up) == r
        }
        "A.classes" => {
            let c = s.classify(u);
            c.dim == d
                && c.rdim == r
                && c.is_isotropic == (r == d)
                && c.is_regular == (r == 0)
                && c.is_tangential == (r == 1)
                && c.in_tr == (r <= 1)
                && (!c.is_tangential || d % 2 == 1)
                && (!c.is_regular || d % 2 == 0)
        }
        "A.tangential-form" => {
            // tangential iff a regular hyperplane plus a point orthogonal to it
            let witnessed = u.hyperplanes(f).iter().any(|h| {
                s.rdim(h) == 0 && u.points(f).iter().any(|q| !env.contains(h, q) && env.contains(&s.perp(h), q))
            });
            let decomposed = match s.tangential_decompose(u) {
                Ok((u0, q)) => {
                    s.rdim(&u0) == 0 && q.dim() == 1 && env.contains(&s.perp(&u0), &q) && u0.sum(f, &q).unwrap() == *u
                }
                Err(_) => r != 1,
            };
            witnessed == (r == 1) && decomposed
        }
        "A.rdim-bound" => {
            // rdim(U) is at most the codimension of a regular subspace inside
            // it, and at most the codimension of U in a regular superspace
            let up = s.perp(u);
            let below = (0..=d).all(|e| u.subspaces(f, e).iter().all(|x| s.rdim(x) != 0 || r <= d - e));
            let above = (0..=n - d).all(|e| up.subspaces(f, e).iter().all(|x| s.rdim(x) != 0 || r <= n - d - e));
            let hyperplane_rule = !(u.hyperplanes(f).iter().any(|h| s.rdim(h) == 0)
                || u.superspaces(f).iter().any(|b| s.rdim(b) == 0))
                || r == 1;
            below && above && hyperplane_rule
        }
        _ => unreachable!(),
    }
}

fn check_a_count(env: &Env, k: usize) -> bool {
    let s = &env.space;
    let (n, p) = (s.n(), s.field().p() as u64);
    let all = all_subspaces(s.field(), n, k);
    let tr = all.iter().filter(|u| s.rdim(u) <= 1).count();
    all.len() as u128 == gaussian_binomial(n, k, p)
        && tr == enumerate_tr(s, k).len()
        && tr == all.iter().filter(|u| s.rdim(&s.perp(u)) <= 1).count()
}

// ---------------------------------------------------------------- suite B

fn check_b(env: &Env, check: &str, inputs: &[Vec<Vec<u8>>]) -> Result<bool, VerifyError> {
    let s = &env.space;
    let f = s.field();
    let pls = env.copolar();
    let rows = env.copolar_rows();
    let form0 = |a: &Subspace, b: &Subspace| s.form(a.row(0), b.row(0)) == 0;
    let ids = |subs: &[Subspace]| -> Result<Vec<u32>, VerifyError> { subs.iter().map(|u| env.id(1, u)).collect() };
    Ok(match check {
        "B.collinear-iff-nonorthogonal" => {
            let v = env.subs(inputs, 2)?;
            let i = ids(&v)?;
            if i[0] == i[1] {
                return Err(malformed("B.collinear-iff-nonorthogonal needs distinct points"));
            }
            pls.collinear(i[0], i[1]) == !form0(&v[0], &v[1])
        }
        "B.triangle-iff-tangential" => {
            let pi = &env.subs(inputs, 1)?[0];
            if pi.dim() != 3 {
                return Err(malformed("B.triangle-iff-tangential needs a plane"));
            }
            let pts: Vec<u32> = pi.points(f).iter().map(|q| env.id(1, q)).collect::<Result<_, _>>()?;
            let has_triangle = pts.iter().enumerate().any(|(i, &a)| {
                pts[i + 1..].iter().enumerate().any(|(j, &b)| {
                    pts[i + j + 2..].iter().any(|&c| pls.is_triangle([a, b, c]))
                })
            });
            has_triangle == (s.rdim(pi) == 1)
        }
        "B.tangential-lines" => {
            let v = env.subs(inputs, 2)?;
            let (pi, line) = (&v[0], &v[1]);
            if pi.dim() != 3 || s.rdim(pi) != 1 || line.dim() != 2 || !env.contains(pi, line) {
                return Err(malformed("B.tangential-lines needs a tangential plane and a line in it"));
            }
            let (rad, _) = s.radical(pi);
            let through = env.contains(line, &rad);
            match s.rdim(line) {
                2 => through,
                0 => !through,
                _ => false,
            }
        }
        "B.triangle-span" => {
            let v = env.subs(inputs, 3)?;
            let t = ids(&v)?;
            let t = [t[0], t[1], t[2]];
            let pi = v[0].sum(f, &v[1])?.sum(f, &v[2])?;
            let plane = triangle_span(pls, t)?;
            let (rad, _) = s.radical(&pi);
            let rad_id = env.id(1, &rad)?;
            let hole_ok = if s.n() == 4 { plane.hole == Some(rad_id) } else { plane.hole.is_none_or(|h| h == rad_id) };
            s.rdim(&pi) == 1 && plane.span == env.plane_span(&pi) && hole_ok
        }
        "B.wedge-witness" => {
            let v = env.subs(inputs, 2)?;
            let (p1, p2) = (&v[0], &v[1]);
            let line = p1.intersect(f, p2)?;
            if p1 == p2 || s.rdim(p1) != 1 || s.rdim(p2) != 1 || line.dim() != 2 || s.rdim(&line) != 0 {
                return Err(malformed("B.wedge-witness needs two tangential planes sharing a regular line"));
            }
            let (r1, r2) = (s.radical(p1).0, s.radical(p2).0);
            let off = |pi: &Subspace, rad: &Subspace| -> Vec<Subspace> {
                pi.points(f).into_iter().filter(|q| q != rad && !env.contains(&line, q)).collect()
            };
            let on_line = line.points(f);
            let tetrahedron = off(p1, &r1).iter().any(|a1| {
                off(p2, &r2).iter().any(|a2| {
                    !form0(a1, a2)
                        && on_line.iter().enumerate().any(|(i, a3)| {
                            on_line[i + 1..].iter().any(|a4| {
                                [a1, a2].iter().all(|x| !form0(x, a3) && !form0(x, a4))
                            })
                        })
                })
            });
            tetrahedron && plane_related(pls, &env.plane_span(p1), &env.plane_span(p2)).wedge
        }
        "B.diamond-witness" => {
            let v = env.subs(inputs, 4)?;
            let (p1, p2, a3, a4) = (&v[0], &v[1], &v[2], &v[3]);
            let line = p1.intersect(f, p2)?;
            let (r1, r2) = (s.radical(p1).0, s.radical(p2).0);
            if p1 == p2
                || s.rdim(p1) != 1
                || s.rdim(p2) != 1
                || line.dim() != 2
                || s.rdim(&line) != 2
                || a3 == a4
                || !env.contains(&line, a3)
                || !env.contains(&line, a4)
                || [&r1, &r2].iter().any(|r| *r == a3 || *r == a4)
            {
                return Err(malformed("B.diamond-witness hypotheses fail"));
            }
            let off = |pi: &Subspace| -> Vec<Subspace> {
                pi.points(f).into_iter().filter(|q| !env.contains(&line, q)).collect()
            };
            let witness = off(p1).iter().any(|a1| {
                off(p2).iter().any(|a2| {
                    !form0(a1, a2) && [a1, a2].iter().all(|x| !form0(x, a3) && !form0(x, a4))
                })
            });
            witness && plane_related(pls, &env.plane_span(p1), &env.plane_span(p2)).diamond
        }
        "B.meeting-planes-related" => {
            let v = env.subs(inputs, 2)?;
            let (s1, s2) = (env.plane_span(&v[0]), env.plane_span(&v[1]));
            if v[0] == v[1] || s.rdim(&v[0]) != 1 || s.rdim(&v[1]) != 1 || intersect_sorted(&s1, &s2).len() < 2 {
                return Err(malformed("B.meeting-planes-related hypotheses fail"));
            }
            let rel = plane_related(pls, &s1, &s2);
            rel.wedge || rel.diamond
        }
        "B.plane-graph-connected" => {
            // planes are related when their spans share two points
            let spans: Vec<Vec<u32>> = tangential_planes(env).iter().map(|u| env.plane_span(u)).collect();
            let mut parent: Vec<usize> = (0..spans.len()).collect();
            fn root(parent: &mut [usize], mut x: usize) -> usize {
                while parent[x] != x {
                    parent[x] = parent[parent[x]];
                    x = parent[x];
                }
                x
            }
            let mut first: HashMap<(u32, u32), usize> = HashMap::new();
            for (i, sp) in spans.iter().enumerate() {
                for (j, &x) in sp.iter().enumerate() {
                    for &y in &sp[j + 1..] {
                        let other = *first.entry((x, y)).or_insert(i);
                        let (ra, rb) = (root(&mut parent, i), root(&mut parent, other));
                        parent[ra] = rb;
                    }
                }
            }
            let r0 = root(&mut parent, 0);
            (0..spans.len()).all(|i| root(&mut parent, i) == r0)
        }
        "B.point-in-plane" => {
            let q = &env.subs(inputs, 1)?[0];
            let qid = env.id(1, q)?;
            let planes: HashSet<Subspace> = q.superspaces(f).iter().flat_map(|l| l.superspaces(f)).collect();
            planes.iter().any(|pi| s.rdim(pi) == 1 && env.plane_span(pi).binary_search(&qid).is_ok())
        }
        "B.closure-covers" => {
            let v = env.subs(inputs, 3)?;
            let t = ids(&v)?;
            delta_closure(pls, [t[0], t[1], t[2]])?.len() == env.level(1).len()
        }
        "B.perp-definable" => {
            let v = env.subs(inputs, 2)?;
            let i = ids(&v)?;
            form0(&v[0], &v[1]) == (i[0] == i[1] || !pls.collinear(i[0], i[1]))
        }
        "B.pair-witnesses" => {
            let v = env.subs(inputs, 4)?;
            let [a1, a2, b1, b2]: [u32; 4] = ids(&v)?.try_into().unwrap();
            let c = |x: u32, y: u32| pls.collinear(x, y);
            if !(c(a1, a2) && b1 != b2 && !c(b1, b2) && [a1, a2].iter().all(|&a| c(a, b1) && c(a, b2))) {
                return Err(malformed("B.pair-witnesses hypotheses fail"));
            }
            let mut common = rows[a1 as usize].clone();
            for x in [a2, b1, b2] {
                common.intersect_with(&rows[x as usize]);
            }
            let cs: Vec<usize> = common.ones().collect();
            cs.iter().enumerate().any(|(i, &c1)| cs[i + 1..].iter().any(|&c2| !rows[c1].contains(c2)))
        }
        "B.triple-witnesses" => {
            let v = env.subs(inputs, 3)?;
            let t = ids(&v)?;
            if !pls.is_triangle([t[0], t[1], t[2]]) {
                return Err(malformed("B.triple-witnesses needs a triangle"));
            }
            let mut common = rows[t[0] as usize].clone();
            common.intersect_with(&rows[t[1] as usize]);
            common.intersect_with(&rows[t[2] as usize]);
            let cs: Vec<usize> = common.ones().collect();
            cs.iter().any(|&b1| {
                let far: Vec<usize> = cs.iter().copied().filter(|&b| b != b1 && !rows[b1].contains(b)).collect();
                far.iter().enumerate().any(|(i, &b2)| far[i + 1..].iter().any(|&b3| rows[b2].contains(b3)))
            })
        }
        _ => return Err(VerifyError::UnknownCheck(check.to_string())),
    })
}

// ---------------------------------------------------------------- suite C

fn expected_pencil_size(p: usize, k: usize) -> usize {
    if k % 2 == 1 {
        p + 1
    } else {
        p
    }
}

/// Projective dimension arithmetic: points of PG(d-1, p).
fn projective_count(p: usize, d: usize) -> usize {
    (p.pow(d as u32) - 1) / (p - 1)
}

fn expected_structure_sizes(p: usize, n: usize, k: usize) -> (usize, usize) {
    if k % 2 == 0 {
        (p.pow((n - k) as u32), p.pow(k as u32))
    } else {
        (projective_count(p, n - k + 1), projective_count(p, k + 1))
    }
}

fn check_c(env: &Env, check: &str, inputs: &[Vec<Vec<u8>>]) -> Result<bool, VerifyError> {
    let s = &env.space;
    let f = s.field();
    let p = f.order();
    let n = s.n();
    let k = env.k()?;
    let g = env.level(k);
    let coll = env.graph(k, AdjacencyKind::Collinear);
    let star_index = |h: &Subspace| g.star_centres().binary_search(h).ok();
    let top_index = |b: &Subspace| g.top_carriers().binary_search(b).ok();
    Ok(match check {
        "C.pencil" => {
            let v = env.subs(inputs, 2)?;
            let (h, b) = (&v[0], &v[1]);
            let (Some(i), Some(j)) = (star_index(h), top_index(b)) else {
                return Err(malformed("C.pencil needs a star centre and a top carrier"));
            };
            let members = intersect_sorted(g.star_members(i), g.top_members(j));
            let param: Vec<u32> = crate::grassmann::pencil(s, h, b, k)?
                .iter()
                .map(|u| env.id(k, u))
                .collect::<Result<_, _>>()?;
            let mut param = param;
            param.sort_unstable();
            members.len() == expected_pencil_size(p, k) && members == param
        }
        "C.pencil-empty-or-two" => {
            let v = env.subs(inputs, 2)?;
            let (h, b) = (&v[0], &v[1]);
            let (Some(i), Some(j)) = (star_index(h), top_index(b)) else {
                return Err(malformed("C.pencil-empty-or-two needs a star centre and a top carrier"));
            };
            if !env.contains(b, h) {
                return Err(malformed("centre not inside carrier"));
            }
            intersect_sorted(g.star_members(i), g.top_members(j)).len() != 1
        }
        "C.star-param" => {
            let h = &env.subs(inputs, 1)?[0];
            let i = star_index(h).ok_or_else(|| malformed("not a star centre"))?;
            let mut ids: Vec<u32> = star(s, h, k)?.iter().map(|u| env.id(k, u)).collect::<Result<_, _>>()?;
            ids.sort_unstable();
            ids == g.star_members(i)
        }
        "C.top-param" => {
            let b = &env.subs(inputs, 1)?[0];
            let j = top_index(b).ok_or_else(|| malformed("not a top carrier"))?;
            let mut ids: Vec<u32> = top(s, b, k)?.iter().map(|u| env.id(k, u)).collect::<Result<_, _>>()?;
            ids.sort_unstable();
            ids == g.top_members(j)
        }
        "C.structure-size" => {
            let (ss, ts) = expected_structure_sizes(p, n, k);
            (0..g.star_centres().len()).all(|i| g.star_members(i).len() == ss)
                && (0..g.top_carriers().len()).all(|j| g.top_members(j).len() == ts)
        }
        "C.adjacency" => {
            let v = env.subs(inputs, 2)?;
            let (a, b) = (env.id(k, &v[0])?, env.id(k, &v[1])?);
            if a == b {
                return Err(malformed("C.adjacency needs distinct points"));
            }
            let mut ok = true;
            for kind in AdjacencyKind::ALL {
                let direct = crate::grassmann::adjacent(s, &v[0], &v[1], kind)?;
                ok &= env.graph(k, kind).has_edge(a as usize, b as usize) == direct;
            }
            if k % 2 == 0 {
                let projective = v[0].intersect(f, &v[1])?.dim() + 1 == k;
                ok &= AdjacencyKind::ALL.iter().all(|&kind| env.graph(k, kind).has_edge(a as usize, b as usize) == projective);
            }
            ok
        }
        "C.cliques" => {
            if k % 2 == 1 {
                return Err(malformed("maximal cliques are checked at even k"));
            }
            let mut found = maximal_cliques(coll, PAIR_BOUND)?;
            found.sort_unstable();
            let mut expected: Vec<Vec<u32>> = (0..g.star_centres().len())
                .map(|i| g.star_members(i).to_vec())
                .chain((0..g.top_carriers().len()).map(|j| g.top_members(j).to_vec()))
                .collect();
            expected.sort_unstable();
            expected.dedup();
            found == expected
        }
        "C.clique-meet" => {
            if k % 2 == 1 {
                return Err(malformed("clique intersections are checked at even k"));
            }
            let v = env.subs(inputs, 2)?;
            let members = |u: &Subspace| -> Result<(bool, Vec<u32>), VerifyError> {
                if u.dim() + 1 == k {
                    Ok((true, g.star_members(star_index(u).ok_or_else(|| malformed("not a star centre"))?).to_vec()))
                } else {
                    Ok((false, g.top_members(top_index(u).ok_or_else(|| malformed("not a top carrier"))?).to_vec()))
                }
            };
            let (is_star1, m1) = members(&v[0])?;
            let (is_star2, m2) = members(&v[1])?;
            let meet = intersect_sorted(&m1, &m2);
            if is_star1 == is_star2 {
                meet.len() <= 1
            } else if meet.len() >= 2 {
                let (h, b) = if is_star1 { (&v[0], &v[1]) } else { (&v[1], &v[0]) };
                env.contains(b, h) && meet.len() == expected_pencil_size(p, k)
            } else {
                true
            }
        }
        "C.distinguish" => {
            let (ss, ts) = expected_structure_sizes(p, n, k);
            (ss == ts) == (2 * k == n)
        }
        "C.star-copolar" => {
            if k % 2 == 0 {
                return Err(malformed("copolar restriction is checked at odd k"));
            }
            let v = env.subs(inputs, 3)?;
            let (h, u, w) = (&v[0], &v[1], &v[2]);
            let hp = s.perp(h);
            let (a, b) = (env.id(k, u)?, env.id(k, w)?);
            if a == b || !env.contains(u, h) || !env.contains(w, h) {
                return Err(malformed("C.star-copolar needs two members of one star"));
            }
            let qu = u.intersect(f, &hp)?;
            let qw = w.intersect(f, &hp)?;
            qu.dim() == 1 && qw.dim() == 1 && coll.has_edge(a as usize, b as usize) == (s.form(qu.row(0), qw.row(0)) != 0)
        }
        "C.top-copolar" => {
            if k % 2 == 0 {
                return Err(malformed("copolar restriction is checked at odd k"));
            }
            let v = env.subs(inputs, 3)?;
            let (bb, u, w) = (&v[0], &v[1], &v[2]);
            let (a, b) = (env.id(k, u)?, env.id(k, w)?);
            if a == b || !env.contains(bb, u) || !env.contains(bb, w) {
                return Err(malformed("C.top-copolar needs two members of one top"));
            }
            let qu = bb.intersect(f, &s.perp(u))?;
            let qw = bb.intersect(f, &s.perp(w))?;
            qu.dim() == 1 && qw.dim() == 1 && coll.has_edge(a as usize, b as usize) == (s.form(qu.row(0), qw.row(0)) != 0)
        }
        "C.delta-axiom" => {
            let v = env.subs(inputs, 3)?;
            let (h, b, u) = (&v[0], &v[1], &v[2]);
            let (Some(i), Some(j)) = (star_index(h), top_index(b)) else {
                return Err(malformed("C.delta-axiom needs a pencil"));
            };
            let line = intersect_sorted(g.star_members(i), g.top_members(j));
            let x = env.id(k, u)?;
            if line.len() < 2 || line.contains(&x) {
                return Err(malformed("C.delta-axiom needs a point off a line"));
            }
            let seen = line.iter().filter(|&&y| coll.has_edge(x as usize, y as usize)).count();
            seen == 0 || seen == 1 || seen + 1 == line.len()
        }
        _ => return Err(VerifyError::UnknownCheck(check.to_string())),
    })
}

// ---------------------------------------------------------------- suite D

fn check_d(env: &Env, check: &str, inputs: &[Vec<Vec<u8>>]) -> Result<bool, VerifyError> {
    let k = env.k()?;
    let v = env.subs(inputs, 3)?;
    let t: Vec<u32> = v.iter().map(|u| env.id(k, u)).collect::<Result<_, _>>()?;
    if t[0] == t[1] {
        return Err(malformed("the first two points must differ"));
    }
    let g = env.level(k);
    let truth = g.collinear(t[0], t[1], t[2]);
    Ok(match check {
        "D.from-adjacency" => collinear_from_adjacency(env.graph(k, AdjacencyKind::Collinear), t[0], t[1], t[2]) == truth,
        "D.from-lower" => {
            let lower = env.graph(k, AdjacencyKind::Lower);
            let c = TriangleClassifier::new(g, lower)?;
            collinear_from_lower(&c, t[0], t[1], t[2]) == truth
        }
        _ => return Err(VerifyError::UnknownCheck(check.to_string())),
    })
}

// ---------------------------------------------------------------- suite E

fn check_e(env: &Env, check: &str, arg: Option<&str>, inputs: &[Vec<Vec<u8>>]) -> Result<bool, VerifyError> {
    let k = env.k()?;
    let g = env.level(k);
    let coll = env.graph(k, AdjacencyKind::Collinear);
    let connected_within = |members: &[u32]| coll.induced(members).is_connected();
    Ok(match check {
        "E.connected" => {
            let kind: AdjacencyKind =
                arg.ok_or_else(|| malformed("E.connected needs @kind"))?.parse().map_err(|e: String| malformed(&e))?;
            env.graph(k, kind).is_connected()
        }
        "E.copolar-diameter" => env.copolar().collinearity().diameter().is_some_and(|d| d <= 2),
        "E.star-connected" => {
            let h = &env.subs(inputs, 1)?[0];
            let i = g.star_centres().binary_search(h).map_err(|_| malformed("not a star centre"))?;
            connected_within(g.star_members(i))
        }
        "E.top-connected" => {
            let b = &env.subs(inputs, 1)?[0];
            let j = g.top_carriers().binary_search(b).map_err(|_| malformed("not a top carrier"))?;
            connected_within(g.top_members(j))
        }
        "E.lower-path" => {
            // a lower-adjacent pair is joined by a collinearity path inside
            // the star of their intersection
            let v = env.subs(inputs, 2)?;
            let (a, b) = (env.id(k, &v[0])?, env.id(k, &v[1])?);
            if !env.graph(k, AdjacencyKind::Lower).has_edge(a as usize, b as usize) {
                return Err(malformed("E.lower-path needs a lower-adjacent pair"));
            }
            let h = v[0].intersect(env.space.field(), &v[1])?;
            let i = g.star_centres().binary_search(&h).map_err(|_| malformed("intersection is not a star centre"))?;
            let members = g.star_members(i);
            let sub = coll.induced(members);
            let (ia, ib) = (members.binary_search(&a).unwrap(), members.binary_search(&b).unwrap());
            sub.distances(ia)[ib].is_some()
        }
        _ => return Err(VerifyError::UnknownCheck(check.to_string())),
    })
}

// ---------------------------------------------------------------- suite F

fn check_f(env: &Env, check: &str, inputs: &[Vec<Vec<u8>>]) -> Result<bool, VerifyError> {
    let k = env.k()?;
    let kind = match check {
        "F.lower" => AdjacencyKind::Lower,
        "F.upper" => AdjacencyKind::Upper,
        _ => return Err(VerifyError::UnknownCheck(check.to_string())),
    };
    let v = env.subs(inputs, 3)?;
    let t: Vec<u32> = v.iter().map(|u| env.id(k, u)).collect::<Result<_, _>>()?;
    let c = TriangleClassifier::new(env.level(k), env.graph(k, kind))?;
    let t = [t[0], t[1], t[2]];
    Ok(c.classify(t, TriangleMethod::AdjacencyOnly)? == c.classify(t, TriangleMethod::GroundTruth)?)
}

// ---------------------------------------------------------------- suite G

fn expected_automorphisms(env: &Env, k: usize) -> BigUint {
    let s = &env.space;
    let base = sp_order(s.m(), s.field().p() as u32);
    if 2 * k == s.n() {
        base * 2u32
    } else {
        base
    }
}

fn check_g(env: &Env, check: &str, inputs: &[Vec<Vec<u8>>]) -> Result<bool, VerifyError> {
    let s = &env.space;
    let k = env.k()?;
    let g = env.level(k);
    Ok(match check {
        "G.similitude" => {
            let [rows] = inputs else {
                return Err(malformed("G.similitude needs one matrix"));
            };
            let n = s.n();
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(malformed("similitude matrix has the wrong shape"));
            }
            let m = Matrix::from_data(n, n, rows.concat());
            let sim = s.similitude(m)?;
            let perm = lift_similitude(g, &sim);
            AdjacencyKind::ALL.iter().all(|&kind| is_automorphism(env.graph(k, kind), &perm))
        }
        "G.kappa" => {
            let dual = env.level(s.n() - k);
            let perm = lift_kappa(g, dual);
            AdjacencyKind::ALL
                .iter()
                .all(|&kind| is_isomorphism(env.graph(k, kind), env.graph(s.n() - k, kind.dual()), &perm))
        }
        "G.count" => {
            let count = automorphism_count(env.graph(k, AdjacencyKind::Collinear), DEFAULT_AUTOMORPHISM_BUDGET)
                ?;
            count == expected_automorphisms(env, k)
        }
        _ => return Err(VerifyError::UnknownCheck(check.to_string())),
    })
}

// ---------------------------------------------------------------- suite H

fn check_h(env: &Env, check: &str, inputs: &[Vec<Vec<u8>>]) -> Result<bool, VerifyError> {
    let s = &env.space;
    let k = env.k()?;
    Ok(match check {
        "H.pipeline" => {
            if 2 * k == s.n() {
                return Err(malformed("the pipeline needs k != n - k"));
            }
            env.pipeline(k)?.matches
        }
        "H.middle-refused" => {
            matches!(full_pipeline(s, k, PAIR_BOUND), Err(ReconstructError::MiddleLevel { .. }))
        }
        "H.lower-star" | "H.upper-top" => {
            let lower = check == "H.lower-star";
            let kind = if lower { AdjacencyKind::Lower } else { AdjacencyKind::Upper };
            let g = env.level(k);
            let c = TriangleClassifier::new(g, env.graph(k, kind))?;
            let v = env.subs(inputs, 3)?;
            let t: Vec<u32> = v.iter().map(|u| env.id(k, u)).collect::<Result<_, _>>()?;
            let t = [t[0], t[1], t[2]];
            if !c.is_triangle(t) || !c.is_s_triangle(t) {
                return Err(malformed("needs a triangle judged S by adjacency"));
            }
            let mut recovered = c.common(&t);
            recovered.extend(t);
            recovered.sort_unstable();
            let f = s.field();
            let expected = if lower {
                let h = v[0].intersect(f, &v[1])?.intersect(f, &v[2])?;
                g.star_centres().binary_search(&h).ok().map(|i| g.star_members(i))
            } else {
                let b = v[0].sum(f, &v[1])?.sum(f, &v[2])?;
                g.top_carriers().binary_search(&b).ok().map(|j| g.top_members(j))
            };
            expected == Some(recovered.as_slice())
        }
        _ => return Err(VerifyError::UnknownCheck(check.to_string())),
    })
}

// ---------------------------------------------------------------- running

/// Item families of one suite run, before evaluation.
struct Plan {
    items: Vec<Item>,
    details: BTreeMap<String, Value>,
}

impl Plan {
    fn new() -> Self {
        Plan { items: Vec::new(), details: BTreeMap::new() }
    }

    fn note(&mut self, text: &str) {
        let notes = self.details.entry("notes".into()).or_insert_with(|| json!([]));
        notes.as_array_mut().unwrap().push(json!(text));
    }
}

/// Draws `count` items, each from `draw` which may reject (None).
fn sample<R: Rng, F: FnMut(&mut R) -> Option<Item>>(
    rng: &mut R,
    count: usize,
    mut draw: F,
    family: &str,
    plan: &mut Plan,
) {
    let mut rejected = 0usize;
    let mut got = 0usize;
    while got < count {
        match draw(rng) {
            Some(it) => {
                plan.items.push(it);
                got += 1;
            }
            None => {
                rejected += 1;
                if rejected >= REJECTION_CAP {
                    plan.note(&format!("{family}: rejection cap reached after {got} samples"));
                    break;
                }
            }
        }
    }
}

fn pick<'a, T, R: Rng>(rng: &mut R, xs: &'a [T]) -> Option<&'a T> {
    if xs.is_empty() {
        None
    } else {
        Some(&xs[rng.gen_range(0..xs.len())])
    }
}

fn suite_points(env: &Env, spec: &SuiteSpec) -> usize {
    match spec.suite {
        SuiteId::A => {
            let (n, p) = (env.n(), env.space.field().p() as u64);
            match env.k {
                Some(k) => gaussian_binomial(n, k, p) as usize,
                None => (1..n).map(|k| gaussian_binomial(n, k, p) as usize).max().unwrap_or(0),
            }
        }
        SuiteId::B => env.level(1).len(),
        _ => env.level(env.k.unwrap()).len(),
    }
}

/// Runs one suite and assembles its report.
pub fn run_suite(spec: &SuiteSpec) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    if spec.suite.needs_level() && spec.instance.k.is_none() {
        return Err(VerifyError::MissingLevel { suite: spec.suite });
    }
    let env = Env::new(spec)?;
    if spec.mode == Mode::Exhaustive {
        let points = suite_points(&env, spec);
        if points > spec.suite.bound() {
            return Err(VerifyError::SizeBound { suite: spec.suite, points, bound: spec.suite.bound() });
        }
    }
    let mut rng = match spec.mode {
        Mode::Sampled { seed, .. } => Some(SplitMix64::seed_from_u64(seed)),
        Mode::Exhaustive => None,
    };
    let count = match spec.mode {
        Mode::Sampled { count, .. } => count,
        Mode::Exhaustive => 0,
    };
    let mut plan = Plan::new();
    match spec.suite {
        SuiteId::A => plan_a(&env, rng.as_mut(), count, &mut plan),
        SuiteId::B => plan_b(&env, rng.as_mut(), count, &mut plan),
        SuiteId::C => plan_c(&env, rng.as_mut(), count, &mut plan),
        SuiteId::D => plan_d(&env, rng.as_mut(), count, &mut plan),
        SuiteId::E => plan_e(&env, rng.as_mut(), count, &mut plan),
        SuiteId::F => plan_f(&env, rng.as_mut(), count, &mut plan),
        SuiteId::G => plan_g(&env, rng.as_mut(), count, &mut plan),
        SuiteId::H => plan_h(&env, rng.as_mut(), count, &mut plan)?,
    }
    let outcomes: Vec<Result<bool, VerifyError>> =
        plan.items.par_iter().map(|it| evaluate(&env, &it.check, &it.inputs)).collect();
    let mut failures = Vec::new();
    let mut per_check: BTreeMap<String, u64> = BTreeMap::new();
    for (it, outcome) in plan.items.iter().zip(outcomes) {
        *per_check.entry(it.check.clone()).or_default() += 1;
        if !outcome? {
            failures.push(FailureRecord { check: it.check.clone(), inputs: it.inputs.clone() });
        }
    }
    failures.sort();
    plan.details.insert("checks".into(), json!(per_check));
    if spec.suite == SuiteId::G && env.k.is_some_and(|k| env.level(k).len() <= DEFAULT_AUTOMORPHISM_BUDGET) {
        plan.details.insert("expected_automorphisms".into(), json!(expected_automorphisms(&env, env.k.unwrap()).to_string()));
    }
    let (mode, seed) = match spec.mode {
        Mode::Exhaustive => ("exhaustive", None),
        Mode::Sampled { seed, .. } => ("sampled", Some(seed)),
    };
    Ok(VerificationReport {
        suite: spec.suite,
        instance: spec.instance,
        mode: mode.into(),
        seed,
        checks_run: plan.items.len() as u64,
        pass: failures.is_empty(),
        failures,
        elapsed_ms: start.elapsed().as_millis() as u64,
        details: plan.details,
    })
}

fn plan_a(env: &Env, rng: Option<&mut SplitMix64>, count: usize, plan: &mut Plan) {
    let s = &env.space;
    let levels: Vec<usize> = match env.k {
        Some(k) => vec![k],
        None => (1..s.n()).collect(),
    };
    const CHECKS: [&str; 6] = ["A.parity", "A.radical", "A.perp", "A.classes", "A.tangential-form", "A.rdim-bound"];
    let mut rng = rng;
    for k in levels {
        let all = all_subspaces(s.field(), s.n(), k);
        let chosen: Vec<&Subspace> = match rng.as_deref_mut() {
            None => {
                plan.items.push(item(&format!("A.count@{k}"), &[]));
                all.iter().collect()
            }
            Some(r) => (0..count).map(|_| pick(r, &all).unwrap()).collect(),
        };
        for u in chosen {
            for c in CHECKS {
                plan.items.push(item(c, &[u]));
            }
        }
    }
}

fn tangential_planes(env: &Env) -> Vec<Subspace> {
    let s = &env.space;
    all_subspaces(s.field(), s.n(), 3).into_iter().filter(|u| s.rdim(u) == 1).collect()
}

fn plan_b(env: &Env, rng: Option<&mut SplitMix64>, count: usize, plan: &mut Plan) {
    let s = &env.space;
    let f = s.field();
    let g1 = env.level(1);
    let pls = env.copolar();
    let pts = g1.points();
    let npts = pts.len() as u32;
    let c = |a: u32, b: u32| pls.collinear(a, b);
    let planes = all_subspaces(f, s.n(), 3);
    let span_of = |pi: &Subspace| env.plane_span(pi);
    let p = |i: u32| &pts[i as usize];
    let b6_items = |p1: &Subspace, p2: &Subspace| -> Vec<Item> {
        let line = p1.intersect(f, p2).unwrap();
        if p1 == p2 || line.dim() != 2 || s.rdim(&line) != 2 {
            return Vec::new();
        }
        let rads = [s.radical(p1).0, s.radical(p2).0];
        let on: Vec<Subspace> = line.points(f).into_iter().filter(|q| !rads.contains(q)).collect();
        let mut out = Vec::new();
        for (i, a3) in on.iter().enumerate() {
            for a4 in &on[i + 1..] {
                out.push(item("B.diamond-witness", &[p1, p2, a3, a4]));
            }
        }
        out
    };
    let shares_regular = |p1: &Subspace, p2: &Subspace| {
        let line = p1.intersect(f, p2).unwrap();
        p1 != p2 && line.dim() == 2 && s.rdim(&line) == 0
    };
    let pair_witness_ok = |a1: u32, a2: u32, b1: u32, b2: u32| {
        c(a1, a2) && b1 != b2 && !c(b1, b2) && [a1, a2].iter().all(|&a| c(a, b1) && c(a, b2))
    };
    match rng {
        None => {
            let tplanes = tangential_planes(env);
            for a in 0..npts {
                for b in a..npts {
                    if a != b {
                        plan.items.push(item("B.collinear-iff-nonorthogonal", &[p(a), p(b)]));
                    }
                    plan.items.push(item("B.perp-definable", &[p(a), p(b)]));
                }
                plan.items.push(item("B.point-in-plane", &[p(a)]));
            }
            for pi in &planes {
                plan.items.push(item("B.triangle-iff-tangential", &[pi]));
            }
            for pi in &tplanes {
                for line in pi.hyperplanes(f) {
                    plan.items.push(item("B.tangential-lines", &[pi, &line]));
                }
            }
            let triangles = pls.triangles();
            for t in &triangles {
                plan.items.push(item("B.triangle-span", &[p(t[0]), p(t[1]), p(t[2])]));
                plan.items.push(item("B.triple-witnesses", &[p(t[0]), p(t[1]), p(t[2])]));
            }
            let spans: Vec<Vec<u32>> = tplanes.iter().map(span_of).collect();
            for (i, p1) in tplanes.iter().enumerate() {
                for (j, p2) in tplanes.iter().enumerate().skip(i + 1) {
                    if shares_regular(p1, p2) {
                        plan.items.push(item("B.wedge-witness", &[p1, p2]));
                    }
                    plan.items.extend(b6_items(p1, p2));
                    if intersect_sorted(&spans[i], &spans[j]).len() >= 2 {
                        plan.items.push(item("B.meeting-planes-related", &[p1, p2]));
                    }
                }
            }
            plan.items.push(item("B.plane-graph-connected", &[]));
            let mut seen: HashSet<Vec<u32>> = HashSet::new();
            for t in &triangles {
                let pi = p(t[0]).sum(f, p(t[1])).unwrap().sum(f, p(t[2])).unwrap();
                if seen.insert(span_of(&pi)) {
                    plan.items.push(item("B.closure-covers", &[p(t[0]), p(t[1]), p(t[2])]));
                }
            }
            let coll_pairs: Vec<(u32, u32)> = pls.collinearity().edges().collect();
            let non_pairs: Vec<(u32, u32)> =
                (0..npts).flat_map(|a| (a + 1..npts).filter(move |&b| !c(a, b)).map(move |b| (a, b))).collect();
            for &(a1, a2) in &coll_pairs {
                for &(b1, b2) in &non_pairs {
                    if pair_witness_ok(a1, a2, b1, b2) {
                        plan.items.push(item("B.pair-witnesses", &[p(a1), p(a2), p(b1), p(b2)]));
                    }
                }
            }
        }
        Some(r) => {
            let g = pls.collinearity();
            let rand_pt = |r: &mut SplitMix64| r.gen_range(0..npts);
            let rand_tri = |r: &mut SplitMix64| -> Option<[u32; 3]> {
                let a = rand_pt(r);
                let b = *pick(r, g.neighbors(a as usize))?;
                let cn = g.common_neighbors(&[a, b]);
                let cc = *pick(r, &cn)?;
                pls.is_triangle([a, b, cc]).then_some([a, b, cc])
            };
            // planes through a random line of the wanted kind
            let rand_line = |r: &mut SplitMix64, regular: bool| -> Option<Subspace> {
                let (a, b) = (rand_pt(r), rand_pt(r));
                (a != b && c(a, b) == regular).then(|| p(a).sum(f, p(b)).unwrap())
            };
            let rand_plane_on = |r: &mut SplitMix64, line: &Subspace| -> Option<Subspace> {
                let q = p(rand_pt(r));
                let pi = line.sum(f, q).unwrap();
                (pi.dim() == 3 && s.rdim(&pi) == 1).then_some(pi)
            };
            sample(r, count, |r| {
                let (a, b) = (rand_pt(r), rand_pt(r));
                (a != b).then(|| item("B.collinear-iff-nonorthogonal", &[p(a), p(b)]))
            }, "B.collinear-iff-nonorthogonal", plan);
            sample(r, count, |r| Some(item("B.triangle-iff-tangential", &[pick(r, &planes).unwrap()])), "B.triangle-iff-tangential", plan);
            sample(r, count, |r| {
                let line = rand_line(r, true)?;
                let pi = rand_plane_on(r, &line)?;
                let line = pick(r, &pi.hyperplanes(f)).unwrap().clone();
                Some(item("B.tangential-lines", &[&pi, &line]))
            }, "B.tangential-lines", plan);
            sample(r, count, |r| rand_tri(r).map(|t| item("B.triangle-span", &[p(t[0]), p(t[1]), p(t[2])])), "B.triangle-span", plan);
            sample(r, count, |r| {
                let line = rand_line(r, true)?;
                let (p1, p2) = (rand_plane_on(r, &line)?, rand_plane_on(r, &line)?);
                shares_regular(&p1, &p2).then(|| item("B.wedge-witness", &[&p1, &p2]))
            }, "B.wedge-witness", plan);
            sample(r, count, |r| {
                let line = rand_line(r, false)?;
                let (p1, p2) = (rand_plane_on(r, &line)?, rand_plane_on(r, &line)?);
                let items = b6_items(&p1, &p2);
                pick(r, &items).cloned()
            }, "B.diamond-witness", plan);
            sample(r, count, |r| {
                let t = rand_tri(r)?;
                let p1 = p(t[0]).sum(f, p(t[1])).unwrap().sum(f, p(t[2])).unwrap();
                let p2 = rand_plane_on(r, &p(t[0]).sum(f, p(t[1])).unwrap())?;
                (p1 != p2).then(|| item("B.meeting-planes-related", &[&p1, &p2]))
            }, "B.meeting-planes-related", plan);
            plan.items.push(item("B.plane-graph-connected", &[]));
            sample(r, count, |r| Some(item("B.point-in-plane", &[p(rand_pt(r))])), "B.point-in-plane", plan);
            sample(r, count.min(50), |r| rand_tri(r).map(|t| item("B.closure-covers", &[p(t[0]), p(t[1]), p(t[2])])), "B.closure-covers", plan);
            sample(r, count, |r| {
                let (a, b) = (rand_pt(r), rand_pt(r));
                Some(item("B.perp-definable", &[p(a), p(b)]))
            }, "B.perp-definable", plan);
            sample(r, count, |r| {
                let a1 = rand_pt(r);
                let a2 = *pick(r, g.neighbors(a1 as usize))?;
                let cn = g.common_neighbors(&[a1, a2]);
                let b1 = *pick(r, &cn)?;
                let b2 = *pick(r, &cn)?;
                pair_witness_ok(a1, a2, b1, b2).then(|| item("B.pair-witnesses", &[p(a1), p(a2), p(b1), p(b2)]))
            }, "B.pair-witnesses", plan);
            sample(r, count, |r| rand_tri(r).map(|t| item("B.triple-witnesses", &[p(t[0]), p(t[1]), p(t[2])])), "B.triple-witnesses", plan);
            plan.note("B.closure-covers draws at most 50 closures");
        }
    }
}

/// All (H, B) with H a star centre, B a top carrier and H inside B.
fn incident_pairs(env: &Env, k: usize, h: &Subspace) -> Vec<Subspace> {
    let s = &env.space;
    let f = s.field();
    let g = env.level(k);
    let carriers: HashSet<Subspace> = h.superspaces(f).iter().flat_map(|u| u.superspaces(f)).collect();
    let mut out: Vec<Subspace> =
        carriers.into_iter().filter(|b| g.top_carriers().binary_search(b).is_ok()).collect();
    out.sort();
    out
}

fn plan_c(env: &Env, rng: Option<&mut SplitMix64>, count: usize, plan: &mut Plan) {
    let s = &env.space;
    let k = env.k.unwrap();
    let n = s.n();
    let g = env.level(k);
    let pts = g.points();
    let centres = g.star_centres();
    let carriers = g.top_carriers();
    let pencils = g.pencils();
    plan.details.insert("points".into(), json!(pts.len()));
    plan.details.insert("pencils".into(), json!(pencils.len()));
    plan.details.insert("stars".into(), json!(centres.len()));
    plan.details.insert("tops".into(), json!(carriers.len()));
    plan.items.push(item("C.structure-size", &[]));
    plan.items.push(item("C.distinguish", &[]));
    let even = k % 2 == 0;
    if even {
        plan.items.push(item("C.cliques", &[]));
    }
    let star_pair = |i: usize, a: usize, b: usize| -> Item {
        let m = g.star_members(i);
        item("C.star-copolar", &[&centres[i], &pts[m[a] as usize], &pts[m[b] as usize]])
    };
    let top_pair = |j: usize, a: usize, b: usize| -> Item {
        let m = g.top_members(j);
        item("C.top-copolar", &[&carriers[j], &pts[m[a] as usize], &pts[m[b] as usize]])
    };
    let structure = |i: usize| -> &Subspace {
        if i < centres.len() {
            &centres[i]
        } else {
            &carriers[i - centres.len()]
        }
    };
    let nstruct = centres.len() + carriers.len();
    match rng {
        None => {
            for pen in &pencils {
                plan.items.push(item("C.pencil", &[&pen.h, &pen.b]));
            }
            for h in centres {
                plan.items.push(item("C.star-param", &[h]));
                for b in incident_pairs(env, k, h) {
                    plan.items.push(item("C.pencil-empty-or-two", &[h, &b]));
                }
            }
            for b in carriers {
                plan.items.push(item("C.top-param", &[b]));
            }
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    plan.items.push(item("C.adjacency", &[&pts[a], &pts[b]]));
                }
            }
            if even {
                for i in 0..nstruct {
                    for j in i + 1..nstruct {
                        plan.items.push(item("C.clique-meet", &[structure(i), structure(j)]));
                    }
                }
            } else {
                for i in 0..centres.len() {
                    let len = g.star_members(i).len();
                    for a in 0..len {
                        for b in a + 1..len {
                            plan.items.push(star_pair(i, a, b));
                        }
                    }
                }
                for j in 0..carriers.len() {
                    let len = g.top_members(j).len();
                    for a in 0..len {
                        for b in a + 1..len {
                            plan.items.push(top_pair(j, a, b));
                        }
                    }
                }
                for pen in &pencils {
                    for (x, u) in pts.iter().enumerate() {
                        if pen.members.binary_search(&(x as u32)).is_err() {
                            plan.items.push(item("C.delta-axiom", &[&pen.h, &pen.b, u]));
                        }
                    }
                }
            }
        }
        Some(r) => {
            sample(r, count, |r| {
                let pen = pick(r, &pencils)?;
                Some(item("C.pencil", &[&pen.h, &pen.b]))
            }, "C.pencil", plan);
            sample(r, count, |r| {
                let h = pick(r, centres)?;
                let bs = incident_pairs(env, k, h);
                let b = pick(r, &bs)?;
                Some(item("C.pencil-empty-or-two", &[h, b]))
            }, "C.pencil-empty-or-two", plan);
            sample(r, count, |r| Some(item("C.star-param", &[pick(r, centres)?])), "C.star-param", plan);
            sample(r, count, |r| Some(item("C.top-param", &[pick(r, carriers)?])), "C.top-param", plan);
            sample(r, count, |r| {
                let (a, b) = (r.gen_range(0..pts.len()), r.gen_range(0..pts.len()));
                (a != b).then(|| item("C.adjacency", &[&pts[a], &pts[b]]))
            }, "C.adjacency", plan);
            if even {
                sample(r, count, |r| {
                    let (i, j) = (r.gen_range(0..nstruct), r.gen_range(0..nstruct));
                    (i != j).then(|| item("C.clique-meet", &[structure(i), structure(j)]))
                }, "C.clique-meet", plan);
            } else {
                sample(r, count, |r| {
                    let i = r.gen_range(0..centres.len());
                    let len = g.star_members(i).len();
                    let (a, b) = (r.gen_range(0..len), r.gen_range(0..len));
                    (a != b).then(|| star_pair(i, a, b))
                }, "C.star-copolar", plan);
                sample(r, count, |r| {
                    let j = r.gen_range(0..carriers.len());
                    let len = g.top_members(j).len();
                    let (a, b) = (r.gen_range(0..len), r.gen_range(0..len));
                    (a != b).then(|| top_pair(j, a, b))
                }, "C.top-copolar", plan);
                sample(r, count, |r| {
                    let pen = pick(r, &pencils)?;
                    let x = r.gen_range(0..pts.len());
                    pen.members.binary_search(&(x as u32)).is_err().then(|| item("C.delta-axiom", &[&pen.h, &pen.b, &pts[x]]))
                }, "C.delta-axiom", plan);
            }
        }
    }
    if 2 * k == n {
        plan.note("k = n - k: stars and tops have equal size");
    }
}

fn plan_d(env: &Env, rng: Option<&mut SplitMix64>, count: usize, plan: &mut Plan) {
    let s = &env.space;
    let (k, n) = (env.k.unwrap(), s.n());
    if k % 2 == 0 {
        plan.note("collinearity formulas apply at odd k; nothing to check at even k");
        return;
    }
    let use_lower = k > 1 && k + 1 < n;
    if !use_lower {
        plan.note("the lower-adjacency formula applies for 1 < k < n-1 only; skipped");
    }
    let g = env.level(k);
    let pts = g.points();
    let coll = env.graph(k, AdjacencyKind::Collinear);
    match rng {
        None => {
            let np = pts.len();
            for a in 0..np {
                for b in a + 1..np {
                    for c in b + 1..np {
                        plan.items.push(item("D.from-adjacency", &[&pts[a], &pts[b], &pts[c]]));
                        if use_lower {
                            plan.items.push(item("D.from-lower", &[&pts[a], &pts[b], &pts[c]]));
                        }
                    }
                }
            }
        }
        Some(r) => {
            // a third of the triples on a common line, a third with the third
            // point collinear with both, a third unconstrained
            let pencils = g.pencils();
            let mut on_line: Vec<Vec<u32>> = vec![Vec::new(); pts.len()];
            for (i, pen) in pencils.iter().enumerate() {
                for &x in &pen.members {
                    on_line[x as usize].push(i as u32);
                }
            }
            let draw = |r: &mut SplitMix64, i: usize| -> Option<[u32; 3]> {
                let a = r.gen_range(0..pts.len()) as u32;
                let b = *pick(r, coll.neighbors(a as usize))?;
                let c = match i % 3 {
                    0 => {
                        let line = on_line[a as usize]
                            .iter()
                            .map(|&l| &pencils[l as usize].members)
                            .find(|m| m.binary_search(&b).is_ok())?;
                        *pick(r, line)?
                    }
                    1 => *pick(r, &coll.common_neighbors(&[a, b]))?,
                    _ => r.gen_range(0..pts.len()) as u32,
                };
                Some([a, b, c])
            };
            let mut i = 0;
            sample(r, count, |r| {
                i += 1;
                draw(r, i).map(|t| item("D.from-adjacency", &[&pts[t[0] as usize], &pts[t[1] as usize], &pts[t[2] as usize]]))
            }, "D.from-adjacency", plan);
            if use_lower {
                let mut i = 0;
                sample(r, count, |r| {
                    i += 1;
                    draw(r, i)
                        .map(|t| item("D.from-lower", &[&pts[t[0] as usize], &pts[t[1] as usize], &pts[t[2] as usize]]))
                }, "D.from-lower", plan);
            }
        }
    }
}

fn plan_e(env: &Env, rng: Option<&mut SplitMix64>, count: usize, plan: &mut Plan) {
    let k = env.k.unwrap();
    let g = env.level(k);
    let coll = env.graph(k, AdjacencyKind::Collinear);
    let comps = coll.components();
    plan.details.insert("components".into(), json!(comps.len()));
    plan.details.insert("component_sizes".into(), json!(comps.iter().map(Vec::len).collect::<Vec<_>>()));
    for kind in AdjacencyKind::ALL {
        plan.items.push(item(&format!("E.connected@{kind}"), &[]));
    }
    plan.items.push(item("E.copolar-diameter", &[]));
    let lower = env.graph(k, AdjacencyKind::Lower);
    let pts = g.points();
    match rng {
        None => {
            for h in g.star_centres() {
                plan.items.push(item("E.star-connected", &[h]));
            }
            for b in g.top_carriers() {
                plan.items.push(item("E.top-connected", &[b]));
            }
            for (a, b) in lower.edges() {
                plan.items.push(item("E.lower-path", &[&pts[a as usize], &pts[b as usize]]));
            }
        }
        Some(r) => {
            sample(r, count, |r| Some(item("E.star-connected", &[pick(r, g.star_centres())?])), "E.star-connected", plan);
            sample(r, count, |r| Some(item("E.top-connected", &[pick(r, g.top_carriers())?])), "E.top-connected", plan);
            sample(r, count, |r| {
                let a = r.gen_range(0..pts.len());
                let b = *pick(r, lower.neighbors(a))? as usize;
                Some(item("E.lower-path", &[&pts[a], &pts[b]]))
            }, "E.lower-path", plan);
        }
    }
}

fn plan_f(env: &Env, mut rng: Option<&mut SplitMix64>, count: usize, plan: &mut Plan) {
    let (k, n) = (env.k.unwrap(), env.n());
    if k % 2 == 0 || k <= 1 || k + 1 >= n {
        plan.note("the triangle taxonomy applies at odd k with 1 < k < n-1; nothing to check");
        return;
    }
    let g = env.level(k);
    let pts = g.points();
    for (check, kind) in [("F.lower", AdjacencyKind::Lower), ("F.upper", AdjacencyKind::Upper)] {
        let adj = env.graph(k, kind);
        match rng {
            None => {
                for a in 0..pts.len() as u32 {
                    for &b in adj.neighbors(a as usize).iter().filter(|&&b| b > a) {
                        for c in adj.common_neighbors(&[a, b]).into_iter().filter(|&c| c > b) {
                            plan.items.push(item(check, &[&pts[a as usize], &pts[b as usize], &pts[c as usize]]));
                        }
                    }
                }
            }
            Some(ref mut r) => {
                sample(*r, count, |r| {
                    let a = r.gen_range(0..pts.len()) as u32;
                    let b = *pick(r, adj.neighbors(a as usize))?;
                    let c = *pick(r, &adj.common_neighbors(&[a, b]))?;
                    Some(item(check, &[&pts[a as usize], &pts[b as usize], &pts[c as usize]]))
                }, check, plan);
            }
        }
    }
}

fn plan_g(env: &Env, rng: Option<&mut SplitMix64>, count: usize, plan: &mut Plan) {
    let s = &env.space;
    let k = env.k.unwrap();
    let seeds: Vec<u64> = match rng {
        None => {
            plan.note("similitudes drawn from seeds 0..100");
            (0..100).collect()
        }
        Some(r) => (0..count).map(|_| r.next_u64()).collect(),
    };
    for seed in seeds {
        let m = s.random_similitude(seed, false).matrix;
        plan.items.push(Item { check: "G.similitude".into(), inputs: vec![m.to_nested()] });
    }
    plan.items.push(item("G.kappa", &[]));
    if env.level(k).len() <= DEFAULT_AUTOMORPHISM_BUDGET {
        plan.items.push(item("G.count", &[]));
    } else {
        plan.note("automorphism count skipped: level exceeds the vertex budget");
    }
}

fn plan_h(env: &Env, mut rng: Option<&mut SplitMix64>, count: usize, plan: &mut Plan) -> Result<(), VerifyError> {
    let s = &env.space;
    let (k, n) = (env.k.unwrap(), s.n());
    if 2 * k == n {
        plan.items.push(item("H.middle-refused", &[]));
    } else {
        plan.items.push(item("H.pipeline", &[]));
        let report = env.pipeline(k)?;
        plan.details.insert("pipeline".into(), serde_json::to_value(report).unwrap());
    }
    if k % 2 == 0 || k <= 1 || k + 1 >= n {
        plan.note("one-sided reconstruction applies at odd k with 1 < k < n-1; skipped");
        return Ok(());
    }
    let g = env.level(k);
    let pts = g.points();
    for (check, kind) in [("H.lower-star", AdjacencyKind::Lower), ("H.upper-top", AdjacencyKind::Upper)] {
        let c = TriangleClassifier::new(g, env.graph(k, kind))?;
        let adj = env.graph(k, kind);
        let tri_item = |t: [u32; 3]| item(check, &[&pts[t[0] as usize], &pts[t[1] as usize], &pts[t[2] as usize]]);
        match rng {
            None => {
                // one triangle judged S by adjacency per maximal structure
                let groups: Vec<&[u32]> = if kind == AdjacencyKind::Lower {
                    (0..g.star_centres().len()).map(|i| g.star_members(i)).collect()
                } else {
                    (0..g.top_carriers().len()).map(|j| g.top_members(j)).collect()
                };
                for m in groups {
                    if let Some(t) = c.triangles_in(m).find(|&t| c.is_s_triangle(t)) {
                        plan.items.push(tri_item(t));
                    }
                }
            }
            Some(ref mut r) => {
                sample(*r, count, |r| {
                    let a = r.gen_range(0..pts.len()) as u32;
                    let b = *pick(r, adj.neighbors(a as usize))?;
                    let cc = *pick(r, &adj.common_neighbors(&[a, b]))?;
                    let t = [a, b, cc];
                    c.is_s_triangle(t).then(|| tri_item(t))
                }, check, plan);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exhaustive(suite: SuiteId, p: u32, m: usize, k: Option<usize>) -> VerificationReport {
        run_suite(&SuiteSpec::new(suite, p, m, k, Mode::Exhaustive)).unwrap()
    }

    #[test]
    fn suite_c_even_level() {
        let r = exhaustive(SuiteId::C, 3, 2, Some(2));
        assert!(r.pass, "{:?}", r.failures);
        assert!(r.details["checks"]["C.adjacency"].as_u64().unwrap() >= 90 * 89 / 2);
    }

    #[test]
    fn suite_e_single_component() {
        let r = exhaustive(SuiteId::E, 3, 2, Some(2));
        assert!(r.pass, "{:?}", r.failures);
        assert_eq!(r.details["components"], json!(1));
        assert_eq!(r.details["component_sizes"], json!([90]));
    }

    #[test]
    fn suite_a_p5() {
        let r = exhaustive(SuiteId::A, 5, 2, None);
        assert!(r.pass, "{:?}", r.failures);
    }

    #[test]
    fn refusal_and_missing_level() {
        let e = run_suite(&SuiteSpec::new(SuiteId::D, 3, 3, Some(3), Mode::Exhaustive)).unwrap_err();
        assert!(matches!(e, VerifyError::SizeBound { points: 32760, bound: 200, .. }));
        let e = run_suite(&SuiteSpec::new(SuiteId::C, 3, 2, None, Mode::Exhaustive)).unwrap_err();
        assert!(matches!(e, VerifyError::MissingLevel { .. }));
    }

    #[test]
    fn injected_fault_is_replayable() {
        let mut spec = SuiteSpec::new(SuiteId::E, 3, 2, Some(1), Mode::Exhaustive);
        spec.inject_fault = Some("E.top-connected".into());
        let r = run_suite(&spec).unwrap();
        assert!(!r.pass);
        assert!(r.failures.iter().all(|f| f.check == "E.top-connected"));
        for f in &r.failures {
            assert!(!replay(&spec, f).unwrap());
        }
        spec.inject_fault = None;
        for f in &r.failures {
            assert!(replay(&spec, f).unwrap());
        }
    }

    #[test]
    fn sampled_runs_repeat() {
        let spec = SuiteSpec::new(SuiteId::C, 3, 2, Some(3), Mode::Sampled { seed: 11, count: 25 });
        let mut a = run_suite(&spec).unwrap();
        let mut b = run_suite(&spec).unwrap();
        a.elapsed_ms = 0;
        b.elapsed_ms = 0;
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.pass, "{:?}", a.failures);
    }

    #[test]
    fn malformed_records() {
        let spec = SuiteSpec::new(SuiteId::B, 3, 2, None, Mode::Exhaustive);
        let bogus = FailureRecord { check: "B.collinear-iff-nonorthogonal".into(), inputs: vec![vec![vec![2, 0, 0, 0]]] };
        assert!(matches!(replay(&spec, &bogus), Err(VerifyError::MalformedRecord(_))));
        let unknown = FailureRecord { check: "Z.9".into(), inputs: vec![] };
        assert!(matches!(replay(&spec, &unknown), Err(VerifyError::UnknownCheck(_))));
    }
}
