//! Acceptance criteria 1–11. Each test writes one PASS/FAIL line to stdout
//! (directly, so it shows even when the harness captures output) and then
//! asserts the criterion.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use symplectica::algebra::gaussian_binomial;
use symplectica::graph::maximal_cliques;
use symplectica::grassmann::{AdjacencyKind, GrassmannSpace};
use symplectica::reconstruct::{
    automorphism_count, collinear_from_adjacency, full_pipeline, PartialLinearSpace, DEFAULT_AUTOMORPHISM_BUDGET,
};
use symplectica::symplectic::{sp_order, SymplecticSpace};
use symplectica::verify::{run_suite, Mode, SuiteId, SuiteSpec, VerificationReport};

fn verdict(id: u32, name: &str, ok: bool, started: Instant, budget: Duration, detail: &str) {
    let elapsed = started.elapsed();
    let within = elapsed <= budget;
    let line = format!(
        "criterion {id:>2} {} {name}: {detail} ({:.2} s, budget {} s)\n",
        if ok && within { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    let _ = std::io::stdout().write_all(line.as_bytes());
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
    assert!(within, "criterion {id} ({name}) exceeded its time budget: {elapsed:?} > {budget:?}");
}

fn checks(r: &VerificationReport, id: &str) -> u64 {
    r.details["checks"].get(id).and_then(|v| v.as_u64()).unwrap_or(0)
}

// ---------------------------------------------------------------- census oracle

/// Independent brute-force geometry of F_3^4 with the form
/// x0 y1 - x1 y0 + x2 y3 - x3 y2.
mod census {
    pub const P: u8 = 3;

    pub fn form(x: &[u8; 4], y: &[u8; 4]) -> u8 {
        let p = P as i32;
        let v = x[0] as i32 * y[1] as i32 - x[1] as i32 * y[0] as i32 + x[2] as i32 * y[3] as i32
            - x[3] as i32 * y[2] as i32;
        v.rem_euclid(p) as u8
    }

    fn normalize(v: [u8; 4]) -> Option<[u8; 4]> {
        let lead = *v.iter().find(|&&x| x != 0)?;
        let inv = (1..P).find(|&i| (i as u32 * lead as u32) % P as u32 == 1).unwrap();
        Some(v.map(|x| ((x as u32 * inv as u32) % P as u32) as u8))
    }

    pub fn points() -> Vec<[u8; 4]> {
        let mut out = Vec::new();
        for code in 1..(P as u32).pow(4) {
            let mut v = [0u8; 4];
            let mut c = code;
            for x in v.iter_mut() {
                *x = (c % P as u32) as u8;
                c /= P as u32;
            }
            if normalize(v) == Some(v) {
                out.push(v);
            }
        }
        out.sort();
        out
    }

    /// Point indices of the span of the given vectors.
    pub fn span(pts: &[[u8; 4]], gens: &[[u8; 4]]) -> Vec<usize> {
        let mut out = std::collections::BTreeSet::new();
        let combos = (P as u32).pow(gens.len() as u32);
        for code in 1..combos {
            let mut v = [0u32; 4];
            let mut c = code;
            for g in gens {
                let a = c % P as u32;
                c /= P as u32;
                for i in 0..4 {
                    v[i] += a * g[i] as u32;
                }
            }
            if let Some(n) = normalize(v.map(|x| (x % P as u32) as u8)) {
                out.insert(pts.binary_search(&n).unwrap());
            }
        }
        out.into_iter().collect()
    }
}

#[test]
fn criterion_01_census() {
    let t = Instant::now();
    let pts = census::points();
    let mut lines = BTreeSet::new();
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            lines.insert(census::span(&pts, &[pts[a], pts[b]]));
        }
    }
    let isotropic = lines.iter().filter(|l| census::form(&pts[l[0]], &pts[l[1]]) == 0).count();
    let mut planes = BTreeSet::new();
    for l in &lines {
        for (c, q) in pts.iter().enumerate() {
            if !l.contains(&c) {
                planes.insert(census::span(&pts, &[pts[l[0]], pts[l[1]], *q]));
            }
        }
    }
    // radical points of a plane: those orthogonal to the whole plane
    let tangential = planes
        .iter()
        .filter(|pl| pl.iter().filter(|&&z| pl.iter().all(|&y| census::form(&pts[z], &pts[y]) == 0)).count() == 1)
        .count();
    let s = SymplecticSpace::standard(3, 2).unwrap();
    let tr: Vec<usize> = (1..=3).map(|k| GrassmannSpace::new(&s, k).unwrap().len()).collect();
    let p = 3u64;
    let ok = pts.len() == 40
        && lines.len() == 130
        && isotropic == 40
        && lines.len() - isotropic == 90
        && planes.len() == 40
        && tangential == 40
        && gaussian_binomial(4, 1, p) == 40
        && gaussian_binomial(4, 2, p) == 130
        && gaussian_binomial(4, 3, p) == 40
        && (p + 1) * (p * p + 1) == isotropic as u64
        && tr == vec![40, 90, 40];
    let detail = format!(
        "points {}, lines {} ({} isotropic, {} regular), planes {} ({} tangential), |(T-R)_k| = {:?}",
        pts.len(),
        lines.len(),
        isotropic,
        lines.len() - isotropic,
        planes.len(),
        tangential,
        tr
    );
    verdict(1, "census at p=3, m=2", ok, t, Duration::from_secs(5), &detail);
}

#[test]
fn criterion_02_pencil_sizes() {
    let t = Instant::now();
    let s = SymplecticSpace::standard(3, 2).unwrap();
    let f = s.field();
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 1..=3 {
        let g = GrassmannSpace::new(&s, k).unwrap();
        let want = if k % 2 == 0 { 3 } else { 4 };
        let pencils = g.pencils();
        // brute force: every (H, B) with H inside B and a point between them
        let mut brute = 0;
        for h in g.star_centres() {
            for b in g.top_carriers() {
                if !b.contains(f, h).unwrap() {
                    continue;
                }
                let between = g
                    .points()
                    .iter()
                    .filter(|u| u.contains(f, h).unwrap() && b.contains(f, u).unwrap())
                    .count();
                if between > 0 {
                    brute += 1;
                    ok &= between == want;
                }
            }
        }
        let bad = pencils.iter().filter(|pen| pen.members.len() != want).count();
        ok &= bad == 0 && brute == pencils.len() && !pencils.is_empty();
        parts.push(format!("k={k}: {} pencils of size {want}, {bad} exceptions", pencils.len()));
    }
    verdict(2, "pencil cardinality", ok, t, Duration::from_secs(30), &parts.join("; "));
}

#[test]
fn criterion_03_even_level_coincidence() {
    let t = Instant::now();
    let s = SymplecticSpace::standard(3, 2).unwrap();
    let f = s.field();
    let g = GrassmannSpace::new(&s, 2).unwrap();
    let graphs: Vec<_> = AdjacencyKind::ALL.iter().map(|&kind| g.graph(kind)).collect();
    let n = g.len();
    let mut pairs = 0;
    let mut disagreements = 0;
    for a in 0..n {
        for b in a + 1..n {
            pairs += 1;
            let projective = g.point(a as u32).intersect(f, g.point(b as u32)).unwrap().dim() == 1;
            if graphs.iter().any(|gr| gr.has_edge(a, b) != projective) {
                disagreements += 1;
            }
        }
    }
    let ok = pairs == 90 * 89 / 2 && disagreements == 0;
    let detail = format!("{pairs} pairs, {disagreements} disagreements among ~, lower, upper and projective adjacency");
    verdict(3, "even-level coincidence", ok, t, Duration::from_secs(10), &detail);
}

#[test]
fn criterion_04_maximal_cliques() {
    let t = Instant::now();
    let s = SymplecticSpace::standard(3, 2).unwrap();
    let f = s.field();
    let g = GrassmannSpace::new(&s, 2).unwrap();
    let coll = g.graph(AdjacencyKind::Collinear);
    let cliques = maximal_cliques(&coll, 5000).unwrap();
    // stars and tops by containment over all points and lines/planes
    let ids = |pred: &dyn Fn(&symplectica::algebra::Subspace) -> bool| -> Vec<u32> {
        (0..g.len() as u32).filter(|&i| pred(g.point(i))).collect()
    };
    let mut structures: Vec<Vec<u32>> = Vec::new();
    let mut stars = Vec::new();
    let mut tops = Vec::new();
    for h in symplectica::algebra::all_subspaces(f, 4, 1) {
        let m = ids(&|u| u.contains(f, &h).unwrap());
        stars.push(m.clone());
        structures.push(m);
    }
    for b in symplectica::algebra::all_subspaces(f, 4, 3) {
        let m = ids(&|u| b.contains(f, u).unwrap());
        tops.push(m.clone());
        structures.push(m);
    }
    structures.sort();
    let pencil_sets: BTreeSet<Vec<u32>> = g.pencils().into_iter().map(|p| p.members).collect();
    let mut meets_ok = true;
    for st in &stars {
        for tp in &tops {
            let meet: Vec<u32> = st.iter().copied().filter(|x| tp.contains(x)).collect();
            if meet.len() >= 2 {
                meets_ok &= pencil_sets.contains(&meet);
            }
        }
    }
    let ok = cliques.len() == 80 && cliques.iter().all(|c| c.len() == 9) && cliques == structures && meets_ok;
    let detail = format!(
        "{} maximal cliques, sizes {:?}, equal to 40 stars + 40 tops: {}, star/top meets are pencils: {meets_ok}",
        cliques.len(),
        cliques.iter().map(Vec::len).collect::<BTreeSet<_>>(),
        cliques == structures
    );
    verdict(4, "maximal cliques", ok, t, Duration::from_secs(60), &detail);
}

#[test]
fn criterion_05_adjacency_formula_exhaustive() {
    let t = Instant::now();
    let s = SymplecticSpace::standard(3, 2).unwrap();
    let g = GrassmannSpace::new(&s, 3).unwrap();
    let coll = g.graph(AdjacencyKind::Collinear);
    let n = g.len() as u32;
    let (mut triples, mut wrong, mut wrong_collinear) = (0, 0, 0);
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                triples += 1;
                let truth = g.collinear(a, b, c);
                if collinear_from_adjacency(&coll, a, b, c) != truth {
                    wrong += 1;
                    wrong_collinear += truth as u32;
                }
            }
        }
    }
    let ok = triples == 9880 && wrong == 0;
    let detail = format!(
        "{triples} triples of (T-R)_3, {wrong} disagreements ({wrong_collinear} of them collinear triples the formula rejects)"
    );
    verdict(5, "collinearity from ~ at k=3, n=4", ok, t, Duration::from_secs(60), &detail);
}

#[test]
fn criterion_06_taxonomy_and_lower_formula() {
    let t = Instant::now();
    let mode = Mode::Sampled { seed: 6, count: 1000 };
    let f = run_suite(&SuiteSpec::new(SuiteId::F, 3, 3, Some(3), mode)).unwrap();
    let d = run_suite(&SuiteSpec::new(SuiteId::D, 3, 3, Some(3), mode)).unwrap();
    let (tri, lower) = (checks(&f, "F.lower"), checks(&d, "D.from-lower"));
    let f_lower_failures = f.failures.iter().filter(|x| x.check == "F.lower").count();
    let d_lower_failures = d.failures.iter().filter(|x| x.check == "D.from-lower").count();
    let ok = tri >= 1000 && lower >= 1000 && f_lower_failures == 0 && d_lower_failures == 0;
    let detail = format!(
        "{tri} lower triangles ({f_lower_failures} disagreements), {lower} triples for the lower formula ({d_lower_failures} disagreements)"
    );
    verdict(6, "triangle taxonomy and lower formula at (3,3,3)", ok, t, Duration::from_secs(15 * 60), &detail);
}

#[test]
fn criterion_07_connectedness() {
    let t = Instant::now();
    let s = SymplecticSpace::standard(3, 2).unwrap();
    let comps: Vec<usize> =
        (1..=3).map(|k| GrassmannSpace::new(&s, k).unwrap().graph(AdjacencyKind::Collinear).components().len()).collect();
    let copolar = PartialLinearSpace::from_grassmann(&GrassmannSpace::new(&s, 1).unwrap());
    let diameter = copolar.collinearity().diameter();
    let ok = comps == vec![1, 1, 1] && diameter.is_some_and(|d| d <= 2);
    let detail = format!("components per k = {comps:?}, copolar diameter {diameter:?}");
    verdict(7, "connectedness", ok, t, Duration::from_secs(10), &detail);
}

#[test]
fn criterion_08_automorphisms() {
    let t = Instant::now();
    let g = run_suite(&SuiteSpec::new(SuiteId::G, 3, 2, Some(2), Mode::Exhaustive)).unwrap();
    let lifted_ok = g.pass && checks(&g, "G.similitude") == 100 && checks(&g, "G.kappa") == 1;
    let s = SymplecticSpace::standard(3, 2).unwrap();
    let coll = GrassmannSpace::new(&s, 2).unwrap().graph(AdjacencyKind::Collinear);
    let count = automorphism_count(&coll, DEFAULT_AUTOMORPHISM_BUDGET).unwrap();
    // |Sp(4,3)| = 3^4 (3^2 - 1)(3^4 - 1)
    let sp = BigUint::from(81u32 * 8 * 80);
    let ok = lifted_ok && sp == sp_order(2, 3) && count == &sp * 2u32 && count == BigUint::from(103_680u32);
    let detail = format!("100 similitudes and the duality lift: {lifted_ok}; automorphism count {count} = 2 x {sp}");
    verdict(8, "adjacency-preserving maps at (3,2,2)", ok, t, Duration::from_secs(30 * 60), &detail);
}

#[test]
fn criterion_09_reconstruction() {
    let t = Instant::now();
    let s = SymplecticSpace::standard(3, 3).unwrap();
    let out = full_pipeline(&s, 2, 100_000).unwrap();
    let r = &out.report;
    let top_level = r.levels[0].points;
    let ok = r.matches && top_level == 7371 && r.recovered_points == 364;
    let detail = format!(
        "{} vertices at k=2, {} recovered points, {} lines ({} copolar + {} isotropic), mismatches {:?}",
        top_level, r.recovered_points, r.recovered_lines, r.copolar_lines, r.isotropic_lines, r.mismatches
    );
    verdict(9, "reconstruction from ~ at (3,3,2)", ok, t, Duration::from_secs(15 * 60), &detail);
}

#[test]
fn criterion_10_one_sided_reconstruction() {
    let t = Instant::now();
    let h = run_suite(&SuiteSpec::new(SuiteId::H, 3, 3, Some(3), Mode::Sampled { seed: 10, count: 50 })).unwrap();
    let (stars, tops) = (checks(&h, "H.lower-star"), checks(&h, "H.upper-top"));
    let ok = h.pass && stars >= 50 && tops >= 50;
    let detail = format!("{stars} stars from lower, {tops} tops from upper, {} mismatches", h.failures.len());
    verdict(10, "one-sided reconstruction at (3,3,3)", ok, t, Duration::from_secs(15 * 60), &detail);
}

#[test]
fn criterion_11_copolar_facts() {
    let t = Instant::now();
    let b = run_suite(&SuiteSpec::new(SuiteId::B, 3, 2, None, Mode::Exhaustive)).unwrap();
    let conditioned = ["B.wedge-witness", "B.diamond-witness", "B.pair-witnesses", "B.triple-witnesses"];
    let counts: Vec<u64> = conditioned.iter().map(|c| checks(&b, c)).collect();
    let ok = b.pass && counts.iter().all(|&c| c > 0);
    let detail = format!(
        "{} checks, {} counterexamples; witness searches {:?} configurations",
        b.checks_run,
        b.failures.len(),
        conditioned.iter().zip(&counts).collect::<Vec<_>>()
    );
    verdict(11, "copolar facts at (3,2)", ok, t, Duration::from_secs(10 * 60), &detail);
}
