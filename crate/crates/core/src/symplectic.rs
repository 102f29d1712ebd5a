//! Symplectic forms, orthogonality, radicals and similitudes.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use crate::algebra::{kernel, rank, rref, AlgebraError, Field, Matrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymplecticError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("Witt index must be at least 1")]
    ZeroIndex,
    #[error("gram matrix must be {n}x{n}")]
    GramShape { n: usize },
    #[error("gram matrix is not alternating")]
    NotAlternating,
    #[error("gram matrix is singular")]
    Singular,
    #[error("vector or subspace has ambient dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("subspace is not tangential (radical dimension {0})")]
    NotTangential(usize),
    #[error("matrix is not a similitude of the form")]
    NotSimilitude,
}

/// A vector space F^{2m} with a nondegenerate alternating form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticSpace {
    field: Field,
    m: usize,
    gram: Matrix,
    /// Columns form a hyperbolic basis e1,f1,... for `gram`; identity for the
    /// default form.
    adapted: Matrix,
    adapted_inv: Matrix,
}

/// Radical data of a subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub dim: usize,
    pub rdim: usize,
    pub is_isotropic: bool,
    pub is_regular: bool,
    pub is_tangential: bool,
    pub in_tr: bool,
}

impl Classification {
    fn new(dim: usize, rdim: usize) -> Self {
        Classification {
            dim,
            rdim,
            is_isotropic: rdim == dim,
            is_regular: rdim == 0,
            is_tangential: rdim == 1,
            in_tr: rdim <= 1,
        }
    }
}

/// The default Gram matrix: m hyperbolic blocks [[0,1],[-1,0]].
pub fn standard_gram(field: Field, m: usize) -> Matrix {
    let n = 2 * m;
    let mut j = Matrix::zeros(n, n);
    for i in 0..m {
        j.set(2 * i, 2 * i + 1, 1);
        j.set(2 * i + 1, 2 * i, field.neg(1));
    }
    j
}

impl SymplecticSpace {
    pub fn new(field: Field, m: usize, gram: Option<Matrix>) -> Result<Self, SymplecticError> {
        if m == 0 {
            return Err(SymplecticError::ZeroIndex);
        }
        let n = 2 * m;
        let gram = match gram {
            None => standard_gram(field, m),
            Some(g) => {
                if g.rows() != n || g.cols() != n {
                    return Err(SymplecticError::GramShape { n });
                }
                for i in 0..n {
                    if g.get(i, i) != 0 {
                        return Err(SymplecticError::NotAlternating);
                    }
                    for j in 0..i {
                        if g.get(i, j) != field.neg(g.get(j, i)) {
                            return Err(SymplecticError::NotAlternating);
                        }
                    }
                }
                if rank(field, &g) != n {
                    return Err(SymplecticError::Singular);
                }
                g
            }
        };
        let mut s = SymplecticSpace {
            field,
            m,
            gram,
            adapted: Matrix::identity(n),
            adapted_inv: Matrix::identity(n),
        };
        if s.gram != standard_gram(field, m) {
            let basis = s.hyperbolic_basis(None::<&mut SplitMix64>);
            s.adapted_inv = inverse(field, &basis).expect("hyperbolic basis is invertible");
            s.adapted = basis;
        }
        Ok(s)
    }

    /// Space with the default form over GF(p).
    pub fn standard(p: u32, m: usize) -> Result<Self, SymplecticError> {
        Self::new(Field::new(p)?, m, None)
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        2 * self.m
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    fn check_len(&self, len: usize) -> Result<(), SymplecticError> {
        if len != self.n() {
            return Err(SymplecticError::Dimension { expected: self.n(), got: len });
        }
        Ok(())
    }

    /// xi(u, v) = u^T J v.
    pub fn form(&self, u: &[u8], v: &[u8]) -> u8 {
        let n = self.n();
        let p = self.field.p() as u32;
        let mut acc = 0u32;
        for i in 0..n {
            if u[i] == 0 {
                continue;
            }
            let row = self.gram.row(i);
            let mut t = 0u32;
            for j in 0..n {
                t += row[j] as u32 * v[j] as u32;
            }
            acc += u[i] as u32 * (t % p);
        }
        (acc % p) as u8
    }

    pub fn form_checked(&self, u: &[u8], v: &[u8]) -> Result<u8, SymplecticError> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        Ok(self.form(u, v))
    }

    pub fn perp(&self, u: &Subspace) -> Subspace {
        if u.is_zero() {
            return Subspace::full(self.n());
        }
        let bj = u.basis_matrix().mul(self.field, &self.gram).expect("shapes agree");
        kernel(self.field, &bj)
    }

    /// The duality U -> U^perp.
    pub fn kappa(&self, u: &Subspace) -> Subspace {
        self.perp(u)
    }

    /// Dimension of the radical, computed as dim U - rank of the restricted Gram matrix.
    pub fn rdim(&self, u: &Subspace) -> usize {
        let k = u.dim();
        if k == 0 {
            return 0;
        }
        let mut g = Matrix::zeros(k, k);
        for i in 0..k {
            for j in (i + 1)..k {
                let x = self.form(u.row(i), u.row(j));
                g.set(i, j, x);
                g.set(j, i, self.field.neg(x));
            }
        }
        k - rank(self.field, &g)
    }

    pub fn radical(&self, u: &Subspace) -> (Subspace, usize) {
        let r = u.intersect(self.field, &self.perp(u)).expect("same ambient");
        let d = r.dim();
        (r, d)
    }

    pub fn classify(&self, u: &Subspace) -> Classification {
        Classification::new(u.dim(), self.rdim(u))
    }

    #[inline]
    pub fn in_tr(&self, u: &Subspace) -> bool {
        self.rdim(u) <= 1
    }

    /// Splits a tangential U as U0 + Rad(U) with U0 regular. U0 is spanned by
    /// the canonical basis rows of U that stay independent of the radical,
    /// taken in order.
    pub fn tangential_decompose(&self, u: &Subspace) -> Result<(Subspace, Subspace), SymplecticError> {
        let (rad, rdim) = self.radical(u);
        if rdim != 1 {
            return Err(SymplecticError::NotTangential(rdim));
        }
        let n = self.n();
        let mut chosen: Vec<Vec<u8>> = Vec::new();
        let mut acc = rad.clone();
        for row in u.rows() {
            if chosen.len() + 1 == u.dim() {
                break;
            }
            if !acc.contains_vector(self.field, row) {
                chosen.push(row.to_vec());
                acc = acc.sum(self.field, &Subspace::span(self.field, n, &[row]))?;
            }
        }
        Ok((Subspace::span(self.field, n, &chosen), rad))
    }

    /// Completes a hyperbolic basis e1,f1,... (as matrix columns). With an
    /// rng the vectors are random; without one the first available vectors
    /// are used.
    fn hyperbolic_basis<R: Rng>(&self, mut rng: Option<&mut R>) -> Matrix {
        let f = self.field;
        let n = self.n();
        let mut rest = Subspace::full(n);
        let mut cols: Vec<Vec<u8>> = Vec::with_capacity(n);
        for _ in 0..self.m {
            let v = match rng.as_deref_mut() {
                Some(r) => loop {
                    let v = random_vector(f, &rest, r);
                    if v.iter().any(|&x| x != 0) {
                        break v;
                    }
                },
                None => rest.row(0).to_vec(),
            };
            let w = match rng.as_deref_mut() {
                Some(r) => loop {
                    let w = random_vector(f, &rest, r);
                    if self.form(&v, &w) != 0 {
                        break w;
                    }
                },
                None => rest.rows().find(|w| self.form(&v, w) != 0).expect("nondegenerate").to_vec(),
            };
            let c = f.inv(self.form(&v, &w)).expect("nonzero");
            let w: Vec<u8> = w.iter().map(|&x| f.mul(x, c)).collect();
            let pair = Subspace::span(f, n, &[v.clone(), w.clone()]);
            rest = rest.intersect(f, &self.perp(&pair)).expect("same ambient");
            cols.push(v);
            cols.push(w);
        }
        let mut m = Matrix::zeros(n, n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, c[i]);
            }
        }
        m
    }

    /// The similitude factor of `m`, if M^T J M = lambda J for some nonzero lambda.
    pub fn similitude_factor(&self, m: &Matrix) -> Option<u8> {
        let n = self.n();
        if m.rows() != n || m.cols() != n {
            return None;
        }
        let f = self.field;
        let lhs = m.transpose().mul(f, &self.gram).ok()?.mul(f, m).ok()?;
        // J[0][j] is nonzero for some j; read lambda off that entry.
        let j = (0..n).find(|&j| self.gram.get(0, j) != 0)?;
        let lambda = f.mul(lhs.get(0, j), f.inv(self.gram.get(0, j)).ok()?);
        if lambda == 0 || lhs != self.gram.scaled(f, lambda) {
            return None;
        }
        Some(lambda)
    }

    /// A random similitude drawn with a SplitMix64 generator seeded by `seed`.
    pub fn random_similitude(&self, seed: u64, force_isometry: bool) -> Similitude {
        let mut rng = SplitMix64::seed_from_u64(seed);
        self.random_similitude_with(&mut rng, force_isometry)
    }

    /// A random similitude: a random hyperbolic basis, then (unless an
    /// isometry is forced) the scaling e_i -> e_i, f_i -> lambda f_i.
    pub fn random_similitude_with<R: Rng>(&self, rng: &mut R, force_isometry: bool) -> Similitude {
        let f = self.field;
        let n = self.n();
        let x = self.hyperbolic_basis(Some(&mut *rng));
        let lambda = if force_isometry { 1 } else { rng.gen_range(1..f.p()) };
        let mut d = Matrix::identity(n);
        for i in 0..self.m {
            d.set(2 * i + 1, 2 * i + 1, lambda);
        }
        let matrix = x.mul(f, &d).unwrap().mul(f, &self.adapted_inv).unwrap();
        debug_assert_eq!(self.similitude_factor(&matrix), Some(lambda));
        Similitude { matrix, factor: lambda }
    }

    pub fn identity_similitude(&self) -> Similitude {
        Similitude { matrix: Matrix::identity(self.n()), factor: 1 }
    }

    /// Validates `m` as a similitude.
    pub fn similitude(&self, m: Matrix) -> Result<Similitude, SymplecticError> {
        let factor = self.similitude_factor(&m).ok_or(SymplecticError::NotSimilitude)?;
        Ok(Similitude { matrix: m, factor })
    }
}

fn random_vector<R: Rng>(f: Field, span: &Subspace, rng: &mut R) -> Vec<u8> {
    let mut v = vec![0u8; span.ambient()];
    for row in span.rows() {
        let c: u8 = rng.gen_range(0..f.p());
        for (x, &r) in v.iter_mut().zip(row) {
            *x = f.add(*x, f.mul(c, r));
        }
    }
    v
}

/// Inverse of a square matrix, if it exists.
pub fn inverse(f: Field, a: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    if a.cols() != n {
        return None;
    }
    let mut aug = Matrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, a.get(i, j));
        }
        aug.set(i, n + i, 1);
    }
    let e = rref(f, &aug);
    if e.rank < n || e.pivots[n - 1] != n - 1 {
        return None;
    }
    let mut inv = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, e.matrix.get(i, n + j));
        }
    }
    Some(inv)
}

/// A linear map M with M^T J M = factor * J.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Similitude {
    pub matrix: Matrix,
    pub factor: u8,
}

impl Similitude {
    /// Image of a subspace under x -> M x.
    pub fn apply(&self, field: Field, u: &Subspace) -> Subspace {
        u.image(field, &self.matrix).expect("ambient matches")
    }

    pub fn is_isometry(&self) -> bool {
        self.factor == 1
    }
}

/// Order of Sp(2m, p): p^{m^2} * prod_{i=1..m} (p^{2i} - 1).
pub fn sp_order(m: usize, p: u32) -> BigUint {
    let pb = BigUint::from(p);
    let mut acc = pb.pow((m * m) as u32);
    for i in 1..=m {
        acc *= pb.pow(2 * i as u32) - 1u32;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::all_subspaces;
    use proptest::prelude::*;

    fn s32() -> SymplecticSpace {
        SymplecticSpace::standard(3, 2).unwrap()
    }

    fn span(s: &SymplecticSpace, rows: &[[u8; 4]]) -> Subspace {
        Subspace::span(s.field(), 4, rows)
    }

    const E1: [u8; 4] = [1, 0, 0, 0];
    const F1: [u8; 4] = [0, 1, 0, 0];
    const E2: [u8; 4] = [0, 0, 1, 0];
    const F2: [u8; 4] = [0, 0, 0, 1];

    #[test]
    fn default_gram_and_validation() {
        let s = s32();
        assert_eq!(s.gram().get(0, 1), 1);
        assert_eq!(s.gram().get(1, 0), 2);
        let f = s.field();
        let mut bad = standard_gram(f, 2);
        bad.set(0, 0, 1);
        assert_eq!(SymplecticSpace::new(f, 2, Some(bad)), Err(SymplecticError::NotAlternating));
        let mut singular = Matrix::zeros(4, 4);
        singular.set(0, 1, 1);
        singular.set(1, 0, 2);
        assert_eq!(SymplecticSpace::new(f, 2, Some(singular)), Err(SymplecticError::Singular));
        assert!(matches!(SymplecticSpace::standard(2, 2), Err(SymplecticError::Algebra(AlgebraError::CharacteristicTwo))));
    }

    #[test]
    fn form_values() {
        let s = s32();
        assert_eq!(s.form(&E1, &F1), 1);
        assert_eq!(s.form(&F1, &E1), 2);
        assert_eq!(s.form(&E1, &E2), 0);
        assert_eq!(s.form(&[1, 2, 1, 1], &[1, 2, 1, 1]), 0);
        assert!(s.form_checked(&E1, &[1, 0]).is_err());
    }

    #[test]
    fn perp_and_radical_examples() {
        let s = s32();
        assert_eq!(s.perp(&Subspace::zero(4)), Subspace::full(4));
        assert!(s.perp(&Subspace::full(4)).is_zero());
        assert_eq!(s.perp(&span(&s, &[E1])), span(&s, &[E1, E2, F2]));
        let (r, d) = s.radical(&span(&s, &[E1, F1]));
        assert!(r.is_zero() && d == 0);
        let (r, d) = s.radical(&span(&s, &[E1, E2]));
        assert_eq!((r, d), (span(&s, &[E1, E2]), 2));
        let (r, d) = s.radical(&span(&s, &[E1, F1, E2]));
        assert_eq!((r, d), (span(&s, &[E2]), 1));
    }

    #[test]
    fn classification_examples() {
        let s = s32();
        for pt in all_subspaces(s.field(), 4, 1) {
            let c = s.classify(&pt);
            assert!(c.is_isotropic && c.is_tangential && c.in_tr);
        }
        assert!(s.classify(&span(&s, &[E1, F1])).is_regular);
        let c = s.classify(&span(&s, &[E1, F1, E2]));
        assert!(c.is_tangential && c.in_tr && !c.is_regular);
    }

    #[test]
    fn decompose_examples() {
        let s = s32();
        let (u0, pt) = s.tangential_decompose(&span(&s, &[E1, F1, E2])).unwrap();
        assert_eq!(u0, span(&s, &[E1, F1]));
        assert_eq!(pt, span(&s, &[E2]));
        let p = span(&s, &[[1, 2, 0, 1]]);
        let (u0, pt) = s.tangential_decompose(&p).unwrap();
        assert!(u0.is_zero());
        assert_eq!(pt, p);
        assert_eq!(s.tangential_decompose(&span(&s, &[E1, E2])), Err(SymplecticError::NotTangential(2)));
    }

    #[test]
    fn kappa_examples() {
        let s = s32();
        assert_eq!(s.kappa(&span(&s, &[E1, F1, E2])), span(&s, &[E2]));
        assert_eq!(s.kappa(&span(&s, &[E1, F1])), span(&s, &[E2, F2]));
    }

    #[test]
    fn group_orders() {
        assert_eq!(sp_order(1, 3), BigUint::from(24u32));
        assert_eq!(sp_order(2, 3), BigUint::from(51840u32));
        assert_eq!(sp_order(1, 5), BigUint::from(120u32));
    }

    #[test]
    fn identity_is_isometry() {
        let s = s32();
        assert_eq!(s.similitude_factor(&Matrix::identity(4)), Some(1));
        assert!(s.identity_similitude().is_isometry());
    }

    #[test]
    fn exhaustive_laws_at_p3_n4() {
        let s = s32();
        let f = s.field();
        for k in 0..=4 {
            for u in all_subspaces(f, 4, k) {
                let (rad, rdim) = s.radical(&u);
                assert_eq!(rdim, s.rdim(&u));
                assert_eq!(rdim % 2, k % 2);
                assert_eq!(s.perp(&s.perp(&u)), u);
                assert_eq!(s.perp(&u).dim(), 4 - k);
                assert_eq!(s.rdim(&s.kappa(&u)) <= 1, rdim <= 1);
                assert!(u.contains(f, &rad).unwrap());
                if k == 2 {
                    assert!(rdim == 0 || rdim == 2);
                }
                if rdim == 1 {
                    let (u0, pt) = s.tangential_decompose(&u).unwrap();
                    assert_eq!(u0.sum(f, &pt).unwrap(), u);
                    assert_eq!(s.rdim(&u0), 0);
                    assert!(s.perp(&u0).contains(f, &pt).unwrap());
                }
            }
        }
    }

    #[test]
    fn custom_gram_similitudes() {
        let f = Field::new(5).unwrap();
        // basis order e1,e2,f1,f2
        let g = Matrix::from_rows(f, &[[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]).unwrap();
        let s = SymplecticSpace::new(f, 2, Some(g)).unwrap();
        for seed in 0..20 {
            let sim = s.random_similitude(seed, seed % 2 == 0);
            assert_eq!(s.similitude_factor(&sim.matrix), Some(sim.factor));
            if seed % 2 == 0 {
                assert!(sim.is_isometry());
            }
        }
    }

    proptest! {
        #[test]
        fn similitudes_satisfy_identity(seed in any::<u64>(), iso in any::<bool>(), p in prop::sample::select(vec![3u32, 5, 7])) {
            let s = SymplecticSpace::standard(p, 3).unwrap();
            let sim = s.random_similitude(seed, iso);
            prop_assert_eq!(s.similitude_factor(&sim.matrix), Some(sim.factor));
            if iso { prop_assert_eq!(sim.factor, 1); }
            prop_assert_eq!(sim, s.random_similitude(seed, iso));
        }

        #[test]
        fn perp_reverses_inclusion(a in proptest::collection::vec(0u8..3, 0..12), b in proptest::collection::vec(0u8..3, 4)) {
            let s = SymplecticSpace::standard(3, 2).unwrap();
            let f = s.field();
            let rows: Vec<&[u8]> = a.chunks_exact(4).collect();
            let u = Subspace::span(f, 4, &rows);
            let w = u.sum(f, &Subspace::span(f, 4, &[b])).unwrap();
            prop_assert!(s.perp(&u).contains(f, &s.perp(&w)).unwrap());
        }
    }
}
