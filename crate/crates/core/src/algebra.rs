//! Exact arithmetic over GF(p) and the subspace lattice.
//!
//! Field elements are stored one byte each, so the modulus is limited to odd
//! primes `3 <= p <= 251`. Every [`Subspace`] keeps its basis in reduced
//! row-echelon form, which makes equality, ordering and hashing plain byte
//! comparisons of the basis.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("characteristic 2 unsupported")]
    CharacteristicTwo,
    #[error("p must be prime (got {0})")]
    NotPrime(u32),
    #[error("p = {0} is outside the supported range 3..=251")]
    OutOfRange(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("matrix shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
}

/// A prime field GF(p) with odd `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    p: u8,
}

impl Field {
    pub fn new(p: u32) -> Result<Self, AlgebraError> {
        if p == 2 {
            return Err(AlgebraError::CharacteristicTwo);
        }
        if p < 2 || !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        if p > 251 {
            return Err(AlgebraError::OutOfRange(p));
        }
        Ok(Field { p: p as u8 })
    }

    #[inline]
    pub fn p(self) -> u8 {
        self.p
    }

    #[inline]
    pub fn order(self) -> usize {
        self.p as usize
    }

    /// Reduces an arbitrary integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, a: i64) -> u8 {
        a.rem_euclid(self.p as i64) as u8
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.p as u16 - b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    pub fn inv(self, a: u8) -> Result<u8, AlgebraError> {
        if a % self.p == 0 {
            return Err(AlgebraError::ZeroInverse);
        }
        Ok(self.pow(a, self.p as u32 - 2))
    }

    #[inline]
    fn inv_nonzero(self, a: u8) -> u8 {
        debug_assert!(a != 0);
        self.pow(a, self.p as u32 - 2)
    }

    pub fn pow(self, a: u8, mut e: u32) -> u8 {
        let mut base = a % self.p;
        let mut acc = 1u8;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `dst += f * src`, entrywise.
    #[inline]
    fn axpy(self, dst: &mut [u8], f: u8, src: &[u8]) {
        let p = self.p as u16;
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = ((*d as u16 + f as u16 * s as u16) % p) as u8;
        }
    }

    #[inline]
    fn scale(self, row: &mut [u8], f: u8) {
        for x in row.iter_mut() {
            *x = self.mul(*x, f);
        }
    }

    pub fn dot(self, a: &[u8], b: &[u8]) -> u8 {
        let acc: u32 = a.iter().zip(b).map(|(&x, &y)| x as u32 * y as u32).sum();
        (acc % self.p as u32) as u8
    }

    /// All vectors of length `len` whose first nonzero entry is 1, in
    /// lexicographic order. These represent the projective points of F^len.
    pub fn projective_points(self, len: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        for lead in 0..len {
            let tail = len - lead - 1;
            let count = (self.p as usize).pow(tail as u32);
            for code in 0..count {
                let mut v = vec![0u8; len];
                v[lead] = 1;
                let mut c = code;
                for j in (lead + 1..len).rev() {
                    v[j] = (c % self.p as usize) as u8;
                    c /= self.p as usize;
                }
                out.push(v);
            }
        }
        out.sort();
        out
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Gaussian binomial coefficient `[n choose k]_q`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Dense row-major matrix over GF(p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.cols.max(1)).take(self.rows)).finish()
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry modulo `p`.
    pub fn from_rows<R: AsRef<[i64]>>(field: Field, rows: &[R]) -> Result<Self, AlgebraError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(AlgebraError::ShapeMismatch {
                    expected: format!("{cols} columns"),
                    got: format!("{} columns", r.len()),
                });
            }
            data.extend(r.iter().map(|&x| field.reduce(x)));
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    /// Wraps already-reduced row-major data.
    pub fn from_data(rows: usize, cols: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u8]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn mul(&self, field: Field, rhs: &Matrix) -> Result<Matrix, AlgebraError> {
        if self.cols != rhs.rows {
            return Err(AlgebraError::ShapeMismatch {
                expected: format!("{} rows", self.cols),
                got: format!("{} rows", rhs.rows),
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        let p = field.p() as u32;
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0u32;
                for t in 0..self.cols {
                    acc += self.data[i * self.cols + t] as u32 * rhs.data[t * rhs.cols + j] as u32;
                }
                out.data[i * rhs.cols + j] = (acc % p) as u8;
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, field: Field, f: u8) -> Matrix {
        let mut m = self.clone();
        field.scale(&mut m.data, f);
        m
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, AlgebraError> {
        if self.rows > 0 && other.rows > 0 && self.cols != other.cols {
            return Err(AlgebraError::ShapeMismatch {
                expected: format!("{} columns", self.cols),
                got: format!("{} columns", other.cols),
            });
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { rows: self.rows + other.rows, cols, data })
    }

    pub fn to_nested(&self) -> Vec<Vec<u8>> {
        self.row_iter().map(|r| r.to_vec()).collect()
    }
}

/// Result of a row reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Reduced row-echelon form. Zero rows are dropped, so the returned matrix
/// has exactly `rank` rows.
pub fn rref(field: Field, m: &Matrix) -> Echelon {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.data.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(i) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if i != r {
            for j in 0..cols {
                a.swap(i * cols + j, r * cols + j);
            }
        }
        let inv = field.inv_nonzero(a[r * cols + c]);
        field.scale(&mut a[r * cols..(r + 1) * cols], inv);
        let pivot_row: Vec<u8> = a[r * cols..(r + 1) * cols].to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a[i * cols + c];
            if f != 0 {
                field.axpy(&mut a[i * cols..(i + 1) * cols], field.neg(f), &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r * cols);
    Echelon { matrix: Matrix { rows: r, cols, data: a }, rank: r, pivots }
}

pub fn rank(field: Field, m: &Matrix) -> usize {
    rref(field, m).rank
}

/// The right null space `{x : m x = 0}`.
pub fn kernel(field: Field, m: &Matrix) -> Subspace {
    let cols = m.cols;
    let e = rref(field, m);
    let mut is_pivot = vec![false; cols];
    for &c in &e.pivots {
        is_pivot[c] = true;
    }
    let mut data = Vec::new();
    let mut count = 0;
    for f in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u8; cols];
        v[f] = 1;
        for (j, &c) in e.pivots.iter().enumerate() {
            v[c] = field.neg(e.matrix.get(j, f));
        }
        data.extend(v);
        count += 1;
    }
    Subspace::from_matrix(field, &Matrix { rows: count, cols, data })
}

/// A linear subspace of F^n, stored as its canonical RREF basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: u8,
    dim: u8,
    basis: Vec<u8>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, r) in self.rows().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            for x in r {
                write!(f, "{x}")?;
            }
        }
        write!(f, ">")
    }
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { n: n as u8, dim: 0, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        let id = Matrix::identity(n);
        Subspace { n: n as u8, dim: n as u8, basis: id.data }
    }

    /// Row space of `m`.
    pub fn from_matrix(field: Field, m: &Matrix) -> Self {
        let e = rref(field, m);
        Subspace { n: m.cols as u8, dim: e.rank as u8, basis: e.matrix.data }
    }

    /// Span of the given vectors in F^n.
    pub fn span<R: AsRef<[u8]>>(field: Field, n: usize, vectors: &[R]) -> Self {
        let mut data = Vec::with_capacity(vectors.len() * n);
        for v in vectors {
            let v = v.as_ref();
            assert_eq!(v.len(), n, "vector length must equal ambient dimension");
            data.extend(v.iter().map(|&x| x % field.p()));
        }
        Self::from_matrix(field, &Matrix { rows: vectors.len(), cols: n, data })
    }

    /// Span of standard basis vectors `e_i` for the given indices.
    pub fn coordinate(field: Field, n: usize, indices: &[usize]) -> Self {
        let vs: Vec<Vec<u8>> = indices
            .iter()
            .map(|&i| {
                let mut v = vec![0u8; n];
                v[i] = 1;
                v
            })
            .collect();
        Self::span(field, n, &vs)
    }

    /// Rebuilds a subspace from a basis that is already canonical, checking
    /// that it really is.
    pub fn from_canonical(field: Field, n: usize, rows: &[Vec<u8>]) -> Option<Self> {
        let s = Self::span(field, n, rows);
        let given: Vec<u8> = rows.iter().flatten().copied().collect();
        (s.basis == given).then_some(s)
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }

    /// Canonical basis bytes, row-major.
    #[inline]
    pub fn bytes(&self) -> &[u8] {
        &self.basis
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.basis.chunks(self.n.max(1) as usize).take(self.dim as usize)
    }

    pub fn row(&self, i: usize) -> &[u8] {
        let n = self.n as usize;
        &self.basis[i * n..(i + 1) * n]
    }

    pub fn basis_matrix(&self) -> Matrix {
        Matrix { rows: self.dim as usize, cols: self.n as usize, data: self.basis.clone() }
    }

    pub fn to_nested(&self) -> Vec<Vec<u8>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), AlgebraError> {
        if self.n != other.n {
            return Err(AlgebraError::AmbientMismatch(self.ambient(), other.ambient()));
        }
        Ok(())
    }

    pub fn sum(&self, field: Field, other: &Subspace) -> Result<Subspace, AlgebraError> {
        self.check_ambient(other)?;
        let mut data = self.basis.clone();
        data.extend_from_slice(&other.basis);
        let m = Matrix { rows: self.dim() + other.dim(), cols: self.ambient(), data };
        Ok(Self::from_matrix(field, &m))
    }

    /// Annihilator under the standard dot product.
    pub fn annihilator(&self, field: Field) -> Subspace {
        if self.dim == 0 {
            return Subspace::full(self.ambient());
        }
        kernel(field, &self.basis_matrix())
    }

    pub fn intersect(&self, field: Field, other: &Subspace) -> Result<Subspace, AlgebraError> {
        self.check_ambient(other)?;
        if self.contains_unchecked(field, other) {
            return Ok(other.clone());
        }
        if other.contains_unchecked(field, self) {
            return Ok(self.clone());
        }
        let a = self.annihilator(field);
        let b = other.annihilator(field);
        let stacked = a.basis_matrix().vstack(&b.basis_matrix())?;
        if stacked.rows == 0 {
            return Ok(Subspace::full(self.ambient()));
        }
        Ok(kernel(field, &stacked))
    }

    /// Reduces `v` in place against this basis; the result is zero iff `v`
    /// lies in the subspace.
    fn reduce_vector(&self, field: Field, v: &mut [u8]) {
        for (j, row) in self.rows().enumerate() {
            let _ = j;
            let c = row.iter().position(|&x| x != 0).unwrap();
            let f = v[c];
            if f != 0 {
                field.axpy(v, field.neg(f), row);
            }
        }
    }

    pub fn contains_vector(&self, field: Field, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        self.reduce_vector(field, &mut w);
        w.iter().all(|&x| x == 0)
    }

    fn contains_unchecked(&self, field: Field, other: &Subspace) -> bool {
        if other.dim > self.dim {
            return false;
        }
        other.rows().all(|r| self.contains_vector(field, r))
    }

    /// True iff `other` is a subspace of `self`.
    pub fn contains(&self, field: Field, other: &Subspace) -> Result<bool, AlgebraError> {
        self.check_ambient(other)?;
        Ok(self.contains_unchecked(field, other))
    }

    /// Image under the linear map `x -> m x` (column-vector convention).
    pub fn image(&self, field: Field, m: &Matrix) -> Result<Subspace, AlgebraError> {
        if m.cols != self.ambient() {
            return Err(AlgebraError::ShapeMismatch {
                expected: format!("{} columns", self.ambient()),
                got: format!("{} columns", m.cols),
            });
        }
        if self.dim == 0 {
            return Ok(Subspace::zero(m.rows));
        }
        let img = self.basis_matrix().mul(field, &m.transpose())?;
        Ok(Self::from_matrix(field, &img))
    }

    /// Maps a coefficient matrix (rows in F^dim) through this basis.
    fn combine(&self, field: Field, coeffs: &Matrix) -> Subspace {
        let m = coeffs.mul(field, &self.basis_matrix()).expect("coefficient width equals dim");
        Self::from_matrix(field, &m)
    }

    /// All `d`-dimensional subspaces of this subspace.
    pub fn subspaces(&self, field: Field, d: usize) -> Vec<Subspace> {
        if d > self.dim() {
            return Vec::new();
        }
        if d == 0 {
            return vec![Subspace::zero(self.ambient())];
        }
        let mut out: Vec<Subspace> = all_subspaces(field, self.dim(), d)
            .iter()
            .map(|c| self.combine(field, &c.basis_matrix()))
            .collect();
        out.sort();
        out
    }

    /// The hyperplanes of this subspace.
    pub fn hyperplanes(&self, field: Field) -> Vec<Subspace> {
        let k = self.dim();
        if k == 0 {
            return Vec::new();
        }
        if k == 1 {
            return vec![Subspace::zero(self.ambient())];
        }
        let mut out: Vec<Subspace> = field
            .projective_points(k)
            .iter()
            .map(|c| {
                let coeff = kernel(field, &Matrix { rows: 1, cols: k, data: c.clone() });
                self.combine(field, &coeff.basis_matrix())
            })
            .collect();
        out.sort();
        out
    }

    /// The subspaces of F^n of dimension `dim + 1` containing this one.
    pub fn superspaces(&self, field: Field) -> Vec<Subspace> {
        let n = self.ambient();
        let pivots = self.pivots();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut out: Vec<Subspace> = field
            .projective_points(free.len())
            .iter()
            .map(|c| {
                let mut v = vec![0u8; n];
                for (&col, &x) in free.iter().zip(c) {
                    v[col] = x;
                }
                let mut data = self.basis.clone();
                data.extend(v);
                Self::from_matrix(field, &Matrix { rows: self.dim() + 1, cols: n, data })
            })
            .collect();
        out.sort();
        out
    }

    /// The projective points (1-dimensional subspaces) inside this subspace.
    pub fn points(&self, field: Field) -> Vec<Subspace> {
        self.subspaces(field, 1)
    }

    /// Some nonzero vector of the subspace (the first basis row).
    pub fn first_vector(&self) -> Option<&[u8]> {
        (self.dim > 0).then(|| self.row(0))
    }
}

/// Every `d`-dimensional subspace of F^n, sorted by canonical basis bytes.
pub fn all_subspaces(field: Field, n: usize, d: usize) -> Vec<Subspace> {
    if d > n {
        return Vec::new();
    }
    if d == 0 {
        return vec![Subspace::zero(n)];
    }
    let p = field.p();
    let mut out = Vec::new();
    let mut pivots: Vec<usize> = (0..d).collect();
    loop {
        // free positions: row i, columns c > pivots[i] not in pivots
        let free: Vec<(usize, usize)> = (0..d)
            .flat_map(|i| {
                let piv = pivots.clone();
                ((pivots[i] + 1)..n).filter(move |c| !piv.contains(c)).map(move |c| (i, c))
            })
            .collect();
        let mut vals = vec![0u8; free.len()];
        loop {
            let mut data = vec![0u8; d * n];
            for (i, &c) in pivots.iter().enumerate() {
                data[i * n + c] = 1;
            }
            for (&(i, c), &v) in free.iter().zip(&vals) {
                data[i * n + c] = v;
            }
            out.push(Subspace { n: n as u8, dim: d as u8, basis: data });
            // odometer increment
            let mut j = 0;
            while j < vals.len() {
                vals[j] += 1;
                if vals[j] < p {
                    break;
                }
                vals[j] = 0;
                j += 1;
            }
            if j == vals.len() {
                break;
            }
        }
        // next pivot combination
        let mut i = d;
        loop {
            if i == 0 {
                out.sort();
                return out;
            }
            i -= 1;
            if pivots[i] < n - d + i {
                pivots[i] += 1;
                for j in i + 1..d {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f3() -> Field {
        Field::new(3).unwrap()
    }

    #[test]
    fn field_validation() {
        assert_eq!(Field::new(2), Err(AlgebraError::CharacteristicTwo));
        assert_eq!(Field::new(9), Err(AlgebraError::NotPrime(9)));
        assert_eq!(Field::new(1), Err(AlgebraError::NotPrime(1)));
        assert_eq!(Field::new(257), Err(AlgebraError::OutOfRange(257)));
        assert!(Field::new(251).is_ok());
    }

    #[test]
    fn field_ops() {
        let f = f3();
        assert_eq!(f.inv(2), Ok(2));
        assert_eq!(f.neg(1), 2);
        assert_eq!(f.inv(0), Err(AlgebraError::ZeroInverse));
        let f5 = Field::new(5).unwrap();
        assert_eq!(f5.mul(3, 4), 2);
        assert_eq!(f5.sub(1, 3), 3);
        for a in 1..5 {
            assert_eq!(f5.mul(a, f5.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn rref_examples() {
        let f = f3();
        let e = rref(f, &Matrix::from_rows(f, &[[2, 0], [0, 1]]).unwrap());
        assert_eq!(e.matrix.to_nested(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(e.rank, 2);
        let e = rref(f, &Matrix::from_rows(f, &[[1, 1], [2, 2]]).unwrap());
        assert_eq!(e.matrix.to_nested(), vec![vec![1, 1]]);
        assert_eq!(e.rank, 1);
        let e = rref(f, &Matrix::zeros(2, 2));
        assert_eq!(e.rank, 0);
        assert!(e.pivots.is_empty());
    }

    #[test]
    fn kernel_examples() {
        let f = f3();
        assert!(kernel(f, &Matrix::identity(4)).is_zero());
        assert_eq!(kernel(f, &Matrix::zeros(1, 4)), Subspace::full(4));
        let k = kernel(f, &Matrix::from_rows(f, &[[1, 0, 0, 0]]).unwrap());
        assert_eq!(k, Subspace::coordinate(f, 4, &[1, 2, 3]));
        assert_eq!(k.dim(), 3);
    }

    #[test]
    fn lattice_examples() {
        let f = f3();
        // basis order e1, f1, e2, f2
        let e1 = Subspace::coordinate(f, 4, &[0]);
        let f1 = Subspace::coordinate(f, 4, &[1]);
        let e1f1 = Subspace::coordinate(f, 4, &[0, 1]);
        let e2f2 = Subspace::coordinate(f, 4, &[2, 3]);
        assert_eq!(e1.sum(f, &f1).unwrap(), e1f1);
        assert_eq!(e1f1.sum(f, &e1f1).unwrap(), e1f1);
        assert_eq!(e1f1.sum(f, &Subspace::zero(4)).unwrap(), e1f1);
        assert!(e1f1.intersect(f, &e2f2).unwrap().is_zero());
        let skew = Subspace::span(f, 4, &[[1, 0, 0, 0], [0, 1, 1, 0]]);
        assert_eq!(e1f1.intersect(f, &skew).unwrap(), e1);
        let big = Subspace::coordinate(f, 4, &[0, 1, 2]);
        assert!(big.contains(f, &e1).unwrap());
        assert!(!Subspace::zero(4).contains(f, &e1).unwrap());
        assert!(e1.sum(f, &Subspace::zero(3)).is_err());
    }

    #[test]
    fn subspace_counts_match_gaussian_binomials() {
        for &(p, n) in &[(3u32, 4usize), (5, 3), (3, 5)] {
            let f = Field::new(p).unwrap();
            for d in 0..=n {
                let all = all_subspaces(f, n, d);
                assert_eq!(all.len() as u128, gaussian_binomial(n, d, p as u64), "p={p} n={n} d={d}");
                assert!(all.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert_eq!(gaussian_binomial(4, 2, 3), 130);
    }

    #[test]
    fn hyperplanes_and_superspaces() {
        let f = f3();
        let u = Subspace::coordinate(f, 4, &[0, 1, 2]);
        let hs = u.hyperplanes(f);
        assert_eq!(hs.len(), 13);
        assert!(hs.iter().all(|h| h.dim() == 2 && u.contains(f, h).unwrap()));
        let line = Subspace::coordinate(f, 4, &[0, 1]);
        let sup = line.superspaces(f);
        assert_eq!(sup.len(), 4);
        assert!(sup.iter().all(|b| b.dim() == 3 && b.contains(f, &line).unwrap()));
        assert_eq!(Subspace::full(4).points(f).len(), 40);
    }

    fn arb_matrix(p: u32, max_rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
        (0..=max_rows).prop_flat_map(move |r| {
            proptest::collection::vec(0..p as u8, r * cols).prop_map(move |d| Matrix::from_data(r, cols, d))
        })
    }

    proptest! {
        #[test]
        fn rref_is_canonical(m in arb_matrix(5, 5, 5), shuffle in proptest::collection::vec(1u8..5, 5)) {
            let f = Field::new(5).unwrap();
            let e = rref(f, &m);
            prop_assert_eq!(rref(f, &e.matrix).matrix, e.matrix.clone());
            // rescaled rows span the same space
            let mut m2 = m.clone();
            for r in 0..m2.rows() {
                for c in 0..m2.cols() {
                    let v = f.mul(m2.get(r, c), shuffle[r]);
                    m2.set(r, c, v);
                }
            }
            prop_assert_eq!(rref(f, &m2).matrix, e.matrix);
        }

        #[test]
        fn kernel_rank_duality(m in arb_matrix(3, 4, 6)) {
            let f = f3();
            let k = kernel(f, &m);
            prop_assert_eq!(k.dim() + rank(f, &m), m.cols());
            for v in k.rows() {
                for r in m.row_iter() {
                    prop_assert_eq!(f.dot(r, v), 0);
                }
            }
        }

        #[test]
        fn modular_dimension_law(a in arb_matrix(3, 4, 5), b in arb_matrix(3, 4, 5)) {
            let f = f3();
            let u = Subspace::from_matrix(f, &a);
            let w = Subspace::from_matrix(f, &b);
            let s = u.sum(f, &w).unwrap();
            let i = u.intersect(f, &w).unwrap();
            prop_assert_eq!(u.dim() + w.dim(), s.dim() + i.dim());
            prop_assert!(u.contains(f, &i).unwrap() && w.contains(f, &i).unwrap());
            prop_assert!(s.contains(f, &u).unwrap() && s.contains(f, &w).unwrap());
        }
    }
}
