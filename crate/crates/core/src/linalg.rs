//! Exact dense linear algebra, generic over the scalar type.
//!
//! Everything here works over exact rings: integer-like types (`i64`,
//! `i128`, [`BigInt`](num_bigint::BigInt)) for the Smith normal form and
//! rational types ([`Ratio`](num_rational::Ratio)) for kernels and
//! signatures. Floating-point scalars are deliberately unsupported.

use std::fmt::Debug;
use std::ops::Neg;

use num_integer::Integer;
use num_traits::{Num, Signed};

/// Scalar bundle required by [`Matrix`]: an exact commutative ring with
/// negation.
pub trait Ring: Clone + PartialEq + Debug + Num + Neg<Output = Self> {}

impl<T> Ring for T where T: Clone + PartialEq + Debug + Num + Neg<Output = T> {}

/// Integer-like scalars usable in Euclidean elimination.
pub trait EuclideanRing: Ring + Integer + Signed {}

impl<T> EuclideanRing for T where T: Ring + Integer + Signed {}

/// A dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    /// The `rows × cols` zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    /// The `n × n` identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    /// Builds a matrix from rows; returns `None` if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(Matrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(rows: usize, cols: &[Vec<T>]) -> Option<Self> {
        if cols.iter().any(|c| c.len() != rows) {
            return None;
        }
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Some(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Row vectors as owned `Vec`s.
    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Matrix product. Panics on a dimension mismatch, which is always a
    /// caller bug.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    /// Matrix–vector product.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().cloned().map(Neg::neg).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| *self.get(i, j) == if i == j { T::one() } else { T::zero() }))
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += factor * row[src]`.
    fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &T) {
        for j in 0..self.cols {
            let s = self.get(src, j).clone();
            if !s.is_zero() {
                let v = self.get(dst, j).clone() + factor.clone() * s;
                self.set(dst, j, v);
            }
        }
    }

    /// `col[dst] += factor * col[src]`.
    fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &T) {
        for i in 0..self.rows {
            let s = self.get(i, src).clone();
            if !s.is_zero() {
                let v = self.get(i, dst).clone() + factor.clone() * s;
                self.set(i, dst, v);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }
}

/// Result of [`smith_normal_form`]: `u * m * v == d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm<T> {
    pub d: Matrix<T>,
    pub u: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: EuclideanRing> SmithForm<T> {
    /// The diagonal entries of `d` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i).clone()).collect()
    }
}

/// Smith normal form by Euclidean elimination with a smallest-pivot rule.
///
/// Returns unimodular `u`, `v` with `u * m * v = d`, where `d` is diagonal,
/// non-negative, and each diagonal entry divides the next.
pub fn smith_normal_form<T: EuclideanRing>(m: &Matrix<T>) -> SmithForm<T> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = Matrix::identity(rows);
    let mut v = Matrix::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = a.get(i, j);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SmithForm { d: a, u, v };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = -a.get(i, t).div_floor(a.get(t, t));
                a.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= a.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = -a.get(t, j).div_floor(a.get(t, t));
                a.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= a.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            // Enforce the divisibility chain: fold an offending row into the
            // pivot row and reduce again (the pivot strictly shrinks).
            let offending = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(a.get(t, t))));
            match offending {
                Some(i) => {
                    let one = T::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { d: a, u, v }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant<T: EuclideanRing>(m: &Matrix<T>) -> T {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a.get(i, j).clone() * a.get(k, k).clone() - a.get(i, k).clone() * a.get(k, j).clone())
                    / prev.clone();
                a.set(i, j, v);
            }
        }
        prev = a.get(k, k).clone();
    }
    if n == 0 {
        T::one()
    } else {
        sign * a.get(n - 1, n - 1).clone()
    }
}

/// Inverse over a field by Gauss–Jordan elimination; `None` if singular.
pub fn inverse<F: Ring>(m: &Matrix<F>) -> Option<Matrix<F>> {
    assert_eq!(m.rows(), m.cols(), "inverse of a non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut inv: Matrix<F> = Matrix::identity(n);
    for c in 0..n {
        let p = (c..n).find(|&i| !a.get(i, c).is_zero())?;
        a.swap_rows(c, p);
        inv.swap_rows(c, p);
        let scale = F::one() / a.get(c, c).clone();
        for j in 0..n {
            let v = a.get(c, j).clone() * scale.clone();
            a.set(c, j, v);
            let w = inv.get(c, j).clone() * scale.clone();
            inv.set(c, j, w);
        }
        for i in 0..n {
            if i != c && !a.get(i, c).is_zero() {
                let f = -a.get(i, c).clone();
                a.add_row_multiple(i, c, &f);
                inv.add_row_multiple(i, c, &f);
            }
        }
    }
    Some(inv)
}

/// Basis of the right nullspace `{x : m x = 0}` over a field.
pub fn kernel<F: Ring>(m: &Matrix<F>) -> Vec<Vec<F>> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = F::one() / a.get(r, c).clone();
        for j in c..cols {
            let v = a.get(r, j).clone() * inv.clone();
            a.set(r, j, v);
        }
        for i in 0..rows {
            if i != r && !a.get(i, c).is_zero() {
                let f = -a.get(i, c).clone();
                a.add_row_multiple(i, r, &f);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = vec![F::zero(); cols];
            x[f] = F::one();
            for (i, &pc) in pivots.iter().enumerate() {
                x[pc] = -a.get(i, f).clone();
            }
            x
        })
        .collect()
}

/// Signature (positive minus negative index) of a symmetric matrix over an
/// ordered field, by exact congruence diagonalization.
pub fn signature<F: Ring + Signed>(g: &Matrix<F>) -> i64 {
    assert_eq!(g.rows(), g.cols(), "signature of a non-square matrix");
    let mut a = g.clone();
    let mut active: Vec<usize> = (0..a.rows()).collect();
    let mut sig = 0i64;
    while !active.is_empty() {
        let diag = active.iter().copied().find(|&i| !a.get(i, i).is_zero());
        let k = match diag {
            Some(k) => k,
            None => {
                // Zero diagonal: create a nonzero diagonal entry from an
                // off-diagonal one (x_i -> x_i + x_j, or x_i - x_j).
                let off = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| !a.get(i, j).is_zero());
                let Some((i, j)) = off else { break };
                let one = F::one();
                a.add_row_multiple(i, j, &one);
                a.add_col_multiple(i, j, &one);
                if a.get(i, i).is_zero() {
                    let two = -(F::one() + F::one());
                    a.add_row_multiple(i, j, &two);
                    a.add_col_multiple(i, j, &two);
                }
                i
            }
        };
        let d = a.get(k, k).clone();
        sig += if d.is_positive() { 1 } else { -1 };
        active.retain(|&i| i != k);
        for &i in &active {
            if a.get(i, k).is_zero() {
                continue;
            }
            let f = -(a.get(i, k).clone() / d.clone());
            a.add_row_multiple(i, k, &f);
            a.add_col_multiple(i, k, &f);
        }
    }
    sig
}

/// Solution of an affine system over GF(2): `particular + span(homogeneous)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Solution {
    pub particular: Vec<bool>,
    pub homogeneous: Vec<Vec<bool>>,
}

/// Solves `a x = b` over GF(2); `None` if the system is inconsistent.
///
/// `a` is given by rows, each of length `n`.
pub fn solve_gf2(a: &[Vec<bool>], b: &[bool], n: usize) -> Option<Gf2Solution> {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    let mut rows: Vec<(Vec<bool>, bool)> = a.iter().cloned().zip(b.iter().copied()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].0[c]) else {
            continue;
        };
        rows.swap(r, p);
        let (pivot_row, pivot_rhs) = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.0[c] {
                for (x, y) in row.0.iter_mut().zip(&pivot_row) {
                    *x ^= *y;
                }
                row.1 ^= pivot_rhs;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|(_, rhs)| *rhs) {
        return None;
    }
    let mut particular = vec![false; n];
    for (i, &pc) in pivots.iter().enumerate() {
        particular[pc] = rows[i].1;
    }
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let homogeneous = (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = vec![false; n];
            x[f] = true;
            for (i, &pc) in pivots.iter().enumerate() {
                x[pc] = rows[i].0[f];
            }
            x
        })
        .collect();
    Some(Gf2Solution { particular, homogeneous })
}

/// Rank of a set of GF(2) vectors of length `n`.
pub fn rank_gf2(vectors: &[Vec<bool>], n: usize) -> usize {
    let transposed: Vec<Vec<bool>> = (0..n).map(|j| vectors.iter().map(|v| v[j]).collect()).collect();
    // rank(A) = number of columns of A^T minus its nullity.
    let sol = solve_gf2(&transposed, &vec![false; n], vectors.len()).expect("homogeneous systems are consistent");
    vectors.len() - sol.homogeneous.len()
}
