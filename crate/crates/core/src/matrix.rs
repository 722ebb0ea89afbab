//! Small dense matrices over a [`Scalar`], plus fraction-free integer
//! elimination for ranks and determinants.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a.clone() * b.clone();
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<S> {
        (0..self.rows)
            .map(|i| self.row(i).iter().cloned().fold(S::zero(), |a, b| a + b))
            .collect()
    }

    pub fn total_sum(&self) -> S {
        self.data.iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    pub fn scale(&self, factor: &S) -> Self {
        self.map(|x| x.clone() * factor.clone())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..i).all(|j| self[(i, j)].approx_eq(&self[(j, i)], tol)))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b, tol))
    }

    /// Principal submatrix on the given (row = column) indices.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Gauss-Jordan inverse with partial pivoting; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = pivot_row(&a, col)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].clone();
            for j in 0..n {
                let v = a[(col, j)].clone() / p.clone();
                a[(col, j)] = v;
                let w = inv[(col, j)].clone() / p.clone();
                inv[(col, j)] = w;
            }
            for i in 0..n {
                if i == col || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in 0..n {
                    if !a[(col, j)].is_zero() {
                        let d = f.clone() * a[(col, j)].clone();
                        a[(i, j)] -= d;
                    }
                    if !inv[(col, j)].is_zero() {
                        let d = f.clone() * inv[(col, j)].clone();
                        inv[(i, j)] -= d;
                    }
                }
            }
        }
        Some(inv)
    }

    /// Solve `self · x = b`; `None` when singular.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert!(self.is_square() && b.len() == self.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut rhs = b.to_vec();
        for col in 0..n {
            let pivot = pivot_row(&a, col)?;
            a.swap_rows(col, pivot);
            rhs.swap(col, pivot);
            for i in col + 1..n {
                if a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone() / a[(col, col)].clone();
                for j in col..n {
                    if !a[(col, j)].is_zero() {
                        let d = f.clone() * a[(col, j)].clone();
                        a[(i, j)] -= d;
                    }
                }
                let d = f * rhs[col].clone();
                rhs[i] -= d;
            }
        }
        let mut x = vec![S::zero(); n];
        for i in (0..n).rev() {
            let mut acc = rhs[i].clone();
            for j in i + 1..n {
                if !a[(i, j)].is_zero() {
                    acc -= a[(i, j)].clone() * x[j].clone();
                }
            }
            x[i] = acc / a[(i, i)].clone();
        }
        Some(x)
    }

    pub fn determinant(&self) -> S {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let Some(pivot) = pivot_row(&a, col) else {
                return S::zero();
            };
            if pivot != col {
                a.swap_rows(col, pivot);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det = det * p.clone();
            for i in col + 1..n {
                if a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone() / p.clone();
                for j in col..n {
                    if !a[(col, j)].is_zero() {
                        let d = f.clone() * a[(col, j)].clone();
                        a[(i, j)] -= d;
                    }
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }
}

fn pivot_row<S: Scalar>(a: &Matrix<S>, col: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in col..a.rows {
        let v = &a[(i, col)];
        if !v.is_pivot_candidate() {
            continue;
        }
        // exact mode: first nonzero keeps entries small; float mode: largest magnitude
        if S::EXACT {
            return Some(i);
        }
        let m = v.to_f64().abs();
        if best.is_none_or(|(_, bm)| m > bm) {
            best = Some((i, m));
        }
    }
    best.map(|(i, _)| i)
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Row-major list of rows; rationals render as `"p/q"` strings.
impl<S: Scalar> Serialize for Matrix<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<serde_json::Value> = self.row(i).iter().map(Scalar::to_json).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Rank of an integer matrix by Bareiss fraction-free elimination.
pub fn integer_rank(rows: &[Vec<BigInt>]) -> usize {
    bareiss(rows.to_vec()).0
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn integer_determinant(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    if n == 0 {
        return BigInt::one();
    }
    let (rank, det) = bareiss(rows.to_vec());
    if rank < n {
        BigInt::zero()
    } else {
        det
    }
}

/// Returns (rank, signed last pivot). The last pivot equals the determinant
/// when the matrix is square and nonsingular.
fn bareiss(mut a: Vec<Vec<BigInt>>) -> (usize, BigInt) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut sign = 1i32;
    for col in 0..n {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            sign = -sign;
        }
        for i in rank + 1..m {
            for j in col + 1..n {
                let v = (&a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    let det = if sign < 0 { -prev } else { prev };
    (rank, det)
}
