//! Dense matrices of [`Scalar`]s: commutation data, noise matrices and the
//! small linear systems solved during storage-function synthesis.

use std::fmt;

use crate::scalar::{Mode, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ScalarMatrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Scalar::one(); n])
    }

    pub fn diagonal(diag: &[Scalar]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    /// Builds a matrix from rows; returns `None` if the rows are ragged or empty.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first()?.len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(ScalarMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
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

    pub fn in_mode(&self, mode: Mode) -> Self {
        ScalarMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().cloned().map(|s| s.in_mode(mode)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        ScalarMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(Scalar::conj)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        self.map(|x| x * s)
    }

    /// `diag(a, b)` as a block matrix.
    pub fn block_diag(a: &ScalarMatrix, b: &ScalarMatrix) -> Self {
        let mut m = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m[(i, j)] = a[(i, j)].clone();
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                m[(a.rows + i, a.cols + j)] = b[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul(&self, rhs: &ScalarMatrix) -> Option<ScalarMatrix> {
        if self.cols != rhs.rows {
            return None;
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Scalar::zero();
                for k in 0..self.cols {
                    acc = &acc + &(&self[(i, k)] * &rhs[(k, j)]);
                }
                out[(i, j)] = acc;
            }
        }
        Some(out)
    }

    pub fn sub(&self, rhs: &ScalarMatrix) -> Option<ScalarMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return None;
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Some(ScalarMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn approx_eq(&self, other: &ScalarMatrix, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.approx_eq(&self.adjoint(), tol)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.is_square() && self.approx_eq(&Self::identity(self.rows), tol)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::abs).fold(0.0, f64::max)
    }

    /// Inverse by Gauss-Jordan elimination; `None` if singular.
    pub fn inverse(&self, tol: f64) -> Option<ScalarMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Scalar::one();
        }
        let rank = aug.row_reduce(n, tol);
        if rank.len() < n {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    pub fn determinant(&self, tol: f64) -> Option<Scalar> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for col in 0..n {
            let pivot = m.pick_pivot(col, col, tol)?;
            let Some(p) = pivot else { return Some(Scalar::zero()) };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pv = m[(col, col)].clone();
            det = &det * &pv;
            let inv = pv.recip()?;
            for r in col + 1..n {
                let factor = &m[(r, col)] * &inv;
                if factor.is_exact_zero() {
                    continue;
                }
                for c in col..n {
                    let v = &m[(r, c)] - &(&factor * &m[(col, c)]);
                    m[(r, c)] = v;
                }
            }
        }
        Some(det)
    }

    /// Solves `self * x = rhs` (with `rhs` a column). Free variables are set to
    /// zero; returns `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &[Scalar], tol: f64) -> Option<Vec<Scalar>> {
        if rhs.len() != self.rows {
            return None;
        }
        let n = self.cols;
        let mut aug = Self::zeros(self.rows, n + 1);
        for i in 0..self.rows {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n)] = rhs[i].clone();
        }
        let pivots = aug.row_reduce(n, tol);
        for r in pivots.len()..self.rows {
            if !aug[(r, n)].is_negligible(tol) {
                return None;
            }
        }
        let mut x = vec![Scalar::zero(); n];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, n)].clone();
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Chooses a pivot row at or below `start` in column `col`. Exact entries
    /// take the first non-zero; floating ones the largest magnitude above `tol`.
    fn pick_pivot(&self, start: usize, col: usize, tol: f64) -> Option<Option<usize>> {
        let mut best: Option<(usize, f64)> = None;
        for r in start..self.rows {
            let v = &self[(r, col)];
            if v.is_negligible(tol) {
                continue;
            }
            if v.is_exact() {
                return Some(Some(r));
            }
            let a = v.abs();
            if best.is_none_or(|(_, b)| a > b) {
                best = Some((r, a));
            }
        }
        Some(best.map(|(r, _)| r))
    }

    /// Reduced row echelon form over the first `ncols` columns. Returns the
    /// pivot column of each leading row.
    fn row_reduce(&mut self, ncols: usize, tol: f64) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..ncols {
            if row >= self.rows {
                break;
            }
            let Some(Some(p)) = self.pick_pivot(row, col, tol) else { continue };
            self.swap_rows(p, row);
            let inv = self[(row, col)].recip().expect("pivot is non-zero");
            for c in 0..self.cols {
                let v = &self[(row, c)] * &inv;
                self[(row, c)] = v;
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self[(r, col)].clone();
                if factor.is_negligible(0.0) {
                    continue;
                }
                for c in 0..self.cols {
                    let v = &self[(r, c)] - &(&factor * &self[(row, c)]);
                    self[(r, c)] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Positive semidefiniteness of a Hermitian matrix: every principal minor
    /// is a non-negative real. Exponential in the dimension; intended for the
    /// mode-count sized matrices used here.
    pub fn is_positive_semidefinite(&self, tol: f64) -> Option<bool> {
        if !self.is_hermitian(tol) {
            return None;
        }
        let n = self.rows;
        for mask in 1u64..(1u64 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let mut sub = Self::zeros(idx.len(), idx.len());
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    sub[(a, b)] = self[(i, j)].clone();
                }
            }
            let det = sub.determinant(tol)?;
            match det.real_sign(tol) {
                Some(std::cmp::Ordering::Less) => return Some(false),
                Some(_) => {}
                None => return None,
            }
        }
        Some(true)
    }
}

impl std::ops::Index<(usize, usize)> for ScalarMatrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ScalarMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Display for ScalarMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
