//! Matrices and column vectors whose entries are operator polynomials.
//!
//! Products keep operator order: `(MN)_jk = Σ_l M_jl · N_lk` with the entry of
//! `M` on the left. Column vectors are `n x 1` matrices.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{Algebra, OperatorPolynomial};
use crate::error::{Error, Result};
use crate::linalg::ScalarMatrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    alg: Arc<Algebra>,
    rows: usize,
    cols: usize,
    entries: Vec<OperatorPolynomial>,
}

/// A non-zero entry of a commutator family that is asserted to vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedResidual {
    pub location: String,
    pub value: OperatorPolynomial,
}

/// Which operand sits on the left inside each bracket of [`mixed_commutators`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketOrder {
    /// `[M_ij, v_k]`
    MatrixFirst,
    /// `[v_k, M_ij]`
    VectorFirst,
}

impl OperatorMatrix {
    pub fn zeros(alg: &Arc<Algebra>, rows: usize, cols: usize) -> Self {
        OperatorMatrix {
            alg: alg.clone(),
            rows,
            cols,
            entries: vec![OperatorPolynomial::zero(alg); rows * cols],
        }
    }

    pub fn identity(alg: &Arc<Algebra>, n: usize) -> Self {
        let mut m = Self::zeros(alg, n, n);
        for i in 0..n {
            m.set(i, i, OperatorPolynomial::one(alg));
        }
        m
    }

    pub fn from_scalars(alg: &Arc<Algebra>, s: &ScalarMatrix) -> Self {
        let mut m = Self::zeros(alg, s.rows(), s.cols());
        for i in 0..s.rows() {
            for j in 0..s.cols() {
                m.set(i, j, OperatorPolynomial::constant(alg, s[(i, j)].clone()));
            }
        }
        m
    }

    /// Row-major construction. All entries must belong to `alg`.
    pub fn from_entries(
        alg: &Arc<Algebra>,
        rows: usize,
        cols: usize,
        entries: Vec<OperatorPolynomial>,
    ) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape { op: "from_entries", left: (rows, cols), right: (entries.len(), 1) });
        }
        if entries.iter().any(|e| **e.algebra() != **alg) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(OperatorMatrix { alg: alg.clone(), rows, cols, entries })
    }

    pub fn column(alg: &Arc<Algebra>, entries: Vec<OperatorPolynomial>) -> Result<Self> {
        let n = entries.len();
        Self::from_entries(alg, n, 1, entries)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &OperatorPolynomial {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: OperatorPolynomial) {
        self.entries[r * self.cols + c] = p;
    }

    pub fn entries(&self) -> &[OperatorPolynomial] {
        &self.entries
    }

    /// Entry `i` of a column vector (or of the row-major entry list).
    pub fn at(&self, i: usize) -> &OperatorPolynomial {
        &self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(OperatorPolynomial::is_zero)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.entries.iter().map(OperatorPolynomial::max_abs_coefficient).fold(0.0, f64::max)
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(OperatorPolynomial::is_exact)
    }

    pub fn map(&self, f: impl Fn(&OperatorPolynomial) -> OperatorPolynomial) -> Self {
        OperatorMatrix {
            alg: self.alg.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        self.map(|p| p.scale(s))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.alg, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Entrywise adjoint without transposition (the `M*` of a matrix of operators).
    pub fn conj(&self) -> Self {
        self.map(OperatorPolynomial::adjoint)
    }

    /// Transpose of the entrywise adjoint.
    pub fn adjoint(&self) -> Self {
        self.conj().transpose()
    }

    fn same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Shape { op, left: self.shape(), right: other.shape() });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<_>>()?;
        Ok(OperatorMatrix { alg: self.alg.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sub")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<_>>()?;
        Ok(OperatorMatrix { alg: self.alg.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape { op: "mul", left: self.shape(), right: other.shape() });
        }
        let mut out = Self::zeros(&self.alg, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = OperatorPolynomial::zero(&self.alg);
                for k in 0..self.cols {
                    let (l, r) = (self.get(i, k), other.get(k, j));
                    if l.is_zero() || r.is_zero() {
                        continue;
                    }
                    acc = acc.checked_add(&l.checked_mul(r)?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// `diag(a, b)` as a block matrix.
    pub fn block_diag(a: &Self, b: &Self) -> Result<Self> {
        if **a.algebra() != **b.algebra() {
            return Err(Error::AlgebraMismatch);
        }
        let mut m = Self::zeros(&a.alg, a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                m.set(a.rows + i, a.cols + j, b.get(i, j).clone());
            }
        }
        Ok(m)
    }

    /// Stacks `top` over `bottom`.
    pub fn vstack(top: &Self, bottom: &Self) -> Result<Self> {
        if top.cols != bottom.cols {
            return Err(Error::Shape { op: "vstack", left: top.shape(), right: bottom.shape() });
        }
        if **top.algebra() != **bottom.algebra() {
            return Err(Error::AlgebraMismatch);
        }
        let mut entries = top.entries.clone();
        entries.extend(bottom.entries.iter().cloned());
        Ok(OperatorMatrix { alg: top.alg.clone(), rows: top.rows + bottom.rows, cols: top.cols, entries })
    }

    /// The single entry of a `1 x 1` matrix.
    pub fn into_scalar_entry(self) -> Result<OperatorPolynomial> {
        if self.shape() != (1, 1) {
            return Err(Error::Shape { op: "into_scalar_entry", left: self.shape(), right: (1, 1) });
        }
        Ok(self.entries.into_iter().next().expect("1x1 matrix has one entry"))
    }
}

fn column_entries<'a>(v: &'a OperatorMatrix, op: &'static str) -> Result<Vec<&'a OperatorPolynomial>> {
    if v.cols != 1 {
        return Err(Error::Shape { op, left: v.shape(), right: (v.rows, 1) });
    }
    Ok(v.entries.iter().collect())
}

/// `[u, v†]`: entry `(j, k) = [u_j, v_k*]`. For `u = v = a` this is `Θ`.
pub fn outer_commutator(u: &OperatorMatrix, v: &OperatorMatrix) -> Result<OperatorMatrix> {
    let us = column_entries(u, "outer_commutator")?;
    let vs = column_entries(v, "outer_commutator")?;
    let mut out = OperatorMatrix::zeros(&u.alg, us.len(), vs.len());
    for (j, uj) in us.iter().enumerate() {
        for (k, vk) in vs.iter().enumerate() {
            out.set(j, k, uj.checked_commutator(&vk.adjoint())?);
        }
    }
    Ok(out)
}

/// `[u, wᵀ]`: entry `(j, k) = [u_j, w_k]`.
pub fn row_commutator(u: &OperatorMatrix, w: &OperatorMatrix) -> Result<OperatorMatrix> {
    let us = column_entries(u, "row_commutator")?;
    let ws = column_entries(w, "row_commutator")?;
    let mut out = OperatorMatrix::zeros(&u.alg, us.len(), ws.len());
    for (j, uj) in us.iter().enumerate() {
        for (k, wk) in ws.iter().enumerate() {
            out.set(j, k, uj.checked_commutator(wk)?);
        }
    }
    Ok(out)
}

/// `[s, v]` entrywise: entry `j = [s, v_j]`.
pub fn scalar_vec_commutator(s: &OperatorPolynomial, v: &OperatorMatrix) -> Result<OperatorMatrix> {
    let vs = column_entries(v, "scalar_vec_commutator")?;
    let entries = vs.iter().map(|vj| s.checked_commutator(vj)).collect::<Result<Vec<_>>>()?;
    OperatorMatrix::column(&v.alg, entries)
}

/// Every bracket between an entry of `m` and a component of the column `v`,
/// keeping only the non-zero ones. Locations are one-based `(i,j;k)`.
pub fn mixed_commutators(
    m: &OperatorMatrix,
    v: &OperatorMatrix,
    order: BracketOrder,
) -> Result<Vec<NamedResidual>> {
    let vs = column_entries(v, "mixed_commutators")?;
    let mut out = Vec::new();
    for i in 0..m.rows {
        for j in 0..m.cols {
            let mij = m.get(i, j);
            if mij.is_constant() {
                continue;
            }
            for (k, vk) in vs.iter().enumerate() {
                let value = match order {
                    BracketOrder::MatrixFirst => mij.checked_commutator(vk)?,
                    BracketOrder::VectorFirst => vk.checked_commutator(mij)?,
                };
                if !value.is_zero() {
                    out.push(NamedResidual { location: format!("({},{};{})", i + 1, j + 1, k + 1), value });
                }
            }
        }
    }
    Ok(out)
}

impl fmt::Display for OperatorMatrix {
    /// Row-major: `[[p11, p12], [p21, p22]]`.
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
                write!(f, "{}", self.get(r, c))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
