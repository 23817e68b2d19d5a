//! Exact integer matrix algebra.
//!
//! Everything here works over arbitrary-precision integers: Smith normal
//! form with unimodular transforms, kernels, cokernels, lattice quotients,
//! and the canonical invariant-factor form of finitely generated abelian
//! groups.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("entry count {len} does not match a {rows}x{cols} matrix")]
    Shape { rows: usize, cols: usize, len: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("generator {column} of the sublattice is not in the span of the ambient basis")]
    Membership { column: usize },
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. Panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a `dim x columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns<R: AsRef<[i64]>>(dim: usize, columns: &[R]) -> Self {
        let mut m = Self::zeros(dim, columns.len());
        for (j, col) in columns.iter().enumerate() {
            let col = col.as_ref();
            assert_eq!(col.len(), dim, "column length mismatch");
            for (i, &x) in col.iter().enumerate() {
                m.data[i * m.cols + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn from_big_columns(dim: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(dim, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length mismatch");
            for (i, x) in col.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        m
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.data[i * cols + i] = d.clone();
        }
        m
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

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: BigInt) {
        self.data[r * self.cols + c] = value;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let e = self.get(r, c);
                    if r == c {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn apply_i64(&self, v: &[i64]) -> Vec<BigInt> {
        let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.apply(&v)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> Result<Self, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::Dimension(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut m = Self::zeros(self.rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.data[r * cols + c] = self.get(r, c).clone();
            }
            for c in 0..other.cols {
                m.data[r * cols + self.cols + c] = other.get(r, c).clone();
            }
        }
        Ok(m)
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &IntMatrix) -> Result<Self, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::Dimension(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend(self.row(r).iter().cloned());
        }
        IntMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                m.data[r * idx.len() + j] = self.get(r, c).clone();
            }
        }
        m
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * a[n * n - 1].clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().abs().is_one()
    }

    /// Adjugate matrix, so that `self * adj = det * I`.
    pub fn adjugate(&self) -> Self {
        assert!(self.is_square(), "adjugate of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Self::zeros(0, 0);
        }
        if n == 1 {
            return Self::identity(1);
        }
        let mut adj = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&i| i != c).collect();
                let cols: Vec<usize> = (0..n).filter(|&j| j != r).collect();
                let minor = self.select_rows(&rows).select_columns(&cols).det();
                let signed = if (r + c) % 2 == 0 { minor } else { -minor };
                adj.set(r, c, signed);
            }
        }
        adj
    }

    /// Inverse of a unimodular matrix, `None` otherwise.
    pub fn inverse_unimodular(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let d = self.det();
        if !d.abs().is_one() {
            return None;
        }
        Some(self.adjugate().scale(&d))
    }

    pub fn pow(&self, e: u32) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Reduces every entry into `[0, n)`.
    pub fn reduce_mod(&self, n: &BigInt) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mod_floor(n)).collect(),
        }
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c] * k;
            self.data[dst * self.cols + c] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + src] * k;
            self.data[r * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -std::mem::take(&mut self.data[r * self.cols + c]);
            self.data[r * self.cols + c] = v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = -std::mem::take(&mut self.data[r * self.cols + c]);
            self.data[r * self.cols + c] = v;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (c, x) in self.row(r).iter().enumerate() {
                if c > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for r in 0..self.rows {
            let row: Vec<serde_json::Value> = self.row(r).iter().map(bigint_json).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// JSON number when it fits in an i64, decimal string otherwise.
pub fn bigint_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(x.to_string()),
    }
}

impl<'a> Mul<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &'a IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = a * rhs.get(k, j);
                    out.data[i * rhs.cols + j] += v;
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;

    fn add(self, rhs: &'a IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;

    fn sub(self, rhs: &'a IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;

    fn neg(self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

/// `U * M * V = D` with `U`, `V` unimodular and `D` diagonal in divisibility order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `u`, maintained alongside the row operations.
    pub u_inv: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries `d_1 | d_2 | ...`, length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Position of the nonzero entry of least absolute value in the lower-right
/// block starting at `t`; ties go to the smaller row, then the smaller column.
fn smallest_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            let x = d.get(i, j);
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                best = Some((i, j, a));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = smallest_pivot(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = d.get(i, t).div_floor(d.get(t, t));
                let nq = -&q;
                d.add_row_multiple(i, t, &nq);
                u.add_row_multiple(i, t, &nq);
                u_inv.add_col_multiple(t, i, &q);
                if !d.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = d.get(t, j).div_floor(d.get(t, t));
                let nq = -&q;
                d.add_col_multiple(j, t, &nq);
                v.add_col_multiple(j, t, &nq);
                if !d.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // Bring the smallest leftover in row/column t to the pivot.
                let mut best = (t, t, d.get(t, t).abs());
                for i in t + 1..rows {
                    let a = d.get(i, t).abs();
                    if !a.is_zero() && a < best.2 {
                        best = (i, t, a);
                    }
                }
                for j in t + 1..cols {
                    let a = d.get(t, j).abs();
                    if !a.is_zero() && a < best.2 {
                        best = (t, j, a);
                    }
                }
                let (bi, bj, _) = best;
                d.swap_rows(t, bi);
                u.swap_rows(t, bi);
                u_inv.swap_cols(t, bi);
                d.swap_cols(t, bj);
                v.swap_cols(t, bj);
                continue;
            }
            let pivot = d.get(t, t).clone();
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !d.get(i, j).mod_floor(&pivot).is_zero())
            });
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                    u_inv.add_col_multiple(i, t, &-one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    SmithDecomposition { u, d, v, u_inv }
}

/// Finitely generated abelian group `Z^free_rank + Z/a_1 + ... + Z/a_k`
/// with `1 < a_1 | a_2 | ... | a_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FGAbelianGroup {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl FGAbelianGroup {
    pub fn trivial() -> Self {
        FGAbelianGroup {
            free_rank: 0,
            invariant_factors: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FGAbelianGroup {
            free_rank: rank,
            invariant_factors: Vec::new(),
        }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_cyclic_orders(&[BigInt::from(n)])
    }

    /// Canonical form of a direct sum of cyclic groups `Z/o_i` (`o_i = 0` means `Z`).
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let n = orders.len();
        cokernel_presentation(&IntMatrix::diagonal(n, n, orders))
    }

    /// Canonical form for explicit invariant factors given in any order; entries
    /// equal to one are dropped.
    pub fn from_invariant_factors(factors: &[u64]) -> Self {
        let big: Vec<BigInt> = factors.iter().map(|&x| BigInt::from(x)).collect();
        Self::from_cyclic_orders(&big)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.invariant_factors.iter().product())
    }

    pub fn torsion(&self) -> FGAbelianGroup {
        FGAbelianGroup {
            free_rank: 0,
            invariant_factors: self.invariant_factors.clone(),
        }
    }

    pub fn direct_sum(&self, other: &FGAbelianGroup) -> FGAbelianGroup {
        let mut orders: Vec<BigInt> = self
            .invariant_factors
            .iter()
            .chain(&other.invariant_factors)
            .cloned()
            .collect();
        orders.extend(std::iter::repeat_n(
            BigInt::zero(),
            self.free_rank + other.free_rank,
        ));
        Self::from_cyclic_orders(&orders)
    }

    /// Every element is killed by `n`.
    pub fn is_killed_by(&self, n: u64) -> bool {
        let n = BigInt::from(n);
        self.is_finite() && self.invariant_factors.iter().all(|a| n.is_multiple_of(a))
    }

    pub fn invariant_factors_u64(&self) -> Vec<u64> {
        self.invariant_factors
            .iter()
            .map(|x| x.to_u64().expect("invariant factor exceeds u64"))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "free_rank": self.free_rank,
            "invariant_factors": self.invariant_factors.iter().map(bigint_json).collect::<Vec<_>>(),
            "order": self.order().map(|o| bigint_json(&o)),
        })
    }
}

impl fmt::Display for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|a| format!("Z/{a}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// Cokernel of the column span of `m` inside `Z^rows`.
pub fn cokernel_presentation(m: &IntMatrix) -> FGAbelianGroup {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    let invariant_factors = diag
        .into_iter()
        .filter(|x| !x.is_zero() && !x.is_one())
        .collect();
    FGAbelianGroup {
        free_rank: m.rows - rank,
        invariant_factors,
    }
}

/// Columns form a basis of the (saturated) integer kernel `{x : m x = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let idx: Vec<usize> = (rank..m.cols).collect();
    snf.v.select_columns(&idx)
}

/// Basis (as columns) of the lattice spanned by the columns of `gens`.
pub fn lattice_basis(gens: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(gens);
    let diag = snf.diagonal();
    let rank = snf.rank();
    let mut basis = snf.u_inv.select_columns(&(0..rank).collect::<Vec<_>>());
    for (j, d) in diag.iter().take(rank).enumerate() {
        for r in 0..basis.rows {
            let v = basis.get(r, j) * d;
            basis.set(r, j, v);
        }
    }
    basis
}

/// Integer coordinates of each column of `targets` in terms of a lattice
/// basis, or the index of the first column outside the lattice.
fn lattice_coordinates(
    basis_snf: &SmithDecomposition,
    targets: &IntMatrix,
) -> Result<IntMatrix, LinalgError> {
    let diag = basis_snf.diagonal();
    let rank = basis_snf.rank();
    let transformed = &basis_snf.u * targets;
    let mut coords = IntMatrix::zeros(rank, targets.cols);
    for c in 0..targets.cols {
        for r in 0..transformed.rows {
            let x = transformed.get(r, c);
            if r < rank {
                let (q, rem) = x.div_rem(&diag[r]);
                if !rem.is_zero() {
                    return Err(LinalgError::Membership { column: c });
                }
                coords.set(r, c, q);
            } else if !x.is_zero() {
                return Err(LinalgError::Membership { column: c });
            }
        }
    }
    Ok(coords)
}

/// `span(sup) / span(sub)` in canonical form. Every column of `sub` must lie
/// in the integer span of `sup`.
pub fn lattice_subquotient(
    sup_basis: &IntMatrix,
    sub_generators: &IntMatrix,
) -> Result<FGAbelianGroup, LinalgError> {
    if sup_basis.rows != sub_generators.rows {
        return Err(LinalgError::Dimension(format!(
            "ambient dimensions {} and {}",
            sup_basis.rows, sub_generators.rows
        )));
    }
    let snf = smith_normal_form(sup_basis);
    let coords = lattice_coordinates(&snf, sub_generators)?;
    Ok(cokernel_presentation(&coords))
}

/// Whether every column of `sub` lies in the integer span of `sup`.
pub fn lattice_contains(sup: &IntMatrix, sub: &IntMatrix) -> bool {
    lattice_coordinates(&smith_normal_form(sup), sub).is_ok()
}

/// Basis of `span(a) ∩ span(b)`.
pub fn lattice_intersection(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    let joint = a.hstack(&-b)?;
    let ker = kernel_basis(&joint);
    let top: Vec<usize> = (0..a.cols).collect();
    let coeffs = ker.select_rows(&top);
    Ok(lattice_basis(&(a * &coeffs)))
}

/// Basis of `{x in Z^cols : m x ≡ 0 (mod n)}`.
pub fn kernel_mod(m: &IntMatrix, n: &BigInt) -> IntMatrix {
    let scaled = IntMatrix::identity(m.rows).scale(&-n);
    let joint = m.hstack(&scaled).expect("row counts agree");
    let ker = kernel_basis(&joint);
    let top: Vec<usize> = (0..m.cols).collect();
    lattice_basis(&ker.select_rows(&top))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_snf(m: &IntMatrix) -> SmithDecomposition {
        let s = smith_normal_form(m);
        assert_eq!(&(&s.u * m) * &s.v, s.d);
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
        assert!((&s.u * &s.u_inv).is_identity());
        for r in 0..s.d.rows() {
            for c in 0..s.d.cols() {
                if r != c {
                    assert!(s.d.get(r, c).is_zero());
                }
            }
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        s
    }

    #[test]
    fn snf_identity() {
        let s = check_snf(&IntMatrix::identity(2));
        assert_eq!(s.d, IntMatrix::identity(2));
    }

    #[test]
    fn snf_two_by_two() {
        let s = check_snf(&IntMatrix::from_rows(&[[2, 4], [6, 8]]));
        assert_eq!(s.diagonal(), big(&[2, 4]));
    }

    #[test]
    fn snf_zero_and_empty() {
        let s = check_snf(&IntMatrix::zeros(2, 3));
        assert!(s.d.is_zero());
        assert_eq!((s.d.rows(), s.d.cols()), (2, 3));
        let e = check_snf(&IntMatrix::zeros(0, 3));
        assert_eq!(e.v, IntMatrix::identity(3));
        let e = check_snf(&IntMatrix::zeros(3, 0));
        assert_eq!(e.u, IntMatrix::identity(3));
    }

    #[test]
    fn snf_needs_divisibility_fix() {
        let s = check_snf(&IntMatrix::from_rows(&[[2, 0], [0, 3]]));
        assert_eq!(s.diagonal(), big(&[1, 6]));
    }

    #[test]
    fn cokernel_examples() {
        assert!(cokernel_presentation(&IntMatrix::identity(3)).is_trivial());
        let g = cokernel_presentation(&IntMatrix::from_rows(&[[2, 0], [0, 0]]));
        assert_eq!(g.free_rank, 1);
        assert_eq!(g.invariant_factors, big(&[2]));
        assert_eq!(
            cokernel_presentation(&IntMatrix::from_rows(&[[3]])),
            FGAbelianGroup::cyclic(3)
        );
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&IntMatrix::from_rows(&[[1, 1]]));
        assert_eq!(k.cols(), 1);
        let col = k.column(0);
        assert!(col == big(&[1, -1]) || col == big(&[-1, 1]));

        assert_eq!(kernel_basis(&IntMatrix::identity(3)).cols(), 0);

        let k = kernel_basis(&IntMatrix::from_rows(&[[2, -2]]));
        let col = k.column(0);
        assert!(col == big(&[1, 1]) || col == big(&[-1, -1]));
    }

    #[test]
    fn subquotient_examples() {
        let id = IntMatrix::identity(2);
        let g = lattice_subquotient(&id, &id.scale(&BigInt::from(2))).unwrap();
        assert_eq!(g, FGAbelianGroup::from_invariant_factors(&[2, 2]));

        let g = lattice_subquotient(&id, &IntMatrix::from_columns(2, &[[1, 1]])).unwrap();
        assert_eq!(g, FGAbelianGroup::free(1));

        let g = lattice_subquotient(
            &IntMatrix::from_columns(2, &[[1, 1]]),
            &IntMatrix::from_columns(2, &[[2, 2]]),
        )
        .unwrap();
        assert_eq!(g, FGAbelianGroup::cyclic(2));
    }

    #[test]
    fn subquotient_rejects_outside_generator() {
        let err = lattice_subquotient(
            &IntMatrix::from_columns(2, &[[1, 1]]),
            &IntMatrix::from_columns(2, &[[2, 2], [1, 0]]),
        )
        .unwrap_err();
        assert_eq!(err, LinalgError::Membership { column: 1 });
        // Index-2 sublattice: (1,0) is outside span{(2,0),(0,1)}.
        let err = lattice_subquotient(
            &IntMatrix::from_columns(2, &[[2, 0], [0, 1]]),
            &IntMatrix::from_columns(2, &[[1, 0]]),
        )
        .unwrap_err();
        assert_eq!(err, LinalgError::Membership { column: 0 });
    }

    #[test]
    fn subquotient_with_dependent_ambient_generators() {
        let sup = IntMatrix::from_columns(2, &[[2, 0], [0, 2], [2, 2]]);
        let sub = IntMatrix::from_columns(2, &[[4, 0]]);
        let g = lattice_subquotient(&sup, &sub).unwrap();
        assert_eq!(g.free_rank, 1);
        assert_eq!(g.invariant_factors, big(&[2]));
    }

    #[test]
    fn intersection_and_mod_kernel() {
        let a = IntMatrix::from_columns(2, &[[2, 0], [0, 1]]);
        let b = IntMatrix::from_columns(2, &[[1, 0], [0, 3]]);
        let i = lattice_intersection(&a, &b).unwrap();
        let g = lattice_subquotient(&IntMatrix::identity(2), &i).unwrap();
        assert_eq!(g.order(), Some(BigInt::from(6)));

        // x + y ≡ 0 mod 4 has index 4 in Z^2.
        let k = kernel_mod(&IntMatrix::from_rows(&[[1, 1]]), &BigInt::from(4));
        let g = lattice_subquotient(&IntMatrix::identity(2), &k).unwrap();
        assert_eq!(g, FGAbelianGroup::cyclic(4));
    }

    #[test]
    fn determinant_and_inverse() {
        let a = IntMatrix::from_rows(&[[0, -1], [1, 1]]);
        assert_eq!(a.det(), BigInt::one());
        let inv = a.inverse_unimodular().unwrap();
        assert!((&a * &inv).is_identity());
        assert_eq!(a.pow(6), IntMatrix::identity(2));
        let m = IntMatrix::from_rows(&[[2, 1, 0], [1, 3, 1], [0, 1, 4]]);
        assert_eq!(m.det(), BigInt::from(18));
        assert!(IntMatrix::from_rows(&[[2, 0], [0, 1]]).inverse_unimodular().is_none());
    }

    #[test]
    fn group_display_and_sum() {
        assert_eq!(FGAbelianGroup::trivial().to_string(), "0");
        assert_eq!(FGAbelianGroup::free(1).to_string(), "Z");
        let g = FGAbelianGroup::cyclic(2).direct_sum(&FGAbelianGroup::cyclic(3));
        assert_eq!(g, FGAbelianGroup::cyclic(6));
        let g = FGAbelianGroup::cyclic(2).direct_sum(&FGAbelianGroup::cyclic(2));
        assert_eq!(g.to_string(), "Z/2 + Z/2");
        assert!(g.is_killed_by(2));
    }
}
