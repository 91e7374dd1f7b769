//! Dense matrices over a [`Field`], incremental sparse row echelon forms for
//! exact rank computations, and operator norms.

use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Field;

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(entries: Vec<F>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = r * out.cols + c;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[F]) -> Result<Vec<F>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&F, &F) -> F) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &F) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.mul(rhs)?.sub(&rhs.mul(self)?)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_negligible())
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).to_f64())
    }

    pub fn rank(&self) -> usize {
        let mut ech = SparseEchelon::new(self.cols);
        for r in 0..self.rows {
            ech.insert(SparseRow::from_dense(self.row(r)));
        }
        ech.rank()
    }
}

/// Sparse row: `(column, value)` pairs sorted by column, no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseRow<F> {
    entries: Vec<(usize, F)>,
}

impl<F: Field> SparseRow<F> {
    pub fn new(mut entries: Vec<(usize, F)>) -> Self {
        entries.sort_by_key(|(c, _)| *c);
        let mut merged: Vec<(usize, F)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            match merged.last_mut() {
                Some((lc, lv)) if *lc == c => *lv = lv.clone() + v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|(_, v)| !v.is_negligible());
        Self { entries: merged }
    }

    pub fn from_dense(row: &[F]) -> Self {
        Self {
            entries: row
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_negligible())
                .map(|(c, v)| (c, v.clone()))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, F)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn lead(&self) -> Option<&(usize, F)> {
        self.entries.first()
    }

    /// `self - factor * other`
    fn axpy(&self, factor: &F, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let take_left = match (self.entries.get(i), other.entries.get(j)) {
                (Some((a, _)), Some((b, _))) => a.cmp(b),
                (Some(_), None) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            match take_left {
                std::cmp::Ordering::Less => {
                    out.push(self.entries[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    let (c, v) = &other.entries[j];
                    out.push((*c, -(factor.clone() * v.clone())));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let (c, a) = &self.entries[i];
                    let v = a.clone() - factor.clone() * other.entries[j].1.clone();
                    if !v.is_negligible() {
                        out.push((*c, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Self { entries: out }
    }

    fn normalized(self) -> Self {
        match self.lead() {
            Some((_, l)) if F::EXACT => {
                let inv = F::one() / l.clone();
                Self { entries: self.entries.into_iter().map(|(c, v)| (c, v * inv.clone())).collect() }
            }
            _ => self,
        }
    }
}

/// Incrementally built row echelon form; `insert` reports whether the new
/// row was independent of the rows inserted so far.
#[derive(Clone, Debug)]
pub struct SparseEchelon<F> {
    width: usize,
    rows: Vec<SparseRow<F>>,
    pivots: HashMap<usize, usize>,
}

impl<F: Field> SparseEchelon<F> {
    pub fn new(width: usize) -> Self {
        Self { width, rows: Vec::new(), pivots: HashMap::new() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `row` against the current pivots; an empty result means `row`
    /// lies in the span.
    pub fn reduce(&self, mut row: SparseRow<F>) -> SparseRow<F> {
        while let Some((col, lead)) = row.lead() {
            match self.pivots.get(col) {
                Some(&pi) => {
                    let piv = &self.rows[pi];
                    let factor = lead.clone() / piv.entries[0].1.clone();
                    row = row.axpy(&factor, piv);
                }
                None => break,
            }
        }
        row
    }

    pub fn contains(&self, row: SparseRow<F>) -> bool {
        self.reduce(row).is_empty()
    }

    pub fn insert(&mut self, row: SparseRow<F>) -> bool {
        debug_assert!(row.entries.iter().all(|(c, _)| *c < self.width));
        let reduced = self.reduce(row);
        if reduced.is_empty() {
            return false;
        }
        let reduced = reduced.normalized();
        let col = reduced.entries[0].0;
        self.pivots.insert(col, self.rows.len());
        self.rows.push(reduced);
        true
    }
}

/// Rank of a list of sparse rows.
pub fn sparse_rank<F: Field>(width: usize, rows: impl IntoIterator<Item = SparseRow<F>>) -> usize {
    let mut ech = SparseEchelon::new(width);
    for r in rows {
        ech.insert(r);
    }
    ech.rank()
}

/// Largest singular value of a dense matrix.
///
/// The matrix is split into the connected components of its nonzero
/// pattern first, so block-diagonal operators built from identical blocks
/// give bit-identical norms independent of how many blocks are present.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    // union-find over rows (0..rows) and columns (rows..rows+cols)
    let mut parent: Vec<usize> = (0..rows + cols).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for r in 0..rows {
        for c in 0..cols {
            if m[(r, c)] != 0.0 {
                let a = find(&mut parent, r);
                let b = find(&mut parent, rows + c);
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut comps: HashMap<usize, (Vec<usize>, Vec<usize>)> = HashMap::new();
    for r in 0..rows {
        let root = find(&mut parent, r);
        comps.entry(root).or_default().0.push(r);
    }
    for c in 0..cols {
        let root = find(&mut parent, rows + c);
        comps.entry(root).or_default().1.push(c);
    }
    let mut best = 0.0f64;
    for (rs, cs) in comps.values() {
        if rs.is_empty() || cs.is_empty() {
            continue;
        }
        let block = DMatrix::from_fn(rs.len(), cs.len(), |i, j| m[(rs[i], cs[j])]);
        let norm = if block.len() == 1 {
            block[(0, 0)].abs()
        } else {
            block.singular_values().max()
        };
        best = best.max(norm);
    }
    best
}

/// Largest singular value of a matrix-free operator `a: R^n -> R^m`, given
/// `a` and its transpose, by Lanczos iteration on `a^T a` with full
/// reorthogonalization.
pub fn lanczos_norm(
    dim: usize,
    apply: impl Fn(&[f64]) -> Vec<f64>,
    apply_t: impl Fn(&[f64]) -> Vec<f64>,
) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    let max_steps = dim.min(120);
    let gram = |v: &[f64]| apply_t(&apply(v));
    // deterministic, generic start vector
    let mut q: Vec<f64> = (0..dim).map(|i| 1.0 + ((i * 7919) % 104_729) as f64 / 104_729.0).collect();
    let n0 = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|x| *x /= n0);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut last = f64::NAN;
    for step in 0..max_steps {
        let mut w = gram(&basis[step]);
        let alpha = dot(&w, &basis[step]);
        alphas.push(alpha);
        for b in &basis {
            let c = dot(&w, b);
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        // second pass for stability
        for b in &basis {
            let c = dot(&w, b);
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let beta = dot(&w, &w).sqrt();
        let k = alphas.len();
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let top = SymmetricEigen::new(t).eigenvalues.max().max(0.0);
        let converged = (top - last).abs() <= 1e-15 * top.max(1e-300);
        last = top;
        if beta <= 1e-13 * top.sqrt().max(1.0) || converged && step >= 3 {
            break;
        }
        betas.push(beta);
        basis.push(w.into_iter().map(|x| x / beta).collect());
    }
    last.max(0.0).sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm of a column vector, for convenience in tests.
pub fn vector_norm(v: &[f64]) -> f64 {
    DVector::from_column_slice(v).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = Matrix::from_fn(3, 3, |r, c| q((r * 3 + c) as i64, 1));
        assert_eq!(m.rank(), 2);
        assert_eq!(Matrix::<Rational>::identity(4).rank(), 4);
        assert_eq!(Matrix::<Rational>::zeros(2, 5).rank(), 0);
    }

    #[test]
    fn echelon_membership() {
        let mut e = SparseEchelon::<Rational>::new(4);
        assert!(e.insert(SparseRow::new(vec![(0, q(1, 1)), (2, q(2, 1))])));
        assert!(e.insert(SparseRow::new(vec![(1, q(1, 1)), (3, q(-1, 1))])));
        assert!(!e.insert(SparseRow::new(vec![(0, q(2, 1)), (1, q(3, 1)), (2, q(4, 1)), (3, q(-3, 1))])));
        assert!(e.contains(SparseRow::new(vec![(1, q(1, 2)), (3, q(-1, 2))])));
        assert!(!e.contains(SparseRow::new(vec![(3, q(1, 1))])));
    }

    #[test]
    fn sparse_row_merges_duplicates() {
        let r = SparseRow::new(vec![(2, q(1, 1)), (0, q(1, 1)), (2, q(-1, 1))]);
        assert_eq!(r.entries().len(), 1);
        assert_eq!(r.entries()[0].0, 0);
    }

    #[test]
    fn matrix_products() {
        let a = Matrix::from_fn(2, 3, |r, c| q((r + c) as i64, 1));
        let b = a.transpose();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.get(0, 0), &q(5, 1));
        assert_eq!(p.get(1, 1), &q(14, 1));
        assert!(a.mul(&a).is_err());
        let c = p.commutator(&Matrix::identity(2)).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn norms_agree() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, -5.0]);
        let svd = m.singular_values().max();
        assert!((spectral_norm(&m) - svd).abs() < 1e-12);
        let l = lanczos_norm(3, |v| (&m * DVector::from_column_slice(v)).as_slice().to_vec(), |v| {
            (m.transpose() * DVector::from_column_slice(v)).as_slice().to_vec()
        });
        assert!((l - svd).abs() < 1e-10, "{l} vs {svd}");
    }

    #[test]
    fn block_norm_is_window_independent() {
        let block = [0.0, 2.5, -0.75, 0.0];
        let build = |k: usize| {
            let mut m = DMatrix::zeros(2 * k, 2 * k);
            for b in 0..k {
                for i in 0..2 {
                    for j in 0..2 {
                        m[(2 * b + i, 2 * b + j)] = block[2 * i + j];
                    }
                }
            }
            m
        };
        assert_eq!(spectral_norm(&build(1)), spectral_norm(&build(7)));
    }
}
