//! Dense matrices and subspaces over an exact field.

use crate::field::Field;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
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

    pub fn set(&mut self, r: usize, c: usize, value: F) {
        self.data[r * self.cols + c] = value;
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// `self * rhs`; `None` on shape mismatch.
    pub fn mul(&self, rhs: &Matrix<F>) -> Option<Matrix<F>> {
        if self.cols != rhs.rows {
            return None;
        }
        let mut out: Matrix<F> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Some(out)
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc + a.clone() * b.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &F) -> Matrix<F> {
        let data = self.data.iter().map(|a| a.clone() * s.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Matrix<F> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> F {
        let mut acc = F::zero();
        for i in 0..self.rows.min(self.cols) {
            acc = acc + self.get(i, i).clone();
        }
        acc
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = F::one() / m.get(r, c).clone();
            for j in c..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let pv = m.get(r, j);
                    if pv.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).clone() - factor.clone() * pv.clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one vector per free column, in reduced form.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(i, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `self * x = b`, returning one solution if any.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    /// Matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<F>]) -> Matrix<F> {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }
}

/// A subspace of `F^ambient` stored by its reduced echelon basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![F::zero(); ambient];
                v[i] = F::one();
                v
            })
            .collect();
        Subspace { ambient, basis, pivots: (0..ambient).collect() }
    }

    pub fn span<I: IntoIterator<Item = Vec<F>>>(ambient: usize, vectors: I) -> Self {
        let vectors: Vec<Vec<F>> = vectors.into_iter().collect();
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let mut data = Vec::with_capacity(vectors.len() * ambient);
        for v in &vectors {
            assert_eq!(v.len(), ambient, "vector length");
            data.extend(v.iter().cloned());
        }
        let m = Matrix::from_rows(vectors.len(), ambient, data);
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient, basis, pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    /// Remainder of `v` after elimination by the echelon basis; linear in `v`
    /// and zero exactly on the subspace.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.ambient);
        let mut out = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let c = out[p].clone();
            for (o, x) in out.iter_mut().zip(row) {
                if !x.is_zero() {
                    *o = o.clone() - c.clone() * x.clone();
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    pub fn sum(&self, other: &Subspace<F>) -> Subspace<F> {
        assert_eq!(self.ambient, other.ambient);
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        Subspace::span(self.ambient, self.basis.iter().chain(&other.basis).cloned())
    }

    pub fn is_subspace_of(&self, other: &Subspace<F>) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rational};
    use num_traits::Zero;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn qm(rows: usize, cols: usize, xs: &[i64]) -> Matrix<Rational> {
        Matrix::from_rows(rows, cols, xs.iter().map(|&x| q(x)).collect())
    }

    #[test]
    fn rank_and_kernel() {
        let m = qm(2, 3, &[1, 2, 3, 2, 4, 6]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.apply(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = qm(2, 2, &[1, 1, 0, 2]);
        let x = m.solve(&[q(3), q(4)]).unwrap();
        assert_eq!(x, vec![q(1), q(2)]);
        let singular = qm(2, 2, &[1, 1, 1, 1]);
        assert!(singular.solve(&[q(1), q(2)]).is_none());
    }

    #[test]
    fn subspace_equality_is_basis_independent() {
        let a = Subspace::span(3, vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]]);
        let b = Subspace::span(3, vec![vec![q(1), q(2), q(1)], vec![q(1), q(0), q(-1)]]);
        assert_eq!(a, b);
        assert!(a.contains(&[q(2), q(3), q(1)]));
        assert!(!a.contains(&[q(1), q(0), q(0)]));
    }

    #[test]
    fn prime_field_rank_differs_from_rational() {
        let m: Matrix<Fp<2>> = Matrix::from_rows(2, 2, vec![Fp::new(1), Fp::new(1), Fp::new(1), Fp::new(1)]);
        assert_eq!(m.rank(), 1);
        let m2: Matrix<Fp<3>> = Matrix::from_rows(2, 2, vec![Fp::new(1), Fp::new(1), Fp::new(1), Fp::new(2)]);
        assert_eq!(m2.rank(), 2);
    }

    #[test]
    fn product_shape_mismatch_is_none() {
        assert!(qm(2, 3, &[0; 6]).mul(&qm(2, 3, &[0; 6])).is_none());
    }
}
