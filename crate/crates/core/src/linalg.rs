//! Dense matrices over a coefficient ring, with exact elimination for scalars.

use std::fmt;

use crate::scalar::Scalar;
use crate::series::Coeff;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E> Matrix<E> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Zero-based access.
    pub fn at(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut E {
        &mut self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &E)> {
        let c = self.cols;
        self.data.iter().enumerate().map(move |(k, e)| (k / c, k % c, e))
    }
}

impl<E: Coeff> Matrix<E> {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, zero: E) -> Self {
        Matrix { rows, cols, data: vec![zero; rows * cols] }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&o.data) {
            a.add_assign_ref(b);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-<E::F as num_traits::One>::one()))
    }

    pub fn scale(&self, c: &E::F) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|e| e.scale(c)).collect() }
    }

    /// Product in the written order; `zero` seeds each entry.
    pub fn mul_with(&self, o: &Self, zero: &E) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out = Self::filled(self.rows, o.cols, zero.clone());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.at(k, j);
                    if !b.is_zero() {
                        out.at_mut(i, j).add_assign_ref(&a.mul_ref(b));
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn map<G: Coeff>(&self, f: impl Fn(&E) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<C: Scalar> Matrix<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, C::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { C::one() } else { C::zero() })
    }

    /// Matrix unit `E_{ij}` with one-based indices.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.data[(i - 1) * n + (j - 1)] = C::one();
        m
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn to_rows(&self) -> Vec<Vec<C>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.at(i, j).clone()).collect()).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.at(i, j).clone()
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        *self.at_mut(i, j) = v;
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_with(o, &C::zero())
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn trace(&self) -> C {
        (0..self.rows.min(self.cols)).fold(C::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).fold(C::zero(), |acc, j| acc + self.get(i, j) * v[j].clone()))
            .collect()
    }

    /// Kronecker product `self ⊗ o`.
    pub fn kron(&self, o: &Self) -> Self {
        Matrix::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            self.get(i / o.rows, j / o.cols) * o.get(i % o.rows, j % o.cols)
        })
    }

    /// Nonzero entries as zero-based `(row, col, value)` triplets.
    pub fn triplets(&self) -> Vec<(usize, usize, C)> {
        self.entries().filter(|(_, _, v)| !v.is_zero()).map(|(i, j, v)| (i, j, v.clone())).collect()
    }

    /// Entries flattened row-major, for use as a coordinate vector.
    pub fn flatten(&self) -> Vec<C> {
        self.data.clone()
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(k) = (r..self.rows).find(|&k| !self.at(k, c).is_zero()) else { continue };
            if k != r {
                for j in 0..self.cols {
                    self.data.swap(k * self.cols + j, r * self.cols + j);
                }
            }
            let inv = C::one() / self.get(r, c);
            for j in c..self.cols {
                let v = self.get(r, j) * inv.clone();
                self.set(r, j, v);
            }
            for k in 0..self.rows {
                if k == r {
                    continue;
                }
                let f = self.get(k, c);
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let v = self.get(k, j) - f.clone() * self.get(r, j);
                    self.set(k, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{x : self x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<C>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![C::zero(); self.cols];
                x[f] = C::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    x[pc] = -m.get(r, f);
                }
                x
            })
            .collect()
    }

    /// Some solution of `self x = b`, if one exists.
    pub fn solve(&self, b: &[C]) -> Option<Vec<C>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                b[i].clone()
            }
        });
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![C::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(r, self.cols);
        }
        Some(x)
    }
}

/// Rank of a family of coordinate vectors.
pub fn rank_of<C: Scalar>(vectors: &[Vec<C>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors.to_vec()).rank()
}

impl<E: Coeff> Coeff for Matrix<E> {
    type F = E::F;
    fn is_zero(&self) -> bool {
        Matrix::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add(other);
    }
    fn mul_ref(&self, other: &Self) -> Self {
        // entries of a zero product: reuse a zero-scaled entry as the seed
        let zero = self.data.first().or(other.data.first()).expect("nonempty matrix").scale(&num_traits::Zero::zero());
        self.mul_with(other, &zero)
    }
    fn scale(&self, c: &E::F) -> Self {
        Matrix::scale(self, c)
    }
}

impl<C: Scalar> fmt::Display for Matrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).render()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational as Q;

    fn m(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Q::int(x)).collect()).collect())
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(a.apply(&k[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = m(&[&[1, 1], &[1, -1]]);
        assert_eq!(a.solve(&[Q::int(3), Q::int(1)]), Some(vec![Q::int(2), Q::int(1)]));
        let b = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(b.solve(&[Q::int(1), Q::int(3)]), None);
    }

    #[test]
    fn kron_mixed_product() {
        let a = m(&[&[1, 2], &[0, 1]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        let c = m(&[&[3, 0], &[1, 1]]);
        let d = m(&[&[1, 1], &[0, 2]]);
        assert_eq!(a.kron(&b).mul(&c.kron(&d)), a.mul(&c).kron(&b.mul(&d)));
    }
}
