//! Dense matrices over a [`FieldSpec`], with reduced row echelon forms,
//! kernels, and linear solves. Prime fields take a `u32` fast path.

use std::cmp::Ordering;

use crate::fields_poly::{FieldSpec, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Reduced row echelon form with its pivot columns; zero rows are dropped.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows of equal length `cols`.
    pub fn from_rows(field: FieldSpec, cols: usize, rows: Vec<Vec<Scalar>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Matrix { field, rows: n, cols, data }
    }

    pub fn from_i64s(field: FieldSpec, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rs = rows.iter().map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect();
        Self::from_rows(field, cols, rs)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).add_ref(&a.mul_ref(b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(self.field.zero(), |acc, (a, b)| acc.add_ref(&a.mul_ref(b)))
            })
            .collect()
    }

    pub fn rref(&self) -> Rref {
        match self.field {
            FieldSpec::Prime(p) => {
                let mut rows: Vec<Vec<u32>> =
                    (0..self.rows).map(|i| self.row(i).iter().map(|x| x.residue().unwrap()).collect()).collect();
                let pivots = rref_mod_p(&mut rows, self.cols, p);
                let rows = rows
                    .into_iter()
                    .take(pivots.len())
                    .map(|r| r.into_iter().map(|value| Scalar::Residue { value, modulus: p }).collect())
                    .collect();
                Rref { rows, pivots }
            }
            FieldSpec::Rationals => {
                let mut rows = self.to_rows();
                let pivots = rref_generic(&mut rows, self.cols);
                rows.truncate(pivots.len());
                Rref { rows, pivots }
            }
        }
    }

    pub fn rank(&self) -> usize {
        match self.field {
            FieldSpec::Prime(p) => {
                let mut rows: Vec<Vec<u32>> =
                    (0..self.rows).map(|i| self.row(i).iter().map(|x| x.residue().unwrap()).collect()).collect();
                rank_mod_p(&mut rows, self.cols, p)
            }
            FieldSpec::Rationals => self.rref().pivots.len(),
        }
    }

    /// Basis of the right null space `{x : A x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let rr = self.rref();
        null_space_from_rref(self.field, &rr, self.cols)
    }

    /// Some `x` with `A x = b`, if one exists.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let aug: Vec<Vec<Scalar>> =
            (0..self.rows).map(|i| self.row(i).iter().cloned().chain([b[i].clone()]).collect()).collect();
        let rr = Matrix::from_rows(self.field, self.cols + 1, aug).rref();
        if rr.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (row, &pc) in rr.rows.iter().zip(&rr.pivots) {
            x[pc] = row[self.cols].clone();
        }
        Some(x)
    }
}

fn null_space_from_rref(field: FieldSpec, rr: &Rref, cols: usize) -> Vec<Vec<Scalar>> {
    let mut is_pivot = vec![false; cols];
    for &p in &rr.pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![field.zero(); cols];
            v[f] = field.one();
            for (row, &pc) in rr.rows.iter().zip(&rr.pivots) {
                v[pc] = row[f].neg_ref();
            }
            v
        })
        .collect()
}

fn rref_generic(rows: &mut [Vec<Scalar>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(k) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, k);
        let inv = rows[r][c].inverse().unwrap();
        for x in rows[r].iter_mut() {
            *x = x.mul_ref(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !y.is_zero() {
                    *x = x.sub_ref(&f.mul_ref(y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    // Fermat; p is prime and below 2^16 so products fit in u64.
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// In-place RREF over GF(p); nonzero rows end up first. Returns pivot columns.
pub(crate) fn rref_mod_p(rows: &mut [Vec<u32>], cols: usize, p: u32) -> Vec<usize> {
    let pm = p as u64;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else {
            continue;
        };
        rows.swap(r, k);
        let inv = inv_mod(rows[r][c], p) as u64;
        for x in rows[r].iter_mut().skip(c) {
            *x = (*x as u64 * inv % pm) as u32;
        }
        let (head, tail) = rows.split_at_mut(r);
        let (pivot_row, tail) = tail.split_first_mut().unwrap();
        for row in head.iter_mut().chain(tail.iter_mut()) {
            let f = row[c] as u64;
            if f == 0 {
                continue;
            }
            let nf = pm - f;
            for (x, &y) in row.iter_mut().zip(pivot_row.iter()).skip(c) {
                if y != 0 {
                    *x = ((*x as u64 + nf * y as u64) % pm) as u32;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank over GF(p) by forward elimination only.
pub(crate) fn rank_mod_p(rows: &mut [Vec<u32>], cols: usize, p: u32) -> usize {
    let pm = p as u64;
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else {
            continue;
        };
        rows.swap(r, k);
        let inv = inv_mod(rows[r][c], p) as u64;
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            let f = row[c] as u64 * inv % pm;
            if f == 0 {
                continue;
            }
            let nf = pm - f;
            for (x, &y) in row.iter_mut().zip(pivot_row.iter()).skip(c) {
                if y != 0 {
                    *x = ((*x as u64 + nf * y as u64) % pm) as u32;
                }
            }
        }
        r += 1;
    }
    r
}

/// A linear subspace of `F^ambient`, stored by its RREF basis so that equal
/// subspaces have identical representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: FieldSpec,
    ambient: usize,
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(field: FieldSpec, ambient: usize, vectors: Vec<Vec<Scalar>>) -> Self {
        let rr = Matrix::from_rows(field, ambient, vectors).rref();
        Subspace { field, ambient, basis: rr.rows, pivots: rr.pivots }
    }

    pub fn whole(field: FieldSpec, ambient: usize) -> Self {
        Self::span(field, ambient, Matrix::identity(field, ambient).to_rows())
    }

    /// Wraps rows already known to be in RREF with the given pivots.
    pub(crate) fn from_rref_unchecked(field: FieldSpec, ambient: usize, basis: Vec<Vec<Scalar>>, pivots: Vec<usize>) -> Self {
        Subspace { field, ambient, basis, pivots }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let coords: Vec<Scalar> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut recon = vec![self.field.zero(); self.ambient];
        for (c, row) in coords.iter().zip(&self.basis) {
            for (x, y) in recon.iter_mut().zip(row) {
                *x = x.add_ref(&c.mul_ref(y));
            }
        }
        (recon == v).then_some(coords)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        // x A = y B  <=>  (x, -y) in the left kernel of [A; B]
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        let stacked = Matrix::from_rows(self.field, self.ambient, rows).transpose();
        let vectors = stacked
            .kernel()
            .into_iter()
            .map(|k| {
                let mut v = vec![self.field.zero(); self.ambient];
                for (c, row) in k.iter().zip(&self.basis) {
                    for (x, y) in v.iter_mut().zip(row) {
                        *x = x.add_ref(&c.mul_ref(y));
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.field, self.ambient, vectors)
    }

    /// Total order: by dimension, then entrywise on the echelon basis.
    pub fn canonical_cmp(&self, other: &Subspace) -> Ordering {
        self.dim().cmp(&other.dim()).then_with(|| {
            for (a, b) in self.basis.iter().flatten().zip(other.basis.iter().flatten()) {
                let o = a.canonical_cmp(b);
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel_over_rationals() {
        let q = FieldSpec::Rationals;
        let m = Matrix::from_i64s(q, &[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).iter().all(Scalar::is_zero));
    }

    #[test]
    fn prime_fast_path_agrees() {
        let f = FieldSpec::prime(3).unwrap();
        let m = Matrix::from_i64s(f, &[&[1, 1, 0], &[1, 2, 0], &[2, 0, 0]]);
        // rows 1 and 2 sum to (2, 0, 0) mod 3
        assert_eq!(m.rank(), 2);
        assert_eq!(m.rref().pivots, vec![0, 1]);
    }

    #[test]
    fn solve_consistent_and_not() {
        let q = FieldSpec::Rationals;
        let m = Matrix::from_i64s(q, &[&[1, 1], &[1, -1]]);
        let x = m.solve(&[q.from_i64(3), q.from_i64(1)]).unwrap();
        assert_eq!(x, vec![q.from_i64(2), q.from_i64(1)]);
        let s = Matrix::from_i64s(q, &[&[1, 1], &[2, 2]]);
        assert!(s.solve(&[q.from_i64(1), q.from_i64(1)]).is_none());
    }

    #[test]
    fn subspace_canonical_and_intersection() {
        let q = FieldSpec::Rationals;
        let v = |a: &[i64]| a.iter().map(|&x| q.from_i64(x)).collect::<Vec<_>>();
        let a = Subspace::span(q, 3, vec![v(&[1, 1, 0]), v(&[0, 1, 0])]);
        let b = Subspace::span(q, 3, vec![v(&[1, 0, 0]), v(&[2, 5, 0])]);
        assert_eq!(a, b);
        let c = Subspace::span(q, 3, vec![v(&[0, 1, 1]), v(&[0, 0, 1])]);
        let i = a.intersect(&c);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&v(&[0, 3, 0])));
        assert_eq!(a.coordinates(&v(&[2, 3, 0])), Some(v(&[2, 3])));
    }
}
