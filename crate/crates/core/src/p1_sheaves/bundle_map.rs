use crate::fields_poly::{BinaryForm, FieldSpec, Scalar};
use crate::linalg::Matrix;

use super::{h0, subsets, SheafError, SplittingType};

/// A map `O(src_0) + ... -> O(tgt_0) + ...` given as a matrix of forms.
///
/// Entry `(i, j)` is zero or a form of degree `tgt[i] - src[j]`. Summand order
/// is significant: it fixes the rows and columns of the matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BundleMap {
    field: FieldSpec,
    src: Vec<i64>,
    tgt: Vec<i64>,
    entries: Vec<BinaryForm>,
}

/// Start index of each summand's block in `H0(O(a_0)(d)) + H0(O(a_1)(d)) + ...`,
/// plus the total dimension.
pub(crate) fn block_offsets(degrees: &[i64], d: i64) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(degrees.len());
    let mut acc = 0;
    for &a in degrees {
        offsets.push(acc);
        acc += h0(a + d);
    }
    (offsets, acc)
}

/// Splits a section vector of `E(d)` into one form per summand.
pub(crate) fn vector_to_forms(field: FieldSpec, degrees: &[i64], d: i64, v: &[Scalar]) -> Vec<BinaryForm> {
    let (offsets, total) = block_offsets(degrees, d);
    assert_eq!(v.len(), total);
    degrees
        .iter()
        .zip(offsets)
        .map(|(&a, off)| {
            let m = a + d;
            if m < 0 {
                BinaryForm::zero(field)
            } else {
                let m = m as usize;
                BinaryForm::from_coeffs(field, m, v[off..off + m + 1].to_vec()).expect("block of the right length")
            }
        })
        .collect()
}

/// Inverse of [`vector_to_forms`].
pub(crate) fn forms_to_vector(field: FieldSpec, degrees: &[i64], d: i64, forms: &[BinaryForm]) -> Vec<Scalar> {
    let mut out = Vec::new();
    for (&a, f) in degrees.iter().zip(forms) {
        let m = a + d;
        if m >= 0 {
            out.extend(f.coeff_vector(m as usize));
        } else {
            assert!(f.is_zero());
        }
        let _ = field;
    }
    out
}

impl BundleMap {
    pub fn new(field: FieldSpec, src: Vec<i64>, tgt: Vec<i64>, rows: Vec<Vec<BinaryForm>>) -> Result<Self, SheafError> {
        if rows.len() != tgt.len() || rows.iter().any(|r| r.len() != src.len()) {
            return Err(SheafError::Shape(format!(
                "expected a {}x{} matrix of forms",
                tgt.len(),
                src.len()
            )));
        }
        let entries: Vec<BinaryForm> = rows.into_iter().flatten().collect();
        let map = BundleMap { field, src, tgt, entries };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> Result<(), SheafError> {
        for i in 0..self.tgt.len() {
            for j in 0..self.src.len() {
                let f = self.entry(i, j);
                if f.field() != self.field {
                    return Err(SheafError::Field(crate::fields_poly::FieldError::Mismatch));
                }
                let expected = self.tgt[i] - self.src[j];
                if let Some(deg) = f.degree() {
                    if expected < 0 || deg as i64 != expected {
                        return Err(SheafError::EntryDegree { row: i, col: j, expected, got: Some(deg) });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn zero(field: FieldSpec, src: Vec<i64>, tgt: Vec<i64>) -> Self {
        let entries = vec![BinaryForm::zero(field); src.len() * tgt.len()];
        BundleMap { field, src, tgt, entries }
    }

    /// Map `O^n -> E` whose columns are the given sections.
    pub fn from_sections(field: FieldSpec, tgt: Vec<i64>, sections: &[Vec<BinaryForm>]) -> Result<Self, SheafError> {
        let rows = (0..tgt.len()).map(|i| sections.iter().map(|c| c[i].clone()).collect()).collect();
        BundleMap::new(field, vec![0; sections.len()], tgt, rows)
    }

    /// Map whose columns are given with their source twists.
    pub fn from_columns(field: FieldSpec, tgt: Vec<i64>, columns: Vec<(i64, Vec<BinaryForm>)>) -> Result<Self, SheafError> {
        let src: Vec<i64> = columns.iter().map(|(a, _)| *a).collect();
        let rows = (0..tgt.len()).map(|i| columns.iter().map(|(_, c)| c[i].clone()).collect()).collect();
        BundleMap::new(field, src, tgt, rows)
    }

    pub fn identity(field: FieldSpec, degrees: Vec<i64>) -> Self {
        let mut m = BundleMap::zero(field, degrees.clone(), degrees);
        for i in 0..m.src.len() {
            m.entries[i * m.src.len() + i] = BinaryForm::constant(field.one());
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn src_degrees(&self) -> &[i64] {
        &self.src
    }

    pub fn tgt_degrees(&self) -> &[i64] {
        &self.tgt
    }

    pub fn source_type(&self) -> SplittingType {
        SplittingType::new(self.src.clone())
    }

    pub fn target_type(&self) -> SplittingType {
        SplittingType::new(self.tgt.clone())
    }

    pub fn nrows(&self) -> usize {
        self.tgt.len()
    }

    pub fn ncols(&self) -> usize {
        self.src.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BinaryForm {
        &self.entries[i * self.src.len() + j]
    }

    pub fn column(&self, j: usize) -> Vec<BinaryForm> {
        (0..self.tgt.len()).map(|i| self.entry(i, j).clone()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<BinaryForm>> {
        (0..self.tgt.len()).map(|i| (0..self.src.len()).map(|j| self.entry(i, j).clone()).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(BinaryForm::is_zero)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &BundleMap) -> Result<BundleMap, SheafError> {
        if inner.tgt != self.src {
            return Err(SheafError::Shape("inner target differs from outer source".into()));
        }
        let mut out = BundleMap::zero(self.field, inner.src.clone(), self.tgt.clone());
        for i in 0..self.tgt.len() {
            for j in 0..inner.src.len() {
                let mut acc = BinaryForm::zero(self.field);
                for k in 0..self.src.len() {
                    let a = self.entry(i, k);
                    let b = inner.entry(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b)?)?;
                    }
                }
                out.entries[i * inner.src.len() + j] = acc;
            }
        }
        Ok(out)
    }

    /// The transpose map between dual bundles.
    pub fn dual(&self) -> BundleMap {
        let src: Vec<i64> = self.tgt.iter().map(|a| -a).collect();
        let tgt: Vec<i64> = self.src.iter().map(|a| -a).collect();
        let mut out = BundleMap::zero(self.field, src, tgt);
        for i in 0..self.tgt.len() {
            for j in 0..self.src.len() {
                out.entries[j * self.tgt.len() + i] = self.entry(i, j).clone();
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> BundleMap {
        let src = cols.iter().map(|&j| self.src[j]).collect();
        let rows = (0..self.tgt.len()).map(|i| cols.iter().map(|&j| self.entry(i, j).clone()).collect()).collect();
        BundleMap::new(self.field, src, self.tgt.clone(), rows).expect("sub-matrix of a valid map")
    }

    pub fn select_rows(&self, rows: &[usize]) -> BundleMap {
        let tgt = rows.iter().map(|&i| self.tgt[i]).collect();
        let rs = rows.iter().map(|&i| (0..self.src.len()).map(|j| self.entry(i, j).clone()).collect()).collect();
        BundleMap::new(self.field, self.src.clone(), tgt, rs).expect("sub-matrix of a valid map")
    }

    /// Restriction of a map out of a trivial bundle to `W ⊗ O`, where `W` is
    /// given by coordinate rows in the source.
    pub fn restrict_trivial(&self, w_basis: &[Vec<Scalar>]) -> BundleMap {
        assert!(self.src.iter().all(|&a| a == 0), "restriction needs a trivial source");
        let columns = w_basis
            .iter()
            .map(|w| {
                let col = (0..self.tgt.len())
                    .map(|i| {
                        w.iter().enumerate().fold(BinaryForm::zero(self.field), |acc, (j, c)| {
                            if c.is_zero() {
                                acc
                            } else {
                                acc.add(&self.entry(i, j).scale(c)).expect("homogeneous row")
                            }
                        })
                    })
                    .collect();
                (0, col)
            })
            .collect();
        BundleMap::from_columns(self.field, self.tgt.clone(), columns).expect("combination of valid columns")
    }

    /// The linear map `H0(src(d)) -> H0(tgt(d))` on monomial bases.
    pub fn graded_piece(&self, d: i64) -> Matrix {
        let (col_off, ncols) = block_offsets(&self.src, d);
        let (row_off, nrows) = block_offsets(&self.tgt, d);
        let mut m = Matrix::zeros(self.field, nrows, ncols);
        for i in 0..self.tgt.len() {
            for j in 0..self.src.len() {
                let f = self.entry(i, j);
                if f.is_zero() {
                    continue;
                }
                for k in 0..h0(self.src[j] + d) {
                    for (l, c) in f.coeffs().iter().enumerate() {
                        if !c.is_zero() {
                            m.set(row_off[i] + k + l, col_off[j] + k, c.clone());
                        }
                    }
                }
            }
        }
        m
    }

    /// [`Self::graded_piece`] as residue rows, for prime fields only.
    pub(crate) fn graded_piece_residues(&self, d: i64) -> (Vec<Vec<u32>>, usize) {
        let (col_off, ncols) = block_offsets(&self.src, d);
        let (row_off, nrows) = block_offsets(&self.tgt, d);
        let mut rows = vec![vec![0u32; ncols]; nrows];
        for i in 0..self.tgt.len() {
            for j in 0..self.src.len() {
                let f = self.entry(i, j);
                if f.is_zero() {
                    continue;
                }
                for k in 0..h0(self.src[j] + d) {
                    for (l, c) in f.coeffs().iter().enumerate() {
                        let v = c.residue().expect("prime field entry");
                        if v != 0 {
                            rows[row_off[i] + k + l][col_off[j] + k] = v;
                        }
                    }
                }
            }
        }
        (rows, ncols)
    }

    /// Scalar matrix obtained by evaluating every entry at `(s : t)`.
    pub fn eval(&self, s: &Scalar, t: &Scalar) -> Matrix {
        let rows = (0..self.tgt.len())
            .map(|i| (0..self.src.len()).map(|j| self.entry(i, j).eval(s, t)).collect())
            .collect();
        Matrix::from_rows(self.field, self.src.len(), rows)
    }

    /// Determinant of the square submatrix on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> BinaryForm {
        assert_eq!(rows.len(), cols.len());
        if rows.is_empty() {
            return BinaryForm::constant(self.field.one());
        }
        let (r0, rest_rows) = (rows[0], &rows[1..]);
        let mut acc = BinaryForm::zero(self.field);
        for (pos, &c) in cols.iter().enumerate() {
            let a = self.entry(r0, c);
            if a.is_zero() {
                continue;
            }
            let rest_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let sub = self.minor(rest_rows, &rest_cols);
            if sub.is_zero() {
                continue;
            }
            let term = a.mul(&sub).expect("same field");
            let term = if pos % 2 == 0 { term } else { term.negate() };
            acc = acc.add(&term).expect("minor terms share a degree");
        }
        acc
    }

    /// All minors of size `min(rows, cols)`.
    pub fn maximal_minors(&self) -> Vec<BinaryForm> {
        let (r, c) = (self.nrows(), self.ncols());
        if r <= c {
            let rows: Vec<usize> = (0..r).collect();
            subsets(c, r).iter().map(|cols| self.minor(&rows, cols)).collect()
        } else {
            let cols: Vec<usize> = (0..c).collect();
            subsets(r, c).iter().map(|rows| self.minor(rows, &cols)).collect()
        }
    }

    /// Monic gcd of the maximal minors, `None` when they all vanish.
    ///
    /// For an injective map this is constant exactly when the image is a
    /// subbundle; for a map onto a bundle, exactly when it is surjective.
    pub fn maximal_minors_gcd(&self) -> Option<BinaryForm> {
        BinaryForm::gcd(&self.maximal_minors()).ok()
    }

    /// Some `alpha` with `alpha ∘ q = f`, if one exists.
    ///
    /// `q` and `f` must share a source; the unknown entries of `alpha` are
    /// solved for as a single linear system in their coefficients.
    pub fn factor_through(q: &BundleMap, f: &BundleMap) -> Result<Option<BundleMap>, SheafError> {
        if q.src != f.src || q.field != f.field {
            return Err(SheafError::Shape("factorization needs a common source".into()));
        }
        let field = q.field;
        let (mid, tgt, src) = (&q.tgt, &f.tgt, &q.src);
        // unknown (i, k): coefficients of alpha[i][k], a form of degree tgt[i] - mid[k]
        let mut unknown_off = vec![vec![0usize; mid.len()]; tgt.len()];
        let mut n_unknowns = 0;
        for i in 0..tgt.len() {
            for k in 0..mid.len() {
                unknown_off[i][k] = n_unknowns;
                n_unknowns += h0(tgt[i] - mid[k]);
            }
        }
        // equation (i, j, l): coefficient l of (alpha ∘ q)[i][j], degree tgt[i] - src[j]
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        let mut rhs: Vec<Scalar> = Vec::new();
        for i in 0..tgt.len() {
            for j in 0..src.len() {
                let deg = tgt[i] - src[j];
                if deg < 0 {
                    if !f.entry(i, j).is_zero() {
                        return Ok(None);
                    }
                    continue;
                }
                let target = f.entry(i, j).coeff_vector(deg as usize);
                for (l, value) in target.into_iter().enumerate() {
                    let mut row = vec![field.zero(); n_unknowns];
                    for k in 0..mid.len() {
                        let qk = q.entry(k, j);
                        let ad = tgt[i] - mid[k];
                        if qk.is_zero() || ad < 0 {
                            continue;
                        }
                        for (m, c) in qk.coeffs().iter().enumerate() {
                            if l >= m && l - m <= ad as usize && !c.is_zero() {
                                let u = unknown_off[i][k] + (l - m);
                                row[u] = row[u].add_ref(c);
                            }
                        }
                    }
                    rows.push(row);
                    rhs.push(value);
                }
            }
        }
        let solution = if n_unknowns == 0 {
            if rhs.iter().all(Scalar::is_zero) {
                Some(Vec::new())
            } else {
                None
            }
        } else if rows.is_empty() {
            Some(vec![field.zero(); n_unknowns])
        } else {
            Matrix::from_rows(field, n_unknowns, rows).solve(&rhs)
        };
        let Some(x) = solution else {
            return Ok(None);
        };
        let mut alpha = BundleMap::zero(field, mid.clone(), tgt.clone());
        for i in 0..tgt.len() {
            for k in 0..mid.len() {
                let ad = tgt[i] - mid[k];
                if ad < 0 {
                    continue;
                }
                let off = unknown_off[i][k];
                let coeffs = x[off..off + ad as usize + 1].to_vec();
                alpha.entries[i * mid.len() + k] = BinaryForm::from_coeffs(field, ad as usize, coeffs)?;
            }
        }
        debug_assert_eq!(&alpha.compose(q)?, f);
        Ok(Some(alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn f(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64s(Q, c)
    }

    fn st_map() -> BundleMap {
        BundleMap::new(Q, vec![0, 0], vec![1], vec![vec![f(&[1, 0]), f(&[0, 1])]]).unwrap()
    }

    #[test]
    fn rejects_wrong_entry_degree() {
        let e = BundleMap::new(Q, vec![0], vec![2], vec![vec![f(&[1, 0])]]).unwrap_err();
        assert!(matches!(e, SheafError::EntryDegree { expected: 2, .. }));
        // a nonzero entry where the degree would be negative
        assert!(BundleMap::new(Q, vec![1], vec![0], vec![vec![f(&[1])]]).is_err());
        assert!(BundleMap::new(Q, vec![1], vec![0], vec![vec![BinaryForm::zero(Q)]]).is_ok());
    }

    #[test]
    fn graded_piece_of_coordinates() {
        let m = st_map();
        let g = m.graded_piece(0);
        assert_eq!((g.nrows(), g.ncols()), (2, 2));
        assert_eq!(g.rank(), 2);
        let g1 = m.graded_piece(1);
        assert_eq!((g1.nrows(), g1.ncols()), (3, 4));
        assert_eq!(g1.rank(), 3);
        assert_eq!(BundleMap::zero(Q, vec![0, 0], vec![1]).graded_piece(3).rank(), 0);
    }

    #[test]
    fn compose_and_dual() {
        let m = st_map();
        let syz = BundleMap::new(Q, vec![-1], vec![0, 0], vec![vec![f(&[0, 1])], vec![f(&[-1, 0])]]).unwrap();
        assert!(m.compose(&syz).unwrap().is_zero());
        let d = m.dual();
        assert_eq!(d.src_degrees(), &[-1]);
        assert_eq!(d.tgt_degrees(), &[0, 0]);
        assert_eq!(d.dual(), m);
    }

    #[test]
    fn minors_and_gcd() {
        let m = BundleMap::new(Q, vec![0, 0], vec![2], vec![vec![f(&[1, 0, 0]), f(&[0, 1, 0])]]).unwrap();
        assert_eq!(m.maximal_minors_gcd().unwrap(), f(&[1, 0]));
        let diag = BundleMap::new(
            Q,
            vec![0, 0],
            vec![1, 1],
            vec![vec![f(&[1, 0]), BinaryForm::zero(Q)], vec![BinaryForm::zero(Q), f(&[0, 1])]],
        )
        .unwrap();
        assert_eq!(diag.minor(&[0, 1], &[0, 1]), f(&[0, 1, 0]));
    }

    #[test]
    fn factor_through_recovers_known_factor() {
        // f = alpha ∘ q with q = (s, t): O^2 -> O(1) and alpha = s + 2t: O(1) -> O(2)
        let q = st_map();
        let alpha = BundleMap::new(Q, vec![1], vec![2], vec![vec![f(&[1, 2])]]).unwrap();
        let fmap = alpha.compose(&q).unwrap();
        assert_eq!(BundleMap::factor_through(&q, &fmap).unwrap().unwrap(), alpha);
        // (s^2, s^2) does not factor through (s, t)
        let bad = BundleMap::new(Q, vec![0, 0], vec![2], vec![vec![f(&[1, 0, 0]), f(&[1, 0, 0])]]).unwrap();
        assert!(BundleMap::factor_through(&q, &bad).unwrap().is_none());
    }
}
