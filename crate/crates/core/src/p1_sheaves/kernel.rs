//! Kernels of maps between split bundles, read off from graded pieces.

use serde::Serialize;

use crate::fields_poly::{BinaryForm, FieldSpec, Scalar, UniPoly};
use crate::linalg::{rank_mod_p, Subspace};

use super::bundle_map::{forms_to_vector, vector_to_forms};
use super::{BundleMap, SheafError, SplittingType};

/// Kernel section counts `h(d) = h0(K(d))` for `d = start, start + 1, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H0Profile {
    pub start: i64,
    pub values: Vec<usize>,
}

impl H0Profile {
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    /// Measured value, extended by zero below and linearly above the range.
    pub fn h(&self, d: i64) -> usize {
        if d < self.start {
            return 0;
        }
        let last = self.end();
        if d <= last {
            return self.values[(d - self.start) as usize];
        }
        self.values[self.values.len() - 1] + (d - last) as usize * self.eventual_rank()
    }

    fn delta(&self, d: i64) -> usize {
        self.h(d) - self.h(d - 1)
    }

    pub fn eventual_rank(&self) -> usize {
        let n = self.values.len();
        if n < 2 {
            return 0;
        }
        self.values[n - 1] - self.values[n - 2]
    }

    /// Nondecreasing with nonnegative second differences.
    pub fn is_consistent(&self) -> bool {
        let mut prev = 0usize;
        for d in self.start..=self.end() {
            let (h, hp) = (self.h(d), self.h(d - 1));
            if h < hp {
                return false;
            }
            let delta = h - hp;
            if delta < prev {
                return false;
            }
            prev = delta;
        }
        true
    }

    /// Splitting type whose twisted section counts are these values.
    pub fn splitting_type(&self) -> SplittingType {
        let mut degrees = Vec::new();
        for d in (self.start + 1)..=self.end() {
            let new = self.delta(d) - self.delta(d - 1);
            degrees.extend(std::iter::repeat(-d).take(new));
        }
        SplittingType::new(degrees)
    }
}

/// Range of twists over which the kernel profile is measured.
///
/// Every kernel summand `O(c)` satisfies `lo + 1 <= -c <= hi - 1`, so `h(lo) = 0`
/// and the first differences are constant from `hi - 1` on.
fn twist_range(map: &BundleMap) -> Option<(i64, i64)> {
    let src = map.src_degrees();
    let max_src = *src.iter().max()?;
    let deg_src: i64 = src.iter().sum();
    let tgt_room: i64 = map.tgt_degrees().iter().map(|&a| a.max(0)).sum();
    let others = ((src.len() as i64 - 1) * max_src).max(0);
    let c_min = deg_src - tgt_room - others;
    let lo = -max_src - 1;
    let hi = (-c_min + 1).max(lo + 1);
    Some((lo, hi))
}

fn kernel_dim_at(map: &BundleMap, d: i64) -> usize {
    match map.field() {
        FieldSpec::Prime(p) => {
            let (mut rows, cols) = map.graded_piece_residues(d);
            cols - rank_mod_p(&mut rows, cols, p)
        }
        FieldSpec::Rationals => {
            let g = map.graded_piece(d);
            g.ncols() - g.rank()
        }
    }
}

/// Measured kernel profile; ranks only, no kernel vectors.
pub fn h0_profile(map: &BundleMap) -> H0Profile {
    let Some((lo, hi)) = twist_range(map) else {
        return H0Profile { start: 0, values: vec![0, 0] };
    };
    let values = (lo..=hi).map(|d| kernel_dim_at(map, d)).collect();
    H0Profile { start: lo, values }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankMethod {
    Sampled,
    ExactElimination,
}

/// Generic rank together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericRank {
    pub rank: usize,
    pub sampled_rank: usize,
    pub points: usize,
    /// Upper bound on the degree of any minor.
    pub minor_degree_bound: i64,
    /// More distinct points than `minor_degree_bound`, so sampling cannot miss.
    pub deterministic: bool,
    pub method: RankMethod,
}

fn minor_degree_bound(map: &BundleMap) -> i64 {
    let mut tgt = map.tgt_degrees().to_vec();
    let mut src = map.src_degrees().to_vec();
    tgt.sort_unstable_by(|a, b| b.cmp(a));
    src.sort_unstable();
    let mut best = 0;
    let mut acc = 0;
    for (a, b) in tgt.iter().zip(&src) {
        acc += a - b;
        best = best.max(acc);
    }
    best
}

/// Distinct points of the projective line: `(0:1)`, then `(1:c)` for small `c`.
fn sample_points(field: FieldSpec, wanted: usize) -> Vec<(Scalar, Scalar)> {
    let mut pts = vec![(field.zero(), field.one())];
    match field {
        FieldSpec::Prime(p) => {
            for c in 0..p as i64 {
                if pts.len() >= wanted {
                    break;
                }
                pts.push((field.one(), field.from_i64(c)));
            }
        }
        FieldSpec::Rationals => {
            let mut c = 0i64;
            while pts.len() < wanted {
                pts.push((field.one(), field.from_i64(c)));
                c = if c > 0 { -c } else { -c + 1 };
            }
        }
    }
    pts
}

/// Rank over the function field by cross-multiplied elimination on the
/// dehomogenized matrix.
fn exact_rank(map: &BundleMap) -> usize {
    let mut rows: Vec<Vec<UniPoly>> = (0..map.nrows())
        .map(|i| (0..map.ncols()).map(|j| map.entry(i, j).dehomogenize()).collect())
        .collect();
    let cols = map.ncols();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(k) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, k);
        let pivot = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x = x.mul(&pivot[c]).sub(&y.mul(&factor));
            }
            let g = row.iter().fold(UniPoly::zero(map.field()), |g, x| g.gcd(x));
            if !g.is_zero() && g.degree() != Some(0) {
                for x in row.iter_mut() {
                    *x = exact_quotient(x, &g);
                }
            }
        }
        r += 1;
    }
    r
}

fn exact_quotient(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let field = a.field();
    let Some(db) = b.degree() else { unreachable!() };
    let Some(da) = a.degree() else { return a.clone() };
    let inv = b.leading().unwrap().inverse().unwrap();
    let mut rem = a.coeffs().to_vec();
    let mut q = vec![field.zero(); da - db + 1];
    for i in (0..=da - db).rev() {
        let c = rem[i + db].mul_ref(&inv);
        for (k, bk) in b.coeffs().iter().enumerate() {
            rem[i + k] = rem[i + k].sub_ref(&c.mul_ref(bk));
        }
        q[i] = c;
    }
    UniPoly::from_coeffs(field, q)
}

fn certify(map: &BundleMap, profile: &H0Profile) -> Result<GenericRank, SheafError> {
    let profile_rank = map.ncols() - profile.eventual_rank();
    let bound = minor_degree_bound(map);
    let wanted = 8usize.max(bound as usize + 1);
    let points = sample_points(map.field(), wanted);
    let sampled = points.iter().map(|(s, t)| map.eval(s, t).rank()).max().unwrap_or(0);
    let deterministic = points.len() as i64 > bound;
    let mut out = GenericRank {
        rank: profile_rank,
        sampled_rank: sampled,
        points: points.len(),
        minor_degree_bound: bound,
        deterministic,
        method: RankMethod::Sampled,
    };
    if sampled == profile_rank {
        return Ok(out);
    }
    if sampled > profile_rank || deterministic {
        return Err(SheafError::CertificationMismatch { sampled, exact: None, profile: profile_rank });
    }
    let exact = exact_rank(map);
    if exact != profile_rank {
        return Err(SheafError::CertificationMismatch { sampled, exact: Some(exact), profile: profile_rank });
    }
    out.method = RankMethod::ExactElimination;
    Ok(out)
}

/// Rank of the map over the function field of the line.
pub fn generic_rank(map: &BundleMap) -> Result<GenericRank, SheafError> {
    certify(map, &h0_profile(map))
}

/// Invariants of the image sheaf.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImageData {
    pub rank: usize,
    pub degree: i64,
    pub kernel: SplittingType,
    pub profile: H0Profile,
    pub generic: GenericRank,
}

pub fn image_data(map: &BundleMap) -> Result<ImageData, SheafError> {
    let profile = h0_profile(map);
    let generic = certify(map, &profile)?;
    let kernel = profile.splitting_type();
    debug_assert_eq!(kernel.rank() + generic.rank, map.ncols());
    let deg_src: i64 = map.src_degrees().iter().sum();
    Ok(ImageData { rank: generic.rank, degree: deg_src - kernel.degree(), kernel, profile, generic })
}

#[derive(Clone, Debug)]
pub struct KernelSplitting {
    pub kernel: SplittingType,
    /// Inclusion of the kernel into the source; column `k` spans the summand `O(c_k)`.
    pub basis: BundleMap,
    pub profile: H0Profile,
    pub generic: GenericRank,
}

/// Kernel of `map` with minimal generators, verified to be syzygies.
pub fn kernel_splitting(map: &BundleMap) -> Result<KernelSplitting, SheafError> {
    let field = map.field();
    let src = map.src_degrees().to_vec();
    let profile = h0_profile(map);
    let generic = certify(map, &profile)?;
    let kernel = profile.splitting_type();
    let mut gens: Vec<(i64, Vec<BinaryForm>)> = Vec::new();

    for d in (profile.start + 1)..=profile.end() {
        let fresh = (profile.delta(d)) - profile.delta(d - 1);
        if fresh == 0 {
            continue;
        }
        let ambient = src.iter().map(|&a| super::h0(a + d)).sum::<usize>();
        let mut spanned: Vec<Vec<Scalar>> = Vec::new();
        for (c, g) in &gens {
            let m = c + d;
            for u in 0..=m as usize {
                let mono = BinaryForm::monomial(field, m as usize, u, field.one());
                let forms: Vec<BinaryForm> = g.iter().map(|x| x.mul(&mono).expect("same field")).collect();
                spanned.push(forms_to_vector(field, &src, d, &forms));
            }
        }
        let mut span = Subspace::span(field, ambient, spanned);
        let mut added = 0;
        for v in map.graded_piece(d).kernel() {
            if added == fresh {
                break;
            }
            if span.contains(&v) {
                continue;
            }
            let mut rows = span.basis().to_vec();
            rows.push(v.clone());
            span = Subspace::span(field, ambient, rows);
            gens.push((-d, vector_to_forms(field, &src, d, &v)));
            added += 1;
        }
        assert_eq!(added, fresh, "kernel generators at twist {d}");
    }

    let basis = BundleMap::from_columns(field, src, gens)?;
    let composite = map.compose(&basis)?;
    assert!(composite.is_zero(), "kernel basis is not a syzygy");
    Ok(KernelSplitting { kernel, basis, profile, generic })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn f(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64s(Q, c)
    }

    #[test]
    fn euler_syzygy() {
        let m = BundleMap::new(Q, vec![0, 0], vec![1], vec![vec![f(&[1, 0]), f(&[0, 1])]]).unwrap();
        let k = kernel_splitting(&m).unwrap();
        assert_eq!(k.kernel, SplittingType::new(vec![-1]));
        let col = k.basis.column(0);
        // proportional to (t, -s)
        let c = col[0].coeff(1);
        assert_eq!(col[0], f(&[0, 1]).scale(&c));
        assert_eq!(col[1], f(&[-1, 0]).scale(&c));
        assert_eq!(k.generic.rank, 1);
    }

    #[test]
    fn single_quadratic_syzygy() {
        let m = BundleMap::new(Q, vec![0, 0], vec![2], vec![vec![f(&[1, 0, 0]), f(&[0, 0, 1])]]).unwrap();
        let k = kernel_splitting(&m).unwrap();
        assert_eq!(k.kernel, SplittingType::new(vec![-2]));
    }

    #[test]
    fn zero_map_kernel_is_source() {
        let m = BundleMap::zero(Q, vec![0, 2], vec![3]);
        let k = kernel_splitting(&m).unwrap();
        assert_eq!(k.kernel, SplittingType::new(vec![0, 2]));
        assert_eq!(k.generic.rank, 0);
        let img = image_data(&m).unwrap();
        assert_eq!((img.rank, img.degree), (0, 0));
    }

    #[test]
    fn generic_ranks() {
        let z = BinaryForm::zero(Q);
        let diag = BundleMap::new(Q, vec![0, 0], vec![1, 1], vec![vec![f(&[1, 0]), z.clone()], vec![z, f(&[0, 1])]])
            .unwrap();
        assert_eq!(generic_rank(&diag).unwrap().rank, 2);
        let prop = BundleMap::new(
            Q,
            vec![0, 0],
            vec![1, 1],
            vec![vec![f(&[1, 0]), f(&[0, 1])], vec![f(&[2, 0]), f(&[0, 2])]],
        )
        .unwrap();
        assert_eq!(generic_rank(&prop).unwrap().rank, 1);
    }

    #[test]
    fn exact_fallback_matches() {
        let m = BundleMap::new(
            Q,
            vec![0, 0],
            vec![1, 1],
            vec![vec![f(&[1, 0]), f(&[0, 1])], vec![f(&[1, 1]), f(&[1, -1])]],
        )
        .unwrap();
        assert_eq!(exact_rank(&m), 2);
    }

    #[test]
    fn kernel_with_twisted_source() {
        // O(-1) + O(0) -> O(1) via (1, s): kernel generated in degree -1.
        let m = BundleMap::new(Q, vec![0, -1], vec![1], vec![vec![f(&[1, 0]), f(&[1, 0, 0])]]).unwrap();
        let k = kernel_splitting(&m).unwrap();
        assert_eq!(k.kernel.rank(), 1);
        assert_eq!(k.kernel.degree(), -1);
    }
}
