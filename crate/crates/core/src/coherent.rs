//! Coherent systems `(E, V)` on the projective line.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields_poly::{BinaryForm, FieldSpec, Scalar};
use crate::linalg::{Matrix, Subspace};
use crate::p1_sheaves::{forms_to_vector, vector_to_forms, image_data, kernel_splitting, BundleMap, KernelSplitting, SheafError, SplittingType};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoherentError {
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error("sections are linearly dependent")]
    DependentSections,
    #[error("section {index} has {got} components, the bundle has rank {rank}")]
    SectionShape { index: usize, got: usize, rank: usize },
    #[error("the system does not generate its bundle")]
    NotGenerated,
    #[error("cannot choose {n} independent sections from a {h0}-dimensional space")]
    ImpossibleDimension { n: usize, h0: usize },
    #[error("subspace basis is dependent or has the wrong length")]
    BadSubspace,
    #[error("no generated system found in {0} draws")]
    SamplingExhausted(usize),
}

/// A bundle `E = O(a_1) + ... + O(a_r)` with an `n`-dimensional space of
/// sections, stored as the evaluation map `V ⊗ O -> E`.
///
/// The sections are kept in reduced echelon form with respect to the
/// monomial basis of `H0(E)`, so equal section spaces compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoherentSystemP1 {
    bundle: Vec<i64>,
    eval: BundleMap,
    coords: Subspace,
}

/// The subsheaf `E_W` generated by a subspace `W` of `V`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsheafReport {
    /// Echelon coordinates of `W` in the section basis of `V`.
    pub w_basis: Vec<Vec<Scalar>>,
    pub kernel_splitting: SplittingType,
    pub rank_ew: usize,
    pub deg_ew: i64,
    pub trivial: bool,
}

impl SubsheafReport {
    pub fn dim_w(&self) -> usize {
        self.w_basis.len()
    }
}

impl CoherentSystemP1 {
    pub fn new(field: FieldSpec, bundle: Vec<i64>, sections: Vec<Vec<BinaryForm>>) -> Result<Self, CoherentError> {
        let rank = bundle.len();
        for (index, s) in sections.iter().enumerate() {
            if s.len() != rank {
                return Err(CoherentError::SectionShape { index, got: s.len(), rank });
            }
        }
        // validates component degrees
        BundleMap::from_sections(field, bundle.clone(), &sections)?;
        let ambient: usize = SplittingType::new(bundle.clone()).h0();
        let vectors: Vec<Vec<Scalar>> = sections.iter().map(|s| forms_to_vector(field, &bundle, 0, s)).collect();
        let coords = Subspace::span(field, ambient, vectors);
        if coords.dim() != sections.len() {
            return Err(CoherentError::DependentSections);
        }
        Ok(Self::from_coords(field, bundle, coords))
    }

    fn from_coords(field: FieldSpec, bundle: Vec<i64>, coords: Subspace) -> Self {
        let echelon: Vec<Vec<BinaryForm>> =
            coords.basis().iter().map(|v| vector_to_forms(field, &bundle, 0, v)).collect();
        let eval = BundleMap::from_sections(field, bundle.clone(), &echelon).expect("echelon sections are valid");
        CoherentSystemP1 { bundle, eval, coords }
    }

    /// The complete system `(E, H0(E))` with monomial sections.
    pub fn complete(field: FieldSpec, bundle: Vec<i64>) -> Self {
        let ambient = SplittingType::new(bundle.clone()).h0();
        Self::from_coords(field, bundle, Subspace::whole(field, ambient))
    }

    /// System whose sections span the given subspace of `H0(E)` (monomial coordinates).
    pub fn from_section_space(bundle: Vec<i64>, coords: Subspace) -> Self {
        Self::from_coords(coords.field(), bundle, coords)
    }

    pub fn field(&self) -> FieldSpec {
        self.eval.field()
    }

    pub fn bundle_degrees(&self) -> &[i64] {
        &self.bundle
    }

    pub fn bundle(&self) -> SplittingType {
        SplittingType::new(self.bundle.clone())
    }

    pub fn rank(&self) -> usize {
        self.bundle.len()
    }

    pub fn degree(&self) -> i64 {
        self.bundle.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.coords.dim()
    }

    /// `(r, d, n)`.
    pub fn type_tuple(&self) -> (usize, i64, usize) {
        (self.rank(), self.degree(), self.dim())
    }

    pub fn eval_map(&self) -> &BundleMap {
        &self.eval
    }

    pub fn sections(&self) -> Vec<Vec<BinaryForm>> {
        (0..self.dim()).map(|j| self.eval.column(j)).collect()
    }

    /// Section space as a subspace of `H0(E)` in monomial coordinates.
    pub fn section_space(&self) -> &Subspace {
        &self.coords
    }

    /// No common zero of the `r x r` minors of the section matrix.
    pub fn is_generated(&self) -> bool {
        if self.dim() < self.rank() {
            return false;
        }
        match self.eval.maximal_minors_gcd() {
            Some(g) => g.degree() == Some(0),
            None => false,
        }
    }

    /// The kernel `M_{V,E}` of the evaluation map.
    pub fn dual_span(&self) -> Result<KernelSplitting, CoherentError> {
        if !self.is_generated() {
            return Err(CoherentError::NotGenerated);
        }
        Ok(kernel_splitting(&self.eval)?)
    }

    /// Normalizes `w` (coordinates in the section basis) to an echelon basis.
    pub fn subspace(&self, w: &[Vec<Scalar>]) -> Result<Subspace, CoherentError> {
        if w.is_empty() || w.iter().any(|v| v.len() != self.dim()) {
            return Err(CoherentError::BadSubspace);
        }
        let s = Subspace::span(self.field(), self.dim(), w.to_vec());
        if s.dim() != w.len() {
            return Err(CoherentError::BadSubspace);
        }
        Ok(s)
    }

    /// Rank and degree of the image of `W ⊗ O -> E`.
    pub fn subsheaf_generated(&self, w: &[Vec<Scalar>]) -> Result<SubsheafReport, CoherentError> {
        let w = self.subspace(w)?;
        self.subsheaf_of(&w)
    }

    pub(crate) fn subsheaf_of(&self, w: &Subspace) -> Result<SubsheafReport, CoherentError> {
        let restricted = self.eval.restrict_trivial(w.basis());
        let img = image_data(&restricted)?;
        let trivial = img.degree == 0;
        debug_assert!(trivial == (img.rank == w.dim()));
        Ok(SubsheafReport {
            w_basis: w.basis().to_vec(),
            kernel_splitting: img.kernel,
            rank_ew: img.rank,
            deg_ew: img.degree,
            trivial,
        })
    }

    /// The system `(M^∨, V^∨)` with sections the images of the dual basis.
    pub fn dual_system(&self) -> Result<CoherentSystemP1, CoherentError> {
        let m = self.dual_span()?;
        let dual = m.basis.dual();
        let sections: Vec<Vec<BinaryForm>> = (0..dual.ncols()).map(|j| dual.column(j)).collect();
        CoherentSystemP1::new(self.field(), dual.tgt_degrees().to_vec(), sections)
    }
}

fn random_section<R: Rng + ?Sized>(field: FieldSpec, bundle: &[i64], rng: &mut R) -> Vec<Scalar> {
    let n = SplittingType::new(bundle.to_vec()).h0();
    (0..n).map(|_| field.random(rng)).collect()
}

/// A draw of `n` independent sections; also reports how many draws were rejected.
pub fn random_system(
    bundle: &SplittingType,
    n: usize,
    seed: u64,
    field: FieldSpec,
) -> Result<(CoherentSystemP1, usize), CoherentError> {
    let degrees = bundle.degrees().to_vec();
    let h0 = bundle.h0();
    if n > h0 {
        return Err(CoherentError::ImpossibleDimension { n, h0 });
    }
    if n == h0 {
        return Ok((CoherentSystemP1::complete(field, degrees), 0));
    }
    let mut rng = rng_from_seed(seed);
    let mut rejected = 0;
    loop {
        let vectors: Vec<Vec<Scalar>> = (0..n).map(|_| random_section(field, &degrees, &mut rng)).collect();
        let coords = Subspace::span(field, h0, vectors);
        if coords.dim() == n {
            return Ok((CoherentSystemP1::from_coords(field, degrees, coords), rejected));
        }
        rejected += 1;
    }
}

/// Like [`random_system`], also rejecting systems that fail to generate.
pub fn random_generated_system(
    bundle: &SplittingType,
    n: usize,
    seed: u64,
    field: FieldSpec,
    max_draws: usize,
) -> Result<(CoherentSystemP1, usize), CoherentError> {
    let mut rejected = 0;
    for attempt in 0..max_draws as u64 {
        let (sys, r) = random_system(bundle, n, crate::seed::sub_seed(seed, "generated-system", attempt), field)?;
        rejected += r;
        if sys.is_generated() {
            return Ok((sys, rejected));
        }
        rejected += 1;
    }
    Err(CoherentError::SamplingExhausted(max_draws))
}

/// Type data of a system on a curve of genus `g`, with the optional
/// parameters used by the numerical audits.
///
/// For a subsystem, `s`, `e` and `m` are the rank, degree and section
/// dimension of the generated subsheaf.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct NumericalSystem {
    pub r: i64,
    pub d: i64,
    pub n: i64,
    pub g: Option<i64>,
    pub a: Option<i64>,
    pub s: Option<i64>,
    pub e: Option<i64>,
    pub m: Option<i64>,
    pub k: Option<i64>,
    pub d_sub: Option<i64>,
    pub r_sub: Option<i64>,
    pub t: Option<i64>,
}

impl NumericalSystem {
    pub fn new(r: i64, d: i64, n: i64) -> Self {
        NumericalSystem { r, d, n, ..Default::default() }
    }

    pub fn on_genus(mut self, g: i64) -> Self {
        self.g = Some(g);
        self
    }

    /// Attach a subsystem: generated subsheaf of rank `s` and degree `e` by an `m`-dimensional space.
    pub fn with_subsystem(mut self, s: i64, e: i64, m: i64) -> Self {
        self.s = Some(s);
        self.e = Some(e);
        self.m = Some(m);
        self
    }
}

/// Numerical effect of pulling back along a degree-`k` cover: degrees scale
/// by `k`, ranks and section dimensions stay. The genus of the cover is not
/// determined by `k` alone, so it is left unset.
pub fn pullback_numeric(data: &NumericalSystem, k: i64) -> NumericalSystem {
    assert!(k >= 1, "cover degree must be positive");
    if k == 1 {
        return data.clone();
    }
    NumericalSystem {
        d: data.d * k,
        e: data.e.map(|e| e * k),
        d_sub: data.d_sub.map(|x| x * k),
        g: None,
        k: Some(data.k.unwrap_or(1) * k),
        ..data.clone()
    }
}

/// Sections of the form `(0, .., f, .., 0)` giving a basis of `H0(E)` in monomial order.
pub fn monomial_sections(field: FieldSpec, bundle: &[i64]) -> Vec<Vec<BinaryForm>> {
    let ambient = SplittingType::new(bundle.to_vec()).h0();
    Matrix::identity(field, ambient).to_rows().iter().map(|v| vector_to_forms(field, bundle, 0, v)).collect()
}
