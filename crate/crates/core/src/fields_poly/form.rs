use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::univariate::UniPoly;
use super::{FieldError, FieldSpec, Scalar};

/// A homogeneous binary form in `s, t`.
///
/// `coeffs[k]` is the coefficient of `s^(d-k) t^k`. The zero form carries no
/// degree and an empty coefficient list; every nonzero form has exactly
/// `d + 1` coefficients, at least one of them nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    field: FieldSpec,
    degree: Option<usize>,
    coeffs: Vec<Scalar>,
}

impl BinaryForm {
    pub fn zero(field: FieldSpec) -> Self {
        BinaryForm { field, degree: None, coeffs: Vec::new() }
    }

    /// Form of degree `degree` with the given coefficients; collapses to zero
    /// when they all vanish.
    pub fn from_coeffs(field: FieldSpec, degree: usize, coeffs: Vec<Scalar>) -> Result<Self, FieldError> {
        if coeffs.len() != degree + 1 {
            return Err(FieldError::CoefficientCount { degree, got: coeffs.len() });
        }
        if coeffs.iter().any(|c| c.field() != field) {
            return Err(FieldError::Mismatch);
        }
        Ok(Self::from_coeffs_unchecked(field, degree, coeffs))
    }

    pub(crate) fn from_coeffs_unchecked(field: FieldSpec, degree: usize, coeffs: Vec<Scalar>) -> Self {
        debug_assert_eq!(coeffs.len(), degree + 1);
        if coeffs.iter().all(Scalar::is_zero) {
            BinaryForm::zero(field)
        } else {
            BinaryForm { field, degree: Some(degree), coeffs }
        }
    }

    pub fn from_i64s(field: FieldSpec, coeffs: &[i64]) -> Self {
        assert!(!coeffs.is_empty(), "a form needs at least one coefficient");
        let cs = coeffs.iter().map(|&c| field.from_i64(c)).collect();
        Self::from_coeffs_unchecked(field, coeffs.len() - 1, cs)
    }

    pub fn constant(c: Scalar) -> Self {
        let field = c.field();
        Self::from_coeffs_unchecked(field, 0, vec![c])
    }

    /// `c * s^(degree - t_power) * t^t_power`.
    pub fn monomial(field: FieldSpec, degree: usize, t_power: usize, c: Scalar) -> Self {
        assert!(t_power <= degree);
        let mut coeffs = vec![field.zero(); degree + 1];
        coeffs[t_power] = c;
        Self::from_coeffs_unchecked(field, degree, coeffs)
    }

    pub fn s(field: FieldSpec) -> Self {
        Self::monomial(field, 1, 0, field.one())
    }

    pub fn t(field: FieldSpec) -> Self {
        Self::monomial(field, 1, 1, field.one())
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.degree.is_none()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `s^(d-k) t^k`, zero out of range.
    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Coefficient vector padded to the given degree; zero forms give zeros.
    pub fn coeff_vector(&self, degree: usize) -> Vec<Scalar> {
        match self.degree {
            None => vec![self.field.zero(); degree + 1],
            Some(d) => {
                assert_eq!(d, degree, "form of degree {d} read as degree {degree}");
                self.coeffs.clone()
            }
        }
    }

    pub fn mul(&self, other: &BinaryForm) -> Result<BinaryForm, FieldError> {
        if self.field != other.field {
            return Err(FieldError::Mismatch);
        }
        let (Some(da), Some(db)) = (self.degree, other.degree) else {
            return Ok(BinaryForm::zero(self.field));
        };
        let mut out = vec![self.field.zero(); da + db + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Ok(BinaryForm::from_coeffs_unchecked(self.field, da + db, out))
    }

    /// Sum of two forms; zero is neutral, otherwise degrees must agree.
    pub fn add(&self, other: &BinaryForm) -> Result<BinaryForm, FieldError> {
        if self.field != other.field {
            return Err(FieldError::Mismatch);
        }
        match (self.degree, other.degree) {
            (None, _) => Ok(other.clone()),
            (_, None) => Ok(self.clone()),
            (Some(a), Some(b)) if a != b => Err(FieldError::Inhomogeneous { expected: a, got: b }),
            (Some(d), Some(_)) => {
                let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x.add_ref(y)).collect();
                Ok(BinaryForm::from_coeffs_unchecked(self.field, d, coeffs))
            }
        }
    }

    pub fn sub(&self, other: &BinaryForm) -> Result<BinaryForm, FieldError> {
        self.add(&other.negate())
    }

    pub fn negate(&self) -> BinaryForm {
        BinaryForm {
            field: self.field,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(Scalar::neg_ref).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> BinaryForm {
        match self.degree {
            None => self.clone(),
            Some(d) => BinaryForm::from_coeffs_unchecked(
                self.field,
                d,
                self.coeffs.iter().map(|x| x.mul_ref(c)).collect(),
            ),
        }
    }

    pub fn eval(&self, s: &Scalar, t: &Scalar) -> Scalar {
        let Some(d) = self.degree else {
            return self.field.zero();
        };
        let mut acc = self.field.zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = c.mul_ref(&s.pow((d - k) as u32)).mul_ref(&t.pow(k as u32));
            acc = acc.add_ref(&term);
        }
        acc
    }

    /// Largest `j` with `t^j` dividing the form (the leading zero run).
    pub fn t_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// `f(s, 1)` as a polynomial in `s` (ascending powers).
    pub fn dehomogenize(&self) -> UniPoly {
        match self.degree {
            None => UniPoly::zero(self.field),
            Some(d) => UniPoly::from_coeffs(self.field, (0..=d).map(|i| self.coeffs[d - i].clone()).collect()),
        }
    }

    /// `t^extra * g(s/t) * t^deg(g)`, the homogenization of `g` in degree `deg(g) + extra`.
    fn homogenize(g: &UniPoly, extra_t: usize) -> BinaryForm {
        let field = g.field();
        let Some(e) = g.degree() else {
            return BinaryForm::zero(field);
        };
        let d = e + extra_t;
        let mut coeffs = vec![field.zero(); d + 1];
        for (i, c) in g.coeffs().iter().enumerate() {
            coeffs[e - i] = c.clone();
        }
        BinaryForm::from_coeffs_unchecked(field, d, coeffs)
    }

    /// Quotient `self / divisor` when the division is exact.
    pub fn div_exact(&self, divisor: &BinaryForm) -> Option<BinaryForm> {
        if self.field != divisor.field {
            return None;
        }
        let dd = divisor.degree?;
        let Some(d) = self.degree else {
            return Some(BinaryForm::zero(self.field));
        };
        if dd > d {
            return None;
        }
        let hd = d - dd;
        let m = divisor.t_valuation().unwrap();
        let inv = divisor.coeffs[m].inverse().unwrap();
        let mut h = vec![self.field.zero(); hd + 1];
        for j in 0..=hd {
            // coefficient of index j + m in divisor * h
            let mut acc = self.coeff(j + m);
            for i in (m + 1)..=dd {
                if i > j + m {
                    break;
                }
                let hk = j + m - i;
                acc = acc.sub_ref(&divisor.coeffs[i].mul_ref(&h[hk]));
            }
            h[j] = acc.mul_ref(&inv);
        }
        let q = BinaryForm::from_coeffs_unchecked(self.field, hd, h);
        (divisor.mul(&q).ok()? == *self).then_some(q)
    }

    pub fn divides(&self, other: &BinaryForm) -> bool {
        other.div_exact(self).is_some()
    }

    /// First nonzero coefficient scaled to one.
    pub fn normalized(&self) -> BinaryForm {
        match self.t_valuation() {
            None => self.clone(),
            Some(k) => self.scale(&self.coeffs[k].inverse().unwrap()),
        }
    }

    /// Monic gcd of a list of forms.
    ///
    /// A constant result means the forms have no common zero on the
    /// projective line over the algebraic closure.
    pub fn gcd(forms: &[BinaryForm]) -> Result<BinaryForm, FieldError> {
        let nonzero: Vec<&BinaryForm> = forms.iter().filter(|f| !f.is_zero()).collect();
        let Some(first) = nonzero.first() else {
            return Err(FieldError::AllZero);
        };
        let field = first.field;
        if nonzero.iter().any(|f| f.field != field) {
            return Err(FieldError::Mismatch);
        }
        let t_power = nonzero.iter().map(|f| f.t_valuation().unwrap()).min().unwrap();
        let mut g = UniPoly::zero(field);
        for f in &nonzero {
            g = g.gcd(&f.dehomogenize());
            if g.degree() == Some(0) {
                break;
            }
        }
        let core = BinaryForm::homogenize(&g, 0);
        let t_part = BinaryForm::monomial(field, t_power, t_power, field.one());
        Ok(core.mul(&t_part)?.normalized())
    }
}

impl serde::Serialize for BinaryForm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree else {
            return write!(f, "0");
        };
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative_literal();
            let magnitude = if negative { c.neg_ref() } else { c.clone() };
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            }
            first = false;
            let mut factors = Vec::new();
            let (se, te) = (d - k, k);
            if se > 0 {
                factors.push(if se == 1 { "s".to_string() } else { format!("s^{se}") });
            }
            if te > 0 {
                factors.push(if te == 1 { "t".to_string() } else { format!("t^{te}") });
            }
            if factors.is_empty() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{magnitude}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

// Operator forms panic on mismatched fields or degrees; internal code uses them
// only where homogeneity holds by construction.
impl<'a> Add<&'a BinaryForm> for &'a BinaryForm {
    type Output = BinaryForm;
    fn add(self, rhs: &'a BinaryForm) -> BinaryForm {
        BinaryForm::add(self, rhs).expect("homogeneous sum")
    }
}

impl<'a> Sub<&'a BinaryForm> for &'a BinaryForm {
    type Output = BinaryForm;
    fn sub(self, rhs: &'a BinaryForm) -> BinaryForm {
        BinaryForm::sub(self, rhs).expect("homogeneous difference")
    }
}

impl<'a> Mul<&'a BinaryForm> for &'a BinaryForm {
    type Output = BinaryForm;
    fn mul(self, rhs: &'a BinaryForm) -> BinaryForm {
        BinaryForm::mul(self, rhs).expect("same field")
    }
}

impl Neg for &BinaryForm {
    type Output = BinaryForm;
    fn neg(self) -> BinaryForm {
        self.negate()
    }
}
