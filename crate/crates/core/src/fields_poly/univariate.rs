//! Dense univariate polynomials, used for dehomogenized gcds and for exact
//! rank computations over the function field of the projective line.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{FieldSpec, Scalar};

/// Coefficients in ascending degree order; empty for zero, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    field: FieldSpec,
    coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn zero(field: FieldSpec) -> Self {
        UniPoly { field, coeffs: Vec::new() }
    }

    pub fn from_coeffs(field: FieldSpec, coeffs: Vec<Scalar>) -> Self {
        let mut p = UniPoly { field, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Scalar::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        UniPoly::from_coeffs(self.field, out)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = self.field.zero();
        let out = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                a.sub_ref(b)
            })
            .collect();
        UniPoly::from_coeffs(self.field, out)
    }

    pub fn scale(&self, c: &Scalar) -> UniPoly {
        UniPoly::from_coeffs(self.field, self.coeffs.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            None => self.clone(),
            Some(lc) => self.scale(&lc.inverse().expect("nonzero leading coefficient")),
        }
    }

    /// Remainder of division by a nonzero polynomial.
    pub fn rem(&self, divisor: &UniPoly) -> UniPoly {
        let dd = divisor.degree().expect("division by zero polynomial");
        let inv = divisor.leading().unwrap().inverse().unwrap();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let c = r[top].mul_ref(&inv);
            if !c.is_zero() {
                let shift = top - dd;
                for (k, b) in divisor.coeffs.iter().enumerate() {
                    r[shift + k] = r[shift + k].sub_ref(&c.mul_ref(b));
                }
            }
            r.pop();
            while r.last().is_some_and(Scalar::is_zero) {
                r.pop();
            }
        }
        UniPoly::from_coeffs(self.field, r)
    }

    /// Monic gcd; zero only if both inputs are zero.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        match self.field {
            FieldSpec::Prime(_) => euclid_gcd(self, other),
            FieldSpec::Rationals => primitive_gcd(self, other),
        }
    }
}

fn euclid_gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a.monic()
}

/// Integer polynomial with ascending coefficients.
type IntPoly = Vec<BigInt>;

fn primitive_part(q: &UniPoly) -> IntPoly {
    let mut den = BigInt::one();
    for c in &q.coeffs {
        den = den.lcm(c.as_rational().expect("rational coefficient").denom());
    }
    let ints: IntPoly = q
        .coeffs
        .iter()
        .map(|c| {
            let r = c.as_rational().unwrap();
            r.numer() * (&den / r.denom())
        })
        .collect();
    make_primitive(ints)
}

fn make_primitive(mut p: IntPoly) -> IntPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    let content = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if content.is_zero() {
        return p;
    }
    let sign = if p.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
    let content = content * sign;
    p.into_iter().map(|c| c / &content).collect()
}

/// Pseudo-remainder of `a` by `b` (both nonzero, integer coefficients).
fn pseudo_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r = a.clone();
    while r.len() > db && !r.is_empty() {
        let top = r.len() - 1;
        let c = r[top].clone();
        let shift = top - db;
        for x in r.iter_mut() {
            *x *= &lb;
        }
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] -= &c * bk;
        }
        r.pop();
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
        r = make_primitive(r);
    }
    r
}

fn primitive_gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let field = a.field;
    let mut x = primitive_part(a);
    let mut y = primitive_part(b);
    if x.is_empty() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = pseudo_rem(&x, &y);
        x = y;
        y = r;
    }
    let coeffs = x.iter().map(|c| field.from_bigint(c)).collect();
    UniPoly::from_coeffs(field, coeffs).monic()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(coeffs: &[i64]) -> UniPoly {
        let f = FieldSpec::Rationals;
        UniPoly::from_coeffs(f, coeffs.iter().map(|&c| f.from_i64(c)).collect())
    }

    #[test]
    fn gcd_over_rationals_uses_primitive_parts() {
        // (x - 1)(x + 2) and (x - 1)(3x + 5)
        let a = q(&[-2, 1, 1]);
        let b = q(&[-5, 2, 3]);
        assert_eq!(a.gcd(&b), q(&[-1, 1]));
    }

    #[test]
    fn gcd_over_prime_field() {
        let f = FieldSpec::prime(5).unwrap();
        let p = |c: &[i64]| UniPoly::from_coeffs(f, c.iter().map(|&v| f.from_i64(v)).collect());
        // x^2 - 1 = (x-1)(x+1), x^2 + 2x + 1 = (x+1)^2
        assert_eq!(p(&[-1, 0, 1]).gcd(&p(&[1, 2, 1])), p(&[1, 1]));
        assert_eq!(p(&[1, 1]).gcd(&p(&[2, 1])), p(&[1]));
    }

    #[test]
    fn gcd_with_zero_is_monic_input() {
        assert_eq!(q(&[4, 2]).gcd(&UniPoly::zero(FieldSpec::Rationals)), q(&[2, 1]));
    }
}
