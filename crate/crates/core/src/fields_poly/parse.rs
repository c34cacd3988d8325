//! Parser for forms written as sums of terms like `3*s^2*t - 1/2*t^3`.

use num_bigint::BigInt;
use thiserror::Error;

use super::{BinaryForm, FieldSpec, Scalar};

/// Parse failure; `column` is 1-based within the input string.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

fn err<T>(column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { column, message: message.into() })
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return err(start + 1, "expected a number");
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn exponent(&mut self) -> Result<usize, ParseError> {
        if !self.eat(b'^') {
            return Ok(1);
        }
        let col = self.column();
        let e = self.integer()?;
        e.try_into().or_else(|_| err(col, "exponent too large"))
    }
}

/// Parse `text` as a form of degree `degree` over `field`.
///
/// Every term must have total degree `degree`; `0` is accepted as the zero form.
pub fn parse_form(text: &str, degree: usize, field: FieldSpec) -> Result<BinaryForm, ParseError> {
    let mut cur = Cursor { bytes: text.as_bytes(), pos: 0 };
    let mut coeffs: Vec<Scalar> = vec![field.zero(); degree + 1];
    if cur.peek().is_none() {
        return err(1, "empty polynomial");
    }
    let mut first = true;
    loop {
        cur.skip_ws();
        let sign_col = cur.column();
        let mut sign = 1i64;
        if cur.eat(b'-') {
            sign = -1;
        } else if cur.eat(b'+') {
        } else if !first {
            return err(sign_col, "expected '+' or '-'");
        }
        first = false;
        cur.skip_ws();
        let term_col = cur.column();

        let mut coeff = field.from_i64(sign);
        let mut s_pow = 0usize;
        let mut t_pow = 0usize;
        let mut factors = 0usize;
        let mut saw_number = false;
        loop {
            cur.skip_ws();
            let col = cur.column();
            match cur.peek() {
                Some(b'0'..=b'9') => {
                    if saw_number {
                        return err(col, "two numeric factors in one term");
                    }
                    saw_number = true;
                    let num = cur.integer()?;
                    let den = if cur.eat(b'/') { cur.integer()? } else { BigInt::from(1) };
                    let c = field
                        .from_ratio(&num, &den)
                        .or_else(|e| err(col, e.to_string()))?;
                    coeff = coeff.mul_ref(&c);
                }
                Some(b's') => {
                    cur.pos += 1;
                    s_pow += cur.exponent()?;
                }
                Some(b't') => {
                    cur.pos += 1;
                    t_pow += cur.exponent()?;
                }
                Some(other) => return err(col, format!("unexpected character '{}'", other as char)),
                None => return err(col, "unexpected end of input"),
            }
            factors += 1;
            if !cur.eat(b'*') {
                break;
            }
        }
        debug_assert!(factors > 0);
        let zero_term = coeff.is_zero();
        if !(zero_term && s_pow == 0 && t_pow == 0) {
            if s_pow + t_pow != degree {
                return err(
                    term_col,
                    format!("term of degree {} in a form of declared degree {degree}", s_pow + t_pow),
                );
            }
            coeffs[t_pow] = coeffs[t_pow].add_ref(&coeff);
        }
        match cur.peek() {
            None => break,
            Some(b'+') | Some(b'-') => continue,
            Some(c) => return err(cur.column(), format!("unexpected character '{}'", c as char)),
        }
    }
    Ok(BinaryForm::from_coeffs_unchecked(field, degree, coeffs))
}
