//! Dense univariate polynomials over [`Scalar`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::{Scalar, ScalarError};

/// Coefficients lowest degree first; no trailing zeros, so zero is `[]`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Scalar>", into = "Vec<Scalar>")]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl From<Vec<Scalar>> for Poly {
    fn from(coeffs: Vec<Scalar>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<Scalar> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    /// `c · z^e`.
    pub fn monomial(c: Scalar, e: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); e + 1];
        coeffs[e] = c;
        Poly::new(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Scalar::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `z^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    /// Index of the lowest nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplies by `z^e`.
    pub fn shift(&self, e: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Scalar::zero(); e];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Drops the lowest `e` coefficients (division by `z^e` when exact).
    pub fn unshift(&self, e: usize) -> Poly {
        Poly::new(self.coeffs.iter().skip(e).cloned().collect())
    }

    /// `p(z^e)`.
    pub fn substitute_power(&self, e: usize) -> Poly {
        assert!(e >= 1);
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Scalar::zero(); (self.coeffs.len() - 1) * e + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * e] = c.clone();
        }
        Poly { coeffs }
    }

    /// Coefficients in `[lo, hi)`, kept at their original degrees.
    pub fn window(&self, lo: usize, hi: usize) -> Poly {
        let coeffs = (0..hi.min(self.coeffs.len()))
            .map(|i| {
                if i >= lo {
                    self.coeffs[i].clone()
                } else {
                    Scalar::zero()
                }
            })
            .collect();
        Poly::new(coeffs)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Scalar::from_int(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
    }

    /// Euclidean division; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly), ScalarError> {
        let lead_inv = divisor
            .leading()
            .ok_or(ScalarError::DivisionByZero)?
            .inv()?;
        let db = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() < divisor.coeffs.len() {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Scalar::zero(); rem.len() - db];
        for i in (db..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let c = &rem[i] * &lead_inv;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i - db + j] = &rem[i - db + j] - &(&c * d);
            }
            quot[i - db] = c;
        }
        rem.truncate(db);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Scales so the leading coefficient is 1.
    pub fn monic(&self) -> Result<Poly, ScalarError> {
        match self.leading() {
            None => Ok(Poly::zero()),
            Some(l) => Ok(self.scale(&l.inv()?)),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Result<Poly, ScalarError> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect())
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect())
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Poly::new(out)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_zero() {
        assert!(Poly::from_ints(&[0, 0]).is_zero());
        assert_eq!(Poly::from_ints(&[1, 2, 0]).degree(), Some(1));
    }

    #[test]
    fn division_round_trip() {
        let a = Poly::from_ints(&[1, 3, 3, 1]);
        let b = Poly::from_ints(&[1, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, Poly::from_ints(&[1, 2, 1]));
        assert_eq!(a.gcd(&a.derivative()).unwrap(), Poly::from_ints(&[1, 2, 1]));
    }

    #[test]
    fn substitution_and_windows() {
        let p = Poly::from_ints(&[1, 2, 3]);
        assert_eq!(p.substitute_power(2), Poly::from_ints(&[1, 0, 2, 0, 3]));
        assert_eq!(p.window(1, 2), Poly::from_ints(&[0, 2]));
        assert_eq!(p.shift(2).unshift(2), p);
    }
}
