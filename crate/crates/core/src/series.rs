//! Power-series prefixes with explicit truncation order.
//!
//! A [`TruncatedSeries`] of order `N` knows the coefficients of
//! `z^0, …, z^{N-1}` exactly and nothing beyond. Every binary operation
//! returns the minimum of its inputs' orders.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::scalar::{Scalar, ScalarError};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    coeffs: Vec<Scalar>,
}

/// Order of vanishing as far as the truncation can tell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Valuation {
    /// First nonzero coefficient index.
    Exact(usize),
    /// All known coefficients vanish; the true order is at least this.
    AtLeast(usize),
}

impl Valuation {
    /// The certified lower bound.
    pub fn lower_bound(self) -> usize {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        TruncatedSeries { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Scalar::zero(); n],
        }
    }

    pub fn constant(c: Scalar, n: usize) -> Self {
        let mut s = Self::zero(n);
        if n > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// A polynomial viewed as a series known to order `n`.
    pub fn from_poly(p: &Poly, n: usize) -> Self {
        TruncatedSeries {
            coeffs: (0..n).map(|i| p.coeff(i)).collect(),
        }
    }

    pub fn trunc_order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Option<&Scalar> {
        self.coeffs.get(i)
    }

    pub fn truncate(&self, n: usize) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs[..n.min(self.coeffs.len())].to_vec(),
        }
    }

    /// The known prefix as a polynomial.
    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(i) => Valuation::Exact(i),
            None => Valuation::AtLeast(self.coeffs.len()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.trunc_order().min(other.trunc_order());
        TruncatedSeries {
            coeffs: (0..n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.trunc_order().min(other.trunc_order());
        TruncatedSeries {
            coeffs: (0..n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Cauchy product; the result is known to `min(Na, Nb)`.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.trunc_order().min(other.trunc_order());
        let mut out = vec![Scalar::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Product with an exactly known polynomial; the order is unchanged.
    pub fn mul_poly(&self, p: &Poly) -> Self {
        let n = self.trunc_order();
        let mut out = vec![Scalar::zero(); n];
        for (i, a) in p.coeffs().iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in self.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// `a(z^e)` keeping the same truncation order.
    pub fn substitute_power(&self, e: usize) -> Self {
        self.substitute_power_to(e, self.trunc_order())
    }

    /// `a(z^e)` known to order `n`. A series known mod `z^N` gives a
    /// substitution known mod `z^{eN}`, so `n` is capped there.
    pub fn substitute_power_to(&self, e: usize, n: usize) -> Self {
        assert!(e >= 1, "substitution exponent must be positive");
        let n = n.min(e.saturating_mul(self.trunc_order()));
        let mut out = vec![Scalar::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            let idx = i * e;
            if idx >= n {
                break;
            }
            out[idx] = c.clone();
        }
        TruncatedSeries { coeffs: out }
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<Self, ScalarError> {
        let n = self.trunc_order();
        if n == 0 {
            return Ok(self.clone());
        }
        let c0_inv = self.coeffs[0].inv()?;
        let mut out: Vec<Scalar> = Vec::with_capacity(n);
        out.push(c0_inv.clone());
        for i in 1..n {
            let mut acc = Scalar::zero();
            for j in 1..=i {
                if !self.coeffs[j].is_zero() {
                    acc = &acc + &(&self.coeffs[j] * &out[i - j]);
                }
            }
            out.push(-&(&acc * &c0_inv));
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// Expansion of `num / den` to order `n`, when it is a power series.
    ///
    /// Returns `None` when `den` vanishes to higher order than `num`.
    pub fn from_rational(num: &Poly, den: &Poly, n: usize) -> Result<Option<Self>, ScalarError> {
        let vd = den.valuation().ok_or(ScalarError::DivisionByZero)?;
        let vn = match num.valuation() {
            None => return Ok(Some(Self::zero(n))),
            Some(v) => v,
        };
        if vn < vd {
            return Ok(None);
        }
        let num = num.unshift(vd);
        let den = den.unshift(vd);
        let inv = Self::from_poly(&den, n).inverse()?;
        Ok(Some(inv.mul_poly(&num)))
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "] + O(z^{})", self.coeffs.len())
    }
}
