//! Exact scalars in a cyclotomic field `Q(ζ_L)`.
//!
//! Elements are stored densely in the power basis `1, ζ, …, ζ^{φ(L)-1}`
//! reduced modulo the cyclotomic polynomial `Φ_L`. Values that happen to be
//! rational are always demoted to [`Scalar::Rat`], so a rational value has
//! exactly one representation no matter which field produced it.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("incompatible cyclotomic orders {0} and {1} (neither divides the other)")]
    IncompatibleFields(u32, u32),
    #[error("cyclotomic order must be positive")]
    ZeroOrder,
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

/// An exact element of `Q(ζ_L)`.
#[derive(Clone, PartialEq, Eq)]
pub enum Scalar {
    Rat(BigRational),
    Cyc(Cyclo),
}

/// A non-rational element of `Q(ζ_L)`, `L ≥ 3`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclo {
    order: u32,
    coords: Vec<BigRational>,
}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Scalar::Rat(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            Scalar::Cyc(c) => {
                1u8.hash(state);
                c.hash(state);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Cyclotomic polynomials

fn phi_cache() -> &'static Mutex<HashMap<u32, Arc<[BigInt]>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<[BigInt]>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of `Φ_L`, lowest degree first (monic).
pub fn cyclotomic_poly(order: u32) -> Arc<[BigInt]> {
    assert!(order > 0, "cyclotomic order must be positive");
    if let Some(p) = phi_cache().lock().unwrap().get(&order) {
        return p.clone();
    }
    // x^L - 1 divided by Φ_d for every proper divisor d.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); order as usize + 1];
    num[0] = -BigInt::one();
    num[order as usize] = BigInt::one();
    for d in 1..order {
        if order.is_multiple_of(d) {
            let den = cyclotomic_poly(d);
            num = exact_int_div(&num, &den);
        }
    }
    let arc: Arc<[BigInt]> = num.into();
    phi_cache().lock().unwrap().insert(order, arc.clone());
    arc
}

fn exact_int_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // den is monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut q = vec![BigInt::zero(); nd - dd + 1];
    for i in (dd..=nd).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        q[i - dd] = c.clone();
        for (j, dc) in den.iter().enumerate() {
            rem[i - dd + j] -= &c * dc;
        }
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    q
}

/// Euler's totient, which is the degree of `Φ_L`.
pub fn totient(order: u32) -> usize {
    let mut n = order;
    let mut result = order;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result as usize
}

fn reduce_mod_phi(mut coeffs: Vec<BigRational>, order: u32) -> Vec<BigRational> {
    let phi = cyclotomic_poly(order);
    let deg = phi.len() - 1;
    if coeffs.len() > deg {
        for i in (deg..coeffs.len()).rev() {
            let c = std::mem::replace(&mut coeffs[i], BigRational::zero());
            if c.is_zero() {
                continue;
            }
            for (j, pc) in phi.iter().enumerate().take(deg) {
                if !pc.is_zero() {
                    coeffs[i - deg + j] -= &c * BigRational::from_integer(pc.clone());
                }
            }
        }
    }
    coeffs.resize(deg, BigRational::zero());
    coeffs
}

// dense Q[x] helpers used for inversion
fn qtrim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn qdivrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    qtrim(&mut rem);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut q = vec![BigRational::zero(); rem.len() - db];
    while rem.len() >= b.len() {
        let shift = rem.len() - 1 - db;
        let c = rem.last().unwrap() / &lead;
        for (j, bc) in b.iter().enumerate() {
            rem[shift + j] -= &c * bc;
        }
        q[shift] = c;
        rem.pop();
        qtrim(&mut rem);
    }
    (q, rem)
}

fn qmul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn qsub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigRational> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect();
    qtrim(&mut out);
    out
}

/// Inverse of `a` modulo the irreducible `m`, by the extended Euclidean algorithm.
fn qinv_mod(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    qtrim(&mut r1);
    let (mut t0, mut t1): (Vec<BigRational>, Vec<BigRational>) =
        (Vec::new(), vec![BigRational::one()]);
    while !r1.is_empty() {
        let (q, r) = qdivrem(&r0, &r1);
        let t2 = qsub(&t0, &qmul(&q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, t2);
    }
    // r0 is a nonzero constant
    let c = r0[0].clone();
    t0.iter().map(|x| x / &c).collect()
}

// ---------------------------------------------------------------------------

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::Rat(BigRational::from_integer(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Rat(r)
    }

    /// Builds `Σ coords[i] ζ_L^i`, reducing modulo `Φ_L`.
    pub fn from_coords(order: u32, coords: Vec<BigRational>) -> Result<Self, ScalarError> {
        if order == 0 {
            return Err(ScalarError::ZeroOrder);
        }
        Ok(Self::canonical(order, reduce_mod_phi(coords, order)))
    }

    /// The primitive root of unity `ζ_L = exp(2πi/L)`.
    pub fn zeta(order: u32) -> Self {
        Self::zeta_pow(order, 1)
    }

    /// `ζ_L^e`, for any integer exponent.
    pub fn zeta_pow(order: u32, e: i64) -> Self {
        assert!(order > 0, "cyclotomic order must be positive");
        let e = e.rem_euclid(order as i64) as usize;
        let mut coords = vec![BigRational::zero(); e + 1];
        coords[e] = BigRational::one();
        Self::canonical(order, reduce_mod_phi(coords, order))
    }

    fn canonical(order: u32, coords: Vec<BigRational>) -> Self {
        if coords.iter().skip(1).all(|c| c.is_zero()) {
            Scalar::Rat(coords.into_iter().next().unwrap_or_else(BigRational::zero))
        } else {
            Scalar::Cyc(Cyclo { order, coords })
        }
    }

    /// The cyclotomic order the value is represented in (1 for rationals).
    pub fn order(&self) -> u32 {
        match self {
            Scalar::Rat(_) => 1,
            Scalar::Cyc(c) => c.order,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Cyc(_) => None,
        }
    }

    /// The value as a machine integer, if it is one.
    pub fn to_i64(&self) -> Option<i64> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .and_then(|r| r.to_integer().to_i64())
    }

    /// Coordinates in the power basis of `Q(ζ_L)`, length `φ(L)`.
    pub fn coords_in(&self, order: u32) -> Result<Vec<BigRational>, ScalarError> {
        let emb = self.embed(order)?;
        Ok(match emb {
            Scalar::Rat(r) => {
                let mut v = vec![BigRational::zero(); totient(order)];
                v[0] = r;
                v
            }
            Scalar::Cyc(c) => c.coords,
        })
    }

    /// Embeds into `Q(ζ_target)`; requires `order() | target`.
    pub fn embed(&self, target: u32) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Rat(_) => Ok(self.clone()),
            Scalar::Cyc(c) => {
                if c.order == target {
                    return Ok(self.clone());
                }
                if !target.is_multiple_of(c.order) {
                    return Err(ScalarError::IncompatibleFields(c.order, target));
                }
                let step = (target / c.order) as usize;
                let mut coords = vec![BigRational::zero(); (c.coords.len() - 1) * step + 1];
                for (i, x) in c.coords.iter().enumerate() {
                    coords[i * step] = x.clone();
                }
                Ok(Self::canonical(target, reduce_mod_phi(coords, target)))
            }
        }
    }

    fn common_order(&self, other: &Scalar) -> Result<u32, ScalarError> {
        let (a, b) = (self.order(), other.order());
        if b % a == 0 {
            Ok(b)
        } else if a % b == 0 {
            Ok(a)
        } else {
            Err(ScalarError::IncompatibleFields(a, b))
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        if let (Scalar::Rat(a), Scalar::Rat(b)) = (self, other) {
            return Ok(Scalar::Rat(a + b));
        }
        let order = self.common_order(other)?;
        let a = self.coords_in(order)?;
        let b = other.coords_in(order)?;
        let sum = a.into_iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(Self::canonical(order, sum))
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a * b)),
            (Scalar::Rat(a), Scalar::Cyc(c)) | (Scalar::Cyc(c), Scalar::Rat(a)) => {
                if a.is_zero() {
                    return Ok(Scalar::zero());
                }
                Ok(Scalar::Cyc(Cyclo {
                    order: c.order,
                    coords: c.coords.iter().map(|x| x * a).collect(),
                }))
            }
            _ => {
                let order = self.common_order(other)?;
                let a = self.coords_in(order)?;
                let b = other.coords_in(order)?;
                Ok(Self::canonical(order, reduce_mod_phi(qmul(&a, &b), order)))
            }
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Rat(r) => {
                if r.is_zero() {
                    Err(ScalarError::DivisionByZero)
                } else {
                    Ok(Scalar::Rat(r.recip()))
                }
            }
            Scalar::Cyc(c) => {
                let phi: Vec<BigRational> = cyclotomic_poly(c.order)
                    .iter()
                    .map(|x| BigRational::from_integer(x.clone()))
                    .collect();
                let inv = qinv_mod(&c.coords, &phi);
                Ok(Self::canonical(c.order, reduce_mod_phi(inv, c.order)))
            }
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.checked_mul(&other.inv()?)
    }

    /// `self^e` for a nonnegative exponent.
    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Sign of a rational value (`None` for non-rational scalars).
    pub fn rational_sign(&self) -> Option<i8> {
        self.as_rational().map(|r| {
            if r.is_zero() {
                0
            } else if r.is_positive() {
                1
            } else {
                -1
            }
        })
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Rat(r)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Cyc(c) => Scalar::Cyc(Cyclo {
                order: c.order,
                coords: c.coords.iter().map(|x| -x).collect(),
            }),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

// Operators panic on incompatible fields; the `checked_*` methods report it.
macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar arithmetic")
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$checked(&rhs).expect("scalar arithmetic")
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$checked(rhs).expect("scalar arithmetic")
            }
        }
    };
}

scalar_binop!(Add, add, checked_add);
scalar_binop!(Sub, sub, checked_sub);
scalar_binop!(Mul, mul, checked_mul);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |a, b| a * b)
    }
}

// ---------------------------------------------------------------------------
// Text form: "p/q" for rationals, "cyc<L>(c0,c1,...)" otherwise.

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rat(s: &str) -> Result<BigRational, ScalarError> {
    let s = s.trim();
    let err = || ScalarError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| err())?)),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => f.write_str(&fmt_rat(r)),
            Scalar::Cyc(c) => {
                write!(f, "cyc{}(", c.order)?;
                for (i, x) in c.coords.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(&fmt_rat(x))?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix("cyc") {
            let err = || ScalarError::Parse(s.to_string());
            let (order, body) = rest.split_once('(').ok_or_else(err)?;
            let body = body.strip_suffix(')').ok_or_else(err)?;
            let order: u32 = order.trim().parse().map_err(|_| err())?;
            let coords = body
                .split(',')
                .map(parse_rat)
                .collect::<Result<Vec<_>, _>>()?;
            return Scalar::from_coords(order, coords);
        }
        if t == "zeta" || t.starts_with("zeta") {
            // "zeta<L>" or "zeta<L>^e"
            let err = || ScalarError::Parse(s.to_string());
            let rest = &t[4..];
            let (l, e) = match rest.split_once('^') {
                Some((l, e)) => (l, e.parse::<i64>().map_err(|_| err())?),
                None => (rest, 1),
            };
            let l: u32 = l.parse().map_err(|_| err())?;
            if l == 0 {
                return Err(ScalarError::ZeroOrder);
            }
            return Ok(Scalar::zeta_pow(l, e));
        }
        parse_rat(t).map(Scalar::Rat)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Scalar::from_int(n)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    #[test]
    fn rational_addition() {
        assert_eq!(q(1, 2) + q(1, 3), q(5, 6));
    }

    #[test]
    fn cube_root_of_unity() {
        let z = Scalar::zeta(3);
        assert_eq!(&(&z * &z) * &z, Scalar::one());
        assert_eq!(&z + &(&z * &z), Scalar::from_int(-1));
    }

    #[test]
    fn cyclotomic_polys() {
        let to_i = |p: Arc<[BigInt]>| p.iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(to_i(cyclotomic_poly(1)), vec![-1, 1]);
        assert_eq!(to_i(cyclotomic_poly(3)), vec![1, 1, 1]);
        assert_eq!(to_i(cyclotomic_poly(4)), vec![1, 0, 1]);
        assert_eq!(to_i(cyclotomic_poly(6)), vec![1, -1, 1]);
        assert_eq!(totient(12), 4);
        assert_eq!(cyclotomic_poly(12).len(), 5);
    }

    #[test]
    fn division_and_errors() {
        assert_eq!(
            Scalar::one().checked_div(&Scalar::zero()),
            Err(ScalarError::DivisionByZero)
        );
        let z3 = Scalar::zeta(3);
        let z4 = Scalar::zeta(4);
        assert_eq!(
            z3.checked_add(&z4),
            Err(ScalarError::IncompatibleFields(3, 4))
        );
        // 3 | 6 embeds
        let z6 = Scalar::zeta(6);
        assert_eq!(&z6 * &z6, z3.embed(6).unwrap());
        let w = &z3 + &Scalar::from_int(2);
        assert_eq!(&w * &w.inv().unwrap(), Scalar::one());
        assert_eq!(Scalar::zeta(2), Scalar::from_int(-1));
        assert_eq!(Scalar::zeta(1), Scalar::one());
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "-3", "5/6", "cyc3(0,1)", "cyc5(1/2,0,-1,3)"] {
            let v: Scalar = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("zeta3^3".parse::<Scalar>().unwrap(), Scalar::one());
        assert_eq!("cyc3(7,0)".parse::<Scalar>().unwrap(), Scalar::from_int(7));
        assert!("1/0".parse::<Scalar>().is_err());
    }
}
