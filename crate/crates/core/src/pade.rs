//! Padé pairs, the cross-determinant criterion and its side conditions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{infinite_product_series, CoeffFamily};
use crate::levels::Shape;
use crate::linalg::nullspace;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::series::{TruncatedSeries, Valuation};

/// Polynomials with `Q f − P` vanishing to `certified_order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadePair {
    pub n: usize,
    pub p: Poly,
    pub q: Poly,
    pub certified_order: usize,
}

/// `ord(Q f − P)` as far as the truncation of `f` allows.
pub fn residual_order(f: &TruncatedSeries, q: &Poly, p: &Poly) -> Valuation {
    let n = f.trunc_order();
    f.mul_poly(q)
        .sub(&TruncatedSeries::from_poly(p, n))
        .valuation()
}

impl PadePair {
    /// Recomputes `ord(Q f − P)` and compares with the certified order.
    pub fn reverify(&self, f: &TruncatedSeries) -> bool {
        !self.q.is_zero()
            && self.certified_order <= f.trunc_order()
            && residual_order(f, &self.q, &self.p).lower_bound() >= self.certified_order
    }
}

/// Exact solve for `deg Q ≤ deg_q`, `deg P ≤ deg_p` with `ord(Q f − P) ≥ target`.
///
/// `Q` is normalized to constant term 1 when possible, else to lowest
/// nonzero coefficient 1. The certified order is the measured order, capped
/// at the truncation of `f`.
pub fn pade_solve(
    f: &TruncatedSeries,
    deg_q: usize,
    deg_p: usize,
    target: usize,
) -> Result<Option<PadePair>> {
    if f.trunc_order() < target {
        return Err(Error::InsufficientTerms {
            needed: target,
            have: f.trunc_order(),
        });
    }
    let nq = deg_q + 1;
    let unknowns = nq + deg_p + 1;
    let rows: Vec<Vec<Scalar>> = (0..target)
        .map(|n| {
            let mut row = vec![Scalar::zero(); unknowns];
            for (i, cell) in row.iter_mut().enumerate().take(nq.min(n + 1)) {
                *cell = f.coeffs()[n - i].clone();
            }
            if n <= deg_p {
                row[nq + n] = -Scalar::one();
            }
            row
        })
        .collect();
    let basis = nullspace(&rows, unknowns);
    let pick = basis
        .iter()
        .find(|v| !v[0].is_zero())
        .map(|v| (v, 0))
        .or_else(|| {
            basis
                .iter()
                .find_map(|v| v[..nq].iter().position(|c| !c.is_zero()).map(|i| (v, i)))
        });
    let Some((v, lead)) = pick else {
        return Ok(None);
    };
    let scale = v[lead].inv()?;
    let q = Poly::new(v[..nq].to_vec()).scale(&scale);
    let p = Poly::new(v[nq..].to_vec()).scale(&scale);
    let certified_order = residual_order(f, &q, &p).lower_bound().min(f.trunc_order());
    Ok(Some(PadePair {
        n: 0,
        p,
        q,
        certified_order,
    }))
}

/// `m(n)`: listed values, then growing by `tail_step` per index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MSequence {
    pub values: Vec<u64>,
    #[serde(default = "one_u64")]
    pub tail_step: u64,
}

fn one_u64() -> u64 {
    1
}

impl MSequence {
    /// `m(n) = a·n + b` for all `n`.
    pub fn affine(a: u64, b: u64) -> Self {
        MSequence {
            values: vec![b],
            tail_step: a,
        }
    }

    pub fn get(&self, n: usize) -> u64 {
        match self.values.get(n) {
            Some(v) => *v,
            None => {
                let last = *self.values.last().expect("nonempty");
                last + self.tail_step * (n + 1 - self.values.len()) as u64
            }
        }
    }
}

/// Constants of the criterion: `0 < c1 < c2`, `c3 ≥ 1`, base `r`, and `m(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DNParams {
    pub c1: Scalar,
    pub c2: Scalar,
    pub c3: u64,
    pub r: u32,
    pub m: MSequence,
}

impl DNParams {
    pub fn new(c1: Scalar, c2: Scalar, c3: u64, r: u32, m: MSequence) -> Result<Self> {
        let p = DNParams { c1, c2, c3, r, m };
        p.validate()?;
        Ok(p)
    }

    fn c(&self, which: &Scalar, name: &str) -> Result<BigRational> {
        which
            .as_rational()
            .cloned()
            .ok_or_else(|| Error::config(format!("{name} must be rational")))
    }

    pub fn validate(&self) -> Result<()> {
        let (c1, c2) = (self.c(&self.c1, "c1")?, self.c(&self.c2, "c2")?);
        if !(c1.is_positive() && c1 < c2) {
            return Err(Error::config("need 0 < c1 < c2"));
        }
        if self.c3 < 1 || self.r < 2 {
            return Err(Error::config("need c3 >= 1 and r >= 2"));
        }
        if self.m.values.is_empty() {
            return Err(Error::config("m needs at least one value"));
        }
        let steps = self
            .m
            .values
            .windows(2)
            .map(|w| w[1] as i128 - w[0] as i128)
            .chain([self.m.tail_step as i128]);
        for s in steps {
            if s < 1 || s > self.c3 as i128 {
                return Err(Error::config("m must increase with steps at most c3"));
            }
        }
        Ok(())
    }

    /// `c · r^{m(n)}`.
    fn budget(&self, c: &BigRational, n: usize) -> BigRational {
        c * BigRational::from_integer(BigInt::from(self.r).pow(self.m.get(n) as u32))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DnLevel {
    pub n: usize,
    /// `P_n Q_{n+1} − P_{n+1} Q_n ≠ 0`; absent for the last pair.
    pub cross_nonzero: Option<bool>,
    pub degree_ok: bool,
    pub order_ok: bool,
    /// The certified order was confirmed by recomputing `Q_n f − P_n`.
    pub reverified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DnReport {
    pub passed: bool,
    /// Inclusive range of `n` on which every condition was checked.
    pub verified_range: Option<(usize, usize)>,
    pub levels: Vec<DnLevel>,
}

/// Checks the three conditions for every consecutive pair. The `i`-th pair
/// is measured against `c·r^{m(i)}`. Evidence is limited to the listed range.
pub fn dn_check(f: &TruncatedSeries, pairs: &[PadePair], params: &DNParams) -> Result<DnReport> {
    params.validate()?;
    let c1 = params.c(&params.c1, "c1")?;
    let c2 = params.c(&params.c2, "c2")?;
    let mut levels = Vec::with_capacity(pairs.len());
    for (i, pair) in pairs.iter().enumerate() {
        let cross_nonzero = pairs
            .get(i + 1)
            .map(|next| !(&(&pair.p * &next.q) - &(&next.p * &pair.q)).is_zero());
        let deg_budget = params.budget(&c1, i);
        let deg = pair
            .q
            .degree()
            .unwrap_or(0)
            .max(pair.p.degree().unwrap_or(0));
        let degree_ok = BigRational::from_integer(deg.into()) <= deg_budget;
        let ord_budget = params.budget(&c2, i);
        let reverified = pair.reverify(f);
        let order_ok =
            reverified && BigRational::from_integer(pair.certified_order.into()) >= ord_budget;
        levels.push(DnLevel {
            n: pair.n,
            cross_nonzero,
            degree_ok,
            order_ok,
            reverified,
        });
    }
    let ok = |l: &DnLevel| l.cross_nonzero.unwrap_or(true) && l.degree_ok && l.order_ok;
    let passed = !levels.is_empty() && levels.iter().all(ok);
    let verified_range = (pairs.len() >= 2).then(|| (pairs[0].n, pairs[pairs.len() - 2].n));
    Ok(DnReport {
        passed,
        verified_range,
        levels,
    })
}

fn ratio_condition(a: impl Fn(usize) -> Scalar, s: usize, t: usize) -> Result<bool> {
    // a_s/a_t ≠ a_{s-1}/a_{t-1}, cross-multiplied
    Ok(&a(s) * &a(t - 1) != &a(s - 1) * &a(t))
}

/// Block multipliers `f_{s,Y}` of `f`: block `s` (coefficients `[sK, (s+1)K)`)
/// divided by block 0, checked to be proportional.
pub fn block_multipliers(f: &TruncatedSeries, block: usize, count: usize) -> Result<Vec<Scalar>> {
    if f.trunc_order() < block * count {
        return Err(Error::InsufficientTerms {
            needed: block * count,
            have: f.trunc_order(),
        });
    }
    let c = f.coeffs();
    let lead = c[..block]
        .iter()
        .position(|x| !x.is_zero())
        .ok_or_else(|| Error::hypothesis("first block vanishes"))?;
    let base_inv = c[lead].inv()?;
    (0..count)
        .map(|s| {
            let m = &c[s * block + lead] * &base_inv;
            let proportional = (0..block).all(|i| c[s * block + i] == &c[i] * &m);
            if proportional {
                Ok(m)
            } else {
                Err(Error::hypothesis(format!(
                    "block {s} is not a multiple of block 0"
                )))
            }
        })
        .collect()
}

/// Pair at level `Y` for a product of full degree `k − 1`:
/// `Q = 1 − (f_t/f_s) z^{(t−s)K}` and `P = Q f mod z^{tK}`, `K = k^Y`,
/// certified to order `(t+1)K`.
pub fn prop52_pair(fam: &CoeffFamily, big_y: usize, s: usize, t: usize) -> Result<PadePair> {
    fam.validate()?;
    let k = fam.k as usize;
    if fam.width() != k - 1 {
        return Err(Error::config(format!(
            "need k - 1 = {} coefficients per level",
            k - 1
        )));
    }
    if !(1 <= s && s < t && t < k) {
        return Err(Error::config(format!(
            "need 1 <= s < t <= k - 1, got s = {s}, t = {t}"
        )));
    }
    let horizon = Shape::of(&fam.coeffs).horizon().max(big_y + 1);
    for y in 0..horizon {
        if let Some(s0) = (1..k).find(|&s0| fam.a(s0, y).is_zero()) {
            return Err(Error::hypothesis(format!(
                "coefficient a_{s0},{y} vanishes"
            )));
        }
    }
    let a = |i: usize| {
        if i == 0 {
            Scalar::one()
        } else {
            fam.a(i, big_y).clone()
        }
    };
    if !ratio_condition(a, s, t)? {
        return Err(Error::hypothesis(format!(
            "ratio condition fails at level {big_y} for (s, t) = ({s}, {t})"
        )));
    }
    let block = k.pow(big_y as u32);
    let order = (t + 1) * block;
    let f = infinite_product_series(fam, order + block)?;
    let mult = block_multipliers(&f, block, t + 1)?;
    let rho = mult[t].checked_div(&mult[s])?;
    let q = &Poly::one() - &Poly::monomial(rho, (t - s) * block);
    let p = f.mul_poly(&q).truncate(t * block).to_poly();
    let measured = residual_order(&f, &q, &p).lower_bound();
    if measured < order {
        return Err(Error::hypothesis(format!(
            "order {measured} is below {order} at level {big_y}"
        )));
    }
    Ok(PadePair {
        n: big_y,
        p,
        q,
        certified_order: order,
    })
}

/// The three level-`n` conditions of the degree-2 construction.
pub fn deg2_conditions(fam: &CoeffFamily, n: usize) -> Result<()> {
    if fam.k != 2 || fam.width() != 2 {
        return Err(Error::config("need k = 2 and two coefficients per level"));
    }
    let (a1n, a1n1, a2n) = (fam.a(1, n), fam.a(1, n + 1), fam.a(2, n));
    let lhs = a1n1 + a2n;
    if lhs != a1n * a1n1 {
        return Err(Error::hypothesis(format!(
            "a_1,n+1 + a_2,n != a_1,n a_1,n+1 at n = {n}"
        )));
    }
    if lhs != *a1n {
        return Err(Error::hypothesis(format!(
            "a_1,n+1 + a_2,n != a_1,n at n = {n}"
        )));
    }
    if a1n.is_one() {
        return Err(Error::hypothesis(format!("a_1,n = 1 at n = {n}")));
    }
    Ok(())
}

/// Segments `P_{n,0}, P_{n,1}, P_{n,2}`: windows `[iK, (i+1)K)` of `f`, `K = 2^n`.
pub fn deg2_segments(f: &TruncatedSeries, n: usize) -> [Poly; 3] {
    let big_k = 1usize << n;
    let poly = f.to_poly();
    [0, 1, 2].map(|i| poly.window(i * big_k, (i + 1) * big_k))
}

/// `Q = 1 − z^K`, `P = (P_0 + P_1)(1 − z^K) + P_2`, certified to order `4K`.
pub fn deg2_pair(fam: &CoeffFamily, n: usize) -> Result<PadePair> {
    fam.validate()?;
    deg2_conditions(fam, n)?;
    let big_k = 1usize << n;
    let order = 4 * big_k;
    let f = infinite_product_series(fam, order + big_k)?;
    let [p0, p1, p2] = deg2_segments(&f, n);
    let q = &Poly::one() - &Poly::monomial(Scalar::one(), big_k);
    let p = &(&(&p0 + &p1) * &q) + &p2;
    let measured = residual_order(&f, &q, &p).lower_bound();
    if measured < order {
        return Err(Error::hypothesis(format!(
            "order {measured} is below {order} at n = {n}"
        )));
    }
    Ok(PadePair {
        n,
        p,
        q,
        certified_order: order,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub order: Valuation,
    /// `μ·M` as `(numerator, denominator)`.
    pub bound: (u64, u64),
    pub passed: bool,
}

/// Whether `ord(A f − B) ≤ μ M` for `μ = mu_num / mu_den`.
pub fn measure_witness_check(
    f: &TruncatedSeries,
    a: &Poly,
    b: &Poly,
    mu: (u64, u64),
    m: usize,
) -> Result<WitnessCheck> {
    let (num, den) = mu;
    if den == 0 {
        return Err(Error::config("mu denominator must be positive"));
    }
    if a.is_zero() && b.is_zero() {
        return Err(Error::config("A and B are both zero"));
    }
    if a.degree().unwrap_or(0).max(b.degree().unwrap_or(0)) > m {
        return Err(Error::config(format!("max(deg A, deg B) exceeds M = {m}")));
    }
    let bound = num as u128 * m as u128;
    // the truncation must exceed μM so an order beyond it is visible
    let needed = (bound / den as u128 + 1) as usize;
    if f.trunc_order() < needed {
        return Err(Error::InsufficientTerms {
            needed,
            have: f.trunc_order(),
        });
    }
    let order = residual_order(f, a, b);
    let passed = match order {
        Valuation::Exact(v) => v as u128 * den as u128 <= bound,
        Valuation::AtLeast(_) => false,
    };
    Ok(WitnessCheck {
        order,
        bound: (num * m as u64, den),
        passed,
    })
}

fn rational_coeffs(p: &Poly) -> Result<Vec<BigRational>> {
    p.coeffs()
        .iter()
        .map(|c| {
            c.as_rational()
                .cloned()
                .ok_or_else(|| Error::config("real-rootedness needs rational coefficients"))
        })
        .collect()
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let nonzero: Vec<i8> = signs.filter(|&s| s != 0).collect();
    nonzero.windows(2).filter(|w| w[0] != w[1]).count()
}

fn sturm_chain(p: &Poly) -> Result<Vec<Poly>> {
    let mut chain = vec![p.clone(), p.derivative()];
    while !chain.last().expect("nonempty").is_zero() {
        let n = chain.len();
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1])?;
        chain.push(-&r);
    }
    chain.pop();
    Ok(chain)
}

/// Square-free part `p / gcd(p, p')`.
fn square_free(p: &Poly) -> Result<Poly> {
    let g = p.gcd(&p.derivative())?;
    Ok(p.div_rem(&g)?.0)
}

fn lead_sign(p: &Poly) -> i8 {
    p.leading().and_then(Scalar::rational_sign).unwrap_or(0)
}

fn check_real_input(p: &Poly) -> Result<Poly> {
    if p.is_zero() {
        return Err(Error::config("the zero polynomial has no root count"));
    }
    rational_coeffs(p)?;
    square_free(p)
}

/// True when every complex root of `p` is real.
pub fn real_rooted(p: &Poly) -> Result<bool> {
    let sf = check_real_input(p)?;
    let deg = sf.degree().unwrap_or(0);
    let chain = sturm_chain(&sf)?;
    let at_pos_inf = sign_changes(chain.iter().map(lead_sign));
    let at_neg_inf = sign_changes(chain.iter().map(|q| {
        let s = lead_sign(q);
        if q.degree().unwrap_or(0) % 2 == 1 {
            -s
        } else {
            s
        }
    }));
    Ok(at_neg_inf - at_pos_inf == deg)
}

/// True when every root of `p` is real and strictly positive.
pub fn positive_rooted(p: &Poly) -> Result<bool> {
    let sf = check_real_input(p)?;
    if sf.coeff(0).is_zero() {
        return Ok(false);
    }
    let deg = sf.degree().unwrap_or(0);
    let chain = sturm_chain(&sf)?;
    let at_zero = sign_changes(
        chain
            .iter()
            .map(|q| q.coeff(0).rational_sign().unwrap_or(0)),
    );
    let at_pos_inf = sign_changes(chain.iter().map(lead_sign));
    Ok(at_zero - at_pos_inf == deg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: &[i64]) -> TruncatedSeries {
        TruncatedSeries::new(v.iter().map(|&x| Scalar::from_int(x)).collect())
    }

    #[test]
    fn geometric_pair() {
        let f = series(&[1; 64]);
        let pair = pade_solve(&f, 1, 0, 64).unwrap().unwrap();
        assert_eq!(pair.q, Poly::from_ints(&[1, -1]));
        assert_eq!(pair.p, Poly::one());
        assert_eq!(pair.certified_order, 64);
        assert!(matches!(
            pade_solve(&f, 1, 0, 65),
            Err(Error::InsufficientTerms { .. })
        ));
    }

    #[test]
    fn root_counts() {
        assert!(real_rooted(&Poly::from_ints(&[1, 3, 1])).unwrap());
        assert!(!real_rooted(&Poly::from_ints(&[1, 1, 1])).unwrap());
        assert!(real_rooted(&Poly::from_ints(&[1, 3, 3, 1])).unwrap());
        assert!(real_rooted(&Poly::from_ints(&[5])).unwrap());
        assert!(!positive_rooted(&Poly::from_ints(&[1, 3, 1])).unwrap());
        assert!(positive_rooted(&Poly::from_ints(&[2, -3, 1])).unwrap());
        assert!(!positive_rooted(&Poly::from_ints(&[0, -1, 1])).unwrap());
        assert!(real_rooted(&Poly::new(vec![Scalar::zeta(3), Scalar::one()])).is_err());
    }

    #[test]
    fn witness_controls() {
        let geo = series(&[1; 40]);
        let rational =
            measure_witness_check(&geo, &Poly::from_ints(&[1, -1]), &Poly::one(), (4, 1), 1)
                .unwrap();
        assert!(!rational.passed);
        let trivial = measure_witness_check(&geo, &Poly::zero(), &Poly::one(), (4, 1), 1).unwrap();
        assert_eq!(trivial.order, Valuation::Exact(0));
        assert!(trivial.passed);
    }

    #[test]
    fn m_sequence() {
        let m = MSequence {
            values: vec![0, 2],
            tail_step: 2,
        };
        assert_eq!(
            (0..4).map(|n| m.get(n)).collect::<Vec<_>>(),
            vec![0, 2, 4, 6]
        );
        assert!(DNParams::new(
            Scalar::from_int(3),
            Scalar::from_int(2),
            1,
            2,
            MSequence::affine(1, 0)
        )
        .is_err());
        assert!(DNParams::new(Scalar::from_int(1), Scalar::from_int(2), 1, 2, m).is_err());
    }
}
