//! Cartier systems, polynomial-matrix products and chain Mahler equations.
//!
//! Level-`y` vector sequences obey `a_y(kn + j) = C_{j,y} · a_{y+1}(n)`; on
//! generating functions this reads `F_y(z) = A_y(z) · F_{y+1}(z^k)` with
//! `A_y(z) = Σ_j z^j C_{j,y}`. All series are computed bottom-up from
//! constant seeds at a level deep enough that `k^Y ≥ N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levels::{LevelTable, Shape};
use crate::limits;
use crate::linalg::{nullspace, PolyMatrix, ScalarMatrix};
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::seq::{SequenceSpec, SequenceView};
use crate::series::TruncatedSeries;

/// Base-`k` digits of `n`, lowest first; empty for `n = 0`.
pub fn digits(mut n: u64, k: u32) -> Vec<u32> {
    let k = k as u64;
    let mut out = Vec::new();
    while n > 0 {
        out.push((n % k) as u32);
        n /= k;
    }
    out
}

/// Smallest `Y` with `k^Y ≥ n`.
pub fn levels_for(n: usize, k: u32) -> usize {
    let mut y = 0;
    let mut p: u128 = 1;
    while p < n as u128 {
        p *= k as u128;
        y += 1;
    }
    y
}

fn check_radix(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::config(format!("radix must be at least 2, got {k}")));
    }
    Ok(())
}

/// Scalar matrices `C_{j,y}` and seed vectors `v_y = a_y(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartierSystem {
    pub k: u32,
    pub d: usize,
    /// Per level, the `k` matrices `C_{0,y}, …, C_{k-1,y}`.
    pub matrices: LevelTable<Vec<ScalarMatrix>>,
    pub seeds: LevelTable<Vec<Scalar>>,
    /// Sequence the system claims to realize, used by verification.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Box<SequenceSpec>>,
}

/// Location where a system disagrees with its target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub y: usize,
    pub j: u64,
    pub n: u64,
    pub expected: Scalar,
    pub got: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartierReport {
    pub passed: bool,
    pub e_max: usize,
    pub n_checked: u64,
    /// Level where `v_y = C_{0,y} v_{y+1}` first fails.
    pub seed_inconsistency: Option<usize>,
    pub first_mismatch: Option<Mismatch>,
}

impl CartierSystem {
    pub fn new(
        k: u32,
        matrices: LevelTable<Vec<ScalarMatrix>>,
        seeds: LevelTable<Vec<Scalar>>,
    ) -> Result<Self> {
        let d = seeds.get(0).len();
        let sys = CartierSystem {
            k,
            d,
            matrices,
            seeds,
            target: None,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn with_target(mut self, target: SequenceSpec) -> Self {
        self.target = Some(Box::new(target));
        self
    }

    pub fn shape(&self) -> Shape {
        Shape::of(&self.matrices).join(Shape::of(&self.seeds))
    }

    /// Dimensions only; seed consistency is checked by [`Self::seed_inconsistency`].
    pub fn validate_dims(&self) -> Result<()> {
        check_radix(self.k)?;
        if self.d == 0 {
            return Err(Error::config("cartier system dimension must be positive"));
        }
        for (y, mats) in self.matrices.levels().iter().enumerate() {
            if mats.len() != self.k as usize {
                return Err(Error::config(format!(
                    "level {y} has {} matrices, expected k = {}",
                    mats.len(),
                    self.k
                )));
            }
            if let Some(m) = mats
                .iter()
                .find(|m| m.rows() != self.d || m.cols() != self.d)
            {
                return Err(Error::config(format!(
                    "level {y} has a {}x{} matrix, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    self.d,
                    self.d
                )));
            }
        }
        if let Some((y, v)) = self
            .seeds
            .levels()
            .iter()
            .enumerate()
            .find(|(_, v)| v.len() != self.d)
        {
            return Err(Error::config(format!(
                "seed at level {y} has length {}, expected {}",
                v.len(),
                self.d
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_dims()?;
        if let Some(y) = self.seed_inconsistency()? {
            return Err(Error::hypothesis(format!(
                "seed vectors violate v_y = C_0,y v_y+1 at level {y}"
            )));
        }
        Ok(())
    }

    /// First level where `v_y ≠ C_{0,y} v_{y+1}`, over a full period horizon.
    pub fn seed_inconsistency(&self) -> Result<Option<usize>> {
        for y in 0..self.shape().horizon() {
            if self.matrix(0, y).mul_vec(self.seeds.get(y + 1))? != *self.seeds.get(y) {
                return Ok(Some(y));
            }
        }
        Ok(None)
    }

    pub fn matrix(&self, j: u32, y: usize) -> &ScalarMatrix {
        &self.matrices.get(y)[j as usize]
    }

    /// `a_y(n) = C_{j_1,y} C_{j_2,y+1} ⋯ C_{j_e,y+e-1} v_{y+e}` for the digits of `n`.
    pub fn level_vector(&self, y: usize, n: u64) -> Result<Vec<Scalar>> {
        let ds = digits(n, self.k);
        let mut w = self.seeds.get(y + ds.len()).clone();
        for (i, &j) in ds.iter().enumerate().rev() {
            w = self.matrix(j, y + i).mul_vec(&w)?;
        }
        Ok(w)
    }

    /// `a(n)`: first coordinate of the level-0 vector.
    pub fn eval(&self, n: u64) -> Result<Scalar> {
        Ok(self.level_vector(0, n)?.swap_remove(0))
    }

    /// Boundary map `B_{j,y} = C_{j_1,0} ⋯ C_{j_y,y-1}` along the digits of `j < k^y`.
    pub fn boundary(&self, j: u64, y: usize) -> Result<ScalarMatrix> {
        let mut b = ScalarMatrix::identity(self.d);
        let mut rest = j;
        for lvl in 0..y {
            let digit = (rest % self.k as u64) as u32;
            rest /= self.k as u64;
            b = b.mul(self.matrix(digit, lvl))?;
        }
        Ok(b)
    }

    /// All boundary maps at level `y`, indexed by `j`.
    pub fn boundaries(&self, y: usize) -> Result<Vec<ScalarMatrix>> {
        let mut out = vec![ScalarMatrix::identity(self.d)];
        for lvl in 0..y {
            let mut next = Vec::with_capacity(out.len() * self.k as usize);
            for digit in 0..self.k {
                for b in &out {
                    next.push(b.mul(self.matrix(digit, lvl))?);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// `A_y(z) = Σ_j z^j C_{j,y}`.
    pub fn cartier_to_matrix(&self, y: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(self.d, self.d);
        for r in 0..self.d {
            for c in 0..self.d {
                let coeffs = (0..self.k)
                    .map(|j| self.matrix(j, y).get(r, c).clone())
                    .collect();
                m.set(r, c, Poly::new(coeffs));
            }
        }
        m.with_degree_bound(self.k as usize - 1)
            .expect("entries have degree below k")
    }

    /// The equivalent infinite-product description.
    pub fn to_matrix_product(&self) -> MatrixProductSpec {
        let matrices = self
            .shape()
            .tabulate::<_, Error>(|y| Ok(self.cartier_to_matrix(y)))
            .expect("infallible");
        MatrixProductSpec {
            k: self.k,
            d: self.d,
            matrices,
            seeds: self.seeds.clone(),
            output: 0,
        }
    }
}

/// Checks the system against `target`: for `y < e_max`, `j < k^y`, `n < n_max`,
/// the first coordinate of `B_{j,y} a_y(n)` must equal `target(k^y n + j)`.
pub fn verify_cartier(
    sys: &CartierSystem,
    target: &SequenceSpec,
    e_max: usize,
    n_max: u64,
) -> Result<CartierReport> {
    sys.validate_dims()?;
    let view = SequenceView::new(target)?;
    let mut report = CartierReport {
        passed: true,
        e_max,
        n_checked: n_max,
        seed_inconsistency: sys.seed_inconsistency()?,
        first_mismatch: None,
    };
    if report.seed_inconsistency.is_some() {
        report.passed = false;
    }
    let k = sys.k as u64;
    let mut rows: Vec<Vec<Scalar>> = vec![unit(sys.d, 0)];
    for y in 0..e_max {
        let scale = k.pow(y as u32);
        let vectors = (0..n_max)
            .map(|n| sys.level_vector(y, n))
            .collect::<Result<Vec<_>>>()?;
        for n in 0..n_max {
            for (j, row) in rows.iter().enumerate() {
                let got = dot(row, &vectors[n as usize]);
                let expected = view.eval(scale * n + j as u64)?;
                if got != expected {
                    report.passed = false;
                    report.first_mismatch = Some(Mismatch {
                        y,
                        j: j as u64,
                        n,
                        expected,
                        got,
                    });
                    return Ok(report);
                }
            }
        }
        let mut next = Vec::with_capacity(rows.len() * k as usize);
        for digit in 0..sys.k {
            let c = sys.matrix(digit, y);
            for row in &rows {
                next.push(row_times(row, c));
            }
        }
        rows = next;
    }
    Ok(report)
}

fn unit(d: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); d];
    v[i] = Scalar::one();
    v
}

fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

fn row_times(row: &[Scalar], m: &ScalarMatrix) -> Vec<Scalar> {
    (0..m.cols())
        .map(|c| {
            (0..m.rows())
                .filter(|&r| !row[r].is_zero())
                .map(|r| &row[r] * m.get(r, c))
                .sum()
        })
        .collect()
}

/// Infinite product `F_0(z) = A_0(z) A_1(z^k) A_2(z^{k^2}) ⋯ v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixProductSpec {
    pub k: u32,
    pub d: usize,
    pub matrices: LevelTable<PolyMatrix>,
    /// Per level, `F_y(0)`.
    pub seeds: LevelTable<Vec<Scalar>>,
    /// Component of `F_0` holding the sequence.
    #[serde(default)]
    pub output: usize,
}

impl MatrixProductSpec {
    pub fn shape(&self) -> Shape {
        Shape::of(&self.matrices).join(Shape::of(&self.seeds))
    }

    pub fn validate(&self) -> Result<()> {
        check_radix(self.k)?;
        if self.output >= self.d {
            return Err(Error::config(format!(
                "output row {} out of range for dimension {}",
                self.output, self.d
            )));
        }
        for (y, m) in self.matrices.levels().iter().enumerate() {
            if m.rows() != self.d || m.cols() != self.d {
                return Err(Error::config(format!(
                    "matrix at level {y} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    self.d,
                    self.d
                )));
            }
            if let Some(deg) = m.max_degree().filter(|&g| g >= self.k as usize) {
                return Err(Error::config(format!(
                    "matrix at level {y} has degree {deg}, bound is k-1 = {}",
                    self.k - 1
                )));
            }
        }
        if let Some((y, v)) = self
            .seeds
            .levels()
            .iter()
            .enumerate()
            .find(|(_, v)| v.len() != self.d)
        {
            return Err(Error::config(format!(
                "seed at level {y} has length {}, expected {}",
                v.len(),
                self.d
            )));
        }
        for y in 0..self.shape().horizon() {
            let at_zero = self.constant_matrix(y);
            if at_zero.mul_vec(self.seeds.get(y + 1))? != *self.seeds.get(y) {
                return Err(Error::hypothesis(format!(
                    "seed constants violate F_y(0) = A_y(0) F_y+1(0) at level {y}"
                )));
            }
        }
        Ok(())
    }

    fn constant_matrix(&self, y: usize) -> ScalarMatrix {
        let m = self.matrices.get(y);
        let rows = (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| m.get(r, c).coeff(0)).collect())
            .collect();
        ScalarMatrix::from_rows(rows).expect("rectangular")
    }

    /// All components of `F_{y0}` to order `n`.
    pub fn level_series(&self, y0: usize, n: usize) -> Result<Vec<TruncatedSeries>> {
        self.level_series_deep(y0, n, 0)
    }

    /// As [`Self::level_series`], starting `extra` levels deeper than needed.
    pub fn level_series_deep(
        &self,
        y0: usize,
        n: usize,
        extra: usize,
    ) -> Result<Vec<TruncatedSeries>> {
        limits::check_coeffs(n)?;
        let k = self.k as usize;
        let top = levels_for(n, self.k) + extra;
        // M_y = ceil(n / k^(y - y0)) coefficients are needed at level y
        let mut need = vec![n; top + 1];
        for i in 1..=top {
            need[i] = need[i - 1].div_ceil(k);
        }
        let mut f: Vec<TruncatedSeries> = self
            .seeds
            .get(y0 + top)
            .iter()
            .map(|c| TruncatedSeries::constant(c.clone(), need[top].max(1)))
            .collect();
        for i in (0..top).rev() {
            let lifted: Vec<TruncatedSeries> = f
                .iter()
                .map(|s| s.substitute_power_to(k, need[i]))
                .collect();
            f = self.matrices.get(y0 + i).apply(&lifted)?;
        }
        Ok(f.into_iter().map(|s| s.truncate(n)).collect())
    }

    /// The equivalent Cartier system, `C_{j,y}` being the `z^j` coefficient
    /// of `A_y(z)`. Coordinates are permuted so the output comes first.
    pub fn to_cartier(&self) -> Result<CartierSystem> {
        self.validate()?;
        let perm = |i: usize| {
            if i == 0 {
                self.output
            } else if i == self.output {
                0
            } else {
                i
            }
        };
        let matrices = self.shape().tabulate(|y| -> Result<Vec<ScalarMatrix>> {
            let a = self.matrices.get(y);
            (0..self.k as usize)
                .map(|j| {
                    let rows = (0..self.d)
                        .map(|r| {
                            (0..self.d)
                                .map(|c| a.get(perm(r), perm(c)).coeff(j))
                                .collect()
                        })
                        .collect();
                    Ok(ScalarMatrix::from_rows(rows)?)
                })
                .collect()
        })?;
        let seeds = self
            .seeds
            .map(|v| (0..self.d).map(|i| v[perm(i)].clone()).collect());
        CartierSystem::new(self.k, matrices, seeds)
    }

    /// First `n` coefficients of the output component of `F_0`.
    pub fn product_coeffs(&self, n: usize) -> Result<TruncatedSeries> {
        if n == 0 {
            return Ok(TruncatedSeries::zero(0));
        }
        Ok(self.level_series(0, n)?.swap_remove(self.output))
    }
}

/// A quotient of polynomials. Written in JSON as a coefficient list or
/// as `{"num": [...], "den": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "RawRational")]
pub struct RationalFunction {
    pub num: Poly,
    pub den: Poly,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRational {
    Poly(Poly),
    Quotient {
        num: Poly,
        #[serde(default = "Poly::one")]
        den: Poly,
    },
}

impl From<RawRational> for RationalFunction {
    fn from(r: RawRational) -> Self {
        match r {
            RawRational::Poly(num) => RationalFunction {
                num,
                den: Poly::one(),
            },
            RawRational::Quotient { num, den } => RationalFunction { num, den },
        }
    }
}

impl From<Poly> for RationalFunction {
    fn from(num: Poly) -> Self {
        RationalFunction {
            num,
            den: Poly::one(),
        }
    }
}

impl RationalFunction {
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// The polynomial value when the denominator is constant.
    pub fn as_poly(&self) -> Option<Poly> {
        let d = self.den.coeffs().first()?.inv().ok()?;
        self.is_polynomial().then(|| self.num.scale(&d))
    }
}

/// One level of `a_0 f_y + Σ_{i=1}^d a_i f_{y+i}(z^{k^i}) = b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLevel {
    pub a: Vec<RationalFunction>,
    #[serde(default = "zero_rational")]
    pub b: RationalFunction,
}

fn zero_rational() -> RationalFunction {
    Poly::zero().into()
}

impl ChainLevel {
    pub fn homogeneous(a: Vec<Poly>) -> Self {
        ChainLevel {
            a: a.into_iter().map(Into::into).collect(),
            b: zero_rational(),
        }
    }
}

/// A chain Mahler system: unknowns `f_y`, one equation per level.
///
/// Coefficient `a_{y,i}` multiplies `f_{y+i}(z^{k^i})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainMahlerSpec {
    pub k: u32,
    pub depth: usize,
    pub levels: LevelTable<ChainLevel>,
    /// `f_y(0)` per level.
    pub constants: LevelTable<Scalar>,
}

impl ChainMahlerSpec {
    pub fn shape(&self) -> Shape {
        Shape::of(&self.levels).join(Shape::of(&self.constants))
    }

    pub fn validate(&self) -> Result<()> {
        check_radix(self.k)?;
        if self.depth == 0 {
            return Err(Error::config("chain depth must be positive"));
        }
        for (y, lvl) in self.levels.levels().iter().enumerate() {
            if lvl.a.len() != self.depth + 1 {
                return Err(Error::config(format!(
                    "level {y} lists {} coefficients, expected depth + 1 = {}",
                    lvl.a.len(),
                    self.depth + 1
                )));
            }
            if lvl.a.iter().chain([&lvl.b]).any(|r| r.den.is_zero()) {
                return Err(Error::config(format!("level {y} has a zero denominator")));
            }
            if lvl.a[0].is_zero() {
                return Err(Error::config(format!("a_0 vanishes at level {y}")));
            }
        }
        Ok(())
    }

    /// Power-series expansions `(b/a_0, a_1/a_0, …, a_d/a_0)` at level `y`.
    fn normalized(&self, y: usize, n: usize) -> Result<(TruncatedSeries, Vec<TruncatedSeries>)> {
        let lvl = self.levels.get(y);
        let a0 = &lvl.a[0];
        let ratio = |r: &RationalFunction, what: String| -> Result<TruncatedSeries> {
            let num = &r.num * &a0.den;
            let den = &r.den * &a0.num;
            TruncatedSeries::from_rational(&num, &den, n)?.ok_or_else(|| {
                Error::hypothesis(format!("{what} is not a power series at level {y}"))
            })
        };
        let rb = ratio(&lvl.b, "b/a_0".into())?;
        let ri = (1..=self.depth)
            .map(|i| ratio(&lvl.a[i], format!("a_{i}/a_0")))
            .collect::<Result<_>>()?;
        Ok((rb, ri))
    }

    /// `f_{y0}` to order `n`, with constant terms checked against the declared `f_y(0)`.
    pub fn level_solution(&self, y0: usize, n: usize) -> Result<TruncatedSeries> {
        self.validate()?;
        limits::check_coeffs(n)?;
        let k = self.k as usize;
        let top = levels_for(n, self.k).max(1);
        let horizon = top.max(self.shape().horizon());
        let mut need = vec![n; horizon + self.depth + 1];
        for i in 1..need.len() {
            need[i] = need[i - 1].div_ceil(k).max(1);
        }
        // sol[i] holds f_{y0+i}; levels at or beyond `horizon` are constants
        let mut sol: Vec<Option<TruncatedSeries>> = vec![None; horizon + self.depth + 1];
        for (i, slot) in sol.iter_mut().enumerate().skip(horizon) {
            *slot = Some(TruncatedSeries::constant(
                self.constants.get(y0 + i).clone(),
                need[i],
            ));
        }
        for i in (0..horizon).rev() {
            let m = need[i];
            let (rb, ri) = self.normalized(y0 + i, m)?;
            let mut f = rb;
            let mut pw = 1usize;
            for (t, r) in ri.iter().enumerate() {
                pw *= k;
                if r.coeffs().iter().all(Scalar::is_zero) {
                    continue;
                }
                let g = sol[i + t + 1]
                    .as_ref()
                    .expect("deeper level solved")
                    .substitute_power_to(pw, m);
                f = f.sub(&r.mul(&g));
            }
            let declared = self.constants.get(y0 + i);
            if f.coeff(0) != Some(declared) {
                return Err(Error::hypothesis(format!(
                    "constant term at level {} is {}, declared f_y(0) = {}",
                    y0 + i,
                    f.coeff(0).cloned().unwrap_or_default(),
                    declared
                )));
            }
            sol[i] = Some(f);
        }
        Ok(sol.swap_remove(0).expect("level 0 solved").truncate(n))
    }

    /// Largest degree among the polynomial coefficients `a_1, …, a_d`;
    /// `None` if some coefficient is a proper rational function.
    pub fn coeff_degree(&self) -> Option<usize> {
        let mut deg = 0;
        for lvl in self.levels.levels() {
            for a in lvl.a.iter().skip(1) {
                deg = deg.max(a.as_poly()?.degree().unwrap_or(0));
            }
        }
        Some(deg)
    }

    /// Coefficients of `f_0` to order `n`.
    pub fn chain_solve(&self, n: usize) -> Result<TruncatedSeries> {
        self.level_solution(0, n)
    }
}

/// Which of the two matrices of the 2×2 chain example is used at a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mi3Choice {
    /// `[[1+z, 0], [1-z, 0]]`
    First,
    /// `[[1, z], [1, -z]]`
    Second,
}

impl Mi3Choice {
    pub fn matrix(self) -> PolyMatrix {
        let p = Poly::from_ints;
        let rows = match self {
            Mi3Choice::First => vec![vec![p(&[1, 1]), p(&[])], vec![p(&[1, -1]), p(&[])]],
            Mi3Choice::Second => vec![vec![p(&[1]), p(&[0, 1])], vec![p(&[1]), p(&[0, -1])]],
        };
        PolyMatrix::from_rows(rows).expect("2x2")
    }
}

/// Which case of the coefficient table applies at a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mi3Case {
    /// Current level uses the first matrix.
    FirstMatrix,
    /// Second matrix followed by the second matrix.
    SecondSecond,
    /// Second matrix followed by the first matrix.
    SecondFirst,
}

impl Mi3Case {
    pub const ALL: [Mi3Case; 3] = [
        Mi3Case::FirstMatrix,
        Mi3Case::SecondSecond,
        Mi3Case::SecondFirst,
    ];

    pub fn at(choices: &LevelTable<Mi3Choice>, y: usize) -> Mi3Case {
        match (choices.get(y), choices.get(y + 1)) {
            (Mi3Choice::First, _) => Mi3Case::FirstMatrix,
            (Mi3Choice::Second, Mi3Choice::Second) => Mi3Case::SecondSecond,
            (Mi3Choice::Second, Mi3Choice::First) => Mi3Case::SecondFirst,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Coefficient pairs `(a_{y,1}, a_{y,2})` per case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mi3Table {
    pub first_matrix: (Poly, Poly),
    pub second_second: (Poly, Poly),
    pub second_first: (Poly, Poly),
}

impl Mi3Table {
    /// `(1+z, 0)`, `(z-1, 2z)`, `(-1, z^3-z)`.
    pub fn published() -> Self {
        let p = Poly::from_ints;
        Mi3Table {
            first_matrix: (p(&[1, 1]), p(&[])),
            second_second: (p(&[-1, 1]), p(&[0, 2])),
            second_first: (p(&[-1]), p(&[0, -1, 0, 1])),
        }
    }

    pub fn get(&self, case: Mi3Case) -> &(Poly, Poly) {
        match case {
            Mi3Case::FirstMatrix => &self.first_matrix,
            Mi3Case::SecondSecond => &self.second_second,
            Mi3Case::SecondFirst => &self.second_first,
        }
    }
}

/// The 2×2 product with seeds `(1, 1)` at every level.
pub fn mi3_product(choices: &LevelTable<Mi3Choice>) -> MatrixProductSpec {
    MatrixProductSpec {
        k: 2,
        d: 2,
        matrices: choices.map(|c| c.matrix()),
        seeds: LevelTable::constant(vec![Scalar::one(), Scalar::one()]),
        output: 0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mi3Level {
    pub y: usize,
    pub case: Mi3Case,
    pub passed: bool,
}

/// Sign pattern `(s1, s2)` in `f_y = s1·a_1·f_{y+1}(z^2) + s2·a_2·f_{y+2}(z^4)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mi3Convention {
    pub case: Mi3Case,
    pub signs: Option<(i8, i8)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mi3Report {
    pub passed: bool,
    pub order: usize,
    pub conventions: Vec<Mi3Convention>,
    pub levels: Vec<Mi3Level>,
}

const SIGNS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Builds `f_y` from the 2×2 product and checks the chain relation of the
/// table at every level of a full period, to order `n`.
///
/// The table does not fix how its entries enter the equation, so for each
/// case the sign pattern `(s1, s2)` holding at every level of that case is
/// searched for and reported.
pub fn mi3_chain_verify(
    choices: &LevelTable<Mi3Choice>,
    n: usize,
    table: &Mi3Table,
) -> Result<Mi3Report> {
    let prod = mi3_product(choices);
    let shape = Shape::of(choices);
    let count = shape.horizon() + 2;
    let fs: Vec<TruncatedSeries> = (0..count + 2)
        .map(|y| Ok(prod.level_series(y, n)?.swap_remove(0)))
        .collect::<Result<_>>()?;
    let holds = |y: usize, case: Mi3Case, (s1, s2): (i8, i8)| -> bool {
        let (a1, a2) = table.get(case);
        let t1 = fs[y + 1]
            .substitute_power_to(2, n)
            .mul_poly(&a1.scale(&Scalar::from_int(s1 as i64)));
        let t2 = fs[y + 2]
            .substitute_power_to(4, n)
            .mul_poly(&a2.scale(&Scalar::from_int(s2 as i64)));
        fs[y] == t1.add(&t2)
    };
    let cases: Vec<(usize, Mi3Case)> = (0..count).map(|y| (y, Mi3Case::at(choices, y))).collect();
    let mut conventions: Vec<Mi3Convention> = Mi3Case::ALL
        .iter()
        .map(|&case| Mi3Convention { case, signs: None })
        .collect();
    for conv in conventions.iter_mut() {
        let ys: Vec<usize> = cases
            .iter()
            .filter(|(_, c)| *c == conv.case)
            .map(|(y, _)| *y)
            .collect();
        if ys.is_empty() {
            continue;
        }
        conv.signs = SIGNS
            .iter()
            .copied()
            .find(|&s| ys.iter().all(|&y| holds(y, conv.case, s)));
    }
    let levels: Vec<Mi3Level> = cases
        .iter()
        .map(|&(y, case)| {
            let passed = conventions[case.index()]
                .signs
                .is_some_and(|s| holds(y, case, s));
            Mi3Level { y, case, passed }
        })
        .collect();
    let passed = levels.iter().all(|l| l.passed);
    Ok(Mi3Report {
        passed,
        order: n,
        conventions,
        levels,
    })
}

/// Largest `s` with `ks ≤ s + L ≤ ks + k - 1`.
pub fn becker_block_size(k: u32, l: usize) -> usize {
    l / (k as usize - 1)
}

/// Rewrites `f_y = Σ_{i=1}^d c_{y,i}(z) f_{y+i}(z^{k^i})` with polynomial
/// `c_{y,i}` of degree at most `l` as an infinite matrix product.
///
/// Component `(i, j)`, stored at index `i(s+1) + j`, is `z^j f_{y+i}(z^{k^i})`
/// for `0 ≤ i < d`, `0 ≤ j ≤ s`; the output is component `(0, 0)`.
pub fn becker_lift(chain: &ChainMahlerSpec, l: usize) -> Result<MatrixProductSpec> {
    chain.validate()?;
    let k = chain.k as usize;
    let d = chain.depth;
    let s = becker_block_size(chain.k, l);
    let dim = d * (s + 1);
    let idx = |i: usize, j: usize| i * (s + 1) + j;
    let shape = chain.shape();
    let matrices = shape.tabulate(|y| -> Result<PolyMatrix> {
        let lvl = chain.levels.get(y);
        if !lvl.b.is_zero() {
            return Err(Error::config(format!(
                "lift needs a homogeneous equation; b is nonzero at level {y}"
            )));
        }
        let a0 = lvl.a[0].as_poly().filter(|p| *p == Poly::one());
        if a0.is_none() {
            return Err(Error::config(format!("lift needs a_0 = 1 at level {y}")));
        }
        let mut m = PolyMatrix::zeros(dim, dim);
        for (i2, coeff) in lvl.a.iter().enumerate().skip(1) {
            let c = coeff
                .as_poly()
                .ok_or_else(|| Error::config(format!("a_{i2} at level {y} is not a polynomial")))?;
            if c.degree().is_some_and(|g| g > l) {
                return Err(Error::config(format!(
                    "a_{i2} at level {y} has degree above the bound {l}"
                )));
            }
            // f_y = Σ c f_{y+i}(z^{k^i}) with c = -a_i since a_0 = 1
            let c = -&c;
            for j in 0..=s {
                for (m_exp, gamma) in c.shift(j).coeffs().iter().enumerate() {
                    if gamma.is_zero() {
                        continue;
                    }
                    let (t, r) = (m_exp / k, m_exp % k);
                    let (row, col) = (idx(0, j), idx(i2 - 1, t));
                    let entry = m.get(row, col) + &Poly::monomial(gamma.clone(), r);
                    m.set(row, col, entry);
                }
            }
        }
        for i in 1..d {
            for j in 0..=s {
                m.set(
                    idx(i, j),
                    idx(i - 1, j / k),
                    Poly::monomial(Scalar::one(), j % k),
                );
            }
        }
        m.with_degree_bound(k - 1)
            .map_err(|g| Error::config(format!("lift entry degree {g} exceeds k-1 at level {y}")))
    })?;
    let seeds = shape.tabulate::<_, Error>(|y| {
        let mut v = vec![Scalar::zero(); dim];
        for i in 0..d {
            v[idx(i, 0)] = chain.constants.get(y + i).clone();
        }
        Ok(v)
    })?;
    let spec = MatrixProductSpec {
        k: chain.k,
        d: dim,
        matrices,
        seeds,
        output: 0,
    };
    spec.validate()?;
    Ok(spec)
}

/// A candidate linear relation `Σ_t c_t(z) g_t(z^{e_t}) ≡ 0 mod z^order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub coeffs: Vec<Poly>,
    /// The relation is certified only modulo `z^order`.
    pub order: usize,
}

/// Safety margin of extra equations over unknowns.
pub const RELATION_MARGIN: usize = 8;

/// Searches for polynomials `c_t` of degree at most `degree` with
/// `Σ_t c_t(z) g_t(z^{e_t}) ≡ 0` to the common known order.
pub fn find_relation(
    family: &[(TruncatedSeries, usize)],
    degree: usize,
) -> Result<Option<Relation>> {
    if family.iter().any(|(_, e)| *e == 0) {
        return Err(Error::config("substitution powers must be positive"));
    }
    let order = family
        .iter()
        .map(|(g, e)| g.trunc_order().saturating_mul(*e))
        .min()
        .unwrap_or(0);
    let unknowns = (degree + 1) * family.len();
    let needed = unknowns + RELATION_MARGIN;
    if order < needed {
        return Err(Error::InsufficientTerms {
            needed,
            have: order,
        });
    }
    let cols: Vec<TruncatedSeries> = family
        .iter()
        .map(|(g, e)| g.substitute_power_to(*e, order))
        .collect();
    let rows: Vec<Vec<Scalar>> = (0..order)
        .map(|n| {
            cols.iter()
                .flat_map(|g| {
                    (0..=degree).map(move |r| {
                        if r <= n {
                            g.coeffs()[n - r].clone()
                        } else {
                            Scalar::zero()
                        }
                    })
                })
                .collect()
        })
        .collect();
    let Some(v) = nullspace(&rows, unknowns).into_iter().next() else {
        return Ok(None);
    };
    let lead = v
        .iter()
        .find(|x| !x.is_zero())
        .expect("nonzero basis vector")
        .inv()?;
    let coeffs = v
        .chunks(degree + 1)
        .map(|c| Poly::new(c.to_vec()).scale(&lead))
        .collect();
    Ok(Some(Relation { coeffs, order }))
}

/// Recomputes `Σ_t c_t g_t(z^{e_t})` and checks it vanishes to `rel.order`.
pub fn relation_holds(family: &[(TruncatedSeries, usize)], rel: &Relation) -> bool {
    let mut acc = TruncatedSeries::zero(rel.order);
    for ((g, e), c) in family.iter().zip(&rel.coeffs) {
        acc = acc.add(&g.substitute_power_to(*e, rel.order).mul_poly(c));
    }
    acc.trunc_order() == rel.order && acc.coeffs().iter().all(Scalar::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn tm_system() -> CartierSystem {
        CartierSystem::new(
            2,
            LevelTable::constant(vec![
                ScalarMatrix::from_ints(&[&[1]]),
                ScalarMatrix::from_ints(&[&[-1]]),
            ]),
            LevelTable::constant(vec![s(1)]),
        )
        .unwrap()
    }

    #[test]
    fn digits_low_first() {
        assert_eq!(digits(6, 2), vec![0, 1, 1]);
        assert!(digits(0, 3).is_empty());
        assert_eq!(levels_for(4, 2), 2);
        assert_eq!(levels_for(5, 2), 3);
        assert_eq!(levels_for(1, 2), 0);
    }

    #[test]
    fn tm_matrix_is_one_minus_z() {
        let m = tm_system().cartier_to_matrix(0);
        assert_eq!(*m.get(0, 0), Poly::from_ints(&[1, -1]));
        let ident = CartierSystem::new(
            2,
            LevelTable::constant(vec![ScalarMatrix::identity(2), ScalarMatrix::identity(2)]),
            LevelTable::constant(vec![s(1), s(0)]),
        )
        .unwrap();
        let m = ident.cartier_to_matrix(3);
        assert_eq!(*m.get(0, 0), Poly::from_ints(&[1, 1]));
        assert!(m.get(0, 1).is_zero());
    }

    #[test]
    fn tm_values() {
        let sys = tm_system();
        let vals: Vec<i64> = (0..8)
            .map(|n| sys.eval(n).unwrap().to_i64().unwrap())
            .collect();
        assert_eq!(vals, vec![1, -1, -1, 1, -1, 1, 1, -1]);
    }

    #[test]
    fn trivial_product() {
        let spec = MatrixProductSpec {
            k: 2,
            d: 1,
            matrices: LevelTable::constant(PolyMatrix::identity(1)),
            seeds: LevelTable::constant(vec![s(1)]),
            output: 0,
        };
        assert_eq!(
            spec.product_coeffs(5).unwrap(),
            TruncatedSeries::constant(s(1), 5)
        );
    }

    #[test]
    fn constant_chain_solution() {
        let chain = ChainMahlerSpec {
            k: 2,
            depth: 1,
            levels: LevelTable::constant(ChainLevel::homogeneous(vec![
                Poly::one(),
                Poly::from_ints(&[-1]),
            ])),
            constants: LevelTable::constant(s(1)),
        };
        assert_eq!(
            chain.chain_solve(9).unwrap(),
            TruncatedSeries::constant(s(1), 9)
        );
    }

    #[test]
    fn inconsistent_constant_is_reported() {
        let chain = ChainMahlerSpec {
            k: 2,
            depth: 2,
            levels: LevelTable::constant(ChainLevel::homogeneous(vec![
                Poly::one(),
                Poly::from_ints(&[1, 1]),
                Poly::zero(),
            ])),
            constants: LevelTable::constant(s(1)),
        };
        let err = chain.chain_solve(16).unwrap_err();
        assert!(
            matches!(err, Error::Hypothesis(ref m) if m.contains("level")),
            "{err}"
        );
    }

    #[test]
    fn block_sizes() {
        assert_eq!(becker_block_size(2, 1), 1);
        assert_eq!(becker_block_size(2, 3), 3);
        assert_eq!(becker_block_size(2, 0), 0);
        assert_eq!(becker_block_size(3, 5), 2);
    }
}
