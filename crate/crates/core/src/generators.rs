//! Concrete sequence families: recursive words, digit-pattern sequences,
//! infinite products and sums, and the Ooto sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levels::{LevelTable, Shape, Tail};
use crate::limits;
use crate::linalg::ScalarMatrix;
use crate::matrix::{digits, CartierSystem};
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::seq::SequenceSpec;
use crate::series::TruncatedSeries;

pub use crate::seq::bar_transform;

/// Source block and multiplier of one piece of a recursive-word rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordRule(pub usize, pub Scalar);

/// `d` words per level; slot `s` at level `n+1` concatenates
/// `f · A_{n,i}` for its `k` rules `(i, f)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursiveWordSpec {
    pub k: u32,
    pub d: usize,
    pub seeds: Vec<Scalar>,
    /// Per level: `d` slots, each with `k` rules.
    pub rules: LevelTable<Vec<Vec<WordRule>>>,
}

impl RecursiveWordSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::config("radix must be at least 2"));
        }
        if self.d == 0 || self.seeds.len() != self.d {
            return Err(Error::config(format!(
                "need {} seeds, got {}",
                self.d,
                self.seeds.len()
            )));
        }
        for (n, slots) in self.rules.levels().iter().enumerate() {
            if slots.len() != self.d {
                return Err(Error::config(format!(
                    "level {n} has {} slots, expected {}",
                    slots.len(),
                    self.d
                )));
            }
            for (s, rules) in slots.iter().enumerate() {
                if rules.len() != self.k as usize {
                    return Err(Error::config(format!(
                        "level {n} slot {s} has {} rules, expected k",
                        rules.len()
                    )));
                }
                if let Some(r) = rules.iter().find(|r| r.0 >= self.d) {
                    return Err(Error::config(format!(
                        "level {n} slot {s} refers to block {}",
                        r.0
                    )));
                }
            }
            let first = &slots[0][0];
            if first.0 != 0 || !first.1.is_one() {
                return Err(Error::config(format!(
                    "slot 0 must start with its own block at level {n}"
                )));
            }
        }
        Ok(())
    }

    /// The `d` words of length `k^n`.
    pub fn expand(&self, n: u32) -> Result<Vec<Vec<Scalar>>> {
        self.validate()?;
        let len = (self.k as u128).checked_pow(n).unwrap_or(u128::MAX);
        limits::check_coeffs(usize::try_from(len).unwrap_or(usize::MAX))?;
        let mut words: Vec<Vec<Scalar>> = self.seeds.iter().map(|c| vec![c.clone()]).collect();
        for lvl in 0..n as usize {
            let slots = self.rules.get(lvl);
            words = slots
                .iter()
                .map(|rules| {
                    rules
                        .iter()
                        .flat_map(|WordRule(i, f)| words[*i].iter().map(move |x| x * f))
                        .collect()
                })
                .collect();
        }
        Ok(words)
    }

    /// Symbol `n` of the limit word, read top digit first.
    pub fn eval(&self, n: u64) -> Result<Scalar> {
        let ds = digits(n, self.k);
        let mut slot = 0;
        let mut mult = Scalar::one();
        for lvl in (0..ds.len()).rev() {
            let WordRule(i, f) = &self.rules.get(lvl)[slot][ds[lvl] as usize];
            mult = mult.checked_mul(f)?;
            slot = *i;
        }
        Ok(mult.checked_mul(&self.seeds[slot])?)
    }

    /// `M_{j,y}[s][i] = f` when rule `j` of slot `s` at level `y` is `(i, f)`.
    fn rule_matrix(&self, j: u32, y: usize) -> ScalarMatrix {
        let mut m = ScalarMatrix::zeros(self.d, self.d);
        for (s, rules) in self.rules.get(y).iter().enumerate() {
            let WordRule(i, f) = &rules[j as usize];
            let cur = m.get(s, *i).clone();
            m.set(s, *i, &cur + f);
        }
        m
    }

    /// An equivalent Cartier system.
    ///
    /// The word is `e_0ᵀ M_{top} ⋯ M_{low} · seeds`; transposing gives a
    /// product read from the low digit, and a change of basis `P` with first
    /// row `seeds` turns the output functional into the first coordinate.
    pub fn to_cartier(&self) -> Result<CartierSystem> {
        self.validate()?;
        let d = self.d;
        let pivot = self.seeds.iter().position(|c| !c.is_zero());
        let (p, p_inv, v) = match pivot {
            None => (
                ScalarMatrix::identity(d),
                ScalarMatrix::identity(d),
                vec![Scalar::zero(); d],
            ),
            Some(piv) => {
                let mut p = ScalarMatrix::identity(d);
                if piv != 0 {
                    p.set(piv, piv, Scalar::zero());
                    p.set(piv, 0, Scalar::one());
                    p.set(0, 0, Scalar::zero());
                }
                for (i, c) in self.seeds.iter().enumerate() {
                    p.set(0, i, c.clone());
                }
                let p_inv = p.inverse().expect("basis change is invertible");
                let v = (0..d).map(|r| p.get(r, 0).clone()).collect();
                (p, p_inv, v)
            }
        };
        let matrices = Shape::of(&self.rules).tabulate(|y| -> Result<Vec<ScalarMatrix>> {
            (0..self.k)
                .map(|j| Ok(p.mul(&self.rule_matrix(j, y).transpose())?.mul(&p_inv)?))
                .collect()
        })?;
        CartierSystem::new(self.k, matrices, LevelTable::constant(v))
    }
}

/// `±1` Thue–Morse word: each block followed by its negation.
pub fn thue_morse_word() -> RecursiveWordSpec {
    let one = Scalar::one();
    RecursiveWordSpec {
        k: 2,
        d: 1,
        seeds: vec![one.clone()],
        rules: LevelTable::constant(vec![vec![WordRule(0, one.clone()), WordRule(0, -&one)]]),
    }
}

/// `A_{n+1} = A_n B_n`, `B_{n+1} = B_n f_n(A_n)` with `A_0 = B_0 = 1`.
pub fn ex35_spec(signs: &LevelTable<Scalar>) -> Result<RecursiveWordSpec> {
    if let Some(bad) = signs
        .levels()
        .iter()
        .find(|f| !f.is_one() && !(-*f).is_one())
    {
        return Err(Error::config(format!("signs must be 1 or -1, got {bad}")));
    }
    let one = Scalar::one();
    let rules = signs.map(|f| {
        vec![
            vec![WordRule(0, one.clone()), WordRule(1, one.clone())],
            vec![WordRule(1, one.clone()), WordRule(0, f.clone())],
        ]
    });
    Ok(RecursiveWordSpec {
        k: 2,
        d: 2,
        seeds: vec![one.clone(), one],
        rules,
    })
}

/// Digit word with `digits[0]` at the lowest position of the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern(pub Vec<u32>);

impl Pattern {
    pub fn parse(s: &str) -> Result<Pattern> {
        s.chars()
            .map(|c| {
                c.to_digit(36)
                    .ok_or_else(|| Error::config(format!("bad pattern digit {c:?}")))
            })
            .collect::<Result<_>>()
            .map(Pattern)
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.iter().all(|&d| d < 10) {
            s.serialize_str(
                &self
                    .0
                    .iter()
                    .map(|d| char::from_digit(*d, 10).expect("digit"))
                    .collect::<String>(),
            )
        } else {
            self.0.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            List(Vec<u32>),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => Pattern::parse(&t).map_err(serde::de::Error::custom),
            Raw::List(l) => Ok(Pattern(l)),
        }
    }
}

/// 1 when the base-`k` digits of `n` at positions `y, y+1, …` spell `pattern`.
pub fn count_pattern(n: u64, pattern: &Pattern, y: u32, k: u32) -> u8 {
    let k = k as u64;
    let mut rest = n;
    for _ in 0..y {
        rest /= k;
    }
    for &p in &pattern.0 {
        if rest % k != p as u64 {
            return 0;
        }
        rest /= k;
    }
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPattern {
    pub digits: Pattern,
    /// `μ(y)` per starting position.
    pub weight: LevelTable<Scalar>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DigitMode {
    Additive,
    Multiplicative,
    Modular(u32),
}

/// Weighted counts of digit-pattern occurrences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigitPatternSpec {
    pub k: u32,
    pub patterns: Vec<WeightedPattern>,
    pub mode: DigitMode,
}

impl DigitPatternSpec {
    pub fn single(
        k: u32,
        digits: &str,
        weight: LevelTable<Scalar>,
        mode: DigitMode,
    ) -> Result<Self> {
        let spec = DigitPatternSpec {
            k,
            patterns: vec![WeightedPattern {
                digits: Pattern::parse(digits)?,
                weight,
            }],
            mode,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::config("radix must be at least 2"));
        }
        for p in &self.patterns {
            if p.digits.0.is_empty() || p.digits.0.iter().all(|&d| d == 0) {
                return Err(Error::config("patterns must be nonempty and not all zero"));
            }
            if let Some(d) = p.digits.0.iter().find(|&&d| d >= self.k) {
                return Err(Error::config(format!(
                    "pattern digit {d} is not below the radix {}",
                    self.k
                )));
            }
            match self.mode {
                DigitMode::Modular(0) => return Err(Error::config("modulus must be positive")),
                DigitMode::Modular(_) => {
                    if let Some(w) = p.weight.levels().iter().find(|w| w.to_i64().is_none()) {
                        return Err(Error::config(format!(
                            "modular mode needs integer weights, got {w}"
                        )));
                    }
                }
                DigitMode::Multiplicative => {
                    let tail = &p.weight.levels()[p.weight.preperiod()..];
                    if !tail.iter().all(Scalar::is_one) {
                        return Err(Error::config(
                            "multiplicative mode needs the weight tail to be 1",
                        ));
                    }
                }
                DigitMode::Additive => {}
            }
        }
        Ok(())
    }

    fn matches(&self, n: u64) -> impl Iterator<Item = (&WeightedPattern, u32)> + '_ {
        let len = digits(n, self.k).len() as u32;
        self.patterns.iter().flat_map(move |p| {
            (0..len)
                .filter(move |&y| count_pattern(n, &p.digits, y, self.k) == 1)
                .map(move |y| (p, y))
        })
    }

    pub fn eval(&self, n: u64) -> Result<Scalar> {
        match self.mode {
            DigitMode::Additive => self.matches(n).try_fold(Scalar::zero(), |acc, (p, y)| {
                Ok(acc.checked_add(p.weight.get(y as usize))?)
            }),
            DigitMode::Multiplicative => self.matches(n).try_fold(Scalar::one(), |acc, (p, y)| {
                Ok(acc.checked_mul(p.weight.get(y as usize))?)
            }),
            DigitMode::Modular(l) => {
                let total: i128 = self
                    .matches(n)
                    .map(|(p, y)| {
                        p.weight
                            .get(y as usize)
                            .to_i64()
                            .expect("validated integer") as i128
                    })
                    .sum();
                Ok(Scalar::from_int(total.rem_euclid(l as i128) as i64))
            }
        }
    }
}

/// The sequence defined by a digit-pattern spec.
pub fn digit_sequence(spec: DigitPatternSpec) -> Result<SequenceSpec> {
    spec.validate()?;
    Ok(SequenceSpec::DigitPattern(spec))
}

/// Occurrences of `11` in binary, mod 2.
pub fn pattern11_mod2() -> DigitPatternSpec {
    DigitPatternSpec::single(
        2,
        "11",
        LevelTable::constant(Scalar::one()),
        DigitMode::Modular(2),
    )
    .expect("valid")
}

/// Coefficients `a_{1,y}, …, a_{L,y}` per level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffFamily {
    pub k: u32,
    pub coeffs: LevelTable<Vec<Scalar>>,
}

impl CoeffFamily {
    pub fn new(k: u32, coeffs: LevelTable<Vec<Scalar>>) -> Result<Self> {
        let f = CoeffFamily { k, coeffs };
        f.validate()?;
        Ok(f)
    }

    /// Same coefficients at every level.
    pub fn constant(k: u32, coeffs: &[i64]) -> Self {
        CoeffFamily {
            k,
            coeffs: LevelTable::constant(coeffs.iter().map(|&c| Scalar::from_int(c)).collect()),
        }
    }

    pub fn width(&self) -> usize {
        self.coeffs.get(0).len()
    }

    /// `a_{s,y}` for `s ≥ 1`.
    pub fn a(&self, s: usize, y: usize) -> &Scalar {
        &self.coeffs.get(y)[s - 1]
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::config("radix must be at least 2"));
        }
        let w = self.width();
        if w == 0 || self.coeffs.levels().iter().any(|c| c.len() != w) {
            return Err(Error::config(
                "every level needs the same positive number of coefficients",
            ));
        }
        Ok(())
    }

    /// Level factor `1 + Σ_s a_{s,y} z^{s k^y}`.
    pub fn factor(&self, y: usize, scale: usize) -> Poly {
        let mut coeffs = vec![Scalar::zero(); self.width() * scale + 1];
        coeffs[0] = Scalar::one();
        for s in 1..=self.width() {
            coeffs[s * scale] = self.a(s, y).clone();
        }
        Poly::new(coeffs)
    }
}

/// `∏_y (1 + Σ_s a_{s,y} z^{s k^y})` to order `n`.
pub fn infinite_product_series(fam: &CoeffFamily, n: usize) -> Result<TruncatedSeries> {
    infinite_product_from(fam, 0, n)
}

/// The tail product starting at level `y0`, in the variable of that level:
/// `∏_{y ≥ y0} (1 + Σ_s a_{s,y} z^{s k^{y-y0}})`.
pub fn infinite_product_from(fam: &CoeffFamily, y0: usize, n: usize) -> Result<TruncatedSeries> {
    fam.validate()?;
    limits::check_coeffs(n)?;
    let mut acc = TruncatedSeries::constant(Scalar::one(), n);
    let mut scale = 1usize;
    let mut y = y0;
    while scale < n {
        acc = acc.mul_poly(&fam.factor(y, scale));
        scale = scale.saturating_mul(fam.k as usize);
        y += 1;
    }
    Ok(acc)
}

/// `Σ_y Σ_s a_{s,y} z^{s k^y}` to order `n`, by enumerating exponents.
pub fn infinite_sum_series(fam: &CoeffFamily, n: usize) -> Result<TruncatedSeries> {
    fam.validate()?;
    limits::check_coeffs(n)?;
    let mut out = vec![Scalar::zero(); n];
    let mut scale = 1usize;
    let mut y = 0;
    while scale < n {
        for s in 1..=fam.width() {
            let e = s * scale;
            if e < n {
                out[e] = &out[e] + fam.a(s, y);
            }
        }
        scale = scale.saturating_mul(fam.k as usize);
        y += 1;
    }
    Ok(TruncatedSeries::new(out))
}

/// Coefficient of `z^n` in the infinite sum.
pub fn infinite_sum_term(fam: &CoeffFamily, n: u64) -> Scalar {
    let k = fam.k as u64;
    let mut acc = Scalar::zero();
    if n == 0 {
        return acc;
    }
    let mut scale = 1u64;
    let mut y = 0;
    while scale <= n {
        if n.is_multiple_of(scale) {
            let s = n / scale;
            if (1..=fam.width() as u64).contains(&s) {
                acc = &acc + fam.a(s as usize, y);
            }
        }
        match scale.checked_mul(k) {
            Some(next) => scale = next,
            None => break,
        }
        y += 1;
    }
    acc
}

/// 1 iff `n = 2^E` with `E ≥ 1` and `v_2(E)` even.
pub fn ooto_term(n: u64) -> Scalar {
    let hit = n.is_power_of_two() && n > 1 && n.trailing_zeros().trailing_zeros().is_multiple_of(2);
    Scalar::from_int(hit as i64)
}

pub fn ooto_sequence() -> SequenceSpec {
    SequenceSpec::Ooto
}

/// The 3×3 product realizing the infinite sum with `k = 2`, `L = 2`:
/// rows `(1, a_1 z, a_2)`, `(0, 1, 0)`, `(0, z, 0)` and seeds `(0, 1, 0)`.
pub fn infinite_sum_matrix_product(fam: &CoeffFamily) -> Result<crate::matrix::MatrixProductSpec> {
    fam.validate()?;
    if fam.k != 2 || fam.width() != 2 {
        return Err(Error::config(
            "the 3x3 form needs k = 2 and two coefficients per level",
        ));
    }
    let matrices = fam.coeffs.try_map(|c| -> Result<_> {
        let p = |v: Vec<Scalar>| Poly::new(v);
        let (z, o) = (Scalar::zero(), Scalar::one());
        Ok(crate::linalg::PolyMatrix::from_rows(vec![
            vec![
                p(vec![o.clone()]),
                p(vec![z.clone(), c[0].clone()]),
                p(vec![c[1].clone()]),
            ],
            vec![Poly::zero(), p(vec![o.clone()]), Poly::zero()],
            vec![Poly::zero(), p(vec![z, o]), Poly::zero()],
        ])?)
    })?;
    let seeds = LevelTable::constant(vec![Scalar::zero(), Scalar::one(), Scalar::zero()]);
    let spec = crate::matrix::MatrixProductSpec {
        k: 2,
        d: 3,
        matrices,
        seeds,
        output: 0,
    };
    spec.validate()?;
    Ok(spec)
}

/// The 2×2 product realizing `∏ (1 + a_1 z^{2^y} + a_2 z^{2·2^y})`: rows
/// `(1 + a_1 z, a_2)`, `(z, a_1 + a_2 z)` acting on `(f, z f)` with seeds `(1, 0)`.
pub fn infinite_product_matrix_product(
    fam: &CoeffFamily,
) -> Result<crate::matrix::MatrixProductSpec> {
    Ok(infinite_product_cartier(fam)?.to_matrix_product())
}

/// Cartier form of the 2×2 product: `C_0 = [[1, a_2], [0, a_1]]`,
/// `C_1 = [[a_1, 0], [1, a_2]]`.
pub fn infinite_product_cartier(fam: &CoeffFamily) -> Result<CartierSystem> {
    fam.validate()?;
    if fam.k != 2 || fam.width() != 2 {
        return Err(Error::config(
            "the 2x2 form needs k = 2 and two coefficients per level",
        ));
    }
    let (z, o) = (Scalar::zero(), Scalar::one());
    let matrices = fam.coeffs.try_map(|c| -> Result<Vec<ScalarMatrix>> {
        Ok(vec![
            ScalarMatrix::from_rows(vec![
                vec![o.clone(), c[1].clone()],
                vec![z.clone(), c[0].clone()],
            ])?,
            ScalarMatrix::from_rows(vec![
                vec![c[0].clone(), z.clone()],
                vec![o.clone(), c[1].clone()],
            ])?,
        ])
    })?;
    CartierSystem::new(2, matrices, LevelTable::constant(vec![o, z]))
}

/// Multiplier `x` whose multiple `x·l` has a sparse low end in base `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapWitness {
    pub x: u64,
    /// Positions of the nonzero digits of `x·l`, increasing.
    pub positions: Vec<u32>,
    pub digits: Vec<u32>,
}

impl GapWitness {
    /// Checks `x·l = Σ s_q k^{w(q)}`, `s_1 = 1`, digits in `1..k` and the gap.
    pub fn is_valid(&self, k: u32, l: u64, t: u32, match_position: Option<u32>) -> bool {
        let Some(prod) = self.x.checked_mul(l) else {
            return false;
        };
        let mut sum: u128 = 0;
        for (&w, &s) in self.positions.iter().zip(&self.digits) {
            if s == 0 || s >= k {
                return false;
            }
            sum += s as u128 * (k as u128).pow(w);
        }
        self.x >= 1
            && self.positions.len() == self.digits.len()
            && self.positions.windows(2).all(|w| w[0] < w[1])
            && sum == prod as u128
            && self.digits.first() == Some(&1)
            && (self.positions.len() < 2 || self.positions[1] - self.positions[0] > t)
            && match_position.is_none_or(|w| self.positions.first() == Some(&w))
    }
}

pub const DEFAULT_GAP_CAP: u64 = 1 << 24;

/// Smallest `x ≥ 1` whose `x·l` has lowest nonzero digit 1 and a gap
/// above `t` to the next nonzero digit; optionally pinned to position `w`.
pub fn gap_multiple(
    k: u32,
    l: u64,
    t: u32,
    match_position: Option<u32>,
    cap: u64,
) -> Result<GapWitness> {
    if k < 2 || l == 0 {
        return Err(Error::config("need k >= 2 and l >= 1"));
    }
    for x in 1..=cap {
        let Some(prod) = x.checked_mul(l) else { break };
        let ds = digits(prod, k);
        let (positions, dvals): (Vec<u32>, Vec<u32>) = ds
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(|(i, &d)| (i as u32, d))
            .unzip();
        let w = GapWitness {
            x,
            positions,
            digits: dvals,
        };
        if w.is_valid(k, l, t, match_position) {
            return Ok(w);
        }
    }
    Err(Error::SearchExhausted { cap })
}

/// The same sign at every level.
pub fn constant_signs(f: i64) -> LevelTable<Scalar> {
    LevelTable::new(vec![Scalar::from_int(f)], Tail::RepeatLast).expect("nonempty")
}
