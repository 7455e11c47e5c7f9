//! Declarative sequence specifications and their lazy, memoized evaluation.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{CoeffFamily, DigitPatternSpec, RecursiveWordSpec};
use crate::limits;
use crate::matrix::{CartierSystem, ChainMahlerSpec, MatrixProductSpec};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

fn default_radix() -> u32 {
    2
}

/// A sequence `a(0), a(1), …` described by a generator or a combinator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSpec {
    /// Finitely many values followed by a constant pad.
    ExplicitPrefix {
        #[serde(default = "default_radix")]
        k: u32,
        values: Vec<Scalar>,
        #[serde(default)]
        pad: Scalar,
    },
    /// First coordinate of the level-0 vector sequence.
    CartierSystem(CartierSystem),
    /// Coefficients of the output component of an infinite product.
    MatrixProduct(MatrixProductSpec),
    /// Coefficients of the level-0 solution of a chain equation.
    Chain(ChainMahlerSpec),
    RecursiveWord(RecursiveWordSpec),
    DigitPattern(DigitPatternSpec),
    /// Coefficients of `∏_y (1 + Σ_s a_{s,y} z^{s k^y})`.
    InfiniteProduct(CoeffFamily),
    /// Coefficients of `Σ_y Σ_s a_{s,y} z^{s k^y}`.
    InfiniteSum(CoeffFamily),
    /// 1 at `n = 2^E` with `E = 4^j l`, `l` odd; 0 elsewhere.
    Ooto,
    Add {
        a: Box<SequenceSpec>,
        b: Box<SequenceSpec>,
    },
    PointwiseMul {
        a: Box<SequenceSpec>,
        b: Box<SequenceSpec>,
    },
    ScalarMul {
        c: Scalar,
        a: Box<SequenceSpec>,
    },
    Cauchy {
        a: Box<SequenceSpec>,
        b: Box<SequenceSpec>,
    },
    /// `n ↦ a(offset + step·n)`.
    ArithSubseq {
        offset: u64,
        step: u64,
        a: Box<SequenceSpec>,
    },
    /// `n ↦ a(kn + j)`.
    Cartier {
        j: u32,
        a: Box<SequenceSpec>,
    },
    /// `n ↦ ζ_order^{a(n)}` for `a` valued in `0..order`.
    BarTransform {
        order: u32,
        a: Box<SequenceSpec>,
    },
}

impl SequenceSpec {
    pub fn constant(c: Scalar) -> Self {
        SequenceSpec::ExplicitPrefix {
            k: 2,
            values: Vec::new(),
            pad: c,
        }
    }

    pub fn ones() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn zeros() -> Self {
        Self::constant(Scalar::zero())
    }

    /// `(1, 0, 0, …)`.
    pub fn delta() -> Self {
        Self::explicit(vec![Scalar::one()])
    }

    pub fn explicit(values: Vec<Scalar>) -> Self {
        SequenceSpec::ExplicitPrefix {
            k: 2,
            values,
            pad: Scalar::zero(),
        }
    }

    /// Radix `k`, checked to agree across combinator children.
    pub fn radix(&self) -> Result<u32> {
        use SequenceSpec::*;
        Ok(match self {
            ExplicitPrefix { k, .. } => *k,
            CartierSystem(s) => s.k,
            MatrixProduct(s) => s.k,
            Chain(s) => s.k,
            RecursiveWord(s) => s.k,
            DigitPattern(s) => s.k,
            InfiniteProduct(s) | InfiniteSum(s) => s.k,
            Ooto => 2,
            Add { a, b } | PointwiseMul { a, b } | Cauchy { a, b } => {
                let (ka, kb) = (a.radix()?, b.radix()?);
                if ka != kb && !a.is_radix_free() && !b.is_radix_free() {
                    return Err(Error::config(format!(
                        "combined sequences have radix {ka} and {kb}"
                    )));
                }
                if a.is_radix_free() {
                    kb
                } else {
                    ka
                }
            }
            ScalarMul { a, .. }
            | ArithSubseq { a, .. }
            | Cartier { a, .. }
            | BarTransform { a, .. } => a.radix()?,
        })
    }

    /// Explicit prefixes carry no radix structure and combine with anything.
    fn is_radix_free(&self) -> bool {
        matches!(self, SequenceSpec::ExplicitPrefix { .. })
    }

    pub fn boxed(self) -> Box<Self> {
        Box::new(self)
    }
}

/// `Δ_j(a)`: the subsequence `a(kn + j)`.
pub fn cartier(spec: &SequenceSpec, j: u32) -> Result<SequenceSpec> {
    let k = spec.radix()?;
    if j >= k {
        return Err(Error::config(format!(
            "cartier digit {j} out of range for radix {k}"
        )));
    }
    Ok(SequenceSpec::Cartier {
        j,
        a: spec.clone().boxed(),
    })
}

/// The level-`e` kernel set: `a(k^e n + j)` for `j = 0..k^e`, ordered by `j`.
pub fn kernel_level(spec: &SequenceSpec, e: u32) -> Result<Vec<SequenceSpec>> {
    let k = spec.radix()? as u64;
    let step = k.checked_pow(e).ok_or(Error::TooLarge {
        what: "kernel level",
        requested: e as u128,
        max: 63,
    })?;
    if e == 0 {
        return Ok(vec![spec.clone()]);
    }
    limits::check_coeffs(step as usize)?;
    Ok((0..step)
        .map(|j| SequenceSpec::ArithSubseq {
            offset: j,
            step,
            a: spec.clone().boxed(),
        })
        .collect())
}

pub fn add(a: &SequenceSpec, b: &SequenceSpec) -> Result<SequenceSpec> {
    let s = SequenceSpec::Add {
        a: a.clone().boxed(),
        b: b.clone().boxed(),
    };
    s.radix()?;
    Ok(s)
}

pub fn pointwise_mul(a: &SequenceSpec, b: &SequenceSpec) -> Result<SequenceSpec> {
    let s = SequenceSpec::PointwiseMul {
        a: a.clone().boxed(),
        b: b.clone().boxed(),
    };
    s.radix()?;
    Ok(s)
}

pub fn scalar_mul(c: Scalar, a: &SequenceSpec) -> SequenceSpec {
    SequenceSpec::ScalarMul {
        c,
        a: a.clone().boxed(),
    }
}

pub fn cauchy(a: &SequenceSpec, b: &SequenceSpec) -> Result<SequenceSpec> {
    let s = SequenceSpec::Cauchy {
        a: a.clone().boxed(),
        b: b.clone().boxed(),
    };
    s.radix()?;
    Ok(s)
}

pub fn arith_subseq(a: &SequenceSpec, offset: u64, step: u64) -> Result<SequenceSpec> {
    if step == 0 {
        return Err(Error::config(
            "arithmetic subsequence step must be at least 1",
        ));
    }
    Ok(SequenceSpec::ArithSubseq {
        offset,
        step,
        a: a.clone().boxed(),
    })
}

pub fn bar_transform(a: &SequenceSpec, order: u32) -> Result<SequenceSpec> {
    if order == 0 {
        return Err(Error::config("bar transform order must be positive"));
    }
    Ok(SequenceSpec::BarTransform {
        order,
        a: a.clone().boxed(),
    })
}

/// Lazily evaluated, memoized view of a spec. Cheap to clone and share.
#[derive(Clone)]
pub struct SequenceView {
    spec: Arc<SequenceSpec>,
    root: Arc<Node>,
}

impl std::fmt::Debug for SequenceView {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SequenceView")
            .field("spec", &self.spec)
            .finish()
    }
}

impl SequenceView {
    pub fn new(spec: &SequenceSpec) -> Result<Self> {
        spec.radix()?;
        Ok(SequenceView {
            spec: Arc::new(spec.clone()),
            root: Arc::new(Node::compile(spec)?),
        })
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn eval(&self, n: u64) -> Result<Scalar> {
        self.root.eval(n)
    }

    /// `(a(0), …, a(len-1))`.
    pub fn prefix(&self, len: usize) -> Result<Vec<Scalar>> {
        limits::check_coeffs(len)?;
        self.root.prefix(len)
    }
}

pub fn eval(spec: &SequenceSpec, n: u64) -> Result<Scalar> {
    SequenceView::new(spec)?.eval(n)
}

pub fn prefix(spec: &SequenceSpec, len: usize) -> Result<Vec<Scalar>> {
    SequenceView::new(spec)?.prefix(len)
}

/// Generating series `Σ a(n) z^n` known to order `len`.
pub fn gen_series(spec: &SequenceSpec, len: usize) -> Result<TruncatedSeries> {
    Ok(TruncatedSeries::new(prefix(spec, len)?))
}

/// Evaluation strategy of a compiled node.
enum Kind {
    Explicit { values: Vec<Scalar>, pad: Scalar },
    Cartier(CartierSystem),
    Product(MatrixProductSpec),
    Chain(ChainMahlerSpec),
    Word(RecursiveWordSpec),
    Digits(DigitPatternSpec),
    InfProduct(CoeffFamily),
    InfSum(CoeffFamily),
    Ooto,
    Add(Node, Node),
    Mul(Node, Node),
    Scale(Scalar, Node),
    Cauchy(Node, Node),
    Arith { offset: u64, step: u64, a: Node },
    Bar { order: u32, a: Node },
}

struct Node {
    kind: Box<Kind>,
    memo: RwLock<HashMap<u64, Scalar>>,
    /// Filled for kinds computed as whole prefixes.
    block: RwLock<Vec<Scalar>>,
}

impl Node {
    fn new(kind: Kind) -> Node {
        Node {
            kind: Box::new(kind),
            memo: RwLock::new(HashMap::new()),
            block: RwLock::new(Vec::new()),
        }
    }

    fn compile(spec: &SequenceSpec) -> Result<Node> {
        use SequenceSpec as S;
        let kind = match spec {
            S::ExplicitPrefix { values, pad, .. } => Kind::Explicit {
                values: values.clone(),
                pad: pad.clone(),
            },
            S::CartierSystem(s) => {
                s.validate()?;
                Kind::Cartier(s.clone())
            }
            S::MatrixProduct(s) => {
                s.validate()?;
                Kind::Product(s.clone())
            }
            S::Chain(s) => {
                s.validate()?;
                Kind::Chain(s.clone())
            }
            S::RecursiveWord(s) => {
                s.validate()?;
                Kind::Word(s.clone())
            }
            S::DigitPattern(s) => {
                s.validate()?;
                Kind::Digits(s.clone())
            }
            S::InfiniteProduct(s) => {
                s.validate()?;
                Kind::InfProduct(s.clone())
            }
            S::InfiniteSum(s) => {
                s.validate()?;
                Kind::InfSum(s.clone())
            }
            S::Ooto => Kind::Ooto,
            S::Add { a, b } => Kind::Add(Node::compile(a)?, Node::compile(b)?),
            S::PointwiseMul { a, b } => Kind::Mul(Node::compile(a)?, Node::compile(b)?),
            S::ScalarMul { c, a } => Kind::Scale(c.clone(), Node::compile(a)?),
            S::Cauchy { a, b } => Kind::Cauchy(Node::compile(a)?, Node::compile(b)?),
            S::ArithSubseq { offset, step, a } => {
                if *step == 0 {
                    return Err(Error::config(
                        "arithmetic subsequence step must be at least 1",
                    ));
                }
                Kind::Arith {
                    offset: *offset,
                    step: *step,
                    a: Node::compile(a)?,
                }
            }
            S::Cartier { j, a } => {
                let k = a.radix()?;
                if *j >= k {
                    return Err(Error::config(format!(
                        "cartier digit {j} out of range for radix {k}"
                    )));
                }
                Kind::Arith {
                    offset: *j as u64,
                    step: k as u64,
                    a: Node::compile(a)?,
                }
            }
            S::BarTransform { order, a } => {
                if *order == 0 {
                    return Err(Error::config("bar transform order must be positive"));
                }
                Kind::Bar {
                    order: *order,
                    a: Node::compile(a)?,
                }
            }
        };
        Ok(Node::new(kind))
    }

    fn is_block(&self) -> bool {
        matches!(
            *self.kind,
            Kind::Product(_) | Kind::Chain(_) | Kind::InfProduct(_) | Kind::Cauchy(..)
        )
    }

    fn eval(&self, n: u64) -> Result<Scalar> {
        if self.is_block() {
            let idx = usize::try_from(n).map_err(|_| too_far(n))?;
            if let Some(v) = self.block.read().expect("cache lock").get(idx) {
                return Ok(v.clone());
            }
            self.grow_block(idx + 1)?;
            return Ok(self.block.read().expect("cache lock")[idx].clone());
        }
        if let Some(v) = self.memo.read().expect("cache lock").get(&n) {
            return Ok(v.clone());
        }
        let v = self.compute(n)?;
        self.memo.write().expect("cache lock").insert(n, v.clone());
        Ok(v)
    }

    fn prefix(&self, len: usize) -> Result<Vec<Scalar>> {
        if self.is_block() {
            self.grow_block(len)?;
            return Ok(self.block.read().expect("cache lock")[..len].to_vec());
        }
        (0..len as u64).map(|n| self.eval(n)).collect()
    }

    /// Extends the block cache to at least `len` terms, doubling.
    fn grow_block(&self, len: usize) -> Result<()> {
        let have = self.block.read().expect("cache lock").len();
        if have >= len {
            return Ok(());
        }
        let target = len.max(2 * have).max(16).min(limits::max_coeffs().max(len));
        limits::check_coeffs(target)?;
        let values = match &*self.kind {
            Kind::Product(s) => s.product_coeffs(target)?.into_coeffs(),
            Kind::Chain(s) => s.chain_solve(target)?.into_coeffs(),
            Kind::InfProduct(s) => {
                crate::generators::infinite_product_series(s, target)?.into_coeffs()
            }
            Kind::Cauchy(a, b) => {
                let (pa, pb) = (a.prefix(target)?, b.prefix(target)?);
                (0..target)
                    .map(|n| {
                        (0..=n).try_fold(Scalar::zero(), |acc, i| {
                            if pa[i].is_zero() || pb[n - i].is_zero() {
                                return Ok(acc);
                            }
                            acc.checked_add(&pa[i].checked_mul(&pb[n - i])?)
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            _ => unreachable!("not a block kind"),
        };
        let mut block = self.block.write().expect("cache lock");
        if block.len() < values.len() {
            *block = values;
        }
        Ok(())
    }

    fn compute(&self, n: u64) -> Result<Scalar> {
        Ok(match &*self.kind {
            Kind::Explicit { values, pad } => usize::try_from(n)
                .ok()
                .and_then(|i| values.get(i))
                .unwrap_or(pad)
                .clone(),
            Kind::Cartier(s) => s.eval(n)?,
            Kind::Word(s) => s.eval(n)?,
            Kind::Digits(s) => s.eval(n)?,
            Kind::InfSum(s) => crate::generators::infinite_sum_term(s, n),
            Kind::Ooto => crate::generators::ooto_term(n),
            Kind::Add(a, b) => a.eval(n)?.checked_add(&b.eval(n)?)?,
            Kind::Mul(a, b) => a.eval(n)?.checked_mul(&b.eval(n)?)?,
            Kind::Scale(c, a) => c.checked_mul(&a.eval(n)?)?,
            Kind::Arith { offset, step, a } => {
                let idx = step
                    .checked_mul(n)
                    .and_then(|x| x.checked_add(*offset))
                    .ok_or_else(|| too_far(n))?;
                a.eval(idx)?
            }
            Kind::Bar { order, a } => {
                let v = a.eval(n)?;
                let e = v
                    .to_i64()
                    .filter(|e| (0..*order as i64).contains(e))
                    .ok_or_else(|| Error::OutOfRange {
                        index: n,
                        value: v.to_string(),
                        reason: format!("bar transform needs an integer in 0..{order}"),
                    })?;
                Scalar::zeta_pow(*order, e)
            }
            Kind::Product(_) | Kind::Chain(_) | Kind::InfProduct(_) | Kind::Cauchy(..) => {
                unreachable!("block kinds are evaluated through the block cache")
            }
        })
    }
}

fn too_far(n: u64) -> Error {
    Error::TooLarge {
        what: "sequence index",
        requested: n as u128,
        max: u64::MAX as u128,
    }
}
