//! Finite-window word diagnostics and block decompositions.
//!
//! Every report is evidence about a prefix of length `W`, never an
//! asymptotic statement.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ScalarMatrix;
use crate::matrix::CartierSystem;
use crate::scalar::Scalar;
use crate::seq::{prefix, SequenceSpec, SequenceView};

/// Symbols of `word` renamed to `0, 1, …` in order of first appearance.
pub fn intern(word: &[Scalar]) -> (Vec<u32>, usize) {
    let mut ids: HashMap<&Scalar, u32> = HashMap::new();
    let out = word
        .iter()
        .map(|s| {
            let next = ids.len() as u32;
            *ids.entry(s).or_insert(next)
        })
        .collect();
    (out, ids.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub b: u64,
    pub d: u32,
    pub k: u32,
    /// `p(m) ≤ b^{2d}·k·m`, indexed by `m − 1`.
    pub satisfied: Vec<bool>,
    pub passed: bool,
}

/// Distinct factor counts of a prefix; lower bounds for the true `p(m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub window: usize,
    pub alphabet_size: usize,
    /// `p(m)` for `m = 1..=m_max`, indexed by `m − 1`.
    pub counts: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundCheck>,
}

impl ComplexityReport {
    pub fn p(&self, m: usize) -> u64 {
        self.counts[m - 1]
    }
}

/// Factor counts of `word` for lengths `1..=m_max`.
///
/// Factors of length `m + 1` are numbered from pairs (factor of length `m`,
/// next symbol), so each length costs one pass over the word.
pub fn word_complexity(word: &[Scalar], m_max: usize) -> Result<ComplexityReport> {
    if m_max == 0 || word.len() < m_max {
        return Err(Error::config(format!(
            "need W >= m_max >= 1, got W = {}, m_max = {m_max}",
            word.len()
        )));
    }
    let (sym, alphabet_size) = intern(word);
    let mut ids = sym.clone();
    let mut counts = vec![alphabet_size as u64];
    for m in 2..=m_max {
        let mut names: HashMap<(u32, u32), u32> = HashMap::new();
        let live = word.len() + 1 - m;
        ids = (0..live)
            .map(|i| {
                let next = names.len() as u32;
                *names.entry((ids[i], sym[i + m - 1])).or_insert(next)
            })
            .collect();
        counts.push(names.len() as u64);
    }
    Ok(ComplexityReport {
        window: word.len(),
        alphabet_size,
        counts,
        bound: None,
    })
}

pub fn complexity(spec: &SequenceSpec, window: usize, m_max: usize) -> Result<ComplexityReport> {
    if m_max == 0 || window < m_max {
        return Err(Error::config(format!(
            "need W >= m_max >= 1, got W = {window}, m_max = {m_max}"
        )));
    }
    word_complexity(&prefix(spec, window)?, m_max)
}

/// Flags `p(m) ≤ b^{2d}·k·m` for every `m` in the report.
pub fn check_complexity_bound(report: &ComplexityReport, b: u64, d: u32, k: u32) -> BoundCheck {
    let base = (b as u128).saturating_pow(2 * d).saturating_mul(k as u128);
    let satisfied: Vec<bool> = report
        .counts
        .iter()
        .enumerate()
        .map(|(i, &p)| p as u128 <= base.saturating_mul(i as u128 + 1))
        .collect();
    let passed = satisfied.iter().all(|&s| s);
    BoundCheck {
        b,
        d,
        k,
        satisfied,
        passed,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub window: usize,
    /// `(N, l)` with `a(n) = a(n + l)` for `N ≤ n < W − l`; `N` is the least
    /// such start, and every larger start up to `N_max` also works.
    pub periodic: Vec<(u64, u64)>,
    /// `(N, l)` with `a(N + l·n)` constant on the window.
    pub constant_progressions: Vec<(u64, u64)>,
}

pub fn word_periodicity(word: &[Scalar], l_max: usize, n_max: usize) -> Result<PeriodicityReport> {
    let w = word.len();
    if w <= n_max + 2 * l_max {
        return Err(Error::config(format!(
            "window {w} must exceed N_max + 2 l_max = {}",
            n_max + 2 * l_max
        )));
    }
    let (sym, _) = intern(word);
    let mut periodic = Vec::new();
    for l in 1..=l_max {
        let start = (0..w - l)
            .rev()
            .find(|&n| sym[n] != sym[n + l])
            .map_or(0, |n| n + 1);
        if start <= n_max {
            periodic.push((start as u64, l as u64));
        }
    }
    let mut constant_progressions = Vec::new();
    for n in 0..=n_max {
        for l in 1..=l_max {
            if (n..w).step_by(l).all(|i| sym[i] == sym[n]) {
                constant_progressions.push((n as u64, l as u64));
            }
        }
    }
    Ok(PeriodicityReport {
        window: w,
        periodic,
        constant_progressions,
    })
}

pub fn detect_periodicity(
    spec: &SequenceSpec,
    window: usize,
    l_max: usize,
    n_max: usize,
) -> Result<PeriodicityReport> {
    if window <= n_max + 2 * l_max {
        return Err(Error::config(format!(
            "window {window} must exceed N_max + 2 l_max = {}",
            n_max + 2 * l_max
        )));
    }
    word_periodicity(&prefix(spec, window)?, l_max, n_max)
}

/// Prefix `U V W V` with `U` starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionDecomposition {
    pub u_len: usize,
    pub v_len: usize,
    pub w_len: usize,
    pub u_ratio: f64,
    pub w_ratio: f64,
}

impl RepetitionDecomposition {
    fn new(u_len: usize, v_len: usize, w_len: usize) -> Self {
        let v = v_len as f64;
        RepetitionDecomposition {
            u_len,
            v_len,
            w_len,
            u_ratio: u_len as f64 / v,
            w_ratio: w_len as f64 / v,
        }
    }

    /// Start of the second copy of `V`.
    pub fn second_v(&self) -> usize {
        self.u_len + self.v_len + self.w_len
    }

    /// Direct symbol comparison of both copies of `V`.
    pub fn validate<T: PartialEq>(&self, word: &[T]) -> bool {
        let (a, b) = (self.u_len, self.second_v());
        self.v_len > 0
            && b + self.v_len <= word.len()
            && word[a..a + self.v_len] == word[b..b + self.v_len]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionScale {
    pub v_len: usize,
    pub found: Option<RepetitionDecomposition>,
}

const HASH_MOD: u64 = (1 << 61) - 1;
const HASH_BASE: u64 = 1_000_003;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % HASH_MOD as u128) as u64
}

/// Hashes of every length-`v` window of `sym`.
fn window_hashes(sym: &[u32], v: usize) -> Vec<u64> {
    let top = (0..v - 1).fold(1, |acc, _| mulmod(acc, HASH_BASE));
    let mut h = 0u64;
    for &s in &sym[..v] {
        h = (mulmod(h, HASH_BASE) + s as u64 + 1) % HASH_MOD;
    }
    let mut out = vec![h];
    for i in v..sym.len() {
        let drop = mulmod(sym[i - v] as u64 + 1, top);
        h = (h + HASH_MOD - drop) % HASH_MOD;
        h = (mulmod(h, HASH_BASE) + sym[i] as u64 + 1) % HASH_MOD;
        out.push(h);
    }
    out
}

/// Smallest `|U|`, then smallest `|W|`, for a fixed `|V| = v`.
fn search_scale(sym: &[u32], v: usize, caps: (f64, f64)) -> Option<RepetitionDecomposition> {
    let hashes = window_hashes(sym, v);
    let mut at: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, &h) in hashes.iter().enumerate() {
        at.entry(h).or_default().push(i);
    }
    let u_cap = (caps.0 * v as f64).floor() as usize;
    let w_cap = (caps.1 * v as f64).floor() as usize;
    for u in 0..=u_cap {
        if u + 2 * v > sym.len() {
            break;
        }
        let starts = &at[&hashes[u]];
        let first = starts.partition_point(|&p| p < u + v);
        for &p in starts[first..].iter().take_while(|&&p| p <= u + v + w_cap) {
            if sym[u..u + v] == sym[p..p + v] {
                return Some(RepetitionDecomposition::new(u, v, p - u - v));
            }
        }
    }
    None
}

/// Searches `|V| = 2, 4, 8, …` (while `2|V| ≤ W`) for `U V W V` prefixes with
/// `|U| ≤ caps.0·|V|` and `|W| ≤ caps.1·|V|`. Hash hits are confirmed symbol by symbol.
pub fn word_repetitions(word: &[Scalar], caps: (f64, f64)) -> Result<Vec<RepetitionScale>> {
    if word.len() < 4 {
        return Err(Error::config("long repetition search needs W >= 4"));
    }
    if !(caps.0 >= 0.0 && caps.1 >= 0.0) {
        return Err(Error::config("ratio caps must be nonnegative"));
    }
    let (sym, _) = intern(word);
    let mut out = Vec::new();
    let mut v = 2;
    while 2 * v <= sym.len() {
        out.push(RepetitionScale {
            v_len: v,
            found: search_scale(&sym, v, caps),
        });
        v *= 2;
    }
    Ok(out)
}

pub fn long_repetitions(
    spec: &SequenceSpec,
    window: usize,
    caps: (f64, f64),
) -> Result<Vec<RepetitionScale>> {
    if window < 4 {
        return Err(Error::config("long repetition search needs W >= 4"));
    }
    word_repetitions(&prefix(spec, window)?, caps)
}

/// Level-`y` block structure of a Cartier system in the standard basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractalDecomposition {
    pub y: usize,
    pub k: u32,
    pub d: usize,
    /// `B_{j,y}` for `j < k^y`.
    pub boundaries: Vec<ScalarMatrix>,
    /// `blocks[i][j] = B_{j,y} e_i`.
    pub blocks: Vec<Vec<Vec<Scalar>>>,
    /// `coords[n] = A_y(n)` for `n ≤ n_max`.
    pub coords: Vec<Vec<Scalar>>,
}

/// Decomposes the level-0 vector sequence into copies of `d` basis blocks and
/// checks, for every `n ≤ n_max` and `j < k^y`, that `B_{j,y} A_y(n)` equals
/// the level-0 vector at `n k^y + j` and, when the system has a target, that
/// its first coordinate is the target value.
pub fn fractal_decompose(
    sys: &CartierSystem,
    y: usize,
    n_max: u64,
) -> Result<FractalDecomposition> {
    sys.validate_dims()?;
    let boundaries = sys.boundaries(y)?;
    let coords = (0..=n_max)
        .map(|n| sys.level_vector(y, n))
        .collect::<Result<Vec<_>>>()?;
    let target = sys.target.as_deref().map(SequenceView::new).transpose()?;
    let block = boundaries.len() as u64;
    for (n, c) in coords.iter().enumerate() {
        for (j, b) in boundaries.iter().enumerate() {
            let idx = n as u64 * block + j as u64;
            let copy = b.mul_vec(c)?;
            let (n, j) = (n as u64, j as u64);
            if copy != sys.level_vector(0, idx)? {
                return Err(Error::BlockMismatch {
                    n,
                    j,
                    detail: format!("level-0 vector at {idx} differs from its block copy"),
                });
            }
            if let Some(view) = &target {
                let expected = view.eval(idx)?;
                if copy[0] != expected {
                    return Err(Error::BlockMismatch {
                        n,
                        j,
                        detail: format!(
                            "block copy gives {} at {idx}, target has {expected}",
                            copy[0]
                        ),
                    });
                }
            }
        }
    }
    if let Some(level) = sys.seed_inconsistency()? {
        return Err(Error::BlockMismatch {
            n: 0,
            j: 0,
            detail: format!("seed vectors inconsistent at level {level}"),
        });
    }
    let blocks = (0..sys.d)
        .map(|i| {
            boundaries
                .iter()
                .map(|b| (0..sys.d).map(|r| b.get(r, i).clone()).collect())
                .collect()
        })
        .collect();
    Ok(FractalDecomposition {
        y,
        k: sys.k,
        d: sys.d,
        boundaries,
        blocks,
        coords,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyCensus {
    pub y: usize,
    pub block_len: u64,
    /// Distinct consecutive coordinate pairs `(A_y(n), A_y(n+1))`.
    pub pairs: usize,
    /// `pairs · k^y`: bounds the distinct factors of each length `≤ k^y`
    /// seen in the window, since each lies inside two consecutive blocks.
    pub factor_bound: u64,
}

pub fn fractal_copy_census(dec: &FractalDecomposition) -> CopyCensus {
    let pairs: std::collections::HashSet<(&[Scalar], &[Scalar])> = dec
        .coords
        .windows(2)
        .map(|w| (w[0].as_slice(), w[1].as_slice()))
        .collect();
    let block_len = dec.boundaries.len() as u64;
    CopyCensus {
        y: dec.y,
        block_len,
        pairs: pairs.len(),
        factor_bound: pairs.len() as u64 * block_len,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    #[test]
    fn period_three() {
        let w = word(&[0, 1, 2].repeat(40));
        let r = word_complexity(&w, 6).unwrap();
        assert_eq!(r.counts, vec![3; 6]);
        let p = word_periodicity(&w, 7, 5).unwrap();
        assert_eq!(p.periodic, vec![(0, 3), (0, 6)]);
        assert!(p.constant_progressions.contains(&(1, 3)));
    }

    #[test]
    fn alternating_repetitions() {
        let w = word(&[0, 1].repeat(32));
        for scale in word_repetitions(&w, (4.0, 4.0)).unwrap() {
            let dec = scale.found.unwrap();
            assert_eq!((dec.u_len, dec.w_len), (0, 0));
            assert!(dec.validate(&w));
        }
    }

    #[test]
    fn window_too_small() {
        assert!(word_periodicity(&word(&[1; 10]), 4, 2).is_err());
        assert!(word_complexity(&word(&[1; 3]), 4).is_err());
    }
}
