//! Scalar and polynomial matrices, plus exact nullspace computation.

use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimensionError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Mismatch { expected: usize, got: usize },
    #[error("ragged matrix rows")]
    Ragged,
}

/// Dense matrix of scalars, row-major. Serialized as a list of rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Scalar>>", into = "Vec<Vec<Scalar>>")]
pub struct ScalarMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl TryFrom<Vec<Vec<Scalar>>> for ScalarMatrix {
    type Error = DimensionError;
    fn try_from(rows: Vec<Vec<Scalar>>) -> Result<Self, Self::Error> {
        ScalarMatrix::from_rows(rows)
    }
}

impl From<ScalarMatrix> for Vec<Vec<Scalar>> {
    fn from(m: ScalarMatrix) -> Self {
        (0..m.rows).map(|r| m.row(r).to_vec()).collect()
    }
}

impl ScalarMatrix {
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, DimensionError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(DimensionError::Ragged);
        }
        Ok(ScalarMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ScalarMatrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> impl Iterator<Item = &Scalar> {
        self.data.iter()
    }

    pub fn mul(&self, other: &ScalarMatrix) -> Result<ScalarMatrix, DimensionError> {
        if self.cols != other.rows {
            return Err(DimensionError::Mismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * other.cols + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> ScalarMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// Gauss–Jordan inverse; `None` when singular or not square.
    pub fn inverse(&self) -> Option<ScalarMatrix> {
        let n = self.rows;
        if n != self.cols {
            return None;
        }
        let mut a: Vec<Vec<Scalar>> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend((0..n).map(|c| {
                    if c == r {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    }
                }));
                row
            })
            .collect();
        for col in 0..n {
            let p = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, p);
            let inv = a[col][col].inv().ok()?;
            for x in a[col].iter_mut() {
                *x = &*x * &inv;
            }
            let pivot = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (x, p) in row.iter_mut().zip(&pivot) {
                        *x = &*x - &(&f * p);
                    }
                }
            }
        }
        ScalarMatrix::from_rows(a.into_iter().map(|row| row[n..].to_vec()).collect()).ok()
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, DimensionError> {
        if v.len() != self.cols {
            return Err(DimensionError::Mismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }
}

/// Matrix of polynomials, row-major, with an optional declared degree bound.
/// Serialized as a list of rows of coefficient lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Poly>>", into = "Vec<Vec<Poly>>")]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
    degree_bound: Option<usize>,
}

impl TryFrom<Vec<Vec<Poly>>> for PolyMatrix {
    type Error = DimensionError;
    fn try_from(rows: Vec<Vec<Poly>>) -> Result<Self, Self::Error> {
        PolyMatrix::from_rows(rows)
    }
}

impl From<PolyMatrix> for Vec<Vec<Poly>> {
    fn from(m: PolyMatrix) -> Self {
        m.entries
            .chunks(m.cols.max(1))
            .map(<[Poly]>::to_vec)
            .collect()
    }
}

impl PolyMatrix {
    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self, DimensionError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(DimensionError::Ragged);
        }
        Ok(PolyMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
            degree_bound: None,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![Poly::zero(); rows * cols],
            degree_bound: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Poly::one();
        }
        m
    }

    /// Declares `deg ≤ bound` for every entry, checking it.
    pub fn with_degree_bound(mut self, bound: usize) -> Result<Self, usize> {
        if let Some(bad) = self
            .entries
            .iter()
            .filter_map(Poly::degree)
            .find(|&d| d > bound)
        {
            return Err(bad);
        }
        self.degree_bound = Some(bound);
        Ok(self)
    }

    pub fn degree_bound(&self) -> Option<usize> {
        self.degree_bound
    }

    /// Largest entry degree (`None` for the zero matrix).
    pub fn max_degree(&self) -> Option<usize> {
        self.entries.iter().filter_map(Poly::degree).max()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Poly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Poly) {
        self.entries[r * self.cols + c] = p;
    }

    /// Row-wise `Σ_c M[r][c] · v[c]` with truncation tracking.
    pub fn apply(&self, v: &[TruncatedSeries]) -> Result<Vec<TruncatedSeries>, DimensionError> {
        if v.len() != self.cols {
            return Err(DimensionError::Mismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let n = v
            .iter()
            .map(TruncatedSeries::trunc_order)
            .min()
            .unwrap_or(0);
        Ok((0..self.rows)
            .map(|r| {
                (0..self.cols).fold(TruncatedSeries::zero(n), |acc, c| {
                    let p = self.get(r, c);
                    if p.is_zero() {
                        acc
                    } else {
                        acc.add(&v[c].mul_poly(p))
                    }
                })
            })
            .collect())
    }
}

/// Basis of the right nullspace `{x : A x = 0}` of a `rows × ncols` matrix.
///
/// Reduced row echelon form; one basis vector per free column, with that
/// free variable set to 1. Basis order follows the free columns.
pub fn nullspace(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut a: Vec<Vec<Scalar>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut prow = 0;
    for col in 0..ncols {
        if prow >= a.len() {
            break;
        }
        let Some(found) = (prow..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(prow, found);
        let inv = a[prow][col].inv().expect("nonzero pivot");
        for x in a[prow].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = a[prow].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == prow || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = &*x - &(&f * p);
                }
            }
        }
        pivots.push(col);
        prow += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Scalar::zero(); ncols];
            v[fc] = Scalar::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -&a[r][fc];
            }
            v
        })
        .collect()
}

/// Rank of a matrix over the scalar field.
pub fn rank(rows: &[Vec<Scalar>], ncols: usize) -> usize {
    ncols - nullspace(rows, ncols).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
            .collect()
    }

    #[test]
    fn nullspace_basics() {
        let a = ints(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &a {
                let dot: Scalar = row.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(dot.is_zero());
            }
        }
        assert!(nullspace(&ints(&[&[1, 0], &[0, 1]]), 2).is_empty());
        assert_eq!(rank(&ints(&[&[1, 1], &[1, 1]]), 2), 1);
    }

    #[test]
    fn inverse_round_trip() {
        let m = ScalarMatrix::from_ints(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), ScalarMatrix::identity(2));
        assert!(ScalarMatrix::from_ints(&[&[1, 2], &[2, 4]])
            .inverse()
            .is_none());
        assert_eq!(m.transpose().get(0, 1), &Scalar::one());
    }

    #[test]
    fn identity_apply() {
        let v = vec![
            TruncatedSeries::new(vec![Scalar::one(), Scalar::from_int(2)]),
            TruncatedSeries::new(vec![Scalar::from_int(3), Scalar::zero()]),
        ];
        assert_eq!(PolyMatrix::identity(2).apply(&v).unwrap(), v);
        assert!(PolyMatrix::identity(3).apply(&v).is_err());
    }

    #[test]
    fn shift_matrix() {
        let m = PolyMatrix::from_rows(vec![vec![Poly::from_ints(&[0, 1])]]).unwrap();
        let ones = TruncatedSeries::new(vec![Scalar::one(); 3]);
        let out = m.apply(&[ones]).unwrap();
        assert_eq!(
            out[0].coeffs(),
            &[Scalar::zero(), Scalar::one(), Scalar::one()]
        );
    }

    #[test]
    fn tachiya_matrix_step() {
        // level-0 matrix of the two-term product with a1 = a2 = 1
        let m = PolyMatrix::from_rows(vec![
            vec![Poly::from_ints(&[1, 1]), Poly::from_ints(&[1])],
            vec![Poly::from_ints(&[0, 1]), Poly::from_ints(&[1, 1])],
        ])
        .unwrap();
        let v = vec![
            TruncatedSeries::new(vec![
                Scalar::one(),
                Scalar::zero(),
                Scalar::zero(),
                Scalar::zero(),
            ]),
            TruncatedSeries::zero(4),
        ];
        let out = m.apply(&v).unwrap();
        let expect =
            |xs: &[i64]| TruncatedSeries::new(xs.iter().map(|&x| Scalar::from_int(x)).collect());
        assert_eq!(out[0], expect(&[1, 1, 0, 0]));
        assert_eq!(out[1], expect(&[0, 1, 0, 0]));
    }
}
