//! Dense exact linear algebra over a [`Ring`] that is a field.
//!
//! Elements of algebras are plain coordinate vectors (`Vec<Scalar>`); the
//! vector helpers here are shared by every module.

use thiserror::Error;

use crate::scalars::{Ring, Scalar, ScalarError};

pub type Matrix = Vec<Vec<Scalar>>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("elimination needs a field; found a nonzero non-unit pivot")]
    NotAField,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

pub fn vzero(ring: &Ring, n: usize) -> Vec<Scalar> {
    vec![ring.zero(); n]
}

pub fn basis_vector(ring: &Ring, n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vzero(ring, n);
    v[i] = ring.one();
    v
}

pub fn vadd(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vsub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vscale(s: &Scalar, a: &[Scalar]) -> Vec<Scalar> {
    a.iter().map(|x| s * x).collect()
}

pub fn vneg(a: &[Scalar]) -> Vec<Scalar> {
    a.iter().map(|x| -x).collect()
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    let mut it = a.iter().zip(b).map(|(x, y)| x * y);
    let first = it.next().expect("dot of empty vectors");
    it.fold(first, |acc, t| &acc + &t)
}

pub fn is_zero_vec(a: &[Scalar]) -> bool {
    a.iter().all(Scalar::is_zero)
}

pub fn identity(ring: &Ring, n: usize) -> Matrix {
    (0..n).map(|i| basis_vector(ring, n, i)).collect()
}

pub fn transpose(m: &[Vec<Scalar>]) -> Matrix {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_vec(m: &[Vec<Scalar>], v: &[Scalar]) -> Vec<Scalar> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Matrix {
    let bt = transpose(b);
    a.iter().map(|row| bt.iter().map(|col| dot(row, col)).collect()).collect()
}

/// Reduced row echelon form with the list of pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Matrix,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

pub fn rref(mut m: Matrix, ncols: usize) -> Result<Echelon, LinalgError> {
    if m.iter().any(|r| r.len() != ncols) {
        return Err(LinalgError::DimensionMismatch("ragged matrix".into()));
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let mut found = None;
        let mut saw_nonzero = false;
        for (i, row) in m.iter().enumerate().skip(r) {
            if !row[c].is_zero() {
                saw_nonzero = true;
                if let Ok(inv) = row[c].inv() {
                    found = Some((i, inv));
                    break;
                }
            }
        }
        let Some((i, inv)) = found else {
            if saw_nonzero {
                return Err(LinalgError::NotAField);
            }
            continue;
        };
        m.swap(r, i);
        let pivot_row: Vec<Scalar> = m[r].iter().map(|x| x * &inv).collect();
        for (k, row) in m.iter_mut().enumerate() {
            if k != r && !row[c].is_zero() {
                let f = row[c].clone();
                for j in c..ncols {
                    if !pivot_row[j].is_zero() {
                        row[j] = &row[j] - &(&f * &pivot_row[j]);
                    }
                }
            }
        }
        m[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Ok(Echelon { rows: m, pivots, ncols })
}

pub fn rank(m: &[Vec<Scalar>], ncols: usize) -> Result<usize, LinalgError> {
    Ok(rref(m.to_vec(), ncols)?.pivots.len())
}

impl Echelon {
    /// Basis of the solution space of `m x = 0`.
    pub fn nullspace(&self, ring: &Ring) -> Vec<Vec<Scalar>> {
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vzero(ring, self.ncols);
                v[f] = ring.one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = -&row[f];
                }
                v
            })
            .collect()
    }
}

pub fn nullspace(ring: &Ring, m: &[Vec<Scalar>], ncols: usize) -> Result<Vec<Vec<Scalar>>, LinalgError> {
    Ok(rref(m.to_vec(), ncols)?.nullspace(ring))
}

/// One solution of `m x = b` (free variables set to zero), or `None` when the
/// system is inconsistent.
pub fn solve(ring: &Ring, m: &[Vec<Scalar>], b: &[Scalar]) -> Result<Option<Vec<Scalar>>, LinalgError> {
    if m.len() != b.len() {
        return Err(LinalgError::DimensionMismatch(format!("{} rows vs {} entries", m.len(), b.len())));
    }
    let ncols = m.first().map_or(0, Vec::len);
    let aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let e = rref(aug, ncols + 1)?;
    if e.pivots.last() == Some(&ncols) {
        return Ok(None);
    }
    let mut x = vzero(ring, ncols);
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        x[p] = row[ncols].clone();
    }
    Ok(Some(x))
}

pub fn inverse(ring: &Ring, m: &[Vec<Scalar>]) -> Result<Matrix, LinalgError> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(basis_vector(ring, n, i));
            r
        })
        .collect();
    let e = rref(aug, 2 * n)?;
    if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
        return Err(LinalgError::Singular);
    }
    Ok(e.rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(ring: &Ring, m: &[Vec<Scalar>]) -> Result<Scalar, LinalgError> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = ring.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Ok(ring.zero());
        };
        if p != c {
            a.swap(p, c);
            det = -&det;
        }
        let inv = a[c][c].inv().map_err(|_| LinalgError::NotAField)?;
        det = &det * &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..n {
                    a[i][j] = &a[i][j] - &(&f * &a[c][j]);
                }
            }
        }
    }
    Ok(det)
}

/// Congruence-diagonalize a symmetric matrix (characteristic not 2). Returns
/// the diagonal entries; zero entries span the radical.
pub fn diagonalize_symmetric(ring: &Ring, m: &[Vec<Scalar>]) -> Result<Vec<Scalar>, LinalgError> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                a.swap(k, i);
                for row in a.iter_mut() {
                    row.swap(k, i);
                }
            } else if let Some((i, j)) =
                (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero())
            {
                // Replace e_i by e_i + e_j: new a_ii = 2 a_ij.
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[i][c] = &a[i][c] + &v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][i] = &a[r][i] + &v;
                }
                a.swap(k, i);
                for row in a.iter_mut() {
                    row.swap(k, i);
                }
            } else {
                diag.extend((k..n).map(|_| ring.zero()));
                return Ok(diag);
            }
        }
        let inv = a[k][k].inv().map_err(|_| LinalgError::NotAField)?;
        for i in k + 1..n {
            if !a[i][k].is_zero() {
                let f = &a[i][k] * &inv;
                for j in k..n {
                    a[i][j] = &a[i][j] - &(&f * &a[k][j]);
                }
                for r in k..n {
                    a[r][i] = &a[r][i] - &(&f * &a[r][k]);
                }
            }
        }
        diag.push(a[k][k].clone());
    }
    Ok(diag)
}
