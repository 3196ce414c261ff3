//! Symmetric multilinear forms and quadratic vector maps on free modules of
//! finite rank, stored sparsely over sorted index tuples.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::{self, LinalgError};
use crate::scalars::{Ring, Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MultiformError {
    #[error("{0}! is not invertible in the scalar ring")]
    NonInvertibleFactorial(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("nondegeneracy is only decided over a field")]
    NotAField,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("malformed form: {0}")]
    Malformed(String),
}

impl From<LinalgError> for MultiformError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotAField => MultiformError::NotAField,
            LinalgError::Scalar(s) => MultiformError::Scalar(s),
            other => MultiformError::DimensionMismatch(other.to_string()),
        }
    }
}

/// Distinct orderings of a sorted multiset of indices.
fn distinct_permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = sorted.to_vec();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let n = cur.len();
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// All sorted `d`-tuples over `0..n`.
pub fn sorted_tuples(n: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, d: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, d, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, 0, &mut Vec::new(), &mut out);
    out
}

fn factorial_inverse(ring: &Ring, d: usize) -> Result<Scalar, MultiformError> {
    let f: i64 = (1..=d as i64).product();
    ring.from_int(f).inv().map_err(|_| MultiformError::NonInvertibleFactorial(d))
}

#[derive(Clone, Debug)]
struct Entry {
    value: Scalar,
    perms: Vec<Vec<usize>>,
}

/// `theta(e_{i_1}, ..., e_{i_d})` for sorted tuples; absent tuples are zero.
#[derive(Clone, Debug)]
pub struct SymmetricMultilinearForm {
    ring: Ring,
    degree: usize,
    rank: usize,
    entries: BTreeMap<Vec<usize>, Entry>,
}

impl PartialEq for SymmetricMultilinearForm {
    fn eq(&self, o: &Self) -> bool {
        self.ring == o.ring
            && self.degree == o.degree
            && self.rank == o.rank
            && self.entries.len() == o.entries.len()
            && self.entries.iter().zip(&o.entries).all(|((a, x), (b, y))| a == b && x.value == y.value)
    }
}

impl SymmetricMultilinearForm {
    pub fn zero(ring: &Ring, degree: usize, rank: usize) -> Self {
        SymmetricMultilinearForm { ring: ring.clone(), degree, rank, entries: BTreeMap::new() }
    }

    /// Build from `(tuple, value)` pairs. Tuples are sorted; repeated tuples
    /// are summed.
    pub fn from_entries(
        ring: &Ring,
        degree: usize,
        rank: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, Scalar)>,
    ) -> Result<Self, MultiformError> {
        let mut f = Self::zero(ring, degree, rank);
        for (mut t, v) in entries {
            if t.len() != degree || t.iter().any(|&i| i >= rank) {
                return Err(MultiformError::DimensionMismatch(format!("bad index tuple {t:?}")));
            }
            ring.check(&v)?;
            t.sort_unstable();
            let old = f.get(&t);
            f.set(t, &old + &v);
        }
        Ok(f)
    }

    fn set(&mut self, t: Vec<usize>, v: Scalar) {
        if v.is_zero() {
            self.entries.remove(&t);
        } else {
            let perms = distinct_permutations(&t);
            self.entries.insert(t, Entry { value: v, perms });
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Value on basis vectors; the indices need not be sorted.
    pub fn get(&self, idx: &[usize]) -> Scalar {
        let mut t = idx.to_vec();
        t.sort_unstable();
        self.entries.get(&t).map_or_else(|| self.ring.zero(), |e| e.value.clone())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.entries.iter().map(|(k, e)| (k, &e.value))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `theta(x_1, ..., x_d)`.
    pub fn eval(&self, xs: &[&[Scalar]]) -> Result<Scalar, MultiformError> {
        if xs.len() != self.degree || xs.iter().any(|x| x.len() != self.rank) {
            return Err(MultiformError::DimensionMismatch(format!(
                "form of degree {} on rank {}",
                self.degree, self.rank
            )));
        }
        let mut acc = self.ring.zero();
        for e in self.entries.values() {
            let mut inner: Option<Scalar> = None;
            'perm: for p in &e.perms {
                let mut prod: Option<Scalar> = None;
                for (m, &i) in p.iter().enumerate() {
                    let c = &xs[m][i];
                    if c.is_zero() {
                        continue 'perm;
                    }
                    prod = Some(match prod {
                        None => c.clone(),
                        Some(p) => &p * c,
                    });
                }
                let prod = prod.unwrap();
                inner = Some(match inner {
                    None => prod,
                    Some(s) => &s + &prod,
                });
            }
            if let Some(s) = inner {
                acc = &acc + &(&e.value * &s);
            }
        }
        Ok(acc)
    }

    /// `theta(x, ..., x)`.
    pub fn eval_diagonal(&self, x: &[Scalar]) -> Result<Scalar, MultiformError> {
        let xs: Vec<&[Scalar]> = vec![x; self.degree];
        self.eval(&xs)
    }

    /// Orthogonal sum on the direct sum of the underlying modules.
    pub fn orthogonal_sum(&self, other: &Self) -> Result<Self, MultiformError> {
        if self.degree != other.degree || self.ring != other.ring {
            return Err(MultiformError::DimensionMismatch("orthogonal sum of unlike forms".into()));
        }
        let shift = self.rank;
        let entries = self
            .entries()
            .map(|(t, v)| (t.clone(), v.clone()))
            .chain(other.entries().map(|(t, v)| (t.iter().map(|i| i + shift).collect(), v.clone())));
        Self::from_entries(&self.ring, self.degree, self.rank + other.rank, entries)
    }

    /// Apply `f` to every coefficient, landing in `ring` (base change).
    pub fn map_scalars(&self, ring: &Ring, f: impl Fn(&Scalar) -> Scalar) -> Self {
        let entries = self.entries.iter().map(|(t, e)| (t.clone(), f(&e.value)));
        Self::from_entries(ring, self.degree, self.rank, entries).expect("same shape")
    }

    /// Rank of the `n x n^(d-1)` flattening equals `n`.
    pub fn is_nondegenerate(&self) -> Result<bool, MultiformError> {
        if !self.ring.is_field() {
            return Err(MultiformError::NotAField);
        }
        let n = self.rank;
        let cols = n.pow(self.degree as u32 - 1);
        let mut m = vec![vec![self.ring.zero(); cols]; n];
        for e in self.entries.values() {
            for p in &e.perms {
                let col = p[1..].iter().fold(0, |acc, &i| acc * n + i);
                m[p[0]][col] = e.value.clone();
            }
        }
        Ok(linalg::rank(&m, cols)? == n)
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries()
            .map(|(t, v)| {
                let mut row: Vec<Value> = t.iter().map(|&i| json!(i)).collect();
                row.push(v.to_json());
                Value::Array(row)
            })
            .collect();
        json!({"degree": self.degree, "rank": self.rank, "entries": entries})
    }

    pub fn from_json(ring: &Ring, v: &Value) -> Result<Self, MultiformError> {
        let bad = |m: &str| MultiformError::Malformed(m.to_string());
        let degree = v.get("degree").and_then(Value::as_u64).ok_or_else(|| bad("missing degree"))? as usize;
        let rank = v.get("rank").and_then(Value::as_u64).ok_or_else(|| bad("missing rank"))? as usize;
        let rows = v.get("entries").and_then(Value::as_array).ok_or_else(|| bad("missing entries"))?;
        let mut entries = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r.as_array().filter(|r| r.len() == degree + 1).ok_or_else(|| bad("bad entry"))?;
            let t = r[..degree]
                .iter()
                .map(|i| i.as_u64().map(|i| i as usize).ok_or_else(|| bad("bad index")))
                .collect::<Result<Vec<_>, _>>()?;
            entries.push((t, ring.parse(&r[degree])?));
        }
        Self::from_entries(ring, degree, rank, entries)
    }
}

/// Recover the symmetric `d`-linear form with `theta(x, ..., x) = f(x)` from a
/// homogeneous degree-`d` function, by inclusion-exclusion on basis vectors.
pub fn polarize<F>(ring: &Ring, rank: usize, degree: usize, f: F) -> Result<SymmetricMultilinearForm, MultiformError>
where
    F: Fn(&[Scalar]) -> Scalar,
{
    let inv = factorial_inverse(ring, degree)?;
    let mut cache: HashMap<Vec<usize>, Scalar> = HashMap::new();
    let mut value_at = |ms: Vec<usize>| -> Scalar {
        cache
            .entry(ms)
            .or_insert_with_key(|ms| {
                let mut x = linalg::vzero(ring, rank);
                for &i in ms {
                    x[i] = &x[i] + &ring.one();
                }
                f(&x)
            })
            .clone()
    };
    let mut form = SymmetricMultilinearForm::zero(ring, degree, rank);
    for t in sorted_tuples(rank, degree) {
        let mut acc = ring.zero();
        for mask in 1u32..(1 << degree) {
            let ms: Vec<usize> = (0..degree).filter(|b| mask >> b & 1 == 1).map(|b| t[b]).collect();
            let sign_negative = (degree - ms.len()) % 2 == 1;
            let v = value_at(ms);
            acc = if sign_negative { &acc - &v } else { &acc + &v };
        }
        form.set(t, &acc * &inv);
    }
    Ok(form)
}

/// A homogeneous quadratic map `R^n -> R^m`, stored as the coefficient of each
/// monomial `x_i x_j` (`i <= j`) in every output coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticVectorMap {
    ring: Ring,
    domain: usize,
    codomain: usize,
    terms: Vec<Vec<(usize, usize, Scalar)>>,
}

impl QuadraticVectorMap {
    pub fn from_monomials(
        ring: &Ring,
        domain: usize,
        codomain: usize,
        monomials: impl IntoIterator<Item = (usize, usize, usize, Scalar)>,
    ) -> Result<Self, MultiformError> {
        let mut acc: Vec<BTreeMap<(usize, usize), Scalar>> = vec![BTreeMap::new(); codomain];
        for (k, i, j, c) in monomials {
            if k >= codomain || i >= domain || j >= domain {
                return Err(MultiformError::DimensionMismatch(format!("monomial ({k},{i},{j})")));
            }
            ring.check(&c)?;
            let key = (i.min(j), i.max(j));
            let e = acc[k].entry(key).or_insert_with(|| ring.zero());
            *e = &*e + &c;
        }
        let terms = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, c)| !c.is_zero()).map(|((i, j), c)| (i, j, c)).collect())
            .collect();
        Ok(QuadraticVectorMap { ring: ring.clone(), domain, codomain, terms })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn terms(&self) -> &[Vec<(usize, usize, Scalar)>] {
        &self.terms
    }

    pub fn nnz(&self) -> usize {
        self.terms.iter().map(Vec::len).sum()
    }

    pub fn eval(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.domain, "quadratic map domain mismatch");
        self.terms
            .iter()
            .map(|row| {
                let mut acc = self.ring.zero();
                for (i, j, c) in row {
                    if !x[*i].is_zero() && !x[*j].is_zero() {
                        acc = &acc + &(c * &(&x[*i] * &x[*j]));
                    }
                }
                acc
            })
            .collect()
    }

    /// The bilinear companion `Q(x + y) - Q(x) - Q(y)`.
    pub fn bilinear(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        assert!(x.len() == self.domain && y.len() == self.domain, "quadratic map domain mismatch");
        self.terms
            .iter()
            .map(|row| {
                let mut acc = self.ring.zero();
                for (i, j, c) in row {
                    let t = if i == j {
                        let p = &x[*i] * &y[*i];
                        &p + &p
                    } else {
                        &(&x[*i] * &y[*j]) + &(&x[*j] * &y[*i])
                    };
                    if !t.is_zero() {
                        acc = &acc + &(c * &t);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn map_scalars(&self, ring: &Ring, f: impl Fn(&Scalar) -> Scalar) -> Self {
        let mono = self
            .terms
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().map(move |(i, j, c)| (k, *i, *j, c)))
            .map(|(k, i, j, c)| (k, i, j, f(c)));
        Self::from_monomials(ring, self.domain, self.codomain, mono.collect::<Vec<_>>()).expect("same shape")
    }

    /// JSON with the symmetric coefficients `S[k][i][j]` for `i <= j`.
    pub fn to_json(&self) -> Value {
        let half = self.ring.from_int(2).inv().expect("characteristic is not 2");
        let mut entries = Vec::new();
        for (k, row) in self.terms.iter().enumerate() {
            for (i, j, c) in row {
                let s = if i == j { c.clone() } else { c * &half };
                entries.push(json!([k, i, j, s.to_json()]));
            }
        }
        json!({"domain": self.domain, "codomain": self.codomain, "entries": entries})
    }

    pub fn from_json(ring: &Ring, v: &Value) -> Result<Self, MultiformError> {
        let bad = |m: &str| MultiformError::Malformed(m.to_string());
        let domain = v.get("domain").and_then(Value::as_u64).ok_or_else(|| bad("missing domain"))? as usize;
        let codomain = v.get("codomain").and_then(Value::as_u64).ok_or_else(|| bad("missing codomain"))? as usize;
        let rows = v.get("entries").and_then(Value::as_array).ok_or_else(|| bad("missing entries"))?;
        let two = ring.from_int(2);
        let mut mono = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r.as_array().filter(|r| r.len() == 4).ok_or_else(|| bad("bad entry"))?;
            let idx = |k: usize| r[k].as_u64().map(|i| i as usize).ok_or_else(|| bad("bad index"));
            let (k, i, j) = (idx(0)?, idx(1)?, idx(2)?);
            let s = ring.parse(&r[3])?;
            mono.push((k, i, j, if i == j { s } else { &s * &two }));
        }
        Self::from_monomials(ring, domain, codomain, mono)
    }
}

/// Coefficients of a homogeneous quadratic map given as a function.
pub fn polarize_quadratic<F>(ring: &Ring, domain: usize, codomain: usize, f: F) -> QuadraticVectorMap
where
    F: Fn(&[Scalar]) -> Vec<Scalar>,
{
    let singles: Vec<Vec<Scalar>> = (0..domain).map(|i| f(&linalg::basis_vector(ring, domain, i))).collect();
    let mut mono = Vec::new();
    for i in 0..domain {
        for (k, c) in singles[i].iter().enumerate() {
            mono.push((k, i, i, c.clone()));
        }
        for j in i + 1..domain {
            let mut x = linalg::basis_vector(ring, domain, i);
            x[j] = ring.one();
            let v = f(&x);
            for k in 0..codomain {
                mono.push((k, i, j, &(&v[k] - &singles[i][k]) - &singles[j][k]));
            }
        }
    }
    QuadraticVectorMap::from_monomials(ring, domain, codomain, mono).expect("indices are in range")
}
