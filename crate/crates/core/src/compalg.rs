//! Unital algebras given by structure constants, and composition algebras
//! (ranks 1, 2, 4, 8) with their quadratic norms.

use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::{self, Matrix};
use crate::report::{random_element, sampled, CheckResult, Report, SampleConfig, Witness};
use crate::scalars::{Ring, Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompAlgError {
    #[error("doubling a rank-{0} algebra exceeds rank 8")]
    RankOverflow(usize),
    #[error("the doubling parameter is not a unit")]
    NonUnitMu,
    #[error("malformed algebra: {0}")]
    Malformed(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Structure constants: `e_i e_j = sum_k c[i][j][k] e_k`, stored sparsely.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraTable {
    ring: Ring,
    rank: usize,
    mul: Vec<Vec<Vec<(usize, Scalar)>>>,
    unit: Vec<Scalar>,
}

impl AlgebraTable {
    pub fn from_triples(
        ring: &Ring,
        rank: usize,
        triples: impl IntoIterator<Item = (usize, usize, usize, Scalar)>,
        unit: Vec<Scalar>,
    ) -> Result<Self, CompAlgError> {
        if unit.len() != rank {
            return Err(CompAlgError::Malformed("unit has the wrong length".into()));
        }
        let mut dense = vec![vec![linalg::vzero(ring, rank); rank]; rank];
        for (i, j, k, c) in triples {
            if i >= rank || j >= rank || k >= rank {
                return Err(CompAlgError::Malformed(format!("index ({i},{j},{k}) out of range")));
            }
            ring.check(&c)?;
            dense[i][j][k] = &dense[i][j][k] + &c;
        }
        Ok(Self::from_products(ring, dense, unit))
    }

    /// Build from the products `e_i e_j` given as dense vectors.
    pub fn from_products(ring: &Ring, products: Vec<Vec<Vec<Scalar>>>, unit: Vec<Scalar>) -> Self {
        let rank = products.len();
        let mul = products
            .into_iter()
            .map(|row| {
                row.into_iter().map(|v| v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()).collect()
            })
            .collect();
        AlgebraTable { ring: ring.clone(), rank, mul, unit }
    }

    /// Tabulate a bilinear product given as a function.
    pub fn from_fn<F>(ring: &Ring, rank: usize, unit: Vec<Scalar>, f: F) -> Self
    where
        F: Fn(&[Scalar], &[Scalar]) -> Vec<Scalar>,
    {
        let basis: Vec<Vec<Scalar>> = (0..rank).map(|i| linalg::basis_vector(ring, rank, i)).collect();
        let products = (0..rank).map(|i| (0..rank).map(|j| f(&basis[i], &basis[j])).collect()).collect();
        Self::from_products(ring, products, unit)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn product(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.mul[i][j]
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = linalg::vzero(&self.ring, self.rank);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let s = xi * yj;
                for (k, c) in &self.mul[i][j] {
                    out[*k] = &out[*k] + &(&s * c);
                }
            }
        }
        out
    }

    /// Matrix of left multiplication by `x`.
    pub fn left_matrix(&self, x: &[Scalar]) -> Matrix {
        let cols: Vec<Vec<Scalar>> =
            (0..self.rank).map(|j| self.mul(x, &linalg::basis_vector(&self.ring, self.rank, j))).collect();
        linalg::transpose(&cols)
    }

    /// Apply `f` to every structure constant and to the unit.
    pub fn map_scalars(&self, ring: &Ring, f: impl Fn(&Scalar) -> Scalar) -> Self {
        AlgebraTable {
            ring: ring.clone(),
            rank: self.rank,
            mul: self
                .mul
                .iter()
                .map(|row| row.iter().map(|v| v.iter().map(|(k, c)| (*k, f(c))).collect()).collect())
                .collect(),
            unit: self.unit.iter().map(&f).collect(),
        }
    }

    pub fn triples_json(&self) -> Value {
        let mut out = Vec::new();
        for (i, row) in self.mul.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                for (k, c) in v {
                    out.push(json!([i, j, k, c.to_json()]));
                }
            }
        }
        Value::Array(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.to_json(),
            "rank": self.rank,
            "unit": self.unit.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "mul": self.triples_json(),
        })
    }

    pub fn from_json(ring: &Ring, v: &Value) -> Result<Self, CompAlgError> {
        let bad = |m: &str| CompAlgError::Malformed(m.to_string());
        let rank = v.get("rank").and_then(Value::as_u64).ok_or_else(|| bad("missing rank"))? as usize;
        let unit = ring.parse_vector(v.get("unit").ok_or_else(|| bad("missing unit"))?)?;
        let rows = v.get("mul").and_then(Value::as_array).ok_or_else(|| bad("missing mul"))?;
        let mut triples = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r.as_array().filter(|r| r.len() == 4).ok_or_else(|| bad("bad triple"))?;
            let idx = |k: usize| r[k].as_u64().map(|i| i as usize).ok_or_else(|| bad("bad index"));
            triples.push((idx(0)?, idx(1)?, idx(2)?, ring.parse(&r[3])?));
        }
        Self::from_triples(ring, rank, triples, unit)
    }
}

/// A unital algebra with a nondegenerate multiplicative quadratic norm
/// `N(x) = x^T M x`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositionAlgebra {
    table: AlgebraTable,
    norm: Matrix,
}

impl CompositionAlgebra {
    pub fn new(table: AlgebraTable, norm: Matrix) -> Result<Self, CompAlgError> {
        let n = table.rank();
        if norm.len() != n || norm.iter().any(|r| r.len() != n) {
            return Err(CompAlgError::Malformed("norm matrix has the wrong shape".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if norm[i][j] != norm[j][i] {
                    return Err(CompAlgError::Malformed("norm matrix is not symmetric".into()));
                }
            }
        }
        Ok(CompositionAlgebra { table, norm })
    }

    pub fn table(&self) -> &AlgebraTable {
        &self.table
    }

    pub fn ring(&self) -> &Ring {
        self.table.ring()
    }

    pub fn rank(&self) -> usize {
        self.table.rank()
    }

    pub fn unit(&self) -> &[Scalar] {
        self.table.unit()
    }

    pub fn norm_matrix(&self) -> &Matrix {
        &self.norm
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        self.table.mul(x, y)
    }

    pub fn norm(&self, x: &[Scalar]) -> Scalar {
        linalg::dot(x, &linalg::mat_vec(&self.norm, x))
    }

    /// `N(x + y) - N(x) - N(y)`.
    pub fn norm_bilinear(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let v = linalg::dot(x, &linalg::mat_vec(&self.norm, y));
        &v + &v
    }

    pub fn trace(&self, x: &[Scalar]) -> Scalar {
        self.norm_bilinear(self.unit(), x)
    }

    pub fn conj(&self, x: &[Scalar]) -> Vec<Scalar> {
        linalg::vsub(&linalg::vscale(&self.trace(x), self.unit()), x)
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.table.to_json();
        v["norm"] =
            Value::Array(self.norm.iter().map(|r| Value::Array(r.iter().map(Scalar::to_json).collect())).collect());
        v
    }

    pub fn from_json(v: &Value) -> Result<Self, CompAlgError> {
        let ring = match v.get("ring") {
            Some(r) => Ring::from_json(r)?,
            None => Ring::rational(),
        };
        let table = AlgebraTable::from_json(&ring, v)?;
        let rows =
            v.get("norm").and_then(Value::as_array).ok_or_else(|| CompAlgError::Malformed("missing norm".into()))?;
        let norm = rows.iter().map(|r| ring.parse_vector(r)).collect::<Result<Vec<_>, _>>()?;
        Self::new(table, norm)
    }
}

fn diag(ring: &Ring, d: &[Scalar]) -> Matrix {
    let n = d.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { d[i].clone() } else { ring.zero() }).collect()).collect()
}

/// The ground ring itself, `N(x) = x^2`.
pub fn scalar(ring: &Ring) -> CompositionAlgebra {
    let t = AlgebraTable::from_triples(ring, 1, [(0, 0, 0, ring.one())], vec![ring.one()]).unwrap();
    CompositionAlgebra::new(t, vec![vec![ring.one()]]).unwrap()
}

/// `R[s]/(s^2 - d)` on the basis `(1, s)` with `N(a + b s) = a^2 - d b^2`.
pub fn etale2(ring: &Ring, d: &Scalar) -> Result<CompositionAlgebra, CompAlgError> {
    ring.check(d)?;
    let one = ring.one();
    let t = AlgebraTable::from_triples(
        ring,
        2,
        [(0, 0, 0, one.clone()), (0, 1, 1, one.clone()), (1, 0, 1, one.clone()), (1, 1, 0, d.clone())],
        vec![one.clone(), ring.zero()],
    )?;
    CompositionAlgebra::new(t, diag(ring, &[one, -d]))
}

/// 2x2 matrices on `(E11, E12, E21, E22)` with the determinant as norm.
pub fn split_quaternion(ring: &Ring) -> CompositionAlgebra {
    let idx = |r: usize, c: usize| 2 * r + c;
    let mut triples = Vec::new();
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        for d in 0..2 {
            triples.push((idx(a, b), idx(b, d), idx(a, d), ring.one()));
        }
    }
    let unit = vec![ring.one(), ring.zero(), ring.zero(), ring.one()];
    let t = AlgebraTable::from_triples(ring, 4, triples, unit).unwrap();
    let h = ring.from_ratio(1, 2).unwrap();
    let mut m = vec![linalg::vzero(ring, 4); 4];
    m[0][3] = h.clone();
    m[3][0] = h.clone();
    m[1][2] = -&h;
    m[2][1] = -&h;
    CompositionAlgebra::new(t, m).unwrap()
}

/// Cayley-Dickson doubling `D + D` with
/// `(a, b)(c, d) = (ac + mu conj(d) b, d a + b conj(c))` and
/// `N(a, b) = N(a) - mu N(b)`.
pub fn cayley_dickson(d: &CompositionAlgebra, mu: &Scalar) -> Result<CompositionAlgebra, CompAlgError> {
    if 2 * d.rank() > 8 {
        return Err(CompAlgError::RankOverflow(d.rank()));
    }
    cayley_dickson_unchecked(d, mu)
}

/// The doubling without the rank guard, for building the rank-16 negative
/// control.
pub fn cayley_dickson_unchecked(d: &CompositionAlgebra, mu: &Scalar) -> Result<CompositionAlgebra, CompAlgError> {
    let ring = d.ring().clone();
    ring.check(mu)?;
    if !mu.is_unit() {
        return Err(CompAlgError::NonUnitMu);
    }
    let n = d.rank();
    let split = |x: &[Scalar]| (x[..n].to_vec(), x[n..].to_vec());
    let mut unit = d.unit().to_vec();
    unit.extend(linalg::vzero(&ring, n));
    let table = AlgebraTable::from_fn(&ring, 2 * n, unit, |x, y| {
        let (a, b) = split(x);
        let (c, dd) = split(y);
        let first = linalg::vadd(&d.mul(&a, &c), &linalg::vscale(mu, &d.mul(&d.conj(&dd), &b)));
        let second = linalg::vadd(&d.mul(&dd, &a), &d.mul(&b, &d.conj(&c)));
        let mut out = first;
        out.extend(second);
        out
    });
    let mut m = vec![linalg::vzero(&ring, 2 * n); 2 * n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = d.norm_matrix()[i][j].clone();
            m[n + i][n + j] = -&(mu * &d.norm_matrix()[i][j]);
        }
    }
    CompositionAlgebra::new(table, m)
}

/// Zorn vector matrices `[[a, u], [v, b]]` on the basis
/// `(e11, e22, u1, u2, u3, v1, v2, v3)` with norm `ab - u.v` and product
/// `[[aa' + u.v', a u' + b' u - v x v'], [a' v + b v' + u x u', bb' + v.u']]`.
pub fn zorn(ring: &Ring) -> CompositionAlgebra {
    let dot3 = |u: &[Scalar], v: &[Scalar]| linalg::dot(u, v);
    let cross = |u: &[Scalar], v: &[Scalar]| {
        vec![
            &(&u[1] * &v[2]) - &(&u[2] * &v[1]),
            &(&u[2] * &v[0]) - &(&u[0] * &v[2]),
            &(&u[0] * &v[1]) - &(&u[1] * &v[0]),
        ]
    };
    let mut unit = linalg::vzero(ring, 8);
    unit[0] = ring.one();
    unit[1] = ring.one();
    let table = AlgebraTable::from_fn(ring, 8, unit, |x, y| {
        let (a, b, u, v) = (&x[0], &x[1], &x[2..5], &x[5..8]);
        let (a2, b2, u2, v2) = (&y[0], &y[1], &y[2..5], &y[5..8]);
        let top = &(a * a2) + &dot3(u, v2);
        let bottom = &(b * b2) + &dot3(v, u2);
        let uu = linalg::vsub(&linalg::vadd(&linalg::vscale(a, u2), &linalg::vscale(b2, u)), &cross(v, v2));
        let vv = linalg::vadd(&linalg::vadd(&linalg::vscale(a2, v), &linalg::vscale(b, v2)), &cross(u, u2));
        let mut out = vec![top, bottom];
        out.extend(uu);
        out.extend(vv);
        out
    });
    let h = ring.from_ratio(1, 2).unwrap();
    let mut m = vec![linalg::vzero(ring, 8); 8];
    m[0][1] = h.clone();
    m[1][0] = h.clone();
    for i in 0..3 {
        m[2 + i][5 + i] = -&h;
        m[5 + i][2 + i] = -&h;
    }
    CompositionAlgebra::new(table, m).unwrap()
}

/// Sampled multiplicativity and conjugation identities plus exact
/// nondegeneracy of the norm.
pub fn check_composition(c: &CompositionAlgebra, cfg: &SampleConfig) -> Report {
    let ring = c.ring().clone();
    let n = c.rank();
    let mut report = Report::new(format!("composition algebra of rank {n}"));
    let unit_norm = c.norm(c.unit());
    report.push(CheckResult::exact(
        "unit norm",
        (!unit_norm.is_one()).then(|| Witness::new(None, format!("N(1) = {unit_norm}"))),
    ));
    report.push(sampled("multiplicative", cfg, |_, rng| {
        let x = random_element(&ring, n, rng, cfg.bound);
        let y = random_element(&ring, n, rng, cfg.bound);
        let lhs = c.norm(&c.mul(&x, &y));
        let rhs = &c.norm(&x) * &c.norm(&y);
        (lhs != rhs).then(|| Witness::new(None, format!("N(xy) = {lhs}, N(x)N(y) = {rhs}")).with("x", &x).with("y", &y))
    }));
    report.push(sampled("conjugation", cfg, |_, rng| {
        let x = random_element(&ring, n, rng, cfg.bound);
        let lhs = c.mul(&x, &c.conj(&x));
        let rhs = linalg::vscale(&c.norm(&x), c.unit());
        (lhs != rhs).then(|| Witness::new(None, "x conj(x) != N(x) 1").with("x", &x))
    }));
    let nondeg = if ring.is_field() {
        match linalg::rank(c.norm_matrix(), n) {
            Ok(r) if r == n => None,
            Ok(r) => Some(Witness::new(None, format!("norm form has rank {r} < {n}"))),
            Err(e) => Some(Witness::new(None, e.to_string())),
        }
    } else {
        match linalg::determinant(&ring, c.norm_matrix()) {
            Ok(d) if d.is_unit() => None,
            _ => Some(Witness::new(None, "norm form discriminant is not a unit")),
        }
    };
    report.push(CheckResult::exact("nondegenerate", nondeg));
    report
}
