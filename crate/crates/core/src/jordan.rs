//! Quadratic Jordan algebras given by their `U` operator.
//!
//! The operator is stored as a tensor: `U_x(y)_k = sum c[k; i, j, l] x_i x_j y_l`
//! over `i <= j`. Algebras built from a cubic norm structure keep it and
//! evaluate `U_x(y) = T(x, y) x - x# x y` directly; the tensor is then only
//! used for symbolic checks and serialization.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cns::{CnsError, CubicNormStructure, SYMBOLIC_MAX_RANK};
use crate::compalg::AlgebraTable;
use crate::linalg::{self, LinalgError, Matrix};
use crate::multiforms;
use crate::poly::{self, Poly};
use crate::report::{random_element, sampled, CheckResult, Report, SampleConfig, Witness};
use crate::scalars::{Ring, Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JordanError {
    #[error("element is not invertible (norm {0})")]
    NotInvertible(String),
    #[error("not a complete orthogonal system of idempotents: {0}")]
    NotIdempotentSystem(String),
    #[error("this operation needs a cubic norm structure")]
    NoNormStructure,
    #[error("symbolic checks are limited to rank {SYMBOLIC_MAX_RANK}, got {0}")]
    SymbolicTooLarge(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("malformed algebra: {0}")]
    Malformed(String),
    #[error(transparent)]
    Cns(#[from] CnsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct UTensor {
    ring: Ring,
    rank: usize,
    /// `terms[k]` lists `(i, j, l, c)` with `i <= j`.
    terms: Vec<Vec<(usize, usize, usize, Scalar)>>,
}

type Acc = BTreeMap<(usize, usize, usize, usize), Scalar>;

fn bump(acc: &mut Acc, ring: &Ring, k: usize, i: usize, j: usize, l: usize, c: Scalar) {
    let key = (k, i.min(j), i.max(j), l);
    let e = acc.entry(key).or_insert_with(|| ring.zero());
    *e = &*e + &c;
}

impl UTensor {
    fn from_acc(ring: &Ring, rank: usize, acc: Acc) -> Self {
        let mut terms = vec![Vec::new(); rank];
        for ((k, i, j, l), c) in acc {
            if !c.is_zero() {
                terms[k].push((i, j, l, c));
            }
        }
        UTensor { ring: ring.clone(), rank, terms }
    }

    pub fn from_terms(
        ring: &Ring,
        rank: usize,
        terms: impl IntoIterator<Item = (usize, usize, usize, usize, Scalar)>,
    ) -> Result<Self, JordanError> {
        let mut acc = Acc::new();
        for (k, i, j, l, c) in terms {
            if k.max(i).max(j).max(l) >= rank {
                return Err(JordanError::DimensionMismatch(format!("term ({k},{i},{j},{l})")));
            }
            ring.check(&c)?;
            bump(&mut acc, ring, k, i, j, l, c);
        }
        Ok(Self::from_acc(ring, rank, acc))
    }

    /// `U_x(y) = T(x, y) x - x# x y`, expanded into monomials.
    pub fn from_cns(c: &CubicNormStructure) -> Self {
        let ring = c.ring();
        let n = c.rank();
        let mut acc = Acc::new();
        for k in 0..n {
            for i in 0..n {
                for l in 0..n {
                    let g = &c.gram()[i][l];
                    if !g.is_zero() {
                        bump(&mut acc, ring, k, i, k, l, g.clone());
                    }
                }
            }
        }
        let s = c.sharp_map().terms();
        for (k, row) in s.iter().enumerate() {
            for (a, b, coef) in row {
                // coef * (x#_a y_b + x#_b y_a)
                for (src, l) in [(*a, *b), (*b, *a)] {
                    for (i, j, sv) in &s[src] {
                        bump(&mut acc, ring, k, *i, *j, l, -&(coef * sv));
                    }
                }
            }
        }
        Self::from_acc(ring, n, acc)
    }

    /// `U_x(y) = x y x` in an associative algebra.
    pub fn from_associative(t: &AlgebraTable) -> Self {
        let ring = t.ring();
        let n = t.rank();
        let mut acc = Acc::new();
        for i in 0..n {
            for l in 0..n {
                for (m, c1) in t.product(i, l) {
                    for j in 0..n {
                        for (k, c2) in t.product(*m, j) {
                            bump(&mut acc, ring, *k, i, j, l, c1 * c2);
                        }
                    }
                }
            }
        }
        Self::from_acc(ring, n, acc)
    }

    /// Tabulate a `U` operator given as a function, quadratic in `x` and
    /// linear in `y`.
    pub fn from_fn<F>(ring: &Ring, rank: usize, f: F) -> Self
    where
        F: Fn(&[Scalar], &[Scalar]) -> Vec<Scalar>,
    {
        let mut acc = Acc::new();
        for l in 0..rank {
            let el = linalg::basis_vector(ring, rank, l);
            let q = multiforms::polarize_quadratic(ring, rank, rank, |x| f(x, &el));
            for (k, row) in q.terms().iter().enumerate() {
                for (i, j, c) in row {
                    bump(&mut acc, ring, k, *i, *j, l, c.clone());
                }
            }
        }
        Self::from_acc(ring, rank, acc)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nnz(&self) -> usize {
        self.terms.iter().map(Vec::len).sum()
    }

    pub fn terms(&self) -> &[Vec<(usize, usize, usize, Scalar)>] {
        &self.terms
    }

    pub fn apply(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        self.terms
            .iter()
            .map(|row| {
                let mut acc = self.ring.zero();
                for (i, j, l, c) in row {
                    if x[*i].is_zero() || x[*j].is_zero() || y[*l].is_zero() {
                        continue;
                    }
                    acc = &acc + &(c * &(&(&x[*i] * &x[*j]) * &y[*l]));
                }
                acc
            })
            .collect()
    }

    /// `U_{x,z}(y) = U_{x+z}(y) - U_x(y) - U_z(y)`.
    pub fn apply2(&self, x: &[Scalar], z: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        self.terms
            .iter()
            .map(|row| {
                let mut acc = self.ring.zero();
                for (i, j, l, c) in row {
                    if y[*l].is_zero() {
                        continue;
                    }
                    let xz = &(&x[*i] * &z[*j]) + &(&x[*j] * &z[*i]);
                    if !xz.is_zero() {
                        acc = &acc + &(c * &(&xz * &y[*l]));
                    }
                }
                acc
            })
            .collect()
    }

    fn apply_poly(&self, x: &[Poly], y: &[Poly]) -> Vec<Poly> {
        let mut cache: BTreeMap<(usize, usize), Poly> = BTreeMap::new();
        self.terms
            .iter()
            .map(|row| {
                let mut acc = Poly::zero();
                for (i, j, l, c) in row {
                    if x[*i].is_zero() || x[*j].is_zero() || y[*l].is_zero() {
                        continue;
                    }
                    let xx = cache.entry((*i, *j)).or_insert_with(|| x[*i].mul(&x[*j]));
                    acc.axpy(c, &xx.mul(&y[*l]));
                }
                acc
            })
            .collect()
    }

    fn apply2_poly(&self, x: &[Poly], z: &[Poly], y: &[Poly]) -> Vec<Poly> {
        let mut cache: BTreeMap<(usize, usize), Poly> = BTreeMap::new();
        self.terms
            .iter()
            .map(|row| {
                let mut acc = Poly::zero();
                for (i, j, l, c) in row {
                    if y[*l].is_zero() {
                        continue;
                    }
                    let xz = cache.entry((*i, *j)).or_insert_with(|| x[*i].mul(&z[*j]).add(&x[*j].mul(&z[*i])));
                    if !xz.is_zero() {
                        acc.axpy(c, &xz.mul(&y[*l]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let mut out = Vec::new();
        for (k, row) in self.terms.iter().enumerate() {
            for (i, j, l, c) in row {
                out.push(json!([k, i, j, l, c.to_json()]));
            }
        }
        Value::Array(out)
    }
}

#[derive(Clone, Debug)]
pub struct JordanAlgebra {
    ring: Ring,
    rank: usize,
    unit: Vec<Scalar>,
    u: UTensor,
    cns: Option<CubicNormStructure>,
    /// Evaluate `U` through the norm structure instead of the tensor.
    cns_kernel: bool,
}

impl JordanAlgebra {
    pub fn from_cns(c: &CubicNormStructure) -> Self {
        JordanAlgebra {
            ring: c.ring().clone(),
            rank: c.rank(),
            unit: c.basepoint().to_vec(),
            u: UTensor::from_cns(c),
            cns: Some(c.clone()),
            cns_kernel: true,
        }
    }

    /// The plus algebra `A+` of an associative algebra, `U_x(y) = x y x`.
    pub fn from_associative(t: &AlgebraTable) -> Self {
        JordanAlgebra {
            ring: t.ring().clone(),
            rank: t.rank(),
            unit: t.unit().to_vec(),
            u: UTensor::from_associative(t),
            cns: None,
            cns_kernel: false,
        }
    }

    /// An algebra known only through its `U` tensor.
    pub fn from_tensor(u: UTensor, unit: Vec<Scalar>) -> Result<Self, JordanError> {
        if unit.len() != u.rank() {
            return Err(JordanError::DimensionMismatch("unit has the wrong length".into()));
        }
        Ok(JordanAlgebra { ring: u.ring.clone(), rank: u.rank(), unit, u, cns: None, cns_kernel: false })
    }

    /// Attach a norm structure to a tensor-backed algebra. The structure is
    /// used for norms and traces; `U` keeps coming from the tensor unless the
    /// two agree exactly.
    pub fn with_cns(mut self, c: CubicNormStructure) -> Result<Self, JordanError> {
        if c.rank() != self.rank || c.ring() != &self.ring {
            return Err(JordanError::DimensionMismatch("norm structure does not match".into()));
        }
        self.cns_kernel = UTensor::from_cns(&c) == self.u;
        self.cns = Some(c);
        Ok(self)
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

    pub fn tensor(&self) -> &UTensor {
        &self.u
    }

    pub fn cns(&self) -> Option<&CubicNormStructure> {
        self.cns.as_ref()
    }

    fn require_cns(&self) -> Result<&CubicNormStructure, JordanError> {
        self.cns.as_ref().ok_or(JordanError::NoNormStructure)
    }

    pub fn u(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        match (&self.cns, self.cns_kernel) {
            (Some(c), true) => {
                let t = c.trace_bilinear(x, y);
                linalg::vsub(&linalg::vscale(&t, x), &c.cross(&c.sharp(x), y))
            }
            _ => self.u.apply(x, y),
        }
    }

    /// `U_{x,z}(y)`.
    pub fn u2(&self, x: &[Scalar], z: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        match (&self.cns, self.cns_kernel) {
            (Some(c), true) => {
                // T(x,y) z + T(z,y) x - (x x z) x y
                let a = linalg::vscale(&c.trace_bilinear(x, y), z);
                let b = linalg::vscale(&c.trace_bilinear(z, y), x);
                linalg::vsub(&linalg::vadd(&a, &b), &c.cross(&c.cross(x, z), y))
            }
            _ => self.u.apply2(x, z, y),
        }
    }

    pub fn square(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.u(x, &self.unit)
    }

    pub fn cube(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.u(x, x)
    }

    /// `x o y = 1/2 U_{x,y}(1)`.
    pub fn bullet(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let half = self.ring.from_ratio(1, 2).expect("2 is invertible");
        linalg::vscale(&half, &self.u2(x, y, &self.unit))
    }

    /// Matrix of `y -> U_x(y)`.
    pub fn u_matrix(&self, x: &[Scalar]) -> Matrix {
        let cols: Vec<Vec<Scalar>> =
            (0..self.rank).map(|l| self.u(x, &linalg::basis_vector(&self.ring, self.rank, l))).collect();
        linalg::transpose(&cols)
    }

    pub fn norm(&self, x: &[Scalar]) -> Result<Scalar, JordanError> {
        Ok(self.require_cns()?.norm(x))
    }

    pub fn trace(&self, x: &[Scalar]) -> Result<Scalar, JordanError> {
        Ok(self.require_cns()?.trace(x))
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "ring": self.ring.to_json(),
            "rank": self.rank,
            "unit": self.unit.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "U": self.u.to_json(),
        });
        if let Some(c) = &self.cns {
            v["cns"] = c.to_json();
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self, JordanError> {
        let bad = |m: &str| JordanError::Malformed(m.to_string());
        let ring = match v.get("ring") {
            Some(r) => Ring::from_json(r)?,
            None => Ring::rational(),
        };
        let rank = v.get("rank").and_then(Value::as_u64).ok_or_else(|| bad("missing rank"))? as usize;
        let unit = ring.parse_vector(v.get("unit").ok_or_else(|| bad("missing unit"))?)?;
        let rows = v.get("U").and_then(Value::as_array).ok_or_else(|| bad("missing U"))?;
        let mut terms = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r.as_array().filter(|r| r.len() == 5).ok_or_else(|| bad("bad U term"))?;
            let idx = |k: usize| r[k].as_u64().map(|i| i as usize).ok_or_else(|| bad("bad index"));
            terms.push((idx(0)?, idx(1)?, idx(2)?, idx(3)?, ring.parse(&r[4])?));
        }
        let j = Self::from_tensor(UTensor::from_terms(&ring, rank, terms)?, unit)?;
        match v.get("cns") {
            Some(c) if !c.is_null() => j.with_cns(CubicNormStructure::from_json(c)?),
            _ => Ok(j),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Sampled,
    Symbolic,
}

/// Unit, fundamental formula and the identity
/// `U_x U_{y,z} x = U_{x, U_x z} y`.
pub fn check_jordan_axioms(j: &JordanAlgebra, cfg: &SampleConfig, mode: CheckMode) -> Result<Report, JordanError> {
    match mode {
        CheckMode::Sampled => Ok(check_sampled(j, cfg)),
        CheckMode::Symbolic => check_symbolic(j),
    }
}

fn unit_check(j: &JordanAlgebra) -> CheckResult {
    let m = j.u_matrix(&j.unit);
    CheckResult::exact(
        "unit",
        (m != linalg::identity(&j.ring, j.rank)).then(|| Witness::new(None, "U_1 is not the identity")),
    )
}

fn check_sampled(j: &JordanAlgebra, cfg: &SampleConfig) -> Report {
    let ring = j.ring.clone();
    let n = j.rank;
    let mut report = Report::new(format!("Jordan algebra of rank {n}"));
    report.push(unit_check(j));
    report.push(sampled("fundamental formula", cfg, |_, rng| {
        let x = random_element(&ring, n, rng, cfg.bound);
        let y = random_element(&ring, n, rng, cfg.bound);
        let z = random_element(&ring, n, rng, cfg.bound);
        let lhs = j.u(&j.u(&x, &y), &z);
        let rhs = j.u(&x, &j.u(&y, &j.u(&x, &z)));
        (lhs != rhs)
            .then(|| Witness::new(None, "U_{U_x y} z != U_x U_y U_x z").with("x", &x).with("y", &y).with("z", &z))
    }));
    report.push(sampled("commutator identity", cfg, |_, rng| {
        let x = random_element(&ring, n, rng, cfg.bound);
        let y = random_element(&ring, n, rng, cfg.bound);
        let z = random_element(&ring, n, rng, cfg.bound);
        let lhs = j.u(&x, &j.u2(&y, &z, &x));
        let rhs = j.u2(&x, &j.u(&x, &z), &y);
        (lhs != rhs)
            .then(|| Witness::new(None, "U_x U_{y,z} x != U_{x, U_x z} y").with("x", &x).with("y", &y).with("z", &z))
    }));
    report
}

fn check_symbolic(j: &JordanAlgebra) -> Result<Report, JordanError> {
    let n = j.rank;
    if n > SYMBOLIC_MAX_RANK {
        return Err(JordanError::SymbolicTooLarge(n));
    }
    let ring = &j.ring;
    let x = poly::generic_vector(ring, n, 0);
    let y = poly::generic_vector(ring, n, n);
    let z = poly::generic_vector(ring, n, 2 * n);
    let u = &j.u;
    let mut report = Report::new(format!("Jordan algebra of rank {n} (symbolic)"));
    report.push(unit_check(j));

    let lhs = u.apply_poly(&u.apply_poly(&x, &y), &z);
    let rhs = u.apply_poly(&x, &u.apply_poly(&y, &u.apply_poly(&x, &z)));
    report.push(CheckResult::exact(
        "fundamental formula",
        (!poly::is_zero_vector(&poly::vsub(&lhs, &rhs)))
            .then(|| Witness::new(None, "U_{U_x y} z - U_x U_y U_x z is not identically zero")),
    ));

    let lhs = u.apply_poly(&x, &u.apply2_poly(&y, &z, &x));
    let rhs = u.apply2_poly(&x, &u.apply_poly(&x, &z), &y);
    report.push(CheckResult::exact(
        "commutator identity",
        (!poly::is_zero_vector(&poly::vsub(&lhs, &rhs)))
            .then(|| Witness::new(None, "U_x U_{y,z} x - U_{x, U_x z} y is not identically zero")),
    ));
    Ok(report)
}

/// `x^{-1} = N(x)^{-1} x#`.
pub fn invert_element(j: &JordanAlgebra, x: &[Scalar]) -> Result<Vec<Scalar>, JordanError> {
    let c = j.require_cns()?;
    let n = c.norm(x);
    let ni = n.inv().map_err(|_| JordanError::NotInvertible(n.to_string()))?;
    Ok(linalg::vscale(&ni, &c.sharp(x)))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PeirceSpace {
    pub i: usize,
    pub j: usize,
    #[serde(serialize_with = "ser_basis")]
    pub basis: Vec<Vec<Scalar>>,
}

fn ser_basis<S: serde::Serializer>(b: &[Vec<Scalar>], s: S) -> Result<S::Ok, S::Error> {
    let v: Vec<Value> = b.iter().map(|x| Value::Array(x.iter().map(Scalar::to_json).collect())).collect();
    v.serialize(s)
}

impl PeirceSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Peirce spaces of a complete orthogonal system of idempotents, diagonal
/// spaces first, then `(i, j)` with `i < j` in lexicographic order. Indices
/// are 1-based.
pub fn peirce_decompose(j: &JordanAlgebra, idempotents: &[Vec<Scalar>]) -> Result<Vec<PeirceSpace>, JordanError> {
    let ring = &j.ring;
    let n = j.rank;
    if idempotents.iter().any(|c| c.len() != n) {
        return Err(JordanError::DimensionMismatch("idempotent has the wrong length".into()));
    }
    let mut sum = linalg::vzero(ring, n);
    for (a, ca) in idempotents.iter().enumerate() {
        sum = linalg::vadd(&sum, ca);
        for (b, cb) in idempotents.iter().enumerate() {
            let p = j.bullet(ca, cb);
            let expect = if a == b { ca.clone() } else { linalg::vzero(ring, n) };
            if p != expect {
                return Err(JordanError::NotIdempotentSystem(format!("c{} o c{} is wrong", a + 1, b + 1)));
            }
        }
    }
    if sum != j.unit {
        return Err(JordanError::NotIdempotentSystem("idempotents do not sum to 1".into()));
    }
    // L[a][r][s]: matrix of x -> x o c_a.
    let l: Vec<Matrix> = idempotents
        .iter()
        .map(|c| {
            let cols: Vec<Vec<Scalar>> = (0..n).map(|s| j.bullet(&linalg::basis_vector(ring, n, s), c)).collect();
            linalg::transpose(&cols)
        })
        .collect();
    let shifted = |a: usize, lambda: &Scalar| -> Matrix {
        let mut m = l[a].clone();
        for (r, row) in m.iter_mut().enumerate() {
            row[r] = &row[r] - lambda;
        }
        m
    };
    let one = ring.one();
    let half = ring.from_ratio(1, 2)?;
    let m = idempotents.len();
    let mut out = Vec::new();
    for a in 0..m {
        let mut rows = shifted(a, &one);
        for b in (0..m).filter(|&b| b != a) {
            rows.extend(l[b].clone());
        }
        out.push(PeirceSpace { i: a + 1, j: a + 1, basis: linalg::nullspace(ring, &rows, n)? });
    }
    for a in 0..m {
        for b in a + 1..m {
            let mut rows = shifted(a, &half);
            rows.extend(shifted(b, &half));
            out.push(PeirceSpace { i: a + 1, j: b + 1, basis: linalg::nullspace(ring, &rows, n)? });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharpolyFit {
    /// `(L, Q, M)` with `x^3 = L x^2 - Q x + M 1`.
    pub coefficients: [Scalar; 3],
    /// `1, x, x^2` are linearly dependent, so the fit is not unique.
    pub degenerate: bool,
}

fn fit_system(j: &JordanAlgebra, x: &[Scalar]) -> (Matrix, Vec<Scalar>) {
    let x2 = j.square(x);
    let x3 = j.cube(x);
    let cols = [x2, linalg::vneg(x), j.unit.clone()];
    let m = (0..j.rank).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    (m, x3)
}

/// Solve `x^3 = L x^2 - Q x + M 1` for `(L, Q, M)`, using `x^2 = U_x 1` and
/// `x^3 = U_x x`.
pub fn charpoly_fit(j: &JordanAlgebra, x: &[Scalar]) -> Result<CharpolyFit, JordanError> {
    if x.len() != j.rank {
        return Err(JordanError::DimensionMismatch("element has the wrong length".into()));
    }
    let (m, rhs) = fit_system(j, x);
    let degenerate = linalg::rank(&m, 3)? < 3;
    let sol = linalg::solve(&j.ring, &m, &rhs)?
        .ok_or_else(|| JordanError::Malformed("x^3 is not in the span of 1, x, x^2".into()))?;
    Ok(CharpolyFit { coefficients: [sol[0].clone(), sol[1].clone(), sol[2].clone()], degenerate })
}

/// Whether `x^3 = L x^2 - Q x + M 1` holds for the given coefficients.
pub fn charpoly_consistent(j: &JordanAlgebra, x: &[Scalar], coeffs: &[Scalar; 3]) -> bool {
    let (m, rhs) = fit_system(j, x);
    linalg::mat_vec(&m, coeffs) == rhs
}

/// `(T(x), S(x), N(x))` with `S(x) = T(x#)`.
pub fn generic_coefficients(j: &JordanAlgebra, x: &[Scalar]) -> Result<[Scalar; 3], JordanError> {
    let c = j.require_cns()?;
    Ok([c.trace(x), c.spur(x), c.norm(x)])
}

/// Sampled check of `x^3 - T(x) x^2 + S(x) x - N(x) 1 = 0`.
pub fn check_degree3_identity(j: &JordanAlgebra, cfg: &SampleConfig) -> Result<CheckResult, JordanError> {
    j.require_cns()?;
    let ring = j.ring.clone();
    let n = j.rank;
    Ok(sampled("degree-3 identity", cfg, |_, rng| {
        let x = random_element(&ring, n, rng, cfg.bound);
        let coeffs = generic_coefficients(j, &x).unwrap();
        (!charpoly_consistent(j, &x, &coeffs)).then(|| Witness::new(None, "x^3 - T x^2 + S x - N 1 != 0").with("x", &x))
    }))
}

/// A sampled element with `1, x, x^2` linearly independent, if one is found.
pub fn find_generic_element(j: &JordanAlgebra, cfg: &SampleConfig) -> Option<(u64, Vec<Scalar>)> {
    (0..cfg.samples as u64).find_map(|i| {
        let x = j.ring.sample_vector(j.rank, cfg.seed, i, cfg.bound);
        let (m, _) = fit_system(j, &x);
        matches!(linalg::rank(&m, 3), Ok(3)).then_some((i, x))
    })
}

/// Gram matrix of the bilinear trace form.
pub fn trace_gram(j: &JordanAlgebra) -> Result<Matrix, JordanError> {
    Ok(j.require_cns()?.gram().clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FpInvariants {
    pub p: u64,
    /// Rank of the reduced form.
    pub rank: usize,
    /// Legendre symbol of the discriminant of the nondegenerate part.
    pub discriminant: i8,
}

/// Rank and discriminant square class of the trace form reduced mod `p`.
/// Algebras over the rationals are reduced entrywise; an entry whose
/// denominator is divisible by `p` is an error.
pub fn fp_invariants(j: &JordanAlgebra, p: u64) -> Result<FpInvariants, JordanError> {
    let gram = trace_gram(j)?;
    gram_fp_invariants(&gram, p)
}

pub fn gram_fp_invariants(gram: &Matrix, p: u64) -> Result<FpInvariants, JordanError> {
    let fp = Ring::prime(p)?;
    let reduced: Matrix = gram
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| match c {
                    Scalar::Rational(q) => fp.from_rat(q),
                    Scalar::Prime { p: q, .. } if *q == p => Ok(c.clone()),
                    _ => Err(ScalarError::RingMismatch(c.ring().to_string(), fp.to_string())),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let diag = linalg::diagonalize_symmetric(&fp, &reduced)?;
    let nonzero: Vec<&Scalar> = diag.iter().filter(|d| !d.is_zero()).collect();
    let disc = nonzero.iter().fold(fp.one(), |acc, d| &acc * *d);
    Ok(FpInvariants { p, rank: nonzero.len(), discriminant: disc.legendre() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{cns, compalg};

    fn cfg() -> SampleConfig {
        SampleConfig::default().with_samples(20)
    }

    #[test]
    fn tensor_agrees_with_norm_kernel() {
        let q = Ring::rational();
        let c =
            cns::h3(&compalg::etale2(&q, &q.from_int(-1)).unwrap(), &[q.one(), q.from_int(2), q.from_int(3)]).unwrap();
        let j = JordanAlgebra::from_cns(&c);
        let x = q.sample_vector(9, 5, 0, 6);
        let y = q.sample_vector(9, 5, 1, 6);
        let z = q.sample_vector(9, 5, 2, 6);
        assert_eq!(j.u(&x, &y), j.tensor().apply(&x, &y));
        assert_eq!(j.u2(&x, &z, &y), j.tensor().apply2(&x, &z, &y));
    }

    #[test]
    fn matrix_plus_algebra() {
        let q = Ring::rational();
        let m = cns::mat3(&q);
        let plus = JordanAlgebra::from_associative(&m.table);
        let cubic = JordanAlgebra::from_cns(&m.cns);
        assert_eq!(plus.tensor(), cubic.tensor());
        assert!(check_jordan_axioms(&plus, &cfg(), CheckMode::Sampled).unwrap().passed());
        assert!(check_jordan_axioms(&plus, &cfg(), CheckMode::Symbolic).unwrap().passed());
    }

    #[test]
    fn perturbed_tensor_fails() {
        let q = Ring::rational();
        let j = JordanAlgebra::from_cns(&cns::diagonal(&q).cns);
        let mut terms: Vec<_> = j
            .tensor()
            .terms()
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().map(move |(i, jj, l, c)| (k, *i, *jj, *l, c.clone())))
            .collect();
        terms.push((0, 0, 1, 2, q.one()));
        let bad = JordanAlgebra::from_tensor(UTensor::from_terms(&q, 3, terms).unwrap(), j.unit().to_vec()).unwrap();
        let r = check_jordan_axioms(&bad, &cfg(), CheckMode::Sampled).unwrap();
        assert!(!r.passed());
        let r = check_jordan_axioms(&bad, &cfg(), CheckMode::Symbolic).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn inverse_and_fit() {
        let q = Ring::rational();
        let j = JordanAlgebra::from_cns(&cns::diagonal(&q).cns);
        let x = vec![q.from_int(1), q.from_int(2), q.from_int(3)];
        let xi = invert_element(&j, &x).unwrap();
        assert_eq!(xi, vec![q.one(), q.from_ratio(1, 2).unwrap(), q.from_ratio(1, 3).unwrap()]);
        assert_eq!(j.u(&x, &xi), x);
        let fit = charpoly_fit(&j, &x).unwrap();
        assert!(!fit.degenerate);
        assert_eq!(fit.coefficients, [q.from_int(6), q.from_int(11), q.from_int(6)]);
        let z = vec![q.from_int(0), q.from_int(2), q.from_int(3)];
        assert!(matches!(invert_element(&j, &z), Err(JordanError::NotInvertible(_))));
    }

    #[test]
    fn json_round_trip() {
        let q = Ring::rational();
        let j = JordanAlgebra::from_cns(&cns::hyperbolic_spin(&q));
        let k = JordanAlgebra::from_json(&j.to_json()).unwrap();
        assert_eq!(k.tensor(), j.tensor());
        assert!(k.cns_kernel);
    }
}
