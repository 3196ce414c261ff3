//! Cubic norm structures `(N, #, 1)` on free modules, their standard builders,
//! and associative cubic algebras (optionally with a semilinear involution).
//!
//! A structure is stored as the symmetric trilinear form `theta` with
//! `N(x) = theta(x, x, x)` and the quadratic map `#`. The bilinear trace is
//! derived from the closed form `T(x, y) = T(x) T(y) - 6 theta(1, x, y)` with
//! `T(x) = 3 theta(1, 1, x)`.

use serde_json::{json, Value};
use thiserror::Error;

use crate::compalg::{AlgebraTable, CompAlgError, CompositionAlgebra};
use crate::linalg::{self, Matrix};
use crate::multiforms::{self, MultiformError, QuadraticVectorMap, SymmetricMultilinearForm};
use crate::poly::{self, Poly};
use crate::report::{random_element, sampled, CheckResult, Report, SampleConfig, Witness};
use crate::scalars::{Ring, Scalar, ScalarError};

/// Largest rank for which identities are expanded symbolically.
pub const SYMBOLIC_MAX_RANK: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CnsError {
    #[error("bad base point: {0}")]
    BadBasePoint(String),
    #[error("diagonal coefficients must be units")]
    NonUnitGamma,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("symbolic checks are limited to rank {SYMBOLIC_MAX_RANK}, got {0}")]
    SymbolicTooLarge(usize),
    #[error("malformed structure: {0}")]
    Malformed(String),
    #[error(transparent)]
    Multiform(#[from] MultiformError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    CompAlg(#[from] CompAlgError),
}

#[derive(Clone, Debug)]
pub struct CubicNormStructure {
    ring: Ring,
    rank: usize,
    theta: SymmetricMultilinearForm,
    sharp: QuadraticVectorMap,
    basepoint: Vec<Scalar>,
    trace_linear: Vec<Scalar>,
    gram: Matrix,
}

impl PartialEq for CubicNormStructure {
    fn eq(&self, o: &Self) -> bool {
        self.theta == o.theta && self.sharp == o.sharp && self.basepoint == o.basepoint
    }
}

impl CubicNormStructure {
    pub fn new(
        theta: SymmetricMultilinearForm,
        sharp: QuadraticVectorMap,
        basepoint: Vec<Scalar>,
    ) -> Result<Self, CnsError> {
        let ring = theta.ring().clone();
        let n = theta.rank();
        if theta.degree() != 3 {
            return Err(CnsError::DimensionMismatch(format!("norm form has degree {}", theta.degree())));
        }
        if sharp.domain() != n || sharp.codomain() != n || basepoint.len() != n {
            return Err(CnsError::DimensionMismatch("adjoint and base point must match the norm rank".into()));
        }
        for c in &basepoint {
            ring.check(c)?;
        }
        let n1 = theta.eval_diagonal(&basepoint)?;
        if !n1.is_one() {
            return Err(CnsError::BadBasePoint(format!("N(1) = {n1}")));
        }
        if sharp.eval(&basepoint) != basepoint {
            return Err(CnsError::BadBasePoint("1# != 1".into()));
        }
        // m1[b][c] = theta(1, e_b, e_c)
        let mut m1 = vec![linalg::vzero(&ring, n); n];
        for (t, v) in theta.entries() {
            let (a, b, c) = (t[0], t[1], t[2]);
            let mut perms = vec![[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]];
            perms.sort();
            perms.dedup();
            for p in perms {
                if !basepoint[p[0]].is_zero() {
                    m1[p[1]][p[2]] = &m1[p[1]][p[2]] + &(&basepoint[p[0]] * v);
                }
            }
        }
        let three = ring.from_int(3);
        let six = ring.from_int(6);
        let trace_linear: Vec<Scalar> =
            (0..n).map(|i| &three * &linalg::dot(&basepoint, &linalg::transpose(&m1)[i])).collect();
        let gram = (0..n)
            .map(|i| (0..n).map(|j| &(&trace_linear[i] * &trace_linear[j]) - &(&six * &m1[i][j])).collect())
            .collect();
        Ok(CubicNormStructure { ring, rank: n, theta, sharp, basepoint, trace_linear, gram })
    }

    /// Polarize a norm and an adjoint given as functions.
    pub fn from_functions<N, S>(
        ring: &Ring,
        rank: usize,
        basepoint: Vec<Scalar>,
        norm: N,
        sharp: S,
    ) -> Result<Self, CnsError>
    where
        N: Fn(&[Scalar]) -> Scalar,
        S: Fn(&[Scalar]) -> Vec<Scalar>,
    {
        let theta = multiforms::polarize(ring, rank, 3, norm)?;
        let sharp = multiforms::polarize_quadratic(ring, rank, rank, sharp);
        Self::new(theta, sharp, basepoint)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn theta(&self) -> &SymmetricMultilinearForm {
        &self.theta
    }

    pub fn sharp_map(&self) -> &QuadraticVectorMap {
        &self.sharp
    }

    pub fn basepoint(&self) -> &[Scalar] {
        &self.basepoint
    }

    /// Matrix of the bilinear trace `T(x, y)`.
    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn norm(&self, x: &[Scalar]) -> Scalar {
        self.theta.eval_diagonal(x).expect("element has the structure's rank")
    }

    pub fn sharp(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.sharp.eval(x)
    }

    /// `x x y = (x + y)# - x# - y#`.
    pub fn cross(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        self.sharp.bilinear(x, y)
    }

    pub fn trace(&self, x: &[Scalar]) -> Scalar {
        linalg::dot(&self.trace_linear, x)
    }

    pub fn trace_bilinear(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let mut acc = self.ring.zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() && !self.gram[i][j].is_zero() {
                    acc = &acc + &(&self.gram[i][j] * &(xi * yj));
                }
            }
        }
        acc
    }

    /// `S(x) = T(x#)`.
    pub fn spur(&self, x: &[Scalar]) -> Scalar {
        self.trace(&self.sharp(x))
    }

    /// `theta(x, y, z)`.
    pub fn trilinear(&self, x: &[Scalar], y: &[Scalar], z: &[Scalar]) -> Scalar {
        self.theta.eval(&[x, y, z]).expect("elements have the structure's rank")
    }

    /// Coefficient of `t` in `N(x + t y)`, from the polarized form.
    pub fn dnorm(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        &self.ring.from_int(3) * &self.trilinear(x, x, y)
    }

    /// Base change along `f : R -> ring`.
    pub fn map_scalars(&self, ring: &Ring, f: impl Fn(&Scalar) -> Scalar) -> Result<Self, CnsError> {
        let theta = self.theta.map_scalars(ring, &f);
        let sharp = self.sharp.map_scalars(ring, &f);
        Self::new(theta, sharp, self.basepoint.iter().map(&f).collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.to_json(),
            "rank": self.rank,
            "theta": self.theta.to_json(),
            "sharp": self.sharp.to_json(),
            "basepoint": self.basepoint.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, CnsError> {
        let ring = match v.get("ring") {
            Some(r) => Ring::from_json(r)?,
            None => Ring::rational(),
        };
        let theta = SymmetricMultilinearForm::from_json(
            &ring,
            v.get("theta").ok_or_else(|| CnsError::Malformed("missing theta".into()))?,
        )?;
        let sharp = QuadraticVectorMap::from_json(
            &ring,
            v.get("sharp").ok_or_else(|| CnsError::Malformed("missing sharp".into()))?,
        )?;
        let basepoint =
            ring.parse_vector(v.get("basepoint").ok_or_else(|| CnsError::Malformed("missing basepoint".into()))?)?;
        if let Some(r) = v.get("rank").and_then(Value::as_u64) {
            if r as usize != theta.rank() {
                return Err(CnsError::DimensionMismatch("declared rank differs from the norm form".into()));
            }
        }
        Self::new(theta, sharp, basepoint)
    }
}

/// Coefficient of `t` in the cubic `N(x + t y)`, by interpolation at
/// `t = -1, 0, 1, 2`. Independent of the polarized form.
pub fn dnorm_by_interpolation(norm: impl Fn(&[Scalar]) -> Scalar, ring: &Ring, x: &[Scalar], y: &[Scalar]) -> Scalar {
    let at = |t: i64| norm(&linalg::vadd(x, &linalg::vscale(&ring.from_int(t), y)));
    let num =
        &(&(&(&ring.from_int(-2) * &at(-1)) - &(&ring.from_int(3) * &at(0))) + &(&ring.from_int(6) * &at(1))) - &at(2);
    &num * &ring.from_ratio(1, 6).expect("6 is invertible")
}

/// Sampled check of the cubic norm structure axioms.
pub fn check_cns_axioms(c: &CubicNormStructure, cfg: &SampleConfig) -> Report {
    let ring = c.ring().clone();
    let n = c.rank();
    let one = c.basepoint().to_vec();
    let mut report = Report::new(format!("cubic norm structure of rank {n}"));
    let n1 = c.norm(&one);
    let s1 = c.sharp(&one);
    report.push(CheckResult::exact(
        "base point",
        (!n1.is_one() || s1 != one).then(|| Witness::new(None, format!("N(1) = {n1}")).with("1#", &s1)),
    ));
    report.push(sampled("adjoint identity", cfg, |_, rng| {
        let x = random_element(&ring, n, rng, cfg.bound);
        let lhs = c.sharp(&c.sharp(&x));
        let rhs = linalg::vscale(&c.norm(&x), &x);
        (lhs != rhs).then(|| Witness::new(None, "x## != N(x) x").with("x", &x))
    }));
    report.push(sampled("gradient identity", cfg, |_, rng| {
        let x = random_element(&ring, n, rng, cfg.bound);
        let y = random_element(&ring, n, rng, cfg.bound);
        let lhs = c.trace_bilinear(&c.sharp(&x), &y);
        let oracle = dnorm_by_interpolation(|v| c.norm(v), &ring, &x, &y);
        let polar = c.dnorm(&x, &y);
        (lhs != oracle || oracle != polar).then(|| {
            Witness::new(None, format!("T(x#, y) = {lhs}, D_y N(x) = {oracle}, 3 theta(x,x,y) = {polar}"))
                .with("x", &x)
                .with("y", &y)
        })
    }));
    report.push(sampled("unit cross", cfg, |_, rng| {
        let y = random_element(&ring, n, rng, cfg.bound);
        let lhs = c.cross(&one, &y);
        let rhs = linalg::vsub(&linalg::vscale(&c.trace(&y), &one), &y);
        (lhs != rhs).then(|| Witness::new(None, "1 x y != T(y) 1 - y").with("y", &y))
    }));
    report
}

/// The same axioms as polynomial identities in generic elements.
pub fn check_cns_axioms_symbolic(c: &CubicNormStructure) -> Result<Report, CnsError> {
    let n = c.rank();
    if n > SYMBOLIC_MAX_RANK {
        return Err(CnsError::SymbolicTooLarge(n));
    }
    let ring = c.ring();
    let x = poly::generic_vector(ring, n, 0);
    let y = poly::generic_vector(ring, n, n);
    let one = poly::constant_vector(c.basepoint());
    let mut report = Report::new(format!("cubic norm structure of rank {n} (symbolic)"));
    let exact =
        |name: &str, ok: bool, detail: &str| CheckResult::exact(name, (!ok).then(|| Witness::new(None, detail)));

    let nx = poly::trilinear(c.theta(), &x, &x, &x);
    let xs = poly::quadratic(c.sharp_map(), &x);
    let xss = poly::quadratic(c.sharp_map(), &xs);
    let adj = poly::vsub(&xss, &poly::vscale(&nx, &x));
    report.push(exact("adjoint identity", poly::is_zero_vector(&adj), "x## - N(x) x is not identically zero"));

    let mut lhs = Poly::zero();
    for i in 0..n {
        for j in 0..n {
            if !c.gram()[i][j].is_zero() && !xs[i].is_zero() {
                lhs.axpy(&c.gram()[i][j], &xs[i].mul(&y[j]));
            }
        }
    }
    let mut grad = Poly::zero();
    for (i, yi) in y.iter().enumerate() {
        grad = grad.add(&nx.derivative(ring, i).mul(yi));
    }
    report.push(exact("gradient identity", lhs.sub(&grad).is_zero(), "T(x#, y) - D_y N(x) is not identically zero"));

    let cross = poly::quadratic_bilinear(c.sharp_map(), &one, &y);
    let mut ty = Poly::zero();
    for (i, yi) in y.iter().enumerate() {
        ty.axpy(&c.trace_linear[i], yi);
    }
    let rhs = poly::vsub(&poly::vscale(&ty, &one), &y);
    report.push(exact(
        "unit cross",
        poly::is_zero_vector(&poly::vsub(&cross, &rhs)),
        "1 x y - T(y) 1 + y is not identically zero",
    ));

    let n1 = c.norm(c.basepoint());
    report.push(exact("base point", n1.is_one() && c.sharp(c.basepoint()) == c.basepoint(), "N(1) != 1 or 1# != 1"));
    Ok(report)
}

/// `x -> M omega(x)`: a linear map composed with coordinatewise conjugation of
/// the scalar ring.
#[derive(Clone, Debug, PartialEq)]
pub struct SemilinearMap {
    pub matrix: Matrix,
}

impl SemilinearMap {
    pub fn conjugation(ring: &Ring, n: usize) -> Self {
        SemilinearMap { matrix: linalg::identity(ring, n) }
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        let w: Vec<Scalar> = x.iter().map(Scalar::involute).collect();
        linalg::mat_vec(&self.matrix, &w)
    }
}

/// An associative algebra whose generic minimal polynomial is cubic, with
/// the norm structure that goes with it and an optional involution of the
/// second kind.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociativeCubicAlgebra {
    pub table: AlgebraTable,
    pub cns: CubicNormStructure,
    pub involution: Option<SemilinearMap>,
}

impl AssociativeCubicAlgebra {
    pub fn new(
        table: AlgebraTable,
        cns: CubicNormStructure,
        involution: Option<SemilinearMap>,
    ) -> Result<Self, CnsError> {
        if table.rank() != cns.rank() || table.ring() != cns.ring() {
            return Err(CnsError::DimensionMismatch("table and norm structure differ".into()));
        }
        if table.unit() != cns.basepoint() {
            return Err(CnsError::BadBasePoint("algebra unit differs from the base point".into()));
        }
        Ok(AssociativeCubicAlgebra { table, cns, involution })
    }

    pub fn ring(&self) -> &Ring {
        self.table.ring()
    }

    pub fn rank(&self) -> usize {
        self.table.rank()
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        self.table.mul(x, y)
    }

    pub fn star(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.involution.as_ref().expect("algebra has no involution").apply(x)
    }

    pub fn with_involution(mut self, inv: SemilinearMap) -> Self {
        self.involution = Some(inv);
        self
    }

    /// Base change along `f : R -> ring`; the involution is dropped.
    pub fn map_scalars(&self, ring: &Ring, f: impl Fn(&Scalar) -> Scalar) -> Result<Self, CnsError> {
        let table = self.table.map_scalars(ring, &f);
        let cns = self.cns.map_scalars(ring, &f)?;
        Self::new(table, cns, None)
    }
}

/// Sampled check that an associative cubic algebra (with involution, if any)
/// is admissible as the input of the Tits constructions.
pub fn check_admissible(b: &AssociativeCubicAlgebra, cfg: &SampleConfig) -> Report {
    let ring = b.ring().clone();
    let n = b.rank();
    let c = &b.cns;
    let mut report = Report::new(format!("associative cubic algebra of rank {n}"));
    report.push(sampled("xyx identity", cfg, |_, rng| {
        let x = random_element(&ring, n, rng, cfg.bound);
        let y = random_element(&ring, n, rng, cfg.bound);
        let lhs = b.mul(&b.mul(&x, &y), &x);
        let rhs = linalg::vsub(&linalg::vscale(&c.trace_bilinear(&x, &y), &x), &c.cross(&c.sharp(&x), &y));
        (lhs != rhs).then(|| Witness::new(None, "xyx != T(x,y) x - x# x y").with("x", &x).with("y", &y))
    }));
    report.push(sampled("multiplicative norm", cfg, |_, rng| {
        let x = random_element(&ring, n, rng, cfg.bound);
        let y = random_element(&ring, n, rng, cfg.bound);
        let lhs = c.norm(&b.mul(&x, &y));
        let rhs = &c.norm(&x) * &c.norm(&y);
        (lhs != rhs).then(|| Witness::new(None, "N(xy) != N(x)N(y)").with("x", &x).with("y", &y))
    }));
    if b.involution.is_some() {
        report.push(sampled("involution", cfg, |_, rng| {
            let x = random_element(&ring, n, rng, cfg.bound);
            let y = random_element(&ring, n, rng, cfg.bound);
            if b.star(&b.star(&x)) != x {
                return Some(Witness::new(None, "x** != x").with("x", &x));
            }
            if b.star(&b.mul(&x, &y)) != b.mul(&b.star(&y), &b.star(&x)) {
                return Some(Witness::new(None, "(xy)* != y* x*").with("x", &x).with("y", &y));
            }
            None
        }));
        report.push(sampled("norm of star", cfg, |_, rng| {
            let x = random_element(&ring, n, rng, cfg.bound);
            let lhs = c.norm(&b.star(&x));
            let rhs = c.norm(&x).involute();
            (lhs != rhs).then(|| Witness::new(None, format!("N(x*) = {lhs}, N(x)* = {rhs}")).with("x", &x))
        }));
    }
    report
}

fn unit_vector(ring: &Ring, n: usize, idx: &[usize]) -> Vec<Scalar> {
    let mut v = linalg::vzero(ring, n);
    for &i in idx {
        v[i] = ring.one();
    }
    v
}

/// `R x R x R` with `N = a1 a2 a3` and `# = (a2 a3, a3 a1, a1 a2)`.
pub fn diagonal(ring: &Ring) -> AssociativeCubicAlgebra {
    let one = unit_vector(ring, 3, &[0, 1, 2]);
    let cns = CubicNormStructure::from_functions(
        ring,
        3,
        one.clone(),
        |x| &(&x[0] * &x[1]) * &x[2],
        |x| vec![&x[1] * &x[2], &x[2] * &x[0], &x[0] * &x[1]],
    )
    .expect("diagonal norm structure");
    let table = AlgebraTable::from_triples(ring, 3, (0..3).map(|i| (i, i, i, ring.one())), one).unwrap();
    AssociativeCubicAlgebra::new(table, cns, None).unwrap()
}

/// `R` with `N(x) = x^3`, `x# = x^2`.
pub fn rank1(ring: &Ring) -> CubicNormStructure {
    CubicNormStructure::from_functions(ring, 1, vec![ring.one()], |x| x[0].pow(3), |x| vec![&x[0] * &x[0]])
        .expect("rank one norm structure")
}

/// `R + M` with `N(a, v) = a Q'(v)`, `(a, v)# = (Q'(v), a conj(v))` where
/// `conj(v) = Q'(1', v) 1' - v`. `q` is the Gram matrix of `Q'(v) = v^T q v`.
pub fn spin(ring: &Ring, q: &Matrix, base: &[Scalar]) -> Result<CubicNormStructure, CnsError> {
    let m = base.len();
    if q.len() != m || q.iter().any(|r| r.len() != m) {
        return Err(CnsError::DimensionMismatch("Gram matrix and base point differ in size".into()));
    }
    let qv = |v: &[Scalar]| linalg::dot(v, &linalg::mat_vec(q, v));
    let qb = |u: &[Scalar], v: &[Scalar]| &qv(&linalg::vadd(u, v)) - &(&qv(u) + &qv(v));
    if !qv(base).is_one() {
        return Err(CnsError::BadBasePoint(format!("Q'(1') = {}", qv(base))));
    }
    let mut one = vec![ring.one()];
    one.extend_from_slice(base);
    CubicNormStructure::from_functions(
        ring,
        m + 1,
        one,
        |x| &x[0] * &qv(&x[1..]),
        |x| {
            let v = &x[1..];
            let vbar = linalg::vsub(&linalg::vscale(&qb(base, v), base), v);
            let mut out = vec![qv(v)];
            out.extend(linalg::vscale(&x[0], &vbar));
            out
        },
    )
}

/// Spin factor of a hyperbolic plane `Q'(v) = v0 v1` with base point `(1, 1)`.
pub fn hyperbolic_spin(ring: &Ring) -> CubicNormStructure {
    let h = ring.from_ratio(1, 2).unwrap();
    let q = vec![vec![ring.zero(), h.clone()], vec![h, ring.zero()]];
    spin(ring, &q, &[ring.one(), ring.one()]).expect("hyperbolic plane")
}

/// Hermitian 3x3 matrices over a composition algebra `C`, twisted by
/// `diag(g1, g2, g3)`. Coordinates are `(a1, a2, a3, u1, u2, u3)` with each
/// `u_i` a block of `rank(C)` coordinates.
pub fn h3(c: &CompositionAlgebra, gamma: &[Scalar; 3]) -> Result<CubicNormStructure, CnsError> {
    let ring = c.ring().clone();
    let r = c.rank();
    let ginv: Vec<Scalar> =
        gamma.iter().map(|g| g.inv().map_err(|_| CnsError::NonUnitGamma)).collect::<Result<_, _>>()?;
    // Cyclic (i, j, k).
    let cyc = [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)];
    let block = |x: &[Scalar], i: usize| x[3 + i * r..3 + (i + 1) * r].to_vec();
    let mut one = unit_vector(&ring, 3 + 3 * r, &[0, 1, 2]);
    one.truncate(3 + 3 * r);
    let norm = |x: &[Scalar]| {
        let mut acc = &(&x[0] * &x[1]) * &x[2];
        for &(i, j, k) in &cyc {
            let coef = &(&ginv[k] * &gamma[j]) * &c.norm(&block(x, i));
            acc = &acc - &(&x[i] * &coef);
        }
        let p = c.mul(&c.mul(&block(x, 0), &block(x, 1)), &block(x, 2));
        &acc + &c.trace(&p)
    };
    let sharp = |x: &[Scalar]| {
        let mut out = Vec::with_capacity(3 + 3 * r);
        for &(i, j, k) in &cyc {
            out.push(&(&x[j] * &x[k]) - &(&(&ginv[k] * &gamma[j]) * &c.norm(&block(x, i))));
        }
        for &(i, j, k) in &cyc {
            let uj_uk = c.conj(&c.mul(&block(x, j), &block(x, k)));
            let term =
                linalg::vsub(&linalg::vscale(&(&ginv[j] * &gamma[k]), &uj_uk), &linalg::vscale(&x[i], &block(x, i)));
            out.extend(term);
        }
        out
    };
    CubicNormStructure::from_functions(&ring, 3 + 3 * r, one, norm, sharp)
}

/// Index of entry `(i, j)` in row-major 3x3 coordinates.
pub fn mat3_index(i: usize, j: usize) -> usize {
    3 * i + j
}

/// `3x3` determinant in row-major coordinates.
pub fn det3(x: &[Scalar]) -> Scalar {
    let e = |i: usize, j: usize| &x[mat3_index(i, j)];
    let t1 = e(0, 0) * &(&(e(1, 1) * e(2, 2)) - &(e(1, 2) * e(2, 1)));
    let t2 = e(0, 1) * &(&(e(1, 0) * e(2, 2)) - &(e(1, 2) * e(2, 0)));
    let t3 = e(0, 2) * &(&(e(1, 0) * e(2, 1)) - &(e(1, 1) * e(2, 0)));
    &(&t1 - &t2) + &t3
}

/// Classical adjoint of a `3x3` matrix in row-major coordinates.
pub fn adj3(x: &[Scalar]) -> Vec<Scalar> {
    let e = |i: usize, j: usize| &x[mat3_index(i % 3, j % 3)];
    let mut out = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            out.push(&(e(j + 1, i + 1) * e(j + 2, i + 2)) - &(e(j + 1, i + 2) * e(j + 2, i + 1)));
        }
    }
    out
}

pub fn mat3_mul(x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = &x[mat3_index(i, 0)] * &y[mat3_index(0, j)];
            for k in 1..3 {
                acc = &acc + &(&x[mat3_index(i, k)] * &y[mat3_index(k, j)]);
            }
            out.push(acc);
        }
    }
    out
}

/// `Mat_3(R)` with determinant and classical adjoint.
pub fn mat3(ring: &Ring) -> AssociativeCubicAlgebra {
    let one = unit_vector(ring, 9, &[0, 4, 8]);
    let cns = CubicNormStructure::from_functions(ring, 9, one.clone(), det3, adj3).expect("matrix norm structure");
    let table = AlgebraTable::from_fn(ring, 9, one, mat3_mul);
    AssociativeCubicAlgebra::new(table, cns, None).unwrap()
}

/// A cubic extension `E = k[t]/(f)` as a rank-3 algebra over `k` on the basis
/// `(1, t, t^2)`, with the determinant of the regular representation as norm
/// and the matching adjoint.
pub fn cubic_etale(e: &Ring) -> Result<AssociativeCubicAlgebra, CnsError> {
    if e.degree() != 3 {
        return Err(CnsError::Malformed(format!("{e} is not a cubic extension")));
    }
    let k = e.base().unwrap().clone();
    let to_e = |x: &[Scalar]| e.element(x.to_vec()).expect("coordinates over the base");
    let mul = |x: &[Scalar], y: &[Scalar]| (&to_e(x) * &to_e(y)).coords().unwrap().to_vec();
    let regular = |x: &[Scalar]| {
        let cols: Vec<Vec<Scalar>> = (0..3).map(|j| mul(x, &linalg::basis_vector(&k, 3, j))).collect();
        linalg::transpose(&cols)
    };
    let to_flat = |m: &Matrix| m.iter().flatten().cloned().collect::<Vec<_>>();
    let norm = |x: &[Scalar]| det3(&to_flat(&regular(x)));
    // x# has regular matrix adj(L_x); read off its first column.
    let sharp = |x: &[Scalar]| {
        let a = adj3(&to_flat(&regular(x)));
        vec![a[0].clone(), a[3].clone(), a[6].clone()]
    };
    let one = linalg::basis_vector(&k, 3, 0);
    let cns = CubicNormStructure::from_functions(&k, 3, one.clone(), norm, sharp)?;
    let table = AlgebraTable::from_fn(&k, 3, one, mul);
    AssociativeCubicAlgebra::new(table, cns, None)
}
