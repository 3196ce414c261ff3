//! The first Tits construction and the Tits process on free modules.
//!
//! Algebras over a quadratic extension `K/k` are written in `K`-coordinates.
//! Whenever a structure has to live over `k` (the process output, the
//! hermitian part `H(B, *)`), each `K`-coordinate is split into its two
//! `k`-coordinates on the basis `(1, sqrt d)`, interleaved.

use std::sync::atomic::{AtomicBool, Ordering};

use serde_json::{json, Value};
use thiserror::Error;

use crate::cns::{self, AssociativeCubicAlgebra, CnsError, CubicNormStructure, SemilinearMap};
use crate::compalg::AlgebraTable;
use crate::linalg::{self, LinalgError, Matrix};
use crate::report::{random_element, sampled, CheckResult, Report, SampleConfig, Witness};
use crate::scalars::{Ring, Scalar, ScalarError};

pub use crate::cns::check_admissible as check_b_admissible;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TitsError {
    #[error("input algebra is not admissible: {0}")]
    AdmissibilityFailure(String),
    #[error("hermitian part is not ample: {0}")]
    AmpleFailure(String),
    #[error("N(u) != beta beta*: {0}")]
    NormCompatibilityFailure(String),
    #[error("matrix is not hermitian")]
    NotHermitian,
    #[error("matrix is singular")]
    Singular,
    #[error("{0} is not invertible")]
    NotInvertible(String),
    #[error("embedding check '{check}' failed: {detail}")]
    EmbeddingFailure { check: String, detail: String },
    #[error("scalar ring: {0}")]
    BadScalarRing(String),
    #[error(transparent)]
    Cns(#[from] CnsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

fn require(report: &Report, err: fn(String) -> TitsError) -> Result<(), TitsError> {
    match report.first_failure() {
        None => Ok(()),
        Some(c) => {
            let detail = c.witness.as_ref().map(|w| w.detail.clone()).unwrap_or_default();
            Err(err(format!("{}: {detail}", c.name)))
        }
    }
}

/// Split `K`-coordinates into interleaved `k`-coordinates.
pub fn restrict(v: &[Scalar]) -> Vec<Scalar> {
    v.iter().flat_map(|x| x.coords().expect("quadratic extension element").to_vec()).collect()
}

/// Inverse of [`restrict`].
pub fn extend(big: &Ring, v: &[Scalar]) -> Vec<Scalar> {
    v.chunks(2).map(|c| big.element(c.to_vec()).expect("coordinates over the base")).collect()
}

/// Matrix over `k` of a `k`-linear map `K^n -> K^m`.
pub fn restricted_matrix(big: &Ring, n: usize, f: impl Fn(&[Scalar]) -> Vec<Scalar>) -> Matrix {
    let k = big.base().expect("quadratic extension");
    let cols: Vec<Vec<Scalar>> =
        (0..2 * n).map(|r| restrict(&f(&extend(big, &linalg::basis_vector(k, 2 * n, r))))).collect();
    linalg::transpose(&cols)
}

fn base_part(x: &Scalar) -> (Scalar, bool) {
    let c = x.coords().expect("quadratic extension element");
    (c[0].clone(), c[1].is_zero())
}

fn quadratic_ring(big: &Ring) -> Result<Ring, TitsError> {
    match big.base() {
        Some(k) if big.degree() == 2 && big.has_involution() => Ok(k.clone()),
        _ => Err(TitsError::BadScalarRing(format!("{big} is not a quadratic extension with involution"))),
    }
}

/// An element `l` of the quadratic extension with `l + l* = 1`, if one
/// exists. When it does, the ample subspace of a hermitian algebra is all of
/// its fixed points.
pub fn trace_one_element(big: &Ring) -> Result<Option<Scalar>, TitsError> {
    let k = quadratic_ring(big)?;
    let Ok(half) = k.from_int(2).inv() else { return Ok(None) };
    let l = big.embed(half);
    debug_assert_eq!(&l + &l.involute(), big.one());
    Ok(Some(l))
}

fn invert(c: &CubicNormStructure, x: &[Scalar], what: &str) -> Result<Vec<Scalar>, TitsError> {
    let n = c.norm(x);
    let ni = n.inv().map_err(|_| TitsError::NotInvertible(what.to_string()))?;
    Ok(linalg::vscale(&ni, &c.sharp(x)))
}

/// `J(A, beta)` on `A + A + A` with
/// `N = N(a0) + beta N(a1) + beta^-1 N(a2) - T(a0, a1 a2)` and
/// `# = (a0# - a1 a2, beta^-1 a2# - a0 a1, beta a1# - a2 a0)`.
pub fn first_tits(
    a: &AssociativeCubicAlgebra,
    beta: &Scalar,
    cfg: &SampleConfig,
) -> Result<CubicNormStructure, TitsError> {
    require(&cns::check_admissible(a, cfg), TitsError::AdmissibilityFailure)?;
    first_tits_unchecked(a, beta)
}

fn first_tits_unchecked(a: &AssociativeCubicAlgebra, beta: &Scalar) -> Result<CubicNormStructure, TitsError> {
    let ring = a.ring();
    ring.check(beta)?;
    let bi = beta.inv().map_err(|_| TitsError::NotInvertible(format!("beta = {beta}")))?;
    let n = a.rank();
    let c = &a.cns;
    let parts = |x: &[Scalar]| (x[..n].to_vec(), x[n..2 * n].to_vec(), x[2 * n..].to_vec());
    let norm = |x: &[Scalar]| {
        let (a0, a1, a2) = parts(x);
        let t = c.trace_bilinear(&a0, &a.mul(&a1, &a2));
        &(&(&c.norm(&a0) + &(beta * &c.norm(&a1))) + &(&bi * &c.norm(&a2))) - &t
    };
    let sharp = |x: &[Scalar]| {
        let (a0, a1, a2) = parts(x);
        let mut out = linalg::vsub(&c.sharp(&a0), &a.mul(&a1, &a2));
        out.extend(linalg::vsub(&linalg::vscale(&bi, &c.sharp(&a2)), &a.mul(&a0, &a1)));
        out.extend(linalg::vsub(&linalg::vscale(beta, &c.sharp(&a1)), &a.mul(&a2, &a0)));
        out
    };
    let mut one = a.table.unit().to_vec();
    one.extend(linalg::vzero(ring, 2 * n));
    Ok(CubicNormStructure::from_functions(ring, 3 * n, one, norm, sharp)?)
}

/// The canonical map `a -> (a, 0, 0)` from `A` into `J(A, beta)`.
pub fn first_tits_inclusion(a: &AssociativeCubicAlgebra, x: &[Scalar]) -> Vec<Scalar> {
    let mut v = x.to_vec();
    v.extend(linalg::vzero(a.ring(), 2 * a.rank()));
    v
}

/// `sigma(M) = H^-1 omega(M)^T H` on `Mat_3(K)`, as a semilinear map on the
/// row-major coordinates of `M`.
pub fn adjoint_involution(h: &Matrix) -> Result<SemilinearMap, TitsError> {
    if h.len() != 3 || h.iter().any(|r| r.len() != 3) {
        return Err(TitsError::Linalg(LinalgError::DimensionMismatch("hermitian form must be 3x3".into())));
    }
    let big = h[0][0].ring();
    for i in 0..3 {
        for j in 0..3 {
            if h[i][j] != h[j][i].involute() {
                return Err(TitsError::NotHermitian);
            }
        }
    }
    let hi = linalg::inverse(&big, h).map_err(|e| match e {
        LinalgError::Singular | LinalgError::NotAField => TitsError::Singular,
        e => e.into(),
    })?;
    let mut m = vec![linalg::vzero(&big, 9); 9];
    for i in 0..3 {
        for j in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    m[cns::mat3_index(i, j)][cns::mat3_index(b, a)] = &hi[i][a] * &h[b][j];
                }
            }
        }
    }
    Ok(SemilinearMap { matrix: m })
}

/// `Mat_3(K)` with the involution adjoint to a hermitian form.
pub fn mat3_with_form(h: &Matrix) -> Result<AssociativeCubicAlgebra, TitsError> {
    let sigma = adjoint_involution(h)?;
    let big = h[0][0].ring();
    Ok(cns::mat3(&big).with_involution(sigma))
}

/// Basis of `H(B, *)` over `k`, in `K`-coordinates.
pub fn hermitian_fixed_basis(b: &AssociativeCubicAlgebra) -> Result<Vec<Vec<Scalar>>, TitsError> {
    let big = b.ring();
    let k = quadratic_ring(big)?;
    let inv = b.involution.as_ref().ok_or_else(|| TitsError::AdmissibilityFailure("no involution".into()))?;
    let n = b.rank();
    let mut s = restricted_matrix(big, n, |x| inv.apply(x));
    for (r, row) in s.iter_mut().enumerate() {
        row[r] = &row[r] - &k.one();
    }
    Ok(linalg::nullspace(&k, &s, 2 * n)?.iter().map(|v| extend(big, v)).collect())
}

/// `J(B, *, u, beta)` on `H(B, *) + B` over the fixed field `k`, with
/// `N(a, b) = N(a) + beta N(b) + beta^-1 N(u b*) - T(a, b u b*)` and
/// `(a, b)# = (a# - b u b*, beta^-1 (u b*)# - a b)`.
#[derive(Clone, Debug)]
pub struct TitsProcess {
    pub b: AssociativeCubicAlgebra,
    pub u: Vec<Scalar>,
    pub beta: Scalar,
    /// Basis of `H(B, *)` over `k`, in `K`-coordinates.
    pub hermitian_basis: Vec<Vec<Scalar>>,
    pub cns: CubicNormStructure,
    /// `k`-coordinates of the basis vectors, one per column.
    basis_matrix: Matrix,
}

impl TitsProcess {
    pub fn base_ring(&self) -> &Ring {
        self.cns.ring()
    }

    pub fn big_ring(&self) -> &Ring {
        self.b.ring()
    }

    pub fn hermitian_dim(&self) -> usize {
        self.hermitian_basis.len()
    }

    /// `(a, w)` in `K`-coordinates from a point of the process module.
    pub fn split(&self, x: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
        let m = self.hermitian_dim();
        let big = self.big_ring();
        let mut a = linalg::vzero(big, self.b.rank());
        for (c, h) in x[..m].iter().zip(&self.hermitian_basis) {
            a = linalg::vadd(&a, &linalg::vscale(&big.embed(c.clone()), h));
        }
        (a, extend(big, &x[m..]))
    }

    /// Coordinates in the hermitian basis, or `None` if `h` is not hermitian.
    pub fn hermitian_coords(&self, h: &[Scalar]) -> Option<Vec<Scalar>> {
        linalg::solve(self.base_ring(), &self.basis_matrix, &restrict(h)).ok().flatten()
    }

    pub fn join(&self, a: &[Scalar], w: &[Scalar]) -> Option<Vec<Scalar>> {
        let mut x = self.hermitian_coords(a)?;
        x.extend(restrict(w));
        Some(x)
    }

    /// The norm evaluated in `K`.
    pub fn norm_in_big(&self, a: &[Scalar], w: &[Scalar]) -> Scalar {
        process_norm(&self.b, &self.u, &self.beta, a, w)
    }

    /// The adjoint in `K`-coordinates.
    pub fn sharp_in_big(&self, a: &[Scalar], w: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
        process_sharp(&self.b, &self.u, &self.beta, a, w)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "tits_process",
            "hermitian_basis": self.hermitian_basis.iter().map(|h| h.iter().map(Scalar::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "u": self.u.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "beta": self.beta.to_json(),
            "cns": self.cns.to_json(),
        })
    }
}

fn process_norm(b: &AssociativeCubicAlgebra, u: &[Scalar], beta: &Scalar, a: &[Scalar], w: &[Scalar]) -> Scalar {
    let c = &b.cns;
    let bi = beta.inv().expect("beta is a unit");
    let ubs = b.mul(u, &b.star(w));
    let bubs = b.mul(w, &ubs);
    &(&(&c.norm(a) + &(beta * &c.norm(w))) + &(&bi * &c.norm(&ubs))) - &c.trace_bilinear(a, &bubs)
}

fn process_sharp(
    b: &AssociativeCubicAlgebra,
    u: &[Scalar],
    beta: &Scalar,
    a: &[Scalar],
    w: &[Scalar],
) -> (Vec<Scalar>, Vec<Scalar>) {
    let c = &b.cns;
    let bi = beta.inv().expect("beta is a unit");
    let ubs = b.mul(u, &b.star(w));
    let first = linalg::vsub(&c.sharp(a), &b.mul(w, &ubs));
    let second = linalg::vsub(&linalg::vscale(&bi, &c.sharp(&ubs)), &b.mul(a, w));
    (first, second)
}

fn check_ample(
    b: &AssociativeCubicAlgebra,
    basis: &[Vec<Scalar>],
    basis_matrix: &Matrix,
    cfg: &SampleConfig,
) -> Report {
    let big = b.ring().clone();
    let k = big.base().unwrap().clone();
    let n = b.rank();
    let in_a = |h: &[Scalar]| matches!(linalg::solve(&k, basis_matrix, &restrict(h)), Ok(Some(_)));
    let random_a = |rng: &mut _| {
        let coeffs = random_element(&k, basis.len(), rng, cfg.bound);
        coeffs
            .iter()
            .zip(basis)
            .fold(linalg::vzero(&big, n), |acc, (c, h)| linalg::vadd(&acc, &linalg::vscale(&big.embed(c.clone()), h)))
    };
    let mut report = Report::new("hermitian part");
    report.push(CheckResult::exact(
        "unit is hermitian",
        (!in_a(b.table.unit())).then(|| Witness::new(None, "1 is not in H(B, *)")),
    ));
    report.push(sampled("ample", cfg, |_, rng| {
        let a = random_a(rng);
        let w = random_element(&big, n, rng, cfg.bound);
        let waw = b.mul(&b.mul(&w, &a), &b.star(&w));
        if !in_a(&waw) {
            return Some(Witness::new(None, "b a b* is not hermitian").with("a", &a).with("b", &w));
        }
        if !base_part(&b.cns.norm(&a)).1 {
            return Some(Witness::new(None, "N(a) is not in the base field").with("a", &a));
        }
        if !in_a(&b.cns.sharp(&a)) {
            return Some(Witness::new(None, "a# is not hermitian").with("a", &a));
        }
        None
    }));
    report
}

/// The classical Tits process over the fixed field of the involution on `K`.
pub fn tits_process(
    b: &AssociativeCubicAlgebra,
    u: &[Scalar],
    beta: &Scalar,
    cfg: &SampleConfig,
) -> Result<TitsProcess, TitsError> {
    let big = b.ring().clone();
    let k = quadratic_ring(&big)?;
    if b.involution.is_none() {
        return Err(TitsError::AdmissibilityFailure("no involution".into()));
    }
    if u.len() != b.rank() {
        return Err(TitsError::Linalg(LinalgError::DimensionMismatch("u has the wrong length".into())));
    }
    big.check(beta)?;
    for x in u {
        big.check(x)?;
    }
    require(&cns::check_admissible(b, cfg), TitsError::AdmissibilityFailure)?;
    beta.inv().map_err(|_| TitsError::NotInvertible(format!("beta = {beta}")))?;
    if b.star(u) != u {
        return Err(TitsError::AmpleFailure("u is not hermitian".into()));
    }
    invert(&b.cns, u, "u")?;
    let nu = b.cns.norm(u);
    let bb = beta * &beta.involute();
    if nu != bb {
        return Err(TitsError::NormCompatibilityFailure(format!("N(u) = {nu}, beta beta* = {bb}")));
    }

    let basis = hermitian_fixed_basis(b)?;
    let basis_matrix = linalg::transpose(&basis.iter().map(|h| restrict(h)).collect::<Vec<_>>());
    require(&check_ample(b, &basis, &basis_matrix, cfg), TitsError::AmpleFailure)?;

    let m = basis.len();
    let n = b.rank();
    let split = |x: &[Scalar]| {
        let mut a = linalg::vzero(&big, n);
        for (c, h) in x[..m].iter().zip(&basis) {
            a = linalg::vadd(&a, &linalg::vscale(&big.embed(c.clone()), h));
        }
        (a, extend(&big, &x[m..]))
    };
    let leaked = AtomicBool::new(false);
    let norm = |x: &[Scalar]| {
        let (a, w) = split(x);
        let (re, real) = base_part(&process_norm(b, u, beta, &a, &w));
        if !real {
            leaked.store(true, Ordering::Relaxed);
        }
        re
    };
    let sharp = |x: &[Scalar]| {
        let (a, w) = split(x);
        let (s0, s1) = process_sharp(b, u, beta, &a, &w);
        let Ok(Some(mut out)) = linalg::solve(&k, &basis_matrix, &restrict(&s0)) else {
            leaked.store(true, Ordering::Relaxed);
            return linalg::vzero(&k, m + 2 * n);
        };
        out.extend(restrict(&s1));
        out
    };
    let mut one = linalg::solve(&k, &basis_matrix, &restrict(b.table.unit()))?.expect("unit is hermitian");
    one.extend(linalg::vzero(&k, 2 * n));
    let cns = CubicNormStructure::from_functions(&k, m + 2 * n, one, norm, sharp)?;
    if leaked.load(Ordering::Relaxed) {
        return Err(TitsError::AmpleFailure("norm or adjoint left the hermitian part".into()));
    }
    Ok(TitsProcess { b: b.clone(), u: u.to_vec(), beta: beta.clone(), hermitian_basis: basis, cns, basis_matrix })
}

/// `E (x) K` with `* = id (x) omega`, for a commutative cubic algebra `E` over `k`.
pub fn etale_tensor(e: &AssociativeCubicAlgebra, d: &Scalar) -> Result<AssociativeCubicAlgebra, TitsError> {
    let big = Ring::quadratic(e.ring(), d.clone())?;
    let b = e.map_scalars(&big, |x| big.embed(x.clone()))?;
    Ok(b.with_involution(SemilinearMap::conjugation(&big, e.rank())))
}

/// `K` itself as a cubic algebra, `N(x) = x^3`, with `* = omega`.
pub fn rank1_algebra(big: &Ring) -> AssociativeCubicAlgebra {
    let table = AlgebraTable::from_triples(big, 1, [(0, 0, 0, big.one())], vec![big.one()]).unwrap();
    AssociativeCubicAlgebra::new(table, cns::rank1(big), Some(SemilinearMap::conjugation(big, 1))).unwrap()
}

#[derive(Clone, Debug, PartialEq)]
pub enum EtaleParams {
    /// Process with `B = E (x) k(sqrt d)`.
    Process { e: AssociativeCubicAlgebra, d: Scalar, u: Option<Vec<Scalar>>, beta: Option<Scalar> },
    /// Process with `B = k(sqrt d)`, giving a rank-3 structure.
    Rank1Process { k: Ring, d: Scalar, u: Option<Scalar>, beta: Option<Scalar> },
    /// First construction `J(E, beta)`.
    First { e: AssociativeCubicAlgebra, beta: Scalar },
}

/// Étale Tits process, its rank-one degenerate case, or the étale first
/// construction.
pub fn build_etale(params: &EtaleParams, cfg: &SampleConfig) -> Result<CubicNormStructure, TitsError> {
    match params {
        EtaleParams::Process { e, d, u, beta } => {
            if e.rank() != 3 || !is_commutative(&e.table) {
                return Err(TitsError::AdmissibilityFailure("E must be commutative of rank 3".into()));
            }
            let b = etale_tensor(e, d)?;
            let big = b.ring().clone();
            let u = u.clone().unwrap_or_else(|| b.table.unit().to_vec());
            let beta = beta.clone().unwrap_or_else(|| big.one());
            Ok(tits_process(&b, &u, &beta, cfg)?.cns)
        }
        EtaleParams::Rank1Process { k, d, u, beta } => {
            let big = Ring::quadratic(k, d.clone())?;
            let b = rank1_algebra(&big);
            let u = vec![u.clone().unwrap_or_else(|| big.one())];
            let beta = beta.clone().unwrap_or_else(|| big.one());
            Ok(tits_process(&b, &u, &beta, cfg)?.cns)
        }
        EtaleParams::First { e, beta } => {
            if e.rank() != 3 || !is_commutative(&e.table) {
                return Err(TitsError::AdmissibilityFailure("E must be commutative of rank 3".into()));
            }
            first_tits(e, beta, cfg)
        }
    }
}

fn is_commutative(t: &AlgebraTable) -> bool {
    let n = t.rank();
    (0..n).all(|i| (0..i).all(|j| t.product(i, j) == t.product(j, i)))
}

/// The process module inside `J(B, beta)` over `K`.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub first: CubicNormStructure,
    /// `k`-linear matrix of `phi` into the restricted first construction.
    pub phi: Matrix,
    /// Dimension over `k` of the fixed space of the involution on `J(B, beta)`.
    pub fixed_dim: usize,
    pub report: Report,
}

/// `(b, w, v) -> (b*, v* u^-1, u w*)` on `J(B, beta)`.
pub fn first_involution(p: &TitsProcess, x: &[Scalar]) -> Vec<Scalar> {
    let b = &p.b;
    let n = b.rank();
    let ui = invert(&b.cns, &p.u, "u").expect("u is invertible");
    let mut out = b.star(&x[..n]);
    out.extend(b.mul(&b.star(&x[2 * n..]), &ui));
    out.extend(b.mul(&p.u, &b.star(&x[n..2 * n])));
    out
}

/// `phi(a, w) = (a, w, u w*)`.
pub fn process_embedding(p: &TitsProcess, x: &[Scalar]) -> Vec<Scalar> {
    let (a, w) = p.split(x);
    let mut out = a;
    out.extend(w.iter().cloned());
    out.extend(p.b.mul(&p.u, &p.b.star(&w)));
    out
}

/// Check that `phi` preserves base points, norms and adjoints, and that its
/// image is the fixed space of [`first_involution`].
pub fn check_embedding<F>(
    p: &TitsProcess,
    first: &CubicNormStructure,
    phi: F,
    cfg: &SampleConfig,
) -> Result<Embedding, TitsError>
where
    F: Fn(&[Scalar]) -> Vec<Scalar> + Sync,
{
    let k = p.base_ring().clone();
    let big = p.big_ring().clone();
    let dim = p.cns.rank();
    let mut report = Report::new("process inside the first construction");
    report.push(CheckResult::exact(
        "base point",
        (phi(p.cns.basepoint()) != first.basepoint()).then(|| Witness::new(None, "phi(1) != 1")),
    ));
    report.push(sampled("norm preserved", cfg, |_, rng| {
        let x = random_element(&k, dim, rng, cfg.bound);
        let lhs = big.embed(p.cns.norm(&x));
        let rhs = first.norm(&phi(&x));
        (lhs != rhs).then(|| Witness::new(None, format!("N(x) = {lhs}, N(phi x) = {rhs}")).with("x", &x))
    }));
    report.push(sampled("adjoint intertwined", cfg, |_, rng| {
        let x = random_element(&k, dim, rng, cfg.bound);
        (phi(&p.cns.sharp(&x)) != first.sharp(&phi(&x))).then(|| Witness::new(None, "phi(x#) != phi(x)#").with("x", &x))
    }));

    let big_dim = first.rank();
    let mut s = restricted_matrix(&big, big_dim, |y| first_involution(p, y));
    for (r, row) in s.iter_mut().enumerate() {
        row[r] = &row[r] - &k.one();
    }
    let fixed_dim = linalg::nullspace(&k, &s, 2 * big_dim)?.len();
    let cols: Vec<Vec<Scalar>> = (0..dim).map(|i| restrict(&phi(&linalg::basis_vector(&k, dim, i)))).collect();
    let phi_m = linalg::transpose(&cols);
    let image_rank = linalg::rank(&phi_m, dim)?;
    let image_fixed = linalg::mat_mul(&s, &phi_m).iter().all(|r| linalg::is_zero_vec(r));
    report.push(CheckResult::exact(
        "image is the fixed space",
        (!(image_fixed && image_rank == dim && fixed_dim == dim)).then(|| {
            Witness::new(None, format!("image rank {image_rank}, image fixed {image_fixed}, fixed space dimension {fixed_dim}, module dimension {dim}"))
        }),
    ));
    Ok(Embedding { first: first.clone(), phi: phi_m, fixed_dim, report })
}

/// Build `J(B, beta)` over `K` and verify the canonical embedding of the
/// process into it.
pub fn embed_process_into_first(p: &TitsProcess, cfg: &SampleConfig) -> Result<Embedding, TitsError> {
    let first = first_tits_unchecked(&p.b, &p.beta)?;
    let e = check_embedding(p, &first, |x| process_embedding(p, x), cfg)?;
    if let Some(c) = e.report.first_failure() {
        let detail = c.witness.as_ref().map(|w| w.detail.clone()).unwrap_or_default();
        return Err(TitsError::EmbeddingFailure { check: c.name.clone(), detail });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cns::check_cns_axioms;

    fn cfg() -> SampleConfig {
        SampleConfig::default().with_samples(10)
    }

    fn gaussian() -> Ring {
        Ring::quadratic(&Ring::rational(), Ring::rational().from_int(-1)).unwrap()
    }

    #[test]
    fn trace_one_elements() {
        let k = gaussian();
        let l = trace_one_element(&k).unwrap().unwrap();
        assert_eq!(&l + &l.involute(), k.one());
        let f7 = Ring::prime(7).unwrap();
        let k7 = Ring::quadratic(&f7, f7.from_int(3)).unwrap();
        let l = trace_one_element(&k7).unwrap().unwrap();
        assert_eq!(&l + &l.involute(), k7.one());
        assert!(trace_one_element(&Ring::rational()).is_err());
    }

    #[test]
    fn first_tits_of_diagonal() {
        let q = Ring::rational();
        let a = cns::diagonal(&q);
        let j = first_tits(&a, &q.one(), &cfg()).unwrap();
        assert_eq!(j.rank(), 9);
        let x: Vec<Scalar> = [0, 0, 0, 1, 1, 1, 1, 1, 1].iter().map(|&v| q.from_int(v)).collect();
        assert_eq!(j.norm(&x), q.from_int(2));
        assert!(check_cns_axioms(&j, &cfg()).passed());
    }

    #[test]
    fn sigma_for_identity_form_is_conjugate_transpose() {
        let k = gaussian();
        let h = linalg::identity(&k, 3);
        let s = adjoint_involution(&h).unwrap();
        let mut e12 = linalg::vzero(&k, 9);
        e12[cns::mat3_index(0, 1)] =
            k.element(vec![Ring::rational().from_int(2), Ring::rational().from_int(3)]).unwrap();
        let mut expect = linalg::vzero(&k, 9);
        expect[cns::mat3_index(1, 0)] = e12[1].involute();
        assert_eq!(s.apply(&e12), expect);
        let b = mat3_with_form(&h).unwrap();
        assert_eq!(hermitian_fixed_basis(&b).unwrap().len(), 9);
    }

    #[test]
    fn non_hermitian_and_singular_forms() {
        let k = gaussian();
        let mut h = linalg::identity(&k, 3);
        h[0][1] = k.generator();
        assert_eq!(adjoint_involution(&h), Err(TitsError::NotHermitian));
        let mut h = linalg::identity(&k, 3);
        h[2][2] = k.zero();
        assert_eq!(adjoint_involution(&h), Err(TitsError::Singular));
    }

    #[test]
    fn diagonal_process() {
        let q = Ring::rational();
        let b = etale_tensor(&cns::diagonal(&q), &q.from_int(-1)).unwrap();
        let k = b.ring().clone();
        let p = tits_process(&b, b.table.unit(), &k.one(), &cfg()).unwrap();
        assert_eq!(p.cns.rank(), 9);
        let x = p.join(&linalg::vzero(&k, 3), b.table.unit()).unwrap();
        assert_eq!(p.cns.norm(&x), q.from_int(2));
        assert!(check_cns_axioms(&p.cns, &cfg()).passed());
        assert!(embed_process_into_first(&p, &cfg()).is_ok());
    }

    #[test]
    fn norm_compatibility() {
        let q = Ring::rational();
        let b = etale_tensor(&cns::diagonal(&q), &q.from_int(-1)).unwrap();
        let k = b.ring().clone();
        let err = tits_process(&b, b.table.unit(), &k.from_int(2), &cfg()).unwrap_err();
        assert!(matches!(err, TitsError::NormCompatibilityFailure(_)));
    }

    #[test]
    fn rank_one_process() {
        let q = Ring::rational();
        let params = EtaleParams::Rank1Process { k: q.clone(), d: q.from_int(2), u: None, beta: None };
        let c = build_etale(&params, &cfg()).unwrap();
        assert_eq!(c.rank(), 3);
        assert!(check_cns_axioms(&c, &cfg()).passed());
    }
}
