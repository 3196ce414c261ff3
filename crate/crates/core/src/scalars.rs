//! Exact scalar rings: the rationals, prime fields of characteristic at least 5,
//! and quadratic or cubic extensions built on top of them.
//!
//! A [`Ring`] is a cheap, shareable handle. A [`Scalar`] always knows which ring
//! it lives in, so arithmetic between elements of different rings is caught at
//! runtime. The operator impls panic on a mismatch; the `checked_*` methods
//! return a [`ScalarError`] instead.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use crate::rat::Rat;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by a non-unit")]
    DivisionByNonUnit,
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("malformed scalar: {0}")]
    Malformed(String),
}

#[derive(Debug, PartialEq, Eq)]
pub enum RingKind {
    Rational,
    /// `Z/p` with `p` prime and `p > 3`.
    Prime(u64),
    /// `base[s]/(s^2 - d)`. When `involution` is set, `a + b s -> a - b s` is
    /// the distinguished involution.
    Quadratic {
        base: Ring,
        d: Scalar,
        involution: bool,
    },
    /// `base[t]/(t^3 + f[2] t^2 + f[1] t + f[0])`.
    Cubic {
        base: Ring,
        f: [Scalar; 3],
    },
}

#[derive(Clone, Debug)]
pub struct Ring(Arc<RingKind>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Ring {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rational(Rat),
    Prime { value: u64, p: u64 },
    Ext { ring: Ring, coords: Vec<Scalar> },
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2u64;
    while q * q <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

impl Ring {
    pub fn rational() -> Ring {
        static Q: OnceLock<Ring> = OnceLock::new();
        Q.get_or_init(|| Ring(Arc::new(RingKind::Rational))).clone()
    }

    /// Prime field `F_p`. Characteristics 2 and 3 are rejected, as are moduli
    /// that do not fit in 32 bits.
    pub fn prime(p: u64) -> Result<Ring, ScalarError> {
        if p <= 3 || !is_prime(p) {
            return Err(ScalarError::InvalidRing(format!("{p} is not a prime > 3")));
        }
        if p >= 1 << 32 {
            return Err(ScalarError::InvalidRing(format!("modulus {p} too large")));
        }
        Ok(Ring(Arc::new(RingKind::Prime(p))))
    }

    pub fn quadratic(base: &Ring, d: Scalar) -> Result<Ring, ScalarError> {
        Ring::quadratic_with(base, d, true)
    }

    pub fn quadratic_with(base: &Ring, d: Scalar, involution: bool) -> Result<Ring, ScalarError> {
        base.check(&d)?;
        if d.is_zero() {
            return Err(ScalarError::InvalidRing("s^2 - 0 is not separable".into()));
        }
        Ok(Ring(Arc::new(RingKind::Quadratic { base: base.clone(), d, involution })))
    }

    /// `base[t]/(t^3 + f2 t^2 + f1 t + f0)` with `f = [f0, f1, f2]`.
    pub fn cubic(base: &Ring, f: [Scalar; 3]) -> Result<Ring, ScalarError> {
        for c in &f {
            base.check(c)?;
        }
        // Discriminant of t^3 + b t^2 + c t + d.
        let (d, c, b) = (&f[0], &f[1], &f[2]);
        let n = |k: i64| base.from_int(k);
        let disc = &(&(&(&(b * b) * &(c * c)) - &(&n(4) * &(&(c * c) * c))) - &(&n(4) * &(&(&(b * b) * b) * d)))
            - &(&(&n(27) * &(d * d)) - &(&n(18) * &(&(b * c) * d)));
        if disc.is_zero() {
            return Err(ScalarError::InvalidRing("cubic is not separable".into()));
        }
        Ok(Ring(Arc::new(RingKind::Cubic { base: base.clone(), f })))
    }

    pub fn kind(&self) -> &RingKind {
        &self.0
    }

    pub fn base(&self) -> Option<&Ring> {
        match &*self.0 {
            RingKind::Quadratic { base, .. } | RingKind::Cubic { base, .. } => Some(base),
            _ => None,
        }
    }

    /// Rank over the immediate base (1 for the prime rings).
    pub fn degree(&self) -> usize {
        match &*self.0 {
            RingKind::Rational | RingKind::Prime(_) => 1,
            RingKind::Quadratic { .. } => 2,
            RingKind::Cubic { .. } => 3,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match &*self.0 {
            RingKind::Rational => 0,
            RingKind::Prime(p) => *p,
            RingKind::Quadratic { base, .. } | RingKind::Cubic { base, .. } => base.characteristic(),
        }
    }

    pub fn has_involution(&self) -> bool {
        matches!(&*self.0, RingKind::Quadratic { involution: true, .. })
    }

    /// Whether the ring is known to be a field. Towers whose irreducibility
    /// cannot be decided here report `false`.
    pub fn is_field(&self) -> bool {
        match &*self.0 {
            RingKind::Rational | RingKind::Prime(_) => true,
            RingKind::Quadratic { base, d, .. } => base.is_field() && base.is_square(d) == Some(false),
            RingKind::Cubic { base, f } => base.is_field() && base.cubic_has_root(f) == Some(false),
        }
    }

    /// Square test where decidable (rationals and prime fields).
    pub fn is_square(&self, x: &Scalar) -> Option<bool> {
        match (&*self.0, x) {
            (RingKind::Rational, Scalar::Rational(q)) => {
                Some(is_perfect_square(&q.numer()) && is_perfect_square(&q.denom()))
            }
            (RingKind::Prime(_), Scalar::Prime { .. }) => Some(x.legendre() >= 0),
            _ => None,
        }
    }

    fn cubic_has_root(&self, f: &[Scalar; 3]) -> Option<bool> {
        match &*self.0 {
            RingKind::Prime(p) if *p < 1 << 20 => {
                let p = *p;
                Some((0..p).any(|t| {
                    let t = self.from_int(t as i64);
                    (&(&(&(&(&t * &t) * &t) + &(&f[2] * &(&t * &t))) + &(&f[1] * &t)) + &f[0]).is_zero()
                }))
            }
            RingKind::Rational => {
                // Monic integer model y^3 + a L y^2 + b L^2 y + c L^3, t = y / L.
                let q: Vec<BigRational> = f
                    .iter()
                    .map(|c| match c {
                        Scalar::Rational(q) => q.to_big(),
                        _ => unreachable!(),
                    })
                    .collect();
                let l = q.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
                let lq = BigRational::from_integer(l.clone());
                let c0 = (&q[0] * &lq * &lq * &lq).to_integer();
                let c1 = (&q[1] * &lq * &lq).to_integer();
                let c2 = (&q[2] * &lq).to_integer();
                let eval = |y: &BigInt| y * y * y + &c2 * y * y + &c1 * y + &c0;
                if c0.is_zero() {
                    return Some(true);
                }
                let n = c0.abs();
                let bound = n.to_u64()?;
                if bound > 1 << 40 {
                    return None;
                }
                let mut k = 1u64;
                while k * k <= bound {
                    if bound % k == 0 {
                        for dv in [k, bound / k] {
                            let y = BigInt::from(dv);
                            if eval(&y).is_zero() || eval(&-y).is_zero() {
                                return Some(true);
                            }
                        }
                    }
                    k += 1;
                }
                Some(false)
            }
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match &*self.0 {
            RingKind::Rational => Scalar::Rational(Rat::zero()),
            RingKind::Prime(p) => Scalar::Prime { value: 0, p: *p },
            RingKind::Quadratic { base, .. } | RingKind::Cubic { base, .. } => {
                Scalar::Ext { ring: self.clone(), coords: vec![base.zero(); self.degree()] }
            }
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match &*self.0 {
            RingKind::Rational => Scalar::Rational(Rat::from(n.clone())),
            RingKind::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(*p)).to_u64().unwrap();
                Scalar::Prime { value: r, p: *p }
            }
            _ => self.embed(self.base().unwrap().from_bigint(n)),
        }
    }

    /// The rational number `num/den` as an element of this ring.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar, ScalarError> {
        self.from_int(num).checked_div(&self.from_int(den))
    }

    pub fn from_rat(&self, q: &Rat) -> Result<Scalar, ScalarError> {
        if let RingKind::Rational = &*self.0 {
            return Ok(Scalar::Rational(q.clone()));
        }
        self.from_bigint(&q.numer()).checked_div(&self.from_bigint(&q.denom()))
    }

    /// Embed an element of the immediate base ring.
    pub fn embed(&self, b: Scalar) -> Scalar {
        let base = self.base().expect("embed needs an extension ring");
        let mut coords = vec![base.zero(); self.degree()];
        coords[0] = b;
        Scalar::Ext { ring: self.clone(), coords }
    }

    /// Build an extension element from its coordinates over the base.
    pub fn element(&self, coords: Vec<Scalar>) -> Result<Scalar, ScalarError> {
        let base = self.base().ok_or_else(|| ScalarError::Malformed("not an extension ring".into()))?;
        if coords.len() != self.degree() {
            return Err(ScalarError::Malformed(format!(
                "expected {} coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        for c in &coords {
            base.check(c)?;
        }
        Ok(Scalar::Ext { ring: self.clone(), coords })
    }

    /// The generator `s` (resp. `t`) of an extension.
    pub fn generator(&self) -> Scalar {
        let base = self.base().expect("generator needs an extension ring");
        let mut coords = vec![base.zero(); self.degree()];
        coords[1] = base.one();
        Scalar::Ext { ring: self.clone(), coords }
    }

    pub fn check(&self, x: &Scalar) -> Result<(), ScalarError> {
        if x.belongs_to(self) {
            Ok(())
        } else {
            Err(ScalarError::RingMismatch(x.ring().to_string(), self.to_string()))
        }
    }

    /// Draw an element with integer coordinates in `[-bound, bound]`. Prime
    /// fields draw a uniform residue.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, bound: u64) -> Scalar {
        match &*self.0 {
            RingKind::Rational => {
                let b = bound as i64;
                self.from_int(rng.gen_range(-b..=b))
            }
            RingKind::Prime(p) => Scalar::Prime { value: rng.gen_range(0..*p), p: *p },
            RingKind::Quadratic { base, .. } | RingKind::Cubic { base, .. } => Scalar::Ext {
                ring: self.clone(),
                coords: (0..self.degree()).map(|_| base.random(rng, bound)).collect(),
            },
        }
    }

    /// Deterministic sample determined by `(seed, index)`.
    pub fn sample(&self, seed: u64, index: u64, bound: u64) -> Scalar {
        self.random(&mut sample_rng(seed, index), bound)
    }

    /// Deterministic vector of `n` samples determined by `(seed, index)`.
    pub fn sample_vector(&self, n: usize, seed: u64, index: u64, bound: u64) -> Vec<Scalar> {
        let mut rng = sample_rng(seed, index);
        (0..n).map(|_| self.random(&mut rng, bound)).collect()
    }

    pub fn to_json(&self) -> Value {
        match &*self.0 {
            RingKind::Rational => json!({"kind": "rational"}),
            RingKind::Prime(p) => json!({"kind": "prime", "p": p}),
            RingKind::Quadratic { base, d, involution } => json!({
                "kind": "quadratic", "base": base.to_json(), "d": d.to_json(), "involution": involution
            }),
            RingKind::Cubic { base, f } => json!({
                "kind": "cubic", "base": base.to_json(),
                "f": f.iter().map(Scalar::to_json).collect::<Vec<_>>()
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Ring, ScalarError> {
        let bad = |m: &str| ScalarError::Malformed(format!("ring descriptor: {m}"));
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing kind"))?;
        let base = || match v.get("base") {
            Some(b) => Ring::from_json(b),
            None => Ok(Ring::rational()),
        };
        match kind {
            "rational" => Ok(Ring::rational()),
            "prime" => Ring::prime(v.get("p").and_then(Value::as_u64).ok_or_else(|| bad("missing p"))?),
            "quadratic" => {
                let base = base()?;
                let d = base.parse(v.get("d").ok_or_else(|| bad("missing d"))?)?;
                let inv = v.get("involution").and_then(Value::as_bool).unwrap_or(true);
                Ring::quadratic_with(&base, d, inv)
            }
            "cubic" => {
                let base = base()?;
                let f = v.get("f").and_then(Value::as_array).ok_or_else(|| bad("missing f"))?;
                if f.len() != 3 {
                    return Err(bad("f needs three coefficients"));
                }
                let f = [base.parse(&f[0])?, base.parse(&f[1])?, base.parse(&f[2])?];
                Ring::cubic(&base, f)
            }
            other => Err(bad(&format!("unknown kind {other}"))),
        }
    }

    /// Parse the JSON encoding of an element of this ring.
    pub fn parse(&self, v: &Value) -> Result<Scalar, ScalarError> {
        let bad = || ScalarError::Malformed(format!("{v} is not an element of {self}"));
        match &*self.0 {
            RingKind::Rational => match v {
                Value::String(s) => Rat::from_str(s.trim()).map(Scalar::Rational).map_err(|_| bad()),
                Value::Number(n) => n.as_i64().map(|n| self.from_int(n)).ok_or_else(bad),
                _ => Err(bad()),
            },
            RingKind::Prime(_) => match v {
                Value::Number(n) => n.as_i64().map(|n| self.from_int(n)).ok_or_else(bad),
                Value::String(s) => BigInt::from_str(s.trim()).map(|n| self.from_bigint(&n)).map_err(|_| bad()),
                _ => Err(bad()),
            },
            RingKind::Quadratic { base, .. } | RingKind::Cubic { base, .. } => {
                let arr = v.as_array().ok_or_else(bad)?;
                if arr.len() != self.degree() {
                    return Err(bad());
                }
                let coords = arr.iter().map(|c| base.parse(c)).collect::<Result<Vec<_>, _>>()?;
                Ok(Scalar::Ext { ring: self.clone(), coords })
            }
        }
    }

    pub fn parse_vector(&self, v: &Value) -> Result<Vec<Scalar>, ScalarError> {
        v.as_array()
            .ok_or_else(|| ScalarError::Malformed(format!("{v} is not a vector")))?
            .iter()
            .map(|x| self.parse(x))
            .collect()
    }
}

/// The RNG used for the `(seed, index)` sample stream.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            RingKind::Rational => write!(f, "Q"),
            RingKind::Prime(p) => write!(f, "F_{p}"),
            RingKind::Quadratic { base, d, .. } => write!(f, "{base}(sqrt({d}))"),
            RingKind::Cubic { base, f: c } => {
                write!(f, "{base}[t]/(t^3 + ({}) t^2 + ({}) t + ({}))", c[2], c[1], c[0])
            }
        }
    }
}

fn det3(m: &[[Scalar; 3]; 3]) -> Scalar {
    let t1 = &m[0][0] * &(&(&m[1][1] * &m[2][2]) - &(&m[1][2] * &m[2][1]));
    let t2 = &m[0][1] * &(&(&m[1][0] * &m[2][2]) - &(&m[1][2] * &m[2][0]));
    let t3 = &m[0][2] * &(&(&m[1][0] * &m[2][1]) - &(&m[1][1] * &m[2][0]));
    &(&t1 - &t2) + &t3
}

impl Scalar {
    pub fn ring(&self) -> Ring {
        match self {
            Scalar::Rational(_) => Ring::rational(),
            Scalar::Prime { p, .. } => Ring(Arc::new(RingKind::Prime(*p))),
            Scalar::Ext { ring, .. } => ring.clone(),
        }
    }

    pub fn belongs_to(&self, ring: &Ring) -> bool {
        match (self, &*ring.0) {
            (Scalar::Rational(_), RingKind::Rational) => true,
            (Scalar::Prime { p, .. }, RingKind::Prime(q)) => p == q,
            (Scalar::Ext { ring: r, .. }, _) => r == ring,
            _ => false,
        }
    }

    fn same_ring(&self, o: &Scalar) -> bool {
        match (self, o) {
            (Scalar::Rational(_), Scalar::Rational(_)) => true,
            (Scalar::Prime { p, .. }, Scalar::Prime { p: q, .. }) => p == q,
            (Scalar::Ext { ring: a, .. }, Scalar::Ext { ring: b, .. }) => a == b,
            _ => false,
        }
    }

    fn mismatch(&self, o: &Scalar) -> ScalarError {
        ScalarError::RingMismatch(self.ring().to_string(), o.ring().to_string())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Prime { value, .. } => *value == 0,
            Scalar::Ext { coords, .. } => coords.iter().all(Scalar::is_zero),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Prime { value, .. } => *value == 1,
            Scalar::Ext { coords, .. } => coords[0].is_one() && coords[1..].iter().all(Scalar::is_zero),
        }
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        match self {
            Scalar::Rational(q) => Some(q),
            _ => None,
        }
    }

    /// Coordinates over the immediate base ring of an extension element.
    pub fn coords(&self) -> Option<&[Scalar]> {
        match self {
            Scalar::Ext { coords, .. } => Some(coords),
            _ => None,
        }
    }

    pub fn checked_add(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a.add(b))),
            (Scalar::Prime { value: a, p }, Scalar::Prime { value: b, p: q }) if p == q => {
                Ok(Scalar::Prime { value: (a + b) % p, p: *p })
            }
            (Scalar::Ext { ring, coords: a }, Scalar::Ext { ring: r2, coords: b }) if ring == r2 => {
                Ok(Scalar::Ext { ring: ring.clone(), coords: a.iter().zip(b).map(|(x, y)| x + y).collect() })
            }
            _ => Err(self.mismatch(o)),
        }
    }

    pub fn checked_sub(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a.sub(b))),
            (Scalar::Prime { value: a, p }, Scalar::Prime { value: b, p: q }) if p == q => {
                Ok(Scalar::Prime { value: (a + p - b) % p, p: *p })
            }
            (Scalar::Ext { ring, coords: a }, Scalar::Ext { ring: r2, coords: b }) if ring == r2 => {
                Ok(Scalar::Ext { ring: ring.clone(), coords: a.iter().zip(b).map(|(x, y)| x - y).collect() })
            }
            _ => Err(self.mismatch(o)),
        }
    }

    pub fn checked_mul(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a.mul(b))),
            (Scalar::Prime { value: a, p }, Scalar::Prime { value: b, p: q }) if p == q => {
                Ok(Scalar::Prime { value: mulmod(*a, *b, *p), p: *p })
            }
            (Scalar::Ext { ring, coords: a }, Scalar::Ext { ring: r2, coords: b }) if ring == r2 => {
                let coords = match &*ring.0 {
                    RingKind::Quadratic { d, .. } => {
                        vec![&(&a[0] * &b[0]) + &(d * &(&a[1] * &b[1])), &(&a[0] * &b[1]) + &(&a[1] * &b[0])]
                    }
                    RingKind::Cubic { f, .. } => {
                        let mut c: Vec<Scalar> = (0..5)
                            .map(|k| {
                                let mut s: Option<Scalar> = None;
                                for i in 0..3 {
                                    if k >= i && k - i < 3 {
                                        let t = &a[i] * &b[k - i];
                                        s = Some(match s {
                                            Some(s) => &s + &t,
                                            None => t,
                                        });
                                    }
                                }
                                s.unwrap()
                            })
                            .collect();
                        for top in [4usize, 3] {
                            let lead = c[top].clone();
                            if !lead.is_zero() {
                                for j in 0..3 {
                                    c[top - 3 + j] = &c[top - 3 + j] - &(&lead * &f[j]);
                                }
                            }
                        }
                        c.truncate(3);
                        c
                    }
                    _ => unreachable!(),
                };
                Ok(Scalar::Ext { ring: ring.clone(), coords })
            }
            _ => Err(self.mismatch(o)),
        }
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        if !self.same_ring(o) {
            return Err(self.mismatch(o));
        }
        self.checked_mul(&o.inv()?)
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Rational(q) => q.recip().map(Scalar::Rational).ok_or(ScalarError::DivisionByNonUnit),
            Scalar::Prime { value, p } => {
                if *value == 0 {
                    Err(ScalarError::DivisionByNonUnit)
                } else {
                    Ok(Scalar::Prime { value: powmod(*value, p - 2, *p), p: *p })
                }
            }
            Scalar::Ext { ring, coords } => match &*ring.0 {
                RingKind::Quadratic { d, .. } => {
                    let n = &(&coords[0] * &coords[0]) - &(d * &(&coords[1] * &coords[1]));
                    let ni = n.inv()?;
                    Ok(Scalar::Ext { ring: ring.clone(), coords: vec![&coords[0] * &ni, -&(&coords[1] * &ni)] })
                }
                RingKind::Cubic { .. } => {
                    // Columns of the regular representation: x, x t, x t^2.
                    let t = ring.generator();
                    let c0 = self.clone();
                    let c1 = &c0 * &t;
                    let c2 = &c1 * &t;
                    let cols = [c0.coords().unwrap(), c1.coords().unwrap(), c2.coords().unwrap()];
                    let m: [[Scalar; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()));
                    let det = det3(&m);
                    let di = det.inv()?;
                    // First column of adj(m), divided by det, solves m v = e0.
                    let cof = |r: usize| {
                        let cols: Vec<usize> = (0..3).filter(|&k| k != r).collect();
                        let minor = &(&m[1][cols[0]] * &m[2][cols[1]]) - &(&m[1][cols[1]] * &m[2][cols[0]]);
                        if r.is_multiple_of(2) {
                            minor
                        } else {
                            -&minor
                        }
                    };
                    let v = (0..3).map(|r| &cof(r) * &di).collect();
                    Ok(Scalar::Ext { ring: ring.clone(), coords: v })
                }
                _ => unreachable!(),
            },
        }
    }

    pub fn is_unit(&self) -> bool {
        self.inv().is_ok()
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.ring().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// The distinguished involution: conjugation on a quadratic extension that
    /// carries one, the identity everywhere else.
    pub fn involute(&self) -> Scalar {
        match self {
            Scalar::Ext { ring, coords } if ring.has_involution() => {
                Scalar::Ext { ring: ring.clone(), coords: vec![coords[0].clone(), -&coords[1]] }
            }
            _ => self.clone(),
        }
    }

    /// Legendre symbol of a prime-field element: 0, 1 or -1.
    pub fn legendre(&self) -> i8 {
        match self {
            Scalar::Prime { value, p } => {
                if *value == 0 {
                    0
                } else if powmod(*value, (p - 1) / 2, *p) == 1 {
                    1
                } else {
                    -1
                }
            }
            _ => panic!("legendre symbol needs a prime-field element"),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Scalar::Rational(q) => Value::String(q.to_string()),
            Scalar::Prime { value, .. } => json!(value),
            Scalar::Ext { coords, .. } => Value::Array(coords.iter().map(Scalar::to_json).collect()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Prime { value, .. } => write!(f, "{value}"),
            Scalar::Ext { coords, .. } => {
                let names = ["", "s", "s^2"];
                let gen = if coords.len() == 3 { ["", "t", "t^2"] } else { names };
                let parts: Vec<String> = coords
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if i == 0 { format!("({c})") } else { format!("({c}){}", gen[i]) })
                    .collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                self.$checked(o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$checked(&o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(q.neg()),
            Scalar::Prime { value, p } => Scalar::Prime { value: (p - value) % p, p: *p },
            Scalar::Ext { ring, coords } => {
                Scalar::Ext { ring: ring.clone(), coords: coords.iter().map(|c| -c).collect() }
            }
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Ring::rational().from_ratio(n, d).unwrap()
    }

    #[test]
    fn rational_json_round_trip() {
        let x = q(-3, 6);
        assert_eq!(x.to_json(), json!("-1/2"));
        assert_eq!(Ring::rational().parse(&json!("-1/2")).unwrap(), x);
        assert_eq!(Ring::rational().parse(&json!(4)).unwrap(), q(4, 1));
    }

    #[test]
    fn prime_field_inverse_and_legendre() {
        let f7 = Ring::prime(7).unwrap();
        let three = f7.from_int(3);
        assert_eq!(&three * &three.inv().unwrap(), f7.one());
        assert_eq!(f7.from_int(2).legendre(), 1);
        assert_eq!(f7.from_int(3).legendre(), -1);
        assert_eq!(f7.from_int(-1), f7.from_int(6));
    }

    #[test]
    fn rejects_small_characteristic() {
        assert!(Ring::prime(2).is_err());
        assert!(Ring::prime(3).is_err());
        assert!(Ring::prime(9).is_err());
    }

    #[test]
    fn gaussian_rationals() {
        let k = Ring::rational();
        let gi = Ring::quadratic(&k, q(-1, 1)).unwrap();
        let i = gi.generator();
        assert_eq!(&i * &i, gi.from_int(-1));
        let z = gi.element(vec![q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(&z * &z.involute(), gi.from_int(5));
        assert_eq!(&z * &z.inv().unwrap(), gi.one());
        assert!(gi.is_field());
        let split = Ring::quadratic(&k, q(4, 1)).unwrap();
        assert!(!split.is_field());
        let s = split.generator();
        let e = &s - &split.from_int(2);
        assert_eq!(e.inv(), Err(ScalarError::DivisionByNonUnit));
    }

    #[test]
    fn cubic_field_arithmetic() {
        let k = Ring::rational();
        // t^3 - t - 1
        let e = Ring::cubic(&k, [q(-1, 1), q(-1, 1), q(0, 1)]).unwrap();
        assert!(e.is_field());
        let t = e.generator();
        assert_eq!(&(&t * &t) * &t, &t + &e.one());
        let x = e.element(vec![q(2, 1), q(-1, 1), q(3, 1)]).unwrap();
        assert_eq!(&x * &x.inv().unwrap(), e.one());
        assert!(x.involute() == x);
        // t^3 - 1 has the root 1.
        let split = Ring::cubic(&k, [q(-1, 1), q(0, 1), q(0, 1)]).unwrap();
        assert!(!split.is_field());
        assert!(Ring::cubic(&k, [q(0, 1), q(0, 1), q(0, 1)]).is_err());
    }

    #[test]
    fn mismatch_is_reported() {
        let a = Ring::prime(5).unwrap().one();
        let b = Ring::prime(7).unwrap().one();
        assert!(matches!(a.checked_add(&b), Err(ScalarError::RingMismatch(..))));
        assert!(matches!(q(1, 1).checked_mul(&b), Err(ScalarError::RingMismatch(..))));
    }

    #[test]
    fn samples_are_deterministic() {
        let k = Ring::rational();
        let a = k.sample_vector(10, 42, 3, 10);
        assert_eq!(a, k.sample_vector(10, 42, 3, 10));
        assert_ne!(a, k.sample_vector(10, 42, 4, 10));
        for x in &a {
            let v = x.as_rational().unwrap();
            assert!(v.is_integer() && v.abs() <= Rat::from_int(10));
        }
    }

    #[test]
    fn ring_descriptor_round_trip() {
        let k = Ring::rational();
        let e = Ring::cubic(&k, [q(-1, 1), q(-1, 1), q(0, 1)]).unwrap();
        let kk = Ring::quadratic(&e, e.from_int(-3)).unwrap();
        assert_eq!(Ring::from_json(&kk.to_json()).unwrap(), kk);
        let x = kk.sample(1, 2, 5);
        assert_eq!(kk.parse(&x.to_json()).unwrap(), x);
    }
}
