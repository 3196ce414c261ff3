//! Sparse multivariate polynomials with exact coefficients, used to check
//! algebra identities as polynomial identities rather than on samples.
//!
//! Monomials pack one 4-bit exponent per variable into a `u128`, so at most 32
//! variables of individual degree at most 15 are supported.

use std::fmt;

use rustc_hash::FxHashMap;

use crate::multiforms::{QuadraticVectorMap, SymmetricMultilinearForm};
use crate::scalars::{Ring, Scalar};

pub const MAX_VARS: usize = 32;
const BITS: u32 = 4;

#[derive(Clone, Debug, Default)]
pub struct Poly {
    terms: FxHashMap<u128, Scalar>,
}

impl PartialEq for Poly {
    fn eq(&self, o: &Self) -> bool {
        self.terms.len() == o.terms.len() && self.terms.iter().all(|(m, c)| o.terms.get(m) == Some(c))
    }
}

fn exponent(m: u128, i: usize) -> u32 {
    ((m >> (BITS as usize * i)) & 0xf) as u32
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: Scalar) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(0, c);
        }
        p
    }

    pub fn var(ring: &Ring, i: usize) -> Poly {
        assert!(i < MAX_VARS, "too many variables");
        let mut p = Poly::zero();
        p.terms.insert(1u128 << (BITS as usize * i), ring.one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate(&mut self, m: u128, c: Scalar) {
        use std::collections::hash_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &Scalar, other: &Poly) {
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.accumulate(*m, c * d);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.accumulate(*m, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.accumulate(*m, -c);
        }
        r
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        let mut r = Poly::zero();
        r.axpy(c, self);
        r
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        r.terms.reserve(self.terms.len() * o.terms.len() / 2);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.accumulate(m1 + m2, c1 * c2);
            }
        }
        r
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, ring: &Ring, i: usize) -> Poly {
        let mut r = Poly::zero();
        let step = 1u128 << (BITS as usize * i);
        for (m, c) in &self.terms {
            let e = exponent(*m, i);
            if e > 0 {
                r.accumulate(m - step, &ring.from_int(e as i64) * c);
            }
        }
        r
    }

    /// Evaluate at a point.
    pub fn eval(&self, ring: &Ring, point: &[Scalar]) -> Scalar {
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, v) in point.iter().enumerate() {
                let e = exponent(*m, i);
                if e > 0 {
                    t = &t * &v.pow(e as u64);
                }
            }
            acc = &acc + &t;
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&u128> = self.terms.keys().collect();
        keys.sort();
        let parts: Vec<String> = keys
            .into_iter()
            .map(|m| {
                let mut s = format!("({})", self.terms[m]);
                for i in 0..MAX_VARS {
                    match exponent(*m, i) {
                        0 => {}
                        1 => s.push_str(&format!("*v{i}")),
                        e => s.push_str(&format!("*v{i}^{e}")),
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Generic coordinate vector `(v_offset, ..., v_offset+n-1)`.
pub fn generic_vector(ring: &Ring, n: usize, offset: usize) -> Vec<Poly> {
    (0..n).map(|i| Poly::var(ring, offset + i)).collect()
}

pub fn constant_vector(v: &[Scalar]) -> Vec<Poly> {
    v.iter().cloned().map(Poly::constant).collect()
}

pub fn vsub(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn vadd(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn vscale(c: &Poly, a: &[Poly]) -> Vec<Poly> {
    a.iter().map(|x| c.mul(x)).collect()
}

pub fn is_zero_vector(a: &[Poly]) -> bool {
    a.iter().all(Poly::is_zero)
}

/// `Q(x)` for a quadratic vector map with polynomial input.
pub fn quadratic(q: &QuadraticVectorMap, x: &[Poly]) -> Vec<Poly> {
    let mut cache: FxHashMap<(usize, usize), Poly> = FxHashMap::default();
    q.terms()
        .iter()
        .map(|row| {
            let mut acc = Poly::zero();
            for (i, j, c) in row {
                if x[*i].is_zero() || x[*j].is_zero() {
                    continue;
                }
                let p = cache.entry((*i, *j)).or_insert_with(|| x[*i].mul(&x[*j]));
                acc.axpy(c, p);
            }
            acc
        })
        .collect()
}

/// The bilinear companion `Q(x + y) - Q(x) - Q(y)` with polynomial inputs.
pub fn quadratic_bilinear(q: &QuadraticVectorMap, x: &[Poly], y: &[Poly]) -> Vec<Poly> {
    let mut cache: FxHashMap<(usize, usize), Poly> = FxHashMap::default();
    let mut prod = |i: usize, j: usize| -> Poly { cache.entry((i, j)).or_insert_with(|| x[i].mul(&y[j])).clone() };
    q.terms()
        .iter()
        .map(|row| {
            let mut acc = Poly::zero();
            for (i, j, c) in row {
                let t = if i == j {
                    let p = prod(*i, *i);
                    p.add(&p)
                } else {
                    prod(*i, *j).add(&prod(*j, *i))
                };
                acc.axpy(c, &t);
            }
            acc
        })
        .collect()
}

/// `theta(x, y, z)` for a symmetric trilinear form with polynomial inputs.
pub fn trilinear(theta: &SymmetricMultilinearForm, x: &[Poly], y: &[Poly], z: &[Poly]) -> Poly {
    let mut acc = Poly::zero();
    let args = [x, y, z];
    for (t, c) in theta.entries() {
        let mut perms = vec![t.clone()];
        // distinct orderings of a sorted triple
        let (a, b, d) = (t[0], t[1], t[2]);
        for p in [[a, d, b], [b, a, d], [b, d, a], [d, a, b], [d, b, a]] {
            if !perms.iter().any(|q| q[..] == p[..]) {
                perms.push(p.to_vec());
            }
        }
        for p in perms {
            let term = args[0][p[0]].mul(&args[1][p[1]]).mul(&args[2][p[2]]);
            acc.axpy(c, &term);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_derivative() {
        let q = Ring::rational();
        let x = Poly::var(&q, 0);
        let y = Poly::var(&q, 1);
        let s = x.add(&y);
        let sq = s.mul(&s);
        let expect = x.mul(&x).add(&x.mul(&y).scale(&q.from_int(2))).add(&y.mul(&y));
        assert_eq!(sq, expect);
        assert_eq!(sq.derivative(&q, 0), x.add(&y).scale(&q.from_int(2)));
        assert!(sq.sub(&expect).is_zero());
        let pt = [q.from_int(2), q.from_int(3)];
        assert_eq!(sq.eval(&q, &pt), q.from_int(25));
    }
}
