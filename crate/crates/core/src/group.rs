//! Arithmetic on `F_p^n`, its characters, and the base-`p` index encoding
//! used by every table and statevector in the crate.
//!
//! Elements are addressed by a linear index `sum_i coords[i] * p^i` (digit 0
//! least significant). Characters are identified with group elements:
//! `chi_gamma(x) = omega^<gamma, x>` with `omega = exp(2 pi i / p)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{checked_power, ensure_cap, Error, Result};

/// Default bound on the number of entries any table or statevector may hold.
pub const DEFAULT_AMPLITUDE_CAP: usize = 1 << 24;

/// A value on the unit circle; character values and phase-oracle entries.
pub type UnitComplex = Complex64;

/// Trial-division primality test.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The group `F_p^n` together with its root-of-unity table and size cap.
///
/// Two parameter sets compare equal when `p` and `n` agree; the cap is a
/// resource limit, not part of the group.
#[derive(Clone, Debug)]
pub struct GroupParams {
    p: u32,
    n: usize,
    order: usize,
    cap: usize,
    roots: Arc<[Complex64]>,
}

impl PartialEq for GroupParams {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n
    }
}

impl Eq for GroupParams {}

impl GroupParams {
    pub fn new(p: u64, n: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::param("n must be at least 1"));
        }
        let p32 = u32::try_from(p).map_err(|_| Error::param(format!("p = {p} is too large")))?;
        let order = checked_power(p as usize, n)
            .ok_or_else(|| Error::param(format!("{p}^{n} does not fit the index width")))?;
        Ok(Self {
            p: p32,
            n,
            order,
            cap: DEFAULT_AMPLITUDE_CAP,
            roots: root_table(p32),
        })
    }

    /// Replaces the size cap applied to every materialization over this group.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `N = p^n`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// The `p` roots of unity, `roots()[k] = omega^k`.
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    /// `omega^k` for any exponent, reduced mod `p`.
    #[inline]
    pub fn root(&self, k: u64) -> Complex64 {
        self.roots[(k % self.p as u64) as usize]
    }

    pub fn ensure_same(&self, other: &GroupParams) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::param(format!(
                "mismatched groups: F_{}^{} vs F_{}^{}",
                self.p, self.n, other.p, other.n
            )))
        }
    }

    /// Number of entries in a product of `registers` copies of the group,
    /// checked against the cap.
    pub fn product_size(&self, registers: usize, what: &str) -> Result<usize> {
        ensure_cap(what, checked_power(self.order, registers), self.cap)
    }

    pub fn digits_of(&self, index: usize) -> Vec<u32> {
        let p = self.p as usize;
        let mut rest = index;
        (0..self.n)
            .map(|_| {
                let d = rest % p;
                rest /= p;
                d as u32
            })
            .collect()
    }

    pub fn index_of(&self, digits: &[u32]) -> usize {
        digits
            .iter()
            .rev()
            .fold(0usize, |acc, &d| acc * self.p as usize + d as usize)
    }

    #[inline]
    pub fn add_index(&self, a: usize, b: usize) -> usize {
        if self.p == 2 {
            return a ^ b;
        }
        self.combine(a, b, |x, y, p| (x + y) % p)
    }

    #[inline]
    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        if self.p == 2 {
            return a ^ b;
        }
        self.combine(a, b, |x, y, p| (x + p - y) % p)
    }

    #[inline]
    pub fn neg_index(&self, a: usize) -> usize {
        self.sub_index(0, a)
    }

    /// `c * a` for a field scalar `c`.
    pub fn scale_index(&self, c: u32, a: usize) -> usize {
        let c = (c % self.p) as usize;
        self.combine(a, 0, |x, _, p| (x * c) % p)
    }

    /// `<a, b> mod p`.
    #[inline]
    pub fn dot_index(&self, a: usize, b: usize) -> u32 {
        let p = self.p as usize;
        let (mut a, mut b) = (a, b);
        let mut acc = 0usize;
        for _ in 0..self.n {
            acc += (a % p) * (b % p);
            a /= p;
            b /= p;
        }
        (acc % p) as u32
    }

    /// `chi_gamma(x)` on linear indices.
    #[inline]
    pub fn character_index(&self, gamma: usize, x: usize) -> Complex64 {
        self.roots[self.dot_index(gamma, x) as usize]
    }

    #[inline]
    fn combine(&self, a: usize, b: usize, op: impl Fn(usize, usize, usize) -> usize) -> usize {
        let p = self.p as usize;
        let (mut a, mut b) = (a, b);
        let mut out = 0usize;
        let mut place = 1usize;
        for _ in 0..self.n {
            out += op(a % p, b % p, p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn vector(&self, coords: &[u32]) -> Result<GroupVector> {
        if coords.len() != self.n {
            return Err(Error::param(format!(
                "expected {} coordinates, got {}",
                self.n,
                coords.len()
            )));
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= self.p) {
            return Err(Error::param(format!("coordinate {c} is not in F_{}", self.p)));
        }
        Ok(GroupVector {
            p: self.p,
            coords: coords.to_vec(),
            index: self.index_of(coords),
        })
    }

    pub fn vector_from_index(&self, index: usize) -> Result<GroupVector> {
        if index >= self.order {
            return Err(Error::param(format!(
                "index {index} out of range for a group of order {}",
                self.order
            )));
        }
        Ok(GroupVector {
            p: self.p,
            coords: self.digits_of(index),
            index,
        })
    }

    pub fn zero(&self) -> GroupVector {
        GroupVector {
            p: self.p,
            coords: vec![0; self.n],
            index: 0,
        }
    }

    pub fn character_eval(&self, gamma: &GroupVector, x: &GroupVector) -> Result<UnitComplex> {
        Ok(self.roots[gamma.dot(x)? as usize])
    }

    fn check_member(&self, v: &GroupVector) -> Result<()> {
        if v.p != self.p || v.coords.len() != self.n {
            return Err(Error::param(format!(
                "vector over F_{}^{} used with F_{}^{}",
                v.p,
                v.coords.len(),
                self.p,
                self.n
            )));
        }
        Ok(())
    }

    /// Linear index of a vector, after checking it belongs to this group.
    pub fn index_checked(&self, v: &GroupVector) -> Result<usize> {
        self.check_member(v)?;
        Ok(v.index)
    }
}

fn root_table(p: u32) -> Arc<[Complex64]> {
    let mut roots = vec![Complex64::new(0.0, 0.0); p as usize];
    roots[0] = Complex64::new(1.0, 0.0);
    for k in 1..=(p / 2) {
        let theta = std::f64::consts::TAU * k as f64 / p as f64;
        let (s, c) = theta.sin_cos();
        let w = if 2 * k == p {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(c, s)
        };
        roots[k as usize] = w;
        roots[(p - k) as usize] = w.conj();
    }
    roots.into()
}

/// An element of `F_p^n` (equally, a character index).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupVector {
    p: u32,
    coords: Vec<u32>,
    index: usize,
}

impl GroupVector {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn linear_index(&self) -> usize {
        self.index
    }

    fn check(&self, other: &GroupVector) -> Result<()> {
        if self.p != other.p || self.coords.len() != other.coords.len() {
            return Err(Error::param(format!(
                "mismatched group vectors: F_{}^{} vs F_{}^{}",
                self.p,
                self.coords.len(),
                other.p,
                other.coords.len()
            )));
        }
        Ok(())
    }

    fn from_coords(p: u32, coords: Vec<u32>) -> Self {
        let index = coords
            .iter()
            .rev()
            .fold(0usize, |acc, &d| acc * p as usize + d as usize);
        Self { p, coords, index }
    }

    pub fn add(&self, other: &GroupVector) -> Result<GroupVector> {
        self.check(other)?;
        let p = self.p;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a + b) % p)
            .collect();
        Ok(Self::from_coords(p, coords))
    }

    pub fn sub(&self, other: &GroupVector) -> Result<GroupVector> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GroupVector {
        let p = self.p;
        let coords = self.coords.iter().map(|&a| (p - a) % p).collect();
        Self::from_coords(p, coords)
    }

    pub fn scalar_mul(&self, c: u32) -> Result<GroupVector> {
        if c >= self.p {
            return Err(Error::param(format!("scalar {c} is not in F_{}", self.p)));
        }
        let p = self.p as u64;
        let coords = self
            .coords
            .iter()
            .map(|&a| ((a as u64 * c as u64) % p) as u32)
            .collect();
        Ok(Self::from_coords(self.p, coords))
    }

    pub fn dot(&self, other: &GroupVector) -> Result<u32> {
        self.check(other)?;
        let p = self.p as u64;
        let s = self
            .coords
            .iter()
            .zip(&other.coords)
            .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
        Ok(s as u32)
    }

    pub fn is_zero(&self) -> bool {
        self.index == 0
    }
}

impl fmt::Display for GroupVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All `N` elements in linear-index order.
pub fn enumerate_group(params: &GroupParams) -> Result<Vec<GroupVector>> {
    ensure_cap("group enumeration", Some(params.order()), params.cap())?;
    (0..params.order())
        .map(|i| params.vector_from_index(i))
        .collect()
}
