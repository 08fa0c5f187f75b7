//! Exact SL(2, Z) arithmetic used for group enumeration.
//!
//! Entries live in `i64` while they fit and escalate to `BigInt` otherwise.
//! Every value is kept in canonical form (first nonzero entry positive, small
//! representation whenever possible), so structural equality and hashing agree
//! with equality of isometries.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::isometry::{kind_from_real_trace, Isometry2, IsometryKind};
use super::point::UH2Point;
use crate::error::{domain, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ExactIsometry {
    Small([i64; 4]),
    Big(Box<[BigInt; 4]>),
}

impl ExactIsometry {
    /// Builds `[[a, b], [c, d]]`, checking `ad - bc = 1`.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return domain(format!("integer matrix [[{a},{b}],[{c},{d}]] has determinant {det}"));
        }
        Ok(Self::from_i128([a as i128, b as i128, c as i128, d as i128]))
    }

    pub fn from_bigints(e: [BigInt; 4]) -> Result<Self> {
        let det = &e[0] * &e[3] - &e[1] * &e[2];
        if det != BigInt::from(1) {
            return domain(format!("integer matrix has determinant {det}"));
        }
        Ok(Self::from_big_unchecked(e))
    }

    pub fn identity() -> Self {
        ExactIsometry::Small([1, 0, 0, 1])
    }

    fn from_i128(e: [i128; 4]) -> Self {
        let neg = e.iter().find(|x| **x != 0).is_some_and(|x| *x < 0);
        let e = if neg { e.map(|x| -x) } else { e };
        if e.iter().all(|x| i64::try_from(*x).is_ok()) {
            ExactIsometry::Small(e.map(|x| x as i64))
        } else {
            ExactIsometry::Big(Box::new(e.map(BigInt::from)))
        }
    }

    fn from_big_unchecked(e: [BigInt; 4]) -> Self {
        let neg = e.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
        let e = if neg { e.map(|x| -x) } else { e };
        if let (Some(a), Some(b), Some(c), Some(d)) = (e[0].to_i64(), e[1].to_i64(), e[2].to_i64(), e[3].to_i64()) {
            ExactIsometry::Small([a, b, c, d])
        } else {
            ExactIsometry::Big(Box::new(e))
        }
    }

    fn big_entries(&self) -> [BigInt; 4] {
        match self {
            ExactIsometry::Small(e) => e.map(BigInt::from),
            ExactIsometry::Big(e) => (**e).clone(),
        }
    }

    pub fn is_small(&self) -> bool {
        matches!(self, ExactIsometry::Small(_))
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, ExactIsometry::Small([1, 0, 0, 1]))
    }

    pub fn compose(&self, other: &Self) -> Self {
        if let (ExactIsometry::Small(x), ExactIsometry::Small(y)) = (self, other) {
            let [a, b, c, d] = x.map(|v| v as i128);
            let [e, f, g, h] = y.map(|v| v as i128);
            // Entries are bounded by 2^63, so each product fits in i128 and
            // the sum of two products does too.
            return Self::from_i128([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h]);
        }
        let [a, b, c, d] = self.big_entries();
        let [e, f, g, h] = other.big_entries();
        Self::from_big_unchecked([&a * &e + &b * &g, &a * &f + &b * &h, &c * &e + &d * &g, &c * &f + &d * &h])
    }

    pub fn inverse(&self) -> Self {
        match self {
            ExactIsometry::Small([a, b, c, d]) => {
                Self::from_i128([*d as i128, -(*b as i128), -(*c as i128), *a as i128])
            }
            ExactIsometry::Big(e) => {
                let [a, b, c, d] = (**e).clone();
                Self::from_big_unchecked([d, -b, -c, a])
            }
        }
    }

    /// `h g h⁻¹` with `g = self`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        h.compose(self).compose(&h.inverse())
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity();
        let mut sq = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&sq);
            }
            sq = sq.compose(&sq);
            k >>= 1;
        }
        acc
    }

    pub fn trace(&self) -> BigInt {
        match self {
            ExactIsometry::Small([a, _, _, d]) => BigInt::from(*a as i128 + *d as i128),
            ExactIsometry::Big(e) => &e[0] + &e[3],
        }
    }

    /// Classification from the exact trace.
    pub fn classify(&self) -> IsometryKind {
        if self.is_identity() {
            return IsometryKind::Identity;
        }
        let t = self.trace().abs();
        let two = BigInt::from(2);
        match t.cmp(&two) {
            Ordering::Equal => IsometryKind::Parabolic,
            _ => kind_from_real_trace(t.to_f64().unwrap_or(f64::INFINITY), false),
        }
    }

    pub fn to_f64_entries(&self) -> [f64; 4] {
        match self {
            ExactIsometry::Small(e) => e.map(|x| x as f64),
            ExactIsometry::Big(e) => e.clone().map(|x| x.to_f64().unwrap_or(f64::NAN)),
        }
    }

    /// Floating-point copy; determinant drift from rounding is tolerated here.
    pub fn to_float(&self) -> Isometry2 {
        let [a, b, c, d] = self.to_f64_entries();
        Isometry2 { a, b, c, d }
    }

    pub fn apply(&self, p: UH2Point) -> UH2Point {
        self.to_float().apply(p)
    }

    /// Congruence to the identity modulo `m`, up to sign.
    pub fn is_identity_mod(&self, m: i64) -> bool {
        let m = BigInt::from(m);
        let e = self.big_entries();
        let r = |x: &BigInt| ((x % &m) + &m) % &m;
        let one = BigInt::from(1) % &m;
        let minus_one = (&m - BigInt::from(1)) % &m;
        let plus = r(&e[0]) == one && r(&e[1]).is_zero() && r(&e[2]).is_zero() && r(&e[3]) == one;
        let minus = r(&e[0]) == minus_one && r(&e[1]).is_zero() && r(&e[2]).is_zero() && r(&e[3]) == minus_one;
        plus || minus
    }

    /// Total order used to make enumeration output independent of traversal order.
    pub fn sort_key_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExactIsometry::Small(x), ExactIsometry::Small(y)) => x.cmp(y),
            (ExactIsometry::Small(_), ExactIsometry::Big(_)) => Ordering::Less,
            (ExactIsometry::Big(_), ExactIsometry::Small(_)) => Ordering::Greater,
            (ExactIsometry::Big(x), ExactIsometry::Big(y)) => x.as_ref().cmp(y.as_ref()),
        }
    }
}

impl fmt::Display for ExactIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.big_entries();
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

impl Serialize for ExactIsometry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExactIsometry::Small([a, b, c, d]) => [[*a, *b], [*c, *d]].serialize(s),
            ExactIsometry::Big(_) => self.to_string().serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for ExactIsometry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m: [[i64; 2]; 2] = Deserialize::deserialize(d)?;
        ExactIsometry::new(m[0][0], m[0][1], m[1][0], m[1][1]).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_sign_makes_negation_equal() {
        let g = ExactIsometry::new(5, 2, 2, 1).unwrap();
        let h = ExactIsometry::new(-5, -2, -2, -1).unwrap();
        assert_eq!(g, h);
        assert_eq!(ExactIsometry::new(-1, 0, 0, -1).unwrap(), ExactIsometry::identity());
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(ExactIsometry::new(2, 0, 0, 1).is_err());
    }

    #[test]
    fn compose_and_inverse() {
        let a = ExactIsometry::new(1, 2, 0, 1).unwrap();
        let b = ExactIsometry::new(1, 0, 2, 1).unwrap();
        assert_eq!(a.compose(&b), ExactIsometry::new(5, 2, 2, 1).unwrap());
        assert!(a.compose(&a.inverse()).is_identity());
        assert_eq!(a.pow(-3), ExactIsometry::new(1, -6, 0, 1).unwrap());
        assert_eq!(a.pow(0), ExactIsometry::identity());
    }

    #[test]
    fn escalates_to_bigint_and_back() {
        let g = ExactIsometry::new(5, 2, 2, 1).unwrap();
        let big = g.pow(40);
        assert!(!big.is_small());
        let back = big.compose(&g.pow(-40));
        assert!(back.is_identity());
        assert!(back.is_small());
        // Trace of g^n satisfies t_{n+1} = 6 t_n - t_{n-1}.
        let (mut p, mut q) = (BigInt::from(2), BigInt::from(6));
        for _ in 1..40 {
            let r = BigInt::from(6) * &q - &p;
            p = q;
            q = r;
        }
        assert_eq!(big.trace(), q);
    }

    #[test]
    fn exact_classification() {
        assert_eq!(ExactIsometry::new(1, 1, 0, 1).unwrap().classify(), IsometryKind::Parabolic);
        assert_eq!(ExactIsometry::identity().classify(), IsometryKind::Identity);
        assert!(matches!(ExactIsometry::new(5, 2, 2, 1).unwrap().classify(), IsometryKind::Loxodromic { .. }));
        assert!(matches!(ExactIsometry::new(0, -1, 1, 1).unwrap().classify(), IsometryKind::Elliptic { .. }));
    }

    #[test]
    fn congruence_test() {
        assert!(ExactIsometry::new(5, 2, 2, 1).unwrap().is_identity_mod(2));
        assert!(ExactIsometry::new(-1, 2, 0, -1).unwrap().is_identity_mod(2));
        assert!(!ExactIsometry::new(1, 1, 0, 1).unwrap().is_identity_mod(2));
    }
}
