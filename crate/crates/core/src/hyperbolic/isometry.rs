use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::point::{UH2Point, UH3Point};
use crate::error::{domain, Error, Result};

/// Determinant tolerance for the floating-point backends.
pub const DET_TOL: f64 = 1e-12;
/// Width of the trace band `||tr| - 2| <= PARABOLIC_BAND` treated as parabolic.
pub const PARABOLIC_BAND: f64 = 1e-9;

/// Trichotomy of nontrivial isometries, plus the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IsometryKind {
    Identity,
    /// Nonoriented rotation angle in `(0, π]`.
    Elliptic { angle: f64 },
    Parabolic,
    /// Translation length `> 0` and rotation angle in `(-π, π]`.
    Loxodromic { length: f64, angle: f64 },
}

impl IsometryKind {
    pub fn name(&self) -> &'static str {
        match self {
            IsometryKind::Identity => "identity",
            IsometryKind::Elliptic { .. } => "elliptic",
            IsometryKind::Parabolic => "parabolic",
            IsometryKind::Loxodromic { .. } => "loxodromic",
        }
    }
}

impl fmt::Display for IsometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsometryKind::Identity => write!(f, "identity"),
            IsometryKind::Elliptic { angle } => write!(f, "elliptic(θ={angle})"),
            IsometryKind::Parabolic => write!(f, "parabolic"),
            IsometryKind::Loxodromic { length, angle } => write!(f, "loxodromic(ℓ={length}, θ={angle})"),
        }
    }
}

/// Result of classifying a floating-point isometry.
///
/// `ambiguous` is set when the trace lands inside the parabolic band without
/// being exactly `±2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub kind: IsometryKind,
    pub ambiguous: bool,
}

/// Classification from a real trace, shared by the exact and float backends.
pub(crate) fn kind_from_real_trace(abs_trace: f64, is_identity: bool) -> IsometryKind {
    if is_identity {
        IsometryKind::Identity
    } else if abs_trace > 2.0 {
        IsometryKind::Loxodromic { length: 2.0 * (abs_trace / 2.0).acosh(), angle: 0.0 }
    } else if abs_trace == 2.0 {
        IsometryKind::Parabolic
    } else {
        IsometryKind::Elliptic { angle: 2.0 * (abs_trace / 2.0).acos() }
    }
}

/// Orientation-preserving isometry of H² as a unimodular real matrix, up to sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Isometry2 {
    /// Builds a matrix with `|det - 1| <= 1e-12`, canonicalizing the sign.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det - 1.0).abs().le(&DET_TOL) {
            return domain(format!("determinant {det} is not 1"));
        }
        Ok(Self { a, b, c, d }.canonical())
    }

    /// Rescales an invertible matrix with positive determinant to determinant one.
    pub fn normalized(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) {
            return domain(format!("determinant {det} must be positive"));
        }
        let k = det.sqrt().recip();
        Ok(Self { a: a * k, b: b * k, c: c * k, d: d * k }.canonical())
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// `z ↦ z + t`.
    pub fn translation(t: f64) -> Self {
        Self { a: 1.0, b: t, c: 0.0, d: 1.0 }
    }

    /// `z ↦ e^ℓ z`.
    pub fn dilation(length: f64) -> Self {
        Self { a: (length / 2.0).exp(), b: 0.0, c: 0.0, d: (-length / 2.0).exp() }
    }

    /// Rotation about `i`, acting on tangent vectors at `i` by angle `2φ`.
    pub fn rotation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { a: c, b: s, c: -s, d: c }.canonical()
    }

    /// First nonzero entry in row-major order made positive.
    pub fn canonical(self) -> Self {
        let first = [self.a, self.b, self.c, self.d].into_iter().find(|x| *x != 0.0).unwrap_or(1.0);
        if first < 0.0 {
            Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            self
        }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
        .canonical()
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }.canonical()
    }

    /// `h g h⁻¹`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        h.compose(self).compose(&h.inverse())
    }

    pub fn apply(&self, p: UH2Point) -> UH2Point {
        let z = p.to_complex();
        let num = z * self.a + self.b;
        let den = z * self.c + self.d;
        let w = num / den;
        // Im(gz) = Im z / |cz + d|² holds exactly for unimodular matrices.
        UH2Point { re: w.re, im: p.im / den.norm_sqr() }
    }

    /// Action on the extended real line; `None` stands for `∞`.
    pub fn apply_boundary(&self, x: Option<f64>) -> Option<f64> {
        match x {
            None => (self.c != 0.0).then(|| self.a / self.c),
            Some(x) => {
                let den = self.c * x + self.d;
                (den != 0.0).then(|| (self.a * x + self.b) / den)
            }
        }
    }

    pub fn is_identity_within(&self, tol: f64) -> bool {
        (self.a - 1.0).abs() <= tol && self.b.abs() <= tol && self.c.abs() <= tol && (self.d - 1.0).abs() <= tol
    }

    pub fn classify(&self) -> Classification {
        let t = self.trace().abs();
        let near_identity = self.is_identity_within(PARABOLIC_BAND);
        if (t - 2.0).abs() <= PARABOLIC_BAND {
            let exact = t == 2.0;
            let kind = if near_identity { IsometryKind::Identity } else { IsometryKind::Parabolic };
            Classification { kind, ambiguous: !exact && !near_identity }
        } else {
            Classification { kind: kind_from_real_trace(t, false), ambiguous: false }
        }
    }

    pub fn to_complex(&self) -> Isometry3 {
        let r = |x: f64| Complex64::new(x, 0.0);
        Isometry3 { a: r(self.a), b: r(self.b), c: r(self.c), d: r(self.d) }.canonical()
    }
}

/// Orientation-preserving isometry of H³ as a matrix in SL(2, C), up to sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry3 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Isometry3 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).norm() > DET_TOL {
            return domain(format!("determinant {det} is not 1"));
        }
        Ok(Self { a, b, c, d }.canonical())
    }

    pub fn diagonal(mu: Complex64) -> Self {
        Self { a: mu, b: Complex64::new(0.0, 0.0), c: Complex64::new(0.0, 0.0), d: mu.inv() }.canonical()
    }

    /// First nonzero entry given an argument in `[0, π)`.
    pub fn canonical(self) -> Self {
        let first = [self.a, self.b, self.c, self.d].into_iter().find(|z| z.norm() != 0.0);
        match first {
            Some(z) => {
                let arg = z.arg();
                if arg < 0.0 || arg >= PI {
                    Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
                } else {
                    self
                }
            }
            None => self,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn compose(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
        .canonical()
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }.canonical()
    }

    pub fn conjugate_by(&self, h: &Self) -> Self {
        h.compose(self).compose(&h.inverse())
    }

    /// Entrywise complex conjugate (the conjugate by the reflection in a vertical plane).
    pub fn complex_conjugate(&self) -> Self {
        Self { a: self.a.conj(), b: self.b.conj(), c: self.c.conj(), d: self.d.conj() }.canonical()
    }

    /// Poincaré extension acting on the upper half-space.
    pub fn apply(&self, p: UH3Point) -> UH3Point {
        let z = p.horizontal;
        let r2 = p.height * p.height;
        let cz_d = self.c * z + self.d;
        let den = cz_d.norm_sqr() + self.c.norm_sqr() * r2;
        let num = (self.a * z + self.b) * cz_d.conj() + self.a * self.c.conj() * r2;
        UH3Point { horizontal: num / den, height: p.height / den }
    }

    pub fn classify(&self) -> Classification {
        let tr = self.trace();
        let is_real_band = tr.im.abs() <= PARABOLIC_BAND && tr.re.abs() <= 2.0 + PARABOLIC_BAND;
        if !is_real_band {
            let lambda = self.translation_length_unchecked();
            return Classification {
                kind: IsometryKind::Loxodromic { length: lambda.re, angle: lambda.im },
                ambiguous: false,
            };
        }
        let t = tr.re.abs();
        let near_identity = (self.a - 1.0).norm() <= PARABOLIC_BAND
            && self.b.norm() <= PARABOLIC_BAND
            && self.c.norm() <= PARABOLIC_BAND
            && (self.d - 1.0).norm() <= PARABOLIC_BAND;
        if (t - 2.0).abs() <= PARABOLIC_BAND {
            let exact = t == 2.0 && tr.im == 0.0;
            let kind = if near_identity { IsometryKind::Identity } else { IsometryKind::Parabolic };
            Classification { kind, ambiguous: !exact && !near_identity }
        } else {
            Classification { kind: kind_from_real_trace(t, false), ambiguous: tr.im != 0.0 }
        }
    }

    /// Complex translation length `λ = ℓ + iθ` with `θ ∈ (-π, π]`.
    pub fn complex_translation_length(&self) -> Result<Complex64> {
        match self.classify().kind {
            IsometryKind::Loxodromic { .. } => Ok(self.translation_length_unchecked()),
            other => Err(Error::Kind { expected: "loxodromic", found: other.name().to_string() }),
        }
    }

    fn translation_length_unchecked(&self) -> Complex64 {
        let tr = self.trace();
        let root = (tr * tr - 4.0).sqrt();
        let mut mu = (tr + root) / 2.0;
        if mu.norm() < 1.0 {
            mu = (tr - root) / 2.0;
        }
        let lambda = 2.0 * mu.ln();
        Complex64::new(lambda.re, fold_angle(lambda.im))
    }
}

/// Reduces an angle modulo 2π into `(-π, π]`.
pub fn fold_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut x = theta.rem_euclid(two_pi);
    if x > PI {
        x -= two_pi;
    }
    x
}
