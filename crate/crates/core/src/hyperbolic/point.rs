use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A point of the upper half-plane model of H².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UH2Point {
    pub re: f64,
    pub im: f64,
}

impl UH2Point {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(im > 0.0) || !re.is_finite() || !im.is_finite() {
            return domain(format!("upper half-plane point needs im > 0, got {re} + {im}i"));
        }
        Ok(Self { re, im })
    }

    /// The point `i`, the default basepoint.
    pub const I: UH2Point = UH2Point { re: 0.0, im: 1.0 };

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn is_valid(&self) -> bool {
        self.im > 0.0 && self.re.is_finite() && self.im.is_finite()
    }
}

/// A point of the upper half-space model of H³: `(horizontal, height)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UH3Point {
    pub horizontal: Complex64,
    pub height: f64,
}

impl UH3Point {
    pub fn new(horizontal: Complex64, height: f64) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() || !horizontal.is_finite() {
            return domain(format!("upper half-space point needs height > 0, got {height}"));
        }
        Ok(Self { horizontal, height })
    }
}

/// Hyperbolic distance in the upper half-plane.
///
/// Uses `sinh(d/2) = |p - q| / (2 sqrt(im p im q))`, which agrees with
/// `cosh d = 1 + |p - q|² / (2 im p im q)` and stays accurate for nearby points.
pub fn dist_h2(p: UH2Point, q: UH2Point) -> Result<f64> {
    if !p.is_valid() || !q.is_valid() {
        return domain("distance needs points with positive imaginary part");
    }
    Ok(dist_h2_unchecked(p, q))
}

pub(crate) fn dist_h2_unchecked(p: UH2Point, q: UH2Point) -> f64 {
    let dx = p.re - q.re;
    let dy = p.im - q.im;
    let chord = (dx * dx + dy * dy).sqrt();
    2.0 * (chord / (2.0 * (p.im * q.im).sqrt())).asinh()
}

/// Hyperbolic distance in the upper half-space.
pub fn dist_h3(p: UH3Point, q: UH3Point) -> Result<f64> {
    if !(p.height > 0.0) || !(q.height > 0.0) {
        return domain("distance needs points with positive height");
    }
    let dh = p.horizontal - q.horizontal;
    let dr = p.height - q.height;
    let chord = (dh.norm_sqr() + dr * dr).sqrt();
    Ok(2.0 * (chord / (2.0 * (p.height * q.height).sqrt())).asinh())
}
