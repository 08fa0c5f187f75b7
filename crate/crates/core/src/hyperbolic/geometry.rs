use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::isometry::{Isometry2, IsometryKind};
use super::point::UH2Point;
use crate::error::{domain, Error, Result};

/// Tolerance for matching a horoball base against a parabolic fixed point.
const BASE_TOL: f64 = 1e-9;

/// A point of the extended real line `R ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    fn as_option(self) -> Option<f64> {
        match self {
            BoundaryPoint::Finite(x) => Some(x),
            BoundaryPoint::Infinity => None,
        }
    }

    fn from_option(x: Option<f64>) -> Self {
        x.map_or(BoundaryPoint::Infinity, BoundaryPoint::Finite)
    }

    pub fn close_to(self, other: BoundaryPoint, tol: f64) -> bool {
        match (self, other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => true,
            (BoundaryPoint::Finite(x), BoundaryPoint::Finite(y)) => (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())),
            _ => false,
        }
    }

    pub fn image(self, g: &Isometry2) -> BoundaryPoint {
        BoundaryPoint::from_option(g.apply_boundary(self.as_option()))
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(x) => write!(f, "{x}"),
            BoundaryPoint::Infinity => write!(f, "∞"),
        }
    }
}

/// Horoball in the upper half-plane.
///
/// Based at `∞`, `size` is the cutoff height `H` (the set `Im z >= H`).
/// Based at a real point `ξ`, `size` is the Euclidean diameter `D` of the
/// tangent disc; equivalently the image of `Im w >= 1/D` under `w ↦ ξ - 1/w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horoball {
    pub base: BoundaryPoint,
    pub size: f64,
}

impl Horoball {
    pub fn new(base: BoundaryPoint, size: f64) -> Result<Self> {
        if !(size > 0.0) || !size.is_finite() {
            return domain(format!("horoball size must be positive, got {size}"));
        }
        Ok(Self { base, size })
    }

    /// Horoball at `base` whose image under the standard map sending `base`
    /// to `∞` (`z ↦ -1/(z - ξ)`, or the identity when `base = ∞`) is `Im >= height`.
    pub fn with_cusp_height(base: BoundaryPoint, height: f64) -> Result<Self> {
        match base {
            BoundaryPoint::Infinity => Self::new(base, height),
            BoundaryPoint::Finite(_) => Self::new(base, 1.0 / height),
        }
    }

    /// Height of the horoball in the frame where its base sits at `∞`.
    pub fn cusp_height(&self) -> f64 {
        match self.base {
            BoundaryPoint::Infinity => self.size,
            BoundaryPoint::Finite(_) => 1.0 / self.size,
        }
    }

    /// Signed distance: positive outside, negative inside (a Busemann value).
    pub fn signed_distance(&self, x: UH2Point) -> f64 {
        match self.base {
            BoundaryPoint::Infinity => (self.size / x.im).ln(),
            BoundaryPoint::Finite(xi) => {
                let dx = x.re - xi;
                ((dx * dx + x.im * x.im) / (x.im * self.size)).ln()
            }
        }
    }

    /// Distance to the horoball as a convex set (zero inside).
    pub fn distance(&self, x: UH2Point) -> f64 {
        self.signed_distance(x).max(0.0)
    }

    /// Image of the horoball under an isometry.
    pub fn image(&self, g: &Isometry2) -> Horoball {
        // Map to the ∞-frame, apply g, then read the new horoball off the
        // image of a boundary point of the original.
        let base = self.base.image(g);
        let p = self.boundary_point();
        let q = g.apply(p);
        let size = match base {
            BoundaryPoint::Infinity => q.im,
            BoundaryPoint::Finite(xi) => {
                let dx = q.re - xi;
                (dx * dx + q.im * q.im) / q.im
            }
        };
        Horoball { base, size }
    }

    /// A point on the bounding horocycle.
    pub fn boundary_point(&self) -> UH2Point {
        match self.base {
            BoundaryPoint::Infinity => UH2Point { re: 0.0, im: self.size },
            BoundaryPoint::Finite(xi) => UH2Point { re: xi, im: self.size },
        }
    }

    /// Moves the base to `∞`: returns `σ` with `σ(base) = ∞` mapping this
    /// horoball onto `Im >= cusp_height`.
    pub fn normalizer(&self) -> Isometry2 {
        match self.base {
            BoundaryPoint::Infinity => Isometry2::identity(),
            BoundaryPoint::Finite(xi) => Isometry2 { a: 0.0, b: -1.0, c: 1.0, d: -xi }.canonical(),
        }
    }
}

fn kind_error(expected: &'static str, found: IsometryKind) -> Error {
    Error::Kind { expected, found: found.name().to_string() }
}

/// Fixed points of the Möbius map on the extended real line (at most two).
fn boundary_fixed_points(g: &Isometry2) -> (BoundaryPoint, BoundaryPoint) {
    let (a, b, c, d) = (g.a, g.b, g.c, g.d);
    if c == 0.0 {
        // z ↦ (a z + b)/d fixes ∞ and, unless a = d, b/(d - a).
        let other = if a == d { BoundaryPoint::Infinity } else { BoundaryPoint::Finite(b / (d - a)) };
        return (BoundaryPoint::Infinity, other);
    }
    // c z² + (d - a) z - b = 0; discriminant tr² - 4.
    let disc = ((a + d) * (a + d) - 4.0).max(0.0).sqrt();
    // Cancellation-free pair: one root from the quadratic formula, the other
    // from the product of roots -b/c.
    let q = (a - d) + disc.copysign(a - d);
    if q == 0.0 {
        let r = (a - d) / (2.0 * c);
        return (BoundaryPoint::Finite(r), BoundaryPoint::Finite(r));
    }
    let r1 = q / (2.0 * c);
    let r2 = -2.0 * b / q;
    (BoundaryPoint::Finite(r1), BoundaryPoint::Finite(r2))
}

/// Endpoints of the translation axis of a loxodromic isometry, as
/// (repelling, attracting).
pub fn axis(g: &Isometry2) -> Result<(BoundaryPoint, BoundaryPoint)> {
    let kind = g.classify().kind;
    if !matches!(kind, IsometryKind::Loxodromic { .. }) {
        return Err(kind_error("loxodromic", kind));
    }
    let (p, q) = boundary_fixed_points(g);
    // g'(x) = 1/(cx + d)², so a finite fixed point attracts iff |cx + d| > 1.
    let attracting = |x: BoundaryPoint| match x {
        BoundaryPoint::Infinity => g.a.abs() > g.d.abs(),
        BoundaryPoint::Finite(x) => (g.c * x + g.d).abs() > 1.0,
    };
    if attracting(p) {
        Ok((q, p))
    } else {
        Ok((p, q))
    }
}

/// Distance from `x` to the geodesic with the given endpoints.
pub fn dist_to_geodesic(x: UH2Point, ends: (BoundaryPoint, BoundaryPoint)) -> f64 {
    match ends {
        (BoundaryPoint::Infinity, BoundaryPoint::Finite(c)) | (BoundaryPoint::Finite(c), BoundaryPoint::Infinity) => {
            ((x.re - c).abs() / x.im).asinh()
        }
        (BoundaryPoint::Finite(p), BoundaryPoint::Finite(q)) => {
            // w = (z - p)/(z - q) sends the geodesic to the imaginary axis.
            let z = x.to_complex();
            let w = (z - p) / (z - q);
            (w.re.abs() / w.im.abs()).asinh()
        }
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => f64::NAN,
    }
}

/// Distance from `x` to the translation axis of `g`.
pub fn dist_to_axis(x: UH2Point, g: &Isometry2) -> Result<f64> {
    let ends = axis(g)?;
    Ok(dist_to_geodesic(x, ends))
}

/// Data attached to a parabolic isometry and a horoball at its fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicData {
    pub fixed_point: BoundaryPoint,
    /// Horospherical translation length relative to `horoball`.
    pub length: f64,
    /// Translation amount in the frame where the fixed point is `∞`.
    pub translation: f64,
    pub horoball: Horoball,
}

impl ParabolicData {
    /// Distance from `x` to the horoball (zero inside).
    pub fn dist_to_horoball(&self, x: UH2Point) -> f64 {
        self.horoball.distance(x)
    }

    pub fn signed_dist_to_horoball(&self, x: UH2Point) -> f64 {
        self.horoball.signed_distance(x)
    }
}

/// Fixed point of a parabolic isometry.
pub fn parabolic_fixed_point(g: &Isometry2) -> Result<BoundaryPoint> {
    let kind = g.classify().kind;
    if kind != IsometryKind::Parabolic {
        return Err(kind_error("parabolic", kind));
    }
    Ok(if g.c == 0.0 { BoundaryPoint::Infinity } else { BoundaryPoint::Finite((g.a - g.d) / (2.0 * g.c)) })
}

pub fn parabolic_data(g: &Isometry2, h: Horoball) -> Result<ParabolicData> {
    let fixed = parabolic_fixed_point(g)?;
    if !h.base.close_to(fixed, BASE_TOL) {
        return Err(Error::Consistency { horoball: h.base.to_string(), fixed: fixed.to_string() });
    }
    // Use the horoball's own base so the normalizer fixes ∞ exactly.
    let sigma = Horoball { base: h.base, size: h.size }.normalizer();
    let conj = g.conjugate_by(&sigma);
    let translation = (conj.b / conj.d).abs();
    let height = h.cusp_height();
    let length = 2.0 * (translation / (2.0 * height)).asinh();
    Ok(ParabolicData { fixed_point: fixed, length, translation, horoball: h })
}

/// Fixed point and nonoriented rotation angle of an elliptic isometry.
pub fn elliptic_data(g: &Isometry2) -> Result<(UH2Point, f64)> {
    let kind = g.classify().kind;
    let angle = match kind {
        IsometryKind::Elliptic { angle } => angle,
        other => return Err(kind_error("elliptic", other)),
    };
    let tr = g.trace();
    let s = (4.0 - tr * tr).max(0.0).sqrt();
    let re = (g.a - g.d) / (2.0 * g.c);
    let im = (s / (2.0 * g.c)).abs();
    Ok((UH2Point { re, im }, angle))
}

/// Rotation of tangent vectors at an interior fixed point, read from the
/// derivative `g'(z) = 1/(cz + d)²`, folded to `(0, π]`.
pub fn rotation_at_fixed_point(g: &Isometry2, z: UH2Point) -> f64 {
    let den = z.to_complex() * g.c + g.d;
    let deriv = (den * den).inv();
    deriv.arg().abs()
}

/// Angle in `[0, 2π)` of the initial tangent vector of the geodesic from `x0`
/// to `y`, measured in the coordinate frame of the model at `x0`.
pub fn tangent_angle(x0: UH2Point, y: UH2Point) -> Result<f64> {
    if !x0.is_valid() || !y.is_valid() {
        return domain("tangent angle needs points in the upper half-plane");
    }
    if x0 == y {
        return domain("tangent angle is undefined for coincident points");
    }
    let dx = y.re - x0.re;
    let v = if dx == 0.0 {
        Complex64::new(0.0, (y.im - x0.im).signum())
    } else {
        // Geodesic is a circle centred on the real axis at c.
        let c = ((y.re * y.re + y.im * y.im) - (x0.re * x0.re + x0.im * x0.im)) / (2.0 * dx);
        let t = Complex64::new(-x0.im, x0.re - c);
        if t.re.signum() == dx.signum() {
            t
        } else {
            -t
        }
    };
    Ok(v.im.atan2(v.re).rem_euclid(2.0 * PI))
}

/// Point at hyperbolic distance `r` from `x` in direction `angle` (model frame).
pub fn point_at(x: UH2Point, angle: f64, r: f64) -> UH2Point {
    // From i: the geodesic in direction angle is the image of the imaginary
    // axis under a rotation about i; then move i to x by an affine map.
    let phi = (angle - PI / 2.0) / 2.0;
    let rot = Isometry2::rotation(phi);
    let p = rot.apply(UH2Point { re: 0.0, im: r.exp() });
    UH2Point { re: x.re + x.im * p.re, im: x.im * p.im }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::point::dist_h2;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn axis_distance_examples() {
        let g = Isometry2::dilation(2.0);
        assert!(dist_to_axis(UH2Point::I, &g).unwrap().abs() <= 1e-10);
        let x = UH2Point::new(1f64.tanh(), 1.0 / 1f64.cosh()).unwrap();
        assert_relative_eq!(dist_to_axis(x, &g).unwrap(), 1.0, epsilon = 1e-12);

        // [[5,2],[2,1]] has axis 1 ± √2, which passes through i.
        let g = Isometry2::new(5.0, 2.0, 2.0, 1.0).unwrap();
        let s = dist_to_axis(UH2Point::I, &g).unwrap();
        let ell = 2.0 * 3f64.acosh();
        let d = dist_h2(UH2Point::I, g.apply(UH2Point::I)).unwrap();
        assert_relative_eq!(d, 2.0 * (s.cosh() * (ell / 2.0).sinh()).asinh(), epsilon = 1e-12);
        assert!(s.abs() < 1e-10);
        let x = UH2Point::new(0.3, 2.0).unwrap();
        let s = dist_to_axis(x, &g).unwrap();
        let d = dist_h2(x, g.apply(x)).unwrap();
        assert_relative_eq!(d, 2.0 * (s.cosh() * (ell / 2.0).sinh()).asinh(), epsilon = 1e-12);
    }

    #[test]
    fn axis_requires_loxodromic() {
        assert!(matches!(dist_to_axis(UH2Point::I, &Isometry2::translation(1.0)), Err(Error::Kind { .. })));
    }

    #[test]
    fn axis_orientation() {
        let g = Isometry2::dilation(1.0);
        let (rep, att) = axis(&g).unwrap();
        assert_eq!(rep, BoundaryPoint::Finite(0.0));
        assert_eq!(att, BoundaryPoint::Infinity);
        let (rep, att) = axis(&g.inverse()).unwrap();
        assert_eq!(rep, BoundaryPoint::Infinity);
        assert_eq!(att, BoundaryPoint::Finite(0.0));
    }

    #[test]
    fn parabolic_examples() {
        let g = Isometry2::translation(1.0);
        let h = Horoball::new(BoundaryPoint::Infinity, 1.0).unwrap();
        let data = parabolic_data(&g, h).unwrap();
        assert_relative_eq!((data.length / 2.0).sinh(), 0.5, epsilon = 1e-15);
        // The length is d(i, i + 1).
        assert_relative_eq!(data.length.cosh(), 1.5, epsilon = 1e-14);
        assert_eq!(data.dist_to_horoball(UH2Point::I), 0.0);
        assert_relative_eq!(data.dist_to_horoball(UH2Point::new(0.0, 1.0 / E).unwrap()), 1.0, epsilon = 1e-15);

        let g = Isometry2::translation(2.0);
        let h = Horoball::new(BoundaryPoint::Infinity, 2.0).unwrap();
        assert_relative_eq!((parabolic_data(&g, h).unwrap().length / 2.0).sinh(), 0.5, epsilon = 1e-15);

        let wrong = Horoball::new(BoundaryPoint::Finite(0.0), 1.0).unwrap();
        assert!(matches!(parabolic_data(&g, wrong), Err(Error::Consistency { .. })));
    }

    #[test]
    fn parabolic_at_finite_point() {
        // Conjugate z ↦ z + 2 by σ⁻¹ where σ(z) = -1/(z - 3): fixed point 3.
        let h0 = Horoball::new(BoundaryPoint::Finite(3.0), 0.5).unwrap();
        let sigma = h0.normalizer();
        let g = Isometry2::translation(2.0).conjugate_by(&sigma.inverse());
        assert!(parabolic_fixed_point(&g).unwrap().close_to(BoundaryPoint::Finite(3.0), 1e-12));
        let data = parabolic_data(&g, h0).unwrap();
        // Height 2 in the normalized frame.
        assert_relative_eq!((data.length / 2.0).sinh(), 2.0 / (2.0 * 2.0), epsilon = 1e-12);
        // Boundary points are displaced by exactly the horospherical length.
        let y = h0.boundary_point();
        assert!(h0.signed_distance(y).abs() < 1e-12);
        assert_relative_eq!(dist_h2(y, g.apply(y)).unwrap(), data.length, epsilon = 1e-12);
    }

    #[test]
    fn horoball_image_matches_signed_distance() {
        let h = Horoball::new(BoundaryPoint::Infinity, 1.5).unwrap();
        let g = Isometry2::new(5.0, 2.0, 2.0, 1.0).unwrap();
        let img = h.image(&g);
        let x = UH2Point::new(0.4, 0.3).unwrap();
        assert_relative_eq!(img.signed_distance(x), h.signed_distance(g.inverse().apply(x)), epsilon = 1e-12);
    }

    #[test]
    fn elliptic_examples() {
        for phi in [0.3, 0.9, PI / 2.0, 1.3] {
            let g = Isometry2::rotation(phi);
            let (z, theta) = elliptic_data(&g).unwrap();
            assert_relative_eq!(z.re, 0.0, epsilon = 1e-12);
            assert_relative_eq!(z.im, 1.0, epsilon = 1e-12);
            let expected = {
                let t = (2.0 * phi).rem_euclid(2.0 * PI);
                if t > PI {
                    2.0 * PI - t
                } else {
                    t
                }
            };
            assert_relative_eq!(theta, expected, epsilon = 1e-12);
            assert_relative_eq!(rotation_at_fixed_point(&g, z), theta, epsilon = 1e-12);
        }
        let shift = Isometry2::translation(1.0);
        let g = Isometry2::rotation(0.7).conjugate_by(&shift);
        let (z, theta) = elliptic_data(&g).unwrap();
        assert_relative_eq!(z.re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(z.im, 1.0, epsilon = 1e-12);
        assert_relative_eq!(theta, 1.4, epsilon = 1e-12);
        assert!(elliptic_data(&Isometry2::dilation(1.0)).is_err());
    }

    #[test]
    fn tangent_angle_examples() {
        let i = UH2Point::I;
        assert_relative_eq!(tangent_angle(i, UH2Point::new(0.0, 2.0).unwrap()).unwrap(), PI / 2.0);
        assert_relative_eq!(tangent_angle(i, UH2Point::new(0.0, 0.5).unwrap()).unwrap(), 3.0 * PI / 2.0);
        assert!(tangent_angle(i, i).is_err());
    }

    #[test]
    fn point_at_walks_along_geodesics() {
        let x = UH2Point::new(0.5, 1.5).unwrap();
        for k in 0..12 {
            let angle = k as f64 * PI / 6.0 + 0.1;
            let y = point_at(x, angle, 0.8);
            assert_relative_eq!(dist_h2(x, y).unwrap(), 0.8, epsilon = 1e-12);
            assert_relative_eq!(tangent_angle(x, y).unwrap(), angle, epsilon = 1e-9);
        }
    }
}
