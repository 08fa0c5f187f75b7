//! Randomised comparison of the closed-form laws with displacements computed
//! directly from matrices acting on points.
//!
//! Each sample conjugates a normal form (dilation, translation, rotation) by a
//! random isometry `h` and places the test point at a known distance `s` from
//! the normal form's convex set before moving it by `h`. The law is evaluated
//! from `(s, ℓ, θ)` alone; the oracle is `d(x, g x)` with `g = h g0 h⁻¹`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{disp_ell, disp_loxo, disp_loxo_bounds, disp_para, disp_para_bounds};
use crate::error::Result;
use crate::hyperbolic::{dist_h2, dist_h3, Isometry2, Isometry3, UH2Point, UH3Point};

/// Relative slack for the sandwich checks; the plane lower bounds are attained.
pub const BOUNDS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawCheck {
    pub law: &'static str,
    pub samples: usize,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsCheck {
    pub law: &'static str,
    pub samples: usize,
    pub violations: usize,
    /// Largest relative excursion below the lower bound (0 when none).
    pub worst_lower: f64,
    /// Largest relative excursion above the upper bound (0 when none).
    pub worst_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawReport {
    pub seed: u64,
    pub laws: Vec<LawCheck>,
    pub bounds: Vec<BoundsCheck>,
}

impl LawReport {
    pub fn max_rel_error(&self) -> f64 {
        self.laws.iter().map(|l| l.max_rel_error).fold(0.0, f64::max)
    }

    pub fn violations(&self) -> usize {
        self.bounds.iter().map(|b| b.violations).sum()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn random_h2(rng: &mut ChaCha8Rng) -> Isometry2 {
    let t = Isometry2::translation(rng.gen_range(-3.0..3.0));
    let a = Isometry2::dilation(rng.gen_range(-2.0..2.0));
    let r = Isometry2::rotation(rng.gen_range(0.0..std::f64::consts::PI));
    t.compose(&a).compose(&r)
}

fn random_h3(rng: &mut ChaCha8Rng) -> Isometry3 {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let shift = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    let t = Isometry3 { a: c(1.0, 0.0), b: shift, c: c(0.0, 0.0), d: c(1.0, 0.0) };
    let mu = c(rng.gen_range(-1.0..1.0), rng.gen_range(-3.2..3.2)).exp();
    let a = Isometry3::diagonal(mu);
    let (s, co) = rng.gen_range(0.0..std::f64::consts::PI).sin_cos();
    let r = Isometry3 { a: c(co, 0.0), b: c(s, 0.0), c: c(-s, 0.0), d: c(co, 0.0) };
    t.compose(&a).compose(&r)
}

/// Point at distance `s` from the imaginary axis.
fn near_vertical_axis(rng: &mut ChaCha8Rng, s: f64) -> UH2Point {
    let scale = rng.gen_range(-2.0f64..2.0).exp();
    let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    UH2Point { re: scale * side * s.tanh(), im: scale / s.cosh() }
}

struct Tally {
    law: &'static str,
    samples: usize,
    max_rel_error: f64,
}

impl Tally {
    fn new(law: &'static str) -> Self {
        Self { law, samples: 0, max_rel_error: 0.0 }
    }

    fn push(&mut self, law: f64, oracle: f64) {
        self.samples += 1;
        let e = rel(law, oracle);
        // NaN must not hide behind f64::max.
        self.max_rel_error = if e.is_nan() { f64::INFINITY } else { self.max_rel_error.max(e) };
    }

    fn finish(self) -> LawCheck {
        LawCheck { law: self.law, samples: self.samples, max_rel_error: self.max_rel_error }
    }
}

struct BoundsTally {
    check: BoundsCheck,
}

impl BoundsTally {
    fn new(law: &'static str) -> Self {
        Self { check: BoundsCheck { law, samples: 0, violations: 0, worst_lower: 0.0, worst_upper: 0.0 } }
    }

    fn push(&mut self, (lower, upper): (f64, f64), oracle: f64) {
        let c = &mut self.check;
        c.samples += 1;
        let below = (lower - oracle) / lower.max(1.0);
        let above = (oracle - upper) / upper.max(1.0);
        c.worst_lower = c.worst_lower.max(below);
        c.worst_upper = c.worst_upper.max(above);
        if below > BOUNDS_SLACK || above > BOUNDS_SLACK || oracle.is_nan() {
            c.violations += 1;
        }
    }
}

fn loxodromic_plane(rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let length = rng.gen_range(0.1..4.0);
    let s: f64 = rng.gen_range(0.0..6.0);
    let h = random_h2(rng);
    let g = Isometry2::dilation(length).conjugate_by(&h);
    let x = h.apply(near_vertical_axis(rng, s));
    Ok((disp_loxo(s, Complex64::new(length, 0.0))?, dist_h2(x, g.apply(x))?))
}

struct SpaceSample {
    s: f64,
    lambda: Complex64,
    oracle: f64,
}

fn loxodromic_space(rng: &mut ChaCha8Rng) -> Result<SpaceSample> {
    let length = rng.gen_range(0.1..4.0);
    let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let lambda = Complex64::new(length, theta);
    let s: f64 = rng.gen_range(0.0..6.0);
    let h = random_h3(rng);
    // diag(e^{λ/2}, e^{-λ/2}) translates the vertical axis over 0 by ℓ and turns by θ.
    let g = Isometry3::diagonal((lambda / 2.0).exp()).conjugate_by(&h);
    let scale = rng.gen_range(-2.0f64..2.0).exp();
    let dir = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    let x0 = UH3Point { horizontal: dir * scale * s.tanh(), height: scale / s.cosh() };
    let x = h.apply(x0);
    Ok(SpaceSample { s, lambda, oracle: dist_h3(x, g.apply(x))? })
}

struct ParabolicSample {
    s: f64,
    length: f64,
    oracle: f64,
    boundary_displacement: f64,
}

fn parabolic_plane(rng: &mut ChaCha8Rng) -> Result<ParabolicSample> {
    let translation: f64 = rng.gen_range(0.3..3.0);
    let height = rng.gen_range(0.3..3.0);
    let length = 2.0 * (translation / (2.0 * height)).asinh();
    let s: f64 = rng.gen_range(0.0..6.0);
    let h = random_h2(rng);
    let g = Isometry2::translation(translation).conjugate_by(&h);
    let u = rng.gen_range(-3.0..3.0);
    let x = h.apply(UH2Point { re: u, im: height * (-s).exp() });
    let p = h.apply(UH2Point { re: u, im: height });
    Ok(ParabolicSample {
        s,
        length,
        oracle: dist_h2(x, g.apply(x))?,
        boundary_displacement: dist_h2(p, g.apply(p))?,
    })
}

fn elliptic_plane(rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let phi = rng.gen_range(0.01..std::f64::consts::FRAC_PI_2);
    let s = rng.gen_range(0.05..6.0);
    let h = random_h2(rng);
    // rotation(φ) turns tangents at i by 2φ.
    let g = Isometry2::rotation(phi).conjugate_by(&h);
    let dir = rng.gen_range(0.0..std::f64::consts::TAU);
    let x = h.apply(crate::hyperbolic::point_at(UH2Point::I, dir, s));
    Ok((disp_ell(s, 2.0 * phi)?, dist_h2(x, g.apply(x))?))
}

/// Runs `samples` law checks per law and `bound_samples` sandwich checks per
/// bound, all from a single seeded stream.
pub fn verify_laws(samples: usize, bound_samples: usize, seed: u64) -> Result<LawReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plane = Tally::new("loxodromic_h2");
    let mut space = Tally::new("loxodromic_h3");
    let mut para = Tally::new("parabolic_h2");
    let mut ell = Tally::new("elliptic_h2");
    for _ in 0..samples {
        let (law, oracle) = loxodromic_plane(&mut rng)?;
        plane.push(law, oracle);
        let sp = loxodromic_space(&mut rng)?;
        space.push(disp_loxo(sp.s, sp.lambda)?, sp.oracle);
        let pa = parabolic_plane(&mut rng)?;
        para.push(disp_para(pa.s, pa.length)?, pa.oracle);
        let (law, oracle) = elliptic_plane(&mut rng)?;
        ell.push(law, oracle);
    }

    let mut lox_bounds = BoundsTally::new("loxodromic_bounds_h3");
    let mut para_bounds = BoundsTally::new("parabolic_bounds_h2");
    for _ in 0..bound_samples {
        let sp = loxodromic_space(&mut rng)?;
        lox_bounds.push(disp_loxo_bounds(sp.s, sp.lambda.re)?, sp.oracle);
        let pa = parabolic_plane(&mut rng)?;
        para_bounds.push(disp_para_bounds(pa.s, pa.length, pa.boundary_displacement)?, pa.oracle);
    }

    Ok(LawReport {
        seed,
        laws: vec![plane.finish(), space.finish(), para.finish(), ell.finish()],
        bounds: vec![lox_bounds.check, para_bounds.check],
    })
}
