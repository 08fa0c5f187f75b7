//! Complex hyperbolic space `H^n_C` in the projective model of the form
//! `⟨z, w⟩ = -z0 w̄n + z·w̄ - zn w̄0`, with the parabolic maps fixing `∞`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const UNITARY_TOL: f64 = 1e-12;
const HOROSPHERE_TOL: f64 = 1e-9;

/// Homogeneous coordinates `[w0 : w : wn]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CHPoint {
    pub coords: Vec<Complex64>,
}

pub fn hermitian(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let n = x.len() - 1;
    let mid: Complex64 = (1..n).map(|i| x[i] * y[i].conj()).sum();
    -x[0] * y[n].conj() + mid - x[n] * y[0].conj()
}

impl CHPoint {
    pub fn new(w0: Complex64, w: Vec<Complex64>, wn: Complex64) -> Result<Self> {
        let mut coords = Vec::with_capacity(w.len() + 2);
        coords.push(w0);
        coords.extend(w);
        coords.push(wn);
        Self::from_coords(coords)
    }

    pub fn from_coords(coords: Vec<Complex64>) -> Result<Self> {
        if coords.len() < 3 {
            return domain("a point of H^n_C needs at least three coordinates");
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return domain("non-finite coordinate");
        }
        Ok(Self { coords })
    }

    /// The point `[w0 : w : 1]` on the horosphere `H_s` with `Im w0 = v`.
    pub fn on_horosphere(s: f64, w: Vec<Complex64>, v: f64) -> Result<Self> {
        if !(s > 0.0) {
            return domain(format!("horosphere parameter must be positive, got {s}"));
        }
        let norm: f64 = w.iter().map(|c| c.norm_sqr()).sum();
        Self::new(Complex64::new((norm + s) / 2.0, v), w, Complex64::new(1.0, 0.0))
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn q(&self) -> f64 {
        hermitian(&self.coords, &self.coords).re
    }

    /// `q` of the representative with last coordinate 1.
    pub fn normalized_q(&self) -> Result<f64> {
        let last = self.coords[self.dim()];
        if last.norm() < 1e-300 {
            return domain("point at infinity has no affine representative");
        }
        Ok(self.q() / last.norm_sqr())
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        Self { coords: self.coords.iter().map(|c| c * k).collect() }
    }

    fn interior_check(&self) -> Result<()> {
        let scale: f64 = self.coords.iter().map(|c| c.norm_sqr()).sum();
        let q = self.q();
        if !(q < -1e-14 * scale) {
            return domain(format!("point is not in the interior (q = {q:e})"));
        }
        Ok(())
    }
}

/// `argcosh √(⟨x,y⟩⟨y,x⟩ / (q(x) q(y)))`.
pub fn ch_dist(x: &CHPoint, y: &CHPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return domain("points live in different dimensions");
    }
    x.interior_check()?;
    y.interior_check()?;
    let xy = hermitian(&x.coords, &y.coords);
    let c2 = xy.norm_sqr() / (x.q() * y.q());
    Ok(c2.sqrt().max(1.0).acosh())
}

/// Heisenberg translation `T_Z` for `Z = [z0 : z : 1]` on the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisTranslation {
    pub z0: Complex64,
    pub z: Vec<Complex64>,
}

impl HeisTranslation {
    pub fn new(z0: Complex64, z: Vec<Complex64>) -> Result<Self> {
        let t = Self { z0, z };
        t.validate()?;
        Ok(t)
    }

    /// `Z` with horizontal part `z` and height `v`: `z0 = |z|²/2 + i v`.
    pub fn with_height(z: Vec<Complex64>, v: f64) -> Self {
        let norm: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        Self { z0: Complex64::new(norm / 2.0, v), z }
    }

    pub fn vertical(n: usize, v: f64) -> Self {
        Self::with_height(vec![Complex64::new(0.0, 0.0); n - 1], v)
    }

    pub fn validate(&self) -> Result<()> {
        let norm: f64 = self.z.iter().map(|c| c.norm_sqr()).sum();
        if (2.0 * self.z0.re - norm).abs() > UNITARY_TOL * (1.0 + norm) {
            return Err(Error::Constraint(format!(
                "Z is not on the boundary: 2 Re z0 = {} but |z|² = {norm}",
                2.0 * self.z0.re
            )));
        }
        Ok(())
    }

    pub fn is_vertical(&self) -> bool {
        self.z.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// `T_Z T_W = T_{(z0 + w0 + z*w, z + w)}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.z.len() != other.z.len() {
            return domain("translations of different dimensions");
        }
        let cross: Complex64 = self.z.iter().zip(&other.z).map(|(a, b)| a.conj() * b).sum();
        Ok(Self { z0: self.z0 + other.z0 + cross, z: self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect() })
    }

    pub fn as_parabolic(&self) -> ParabolicMap {
        let m = self.z.len();
        let mut big_a = vec![vec![Complex64::new(0.0, 0.0); m]; m];
        for (i, row) in big_a.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        ParabolicMap { a: self.z.clone(), big_a, b: self.z.clone(), z0: self.z0 }
    }
}

/// The projective map of `[[1, a*, z0], [0, A, b], [0, 0, 1]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicMap {
    pub a: Vec<Complex64>,
    pub big_a: Vec<Vec<Complex64>>,
    pub b: Vec<Complex64>,
    pub z0: Complex64,
}

impl ParabolicMap {
    pub fn new(a: Vec<Complex64>, big_a: Vec<Vec<Complex64>>, b: Vec<Complex64>, z0: Complex64) -> Result<Self> {
        let p = Self { a, big_a, b, z0 };
        p.validate()?;
        Ok(p)
    }

    /// Rotation `A` about the vertical axis through `a`: `b = A a` and
    /// `z0 = |a|²/2 + i v`.
    pub fn rotational(big_a: Vec<Vec<Complex64>>, a: Vec<Complex64>, v: f64) -> Result<Self> {
        let b = mat_vec(&big_a, &a);
        let norm: f64 = a.iter().map(|c| c.norm_sqr()).sum();
        Self::new(a, big_a, b, Complex64::new(norm / 2.0, v))
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.a.len();
        if self.b.len() != m || self.big_a.len() != m || self.big_a.iter().any(|r| r.len() != m) {
            return domain("parabolic blocks have mismatched sizes");
        }
        for i in 0..m {
            for j in 0..m {
                let g: Complex64 = (0..m).map(|k| self.big_a[k][i].conj() * self.big_a[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (g - target).norm() > UNITARY_TOL {
                    return Err(Error::Constraint(format!("A is not unitary (entry ({i},{j}) of A*A is {g})")));
                }
            }
        }
        let aa = mat_vec(&self.big_a, &self.a);
        if aa.iter().zip(&self.b).any(|(x, y)| (x - y).norm() > UNITARY_TOL * (1.0 + y.norm())) {
            return Err(Error::Constraint("A a differs from b".into()));
        }
        let norm: f64 = self.a.iter().map(|c| c.norm_sqr()).sum();
        if (2.0 * self.z0.re - norm).abs() > UNITARY_TOL * (1.0 + norm) {
            return Err(Error::Constraint(format!("2 Re z0 = {} but |a|² = {norm}", 2.0 * self.z0.re)));
        }
        Ok(())
    }

    pub fn is_identity_rotation(&self) -> bool {
        self.big_a.iter().enumerate().all(|(i, r)| {
            r.iter().enumerate().all(|(j, c)| (c - if i == j { 1.0 } else { 0.0 }).norm() <= UNITARY_TOL)
        })
    }

    pub fn matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.a.len();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut out = vec![vec![zero; m + 2]; m + 2];
        out[0][0] = one;
        for j in 0..m {
            out[0][j + 1] = self.a[j].conj();
        }
        out[0][m + 1] = self.z0;
        for i in 0..m {
            out[i + 1][1..=m].copy_from_slice(&self.big_a[i]);
            out[i + 1][m + 1] = self.b[i];
        }
        out[m + 1][m + 1] = one;
        out
    }
}

fn mat_vec(m: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn heis_apply(map: &ParabolicMap, w: &CHPoint) -> Result<CHPoint> {
    map.validate()?;
    if w.dim() != map.a.len() + 1 {
        return domain("point and map dimensions differ");
    }
    CHPoint::from_coords(mat_vec(&map.matrix(), &w.coords))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorosphereDisplacement {
    pub min: f64,
    pub max: f64,
    pub values: Vec<f64>,
}

impl HorosphereDisplacement {
    pub fn spread(&self) -> f64 {
        self.max - self.min
    }
}

/// `d(W, γ W)` for sample points `W` on `H_s`.
pub fn displacement_on_horosphere(map: &ParabolicMap, s: f64, sample: &[CHPoint]) -> Result<HorosphereDisplacement> {
    if sample.is_empty() {
        return domain("empty sample");
    }
    let mut values = Vec::with_capacity(sample.len());
    for w in sample {
        let q = w.normalized_q()?;
        if (q + s).abs() > HOROSPHERE_TOL * (1.0 + s) {
            return domain(format!("sample point has q = {q}, not on H_{s}"));
        }
        values.push(ch_dist(w, &heis_apply(map, w)?)?);
    }
    Ok(HorosphereDisplacement {
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_point(rng: &mut ChaCha8Rng) -> CHPoint {
        let s = rng.gen_range(0.1..5.0);
        CHPoint::on_horosphere(s, vec![c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))], rng.gen_range(-3.0..3.0))
            .unwrap()
            .scaled(c(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn distance_basics() {
        let x = CHPoint::on_horosphere(2.0, vec![c(0.3, -1.0)], 0.7).unwrap();
        assert_eq!(ch_dist(&x, &x).unwrap(), 0.0);
        let y = CHPoint::on_horosphere(0.5, vec![c(1.0, 2.0)], -1.0).unwrap();
        let d = ch_dist(&x, &y).unwrap();
        assert!((ch_dist(&x.scaled(c(2.0, 0.0)), &y).unwrap() - d).abs() < 1e-12);
        assert!((ch_dist(&x.scaled(c(0.0, -3.0)), &y.scaled(c(1.5, 1.5))).unwrap() - d).abs() < 1e-12);
        assert!((ch_dist(&y, &x).unwrap() - d).abs() < 1e-14);
    }

    #[test]
    fn vertical_geodesic() {
        for (s1, s2) in [(1.0f64, 2.0f64), (0.3, 7.0), (5.0, 5.5)] {
            let a = CHPoint::on_horosphere(s1, vec![c(0.0, 0.0)], 0.0).unwrap();
            let b = CHPoint::on_horosphere(s2, vec![c(0.0, 0.0)], 0.0).unwrap();
            assert!((ch_dist(&a, &b).unwrap() - 0.5 * (s1 / s2).ln().abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_and_exterior_are_rejected() {
        let boundary = CHPoint::new(c(0.5, 0.0), vec![c(1.0, 0.0)], c(1.0, 0.0)).unwrap();
        let outside = CHPoint::new(c(0.0, 0.0), vec![c(1.0, 0.0)], c(1.0, 0.0)).unwrap();
        let inside = CHPoint::on_horosphere(1.0, vec![c(0.0, 0.0)], 0.0).unwrap();
        assert!(ch_dist(&boundary, &inside).is_err());
        assert!(ch_dist(&inside, &outside).is_err());
    }

    #[test]
    fn constraints_are_enforced() {
        assert!(HeisTranslation::new(c(1.0, 0.0), vec![c(0.0, 0.0)]).is_err());
        assert!(HeisTranslation::new(c(0.5, 3.0), vec![c(0.0, 1.0)]).is_ok());
        let rot = vec![vec![c(0.0, 1.0)]];
        assert!(ParabolicMap::new(vec![c(1.0, 0.0)], vec![vec![c(1.1, 0.0)]], vec![c(1.1, 0.0)], c(0.5, 0.0)).is_err());
        assert!(ParabolicMap::new(vec![c(1.0, 0.0)], rot.clone(), vec![c(1.0, 0.0)], c(0.5, 0.0)).is_err());
        assert!(ParabolicMap::new(vec![c(1.0, 0.0)], rot, vec![c(0.0, 1.0)], c(0.5, 0.0)).is_ok());
    }

    #[test]
    fn identity_and_horospheres() {
        let id = HeisTranslation::vertical(2, 0.0).as_parabolic();
        let w = CHPoint::on_horosphere(2.0, vec![c(0.4, 0.1)], 1.0).unwrap();
        assert_eq!(heis_apply(&id, &w).unwrap(), w);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let t = HeisTranslation::with_height(vec![c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))], rng.gen_range(-2.0..2.0));
            let s = rng.gen_range(0.2..4.0);
            let p = CHPoint::on_horosphere(s, vec![c(rng.gen_range(-2.0..2.0), 0.3)], 0.1).unwrap();
            let image = heis_apply(&t.as_parabolic(), &p).unwrap();
            assert!((image.normalized_q().unwrap() + s).abs() < 1e-10);
        }
    }

    #[test]
    fn composition_is_the_heisenberg_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let z1 = vec![c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))];
            let z2 = vec![c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))];
            let t1 = HeisTranslation::with_height(z1, rng.gen_range(-2.0..2.0));
            let t2 = HeisTranslation::with_height(z2, rng.gen_range(-2.0..2.0));
            let (m1, m2) = (t1.as_parabolic().matrix(), t2.as_parabolic().matrix());
            let product: Vec<Vec<Complex64>> =
                (0..3).map(|i| (0..3).map(|j| (0..3).map(|k| m1[i][k] * m2[k][j]).sum()).collect()).collect();
            let composed = t1.compose(&t2).unwrap();
            composed.validate().unwrap();
            let m = composed.as_parabolic().matrix();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((m[i][j] - product[i][j]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn vertical_translations_are_central() {
        let v = HeisTranslation::vertical(2, 1.7);
        for z in [c(1.0, 0.0), c(-0.3, 2.0), c(0.0, 0.0)] {
            let t = HeisTranslation::with_height(vec![z], -0.4);
            let (a, b) = (v.compose(&t).unwrap(), t.compose(&v).unwrap());
            assert!((a.z0 - b.z0).norm() < 1e-15 && a.z == b.z);
        }
    }

    #[test]
    fn isometries_preserve_distance_and_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let t = HeisTranslation::with_height(vec![c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))], rng.gen_range(-3.0..3.0));
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let rot = ParabolicMap::rotational(vec![vec![c(phi.cos(), phi.sin())]], vec![c(rng.gen_range(-1.0..1.0), 0.2)], 0.5).unwrap();
            let (x, y) = (random_point(&mut rng), random_point(&mut rng));
            let d = ch_dist(&x, &y).unwrap();
            for map in [t.as_parabolic(), rot] {
                let (gx, gy) = (heis_apply(&map, &x).unwrap(), heis_apply(&map, &y).unwrap());
                assert!((ch_dist(&gx, &gy).unwrap() - d).abs() < 1e-10 * (1.0 + d));
                assert!((gx.q() - x.q()).abs() < 1e-10 * (1.0 + x.q().abs()));
            }
        }
    }

    #[test]
    fn closed_form_displacement_on_h2() {
        // d(W, T_Z W) = argcosh(|z w̄ - z̄ w - z0 - 2| / 2) for W on H_2.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let t = HeisTranslation::with_height(vec![z], rng.gen_range(-2.0..2.0));
            let w = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let p = CHPoint::on_horosphere(2.0, vec![w], rng.gen_range(-5.0..5.0)).unwrap();
            let d = displacement_on_horosphere(&t.as_parabolic(), 2.0, &[p]).unwrap().values[0];
            let formula = ((z * w.conj() - z.conj() * w - t.z0 - 2.0).norm() / 2.0).acosh();
            assert!((d - formula).abs() < 1e-9 * (1.0 + d));
        }
    }

    #[test]
    fn vertical_is_uniform_others_grow() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sample: Vec<CHPoint> = (0..100)
            .map(|_| CHPoint::on_horosphere(2.0, vec![c(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0))], rng.gen_range(-50.0..50.0)).unwrap())
            .collect();
        let vertical = HeisTranslation::vertical(2, 2.0 * 0.8).as_parabolic();
        let r = displacement_on_horosphere(&vertical, 2.0, &sample).unwrap();
        assert!(r.spread() <= 1e-10, "{}", r.spread());
        let expected = ((c(0.0, 1.6) + 2.0).norm() / 2.0).acosh();
        assert!((r.min - expected).abs() < 1e-12);

        let line = |scale: f64| CHPoint::on_horosphere(2.0, vec![c(scale, 0.0)], 0.0).unwrap();
        let horizontal = HeisTranslation::with_height(vec![c(0.0, 1.0)], 0.0).as_parabolic();
        let rot = ParabolicMap::rotational(vec![vec![c(0.0, 1.0)]], vec![c(1.0, 0.0)], 1.0).unwrap();
        for map in [horizontal, rot] {
            let d: Vec<f64> = [1.0, 10.0, 100.0]
                .iter()
                .map(|&k| displacement_on_horosphere(&map, 2.0, &[line(k)]).unwrap().values[0])
                .collect();
            assert!(d[0] < d[1] && d[1] < d[2], "{d:?}");
        }
        assert!(displacement_on_horosphere(&vertical, 1.0, &sample).is_err());
    }
}
