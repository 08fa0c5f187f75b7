//! Growth fits, normalized constants and direction statistics for count
//! series, plus the closed-form asymptotic constants for lattices.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::counting::{CountSeries, DirectionSample};
use crate::displacement::{ClassKind, ConjClassInvariants};
use crate::error::{domain, Error, Result};
use crate::groups::{GroupSpec, LatticeData};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    /// RMS residual of `log N` against the line.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares fit of `log y` against `x` over `window`; zero counts are
/// skipped.
pub fn fit_log_linear(xs: &[f64], ys: &[u64], window: (f64, f64)) -> Result<GrowthFit> {
    if xs.len() != ys.len() {
        return domain("abscissae and counts differ in length");
    }
    let (lo, hi) = window;
    if !(lo <= hi) {
        return domain(format!("empty window [{lo}, {hi}]"));
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x >= lo - 1e-12 && **x <= hi + 1e-12 && **y > 0)
        .map(|(x, y)| (*x, (*y as f64).ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} nonzero counts in [{lo}, {hi}], need at least 4",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all points share one abscissa".into()));
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(GrowthFit { slope, intercept, window, residual, points: pts.len() })
}

/// Growth rate of a count series over a threshold window.
pub fn fit_growth_rate(series: &CountSeries, window: (f64, f64)) -> Result<GrowthFit> {
    let (first, last) = match (series.thresholds.first(), series.thresholds.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(Error::InsufficientData("empty series".into())),
    };
    if window.0 < first - 1e-12 || window.1 > last + 1e-12 {
        return domain(format!("window [{}, {}] leaves the series range [{first}, {last}]", window.0, window.1));
    }
    fit_log_linear(&series.thresholds, &series.counts, window)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalConstant {
    pub thresholds: Vec<f64>,
    /// `N(t) e^{-δ t / 2}`.
    pub values: Vec<f64>,
    pub tail_window: (f64, f64),
    pub tail_mean: f64,
    pub tail_min: f64,
    pub tail_max: f64,
}

/// Normalizes a series by `e^{δ t / 2}`. The tail is the last third of the
/// thresholds with a nonzero count.
pub fn empirical_constant(series: &CountSeries, delta: f64) -> Result<EmpiricalConstant> {
    if !(delta > 0.0) {
        return domain(format!("growth exponent must be positive, got {delta}"));
    }
    let values: Vec<f64> = series
        .thresholds
        .iter()
        .zip(&series.counts)
        .map(|(t, n)| *n as f64 * (-delta * t / 2.0).exp())
        .collect();
    let nonzero: Vec<usize> = (0..values.len()).filter(|&i| series.counts[i] > 0).collect();
    if nonzero.is_empty() {
        return Err(Error::InsufficientData("all counts are zero".into()));
    }
    let tail = &nonzero[nonzero.len() - nonzero.len().div_ceil(3)..];
    let tail_vals: Vec<f64> = tail.iter().map(|&i| values[i]).collect();
    Ok(EmpiricalConstant {
        thresholds: series.thresholds.clone(),
        tail_window: (series.thresholds[tail[0]], series.thresholds[*tail.last().unwrap()]),
        tail_mean: tail_vals.iter().sum::<f64>() / tail_vals.len() as f64,
        tail_min: tail_vals.iter().copied().fold(f64::INFINITY, f64::min),
        tail_max: tail_vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantFormula {
    /// Finite-covolume loxodromic constant in `H^n`.
    LoxodromicLattice,
    /// Finite-covolume uniformly translating parabolic constant in `H^n`.
    ParabolicLattice,
    /// Elliptic constant in the plane.
    EllipticPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantInputs {
    pub dimension: u32,
    pub length: f64,
    pub angle: f64,
    pub genus: Option<u32>,
    pub punctures: Option<u32>,
    pub covolume: f64,
    pub index: u32,
    pub reciprocity: u32,
    pub power: u32,
    pub axis_fixer: u32,
    pub stabilizer_order: u32,
    pub cusp_volume: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalConstant {
    pub value: f64,
    pub formula: ConstantFormula,
    pub inputs: ConstantInputs,
}

/// Volume of the unit sphere `S^k`.
pub fn sphere_volume(k: u32) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k - 1) as f64 * sphere_volume(k - 2),
    }
}

/// Asymptotic constant `C` in `N(t) ~ C e^{(n-1)t/2}` for a class in a
/// lattice of `H^n` with the given covolume.
pub fn lattice_constant(dimension: u32, covolume: f64, inv: &ConjClassInvariants) -> Result<TheoreticalConstant> {
    inv.validate()?;
    if dimension < 2 {
        return domain(format!("dimension must be at least 2, got {dimension}"));
    }
    if !(covolume > 0.0 && covolume.is_finite()) {
        return domain(format!("covolume must be positive, got {covolume}"));
    }
    let k = (dimension - 1) as f64;
    let inputs = ConstantInputs {
        dimension,
        length: inv.length,
        angle: inv.angle,
        genus: None,
        punctures: None,
        covolume,
        index: inv.index,
        reciprocity: inv.reciprocity,
        power: inv.power,
        axis_fixer: inv.axis_fixer,
        stabilizer_order: inv.stabilizer_order,
        cusp_volume: inv.cusp_volume,
    };
    let (formula, value) = match inv.kind {
        ClassKind::Loxodromic => {
            let l = inv.length;
            let num = sphere_volume(dimension - 2) * l;
            let den = 2f64.powf(k / 2.0)
                * k
                * inv.power as f64
                * inv.axis_fixer as f64
                * covolume
                * (l.cosh() - inv.angle.cos()).powf(k / 2.0);
            (ConstantFormula::LoxodromicLattice, num / den)
        }
        ClassKind::Parabolic => {
            let cusp = inv
                .cusp_volume
                .ok_or_else(|| Error::InvalidClass("parabolic class without a cusp volume".into()))?;
            let value = inv.index as f64 * cusp / (covolume * (2.0 * (inv.length / 2.0).sinh()).powf(k));
            (ConstantFormula::ParabolicLattice, value)
        }
        ClassKind::Elliptic => {
            if dimension != 2 {
                return domain("the elliptic constant is only available in the plane");
            }
            // Skinning mass of a fixed point: the circle of directions over its stabiliser.
            let value = inv.index as f64 * PI / (inv.stabilizer_order as f64 * covolume * (inv.angle / 2.0).sin());
            (ConstantFormula::EllipticPlane, value)
        }
    };
    Ok(TheoreticalConstant { value, formula, inputs })
}

/// Constant for a surface lattice.
pub fn surface_constant(lattice: &LatticeData, inv: &ConjClassInvariants) -> Result<TheoreticalConstant> {
    let mut c = lattice_constant(2, lattice.covolume, inv)?;
    c.inputs.genus = Some(lattice.genus);
    c.inputs.punctures = Some(lattice.punctures);
    Ok(c)
}

pub fn theoretical_constant(group: &GroupSpec, inv: &ConjClassInvariants) -> Result<TheoreticalConstant> {
    let lattice = group
        .lattice
        .as_ref()
        .ok_or_else(|| Error::InvalidGroup(format!("{} carries no lattice data", group.name)))?;
    surface_constant(lattice, inv)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub tv: f64,
    pub sup_cdf: f64,
    pub chi2: f64,
}

/// Histogram of angles in `[0, 2π)` over `bins` equal arcs.
pub fn direction_histogram(sample: &DirectionSample, bins: usize) -> Result<Vec<u64>> {
    if bins == 0 {
        return domain("need at least one bin");
    }
    if sample.angles.is_empty() {
        return Err(Error::InsufficientData(format!("no directions at t = {}", sample.threshold)));
    }
    let mut hist = vec![0u64; bins];
    for &a in &sample.angles {
        let u = a.rem_euclid(2.0 * PI) / (2.0 * PI);
        hist[((u * bins as f64) as usize).min(bins - 1)] += 1;
    }
    Ok(hist)
}

/// Distances of a histogram from the uniform distribution on its bins: total
/// variation, largest CDF gap at the bin edges, and Pearson's statistic.
pub fn discrepancy_stats(hist: &[u64]) -> Result<Discrepancy> {
    let total: u64 = hist.iter().sum();
    if hist.is_empty() || total == 0 {
        return Err(Error::InsufficientData("empty histogram".into()));
    }
    let b = hist.len() as f64;
    let n = total as f64;
    let mut tv = 0.0;
    let mut sup_cdf: f64 = 0.0;
    let mut chi2 = 0.0;
    let mut cum = 0u64;
    let expected = n / b;
    for (i, &h) in hist.iter().enumerate() {
        let p = h as f64 / n;
        tv += (p - 1.0 / b).abs();
        cum += h;
        sup_cdf = sup_cdf.max((cum as f64 / n - (i + 1) as f64 / b).abs());
        chi2 += (h as f64 - expected).powi(2) / expected;
    }
    Ok(Discrepancy { tv: tv / 2.0, sup_cdf, chi2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::SeriesMeta;
    use crate::hyperbolic::UH2Point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series(ts: Vec<f64>, counts: Vec<u64>) -> CountSeries {
        CountSeries {
            thresholds: ts,
            counts,
            meta: SeriesMeta {
                engine: "test".into(),
                group: "none".into(),
                class: "none".into(),
                basepoint: UH2Point::I,
                radius: 0.0,
                margin: 0.0,
                ball_size: 0,
            },
        }
    }

    #[test]
    fn exact_exponential() {
        // Large amplitude so the integer rounding is invisible in the slope.
        let ts: Vec<f64> = (2..=20).map(|t| t as f64).collect();
        let counts: Vec<u64> = ts.iter().map(|t| (3e12 * (0.5 * t).exp()).round() as u64).collect();
        let fit = fit_growth_rate(&series(ts.clone(), counts.clone()), (2.0, 20.0)).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-10, "{fit:?}");
        assert!(fit.residual < 1e-10);
        let c = empirical_constant(&series(ts, counts), 1.0).unwrap();
        assert!((c.tail_mean / 3e12 - 1.0).abs() < 1e-12);
        assert_eq!(c.tail_window, (14.0, 20.0));
    }

    #[test]
    fn too_few_points() {
        let s = series(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![0, 0, 2, 4, 8]);
        assert!(matches!(fit_growth_rate(&s, (1.0, 5.0)), Err(Error::InsufficientData(_))));
        assert!(fit_growth_rate(&s, (0.0, 5.0)).is_err());
        assert!(empirical_constant(&s, 0.0).is_err());
    }

    #[test]
    fn gamma2_constants() {
        let g = GroupSpec::gamma2();
        let l = 2.0 * 3f64.acosh();
        let lox = theoretical_constant(&g, &ConjClassInvariants::loxodromic(l, 0.0).unwrap()).unwrap();
        assert!((lox.value - l / (2.0 * PI * 2.0 * 2f64.sqrt())).abs() < 1e-14);
        assert!((lox.value - 0.19839).abs() < 2e-5);
        assert_eq!(lox.formula, ConstantFormula::LoxodromicLattice);
        // Primitive parabolic normalized by any precisely invariant horoball.
        for h in [0.5f64, 1.0, 2.0, 5.0] {
            let mut inv = ConjClassInvariants::parabolic(2.0 * (1.0 / h).asinh()).unwrap();
            inv.cusp_volume = Some(2.0 / h);
            let c = theoretical_constant(&g, &inv).unwrap();
            assert!((c.value - 1.0 / (2.0 * PI)).abs() < 1e-14, "H = {h}");
        }
        let bare = ConjClassInvariants::parabolic(1.0).unwrap();
        assert!(theoretical_constant(&g, &bare).is_err());
        let mut free = g.clone();
        free.lattice = None;
        assert!(theoretical_constant(&free, &bare).is_err());
    }

    #[test]
    fn genus_two_surface() {
        let lat = LatticeData::surface(2, 0).unwrap();
        let l = 2.0 * 3f64.acosh();
        let c = surface_constant(&lat, &ConjClassInvariants::loxodromic(l, 0.0).unwrap()).unwrap();
        assert!((c.value - l / (4.0 * PI * (l / 2.0).sinh())).abs() < 1e-14);
        assert_eq!(c.inputs.genus, Some(2));
    }

    #[test]
    fn general_formula_reduces_in_the_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let l: f64 = rng.gen_range(0.05..12.0);
            let (g, p) = (rng.gen_range(0..4u32), rng.gen_range(0..5u32));
            let Ok(lat) = LatticeData::surface(g, p) else { continue };
            let c = surface_constant(&lat, &ConjClassInvariants::loxodromic(l, 0.0).unwrap()).unwrap();
            let surface = l / (2.0 * PI * (2 * g + p - 2) as f64 * (l / 2.0).sinh());
            assert!((c.value - surface).abs() <= 1e-12 * surface, "ℓ = {l}");
        }
    }

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn three_dimensional_constant() {
        // Vol(S^1) ℓ / (2 · 2 · Vol · (cosh ℓ - cos θ)).
        let inv = ConjClassInvariants::loxodromic(1.3, 0.4).unwrap();
        let c = lattice_constant(3, 0.9, &inv).unwrap();
        let expected = 2.0 * PI * 1.3 / (4.0 * 0.9 * (1.3f64.cosh() - 0.4f64.cos()));
        assert!((c.value - expected).abs() < 1e-14);
        assert!(lattice_constant(3, 0.9, &ConjClassInvariants::elliptic(1.0).unwrap()).is_err());
    }

    #[test]
    fn discrepancy_examples() {
        assert_eq!(discrepancy_stats(&[5; 8]).unwrap(), Discrepancy { tv: 0.0, sup_cdf: 0.0, chi2: 0.0 });
        let d = discrepancy_stats(&[40, 0, 0, 0, 0, 0, 0, 0]).unwrap();
        assert!((d.tv - 0.875).abs() < 1e-15);
        assert!((d.sup_cdf - 0.875).abs() < 1e-15);
        assert!((d.chi2 - 280.0).abs() < 1e-12);
        assert!(discrepancy_stats(&[]).is_err());
        assert!(discrepancy_stats(&[0, 0]).is_err());
    }

    #[test]
    fn histogram_of_a_uniform_grid() {
        let angles: Vec<f64> = (0..64).map(|i| (i as f64 + 0.5) * 2.0 * PI / 64.0).collect();
        let h = direction_histogram(&DirectionSample { threshold: 1.0, angles }, 16).unwrap();
        assert_eq!(h, vec![4; 16]);
        assert_eq!(discrepancy_stats(&h).unwrap().tv, 0.0);
        assert!(direction_histogram(&DirectionSample { threshold: 1.0, angles: vec![] }, 16).is_err());
    }
}
