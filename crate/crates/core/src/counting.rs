//! Conjugacy-class counting `N_{K,x0}(t) = #{α ∈ K : d(x0, α x0) ≤ t}` in
//! torsion-free matrix groups.
//!
//! A [`Census`] enumerates an exact orbit ball once and derives everything
//! from it: the direct count over conjugates `γ γ0 γ⁻¹`, the geometric count
//! over cosets of the centraliser using `d(x0, γ C) ≤ ψ(t)`, direction samples
//! and the subgroup count. Every series is recomputed on a ball one unit
//! larger than required and must not change.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::displacement::{disp_para_signed, psi_exact, psi_parabolic_signed, ClassKind, ConjClassInvariants};
use crate::error::{Error, Result};
use crate::groups::{matrix_ball_enumerate, orbit_distance, BallConfig, GroupSpec};
use crate::hyperbolic::{
    axis, dist_to_geodesic, tangent_angle, BoundaryPoint, ExactIsometry, Horoball, IsometryKind, UH2Point,
};

/// Largest power tried when extracting a primitive root.
const MAX_ROOT_POWER: u32 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub engine: String,
    pub group: String,
    pub class: String,
    pub basepoint: UH2Point,
    /// Radius of the orbit ball the counts are drawn from.
    pub radius: f64,
    /// Extra radius used for the saturation recount.
    pub margin: f64,
    pub ball_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountSeries {
    pub thresholds: Vec<f64>,
    pub counts: Vec<u64>,
    pub meta: SeriesMeta,
}

impl CountSeries {
    pub fn validate(&self) -> Result<()> {
        if self.thresholds.len() != self.counts.len() {
            return Err(Error::Constraint("thresholds and counts differ in length".into()));
        }
        if self.thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Constraint("thresholds must be strictly increasing".into()));
        }
        if self.counts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Constraint("counts must be nondecreasing".into()));
        }
        Ok(())
    }

    pub fn count_at(&self, t: f64) -> Option<u64> {
        self.thresholds.iter().position(|x| (x - t).abs() < 1e-9).map(|i| self.counts[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSample {
    pub threshold: f64,
    /// One angle in `[0, 2π)` per counted conjugate.
    pub angles: Vec<f64>,
}

/// Thresholds `step, 2 step, ...` up to `t_max` inclusive.
pub fn threshold_grid(t_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("need t_max > 0 and step > 0, got {t_max} and {step}")));
    }
    let n = (t_max / step + 1e-9).floor() as usize;
    Ok((1..=n).map(|k| k as f64 * step).collect())
}

/// The convex set attached to the class representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConvexSet {
    Axis { repelling: BoundaryPoint, attracting: BoundaryPoint },
    Horoball(Horoball),
}

impl ConvexSet {
    /// Distance from `y` to the set, signed (negative inside) for horoballs.
    pub fn signed_distance(&self, y: UH2Point) -> f64 {
        match self {
            ConvexSet::Axis { repelling, attracting } => dist_to_geodesic(y, (*repelling, *attracting)),
            ConvexSet::Horoball(h) => h.signed_distance(y),
        }
    }
}

/// Everything the engines need about the class of `rep`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSetup {
    pub label: String,
    pub rep: ExactIsometry,
    /// Primitive root: the centraliser of `rep` is generated by it.
    pub root: ExactIsometry,
    pub power: u32,
    pub invariants: ConjClassInvariants,
    pub convex: ConvexSet,
    /// Translation or horospherical length of the root.
    pub root_length: f64,
    /// Upper bound on `-d(y, C)` over orbit points `y` inside a horoball (0 for axes).
    pub orbit_depth: f64,
}

impl ClassSetup {
    /// `ψ` matching [`ConvexSet::signed_distance`]; `None` below the class minimum.
    pub fn psi(&self, t: f64) -> Option<f64> {
        match self.invariants.kind {
            ClassKind::Parabolic => (t > 0.0).then(|| psi_parabolic_signed(t, self.invariants.length)),
            _ => psi_exact(&self.invariants, t).ok(),
        }
    }

    /// Radius of the conjugator ball that provably contains a representative
    /// of every coset counted up to `t_max`:
    /// `max(ψ(t_max), depth) + |d(x0, C)| + ℓ(root) + 1`, where `depth` bounds how
    /// far orbit points can sit inside a horoball.
    pub fn enumeration_radius(&self, x0: UH2Point, t_max: f64) -> f64 {
        let psi = self.psi(t_max).unwrap_or(0.0).max(self.orbit_depth);
        psi + self.convex.signed_distance(x0).abs() + self.root_length + 1.0
    }
}

/// Height of the largest horoball at `ξ` (in the frame of [`Horoball::normalizer`])
/// disjoint from its images under the elements of `ball_radius`-ball: `1/min |c|`
/// over conjugated elements not fixing `∞`.
pub fn maximal_horoball_height(group: &GroupSpec, base: BoundaryPoint, ball_radius: f64) -> Result<f64> {
    let sigma = Horoball { base, size: 1.0 }.normalizer();
    let ball = matrix_ball_enumerate(group, ball_radius, &BallConfig::default())?;
    let min_c = ball
        .elements
        .iter()
        .map(|e| e.element.to_float().conjugate_by(&sigma).c.abs())
        .filter(|c| *c > 1e-9)
        .fold(f64::INFINITY, f64::min);
    if !min_c.is_finite() {
        return Err(Error::InsufficientData("no element moves the cusp within the search ball".into()));
    }
    Ok(1.0 / min_c)
}

/// Builds the class data for `rep`. Parabolic classes use a horoball whose
/// height in the normalised cusp frame is `horoball_height`, defaulting to the
/// maximal embedded one.
pub fn class_setup(group: &GroupSpec, label: &str, rep: &ExactIsometry, horoball_height: Option<f64>) -> Result<ClassSetup> {
    group.validate()?;
    if !group.torsion_free {
        return Err(Error::InvalidGroup("counting is implemented for torsion-free groups only".into()));
    }
    let kind = rep.classify();
    match kind {
        IsometryKind::Identity => return Err(Error::IdentityClass("the identity class is a single point".into())),
        IsometryKind::Elliptic { .. } => {
            return Err(Error::InvalidClass("elliptic elements do not occur in torsion-free groups".into()))
        }
        _ => {}
    }
    let g = rep.to_float();
    let (root, power) = primitive_root(group, rep)?;
    let (invariants, convex, root_length, orbit_depth) = match kind {
        IsometryKind::Identity | IsometryKind::Elliptic { .. } => unreachable!("rejected above"),
        IsometryKind::Loxodromic { length, .. } => {
            let (repelling, attracting) = axis(&g)?;
            let mut inv = ConjClassInvariants::loxodromic(length, 0.0)?;
            inv.power = power;
            (inv, ConvexSet::Axis { repelling, attracting }, length / power as f64, 0.0)
        }
        IsometryKind::Parabolic => {
            let base = crate::hyperbolic::parabolic_fixed_point(&g)?;
            let h_max = maximal_horoball_height(group, base, 6.0)?;
            let height = horoball_height.unwrap_or(h_max);
            let ball = Horoball::with_cusp_height(base, height)?;
            let root_translation = crate::hyperbolic::parabolic_data(&root.to_float(), ball)?.translation;
            let mut inv = ConjClassInvariants::from_isometry(&g, Some(ball), Some(root_translation))?;
            inv.power = power;
            // In the cusp frame, Im(g z) <= 1/(c² Im z) for elements moving the
            // cusp, so orbit points of x0 sit no higher than max(v0, H_max²/v0).
            let v0 = ball.normalizer().apply(group.basepoint).im;
            let v_max = v0.max(h_max * h_max / v0);
            let depth = (v_max / height).ln().max(0.0);
            let root_length = 2.0 * (root_translation / (2.0 * height)).asinh();
            (inv, ConvexSet::Horoball(ball), root_length, depth)
        }
    };
    Ok(ClassSetup { label: label.to_string(), rep: rep.clone(), root, power, invariants, convex, root_length, orbit_depth })
}

/// Primitive root of `rep` in the group: the commuting element of least
/// displacement at the basepoint with a positive power equal to `rep`.
pub fn primitive_root(group: &GroupSpec, rep: &ExactIsometry) -> Result<(ExactIsometry, u32)> {
    if rep.is_identity() {
        return Err(Error::IdentityClass("the identity has no primitive root".into()));
    }
    let x0 = group.basepoint;
    let reach = orbit_distance(x0, rep) + 1e-9;
    let ball = matrix_ball_enumerate(group, reach, &BallConfig::default())?;
    if !ball.contains(rep) {
        return Err(Error::InvalidClass(format!("{rep} is not an element of {}", group.name)));
    }
    let mut candidates: Vec<(f64, &ExactIsometry)> = ball
        .elements
        .iter()
        .filter(|e| !e.element.is_identity() && e.element.compose(rep) == rep.compose(&e.element))
        .map(|e| (e.distance, &e.element))
        .collect();
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.sort_key_cmp(b.1)));
    for (_, r) in candidates {
        let mut acc = r.clone();
        for m in 1..=MAX_ROOT_POWER {
            if &acc == rep {
                return Ok((r.clone(), m));
            }
            acc = acc.compose(r);
        }
    }
    Err(Error::InvalidClass(format!(
        "{rep} is not a power (up to {MAX_ROOT_POWER}) of any element in the group ball"
    )))
}

/// One conjugate `α = γ γ0 γ⁻¹` with the data of its best coset representative.
#[derive(Debug, Clone, PartialEq)]
struct Conjugate {
    alpha: ExactIsometry,
    /// `d(x0, α x0)`.
    displacement: f64,
    /// `d(x0, γ x0)` for the closest representative `γ`.
    rep_distance: f64,
    /// Signed `d(x0, γ C)`.
    set_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountOptions {
    pub t_max: f64,
    pub step: f64,
    /// Extra radius for the saturation recount.
    pub margin: f64,
    pub ball: BallConfig,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self { t_max: 12.0, step: 0.5, margin: 1.0, ball: BallConfig::default() }
    }
}

/// A single enumeration shared by the engines.
#[derive(Debug, Clone)]
pub struct Census {
    pub group: GroupSpec,
    pub setup: ClassSetup,
    pub options: CountOptions,
    /// Radius the counts are taken at.
    pub radius: f64,
    pub ball_size: usize,
    conjugates: Vec<Conjugate>,
}

impl Census {
    pub fn new(group: &GroupSpec, setup: ClassSetup, options: CountOptions) -> Result<Self> {
        if !(options.margin > 0.0) {
            return Err(Error::Domain("saturation margin must be positive".into()));
        }
        threshold_grid(options.t_max, options.step)?;
        let x0 = group.basepoint;
        let radius = setup.enumeration_radius(x0, options.t_max);
        let ball = matrix_ball_enumerate(group, radius + options.margin, &options.ball)?;
        let rep = &setup.rep;
        let convex = setup.convex;
        let mut conjugates: Vec<Conjugate> = ball
            .elements
            .par_iter()
            .map(|e| {
                let g = &e.element;
                let alpha = rep.conjugate_by(g);
                let y = g.inverse().apply(x0);
                Conjugate {
                    displacement: orbit_distance(x0, &alpha),
                    alpha,
                    rep_distance: e.distance,
                    set_distance: convex.signed_distance(y),
                }
            })
            .collect();
        // Stable sort on (α, representative distance) keeps the choice of
        // representative independent of scheduling.
        conjugates.par_sort_by(|a, b| {
            a.alpha
                .sort_key_cmp(&b.alpha)
                .then(a.rep_distance.partial_cmp(&b.rep_distance).unwrap_or(Ordering::Equal))
        });
        conjugates.dedup_by(|later, first| later.alpha == first.alpha);
        Ok(Self { group: group.clone(), setup, options, radius, ball_size: ball.len(), conjugates })
    }

    fn meta(&self, engine: &str) -> SeriesMeta {
        SeriesMeta {
            engine: engine.to_string(),
            group: self.group.name.clone(),
            class: self.setup.label.clone(),
            basepoint: self.group.basepoint,
            radius: self.radius,
            margin: self.options.margin,
            ball_size: self.ball_size,
        }
    }

    fn series_by(&self, radius: f64, measure: impl Fn(&Conjugate) -> f64, level: impl Fn(f64) -> Option<f64>) -> Vec<u64> {
        let mut values: Vec<f64> =
            self.conjugates.iter().filter(|c| c.rep_distance <= radius).map(&measure).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let grid = threshold_grid(self.options.t_max, self.options.step).expect("grid checked in new");
        grid.iter()
            .map(|&t| match level(t) {
                Some(v) => values.partition_point(|x| *x <= v) as u64,
                None => 0,
            })
            .collect()
    }

    fn checked(&self, engine: &str, f: impl Fn(f64) -> Vec<u64>) -> Result<CountSeries> {
        let counts = f(self.radius);
        let wider = f(self.radius + self.options.margin);
        if counts != wider {
            let at = counts.iter().zip(&wider).position(|(a, b)| a != b).unwrap_or(0);
            return Err(Error::Saturation(format!(
                "{engine} counts change when the ball grows from {:.3} to {:.3} (first at threshold index {at}); \
                 rerun with a larger margin",
                self.radius,
                self.radius + self.options.margin
            )));
        }
        let series = CountSeries {
            thresholds: threshold_grid(self.options.t_max, self.options.step)?,
            counts,
            meta: self.meta(engine),
        };
        series.validate()?;
        Ok(series)
    }

    /// Counts conjugates by their displacement at the basepoint.
    pub fn direct(&self) -> Result<CountSeries> {
        self.checked("direct", |r| self.series_by(r, |c| c.displacement, Some))
    }

    /// Counts cosets of the centraliser by `d(x0, γ C) ≤ ψ(t)`.
    pub fn geometric(&self) -> Result<CountSeries> {
        self.checked("geometric", |r| self.series_by(r, |c| c.set_distance, |t| self.setup.psi(t)))
    }

    /// Tangent directions at the basepoint towards `α x0` for the conjugates
    /// counted at `t`, in a fixed order.
    pub fn directions(&self, t: f64) -> Result<DirectionSample> {
        let x0 = self.group.basepoint;
        let angles = self
            .conjugates
            .iter()
            .filter(|c| c.rep_distance <= self.radius && c.displacement <= t && c.displacement > 0.0)
            .map(|c| tangent_angle(x0, c.alpha.apply(x0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(DirectionSample { threshold: t, angles })
    }

    /// Minimal displacements at the basepoint over the nontrivial elements of
    /// each conjugate of the cyclic subgroup generated by a primitive
    /// parabolic, through the exact law at the signed horoball distance.
    fn subgroup_minima(&self) -> Vec<(f64, &Conjugate)> {
        let length = self.setup.invariants.length;
        self.conjugates
            .iter()
            .map(|c| (disp_para_signed(c.set_distance, length).unwrap_or(f64::INFINITY), c))
            .collect()
    }
}

/// Conditions for counting conjugates of a cusp stabiliser `Γ0 = ⟨P⟩`:
/// `c_-` and `c_+` bracket `inf_{γ ≠ e} d(y, γ y)` on the horosphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub horoball: Horoball,
    pub c_minus: f64,
    pub c_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupCount {
    pub series: CountSeries,
    pub spec: SubgroupSpec,
    /// Cosets whose minimal displacement was checked against the two-sided bounds.
    pub bounds_checked: usize,
    pub bounds_violations: usize,
}

/// Counts conjugates `γ Γ0 γ⁻¹` of `Γ0 = ⟨P⟩` (P a primitive parabolic, in a
/// torsion-free group where the normaliser of `Γ0` is `Γ0`) by
/// `inf_{α ∈ γΓ0γ⁻¹ - e} d(x0, α x0) ≤ t`.
pub fn subgroup_conj_count(census: &Census) -> Result<SubgroupCount> {
    let setup = &census.setup;
    let ConvexSet::Horoball(horoball) = setup.convex else {
        return Err(Error::InvalidClass("subgroup counting needs a parabolic cyclic subgroup".into()));
    };
    if setup.power != 1 {
        return Err(Error::InvalidClass(format!(
            "{} is a proper power; the subgroup must be generated by a primitive parabolic",
            setup.label
        )));
    }
    // For a horoball precisely invariant under Γ0, every nontrivial element of
    // Γ0 moves horosphere points by at least ℓ(P), with equality for P^{±1}.
    let spec = SubgroupSpec { horoball, c_minus: setup.invariants.length, c_plus: setup.invariants.length };
    let x0 = census.group.basepoint;
    let minima = census.subgroup_minima();
    let mut checked = 0;
    let mut violations = 0;
    for (m, c) in &minima {
        if c.rep_distance > census.radius {
            continue;
        }
        // Cross-check the law against the matrices P^{±1} conjugated.
        let direct = c.displacement.min(orbit_distance(x0, &c.alpha.inverse()));
        let s = c.set_distance;
        let bad_law = (m - direct).abs() > 1e-9 * (1.0 + direct);
        if s >= 0.0 {
            checked += 1;
            let lower = 2.0 * (s.cosh() * (spec.c_minus / 2.0).sinh()).asinh();
            let upper = 2.0 * s + spec.c_plus;
            let slack = 1e-9 * (1.0 + direct);
            if direct < lower - slack || direct > upper + slack || bad_law {
                violations += 1;
            }
        } else if bad_law {
            violations += 1;
        }
    }
    let series = census.checked("subgroup", |r| {
        let mut values: Vec<f64> = minima.iter().filter(|(_, c)| c.rep_distance <= r).map(|(m, _)| *m).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        threshold_grid(census.options.t_max, census.options.step)
            .expect("grid checked in new")
            .iter()
            .map(|&t| values.partition_point(|x| *x <= t) as u64)
            .collect()
    })?;
    Ok(SubgroupCount { series, spec, bounds_checked: checked, bounds_violations: violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn census(word: &str, t_max: f64, height: Option<f64>) -> Census {
        let g = GroupSpec::gamma2();
        let rep = g.parse_word(word).unwrap();
        let setup = class_setup(&g, word, &rep, height).unwrap();
        Census::new(&g, setup, CountOptions { t_max, ..CountOptions::default() }).unwrap()
    }

    #[test]
    fn grid() {
        assert_eq!(threshold_grid(2.0, 0.5).unwrap(), vec![0.5, 1.0, 1.5, 2.0]);
        assert!(threshold_grid(2.0, 0.0).is_err());
    }

    #[test]
    fn roots() {
        let g = GroupSpec::gamma2();
        let ab = g.parse_word("AB").unwrap();
        assert_eq!(primitive_root(&g, &ab).unwrap(), (ab.clone(), 1));
        assert_eq!(primitive_root(&g, &ab.pow(3)).unwrap(), (ab, 3));
        let a = g.parse_word("A").unwrap();
        assert_eq!(primitive_root(&g, &a.pow(2)).unwrap(), (a.clone(), 2));
        assert_eq!(primitive_root(&g, &a.inverse()).unwrap(), (a.inverse(), 1));
    }

    #[test]
    fn maximal_horoball_at_infinity() {
        let h = maximal_horoball_height(&GroupSpec::gamma2(), BoundaryPoint::Infinity, 5.0).unwrap();
        assert!((h - 0.5).abs() < 1e-12);
    }

    #[test]
    fn below_minimum_is_zero() {
        let c = census("AB", 6.0, None);
        let ell = 2.0 * 3f64.acosh();
        for series in [c.direct().unwrap(), c.geometric().unwrap()] {
            for (t, n) in series.thresholds.iter().zip(&series.counts) {
                if *t < ell {
                    assert_eq!(*n, 0);
                }
            }
        }
    }

    #[test]
    fn engines_agree() {
        for word in ["AB", "A", "AB^-1", "A^2", "AAB"] {
            let c = census(word, 10.0, None);
            assert_eq!(c.direct().unwrap().counts, c.geometric().unwrap().counts, "{word}");
        }
    }

    #[test]
    fn parabolic_class_at_two() {
        let c = census("A", 2.0, None);
        // d(i, i ± 2) = argcosh 3 < 2; only A itself among its conjugates moves i that little.
        assert_eq!(c.direct().unwrap().count_at(2.0), Some(1));
    }

    #[test]
    fn horoball_normalisation_does_not_change_counts() {
        let base = census("A", 10.0, None).geometric().unwrap().counts;
        for h in [1.0, 2.0, 5.0] {
            assert_eq!(census("A", 10.0, Some(h)).geometric().unwrap().counts, base, "H = {h}");
        }
    }

    #[test]
    fn conjugate_representatives_give_the_same_counts() {
        let g = GroupSpec::gamma2();
        let ab = g.parse_word("AB").unwrap();
        let base = census("AB", 9.0, None).direct().unwrap().counts;
        for h in ["B", "A^-1*B", "BBA"] {
            let rep = ab.conjugate_by(&g.parse_word(h).unwrap());
            let setup = class_setup(&g, "conj", &rep, None).unwrap();
            let c = Census::new(&g, setup, CountOptions { t_max: 9.0, ..CountOptions::default() }).unwrap();
            assert_eq!(c.direct().unwrap().counts, base);
        }
    }

    #[test]
    fn subgroup_identity_coset_enters_at_argcosh_three() {
        let c = census("A", 4.0, Some(2.0));
        let sub = subgroup_conj_count(&c).unwrap();
        assert_eq!(sub.bounds_violations, 0);
        let m0 = 3f64.acosh();
        for (t, n) in sub.series.thresholds.iter().zip(&sub.series.counts) {
            if *t < m0 {
                assert_eq!(*n, 0);
            } else if *t < 2.0 {
                assert_eq!(*n, 1);
            }
        }
    }

    #[test]
    fn elliptic_and_identity_rejected() {
        let g = GroupSpec::gamma2();
        assert!(matches!(class_setup(&g, "e", &ExactIsometry::identity(), None), Err(Error::IdentityClass(_))));
        let s = ExactIsometry::new(0, -1, 1, 0).unwrap();
        assert!(class_setup(&g, "S", &s, None).is_err());
        // Parabolic in SL(2, Z) but not congruent to the identity mod 2.
        let t = ExactIsometry::new(1, 1, 0, 1).unwrap();
        assert!(matches!(class_setup(&g, "T", &t, None), Err(Error::InvalidClass(_))));
    }
}
