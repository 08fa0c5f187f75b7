//! Discrete subgroups of PSL(2, Z) given by generators, and exact enumeration
//! of orbit balls `{γ : d(x0, γ x0) ≤ R}`.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{dist_h2, ExactIsometry, UH2Point};

/// Lattice data of a finite-area surface group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeData {
    pub critical_exponent: f64,
    pub genus: u32,
    pub punctures: u32,
    pub covolume: f64,
}

impl LatticeData {
    /// Finite-area surface of genus `g` with `p` punctures: `δ = 1`,
    /// covolume `2π(2g + p - 2)`.
    pub fn surface(genus: u32, punctures: u32) -> Result<Self> {
        let euler = 2 * genus as i64 + punctures as i64 - 2;
        if euler <= 0 {
            return Err(Error::InvalidGroup(format!("genus {genus} with {punctures} punctures is not hyperbolic")));
        }
        Ok(Self { critical_exponent: 1.0, genus, punctures, covolume: 2.0 * std::f64::consts::PI * euler as f64 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub labels: Vec<String>,
    pub generators: Vec<ExactIsometry>,
    pub basepoint: UH2Point,
    pub lattice: Option<LatticeData>,
    pub torsion_free: bool,
}

impl GroupSpec {
    /// The level-2 congruence subgroup with Sanov generators
    /// `A = [[1,2],[0,1]]`, `B = [[1,0],[2,1]]`, based at `i`.
    pub fn gamma2() -> Self {
        Self {
            name: "gamma2".into(),
            labels: vec!["A".into(), "B".into()],
            generators: vec![ExactIsometry::Small([1, 2, 0, 1]), ExactIsometry::Small([1, 0, 2, 1])],
            basepoint: UH2Point::I,
            lattice: Some(LatticeData { critical_exponent: 1.0, genus: 0, punctures: 3, covolume: 2.0 * std::f64::consts::PI }),
            torsion_free: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.generators.is_empty() {
            return Err(Error::InvalidGroup("no generators".into()));
        }
        if self.labels.len() != self.generators.len() {
            return Err(Error::InvalidGroup("one label per generator is required".into()));
        }
        let mut seen = HashSet::new();
        for l in &self.labels {
            if l.is_empty() || !l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::InvalidGroup(format!("bad generator label {l:?}")));
            }
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidGroup(format!("duplicate generator label {l:?}")));
            }
        }
        if !self.basepoint.is_valid() {
            return Err(Error::InvalidGroup("basepoint must lie in the upper half-plane".into()));
        }
        if let Some(l) = &self.lattice {
            let expected = 2.0 * std::f64::consts::PI * (2.0 * l.genus as f64 + l.punctures as f64 - 2.0);
            if (l.covolume - expected).abs() > 1e-9 * expected.abs().max(1.0) {
                return Err(Error::InvalidGroup(format!(
                    "covolume {} disagrees with Gauss-Bonnet value {expected} for genus {} and {} punctures",
                    l.covolume, l.genus, l.punctures
                )));
            }
            if !(l.critical_exponent > 0.0) {
                return Err(Error::InvalidGroup("critical exponent must be positive".into()));
            }
        }
        Ok(())
    }

    fn generator(&self, label: &str) -> Option<&ExactIsometry> {
        self.labels.iter().position(|l| l == label).map(|i| &self.generators[i])
    }

    /// Evaluates a word such as `"A*B"`, `"A^-1 * B^2"` or `"AB"` (the last
    /// form needs single-character labels).
    pub fn parse_word(&self, text: &str) -> Result<ExactIsometry> {
        let mut acc = ExactIsometry::identity();
        let tokens: Vec<&str> = text.split(|c: char| c == '*' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
        if tokens.is_empty() {
            return Err(Error::InvalidClass(format!("empty word {text:?}")));
        }
        for token in tokens {
            for (label, exp) in self.split_token(token)? {
                let g = self.generator(&label).expect("label checked by split_token");
                acc = acc.compose(&g.pow(exp));
            }
        }
        Ok(acc)
    }

    fn split_token(&self, token: &str) -> Result<Vec<(String, i64)>> {
        let bad = || Error::InvalidClass(format!("cannot parse {token:?} as a word in {:?}", self.labels));
        let (base, exp) = match token.split_once('^') {
            Some((b, e)) => (b, e.parse::<i64>().map_err(|_| bad())?),
            None => (token, 1),
        };
        if self.generator(base).is_some() {
            return Ok(vec![(base.to_string(), exp)]);
        }
        // Concatenated single-character labels; the exponent binds to the last.
        let chars: Vec<String> = base.chars().map(|c| c.to_string()).collect();
        if chars.is_empty() || chars.iter().any(|c| self.generator(c).is_none()) {
            return Err(bad());
        }
        let n = chars.len();
        Ok(chars.into_iter().enumerate().map(|(i, c)| (c, if i + 1 == n { exp } else { 1 })).collect())
    }

    /// `d(x0, g x0)`.
    pub fn displacement(&self, g: &ExactIsometry) -> f64 {
        orbit_distance(self.basepoint, g)
    }

    /// Generators and their inverses, without repeats.
    pub fn symmetric_generators(&self) -> Vec<ExactIsometry> {
        let mut out: Vec<ExactIsometry> = Vec::new();
        for g in &self.generators {
            for h in [g.clone(), g.inverse()] {
                if !out.contains(&h) {
                    out.push(h);
                }
            }
        }
        out
    }
}

/// `d(x0, g x0)` for an integer matrix.
pub fn orbit_distance(x0: UH2Point, g: &ExactIsometry) -> f64 {
    if x0 == UH2Point::I {
        // cosh d(i, g i) = (a² + b² + c² + d²)/2, computed through sinh(d/2).
        let [a, b, c, d] = g.to_f64_entries();
        let excess = (a - d) * (a - d) + (b + c) * (b + c);
        return 2.0 * (excess.sqrt() / 2.0).asinh();
    }
    dist_h2(x0, g.apply(x0)).unwrap_or(f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallConfig {
    /// Frontier elements farther than `R + margin` are not expanded.
    pub margin: f64,
    /// Stop after this many consecutive layers add nothing within `R`.
    pub saturation_layers: usize,
    /// Abort when more than this many elements are held within `R + margin`.
    pub cap: usize,
}

impl Default for BallConfig {
    fn default() -> Self {
        Self { margin: 1.0, saturation_layers: 3, cap: 20_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallElement {
    pub element: ExactIsometry,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ball {
    pub radius: f64,
    /// Sorted by [`ExactIsometry::sort_key_cmp`].
    pub elements: Vec<BallElement>,
    /// Word-expansion layers run, including the post-hoc layer.
    pub layers: usize,
    /// Elements generated in total (inside or outside the ball).
    pub generated: usize,
    /// Times the post-hoc extra layer found something new and expansion resumed.
    pub extensions: usize,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements within a smaller radius.
    pub fn within(&self, r: f64) -> impl Iterator<Item = &BallElement> {
        self.elements.iter().filter(move |e| e.distance <= r)
    }

    pub fn contains(&self, g: &ExactIsometry) -> bool {
        self.elements.binary_search_by(|e| e.element.sort_key_cmp(g)).is_ok()
    }
}

/// Breadth-first word expansion with exact deduplication. Candidates of each
/// layer are computed in parallel and merged in frontier order, so the result
/// does not depend on the thread count.
pub fn matrix_ball_enumerate(spec: &GroupSpec, radius: f64, config: &BallConfig) -> Result<Ball> {
    spec.validate()?;
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("ball radius must be finite and >= 0, got {radius}")));
    }
    if config.saturation_layers == 0 || !(config.margin >= 0.0) {
        return Err(Error::Domain("saturation layers must be positive and margin >= 0".into()));
    }
    let steps = spec.symmetric_generators();
    let x0 = spec.basepoint;
    let prune = radius + config.margin;

    let id = ExactIsometry::identity();
    let mut seen: HashSet<ExactIsometry> = HashSet::from([id.clone()]);
    let mut inside = vec![BallElement { element: id.clone(), distance: 0.0 }];
    let mut frontier = vec![id];
    let mut idle = 0;
    let mut layers = 0;
    let mut extensions = 0;
    let mut post_check = false;

    while !frontier.is_empty() {
        layers += 1;
        let candidates: Vec<(ExactIsometry, f64)> = frontier
            .par_iter()
            .flat_map_iter(|f| {
                let seen = &seen;
                steps.iter().filter_map(move |s| {
                    let g = f.compose(s);
                    if seen.contains(&g) {
                        return None;
                    }
                    let d = orbit_distance(x0, &g);
                    // Points past the pruning radius are never expanded, so they are not remembered.
                    (d <= prune).then_some((g, d))
                })
            })
            .collect();
        let mut next = Vec::new();
        let mut added = 0;
        for (g, d) in candidates {
            if !seen.insert(g.clone()) {
                continue;
            }
            if d <= radius {
                inside.push(BallElement { element: g.clone(), distance: d });
                added += 1;
            }
            next.push(g);
        }
        if seen.len() > config.cap {
            return Err(Error::BallCap { cap: config.cap, radius });
        }
        frontier = next;
        if post_check {
            if added == 0 {
                break;
            }
            // The extra layer found new elements: resume normal expansion.
            extensions += 1;
            post_check = false;
            idle = 0;
            continue;
        }
        if added == 0 {
            idle += 1;
            if idle >= config.saturation_layers {
                post_check = true;
            }
        } else {
            idle = 0;
        }
    }
    inside.par_sort_by(|a, b| a.element.sort_key_cmp(&b.element));
    Ok(Ball { radius, elements: inside, layers, generated: seen.len(), extensions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma2_is_consistent() {
        let g = GroupSpec::gamma2();
        g.validate().unwrap();
        let mut bad = g.clone();
        bad.lattice.as_mut().unwrap().covolume = 5.0;
        assert!(bad.validate().is_err());
        assert_eq!(LatticeData::surface(0, 3).unwrap().covolume, 2.0 * std::f64::consts::PI);
        assert!(LatticeData::surface(1, 0).is_err());
    }

    #[test]
    fn words() {
        let g = GroupSpec::gamma2();
        let ab = ExactIsometry::new(5, 2, 2, 1).unwrap();
        assert_eq!(g.parse_word("A*B").unwrap(), ab);
        assert_eq!(g.parse_word("AB").unwrap(), ab);
        assert_eq!(g.parse_word("A^-1").unwrap(), ExactIsometry::new(1, -2, 0, 1).unwrap());
        assert_eq!(g.parse_word("A^2 * B^-1").unwrap(), ExactIsometry::new(1, 4, 0, 1).unwrap().compose(&ExactIsometry::new(1, 0, -2, 1).unwrap()));
        assert!(g.parse_word("C").is_err());
        assert!(g.parse_word("").is_err());
    }

    #[test]
    fn orbit_distance_at_i_matches_generic_formula() {
        let g = ExactIsometry::new(5, 2, 2, 1).unwrap();
        let fast = orbit_distance(UH2Point::I, &g);
        let slow = dist_h2(UH2Point::I, g.apply(UH2Point::I)).unwrap();
        assert!((fast - slow).abs() < 1e-12);
        assert!((fast.cosh() - 17.0).abs() < 1e-9);
    }

    #[test]
    fn radius_zero_is_the_identity() {
        let ball = matrix_ball_enumerate(&GroupSpec::gamma2(), 0.0, &BallConfig::default()).unwrap();
        assert_eq!(ball.elements.len(), 1);
        assert!(ball.elements[0].element.is_identity());
    }

    #[test]
    fn cap_aborts() {
        let config = BallConfig { cap: 100, ..BallConfig::default() };
        assert!(matches!(
            matrix_ball_enumerate(&GroupSpec::gamma2(), 8.0, &config),
            Err(Error::BallCap { cap: 100, .. })
        ));
    }

    #[test]
    fn radius_five_count_is_frozen() {
        let ball = matrix_ball_enumerate(&GroupSpec::gamma2(), 5.0, &BallConfig::default()).unwrap();
        assert_eq!(ball.len(), RADIUS_FIVE_COUNT);
        assert!(ball.elements.iter().all(|e| e.element.is_identity_mod(2)));
    }

    /// Value obtained from the independent congruence oracle in the
    /// integration tests and the word expansion, which agree.
    const RADIUS_FIVE_COUNT: usize = 73;
}
