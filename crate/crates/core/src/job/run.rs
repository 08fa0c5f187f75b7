use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::spec::{build_inline_group, ClassRef, Command, GroupRef, JobSpec, AUTO_MARGIN};
use super::JobError;
use crate::analysis::{
    direction_histogram, discrepancy_stats, empirical_constant, fit_growth_rate, fit_log_linear, theoretical_constant,
    Discrepancy, EmpiricalConstant, GrowthFit, TheoreticalConstant,
};
use crate::chc::{displacement_on_horosphere, CHPoint, HeisTranslation, ParabolicMap};
use crate::counting::{class_setup, subgroup_conj_count, Census, CountOptions, CountSeries, SubgroupCount};
use crate::displacement::oracle::{verify_laws, LawReport, BOUNDS_SLACK};
use crate::displacement::{ClassKind, ConjClassInvariants};
use crate::error::Error;
use crate::groups::{
    cyclic_data, free_conj_count_bfs, free_conj_count_closed, free_conj_count_literal, BallConfig, FreeClassSpec,
    GroupPreset, GroupSpec, HeisenbergElt, HeisenbergSpec, Word,
};
use crate::hyperbolic::ExactIsometry;

/// Largest relative error accepted from the displacement-law oracle.
pub const LAW_TOLERANCE: f64 = 1e-9;
/// Largest displacement spread accepted for a vertical translation.
pub const VERTICAL_SPREAD_TOLERANCE: f64 = 1e-10;
/// Band reported for empirical against theoretical constants at desk scale.
pub const CONSTANT_BAND: f64 = 0.35;
/// Default number of randomized checks per law.
pub const DEFAULT_LAW_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub law_tolerance: f64,
    pub bounds_slack: f64,
    pub vertical_spread_tolerance: f64,
    pub constant_band: f64,
    pub margin: f64,
    pub margin_auto: bool,
    pub ball: BallConfig,
    pub saturation: &'static str,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountSection {
    pub kind: ClassKind,
    pub invariants: ConjClassInvariants,
    pub root_power: u32,
    pub enumeration_radius: f64,
    pub ball_size: usize,
    pub direct: CountSeries,
    pub geometric: CountSeries,
    pub engines_agree: bool,
    pub growth_exponent: f64,
    pub fit: Option<GrowthFit>,
    pub empirical: Option<EmpiricalConstant>,
    pub theoretical: Option<TheoreticalConstant>,
    /// `|tail mean / theoretical - 1|`.
    pub constant_deviation: Option<f64>,
    pub subgroup: Option<SubgroupCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquidistSample {
    pub threshold: f64,
    pub directions: usize,
    pub bins: Vec<DirectionBin>,
    pub stats: Discrepancy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquidistSection {
    pub kind: ClassKind,
    pub samples: Vec<EquidistSample>,
    /// All three statistics strictly decrease from each sample to the next.
    pub strictly_decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeGrowth {
    pub rank: usize,
    pub class: FreeClassSpec,
    pub n: Vec<usize>,
    pub bfs: Vec<u64>,
    pub closed_form: Vec<u64>,
    pub literal_formula: Vec<u64>,
    pub closed_form_matches: bool,
    /// Word lengths where the literal formula differs from the enumeration.
    pub literal_mismatches: Vec<usize>,
    pub fit: Option<GrowthFit>,
    pub expected_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeisenbergGrowth {
    pub rank: usize,
    pub element: HeisenbergElt,
    pub n: Vec<usize>,
    pub counts: Vec<u64>,
    /// `N(n) / n²` for `n ≥ 1`.
    pub quadratic_ratio: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GrowthSection {
    Free(FreeGrowth),
    Heisenberg(HeisenbergGrowth),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleProbe {
    pub scale: f64,
    pub displacement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChcSection {
    pub horosphere: f64,
    pub vertical_points: usize,
    pub vertical_min: f64,
    pub vertical_max: f64,
    pub vertical_spread: f64,
    pub nonvertical: Vec<ScaleProbe>,
    pub rotational: Vec<ScaleProbe>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: Command,
    pub job: JobSpec,
    pub environment: Environment,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<CountSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equidist: Option<EquidistSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub laws: Option<LawReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chc: Option<ChcSection>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn invalid(message: impl Into<String>) -> JobError {
    JobError::Parse { line: None, message: message.into() }
}

fn resolve_group(spec: &JobSpec) -> Result<GroupPreset, JobError> {
    let preset = match spec.group.as_ref().ok_or_else(|| invalid("missing group"))? {
        GroupRef::Preset(name) => GroupPreset::parse(name)?,
        GroupRef::Inline(g) => GroupPreset::Matrix(build_inline_group(g, spec.basepoint())?),
    };
    Ok(match preset {
        GroupPreset::Matrix(mut g) => {
            g.basepoint = spec.basepoint();
            GroupPreset::Matrix(g)
        }
        other => other,
    })
}

fn matrix_group(spec: &JobSpec) -> Result<GroupSpec, JobError> {
    match resolve_group(spec)? {
        GroupPreset::Matrix(g) => Ok(g),
        _ => Err(invalid(format!("`{}` needs a matrix group such as gamma2", spec.command().name()))),
    }
}

fn matrix_class(group: &GroupSpec, class: &ClassRef) -> Result<ExactIsometry, JobError> {
    Ok(match class {
        ClassRef::Word(w) => group.parse_word(w)?,
        ClassRef::Matrix(m) => ExactIsometry::new(m[0], m[1], m[2], m[3])?,
    })
}

fn environment(spec: &JobSpec) -> Environment {
    Environment {
        law_tolerance: LAW_TOLERANCE,
        bounds_slack: BOUNDS_SLACK,
        vertical_spread_tolerance: VERTICAL_SPREAD_TOLERANCE,
        constant_band: CONSTANT_BAND,
        margin: spec.margin.unwrap_or(AUTO_MARGIN),
        margin_auto: spec.margin.is_none(),
        ball: spec.ball_config(),
        saturation: "not-applicable",
        seed: spec.seed,
    }
}

/// Runs a validated job. Invariant failures are reported as failed checks;
/// errors are reserved for bad input, engine failures and resource caps.
pub fn run_job(spec: &JobSpec) -> Result<Report, JobError> {
    spec.validate().map_err(|(_, m)| invalid(m))?;
    let mut report = Report {
        command: spec.command(),
        job: spec.clone(),
        environment: environment(spec),
        count: None,
        equidist: None,
        growth: None,
        laws: None,
        chc: None,
        checks: Vec::new(),
    };
    match spec.command() {
        Command::Count => run_count(spec, &mut report)?,
        Command::Equidist => run_equidist(spec, &mut report)?,
        Command::Growth => run_growth(spec, &mut report)?,
        Command::VerifyLaws => run_laws(spec, &mut report)?,
        Command::ChcCheck => run_chc(spec, &mut report)?,
    }
    Ok(report)
}

fn census(spec: &JobSpec, t_max: f64) -> Result<(GroupSpec, Census), JobError> {
    let group = matrix_group(spec)?;
    let class = spec.class.as_ref().ok_or_else(|| invalid("missing class"))?;
    let rep = matrix_class(&group, class)?;
    let setup = class_setup(&group, &class.label(), &rep, spec.horoball_height)?;
    let options = CountOptions { t_max, step: spec.step, margin: spec.margin_value(), ball: spec.ball_config() };
    let census = Census::new(&group, setup, options)?;
    Ok((group, census))
}

fn run_count(spec: &JobSpec, report: &mut Report) -> Result<(), JobError> {
    let t_max = spec.t_max.expect("validated");
    let (group, census) = census(spec, t_max)?;
    let direct = census.direct()?;
    let geometric = census.geometric()?;
    report.environment.saturation = "passed";
    let agree = direct.counts == geometric.counts;
    report.checks.push(Check::new(
        "engines-agree",
        agree,
        match direct.counts.iter().zip(&geometric.counts).position(|(a, b)| a != b) {
            None => format!("{} thresholds identical", direct.counts.len()),
            Some(i) => format!(
                "first difference at t = {}: direct {} vs geometric {}",
                direct.thresholds[i], direct.counts[i], geometric.counts[i]
            ),
        },
    ));
    let delta = group.lattice.map_or(1.0, |l| l.critical_exponent);
    let window = ((t_max - 6.0).max(spec.step), t_max);
    let fit = fit_growth_rate(&direct, window).ok();
    let empirical = empirical_constant(&direct, delta).ok();
    let theoretical = match theoretical_constant(&group, &census.setup.invariants) {
        Ok(c) => Some(c),
        Err(Error::InvalidGroup(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let constant_deviation = match (&empirical, &theoretical) {
        (Some(e), Some(t)) => Some((e.tail_mean / t.value - 1.0).abs()),
        _ => None,
    };
    let subgroup = if spec.subgroup {
        let s = subgroup_conj_count(&census)?;
        report.checks.push(Check::new(
            "subgroup-bounds",
            s.bounds_violations == 0,
            format!("{} of {} minimal displacements outside the bounds", s.bounds_violations, s.bounds_checked),
        ));
        Some(s)
    } else {
        None
    };
    report.count = Some(CountSection {
        kind: census.setup.invariants.kind,
        invariants: census.setup.invariants,
        root_power: census.setup.power,
        enumeration_radius: census.radius,
        ball_size: census.ball_size,
        direct,
        geometric,
        engines_agree: agree,
        growth_exponent: delta,
        fit,
        empirical,
        theoretical,
        constant_deviation,
        subgroup,
    });
    Ok(())
}

fn run_equidist(spec: &JobSpec, report: &mut Report) -> Result<(), JobError> {
    let t_max = spec.t_max.expect("validated");
    let mut at = spec.sample_at.clone().unwrap_or_else(|| {
        let lo = t_max - 6.0;
        if lo > 0.0 { vec![lo, t_max] } else { vec![t_max] }
    });
    at.sort_by(|a, b| a.total_cmp(b));
    at.dedup();
    let top = *at.last().expect("nonempty");
    let (_, census) = census(spec, top)?;
    report.environment.saturation = "passed";
    // The counts behind the directions must survive the saturation recount.
    census.direct()?;
    let width = 2.0 * std::f64::consts::PI / spec.bins as f64;
    let mut samples = Vec::new();
    for &t in &at {
        let dirs = census.directions(t)?;
        let hist = direction_histogram(&dirs, spec.bins)?;
        let stats = discrepancy_stats(&hist)?;
        let bins = hist
            .iter()
            .enumerate()
            .map(|(i, &count)| DirectionBin { lo: i as f64 * width, hi: (i + 1) as f64 * width, count })
            .collect();
        samples.push(EquidistSample { threshold: t, directions: dirs.angles.len(), bins, stats });
    }
    let strictly_decreasing = samples.windows(2).all(|w| {
        let (a, b) = (w[0].stats, w[1].stats);
        b.tv < a.tv && b.sup_cdf < a.sup_cdf && b.chi2 < a.chi2
    });
    report.equidist = Some(EquidistSection { kind: census.setup.invariants.kind, samples, strictly_decreasing });
    Ok(())
}

fn heisenberg_word(h: &HeisenbergSpec, word: &Word) -> Result<HeisenbergElt, JobError> {
    let mut acc = h.identity();
    for &l in &word.0 {
        let i = l.unsigned_abs() as usize - 1;
        let g = h
            .generators
            .get(i)
            .ok_or_else(|| invalid(format!("letter {l} exceeds the {} generators", h.generators.len())))?;
        let g = if l > 0 { g.clone() } else { h.invert(g)? };
        acc = h.multiply(&acc, &g)?;
    }
    Ok(acc)
}

fn run_growth(spec: &JobSpec, report: &mut Report) -> Result<(), JobError> {
    let n_max = spec.n_max.expect("validated");
    let word = match spec.class.as_ref().expect("validated") {
        ClassRef::Word(w) => Word::parse(w)?,
        ClassRef::Matrix(_) => return Err(invalid("growth jobs take a word class")),
    };
    let ns: Vec<usize> = (0..=n_max).collect();
    match resolve_group(spec)? {
        GroupPreset::Free { rank } => {
            let class = cyclic_data(&word)?;
            let mut bfs = Vec::new();
            let mut closed = Vec::new();
            let mut literal = Vec::new();
            for &n in &ns {
                bfs.push(free_conj_count_bfs(rank, &class, n)?);
                closed.push(free_conj_count_closed(rank, &class, n)?);
                literal.push(free_conj_count_literal(rank, &class, n)?);
            }
            let matches = bfs == closed;
            report.checks.push(Check::new(
                "closed-form-exact",
                matches,
                format!("closed form {} the enumeration for n ≤ {n_max}", if matches { "equals" } else { "differs from" }),
            ));
            let literal_mismatches: Vec<usize> = ns.iter().copied().filter(|&n| literal[n] != bfs[n]).collect();
            let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
            let fit = fit_log_linear(&xs, &bfs, ((n_max.saturating_sub(6)) as f64, n_max as f64)).ok();
            report.growth = Some(GrowthSection::Free(FreeGrowth {
                rank,
                expected_slope: ((2 * rank - 1) as f64).ln() / 2.0,
                class,
                n: ns,
                bfs,
                closed_form: closed,
                literal_formula: literal,
                closed_form_matches: matches,
                literal_mismatches,
                fit,
            }));
        }
        GroupPreset::Heisenberg(h) => {
            let element = heisenberg_word(&h, &word)?;
            let counts = h.conj_count_series(&element, n_max)?;
            let quadratic_ratio = ns.iter().skip(1).map(|&n| counts[n] as f64 / (n * n) as f64).collect();
            report.growth = Some(GrowthSection::Heisenberg(HeisenbergGrowth {
                rank: h.rank,
                element,
                n: ns,
                counts,
                quadratic_ratio,
            }));
        }
        GroupPreset::Matrix(_) => return Err(invalid("growth jobs need a free:k or heisenberg:k group")),
    }
    Ok(())
}

fn run_laws(spec: &JobSpec, report: &mut Report) -> Result<(), JobError> {
    let samples = spec.samples.unwrap_or(DEFAULT_LAW_SAMPLES);
    let laws = verify_laws(samples, samples, spec.seed)?;
    report.checks.push(Check::new(
        "law-relative-error",
        laws.max_rel_error() <= LAW_TOLERANCE,
        format!("max relative error {:e} over {samples} samples per law", laws.max_rel_error()),
    ));
    report.checks.push(Check::new(
        "bounds-violations",
        laws.violations() == 0,
        format!("{} violations", laws.violations()),
    ));
    report.laws = Some(laws);
    Ok(())
}

fn c(re: f64, im: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(re, im)
}

fn run_chc(spec: &JobSpec, report: &mut Report) -> Result<(), JobError> {
    const S: f64 = 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let points: Vec<CHPoint> = (0..100)
        .map(|_| {
            let w = c(rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
            CHPoint::on_horosphere(S, vec![w], rng.gen_range(-100.0..100.0))
        })
        .collect::<crate::Result<_>>()?;
    let vertical = HeisTranslation::vertical(2, 2.0 * rng.gen_range(0.1..3.0)).as_parabolic();
    let v = displacement_on_horosphere(&vertical, S, &points)?;
    report.checks.push(Check::new(
        "vertical-uniform",
        v.spread() <= VERTICAL_SPREAD_TOLERANCE,
        format!("spread {:e} over {} points", v.spread(), points.len()),
    ));
    let probe = |map: &ParabolicMap| -> Result<Vec<ScaleProbe>, JobError> {
        [1.0, 10.0, 100.0]
            .iter()
            .map(|&scale| {
                let p = CHPoint::on_horosphere(S, vec![c(scale, 0.0)], 0.0)?;
                let d = displacement_on_horosphere(map, S, &[p])?.values[0];
                Ok(ScaleProbe { scale, displacement: d })
            })
            .collect()
    };
    let increasing = |p: &[ScaleProbe]| p.windows(2).all(|w| w[0].displacement < w[1].displacement);
    let nonvertical = probe(&HeisTranslation::with_height(vec![c(0.0, 1.0)], 0.5).as_parabolic())?;
    let rotational = probe(&ParabolicMap::rotational(vec![vec![c(0.0, 1.0)]], vec![c(1.0, 0.0)], 1.0)?)?;
    report.checks.push(Check::new("nonvertical-grows", increasing(&nonvertical), "|w| = 1, 10, 100".into()));
    report.checks.push(Check::new("rotational-grows", increasing(&rotational), "|w| = 1, 10, 100".into()));
    report.chc = Some(ChcSection {
        horosphere: S,
        vertical_points: points.len(),
        vertical_min: v.min,
        vertical_max: v.max,
        vertical_spread: v.spread(),
        nonvertical,
        rotational,
    });
    Ok(())
}
