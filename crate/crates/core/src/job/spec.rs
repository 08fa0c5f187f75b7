use serde::{Deserialize, Serialize};

use super::JobError;
use crate::groups::{BallConfig, GroupSpec, LatticeData};
use crate::hyperbolic::{ExactIsometry, UH2Point};

/// Largest `t_max` accepted without `allow_large_t`.
pub const T_MAX_CAP: f64 = 24.0;
/// Largest word length accepted by growth jobs.
pub const N_MAX_CAP: usize = 64;
/// Saturation margin used when the job leaves it on auto.
pub const AUTO_MARGIN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Count,
    Equidist,
    Growth,
    VerifyLaws,
    ChcCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Count => "count",
            Command::Equidist => "equidist",
            Command::Growth => "growth",
            Command::VerifyLaws => "verify-laws",
            Command::ChcCheck => "chc-check",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Command::Count, Command::Equidist, Command::Growth, Command::VerifyLaws, Command::ChcCheck]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// A generator set given in the job file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineGroup {
    #[serde(default = "inline_name")]
    pub name: String,
    pub labels: Vec<String>,
    /// Rows `[a, b, c, d]` of integer matrices in SL(2, Z).
    pub generators: Vec<[i64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub punctures: Option<u32>,
    #[serde(default)]
    pub torsion_free: bool,
}

fn inline_name() -> String {
    "inline".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Preset(String),
    Inline(InlineGroup),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassRef {
    Word(String),
    Matrix([i64; 4]),
}

impl ClassRef {
    pub fn label(&self) -> String {
        match self {
            ClassRef::Word(w) => w.clone(),
            ClassRef::Matrix(m) => format!("[{}, {}, {}, {}]", m[0], m[1], m[2], m[3]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassRef>,
    #[serde(default = "default_basepoint")]
    pub basepoint: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_bins")]
    pub bins: usize,
    /// Saturation margin; absent means auto.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Randomized checks per law for verify-laws.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Thresholds at which equidist samples directions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_at: Option<Vec<f64>>,
    /// Height of the normalizing horoball for parabolic classes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horoball_height: Option<f64>,
    /// Also count conjugates of the cyclic subgroup (parabolic classes).
    #[serde(default)]
    pub subgroup: bool,
    #[serde(default)]
    pub allow_large_t: bool,
    /// Cap on stored ball elements; exceeding it is a resource failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ball: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default)]
    pub format: Format,
    // Tables come last so the rendered TOML stays valid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupRef>,
}

fn default_basepoint() -> [f64; 2] {
    [0.0, 1.0]
}

fn default_step() -> f64 {
    0.5
}

fn default_bins() -> usize {
    16
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        Self {
            command: Some(command),
            group: None,
            class: None,
            basepoint: default_basepoint(),
            t_max: None,
            n_max: None,
            step: default_step(),
            bins: default_bins(),
            margin: None,
            seed: 0,
            samples: None,
            sample_at: None,
            horoball_height: None,
            subgroup: false,
            allow_large_t: false,
            max_ball: None,
            out: None,
            format: Format::default(),
        }
    }

    pub fn margin_value(&self) -> f64 {
        self.margin.unwrap_or(AUTO_MARGIN)
    }

    pub fn ball_config(&self) -> BallConfig {
        let mut b = BallConfig::default();
        if let Some(cap) = self.max_ball {
            b.cap = cap;
        }
        b
    }

    pub fn command(&self) -> Command {
        self.command.expect("validated job has a command")
    }

    pub fn basepoint(&self) -> UH2Point {
        UH2Point { re: self.basepoint[0], im: self.basepoint[1] }
    }

    /// Checks the fields each command needs. Errors name the offending key.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        let command = self.command.ok_or(("command", "missing required field `command`".to_string()))?;
        let positive = |key: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err((key, format!("`{key}` must be positive and finite, got {v}")))
            }
        };
        positive("step", self.step)?;
        if self.max_ball == Some(0) {
            return Err(("max_ball", "`max_ball` must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(("bins", "`bins` must be at least 1".into()));
        }
        if let Some(m) = self.margin {
            positive("margin", m)?;
        }
        if let Some(h) = self.horoball_height {
            positive("horoball_height", h)?;
        }
        if self.seed > i64::MAX as u64 {
            return Err(("seed", format!("seed must fit in a signed 64-bit integer, got {}", self.seed)));
        }
        if UH2Point::new(self.basepoint[0], self.basepoint[1]).is_err() {
            return Err(("basepoint", format!("basepoint {:?} is not in the upper half-plane", self.basepoint)));
        }
        let needs = |key: &'static str, present: bool| {
            if present {
                Ok(())
            } else {
                Err((key, format!("`{}` jobs need `{key}`", command.name())))
            }
        };
        match command {
            Command::Count | Command::Equidist => {
                needs("group", self.group.is_some())?;
                needs("class", self.class.is_some())?;
                needs("t_max", self.t_max.is_some())?;
                let t = self.t_max.unwrap();
                positive("t_max", t)?;
                if t > T_MAX_CAP && !self.allow_large_t {
                    return Err((
                        "t_max",
                        format!("t_max = {t} exceeds the safety cap {T_MAX_CAP}; set allow_large_t = true to override"),
                    ));
                }
                if t < self.step {
                    return Err(("t_max", format!("t_max = {t} is below one step ({})", self.step)));
                }
                if let Some(at) = &self.sample_at {
                    if at.is_empty() || at.iter().any(|s| !(*s > 0.0 && *s <= t)) {
                        return Err(("sample_at", format!("sample_at must be nonempty values in (0, t_max], got {at:?}")));
                    }
                }
            }
            Command::Growth => {
                needs("group", self.group.is_some())?;
                needs("class", self.class.is_some())?;
                needs("n_max", self.n_max.is_some())?;
                let n = self.n_max.unwrap();
                if n == 0 || n > N_MAX_CAP {
                    return Err(("n_max", format!("n_max must be in 1..={N_MAX_CAP}, got {n}")));
                }
            }
            Command::VerifyLaws => {
                if self.samples == Some(0) {
                    return Err(("samples", "`samples` must be at least 1".into()));
                }
            }
            Command::ChcCheck => {}
        }
        Ok(())
    }

    /// Canonical TOML text of the job.
    pub fn render(&self) -> String {
        toml::to_string(self).expect("job specs always serialize")
    }
}

/// 1-based line of the first assignment to `key` at the start of a line.
pub(crate) fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
            || (key == "group" && l.starts_with("[group]"))
    })
    .map(|i| i + 1)
}

/// Parses a job without checking per-command requirements.
pub fn parse_job_unchecked(text: &str) -> std::result::Result<JobSpec, JobError> {
    toml::from_str::<JobSpec>(text).map_err(|e| JobError::Parse {
        line: e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1),
        message: e.message().to_string(),
    })
}

/// Maps a validation failure to a parse error pointing at the key, or at the
/// `command` line when the key is missing.
pub fn validation_error(text: &str, key: &str, message: String) -> JobError {
    JobError::Parse { line: key_line(text, key).or_else(|| key_line(text, "command")), message }
}

pub fn parse_job(text: &str) -> std::result::Result<JobSpec, JobError> {
    let spec = parse_job_unchecked(text)?;
    spec.validate().map_err(|(key, msg)| validation_error(text, key, msg))?;
    Ok(spec)
}

pub(crate) fn build_inline_group(g: &InlineGroup, basepoint: UH2Point) -> crate::Result<GroupSpec> {
    let generators = g
        .generators
        .iter()
        .map(|m| ExactIsometry::new(m[0], m[1], m[2], m[3]))
        .collect::<crate::Result<Vec<_>>>()?;
    let lattice = match (g.genus, g.punctures) {
        (Some(genus), Some(p)) => Some(LatticeData::surface(genus, p)?),
        (None, None) => None,
        _ => {
            return Err(crate::Error::InvalidGroup("lattice data needs both genus and punctures".into()));
        }
    };
    let spec = GroupSpec {
        name: g.name.clone(),
        labels: g.labels.clone(),
        generators,
        basepoint,
        lattice,
        torsion_free: g.torsion_free,
    };
    spec.validate()?;
    Ok(spec)
}
