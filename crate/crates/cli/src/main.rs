use std::path::PathBuf;
use std::process::ExitCode;

use census_core::job::{
    emit, parse_job_unchecked, run_job, summary_path, validation_error, ClassRef, Command, Format, GroupRef, JobError,
    JobSpec,
};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Count,
    Equidist,
    Growth,
    VerifyLaws,
    ChcCheck,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Count => Command::Count,
            Cmd::Equidist => Command::Equidist,
            Cmd::Growth => Command::Growth,
            Cmd::VerifyLaws => Command::VerifyLaws,
            Cmd::ChcCheck => Command::ChcCheck,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Fmt {
    Csv,
    Json,
}

/// Counts orbit points of conjugacy classes in discrete hyperbolic groups.
///
/// Exit status: 0 success, 2 bad job or arguments, 3 invariant failure,
/// 4 resource cap.
#[derive(Debug, Parser)]
#[command(name = "census", version)]
struct Cli {
    command: Cmd,
    /// Job file (TOML). Optional for verify-laws and chc-check.
    #[arg(long)]
    job: Option<PathBuf>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Word such as "A*B", or a matrix "[a, b, c, d]".
    #[arg(long)]
    class: Option<String>,
    /// Preset: gamma2, free:k or heisenberg:k.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Fmt>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    margin: Option<f64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_class(s: &str) -> Result<ClassRef, JobError> {
    let bad = || JobError::Parse { line: None, message: format!("cannot read --class {s:?}") };
    if let Some(inner) = s.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let v: Vec<i64> = inner.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let m: [i64; 4] = v.try_into().map_err(|_| bad())?;
        Ok(ClassRef::Matrix(m))
    } else {
        Ok(ClassRef::Word(s.to_string()))
    }
}

fn load(cli: &Cli) -> Result<JobSpec, JobError> {
    let command: Command = cli.command.into();
    let text = match &cli.job {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| JobError::Parse { line: None, message: format!("cannot read {}: {e}", path.display()) })?,
        None => String::new(),
    };
    let mut spec = parse_job_unchecked(&text)?;
    match spec.command {
        Some(c) if c != command => {
            return Err(validation_error(
                &text,
                "command",
                format!("job file is a `{}` job but `{}` was requested", c.name(), command.name()),
            ))
        }
        _ => spec.command = Some(command),
    }
    if let Some(t) = cli.t_max {
        spec.t_max = Some(t);
    }
    if let Some(c) = &cli.class {
        spec.class = Some(parse_class(c)?);
    }
    if let Some(g) = &cli.group {
        spec.group = Some(GroupRef::Preset(g.clone()));
    }
    if let Some(o) = &cli.out {
        spec.out = Some(o.display().to_string());
    }
    if let Some(f) = cli.format {
        spec.format = match f {
            Fmt::Csv => Format::Csv,
            Fmt::Json => Format::Json,
        };
    }
    if let Some(s) = cli.seed {
        spec.seed = s;
    }
    if let Some(m) = cli.margin {
        spec.margin = Some(m);
    }
    spec.validate().map_err(|(key, msg)| validation_error(&text, key, msg))?;
    Ok(spec)
}

fn write(spec: &JobSpec, report: &census_core::job::Report) -> Result<(), JobError> {
    let out = emit(report, spec.format)?;
    let io = |e: std::io::Error| JobError::Io(e.to_string());
    match &spec.out {
        Some(path) => {
            let path = PathBuf::from(path);
            std::fs::write(&path, &out.primary).map_err(io)?;
            if let Some(summary) = &out.summary {
                std::fs::write(summary_path(&path), summary).map_err(io)?;
            }
        }
        None => print!("{}", out.primary),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, JobError> {
    let spec = load(cli)?;
    let report = run_job(&spec)?;
    write(&spec, &report)?;
    for c in report.failed_checks() {
        eprintln!("census: check {} failed: {}", c.name, c.detail);
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("census: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("census: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
