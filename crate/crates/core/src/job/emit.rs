use std::path::{Path, PathBuf};

use super::run::{GrowthSection, Report};
use super::spec::Format;
use super::JobError;

/// Rendered outputs: the primary document and, for CSV equidistribution
/// reports, a JSON summary beside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitted {
    pub primary: String,
    pub summary: Option<String>,
}

fn csv_err(e: impl std::fmt::Display) -> JobError {
    JobError::Io(e.to_string())
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, JobError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, JobError> {
    let mut s = serde_json::to_string_pretty(v).map_err(csv_err)?;
    s.push('\n');
    Ok(s)
}

pub fn emit(report: &Report, format: Format) -> Result<Emitted, JobError> {
    if format == Format::Json {
        return Ok(Emitted { primary: json(report)?, summary: None });
    }
    if let Some(c) = &report.count {
        let rows = c.direct.thresholds.iter().enumerate().map(|(i, t)| {
            let n = c.direct.counts[i];
            vec![
                t.to_string(),
                n.to_string(),
                c.geometric.counts[i].to_string(),
                (n as f64 * (-c.growth_exponent * t / 2.0).exp()).to_string(),
            ]
        });
        let primary = table(&["threshold", "count_direct", "count_geometric", "c_hat"], rows)?;
        return Ok(Emitted { primary, summary: None });
    }
    if let Some(e) = &report.equidist {
        let rows = e.samples.iter().flat_map(|s| {
            s.bins.iter().enumerate().map(move |(i, b)| {
                vec![s.threshold.to_string(), i.to_string(), b.lo.to_string(), b.hi.to_string(), b.count.to_string()]
            })
        });
        let primary = table(&["threshold", "bin", "angle_lo", "angle_hi", "count"], rows)?;
        let summary: Vec<_> = e
            .samples
            .iter()
            .map(|s| {
                serde_json::json!({
                    "threshold": s.threshold,
                    "directions": s.directions,
                    "tv": s.stats.tv,
                    "sup_cdf": s.stats.sup_cdf,
                    "chi2": s.stats.chi2,
                })
            })
            .collect();
        let summary = json(&serde_json::json!({
            "samples": summary,
            "strictly_decreasing": e.strictly_decreasing,
        }))?;
        return Ok(Emitted { primary, summary: Some(summary) });
    }
    if let Some(g) = &report.growth {
        let primary = match g {
            GrowthSection::Free(f) => table(
                &["n", "count_bfs", "count_closed", "count_literal"],
                f.n.iter().map(|&n| {
                    vec![n.to_string(), f.bfs[n].to_string(), f.closed_form[n].to_string(), f.literal_formula[n].to_string()]
                }),
            )?,
            GrowthSection::Heisenberg(h) => table(
                &["n", "count", "count_over_n2"],
                h.n.iter().map(|&n| {
                    let ratio = if n == 0 { String::new() } else { h.quadratic_ratio[n - 1].to_string() };
                    vec![n.to_string(), h.counts[n].to_string(), ratio]
                }),
            )?,
        };
        return Ok(Emitted { primary, summary: None });
    }
    if let Some(l) = &report.laws {
        let rows = l
            .laws
            .iter()
            .map(|c| vec![c.law.to_string(), c.samples.to_string(), c.max_rel_error.to_string(), String::new()])
            .chain(l.bounds.iter().map(|b| {
                vec![b.law.to_string(), b.samples.to_string(), String::new(), b.violations.to_string()]
            }));
        return Ok(Emitted { primary: table(&["law", "samples", "max_rel_error", "violations"], rows)?, summary: None });
    }
    if let Some(c) = &report.chc {
        let rows = std::iter::once(vec!["vertical".into(), String::new(), c.vertical_spread.to_string()])
            .chain(c.nonvertical.iter().map(|p| vec!["nonvertical".into(), p.scale.to_string(), p.displacement.to_string()]))
            .chain(c.rotational.iter().map(|p| vec!["rotational".into(), p.scale.to_string(), p.displacement.to_string()]));
        return Ok(Emitted { primary: table(&["case", "scale", "value"], rows)?, summary: None });
    }
    Ok(Emitted { primary: json(report)?, summary: None })
}

/// `out.csv` -> `out.summary.json`.
pub fn summary_path(path: &Path) -> PathBuf {
    path.with_extension("summary.json")
}
