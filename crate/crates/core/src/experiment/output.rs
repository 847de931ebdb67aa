use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{ExperimentError, ExperimentId, ExperimentPlan, ResultRow, REFERENCE_KEY};
use crate::report::names;

pub const RESULTS_HEADER: [&str; 11] = [
    "experiment",
    "instance",
    "stage_or_alpha",
    "solver",
    "seed",
    "feasible",
    "makespan_s",
    "utilization",
    "runtime_ms",
    "energy",
    "tag",
];

const ABSENT: &str = "NA";

fn cell(value: Option<f64>) -> String {
    value.map_or_else(|| ABSENT.to_string(), |v| v.to_string())
}

pub fn write_results<W: Write>(rows: &[ResultRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.instance.clone(),
            r.stage_or_alpha.clone(),
            r.solver.clone(),
            r.seed.to_string(),
            r.feasible.to_string(),
            cell(r.makespan_s),
            cell(r.utilization),
            r.runtime_ms.to_string(),
            cell(r.energy),
            r.tag.clone().unwrap_or_else(|| "-".to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Aggregate over the runs of one solver on one instance and setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub instance: String,
    pub stage_or_alpha: String,
    pub solver: String,
    pub runs: usize,
    pub feasible_runs: usize,
    pub mean_makespan: Option<f64>,
    pub min_makespan: Option<f64>,
    pub max_makespan: Option<f64>,
    pub mean_runtime_ms: f64,
}

impl SummaryRow {
    pub fn feasibility(&self) -> f64 {
        self.feasible_runs as f64 / self.runs as f64
    }
}

/// Groups rows by (experiment, instance, setting, solver), keeping the order
/// in which groups first appear.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: Vec<(&ResultRow, Vec<&ResultRow>)> = Vec::new();
    for r in rows {
        let same = |g: &ResultRow| {
            g.experiment == r.experiment
                && g.instance == r.instance
                && g.stage_or_alpha == r.stage_or_alpha
                && g.solver == r.solver
        };
        match groups.iter_mut().find(|(g, _)| same(g)) {
            Some((_, members)) => members.push(r),
            None => groups.push((r, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|(first, members)| {
            let spans: Vec<f64> = members.iter().filter_map(|r| r.makespan_s).collect();
            let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            let runtimes: Vec<f64> = members.iter().map(|r| r.runtime_ms).collect();
            SummaryRow {
                experiment: first.experiment.clone(),
                instance: first.instance.clone(),
                stage_or_alpha: first.stage_or_alpha.clone(),
                solver: first.solver.clone(),
                runs: members.len(),
                feasible_runs: members.iter().filter(|r| r.feasible).count(),
                mean_makespan: mean(&spans),
                min_makespan: spans.iter().copied().reduce(f64::min),
                max_makespan: spans.iter().copied().reduce(f64::max),
                mean_runtime_ms: mean(&runtimes).unwrap_or(0.0),
            }
        })
        .collect()
}

fn write_summary<W: Write>(summary: &[SummaryRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "experiment",
        "instance",
        "stage_or_alpha",
        "solver",
        "runs",
        "feasible_runs",
        "feasibility",
        "mean_makespan_s",
        "min_makespan_s",
        "max_makespan_s",
        "mean_runtime_ms",
    ])?;
    for s in summary {
        w.write_record([
            s.experiment.clone(),
            s.instance.clone(),
            s.stage_or_alpha.clone(),
            s.solver.clone(),
            s.runs.to_string(),
            s.feasible_runs.to_string(),
            s.feasibility().to_string(),
            cell(s.mean_makespan),
            cell(s.min_makespan),
            cell(s.max_makespan),
            s.mean_runtime_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Error, PartialEq)]
#[error("rows differ in {field}: `{row}` vs `{baseline}`")]
pub struct GapError {
    pub field: &'static str,
    pub row: String,
    pub baseline: String,
}

/// Relative makespan excess over the baseline, or `None` unless both rows
/// are feasible. Both rows must belong to the same experiment, instance and
/// setting.
pub fn makespan_gap(row: &ResultRow, baseline: &ResultRow) -> Result<Option<f64>, GapError> {
    for (field, a, b) in [
        ("experiment", &row.experiment, &baseline.experiment),
        ("instance", &row.instance, &baseline.instance),
        ("stage_or_alpha", &row.stage_or_alpha, &baseline.stage_or_alpha),
    ] {
        if a != b {
            return Err(GapError {
                field,
                row: a.clone(),
                baseline: b.clone(),
            });
        }
    }
    Ok(match (row.makespan_s, baseline.makespan_s) {
        (Some(m), Some(b)) if row.feasible && baseline.feasible => Some((m - b) / b),
        _ => None,
    })
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.into_iter().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Plot series: `(file name, header, lines)`.
type Series = (&'static str, String, Vec<String>);

fn stage_series(plan: &ExperimentPlan, summary: &[SummaryRow]) -> Vec<Series> {
    let mut feas = Vec::new();
    let mut span = Vec::new();
    for (k, setting) in plan.settings.iter().enumerate() {
        for s in summary.iter().filter(|s| s.stage_or_alpha == setting.key) {
            feas.push(format!("{k} {} {} {}", setting.key, s.solver, s.feasibility()));
            span.push(format!("{k} {} {} {}", setting.key, s.solver, cell(s.mean_makespan)));
        }
    }
    vec![
        (
            "feasibility_vs_stage.dat",
            "# stage_index stage solver feasibility".into(),
            feas,
        ),
        (
            "makespan_vs_stage.dat",
            "# stage_index stage solver mean_makespan_s".into(),
            span,
        ),
    ]
}

/// Best feasible makespan over all rows of an instance, as a baseline row
/// re-keyed to `like`.
fn best_feasible(rows: &[ResultRow], like: &ResultRow) -> Option<ResultRow> {
    rows.iter()
        .filter(|r| r.instance == like.instance && r.feasible)
        .min_by(|a, b| a.makespan_s.unwrap().total_cmp(&b.makespan_s.unwrap()))
        .map(|best| ResultRow {
            stage_or_alpha: like.stage_or_alpha.clone(),
            ..best.clone()
        })
}

fn alpha_series(plan: &ExperimentPlan, rows: &[ResultRow]) -> Vec<Series> {
    let mut feas = Vec::new();
    let mut gap = Vec::new();
    for setting in plan.settings.iter().filter(|s| s.key != REFERENCE_KEY) {
        let at: Vec<&ResultRow> = rows
            .iter()
            .filter(|r| r.stage_or_alpha == setting.key && r.solver == names::QUBO_SA)
            .collect();
        if at.is_empty() {
            continue;
        }
        let fraction = at.iter().filter(|r| r.feasible).count() as f64 / at.len() as f64;
        feas.push(format!("{} {fraction}", setting.key));
        let gaps = at.iter().filter_map(|r| {
            let base = best_feasible(rows, r)?;
            makespan_gap(r, &base).expect("baseline re-keyed to the row")
        });
        gap.push(format!("{} {}", setting.key, cell(mean(gaps))));
    }
    vec![
        ("feasibility_vs_alpha.dat", "# alpha qubo_sa_feasibility".into(), feas),
        (
            "makespan_gap_vs_alpha.dat",
            "# alpha mean_gap_to_best_feasible".into(),
            gap,
        ),
    ]
}

fn scale_series(plan: &ExperimentPlan, rows: &[ResultRow]) -> Vec<Series> {
    let size_of: BTreeMap<&str, usize> = plan.instances.iter().map(|i| (i.name(), i.n_tasks())).collect();
    let mut by_scale: BTreeMap<(usize, usize), (String, Vec<&ResultRow>)> = BTreeMap::new();
    let solver_rank = |name: &str| {
        plan.solvers
            .iter()
            .position(|e| e.solver.name() == name)
            .unwrap_or(usize::MAX)
    };
    for r in rows {
        let key = (size_of[r.instance.as_str()], solver_rank(&r.solver));
        by_scale
            .entry(key)
            .or_insert_with(|| (r.solver.clone(), Vec::new()))
            .1
            .push(r);
    }
    let mut feas = Vec::new();
    let mut gap = Vec::new();
    for ((n, _), (solver, members)) in &by_scale {
        let fraction = members.iter().filter(|r| r.feasible).count() as f64 / members.len() as f64;
        feas.push(format!("{n} {solver} {fraction}"));
        let gaps = members.iter().filter_map(|r| {
            let base = rows.iter().find(|b| {
                b.solver == names::EXACT && b.instance == r.instance && b.stage_or_alpha == r.stage_or_alpha
            })?;
            makespan_gap(r, base).expect("same instance and setting")
        });
        gap.push(format!("{n} {solver} {}", cell(mean(gaps))));
    }
    vec![
        ("feasibility_vs_scale.dat", "# n_tasks solver feasibility".into(), feas),
        (
            "makespan_gap_vs_exact.dat",
            "# n_tasks solver mean_gap_to_exact".into(),
            gap,
        ),
    ]
}

fn write_lines(path: &Path, header: &str, lines: &[String]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    for l in lines {
        writeln!(w, "{l}")?;
    }
    w.flush()
}

pub(super) fn write_all(
    plan: &ExperimentPlan,
    rows: &[ResultRow],
    summary: &[SummaryRow],
    dir: &Path,
) -> Result<Vec<PathBuf>, ExperimentError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ExperimentError::Io { path, source }
    };
    let csv_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ExperimentError::Csv { path, source }
    };

    let mut files = Vec::new();
    let results = dir.join("results.csv");
    write_results(rows, File::create(&results).map_err(io_err(&results))?).map_err(csv_err(&results))?;
    files.push(results);
    let summary_path = dir.join("summary.csv");
    write_summary(summary, File::create(&summary_path).map_err(io_err(&summary_path))?)
        .map_err(csv_err(&summary_path))?;
    files.push(summary_path);

    let series = match plan.id {
        ExperimentId::Exp0 => stage_series(plan, summary),
        ExperimentId::Exp1 => alpha_series(plan, rows),
        ExperimentId::Exp2 => Vec::new(),
        ExperimentId::Exp3 => scale_series(plan, rows),
    };
    for (name, header, lines) in series {
        let path = dir.join(name);
        write_lines(&path, &header, &lines).map_err(io_err(&path))?;
        files.push(path);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(key: &str, makespan: Option<f64>) -> ResultRow {
        ResultRow {
            experiment: "exp1".into(),
            instance: "Medium_6T".into(),
            stage_or_alpha: key.into(),
            solver: "qubo-sa".into(),
            seed: 0,
            feasible: makespan.is_some(),
            makespan_s: makespan,
            utilization: makespan.map(|_| 0.5),
            runtime_ms: 1.0,
            energy: None,
            tag: None,
        }
    }

    #[test]
    fn gap_values() {
        assert_eq!(
            makespan_gap(&row("1", Some(13.0)), &row("1", Some(13.0))),
            Ok(Some(0.0))
        );
        let g = makespan_gap(&row("1", Some(14.5)), &row("1", Some(12.5)))
            .unwrap()
            .unwrap();
        assert!((g - 0.16).abs() < 1e-12);
        assert_eq!(makespan_gap(&row("1", None), &row("1", Some(12.5))), Ok(None));
        assert_eq!(
            makespan_gap(&row("1", Some(1.0)), &row("2", Some(1.0)))
                .unwrap_err()
                .field,
            "stage_or_alpha"
        );
    }

    #[test]
    fn results_have_no_empty_cells() {
        let mut buf = Vec::new();
        write_results(&[row("0.05", None), row("1", Some(12.0))], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], RESULTS_HEADER.join(","));
        assert_eq!(lines[1], "exp1,Medium_6T,0.05,qubo-sa,0,false,NA,NA,1,NA,-");
        assert_eq!(lines[2], "exp1,Medium_6T,1,qubo-sa,0,true,12,0.5,1,NA,-");
    }

    #[test]
    fn summary_groups_runs() {
        let rows = [
            row("1", Some(12.0)),
            row("1", None),
            row("1", Some(14.0)),
            row("2", None),
        ];
        let s = summarize(&rows);
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].runs, s[0].feasible_runs), (3, 2));
        assert_eq!(s[0].mean_makespan, Some(13.0));
        assert_eq!((s[0].min_makespan, s[0].max_makespan), (Some(12.0), Some(14.0)));
        assert_eq!(s[1].mean_makespan, None);
    }
}
