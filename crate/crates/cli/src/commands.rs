//! The four subcommands. Each returns the files it wants written.

use std::fmt::Write as _;
use std::path::Path;

use poqg_core::baselines::{cleaning_mask, oversampling_stage};
use poqg_core::data::{make_case_study, stratified_folds, write_csv};
use poqg_core::eval::{cross_validate, fmt_opt, EvalReport, Summary};
use poqg_core::geometry::{convex_hull, hull_contains};
use poqg_core::poqg::PoqgConfig;
use poqg_core::resample::{MethodId, Resampled, Resampler, RowOrigin};
use poqg_core::seed::{stable_hash, substream};
use poqg_core::stats::{
    compare_pair, comparison_markdown, present_methods, score_table, winning_times, write_comparison_csv,
    ComparisonOutcome, Metric,
};
use poqg_core::{Dataset, MAJORITY, MINORITY};
use rayon::prelude::*;
use serde::Serialize;

use crate::artifacts::Artifacts;
use crate::config::{CommandKind, RunConfig};
use crate::error::{CliError, CliResult};

pub fn execute(c: &RunConfig) -> CliResult<Artifacts> {
    c.validate()?;
    let mut a = match c.command.expect("validated") {
        CommandKind::Resample => cmd_resample(c)?,
        CommandKind::Compare => cmd_compare(c)?,
        CommandKind::Grid => cmd_grid(c)?,
        CommandKind::Demo => cmd_demo(c)?,
    };
    a.add("run.json", c.to_json());
    Ok(a)
}

fn load(c: &RunConfig, path: &Path) -> CliResult<Dataset> {
    c.data
        .load(path)
        .map_err(|e| CliError::from(e).context(path.display()))
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::internal(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::internal(e.to_string()))
}

fn json_bytes<T: Serialize>(v: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::internal(e.to_string()))?;
    s.push('\n');
    Ok(s.into_bytes())
}

#[derive(Serialize)]
struct ResampleSummary {
    dataset: String,
    method: MethodId,
    input: poqg_core::DatasetStats,
    output_majority: usize,
    output_minority: usize,
    n_synthetic: usize,
    n_fallback: usize,
}

pub fn cmd_resample(c: &RunConfig) -> CliResult<Artifacts> {
    let path = &c.inputs[0];
    let id = RunConfig::dataset_id(path);
    let d = load(c, path)?;
    let stats = d.stats()?;
    let spec = c.spec_for(c.method, &id);
    let r = spec
        .resample(&d, c.seed)
        .map_err(|e| CliError::from(e).context(format!("{id}/{}", c.method)))?;
    let mut a = Artifacts::new();
    let flags = r.synthetic_flags();
    a.add_with("resampled.csv", |w| write_csv(&r.data, w, Some(&flags)))?;
    a.add_with("provenance.csv", |w| r.write_provenance_csv(w))?;
    a.add(
        "summary.json",
        json_bytes(&ResampleSummary {
            dataset: id,
            method: c.method,
            input: stats,
            output_majority: r.data.count(MAJORITY),
            output_minority: r.data.count(MINORITY),
            n_synthetic: r.synthetic_count(),
            n_fallback: r.fallback_count,
        })?,
    );
    if r.fallback_count > 0 {
        log::warn!("{} synthetics used the equal-weight fallback", r.fallback_count);
    }
    Ok(a)
}

struct Cell {
    dataset: String,
    method: MethodId,
    outcome: Result<EvalReport, CliError>,
}

fn fold_plan_seed(seed: u64, dataset: &str) -> u64 {
    substream(seed, &[stable_hash(dataset)])
}

pub fn cmd_compare(c: &RunConfig) -> CliResult<Artifacts> {
    let loaded: Vec<(String, Result<Dataset, CliError>)> = c
        .inputs
        .iter()
        .map(|p| (RunConfig::dataset_id(p), load(c, p)))
        .collect();
    let mut methods = c.methods.clone();
    methods.sort();
    methods.dedup();

    let mut jobs = Vec::new();
    let mut cells = Vec::new();
    for (id, d) in &loaded {
        let ready = match d {
            Ok(d) => stratified_folds(d, c.folds, fold_plan_seed(c.seed, id))
                .map(|plan| (d, plan))
                .map_err(|e| CliError::from(e).context(id)),
            Err(e) => Err(CliError {
                kind: e.kind,
                message: e.message.clone(),
            }),
        };
        match ready {
            Ok((d, plan)) => {
                for &m in &methods {
                    jobs.push((id.clone(), d, plan.clone(), m));
                }
            }
            Err(e) => {
                for &m in &methods {
                    cells.push(Cell {
                        dataset: id.clone(),
                        method: m,
                        outcome: Err(CliError {
                            kind: e.kind,
                            message: e.message.clone(),
                        }),
                    });
                }
            }
        }
    }
    cells.par_extend(jobs.into_par_iter().map(|(id, d, plan, m)| {
        let spec = c.spec_for(m, &id);
        let outcome = cross_validate(&id, d, &spec, &c.classifier, &plan, c.seed, c.cv)
            .map_err(|e| CliError::from(e).context(format!("{id}/{m}")));
        Cell {
            dataset: id,
            method: m,
            outcome,
        }
    }));
    cells.sort_by(|a, b| (&a.dataset, a.method).cmp(&(&b.dataset, b.method)));

    if cells.iter().all(|c| c.outcome.is_err()) {
        let first = cells.iter().find_map(|c| c.outcome.as_ref().err()).expect("at least one cell");
        return Err(CliError {
            kind: first.kind,
            message: format!("every cell failed; first error: {}", first.message),
        });
    }

    let mut a = Artifacts::new();
    let reports: Vec<EvalReport> = cells.iter().filter_map(|c| c.outcome.as_ref().ok().cloned()).collect();
    for r in &reports {
        let stem = format!("cells/{}__{}", r.dataset, r.method.id());
        a.add_with(format!("{stem}.csv"), |w| r.write_folds_csv(w))?;
        a.add(format!("{stem}.json"), r.to_json()? + "\n");
    }

    a.add(
        "summary.csv",
        csv_bytes(
            &["dataset", "method", "n_defined_folds", "mean_g_mean", "std_g_mean", "mean_roc_auc", "std_roc_auc"],
            reports.iter().map(|r| {
                let s = &r.summary;
                vec![
                    r.dataset.clone(),
                    r.method.id().to_string(),
                    s.n_defined_folds.to_string(),
                    fmt_opt(s.mean_g_mean),
                    fmt_opt(s.std_g_mean),
                    fmt_opt(s.mean_roc_auc),
                    fmt_opt(s.std_roc_auc),
                ]
            }),
        )?,
    );

    let present = present_methods(&reports);
    let mut wins_rows = Vec::new();
    let mut wins_by_metric = Vec::new();
    for metric in Metric::ALL {
        let wins = winning_times(&score_table(&reports, metric), &present);
        for (m, w) in &wins {
            wins_rows.push(vec![metric.id().to_string(), m.id().to_string(), w.to_string()]);
        }
        wins_by_metric.push((metric, wins));
    }
    a.add("winning_times.csv", csv_bytes(&["metric", "method", "wins"], wins_rows)?);

    let reference = if methods.contains(&MethodId::Poqg) {
        MethodId::Poqg
    } else {
        methods[methods.len() - 1]
    };
    let mut comparisons: Vec<ComparisonOutcome> = Vec::new();
    for metric in Metric::ALL {
        let table = score_table(&reports, metric);
        for &other in methods.iter().filter(|&&m| m != reference) {
            let outcome = compare_pair(&table, metric, reference, other).map_err(|e| e.to_string());
            comparisons.push((metric, reference, other, outcome));
        }
    }
    a.add_with("wilcoxon.csv", |w| write_comparison_csv(&comparisons, w))?;
    a.add("wilcoxon.md", comparison_markdown(&comparisons));

    let failures: Vec<&Cell> = cells.iter().filter(|c| c.outcome.is_err()).collect();
    a.add(
        "failures.csv",
        csv_bytes(
            &["dataset", "method", "exit_code", "error"],
            failures.iter().map(|c| {
                let e = c.outcome.as_ref().expect_err("failure");
                vec![c.dataset.clone(), c.method.id().to_string(), e.exit_code().to_string(), e.message.clone()]
            }),
        )?,
    );
    for f in &failures {
        log::warn!("{}", f.outcome.as_ref().expect_err("failure"));
    }

    a.add(
        "timings.csv",
        csv_bytes(
            &["dataset", "method", "fold", "wall_ms"],
            reports.iter().flat_map(|r| {
                r.fold_wall_ms.iter().enumerate().map(move |(i, ms)| {
                    vec![r.dataset.clone(), r.method.id().to_string(), i.to_string(), format!("{ms:.3}")]
                })
            }),
        )?,
    );

    let irs: Vec<(String, Option<f64>)> = loaded
        .iter()
        .map(|(id, d)| (id.clone(), d.as_ref().ok().and_then(|d| d.stats().ok()).map(|s| s.imbalance_ratio)))
        .collect();
    a.add(
        "report.md",
        render_report(c, &methods, &irs, &reports, &wins_by_metric, &comparisons, &failures),
    );
    Ok(a)
}

fn cell_text(mean: Option<f64>, std: Option<f64>) -> String {
    match (mean, std) {
        (Some(m), Some(s)) => format!("{m:.4} ± {s:.4}"),
        (Some(m), None) => format!("{m:.4}"),
        _ => "NA".into(),
    }
}

fn literal_means(r: &EvalReport) -> (Option<f64>, Option<f64>) {
    let defined: Vec<_> = r.folds.iter().filter(|f| f.defined).collect();
    let mean = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    (
        mean(defined.iter().filter_map(|f| f.metrics.paper_literal_gmean).collect()),
        mean(defined.iter().filter_map(|f| f.metrics.paper_literal_auc).collect()),
    )
}

#[allow(clippy::too_many_arguments)]
fn render_report(
    c: &RunConfig,
    methods: &[MethodId],
    irs: &[(String, Option<f64>)],
    reports: &[EvalReport],
    wins: &[(Metric, Vec<(MethodId, f64)>)],
    comparisons: &[ComparisonOutcome],
    failures: &[&Cell],
) -> String {
    let mut s = String::from("# Resampling benchmark\n\n");
    let classifier = serde_json::to_string(&c.classifier).expect("serializable");
    let _ = writeln!(
        s,
        "{}-fold stratified cross-validation, classifier `{classifier}`, seed {}, feature scaling {}.",
        c.folds,
        c.seed,
        if c.cv.scale { "on" } else { "off" }
    );
    s.push_str(
        "G-Mean is sqrt(TPR x TNR); ROC-AUC is the rank statistic (ties count one half). \
         Cells show mean ± sample standard deviation over folds with both classes in the test split.\n",
    );

    let header = |s: &mut String| {
        s.push_str("| Dataset | IR |");
        for m in methods {
            let _ = write!(s, " {} |", m.display_name());
        }
        s.push_str("\n|---|---:|");
        for _ in methods {
            s.push_str("---:|");
        }
        s.push('\n');
    };
    let lookup = |ds: &str, m: MethodId| reports.iter().find(|r| r.dataset == ds && r.method == m);
    let tables: [(&str, fn(&Summary) -> (Option<f64>, Option<f64>)); 2] = [
        ("G-Mean", |s| (s.mean_g_mean, s.std_g_mean)),
        ("ROC-AUC", |s| (s.mean_roc_auc, s.std_roc_auc)),
    ];
    for (title, get) in tables {
        let _ = writeln!(s, "\n## {title}\n");
        header(&mut s);
        for (ds, ir) in irs {
            let _ = write!(s, "| {ds} | {} |", ir.map_or("NA".into(), |v| format!("{v:.2}")));
            for &m in methods {
                let text = lookup(ds, m).map_or("failed".into(), |r| {
                    let (mean, std) = get(&r.summary);
                    cell_text(mean, std)
                });
                let _ = write!(s, " {text} |");
            }
            s.push('\n');
        }
    }

    if c.cv.paper_literal {
        s.push_str("\n## Paper-literal diagnostics\n\n");
        s.push_str("Means over defined folds of sqrt(TPR x FPR) / (TPR + FPR) / 2. Not the reported scores.\n\n");
        header(&mut s);
        for (ds, _) in irs {
            let _ = write!(s, "| {ds} | |");
            for &m in methods {
                let text = lookup(ds, m).map_or("failed".into(), |r| {
                    let (g, a) = literal_means(r);
                    format!("{} / {}", cell_text(g, None), cell_text(a, None))
                });
                let _ = write!(s, " {text} |");
            }
            s.push('\n');
        }
    }

    s.push_str("\n## Winning times\n\nDatasets on which each method scores best; ties split evenly.\n\n| Metric |");
    for m in methods {
        let _ = write!(s, " {} |", m.display_name());
    }
    s.push_str("\n|---|");
    for _ in methods {
        s.push_str("---:|");
    }
    s.push('\n');
    for (metric, w) in wins {
        let _ = write!(s, "| {} |", metric.id());
        for m in methods {
            let v = w.iter().find(|x| x.0 == *m).map_or(0.0, |x| x.1);
            let _ = write!(s, " {} |", v);
        }
        s.push('\n');
    }

    s.push_str("\n## Wilcoxon signed-rank tests\n\nTwo-sided, paired over datasets; NA when fewer than 5 datasets have scores for both methods.\n\n");
    s.push_str(&comparison_markdown(comparisons));

    if !failures.is_empty() {
        s.push_str("\n## Failures\n\n");
        for f in failures {
            let _ = writeln!(s, "- {}/{}: {}", f.dataset, f.method, f.outcome.as_ref().expect_err("failure"));
        }
    }
    s
}

#[derive(Serialize)]
struct GridRow {
    k: usize,
    alpha: f64,
    beta: f64,
    q: f64,
    n_defined_folds: usize,
    mean_g_mean: Option<f64>,
    std_g_mean: Option<f64>,
    mean_roc_auc: Option<f64>,
    std_roc_auc: Option<f64>,
}

impl GridRow {
    const HEADER: [&'static str; 9] = [
        "k",
        "alpha",
        "beta",
        "q",
        "n_defined_folds",
        "mean_g_mean",
        "std_g_mean",
        "mean_roc_auc",
        "std_roc_auc",
    ];

    fn record(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.alpha.to_string(),
            self.beta.to_string(),
            self.q.to_string(),
            self.n_defined_folds.to_string(),
            fmt_opt(self.mean_g_mean),
            fmt_opt(self.std_g_mean),
            fmt_opt(self.mean_roc_auc),
            fmt_opt(self.std_roc_auc),
        ]
    }
}

fn opt_cmp(a: Option<f64>, b: Option<f64>) -> std::cmp::Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (a, b) => a.is_some().cmp(&b.is_some()),
    }
}

/// Best-first order: higher mean ROC-AUC, then higher mean G-Mean, then the
/// lexicographically smaller (k, alpha, beta, q).
fn grid_order(a: &GridRow, b: &GridRow) -> std::cmp::Ordering {
    opt_cmp(b.mean_roc_auc, a.mean_roc_auc)
        .then(opt_cmp(b.mean_g_mean, a.mean_g_mean))
        .then(a.k.cmp(&b.k))
        .then(a.alpha.total_cmp(&b.alpha))
        .then(a.beta.total_cmp(&b.beta))
        .then(a.q.total_cmp(&b.q))
}

#[derive(Serialize)]
struct GridBest<'a> {
    dataset: &'a str,
    n_evaluated: usize,
    best: &'a GridRow,
    config: &'a PoqgConfig,
}

pub fn cmd_grid(c: &RunConfig) -> CliResult<Artifacts> {
    let path = &c.inputs[0];
    let id = RunConfig::dataset_id(path);
    let d = load(c, path)?;
    let plan = stratified_folds(&d, c.folds, fold_plan_seed(c.seed, &id)).map_err(|e| CliError::from(e).context(&id))?;
    let configs = c.grid.configs(&c.poqg);
    let results: Vec<(PoqgConfig, Result<EvalReport, CliError>)> = configs
        .into_par_iter()
        .map(|cfg| {
            let spec = poqg_core::ResamplerSpec::Poqg(cfg.clone());
            let r = cross_validate(&id, &d, &spec, &c.classifier, &plan, c.seed, c.cv).map_err(CliError::from);
            (cfg, r)
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (cfg, r) in &results {
        match r {
            Ok(r) => rows.push((
                GridRow {
                    k: cfg.k,
                    alpha: cfg.alpha,
                    beta: cfg.beta,
                    q: cfg.q,
                    n_defined_folds: r.summary.n_defined_folds,
                    mean_g_mean: r.summary.mean_g_mean,
                    std_g_mean: r.summary.std_g_mean,
                    mean_roc_auc: r.summary.mean_roc_auc,
                    std_roc_auc: r.summary.std_roc_auc,
                },
                cfg,
            )),
            Err(e) => failures.push(vec![
                cfg.k.to_string(),
                cfg.alpha.to_string(),
                cfg.beta.to_string(),
                cfg.q.to_string(),
                e.message.clone(),
            ]),
        }
    }
    let Some((best, best_cfg)) = rows.iter().min_by(|a, b| grid_order(&a.0, &b.0)) else {
        let first = results.into_iter().find_map(|r| r.1.err()).expect("nonempty grid");
        return Err(first.context(format!("{id}: every grid point failed")));
    };

    let mut a = Artifacts::new();
    a.add("sweep.csv", csv_bytes(&GridRow::HEADER, rows.iter().map(|r| r.0.record()))?);
    a.add("best.csv", csv_bytes(&GridRow::HEADER, [best.record()])?);
    a.add(
        "best.json",
        json_bytes(&GridBest {
            dataset: &id,
            n_evaluated: rows.len(),
            best,
            config: best_cfg,
        })?,
    );
    a.add("failures.csv", csv_bytes(&["k", "alpha", "beta", "q", "error"], failures)?);
    Ok(a)
}

/// Methods shown in the case-study demo, in report order.
pub const DEMO_METHODS: [MethodId; 6] = [
    MethodId::Adasyn,
    MethodId::BorderlineSmote,
    MethodId::Smote,
    MethodId::SmoteEnn,
    MethodId::SmoteTomek,
    MethodId::Poqg,
];

/// Oversampled data before cleaning and the mask of rows cleaning keeps.
fn demo_run(c: &RunConfig, d: &Dataset, m: MethodId) -> CliResult<(Resampled, Vec<bool>)> {
    let over = match m.baseline() {
        Some(b) => oversampling_stage(d, &c.baseline.config(b, c.seed))?,
        None => c.spec_for(m, "case_study").resample(d, c.seed)?,
    };
    let keep = match m.baseline() {
        Some(b) => cleaning_mask(&over.data, &c.baseline.config(b, c.seed)),
        None => None,
    }
    .unwrap_or_else(|| vec![true; over.data.len()]);
    Ok((over, keep))
}

pub fn cmd_demo(c: &RunConfig) -> CliResult<Artifacts> {
    let d = make_case_study(c.seed);
    let hull_pts: Vec<[f64; 2]> = d
        .class_indices(MINORITY)
        .into_iter()
        .map(|i| [d.row(i)[0], d.row(i)[1]])
        .collect();
    let hull = convex_hull(&hull_pts);
    let mut a = Artifacts::new();
    a.add_with("case_study.csv", |w| write_csv(&d, w, None))?;

    let runs: Vec<(MethodId, CliResult<(Resampled, Vec<bool>)>)> =
        DEMO_METHODS.par_iter().map(|&m| (m, demo_run(c, &d, m))).collect();
    let mut summary = Vec::new();
    for (m, run) in runs {
        let (over, keep) = run.map_err(|e| e.context(m))?;
        let mut syn_rows = Vec::new();
        let mut inside = 0;
        for (i, o) in over.origins.iter().enumerate() {
            if let RowOrigin::Synthetic(p) = o {
                let x = over.data.row(i);
                if hull_contains(&hull, [x[0], x[1]], 1e-9) {
                    inside += 1;
                }
                let mut rec: Vec<String> = x.iter().map(f64::to_string).collect();
                rec.extend([
                    p.anchor.to_string(),
                    p.proxima.to_string(),
                    p.orion.to_string(),
                    p.q1.to_string(),
                    p.q2.to_string(),
                    u8::from(keep[i]).to_string(),
                ]);
                syn_rows.push(rec);
            }
        }
        let n_syn = syn_rows.len();
        let n_kept = over
            .origins
            .iter()
            .zip(&keep)
            .filter(|(o, &k)| k && matches!(o, RowOrigin::Synthetic(_)))
            .count();
        a.add(
            format!("{}_synthetic.csv", m.id()),
            csv_bytes(&["x1", "x2", "anchor_id", "proxima_id", "orion_id", "q1", "q2", "kept"], syn_rows)?,
        );
        let fin = over.retain(&keep);
        let flags = fin.synthetic_flags();
        a.add_with(format!("{}_points.csv", m.id()), |w| write_csv(&fin.data, w, Some(&flags)))?;
        summary.push(vec![
            m.id().to_string(),
            n_syn.to_string(),
            n_kept.to_string(),
            inside.to_string(),
            fin.data.count(MAJORITY).to_string(),
            fin.data.count(MINORITY).to_string(),
        ]);
    }
    a.add(
        "demo_summary.csv",
        csv_bytes(
            &["method", "n_synthetic", "n_kept", "n_inside_minority_hull", "final_majority", "final_minority"],
            summary,
        )?,
    );
    Ok(a)
}

/// Run a configuration and write its artifacts to `out`.
pub fn run_to_dir(c: &RunConfig, out: &Path) -> CliResult<()> {
    let a = execute(c)?;
    a.write_to(out)
}

