//! Ensemble runner and parameter sweeps: many seeded realizations per
//! parameter point, aggregated into mean / standard-error rows.
//!
//! Every realization is fully determined by its own seed, so parallel and
//! serial execution of the same plan produce identical result sets. Sweep
//! seeds are derived as `seed_base XOR mix64(point_index, realization_index)`
//! (splitmix64 finalizer), so adding parameter points does not shift the
//! seeds of existing ones.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::metrics::MetricsReport;
use crate::model::{run, ModelConfig, StopReason, Strategy};
use crate::{Error, Result};

/// Grid of parameter points plus ensemble settings.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub n_values: Vec<usize>,
    pub q_values: Vec<u32>,
    pub strategies: Vec<Strategy>,
    pub f: usize,
    pub avg_degree: f64,
    pub realizations: usize,
    pub seed_base: u64,
    pub max_steps: Option<u64>,
    pub quiescence_window: Option<u64>,
}

impl SweepPlan {
    /// Parses the flat key-value plan format:
    ///
    /// ```text
    /// n = 100,200
    /// q = 5
    /// f = 3
    /// k = 4
    /// strategy = local-uniform,local-preferential
    /// realizations = 100
    /// seed_base = 42
    /// ```
    ///
    /// Optional keys: `max_steps`, `quiescence_window`. Lines starting with
    /// `#` and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n_values = None;
        let mut q_values = None;
        let mut strategies = None;
        let mut f = None;
        let mut k = None;
        let mut realizations = None;
        let mut seed_base = None;
        let mut max_steps = None;
        let mut quiescence_window = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("plan line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                Error::Parse(format!("plan line {}: bad {what} `{value}`", lineno + 1))
            };
            match key {
                "n" => n_values = Some(parse_list(value).map_err(|_| bad("n list"))?),
                "q" => q_values = Some(parse_list(value).map_err(|_| bad("q list"))?),
                "strategy" => {
                    let parsed: Result<Vec<Strategy>> =
                        value.split(',').map(|s| s.trim().parse()).collect();
                    strategies = Some(parsed?);
                }
                "f" => f = Some(value.parse().map_err(|_| bad("f"))?),
                "k" => k = Some(value.parse().map_err(|_| bad("k"))?),
                "realizations" => realizations = Some(value.parse().map_err(|_| bad("realizations"))?),
                "seed_base" => seed_base = Some(value.parse().map_err(|_| bad("seed_base"))?),
                "max_steps" => max_steps = Some(value.parse().map_err(|_| bad("max_steps"))?),
                "quiescence_window" => {
                    quiescence_window = Some(value.parse().map_err(|_| bad("quiescence_window"))?)
                }
                other => {
                    return Err(Error::Parse(format!(
                        "plan line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }

        let missing = |name: &str| Error::Parse(format!("plan is missing key `{name}`"));
        let plan = SweepPlan {
            n_values: n_values.ok_or_else(|| missing("n"))?,
            q_values: q_values.ok_or_else(|| missing("q"))?,
            strategies: strategies.ok_or_else(|| missing("strategy"))?,
            f: f.ok_or_else(|| missing("f"))?,
            avg_degree: k.ok_or_else(|| missing("k"))?,
            realizations: realizations.ok_or_else(|| missing("realizations"))?,
            seed_base: seed_base.ok_or_else(|| missing("seed_base"))?,
            max_steps,
            quiescence_window,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations < 1 {
            return Err(Error::Parameter("realizations must be >= 1".into()));
        }
        for cfg in self.points() {
            cfg.validate()?;
        }
        Ok(())
    }

    /// Parameter points in enumeration order: strategy-major, then q, then n.
    /// The seed field of each returned config is the base template value 0;
    /// realization seeds are assigned by the sweep.
    pub fn points(&self) -> Vec<ModelConfig> {
        let mut out = Vec::new();
        for &strategy in &self.strategies {
            for &q in &self.q_values {
                for &n in &self.n_values {
                    let mut cfg = ModelConfig::new(n, self.avg_degree, self.f, q, strategy, 0);
                    if let Some(ms) = self.max_steps {
                        cfg.max_steps = ms;
                    }
                    if let Some(w) = self.quiescence_window {
                        cfg.quiescence_window = w;
                    }
                    out.push(cfg);
                }
            }
        }
        out
    }
}

fn parse_list<T: std::str::FromStr>(value: &str) -> std::result::Result<Vec<T>, ()> {
    value
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| ()))
        .collect()
}

/// One finished realization.
#[derive(Debug, Clone)]
pub struct Realization {
    pub cfg: ModelConfig,
    pub seed: u64,
    pub report: MetricsReport,
    pub steps: u64,
    pub stop_reason: StopReason,
}

/// splitmix64 finalizer over the combined point/realization index.
pub fn realization_seed(seed_base: u64, point_index: usize, realization_index: usize) -> u64 {
    let mut z = (point_index as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(realization_index as u64)
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    seed_base ^ (z ^ (z >> 31))
}

fn run_seeds(cfg: &ModelConfig, seeds: &[u64]) -> Result<Vec<Realization>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let mut c = cfg.clone();
            c.seed = seed;
            let res = run(&c).map_err(|e| {
                Error::Parameter(format!("realization with seed {seed} failed: {e}"))
            })?;
            Ok(Realization {
                report: MetricsReport::compute(&res.graph, &res.states),
                cfg: c,
                seed,
                steps: res.steps,
                stop_reason: res.stop_reason,
            })
        })
        .collect()
}

/// `r` independent realizations of one config, seeded `seed_base + 0..r-1`.
pub fn run_ensemble(cfg: &ModelConfig, r: usize, seed_base: u64) -> Result<Vec<Realization>> {
    if r < 1 {
        return Err(Error::Parameter("realization count must be >= 1".into()));
    }
    let seeds: Vec<u64> = (0..r as u64).map(|i| seed_base.wrapping_add(i)).collect();
    run_seeds(cfg, &seeds)
}

/// Runs the full plan; realizations are ordered by (point index,
/// realization index) regardless of execution schedule.
pub fn sweep(plan: &SweepPlan) -> Result<Vec<Realization>> {
    plan.validate()?;
    let mut out = Vec::new();
    for (point_idx, cfg) in plan.points().iter().enumerate() {
        let seeds: Vec<u64> = (0..plan.realizations)
            .map(|ri| realization_seed(plan.seed_base, point_idx, ri))
            .collect();
        out.extend(run_seeds(cfg, &seeds)?);
    }
    Ok(out)
}

/// Aggregated statistic of one observable at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRow {
    pub n: usize,
    pub q: u32,
    pub f: usize,
    pub avg_degree: f64,
    pub strategy: Strategy,
    pub observable: String,
    pub mean: f64,
    pub stderr: f64,
    pub r: usize,
}

/// Observables extracted from each realization for aggregation.
fn observables(real: &Realization) -> Vec<(&'static str, f64)> {
    let n = real.report.n as f64;
    vec![
        ("domains", real.report.domain_report.count as f64),
        ("components", real.report.component_report.count as f64),
        (
            "largest_domain_frac",
            real.report.domain_report.largest as f64 / n,
        ),
        ("global_clustering", real.report.global_clustering),
        ("steps", real.steps as f64),
        (
            "frozen_frac",
            (real.stop_reason == StopReason::Frozen) as u8 as f64,
        ),
        (
            "stalled_frac",
            (real.stop_reason == StopReason::Stalled) as u8 as f64,
        ),
        (
            "budget_frac",
            (real.stop_reason == StopReason::Budget) as u8 as f64,
        ),
    ]
}

pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let r = values.len();
    let mean = values.iter().sum::<f64>() / r as f64;
    if r < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
    (mean, (var / r as f64).sqrt())
}

/// Groups realizations by parameter point (in first-appearance order) and
/// emits one row per observable per point.
pub fn aggregate(realizations: &[Realization]) -> Vec<EnsembleRow> {
    let mut points: Vec<(&ModelConfig, Vec<&Realization>)> = Vec::new();
    for real in realizations {
        let key = (&real.cfg.n, &real.cfg.q, &real.cfg.strategy);
        match points.iter_mut().find(|(c, _)| {
            (&c.n, &c.q, &c.strategy) == key && c.f == real.cfg.f && c.avg_degree == real.cfg.avg_degree
        }) {
            Some((_, group)) => group.push(real),
            None => points.push((&real.cfg, vec![real])),
        }
    }
    let mut rows = Vec::new();
    for (cfg, group) in points {
        let r = group.len();
        let names: Vec<&'static str> = observables(group[0]).iter().map(|(n, _)| *n).collect();
        for (oi, name) in names.iter().enumerate() {
            let values: Vec<f64> = group.iter().map(|g| observables(g)[oi].1).collect();
            let (mean, stderr) = mean_stderr(&values);
            rows.push(EnsembleRow {
                n: cfg.n,
                q: cfg.q,
                f: cfg.f,
                avg_degree: cfg.avg_degree,
                strategy: cfg.strategy,
                observable: name.to_string(),
                mean,
                stderr,
                r,
            });
        }
    }
    rows
}

pub const REALIZATION_CSV_HEADER: &str = "n,q,f,avg_degree,strategy,seed,components,largest_component,domains,largest_domain,C,mean_c,avg_path,steps,stop_reason";

pub fn realizations_csv(realizations: &[Realization]) -> String {
    let mut out = String::from(REALIZATION_CSV_HEADER);
    out.push('\n');
    for real in realizations {
        let rep = &real.report;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            real.cfg.n,
            real.cfg.q,
            real.cfg.f,
            real.cfg.avg_degree,
            real.cfg.strategy,
            real.seed,
            rep.component_report.count,
            rep.component_report.largest,
            rep.domain_report.count,
            rep.domain_report.largest,
            rep.global_clustering,
            rep.mean_local_clustering,
            rep.avg_path_length
                .map_or_else(|| "nan".to_string(), |l| l.to_string()),
            real.steps,
            real.stop_reason
        );
    }
    out
}

pub const AGGREGATE_CSV_HEADER: &str = "n,q,f,avg_degree,strategy,observable,mean,stderr,r";

pub fn aggregate_csv(rows: &[EnsembleRow]) -> String {
    let mut out = String::from(AGGREGATE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.n,
            row.q,
            row.f,
            row.avg_degree,
            row.strategy,
            row.observable,
            row.mean,
            row.stderr,
            row.r
        );
    }
    out
}

/// Ordinary least squares fit; errors when all x values coincide.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Parameter("linear fit needs at least 2 points".into()));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Parameter("degenerate x values in linear fit".into()));
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok((slope, intercept, r_squared))
}
