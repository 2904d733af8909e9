use std::path::Path;

use serde::Serialize;
use synthbh::{
    run_bernoulli_experiment, run_outlier_experiment, ExperimentReport, MethodSummary,
    OutlierSimConfig, SimConfig, SynthNull,
};

use crate::args::{Experiment, Format, SimulateArgs};
use crate::commands::{csv_text, resolve_seed, to_json};
use crate::error::{CliError, Result};
use crate::io::{format_number, write_all};

/// Environment variable bounding simulation parallelism; unset or 0 uses
/// every core.
pub const THREADS_ENV: &str = "SYNTHBH_THREADS";

const MAX_SWEEP_POINTS: usize = 10_000;

/// A parameter and the values it takes across a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub name: String,
    pub values: Vec<f64>,
}

/// Parses `name=start:stop:step` (inclusive) or `name=v1,v2,...`.
pub fn parse_sweep(spec: &str) -> Result<Sweep> {
    let bad = |why: &str| CliError::invalid(format!("invalid sweep `{spec}`: {why}"));
    let (name, range) = spec
        .split_once('=')
        .ok_or_else(|| bad("expected name=values"))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(bad("missing parameter name"));
    }
    let number = |s: &str| -> Result<f64> {
        let x: f64 = s
            .trim()
            .parse()
            .map_err(|_| bad(&format!("`{s}` is not a number")))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(bad(&format!("`{s}` is not finite")))
        }
    };
    let values = if range.contains(':') {
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(bad("a range needs start:stop:step"));
        };
        let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
        if step <= 0.0 {
            return Err(bad("step must be positive"));
        }
        if stop < start {
            return Err(bad("stop is below start"));
        }
        let steps = ((stop - start) / step + 1e-9).floor();
        if steps >= MAX_SWEEP_POINTS as f64 {
            return Err(bad("too many points"));
        }
        (0..=steps as usize)
            .map(|i| start + i as f64 * step)
            .collect()
    } else {
        range.split(',').map(number).collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() {
        return Err(bad("no values"));
    }
    Ok(Sweep {
        name: name.to_string(),
        values,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
enum SimSetup {
    Bernoulli(SimConfig),
    Outlier(OutlierSimConfig),
}

impl SimSetup {
    fn from_args(args: &SimulateArgs, seed: u64) -> Result<Self> {
        let misplaced = |flag: &str| {
            CliError::invalid(format!(
                "--{flag} does not apply to the {} experiment",
                match args.experiment {
                    Experiment::Bernoulli => "bernoulli",
                    Experiment::Outlier => "outlier",
                }
            ))
        };
        match args.experiment {
            Experiment::Bernoulli => {
                for (set, flag) in [
                    (args.outlier_frac.is_some(), "outlier-frac"),
                    (args.contamination.is_some(), "contamination"),
                    (args.rho.is_some(), "rho"),
                    (args.mu_out.is_some(), "mu-out"),
                ] {
                    if set {
                        return Err(misplaced(flag));
                    }
                }
                let d = SimConfig::default();
                Ok(SimSetup::Bernoulli(SimConfig {
                    n_real: args.n_real.unwrap_or(d.n_real),
                    n_synth: args.n_synth.unwrap_or(d.n_synth),
                    m: args.m.unwrap_or(d.m),
                    frac_alt: args.frac_alt.unwrap_or(d.frac_alt),
                    q_alt: args.q_alt.unwrap_or(d.q_alt),
                    q_synth_null: args.q_synth_null.unwrap_or(d.q_synth_null),
                    q_synth_alt: args.q_synth_alt.unwrap_or(d.q_synth_alt),
                    alpha: args.alpha.unwrap_or(d.alpha),
                    epsilon: args.epsilon.unwrap_or(d.epsilon),
                    trials: args.trials.unwrap_or(d.trials),
                    seed,
                }))
            }
            Experiment::Outlier => {
                for (set, flag) in [
                    (args.frac_alt.is_some(), "frac-alt"),
                    (args.q_alt.is_some(), "q-alt"),
                    (args.q_synth_null.is_some(), "q-synth-null"),
                    (args.q_synth_alt.is_some(), "q-synth-alt"),
                ] {
                    if set {
                        return Err(misplaced(flag));
                    }
                }
                let d = OutlierSimConfig::default();
                Ok(SimSetup::Outlier(OutlierSimConfig {
                    n_real: args.n_real.map_or(d.n_real, |n| n as usize),
                    n_synth: args.n_synth.map_or(d.n_synth, |n| n as usize),
                    m: args.m.unwrap_or(d.m),
                    outlier_frac: args.outlier_frac.unwrap_or(d.outlier_frac),
                    contamination_frac: args.contamination.unwrap_or(d.contamination_frac),
                    rho: args.rho.unwrap_or(d.rho),
                    mu_out: args.mu_out.unwrap_or(d.mu_out),
                    alpha: args.alpha.unwrap_or(d.alpha),
                    epsilon: args.epsilon.unwrap_or(d.epsilon),
                    trials: args.trials.unwrap_or(d.trials),
                    seed,
                }))
            }
        }
    }

    fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let count = |value: f64| -> Result<usize> {
            if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(CliError::invalid(format!(
                    "sweep value {value} for `{name}` must be a non-negative integer"
                )))
            }
        };
        match self {
            SimSetup::Bernoulli(c) => match name {
                "n_real" => c.n_real = count(value)? as u64,
                "n_synth" => c.n_synth = count(value)? as u64,
                "m" => c.m = count(value)?,
                "trials" => c.trials = count(value)?,
                "frac_alt" => c.frac_alt = value,
                "q_alt" => c.q_alt = value,
                "q_synth_null" => c.q_synth_null = SynthNull::Fixed(value),
                "q_synth_alt" => c.q_synth_alt = value,
                "alpha" => c.alpha = value,
                "epsilon" => c.epsilon = value,
                _ => return Err(unknown_parameter(name)),
            },
            SimSetup::Outlier(c) => match name {
                "n_real" => c.n_real = count(value)?,
                "n_synth" => c.n_synth = count(value)?,
                "m" => c.m = count(value)?,
                "trials" => c.trials = count(value)?,
                "outlier_frac" => c.outlier_frac = value,
                "contamination" | "contamination_frac" => c.contamination_frac = value,
                "rho" => c.rho = value,
                "mu_out" => c.mu_out = value,
                "alpha" => c.alpha = value,
                "epsilon" => c.epsilon = value,
                _ => return Err(unknown_parameter(name)),
            },
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        match self {
            SimSetup::Bernoulli(c) => c.validate()?,
            SimSetup::Outlier(c) => c.validate()?,
        }
        Ok(())
    }

    fn run(&self, threads: usize) -> Result<ExperimentReport> {
        Ok(match self {
            SimSetup::Bernoulli(c) => run_bernoulli_experiment(c, threads)?,
            SimSetup::Outlier(c) => run_outlier_experiment(c, threads)?,
        })
    }
}

fn unknown_parameter(name: &str) -> CliError {
    CliError::invalid(format!("unknown sweep parameter `{name}`"))
}

/// Worker thread count from the environment.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(s) if !s.trim().is_empty() => s.trim().parse().map_err(|_| {
            CliError::invalid(format!("{THREADS_ENV}=`{s}` is not a non-negative integer"))
        }),
        _ => Ok(0),
    }
}

#[derive(Debug, Serialize)]
struct SweepPoint {
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    summaries: Vec<MethodSummary>,
}

#[derive(Debug, Serialize)]
struct SimulationSummary<'a> {
    experiment: Experiment,
    seed: u64,
    config: &'a SimSetup,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<&'a Sweep>,
    points: Vec<SweepPoint>,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let base = SimSetup::from_args(args, seed)?;
    let sweep = args.sweep.as_deref().map(parse_sweep).transpose()?;
    let threads = threads_from_env()?;

    // Every configuration is checked before the first trial runs.
    let setups: Vec<(Option<f64>, SimSetup)> = match &sweep {
        None => vec![(None, base.clone())],
        Some(sweep) => sweep
            .values
            .iter()
            .map(|&value| {
                let mut setup = base.clone();
                setup.set(&sweep.name, value)?;
                Ok((Some(value), setup))
            })
            .collect::<Result<_>>()?,
    };
    for (value, setup) in &setups {
        setup.validate().map_err(|e| match value {
            Some(v) => CliError::invalid(format!(
                "sweep point {}={}: {e}",
                sweep.as_ref().map_or("", |s| s.name.as_str()),
                format_number(*v)
            )),
            None => e,
        })?;
    }
    let reports = setups
        .iter()
        .map(|(value, setup)| Ok((*value, setup.run(threads)?)))
        .collect::<Result<Vec<_>>>()?;

    let param = sweep.as_ref().map(|s| s.name.as_str());
    let trials_csv = trials_table(param, &reports)?;
    let summary_csv = summary_table(param, &reports)?;
    let summary_json = to_json(&SimulationSummary {
        experiment: args.experiment,
        seed,
        config: &base,
        sweep: sweep.as_ref(),
        points: reports
            .iter()
            .map(|(value, report)| SweepPoint {
                value: *value,
                summaries: report.summaries.clone(),
            })
            .collect(),
    })?;

    if let Some(dir) = &args.output {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        write_all(Some(&dir.join("trials.csv")), &trials_csv)?;
        write_all(Some(&dir.join("summary.csv")), &summary_csv)?;
        write_all(Some(&dir.join("summary.json")), &summary_json)?;
    }
    let stdout = match args.format {
        Format::Csv => summary_csv,
        Format::Json => summary_json,
    };
    write_all(None::<&Path>, &stdout)
}

fn with_param(param: Option<&str>, columns: &[&'static str]) -> Vec<String> {
    param
        .into_iter()
        .map(str::to_string)
        .chain(columns.iter().map(|c| c.to_string()))
        .collect()
}

fn trials_table(
    param: Option<&str>,
    reports: &[(Option<f64>, ExperimentReport)],
) -> Result<String> {
    let header = with_param(param, &["method", "trial", "fdp", "power", "rejections"]);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = reports.iter().flat_map(|(value, report)| {
        report.records.iter().map(move |r| {
            value
                .map(format_number)
                .into_iter()
                .chain([
                    r.method.to_string(),
                    r.trial.to_string(),
                    format_number(r.metrics.fdp),
                    format_number(r.metrics.power),
                    r.metrics.rejections.to_string(),
                ])
                .collect()
        })
    });
    csv_text(&header, rows)
}

fn summary_table(
    param: Option<&str>,
    reports: &[(Option<f64>, ExperimentReport)],
) -> Result<String> {
    let header = with_param(
        param,
        &[
            "method",
            "trials",
            "fdr",
            "fdr_se",
            "power",
            "power_se",
            "mean_rejections",
        ],
    );
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = reports.iter().flat_map(|(value, report)| {
        report.summaries.iter().map(move |s| {
            value
                .map(format_number)
                .into_iter()
                .chain([
                    s.method.to_string(),
                    s.trials.to_string(),
                    format_number(s.fdr),
                    format_number(s.fdr_se),
                    format_number(s.power),
                    format_number(s.power_se),
                    format_number(s.mean_rejections),
                ])
                .collect()
        })
    });
    csv_text(&header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_forms() {
        let s = parse_sweep("n_real=50:200:50").unwrap();
        assert_eq!(s.name, "n_real");
        assert_eq!(s.values, vec![50.0, 100.0, 150.0, 200.0]);
        let s = parse_sweep("epsilon=0,0.05,0.1,0.2").unwrap();
        assert_eq!(s.values, vec![0.0, 0.05, 0.1, 0.2]);
        let s = parse_sweep("epsilon=0:0.3:0.1").unwrap();
        assert_eq!(s.values.len(), 4);
    }

    #[test]
    fn sweep_errors() {
        for bad in [
            "n_real",
            "=1,2",
            "n_real=1:2",
            "n_real=5:1:1",
            "n_real=1:5:0",
            "n_real=1:5:-1",
            "n_real=a,b",
            "n_real=0:1e9:1",
            "alpha=nan",
        ] {
            assert!(parse_sweep(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn sweep_parameters_are_checked() {
        let mut setup = SimSetup::Bernoulli(SimConfig::default());
        assert!(setup.set("n_real", 50.0).is_ok());
        assert!(setup.set("n_real", 50.5).is_err());
        assert!(setup.set("rho", 0.1).is_err());
        assert!(setup.set("nonsense", 1.0).is_err());
        let mut setup = SimSetup::Outlier(OutlierSimConfig::default());
        assert!(setup.set("rho", 0.1).is_ok());
        assert!(setup.set("q_alt", 0.1).is_err());
    }
}
