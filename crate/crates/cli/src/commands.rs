use std::path::Path;

use serde::Serialize;
use synthbh::{
    outlier_pvalues, run_procedure, trim_by_score, JitterSpec, PValuePair, RejectionResult,
    ScoreBundle,
};

use crate::args::{Format, ModeArg, OutlierArgs, TestArgs};
use crate::error::{CliError, Result};
use crate::io::{
    format_number, read_pvalue_file, read_role_scores, read_score_column, read_weights_file,
    write_all, RoleScores,
};
use crate::manifest::RunManifest;

#[derive(Debug, Serialize)]
struct TestRow<'a> {
    id: &'a str,
    p_real: f64,
    p_synth: f64,
    v: f64,
    rejected: bool,
}

#[derive(Debug, Serialize)]
struct TestReport<'a> {
    k_star: usize,
    alpha: f64,
    epsilon: f64,
    mode: ModeArg,
    weighted: bool,
    threshold: f64,
    rows: Vec<TestRow<'a>>,
}

pub fn cmd_test(args: &TestArgs) -> Result<()> {
    let manifest = RunManifest::for_test(args);
    manifest.validate()?;
    let rows = read_pvalue_file(&args.input)?;
    let ids: Vec<String> = rows.iter().map(|r| r.id.clone()).collect();
    let column_weights: Option<Vec<f64>> = rows.iter().map(|r| r.weight).collect();
    let weights = match (&args.weights_file, column_weights) {
        (Some(_), Some(_)) => {
            return Err(CliError::invalid(
                "weights given both as a column and via --weights-file",
            ))
        }
        (Some(path), None) => Some(read_weights_file(path, &ids)?),
        (None, w) => w,
    };
    let pairs = rows
        .iter()
        .map(|r| PValuePair::new(r.p_real, r.p_synth))
        .collect::<synthbh::Result<Vec<_>>>()?;
    let mut config = manifest.step_up_config()?;
    let weighted = weights.is_some();
    if let Some(w) = weights {
        config = if args.normalize_weights {
            config.with_normalized_weights(w)?
        } else {
            config.with_weights(w)?
        };
    }
    let result = run_procedure(&pairs, &config)?;

    let table: Vec<TestRow> = rows
        .iter()
        .zip(&result.modified_pvalues)
        .enumerate()
        .map(|(i, (r, &v))| TestRow {
            id: &r.id,
            p_real: r.p_real,
            p_synth: r.p_synth,
            v,
            rejected: result.is_rejected(i),
        })
        .collect();
    let text = match args.format {
        Format::Json => to_json(&TestReport {
            k_star: result.k_star,
            alpha: config.alpha(),
            epsilon: config.epsilon(),
            mode: args.mode,
            weighted,
            threshold: result.threshold_used,
            rows: table,
        })?,
        Format::Csv => {
            let mut out = csv_text(
                &["id", "p_real", "p_synth", "v", "rejected"],
                table.iter().map(|r| {
                    vec![
                        r.id.to_string(),
                        format_number(r.p_real),
                        format_number(r.p_synth),
                        format_number(r.v),
                        r.rejected.to_string(),
                    ]
                }),
            )?;
            out.push_str(&format!(
                "# k_star={},alpha={},epsilon={},mode={}\n",
                result.k_star,
                format_number(config.alpha()),
                format_number(config.epsilon()),
                config.mode()
            ));
            out
        }
    };
    write_all(args.output.as_deref(), &text)
}

#[derive(Debug, Serialize)]
struct OutlierRow {
    id: usize,
    score: f64,
    p_real: f64,
    p_merged: f64,
    rejected: bool,
}

#[derive(Debug, Serialize)]
struct OutlierReport {
    k_star: usize,
    alpha: f64,
    epsilon: f64,
    mode: ModeArg,
    rho: f64,
    n_real: usize,
    n_synth: usize,
    jitter_seed: Option<u64>,
    rows: Vec<OutlierRow>,
}

fn load_scores(args: &OutlierArgs) -> Result<RoleScores> {
    if let Some(path) = &args.scores {
        return read_role_scores(path);
    }
    match (&args.real, &args.test) {
        (Some(real), Some(test)) => Ok(RoleScores {
            real: read_score_column(real)?,
            synth: match &args.synth {
                Some(path) => read_score_column(path)?,
                None => Vec::new(),
            },
            test: read_score_column(test)?,
        }),
        _ => Err(CliError::invalid(
            "give either --scores or both --real and --test",
        )),
    }
}

pub fn cmd_outliers(args: &OutlierArgs) -> Result<()> {
    let manifest = RunManifest::for_outliers(args);
    manifest.validate()?;
    let scores = load_scores(args)?;
    let synth = trim_by_score(&scores.synth, args.rho)?;
    let bundle = ScoreBundle::new(scores.real, synth, scores.test)?;
    let jitter_seed = args.jitter.then(|| resolve_seed(args.seed));
    let jitter = jitter_seed.map(JitterSpec::new);
    let pairs = outlier_pvalues(&bundle, jitter.as_ref())?;
    let config = manifest.step_up_config()?;
    let result: RejectionResult = run_procedure(&pairs, &config)?;

    let rows: Vec<OutlierRow> = bundle
        .test_scores
        .iter()
        .zip(&pairs)
        .enumerate()
        .map(|(i, (&score, pair))| OutlierRow {
            id: i + 1,
            score,
            p_real: pair.p_real,
            p_merged: pair.p_pooled,
            rejected: result.is_rejected(i),
        })
        .collect();
    let text = match args.format {
        Format::Json => to_json(&OutlierReport {
            k_star: result.k_star,
            alpha: config.alpha(),
            epsilon: config.epsilon(),
            mode: args.mode,
            rho: args.rho,
            n_real: bundle.real_scores.len(),
            n_synth: bundle.synth_scores.len(),
            jitter_seed,
            rows,
        })?,
        Format::Csv => {
            let mut out = csv_text(
                &["id", "score", "p_real", "p_merged", "rejected"],
                rows.iter().map(|r| {
                    vec![
                        r.id.to_string(),
                        format_number(r.score),
                        format_number(r.p_real),
                        format_number(r.p_merged),
                        r.rejected.to_string(),
                    ]
                }),
            )?;
            out.push_str(&format!(
                "# k_star={},alpha={},epsilon={},mode={},rho={},n_real={},n_synth={}\n",
                result.k_star,
                format_number(config.alpha()),
                format_number(config.epsilon()),
                config.mode(),
                format_number(args.rho),
                bundle.real_scores.len(),
                bundle.synth_scores.len()
            ));
            out
        }
    };
    write_all(args.output.as_deref(), &text)
}

/// The given seed, or a fresh one from entropy reported on stderr.
pub(crate) fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let seed = rand::random::<u64>();
        eprintln!("seed: {seed}");
        seed
    })
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::invalid(format!("cannot serialize output: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub(crate) fn csv_text<I>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::csv(Path::new("<output>"), e);
    writer.write_record(header).map_err(fail)?;
    for row in rows {
        writer.write_record(&row).map_err(fail)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::invalid(format!("cannot write CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}
