//! CSV ingestion and result serialization.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use csv::StringRecord;

use crate::error::{CliError, Result};

/// `%.17g`-style formatting: 17 significant digits, trailing zeros trimmed.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exponent) = sci.split_once('e').expect("scientific notation");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };
    if !(-5..17).contains(&exponent) {
        let (lead, rest) = digits.split_at(1);
        let rest = rest.trim_end_matches('0');
        return if rest.is_empty() {
            format!("{sign}{lead}e{exponent}")
        } else {
            format!("{sign}{lead}.{rest}e{exponent}")
        };
    }
    let (int_part, frac_part) = if exponent < 0 {
        let zeros = "0".repeat((-exponent - 1) as usize);
        ("0".to_string(), format!("{zeros}{digits}"))
    } else {
        let split = exponent as usize + 1;
        (digits[..split].to_string(), digits[split..].to_string())
    };
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// A headered CSV file held in memory.
pub(crate) struct Table {
    path: PathBuf,
    headers: Vec<String>,
    rows: Vec<StringRecord>,
}

impl Table {
    pub(crate) fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(file);
        let headers = reader
            .headers()
            .map_err(|e| CliError::csv(path, e))?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = reader
            .records()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| CliError::csv(path, e))?;
        Ok(Table {
            path: path.to_path_buf(),
            headers,
            rows,
        })
    }

    pub(crate) fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub(crate) fn require(&self, name: &str) -> Result<usize> {
        self.column(name).ok_or_else(|| {
            CliError::invalid(format!(
                "{}: missing required column `{name}` (found: {})",
                self.path.display(),
                self.headers.join(",")
            ))
        })
    }

    pub(crate) fn rows(&self) -> &[StringRecord] {
        &self.rows
    }

    pub(crate) fn field<'a>(&self, row: &'a StringRecord, column: usize) -> &'a str {
        row.get(column).unwrap_or("")
    }

    fn location(&self, row: &StringRecord, index: usize, column: usize) -> String {
        let line = row
            .position()
            .map(|p| p.line().to_string())
            .unwrap_or_else(|| "?".to_string());
        format!(
            "{}: row {} (line {line}), column `{}`",
            self.path.display(),
            index + 1,
            self.headers[column]
        )
    }

    pub(crate) fn number(&self, index: usize, column: usize) -> Result<f64> {
        let row = &self.rows[index];
        let raw = self.field(row, column);
        let value: f64 = raw.parse().map_err(|_| {
            CliError::invalid(format!(
                "{}: cannot parse `{raw}` as a number",
                self.location(row, index, column)
            ))
        })?;
        if !value.is_finite() {
            return Err(CliError::invalid(format!(
                "{}: `{raw}` is not a finite number",
                self.location(row, index, column)
            )));
        }
        Ok(value)
    }

    pub(crate) fn probability(&self, index: usize, column: usize) -> Result<f64> {
        let value = self.number(index, column)?;
        if !(0.0..=1.0).contains(&value) {
            return Err(CliError::invalid(format!(
                "{}: {value} is not a probability in [0, 1]",
                self.location(&self.rows[index], index, column)
            )));
        }
        Ok(value)
    }
}

/// One hypothesis of a `test` input file.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueRow {
    pub id: String,
    pub p_real: f64,
    pub p_synth: f64,
    pub weight: Option<f64>,
}

/// Reads `id,p_real,p_synth[,weight]`.
pub fn read_pvalue_file(path: &Path) -> Result<Vec<PValueRow>> {
    let table = Table::read(path)?;
    let id = table.require("id")?;
    let p_real = table.require("p_real")?;
    let p_synth = table.require("p_synth")?;
    let weight = table.column("weight");
    let rows = (0..table.rows().len())
        .map(|i| {
            Ok(PValueRow {
                id: table.field(&table.rows()[i], id).to_string(),
                p_real: table.probability(i, p_real)?,
                p_synth: table.probability(i, p_synth)?,
                weight: weight.map(|w| table.number(i, w)).transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(CliError::invalid(format!(
            "{}: no hypotheses",
            path.display()
        )));
    }
    Ok(rows)
}

/// Reads a `weight` column, checking an optional `id` column against `ids`.
pub fn read_weights_file(path: &Path, ids: &[String]) -> Result<Vec<f64>> {
    let table = Table::read(path)?;
    let weight = table.require("weight")?;
    let id = table.column("id");
    if table.rows().len() != ids.len() {
        return Err(CliError::invalid(format!(
            "{}: {} weights for {} hypotheses",
            path.display(),
            table.rows().len(),
            ids.len()
        )));
    }
    (0..ids.len())
        .map(|i| {
            if let Some(col) = id {
                let got = table.field(&table.rows()[i], col);
                if got != ids[i] {
                    return Err(CliError::invalid(format!(
                        "{}: row {} has id `{got}`, expected `{}`",
                        path.display(),
                        i + 1,
                        ids[i]
                    )));
                }
            }
            table.number(i, weight)
        })
        .collect()
}

/// Reads a `score` column.
pub fn read_score_column(path: &Path) -> Result<Vec<f64>> {
    let table = Table::read(path)?;
    let score = table.require("score")?;
    (0..table.rows().len())
        .map(|i| table.number(i, score))
        .collect()
}

/// Scores grouped by role from a `role,score` file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RoleScores {
    pub real: Vec<f64>,
    pub synth: Vec<f64>,
    pub test: Vec<f64>,
}

pub fn read_role_scores(path: &Path) -> Result<RoleScores> {
    let table = Table::read(path)?;
    let role = table.require("role")?;
    let score = table.require("score")?;
    let mut out = RoleScores::default();
    for i in 0..table.rows().len() {
        let value = table.number(i, score)?;
        match table.field(&table.rows()[i], role) {
            "real" => out.real.push(value),
            "synth" => out.synth.push(value),
            "test" => out.test.push(value),
            other => {
                return Err(CliError::invalid(format!(
                    "{}: row {}: unknown role `{other}` (expected real, synth or test)",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

/// One row of a `test` results file.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub id: String,
    pub p_real: f64,
    pub p_synth: f64,
    pub v: f64,
    pub rejected: bool,
}

/// Reads back the CSV written by `synthbh test`.
pub fn read_test_results(path: &Path) -> Result<Vec<ResultRow>> {
    let table = Table::read(path)?;
    let cols = ["id", "p_real", "p_synth", "v", "rejected"]
        .map(|name| table.require(name))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    (0..table.rows().len())
        .map(|i| {
            let row = &table.rows()[i];
            let rejected = match table.field(row, cols[4]) {
                "true" => true,
                "false" => false,
                other => {
                    return Err(CliError::invalid(format!(
                        "{}: row {}: `{other}` is not a boolean",
                        path.display(),
                        i + 1
                    )))
                }
            };
            Ok(ResultRow {
                id: table.field(row, cols[0]).to_string(),
                p_real: table.number(i, cols[1])?,
                p_synth: table.number(i, cols[2])?,
                v: table.number(i, cols[3])?,
                rejected,
            })
        })
        .collect()
}

/// Destination for command output: a file, or stdout when no path is given.
pub(crate) fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

pub(crate) fn write_all(path: Option<&Path>, contents: &str) -> Result<()> {
    let label = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    let mut out = open_output(path)?;
    out.write_all(contents.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| CliError::io(label, e))
}
