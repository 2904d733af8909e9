use std::path::{Path, PathBuf};

use serde::Serialize;
use synthbh::{Mode, StepUpConfig};

use crate::args::{Format, ModeArg, OutlierArgs, TestArgs};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Test,
    Outliers,
    Simulate,
    Bench,
}

/// Everything a `test` or `outliers` run depends on, checked before any
/// computation starts.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: CommandKind,
    pub inputs: Vec<PathBuf>,
    pub alpha: f64,
    pub epsilon: f64,
    pub mode: ModeArg,
    pub weights_file: Option<PathBuf>,
    pub normalize_weights: bool,
    pub rho: Option<f64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunManifest {
    pub fn for_test(args: &TestArgs) -> Self {
        RunManifest {
            command: CommandKind::Test,
            inputs: vec![args.input.clone()],
            alpha: args.levels.alpha,
            epsilon: args.levels.epsilon,
            mode: args.mode,
            weights_file: args.weights_file.clone(),
            normalize_weights: args.normalize_weights,
            rho: None,
            seed: None,
            output: args.output.clone(),
            format: args.format,
        }
    }

    pub fn for_outliers(args: &OutlierArgs) -> Self {
        let inputs = [&args.scores, &args.real, &args.synth, &args.test]
            .into_iter()
            .flatten()
            .cloned()
            .collect();
        RunManifest {
            command: CommandKind::Outliers,
            inputs,
            alpha: args.levels.alpha,
            epsilon: args.levels.epsilon,
            mode: args.mode,
            weights_file: None,
            normalize_weights: false,
            rho: Some(args.rho),
            seed: args.seed,
            output: args.output.clone(),
            format: args.format,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for path in self.inputs.iter().chain(&self.weights_file) {
            check_readable(path)?;
        }
        self.step_up_config()?;
        if let Some(rho) = self.rho {
            if !(0.0..1.0).contains(&rho) {
                return Err(synthbh::Error::InvalidTrim(rho).into());
            }
        }
        Ok(())
    }

    pub fn step_up_config(&self) -> Result<StepUpConfig> {
        Ok(StepUpConfig::new(self.alpha, self.epsilon)?.with_mode(Mode::from(self.mode)))
    }
}

fn check_readable(path: &Path) -> Result<()> {
    let meta = std::fs::metadata(path).map_err(|e| CliError::io(path, e))?;
    if !meta.is_file() {
        return Err(CliError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidInput, "not a regular file"),
        ));
    }
    Ok(())
}
