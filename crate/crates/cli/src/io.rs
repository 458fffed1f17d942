use std::fs;
use std::path::Path;

use beam_bvp::boundary::{named_bc, BoundaryCondition, BoundaryConditionJson, NamedBc};
use beam_bvp::json::MatrixJson;
use beam_bvp::matrix_kit::{BeamParams, Mat4};
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] beam_bvp::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }

    fn kind(&self) -> String {
        match self {
            CliError::Usage(_) => "Usage".into(),
            CliError::Compute(e) => {
                let dbg = format!("{e:?}");
                dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
            }
        }
    }

    pub fn to_json(&self) -> String {
        let body = serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        body.to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn params(l: f64, alpha: f64, k: f64) -> CliResult<BeamParams> {
    BeamParams::new(l, alpha, k).map_err(|e| CliError::Usage(e.to_string()))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// A named condition (q, clamped, free, hinged) or a JSON file `{"M": ..., "name": ...}`.
pub fn boundary_condition(arg: &str, p: &BeamParams) -> CliResult<BoundaryCondition> {
    if let Ok(name) = arg.parse::<NamedBc>() {
        return Ok(named_bc(name, p));
    }
    let j: BoundaryConditionJson = read_json(Path::new(arg))?;
    BoundaryCondition::try_from(j).map_err(|e| CliError::Usage(format!("{arg}: {e}")))
}

pub fn matrix4(path: &Path) -> CliResult<Mat4> {
    let j: MatrixJson = read_json(path)?;
    j.to_mat4().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn input<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    read_json(path)
}

pub fn emit<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))
}

/// Rows of `n,lambda,k_lambda,residual`.
pub fn csv(rows: &[(usize, f64, f64, f64)]) -> String {
    let mut out = String::from("n,lambda,k_lambda,residual\n");
    for (n, lam, kl, r) in rows {
        out.push_str(&format!("{n},{lam:e},{kl:e},{r:e}\n"));
    }
    out
}
