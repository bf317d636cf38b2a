//! Arguments that are either inline JSON or a path to a JSON file.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use geoquant::io::{OperatorJson, StateJson};
use geoquant::{AlgebraBasis64, HermitianMatrix64, StatePoint64};
use serde::de::DeserializeOwned;

/// Inline when the argument opens a JSON array or object, else a file.
pub fn load_json<T: DeserializeOwned>(arg: &str, what: &str) -> Result<T> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        fs::read_to_string(Path::new(arg)).with_context(|| format!("reading {what} from `{arg}`"))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {what}"))
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum PointArg {
    Bare(Vec<f64>),
    Doc(StateJson),
}

/// A state point; a bare array is read as `Y` at the configured dimension.
pub fn load_point(arg: &str, basis: &AlgebraBasis64) -> Result<StatePoint64> {
    let doc = match load_json::<PointArg>(arg, "state point")? {
        PointArg::Bare(y) => StateJson {
            dim: basis.dim(),
            y: Some(y),
            rho: None,
        },
        PointArg::Doc(d) => d,
    };
    if doc.dim != basis.dim() {
        bail!("state point has dim {} but --dim is {}", doc.dim, basis.dim());
    }
    Ok(doc.to_point(basis)?)
}

pub fn load_operator(arg: &str, basis: &AlgebraBasis64) -> Result<HermitianMatrix64> {
    let op: OperatorJson = load_json(arg, "operator")?;
    Ok(op.to_hermitian(basis)?)
}
