use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;

use anyhow::{anyhow, bail, Context};
use serde::Serialize;

use geoquant::io::{real_rows, BasisJson, BivectorJson};
use geoquant::observable::DEFAULT_TOLERANCE;
use geoquant::verify::{run_verification, CheckStatus, VerificationReport, VerifyConfig};
use geoquant::{
    build_basis, expectation_field, g_field, integrate, is_observable, lambda_field, pushforward, AlgebraBasis64,
    Chart, IdentityChart, PolynomialChart, PolynomialChartSpec, PolynomialField, PolynomialFieldSpec, ScalarField,
};

use crate::input::{load_json, load_operator, load_point};
use crate::{ChartArgs, Failure, FlowArgs, Format, ObservableArgs, RunConfig, TensorKind, TensorsArgs, VerifyArgs};

type Outcome = Result<(), Failure>;

fn emit(config: &RunConfig, text: &str) -> anyhow::Result<()> {
    match &config.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn basis(config: &RunConfig) -> anyhow::Result<AlgebraBasis64> {
    Ok(build_basis::<f64>(config.dim)?)
}

fn json_only(config: &RunConfig, command: &str) -> anyhow::Result<()> {
    if config.format == Some(Format::Csv) {
        bail!("`{command}` has no csv output");
    }
    Ok(())
}

fn no_tolerances(config: &RunConfig, command: &str) -> anyhow::Result<()> {
    if !config.tolerances.is_empty() || config.tolerance.is_some() {
        bail!("`{command}` takes no --tol");
    }
    Ok(())
}

/// Bloch vector `x_k = 2 Y_k`, reported alongside `Y` for qubits.
fn bloch(dim: usize, y: &[f64]) -> Option<[f64; 3]> {
    (dim == 2).then(|| [2.0 * y[1], 2.0 * y[2], 2.0 * y[3]])
}

pub fn algebra(config: &RunConfig) -> Outcome {
    json_only(config, "algebra")?;
    no_tolerances(config, "algebra")?;
    let b = basis(config)?;
    eprintln!(
        "dim {}: {} elements, orthonormality residual {:e}",
        b.dim(),
        b.size(),
        b.orthonormality_residual()
    );
    emit(config, &to_json(&BasisJson::from_basis(&b))?)?;
    Ok(())
}

fn verify_csv(report: &VerificationReport) -> String {
    let mut s = String::from("name,module,trials,max_residual,tolerance,status,wall_time_ms\n");
    for c in &report.checks {
        let status = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        };
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            c.name,
            c.module,
            c.trials,
            opt(c.max_residual),
            c.tolerance,
            status,
            opt(c.wall_time_ms)
        );
    }
    s
}

pub fn verify(config: &RunConfig, args: &VerifyArgs) -> Outcome {
    if config.tolerance.is_some() {
        return Err(anyhow!("`verify` tolerances must be named: --tol <check>=<value>").into());
    }
    let mut vc = VerifyConfig::new(config.dim, config.seed);
    vc.tolerances = config.tolerances.clone();
    vc.timing = args.timing;
    let report = run_verification(&vc)?;
    for c in &report.checks {
        let residual = c.max_residual.map(|r| format!("{r:.3e}")).unwrap_or_else(|| "-".into());
        eprintln!(
            "{:<8} {:<32} residual {:>10}  tol {:.1e}",
            format!("{:?}", c.status).to_uppercase(),
            c.name,
            residual,
            c.tolerance
        );
    }
    let text = match config.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report)?,
        Format::Csv => verify_csv(&report),
    };
    emit(config, &text)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

#[derive(Serialize)]
struct TensorsOut {
    dim: usize,
    #[serde(rename = "Y")]
    y: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<[f64; 3]>,
    lambda: Vec<Vec<f64>>,
    g: Vec<Vec<f64>>,
}

pub fn tensors(config: &RunConfig, args: &TensorsArgs) -> Outcome {
    no_tolerances(config, "tensors")?;
    let b = basis(config)?;
    let p = load_point(&args.point, &b)?;
    p.to_density(&b).context("--point is not a density matrix")?;
    let y = p.coords();
    let out = TensorsOut {
        dim: b.dim(),
        y: y.to_vec(),
        x: bloch(b.dim(), y),
        lambda: real_rows(&lambda_field(&b).components(y)),
        g: real_rows(&g_field(&b).components(y)),
    };
    let text = match config.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&out)?,
        Format::Csv => {
            let mut s = String::from("tensor,mu,nu,value\n");
            for (name, m) in [("lambda", &out.lambda), ("g", &out.g)] {
                for (mu, row) in m.iter().enumerate() {
                    for (nu, v) in row.iter().enumerate() {
                        let _ = writeln!(s, "{name},{mu},{nu},{v}");
                    }
                }
            }
            s
        }
    };
    emit(config, &text)?;
    Ok(())
}

#[derive(Serialize)]
struct FlowOut {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

pub fn flow(config: &RunConfig, args: &FlowArgs) -> Outcome {
    no_tolerances(config, "flow")?;
    if !(args.hbar > 0.0) || !args.hbar.is_finite() {
        return Err(anyhow!("--hbar must be positive").into());
    }
    let b = basis(config)?;
    let h = load_operator(&args.hamiltonian, &b)?.scale(1.0 / args.hbar);
    let y0 = load_point(&args.point, &b)?;
    let observables = args
        .observable
        .iter()
        .map(|o| Ok(expectation_field(&load_operator(o, &b)?, &b)?))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let traj = integrate(&h, &y0, args.t_final, args.dt, &b)?;
    let report = traj.conservation(&h, &b)?;
    eprintln!(
        "{} steps; drift: energy {:.3e}, purity {:.3e}, Y_0 {:.3e}; min eigenvalue {:.3e}",
        traj.len() - 1,
        report.energy_drift * args.hbar,
        report.purity_drift,
        report.trace_coordinate_drift,
        report.min_eigenvalue
    );

    let m = b.size();
    let mut columns = vec!["t".to_string()];
    columns.extend((0..m).map(|mu| format!("Y_{mu}")));
    if b.dim() == 2 {
        columns.extend((1..=3).map(|k| format!("x_{k}")));
    }
    columns.extend((1..=observables.len()).map(|i| format!("e_A{i}")));
    let rows: Vec<Vec<f64>> = traj
        .times()
        .iter()
        .zip(traj.points())
        .map(|(t, p)| {
            let y = p.coords();
            let mut row = vec![*t];
            row.extend_from_slice(y);
            if let Some(x) = bloch(b.dim(), y) {
                row.extend_from_slice(&x);
            }
            row.extend(observables.iter().map(|e| e.value(y)));
            row
        })
        .collect();

    let text = match config.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&FlowOut { columns, rows })?,
        Format::Csv => {
            let mut s = columns.join(",");
            s.push('\n');
            for row in &rows {
                let line: Vec<String> = row.iter().map(f64::to_string).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
            s
        }
    };
    emit(config, &text)?;
    Ok(())
}

#[derive(Serialize)]
struct ObservableOut {
    observable: bool,
    tolerance: f64,
    samples: usize,
    seed: u64,
    max_residual: f64,
    residuals: Vec<f64>,
    sample_points: Vec<Vec<f64>>,
    components: Vec<Vec<Vec<f64>>>,
}

pub fn observable(config: &RunConfig, args: &ObservableArgs) -> Outcome {
    json_only(config, "observable")?;
    let mut tol = config.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    for (name, v) in &config.tolerances {
        if name != "observable" {
            return Err(anyhow!("`observable` knows only the tolerance `observable`, got `{name}`").into());
        }
        tol = *v;
    }
    let b = basis(config)?;
    let spec: PolynomialFieldSpec<f64> = load_json(&args.field, "field spec")?;
    let field = PolynomialField::from_spec(&spec)?;
    let (ok, report) = is_observable(&field, &b, args.samples, tol, config.seed)?;
    let out = ObservableOut {
        observable: ok,
        tolerance: tol,
        samples: args.samples,
        seed: config.seed,
        max_residual: report.max_residual,
        residuals: report.residuals.clone(),
        sample_points: report.sample_points.iter().map(|p| p.coords().to_vec()).collect(),
        components: report.components.iter().map(real_rows).collect(),
    };
    eprintln!(
        "{}: max residual {:.3e} over {} samples (tol {:.1e})",
        if ok { "observable" } else { "not observable" },
        report.max_residual,
        args.samples,
        tol
    );
    emit(config, &to_json(&out)?)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

pub fn chart(config: &RunConfig, args: &ChartArgs) -> Outcome {
    no_tolerances(config, "chart")?;
    let b = basis(config)?;
    let p = load_point(&args.point, &b)?;
    let tensor = match args.tensor {
        TensorKind::Lambda => lambda_field(&b),
        TensorKind::G => g_field(&b),
    };
    let chart: Box<dyn Chart<f64>> = match args.chart.as_str() {
        "spherical" => {
            if b.dim() != 2 {
                return Err(anyhow!("the spherical chart needs --dim 2").into());
            }
            Box::new(geoquant::spherical_chart())
        }
        "identity" => Box::new(IdentityChart::new(b.size())),
        path => {
            let spec: PolynomialChartSpec<f64> = load_json(path, "chart spec")?;
            Box::new(PolynomialChart::from_spec(&spec)?)
        }
    };
    let pushed = pushforward(&tensor, chart.as_ref(), &p)?;
    let out = BivectorJson::from_bivector(&pushed);
    let text = match config.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&out)?,
        Format::Csv => {
            let mut s = String::from("a,b,value\n");
            for (i, row) in out.components.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let _ = writeln!(s, "{},{},{v}", out.coordinates[i], out.coordinates[j]);
                }
            }
            s
        }
    };
    emit(config, &text)?;
    Ok(())
}
