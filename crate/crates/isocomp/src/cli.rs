//! `isocomp` subcommands.
//!
//! Exit codes: 0 when every verification passes, 1 when one fails (the
//! report is still written), 2 on usage or input errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isocomp_core::barriers::{barrier_bounds, barrier_rigidity_check, RIGIDITY_TOL};
use isocomp_core::comparison::{
    cos_sin_k, jacobian, model_ball_volume, model_sphere_area, s_lambda, sn, unit_ball_volume,
};
use isocomp_core::epsreg::{cone_consistency_check, delta_for_epsilon, euclidean_constant, radius_cap, volume_lower_bound};
use isocomp_core::numeric::{linspace, log_grid};
use isocomp_core::profile::{
    asymptotics, check_concavity_and_monotonicity, check_sharp_inequality, check_viscosity_inequality_with,
    model_profile, FdCoordinates,
};
use isocomp_core::rearrangement::{monotone_rearrangement, p_eigenvalue_radial, ModelSpectrum, SolverOptions};
use isocomp_core::{ModelSpace, VerificationReport};
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::{load_curve, load_sampled, write_csv, CurveMeta, ProfileFile};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "isocomp", version, about = "Isoperimetric profiles and comparison checks on model spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Output {
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Function {
    Sn,
    CosK,
    SinK,
    SLambda,
    Jacobian,
    BallVolume,
    SphereArea,
    UnitBallVolume,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a comparison function on a radius grid.
    Eval {
        #[arg(long, value_enum)]
        function: Function,
        /// Curvature passed to the function: sectional for every function
        /// but `jacobian`, which takes the Ricci bound.
        #[arg(long = "K", default_value_t = 0.0, allow_hyphen_values = true)]
        k: f64,
        #[arg(long = "N", default_value_t = 2.0)]
        n: f64,
        /// `λ` for `s-lambda`, `H` for `jacobian`.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda: f64,
        /// Radii (comma separated); overrides the linear grid.
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        rmin: f64,
        #[arg(long, default_value_t = 1.0)]
        rmax: f64,
        #[arg(long, default_value_t = 11)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Sample the profile of a model space on a geometric volume grid.
    Profile {
        /// Space as JSON, e.g. '{"type":"cone","theta":0.5,"dim":2}'.
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 1e-3)]
        vmin: f64,
        #[arg(long, default_value_t = 1e3)]
        vmax: f64,
        #[arg(long, default_value_t = 121)]
        samples: usize,
        /// Allocations per part when splitting volume across a union.
        #[arg(long, default_value_t = 400)]
        split_grid: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Run the profile checks on a sampled curve.
    Verify {
        /// `v,I` CSV or profile JSON.
        #[arg(long)]
        curve: PathBuf,
        #[arg(long = "N")]
        n: Option<f64>,
        #[arg(long = "K", allow_hyphen_values = true)]
        k: Option<f64>,
        /// Asymptotic volume ratio; enables the sharp inequality check.
        #[arg(long)]
        avr: Option<f64>,
        #[arg(long)]
        v0: Option<f64>,
        #[arg(long)]
        total_mass: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Finite-difference coordinates of the viscosity check.
        #[arg(long, value_enum, default_value_t = Coords::Auto)]
        coords: Coords,
        #[command(flatten)]
        output: Output,
    },
    /// Barrier certificate interval and rigidity.
    Barriers {
        #[arg(long = "N")]
        n: f64,
        #[arg(long)]
        perimeter: f64,
        #[arg(long)]
        volume: f64,
        #[arg(long)]
        avr: Option<f64>,
        /// Barrier value; defaults to the lower end of the interval.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = RIGIDITY_TOL)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Monotone rearrangement of a `node,value,weight` CSV.
    Rearrange {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "N")]
        n: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Model p-eigenvalue and the spectral comparison.
    Spectral {
        #[arg(long = "N")]
        n: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Volume of the domain.
        #[arg(long)]
        v: f64,
        #[arg(long, default_value_t = 1.0)]
        avr: f64,
        /// Eigenvalue to compare; defaults to the tip ball of volume `v` in
        /// the cone of opening `--theta`.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        /// Profile of the ambient space (CSV needs `--N`).
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        grid_points: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// δ ↔ ε table of the volume lower bound.
    Epsreg {
        #[arg(long = "N")]
        n: f64,
        #[arg(long = "K", default_value_t = 0.0, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, value_delimiter = ',')]
        epsilon: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        delta: Vec<f64>,
        /// Volume up to which the profile bound holds.
        #[arg(long, default_value_t = 1.0)]
        v: f64,
        /// Radius; defaults to the largest admissible one.
        #[arg(long)]
        r: Option<f64>,
        /// Also run the cone consistency check at this opening.
        #[arg(long)]
        theta: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Coords {
    Linear,
    LogLog,
    Auto,
}

impl From<Coords> for FdCoordinates {
    fn from(c: Coords) -> Self {
        match c {
            Coords::Linear => FdCoordinates::Linear,
            Coords::LogLog => FdCoordinates::LogLog,
            Coords::Auto => FdCoordinates::Auto,
        }
    }
}

enum Payload {
    Table { header: Vec<&'static str>, rows: Vec<Vec<f64>> },
    Json(Value),
}

struct Outcome {
    payload: Payload,
    pass: bool,
}

impl Outcome {
    fn ok(payload: Payload) -> Self {
        Outcome { payload, pass: true }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Output goes to stdout or `--out`; diagnostics to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit streams.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let (outcome, output) = match command {
        Command::Eval {
            function,
            k,
            n,
            lambda,
            r,
            rmin,
            rmax,
            samples,
            output,
        } => (eval(function, k, n, lambda, r, rmin, rmax, samples)?, output),
        Command::Profile {
            space,
            vmin,
            vmax,
            samples,
            split_grid,
            output,
        } => (profile(&space, vmin, vmax, samples, split_grid, output.format)?, output),
        Command::Verify {
            curve,
            n,
            k,
            avr,
            v0,
            total_mass,
            tol,
            coords,
            output,
        } => {
            let meta = CurveMeta { n, k, v0, avr, total_mass };
            (verify(&curve, meta, tol, coords.into())?, output)
        }
        Command::Barriers {
            n,
            perimeter,
            volume,
            avr,
            c,
            tol,
            output,
        } => (barriers(n, perimeter, volume, avr, c, tol)?, output),
        Command::Rearrange { input, n, output } => (rearrange(&input, n, output.format)?, output),
        Command::Spectral {
            n,
            p,
            v,
            avr,
            lambda,
            theta,
            curve,
            grid_points,
            tol,
            output,
        } => (
            spectral(n, p, v, avr, lambda, theta, curve, grid_points, tol)?,
            output,
        ),
        Command::Epsreg {
            n,
            k,
            epsilon,
            delta,
            v,
            r,
            theta,
            output,
        } => (epsreg(n, k, epsilon, delta, v, r, theta)?, output),
    };
    // tables default to CSV, reports to JSON
    let format = output.format.unwrap_or(match outcome.payload {
        Payload::Table { .. } => Format::Csv,
        Payload::Json(_) => Format::Json,
    });
    match &output.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
            let mut w = BufWriter::new(file);
            emit(&outcome.payload, format, &mut w)?;
            w.flush()?;
        }
        None => emit(&outcome.payload, format, stdout)?,
    }
    Ok(outcome.pass)
}

fn emit(payload: &Payload, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match (payload, format) {
        (Payload::Table { header, rows }, Format::Csv) => write_csv(out, header, rows),
        (Payload::Table { header, rows }, Format::Json) => {
            let records: Vec<Value> = rows
                .iter()
                .map(|row| Value::Object(header.iter().map(|h| h.to_string()).zip(row.iter().map(|&x| json!(x))).collect()))
                .collect();
            write_json(out, &records)
        }
        (Payload::Json(v), Format::Json) => write_json(out, v),
        (Payload::Json(_), Format::Csv) => Err(CliError::Usage("this command only writes JSON".into())),
    }
}

fn write_json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn eval(
    function: Function,
    k: f64,
    n: f64,
    lambda: f64,
    r: Vec<f64>,
    rmin: f64,
    rmax: f64,
    samples: usize,
) -> Result<Outcome, CliError> {
    let radii = if r.is_empty() {
        if samples < 2 || !(rmax > rmin) {
            return Err(CliError::Usage("need --rmax > --rmin and --samples >= 2".into()));
        }
        linspace(rmin, rmax, samples)
    } else {
        r
    };
    let mut rows = Vec::with_capacity(radii.len());
    for x in radii {
        let value = match function {
            Function::Sn => sn(k, x),
            Function::CosK => cos_sin_k(k, x).0,
            Function::SinK => cos_sin_k(k, x).1,
            Function::SLambda => s_lambda(k, lambda, x).value,
            Function::Jacobian => jacobian(lambda, k, n, x)?,
            Function::BallVolume => model_ball_volume(n, k, x)?,
            Function::SphereArea => model_sphere_area(n, k, x)?,
            Function::UnitBallVolume => unit_ball_volume(n),
        };
        rows.push(vec![x, value]);
    }
    Ok(Outcome::ok(Payload::Table {
        header: vec!["r", "value"],
        rows,
    }))
}

fn profile(space: &str, vmin: f64, vmax: f64, samples: usize, split_grid: usize, format: Option<Format>) -> Result<Outcome, CliError> {
    let space: ModelSpace = serde_json::from_str(space)?;
    if !(vmin > 0.0 && vmax > vmin) || samples < 2 {
        return Err(CliError::Usage("need 0 < --vmin < --vmax and --samples >= 2".into()));
    }
    let grid = log_grid(vmin, vmax, samples);
    let curve = model_profile(&space, &grid, split_grid)?;
    let file = ProfileFile::from_curve(&curve, &grid);
    let payload = if format == Some(Format::Json) {
        Payload::Json(serde_json::to_value(&file)?)
    } else {
        Payload::Table {
            header: vec!["v", "I"],
            rows: file.grid.iter().zip(&file.values).map(|(&v, &i)| vec![v, i]).collect(),
        }
    };
    Ok(Outcome::ok(payload))
}

fn verify(path: &std::path::Path, meta: CurveMeta, tol: f64, coords: FdCoordinates) -> Result<Outcome, CliError> {
    let curve = load_curve(path, meta)?;
    let mut reports: Vec<VerificationReport> = Vec::new();
    let mut skipped: Vec<String> = Vec::new();
    match meta.avr {
        Some(avr) if curve.k == 0.0 => reports.push(check_sharp_inequality(&curve, avr, tol)?),
        Some(_) => skipped.push("sharp_isoperimetric: needs K = 0".into()),
        None => skipped.push("sharp_isoperimetric: needs --avr".into()),
    }
    reports.push(check_viscosity_inequality_with(&curve, tol, coords)?);
    if curve.k >= 0.0 {
        reports.push(check_concavity_and_monotonicity(&curve)?);
    } else {
        skipped.push("concavity_monotonicity: needs K >= 0".into());
    }
    let asym = match asymptotics(&curve) {
        Ok(a) => serde_json::to_value(a)?,
        Err(e) => {
            skipped.push(format!("asymptotics: {e}"));
            Value::Null
        }
    };
    let pass = reports.iter().all(|r| r.pass);
    let value = json!({
        "pass": pass,
        "tol": tol,
        "N": curve.n,
        "K": curve.k,
        "avr": meta.avr,
        "reports": reports,
        "asymptotics": asym,
        "skipped": skipped,
    });
    Ok(Outcome {
        payload: Payload::Json(value),
        pass,
    })
}

fn barriers(n: f64, perimeter: f64, volume: f64, avr: Option<f64>, c: Option<f64>, tol: f64) -> Result<Outcome, CliError> {
    let mut cert = barrier_bounds(n, perimeter, volume, avr)?;
    if let Some(c) = c {
        cert = cert.with_barrier(c);
    }
    let (consistent, rigid, reason) = match barrier_rigidity_check(&cert, tol) {
        Ok(r) => (true, r, None),
        Err(isocomp_core::Error::InconsistentCertificate(why)) => (false, false, Some(why)),
        Err(e) => return Err(e.into()),
    };
    let value = json!({
        "pass": consistent,
        "tol": tol,
        "certificate": cert,
        "consistent": consistent,
        "rigid": rigid,
        "reason": reason,
    });
    Ok(Outcome {
        payload: Payload::Json(value),
        pass: consistent,
    })
}

fn rearrange(path: &std::path::Path, n: f64, format: Option<Format>) -> Result<Outcome, CliError> {
    let u = load_sampled(path, n)?;
    let star = monotone_rearrangement(&u)?;
    let payload = if format == Some(Format::Json) {
        Payload::Json(serde_json::to_value(&star)?)
    } else {
        Payload::Table {
            header: vec!["x", "u_star"],
            rows: star.rows().into_iter().map(|(x, y)| vec![x, y]).collect(),
        }
    };
    Ok(Outcome::ok(payload))
}

#[allow(clippy::too_many_arguments)]
fn spectral(
    n: f64,
    p: f64,
    v: f64,
    avr: f64,
    lambda: Option<f64>,
    theta: Option<f64>,
    curve: Option<PathBuf>,
    grid_points: usize,
    tol: f64,
) -> Result<Outcome, CliError> {
    let options = SolverOptions {
        grid_points,
        ..SolverOptions::default()
    };
    let mut spectrum = ModelSpectrum::new(options);
    let constant = spectrum.constant(n, p)?;
    let model = spectrum.eigenvalue(n, p, v)?;
    let (lambda, source) = match lambda {
        Some(l) => (l, "given".to_string()),
        None => {
            let theta = theta.unwrap_or(avr);
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(CliError::Usage(format!("--theta must lie in (0, 1], got {theta}")));
            }
            let radius = (v / (theta * unit_ball_volume(n))).powf(1.0 / n);
            let sol = p_eigenvalue_radial(n, p, radius, theta, &options)?;
            (sol.lambda, format!("tip ball of the cone with theta = {theta}"))
        }
    };
    let profile = match curve {
        Some(path) => Some(load_curve(
            &path,
            CurveMeta {
                n: Some(n),
                avr: Some(avr),
                ..CurveMeta::default()
            },
        )?),
        None => None,
    };
    let report = spectrum.spectral_comparison(lambda, n, avr, v, p, profile.as_ref(), tol)?;
    let pass = report.pass;
    let value = json!({
        "pass": pass,
        "tol": tol,
        "N": n,
        "p": p,
        "v": v,
        "avr": avr,
        "lambda": lambda,
        "lambda_source": source,
        "model_constant": constant,
        "model_eigenvalue": model,
        "rigid": report.rigid(),
        "report": report,
        "solver": options,
    });
    Ok(Outcome {
        payload: Payload::Json(value),
        pass,
    })
}

fn epsreg(
    n: f64,
    k: f64,
    epsilon: Vec<f64>,
    delta: Vec<f64>,
    v: f64,
    r: Option<f64>,
    theta: Option<f64>,
) -> Result<Outcome, CliError> {
    // (requested ε, δ); ε is read back from the bound when only δ is given
    let mut pairs: Vec<(Option<f64>, f64)> = delta.into_iter().map(|d| (None, d)).collect();
    let defaults = [0.01, 0.05, 0.1, 0.2, 0.3, 0.5];
    let eps = if epsilon.is_empty() && pairs.is_empty() { defaults.to_vec() } else { epsilon };
    for e in eps {
        pairs.push((Some(e), delta_for_epsilon(e, n)?));
    }
    let radius = r.unwrap_or_else(|| radius_cap(n, v));
    let mut rows = Vec::with_capacity(pairs.len());
    for (e, d) in pairs {
        let b = volume_lower_bound(k, d, n, v, radius)?;
        rows.push(vec![e.unwrap_or(1.0 - b.ratio_bound), d, b.ratio_bound, b.radius_cap]);
    }
    let header = vec!["epsilon", "delta", "ratio_bound", "radius_cap"];
    let Some(theta) = theta else {
        return Ok(Outcome::ok(Payload::Table { header, rows }));
    };
    let report = cone_consistency_check(theta, n)?;
    let pass = report.pass;
    let table: Vec<Value> = rows
        .iter()
        .map(|row| Value::Object(header.iter().map(|h| h.to_string()).zip(row.iter().map(|&x| json!(x))).collect()))
        .collect();
    let value = json!({
        "pass": pass,
        "tol": report.tol,
        "N": n,
        "euclidean_constant": euclidean_constant(n),
        "table": table,
        "cone_consistency": report,
    });
    Ok(Outcome {
        payload: Payload::Json(value),
        pass,
    })
}
