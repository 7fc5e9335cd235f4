//! Command-line front end: `coeffs`, `estimate`, `diagnose` and `perron`.

use crate::admissibility::{self, default_delta, product, Classification, Grid, OffsetFn, Witness, WitnessSource};
use crate::catalog::{self, CatalogEntry};
use crate::error::{Error, Result};
use crate::io::{read_coefficients, write_coefficients};
use crate::perron::{perron_hat, ContourSpec};
use crate::saddlepoint::{estimate_f, rv_ratio_check, solve_saddle, EstimateReport, RvRatio, SaddleSolution};
use crate::series::{dirichlet_log, Series};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::sync::Arc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SPEC: i32 = 2;
pub const EXIT_RANGE: i32 = 3;
pub const EXIT_SADDLE: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;
pub const EXIT_PERRON: i32 = 6;

/// Grid depth used when neither `--sigma-grid` nor a catalog entry supplies one.
pub const DEFAULT_GRID: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "dsaddle", version, about = "Saddle-point estimates and admissibility diagnostics for Dirichlet series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the coefficients f(1..N) (or h = log F with --log) as an "n value" file.
    Coeffs(CoeffsArgs),
    /// Saddle-point estimates of F-hat(x) and F(x) against exact sums.
    Estimate(EstimateArgs),
    /// Admissibility diagnostics as a JSON report.
    Diagnose(DiagnoseArgs),
    /// Perron contour integral for F-hat(x).
    Perron(PerronArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Catalog key, e.g. exp_zeta, exp_geom:2, zeta_pow:2, fg:2^1,3^2.
    #[arg(value_name = "SERIES")]
    key: Option<String>,
    /// Catalog key (same as the positional argument).
    #[arg(long = "series")]
    series: Option<String>,
    /// Coefficient file instead of a catalog key.
    #[arg(long = "coeff-file")]
    coeff_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Sizing {
    /// Abscissa for a coefficient file without an alpha header.
    #[arg(long)]
    alpha: Option<f64>,
    /// Truncation N for generated coefficients.
    #[arg(long = "N")]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    sizing: Sizing,
    /// Emit h = log F instead of f.
    #[arg(long)]
    log: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    sizing: Sizing,
    /// Values of x (repeatable).
    #[arg(long = "x", num_args = 1.., value_delimiter = ',')]
    x: Vec<f64>,
    /// Decades "lo:hi": x = 10^lo, ..., 10^hi.
    #[arg(long = "x-decades")]
    x_decades: Option<String>,
    /// Residual tolerance of the saddle solver.
    #[arg(long, default_value_t = crate::saddlepoint::DEFAULT_TOL)]
    tol: f64,
    /// Add F-hat(xy)/F-hat(x) columns, e.g. --rv 2 or --rv y=2.
    #[arg(long)]
    rv: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    sizing: Sizing,
    /// Second catalog key: diagnose the product with delta = min(delta_1, delta_2).
    #[arg(long)]
    product: Option<String>,
    /// Grid depth K: sigma_k = alpha + (beta - alpha) 2^-k, k = 0..=K.
    #[arg(long = "sigma-grid")]
    sigma_grid: Option<usize>,
    /// "default" for |b c|^(-1/5), or a file of "sigma-alpha delta" lines.
    #[arg(long)]
    delta: Option<String>,
    /// "b" for T(sigma) = b(sigma), or a file of "sigma-alpha T" lines.
    #[arg(long = "T")]
    t: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct PerronArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    sizing: Sizing,
    #[arg(long = "x", num_args = 1.., value_delimiter = ',', required = true)]
    x: Vec<f64>,
    /// Contour abscissa (default alpha + 0.5).
    #[arg(long)]
    c: Option<f64>,
    /// Initial truncation height.
    #[arg(long = "T", default_value_t = 64.0)]
    t: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Range(_) | Error::OutOfRange { .. } => EXIT_RANGE,
        Error::NoSaddle { .. } => EXIT_SADDLE,
        Error::Convergence(_) => EXIT_PERRON,
        _ => EXIT_SPEC,
    }
}

/// Parsed series: the catalog entry when there is one.
struct Loaded {
    series: Series,
    entry: Option<CatalogEntry>,
    description: String,
}

fn load(src: &Source, sizing: &Sizing, need_coeffs: bool) -> Result<Loaded> {
    if let Some(path) = &src.coeff_file {
        let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let c = read_coefficients(BufReader::new(f), sizing.alpha)?;
        let c = match sizing.n {
            Some(n) => c.truncated(n),
            None => c,
        };
        return Ok(Loaded { description: format!("file:{}", path.display()), series: Series::Coefficients(c), entry: None });
    }
    let Some(key) = src.key.as_ref().or(src.series.as_ref()) else {
        return Err(Error::Invalid("no series given: pass a catalog key or --coeff-file".into()));
    };
    let mut entry = catalog::from_key(key)?;
    if let Some(n) = sizing.n {
        entry = entry.with_coefficients(n)?;
    } else if need_coeffs {
        return Err(Error::Invalid(format!("'{key}' needs --N to generate coefficients")));
    }
    Ok(Loaded { series: entry.series.clone(), description: key.clone(), entry: Some(entry) })
}

fn sink(output: &Output) -> Result<Box<dyn Write>> {
    Ok(match &output.out {
        Some(p) => Box::new(File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?),
        None => Box::new(std::io::stdout()),
    })
}

fn json_line<T: Serialize>(w: &mut dyn Write, v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w, "{s}")?;
    Ok(())
}

fn csv_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Run the CLI on `args` (including the program name) and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_SPEC } else { EXIT_OK };
        }
    };
    let threads = std::env::var("DSADDLE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|n| *n > 0);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_SPEC;
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Diagnose(a) => cmd_diagnose(a),
        Command::Perron(a) => cmd_perron(a),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn cmd_coeffs(a: &CoeffsArgs) -> Result<i32> {
    let loaded = load(&a.source, &a.sizing, a.source.coeff_file.is_none())?;
    let c = loaded.series.coefficients().expect("coefficients loaded").clone();
    let mut w = sink(&a.output)?;
    if a.log {
        let h = dirichlet_log(&c)?;
        writeln!(w, "# alpha={} label=log {}", c.alpha(), c.label())?;
        for (i, v) in h.as_slice().iter().enumerate() {
            if *v != 0.0 {
                writeln!(w, "{} {}", i + 1, v)?;
            }
        }
    } else {
        write_coefficients(&mut w, &c)?;
    }
    Ok(EXIT_OK)
}

fn x_values(x: &[f64], decades: &Option<String>) -> Result<Vec<f64>> {
    let mut xs = x.to_vec();
    if let Some(d) = decades {
        let (lo, hi) = d.split_once(':').ok_or_else(|| Error::Invalid(format!("--x-decades expects lo:hi, got '{d}'")))?;
        let lo: i32 = lo.trim().parse().map_err(|_| Error::Invalid(format!("bad decade '{lo}'")))?;
        let hi: i32 = hi.trim().parse().map_err(|_| Error::Invalid(format!("bad decade '{hi}'")))?;
        if hi < lo || hi - lo > 300 {
            return Err(Error::Invalid(format!("bad decade range {lo}:{hi}")));
        }
        xs.extend((lo..=hi).map(|k| 10f64.powi(k)));
    }
    if xs.is_empty() {
        return Err(Error::Invalid("no x values: pass --x or --x-decades".into()));
    }
    if let Some(bad) = xs.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(Error::Invalid(format!("x = {bad} must be a positive finite real")));
    }
    Ok(xs)
}

fn parse_rv(s: &str) -> Result<f64> {
    let v = s.strip_prefix("y=").unwrap_or(s);
    v.parse().ok().filter(|y: &f64| *y > 0.0).ok_or_else(|| Error::Invalid(format!("--rv expects y > 0, got '{s}'")))
}

#[derive(Serialize)]
struct EstimateRow {
    x: f64,
    status: String,
    saddle: Option<SaddleSolution>,
    estimate: Option<EstimateReport>,
    rv: Option<RvRatio>,
}

#[derive(Serialize)]
struct EstimateDoc<'a> {
    schema: &'static str,
    command: &'static str,
    series: &'a str,
    tol: f64,
    rows: Vec<EstimateRow>,
}

fn cmd_estimate(a: &EstimateArgs) -> Result<i32> {
    let loaded = load(&a.source, &a.sizing, false)?;
    let xs = x_values(&a.x, &a.x_decades)?;
    let y = a.rv.as_deref().map(parse_rv).transpose()?;
    let series = &loaded.series;
    let rows: Vec<Result<EstimateRow>> = xs
        .par_iter()
        .map(|&x| {
            let sol = match solve_saddle(series, x, a.tol) {
                Ok(s) => s,
                Err(Error::NoSaddle { .. }) | Err(Error::Convergence(_)) => {
                    return Ok(EstimateRow { x, status: "NO_SADDLE".into(), saddle: None, estimate: None, rv: None })
                }
                Err(e) => return Err(e),
            };
            let estimate = estimate_f(series, x)?;
            let rv = match y {
                Some(y) => rv_ratio_check(series, x, y).ok(),
                None => None,
            };
            Ok(EstimateRow { x, status: "ok".into(), saddle: Some(sol), estimate: Some(estimate), rv })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let failed = rows.iter().any(|r| r.status != "ok");
    let mut w = sink(&a.output)?;
    match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            writeln!(w, "# schema=1 command=estimate series={} N={} tol={:e}", loaded.description, csv_n(&loaded), a.tol)?;
            let mut header = "x,status,sigma_x,residual,hat_est,hat_exact,rel_err_hat,F_est,F_exact,rel_err_F".to_string();
            if y.is_some() {
                header.push_str(",y,rv_observed,rv_predicted,rv_finite_x");
            }
            writeln!(w, "{header}")?;
            for r in &rows {
                let mut line = format!("{:e},{}", r.x, r.status);
                match (&r.saddle, &r.estimate) {
                    (Some(s), Some(e)) => line.push_str(&format!(
                        ",{:e},{:e},{:e},{},{},{:e},{},{}",
                        s.sigma_x,
                        s.residual,
                        e.hat_estimate,
                        csv_opt(e.exact_hat),
                        csv_opt(e.rel_err_hat),
                        e.f_estimate.unwrap_or(f64::NAN),
                        csv_opt(e.exact_f),
                        csv_opt(e.rel_err_f)
                    )),
                    _ => line.push_str(",,,,,,,,"),
                }
                if let Some(y) = y {
                    match &r.rv {
                        Some(rv) => line.push_str(&format!(
                            ",{y:e},{:e},{:e},{}",
                            rv.observed,
                            rv.predicted,
                            csv_opt(rv.finite_x_prediction)
                        )),
                        None => line.push_str(&format!(",{y:e},,,")),
                    }
                }
                writeln!(w, "{line}")?;
            }
        }
        Format::Json => json_line(&mut w, &EstimateDoc { schema: "1", command: "estimate", series: &loaded.description, tol: a.tol, rows })?,
    }
    Ok(if failed { EXIT_SADDLE } else { EXIT_OK })
}

fn csv_n(l: &Loaded) -> String {
    l.series.coefficients().map(|c| c.len().to_string()).unwrap_or_else(|| "none".into())
}

/// Piecewise log-log interpolation of "offset value" lines; NaN outside the table.
fn table_fn(path: &str) -> Result<OffsetFn> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut it = t.split_whitespace().map(str::parse::<f64>);
        match (it.next(), it.next()) {
            (Some(Ok(e)), Some(Ok(v))) if e > 0.0 && v > 0.0 => pts.push((e.ln(), v.ln())),
            _ => return Err(Error::Parse { line: i + 1, msg: format!("expected 'offset value' with both positive, got '{t}'") }),
        }
    }
    if pts.len() < 2 {
        return Err(Error::Parse { line: 0, msg: format!("{path}: need at least two points") });
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Arc::new(move |eps: f64| {
        let l = eps.ln();
        let k = pts.partition_point(|p| p.0 < l);
        if k == 0 {
            return if l == pts[0].0 { pts[0].1.exp() } else { f64::NAN };
        }
        if k == pts.len() {
            return f64::NAN;
        }
        let (a, b) = (pts[k - 1], pts[k]);
        (a.1 + (b.1 - a.1) * (l - a.0) / (b.0 - a.0)).exp()
    }))
}

fn witness_for(loaded: &Loaded, a: &DiagnoseArgs) -> Result<Witness> {
    let series = &loaded.series;
    let mut w = match (a.delta.as_deref(), &loaded.entry) {
        (Some("default"), _) | (None, None) => default_delta(series)?,
        (None, Some(e)) => e.witness()?,
        (Some(path), _) => {
            let base = default_delta(series)?;
            Witness { delta: table_fn(path)?, t: None, beta_offset: base.beta_offset, source: WitnessSource::User }
        }
    };
    if a.delta.is_some() {
        // an explicit delta drops the catalog's T unless --T restores one
        if let Some(e) = &loaded.entry {
            w.t = e.witness.as_ref().and_then(|cw| cw.t.clone());
        }
    }
    match a.t.as_deref() {
        Some("b") => {
            let s = series.clone();
            w.t = Some(Arc::new(move |eps| s.real_jet_at(eps).map(|j| j[2]).unwrap_or(f64::NAN)));
        }
        Some(path) => w.t = Some(table_fn(path)?),
        None => {}
    }
    Ok(w)
}

fn cmd_diagnose(a: &DiagnoseArgs) -> Result<i32> {
    let first = load(&a.source, &a.sizing, false)?;
    let (series, witness, expected, depth) = match &a.product {
        Some(key2) => {
            let e2 = catalog::from_key(key2)?;
            let w1 = witness_for(&first, a)?;
            let w2 = e2.witness()?;
            let (s, w) = product(&first.series, &w1, &e2.series, &w2)?;
            let depth = first.entry.as_ref().map(|e| e.depth.max(e2.depth)).unwrap_or(e2.depth);
            (s, w, Some(Classification::Admissible), depth)
        }
        None => {
            let w = witness_for(&first, a)?;
            let depth = first.entry.as_ref().map(|e| e.depth).unwrap_or(DEFAULT_GRID);
            (first.series.clone(), w, first.entry.as_ref().map(|e| e.expected), depth)
        }
    };
    let k = a.sigma_grid.unwrap_or(depth);
    let grid = Grid::geometric(series.alpha(), witness.beta_offset, k);
    let diag = admissibility::diagnose(&series, &witness, &grid, expected)?;
    let mut w = sink(&a.output)?;
    if a.output.format == Some(Format::Csv) {
        writeln!(w, "# schema=1 command=diagnose series={} K={k}", diag.label)?;
        writeln!(w, "group,condition,verdict")?;
        let mut groups = vec![("A", &diag.a), ("A-", &diag.a_minus), ("trends", &diag.trends)];
        if let Some(t) = &diag.t {
            groups.push(("T", t));
        }
        for (g, rep) in groups {
            for (name, c) in &rep.conditions {
                writeln!(w, "{g},{name},{}", serde_json::to_value(c.verdict).map_err(|e| Error::Io(e.to_string()))?.as_str().unwrap_or(""))?;
            }
        }
    } else {
        json_line(&mut w, &diag)?;
    }
    Ok(if diag.matched { EXIT_OK } else { EXIT_MISMATCH })
}

#[derive(Serialize)]
struct PerronRow {
    x: f64,
    value: f64,
    tail_bound: f64,
    exact: Option<f64>,
    rel_err: Option<f64>,
    t_used: f64,
    panels: usize,
    converged: bool,
}

#[derive(Serialize)]
struct PerronDoc<'a> {
    schema: &'static str,
    command: &'static str,
    series: &'a str,
    contour: ContourSpec,
    rows: Vec<PerronRow>,
}

fn cmd_perron(a: &PerronArgs) -> Result<i32> {
    let loaded = load(&a.source, &a.sizing, false)?;
    let series = &loaded.series;
    let spec = ContourSpec { c: a.c.unwrap_or(series.alpha() + 0.5), t_max: a.t, panels: 16, tol: a.tol };
    let mut rows = Vec::new();
    for &x in &a.x {
        let r = perron_hat(series, x, &spec)?;
        let exact = series.coefficients().filter(|c| x >= 1.0 && x <= c.len() as f64).map(|c| c.hat_f(x)).transpose()?;
        let rel_err = exact.filter(|e| *e != 0.0).map(|e| (r.value.re - e).abs() / e);
        rows.push(PerronRow { x, value: r.value.re, tail_bound: r.tail_bound, exact, rel_err, t_used: r.t_used, panels: r.panels, converged: r.converged });
    }
    let converged = rows.iter().all(|r| r.converged);
    let mut w = sink(&a.output)?;
    match a.output.format.unwrap_or(Format::Json) {
        Format::Json => json_line(&mut w, &PerronDoc { schema: "1", command: "perron", series: &loaded.description, contour: spec, rows })?,
        Format::Csv => {
            writeln!(w, "# schema=1 command=perron series={} c={} T={} tol={:e}", loaded.description, spec.c, spec.t_max, spec.tol)?;
            writeln!(w, "x,value,tail_bound,exact,rel_err,t_used,panels,converged")?;
            for r in &rows {
                writeln!(
                    w,
                    "{:e},{:e},{:e},{},{},{},{},{}",
                    r.x,
                    r.value,
                    r.tail_bound,
                    csv_opt(r.exact),
                    csv_opt(r.rel_err),
                    r.t_used,
                    r.panels,
                    r.converged
                )?;
            }
        }
    }
    Ok(if converged { EXIT_OK } else { EXIT_PERRON })
}
