//! Subcommand implementations.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use fracsim_core::cascade::{init_length_for, position_path, Cascade, Init};
use fracsim_core::exact::{ar1_simulate, RngStream};
use fracsim_core::inference::{GofReference, MCReport};
use fracsim_core::models::ProcessModel;
use fracsim_core::quadrature::{acvf_from_density, QuadratureConfig};
use fracsim_core::spectra::velocity_acvf_for_init;
use fracsim_core::wavelets::{g0_time_filter, DiscretizationFilter, Smoothing, TruncationPolicy};
use fracsim_core::Error;

use crate::args::*;
use crate::experiments::{
    build_bank, observed_acvf, observed_density, Ar1Experiment, ExactSource, GofExperiment, GofOutcome, InitChoice,
    LwExperiment, Series, WaveletOptions,
};
use crate::output::{svg_line_plot, Format, RunManifest, Sink, Table, Versions};

/// Failure of a CLI invocation, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(e) if is_flag_error(e) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Library errors that can only come from bad flag values.
fn is_flag_error(e: &Error) -> bool {
    matches!(e, Error::ParameterOutOfRange(_) | Error::UnsupportedOrder(_) | Error::InvalidArgument(_))
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Numeric(e) => write!(f, "error: {}: {e}", e.name()),
            CliError::Io(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Titled plot: one `(label, points)` entry per series.
pub type Plot = (String, Vec<(&'static str, Vec<(f64, f64)>)>);

/// What a subcommand produced. `tables[0]` is the primary table.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub documents: Vec<(String, serde_json::Value)>,
    pub text: Option<(String, String)>,
    pub plot: Option<Plot>,
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute_and_emit(&cli, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn execute_and_emit(cli: &Cli, argv: &[String]) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let start = Instant::now();
    let outcome = pool.install(|| execute(cli))?;
    let elapsed = start.elapsed().as_secs_f64();

    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let sink = match &cli.out {
        Some(d) => Sink::Dir(d.clone()),
        None => Sink::Stdout,
    };
    let mut outputs = Vec::new();
    match sink {
        Sink::Stdout => {
            if let (Some((_, text)), Format::Csv) = (&outcome.text, format) {
                print!("{text}");
            } else if let Some(t) = outcome.tables.first() {
                print!("{}", t.render(format));
            } else if let Some((_, doc)) = outcome.documents.first() {
                println!("{}", serde_json::to_string_pretty(doc).unwrap_or_default());
            }
            if cli.svg {
                eprintln!("warning: --svg needs --out; no plot written");
            }
        }
        Sink::Dir(_) => {
            for t in &outcome.tables {
                outputs.push(sink.emit(&t.file_name(format), &t.render(format))?);
            }
            for (name, doc) in &outcome.documents {
                let s = serde_json::to_string_pretty(doc).unwrap_or_default() + "\n";
                outputs.push(sink.emit(&format!("{name}.json"), &s)?);
            }
            if let Some((name, text)) = &outcome.text {
                outputs.push(sink.emit(&format!("{name}.txt"), text)?);
                print!("{text}");
            }
            if let (true, Some((title, series))) = (cli.svg, &outcome.plot) {
                let svg = svg_line_plot(title, series);
                outputs.extend(sink.emit_file_only("plot.svg", &svg)?);
            }
            let manifest = RunManifest {
                command: argv.to_vec(),
                config: serde_json::to_value(cli).unwrap_or_default(),
                seed: cli.seed,
                versions: Versions::default(),
                threads: pool.current_num_threads(),
                elapsed_seconds: elapsed,
                outputs,
            };
            sink.write_manifest(&manifest)?;
        }
    }
    Ok(())
}

fn quad(cli: &Cli) -> QuadratureConfig {
    let q = QuadratureConfig::default();
    match cli.quad_tol {
        Some(t) => q.with_abs_tol(t),
        None => q,
    }
}

pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Simulate(a) => simulate(cli, a),
        Command::Filters(a) => filters(cli, a),
        Command::Density(a) => density(cli, a),
        Command::Acvf(a) => acvf(cli, a),
        Command::Validate(a) => validate(cli, a),
        Command::Gof(a) => gof(a),
    }
}

pub fn build_model(a: &ModelArgs) -> CliResult<ProcessModel> {
    let need_d =
        || a.d.ok_or_else(|| CliError::Usage(format!("--process {:?} requires --d", a.process).to_lowercase()));
    Ok(match a.process {
        ProcessArg::Ou => {
            if a.d.is_some() {
                return Err(CliError::Usage("--d does not apply to --process ou".into()));
            }
            ProcessModel::ou(a.zeta, a.sigma)?
        }
        ProcessArg::Fou => ProcessModel::fou(a.zeta, a.sigma, need_d()?)?,
        ProcessArg::Fgle => ProcessModel::fgle(a.zeta, a.mass, need_d()?, a.thermal)?,
    })
}

fn smoothing(s: SmoothingArg) -> Smoothing {
    match s {
        SmoothingArg::Smoothed => Smoothing::Smoothed,
        SmoothingArg::Truncated => Smoothing::Truncated,
    }
}

fn wavelet_options(cli: &Cli, w: &WaveletArgs, model: &ProcessModel) -> WaveletOptions {
    let def = TruncationPolicy::default_for(model);
    let policy = (w.trunc_lag.is_some() || w.trunc_threshold.is_some()).then(|| TruncationPolicy {
        lag: w.trunc_lag.unwrap_or(def.lag),
        threshold: w.trunc_threshold.unwrap_or(def.threshold),
    });
    WaveletOptions {
        vanishing_moments: w.vanishing_moments,
        smoothing: smoothing(w.smoothing),
        upsilon: w.upsilon,
        policy,
        quad: quad(cli),
    }
}

fn xy_plot(title: String, label: &'static str, rows: &[Vec<f64>]) -> Option<Plot> {
    Some((title, vec![(label, rows.iter().map(|r| (r[0], r[1])).collect())]))
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> CliResult<Outcome> {
    let model = build_model(&a.model)?;
    let (header, rows) = match a.method {
        MethodArg::Wavelet => {
            let j = a.wavelet.j;
            let bank = build_bank(&model, j, &wavelet_options(cli, &a.wavelet, &model))?;
            let l = bank.filter_len();
            let n0 = a.n.map_or(l + 1, |n| init_length_for(n, l, j));
            let init = match a.init {
                InitArg::Cme => Init::Cme { n0 },
                InitArg::Conv => Init::FilterConvolution { n0, t0: a.t0 },
            };
            let v = Cascade::new(bank, init)?.run(j, cli.seed, 0)?;
            let path = if a.position { position_path(&v) } else { v.to_physical() };
            let mut rows: Vec<Vec<f64>> = (0..path.len()).map(|k| vec![path.time(k), path.values[k]]).collect();
            if let Some(n) = a.n {
                rows.truncate(n);
            }
            (vec!["t", "value"], rows)
        }
        MethodArg::Cholesky | MethodArg::Cme => {
            let n = a.n.unwrap_or(1024);
            let series = if a.position { Series::Increments } else { Series::Velocity };
            let r = observed_acvf(&model, series, n)?;
            let src = match a.method {
                MethodArg::Cholesky => ExactSource::cholesky(&r, n)?,
                _ => ExactSource::cme(&r, n)?,
            };
            let x = src.path(cli.seed, 0)?;
            (vec!["index", "value"], x.iter().enumerate().map(|(i, &v)| vec![i as f64, v]).collect())
        }
        MethodArg::Ar1 => {
            if a.model.process != ProcessArg::Ou {
                return Err(CliError::Usage("--method ar1 requires --process ou".into()));
            }
            if a.position {
                return Err(CliError::Usage("--position is not available with --method ar1".into()));
            }
            let n = a.n.unwrap_or(1024);
            let (z, dt) = (model.zeta(), a.delta);
            let phi = (-z * dt).exp();
            let sd = model.sigma() * ((1.0 - (-2.0 * z * dt).exp()) / (2.0 * z)).sqrt();
            let x = ar1_simulate(phi, sd, n, &mut RngStream::new(cli.seed, 0))?;
            (vec!["index", "value"], x.iter().enumerate().map(|(i, &v)| vec![i as f64, v]).collect())
        }
    };
    let plot = xy_plot(format!("{:?} path, {:?}", a.model.process, a.method).to_lowercase(), "path", &rows);
    Ok(Outcome { tables: vec![Table::new("path", header, rows)], plot, ..Default::default() })
}

fn lag_rows(coeffs: &[f64], half: usize) -> Vec<Vec<f64>> {
    coeffs.iter().enumerate().map(|(i, &c)| vec![i as f64 - half as f64, c]).collect()
}

fn filters(cli: &Cli, a: &FiltersArgs) -> CliResult<Outcome> {
    let model = build_model(&a.model)?;
    let opts = wavelet_options(cli, &a.wavelet, &model);
    let j = a.wavelet.j;
    if j == 0 {
        return Err(CliError::Usage("--J must be at least 1".into()));
    }
    let scale = a.scale.unwrap_or(j - 1);
    if scale >= j {
        return Err(CliError::Usage(format!("--scale must be below --J ({j})")));
    }
    let bank = build_bank(&model, j, &opts)?;
    let g0 = g0_time_filter(&model, opts.smoothing, opts.upsilon, a.t0)?;

    let mut tables = Vec::new();
    for sf in &bank.scales {
        tables.push(Table::new(format!("u_{}", sf.j), vec!["lag", "value"], lag_rows(&sf.u, sf.half)));
        tables.push(Table::new(format!("v_{}", sf.j), vec!["lag", "value"], lag_rows(&sf.v, sf.half)));
    }
    tables.push(Table::new("g0", vec!["lag", "value"], lag_rows(&g0, a.t0)));
    let primary = match a.which {
        WhichFilter::U => 2 * scale as usize,
        WhichFilter::V => 2 * scale as usize + 1,
        WhichFilter::G0 => tables.len() - 1,
    };
    tables.swap(0, primary);

    let sf = &bank.scales[scale as usize];
    let plot = Some((
        format!("filters at scale {scale}"),
        vec![
            ("u", lag_rows(&sf.u, sf.half).iter().map(|r| (r[0], r[1])).collect()),
            ("v", lag_rows(&sf.v, sf.half).iter().map(|r| (r[0], r[1])).collect()),
        ],
    ));
    let meta = json!({
        "model": a.model,
        "J": j,
        "N": opts.vanishing_moments,
        "smoothing": a.wavelet.smoothing,
        "T": bank.half(),
        "L": bank.filter_len(),
        "max_tail_value": bank.max_tail_value(),
        "scales": bank.scales.iter().map(|s| json!({
            "j": s.j,
            "trunc_lag": s.trunc_lag,
            "trunc_threshold": s.trunc_threshold,
            "max_tail_value": s.max_tail_value,
        })).collect::<Vec<_>>(),
        "g0_half_length": a.t0,
    });
    Ok(Outcome { tables, documents: vec![("filters".into(), meta)], plot, ..Default::default() })
}

fn series_of(kind: SeriesKind) -> Option<Series> {
    match kind {
        SeriesKind::Velocity => Some(Series::Velocity),
        SeriesKind::Increments => Some(Series::Increments),
        _ => None,
    }
}

fn density(_cli: &Cli, a: &DensityArgs) -> CliResult<Outcome> {
    let model = build_model(&a.model)?;
    if a.points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let xmax = a.xmax.unwrap_or(if a.kind == SeriesKind::Continuous { 10.0 } else { PI });
    if xmax.is_nan() || xmax <= 0.0 {
        return Err(CliError::Usage("--xmax must be positive".into()));
    }
    let grid: Vec<f64> = (1..=a.points).map(|i| xmax * i as f64 / a.points as f64).collect();
    let values: Vec<f64> = match a.kind {
        SeriesKind::Continuous => {
            let f = model.spectral_density();
            grid.iter().map(|&x| f.eval(x)).collect()
        }
        SeriesKind::Init => {
            let g = DiscretizationFilter::new(model, 0, smoothing(a.smoothing), a.upsilon)?;
            grid.iter().map(|&x| g.eval_or_inf(x).powi(2)).collect()
        }
        k => {
            let d = observed_density(&model, series_of(k).expect("discrete kind"))?;
            grid.iter().map(|&x| d.eval_or_inf(x)).collect()
        }
    };
    let rows: Vec<Vec<f64>> = grid.iter().zip(&values).map(|(&x, &v)| vec![x, v]).collect();
    let plot = xy_plot(format!("{:?} density", a.kind).to_lowercase(), "density", &rows);
    Ok(Outcome { tables: vec![Table::new("density", vec!["x", "value"], rows)], plot, ..Default::default() })
}

fn acvf(cli: &Cli, a: &AcvfArgs) -> CliResult<Outcome> {
    let model = build_model(&a.model)?;
    let n = a.lags + 1;
    let values: Vec<f64> = match a.kind {
        SeriesKind::Continuous => {
            let f = model.spectral_density();
            let q = quad(cli);
            (0..n).map(|t| acvf_from_density(&f, t as f64, &q, None)).collect::<Result<_, _>>()?
        }
        SeriesKind::Init => velocity_acvf_for_init(&model, smoothing(a.smoothing), a.upsilon, n)?.values,
        k => observed_density(&model, series_of(k).expect("discrete kind"))?.acvf_table(n)?.values,
    };
    let rows: Vec<Vec<f64>> = values.iter().enumerate().map(|(k, &v)| vec![k as f64, v]).collect();
    let plot = xy_plot(format!("{:?} autocovariance", a.kind).to_lowercase(), "acvf", &rows);
    Ok(Outcome { tables: vec![Table::new("acvf", vec!["lag", "value"], rows)], plot, ..Default::default() })
}

/// Method, estimate, s, N, |t| columns.
pub fn format_report(title: &str, r: &MCReport) -> String {
    let w = r.rows.iter().map(|row| row.method.len()).max().unwrap_or(6).max(title.len());
    let mut s = String::new();
    let _ = writeln!(s, "{title:<w$}  {:>12}  {:>12}  {:>6}  {:>14}", r.estimator, "s", "N", "|t| statistic");
    for row in &r.rows {
        let t = row.t_vs_baseline.map_or("-".to_string(), |t| format!("{t:.8}"));
        let _ = writeln!(
            s,
            "{:<w$}  {:>12.8}  {:>12.8}  {:>6}  {:>14}",
            row.method, row.summary.mean, row.summary.sd, row.summary.n, t
        );
    }
    s
}

pub fn report_json(experiment: &str, config: serde_json::Value, r: &MCReport) -> serde_json::Value {
    json!({
        "experiment": experiment,
        "config": config,
        "estimator": r.estimator,
        "baseline": r.baseline,
        "rows": r.rows.iter().map(|row| json!({
            "method": row.method,
            "mean": row.summary.mean,
            "s": row.summary.sd,
            "N": row.summary.n,
            "t": row.t_vs_baseline,
        })).collect::<Vec<_>>(),
    })
}

fn validate(cli: &Cli, a: &ValidateArgs) -> CliResult<Outcome> {
    if a.replicates < 2 {
        return Err(CliError::Usage("--replicates must be at least 2".into()));
    }
    let d = a.d.unwrap_or(0.25);
    let init = match a.init {
        InitArg::Cme => InitChoice::Cme,
        InitArg::Conv => InitChoice::Conv { t0: a.t0 },
    };
    let q = quad(cli);
    let wavelet_for = |model: &ProcessModel| WaveletOptions {
        quad: q.clone(),
        policy: Some(TruncationPolicy::default_for(model)),
        ..WaveletOptions::default()
    };
    let name = format!("{:?}", a.experiment).to_lowercase();
    let config = serde_json::to_value(a).unwrap_or_default();
    let lw = |model: ProcessModel, js: Vec<u32>| -> CliResult<MCReport> {
        Ok(LwExperiment {
            model,
            js,
            init,
            replicates: a.replicates,
            length: a.length.unwrap_or(512),
            bandwidth: a.bandwidth,
            seed: cli.seed,
            include_cme: !a.no_cme,
            wavelet: wavelet_for(&model),
        }
        .run()?)
    };
    let (title, report) = match a.experiment {
        ExperimentArg::Table3 => {
            let model = ProcessModel::fou(a.zeta.unwrap_or(1.0), 1.0, d)?;
            (format!("d = {d}"), lw(model, a.js.clone().unwrap_or(vec![6]))?)
        }
        ExperimentArg::Table5 => {
            let model = ProcessModel::fou(a.zeta.unwrap_or(1.0), 1.0, d)?;
            (format!("d = {d}"), lw(model, a.js.clone().unwrap_or(vec![2, 4, 6, 8, 10]))?)
        }
        ExperimentArg::Table6 => {
            let model = ProcessModel::fgle(a.zeta.unwrap_or(2.0), 1.0, d, 1.0)?;
            (format!("d = {d}"), lw(model, a.js.clone().unwrap_or(vec![6, 8]))?)
        }
        ExperimentArg::Table4 => {
            let zeta = a.zeta.unwrap_or(1.0);
            let delta = 0.125 / zeta;
            let js = a.js.clone().unwrap_or_else(|| {
                if zeta == 2.0 {
                    vec![8]
                } else if zeta == 0.5 {
                    vec![4, 6, 8]
                } else {
                    vec![6]
                }
            });
            let model = ProcessModel::ou(zeta, 1.0)?;
            let exp = Ar1Experiment {
                zeta,
                delta,
                js,
                replicates: a.replicates,
                length: a.length.unwrap_or(2048),
                seed: cli.seed,
                include_cme: !a.no_cme,
                wavelet: wavelet_for(&model),
            };
            (format!("phi = {:.4}", exp.phi()), exp.run()?)
        }
        ExperimentArg::Gof => {
            let model = ProcessModel::fou(a.zeta.unwrap_or(1.0), 1.0, d)?;
            let js = a.js.clone().unwrap_or(vec![6]);
            let &[j] = js.as_slice() else {
                return Err(CliError::Usage("gof takes a single --J".into()));
            };
            let exp = GofExperiment {
                model,
                j,
                replicates: a.replicates,
                length: a.length.unwrap_or(512),
                seed: cli.seed,
                wavelet: wavelet_for(&model),
            };
            return Ok(gof_outcome(&name, config, &exp.run()?));
        }
    };
    let text = format_report(&title, &report);
    Ok(Outcome {
        documents: vec![("report".into(), report_json(&name, config, &report))],
        text: Some(("report".into(), text)),
        ..Default::default()
    })
}

fn histogram(x: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64)> {
    let mut c = vec![0.0; bins];
    let w = (hi - lo) / bins as f64;
    for &v in x {
        let b = ((v - lo) / w).floor();
        if b >= 0.0 && (b as usize) < bins {
            c[b as usize] += 1.0;
        }
    }
    let scale = 1.0 / (x.len() as f64 * w);
    c.iter().enumerate().map(|(i, &k)| (lo + (i as f64 + 0.5) * w, k * scale)).collect()
}

fn gof_outcome(name: &str, config: serde_json::Value, g: &GofOutcome) -> Outcome {
    let mut text = String::new();
    let w = g.samples.iter().map(|s| s.0.len()).max().unwrap_or(8).max(8);
    let _ = writeln!(text, "{:<w$}  {:>12}  {:>12}  {:>6}", "T~", "mean", "s", "N");
    for (m, x) in &g.samples {
        let s = fracsim_core::inference::Summary::from_samples(x);
        let _ = writeln!(text, "{m:<w$}  {:>12.8}  {:>12.8}  {:>6}", s.mean, s.sd, s.n);
    }
    let p = &g.pooled;
    let _ = writeln!(text, "{:<w$}  {:>12.8}  {:>12.8}  {:>6}", "pooled", p.mean, p.sd, p.n);
    let _ = writeln!(text);
    for k in &g.ks {
        let _ = writeln!(text, "KS {} vs {}: D = {:.6}, p = {:.6}", k.a, k.b, k.d, k.p);
    }
    let n = g.samples.first().map_or(0, |s| s.1.len());
    let header: Vec<&'static str> = vec!["replicate", "cme", "cholesky", "wavelet"];
    let rows: Vec<Vec<f64>> =
        (0..n).map(|i| std::iter::once(i as f64).chain(g.samples.iter().map(|s| s.1[i])).collect()).collect();
    let doc = json!({
        "experiment": name,
        "config": config,
        "methods": g.samples.iter().map(|(m, x)| {
            let s = fracsim_core::inference::Summary::from_samples(x);
            json!({"method": m, "mean": s.mean, "s": s.sd, "N": s.n})
        }).collect::<Vec<_>>(),
        "pooled": {"mean": p.mean, "s": p.sd, "N": p.n},
        "ks": g.ks,
    });
    let plot = Some((
        "T~ histograms".to_string(),
        [("CME", 0usize), ("Cholesky", 1), ("wavelet", 2)]
            .iter()
            .filter_map(|&(label, i)| g.samples.get(i).map(|s| (label, histogram(&s.1, -4.0, 4.0, 40))))
            .collect(),
    ));
    Outcome {
        tables: vec![Table::new("gof_samples", header, rows)],
        documents: vec![("report".into(), doc)],
        text: Some(("report".into(), text)),
        plot,
    }
}

/// Last column of a CSV with a header row.
pub fn read_series(path: &std::path::Path) -> CliResult<Vec<f64>> {
    let s = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in s.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cell = line.rsplit(',').next().unwrap_or("").trim();
        let v = cell
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("{}:{}: not a number: {cell:?}", path.display(), i + 1)))?;
        out.push(v);
    }
    Ok(out)
}

fn gof(a: &GofArgs) -> CliResult<Outcome> {
    let model = build_model(&a.model)?;
    let series =
        series_of(a.kind).ok_or_else(|| CliError::Usage("gof --kind must be velocity or increments".into()))?;
    let x = read_series(&a.input)?;
    let dens = observed_density(&model, series)?;
    let t = GofReference::new(x.len(), |w| dens.eval_or_inf(w))?.statistic(&x)?;
    Ok(Outcome {
        tables: vec![Table::new("gof", vec!["n", "statistic"], vec![vec![x.len() as f64, t]])],
        ..Default::default()
    })
}
