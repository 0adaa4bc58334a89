use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use onebit_core::bounds::{self, write_bounds_csv, BoundsReport, RipMWindow};
use onebit_core::embedding::{check_one_to_one, check_rip_with, embed_all, hamming_distance, pairs, sample_map};
use onebit_core::geometry::{geodesic_distance, read_point_set};
use onebit_core::montecarlo::{default_figure_grid, run_trials, sweep, write_rows_csv, SweepResult};
use onebit_core::oracles::{binomial_tail, birthday_exact, eta_comparison, rip_exact_three};
use onebit_core::{format_sig, Boundary, CodeSet, PointSet, TrialConfig};

use crate::args::*;
use crate::svg::{render_figure, FigureLine};
use crate::{EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, EXIT_VALIDITY};

#[derive(Debug)]
pub enum CliError {
    Core(onebit_core::Error),
    File { path: PathBuf, source: io::Error },
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(onebit_core::Error::Validity { .. }) => EXIT_VALIDITY,
            _ => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use onebit_core::Error;
        match self {
            CliError::Core(Error::InvalidParameter { name, message }) => write!(f, "--{name}: {message}"),
            CliError::Core(Error::Validity { name, message }) => {
                write!(f, "--{name}: {message} (pass --force to evaluate anyway)")
            }
            CliError::Core(e) => write!(f, "{e}"),
            CliError::File { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

impl From<onebit_core::Error> for CliError {
    fn from(e: onebit_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Core(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Bounds(a) => bounds_cmd(a, out),
        Command::Embed(a) => embed_cmd(a, out, err),
        Command::Check(a) => check_cmd(a, out),
        Command::Simulate(a) => simulate_cmd(a, out, err),
        Command::Sweep(a) => sweep_cmd(a, out, err),
        Command::Figure(a) => figure_cmd(a, out, err),
        Command::Oracle(a) => oracle_cmd(a, out),
    }
}

fn bounds_cmd(a: BoundsArgs, out: &mut dyn Write) -> Result<i32> {
    let mut reports: Vec<BoundsReport> = Vec::new();
    let mut extra: Vec<String> = Vec::new();
    if let Some(eps) = a.eps {
        reports.push(bounds::m_injective_orthogonal(a.n, eps)?);
        if let Some(sep) = a.delta_sep {
            reports.push(bounds::m_injective(a.n, eps, sep)?);
        }
        if let Some(delta) = a.delta {
            reports.push(bounds::m_rip_union(a.n, eps, delta)?);
        }
    }
    if let Some(delta) = a.delta {
        reports.push(bounds::m_linear_jl(a.n, delta)?);
        if delta < 0.5 {
            extra.push(format!("q = {} (1/(2 delta^2) = {})", fmt(bounds::q(delta)), fmt(0.5 / (delta * delta))));
        }
    }
    match (a.eps1, a.eps2) {
        (Some(eps1), Some(eps2)) => {
            reports.extend(bounds::one_to_one_m_window(a.n, eps1, eps2, a.force)?.reports()?);
            if let Some(delta) = a.delta {
                let w = bounds::rip_m_window(a.n, delta, eps1, eps2, a.force)?;
                reports.extend(w.reports()?);
                extra.push(format!("r = {}", fmt(w.r)));
                extra.push(format!("lambda1 crossing: m = {}", opt(w.crossing_eps1)));
                extra.push(format!("lambda2 crossing: m = {}", opt(w.crossing_eps2)));
            }
        }
        (None, None) => {}
        _ => return Err(CliError::Usage("--eps1 and --eps2 go together".into())),
    }
    if reports.is_empty() {
        return Err(CliError::Usage("nothing to evaluate: pass --eps, --delta or --eps1 with --eps2".into()));
    }

    writeln!(out, "{:<22} {:>6} {:>8} {:>8} {:>8} {:>14} {:>7}  note", "formula", "n", "delta", "eps1", "eps2", "m_value", "m_int")?;
    for r in &reports {
        writeln!(
            out,
            "{:<22} {:>6} {:>8} {:>8} {:>8} {:>14} {:>7}  {}",
            r.formula_id.as_str(),
            r.n,
            opt_short(r.delta),
            opt_short(r.eps1),
            opt_short(r.eps2),
            fmt(r.m_value),
            r.m_int,
            r.validity_note
        )?;
    }
    for line in extra {
        writeln!(out, "{line}")?;
    }
    if let Some(path) = &a.out {
        write_bounds_csv(&reports, create(path)?)?;
    }
    Ok(EXIT_OK)
}

fn embed_cmd(a: EmbedArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let points = read_points(&a.points, a.normalize)?;
    let seed = resolve_seed(a.seed.seed, err)?;
    let map = sample_map(a.m, points.dim(), seed)?;
    let codes = embed_all(&map, &points)?;
    let mut sink = create(&a.codes)?;
    codes.write_binary(&mut sink)?;
    sink.flush()?;
    if let Some(path) = &a.out {
        let mut w = create(path)?;
        writeln!(w, "i,j,hamming,geodesic,deviation")?;
        for (i, j) in pairs(points.len()) {
            let h = hamming_distance(&codes.codes()[i], &codes.codes()[j])?;
            let g = geodesic_distance(&points.points()[i], &points.points()[j])?;
            writeln!(w, "{i},{j},{},{},{}", fmt(h), fmt(g), fmt(h - g))?;
        }
        w.flush()?;
    }
    writeln!(out, "embedded {} points from dimension {} into {} bits", points.len(), points.dim(), a.m)?;
    Ok(EXIT_OK)
}

fn check_cmd(a: CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let points = read_points(&a.points, a.normalize)?;
    let file = File::open(&a.codes).map_err(|source| CliError::File {
        path: a.codes.clone(),
        source,
    })?;
    let codes = CodeSet::read_binary(BufReader::new(file))?;
    if codes.len() != points.len() {
        return Err(onebit_core::Error::Misaligned {
            codes: codes.len(),
            points: points.len(),
        }
        .into());
    }
    let passed = match a.delta {
        Some(delta) => {
            let report = check_rip_with(&codes, &points, delta, a.boundary)?;
            writeln!(
                out,
                "rip: {} (delta={}, boundary={})",
                verdict(report.passed),
                fmt(delta),
                report.boundary
            )?;
            writeln!(out, "max_deviation: {}", fmt(report.max_deviation))?;
            writeln!(out, "violations: {}", report.violations.len())?;
            for v in &report.violations {
                writeln!(
                    out,
                    "  ({}, {}) hamming={} geodesic={} deviation={}",
                    v.i,
                    v.j,
                    fmt(v.hamming),
                    fmt(v.geodesic),
                    fmt(v.deviation)
                )?;
            }
            report.passed
        }
        None => {
            let result = check_one_to_one(&codes)?;
            writeln!(out, "one-to-one: {}", verdict(result.injective))?;
            writeln!(out, "collisions: {}", result.collisions.len())?;
            for (i, j) in &result.collisions {
                writeln!(out, "  ({i}, {j})")?;
            }
            result.injective
        }
    };
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn simulate_cmd(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let config = trial_config(&a.trial, a.m, err)?;
    let row = in_pool(a.trial.threads.threads, || run_trials(&config))??;
    writeln!(
        err,
        "{} successes in {} trials ({:.3} s)",
        row.successes, row.trials, row.wall_time
    )?;
    write_output(a.trial.out.as_deref(), out, |w| write_rows_csv(std::slice::from_ref(&row), w))?;
    Ok(EXIT_OK)
}

fn sweep_cmd(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let template = trial_config(&a.trial, a.m_grid.0[0], err)?;
    let result = in_pool(a.trial.threads.threads, || sweep(&template, &a.m_grid.0))??;
    report_crossing(&result, err)?;
    write_output(a.trial.out.as_deref(), out, |w| result.write_csv(w))?;
    Ok(EXIT_OK)
}

fn figure_cmd(a: FigureArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let window: RipMWindow = bounds::rip_m_window(a.n, a.delta, a.eps1, a.eps2, a.force)?;
    let grid = match &a.m_grid {
        Some(g) => g.0.clone(),
        None => default_figure_grid(&window),
    };
    let seed = resolve_seed(a.seed.seed, err)?;
    let template = TrialConfig::rip(a.n as usize, grid[0], a.delta, a.trials, seed)
        .with_boundary(a.boundary)
        .with_eta_form(a.eta_form);
    let result = in_pool(a.threads.threads, || sweep(&template, &grid))??;

    let mut csv = create(&a.out)?;
    result.write_csv(&mut csv)?;
    csv.flush()?;
    let svg_path = a.out.with_extension("svg");
    let title = format!("P(B_m is a {}-RIP), n = {}, {} trials per m", fmt(a.delta), a.n, a.trials);
    let lines = [
        FigureLine {
            m: window.m_formula_eps1,
            colour: "red",
            label: format!("eps1 = {}: m = {}", fmt(a.eps1), short(window.m_formula_eps1)),
        },
        FigureLine {
            m: window.m_formula_eps2,
            colour: "green",
            label: format!("eps2 = {}: m = {}", fmt(a.eps2), short(window.m_formula_eps2)),
        },
    ];
    let mut svg = create(&svg_path)?;
    svg.write_all(render_figure(&title, &result.rows, &lines).as_bytes())?;
    svg.flush()?;

    writeln!(out, "closed form (eps1, red):   m = {}", fmt(window.m_formula_eps1))?;
    writeln!(out, "closed form (eps2, green): m = {}", fmt(window.m_formula_eps2))?;
    writeln!(out, "lambda1 crossing:          m = {}", opt(window.crossing_eps1))?;
    writeln!(out, "lambda2 crossing:          m = {}", opt(window.crossing_eps2))?;
    writeln!(out, "empirical 0.5 crossing:    m = {}", opt(result.crossing(0.5)))?;
    let inside = result
        .rows
        .iter()
        .filter(|r| r.window.is_some_and(|w| w.contains(r.p_hat)))
        .count();
    writeln!(out, "rows inside their window:  {inside}/{}", result.rows.len())?;
    writeln!(out, "wrote {} and {}", a.out.display(), svg_path.display())?;
    Ok(EXIT_OK)
}

fn oracle_cmd(a: OracleArgs, out: &mut dyn Write) -> Result<i32> {
    match a.which {
        OracleCommand::Birthday { n, m } => writeln!(out, "{}", birthday_exact(n, m)?)?,
        OracleCommand::Rip3 { m, delta, boundary } => {
            let tags = match boundary {
                Some(b) => vec![b],
                None => vec![Boundary::Strict, Boundary::Inclusive],
            };
            for b in tags {
                writeln!(out, "{b}: {}", rip_exact_three(m, delta, b)?)?;
            }
        }
        OracleCommand::Eta { n, m } => {
            let r = eta_comparison(n, m)?;
            writeln!(out, "exact:        {}", r.exact)?;
            writeln!(out, "poisson:      {}", fmt(r.poisson))?;
            writeln!(out, "deviation:    {}", fmt(r.deviation))?;
            writeln!(out, "eta_pairwise: {} contains={}", fmt(r.eta_pairwise), r.pairwise_contains)?;
            writeln!(out, "eta_general:  {} contains={}", fmt(r.eta_general), r.general_contains)?;
        }
        OracleCommand::Tail { m, a, delta } => {
            let p = match (a, delta) {
                (Some(a), _) => binomial_tail(m, a)?,
                (None, Some(d)) => bounds::p_delta_exact(m, d)?,
                (None, None) => return Err(CliError::Usage("pass --a or --delta".into())),
            };
            writeln!(out, "{p}")?;
        }
    }
    Ok(EXIT_OK)
}

fn trial_config(a: &TrialArgs, m: usize, err: &mut dyn Write) -> Result<TrialConfig> {
    let points = a.points.as_deref().map(|p| read_points(p, a.normalize)).transpose()?;
    let n = match (&points, a.n) {
        (Some(p), Some(n)) if p.len() != n => {
            return Err(CliError::Usage(format!("--n {n} disagrees with {} points in --points", p.len())))
        }
        (Some(p), _) => p.len(),
        (None, Some(n)) => n,
        (None, None) => return Err(CliError::Usage("--n is required without --points".into())),
    };
    let trials = a.trials.unwrap_or(if n <= 100 { 100_000 } else { 200 });
    let seed = resolve_seed(a.seed.seed, err)?;
    let mut config = match a.delta {
        Some(delta) => TrialConfig::rip(n, m, delta, trials, seed),
        None => TrialConfig::injectivity(n, m, trials, seed),
    }
    .with_boundary(a.boundary);
    if let Some(form) = a.eta_form {
        config = config.with_eta_form(form);
    }
    if let Some(budget) = a.budget {
        config = config.with_budget(budget);
    }
    if let Some(points) = points {
        config = config.with_points(points);
    }
    Ok(config)
}

fn report_crossing(result: &SweepResult, err: &mut dyn Write) -> Result<()> {
    if let Some(m) = result.crossing(0.5) {
        writeln!(err, "p_hat crosses 0.5 at m = {}", fmt(m))?;
    }
    Ok(())
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == Some(0) {
        return Err(CliError::Usage("--threads: must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    Ok(pool.install(f))
}

fn resolve_seed(seed: Option<u64>, err: &mut dyn Write) -> Result<u64> {
    let seed = seed.unwrap_or_else(rand::random);
    writeln!(err, "seed: {seed}")?;
    Ok(seed)
}

fn read_points(path: &Path, normalize: bool) -> Result<PointSet> {
    let file = File::open(path).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(read_point_set(BufReader::new(file), normalize)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

fn write_output(
    path: Option<&Path>,
    out: &mut dyn Write,
    write: impl FnOnce(&mut dyn Write) -> onebit_core::Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            write(&mut w)?;
            w.flush()?;
        }
        None => write(out)?,
    }
    Ok(())
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn fmt(x: f64) -> String {
    format_sig(x, 10)
}

fn short(x: f64) -> String {
    format_sig(x, 4)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_else(|| "none".into())
}

fn opt_short(x: Option<f64>) -> String {
    x.map(|v| format_sig(v, 6)).unwrap_or_else(|| "-".into())
}

