//! Seeded Monte Carlo estimates of `P(B_m injective)` and `P(B_m is a δ-RIP)`.
//!
//! Trial `t` of a run with base seed `s` draws everything from
//! `seed::stream(derive_seed(s, t))`, and successes are summed as integers, so
//! a run gives the same counts on any number of worker threads. A sweep gives
//! row `m` the base seed `derive_seed(s, m)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bounds::{self, EtaForm, PDeltaSource, PhaseWindow, RipMWindow};
use crate::embedding::{self, pair_geodesics, rip_passes, words_for, Boundary};
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::report::format_sig;
use crate::seed::{derive_seed, stream};

/// Default cap on `C(n,2) · trials · m/64` word operations per run.
pub const DEFAULT_BUDGET: f64 = 1e12;

/// Geodesic distance within this of 1/2 counts as orthogonal when deciding
/// whether an explicit point set gets an analytic window.
const ORTHOGONAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Injectivity,
    Rip,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Injectivity => "injectivity",
            Mode::Rip => "rip",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "injectivity" => Ok(Mode::Injectivity),
            "rip" => Ok(Mode::Rip),
            other => Err(Error::param("mode", format!("{other:?} (expected injectivity|rip)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointSource {
    /// `n` pairwise orthogonal points, simulated as iid fair code bits.
    OrthogonalFast,
    /// A concrete point set pushed through a freshly sampled map each trial.
    Explicit(PointSet),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub n: usize,
    pub m: usize,
    /// Present iff `mode == Rip`.
    pub delta: Option<f64>,
    pub mode: Mode,
    pub point_source: PointSource,
    pub trials: u64,
    pub base_seed: u64,
    pub boundary: Boundary,
    /// Which η the attached analytic window uses.
    pub eta_form: EtaForm,
    pub budget: f64,
}

impl TrialConfig {
    pub fn injectivity(n: usize, m: usize, trials: u64, base_seed: u64) -> Self {
        TrialConfig {
            n,
            m,
            delta: None,
            mode: Mode::Injectivity,
            point_source: PointSource::OrthogonalFast,
            trials,
            base_seed,
            boundary: Boundary::Strict,
            eta_form: EtaForm::Pairwise,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn rip(n: usize, m: usize, delta: f64, trials: u64, base_seed: u64) -> Self {
        TrialConfig {
            delta: Some(delta),
            mode: Mode::Rip,
            eta_form: EtaForm::General,
            ..TrialConfig::injectivity(n, m, trials, base_seed)
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_eta_form(mut self, eta_form: EtaForm) -> Self {
        self.eta_form = eta_form;
        self
    }

    pub fn with_budget(mut self, budget: f64) -> Self {
        self.budget = budget;
        self
    }

    /// Switches to explicit points; `n` follows the point set.
    pub fn with_points(mut self, points: PointSet) -> Self {
        self.n = points.len();
        self.point_source = PointSource::Explicit(points);
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n", format!("need at least 2 points, got {}", self.n)));
        }
        if self.m == 0 {
            return Err(Error::param("m", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        match (self.mode, self.delta) {
            (Mode::Rip, Some(d)) => embedding::check_delta(d)?,
            (Mode::Rip, None) => return Err(Error::param("delta", "required in rip mode")),
            (Mode::Injectivity, Some(_)) => return Err(Error::param("delta", "only meaningful in rip mode")),
            (Mode::Injectivity, None) => {}
        }
        if let PointSource::Explicit(points) = &self.point_source {
            if points.len() != self.n {
                return Err(Error::Misaligned {
                    codes: self.n,
                    points: points.len(),
                });
            }
        }
        let required = self.work();
        if required > self.budget {
            return Err(Error::Budget {
                required,
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// `C(n,2) · trials · m/64`.
    pub fn work(&self) -> f64 {
        bounds::pairs_f64(self.n as u64) * self.trials as f64 * self.m as f64 / 64.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub m: usize,
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    /// 95% Wilson interval.
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Analytic window; absent unless the points are pairwise orthogonal (and
    /// `δ < 1/2` in RIP mode).
    pub window: Option<PhaseWindow>,
    pub eta_form: EtaForm,
    /// Seconds. Not serialized.
    pub wall_time: f64,
}

impl EstimateRow {
    /// Whether `target` lies in the Wilson interval at `z` standard errors.
    pub fn within_sigma(&self, target: f64, z: f64) -> bool {
        let (lo, hi) = wilson_interval_z(self.successes, self.trials, z);
        lo <= target && target <= hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Strictly increasing in `m`.
    pub rows: Vec<EstimateRow>,
    pub config: TrialConfig,
}

pub const SWEEP_CSV_HEADER: [&str; 9] =
    ["m", "trials", "successes", "p_hat", "ci_lo", "ci_hi", "window_lo", "window_hi", "eta_form"];

impl SweepResult {
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        write_rows_csv(&self.rows, sink)
    }

    /// First `m` at which `p_hat` reaches `level`, interpolated linearly
    /// between the bracketing rows.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        self.rows.windows(2).find_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            (a.p_hat < level && b.p_hat >= level).then(|| {
                a.m as f64 + (level - a.p_hat) / (b.p_hat - a.p_hat) * (b.m - a.m) as f64
            })
        })
    }
}

/// The sweep CSV for any list of rows; a missing window is written as empty
/// fields.
pub fn write_rows_csv<W: Write>(rows: &[EstimateRow], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(SWEEP_CSV_HEADER)?;
    for r in rows {
        let (wlo, whi) = match r.window {
            Some(win) => (format_sig(win.lo, 10), format_sig(win.hi, 10)),
            None => (String::new(), String::new()),
        };
        w.write_record([
            r.m.to_string(),
            r.trials.to_string(),
            r.successes.to_string(),
            format_sig(r.p_hat, 10),
            format_sig(r.ci_lo, 10),
            format_sig(r.ci_hi, 10),
            wlo,
            whi,
            r.eta_form.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Runs `config.trials` trials on the current rayon pool.
pub fn run_trials(config: &TrialConfig) -> Result<EstimateRow> {
    config.validate()?;
    let start = Instant::now();
    let kernel = Kernel::new(config)?;
    let successes: u64 = (0..config.trials)
        .into_par_iter()
        .map_init(
            || Scratch::new(config),
            |scratch, t| kernel.trial(derive_seed(config.base_seed, t), scratch) as u64,
        )
        .sum();
    let trials = config.trials;
    let (ci_lo, ci_hi) = wilson_interval(successes, trials, 0.95)?;
    Ok(EstimateRow {
        m: config.m,
        successes,
        trials,
        p_hat: successes as f64 / trials as f64,
        ci_lo,
        ci_hi,
        window: analytic_window(config, kernel.orthogonal)?,
        eta_form: config.eta_form,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// One [`run_trials`] per grid point, row `m` seeded with
/// `derive_seed(base_seed, m)`.
pub fn sweep(template: &TrialConfig, m_grid: &[usize]) -> Result<SweepResult> {
    if m_grid.is_empty() {
        return Err(Error::param("m-grid", "empty"));
    }
    if m_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("m-grid", "must be strictly increasing"));
    }
    let rows = m_grid
        .iter()
        .map(|&m| {
            let config = template
                .clone()
                .with_m(m)
                .with_seed(derive_seed(template.base_seed, m as u64));
            run_trials(&config)
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        rows,
        config: template.clone(),
    })
}

/// Wilson score interval at two-sided `confidence`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::param("confidence", format!("{confidence} is not in (0, 1)")));
    }
    if trials == 0 || successes > trials {
        return Err(Error::param("trials", format!("{successes} successes out of {trials}")));
    }
    let z = Normal::standard().inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    Ok(wilson_interval_z(successes, trials, z))
}

/// Wilson score interval with `z` standard errors. Requires `trials ≥ 1`.
pub fn wilson_interval_z(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let t = trials as f64;
    let p = successes as f64 / t;
    let z2 = z * z;
    let denom = 1.0 + z2 / t;
    let centre = (p + z2 / (2.0 * t)) / denom;
    let radius = z / denom * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (centre - radius).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + radius).min(1.0) };
    (lo, hi)
}

/// `count` integers evenly spaced over `[lo, hi]`, rounded, duplicates
/// dropped.
pub fn linspace_grid(lo: f64, hi: f64, count: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = (0..count)
        .map(|i| {
            let x = if count == 1 { lo } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 };
            x.round().max(1.0) as usize
        })
        .collect();
    grid.dedup();
    grid
}

/// 20 points over `[0.8·m_eps1, 1.1·m_eps2]` from the closed forms.
pub fn default_figure_grid(window: &RipMWindow) -> Vec<usize> {
    linspace_grid(0.8 * window.m_formula_eps1, 1.1 * window.m_formula_eps2, 20)
}

fn analytic_window(config: &TrialConfig, orthogonal: bool) -> Result<Option<PhaseWindow>> {
    if !orthogonal {
        return Ok(None);
    }
    let (n, m) = (config.n as u64, config.m as u64);
    match (config.mode, config.delta) {
        (Mode::Injectivity, _) => bounds::one_to_one_window_with(n, m, config.eta_form).map(Some),
        (Mode::Rip, Some(d)) if d < 0.5 => {
            bounds::rip_window_with(n, m, d, config.eta_form, PDeltaSource::Exact).map(Some)
        }
        (Mode::Rip, _) => Ok(None),
    }
}

/// Per-run precomputation shared by all trials.
struct Kernel<'a> {
    config: &'a TrialConfig,
    words: usize,
    last_mask: u64,
    /// Fast RIP path: `ok[h]` iff Hamming count `h` passes at geodesic 1/2.
    ok: Vec<bool>,
    /// Explicit RIP path: geodesics in pair order.
    geodesics: Vec<f64>,
    orthogonal: bool,
}

struct Scratch {
    words: Vec<u64>,
    rows: Vec<usize>,
}

impl Scratch {
    fn new(config: &TrialConfig) -> Self {
        Scratch {
            words: vec![0; config.n * words_for(config.m)],
            rows: (0..config.n).collect(),
        }
    }
}

impl<'a> Kernel<'a> {
    fn new(config: &'a TrialConfig) -> Result<Self> {
        let m = config.m;
        let delta = config.delta.unwrap_or(0.5);
        let ok = (0..=m)
            .map(|h| !config.boundary.violates((h as f64 / m as f64 - 0.5).abs(), delta))
            .collect();
        let (geodesics, orthogonal) = match &config.point_source {
            PointSource::OrthogonalFast => (Vec::new(), true),
            PointSource::Explicit(points) => {
                let g = pair_geodesics(points);
                let orth = g.iter().all(|&d| (d - 0.5).abs() <= ORTHOGONAL_TOLERANCE);
                (g, orth)
            }
        };
        Ok(Kernel {
            config,
            words: words_for(m),
            last_mask: match m % 64 {
                0 => u64::MAX,
                r => (1u64 << r) - 1,
            },
            ok,
            geodesics,
            orthogonal,
        })
    }

    fn trial(&self, seed: u64, scratch: &mut Scratch) -> bool {
        match &self.config.point_source {
            PointSource::OrthogonalFast => self.fast_trial(seed, scratch),
            PointSource::Explicit(points) => self.explicit_trial(seed, points),
        }
    }

    /// Draws the same bits, in the same order, as `embed_orthogonal`.
    fn fast_trial(&self, seed: u64, scratch: &mut Scratch) -> bool {
        let mut rng = stream(seed);
        let w = self.words;
        for code in scratch.words.chunks_exact_mut(w) {
            for word in code.iter_mut() {
                *word = rng.next_u64();
            }
            code[w - 1] &= self.last_mask;
        }
        let codes = &scratch.words;
        match self.config.mode {
            Mode::Injectivity => {
                let rows = &mut scratch.rows;
                rows.sort_unstable_by(|&a, &b| codes[a * w..(a + 1) * w].cmp(&codes[b * w..(b + 1) * w]));
                rows.windows(2)
                    .all(|p| codes[p[0] * w..(p[0] + 1) * w] != codes[p[1] * w..(p[1] + 1) * w])
            }
            Mode::Rip => {
                let n = self.config.n;
                (0..n).all(|i| {
                    let a = &codes[i * w..(i + 1) * w];
                    ((i + 1)..n).all(|j| {
                        let b = &codes[j * w..(j + 1) * w];
                        let h: u32 = a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum();
                        self.ok[h as usize]
                    })
                })
            }
        }
    }

    fn explicit_trial(&self, seed: u64, points: &PointSet) -> bool {
        let map = embedding::sample_map(self.config.m, points.dim(), seed).expect("validated config");
        let codes = embedding::embed_all(&map, points).expect("validated config");
        match self.config.mode {
            Mode::Injectivity => codes.is_injective(),
            Mode::Rip => rip_passes(&codes, &self.geodesics, self.config.delta.unwrap_or(0.5), self.config.boundary),
        }
    }
}
