//! Closed-form sample-size requirements and phase-transition windows for the
//! random one-bit map, evaluated in log space where the quantities span many
//! orders of magnitude.
//!
//! Notation used in the docs below: `C = C(n,2) = n(n−1)/2` is the number of
//! point pairs, `p^δ = P(|Y − m/2| ≥ mδ)` for `Y ~ Bin(m, 1/2)`, and
//!
//! ```text
//! rate(δ) = −½·ln(1 − 4δ²) + δ·ln((1 − 2δ)/(1 + 2δ))      (< 0)
//! λ1 = C · e^{−1/6} / √(2πm) · e^{m·rate(δ)}
//! λ2 = C · e^{1/12} · √m / √(2π) · e^{m·rate(δ)}
//! ```
//!
//! so that `λ1 ≤ C·p^δ ≤ λ2`.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::exact::{ldexp, tail_start, ExactMethod, ExactProbability};
use crate::report::format_sig;

/// Above this `m`, binomial tails are summed in log space instead of exactly.
pub const EXACT_TAIL_LIMIT: u64 = 1000;

/// Smallest `n` for which the one-to-one `m`-window is proven.
pub const ONE_TO_ONE_MIN_N: u64 = 10;
/// Smallest `n` for which the RIP `m`-window is proven.
pub const RIP_MIN_N: u64 = 800;

/// Bisection range for [`solve_threshold`].
pub const SEARCH_MAX_M: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    Injective,
    InjectiveOrthogonal,
    RipUnion,
    LinearJl,
    OneToOneMLower,
    OneToOneMUpper,
    RipMEps1,
    RipMEps2,
}

impl FormulaId {
    pub fn as_str(self) -> &'static str {
        match self {
            FormulaId::Injective => "injective",
            FormulaId::InjectiveOrthogonal => "injective_orthogonal",
            FormulaId::RipUnion => "rip_union",
            FormulaId::LinearJl => "linear_jl",
            FormulaId::OneToOneMLower => "one_to_one_m_lower",
            FormulaId::OneToOneMUpper => "one_to_one_m_upper",
            FormulaId::RipMEps1 => "rip_m_eps1",
            FormulaId::RipMEps2 => "rip_m_eps2",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated sample-size formula.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub formula_id: FormulaId,
    pub n: u64,
    pub delta: Option<f64>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    /// The real value of the formula, before rounding up.
    pub m_value: f64,
    /// `⌈m_value⌉`, at least 1.
    pub m_int: u64,
    pub validity_note: String,
}

impl BoundsReport {
    fn new(formula_id: FormulaId, n: u64, m_value: f64) -> Result<Self> {
        if !m_value.is_finite() {
            return Err(Error::param("m", format!("{formula_id} evaluates to {m_value}")));
        }
        Ok(BoundsReport {
            formula_id,
            n,
            delta: None,
            eps1: None,
            eps2: None,
            m_value,
            m_int: (m_value.ceil().max(1.0)) as u64,
            validity_note: String::new(),
        })
    }

    fn delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    fn eps(mut self, eps1: f64, eps2: Option<f64>) -> Self {
        self.eps1 = Some(eps1);
        self.eps2 = eps2;
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.validity_note = note.into();
        self
    }
}

pub const BOUNDS_CSV_HEADER: [&str; 8] = ["formula_id", "n", "delta", "eps1", "eps2", "m_value", "m_int", "validity_note"];

pub fn write_bounds_csv<W: Write>(reports: &[BoundsReport], sink: W) -> Result<()> {
    let opt = |v: Option<f64>| v.map(|x| format_sig(x, 10)).unwrap_or_default();
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(BOUNDS_CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.formula_id.as_str().to_string(),
            r.n.to_string(),
            opt(r.delta),
            opt(r.eps1),
            opt(r.eps2),
            format_sig(r.m_value, 10),
            r.m_int.to_string(),
            r.validity_note.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `m ≥ ln(n²/(2ε)) / ln(1/δ)`: injectivity with probability `1 − ε` when
/// every pair satisfies `d_geo > 1 − delta_sep`.
pub fn m_injective(n: u64, eps: f64, delta_sep: f64) -> Result<BoundsReport> {
    check_n(n)?;
    check_open_unit("eps", eps)?;
    check_open_unit("delta-sep", delta_sep)?;
    let nf = n as f64;
    let m = (nf * nf / (2.0 * eps)).ln() / (1.0 / delta_sep).ln();
    Ok(BoundsReport::new(FormulaId::Injective, n, m)?
        .delta(delta_sep)
        .eps(eps, None)
        .note(format!("pairwise d_geo > {}", format_sig(1.0 - delta_sep, 10))))
}

/// `m ≥ 2·log2(n) + log2(1/(2ε))`: injectivity for pairwise orthogonal points.
pub fn m_injective_orthogonal(n: u64, eps: f64) -> Result<BoundsReport> {
    check_n(n)?;
    check_open_unit("eps", eps)?;
    let m = 2.0 * (n as f64).log2() + (1.0 / (2.0 * eps)).log2();
    Ok(BoundsReport::new(FormulaId::InjectiveOrthogonal, n, m)?
        .eps(eps, None)
        .note("pairwise orthogonal points"))
}

/// `m ≥ ln(n²/ε) / (2δ²)`: δ-RIP with probability `1 − ε` via Hoeffding and
/// a union bound over pairs.
pub fn m_rip_union(n: u64, eps: f64, delta: f64) -> Result<BoundsReport> {
    check_n(n)?;
    check_open_unit("eps", eps)?;
    if delta >= 0.5 {
        return Err(Error::validity("delta", format!("{delta} >= 1/2")));
    }
    check_half_delta(delta)?;
    let nf = n as f64;
    let m = (nf * nf / eps).ln() / (2.0 * delta * delta);
    Ok(BoundsReport::new(FormulaId::RipUnion, n, m)?
        .delta(delta)
        .eps(eps, None)
        .note("pairwise orthogonal points, delta < 1/2"))
}

/// `m ≥ 4·ln(n) / (δ²/2 − δ³/3)`, the linear Johnson–Lindenstrauss
/// requirement, for comparison.
pub fn m_linear_jl(n: u64, delta: f64) -> Result<BoundsReport> {
    check_n(n)?;
    check_open_unit("delta", delta)?;
    let m = linear_jl_from_ln_n((n as f64).ln(), delta);
    Ok(BoundsReport::new(FormulaId::LinearJl, n, m)?
        .delta(delta)
        .note("linear map into R^m, squared Euclidean distortion"))
}

pub(crate) fn linear_jl_from_ln_n(ln_n: f64, delta: f64) -> f64 {
    4.0 * ln_n / (delta * delta / 2.0 - delta.powi(3) / 3.0)
}

/// Per-unit-`m` exponent `−½·ln(1 − 4δ²) + δ·ln((1 − 2δ)/(1 + 2δ))`.
pub fn rate(delta: f64) -> f64 {
    -0.5 * (-4.0 * delta * delta).ln_1p() + delta * ((-2.0 * delta).ln_1p() - (2.0 * delta).ln_1p())
}

/// `q = 1 / (½·ln(1 − 4δ²) + δ·ln((1 + 2δ)/(1 − 2δ)))`, roughly `1/(2δ²)`.
pub fn q(delta: f64) -> f64 {
    1.0 / (0.5 * (1.0 - 4.0 * delta * delta).ln() + delta * ((1.0 + 2.0 * delta) / (1.0 - 2.0 * delta)).ln())
}

/// `p^δ = P(|Y − m/2| ≥ mδ) = 2·2^{−m}·Σ_{k ≥ ⌈m/2 + mδ⌉} C(m, k)`, exactly.
pub fn p_delta_exact(m: u64, delta: f64) -> Result<ExactProbability> {
    check_m(m)?;
    check_half_delta(delta)?;
    let a = tail_start(m, delta);
    if a > m {
        return Ok(ExactProbability::zero(ExactMethod::BinomialTail));
    }
    // Walk C(m, k) down from k = m with C(m, k−1) = C(m, k)·k / (m − k + 1).
    let mut coeff = BigUint::one();
    let mut sum = BigUint::one();
    for k in ((a + 1)..=m).rev() {
        coeff = coeff * k / (m - k + 1);
        sum += &coeff;
    }
    Ok(ExactProbability::dyadic(sum << 1u32, m, ExactMethod::BinomialTail))
}

/// `p^δ` as a float: exact below [`EXACT_TAIL_LIMIT`], log-gamma summation
/// above it.
pub fn p_delta_f64(m: u64, delta: f64) -> Result<f64> {
    if m <= EXACT_TAIL_LIMIT {
        return Ok(p_delta_exact(m, delta)?.float_value);
    }
    check_half_delta(delta)?;
    Ok(ln_p_delta_large(m, delta).exp())
}

fn ln_choose(m: u64, k: u64) -> f64 {
    ln_gamma(m as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((m - k) as f64 + 1.0)
}

fn ln_p_delta_large(m: u64, delta: f64) -> f64 {
    let a = tail_start(m, delta);
    if a > m {
        return f64::NEG_INFINITY;
    }
    // Terms past A shrink by (m − k)/(k + 1) < 1; sum relative to the first.
    let (mut term, mut sum) = (1.0f64, 1.0f64);
    for k in a..m {
        term *= (m - k) as f64 / (k + 1) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    std::f64::consts::LN_2 + ln_choose(m, a) + sum.ln() - m as f64 * std::f64::consts::LN_2
}

/// Every λ-type quantity for `n` orthogonal points at one `(m, δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaBounds {
    /// `C·p^δ`, from the exact tail.
    pub lambda_exact: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `Λ = C/√(2π) · e^{m·rate}`.
    pub big_lambda: f64,
    /// Exponent used in `λ1`: `m·rate`, or its lower Taylor bracket.
    pub exponent_lo: f64,
    /// Exponent used in `λ2`: `m·rate`, or its upper Taylor bracket.
    pub exponent_hi: f64,
    /// `m·rate` itself.
    pub exponent: f64,
}

/// Stirling bounds on `λ^δ`. With `taylor`, the exponent `m·rate` is replaced
/// by `(−2mδ² − 4mδ³)/(1 − 2δ)` in `λ1` and `(−2mδ² + 8mδ³)/(1 − 4δ²)` in `λ2`
/// (valid for `δ < 1/4`).
pub fn lambda_bounds(n: u64, m: u64, delta: f64, taylor: bool) -> Result<LambdaBounds> {
    check_n(n)?;
    check_m(m)?;
    check_half_delta(delta)?;
    if taylor && delta >= 0.25 {
        return Err(Error::param("delta", format!("Taylor form needs delta < 1/4, got {delta}")));
    }
    let mf = m as f64;
    let exponent = mf * rate(delta);
    let (exponent_lo, exponent_hi) = if taylor { taylor_exponents(m, delta) } else { (exponent, exponent) };
    let ln_pairs = ln_pairs(n);
    let ln_sqrt_2pi = 0.5 * (2.0 * PI).ln();
    Ok(LambdaBounds {
        lambda_exact: pairs_f64(n) * p_delta_f64(m, delta)?,
        lambda1: (ln_pairs - 1.0 / 6.0 - ln_sqrt_2pi - 0.5 * mf.ln() + exponent_lo).exp(),
        lambda2: (ln_pairs + 1.0 / 12.0 - ln_sqrt_2pi + 0.5 * mf.ln() + exponent_hi).exp(),
        big_lambda: (ln_pairs - ln_sqrt_2pi + exponent).exp(),
        exponent_lo,
        exponent_hi,
        exponent,
    })
}

/// The two Taylor brackets of `m·rate(δ)`, lower then upper.
pub fn taylor_exponents(m: u64, delta: f64) -> (f64, f64) {
    let mf = m as f64;
    let (d2, d3) = (delta * delta, delta.powi(3));
    (
        (-2.0 * mf * d2 - 4.0 * mf * d3) / (1.0 - 2.0 * delta),
        (-2.0 * mf * d2 + 8.0 * mf * d3) / (1.0 - 4.0 * d2),
    )
}

/// Which Stein–Chen error term a window uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EtaForm {
    /// `η = C·p²`: the positively-associated form with pairwise independent
    /// indicators.
    Pairwise,
    /// `η = C·(4n − 7)·p²`: the general form, counting the `2(n − 2)` pairs
    /// that share a point with each pair.
    #[default]
    General,
}

impl EtaForm {
    pub fn as_str(self) -> &'static str {
        match self {
            EtaForm::Pairwise => "pairwise",
            EtaForm::General => "general",
        }
    }

    /// `η` for `n` points whose pair indicators each fire with probability `p`.
    pub fn eta(self, n: u64, p: f64) -> f64 {
        let c = pairs_f64(n);
        match self {
            EtaForm::Pairwise => c * p * p,
            EtaForm::General => c * (4.0 * n as f64 - 7.0) * p * p,
        }
    }
}

impl fmt::Display for EtaForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EtaForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pairwise" => Ok(EtaForm::Pairwise),
            "general" => Ok(EtaForm::General),
            other => Err(Error::param("eta-form", format!("{other:?} (expected pairwise|general)"))),
        }
    }
}

/// A probability interval `[e^{−λ_hi} − η, e^{−λ_lo} + η] ∩ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseWindow {
    pub lo: f64,
    pub hi: f64,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub eta: f64,
    pub eta_form: EtaForm,
}

impl PhaseWindow {
    pub fn new(lambda_lo: f64, lambda_hi: f64, eta: f64, eta_form: EtaForm) -> Self {
        PhaseWindow {
            lo: ((-lambda_hi).exp() - eta).max(0.0),
            hi: ((-lambda_lo).exp() + eta).min(1.0),
            lambda_lo,
            lambda_hi,
            eta,
            eta_form,
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }
}

/// Window for `P(B_m injective)` on `n` orthogonal points, pairwise η.
pub fn one_to_one_window(n: u64, m: u64) -> Result<PhaseWindow> {
    one_to_one_window_with(n, m, EtaForm::Pairwise)
}

/// `λ = C/2^m`, `p = 2^{−m}`.
pub fn one_to_one_window_with(n: u64, m: u64, form: EtaForm) -> Result<PhaseWindow> {
    check_n(n)?;
    check_m(m)?;
    let p = ldexp(1.0, -(m as i64));
    let lambda = pairs_f64(n) * p;
    Ok(PhaseWindow::new(lambda, lambda, form.eta(n, p), form))
}

/// Where `p^δ` comes from when building a RIP window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PDeltaSource {
    #[default]
    Exact,
    /// The upper bound `e^{1/12}·√m/√(2π)·e^{m·rate}`.
    StirlingBound,
}

/// Window for `P(B_m is a δ-RIP)` on `n` orthogonal points: general η, exact
/// `p^δ`.
pub fn rip_window(n: u64, m: u64, delta: f64) -> Result<PhaseWindow> {
    rip_window_with(n, m, delta, EtaForm::General, PDeltaSource::Exact)
}

pub fn rip_window_with(n: u64, m: u64, delta: f64, form: EtaForm, source: PDeltaSource) -> Result<PhaseWindow> {
    let lb = lambda_bounds(n, m, delta, false)?;
    let p = match source {
        PDeltaSource::Exact => p_delta_f64(m, delta)?,
        PDeltaSource::StirlingBound => lb.lambda2 / pairs_f64(n),
    };
    Ok(PhaseWindow::new(lb.lambda1, lb.lambda2, form.eta(n, p), form))
}

/// One row of the windows CSV: both η forms, with `lo`/`hi` from `form`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowRow {
    pub n: u64,
    pub m: u64,
    pub delta: Option<f64>,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub eta_pairwise: f64,
    pub eta_general: f64,
    pub lo: f64,
    pub hi: f64,
}

impl WindowRow {
    pub fn one_to_one(n: u64, m: u64, form: EtaForm) -> Result<Self> {
        let pw = one_to_one_window_with(n, m, EtaForm::Pairwise)?;
        let gw = one_to_one_window_with(n, m, EtaForm::General)?;
        Ok(Self::from_windows(n, m, None, pw, gw, form))
    }

    pub fn rip(n: u64, m: u64, delta: f64, form: EtaForm) -> Result<Self> {
        let pw = rip_window_with(n, m, delta, EtaForm::Pairwise, PDeltaSource::Exact)?;
        let gw = rip_window_with(n, m, delta, EtaForm::General, PDeltaSource::Exact)?;
        Ok(Self::from_windows(n, m, Some(delta), pw, gw, form))
    }

    fn from_windows(n: u64, m: u64, delta: Option<f64>, pw: PhaseWindow, gw: PhaseWindow, form: EtaForm) -> Self {
        let chosen = match form {
            EtaForm::Pairwise => pw,
            EtaForm::General => gw,
        };
        WindowRow {
            n,
            m,
            delta,
            lambda_lo: gw.lambda_lo,
            lambda_hi: gw.lambda_hi,
            eta_pairwise: pw.eta,
            eta_general: gw.eta,
            lo: chosen.lo,
            hi: chosen.hi,
        }
    }
}

pub const WINDOWS_CSV_HEADER: [&str; 9] =
    ["n", "m", "delta", "lambda_lo", "lambda_hi", "eta_pairwise", "eta_general", "lo", "hi"];

pub fn write_windows_csv<W: Write>(rows: &[WindowRow], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(WINDOWS_CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            r.delta.map(|d| format_sig(d, 10)).unwrap_or_default(),
            format_sig(r.lambda_lo, 10),
            format_sig(r.lambda_hi, 10),
            format_sig(r.eta_pairwise, 10),
            format_sig(r.eta_general, 10),
            format_sig(r.lo, 10),
            format_sig(r.hi, 10),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// The one-to-one transition bounds in `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneToOneMWindow {
    pub n: u64,
    pub eps1: f64,
    pub eps2: f64,
    /// `log2(n(n−1) / (2·ln(1/(1 − ε1/1.01))))`.
    pub m_lower: f64,
    /// `log2(n(n−1) / (2·ln(1/(1 − ε2/0.99))))`.
    pub m_upper: f64,
    pub validity_note: String,
}

impl OneToOneMWindow {
    pub fn reports(&self) -> Result<Vec<BoundsReport>> {
        Ok(vec![
            BoundsReport::new(FormulaId::OneToOneMLower, self.n, self.m_lower)?
                .eps(self.eps1, Some(self.eps2))
                .note(self.validity_note.clone()),
            BoundsReport::new(FormulaId::OneToOneMUpper, self.n, self.m_upper)?
                .eps(self.eps1, Some(self.eps2))
                .note(self.validity_note.clone()),
        ])
    }
}

pub fn one_to_one_m_window(n: u64, eps1: f64, eps2: f64, force: bool) -> Result<OneToOneMWindow> {
    check_n(n)?;
    check_eps_pair(eps1, eps2, 1.0)?;
    if eps2 >= 0.99 {
        return Err(Error::param("eps2", format!("{eps2} must be below 0.99")));
    }
    let validity_note = range_note(n, ONE_TO_ONE_MIN_N, force)?;
    let nn = n as f64 * (n as f64 - 1.0);
    let threshold = |eps: f64, c: f64| (nn / (2.0 * ln_inv_one_minus(eps / c))).log2();
    let (m_lower, m_upper) = (threshold(eps1, 1.01), threshold(eps2, 0.99));
    if m_lower.partial_cmp(&m_upper) != Some(std::cmp::Ordering::Less) {
        return Err(Error::param(
            "eps1",
            format!("eps1={eps1}, eps2={eps2} give an empty window [{m_lower}, {m_upper}]"),
        ));
    }
    Ok(OneToOneMWindow {
        n,
        eps1,
        eps2,
        m_lower,
        m_upper,
        validity_note,
    })
}

/// The RIP transition bounds in `m`, as printed closed forms and as numeric
/// roots of the λ-bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RipMWindow {
    pub n: u64,
    pub delta: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub q: f64,
    /// `r = ln(n(n−1)/(2√(2π)))`.
    pub r: f64,
    /// `q·[ln A − ln ln A]`, `A = n(n−1) / (2√(2π)·e^{1/6}·ln(1/(1 − ε1/1.01)))`.
    pub m_formula_eps1: f64,
    /// `q·[ln B + ln ln B]`, `B = n(n−1)·e^{1/12} / (2√(2π)·ln(1/(1 − ε2/0.99)))`.
    pub m_formula_eps2: f64,
    /// Root of `λ1(m) = ln(1/(1 − ε1/1.01))`.
    pub crossing_eps1: Option<f64>,
    /// Root of `λ2(m) = ln(1/(1 − ε2/0.99))`.
    pub crossing_eps2: Option<f64>,
    pub validity_note: String,
}

impl RipMWindow {
    pub fn reports(&self) -> Result<Vec<BoundsReport>> {
        let report = |id, m| -> Result<BoundsReport> {
            Ok(BoundsReport::new(id, self.n, m)?
                .delta(self.delta)
                .eps(self.eps1, Some(self.eps2))
                .note(self.validity_note.clone()))
        };
        Ok(vec![
            report(FormulaId::RipMEps1, self.m_formula_eps1)?,
            report(FormulaId::RipMEps2, self.m_formula_eps2)?,
        ])
    }
}

pub fn rip_m_window(n: u64, delta: f64, eps1: f64, eps2: f64, force: bool) -> Result<RipMWindow> {
    check_n(n)?;
    check_half_delta(delta)?;
    check_eps_pair(eps1, eps2, 0.99)?;
    let validity_note = range_note(n, RIP_MIN_N, force)?;

    let nn = n as f64 * (n as f64 - 1.0);
    let sqrt_2pi = (2.0 * PI).sqrt();
    let target1 = ln_inv_one_minus(eps1 / 1.01);
    let target2 = ln_inv_one_minus(eps2 / 0.99);
    let a = nn / (2.0 * sqrt_2pi * (1.0f64 / 6.0).exp() * target1);
    let b = nn * (1.0f64 / 12.0).exp() / (2.0 * sqrt_2pi * target2);
    let q = q(delta);
    let m_formula_eps1 = q * (a.ln() - a.ln().ln());
    let m_formula_eps2 = q * (b.ln() + b.ln().ln());
    if !(m_formula_eps1.is_finite() && m_formula_eps2.is_finite()) {
        return Err(Error::param("n", format!("closed forms undefined at n={n}")));
    }

    let root = |target, which| match solve_threshold(n, delta, target, which) {
        Ok(Threshold::Continuous(m)) => Some(m),
        _ => None,
    };
    Ok(RipMWindow {
        n,
        delta,
        eps1,
        eps2,
        q,
        r: (nn / (2.0 * sqrt_2pi)).ln(),
        m_formula_eps1,
        m_formula_eps2,
        crossing_eps1: root(target1, LambdaForm::Lambda1),
        crossing_eps2: root(target2, LambdaForm::Lambda2),
        validity_note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaForm {
    Lambda1,
    Lambda2,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Real `m` where a continuous bound equals the target (to 1e-6).
    Continuous(f64),
    /// `λ_exact(last_above) ≥ target` and `λ_exact(m) < target` for every
    /// `m ≥ first_below = last_above + 1`.
    Bracket { last_above: u64, first_below: u64 },
}

/// Where `λ(m)` falls through `target`.
///
/// `λ1` is decreasing in `m`; `λ2` rises until `m = 1/(2|rate|)` and is
/// searched on its decreasing branch. The exact `λ` is not monotone (even and
/// odd `m` interleave), so its answer is the last integer still at or above
/// the target: found by scanning down from the `λ2` root, past which
/// `λ ≤ λ2 < target`.
pub fn solve_threshold(n: u64, delta: f64, target: f64, which: LambdaForm) -> Result<Threshold> {
    check_n(n)?;
    check_half_delta(delta)?;
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::param("target", format!("{target} must be positive")));
    }
    match which {
        LambdaForm::Lambda1 | LambdaForm::Lambda2 => {
            continuous_root(n, delta, target, which).map(Threshold::Continuous)
        }
        LambdaForm::Exact => {
            let upper = continuous_root(n, delta, target, LambdaForm::Lambda2)?;
            let pairs = pairs_f64(n);
            let mut m = upper.floor().max(1.0) as u64;
            loop {
                if pairs * p_delta_f64(m, delta)? >= target {
                    return Ok(Threshold::Bracket {
                        last_above: m,
                        first_below: m + 1,
                    });
                }
                if m == 1 {
                    return Err(Error::NoCrossing {
                        target,
                        lo: 1.0,
                        hi: upper,
                    });
                }
                m -= 1;
            }
        }
    }
}

fn continuous_root(n: u64, delta: f64, target: f64, which: LambdaForm) -> Result<f64> {
    let ln_pairs = ln_pairs(n);
    let ln_sqrt_2pi = 0.5 * (2.0 * PI).ln();
    let rate = rate(delta);
    let ln_target = target.ln();
    let f = |m: f64| -> f64 {
        let ln_lambda = match which {
            LambdaForm::Lambda1 => ln_pairs - 1.0 / 6.0 - ln_sqrt_2pi - 0.5 * m.ln() + m * rate,
            _ => ln_pairs + 1.0 / 12.0 - ln_sqrt_2pi + 0.5 * m.ln() + m * rate,
        };
        ln_lambda - ln_target
    };
    let mut lo = match which {
        LambdaForm::Lambda1 => 1.0,
        _ => (-0.5 / rate).max(1.0),
    };
    let mut hi = SEARCH_MAX_M;
    if f(lo) < 0.0 || f(hi) > 0.0 {
        return Err(Error::NoCrossing { target, lo, hi });
    }
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `C(n, 2)` as a float.
pub fn pairs_f64(n: u64) -> f64 {
    n as f64 * (n as f64 - 1.0) / 2.0
}

fn ln_pairs(n: u64) -> f64 {
    pairs_f64(n).ln()
}

/// `ln(1/(1 − x))`.
fn ln_inv_one_minus(x: f64) -> f64 {
    -(-x).ln_1p()
}

fn range_note(n: u64, min_n: u64, force: bool) -> Result<String> {
    if n >= min_n {
        Ok(format!("requires n >= {min_n}"))
    } else if force {
        Ok(format!("outside proven range: requires n >= {min_n} (forced)"))
    } else {
        Err(Error::validity("n", format!("n = {n} but the window is proven only for n >= {min_n}")))
    }
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::param("n", format!("need at least 2 points, got {n}")));
    }
    Ok(())
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::param("m", "must be at least 1"));
    }
    Ok(())
}

fn check_open_unit(name: &'static str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::param(name, format!("{x} is not in (0, 1)")));
    }
    Ok(())
}

fn check_half_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::param("delta", format!("{delta} is not in (0, 1/2)")));
    }
    Ok(())
}

fn check_eps_pair(eps1: f64, eps2: f64, cap: f64) -> Result<()> {
    if !(eps2 > 0.0 && eps2 < eps1 && eps1 < cap) {
        return Err(Error::param("eps1", format!("need 0 < eps2 < eps1 < {cap}, got eps1={eps1}, eps2={eps2}")));
    }
    Ok(())
}
