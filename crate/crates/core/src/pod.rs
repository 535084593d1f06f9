//! â-versus-a reliability analysis.
//!
//! Errors `â` are regressed on the prediction horizon `a` as
//! `â = b + m·a + ε`, `ε ~ N(0, τ)`, on one of four linear/logarithmic axis
//! combinations. The probability of accurate prediction at horizon `a` is
//! `Φ((â_th − b − m·a) / τ)`; its lower confidence bound propagates the
//! parameter covariance through the delta method. `a90` and `a90/95` are the
//! horizons at which the point estimate and the bound fall to 90 %.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ErrorSeries;
use crate::normal;

/// Threshold used throughout for `a90` / `a90/95`.
pub const TARGET_PROBABILITY: f64 = 0.9;
/// Smallest horizon probed when solving for a probability level.
pub const SMALLEST_HORIZON: f64 = 1e-9;
/// Maximum |corr(|residual|, a)| tolerated by the transform screen.
pub const HETEROSCEDASTICITY_LIMIT: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

impl Scale {
    fn apply(self, v: f64, what: &str) -> Result<f64> {
        match self {
            Scale::Linear => Ok(v),
            Scale::Log if v > 0.0 => Ok(v.ln()),
            Scale::Log => Err(Error::Domain(format!("{what} = {v} is not positive on a logarithmic axis"))),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Scale::Linear => "linear",
            Scale::Log => "log",
        }
    }
}

/// Axis scales for the horizon `a` and the response `â`. Rendered as
/// `<a scale>-<â scale>`, e.g. `linear-log` regresses `ln â` on `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AxisTransform {
    pub a_scale: Scale,
    pub ahat_scale: Scale,
}

impl AxisTransform {
    pub const LINEAR_LINEAR: Self = Self { a_scale: Scale::Linear, ahat_scale: Scale::Linear };
    pub const LINEAR_LOG: Self = Self { a_scale: Scale::Linear, ahat_scale: Scale::Log };
    pub const LOG_LINEAR: Self = Self { a_scale: Scale::Log, ahat_scale: Scale::Linear };
    pub const LOG_LOG: Self = Self { a_scale: Scale::Log, ahat_scale: Scale::Log };

    /// Candidates in tie-break order.
    pub const CANDIDATES: [Self; 4] = [Self::LINEAR_LINEAR, Self::LINEAR_LOG, Self::LOG_LINEAR, Self::LOG_LOG];

    pub fn map_a(&self, a: f64) -> Result<f64> {
        self.a_scale.apply(a, "horizon")
    }

    pub fn map_ahat(&self, ahat: f64) -> Result<f64> {
        self.ahat_scale.apply(ahat, "response")
    }
}

impl fmt::Display for AxisTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a_scale.as_str(), self.ahat_scale.as_str())
    }
}

impl std::str::FromStr for AxisTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::CANDIDATES
            .into_iter()
            .find(|t| t.to_string() == s.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown axis transform `{s}`")))
    }
}

/// Response data for the regression: one response per process-parameter
/// value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelData {
    pub levels: Vec<f64>,
    pub responses: Vec<f64>,
    /// True when each response is a per-level mean.
    pub averaged: bool,
}

impl LevelData {
    /// Averaged data: strictly increasing levels, one mean response each.
    pub fn new(levels: Vec<f64>, responses: Vec<f64>) -> Result<Self> {
        Self::check(&levels, &responses)?;
        if levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("levels must be strictly increasing".into()));
        }
        Ok(Self { levels, responses, averaged: true })
    }

    /// Raw scatter: any number of responses per level.
    pub fn scatter(levels: Vec<f64>, responses: Vec<f64>) -> Result<Self> {
        Self::check(&levels, &responses)?;
        Ok(Self { levels, responses, averaged: false })
    }

    /// Every (horizon, error) pair of every series, unaveraged.
    pub fn scatter_from_series(series: &[ErrorSeries]) -> Result<Self> {
        let (levels, responses) =
            series.iter().flat_map(|s| s.horizons.iter().copied().zip(s.errors.iter().copied())).unzip();
        Self::scatter(levels, responses)
    }

    fn check(levels: &[f64], responses: &[f64]) -> Result<()> {
        if levels.len() != responses.len() {
            return Err(Error::InvalidInput("levels and responses differ in length".into()));
        }
        if levels.iter().chain(responses).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("level data must be finite".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Mean response at each horizon across series sharing one horizon grid.
pub fn average_per_level(series: &[ErrorSeries]) -> Result<LevelData> {
    let first = series.first().ok_or(Error::EmptyGroup)?;
    let mut sums = vec![0.0; first.len()];
    for (index, s) in series.iter().enumerate() {
        let aligned = s.horizons.len() == first.horizons.len()
            && s.horizons.iter().zip(&first.horizons).all(|(a, b)| (a - b).abs() <= 1e-12);
        if !aligned {
            return Err(Error::GridMismatch { index });
        }
        for (acc, e) in sums.iter_mut().zip(&s.errors) {
            *acc += e;
        }
    }
    let n = series.len() as f64;
    LevelData::new(first.horizons.clone(), sums.into_iter().map(|s| s / n).collect())
}

/// Maximum-likelihood fit of the linear model on transformed axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub b: f64,
    pub m: f64,
    pub tau: f64,
    /// Covariance of `(b, m, τ)` from the inverse Fisher information.
    pub covariance: [[f64; 3]; 3],
    pub transform: AxisTransform,
    pub n: usize,
    pub r_squared: f64,
    /// |Pearson correlation| between absolute residuals and the transformed
    /// horizon.
    pub heteroscedasticity: f64,
    /// Set when the residuals vanish; the POAP curve is then a step.
    pub degenerate: bool,
}

impl RegressionFit {
    /// Builds a fit from known parameters, e.g. for analytic checks.
    pub fn from_parameters(b: f64, m: f64, tau: f64, covariance: [[f64; 3]; 3], transform: AxisTransform) -> Self {
        Self { b, m, tau, covariance, transform, n: 0, r_squared: 1.0, heteroscedasticity: 0.0, degenerate: tau == 0.0 }
    }

    /// Regression mean on the transformed response axis.
    pub fn mean_response(&self, a: f64) -> Result<f64> {
        Ok(self.b + self.m * self.transform.map_a(a)?)
    }
}

fn pearson_abs(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        0.0
    } else {
        (sxy / (sxx * syy).sqrt()).abs()
    }
}

/// Maximum-likelihood estimate of `(b, m, τ)`.
///
/// For normal errors this is ordinary least squares with `τ² = SSE / n`.
/// The covariance is `τ²·(XᵀX)⁻¹` for `(b, m)`, `τ² / 2n` for `τ`, and zero
/// between the two blocks.
pub fn fit_mle(data: &LevelData, transform: AxisTransform) -> Result<RegressionFit> {
    let n = data.len();
    if n < 3 {
        return Err(Error::InsufficientLevels { needed: 3, got: n });
    }
    let x = data.levels.iter().map(|&a| transform.map_a(a)).collect::<Result<Vec<_>>>()?;
    let y = data.responses.iter().map(|&v| transform.map_ahat(v)).collect::<Result<Vec<_>>>()?;
    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let y_mean = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut sst) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(&y) {
        sxx += (xi - x_mean).powi(2);
        sxy += (xi - x_mean) * (yi - y_mean);
        sst += (yi - y_mean).powi(2);
    }
    let x_scale = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if sxx <= 1e-24 * nf * x_scale.max(1.0).powi(2) {
        return Err(Error::SingularDesign);
    }
    let m = sxy / sxx;
    let b = y_mean - m * x_mean;
    let residuals: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| yi - b - m * xi).collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let mut tau = (sse / nf).sqrt();

    let y_scale = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let degenerate = tau <= 1e-12 * y_scale;
    if degenerate {
        tau = 0.0;
    }
    let tau2 = tau * tau;
    let var_b = tau2 * (1.0 / nf + x_mean * x_mean / sxx);
    let cov_bm = -tau2 * x_mean / sxx;
    let var_m = tau2 / sxx;
    let var_tau = tau2 / (2.0 * nf);
    let covariance = [[var_b, cov_bm, 0.0], [cov_bm, var_m, 0.0], [0.0, 0.0, var_tau]];

    let r_squared = if sst > 0.0 { (1.0 - sse / sst).clamp(0.0, 1.0) } else { 1.0 };
    let heteroscedasticity = if degenerate {
        0.0
    } else {
        let abs_res: Vec<f64> = residuals.iter().map(|r| r.abs()).collect();
        pearson_abs(&abs_res, &x)
    };

    Ok(RegressionFit { b, m, tau, covariance, transform, n, r_squared, heteroscedasticity, degenerate })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateFit {
    pub transform: AxisTransform,
    pub r_squared: f64,
    pub heteroscedasticity: f64,
    pub admissible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSelection {
    pub transform: AxisTransform,
    pub candidates: Vec<CandidateFit>,
    /// True when every candidate failed the heteroscedasticity screen and
    /// the best `r²` was taken anyway.
    pub fallback: bool,
}

/// Chooses the axis combination on which the data are most nearly linear
/// with evenly spread residuals.
///
/// Candidates whose |corr(|residual|, a)| exceeds 0.7 are screened out; the
/// highest `r²` among the rest wins, ties resolved in
/// [`AxisTransform::CANDIDATES`] order. Logarithmic axes are only tried on
/// strictly positive data.
pub fn select_transform(data: &LevelData) -> Result<TransformSelection> {
    if data.len() < 3 {
        return Err(Error::InsufficientLevels { needed: 3, got: data.len() });
    }
    let a_positive = data.levels.iter().all(|v| *v > 0.0);
    let ahat_positive = data.responses.iter().all(|v| *v > 0.0);
    let candidates: Vec<CandidateFit> = AxisTransform::CANDIDATES
        .into_iter()
        .filter(|t| (t.a_scale == Scale::Linear || a_positive) && (t.ahat_scale == Scale::Linear || ahat_positive))
        .filter_map(|t| fit_mle(data, t).ok())
        .map(|f| CandidateFit {
            transform: f.transform,
            r_squared: f.r_squared,
            heteroscedasticity: f.heteroscedasticity,
            admissible: f.heteroscedasticity <= HETEROSCEDASTICITY_LIMIT,
        })
        .collect();
    if candidates.is_empty() {
        return Err(Error::SingularDesign);
    }

    let best = |pool: &mut dyn Iterator<Item = &CandidateFit>| -> Option<AxisTransform> {
        let mut winner: Option<&CandidateFit> = None;
        for c in pool {
            match winner {
                Some(w) if c.r_squared <= w.r_squared + 1e-12 => {}
                _ => winner = Some(c),
            }
        }
        winner.map(|c| c.transform)
    };
    let (transform, fallback) = match best(&mut candidates.iter().filter(|c| c.admissible)) {
        Some(t) => (t, false),
        None => (best(&mut candidates.iter()).expect("non-empty"), true),
    };
    Ok(TransformSelection { transform, candidates, fallback })
}

/// Probability that the error at horizon `a` stays below `threshold`.
pub fn poap(fit: &RegressionFit, threshold: f64, a: f64) -> Result<f64> {
    let x = fit.transform.map_a(a)?;
    let th = fit.transform.map_ahat(threshold)?;
    let mean = fit.b + fit.m * x;
    if fit.tau == 0.0 {
        return Ok(if mean < th { 1.0 } else { 0.0 });
    }
    Ok(normal::cdf((th - mean) / fit.tau))
}

#[allow(clippy::needless_range_loop)]
fn check_psd(c: &[[f64; 3]; 3]) -> Result<()> {
    let scale = (0..3).map(|i| c[i][i].abs()).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    for i in 0..3 {
        for j in 0..3 {
            if !c[i][j].is_finite() || (c[i][j] - c[j][i]).abs() > tol {
                return Err(Error::NonPsdCovariance);
            }
        }
        if c[i][i] < -tol {
            return Err(Error::NonPsdCovariance);
        }
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if c[i][i] * c[j][j] - c[i][j] * c[j][i] < -tol * scale {
            return Err(Error::NonPsdCovariance);
        }
    }
    let det = c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1]) - c[0][1] * (c[1][0] * c[2][2] - c[1][2] * c[2][0])
        + c[0][2] * (c[1][0] * c[2][1] - c[1][1] * c[2][0]);
    if det < -tol * scale * scale {
        return Err(Error::NonPsdCovariance);
    }
    Ok(())
}

/// Standard error of `z(a) = (â_th − b − m·x) / τ` by the delta method.
fn z_standard_error(fit: &RegressionFit, x: f64, z: f64) -> Result<f64> {
    let g = [-1.0 / fit.tau, -x / fit.tau, -z / fit.tau];
    let c = &fit.covariance;
    let mut var = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            var += g[i] * c[i][j] * g[j];
        }
    }
    if var < 0.0 {
        // Rounding only; check_psd has already rejected real violations.
        var = 0.0;
    }
    Ok(var.sqrt())
}

/// One-sided lower confidence bound of [`poap`] at level `confidence`:
/// `Φ(z − q·SE(z))` with `q` the standard normal `confidence` quantile.
pub fn wald_lower_bound(fit: &RegressionFit, threshold: f64, a: f64, confidence: f64) -> Result<f64> {
    if !(0.5..1.0).contains(&confidence) {
        return Err(Error::InvalidInput(format!("confidence {confidence} must lie in [0.5, 1)")));
    }
    if fit.tau == 0.0 {
        return poap(fit, threshold, a);
    }
    check_psd(&fit.covariance)?;
    let x = fit.transform.map_a(a)?;
    let th = fit.transform.map_ahat(threshold)?;
    let z = (th - fit.b - fit.m * x) / fit.tau;
    let se = z_standard_error(fit, x, z)?;
    if se == 0.0 {
        return Ok(normal::cdf(z));
    }
    Ok(normal::cdf(z - normal::quantile(confidence) * se))
}

/// A horizon at which a probability curve reaches its target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum ReliableHorizon {
    /// The curve crosses the target inside the evaluated range.
    Within(f64),
    /// The curve is still at or above the target at the maximum horizon.
    Censored(f64),
    /// The curve is below the target even at the smallest horizon.
    Unreliable,
}

impl ReliableHorizon {
    /// Numeric value: the horizon, `H_max` when censored, 0 when unreliable.
    pub fn value(&self) -> f64 {
        match *self {
            Self::Within(a) | Self::Censored(a) => a,
            Self::Unreliable => 0.0,
        }
    }

    /// Total order for ranking: unreliable < any horizon < censored.
    pub fn rank_key(&self) -> f64 {
        match *self {
            Self::Within(a) => a,
            Self::Censored(_) => f64::INFINITY,
            Self::Unreliable => f64::NEG_INFINITY,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, Self::Censored(_))
    }

    pub fn status(&self) -> &'static str {
        match self {
            Self::Within(_) => "within",
            Self::Censored(_) => "censored",
            Self::Unreliable => "unreliable",
        }
    }
}

impl fmt::Display for ReliableHorizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Within(a) => f.write_str(&crate::report::format_trimmed(a, 3)),
            Self::Censored(h) => write!(f, "> {}", crate::report::format_trimmed(h, 3)),
            Self::Unreliable => f.write_str("0"),
        }
    }
}

/// Largest `a` in `(0, h_max]` with `curve(a) >= target`, for a curve that is
/// non-increasing in `a`. Bisection to 1e-12 min.
pub fn solve_a_at_probability<F>(mut curve: F, target: f64, h_max: f64) -> Result<ReliableHorizon>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(h_max > SMALLEST_HORIZON) {
        return Err(Error::InvalidInput(format!("maximum horizon {h_max} must be positive")));
    }
    if curve(h_max)? >= target {
        return Ok(ReliableHorizon::Censored(h_max));
    }
    if curve(SMALLEST_HORIZON)? < target {
        return Ok(ReliableHorizon::Unreliable);
    }
    let (mut lo, mut hi) = (SMALLEST_HORIZON, h_max);
    for _ in 0..200 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if curve(mid)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ReliableHorizon::Within(lo))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoapOptions {
    pub threshold_m: f64,
    pub h_max: f64,
    pub confidence: f64,
    /// Spacing of the exported curve grid, minutes.
    pub grid_step: f64,
    /// Fixed transform; `None` selects one from the data.
    pub transform: Option<AxisTransform>,
}

impl Default for PoapOptions {
    fn default() -> Self {
        Self { threshold_m: 20.0, h_max: 5.0, confidence: 0.95, grid_step: 0.05, transform: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoapCurve {
    pub threshold: f64,
    pub confidence: f64,
    pub grid: Vec<f64>,
    pub p: Vec<f64>,
    pub p_lower95: Vec<f64>,
    pub a90: ReliableHorizon,
    pub a90_95: ReliableHorizon,
    pub fit: RegressionFit,
    pub selection: Option<TransformSelection>,
    /// Number of error series that went into the level means.
    pub n_series: usize,
}

fn evaluation_grid(h_max: f64, step: f64) -> Vec<f64> {
    let count = (h_max / step + 1e-9).floor() as usize;
    let span = step * count as f64;
    (1..=count).map(|k| span * k as f64 / count as f64).collect()
}

/// Averages per level, picks the transform, fits, and evaluates the curve,
/// its lower bound and both reliability horizons.
pub fn build_poap_curve(series: &[ErrorSeries], opts: &PoapOptions) -> Result<PoapCurve> {
    if !(opts.threshold_m > 0.0) || !(opts.h_max > 0.0) || !(opts.grid_step > 0.0) {
        return Err(Error::InvalidInput("threshold, maximum horizon and grid step must be positive".into()));
    }
    let data = average_per_level(series)?;
    if data.len() < 3 {
        return Err(Error::InsufficientLevels { needed: 3, got: data.len() });
    }
    let selection = match opts.transform {
        Some(_) => None,
        None => Some(select_transform(&data)?),
    };
    let transform = opts.transform.or(selection.as_ref().map(|s| s.transform)).expect("transform chosen");
    let fit = fit_mle(&data, transform)?;
    curve_from_fit(fit, selection, series.len(), opts)
}

/// Evaluates a POAP curve for an existing fit.
pub fn curve_from_fit(
    fit: RegressionFit,
    selection: Option<TransformSelection>,
    n_series: usize,
    opts: &PoapOptions,
) -> Result<PoapCurve> {
    let th = opts.threshold_m;
    let grid = evaluation_grid(opts.h_max, opts.grid_step);
    let p = grid.iter().map(|&a| poap(&fit, th, a)).collect::<Result<Vec<_>>>()?;
    let p_lower95 = grid.iter().map(|&a| wald_lower_bound(&fit, th, a, opts.confidence)).collect::<Result<Vec<_>>>()?;
    let a90 = solve_a_at_probability(|a| poap(&fit, th, a), TARGET_PROBABILITY, opts.h_max)?;
    let a90_95 =
        solve_a_at_probability(|a| wald_lower_bound(&fit, th, a, opts.confidence), TARGET_PROBABILITY, opts.h_max)?;
    Ok(PoapCurve {
        threshold: th,
        confidence: opts.confidence,
        grid,
        p,
        p_lower95,
        a90,
        a90_95,
        fit,
        selection,
        n_series,
    })
}
