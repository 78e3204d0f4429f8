//! Normal-approximation predictions of the mean offspring fitness.
//!
//! Flipping one bit redraws on average K+1 of the N contributions, so the
//! mean offspring fitness is modeled as
//! `(1 - (K+1)/N) f + ((K+1)/N) E(X)`, where `X` stands for the mean of the
//! redrawn contributions. Each heuristic only changes `E(X)`:
//!
//! * random walk: `E(X) = 0.5`
//! * mHC: `E(max(X_1..X_N))` with `X_i ~ N(0.5, sigma_K)`
//! * SA at temperature T: the Metropolis-weighted value of one proposal
//! * nHC: `E(max(f, X_1..X_N))`
//!
//! with `sigma_K = 1 / sqrt(12 (K+1))`. Integrals are evaluated by
//! tanh-sinh quadrature over `0.5 ± 8 sigma_K`, outside of which the normal
//! mass is below 1e-15.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::cloud::CloudSummary;
use crate::error::{Error, Result};

/// Absolute error accepted from every quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-4;

const SPAN_SIGMAS: f64 = 8.0;
const TARGET_ERROR: f64 = 1e-11;

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n == 0 || k >= n {
        return Err(Error::param(format!(
            "need 0 <= k < n, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

fn check_fitness(f: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::param(format!("fitness {f} outside [0, 1]")));
    }
    Ok(())
}

fn check_temperature(t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::param(format!("temperature must be > 0, got {t}")));
    }
    Ok(())
}

pub fn sigma_k(k: usize) -> f64 {
    1.0 / (12.0 * (k as f64 + 1.0)).sqrt()
}

pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let out = quadrature::double_exponential::integrate(f, a, b, TARGET_ERROR);
    if !out.integral.is_finite() || !(out.error_estimate <= QUADRATURE_TOLERANCE) {
        return Err(Error::Quadrature(format!(
            "integral over [{a}, {b}] has error estimate {}",
            out.error_estimate
        )));
    }
    Ok(out.integral)
}

/// Parameters of one analytic curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParams {
    pub n: usize,
    pub k: usize,
    pub temperature: Option<f64>,
}

impl AnalyticParams {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        check_nk(n, k)?;
        Ok(Self {
            n,
            k,
            temperature: None,
        })
    }

    pub fn sigma_k(&self) -> f64 {
        sigma_k(self.k)
    }

    /// Weight `(K+1)/N` of the redrawn part.
    pub fn redraw_weight(&self) -> f64 {
        (self.k as f64 + 1.0) / self.n as f64
    }
}

/// `N(0.5, sigma)`.
#[derive(Clone, Copy)]
struct ProposalNormal {
    sigma: f64,
}

impl ProposalNormal {
    fn pdf(&self, x: f64) -> f64 {
        std_normal_pdf((x - 0.5) / self.sigma) / self.sigma
    }

    fn cdf(&self, x: f64) -> f64 {
        std_normal_cdf((x - 0.5) / self.sigma)
    }

    fn lo(&self) -> f64 {
        0.5 - SPAN_SIGMAS * self.sigma
    }

    fn hi(&self) -> f64 {
        0.5 + SPAN_SIGMAS * self.sigma
    }
}

fn template(p: &AnalyticParams, f: f64, expected_x: f64) -> f64 {
    let w = p.redraw_weight();
    (1.0 - w) * f + w * expected_x
}

/// Offspring-parent correlation `1 - (K+1)/N`.
pub fn correlation_coefficient(n: usize, k: usize) -> Result<f64> {
    Ok(1.0 - AnalyticParams::new(n, k)?.redraw_weight())
}

/// Mean Hamming-neighbor fitness; the line turns around (0.5, 0.5).
pub fn hamming_mean(f: f64, n: usize, k: usize) -> Result<f64> {
    check_fitness(f)?;
    Ok(template(&AnalyticParams::new(n, k)?, f, 0.5))
}

/// `E(max(X_1..X_n))` for i.i.d. `X_i ~ N(0.5, sigma_K)`, via
/// `0.5 + ∫_{0.5}^∞ (1 - F^n) - ∫_{-∞}^{0.5} F^n`.
pub fn expected_max_normals(n: usize, k: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("need at least one normal"));
    }
    let normal = ProposalNormal { sigma: sigma_k(k) };
    let nn = n as i32;
    let upper = integrate(|x| 1.0 - normal.cdf(x).powi(nn), 0.5, normal.hi())?;
    let lower = integrate(|x| normal.cdf(x).powi(nn), normal.lo(), 0.5)?;
    Ok(0.5 + upper - lower)
}

pub fn mhc_mean(f: f64, n: usize, k: usize) -> Result<f64> {
    check_fitness(f)?;
    let p = AnalyticParams::new(n, k)?;
    Ok(template(&p, f, expected_max_normals(n, k)?))
}

/// Which form of the SA expectation to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaIntegrand {
    /// Proposals above `f` always kept, those below kept with probability
    /// `exp((x - f) / T)`, rejected mass contributing `f`.
    #[default]
    Metropolis,
    /// `1 - Φ((f - 0.5)/σ) + ∫_{-∞}^{f} φ((x - f)/σ) exp((x - f)/T) dx`,
    /// taken literally. Not a normalized expectation; kept for comparison.
    Printed,
}

/// `E(X(f, K, T))` for one SA proposal.
pub fn sa_expected_x(f: f64, k: usize, temperature: f64, integrand: SaIntegrand) -> Result<f64> {
    check_fitness(f)?;
    check_temperature(temperature)?;
    let normal = ProposalNormal { sigma: sigma_k(k) };
    match integrand {
        SaIntegrand::Metropolis => {
            let (lo, hi) = (normal.lo(), normal.hi());
            let split = f.clamp(lo, hi);
            let improving = integrate(|x| x * normal.pdf(x), split, hi)?;
            let deleterious = integrate(
                |x| {
                    let accept = ((x - f) / temperature).exp();
                    (accept * x + (1.0 - accept) * f) * normal.pdf(x)
                },
                lo,
                split,
            )?;
            Ok(improving + deleterious)
        }
        SaIntegrand::Printed => {
            let sigma = normal.sigma;
            let tail = 1.0 - std_normal_cdf((f - 0.5) / sigma);
            let integral = integrate(
                |x| std_normal_pdf((x - f) / sigma) * ((x - f) / temperature).exp(),
                f - SPAN_SIGMAS * sigma,
                f,
            )?;
            Ok(tail + integral)
        }
    }
}

pub fn sa_expected_offspring(
    f: f64,
    n: usize,
    k: usize,
    temperature: f64,
    integrand: SaIntegrand,
) -> Result<f64> {
    let p = AnalyticParams::new(n, k)?;
    Ok(template(
        &p,
        f,
        sa_expected_x(f, k, temperature, integrand)?,
    ))
}

/// `E(max(f, X_1..X_n))`, computed as `E(max X) + ∫_{-∞}^{f} F(x)^n dx`.
pub fn expected_max_with_floor(f: f64, n: usize, k: usize) -> Result<f64> {
    check_fitness(f)?;
    if n == 0 {
        return Err(Error::param("need at least one normal"));
    }
    let normal = ProposalNormal { sigma: sigma_k(k) };
    let nn = n as i32;
    let (lo, hi) = (normal.lo(), normal.hi());
    let mut extra = integrate(|x| normal.cdf(x).powi(nn), lo, f.min(hi))?;
    if f > hi {
        extra += f - hi;
    }
    Ok(expected_max_normals(n, k)? + extra)
}

pub fn nhc_expected_offspring(f: f64, n: usize, k: usize) -> Result<f64> {
    let p = AnalyticParams::new(n, k)?;
    Ok(template(&p, f, expected_max_with_floor(f, n, k)?))
}

/// Heuristic whose mean curve is being predicted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "heuristic", rename_all = "snake_case")]
pub enum Prediction {
    Hamming,
    Mhc,
    Sa {
        temperature: f64,
        integrand: SaIntegrand,
    },
    Nhc,
}

impl Prediction {
    pub fn name(&self) -> &'static str {
        match self {
            Prediction::Hamming => "hamming",
            Prediction::Mhc => "mhc",
            Prediction::Sa {
                integrand: SaIntegrand::Metropolis,
                ..
            } => "sa",
            Prediction::Sa {
                integrand: SaIntegrand::Printed,
                ..
            } => "sa-printed",
            Prediction::Nhc => "nhc",
        }
    }

    pub fn temperature(&self) -> Option<f64> {
        match self {
            Prediction::Sa { temperature, .. } => Some(*temperature),
            _ => None,
        }
    }

    pub fn mean(&self, f: f64, n: usize, k: usize) -> Result<f64> {
        match *self {
            Prediction::Hamming => hamming_mean(f, n, k),
            Prediction::Mhc => mhc_mean(f, n, k),
            Prediction::Sa {
                temperature,
                integrand,
            } => sa_expected_offspring(f, n, k, temperature, integrand),
            Prediction::Nhc => nhc_expected_offspring(f, n, k),
        }
    }

    /// Predicted mean on the grid `0, step, 2 step, ..., 1`.
    pub fn curve(&self, n: usize, k: usize, step: f64) -> Result<Vec<(f64, f64)>> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::param(format!("grid step {step} outside (0, 1]")));
        }
        let points = (1.0 / step).round() as usize;
        (0..=points)
            .map(|i| {
                let f = (i as f64 * step).min(1.0);
                Ok((f, self.mean(f, n, k)?))
            })
            .collect()
    }

    /// Where the predicted mean curve crosses the diagonal, if it does on `[0, 1]`.
    pub fn fixed_point(&self, n: usize, k: usize) -> Result<Option<f64>> {
        let gap = |f: f64| self.mean(f, n, k).map(|m| m - f);
        let (mut lo, mut hi) = (0.0, 1.0);
        let (g_lo, g_hi) = (gap(lo)?, gap(hi)?);
        if g_lo == 0.0 {
            return Ok(Some(lo));
        }
        if g_lo.signum() == g_hi.signum() {
            return Ok(None);
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if gap(mid)?.signum() == g_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Some(0.5 * (lo + hi)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub bins_used: usize,
}

impl RegressionFit {
    /// Where the fitted line meets the diagonal.
    pub fn fixed_point(&self) -> f64 {
        self.intercept / (1.0 - self.slope)
    }
}

/// Count-weighted least squares of `f_mean` on bin center over confident bins.
pub fn fit_cloud_line(fc: &CloudSummary) -> Result<RegressionFit> {
    let bins: Vec<_> = fc.confident_bins().collect();
    if bins.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 confident bins to fit a line, found {}",
            bins.len()
        )));
    }
    let w_total: f64 = bins.iter().map(|b| b.count as f64).sum();
    let x_bar = bins.iter().map(|b| b.count as f64 * b.center).sum::<f64>() / w_total;
    let y_bar = bins.iter().map(|b| b.count as f64 * b.f_mean).sum::<f64>() / w_total;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for b in &bins {
        let w = b.count as f64;
        sxy += w * (b.center - x_bar) * (b.f_mean - y_bar);
        sxx += w * (b.center - x_bar).powi(2);
    }
    if sxx <= 0.0 {
        return Err(Error::Data("bin centers have no spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let ss_res: f64 = bins
        .iter()
        .map(|b| b.count as f64 * (b.f_mean - slope * b.center - intercept).powi(2))
        .sum();
    Ok(RegressionFit {
        slope,
        intercept,
        residual_rms: (ss_res / w_total).sqrt(),
        bins_used: bins.len(),
    })
}
