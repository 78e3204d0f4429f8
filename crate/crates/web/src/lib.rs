//! wasm bindings for the browser demo in `www/`.

use nk_cloud::analytic::{fit_cloud_line, Prediction, SaIntegrand};
use nk_cloud::cloud::{
    build_fitness_cloud, build_hamming_cloud, build_limit_cloud, estimate_beta, estimate_beta_star,
};
use nk_cloud::{CloudSummary, HeuristicSpec, NkLandscape, SearchSpace};
use wasm_bindgen::prelude::*;

/// Largest landscape the page will enumerate.
pub const MAX_DEMO_N: usize = 18;

/// Values per bin in [`CloudView::bins`]: center, min, max, mean, std, count.
pub const BIN_STRIDE: usize = 6;

#[wasm_bindgen]
pub struct CloudView {
    bins: Vec<f64>,
    beta: Option<f64>,
    beta_star: Option<f64>,
    slope: f64,
    intercept: f64,
    max_fitness: f64,
}

#[wasm_bindgen]
impl CloudView {
    /// Confident bins, flattened with stride [`BIN_STRIDE`].
    pub fn bins(&self) -> Vec<f64> {
        self.bins.clone()
    }

    /// Point β, if the mean curve crosses the diagonal once.
    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn beta_star(&self) -> Option<f64> {
        self.beta_star
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn max_fitness(&self) -> f64 {
        self.max_fitness
    }
}

fn heuristic(
    name: &str,
    temperature: f64,
    rng_seed: u64,
) -> nk_cloud::Result<Option<HeuristicSpec>> {
    let spec = match name {
        "hamming" => return Ok(None),
        "random-walk" => HeuristicSpec::RandomWalk { seed: rng_seed },
        "mhc" => HeuristicSpec::Mhc,
        "sa" => HeuristicSpec::SaFixed {
            temperature,
            seed: rng_seed,
        },
        "nhc" => HeuristicSpec::Nhc { seed: rng_seed },
        other => {
            return Err(nk_cloud::Error::Parameter(format!(
                "unknown heuristic {other:?}"
            )))
        }
    };
    spec.validate()?;
    Ok(Some(spec))
}

fn space(n: usize, k: usize, seed: u64) -> nk_cloud::Result<SearchSpace> {
    if n > MAX_DEMO_N {
        return Err(nk_cloud::Error::Capacity(format!(
            "the demo enumerates at most n = {MAX_DEMO_N}"
        )));
    }
    SearchSpace::build(&NkLandscape::generate(n, k, seed)?, 0.002)
}

fn flatten(cloud: &CloudSummary) -> Vec<f64> {
    cloud
        .confident_bins()
        .flat_map(|b| {
            [
                b.center,
                b.f_min,
                b.f_max,
                b.f_mean,
                b.f_std,
                b.count as f64,
            ]
        })
        .collect()
}

/// One-step cloud, with its fitted line and β.
pub fn fitness_cloud_view(
    n: usize,
    k: usize,
    seed: u64,
    name: &str,
    temperature: f64,
    rng_seed: u64,
) -> nk_cloud::Result<CloudView> {
    let space = space(n, k, seed)?;
    let fc = match heuristic(name, temperature, rng_seed)? {
        None => build_hamming_cloud(&space)?,
        Some(spec) => build_fitness_cloud(&space, &spec, 1)?,
    };
    let fit = fit_cloud_line(&fc)?;
    let estimate = estimate_beta(&fc, 0.002)?;
    Ok(CloudView {
        bins: flatten(&fc),
        beta: estimate.beta.and_then(|b| match b {
            nk_cloud::Beta::Point(p) => Some(p),
            nk_cloud::Beta::Interval(_) => None,
        }),
        beta_star: None,
        slope: fit.slope,
        intercept: fit.intercept,
        max_fitness: space.table().max(),
    })
}

/// Limit cloud after `generations` steps, with β*.
pub fn limit_cloud_view(
    n: usize,
    k: usize,
    seed: u64,
    name: &str,
    temperature: f64,
    rng_seed: u64,
    generations: usize,
) -> nk_cloud::Result<CloudView> {
    let space = space(n, k, seed)?;
    let spec = heuristic(name, temperature, rng_seed)?
        .ok_or_else(|| nk_cloud::Error::Parameter("limit clouds need a heuristic".into()))?;
    let fc = build_fitness_cloud(&space, &spec, 1)?;
    let fit = fit_cloud_line(&fc)?;
    let beta = estimate_beta(&fc, 0.002)?;
    let fcstar = build_limit_cloud(&space, &spec, generations)?;
    let beta_star = estimate_beta_star(&fcstar, &beta)
        .ok()
        .and_then(|e| e.beta_star);
    Ok(CloudView {
        bins: flatten(&fcstar),
        beta: None,
        beta_star,
        slope: fit.slope,
        intercept: fit.intercept,
        max_fitness: space.table().max(),
    })
}

/// Predicted mean offspring fitness as `[f0, m0, f1, m1, ...]`.
pub fn analytic_curve_values(
    name: &str,
    n: usize,
    k: usize,
    temperature: f64,
    step: f64,
) -> nk_cloud::Result<Vec<f64>> {
    let prediction = match name {
        "hamming" | "random-walk" => Prediction::Hamming,
        "mhc" => Prediction::Mhc,
        "sa" => Prediction::Sa {
            temperature,
            integrand: SaIntegrand::Metropolis,
        },
        "nhc" => Prediction::Nhc,
        other => {
            return Err(nk_cloud::Error::Parameter(format!(
                "unknown heuristic {other:?}"
            )))
        }
    };
    Ok(prediction
        .curve(n, k, step)?
        .into_iter()
        .flat_map(|(f, m)| [f, m])
        .collect())
}

fn js(e: nk_cloud::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn fitness_cloud(
    n: usize,
    k: usize,
    seed: u64,
    heuristic: &str,
    temperature: f64,
    rng_seed: u64,
) -> Result<CloudView, JsError> {
    fitness_cloud_view(n, k, seed, heuristic, temperature, rng_seed).map_err(js)
}

#[wasm_bindgen]
pub fn limit_cloud(
    n: usize,
    k: usize,
    seed: u64,
    heuristic: &str,
    temperature: f64,
    rng_seed: u64,
    generations: usize,
) -> Result<CloudView, JsError> {
    limit_cloud_view(n, k, seed, heuristic, temperature, rng_seed, generations).map_err(js)
}

#[wasm_bindgen]
pub fn analytic_curve(
    heuristic: &str,
    n: usize,
    k: usize,
    temperature: f64,
    step: f64,
) -> Result<Vec<f64>, JsError> {
    analytic_curve_values(heuristic, n, k, temperature, step).map_err(js)
}
