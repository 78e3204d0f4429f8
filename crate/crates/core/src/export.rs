//! CSV and report formats consumed by plotting scripts.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::analytic::Prediction;
use crate::cloud::{
    bin_fitness, Beta, BetaEstimate, CloudBin, CloudKind, CloudSummary, EstimateMethod,
};
use crate::error::{Error, Result};
use crate::heuristics::Trajectory;

pub const CLOUD_COLUMNS: [&str; 7] = [
    "bin_center",
    "f_min",
    "f_max",
    "f_mean",
    "f_std",
    "count",
    "low_confidence",
];

#[derive(Serialize, Deserialize)]
struct CloudRow {
    bin_center: f64,
    f_min: f64,
    f_max: f64,
    f_mean: f64,
    f_std: f64,
    count: usize,
    low_confidence: bool,
}

pub fn write_cloud_csv<W: Write>(cloud: &CloudSummary, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for b in &cloud.bins {
        w.serialize(CloudRow {
            bin_center: b.center,
            f_min: b.f_min,
            f_max: b.f_max,
            f_mean: b.f_mean,
            f_std: b.f_std,
            count: b.count,
            low_confidence: b.low_confidence,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a cloud CSV back; bin indices are recovered from the centers.
pub fn read_cloud_csv<R: Read>(
    reader: R,
    bin_width: f64,
    kind: CloudKind,
    heuristic: impl Into<String>,
) -> Result<CloudSummary> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    for col in CLOUD_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Data(format!("cloud CSV lacks column {col}")));
        }
    }
    let mut bins = Vec::new();
    for row in r.deserialize() {
        let row: CloudRow = row?;
        bins.push(CloudBin {
            bin: bin_fitness(row.bin_center, bin_width)?,
            center: row.bin_center,
            f_min: row.f_min,
            f_max: row.f_max,
            f_mean: row.f_mean,
            f_std: row.f_std,
            count: row.count,
            low_confidence: row.low_confidence,
        });
    }
    Ok(CloudSummary {
        bin_width,
        kind,
        heuristic: heuristic.into(),
        generations: None,
        bins,
    })
}

pub fn write_points_csv<W: Write>(parents: &[f64], offspring: &[f64], writer: W) -> Result<()> {
    if parents.len() != offspring.len() {
        return Err(Error::param(
            "parent and offspring columns differ in length",
        ));
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["parent_fitness", "offspring_fitness"])?;
    for (p, o) in parents.iter().zip(offspring) {
        w.write_record([p.to_string(), o.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trajectory_csv<W: Write>(trajectory: &Trajectory, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["generation", "genotype_index", "fitness", "temperature"])?;
    for (t, ((g, f), temp)) in trajectory
        .genotypes
        .iter()
        .zip(&trajectory.fitnesses)
        .zip(&trajectory.temperatures)
        .enumerate()
    {
        w.write_record([
            t.to_string(),
            g.to_string(),
            f.to_string(),
            temp.map(|x| x.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_analytic_csv<W: Write>(
    prediction: &Prediction,
    n: usize,
    k: usize,
    curve: &[(f64, f64)],
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["f", "predicted_mean", "heuristic", "n", "k", "temperature"])?;
    let temperature = prediction
        .temperature()
        .map(|t| t.to_string())
        .unwrap_or_default();
    for (f, m) in curve {
        w.write_record([
            f.to_string(),
            m.to_string(),
            prediction.name().to_string(),
            n.to_string(),
            k.to_string(),
            temperature.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// β / β* report written next to each cloud.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    pub beta: Option<Beta>,
    pub beta_star: Option<f64>,
    pub method: Option<EstimateMethod>,
    pub accuracy: f64,
    pub heuristic: String,
    pub landscape_seed: u64,
    pub generations: Option<usize>,
}

impl BetaReport {
    pub fn new(
        estimate: &BetaEstimate,
        heuristic: impl Into<String>,
        landscape_seed: u64,
        generations: Option<usize>,
    ) -> Self {
        Self {
            beta: estimate.beta,
            beta_star: estimate.beta_star,
            method: estimate.method,
            accuracy: estimate.accuracy,
            heuristic: heuristic.into(),
            landscape_seed,
            generations,
        }
    }

    pub fn to_writer<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self)?;
        Ok(())
    }
}
