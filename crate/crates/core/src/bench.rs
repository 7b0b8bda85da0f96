//! Numerical stability harness over random coefficient instances.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::solver::{solve, SolverTemplate};

/// An instance counts as failed when some root's residual exceeds this.
pub const FAIL_RESIDUAL: f64 = 1e-3;
pub const HISTOGRAM_BIN: f64 = 0.5;
/// `log10` residuals are clamped to `[−LOG_CLAMP, LOG_CLAMP]`.
pub const LOG_CLAMP: f64 = 20.0;

/// Draws coefficient vectors.
pub trait InstanceSampler: Sync {
    fn name(&self) -> String;
    fn sample(&self, n_slots: usize, rng: &mut ChaCha8Rng) -> Vec<f64>;
}

/// i.i.d. standard normal per slot.
#[derive(Clone, Copy, Debug, Default)]
pub struct NormalSampler;

impl InstanceSampler for NormalSampler {
    fn name(&self) -> String {
        "normal".into()
    }

    fn sample(&self, n_slots: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n_slots).map(|_| rng.sample(StandardNormal)).collect()
    }
}

/// Coefficients of instance `index` of a run.
pub fn instance_coeffs(sampler: &dyn InstanceSampler, n_slots: usize, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    sampler.sample(n_slots, &mut rng)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    /// Lower edge; the bin is `[lo, lo + 0.5)`.
    pub lo: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub n_instances: usize,
    pub seed: u64,
    pub sampler: String,
    pub inversion_size: usize,
    pub eigen_size: usize,
    /// Over every root of every successful solve.
    pub mean_log10_residual: f64,
    pub median_log10_residual: f64,
    pub n_roots: usize,
    pub n_failed: usize,
    /// Failures caused by a solver error rather than a residual.
    pub n_errors: usize,
    pub fail_fraction: f64,
    /// `log10` of the worst residual per instance.
    pub histogram: Vec<HistogramBin>,
    /// Worst residual per instance; infinite for solver errors.
    pub worst_residuals: Vec<f64>,
}

fn clamped_log10(r: f64) -> f64 {
    if r.is_nan() {
        return LOG_CLAMP;
    }
    r.log10().clamp(-LOG_CLAMP, LOG_CLAMP)
}

/// Solve `n` seeded instances and aggregate residual statistics.
/// Solver failures are recorded, never propagated.
pub fn stability_run(tpl: &SolverTemplate, sampler: &dyn InstanceSampler, n: usize, seed: u64) -> StabilityReport {
    let n_slots = tpl.n_slots();
    let per_instance: Vec<Option<Vec<f64>>> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let coeffs = instance_coeffs(sampler, n_slots, seed, k);
            solve(tpl, &coeffs)
                .ok()
                .map(|s| s.roots.iter().map(|r| r.residual).collect())
        })
        .collect();

    let mut logs = Vec::new();
    let mut worst = Vec::with_capacity(n);
    let mut n_errors = 0;
    for inst in &per_instance {
        match inst {
            Some(res) => {
                logs.extend(res.iter().map(|&r| clamped_log10(r)));
                worst.push(res.iter().copied().fold(0.0, f64::max));
            }
            None => {
                n_errors += 1;
                worst.push(f64::INFINITY);
            }
        }
    }
    let n_failed = worst.iter().filter(|w| !(**w <= FAIL_RESIDUAL)).count();
    let mean = if logs.is_empty() {
        f64::NAN
    } else {
        logs.iter().sum::<f64>() / logs.len() as f64
    };
    logs.sort_by(f64::total_cmp);
    let median = match logs.len() {
        0 => f64::NAN,
        k if k % 2 == 1 => logs[k / 2],
        k => 0.5 * (logs[k / 2 - 1] + logs[k / 2]),
    };
    let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
    for &w in &worst {
        let b = (clamped_log10(w) / HISTOGRAM_BIN).floor() as i64;
        *bins.entry(b).or_default() += 1;
    }
    StabilityReport {
        n_instances: n,
        seed,
        sampler: sampler.name(),
        inversion_size: tpl.inversion_size(),
        eigen_size: tpl.eigen_size(),
        mean_log10_residual: mean,
        median_log10_residual: median,
        n_roots: logs.len(),
        n_failed,
        n_errors,
        fail_fraction: if n == 0 { 0.0 } else { n_failed as f64 / n as f64 },
        histogram: bins
            .into_iter()
            .map(|(b, count)| HistogramBin {
                lo: b as f64 * HISTOGRAM_BIN,
                count,
            })
            .collect(),
        worst_residuals: worst,
    }
}

impl StabilityReport {
    /// Plain-text table with mean, median and fail %.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "instances      {}", self.n_instances);
        let _ = writeln!(s, "seed           {}", self.seed);
        let _ = writeln!(s, "sampler        {}", self.sampler);
        let _ = writeln!(
            s,
            "template       inv {0}×{0}, eig {1}×{1}",
            self.inversion_size, self.eigen_size
        );
        let _ = writeln!(s, "roots          {}", self.n_roots);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:>10} {:>10} {:>10}", "mean", "median", "fail(%)");
        let _ = writeln!(
            s,
            "{:>10.3} {:>10.3} {:>10.3}",
            self.mean_log10_residual,
            self.median_log10_residual,
            100.0 * self.fail_fraction
        );
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "failed {} of {} ({} solver errors)",
            self.n_failed, self.n_instances, self.n_errors
        );
        let _ = writeln!(s, "log10 worst residual per instance:");
        for b in &self.histogram {
            let _ = writeln!(s, "  [{:>6.1}, {:>6.1})  {}", b.lo, b.lo + HISTOGRAM_BIN, b.count);
        }
        s
    }

    pub fn to_json(&self) -> String {
        // non-finite residuals become null in JSON
        serde_json::to_string_pretty(self).expect("report serialization") + "\n"
    }
}
