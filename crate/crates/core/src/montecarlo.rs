//! Monte Carlo checks of the asymptotic normality of the relative density.
//!
//! Replicate `r` always draws from its own ChaCha stream (see
//! `stream::replicate_rng`), and results are gathered in replicate order, so
//! a report depends on `(seed, n, reps, ...)` and not on the worker count.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::digraph::count_arcs;
use crate::error::{PcdError, Result};
use crate::geometry1d::{proximity_region, IntervalPartition, Params, SupportInterval};
use crate::moments::{mixture_moments, MomentPair};
use crate::stream::map_replicates;

/// Which normalization of the arc count to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum DensityVersion {
    /// `|A| / n_T`.
    V1,
    /// `|A| / (n (n - 1))`.
    #[default]
    V2,
}

impl From<DensityVersion> for u8 {
    fn from(v: DensityVersion) -> u8 {
        match v {
            DensityVersion::V1 => 1,
            DensityVersion::V2 => 2,
        }
    }
}

impl TryFrom<u8> for DensityVersion {
    type Error = PcdError;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(DensityVersion::V1),
            2 => Ok(DensityVersion::V2),
            other => Err(PcdError::InvalidParameter(format!(
                "density version must be 1 or 2, got {other}"
            ))),
        }
    }
}

impl FromStr for DensityVersion {
    type Err = PcdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches(['v', 'V']) {
            "1" => Ok(DensityVersion::V1),
            "2" => Ok(DensityVersion::V2),
            _ => Err(PcdError::InvalidParameter(format!(
                "density version must be 1 or 2, got '{s}'"
            ))),
        }
    }
}

impl fmt::Display for DensityVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub params: Params,
    pub partition: IntervalPartition,
    #[serde(default)]
    pub density_version: DensityVersion,
    /// Thread count; `None` uses the global pool. Never affects results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl MCConfig {
    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(PcdError::InvalidParameter(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.reps == 0 {
            return Err(PcdError::InvalidParameter("reps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCReport {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub mean: f64,
    /// Sample variance across replicates (divisor `reps - 1`).
    pub variance: f64,
    /// `√(variance / reps)`.
    pub std_error: f64,
    pub mu_asymptotic: Option<f64>,
    pub four_nu_asymptotic: Option<f64>,
    /// Set when the asymptotic variance is zero and no standardization exists.
    pub degenerate: bool,
    pub densities: Vec<f64>,
    /// `√n (ρ - μ) / √(4ν)` per replicate; empty without asymptotic moments.
    pub standardized: Vec<f64>,
    pub ks_stat: Option<f64>,
    pub ks_pvalue: Option<f64>,
}

impl MCReport {
    pub(crate) fn summarize(
        n: usize,
        seed: u64,
        densities: Vec<f64>,
        moments: Option<MomentPair>,
    ) -> Result<Self> {
        let reps = densities.len();
        let mean = densities.iter().sum::<f64>() / reps as f64;
        let variance = if reps > 1 {
            densities.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (reps - 1) as f64
        } else {
            0.0
        };
        let degenerate = moments.is_some_and(|m| m.is_degenerate());
        let standardized: Vec<f64> = match moments {
            Some(m) if !degenerate => {
                let scale = (n as f64).sqrt() / m.four_nu.sqrt();
                densities.iter().map(|d| (d - m.mu) * scale).collect()
            }
            _ => Vec::new(),
        };
        let (ks_stat, ks_pvalue) = if standardized.len() >= MIN_KS_LEN {
            let (d, p) = normality_diagnostic(&standardized)?;
            (Some(d), Some(p))
        } else {
            (None, None)
        };
        Ok(MCReport {
            n,
            reps,
            seed,
            mean,
            variance,
            std_error: (variance / reps as f64).sqrt(),
            mu_asymptotic: moments.map(|m| m.mu),
            four_nu_asymptotic: moments.map(|m| m.four_nu),
            degenerate,
            densities,
            standardized,
            ks_stat,
            ks_pvalue,
        })
    }
}

pub(crate) fn uniform_sample<R: Rng>(rng: &mut R, support: SupportInterval, n: usize) -> Vec<f64> {
    let (lo, w) = (support.delta1(), support.width());
    (0..n).map(|_| lo + w * rng.random::<f64>()).collect()
}

/// Relative densities of `reps` digraphs on `n` uniform points, standardized
/// by the closed-form mixture moments of the partition.
///
/// With `τ = ∞` the version-I density is identically 1 and the report is
/// marked degenerate; a zero variance at finite `τ` is an error.
pub fn simulate_density(cfg: &MCConfig) -> Result<MCReport> {
    cfg.validate()?;
    let mixture = mixture_moments(&cfg.partition, &cfg.params)?;
    let moments = match cfg.density_version {
        DensityVersion::V1 => mixture.version_one(),
        DensityVersion::V2 => mixture.version_two(),
    };
    if moments.is_degenerate() && !cfg.params.tau().is_infinite() {
        return Err(PcdError::Degenerate(
            "asymptotic variance of the density is zero for these parameters".into(),
        ));
    }
    let support = cfg.partition.support();
    let densities = map_replicates(cfg.reps, cfg.seed, cfg.workers, |rng| {
        let xs = uniform_sample(rng, support, cfg.n);
        let report = count_arcs(&xs, &cfg.partition, &cfg.params)?.density();
        Ok(match cfg.density_version {
            DensityVersion::V1 => report.rho_v1,
            DensityVersion::V2 => report.rho_v2,
        })
    })?;
    MCReport::summarize(cfg.n, cfg.seed, densities, Some(moments))
}

const MIN_KS_LEN: usize = 20;

/// One-sample Kolmogorov–Smirnov test against the standard normal:
/// `(D_n, p)` with `p` from the asymptotic Kolmogorov distribution of
/// `√n D_n`.
pub fn normality_diagnostic(standardized: &[f64]) -> Result<(f64, f64)> {
    if standardized.len() < MIN_KS_LEN {
        return Err(PcdError::InvalidInput(format!(
            "need at least {MIN_KS_LEN} values, got {}",
            standardized.len()
        )));
    }
    if standardized.iter().any(|x| x.is_nan()) {
        return Err(PcdError::InvalidInput("values contain NaN".into()));
    }
    let normal = Normal::standard();
    let mut xs = standardized.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    Ok((d, kolmogorov_sf(n.sqrt() * d)))
}

/// `P(K > λ)` for the Kolmogorov distribution.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        // P(K <= λ) = √(2π)/λ Σ exp(-(2k-1)² π² / (8λ²)), fast for small λ
        let a = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let cdf: f64 = (1..=20)
            .map(|k| ((2 * k - 1) as f64).powi(2))
            .map(|m| (a * m).exp())
            .sum::<f64>()
            * (2.0 * std::f64::consts::PI).sqrt()
            / lambda;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let sum: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum();
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Joint distribution of `(2 h12, 2 h13)` for a vertex and two others in the
/// same cell, where `2 h_ij` is the number of arcs between `i` and `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointHPmf {
    /// `counts[a][b]` triples with `2 h12 = a` and `2 h13 = b`.
    pub counts: [[u64; 3]; 3],
    pub pmf: [[f64; 3]; 3],
    pub triples: u64,
    /// Estimate of `E[h12 h13]`.
    pub expected_product: f64,
    /// Its Monte Carlo standard error.
    pub product_se: f64,
}

impl JointHPmf {
    /// Standard error of `pmf[a][b] - pmf[b][a]`.
    pub fn asymmetry_se(&self, a: usize, b: usize) -> f64 {
        let (p, q) = (self.pmf[a][b], self.pmf[b][a]);
        ((p + q - (p - q).powi(2)) / self.triples as f64).sqrt()
    }
}

/// Estimates the pmf of `(2 h12, 2 h13)` from `n · reps` independent uniform
/// triples. Only defined for a partition with a single cell.
pub fn joint_h_pmf(cfg: &MCConfig) -> Result<JointHPmf> {
    cfg.validate()?;
    let [cell] = cfg.partition.cells() else {
        return Err(PcdError::NotApplicable(format!(
            "the joint kernel pmf needs a single-cell partition, got {} cells",
            cfg.partition.cells().len()
        )));
    };
    let cell = *cell;
    let params = cfg.params;
    let per_rep = map_replicates(cfg.reps, cfg.seed, cfg.workers, |rng| {
        let mut counts = [[0u64; 3]; 3];
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..cfg.n {
            let x: [f64; 3] = std::array::from_fn(|_| cell.from_local(rng.random::<f64>()));
            let r1 = proximity_region(x[0], &params, &cell)?;
            let r2 = proximity_region(x[1], &params, &cell)?;
            let r3 = proximity_region(x[2], &params, &cell)?;
            let h12 = r1.contains(x[1]) as usize + r2.contains(x[0]) as usize;
            let h13 = r1.contains(x[2]) as usize + r3.contains(x[0]) as usize;
            counts[h12][h13] += 1;
            let prod = (h12 * h13) as f64 / 4.0;
            sum += prod;
            sum_sq += prod * prod;
        }
        Ok((counts, sum, sum_sq))
    })?;

    let mut counts = [[0u64; 3]; 3];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for (c, s, s2) in per_rep {
        for a in 0..3 {
            for b in 0..3 {
                counts[a][b] += c[a][b];
            }
        }
        sum += s;
        sum_sq += s2;
    }
    let triples = (cfg.n * cfg.reps) as u64;
    let t = triples as f64;
    let mean = sum / t;
    let var = (sum_sq / t - mean * mean).max(0.0);
    Ok(JointHPmf {
        counts,
        pmf: counts.map(|row| row.map(|k| k as f64 / t)),
        triples,
        expected_product: mean,
        product_se: (var / t).sqrt(),
    })
}
