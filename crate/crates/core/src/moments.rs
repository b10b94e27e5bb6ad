//! Closed-form asymptotic mean `μ` and variance `4ν` of the relative density
//! for uniform data, their mixtures over a partition, and the Berry–Esseen
//! style convergence rate with its minimizers.
//!
//! Every middle-cell expression depends on `c` only through
//! `s = c (1 - c)`, so the `c ↔ 1 - c` symmetry holds by construction.
//! With `D = τ + s (τ - 1)²`:
//!
//! ```text
//! μ(τ, c)  = τ / 2                                    τ < 1
//!          = τ (1 + 2 s (τ - 1)) / (2 D)              τ ≥ 1
//! 4ν(τ, c) = τ² (s + (1 - 2s) τ + (3s - 1) τ² - s τ³) / (3 D)        τ < 1
//!          = -s p(τ) / (3 D³)                                        τ ≥ 1
//! p(τ) = s² + s(1-2s) τ + (4s - 2s² - 1) τ² - 4s(1-2s) τ³ - 7s² τ⁴ - s(1-2s) τ⁵
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PcdError, Result};
use crate::geometry1d::{IntervalPartition, Params, RegionKind, Tau};

/// Asymptotic mean and variance of `√n (ρ - μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub mu: f64,
    pub four_nu: f64,
}

impl MomentPair {
    pub fn is_degenerate(&self) -> bool {
        self.four_nu <= 0.0
    }

    /// `4 E[h12 h13] = 4ν + 4μ²`.
    pub fn cross_sum(&self) -> f64 {
        self.four_nu + 4.0 * self.mu * self.mu
    }
}

fn spread(c: f64) -> f64 {
    c * (1.0 - c)
}

pub fn mu_middle(params: &Params) -> f64 {
    let Tau::Finite(t) = params.tau() else {
        return 1.0;
    };
    if t < 1.0 {
        return t / 2.0;
    }
    let s = spread(params.c());
    let d = t + s * (t - 1.0) * (t - 1.0);
    t * (1.0 + 2.0 * s * (t - 1.0)) / (2.0 * d)
}

pub fn four_nu_middle(params: &Params) -> f64 {
    let Tau::Finite(t) = params.tau() else {
        return 0.0;
    };
    let s = spread(params.c());
    let d = t + s * (t - 1.0) * (t - 1.0);
    if t < 1.0 {
        let poly = ((-s * t + (3.0 * s - 1.0)) * t + (1.0 - 2.0 * s)) * t + s;
        t * t * poly / (3.0 * d)
    } else {
        let a = s * (1.0 - 2.0 * s);
        let coeffs = [
            -a,
            -7.0 * s * s,
            -4.0 * a,
            4.0 * s - 2.0 * s * s - 1.0,
            a,
            s * s,
        ];
        let p = coeffs.iter().fold(0.0, |acc, &k| acc * t + k);
        -s * p / (3.0 * d * d * d)
    }
}

pub fn mu_end(tau: Tau) -> f64 {
    match tau {
        Tau::Infinity => 1.0,
        Tau::Finite(t) if t < 1.0 => t * (t + 2.0) / (2.0 * (t + 1.0)),
        Tau::Finite(t) => (1.0 + 2.0 * t) / (2.0 * (t + 1.0)),
    }
}

pub fn four_nu_end(tau: Tau) -> f64 {
    match tau {
        Tau::Infinity => 0.0,
        Tau::Finite(t) => {
            let t2 = t * t;
            let den = 3.0 * (t + 1.0).powi(3);
            if t < 1.0 {
                t2 * (4.0 * t + 4.0 - 2.0 * t2 * t2 - 4.0 * t2 * t - t2) / den
            } else {
                t2 / den
            }
        }
    }
}

/// `(μ, 4ν)` for the unit cell of the given kind.
pub fn moments(params: &Params, kind: RegionKind) -> MomentPair {
    match kind {
        RegionKind::Middle => MomentPair {
            mu: mu_middle(params),
            four_nu: four_nu_middle(params),
        },
        RegionKind::End => MomentPair {
            mu: mu_end(params.tau()),
            four_nu: four_nu_end(params.tau()),
        },
    }
}

/// Moments of the two relative densities over a partition.
///
/// The `*_tilde` pair is for `|A| / (n (n - 1))` and the `*_breve` pair for
/// `|A| / n_T`. The latter rescales by `Σ w_i²`, the limit of
/// `n_T / n²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureMoments {
    pub mu_tilde: f64,
    pub four_nu_tilde: f64,
    pub mu_breve: f64,
    pub four_nu_breve: f64,
}

impl MixtureMoments {
    pub fn version_one(&self) -> MomentPair {
        MomentPair {
            mu: self.mu_breve,
            four_nu: self.four_nu_breve,
        }
    }

    pub fn version_two(&self) -> MomentPair {
        MomentPair {
            mu: self.mu_tilde,
            four_nu: self.four_nu_tilde,
        }
    }
}

/// `μ̃ = μ Σ_mid w² + μ_e Σ_end w²` and
/// `4ν̃ = S Σ_mid w³ + S_e Σ_end w³ - 4 μ̃²`, where `S = 4ν + 4μ²` is the
/// per-cell cross moment sum. Version I uses `μ̆ = μ̃ / Σ w²` and
/// `4ν̆ = 4ν̃ / (Σ w²)²`, which treats `n_T / n²` as fixed at its limit.
pub fn mixture_moments(partition: &IntervalPartition, params: &Params) -> Result<MixtureMoments> {
    let mid = moments(params, RegionKind::Middle);
    let end = moments(params, RegionKind::End);
    let w2_mid = partition.weight_power_sum(RegionKind::Middle, 2);
    let w2_end = partition.weight_power_sum(RegionKind::End, 2);
    let w3_mid = partition.weight_power_sum(RegionKind::Middle, 3);
    let w3_end = partition.weight_power_sum(RegionKind::End, 3);
    let w2 = w2_mid + w2_end;
    if w2 <= 0.0 {
        return Err(PcdError::InvalidInput(
            "partition has no cell of positive weight".into(),
        ));
    }

    let mu_tilde = mid.mu * w2_mid + end.mu * w2_end;
    let four_nu_tilde =
        (mid.cross_sum() * w3_mid + end.cross_sum() * w3_end - 4.0 * mu_tilde * mu_tilde).max(0.0);
    if params.tau().is_infinite() {
        // every cell is complete, so |A| = n_T and version I is constant
        return Ok(MixtureMoments {
            mu_tilde,
            four_nu_tilde,
            mu_breve: 1.0,
            four_nu_breve: 0.0,
        });
    }
    // a convex combination, so an absent cell kind drops out exactly
    let mu_breve = mid.mu * (w2_mid / w2) + end.mu * (w2_end / w2);
    Ok(MixtureMoments {
        mu_tilde,
        four_nu_tilde,
        mu_breve,
        four_nu_breve: four_nu_tilde / (w2 * w2),
    })
}

/// `μ / √(n (4ν)³)`, the normal-approximation error bound up to its
/// universal constant.
pub fn convergence_rate(moments: &MomentPair, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(PcdError::InvalidParameter("n must be at least 1".into()));
    }
    if moments.is_degenerate() {
        return Err(PcdError::Degenerate(format!(
            "asymptotic variance is {}, so the rate is undefined",
            moments.four_nu
        )));
    }
    Ok(moments.mu / (n as f64 * moments.four_nu.powi(3)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Middle cell with `c = 1/2`, minimizing over `τ`.
    MiddleCHalf,
    /// Middle cell, minimizing jointly over `τ ≥ 1` and `c`.
    MiddleFull,
    /// End cell, minimizing over `τ`.
    End,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::MiddleCHalf, Regime::MiddleFull, Regime::End];
}

impl FromStr for Regime {
    type Err = PcdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "middle_c_half" => Ok(Regime::MiddleCHalf),
            "middle_full" => Ok(Regime::MiddleFull),
            "end" => Ok(Regime::End),
            other => Err(PcdError::InvalidParameter(format!(
                "unknown regime '{other}' (expected middle_c_half, middle_full or end)"
            ))),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::MiddleCHalf => "middle_c_half",
            Regime::MiddleFull => "middle_full",
            Regime::End => "end",
        })
    }
}

/// Minimizer of [`convergence_rate`] at `n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalParameters {
    pub regime: Regime,
    pub tau_star: f64,
    pub c_star: Option<f64>,
    /// `μ / √((4ν)³)` at the minimizer.
    pub rate: f64,
    /// The `τ` interval searched.
    pub tau_range: (f64, f64),
}

const TAU_MIN: f64 = 1e-2;
const TAU_MAX: f64 = 50.0;
const C_MIN: f64 = 0.01;
const C_MAX: f64 = 0.99;
const GRID: usize = 400;
const GOLDEN_TOL: f64 = 1e-10;

fn unit_rate(m: MomentPair) -> f64 {
    if m.four_nu > 0.0 {
        m.mu / m.four_nu.powi(3).sqrt()
    } else {
        f64::INFINITY
    }
}

fn middle_rate(tau: f64, c: f64) -> f64 {
    let p = Params::finite(tau, c).expect("search stays inside the parameter domain");
    unit_rate(moments(&p, RegionKind::Middle))
}

fn end_rate(tau: f64) -> f64 {
    unit_rate(MomentPair {
        mu: mu_end(Tau::Finite(tau)),
        four_nu: four_nu_end(Tau::Finite(tau)),
    })
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Evaluates `f` on `grid`, then refines between the neighbours of the best
/// grid point.
fn grid_then_golden<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> f64 {
    let best = grid
        .iter()
        .map(|&x| f(x))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .expect("grid is nonempty");
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    golden(f, lo, hi, GOLDEN_TOL)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Deterministic grid search with golden-section refinement.
///
/// The single-parameter regimes search `τ ∈ [0.01, 50]`. The joint regime
/// searches `τ ∈ [1, 50]` and `c ∈ [0.01, 0.99]`; over all `τ > 0` its
/// minimum would coincide with the `c = 1/2` one, which lies below 1.
pub fn optimal_parameters(regime: Regime) -> OptimalParameters {
    match regime {
        Regime::MiddleCHalf => {
            let tau = grid_then_golden(|t| middle_rate(t, 0.5), &log_grid(TAU_MIN, TAU_MAX, GRID));
            OptimalParameters {
                regime,
                tau_star: tau,
                c_star: Some(0.5),
                rate: middle_rate(tau, 0.5),
                tau_range: (TAU_MIN, TAU_MAX),
            }
        }
        Regime::End => {
            let tau = grid_then_golden(end_rate, &log_grid(TAU_MIN, TAU_MAX, GRID));
            OptimalParameters {
                regime,
                tau_star: tau,
                c_star: None,
                rate: end_rate(tau),
                tau_range: (TAU_MIN, TAU_MAX),
            }
        }
        Regime::MiddleFull => {
            let cs = lin_grid(C_MIN, C_MAX, 99);
            let best_c = |t: f64| grid_then_golden(|c| middle_rate(t, c), &cs);
            let profile = |t: f64| middle_rate(t, best_c(t));
            let tau = grid_then_golden(profile, &log_grid(1.0, TAU_MAX, GRID));
            let c = best_c(tau);
            OptimalParameters {
                regime,
                tau_star: tau,
                c_star: Some(c),
                rate: middle_rate(tau, c),
                tau_range: (1.0, TAU_MAX),
            }
        }
    }
}
