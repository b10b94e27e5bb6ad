//! Test of complete spatial randomness of `X` given the anchors `Y`, using
//! the relative density and its asymptotic normal null distribution.
//!
//! Segregation and association are the natural alternatives, but which of
//! them raises the relative density of this digraph family on the line is
//! not settled, so both one-sided p-values are reported alongside the
//! two-sided one.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::digraph::count_arcs;
use crate::error::{PcdError, Result};
use crate::geometry1d::{AnchorSet, IntervalPartition, Params, SupportInterval};
use crate::moments::{mixture_moments, MomentPair};
use crate::montecarlo::DensityVersion;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub rho_observed: f64,
    pub mu_null: f64,
    pub four_nu_null: f64,
    /// `√n (ρ - μ) / √(4ν)`.
    pub z: f64,
    pub p_two_sided: f64,
    pub p_greater: f64,
    pub p_less: f64,
    pub n_effective: usize,
}

/// Standardizes `rho` against the null moments and attaches normal
/// p-values. The smaller tail is computed directly, the other as its
/// complement.
pub fn z_test(rho: f64, null: MomentPair, n: usize) -> Result<TestResult> {
    if n < 2 {
        return Err(PcdError::InvalidInput(format!(
            "need at least 2 points, got {n}"
        )));
    }
    if null.is_degenerate() {
        return Err(PcdError::Degenerate(
            "null variance is zero; calibrate the statistic by Monte Carlo instead".into(),
        ));
    }
    let z = (n as f64).sqrt() * (rho - null.mu) / null.four_nu.sqrt();
    let normal = Normal::standard();
    let (p_greater, p_less) = if z >= 0.0 {
        let upper = normal.sf(z);
        (upper, 1.0 - upper)
    } else {
        let lower = normal.cdf(z);
        (1.0 - lower, lower)
    };
    Ok(TestResult {
        rho_observed: rho,
        mu_null: null.mu,
        four_nu_null: null.four_nu,
        z,
        p_two_sided: (2.0 * p_greater.min(p_less)).min(1.0),
        p_greater,
        p_less,
        n_effective: n,
    })
}

/// Builds the digraph of `xs` on the partition induced by `anchors` and
/// tests its relative density against the uniform null.
///
/// Anchors may sit on the support boundary, in which case the matching end
/// cell is absent.
pub fn spatial_test(
    xs: &[f64],
    anchors: &AnchorSet,
    support: SupportInterval,
    params: &Params,
    version: DensityVersion,
) -> Result<TestResult> {
    if xs.len() < 2 {
        return Err(PcdError::InvalidInput(format!(
            "need at least 2 points, got {}",
            xs.len()
        )));
    }
    if params.tau().is_infinite() {
        return Err(PcdError::Degenerate(
            "τ = ∞ gives a complete digraph in every cell; the normal null does not apply".into(),
        ));
    }
    let partition = IntervalPartition::with_boundary_anchors(support, anchors.clone())?;
    let density = count_arcs(xs, &partition, params)?.density();
    let mixture = mixture_moments(&partition, params)?;
    let (rho, null) = match version {
        DensityVersion::V1 => (density.rho_v1, mixture.version_one()),
        DensityVersion::V2 => (density.rho_v2, mixture.version_two()),
    };
    z_test(rho, null, xs.len())
}
