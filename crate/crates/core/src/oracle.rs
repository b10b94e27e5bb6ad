//! Quadrature reconstruction of the arc probability and the three case
//! probabilities that make up the asymptotic covariance.
//!
//! With `X_1, X_2, X_3` iid uniform on the unit cell, and `X_2, X_3`
//! independent given `X_1`:
//!
//! ```text
//! p_a  = ∫ |N(x)| dx
//! P_2N = ∫ |N(x)|² dx
//! P_NG = ∫ |N(x)| |Γ1(x)| dx
//! P_2G = ∫ |Γ1(x)|² dx
//! ```
//!
//! The integrands come straight from [`crate::geometry1d`], so agreement with
//! [`crate::moments`] checks the closed forms against the region geometry.

use serde::{Deserialize, Serialize};

use crate::error::{PcdError, Result};
use crate::geometry1d::{unit_gamma1, unit_proximity, CellKind, Params, RegionKind, Tau};
use crate::moments::MomentPair;
use crate::quadrature::GaussLegendre;

pub const DEFAULT_TOL: f64 = 1e-10;

const GL_ORDER: usize = 12;

/// Clamp threshold for the variance reconstructed from quadrature values.
const NEGATIVE_VARIANCE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseProbabilities {
    pub p_a: f64,
    pub p2n: f64,
    pub png: f64,
    pub p2g: f64,
    pub kind: RegionKind,
}

impl CaseProbabilities {
    /// `P_2N + 2 P_NG + P_2G = 4 E[h12 h13]`.
    pub fn cross_sum(&self) -> f64 {
        self.p2n + 2.0 * self.png + self.p2g
    }
}

fn breakpoints(tau: f64, c: f64, kind: RegionKind) -> Vec<f64> {
    let mut pts = match kind {
        RegionKind::Middle => vec![
            c * (1.0 - tau),
            c,
            c * (1.0 - tau) + tau,
            c / (c + (1.0 - c) * tau),
            c * tau / (1.0 - c + c * tau),
        ],
        RegionKind::End => vec![1.0 / (1.0 + tau), 1.0 - tau],
    };
    pts.retain(|&p| p > 0.0 && p < 1.0);
    pts
}

/// Integrates the region-length moments over the unit cell of `kind`, to
/// absolute accuracy `tol` per quantity. `τ = ∞` returns the all-ones limit.
pub fn case_probabilities(params: &Params, kind: RegionKind, tol: f64) -> Result<CaseProbabilities> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(PcdError::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let Tau::Finite(tau) = params.tau() else {
        return Ok(CaseProbabilities {
            p_a: 1.0,
            p2n: 1.0,
            png: 1.0,
            p2g: 1.0,
            kind,
        });
    };
    let cell = match kind {
        RegionKind::Middle => CellKind::Middle,
        RegionKind::End => CellKind::RightEnd,
    };
    let n_len = |u: f64| unit_proximity(u, params, cell).len();
    let g_len = |u: f64| unit_gamma1(u, params, cell).len();
    let cuts = breakpoints(tau, params.c(), kind);
    let gl = GaussLegendre::new(GL_ORDER);
    let integrate = |f: &dyn Fn(f64) -> f64| gl.integrate_piecewise(f, 0.0, 1.0, &cuts, tol);

    Ok(CaseProbabilities {
        p_a: integrate(&|u| n_len(u)),
        p2n: integrate(&|u| n_len(u).powi(2)),
        png: integrate(&|u| n_len(u) * g_len(u)),
        p2g: integrate(&|u| g_len(u).powi(2)),
        kind,
    })
}

/// `μ = p_a`, `4ν = P_2N + 2 P_NG + P_2G - 4 p_a²`; negatives within
/// quadrature noise are clamped to zero.
pub fn moments_from_probabilities(cp: &CaseProbabilities) -> MomentPair {
    let four_nu = cp.cross_sum() - 4.0 * cp.p_a * cp.p_a;
    let four_nu = if four_nu < 0.0 && four_nu > -NEGATIVE_VARIANCE_SLACK {
        0.0
    } else {
        four_nu
    };
    MomentPair {
        mu: cp.p_a,
        four_nu,
    }
}
