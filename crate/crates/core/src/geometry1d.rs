//! Interval partitions induced by anchor points, and the central similarity
//! proximity regions `N(x, τ, c)` together with their Γ1 duals.
//!
//! Every region is computed in the local coordinates of its cell (the affine
//! image of the cell on `(0, 1)`) and mapped back. Membership is strict on
//! both ends.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{PcdError, Result};

/// Expansion parameter. `Infinity` is kept distinct from any finite value so
/// the whole-cell limit is exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tau {
    Finite(f64),
    Infinity,
}

impl Tau {
    pub fn new(value: f64) -> Result<Self> {
        if value == f64::INFINITY {
            Ok(Tau::Infinity)
        } else if value.is_finite() && value > 0.0 {
            Ok(Tau::Finite(value))
        } else {
            Err(PcdError::InvalidParameter(format!(
                "tau must be positive, got {value}"
            )))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Tau::Infinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Tau::Finite(t) => Some(t),
            Tau::Infinity => None,
        }
    }

    /// The value as a float, with `Infinity` mapped to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tau::Finite(t) => write!(f, "{t}"),
            Tau::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Tau {
    type Err = PcdError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "∞" => Ok(Tau::Infinity),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| PcdError::InvalidParameter(format!("cannot parse tau '{s}'")))?;
                Tau::new(v)
            }
        }
    }
}

impl Serialize for Tau {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Tau::Finite(t) => serializer.serialize_f64(*t),
            Tau::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Tau {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Tau::new(v),
            Raw::Str(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// The pair `(τ, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct Params {
    tau: Tau,
    c: f64,
}

#[derive(Deserialize)]
struct RawParams {
    tau: Tau,
    c: f64,
}

impl TryFrom<RawParams> for Params {
    type Error = PcdError;

    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.tau, raw.c)
    }
}

impl Params {
    pub fn new(tau: Tau, c: f64) -> Result<Self> {
        if let Tau::Finite(t) = tau {
            if !(t.is_finite() && t > 0.0) {
                return Err(PcdError::InvalidParameter(format!(
                    "tau must be positive, got {t}"
                )));
            }
        }
        if !(c > 0.0 && c < 1.0) {
            return Err(PcdError::InvalidParameter(format!(
                "c must lie in (0, 1), got {c}"
            )));
        }
        Ok(Params { tau, c })
    }

    /// Shorthand for a finite `τ`.
    pub fn finite(tau: f64, c: f64) -> Result<Self> {
        Params::new(Tau::new(tau)?, c)
    }

    pub fn tau(&self) -> Tau {
        self.tau
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// The open support `(δ1, δ2)` of the target class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSupport")]
pub struct SupportInterval {
    delta1: f64,
    delta2: f64,
}

#[derive(Deserialize)]
struct RawSupport {
    delta1: f64,
    delta2: f64,
}

impl TryFrom<RawSupport> for SupportInterval {
    type Error = PcdError;

    fn try_from(raw: RawSupport) -> Result<Self> {
        SupportInterval::new(raw.delta1, raw.delta2)
    }
}

impl SupportInterval {
    pub fn new(delta1: f64, delta2: f64) -> Result<Self> {
        if !(delta1.is_finite() && delta2.is_finite() && delta1 < delta2) {
            return Err(PcdError::InvalidInput(format!(
                "support needs finite delta1 < delta2, got ({delta1}, {delta2})"
            )));
        }
        Ok(SupportInterval { delta1, delta2 })
    }

    pub fn unit() -> Self {
        SupportInterval {
            delta1: 0.0,
            delta2: 1.0,
        }
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    pub fn width(&self) -> f64 {
        self.delta2 - self.delta1
    }

    pub fn contains_closed(&self, x: f64) -> bool {
        self.delta1 <= x && x <= self.delta2
    }
}

/// Anchor points `Y_(1) < ... < Y_(m)`, sorted on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AnchorSet {
    points: Vec<f64>,
}

impl TryFrom<Vec<f64>> for AnchorSet {
    type Error = PcdError;

    fn try_from(points: Vec<f64>) -> Result<Self> {
        AnchorSet::new(points)
    }
}

impl From<AnchorSet> for Vec<f64> {
    fn from(a: AnchorSet) -> Self {
        a.points
    }
}

impl AnchorSet {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(PcdError::InvalidInput("at least one anchor is required".into()));
        }
        if let Some(bad) = points.iter().find(|p| !p.is_finite()) {
            return Err(PcdError::InvalidInput(format!("anchor {bad} is not finite")));
        }
        points.sort_by(f64::total_cmp);
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(PcdError::InvalidInput(format!("duplicate anchor {}", w[0])));
        }
        Ok(AnchorSet { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    LeftEnd,
    Middle,
    RightEnd,
}

/// Cell kinds as far as the asymptotic moments are concerned: both end
/// cells share one distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Middle,
    End,
}

impl CellKind {
    pub fn region_kind(self) -> RegionKind {
        match self {
            CellKind::Middle => RegionKind::Middle,
            CellKind::LeftEnd | CellKind::RightEnd => RegionKind::End,
        }
    }
}

impl FromStr for RegionKind {
    type Err = PcdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "middle" => Ok(RegionKind::Middle),
            "end" => Ok(RegionKind::End),
            other => Err(PcdError::InvalidParameter(format!(
                "unknown interval kind '{other}' (expected middle or end)"
            ))),
        }
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionKind::Middle => "middle",
            RegionKind::End => "end",
        })
    }
}

/// One cell of an [`IntervalPartition`].
///
/// The centrality point `M_c` depends on `c`, so it is derived on demand by
/// [`Cell::centrality_point`] rather than stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub lo: f64,
    pub hi: f64,
    pub kind: CellKind,
    pub weight: f64,
}

impl Cell {
    /// The unit cell `(0, 1)` of the given kind, with weight 1.
    pub fn unit(kind: CellKind) -> Self {
        Cell {
            lo: 0.0,
            hi: 1.0,
            kind,
            weight: 1.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `M_c = lo + c (hi - lo)` for middle cells.
    pub fn centrality_point(&self, c: f64) -> Option<f64> {
        (self.kind == CellKind::Middle).then(|| self.lo + c * self.width())
    }

    pub fn to_local(&self, x: f64) -> f64 {
        (x - self.lo) / self.width()
    }

    pub fn from_local(&self, u: f64) -> f64 {
        if u <= 0.0 {
            self.lo
        } else if u >= 1.0 {
            self.hi
        } else {
            self.lo + u * self.width()
        }
    }

    pub fn contains_open(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// An open interval; `lo == hi` encodes the degenerate singleton region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval ({lo}, {hi}) is reversed");
        RealInterval { lo, hi }
    }

    pub fn singleton(x: f64) -> Self {
        RealInterval { lo: x, hi: x }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// `self ⊆ other` as open intervals.
    pub fn is_subset_of(&self, other: &RealInterval) -> bool {
        self.is_degenerate() && other.contains(self.lo)
            || other.lo <= self.lo && self.hi <= other.hi
    }
}

/// Cells induced by the anchors on the support, ordered left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalPartition {
    support: SupportInterval,
    anchors: AnchorSet,
    cells: Vec<Cell>,
}

impl IntervalPartition {
    /// Partition with every anchor strictly inside the support: `m` anchors
    /// give `m + 1` cells, two of which are end cells.
    pub fn new(support: SupportInterval, anchors: AnchorSet) -> Result<Self> {
        if let Some(bad) = anchors
            .points()
            .iter()
            .find(|&&y| !(support.delta1 < y && y < support.delta2))
        {
            return Err(PcdError::InvalidInput(format!(
                "anchor {bad} is not strictly inside ({}, {})",
                support.delta1, support.delta2
            )));
        }
        Ok(Self::build(support, anchors))
    }

    /// Like [`IntervalPartition::new`], but anchors may sit on the support
    /// boundary. An end cell of zero width is omitted, so anchors at both
    /// `δ1` and `δ2` leave only middle cells.
    pub fn with_boundary_anchors(support: SupportInterval, anchors: AnchorSet) -> Result<Self> {
        if let Some(bad) = anchors
            .points()
            .iter()
            .find(|&&y| !support.contains_closed(y))
        {
            return Err(PcdError::InvalidInput(format!(
                "anchor {bad} lies outside [{}, {}]",
                support.delta1, support.delta2
            )));
        }
        Ok(Self::build(support, anchors))
    }

    fn build(support: SupportInterval, anchors: AnchorSet) -> Self {
        let ys = anchors.points();
        let first = ys[0];
        let last = ys[ys.len() - 1];
        let has_left = first > support.delta1;
        let has_right = last < support.delta2;

        let mut bounds = Vec::with_capacity(ys.len() + 2);
        if has_left {
            bounds.push(support.delta1);
        }
        bounds.extend_from_slice(ys);
        if has_right {
            bounds.push(support.delta2);
        }

        let ncells = bounds.len() - 1;
        let width = support.width();
        let cells = bounds
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let kind = if i == 0 && has_left {
                    CellKind::LeftEnd
                } else if i + 1 == ncells && has_right {
                    CellKind::RightEnd
                } else {
                    CellKind::Middle
                };
                Cell {
                    lo: w[0],
                    hi: w[1],
                    kind,
                    weight: (w[1] - w[0]) / width,
                }
            })
            .collect();

        IntervalPartition {
            support,
            anchors,
            cells,
        }
    }

    /// A single middle cell spanning the support (anchors on both ends).
    pub fn single_middle(support: SupportInterval) -> Self {
        let anchors = AnchorSet {
            points: vec![support.delta1, support.delta2],
        };
        Self::build(support, anchors)
    }

    pub fn support(&self) -> SupportInterval {
        self.support
    }

    pub fn anchors(&self) -> &AnchorSet {
        &self.anchors
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Index of the cell whose interior holds `x`; `None` for points on an
    /// anchor, on the support boundary, or outside it.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let idx = self.cells.partition_point(|cell| cell.hi <= x);
        self.cells
            .get(idx)
            .filter(|cell| cell.contains_open(x))
            .map(|_| idx)
    }

    /// Sum of squared weights over the cells of one kind.
    pub fn weight_power_sum(&self, kind: RegionKind, power: i32) -> f64 {
        self.cells
            .iter()
            .filter(|cell| cell.kind.region_kind() == kind)
            .map(|cell| cell.weight.powi(power))
            .sum()
    }
}

/// `N(u)` on the unit cell of the given kind, for `0 < u < 1`.
pub fn unit_proximity(u: f64, params: &Params, kind: CellKind) -> RealInterval {
    let Tau::Finite(tau) = params.tau else {
        return RealInterval::new(0.0, 1.0);
    };
    match kind {
        CellKind::Middle => {
            let c = params.c;
            // u == M_c takes the left-hand formula.
            let (lo, hi) = if u <= c {
                (u * (1.0 - tau), u * (c + (1.0 - c) * tau) / c)
            } else {
                (u - c * tau * (1.0 - u) / (1.0 - c), u + (1.0 - u) * tau)
            };
            RealInterval::new(lo.max(0.0), hi.min(1.0))
        }
        CellKind::RightEnd => right_end_proximity(u, tau),
        CellKind::LeftEnd => mirror(right_end_proximity(1.0 - u, tau)),
    }
}

/// `Γ1(u) = {z : u ∈ N(z)}` on the unit cell, for `0 < u < 1`.
pub fn unit_gamma1(u: f64, params: &Params, kind: CellKind) -> RealInterval {
    let Tau::Finite(tau) = params.tau else {
        return RealInterval::new(0.0, 1.0);
    };
    match kind {
        CellKind::Middle => {
            let c = params.c;
            let left = |u: f64| c * u / (c + (1.0 - c) * tau);
            let right = |u: f64| (u * (1.0 - c) + c * tau) / (1.0 - c + c * tau);
            if tau >= 1.0 {
                return RealInterval::new(left(u), right(u));
            }
            let first_break = c * (1.0 - tau);
            let second_break = first_break + tau;
            if u <= first_break {
                RealInterval::new(left(u), u / (1.0 - tau))
            } else if u <= second_break {
                RealInterval::new(left(u), right(u))
            } else {
                RealInterval::new((u - tau) / (1.0 - tau), right(u))
            }
        }
        CellKind::RightEnd => right_end_gamma1(u, tau),
        CellKind::LeftEnd => mirror(right_end_gamma1(1.0 - u, tau)),
    }
}

fn right_end_proximity(v: f64, tau: f64) -> RealInterval {
    RealInterval::new((v * (1.0 - tau)).max(0.0), (v * (1.0 + tau)).min(1.0))
}

fn right_end_gamma1(v: f64, tau: f64) -> RealInterval {
    let hi = if tau < 1.0 && v < 1.0 - tau {
        v / (1.0 - tau)
    } else {
        1.0
    };
    RealInterval::new(v / (1.0 + tau), hi)
}

fn mirror(r: RealInterval) -> RealInterval {
    RealInterval::new(1.0 - r.hi, 1.0 - r.lo)
}

fn map_region(
    x: f64,
    params: &Params,
    cell: &Cell,
    unit: fn(f64, &Params, CellKind) -> RealInterval,
) -> Result<RealInterval> {
    if !(cell.lo <= x && x <= cell.hi) {
        return Err(PcdError::InvalidInput(format!(
            "point {x} is outside the cell ({}, {})",
            cell.lo, cell.hi
        )));
    }
    if x == cell.lo || x == cell.hi {
        return Ok(RealInterval::singleton(x));
    }
    let local = unit(cell.to_local(x), params, cell.kind);
    Ok(RealInterval::new(
        cell.from_local(local.lo),
        cell.from_local(local.hi),
    ))
}

/// The proximity region `N(x, τ, c)` (or `N_e(x, τ)` in an end cell).
///
/// Points on the cell boundary get the singleton region `{x}`; points
/// outside the cell are rejected.
pub fn proximity_region(x: f64, params: &Params, cell: &Cell) -> Result<RealInterval> {
    map_region(x, params, cell, unit_proximity)
}

/// The Γ1-region of `x`: all `z` in the cell whose proximity region holds `x`.
pub fn gamma1_region(x: f64, params: &Params, cell: &Cell) -> Result<RealInterval> {
    map_region(x, params, cell, unit_gamma1)
}
