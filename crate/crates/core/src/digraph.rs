//! The vertex-random proximity catch digraph and its relative density.

use serde::{Deserialize, Serialize};

use crate::error::{PcdError, Result};
use crate::geometry1d::{proximity_region, unit_proximity, CellKind, IntervalPartition, Params};

/// Relative densities of a digraph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    /// `|A| / n_T`, arcs over the largest arc count the cells allow.
    pub rho_v1: f64,
    /// `|A| / (n (n - 1))`.
    pub rho_v2: f64,
    /// `|A_i| / (n_i (n_i - 1))` per cell, 0 when `n_i <= 1`.
    pub per_cell: Vec<f64>,
}

impl DensityReport {
    /// Densities from per-cell vertex and arc counts; `n` counts every
    /// vertex, including those sitting on anchors.
    pub fn from_counts(n: usize, cell_counts: &[usize], cell_arcs: &[usize]) -> Self {
        let arcs: usize = cell_arcs.iter().sum();
        let n_t = max_arcs(cell_counts);
        let ratio = |num: usize, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        DensityReport {
            rho_v1: ratio(arcs, n_t),
            rho_v2: ratio(arcs, ordered_pairs(n)),
            per_cell: cell_counts
                .iter()
                .zip(cell_arcs)
                .map(|(&ni, &ai)| ratio(ai, ordered_pairs(ni)))
                .collect(),
        }
    }
}

fn ordered_pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1)
}

fn max_arcs(cell_counts: &[usize]) -> u64 {
    cell_counts.iter().map(|&ni| ordered_pairs(ni)).sum()
}

/// Per-cell vertex and arc counts, without the arc list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcTally {
    pub n_total: usize,
    pub cell_counts: Vec<usize>,
    pub cell_arcs: Vec<usize>,
}

impl ArcTally {
    pub fn density(&self) -> DensityReport {
        DensityReport::from_counts(self.n_total, &self.cell_counts, &self.cell_arcs)
    }
}

/// Vertices sorted by local coordinate within each cell.
struct CellMembers {
    cell_of: Vec<Option<usize>>,
    /// `(local coordinate, vertex index)`, sorted per cell.
    members: Vec<Vec<(f64, usize)>>,
}

fn assign(xs: &[f64], partition: &IntervalPartition) -> Result<CellMembers> {
    let support = partition.support();
    let cells = partition.cells();
    let mut members = vec![Vec::new(); cells.len()];
    let mut cell_of = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        if !(x.is_finite() && support.contains_closed(x)) {
            return Err(PcdError::InvalidInput(format!(
                "point {x} lies outside the support [{}, {}]",
                support.delta1(),
                support.delta2()
            )));
        }
        let idx = partition.locate(x);
        if let Some(k) = idx {
            members[k].push((cells[k].to_local(x), i));
        }
        cell_of.push(idx);
    }
    for m in &mut members {
        m.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }
    Ok(CellMembers { cell_of, members })
}

/// Calls `sink(cell, i, lo, hi, slice)` for every vertex `i`, where
/// `slice[lo..hi]` are exactly the cell members strictly inside `N(x_i)`
/// (including `i` itself).
fn stab<F>(cm: &CellMembers, partition: &IntervalPartition, params: &Params, mut sink: F)
where
    F: FnMut(usize, usize, usize, usize, &[(f64, usize)]),
{
    for (k, sorted) in cm.members.iter().enumerate() {
        let kind = partition.cells()[k].kind;
        for &(u, i) in sorted {
            let region = unit_proximity(u, params, kind);
            let lo = sorted.partition_point(|&(v, _)| v <= region.lo);
            let hi = sorted.partition_point(|&(v, _)| v < region.hi);
            sink(k, i, lo, hi.max(lo), sorted);
        }
    }
}

/// Vertex and arc counts per cell in `O(n log n)`, without storing arcs.
pub fn count_arcs(xs: &[f64], partition: &IntervalPartition, params: &Params) -> Result<ArcTally> {
    let cm = assign(xs, partition)?;
    let mut cell_arcs = vec![0usize; cm.members.len()];
    stab(&cm, partition, params, |k, _, lo, hi, _| {
        // the vertex itself always lies in its own region
        cell_arcs[k] += (hi - lo).saturating_sub(1);
    });
    Ok(ArcTally {
        n_total: xs.len(),
        cell_counts: cm.members.iter().map(Vec::len).collect(),
        cell_arcs,
    })
}

/// A central similarity PCD: vertices are the target-class points and
/// `(i, j)` is an arc iff `x_j` lies in `N(x_i)` inside the same cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcdDigraph {
    vertices: Vec<f64>,
    cell_of: Vec<Option<usize>>,
    arcs: Vec<(usize, usize)>,
    cell_counts: Vec<usize>,
    cell_arcs: Vec<usize>,
}

impl PcdDigraph {
    /// Builds the arc set with one sorted sweep per cell and binary-search
    /// stabbing queries: `O(n log n + |A|)`.
    ///
    /// Points on an anchor (or on the support boundary) are kept as
    /// vertices but belong to no cell and have no arcs.
    pub fn build(xs: &[f64], partition: &IntervalPartition, params: &Params) -> Result<Self> {
        let cm = assign(xs, partition)?;
        let mut arcs = Vec::new();
        let mut cell_arcs = vec![0usize; cm.members.len()];
        stab(&cm, partition, params, |k, i, lo, hi, sorted| {
            for &(_, j) in &sorted[lo..hi] {
                if j != i {
                    arcs.push((i, j));
                    cell_arcs[k] += 1;
                }
            }
        });
        arcs.sort_unstable();
        Ok(PcdDigraph {
            vertices: xs.to_vec(),
            cell_counts: cm.members.iter().map(Vec::len).collect(),
            cell_of: cm.cell_of,
            arcs,
            cell_arcs,
        })
    }

    /// Reference construction testing every ordered pair against the
    /// region computed in the original coordinates.
    pub fn build_naive(xs: &[f64], partition: &IntervalPartition, params: &Params) -> Result<Self> {
        let cm = assign(xs, partition)?;
        let cells = partition.cells();
        let mut arcs = Vec::new();
        let mut cell_arcs = vec![0usize; cells.len()];
        for (i, &x) in xs.iter().enumerate() {
            let Some(k) = cm.cell_of[i] else { continue };
            let region = proximity_region(x, params, &cells[k])?;
            for (j, &z) in xs.iter().enumerate() {
                if j != i && cm.cell_of[j] == Some(k) && region.contains(z) {
                    arcs.push((i, j));
                    cell_arcs[k] += 1;
                }
            }
        }
        Ok(PcdDigraph {
            vertices: xs.to_vec(),
            cell_counts: cm.members.iter().map(Vec::len).collect(),
            cell_of: cm.cell_of,
            arcs,
            cell_arcs,
        })
    }

    pub fn vertices(&self) -> &[f64] {
        &self.vertices
    }

    /// Cell index of each vertex (`None` for points on anchors).
    pub fn cell_of(&self) -> &[Option<usize>] {
        &self.cell_of
    }

    /// Arcs as `(tail, head)` vertex indices, sorted.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn cell_counts(&self) -> &[usize] {
        &self.cell_counts
    }

    pub fn cell_arcs(&self) -> &[usize] {
        &self.cell_arcs
    }

    pub fn n_total(&self) -> usize {
        self.vertices.len()
    }

    /// `n_T = Σ n_i (n_i - 1)`.
    pub fn n_t(&self) -> u64 {
        max_arcs(&self.cell_counts)
    }

    pub fn relative_density(&self) -> DensityReport {
        DensityReport::from_counts(self.n_total(), &self.cell_counts, &self.cell_arcs)
    }

    /// The a.s. lower bound `(k1 + k2) / n_T` on the version-I density,
    /// valid for `τ >= 1`. `k1` counts pairs on the same side of `M_c` in
    /// middle cells, `k2` pairs within end cells.
    pub fn structural_lower_bound(&self, partition: &IntervalPartition, params: &Params) -> Result<f64> {
        if params.tau().as_f64() < 1.0 {
            return Err(PcdError::NotApplicable(format!(
                "the structural bound holds only for tau >= 1, got {}",
                params.tau()
            )));
        }
        let n_t = self.n_t();
        if n_t == 0 {
            return Ok(0.0);
        }
        let cells = partition.cells();
        let pairs = |n: u64| n * n.saturating_sub(1) / 2;
        let mut sides = vec![(0u64, 0u64); cells.len()];
        for (&x, cell) in self.vertices.iter().zip(&self.cell_of) {
            let Some(k) = *cell else { continue };
            if cells[k].kind == CellKind::Middle {
                let mc = cells[k].centrality_point(params.c()).unwrap();
                if x < mc {
                    sides[k].0 += 1;
                } else if x > mc {
                    sides[k].1 += 1;
                }
            }
        }
        let bound: u64 = cells
            .iter()
            .enumerate()
            .map(|(k, cell)| match cell.kind {
                CellKind::Middle => pairs(sides[k].0) + pairs(sides[k].1),
                _ => pairs(self.cell_counts[k] as u64),
            })
            .sum();
        Ok(bound as f64 / n_t as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry1d::{AnchorSet, SupportInterval, Tau};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_middle() -> IntervalPartition {
        IntervalPartition::single_middle(SupportInterval::unit())
    }

    #[test]
    fn two_point_example() {
        let p = Params::finite(1.0, 0.5).unwrap();
        let d = PcdDigraph::build(&[0.1, 0.2], &unit_middle(), &p).unwrap();
        assert_eq!(d.arcs(), &[(1, 0)]);
        let r = d.relative_density();
        assert_eq!(r.rho_v1, 0.5);
        assert_eq!(r.rho_v2, 0.5);
        assert_eq!(d.n_t(), 2);
    }

    #[test]
    fn infinite_tau_is_complete() {
        let p = Params::new(Tau::Infinity, 0.3).unwrap();
        let xs = [0.05, 0.9, 0.4, 0.41, 0.7];
        let d = PcdDigraph::build(&xs, &unit_middle(), &p).unwrap();
        assert_eq!(d.arcs().len(), 20);
        assert_eq!(d.relative_density().rho_v1, 1.0);
    }

    #[test]
    fn no_arcs_across_cells() {
        let part = IntervalPartition::new(SupportInterval::unit(), AnchorSet::new(vec![0.5]).unwrap())
            .unwrap();
        let p = Params::new(Tau::Infinity, 0.5).unwrap();
        let d = PcdDigraph::build(&[0.3, 0.6], &part, &p).unwrap();
        assert!(d.arcs().is_empty());
        assert_eq!(d.n_t(), 0);
        let r = d.relative_density();
        assert_eq!((r.rho_v1, r.rho_v2), (0.0, 0.0));
    }

    #[test]
    fn small_graphs_have_zero_density() {
        let p = Params::finite(1.0, 0.5).unwrap();
        for xs in [&[][..], &[0.3][..]] {
            let r = PcdDigraph::build(xs, &unit_middle(), &p)
                .unwrap()
                .relative_density();
            assert_eq!((r.rho_v1, r.rho_v2), (0.0, 0.0));
            assert!(r.per_cell.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn anchor_points_are_isolated() {
        let part = IntervalPartition::new(
            SupportInterval::unit(),
            AnchorSet::new(vec![0.5]).unwrap(),
        )
        .unwrap();
        let p = Params::new(Tau::Infinity, 0.5).unwrap();
        let d = PcdDigraph::build(&[0.5, 0.6, 0.7, 1.0], &part, &p).unwrap();
        assert_eq!(d.cell_of(), &[None, Some(1), Some(1), None]);
        assert_eq!(d.arcs(), &[(1, 2), (2, 1)]);
        assert_eq!(d.cell_counts(), &[0, 2]);
        let r = d.relative_density();
        assert_eq!(r.rho_v1, 1.0);
        assert_eq!(r.rho_v2, 2.0 / 12.0);
    }

    #[test]
    fn outside_support_rejected() {
        let p = Params::finite(1.0, 0.5).unwrap();
        assert!(matches!(
            PcdDigraph::build(&[0.5, 1.5], &unit_middle(), &p),
            Err(PcdError::InvalidInput(_))
        ));
        assert!(count_arcs(&[f64::NAN], &unit_middle(), &p).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let p = Params::finite(1.0, 0.5).unwrap();
        // all cells with at most one point
        let part = IntervalPartition::new(
            SupportInterval::unit(),
            AnchorSet::new(vec![0.3, 0.6]).unwrap(),
        )
        .unwrap();
        let d = PcdDigraph::build(&[0.1, 0.4, 0.9], &part, &p).unwrap();
        assert_eq!(d.structural_lower_bound(&part, &p).unwrap(), 0.0);

        // single right end cell with four points
        let part = IntervalPartition::with_boundary_anchors(
            SupportInterval::unit(),
            AnchorSet::new(vec![0.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(part.cells()[0].kind, CellKind::RightEnd);
        let d = PcdDigraph::build(&[0.1, 0.3, 0.6, 0.95], &part, &p).unwrap();
        assert_eq!(d.structural_lower_bound(&part, &p).unwrap(), 0.5);
        assert!(d.relative_density().rho_v1 >= 0.5);

        // middle cell, 2 points left of M_c and 3 to the right
        let part = unit_middle();
        let p = Params::finite(2.0, 0.4).unwrap();
        let d = PcdDigraph::build(&[0.1, 0.3, 0.5, 0.7, 0.9], &part, &p).unwrap();
        assert_eq!(d.structural_lower_bound(&part, &p).unwrap(), 0.2);

        let small = Params::finite(0.5, 0.4).unwrap();
        assert!(matches!(
            d.structural_lower_bound(&part, &small),
            Err(PcdError::NotApplicable(_))
        ));
    }

    fn random_case(seed: u64) -> (Vec<f64>, IntervalPartition, Params) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(1..5);
        let anchors: Vec<f64> = (0..m).map(|_| rng.random_range(-3.0..7.0)).collect();
        let part = IntervalPartition::new(
            SupportInterval::new(-3.0, 7.0).unwrap(),
            AnchorSet::new(anchors).unwrap(),
        )
        .unwrap();
        let n = rng.random_range(0..60);
        let xs = (0..n).map(|_| rng.random_range(-3.0..7.0)).collect();
        let tau = if rng.random_bool(0.1) {
            Tau::Infinity
        } else {
            Tau::new(rng.random_range(0.05..4.0)).unwrap()
        };
        let params = Params::new(tau, rng.random_range(0.05..0.95)).unwrap();
        (xs, part, params)
    }

    #[test]
    fn fast_matches_naive() {
        for seed in 0..300 {
            let (xs, part, p) = random_case(seed);
            let fast = PcdDigraph::build(&xs, &part, &p).unwrap();
            let naive = PcdDigraph::build_naive(&xs, &part, &p).unwrap();
            assert_eq!(fast, naive, "seed {seed}");
            let tally = count_arcs(&xs, &part, &p).unwrap();
            assert_eq!(tally.cell_arcs, fast.cell_arcs());
            assert_eq!(tally.density(), fast.relative_density());
        }
    }

    #[test]
    fn mixture_identity() {
        for seed in 0..200 {
            let (xs, part, p) = random_case(seed);
            let d = PcdDigraph::build(&xs, &part, &p).unwrap();
            let r = d.relative_density();
            if d.n_t() == 0 {
                continue;
            }
            let mix: f64 = d
                .cell_counts()
                .iter()
                .zip(&r.per_cell)
                .map(|(&ni, &rho)| (ni * ni.saturating_sub(1)) as f64 / d.n_t() as f64 * rho)
                .sum();
            assert!((mix - r.rho_v1).abs() < 1e-12);
            let n = d.n_total() as f64;
            let scaled = n * (n - 1.0) / d.n_t() as f64 * r.rho_v2;
            assert!((scaled - r.rho_v1).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn dyadic_affine_maps_preserve_arcs(
            seed in 0u64..1000, shift in -64i32..64, log_scale in -4i32..5,
        ) {
            let (xs, part, p) = random_case(seed);
            // dyadic data so that the map is exact in floating point
            let q = |x: f64| (x * 1048576.0).round() / 1048576.0;
            let anchors = AnchorSet::new(part.anchors().points().iter().map(|&y| q(y)).collect());
            prop_assume!(anchors.is_ok());
            let part = IntervalPartition::new(part.support(), anchors.unwrap()).unwrap();
            let xs: Vec<f64> = xs.iter().map(|&x| q(x)).collect();
            let scale = 2f64.powi(log_scale);
            let f = |x: f64| x * scale + shift as f64;
            let s = part.support();
            let mapped = IntervalPartition::new(
                SupportInterval::new(f(s.delta1()), f(s.delta2())).unwrap(),
                AnchorSet::new(part.anchors().points().iter().map(|&y| f(y)).collect()).unwrap(),
            ).unwrap();
            let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            let a = PcdDigraph::build(&xs, &part, &p).unwrap();
            let b = PcdDigraph::build(&ys, &mapped, &p).unwrap();
            prop_assert_eq!(a.arcs(), b.arcs());
        }
    }
}
