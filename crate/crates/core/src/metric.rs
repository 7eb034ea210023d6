//! Distances between orbits of points.
//!
//! `d_G(x1, x2) = min_{φ ∈ Ĝ, ℓ ∈ Z^d} |B (φ(x1) - x2 + ℓ)|`. Both points
//! are wrapped into `[0,1)^d` first, so a translation shell of radius 1
//! covers every nearest image for reasonable cells; the default of 2 leaves
//! margin for strongly sheared ones.

use std::cmp::Ordering;

use crate::error::{check_dim, Error, Result};
use crate::groups::CosetGroup;
use crate::lattice::LatticeCell;

pub const DEFAULT_SHELL: u32 = 2;

/// Tolerance used when comparing canonical representatives.
pub const CANONICAL_TOLERANCE: f64 = 1e-9;

/// Relative tolerance for the metric constraints `A^T G A = G`.
pub const METRIC_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum MetricWarning {
    /// The cell does not carry the group's point symmetry; listed elements
    /// are not isometries.
    CellMismatch { elements: Vec<String> },
    /// A shell below 1 misses neighbouring images.
    SmallShell(u32),
}

impl std::fmt::Display for MetricWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricWarning::CellMismatch { elements } => write!(
                f,
                "cell metric is incompatible with the group ({} element(s) are not isometries, e.g. {})",
                elements.len(),
                elements[0]
            ),
            MetricWarning::SmallShell(s) => {
                write!(f, "translation shell {s} may miss nearest images; use at least 1")
            }
        }
    }
}

/// Wraps into `[0, 1)`, snapping values within 1e-12 of 1 to 0.
pub fn wrap_unit(v: f64) -> f64 {
    let w = v - v.floor();
    if w >= 1.0 - 1e-12 {
        0.0
    } else {
        w
    }
}

fn wrap3(x: &[f64; 3], dim: usize) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..dim {
        out[i] = wrap_unit(x[i]);
    }
    out
}

fn pad(x: &[f64]) -> [f64; 3] {
    let mut p = [0.0; 3];
    p[..x.len()].copy_from_slice(x);
    p
}

/// Precomputed group and cell data for repeated orbit-distance queries.
#[derive(Clone, Debug)]
pub struct OrbitMetric {
    group: CosetGroup,
    cell: LatticeCell,
    shifts: Vec<[f64; 3]>,
    warnings: Vec<MetricWarning>,
}

impl OrbitMetric {
    pub fn new(group: &CosetGroup, cell: &LatticeCell, shell: u32) -> Result<Self> {
        check_dim(group.dim(), cell.dim())?;
        let dim = group.dim();
        let mut warnings = Vec::new();
        let bad = cell.metric_violations(group, METRIC_TOLERANCE);
        if !bad.is_empty() {
            warnings.push(MetricWarning::CellMismatch {
                elements: bad.iter().map(|&i| group.elements()[i].to_string()).collect(),
            });
        }
        if shell < 1 {
            warnings.push(MetricWarning::SmallShell(shell));
        }
        let s = shell as i32;
        let mut shifts = Vec::new();
        let range = |axis: usize| if axis < dim { -s..=s } else { 0..=0 };
        for a in range(0) {
            for b in range(1) {
                for c in range(2) {
                    shifts.push([a as f64, b as f64, c as f64]);
                }
            }
        }
        Ok(OrbitMetric {
            group: group.clone(),
            cell: cell.clone(),
            shifts,
            warnings,
        })
    }

    pub fn warnings(&self) -> &[MetricWarning] {
        &self.warnings
    }

    pub fn group(&self) -> &CosetGroup {
        &self.group
    }

    pub fn cell(&self) -> &LatticeCell {
        &self.cell
    }

    fn dim(&self) -> usize {
        self.group.dim()
    }

    /// Wrapped images `φ(x) mod 1` for every element.
    fn images(&self, x: &[f64]) -> Vec<[f64; 3]> {
        let p = pad(x);
        self.group
            .elements()
            .iter()
            .map(|op| wrap3(&op.apply(&p), self.dim()))
            .collect()
    }

    pub fn distance(&self, x1: &[f64], x2: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x1.len())?;
        check_dim(self.dim(), x2.len())?;
        if x1.iter().chain(x2).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("coordinates must be finite".into()));
        }
        let target = wrap3(&pad(x2), self.dim());
        let mut best = f64::INFINITY;
        for y in self.images(x1) {
            let d = [y[0] - target[0], y[1] - target[1], y[2] - target[2]];
            for l in &self.shifts {
                let v = self.cell.length(&[d[0] + l[0], d[1] + l[1], d[2] + l[2]]);
                if v < best {
                    best = v;
                }
            }
        }
        Ok(best)
    }

    /// Lexicographically smallest wrapped image of `x`, comparing
    /// coordinates with a tolerance of [`CANONICAL_TOLERANCE`].
    pub fn canonical(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let images = self.images(x);
        let mut best = images[0];
        for y in &images[1..] {
            if lex_cmp_tol(y, &best, self.dim()) == Ordering::Less {
                best = *y;
            }
        }
        Ok(best[..self.dim()].to_vec())
    }

    /// For p6m: the image of `x` inside the triangle with fractional
    /// vertices `(0,0)`, `(1/2,0)`, `(2/3,1/3)`, returned in Cartesian
    /// coordinates.
    pub fn fold_p6m(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(2, x.len())?;
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        let mut best = (f64::INFINITY, [0.0; 3]);
        for y in self.images(x) {
            for l in [[-1.0, -1.0], [-1.0, 0.0], [0.0, -1.0], [0.0, 0.0]] {
                let p = [y[0] + l[0], y[1] + l[1], 0.0];
                let v = triangle_violation(&p);
                if v < best.0 {
                    best = (v, p);
                }
            }
        }
        Ok(self.cell.to_cartesian(&best.1[..2]))
    }
}

fn lex_cmp_tol(a: &[f64; 3], b: &[f64; 3], dim: usize) -> Ordering {
    for i in 0..dim {
        if (a[i] - b[i]).abs() > CANONICAL_TOLERANCE {
            return a[i].partial_cmp(&b[i]).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

/// How far `p` lies outside the fundamental triangle, in barycentric units.
fn triangle_violation(p: &[f64; 3]) -> f64 {
    let t = 3.0 * p[1];
    let s = 2.0 * p[0] - 4.0 * p[1];
    let bary = [1.0 - s - t, s, t];
    bary.iter().fold(0.0f64, |m, &b| m.max(-b))
}

/// One-shot orbit distance. Warnings are discarded; use [`OrbitMetric`] to
/// inspect them.
pub fn orbit_distance(group: &CosetGroup, cell: &LatticeCell, x1: &[f64], x2: &[f64], shell: u32) -> Result<f64> {
    OrbitMetric::new(group, cell, shell)?.distance(x1, x2)
}

/// The cell and shell only affect warnings; the representative is chosen
/// in fractional coordinates.
pub fn canonical_representative(group: &CosetGroup, cell: &LatticeCell, x: &[f64], shell: u32) -> Result<Vec<f64>> {
    OrbitMetric::new(group, cell, shell)?.canonical(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{expand_group, load_group};

    fn group(dim: usize, key: &str) -> CosetGroup {
        expand_group(&load_group(dim, key).unwrap()).unwrap()
    }

    #[test]
    fn p1_is_torus_distance() {
        let g = group(2, "p1");
        let cell = LatticeCell::identity(2);
        let d = orbit_distance(&g, &cell, &[0.1, 0.1], &[0.9, 0.9], DEFAULT_SHELL).unwrap();
        assert!((d - 0.2f64.hypot(0.2)).abs() < 1e-12);
    }

    #[test]
    fn glide_images_are_at_distance_zero() {
        let g = group(2, "pg");
        let cell = LatticeCell::from_row_major(&[3.0, 0.0, 0.0, 5.0]).unwrap();
        let d = orbit_distance(&g, &cell, &[0.2, 0.3], &[-0.2, 0.8], 2).unwrap();
        assert!(d < 1e-12);
        let d = orbit_distance(&g, &cell, &[0.2, 0.3], &[0.2, 0.5], 2).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_snaps_near_one() {
        let g = group(2, "p1");
        let c = canonical_representative(&g, &LatticeCell::identity(2), &[1.0 - 1e-14, 0.5], 2).unwrap();
        assert_eq!(c, vec![0.0, 0.5]);
        let c = canonical_representative(&g, &LatticeCell::identity(2), &[-0.25, 2.5], 2).unwrap();
        assert_eq!(c, vec![0.75, 0.5]);
    }

    #[test]
    fn canonical_is_orbit_invariant() {
        let g = group(2, "p4g");
        let x = [0.137, 0.421];
        let c = canonical_representative(&g, &LatticeCell::identity(2), &x, 2).unwrap();
        for op in g.elements() {
            let y = op.act_on_point(&x).unwrap();
            let cy = canonical_representative(&g, &LatticeCell::identity(2), &y, 2).unwrap();
            assert!(c.iter().zip(&cy).all(|(a, b)| (a - b).abs() < 1e-9));
        }
    }

    #[test]
    fn mismatched_cell_warns() {
        let g = group(2, "p4");
        let rect = LatticeCell::from_row_major(&[1.0, 0.0, 0.0, 2.0]).unwrap();
        let m = OrbitMetric::new(&g, &rect, 2).unwrap();
        assert!(matches!(m.warnings()[0], MetricWarning::CellMismatch { .. }));
        let sq = LatticeCell::identity(2);
        assert!(OrbitMetric::new(&g, &sq, 2).unwrap().warnings().is_empty());
        let m = OrbitMetric::new(&g, &sq, 0).unwrap();
        assert_eq!(m.warnings(), &[MetricWarning::SmallShell(0)]);
    }

    #[test]
    fn p6m_fold_lands_in_triangle() {
        let g = group(2, "p6m");
        let cell = LatticeCell::from_parameters_2d(1.0, 1.0, 120.0).unwrap();
        let m = OrbitMetric::new(&g, &cell, 2).unwrap();
        let f = m.fold_p6m(&[0.81, 0.13]).unwrap();
        let frac = [
            f[0] + f[1] / 3f64.sqrt(),
            2.0 * f[1] / 3f64.sqrt(),
        ];
        assert!(triangle_violation(&[frac[0], frac[1], 0.0]) < 1e-12);
    }

    #[test]
    fn dimension_checks() {
        let g = group(2, "p1");
        let cell = LatticeCell::identity(3);
        assert!(OrbitMetric::new(&g, &cell, 2).is_err());
        let m = OrbitMetric::new(&g, &LatticeCell::identity(2), 2).unwrap();
        assert!(m.distance(&[0.1], &[0.1, 0.2]).is_err());
    }
}
