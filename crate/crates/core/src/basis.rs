//! Invariant basis functions and the routing matrix.
//!
//! For a phase-consistent orbit `O` with reference `ξ`, the invariant
//! function is
//!
//! ```text
//! e_O(x) = Σ_{ω ∈ O} c_ω exp(2πi ω·x),   c_ω = exp(-2πi r_ω)
//! ```
//!
//! where `r_ω` is the accumulated edge exponent from `ξ` to `ω`. The
//! conjugation follows from the edge relation `F(ω) = e^{2πi r} F(target)`:
//! walking an edge multiplies the coefficient by `e^{-2πi r}`. The routing
//! matrix stores exactly these coefficients, so `(M v(x))_k = e_{O_k}(x)`.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::graph::{build_graph_with_budget, find_orbits, prune_inconsistent, ConstraintGraph, Orbit, RemovalReason, DEFAULT_NODE_BUDGET};
use crate::groups::CosetGroup;
use crate::lattice::LatticeCell;
use crate::rational::{unit_phase, unit_phase_f64};
use crate::symop::Freq;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Normalization {
    /// Reference coefficient 1, all coefficients unit modulus.
    #[default]
    None,
    /// Rows scaled to unit L2 norm over the cell.
    Unit,
}

/// The invariant basis for one group and frequency box.
#[derive(Clone, Debug)]
pub struct BasisSet {
    dim: usize,
    radius: u32,
    group_number: u16,
    group_symbol: String,
    modes: Vec<Freq>,
    orbits: Vec<Orbit>,
    anomalies: Vec<Orbit>,
    removed: Vec<(Freq, RemovalReason)>,
}

impl BasisSet {
    pub fn build(group: &CosetGroup, radius: u32) -> Result<Self> {
        Self::build_with_budget(group, radius, DEFAULT_NODE_BUDGET)
    }

    pub fn build_with_budget(group: &CosetGroup, radius: u32, budget: usize) -> Result<Self> {
        let graph = prune_inconsistent(build_graph_with_budget(group, radius, budget)?);
        Ok(Self::from_graph(group, &graph))
    }

    /// Assembles the basis from an already pruned graph.
    pub fn from_graph(group: &CosetGroup, graph: &ConstraintGraph) -> Self {
        let (orbits, anomalies): (Vec<Orbit>, Vec<Orbit>) =
            find_orbits(graph).into_iter().partition(|o| o.consistent);
        let removed = graph
            .removed()
            .iter()
            .map(|(&i, &r)| (graph.nodes()[i], r))
            .collect();
        BasisSet {
            dim: graph.dim(),
            radius: graph.radius(),
            group_number: group.spec().number,
            group_symbol: group.spec().symbol.clone(),
            modes: graph.nodes().to_vec(),
            orbits,
            anomalies,
            removed,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn group_number(&self) -> u16 {
        self.group_number
    }

    pub fn group_symbol(&self) -> &str {
        &self.group_symbol
    }

    /// All enumerated frequencies; these index the routing-matrix columns.
    pub fn modes(&self) -> &[Freq] {
        &self.modes
    }

    /// Consistent orbits, one per basis function.
    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    /// Orbits that survived self-loop pruning but failed the full edge
    /// check. Never observed for crystallographic input.
    pub fn anomalies(&self) -> &[Orbit] {
        &self.anomalies
    }

    pub fn removed(&self) -> &[(Freq, RemovalReason)] {
        &self.removed
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    fn row_scale(orbit: &Orbit, norm: Normalization) -> f64 {
        match norm {
            Normalization::None => 1.0,
            Normalization::Unit => 1.0 / (orbit.len() as f64).sqrt(),
        }
    }

    /// Complex routing matrix: row `k` holds the coefficients of
    /// `e_{O_k}` in the columns of its member modes.
    pub fn routing_matrix(&self, norm: Normalization) -> RoutingMatrix {
        let mut entries = Vec::new();
        for (k, orbit) in self.orbits.iter().enumerate() {
            let scale = Self::row_scale(orbit, norm);
            for m in &orbit.members {
                entries.push(RoutingEntry {
                    row: k,
                    col: m.node,
                    value: unit_phase(-m.exponent) * scale,
                });
            }
        }
        RoutingMatrix::new(self.orbits.len(), self.modes.len(), entries)
    }

    /// Index of the orbit containing `omega`, if it is a basis frequency.
    pub fn orbit_of(&self, omega: &Freq) -> Option<usize> {
        self.orbits
            .iter()
            .position(|o| o.exponent_of(omega).is_some())
    }

    /// Index of the orbit `-O_k`.
    pub fn conjugate_orbit(&self, k: usize) -> Option<usize> {
        self.orbit_of(&self.orbits[k].reference.neg())
    }

    /// Routing matrix whose outputs are real: a self-conjugate orbit
    /// (`-O = O`) gives one row `μ e_O` with the phase `μ` chosen to make it
    /// real; a pair `O ≠ -O` gives the rows `Re e_O` and `Im e_O` in the
    /// positions of `O` and `-O`.
    pub fn real_routing_matrix(&self, norm: Normalization) -> RoutingMatrix {
        let index: HashMap<Freq, usize> = self
            .orbits
            .iter()
            .enumerate()
            .flat_map(|(k, o)| o.members.iter().map(move |m| (m.freq, k)))
            .collect();
        let col_of = |f: &Freq| self.orbits[index[f]].members.iter().find(|m| m.freq == *f).unwrap().node;
        let mut entries = Vec::new();
        for (k, orbit) in self.orbits.iter().enumerate() {
            let partner = index[&orbit.reference.neg()];
            let coeffs: Vec<(usize, usize, Complex64)> = orbit
                .members
                .iter()
                .map(|m| (m.node, col_of(&m.freq.neg()), unit_phase(-m.exponent)))
                .collect();
            if partner == k {
                // conj(e_O) = λ e_O with λ = conj(c_{-ξ}); μ² = λ makes μ e_O real
                let c_neg = coeffs
                    .iter()
                    .find(|(col, _, _)| self.modes[*col] == orbit.reference.neg())
                    .map(|c| c.2)
                    .expect("-ξ in self-conjugate orbit");
                let mu = c_neg.conj().sqrt() * Self::row_scale(orbit, norm);
                for (col, _, c) in &coeffs {
                    entries.push(RoutingEntry {
                        row: k,
                        col: *col,
                        value: mu * c,
                    });
                }
            } else if partner > k {
                let scale = match norm {
                    Normalization::None => 1.0,
                    Normalization::Unit => (2.0 / orbit.len() as f64).sqrt(),
                };
                let half = Complex64::new(0.5 * scale, 0.0);
                let half_i = Complex64::new(0.0, -0.5 * scale); // 1/(2i)
                for (col, neg_col, c) in &coeffs {
                    entries.push(RoutingEntry {
                        row: k,
                        col: *col,
                        value: c * half,
                    });
                    entries.push(RoutingEntry {
                        row: k,
                        col: *neg_col,
                        value: c.conj() * half,
                    });
                    entries.push(RoutingEntry {
                        row: partner,
                        col: *col,
                        value: c * half_i,
                    });
                    entries.push(RoutingEntry {
                        row: partner,
                        col: *neg_col,
                        value: -c.conj() * half_i,
                    });
                }
            }
        }
        RoutingMatrix::new(self.orbits.len(), self.modes.len(), entries)
    }

    /// Evaluates `e_{O_k}(x)` by summing over the orbit directly, without
    /// the routing matrix.
    pub fn evaluate_orbit(&self, k: usize, x: &[f64]) -> Result<Complex64> {
        check_dim(self.dim, x.len())?;
        let orbit = self.orbits.get(k).ok_or_else(|| {
            Error::InvalidParameter(format!("basis index {k} out of range (size {})", self.len()))
        })?;
        Ok(orbit
            .members
            .iter()
            .map(|m| {
                let r = *m.exponent.numer() as f64 / *m.exponent.denom() as f64;
                Complex64::from_polar(1.0, std::f64::consts::TAU * (m.freq.dot(x) - r))
            })
            .sum())
    }

    /// All basis functions at `x` by direct per-orbit summation.
    pub fn evaluate_direct(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        (0..self.len()).map(|k| self.evaluate_orbit(k, x)).collect()
    }

    pub fn encoder(&self, norm: Normalization) -> Encoder {
        Encoder {
            dim: self.dim,
            modes: self.modes.clone(),
            routing: self.routing_matrix(norm),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoutingEntry {
    pub row: usize,
    pub col: usize,
    pub value: Complex64,
}

/// Sparse complex matrix mapping raw Fourier modes to basis functions.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutingMatrix {
    rows: usize,
    cols: usize,
    /// Sorted row-major.
    entries: Vec<RoutingEntry>,
}

impl RoutingMatrix {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<RoutingEntry>) -> Self {
        entries.sort_by_key(|e| (e.row, e.col));
        RoutingMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[RoutingEntry] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.cols, v.len())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for e in &self.entries {
            out[e.row] += e.value * v[e.col];
        }
        Ok(out)
    }
}

/// `[v(x)]_j = exp(2πi ω_j · x)`.
pub fn evaluate_modes(x: &[f64], modes: &[Freq]) -> Result<Vec<Complex64>> {
    if let Some(m) = modes.first() {
        check_dim(m.dim(), x.len())?;
    }
    Ok(modes.iter().map(|m| unit_phase_f64(m.dot(x))).collect())
}

/// Precomputed `x -> M v(x)`.
#[derive(Clone, Debug)]
pub struct Encoder {
    dim: usize,
    modes: Vec<Freq>,
    routing: RoutingMatrix,
}

impl Encoder {
    pub fn from_parts(modes: Vec<Freq>, routing: RoutingMatrix) -> Result<Self> {
        check_dim(routing.cols(), modes.len())?;
        let dim = modes.first().map_or(2, |m| m.dim());
        Ok(Encoder { dim, modes, routing })
    }

    pub fn routing(&self) -> &RoutingMatrix {
        &self.routing
    }

    pub fn len(&self) -> usize {
        self.routing.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.routing.rows() == 0
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        check_dim(self.dim, x.len())?;
        self.routing.apply(&evaluate_modes(x, &self.modes)?)
    }
}

/// `e_G(x) = M_G v(x)` with unnormalized rows.
pub fn evaluate_encoding(basis: &BasisSet, x: &[f64]) -> Result<Vec<Complex64>> {
    basis.encoder(Normalization::None).evaluate(x)
}

/// Laplace eigenvalue of `e_O`: `4π²|ξ|²` in fractional units, or
/// `4π²|B^{-1}ξ|²` for a concrete cell.
pub fn laplace_eigenvalue(orbit: &Orbit, cell: Option<&LatticeCell>) -> Result<f64> {
    if !orbit.consistent {
        return Err(Error::InvalidParameter(
            "eigenvalue requested for an inconsistent orbit".into(),
        ));
    }
    let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    match cell {
        None => Ok(four_pi_sq * orbit.reference.norm_sq() as f64),
        Some(cell) => {
            check_dim(cell.dim(), orbit.reference.dim())?;
            Ok(four_pi_sq * cell.wave_norm_sq(orbit.reference.as_slice()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{expand_group, load_group};
    use crate::symop::parse_symop;
    use std::f64::consts::PI;

    fn basis(dim: usize, key: &str, radius: u32) -> BasisSet {
        BasisSet::build(&expand_group(&load_group(dim, key).unwrap()).unwrap(), radius).unwrap()
    }

    fn f(c: &[i32]) -> Freq {
        Freq::new(c).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn p1_routing_is_identity() {
        let b = basis(2, "p1", 2);
        let m = b.routing_matrix(Normalization::None);
        assert_eq!((m.rows(), m.cols(), m.nnz()), (25, 25, 25));
        let mut cols: Vec<usize> = m.entries().iter().map(|e| e.col).collect();
        cols.sort();
        assert_eq!(cols, (0..25).collect::<Vec<_>>());
        assert!(m.entries().iter().all(|e| e.value == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn pg_rows_match_worked_example() {
        let b = basis(2, "pg", 1);
        let m = b.routing_matrix(Normalization::None);
        let row = |c: &[i32]| {
            let k = b.orbit_of(&f(c)).unwrap();
            m.entries()
                .iter()
                .filter(|e| e.row == k)
                .map(|e| (b.modes()[e.col], e.value))
                .collect::<Vec<_>>()
        };
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(row(&[1, 0]), vec![(f(&[-1, 0]), one), (f(&[1, 0]), one)]);
        assert_eq!(row(&[1, 1]), vec![(f(&[-1, 1]), one), (f(&[1, 1]), -one)]);
    }

    #[test]
    fn mode_values() {
        let modes = [f(&[0, 0]), f(&[1, 0]), f(&[1, 1])];
        let v = evaluate_modes(&[0.0, 0.0], &modes).unwrap();
        assert!(v.iter().all(|z| close(*z, Complex64::new(1.0, 0.0), 1e-15)));
        let v = evaluate_modes(&[0.25, 0.9], &modes[1..2]).unwrap();
        assert!(close(v[0], Complex64::new(0.0, 1.0), 1e-15));
        let v = evaluate_modes(&[0.25, 0.25], &modes[2..]).unwrap();
        assert!(close(v[0], Complex64::new(-1.0, 0.0), 1e-15));
        assert!(evaluate_modes(&[0.1], &modes).is_err());
    }

    #[test]
    fn pg_encoding_component() {
        let b = basis(2, "pg", 2);
        let e = evaluate_encoding(&b, &[0.2, 0.7]).unwrap();
        let k = b.orbit_of(&f(&[1, 0])).unwrap();
        assert!(close(e[k], Complex64::new(2.0 * (0.4 * PI).cos(), 0.0), 1e-12));
        assert!((e[k].re - 0.618034).abs() < 1e-6);
    }

    #[test]
    fn p1_encoding_at_origin_is_ones() {
        let b = basis(2, "p1", 1);
        let e = evaluate_encoding(&b, &[0.0, 0.0]).unwrap();
        assert_eq!(e.len(), 9);
        assert!(e.iter().all(|z| close(*z, Complex64::new(1.0, 0.0), 1e-15)));
    }

    #[test]
    fn screw_axis_encoding_is_invariant() {
        // quarter-turn phases distinguish c_ω from its conjugate
        let g = expand_group(&load_group(3, "P4_1").unwrap()).unwrap();
        let b = BasisSet::build(&g, 3).unwrap();
        let enc = b.encoder(Normalization::None);
        let x = [0.13, 0.37, 0.71];
        let base = enc.evaluate(&x).unwrap();
        for op in g.elements() {
            let y = op.act_on_point(&x).unwrap();
            let moved = enc.evaluate(&y).unwrap();
            for (a, c) in base.iter().zip(&moved) {
                assert!(close(*a, *c, 1e-9), "{op}");
            }
        }
        let screw = parse_symop("-y,x,z+1/4", 3).unwrap();
        assert!(g.elements().contains(&screw));
    }

    #[test]
    fn routing_agrees_with_direct_sum() {
        let b = basis(3, "227", 3);
        let enc = b.encoder(Normalization::None);
        for x in [[0.1, 0.2, 0.3], [0.77, 0.05, 0.61]] {
            let via_matrix = enc.evaluate(&x).unwrap();
            let direct = b.evaluate_direct(&x).unwrap();
            for (a, d) in via_matrix.iter().zip(&direct) {
                assert!(close(*a, *d, 1e-12));
            }
        }
    }

    #[test]
    fn real_form_is_real_and_invariant() {
        for (dim, key, radius) in [(2, "p3", 3), (2, "pg", 3), (3, "P6_1", 2), (3, "Ia-3d", 2)] {
            let g = expand_group(&load_group(dim, key).unwrap()).unwrap();
            let b = BasisSet::build(&g, radius).unwrap();
            let m = b.real_routing_matrix(Normalization::Unit);
            assert_eq!(m.rows(), b.len());
            let enc = Encoder::from_parts(b.modes().to_vec(), m).unwrap();
            let x: Vec<f64> = [0.31, 0.17, 0.83][..dim].to_vec();
            let base = enc.evaluate(&x).unwrap();
            assert!(base.iter().all(|z| z.im.abs() < 1e-12), "{key}");
            for op in g.elements() {
                let moved = enc.evaluate(&op.act_on_point(&x).unwrap()).unwrap();
                for (a, c) in base.iter().zip(&moved) {
                    assert!((a.re - c.re).abs() < 1e-9);
                }
            }
            // no row vanishes identically
            for k in 0..b.len() {
                assert!(enc.routing().entries().iter().any(|e| e.row == k && e.value.norm() > 1e-12));
            }
        }
    }

    #[test]
    fn eigenvalues() {
        let b = basis(2, "pg", 2);
        assert_eq!(laplace_eigenvalue(&b.orbits()[0], None).unwrap(), 0.0);
        let k = b.orbit_of(&f(&[-1, 0])).unwrap();
        let unit = LatticeCell::identity(2);
        assert!((laplace_eigenvalue(&b.orbits()[k], Some(&unit)).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
        let k = b.orbit_of(&f(&[1, 1])).unwrap();
        let mut o = b.orbits()[k].clone();
        o.reference = f(&[1, 1]);
        let doubled = LatticeCell::from_row_major(&[2.0, 0.0, 0.0, 2.0]).unwrap();
        assert!((laplace_eigenvalue(&o, Some(&doubled)).unwrap() - 2.0 * PI * PI).abs() < 1e-12);
        o.consistent = false;
        assert!(laplace_eigenvalue(&o, None).is_err());
    }

    #[test]
    fn normalized_rows_have_unit_norm() {
        let b = basis(2, "p4m", 3);
        let m = b.routing_matrix(Normalization::Unit);
        for k in 0..m.rows() {
            let n: f64 = m.entries().iter().filter(|e| e.row == k).map(|e| e.value.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
