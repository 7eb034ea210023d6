//! Bravais classes and concrete lattice cells.
//!
//! A cell is stored as a matrix whose rows are the basis vectors, so a
//! fractional position `x` sits at the Cartesian point `Σ x_i b_i`, and an
//! integer frequency `k` has Cartesian wave vector `B^{-1} k`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::groups::CosetGroup;
use crate::symop::check_supported_dim;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeSystem {
    Oblique,
    Rectangular,
    Square,
    Triclinic,
    Monoclinic,
    Orthorhombic,
    Tetragonal,
    /// Hexagonal axes; also used for trigonal groups, including the
    /// rhombohedral ones in their hexagonal setting.
    Hexagonal,
    Cubic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Centering {
    P,
    A,
    B,
    C,
    I,
    F,
    R,
}

impl Centering {
    pub fn from_letter(c: char) -> Option<Centering> {
        Some(match c.to_ascii_uppercase() {
            'P' => Centering::P,
            'A' => Centering::A,
            'B' => Centering::B,
            'C' => Centering::C,
            'I' => Centering::I,
            'F' => Centering::F,
            'R' => Centering::R,
            _ => return None,
        })
    }

    pub fn letter(&self) -> char {
        match self {
            Centering::P => 'P',
            Centering::A => 'A',
            Centering::B => 'B',
            Centering::C => 'C',
            Centering::I => 'I',
            Centering::F => 'F',
            Centering::R => 'R',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BravaisClass {
    pub system: LatticeSystem,
    pub centering: Centering,
}

impl BravaisClass {
    /// Derives the class from the group number and the lattice letter that
    /// leads the Hermann–Mauguin symbol.
    pub fn for_group(dim: usize, number: u16, symbol: &str) -> Option<BravaisClass> {
        let centering = Centering::from_letter(symbol.chars().next()?)?;
        let system = match (dim, number) {
            (2, 1..=2) => LatticeSystem::Oblique,
            (2, 3..=9) => LatticeSystem::Rectangular,
            (2, 10..=12) => LatticeSystem::Square,
            (2, 13..=17) => LatticeSystem::Hexagonal,
            (3, 1..=2) => LatticeSystem::Triclinic,
            (3, 3..=15) => LatticeSystem::Monoclinic,
            (3, 16..=74) => LatticeSystem::Orthorhombic,
            (3, 75..=142) => LatticeSystem::Tetragonal,
            (3, 143..=194) => LatticeSystem::Hexagonal,
            (3, 195..=230) => LatticeSystem::Cubic,
            _ => return None,
        };
        Some(BravaisClass { system, centering })
    }

    pub fn is_centered(&self) -> bool {
        self.centering != Centering::P
    }
}

impl fmt::Display for BravaisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = match self.system {
            LatticeSystem::Oblique | LatticeSystem::Monoclinic => 'm',
            LatticeSystem::Rectangular | LatticeSystem::Orthorhombic => 'o',
            LatticeSystem::Square | LatticeSystem::Tetragonal => 't',
            LatticeSystem::Triclinic => 'a',
            LatticeSystem::Hexagonal => 'h',
            LatticeSystem::Cubic => 'c',
        };
        write!(f, "{family}{}", self.centering.letter())
    }
}

/// A lattice cell: rows of `rows` are the basis vectors in Cartesian
/// length units.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeCell {
    dim: usize,
    rows: [[f64; 3]; 3],
    /// `B^{-1}`: maps integer frequencies to Cartesian wave vectors.
    reciprocal: [[f64; 3]; 3],
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inverse3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = det3(m);
    if !det.is_finite() || det.abs() < 1e-12 {
        return None;
    }
    let c = |i: usize, j: usize| m[i % 3][j % 3];
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (c(j + 1, i + 1) * c(j + 2, i + 2) - c(j + 1, i + 2) * c(j + 2, i + 1)) / det;
        }
    }
    Some(inv)
}

impl LatticeCell {
    /// Builds a cell from basis vectors given as rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        check_supported_dim(dim)?;
        let mut m = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            m[i][..dim].copy_from_slice(row);
        }
        let reciprocal = inverse3(&m).ok_or(Error::SingularLattice)?;
        Ok(LatticeCell {
            dim,
            rows: m,
            reciprocal,
        })
    }

    /// Accepts 4 numbers (2D) or 9 numbers (3D), row-major.
    pub fn from_row_major(values: &[f64]) -> Result<Self> {
        let dim = match values.len() {
            4 => 2,
            9 => 3,
            n => {
                return Err(Error::InvalidParameter(format!(
                    "lattice needs 4 or 9 numbers, got {n}"
                )))
            }
        };
        let rows: Vec<Vec<f64>> = values.chunks(dim).map(|c| c.to_vec()).collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_rows(&rows).expect("identity cell")
    }

    /// Cell from lengths and angles in degrees (`a` along x, `b` in the xy
    /// plane).
    pub fn from_parameters(a: f64, b: f64, c: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let (ca, cb, cg) = (
            alpha.to_radians().cos(),
            beta.to_radians().cos(),
            gamma.to_radians().cos(),
        );
        let sg = gamma.to_radians().sin();
        let cx = c * cb;
        let cy = c * (ca - cb * cg) / sg;
        let cz2 = c * c - cx * cx - cy * cy;
        if !(cz2 > 0.0) {
            return Err(Error::InvalidParameter(
                "cell angles do not describe a valid cell".into(),
            ));
        }
        Self::from_rows(&[
            vec![a, 0.0, 0.0],
            vec![b * cg, b * sg, 0.0],
            vec![cx, cy, cz2.sqrt()],
        ])
    }

    pub fn from_parameters_2d(a: f64, b: f64, gamma: f64) -> Result<Self> {
        let g = gamma.to_radians();
        Self::from_rows(&[vec![a, 0.0], vec![b * g.cos(), b * g.sin()]])
    }

    /// The unit-length cell with the highest metric symmetry of the class:
    /// orthonormal, or 120° hexagonal axes.
    pub fn reference(dim: usize, bravais: &BravaisClass) -> Self {
        match (dim, bravais.system) {
            (2, LatticeSystem::Hexagonal) => {
                Self::from_parameters_2d(1.0, 1.0, 120.0).expect("hexagonal cell")
            }
            (3, LatticeSystem::Hexagonal) => {
                Self::from_parameters(1.0, 1.0, 1.0, 90.0, 90.0, 120.0).expect("hexagonal cell")
            }
            _ => Self::identity(dim),
        }
    }

    /// Draws a cell satisfying the metric constraints of `system`.
    ///
    /// Lengths are uniform in `[3, 8]` Å; free angles are uniform in
    /// `[90, 120]`° (monoclinic β) or `[70, 110]`° (triclinic, oblique),
    /// redrawn until the cell is valid.
    pub fn random<R: Rng + ?Sized>(dim: usize, system: LatticeSystem, rng: &mut R) -> Self {
        let mut len = || rng.random_range(3.0..8.0);
        let (a, b, c) = (len(), len(), len());
        loop {
            let cell = match (dim, system) {
                (2, LatticeSystem::Oblique) => {
                    Self::from_parameters_2d(a, b, rng.random_range(70.0..110.0))
                }
                (2, LatticeSystem::Rectangular) => Self::from_parameters_2d(a, b, 90.0),
                (2, LatticeSystem::Square) => Self::from_parameters_2d(a, a, 90.0),
                (2, _) => Self::from_parameters_2d(a, a, 120.0),
                (_, LatticeSystem::Triclinic) => Self::from_parameters(
                    a,
                    b,
                    c,
                    rng.random_range(70.0..110.0),
                    rng.random_range(70.0..110.0),
                    rng.random_range(70.0..110.0),
                ),
                (_, LatticeSystem::Monoclinic) => {
                    Self::from_parameters(a, b, c, 90.0, rng.random_range(90.0..120.0), 90.0)
                }
                (_, LatticeSystem::Orthorhombic) => Self::from_parameters(a, b, c, 90.0, 90.0, 90.0),
                (_, LatticeSystem::Tetragonal) => Self::from_parameters(a, a, c, 90.0, 90.0, 90.0),
                (_, LatticeSystem::Hexagonal) => Self::from_parameters(a, a, c, 90.0, 90.0, 120.0),
                (_, LatticeSystem::Cubic) => Self::from_parameters(a, a, a, 90.0, 90.0, 90.0),
                (_, s) => panic!("lattice system {s:?} is two-dimensional"),
            };
            if let Ok(cell) = cell {
                return cell;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.rows[i][..self.dim].to_vec())
            .collect()
    }

    pub fn volume(&self) -> f64 {
        det3(&self.rows).abs()
    }

    /// `Σ x_i b_i`.
    pub fn to_cartesian(&self, x: &[f64]) -> Vec<f64> {
        let mut p = [0.0; 3];
        p[..self.dim].copy_from_slice(&x[..self.dim]);
        self.cartesian(&p)[..self.dim].to_vec()
    }

    pub(crate) fn cartesian(&self, x: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, xi) in x.iter().enumerate().take(self.dim) {
            for (o, b) in out.iter_mut().zip(&self.rows[i]) {
                *o += xi * b;
            }
        }
        out
    }

    /// Euclidean length of the Cartesian image of a fractional displacement.
    pub(crate) fn length(&self, d: &[f64; 3]) -> f64 {
        let c = self.cartesian(d);
        (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
    }

    /// Cartesian wave vector `B^{-1} k` of an integer frequency.
    pub fn wave_vector(&self, k: &[i32]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.reciprocal[i][j] * k[j] as f64)
                    .sum()
            })
            .collect()
    }

    pub fn wave_norm_sq(&self, k: &[i32]) -> f64 {
        self.wave_vector(k).iter().map(|v| v * v).sum()
    }

    /// Metric tensor `B B^T`.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| (0..self.dim).map(|k| self.rows[i][k] * self.rows[j][k]).sum())
                    .collect()
            })
            .collect()
    }

    /// Indices of group elements that are not Cartesian isometries of this
    /// cell, i.e. violate `A^T G A = G` beyond `rel_tol`.
    pub fn metric_violations(&self, group: &CosetGroup, rel_tol: f64) -> Vec<usize> {
        let g = self.gram();
        let scale = g
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let n = self.dim;
        group
            .elements()
            .iter()
            .enumerate()
            .filter(|(_, op)| {
                (0..n).any(|i| {
                    (0..n).any(|j| {
                        let mut v = 0.0;
                        for k in 0..n {
                            for l in 0..n {
                                v += op.entry(k, i) as f64 * g[k][l] * op.entry(l, j) as f64;
                            }
                        }
                        (v - g[i][j]).abs() > rel_tol * scale
                    })
                })
            })
            .map(|(i, _)| i)
            .collect()
    }
}
