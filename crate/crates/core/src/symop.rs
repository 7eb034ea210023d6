//! Affine symmetry operations `x -> A x + t` in fractional coordinates.
//!
//! `A` is an integer unimodular matrix in the lattice basis and `t` a
//! rational translation reduced into `[0, 1)`. Two-dimensional operations are
//! stored padded to 3×3 (identity in the unused row/column, zero unused
//! translation), which keeps every operation `Copy`-sized and lets the
//! algebra share one code path.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{check_dim, Error, Result};
use crate::rational::{mod_one, zero, Rational};

const AXES: [char; 3] = ['x', 'y', 'z'];

pub(crate) fn check_supported_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// An integer frequency vector on the reciprocal lattice `Z^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Freq {
    coords: [i32; 3],
    dim: u8,
}

impl Freq {
    pub fn new(coords: &[i32]) -> Result<Self> {
        check_supported_dim(coords.len())?;
        let mut c = [0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Freq {
            coords: c,
            dim: coords.len() as u8,
        })
    }

    pub(crate) fn from_array(dim: usize, coords: [i32; 3]) -> Self {
        Freq {
            coords,
            dim: dim as u8,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Freq::from_array(dim, [0; 3])
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.coords[..self.dim()]
    }

    pub(crate) fn array(&self) -> [i32; 3] {
        self.coords
    }

    pub fn norm_sq(&self) -> i64 {
        self.as_slice().iter().map(|&c| (c as i64) * (c as i64)).sum()
    }

    pub fn max_norm(&self) -> i32 {
        self.as_slice().iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Freq {
        Freq::from_array(
            self.dim(),
            [-self.coords[0], -self.coords[1], -self.coords[2]],
        )
    }

    /// `ω · x` for a real vector of the same dimension.
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.as_slice()
            .iter()
            .zip(x)
            .map(|(&w, &xi)| w as f64 * xi)
            .sum()
    }
}

impl PartialOrd for Freq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Freq {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then_with(|| self.coords.cmp(&other.coords))
    }
}

impl fmt::Display for Freq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.as_slice().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Freq {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.as_slice().serialize(serializer)
    }
}

type Mat3 = [[i32; 3]; 3];

fn det3(m: &Mat3) -> i64 {
    let m = |i: usize, j: usize| m[i][j] as i64;
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Integer inverse of a unimodular matrix via the adjugate.
fn unimodular_inverse(m: &Mat3) -> Mat3 {
    let det = det3(m) as i32;
    debug_assert!(det == 1 || det == -1);
    let c = |i: usize, j: usize| m[i % 3][j % 3];
    let mut inv = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // cofactor of (j, i)
            let cof = c(j + 1, i + 1) * c(j + 2, i + 2) - c(j + 1, i + 2) * c(j + 2, i + 1);
            inv[i][j] = cof * det;
        }
    }
    inv
}

fn mat_vec_rational(m: &Mat3, v: &[Rational; 3]) -> [Rational; 3] {
    let mut out = [zero(); 3];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            if m[i][j] != 0 {
                *o += *vj * Rational::from_integer(m[i][j] as i64);
            }
        }
    }
    out
}

/// A crystallographic symmetry operation in fractional coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymOp {
    dim: usize,
    linear: Mat3,
    translation: [Rational; 3],
}

impl SymOp {
    pub fn identity(dim: usize) -> Self {
        SymOp {
            dim,
            linear: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            translation: [zero(); 3],
        }
    }

    /// Builds an operation from `dim` rows of the linear part and `dim`
    /// translation components. Translations are reduced mod 1.
    pub fn from_parts(linear: &[Vec<i32>], translation: &[Rational]) -> Result<Self> {
        let dim = linear.len();
        check_supported_dim(dim)?;
        check_dim(dim, translation.len())?;
        let mut op = SymOp::identity(dim);
        for (i, row) in linear.iter().enumerate() {
            check_dim(dim, row.len())?;
            op.linear[i][..dim].copy_from_slice(row);
            op.translation[i] = mod_one(translation[i]);
        }
        let det = det3(&op.linear);
        if det.abs() != 1 {
            return Err(Error::NotUnimodular {
                op: op.to_string(),
                det,
            });
        }
        Ok(op)
    }

    /// Same as [`SymOp::from_parts`] but keeps the translation exactly as
    /// given. Only for building deliberately malformed element lists.
    pub fn from_parts_unreduced(linear: &[Vec<i32>], translation: &[Rational]) -> Result<Self> {
        let mut op = SymOp::from_parts(linear, translation)?;
        for (i, t) in translation.iter().enumerate() {
            op.translation[i] = *t;
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> Vec<Vec<i32>> {
        (0..self.dim)
            .map(|i| self.linear[i][..self.dim].to_vec())
            .collect()
    }

    pub fn entry(&self, i: usize, j: usize) -> i32 {
        self.linear[i][j]
    }

    pub fn translation(&self) -> &[Rational] {
        &self.translation[..self.dim]
    }

    pub fn determinant(&self) -> i64 {
        det3(&self.linear)
    }

    pub fn is_identity(&self) -> bool {
        *self == SymOp::identity(self.dim)
    }

    pub fn has_identity_linear(&self) -> bool {
        self.linear == SymOp::identity(self.dim).linear
    }

    pub fn is_reduced(&self) -> bool {
        self.translation
            .iter()
            .all(|t| *t >= zero() && *t < crate::rational::one())
    }

    /// Largest denominator among the translation components.
    pub fn max_denominator(&self) -> i64 {
        self.translation().iter().map(|t| *t.denom()).max().unwrap_or(1)
    }

    /// `self ∘ other`: linear `A_self A_other`, translation
    /// `A_self t_other + t_self`, reduced mod 1.
    pub fn compose(&self, other: &SymOp) -> Result<SymOp> {
        check_dim(self.dim, other.dim)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &SymOp) -> SymOp {
        let linear = mat_mul(&self.linear, &other.linear);
        let mut translation = mat_vec_rational(&self.linear, &other.translation);
        for (t, s) in translation.iter_mut().zip(&self.translation) {
            *t = mod_one(*t + *s);
        }
        SymOp {
            dim: self.dim,
            linear,
            translation,
        }
    }

    pub fn inverse(&self) -> SymOp {
        let inv = unimodular_inverse(&self.linear);
        let mut translation = mat_vec_rational(&inv, &self.translation);
        for t in translation.iter_mut() {
            *t = mod_one(-*t);
        }
        SymOp {
            dim: self.dim,
            linear: inv,
            translation,
        }
    }

    /// `A x + t`, not wrapped into the unit cell.
    pub fn act_on_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        let mut p = [0.0; 3];
        p[..self.dim].copy_from_slice(x);
        Ok(self.apply(&p)[..self.dim].to_vec())
    }

    pub(crate) fn apply(&self, x: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..self.dim {
            let t = &self.translation[i];
            out[i] = (0..self.dim)
                .map(|j| self.linear[i][j] as f64 * x[j])
                .sum::<f64>()
                + *t.numer() as f64 / *t.denom() as f64;
        }
        out
    }

    /// Maps a frequency along the edge induced by this operation: returns the
    /// target `A^{-T} ω` and the phase exponent `(ω · A^{-1} t) mod 1`.
    pub fn act_on_frequency(&self, omega: &Freq) -> Result<(Freq, Rational)> {
        check_dim(self.dim, omega.dim())?;
        Ok(FrequencyAction::new(self).apply(omega))
    }

    pub fn to_triplet(&self) -> String {
        let mut coords = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut s = String::new();
            for (j, axis) in AXES.iter().enumerate().take(self.dim) {
                match self.linear[i][j] {
                    0 => {}
                    c if c > 0 => {
                        if !s.is_empty() {
                            s.push('+');
                        }
                        if c != 1 {
                            s.push_str(&c.to_string());
                        }
                        s.push(*axis);
                    }
                    c => {
                        s.push('-');
                        if c != -1 {
                            s.push_str(&(-c).to_string());
                        }
                        s.push(*axis);
                    }
                }
            }
            let t = mod_one(self.translation[i]);
            if t != zero() {
                if !s.is_empty() {
                    s.push('+');
                }
                s.push_str(&t.to_string());
            } else if s.is_empty() {
                s.push('0');
            }
            coords.push(s);
        }
        coords.join(",")
    }
}

impl fmt::Display for SymOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_triplet())
    }
}

/// Precomputed reciprocal-space action of one operation: `A^{-T}` and
/// `A^{-1} t`.
#[derive(Clone, Debug)]
pub(crate) struct FrequencyAction {
    dim: usize,
    inv_transpose: Mat3,
    shift: [Rational; 3],
}

impl FrequencyAction {
    pub(crate) fn new(op: &SymOp) -> Self {
        let inv = unimodular_inverse(&op.linear);
        let mut inv_transpose = [[0; 3]; 3];
        for (i, row) in inv.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                inv_transpose[j][i] = *v;
            }
        }
        FrequencyAction {
            dim: op.dim,
            inv_transpose,
            shift: mat_vec_rational(&inv, &op.translation),
        }
    }

    pub(crate) fn apply(&self, omega: &Freq) -> (Freq, Rational) {
        let w = omega.array();
        let mut target = [0; 3];
        for (i, t) in target.iter_mut().enumerate().take(self.dim) {
            *t = (0..self.dim).map(|j| self.inv_transpose[i][j] * w[j]).sum();
        }
        let mut r = zero();
        for (j, s) in self.shift.iter().enumerate().take(self.dim) {
            if w[j] != 0 {
                r += *s * Rational::from_integer(w[j] as i64);
            }
        }
        (Freq::from_array(self.dim, target), mod_one(r))
    }
}

/// Parses the comma-separated triplet notation, e.g. `-x,y+1/2` or
/// `y,-x-y,z+2/3`.
pub fn parse_symop(text: &str, dim: usize) -> Result<SymOp> {
    check_supported_dim(dim)?;
    let syntax = |position: usize, message: &str| Error::Syntax {
        input: text.to_string(),
        position,
        message: message.to_string(),
    };

    let chars: Vec<(usize, char)> = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    let end = text.len();
    let mut pos = 0usize;
    let mut rows: Vec<([i64; 3], Rational)> = Vec::new();

    loop {
        let mut coeffs = [0i64; 3];
        let mut constant = zero();
        let mut first = true;
        loop {
            let at = chars.get(pos).map_or(end, |c| c.0);
            let mut sign = 1i64;
            match chars.get(pos).map(|c| c.1) {
                Some('+') if !first => pos += 1,
                Some('-') => {
                    sign = -1;
                    pos += 1;
                }
                Some('+') => return Err(syntax(at, "unexpected '+'")),
                _ if !first => return Err(syntax(at, "expected '+' or '-'")),
                _ => {}
            }
            let at = chars.get(pos).map_or(end, |c| c.0);
            match chars.get(pos).map(|c| c.1) {
                Some(c @ ('x' | 'y' | 'z')) => {
                    let axis = (c as u8 - b'x') as usize;
                    if axis >= dim {
                        return Err(syntax(at, &format!("axis '{c}' not valid in {dim}D")));
                    }
                    coeffs[axis] += sign;
                    pos += 1;
                }
                Some(c) if c.is_ascii_digit() => {
                    let numer = read_int(&chars, &mut pos).ok_or_else(|| syntax(at, "integer too large"))?;
                    let mut denom = 1i64;
                    if chars.get(pos).map(|c| c.1) == Some('/') {
                        pos += 1;
                        let at = chars.get(pos).map_or(end, |c| c.0);
                        if !chars.get(pos).is_some_and(|c| c.1.is_ascii_digit()) {
                            return Err(syntax(at, "expected denominator"));
                        }
                        denom = read_int(&chars, &mut pos).ok_or_else(|| syntax(at, "integer too large"))?;
                        if denom == 0 {
                            return Err(syntax(at, "zero denominator"));
                        }
                    }
                    constant += Rational::new(sign * numer, denom);
                }
                Some(_) => return Err(syntax(at, "expected axis symbol or number")),
                None => return Err(syntax(at, "unexpected end of input")),
            }
            first = false;
            match chars.get(pos).map(|c| c.1) {
                Some(',') | None => break,
                Some('+' | '-') => continue,
                Some(_) => {
                    let at = chars[pos].0;
                    return Err(syntax(at, "expected '+', '-' or ','"));
                }
            }
        }
        rows.push((coeffs, constant));
        match chars.get(pos).map(|c| c.1) {
            Some(',') => pos += 1,
            _ => break,
        }
    }

    if rows.len() != dim {
        return Err(syntax(
            end,
            &format!("expected {dim} coordinates, found {}", rows.len()),
        ));
    }

    let mut linear = Vec::with_capacity(dim);
    let mut translation = Vec::with_capacity(dim);
    for (coeffs, constant) in &rows {
        for (axis, &c) in coeffs.iter().enumerate().take(dim) {
            if c.abs() > 1 {
                return Err(Error::CoefficientTooLarge {
                    op: text.to_string(),
                    axis: AXES[axis],
                    coefficient: c,
                });
            }
        }
        linear.push(coeffs[..dim].iter().map(|&c| c as i32).collect());
        translation.push(*constant);
    }
    SymOp::from_parts(&linear, &translation).map_err(|e| match e {
        Error::NotUnimodular { det, .. } => Error::NotUnimodular {
            op: text.to_string(),
            det,
        },
        e => e,
    })
}

fn read_int(chars: &[(usize, char)], pos: &mut usize) -> Option<i64> {
    let mut value: i64 = 0;
    let mut overflow = false;
    while let Some(d) = chars.get(*pos).and_then(|c| c.1.to_digit(10)) {
        match value.checked_mul(10).and_then(|v| v.checked_add(d as i64)) {
            Some(v) => value = v,
            None => overflow = true,
        }
        *pos += 1;
    }
    (!overflow).then_some(value)
}

pub fn format_symop(op: &SymOp) -> String {
    op.to_triplet()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn op(s: &str, dim: usize) -> SymOp {
        parse_symop(s, dim).unwrap()
    }

    #[test]
    fn parses_pg_glide() {
        let g = op("-x,y+1/2", 2);
        assert_eq!(g.matrix(), vec![vec![-1, 0], vec![0, 1]]);
        assert_eq!(g.translation(), &[r(0, 1), r(1, 2)]);
    }

    #[test]
    fn parses_identity_3d() {
        assert!(op("x,y,z", 3).is_identity());
    }

    #[test]
    fn parses_hexagonal_screw() {
        let g = op("y,-x-y,z+2/3", 3);
        assert_eq!(
            g.matrix(),
            vec![vec![0, 1, 0], vec![-1, -1, 0], vec![0, 0, 1]]
        );
        assert_eq!(g.translation(), &[r(0, 1), r(0, 1), r(2, 3)]);
        // applying to a symbolic point reproduces the input text
        assert_eq!(g.to_string(), "y,-x-y,z+2/3");
    }

    #[test]
    fn parser_accepts_whitespace_constants_first_and_reduces() {
        let g = op(" 1/2 - x , y - 1/4 ", 2);
        assert_eq!(g.to_string(), "-x+1/2,y+3/4");
        assert_eq!(op("-x+3/2,y", 2).to_string(), "-x+1/2,y");
    }

    #[test]
    fn parser_errors() {
        for (text, dim) in [
            ("x,y", 3),
            ("x,y,z", 2),
            ("x,,y", 2),
            ("x*y,y", 2),
            ("x+,y", 2),
            ("x,y+1/", 2),
            ("x,y+1/0", 2),
            ("+x,y", 2),
            ("x,z", 2),
            ("0.5+x,y", 2),
            ("x y,y", 2),
        ] {
            assert!(
                matches!(parse_symop(text, dim), Err(Error::Syntax { .. })),
                "{text}"
            );
        }
        match parse_symop("x,y+1/", 2) {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_symop("x+y,x+y", 2),
            Err(Error::NotUnimodular { det: 0, .. })
        ));
        assert!(matches!(
            parse_symop("x+x,y", 2),
            Err(Error::CoefficientTooLarge { axis: 'x', .. })
        ));
    }

    #[test]
    fn compose_glide_twice_is_identity() {
        let g = op("-x,y+1/2", 2);
        assert!(g.compose(&g).unwrap().is_identity());
        let id = SymOp::identity(2);
        assert_eq!(id.compose(&g).unwrap(), g);
        assert!(g.compose(&g.inverse()).unwrap().is_identity());
    }

    #[test]
    fn compose_rejects_mixed_dimensions() {
        assert!(matches!(
            SymOp::identity(2).compose(&SymOp::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inverses() {
        assert!(SymOp::identity(3).inverse().is_identity());
        let g = op("-x,y+1/2", 2);
        assert_eq!(g.inverse(), g);
        assert_eq!(op("y,-x,z", 3).inverse(), op("-y,x,z", 3));
        let s = op("y,-x-y,z+2/3", 3);
        assert_eq!(s.inverse().to_string(), "-x-y,x,z+1/3");
    }

    #[test]
    fn point_action() {
        let g = op("-x,y+1/2", 2);
        let p = g.act_on_point(&[0.2, 0.3]).unwrap();
        assert!((p[0] + 0.2).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
        assert_eq!(op("y,-x", 2).act_on_point(&[1.0, 0.0]).unwrap(), vec![0.0, -1.0]);
        assert_eq!(SymOp::identity(2).act_on_point(&[0.3, 0.7]).unwrap(), vec![0.3, 0.7]);
        assert!(g.act_on_point(&[0.1, 0.2, 0.3]).is_err());
    }

    #[test]
    fn frequency_action_matches_glide_parity_rule() {
        let g = op("-x,y+1/2", 2);
        let (t, e) = g.act_on_frequency(&Freq::new(&[1, 1]).unwrap()).unwrap();
        assert_eq!(t, Freq::new(&[-1, 1]).unwrap());
        assert_eq!(e, r(1, 2));
        let (t, e) = g.act_on_frequency(&Freq::new(&[1, 0]).unwrap()).unwrap();
        assert_eq!(t, Freq::new(&[-1, 0]).unwrap());
        assert_eq!(e, r(0, 1));
        let (t, e) = op("y,-x-y,z+2/3", 3)
            .act_on_frequency(&Freq::zero(3))
            .unwrap();
        assert_eq!(t, Freq::zero(3));
        assert_eq!(e, r(0, 1));
    }

    #[test]
    fn freq_display_and_order() {
        let a = Freq::new(&[-1, 2]).unwrap();
        assert_eq!(a.to_string(), "(-1,2)");
        assert!(Freq::new(&[-1, 1]).unwrap() < Freq::new(&[1, -5]).unwrap());
        assert_eq!(a.norm_sq(), 5);
        assert_eq!(a.neg(), Freq::new(&[1, -2]).unwrap());
    }
}
