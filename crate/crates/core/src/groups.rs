//! Group database and coset expansion.
//!
//! The bundled database has one line per group:
//!
//! ```text
//! <dim> <number> <symbol> <gen1>;<gen2>;...
//! ```
//!
//! Generators are triplet-notation operations in the conventional setting.
//! Centering translations appear as explicit generators. Blank lines and
//! lines starting with `#` are ignored; a group without generators (p1, P1)
//! simply omits the last field.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::lattice::BravaisClass;
use crate::symop::{check_supported_dim, parse_symop, SymOp};

pub const BUNDLED_GROUPS: &str = include_str!("../data/groups.txt");

/// Largest coset group of a conventional cell: 48 point operations times 4
/// centering translations.
pub const MAX_COSET_ORDER: usize = 192;

/// Translation denominators allowed in database generators.
pub const MAX_DATABASE_DENOMINATOR: i64 = 12;

/// Translation denominators beyond this during expansion mean the
/// generators do not describe a crystallographic group.
pub const MAX_EXPANSION_DENOMINATOR: i64 = 24;

const WALLPAPER_ALIASES: [(&str, &str); 7] = [
    ("p2mm", "pmm"),
    ("p2mg", "pmg"),
    ("p2gg", "pgg"),
    ("c2mm", "cmm"),
    ("p4mm", "p4m"),
    ("p4gm", "p4g"),
    ("p6mm", "p6m"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec {
    pub dim: usize,
    pub number: u16,
    pub symbol: String,
    pub generators: Vec<SymOp>,
    pub bravais: BravaisClass,
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (#{}, {}D)", self.symbol, self.number, self.dim)
    }
}

/// Number or symbol identifying a group within one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKey {
    Number(u16),
    Symbol(String),
}

impl FromStr for GroupKey {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s.parse::<u16>() {
            Ok(n) => GroupKey::Number(n),
            Err(_) => GroupKey::Symbol(s.to_string()),
        })
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKey::Number(n) => write!(f, "{n}"),
            GroupKey::Symbol(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct GroupDatabase {
    groups: Vec<GroupSpec>,
}

impl GroupDatabase {
    /// The database compiled into the library.
    pub fn bundled() -> &'static GroupDatabase {
        static DB: OnceLock<GroupDatabase> = OnceLock::new();
        DB.get_or_init(|| GroupDatabase::parse(BUNDLED_GROUPS).expect("bundled groups.txt is valid"))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut groups: Vec<GroupSpec> = Vec::new();
        let mut seen = HashSet::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let bad = |message: String| Error::MalformedDatabase { line, message };
            let mut fields = content.split_whitespace();
            let dim: usize = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| bad("missing or invalid dimension".into()))?;
            check_supported_dim(dim).map_err(|e| bad(e.to_string()))?;
            let number: u16 = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| bad("missing or invalid group number".into()))?;
            let max = if dim == 2 { 17 } else { 230 };
            if number == 0 || number > max {
                return Err(bad(format!("group number {number} out of range 1..={max}")));
            }
            let symbol = fields
                .next()
                .ok_or_else(|| bad("missing symbol".into()))?
                .to_string();
            let bravais = BravaisClass::for_group(dim, number, &symbol)
                .ok_or_else(|| bad(format!("cannot derive lattice class from {symbol:?}")))?;
            let rest: String = fields.collect();
            let mut generators = Vec::new();
            for text in rest.split(';').filter(|s| !s.is_empty()) {
                let op = parse_symop(text, dim).map_err(|e| bad(e.to_string()))?;
                if op.max_denominator() > MAX_DATABASE_DENOMINATOR {
                    return Err(bad(format!(
                        "translation denominator {} in {text:?} exceeds {MAX_DATABASE_DENOMINATOR}",
                        op.max_denominator()
                    )));
                }
                generators.push(op);
            }
            if !seen.insert((dim, number)) {
                return Err(bad(format!("duplicate entry for {dim}D group {number}")));
            }
            groups.push(GroupSpec {
                dim,
                number,
                symbol,
                generators,
                bravais,
            });
        }
        groups.sort_by_key(|g| (g.dim, g.number));
        Ok(GroupDatabase { groups })
    }

    pub fn groups(&self) -> &[GroupSpec] {
        &self.groups
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &GroupSpec> {
        self.groups.iter().filter(move |g| g.dim == dim)
    }

    /// Looks up by number, exact symbol, case-insensitive symbol, or a full
    /// wallpaper-group name such as `p6mm`.
    pub fn get(&self, dim: usize, key: &GroupKey) -> Result<&GroupSpec> {
        let unknown = || Error::UnknownGroup {
            dim,
            key: key.to_string(),
        };
        let mut candidates = self.in_dim(dim);
        match key {
            GroupKey::Number(n) => candidates.find(|g| g.number == *n).ok_or_else(unknown),
            GroupKey::Symbol(s) => {
                let alias = WALLPAPER_ALIASES
                    .iter()
                    .find(|(full, _)| dim == 2 && full.eq_ignore_ascii_case(s))
                    .map(|(_, short)| *short);
                let wanted = alias.unwrap_or(s);
                self.in_dim(dim)
                    .find(|g| g.symbol == wanted)
                    .or_else(|| self.in_dim(dim).find(|g| g.symbol.eq_ignore_ascii_case(wanted)))
                    .ok_or_else(unknown)
            }
        }
    }
}

/// Looks a group up in the bundled database.
pub fn load_group(dim: usize, key: &str) -> Result<GroupSpec> {
    check_supported_dim(dim)?;
    let key: GroupKey = key.parse().expect("infallible");
    GroupDatabase::bundled().get(dim, &key).cloned()
}

/// The finite coset group: all operations with translations reduced mod 1.
#[derive(Clone, Debug)]
pub struct CosetGroup {
    spec: GroupSpec,
    elements: Vec<SymOp>,
}

impl CosetGroup {
    /// Wraps an arbitrary element list without any checks; pair with
    /// [`validate_group`].
    pub fn from_elements(spec: GroupSpec, elements: Vec<SymOp>) -> Self {
        CosetGroup { spec, elements }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn elements(&self) -> &[SymOp] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements whose linear part is the identity (lattice centerings,
    /// including the identity itself).
    pub fn pure_translations(&self) -> impl Iterator<Item = &SymOp> {
        self.elements.iter().filter(|e| e.has_identity_linear())
    }
}

/// Closes `{identity} ∪ generators` under composition with translations
/// reduced mod 1. Elements come out in lexicographic order of (linear part,
/// translation).
pub fn expand_group(spec: &GroupSpec) -> Result<CosetGroup> {
    for g in &spec.generators {
        if g.dim() != spec.dim {
            return Err(Error::DimensionMismatch {
                expected: spec.dim,
                found: g.dim(),
            });
        }
    }
    let identity = SymOp::identity(spec.dim);
    let mut set = BTreeSet::from([identity.clone()]);
    let mut frontier = vec![identity];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for e in &frontier {
            for g in &spec.generators {
                let p = g.compose_unchecked(e);
                if p.max_denominator() > MAX_EXPANSION_DENOMINATOR {
                    return Err(Error::DenominatorGrowth {
                        group: spec.symbol.clone(),
                        denominator: p.max_denominator(),
                    });
                }
                if !set.contains(&p) {
                    set.insert(p.clone());
                    if set.len() > MAX_COSET_ORDER {
                        return Err(Error::ClosureOverflow {
                            group: spec.symbol.clone(),
                            limit: MAX_COSET_ORDER,
                        });
                    }
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    Ok(CosetGroup {
        spec: spec.clone(),
        elements: set.into_iter().collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    MissingIdentity,
    WrongDimension { index: usize },
    NotUnimodular { index: usize },
    TranslationNotReduced { index: usize },
    Duplicate { index: usize },
    NotClosed { left: usize, right: usize, product: SymOp },
    MissingInverse { index: usize },
    TooLarge { order: usize },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks group axioms on an element list: identity, closure, inverses and
/// unimodularity, plus reduced translations and no duplicates.
pub fn validate_group(g: &CosetGroup) -> ValidationReport {
    let mut violations = Vec::new();
    let dim = g.dim();
    let elements = g.elements();
    let mut members = HashSet::new();
    for (index, e) in elements.iter().enumerate() {
        if e.dim() != dim {
            violations.push(Violation::WrongDimension { index });
            continue;
        }
        if e.determinant().abs() != 1 {
            violations.push(Violation::NotUnimodular { index });
        }
        if !e.is_reduced() {
            violations.push(Violation::TranslationNotReduced { index });
        }
        if !members.insert(e.clone()) {
            violations.push(Violation::Duplicate { index });
        }
    }
    if !members.contains(&SymOp::identity(dim)) {
        violations.push(Violation::MissingIdentity);
    }
    if elements.len() > MAX_COSET_ORDER {
        violations.push(Violation::TooLarge {
            order: elements.len(),
        });
    }
    let valid: Vec<(usize, &SymOp)> = elements
        .iter()
        .enumerate()
        .filter(|(_, e)| e.dim() == dim && e.determinant().abs() == 1)
        .collect();
    for &(i, a) in &valid {
        for &(j, b) in &valid {
            let p = a.compose_unchecked(b);
            if !members.contains(&p) {
                violations.push(Violation::NotClosed {
                    left: i,
                    right: j,
                    product: p,
                });
            }
        }
        if !members.contains(&a.inverse()) {
            violations.push(Violation::MissingInverse { index: i });
        }
    }
    ValidationReport { violations }
}
