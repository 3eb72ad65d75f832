//! Exact cylinder measures on the boundary of a free group, their
//! translates, locally constant functions and the Poisson transform.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::boundary::BoundaryPoint;
use crate::error::{Error, ParseError, Result};
use crate::rational::{self, Rational};
use crate::word::{self, ReducedWord};

/// Number of reduced words of length `len` extending a word of length
/// `from`: `2n(2n-1)^(k-1)` from the root, `(2n-1)^k` otherwise.
fn extension_count(rank: u8, from: usize, len: usize) -> BigInt {
    let n = 2 * rank as u32;
    if len <= from {
        return BigInt::one();
    }
    let k = (len - from) as u32;
    if from == 0 {
        BigInt::from(n) * num_traits::pow(BigInt::from(n - 1), (k - 1) as usize)
    } else {
        num_traits::pow(BigInt::from(n - 1), k as usize)
    }
}

/// Masses of all depth-`d` cylinders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMeasure {
    rank: u8,
    depth: usize,
    masses: BTreeMap<ReducedWord, Rational>,
    extend_uniformly: bool,
}

impl TableMeasure {
    /// Validates nonnegativity, a single common depth and total mass one.
    pub fn new(rank: u8, masses: BTreeMap<ReducedWord, Rational>) -> Result<Self> {
        let depth = masses.keys().next().map(|w| w.len()).unwrap_or(0);
        for (w, m) in &masses {
            if w.rank() != rank {
                return Err(Error::RankMismatch {
                    left: w.rank(),
                    right: rank,
                });
            }
            if w.len() != depth {
                return Err(Error::InvalidTable(format!(
                    "word {w} has length {}, expected {depth}",
                    w.len()
                )));
            }
            if m.is_negative() {
                return Err(Error::InvalidTable(format!("negative mass at {w}")));
            }
        }
        let total: Rational = masses.values().sum();
        if total != rational::one() {
            return Err(Error::InvalidTable(format!(
                "masses sum to {}, expected 1",
                rational::render(&total)
            )));
        }
        Ok(Self {
            rank,
            depth,
            masses,
            extend_uniformly: false,
        })
    }

    /// Below its depth, each cylinder's mass is split evenly among children.
    pub fn with_uniform_extension(mut self) -> Self {
        self.extend_uniformly = true;
        self
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Parses `word mass` lines; `#` starts a comment.
    pub fn parse_text(text: &str, rank: u8) -> std::result::Result<Self, ParseError> {
        let mut masses = BTreeMap::new();
        for (word, value, line) in table_lines(text, rank)? {
            if masses.insert(word, value).is_some() {
                return Err(ParseError::new(line, 0, "duplicate word"));
            }
        }
        if masses.is_empty() {
            return Err(ParseError::new(text, 0, "empty measure table"));
        }
        Self::new(rank, masses).map_err(|e| ParseError::new(text, 0, e.to_string()))
    }

    fn mass(&self, w: &ReducedWord) -> Result<Rational> {
        if w.len() <= self.depth {
            return Ok(self
                .masses
                .iter()
                .filter(|(k, _)| k.starts_with(w))
                .map(|(_, m)| m)
                .sum());
        }
        if !self.extend_uniformly {
            return Err(Error::BeyondTableDepth {
                requested: w.len(),
                depth: self.depth,
            });
        }
        let m = self.masses.get(&w.truncate(self.depth)).cloned().unwrap_or_else(rational::zero);
        Ok(m / Rational::from_integer(extension_count(self.rank, self.depth, w.len())))
    }
}

/// Parses `word value` lines into words of a common length.
fn table_lines<'a>(
    text: &'a str,
    rank: u8,
) -> std::result::Result<Vec<(ReducedWord, Rational, &'a str)>, ParseError> {
    let mut out = Vec::new();
    let mut depth = None;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(ws), Some(vs), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(ParseError::new(line, 0, "expected '<word> <p/q>'"));
        };
        let word = ReducedWord::parse(ws, rank)?;
        let literal = if ws == "1" { 0 } else { ws.len() };
        if word.len() != literal {
            return Err(ParseError::new(line, 0, "table words must be reduced"));
        }
        if *depth.get_or_insert(word.len()) != word.len() {
            return Err(ParseError::new(line, 0, "all table words must have the same length"));
        }
        let off = line.len() - line[ws.len()..].trim_start().len();
        let value = rational::parse(vs).map_err(|e| e.within(line, off))?;
        out.push((word, value, line));
    }
    Ok(out)
}

/// A Borel probability measure on the boundary, evaluated on cylinders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CylinderMeasure {
    /// The Markov measure giving every reduced word of length `k >= 1` the
    /// mass `1 / (2n (2n-1)^(k-1))`.
    Uniform { rank: u8 },
    Dirac(BoundaryPoint),
    Table(TableMeasure),
    /// `by · base`, the translate `E ↦ base(by⁻¹ E)`.
    Pushforward {
        by: ReducedWord,
        base: Box<CylinderMeasure>,
    },
}

impl CylinderMeasure {
    pub fn uniform(rank: u8) -> Self {
        CylinderMeasure::Uniform { rank }
    }

    pub fn rank(&self) -> u8 {
        match self {
            CylinderMeasure::Uniform { rank } => *rank,
            CylinderMeasure::Dirac(x) => x.rank(),
            CylinderMeasure::Table(t) => t.rank,
            CylinderMeasure::Pushforward { by, .. } => by.rank(),
        }
    }

    /// Translate by `g`; composes with an existing translation.
    pub fn pushforward(&self, g: &ReducedWord) -> Result<Self> {
        if g.rank() != self.rank() {
            return Err(Error::RankMismatch {
                left: g.rank(),
                right: self.rank(),
            });
        }
        Ok(match self {
            _ if g.is_identity() => self.clone(),
            CylinderMeasure::Dirac(x) => CylinderMeasure::Dirac(x.act(g)?),
            CylinderMeasure::Pushforward { by, base } => {
                let by = g.multiply(by)?;
                if by.is_identity() {
                    (**base).clone()
                } else {
                    CylinderMeasure::Pushforward { by, base: base.clone() }
                }
            }
            _ => CylinderMeasure::Pushforward {
                by: g.clone(),
                base: Box::new(self.clone()),
            },
        })
    }

    /// Mass of the cylinder of infinite words starting with `base`.
    pub fn cylinder_mass(&self, base: &ReducedWord) -> Result<Rational> {
        if base.rank() != self.rank() {
            return Err(Error::RankMismatch {
                left: base.rank(),
                right: self.rank(),
            });
        }
        match self {
            CylinderMeasure::Uniform { rank } => {
                Ok(Rational::new_raw(BigInt::one(), extension_count(*rank, 0, base.len())))
            }
            CylinderMeasure::Dirac(x) => Ok(if x.prefix(base.len()) == *base {
                rational::one()
            } else {
                rational::zero()
            }),
            CylinderMeasure::Table(t) => t.mass(base),
            CylinderMeasure::Pushforward { by, base: nu } => pushforward_mass(by, nu, base),
        }
    }

    pub fn parse(s: &str, rank: u8) -> std::result::Result<MeasureSpec, ParseError> {
        if s == "uniform" {
            return Ok(MeasureSpec::Measure(CylinderMeasure::uniform(rank)));
        }
        if let Some(rest) = s.strip_prefix("dirac:") {
            let x = BoundaryPoint::parse(rest, rank).map_err(|e| e.within(s, 6))?;
            return Ok(MeasureSpec::Measure(CylinderMeasure::Dirac(x)));
        }
        if let Some(path) = s.strip_prefix("table:") {
            if path.is_empty() {
                return Err(ParseError::new(s, 6, "expected a table path"));
            }
            return Ok(MeasureSpec::TablePath(path.to_string()));
        }
        Err(ParseError::new(s, 0, "expected 'uniform', 'dirac:<point>' or 'table:<path>'"))
    }
}

/// A parsed measure argument; table files are read separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureSpec {
    Measure(CylinderMeasure),
    TablePath(String),
}

impl MeasureSpec {
    pub fn resolve(self, rank: u8) -> Result<CylinderMeasure> {
        match self {
            MeasureSpec::Measure(m) => Ok(m),
            MeasureSpec::TablePath(path) => {
                let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                Ok(CylinderMeasure::Table(TableMeasure::parse_text(&text, rank)?))
            }
        }
    }
}

impl fmt::Display for CylinderMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CylinderMeasure::Uniform { .. } => f.write_str("uniform"),
            CylinderMeasure::Dirac(x) => write!(f, "dirac:{x}"),
            CylinderMeasure::Table(t) => write!(f, "table(depth {})", t.depth),
            CylinderMeasure::Pushforward { by, base } => write!(f, "{by}*{base}"),
        }
    }
}

/// `(g·ν)([w]) = ν(g⁻¹[w])`.
///
/// With `h = g⁻¹`: if reducing `h·w` leaves part of `w`, then `h[w]` is the
/// cylinder of the reduced product. Otherwise `h = h'·w⁻¹` and `h[w]` is the
/// complement of `[h'·c]`, where `c` is the inverse of the last letter of `w`.
pub fn pushforward_mass(g: &ReducedWord, nu: &CylinderMeasure, base: &ReducedWord) -> Result<Rational> {
    if g.rank() != nu.rank() || base.rank() != nu.rank() {
        return Err(Error::RankMismatch {
            left: g.rank(),
            right: nu.rank(),
        });
    }
    let Some(last) = base.last() else {
        return Ok(rational::one());
    };
    let h = g.inverse();
    let v = h.multiply(base)?;
    let cancelled = (h.len() + base.len() - v.len()) / 2;
    if cancelled < base.len() {
        return nu.cylinder_mass(&v);
    }
    let complement = v.multiply(&ReducedWord::letter(v.rank(), last.inverse())?)?;
    debug_assert_eq!(complement.len(), v.len() + 1);
    Ok(rational::one() - nu.cylinder_mass(&complement)?)
}

/// Reference evaluation of `(g·ν)([w])` by summing `ν([u])` over all reduced
/// `u` of length `|g| + |w|` with `g·u` starting with `w`.
pub fn pushforward_mass_enumerated(
    g: &ReducedWord,
    nu: &CylinderMeasure,
    base: &ReducedWord,
) -> Result<Rational> {
    let depth = g.len() + base.len();
    let mut total = rational::zero();
    for u in word::words_of_length(nu.rank(), depth) {
        if g.multiply(&u)?.starts_with(base) {
            total += nu.cylinder_mass(&u)?;
        }
    }
    Ok(total)
}

/// `1 - μ([prefix(x, d)])`.
pub fn dirac_gap(mu: &CylinderMeasure, x: &BoundaryPoint, depth: usize) -> Result<Rational> {
    Ok(rational::one() - mu.cylinder_mass(&x.prefix(depth))?)
}

/// Checks `mass([w]) = Σ mass([ws])` for every reduced `w` with `|w| < depth`
/// and that the whole space has mass one.
pub fn is_consistent(mu: &CylinderMeasure, depth: usize) -> Result<bool> {
    if mu.cylinder_mass(&ReducedWord::identity(mu.rank()))? != rational::one() {
        return Ok(false);
    }
    for w in word::ball(mu.rank(), depth.saturating_sub(1)) {
        let parent = mu.cylinder_mass(&w)?;
        let mut sum = rational::zero();
        for child in word::extensions(&w) {
            sum += mu.cylinder_mass(&child)?;
        }
        if sum != parent {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A locally constant function: a value on every cylinder of one depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderFunction {
    rank: u8,
    depth: usize,
    values: BTreeMap<ReducedWord, Rational>,
}

impl CylinderFunction {
    pub fn new(rank: u8, depth: usize, values: BTreeMap<ReducedWord, Rational>) -> Result<Self> {
        let expected = word::words_of_length(rank, depth);
        if values.len() != expected.len() || !expected.iter().all(|w| values.contains_key(w)) {
            return Err(Error::InvalidFunction(format!(
                "needs a value on each of the {} reduced words of length {depth}",
                expected.len()
            )));
        }
        Ok(Self { rank, depth, values })
    }

    pub fn from_fn(rank: u8, depth: usize, f: impl Fn(&ReducedWord) -> Rational) -> Self {
        let values = word::words_of_length(rank, depth)
            .into_iter()
            .map(|w| {
                let v = f(&w);
                (w, v)
            })
            .collect();
        Self { rank, depth, values }
    }

    pub fn constant(rank: u8, c: Rational) -> Self {
        Self::from_fn(rank, 0, |_| c.clone())
    }

    /// Indicator of the cylinder `[base]`.
    pub fn indicator(base: &ReducedWord) -> Self {
        Self::from_fn(base.rank(), base.len(), |w| {
            if w == base {
                rational::one()
            } else {
                rational::zero()
            }
        })
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &BTreeMap<ReducedWord, Rational> {
        &self.values
    }

    /// Value on any word of length at least the depth.
    pub fn value_on(&self, w: &ReducedWord) -> &Rational {
        &self.values[&w.truncate(self.depth)]
    }

    pub fn eval(&self, x: &BoundaryPoint) -> &Rational {
        &self.values[&x.prefix(self.depth)]
    }

    pub fn lift(&self, depth: usize) -> Self {
        assert!(depth >= self.depth, "cannot lower the depth of a cylinder function");
        Self::from_fn(self.rank, depth, |w| self.value_on(w).clone())
    }

    fn zip(&self, other: &Self, op: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let depth = self.depth.max(other.depth);
        Ok(Self::from_fn(self.rank, depth, |w| op(self.value_on(w), other.value_on(w))))
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sup_norm(&self) -> Rational {
        self.values.values().map(|v| v.abs()).max().unwrap_or_else(rational::zero)
    }

    /// `(g·f)(x) = f(g x)`, of depth `depth + |g|`.
    pub fn translate(&self, g: &ReducedWord) -> Result<Self> {
        if g.rank() != self.rank {
            return Err(Error::RankMismatch {
                left: g.rank(),
                right: self.rank,
            });
        }
        let mut values = BTreeMap::new();
        for u in word::words_of_length(self.rank, self.depth + g.len()) {
            let v = self.value_on(&g.multiply(&u)?).clone();
            values.insert(u, v);
        }
        Ok(Self {
            rank: self.rank,
            depth: self.depth + g.len(),
            values,
        })
    }

    pub fn parse_text(text: &str, rank: u8) -> std::result::Result<Self, ParseError> {
        let lines = table_lines(text, rank)?;
        let depth = lines.first().map(|(w, _, _)| w.len()).unwrap_or(0);
        let mut values = BTreeMap::new();
        for (word, value, line) in lines {
            if values.insert(word, value).is_some() {
                return Err(ParseError::new(line, 0, "duplicate word"));
            }
        }
        Self::new(rank, depth, values).map_err(|e| ParseError::new(text, 0, e.to_string()))
    }

    pub fn parse(s: &str, rank: u8) -> std::result::Result<FunctionSpec, ParseError> {
        if let Some(rest) = s.strip_prefix("cyl:") {
            let w = ReducedWord::parse(rest, rank).map_err(|e| e.within(s, 4))?;
            return Ok(FunctionSpec::Function(Self::indicator(&w)));
        }
        if let Some(rest) = s.strip_prefix("const:") {
            let c = rational::parse(rest).map_err(|e| e.within(s, 6))?;
            return Ok(FunctionSpec::Function(Self::constant(rank, c)));
        }
        if let Some(path) = s.strip_prefix("table:") {
            if path.is_empty() {
                return Err(ParseError::new(s, 6, "expected a table path"));
            }
            return Ok(FunctionSpec::TablePath(path.to_string()));
        }
        Err(ParseError::new(s, 0, "expected 'cyl:<word>', 'const:<p/q>' or 'table:<path>'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionSpec {
    Function(CylinderFunction),
    TablePath(String),
}

impl FunctionSpec {
    pub fn resolve(self, rank: u8) -> Result<CylinderFunction> {
        match self {
            FunctionSpec::Function(f) => Ok(f),
            FunctionSpec::TablePath(path) => {
                let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                Ok(CylinderFunction::parse_text(&text, rank)?)
            }
        }
    }
}

/// `P_ν f(γ) = ∫ f d(γν)`.
pub fn poisson_eval(f: &CylinderFunction, nu: &CylinderMeasure, gamma: &ReducedWord) -> Result<Rational> {
    if f.rank != nu.rank() || gamma.rank() != nu.rank() {
        return Err(Error::RankMismatch {
            left: f.rank,
            right: nu.rank(),
        });
    }
    let mut total = rational::zero();
    for (u, value) in &f.values {
        if value.is_zero() {
            continue;
        }
        total += value * pushforward_mass(gamma, nu, u)?;
    }
    Ok(total)
}
