//! The non-free example systems: the lamplighter group on lamp
//! configurations, the infinite dihedral group on `Z` and on two points,
//! `Z` on two points, and finite permutation actions.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;

use crate::boundary::BoundaryPoint;
use crate::error::{Error, ParseError, Result};
use crate::word::ReducedWord;

/// `(position, lit lamps)` in `Z/2 wr Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LamplighterElement {
    pub position: i64,
    pub lamps: BTreeSet<i64>,
}

fn shift_set(set: &BTreeSet<i64>, by: i64) -> BTreeSet<i64> {
    set.iter().map(|i| i + by).collect()
}

impl LamplighterElement {
    pub fn new(position: i64, lamps: impl IntoIterator<Item = i64>) -> Self {
        Self {
            position,
            lamps: lamps.into_iter().collect(),
        }
    }

    pub fn identity() -> Self {
        Self::new(0, [])
    }

    /// `(p1, C1)(p2, C2) = (p1 + p2, C1 Δ (C2 + p1))`.
    pub fn multiply(&self, other: &Self) -> Self {
        let shifted = shift_set(&other.lamps, self.position);
        Self {
            position: self.position + other.position,
            lamps: self.lamps.symmetric_difference(&shifted).copied().collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            position: -self.position,
            lamps: shift_set(&self.lamps, -self.position),
        }
    }

    /// `(p, C)·X = C Δ (X translated by p)`.
    pub fn act(&self, x: &ConfigPoint) -> ConfigPoint {
        let mut out = x.translated(self.position);
        for &i in &self.lamps {
            if !out.flips.remove(&i) {
                out.flips.insert(i);
            }
        }
        out
    }

    /// Parses `(p; i1,i2,...)`.
    pub fn parse(s: &str) -> std::result::Result<Self, ParseError> {
        let inner = s
            .strip_prefix('(')
            .ok_or_else(|| ParseError::new(s, 0, "expected '('"))?;
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| ParseError::new(s, s.len(), "expected ')'"))?;
        let semi = inner
            .find(';')
            .ok_or_else(|| ParseError::new(s, s.len() - 1, "expected ';' after position"))?;
        let position = parse_i64(s, 1, inner[..semi].trim())?;
        let lamps = parse_int_list(s, 1 + semi + 1, &inner[semi + 1..])?;
        Ok(Self::new(position, lamps))
    }
}

impl fmt::Display for LamplighterElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lamps: Vec<String> = self.lamps.iter().map(|i| i.to_string()).collect();
        write!(f, "({}; {})", self.position, lamps.join(","))
    }
}

fn parse_i64(outer: &str, offset: usize, s: &str) -> std::result::Result<i64, ParseError> {
    let lead = s.len() - s.trim_start().len();
    s.trim()
        .parse::<i64>()
        .map_err(|_| ParseError::new(outer, offset + lead, format!("expected integer, found {s:?}")))
}

fn parse_int_list(outer: &str, offset: usize, s: &str) -> std::result::Result<Vec<i64>, ParseError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut pos = offset;
    for part in s.split(',') {
        out.push(parse_i64(outer, pos, part)?);
        pos += part.len() + 1;
    }
    Ok(out)
}

/// A lamp configuration on `Z` that is eventually periodic in both
/// directions, plus finitely many flipped lamps.
///
/// Before translation by `offset`, `base` occupies positions `0..|base|`,
/// `right` repeats to the right of it and `left` repeats to the left of 0
/// (its last bit sits at position -1).
#[derive(Debug, Clone)]
pub struct ConfigPoint {
    offset: i64,
    left: Vec<bool>,
    base: Vec<bool>,
    right: Vec<bool>,
    flips: BTreeSet<i64>,
}

impl ConfigPoint {
    pub fn finite(lamps: impl IntoIterator<Item = i64>) -> Self {
        Self {
            offset: 0,
            left: vec![false],
            base: Vec::new(),
            right: vec![false],
            flips: lamps.into_iter().collect(),
        }
    }

    pub fn zero() -> Self {
        Self::finite([])
    }

    pub fn periodic(left: Vec<bool>, base: Vec<bool>, right: Vec<bool>) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidAction("configuration periods must be nonempty".into()));
        }
        Ok(Self {
            offset: 0,
            left,
            base,
            right,
            flips: BTreeSet::new(),
        })
    }

    pub fn state(&self, i: i64) -> bool {
        self.raw_state(i - self.offset) ^ self.flips.contains(&i)
    }

    fn raw_state(&self, j: i64) -> bool {
        let b = self.base.len() as i64;
        if j < 0 {
            let l = self.left.len() as i64;
            self.left[(j.mod_floor(&l)) as usize]
        } else if j < b {
            self.base[j as usize]
        } else {
            let r = self.right.len() as i64;
            self.right[((j - b) % r) as usize]
        }
    }

    /// Lamp states on `[-n, n]`.
    pub fn window(&self, n: i64) -> Vec<bool> {
        (-n..=n).map(|i| self.state(i)).collect()
    }

    pub fn translated(&self, by: i64) -> Self {
        Self {
            offset: self.offset + by,
            left: self.left.clone(),
            base: self.base.clone(),
            right: self.right.clone(),
            flips: shift_set(&self.flips, by),
        }
    }

    /// Lit lamps when the configuration is finitely supported.
    pub fn finite_support(&self) -> Option<BTreeSet<i64>> {
        if self.left.iter().any(|&b| b) || self.right.iter().any(|&b| b) {
            return None;
        }
        let r = self.radius();
        Some((-r..=r).filter(|&i| self.state(i)).collect())
    }

    /// Beyond this radius both tails are purely periodic.
    fn radius(&self) -> i64 {
        let flips = self.flips.iter().map(|i| i.abs()).max().unwrap_or(0);
        self.offset.abs() + self.base.len() as i64 + flips + 1
    }

    pub fn parse(s: &str) -> std::result::Result<Self, ParseError> {
        if let Some(rest) = s.strip_prefix("lamps:") {
            return Ok(Self::finite(parse_int_list(s, 6, rest)?));
        }
        if let Some(after) = s.strip_prefix("window-periodic") {
            // optional `@<anchor>` gives the position of the base's first bit
            let colon = after
                .find(':')
                .ok_or_else(|| ParseError::new(s, s.len(), "expected ':' after 'window-periodic'"))?;
            let anchor = match &after[..colon] {
                "" => 0,
                a => match a.strip_prefix('@') {
                    Some(n) => parse_i64(s, "window-periodic@".len(), n)?,
                    None => return Err(ParseError::new(s, "window-periodic".len(), "expected '@<anchor>' or ':'")),
                },
            };
            let rest = &after[colon + 1..];
            let off = "window-periodic".len() + colon + 1;
            let parts: Vec<&str> = rest.split('|').collect();
            if parts.len() != 3 {
                return Err(ParseError::new(s, off, "expected <left>|<base>|<right>"));
            }
            let mut pos = off;
            let mut bits = Vec::new();
            for part in &parts {
                let mut v = Vec::new();
                for (i, c) in part.char_indices() {
                    match c {
                        '0' => v.push(false),
                        '1' => v.push(true),
                        _ => return Err(ParseError::new(s, pos + i, "expected bit '0' or '1'")),
                    }
                }
                bits.push(v);
                pos += part.len() + 1;
            }
            let right = bits.pop().unwrap();
            let base = bits.pop().unwrap();
            let left = bits.pop().unwrap();
            if left.is_empty() {
                return Err(ParseError::new(s, off, "left period must be nonempty"));
            }
            if right.is_empty() {
                return Err(ParseError::new(s, s.len(), "right period must be nonempty"));
            }
            return Ok(Self::periodic(left, base, right).expect("periods checked").translated(anchor));
        }
        Err(ParseError::new(s, 0, "expected 'lamps:' or 'window-periodic:'"))
    }
}

impl PartialEq for ConfigPoint {
    fn eq(&self, other: &Self) -> bool {
        let span = self.left.len().lcm(&other.left.len()) + self.right.len().lcm(&other.right.len());
        let n = self.radius().max(other.radius()) + span as i64;
        self.window(n) == other.window(n)
    }
}

impl Eq for ConfigPoint {}

impl fmt::Display for ConfigPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(lamps) = self.finite_support() {
            let v: Vec<String> = lamps.iter().map(|i| i.to_string()).collect();
            return write!(f, "lamps:{}", v.join(","));
        }
        let r = self.radius();
        let bits = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        let base: Vec<bool> = (-r..=r).map(|i| self.state(i)).collect();
        // re-anchored at -r; tails are periodic from there on
        let left: Vec<bool> = (0..self.left.len() as i64)
            .map(|k| self.state(-r - self.left.len() as i64 + k))
            .collect();
        let right: Vec<bool> = (0..self.right.len() as i64).map(|k| self.state(r + 1 + k)).collect();
        write!(f, "window-periodic@{}:{}|{}|{}", -r, bits(&left), bits(&base), bits(&right))
    }
}

/// `rho^shift sigma^flip` in the infinite dihedral group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DihedralElement {
    pub shift: i64,
    pub flip: bool,
}

impl DihedralElement {
    pub fn new(shift: i64, flip: bool) -> Self {
        Self { shift, flip }
    }

    pub fn identity() -> Self {
        Self::new(0, false)
    }

    pub fn rho() -> Self {
        Self::new(1, false)
    }

    pub fn sigma() -> Self {
        Self::new(0, true)
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let k = if self.flip { -other.shift } else { other.shift };
        Self::new(self.shift + k, self.flip ^ other.flip)
    }

    pub fn inverse(&self) -> Self {
        if self.flip {
            *self
        } else {
            Self::new(-self.shift, false)
        }
    }

    /// `rho` shifts right, `sigma` reflects.
    pub fn act_on_integer(&self, m: i64) -> i64 {
        self.shift + if self.flip { -m } else { m }
    }

    /// `rho` acts trivially and `sigma` swaps the two points.
    pub fn act_on_two_point(&self, p: TwoPoint) -> TwoPoint {
        if self.flip {
            p.swapped()
        } else {
            p
        }
    }

    /// Parses `r^k` or `r^k s`.
    pub fn parse(s: &str) -> std::result::Result<Self, ParseError> {
        let body = s
            .strip_prefix("r^")
            .ok_or_else(|| ParseError::new(s, 0, "expected 'r^'"))?;
        let (num, flip) = match body.strip_suffix('s') {
            Some(n) => (n.trim_end(), true),
            None => (body, false),
        };
        let shift = parse_i64(s, 2, num)?;
        Ok(Self::new(shift, flip))
    }
}

impl fmt::Display for DihedralElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r^{}{}", self.shift, if self.flip { " s" } else { "" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TwoPoint {
    A,
    B,
}

impl TwoPoint {
    pub fn swapped(self) -> Self {
        match self {
            TwoPoint::A => TwoPoint::B,
            TwoPoint::B => TwoPoint::A,
        }
    }

    pub fn index(self) -> usize {
        match self {
            TwoPoint::A => 0,
            TwoPoint::B => 1,
        }
    }

    pub fn parse(s: &str) -> std::result::Result<Self, ParseError> {
        match s {
            "a" => Ok(TwoPoint::A),
            "b" => Ok(TwoPoint::B),
            _ => Err(ParseError::new(s, 0, "expected two-point label 'a' or 'b'")),
        }
    }
}

impl fmt::Display for TwoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TwoPoint::A => "a",
            TwoPoint::B => "b",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupTag {
    Free(u8),
    Lamplighter,
    Dihedral,
    Integers,
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTag::Free(n) => write!(f, "F{n}"),
            GroupTag::Lamplighter => f.write_str("lamplighter"),
            GroupTag::Dihedral => f.write_str("dihedral"),
            GroupTag::Integers => f.write_str("Z"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupElement {
    Free(ReducedWord),
    Lamplighter(LamplighterElement),
    Dihedral(DihedralElement),
    Integer(i64),
}

impl GroupElement {
    pub fn tag(&self) -> GroupTag {
        match self {
            GroupElement::Free(w) => GroupTag::Free(w.rank()),
            GroupElement::Lamplighter(_) => GroupTag::Lamplighter,
            GroupElement::Dihedral(_) => GroupTag::Dihedral,
            GroupElement::Integer(_) => GroupTag::Integers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpacePoint {
    Boundary(BoundaryPoint),
    Config(ConfigPoint),
    Integer(i64),
    TwoPoint(TwoPoint),
}

fn check_tag(tag: GroupTag, g: &GroupElement) -> Result<()> {
    if g.tag() != tag {
        return Err(Error::GroupMismatch {
            expected: tag.to_string(),
            found: g.tag().to_string(),
        });
    }
    Ok(())
}

pub fn element_multiply(tag: GroupTag, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    check_tag(tag, g)?;
    check_tag(tag, h)?;
    Ok(match (g, h) {
        (GroupElement::Free(a), GroupElement::Free(b)) => GroupElement::Free(a.multiply(b)?),
        (GroupElement::Lamplighter(a), GroupElement::Lamplighter(b)) => {
            GroupElement::Lamplighter(a.multiply(b))
        }
        (GroupElement::Dihedral(a), GroupElement::Dihedral(b)) => GroupElement::Dihedral(a.multiply(b)),
        (GroupElement::Integer(a), GroupElement::Integer(b)) => GroupElement::Integer(a + b),
        _ => unreachable!("tags checked"),
    })
}

pub fn element_act(tag: GroupTag, g: &GroupElement, x: &SpacePoint) -> Result<SpacePoint> {
    check_tag(tag, g)?;
    let mismatch = || Error::SpaceMismatch(format!("{tag} does not act on this point"));
    Ok(match (g, x) {
        (GroupElement::Free(w), SpacePoint::Boundary(p)) => SpacePoint::Boundary(p.act(w)?),
        (GroupElement::Lamplighter(e), SpacePoint::Config(c)) => SpacePoint::Config(e.act(c)),
        (GroupElement::Dihedral(e), SpacePoint::Integer(m)) => SpacePoint::Integer(e.act_on_integer(*m)),
        (GroupElement::Dihedral(e), SpacePoint::TwoPoint(p)) => SpacePoint::TwoPoint(e.act_on_two_point(*p)),
        (GroupElement::Integer(n), SpacePoint::TwoPoint(p)) => {
            SpacePoint::TwoPoint(if n.is_even() { *p } else { p.swapped() })
        }
        _ => return Err(mismatch()),
    })
}

/// A group acting on finitely many points through generator permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAction {
    points: Vec<String>,
    generators: Vec<(char, Vec<usize>)>,
}

pub type Permutation = Vec<usize>;

impl FiniteAction {
    pub fn new(points: Vec<String>, generators: Vec<(char, Vec<usize>)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidAction("no points".into()));
        }
        let mut seen = BTreeSet::new();
        for p in &points {
            if !seen.insert(p) {
                return Err(Error::InvalidAction(format!("duplicate point {p}")));
            }
        }
        let mut names = BTreeSet::new();
        for (name, perm) in &generators {
            if !name.is_ascii_lowercase() || !names.insert(*name) {
                return Err(Error::InvalidAction(format!("bad or duplicate generator name {name:?}")));
            }
            let image: BTreeSet<usize> = perm.iter().copied().collect();
            if perm.len() != points.len() || image.len() != points.len() || perm.iter().any(|&i| i >= points.len()) {
                return Err(Error::InvalidAction(format!("generator {name} is not a bijection")));
            }
        }
        Ok(Self { points, generators })
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn generators(&self) -> &[(char, Vec<usize>)] {
        &self.generators
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    pub fn identity(&self) -> Permutation {
        (0..self.points.len()).collect()
    }

    /// Permutation of a word over generator names; uppercase is the inverse.
    pub fn word_permutation(&self, word: &str) -> Result<Permutation> {
        let mut acc = self.identity();
        if word == "1" {
            return Ok(acc);
        }
        // left action: the rightmost letter acts first
        for c in word.chars().rev() {
            let perm = self
                .generators
                .iter()
                .find(|(n, _)| *n == c.to_ascii_lowercase())
                .map(|(_, p)| p)
                .ok_or_else(|| Error::InvalidAction(format!("unknown generator {c:?}")))?;
            let step = if c.is_ascii_uppercase() { invert(perm) } else { perm.clone() };
            acc = compose(&step, &acc);
        }
        Ok(acc)
    }

    /// Closure of the generators under composition.
    pub fn group_elements(&self) -> Vec<Permutation> {
        let mut found = vec![self.identity()];
        let mut frontier = found.clone();
        while let Some(p) = frontier.pop() {
            for (_, g) in &self.generators {
                let q = compose(g, &p);
                if !found.contains(&q) {
                    found.push(q.clone());
                    frontier.push(q);
                }
            }
        }
        found.sort();
        found
    }
}

/// `(f ∘ g)(i) = f(g(i))`.
pub fn compose(f: &[usize], g: &[usize]) -> Permutation {
    g.iter().map(|&i| f[i]).collect()
}

pub fn invert(p: &[usize]) -> Permutation {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// The two finite examples whose topologies are declared by cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FiniteExample {
    /// `Z` on `{a, b}` with `1·a = b`; words are over one generator `a ↦ 1`.
    ZTwoPoint,
    /// `D_inf` on `{a, b}`; words are over `a ↦ rho`, `b ↦ sigma`.
    DihedralTwoPoint,
}

impl FiniteExample {
    pub fn name(self) -> &'static str {
        match self {
            FiniteExample::ZTwoPoint => "z2",
            FiniteExample::DihedralTwoPoint => "dihedral",
        }
    }

    pub fn parse(s: &str) -> std::result::Result<Self, ParseError> {
        match s {
            "z2" => Ok(FiniteExample::ZTwoPoint),
            "dihedral" => Ok(FiniteExample::DihedralTwoPoint),
            _ => Err(ParseError::new(s, 0, "expected 'z2' or 'dihedral'")),
        }
    }

    /// Rank of the free group whose words name elements.
    pub fn word_rank(self) -> u8 {
        match self {
            FiniteExample::ZTwoPoint => 1,
            FiniteExample::DihedralTwoPoint => 2,
        }
    }

    /// Image of a word under the defining homomorphism.
    pub fn element(self, w: &ReducedWord) -> Result<GroupElement> {
        if w.rank() != self.word_rank() {
            return Err(Error::RankMismatch {
                left: w.rank(),
                right: self.word_rank(),
            });
        }
        Ok(match self {
            FiniteExample::ZTwoPoint => {
                GroupElement::Integer(w.letters().iter().map(|l| l.sign() as i64).sum())
            }
            FiniteExample::DihedralTwoPoint => {
                let mut acc = DihedralElement::identity();
                for l in w.letters() {
                    let g = if l.generator() == 0 {
                        DihedralElement::new(l.sign() as i64, false)
                    } else {
                        DihedralElement::sigma()
                    };
                    acc = acc.multiply(&g);
                }
                GroupElement::Dihedral(acc)
            }
        })
    }

    pub fn act(self, g: &GroupElement, p: TwoPoint) -> Result<TwoPoint> {
        let tag = match self {
            FiniteExample::ZTwoPoint => GroupTag::Integers,
            FiniteExample::DihedralTwoPoint => GroupTag::Dihedral,
        };
        match element_act(tag, g, &SpacePoint::TwoPoint(p))? {
            SpacePoint::TwoPoint(q) => Ok(q),
            _ => unreachable!(),
        }
    }

    /// Signed displacement of the base point 0 of `Z` (for `Z` itself,
    /// the integer).
    pub fn displacement(self, g: &GroupElement) -> Result<i64> {
        match (self, g) {
            (FiniteExample::ZTwoPoint, GroupElement::Integer(n)) => Ok(*n),
            (FiniteExample::DihedralTwoPoint, GroupElement::Dihedral(d)) => Ok(d.act_on_integer(0)),
            _ => Err(Error::GroupMismatch {
                expected: self.name().into(),
                found: g.tag().to_string(),
            }),
        }
    }

    /// The declared limit region an element belongs to.
    ///
    /// `Z`: positive evens and negative odds go to `a`, negative evens and
    /// positive odds to `b`. `D_inf`: `γ·0 → +∞` goes to `a`, `-∞` to `b`.
    pub fn declared_region(self, g: &GroupElement) -> Result<Option<TwoPoint>> {
        let n = self.displacement(g)?;
        if n == 0 {
            return Ok(None);
        }
        Ok(Some(match self {
            FiniteExample::ZTwoPoint => match (n > 0, n.is_even()) {
                (true, true) | (false, false) => TwoPoint::A,
                _ => TwoPoint::B,
            },
            FiniteExample::DihedralTwoPoint => {
                if n > 0 {
                    TwoPoint::A
                } else {
                    TwoPoint::B
                }
            }
        }))
    }
}
