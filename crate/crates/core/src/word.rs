//! Reduced words in the free group of finite rank.
//!
//! Text form: `a`..`z` are generators 0..25, `A`..`Z` their inverses, and
//! the identity is written `1` (the empty string is accepted on input).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, ParseError, Result};

pub const MAX_RANK: u8 = 26;

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    generator: u8,
    inverted: bool,
}

impl Letter {
    pub fn new(generator: u8, inverted: bool) -> Self {
        Self {
            generator,
            inverted,
        }
    }

    pub fn positive(generator: u8) -> Self {
        Self::new(generator, false)
    }

    pub fn generator(self) -> u8 {
        self.generator
    }

    pub fn sign(self) -> i8 {
        if self.inverted {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Self::new(self.generator, !self.inverted)
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverted != other.inverted
    }

    pub fn to_char(self) -> char {
        let base = if self.inverted { b'A' } else { b'a' };
        (base + self.generator) as char
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a'..='z' => Some(Self::new(c as u8 - b'a', false)),
            'A'..='Z' => Some(Self::new(c as u8 - b'A', true)),
            _ => None,
        }
    }

    /// All `2 * rank` letters in canonical order `a, A, b, B, ...`.
    pub fn alphabet(rank: u8) -> impl Iterator<Item = Letter> {
        (0..rank).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// An element of the free group `F_rank` in reduced form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedWord {
    rank: u8,
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity(rank: u8) -> Self {
        Self {
            rank,
            letters: Vec::new(),
        }
    }

    pub fn letter(rank: u8, letter: Letter) -> Result<Self> {
        Self::reduce(rank, [letter])
    }

    /// Free reduction by a single left-to-right stack pass.
    pub fn reduce(rank: u8, letters: impl IntoIterator<Item = Letter>) -> Result<Self> {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if l.generator >= rank {
                return Err(Error::GeneratorOutOfRange {
                    index: l.generator,
                    rank,
                });
            }
            match stack.last() {
                Some(&top) if top.cancels(l) => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        Ok(Self {
            rank,
            letters: stack,
        })
    }

    /// Wraps letters already known to be reduced and in range.
    pub(crate) fn from_reduced(rank: u8, letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| !w[0].cancels(w[1])));
        debug_assert!(letters.iter().all(|l| l.generator < rank));
        Self { rank, letters }
    }

    pub fn parse(s: &str, rank: u8) -> std::result::Result<Self, ParseError> {
        if rank == 0 || rank > MAX_RANK {
            return Err(ParseError::new(s, 0, format!("unsupported rank {rank}")));
        }
        if s == "1" {
            return Ok(Self::identity(rank));
        }
        let mut letters = Vec::with_capacity(s.len());
        for (i, c) in s.char_indices() {
            let l = Letter::from_char(c)
                .ok_or_else(|| ParseError::new(s, i, format!("unexpected character {c:?} in word")))?;
            if l.generator >= rank {
                return Err(ParseError::new(
                    s,
                    i,
                    format!("letter {c:?} exceeds rank {rank}"),
                ));
            }
            letters.push(l);
        }
        Ok(Self::reduce(rank, letters).expect("letters checked against rank"))
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let mut letters = self.letters.clone();
        let mut rest = other.letters.as_slice();
        while let (Some(&l), Some(&r)) = (letters.last(), rest.first()) {
            if !l.cancels(r) {
                break;
            }
            letters.pop();
            rest = &rest[1..];
        }
        letters.extend_from_slice(rest);
        Ok(Self::from_reduced(self.rank, letters))
    }

    pub fn inverse(&self) -> Self {
        Self::from_reduced(
            self.rank,
            self.letters.iter().rev().map(|l| l.inverse()).collect(),
        )
    }

    /// `self^n` for `n >= 0`.
    pub fn power(&self, n: usize) -> Self {
        let mut acc = Self::identity(self.rank);
        for _ in 0..n {
            acc = acc.multiply(self).expect("same rank");
        }
        acc
    }

    pub fn truncate(&self, len: usize) -> Self {
        Self::from_reduced(self.rank, self.letters[..len.min(self.len())].to_vec())
    }

    pub fn starts_with(&self, prefix: &Self) -> bool {
        self.letters.starts_with(&prefix.letters)
    }

    pub fn common_prefix_len(&self, other: &Self) -> usize {
        self.letters
            .iter()
            .zip(&other.letters)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// `(|g| + |h| - |g^-1 h|) / 2`, the Gromov product based at the identity.
    pub fn gromov_product(&self, other: &Self) -> Result<usize> {
        let between = self.inverse().multiply(other)?;
        let twice = self.len() + other.len() - between.len();
        debug_assert!(twice % 2 == 0);
        Ok(twice / 2)
    }

    /// True when `self · other` needs no cancellation at the seam.
    pub fn concatenates_reduced(&self, other: &Self) -> bool {
        match (self.last(), other.first()) {
            (Some(l), Some(r)) => !l.cancels(r),
            _ => true,
        }
    }

    /// True when every cyclic rotation is reduced.
    pub fn is_cyclically_reduced(&self) -> bool {
        self.concatenates_reduced(self)
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for ReducedWord {
    type Err = ParseError;

    /// Parses over the smallest rank that contains every letter (at least 2).
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let rank = s
            .chars()
            .filter_map(Letter::from_char)
            .map(|l| l.generator + 1)
            .max()
            .unwrap_or(0)
            .max(2);
        Self::parse(s, rank)
    }
}

/// All reduced words of length exactly `len`, in lexicographic order.
pub fn words_of_length(rank: u8, len: usize) -> Vec<ReducedWord> {
    let mut layer = vec![Vec::<Letter>::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(layer.len() * (2 * rank as usize));
        for w in &layer {
            for l in Letter::alphabet(rank) {
                if w.last().is_some_and(|&t| t.cancels(l)) {
                    continue;
                }
                let mut ext = w.clone();
                ext.push(l);
                next.push(ext);
            }
        }
        layer = next;
    }
    layer
        .into_iter()
        .map(|ls| ReducedWord::from_reduced(rank, ls))
        .collect()
}

/// All reduced words of length at most `radius`.
pub fn ball(rank: u8, radius: usize) -> Vec<ReducedWord> {
    (0..=radius).flat_map(|r| words_of_length(rank, r)).collect()
}

/// One-letter reduced extensions `w·s`.
pub fn extensions(w: &ReducedWord) -> impl Iterator<Item = ReducedWord> + '_ {
    Letter::alphabet(w.rank)
        .filter(move |&l| !w.last().is_some_and(|t| t.cancels(l)))
        .map(move |l| {
            let mut ls = w.letters.clone();
            ls.push(l);
            ReducedWord::from_reduced(w.rank, ls)
        })
}
