use std::collections::BTreeSet;
use std::fmt;

use crate::boundary::BoundaryPoint;
use crate::error::{Error, ParseError, Result};
use crate::witness::prefix_inverse_sequence;
use crate::word::ReducedWord;

/// An injective sequence `(γ_n)_{n >= 1}` of free-group elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceSpec {
    /// `g^n`.
    Powers(ReducedWord),
    /// The first `n` letters of a boundary point.
    Prefixes(BoundaryPoint),
    /// Inverses of the prefixes ending right before each block of the
    /// designated generator.
    PrefixInverses(BoundaryPoint),
    Explicit(Vec<ReducedWord>),
    /// `γ_n · g`.
    RightTranslate(Box<SequenceSpec>, ReducedWord),
}

impl SequenceSpec {
    pub fn right_translate(self, g: ReducedWord) -> Self {
        SequenceSpec::RightTranslate(Box::new(self), g)
    }

    pub fn rank(&self) -> u8 {
        match self {
            SequenceSpec::Powers(g) => g.rank(),
            SequenceSpec::Prefixes(x) | SequenceSpec::PrefixInverses(x) => x.rank(),
            SequenceSpec::Explicit(v) => v.first().map(|w| w.rank()).unwrap_or(2),
            SequenceSpec::RightTranslate(_, g) => g.rank(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceSpec::Powers(g) if g.is_identity() => {
                Err(Error::InvalidSequence("powers of the identity are not injective".into()))
            }
            SequenceSpec::Powers(_) | SequenceSpec::Prefixes(_) => Ok(()),
            SequenceSpec::PrefixInverses(x) => prefix_inverse_sequence(x, 1).map(|_| ()),
            SequenceSpec::Explicit(v) => {
                if v.is_empty() {
                    return Err(Error::InvalidSequence("explicit list is empty".into()));
                }
                let rank = v[0].rank();
                if let Some(w) = v.iter().find(|w| w.rank() != rank) {
                    return Err(Error::RankMismatch {
                        left: rank,
                        right: w.rank(),
                    });
                }
                let distinct: BTreeSet<_> = v.iter().collect();
                if distinct.len() != v.len() {
                    return Err(Error::InvalidSequence("explicit list repeats an element".into()));
                }
                Ok(())
            }
            SequenceSpec::RightTranslate(inner, g) => {
                if inner.rank() != g.rank() {
                    return Err(Error::RankMismatch {
                        left: inner.rank(),
                        right: g.rank(),
                    });
                }
                inner.validate()
            }
        }
    }

    /// The `n`-th element, `n >= 1`.
    pub fn element(&self, n: usize) -> Result<ReducedWord> {
        assert!(n >= 1, "sequences are indexed from 1");
        match self {
            SequenceSpec::Powers(g) => Ok(g.power(n)),
            SequenceSpec::Prefixes(x) => Ok(x.prefix(n)),
            SequenceSpec::PrefixInverses(x) => prefix_inverse_sequence(x, n),
            SequenceSpec::Explicit(v) => v.get(n - 1).cloned().ok_or_else(|| {
                Error::InvalidSequence(format!("explicit list has only {} elements", v.len()))
            }),
            SequenceSpec::RightTranslate(inner, g) => inner.element(n)?.multiply(g),
        }
    }

    pub fn elements(&self, horizon: usize) -> Result<Vec<ReducedWord>> {
        (1..=horizon).map(|n| self.element(n)).collect()
    }

    /// Parses `powers:<word>`, `prefixes:<point>`, `prefix-inverses:<point>`,
    /// `explicit:<w1,w2,...>` or `rtrans:<spec>;<word>`.
    pub fn parse(s: &str, rank: u8) -> std::result::Result<Self, ParseError> {
        let spec = Self::parse_inner(s, rank)?;
        spec.validate().map_err(|e| ParseError::new(s, 0, e.to_string()))?;
        Ok(spec)
    }

    fn parse_inner(s: &str, rank: u8) -> std::result::Result<Self, ParseError> {
        if let Some(rest) = s.strip_prefix("powers:") {
            let g = ReducedWord::parse(rest, rank).map_err(|e| e.within(s, 7))?;
            return Ok(SequenceSpec::Powers(g));
        }
        if let Some(rest) = s.strip_prefix("prefixes:") {
            let x = BoundaryPoint::parse(rest, rank).map_err(|e| e.within(s, 9))?;
            return Ok(SequenceSpec::Prefixes(x));
        }
        if let Some(rest) = s.strip_prefix("prefix-inverses:") {
            let x = BoundaryPoint::parse(rest, rank).map_err(|e| e.within(s, 16))?;
            return Ok(SequenceSpec::PrefixInverses(x));
        }
        if let Some(rest) = s.strip_prefix("explicit:") {
            let mut out = Vec::new();
            let mut pos = 9;
            for part in rest.split(',') {
                out.push(ReducedWord::parse(part, rank).map_err(|e| e.within(s, pos))?);
                pos += part.len() + 1;
            }
            return Ok(SequenceSpec::Explicit(out));
        }
        if let Some(rest) = s.strip_prefix("rtrans:") {
            let semi = rest
                .rfind(';')
                .ok_or_else(|| ParseError::new(s, s.len(), "expected ';<word>' after the inner spec"))?;
            let inner = Self::parse_inner(&rest[..semi], rank).map_err(|e| e.within(s, 7))?;
            let g = ReducedWord::parse(&rest[semi + 1..], rank).map_err(|e| e.within(s, 7 + semi + 1))?;
            return Ok(inner.right_translate(g));
        }
        Err(ParseError::new(
            s,
            0,
            "expected one of powers:, prefixes:, prefix-inverses:, explicit:, rtrans:",
        ))
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::Powers(g) => write!(f, "powers:{g}"),
            SequenceSpec::Prefixes(x) => write!(f, "prefixes:{x}"),
            SequenceSpec::PrefixInverses(x) => write!(f, "prefix-inverses:{x}"),
            SequenceSpec::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(|w| w.to_string()).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
            SequenceSpec::RightTranslate(inner, g) => write!(f, "rtrans:{inner};{g}"),
        }
    }
}
