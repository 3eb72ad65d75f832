//! Eventually periodic points of the boundary of a free group.
//!
//! A point is stored as `prefix (period)` and denotes the infinite reduced
//! word `prefix·period·period·…`. Values are kept in canonical form (shortest
//! prefix, then primitive period), so structural equality is point equality.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, ParseError, Result};
use crate::word::{Letter, ReducedWord};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryPoint {
    prefix: ReducedWord,
    period: ReducedWord,
}

impl BoundaryPoint {
    /// Canonical form of `prefix·period^∞`.
    pub fn normalize(prefix: ReducedWord, period: ReducedWord) -> Result<Self> {
        if prefix.rank() != period.rank() {
            return Err(Error::RankMismatch {
                left: prefix.rank(),
                right: period.rank(),
            });
        }
        if period.is_identity() {
            return Err(Error::EmptyPeriod);
        }
        if !prefix.concatenates_reduced(&period) {
            return Err(Error::SeamCancellation(format!(
                "prefix {prefix} cancels against period {period}"
            )));
        }
        if !period.is_cyclically_reduced() {
            return Err(Error::SeamCancellation(format!(
                "period {period} cancels against itself"
            )));
        }
        let rank = prefix.rank();
        let mut period = primitive_root(period.letters()).to_vec();
        let mut prefix = prefix.letters().to_vec();
        while let (Some(&p), Some(&q)) = (prefix.last(), period.last()) {
            if p != q {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Ok(Self {
            prefix: ReducedWord::from_reduced(rank, prefix),
            period: ReducedWord::from_reduced(rank, period),
        })
    }

    /// The point `g^∞` for a cyclically reduced nontrivial `g`.
    pub fn periodic(period: ReducedWord) -> Result<Self> {
        Self::normalize(ReducedWord::identity(period.rank()), period)
    }

    /// Parses `prefix(period)`; the prefix may be empty or `1`.
    pub fn parse(s: &str, rank: u8) -> std::result::Result<Self, ParseError> {
        let open = s
            .find('(')
            .ok_or_else(|| ParseError::new(s, s.len(), "expected '(' introducing the period"))?;
        if !s.ends_with(')') {
            return Err(ParseError::new(s, s.len(), "expected ')' closing the period"));
        }
        let close = s.len() - 1;
        if close <= open {
            return Err(ParseError::new(s, close, "expected ')' closing the period"));
        }
        let prefix = ReducedWord::parse(&s[..open], rank).map_err(|e| e.within(s, 0))?;
        let body = &s[open + 1..close];
        if body.is_empty() || body == "1" {
            return Err(ParseError::new(s, open + 1, "period must be nonempty"));
        }
        let period = ReducedWord::parse(body, rank).map_err(|e| e.within(s, open + 1))?;
        if period.len() != body.len() {
            return Err(ParseError::new(s, open + 1, "period must be a reduced word"));
        }
        Self::normalize(prefix, period).map_err(|e| ParseError::new(s, open, e.to_string()))
    }

    pub fn rank(&self) -> u8 {
        self.prefix.rank()
    }

    pub fn prefix_word(&self) -> &ReducedWord {
        &self.prefix
    }

    pub fn period(&self) -> &ReducedWord {
        &self.period
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        let p = self.prefix.letters();
        if i < p.len() {
            p[i]
        } else {
            let q = self.period.letters();
            q[(i - p.len()) % q.len()]
        }
    }

    /// The first `depth` letters of the infinite word.
    pub fn prefix(&self, depth: usize) -> ReducedWord {
        ReducedWord::from_reduced(self.rank(), (0..depth).map(|i| self.letter_at(i)).collect())
    }

    /// The point `g·x`; cancellation never reaches past `|g|` letters of `x`.
    pub fn act(&self, g: &ReducedWord) -> Result<Self> {
        if g.rank() != self.rank() {
            return Err(Error::RankMismatch {
                left: g.rank(),
                right: self.rank(),
            });
        }
        let copies = (g.len() + 1).div_ceil(self.period.len()) + 1;
        let mut unrolled = self.prefix.clone();
        for _ in 0..copies {
            unrolled = unrolled.multiply(&self.period)?;
        }
        let head = g.multiply(&unrolled)?;
        Self::normalize(head, self.period.clone())
    }

    /// Prefix comparison up to the depth at which both words are periodic
    /// and in phase.
    pub fn equals(&self, other: &Self) -> bool {
        if self.rank() != other.rank() {
            return false;
        }
        let (p, q) = (self.period.len(), other.period.len());
        let depth = self.prefix.len().max(other.prefix.len()) + p + q + p.lcm(&q);
        (0..depth).all(|i| self.letter_at(i) == other.letter_at(i))
    }

    /// Common-prefix length; `None` when the points coincide.
    pub fn gromov_product(&self, other: &Self) -> Option<usize> {
        if self.equals(other) {
            return None;
        }
        (0..).find(|&i| self.letter_at(i) != other.letter_at(i))
    }

    /// Number of letters of `word` agreeing with this point from the start.
    pub fn agreement_with(&self, word: &ReducedWord) -> usize {
        word.letters()
            .iter()
            .enumerate()
            .take_while(|(i, l)| self.letter_at(*i) == **l)
            .count()
    }
}

/// Shortest `r` with `letters = r^k`.
fn primitive_root(letters: &[Letter]) -> &[Letter] {
    let n = letters.len();
    for k in 1..=n {
        if n % k == 0 && (k..n).all(|i| letters[i] == letters[i - k]) {
            return &letters[..k];
        }
    }
    letters
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.prefix.letters() {
            write!(f, "{l}")?;
        }
        write!(f, "({})", self.period)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s, 2).unwrap()
    }

    fn pt(s: &str) -> BoundaryPoint {
        BoundaryPoint::parse(s, 2).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let x = BoundaryPoint::normalize(w("ab"), w("ab")).unwrap();
        assert_eq!((x.prefix_word().clone(), x.period().clone()), (w(""), w("ab")));
        let x = BoundaryPoint::normalize(w(""), w("a")).unwrap();
        assert_eq!(x.to_string(), "(a)");
        assert!(matches!(
            BoundaryPoint::normalize(w("a"), w("A")),
            Err(Error::SeamCancellation(_))
        ));
        assert!(BoundaryPoint::normalize(w("b"), w("aB")).is_ok());
        assert!(matches!(BoundaryPoint::normalize(w("b"), w("")), Err(Error::EmptyPeriod)));
    }

    #[test]
    fn normalize_shrinks_period() {
        let x = BoundaryPoint::normalize(w("b"), w("abab")).unwrap();
        assert_eq!(x.to_string(), "(ba)");
        let x = BoundaryPoint::normalize(w("aab"), w("aab")).unwrap();
        assert_eq!(x.to_string(), "(aab)");
    }

    #[test]
    fn prefix_examples() {
        assert_eq!(pt("(a)").prefix(3), w("aaa"));
        assert_eq!(pt("b(aB)").prefix(4), w("baBa"));
        assert!(pt("b(aB)").prefix(0).is_identity());
    }

    #[test]
    fn act_examples() {
        assert_eq!(pt("(a)").act(&w("A")).unwrap(), pt("(a)"));
        assert_eq!(pt("(a)").act(&w("b")).unwrap(), pt("b(a)"));
        let x = pt("ab(aB)");
        assert_eq!(x.act(&w("")).unwrap(), x);
        assert_eq!(pt("ab(ab)").act(&w("BA")).unwrap(), pt("(ab)"));
    }

    #[test]
    fn equality_examples() {
        let x = BoundaryPoint {
            prefix: w(""),
            period: w("ab"),
        };
        let y = BoundaryPoint {
            prefix: w("ab"),
            period: w("ab"),
        };
        assert!(x.equals(&y));
        assert!(!pt("(a)").equals(&pt("(A)")));
        let z = BoundaryPoint {
            prefix: w("a"),
            period: w("ba"),
        };
        assert!(z.equals(&x));
    }

    #[test]
    fn parse_rejects_shorthand_and_garbage() {
        assert!(BoundaryPoint::parse("ab", 2).is_err());
        assert!(BoundaryPoint::parse("a()", 2).is_err());
        assert!(BoundaryPoint::parse("a(1)", 2).is_err());
        assert!(BoundaryPoint::parse("a(aA)", 2).is_err());
        assert!(BoundaryPoint::parse("(a", 2).is_err());
        assert_eq!(BoundaryPoint::parse("a(c)", 2).unwrap_err().position, 2);
        assert_eq!(pt("1(ab)"), pt("(ab)"));
    }

    #[test]
    fn act_matches_truncated_prefix_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let x = random_point(&mut rng, 2, 6, 6);
            let g = crate::random::random_word(&mut rng, 2, 8);
            let gx = x.act(&g).unwrap();
            for d in 0..12 {
                let rhs = g.multiply(&x.prefix(d + g.len())).unwrap().truncate(d);
                assert_eq!(gx.prefix(d), rhs);
            }
        }
    }

    #[test]
    fn action_law_and_equality_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let x = random_point(&mut rng, 2, 6, 6);
            let g = crate::random::random_word(&mut rng, 2, 6);
            let h = crate::random::random_word(&mut rng, 2, 6);
            let lhs = x.act(&g.multiply(&h).unwrap()).unwrap();
            let rhs = x.act(&h).unwrap().act(&g).unwrap();
            assert_eq!(lhs, rhs);
            assert!(lhs.equals(&rhs));
            let renorm =
                BoundaryPoint::normalize(x.prefix_word().clone(), x.period().clone()).unwrap();
            assert_eq!(renorm, x);
        }
    }

    #[test]
    fn equality_agrees_with_canonical_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let pts: Vec<_> = (0..60).map(|_| random_point(&mut rng, 2, 3, 3)).collect();
        for x in &pts {
            for y in &pts {
                assert_eq!(x.equals(y), x == y);
                if x != y {
                    let k = x.gromov_product(y).unwrap();
                    for d in [k + 1, k + 5, k + 40] {
                        assert_eq!(x.prefix(d).common_prefix_len(&y.prefix(d)), k);
                    }
                } else {
                    assert_eq!(x.prefix(50), y.prefix(50));
                }
            }
        }
    }
}
