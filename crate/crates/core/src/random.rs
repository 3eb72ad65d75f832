//! Seeded samplers for words, boundary points and example-group elements.

use rand::Rng;

use crate::boundary::BoundaryPoint;
use crate::word::{Letter, ReducedWord};

/// A reduced word of uniformly chosen length in `0..=max_len`.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, rank: u8, max_len: usize) -> ReducedWord {
    let len = rng.gen_range(0..=max_len);
    random_word_of_length(rng, rank, len)
}

pub fn random_word_of_length<R: Rng + ?Sized>(rng: &mut R, rank: u8, len: usize) -> ReducedWord {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5));
        if letters.last().is_some_and(|t| t.cancels(l)) {
            continue;
        }
        letters.push(l);
    }
    ReducedWord::from_reduced(rank, letters)
}

/// An eventually periodic point with `|prefix| <= max_prefix` and
/// `1 <= |period| <= max_period`, drawn by rejection.
pub fn random_point<R: Rng + ?Sized>(
    rng: &mut R,
    rank: u8,
    max_prefix: usize,
    max_period: usize,
) -> BoundaryPoint {
    loop {
        let prefix = random_word(rng, rank, max_prefix);
        let plen = rng.gen_range(1..=max_period);
        let period = random_word_of_length(rng, rank, plen);
        if let Ok(x) = BoundaryPoint::normalize(prefix, period) {
            return x;
        }
    }
}

/// A nontrivial cyclically reduced word.
pub fn random_cyclic_word<R: Rng + ?Sized>(rng: &mut R, rank: u8, max_len: usize) -> ReducedWord {
    loop {
        let len = rng.gen_range(1..=max_len);
        let w = random_word_of_length(rng, rank, len);
        if w.is_cyclically_reduced() {
            return w;
        }
    }
}

/// Position in `[-max_pos, max_pos]`, up to `max_lamps` lamps in the same range.
pub fn random_lamplighter<R: Rng + ?Sized>(
    rng: &mut R,
    max_pos: i64,
    max_lamps: usize,
) -> crate::groups::LamplighterElement {
    let position = rng.gen_range(-max_pos..=max_pos);
    let count = rng.gen_range(0..=max_lamps);
    let lamps = (0..count).map(|_| rng.gen_range(-max_pos..=max_pos));
    crate::groups::LamplighterElement::new(position, lamps)
}

pub fn random_dihedral<R: Rng + ?Sized>(rng: &mut R, max_shift: i64) -> crate::groups::DihedralElement {
    crate::groups::DihedralElement::new(rng.gen_range(-max_shift..=max_shift), rng.gen_bool(0.5))
}
