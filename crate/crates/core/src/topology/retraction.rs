//! Retractions of the compactification onto its boundary.

use std::fmt;

use crate::boundary::BoundaryPoint;
use crate::error::Result;
use crate::groups::{ConfigPoint, LamplighterElement};
use crate::measure::CylinderMeasure;
use crate::rational::Rational;
use crate::word::{self, ReducedWord};

/// A point of `Γ ∪ ∂Γ` for a free group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Compactified {
    Element(ReducedWord),
    Boundary(BoundaryPoint),
}

impl Compactified {
    pub fn act(&self, g: &ReducedWord) -> Result<Self> {
        Ok(match self {
            Compactified::Element(h) => Compactified::Element(g.multiply(h)?),
            Compactified::Boundary(x) => Compactified::Boundary(x.act(g)?),
        })
    }
}

impl fmt::Display for Compactified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Compactified::Element(g) => write!(f, "{g}"),
            Compactified::Boundary(x) => write!(f, "{x}"),
        }
    }
}

/// `γ ↦ γ·x0` on the group, the identity on the boundary.
pub fn retraction_eval(x0: &BoundaryPoint, y: &Compactified) -> Result<BoundaryPoint> {
    match y {
        Compactified::Element(g) => x0.act(g),
        Compactified::Boundary(x) => Ok(x.clone()),
    }
}

/// `γ ↦ γν` on the group, `x ↦ δ_x` on the boundary.
pub fn quasi_retraction_eval(nu: &CylinderMeasure, y: &Compactified) -> Result<CylinderMeasure> {
    match y {
        Compactified::Element(g) => nu.pushforward(g),
        Compactified::Boundary(x) => Ok(CylinderMeasure::Dirac(x.clone())),
    }
}

/// Forgets the lamplighter's position: `(p, C) ↦ C`.
pub fn lamplighter_retraction(g: &LamplighterElement) -> ConfigPoint {
    ConfigPoint::finite(g.lamps.iter().copied())
}

/// Cylinder masses of two measures on all words up to `depth`.
pub fn masses_agree(mu: &CylinderMeasure, nu: &CylinderMeasure, depth: usize) -> Result<bool> {
    for u in word::ball(mu.rank(), depth) {
        if mu.cylinder_mass(&u)? != nu.cylinder_mass(&u)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Masses of the depth-one cylinders, in alphabet order.
pub fn first_letter_masses(mu: &CylinderMeasure) -> Result<Vec<(String, Rational)>> {
    word::words_of_length(mu.rank(), 1)
        .into_iter()
        .map(|u| Ok((u.to_string(), mu.cylinder_mass(&u)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_lamplighter, random_point, random_word};
    use crate::rational::ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s, 2).unwrap()
    }

    #[test]
    fn retraction_examples() {
        let x0 = BoundaryPoint::parse("(a)", 2).unwrap();
        let y = retraction_eval(&x0, &Compactified::Element(w("b"))).unwrap();
        assert_eq!(y, BoundaryPoint::parse("b(a)", 2).unwrap());
        let xi = BoundaryPoint::parse("Ab(aB)", 2).unwrap();
        assert_eq!(retraction_eval(&x0, &Compactified::Boundary(xi.clone())).unwrap(), xi);
        let g = LamplighterElement::new(3, [1, -2]);
        assert_eq!(lamplighter_retraction(&g), g.act(&ConfigPoint::zero()));
    }

    #[test]
    fn quasi_retraction_examples() {
        let nu = CylinderMeasure::uniform(2);
        let m = quasi_retraction_eval(&nu, &Compactified::Element(w("a"))).unwrap();
        let masses = first_letter_masses(&m).unwrap();
        assert_eq!(
            masses,
            vec![
                ("a".to_string(), ratio(3, 4)),
                ("A".to_string(), ratio(1, 12)),
                ("b".to_string(), ratio(1, 12)),
                ("B".to_string(), ratio(1, 12)),
            ]
        );
        let x = BoundaryPoint::parse("b(ab)", 2).unwrap();
        assert_eq!(
            quasi_retraction_eval(&nu, &Compactified::Boundary(x.clone())).unwrap(),
            CylinderMeasure::Dirac(x)
        );
        assert_eq!(quasi_retraction_eval(&nu, &Compactified::Element(w(""))).unwrap(), nu);
    }

    #[test]
    fn both_retractions_are_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let nu = CylinderMeasure::uniform(2);
        for _ in 0..100 {
            let x0 = random_point(&mut rng, 2, 4, 4);
            let g = random_word(&mut rng, 2, 5);
            let y = if rng.gen_bool(0.5) {
                Compactified::Element(random_word(&mut rng, 2, 5))
            } else {
                Compactified::Boundary(random_point(&mut rng, 2, 4, 4))
            };
            let gy = y.act(&g).unwrap();
            assert_eq!(retraction_eval(&x0, &gy).unwrap(), retraction_eval(&x0, &y).unwrap().act(&g).unwrap());
            let lhs = quasi_retraction_eval(&nu, &gy).unwrap();
            let rhs = quasi_retraction_eval(&nu, &y).unwrap().pushforward(&g).unwrap();
            assert!(masses_agree(&lhs, &rhs, 3).unwrap());
        }
    }

    #[test]
    fn lamplighter_retraction_is_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..500 {
            let g = random_lamplighter(&mut rng, 6, 5);
            let h = random_lamplighter(&mut rng, 6, 5);
            assert_eq!(lamplighter_retraction(&g.multiply(&h)), g.act(&lamplighter_retraction(&h)));
        }
    }
}
