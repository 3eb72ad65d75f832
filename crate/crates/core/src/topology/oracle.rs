//! Finite-horizon convergence oracles.
//!
//! Each topology is reduced to a per-element criterion at a resolution
//! `depth`: a sequence is supported when the criterion holds from some index
//! up to the horizon, and refuted otherwise. Refutations carry the exact
//! values that reproduce the violation.

use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::boundary::BoundaryPoint;
use crate::error::{Error, ParseError, Result};
use crate::groups::{FiniteExample, TwoPoint};
use crate::measure::{self, CylinderMeasure};
use crate::rational::{self, Rational};
use crate::topology::sequence::SequenceSpec;
use crate::witness;
use crate::word::ReducedWord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyOracle {
    /// `γ_n → x` iff the Gromov product of `γ_n` with `x` tends to infinity.
    Gromov,
    /// `γ_n → x` iff `γ_n·x0 → x`.
    PointOrbital(BoundaryPoint),
    /// `γ_n → x` iff `γ_n ν → δ_x` weak*.
    Orbital(CylinderMeasure),
    /// The rule table of a finite example.
    Declared(FiniteExample),
    /// Point-orbital topology of a finite example through one of its points.
    FinitePointOrbital(FiniteExample, TwoPoint),
}

impl TopologyOracle {
    /// Rank of the words this oracle consumes, when it is fixed.
    pub fn word_rank(&self) -> Option<u8> {
        match self {
            TopologyOracle::Gromov => None,
            TopologyOracle::PointOrbital(x) => Some(x.rank()),
            TopologyOracle::Orbital(m) => Some(m.rank()),
            TopologyOracle::Declared(e) | TopologyOracle::FinitePointOrbital(e, _) => Some(e.word_rank()),
        }
    }

    fn is_finite(&self) -> bool {
        matches!(
            self,
            TopologyOracle::Declared(_) | TopologyOracle::FinitePointOrbital(..)
        )
    }
}

impl fmt::Display for TopologyOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyOracle::Gromov => f.write_str("gromov"),
            TopologyOracle::PointOrbital(x) => write!(f, "point:{x}"),
            TopologyOracle::Orbital(m) => write!(f, "orbital:{m}"),
            TopologyOracle::Declared(e) => write!(f, "declared:{}", e.name()),
            TopologyOracle::FinitePointOrbital(_, p) => write!(f, "point:{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Boundary(BoundaryPoint),
    Finite(TwoPoint),
}

impl Target {
    pub fn parse(s: &str, rank: u8, finite: bool) -> std::result::Result<Self, ParseError> {
        if finite {
            TwoPoint::parse(s).map(Target::Finite)
        } else {
            BoundaryPoint::parse(s, rank).map(Target::Boundary)
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Boundary(x) => write!(f, "{x}"),
            Target::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// The exact quantity a criterion was decided on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Observation {
    /// Letters shared by the element and the target.
    CommonPrefix { length: usize },
    /// First letters of `γ·x0`.
    OrbitPrefix { prefix: String },
    /// `1 - (γν)([x|depth])` against the threshold `2^-depth`.
    Gap {
        #[serde(serialize_with = "ser_rational")]
        gap: Rational,
        #[serde(serialize_with = "ser_rational")]
        threshold: Rational,
    },
    /// Declared region and displacement of `0` in the finite examples.
    Region {
        region: Option<String>,
        displacement: i64,
    },
    /// `γ·x0` in a finite example.
    OrbitPoint { point: String, displacement: i64 },
}

pub(crate) fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::render(r))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Criterion {
    pub holds: bool,
    pub observed: Observation,
}

/// Gap threshold used by the orbital criterion at a given depth.
pub fn orbital_threshold(depth: usize) -> Rational {
    rational::one() / rational::pow(&rational::int(2), depth)
}

/// Decides one element against the target at resolution `depth`.
pub fn criterion(oracle: &TopologyOracle, g: &ReducedWord, target: &Target, depth: usize) -> Result<Criterion> {
    match (oracle, target) {
        (TopologyOracle::Gromov, Target::Boundary(x)) => {
            let length = x.agreement_with(g);
            Ok(Criterion {
                holds: length >= depth,
                observed: Observation::CommonPrefix { length },
            })
        }
        (TopologyOracle::PointOrbital(x0), Target::Boundary(x)) => {
            let image = x0.act(g)?;
            Ok(point_criterion(&image, x, depth))
        }
        (TopologyOracle::Orbital(nu), Target::Boundary(x)) => {
            let pushed = nu.pushforward(g)?;
            let gap = measure::dirac_gap(&pushed, x, depth)?;
            let threshold = orbital_threshold(depth);
            Ok(Criterion {
                holds: gap < threshold,
                observed: Observation::Gap { gap, threshold },
            })
        }
        (TopologyOracle::Declared(ex), Target::Finite(p)) => {
            let e = ex.element(g)?;
            let displacement = ex.displacement(&e)?;
            let region = ex.declared_region(&e)?;
            Ok(Criterion {
                holds: region == Some(*p) && displacement.unsigned_abs() as usize >= depth,
                observed: Observation::Region {
                    region: region.map(|r| r.to_string()),
                    displacement,
                },
            })
        }
        (TopologyOracle::FinitePointOrbital(ex, x0), Target::Finite(p)) => {
            let e = ex.element(g)?;
            let displacement = ex.displacement(&e)?;
            let image = ex.act(&e, *x0)?;
            Ok(Criterion {
                holds: image == *p && displacement.unsigned_abs() as usize >= depth,
                observed: Observation::OrbitPoint {
                    point: image.to_string(),
                    displacement,
                },
            })
        }
        _ => Err(Error::SpaceMismatch(format!(
            "oracle {oracle} cannot decide convergence to {target}"
        ))),
    }
}

fn point_criterion(image: &BoundaryPoint, target: &BoundaryPoint, depth: usize) -> Criterion {
    let prefix = image.prefix(depth);
    Criterion {
        holds: prefix == target.prefix(depth),
        observed: Observation::OrbitPrefix {
            prefix: prefix.to_string(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "reason", rename_all = "kebab-case")]
pub enum RefutationKind {
    /// The violation is permanent for a reason that holds at every index.
    Structural(String),
    /// No stabilization was observed up to the horizon.
    WithinHorizon,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Verdict {
    /// The criterion holds for every index in `from_index..=horizon`.
    Supported {
        depth: usize,
        from_index: usize,
        horizon: usize,
        observed_at_horizon: Observation,
    },
    /// The criterion fails at `index`, the last index examined.
    Refuted {
        index: usize,
        depth: usize,
        element: String,
        observed: Observation,
        refutation: RefutationKind,
    },
}

impl Verdict {
    pub fn is_supported(&self) -> bool {
        matches!(self, Verdict::Supported { .. })
    }

    pub fn is_refuted(&self) -> bool {
        !self.is_supported()
    }

    pub fn outcome(&self) -> &'static str {
        if self.is_supported() {
            "supported"
        } else {
            "refuted"
        }
    }
}

fn check_ranks(oracle: &TopologyOracle, spec: &SequenceSpec, target: &Target) -> Result<()> {
    let rank = spec.rank();
    if let Some(r) = oracle.word_rank() {
        if r != rank {
            return Err(Error::RankMismatch { left: r, right: rank });
        }
    }
    match target {
        Target::Boundary(x) if x.rank() != rank => Err(Error::RankMismatch {
            left: x.rank(),
            right: rank,
        }),
        Target::Boundary(_) if oracle.is_finite() => {
            Err(Error::SpaceMismatch("finite oracles need a finite target".into()))
        }
        Target::Finite(_) if !oracle.is_finite() => {
            Err(Error::SpaceMismatch("boundary oracles need a boundary target".into()))
        }
        _ => Ok(()),
    }
}

/// Evaluates the oracle's criterion for `n = 1..=horizon`.
pub fn oracle_decide(
    oracle: &TopologyOracle,
    spec: &SequenceSpec,
    target: &Target,
    depth: usize,
    horizon: usize,
) -> Result<Verdict> {
    if depth == 0 || horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    check_ranks(oracle, spec, target)?;
    spec.validate()?;
    let mut outcomes = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        let g = spec.element(n)?;
        let c = criterion(oracle, &g, target, depth)?;
        outcomes.push((g, c));
    }
    let (last_element, last) = outcomes.last().expect("horizon >= 1");
    if last.holds {
        let from_index = outcomes.iter().rposition(|(_, c)| !c.holds).map_or(1, |i| i + 2);
        return Ok(Verdict::Supported {
            depth,
            from_index,
            horizon,
            observed_at_horizon: last.observed.clone(),
        });
    }
    let refutation = structural_reason(oracle, spec, target, depth)?.map_or(RefutationKind::WithinHorizon, RefutationKind::Structural);
    Ok(Verdict::Refuted {
        index: horizon,
        depth,
        element: last_element.to_string(),
        observed: last.observed.clone(),
        refutation,
    })
}

/// Splits `Powers(g)` and `RightTranslate(Powers(g), t)` into `(g, t)`.
fn powers_shape(spec: &SequenceSpec) -> Option<(ReducedWord, ReducedWord)> {
    match spec {
        SequenceSpec::Powers(g) => Some((g.clone(), ReducedWord::identity(g.rank()))),
        SequenceSpec::RightTranslate(inner, t) => match inner.as_ref() {
            SequenceSpec::Powers(g) => Some((g.clone(), t.clone())),
            _ => None,
        },
        _ => None,
    }
}

/// A reason the criterion fails at every index, when one is known.
///
/// Called only after the criterion failed at the horizon.
fn structural_reason(
    oracle: &TopologyOracle,
    spec: &SequenceSpec,
    target: &Target,
    depth: usize,
) -> Result<Option<String>> {
    match (oracle, target) {
        (TopologyOracle::PointOrbital(x0), Target::Boundary(x)) => {
            if let Some((g, t)) = powers_shape(spec) {
                let y = x0.act(&t)?;
                if y.act(&g)? == y {
                    return Ok(Some(format!(
                        "{g} fixes {y}, so every term maps {x0} to {y}, which differs from {x} within depth {depth}"
                    )));
                }
            }
            if let SequenceSpec::PrefixInverses(p) = spec {
                let designated = witness::designated_generator(p);
                let first = x.letter_at(0);
                if p == x0 && designated.is_some_and(|d| first.generator() != d) {
                    return Ok(Some(format!(
                        "every term maps {x0} into a cylinder of the designated generator, while {x} starts with {first}"
                    )));
                }
            }
            Ok(None)
        }
        (TopologyOracle::FinitePointOrbital(ex, x0), Target::Finite(_)) => {
            if let Some((g, t)) = powers_shape(spec) {
                let y = ex.act(&ex.element(&t)?, *x0)?;
                if ex.act(&ex.element(&g)?, y)? == y {
                    // the displacement part of the criterion grows, so the failure is the orbit point
                    let last = spec.element(1)?;
                    let c = criterion(oracle, &last, target, 0)?;
                    if !c.holds {
                        return Ok(Some(format!(
                            "{g} fixes {y}, so every term maps {x0} to {y}, not the target"
                        )));
                    }
                }
            }
            Ok(None)
        }
        _ => Ok(None),
    }
}

/// Re-evaluates a refutation at its recorded index.
pub fn verify_refutation(
    oracle: &TopologyOracle,
    spec: &SequenceSpec,
    target: &Target,
    verdict: &Verdict,
) -> Result<bool> {
    let Verdict::Refuted {
        index,
        depth,
        element,
        observed,
        ..
    } = verdict
    else {
        return Ok(false);
    };
    let g = spec.element(*index)?;
    if g.to_string() != *element {
        return Ok(false);
    }
    let c = criterion(oracle, &g, target, *depth)?;
    Ok(!c.holds && c.observed == *observed)
}

/// The same decision procedure applied to an explicit sequence of boundary
/// points `x_n → x`, compared at `depth` letters.
pub fn decide_point_sequence(points: &[BoundaryPoint], target: &BoundaryPoint, depth: usize) -> Option<(bool, usize)> {
    let holds: Vec<bool> = points
        .iter()
        .map(|p| point_criterion(p, target, depth).holds)
        .collect();
    let last = *holds.last()?;
    let from = holds.iter().rposition(|h| !h).map_or(1, |i| i + 2);
    Some((last, if last { from } else { holds.len() }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Projectivity {
    Agree { verdict: Verdict },
    Disagree { original: Verdict, translated: Verdict },
}

/// Compares the verdicts for `s` and `s·g` toward the same target.
pub fn projectivity_probe(
    oracle: &TopologyOracle,
    spec: &SequenceSpec,
    g: &ReducedWord,
    target: &Target,
    depth: usize,
    horizon: usize,
) -> Result<Projectivity> {
    let original = oracle_decide(oracle, spec, target, depth, horizon)?;
    let translated_spec = spec.clone().right_translate(g.clone());
    let translated = oracle_decide(oracle, &translated_spec, target, depth, horizon)?;
    if original.is_supported() == translated.is_supported() {
        Ok(Projectivity::Agree { verdict: original })
    } else {
        Ok(Projectivity::Disagree { original, translated })
    }
}

/// `dirac_gap(γ_n ν, x, depth)` for `n = 1..=horizon`.
pub fn gap_profile(
    nu: &CylinderMeasure,
    spec: &SequenceSpec,
    x: &BoundaryPoint,
    depth: usize,
    horizon: usize,
) -> Result<Vec<Rational>> {
    spec.elements(horizon)?
        .iter()
        .map(|g| measure::dirac_gap(&nu.pushforward(g)?, x, depth))
        .collect()
}

/// True when every gap is at most one.
pub fn gaps_are_probabilities(gaps: &[Rational]) -> bool {
    gaps.iter().all(|g| *g >= rational::zero() && *g <= Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_point, random_word};
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s, 2).unwrap()
    }

    fn pt(s: &str) -> BoundaryPoint {
        BoundaryPoint::parse(s, 2).unwrap()
    }

    fn spec(s: &str) -> SequenceSpec {
        SequenceSpec::parse(s, 2).unwrap()
    }

    #[test]
    fn gromov_geodesic_converges_to_endpoint() {
        let x = pt("ab(aB)");
        let v = oracle_decide(
            &TopologyOracle::Gromov,
            &SequenceSpec::Prefixes(x.clone()),
            &Target::Boundary(x),
            5,
            50,
        )
        .unwrap();
        assert!(matches!(v, Verdict::Supported { depth: 5, from_index: 5, .. }));
    }

    #[test]
    fn point_orbital_refutes_inverse_powers() {
        let oracle = TopologyOracle::PointOrbital(pt("(a)"));
        let s = spec("powers:A");
        let target = Target::Boundary(pt("(A)"));
        let v = oracle_decide(&oracle, &s, &target, 1, 50).unwrap();
        match &v {
            Verdict::Refuted {
                observed, refutation, ..
            } => {
                assert_eq!(
                    observed,
                    &Observation::OrbitPrefix {
                        prefix: "a".to_string()
                    }
                );
                assert!(matches!(refutation, RefutationKind::Structural(_)));
            }
            _ => panic!("expected refutation, got {v:?}"),
        }
        assert!(verify_refutation(&oracle, &s, &target, &v).unwrap());
    }

    #[test]
    fn orbital_powers_gap_profile() {
        let nu = CylinderMeasure::uniform(2);
        let x = pt("(a)");
        let v = oracle_decide(
            &TopologyOracle::Orbital(nu.clone()),
            &spec("powers:a"),
            &Target::Boundary(x.clone()),
            1,
            20,
        )
        .unwrap();
        assert!(v.is_supported());
        let gaps = gap_profile(&nu, &spec("powers:a"), &x, 1, 20).unwrap();
        for (i, gap) in gaps.iter().enumerate() {
            let expect = ratio(1, 4) * rational::pow(&ratio(1, 3), i);
            assert_eq!(*gap, expect);
        }
    }

    #[test]
    fn zero_depth_or_horizon_is_an_error() {
        let x = pt("(a)");
        let t = Target::Boundary(x.clone());
        let s = SequenceSpec::Prefixes(x);
        assert!(matches!(oracle_decide(&TopologyOracle::Gromov, &s, &t, 0, 5), Err(Error::ZeroHorizon)));
        assert!(matches!(oracle_decide(&TopologyOracle::Gromov, &s, &t, 3, 0), Err(Error::ZeroHorizon)));
        assert!(oracle_decide(&TopologyOracle::Gromov, &s, &Target::Finite(TwoPoint::A), 3, 5).is_err());
    }

    #[test]
    fn projectivity_examples() {
        let p = projectivity_probe(
            &TopologyOracle::Gromov,
            &spec("powers:a"),
            &w("b"),
            &Target::Boundary(pt("(a)")),
            6,
            40,
        )
        .unwrap();
        assert!(matches!(p, Projectivity::Agree { .. }));

        let dihedral = FiniteExample::DihedralTwoPoint;
        let oracle = TopologyOracle::FinitePointOrbital(dihedral, TwoPoint::A);
        let p = projectivity_probe(&oracle, &spec("powers:a"), &w("b"), &Target::Finite(TwoPoint::A), 3, 20).unwrap();
        match p {
            Projectivity::Disagree { original, translated } => {
                assert!(original.is_supported());
                assert!(matches!(
                    translated,
                    Verdict::Refuted {
                        refutation: RefutationKind::Structural(_),
                        ..
                    }
                ));
            }
            _ => panic!("expected disagreement"),
        }

        let p = projectivity_probe(
            &TopologyOracle::Orbital(CylinderMeasure::uniform(2)),
            &spec("prefixes:(ab)"),
            &w("1"),
            &Target::Boundary(pt("(ab)")),
            4,
            30,
        )
        .unwrap();
        assert!(matches!(p, Projectivity::Agree { .. }));
    }

    #[test]
    fn declared_oracles() {
        let z = FiniteExample::ZTwoPoint;
        let s = SequenceSpec::parse("powers:aa", 1).unwrap();
        let v = oracle_decide(&TopologyOracle::Declared(z), &s, &Target::Finite(TwoPoint::A), 4, 30).unwrap();
        assert!(v.is_supported());
        let s = SequenceSpec::parse("powers:AA", 1).unwrap();
        let v = oracle_decide(&TopologyOracle::Declared(z), &s, &Target::Finite(TwoPoint::B), 4, 30).unwrap();
        assert!(v.is_supported());
        let v = oracle_decide(
            &TopologyOracle::FinitePointOrbital(z, TwoPoint::A),
            &s,
            &Target::Finite(TwoPoint::B),
            4,
            30,
        )
        .unwrap();
        assert!(matches!(
            v,
            Verdict::Refuted {
                refutation: RefutationKind::Structural(_),
                ..
            }
        ));
    }

    #[test]
    fn refutations_are_sound_and_point_orbital_is_self_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..150 {
            let x0 = random_point(&mut rng, 2, 4, 4);
            let target = random_point(&mut rng, 2, 4, 4);
            let g = random_word(&mut rng, 2, 4);
            let specs = [
                SequenceSpec::Prefixes(random_point(&mut rng, 2, 3, 3)),
                SequenceSpec::Powers(crate::random::random_cyclic_word(&mut rng, 2, 3)).right_translate(g.clone()),
            ];
            for s in &specs {
                let oracles = [
                    TopologyOracle::Gromov,
                    TopologyOracle::PointOrbital(x0.clone()),
                    TopologyOracle::Orbital(CylinderMeasure::uniform(2)),
                ];
                for oracle in &oracles {
                    let t = Target::Boundary(target.clone());
                    let v = oracle_decide(oracle, s, &t, 3, 25).unwrap();
                    if v.is_refuted() {
                        assert!(verify_refutation(oracle, s, &t, &v).unwrap());
                    }
                }
                let images: Vec<BoundaryPoint> =
                    s.elements(25).unwrap().iter().map(|g| x0.act(g).unwrap()).collect();
                let v = oracle_decide(&TopologyOracle::PointOrbital(x0.clone()), s, &Target::Boundary(target.clone()), 3, 25)
                    .unwrap();
                let (holds, index) = decide_point_sequence(&images, &target, 3).unwrap();
                assert_eq!(holds, v.is_supported());
                match v {
                    Verdict::Supported { from_index, .. } => {
                        assert_eq!(index, from_index);
                        // images of the retraction agree with the target from there on
                        for img in &images[from_index - 1..] {
                            assert_eq!(img.prefix(3), target.prefix(3));
                        }
                    }
                    Verdict::Refuted { index: i, .. } => assert_eq!(i, index),
                }
            }
        }
    }

    #[test]
    fn orbital_support_implies_small_gaps() {
        let nu = CylinderMeasure::uniform(2);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..30 {
            let x = random_point(&mut rng, 2, 4, 4);
            let s = SequenceSpec::Prefixes(x.clone()).right_translate(random_word(&mut rng, 2, 3));
            let v = oracle_decide(&TopologyOracle::Orbital(nu.clone()), &s, &Target::Boundary(x.clone()), 4, 40).unwrap();
            assert!(v.is_supported());
            let gaps = gap_profile(&nu, &s, &x, 4, 40).unwrap();
            assert!(gaps_are_probabilities(&gaps));
            let Verdict::Supported { from_index, .. } = v else { unreachable!() };
            for threshold in [ratio(1, 16), ratio(1, 100), ratio(1, 10_000)] {
                assert!(gaps[from_index - 1..].iter().any(|g| *g < threshold));
            }
            assert!(gaps[39] < ratio(1, 10_000));
        }
    }
}
