//! Witnesses that the Gromov compactification of a free group is not
//! point-orbital, the geodesic Gromov-product identity, and agreement
//! experiments between the Gromov and orbital oracles.

use serde::Serialize;

use crate::boundary::BoundaryPoint;
use crate::error::{Error, Result};
use crate::measure::{self, CylinderMeasure};
use crate::rational::{self, Rational};
use crate::topology::oracle::{oracle_decide, ser_rational, Target, TopologyOracle, Verdict};
use crate::topology::sequence::SequenceSpec;
use crate::word::{Letter, ReducedWord};

/// The generator whose maximal blocks index the prefix-inverse sequence:
/// generator 0 when the period uses it, otherwise the smallest generator
/// of the period. `None` when the period uses a single generator, i.e.
/// the point is `w0·α^∞`.
pub fn designated_generator(x0: &BoundaryPoint) -> Option<u8> {
    let gens: Vec<u8> = x0.period().letters().iter().map(|l| l.generator()).collect();
    let smallest = *gens.iter().min()?;
    if gens.iter().all(|&g| g == smallest) {
        None
    } else {
        Some(smallest)
    }
}

/// Start positions of the first `n` maximal blocks of the designated
/// generator.
fn block_starts(x0: &BoundaryPoint, d: u8, n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while out.len() < n {
        let here = x0.letter_at(i).generator() == d;
        if here && (i == 0 || x0.letter_at(i - 1).generator() != d) {
            out.push(i);
        }
        i += 1;
    }
    out
}

/// `w_n`: the inverse of the prefix of `x0` ending right before its
/// `n`-th maximal block of the designated generator.
pub fn prefix_inverse_sequence(x0: &BoundaryPoint, n: usize) -> Result<ReducedWord> {
    if n == 0 {
        return Err(Error::InvalidSequence("sequences are indexed from 1".into()));
    }
    let d = designated_generator(x0).ok_or(Error::FinitelyManyBlocks)?;
    let start = block_starts(x0, d, n)[n - 1];
    Ok(x0.prefix(start).inverse())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessCase {
    SingleLetterTail,
    InfinitelyManyBlocks,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Separation {
    /// The orbit is the constant point `orbit_point`, which leaves the
    /// Gromov limit after `divergence` letters.
    StabilizedPrefix {
        orbit_point: String,
        gromov_limit: String,
        divergence: usize,
    },
    /// Depth-one cylinders containing the orbit points and the sequence.
    DisjointFamilies {
        orbit_family: Vec<String>,
        sequence_family: Vec<String>,
    },
}

/// One oracle call and the outcome it must reproduce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayCall {
    pub oracle: String,
    pub sequence: String,
    pub target: String,
    pub depth: usize,
    pub horizon: usize,
    pub expected: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessCertificate {
    pub case: WitnessCase,
    pub candidate: String,
    pub sequence: String,
    pub gromov_limit: String,
    pub samples: Vec<String>,
    pub separation: Separation,
    pub replays: Vec<ReplayCall>,
    pub verified: bool,
}

const SAMPLES: usize = 4;

fn families(rank: u8, designated: u8) -> (Vec<String>, Vec<String>) {
    let (a, b): (Vec<Letter>, Vec<Letter>) = Letter::alphabet(rank).partition(|l| l.generator() == designated);
    let show = |v: Vec<Letter>| v.into_iter().map(|l| l.to_string()).collect();
    (show(a), show(b))
}

fn replay(oracle: TopologyOracle, spec: &SequenceSpec, target: &BoundaryPoint, depth: usize, horizon: usize, expected: &str) -> Result<ReplayCall> {
    let verdict = oracle_decide(&oracle, spec, &Target::Boundary(target.clone()), depth, horizon)?;
    Ok(ReplayCall {
        oracle: oracle.to_string(),
        sequence: spec.to_string(),
        target: target.to_string(),
        depth,
        horizon,
        expected: expected.into(),
        verdict,
    })
}

/// Builds a sequence whose Gromov limit differs from the limit of its
/// orbit through `x0`, so the Gromov topology is not the point-orbital
/// topology of `x0`.
pub fn gromov_witness(x0: &BoundaryPoint) -> Result<WitnessCertificate> {
    let rank = x0.rank();
    let cert = match designated_generator(x0) {
        None => {
            // x0 = w0 α^∞ and w_n = w0 α^-n w0^-1 fixes x0
            let w0 = x0.prefix_word();
            let alpha_inv = x0.period().inverse();
            let g = w0.multiply(&alpha_inv)?.multiply(&w0.inverse())?;
            let spec = SequenceSpec::Powers(g);
            let limit = BoundaryPoint::normalize(w0.clone(), alpha_inv)?;
            let divergence = x0.gromov_product(&limit).expect("α^∞ differs from α^-∞");
            let depth = (divergence + 1).max(6);
            let horizon = depth + 24;
            let replays = vec![
                replay(TopologyOracle::PointOrbital(x0.clone()), &spec, &limit, depth, horizon, "refuted")?,
                replay(TopologyOracle::Gromov, &spec, &limit, depth, horizon, "supported")?,
            ];
            WitnessCertificate {
                case: WitnessCase::SingleLetterTail,
                candidate: x0.to_string(),
                samples: spec.elements(SAMPLES)?.iter().map(|w| w.to_string()).collect(),
                sequence: spec.to_string(),
                gromov_limit: limit.to_string(),
                separation: Separation::StabilizedPrefix {
                    orbit_point: x0.to_string(),
                    gromov_limit: limit.to_string(),
                    divergence,
                },
                replays,
                verified: false,
            }
        }
        Some(d) => {
            // the block starts one per period copy, at offset j past prefix·period
            let q = x0.period();
            let p = x0.prefix_word().multiply(q)?;
            let base = p.len();
            let j = (0..q.len())
                .find(|&j| x0.letter_at(base + j).generator() == d && x0.letter_at(base + j - 1).generator() != d)
                .expect("the period uses the designated generator and another one");
            let s = q.truncate(j);
            let g = s.inverse().multiply(&q.inverse())?.multiply(&s)?;
            let t = s.inverse().multiply(&p.inverse())?;
            let replay_spec = SequenceSpec::Powers(g).right_translate(t);
            let limit = BoundaryPoint::periodic(q.inverse())?.act(&s.inverse())?;
            let spec = SequenceSpec::PrefixInverses(x0.clone());
            let depth = 6;
            let horizon = depth + 24;
            let replays = vec![
                replay(TopologyOracle::PointOrbital(x0.clone()), &spec, &limit, depth, horizon, "refuted")?,
                replay(TopologyOracle::PointOrbital(x0.clone()), &replay_spec, &limit, depth, horizon, "refuted")?,
                replay(TopologyOracle::Gromov, &replay_spec, &limit, depth, horizon, "supported")?,
            ];
            let (orbit_family, sequence_family) = families(rank, d);
            WitnessCertificate {
                case: WitnessCase::InfinitelyManyBlocks,
                candidate: x0.to_string(),
                samples: spec.elements(SAMPLES)?.iter().map(|w| w.to_string()).collect(),
                sequence: spec.to_string(),
                gromov_limit: limit.to_string(),
                separation: Separation::DisjointFamilies {
                    orbit_family,
                    sequence_family,
                },
                replays,
                verified: false,
            }
        }
    };
    let verified = verify_certificate(&cert)?;
    Ok(WitnessCertificate { verified, ..cert })
}

/// Re-parses every replay call, re-runs it, and checks the separation.
pub fn verify_certificate(cert: &WitnessCertificate) -> Result<bool> {
    let x0 = BoundaryPoint::parse(&cert.candidate, rank_of(cert))?;
    let rank = x0.rank();
    let limit = BoundaryPoint::parse(&cert.gromov_limit, rank)?;
    if cert.replays.is_empty() {
        return Ok(false);
    }
    for call in &cert.replays {
        let oracle = match call.oracle.as_str() {
            "gromov" => TopologyOracle::Gromov,
            s => match s.strip_prefix("point:") {
                Some(pt) => TopologyOracle::PointOrbital(BoundaryPoint::parse(pt, rank)?),
                None => return Ok(false),
            },
        };
        let spec = SequenceSpec::parse(&call.sequence, rank)?;
        let target = BoundaryPoint::parse(&call.target, rank)?;
        let v = oracle_decide(&oracle, &spec, &Target::Boundary(target), call.depth, call.horizon)?;
        if v != call.verdict || v.outcome() != call.expected {
            return Ok(false);
        }
    }
    match &cert.separation {
        Separation::StabilizedPrefix { orbit_point, gromov_limit, divergence } => {
            let orbit = BoundaryPoint::parse(orbit_point, rank)?;
            let other = BoundaryPoint::parse(gromov_limit, rank)?;
            Ok(other == limit && orbit.gromov_product(&limit) == Some(*divergence))
        }
        Separation::DisjointFamilies {
            orbit_family,
            sequence_family,
        } => {
            let disjoint = orbit_family.iter().all(|a| !sequence_family.contains(a));
            let first = limit.letter_at(0).to_string();
            let spec = SequenceSpec::parse(&cert.sequence, rank)?;
            let mut ok = disjoint && sequence_family.contains(&first);
            for n in 1..=cert.samples.len() {
                let w = spec.element(n)?;
                ok &= w.to_string() == cert.samples[n - 1];
                ok &= orbit_family.contains(&x0.act(&w)?.letter_at(0).to_string());
                if n >= 2 {
                    ok &= w.first().is_some_and(|l| sequence_family.contains(&l.to_string()));
                }
            }
            Ok(ok)
        }
    }
}

fn rank_of(cert: &WitnessCertificate) -> u8 {
    let top = cert
        .candidate
        .chars()
        .filter(|c| c.is_ascii_alphabetic())
        .map(|c| c.to_ascii_lowercase() as u8 - b'a' + 1)
        .max()
        .unwrap_or(2);
    top.max(2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductViolation {
    pub m: usize,
    pub n: usize,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeodesicReport {
    pub point: String,
    pub horizon: usize,
    pub checks: usize,
    pub violations: Vec<ProductViolation>,
}

impl GeodesicReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `⟨γ_m^-1, γ_m^-1 γ_n⟩ = 0` for the prefixes `γ_k = x0|k`, `1 <= m < n <= big_n`.
pub fn geodesic_product_check(x0: &BoundaryPoint, big_n: usize) -> Result<GeodesicReport> {
    if big_n < 2 {
        return Err(Error::InvalidSequence("need at least two prefixes".into()));
    }
    let prefixes: Vec<ReducedWord> = (0..=big_n).map(|k| x0.prefix(k)).collect();
    let mut checks = 0;
    let mut violations = Vec::new();
    for m in 1..big_n {
        let inv = prefixes[m].inverse();
        for n in m + 1..=big_n {
            let value = inv.gromov_product(&inv.multiply(&prefixes[n])?)?;
            checks += 1;
            if value != 0 {
                violations.push(ProductViolation { m, n, value });
            }
        }
    }
    Ok(GeodesicReport {
        point: x0.to_string(),
        horizon: big_n,
        checks,
        violations,
    })
}

/// The Gromov limit of sequences built from geodesics, powers and right
/// translates of those.
pub fn gromov_target(spec: &SequenceSpec) -> Result<Option<BoundaryPoint>> {
    match spec {
        SequenceSpec::Prefixes(x) => Ok(Some(x.clone())),
        SequenceSpec::Powers(g) if !g.is_identity() => {
            // g = u c u^-1 with c cyclically reduced
            let l = g.letters();
            let mut k = 0;
            while l[k].cancels(l[l.len() - 1 - k]) {
                k += 1;
            }
            let u = g.truncate(k);
            let c = u.inverse().multiply(g)?.multiply(&u)?;
            Ok(Some(BoundaryPoint::periodic(c)?.act(&u)?))
        }
        SequenceSpec::RightTranslate(inner, _) => gromov_target(inner),
        _ => Ok(None),
    }
}

/// Seeded sequences with known Gromov limits: prefixes of random points
/// and powers of random words, half of them right-translated.
pub fn random_agreement_specs<R: rand::Rng + ?Sized>(rng: &mut R, rank: u8, count: usize) -> Vec<SequenceSpec> {
    (0..count)
        .map(|_| {
            let base = if rng.gen_bool(0.5) {
                SequenceSpec::Prefixes(crate::random::random_point(rng, rank, 4, 4))
            } else {
                let mut g = crate::random::random_word(rng, rank, 5);
                while g.is_identity() {
                    g = crate::random::random_word(rng, rank, 5);
                }
                SequenceSpec::Powers(g)
            };
            if rng.gen_bool(0.5) {
                base.right_translate(crate::random::random_word(rng, rank, 4))
            } else {
                base
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementRow {
    pub sequence: String,
    pub target: String,
    pub gromov: String,
    pub orbital: String,
    pub agree: bool,
    #[serde(serialize_with = "ser_rational")]
    pub gap_at_horizon: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointOrbitalRow {
    pub candidate: String,
    pub sequence: String,
    pub gromov_limit: String,
    pub disagree: bool,
    pub certificate_verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    pub measure: String,
    pub depth: usize,
    pub horizon: usize,
    pub rows: Vec<AgreementRow>,
    pub agreements: usize,
    #[serde(serialize_with = "ser_rational")]
    pub max_gap_at_horizon: Rational,
    pub point_orbital: Vec<PointOrbitalRow>,
}

/// Compares the Gromov and orbital verdicts on each spec toward its Gromov
/// target, then runs the point-orbital refutation for every candidate.
pub fn orbital_agreement_experiment(
    nu: &CylinderMeasure,
    specs: &[SequenceSpec],
    candidates: &[BoundaryPoint],
    depth: usize,
    horizon: usize,
) -> Result<AgreementReport> {
    let mut rows = Vec::with_capacity(specs.len());
    let mut max_gap = rational::zero();
    let orbital = TopologyOracle::Orbital(nu.clone());
    for spec in specs {
        let target = gromov_target(spec)?
            .ok_or_else(|| Error::InvalidSequence(format!("{spec} has no known Gromov limit")))?;
        let t = Target::Boundary(target.clone());
        let gromov = oracle_decide(&TopologyOracle::Gromov, spec, &t, depth, horizon)?;
        let orb = oracle_decide(&orbital, spec, &t, depth, horizon)?;
        let gap = measure::dirac_gap(&nu.pushforward(&spec.element(horizon)?)?, &target, depth)?;
        if gap > max_gap {
            max_gap = gap.clone();
        }
        rows.push(AgreementRow {
            sequence: spec.to_string(),
            target: target.to_string(),
            agree: gromov.is_supported() == orb.is_supported(),
            gromov: gromov.outcome().into(),
            orbital: orb.outcome().into(),
            gap_at_horizon: gap,
        });
    }
    let mut point_orbital = Vec::with_capacity(candidates.len());
    for x0 in candidates {
        let cert = gromov_witness(x0)?;
        let disagree = cert.replays.iter().all(|r| r.verdict.outcome() == r.expected)
            && cert.replays.iter().any(|r| r.expected == "refuted");
        point_orbital.push(PointOrbitalRow {
            candidate: cert.candidate,
            sequence: cert.sequence,
            gromov_limit: cert.gromov_limit,
            disagree,
            certificate_verified: cert.verified,
        });
    }
    Ok(AgreementReport {
        measure: nu.to_string(),
        depth,
        horizon,
        agreements: rows.iter().filter(|r| r.agree).count(),
        rows,
        max_gap_at_horizon: max_gap,
        point_orbital,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_point, random_word};
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(s: &str) -> BoundaryPoint {
        BoundaryPoint::parse(s, 2).unwrap()
    }

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s, 2).unwrap()
    }

    const WORKED_X0: &str = "aaBAAAbbbbbab(aaaaaaab)";

    #[test]
    fn worked_prefix_inverses() {
        let x0 = pt(WORKED_X0);
        let got: Vec<String> = (1..=4).map(|n| prefix_inverse_sequence(&x0, n).unwrap().to_string()).collect();
        assert_eq!(got, ["1", "bAA", "BBBBBaaabAA", "BABBBBBaaabAA"]);
    }

    #[test]
    fn prefix_inverse_examples() {
        assert_eq!(prefix_inverse_sequence(&pt("(ab)"), 2).unwrap(), w("BA"));
        assert!(prefix_inverse_sequence(&pt("(ab)"), 1).unwrap().is_identity());
        assert_eq!(prefix_inverse_sequence(&pt("b(ab)"), 1).unwrap(), w("B"));
        assert!(matches!(prefix_inverse_sequence(&pt("ab(a)"), 1), Err(Error::FinitelyManyBlocks)));
        assert!(matches!(prefix_inverse_sequence(&pt("(b)"), 1), Err(Error::FinitelyManyBlocks)));
    }

    #[test]
    fn prefix_inverses_grow_and_start_off_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..200 {
            let x0 = random_point(&mut rng, 2, 6, 6);
            let Some(d) = designated_generator(&x0) else { continue };
            let ws: Vec<_> = (1..=8).map(|n| prefix_inverse_sequence(&x0, n).unwrap()).collect();
            for pair in ws[1..].windows(2) {
                assert!(pair[0].len() < pair[1].len());
            }
            for (i, wn) in ws.iter().enumerate() {
                let n = i + 1;
                assert_eq!(x0.act(wn).unwrap().letter_at(0).generator(), d);
                if n >= 2 {
                    assert_ne!(wn.first().unwrap().generator(), d);
                }
            }
        }
    }

    #[test]
    fn case_one_example() {
        let cert = gromov_witness(&pt("(a)")).unwrap();
        assert_eq!(cert.case, WitnessCase::SingleLetterTail);
        assert_eq!(cert.sequence, "powers:A");
        assert_eq!(cert.gromov_limit, "(A)");
        assert_eq!(cert.samples, ["A", "AA", "AAA", "AAAA"]);
        assert!(cert.verified);
        assert!(cert.replays[0].verdict.is_refuted());
        assert!(cert.replays[1].verdict.is_supported());
    }

    #[test]
    fn case_one_with_prefix_uses_conjugates() {
        let x0 = pt("b(a)");
        let cert = gromov_witness(&x0).unwrap();
        assert_eq!(cert.sequence, "powers:bAB");
        assert_eq!(cert.gromov_limit, "b(A)");
        for s in &cert.samples {
            assert_eq!(x0.act(&w(s)).unwrap(), x0);
        }
        assert!(cert.verified);
    }

    #[test]
    fn case_two_example() {
        let x0 = pt("(ab)");
        let cert = gromov_witness(&x0).unwrap();
        assert_eq!(cert.case, WitnessCase::InfinitelyManyBlocks);
        assert_eq!(cert.samples[1], "BA");
        assert_eq!(
            cert.separation,
            Separation::DisjointFamilies {
                orbit_family: vec!["a".into(), "A".into()],
                sequence_family: vec!["b".into(), "B".into()],
            }
        );
        assert!(cert.verified);
        let worked = gromov_witness(&pt(WORKED_X0)).unwrap();
        assert_eq!(worked.samples, ["1", "bAA", "BBBBBaaabAA", "BABBBBBaaabAA"]);
        assert!(worked.verified);
    }

    #[test]
    fn random_certificates_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        for _ in 0..60 {
            let x0 = random_point(&mut rng, 2, 6, 6);
            let cert = gromov_witness(&x0).unwrap();
            assert!(cert.verified, "{x0}: {cert:?}");
            assert_eq!(cert.case == WitnessCase::SingleLetterTail, designated_generator(&x0).is_none());
        }
        for _ in 0..20 {
            let x0 = random_point(&mut rng, 3, 4, 4);
            assert!(gromov_witness(&x0).unwrap().verified, "{x0}");
        }
    }

    #[test]
    fn tampered_certificates_fail() {
        let mut cert = gromov_witness(&pt("(ab)")).unwrap();
        cert.replays[2].expected = "refuted".into();
        assert!(!verify_certificate(&cert).unwrap());
        let mut cert = gromov_witness(&pt("(a)")).unwrap();
        cert.gromov_limit = "(a)".into();
        assert!(!verify_certificate(&cert).unwrap());
    }

    #[test]
    fn geodesic_examples() {
        let r = geodesic_product_check(&pt("(ab)"), 10).unwrap();
        assert_eq!(r.checks, 45);
        assert!(r.passed());
        assert!(geodesic_product_check(&pt("(a)"), 5).unwrap().passed());
        assert_eq!(geodesic_product_check(&pt("b(aB)"), 2).unwrap().checks, 1);
        assert!(geodesic_product_check(&pt("(a)"), 1).is_err());
    }

    #[test]
    fn gromov_target_of_conjugated_powers() {
        let spec = SequenceSpec::Powers(w("bAB"));
        assert_eq!(gromov_target(&spec).unwrap().unwrap(), pt("b(A)"));
        let spec = SequenceSpec::Powers(w("ab")).right_translate(w("BB"));
        assert_eq!(gromov_target(&spec).unwrap().unwrap(), pt("(ab)"));
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..100 {
            let g = random_word(&mut rng, 2, 6);
            if g.is_identity() {
                continue;
            }
            let x = gromov_target(&SequenceSpec::Powers(g.clone())).unwrap().unwrap();
            let gn = g.power(40);
            assert!(x.agreement_with(&gn) >= 20);
        }
    }

    #[test]
    fn agreement_examples() {
        let nu = CylinderMeasure::uniform(2);
        let specs = [
            SequenceSpec::Prefixes(pt("(a)")),
            SequenceSpec::Powers(w("a")).right_translate(w("b")),
        ];
        let r = orbital_agreement_experiment(&nu, &specs, &[pt("(a)")], 3, 30).unwrap();
        assert_eq!(r.agreements, 2);
        assert!(r.rows.iter().all(|row| row.gromov == "supported"));
        assert!(r.point_orbital[0].disagree && r.point_orbital[0].certificate_verified);
        assert_eq!(r.point_orbital[0].sequence, "powers:A");
        for n in 1..=8 {
            let g = w(&"a".repeat(n));
            let gap = measure::dirac_gap(&nu.pushforward(&g).unwrap(), &pt("(a)"), 1).unwrap();
            assert_eq!(gap, ratio(1, 4) * rational::pow(&ratio(1, 3), n - 1));
        }
    }
}
