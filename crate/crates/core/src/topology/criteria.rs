//! Algebraic criteria on the Poisson transform: how close it is to an
//! isometry, to a homomorphism modulo functions vanishing at infinity, and
//! whether a perturbation of its image has a vanishing tail.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::Serialize;

use crate::error::Result;
use crate::measure::{poisson_eval, CylinderFunction, CylinderMeasure};
use crate::rational::{self, Rational};
use crate::topology::sequence::SequenceSpec;
use crate::word::{self, ReducedWord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Deficit {
    #[serde(serialize_with = "crate::topology::oracle::ser_rational")]
    pub deficit: Rational,
    /// A ball element attaining the maximum of `|P_ν f|`.
    pub maximizer: String,
}

/// `sup|f| - max_{|γ| <= radius} |P_ν f(γ)|`.
pub fn contractivity_deficit(nu: &CylinderMeasure, f: &CylinderFunction, radius: usize) -> Result<Deficit> {
    let mut best: Option<(Rational, ReducedWord)> = None;
    for gamma in word::ball(nu.rank(), radius) {
        let v = poisson_eval(f, nu, &gamma)?.abs();
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, gamma));
        }
    }
    let (max, arg) = best.expect("the ball contains the identity");
    Ok(Deficit {
        deficit: f.sup_norm() - max,
        maximizer: arg.to_string(),
    })
}

/// `|P_ν(f g)(γ) - P_ν f(γ) P_ν g(γ)|`.
pub fn multiplicativity_defect(
    nu: &CylinderMeasure,
    f: &CylinderFunction,
    g: &CylinderFunction,
    gamma: &ReducedWord,
) -> Result<Rational> {
    let fg = f.product(g)?;
    let joint = poisson_eval(&fg, nu, gamma)?;
    let split = poisson_eval(f, nu, gamma)? * poisson_eval(g, nu, gamma)?;
    Ok((joint - split).abs())
}

/// The defect along the first `horizon` terms of a sequence.
pub fn multiplicativity_defect_along(
    nu: &CylinderMeasure,
    f: &CylinderFunction,
    g: &CylinderFunction,
    spec: &SequenceSpec,
    horizon: usize,
) -> Result<Vec<Rational>> {
    spec.elements(horizon)?
        .iter()
        .map(|gamma| multiplicativity_defect(nu, f, g, gamma))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub element: String,
    #[serde(serialize_with = "crate::topology::oracle::ser_rational")]
    pub value: Rational,
}

fn annulus(rank: u8, radius: usize) -> impl Iterator<Item = ReducedWord> {
    (radius.div_ceil(2)..=radius).flat_map(move |r| word::words_of_length(rank, r))
}

/// Elements `γ` with `radius/2 <= |γ| <= radius` where `F = P_ν f + φ`
/// differs from `P_ν f` by more than `eps`. An empty list certifies the
/// tail of `F - P_ν f` at this scale.
pub fn decomposition_residual(
    f: &CylinderFunction,
    phi: &BTreeMap<ReducedWord, Rational>,
    nu: &CylinderMeasure,
    radius: usize,
    eps: &Rational,
) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for gamma in annulus(nu.rank(), radius) {
        let base = poisson_eval(f, nu, &gamma)?;
        let perturbed = &base + phi.get(&gamma).cloned().unwrap_or_else(rational::zero);
        let diff = (perturbed - base).abs();
        if diff > *eps {
            out.push(Violation {
                element: gamma.to_string(),
                value: diff,
            });
        }
    }
    Ok(out)
}

/// Elements on the same annulus where `|P_ν f + φ|` exceeds `eps`: the
/// tail that survives any finitely supported correction.
pub fn tail_violations(
    f: &CylinderFunction,
    phi: &BTreeMap<ReducedWord, Rational>,
    nu: &CylinderMeasure,
    radius: usize,
    eps: &Rational,
) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for gamma in annulus(nu.rank(), radius) {
        let v = poisson_eval(f, nu, &gamma)? + phi.get(&gamma).cloned().unwrap_or_else(rational::zero);
        if v.abs() > *eps {
            out.push(Violation {
                element: gamma.to_string(),
                value: v.abs(),
            });
        }
    }
    Ok(out)
}

/// `-P_ν f` restricted to the words of length `< radius`.
pub fn truncated_cancellation(
    f: &CylinderFunction,
    nu: &CylinderMeasure,
    radius: usize,
) -> Result<BTreeMap<ReducedWord, Rational>> {
    let mut phi = BTreeMap::new();
    for gamma in word::ball(nu.rank(), radius.saturating_sub(1)) {
        let v = -poisson_eval(f, nu, &gamma)?;
        phi.insert(gamma, v);
    }
    Ok(phi)
}
