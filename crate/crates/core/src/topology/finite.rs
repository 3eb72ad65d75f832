//! Exhaustive audits of declared topologies on finite boundaries.
//!
//! The group acts on the boundary through a finite quotient, and each
//! declared sequence class maps to a single quotient element `q`. Along
//! such a class `γ_n·x0 = q·x0` for every `n`, so the point-orbital
//! topology through `x0` coincides with the declared one exactly when
//! `q·x0` is the declared limit for every class. For a measure `ν`,
//! `γ_n ν = q ν` is constant too and equals a Dirac mass only when `ν`
//! does, so orbital and point-orbital coincide on finite boundaries.

use serde::Serialize;

use crate::error::{Error, ParseError, Result};
use crate::groups::{compose, invert, FiniteAction, Permutation};

/// A sequence class whose terms all have the same image in the quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclaredClass {
    pub name: String,
    /// Word over the generator names; `1` is the identity.
    pub word: String,
    pub limit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSystem {
    name: String,
    action: FiniteAction,
    classes: Vec<DeclaredClass>,
    permutations: Vec<Permutation>,
}

impl FiniteSystem {
    pub fn new(name: impl Into<String>, action: FiniteAction, classes: Vec<DeclaredClass>) -> Result<Self> {
        let mut permutations = Vec::with_capacity(classes.len());
        for c in &classes {
            if c.limit >= action.points().len() {
                return Err(Error::InvalidAction(format!("class {} has no valid limit", c.name)));
            }
            permutations.push(action.word_permutation(&c.word)?);
        }
        // Γ must be dense: every boundary point is some class's limit.
        for (i, p) in action.points().iter().enumerate() {
            if !classes.iter().any(|c| c.limit == i) {
                return Err(Error::InvalidAction(format!("no declared class converges to {p}")));
            }
        }
        Ok(Self {
            name: name.into(),
            action,
            classes,
            permutations,
        })
    }

    /// `Z` on `{a, b}` with `1·a = b`.
    pub fn z_two_point() -> Self {
        let action = FiniteAction::new(vec!["a".into(), "b".into()], vec![('t', vec![1, 0])])
            .expect("valid action");
        let class = |name: &str, word: &str, limit| DeclaredClass {
            name: name.into(),
            word: word.into(),
            limit,
        };
        Self::new(
            "z-two-point",
            action,
            vec![
                class("2n", "1", 0),
                class("-2n", "1", 1),
                class("2n+1", "t", 1),
                class("-(2n+1)", "t", 0),
            ],
        )
        .expect("valid system")
    }

    /// `D_inf` on `{a, b}`: `r` (rho) trivial, `s` (sigma) swaps; classes
    /// by the sign of `γ·0` and the reflection part.
    pub fn dihedral_two_point() -> Self {
        let action = FiniteAction::new(
            vec!["a".into(), "b".into()],
            vec![('r', vec![0, 1]), ('s', vec![1, 0])],
        )
        .expect("valid action");
        let class = |name: &str, word: &str, limit| DeclaredClass {
            name: name.into(),
            word: word.into(),
            limit,
        };
        Self::new(
            "dihedral-two-point",
            action,
            vec![
                class("rho^n", "1", 0),
                class("rho^-n", "1", 1),
                class("rho^n sigma", "s", 0),
                class("rho^-n sigma", "s", 1),
            ],
        )
        .expect("valid system")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn action(&self) -> &FiniteAction {
        &self.action
    }

    pub fn classes(&self) -> &[DeclaredClass] {
        &self.classes
    }

    /// Parses the line format
    ///
    /// ```text
    /// points a b
    /// gen t b a          # images of the points, in order
    /// class 2n 1 a       # name, quotient word, declared limit
    /// ```
    pub fn parse_text(name: &str, text: &str) -> std::result::Result<Self, ParseError> {
        let mut points: Option<Vec<String>> = None;
        let mut gens: Vec<(char, Vec<String>)> = Vec::new();
        let mut raw_classes: Vec<(String, String, String)> = Vec::new();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let key = tokens.next().expect("nonempty line");
            let rest: Vec<&str> = tokens.collect();
            match key {
                "points" => {
                    if points.is_some() {
                        return Err(ParseError::new(line, 0, "duplicate 'points' line"));
                    }
                    if rest.is_empty() {
                        return Err(ParseError::new(line, line.len(), "expected point names"));
                    }
                    points = Some(rest.iter().map(|s| s.to_string()).collect());
                }
                "gen" => {
                    let mut chars = rest.first().map(|s| s.chars());
                    let name = match chars.as_mut().map(|c| (c.next(), c.next())) {
                        Some((Some(c), None)) if c.is_ascii_lowercase() => c,
                        _ => return Err(ParseError::new(line, 4.min(line.len()), "expected a lowercase generator letter")),
                    };
                    gens.push((name, rest[1..].iter().map(|s| s.to_string()).collect()));
                }
                "class" => {
                    if rest.len() != 3 {
                        return Err(ParseError::new(line, line.len(), "expected 'class <name> <word> <limit>'"));
                    }
                    raw_classes.push((rest[0].into(), rest[1].into(), rest[2].into()));
                }
                _ => return Err(ParseError::new(line, 0, format!("unknown key {key:?}"))),
            }
        }
        let points = points.ok_or_else(|| ParseError::new(text, 0, "missing 'points' line"))?;
        let index = |p: &str| {
            points
                .iter()
                .position(|q| q == p)
                .ok_or_else(|| ParseError::new(text, 0, format!("unknown point {p:?}")))
        };
        let mut generators = Vec::new();
        for (g, images) in gens {
            let perm = images.iter().map(|p| index(p)).collect::<std::result::Result<Vec<_>, _>>()?;
            generators.push((g, perm));
        }
        let mut classes = Vec::new();
        for (n, word, limit) in raw_classes {
            classes.push(DeclaredClass {
                name: n,
                word,
                limit: index(&limit)?,
            });
        }
        let action = FiniteAction::new(points, generators).map_err(|e| ParseError::new(text, 0, e.to_string()))?;
        Self::new(name, action, classes).map_err(|e| ParseError::new(text, 0, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassWitness {
    pub class: String,
    pub declared_limit: String,
    /// Where every term of the class sends the candidate.
    pub orbit_image: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectivityWitness {
    pub class: String,
    pub translate: String,
    pub limit: String,
    pub translated_limit: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateVerdict {
    pub candidate: String,
    pub point_orbital: bool,
    /// Classes whose declared limit differs from the orbit image.
    pub witnesses: Vec<ClassWitness>,
    /// Right translation leaves every limit of `τ_{x0}` unchanged.
    pub projective: bool,
    pub projectivity_witness: Option<ProjectivityWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub system: String,
    pub points: Vec<String>,
    pub quotient_order: usize,
    pub candidates: Vec<CandidateVerdict>,
    pub point_orbital: bool,
    pub point_orbital_through: Vec<String>,
    pub orbital: bool,
    pub orbital_reason: String,
    /// No candidate is both point-orbital and projective.
    pub distal_obstruction: bool,
}

pub fn finite_audit(system: &FiniteSystem) -> AuditReport {
    let points = system.action.points();
    let group = system.action.group_elements();
    let mut candidates = Vec::with_capacity(points.len());
    for (x0, name) in points.iter().enumerate() {
        let witnesses: Vec<ClassWitness> = system
            .classes
            .iter()
            .zip(&system.permutations)
            .filter(|(c, q)| q[x0] != c.limit)
            .map(|(c, q)| ClassWitness {
                class: c.name.clone(),
                declared_limit: points[c.limit].clone(),
                orbit_image: points[q[x0]].clone(),
            })
            .collect();
        // τ_{x0} sends (γ_n g) to q·h·x0 where h is the image of g
        let mut projectivity_witness = None;
        'probe: for h in &group {
            for (c, q) in system.classes.iter().zip(&system.permutations) {
                let limit = q[x0];
                let translated = compose(q, h)[x0];
                if translated != limit {
                    projectivity_witness = Some(ProjectivityWitness {
                        class: c.name.clone(),
                        translate: describe(h, points),
                        limit: points[limit].clone(),
                        translated_limit: points[translated].clone(),
                    });
                    break 'probe;
                }
            }
        }
        candidates.push(CandidateVerdict {
            candidate: name.clone(),
            point_orbital: witnesses.is_empty(),
            witnesses,
            projective: projectivity_witness.is_none(),
            projectivity_witness,
        });
    }
    let through: Vec<String> = candidates
        .iter()
        .filter(|c| c.point_orbital)
        .map(|c| c.candidate.clone())
        .collect();
    let point_orbital = !through.is_empty();
    AuditReport {
        system: system.name.clone(),
        points: points.to_vec(),
        quotient_order: group.len(),
        distal_obstruction: points.len() < 2 || !candidates.iter().any(|c| c.point_orbital && c.projective),
        candidates,
        point_orbital,
        point_orbital_through: through,
        orbital: point_orbital,
        orbital_reason: "each class acts on measures by one quotient element, so its orbit of ν is constant and \
                         reaches a Dirac mass only when ν is one; orbital therefore coincides with point-orbital"
            .into(),
    }
}

fn describe(p: &[usize], points: &[String]) -> String {
    let parts: Vec<String> = p
        .iter()
        .enumerate()
        .map(|(i, &j)| format!("{}->{}", points[i], points[j]))
        .collect();
    parts.join(",")
}

/// Brute-force orbital test: searches probability vectors with
/// denominators up to `max_den` for a `ν` with `q_c ν = δ_{limit_c}` for
/// every class.
pub fn orbital_by_grid(system: &FiniteSystem, max_den: usize) -> bool {
    let n = system.action.points().len();
    for den in 1..=max_den {
        let mut weights = vec![0usize; n];
        if search_compositions(&mut weights, 0, den, &mut |nu| {
            system
                .classes
                .iter()
                .zip(&system.permutations)
                .all(|(c, q)| pushed_is_dirac(nu, q, c.limit))
        }) {
            return true;
        }
    }
    false
}

/// `(q ν)(j) = ν(q⁻¹ j)` equals the point mass at `limit`.
fn pushed_is_dirac(nu: &[usize], q: &[usize], limit: usize) -> bool {
    let inv = invert(q);
    let total: usize = nu.iter().sum();
    (0..nu.len()).all(|j| {
        let m = nu[inv[j]];
        if j == limit {
            m == total
        } else {
            m == 0
        }
    })
}

fn search_compositions(weights: &mut Vec<usize>, i: usize, left: usize, accept: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if i + 1 == weights.len() {
        weights[i] = left;
        return accept(weights);
    }
    for k in 0..=left {
        weights[i] = k;
        if search_compositions(weights, i + 1, left - k, accept) {
            return true;
        }
    }
    false
}
