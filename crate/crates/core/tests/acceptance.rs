//! Acceptance gate. Each criterion prints one PASS/FAIL line with its
//! wall time; the process fails if any criterion fails or overruns.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use compactlab::cli;
use compactlab::groups::ConfigPoint;
use compactlab::measure::{self, poisson_eval, pushforward_mass_enumerated, CylinderFunction, CylinderMeasure};
use compactlab::random::{random_lamplighter, random_point};
use compactlab::rational::{self, ratio};
use compactlab::topology::criteria::{contractivity_deficit, multiplicativity_defect_along};
use compactlab::topology::oracle::{criterion, oracle_decide, verify_refutation, Target, TopologyOracle, Verdict};
use compactlab::topology::retraction::lamplighter_retraction;
use compactlab::topology::sequence::SequenceSpec;
use compactlab::witness::{
    geodesic_product_check, gromov_target, gromov_witness, prefix_inverse_sequence, random_agreement_specs,
    Separation,
};
use compactlab::word::{self, ReducedWord};
use compactlab::{BoundaryPoint, Rational};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const WORKED_X0: &str = "aaBAAAbbbbbab(aaaaaaab)";

type Check = std::result::Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn w(s: &str) -> ReducedWord {
    ReducedWord::parse(s, 2).unwrap()
}

fn pt(s: &str) -> BoundaryPoint {
    BoundaryPoint::parse(s, 2).unwrap()
}

/// `(1/4)(1/3)^(n-1)`: uniform mass of a depth-`n` cylinder in rank 2.
fn quarter_third(n: usize) -> Rational {
    ratio(1, 4) * rational::pow(&ratio(1, 3), n - 1)
}

fn criterion_1() -> Check {
    let x0 = pt(WORKED_X0);
    let expected = ["1", "bAA", "BBBBBaaabAA", "BABBBBBaaabAA"];
    for (i, e) in expected.iter().enumerate() {
        let got = prefix_inverse_sequence(&x0, i + 1).map_err(|e| e.to_string())?.to_string();
        ensure(got == *e, || format!("w{} = {got}, expected {e}", i + 1))?;
    }
    Ok(())
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    for i in 0..200 {
        let x0 = random_point(&mut rng, 2, 6, 6);
        let cert = gromov_witness(&x0).map_err(|e| format!("{x0}: {e}"))?;
        ensure(cert.verified, || format!("trial {i}: certificate for {x0} does not verify"))?;
        let refuted = cert
            .replays
            .iter()
            .filter(|r| r.oracle.starts_with("point:"))
            .all(|r| r.verdict.is_refuted());
        ensure(refuted, || format!("trial {i}: point-orbital replay for {x0} is not refuted"))?;
        if let Separation::DisjointFamilies {
            orbit_family,
            sequence_family,
        } = &cert.separation
        {
            ensure(orbit_family.iter().all(|a| !sequence_family.contains(a)), || {
                format!("trial {i}: families overlap for {x0}")
            })?;
        }
    }
    Ok(())
}

fn criterion_3() -> Check {
    let nu = CylinderMeasure::uniform(2);
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let specs = random_agreement_specs(&mut rng, 2, 100);
    let orbital = TopologyOracle::Orbital(nu.clone());
    for spec in &specs {
        let x = gromov_target(spec).map_err(|e| e.to_string())?.expect("constructed with a Gromov limit");
        let t = Target::Boundary(x);
        let g = oracle_decide(&TopologyOracle::Gromov, spec, &t, 6, 60).map_err(|e| e.to_string())?;
        let o = oracle_decide(&orbital, spec, &t, 6, 60).map_err(|e| e.to_string())?;
        ensure(g.is_supported() == o.is_supported(), || {
            format!("{spec}: gromov {} vs orbital {}", g.outcome(), o.outcome())
        })?;
    }
    let a_inf = pt("(a)");
    for n in 1..=12 {
        let an = w(&"a".repeat(n));
        let gap = measure::dirac_gap(&nu.pushforward(&an).unwrap(), &a_inf, 1).unwrap();
        let brute = rational::one() - pushforward_mass_enumerated(&an, &nu, &w("a")).unwrap();
        ensure(gap == brute && gap == quarter_third(n), || {
            format!("n = {n}: gap {}, enumeration {}", rational::render(&gap), rational::render(&brute))
        })?;
    }
    Ok(())
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    for _ in 0..20 {
        let x0 = random_point(&mut rng, 2, 6, 6);
        let r = geodesic_product_check(&x0, 50).map_err(|e| e.to_string())?;
        ensure(r.checks == 1225 && r.passed(), || {
            format!("{x0}: {} checks, violations {:?}", r.checks, r.violations)
        })?;
    }
    Ok(())
}

fn criterion_5() -> Check {
    let nu = CylinderMeasure::uniform(2);
    let f = CylinderFunction::indicator(&w("a"));
    for r in 1..=8 {
        let d = contractivity_deficit(&nu, &f, r).map_err(|e| e.to_string())?;
        ensure(d.deficit == quarter_third(r), || {
            format!("R = {r}: deficit {}", rational::render(&d.deficit))
        })?;
    }
    let defects = multiplicativity_defect_along(&nu, &f, &f, &SequenceSpec::Powers(w("a")), 12).map_err(|e| e.to_string())?;
    for (i, d) in defects.iter().enumerate() {
        let p = rational::one() - quarter_third(i + 1);
        let expected = &p - &p * &p;
        ensure(*d == expected, || format!("n = {}: defect {}", i + 1, rational::render(d)))?;
    }
    Ok(())
}

fn run_json(line: &str) -> std::result::Result<Value, String> {
    let argv: Vec<String> = line.split_whitespace().map(String::from).collect();
    let out = cli::run(&argv);
    if out.code != 0 {
        return Err(format!("`{line}` exited {}: {}", out.code, out.stderr));
    }
    serde_json::from_str(&out.stdout).map_err(|e| e.to_string())
}

fn criterion_6() -> Check {
    for (system, class) in [("z2", "-2n"), ("dihedral", "rho^-n")] {
        let v = run_json(&format!("audit {system}"))?;
        let r = &v["result"];
        ensure(r["point_orbital"] == false, || format!("{system}: reported point-orbital"))?;
        let candidates = r["candidates"].as_array().unwrap();
        ensure(candidates.len() == 2, || format!("{system}: expected two candidates"))?;
        for c in candidates {
            let ws = c["witnesses"].as_array().unwrap();
            ensure(!ws.is_empty(), || format!("{system}: candidate {} has no witness", c["candidate"]))?;
        }
        let first = &candidates[0]["witnesses"][0];
        ensure(
            candidates[0]["candidate"] == "a"
                && first["class"] == class
                && first["declared_limit"] == "b"
                && first["orbit_image"] == "a",
            || format!("{system}: first witness {first}"),
        )?;
    }
    Ok(())
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
    let zero = ConfigPoint::zero();
    for _ in 0..1000 {
        let g = random_lamplighter(&mut rng, 10, 8);
        ensure(lamplighter_retraction(&g) == g.act(&zero), || format!("orbit map differs at {g}"))?;
    }
    for _ in 0..1000 {
        let g = random_lamplighter(&mut rng, 10, 8);
        let h = random_lamplighter(&mut rng, 10, 8);
        ensure(
            lamplighter_retraction(&g.multiply(&h)) == g.act(&lamplighter_retraction(&h)),
            || format!("equivariance fails at ({g}, {h})"),
        )?;
    }
    Ok(())
}

fn runner(seed: u8, cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

fn word_strategy(max: usize) -> impl Strategy<Value = ReducedWord> {
    prop::collection::vec((0u8..2, any::<bool>()), 0..=max).prop_map(|ls| {
        ReducedWord::reduce(2, ls.into_iter().map(|(g, inv)| word::Letter::new(g, inv))).unwrap()
    })
}

fn point_strategy() -> impl Strategy<Value = BoundaryPoint> {
    any::<u64>().prop_map(|s| random_point(&mut ChaCha8Rng::seed_from_u64(s), 2, 4, 4))
}

fn function_strategy(depth: usize) -> impl Strategy<Value = CylinderFunction> {
    let n = word::words_of_length(2, depth).len();
    prop::collection::vec((-6i64..=6, 1i64..=4), n).prop_map(move |vals| {
        let values: BTreeMap<_, _> = word::words_of_length(2, depth)
            .into_iter()
            .zip(vals)
            .map(|(u, (p, q))| (u, ratio(p, q)))
            .collect();
        CylinderFunction::new(2, depth, values).unwrap()
    })
}

fn prop_result(name: &str, r: std::result::Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Check {
    r.map_err(|e| format!("{name}: {e}"))
}

fn criterion_8() -> Check {
    prop_result(
        "word algebra",
        runner(1, 256).run(&(word_strategy(8), word_strategy(8), word_strategy(8)), |(a, b, c)| {
            let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert!(a.multiply(&a.inverse()).unwrap().is_identity());
            let expected = (a.len() + b.len() - a.inverse().multiply(&b).unwrap().len()) / 2;
            prop_assert_eq!(a.gromov_product(&b).unwrap(), expected);
            prop_assert_eq!(a.gromov_product(&b).unwrap(), a.common_prefix_len(&b));
            let (ab, bc, ac) = (
                a.gromov_product(&b).unwrap(),
                b.gromov_product(&c).unwrap(),
                a.gromov_product(&c).unwrap(),
            );
            prop_assert!(ac >= ab.min(bc));
            Ok(())
        }),
    )?;
    let nu = CylinderMeasure::uniform(2);
    prop_result(
        "measure consistency",
        runner(2, 48).run(&(word_strategy(5), point_strategy()), |(g, x)| {
            prop_assert!(measure::is_consistent(&nu.pushforward(&g).unwrap(), 3).unwrap());
            let dirac = CylinderMeasure::Dirac(x);
            prop_assert!(measure::is_consistent(&dirac.pushforward(&g).unwrap(), 3).unwrap());
            for u in word::ball(2, 2) {
                prop_assert_eq!(
                    measure::pushforward_mass(&g, &nu, &u).unwrap(),
                    pushforward_mass_enumerated(&g, &nu, &u).unwrap()
                );
            }
            Ok(())
        }),
    )?;
    prop_result(
        "pushforward cocycle",
        runner(3, 96).run(&(word_strategy(5), word_strategy(5), word_strategy(3)), |(g, h, u)| {
            let gh = nu.pushforward(&g.multiply(&h).unwrap()).unwrap();
            let g_h = nu.pushforward(&h).unwrap().pushforward(&g).unwrap();
            prop_assert_eq!(gh.cylinder_mass(&u).unwrap(), g_h.cylinder_mass(&u).unwrap());
            Ok(())
        }),
    )?;
    prop_result(
        "poisson transform",
        runner(4, 64).run(&(function_strategy(2), word_strategy(5), word_strategy(4)), |(f, gamma, g)| {
            let one = CylinderFunction::constant(2, rational::one());
            prop_assert_eq!(poisson_eval(&one, &nu, &gamma).unwrap(), rational::one());
            let sq = f.product(&f).unwrap();
            prop_assert!(poisson_eval(&sq, &nu, &gamma).unwrap() >= rational::zero());
            let pf = poisson_eval(&f, &nu, &gamma).unwrap();
            prop_assert!(rational::abs(&pf) <= f.sup_norm());
            let translated = poisson_eval(&f.translate(&g).unwrap(), &nu, &gamma).unwrap();
            prop_assert_eq!(translated, poisson_eval(&f, &nu, &g.multiply(&gamma).unwrap()).unwrap());
            Ok(())
        }),
    )?;
    let spec_strategy = (0u8..3, word_strategy(4), point_strategy(), word_strategy(3)).prop_map(|(k, g, x, t)| {
        let base = match k {
            0 if !g.is_identity() => SequenceSpec::Powers(g),
            1 => SequenceSpec::Prefixes(x),
            _ => SequenceSpec::Powers(w("ab")),
        };
        if t.is_identity() {
            base
        } else {
            base.right_translate(t)
        }
    });
    prop_result(
        "verdict soundness",
        runner(5, 96).run(
            &(spec_strategy, point_strategy(), point_strategy(), 1usize..5, any::<bool>()),
            |(spec, x0, target, depth, gromov)| {
                let oracle = if gromov {
                    TopologyOracle::Gromov
                } else {
                    TopologyOracle::PointOrbital(x0)
                };
                let t = Target::Boundary(target);
                let v = oracle_decide(&oracle, &spec, &t, depth, 24).unwrap();
                match &v {
                    Verdict::Supported { from_index, .. } => {
                        for n in *from_index..=24 {
                            let c = criterion(&oracle, &spec.element(n).unwrap(), &t, depth).unwrap();
                            prop_assert!(c.holds);
                        }
                    }
                    Verdict::Refuted { .. } => prop_assert!(verify_refutation(&oracle, &spec, &t, &v).unwrap()),
                }
                Ok(())
            },
        ),
    )?;
    Ok(())
}

struct Criterion {
    id: u8,
    title: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, title: "worked prefix-inverse values", budget: Duration::from_secs(1), run: criterion_1 },
        Criterion { id: 2, title: "Gromov topology is not point-orbital (200 points)", budget: Duration::from_secs(10), run: criterion_2 },
        Criterion { id: 3, title: "Gromov and orbital verdicts agree; exact gap profile", budget: Duration::from_secs(60), run: criterion_3 },
        Criterion { id: 4, title: "geodesic Gromov-product identity", budget: Duration::from_secs(5), run: criterion_4 },
        Criterion { id: 5, title: "contractivity deficit and multiplicativity defect", budget: Duration::from_secs(30), run: criterion_5 },
        Criterion { id: 6, title: "finite audits of z2 and dihedral", budget: Duration::from_secs(1), run: criterion_6 },
        Criterion { id: 7, title: "lamplighter retraction is the orbit map", budget: Duration::from_secs(2), run: criterion_7 },
        Criterion { id: 8, title: "invariant suites under a fixed seed", budget: Duration::from_secs(60), run: criterion_8 },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let verdict = match (&result, elapsed <= c.budget) {
            (Ok(()), true) => "PASS".to_string(),
            (Ok(()), false) => format!("FAIL (over budget {:?})", c.budget),
            (Err(e), _) => format!("FAIL ({e})"),
        };
        if !verdict.starts_with("PASS") {
            failed += 1;
        }
        println!("criterion {}: {verdict} [{:.2}s] {}", c.id, elapsed.as_secs_f64(), c.title);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
