//! Entry points shared by the fuzz targets and the corpus regression test.
//! Each takes raw bytes, feeds every parser that accepts the text, and
//! panics if a parser breaks one of its contracts.

use crate::boundary::BoundaryPoint;
use crate::cli;
use crate::error::ParseError;
use crate::groups::{ConfigPoint, DihedralElement, LamplighterElement, TwoPoint};
use crate::measure::{CylinderFunction, CylinderMeasure, MeasureSpec, TableMeasure};
use crate::rational;
use crate::topology::finite::FiniteSystem;
use crate::topology::sequence::SequenceSpec;
use crate::word::ReducedWord;

/// Splits off a rank byte (1..=4) when the input is long enough.
fn rank_and_text(data: &[u8]) -> Option<(u8, &str)> {
    let (&first, rest) = data.split_first()?;
    let text = std::str::from_utf8(rest).ok()?;
    Some((first % 4 + 1, text))
}

fn check_position<T>(r: &Result<T, ParseError>) {
    if let Err(e) = r {
        assert!(e.position <= e.input.len(), "position {} past input {:?}", e.position, e.input);
    }
}

pub fn word(data: &[u8]) {
    let Some((rank, s)) = rank_and_text(data) else { return };
    let r = ReducedWord::parse(s, rank);
    check_position(&r);
    if let Ok(w) = r {
        assert_eq!(ReducedWord::parse(&w.to_string(), rank).unwrap(), w);
        assert!(w.multiply(&w.inverse()).unwrap().is_identity());
    }
}

pub fn point(data: &[u8]) {
    let Some((rank, s)) = rank_and_text(data) else { return };
    let r = BoundaryPoint::parse(s, rank);
    check_position(&r);
    if let Ok(x) = r {
        assert_eq!(BoundaryPoint::parse(&x.to_string(), rank).unwrap(), x);
        let g = x.prefix(3).inverse();
        assert_eq!(x.act(&g).unwrap().act(&g.inverse()).unwrap(), x);
    }
}

pub fn sequence(data: &[u8]) {
    let Some((rank, s)) = rank_and_text(data) else { return };
    let r = SequenceSpec::parse(s, rank);
    check_position(&r);
    if let Ok(spec) = r {
        assert_eq!(SequenceSpec::parse(&spec.to_string(), rank).unwrap(), spec);
        for n in 1..=3 {
            let _ = spec.element(n);
        }
    }
}

pub fn measure(data: &[u8]) {
    let Some((rank, s)) = rank_and_text(data) else { return };
    let r = CylinderMeasure::parse(s, rank);
    check_position(&r);
    if let Ok(MeasureSpec::Measure(m)) = r {
        let total = m.cylinder_mass(&ReducedWord::identity(rank)).unwrap();
        assert_eq!(total, rational::one());
    }
    let r = TableMeasure::parse_text(s, rank);
    check_position(&r);
    if let Ok(t) = r {
        let m = CylinderMeasure::Table(t.with_uniform_extension());
        assert!(crate::measure::is_consistent(&m, 2).unwrap());
    }
}

pub fn function(data: &[u8]) {
    let Some((rank, s)) = rank_and_text(data) else { return };
    check_position(&CylinderFunction::parse(s, rank));
    let r = CylinderFunction::parse_text(s, rank);
    check_position(&r);
    if let Ok(f) = r {
        assert_eq!(f.lift(f.depth() + 1).sup_norm(), f.sup_norm());
    }
}

pub fn group_element(data: &[u8]) {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let r = LamplighterElement::parse(s);
    check_position(&r);
    if let Ok(g) = r {
        assert_eq!(LamplighterElement::parse(&g.to_string()).unwrap(), g);
        assert_eq!(g.multiply(&g.inverse()), LamplighterElement::identity());
    }
    let r = DihedralElement::parse(s);
    check_position(&r);
    if let Ok(g) = r {
        assert_eq!(DihedralElement::parse(&g.to_string()).unwrap(), g);
    }
    let r = ConfigPoint::parse(s);
    check_position(&r);
    if let Ok(x) = r {
        assert_eq!(ConfigPoint::parse(&x.to_string()).unwrap(), x);
    }
    check_position(&TwoPoint::parse(s));
    check_position(&rational::parse(s));
}

pub fn finite_system(data: &[u8]) {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 512 {
        return;
    }
    check_position(&FiniteSystem::parse_text("fuzz", s));
}

pub fn config(data: &[u8]) {
    let Some((rank, s)) = rank_and_text(data) else { return };
    check_position(&cli::parse_config(s));
    check_position(&cli::parse_phi(s, rank));
}

pub fn command(data: &[u8]) {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = cli::Cli::from_canonical(s) {
        let canon = c.canonical();
        assert_eq!(cli::Cli::from_canonical(&canon).unwrap(), c);
    }
}

/// Target names paired with their entry points, in corpus-directory order.
pub const TARGETS: [(&str, fn(&[u8])); 9] = [
    ("word", word),
    ("point", point),
    ("sequence", sequence),
    ("measure", measure),
    ("function", function),
    ("group_element", group_element),
    ("finite_system", finite_system),
    ("config", config),
    ("command", command),
];
