//! Benchmark fixtures; the benchmarks live in `benches/engine.rs`.

use polproj_core::forms::{FormSpec, Kind};
use polproj_core::polar::PolarSpace;
use polproj_core::verify::ResidueSel;

/// A named space and residue to time.
pub struct Case {
    pub name: &'static str,
    pub space: PolarSpace,
    pub sel: ResidueSel,
}

fn build(kind: Kind, r: usize, q: u64, c: usize) -> PolarSpace {
    PolarSpace::build(FormSpec::from_params(kind, r, q, c).expect("valid form")).expect("space builds")
}

/// Small spaces with exhaustive generation.
pub fn cases() -> Vec<Case> {
    vec![
        Case { name: "W(5,2) point", space: build(Kind::Symplectic, 3, 2, 0), sel: ResidueSel::point() },
        Case { name: "W(5,2) max", space: build(Kind::Symplectic, 3, 2, 0), sel: ResidueSel::lower(3) },
        Case { name: "Q-(7,2) point", space: build(Kind::Quadratic, 3, 2, 2), sel: ResidueSel::point() },
    ]
}
