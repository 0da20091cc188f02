//! Fixed-seed inputs for the benches, so timings are comparable across
//! checkouts and machines.

use keller_core::families::{generate_family, Family, GeneratorSpec};
use keller_core::PolyMap;

pub fn composed_map(n: usize, seed: u64) -> PolyMap {
    let spec = GeneratorSpec {
        family: Family::Composed,
        seed,
        n,
        degree: 2,
        factors: 2,
        r: 1,
    };
    generate_family(&spec).expect("fixed seed generates")
}
