//! Seeded random systems for the fixture corpus and property checks.

use ccgen_core::field::RationalFunction;
use ccgen_core::jet::{Jet, MultiIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::parse::{EquationSpec, FileOptions, Form, SystemFile};

/// Small system with `n` variables: one or two unknowns, order one or two,
/// integer or linear coefficients, each equation with its own source.
pub fn random_system(seed: u64, n: usize) -> SystemFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=2);
    let q = rng.gen_range(1..=2);
    let count = rng.gen_range(1..=m + 1);
    let jets: Vec<Jet> =
        (0..m).flat_map(|a| MultiIndex::of_order(n, q).into_iter().map(move |mu| Jet::new(a, mu))).collect();
    let mut equations = Vec::new();
    for k in 0..count {
        let mut lhs = Form::new();
        for _ in 0..rng.gen_range(1..=3) {
            let j = jets[rng.gen_range(0..jets.len())];
            let mut c = RationalFunction::from_int(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
            if rng.gen_bool(0.2) {
                c = &c * &RationalFunction::var(rng.gen_range(0..n));
            }
            lhs.insert(j, c);
        }
        if rng.gen_bool(0.5) {
            let a = rng.gen_range(0..m);
            let mu = MultiIndex::of_order(n, q - 1)[0];
            lhs.entry(Jet::new(a, mu)).or_insert_with(|| RationalFunction::from_int(1));
        }
        equations.push(EquationSpec { label: None, lhs, source: Some(format!("u{}", k + 1)) });
    }
    SystemFile {
        variables: (1..=n).map(|i| format!("x{i}")).collect(),
        unknowns: (1..=m).map(|i| format!("y{i}")).collect(),
        equations,
        options: FileOptions::default(),
    }
}
