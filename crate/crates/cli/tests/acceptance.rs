//! Acceptance criteria, one PASS/FAIL line each.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use ccgen::parse_system;
use ccgen::random::random_system;
use ccgen_core::cc::{self, CcEngine, DEFAULT_MAX_ORDER};
use ccgen_core::field::RationalFunction;
use ccgen_core::jet::{Jet, MultiIndex};
use ccgen_core::symbol::{self, SymbolSpace};
use ccgen_core::system::{self, pp_procedure, Levels, PDESystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Form = BTreeMap<Jet, RationalFunction>;
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

const EXAMPLES: [&str; 4] = ["ex2_1", "ex2_2", "ex2_3", "macaulay"];

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture_names() -> Vec<String> {
    let mut names: Vec<String> = EXAMPLES.iter().map(|s| s.to_string()).collect();
    names.extend((1..=10).map(|s| format!("random/rand_{s:02}")));
    names
}

fn load(name: &str) -> PDESystem {
    let path = root().join(format!("{name}.sys"));
    let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_system(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display())).to_system().expect("valid system")
}

fn c(v: i64) -> RationalFunction {
    RationalFunction::from_int(v)
}

/// `x_i` with 1-based index.
fn x(i: usize) -> RationalFunction {
    RationalFunction::var(i - 1)
}

fn jet(n: usize, comp: usize, digits: &str) -> Jet {
    Jet::new(comp, Jet::parse_suffix(n, digits).expect("suffix"))
}

/// Linear form from `(coefficient, component, suffix)` triples.
fn form(n: usize, terms: &[(RationalFunction, usize, &str)]) -> Form {
    let mut f = Form::new();
    for (k, comp, digits) in terms {
        let j = jet(n, *comp, digits);
        let v = f.get(&j).cloned().unwrap_or_else(RationalFunction::zero) + k.clone();
        if v.is_zero() {
            f.remove(&j);
        } else {
            f.insert(j, v);
        }
    }
    f
}

/// `a = k * b` for some nonzero function `k`.
fn proportional(a: &Form, b: &Form) -> bool {
    if a.is_empty() || a.len() != b.len() || a.keys().ne(b.keys()) {
        return false;
    }
    let (j, av) = a.iter().next().expect("nonempty");
    let Ok(k) = av.checked_div(&b[j]) else { return false };
    a.iter().all(|(j, v)| *v == &k * &b[j])
}

fn has_equation(sys: &PDESystem, lhs: &Form, rhs: &Form) -> bool {
    sys.equations.iter().any(|eq| {
        let Some((j, lead)) = lhs.iter().next() else { return false };
        let Some(their) = eq.lhs.get(j) else { return false };
        let Ok(k) = their.checked_div(lead) else { return false };
        let scaled = |f: &Form| -> Form { f.iter().map(|(j, v)| (*j, &k * v)).collect() };
        eq.lhs == scaled(lhs) && eq.rhs == scaled(rhs)
    })
}

fn ex2_1() -> Outcome {
    let sys = load("ex2_1");
    let n = 3;
    let sf = system::solve(&sys, Default::default());
    let mut par = sf.parametric.clone();
    par.sort();
    let mut want = vec![jet(n, 0, "0"), jet(n, 1, "0"), jet(n, 1, "1")];
    want.sort();
    ensure!(sf.dim() == 3 && par == want, "solution space dim {} parametric {:?}", sf.dim(), par);

    let gens = cc::generating_cc(&sys, None);
    ensure!(gens.complete && gens.orders() == vec![1, 1, 1, 2], "generator orders {:?}", gens.orders());
    let d = form(n, &[(c(1), 0, "22"), (c(1), 2, "11"), (c(-1), 1, "12")]);
    ensure!(proportional(&gens.generators[3].rhs_form, &d), "second-order generator differs");
    ensure!(gens.generators.iter().all(|g| cc::verify_cc(&sys, g)), "a generator does not vanish");

    let (rels, _) = cc::syzygies(&sys, &gens, None);
    let want = form(n, &[(c(1), 0, "22"), (c(1), 2, "11"), (c(-1), 1, "12"), (c(-1), 3, "3")]);
    ensure!(rels.len() == 1 && proportional(&rels[0].form, &want), "syzygies {}", rels.len());
    ensure!(cc::apply_syzygy(&gens, &rels[0]).is_empty(), "syzygy does not vanish");

    let h2 = symbol::spencer_cohomology_dim(&sys, 0, 2);
    ensure!(h2 == 1, "H2(g1) = {h2}");

    let seq = cc::sequence_dims(&system::prolong(&sys, 1)).map_err(|e| e.to_string())?;
    ensure!(seq.spencer == vec![3, 9, 9, 3], "spencer {:?}", seq.spencer);
    ensure!(seq.trivial == vec![20, 40, 30, 8], "trivial {:?}", seq.trivial);
    ensure!(seq.janet == vec![17, 31, 21, 5], "janet {:?}", seq.janet);
    ensure!(seq.spencer_sum() == 0 && seq.trivial_sum(2) == 0 && seq.janet_sum(2) == 0, "nonzero alternating sum");
    Ok("dim 3, CC orders 1,1,1,2, one syzygy, H2=1, sequences 3-9-9-3 / 20-40-30-8 / 17-31-21-5".into())
}

fn ex2_2() -> Outcome {
    let sys = load("ex2_2");
    let n = 3;
    let levels = Levels::new(&sys, false);
    let dims: Vec<usize> = (2..=5).map(|l| levels.dim(l)).collect();
    ensure!(dims == vec![8, 12, 15, 17], "dims {dims:?}");

    let pp = pp_procedure(&sys, 16);
    ensure!(pp.chain == vec![(0, 8), (2, 7)], "chain {:?}", pp.chain);
    ensure!(
        has_equation(
            &pp.stable,
            &form(n, &[(c(1), 0, "11")]),
            &form(n, &[(c(1), 0, "33"), (c(-1), 1, "12"), (-x(2), 0, "1")]),
        ),
        "stable system lacks y_11 = u_33 - v_12 - x2 u_1"
    );

    let e = CcEngine::new(&sys);
    let gens = e.generating_cc(None);
    ensure!(gens.complete && gens.orders() == vec![3, 4], "generator orders {:?}", gens.orders());
    let a = form(n, &[(c(1), 0, "233"), (c(-1), 1, "122"), (-x(2), 0, "12"), (c(-2), 0, "1")]);
    ensure!(proportional(&gens.generators[0].rhs_form, &a), "third-order generator differs");
    ensure!(gens.generators.iter().all(|g| cc::verify_cc(&sys, g)), "a generator does not vanish");

    let (rels, _) = cc::syzygies(&sys, &gens, None);
    let want = form(n, &[(c(1), 0, "33"), (-x(2), 0, "1"), (c(-1), 1, "2")]);
    ensure!(rels.len() == 1 && proportional(&rels[0].form, &want), "syzygies {}", rels.len());
    ensure!(cc::apply_syzygy(&gens, &rels[0]).is_empty(), "syzygy does not vanish");

    let q: Vec<usize> = (3..=5).map(|r| cc::cc_dims_with(&e, r).dim_q).collect();
    ensure!(q == vec![1, 5, 13], "dim Q {q:?}");
    let jc = cc::jet_cohomology_with(&e, 3);
    ensure!(jc.h_j == 1 && jc.additive(), "jet cohomology {jc:?}");

    for (level, d) in cc::long_run_dims(&sys, 2, 6) {
        ensure!(d == 2 * (level - 4) + 15, "dim R_{level} = {d}");
    }
    Ok("dims 8,12,15,17, chain 8>7, CC orders 3,4, one syzygy, dim Q 1,5,13, H(J)=1, dim R_{r+4}=2r+15".into())
}

fn ex2_3() -> Outcome {
    let sys = load("ex2_3");
    let n = 3;
    let pp = pp_procedure(&sys, 16);
    ensure!(pp.chain == vec![(0, 8), (2, 7), (4, 6)], "chain {:?}", pp.chain);
    ensure!(pp.stable_dim == 6 && symbol::symbol(&pp.stable, 1).dim() == 0, "stable system not of finite type 6");

    let e = CcEngine::new(&sys);
    let gens = e.generating_cc(None);
    ensure!(gens.complete && gens.orders() == vec![3, 6], "generator orders {:?}", gens.orders());
    let counts: Vec<(i64, usize)> = gens.per_level.iter().map(|l| (l.r, l.new_generators)).collect();
    ensure!(
        counts == vec![(0, 0), (1, 0), (2, 0), (3, 1), (4, 0), (5, 0), (6, 1)],
        "new generators per order {counts:?}"
    );
    let first = &gens.generators[..1];
    ensure!(e.new_generators(4, first).is_empty(), "order 4 is not a gap");
    ensure!(e.new_generators(5, first).len() == 1, "no new condition at order 6");
    ensure!(gens.generators.iter().all(|g| cc::verify_cc(&sys, g)), "a generator does not vanish");

    let (rels, _) = cc::syzygies(&sys, &gens, None);
    let x2 = x(2);
    let want =
        form(n, &[(c(1), 0, "3333"), (c(-2) * x2.clone(), 0, "133"), (x2.clone() * x2, 0, "11"), (c(-1), 1, "2")]);
    ensure!(rels.len() == 1 && proportional(&rels[0].form, &want), "syzygies {}", rels.len());
    ensure!(cc::apply_syzygy(&gens, &rels[0]).is_empty(), "syzygy does not vanish");

    let res = cc::resolution(&sys, None, 6);
    ensure!(res.ranks() == vec![1, 2, 2, 1], "ranks {:?}", res.ranks());
    ensure!(res.operator_orders() == vec![2, 6, 4], "orders {:?}", res.operator_orders());
    ensure!(res.euler_characteristic == 0, "euler characteristic {}", res.euler_characteristic);

    for (level, d) in cc::long_run_dims(&sys, 4, 6) {
        ensure!(d == 18, "dim R_{level} = {d}");
    }
    for (r, want) in [(6, [18, 165, 168, 21]), (4, [18, 84, 70, 4]), (3, [17, 56, 40, 1])] {
        let got = cc::exact_sequence_dims(&e, r);
        ensure!(got == want, "exact sequence r={r}: {got:?}");
    }
    Ok("chain 8>7>6, CC orders 3,6 with gap at 4,5, one syzygy, resolution 1-2-2-1 orders 2,6,4, dim 18".into())
}

fn macaulay() -> Outcome {
    let sys = load("macaulay");
    let n = 3;
    let levels = Levels::new(&sys, false);
    for r in 0..=6 {
        let d = levels.dim(r + 2);
        ensure!(d == 4 * r + 8, "dim R_{} = {d}", r + 2);
    }
    let pp = pp_procedure(&sys, 16);
    ensure!(pp.chain == vec![(0, 8), (1, 7), (2, 6)], "chain {:?}", pp.chain);

    let e = CcEngine::new(&sys);
    let gens = e.generating_cc(None);
    ensure!(gens.complete && gens.orders() == vec![2], "generator orders {:?}", gens.orders());
    let a = form(n, &[(c(1), 1, "13"), (c(-1), 1, "2"), (c(-1), 0, "33")]);
    ensure!(proportional(&gens.generators[0].rhs_form, &a), "generator differs from v_13 - v_2 - u_33");
    ensure!(cc::verify_cc(&sys, &gens.generators[0]), "generator does not vanish");

    // 0 -> g_4 -> R_4 -> R_3 -> h_2 -> F_1 -> 0, first index q + 1
    let conn = cc::connecting_sequence_with(&e, 1);
    ensure!(conn.as_tuple() == (6, 16, 12, 3, 1, 0), "connecting sequence {:?}", conn.as_tuple());
    ensure!(conn.alternating_sum() == 0, "alternating sum {}", conn.alternating_sum());

    for r in 0..=1 {
        let h = cc::jet_cohomology_relative(&e, &gens, r + 2);
        ensure!(h.h_j == 0 && h.h_s == h.h_r && h.h_r > 0, "r={r}: {h:?}");
    }
    Ok("dim R_{r+2}=4r+8 to r=6, chain 8>7>6, one CC v_13-v_2-u_33, sequence 6-16-12-3-1-0, H(J)=0".into())
}

/// Random symbol equations at `level`, integer or linear coefficients.
fn random_forms(rng: &mut ChaCha8Rng, n: usize, m: usize, level: usize, count: usize) -> Vec<Form> {
    let jets: Vec<Jet> =
        (0..m).flat_map(|a| MultiIndex::of_order(n, level).into_iter().map(move |mu| Jet::new(a, mu))).collect();
    (0..count)
        .map(|_| {
            let mut f = Form::new();
            for _ in 0..rng.gen_range(1..=3) {
                let j = jets[rng.gen_range(0..jets.len())];
                let mut k = c(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
                if rng.gen_bool(0.2) {
                    k = &k * &RationalFunction::var(rng.gen_range(0..n));
                }
                f.insert(j, k);
            }
            f
        })
        .collect()
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for trial in 0..100 {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(1..=2);
        let level = rng.gen_range(1..=3);
        let count = rng.gen_range(0..=2);
        let g0 = SymbolSpace::from_equations(n, m, level, random_forms(&mut rng, n, m, level, count));
        let g1 = g0.prolongation();
        let g2 = g1.prolongation();
        let s = rng.gen_range(0..n - 1);
        let first = symbol::delta_matrix(&g2, &g1, s).map_err(|e| e.to_string())?;
        let second = symbol::delta_matrix(&g1, &g0, s + 1).map_err(|e| e.to_string())?;
        ensure!(first.then(&second).iter().all(|r| r.is_empty()), "delta^2 != 0 on pair {trial}");
    }

    for n in 1..=3 {
        for q in 0..=5 {
            let g = SymbolSpace::from_equations(n, 1, q, Vec::new());
            let next = g.prolongation();
            for s in 1..=n {
                ensure!(symbol::cohomology_dim(&g, &next, s) == 0, "de Rham n={n} q={q} s={s}");
            }
        }
    }

    let examples: Vec<(String, PDESystem)> = EXAMPLES.iter().map(|s| (s.to_string(), load(s))).collect();
    for (name, sys) in &examples {
        let e = CcEngine::new(sys);
        for r in 0..=3 {
            ensure!(cc::prolongation_containment(&e, r).contained, "{name} r={r}: containment");
            let h = cc::jet_cohomology_with(&e, r);
            ensure!(h.additive(), "{name} r={r}: {h:?}");
            let conn = cc::connecting_sequence_with(&e, r);
            ensure!(conn.alternating_sum() == 0, "{name} r={r}: {:?}", conn.as_tuple());
        }
    }

    let mut systems = examples;
    for seed in 0..50u64 {
        let file = random_system(seed, 2 + (seed % 2) as usize);
        systems.push((format!("random {seed}"), file.to_system().map_err(|e| e.to_string())?));
    }
    for (name, sys) in &systems {
        for r in 0..=1 {
            let reg = symbol::delta_regularize(sys, r, 7).map_err(|e| format!("{name} r={r}: {e}"))?;
            ensure!(reg.delta_involutive == reg.janet_involutive, "{name} r={r}: delta and Janet disagree");
        }
    }

    let mut relations = 0;
    for name in fixture_names() {
        let sys = load(&name);
        let gens = CcEngine::new(&sys).generating_cc(Some(DEFAULT_MAX_ORDER));
        for g in &gens.generators {
            ensure!(cc::verify_cc(&sys, g), "{name}: condition does not vanish");
            relations += 1;
        }
        if gens.generators.is_empty() {
            continue;
        }
        let (rels, _) = cc::syzygies(&sys, &gens, Some(gens.max_order() + DEFAULT_MAX_ORDER));
        for rel in &rels {
            ensure!(cc::apply_syzygy(&gens, rel).is_empty(), "{name}: syzygy does not vanish");
            relations += 1;
        }
    }
    Ok(format!(
        "100 delta pairs, de Rham n<=3 q<=5, 4 examples r<=3, {} systems agree, {relations} relations vanish",
        systems.len()
    ))
}

fn run_full(path: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ccgen"))
        .args(["full", path.to_str().expect("utf-8 path"), "--seed", "7", "--format", "structured"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.code() == Some(0), "{}: exit {:?}", path.display(), out.status.code());
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let names = fixture_names();
    for name in &names {
        let path = root().join(format!("{name}.sys"));
        let a = run_full(&path)?;
        let b = run_full(&path)?;
        ensure!(!a.is_empty() && a == b, "{name}: outputs differ");
    }
    Ok(format!("{} fixtures byte-identical across runs", names.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("first example", ex2_1),
        ("second example", ex2_2),
        ("third example", ex2_3),
        ("Macaulay example", macaulay),
        ("property suite", properties),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
