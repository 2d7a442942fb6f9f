#![allow(dead_code)]

use std::collections::BTreeMap;

use ccgen_core::field::RationalFunction;
use ccgen_core::jet::{Jet, MultiIndex};
use ccgen_core::system::PDESystem;

pub type Form = BTreeMap<Jet, RationalFunction>;

pub fn c(v: i64) -> RationalFunction {
    RationalFunction::from_int(v)
}

/// `x_i` with 1-based index.
pub fn x(i: usize) -> RationalFunction {
    RationalFunction::var(i - 1)
}

pub fn idx(n: usize, digits: &str) -> MultiIndex {
    Jet::parse_suffix(n, digits).unwrap()
}

pub fn jet(n: usize, comp: usize, digits: &str) -> Jet {
    Jet::new(comp, idx(n, digits))
}

/// Linear form from `(coefficient, component, suffix)` triples.
pub fn form(n: usize, terms: &[(RationalFunction, usize, &str)]) -> Form {
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

fn names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn ex2_1() -> PDESystem {
    let n = 3;
    PDESystem::with_own_sources(
        names("x", 3),
        strs(&["xi1", "xi2"]),
        strs(&["Phi1", "Phi2", "Phi3", "Phi4", "Phi5"]),
        vec![
            form(n, &[(c(1), 0, "1")]),
            form(n, &[(c(1), 0, "2"), (c(1), 1, "1")]),
            form(n, &[(c(1), 1, "2")]),
            form(n, &[(c(1), 0, "3")]),
            form(n, &[(c(1), 1, "3")]),
        ],
    )
    .unwrap()
}

/// `y_33 - x2 y_1 = v`, `y_12 = u` with sources ordered `(u, v)`.
pub fn ex2_2() -> PDESystem {
    two_equation(form(3, &[(c(1), 0, "12")]), form(3, &[(c(1), 0, "33"), (-x(2), 0, "1")]))
}

/// `y_33 - x2 y_1 = v`, `y_22 = u`.
pub fn ex2_3() -> PDESystem {
    two_equation(form(3, &[(c(1), 0, "22")]), form(3, &[(c(1), 0, "33"), (-x(2), 0, "1")]))
}

/// `y_33 = v`, `y_13 - y_2 = u`.
pub fn macaulay() -> PDESystem {
    two_equation(form(3, &[(c(1), 0, "13"), (c(-1), 0, "2")]), form(3, &[(c(1), 0, "33")]))
}

fn two_equation(u: Form, v: Form) -> PDESystem {
    PDESystem::with_own_sources(names("x", 3), strs(&["y"]), strs(&["u", "v"]), vec![u, v]).unwrap()
}

pub mod oracle {
    //! Independent dense computations at a rational point.

    use std::collections::{BTreeMap, BTreeSet};

    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    use ccgen_core::field::RationalFunction;
    use ccgen_core::jet::{Jet, MultiIndex};
    use ccgen_core::system::PDESystem;

    use super::Form;

    pub fn point(n: usize) -> Vec<BigRational> {
        let primes = [(3, 7), (5, 11), (13, 17), (19, 23), (29, 31), (37, 41)];
        (0..n).map(|i| BigRational::new(BigInt::from(primes[i].0), BigInt::from(primes[i].1))).collect()
    }

    /// Dense rank over the rationals.
    pub fn dense_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for col in 0..ncols {
            let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
            rows.swap(rank, p);
            let inv = BigRational::one() / rows[rank][col].clone();
            let pivot: Vec<BigRational> = rows[rank].iter().map(|v| v * &inv).collect();
            for r in 0..rows.len() {
                if r != rank && !rows[r][col].is_zero() {
                    let f = rows[r][col].clone();
                    for c in col..ncols {
                        let d = &f * &pivot[c];
                        rows[r][c] -= d;
                    }
                }
            }
            rows[rank] = pivot;
            rank += 1;
        }
        rank
    }

    /// Rank of sparse forms over an arbitrary key set, evaluated at `point`.
    pub fn rank_at<K: Ord + Clone>(forms: &[BTreeMap<K, RationalFunction>], point: &[BigRational]) -> usize {
        let keys: BTreeSet<K> = forms.iter().flat_map(|f| f.keys().cloned()).collect();
        let keys: Vec<K> = keys.into_iter().collect();
        let rows = forms
            .iter()
            .map(|f| {
                keys.iter()
                    .map(|k| f.get(k).map_or_else(BigRational::zero, |c| c.eval(point).expect("regular point")))
                    .collect()
            })
            .collect();
        dense_rank(rows)
    }

    /// `d_i` of a linear form in jets.
    pub fn derive(f: &Form, i: usize) -> Form {
        let mut out = Form::new();
        let mut add = |j: Jet, c: RationalFunction| {
            let v = out.remove(&j).map_or(c.clone(), |p| p + c);
            if !v.is_zero() {
                out.insert(j, v);
            }
        };
        for (j, c) in f {
            let dc = c.partial(i);
            if !dc.is_zero() {
                add(*j, dc);
            }
            add(Jet::new(j.comp(), j.mu.raised(i)), c.clone());
        }
        out
    }

    /// All `d_lambda lhs` of order at most `level`, built from scratch.
    pub fn prolonged_lhs(sys: &PDESystem, level: usize) -> Vec<Form> {
        let n = sys.n();
        let mut out = Vec::new();
        for eq in &sys.equations {
            let q = eq.lhs.keys().map(|j| j.order()).max().unwrap_or(0);
            if q > level {
                continue;
            }
            let mut layer = vec![eq.lhs.clone()];
            let mut seen: BTreeSet<MultiIndex> = BTreeSet::new();
            let mut frontier = vec![MultiIndex::zero(n)];
            out.push(eq.lhs.clone());
            for _ in q..level {
                let mut next_layer = Vec::new();
                let mut next_frontier = Vec::new();
                for (f, mu) in layer.iter().zip(&frontier) {
                    for i in 0..n {
                        let nu = mu.raised(i);
                        if seen.insert(nu) {
                            let g = derive(f, i);
                            out.push(g.clone());
                            next_layer.push(g);
                            next_frontier.push(nu);
                        }
                    }
                }
                layer = next_layer;
                frontier = next_frontier;
            }
        }
        out
    }

    /// `dim R_level` by dense elimination at `point`.
    pub fn dim_r(sys: &PDESystem, level: usize) -> usize {
        let n = sys.n();
        let total = ccgen_core::jet::dim_jet(n, sys.m(), level);
        total - rank_at(&prolonged_lhs(sys, level), &point(n))
    }

    /// `dim g_level`: kernel of the top-order parts of the prolonged equations.
    pub fn dim_g(sys: &PDESystem, level: usize) -> usize {
        let n = sys.n();
        let tops: Vec<Form> = prolonged_lhs(sys, level)
            .into_iter()
            .map(|f| f.into_iter().filter(|(j, _)| j.order() == level).collect::<Form>())
            .filter(|f| !f.is_empty())
            .collect();
        ccgen_core::jet::dim_sym(n, sys.m(), level) - rank_at(&tops, &point(n))
    }

    /// `dim R^{(s)}_level = rank of the projection of R_{level+s}`, via
    /// `dim R_{level+s} - dim of the kernel of the projection`.
    pub fn projected_dim(sys: &PDESystem, level: usize, s: usize) -> usize {
        let n = sys.n();
        let eqs = prolonged_lhs(sys, level + s);
        let pt = point(n);
        // rank of the equations restricted to high jets equals the rank of eqs minus
        // the rank of the combinations that only involve jets of order <= level.
        let full = rank_at(&eqs, &pt);
        let high: Vec<Form> = eqs
            .iter()
            .map(|f| f.iter().filter(|(j, _)| j.order() > level).map(|(j, c)| (*j, c.clone())).collect())
            .collect();
        let high_rank = rank_at(&high, &pt);
        ccgen_core::jet::dim_jet(n, sys.m(), level) - (full - high_rank)
    }
}
