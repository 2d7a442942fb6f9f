//! Linear PDE systems in jet coordinates: prolongation, exact solved forms,
//! projection, formal integrability and the prolongation/projection procedure.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::{FieldError, MultiPoly, RationalFunction};
use crate::jet::{self, dim_jet, enumerate_jets, Jet, JetError, JetOrdering, MultiIndex};
use crate::linalg::{self, Row};
use crate::symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("coordinate change matrix is singular")]
    SingularChange,
    #[error("coordinate change matrix must be {n}x{n}")]
    ChangeShape { n: usize },
    #[error("equation refers to unknown component {0}")]
    ComponentOutOfRange(usize),
    #[error("equation refers to source component {0} that is not declared")]
    SourceOutOfRange(usize),
    #[error("jet has {got} variables, system has {n}")]
    VariableCount { got: usize, n: usize },
}

/// Linear form in jet coordinates (`lhs`) equated to a linear form in source
/// jets (`rhs`).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearEquation {
    pub lhs: BTreeMap<Jet, RationalFunction>,
    pub rhs: BTreeMap<Jet, RationalFunction>,
    pub label: Option<String>,
}

fn add_term(map: &mut BTreeMap<Jet, RationalFunction>, jet: Jet, c: RationalFunction) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&jet) {
        Some(v) => {
            let sum = &*v + &c;
            if sum.is_zero() {
                map.remove(&jet);
            } else {
                *v = sum;
            }
        }
        None => {
            map.insert(jet, c);
        }
    }
}

/// `d_i` applied to a linear form `sum a * z_mu`.
pub fn total_derivative_form(form: &BTreeMap<Jet, RationalFunction>, i: usize) -> BTreeMap<Jet, RationalFunction> {
    let mut out = BTreeMap::new();
    for (jet, a) in form {
        add_term(&mut out, jet.raised(i), a.clone());
        add_term(&mut out, *jet, a.partial(i));
    }
    out
}

/// Adds `c * form` into `acc`.
pub fn accumulate_form(
    acc: &mut BTreeMap<Jet, RationalFunction>,
    form: &BTreeMap<Jet, RationalFunction>,
    c: &RationalFunction,
) {
    for (jet, a) in form {
        add_term(acc, *jet, a * c);
    }
}

impl LinearEquation {
    pub fn new(lhs: BTreeMap<Jet, RationalFunction>, rhs: BTreeMap<Jet, RationalFunction>) -> Self {
        let lhs = lhs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let rhs = rhs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        LinearEquation { lhs, rhs, label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Highest derivative order among the lhs jets (0 if the lhs is empty).
    pub fn order(&self) -> usize {
        self.lhs.keys().next().map_or(0, |j| j.order())
    }

    /// Leading lhs jet in the default ordering.
    pub fn leading_jet(&self) -> Option<Jet> {
        self.lhs.keys().next().copied()
    }

    pub fn is_trivial(&self) -> bool {
        self.lhs.is_empty() && self.rhs.is_empty()
    }

    /// Formal total derivative `d_i`, on both sides.
    pub fn total_derivative(&self, i: usize) -> LinearEquation {
        LinearEquation {
            lhs: total_derivative_form(&self.lhs, i),
            rhs: total_derivative_form(&self.rhs, i),
            label: None,
        }
    }

    /// `d_lambda` of this equation.
    pub fn derivative(&self, lambda: &MultiIndex) -> LinearEquation {
        let mut eq = self.clone();
        for p in lambda.positions() {
            eq = eq.total_derivative(p);
        }
        eq.label = None;
        eq
    }

    /// Order-`k` part of the lhs.
    pub fn top_part(&self, k: usize) -> BTreeMap<Jet, RationalFunction> {
        self.lhs.iter().filter(|(j, _)| j.order() == k).map(|(j, c)| (*j, c.clone())).collect()
    }
}

/// A named right-hand side component together with its weight, the order of
/// the equation it was attached to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source {
    pub name: String,
    pub weight: usize,
}

/// A linear system `R_q ⊂ J_q(E)` with right-hand side trackers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PDESystem {
    pub vars: Vec<String>,
    pub unknowns: Vec<String>,
    pub sources: Vec<Source>,
    pub equations: Vec<LinearEquation>,
}

impl PDESystem {
    pub fn new(
        vars: Vec<String>,
        unknowns: Vec<String>,
        sources: Vec<Source>,
        equations: Vec<LinearEquation>,
    ) -> Result<Self, SystemError> {
        jet::check_nvars(vars.len())?;
        let sys = PDESystem { vars, unknowns, sources, equations };
        sys.validate()?;
        Ok(sys)
    }

    /// Builds a system where equation `a` gets its own source `names[a]`
    /// with weight equal to the order of the equation.
    pub fn with_own_sources(
        vars: Vec<String>,
        unknowns: Vec<String>,
        source_names: Vec<String>,
        lhs: Vec<BTreeMap<Jet, RationalFunction>>,
    ) -> Result<Self, SystemError> {
        let n = vars.len();
        let mut sources = Vec::new();
        let mut equations = Vec::new();
        for (a, (form, name)) in lhs.into_iter().zip(source_names).enumerate() {
            let mut rhs = BTreeMap::new();
            rhs.insert(Jet::new(a, MultiIndex::zero(n)), RationalFunction::one());
            let eq = LinearEquation::new(form, rhs);
            sources.push(Source { name, weight: eq.order() });
            equations.push(eq);
        }
        Self::new(vars, unknowns, sources, equations)
    }

    fn validate(&self) -> Result<(), SystemError> {
        let n = self.n();
        for eq in &self.equations {
            for jet in eq.lhs.keys() {
                if jet.comp() >= self.m() {
                    return Err(SystemError::ComponentOutOfRange(jet.comp() + 1));
                }
                if jet.mu.nvars() != n {
                    return Err(SystemError::VariableCount { got: jet.mu.nvars(), n });
                }
            }
            for jet in eq.rhs.keys() {
                if jet.comp() >= self.p() {
                    return Err(SystemError::SourceOutOfRange(jet.comp() + 1));
                }
                if jet.mu.nvars() != n {
                    return Err(SystemError::VariableCount { got: jet.mu.nvars(), n });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn m(&self) -> usize {
        self.unknowns.len()
    }

    pub fn p(&self) -> usize {
        self.sources.len()
    }

    /// Order `q` of the system: highest lhs order over all equations.
    pub fn order(&self) -> usize {
        self.equations.iter().map(|e| e.order()).max().unwrap_or(0)
    }

    pub fn min_order(&self) -> usize {
        self.equations.iter().filter(|e| !e.lhs.is_empty()).map(|e| e.order()).min().unwrap_or(0)
    }

    /// Weight of a source jet: weight of its component plus `|nu|`.
    pub fn source_weight(&self, jet: &Jet) -> usize {
        self.sources[jet.comp()].weight + jet.order()
    }

    /// Same unknowns and sources with a new list of equations.
    pub fn with_equations(&self, equations: Vec<LinearEquation>) -> PDESystem {
        PDESystem { vars: self.vars.clone(), unknowns: self.unknowns.clone(), sources: self.sources.clone(), equations }
    }

    /// Applies the linear change of independent variables `x' = A x`.
    ///
    /// Jets transform by `d/dx_j = sum_i A[i][j] d/dx'_i`; coefficients are
    /// rewritten through `x = A^{-1} x'`. Source jets transform like jets.
    pub fn change_coordinates(&self, a: &[Vec<i64>]) -> Result<PDESystem, SystemError> {
        let n = self.n();
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(SystemError::ChangeShape { n });
        }
        let inv = invert(a).ok_or(SystemError::SingularChange)?;
        let images: Vec<MultiPoly> = (0..n)
            .map(|j| MultiPoly::from_terms((0..n).map(|k| (crate::field::Monomial::var(k), inv[j][k].clone()))))
            .collect();
        // d/dx_j as a linear form in the new derivatives.
        let partials: Vec<MultiPoly> = (0..n)
            .map(|j| {
                MultiPoly::from_terms(
                    (0..n).map(|i| (crate::field::Monomial::var(i), BigRational::from_integer(a[i][j].into()))),
                )
            })
            .collect();
        let mut expansion: HashMap<MultiIndex, Vec<(MultiIndex, BigRational)>> = HashMap::new();
        let mut expand = |mu: &MultiIndex| -> Vec<(MultiIndex, BigRational)> {
            expansion
                .entry(*mu)
                .or_insert_with(|| {
                    let mut prod = MultiPoly::one();
                    for p in mu.positions() {
                        prod = prod.mul(&partials[p]);
                    }
                    prod.terms()
                        .iter()
                        .map(|(m, c)| {
                            let exps: Vec<u8> = (0..n).map(|i| m.exp(i) as u8).collect();
                            (MultiIndex::new(&exps), c.clone())
                        })
                        .collect()
                })
                .clone()
        };
        let mut map_form = |form: &BTreeMap<Jet, RationalFunction>| -> Result<_, SystemError> {
            let mut out = BTreeMap::new();
            for (jet, c) in form {
                let c = c.compose(&images)?;
                for (nu, k) in expand(&jet.mu) {
                    add_term(&mut out, Jet { comp: jet.comp, mu: nu }, c.scale(&k));
                }
            }
            Ok(out)
        };
        let mut equations = Vec::with_capacity(self.equations.len());
        for eq in &self.equations {
            equations.push(LinearEquation {
                lhs: map_form(&eq.lhs)?,
                rhs: map_form(&eq.rhs)?,
                label: eq.label.clone(),
            });
        }
        Ok(self.with_equations(equations))
    }
}

fn invert(a: &[Vec<i64>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.iter().map(|&v| BigRational::from_integer(v.into())).collect();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let d = &m[col][c] * &f;
                    m[r][c] -= d;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Exact solved form of a system at its level.
#[derive(Debug, Clone)]
pub struct SolvedForm {
    /// Highest jet order among the columns.
    pub level: usize,
    pub n: usize,
    pub m: usize,
    /// Autoreduced equations, one per pivot, pivot coefficient 1, sorted by pivot.
    pub pivots: Vec<(Jet, LinearEquation)>,
    pub parametric: Vec<Jet>,
    /// Rows whose lhs vanished; their rhs are compatibility conditions.
    pub cc_rows: Vec<LinearEquation>,
    /// Rows that reduced to `0 = 0`.
    pub identities: usize,
}

impl SolvedForm {
    pub fn dim(&self) -> usize {
        self.parametric.len()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Number of pivot rows of order at most `t`.
    pub fn rows_up_to(&self, t: usize) -> usize {
        self.pivots.iter().filter(|(j, _)| j.order() <= t).count()
    }

    /// `dim pi_t(R)`.
    pub fn projected_dim(&self, t: usize) -> usize {
        dim_jet(self.n, self.m, t) - self.rows_up_to(t)
    }

    pub fn equations(&self) -> Vec<LinearEquation> {
        self.pivots.iter().map(|(_, e)| e.clone()).collect()
    }
}

/// Solves with right-hand side tracking.
pub fn solve(sys: &PDESystem, ord: JetOrdering) -> SolvedForm {
    solve_rows(sys, &sys.equations, sys.order(), ord, true)
}

/// Solves the lhs only; `cc_rows` is empty.
pub fn solve_untracked(sys: &PDESystem, ord: JetOrdering) -> SolvedForm {
    solve_rows(sys, &sys.equations, sys.order(), ord, false)
}

fn solve_rows(
    sys: &PDESystem,
    equations: &[LinearEquation],
    level: usize,
    ord: JetOrdering,
    track_rhs: bool,
) -> SolvedForm {
    let (n, m) = (sys.n(), sys.m());
    let jets = enumerate_jets(n, m, 0, level, ord);
    let index: HashMap<Jet, usize> = jets.iter().enumerate().map(|(k, j)| (*j, k)).collect();
    let mut sources: Vec<Jet> = Vec::new();
    if track_rhs {
        let mut seen: Vec<Jet> = equations.iter().flat_map(|e| e.rhs.keys().copied()).collect();
        seen.sort_by(|a, b| sys.source_weight(b).cmp(&sys.source_weight(a)).then_with(|| ord.cmp(a, b)));
        seen.dedup();
        sources = seen;
    }
    let offset = jets.len();
    let source_index: HashMap<Jet, usize> = sources.iter().enumerate().map(|(k, j)| (*j, offset + k)).collect();
    let rows: Vec<Row> = equations
        .iter()
        .map(|eq| {
            let mut row: Row = eq.lhs.iter().map(|(j, c)| (index[j], c.clone())).collect();
            if track_rhs {
                row.extend(eq.rhs.iter().map(|(j, c)| (source_index[j], -c.clone())));
            }
            row.sort_by_key(|e| e.0);
            row
        })
        .collect();
    let ech = linalg::rref(rows, offset);
    let to_equation = |row: &Row| {
        let mut eq = LinearEquation::default();
        for (col, c) in row {
            if *col < offset {
                eq.lhs.insert(jets[*col], c.clone());
            } else {
                eq.rhs.insert(sources[*col - offset], -c.clone());
            }
        }
        eq
    };
    let pivot_cols: Vec<usize> = ech.pivot_columns().collect();
    let mut is_pivot = vec![false; offset];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let pivots = ech.pivot_rows.iter().map(|r| (jets[r[0].0], to_equation(r))).collect();
    let parametric = (0..offset).filter(|&c| !is_pivot[c]).map(|c| jets[c]).collect();
    let cc_rows = ech.residual.iter().map(to_equation).collect();
    SolvedForm { level, n, m, pivots, parametric, cc_rows, identities: ech.zero_rows }
}

/// All `d_lambda e` with `ord(e) + |lambda| <= level`.
pub fn prolong_to_level(sys: &PDESystem, level: usize) -> PDESystem {
    Prolongator::new(sys).system_at(level)
}

/// `rho_r`: prolongation to order `q + r`.
pub fn prolong(sys: &PDESystem, r: usize) -> PDESystem {
    prolong_to_level(sys, sys.order() + r)
}

/// `pi_t`: the induced system on jets of order at most `t`.
pub fn project(sys: &PDESystem, to_order: usize) -> PDESystem {
    let sf = solve(sys, JetOrdering::default());
    project_solved(sys, &sf, to_order)
}

pub fn project_solved(sys: &PDESystem, sf: &SolvedForm, to_order: usize) -> PDESystem {
    let equations = sf.pivots.iter().filter(|(j, _)| j.order() <= to_order).map(|(_, e)| e.clone()).collect();
    sys.with_equations(equations)
}

/// Memoized total derivatives of the equations of one system.
pub struct Prolongator<'a> {
    sys: &'a PDESystem,
    memo: RefCell<HashMap<(usize, MultiIndex), Rc<LinearEquation>>>,
}

impl<'a> Prolongator<'a> {
    pub fn new(sys: &'a PDESystem) -> Self {
        Prolongator { sys, memo: RefCell::new(HashMap::new()) }
    }

    pub fn derivative(&self, eq: usize, lambda: &MultiIndex) -> Rc<LinearEquation> {
        if let Some(e) = self.memo.borrow().get(&(eq, *lambda)) {
            return e.clone();
        }
        let result = match lambda.last_position() {
            None => Rc::new(self.sys.equations[eq].clone()),
            Some(p) => {
                let parent = self.derivative(eq, &lambda.lowered(p).expect("position occurs"));
                Rc::new(parent.total_derivative(p))
            }
        };
        self.memo.borrow_mut().insert((eq, *lambda), result.clone());
        result
    }

    pub fn equations_at(&self, level: usize) -> Vec<LinearEquation> {
        let n = self.sys.n();
        let mut out = Vec::new();
        for (k, eq) in self.sys.equations.iter().enumerate() {
            let ord = eq.order();
            if ord > level {
                continue;
            }
            for r in 0..=(level - ord) {
                for lambda in MultiIndex::of_order(n, r) {
                    let d = self.derivative(k, &lambda);
                    if !d.is_trivial() {
                        out.push((*d).clone());
                    }
                }
            }
        }
        out
    }

    pub fn system_at(&self, level: usize) -> PDESystem {
        self.sys.with_equations(self.equations_at(level))
    }
}

/// Solved forms of `R_N = rho(sys)` at each level `N`, computed on demand.
pub struct Levels<'a> {
    sys: &'a PDESystem,
    prolongator: Prolongator<'a>,
    track_rhs: bool,
    cache: RefCell<BTreeMap<usize, Rc<SolvedForm>>>,
}

impl<'a> Levels<'a> {
    pub fn new(sys: &'a PDESystem, track_rhs: bool) -> Self {
        Levels { sys, prolongator: Prolongator::new(sys), track_rhs, cache: RefCell::new(BTreeMap::new()) }
    }

    pub fn system(&self) -> &PDESystem {
        self.sys
    }

    pub fn prolongator(&self) -> &Prolongator<'a> {
        &self.prolongator
    }

    pub fn solved(&self, level: usize) -> Rc<SolvedForm> {
        if let Some(sf) = self.cache.borrow().get(&level) {
            return sf.clone();
        }
        let eqs = self.prolongator.equations_at(level);
        let sf = Rc::new(solve_rows(self.sys, &eqs, level, JetOrdering::default(), self.track_rhs));
        self.cache.borrow_mut().insert(level, sf.clone());
        sf
    }

    /// `dim R_N`.
    pub fn dim(&self, level: usize) -> usize {
        self.solved(level).dim()
    }

    /// `dim pi_N(R_{N+s}) = dim R^{(s)}_N`.
    pub fn projected_dim(&self, level: usize, s: usize) -> usize {
        self.solved(level + s).projected_dim(level)
    }

    /// `R^{(s)}_N` as a system.
    pub fn projected(&self, level: usize, s: usize) -> PDESystem {
        project_solved(self.sys, &self.solved(level + s), level)
    }
}

/// Outcome of a formal integrability test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiReport {
    pub fi: bool,
    /// `(r, dim R_{q+r}, dim pi_{q+r}(R_{q+r+1}))` at the first drop.
    pub first_drop: Option<(usize, usize, usize)>,
    /// `dim R_{q+r}` for `r = 0..=depth`.
    pub dims: Vec<usize>,
}

pub fn fi_test(sys: &PDESystem, depth: usize) -> FiReport {
    let levels = Levels::new(sys, false);
    fi_test_levels(&levels, depth)
}

pub fn fi_test_levels(levels: &Levels<'_>, depth: usize) -> FiReport {
    let q = levels.system().order();
    let dims: Vec<usize> = (0..=depth).map(|r| levels.dim(q + r)).collect();
    let mut first_drop = None;
    for r in 0..depth {
        let projected = levels.projected_dim(q + r, 1);
        if projected != dims[r] {
            first_drop = Some((r, dims[r], projected));
            break;
        }
    }
    FiReport { fi: first_drop.is_none(), first_drop, dims }
}

/// Level `N` and projection depth `s` at which `R^{(s)}_N` is certified
/// formally integrable with involutive symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certificate {
    pub level: usize,
    pub s: usize,
}

impl Certificate {
    /// Highest compatibility-condition order that can carry a generator,
    /// counted from the order of the system.
    pub fn cc_order_bound(&self, q: usize) -> usize {
        self.level + self.s + 1 - q
    }

    /// Same bound as a level (source weight).
    pub fn cc_level_bound(&self) -> usize {
        self.level + self.s + 1
    }
}

/// Result of the prolongation/projection procedure.
#[derive(Debug, Clone)]
pub struct PpResult {
    /// `R^{(s)}_q` once it has stabilized (or at the last step tried).
    pub stable: PDESystem,
    pub stable_dim: usize,
    /// `(s, dim R^{(s)}_q)` at every strict drop, starting with `s = 0`.
    pub chain: Vec<(usize, usize)>,
    pub certificate: Option<Certificate>,
    pub complete: bool,
}

/// Searches for `(N, s)` such that `R^{(s)}_N` has involutive symbol and
/// `pi_N(R_{N+s+1}) = R^{(s)}_N`. Each prolongation or projection counts as a step.
pub fn certify(levels: &Levels<'_>, max_steps: usize) -> Option<Certificate> {
    certify_within(levels, max_steps, usize::MAX)
}

/// As [`certify`], giving up once `level + s` exceeds `max_level`.
pub fn certify_within(levels: &Levels<'_>, max_steps: usize, max_level: usize) -> Option<Certificate> {
    let q = levels.system().order();
    let (mut level, mut s) = (q, 0);
    for _ in 0..max_steps {
        if level + s > max_level {
            return None;
        }
        let cur = levels.projected_dim(level, s);
        let next = levels.projected_dim(level, s + 1);
        if next < cur {
            s += 1;
            continue;
        }
        let projected = levels.solved(level + s);
        let g = symbol::SymbolSpace::of_solved(&projected, level);
        if symbol::is_involutive_space(&g) {
            return Some(Certificate { level, s });
        }
        level += 1;
    }
    None
}

pub fn pp_procedure(sys: &PDESystem, max_steps: usize) -> PpResult {
    let levels = Levels::new(sys, true);
    pp_procedure_levels(&levels, max_steps)
}

pub fn pp_procedure_levels(levels: &Levels<'_>, max_steps: usize) -> PpResult {
    let q = levels.system().order();
    let certificate = certify(levels, max_steps);
    let last_s = match certificate {
        Some(c) => c.s + (c.level - q),
        None => max_steps,
    };
    let mut chain: Vec<(usize, usize)> = Vec::new();
    for s in 0..=last_s {
        let d = levels.projected_dim(q, s);
        if chain.last().is_none_or(|&(_, prev)| d < prev) {
            chain.push((s, d));
        }
    }
    let stable = levels.projected(q, last_s);
    let stable_dim = levels.projected_dim(q, last_s);
    PpResult { stable, stable_dim, chain, complete: certificate.is_some(), certificate }
}

/// Spencer operator `(d_i f)^k_mu = d_i f^k_mu - f^k_{mu + 1_i}` for `|mu| <= q`,
/// where `f` assigns values to jets of order up to `q + 1`.
pub fn spencer_operator(
    n: usize,
    q: usize,
    f: &BTreeMap<Jet, RationalFunction>,
) -> BTreeMap<(usize, Jet), RationalFunction> {
    let mut out = BTreeMap::new();
    let zero = RationalFunction::zero();
    for (jet, value) in f {
        if jet.order() > q {
            continue;
        }
        for i in 0..n {
            let next = f.get(&jet.raised(i)).unwrap_or(&zero);
            let v = &value.partial(i) - next;
            out.insert((i, *jet), v);
        }
    }
    out
}
