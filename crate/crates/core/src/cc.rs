//! Compatibility conditions: extraction order by order, generating sets,
//! syzygies, free resolutions and the dimension identities tying them to
//! formal integrability.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use thiserror::Error;

use crate::field::RationalFunction;
use crate::jet::{binomial, dim_jet, dim_sym, Jet, JetOrdering, MultiIndex};
use crate::linalg::{self, Row};
use crate::symbol::{self, SymbolSpace};
use crate::system::{
    self, accumulate_form, certify, certify_within, total_derivative_form, Certificate, Levels, LinearEquation,
    PDESystem, Prolongator, Source,
};

/// Hard cap on the order of compatibility conditions that are searched.
pub const DEFAULT_MAX_ORDER: usize = 10;
/// Steps allowed to the prolongation/projection certificate search.
pub const CERTIFY_STEPS: usize = 16;

pub type Form = BTreeMap<Jet, RationalFunction>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CcError {
    #[error("sequence dimensions need a formally integrable system: {0}")]
    NotFormallyIntegrable(String),
    #[error("sequence dimensions need an involutive symbol at level {0}")]
    NotInvolutive(usize),
}

/// A compatibility condition `sum c_{a,nu} u^a_nu = 0` on the sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CCExpression {
    pub rhs_form: Form,
    /// Highest derivative order `|nu|` present.
    pub order: usize,
    /// Highest source weight present (the jet level it was found at).
    pub level: usize,
    pub label: String,
}

impl CCExpression {
    fn from_form(sys: &PDESystem, form: Form, label: String) -> Self {
        let order = form.keys().map(|j| j.order()).max().unwrap_or(0);
        let level = form.keys().map(|j| sys.source_weight(j)).max().unwrap_or(0);
        CCExpression { rhs_form: form, order, level, label }
    }

    /// Renders as `u_233 - v_122 - x2*u_12 - 2*u_1`.
    pub fn render(&self, sources: &[String], vars: &[String]) -> String {
        render_form(&self.rhs_form, sources, vars)
    }
}

/// Renders a linear form in jets with the given component names.
pub fn render_form(form: &Form, comps: &[String], vars: &[String]) -> String {
    if form.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (jet, c)) in form.iter().enumerate() {
        let name = jet.render(comps);
        let negative = c.constant_value().is_some_and(|v| v < num_rational::BigRational::from_integer(0.into()))
            || (c.is_polynomial()
                && c.numer().num_terms() == 1
                && c.numer().terms()[0].1 < num_rational::BigRational::from_integer(0.into()));
        let abs = if negative { -c.clone() } else { c.clone() };
        let body = if abs.is_one() {
            name
        } else if abs.is_polynomial() && abs.numer().num_terms() == 1 {
            format!("{}*{name}", abs.render(vars))
        } else {
            format!("({})*{name}", abs.render(vars))
        };
        match (k == 0, negative) {
            (true, false) => out.push_str(&body),
            (true, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (false, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (false, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

/// Counts at one level of the search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCount {
    pub level: usize,
    /// `level - q`; negative for levels below the order of a mixed system.
    pub r: i64,
    pub new_generators: usize,
    /// Number of independent compatibility conditions up to this level.
    pub dim_q: usize,
}

#[derive(Debug, Clone)]
pub struct CCGeneratorSet {
    pub generators: Vec<CCExpression>,
    pub per_level: Vec<LevelCount>,
    pub certificate: Option<Certificate>,
    /// Highest level scanned.
    pub scanned_to: usize,
    /// True when the scan reached the certified bound.
    pub complete: bool,
    /// Rows that reduced to `0 = 0`, summed over the scanned levels.
    pub identities: usize,
}

impl CCGeneratorSet {
    pub fn orders(&self) -> Vec<usize> {
        self.generators.iter().map(|g| g.order).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.label.clone()).collect()
    }

    pub fn max_order(&self) -> usize {
        self.orders().into_iter().max().unwrap_or(0)
    }
}

/// A relation `sum c_{k,lambda} d_lambda G_k = 0` among generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyzygyRelation {
    /// Keyed by jets whose component indexes the generator list.
    pub form: Form,
    pub labels: Vec<String>,
    pub order: usize,
}

impl SyzygyRelation {
    /// Coefficients keyed by `(generator label, multi-index)`.
    pub fn coefficients(&self) -> BTreeMap<(String, MultiIndex), RationalFunction> {
        self.form.iter().map(|(j, c)| ((self.labels[j.comp()].clone(), j.mu), c.clone())).collect()
    }

    pub fn render(&self, vars: &[String]) -> String {
        render_form(&self.form, &self.labels, vars)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionStep {
    pub rank: usize,
    /// Order of the operator leaving this module (none for the last one).
    pub operator_order: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ResolutionReport {
    pub steps: Vec<ResolutionStep>,
    pub euler_characteristic: i64,
    pub differential_rank: i64,
    /// Differential rank read off the Hilbert function of the certified system.
    pub differential_rank_from_growth: Option<i64>,
    pub complete: bool,
    pub generator_sets: Vec<CCGeneratorSet>,
}

impl ResolutionReport {
    pub fn ranks(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.rank).collect()
    }

    pub fn operator_orders(&self) -> Vec<usize> {
        self.steps.iter().filter_map(|s| s.operator_order).collect()
    }
}

fn generator_label(k: usize) -> String {
    if k < 26 {
        ((b'A' + k as u8) as char).to_string()
    } else {
        format!("G{}", k + 1)
    }
}

/// Source jets sorted so that higher weight comes first, then jet priority.
fn source_order(sys: &PDESystem) -> impl Fn(&Jet, &Jet) -> std::cmp::Ordering + '_ {
    move |a, b| sys.source_weight(b).cmp(&sys.source_weight(a)).then_with(|| JetOrdering::default().cmp(a, b))
}

struct FormSpace {
    columns: Vec<Jet>,
    index: HashMap<Jet, usize>,
}

impl FormSpace {
    fn new<'a>(sys: &PDESystem, forms: impl IntoIterator<Item = &'a Form>) -> Self {
        let mut columns: Vec<Jet> = forms.into_iter().flat_map(|f| f.keys().copied()).collect();
        columns.sort_by(source_order(sys));
        columns.dedup();
        let index = columns.iter().enumerate().map(|(k, j)| (*j, k)).collect();
        FormSpace { columns, index }
    }

    fn row(&self, form: &Form) -> Row {
        let mut r: Row = form.iter().map(|(j, c)| (self.index[j], c.clone())).collect();
        r.sort_by_key(|e| e.0);
        r
    }

    fn form(&self, row: &Row) -> Form {
        row.iter().map(|(c, v)| (self.columns[*c], v.clone())).collect()
    }
}

/// Reduces `row` modulo fully reduced echelon rows.
fn reduce(row: &Row, basis: &[Row]) -> Row {
    let mut r = row.clone();
    for b in basis {
        let col = b[0].0;
        if let Ok(k) = r.binary_search_by_key(&col, |e| e.0) {
            let f = r[k].1.clone();
            r = linalg::sub_scaled(&r, &f, b);
        }
    }
    r
}

/// Shared state of a compatibility-condition analysis of one system.
pub struct CcEngine<'a> {
    sys: &'a PDESystem,
    levels: Levels<'a>,
    derivatives: RefCell<HashMap<(usize, MultiIndex), Rc<Form>>>,
}

impl<'a> CcEngine<'a> {
    pub fn new(sys: &'a PDESystem) -> Self {
        CcEngine { sys, levels: Levels::new(sys, true), derivatives: RefCell::new(HashMap::new()) }
    }

    pub fn system(&self) -> &PDESystem {
        self.sys
    }

    pub fn levels(&self) -> &Levels<'a> {
        &self.levels
    }

    pub fn q(&self) -> usize {
        self.sys.order()
    }

    /// Basis of all compatibility conditions among source jets of weight at
    /// most `level`, in reduced echelon form.
    pub fn cc_at_level(&self, level: usize) -> Vec<Form> {
        self.levels.solved(level).cc_rows.iter().map(|e| e.rhs.clone()).filter(|f| !f.is_empty()).collect()
    }

    /// `cc_at_order` in the order convention `r = level - q`.
    pub fn cc_at_order(&self, r: usize) -> Vec<CCExpression> {
        let level = self.q() + r;
        self.cc_at_level(level)
            .into_iter()
            .enumerate()
            .map(|(k, f)| CCExpression::from_form(self.sys, f, format!("Q{r}.{}", k + 1)))
            .collect()
    }

    /// Number of source jets of weight at most `level`.
    pub fn source_jets_up_to(&self, level: usize) -> usize {
        let n = self.sys.n();
        self.sys.sources.iter().filter(|s| s.weight <= level).map(|s| dim_jet(n, 1, level - s.weight)).sum()
    }

    /// Number of source jets of weight exactly `level`.
    pub fn source_jets_at(&self, level: usize) -> usize {
        let n = self.sys.n();
        self.sys.sources.iter().filter(|s| s.weight <= level).map(|s| dim_sym(n, 1, level - s.weight)).sum()
    }

    fn derivative_of(&self, gens: &[CCExpression], k: usize, lambda: &MultiIndex) -> Rc<Form> {
        if let Some(f) = self.derivatives.borrow().get(&(k, *lambda)) {
            return f.clone();
        }
        let f = match lambda.last_position() {
            None => Rc::new(gens[k].rhs_form.clone()),
            Some(p) => {
                let parent = self.derivative_of(gens, k, &lambda.lowered(p).expect("occurs"));
                Rc::new(total_derivative_form(&parent, p))
            }
        };
        self.derivatives.borrow_mut().insert((k, *lambda), f.clone());
        f
    }

    /// All `d_lambda G` with weight at most `level`.
    fn prolonged_generators(&self, gens: &[CCExpression], level: usize) -> Vec<Rc<Form>> {
        let n = self.sys.n();
        let mut out = Vec::new();
        for (k, g) in gens.iter().enumerate() {
            if g.level > level {
                continue;
            }
            for r in 0..=(level - g.level) {
                for lambda in MultiIndex::of_order(n, r) {
                    out.push(self.derivative_of(gens, k, &lambda));
                }
            }
        }
        out
    }

    /// Complement of the prolongations of `known` inside the conditions at `level`.
    pub fn new_generators_at(&self, level: usize, known: &[CCExpression]) -> Vec<Form> {
        let cc = self.cc_at_level(level);
        if cc.is_empty() {
            return Vec::new();
        }
        let prolonged = self.prolonged_generators(known, level);
        let space = FormSpace::new(self.sys, cc.iter().chain(prolonged.iter().map(|f| f.as_ref())));
        let span = linalg::rref(prolonged.iter().map(|f| space.row(f)).collect(), usize::MAX).pivot_rows;
        let residues: Vec<Row> = cc.iter().map(|f| reduce(&space.row(f), &span)).collect();
        linalg::rref(residues, usize::MAX).pivot_rows.iter().map(|r| space.form(r)).collect()
    }

    /// `new_generators(sys, r, known)`: generators first appearing at order `r + 1`.
    pub fn new_generators(&self, r: usize, known: &[CCExpression]) -> Vec<CCExpression> {
        let level = self.q() + r + 1;
        self.new_generators_at(level, known)
            .into_iter()
            .enumerate()
            .map(|(k, f)| CCExpression::from_form(self.sys, f, generator_label(known.len() + k)))
            .collect()
    }

    /// Rank of the span of the given forms.
    pub fn span_rank<'f>(&self, forms: impl IntoIterator<Item = &'f Form>) -> usize {
        let forms: Vec<&Form> = forms.into_iter().collect();
        let space = FormSpace::new(self.sys, forms.iter().copied());
        linalg::rank(forms.iter().map(|f| space.row(f)).collect())
    }

    pub fn certificate(&self, max_level: usize) -> Option<Certificate> {
        let q = self.q();
        let steps = CERTIFY_STEPS.min(2 * (max_level.saturating_sub(q) + 1));
        certify_within(&self.levels, steps, max_level)
    }

    pub fn generating_cc(&self, max_order: Option<usize>) -> CCGeneratorSet {
        let q = self.q();
        let cap_level = q + max_order.unwrap_or(DEFAULT_MAX_ORDER);
        let certificate = self.certificate(cap_level);
        let bound = certificate.map(|c| c.cc_level_bound());
        let last = bound.map_or(cap_level, |b| b.min(cap_level));
        let mut generators: Vec<CCExpression> = Vec::new();
        let mut per_level = Vec::new();
        let mut identities = 0;
        let first = self.sys.min_order();
        for level in first..=last {
            let new = self.new_generators_at(level, &generators);
            let count = new.len();
            for form in new {
                let label = generator_label(generators.len());
                generators.push(CCExpression::from_form(self.sys, form, label));
            }
            let sf = self.levels.solved(level);
            identities += sf.identities;
            per_level.push(LevelCount {
                level,
                r: level as i64 - q as i64,
                new_generators: count,
                dim_q: self.cc_at_level(level).len(),
            });
        }
        let complete = bound.is_some_and(|b| b <= cap_level);
        CCGeneratorSet { generators, per_level, certificate, scanned_to: last, complete, identities }
    }

    /// Substitutes each source jet by the matching derivative of its equation's lhs.
    pub fn substitute(&self, form: &Form) -> Form {
        let owners = source_owners(self.sys);
        let prolongator = self.levels.prolongator();
        let mut acc = Form::new();
        for (jet, c) in form {
            let eq = owners[&jet.comp()];
            let d = prolongator.derivative(eq, &jet.mu);
            accumulate_form(&mut acc, &d.lhs, c);
        }
        acc
    }
}

/// Equation index carrying each source as its own right-hand side.
fn source_owners(sys: &PDESystem) -> HashMap<usize, usize> {
    let mut out = HashMap::new();
    for (k, eq) in sys.equations.iter().enumerate() {
        if eq.rhs.len() == 1 {
            let (jet, c) = eq.rhs.iter().next().expect("one entry");
            if jet.order() == 0 && c.is_one() {
                out.entry(jet.comp()).or_insert(k);
            }
        }
    }
    out
}

pub fn cc_at_order(sys: &PDESystem, r: usize) -> Vec<CCExpression> {
    CcEngine::new(sys).cc_at_order(r)
}

pub fn new_generators(sys: &PDESystem, r: usize, known: &[CCExpression]) -> Vec<CCExpression> {
    CcEngine::new(sys).new_generators(r, known)
}

pub fn generating_cc(sys: &PDESystem, max_order: Option<usize>) -> CCGeneratorSet {
    CcEngine::new(sys).generating_cc(max_order)
}

/// `dim B_r` and `dim Q_r` at level `q + r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CcDims {
    pub dim_b: usize,
    pub dim_q: usize,
}

pub fn cc_dims(sys: &PDESystem, r: usize) -> CcDims {
    let engine = CcEngine::new(sys);
    cc_dims_with(&engine, r)
}

pub fn cc_dims_with(engine: &CcEngine<'_>, r: usize) -> CcDims {
    let sys = engine.system();
    let level = engine.q() + r;
    let dim_b = dim_jet(sys.n(), sys.m(), level) - engine.levels().dim(level);
    let dim_q = engine.source_jets_up_to(level) - dim_b;
    CcDims { dim_b, dim_q }
}

/// Verifies that a condition vanishes identically once the sources are
/// replaced by the operator applied to the unknowns.
pub fn verify_cc(sys: &PDESystem, cc: &CCExpression) -> bool {
    CcEngine::new(sys).substitute(&cc.rhs_form).is_empty()
}

/// The generators viewed as an operator on the sources: unknowns are the
/// sources of `sys`, each generator becomes an equation with its own source.
pub fn generator_system(sys: &PDESystem, gens: &CCGeneratorSet) -> PDESystem {
    let n = sys.n();
    let mut sources = Vec::new();
    let mut equations = Vec::new();
    for (k, g) in gens.generators.iter().enumerate() {
        let mut rhs = Form::new();
        rhs.insert(Jet::new(k, MultiIndex::zero(n)), RationalFunction::one());
        equations.push(LinearEquation { lhs: g.rhs_form.clone(), rhs, label: Some(g.label.clone()) });
        sources.push(Source { name: g.label.clone(), weight: g.order });
    }
    PDESystem {
        vars: sys.vars.clone(),
        unknowns: sys.sources.iter().map(|s| s.name.clone()).collect(),
        sources,
        equations,
    }
}

/// Relations among generators, found as the generating conditions of the
/// generator operator.
pub fn syzygies(
    sys: &PDESystem,
    gens: &CCGeneratorSet,
    max_order: Option<usize>,
) -> (Vec<SyzygyRelation>, CCGeneratorSet) {
    let derived = generator_system(sys, gens);
    let search = max_order.unwrap_or(gens.max_order() + 4);
    let relations = generating_cc(&derived, Some(search));
    let labels = gens.labels();
    let out = relations
        .generators
        .iter()
        .map(|g| SyzygyRelation { form: g.rhs_form.clone(), labels: labels.clone(), order: g.order })
        .collect();
    (out, relations)
}

/// Applies a relation to the generators; the result must vanish.
pub fn apply_syzygy(gens: &CCGeneratorSet, rel: &SyzygyRelation) -> Form {
    let mut acc = Form::new();
    for (jet, c) in &rel.form {
        let mut f = gens.generators[jet.comp()].rhs_form.clone();
        for p in jet.mu.positions() {
            f = total_derivative_form(&f, p);
        }
        accumulate_form(&mut acc, &f, c);
    }
    acc
}

/// Free resolution by repeated generating conditions.
pub fn resolution(sys: &PDESystem, max_order: Option<usize>, max_stages: usize) -> ResolutionReport {
    let mut steps = vec![ResolutionStep { rank: sys.m(), operator_order: Some(sys.order()) }];
    let mut generator_sets = Vec::new();
    let mut current = sys.clone();
    let mut complete = true;
    let mut rank = sys.p();
    for _ in 0..max_stages {
        let gens = generating_cc(&current, max_order);
        complete &= gens.complete;
        if gens.generators.is_empty() {
            steps.push(ResolutionStep { rank, operator_order: None });
            generator_sets.push(gens);
            break;
        }
        steps.push(ResolutionStep { rank, operator_order: Some(gens.max_order()) });
        rank = gens.generators.len();
        let next = generator_system(&current, &gens);
        generator_sets.push(gens);
        current = next;
    }
    if steps.last().is_some_and(|s| s.operator_order.is_some()) {
        complete = false;
        steps.push(ResolutionStep { rank, operator_order: None });
    }
    let euler: i64 =
        steps.iter().enumerate().map(|(k, s)| if k % 2 == 0 { s.rank as i64 } else { -(s.rank as i64) }).sum();
    ResolutionReport {
        steps,
        euler_characteristic: euler,
        differential_rank: euler,
        differential_rank_from_growth: differential_rank_from_growth(sys),
        complete,
        generator_sets,
    }
}

/// `Δ^{n-1}` of the prolonged symbol dimensions of the certified involutive
/// system, which equals the differential rank.
pub fn differential_rank_from_growth(sys: &PDESystem) -> Option<i64> {
    let levels = Levels::new(sys, false);
    let cert = certify(&levels, CERTIFY_STEPS)?;
    let sf = levels.solved(cert.level + cert.s);
    let mut g = SymbolSpace::of_solved(&sf, cert.level);
    let n = sys.n();
    if n == 0 {
        return Some(sf.projected_dim(cert.level) as i64);
    }
    let mut dims = vec![g.dim() as i64];
    for _ in 1..n {
        g = g.prolongation();
        dims.push(g.dim() as i64);
    }
    for _ in 1..n {
        dims = dims.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Some(dims[0])
}

/// Dimensions of `0 → g_{q+r+1} → R_{q+r+1} → R_{q+r} → h_{r+1} → Q_{r+1} → Q_r → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnectingDims {
    pub g: usize,
    pub r_next: usize,
    pub r_cur: usize,
    pub h: usize,
    pub q_next: usize,
    pub q_cur: usize,
}

impl ConnectingDims {
    pub fn as_tuple(&self) -> (usize, usize, usize, usize, usize, usize) {
        (self.g, self.r_next, self.r_cur, self.h, self.q_next, self.q_cur)
    }

    pub fn alternating_sum(&self) -> i64 {
        self.g as i64 - self.r_next as i64 + self.r_cur as i64 - self.h as i64 + self.q_next as i64 - self.q_cur as i64
    }
}

pub fn connecting_sequence_dims(sys: &PDESystem, r: usize) -> ConnectingDims {
    connecting_sequence_with(&CcEngine::new(sys), r)
}

pub fn connecting_sequence_with(engine: &CcEngine<'_>, r: usize) -> ConnectingDims {
    let sys = engine.system();
    let level = engine.q() + r;
    let levels = engine.levels();
    let g = SymbolSpace::of_solved(&levels.solved(level + 1), level + 1).dim();
    let rank_sigma = dim_sym(sys.n(), sys.m(), level + 1) - g;
    let h = engine.source_jets_at(level + 1) - rank_sigma;
    ConnectingDims {
        g,
        r_next: levels.dim(level + 1),
        r_cur: levels.dim(level),
        h,
        q_next: cc_dims_with(engine, r + 1).dim_q,
        q_cur: cc_dims_with(engine, r).dim_q,
    }
}

/// Cohomology dimensions at the jet, symbol and solution levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JetCohomology {
    pub h_r: usize,
    pub h_s: usize,
    pub h_j: usize,
}

impl JetCohomology {
    pub fn additive(&self) -> bool {
        self.h_s == self.h_r + self.h_j
    }
}

/// Cohomology at level `level` of `J(E) → J(F0) → ...` where the next map is
/// given by all total derivatives, up to that level, of `relations`.
fn jet_cohomology_at(engine: &CcEngine<'_>, relations: &[Form], level: usize) -> JetCohomology {
    let sys = engine.system();
    let n = sys.n();
    let levels = engine.levels();
    let mut prolonged: Vec<Form> = Vec::new();
    let mut top: Vec<Form> = Vec::new();
    for rel in relations {
        let w = rel.keys().map(|j| sys.source_weight(j)).max().unwrap_or(0);
        if w > level {
            continue;
        }
        for k in 0..=(level - w) {
            for lambda in MultiIndex::of_order(n, k) {
                let mut f = rel.clone();
                for p in lambda.positions() {
                    f = total_derivative_form(&f, p);
                }
                let t: Form =
                    f.iter().filter(|(j, _)| sys.source_weight(j) == level).map(|(j, c)| (*j, c.clone())).collect();
                if !t.is_empty() {
                    top.push(t);
                }
                prolonged.push(f);
            }
        }
    }
    let q_level = engine.cc_at_level(level).len();
    let h_j = q_level - engine.span_rank(prolonged.iter());
    let g = SymbolSpace::of_solved(&levels.solved(level), level).dim();
    let rank_sigma = dim_sym(n, sys.m(), level) - g;
    let kernel = engine.source_jets_at(level) - engine.span_rank(top.iter());
    let h_s = kernel - rank_sigma;
    let h_r = levels.dim(level - 1) - levels.projected_dim(level - 1, 1);
    JetCohomology { h_r, h_s, h_j }
}

/// `H(R_{q+r})`, `H(S_{r+1}(F0))`, `H(J_{r+1}(F0))` with the next map given by
/// the first prolongation of all conditions of order `r`.
pub fn jet_cohomology_dims(sys: &PDESystem, r: usize) -> JetCohomology {
    let engine = CcEngine::new(sys);
    jet_cohomology_with(&engine, r)
}

pub fn jet_cohomology_with(engine: &CcEngine<'_>, r: usize) -> JetCohomology {
    let level = engine.q() + r;
    let relations = engine.cc_at_level(level);
    jet_cohomology_at(engine, &relations, level + 1)
}

/// Same cohomology with the next map given by the generating operator:
/// `H(R_{q+r-1})`, `H(S_r(F0))`, `H(J_r(F0))`.
pub fn jet_cohomology_relative(engine: &CcEngine<'_>, gens: &CCGeneratorSet, r: usize) -> JetCohomology {
    let relations: Vec<Form> = gens.generators.iter().map(|g| g.rhs_form.clone()).collect();
    jet_cohomology_at(engine, &relations, engine.q() + r)
}

/// `0 → R_{q+r} → J_{q+r}(E) → J_r(F0) → Q_r → 0`.
pub fn exact_sequence_dims(engine: &CcEngine<'_>, r: usize) -> [usize; 4] {
    let sys = engine.system();
    let level = engine.q() + r;
    [
        engine.levels().dim(level),
        dim_jet(sys.n(), sys.m(), level),
        engine.source_jets_up_to(level),
        cc_dims_with(engine, r).dim_q,
    ]
}

/// Dimensions of the Spencer, trivial Spencer and Janet bundles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceDims {
    pub spencer: Vec<usize>,
    pub trivial: Vec<usize>,
    pub janet: Vec<usize>,
}

impl SequenceDims {
    fn alternating(v: &[usize]) -> i64 {
        v.iter().enumerate().map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }

    pub fn spencer_sum(&self) -> i64 {
        Self::alternating(&self.spencer)
    }

    /// `m - C_0(E) + C_1(E) - ...`.
    pub fn trivial_sum(&self, m: usize) -> i64 {
        m as i64 - Self::alternating(&self.trivial)
    }

    /// `m - F_0 + F_1 - ...`.
    pub fn janet_sum(&self, m: usize) -> i64 {
        m as i64 - Self::alternating(&self.janet)
    }
}

pub fn sequence_dims(sys: &PDESystem) -> Result<SequenceDims, CcError> {
    let fi = system::fi_test(sys, 3);
    if !fi.fi {
        let (r, a, b) = fi.first_drop.expect("not FI");
        return Err(CcError::NotFormallyIntegrable(format!("projection at r = {r} drops dimension from {a} to {b}")));
    }
    let q = sys.order();
    let levels = Levels::new(sys, false);
    let g = symbol::symbol_levels(&levels, 0);
    if !symbol::is_involutive_space(&g) {
        return Err(CcError::NotInvolutive(q));
    }
    let (n, m) = (sys.n(), sys.m());
    let dim_r = levels.dim(q);
    let g_next = g.prolongation();
    let full_next = SymbolSpace::from_equations(n, m, q + 1, Vec::new());
    let mut spencer = Vec::new();
    let mut trivial = Vec::new();
    for r in 0..=n {
        let (im, im_full) =
            if r == 0 { (0, 0) } else { (symbol::delta_rank(&g_next, r - 1), symbol::delta_rank(&full_next, r - 1)) };
        spencer.push(binomial(n, r) * dim_r - im);
        trivial.push(binomial(n, r) * dim_jet(n, m, q) - im_full);
    }
    let janet = trivial.iter().zip(&spencer).map(|(t, s)| t - s).collect();
    Ok(SequenceDims { spencer, trivial, janet })
}

/// `dim R_{q+r}` for `r` in `r_lo..=r_hi`.
pub fn long_run_dims(sys: &PDESystem, r_lo: usize, r_hi: usize) -> Vec<(usize, usize)> {
    let levels = Levels::new(sys, false);
    let q = sys.order();
    (r_lo..=r_hi).map(|r| (q + r, levels.dim(q + r))).collect()
}

/// Convenience: the equations of `sys` rewritten through their prolongations.
pub fn prolongator(sys: &PDESystem) -> Prolongator<'_> {
    Prolongator::new(sys)
}

/// How the conditions at level `q + r + 1` sit over the first prolongation
/// of those at level `q + r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Containment {
    pub contained: bool,
    /// `dim Q_{r+1}` minus the rank of the prolonged conditions.
    pub gap: usize,
}

pub fn prolongation_containment(engine: &CcEngine<'_>, r: usize) -> Containment {
    let level = engine.q() + r;
    let lower = engine.cc_at_level(level);
    let upper = engine.cc_at_level(level + 1);
    let n = engine.system().n();
    let mut prolonged = lower.clone();
    for f in &lower {
        for i in 0..n {
            prolonged.push(total_derivative_form(f, i));
        }
    }
    let rank_p = engine.span_rank(prolonged.iter());
    let rank_u = engine.span_rank(upper.iter());
    let rank_all = engine.span_rank(upper.iter().chain(prolonged.iter()));
    Containment { contained: rank_all == rank_u, gap: rank_u.saturating_sub(rank_p) }
}
