//! Symbols, the Spencer δ-map and its cohomology, Janet tabulars and
//! δ-regular coordinate changes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::RationalFunction;
use crate::jet::{binomial, dim_sym, Jet, JetOrdering, MultiIndex};
use crate::linalg::{self, Row};
use crate::system::{Levels, PDESystem, SolvedForm, SystemError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("δ needs consecutive levels, got {hi} over {lo}")]
    LevelMismatch { hi: usize, lo: usize },
    #[error("form degree {s} out of range for {n} variables")]
    DegreeOutOfRange { s: usize, n: usize },
    #[error("the image of δ leaves the target symbol")]
    NotContained,
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(
        "no δ-regular coordinates found after {attempts} attempts \
         (δ verdict: involutive = {delta}; last Janet verdict: involutive = {janet})"
    )]
    RetryCapExceeded { attempts: usize, delta: bool, janet: bool },
}

/// Symbol `g_L ⊂ S_L T* ⊗ E` given by its reduced equations.
#[derive(Debug, Clone)]
pub struct SymbolSpace {
    pub n: usize,
    pub m: usize,
    pub level: usize,
    /// All jets of order exactly `level`, in priority order; coordinates refer to this list.
    pub jets: Vec<Jet>,
    /// Reduced row echelon form of the symbol equations.
    pub equations: Vec<Row>,
    /// Coordinates of the parametric jets.
    pub parametric: Vec<usize>,
    /// Kernel basis; vector `k` is 1 at `parametric[k]` and 0 at the other parametric jets.
    pub basis: Vec<Row>,
}

impl SymbolSpace {
    pub fn from_equations(
        n: usize,
        m: usize,
        level: usize,
        rows: impl IntoIterator<Item = BTreeMap<Jet, RationalFunction>>,
    ) -> Self {
        let jets: Vec<Jet> = jets_of_order(n, m, level);
        let index: HashMap<Jet, usize> = jets.iter().enumerate().map(|(k, j)| (*j, k)).collect();
        let rows: Vec<Row> = rows
            .into_iter()
            .map(|form| {
                let mut r: Row = form.into_iter().map(|(j, c)| (index[&j], c)).collect();
                r.sort_by_key(|e| e.0);
                r
            })
            .collect();
        let equations = linalg::rref(rows, usize::MAX).pivot_rows;
        let mut is_pivot = vec![false; jets.len()];
        for r in &equations {
            is_pivot[r[0].0] = true;
        }
        let parametric: Vec<usize> = (0..jets.len()).filter(|&c| !is_pivot[c]).collect();
        let basis = parametric
            .iter()
            .map(|&p| {
                let mut v: Row = vec![(p, RationalFunction::one())];
                for r in &equations {
                    if let Ok(k) = r.binary_search_by_key(&p, |e| e.0) {
                        v.push((r[0].0, -r[k].1.clone()));
                    }
                }
                v.sort_by_key(|e| e.0);
                v
            })
            .collect();
        SymbolSpace { n, m, level, jets, equations, parametric, basis }
    }

    /// Symbol at `level` of a solved form computed at that level or higher:
    /// the order-`level` parts of the pivot rows of order `level`.
    pub fn of_solved(sf: &SolvedForm, level: usize) -> Self {
        let rows = sf.pivots.iter().filter(|(j, _)| j.order() == level).map(|(_, eq)| eq.top_part(level));
        Self::from_equations(sf.n, sf.m, level, rows)
    }

    pub fn dim(&self) -> usize {
        self.parametric.len()
    }

    pub fn equation_forms(&self) -> Vec<BTreeMap<Jet, RationalFunction>> {
        self.equations.iter().map(|r| r.iter().map(|(c, v)| (self.jets[*c], v.clone())).collect()).collect()
    }

    pub fn parametric_jets(&self) -> Vec<Jet> {
        self.parametric.iter().map(|&c| self.jets[c]).collect()
    }

    /// First algebraic prolongation `rho_1(g)`.
    pub fn prolongation(&self) -> SymbolSpace {
        let forms = self.equation_forms();
        let rows = (0..self.n)
            .flat_map(|i| forms.iter().map(move |f| f.iter().map(|(j, c)| (j.raised(i), c.clone())).collect()));
        SymbolSpace::from_equations(self.n, self.m, self.level + 1, rows)
    }

    /// Whether the vector satisfies every symbol equation.
    pub fn contains(&self, v: &BTreeMap<Jet, RationalFunction>) -> bool {
        self.equations.iter().all(|r| {
            let mut acc = RationalFunction::zero();
            for (c, a) in r {
                if let Some(x) = v.get(&self.jets[*c]) {
                    acc = &acc + &(a * x);
                }
            }
            acc.is_zero()
        })
    }

    /// Coordinates of the parametric jets per class (index `i-1` for class `i`).
    pub fn characters(&self) -> Vec<usize> {
        let mut alpha = vec![0; self.n];
        if self.level == 0 {
            return alpha;
        }
        for &p in &self.parametric {
            let class = self.jets[p].mu.class().expect("positive order");
            alpha[class - 1] += 1;
        }
        alpha
    }
}

fn jets_of_order(n: usize, m: usize, level: usize) -> Vec<Jet> {
    let mut jets = Vec::with_capacity(dim_sym(n, m, level));
    for mu in MultiIndex::of_order(n, level) {
        for k in 0..m {
            jets.push(Jet::new(k, mu));
        }
    }
    jets
}

/// Symbol `g_{q+r}` of a system.
pub fn symbol(sys: &PDESystem, r: usize) -> SymbolSpace {
    let levels = Levels::new(sys, false);
    symbol_levels(&levels, r)
}

pub fn symbol_levels(levels: &Levels<'_>, r: usize) -> SymbolSpace {
    let level = levels.system().order() + r;
    SymbolSpace::of_solved(&levels.solved(level), level)
}

/// All increasing `s`-tuples from `0..n`, lexicographic.
pub fn wedge_basis(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, s, &mut Vec::new(), &mut out);
    out
}

/// Element of `∧^s T* ⊗ S_L T* ⊗ E`, keyed by (form index tuple, jet).
pub type WedgeForm = BTreeMap<(Vec<usize>, Jet), RationalFunction>;

/// `(δw)_{mu,J} = sum_t (-1)^{t+1} w_{J \ j_t, mu + 1_{j_t}}`, with `t` counted from 1.
pub fn delta_ambient(w: &WedgeForm, n: usize) -> WedgeForm {
    let mut out: WedgeForm = BTreeMap::new();
    for ((idx, jet), val) in w {
        for j in 0..n {
            if idx.contains(&j) {
                continue;
            }
            let Some(mu) = jet.mu.lowered(j) else { continue };
            let t = idx.iter().filter(|&&i| i < j).count();
            let mut target = idx.clone();
            target.insert(t, j);
            let v = if t % 2 == 0 { val.clone() } else { -val.clone() };
            let key = (target, Jet { comp: jet.comp, mu });
            let sum = match out.remove(&key) {
                Some(prev) => &prev + &v,
                None => v,
            };
            if !sum.is_zero() {
                out.insert(key, sum);
            }
        }
    }
    out
}

/// Images under δ of the basis of `∧^s T* ⊗ g`, as sparse rows in ambient coordinates.
fn delta_images(g: &SymbolSpace, s: usize) -> Vec<WedgeForm> {
    let mut out = Vec::new();
    for idx in wedge_basis(g.n, s) {
        for b in &g.basis {
            let w: WedgeForm = b.iter().map(|(c, v)| ((idx.clone(), g.jets[*c]), v.clone())).collect();
            out.push(delta_ambient(&w, g.n));
        }
    }
    out
}

fn rank_of_forms(forms: &[WedgeForm]) -> usize {
    let mut index: HashMap<(Vec<usize>, Jet), usize> = HashMap::new();
    let rows: Vec<Row> = forms
        .iter()
        .map(|f| {
            let mut r: Row = f
                .iter()
                .map(|(k, v)| {
                    let next = index.len();
                    (*index.entry(k.clone()).or_insert(next), v.clone())
                })
                .collect();
            r.sort_by_key(|e| e.0);
            r
        })
        .collect();
    linalg::rank(rows)
}

/// `rank(δ: ∧^s T* ⊗ g → ∧^{s+1} T* ⊗ S_{L-1} T* ⊗ E)`.
pub fn delta_rank(g: &SymbolSpace, s: usize) -> usize {
    if s > g.n || g.level == 0 {
        return 0;
    }
    rank_of_forms(&delta_images(g, s))
}

/// `dim H^s(g)` where `g_next` is the prolongation of `g`.
pub fn cohomology_dim(g: &SymbolSpace, g_next: &SymbolSpace, s: usize) -> usize {
    let n = g.n;
    let domain = binomial(n, s) * g.dim();
    let kernel = domain - delta_rank(g, s);
    let image = if s == 0 { 0 } else { delta_rank(g_next, s - 1) };
    kernel - image
}

/// `dim H^s(g_{q+r})` of a system.
pub fn spencer_cohomology_dim(sys: &PDESystem, r: usize, s: usize) -> usize {
    let g = symbol(sys, r);
    cohomology_dim(&g, &g.prolongation(), s)
}

/// `H^s(g_{L+r}) = 0` for `1 <= s <= max_s` and `0 <= r <= n`; stops early
/// once a prolongation vanishes.
fn acyclic_up_to(g: &SymbolSpace, max_s: usize) -> bool {
    let n = g.n;
    if passes_cartan_test(g) {
        return true;
    }
    let mut cur = g.clone();
    for _ in 0..=n {
        if cur.dim() == 0 {
            return true;
        }
        let next = cur.prolongation();
        for s in 1..=max_s.min(n) {
            if cohomology_dim(&cur, &next, s) != 0 {
                return false;
            }
        }
        cur = next;
    }
    true
}

/// `dim g_{L+1} = sum i * alpha^i` in the current coordinates; sufficient for involutivity.
pub fn passes_cartan_test(g: &SymbolSpace) -> bool {
    if g.level == 0 {
        return false;
    }
    let bound: usize = g.characters().iter().enumerate().map(|(k, a)| (k + 1) * a).sum();
    g.prolongation().dim() == bound
}

/// `H^1` and `H^2` vanish on `g` and its first `n` prolongations.
pub fn is_2_acyclic_space(g: &SymbolSpace) -> bool {
    acyclic_up_to(g, 2)
}

/// δ-cohomology vanishes in every degree on `g` and its first `n` prolongations.
pub fn is_involutive_space(g: &SymbolSpace) -> bool {
    acyclic_up_to(g, g.n)
}

pub fn is_2_acyclic(sys: &PDESystem, r: usize) -> bool {
    is_2_acyclic_space(&symbol(sys, r))
}

pub fn is_involutive(sys: &PDESystem, r: usize) -> bool {
    is_involutive_space(&symbol(sys, r))
}

/// Matrix of `δ: ∧^s T* ⊗ g_hi → ∧^{s+1} T* ⊗ g_lo` in the kernel bases.
#[derive(Debug, Clone)]
pub struct DeltaMatrix {
    pub domain: (usize, usize),
    pub codomain: (usize, usize),
    pub ncols: usize,
    pub nrows: usize,
    /// `columns[c]` is the image of domain basis element `c`.
    pub columns: Vec<Row>,
}

impl DeltaMatrix {
    pub fn rank(&self) -> usize {
        linalg::rank(self.columns.clone())
    }

    /// `next ∘ self`, column by column.
    pub fn then(&self, next: &DeltaMatrix) -> Vec<Row> {
        self.columns
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, RationalFunction> = BTreeMap::new();
                for (k, a) in col {
                    for (r, b) in &next.columns[*k] {
                        let v = a * b;
                        let e = acc.entry(*r).or_default();
                        *e = &*e + &v;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }
}

pub fn delta_matrix(g_hi: &SymbolSpace, g_lo: &SymbolSpace, s: usize) -> Result<DeltaMatrix, SymbolError> {
    if g_hi.level != g_lo.level + 1 {
        return Err(SymbolError::LevelMismatch { hi: g_hi.level, lo: g_lo.level });
    }
    if s >= g_hi.n {
        return Err(SymbolError::DegreeOutOfRange { s, n: g_hi.n });
    }
    let n = g_hi.n;
    let target_wedges = wedge_basis(n, s + 1);
    let wedge_index: HashMap<Vec<usize>, usize> =
        target_wedges.iter().enumerate().map(|(k, w)| (w.clone(), k)).collect();
    let par_index: HashMap<Jet, usize> = g_lo.parametric.iter().enumerate().map(|(k, &c)| (g_lo.jets[c], k)).collect();
    let mut columns = Vec::new();
    for image in delta_images(g_hi, s) {
        let mut per_wedge: BTreeMap<Vec<usize>, BTreeMap<Jet, RationalFunction>> = BTreeMap::new();
        for ((idx, jet), v) in &image {
            per_wedge.entry(idx.clone()).or_default().insert(*jet, v.clone());
        }
        let mut col: Row = Vec::new();
        for (idx, vec) in per_wedge {
            if !g_lo.contains(&vec) {
                return Err(SymbolError::NotContained);
            }
            let w = wedge_index[&idx];
            for (jet, v) in vec {
                if let Some(&p) = par_index.get(&jet) {
                    col.push((w * g_lo.dim() + p, v));
                }
            }
        }
        col.sort_by_key(|e| e.0);
        columns.push(col);
    }
    Ok(DeltaMatrix {
        domain: (s, g_hi.level),
        codomain: (s + 1, g_lo.level),
        ncols: binomial(n, s) * g_hi.dim(),
        nrows: target_wedges.len() * g_lo.dim(),
        columns,
    })
}

/// Marker of one variable in a tabular row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarMark {
    Multiplicative(usize),
    /// Non-multiplicative; the prolongation reduces through multiplicative ones.
    Reducible,
    /// Non-multiplicative; the prolongation yields a new leading term.
    Obstruction,
}

#[derive(Debug, Clone)]
pub struct TabularRow {
    pub leading: Jet,
    pub class: usize,
    pub multiplicative: Vec<usize>,
    pub marks: Vec<VarMark>,
    pub equation: BTreeMap<Jet, RationalFunction>,
}

#[derive(Debug, Clone)]
pub struct JanetTabular {
    pub level: usize,
    pub n: usize,
    pub rows: Vec<TabularRow>,
    /// `(α^1, ..., α^n)`: parametric jets per class.
    pub characters: Vec<usize>,
    pub symbol_dim: usize,
}

impl JanetTabular {
    pub fn is_involutive(&self) -> bool {
        self.rows.iter().all(|r| !r.marks.contains(&VarMark::Obstruction))
    }

    /// Renders the box layout, one row per equation.
    pub fn render(&self, unknowns: &[String], vars: &[String]) -> String {
        let eqs: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let mut terms = Vec::new();
                for (k, (jet, c)) in r.equation.iter().enumerate() {
                    let name = jet.render(unknowns);
                    terms.push(format_term(c, &name, k == 0, vars));
                }
                format!("{} = 0", terms.concat())
            })
            .collect();
        let width = eqs.iter().map(|s| s.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (row, eq) in self.rows.iter().zip(&eqs) {
            let marks: Vec<String> = row
                .marks
                .iter()
                .map(|m| match m {
                    VarMark::Multiplicative(i) => i.to_string(),
                    VarMark::Reducible => "•".to_string(),
                    VarMark::Obstruction => "×".to_string(),
                })
                .collect();
            let pad = width - eq.chars().count();
            out.push_str(&format!("{eq}{} | {}\n", " ".repeat(pad), marks.join(" ")));
        }
        out
    }
}

fn format_term(c: &RationalFunction, name: &str, first: bool, vars: &[String]) -> String {
    let negative = c.constant_value().is_some_and(|v| v < num_rational::BigRational::from_integer(0.into()));
    let abs = if negative { -c.clone() } else { c.clone() };
    let body = if abs.is_one() {
        name.to_string()
    } else if abs.numer().num_terms() > 1 && abs.is_polynomial() {
        format!("({})*{name}", abs.render(vars))
    } else {
        format!("{}*{name}", abs.render(vars))
    };
    match (first, negative) {
        (true, false) => body,
        (true, true) => format!("-{body}"),
        (false, false) => format!(" + {body}"),
        (false, true) => format!(" - {body}"),
    }
}

impl fmt::Display for JanetTabular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[], &[]))
    }
}

/// Janet tabular of a symbol space.
pub fn janet_tabular_space(g: &SymbolSpace) -> JanetTabular {
    let n = g.n;
    let forms = g.equation_forms();
    let mut rows = Vec::new();
    if g.level == 0 {
        return JanetTabular { level: 0, n, rows, characters: vec![0; n], symbol_dim: g.dim() };
    }
    let classes: Vec<usize> = g.equations.iter().map(|r| g.jets[r[0].0].mu.class().expect("order >= 1")).collect();
    let next_jets = jets_of_order(n, g.m, g.level + 1);
    let index: HashMap<Jet, usize> = next_jets.iter().enumerate().map(|(k, j)| (*j, k)).collect();
    let shifted = |form: &BTreeMap<Jet, RationalFunction>, i: usize| -> Row {
        let mut r: Row = form.iter().map(|(j, c)| (index[&j.raised(i)], c.clone())).collect();
        r.sort_by_key(|e| e.0);
        r
    };
    let mut multiplicative_rows = Vec::new();
    for (form, &class) in forms.iter().zip(&classes) {
        for i in 0..class {
            multiplicative_rows.push(shifted(form, i));
        }
    }
    let base = linalg::rref(multiplicative_rows, usize::MAX);
    let base_rank = base.rank();
    for (k, (form, &class)) in forms.iter().zip(&classes).enumerate() {
        let marks = (0..n)
            .map(|i| {
                if i < class {
                    VarMark::Multiplicative(i + 1)
                } else {
                    let mut rows = base.pivot_rows.clone();
                    rows.push(shifted(form, i));
                    if linalg::rank(rows) == base_rank {
                        VarMark::Reducible
                    } else {
                        VarMark::Obstruction
                    }
                }
            })
            .collect();
        rows.push(TabularRow {
            leading: g.jets[g.equations[k][0].0],
            class,
            multiplicative: (1..=class).collect(),
            marks,
            equation: form.clone(),
        });
    }
    JanetTabular { level: g.level, n, rows, characters: g.characters(), symbol_dim: g.dim() }
}

/// Janet tabular of `g_{q+r}`.
pub fn janet_tabular(sys: &PDESystem, r: usize) -> JanetTabular {
    janet_tabular_space(&symbol(sys, r))
}

/// Outcome of a search for δ-regular coordinates.
#[derive(Debug, Clone)]
pub struct Regularized {
    pub system: PDESystem,
    /// `x' = change * x`.
    pub change: Vec<Vec<i64>>,
    pub attempts: usize,
    pub delta_involutive: bool,
    pub janet_involutive: bool,
    pub tabular: JanetTabular,
}

pub const DEFAULT_RETRY_CAP: usize = 24;

/// Tries the identity, then seeded random changes with entries in `-2..=2`,
/// until the Janet verdict on `g_{q+r}` matches the δ-cohomology verdict.
pub fn delta_regularize(sys: &PDESystem, r: usize, seed: u64) -> Result<Regularized, SymbolError> {
    delta_regularize_capped(sys, r, seed, DEFAULT_RETRY_CAP)
}

pub fn delta_regularize_capped(sys: &PDESystem, r: usize, seed: u64, cap: usize) -> Result<Regularized, SymbolError> {
    let n = sys.n();
    let tabular = janet_tabular(sys, r);
    let janet_involutive = tabular.is_involutive();
    let delta_involutive = janet_involutive || is_involutive_space(&symbol(sys, r));
    if janet_involutive == delta_involutive {
        return Ok(Regularized {
            system: sys.clone(),
            change: identity(n),
            attempts: 1,
            delta_involutive,
            janet_involutive,
            tabular,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..cap.max(1) {
        let change = random_unimodular_ish(n, &mut rng);
        let system = sys.change_coordinates(&change)?;
        let tabular = janet_tabular(&system, r);
        if tabular.is_involutive() {
            return Ok(Regularized {
                system,
                change,
                attempts: attempt + 1,
                delta_involutive: true,
                janet_involutive: true,
                tabular,
            });
        }
    }
    Err(SymbolError::RetryCapExceeded { attempts: cap, delta: true, janet: false })
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn random_unimodular_ish(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    loop {
        let a: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        if determinant(&a) != 0 {
            return a;
        }
    }
}

fn determinant(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return a[0][0] as i128;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = a[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * a[0][j] as i128 * determinant(&minor)
        })
        .sum()
}

/// Default jet ordering used by every tabular.
pub fn ordering() -> JetOrdering {
    JetOrdering::default()
}
