//! Multi-indices, jet coordinates and the counting functions of jet bundles.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::field::MAX_VARS;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("the class of a multi-index of order zero is undefined")]
    ClassOfZeroOrder,
    #[error("variable index {index} out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("{n} independent variables exceed the supported maximum of {max}")]
    TooManyVariables { n: usize, max: usize },
    #[error("malformed jet token `{0}`")]
    Malformed(String),
}

/// Exponent vector `mu = (mu_1, ..., mu_n)` of a derivative `d^mu`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    n: u8,
    order: u16,
    exps: [u8; MAX_VARS],
}

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_VARS, "too many variables");
        MultiIndex { n: n as u8, order: 0, exps: [0; MAX_VARS] }
    }

    pub fn new(exps: &[u8]) -> Self {
        let mut mi = Self::zero(exps.len());
        mi.exps[..exps.len()].copy_from_slice(exps);
        mi.order = exps.iter().map(|&e| e as u16).sum();
        mi
    }

    /// The multi-index `1_i` of the single derivative `d_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        Self::zero(n).raised(i)
    }

    /// Builds a multi-index from a list of variable positions (0-based), e.g.
    /// `[2, 2]` for `d_3 d_3`.
    pub fn from_positions(n: usize, positions: &[usize]) -> Result<Self, JetError> {
        let mut mi = Self::zero(n);
        for &p in positions {
            if p >= n {
                return Err(JetError::VariableOutOfRange { index: p + 1, n });
            }
            mi = mi.raised(p);
        }
        Ok(mi)
    }

    pub fn nvars(&self) -> usize {
        self.n as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn get(&self, i: usize) -> usize {
        self.exps[i] as usize
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exps[..self.n as usize]
    }

    /// `mu + 1_i`.
    pub fn raised(&self, i: usize) -> Self {
        let mut mi = *self;
        mi.exps[i] += 1;
        mi.order += 1;
        mi
    }

    /// `mu - 1_i`, if `mu_i > 0`.
    pub fn lowered(&self, i: usize) -> Option<Self> {
        if self.exps[i] == 0 {
            return None;
        }
        let mut mi = *self;
        mi.exps[i] -= 1;
        mi.order -= 1;
        Some(mi)
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        let mut mi = *self;
        for i in 0..self.nvars() {
            mi.exps[i] += other.exps[i];
        }
        mi.order += other.order;
        mi
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<Self> {
        let mut mi = *self;
        for i in 0..self.nvars() {
            mi.exps[i] = mi.exps[i].checked_sub(other.exps[i])?;
        }
        mi.order -= other.order;
        Some(mi)
    }

    /// Smallest `i` (1-based) with `mu_i != 0`.
    pub fn class(&self) -> Result<usize, JetError> {
        self.exponents().iter().position(|&e| e != 0).map(|p| p + 1).ok_or(JetError::ClassOfZeroOrder)
    }

    /// Variable positions with repetition, ascending (0-based).
    pub fn positions(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.order());
        for i in 0..self.nvars() {
            out.extend(std::iter::repeat_n(i, self.get(i)));
        }
        out
    }

    /// The largest variable position (0-based) that occurs, if any.
    pub fn last_position(&self) -> Option<usize> {
        (0..self.nvars()).rev().find(|&i| self.exps[i] > 0)
    }

    /// Digit suffix such as `112`; empty for order zero.
    pub fn suffix(&self) -> String {
        self.positions().iter().map(|p| (p + 1).to_string()).collect()
    }

    /// All multi-indices of exact order `q` in `n` variables, in priority order.
    pub fn of_order(n: usize, q: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u8; n];
        fill(n, 0, q, &mut cur, &mut out);
        out.sort_by(|a, b| JetOrdering::default().cmp_index(a, b));
        out
    }
}

fn fill(n: usize, i: usize, remaining: usize, cur: &mut Vec<u8>, out: &mut Vec<MultiIndex>) {
    if n == 0 {
        if remaining == 0 {
            out.push(MultiIndex::zero(0));
        }
        return;
    }
    if i == n - 1 {
        cur[i] = remaining as u8;
        out.push(MultiIndex::new(cur));
        return;
    }
    for e in 0..=remaining {
        cur[i] = e as u8;
        fill(n, i + 1, remaining - e, cur, out);
    }
    cur[i] = 0;
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        JetOrdering::default().cmp_index(self, other)
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exponents())
    }
}

/// A jet coordinate `y^k_mu`; also used for source jets `u^a_nu`.
///
/// `comp` is 0-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Jet {
    pub comp: u16,
    pub mu: MultiIndex,
}

pub type JetVariable = Jet;
pub type SourceJet = Jet;

impl Jet {
    pub fn new(comp: usize, mu: MultiIndex) -> Self {
        Jet { comp: comp as u16, mu }
    }

    pub fn comp(&self) -> usize {
        self.comp as usize
    }

    pub fn order(&self) -> usize {
        self.mu.order()
    }

    pub fn raised(&self, i: usize) -> Self {
        Jet { comp: self.comp, mu: self.mu.raised(i) }
    }

    pub fn shifted(&self, lambda: &MultiIndex) -> Self {
        Jet { comp: self.comp, mu: self.mu.add(lambda) }
    }

    /// Text form `name_digits`, or bare `name` at order zero.
    pub fn render(&self, names: &[String]) -> String {
        let name = names.get(self.comp()).cloned().unwrap_or_else(|| format!("y{}", self.comp() + 1));
        if self.mu.order() == 0 {
            name
        } else {
            format!("{name}_{}", self.mu.suffix())
        }
    }

    /// Parses the part after the underscore of a jet token.
    pub fn parse_suffix(n: usize, digits: &str) -> Result<MultiIndex, JetError> {
        if digits == "0" {
            return Ok(MultiIndex::zero(n));
        }
        let mut positions = Vec::with_capacity(digits.len());
        for ch in digits.chars() {
            let d = ch.to_digit(10).ok_or_else(|| JetError::Malformed(digits.to_string()))? as usize;
            if d == 0 || d > n {
                return Err(JetError::VariableOutOfRange { index: d, n });
            }
            positions.push(d - 1);
        }
        MultiIndex::from_positions(n, &positions)
    }
}

impl Ord for Jet {
    fn cmp(&self, other: &Self) -> Ordering {
        JetOrdering::default().cmp(self, other)
    }
}

impl PartialOrd for Jet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = Vec::new();
        write!(f, "{}", self.render(&names))
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Total order on jet coordinates used to pick leading terms.
///
/// `Less` means "comes first", i.e. has higher elimination priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JetOrdering {
    /// Higher order first; within an order, a higher class comes first
    /// (ascending `mu_1`, then `mu_2`, ...); then ascending component.
    #[default]
    ClassRespecting,
    /// Higher order first, then descending lexicographic on `(mu_n, ..., mu_1)`,
    /// then ascending component.
    ReverseLex,
}

impl JetOrdering {
    pub fn cmp_index(&self, a: &MultiIndex, b: &MultiIndex) -> Ordering {
        let by_order = b.order.cmp(&a.order);
        if by_order != Ordering::Equal {
            return by_order;
        }
        let n = a.nvars().max(b.nvars());
        match self {
            JetOrdering::ClassRespecting => {
                for i in 0..n {
                    let c = a.exps[i].cmp(&b.exps[i]);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                Ordering::Equal
            }
            JetOrdering::ReverseLex => {
                for i in (0..n).rev() {
                    let c = b.exps[i].cmp(&a.exps[i]);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                Ordering::Equal
            }
        }
    }

    pub fn cmp(&self, a: &Jet, b: &Jet) -> Ordering {
        self.cmp_index(&a.mu, &b.mu).then(a.comp.cmp(&b.comp))
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// `dim S_q T* ⊗ E = m * C(q+n-1, n-1)`.
pub fn dim_sym(n: usize, m: usize, q: usize) -> usize {
    if n == 0 {
        return if q == 0 { m } else { 0 };
    }
    m * binomial(q + n - 1, n - 1)
}

/// `dim J_q(E) = m * C(q+n, n)`.
pub fn dim_jet(n: usize, m: usize, q: usize) -> usize {
    m * binomial(q + n, n)
}

/// Janet class of a jet; errors at order zero.
pub fn janet_class(jet: &Jet) -> Result<usize, JetError> {
    jet.mu.class()
}

/// Janet multiplicative variables `{x_j : j <= class}` (1-based).
pub fn multiplicative_vars(jet: &Jet) -> Result<Vec<usize>, JetError> {
    Ok((1..=janet_class(jet)?).collect())
}

/// All jets of order in `lo..=hi`, sorted by `ordering`.
pub fn enumerate_jets(n: usize, m: usize, lo: usize, hi: usize, ordering: JetOrdering) -> Vec<Jet> {
    let mut out = Vec::with_capacity(dim_jet(n, m, hi));
    for q in lo..=hi {
        for mu in MultiIndex::of_order(n, q) {
            for k in 0..m {
                out.push(Jet::new(k, mu));
            }
        }
    }
    out.sort_by(|a, b| ordering.cmp(a, b));
    out
}

pub fn check_nvars(n: usize) -> Result<(), JetError> {
    if n > MAX_VARS {
        Err(JetError::TooManyVariables { n, max: MAX_VARS })
    } else {
        Ok(())
    }
}
