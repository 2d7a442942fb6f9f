//! Analysis report: structured (versioned JSON) and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "ccgen.report/v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub command: String,
    pub system: SystemSummary,
    pub settings: Settings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<DimsTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pp: Option<PpChain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fi: Option<FiVerdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tabulars: Vec<TabularReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cc: Option<CcReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub syzygies: Option<SyzygyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<ResolutionSummary>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub checks: BTreeMap<String, CheckVerdict>,
    pub partial: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub partial_reasons: Vec<String>,
}

impl Default for AnalysisReport {
    fn default() -> Self {
        AnalysisReport {
            schema: SCHEMA.to_string(),
            command: String::new(),
            system: SystemSummary::default(),
            settings: Settings::default(),
            dims: None,
            pp: None,
            fi: None,
            tabulars: Vec::new(),
            cc: None,
            syzygies: None,
            resolution: None,
            checks: BTreeMap::new(),
            partial: false,
            partial_reasons: Vec::new(),
        }
    }
}

impl AnalysisReport {
    /// Whether any invariant check failed.
    pub fn violated(&self) -> bool {
        self.checks.values().any(|c| !c.holds)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub variables: Vec<String>,
    pub unknowns: Vec<String>,
    pub sources: Vec<SourceSummary>,
    pub equations: Vec<EquationSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSummary {
    pub name: String,
    pub weight: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationSummary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub lhs: String,
    pub rhs: String,
    pub order: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settings {
    pub max_order: usize,
    pub depth: usize,
    pub seed: u64,
    pub retry_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimsTable {
    pub rows: Vec<DimRow>,
}

/// Dimensions at one jet level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRow {
    pub level: usize,
    pub dim_jet: usize,
    pub dim_r: usize,
    pub dim_g: usize,
    /// `dim π(R_{level+1})`.
    pub dim_projected: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub s: usize,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateInfo {
    pub level: usize,
    pub s: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PpChain {
    pub chain: Vec<ChainStep>,
    pub stable_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateInfo>,
    pub complete: bool,
    /// Solved equations of the stabilized system.
    pub stable_equations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiVerdict {
    pub formally_integrable: bool,
    /// `(r, dim R_{q+r}, dim π(R_{q+r+1}))` at the first drop.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_drop: Option<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabularReport {
    pub level: usize,
    pub r: usize,
    /// `x' = coordinates * x`.
    pub coordinates: Vec<Vec<i64>>,
    pub rows: Vec<TabularRowReport>,
    /// `(α^n, ..., α^1)`, highest class first.
    pub characters: Vec<usize>,
    pub symbol_dim: usize,
    pub janet_involutive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_involutive: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabularRowReport {
    pub equation: String,
    pub class: usize,
    /// One mark per variable: its index if multiplicative, `•` or `×` otherwise.
    pub marks: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorReport {
    pub label: String,
    pub order: usize,
    pub level: usize,
    pub expression: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: usize,
    pub r: i64,
    pub new_generators: usize,
    pub dim_q: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CcReport {
    pub generators: Vec<GeneratorReport>,
    pub orders: Vec<usize>,
    pub per_level: Vec<LevelRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateInfo>,
    pub scanned_to: usize,
    pub complete: bool,
    pub generator_count: usize,
    /// `dim F_0 - dim E`.
    pub sources_minus_unknowns: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyzygyRow {
    pub order: usize,
    pub expression: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyzygyReport {
    pub relations: Vec<SyzygyRow>,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionSummary {
    pub ranks: Vec<usize>,
    pub operator_orders: Vec<usize>,
    pub euler_characteristic: i64,
    pub differential_rank: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub differential_rank_from_growth: Option<i64>,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckVerdict {
    pub holds: bool,
    pub detail: String,
}

/// Pretty JSON with a trailing newline.
pub fn emit_structured(report: &AnalysisReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse_structured(text: &str) -> Result<AnalysisReport, serde_json::Error> {
    serde_json::from_str(text)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Equations on the left, multiplicative columns boxed on the right.
pub fn render_tabular(t: &TabularReport) -> String {
    let width = t.rows.iter().map(|r| r.equation.chars().count()).max().unwrap_or(0);
    let inner = t.rows.iter().map(|r| r.marks.chars().count()).max().unwrap_or(0) + 2;
    let mut out = String::new();
    let _ = writeln!(out, "{}┌{}┐", " ".repeat(width + 2), "─".repeat(inner));
    for r in &t.rows {
        let pad = width - r.equation.chars().count();
        let _ = writeln!(out, "{}{}  │ {} │", r.equation, " ".repeat(pad), r.marks);
    }
    let _ = writeln!(out, "{}└{}┘", " ".repeat(width + 2), "─".repeat(inner));
    out
}

pub fn emit_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let s = &report.system;
    let _ = writeln!(out, "command: {}", report.command);
    let _ = writeln!(out, "system: n={} m={} p={} q={}", s.n, s.m, s.p, s.q);
    for e in &s.equations {
        match &e.label {
            Some(l) => {
                let _ = writeln!(out, "  {l}: {} = {}", e.lhs, e.rhs);
            }
            None => {
                let _ = writeln!(out, "  {} = {}", e.lhs, e.rhs);
            }
        }
    }
    if let Some(d) = &report.dims {
        let _ = writeln!(out, "\ndimensions:");
        let _ = writeln!(out, "  level  dim J  dim R  dim g  dim π(R+1)");
        for r in &d.rows {
            let _ = writeln!(
                out,
                "  {:>5}  {:>5}  {:>5}  {:>5}  {:>10}",
                r.level, r.dim_jet, r.dim_r, r.dim_g, r.dim_projected
            );
        }
    }
    if let Some(pp) = &report.pp {
        let chain: Vec<String> = pp.chain.iter().map(|c| c.dim.to_string()).collect();
        let _ = writeln!(out, "\nprolongation/projection chain: {}", chain.join(" → "));
        match &pp.certificate {
            Some(c) => {
                let _ = writeln!(out, "  certified at level {} after {} projection(s)", c.level, c.s);
            }
            None => {
                let _ = writeln!(out, "  not certified within the step cap");
            }
        }
        for e in &pp.stable_equations {
            let _ = writeln!(out, "  {e}");
        }
    }
    if let Some(fi) = &report.fi {
        match fi.first_drop {
            None => {
                let _ = writeln!(out, "\nformally integrable: yes");
            }
            Some((r, a, b)) => {
                let _ = writeln!(out, "\nformally integrable: no (r={r}: dim R = {a}, dim π(R+1) = {b})");
            }
        }
    }
    for t in &report.tabulars {
        let _ = writeln!(out, "\nJanet tabular of g_{} (coordinates {:?}):", t.level, t.coordinates);
        out.push_str(&render_tabular(t));
        let delta = t.delta_involutive.map_or("n/a".to_string(), |b| b.to_string());
        let _ = writeln!(
            out,
            "  characters {:?}, dim g = {}, Janet involutive: {}, δ-involutive: {delta}",
            t.characters, t.symbol_dim, t.janet_involutive
        );
    }
    if let Some(cc) = &report.cc {
        let _ = writeln!(
            out,
            "\ngenerating compatibility conditions ({}):",
            if cc.complete { "complete" } else { "partial" }
        );
        for g in &cc.generators {
            let _ = writeln!(out, "  {} (order {}): {}", g.label, g.order, g.expression);
        }
        let _ = writeln!(out, "  {} generator(s); dim F0 - dim E = {}", cc.generator_count, cc.sources_minus_unknowns);
    }
    if let Some(sz) = &report.syzygies {
        let _ = writeln!(out, "\nsyzygies ({}):", if sz.complete { "complete" } else { "partial" });
        if sz.relations.is_empty() {
            let _ = writeln!(out, "  none");
        }
        for r in &sz.relations {
            let _ = writeln!(out, "  (order {}) {} = 0", r.order, r.expression);
        }
    }
    if let Some(res) = &report.resolution {
        let _ = writeln!(out, "\nresolution ({}):", if res.complete { "complete" } else { "partial" });
        let _ = writeln!(out, "  ranks ({})", join(&res.ranks));
        let _ = writeln!(out, "  operator orders ({})", join(&res.operator_orders));
        let _ = writeln!(out, "  Euler characteristic {}", res.euler_characteristic);
        if let Some(g) = res.differential_rank_from_growth {
            let _ = writeln!(out, "  differential rank from growth {g}");
        }
    }
    if !report.checks.is_empty() {
        let _ = writeln!(out, "\nchecks:");
        for (name, c) in &report.checks {
            let _ = writeln!(out, "  [{}] {name}: {}", if c.holds { "ok" } else { "FAILED" }, c.detail);
        }
    }
    if report.partial {
        let _ = writeln!(out, "\npartial: {}", report.partial_reasons.join("; "));
    }
    out
}
