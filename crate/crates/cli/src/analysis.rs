//! Runs the engine pipeline for one command and collects the report.

use std::fmt;
use std::str::FromStr;

use ccgen_core::cc::{self, render_form, CcEngine, DEFAULT_MAX_ORDER};
use ccgen_core::jet::dim_jet;
use ccgen_core::symbol::{self, JanetTabular, SymbolError, VarMark, DEFAULT_RETRY_CAP};
use ccgen_core::system::{self, LinearEquation, PDESystem};
use thiserror::Error;

use crate::parse::SystemFile;
use crate::report::*;

pub const DEFAULT_DEPTH: usize = 3;
pub const DEFAULT_SEED: u64 = 7;
/// Jet orders `r` over which the cross-checks run.
const CHECK_RANGE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    Dims,
    Tabular,
    Cc,
    Syzygies,
    Resolution,
    Full,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::Dims, Command::Tabular, Command::Cc, Command::Syzygies, Command::Resolution, Command::Full];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Dims => "dims",
            Command::Tabular => "tabular",
            Command::Cc => "cc",
            Command::Syzygies => "syzygies",
            Command::Resolution => "resolution",
            Command::Full => "full",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// Overrides from the command line; unset fields fall back to the file, then to defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub max_order: Option<usize>,
    pub depth: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid system: {0}")]
    System(#[from] system::SystemError),
}

pub fn settings(file: &SystemFile, o: Overrides) -> Settings {
    Settings {
        max_order: o.max_order.or(file.options.max_order).unwrap_or(DEFAULT_MAX_ORDER),
        depth: o.depth.or(file.options.depth).unwrap_or(DEFAULT_DEPTH),
        seed: o.seed.or(file.options.seed).unwrap_or(DEFAULT_SEED),
        retry_cap: file.options.retry_cap.unwrap_or(DEFAULT_RETRY_CAP),
    }
}

fn summary(sys: &PDESystem) -> SystemSummary {
    let sources: Vec<String> = sys.sources.iter().map(|s| s.name.clone()).collect();
    SystemSummary {
        n: sys.n(),
        m: sys.m(),
        p: sys.p(),
        q: sys.order(),
        variables: sys.vars.clone(),
        unknowns: sys.unknowns.clone(),
        sources: sys.sources.iter().map(|s| SourceSummary { name: s.name.clone(), weight: s.weight }).collect(),
        equations: sys
            .equations
            .iter()
            .map(|e| EquationSummary {
                label: e.label.clone(),
                lhs: render_form(&e.lhs, &sys.unknowns, &sys.vars),
                rhs: render_form(&e.rhs, &sources, &sys.vars),
                order: e.order(),
            })
            .collect(),
    }
}

fn render_equation(sys: &PDESystem, e: &LinearEquation) -> String {
    let sources: Vec<String> = sys.sources.iter().map(|s| s.name.clone()).collect();
    format!("{} = {}", render_form(&e.lhs, &sys.unknowns, &sys.vars), render_form(&e.rhs, &sources, &sys.vars))
}

fn dims_table(engine: &CcEngine<'_>, depth: usize) -> DimsTable {
    let sys = engine.system();
    let levels = engine.levels();
    let q = sys.order();
    let rows = (q..=q + depth)
        .map(|level| DimRow {
            level,
            dim_jet: dim_jet(sys.n(), sys.m(), level),
            dim_r: levels.dim(level),
            dim_g: symbol::symbol_levels(levels, level - q).dim(),
            dim_projected: levels.projected_dim(level, 1),
        })
        .collect();
    DimsTable { rows }
}

fn tabular_report(
    tab: &JanetTabular,
    r: usize,
    coordinates: Vec<Vec<i64>>,
    sys: &PDESystem,
    delta: Option<bool>,
) -> TabularReport {
    let rows = tab
        .rows
        .iter()
        .map(|row| {
            let marks: Vec<String> = row
                .marks
                .iter()
                .map(|m| match m {
                    VarMark::Multiplicative(i) => i.to_string(),
                    VarMark::Reducible => "•".to_string(),
                    VarMark::Obstruction => "×".to_string(),
                })
                .collect();
            TabularRowReport {
                equation: format!("{} = 0", render_form(&row.equation, &sys.unknowns, &sys.vars)),
                class: row.class,
                marks: marks.join(" "),
            }
        })
        .collect();
    TabularReport {
        level: tab.level,
        r,
        coordinates,
        rows,
        characters: tab.characters.iter().rev().copied().collect(),
        symbol_dim: tab.symbol_dim,
        janet_involutive: tab.is_involutive(),
        delta_involutive: delta,
    }
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// Tabulars of `g_q` and `g_{q+1}`, followed by a δ-regular one when the
/// original coordinates are not.
fn tabulars(sys: &PDESystem, s: &Settings, report: &mut AnalysisReport) {
    if sys.equations.is_empty() || sys.order() == 0 {
        return;
    }
    let n = sys.n();
    for r in 0..=1 {
        match symbol::delta_regularize_capped(sys, r, s.seed, s.retry_cap) {
            Ok(reg) => {
                let original = symbol::janet_tabular(sys, r);
                report.tabulars.push(tabular_report(&original, r, identity(n), sys, Some(reg.delta_involutive)));
                if reg.change != identity(n) {
                    report.tabulars.push(tabular_report(
                        &reg.tabular,
                        r,
                        reg.change.clone(),
                        &reg.system,
                        Some(reg.delta_involutive),
                    ));
                }
                report.checks.insert(
                    format!("delta_janet_agree_r{r}"),
                    CheckVerdict {
                        holds: reg.delta_involutive == reg.janet_involutive,
                        detail: format!("δ-involutive {} after {} attempt(s)", reg.delta_involutive, reg.attempts),
                    },
                );
            }
            Err(SymbolError::RetryCapExceeded { attempts, delta, janet }) => {
                let original = symbol::janet_tabular(sys, r);
                report.tabulars.push(tabular_report(&original, r, identity(n), sys, Some(delta)));
                report.partial = true;
                report.partial_reasons.push(format!(
                    "no δ-regular coordinates for g_{} within {attempts} attempts (δ {delta}, Janet {janet})",
                    sys.order() + r
                ));
            }
            Err(e) => {
                report.partial = true;
                report.partial_reasons.push(format!("regularization failed: {e}"));
            }
        }
    }
}

fn certificate_info(c: Option<system::Certificate>) -> Option<CertificateInfo> {
    c.map(|c| CertificateInfo { level: c.level, s: c.s })
}

fn cc_report(sys: &PDESystem, gens: &cc::CCGeneratorSet) -> CcReport {
    let sources: Vec<String> = sys.sources.iter().map(|s| s.name.clone()).collect();
    CcReport {
        generators: gens
            .generators
            .iter()
            .map(|g| GeneratorReport {
                label: g.label.clone(),
                order: g.order,
                level: g.level,
                expression: g.render(&sources, &sys.vars),
            })
            .collect(),
        orders: gens.orders(),
        per_level: gens
            .per_level
            .iter()
            .map(|l| LevelRow { level: l.level, r: l.r, new_generators: l.new_generators, dim_q: l.dim_q })
            .collect(),
        certificate: certificate_info(gens.certificate),
        scanned_to: gens.scanned_to,
        complete: gens.complete,
        generator_count: gens.generators.len(),
        sources_minus_unknowns: sys.p() as i64 - sys.m() as i64,
    }
}

fn mark_partial(report: &mut AnalysisReport, complete: bool, what: &str) {
    if !complete {
        report.partial = true;
        report.partial_reasons.push(format!("{what} not certified within the order cap"));
    }
}

fn check(report: &mut AnalysisReport, name: &str, holds: bool, detail: String) {
    report.checks.insert(name.to_string(), CheckVerdict { holds, detail });
}

fn resolution_summary(res: &cc::ResolutionReport) -> ResolutionSummary {
    ResolutionSummary {
        ranks: res.ranks(),
        operator_orders: res.operator_orders(),
        euler_characteristic: res.euler_characteristic,
        differential_rank: res.differential_rank,
        differential_rank_from_growth: res.differential_rank_from_growth,
        complete: res.complete,
    }
}

/// Exact cross-checks that hold for every system.
fn invariant_checks(engine: &CcEngine<'_>, report: &mut AnalysisReport) {
    for r in 0..=CHECK_RANGE {
        let c = cc::connecting_sequence_with(engine, r);
        check(
            report,
            &format!("connecting_sequence_exact_r{r}"),
            c.alternating_sum() == 0,
            format!("{:?}", c.as_tuple()),
        );
        let h = cc::jet_cohomology_with(engine, r);
        check(
            report,
            &format!("jet_cohomology_additive_r{r}"),
            h.additive(),
            format!("H(R) = {}, H(S) = {}, H(J) = {}", h.h_r, h.h_s, h.h_j),
        );
        let c = cc::prolongation_containment(engine, r);
        check(report, &format!("prolongation_containment_r{r}"), c.contained, format!("gap {}", c.gap));
    }
}

/// Runs `command` on the parsed file.
pub fn run_analysis(
    file: &SystemFile,
    command: Command,
    overrides: Overrides,
) -> Result<AnalysisReport, AnalysisError> {
    let sys = file.to_system()?;
    let s = settings(file, overrides);
    let mut report = AnalysisReport {
        command: command.name().to_string(),
        system: summary(&sys),
        settings: s.clone(),
        ..AnalysisReport::default()
    };
    let engine = CcEngine::new(&sys);
    let full = command == Command::Full;
    if matches!(command, Command::Dims | Command::Full) {
        report.dims = Some(dims_table(&engine, s.depth));
    }
    if full {
        let pp = system::pp_procedure_levels(engine.levels(), cc::CERTIFY_STEPS);
        report.pp = Some(PpChain {
            chain: pp.chain.iter().map(|&(s, dim)| ChainStep { s, dim }).collect(),
            stable_dim: pp.stable_dim,
            certificate: certificate_info(pp.certificate),
            complete: pp.complete,
            stable_equations: pp.stable.equations.iter().map(|e| render_equation(&sys, e)).collect(),
        });
        mark_partial(&mut report, pp.complete, "prolongation/projection");
        let fi = system::fi_test_levels(engine.levels(), s.depth);
        report.fi = Some(FiVerdict { formally_integrable: fi.fi, first_drop: fi.first_drop });
    }
    if matches!(command, Command::Tabular | Command::Full) {
        tabulars(&sys, &s, &mut report);
    }
    if matches!(command, Command::Cc | Command::Syzygies | Command::Full) {
        let gens = engine.generating_cc(Some(s.max_order));
        report.cc = Some(cc_report(&sys, &gens));
        mark_partial(&mut report, gens.complete, "generating compatibility conditions");
        if full {
            let ok = gens.generators.iter().all(|g| engine.substitute(&g.rhs_form).is_empty());
            check(&mut report, "cc_substitute_to_zero", ok, format!("{} generator(s)", gens.generators.len()));
        }
        if matches!(command, Command::Syzygies | Command::Full) {
            let (rels, set) = if gens.generators.is_empty() {
                (Vec::new(), None)
            } else {
                let (rels, set) = cc::syzygies(&sys, &gens, Some(gens.max_order() + s.max_order));
                (rels, Some(set))
            };
            let complete = set.as_ref().is_none_or(|x| x.complete);
            report.syzygies = Some(SyzygyReport {
                relations: rels.iter().map(|r| SyzygyRow { order: r.order, expression: r.render(&sys.vars) }).collect(),
                complete,
            });
            mark_partial(&mut report, complete, "syzygies");
            if full {
                let ok = rels.iter().all(|r| cc::apply_syzygy(&gens, r).is_empty());
                check(&mut report, "syzygies_substitute_to_zero", ok, format!("{} relation(s)", rels.len()));
            }
        }
    }
    if matches!(command, Command::Resolution | Command::Full) {
        let res = cc::resolution(&sys, Some(s.max_order), sys.n() + 2);
        report.resolution = Some(resolution_summary(&res));
        mark_partial(&mut report, res.complete, "resolution");
        if full {
            if let (true, Some(g)) = (res.complete, res.differential_rank_from_growth) {
                check(
                    &mut report,
                    "euler_characteristic_matches_growth",
                    g == res.euler_characteristic,
                    format!("χ = {}, growth = {g}", res.euler_characteristic),
                );
            }
        }
    }
    if full {
        invariant_checks(&engine, &mut report);
    }
    Ok(report)
}
