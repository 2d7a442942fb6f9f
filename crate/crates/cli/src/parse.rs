//! Input language for linear systems.
//!
//! ```text
//! vars x1 x2 x3
//! unknown y
//! option max_order = 8
//! eq: y_33 - x2*y_1 = v   # comment
//! eq B: y_22 = u
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use ccgen_core::cc::render_form;
use ccgen_core::field::{RationalFunction, MAX_VARS};
use ccgen_core::jet::{Jet, MultiIndex};
use ccgen_core::system::{LinearEquation, PDESystem, Source, SystemError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Form = BTreeMap<Jet, RationalFunction>;

/// Class of a parse or validation failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorClass {
    Syntax,
    UndeclaredName,
    IndexOutOfRange,
    DuplicateLabel,
    DuplicateName,
    MissingDeclaration,
    Nonlinear,
    ConstantTerm,
    SharedSource,
    BadOption,
    DivisionByZero,
    TooManyVariables,
}

impl ErrorClass {
    pub const ALL: [ErrorClass; 12] = [
        ErrorClass::Syntax,
        ErrorClass::UndeclaredName,
        ErrorClass::IndexOutOfRange,
        ErrorClass::DuplicateLabel,
        ErrorClass::DuplicateName,
        ErrorClass::MissingDeclaration,
        ErrorClass::Nonlinear,
        ErrorClass::ConstantTerm,
        ErrorClass::SharedSource,
        ErrorClass::BadOption,
        ErrorClass::DivisionByZero,
        ErrorClass::TooManyVariables,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ErrorClass::Syntax => "syntax",
            ErrorClass::UndeclaredName => "undeclared-name",
            ErrorClass::IndexOutOfRange => "index-out-of-range",
            ErrorClass::DuplicateLabel => "duplicate-label",
            ErrorClass::DuplicateName => "duplicate-name",
            ErrorClass::MissingDeclaration => "missing-declaration",
            ErrorClass::Nonlinear => "nonlinear",
            ErrorClass::ConstantTerm => "constant-term",
            ErrorClass::SharedSource => "shared-source",
            ErrorClass::BadOption => "bad-option",
            ErrorClass::DivisionByZero => "division-by-zero",
            ErrorClass::TooManyVariables => "too-many-variables",
        }
    }
}

impl fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {class}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub class: ErrorClass,
    pub message: String,
}

/// Options that may be set in the file; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileOptions {
    pub max_order: Option<usize>,
    pub depth: Option<usize>,
    pub seed: Option<u64>,
    pub retry_cap: Option<usize>,
    pub shared_sources: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSpec {
    pub label: Option<String>,
    pub lhs: Form,
    /// `None` for a homogeneous equation (`= 0`).
    pub source: Option<String>,
}

impl EquationSpec {
    pub fn order(&self) -> usize {
        self.lhs.keys().map(|j| j.order()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFile {
    pub variables: Vec<String>,
    pub unknowns: Vec<String>,
    pub equations: Vec<EquationSpec>,
    pub options: FileOptions,
}

impl SystemFile {
    pub fn n(&self) -> usize {
        self.variables.len()
    }

    pub fn m(&self) -> usize {
        self.unknowns.len()
    }

    /// Source names in order of first appearance.
    pub fn sources(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.equations.iter().filter_map(|e| e.source.clone()).filter(|s| seen.insert(s.clone())).collect()
    }

    /// Builds the engine system; each source weighs the order of its equation.
    pub fn to_system(&self) -> Result<PDESystem, SystemError> {
        let n = self.n();
        let names = self.sources();
        let mut sources: Vec<Source> = names.iter().map(|name| Source { name: name.clone(), weight: 0 }).collect();
        let mut equations = Vec::new();
        for eq in &self.equations {
            let mut rhs = Form::new();
            if let Some(s) = &eq.source {
                let k = names.iter().position(|x| x == s).expect("collected above");
                sources[k].weight = sources[k].weight.max(eq.order());
                rhs.insert(Jet::new(k, MultiIndex::zero(n)), RationalFunction::one());
            }
            let mut e = LinearEquation::new(eq.lhs.clone(), rhs);
            e.label = eq.label.clone();
            equations.push(e);
        }
        PDESystem::new(self.variables.clone(), self.unknowns.clone(), sources, equations)
    }

    /// Canonical text; parsing it gives back an equal `SystemFile`.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("vars {}\n", self.variables.join(" ")));
        let kw = if self.unknowns.len() == 1 { "unknown" } else { "unknowns" };
        out.push_str(&format!("{kw} {}\n", self.unknowns.join(" ")));
        let o = &self.options;
        let mut option = |k: &str, v: String| out.push_str(&format!("option {k} = {v}\n"));
        if let Some(v) = o.max_order {
            option("max_order", v.to_string());
        }
        if let Some(v) = o.depth {
            option("depth", v.to_string());
        }
        if let Some(v) = o.seed {
            option("seed", v.to_string());
        }
        if let Some(v) = o.retry_cap {
            option("retry_cap", v.to_string());
        }
        if o.shared_sources {
            option("shared_sources", "true".into());
        }
        for eq in &self.equations {
            let head = match &eq.label {
                Some(l) => format!("eq {l}:"),
                None => "eq:".to_string(),
            };
            let lhs = render_form(&eq.lhs, &self.unknowns, &self.variables);
            let rhs = eq.source.clone().unwrap_or_else(|| "0".into());
            out.push_str(&format!("{head} {lhs} = {rhs}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Jet(String, String),
    Int(BigInt),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, class: ErrorClass, message: impl Into<String>) -> ParseError {
    ParseError { line, col, class, message: message.into() }
}

/// Splits one statement's text into tokens; `line`/`col` locate its start.
fn lex_line(text: &str, line: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            if i < chars.len() && chars[i] == '_' {
                i += 1;
                let ds = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(err(line, i + 1, ErrorClass::Syntax, format!("expected digits after `{name}_`")));
                }
                out.push(Token { tok: Tok::Jet(name, chars[ds..i].iter().collect()), line, col });
            } else {
                out.push(Token { tok: Tok::Ident(name), line, col });
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Int(s.parse().expect("digits")), line, col });
            continue;
        }
        if "+-*/^()=:".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line, col });
            i += 1;
            continue;
        }
        return Err(err(line, col, ErrorClass::Syntax, format!("unexpected character `{c}`")));
    }
    out.push(Token { tok: Tok::End, line, col: chars.len() + 1 });
    Ok(out)
}

/// Statements with their source positions: split at `;` and newlines.
fn statements(text: &str) -> Vec<(usize, usize, String)> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut start = 0;
        for piece in line.split(';') {
            if !piece.trim().is_empty() {
                out.push((ln + 1, start, piece.to_string()));
            }
            start += piece.chars().count() + 1;
        }
    }
    out
}

#[derive(Debug, Clone)]
enum Val {
    Coef(RationalFunction),
    Lin(Form),
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    vars: &'a [String],
    unknowns: &'a [String],
}

fn add_forms(a: &Form, b: &Form, sign: i64) -> Form {
    let mut out = a.clone();
    let s = RationalFunction::from_int(sign);
    for (j, c) in b {
        let v = out.remove(j).unwrap_or_else(RationalFunction::zero) + &s * c;
        if !v.is_zero() {
            out.insert(*j, v);
        }
    }
    out
}

fn scale_form(f: &Form, c: &RationalFunction) -> Form {
    if c.is_zero() {
        return Form::new();
    }
    f.iter().map(|(j, v)| (*j, v * c)).collect()
}

fn combine(a: Val, b: Val, sign: i64, op: &Token) -> Result<Val, ParseError> {
    Ok(match (a, b) {
        (Val::Coef(x), Val::Coef(y)) => Val::Coef(if sign > 0 { x + y } else { x - y }),
        (Val::Lin(x), Val::Lin(y)) => Val::Lin(add_forms(&x, &y, sign)),
        (Val::Coef(c), Val::Lin(f)) | (Val::Lin(f), Val::Coef(c)) => {
            if !c.is_zero() {
                return Err(err(op.line, op.col, ErrorClass::ConstantTerm, "term without an unknown"));
            }
            Val::Lin(if sign > 0 { f } else { scale_form(&f, &RationalFunction::from_int(-1)) })
        }
    })
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(err(t.line, t.col, ErrorClass::Syntax, format!("expected `{c}`, found {}", describe(&t.tok))))
        }
    }

    fn expr(&mut self) -> Result<Val, ParseError> {
        let mut acc = if self.at_sym('-') {
            let op = self.next();
            let t = self.term()?;
            combine(Val::Coef(RationalFunction::zero()), t, -1, &op)?
        } else {
            if self.at_sym('+') {
                self.next();
            }
            self.term()?
        };
        while self.at_sym('+') || self.at_sym('-') {
            let op = self.next();
            let sign = if op.tok == Tok::Sym('+') { 1 } else { -1 };
            let t = self.term()?;
            acc = combine(acc, t, sign, &op)?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.factor()?;
        while self.at_sym('*') || self.at_sym('/') {
            let op = self.next();
            let rhs = self.factor()?;
            acc = match (op.tok, acc, rhs) {
                (Tok::Sym('*'), Val::Coef(a), Val::Coef(b)) => Val::Coef(a * b),
                (Tok::Sym('*'), Val::Coef(c), Val::Lin(f)) | (Tok::Sym('*'), Val::Lin(f), Val::Coef(c)) => {
                    Val::Lin(scale_form(&f, &c))
                }
                (Tok::Sym('*'), Val::Lin(_), Val::Lin(_)) => {
                    return Err(err(op.line, op.col, ErrorClass::Nonlinear, "product of unknowns"));
                }
                (_, _, Val::Lin(_)) => {
                    return Err(err(op.line, op.col, ErrorClass::Nonlinear, "division by an unknown"));
                }
                (_, a, Val::Coef(b)) => {
                    let inv =
                        b.recip().map_err(|_| err(op.line, op.col, ErrorClass::DivisionByZero, "division by zero"))?;
                    match a {
                        Val::Coef(a) => Val::Coef(a * inv),
                        Val::Lin(f) => Val::Lin(scale_form(&f, &inv)),
                    }
                }
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Val, ParseError> {
        let base = self.primary()?;
        if !self.at_sym('^') {
            return Ok(base);
        }
        let op = self.next();
        let negative = if self.at_sym('-') {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        let Tok::Int(e) = &t.tok else {
            return Err(err(t.line, t.col, ErrorClass::Syntax, "expected an integer exponent"));
        };
        let e = e
            .to_u32()
            .filter(|&e| e <= 64)
            .ok_or_else(|| err(t.line, t.col, ErrorClass::Syntax, "exponent too large"))?;
        let Val::Coef(b) = base else {
            return Err(err(op.line, op.col, ErrorClass::Nonlinear, "power of an unknown"));
        };
        let mut out = RationalFunction::one();
        for _ in 0..e {
            out = out * b.clone();
        }
        if negative {
            out = out.recip().map_err(|_| err(op.line, op.col, ErrorClass::DivisionByZero, "division by zero"))?;
        }
        Ok(Val::Coef(out))
    }

    fn primary(&mut self) -> Result<Val, ParseError> {
        let t = self.next();
        let n = self.vars.len();
        match &t.tok {
            Tok::Int(v) => Ok(Val::Coef(RationalFunction::from_rational(BigRational::from_integer(v.clone())))),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Tok::Ident(name) => {
                if let Some(i) = self.vars.iter().position(|v| v == name) {
                    return Ok(Val::Coef(RationalFunction::var(i)));
                }
                if let Some(k) = self.unknowns.iter().position(|u| u == name) {
                    let mut f = Form::new();
                    f.insert(Jet::new(k, MultiIndex::zero(n)), RationalFunction::one());
                    return Ok(Val::Lin(f));
                }
                Err(err(
                    t.line,
                    t.col,
                    ErrorClass::UndeclaredName,
                    format!("`{name}` is not a declared variable or unknown"),
                ))
            }
            Tok::Jet(name, digits) => {
                let Some(k) = self.unknowns.iter().position(|u| u == name) else {
                    return Err(err(
                        t.line,
                        t.col,
                        ErrorClass::UndeclaredName,
                        format!("`{name}` is not a declared unknown"),
                    ));
                };
                let mu = Jet::parse_suffix(n, digits).map_err(|_| {
                    err(
                        t.line,
                        t.col,
                        ErrorClass::IndexOutOfRange,
                        format!("`{name}_{digits}`: derivative indices must lie in 1..{n}"),
                    )
                })?;
                let mut f = Form::new();
                f.insert(Jet::new(k, mu), RationalFunction::one());
                Ok(Val::Lin(f))
            }
            other => Err(err(t.line, t.col, ErrorClass::Syntax, format!("unexpected {}", describe(other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Jet(s, d) => format!("`{s}_{d}`"),
        Tok::Int(v) => format!("`{v}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of statement".into(),
    }
}

fn parse_usize(t: &Token) -> Result<u64, ParseError> {
    match &t.tok {
        Tok::Int(v) if !v.is_negative() => {
            v.to_u64().ok_or_else(|| err(t.line, t.col, ErrorClass::BadOption, "value too large"))
        }
        other => Err(err(
            t.line,
            t.col,
            ErrorClass::BadOption,
            format!("expected a non-negative integer, found {}", describe(other)),
        )),
    }
}

/// Parses and validates a system description.
pub fn parse_system(text: &str) -> Result<SystemFile, ParseError> {
    let mut variables: Vec<String> = Vec::new();
    let mut unknowns: Vec<String> = Vec::new();
    let mut equations: Vec<EquationSpec> = Vec::new();
    let mut options = FileOptions::default();
    let mut labels = BTreeSet::new();
    let mut source_orders: BTreeMap<String, usize> = BTreeMap::new();
    let mut have_vars = false;
    let mut have_unknowns = false;
    for (line, offset, stmt) in statements(text) {
        let mut toks = lex_line(&stmt, line)?;
        for t in &mut toks {
            t.col += offset;
        }
        let head = toks[0].clone();
        let Tok::Ident(kw) = &head.tok else {
            return Err(err(
                head.line,
                head.col,
                ErrorClass::Syntax,
                format!("expected a statement, found {}", describe(&head.tok)),
            ));
        };
        match kw.as_str() {
            "vars" | "unknown" | "unknowns" => {
                let is_vars = kw == "vars";
                if (is_vars && have_vars) || (!is_vars && have_unknowns) {
                    return Err(err(head.line, head.col, ErrorClass::DuplicateName, format!("`{kw}` declared twice")));
                }
                let mut names = Vec::new();
                for t in &toks[1..] {
                    match &t.tok {
                        Tok::Ident(s) => {
                            if names.contains(s) || variables.contains(s) || unknowns.contains(s) {
                                return Err(err(
                                    t.line,
                                    t.col,
                                    ErrorClass::DuplicateName,
                                    format!("`{s}` declared twice"),
                                ));
                            }
                            if ["vars", "unknown", "unknowns", "eq", "option"].contains(&s.as_str()) {
                                return Err(err(t.line, t.col, ErrorClass::Syntax, format!("`{s}` is reserved")));
                            }
                            names.push(s.clone());
                        }
                        Tok::End => {}
                        other => {
                            return Err(err(
                                t.line,
                                t.col,
                                ErrorClass::Syntax,
                                format!("expected a name, found {}", describe(other)),
                            ));
                        }
                    }
                }
                if names.is_empty() {
                    return Err(err(
                        head.line,
                        head.col,
                        ErrorClass::Syntax,
                        format!("`{kw}` needs at least one name"),
                    ));
                }
                if is_vars {
                    if names.len() > MAX_VARS {
                        return Err(err(
                            head.line,
                            head.col,
                            ErrorClass::TooManyVariables,
                            format!("at most {MAX_VARS} variables"),
                        ));
                    }
                    variables = names;
                    have_vars = true;
                } else {
                    unknowns = names;
                    have_unknowns = true;
                }
            }
            "option" => {
                let name_tok = &toks[1];
                let Tok::Ident(name) = &name_tok.tok else {
                    return Err(err(name_tok.line, name_tok.col, ErrorClass::Syntax, "expected an option name"));
                };
                if toks[2].tok != Tok::Sym('=') {
                    return Err(err(toks[2].line, toks[2].col, ErrorClass::Syntax, "expected `=`"));
                }
                let value = &toks[3];
                if toks[4..].iter().any(|t| t.tok != Tok::End) {
                    let t = &toks[4];
                    return Err(err(t.line, t.col, ErrorClass::Syntax, format!("unexpected {}", describe(&t.tok))));
                }
                match name.as_str() {
                    "max_order" => options.max_order = Some(parse_usize(value)? as usize),
                    "depth" => options.depth = Some(parse_usize(value)? as usize),
                    "seed" => options.seed = Some(parse_usize(value)?),
                    "retry_cap" => options.retry_cap = Some(parse_usize(value)? as usize),
                    "shared_sources" => {
                        options.shared_sources = match &value.tok {
                            Tok::Ident(s) if s == "true" => true,
                            Tok::Ident(s) if s == "false" => false,
                            other => {
                                return Err(err(
                                    value.line,
                                    value.col,
                                    ErrorClass::BadOption,
                                    format!("expected true or false, found {}", describe(other)),
                                ));
                            }
                        }
                    }
                    other => {
                        return Err(err(
                            name_tok.line,
                            name_tok.col,
                            ErrorClass::BadOption,
                            format!("unknown option `{other}`"),
                        ));
                    }
                }
            }
            "eq" => {
                if !have_vars || !have_unknowns {
                    return Err(err(
                        head.line,
                        head.col,
                        ErrorClass::MissingDeclaration,
                        "`vars` and `unknown` must precede equations",
                    ));
                }
                let mut pos = 1;
                let label = match &toks[pos].tok {
                    Tok::Ident(l) => {
                        pos += 1;
                        if !labels.insert(l.clone()) {
                            let t = &toks[1];
                            return Err(err(
                                t.line,
                                t.col,
                                ErrorClass::DuplicateLabel,
                                format!("label `{l}` used twice"),
                            ));
                        }
                        Some(l.clone())
                    }
                    _ => None,
                };
                let mut p = Parser { toks: toks[pos..].to_vec(), pos: 0, vars: &variables, unknowns: &unknowns };
                p.expect_sym(':')?;
                let lhs_tok = p.peek().clone();
                let lhs = match p.expr()? {
                    Val::Lin(f) => f,
                    Val::Coef(c) if c.is_zero() => Form::new(),
                    Val::Coef(_) => {
                        return Err(err(
                            lhs_tok.line,
                            lhs_tok.col,
                            ErrorClass::ConstantTerm,
                            "left side has no unknown",
                        ));
                    }
                };
                p.expect_sym('=')?;
                let rt = p.next();
                let source = match &rt.tok {
                    Tok::Int(v) if v.is_zero() => None,
                    Tok::Ident(s) => {
                        if variables.contains(s) || unknowns.contains(s) {
                            return Err(err(
                                rt.line,
                                rt.col,
                                ErrorClass::DuplicateName,
                                format!("source `{s}` clashes with a declared name"),
                            ));
                        }
                        Some(s.clone())
                    }
                    other => {
                        return Err(err(
                            rt.line,
                            rt.col,
                            ErrorClass::Syntax,
                            format!("expected a source name or 0, found {}", describe(other)),
                        ));
                    }
                };
                let end = p.next();
                if end.tok != Tok::End {
                    return Err(err(
                        end.line,
                        end.col,
                        ErrorClass::Syntax,
                        format!("unexpected {}", describe(&end.tok)),
                    ));
                }
                let spec = EquationSpec { label, lhs, source };
                if let Some(s) = &spec.source {
                    if let Some(&order) = source_orders.get(s) {
                        if !options.shared_sources {
                            return Err(err(
                                rt.line,
                                rt.col,
                                ErrorClass::SharedSource,
                                format!("source `{s}` already used; set `option shared_sources = true`"),
                            ));
                        }
                        if order != spec.order() {
                            return Err(err(
                                rt.line,
                                rt.col,
                                ErrorClass::SharedSource,
                                format!("source `{s}` shared by equations of different orders"),
                            ));
                        }
                    }
                    source_orders.insert(s.clone(), spec.order());
                }
                equations.push(spec);
            }
            other => {
                return Err(err(head.line, head.col, ErrorClass::Syntax, format!("unknown statement `{other}`")));
            }
        }
    }
    if !have_vars {
        return Err(err(1, 1, ErrorClass::MissingDeclaration, "no `vars` declaration"));
    }
    if !have_unknowns {
        return Err(err(1, 1, ErrorClass::MissingDeclaration, "no `unknown` declaration"));
    }
    let clash = unknowns.iter().chain(&variables).find(|name| source_orders.contains_key(*name));
    if let Some(name) = clash {
        return Err(err(1, 1, ErrorClass::DuplicateName, format!("source `{name}` clashes with a declared name")));
    }
    Ok(SystemFile { variables, unknowns, equations, options })
}
