//! CPLEX LP text for legalization models, its reader, and `var value`
//! solution files from external solvers.

use std::collections::HashMap;
use std::fmt::Write as _;

use nsplace_core::milp::lp::{LinearProgram, Sense};
use nsplace_core::milp::MilpModel;
use nsplace_core::Placement;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LpFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unsupported section {0}")]
    Unsupported(String),
    #[error("solution names unknown variable {0}")]
    UnknownVariable(String),
}

fn syntax(line: usize, msg: impl Into<String>) -> LpFileError {
    LpFileError::Syntax { line, msg: msg.into() }
}

/// Terms per output line; keeps lines far below the format's length cap.
const TERMS_PER_LINE: usize = 8;

fn write_terms(s: &mut String, terms: impl Iterator<Item = (usize, f64)>, names: &[String]) {
    let mut written = 0;
    for (j, a) in terms {
        if a == 0.0 {
            continue;
        }
        if written > 0 && written % TERMS_PER_LINE == 0 {
            s.push_str("\n   ");
        }
        let sign = if a < 0.0 { '-' } else { '+' };
        let _ = write!(s, " {sign} {} {}", a.abs(), names[j]);
        written += 1;
    }
}

/// Bounds after folding rows with a single nonzero coefficient into them.
/// Returns the tightened boxes and which rows were folded. A row whose fold
/// would leave an empty box stays a row.
fn fold_single_variable_rows(lp: &LinearProgram) -> (Vec<(f64, f64)>, Vec<bool>) {
    let mut boxes: Vec<(f64, f64)> = lp.lower.iter().copied().zip(lp.upper.iter().copied()).collect();
    let mut folded = vec![false; lp.rows.len()];
    for (k, row) in lp.rows.iter().enumerate() {
        let mut nz = row.coefs.iter().filter(|(_, a)| *a != 0.0);
        let (Some(&(j, a)), None) = (nz.next(), nz.next()) else { continue };
        let v = row.rhs / a;
        let (mut lo, mut hi) = boxes[j];
        match (row.sense, a > 0.0) {
            (Sense::Eq, _) => (lo, hi) = (lo.max(v), hi.min(v)),
            (Sense::Le, true) | (Sense::Ge, false) => hi = hi.min(v),
            (Sense::Le, false) | (Sense::Ge, true) => lo = lo.max(v),
        }
        if lo <= hi {
            boxes[j] = (lo, hi);
            folded[k] = true;
        }
    }
    (boxes, folded)
}

fn bound_text(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        v.to_string()
    }
}

/// The model as CPLEX LP text. Rows with one nonzero coefficient are written
/// as bounds; zero coefficients are omitted.
pub fn export_lp(model: &MilpModel) -> String {
    let lp = &model.lp;
    let names = &model.names;
    let (boxes, folded) = fold_single_variable_rows(lp);
    let mut s = String::from("\\ legalization model\nMinimize\n obj:");
    if lp.cost.iter().all(|&c| c == 0.0) {
        if let Some(first) = names.first() {
            let _ = write!(s, " 0 {first}");
        }
    } else {
        write_terms(&mut s, lp.cost.iter().copied().enumerate(), names);
    }
    s.push('\n');
    if folded.iter().any(|f| !f) {
        s.push_str("Subject To\n");
        for (k, row) in lp.rows.iter().enumerate().filter(|(k, _)| !folded[*k]) {
            let _ = write!(s, " c{k}:");
            write_terms(&mut s, row.coefs.iter().copied(), names);
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(s, " {op} {}", row.rhs);
        }
    }
    s.push_str("Bounds\n");
    for (name, &(lo, hi)) in names.iter().zip(&boxes) {
        if lo == hi {
            let _ = writeln!(s, " {name} = {lo}");
        } else {
            let _ = writeln!(s, " {} <= {name} <= {}", bound_text(lo), bound_text(hi));
        }
    }
    if !model.binaries.is_empty() {
        s.push_str("Binaries\n");
        for chunk in model.binaries.chunks(TERMS_PER_LINE) {
            s.push(' ');
            s.push_str(&chunk.iter().map(|&b| names[b].as_str()).collect::<Vec<_>>().join(" "));
            s.push('\n');
        }
    }
    s.push_str("End\n");
    s
}

/// A program read back from LP text. Variables are numbered in order of
/// first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportedLp {
    pub lp: LinearProgram,
    pub names: Vec<String>,
    /// Ascending.
    pub binaries: Vec<usize>,
}

impl ImportedLp {
    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Label(String),
    Sign(f64),
    Op(Sense),
}

fn tokenize(line: usize, text: &str) -> Result<Vec<(usize, Tok)>, LpFileError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '+' || c == '-' {
            out.push((line, Tok::Sign(if c == '-' { -1.0 } else { 1.0 })));
            i += 1;
        } else if c == '<' || c == '>' || c == '=' {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j], '<' | '>' | '=') {
                j += 1;
            }
            let op: String = chars[i..j].iter().collect();
            let sense = match op.as_str() {
                "<" | "<=" | "=<" => Sense::Le,
                ">" | ">=" | "=>" => Sense::Ge,
                "=" => Sense::Eq,
                _ => return Err(syntax(line, format!("bad operator {op}"))),
            };
            out.push((line, Tok::Op(sense)));
            i = j;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            if j < chars.len() && matches!(chars[j], 'e' | 'E') {
                let mut k = j + 1;
                if k < chars.len() && matches!(chars[k], '+' | '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    j = k;
                }
            }
            let t: String = chars[i..j].iter().collect();
            out.push((line, Tok::Num(t.parse().map_err(|_| syntax(line, format!("bad number {t}")))?)));
            i = j;
        } else {
            let mut j = i;
            while j < chars.len() && !chars[j].is_whitespace() && !matches!(chars[j], '+' | '-' | '<' | '>' | '=' | ':') {
                j += 1;
            }
            let t: String = chars[i..j].iter().collect();
            if j < chars.len() && chars[j] == ':' {
                out.push((line, Tok::Label(t)));
                j += 1;
            } else if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
                out.push((line, Tok::Num(f64::INFINITY)));
            } else {
                out.push((line, Tok::Ident(t)));
            }
            i = j;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    End,
}

fn section_header(line: &str) -> Option<Section> {
    let l = line.trim().to_ascii_lowercase();
    let words: Vec<&str> = l.split_whitespace().collect();
    match words.as_slice() {
        ["minimize" | "minimise" | "minimum" | "min"] => Some(Section::Objective),
        ["subject", "to"] | ["such", "that"] | ["st"] | ["s.t."] => Some(Section::Constraints),
        ["bounds" | "bound"] => Some(Section::Bounds),
        ["binaries" | "binary" | "bin"] => Some(Section::Binaries),
        ["end"] => Some(Section::End),
        _ => None,
    }
}

struct Reader {
    lp: LinearProgram,
    names: Vec<String>,
    index: HashMap<String, usize>,
    binaries: Vec<usize>,
}

impl Reader {
    fn var(&mut self, name: &str) -> usize {
        if let Some(&j) = self.index.get(name) {
            return j;
        }
        let j = self.lp.add_var(0.0, 0.0, f64::INFINITY);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), j);
        j
    }

    /// Linear terms from `toks[*pos..]` up to a relational operator or the
    /// end. Constants are rejected.
    fn terms(&mut self, toks: &[(usize, Tok)], pos: &mut usize) -> Result<Vec<(usize, f64)>, LpFileError> {
        let mut out = Vec::new();
        let mut sign = 1.0;
        let mut coef: Option<f64> = None;
        while let Some((line, t)) = toks.get(*pos) {
            match t {
                Tok::Sign(s) => sign *= s,
                Tok::Num(v) => {
                    if coef.is_some() {
                        return Err(syntax(*line, "two numbers in a row"));
                    }
                    coef = Some(*v);
                }
                Tok::Ident(name) => {
                    let j = self.var(name);
                    out.push((j, sign * coef.unwrap_or(1.0)));
                    sign = 1.0;
                    coef = None;
                }
                Tok::Op(_) | Tok::Label(_) => break,
            }
            *pos += 1;
        }
        if coef.is_some() {
            let line = toks.get(pos.saturating_sub(1)).map_or(0, |t| t.0);
            return Err(syntax(line, "constant terms are not supported"));
        }
        Ok(out)
    }

    fn objective(&mut self, toks: &[(usize, Tok)]) -> Result<(), LpFileError> {
        let mut pos = usize::from(matches!(toks.first(), Some((_, Tok::Label(_)))));
        for (j, a) in self.terms(toks, &mut pos)? {
            self.lp.cost[j] += a;
        }
        if let Some((line, _)) = toks.get(pos) {
            return Err(syntax(*line, "unexpected token in objective"));
        }
        Ok(())
    }

    fn constraints(&mut self, toks: &[(usize, Tok)]) -> Result<(), LpFileError> {
        let mut pos = 0;
        while pos < toks.len() {
            if let Tok::Label(_) = toks[pos].1 {
                pos += 1;
            }
            let line = toks.get(pos).map_or(0, |t| t.0);
            let coefs = self.terms(toks, &mut pos)?;
            let Some((_, Tok::Op(sense))) = toks.get(pos) else {
                return Err(syntax(line, "constraint without a relational operator"));
            };
            pos += 1;
            let mut sign = 1.0;
            while let Some((_, Tok::Sign(s))) = toks.get(pos) {
                sign *= s;
                pos += 1;
            }
            let Some((_, Tok::Num(rhs))) = toks.get(pos) else {
                return Err(syntax(line, "constraint without a numeric right-hand side"));
            };
            pos += 1;
            self.lp.add_row(coefs, *sense, sign * rhs);
        }
        Ok(())
    }

    fn bound_line(&mut self, line: usize, toks: &[(usize, Tok)]) -> Result<(), LpFileError> {
        // Fold signs into the number that follows them.
        let mut items: Vec<Tok> = Vec::new();
        let mut sign = 1.0;
        for (_, t) in toks {
            match t {
                Tok::Sign(s) => sign *= s,
                Tok::Num(v) => {
                    items.push(Tok::Num(sign * v));
                    sign = 1.0;
                }
                other => items.push(other.clone()),
            }
        }
        let bad = || syntax(line, "malformed bound");
        match items.as_slice() {
            [Tok::Ident(x), Tok::Ident(free)] if free.eq_ignore_ascii_case("free") => {
                let j = self.var(x);
                self.lp.lower[j] = f64::NEG_INFINITY;
                self.lp.upper[j] = f64::INFINITY;
            }
            [Tok::Num(l), Tok::Op(Sense::Le), Tok::Ident(x), Tok::Op(Sense::Le), Tok::Num(u)] => {
                let j = self.var(x);
                self.lp.lower[j] = *l;
                self.lp.upper[j] = *u;
            }
            [Tok::Ident(x), Tok::Op(op), Tok::Num(v)] | [Tok::Num(v), Tok::Op(op), Tok::Ident(x)] => {
                let var_first = matches!(items[0], Tok::Ident(_));
                let j = self.var(x);
                match (op, var_first) {
                    (Sense::Eq, _) => {
                        self.lp.lower[j] = *v;
                        self.lp.upper[j] = *v;
                    }
                    (Sense::Le, true) | (Sense::Ge, false) => self.lp.upper[j] = *v,
                    (Sense::Ge, true) | (Sense::Le, false) => self.lp.lower[j] = *v,
                }
            }
            _ => return Err(bad()),
        }
        Ok(())
    }
}

pub fn import_lp(text: &str) -> Result<ImportedLp, LpFileError> {
    let mut r = Reader { lp: LinearProgram::default(), names: Vec::new(), index: HashMap::new(), binaries: Vec::new() };
    let mut section = Section::None;
    let mut objective = Vec::new();
    let mut constraints = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('\\').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        if let Some(s) = section_header(body) {
            section = s;
            continue;
        }
        let first = body.split_whitespace().next().unwrap_or("").to_ascii_lowercase();
        if matches!(first.as_str(), "maximize" | "maximise" | "maximum" | "max" | "generals" | "general" | "gen" | "semi-continuous" | "sos") {
            return Err(LpFileError::Unsupported(first));
        }
        match section {
            Section::None => return Err(syntax(line, "text before the objective section")),
            Section::End => return Err(syntax(line, "text after End")),
            Section::Objective => objective.extend(tokenize(line, body)?),
            Section::Constraints => constraints.extend(tokenize(line, body)?),
            Section::Bounds => {
                let toks = tokenize(line, body)?;
                r.bound_line(line, &toks)?;
            }
            Section::Binaries => {
                for name in body.split_whitespace() {
                    let j = r.var(name);
                    r.binaries.push(j);
                }
            }
        }
    }
    // Objective and rows first so variable numbering follows them.
    let mut probe = Reader { lp: LinearProgram::default(), names: Vec::new(), index: HashMap::new(), binaries: Vec::new() };
    probe.objective(&objective)?;
    probe.constraints(&constraints)?;
    for name in r.names.iter() {
        probe.var(name);
    }
    for j in 0..r.names.len() {
        let k = probe.index[&r.names[j]];
        probe.lp.lower[k] = r.lp.lower[j];
        probe.lp.upper[k] = r.lp.upper[j];
    }
    let mut binaries: Vec<usize> = r.binaries.iter().map(|&j| probe.index[&r.names[j]]).collect();
    binaries.sort_unstable();
    binaries.dedup();
    for &b in &binaries {
        probe.lp.lower[b] = probe.lp.lower[b].max(0.0);
        probe.lp.upper[b] = probe.lp.upper[b].min(1.0);
    }
    Ok(ImportedLp { lp: probe.lp, names: probe.names, binaries })
}

/// Read `var value` lines (an optional `=` between them is accepted) into a
/// vector indexed like `names`. Unlisted variables are 0.
pub fn parse_solution(text: &str, names: &[String]) -> Result<Vec<f64>, LpFileError> {
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(j, n)| (n.as_str(), j)).collect();
    let mut values = vec![0.0; names.len()];
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split(['#', '\\']).next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().filter(|t| *t != "=").collect();
        match toks.as_slice() {
            [] => {}
            [name, value] => {
                let j = *index.get(name).ok_or_else(|| LpFileError::UnknownVariable(name.to_string()))?;
                values[j] = value.parse().map_err(|_| syntax(i + 1, format!("bad value {value}")))?;
            }
            _ => return Err(syntax(i + 1, "expected `<var> <value>`")),
        }
    }
    Ok(values)
}

/// An external solver's solution for `model` as a placement.
pub fn import_solution(text: &str, model: &MilpModel) -> Result<Placement, LpFileError> {
    let values = parse_solution(text, &model.names)?;
    Ok(model.placement_from_values(&values))
}
