//! Text formats: PIRCODE and PIRPLAN files, rate tables, and JSON-lines
//! transcripts.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use pirarray::arith::{to_decimal_string, to_fraction_string, ExactRational};
use pirarray::bounds::TableEntry;
use pirarray::simulate::SessionTranscript;
use pirarray::{ArrayCode, Column, ColumnSet, PartVector, RecoveryPlan};

pub const CODE_HEADER: &str = "PIRCODE v1";
pub const PLAN_HEADER: &str = "PIRPLAN v1";

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(#[from] pirarray::Error),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

/// Non-empty lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_index(line: usize, token: &str, what: &str) -> Result<usize, FormatError> {
    token
        .trim()
        .parse::<usize>()
        .map_err(|_| syntax(line, format!("bad {what} '{}'", token.trim())))
}

fn parse_header_fields(line: usize, text: &str) -> Result<(usize, usize, usize), FormatError> {
    let mut p = None;
    let mut t = None;
    let mut m = None;
    for field in text.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected key=value, got '{field}'")))?;
        let slot = match key {
            "p" => &mut p,
            "t" => &mut t,
            "m" => &mut m,
            _ => return Err(syntax(line, format!("unknown field '{key}'"))),
        };
        if slot.replace(parse_index(line, value, key)?).is_some() {
            return Err(syntax(line, format!("field '{key}' given twice")));
        }
    }
    match (p, t, m) {
        (Some(p), Some(t), Some(m)) => Ok((p, t, m)),
        _ => Err(syntax(line, "expected 'p=<int> t=<int> m=<int>'")),
    }
}

fn parse_cell(line: usize, text: &str, p: usize) -> Result<PartVector, FormatError> {
    let mut seen = BTreeSet::new();
    for token in text.split('+') {
        let i = parse_index(line, token, "part index")?;
        if i == 0 || i > p {
            return Err(syntax(line, format!("part index {i} outside 1..={p}")));
        }
        if !seen.insert(i - 1) {
            return Err(syntax(
                line,
                format!("duplicate term {i} in '{text}' cancels to a zero coefficient"),
            ));
        }
    }
    Ok(PartVector::from_indices(p, seen)?)
}

pub fn parse_code(text: &str) -> Result<ArrayCode, FormatError> {
    let mut it = lines(text);
    match it.next() {
        Some((_, CODE_HEADER)) => {}
        Some((n, other)) => return Err(syntax(n, format!("expected '{CODE_HEADER}', got '{other}'"))),
        None => return Err(syntax(1, "empty input")),
    }
    let (n, dims) = it.next().ok_or_else(|| syntax(2, "missing dimension line"))?;
    let (p, t, m) = parse_header_fields(n, dims)?;
    let mut columns = Vec::with_capacity(m);
    for (n, line) in it {
        if columns.len() == m {
            return Err(syntax(n, format!("more than m={m} columns")));
        }
        let cells = line
            .split(';')
            .map(|c| parse_cell(n, c, p))
            .collect::<Result<Vec<_>, _>>()?;
        if cells.len() != t {
            return Err(syntax(n, format!("column has {} cells, expected t={t}", cells.len())));
        }
        columns.push(Column::new(cells));
    }
    if columns.len() != m {
        return Err(syntax(
            text.lines().count(),
            format!("found {} columns, expected m={m}", columns.len()),
        ));
    }
    Ok(ArrayCode::new(p, t, columns)?)
}

pub fn format_cell(cell: &PartVector) -> String {
    cell.support()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join("+")
}

pub fn write_code(code: &ArrayCode) -> String {
    let mut out = format!("{CODE_HEADER}\np={} t={} m={}\n", code.p(), code.t(), code.m());
    for col in code.columns() {
        let cells: Vec<String> = col.cells().iter().map(format_cell).collect();
        out.push_str(&cells.join(";"));
        out.push('\n');
    }
    out
}

/// Parses a plan for a code with `p` parts; parts without a line get no sets.
pub fn parse_plan(text: &str, p: usize) -> Result<RecoveryPlan, FormatError> {
    let mut it = lines(text);
    match it.next() {
        Some((_, PLAN_HEADER)) => {}
        Some((n, other)) => return Err(syntax(n, format!("expected '{PLAN_HEADER}', got '{other}'"))),
        None => return Err(syntax(1, "empty input")),
    }
    let mut plan = RecoveryPlan::empty(p);
    let mut seen = BTreeSet::new();
    for (n, line) in it {
        let rest = line
            .strip_prefix("part")
            .ok_or_else(|| syntax(n, "expected 'part <i>: ...'"))?;
        let (idx, sets) = rest.split_once(':').ok_or_else(|| syntax(n, "missing ':'"))?;
        let i = parse_index(n, idx, "part index")?;
        if i == 0 || i > p {
            return Err(syntax(n, format!("part {i} outside 1..={p}")));
        }
        if !seen.insert(i) {
            return Err(syntax(n, format!("part {i} listed twice")));
        }
        let sets = sets.trim();
        if sets.is_empty() {
            continue;
        }
        let parsed = sets
            .split(';')
            .map(|s| parse_set(n, s))
            .collect::<Result<Vec<_>, _>>()?;
        plan.set_part(i - 1, parsed);
    }
    Ok(plan)
}

fn parse_set(line: usize, text: &str) -> Result<ColumnSet, FormatError> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| syntax(line, format!("expected '{{c,...}}', got '{}'", text.trim())))?;
    if inner.trim().is_empty() {
        return Ok(ColumnSet::new([]));
    }
    let cols = inner
        .split(',')
        .map(|c| {
            let c = parse_index(line, c, "column index")?;
            if c == 0 {
                return Err(syntax(line, "column indices are 1-based"));
            }
            Ok(c - 1)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ColumnSet::new(cols))
}

pub fn format_set(set: &ColumnSet) -> String {
    let cols: Vec<String> = set.iter().map(|c| (c + 1).to_string()).collect();
    format!("{{{}}}", cols.join(","))
}

pub fn write_plan(plan: &RecoveryPlan) -> String {
    let mut out = format!("{PLAN_HEADER}\n");
    for i in 0..plan.parts() {
        let sets: Vec<String> = plan.sets_for(i).iter().map(format_set).collect();
        let _ = writeln!(out, "part {}: {}", i + 1, sets.join(";"));
    }
    out
}

pub fn table_csv(entries: &[TableEntry], precision: u32) -> String {
    let mut out = String::from("s,t,numerator,denominator,decimal\n");
    for e in entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.s,
            e.t,
            e.rate.numer(),
            e.rate.denom(),
            to_decimal_string(&e.rate, precision)
        );
    }
    out
}

/// Decimal rounded half-to-even with trailing zeros dropped, as the
/// reference table prints them.
pub fn short_decimal(r: &ExactRational, precision: u32) -> String {
    let s = to_decimal_string(r, precision);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// The reference layout: exact fractions in the `t = 1` row and the `s = 2`
/// column, decimals elsewhere.
pub fn table_cell(e: &TableEntry, precision: u32) -> String {
    if e.t == 1 || e.s == 2 {
        to_fraction_string(&e.rate)
    } else {
        short_decimal(&e.rate, precision)
    }
}

/// Rows by `t`, columns by `s`, right-aligned.
pub fn table_text(entries: &[TableEntry], precision: u32) -> String {
    let ss: BTreeSet<u64> = entries.iter().map(|e| e.s).collect();
    let ts: BTreeSet<u64> = entries.iter().map(|e| e.t).collect();
    let cell = |s: u64, t: u64| {
        entries
            .iter()
            .find(|e| e.s == s && e.t == t)
            .map(|e| table_cell(e, precision))
            .unwrap_or_default()
    };
    let head = "t\\s".to_string();
    let first_width = ts
        .iter()
        .map(|t| t.to_string().len())
        .chain([head.len()])
        .max()
        .unwrap_or(0);
    let widths: Vec<usize> = ss
        .iter()
        .map(|&s| {
            ts.iter()
                .map(|&t| cell(s, t).len())
                .chain([s.to_string().len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = format!("{head:>first_width$}");
    for (s, w) in ss.iter().zip(&widths) {
        let _ = write!(out, "  {s:>w$}");
    }
    out.push('\n');
    for &t in &ts {
        let _ = write!(out, "{t:>first_width$}");
        for (&s, w) in ss.iter().zip(&widths) {
            let _ = write!(out, "  {:>w$}", cell(s, t));
        }
        out.push('\n');
    }
    out
}

/// One JSON object per event.
pub fn transcript_jsonl(sessions: &[SessionTranscript]) -> String {
    let mut out = String::new();
    for s in sessions {
        for e in &s.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
    }
    out
}
