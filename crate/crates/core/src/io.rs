//! Plain-text formats for distributions, preference tables, edge lists,
//! solver output and comparison reports.
//!
//! Every writer takes a list of header lines that are emitted first as `#`
//! comments. Parsers skip blank lines and `#` comments except for the few
//! `# key = value` headers they understand.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::analysis::ComparisonReport;
use crate::error::{Error, Result};
use crate::growth::{GrowthStats, MultiGraph};
use crate::model::{DegreeDistribution, PreferenceFunction, Tail};
use crate::stationary::StationarySolution;

/// Distributions whose mass is off by at most this much are renormalized.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-6;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn write_header(w: &mut impl Write, header: &[String]) -> Result<()> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

/// `(line number, trimmed content)` of every data line.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// `(line number, key, value)` of every `# key = value` comment.
fn header_pairs(text: &str) -> impl Iterator<Item = (usize, &str, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let (key, value) = l.trim().strip_prefix('#')?.split_once('=')?;
        Some((i + 1, key.trim(), value.trim()))
    })
}

fn two_fields(line: usize, l: &str, sep: Option<char>) -> Result<(&str, &str)> {
    let mut it: Box<dyn Iterator<Item = &str>> = match sep {
        Some(c) => Box::new(l.split(c).map(str::trim)),
        None => Box::new(l.split_whitespace()),
    };
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(parse_err(line, format!("expected two fields, got {l:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| parse_err(line, format!("invalid {what} {s:?}")))
}

/// Rows of `k<TAB>value` or `k,value`; a leading CSV header such as
/// `k,Q_k` is skipped.
fn kv_rows(text: &str) -> Result<Vec<(usize, u32, f64)>> {
    data_lines(text)
        .enumerate()
        .filter(|(i, (_, l))| !(*i == 0 && l.starts_with("k,")))
        .map(|(_, (line, l))| {
            let sep = l.contains(',').then_some(',');
            let (k, v) = two_fields(line, l, sep)?;
            Ok((line, parse_num(line, k, "degree")?, parse_num(line, v, "value")?))
        })
        .collect()
}

/// Parses `k<TAB>value` lines in any order. Solution files written by
/// [`write_solution`] are accepted too.
pub fn parse_distribution(text: &str) -> Result<DegreeDistribution> {
    let rows = kv_rows(text)?;
    DegreeDistribution::new_renormalized(rows.into_iter().map(|(_, k, v)| (k, v)), RENORMALIZE_TOLERANCE)
}

pub fn read_distribution(path: impl AsRef<Path>) -> Result<DegreeDistribution> {
    parse_distribution(&fs::read_to_string(path)?)
}

pub fn write_distribution(w: &mut impl Write, d: &DegreeDistribution, header: &[String]) -> Result<()> {
    write_header(w, header)?;
    for (k, p) in d.iter() {
        writeln!(w, "{k}\t{p}")?;
    }
    Ok(())
}

/// Parses a preference table. Recognized headers are `# g = <k>`,
/// `# M = <k|inf>` and `# tail = affine <intercept> <slope>`; the table
/// itself must cover every degree from `g` to its last row.
pub fn parse_preference(text: &str) -> Result<PreferenceFunction> {
    let mut g: Option<u32> = None;
    let mut m: Option<Option<u32>> = None;
    let mut tail = Tail::Zero;
    for (line, key, value) in header_pairs(text) {
        match key {
            "g" => g = Some(parse_num(line, value, "g")?),
            "M" if value == "inf" => m = Some(None),
            "M" => m = Some(Some(parse_num(line, value, "M")?)),
            "tail" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                tail = match parts.as_slice() {
                    ["zero"] => Tail::Zero,
                    ["affine", c0, c1] => Tail::Affine {
                        intercept: parse_num(line, c0, "intercept")?,
                        slope: parse_num(line, c1, "slope")?,
                    },
                    _ => return Err(parse_err(line, format!("unknown tail {value:?}"))),
                };
            }
            _ => {}
        }
    }
    let mut rows = kv_rows(text)?;
    rows.sort_by_key(|r| r.1);
    let g = match (g, rows.first()) {
        (Some(g), _) => g,
        (None, Some(first)) => first.1,
        (None, None) => return Err(parse_err(0, "empty preference table without a g header")),
    };
    let mut table = Vec::with_capacity(rows.len());
    for &(line, k, v) in &rows {
        let expected = g + table.len() as u32;
        if k != expected {
            return Err(parse_err(line, format!("expected degree {expected}, found {k}")));
        }
        table.push(v);
    }
    let last = (g + table.len() as u32).checked_sub(1);
    match (m, tail) {
        (Some(Some(m)), _) if Some(m) != last || table.is_empty() => {
            let end = last.map_or_else(|| "before g".to_string(), |l| l.to_string());
            return Err(parse_err(0, format!("M = {m} but the table ends at {end}")));
        }
        (Some(Some(_)), Tail::Affine { .. }) => return Err(parse_err(0, "a finite M cannot have a tail")),
        (Some(None), Tail::Zero) => return Err(parse_err(0, "M = inf needs a tail line")),
        _ => {}
    }
    PreferenceFunction::with_tail(g, table, tail)
}

pub fn read_preference(path: impl AsRef<Path>) -> Result<PreferenceFunction> {
    parse_preference(&fs::read_to_string(path)?)
}

pub fn write_preference(w: &mut impl Write, f: &PreferenceFunction, header: &[String]) -> Result<()> {
    write_header(w, header)?;
    writeln!(w, "# g = {}", f.min_degree())?;
    match f.tail() {
        Tail::Zero => writeln!(w, "# M = {}", f.table_end() - 1)?,
        Tail::Affine { intercept, slope } => {
            writeln!(w, "# M = inf")?;
            writeln!(w, "# tail = affine {intercept} {slope}")?;
        }
    }
    for (i, v) in f.table().iter().enumerate() {
        writeln!(w, "{}\t{v}", f.min_degree() + i as u32)?;
    }
    Ok(())
}

/// One `u<TAB>v` line per edge in insertion order, preceded by a
/// `# vertices = N` header so isolated vertices survive a round trip.
pub fn write_edge_list(w: &mut impl Write, g: &MultiGraph, header: &[String]) -> Result<()> {
    write_header(w, header)?;
    writeln!(w, "# vertices = {}", g.vertex_count())?;
    let mut buf = String::with_capacity(16 * g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(buf, "{u}\t{v}");
    }
    w.write_all(buf.as_bytes())?;
    Ok(())
}

pub fn parse_edge_list(text: &str) -> Result<MultiGraph> {
    let mut vertices: Option<u32> = None;
    for (line, key, value) in header_pairs(text) {
        if key == "vertices" {
            vertices = Some(parse_num(line, value, "vertex count")?);
        }
    }
    let mut edges = Vec::new();
    for (line, l) in data_lines(text) {
        let (u, v) = two_fields(line, l, None)?;
        edges.push((
            parse_num::<u32>(line, u, "vertex")?,
            parse_num::<u32>(line, v, "vertex")?,
        ));
    }
    let needed = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    MultiGraph::from_edges(vertices.unwrap_or(needed), edges)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<MultiGraph> {
    parse_edge_list(&fs::read_to_string(path)?)
}

pub fn write_stats(w: &mut impl Write, stats: &GrowthStats, extra: &[(&str, String)]) -> Result<()> {
    writeln!(w, "steps={}", stats.steps)?;
    writeln!(w, "monad_steps={}", stats.monad_steps)?;
    writeln!(w, "nad_steps={}", stats.nad_steps)?;
    writeln!(w, "realized_vertices={}", stats.realized_vertices)?;
    writeln!(w, "realized_edges={}", stats.realized_edges)?;
    writeln!(w, "rng_seed={}", stats.rng_seed)?;
    for (key, value) in extra {
        writeln!(w, "{key}={value}")?;
    }
    Ok(())
}

/// CSV `k,Q_k` followed by a comment block with the solver diagnostics.
pub fn write_solution(w: &mut impl Write, sol: &StationarySolution, header: &[String]) -> Result<()> {
    write_header(w, header)?;
    writeln!(w, "k,Q_k")?;
    for k in sol.q.support_min()..=sol.q.support_max() {
        writeln!(w, "{k},{}", sol.q.prob(k))?;
    }
    writeln!(w, "# mean_f = {}", sol.mean_f)?;
    writeln!(w, "# balance_residual = {:e}", sol.balance_residual)?;
    writeln!(w, "# tail_mass_bound = {:e}", sol.tail_mass_bound)?;
    writeln!(w, "# iterations = {}", sol.iterations)?;
    Ok(())
}

/// CSV `k,empirical,theoretical,abs_error` over the union support, then one
/// `# name = value` line per summary entry.
pub fn write_report(
    w: &mut impl Write,
    empirical: &DegreeDistribution,
    theoretical: &DegreeDistribution,
    report: &ComparisonReport,
    summary: &[(&str, String)],
    header: &[String],
) -> Result<()> {
    write_header(w, header)?;
    writeln!(w, "k,empirical,theoretical,abs_error")?;
    for &(k, err) in &report.per_k_abs_error {
        writeln!(w, "{k},{},{},{err}", empirical.prob(k), theoretical.prob(k))?;
    }
    writeln!(w, "# tv = {}", report.tv_distance)?;
    writeln!(w, "# ks = {}", report.ks_statistic)?;
    for (key, value) in summary {
        writeln!(w, "# {key} = {value}")?;
    }
    Ok(())
}
