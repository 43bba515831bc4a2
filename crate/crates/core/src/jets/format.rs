//! Plain-text jet files.
//!
//! ```text
//! convexlab-jet 1
//! kind metric
//! dim 3
//! order 4
//! normal true
//! c 2 0 1 1 1 0 -3/7
//! ```
//!
//! Each `c` line is one coefficient of an upper-triangular entry: degree,
//! row, column, `dim` exponents, then an exact rational. Lines are written in
//! canonical order so that parse-then-write reproduces the input.

use num_traits::Zero;

use super::{CurvatureJet, MetricJet, SymPolyMatrix, Q};
use crate::algebra::poly::{mono_degree, MAX_VARS};
use crate::algebra::Poly;
use crate::error::{Error, Result};

pub const HEADER: &str = "convexlab-jet 1";

#[derive(Clone, Debug, PartialEq)]
pub enum JetFile {
    Metric(MetricJet),
    Curvature(CurvatureJet),
}

fn write_components(out: &mut String, dim: usize, first_deg: usize, comps: &[SymPolyMatrix]) {
    for (i, c) in comps.iter().enumerate() {
        let deg = first_deg + i;
        for a in 0..dim {
            for b in a..dim {
                for (mono, coef) in c[a][b].terms() {
                    out.push_str(&format!("c {deg} {a} {b}"));
                    for e in &mono[..dim] {
                        out.push_str(&format!(" {e}"));
                    }
                    out.push_str(&format!(" {}/{}\n", coef.numer(), coef.denom()));
                }
            }
        }
    }
}

pub fn write_metric(jet: &MetricJet) -> String {
    let mut out = format!(
        "{HEADER}\nkind metric\ndim {}\norder {}\nnormal {}\n",
        jet.dim(),
        jet.order(),
        jet.is_normal()
    );
    write_components(&mut out, jet.dim(), 1, jet.components());
    out
}

pub fn write_curvature(jet: &CurvatureJet) -> String {
    let mut out = format!("{HEADER}\nkind curvature\ndim {}\norder {}\n", jet.dim(), jet.order());
    write_components(&mut out, jet.dim(), 2, jet.components());
    out
}

pub fn write(file: &JetFile) -> String {
    match file {
        JetFile::Metric(j) => write_metric(j),
        JetFile::Curvature(j) => write_curvature(j),
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_rational(s: &str, line: usize) -> Result<Q> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n = n.parse().map_err(|_| perr(line, format!("bad numerator {n:?}")))?;
    let d: num_bigint::BigInt = d.parse().map_err(|_| perr(line, format!("bad denominator {d:?}")))?;
    if d.is_zero() {
        return Err(perr(line, "zero denominator"));
    }
    Ok(Q::new(n, d))
}

fn header_value<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str) -> Result<(usize, &'a str)> {
    let (no, l) = lines.next().ok_or_else(|| perr(0, format!("missing {key}")))?;
    let rest = l
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| perr(no, format!("expected `{key} <value>`")))?;
    Ok((no, rest.trim()))
}

pub fn parse(text: &str) -> Result<JetFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, l)) if l == HEADER => {}
        Some((no, l)) => return Err(perr(no, format!("expected header `{HEADER}`, got {l:?}"))),
        None => return Err(perr(0, "empty input")),
    }
    let (kno, kind) = header_value(&mut lines, "kind")?;
    let metric = match kind {
        "metric" => true,
        "curvature" => false,
        other => return Err(perr(kno, format!("unknown kind {other:?}"))),
    };
    let (dno, dim) = header_value(&mut lines, "dim")?;
    let dim: usize = dim.parse().map_err(|_| perr(dno, "bad dim"))?;
    if !(1..=MAX_VARS).contains(&dim) {
        return Err(perr(dno, format!("dim must be in 1..={MAX_VARS}")));
    }
    let (ono, order) = header_value(&mut lines, "order")?;
    let order: usize = order.parse().map_err(|_| perr(ono, "bad order"))?;
    if order > super::K_MAX {
        return Err(perr(ono, format!("order must be at most {}", super::K_MAX)));
    }
    let mut declared_normal = None;
    let first_deg = if metric { 1 } else { 2 };
    let ncomp = if metric { order } else { order.saturating_sub(1) };
    let mut comps: Vec<SymPolyMatrix> = vec![vec![vec![Poly::zero(); dim]; dim]; ncomp];
    for (no, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "normal" if metric && declared_normal.is_none() => {
                declared_normal = Some(match toks.get(1) {
                    Some(&"true") => true,
                    Some(&"false") => false,
                    _ => return Err(perr(no, "normal must be true or false")),
                });
            }
            "c" => {
                if toks.len() != 5 + dim {
                    return Err(perr(no, format!("coefficient line needs {} fields", 5 + dim)));
                }
                let num = |s: &str| s.parse::<usize>().map_err(|_| perr(no, format!("bad integer {s:?}")));
                let deg = num(toks[1])?;
                let a = num(toks[2])?;
                let b = num(toks[3])?;
                if deg < first_deg || deg >= first_deg + ncomp {
                    return Err(perr(no, format!("degree {deg} outside the jet")));
                }
                if a > b || b >= dim {
                    return Err(perr(no, "entry must satisfy row <= col < dim"));
                }
                let mut mono = [0u8; MAX_VARS];
                for (j, t) in toks[4..4 + dim].iter().enumerate() {
                    mono[j] = t.parse().map_err(|_| perr(no, format!("bad exponent {t:?}")))?;
                }
                if mono_degree(&mono) != deg {
                    return Err(perr(no, "exponents do not sum to the degree"));
                }
                let c = parse_rational(toks[4 + dim], no)?;
                let entry = &mut comps[deg - first_deg][a][b];
                if !entry.coeff(&mono).is_zero() {
                    return Err(perr(no, "duplicate coefficient"));
                }
                entry.add_term(mono, c);
            }
            other => return Err(perr(no, format!("unexpected line starting with {other:?}"))),
        }
    }
    for c in comps.iter_mut() {
        for a in 0..dim {
            for b in 0..a {
                c[a][b] = c[b][a].clone();
            }
        }
    }
    if metric {
        let jet = MetricJet::new(dim, comps)?;
        if let Some(n) = declared_normal {
            if n != jet.is_normal() {
                return Err(perr(0, format!("jet declared normal={n} but is not")));
            }
        }
        Ok(JetFile::Metric(jet))
    } else {
        Ok(JetFile::Curvature(CurvatureJet::new(dim, comps)?))
    }
}
