//! Plain-text serialization of forms, multi-forms and tensors.
//!
//! ```text
//! # poly n=2 d=3 field=real
//! 3,0: 1
//! 1,2: -3
//! # multipoly ns=2,3 ds=1,2 field=complex
//! 1,0;0,1,1: 0.5,-2
//! # tensor shape=2,2 field=real
//! 0,0: 1
//! 1,1: 1
//! ```
//!
//! A header opens a record; each following line sets one coefficient
//! (`re` or `re,im`). Omitted coefficients are zero. Blank lines and lines
//! starting with `//` are ignored. Writers emit nonzero entries only, in
//! storage order, with round-trip float formatting.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::Sample;
use crate::polynomial::{HomogPoly, MultiHomogPoly};
use crate::tensor::{Field, Tensor, C64};

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn write_coeff(out: &mut String, c: C64, field: Field) {
    match field {
        Field::Real => write!(out, "{:?}", c.re).unwrap(),
        Field::Complex => write!(out, "{:?},{:?}", c.re, c.im).unwrap(),
    }
    out.push('\n');
}

pub fn write_poly(f: &HomogPoly) -> String {
    let mut out = format!("# poly n={} d={} field={}\n", f.n(), f.degree(), f.field());
    for (alpha, &c) in f.monomials().exponents().iter().zip(f.coeffs()) {
        if c != C64::new(0.0, 0.0) {
            write!(out, "{}: ", join(alpha)).unwrap();
            write_coeff(&mut out, c, f.field());
        }
    }
    out
}

pub fn write_multi(f: &MultiHomogPoly) -> String {
    let mut out = format!("# multipoly ns={} ds={} field={}\n", join(&f.ns()), join(&f.ds()), f.field());
    for (flat, &c) in f.coeffs().iter().enumerate() {
        if c == C64::new(0.0, 0.0) {
            continue;
        }
        let blocks: Vec<String> = f
            .block_indices(flat)
            .iter()
            .enumerate()
            .map(|(j, &i)| join(f.block(j).exponent(i)))
            .collect();
        write!(out, "{}: ", blocks.join(";")).unwrap();
        write_coeff(&mut out, c, f.field());
    }
    out
}

pub fn write_tensor(t: &Tensor) -> String {
    let mut out = format!("# tensor shape={} field={}\n", join(t.shape()), t.field());
    for (flat, &c) in t.data().iter().enumerate() {
        if c != C64::new(0.0, 0.0) {
            write!(out, "{}: ", join(&t.multi_index(flat))).unwrap();
            write_coeff(&mut out, c, t.field());
        }
    }
    out
}

pub fn write_sample(s: &Sample) -> String {
    match s {
        Sample::Tensor(t) => write_tensor(t),
        Sample::Poly(f) => write_poly(f),
        Sample::Multi(f) => write_multi(f),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| p.trim().parse::<T>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Parse(format!("line {line}: bad {what} list `{s}`")))
}

fn parse_coeff(s: &str, field: Field, line: usize) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>()
            .map_err(|_| Error::Parse(format!("line {line}: bad number `{p}`")))
    };
    match (parts.as_slice(), field) {
        ([re], _) => Ok(C64::new(num(re)?, 0.0)),
        ([re, im], Field::Complex) => Ok(C64::new(num(re)?, num(im)?)),
        ([_, _], Field::Real) => Err(Error::Parse(format!("line {line}: imaginary part in a real record"))),
        _ => Err(Error::Parse(format!("line {line}: expected `re` or `re,im`, got `{s}`"))),
    }
}

enum Header {
    Poly { n: usize, d: u32 },
    Multi { ns: Vec<usize>, ds: Vec<u32> },
    Tensor { shape: Vec<usize> },
}

fn parse_header(text: &str, line: usize) -> Result<(Header, Field)> {
    let mut words = text.split_whitespace();
    let kind = words
        .next()
        .ok_or_else(|| Error::Parse(format!("line {line}: empty header")))?;
    let mut kv = HashMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {line}: expected key=value, got `{w}`")))?;
        kv.insert(k, v);
    }
    let get = |k: &str| {
        kv.get(k)
            .copied()
            .ok_or_else(|| Error::Parse(format!("line {line}: header lacks `{k}=`")))
    };
    let field: Field = get("field")?.parse().map_err(|_| Error::Parse(format!("line {line}: bad field")))?;
    let header = match kind {
        "poly" => Header::Poly {
            n: get("n")?.parse().map_err(|_| Error::Parse(format!("line {line}: bad n")))?,
            d: get("d")?.parse().map_err(|_| Error::Parse(format!("line {line}: bad d")))?,
        },
        "multipoly" => Header::Multi {
            ns: parse_list(get("ns")?, "ns", line)?,
            ds: parse_list(get("ds")?, "ds", line)?,
        },
        "tensor" => Header::Tensor { shape: parse_list(get("shape")?, "shape", line)? },
        other => return Err(Error::Parse(format!("line {line}: unknown record kind `{other}`"))),
    };
    Ok((header, field))
}

fn build(header: &Header, field: Field, terms: &[(usize, String, C64)]) -> Result<Sample> {
    match header {
        Header::Poly { n, d } => {
            let terms = terms
                .iter()
                .map(|(line, key, c)| Ok((parse_list::<u32>(key, "exponent", *line)?, *c)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Sample::Poly(HomogPoly::from_terms(*n, *d, field, &terms)?))
        }
        Header::Multi { ns, ds } => {
            let terms = terms
                .iter()
                .map(|(line, key, c)| {
                    let blocks = key
                        .split(';')
                        .map(|b| parse_list::<u32>(b, "exponent", *line))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((blocks, *c))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Sample::Multi(MultiHomogPoly::from_terms(ns, ds, field, &terms)?))
        }
        Header::Tensor { shape } => {
            let mut t = Tensor::zeros(shape.clone(), field)?;
            let mut data = t.data().to_vec();
            for (line, key, c) in terms {
                let idx = parse_list::<usize>(key, "index", *line)?;
                data[t.flat_index(&idx)?] += *c;
            }
            t = Tensor::new(shape.clone(), field, data)?;
            Ok(Sample::Tensor(t))
        }
    }
}

/// Parses every record in `text`, in order.
pub fn parse_records(text: &str) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    let mut current: Option<(Header, Field)> = None;
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with("//") {
            continue;
        }
        if let Some(h) = s.strip_prefix('#') {
            if let Some((header, field)) = current.take() {
                out.push(build(&header, field, &terms)?);
                terms.clear();
            }
            current = Some(parse_header(h, line)?);
            continue;
        }
        let Some((_, field)) = &current else {
            return Err(Error::Parse(format!("line {line}: coefficient before any header")));
        };
        let (key, value) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("line {line}: expected `index: value`")))?;
        terms.push((line, key.trim().to_string(), parse_coeff(value.trim(), *field, line)?));
    }
    match current {
        Some((header, field)) => out.push(build(&header, field, &terms)?),
        None => return Err(Error::Parse("no record header found".into())),
    }
    Ok(out)
}

/// Parses text holding exactly one record.
pub fn parse_record(text: &str) -> Result<Sample> {
    let mut all = parse_records(text)?;
    if all.len() != 1 {
        return Err(Error::Parse(format!("expected one record, found {}", all.len())));
    }
    Ok(all.pop().unwrap())
}
