//! The `gridfn v1` text format.
//!
//! ```text
//! gridfn v1 n=2 lo=-1,-1 hi=1,1 N=4,4
//! 0
//! 0.25
//! inf
//! ...
//! ```
//!
//! One sample per line in row-major order. Numbers are written in the
//! shortest form that parses back to the same `f64`, so a write/read cycle
//! is bit-exact.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFn};

const MAGIC: &str = "gridfn v1";

fn join(xs: impl IntoIterator<Item = String>) -> String {
    xs.into_iter().collect::<Vec<_>>().join(",")
}

fn fmt_sample(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

pub fn to_string(f: &GridFn) -> String {
    let g = f.grid();
    let mut s = format!(
        "{MAGIC} n={} lo={} hi={} N={}\n",
        g.dims(),
        join(g.lo().iter().map(|v| format!("{v}"))),
        join(g.hi().iter().map(|v| format!("{v}"))),
        join(g.counts().iter().map(|v| v.to_string())),
    );
    for &v in f.values() {
        let _ = writeln!(s, "{}", fmt_sample(v));
    }
    s
}

pub fn write<W: Write>(f: &GridFn, mut w: W) -> Result<()> {
    w.write_all(to_string(f).as_bytes())?;
    Ok(())
}

pub fn write_file(f: &GridFn, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_string(f))?;
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, key: &str) -> Result<Vec<T>> {
    if s.is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad {key} entry {t:?}")))
        })
        .collect()
}

fn parse_header(line: &str) -> Result<Grid> {
    let rest = line
        .trim()
        .strip_prefix(MAGIC)
        .ok_or_else(|| Error::Parse(format!("expected header starting with {MAGIC:?}")))?;
    let (mut n, mut lo, mut hi, mut counts) = (None, None, None, None);
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
        match key {
            "n" => {
                n = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad n {value:?}")))?,
                )
            }
            "lo" => lo = Some(parse_list::<f64>(value, "lo")?),
            "hi" => hi = Some(parse_list::<f64>(value, "hi")?),
            "N" => counts = Some(parse_list::<usize>(value, "N")?),
            _ => return Err(Error::Parse(format!("unknown header field {key:?}"))),
        }
    }
    let missing = |k: &str| Error::Parse(format!("header is missing {k}"));
    let n = n.ok_or_else(|| missing("n"))?;
    let lo = lo.ok_or_else(|| missing("lo"))?;
    let hi = hi.ok_or_else(|| missing("hi"))?;
    let counts = counts.ok_or_else(|| missing("N"))?;
    if lo.len() != n {
        return Err(Error::Parse(format!("n={n} but {} lower bounds", lo.len())));
    }
    Grid::new(lo, hi, counts)
}

fn parse_sample(s: &str) -> Result<f64> {
    match s {
        "inf" | "+inf" => Ok(f64::INFINITY),
        _ => {
            let v: f64 = s.parse().map_err(|_| Error::Parse(format!("bad sample {s:?}")))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("bad sample {s:?}")));
            }
            Ok(v)
        }
    }
}

pub fn read<R: BufRead>(r: R) -> Result<GridFn> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))??;
    let grid = parse_header(&header)?;
    let mut values = Vec::with_capacity(grid.len());
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        values.push(parse_sample(t)?);
    }
    if values.len() != grid.len() {
        return Err(Error::Parse(format!(
            "expected {} samples, found {}",
            grid.len(),
            values.len()
        )));
    }
    GridFn::new(grid, values).map_err(|e| Error::Parse(e.to_string()))
}

pub fn from_str(s: &str) -> Result<GridFn> {
    read(s.as_bytes())
}

pub fn read_file(path: impl AsRef<Path>) -> Result<GridFn> {
    let file = std::fs::File::open(path)?;
    read(std::io::BufReader::new(file))
}
