//! `WIGNER-GRID v1` and `CHAR-GRID v1` text files.
//!
//! ```text
//! WIGNER-GRID v1
//! x <min> <max> <n>
//! p <min> <max> <n>
//! # key=value
//! <n_p floats>      (one row per x sample)
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so save/load is
//! bit-exact. Complex tokens are `a+bi` / `a-bi`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use macroq_core::fock::C64;
use macroq_core::measure::Warning;
use macroq_core::phase_space::{Axis, CharGrid, Meta, WignerGrid};

pub const WIGNER_MAGIC: &str = "WIGNER-GRID v1";
pub const CHAR_MAGIC: &str = "CHAR-GRID v1";
pub const CONVENTION: &str = "alpha-plane";

#[derive(Debug, thiserror::Error)]
pub enum GridFileError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("unsupported convention `{0}` (only alpha-plane is implemented)")]
    Convention(String),
    #[error("grid integral {integral} deviates from 1 by more than 2%")]
    Normalization { integral: f64 },
    #[error(transparent)]
    Grid(#[from] macroq_core::Error),
}

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Turns the normalization warning into an error.
    pub strict: bool,
    pub norm_tol: f64,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            strict: false,
            norm_tol: 0.02,
        }
    }
}

fn malformed(line: usize, reason: impl Into<String>) -> GridFileError {
    GridFileError::Malformed {
        line,
        reason: reason.into(),
    }
}

fn write_axis(out: &mut String, label: &str, axis: &Axis) {
    writeln!(out, "{label} {} {} {}", axis.min, axis.max, axis.n).unwrap();
}

fn write_meta(out: &mut String, meta: &Meta) {
    let mut has_convention = false;
    for (k, v) in meta {
        has_convention |= k == "convention";
        writeln!(out, "# {k}={v}").unwrap();
    }
    if !has_convention {
        writeln!(out, "# convention={CONVENTION}").unwrap();
    }
}

pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", z.re, z.im.abs())
}

pub fn parse_complex(tok: &str) -> Option<C64> {
    let body = tok.strip_suffix('i')?;
    let bytes = body.as_bytes();
    // split at the last sign that is not a leading sign or an exponent sign
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split + 1..].parse().ok()?;
    Some(C64::new(re, if bytes[split] == b'-' { -im } else { im }))
}

pub fn wigner_to_string(grid: &WignerGrid) -> String {
    let mut out = String::new();
    writeln!(out, "{WIGNER_MAGIC}").unwrap();
    write_axis(&mut out, "x", &grid.x);
    write_axis(&mut out, "p", &grid.p);
    write_meta(&mut out, &grid.meta);
    for row in grid.values().chunks(grid.p.n) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

pub fn char_to_string(grid: &CharGrid) -> String {
    let mut out = String::new();
    writeln!(out, "{CHAR_MAGIC}").unwrap();
    write_axis(&mut out, "x", &grid.xr);
    write_axis(&mut out, "p", &grid.xi);
    write_meta(&mut out, &grid.meta);
    for row in grid.values().chunks(grid.xi.n) {
        let line: Vec<String> = row.iter().map(|&z| format_complex(z)).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

struct Parsed<T> {
    x: Axis,
    p: Axis,
    meta: Meta,
    values: Vec<T>,
}

fn parse_axis(line_no: usize, line: Option<&str>, label: &str) -> Result<Axis, GridFileError> {
    let line = line.ok_or_else(|| malformed(line_no, format!("missing `{label}` axis line")))?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != label {
        return Err(malformed(line_no, format!("expected `{label} <min> <max> <n>`")));
    }
    let min: f64 = toks[1].parse().map_err(|_| malformed(line_no, "bad axis min"))?;
    let max: f64 = toks[2].parse().map_err(|_| malformed(line_no, "bad axis max"))?;
    let n: usize = toks[3]
        .parse()
        .map_err(|_| malformed(line_no, "bad axis point count"))?;
    Ok(Axis::new(min, max, n)?)
}

fn parse_body<T>(
    text: &str,
    magic: &str,
    mut token: impl FnMut(&str) -> Option<T>,
) -> Result<Parsed<T>, GridFileError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim_end) != Some(magic) {
        return Err(malformed(1, format!("expected header `{magic}`")));
    }
    let x = parse_axis(2, lines.next(), "x")?;
    let p = parse_axis(3, lines.next(), "p")?;
    let mut meta = Meta::new();
    let mut values = Vec::with_capacity(x.n * p.n);
    let mut rows = 0;
    for (k, line) in lines.enumerate() {
        let line_no = k + 4;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if rows > 0 {
                return Err(malformed(line_no, "metadata after data rows"));
            }
            let (key, value) = rest
                .trim()
                .split_once('=')
                .ok_or_else(|| malformed(line_no, "metadata must be `# key=value`"))?;
            meta.push((key.trim().to_string(), value.trim().to_string()));
            continue;
        }
        let before = values.len();
        for tok in trimmed.split_whitespace() {
            values.push(token(tok).ok_or_else(|| malformed(line_no, format!("bad value `{tok}`")))?);
        }
        if values.len() - before != p.n {
            return Err(malformed(
                line_no,
                format!("row has {} values, expected {}", values.len() - before, p.n),
            ));
        }
        rows += 1;
    }
    if rows != x.n {
        return Err(malformed(0, format!("found {rows} rows, expected {}", x.n)));
    }
    if let Some((_, conv)) = meta.iter().find(|(k, _)| k == "convention") {
        if conv != CONVENTION {
            return Err(GridFileError::Convention(conv.clone()));
        }
    }
    Ok(Parsed { x, p, meta, values })
}

/// Parses a Wigner grid; the second element holds a normalization warning
/// when `|\int W - 1|` exceeds `opts.norm_tol` and `opts.strict` is off.
pub fn wigner_from_str(text: &str, opts: &LoadOptions) -> Result<(WignerGrid, Vec<Warning>), GridFileError> {
    let parsed = parse_body(text, WIGNER_MAGIC, |t| t.parse::<f64>().ok())?;
    let grid = WignerGrid::new(parsed.x, parsed.p, parsed.values, parsed.meta)?;
    let integral = grid.integral();
    let mut warnings = Vec::new();
    if (integral - 1.0).abs() > opts.norm_tol {
        if opts.strict {
            return Err(GridFileError::Normalization { integral });
        }
        warnings.push(Warning::Normalization { integral });
    }
    Ok((grid, warnings))
}

pub fn char_from_str(text: &str) -> Result<CharGrid, GridFileError> {
    let parsed = parse_body(text, CHAR_MAGIC, parse_complex)?;
    Ok(CharGrid::new(parsed.x, parsed.p, parsed.values, parsed.meta)?)
}

pub fn save_wigner(path: &Path, grid: &WignerGrid) -> Result<(), GridFileError> {
    Ok(fs::write(path, wigner_to_string(grid))?)
}

pub fn load_wigner(path: &Path, opts: &LoadOptions) -> Result<(WignerGrid, Vec<Warning>), GridFileError> {
    wigner_from_str(&fs::read_to_string(path)?, opts)
}

pub fn save_char(path: &Path, grid: &CharGrid) -> Result<(), GridFileError> {
    Ok(fs::write(path, char_to_string(grid))?)
}

pub fn load_char(path: &Path) -> Result<CharGrid, GridFileError> {
    char_from_str(&fs::read_to_string(path)?)
}
