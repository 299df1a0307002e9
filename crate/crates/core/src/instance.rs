//! JSON instance files and the seeded random instance generator.
//!
//! ```json
//! { "name": "tiny", "A": [[1, 1]], "b": [1], "c": [-1, 0], "R": 2, "L": 1 }
//! ```
//!
//! `R` (a bound on `‖x‖₁` over the feasible set) may be omitted when some
//! constraint row has entries of one strict sign; the bound then follows from
//! that row. `L` defaults to `‖c‖_∞`.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{norm1, Matrix};
use crate::lp::LinearProgram;
use crate::oracle::binomial;

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: Option<String>,
    pub lp: LinearProgram,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    #[serde(rename = "R", default)]
    r: Option<f64>,
    #[serde(rename = "L", default)]
    l: Option<f64>,
    #[serde(default)]
    name: Option<String>,
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.a.is_empty() {
        return Err(Error::Domain("\"A\" has no rows".into()));
    }
    let cols = file.a[0].len();
    if let Some(i) = file.a.iter().position(|row| row.len() != cols) {
        return Err(Error::Domain(format!(
            "row {i} of \"A\" has {} entries, expected {cols}",
            file.a[i].len()
        )));
    }
    let a = Matrix::from_rows(&file.a)?;
    let r = match file.r {
        Some(r) => r,
        None => implied_diameter(&a, &file.b).ok_or_else(|| {
            Error::Domain("\"R\" is missing and no constraint row has entries of one strict sign".into())
        })?,
    };
    let lp = LinearProgram::new(a, file.b, file.c, r, file.l)?;
    Ok(Instance { name: file.name, lp })
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

/// A row `aᵀx = β` with every `a_j ≥ m > 0` gives `‖x‖₁ ≤ β/m` for `x ≥ 0`.
fn implied_diameter(a: &Matrix, b: &[f64]) -> Option<f64> {
    (0..a.rows())
        .filter_map(|i| {
            let row = a.row(i);
            let sign = if row.iter().all(|&v| v > 0.0) {
                1.0
            } else if row.iter().all(|&v| v < 0.0) {
                -1.0
            } else {
                return None;
            };
            let min = row.iter().map(|v| sign * v).fold(f64::INFINITY, f64::min);
            Some((sign * b[i] / min).max(0.0))
        })
        .filter(|&r| r > 0.0)
        .min_by(|x, y| x.total_cmp(y))
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_list(out: &mut String, values: &[f64]) {
    out.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_num(*v));
    }
    out.push(']');
}

/// Serializes with 17 significant digits, so parsing gives back the same bits.
pub fn write_instance(lp: &LinearProgram, name: Option<&str>) -> String {
    let mut out = String::from("{\n");
    if let Some(name) = name {
        let _ = writeln!(out, "  \"name\": {},", serde_json::Value::from(name));
    }
    out.push_str("  \"A\": [\n");
    for i in 0..lp.num_constraints() {
        out.push_str("    ");
        fmt_list(&mut out, lp.a().row(i));
        out.push_str(if i + 1 < lp.num_constraints() { ",\n" } else { "\n" });
    }
    out.push_str("  ],\n  \"b\": ");
    fmt_list(&mut out, lp.b());
    out.push_str(",\n  \"c\": ");
    fmt_list(&mut out, lp.c());
    let _ = write!(
        out,
        ",\n  \"R\": {},\n  \"L\": {}\n}}\n",
        fmt_num(lp.diameter()),
        fmt_num(lp.lipschitz())
    );
    out
}

/// A feasible instance with a known interior point.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub lp: LinearProgram,
    pub x0: Vec<f64>,
}

/// `d × n` instance: the first row of `A` is all ones (so `R = 2‖x₀‖₁` is a
/// valid diameter), the rest uniform on `[-1, 1]`; `x₀ ∈ (0.5, 1.5)ⁿ`,
/// `b = A x₀`, `c` uniform on `[-1, 1]`.
pub fn random_feasible_lp<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize) -> Result<GeneratedInstance> {
    if d == 0 || d > n {
        return Err(Error::Domain(format!("need 1 ≤ d ≤ n, got d={d}, n={n}")));
    }
    loop {
        let mut data = vec![1.0; n];
        data.extend((0..(d - 1) * n).map(|_| rng.gen_range(-1.0..1.0)));
        let a = Matrix::new(d, n, data)?;
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
        let b = a.mat_vec(&x0);
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diameter = 2.0 * norm1(&x0);
        match LinearProgram::new(a, b, c, diameter, None) {
            Ok(lp) => return Ok(GeneratedInstance { lp, x0 }),
            // Numerically rank-deficient draw: try again.
            Err(Error::Domain(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Draws `(d, n)` uniformly from the given ranges, redrawing until the
/// instance has at most `max_bases` bases, then generates it.
pub fn random_sized_lp<R: Rng + ?Sized>(
    rng: &mut R,
    d_range: (usize, usize),
    n_range: (usize, usize),
    max_bases: f64,
) -> Result<GeneratedInstance> {
    loop {
        let d = rng.gen_range(d_range.0..=d_range.1);
        let n = rng.gen_range(n_range.0.max(d)..=n_range.1.max(d));
        if binomial(n, d) <= max_bases {
            return random_feasible_lp(rng, d, n);
        }
    }
}
