//! Structural and orthogonality checks for character tables.

use std::fmt;

use rayon::prelude::*;

use super::CharacterTable;
use crate::arith::{Cyclotomic, Rational};
use crate::modp;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Empty on success, otherwise the first few offending items.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "{status} {}", c.name)?;
            } else {
                writeln!(f, "{status} {}: {}", c.name, c.detail)?;
            }
        }
        Ok(())
    }
}

const MAX_DETAIL: usize = 5;

fn check(name: &'static str, problems: Vec<String>) -> Check {
    let mut detail: Vec<String> = problems.iter().take(MAX_DETAIL).cloned().collect();
    if problems.len() > MAX_DETAIL {
        detail.push(format!("and {} more", problems.len() - MAX_DETAIL));
    }
    Check {
        name,
        passed: problems.is_empty(),
        detail: detail.join("; "),
    }
}

/// Runs every table invariant and reports each one; never fails early.
pub fn validate(table: &CharacterTable) -> ValidationReport {
    let k = table.classes.len();
    let shape_ok = table.rows.len() == k && table.rows.iter().all(|r| r.values.len() == k);
    let mut checks = vec![check("shape", shape_problems(table))];
    checks.push(check("class-sizes", class_size_problems(table)));
    checks.push(check("element-orders", element_order_problems(table)));
    checks.push(check("power-maps", power_map_problems(table)));
    if !shape_ok {
        return ValidationReport { checks };
    }
    checks.push(check("trivial-character", trivial_problems(table)));
    checks.push(check("degrees", degree_problems(table)));
    let ortho = Orthogonality::new(table);
    checks.push(check("row-orthogonality", ortho.rows()));
    checks.push(check("column-orthogonality", ortho.columns()));
    checks.push(check("distinct-columns", distinct_column_problems(table)));
    ValidationReport { checks }
}

fn shape_problems(t: &CharacterTable) -> Vec<String> {
    let k = t.classes.len();
    let mut out = Vec::new();
    if k == 0 {
        out.push("no classes".to_string());
    }
    if t.rows.len() != k {
        out.push(format!("{} characters for {k} classes", t.rows.len()));
    }
    for r in &t.rows {
        if r.values.len() != k {
            out.push(format!("character {} has {} values", r.name, r.values.len()));
        }
    }
    out
}

fn class_size_problems(t: &CharacterTable) -> Vec<String> {
    let mut out = Vec::new();
    for c in &t.classes {
        if c.size == 0 || !t.order.is_multiple_of(c.size) {
            out.push(format!("size {} of {} does not divide {}", c.size, c.name, t.order));
        }
    }
    let total: u128 = t.classes.iter().map(|c| c.size as u128).sum();
    if total != t.order as u128 {
        out.push(format!("sizes sum to {total}, order is {}", t.order));
    }
    if let Some(first) = t.classes.first() {
        if first.size != 1 || first.element_order != 1 {
            out.push(format!("first class {} is not the identity", first.name));
        }
    }
    out
}

fn element_order_problems(t: &CharacterTable) -> Vec<String> {
    t.classes
        .iter()
        .filter(|c| c.element_order == 0 || !t.exponent.is_multiple_of(c.element_order))
        .map(|c| format!("order {} of {} does not divide exponent {}", c.element_order, c.name, t.exponent))
        .collect()
}

fn power_map_problems(t: &CharacterTable) -> Vec<String> {
    let mut out = Vec::new();
    for c in &t.classes {
        for (&p, &target) in &c.power_maps {
            let Some(img) = t.classes.get(target) else {
                out.push(format!("pow{p} of {} points outside the table", c.name));
                continue;
            };
            let m = c.element_order;
            let want = m / modp::gcd(m, p);
            if img.element_order != want {
                out.push(format!(
                    "pow{p} of {} is {} of order {}, expected order {want}",
                    c.name, img.name, img.element_order
                ));
            }
        }
    }
    out
}

fn trivial_problems(t: &CharacterTable) -> Vec<String> {
    let trivial: Vec<&str> = t
        .rows
        .iter()
        .filter(|r| r.is_trivial())
        .map(|r| r.name.as_str())
        .collect();
    let mut out = Vec::new();
    match trivial.len() {
        0 => out.push("no trivial character".to_string()),
        1 => {}
        n => out.push(format!("{n} trivial characters: {}", trivial.join(", "))),
    }
    if !t.rows.first().is_some_and(|r| r.is_trivial()) && !trivial.is_empty() {
        out.push("trivial character is not stored first".to_string());
    }
    out
}

fn degree_problems(t: &CharacterTable) -> Vec<String> {
    let mut out = Vec::new();
    let mut sum = Rational::zero();
    for r in &t.rows {
        match r.degree().to_rational() {
            Ok(d) if d.is_integer() && !d.is_negative() && !d.is_zero() => sum += &(&d * &d),
            _ => out.push(format!("degree {} of {} is not a positive integer", r.degree(), r.name)),
        }
    }
    if out.is_empty() && sum != Rational::from_int(t.order as i64) {
        out.push(format!("squared degrees sum to {sum}, order is {}", t.order));
    }
    out
}

fn distinct_column_problems(t: &CharacterTable) -> Vec<String> {
    let k = t.classes.len();
    let cols: Vec<Vec<Cyclotomic>> = (0..k).map(|c| t.column(c)).collect();
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if cols[i] == cols[j] {
                out.push(format!("classes {} and {} have equal columns", t.classes[i].name, t.classes[j].name));
            }
        }
    }
    out
}

/// A value as an integer combination of `ζ_N^i` for a common `N`.
type Sparse = Vec<(u32, i64)>;

/// Orthogonality sums. When every value is an algebraic integer with small
/// coefficients, products are accumulated in `Z[x]/(x^N - 1)` and reduced
/// once per sum; otherwise generic field arithmetic is used.
struct Orthogonality<'a> {
    table: &'a CharacterTable,
    fast: Option<(u64, Vec<Vec<Sparse>>)>,
}

impl<'a> Orthogonality<'a> {
    fn new(table: &'a CharacterTable) -> Self {
        Orthogonality {
            table,
            fast: integral_embedding(table),
        }
    }

    fn rows(&self) -> Vec<String> {
        let t = self.table;
        let n = t.rows.len();
        let sizes: Vec<i64> = t.classes.iter().map(|c| c.size as i64).collect();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        pairs
            .par_iter()
            .filter_map(|&(i, j)| {
                let want = if i == j { t.order as i64 } else { 0 };
                let got = match &self.fast {
                    Some((nn, vals)) => fast_sum(*nn, (0..vals[i].len()).map(|c| (sizes[c], &vals[i][c], &vals[j][c]))),
                    None => (0..sizes.len())
                        .map(|c| (&t.rows[i].values[c] * &t.rows[j].values[c].conj()).mul_int(sizes[c]))
                        .sum(),
                };
                (got != Cyclotomic::from_int(want))
                    .then(|| format!("rows {} and {} give {got}, expected {want}", t.rows[i].name, t.rows[j].name))
            })
            .collect()
    }

    fn columns(&self) -> Vec<String> {
        let t = self.table;
        let k = t.classes.len();
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
        pairs
            .par_iter()
            .filter_map(|&(a, b)| {
                let want = if a == b {
                    Rational::new(t.order as i64, t.classes[a].size.max(1) as i64).unwrap_or_default()
                } else {
                    Rational::zero()
                };
                let got = match &self.fast {
                    Some((nn, vals)) => fast_sum(*nn, vals.iter().map(|row| (1, &row[a], &row[b]))),
                    None => t
                        .rows
                        .iter()
                        .map(|r| &r.values[a] * &r.values[b].conj())
                        .sum(),
                };
                (got != Cyclotomic::from_rational(want.clone())).then(|| {
                    format!(
                        "classes {} and {} give {got}, expected {want}",
                        t.classes[a].name, t.classes[b].name
                    )
                })
            })
            .collect()
    }
}

fn integral_embedding(t: &CharacterTable) -> Option<(u64, Vec<Vec<Sparse>>)> {
    let mut n = 1u64;
    for r in &t.rows {
        for v in &r.values {
            if !v.is_integral() {
                return None;
            }
            n = modp::lcm(n, v.conductor());
        }
    }
    if n > 1 << 16 {
        return None;
    }
    let rows = t
        .rows
        .iter()
        .map(|r| {
            r.values
                .iter()
                .map(|v| {
                    let step = n / v.conductor();
                    v.terms()
                        .map(|(k, c)| Some(((k * step) as u32, c.to_i64()?)))
                        .collect::<Option<Sparse>>()
                })
                .collect::<Option<Vec<Sparse>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    Some((n, rows))
}

/// `Σ w · x · conj(y)` over the given triples, exactly.
fn fast_sum<'b>(n: u64, items: impl Iterator<Item = (i64, &'b Sparse, &'b Sparse)>) -> Cyclotomic {
    let nn = n as usize;
    let mut acc = vec![0i128; nn];
    for (w, x, y) in items {
        for &(a, ca) in x {
            for &(b, cb) in y {
                let e = (a as usize + nn - b as usize) % nn;
                acc[e] += w as i128 * ca as i128 * cb as i128;
            }
        }
    }
    let terms: Vec<(i64, Rational)> = acc
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c != 0)
        .map(|(e, c)| (e as i64, rational_from_i128(c)))
        .collect();
    Cyclotomic::from_exponents(n, terms)
}

fn rational_from_i128(c: i128) -> Rational {
    match i64::try_from(c) {
        Ok(v) => Rational::from_int(v),
        Err(_) => Rational::from_bigint(c.into()),
    }
}
