//! Frobenius class-triple counts and rigidity verdicts from character tables.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{Cyclotomic, Rational};
use crate::chartable::{class_is_rational, CharacterTable};
use crate::smallgrp::GroupElement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RigidityError {
    #[error("inconsistent table: class count {0} is not a nonnegative integer")]
    Inconsistent(String),
    #[error("class index {0} out of range")]
    BadClass(usize),
    #[error("table has no trivial character")]
    NoTrivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassTriple {
    pub c1: usize,
    pub c2: usize,
    pub c3: usize,
}

impl ClassTriple {
    pub fn new(c1: usize, c2: usize, c3: usize) -> Self {
        ClassTriple { c1, c2, c3 }
    }

    fn as_array(&self) -> [usize; 3] {
        [self.c1, self.c2, self.c3]
    }
}

fn check_classes(table: &CharacterTable, classes: &[usize]) -> Result<(), RigidityError> {
    match classes.iter().find(|&&c| c >= table.num_classes()) {
        Some(&c) => Err(RigidityError::BadClass(c)),
        None => Ok(()),
    }
}

/// `Σ_χ χ(g_1)…χ(g_r) / χ(1)^(r-2)` over the given rows.
fn character_sum(table: &CharacterTable, classes: &[usize], skip: Option<usize>) -> Cyclotomic {
    let r = classes.len() as u32;
    table
        .rows
        .par_iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(_, row)| {
            let num = classes
                .iter()
                .fold(Cyclotomic::one(), |acc, &c| &acc * &row.values[c]);
            if r <= 2 {
                return num;
            }
            let deg = row.degree().to_rational().expect("degrees are rational");
            num.scale(&deg.pow(r - 2).recip().expect("degrees are nonzero"))
        })
        .reduce(Cyclotomic::zero, |a, b| &a + &b)
}

fn size_factor(table: &CharacterTable, classes: &[usize]) -> Rational {
    let prod = classes
        .iter()
        .fold(Rational::one(), |acc, &c| acc.mul_int(table.classes[c].size as i64));
    prod.checked_div(&Rational::from_int(table.order as i64))
        .expect("order is positive")
}

/// Number of tuples `(x_1, …, x_r) ∈ C_1 × … × C_r` with product 1.
pub fn class_product_count(table: &CharacterTable, classes: &[usize]) -> Result<u64, RigidityError> {
    check_classes(table, classes)?;
    let n = character_sum(table, classes, None).scale(&size_factor(table, classes));
    let bad = || RigidityError::Inconsistent(n.to_string());
    let q = n.to_rational().map_err(|_| bad())?;
    if !q.is_integer() || q.is_negative() {
        return Err(bad());
    }
    q.to_i64().map(|v| v as u64).ok_or_else(bad)
}

/// `N(C_1, C_2, C_3)`: triples with `xyz = 1`.
pub fn frobenius_count(table: &CharacterTable, t: ClassTriple) -> Result<u64, RigidityError> {
    class_product_count(table, &t.as_array())
}

/// `f = Σ_{χ ≠ 1} χ(g_1)χ(g_2)χ(g_3)/χ(1)`. The trivial row is located by
/// its values, not its position.
pub fn nontrivial_sum(table: &CharacterTable, t: ClassTriple) -> Result<Cyclotomic, RigidityError> {
    check_classes(table, &t.as_array())?;
    let trivial = table.trivial_row().ok_or(RigidityError::NoTrivial)?;
    Ok(character_sum(table, &t.as_array(), Some(trivial)))
}

/// The class `C'` whose column is the complex conjugate of column `c`.
pub fn inverse_class(table: &CharacterTable, c: usize) -> Option<usize> {
    let want: Vec<Cyclotomic> = table.column(c).iter().map(Cyclotomic::conj).collect();
    (0..table.num_classes()).find(|&d| table.column(d) == want)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    RigidCandidate,
    NotRigid,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::RigidCandidate => "rigid-candidate",
            Verdict::NotRigid => "not-rigid",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidityReport {
    pub table: String,
    pub class_names: [String; 3],
    pub triple_count: u64,
    pub f_value: Cyclotomic,
    /// `N / (|G| / |Z|)`: the number of inner-automorphism orbits if every
    /// triple generates.
    pub orbit_count_upper: Rational,
    pub rationality_flags: [bool; 3],
    pub verdict: Verdict,
    pub generation_assumed: bool,
}

impl RigidityReport {
    pub fn rationally_rigid(&self) -> bool {
        self.verdict == Verdict::RigidCandidate && self.rationality_flags.iter().all(|&r| r)
    }

    /// `key = value` lines for scripting.
    pub fn machine_block(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("N = {}\n", self.triple_count));
        out.push_str(&format!("f = {}\n", self.f_value));
        out.push_str(&format!("orbits = {}\n", self.orbit_count_upper));
        for (i, r) in self.rationality_flags.iter().enumerate() {
            out.push_str(&format!("rational_c{} = {r}\n", i + 1));
        }
        out.push_str(&format!("verdict = {}\n", self.verdict));
        out.push_str(&format!("rationally_rigid = {}\n", self.rationally_rigid()));
        out.push_str(&format!("generation_assumed = {}\n", self.generation_assumed));
        out
    }
}

impl fmt::Display for RigidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.class_names;
        writeln!(f, "{}: class triple ({a}, {b}, {c})", self.table)?;
        writeln!(f, "  triples with product 1: {}", self.triple_count)?;
        writeln!(f, "  nontrivial character sum f: {}", self.f_value)?;
        writeln!(f, "  N / (|G|/|Z|): {}", self.orbit_count_upper)?;
        for (name, r) in self.class_names.iter().zip(self.rationality_flags) {
            writeln!(f, "  class {name} rational: {}", if r { "yes" } else { "no" })?;
        }
        writeln!(f, "  verdict: {}", self.verdict)?;
        writeln!(f, "  rationally rigid: {}", if self.rationally_rigid() { "yes" } else { "no" })?;
        if self.generation_assumed {
            writeln!(f, "  note: generation of G by the triples is assumed, not checked")?;
        } else {
            writeln!(f, "  note: generation not assumed; rigidity needs an external generation argument")?;
        }
        Ok(())
    }
}

/// Applies the rigidity criterion. With generation assumed, the triples form
/// `N·|Z|/|G|` orbits and rigidity means exactly one. Without it only
/// `N = 0` or `N < |G|/|Z|` (no room for a single free orbit) decide.
pub fn rigidity_verdict(
    table: &CharacterTable,
    t: ClassTriple,
    center_order: u64,
    generation_assumed: bool,
) -> Result<RigidityReport, RigidityError> {
    let n = frobenius_count(table, t)?;
    let f_value = nontrivial_sum(table, t)?;
    let inner = table.order / center_order.max(1);
    let orbit_count_upper = Rational::new(n as i64, inner as i64).expect("positive");
    let verdict = if n == 0 || n < inner {
        Verdict::NotRigid
    } else if !generation_assumed {
        Verdict::Indeterminate
    } else if n == inner {
        Verdict::RigidCandidate
    } else {
        Verdict::NotRigid
    };
    let idx = t.as_array();
    Ok(RigidityReport {
        table: table.name.clone(),
        class_names: idx.map(|c| table.classes[c].name.clone()),
        triple_count: n,
        f_value,
        orbit_count_upper,
        rationality_flags: idx.map(|c| class_is_rational(table, c)),
        verdict,
        generation_assumed,
    })
}

/// Dimension of the common fixed space of the given matrices.
pub fn common_fixed_dim(ms: &[&GroupElement]) -> usize {
    let Some(first) = ms.first() else {
        return 0;
    };
    let (n, p) = (first.n(), first.p());
    let mut rows: Vec<Vec<u64>> = ms
        .iter()
        .flat_map(|m| {
            let a = m.minus_scalar(1);
            (0..n).map(move |i| (0..n).map(|j| a.get(i, j)).collect::<Vec<u64>>())
        })
        .collect();
    n - rank_mod(&mut rows, p)
}

fn rank_mod(rows: &mut [Vec<u64>], p: u64) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let s = crate::modp::inv_mod(rows[rank][c], p).expect("unit");
        for r in rank + 1..rows.len() {
            let f = rows[r][c] * s % p;
            if f != 0 {
                for cc in c..ncols {
                    rows[r][cc] = (rows[r][cc] + (p - f) * rows[rank][cc]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The fixed-space inequality a product-1 triple must satisfy:
/// `dim Fix(z) ≥ dim(Fix(x) ∩ Fix(y))`, since a vector fixed by `x` and `y`
/// is fixed by `z = (xy)⁻¹`.
pub fn fixed_space_inequality(x: &GroupElement, y: &GroupElement, z: &GroupElement) -> bool {
    common_fixed_dim(&[z]) >= common_fixed_dim(&[x, y])
}
