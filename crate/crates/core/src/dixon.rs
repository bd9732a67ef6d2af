//! Dixon–Schneider character tables of enumerated groups.
//!
//! Class matrices are reduced modulo a prime `ℓ ≡ 1 (mod exponent)`, their
//! common eigenvectors give the central characters, and eigenvalue
//! multiplicities over powers of an `ℓ`-adic root of unity lift the values
//! back to exact cyclotomics.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::Cyclotomic;
use crate::chartable::{class_names, Character, CharacterTable, ClassRecord};
use crate::modp::{self, inv_mod, mul_mod, pow_mod};
use crate::smallgrp::{ClassPartition, FiniteGroup};

/// Search bound for the prime `ℓ`.
pub const PRIME_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DixonError {
    #[error("no prime l = 1 mod {exponent} with l > {min} below {PRIME_BOUND}")]
    NoPrime { exponent: u64, min: u64 },
    #[error("eigenspace splitting failed: {0}")]
    Split(String),
    #[error("lifting failed for class {class}: {msg}")]
    Lift { class: usize, msg: String },
}

/// `a[i][j][k] = #{(x, y) ∈ C_i × C_j : x y = z_k}` for fixed representatives `z_k`.
pub struct ClassConstants {
    k: usize,
    a: Vec<u64>,
}

impl ClassConstants {
    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        self.a[(i * self.k + j) * self.k + k]
    }

    pub fn num_classes(&self) -> usize {
        self.k
    }
}

/// Exact class constants by direct counting over `C_i`.
pub fn class_constants(group: &FiniteGroup, part: &ClassPartition) -> ClassConstants {
    let k = part.classes.len();
    let columns: Vec<Vec<u64>> = (0..k)
        .into_par_iter()
        .map(|kk| {
            let z = group.element(part.classes[kk].representative);
            let mut col = vec![0u64; k * k];
            for (i, class) in part.classes.iter().enumerate() {
                for &x in &class.members {
                    let y = group.element(x).inverse().expect("invertible").mul(z);
                    let j = part.class_of[group.index_of(&y).expect("closed")];
                    col[i * k + j] += 1;
                }
            }
            col
        })
        .collect();
    let mut a = vec![0u64; k * k * k];
    for (kk, col) in columns.iter().enumerate() {
        for (ij, &v) in col.iter().enumerate() {
            a[ij * k + kk] = v;
        }
    }
    ClassConstants { k, a }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DixonParameters {
    pub ell: u64,
    /// An element of exact order `exponent` modulo `ell`.
    pub omega: u64,
    pub exponent: u64,
}

/// The smallest prime `ℓ ≡ 1 (mod e)` with `ℓ > 2⌈√|G|⌉`, and
/// `ω = g^((ℓ-1)/e)` for the least primitive root `g`.
pub fn dixon_parameters(order: u64, exponent: u64) -> Result<DixonParameters, DixonError> {
    let mut root = (order as f64).sqrt() as u64;
    while root * root < order {
        root += 1;
    }
    while root > 0 && (root - 1) * (root - 1) >= order {
        root -= 1;
    }
    let min = 2 * root;
    let mut ell = exponent + 1;
    while ell <= min || !modp::is_prime(ell) {
        ell += exponent;
        if ell > PRIME_BOUND {
            return Err(DixonError::NoPrime { exponent, min });
        }
    }
    let g = modp::primitive_root(ell);
    Ok(DixonParameters {
        ell,
        omega: pow_mod(g, (ell - 1) / exponent, ell),
        exponent,
    })
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(rows: &mut Vec<Vec<u64>>, ell: u64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let s = inv_mod(rows[r][c], ell).expect("nonzero pivot");
        for v in rows[r].iter_mut() {
            *v = mul_mod(*v, s, ell);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for cc in 0..ncols {
                    let t = mul_mod(f, rows[r][cc], ell);
                    rows[i][cc] = (rows[i][cc] + ell - t) % ell;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis of the null space of a square matrix.
fn nullspace(mut a: Vec<Vec<u64>>, ell: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let pivots = rref(&mut a, ell);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; n];
            v[f] = 1;
            for (row, &pc) in a.iter().zip(&pivots) {
                v[pc] = (ell - row[f]) % ell;
            }
            v
        })
        .collect()
}

/// A subspace given by an RREF basis (rows) and its pivot columns.
struct Subspace {
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Subspace {
    fn new(mut basis: Vec<Vec<u64>>, ell: u64) -> Self {
        let pivots = rref(&mut basis, ell);
        Subspace { basis, pivots }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Splits an invariant subspace into eigenspaces of the class matrix `m`
/// (`m[i][k]` acting on column vectors).
fn split(space: &Subspace, m: &[Vec<u64>], ell: u64) -> Result<Vec<Subspace>, DixonError> {
    let w = space.dim();
    let r = m.len();
    // Restricted matrix in the coordinates given by pivot entries.
    let images: Vec<Vec<u64>> = space
        .basis
        .iter()
        .map(|b| {
            (0..r)
                .map(|i| m[i].iter().zip(b).fold(0, |acc, (&x, &y)| (acc + mul_mod(x, y, ell)) % ell))
                .collect()
        })
        .collect();
    let restricted: Vec<Vec<u64>> = (0..w)
        .map(|t| (0..w).map(|s| images[s][space.pivots[t]]).collect())
        .collect();
    let mut parts = Vec::new();
    let mut found = 0;
    for lambda in 0..ell {
        let shifted: Vec<Vec<u64>> = restricted
            .iter()
            .enumerate()
            .map(|(t, row)| {
                row.iter()
                    .enumerate()
                    .map(|(s, &v)| if s == t { (v + ell - lambda) % ell } else { v })
                    .collect()
            })
            .collect();
        let null = nullspace(shifted, ell);
        if null.is_empty() {
            continue;
        }
        found += null.len();
        let vectors: Vec<Vec<u64>> = null
            .iter()
            .map(|c| {
                (0..r)
                    .map(|i| {
                        c.iter()
                            .zip(&space.basis)
                            .fold(0, |acc, (&ct, b)| (acc + mul_mod(ct, b[i], ell)) % ell)
                    })
                    .collect()
            })
            .collect();
        parts.push(Subspace::new(vectors, ell));
        if found == w {
            break;
        }
    }
    if found != w {
        return Err(DixonError::Split(format!("class matrix not diagonalizable on a {w}-dimensional block")));
    }
    Ok(parts)
}

/// The exact character table of an enumerated group, in canonical order.
pub fn character_table_dixon(
    group: &FiniteGroup,
    part: &ClassPartition,
    name: &str,
) -> Result<CharacterTable, DixonError> {
    dixon_with_classes(group, part, name).map(|(t, _)| t)
}

/// As [`character_table_dixon`], also returning for each table class the
/// index of its class in `part`.
pub fn dixon_with_classes(
    group: &FiniteGroup,
    part: &ClassPartition,
    name: &str,
) -> Result<(CharacterTable, Vec<usize>), DixonError> {
    let order = group.order() as u64;
    let exponent = group.exponent();
    let k = part.classes.len();
    let params = dixon_parameters(order, exponent)?;
    let ell = params.ell;

    // Classes in canonical order: identity, element order, size, enumeration.
    let reps: Vec<usize> = part.classes.iter().map(|c| c.representative).collect();
    let orders: Vec<u64> = reps.iter().map(|&r| group.element(r).order()).collect();
    let mut perm: Vec<usize> = (0..k).collect();
    perm.sort_by_key(|&c| (orders[c], part.classes[c].size(), reps[c]));
    let mut position = vec![0; k];
    for (new, &old) in perm.iter().enumerate() {
        position[old] = new;
    }
    let sizes: Vec<u64> = perm.iter().map(|&c| part.classes[c].size()).collect();
    let ords: Vec<u64> = perm.iter().map(|&c| orders[c]).collect();
    let class_of = |g: &crate::smallgrp::GroupElement| position[part.class_of[group.index_of(g).expect("closed")]];
    let rep = |c: usize| group.element(reps[perm[c]]);
    let inverse_class: Vec<usize> = (0..k).map(|c| class_of(&rep(c).inverse().expect("invertible"))).collect();

    let cc = class_constants(group, part);
    // M_j[i][l] = a[j][i][l] in canonical indices.
    let matrices: Vec<Vec<Vec<u64>>> = (0..k)
        .map(|j| {
            (0..k)
                .map(|i| (0..k).map(|l| cc.get(perm[j], perm[i], perm[l]) % ell).collect())
                .collect()
        })
        .collect();

    let identity: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| (i == j) as u64).collect()).collect();
    let mut spaces = vec![Subspace::new(identity, ell)];
    for m in matrices.iter().skip(1) {
        if spaces.iter().all(|s| s.dim() == 1) {
            break;
        }
        let mut next = Vec::new();
        for s in spaces {
            if s.dim() == 1 {
                next.push(s);
            } else {
                next.extend(split(&s, m, ell)?);
            }
        }
        spaces = next;
    }
    if spaces.len() != k {
        return Err(DixonError::Split(format!("found {} of {k} characters", spaces.len())));
    }

    // Element powers for lifting: power_class[c][j] = class of rep(c)^j.
    let power_class: Vec<Vec<usize>> = (0..k)
        .map(|c| {
            let g = rep(c);
            let mut x = crate::smallgrp::GroupElement::identity(g.n(), g.p(), g.is_projective());
            (0..ords[c])
                .map(|_| {
                    let cls = class_of(&x);
                    x = x.mul(g);
                    cls
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(k);
    for s in &spaces {
        let v0 = &s.basis[0];
        let lead = inv_mod(v0[0], ell).ok_or_else(|| DixonError::Split("eigenvector vanishes at the identity".into()))?;
        let v: Vec<u64> = v0.iter().map(|&x| mul_mod(x, lead, ell)).collect();
        // d^2 = |G| / Σ v_i v_{i*} / |C_i|
        let mut norm = 0u64;
        for i in 0..k {
            let t = mul_mod(mul_mod(v[i], v[inverse_class[i]], ell), inv_mod(sizes[i] % ell, ell).expect("unit"), ell);
            norm = (norm + t) % ell;
        }
        let d2 = mul_mod(order % ell, inv_mod(norm, ell).ok_or_else(|| DixonError::Split("zero norm".into()))?, ell);
        let d = (1..=order)
            .take_while(|d| d * d <= order)
            .find(|d| d * d % ell == d2)
            .ok_or_else(|| DixonError::Split("degree is not a small square root".into()))?;
        let values_mod: Vec<u64> = (0..k)
            .map(|i| mul_mod(mul_mod(d, v[i], ell), inv_mod(sizes[i] % ell, ell).expect("unit"), ell))
            .collect();
        let mut values = Vec::with_capacity(k);
        for c in 0..k {
            values.push(lift(&values_mod, &power_class[c], ords[c], d, &params).map_err(|msg| DixonError::Lift { class: c, msg })?);
        }
        rows.push(Character {
            name: String::new(),
            values,
        });
    }

    let names = class_names(&ords);
    let primes = modp::prime_factors(exponent);
    let classes = (0..k)
        .map(|c| ClassRecord {
            name: names[c].clone(),
            size: sizes[c],
            element_order: ords[c],
            power_maps: primes
                .iter()
                .map(|&p| (p, power_class[c][(p % ords[c]) as usize]))
                .collect::<BTreeMap<_, _>>(),
        })
        .collect();
    let mut table = CharacterTable {
        name: name.to_string(),
        order,
        exponent,
        classes,
        rows,
    };
    table.canonicalize();
    for (i, r) in table.rows.iter_mut().enumerate() {
        r.name = format!("X.{}", i + 1);
    }
    let origin = table
        .classes
        .iter()
        .map(|c| perm[names.iter().position(|n| *n == c.name).expect("names survive sorting")])
        .collect();
    Ok((table, origin))
}

/// `χ(g) = Σ_k m_k ζ_o^k` with `m_k = (1/o) Σ_j χ(g^j) ω_o^{-jk}`.
fn lift(values: &[u64], powers: &[usize], o: u64, d: u64, params: &DixonParameters) -> Result<Cyclotomic, String> {
    let ell = params.ell;
    let w = pow_mod(params.omega, params.exponent / o, ell);
    let w_inv = inv_mod(w, ell).expect("unit");
    let o_inv = inv_mod(o % ell, ell).expect("unit");
    let mut terms = Vec::new();
    let mut total = 0;
    for kk in 0..o {
        let step = pow_mod(w_inv, kk, ell);
        let mut acc = 0u64;
        let mut root = 1u64;
        for j in 0..o as usize {
            acc = (acc + mul_mod(values[powers[j]], root, ell)) % ell;
            root = mul_mod(root, step, ell);
        }
        let m = mul_mod(acc, o_inv, ell);
        if m > d {
            return Err(format!("multiplicity {m} exceeds degree {d}"));
        }
        total += m;
        if m > 0 {
            terms.push((kk as i64, m as i64));
        }
    }
    if total != d {
        return Err(format!("multiplicities sum to {total}, degree is {d}"));
    }
    Ok(Cyclotomic::from_int_exponents(o, terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters() {
        let p = dixon_parameters(120, 60).unwrap();
        assert_eq!(p.ell, 61);
        assert_eq!(pow_mod(p.omega, 60, 61), 1);
        assert!((1..60).all(|k| pow_mod(p.omega, k, 61) != 1));
        assert_eq!(dixon_parameters(168, 84).unwrap().ell, 337);
    }

    #[test]
    fn nullspace_of_rank_one() {
        let ns = nullspace(vec![vec![1, 2], vec![2, 4]], 7);
        assert_eq!(ns, vec![vec![5, 1]]);
    }
}
