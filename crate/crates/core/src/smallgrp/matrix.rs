//! Square matrices over a prime field, optionally taken modulo scalars.

use std::fmt;

use crate::modp;

/// A group element: an `n × n` matrix over `GF(p)`. Projective elements are
/// stored scaled so the first nonzero entry is 1, which makes the entry bytes
/// a canonical form and derived equality/hashing exact.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    n: u8,
    p: u8,
    projective: bool,
    entries: Box<[u8]>,
}

impl GroupElement {
    /// Builds an element from row-major entries (reduced mod `p`).
    pub fn from_rows(p: u64, rows: &[Vec<i64>], projective: bool) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        assert!(p < 256 && modp::is_prime(p), "p must be a prime below 256");
        let entries = rows
            .iter()
            .flatten()
            .map(|&v| v.rem_euclid(p as i64) as u8)
            .collect();
        GroupElement {
            n: n as u8,
            p: p as u8,
            projective,
            entries,
        }
        .canonical()
    }

    pub fn identity(n: usize, p: u64, projective: bool) -> Self {
        Self::scalar(n, p, 1, projective)
    }

    pub fn scalar(n: usize, p: u64, c: u64, projective: bool) -> Self {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { c as i64 } else { 0 }).collect())
            .collect();
        Self::from_rows(p, &rows, projective)
    }

    pub fn diag(p: u64, d: &[i64], projective: bool) -> Self {
        let n = d.len();
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { d[i] } else { 0 }).collect())
            .collect();
        Self::from_rows(p, &rows, projective)
    }

    /// Identity plus `c` at position `(i, j)`.
    pub fn elementary(n: usize, p: u64, i: usize, j: usize, c: i64, projective: bool) -> Self {
        let mut rows: Vec<Vec<i64>> = (0..n)
            .map(|a| (0..n).map(|b| (a == b) as i64).collect())
            .collect();
        rows[i][j] += c;
        Self::from_rows(p, &rows, projective)
    }

    /// The unipotent Jordan block `J_n(1)`.
    pub fn jordan_block(n: usize, p: u64, projective: bool) -> Self {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| (i == j || j == i + 1) as i64).collect())
            .collect();
        Self::from_rows(p, &rows, projective)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn is_projective(&self) -> bool {
        self.projective
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n as usize + j] as u64
    }

    /// The canonical byte encoding.
    pub fn canonical_form(&self) -> &[u8] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        let n = self.n();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j) as i64).collect()).collect()
    }

    fn with_entries(&self, entries: Box<[u8]>) -> Self {
        GroupElement {
            n: self.n,
            p: self.p,
            projective: self.projective,
            entries,
        }
        .canonical()
    }

    fn canonical(mut self) -> Self {
        if self.projective {
            let p = self.p as u64;
            if let Some(&lead) = self.entries.iter().find(|&&e| e != 0) {
                if lead != 1 {
                    let s = modp::inv_mod(lead as u64, p).expect("nonzero entry is a unit");
                    for e in self.entries.iter_mut() {
                        *e = ((*e as u64 * s) % p) as u8;
                    }
                }
            }
        }
        self
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!((self.n, self.p), (other.n, other.p));
        let n = self.n as usize;
        let p = self.p as u32;
        let mut out = vec![0u8; n * n].into_boxed_slice();
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u32;
                for k in 0..n {
                    acc += self.entries[i * n + k] as u32 * other.entries[k * n + j] as u32;
                }
                out[i * n + j] = (acc % p) as u8;
            }
        }
        self.with_entries(out)
    }

    /// Inverse by Gauss–Jordan elimination; `None` for singular matrices.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n as usize;
        let p = self.p as u64;
        let mut a: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut row: Vec<u64> = (0..n).map(|j| self.get(i, j)).collect();
                row.extend((0..n).map(|j| (i == j) as u64));
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r][col] != 0)?;
            a.swap(col, piv);
            let s = modp::inv_mod(a[col][col], p)?;
            for v in a[col].iter_mut() {
                *v = *v * s % p;
            }
            for r in 0..n {
                if r != col && a[r][col] != 0 {
                    let f = a[r][col];
                    for c in 0..2 * n {
                        a[r][c] = (a[r][c] + (p - f) * a[col][c]) % p;
                    }
                }
            }
        }
        let entries = a.iter().flat_map(|row| row[n..].iter().map(|&v| v as u8)).collect();
        Some(self.with_entries(entries))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::identity(self.n(), self.p(), self.projective);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n(), self.p(), self.projective)
    }

    /// Multiplicative order in the (possibly projective) group.
    pub fn order(&self) -> u64 {
        let id = Self::identity(self.n(), self.p(), self.projective);
        let mut x = self.clone();
        let mut k = 1;
        while x != id {
            x = x.mul(self);
            k += 1;
        }
        k
    }

    pub fn det(&self) -> u64 {
        let n = self.n();
        let p = self.p();
        let mut a: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect();
        let mut det = 1u64;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else {
                return 0;
            };
            if piv != col {
                a.swap(col, piv);
                det = (p - det) % p;
            }
            det = det * a[col][col] % p;
            let s = modp::inv_mod(a[col][col], p).expect("pivot is a unit");
            for r in col + 1..n {
                let f = a[r][col] * s % p;
                if f != 0 {
                    for c in col..n {
                        a[r][c] = (a[r][c] + (p - f) * a[col][c]) % p;
                    }
                }
            }
        }
        det
    }

    /// Conjugate `g · self · g⁻¹`, given `g` and its inverse.
    pub fn conjugate_by(&self, g: &Self, g_inv: &Self) -> Self {
        g.mul(self).mul(g_inv)
    }

    pub fn transpose(&self) -> Self {
        let n = self.n();
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(j, i) as u8)
            .collect();
        self.with_entries(entries)
    }

    /// `self - c·I` as a plain (non-projective) matrix.
    pub fn minus_scalar(&self, c: u64) -> Self {
        let n = self.n();
        let p = self.p();
        let entries = (0..n * n)
            .map(|k| {
                let v = self.entries[k] as u64 + if k / n == k % n { p - c % p } else { 0 };
                (v % p) as u8
            })
            .collect();
        GroupElement {
            n: self.n,
            p: self.p,
            projective: false,
            entries,
        }
    }

    pub fn rank(&self) -> usize {
        let n = self.n();
        let p = self.p();
        let mut a: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| a[r][col] != 0) else {
                continue;
            };
            a.swap(rank, piv);
            let s = modp::inv_mod(a[rank][col], p).expect("pivot is a unit");
            for r in rank + 1..n {
                let f = a[r][col] * s % p;
                if f != 0 {
                    for c in col..n {
                        a[r][c] = (a[r][c] + (p - f) * a[rank][c]) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        write!(f, "] mod {}", self.p)?;
        if self.projective {
            write!(f, " (mod scalars)")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let m = GroupElement::from_rows(5, &[vec![1, 2], vec![3, 4]], false);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert_eq!(m.det(), 3); // -2 mod 5
        assert!(GroupElement::from_rows(5, &[vec![1, 2], vec![2, 4]], false).inverse().is_none());
    }

    #[test]
    fn projective_scaling() {
        let a = GroupElement::from_rows(7, &[vec![0, 1], vec![6, 0]], true);
        let b = GroupElement::from_rows(7, &[vec![0, 6], vec![1, 0]], true);
        assert_eq!(a, b);
        assert_eq!(a.canonical_form(), &[0, 1, 6, 0]);
        assert_eq!(a.order(), 2);
    }

    #[test]
    fn orders() {
        assert_eq!(GroupElement::jordan_block(3, 5, false).order(), 5);
        assert_eq!(GroupElement::scalar(2, 5, 4, false).order(), 2);
        assert_eq!(GroupElement::scalar(2, 5, 4, true).order(), 1);
    }
}
