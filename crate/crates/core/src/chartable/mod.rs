//! Exact character tables: data model, the CTB text format, validation and
//! class rationality.

mod ctb;
mod validate;

pub use ctb::{emit_ctb, parse_ctb};
pub use validate::{validate, Check, ValidationReport};

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::arith::Cyclotomic;
use crate::modp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("inconsistent counts: {0}")]
    Counts(String),
    #[error("line {line}: unknown class `{name}` in power map")]
    UnknownClass { line: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRecord {
    pub name: String,
    pub size: u64,
    pub element_order: u64,
    /// Prime `p` to the index of the class of `p`-th powers.
    pub power_maps: BTreeMap<u64, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    pub name: String,
    pub values: Vec<Cyclotomic>,
}

impl Character {
    pub fn degree(&self) -> &Cyclotomic {
        &self.values[0]
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(Cyclotomic::is_one)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    pub name: String,
    pub order: u64,
    pub exponent: u64,
    pub classes: Vec<ClassRecord>,
    pub rows: Vec<Character>,
}

impl CharacterTable {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    pub fn centralizer_order(&self, c: usize) -> u64 {
        self.order / self.classes[c].size
    }

    pub fn degrees(&self) -> Vec<Cyclotomic> {
        self.rows.iter().map(|r| r.degree().clone()).collect()
    }

    pub fn trivial_row(&self) -> Option<usize> {
        self.rows.iter().position(Character::is_trivial)
    }

    pub fn column(&self, c: usize) -> Vec<Cyclotomic> {
        self.rows.iter().map(|r| r.values[c].clone()).collect()
    }

    /// Index of the class of `g^k` for `g` in class `c`, following prime
    /// power maps through the factorization of `k`. `None` if some needed
    /// prime has no map.
    pub fn power_class(&self, c: usize, mut k: u64) -> Option<usize> {
        let m = self.classes[c].element_order;
        if m == 1 || k.is_multiple_of(m) {
            return Some(0);
        }
        let mut cur = c;
        for p in modp::prime_factors(k) {
            while k.is_multiple_of(p) {
                cur = *self.classes[cur].power_maps.get(&p)?;
                k /= p;
            }
        }
        Some(cur)
    }

    /// Sorts classes and rows into canonical order. Classes: identity, then
    /// by element order, size and name (shorter names first, so `4Z` comes
    /// before `4AA`). Rows: trivial, then by degree and
    /// the value sequence.
    pub fn canonicalize(&mut self) {
        let k = self.classes.len();
        let mut perm: Vec<usize> = (0..k).collect();
        let key = |c: &ClassRecord| (c.element_order != 1, c.element_order, c.size, c.name.len(), c.name.clone());
        perm.sort_by(|&a, &b| key(&self.classes[a]).cmp(&key(&self.classes[b])));
        let mut inverse = vec![0; k];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let classes: Vec<ClassRecord> = perm
            .iter()
            .map(|&old| {
                let mut c = self.classes[old].clone();
                for v in c.power_maps.values_mut() {
                    *v = inverse[*v];
                }
                c
            })
            .collect();
        self.classes = classes;
        for row in &mut self.rows {
            row.values = perm.iter().map(|&old| row.values[old].clone()).collect();
        }
        self.rows.sort_by(compare_rows);
    }
}

fn compare_rows(a: &Character, b: &Character) -> Ordering {
    let deg = |r: &Character| r.degree().to_rational().ok();
    (!a.is_trivial())
        .cmp(&!b.is_trivial())
        .then_with(|| deg(a).cmp(&deg(b)))
        .then_with(|| a.values.cmp(&b.values))
}

/// Names classes by element order and a letter suffix (`1A`, `2A`, `4A`,
/// `4B`, ... `4Z`, `4AA`), in the order given.
pub fn class_names(orders: &[u64]) -> Vec<String> {
    let mut seen: BTreeMap<u64, usize> = BTreeMap::new();
    orders
        .iter()
        .map(|&m| {
            let i = seen.entry(m).or_insert(0);
            let name = format!("{m}{}", letters(*i));
            *i += 1;
            name
        })
        .collect()
}

fn letters(mut i: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii letters")
}

/// True iff every character value on class `c` is rational.
pub fn class_is_rational(table: &CharacterTable, c: usize) -> bool {
    table.rows.iter().all(|r| r.values[c].is_rational())
}

/// Rationality decided by Galois action: the column is fixed by `σ_k` for
/// every `k` coprime to the exponent.
pub fn class_is_rational_by_galois(table: &CharacterTable, c: usize) -> bool {
    let e = table.exponent.max(1);
    (1..e.max(2)).filter(|&k| modp::gcd(k, e) == 1).all(|k| {
        table.rows.iter().all(|r| {
            let v = &r.values[c];
            v.galois(k as i64).map(|g| &g == v).unwrap_or(false)
        })
    })
}

/// Rationality decided by power maps alone: the class is fixed by
/// `g ↦ g^k` for all `k` coprime to its element order. `None` when some
/// residue cannot be reached through the prime maps on file.
pub fn class_is_rational_by_power_maps(table: &CharacterTable, c: usize) -> Option<bool> {
    let m = table.classes[c].element_order;
    if m <= 2 {
        return Some(true);
    }
    let mut undecided = false;
    for k in (2..m).filter(|&k| modp::gcd(k, m) == 1) {
        // Some lift k + t·m may factor over primes that have maps.
        let image = (0..m.max(64))
            .map(|t| k + t * m)
            .find_map(|kk| table.power_class(c, kk));
        match image {
            Some(d) if d != c => return Some(false),
            Some(_) => {}
            None => undecided = true,
        }
    }
    (!undecided).then_some(true)
}

/// Looks for a bijection of classes that preserves element orders and class
/// sizes and carries the rows of `a` onto the rows of `b` as a multiset.
/// Class and character names are ignored.
pub fn find_equivalence(a: &CharacterTable, b: &CharacterTable) -> Option<Vec<usize>> {
    let k = a.classes.len();
    if a.order != b.order || k != b.classes.len() || a.rows.len() != b.rows.len() {
        return None;
    }
    let signature = |t: &CharacterTable, c: usize| {
        let mut col = t.column(c);
        col.sort();
        (t.classes[c].element_order, t.classes[c].size, col)
    };
    let sa: Vec<_> = (0..k).map(|c| signature(a, c)).collect();
    let sb: Vec<_> = (0..k).map(|c| signature(b, c)).collect();
    let mut map = Vec::with_capacity(k);
    let mut used = vec![false; k];
    if extend_equivalence(a, b, &sa, &sb, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn extend_equivalence<S: PartialEq>(
    a: &CharacterTable,
    b: &CharacterTable,
    sa: &[S],
    sb: &[S],
    map: &mut Vec<usize>,
    used: &mut [bool],
) -> bool {
    let i = map.len();
    if i == sa.len() {
        return true;
    }
    for j in 0..sb.len() {
        if used[j] || sa[i] != sb[j] {
            continue;
        }
        map.push(j);
        used[j] = true;
        if prefixes_match(a, b, map) && extend_equivalence(a, b, sa, sb, map, used) {
            return true;
        }
        used[j] = false;
        map.pop();
    }
    false
}

fn prefixes_match(a: &CharacterTable, b: &CharacterTable, map: &[usize]) -> bool {
    let mut pa: Vec<Vec<&Cyclotomic>> = a
        .rows
        .iter()
        .map(|r| (0..map.len()).map(|c| &r.values[c]).collect())
        .collect();
    let mut pb: Vec<Vec<&Cyclotomic>> = b
        .rows
        .iter()
        .map(|r| map.iter().map(|&c| &r.values[c]).collect())
        .collect();
    pa.sort();
    pb.sort();
    pa == pb
}

/// True when the tables agree value for value after canonical ordering,
/// up to relabelling classes and characters.
pub fn tables_equivalent(a: &CharacterTable, b: &CharacterTable) -> bool {
    find_equivalence(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letter_suffixes() {
        assert_eq!(letters(0), "A");
        assert_eq!(letters(25), "Z");
        assert_eq!(letters(26), "AA");
        assert_eq!(letters(27), "AB");
        assert_eq!(class_names(&[1, 2, 4, 4]), vec!["1A", "2A", "4A", "4B"]);
    }
}
