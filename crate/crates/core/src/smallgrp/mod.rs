//! Concrete matrix groups over prime fields: closure, conjugacy classes,
//! Jordan types and direct triple counting.

mod lemma;
mod matrix;

pub use lemma::{lemma_sl, lemma_so, LemmaCount, LemmaReport};
pub use matrix::GroupElement;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::modp;

pub const DEFAULT_CLOSURE_CAP: usize = 2_000_000;
pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group too large: more than {cap} elements")]
    TooLarge { cap: usize },
    #[error("unsupported spectrum: eigenvalues outside {{1, -1}}")]
    UnsupportedSpectrum,
    #[error("invalid group spec `{0}`")]
    BadSpec(String),
    #[error("generator file line {line}: {msg}")]
    BadGenerators { line: usize, msg: String },
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    SL,
    GL,
    SO,
    ProjectiveSL,
}

/// A group named by kind, dimension and prime, e.g. `SL(3,5)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub n: usize,
    pub p: u64,
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::BadSpec(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (head, rest) = t.split_once('(').ok_or_else(bad)?;
        let args = rest.strip_suffix(')').ok_or_else(bad)?;
        let (n, p) = args.split_once(',').ok_or_else(bad)?;
        let n: usize = n.parse().map_err(|_| bad())?;
        let p: u64 = p.parse().map_err(|_| bad())?;
        if !modp::is_prime(p) || p >= 256 || n == 0 || n > 8 {
            return Err(bad());
        }
        let kind = match head.to_ascii_uppercase().as_str() {
            "SL" => GroupKind::SL,
            "GL" => GroupKind::GL,
            "SO" if n.is_multiple_of(2) && n >= 2 && p != 2 => GroupKind::SO,
            "PSL" if n == 2 => GroupKind::ProjectiveSL,
            _ => return Err(bad()),
        };
        Ok(GroupSpec { kind, n, p })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.kind {
            GroupKind::SL => "SL",
            GroupKind::GL => "GL",
            GroupKind::SO => "SO",
            GroupKind::ProjectiveSL => "PSL",
        };
        write!(f, "{head}({},{})", self.n, self.p)
    }
}

impl GroupSpec {
    pub fn projective(&self) -> bool {
        self.kind == GroupKind::ProjectiveSL
    }

    /// Standard generators: elementary transvections for SL, plus a
    /// primitive-root diagonal for GL; long root elements and a torus
    /// element for SO in the antidiagonal (hyperbolic) model.
    pub fn generators(&self) -> Vec<GroupElement> {
        let (n, p, proj) = (self.n, self.p, self.projective());
        let g = modp::primitive_root(p) as i64;
        let mut gens = Vec::new();
        match self.kind {
            GroupKind::SL | GroupKind::GL | GroupKind::ProjectiveSL => {
                for i in 0..n.saturating_sub(1) {
                    gens.push(GroupElement::elementary(n, p, i, i + 1, 1, proj));
                    gens.push(GroupElement::elementary(n, p, i + 1, i, 1, proj));
                }
                if self.kind == GroupKind::GL && p > 2 {
                    let mut d = vec![1; n];
                    d[0] = g;
                    gens.push(GroupElement::diag(p, &d, false));
                }
            }
            GroupKind::SO => {
                let bar = |i: usize| n - 1 - i;
                for i in 0..n {
                    for j in 0..n {
                        if i == j || j == bar(i) || i > j {
                            continue;
                        }
                        for (a, b) in [(i, j), (j, i)] {
                            let mut rows: Vec<Vec<i64>> =
                                (0..n).map(|r| (0..n).map(|c| (r == c) as i64).collect()).collect();
                            rows[a][b] += 1;
                            rows[bar(b)][bar(a)] -= 1;
                            gens.push(GroupElement::from_rows(p, &rows, false));
                        }
                    }
                }
                let mut d = vec![1; n];
                d[0] = g;
                d[n - 1] = modp::inv_mod(g as u64, p).expect("unit") as i64;
                gens.push(GroupElement::diag(p, &d, false));
            }
        }
        if gens.is_empty() {
            gens.push(GroupElement::identity(n, p, proj));
        }
        gens
    }

    /// Group order from the standard formulas.
    pub fn order(&self) -> u128 {
        let q = self.p as u128;
        let n = self.n as u32;
        let sl = q.pow(n * (n - 1) / 2) * (2..=n).map(|i| q.pow(i) - 1).product::<u128>();
        match self.kind {
            GroupKind::SL => sl,
            GroupKind::GL => sl * (q - 1),
            GroupKind::ProjectiveSL => sl / modp::gcd(2, self.p - 1) as u128,
            GroupKind::SO => {
                let m = n / 2;
                let mut o = q.pow(m * (m - 1)) * (q.pow(m) - 1);
                for i in 1..m {
                    o *= q.pow(2 * i) - 1;
                }
                o
            }
        }
    }
}

/// The Gram matrix of the hyperbolic form used for `SO(2m, p)`.
pub fn so_form(n: usize, p: u64) -> GroupElement {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| (i + j == n - 1) as i64).collect())
        .collect();
    GroupElement::from_rows(p, &rows, false)
}

/// A fully enumerated group, in breadth-first order from the identity.
pub struct FiniteGroup {
    pub generators: Vec<GroupElement>,
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
}

pub struct ConjugacyClass {
    /// Index of the enumeration-least member.
    pub representative: usize,
    pub members: Vec<usize>,
    pub centralizer_order: u64,
}

impl ConjugacyClass {
    pub fn size(&self) -> u64 {
        self.members.len() as u64
    }
}

pub struct ClassPartition {
    pub classes: Vec<ConjugacyClass>,
    /// Element index to class index.
    pub class_of: Vec<usize>,
}

/// Breadth-first product closure of the generators.
pub fn closure(generators: &[GroupElement], cap: usize) -> Result<FiniteGroup, GroupError> {
    let first = generators.first().expect("at least one generator");
    let id = GroupElement::identity(first.n(), first.p(), first.is_projective());
    let mut elements = vec![id.clone()];
    let mut index = HashMap::new();
    index.insert(id, 0);
    let mut head = 0;
    while head < elements.len() {
        let x = elements[head].clone();
        head += 1;
        for g in generators {
            let y = x.mul(g);
            if !index.contains_key(&y) {
                if elements.len() >= cap {
                    return Err(GroupError::TooLarge { cap });
                }
                index.insert(y.clone(), elements.len());
                elements.push(y);
            }
        }
    }
    Ok(FiniteGroup {
        generators: generators.to_vec(),
        elements,
        index,
    })
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].mul(&self.elements[b])]
    }

    pub fn inverse_idx(&self, a: usize) -> usize {
        self.index[&self.elements[a].inverse().expect("group elements are invertible")]
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> u64 {
        self.elements.iter().fold(1, |acc, g| modp::lcm(acc, g.order()))
    }

    /// Partition into conjugacy classes; each class is the conjugation orbit
    /// of its least unassigned element under the generators.
    pub fn conjugacy_classes(&self) -> ClassPartition {
        let gens: Vec<(GroupElement, GroupElement)> = self
            .generators
            .iter()
            .map(|g| (g.clone(), g.inverse().expect("invertible")))
            .collect();
        let mut class_of = vec![usize::MAX; self.elements.len()];
        let mut classes = Vec::new();
        for start in 0..self.elements.len() {
            if class_of[start] != usize::MAX {
                continue;
            }
            let c = classes.len();
            class_of[start] = c;
            let mut members = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for (g, gi) in &gens {
                    let j = self.index[&self.elements[i].conjugate_by(g, gi)];
                    if class_of[j] == usize::MAX {
                        class_of[j] = c;
                        members.push(j);
                        queue.push_back(j);
                    }
                }
            }
            members.sort_unstable();
            classes.push(ConjugacyClass {
                representative: start,
                centralizer_order: (self.elements.len() / members.len()) as u64,
                members,
            });
        }
        ClassPartition { classes, class_of }
    }
}

/// The conjugation orbit of `rep` under the group generated by `generators`,
/// without enumerating the group.
pub fn class_orbit(
    rep: &GroupElement,
    generators: &[GroupElement],
    cap: usize,
) -> Result<Vec<GroupElement>, GroupError> {
    let gens: Vec<(GroupElement, GroupElement)> = generators
        .iter()
        .map(|g| (g.clone(), g.inverse().expect("invertible")))
        .collect();
    let mut seen: HashSet<GroupElement> = HashSet::from([rep.clone()]);
    let mut orbit = vec![rep.clone()];
    let mut head = 0;
    while head < orbit.len() {
        let x = orbit[head].clone();
        head += 1;
        for (g, gi) in &gens {
            let y = x.conjugate_by(g, gi);
            if seen.insert(y.clone()) {
                if orbit.len() >= cap {
                    return Err(GroupError::TooLarge { cap });
                }
                orbit.push(y);
            }
        }
    }
    Ok(orbit)
}

/// Jordan block sizes per eigenvalue, each partition in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JordanType {
    pub blocks: BTreeMap<i64, Vec<usize>>,
}

impl JordanType {
    pub fn partition(&self, eigenvalue: i64) -> &[usize] {
        self.blocks.get(&eigenvalue).map_or(&[], Vec::as_slice)
    }

    pub fn is_unipotent(&self) -> bool {
        self.blocks.keys().all(|&e| e == 1)
    }
}

impl fmt::Display for JordanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|(e, b)| {
                let sizes: Vec<String> = b.iter().map(|s| s.to_string()).collect();
                format!("{e}:({})", sizes.join(","))
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Jordan type from the ranks of powers of `m - λI` for `λ = ±1`.
pub fn jordan_type(m: &GroupElement) -> Result<JordanType, GroupError> {
    let n = m.n();
    let p = m.p();
    let mut blocks = BTreeMap::new();
    let mut total = 0;
    let eigenvalues: &[i64] = if p == 2 { &[1] } else { &[1, -1] };
    for &lambda in eigenvalues {
        let a = m.minus_scalar(lambda.rem_euclid(p as i64) as u64);
        let mut ranks = vec![n];
        let mut power = GroupElement::identity(n, p, false);
        for _ in 0..n {
            power = power.mul(&a);
            ranks.push(power.rank());
        }
        // at_least[k] = number of blocks of size >= k
        let at_least: Vec<usize> = (1..=n).map(|k| ranks[k - 1] - ranks[k]).collect();
        let mut sizes = Vec::new();
        for k in (1..=n).rev() {
            let exact = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
            sizes.extend(std::iter::repeat_n(k, exact));
        }
        total += sizes.iter().sum::<usize>();
        if !sizes.is_empty() {
            blocks.insert(lambda, sizes);
        }
    }
    if total != n {
        return Err(GroupError::UnsupportedSpectrum);
    }
    Ok(JordanType { blocks })
}

/// Unipotent with quadratic minimal polynomial: `(y - I)^2 = 0`, `y ≠ I`.
pub fn is_quadratic_unipotent(y: &GroupElement) -> bool {
    let a = y.minus_scalar(1);
    let zero = a.entries_zero();
    !zero && a.mul(&a).entries_zero()
}

impl GroupElement {
    fn entries_zero(&self) -> bool {
        self.canonical_form().iter().all(|&e| e == 0)
    }
}

/// `c3_size · #{x ∈ c1 : x⁻¹ z⁻¹ satisfies pred}`: the number of triples in
/// `C1 × C2 × C3` with product 1, where `C2` is the set cut out by `pred`.
pub fn direct_triple_count<F>(c1: &[GroupElement], pred: F, z: &GroupElement, c3_size: u64) -> u64
where
    F: Fn(&GroupElement) -> bool + Sync,
{
    let z_inv = z.inverse().expect("invertible");
    let hits: u64 = c1
        .par_iter()
        .filter(|x| pred(&x.inverse().expect("invertible").mul(&z_inv)))
        .count() as u64;
    hits * c3_size
}

/// Parses `matrix <n> <p>` blocks, each followed by `n` rows of `n` integers.
/// Blank lines and `#` comments are ignored.
pub fn parse_generators(text: &str, projective: bool) -> Result<Vec<GroupElement>, GroupError> {
    let bad = |line: usize, msg: &str| GroupError::BadGenerators {
        line,
        msg: msg.to_string(),
    };
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let (ln, header) = lines[i];
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "matrix" {
            return Err(bad(ln, "expected `matrix <n> <p>`"));
        }
        let n: usize = toks[1].parse().ok().filter(|&n| (1..=8).contains(&n)).ok_or_else(|| bad(ln, "bad dimension"))?;
        let p: u64 = toks[2]
            .parse()
            .ok()
            .filter(|&p| modp::is_prime(p) && p < 256)
            .ok_or_else(|| bad(ln, "bad prime"))?;
        let mut rows = Vec::with_capacity(n);
        for r in 0..n {
            let &(rl, row) = lines.get(i + 1 + r).ok_or_else(|| bad(ln, "matrix truncated"))?;
            let vals: Vec<i64> = row
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad(rl, "expected integers"))?;
            if vals.len() != n {
                return Err(bad(rl, "row length differs from n"));
            }
            rows.push(vals);
        }
        let m = GroupElement::from_rows(p, &rows, projective);
        if m.det() == 0 {
            return Err(bad(ln, "matrix is singular"));
        }
        if let Some(prev) = out.first() {
            let prev: &GroupElement = prev;
            if (prev.n(), prev.p()) != (n, p) {
                return Err(bad(ln, "generators must share n and p"));
            }
        }
        out.push(m);
        i += n + 1;
    }
    if out.is_empty() {
        return Err(bad(1, "no matrices"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(s: &str) -> FiniteGroup {
        let spec: GroupSpec = s.parse().unwrap();
        closure(&spec.generators(), DEFAULT_CLOSURE_CAP).unwrap()
    }

    #[test]
    fn closure_orders() {
        assert_eq!(group("SL(2,5)").order(), 120);
        assert_eq!(group("GL(2,3)").order(), 48);
        assert_eq!(group("PSL(2,7)").order(), 168);
        assert_eq!(group("SO(4,3)").order(), 576);
        for s in ["SL(2,5)", "GL(2,3)", "PSL(2,7)", "SO(4,3)", "SL(3,3)"] {
            let spec: GroupSpec = s.parse().unwrap();
            assert_eq!(group(s).order() as u128, spec.order(), "{s}");
        }
    }

    #[test]
    fn trivial_group() {
        let g = closure(&[GroupElement::identity(2, 3, false)], 10).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.conjugacy_classes().classes.len(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        let spec: GroupSpec = "SL(2,5)".parse().unwrap();
        assert_eq!(closure(&spec.generators(), 100).err(), Some(GroupError::TooLarge { cap: 100 }));
    }

    #[test]
    fn class_counts() {
        assert_eq!(group("SL(2,5)").conjugacy_classes().classes.len(), 9);
        let l27 = group("PSL(2,7)").conjugacy_classes();
        let mut sizes: Vec<u64> = l27.classes.iter().map(|c| c.size()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 21, 24, 24, 42, 56]);
    }

    #[test]
    fn so_generators_preserve_the_form() {
        let spec: GroupSpec = "SO(4,5)".parse().unwrap();
        let j = so_form(4, 5);
        for g in spec.generators() {
            assert_eq!(g.transpose().mul(&j).mul(&g), j);
            assert_eq!(g.det(), 1);
        }
    }

    #[test]
    fn orbits() {
        let spec: GroupSpec = "SL(2,3)".parse().unwrap();
        let u = GroupElement::jordan_block(2, 3, false);
        assert_eq!(class_orbit(&u, &spec.generators(), 100).unwrap().len(), 4);
        let c = GroupElement::scalar(2, 3, 2, false);
        assert_eq!(class_orbit(&c, &spec.generators(), 100).unwrap().len(), 1);
    }

    #[test]
    fn jordan_types() {
        let id = GroupElement::identity(4, 5, false);
        assert_eq!(jordan_type(&id).unwrap().partition(1), &[1, 1, 1, 1]);
        let j4 = GroupElement::jordan_block(4, 5, false);
        assert_eq!(jordan_type(&j4).unwrap().partition(1), &[4]);
        let rows = vec![vec![1, 1, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 0, 1]];
        let jj = GroupElement::from_rows(5, &rows, false);
        assert_eq!(jordan_type(&jj).unwrap().partition(1), &[2, 2]);
        assert!(is_quadratic_unipotent(&jj));
        assert!(!is_quadratic_unipotent(&j4));
        let inv = GroupElement::diag(5, &[1, 1, -1, -1], false);
        let t = jordan_type(&inv).unwrap();
        assert_eq!(t.partition(-1), &[1, 1]);
        assert!(!t.is_unipotent());
        let d = GroupElement::diag(5, &[2, 3, 1, 1], false);
        assert_eq!(jordan_type(&d), Err(GroupError::UnsupportedSpectrum));
    }

    #[test]
    fn spec_strings() {
        assert!("SO(3,5)".parse::<GroupSpec>().is_err());
        assert!("PSL(3,5)".parse::<GroupSpec>().is_err());
        assert!("SL(2,4)".parse::<GroupSpec>().is_err());
        assert_eq!("GL(2, 3)".parse::<GroupSpec>().unwrap().to_string(), "GL(2,3)");
    }

    #[test]
    fn generator_file() {
        let text = "# S3 as GL(2,2)\nmatrix 2 2\n1 1\n0 1\nmatrix 2 2\n1 0\n1 1\n";
        let gens = parse_generators(text, false).unwrap();
        assert_eq!(closure(&gens, 100).unwrap().order(), 6);
        assert!(parse_generators("matrix 2 2\n1 1\n", false).is_err());
        assert!(parse_generators("matrix 2 3\n1 1\n1 1\n", false).is_err());
    }
}
