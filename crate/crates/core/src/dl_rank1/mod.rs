//! Generic character tables of `GL2(q)`, `SL2(q)` and `PGL2(q)` instantiated
//! at concrete `q`, with Deligne–Lusztig characters and the identities they
//! satisfy at rank 1.
//!
//! Exponent conventions: `γ` generates `F_{q²}^×`, `γ0 = γ^(q+1)` generates
//! `F_q^×`. A split element `diag(γ0^a, γ0^b)` is `Split(a, b)`, an elliptic
//! element with eigenvalues `γ^k, γ^(qk)` is `Elliptic(k)`. In `SL2` the split
//! torus is `diag(γ0^x, γ0^-x)` and the nonsplit torus is `γ^((q-1)m)`; in
//! `PGL2` they are `diag(γ0^y, 1)` and `γ^n` modulo scalars.

mod checks;

pub use checks::{
    check_dl_orthogonality, check_sum, check_sym, check_sym_regular, check_valrt, check_valuni,
    dl_character, dual_data, semisimple_unipotent_value, semisimple_unipotent_values, val_rt, vanishing_sum, CheckReport, DLCharacter,
    DualSemisimpleDatum, GreenFunctions, IdentityCheck, VanishingSum,
};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::arith::{Cyclotomic, Rational};
use crate::chartable::{class_names, Character, CharacterTable, ClassRecord};
use crate::modp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DlError {
    #[error("{family}({q}) is not supported: {reason}")]
    Unsupported { family: FamilyKind, q: u64, reason: String },
    #[error("unknown family `{0}` (expected GL2, SL2 or PGL2)")]
    UnknownFamily(String),
    #[error("torus character {0:?} is not valid")]
    BadTheta(Vec<u64>),
    #[error("class {0} is not semisimple")]
    NotSemisimple(String),
    #[error("{0} and {1} are not in duality")]
    NotDual(FamilyKind, FamilyKind),
    #[error("identity violated: {0}")]
    Violation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    GL2,
    SL2,
    PGL2,
}

impl FamilyKind {
    pub fn dual(self) -> FamilyKind {
        match self {
            FamilyKind::GL2 => FamilyKind::GL2,
            FamilyKind::SL2 => FamilyKind::PGL2,
            FamilyKind::PGL2 => FamilyKind::SL2,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::GL2 => "GL2",
            FamilyKind::SL2 => "SL2",
            FamilyKind::PGL2 => "PGL2",
        })
    }
}

impl FromStr for FamilyKind {
    type Err = DlError;

    fn from_str(s: &str) -> Result<Self, DlError> {
        match s.to_ascii_uppercase().as_str() {
            "GL2" => Ok(FamilyKind::GL2),
            "SL2" => Ok(FamilyKind::SL2),
            "PGL2" => Ok(FamilyKind::PGL2),
            _ => Err(DlError::UnknownFamily(s.to_string())),
        }
    }
}

/// Semantic class label; see the module docs for the exponent conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassLabel {
    Central(u64),
    /// `central · u` with `u` a nontrivial unipotent; `variant` separates the
    /// two unipotent classes of `SL2`.
    Unipotent { center: u64, variant: u8 },
    Split(u64, u64),
    Elliptic(u64),
}

impl ClassLabel {
    pub fn is_semisimple(&self) -> bool {
        !matches!(self, ClassLabel::Unipotent { .. })
    }

    pub fn is_unipotent(&self) -> bool {
        matches!(self, ClassLabel::Central(0) | ClassLabel::Unipotent { center: 0, .. })
    }

    pub fn is_regular_unipotent(&self) -> bool {
        matches!(self, ClassLabel::Unipotent { center: 0, .. })
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Central(a) => write!(f, "central({a})"),
            ClassLabel::Unipotent { center, variant } => write!(f, "unipotent({center},{variant})"),
            ClassLabel::Split(a, b) => write!(f, "split({a},{b})"),
            ClassLabel::Elliptic(k) => write!(f, "nonsplit({k})"),
        }
    }
}

/// Labels of irreducible characters. Indices follow the `GL2` conventions:
/// `Linear(i)` is `α_i ∘ det`, `Principal(i, j)` is induced from `(α_i, α_j)`,
/// `Discrete(j)` is attached to `φ_j` on `F_{q²}^×` (for `SL2`, `φ_j` on
/// the norm-one subgroup).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowLabel {
    Linear(u64),
    Steinberg(u64),
    Principal(u64, u64),
    Discrete(u64),
    HalfPrincipal(u8),
    HalfDiscrete(u8),
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Linear(i) => write!(f, "linear({i})"),
            RowLabel::Steinberg(i) => write!(f, "steinberg({i})"),
            RowLabel::Principal(i, j) => write!(f, "principal({i},{j})"),
            RowLabel::Discrete(j) => write!(f, "discrete({j})"),
            RowLabel::HalfPrincipal(v) => write!(f, "half-principal({v})"),
            RowLabel::HalfDiscrete(v) => write!(f, "half-discrete({v})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TorusKind {
    Split,
    Nonsplit,
}

impl TorusKind {
    /// `ε_G ε_T`.
    pub fn sign(self) -> i64 {
        match self {
            TorusKind::Split => 1,
            TorusKind::Nonsplit => -1,
        }
    }
}

impl fmt::Display for TorusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TorusKind::Split => "split",
            TorusKind::Nonsplit => "nonsplit",
        })
    }
}

/// Exponent bookkeeping for one family at one `q`.
#[derive(Debug, Clone, Copy)]
struct Shape {
    kind: FamilyKind,
    q: u64,
    p: u64,
}

impl Shape {
    fn n1(&self) -> u64 {
        self.q - 1
    }
    fn n2(&self) -> u64 {
        self.q * self.q - 1
    }
    fn n3(&self) -> u64 {
        self.q + 1
    }
    fn h(&self) -> u64 {
        (self.q - 1) / 2
    }
    fn h3(&self) -> u64 {
        self.q.div_ceil(2)
    }

    fn order(&self) -> u64 {
        let q = self.q;
        match self.kind {
            FamilyKind::GL2 => q * (q - 1) * (q * q - 1),
            _ => q * (q * q - 1),
        }
    }

    fn normalize(&self, l: ClassLabel) -> ClassLabel {
        use ClassLabel::*;
        let (n1, n2, n3, h, h3, q) = (self.n1(), self.n2(), self.n3(), self.h(), self.h3(), self.q);
        match self.kind {
            FamilyKind::GL2 => match l {
                Central(a) => Central(a % n1),
                Unipotent { center, .. } => Unipotent {
                    center: center % n1,
                    variant: 0,
                },
                Split(a, b) => {
                    let (a, b) = (a % n1, b % n1);
                    if a == b {
                        Central(a)
                    } else {
                        Split(a.min(b), a.max(b))
                    }
                }
                Elliptic(k) => {
                    let k = k % n2;
                    if k % n3 == 0 {
                        Central(k / n3)
                    } else {
                        Elliptic(k.min(k * q % n2))
                    }
                }
            },
            FamilyKind::SL2 => match l {
                Central(c) => Central(c % n1),
                Unipotent { center, variant } => Unipotent {
                    center: center % n1,
                    variant,
                },
                Split(x, _) => {
                    let x = x % n1;
                    if x == 0 || x == h {
                        Central(x)
                    } else {
                        Split(x.min(n1 - x), x.max(n1 - x))
                    }
                }
                Elliptic(m) => match m % n3 {
                    0 => Central(0),
                    m if m == h3 => Central(h),
                    m => Elliptic(m.min(n3 - m)),
                },
            },
            FamilyKind::PGL2 => match l {
                Central(_) => Central(0),
                Unipotent { .. } => Unipotent { center: 0, variant: 0 },
                Split(y, _) => match y % n1 {
                    0 => Central(0),
                    y => Split(y.min(n1 - y), y.max(n1 - y)),
                },
                Elliptic(n) => match n % n3 {
                    0 => Central(0),
                    n => Elliptic(n.min(n3 - n)),
                },
            },
        }
    }

    fn is_square(&self, k: u64) -> bool {
        modp::pow_mod(k % self.p, (self.p - 1) / 2, self.p) == 1
    }

    fn pow(&self, l: ClassLabel, k: u64) -> ClassLabel {
        use ClassLabel::*;
        match l {
            Central(a) => self.normalize(Central(a * k)),
            Unipotent { center, variant } => {
                if k.is_multiple_of(self.p) {
                    self.normalize(Central(center * k))
                } else {
                    let flip = self.kind == FamilyKind::SL2 && !self.is_square(k);
                    self.normalize(Unipotent {
                        center: center * k,
                        variant: variant ^ flip as u8,
                    })
                }
            }
            Split(a, b) => self.normalize(Split(a * k, b * k)),
            Elliptic(m) => self.normalize(Elliptic(m * k)),
        }
    }

    fn element_order(&self, l: ClassLabel) -> u64 {
        (1..).find(|&k| self.pow(l, k) == ClassLabel::Central(0)).expect("finite order")
    }

    fn class_size(&self, l: ClassLabel) -> u64 {
        use ClassLabel::*;
        let q = self.q;
        match (self.kind, l) {
            (_, Central(_)) => 1,
            (FamilyKind::SL2, Unipotent { .. }) => (q * q - 1) / 2,
            (_, Unipotent { .. }) => q * q - 1,
            (FamilyKind::PGL2, Split(y, _)) if y == self.h() => q * (q + 1) / 2,
            (_, Split(..)) => q * (q + 1),
            (FamilyKind::PGL2, Elliptic(n)) if n == self.h3() => q * (q - 1) / 2,
            (_, Elliptic(_)) => q * (q - 1),
        }
    }

    fn classes(&self) -> Vec<ClassLabel> {
        use ClassLabel::*;
        let (n1, n2, n3, h, h3) = (self.n1(), self.n2(), self.n3(), self.h(), self.h3());
        let mut out = Vec::new();
        match self.kind {
            FamilyKind::GL2 => {
                out.extend((0..n1).map(Central));
                out.extend((0..n1).map(|a| Unipotent { center: a, variant: 0 }));
                for a in 0..n1 {
                    out.extend((a + 1..n1).map(|b| Split(a, b)));
                }
                out.extend(
                    (0..n2)
                        .filter(|&k| k % n3 != 0)
                        .map(Elliptic)
                        .filter(|&l| self.normalize(l) == l),
                );
            }
            FamilyKind::SL2 => {
                out.extend([Central(0), Central(h)]);
                for center in [0, h] {
                    out.extend((0..2).map(|variant| Unipotent { center, variant }));
                }
                out.extend((1..h).map(|x| Split(x, n1 - x)));
                out.extend((1..h3).map(Elliptic));
            }
            FamilyKind::PGL2 => {
                out.extend([Central(0), Unipotent { center: 0, variant: 0 }]);
                out.extend((1..=h).map(|y| Split(y, n1 - y)));
                out.extend((1..=h3).map(Elliptic));
            }
        }
        out
    }

    fn rows(&self) -> Vec<RowLabel> {
        use RowLabel::*;
        let (n1, n2, n3, h, h3) = (self.n1(), self.n2(), self.n3(), self.h(), self.h3());
        let mut out = Vec::new();
        match self.kind {
            FamilyKind::GL2 => {
                out.extend((0..n1).map(Linear));
                out.extend((0..n1).map(Steinberg));
                for i in 0..n1 {
                    out.extend((i + 1..n1).map(|j| Principal(i, j)));
                }
                out.extend(
                    (0..n2)
                        .filter(|&j| j % n3 != 0 && j <= j * self.q % n2)
                        .map(Discrete),
                );
            }
            FamilyKind::SL2 => {
                out.extend([Linear(0), Steinberg(0)]);
                out.extend((1..h).map(|i| Principal(i, n1 - i)));
                out.extend((1..h3).map(Discrete));
                out.extend([HalfPrincipal(0), HalfPrincipal(1), HalfDiscrete(0), HalfDiscrete(1)]);
            }
            FamilyKind::PGL2 => {
                out.extend([Linear(0), Linear(h), Steinberg(0), Steinberg(h)]);
                out.extend((1..h).map(|i| Principal(i, n1 - i)));
                out.extend((1..h3).map(|m| Discrete((self.q - 1) * m)));
            }
        }
        out
    }

    fn value(&self, row: RowLabel, class: ClassLabel) -> Cyclotomic {
        match self.kind {
            FamilyKind::GL2 => self.gl2_value(row, class),
            FamilyKind::SL2 => self.sl2_value(row, class),
            FamilyKind::PGL2 => {
                let lift = match class {
                    ClassLabel::Split(y, _) => ClassLabel::Split(0, y),
                    other => other,
                };
                Shape {
                    kind: FamilyKind::GL2,
                    ..*self
                }
                .gl2_value(row, lift)
            }
        }
    }

    fn gl2_value(&self, row: RowLabel, class: ClassLabel) -> Cyclotomic {
        use ClassLabel::*;
        use RowLabel::*;
        let q = self.q as i64;
        let z1 = |e: u64| Cyclotomic::zeta(self.n1(), e as i64);
        let z2 = |e: u64| Cyclotomic::zeta(self.n2(), e as i64);
        let zero = Cyclotomic::zero;
        match (row, class) {
            (Linear(i), Central(a) | Unipotent { center: a, .. }) => z1(2 * i * a),
            (Linear(i), Split(a, b)) => z1(i * (a + b)),
            (Linear(i), Elliptic(k)) => z1(i * k),
            (Steinberg(i), Central(a)) => z1(2 * i * a).mul_int(q),
            (Steinberg(_), Unipotent { .. }) => zero(),
            (Steinberg(i), Split(a, b)) => z1(i * (a + b)),
            (Steinberg(i), Elliptic(k)) => -z1(i * k),
            (Principal(i, j), Central(a)) => z1((i + j) * a).mul_int(q + 1),
            (Principal(i, j), Unipotent { center: a, .. }) => z1((i + j) * a),
            (Principal(i, j), Split(a, b)) => &z1(i * a + j * b) + &z1(i * b + j * a),
            (Principal(..), Elliptic(_)) => zero(),
            (Discrete(j), Central(a)) => z2(j * self.n3() * a).mul_int(q - 1),
            (Discrete(j), Unipotent { center: a, .. }) => -z2(j * self.n3() * a),
            (Discrete(_), Split(..)) => zero(),
            (Discrete(j), Elliptic(k)) => -(&z2(j * k) + &z2(j * k * self.q)),
            (HalfPrincipal(_) | HalfDiscrete(_), _) => unreachable!("GL2 has no half characters"),
        }
    }

    /// The quadratic Gauss sum `Σ (x/p) ζ_p^x`, whose square is `(-1)^((p-1)/2) p`.
    fn gauss_sum(&self) -> Cyclotomic {
        let p = self.p;
        Cyclotomic::from_int_exponents(
            p,
            (1..p).map(|x| (x as i64, if self.is_square(x) { 1 } else { -1 })),
        )
    }

    fn sl2_value(&self, row: RowLabel, class: ClassLabel) -> Cyclotomic {
        use ClassLabel::*;
        use RowLabel::*;
        let q = self.q as i64;
        let h = self.h();
        let eps: i64 = if h.is_multiple_of(2) { 1 } else { -1 };
        let z1 = |e: u64| Cyclotomic::zeta(self.n1(), e as i64);
        let z3 = |e: u64| Cyclotomic::zeta(self.n3(), e as i64);
        let sgn = |odd: bool| if odd { -1 } else { 1 };
        let int = Cyclotomic::from_int;
        let half = Rational::new(1, 2).expect("nonzero");
        let is_minus = |c: u64| c == h;
        match (row, class) {
            (Linear(_), _) => Cyclotomic::one(),
            (Steinberg(_), Central(_)) => int(q),
            (Steinberg(_), Unipotent { .. }) => Cyclotomic::zero(),
            (Steinberg(_), Split(..)) => Cyclotomic::one(),
            (Steinberg(_), Elliptic(_)) => int(-1),
            (Principal(i, _), Central(c)) => z1(i * c).mul_int(q + 1),
            (Principal(i, _), Unipotent { center, .. }) => z1(i * center),
            (Principal(i, _), Split(x, _)) => &z1(i * x) + &z1(i * (self.n1() - x)),
            (Principal(..), Elliptic(_)) => Cyclotomic::zero(),
            (Discrete(n), Central(c)) => int(sgn(is_minus(c) && n % 2 == 1) * (q - 1)),
            (Discrete(n), Unipotent { center, .. }) => int(-sgn(is_minus(center) && n % 2 == 1)),
            (Discrete(_), Split(..)) => Cyclotomic::zero(),
            (Discrete(n), Elliptic(m)) => -(&z3(n * m) + &z3(n * (self.n3() - m))),
            (HalfPrincipal(_), Central(c)) => {
                int(if is_minus(c) { eps } else { 1 } * (q + 1)).scale(&half)
            }
            (HalfPrincipal(v), Unipotent { center, variant }) => {
                let g = self.gauss_sum();
                let g = if v == variant { g } else { -g };
                (&Cyclotomic::one() + &g).scale(&half).mul_int(if is_minus(center) { eps } else { 1 })
            }
            (HalfPrincipal(_), Split(x, _)) => int(sgn(x % 2 == 1)),
            (HalfPrincipal(_), Elliptic(_)) => Cyclotomic::zero(),
            (HalfDiscrete(_), Central(c)) => {
                int(if is_minus(c) { -eps } else { 1 } * (q - 1)).scale(&half)
            }
            (HalfDiscrete(v), Unipotent { center, variant }) => {
                let g = self.gauss_sum();
                let g = if v == variant { g } else { -g };
                (&g - &Cyclotomic::one()).scale(&half).mul_int(if is_minus(center) { -eps } else { 1 })
            }
            (HalfDiscrete(_), Split(..)) => Cyclotomic::zero(),
            (HalfDiscrete(_), Elliptic(m)) => int(-sgn(m % 2 == 1)),
        }
    }
}

/// One of `GL2(q)`, `SL2(q)`, `PGL2(q)` with its exact character table in
/// canonical order and semantic labels for classes and rows.
#[derive(Debug, Clone)]
pub struct Rank1Family {
    pub kind: FamilyKind,
    pub q: u64,
    pub p: u64,
    pub table: CharacterTable,
    pub class_labels: Vec<ClassLabel>,
    pub row_labels: Vec<RowLabel>,
    class_index: HashMap<ClassLabel, usize>,
    row_index: HashMap<RowLabel, usize>,
}

fn prime_power_base(q: u64) -> Option<u64> {
    let primes = modp::prime_factors(q);
    (primes.len() == 1).then(|| primes[0])
}

/// Builds the exact character table of `kind` at `q`.
pub fn build_family(kind: FamilyKind, q: u64) -> Result<Rank1Family, DlError> {
    let unsupported = |reason: &str| DlError::Unsupported {
        family: kind,
        q,
        reason: reason.to_string(),
    };
    if q < 3 {
        return Err(unsupported("q must be at least 3"));
    }
    let p = prime_power_base(q).ok_or_else(|| unsupported("q must be a prime power"))?;
    if kind != FamilyKind::GL2 && (p != q || p == 2) {
        return Err(unsupported("only odd prime q is supported for this family"));
    }
    let shape = Shape { kind, q, p };

    let mut labels = shape.classes();
    labels.sort_by_key(|&l| (shape.element_order(l) != 1, shape.element_order(l), shape.class_size(l), l));
    let orders: Vec<u64> = labels.iter().map(|&l| shape.element_order(l)).collect();
    let names = class_names(&orders);
    let exponent = orders.iter().fold(1, |acc, &m| modp::lcm(acc, m));
    let position: HashMap<ClassLabel, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let classes: Vec<ClassRecord> = labels
        .iter()
        .zip(&names)
        .zip(&orders)
        .map(|((&l, name), &m)| ClassRecord {
            name: name.clone(),
            size: shape.class_size(l),
            element_order: m,
            power_maps: modp::prime_factors(exponent)
                .into_iter()
                .map(|r| (r, position[&shape.pow(l, r)]))
                .collect(),
        })
        .collect();
    let row_labels = shape.rows();
    let rows: Vec<Character> = row_labels
        .iter()
        .map(|&r| Character {
            name: r.to_string(),
            values: labels.iter().map(|&c| shape.value(r, c)).collect(),
        })
        .collect();
    let mut table = CharacterTable {
        name: format!("{kind}({q})"),
        order: shape.order(),
        exponent,
        classes,
        rows,
    };
    table.canonicalize();

    let by_name: HashMap<&str, ClassLabel> = names.iter().map(String::as_str).zip(labels.iter().copied()).collect();
    let class_labels: Vec<ClassLabel> = table.classes.iter().map(|c| by_name[c.name.as_str()]).collect();
    let row_by_name: HashMap<String, RowLabel> = row_labels.iter().map(|r| (r.to_string(), *r)).collect();
    let row_labels: Vec<RowLabel> = table.rows.iter().map(|r| row_by_name[&r.name]).collect();
    for (i, r) in table.rows.iter_mut().enumerate() {
        r.name = format!("X.{}", i + 1);
    }
    Ok(Rank1Family {
        kind,
        q,
        p,
        class_index: class_labels.iter().enumerate().map(|(i, &l)| (l, i)).collect(),
        row_index: row_labels.iter().enumerate().map(|(i, &l)| (l, i)).collect(),
        table,
        class_labels,
        row_labels,
    })
}

impl Rank1Family {
    fn shape(&self) -> Shape {
        Shape {
            kind: self.kind,
            q: self.q,
            p: self.p,
        }
    }

    /// Number of classes predicted by the classical count.
    pub fn expected_class_count(&self) -> usize {
        let q = self.q as usize;
        match self.kind {
            FamilyKind::GL2 => q * q - 1,
            FamilyKind::SL2 => q + 4,
            FamilyKind::PGL2 => q + 2,
        }
    }

    pub fn class_of(&self, label: ClassLabel) -> Option<usize> {
        self.class_index.get(&self.shape().normalize(label)).copied()
    }

    pub fn row_of(&self, label: RowLabel) -> Option<usize> {
        self.row_index.get(&label).copied()
    }

    pub fn semisimple_classes(&self) -> Vec<usize> {
        (0..self.class_labels.len())
            .filter(|&c| self.class_labels[c].is_semisimple())
            .collect()
    }

    pub fn unipotent_classes(&self) -> Vec<usize> {
        (0..self.class_labels.len())
            .filter(|&c| self.class_labels[c].is_unipotent())
            .collect()
    }

    /// Class name followed by its semantic label, e.g. `5A [nonsplit(4)]`.
    pub fn describe_class(&self, c: usize) -> String {
        format!("{} [{}]", self.table.classes[c].name, self.class_labels[c])
    }

    /// `|T^F|` for the torus of the given type.
    pub fn torus_order(&self, kind: TorusKind) -> u64 {
        self.torus_moduli(kind).iter().product()
    }

    /// The torus as a product of cyclic groups; its characters are indexed
    /// the same way and pair with elements by `ζ_n^(θ·s)` coordinatewise.
    pub fn torus_moduli(&self, kind: TorusKind) -> Vec<u64> {
        let s = self.shape();
        match (self.kind, kind) {
            (FamilyKind::GL2, TorusKind::Split) => vec![s.n1(), s.n1()],
            (FamilyKind::GL2, TorusKind::Nonsplit) => vec![s.n2()],
            (_, TorusKind::Split) => vec![s.n1()],
            (_, TorusKind::Nonsplit) => vec![s.n3()],
        }
    }

    /// All index vectors of the torus (equivalently of its character group).
    pub fn torus_points(&self, kind: TorusKind) -> Vec<Vec<u64>> {
        let moduli = self.torus_moduli(kind);
        let mut out = vec![Vec::new()];
        for &m in &moduli {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..m).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    /// The nontrivial Weyl element acting on torus coordinates.
    pub fn weyl_act(&self, kind: TorusKind, s: &[u64]) -> Vec<u64> {
        let moduli = self.torus_moduli(kind);
        match (self.kind, kind) {
            (FamilyKind::GL2, TorusKind::Split) => vec![s[1], s[0]],
            (FamilyKind::GL2, TorusKind::Nonsplit) => vec![s[0] * self.q % moduli[0]],
            _ => vec![(moduli[0] - s[0] % moduli[0]) % moduli[0]],
        }
    }

    /// `θ(s)` for a torus character and torus element.
    pub fn pairing(&self, kind: TorusKind, theta: &[u64], s: &[u64]) -> Cyclotomic {
        let moduli = self.torus_moduli(kind);
        let n = moduli.iter().fold(1, |acc, &m| modp::lcm(acc, m));
        let e: u64 = moduli
            .iter()
            .zip(theta.iter().zip(s))
            .map(|(&m, (&t, &x))| (t * x % m) * (n / m))
            .sum();
        Cyclotomic::zeta(n, e as i64)
    }

    /// The class of a torus element.
    pub fn torus_class(&self, kind: TorusKind, s: &[u64]) -> usize {
        let label = match (self.kind, kind) {
            (FamilyKind::GL2, TorusKind::Split) => ClassLabel::Split(s[0], s[1]),
            (_, TorusKind::Split) => ClassLabel::Split(s[0], 0),
            (_, TorusKind::Nonsplit) => ClassLabel::Elliptic(s[0]),
        };
        self.class_of(label).expect("torus elements are semisimple classes")
    }

    /// Coordinates of a representative of a semisimple class in each torus
    /// type that contains one.
    pub fn torus_coordinates(&self, c: usize) -> Result<Vec<(TorusKind, Vec<u64>)>, DlError> {
        let s = self.shape();
        let label = self.class_labels[c];
        Ok(match (self.kind, label) {
            (_, ClassLabel::Unipotent { .. }) => return Err(DlError::NotSemisimple(self.describe_class(c))),
            (FamilyKind::GL2, ClassLabel::Central(a)) => vec![
                (TorusKind::Split, vec![a, a]),
                (TorusKind::Nonsplit, vec![a * s.n3()]),
            ],
            (FamilyKind::GL2, ClassLabel::Split(a, b)) => vec![(TorusKind::Split, vec![a, b])],
            (FamilyKind::SL2, ClassLabel::Central(x)) => vec![
                (TorusKind::Split, vec![x]),
                (TorusKind::Nonsplit, vec![if x == 0 { 0 } else { s.h3() }]),
            ],
            (FamilyKind::PGL2, ClassLabel::Central(_)) => {
                vec![(TorusKind::Split, vec![0]), (TorusKind::Nonsplit, vec![0])]
            }
            (_, ClassLabel::Split(x, _)) => vec![(TorusKind::Split, vec![x])],
            (_, ClassLabel::Elliptic(k)) => vec![(TorusKind::Nonsplit, vec![k])],
        })
    }

    /// Irreducible decomposition of `R_{T,θ}`.
    pub(crate) fn dl_decomposition(&self, kind: TorusKind, theta: &[u64]) -> Vec<(RowLabel, i64)> {
        use RowLabel::*;
        let s = self.shape();
        let (n1, n3, h, h3) = (s.n1(), s.n3(), s.h(), s.h3());
        let principal = |i: u64, j: u64| {
            if i == j {
                vec![(Linear(i), 1), (Steinberg(i), 1)]
            } else {
                vec![(Principal(i.min(j), i.max(j)), 1)]
            }
        };
        let discrete_gl2 = |j: u64| {
            if j.is_multiple_of(n3) {
                let i = j / n3;
                vec![(Linear(i), 1), (Steinberg(i), -1)]
            } else {
                vec![(Discrete(j.min(j * self.q % s.n2())), -1)]
            }
        };
        match (self.kind, kind) {
            (FamilyKind::GL2, TorusKind::Split) => principal(theta[0], theta[1]),
            (FamilyKind::GL2, TorusKind::Nonsplit) => discrete_gl2(theta[0]),
            (FamilyKind::PGL2, TorusKind::Split) => principal(theta[0], (n1 - theta[0]) % n1),
            (FamilyKind::PGL2, TorusKind::Nonsplit) => discrete_gl2((self.q - 1) * theta[0]),
            (FamilyKind::SL2, TorusKind::Split) => match theta[0] {
                0 => vec![(Linear(0), 1), (Steinberg(0), 1)],
                i if i == h => vec![(HalfPrincipal(0), 1), (HalfPrincipal(1), 1)],
                i => vec![(Principal(i.min(n1 - i), i.max(n1 - i)), 1)],
            },
            (FamilyKind::SL2, TorusKind::Nonsplit) => match theta[0] {
                0 => vec![(Linear(0), 1), (Steinberg(0), -1)],
                n if n == h3 => vec![(HalfDiscrete(0), -1), (HalfDiscrete(1), -1)],
                n => vec![(Discrete(n.min(n3 - n)), -1)],
            },
        }
    }
}

/// The part of `n` prime to `p`.
pub fn p_prime_part(mut n: u64, p: u64) -> u64 {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartable::validate;

    #[test]
    fn class_counts() {
        for (kind, q) in [
            (FamilyKind::GL2, 3),
            (FamilyKind::GL2, 4),
            (FamilyKind::SL2, 5),
            (FamilyKind::PGL2, 7),
        ] {
            let f = build_family(kind, q).unwrap();
            assert_eq!(f.table.num_classes(), f.expected_class_count(), "{kind}({q})");
            assert_eq!(f.table.rows.len(), f.expected_class_count());
        }
    }

    #[test]
    fn gauss_sum_squares() {
        for p in [5u64, 7, 11] {
            let s = Shape {
                kind: FamilyKind::SL2,
                q: p,
                p,
            };
            let g = s.gauss_sum();
            let sign = if p % 4 == 1 { 1 } else { -1 };
            assert_eq!(&g * &g, Cyclotomic::from_int(sign * p as i64));
        }
    }

    #[test]
    fn small_tables_validate() {
        let f = build_family(FamilyKind::SL2, 7).unwrap();
        let report = validate(&f.table);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn rejects_bad_q() {
        assert!(build_family(FamilyKind::GL2, 6).is_err());
        assert!(build_family(FamilyKind::SL2, 9).is_err());
        assert!(build_family(FamilyKind::PGL2, 2).is_err());
    }
}
