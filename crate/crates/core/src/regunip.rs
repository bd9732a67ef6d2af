//! Orders of regular unipotent elements in exceptional groups and the
//! order filter on candidate subgroup pools.
//!
//! Pool files are line oriented; `#` starts a comment.
//!
//! ```text
//! type E8
//! candidate L2(p) case=3 primes=* order=p eliminated-by-citation=upper-bound citation-primes=114..
//! candidate L2(31) case=5 primes=*,!31 order=table:p=2:32,p=3:3,p=5:5,p=*:1
//! ```
//!
//! Order descriptors give the largest order of a `p`-element of the
//! candidate: `const:<m>`, `p`, `p^<a>` or `table:p=<v>:<m>,...` where
//! `<v>` may be `*` for every prime not listed. Prime sets are comma
//! separated items `*`, `n`, `a..b`, `a..`, `!n` and `%m=r|s|...`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

pub use crate::modp::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegunipError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("order of `{label}` is not defined at p = {p}")]
    NotEvaluable { label: String, p: u64 },
    #[error("unknown exceptional type `{0}`")]
    UnknownType(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("reading {path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExceptionalType {
    G2,
    F4,
    E6,
    E7,
    E8,
}

impl ExceptionalType {
    pub const ALL: [ExceptionalType; 5] = [Self::G2, Self::F4, Self::E6, Self::E7, Self::E8];

    pub fn rank(self) -> u32 {
        match self {
            Self::G2 => 2,
            Self::F4 => 4,
            Self::E6 => 6,
            Self::E7 => 7,
            Self::E8 => 8,
        }
    }

    pub fn coxeter_number(self) -> u64 {
        match self {
            Self::G2 => 6,
            Self::F4 | Self::E6 => 12,
            Self::E7 => 18,
            Self::E8 => 30,
        }
    }
}

impl fmt::Display for ExceptionalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for ExceptionalType {
    type Err = RegunipError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| RegunipError::UnknownType(s.to_string()))
    }
}

/// Least power of `p` that is at least the Coxeter number.
pub fn regular_unipotent_order(ty: ExceptionalType, p: u64) -> u64 {
    assert!(p >= 2, "characteristic must be at least 2");
    let h = ty.coxeter_number();
    let mut o = p;
    while o < h {
        o *= p;
    }
    o
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum PrimeItem {
    All,
    Eq(u64),
    Range(u64, Option<u64>),
    Not(u64),
    Mod(u64, Vec<u64>),
}

/// A set of primes given by inclusions, exclusions and congruences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrimeSet {
    items: Vec<PrimeItem>,
}

impl PrimeSet {
    pub fn all() -> Self {
        PrimeSet {
            items: vec![PrimeItem::All],
        }
    }

    pub fn empty() -> Self {
        PrimeSet::default()
    }

    pub fn contains(&self, p: u64) -> bool {
        let mut positive = false;
        let mut hit = false;
        for item in &self.items {
            match item {
                PrimeItem::All => {
                    positive = true;
                    hit = true;
                }
                PrimeItem::Eq(n) => {
                    positive = true;
                    hit |= p == *n;
                }
                PrimeItem::Range(a, b) => {
                    positive = true;
                    hit |= p >= *a && b.is_none_or(|b| p <= b);
                }
                PrimeItem::Not(n) if p == *n => return false,
                PrimeItem::Mod(m, rs) if !rs.contains(&(p % m)) => return false,
                _ => {}
            }
        }
        hit || (!positive && !self.items.is_empty())
    }
}

impl FromStr for PrimeSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.parse::<u64>().map_err(|_| format!("bad number `{t}` in prime set"));
        let mut items = Vec::new();
        for t in s.split(',') {
            let item = if t == "*" {
                PrimeItem::All
            } else if let Some(n) = t.strip_prefix('!') {
                PrimeItem::Not(num(n)?)
            } else if let Some(rest) = t.strip_prefix('%') {
                let (m, rs) = rest.split_once('=').ok_or_else(|| format!("bad congruence `{t}`"))?;
                let m = num(m)?;
                if m == 0 {
                    return Err("modulus 0".into());
                }
                PrimeItem::Mod(m, rs.split('|').map(num).collect::<Result<_, _>>()?)
            } else if let Some((a, b)) = t.split_once("..") {
                PrimeItem::Range(num(a)?, if b.is_empty() { None } else { Some(num(b)?) })
            } else {
                PrimeItem::Eq(num(t)?)
            };
            items.push(item);
        }
        Ok(PrimeSet { items })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderDescriptor {
    Const(u64),
    P,
    PPow(u32),
    /// `(prime, order)` entries; `None` matches every prime not listed.
    Table(Vec<(Option<u64>, u64)>),
}

impl OrderDescriptor {
    pub fn eval(&self, p: u64) -> Option<u64> {
        match self {
            OrderDescriptor::Const(m) => Some(*m),
            OrderDescriptor::P => Some(p),
            OrderDescriptor::PPow(a) => p.checked_pow(*a),
            OrderDescriptor::Table(t) => t
                .iter()
                .find(|(v, _)| *v == Some(p))
                .or_else(|| t.iter().find(|(v, _)| v.is_none()))
                .map(|&(_, m)| m),
        }
    }
}

impl FromStr for OrderDescriptor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.parse::<u64>().map_err(|_| format!("bad number `{t}` in order descriptor"));
        if s == "p" {
            return Ok(OrderDescriptor::P);
        }
        if let Some(a) = s.strip_prefix("p^") {
            return a
                .parse()
                .map(OrderDescriptor::PPow)
                .map_err(|_| format!("bad exponent `{a}`"));
        }
        if let Some(m) = s.strip_prefix("const:") {
            return Ok(OrderDescriptor::Const(num(m)?));
        }
        if let Some(rest) = s.strip_prefix("table:") {
            let mut entries = Vec::new();
            for e in rest.split(',') {
                let e = e.strip_prefix("p=").ok_or_else(|| format!("table entry `{e}` must start with p="))?;
                let (v, m) = e.split_once(':').ok_or_else(|| format!("table entry `{e}` needs <prime>:<order>"))?;
                let v = if v == "*" { None } else { Some(num(v)?) };
                entries.push((v, num(m)?));
            }
            return Ok(OrderDescriptor::Table(entries));
        }
        Err(format!("unknown order descriptor `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Citation {
    pub reason: String,
    pub primes: PrimeSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSubgroup {
    pub label: String,
    pub case: u32,
    /// Characteristics in which the candidate belongs to the pool.
    pub primes: PrimeSet,
    pub max_p_element_order: OrderDescriptor,
    /// Characteristics in which a Sylow `p`-subgroup is cyclic.
    pub sylow_cyclic: PrimeSet,
    pub citation: Option<Citation>,
}

impl CandidateSubgroup {
    pub fn sylow_p_cyclic(&self, p: u64) -> bool {
        self.sylow_cyclic.contains(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pool {
    pub ty: ExceptionalType,
    pub candidates: Vec<CandidateSubgroup>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> RegunipError {
    RegunipError::Parse { line, msg: msg.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn parse_candidate(line: usize, toks: &[&str]) -> Result<CandidateSubgroup, RegunipError> {
    let label = toks.first().ok_or_else(|| parse_err(line, "candidate needs a label"))?;
    let mut case = None;
    let mut primes = PrimeSet::all();
    let mut order = None;
    let mut sylow_cyclic = PrimeSet::empty();
    let mut reason = None;
    let mut citation_primes = PrimeSet::all();
    for t in &toks[1..] {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key=value, got `{t}`")))?;
        let e = |m: String| parse_err(line, m);
        match k {
            "case" => case = Some(v.parse().map_err(|_| e(format!("bad case `{v}`")))?),
            "primes" => primes = v.parse().map_err(e)?,
            "order" => order = Some(v.parse().map_err(e)?),
            "cyclic" => sylow_cyclic = v.parse().map_err(e)?,
            "eliminated-by-citation" => reason = Some(v.to_string()),
            "citation-primes" => citation_primes = v.parse().map_err(e)?,
            _ => return Err(e(format!("unknown key `{k}`"))),
        }
    }
    Ok(CandidateSubgroup {
        label: label.to_string(),
        case: case.ok_or_else(|| parse_err(line, "missing case="))?,
        primes,
        max_p_element_order: order.ok_or_else(|| parse_err(line, "missing order="))?,
        sylow_cyclic,
        citation: reason.map(|reason| Citation {
            reason,
            primes: citation_primes,
        }),
    })
}

impl FromStr for Pool {
    type Err = RegunipError;

    fn from_str(text: &str) -> Result<Self, RegunipError> {
        let mut ty = None;
        let mut candidates = Vec::new();
        for (line, toks) in content_lines(text) {
            match toks[0] {
                "type" => {
                    let t = toks.get(1).ok_or_else(|| parse_err(line, "type needs a name"))?;
                    ty = Some(t.parse()?);
                }
                "candidate" => candidates.push(parse_candidate(line, &toks[1..])?),
                other => return Err(parse_err(line, format!("unknown record `{other}`"))),
            }
        }
        Ok(Pool {
            ty: ty.ok_or_else(|| parse_err(0, "missing type record"))?,
            candidates,
        })
    }
}

fn read(path: &Path) -> Result<String, RegunipError> {
    std::fs::read_to_string(path).map_err(|e| RegunipError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

pub fn load_pool(path: impl AsRef<Path>) -> Result<Pool, RegunipError> {
    read(path.as_ref())?.parse()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Survives,
    /// The candidate has no `p`-element as large as a regular unipotent.
    OrderTooSmall,
    EliminatedByCitation(String),
    /// Excluded when two distinct unipotent classes are needed.
    CyclicSylow,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Survives => f.write_str("survives"),
            Verdict::OrderTooSmall => f.write_str("eliminated (order)"),
            Verdict::EliminatedByCitation(r) => write!(f, "eliminated-by-citation ({r})"),
            Verdict::CyclicSylow => f.write_str("eliminated (cyclic Sylow p-subgroup)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateVerdict {
    pub label: String,
    pub case: u32,
    pub max_order: u64,
    pub regular_order: u64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterReport {
    pub ty: ExceptionalType,
    pub p: u64,
    pub regular_order: u64,
    pub two_classes: bool,
    pub verdicts: Vec<CandidateVerdict>,
}

impl FilterReport {
    pub fn survivors(&self) -> BTreeSet<String> {
        self.verdicts
            .iter()
            .filter(|v| v.verdict == Verdict::Survives)
            .map(|v| v.label.clone())
            .collect()
    }
}

impl fmt::Display for FilterReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} at p = {}: regular unipotent order {}", self.ty, self.p, self.regular_order)?;
        for v in &self.verdicts {
            let cmp = if v.max_order >= v.regular_order { ">=" } else { "<" };
            writeln!(
                f,
                "  case {} {}: max p-order {} {cmp} {}: {}",
                v.case, v.label, v.max_order, v.regular_order, v.verdict
            )?;
        }
        let s: Vec<String> = self.survivors().into_iter().collect();
        writeln!(f, "survivors: {}", if s.is_empty() { "none".into() } else { s.join(", ") })
    }
}

/// Keeps the candidates of the pool at `p` whose largest `p`-element order
/// reaches the regular unipotent order. With `two_classes`, candidates
/// with a cyclic Sylow `p`-subgroup are dropped as well, since all their
/// elements of order `p` are conjugate into one cyclic group.
pub fn filter_candidates(
    ty: ExceptionalType,
    p: u64,
    pool: &[CandidateSubgroup],
    two_classes: bool,
) -> Result<FilterReport, RegunipError> {
    if !is_prime(p) {
        return Err(RegunipError::NotPrime(p));
    }
    let regular_order = regular_unipotent_order(ty, p);
    let mut verdicts = Vec::new();
    for c in pool.iter().filter(|c| c.primes.contains(p)) {
        let max_order = c.max_p_element_order.eval(p).ok_or_else(|| RegunipError::NotEvaluable {
            label: c.label.clone(),
            p,
        })?;
        let verdict = if max_order < regular_order {
            Verdict::OrderTooSmall
        } else if let Some(cite) = c.citation.as_ref().filter(|c| c.primes.contains(p)) {
            Verdict::EliminatedByCitation(cite.reason.clone())
        } else if two_classes && c.sylow_p_cyclic(p) {
            Verdict::CyclicSylow
        } else {
            Verdict::Survives
        };
        verdicts.push(CandidateVerdict {
            label: c.label.clone(),
            case: c.case,
            max_order,
            regular_order,
            verdict,
        });
    }
    Ok(FilterReport {
        ty,
        p,
        regular_order,
        two_classes,
        verdicts,
    })
}

/// One line of an expected-survivor file:
/// `survivor <type> <label> primes=<set>` or `survivor-two-classes ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    pub ty: ExceptionalType,
    pub label: String,
    pub primes: PrimeSet,
    pub two_classes: bool,
}

pub fn parse_expectations(text: &str) -> Result<Vec<Expectation>, RegunipError> {
    content_lines(text)
        .map(|(line, toks)| {
            let two_classes = match toks[0] {
                "survivor" => false,
                "survivor-two-classes" => true,
                other => return Err(parse_err(line, format!("unknown record `{other}`"))),
            };
            let [_, ty, label, primes] = toks[..] else {
                return Err(parse_err(line, "expected `survivor <type> <label> primes=<set>`"));
            };
            let primes = primes
                .strip_prefix("primes=")
                .ok_or_else(|| parse_err(line, "missing primes="))?
                .parse()
                .map_err(|m: String| parse_err(line, m))?;
            Ok(Expectation {
                ty: ty.parse()?,
                label: label.to_string(),
                primes,
                two_classes,
            })
        })
        .collect()
}

pub fn load_expectations(path: impl AsRef<Path>) -> Result<Vec<Expectation>, RegunipError> {
    parse_expectations(&read(path.as_ref())?)
}

pub fn expected_survivors(exps: &[Expectation], ty: ExceptionalType, p: u64, two_classes: bool) -> BTreeSet<String> {
    exps.iter()
        .filter(|e| e.ty == ty && e.two_classes == two_classes && e.primes.contains(p))
        .map(|e| e.label.clone())
        .collect()
}

/// Difference between the filter output and an expected survivor list at
/// one characteristic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub ty: ExceptionalType,
    pub p: u64,
    pub two_classes: bool,
    pub extra: BTreeSet<String>,
    pub missing: BTreeSet<String>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(", ");
        write!(f, "{} p = {}", self.ty, self.p)?;
        if self.two_classes {
            f.write_str(" (two classes)")?;
        }
        write!(f, ": extra [{}], missing [{}]", join(&self.extra), join(&self.missing))
    }
}

/// Runs every pool at every prime up to `max_prime` and compares with the
/// expectations. The two-class mode is compared in good characteristic
/// (`p > 5`) for the types it is listed for.
pub fn compare_with_expectations(
    pools: &[Pool],
    exps: &[Expectation],
    max_prime: u64,
) -> Result<Vec<Mismatch>, RegunipError> {
    let mut out = Vec::new();
    for pool in pools {
        let two_class_types = exps.iter().any(|e| e.two_classes && e.ty == pool.ty);
        for p in (2..=max_prime).filter(|&p| is_prime(p)) {
            for two_classes in [false, true] {
                if two_classes && (!two_class_types || p <= 5) {
                    continue;
                }
                let got = filter_candidates(pool.ty, p, &pool.candidates, two_classes)?.survivors();
                let want = expected_survivors(exps, pool.ty, p, two_classes);
                if got != want {
                    out.push(Mismatch {
                        ty: pool.ty,
                        p,
                        two_classes,
                        extra: got.difference(&want).cloned().collect(),
                        missing: want.difference(&got).cloned().collect(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Loads every `*.pool` file in `dir`, sorted by type.
pub fn load_pools(dir: impl AsRef<Path>) -> Result<Vec<Pool>, RegunipError> {
    let dir = dir.as_ref();
    let entries = std::fs::read_dir(dir).map_err(|e| RegunipError::Io {
        path: dir.display().to_string(),
        msg: e.to_string(),
    })?;
    let mut pools = Vec::new();
    for e in entries.flatten() {
        let path = e.path();
        if path.extension().is_some_and(|x| x == "pool") {
            pools.push(load_pool(&path)?);
        }
    }
    pools.sort_by_key(|p| p.ty);
    Ok(pools)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_sets() {
        let s: PrimeSet = "*,!3".parse().unwrap();
        assert!(s.contains(2) && !s.contains(3));
        let s: PrimeSet = "13..43".parse().unwrap();
        assert!(s.contains(13) && s.contains(43) && !s.contains(47));
        let s: PrimeSet = "%9=1|8".parse().unwrap();
        assert!(s.contains(17) && s.contains(19) && !s.contains(7));
        let s: PrimeSet = "!2".parse().unwrap();
        assert!(s.contains(5) && !s.contains(2));
        assert!(!PrimeSet::empty().contains(2));
    }

    #[test]
    fn descriptors() {
        let d: OrderDescriptor = "table:p=2:32,p=*:1".parse().unwrap();
        assert_eq!(d.eval(2), Some(32));
        assert_eq!(d.eval(7), Some(1));
        let d: OrderDescriptor = "table:p=2:8".parse().unwrap();
        assert_eq!(d.eval(3), None);
        assert_eq!("p^2".parse::<OrderDescriptor>().unwrap().eval(7), Some(49));
        assert!("q".parse::<OrderDescriptor>().is_err());
    }
}
