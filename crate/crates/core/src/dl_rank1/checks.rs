//! Deligne–Lusztig characters, Green functions, semisimple characters and
//! the identities relating them, evaluated on the exact tables.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use super::{p_prime_part, ClassLabel, DlError, Rank1Family, TorusKind};
use crate::arith::{Cyclotomic, Rational};

/// One exact identity `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: Cyclotomic,
    pub rhs: Cyclotomic,
}

impl IdentityCheck {
    pub fn new(name: impl Into<String>, lhs: Cyclotomic, rhs: Cyclotomic) -> Self {
        IdentityCheck {
            name: name.into(),
            lhs,
            rhs,
        }
    }

    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub title: String,
    pub checks: Vec<IdentityCheck>,
}

impl CheckReport {
    pub fn new(title: impl Into<String>) -> Self {
        CheckReport {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::holds)
    }

    pub fn failures(&self) -> Vec<&IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds()).collect()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} identities, {} failed",
            self.title,
            self.checks.len(),
            self.failures().len()
        )
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary())?;
        for c in &self.checks {
            let tag = if c.holds() { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}: {} = {}", c.name, c.lhs, c.rhs)?;
        }
        Ok(())
    }
}

/// `R_{T,θ}` as an integer combination of rows of the family's table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DLCharacter {
    pub torus: TorusKind,
    pub theta: Vec<u64>,
    pub decomposition: Vec<(usize, i64)>,
}

impl DLCharacter {
    pub fn value(&self, fam: &Rank1Family, c: usize) -> Cyclotomic {
        self.decomposition
            .iter()
            .map(|&(r, k)| fam.table.rows[r].values[c].mul_int(k))
            .sum()
    }

    pub fn degree(&self, fam: &Rank1Family) -> Cyclotomic {
        self.value(fam, 0)
    }

    /// Scalar product, using orthonormality of the rows.
    pub fn inner(&self, other: &DLCharacter) -> i64 {
        self.decomposition
            .iter()
            .map(|&(r, a)| {
                other
                    .decomposition
                    .iter()
                    .filter(|&&(s, _)| s == r)
                    .map(|&(_, b)| a * b)
                    .sum::<i64>()
            })
            .sum()
    }
}

fn check_theta(fam: &Rank1Family, torus: TorusKind, theta: &[u64]) -> Result<(), DlError> {
    let moduli = fam.torus_moduli(torus);
    if theta.len() != moduli.len() || theta.iter().zip(&moduli).any(|(t, m)| t >= m) {
        return Err(DlError::BadTheta(theta.to_vec()));
    }
    Ok(())
}

pub fn dl_character(fam: &Rank1Family, torus: TorusKind, theta: &[u64]) -> Result<DLCharacter, DlError> {
    check_theta(fam, torus, theta)?;
    let decomposition = fam
        .dl_decomposition(torus, theta)
        .into_iter()
        .map(|(l, k)| (fam.row_of(l).expect("decomposition uses table rows"), k))
        .collect();
    Ok(DLCharacter {
        torus,
        theta: theta.to_vec(),
        decomposition,
    })
}

fn all_dl(fam: &Rank1Family, torus: TorusKind) -> Vec<DLCharacter> {
    fam.torus_points(torus)
        .iter()
        .map(|t| dl_character(fam, torus, t).expect("valid index"))
        .collect()
}

const TORI: [TorusKind; 2] = [TorusKind::Split, TorusKind::Nonsplit];

fn w_index(kind: TorusKind) -> usize {
    match kind {
        TorusKind::Split => 0,
        TorusKind::Nonsplit => 1,
    }
}

/// Green functions on the unipotent classes, with their expansion
/// `Q_w(u) = Σ_i ψ_i(w) q^i` read off with balanced base-`q` digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreenFunctions {
    pub q: u64,
    /// Unipotent classes, identity first.
    pub classes: Vec<usize>,
    /// `values[u][w]` with `w = 0` for the split and `w = 1` for the nonsplit torus.
    pub values: Vec<[i64; 2]>,
    /// `psi[u][i][w]`: the coefficient of `q^i`.
    pub psi: Vec<Vec<[i64; 2]>>,
}

fn balanced_digits(mut v: i64, q: i64) -> Vec<i64> {
    let mut out = Vec::new();
    while v != 0 {
        let mut r = v.rem_euclid(q);
        if r > q / 2 {
            r -= q;
        }
        out.push(r);
        v = (v - r) / q;
    }
    out
}

fn to_int(v: &Cyclotomic, what: &str) -> Result<i64, DlError> {
    v.to_rational()
        .ok()
        .and_then(|r| r.is_integer().then(|| r.to_i64()).flatten())
        .ok_or_else(|| DlError::Violation(format!("{what} = {v} is not an integer")))
}

/// Checks that `R_{T,θ}(u)` does not depend on `θ` and returns the common
/// values as Green functions.
pub fn check_valuni(fam: &Rank1Family) -> Result<(GreenFunctions, CheckReport), DlError> {
    let mut report = CheckReport::new(format!("{}: R_T,theta(u) independent of theta", fam.table.name));
    let classes = fam.unipotent_classes();
    let mut values = vec![[0i64; 2]; classes.len()];
    for torus in TORI {
        let chars = all_dl(fam, torus);
        for (ui, &u) in classes.iter().enumerate() {
            let vals: Vec<Cyclotomic> = chars.par_iter().map(|r| r.value(fam, u)).collect();
            let common = vals[0].clone();
            let odd = vals.iter().find(|v| **v != common).cloned().unwrap_or_else(|| common.clone());
            report.checks.push(IdentityCheck::new(
                format!("{torus} torus, {} values, class {}", vals.len(), fam.describe_class(u)),
                odd,
                common.clone(),
            ));
            values[ui][w_index(torus)] = to_int(&common, "Green function value")?;
        }
    }
    let q = fam.q as i64;
    let psi: Vec<Vec<[i64; 2]>> = values
        .iter()
        .map(|v| {
            let d: Vec<Vec<i64>> = v.iter().map(|&x| balanced_digits(x, q)).collect();
            let len = d.iter().map(Vec::len).max().unwrap_or(0);
            (0..len)
                .map(|i| [d[0].get(i).copied().unwrap_or(0), d[1].get(i).copied().unwrap_or(0)])
                .collect()
        })
        .collect();
    let int = Cyclotomic::from_int;
    for (ui, &u) in classes.iter().enumerate() {
        if fam.class_labels[u].is_regular_unipotent() {
            for w in 0..2 {
                report.checks.push(IdentityCheck::new(
                    format!("Q_{w}(regular unipotent {})", fam.describe_class(u)),
                    int(values[ui][w]),
                    Cyclotomic::one(),
                ));
            }
        } else {
            // identity: ψ_0 trivial, ψ_1 the sign character of W
            let at = |i: usize, w: usize| psi[ui].get(i).map_or(0, |d| d[w]);
            for (i, want) in [(0, [1, 1]), (1, [1, -1])] {
                for w in 0..2 {
                    report.checks.push(IdentityCheck::new(
                        format!("psi_{i}(w{w}) at the identity"),
                        int(at(i, w)),
                        int(want[w]),
                    ));
                }
            }
        }
    }
    Ok((
        GreenFunctions {
            q: fam.q,
            classes,
            values,
            psi,
        },
        report,
    ))
}

/// The data attached to a semisimple class `t` of the dual family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualSemisimpleDatum {
    /// Class of `t` in the dual family.
    pub class: usize,
    pub label: ClassLabel,
    /// The pairs `(T, θ)` in the geometric class of `t`, one per element of
    /// the coset `W(t)v`.
    pub tori: Vec<(TorusKind, Vec<u64>)>,
    /// `|W(t)|`.
    pub weyl_order: u64,
    /// `ε_G ε_{C°(t)}`.
    pub sign: i64,
    pub centralizer_order: u64,
    pub connected_centralizer_order: u64,
    /// `χ_t` on rows of the family.
    pub chi: BTreeMap<usize, Rational>,
    /// `χ_t^reg` on rows of the family, sign included.
    pub chi_reg: BTreeMap<usize, Rational>,
    pub constituents: Vec<usize>,
}

fn combine(
    fam: &Rank1Family,
    tori: &[(TorusKind, Vec<u64>)],
    scale: &Rational,
    regular: bool,
) -> BTreeMap<usize, Rational> {
    let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
    for (kind, theta) in tori {
        let r = dl_character(fam, *kind, theta).expect("coordinates are valid characters");
        let w = if regular { kind.sign() } else { 1 };
        for (row, k) in r.decomposition {
            let e = out.entry(row).or_insert_with(Rational::zero);
            *e = &*e + &scale.mul_int(k * w);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn eval(fam: &Rank1Family, chi: &BTreeMap<usize, Rational>, c: usize) -> Cyclotomic {
    chi.iter().map(|(&r, k)| fam.table.rows[r].values[c].scale(k)).sum()
}

/// Semisimple characters of `fam` indexed by the semisimple classes of
/// `dual`, with `χ_t = ε_G ε_{C°(t)} |W(t)|⁻¹ Σ_w R_{T_w,t}`.
pub fn dual_data(fam: &Rank1Family, dual: &Rank1Family) -> Result<Vec<DualSemisimpleDatum>, DlError> {
    if dual.kind != fam.kind.dual() || dual.q != fam.q {
        return Err(DlError::NotDual(fam.kind, dual.kind));
    }
    let p = fam.p;
    let g_order = p_prime_part(fam.table.order, p);
    dual.semisimple_classes()
        .into_iter()
        .map(|t| {
            let tori = dual.torus_coordinates(t)?;
            let central = tori.len() == 2;
            let weyl_order = if central { 2 } else { 1 };
            let sign = if central { 1 } else { tori[0].0.sign() };
            let scale = Rational::new(sign, weyl_order as i64).expect("nonzero");
            let chi = combine(fam, &tori, &scale, false);
            let chi_reg = combine(fam, &tori, &scale, true);
            let what = || format!("chi_t for t = {}", dual.describe_class(t));
            if chi.values().any(|k| !k.is_one()) {
                return Err(DlError::Violation(format!("{} is not a sum of distinct irreducibles", what())));
            }
            let constituents: Vec<usize> = chi.keys().copied().collect();
            let connected_centralizer_order = if central {
                dual.table.order
            } else {
                dual.torus_order(tori[0].0)
            };
            let want = Rational::new(
                (g_order / p_prime_part(connected_centralizer_order, p)) as i64,
                constituents.len() as i64,
            )
            .expect("nonzero");
            for &r in &constituents {
                let d = fam.table.rows[r].degree().to_rational().expect("rational degree");
                if d != want {
                    return Err(DlError::Violation(format!("{}: constituent degree {d}, expected {want}", what())));
                }
            }
            Ok(DualSemisimpleDatum {
                class: t,
                label: dual.class_labels[t],
                tori,
                weyl_order,
                sign,
                centralizer_order: dual.table.centralizer_order(t),
                connected_centralizer_order,
                chi,
                chi_reg,
                constituents,
            })
        })
        .collect()
}

/// `ε Σ_i ⟨ψ_i^u|_{W(t)v}, 1⟩ q^i` for the unipotent class at position `ui`
/// of `green`.
pub fn semisimple_unipotent_value(green: &GreenFunctions, t: &DualSemisimpleDatum, ui: usize) -> Rational {
    let coset: Vec<usize> = t.tori.iter().map(|(k, _)| w_index(*k)).collect();
    let mut total = Rational::zero();
    let mut qi = Rational::one();
    for coeffs in &green.psi[ui] {
        let s: i64 = coset.iter().map(|&w| coeffs[w]).sum();
        let avg = Rational::new(s, coset.len() as i64).expect("nonempty coset");
        total = &total + &(&avg * &qi);
        qi = qi.mul_int(green.q as i64);
    }
    total.mul_int(t.sign)
}

/// Reproduces every semisimple-character value on unipotent classes from
/// the Green-function coefficients, and checks `χ_t(u)² = 1` on regular
/// unipotent classes.
pub fn semisimple_unipotent_values(fam: &Rank1Family, dual: &Rank1Family) -> Result<CheckReport, DlError> {
    let (green, _) = check_valuni(fam)?;
    let data = dual_data(fam, dual)?;
    let mut report = CheckReport::new(format!(
        "{}: chi_t(u) from Green-function coefficients",
        fam.table.name
    ));
    for t in &data {
        for (ui, &u) in green.classes.iter().enumerate() {
            let table = eval(fam, &t.chi, u);
            let name = format!("t = {}, u = {}", dual.describe_class(t.class), fam.describe_class(u));
            report.checks.push(IdentityCheck::new(
                name.clone(),
                table.clone(),
                Cyclotomic::from_rational(semisimple_unipotent_value(&green, t, ui)),
            ));
            if fam.class_labels[u].is_regular_unipotent() {
                report
                    .checks
                    .push(IdentityCheck::new(format!("{name}: value squared"), &table * &table, Cyclotomic::one()));
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingSum {
    pub value: Cyclotomic,
    pub subgroup_order: usize,
    /// Some character of the subgroup is nontrivial on `s`.
    pub qualifies: bool,
    /// Every Weyl conjugate of `s` is moved by some character of the
    /// subgroup. This, not `qualifies` alone, forces the sum to vanish:
    /// `Ind(reg_H)(s)` collects `reg_H` over all conjugates of `s` in `T`.
    pub conjugates_qualify: bool,
}

/// `Σ_{θ∈H} R_{T,θ}(s)` for `H` generated by `gens`.
pub fn vanishing_sum(
    fam: &Rank1Family,
    torus: TorusKind,
    gens: &[Vec<u64>],
    s: &[u64],
) -> Result<VanishingSum, DlError> {
    for g in gens {
        check_theta(fam, torus, g)?;
    }
    check_theta(fam, torus, s)?;
    let moduli = fam.torus_moduli(torus);
    let mut h: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut frontier = vec![vec![0u64; moduli.len()]];
    while let Some(x) = frontier.pop() {
        if !h.insert(x.clone()) {
            continue;
        }
        for g in gens {
            frontier.push(x.iter().zip(g).zip(&moduli).map(|((a, b), m)| (a + b) % m).collect());
        }
    }
    let c = fam.torus_class(torus, s);
    let mut value = Cyclotomic::zero();
    for theta in &h {
        value = &value + &dl_character(fam, torus, theta)?.value(fam, c);
    }
    let moved = |x: &[u64]| h.iter().any(|theta| !fam.pairing(torus, theta, x).is_one());
    Ok(VanishingSum {
        value,
        subgroup_order: h.len(),
        qualifies: moved(s),
        conjugates_qualify: moved(s) && moved(&fam.weyl_act(torus, s)),
    })
}

/// The vanishing sum over the full character group at every nonidentity
/// torus element, for both tori.
pub fn check_sum(fam: &Rank1Family) -> CheckReport {
    let mut report = CheckReport::new(format!("{}: sum over all torus characters", fam.table.name));
    for torus in TORI {
        let chars = all_dl(fam, torus);
        let mut per_class: HashMap<usize, Cyclotomic> = HashMap::new();
        for s in fam.torus_points(torus).into_iter().skip(1) {
            let c = fam.torus_class(torus, &s);
            let v = per_class
                .entry(c)
                .or_insert_with(|| chars.par_iter().map(|r| r.value(fam, c)).sum())
                .clone();
            report.checks.push(IdentityCheck::new(
                format!("{torus} torus, s = {s:?} in {}", fam.describe_class(c)),
                v,
                Cyclotomic::zero(),
            ));
        }
    }
    report
}

/// The right-hand side of the double-coset formula for `R_{T,θ}(s)`, with
/// the sign `ε_C ε_T` (`C = C°(s)`) that the unsigned index `|C^F : T^F|_{p'}`
/// needs to match `R^C_{T,1}(1)`.
pub fn val_rt(fam: &Rank1Family, s: usize, torus: TorusKind, theta: &[u64]) -> Result<Cyclotomic, DlError> {
    check_theta(fam, torus, theta)?;
    let coords = fam.torus_coordinates(s)?;
    let central = coords.len() == 2;
    // W = {0, 1}; W(s) is all of W for central s and trivial otherwise.
    let ws: Vec<u64> = if central { vec![0, 1] } else { vec![0] };
    let reference = if central { TorusKind::Split } else { coords[0].0 };
    let w = (torus != reference) as u64;
    let wt: Vec<u64> = if fam.weyl_act(torus, theta) == theta {
        vec![0, 1]
    } else {
        vec![0]
    };
    if !ws.contains(&w) {
        return Ok(Cyclotomic::zero());
    }
    let point = &coords
        .iter()
        .find(|(k, _)| *k == torus)
        .expect("s lies in the torus when its position is in W(s)")
        .1;
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut sum = Cyclotomic::zero();
    for u in 0..2u64 {
        let coset: Vec<u64> = ws
            .iter()
            .flat_map(|&a| wt.iter().map(move |&b| a ^ u ^ b))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if !seen.insert(coset) {
            continue;
        }
        let meet = wt.iter().filter(|x| ws.contains(x)).count();
        let index = (wt.len() / meet) as i64;
        let su = if u == 1 {
            fam.weyl_act(torus, point)
        } else {
            point.clone()
        };
        sum = &sum + &fam.pairing(torus, theta, &su).mul_int(index);
    }
    let (sign, index) = if central {
        let g = p_prime_part(fam.table.order, fam.p);
        (torus.sign(), (g / fam.torus_order(torus)) as i64)
    } else {
        (1, 1)
    };
    Ok(sum.mul_int(sign * index))
}

/// `R_{T,θ}(s)` from the table against [`val_rt`] for every semisimple
/// class, both tori and every `θ`.
pub fn check_valrt(fam: &Rank1Family) -> Result<CheckReport, DlError> {
    let mut report = CheckReport::new(format!("{}: R_T,theta(s) by double cosets", fam.table.name));
    let semisimple = fam.semisimple_classes();
    for torus in TORI {
        let chars = all_dl(fam, torus);
        let rows: Result<Vec<Vec<IdentityCheck>>, DlError> = semisimple
            .par_iter()
            .map(|&s| {
                chars
                    .iter()
                    .map(|r| {
                        Ok(IdentityCheck::new(
                            format!("{torus} torus, theta = {:?}, s = {}", r.theta, fam.describe_class(s)),
                            r.value(fam, s),
                            val_rt(fam, s, torus, &r.theta)?,
                        ))
                    })
                    .collect()
            })
            .collect();
        report.checks.extend(rows?.into_iter().flatten());
    }
    Ok(report)
}

/// Scalar products of all Deligne–Lusztig characters: `|{w : wθ = θ'}|`
/// for the same torus, 0 across tori. One line per `(T, θ)`, counting the
/// partners that match.
pub fn check_dl_orthogonality(fam: &Rank1Family) -> CheckReport {
    let mut report = CheckReport::new(format!("{}: Deligne-Lusztig scalar products", fam.table.name));
    let all: Vec<DLCharacter> = TORI.iter().flat_map(|&t| all_dl(fam, t)).collect();
    let lines: Vec<IdentityCheck> = all
        .par_iter()
        .map(|a| {
            let good = all
                .iter()
                .filter(|b| {
                    let want = if a.torus != b.torus {
                        0
                    } else {
                        (a.theta == b.theta) as i64 + (fam.weyl_act(a.torus, &a.theta) == b.theta) as i64
                    };
                    a.inner(b) == want
                })
                .count();
            IdentityCheck::new(
                format!("{} torus, theta = {:?}: partners with the expected product", a.torus, a.theta),
                Cyclotomic::from_int(good as i64),
                Cyclotomic::from_int(all.len() as i64),
            )
        })
        .collect();
    report.checks = lines;
    report
}

fn sym_report(fam: &Rank1Family, dual: &Rank1Family, regular: bool) -> Result<CheckReport, DlError> {
    let ts = dual_data(fam, dual)?;
    let ss = dual_data(dual, fam)?;
    let p = fam.p;
    let title = if regular {
        format!("{} / {}: symmetry of regular characters", fam.table.name, dual.table.name)
    } else {
        format!("{} / {}: symmetry of semisimple characters", fam.table.name, dual.table.name)
    };
    let mut report = CheckReport::new(title);
    // one constituent, with its coefficient
    let pick = |d: &DualSemisimpleDatum| -> (usize, Rational) {
        if regular {
            let (&r, k) = d.chi_reg.iter().next().expect("nonzero character");
            (r, k.clone())
        } else {
            (d.constituents[0], Rational::one())
        }
    };
    let lines: Vec<Vec<IdentityCheck>> = ts
        .par_iter()
        .map(|t| {
            let (rt, kt) = pick(t);
            ss.iter()
                .flat_map(|s| {
                    let name = format!(
                        "s = {}, t = {}",
                        fam.describe_class(s.class),
                        dual.describe_class(t.class)
                    );
                    let lhs = fam.table.rows[rt].values[s.class]
                        .scale(&kt)
                        .mul_int(p_prime_part(t.centralizer_order, p) as i64);
                    let (rs, ks) = pick(s);
                    let rhs = dual.table.rows[rs].values[t.class]
                        .scale(&ks)
                        .mul_int(p_prime_part(s.centralizer_order, p) as i64);
                    let mut out = vec![IdentityCheck::new(name.clone(), lhs, rhs)];
                    if !regular && t.constituents.len() > 1 {
                        let first = &fam.table.rows[t.constituents[0]].values[s.class];
                        for &other in &t.constituents[1..] {
                            out.push(IdentityCheck::new(
                                format!("{name}: constituents agree"),
                                fam.table.rows[other].values[s.class].clone(),
                                first.clone(),
                            ));
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    report.checks = lines.into_iter().flatten().collect();
    Ok(report)
}

/// `|C_{G*}(t)^F|_{p'} χ_t(s) = |C_G(s)^F|_{p'} χ_s(t)` for all semisimple
/// `s ∈ G`, `t ∈ G*`, using one constituent of a reducible `χ_t`.
pub fn check_sym(fam: &Rank1Family, dual: &Rank1Family) -> Result<CheckReport, DlError> {
    sym_report(fam, dual, false)
}

/// The same identity for `χ_t^reg`.
pub fn check_sym_regular(fam: &Rank1Family, dual: &Rank1Family) -> Result<CheckReport, DlError> {
    sym_report(fam, dual, true)
}
