//! Brute-force counts for (involution, quadratic unipotent, regular
//! unipotent) triples with product 1 in `SL_n(p)` and `SO_{2m}(p)`.

use std::fmt;

use super::{
    class_orbit, closure, direct_triple_count, is_quadratic_unipotent, jordan_type, GroupElement,
    GroupError, GroupKind, GroupSpec, DEFAULT_CLOSURE_CAP, DEFAULT_ORBIT_CAP,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCount {
    /// Description of the involution set `C1`.
    pub c1: String,
    pub c1_size: u64,
    /// Description of the regular unipotent set `C3`.
    pub c3: String,
    pub c3_size: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub group: String,
    pub counts: Vec<LemmaCount>,
}

impl LemmaReport {
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|c| c.count).sum()
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group: {}", self.group)?;
        for c in &self.counts {
            writeln!(
                f,
                "  C1 = {} (|C1| = {}), C3 = {} (|C3| = {}): {} triples",
                c.c1, c.c1_size, c.c3, c.c3_size, c.count
            )?;
        }
        writeln!(f, "total: {}", self.total())
    }
}

/// Counts triples `(x, y, z)` in `SL_n(p)` with `x` an involution, `y`
/// quadratic unipotent, `z` regular unipotent and `xyz = 1`.
///
/// Involutions with a `-1`-eigenspace of dimension `d` form one `GL_n`
/// orbit, and `GL_n` permutes the regular unipotents of `SL_n`
/// transitively while preserving the other two sets, so fixing
/// `z = J_n(1)` and scaling by the number of regular unipotents is exact.
pub fn lemma_sl(n: usize, p: u64) -> Result<LemmaReport, GroupError> {
    let spec = GroupSpec {
        kind: GroupKind::SL,
        n,
        p,
    };
    if p == 2 {
        return Err(GroupError::Unsupported("characteristic 2 is excluded".into()));
    }
    let gl = GroupSpec {
        kind: GroupKind::GL,
        ..spec
    };
    let gl_gens = gl.generators();
    let z = GroupElement::jordan_block(n, p, false);
    // |C_GL(J_n)| = p^(n-1) (p - 1)
    let c3_size = (gl.order() / (p as u128).pow(n as u32 - 1) / (p as u128 - 1)) as u64;
    let mut counts = Vec::new();
    for d in (2..=n).step_by(2) {
        let mut diag = vec![1i64; n];
        for e in diag.iter_mut().skip(n - d) {
            *e = -1;
        }
        let rep = GroupElement::diag(p, &diag, false);
        let c1 = class_orbit(&rep, &gl_gens, DEFAULT_ORBIT_CAP)?;
        let count = direct_triple_count(&c1, is_quadratic_unipotent, &z, c3_size);
        counts.push(LemmaCount {
            c1: format!("involutions with -1-eigenspace of dimension {d}"),
            c1_size: c1.len() as u64,
            c3: format!("regular unipotents (Jordan type ({n}))"),
            c3_size,
            count,
        });
    }
    Ok(LemmaReport {
        group: spec.to_string(),
        counts,
    })
}

/// Same count in `SO_{2m}(p)` on the hyperbolic form, by full enumeration:
/// every involution class against every unipotent class of Jordan type
/// `(2m - 1, 1)`.
pub fn lemma_so(m: usize, p: u64) -> Result<LemmaReport, GroupError> {
    if m < 2 {
        return Err(GroupError::Unsupported("SO(2m) needs m >= 2".into()));
    }
    if p == 2 {
        return Err(GroupError::Unsupported("characteristic 2 is excluded".into()));
    }
    let spec = GroupSpec {
        kind: GroupKind::SO,
        n: 2 * m,
        p,
    };
    let group = closure(&spec.generators(), DEFAULT_CLOSURE_CAP)?;
    let part = group.conjugacy_classes();
    let regular = vec![2 * m - 1, 1];
    let mut involutions = Vec::new();
    let mut regulars = Vec::new();
    for (ci, class) in part.classes.iter().enumerate() {
        let rep = group.element(class.representative);
        if rep.order() == 2 {
            involutions.push(ci);
        } else if let Ok(t) = jordan_type(rep) {
            if t.is_unipotent() && t.partition(1) == regular.as_slice() {
                regulars.push(ci);
            }
        }
    }
    let mut counts = Vec::new();
    for &ci in &involutions {
        let c1: Vec<GroupElement> = part.classes[ci]
            .members
            .iter()
            .map(|&i| group.element(i).clone())
            .collect();
        let rep = group.element(part.classes[ci].representative);
        let minus = jordan_type(rep)?.partition(-1).len();
        for &cz in &regulars {
            let z = group.element(part.classes[cz].representative);
            let c3_size = part.classes[cz].size();
            counts.push(LemmaCount {
                c1: format!("involution class #{ci} (-1-eigenspace of dimension {minus})"),
                c1_size: c1.len() as u64,
                c3: format!("unipotent class #{cz} (Jordan type ({},1))", 2 * m - 1),
                c3_size,
                count: direct_triple_count(&c1, is_quadratic_unipotent, z, c3_size),
            });
        }
    }
    Ok(LemmaReport {
        group: spec.to_string(),
        counts,
    })
}
