//! The CTB v1 line format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Character, CharacterTable, ClassRecord, TableError};
use crate::arith::{parse_value, ArithError};
use crate::modp;

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> TableError {
    TableError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        match (ch.is_ascii_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &text[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &text[s..]));
    }
    out
}

fn parse_int(line: usize, col: usize, tok: &str, what: &str) -> Result<u64, TableError> {
    tok.parse::<u64>()
        .ok()
        .filter(|&v| v > 0)
        .ok_or_else(|| syntax(line, col, format!("expected a positive integer {what}, found `{tok}`")))
}

struct PendingClass {
    line: usize,
    record: ClassRecord,
    pows: Vec<(u64, String)>,
}

/// Parses CTB v1 text. Structure and counts are checked; orthogonality is
/// left to [`super::validate`].
pub fn parse_ctb(text: &str) -> Result<CharacterTable, TableError> {
    let mut name = None;
    let mut order = None;
    let mut exponent = None;
    let mut declared = None;
    let mut classes: Vec<PendingClass> = Vec::new();
    let mut rows: Vec<Character> = Vec::new();
    let mut seen_header = false;

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        if let Some(pos) = raw.bytes().position(|b| !(b == b'\t' || (0x20..0x7f).contains(&b))) {
            return Err(syntax(ln, pos + 1, "non-printable or non-ASCII byte"));
        }
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks = tokens(raw);
        let (kcol, keyword) = toks[0];
        if !seen_header {
            if keyword != "CTB" {
                return Err(syntax(ln, kcol, "expected `CTB 1` header"));
            }
            match toks.get(1) {
                Some((_, "1")) if toks.len() == 2 => {}
                Some(&(c, v)) => return Err(syntax(ln, c, format!("unsupported version `{v}`"))),
                None => return Err(syntax(ln, kcol + 3, "missing version")),
            }
            seen_header = true;
            continue;
        }
        let single = |what: &str| -> Result<(usize, &str), TableError> {
            match toks.len() {
                2 => Ok(toks[1]),
                1 => Err(syntax(ln, kcol + keyword.len(), format!("missing {what}"))),
                _ => Err(syntax(ln, toks[2].0, "unexpected trailing text")),
            }
        };
        match keyword {
            "name" => {
                let rest = raw[kcol - 1 + 4..].trim();
                if rest.is_empty() {
                    return Err(syntax(ln, kcol + 4, "missing table name"));
                }
                name = Some(rest.to_string());
            }
            "order" => {
                let (c, t) = single("order")?;
                order = Some(parse_int(ln, c, t, "order")?);
            }
            "exponent" => {
                let (c, t) = single("exponent")?;
                exponent = Some(parse_int(ln, c, t, "exponent")?);
            }
            "classes" => {
                let (c, t) = single("class count")?;
                declared = Some(parse_int(ln, c, t, "class count")? as usize);
            }
            "class" => {
                if !rows.is_empty() {
                    return Err(syntax(ln, kcol, "class line after char lines"));
                }
                classes.push(parse_class(ln, &toks)?);
            }
            "char" => rows.push(parse_char(ln, raw, &toks)?),
            _ => return Err(syntax(ln, kcol, format!("unknown keyword `{keyword}`"))),
        }
    }

    if !seen_header {
        return Err(syntax(1, 1, "expected `CTB 1` header"));
    }
    let missing = |what: &str| TableError::Counts(format!("missing `{what}` line"));
    let name = name.ok_or_else(|| missing("name"))?;
    let order = order.ok_or_else(|| missing("order"))?;
    let exponent = exponent.ok_or_else(|| missing("exponent"))?;
    let declared = declared.ok_or_else(|| missing("classes"))?;
    if classes.len() != declared {
        return Err(TableError::Counts(format!(
            "{declared} classes declared, {} class lines",
            classes.len()
        )));
    }
    if rows.len() != declared {
        return Err(TableError::Counts(format!(
            "{declared} classes but {} characters",
            rows.len()
        )));
    }
    for r in &rows {
        if r.values.len() != declared {
            return Err(TableError::Counts(format!(
                "character `{}` has {} values, expected {declared}",
                r.name,
                r.values.len()
            )));
        }
    }
    let index: BTreeMap<String, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.record.name.clone(), i))
        .collect();
    if index.len() != classes.len() {
        return Err(TableError::Counts("duplicate class names".into()));
    }
    let primes = modp::prime_factors(exponent);
    let mut records = Vec::with_capacity(classes.len());
    for pc in classes {
        let mut rec = pc.record;
        for (p, target) in pc.pows {
            let t = *index.get(&target).ok_or_else(|| TableError::UnknownClass {
                line: pc.line,
                name: target.clone(),
            })?;
            rec.power_maps.insert(p, t);
        }
        let have: Vec<u64> = rec.power_maps.keys().copied().collect();
        if have != primes {
            return Err(TableError::Counts(format!(
                "class `{}` has power maps for {have:?}, expected one per prime dividing the exponent {primes:?}",
                rec.name
            )));
        }
        records.push(rec);
    }
    Ok(CharacterTable {
        name,
        order,
        exponent,
        classes: records,
        rows,
    })
}

fn parse_class(ln: usize, toks: &[(usize, &str)]) -> Result<PendingClass, TableError> {
    let (ncol, name) = *toks
        .get(1)
        .ok_or_else(|| syntax(ln, toks[0].0 + 5, "missing class name"))?;
    if name.contains('=') {
        return Err(syntax(ln, ncol, "missing class name"));
    }
    let mut size = None;
    let mut order = None;
    let mut pows = Vec::new();
    for &(col, tok) in &toks[2..] {
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| syntax(ln, col, format!("expected key=value, found `{tok}`")))?;
        let vcol = col + key.len() + 1;
        if key == "size" {
            size = Some(parse_int(ln, vcol, val, "class size")?);
        } else if key == "order" {
            order = Some(parse_int(ln, vcol, val, "element order")?);
        } else if let Some(p) = key.strip_prefix("pow") {
            let p = p
                .parse::<u64>()
                .ok()
                .filter(|&p| modp::is_prime(p))
                .ok_or_else(|| syntax(ln, col, format!("`{key}` is not pow<prime>")))?;
            if val.is_empty() {
                return Err(syntax(ln, vcol, "missing class name in power map"));
            }
            if pows.iter().any(|(q, _)| *q == p) {
                return Err(syntax(ln, col, format!("repeated power map for p = {p}")));
            }
            pows.push((p, val.to_string()));
        } else {
            return Err(syntax(ln, col, format!("unknown class attribute `{key}`")));
        }
    }
    let end = toks.last().map_or(1, |t| t.0 + t.1.len());
    Ok(PendingClass {
        line: ln,
        record: ClassRecord {
            name: name.to_string(),
            size: size.ok_or_else(|| syntax(ln, end, "missing size="))?,
            element_order: order.ok_or_else(|| syntax(ln, end, "missing order="))?,
            power_maps: BTreeMap::new(),
        },
        pows,
    })
}

fn parse_char(ln: usize, raw: &str, toks: &[(usize, &str)]) -> Result<Character, TableError> {
    let (ncol, name) = *toks
        .get(1)
        .ok_or_else(|| syntax(ln, toks[0].0 + 4, "missing character name"))?;
    let body_start = ncol - 1 + name.len();
    let body = &raw[body_start..];
    if body.trim().is_empty() {
        return Err(syntax(ln, body_start + 1, "missing character values"));
    }
    let mut values = Vec::new();
    let mut offset = body_start;
    for field in body.split(';') {
        values.push(parse_value(field).map_err(|e| match e {
            ArithError::Parse { msg, pos } => syntax(ln, offset + pos + 1, format!("bad value: {msg}")),
            other => syntax(ln, offset + 1, format!("bad value: {other}")),
        })?);
        offset += field.len() + 1;
    }
    Ok(Character {
        name: name.to_string(),
        values,
    })
}

/// Writes a table as CTB v1 text; [`parse_ctb`] reads it back unchanged.
pub fn emit_ctb(table: &CharacterTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "CTB 1");
    let _ = writeln!(out, "name {}", table.name);
    let _ = writeln!(out, "order {}", table.order);
    let _ = writeln!(out, "exponent {}", table.exponent);
    let _ = writeln!(out, "classes {}", table.classes.len());
    for c in &table.classes {
        let _ = write!(out, "class {} size={} order={}", c.name, c.size, c.element_order);
        for (p, t) in &c.power_maps {
            let _ = write!(out, " pow{p}={}", table.classes[*t].name);
        }
        out.push('\n');
    }
    for r in &table.rows {
        let vals: Vec<String> = r.values.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "char {} {}", r.name, vals.join(" ; "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Cyclotomic;

    const C2: &str = "CTB 1\nname C2\norder 2\nexponent 2\nclasses 2\n\
        class 1A size=1 order=1 pow2=1A\nclass 2A size=1 order=2 pow2=1A\n\
        char X.1 1 ; 1\nchar X.2 1 ; -1\n";

    #[test]
    fn order_two_group() {
        let t = parse_ctb(C2).unwrap();
        assert_eq!(t.classes.len(), 2);
        assert_eq!(t.rows[1].values, vec![Cyclotomic::one(), Cyclotomic::from_int(-1)]);
        assert_eq!(parse_ctb(&emit_ctb(&t)).unwrap(), t);
    }

    #[test]
    fn malformed_char_line_names_the_line() {
        let bad = C2.replace("char X.2 1 ; -1", "char X.2 1 ; -1x");
        match parse_ctb(&bad) {
            Err(TableError::Syntax { line, col, .. }) => {
                assert_eq!(line, 9);
                assert_eq!(col, 16);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        let unknown = C2.replace("class 2A size=1 order=2 pow2=1A", "class 2A size=1 order=2 pow2=9Z");
        assert!(matches!(parse_ctb(&unknown), Err(TableError::UnknownClass { line: 7, .. })));
        let short = C2.replace("char X.2 1 ; -1", "char X.2 1");
        assert!(matches!(parse_ctb(&short), Err(TableError::Counts(_))));
        let missing_row = C2.replace("char X.2 1 ; -1\n", "");
        assert!(matches!(parse_ctb(&missing_row), Err(TableError::Counts(_))));
        assert!(matches!(parse_ctb("CTB 2\n"), Err(TableError::Syntax { line: 1, col: 5, .. })));
        let nopow = C2.replace(" pow2=1A\nclass 2A", "\nclass 2A");
        assert!(matches!(parse_ctb(&nopow), Err(TableError::Counts(_))));
    }

    #[test]
    fn comments_and_blank_lines() {
        let t = parse_ctb(&format!("# cyclic\n\n{C2}# end\n")).unwrap();
        assert_eq!(t.name, "C2");
    }
}
