//! Exact rational and cyclotomic arithmetic.

mod cyclotomic;
mod rational;

pub use cyclotomic::Cyclotomic;
pub use rational::Rational;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("exponent {k} is not coprime to conductor {conductor}")]
    NotCoprime { k: i64, conductor: u64 },
    #[error("value {0} is not rational")]
    NotRational(String),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { msg: String, pos: usize },
}

/// Parses the textual value grammar: a signed sum of `c`, `c*E(n,k)` or
/// `E(n,k)` terms, where `c` is `a` or `a/b`. Whitespace is ignored.
pub fn parse_value(text: &str) -> Result<Cyclotomic, ArithError> {
    let s: Vec<(usize, u8)> = text
        .bytes()
        .enumerate()
        .filter(|(_, b)| !b.is_ascii_whitespace())
        .collect();
    let err = |pos: usize, msg: &str| ArithError::Parse {
        msg: msg.to_string(),
        pos,
    };
    if s.is_empty() {
        return Err(err(0, "empty value"));
    }
    let mut i = 0;
    // Terms are accumulated per conductor so each field is reduced once.
    let mut terms: Vec<(u64, i64, Rational)> = Vec::new();
    let read_int = |i: &mut usize| -> Option<String> {
        let start = *i;
        while *i < s.len() && s[*i].1.is_ascii_digit() {
            *i += 1;
        }
        (start < *i).then(|| s[start..*i].iter().map(|&(_, b)| b as char).collect())
    };
    while i < s.len() {
        let pos = s[i].0;
        let mut negative = false;
        if s[i].1 == b'+' || s[i].1 == b'-' {
            negative = s[i].1 == b'-';
            i += 1;
        } else if !terms.is_empty() {
            return Err(err(pos, "expected `+` or `-` between terms"));
        }
        if i >= s.len() {
            return Err(err(pos, "dangling sign"));
        }
        let mut coeff = Rational::one();
        let mut has_coeff = false;
        if s[i].1.is_ascii_digit() {
            let num = read_int(&mut i).unwrap_or_default();
            let mut lit = num;
            if i < s.len() && s[i].1 == b'/' {
                i += 1;
                let den = read_int(&mut i)
                    .ok_or_else(|| err(s.get(i).map_or(pos, |t| t.0), "expected denominator"))?;
                lit = format!("{lit}/{den}");
            }
            coeff = lit.parse().map_err(|e| match e {
                ArithError::DivisionByZero => ArithError::DivisionByZero,
                _ => err(pos, "invalid coefficient"),
            })?;
            has_coeff = true;
            if i < s.len() && s[i].1 == b'*' {
                i += 1;
            } else {
                let c = if negative { -coeff } else { coeff };
                terms.push((1, 0, c));
                continue;
            }
        }
        if i >= s.len() || s[i].1 != b'E' {
            let at = s.get(i).map_or(pos, |t| t.0);
            return Err(err(at, if has_coeff { "expected E(n,k) after `*`" } else { "expected a term" }));
        }
        i += 1;
        let expect = |i: &mut usize, ch: u8, what: &str| -> Result<(), ArithError> {
            if *i < s.len() && s[*i].1 == ch {
                *i += 1;
                Ok(())
            } else {
                Err(err(s.get(*i).map_or(pos, |t| t.0), what))
            }
        };
        expect(&mut i, b'(', "expected `(`")?;
        let n: u64 = read_int(&mut i)
            .and_then(|t| t.parse().ok())
            .filter(|&n| n >= 1)
            .ok_or_else(|| err(pos, "expected a positive conductor"))?;
        expect(&mut i, b',', "expected `,`")?;
        let kneg = i < s.len() && s[i].1 == b'-';
        if kneg {
            i += 1;
        }
        let k: i64 = read_int(&mut i)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(pos, "expected an exponent"))?;
        expect(&mut i, b')', "expected `)`")?;
        let k = if kneg { -k } else { k };
        let c = if negative { -coeff } else { coeff };
        terms.push((n, k, c));
    }
    let n = terms.iter().fold(1u64, |acc, t| crate::modp::lcm(acc, t.0));
    Ok(Cyclotomic::from_exponents(
        n,
        terms
            .into_iter()
            .map(|(m, k, c)| (k * (n / m) as i64, c)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar_examples() {
        let v = parse_value("1/2 + 1/2*E(5,1) - E(5,3)").unwrap();
        let expect = &(&Cyclotomic::from_rational(Rational::new(1, 2).unwrap())
            + &Cyclotomic::zeta(5, 1).scale(&Rational::new(1, 2).unwrap()))
            - &Cyclotomic::zeta(5, 3);
        assert_eq!(v, expect);
        assert_eq!(parse_value("-1").unwrap(), Cyclotomic::from_int(-1));
        assert_eq!(parse_value("E(7,2)").unwrap(), Cyclotomic::zeta(7, 2));
        assert_eq!(parse_value(" - E( 4 , 1 ) ").unwrap(), -Cyclotomic::zeta(4, 1));
        assert_eq!(parse_value("E(3,1)+E(3,2)").unwrap(), Cyclotomic::from_int(-1));
        assert_eq!(parse_value("2*E(8,-1)").unwrap(), Cyclotomic::zeta(8, 7).mul_int(2));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "+", "E(0,1)", "E(5,1", "3*", "1/0", "x", "E(5,)"] {
            assert!(parse_value(bad).is_err(), "accepted {bad:?}");
        }
    }
}
