//! Text, JSON and LaTeX forms of [`DiffPoly`].
//!
//! The canonical text form is `u3 + 3/2*u0^2*u1`: terms in graded order,
//! coefficient `1` omitted, negative terms written with ` - `. [`parse`]
//! accepts that form and a few harmless variants (extra spaces, explicit
//! `1*`, leading `+`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::diffpoly::split_sign;
use super::{DiffPoly, JetMonomial};
use crate::error::{Error, Result};

fn monomial_text(m: &JetMonomial) -> String {
    format!("{m:?}")
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms().enumerate() {
            let (negative, mag) = split_sign(c);
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", monomial_text(m))?;
            } else {
                write!(f, "{mag}*{}", monomial_text(m))?;
            }
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Parses a rational written as `p/q` or `p`.
pub fn parse_rational_str(s: &str) -> Result<BigRational> {
    parse_rational(s)
}

fn parse_factor(tok: &str) -> Result<Option<(usize, u32)>> {
    let tok = tok.trim();
    let Some(rest) = tok.strip_prefix('u') else {
        return Ok(None);
    };
    let bad = || Error::Parse(format!("malformed jet factor {tok:?}"));
    let (idx, exp) = match rest.split_once('^') {
        Some((i, e)) => (i, e.parse::<u32>().map_err(|_| bad())?),
        None => (rest, 1),
    };
    let idx = idx.parse::<usize>().map_err(|_| bad())?;
    if exp == 0 {
        return Err(bad());
    }
    Ok(Some((idx, exp)))
}

fn parse_term(body: &str, negative: bool) -> Result<(JetMonomial, BigRational)> {
    let mut coeff = BigRational::one();
    let mut pairs = Vec::new();
    for tok in body.split('*') {
        let tok = tok.trim();
        if tok.is_empty() {
            return Err(Error::Parse(format!("empty factor in term {body:?}")));
        }
        match parse_factor(tok)? {
            Some(p) => pairs.push(p),
            None => coeff *= parse_rational(tok)?,
        }
    }
    if negative {
        coeff = -coeff;
    }
    Ok((JetMonomial::from_pairs(pairs), coeff))
}

/// Parses the canonical text form back into a [`DiffPoly`].
pub fn parse(text: &str) -> Result<DiffPoly> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut out = DiffPoly::zero();
    let mut negative = false;
    let mut current = String::new();
    let mut pending = false;
    for ch in text.chars() {
        match ch {
            '+' | '-' => {
                if current.trim().is_empty() {
                    if pending || !out.is_zero() {
                        return Err(Error::Parse(format!("dangling sign in {text:?}")));
                    }
                    if ch == '-' {
                        negative = !negative;
                    }
                    pending = true;
                    continue;
                }
                let (m, c) = parse_term(&current, negative)?;
                out += DiffPoly::monomial(m, c);
                current.clear();
                negative = ch == '-';
                pending = true;
            }
            _ => {
                current.push(ch);
                if !ch.is_whitespace() {
                    pending = false;
                }
            }
        }
    }
    if current.trim().is_empty() {
        return Err(Error::Parse(format!("trailing sign in {text:?}")));
    }
    let (m, c) = parse_term(&current, negative)?;
    out += DiffPoly::monomial(m, c);
    Ok(out)
}

impl FromStr for DiffPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

/// One term in the JSON form: `{"coeff": "p/q", "exps": {"j": e}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub coeff: String,
    pub exps: BTreeMap<String, u32>,
}

pub fn to_json_terms(p: &DiffPoly) -> Vec<JsonTerm> {
    p.terms()
        .map(|(m, c)| JsonTerm {
            coeff: c.to_string(),
            exps: m.iter().map(|(j, e)| (j.to_string(), e)).collect(),
        })
        .collect()
}

pub fn from_json_terms(terms: &[JsonTerm]) -> Result<DiffPoly> {
    let mut out = DiffPoly::zero();
    for t in terms {
        let c = parse_rational(&t.coeff)?;
        let pairs = t
            .exps
            .iter()
            .map(|(j, e)| {
                let j = j
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad jet index {j:?}")))?;
                if *e == 0 {
                    return Err(Error::Parse(format!("zero exponent on u{j}")));
                }
                Ok((j, *e))
            })
            .collect::<Result<Vec<_>>>()?;
        out += DiffPoly::monomial(JetMonomial::from_pairs(pairs), c);
    }
    Ok(out)
}

pub fn to_json(p: &DiffPoly) -> String {
    serde_json::to_string(&to_json_terms(p)).expect("serializable terms")
}

pub fn from_json(s: &str) -> Result<DiffPoly> {
    let terms: Vec<JsonTerm> =
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    from_json_terms(&terms)
}

pub(crate) fn latex_rational(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

fn latex_monomial(m: &JetMonomial) -> String {
    m.iter()
        .map(|(j, e)| {
            if e == 1 {
                format!("u_{{{j}}}")
            } else {
                format!("u_{{{j}}}^{{{e}}}")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn to_latex(p: &DiffPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (idx, (m, c)) in p.terms().enumerate() {
        let (negative, mag) = split_sign(c);
        out.push_str(match (idx, negative) {
            (0, true) => "-",
            (0, false) => "",
            (_, true) => " - ",
            (_, false) => " + ",
        });
        if m.is_one() {
            out.push_str(&latex_rational(&mag));
        } else if mag.is_one() {
            out.push_str(&latex_monomial(m));
        } else {
            out.push_str(&latex_rational(&mag));
            out.push(' ');
            out.push_str(&latex_monomial(m));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetalg::diffpoly::rat;

    fn mkdv() -> DiffPoly {
        DiffPoly::u(3)
            + DiffPoly::monomial(JetMonomial::from_pairs([(0, 2), (1, 1)]), rat(3, 2))
    }

    #[test]
    fn canonical_text() {
        assert_eq!(mkdv().to_string(), "u3 + 3/2*u0^2*u1");
        assert_eq!(DiffPoly::zero().to_string(), "0");
        assert_eq!((-DiffPoly::u(1)).to_string(), "-u1");
        let p = DiffPoly::u(2) - DiffPoly::constant(rat(1, 2));
        assert_eq!(p.to_string(), "-1/2 + u2");
    }

    #[test]
    fn text_round_trip() {
        for p in [mkdv(), DiffPoly::zero(), -mkdv(), DiffPoly::one()] {
            assert_eq!(parse(&p.to_string()).unwrap(), p);
        }
        assert_eq!(parse("3/2 * u0^2 * u1 + u3").unwrap(), mkdv());
        assert_eq!(parse("-u1 - -u1").is_err(), true);
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "u", "u1^", "1/0*u1", "u1 +", "x2", "u1**u2"] {
            assert!(parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn json_round_trip() {
        let p = mkdv();
        let s = to_json(&p);
        assert_eq!(
            s,
            r#"[{"coeff":"1","exps":{"3":1}},{"coeff":"3/2","exps":{"0":2,"1":1}}]"#
        );
        assert_eq!(from_json(&s).unwrap(), p);
    }

    #[test]
    fn latex_form() {
        assert_eq!(to_latex(&mkdv()), "u_{3} + \\frac{3}{2} u_{0}^{2} u_{1}");
    }
}
