//! The line-based `slp v1` text format.
//!
//! ```text
//! slp v1
//! alphabet 2
//! rules 3
//! rule 0 := t:0
//! rule 1 := t:1
//! rule 2 := n:0 n:1 run:0^5
//! text 2
//! pattern 2
//! ```
//!
//! `#` starts a comment. Parsing accepts any whitespace; [`serialize`] emits
//! the canonical form (single spaces, ascending rule ids).

use std::fmt::Write as _;

use crate::blocklen::BlockLen;
use crate::error::{Error, Result};
use crate::slp::{Item, Letter, Nt, Slp, SymbolTable};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn num<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| err(line, format!("expected {what}, found {s:?}")))
}

fn parse_item(line: usize, tok: &str, k: usize) -> Result<Item> {
    if let Some(rest) = tok.strip_prefix("t:") {
        let a: u32 = num(line, rest, "a letter")?;
        if a as usize >= k {
            return Err(err(line, format!("letter {a} outside alphabet of size {k}")));
        }
        Ok(Item::Letter(Letter(a)))
    } else if let Some(rest) = tok.strip_prefix("n:") {
        Ok(Item::Nt(Nt(num(line, rest, "a rule id")?)))
    } else if let Some(rest) = tok.strip_prefix("run:") {
        let (a, e) = rest
            .split_once('^')
            .ok_or_else(|| err(line, format!("run {tok:?} lacks '^'")))?;
        let a: u32 = num(line, a, "a letter")?;
        if a as usize >= k {
            return Err(err(line, format!("letter {a} outside alphabet of size {k}")));
        }
        let e: u64 = num(line, e, "an exponent")?;
        Ok(Item::Run(Letter(a), BlockLen::from_common(e)))
    } else {
        Err(err(line, format!("unknown item {tok:?}")))
    }
}

/// Parses a whole file. Structural conditions (ordering, emptiness) are left
/// to [`crate::validate::validate`].
pub fn parse(input: &str) -> Result<Slp> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| err(input.lines().count() + 1, format!("unexpected end of input, expected {what}")))
    };

    let (ln, header) = next("header")?;
    if header.split_whitespace().collect::<Vec<_>>() != ["slp", "v1"] {
        return Err(err(ln, "expected header \"slp v1\""));
    }
    let mut keyword = |what: &'static str| -> Result<(usize, u64)> {
        let (ln, l) = next(what)?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            [kw, v] if *kw == what => Ok((ln, num(ln, v, "a number")?)),
            _ => Err(err(ln, format!("expected \"{what} <n>\""))),
        }
    };
    let (_, k) = keyword("alphabet")?;
    let (rln, r) = keyword("rules")?;
    let k = k as usize;
    let r = r as usize;
    if r == 0 {
        return Err(err(rln, "at least one rule is required"));
    }
    let mut rules: Vec<Option<Vec<Item>>> = vec![None; r];
    for _ in 0..r {
        let (ln, l) = next("a rule")?;
        let (head, body) = l
            .split_once(":=")
            .ok_or_else(|| err(ln, "expected \"rule <id> := ...\""))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        let id: usize = match head.as_slice() {
            ["rule", id] => num(ln, id, "a rule id")?,
            _ => return Err(err(ln, "expected \"rule <id> := ...\"")),
        };
        if id >= r {
            return Err(err(ln, format!("rule id {id} out of range (rules {r})")));
        }
        if rules[id].is_some() {
            return Err(err(ln, format!("rule {id} defined twice")));
        }
        let items = body
            .split_whitespace()
            .map(|t| parse_item(ln, t, k))
            .collect::<Result<Vec<_>>>()?;
        rules[id] = Some(items);
    }
    let mut axiom = |what: &'static str| -> Result<Nt> {
        let (ln, l) = next(what)?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            [kw, v] if *kw == what => Ok(Nt(num(ln, v, "a rule id")?)),
            _ => Err(err(ln, format!("expected \"{what} <id>\""))),
        }
    };
    let text = axiom("text")?;
    let pattern = axiom("pattern")?;
    if let Some((ln, l)) = lines.next() {
        return Err(err(ln, format!("trailing content {l:?}")));
    }
    Ok(Slp::new(
        rules.into_iter().map(|b| b.unwrap()).collect(),
        text,
        pattern,
        SymbolTable::with_input_letters(k),
    ))
}

/// Canonical text form. Letter weights are not part of the format.
pub fn serialize(slp: &Slp) -> String {
    let mut out = String::new();
    out.push_str("slp v1\n");
    let _ = writeln!(out, "alphabet {}", slp.symbols.len());
    let _ = writeln!(out, "rules {}", slp.rules.len());
    for (i, body) in slp.rules.iter().enumerate() {
        let _ = write!(out, "rule {i} :=");
        for item in body {
            let _ = match *item {
                Item::Letter(a) => write!(out, " t:{}", a.0),
                Item::Nt(x) => write!(out, " n:{}", x.0),
                Item::Run(a, e) => write!(out, " run:{}^{}", a.0, e.value()),
            };
        }
        out.push('\n');
    }
    let _ = writeln!(out, "text {}", slp.text.0);
    let _ = writeln!(out, "pattern {}", slp.pattern.0);
    out
}

pub fn read_file(path: &std::path::Path) -> Result<Slp> {
    let s = std::fs::read_to_string(path)
        .map_err(|e| Error::Param(format!("cannot read {}: {e}", path.display())))?;
    parse(&s)
}

pub fn write_file(slp: &Slp, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, serialize(slp))
        .map_err(|e| Error::Param(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_fibonacci;
    use crate::slp::{eval_bounded, letters_to_string};

    #[test]
    fn round_trip_fibonacci() {
        let f = gen_fibonacci(7).unwrap();
        let s = serialize(&f);
        assert_eq!(parse(&s).unwrap(), f);
        assert_eq!(serialize(&parse(&s).unwrap()), s);
    }

    #[test]
    fn minimal_file() {
        let s = "slp v1\nalphabet 2\nrules 2\nrule 0 := t:1\nrule 1 := t:0 n:0\ntext 1\npattern 1\n";
        let slp = parse(s).unwrap();
        assert_eq!(letters_to_string(&eval_bounded(&slp, slp.text, 10).unwrap()), "ab");
    }

    #[test]
    fn loose_whitespace_and_comments() {
        let s = "# demo\n  slp   v1\n\nalphabet 1 # one letter\nrules 1\nrule 0 :=  run:0^4   t:0\ntext 0\npattern 0";
        let slp = parse(s).unwrap();
        assert_eq!(eval_bounded(&slp, slp.text, 10).unwrap().len(), 5);
        assert_eq!(serialize(&slp), "slp v1\nalphabet 1\nrules 1\nrule 0 := run:0^4 t:0\ntext 0\npattern 0\n");
    }

    #[test]
    fn errors_carry_lines() {
        let bad = "slp v1\nalphabet 2\nrules 1\nrule 0 := t:5\ntext 0\npattern 0\n";
        assert!(matches!(parse(bad), Err(Error::Parse { line: 4, .. })));
        let bad = "slp v2\n";
        assert!(matches!(parse(bad), Err(Error::Parse { line: 1, .. })));
        let bad = "slp v1\nalphabet 2\nrules 2\nrule 0 := t:0\ntext 0\npattern 0\n";
        assert!(matches!(parse(bad), Err(Error::Parse { line: 5, .. })));
        let bad = "slp v1\nalphabet 2\nrules 1\nrule 0 := x:0\ntext 0\npattern 0\n";
        assert!(matches!(parse(bad), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn forward_reference_parses_but_fails_validation() {
        let s = "slp v1\nalphabet 1\nrules 2\nrule 0 := n:1\nrule 1 := t:0\ntext 0\npattern 0\n";
        let slp = parse(s).unwrap();
        assert!(!crate::validate::validate(&slp).is_empty());
    }
}
