//! Structural checks for the relaxed SLP form.

use std::fmt;

use crate::slp::{Item, Slp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    TooManyNonterminals { rule: usize, count: usize },
    ForwardReference { rule: usize, target: u32 },
    UnknownNonterminal { rule: usize, target: u32 },
    EmptyReferenced { rule: usize, target: u32 },
    PatternReferenced { rule: usize },
    LetterOutOfRange { rule: usize, letter: u32 },
    ShortRun { rule: usize, exponent: u64 },
    AxiomOutOfRange { axiom: &'static str, id: u32 },
}

impl Violation {
    /// Rule the violation was found in, if any.
    pub fn rule(&self) -> Option<usize> {
        match *self {
            Violation::TooManyNonterminals { rule, .. }
            | Violation::ForwardReference { rule, .. }
            | Violation::UnknownNonterminal { rule, .. }
            | Violation::EmptyReferenced { rule, .. }
            | Violation::PatternReferenced { rule }
            | Violation::LetterOutOfRange { rule, .. }
            | Violation::ShortRun { rule, .. } => Some(rule),
            Violation::AxiomOutOfRange { .. } => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooManyNonterminals { rule, count } => {
                write!(f, "rule {rule}: {count} nonterminal references, at most 2 allowed")
            }
            Violation::ForwardReference { rule, target } => {
                write!(f, "rule {rule}: forward reference to rule {target}")
            }
            Violation::UnknownNonterminal { rule, target } => {
                write!(f, "rule {rule}: reference to unknown rule {target}")
            }
            Violation::EmptyReferenced { rule, target } => {
                write!(f, "rule {rule}: references rule {target}, which derives the empty word")
            }
            Violation::PatternReferenced { rule } => {
                write!(f, "rule {rule}: references the pattern axiom")
            }
            Violation::LetterOutOfRange { rule, letter } => {
                write!(f, "rule {rule}: letter {letter} outside the alphabet")
            }
            Violation::ShortRun { rule, exponent } => {
                write!(f, "rule {rule}: run with exponent {exponent}, must be at least 2")
            }
            Violation::AxiomOutOfRange { axiom, id } => {
                write!(f, "{axiom} axiom {id} is not a rule")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Lists every violated condition. Never panics, whatever the input.
pub fn validate(slp: &Slp) -> ValidationReport {
    let mut out = Vec::new();
    let r = slp.rules.len();
    let k = slp.symbols.len();
    for (axiom, id) in [("text", slp.text.0), ("pattern", slp.pattern.0)] {
        if id as usize >= r {
            out.push(Violation::AxiomOutOfRange { axiom, id });
        }
    }
    let mut nonempty = vec![false; r];
    for (i, body) in slp.rules.iter().enumerate() {
        let mut nts = 0;
        for item in body {
            match *item {
                Item::Letter(a) => {
                    nonempty[i] = true;
                    if a.index() >= k {
                        out.push(Violation::LetterOutOfRange { rule: i, letter: a.0 });
                    }
                }
                Item::Run(a, e) => {
                    nonempty[i] = true;
                    if a.index() >= k {
                        out.push(Violation::LetterOutOfRange { rule: i, letter: a.0 });
                    }
                    if e.value() < 2 {
                        out.push(Violation::ShortRun { rule: i, exponent: e.value() });
                    }
                }
                Item::Nt(x) => {
                    nts += 1;
                    let t = x.index();
                    if t >= r {
                        out.push(Violation::UnknownNonterminal { rule: i, target: x.0 });
                    } else if t >= i {
                        out.push(Violation::ForwardReference { rule: i, target: x.0 });
                    } else if !nonempty[t] {
                        out.push(Violation::EmptyReferenced { rule: i, target: x.0 });
                    } else {
                        nonempty[i] = true;
                    }
                    if x == slp.pattern {
                        out.push(Violation::PatternReferenced { rule: i });
                    }
                }
            }
        }
        if nts > 2 {
            out.push(Violation::TooManyNonterminals { rule: i, count: nts });
        }
    }
    ValidationReport { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_fibonacci;
    use crate::slp::{Letter, Nt, SymbolTable};

    fn slp(rules: Vec<Vec<Item>>, text: u32, pattern: u32) -> Slp {
        Slp::new(rules, Nt(text), Nt(pattern), SymbolTable::with_input_letters(2))
    }

    #[test]
    fn fibonacci_is_valid() {
        assert!(validate(&gen_fibonacci(20).unwrap()).is_empty());
    }

    #[test]
    fn forward_reference() {
        let s = slp(
            vec![vec![Item::Letter(Letter(0))], vec![Item::Nt(Nt(2))], vec![Item::Letter(Letter(1))]],
            1,
            1,
        );
        let rep = validate(&s);
        assert_eq!(rep.violations, vec![Violation::ForwardReference { rule: 1, target: 2 }]);
        assert!(rep.to_string().contains("forward reference"));
    }

    #[test]
    fn empty_rule_referenced() {
        let s = slp(vec![vec![], vec![Item::Nt(Nt(0)), Item::Letter(Letter(0))]], 1, 1);
        assert_eq!(validate(&s).violations, vec![Violation::EmptyReferenced { rule: 1, target: 0 }]);
    }

    #[test]
    fn other_violations() {
        let s = slp(
            vec![
                vec![Item::Letter(Letter(0))],
                vec![Item::Nt(Nt(0)), Item::Nt(Nt(0)), Item::Nt(Nt(0)), Item::Letter(Letter(7))],
            ],
            1,
            0,
        );
        let v = validate(&s).violations;
        assert!(v.contains(&Violation::TooManyNonterminals { rule: 1, count: 3 }));
        assert!(v.contains(&Violation::LetterOutOfRange { rule: 1, letter: 7 }));
        assert!(v.contains(&Violation::PatternReferenced { rule: 1 }));
        let s = slp(vec![vec![Item::Run(Letter(0), crate::blocklen::BlockLen::explicit(1))]], 0, 3);
        let v = validate(&s).violations;
        assert!(v.contains(&Violation::ShortRun { rule: 0, exponent: 1 }));
        assert!(v.contains(&Violation::AxiomOutOfRange { axiom: "pattern", id: 3 }));
    }
}
