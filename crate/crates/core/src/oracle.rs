//! Decompressing reference implementations, bounded by a budget.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::slp::{compute_meta, eval_bounded, sat_add, Item, Letter, Nt, Slp};

/// Largest expansion the oracles accept, in letters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget(pub u64);

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget(100_000)
    }
}

/// 1-based starts of `p` in `t`, by direct comparison at every offset.
pub fn naive_match(p: &[Letter], t: &[Letter]) -> Vec<u64> {
    if p.is_empty() || p.len() > t.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 0..=t.len() - p.len() {
        if t[i..i + p.len()] == *p {
            out.push(i as u64 + 1);
        }
    }
    out
}

/// Same as [`naive_match`], with a failure-function scan.
pub fn scan_match(p: &[Letter], t: &[Letter]) -> Vec<u64> {
    if p.is_empty() || p.len() > t.len() {
        return Vec::new();
    }
    let mut fail = vec![0usize; p.len()];
    let mut k = 0;
    for i in 1..p.len() {
        while k > 0 && p[i] != p[k] {
            k = fail[k - 1];
        }
        if p[i] == p[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let mut out = Vec::new();
    k = 0;
    for (i, &c) in t.iter().enumerate() {
        while k > 0 && c != p[k] {
            k = fail[k - 1];
        }
        if c == p[k] {
            k += 1;
        }
        if k == p.len() {
            out.push((i + 2 - p.len()) as u64);
            k = fail[k - 1];
        }
    }
    out
}

/// Crossing pairs and letters with crossing blocks, found by expanding
/// every rule.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrossingReport {
    pub pairs: BTreeSet<(Letter, Letter)>,
    pub blocks: BTreeSet<Letter>,
}

/// Expands each body and inspects every adjacency between letters that
/// come from different body items, at least one a nonterminal.
pub fn classify_crossing_bruteforce(slp: &Slp, budget: OracleBudget) -> Result<CrossingReport> {
    let meta = compute_meta(slp);
    let total = meta.iter().fold(0u64, |acc, m| sat_add(acc, m.len));
    if total > budget.0 {
        return Err(Error::Budget { len: total, budget: budget.0 });
    }
    let mut rep = CrossingReport::default();
    for body in &slp.rules {
        let mut flat: Vec<(Letter, usize, bool)> = Vec::new();
        for (k, it) in body.iter().enumerate() {
            match *it {
                Item::Letter(a) => flat.push((a, k, false)),
                Item::Run(a, e) => flat.extend(std::iter::repeat_n((a, k, false), e.value() as usize)),
                Item::Nt(y) => {
                    for a in eval_bounded(slp, y, budget.0)? {
                        flat.push((a, k, true));
                    }
                }
            }
        }
        for w in flat.windows(2) {
            let ((a, i, x), (b, j, y)) = (w[0], w[1]);
            if i != j && (x || y) {
                if a == b {
                    rep.blocks.insert(a);
                } else {
                    rep.pairs.insert((a, b));
                }
            }
        }
    }
    Ok(rep)
}

/// Occurrence count and all 1-based positions of the pattern axiom in the
/// text axiom.
pub fn oracle_fcpm(slp: &Slp, budget: OracleBudget) -> Result<(u64, Vec<u64>)> {
    let t = expand(slp, slp.text, budget)?;
    let p = expand(slp, slp.pattern, budget)?;
    if p.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let pos = naive_match(&p, &t);
    Ok((pos.len() as u64, pos))
}

fn expand(slp: &Slp, x: Nt, budget: OracleBudget) -> Result<Vec<Letter>> {
    eval_bounded(slp, x, budget.0).map_err(|e| match e {
        Error::TooLong { len, cap } => Error::Budget { len, budget: cap },
        e => e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slp::{letters_from_str, SymbolTable};
    use proptest::prelude::*;

    fn l(s: &str) -> Vec<Letter> {
        letters_from_str(s).unwrap()
    }

    #[test]
    fn matchers() {
        assert_eq!(naive_match(&l("aba"), &l("abaababaabaab")), vec![1, 4, 6, 9]);
        assert_eq!(scan_match(&l("aba"), &l("abaababaabaab")), vec![1, 4, 6, 9]);
        assert!(naive_match(&l("abc"), &l("ab")).is_empty());
    }

    #[test]
    fn crossing_block_example() {
        let a = Letter(0);
        let slp = Slp::new(
            vec![vec![Item::Letter(a)], vec![Item::Letter(a), Item::Nt(Nt(0))]],
            Nt(1),
            Nt(0),
            SymbolTable::with_input_letters(1),
        );
        let rep = classify_crossing_bruteforce(&slp, OracleBudget::default()).unwrap();
        assert!(rep.pairs.is_empty());
        assert_eq!(rep.blocks.into_iter().collect::<Vec<_>>(), vec![a]);
    }

    #[test]
    fn budget_is_enforced() {
        let slp = crate::generate::gen_power(Letter(0), 1 << 40).unwrap();
        let combined = Slp::combine(&slp, &slp);
        assert!(matches!(oracle_fcpm(&combined, OracleBudget::default()), Err(Error::Budget { .. })));
        assert!(classify_crossing_bruteforce(&combined, OracleBudget::default()).is_err());
    }

    proptest! {
        #[test]
        fn matchers_agree(t in proptest::collection::vec(0u32..2, 0..200), p in proptest::collection::vec(0u32..2, 1..6)) {
            let t: Vec<Letter> = t.into_iter().map(Letter).collect();
            let p: Vec<Letter> = p.into_iter().map(Letter).collect();
            prop_assert_eq!(naive_match(&p, &t), scan_match(&p, &t));
        }
    }
}
