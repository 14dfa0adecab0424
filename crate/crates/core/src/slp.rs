//! Straight-line programs in relaxed form.
//!
//! A single rule table holds both the text and the pattern. Every rule body
//! is a sequence of [`Item`]s: letters, references to earlier nonterminals
//! (at most two per body) and runs `a^e` of a single letter. The symbol
//! table records, for every letter, the decompressed length it stands for.

use std::fmt;

use crate::blocklen::BlockLen;
use crate::error::{Error, Result};

/// Saturation bound for every length, weight and count in the crate.
pub const SAT_MAX: u64 = i64::MAX as u64;

#[inline]
pub fn sat_add(a: u64, b: u64) -> u64 {
    a.saturating_add(b).min(SAT_MAX)
}

#[inline]
pub fn sat_mul(a: u64, b: u64) -> u64 {
    a.saturating_mul(b).min(SAT_MAX)
}

/// A terminal letter. Ids are dense; see [`renumber_alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u32);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A nonterminal id, i.e. an index into [`Slp::rules`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Nt(pub u32);

impl Nt {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One symbol of a rule body.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Item {
    Letter(Letter),
    Nt(Nt),
    /// `letter^len`, with `len >= 2`.
    Run(Letter, BlockLen),
}

impl Item {
    /// The letter of a `Letter` or `Run` item.
    #[inline]
    pub fn letter(&self) -> Option<Letter> {
        match *self {
            Item::Letter(a) | Item::Run(a, _) => Some(a),
            Item::Nt(_) => None,
        }
    }

    /// Block length contributed by a letter-like item.
    #[inline]
    pub fn block_len(&self) -> Option<BlockLen> {
        match *self {
            Item::Letter(_) => Some(BlockLen::explicit(1)),
            Item::Run(_, len) => Some(len),
            Item::Nt(_) => None,
        }
    }

    /// Builds `a^len`, collapsing to a plain letter for length one.
    pub fn block(a: Letter, len: BlockLen) -> Item {
        if len.value() == 1 {
            Item::Letter(a)
        } else {
            Item::Run(a, len)
        }
    }
}

/// Weights of all letters ever allocated for one instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    weights: Vec<u64>,
}

impl SymbolTable {
    /// `k` input letters, each of weight one.
    pub fn with_input_letters(k: usize) -> Self {
        SymbolTable {
            weights: vec![1; k],
        }
    }

    pub fn from_weights(weights: Vec<u64>) -> Self {
        SymbolTable { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Id the next fresh letter will receive.
    pub fn next_id(&self) -> u32 {
        self.weights.len() as u32
    }

    pub fn weight(&self, a: Letter) -> u64 {
        self.weights[a.index()]
    }

    pub fn set_weight(&mut self, a: Letter, w: u64) {
        self.weights[a.index()] = w.min(SAT_MAX);
    }

    /// Allocates a letter no rule body mentions yet.
    pub fn fresh(&mut self, weight: u64) -> Letter {
        let id = self.weights.len() as u32;
        self.weights.push(weight.min(SAT_MAX));
        Letter(id)
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }
}

/// A grammar holding both the text and the pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slp {
    pub rules: Vec<Vec<Item>>,
    pub text: Nt,
    pub pattern: Nt,
    pub symbols: SymbolTable,
}

/// Per-nonterminal data computed bottom-up by [`compute_meta`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolMeta {
    /// Number of current letters in the value, saturating.
    pub len: u64,
    pub first: Option<Letter>,
    pub last: Option<Letter>,
    /// Decompressed length (sum of letter weights), saturating.
    pub weight: u64,
}

impl SymbolMeta {
    const EMPTY: SymbolMeta = SymbolMeta {
        len: 0,
        first: None,
        last: None,
        weight: 0,
    };
}

impl Slp {
    pub fn new(rules: Vec<Vec<Item>>, text: Nt, pattern: Nt, symbols: SymbolTable) -> Self {
        Slp {
            rules,
            text,
            pattern,
            symbols,
        }
    }

    pub fn body(&self, x: Nt) -> &[Item] {
        &self.rules[x.index()]
    }

    pub fn num_rules(&self) -> usize {
        self.rules.len()
    }

    /// Sum of body lengths.
    pub fn size(&self) -> usize {
        self.rules.iter().map(Vec::len).sum()
    }

    /// Distinct letters occurring in bodies.
    pub fn live_alphabet(&self) -> usize {
        let mut seen = vec![false; self.symbols.len()];
        let mut n = 0;
        for item in self.rules.iter().flatten() {
            if let Some(a) = item.letter() {
                if !seen[a.index()] {
                    seen[a.index()] = true;
                    n += 1;
                }
            }
        }
        n
    }

    pub fn meta(&self) -> Vec<SymbolMeta> {
        compute_meta(self)
    }

    /// Whether every body is in Chomsky normal form (`X -> YZ` or `X -> a`).
    pub fn is_cnf(&self) -> bool {
        self.rules.iter().all(|body| {
            matches!(body.as_slice(), [Item::Letter(_)] | [Item::Nt(_), Item::Nt(_)])
        })
    }

    /// Merges `pattern` into `text`'s rule table: the text axiom of `text`
    /// becomes the text, the pattern axiom of `pattern` becomes the pattern.
    /// The pattern axiom is copied into a fresh last rule so nothing
    /// references it.
    pub fn combine(text: &Slp, pattern: &Slp) -> Slp {
        let shift = text.rules.len() as u32;
        let mut rules = text.rules.clone();
        for body in &pattern.rules {
            rules.push(
                body.iter()
                    .map(|it| match *it {
                        Item::Nt(Nt(j)) => Item::Nt(Nt(j + shift)),
                        other => other,
                    })
                    .collect(),
            );
        }
        let p_body = rules[(pattern.pattern.0 + shift) as usize].clone();
        rules.push(p_body);
        let p = Nt(rules.len() as u32 - 1);
        let k = text.symbols.len().max(pattern.symbols.len());
        let mut weights = vec![1u64; k];
        for (i, w) in text.symbols.weights().iter().enumerate() {
            weights[i] = *w;
        }
        for (i, w) in pattern.symbols.weights().iter().enumerate() {
            if i >= text.symbols.len() {
                weights[i] = *w;
            }
        }
        Slp {
            rules,
            text: text.text,
            pattern: p,
            symbols: SymbolTable::from_weights(weights),
        }
    }

    /// Returns a copy with the two axioms swapped. The new pattern axiom is
    /// duplicated into a fresh rule when some body references it.
    pub fn swapped(&self) -> Slp {
        let mut out = self.clone();
        out.text = self.pattern;
        let referenced = self
            .rules
            .iter()
            .flatten()
            .any(|it| *it == Item::Nt(self.text));
        if referenced {
            out.rules.push(self.rules[self.text.index()].clone());
            out.pattern = Nt(out.rules.len() as u32 - 1);
        } else {
            out.pattern = self.text;
        }
        out
    }
}

/// Single bottom-up pass; requires bodies to reference only earlier rules.
pub fn compute_meta(slp: &Slp) -> Vec<SymbolMeta> {
    let mut meta: Vec<SymbolMeta> = Vec::with_capacity(slp.rules.len());
    for body in &slp.rules {
        let mut m = SymbolMeta::EMPTY;
        for item in body {
            let (len, first, last, weight) = match *item {
                Item::Letter(a) => (1, Some(a), Some(a), slp.symbols.weight(a)),
                Item::Run(a, e) => {
                    let e = e.value();
                    (e, Some(a), Some(a), sat_mul(e, slp.symbols.weight(a)))
                }
                Item::Nt(j) => {
                    let s = meta[j.index()];
                    (s.len, s.first, s.last, s.weight)
                }
            };
            if len == 0 {
                continue;
            }
            if m.first.is_none() {
                m.first = first;
            }
            m.last = last;
            m.len = sat_add(m.len, len);
            m.weight = sat_add(m.weight, weight);
        }
        meta.push(m);
    }
    meta
}

/// Expands `x` if its value has at most `cap` letters.
pub fn eval_bounded(slp: &Slp, x: Nt, cap: u64) -> Result<Vec<Letter>> {
    if x.index() >= slp.rules.len() {
        return Err(Error::UnknownSymbol(x.0));
    }
    let meta = compute_meta(slp);
    let len = meta[x.index()].len;
    if len > cap {
        return Err(Error::TooLong { len, cap });
    }
    let mut out = Vec::with_capacity(len as usize);
    expand_into(slp, x, &mut out);
    Ok(out)
}

/// Unconditional expansion with an explicit stack; callers bound the size.
pub(crate) fn expand_into(slp: &Slp, x: Nt, out: &mut Vec<Letter>) {
    let mut stack: Vec<(Nt, usize)> = vec![(x, 0)];
    while let Some((nt, pos)) = stack.pop() {
        let body = &slp.rules[nt.index()];
        if pos >= body.len() {
            continue;
        }
        stack.push((nt, pos + 1));
        match body[pos] {
            Item::Letter(a) => out.push(a),
            Item::Run(a, e) => out.extend(std::iter::repeat_n(a, e.value() as usize)),
            Item::Nt(j) => stack.push((j, 0)),
        }
    }
}

/// Maps the letters occurring in bodies onto `0..k`, keeping their relative
/// order, and returns the old-to-new mapping alongside the result.
pub fn renumber_alphabet(slp: &Slp) -> (Slp, Vec<Option<Letter>>) {
    let n = slp.symbols.len();
    let mut used = vec![false; n];
    for item in slp.rules.iter().flatten() {
        if let Some(a) = item.letter() {
            used[a.index()] = true;
        }
    }
    let mut map = vec![None; n];
    let mut weights = Vec::new();
    for (old, &u) in used.iter().enumerate() {
        if u {
            map[old] = Some(Letter(weights.len() as u32));
            weights.push(slp.symbols.weights()[old]);
        }
    }
    let rules = slp
        .rules
        .iter()
        .map(|body| {
            body.iter()
                .map(|it| match *it {
                    Item::Letter(a) => Item::Letter(map[a.index()].unwrap()),
                    Item::Run(a, e) => Item::Run(map[a.index()].unwrap(), e),
                    nt => nt,
                })
                .collect()
        })
        .collect();
    (
        Slp {
            rules,
            text: slp.text,
            pattern: slp.pattern,
            symbols: SymbolTable::from_weights(weights),
        },
        map,
    )
}

/// Chomsky-normal-form SLP of depth `O(log n)` for a non-empty string,
/// built by pairing neighbours level by level. Identical pairs share a rule.
pub fn from_text_balanced(text: &[Letter]) -> Result<Slp> {
    if text.is_empty() {
        return Err(Error::EmptyText);
    }
    let k = text.iter().map(|a| a.0 + 1).max().unwrap_or(0) as usize;
    let mut rules: Vec<Vec<Item>> = Vec::new();
    let mut term: Vec<Option<Nt>> = vec![None; k];
    let mut level: Vec<Nt> = Vec::with_capacity(text.len());
    for &a in text {
        let x = *term[a.index()].get_or_insert_with(|| {
            rules.push(vec![Item::Letter(a)]);
            Nt(rules.len() as u32 - 1)
        });
        level.push(x);
    }
    let mut memo = std::collections::HashMap::new();
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len() / 2 + 1);
        for chunk in level.chunks(2) {
            match *chunk {
                [x, y] => {
                    let nt = *memo.entry((x, y)).or_insert_with(|| {
                        rules.push(vec![Item::Nt(x), Item::Nt(y)]);
                        Nt(rules.len() as u32 - 1)
                    });
                    next.push(nt);
                }
                [x] => next.push(x),
                _ => unreachable!(),
            }
        }
        level = next;
    }
    let top = level[0];
    Ok(Slp {
        rules,
        text: top,
        pattern: top,
        symbols: SymbolTable::with_input_letters(k),
    })
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Nt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.0)
    }
}

/// `a..z` for the first 26 letters, `<n>` beyond.
pub fn letters_to_string(s: &[Letter]) -> String {
    let mut out = String::with_capacity(s.len());
    for a in s {
        if a.0 < 26 {
            out.push((b'a' + a.0 as u8) as char);
        } else {
            out.push_str(&format!("<{}>", a.0));
        }
    }
    out
}

/// Inverse of [`letters_to_string`] for plain lowercase input.
pub fn letters_from_str(s: &str) -> Result<Vec<Letter>> {
    s.bytes()
        .map(|b| {
            if b.is_ascii_lowercase() {
                Ok(Letter((b - b'a') as u32))
            } else {
                Err(Error::Param(format!(
                    "raw strings use letters a-z only, got {:?}",
                    b as char
                )))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_fibonacci, gen_power};

    fn l(s: &str) -> Vec<Letter> {
        letters_from_str(s).unwrap()
    }

    #[test]
    fn fibonacci_eval_and_meta() {
        let slp = gen_fibonacci(5).unwrap();
        assert_eq!(letters_to_string(&eval_bounded(&slp, slp.text, 100).unwrap()), "abaab");
        let slp = gen_fibonacci(7).unwrap();
        let m = slp.meta()[slp.text.index()];
        assert_eq!(m.len, 13);
        assert_eq!(m.first, Some(Letter(0)));
        assert_eq!(m.last, Some(Letter(1)));
        assert_eq!(m.weight, 13);
    }

    #[test]
    fn empty_rule_evaluates_to_empty() {
        let slp = Slp::new(vec![vec![], vec![Item::Letter(Letter(0))]], Nt(1), Nt(0), SymbolTable::with_input_letters(1));
        assert!(eval_bounded(&slp, Nt(0), 10).unwrap().is_empty());
        assert_eq!(eval_bounded(&slp, Nt(7), 10), Err(Error::UnknownSymbol(7)));
    }

    #[test]
    fn huge_power_is_too_long() {
        let slp = gen_power(Letter(0), 1 << 40).unwrap();
        assert_eq!(
            eval_bounded(&slp, slp.text, 1_000_000),
            Err(Error::TooLong { len: 1 << 40, cap: 1_000_000 })
        );
    }

    #[test]
    fn terminal_rule_meta() {
        let slp = Slp::new(vec![vec![Item::Letter(Letter(3))]], Nt(0), Nt(0), SymbolTable::with_input_letters(4));
        let m = slp.meta()[0];
        assert_eq!((m.len, m.first, m.last), (1, Some(Letter(3)), Some(Letter(3))));
    }

    #[test]
    fn doubling_chain_saturates() {
        let mut rules = vec![vec![Item::Letter(Letter(0))]];
        for i in 0..70u32 {
            rules.push(vec![Item::Nt(Nt(i)), Item::Nt(Nt(i))]);
        }
        let slp = Slp::new(rules, Nt(70), Nt(70), SymbolTable::with_input_letters(1));
        let m = slp.meta()[70];
        assert_eq!(m.len, SAT_MAX);
        assert_eq!(m.first, Some(Letter(0)));
        assert_eq!(m.last, Some(Letter(0)));
    }

    #[test]
    fn renumber_compacts_sparse_ids() {
        let rules = vec![vec![
            Item::Letter(Letter(5)),
            Item::Letter(Letter(900)),
            Item::Letter(Letter(17)),
            Item::Letter(Letter(5)),
        ]];
        let slp = Slp::new(rules, Nt(0), Nt(0), SymbolTable::with_input_letters(901));
        let (out, map) = renumber_alphabet(&slp);
        assert_eq!(map[5], Some(Letter(0)));
        assert_eq!(map[17], Some(Letter(1)));
        assert_eq!(map[900], Some(Letter(2)));
        assert_eq!(
            eval_bounded(&out, Nt(0), 10).unwrap(),
            vec![Letter(0), Letter(2), Letter(1), Letter(0)]
        );
        assert_eq!(out.symbols.len(), 3);
    }

    #[test]
    fn renumber_is_identity_on_contiguous() {
        let slp = gen_fibonacci(9).unwrap();
        let (out, _) = renumber_alphabet(&slp);
        assert_eq!(out, slp);
    }

    #[test]
    fn balanced_round_trip() {
        let slp = from_text_balanced(&l("ab")).unwrap();
        assert_eq!(slp.rules.len(), 3);
        assert!(slp.is_cnf());
        for s in ["abab", "a", "abcabcabcx", "zzzzzzzzzzzzz"] {
            let slp = from_text_balanced(&l(s)).unwrap();
            assert_eq!(letters_to_string(&eval_bounded(&slp, slp.text, 1 << 20).unwrap()), s);
        }
        assert_eq!(from_text_balanced(&[]), Err(Error::EmptyText));
    }

    #[test]
    fn combine_keeps_pattern_unreferenced() {
        let t = gen_fibonacci(7).unwrap();
        let p = from_text_balanced(&l("aba")).unwrap();
        let slp = Slp::combine(&t, &p);
        assert!(crate::validate::validate(&slp).is_empty());
        assert_eq!(letters_to_string(&eval_bounded(&slp, slp.pattern, 10).unwrap()), "aba");
        assert_eq!(letters_to_string(&eval_bounded(&slp, slp.text, 20).unwrap()), "abaababaabaab");
    }
}
