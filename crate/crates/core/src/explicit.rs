//! Recompression on explicit letter sequences.
//!
//! These are the plain-string versions of the grammar algorithms: equality
//! testing by phases of block and pair compression, and pattern matching
//! with the pattern ends fixed at the start of every phase. They serve as
//! mid-scale references for the grammar versions.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::slp::{sat_add, sat_mul, Letter, SymbolTable};

/// Replaces each occurrence of `ab`, scanning left to right, by `c`.
pub fn pair_compress_explicit(s: &[Letter], a: Letter, b: Letter, c: Letter) -> Result<Vec<Letter>> {
    if a == b {
        return Err(Error::Param("pair compression needs two different letters".into()));
    }
    if s.contains(&c) {
        return Err(Error::Param(format!("letter {c} is not fresh")));
    }
    let mut out = Vec::with_capacity(s.len());
    let mut i = 0;
    while i < s.len() {
        if s[i] == a && s.get(i + 1) == Some(&b) {
            out.push(c);
            i += 2;
        } else {
            out.push(s[i]);
            i += 1;
        }
    }
    Ok(out)
}

/// Maximal blocks as `(letter, start, length)`.
pub fn blocks(s: &[Letter]) -> Vec<(Letter, usize, usize)> {
    let mut out: Vec<(Letter, usize, usize)> = Vec::new();
    for (i, &a) in s.iter().enumerate() {
        match out.last_mut() {
            Some(b) if b.0 == a => b.2 += 1,
            _ => out.push((a, i, 1)),
        }
    }
    out
}

/// Replaces every maximal block `a^m` with `m > 1` by a letter named in
/// `names`; blocks of equal length share the letter.
pub fn block_compress_explicit(
    s: &[Letter],
    a: Letter,
    symbols: &mut SymbolTable,
    names: &mut HashMap<u64, Letter>,
) -> Vec<Letter> {
    let w = symbols.weight(a);
    let mut out = Vec::with_capacity(s.len());
    for (b, start, len) in blocks(s) {
        if b == a && len > 1 {
            let m = len as u64;
            out.push(*names.entry(m).or_insert_with(|| symbols.fresh(sat_mul(m, w))));
        } else {
            out.extend_from_slice(&s[start..start + len]);
        }
    }
    out
}

/// Pattern, text and the weights of their letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitInstance {
    pub pattern: Vec<Letter>,
    pub text: Vec<Letter>,
    pub symbols: SymbolTable,
    /// Weight of letters removed from the front of the text.
    pub stripped_prefix: u64,
}

impl ExplicitInstance {
    pub fn new(pattern: &[Letter], text: &[Letter]) -> Self {
        let k = pattern.iter().chain(text).map(|a| a.index() + 1).max().unwrap_or(0);
        ExplicitInstance {
            pattern: pattern.to_vec(),
            text: text.to_vec(),
            symbols: SymbolTable::with_input_letters(k),
            stripped_prefix: 0,
        }
    }

    /// Maps the occurring letters onto `0..k` keeping their order.
    pub fn renumber(&mut self) {
        let mut strings = [std::mem::take(&mut self.pattern), std::mem::take(&mut self.text)];
        self.symbols = renumber(&mut strings, &self.symbols);
        let [p, t] = strings;
        self.pattern = p;
        self.text = t;
    }

    fn weight_of(&self, s: &[Letter]) -> u64 {
        s.iter().fold(0, |acc, &a| sat_add(acc, self.symbols.weight(a)))
    }
}

fn renumber(strings: &mut [Vec<Letter>], symbols: &SymbolTable) -> SymbolTable {
    let mut used = vec![false; symbols.len()];
    for a in strings.iter().flatten() {
        used[a.index()] = true;
    }
    let mut map = vec![Letter(0); symbols.len()];
    let mut weights = Vec::new();
    for (i, &u) in used.iter().enumerate() {
        if u {
            map[i] = Letter(weights.len() as u32);
            weights.push(symbols.weights()[i]);
        }
    }
    for a in strings.iter_mut().flatten() {
        *a = map[a.index()];
    }
    SymbolTable::from_weights(weights)
}

/// One phase on all `strings`: block compression, then every pair of
/// letters older than `bound`, one pair at a time in sorted order. Returns
/// the number of fresh letters.
pub fn compress_phase(strings: &mut [Vec<Letter>], symbols: &mut SymbolTable, bound: u32) -> usize {
    let start = symbols.len();
    let old = |a: Letter| a.0 < bound;
    let mut names: HashMap<(Letter, usize), Letter> = HashMap::new();
    for s in strings.iter_mut() {
        let mut out = Vec::with_capacity(s.len());
        for (a, st, len) in blocks(s) {
            if len > 1 && old(a) {
                let c = *names
                    .entry((a, len))
                    .or_insert_with(|| symbols.fresh(sat_mul(len as u64, symbols.weight(a))));
                out.push(c);
            } else {
                out.extend_from_slice(&s[st..st + len]);
            }
        }
        *s = out;
    }
    let mut occ: Vec<(Letter, Letter, usize, usize)> = Vec::new();
    for (k, s) in strings.iter().enumerate() {
        for (i, w) in s.windows(2).enumerate() {
            if w[0] != w[1] && old(w[0]) && old(w[1]) {
                occ.push((w[0], w[1], k, i));
            }
        }
    }
    occ.sort_unstable();
    let mut slots: Vec<Vec<Option<Letter>>> = strings.iter().map(|s| s.iter().copied().map(Some).collect()).collect();
    let mut i = 0;
    while i < occ.len() {
        let (a, b) = (occ[i].0, occ[i].1);
        let mut c = None;
        while i < occ.len() && (occ[i].0, occ[i].1) == (a, b) {
            let (k, p) = (occ[i].2, occ[i].3);
            if slots[k][p] == Some(a) && slots[k][p + 1] == Some(b) {
                let c = *c.get_or_insert_with(|| symbols.fresh(sat_add(symbols.weight(a), symbols.weight(b))));
                slots[k][p] = Some(c);
                slots[k][p + 1] = None;
            }
            i += 1;
        }
    }
    for (s, sl) in strings.iter_mut().zip(slots) {
        *s = sl.into_iter().flatten().collect();
    }
    symbols.len() - start
}

/// Equality of two strings by recompression.
pub fn set_equal(p: &[Letter], t: &[Letter]) -> bool {
    let k = p.iter().chain(t).map(|a| a.index() + 1).max().unwrap_or(0);
    let mut symbols = SymbolTable::with_input_letters(k);
    let mut strings = [p.to_vec(), t.to_vec()];
    loop {
        if strings[0].len() != strings[1].len() {
            return false;
        }
        if strings[0].len() <= 1 {
            return strings[0] == strings[1];
        }
        symbols = renumber(&mut strings, &symbols);
        let bound = symbols.len() as u32;
        compress_phase(&mut strings, &mut symbols, bound);
    }
}

/// What fixing the ends did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fixed {
    /// Both pattern ends are fresh now.
    Ends,
    /// The pattern was a power of one letter; these are all positions.
    Done(Vec<u64>),
}

fn rewrite(s: &mut Vec<Letter>, a: Letter, f: &mut dyn FnMut(&mut SymbolTable, u64) -> Vec<Letter>, symbols: &mut SymbolTable) {
    let mut out = Vec::with_capacity(s.len());
    for (b, st, len) in blocks(s) {
        if b == a {
            out.extend(f(symbols, len as u64));
        } else {
            out.extend_from_slice(&s[st..st + len]);
        }
    }
    *s = out;
}

/// Compresses every adjacent `xy` with `left(x)` and `right(y)`, left to
/// right, one fresh letter per distinct pair.
fn pair_round(inst: &mut ExplicitInstance, left: &dyn Fn(Letter) -> bool, right: &dyn Fn(Letter) -> bool) {
    let mut names: HashMap<(Letter, Letter), Letter> = HashMap::new();
    for s in [&mut inst.pattern, &mut inst.text] {
        let mut out = Vec::with_capacity(s.len());
        let mut i = 0;
        while i < s.len() {
            if i + 1 < s.len() && s[i] != s[i + 1] && left(s[i]) && right(s[i + 1]) {
                let (x, y) = (s[i], s[i + 1]);
                let symbols = &mut inst.symbols;
                out.push(*names.entry((x, y)).or_insert_with(|| {
                    let w = sat_add(symbols.weight(x), symbols.weight(y));
                    symbols.fresh(w)
                }));
                i += 2;
            } else {
                out.push(s[i]);
                i += 1;
            }
        }
        *s = out;
    }
}

fn split_table(
    inst: &mut ExplicitInstance,
    a: Letter,
    key: u64,
    marker_last: bool,
) -> Letter {
    let w = inst.symbols.weight(a);
    let marker = inst.symbols.fresh(sat_mul(key, w));
    let mut core: HashMap<u64, Letter> = HashMap::new();
    let mut f = |s: &mut SymbolTable, m: u64| -> Vec<Letter> {
        if m == key {
            return vec![marker];
        }
        let c = *core
            .entry(m)
            .or_insert_with(|| s.fresh(sat_mul(if m > key { m - key } else { m }, w)));
        match (m > key, marker_last) {
            (false, _) => vec![c],
            (true, true) => vec![c, marker],
            (true, false) => vec![marker, c],
        }
    };
    rewrite(&mut inst.pattern, a, &mut f, &mut inst.symbols);
    rewrite(&mut inst.text, a, &mut f, &mut inst.symbols);
    marker
}

/// Fixes only the first pattern letter (letters `>= bound` are fresh).
pub fn fix_beginning_explicit(inst: &mut ExplicitInstance, bound: u32) -> Result<Fixed> {
    fix(inst, bound, false)
}

/// Fixes the first and the last pattern letter.
pub fn fix_ends_explicit(inst: &mut ExplicitInstance, bound: u32) -> Result<Fixed> {
    fix(inst, bound, true)
}

fn fix(inst: &mut ExplicitInstance, bound: u32, both: bool) -> Result<Fixed> {
    if inst.pattern.len() < 2 {
        return Err(Error::PatternTooShort);
    }
    let pb = blocks(&inst.pattern);
    let (a, _, lead) = pb[0];
    let (last, _, trail) = pb[pb.len() - 1];
    let (lead, trail) = (lead as u64, trail as u64);
    if pb.len() == 1 {
        let w = inst.symbols.weight(a);
        let mut out = Vec::new();
        let mut off = inst.stripped_prefix;
        for (b, st, len) in blocks(&inst.text) {
            if b == a && len as u64 >= lead {
                for j in 0..=(len as u64 - lead) {
                    out.push(sat_add(sat_add(off, sat_mul(j, w)), 1));
                }
            }
            off = sat_add(off, inst.weight_of(&inst.text[st..st + len]));
        }
        return Ok(Fixed::Done(out));
    }
    if a == last {
        let w = inst.symbols.weight(a);
        let al = inst.symbols.fresh(sat_mul(lead, w));
        let ar = inst.symbols.fresh(0);
        let mut core: HashMap<u64, Letter> = HashMap::new();
        let mut single = None;
        let mut f = |s: &mut SymbolTable, m: u64| -> Vec<Letter> {
            let mut v = Vec::with_capacity(3);
            if m >= trail {
                v.push(ar);
            }
            if m != lead {
                let c = *core
                    .entry(m)
                    .or_insert_with(|| s.fresh(sat_mul(if m > lead { m - lead } else { m }, w)));
                if m == 1 {
                    single = Some(c);
                }
                v.push(c);
            }
            if m >= lead {
                v.push(al);
            }
            v
        };
        let p = &inst.pattern;
        let (l, r) = (lead as usize, trail as usize);
        let mut mid = p[l..p.len() - r].to_vec();
        rewrite(&mut mid, a, &mut f, &mut inst.symbols);
        inst.pattern = std::iter::once(al).chain(mid).chain(std::iter::once(ar)).collect();
        rewrite(&mut inst.text, a, &mut f, &mut inst.symbols);
        if inst.text.last() == Some(&al) {
            inst.text.pop();
        }
        if inst.text.first() == Some(&ar) {
            inst.text.remove(0);
        }
        pair_round(inst, &|x| x == al, &|y| y != al);
        pair_round(inst, &|x| x != ar, &|y| y == ar);
        if trail == 1 && lead > 1 {
            if let Some(c) = single {
                pair_round(inst, &|x| x == c, &|y| y != c);
            }
        }
        return Ok(Fixed::Ends);
    }
    if lead == 1 {
        let b = inst.pattern[1];
        pair_round(inst, &|x| x == a, &|y| y == b);
    } else {
        let marker = split_table(inst, a, lead, true);
        if inst.text.last() == Some(&marker) {
            inst.text.pop();
        }
    }
    if !both {
        return Ok(Fixed::Ends);
    }
    let n = inst.pattern.len();
    let last = inst.pattern[n - 1];
    if last.0 >= bound || n < 2 {
        return Ok(Fixed::Ends);
    }
    let trail = blocks(&inst.pattern).last().unwrap().2 as u64;
    if trail >= 2 {
        let marker = split_table(inst, last, trail, false);
        if inst.text.first() == Some(&marker) {
            inst.text.remove(0);
            inst.stripped_prefix = sat_add(inst.stripped_prefix, inst.symbols.weight(marker));
        }
    } else {
        let s = inst.pattern[n - 2];
        pair_round(inst, &|x| x == s, &|y| y == last);
    }
    Ok(Fixed::Ends)
}

/// Per-phase lengths of an [`spm_match`] run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpmTrace {
    pub pattern_lens: Vec<usize>,
    pub text_lens: Vec<usize>,
    /// Whether after some phase two letters older than the phase stood
    /// next to each other in the text or the pattern.
    pub adjacent_survivors: bool,
}

/// 1-based start positions of `p` in `t`.
pub fn spm_match(p: &[Letter], t: &[Letter]) -> Vec<u64> {
    spm_match_traced(p, t).0
}

pub fn spm_match_traced(p: &[Letter], t: &[Letter]) -> (Vec<u64>, SpmTrace) {
    let mut trace = SpmTrace::default();
    if p.is_empty() {
        return (Vec::new(), trace);
    }
    let mut inst = ExplicitInstance::new(p, t);
    loop {
        inst.renumber();
        trace.pattern_lens.push(inst.pattern.len());
        trace.text_lens.push(inst.text.len());
        if inst.pattern.len() > inst.text.len() {
            return (Vec::new(), trace);
        }
        if inst.pattern.len() == 1 {
            let hit = inst.pattern[0];
            let mut out = Vec::new();
            let mut off = inst.stripped_prefix;
            for &c in &inst.text {
                if c == hit {
                    out.push(sat_add(off, 1));
                }
                off = sat_add(off, inst.symbols.weight(c));
            }
            return (out, trace);
        }
        let bound = inst.symbols.len() as u32;
        if let Fixed::Done(v) = fix_ends_explicit(&mut inst, bound).expect("pattern of length >= 2") {
            return (v, trace);
        }
        let mut strings = [std::mem::take(&mut inst.pattern), std::mem::take(&mut inst.text)];
        compress_phase(&mut strings, &mut inst.symbols, bound);
        let survivors = strings
            .iter()
            .any(|s| s.windows(2).any(|w| w[0].0 < bound && w[1].0 < bound));
        trace.adjacent_survivors |= survivors;
        let [p, t] = strings;
        inst.pattern = p;
        inst.text = t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slp::{letters_from_str, letters_to_string};
    use proptest::prelude::*;

    fn l(s: &str) -> Vec<Letter> {
        letters_from_str(s).unwrap()
    }

    #[test]
    fn pair_compress_examples() {
        let c = Letter(2);
        assert_eq!(letters_to_string(&pair_compress_explicit(&l("ababa"), Letter(0), Letter(1), c).unwrap()), "cca");
        assert_eq!(letters_to_string(&pair_compress_explicit(&l("baba"), Letter(0), Letter(1), c).unwrap()), "bca");
        assert_eq!(pair_compress_explicit(&l("bbb"), Letter(0), Letter(1), c).unwrap(), l("bbb"));
        assert!(pair_compress_explicit(&l("ab"), Letter(0), Letter(0), c).is_err());
        assert!(pair_compress_explicit(&l("abc"), Letter(0), Letter(1), c).is_err());
    }

    #[test]
    fn block_compress_examples() {
        let mut sym = SymbolTable::with_input_letters(2);
        let mut names = HashMap::new();
        let out = block_compress_explicit(&l("aaab"), Letter(0), &mut sym, &mut names);
        assert_eq!(out, vec![Letter(2), Letter(1)]);
        assert_eq!(sym.weight(Letter(2)), 3);
        assert_eq!(block_compress_explicit(&l("ab"), Letter(0), &mut sym, &mut names), l("ab"));
        let mut names = HashMap::new();
        let out = block_compress_explicit(&l("aabaa"), Letter(0), &mut sym, &mut names);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0], out[2]);
    }

    #[test]
    fn set_equal_examples() {
        assert!(set_equal(&l("abab"), &l("abab")));
        assert!(!set_equal(&l("ab"), &l("ba")));
        assert!(set_equal(&l("a"), &l("a")));
        assert!(!set_equal(&l("aaaa"), &l("aaa")));
    }

    #[test]
    fn spm_examples() {
        assert_eq!(spm_match(&l("baba"), &l("ababa")), vec![2]);
        assert_eq!(spm_match(&l("aab"), &l("aaab")), vec![2]);
        assert_eq!(spm_match(&l("bab"), &l("ababa")), vec![2]);
        assert_eq!(spm_match(&l("abc"), &l("abc")), vec![1]);
        assert_eq!(spm_match(&l("aa"), &l("aaaaa")), vec![1, 2, 3, 4]);
    }

    #[test]
    fn beginning_fix_example() {
        let mut inst = ExplicitInstance::new(&l("aab"), &l("aaab"));
        fix_beginning_explicit(&mut inst, 2).unwrap();
        // a_3 a_2 b and a_2 b
        assert_eq!(inst.text.len(), 3);
        assert_eq!(inst.pattern, inst.text[1..].to_vec());
        assert_eq!(inst.symbols.weight(inst.pattern[0]), 2);
        assert_eq!(inst.symbols.weight(inst.text[0]), 1);
    }

    #[test]
    fn same_letter_path() {
        let mut inst = ExplicitInstance::new(&l("bab"), &l("ababa"));
        assert_eq!(fix_ends_explicit(&mut inst, 2).unwrap(), Fixed::Ends);
        assert!(inst.pattern.iter().all(|a| a.0 >= 2));
    }

    fn naive(p: &[Letter], t: &[Letter]) -> Vec<u64> {
        if p.len() > t.len() {
            return Vec::new();
        }
        (0..=t.len() - p.len()).filter(|&i| &t[i..i + p.len()] == p).map(|i| i as u64 + 1).collect()
    }

    fn word(max: usize, k: u32) -> impl Strategy<Value = Vec<Letter>> {
        proptest::collection::vec((0..k).prop_map(Letter), 1..max)
    }

    proptest! {
        #[test]
        fn spm_equals_naive(t in word(200, 3), p in word(8, 3)) {
            let (got, tr) = spm_match_traced(&p, &t);
            prop_assert_eq!(got, naive(&p, &t));
            prop_assert!(!tr.adjacent_survivors);
        }

        #[test]
        fn spm_finds_cut_patterns(t in word(300, 2), a in 0usize..300, len in 1usize..30) {
            let a = a % t.len();
            let b = (a + len).min(t.len());
            let p = t[a..b].to_vec();
            prop_assert_eq!(spm_match(&p, &t), naive(&p, &t));
        }

        #[test]
        fn set_equal_agrees(s in word(300, 3), flip in 0usize..300, same in any::<bool>()) {
            let mut t = s.clone();
            if !same {
                let i = flip % t.len();
                t[i] = Letter((t[i].0 + 1) % 3);
            }
            prop_assert_eq!(set_equal(&s, &t), s == t);
        }

        #[test]
        fn phase_shrinks(s in word(400, 4)) {
            let mut strings = [s.clone()];
            let k = s.iter().map(|a| a.index() + 1).max().unwrap();
            let mut sym = SymbolTable::with_input_letters(k);
            compress_phase(&mut strings, &mut sym, k as u32);
            let n = s.len();
            if n > 1 {
                prop_assert!(3 * strings[0].len() <= 2 * n + 1);
            }
            prop_assert!(strings[0].windows(2).all(|w| w[0].0 >= k as u32 || w[1].0 >= k as u32));
        }
    }
}
