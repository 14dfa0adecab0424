//! Fixing the first and last letter of the pattern at the start of a phase.
//!
//! After [`fix_ends_slp`] both end letters of the pattern are fresh, so no
//! later compression of the phase (which only touches letters older than
//! the phase) can act across an occurrence boundary. Occurrences before and
//! after are in one-to-one correspondence and keep their start positions,
//! measured in letter weights.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::recompress::{boundary_blocks, compress_covered, pop, remove_crossing_blocks};
use crate::slp::{compute_meta, sat_mul, Item, Letter, Nt, Slp, SymbolMeta};
use crate::blocklen::BlockLen;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// First and last letter differ and the pattern starts with a pair.
    DifferentPair,
    /// First and last letter differ and the pattern starts with a block.
    DifferentBlock,
    /// First and last letter coincide; marker letters are introduced.
    SameLetter,
    /// The pattern is a power of one letter.
    PatternIsPower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EndFixPlan {
    pub first: Letter,
    pub last: Letter,
    pub mode: Mode,
    /// Length of the leading block of `first`.
    pub lead: u64,
    /// Length of the trailing block of `last`.
    pub trail: u64,
}

/// Letter at 0-based position `i` of the value of `x`.
pub fn letter_at(slp: &Slp, meta: &[SymbolMeta], x: Nt, mut i: u64) -> Option<Letter> {
    let mut cur = x;
    'outer: loop {
        for it in &slp.rules[cur.index()] {
            let len = match *it {
                Item::Letter(_) => 1,
                Item::Run(_, l) => l.value(),
                Item::Nt(z) => meta[z.index()].len,
            };
            if i < len {
                match *it {
                    Item::Letter(a) | Item::Run(a, _) => return Some(a),
                    Item::Nt(z) => {
                        cur = z;
                        continue 'outer;
                    }
                }
            }
            i -= len;
        }
        return None;
    }
}

pub fn plan_endfix(slp: &Slp) -> Result<EndFixPlan> {
    let meta = compute_meta(slp);
    let pm = meta[slp.pattern.index()];
    if pm.len < 2 {
        return Err(Error::PatternTooShort);
    }
    let b = boundary_blocks(slp)[slp.pattern.index()].expect("non-empty pattern");
    let (first, last) = (b.lead.0, b.trail.0);
    let mode = if b.uniform {
        Mode::PatternIsPower
    } else if first == last {
        Mode::SameLetter
    } else if b.lead.1 >= 2 {
        Mode::DifferentBlock
    } else {
        Mode::DifferentPair
    };
    Ok(EndFixPlan {
        first,
        last,
        mode,
        lead: b.lead.1,
        trail: b.trail.1,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EndFixOutcome {
    /// Set in power mode: occurrences of this letter are the answer.
    pub hit: Option<Letter>,
    pub stripped_prefix: u64,
    pub stripped_suffix: u64,
    pub letters: usize,
    pub pairs: usize,
}

/// Weights of the letters introduced for a leading block of length `lead`
/// and a trailing block of length `trail` of letter weight `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MarkerWeights {
    pub left: u64,
    pub right: u64,
}

/// `a_L` carries the whole leading block, `a_R` nothing.
pub fn assign_marker_weights(w: u64, lead: u64) -> MarkerWeights {
    MarkerWeights {
        left: sat_mul(lead, w),
        right: 0,
    }
}

/// Weight of the letter standing for the rest of an `m`-block once the
/// start marker of a `lead`-block has been split off.
pub fn core_weight(w: u64, m: u64, lead: u64) -> u64 {
    if m > lead {
        sat_mul(m - lead, w)
    } else {
        sat_mul(m, w)
    }
}

/// Replaces every block item of `a` in every body by `f(length)`.
fn rewrite_blocks(slp: &mut Slp, a: Letter, f: &mut dyn FnMut(&mut Slp, u64) -> Vec<Item>) {
    for x in 0..slp.rules.len() {
        if !slp.rules[x].iter().any(|it| it.letter() == Some(a)) {
            continue;
        }
        let old = std::mem::take(&mut slp.rules[x]);
        let mut nb = Vec::with_capacity(old.len() + 2);
        for it in old {
            match it {
                Item::Letter(b) | Item::Run(b, _) if b == a => {
                    let m = it.block_len().unwrap().value();
                    nb.extend(f(slp, m));
                }
                other => nb.push(other),
            }
        }
        slp.rules[x] = nb;
    }
}

fn strip_front(slp: &mut Slp, a: Letter) -> u64 {
    let body = &mut slp.rules[slp.text.index()];
    if body.first() == Some(&Item::Letter(a)) {
        body.remove(0);
        slp.symbols.weight(a)
    } else {
        0
    }
}

fn strip_back(slp: &mut Slp, a: Letter) -> u64 {
    let body = &mut slp.rules[slp.text.index()];
    if body.last() == Some(&Item::Letter(a)) {
        body.pop();
        slp.symbols.weight(a)
    } else {
        0
    }
}

/// Pop and compress every pair `xy` accepted by `pred`, where `x` passes
/// `left` and `y` passes `right`.
fn pair_round(
    slp: &mut Slp,
    left: &dyn Fn(Letter) -> bool,
    right: &dyn Fn(Letter) -> bool,
) -> usize {
    pop(slp, left, right);
    compress_covered(slp, &|x, y| left(x) && right(y))
}

/// Runs the end fixing chosen by `plan`. Letters with ids `>= bound` count
/// as fresh.
pub fn fix_ends_slp(slp: &mut Slp, plan: &EndFixPlan, bound: u32) -> EndFixOutcome {
    let start = slp.symbols.len();
    let mut out = EndFixOutcome::default();
    let a = plan.first;
    let w = slp.symbols.weight(a);
    match plan.mode {
        Mode::PatternIsPower => {
            let lead = plan.lead;
            remove_crossing_blocks(slp, &|x| x == a, true);
            let h = slp.symbols.fresh(w);
            let tail = (lead > 1).then(|| slp.symbols.fresh(sat_mul(lead - 1, w)));
            rewrite_blocks(slp, a, &mut |_, m| {
                if m < lead {
                    return vec![Item::block(a, BlockLen::from_common(m))];
                }
                let mut v = vec![Item::block(h, BlockLen::from_common(m - lead + 1))];
                v.extend(tail.map(Item::Letter));
                v
            });
            out.hit = Some(h);
        }
        Mode::DifferentPair => {
            let b = letter_at(slp, &compute_meta(slp), slp.pattern, 1).unwrap();
            out.pairs += pair_round(slp, &|x| x == a, &|y| y == b);
            fix_end(slp, bound, &mut out);
        }
        Mode::DifferentBlock => {
            let lead = plan.lead;
            remove_crossing_blocks(slp, &|x| x == a, true);
            let marker = slp.symbols.fresh(sat_mul(lead, w));
            let mut core: HashMap<u64, Letter> = HashMap::new();
            rewrite_blocks(slp, a, &mut |s, m| {
                if m == lead {
                    return vec![Item::Letter(marker)];
                }
                let c = *core.entry(m).or_insert_with(|| s.symbols.fresh(core_weight(w, m, lead)));
                if m < lead {
                    vec![Item::Letter(c)]
                } else {
                    vec![Item::Letter(c), Item::Letter(marker)]
                }
            });
            out.stripped_suffix += strip_back(slp, marker);
            fix_end(slp, bound, &mut out);
        }
        Mode::SameLetter => {
            let (lead, trail) = (plan.lead, plan.trail);
            remove_crossing_blocks(slp, &|x| x == a, true);
            let mw = assign_marker_weights(w, lead);
            let al = slp.symbols.fresh(mw.left);
            let ar = slp.symbols.fresh(mw.right);
            let p = &mut slp.rules[slp.pattern.index()];
            let n = p.len();
            debug_assert!(n >= 2 && p[0].letter() == Some(a) && p[n - 1].letter() == Some(a));
            p[0] = Item::Letter(al);
            p[n - 1] = Item::Letter(ar);
            let mut core: HashMap<u64, Letter> = HashMap::new();
            let mut single: Option<Letter> = None;
            rewrite_blocks(slp, a, &mut |s, m| {
                let mut v = Vec::with_capacity(3);
                if m >= trail {
                    v.push(Item::Letter(ar));
                }
                if m != lead {
                    let c = *core.entry(m).or_insert_with(|| s.symbols.fresh(core_weight(w, m, lead)));
                    if m == 1 {
                        single = Some(c);
                    }
                    v.push(Item::Letter(c));
                }
                if m >= lead {
                    v.push(Item::Letter(al));
                }
                v
            });
            out.stripped_suffix += strip_back(slp, al);
            out.stripped_prefix += strip_front(slp, ar);
            out.pairs += pair_round(slp, &|x| x == al, &|y| y != al);
            out.pairs += pair_round(slp, &|x| x != ar, &|y| y == ar);
            if trail == 1 && lead > 1 {
                if let Some(c) = single {
                    out.pairs += pair_round(slp, &|x| x == c, &|y| y != c);
                }
            }
        }
    }
    out.letters = slp.symbols.len() - start;
    out
}

/// Fixes the last letter once the first one is fresh.
fn fix_end(slp: &mut Slp, bound: u32, out: &mut EndFixOutcome) {
    let meta = compute_meta(slp);
    let pm = meta[slp.pattern.index()];
    let last = pm.last.expect("non-empty pattern");
    if last.0 >= bound || pm.len < 2 {
        return;
    }
    let trail = boundary_blocks(slp)[slp.pattern.index()].unwrap().trail.1;
    if trail >= 2 {
        let w = slp.symbols.weight(last);
        remove_crossing_blocks(slp, &|x| x == last, true);
        let marker = slp.symbols.fresh(sat_mul(trail, w));
        let mut core: HashMap<u64, Letter> = HashMap::new();
        rewrite_blocks(slp, last, &mut |s, m| {
            if m == trail {
                return vec![Item::Letter(marker)];
            }
            let c = *core.entry(m).or_insert_with(|| s.symbols.fresh(core_weight(w, m, trail)));
            if m < trail {
                vec![Item::Letter(c)]
            } else {
                vec![Item::Letter(marker), Item::Letter(c)]
            }
        });
        out.stripped_prefix += strip_front(slp, marker);
    } else {
        let s = letter_at(slp, &meta, slp.pattern, pm.len - 2).unwrap();
        out.pairs += pair_round(slp, &|x| x == s, &|y| y == last);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slp::{eval_bounded, from_text_balanced, letters_from_str};

    fn instance(t: &str, p: &str) -> Slp {
        let t = from_text_balanced(&letters_from_str(t).unwrap()).unwrap();
        let p = from_text_balanced(&letters_from_str(p).unwrap()).unwrap();
        let mut s = Slp::combine(&t, &p);
        // both axioms unreferenced, as the driver arranges
        s.rules.push(s.rules[s.text.index()].clone());
        s.text = Nt(s.rules.len() as u32 - 1);
        s
    }

    fn plan(p: &str) -> EndFixPlan {
        plan_endfix(&instance("ab", p)).unwrap()
    }

    #[test]
    fn modes() {
        assert_eq!(plan("aab").mode, Mode::DifferentBlock);
        assert_eq!(plan("aab").lead, 2);
        let p = plan("bab");
        assert_eq!((p.mode, p.lead, p.trail), (Mode::SameLetter, 1, 1));
        assert_eq!(plan("aaaa").mode, Mode::PatternIsPower);
        assert_eq!(plan("abc").mode, Mode::DifferentPair);
        assert!(plan_endfix(&instance("ab", "a")).is_err());
    }

    #[test]
    fn marker_weights() {
        assert_eq!(assign_marker_weights(1, 2), MarkerWeights { left: 2, right: 0 });
        assert_eq!(core_weight(1, 5, 2), 3);
        assert_eq!(core_weight(3, 1, 2), 3);
    }

    #[test]
    fn letter_at_descends() {
        let s = instance("abaababaabaab", "ab");
        let m = compute_meta(&s);
        let t = eval_bounded(&s, s.text, 100).unwrap();
        for (i, &c) in t.iter().enumerate() {
            assert_eq!(letter_at(&s, &m, s.text, i as u64), Some(c));
        }
        assert_eq!(letter_at(&s, &m, s.text, 13), None);
    }

    fn fixed(t: &str, p: &str) -> (Slp, EndFixOutcome) {
        let mut s = instance(t, p);
        let bound = s.symbols.len() as u32;
        let plan = plan_endfix(&s).unwrap();
        let out = fix_ends_slp(&mut s, &plan, bound);
        (s, out)
    }

    fn ends_fresh(s: &Slp, bound: u32) -> bool {
        let m = compute_meta(s)[s.pattern.index()];
        m.first.unwrap().0 >= bound && m.last.unwrap().0 >= bound
    }

    #[test]
    fn aab_in_aaab() {
        let (s, out) = fixed("aaab", "aab");
        assert!(ends_fresh(&s, 2));
        let p = eval_bounded(&s, s.pattern, 10).unwrap();
        let t = eval_bounded(&s, s.text, 10).unwrap();
        assert_eq!(p.len(), 1);
        // a_3 then a_2 b compressed into the pattern letter
        assert_eq!(t.len(), 2);
        assert_eq!(t[1], p[0]);
        assert_eq!(s.symbols.weight(t[0]), 1);
        assert_eq!(out.stripped_prefix, 0);
    }

    #[test]
    fn bab_in_ababa() {
        let (s, _) = fixed("ababa", "bab");
        assert!(ends_fresh(&s, 2));
        let p = eval_bounded(&s, s.pattern, 10).unwrap();
        let t = eval_bounded(&s, s.text, 10).unwrap();
        assert_eq!(p.len(), 1);
        let hits: Vec<usize> = t.iter().enumerate().filter(|(_, &c)| c == p[0]).map(|(i, _)| i).collect();
        assert_eq!(hits.len(), 1);
        let before: u64 = t[..hits[0]].iter().map(|&c| s.symbols.weight(c)).sum();
        assert_eq!(before + 1, 2);
    }

    #[test]
    fn power_pattern() {
        let (s, out) = fixed("aaaaa", "aa");
        let h = out.hit.unwrap();
        let t = eval_bounded(&s, s.text, 10).unwrap();
        assert_eq!(t.iter().filter(|&&c| c == h).count(), 4);
    }
}
