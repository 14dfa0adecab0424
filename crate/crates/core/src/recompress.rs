//! Grammar-level recompression steps.
//!
//! All operations rewrite an [`Slp`] in place and keep the values of both
//! axioms unchanged up to the introduced letters. Nonterminals other than
//! the axioms may lose boundary letters (`pop`, `remove_crossing_blocks`);
//! the popped letters are written explicitly next to every reference. The
//! axioms are assumed to be referenced by no rule.

use std::collections::{HashMap, HashSet};

use crate::blocklen::{sort_block_lengths, BlockCounters, BlockLen};
use crate::radix;
use crate::slp::{compute_meta, sat_add, sat_mul, Item, Letter, Nt, Slp, SymbolMeta};

/// A pair of letter sets. Letters in neither set take no part.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    pub left: Vec<bool>,
    pub right: Vec<bool>,
}

impl Partition {
    pub fn new(alphabet: usize) -> Self {
        Partition {
            left: vec![false; alphabet],
            right: vec![false; alphabet],
        }
    }

    pub fn in_left(&self, a: Letter) -> bool {
        self.left.get(a.index()).copied().unwrap_or(false)
    }

    pub fn in_right(&self, a: Letter) -> bool {
        self.right.get(a.index()).copied().unwrap_or(false)
    }

    /// Whether `ab` lies in left·right.
    pub fn covers(&self, a: Letter, b: Letter) -> bool {
        self.in_left(a) && self.in_right(b)
    }

    pub fn swapped(&self) -> Partition {
        Partition {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        !self.left.iter().any(|&x| x) || !self.right.iter().any(|&x| x)
    }
}

/// One adjacency `ab` found in a rule body.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairRecord {
    pub a: Letter,
    pub b: Letter,
    pub crossing: bool,
    /// Rule and index of the left item, for explicit letter-letter pairs.
    pub at: Option<(Nt, u32)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairScan {
    /// Records of pairs with no crossing occurrence, sorted by `(a, b)`.
    pub noncrossing: Vec<PairRecord>,
    /// Distinct crossing pairs, sorted.
    pub crossing: Vec<(Letter, Letter)>,
    /// Non-crossing pairs that touch a run item somewhere; left untouched by
    /// [`compress_noncrossing`].
    pub blocked: Vec<(Letter, Letter)>,
    /// Letters with a crossing block, sorted.
    pub crossing_blocks: Vec<Letter>,
}

#[inline]
pub(crate) fn first_of(item: &Item, meta: &[SymbolMeta]) -> Option<Letter> {
    match *item {
        Item::Letter(a) | Item::Run(a, _) => Some(a),
        Item::Nt(x) => meta[x.index()].first,
    }
}

#[inline]
pub(crate) fn last_of(item: &Item, meta: &[SymbolMeta]) -> Option<Letter> {
    match *item {
        Item::Letter(a) | Item::Run(a, _) => Some(a),
        Item::Nt(x) => meta[x.index()].last,
    }
}

#[inline]
fn run_len(item: &Item) -> Option<(Letter, BlockLen)> {
    match *item {
        Item::Letter(a) => Some((a, BlockLen::explicit(1))),
        Item::Run(a, l) => Some((a, l)),
        Item::Nt(_) => None,
    }
}

/// Lists every two-letter adjacency `ab` (`a != b`, `filter(a, b)`) of the
/// bodies and classifies the pairs. A pair is crossing when some body puts
/// it across a nonterminal boundary.
pub fn scan_pairs(slp: &Slp, meta: &[SymbolMeta], filter: &dyn Fn(Letter, Letter) -> bool) -> PairScan {
    let mut recs: Vec<(PairRecord, u64)> = Vec::new();
    let mut blocks = Vec::new();
    for (r, body) in slp.rules.iter().enumerate() {
        for (i, w) in body.windows(2).enumerate() {
            let (u, v) = (&w[0], &w[1]);
            let (Some(x), Some(y)) = (last_of(u, meta), first_of(v, meta)) else {
                continue;
            };
            let touches_nt = matches!(u, Item::Nt(_)) || matches!(v, Item::Nt(_));
            if x == y {
                if touches_nt {
                    blocks.push(x);
                }
                continue;
            }
            if !filter(x, y) {
                continue;
            }
            let both_letters = matches!(u, Item::Letter(_)) && matches!(v, Item::Letter(_));
            let (rec, rank) = if touches_nt {
                (PairRecord { a: x, b: y, crossing: true, at: None }, 0)
            } else if both_letters {
                (
                    PairRecord {
                        a: x,
                        b: y,
                        crossing: false,
                        at: Some((Nt(r as u32), i as u32)),
                    },
                    2,
                )
            } else {
                (PairRecord { a: x, b: y, crossing: false, at: None }, 1)
            };
            recs.push((rec, rank));
        }
    }
    radix::sort_by_key(&mut recs, |r| r.1);
    radix::sort_by_key(&mut recs, |r| r.0.b.0 as u64);
    radix::sort_by_key(&mut recs, |r| r.0.a.0 as u64);
    let mut out = PairScan::default();
    let mut i = 0;
    while i < recs.len() {
        let (a, b) = (recs[i].0.a, recs[i].0.b);
        let mut j = i;
        while j < recs.len() && recs[j].0.a == a && recs[j].0.b == b {
            j += 1;
        }
        match recs[i].1 {
            0 => out.crossing.push((a, b)),
            1 => out.blocked.push((a, b)),
            _ => out.noncrossing.extend(recs[i..j].iter().map(|r| r.0)),
        }
        i = j;
    }
    blocks.sort_unstable();
    blocks.dedup();
    out.crossing_blocks = blocks;
    out
}

/// Compresses the listed non-crossing pairs one pair at a time, in list
/// order. Occurrences consumed by an earlier pair are skipped. Returns the
/// number of pairs that received a letter.
pub fn compress_noncrossing(slp: &mut Slp, records: &[PairRecord]) -> usize {
    let mut bodies: Vec<Vec<Option<Item>>> = slp
        .rules
        .iter()
        .map(|b| b.iter().copied().map(Some).collect())
        .collect();
    let mut made = 0;
    let mut i = 0;
    while i < records.len() {
        let (a, b) = (records[i].a, records[i].b);
        let mut c: Option<Letter> = None;
        while i < records.len() && records[i].a == a && records[i].b == b {
            if let Some((r, p)) = records[i].at {
                let body = &mut bodies[r.index()];
                let p = p as usize;
                if body[p] == Some(Item::Letter(a)) && body.get(p + 1) == Some(&Some(Item::Letter(b))) {
                    let c = *c.get_or_insert_with(|| {
                        made += 1;
                        let w = sat_add(slp.symbols.weight(a), slp.symbols.weight(b));
                        slp.symbols.fresh(w)
                    });
                    body[p] = Some(Item::Letter(c));
                    body[p + 1] = None;
                }
            }
            i += 1;
        }
    }
    for (dst, src) in slp.rules.iter_mut().zip(bodies) {
        *dst = src.into_iter().flatten().collect();
    }
    made
}

fn pop_front_letter(body: &mut Vec<Item>) -> Option<Letter> {
    match *body.first()? {
        Item::Letter(a) => {
            body.remove(0);
            Some(a)
        }
        Item::Run(a, len) => {
            body[0] = Item::block(a, len.minus_one().expect("run of length >= 2"));
            Some(a)
        }
        Item::Nt(_) => None,
    }
}

fn pop_back_letter(body: &mut Vec<Item>) -> Option<Letter> {
    let last = body.len().checked_sub(1)?;
    match body[last] {
        Item::Letter(a) => {
            body.pop();
            Some(a)
        }
        Item::Run(a, len) => {
            body[last] = Item::block(a, len.minus_one().expect("run of length >= 2"));
            Some(a)
        }
        Item::Nt(_) => None,
    }
}

/// Uncrossing: afterwards no pair in left·right has a crossing occurrence.
/// A nonterminal loses its first (last) letter only where some body places
/// a left (right) letter in front of (behind) it, so at most two letters
/// are popped per nonterminal. Emptied nonterminals vanish from bodies.
/// Returns the number of popped letters.
pub fn pop(slp: &mut Slp, in_left: &dyn Fn(Letter) -> bool, in_right: &dyn Fn(Letter) -> bool) -> usize {
    let meta = compute_meta(slp);
    let r = slp.rules.len();
    let mut need_l = vec![false; r];
    let mut need_r = vec![false; r];
    for body in &slp.rules {
        for w in body.windows(2) {
            let (u, v) = (&w[0], &w[1]);
            if !matches!(u, Item::Nt(_)) && !matches!(v, Item::Nt(_)) {
                continue;
            }
            let (Some(x), Some(y)) = (last_of(u, &meta), first_of(v, &meta)) else {
                continue;
            };
            if in_left(x) && in_right(y) {
                if let Item::Nt(z) = *u {
                    need_r[z.index()] = true;
                }
                if let Item::Nt(z) = *v {
                    need_l[z.index()] = true;
                }
            }
        }
    }
    for x in (0..r).rev() {
        let body = &slp.rules[x];
        if need_l[x] {
            if let Some(Item::Nt(z)) = body.first() {
                need_l[z.index()] = true;
            }
        }
        if need_r[x] {
            if let Some(Item::Nt(z)) = body.last() {
                need_r[z.index()] = true;
            }
        }
    }
    let mut lp: Vec<Option<Letter>> = vec![None; r];
    let mut rp: Vec<Option<Letter>> = vec![None; r];
    let mut empty = vec![false; r];
    let mut popped = 0;
    for x in 0..r {
        let old = std::mem::take(&mut slp.rules[x]);
        let mut nb = Vec::with_capacity(old.len() + 2);
        for it in old {
            match it {
                Item::Nt(z) => {
                    let z = z.index();
                    nb.extend(lp[z].map(Item::Letter));
                    if !empty[z] {
                        nb.push(it);
                    }
                    nb.extend(rp[z].map(Item::Letter));
                }
                other => nb.push(other),
            }
        }
        let is_axiom = x == slp.text.index() || x == slp.pattern.index();
        if !is_axiom {
            if need_l[x] {
                lp[x] = pop_front_letter(&mut nb);
                popped += lp[x].is_some() as usize;
            }
            if need_r[x] {
                rp[x] = pop_back_letter(&mut nb);
                popped += rp[x].is_some() as usize;
            }
        }
        empty[x] = nb.is_empty();
        slp.rules[x] = nb;
    }
    popped
}

/// [`pop`] with the sets of a [`Partition`].
pub fn pop_partition(slp: &mut Slp, part: &Partition) -> usize {
    pop(slp, &|a| part.in_left(a), &|a| part.in_right(a))
}

/// Replaces every explicit adjacency `xy` with `pred(x, y)` by a fresh
/// letter, scanning each body left to right; one letter per distinct pair.
/// Runs give up one letter at the compressed end. Returns the number of
/// distinct pairs compressed.
pub fn compress_covered(slp: &mut Slp, pred: &dyn Fn(Letter, Letter) -> bool) -> usize {
    let mut fresh: HashMap<(Letter, Letter), Letter> = HashMap::new();
    for x in 0..slp.rules.len() {
        let old = std::mem::take(&mut slp.rules[x]);
        let mut out: Vec<Item> = Vec::with_capacity(old.len());
        let mut last_fresh = false;
        for it in old {
            if let (Some(y), Some(prev)) = (it.letter(), out.last().copied()) {
                if let Some(px) = prev.letter() {
                    if !last_fresh && px != y && pred(px, y) {
                        out.pop();
                        if let Item::Run(_, len) = prev {
                            out.push(Item::block(px, len.minus_one().expect("run of length >= 2")));
                        }
                        let symbols = &mut slp.symbols;
                        let c = *fresh.entry((px, y)).or_insert_with(|| {
                            let w = sat_add(symbols.weight(px), symbols.weight(y));
                            symbols.fresh(w)
                        });
                        out.push(Item::Letter(c));
                        last_fresh = true;
                        if let Item::Run(_, len) = it {
                            out.push(Item::block(y, len.minus_one().expect("run of length >= 2")));
                            last_fresh = false;
                        }
                        continue;
                    }
                }
            }
            out.push(it);
            last_fresh = false;
        }
        slp.rules[x] = out;
    }
    fresh.len()
}

/// The binary-expansion schedule for crossing pairs: the pair `ab` belongs
/// to the group of the lowest bit in which `a` and `b` differ, oriented by
/// `a`'s bit. Returns, in group order, the partition of the letters passing
/// `old` by that bit and the pairs of the group. Empty groups are skipped.
pub fn binary_schedule(
    crossing: &[(Letter, Letter)],
    alphabet: usize,
    old: &dyn Fn(Letter) -> bool,
) -> Vec<(Partition, HashSet<(Letter, Letter)>)> {
    let mut groups: Vec<HashSet<(Letter, Letter)>> = vec![HashSet::new(); 64];
    for &(a, b) in crossing {
        let bit = (a.0 ^ b.0).trailing_zeros() as usize;
        let dir = (a.0 >> bit & 1) as usize;
        groups[2 * bit + dir].insert((a, b));
    }
    let mut out = Vec::new();
    for (g, pairs) in groups.into_iter().enumerate() {
        if pairs.is_empty() {
            continue;
        }
        let (bit, dir) = (g / 2, (g % 2) as u32);
        let mut part = Partition::new(alphabet);
        for id in 0..alphabet {
            let a = Letter(id as u32);
            if old(a) {
                if (a.0 >> bit & 1) == dir {
                    part.left[id] = true;
                } else {
                    part.right[id] = true;
                }
            }
        }
        out.push((part, pairs));
    }
    out
}

/// Compresses every crossing pair following [`binary_schedule`]: one pop
/// and one compression per non-empty group. Pairs of a group that were
/// already consumed are simply absent. Returns the number of compressed
/// pairs.
pub fn compress_crossing_binary(slp: &mut Slp, crossing: &[(Letter, Letter)], old: &dyn Fn(Letter) -> bool) -> usize {
    let mut made = 0;
    for (part, pairs) in binary_schedule(crossing, slp.symbols.len(), old) {
        pop_partition(slp, &part);
        made += compress_covered(slp, &|x, y| pairs.contains(&(x, y)));
    }
    made
}

/// First/last maximal block of a nonterminal value and whether the value is
/// a power of one letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Boundary {
    pub lead: (Letter, u64),
    pub trail: (Letter, u64),
    pub uniform: bool,
}

impl Boundary {
    fn single(a: Letter, n: u64) -> Self {
        Boundary {
            lead: (a, n),
            trail: (a, n),
            uniform: true,
        }
    }

    fn join(self, b: Boundary) -> Boundary {
        let meet = self.trail.0 == b.lead.0;
        let lead = if self.uniform && meet {
            (self.lead.0, sat_add(self.lead.1, b.lead.1))
        } else {
            self.lead
        };
        let trail = if b.uniform && meet {
            (b.trail.0, sat_add(self.trail.1, b.trail.1))
        } else {
            b.trail
        };
        Boundary {
            lead,
            trail,
            uniform: self.uniform && b.uniform && meet,
        }
    }
}

/// Bottom-up boundary blocks of every rule; `None` for empty values.
pub fn boundary_blocks(slp: &Slp) -> Vec<Option<Boundary>> {
    let mut out: Vec<Option<Boundary>> = Vec::with_capacity(slp.rules.len());
    for body in &slp.rules {
        let mut acc: Option<Boundary> = None;
        for it in body {
            let b = match *it {
                Item::Letter(a) => Some(Boundary::single(a, 1)),
                Item::Run(a, l) => Some(Boundary::single(a, l.value())),
                Item::Nt(z) => out[z.index()],
            };
            acc = match (acc, b) {
                (None, b) => b,
                (a, None) => a,
                (Some(a), Some(b)) => Some(a.join(b)),
            };
        }
        out.push(acc);
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RemBlocksStats {
    /// Prefix and suffix blocks moved out of nonterminals.
    pub popped: usize,
    /// Nonterminals that turned out to be a single block and were removed.
    pub emptied: usize,
}

fn push_merge(nb: &mut Vec<Item>, it: Item, eligible: &dyn Fn(Letter) -> bool) {
    if let (Some((a, l)), Some(last)) = (run_len(&it), nb.last().copied()) {
        if let Some((b, m)) = run_len(&last) {
            if a == b && eligible(a) {
                *nb.last_mut().unwrap() = Item::block(a, m.concat(l));
                return;
            }
        }
    }
    nb.push(it);
}

/// Removes crossing blocks of the eligible letters. Wherever a body puts
/// the same eligible letter on both sides of a nonterminal boundary, the
/// nonterminal's whole leading (trailing) block is moved out into the
/// referencing bodies, and neighbouring blocks of one letter are merged
/// into a single run. With `axiom_ends`, the boundary blocks of both axioms
/// are also made explicit. Afterwards every maximal block of an eligible
/// letter in an axiom value is a single body item.
pub fn remove_crossing_blocks(slp: &mut Slp, eligible: &dyn Fn(Letter) -> bool, axiom_ends: bool) -> RemBlocksStats {
    let meta = compute_meta(slp);
    let bnd = boundary_blocks(slp);
    let r = slp.rules.len();
    let mut need_l = vec![false; r];
    let mut need_r = vec![false; r];
    for body in &slp.rules {
        for w in body.windows(2) {
            let (u, v) = (&w[0], &w[1]);
            if !matches!(u, Item::Nt(_)) && !matches!(v, Item::Nt(_)) {
                continue;
            }
            let (Some(x), Some(y)) = (last_of(u, &meta), first_of(v, &meta)) else {
                continue;
            };
            if x == y && eligible(x) {
                if let Item::Nt(z) = *u {
                    need_r[z.index()] = true;
                }
                if let Item::Nt(z) = *v {
                    need_l[z.index()] = true;
                }
            }
        }
    }
    if axiom_ends {
        for ax in [slp.text, slp.pattern] {
            let body = &slp.rules[ax.index()];
            if let Some(Item::Nt(z)) = body.first() {
                if meta[z.index()].first.is_some_and(eligible) {
                    need_l[z.index()] = true;
                }
            }
            if let Some(Item::Nt(z)) = body.last() {
                if meta[z.index()].last.is_some_and(eligible) {
                    need_r[z.index()] = true;
                }
            }
        }
    }
    for x in (0..r).rev() {
        let body = &slp.rules[x];
        if need_l[x] {
            let a = meta[x].first;
            for it in body {
                match *it {
                    Item::Letter(b) | Item::Run(b, _) if Some(b) == a => continue,
                    Item::Nt(z) if meta[z.index()].first == a => {
                        need_l[z.index()] = true;
                        if bnd[z.index()].is_some_and(|b| b.uniform) {
                            continue;
                        }
                        break;
                    }
                    _ => break,
                }
            }
        }
        if need_r[x] {
            let a = meta[x].last;
            for it in body.iter().rev() {
                match *it {
                    Item::Letter(b) | Item::Run(b, _) if Some(b) == a => continue,
                    Item::Nt(z) if meta[z.index()].last == a => {
                        need_r[z.index()] = true;
                        if bnd[z.index()].is_some_and(|b| b.uniform) {
                            continue;
                        }
                        break;
                    }
                    _ => break,
                }
            }
        }
    }
    let mut pre: Vec<Option<(Letter, BlockLen)>> = vec![None; r];
    let mut suf: Vec<Option<(Letter, BlockLen)>> = vec![None; r];
    let mut gone: Vec<Option<Vec<(Letter, BlockLen)>>> = vec![None; r];
    let mut stats = RemBlocksStats::default();
    for x in 0..r {
        let old = std::mem::take(&mut slp.rules[x]);
        if old.is_empty() {
            continue;
        }
        let mut nb: Vec<Item> = Vec::with_capacity(old.len() + 2);
        for it in old {
            match it {
                Item::Nt(z) => {
                    let z = z.index();
                    if let Some(g) = &gone[z] {
                        for &(a, l) in g {
                            push_merge(&mut nb, Item::block(a, l), eligible);
                        }
                    } else {
                        if let Some((a, l)) = pre[z] {
                            push_merge(&mut nb, Item::block(a, l), eligible);
                        }
                        nb.push(it);
                        if let Some((a, l)) = suf[z] {
                            nb.push(Item::block(a, l));
                        }
                    }
                }
                other => push_merge(&mut nb, other, eligible),
            }
        }
        let is_axiom = x == slp.text.index() || x == slp.pattern.index();
        if !is_axiom {
            if need_l[x] {
                if let Some((a, l)) = nb.first().and_then(run_len) {
                    if eligible(a) {
                        nb.remove(0);
                        pre[x] = Some((a, l));
                        stats.popped += 1;
                    }
                }
            }
            if need_r[x] && !nb.is_empty() {
                if let Some((a, l)) = nb.last().and_then(run_len) {
                    if eligible(a) {
                        nb.pop();
                        suf[x] = Some((a, l));
                        stats.popped += 1;
                    }
                }
            }
            if nb.is_empty() {
                let g: Vec<(Letter, BlockLen)> = [pre[x].take(), suf[x].take()]
                    .into_iter()
                    .flatten()
                    .map(|(a, l)| (a, BlockLen::from_common(l.value())))
                    .collect();
                assert!(!g.is_empty(), "a non-empty rule lost no block");
                gone[x] = Some(g);
                stats.emptied += 1;
            }
        }
        slp.rules[x] = nb;
    }
    stats
}

/// How [`compress_blocks`] names blocks.
#[derive(Clone, Copy, Debug)]
pub enum BlockPolicy<'a> {
    /// Equal `(letter, length)` always share a letter.
    Exact,
    /// `cap[a]` is the longest `a`-block of the pattern. Blocks of letters
    /// absent from the pattern (`None`) or longer than the cap each get a
    /// letter of their own.
    PatternCapped(&'a [Option<u64>]),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BlockStats {
    /// Fresh letters introduced.
    pub letters: usize,
    /// Blocks given a unique letter without sorting.
    pub unsorted: usize,
    pub counters: BlockCounters,
}

/// Replaces each maximal block `a^k` (`k > 1`) of an eligible letter by a
/// fresh letter of weight `k * weight(a)`. Requires that the eligible
/// letters have no crossing blocks and that neighbouring runs are merged.
/// `g` is the grammar size used for thinning common lengths.
pub fn compress_blocks(slp: &mut Slp, eligible: &dyn Fn(Letter) -> bool, policy: BlockPolicy, g: u64) -> BlockStats {
    let mut found: Vec<(Letter, BlockLen, u32, u32)> = Vec::new();
    for (r, body) in slp.rules.iter().enumerate() {
        for (i, it) in body.iter().enumerate() {
            if let Item::Run(a, l) = *it {
                if eligible(a) {
                    found.push((a, l, r as u32, i as u32));
                }
            }
        }
    }
    radix::sort_by_key(&mut found, |f| f.0 .0 as u64);
    let mut stats = BlockStats::default();
    let mut i = 0;
    while i < found.len() {
        let a = found[i].0;
        let mut j = i;
        while j < found.len() && found[j].0 == a {
            j += 1;
        }
        let w = slp.symbols.weight(a);
        let mut sorted_idx: Vec<usize> = Vec::new();
        for k in i..j {
            let unique = match policy {
                BlockPolicy::Exact => false,
                BlockPolicy::PatternCapped(cap) => match cap.get(a.index()).copied().flatten() {
                    None => true,
                    Some(c) => found[k].1.value() > c,
                },
            };
            if unique {
                let c = slp.symbols.fresh(sat_mul(found[k].1.value(), w));
                slp.rules[found[k].2 as usize][found[k].3 as usize] = Item::Letter(c);
                stats.letters += 1;
                stats.unsorted += 1;
            } else {
                sorted_idx.push(k);
            }
        }
        let lens: Vec<BlockLen> = sorted_idx.iter().map(|&k| found[k].1).collect();
        let sorted = sort_block_lengths(&lens, g);
        stats.counters.absorb(&sorted.counters);
        for group in sorted.groups {
            let v = lens[group[0]].value();
            let c = slp.symbols.fresh(sat_mul(v, w));
            stats.letters += 1;
            for gi in group {
                let (_, _, r, p) = found[sorted_idx[gi]];
                slp.rules[r as usize][p as usize] = Item::Letter(c);
            }
        }
        i = j;
    }
    stats
}

/// Occurrence counts of pairs, sorted by pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairCounts {
    pub pairs: Vec<(Letter, Letter, u64)>,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.pairs.iter().fold(0, |s, p| sat_add(s, p.2))
    }

    pub fn get(&self, a: Letter, b: Letter) -> u64 {
        self.pairs
            .binary_search_by(|p| (p.0, p.1).cmp(&(a, b)))
            .map(|i| self.pairs[i].2)
            .unwrap_or(0)
    }

    /// Mass of the pairs lying in left·right.
    pub fn covered(&self, part: &Partition) -> u64 {
        self.pairs
            .iter()
            .filter(|p| part.covers(p.0, p.1))
            .fold(0, |s, p| sat_add(s, p.2))
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// How often each rule occurs in the derivation tree of the pattern:
/// `k[pattern] = 1` and every reference passes its count down.
pub fn pattern_multiplicities(slp: &Slp) -> Vec<u64> {
    let mut k = vec![0u64; slp.rules.len()];
    k[slp.pattern.index()] = 1;
    for x in (0..slp.rules.len()).rev() {
        if k[x] == 0 {
            continue;
        }
        for it in &slp.rules[x] {
            if let Item::Nt(z) = *it {
                k[z.index()] = sat_add(k[z.index()], k[x]);
            }
        }
    }
    k
}

fn count_with(slp: &Slp, meta: &[SymbolMeta], coeff: &[u64], filter: &dyn Fn(Letter, Letter) -> bool) -> PairCounts {
    let mut recs: Vec<(Letter, Letter, u64)> = Vec::new();
    for (x, body) in slp.rules.iter().enumerate() {
        if coeff[x] == 0 {
            continue;
        }
        for w in body.windows(2) {
            let (Some(a), Some(b)) = (last_of(&w[0], meta), first_of(&w[1], meta)) else {
                continue;
            };
            if a != b && filter(a, b) {
                recs.push((a, b, coeff[x]));
            }
        }
    }
    radix::sort_by_key(&mut recs, |r| r.1 .0 as u64);
    radix::sort_by_key(&mut recs, |r| r.0 .0 as u64);
    let mut pairs: Vec<(Letter, Letter, u64)> = Vec::new();
    for (a, b, k) in recs {
        match pairs.last_mut() {
            Some(p) if p.0 == a && p.1 == b => p.2 = sat_add(p.2, k),
            _ => pairs.push((a, b, k)),
        }
    }
    PairCounts { pairs }
}

/// Occurrences in the pattern value of every pair accepted by `filter`.
pub fn count_pattern_pair_occurrences(
    slp: &Slp,
    meta: &[SymbolMeta],
    filter: &dyn Fn(Letter, Letter) -> bool,
) -> PairCounts {
    count_with(slp, meta, &pattern_multiplicities(slp), filter)
}

/// Occurrences in the rule bodies, each rule counted once.
pub fn count_grammar_pair_occurrences(
    slp: &Slp,
    meta: &[SymbolMeta],
    filter: &dyn Fn(Letter, Letter) -> bool,
) -> PairCounts {
    count_with(slp, meta, &vec![1; slp.rules.len()], filter)
}

/// Greedy derandomised partition: covers at least a quarter of the counted
/// mass. Letters not occurring in `counts` are in neither set.
pub fn greedy_partition(counts: &PairCounts, alphabet: usize) -> Partition {
    let mut part = Partition::new(alphabet);
    if counts.is_empty() {
        return part;
    }
    let mut right_list: HashMap<Letter, Vec<(Letter, u64)>> = HashMap::new();
    let mut left_list: HashMap<Letter, Vec<(Letter, u64)>> = HashMap::new();
    let mut letters: Vec<Letter> = Vec::new();
    for &(a, b, k) in &counts.pairs {
        right_list.entry(a).or_default().push((b, k));
        left_list.entry(b).or_default().push((a, k));
        letters.push(a);
        letters.push(b);
    }
    letters.sort_unstable();
    letters.dedup();
    let mut count_l = vec![0u64; alphabet];
    let mut count_r = vec![0u64; alphabet];
    for &a in &letters {
        let to_left = count_r[a.index()] >= count_l[a.index()];
        let counter = if to_left {
            part.left[a.index()] = true;
            &mut count_l
        } else {
            part.right[a.index()] = true;
            &mut count_r
        };
        for list in [right_list.get(&a), left_list.get(&a)].into_iter().flatten() {
            for &(b, k) in list {
                counter[b.index()] = sat_add(counter[b.index()], k);
            }
        }
    }
    let lr = counts.covered(&part);
    let swapped = part.swapped();
    if counts.covered(&swapped) > lr {
        swapped
    } else {
        part
    }
}

/// Greedy partition weighted by occurrences in the grammar rather than in
/// the pattern, restricted to pairs accepted by `filter`.
pub fn greedy_partition_grammar(slp: &Slp, filter: &dyn Fn(Letter, Letter) -> bool) -> Partition {
    let meta = compute_meta(slp);
    let counts = count_grammar_pair_occurrences(slp, &meta, filter);
    greedy_partition(&counts, slp.symbols.len())
}

/// Merges neighbouring items of one letter into runs.
pub fn merge_runs(slp: &mut Slp) {
    for body in slp.rules.iter_mut() {
        let old = std::mem::take(body);
        let mut nb = Vec::with_capacity(old.len());
        for it in old {
            push_merge(&mut nb, it, &|_| true);
        }
        *body = nb;
    }
}
