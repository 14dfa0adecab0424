//! Maximal-block lengths written as a common length plus a small offset.
//!
//! Long blocks only arise from nonterminals that derive a power of one
//! letter, so their lengths cluster around few large values (the commons).
//! Everything else is a short explicit offset. After [`thin_commons`] the
//! pair `(common, offset)` compares lexicographically exactly as the sum
//! compares numerically, which is what lets [`sort_block_lengths`] radix
//! sort lengths of arbitrary magnitude in time linear in the grammar.

use serde::{Deserialize, Serialize};

use crate::radix;
use crate::slp::{sat_add, Item, Letter, Nt, Slp};

/// `common + offset`, both saturating. A zero common means "offset only".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockLen {
    common: u64,
    offset: u64,
}

impl BlockLen {
    /// A block made of `n` explicit letters.
    pub const fn explicit(n: u64) -> Self {
        BlockLen {
            common: 0,
            offset: n,
        }
    }

    /// A fresh common length with zero offset.
    pub const fn from_common(c: u64) -> Self {
        BlockLen {
            common: c,
            offset: 0,
        }
    }

    pub const fn new(common: u64, offset: u64) -> Self {
        BlockLen { common, offset }
    }

    pub fn common(self) -> u64 {
        self.common
    }

    pub fn offset(self) -> u64 {
        self.offset
    }

    pub fn value(self) -> u64 {
        sat_add(self.common, self.offset)
    }

    /// Length of two adjacent blocks of the same letter. Two commons make a
    /// new common; otherwise offsets add up.
    pub fn concat(self, other: BlockLen) -> BlockLen {
        if self.common > 0 && other.common > 0 {
            BlockLen::from_common(sat_add(self.value(), other.value()))
        } else {
            BlockLen {
                common: self.common.max(other.common),
                offset: sat_add(self.offset, other.offset),
            }
        }
    }

    /// The block with one letter removed, or `None` if nothing is left.
    pub fn minus_one(self) -> Option<BlockLen> {
        if self.value() <= 1 {
            None
        } else if self.offset > 0 {
            Some(BlockLen::new(self.common, self.offset - 1))
        } else {
            Some(BlockLen::from_common(self.common - 1))
        }
    }
}

/// Per-phase counters of the block-length machinery.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCounters {
    /// Distinct non-zero common lengths sorted.
    pub commons: usize,
    /// Lengths carrying a non-zero offset before thinning.
    pub offsets: usize,
    /// Largest offset after thinning.
    pub max_offset: u64,
    /// Total bit length of the sorted commons.
    pub redirected_cost_bits: u64,
}

impl BlockCounters {
    pub fn absorb(&mut self, other: &BlockCounters) {
        self.commons += other.commons;
        self.offsets += other.offsets;
        self.max_offset = self.max_offset.max(other.max_offset);
        self.redirected_cost_bits += other.redirected_cost_bits;
    }
}

/// The kept commons `0 = c_0 < c_1 < ...` with pairwise gaps above `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thinning {
    pub kept: Vec<u64>,
}

/// Keeps a subsequence of the sorted `commons` whose consecutive gaps exceed
/// `g`, starting from 0. Offsets are moved with [`Thinning::assign`].
pub fn thin_commons(commons: &[u64], g: u64) -> Thinning {
    let mut kept = vec![0u64];
    for &c in commons {
        let last = kept[kept.len() - 1];
        if c > last && c - last > g {
            kept.push(c);
        }
    }
    Thinning { kept }
}

impl Thinning {
    /// Index of the kept common `c`, or of the largest kept value below it.
    fn floor(&self, v: u64) -> usize {
        self.kept.partition_point(|&c| c <= v) - 1
    }

    /// Re-expresses `len` over the kept commons as `(index, offset)`. The
    /// represented value is unchanged and `kept[i] + offset < kept[i + 1]`.
    pub fn assign(&self, len: BlockLen) -> (usize, u64) {
        let v = len.value();
        let i = self.floor(len.common);
        let (idx, off) = if self.kept[i] == len.common {
            (i, len.offset)
        } else if i + 1 < self.kept.len() && v >= self.kept[i + 1] {
            (i + 1, v - self.kept[i + 1])
        } else {
            (i, v - self.kept[i])
        };
        let fits = self.kept.get(idx + 1).is_none_or(|&next| v < next);
        if fits {
            (idx, off)
        } else {
            let j = self.floor(v);
            (j, v - self.kept[j])
        }
    }
}

/// Result of [`sort_block_lengths`]: indices into the input grouped by equal
/// value, groups in increasing value order.
#[derive(Clone, Debug, Default)]
pub struct SortedBlocks {
    pub groups: Vec<Vec<usize>>,
    pub counters: BlockCounters,
}

/// Groups `lengths` by value. Commons are sorted by their bits, thinned
/// against `g`, and the `(common index, offset)` pairs radix sorted.
pub fn sort_block_lengths(lengths: &[BlockLen], g: u64) -> SortedBlocks {
    let mut counters = BlockCounters::default();
    if lengths.is_empty() {
        return SortedBlocks {
            groups: Vec::new(),
            counters,
        };
    }
    let mut commons: Vec<u64> = lengths.iter().map(|l| l.common).filter(|&c| c > 0).collect();
    radix::sort_by_bits(&mut commons);
    commons.dedup();
    counters.commons = commons.len();
    counters.offsets = lengths.iter().filter(|l| l.offset > 0).count();
    counters.redirected_cost_bits = commons.iter().map(|&c| radix::bit_len(c) as u64).sum();
    let thin = thin_commons(&commons, g);
    let mut keyed: Vec<(u64, u64, usize)> = lengths
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let (c, o) = thin.assign(l);
            counters.max_offset = counters.max_offset.max(o);
            (c as u64, o, i)
        })
        .collect();
    radix::sort_by_key(&mut keyed, |k| k.1);
    radix::sort_by_key(&mut keyed, |k| k.0);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut prev: Option<(u64, u64)> = None;
    for (c, o, i) in keyed {
        if prev != Some((c, o)) {
            groups.push(Vec::new());
            prev = Some((c, o));
        }
        groups.last_mut().unwrap().push(i);
    }
    SortedBlocks { groups, counters }
}

/// Outcome of comparing a block length against a cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Marked {
    Kept(BlockLen),
    TooLong,
}

/// Blocks strictly longer than `cap` are not sorted; each gets its own letter.
pub fn mark_too_long(len: BlockLen, cap: u64) -> Marked {
    if len.value() > cap {
        Marked::TooLong
    } else {
        Marked::Kept(len)
    }
}

/// Every maximal block of `a` in the bodies, with its position. Assumes
/// crossing blocks of `a` were removed and neighbouring runs merged.
pub fn build_block_lengths(slp: &Slp, a: Letter) -> Vec<(BlockLen, Nt, usize)> {
    let mut out = Vec::new();
    for (r, body) in slp.rules.iter().enumerate() {
        for (i, item) in body.iter().enumerate() {
            match *item {
                Item::Letter(b) if b == a => out.push((BlockLen::explicit(1), Nt(r as u32), i)),
                Item::Run(b, len) if b == a => out.push((len, Nt(r as u32), i)),
                _ => {}
            }
        }
    }
    out
}
