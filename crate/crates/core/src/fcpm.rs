//! Phase loops for pattern matching and equality testing.

use serde::{Deserialize, Serialize};

use crate::blocklen::BlockCounters;
use crate::endfix::{fix_ends_slp, plan_endfix};
use crate::error::{Error, Result};
use crate::recompress::{
    binary_schedule, compress_blocks, compress_covered, compress_noncrossing, count_grammar_pair_occurrences,
    count_pattern_pair_occurrences, greedy_partition, merge_runs, pattern_multiplicities, pop_partition,
    remove_crossing_blocks, scan_pairs, BlockPolicy, PairCounts, Partition,
};
use crate::slp::{compute_meta, renumber_alphabet, sat_add, sat_mul, Item, Letter, Nt, Slp, SAT_MAX};
use crate::validate::validate;

/// How crossing pairs are compressed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Two greedy partitions per phase, one weighted by pattern
    /// occurrences and one by grammar occurrences.
    #[default]
    Greedy,
    /// One partition per bit of the letter ids.
    Binary,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Strategy::Greedy),
            "binary" => Ok(Strategy::Binary),
            _ => Err(Error::Param(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub strategy: Strategy,
    /// Give blocks that cannot occur inside the pattern a letter of their
    /// own instead of sorting their lengths.
    pub sloppy_blocks: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            strategy: Strategy::Greedy,
            sloppy_blocks: true,
        }
    }
}

/// Counters of one phase.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub phase: usize,
    /// Pattern length in current letters at the phase start.
    pub pattern_len: u64,
    pub text_len: u64,
    /// Grammar size at the phase start.
    pub grammar_size: usize,
    /// Largest grammar size seen during the phase.
    pub max_grammar_size: usize,
    /// Live letters at the phase start.
    pub alphabet: usize,
    pub letters_introduced: usize,
    pub pairs_compressed: usize,
    pub blocks_compressed: usize,
    pub crossing_pairs: usize,
    pub popped_letters: usize,
    pub blocklen: BlockCounters,
}

/// Hooks into the phase engine, for tests and tracing.
#[allow(unused_variables)]
pub trait Observer {
    /// Whether `before` snapshots should be taken for `after_pop` and
    /// `after_remove_blocks`. Cloning the grammar is skipped otherwise.
    fn wants_snapshots(&self) -> bool {
        false
    }
    fn phase_start(&mut self, phase: usize, slp: &Slp) {}
    fn after_pop(&mut self, before: Option<&Slp>, after: &Slp, part: &Partition) {}
    fn after_remove_blocks(&mut self, before: Option<&Slp>, after: &Slp, bound: u32) {}
    fn crossing_partition(&mut self, counts: &PairCounts, part: &Partition) {}
    fn phase_end(&mut self, stats: &PhaseStats) {}
}

/// Observer that does nothing.
pub struct Quiet;

impl Observer for Quiet {}

/// Collects the stats of every phase.
#[derive(Default)]
pub struct Trace {
    pub phases: Vec<PhaseStats>,
}

impl Observer for Trace {
    fn phase_end(&mut self, stats: &PhaseStats) {
        self.phases.push(stats.clone());
    }
}

/// Pattern occurrences, represented by a final grammar in which each
/// occurrence of one letter marks an occurrence start.
#[derive(Clone, Debug)]
pub struct OccurrenceSet {
    slp: Option<Slp>,
    hit: Option<Letter>,
    stripped_prefix: u64,
    stripped_suffix: u64,
    text_len: u64,
    pattern_len: u64,
    stats: Vec<PhaseStats>,
    hits: Vec<u64>,
    weights: Vec<u64>,
    count: u64,
}

impl OccurrenceSet {
    fn empty(text_len: u64, pattern_len: u64, stats: Vec<PhaseStats>) -> Self {
        OccurrenceSet {
            slp: None,
            hit: None,
            stripped_prefix: 0,
            stripped_suffix: 0,
            text_len,
            pattern_len,
            stats,
            hits: Vec::new(),
            weights: Vec::new(),
            count: 0,
        }
    }

    fn new(slp: Slp, hit: Letter, prefix: u64, suffix: u64, text_len: u64, pattern_len: u64, stats: Vec<PhaseStats>) -> Self {
        let meta = compute_meta(&slp);
        let mut hits = vec![0u64; slp.rules.len()];
        for (x, body) in slp.rules.iter().enumerate() {
            let mut c = 0;
            for it in body {
                c = sat_add(
                    c,
                    match *it {
                        Item::Letter(a) => (a == hit) as u64,
                        Item::Run(a, l) => if a == hit { l.value() } else { 0 },
                        Item::Nt(z) => hits[z.index()],
                    },
                );
            }
            hits[x] = c;
        }
        let count = hits[slp.text.index()];
        OccurrenceSet {
            weights: meta.iter().map(|m| m.weight).collect(),
            hits,
            count,
            slp: Some(slp),
            hit: Some(hit),
            stripped_prefix: prefix,
            stripped_suffix: suffix,
            text_len,
            pattern_len,
            stats,
        }
    }

    /// Number of occurrences; saturates at `SAT_MAX`.
    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Whether counts or positions may have hit the saturation bound.
    pub fn is_saturated(&self) -> bool {
        self.count >= SAT_MAX || self.text_len >= SAT_MAX
    }

    pub fn text_len(&self) -> u64 {
        self.text_len
    }

    pub fn pattern_len(&self) -> u64 {
        self.pattern_len
    }

    pub fn phases(&self) -> usize {
        self.stats.len()
    }

    pub fn stats(&self) -> &[PhaseStats] {
        &self.stats
    }

    pub fn hit_letter(&self) -> Option<Letter> {
        self.hit
    }

    pub fn final_slp(&self) -> Option<&Slp> {
        self.slp.as_ref()
    }

    pub fn stripped_prefix_weight(&self) -> u64 {
        self.stripped_prefix
    }

    pub fn stripped_suffix_weight(&self) -> u64 {
        self.stripped_suffix
    }

    fn item_weight(&self, slp: &Slp, it: &Item) -> u64 {
        match *it {
            Item::Letter(a) => slp.symbols.weight(a),
            Item::Run(a, l) => sat_mul(l.value(), slp.symbols.weight(a)),
            Item::Nt(z) => self.weights[z.index()],
        }
    }

    /// 1-based start of the leftmost occurrence.
    pub fn first(&self) -> Option<u64> {
        let (slp, hit) = (self.slp.as_ref()?, self.hit?);
        if self.count == 0 {
            return None;
        }
        let mut pos = 0u64;
        let mut x = slp.text;
        'descend: loop {
            for it in &slp.rules[x.index()] {
                match *it {
                    Item::Letter(a) | Item::Run(a, _) if a == hit => break 'descend,
                    Item::Nt(z) if self.hits[z.index()] > 0 => {
                        x = z;
                        continue 'descend;
                    }
                    _ => pos = sat_add(pos, self.item_weight(slp, it)),
                }
            }
            unreachable!("hit counts promise an occurrence");
        }
        Some(sat_add(sat_add(pos, self.stripped_prefix), 1))
    }

    /// 1-based start of the rightmost occurrence.
    pub fn last(&self) -> Option<u64> {
        let (slp, hit) = (self.slp.as_ref()?, self.hit?);
        if self.count == 0 {
            return None;
        }
        let w = slp.symbols.weight(hit);
        let mut after = 0u64;
        let mut x = slp.text;
        'descend: loop {
            for it in slp.rules[x.index()].iter().rev() {
                match *it {
                    Item::Letter(a) | Item::Run(a, _) if a == hit => break 'descend,
                    Item::Nt(z) if self.hits[z.index()] > 0 => {
                        x = z;
                        continue 'descend;
                    }
                    _ => after = sat_add(after, self.item_weight(slp, it)),
                }
            }
            unreachable!("hit counts promise an occurrence");
        }
        let total = self.weights[slp.text.index()];
        let before = total.saturating_sub(after).saturating_sub(w);
        Some(sat_add(sat_add(before, self.stripped_prefix), 1))
    }

    /// The first `limit` positions in ascending order.
    pub fn enumerate(&self, limit: usize) -> Vec<u64> {
        let mut out = Vec::new();
        let (Some(slp), Some(hit)) = (self.slp.as_ref(), self.hit) else {
            return out;
        };
        if limit == 0 || self.count == 0 {
            return out;
        }
        let base = sat_add(self.stripped_prefix, 1);
        let mut pos = 0u64;
        let mut stack: Vec<(Nt, usize)> = vec![(slp.text, 0)];
        while let Some((x, i)) = stack.pop() {
            let body = &slp.rules[x.index()];
            if i >= body.len() {
                continue;
            }
            stack.push((x, i + 1));
            let it = &body[i];
            match *it {
                Item::Nt(z) if self.hits[z.index()] > 0 => stack.push((z, 0)),
                Item::Letter(a) if a == hit => {
                    out.push(sat_add(pos, base));
                    pos = sat_add(pos, slp.symbols.weight(a));
                }
                Item::Run(a, l) if a == hit => {
                    let w = slp.symbols.weight(a);
                    let mut k = 0;
                    while k < l.value() && out.len() < limit {
                        out.push(sat_add(sat_add(pos, sat_mul(k, w)), base));
                        k += 1;
                    }
                    pos = sat_add(pos, sat_mul(l.value(), w));
                }
                _ => pos = sat_add(pos, self.item_weight(slp, it)),
            }
            if out.len() >= limit {
                out.truncate(limit);
                break;
            }
        }
        out
    }
}

/// Copies both axiom bodies into two new last rules so that neither axiom
/// is referenced and they are distinct.
fn normalize(input: &Slp) -> Slp {
    let mut slp = input.clone();
    let t = slp.rules[input.text.index()].clone();
    let p = slp.rules[input.pattern.index()].clone();
    slp.rules.push(t);
    slp.text = Nt(slp.rules.len() as u32 - 1);
    slp.rules.push(p);
    slp.pattern = Nt(slp.rules.len() as u32 - 1);
    slp
}

fn check(input: &Slp) -> Result<()> {
    let report = validate(input);
    if report.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(report.to_string()))
    }
}

fn log2_ceil(x: u64) -> u64 {
    64 - x.max(2).saturating_sub(1).leading_zeros() as u64
}

/// Upper bound on the number of phases for instances of total length `m`.
pub fn phase_bound(m: u64) -> usize {
    (64 * log2_ceil(m) + 16) as usize
}

struct Engine<'o> {
    slp: Slp,
    opts: Options,
    obs: &'o mut dyn Observer,
    matching: bool,
    stats: PhaseStats,
}

impl Engine<'_> {
    fn note_size(&mut self) {
        self.stats.max_grammar_size = self.stats.max_grammar_size.max(self.slp.size());
    }

    fn snapshot(&self) -> Option<Slp> {
        self.obs.wants_snapshots().then(|| self.slp.clone())
    }

    fn pop_and_compress(&mut self, part: &Partition, pred: &dyn Fn(Letter, Letter) -> bool) {
        let before = self.snapshot();
        self.stats.popped_letters += pop_partition(&mut self.slp, part);
        self.note_size();
        self.obs.after_pop(before.as_ref(), &self.slp, part);
        self.stats.pairs_compressed += compress_covered(&mut self.slp, &|x, y| part.covers(x, y) && pred(x, y));
    }

    /// Everything of a phase after the ends are fixed.
    fn compress_old(&mut self, bound: u32) {
        let old = |x: Letter| x.0 < bound;
        let before = self.snapshot();
        remove_crossing_blocks(&mut self.slp, &old, false);
        self.note_size();
        self.obs.after_remove_blocks(before.as_ref(), &self.slp, bound);

        let cap: Option<Vec<Option<u64>>> = (self.matching && self.opts.sloppy_blocks).then(|| {
            let k = pattern_multiplicities(&self.slp);
            let mut cap = vec![None; self.slp.symbols.len()];
            for (x, body) in self.slp.rules.iter().enumerate() {
                if k[x] == 0 {
                    continue;
                }
                for it in body {
                    if let (Some(a), Some(l)) = (it.letter(), it.block_len()) {
                        let c: &mut Option<u64> = &mut cap[a.index()];
                        *c = Some(c.unwrap_or(0).max(l.value()));
                    }
                }
            }
            cap
        });
        let policy = match &cap {
            Some(c) => BlockPolicy::PatternCapped(c),
            None => BlockPolicy::Exact,
        };
        let g = self.slp.size() as u64;
        let bs = compress_blocks(&mut self.slp, &old, policy, g);
        self.stats.blocks_compressed += bs.letters;
        self.stats.blocklen.absorb(&bs.counters);

        let both_old = |x: Letter, y: Letter| x.0 < bound && y.0 < bound;
        let meta = compute_meta(&self.slp);
        let scan = scan_pairs(&self.slp, &meta, &both_old);
        self.stats.crossing_pairs = scan.crossing.len();
        self.stats.pairs_compressed += compress_noncrossing(&mut self.slp, &scan.noncrossing);

        match self.opts.strategy {
            Strategy::Greedy => {
                let n = self.slp.symbols.len();
                let meta = compute_meta(&self.slp);
                let counts = count_pattern_pair_occurrences(&self.slp, &meta, &both_old);
                if !counts.is_empty() {
                    let part = greedy_partition(&counts, n);
                    self.obs.crossing_partition(&counts, &part);
                    self.pop_and_compress(&part, &both_old);
                }
                let meta = compute_meta(&self.slp);
                let counts = count_grammar_pair_occurrences(&self.slp, &meta, &both_old);
                if !counts.is_empty() {
                    let part = greedy_partition(&counts, self.slp.symbols.len());
                    self.obs.crossing_partition(&counts, &part);
                    self.pop_and_compress(&part, &both_old);
                }
            }
            Strategy::Binary => {
                for (part, _) in binary_schedule(&scan.crossing, self.slp.symbols.len(), &old) {
                    self.pop_and_compress(&part, &both_old);
                }
            }
        }
        merge_runs(&mut self.slp);
        self.note_size();
    }

    fn start_phase(&mut self, phase: usize) -> u32 {
        let (slp, _) = renumber_alphabet(&self.slp);
        self.slp = slp;
        let meta = compute_meta(&self.slp);
        self.stats = PhaseStats {
            phase,
            pattern_len: meta[self.slp.pattern.index()].len,
            text_len: meta[self.slp.text.index()].len,
            grammar_size: self.slp.size(),
            max_grammar_size: self.slp.size(),
            alphabet: self.slp.live_alphabet(),
            ..PhaseStats::default()
        };
        self.obs.phase_start(phase, &self.slp);
        self.slp.symbols.len() as u32
    }

    fn end_phase(&mut self, bound: u32, all: &mut Vec<PhaseStats>) {
        self.stats.letters_introduced = self.slp.symbols.len() - bound as usize;
        self.obs.phase_end(&self.stats);
        all.push(std::mem::take(&mut self.stats));
    }
}

/// Pattern matching with default options.
pub fn fcpm(slp: &Slp) -> Result<OccurrenceSet> {
    fcpm_with(slp, &Options::default(), &mut Quiet)
}

/// Finds all occurrences of the pattern axiom's value in the text axiom's
/// value without decompressing either.
pub fn fcpm_with(input: &Slp, opts: &Options, obs: &mut dyn Observer) -> Result<OccurrenceSet> {
    check(input)?;
    let meta = compute_meta(input);
    let (tm, pm) = (meta[input.text.index()], meta[input.pattern.index()]);
    if pm.len == 0 {
        return Err(Error::EmptyPattern);
    }
    let (n, m) = (tm.weight, pm.weight);
    let limit = phase_bound(sat_add(tm.len, pm.len));
    let mut engine = Engine {
        slp: normalize(input),
        opts: *opts,
        obs,
        matching: true,
        stats: PhaseStats::default(),
    };
    let mut all = Vec::new();
    let (mut prefix, mut suffix) = (0u64, 0u64);
    let mut phase = 0;
    loop {
        let bound = engine.start_phase(phase + 1);
        let meta = compute_meta(&engine.slp);
        let (t, p) = (meta[engine.slp.text.index()], meta[engine.slp.pattern.index()]);
        if p.len > t.len {
            return Ok(OccurrenceSet::empty(n, m, all));
        }
        if p.len == 1 {
            let hit = p.first.unwrap();
            return Ok(OccurrenceSet::new(engine.slp, hit, prefix, suffix, n, m, all));
        }
        phase += 1;
        assert!(phase <= limit, "phase {phase} exceeds the bound {limit}");
        let plan = plan_endfix(&engine.slp)?;
        let fixed = fix_ends_slp(&mut engine.slp, &plan, bound);
        prefix = sat_add(prefix, fixed.stripped_prefix);
        suffix = sat_add(suffix, fixed.stripped_suffix);
        engine.stats.pairs_compressed += fixed.pairs;
        engine.note_size();
        if let Some(hit) = fixed.hit {
            engine.end_phase(bound, &mut all);
            return Ok(OccurrenceSet::new(engine.slp, hit, prefix, suffix, n, m, all));
        }
        engine.compress_old(bound);
        engine.end_phase(bound, &mut all);
    }
}

/// Whether the values of the two axioms are equal.
pub fn equal_slp(input: &Slp) -> Result<bool> {
    equal_slp_with(input, &Options::default(), &mut Quiet)
}

pub fn equal_slp_with(input: &Slp, opts: &Options, obs: &mut dyn Observer) -> Result<bool> {
    check(input)?;
    if input.text == input.pattern {
        return Ok(true);
    }
    let meta = compute_meta(input);
    let (tm, pm) = (meta[input.text.index()], meta[input.pattern.index()]);
    if tm.weight != pm.weight || tm.len != pm.len || tm.first != pm.first || tm.last != pm.last {
        return Ok(false);
    }
    let limit = phase_bound(sat_add(tm.len, pm.len));
    let mut engine = Engine {
        slp: normalize(input),
        opts: Options {
            sloppy_blocks: false,
            ..*opts
        },
        obs,
        matching: false,
        stats: PhaseStats::default(),
    };
    let mut all = Vec::new();
    let mut phase = 0;
    loop {
        let bound = engine.start_phase(phase + 1);
        let meta = compute_meta(&engine.slp);
        let (t, p) = (meta[engine.slp.text.index()], meta[engine.slp.pattern.index()]);
        if t.len != p.len || t.first != p.first || t.last != p.last {
            return Ok(false);
        }
        if t.len <= 1 {
            return Ok(true);
        }
        phase += 1;
        assert!(phase <= limit, "phase {phase} exceeds the bound {limit}");
        engine.compress_old(bound);
        engine.end_phase(bound, &mut all);
    }
}
