use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use slpmatch::blocklen::BlockCounters;
use slpmatch::explicit::spm_match;
use slpmatch::format::{read_file, serialize};
use slpmatch::generate::gen_random_instance;
use slpmatch::oracle::{classify_crossing_bruteforce, OracleBudget};
use slpmatch::recompress::scan_pairs;
use slpmatch::{
    compute_meta, equal_slp_with, eval_bounded, fcpm_with, from_text_balanced, gen_fibonacci, gen_power, gen_random,
    gen_random_bounded, gen_thue_morse, letters_from_str, letters_to_string, validate, Letter, Observer, Options,
    PhaseStats, Quiet, Slp, Strategy, SAT_MAX,
};

/// Pattern matching and equality testing on grammar-compressed strings.
#[derive(Parser)]
#[command(name = "slpm", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the structural conditions of a grammar file.
    Validate { file: PathBuf },
    /// Print the value of an axiom.
    Decompress {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Axiom::Text)]
        axiom: Axiom,
        /// Refuse values longer than this.
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
    },
    /// Whether text and pattern have the same value.
    Equal {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = StrategyArg::Greedy)]
        strategy: StrategyArg,
        /// Print per-phase counters as JSON lines on stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Find the occurrences of the pattern in the text.
    Match(MatchArgs),
    /// Write a generated grammar.
    Gen(GenArgs),
    /// Run the instances listed in a bench spec; writes JSON lines.
    Bench {
        spec: PathBuf,
        /// Output file; stdout by default.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Worker threads; all cores by default.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Classify the letter pairs of a grammar as crossing or not.
    ScanPairs {
        file: PathBuf,
        /// Cross-check against full expansion of every rule.
        #[arg(long)]
        check: bool,
    },
    /// Run some phases and print the grammar reached.
    Phase {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        phases: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Greedy)]
        strategy: StrategyArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Axiom {
    Text,
    Pattern,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Greedy,
    Binary,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Greedy => Strategy::Greedy,
            StrategyArg::Binary => Strategy::Binary,
        }
    }
}

#[derive(Args)]
struct Input {
    /// Grammar file with both axioms.
    #[arg(required_unless_present_all = ["text_raw", "pattern_raw"])]
    file: Option<PathBuf>,
    /// Text given as a plain string over a-z.
    #[arg(long, requires = "pattern_raw", conflicts_with = "file")]
    text_raw: Option<String>,
    #[arg(long, requires = "text_raw", conflicts_with = "file")]
    pattern_raw: Option<String>,
}

impl Input {
    fn load(&self) -> Result<Slp> {
        match (&self.file, &self.text_raw, &self.pattern_raw) {
            (Some(f), _, _) => load(f),
            (None, Some(t), Some(p)) => {
                let t = from_text_balanced(&letters_from_str(t)?)?;
                let p = from_text_balanced(&letters_from_str(p)?)?;
                Ok(Slp::combine(&t, &p))
            }
            _ => bail!("give a grammar file or both --text-raw and --pattern-raw"),
        }
    }
}

#[derive(Args)]
struct MatchArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    count: bool,
    #[arg(long)]
    first: bool,
    #[arg(long)]
    last: bool,
    /// Print up to N positions.
    #[arg(long, value_name = "N")]
    positions: Option<usize>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Greedy)]
    strategy: StrategyArg,
    /// Print per-phase counters as JSON lines on stderr.
    #[arg(long)]
    trace: bool,
    /// Decompress and match the plain strings instead.
    #[arg(long)]
    explicit: bool,
    /// Length cap for --explicit.
    #[arg(long, default_value_t = 10_000_000)]
    cap: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    family: Family,
    /// Index for fibonacci and thue-morse, exponent for power, rule count
    /// for random, text cap for instance.
    #[arg(long, default_value_t = 10)]
    size: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    alphabet: usize,
    /// Longest rule value for random grammars.
    #[arg(long)]
    max_len: Option<u64>,
    /// Attach this pattern, given as a plain string.
    #[arg(long)]
    pattern_raw: Option<String>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum Family {
    Fibonacci,
    Power,
    ThueMorse,
    Random,
    /// A random text with a pattern cut from it or drawn independently.
    Instance,
}

fn load(path: &Path) -> Result<Slp> {
    let slp = read_file(path).with_context(|| format!("reading {}", path.display()))?;
    let report = validate(&slp);
    if !report.is_empty() {
        bail!("{} is not a valid grammar:\n{report}", path.display());
    }
    Ok(slp)
}

struct JsonTrace;

impl Observer for JsonTrace {
    fn phase_end(&mut self, stats: &PhaseStats) {
        eprintln!("{}", serde_json::to_string(stats).expect("stats serialize"));
    }
}

fn observer(trace: bool) -> Box<dyn Observer> {
    if trace {
        Box::new(JsonTrace)
    } else {
        Box::new(Quiet)
    }
}

fn fmt_count(c: u64) -> String {
    if c >= SAT_MAX {
        format!(">={SAT_MAX}")
    } else {
        c.to_string()
    }
}

fn fmt_pos(p: Option<u64>) -> String {
    p.map_or("none".into(), |p| p.to_string())
}

fn run_match(a: &MatchArgs) -> Result<bool> {
    let slp = a.input.load()?;
    let (count, first, last, positions): (u64, Option<u64>, Option<u64>, Vec<u64>) = if a.explicit {
        let t = eval_bounded(&slp, slp.text, a.cap)?;
        let p = eval_bounded(&slp, slp.pattern, a.cap)?;
        let all = spm_match(&p, &t);
        let n = a.positions.unwrap_or(0).min(all.len());
        (all.len() as u64, all.first().copied(), all.last().copied(), all[..n].to_vec())
    } else {
        let opts = Options { strategy: a.strategy.into(), ..Options::default() };
        let occ = fcpm_with(&slp, &opts, observer(a.trace).as_mut())?;
        (occ.count(), occ.first(), occ.last(), occ.enumerate(a.positions.unwrap_or(0)))
    };
    let mut out = io::stdout().lock();
    if !(a.count || a.first || a.last || a.positions.is_some()) {
        writeln!(out, "count={} first={}", fmt_count(count), fmt_pos(first))?;
    }
    if a.count {
        writeln!(out, "{}", fmt_count(count))?;
    }
    if a.first {
        writeln!(out, "{}", fmt_pos(first))?;
    }
    if a.last {
        writeln!(out, "{}", fmt_pos(last))?;
    }
    if a.positions.is_some() {
        let s: Vec<String> = positions.iter().map(u64::to_string).collect();
        writeln!(out, "{}", s.join(" "))?;
    }
    Ok(count > 0)
}

fn generate(a: &GenArgs) -> Result<Slp> {
    let letter = Letter(0);
    let slp = match a.family {
        Family::Fibonacci => gen_fibonacci(a.size as usize)?,
        Family::Power => gen_power(letter, a.size)?,
        Family::ThueMorse => gen_thue_morse(a.size as usize)?,
        Family::Random => match a.max_len {
            Some(m) => gen_random_bounded(a.seed, a.size as usize, a.alphabet, m)?,
            None => gen_random(a.seed, a.size as usize, a.alphabet)?,
        },
        Family::Instance => return Ok(gen_random_instance(a.seed, a.size, a.max_len.unwrap_or(a.size))?),
    };
    Ok(match &a.pattern_raw {
        Some(p) => Slp::combine(&slp, &from_text_balanced(&letters_from_str(p)?)?),
        None => slp,
    })
}

/// One line of a bench spec.
#[derive(Deserialize)]
struct BenchFamily {
    family: Family,
    /// Text sizes, read as in `gen --size`.
    sizes: Vec<u64>,
    /// How the pattern derives from the text size: subtracted from the
    /// index for fibonacci and thue-morse, the exponent for power, the
    /// pattern cap for instance. Ignored for random, which matches the
    /// grammar against itself.
    #[serde(default)]
    pattern: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_strategies")]
    strategies: Vec<Strategy>,
    #[serde(default)]
    per_phase: bool,
}

fn default_strategies() -> Vec<Strategy> {
    vec![Strategy::Greedy]
}

#[derive(Serialize)]
struct BenchRecord {
    id: usize,
    family: Family,
    size: u64,
    strategy: Strategy,
    text_len: u64,
    pattern_len: u64,
    rules: usize,
    grammar_size: usize,
    phases: usize,
    count: u64,
    first: Option<u64>,
    max_grammar_size: usize,
    millis: f64,
    blocklen: BlockCounters,
    redirected_cost_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_phase: Option<Vec<PhaseStats>>,
}

fn bench_instance(f: &BenchFamily, size: u64) -> Result<Slp> {
    Ok(match f.family {
        Family::Fibonacci => {
            let k = size as usize;
            Slp::combine(&gen_fibonacci(k)?, &gen_fibonacci(k.saturating_sub(f.pattern as usize).max(1))?)
        }
        Family::ThueMorse => {
            let k = size as usize;
            Slp::combine(&gen_thue_morse(k)?, &gen_thue_morse(k.saturating_sub(f.pattern as usize).max(1))?)
        }
        Family::Power => Slp::combine(&gen_power(Letter(0), size)?, &gen_power(Letter(0), f.pattern.clamp(1, size))?),
        Family::Random => gen_random(f.seed, size as usize, 3)?,
        Family::Instance => gen_random_instance(f.seed ^ size, size, f.pattern.max(1))?,
    })
}

fn run_bench_one(id: usize, f: &BenchFamily, size: u64, strategy: Strategy) -> Result<BenchRecord> {
    let slp = bench_instance(f, size)?;
    let meta = compute_meta(&slp);
    let (text_len, pattern_len) = (meta[slp.text.index()].len, meta[slp.pattern.index()].len);
    let mut trace = slpmatch::Trace::default();
    let start = Instant::now();
    let occ = fcpm_with(&slp, &Options { strategy, ..Options::default() }, &mut trace)?;
    let millis = start.elapsed().as_secs_f64() * 1e3;
    let mut blocklen = BlockCounters::default();
    for s in &trace.phases {
        blocklen.absorb(&s.blocklen);
    }
    // every common length is charged to one rule, at most 2 log M bits each
    let log_m = 64 - text_len.saturating_add(pattern_len).leading_zeros() as u64;
    let redirected_cost_ok =
        trace.phases.iter().all(|s| s.blocklen.redirected_cost_bits <= 2 * log_m * slp.num_rules() as u64);
    Ok(BenchRecord {
        id,
        family: f.family,
        size,
        strategy,
        text_len,
        pattern_len,
        rules: slp.num_rules(),
        grammar_size: slp.size(),
        phases: occ.phases(),
        count: occ.count(),
        first: occ.first(),
        max_grammar_size: trace.phases.iter().map(|s| s.max_grammar_size).max().unwrap_or(slp.size()),
        millis,
        blocklen,
        redirected_cost_ok,
        per_phase: f.per_phase.then_some(trace.phases),
    })
}

fn bench(spec: &Path, out: Option<&Path>, threads: Option<usize>) -> Result<()> {
    let text = fs::read_to_string(spec).with_context(|| format!("reading {}", spec.display()))?;
    let mut families = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: BenchFamily = serde_json::from_str(line).with_context(|| format!("{}:{}", spec.display(), i + 1))?;
        families.push(f);
    }
    let jobs: Vec<(usize, &BenchFamily, u64, Strategy)> = families
        .iter()
        .flat_map(|f| f.sizes.iter().flat_map(move |&s| f.strategies.iter().map(move |&st| (f, s, st))))
        .enumerate()
        .map(|(id, (f, s, st))| (id, f, s, st))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()?;
    let records: Vec<Result<BenchRecord>> =
        pool.install(|| jobs.par_iter().map(|&(id, f, s, st)| run_bench_one(id, f, s, st)).collect());
    let mut w: Box<dyn Write> = match out {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    for r in records {
        writeln!(w, "{}", serde_json::to_string(&r?)?)?;
    }
    w.flush()?;
    Ok(())
}

fn show_letter(a: Letter) -> String {
    letters_to_string(&[a])
}

fn scan(file: &Path, check: bool) -> Result<()> {
    let slp = load(file)?;
    let scan = scan_pairs(&slp, &compute_meta(&slp), &|_, _| true);
    let mut out = io::stdout().lock();
    let mut nc: Vec<(Letter, Letter)> = scan.noncrossing.iter().map(|r| (r.a, r.b)).collect();
    nc.dedup();
    for (a, b) in nc {
        writeln!(out, "noncrossing {}{}", show_letter(a), show_letter(b))?;
    }
    for &(a, b) in &scan.blocked {
        writeln!(out, "blocked {}{}", show_letter(a), show_letter(b))?;
    }
    for &(a, b) in &scan.crossing {
        writeln!(out, "crossing {}{}", show_letter(a), show_letter(b))?;
    }
    for &a in &scan.crossing_blocks {
        writeln!(out, "crossing-block {}", show_letter(a))?;
    }
    if check {
        let brute = classify_crossing_bruteforce(&slp, OracleBudget::default())?;
        let pairs: Vec<(Letter, Letter)> = brute.pairs.into_iter().collect();
        let blocks: Vec<Letter> = brute.blocks.into_iter().collect();
        if pairs != scan.crossing || blocks != scan.crossing_blocks {
            bail!("the scan disagrees with full expansion");
        }
        writeln!(out, "check ok")?;
    }
    Ok(())
}

/// Keeps the grammar seen at the start of a given phase.
struct Stop {
    at: usize,
    seen: Option<Slp>,
    stats: Vec<PhaseStats>,
}

impl Observer for Stop {
    fn phase_start(&mut self, phase: usize, slp: &Slp) {
        if phase == self.at {
            self.seen = Some(slp.clone());
        }
    }

    fn phase_end(&mut self, stats: &PhaseStats) {
        if stats.phase < self.at {
            self.stats.push(stats.clone());
        }
    }
}

fn phase(input: &Input, phases: usize, strategy: StrategyArg) -> Result<()> {
    let slp = input.load()?;
    let mut stop = Stop { at: phases + 1, seen: None, stats: Vec::new() };
    let occ = fcpm_with(&slp, &Options { strategy: strategy.into(), ..Options::default() }, &mut stop)?;
    let mut out = io::stdout().lock();
    for s in &stop.stats {
        writeln!(out, "# {}", serde_json::to_string(s)?)?;
    }
    match stop.seen.as_ref().or(occ.final_slp()) {
        Some(g) => write!(out, "{}", serialize(g))?,
        None => writeln!(out, "# the pattern does not fit in the text")?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Validate { file } => {
            let slp = read_file(&file).with_context(|| format!("reading {}", file.display()))?;
            let report = validate(&slp);
            if report.is_empty() {
                println!("valid");
                Ok(true)
            } else {
                println!("{report}");
                Ok(false)
            }
        }
        Cmd::Decompress { file, axiom, cap } => {
            let slp = load(&file)?;
            let x = match axiom {
                Axiom::Text => slp.text,
                Axiom::Pattern => slp.pattern,
            };
            println!("{}", letters_to_string(&eval_bounded(&slp, x, cap)?));
            Ok(true)
        }
        Cmd::Equal { input, strategy, trace } => {
            let slp = input.load()?;
            let opts = Options { strategy: strategy.into(), ..Options::default() };
            let eq = equal_slp_with(&slp, &opts, observer(trace).as_mut())?;
            println!("{eq}");
            Ok(eq)
        }
        Cmd::Match(a) => run_match(&a),
        Cmd::Gen(a) => {
            let text = serialize(&generate(&a)?);
            match &a.out {
                Some(p) => fs::write(p, text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Cmd::Bench { spec, out, threads } => bench(&spec, out.as_deref(), threads).map(|_| true),
        Cmd::ScanPairs { file, check } => scan(&file, check).map(|_| true),
        Cmd::Phase { input, phases, strategy } => phase(&input, phases, strategy).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
