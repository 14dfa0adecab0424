//! Matching one Fibonacci word inside a much longer one.

use slpmatch::{compute_meta, fcpm_with, gen_fibonacci, Options, Slp, Trace};

fn main() -> slpmatch::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(60);
    let slp = Slp::combine(&gen_fibonacci(k)?, &gen_fibonacci(k - 3)?);
    let meta = compute_meta(&slp);
    println!("|T| = {}, |P| = {}", meta[slp.text.index()].len, meta[slp.pattern.index()].len);

    let mut trace = Trace::default();
    let occ = fcpm_with(&slp, &Options::default(), &mut trace)?;
    for s in &trace.phases {
        println!(
            "phase {:>2}: |P| = {:<16} |T| = {:<18} |G| = {:<4} crossing = {}",
            s.phase, s.pattern_len, s.text_len, s.grammar_size, s.crossing_pairs
        );
    }
    println!("count={} positions={:?}", occ.count(), occ.enumerate(8));
    Ok(())
}
