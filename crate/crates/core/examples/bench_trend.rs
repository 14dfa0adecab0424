//! Phases against log2 of the total length, Fibonacci family.

use slpmatch::{compute_meta, fcpm_with, gen_fibonacci, Options, Slp, Strategy, Trace};

fn main() -> slpmatch::Result<()> {
    println!("{:>3} {:>8} {:>7} {:>7} {:>7} {:>7}", "k", "log2 M", "greedy", "binary", "ratio", "max |G|");
    for k in (10..=80).step_by(5) {
        let slp = Slp::combine(&gen_fibonacci(k)?, &gen_fibonacci(k - 3)?);
        let meta = compute_meta(&slp);
        let m = (meta[slp.text.index()].len + meta[slp.pattern.index()].len) as f64;
        let mut phases = [0; 2];
        let mut size = 0;
        for (i, strategy) in [Strategy::Greedy, Strategy::Binary].into_iter().enumerate() {
            let mut tr = Trace::default();
            phases[i] = fcpm_with(&slp, &Options { strategy, ..Options::default() }, &mut tr)?.phases();
            size = size.max(tr.phases.iter().map(|s| s.max_grammar_size).max().unwrap_or(0));
        }
        println!(
            "{k:>3} {:>8.1} {:>7} {:>7} {:>7.3} {size:>7}",
            m.log2(),
            phases[0],
            phases[1],
            phases[0] as f64 / m.log2()
        );
    }
    Ok(())
}
