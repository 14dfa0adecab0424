//! Hooking into the phases: re-checking crossing pairs after every pop.

use slpmatch::oracle::{classify_crossing_bruteforce, OracleBudget};
use slpmatch::recompress::Partition;
use slpmatch::generate::gen_random_instance;
use slpmatch::{fcpm_with, Observer, Options, Slp};

#[derive(Default)]
struct Check {
    pops: usize,
    still_crossing: usize,
}

impl Observer for Check {
    fn after_pop(&mut self, _before: Option<&Slp>, after: &Slp, part: &Partition) {
        self.pops += 1;
        let rep = classify_crossing_bruteforce(after, OracleBudget(1 << 24)).expect("small grammar");
        self.still_crossing += rep.pairs.iter().filter(|(a, b)| part.in_left(*a) && part.in_right(*b)).count();
    }
}

fn main() -> slpmatch::Result<()> {
    let mut check = Check::default();
    let mut hits = 0;
    for seed in 0..50 {
        let slp = gen_random_instance(seed, 2_000, 300)?;
        hits += fcpm_with(&slp, &Options::default(), &mut check)?.count();
    }
    println!("{hits} hits, {} pops, {} pairs left crossing", check.pops, check.still_crossing);
    Ok(())
}
