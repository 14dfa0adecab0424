//! a^(2^20) inside a^(2^60): the count is forced, no expansion is possible.

use std::time::Instant;

use slpmatch::oracle::{oracle_fcpm, OracleBudget};
use slpmatch::{fcpm, gen_power, Letter, Slp};

fn main() -> slpmatch::Result<()> {
    let slp = Slp::combine(&gen_power(Letter(0), 1 << 60)?, &gen_power(Letter(0), 1 << 20)?);
    let start = Instant::now();
    let occ = fcpm(&slp)?;
    println!("count = {} (expected {})", occ.count(), (1u64 << 60) - (1 << 20) + 1);
    println!("first = {:?}, last = {:?}, in {:?}", occ.first(), occ.last(), start.elapsed());
    match oracle_fcpm(&slp, OracleBudget::default()) {
        Err(e) => println!("baseline: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
