//! The small instances used to motivate fixing the pattern ends.

use slpmatch::{fcpm, from_text_balanced, letters_from_str, Slp};

fn main() -> slpmatch::Result<()> {
    for (t, p) in [("ababa", "baba"), ("aaab", "aab"), ("ababa", "bab")] {
        let text = from_text_balanced(&letters_from_str(t)?)?;
        let pattern = from_text_balanced(&letters_from_str(p)?)?;
        let occ = fcpm(&Slp::combine(&text, &pattern))?;
        println!("{p:>5} in {t:<6} count={} positions={:?} phases={}", occ.count(), occ.enumerate(10), occ.phases());
    }
    Ok(())
}
