//! The same algorithm on plain strings, phase by phase.

use slpmatch::explicit::{set_equal, spm_match_traced};
use slpmatch::letters_from_str;

fn main() -> slpmatch::Result<()> {
    let t = letters_from_str("abaababaabaababaababaabaababaabaab")?;
    let p = letters_from_str("abaababaab")?;
    let (pos, trace) = spm_match_traced(&p, &t);
    for (i, (pl, tl)) in trace.pattern_lens.iter().zip(&trace.text_lens).enumerate() {
        println!("phase {}: |p| = {pl:>2}, |t| = {tl:>2}", i + 1);
    }
    println!("positions {pos:?}");
    println!("equal to itself: {}", set_equal(&t, &t));
    Ok(())
}
