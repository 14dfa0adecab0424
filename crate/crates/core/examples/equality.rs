//! Two different grammars for one string, then one with a letter changed.

use slpmatch::{equal_slp, eval_bounded, from_text_balanced, gen_thue_morse, Letter, Slp};

fn main() -> slpmatch::Result<()> {
    let tm = gen_thue_morse(14)?;
    let mut s = eval_bounded(&tm, tm.text, 1 << 20)?;
    let flat = from_text_balanced(&s)?;
    println!("{} rules vs {} rules, equal: {}", tm.num_rules(), flat.num_rules(), equal_slp(&Slp::combine(&tm, &flat))?);

    let i = s.len() / 3;
    s[i] = Letter(1 - s[i].0);
    let changed = from_text_balanced(&s)?;
    println!("after flipping letter {}: equal: {}", i + 1, equal_slp(&Slp::combine(&tm, &changed))?);
    Ok(())
}
