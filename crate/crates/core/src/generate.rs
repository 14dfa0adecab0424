//! Deterministic instance generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::slp::{eval_bounded, from_text_balanced, Item, Letter, Nt, Slp, SymbolTable};

fn single_axiom(rules: Vec<Vec<Item>>, k: usize) -> Slp {
    let top = Nt(rules.len() as u32 - 1);
    Slp::new(rules, top, top, SymbolTable::with_input_letters(k))
}

/// `X1 -> b`, `X2 -> a`, `Xi -> X(i-1) X(i-2)`; the axiom is `Xk`.
pub fn gen_fibonacci(k: usize) -> Result<Slp> {
    if k == 0 {
        return Err(Error::Param("fibonacci index must be at least 1".into()));
    }
    let mut rules = vec![vec![Item::Letter(Letter(1))], vec![Item::Letter(Letter(0))]];
    for i in 2..k {
        rules.push(vec![Item::Nt(Nt(i as u32 - 1)), Item::Nt(Nt(i as u32 - 2))]);
    }
    rules.truncate(k);
    Ok(single_axiom(rules, 2))
}

/// `letter^exponent` by repeated squaring, in Chomsky normal form.
pub fn gen_power(letter: Letter, exponent: u64) -> Result<Slp> {
    if exponent == 0 {
        return Err(Error::Param("exponent must be at least 1".into()));
    }
    let mut rules = vec![vec![Item::Letter(letter)]];
    let top_bit = 63 - exponent.leading_zeros();
    for i in 1..=top_bit {
        rules.push(vec![Item::Nt(Nt(i - 1)), Item::Nt(Nt(i - 1))]);
    }
    let mut acc = Nt(top_bit);
    for bit in (0..top_bit).rev() {
        if exponent >> bit & 1 == 1 {
            rules.push(vec![Item::Nt(acc), Item::Nt(Nt(bit))]);
            acc = Nt(rules.len() as u32 - 1);
        }
    }
    Ok(single_axiom(rules, letter.index() + 1))
}

/// The Thue-Morse word of length `2^k` over `{a, b}`.
pub fn gen_thue_morse(k: usize) -> Result<Slp> {
    if k == 0 {
        return Err(Error::Param("thue-morse order must be at least 1".into()));
    }
    if k > 62 {
        return Err(Error::Param("thue-morse order must be at most 62".into()));
    }
    let mut rules = vec![vec![Item::Letter(Letter(0))], vec![Item::Letter(Letter(1))]];
    let (mut x, mut y) = (Nt(0), Nt(1));
    for i in 1..=k {
        rules.push(vec![Item::Nt(x), Item::Nt(y)]);
        let nx = Nt(rules.len() as u32 - 1);
        if i < k {
            rules.push(vec![Item::Nt(y), Item::Nt(x)]);
            y = Nt(rules.len() as u32 - 1);
        }
        x = nx;
    }
    Ok(single_axiom(rules, 2))
}

/// A random grammar in Chomsky normal form with `rules` rules over
/// `alphabet` letters. Lengths may grow exponentially.
pub fn gen_random(seed: u64, rules: usize, alphabet: usize) -> Result<Slp> {
    gen_random_bounded(seed, rules, alphabet, u64::MAX)
}

/// Like [`gen_random`] but no rule derives more than `max_len` letters.
pub fn gen_random_bounded(seed: u64, rules: usize, alphabet: usize, max_len: u64) -> Result<Slp> {
    if alphabet == 0 || rules == 0 {
        return Err(Error::Param("need at least one rule and one letter".into()));
    }
    if max_len == 0 {
        return Err(Error::Param("max_len must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terminals = alphabet.min(rules);
    let mut out: Vec<Vec<Item>> = (0..terminals).map(|a| vec![Item::Letter(Letter(a as u32))]).collect();
    let mut len: Vec<u64> = vec![1; terminals];
    while out.len() < rules {
        let i = out.len();
        let pick = |rng: &mut ChaCha8Rng, room: u64| -> Option<usize> {
            let fits: Vec<usize> = (0..i).filter(|&j| len[j] <= room).collect();
            if fits.is_empty() {
                return None;
            }
            // favour recent rules so values grow
            if rng.gen_bool(0.5) {
                let tail = fits.len().min(4);
                Some(fits[fits.len() - 1 - rng.gen_range(0..tail)])
            } else {
                Some(fits[rng.gen_range(0..fits.len())])
            }
        };
        let Some(j) = pick(&mut rng, max_len.saturating_sub(1)) else {
            break;
        };
        let Some(k) = pick(&mut rng, max_len - len[j]) else {
            break;
        };
        out.push(vec![Item::Nt(Nt(j as u32)), Item::Nt(Nt(k as u32))]);
        len.push(len[j].saturating_add(len[k]));
    }
    Ok(single_axiom(out, alphabet))
}

/// A text/pattern instance with text length at most `max_text`. Half of the
/// seeds cut the pattern out of the text, the rest draw it independently.
pub fn gen_random_instance(seed: u64, max_text: u64, max_pattern: u64) -> Result<Slp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_1e55);
    let alphabet = rng.gen_range(1..=4);
    let rules = rng.gen_range(alphabet + 4..alphabet + 120);
    let text = gen_random_bounded(seed, rules, alphabet, max_text)?;
    let t = eval_bounded(&text, text.text, max_text)?;
    let pattern_str: Vec<Letter> = if rng.gen_bool(0.5) {
        let plen = rng.gen_range(1..=t.len().min(max_pattern as usize));
        let start = rng.gen_range(0..=t.len() - plen);
        t[start..start + plen].to_vec()
    } else {
        let plen = rng.gen_range(1..=max_pattern.min(12) as usize);
        (0..plen).map(|_| Letter(rng.gen_range(0..alphabet) as u32)).collect()
    };
    let pattern = from_text_balanced(&pattern_str)?;
    Ok(Slp::combine(&text, &pattern))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slp::letters_to_string;
    use crate::validate::validate;

    fn eval(slp: &Slp) -> String {
        letters_to_string(&eval_bounded(slp, slp.text, 1 << 20).unwrap())
    }

    #[test]
    fn fibonacci_words() {
        assert_eq!(eval(&gen_fibonacci(1).unwrap()), "b");
        assert_eq!(eval(&gen_fibonacci(2).unwrap()), "a");
        assert_eq!(eval(&gen_fibonacci(5).unwrap()), "abaab");
        assert_eq!(eval(&gen_fibonacci(7).unwrap()), "abaababaabaab");
        assert!(gen_fibonacci(0).is_err());
    }

    #[test]
    fn powers() {
        let p = gen_power(Letter(0), 1).unwrap();
        assert_eq!(p.rules.len(), 1);
        assert_eq!(eval(&p), "a");
        for e in [2u64, 3, 5, 12, 100, 1023] {
            let p = gen_power(Letter(2), e).unwrap();
            assert!(validate(&p).is_empty());
            assert!(p.is_cnf());
            assert_eq!(eval(&p), "c".repeat(e as usize));
        }
        let big = gen_power(Letter(0), 1 << 60).unwrap();
        assert_eq!(big.meta()[big.text.index()].len, 1 << 60);
    }

    #[test]
    fn thue_morse() {
        assert_eq!(eval(&gen_thue_morse(1).unwrap()), "ab");
        assert_eq!(eval(&gen_thue_morse(4).unwrap()), "abbabaabbaababba");
        assert!(validate(&gen_thue_morse(30).unwrap()).is_empty());
    }

    #[test]
    fn random_is_deterministic() {
        let a = gen_random(42, 50, 4).unwrap();
        let b = gen_random(42, 50, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_random(43, 50, 4).unwrap());
        assert!(validate(&a).is_empty());
    }

    #[test]
    fn bounded_respects_cap() {
        for seed in 0..30 {
            let s = gen_random_bounded(seed, 60, 3, 500).unwrap();
            assert!(validate(&s).is_empty());
            assert!(s.meta().iter().all(|m| m.len <= 500));
        }
    }

    #[test]
    fn instances_are_valid() {
        for seed in 0..30 {
            let s = gen_random_instance(seed, 2000, 50).unwrap();
            assert!(validate(&s).is_empty(), "{}", validate(&s));
        }
    }
}
