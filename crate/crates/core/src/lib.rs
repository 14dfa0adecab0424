//! Pattern matching and equality testing on grammar-compressed strings.
//!
//! Texts and patterns are given as straight-line programs ([`Slp`]). The
//! algorithms never decompress them: they rewrite the grammar in phases,
//! replacing pairs `ab` and blocks `a^k` by fresh letters until the pattern
//! is a single letter, and then read occurrences off the rewritten text.
//!
//! ```
//! use slpmatch::{fcpm, gen_fibonacci, from_text_balanced, letters_from_str, Slp};
//!
//! let text = gen_fibonacci(7).unwrap(); // abaababaabaab
//! let pattern = from_text_balanced(&letters_from_str("aba").unwrap()).unwrap();
//! let occ = fcpm(&Slp::combine(&text, &pattern)).unwrap();
//! assert_eq!(occ.count(), 4);
//! assert_eq!(occ.enumerate(10), vec![1, 4, 6, 9]);
//! ```

pub mod blocklen;
pub mod endfix;
pub mod error;
pub mod explicit;
pub mod fcpm;
pub mod format;
pub mod generate;
pub mod oracle;
pub mod radix;
pub mod recompress;
pub mod slp;
pub mod validate;

pub use blocklen::BlockLen;
pub use error::{Error, Result};
pub use fcpm::{
    equal_slp, equal_slp_with, fcpm, fcpm_with, Observer, OccurrenceSet, Options, PhaseStats, Quiet, Strategy, Trace,
};
pub use generate::{gen_fibonacci, gen_power, gen_random, gen_random_bounded, gen_thue_morse};
pub use slp::{
    compute_meta, eval_bounded, from_text_balanced, letters_from_str, letters_to_string,
    renumber_alphabet, Item, Letter, Nt, Slp, SymbolMeta, SymbolTable, SAT_MAX,
};
pub use validate::{validate, ValidationReport, Violation};
