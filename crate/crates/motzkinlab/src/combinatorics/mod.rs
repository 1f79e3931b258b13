//! Bracket-string combinatorics: the `{0, l, r}` alphabet, sector
//! classification, exact counts, enumeration and ranking.
//!
//! A string over `{0, l, r}` is read as a lattice path: `l` steps up,
//! `r` steps down, `0` is flat.  Bracket matching partitions the
//! strings of length `n` into sectors labelled by the number of
//! unmatched `r` (p) and unmatched `l` (q).  The balanced sector
//! `p = q = 0` is the set of Motzkin paths.

mod counting;
mod enumeration;
mod words;

pub use counting::{
    ballot_count, binomial, catalan, catalans_upto, class_size, class_size_row, motzkin_number,
    motzkin_numbers_upto, motzkin_ratio_bounds_hold, motzkin_scaled_growth, CountInt,
    TrinomialRow,
};
pub use enumeration::{
    class_rank, class_unrank, dyck_rank, dyck_unrank, enumerate_class, enumerate_class_capped,
    enumerate_dyck, ClassRanker, DEFAULT_ENUM_CAP,
};
pub use words::{
    canonical_string, classify, dyck_projection, mirror, DyckWord, Letter, LocalMove, SectorLabel,
    SpinString,
};
