//! Sector enumeration and lexicographic ranking.
//!
//! Enumeration is a pruned depth-first walk in letter order 0 < l < r.
//! Ranking uses a suffix-count table: counts[pos][h][u] is the number
//! of ways to finish a string from position pos at height h having
//! already produced u unmatched closing letters.  The same table
//! drives rank and unrank, and its root entry is an independent check
//! of the closed-form sector size.

use super::words::{DyckWord, Letter, SectorLabel, SpinString, classify};
use crate::error::{Error, Result};

/// Default guard for exhaustive sector enumeration.
pub const DEFAULT_ENUM_CAP: usize = 16;

fn check_sector(n: usize, label: SectorLabel) -> Result<()> {
    if label.p + label.q > n {
        return Err(Error::invalid(format!(
            "sector {label} is empty at length {n}"
        )));
    }
    Ok(())
}

/// All strings of length n in the given sector, lexicographic order.
/// Refuses n above [`DEFAULT_ENUM_CAP`]; use the capped variant to
/// override deliberately.
pub fn enumerate_class(n: usize, label: SectorLabel) -> Result<Vec<SpinString>> {
    enumerate_class_capped(n, label, DEFAULT_ENUM_CAP)
}

/// All strings of length n in the given sector, lexicographic order,
/// with an explicit length cap.
pub fn enumerate_class_capped(n: usize, label: SectorLabel, cap: usize) -> Result<Vec<SpinString>> {
    if n > cap {
        return Err(Error::limit(format!(
            "enumeration of length {n} exceeds cap {cap}"
        )));
    }
    check_sector(n, label)?;
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    dfs(n, label, &mut prefix, 0, 0, &mut out);
    Ok(out)
}

fn dfs(
    n: usize,
    label: SectorLabel,
    prefix: &mut Vec<Letter>,
    height: usize,
    unmatched_r: usize,
    out: &mut Vec<SpinString>,
) {
    let pos = prefix.len();
    // Fewest letters that can still reach the target endpoint.
    let need = if unmatched_r < label.p {
        height + (label.p - unmatched_r) + label.q
    } else {
        height.abs_diff(label.q)
    };
    if unmatched_r > label.p || need > n - pos {
        return;
    }
    if pos == n {
        out.push(SpinString(prefix.clone()));
        return;
    }
    for letter in [Letter::Zero, Letter::Left, Letter::Right] {
        let (h, u) = match letter {
            Letter::Zero => (height, unmatched_r),
            Letter::Left => (height + 1, unmatched_r),
            Letter::Right => {
                if height > 0 {
                    (height - 1, unmatched_r)
                } else {
                    (0, unmatched_r + 1)
                }
            }
        };
        prefix.push(letter);
        dfs(n, label, prefix, h, u, out);
        prefix.pop();
    }
}

/// Lexicographic rank/unrank within one sector, backed by a u128
/// suffix-count table.  Table size is O(n^2 p); counts stay below 3^n,
/// so lengths are capped at 80 to keep u128 exact.
pub struct ClassRanker {
    n: usize,
    label: SectorLabel,
    // counts[((pos * (n+2)) + h) * (p+1) + u]
    counts: Vec<u128>,
    heights: usize,
}

impl ClassRanker {
    pub fn new(n: usize, label: SectorLabel) -> Result<Self> {
        if n > 80 {
            return Err(Error::limit(format!(
                "ranking table for length {n} would overflow exact u128 counts"
            )));
        }
        check_sector(n, label)?;
        let heights = n + 2;
        let slots = label.p + 1;
        let mut counts = vec![0u128; (n + 1) * heights * slots];
        let idx = |pos: usize, h: usize, u: usize| (pos * heights + h) * slots + u;
        counts[idx(n, label.q, label.p)] = 1;
        for pos in (0..n).rev() {
            for h in 0..=n {
                for u in 0..slots {
                    let mut total = counts[idx(pos + 1, h, u)]; // Zero
                    total += counts[idx(pos + 1, h + 1, u)]; // Left
                    total += if h > 0 {
                        counts[idx(pos + 1, h - 1, u)]
                    } else if u + 1 < slots {
                        counts[idx(pos + 1, 0, u + 1)]
                    } else {
                        0
                    };
                    counts[idx(pos, h, u)] = total;
                }
            }
        }
        Ok(ClassRanker {
            n,
            label,
            counts,
            heights,
        })
    }

    fn count(&self, pos: usize, h: usize, u: usize) -> u128 {
        if h >= self.heights || u > self.label.p {
            return 0;
        }
        self.counts[(pos * self.heights + h) * (self.label.p + 1) + u]
    }

    /// Number of strings in the sector.
    pub fn size(&self) -> u128 {
        self.count(0, 0, 0)
    }

    fn step(&self, letter: Letter, h: usize, u: usize) -> (usize, usize) {
        match letter {
            Letter::Zero => (h, u),
            Letter::Left => (h + 1, u),
            Letter::Right => {
                if h > 0 {
                    (h - 1, u)
                } else {
                    (0, u + 1)
                }
            }
        }
    }

    /// Lexicographic rank of a string that must live in this sector.
    pub fn rank(&self, s: &SpinString) -> Result<u128> {
        if s.len() != self.n {
            return Err(Error::invalid(format!(
                "rank of length-{} string in a length-{} table",
                s.len(),
                self.n
            )));
        }
        if classify(s) != self.label {
            return Err(Error::invalid(format!(
                "string {s} is not in sector {}",
                self.label
            )));
        }
        let (mut h, mut u) = (0usize, 0usize);
        let mut rank = 0u128;
        for (pos, &letter) in s.letters().iter().enumerate() {
            for smaller in [Letter::Zero, Letter::Left, Letter::Right] {
                if smaller == letter {
                    break;
                }
                let (sh, su) = self.step(smaller, h, u);
                rank += self.count(pos + 1, sh, su);
            }
            let (nh, nu) = self.step(letter, h, u);
            h = nh;
            u = nu;
        }
        Ok(rank)
    }

    /// String at the given lexicographic rank.
    pub fn unrank(&self, mut rank: u128) -> Result<SpinString> {
        if rank >= self.size() {
            return Err(Error::invalid(format!(
                "rank {rank} out of range for sector {} of size {}",
                self.label,
                self.size()
            )));
        }
        let mut letters = Vec::with_capacity(self.n);
        let (mut h, mut u) = (0usize, 0usize);
        for pos in 0..self.n {
            for letter in [Letter::Zero, Letter::Left, Letter::Right] {
                let (nh, nu) = self.step(letter, h, u);
                let here = self.count(pos + 1, nh, nu);
                if rank < here {
                    letters.push(letter);
                    h = nh;
                    u = nu;
                    break;
                }
                rank -= here;
            }
        }
        Ok(SpinString(letters))
    }
}

/// One-shot lexicographic rank within the string's own sector.
pub fn class_rank(s: &SpinString) -> Result<u128> {
    ClassRanker::new(s.len(), classify(s))?.rank(s)
}

/// One-shot unrank within a sector.
pub fn class_unrank(n: usize, label: SectorLabel, rank: u128) -> Result<SpinString> {
    ClassRanker::new(n, label)?.unrank(rank)
}

/// All balanced bracket words with `pairs` pairs, lexicographic in
/// l < r.
pub fn enumerate_dyck(pairs: usize) -> Result<Vec<DyckWord>> {
    if pairs > 32 {
        return Err(Error::limit(format!(
            "enumeration of {pairs}-pair bracket words exceeds cap 32"
        )));
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(2 * pairs);
    dyck_dfs(2 * pairs, &mut prefix, 0, &mut out);
    Ok(out)
}

fn dyck_dfs(len: usize, prefix: &mut Vec<Letter>, height: usize, out: &mut Vec<DyckWord>) {
    let remaining = len - prefix.len();
    if height > remaining {
        return;
    }
    if remaining == 0 {
        out.push(DyckWord::new(prefix.clone()).expect("balanced by construction"));
        return;
    }
    if remaining > height {
        prefix.push(Letter::Left);
        dyck_dfs(len, prefix, height + 1, out);
        prefix.pop();
    }
    if height > 0 {
        prefix.push(Letter::Right);
        dyck_dfs(len, prefix, height - 1, out);
        prefix.pop();
    }
}

fn dyck_counts(pairs: usize) -> Result<Vec<Vec<u128>>> {
    if pairs > 60 {
        return Err(Error::limit(format!(
            "ranking table for {pairs}-pair bracket words would overflow u128"
        )));
    }
    let len = 2 * pairs;
    // counts[pos][h]: completions from position pos at height h.
    let mut counts = vec![vec![0u128; pairs + 2]; len + 1];
    counts[len][0] = 1;
    for pos in (0..len).rev() {
        for h in 0..=pairs {
            let up = counts[pos + 1][h + 1];
            let down = if h > 0 { counts[pos + 1][h - 1] } else { 0 };
            counts[pos][h] = up + down;
        }
    }
    Ok(counts)
}

/// Lexicographic rank of a balanced bracket word among words of the
/// same semilength (l sorts before r).
pub fn dyck_rank(w: &DyckWord) -> Result<u128> {
    let pairs = w.semilength();
    let counts = dyck_counts(pairs)?;
    let mut h = 0usize;
    let mut rank = 0u128;
    for (pos, &letter) in w.letters().iter().enumerate() {
        if letter == Letter::Right {
            rank += counts[pos + 1][h + 1];
            h -= 1;
        } else {
            h += 1;
        }
    }
    Ok(rank)
}

/// Balanced bracket word of the given semilength at the given rank.
pub fn dyck_unrank(pairs: usize, mut rank: u128) -> Result<DyckWord> {
    let counts = dyck_counts(pairs)?;
    if rank >= counts[0][0] {
        return Err(Error::invalid(format!(
            "rank {rank} out of range for {pairs}-pair bracket words"
        )));
    }
    let mut letters = Vec::with_capacity(2 * pairs);
    let mut h = 0usize;
    for pos in 0..2 * pairs {
        let up = counts[pos + 1][h + 1];
        if rank < up {
            letters.push(Letter::Left);
            h += 1;
        } else {
            rank -= up;
            letters.push(Letter::Right);
            h -= 1;
        }
    }
    Ok(DyckWord::new(letters).expect("balanced by construction"))
}

#[cfg(test)]
mod tests {
    use super::super::counting::class_size;
    use super::*;
    use num::{BigUint, FromPrimitive};

    #[test]
    fn two_letter_sector_in_order() {
        let got = enumerate_class(2, SectorLabel::new(0, 1)).unwrap();
        let strings: Vec<String> = got.iter().map(|s| s.to_string()).collect();
        assert_eq!(strings, vec!["0l", "l0"]);
    }

    #[test]
    fn enumeration_matches_counts_and_order() {
        for n in 0..=9usize {
            for p in 0..=n {
                for q in 0..=(n - p) {
                    let label = SectorLabel::new(p, q);
                    let words = enumerate_class(n, label).unwrap();
                    let expect = class_size(n, p + q);
                    assert_eq!(
                        BigUint::from_usize(words.len()).unwrap(),
                        expect,
                        "n={n} {label}"
                    );
                    for w in &words {
                        assert_eq!(classify(w), label);
                    }
                    for pair in words.windows(2) {
                        assert!(pair[0].code() < pair[1].code(), "lex order n={n} {label}");
                    }
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced_and_overridable() {
        let label = SectorLabel::balanced();
        assert!(enumerate_class(17, label).is_err());
        let words = enumerate_class_capped(17, label, 17).unwrap();
        assert_eq!(
            BigUint::from_usize(words.len()).unwrap(),
            class_size(17, 0)
        );
    }

    #[test]
    fn rank_unrank_roundtrip() {
        for n in 0..=8usize {
            for p in 0..=n {
                for q in 0..=(n - p) {
                    let label = SectorLabel::new(p, q);
                    let ranker = ClassRanker::new(n, label).unwrap();
                    let words = enumerate_class(n, label).unwrap();
                    assert_eq!(ranker.size(), words.len() as u128);
                    for (i, w) in words.iter().enumerate() {
                        assert_eq!(ranker.rank(w).unwrap(), i as u128, "{w}");
                        assert_eq!(&ranker.unrank(i as u128).unwrap(), w);
                    }
                }
            }
        }
    }

    #[test]
    fn ranker_size_agrees_with_closed_form() {
        // Independent derivations: transfer-matrix table vs term sum.
        for n in [10usize, 20, 30, 40] {
            for (p, q) in [(0, 0), (1, 0), (0, 3), (2, 2), (5, 1)] {
                let ranker = ClassRanker::new(n, SectorLabel::new(p, q)).unwrap();
                assert_eq!(
                    BigUint::from_u128(ranker.size()).unwrap(),
                    class_size(n, p + q),
                    "n={n} p={p} q={q}"
                );
            }
        }
    }

    #[test]
    fn rank_rejects_foreign_strings() {
        let ranker = ClassRanker::new(4, SectorLabel::balanced()).unwrap();
        let s: SpinString = "l000".parse().unwrap();
        assert!(ranker.rank(&s).is_err());
        assert!(ranker.unrank(ranker.size()).is_err());
        let too_short: SpinString = "00".parse().unwrap();
        assert!(ranker.rank(&too_short).is_err());
    }

    #[test]
    fn dyck_enumeration_is_catalan_and_ordered() {
        use super::super::counting::catalan;
        for pairs in 0..=7usize {
            let words = enumerate_dyck(pairs).unwrap();
            assert_eq!(
                BigUint::from_usize(words.len()).unwrap(),
                catalan(pairs),
                "pairs={pairs}"
            );
            for (i, w) in words.iter().enumerate() {
                assert_eq!(dyck_rank(w).unwrap(), i as u128);
                assert_eq!(&dyck_unrank(pairs, i as u128).unwrap(), w);
            }
            for pair in words.windows(2) {
                assert!(pair[0].code() < pair[1].code());
            }
        }
        assert!(dyck_unrank(3, 4).is_ok());
        assert!(dyck_unrank(3, 5).is_err());
    }

}
