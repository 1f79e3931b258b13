//! String types and the height-scan sector classification.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One site of the chain: blank, opening bracket, or closing bracket.
///
/// The discriminants give the mixed-radix digit used for full-space
/// basis indices; the derived order `0 < l < r` is also the
/// lexicographic order used everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Zero = 0,
    Left = 1,
    Right = 2,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::Zero, Letter::Left, Letter::Right];

    pub fn to_char(self) -> char {
        match self {
            Letter::Zero => '0',
            Letter::Left => 'l',
            Letter::Right => 'r',
        }
    }

    pub fn from_char(c: char) -> Result<Letter> {
        match c {
            '0' => Ok(Letter::Zero),
            'l' => Ok(Letter::Left),
            'r' => Ok(Letter::Right),
            other => Err(Error::invalid(format!("unknown letter '{other}'"))),
        }
    }

    /// Swap the bracket direction; blanks are fixed.
    pub fn flipped(self) -> Letter {
        match self {
            Letter::Zero => Letter::Zero,
            Letter::Left => Letter::Right,
            Letter::Right => Letter::Left,
        }
    }
}

/// A configuration of the chain: a word over `{0, l, r}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinString(pub Vec<Letter>);

impl SpinString {
    pub fn new(letters: Vec<Letter>) -> Self {
        SpinString(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Base-3 code with site 1 as the most significant digit, so the
    /// numeric order of codes is the lexicographic order of strings.
    /// Usable as a full-space basis index for n <= 40.
    pub fn code(&self) -> u64 {
        assert!(self.len() <= 40, "code overflows u64 beyond n = 40");
        self.0
            .iter()
            .fold(0u64, |acc, &l| acc * 3 + l as u64)
    }

    pub fn from_code(mut code: u64, n: usize) -> Self {
        let mut letters = vec![Letter::Zero; n];
        for slot in letters.iter_mut().rev() {
            *slot = match code % 3 {
                0 => Letter::Zero,
                1 => Letter::Left,
                _ => Letter::Right,
            };
            code /= 3;
        }
        debug_assert_eq!(code, 0);
        SpinString(letters)
    }
}

impl fmt::Display for SpinString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for SpinString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Letter::from_char)
            .collect::<Result<Vec<_>>>()
            .map(SpinString)
    }
}

/// Sector label: `p` unmatched closing brackets followed (after
/// reduction) by `q` unmatched opening brackets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SectorLabel {
    pub p: usize,
    pub q: usize,
}

impl SectorLabel {
    pub fn new(p: usize, q: usize) -> Self {
        SectorLabel { p, q }
    }

    pub fn balanced() -> Self {
        SectorLabel { p: 0, q: 0 }
    }

    pub fn is_balanced(self) -> bool {
        self.p == 0 && self.q == 0
    }

    /// Total number of unmatched brackets.
    pub fn excess(self) -> usize {
        self.p + self.q
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Classify a string by a single height scan.  Height rises on `l` and
/// falls on `r`; an `r` at height zero is unmatched and bumps `p`, the
/// final height is `q`.  This agrees with full bracket reduction.
pub fn classify(s: &SpinString) -> SectorLabel {
    let mut p = 0usize;
    let mut h = 0usize;
    for &l in s.letters() {
        match l {
            Letter::Zero => {}
            Letter::Left => h += 1,
            Letter::Right => {
                if h == 0 {
                    p += 1;
                } else {
                    h -= 1;
                }
            }
        }
    }
    SectorLabel { p, q: h }
}

/// The sector representative `r^p 0^(n-p-q) l^q`.
pub fn canonical_string(n: usize, label: SectorLabel) -> Result<SpinString> {
    if label.excess() > n {
        return Err(Error::invalid(format!(
            "sector {label} is empty at length {n}"
        )));
    }
    let mut letters = Vec::with_capacity(n);
    letters.extend(std::iter::repeat_n(Letter::Right, label.p));
    letters.extend(std::iter::repeat_n(Letter::Zero, n - label.excess()));
    letters.extend(std::iter::repeat_n(Letter::Left, label.q));
    Ok(SpinString(letters))
}

/// Site reversal combined with bracket flip; maps sector (p,q) onto
/// (q,p) and commutes with the Hamiltonian.
pub fn mirror(s: &SpinString) -> SpinString {
    SpinString(s.letters().iter().rev().map(|l| l.flipped()).collect())
}

/// The three moves that generate each sector: `00 <-> lr`, `0l <-> l0`,
/// `0r <-> r0`, applied at a chosen bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalMove {
    /// `00 <-> lr` (whichever of the two patterns is present).
    PairToggle,
    /// `0l <-> l0`.
    SwapLeft,
    /// `0r <-> r0`.
    SwapRight,
}

impl LocalMove {
    pub const ALL: [LocalMove; 3] = [LocalMove::PairToggle, LocalMove::SwapLeft, LocalMove::SwapRight];

    /// Apply at sites (pos, pos+1); `None` if the pattern does not match.
    pub fn apply(self, s: &SpinString, pos: usize) -> Option<SpinString> {
        use Letter::*;
        if pos + 1 >= s.len() {
            return None;
        }
        let (a, b) = (s.0[pos], s.0[pos + 1]);
        let replacement = match self {
            LocalMove::PairToggle => match (a, b) {
                (Zero, Zero) => (Left, Right),
                (Left, Right) => (Zero, Zero),
                _ => return None,
            },
            LocalMove::SwapLeft => match (a, b) {
                (Zero, Left) => (Left, Zero),
                (Left, Zero) => (Zero, Left),
                _ => return None,
            },
            LocalMove::SwapRight => match (a, b) {
                (Zero, Right) => (Right, Zero),
                (Right, Zero) => (Zero, Right),
                _ => return None,
            },
        };
        let mut out = s.clone();
        out.0[pos] = replacement.0;
        out.0[pos + 1] = replacement.1;
        Some(out)
    }
}

/// A balanced bracket word over `{l, r}` (a Dyck path).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyckWord(Vec<Letter>);

impl DyckWord {
    pub fn empty() -> Self {
        DyckWord(Vec::new())
    }

    /// Validates balance: never more `r` than `l` in a prefix, equal in total.
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        let mut h = 0i64;
        for &l in &letters {
            match l {
                Letter::Left => h += 1,
                Letter::Right => h -= 1,
                Letter::Zero => return Err(Error::invalid("blank inside a bracket word")),
            }
            if h < 0 {
                return Err(Error::invalid("unmatched closing bracket"));
            }
        }
        if h != 0 {
            return Err(Error::invalid("unmatched opening bracket"));
        }
        Ok(DyckWord(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of bracket pairs.
    pub fn semilength(&self) -> usize {
        self.0.len() / 2
    }

    /// Positions i with `l` at i and `r` at i+1: the removable pairs.
    pub fn peak_positions(&self) -> Vec<usize> {
        (0..self.0.len().saturating_sub(1))
            .filter(|&i| self.0[i] == Letter::Left && self.0[i + 1] == Letter::Right)
            .collect()
    }

    /// Remove the `lr` pair at a peak position.
    pub fn remove_pair(&self, pos: usize) -> Result<DyckWord> {
        if pos + 1 >= self.0.len()
            || self.0[pos] != Letter::Left
            || self.0[pos + 1] != Letter::Right
        {
            return Err(Error::invalid("no removable pair at position"));
        }
        let mut out = self.0.clone();
        out.drain(pos..pos + 2);
        Ok(DyckWord(out))
    }

    /// Insert an `lr` pair after `gap` existing letters (gap in 0..=len).
    pub fn insert_pair(&self, gap: usize) -> Result<DyckWord> {
        if gap > self.0.len() {
            return Err(Error::invalid("insertion gap out of range"));
        }
        let mut out = self.0.clone();
        out.splice(gap..gap, [Letter::Left, Letter::Right]);
        Ok(DyckWord(out))
    }

    /// Lexicographic code (l = 0 bit, r = 1 bit); orders words of a
    /// common semilength.
    pub fn code(&self) -> u64 {
        assert!(self.0.len() <= 63);
        self.0
            .iter()
            .fold(0u64, |acc, &l| (acc << 1) | (l == Letter::Right) as u64)
    }

    /// Embed into a chain configuration (no blanks).
    pub fn to_spin_string(&self) -> SpinString {
        SpinString(self.0.clone())
    }
}

impl fmt::Display for DyckWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for DyckWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "-" {
            return Ok(DyckWord::empty());
        }
        let letters = s
            .chars()
            .map(Letter::from_char)
            .collect::<Result<Vec<_>>>()?;
        DyckWord::new(letters)
    }
}

/// Drop the blanks of a balanced string; the surviving brackets form a
/// Dyck word.  Errors when the string is not in the balanced sector.
pub fn dyck_projection(s: &SpinString) -> Result<DyckWord> {
    if !classify(s).is_balanced() {
        return Err(Error::invalid("bracket projection of an unbalanced string"));
    }
    let brackets: Vec<Letter> = s
        .letters()
        .iter()
        .copied()
        .filter(|&l| l != Letter::Zero)
        .collect();
    DyckWord::new(brackets)
}
