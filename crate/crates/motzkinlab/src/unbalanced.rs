//! Unmatched-bracket sectors: marker reduction and the hopping chain.
//!
//! A string with `p` unmatched closing brackets and no unmatched
//! opening ones splits into balanced segments separated by the
//! unmatched brackets, which move past blanks but never react.
//! Replacing the first unmatched bracket by an `x` marker and the rest
//! by `y` markers turns the sector block of the chain Hamiltonian into
//! a marker Hamiltonian with the same matrix elements.  Dropping the
//! `y` motion terms can only lower the ground energy and decouples the
//! region left of the first `y`, so the analysis reduces to a single
//! `x` marker.  Averaging over the balanced segments then leaves a
//! one-particle hopping chain with exact rational amplitudes, whose
//! walk form certifies the gap through straight-line path loads.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num::{BigInt, BigRational, BigUint, One, ToPrimitive, Zero};

use crate::combinatorics::{
    classify, enumerate_class_capped, motzkin_numbers_upto, Letter, SectorLabel, SpinString,
};
use crate::eigensolve::{lowest_eigenpairs, smallest_above_kernel, LinearOp, MatFreeOp};
use crate::error::{Error, Result};
use crate::hamiltonian::{sector_block_on, SectorBasis, Variant};

/// Largest chain for which the single-marker operator is assembled.
pub const X_CHAIN_SITE_CAP: usize = 12;

/// Largest chain for which a marked sector block is assembled.
pub const MARKED_SITE_CAP: usize = 12;

/// Largest chain for which hopping amplitudes are computed.
pub const HOPPING_SITE_CAP: usize = 5000;

/// Largest hopping chain materialized as a dense matrix.
pub const HOPPING_DENSE_CAP: usize = 2000;

/// Letter of the marked alphabet: the three chain letters plus two
/// marker species standing in for unmatched closing brackets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mark {
    Blank,
    Left,
    Right,
    /// The leftmost unmatched closing bracket.
    X,
    /// Every other unmatched closing bracket.
    Y,
}

impl Mark {
    fn to_letter(self) -> Letter {
        match self {
            Mark::Blank => Letter::Zero,
            Mark::Left => Letter::Left,
            Mark::Right | Mark::X | Mark::Y => Letter::Right,
        }
    }
}

/// Marks a string with unmatched closing brackets and no unmatched
/// opening ones: the first unmatched bracket becomes `X`, the others
/// become `Y`, matched letters stay themselves.
pub fn mark_unmatched(s: &SpinString) -> Result<Vec<Mark>> {
    let label = classify(s);
    if label.q != 0 {
        return Err(Error::invalid(
            "marking requires no unmatched opening brackets",
        ));
    }
    if label.p == 0 {
        return Err(Error::invalid("marking requires an unmatched bracket"));
    }
    let mut height = 0usize;
    let mut seen_first = false;
    let marks = s
        .letters()
        .iter()
        .map(|&l| match l {
            Letter::Zero => Mark::Blank,
            Letter::Left => {
                height += 1;
                Mark::Left
            }
            Letter::Right => {
                if height > 0 {
                    height -= 1;
                    Mark::Right
                } else if seen_first {
                    Mark::Y
                } else {
                    seen_first = true;
                    Mark::X
                }
            }
        })
        .collect();
    Ok(marks)
}

fn unmark(marks: &[Mark]) -> SpinString {
    SpinString::new(marks.iter().map(|m| m.to_letter()).collect())
}

/// Swap partner of a marked pair under the local terms: pair creation
/// on two blanks, or transport of any non-blank species past a blank.
fn mark_partner(a: Mark, b: Mark) -> Option<(Mark, Mark)> {
    match (a, b) {
        (Mark::Blank, Mark::Blank) => Some((Mark::Left, Mark::Right)),
        (Mark::Left, Mark::Right) => Some((Mark::Blank, Mark::Blank)),
        (Mark::Blank, m) if m != Mark::Blank => Some((m, Mark::Blank)),
        (m, Mark::Blank) => Some((Mark::Blank, m)),
        _ => None,
    }
}

/// Marker Hamiltonian on one unmatched sector: detection of the first
/// marker at site 1, pair creation and bracket transport on the
/// balanced letters, and blank transport of both marker species.  The
/// basis is the sector basis itself, so entries can be compared with
/// the plain sector block one for one.
pub struct MarkedOperator {
    basis: Arc<SectorBasis>,
    marks: Vec<Vec<Mark>>,
    rows: Vec<Vec<(u32, f64)>>,
}

/// Assembles the marker Hamiltonian on the sector with `p` unmatched
/// closing brackets.
pub fn marked_block(n: usize, p: usize) -> Result<MarkedOperator> {
    if n < 2 {
        return Err(Error::invalid(format!("chain length {n} below minimum 2")));
    }
    if n > MARKED_SITE_CAP {
        return Err(Error::limit(format!(
            "marked block at length {n} exceeds cap {MARKED_SITE_CAP}"
        )));
    }
    if p == 0 || p > n {
        return Err(Error::invalid(format!(
            "marked block needs 1 <= p <= n, got p={p}"
        )));
    }
    let basis = Arc::new(SectorBasis::new(n, SectorLabel::new(p, 0))?);
    let marks: Vec<Vec<Mark>> = basis
        .states()
        .iter()
        .map(mark_unmatched)
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(basis.dim());
    let mut scratch: Vec<(u32, f64)> = Vec::new();
    for m in &marks {
        scratch.clear();
        let self_index = basis
            .index_of(&unmark(m))
            .expect("marked state unparses into its own sector");
        if m[0] == Mark::X {
            scratch.push((self_index as u32, 1.0));
        }
        for site in 0..n - 1 {
            if let Some((a, b)) = mark_partner(m[site], m[site + 1]) {
                let mut other = m.clone();
                other[site] = a;
                other[site + 1] = b;
                let col = basis
                    .index_of(&unmark(&other))
                    .expect("local moves stay inside the sector");
                scratch.push((self_index as u32, 0.5));
                scratch.push((col as u32, -0.5));
            }
        }
        scratch.sort_unstable_by_key(|&(c, _)| c);
        let mut row: Vec<(u32, f64)> = Vec::new();
        for &(c, v) in scratch.iter() {
            match row.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => row.push((c, v)),
            }
        }
        row.retain(|&(_, v)| v != 0.0);
        rows.push(row);
    }
    Ok(MarkedOperator { basis, marks, rows })
}

impl MarkedOperator {
    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    /// Marked form of one basis state.
    pub fn marks(&self, i: usize) -> &[Mark] {
        &self.marks[i]
    }

    /// Entry at (row, col); zero when absent.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        match self.rows[row].binary_search_by_key(&(col as u32), |&(c, _)| c) {
            Ok(k) => self.rows[row][k].1,
            Err(_) => 0.0,
        }
    }

    /// Entrywise equality with the plain sector block of the
    /// one-boundary Hamiltonian.  All entries are half-integers, so
    /// equality is exact.
    pub fn matches_sector_block(&self) -> Result<bool> {
        let plain = sector_block_on(self.basis.clone(), Variant::Simplified)?;
        let mut plain_rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); self.dim()];
        for (r, c, v) in plain.entries() {
            if v != 0.0 {
                plain_rows[r].push((c as u32, v));
            }
        }
        Ok(plain_rows == self.rows)
    }
}

impl LinearOp for MarkedOperator {
    fn dim(&self) -> usize {
        MarkedOperator::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, row) in self.rows.iter().enumerate() {
            y[r] = row.iter().map(|&(c, v)| v * x[c as usize]).sum();
        }
    }
}

/// Single-marker Hamiltonian: the chain carries one `x` marker at
/// position j with balanced strings on both sides.  States are grouped
/// by marker position; the balanced-letter terms never move the
/// marker, the blank-transport terms move it one site.
pub struct XChainOperator {
    n: usize,
    block_start: Vec<usize>,
    lefts: Vec<SpinString>,
    rights: Vec<SpinString>,
    xpos: Vec<u32>,
    index: HashMap<(u32, u64, u64), usize>,
    pi_rows: Vec<Vec<(u32, f64)>>,
    theta_rows: Vec<Vec<(u32, f64)>>,
}

/// Assembles the single-marker Hamiltonian on `n` sites.
pub fn build_hx(n: usize) -> Result<XChainOperator> {
    if n < 2 {
        return Err(Error::invalid(format!("chain length {n} below minimum 2")));
    }
    if n > X_CHAIN_SITE_CAP {
        return Err(Error::limit(format!(
            "single-marker build at length {n} exceeds cap {X_CHAIN_SITE_CAP}"
        )));
    }
    let balanced = SectorLabel::balanced();
    let mut block_start = vec![0usize];
    let mut lefts = Vec::new();
    let mut rights = Vec::new();
    let mut xpos = Vec::new();
    let mut index = HashMap::new();
    for j in 1..=n {
        let side_l = enumerate_class_capped(j - 1, balanced, n)?;
        let side_r = enumerate_class_capped(n - j, balanced, n)?;
        for s in &side_l {
            for t in &side_r {
                let i = lefts.len();
                index.insert((j as u32, s.code(), t.code()), i);
                lefts.push(s.clone());
                rights.push(t.clone());
                xpos.push(j as u32);
            }
        }
        block_start.push(lefts.len());
    }

    let dim = lefts.len();
    let mut pi_rows = Vec::with_capacity(dim);
    let mut theta_rows = Vec::with_capacity(dim);
    let swap = |letters: &[Letter], k: usize| -> Option<(Letter, Letter)> {
        match (letters[k], letters[k + 1]) {
            (Letter::Zero, Letter::Zero) => Some((Letter::Left, Letter::Right)),
            (Letter::Left, Letter::Right) => Some((Letter::Zero, Letter::Zero)),
            (Letter::Zero, l) if l != Letter::Zero => Some((l, Letter::Zero)),
            (l, Letter::Zero) if l != Letter::Zero => Some((Letter::Zero, l)),
            _ => None,
        }
    };
    for i in 0..dim {
        let j = xpos[i] as usize;
        let (s, t) = (&lefts[i], &rights[i]);
        let mut pi_scratch: Vec<(u32, f64)> = Vec::new();
        let mut theta_scratch: Vec<(u32, f64)> = Vec::new();
        // Balanced-letter terms inside each side.
        for (side, other, offset_is_left) in [(s, t, true), (t, s, false)] {
            let letters = side.letters();
            for k in 0..letters.len().saturating_sub(1) {
                if let Some((a, b)) = swap(letters, k) {
                    let mut out = letters.to_vec();
                    out[k] = a;
                    out[k + 1] = b;
                    let moved = SpinString::new(out);
                    let key = if offset_is_left {
                        (j as u32, moved.code(), other.code())
                    } else {
                        (j as u32, other.code(), moved.code())
                    };
                    let col = index[&key];
                    pi_scratch.push((i as u32, 0.5));
                    pi_scratch.push((col as u32, -0.5));
                }
            }
        }
        // Marker transport past a blank.
        if j > 1 && s.letters().last() == Some(&Letter::Zero) {
            let new_s = SpinString::new(s.letters()[..j - 2].to_vec());
            let mut new_t = vec![Letter::Zero];
            new_t.extend_from_slice(t.letters());
            let col = index[&(j as u32 - 1, new_s.code(), SpinString::new(new_t).code())];
            theta_scratch.push((i as u32, 0.5));
            theta_scratch.push((col as u32, -0.5));
        }
        if j < n && t.letters().first() == Some(&Letter::Zero) {
            let mut new_s = s.letters().to_vec();
            new_s.push(Letter::Zero);
            let new_t = SpinString::new(t.letters()[1..].to_vec());
            let col = index[&(j as u32 + 1, SpinString::new(new_s).code(), new_t.code())];
            theta_scratch.push((i as u32, 0.5));
            theta_scratch.push((col as u32, -0.5));
        }
        let fold = |mut scratch: Vec<(u32, f64)>| -> Vec<(u32, f64)> {
            scratch.sort_unstable_by_key(|&(c, _)| c);
            let mut row: Vec<(u32, f64)> = Vec::new();
            for &(c, v) in &scratch {
                match row.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => row.push((c, v)),
                }
            }
            row.retain(|&(_, v)| v != 0.0);
            row
        };
        pi_rows.push(fold(pi_scratch));
        theta_rows.push(fold(theta_scratch));
    }
    Ok(XChainOperator {
        n,
        block_start,
        lefts,
        rights,
        xpos,
        index,
        pi_rows,
        theta_rows,
    })
}

impl XChainOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.lefts.len()
    }

    /// Marker position (1-based) of one basis state.
    pub fn marker_position(&self, i: usize) -> usize {
        self.xpos[i] as usize
    }

    /// Index range of the states with the marker at position j.
    pub fn block_range(&self, j: usize) -> std::ops::Range<usize> {
        self.block_start[j - 1]..self.block_start[j]
    }

    /// The two balanced sides of one basis state.
    pub fn sides(&self, i: usize) -> (&SpinString, &SpinString) {
        (&self.lefts[i], &self.rights[i])
    }

    /// Index of the state with the marker at j between the given sides.
    pub fn index_of(&self, j: usize, s: &SpinString, t: &SpinString) -> Option<usize> {
        self.index.get(&(j as u32, s.code(), t.code())).copied()
    }

    /// y = (balanced-letter part) x; the marker never moves.
    pub fn apply_unperturbed(&self, x: &[f64], y: &mut [f64]) {
        for (r, row) in self.pi_rows.iter().enumerate() {
            y[r] = row.iter().map(|&(c, v)| v * x[c as usize]).sum();
        }
    }

    /// y = (marker detection + marker transport) x.
    pub fn apply_perturbation(&self, x: &[f64], y: &mut [f64]) {
        for (r, row) in self.theta_rows.iter().enumerate() {
            let mut acc: f64 = row.iter().map(|&(c, v)| v * x[c as usize]).sum();
            if self.xpos[r] == 1 {
                acc += x[r];
            }
            y[r] = acc;
        }
    }

    /// Entry of the marker-transport part alone.
    pub fn transport_entry(&self, row: usize, col: usize) -> f64 {
        match self.theta_rows[row].binary_search_by_key(&(col as u32), |&(c, _)| c) {
            Ok(k) => self.theta_rows[row][k].1,
            Err(_) => 0.0,
        }
    }

    /// Normalized uniform state on the block with the marker at j: a
    /// ground state of the unperturbed part.
    pub fn block_ground_vector(&self, j: usize) -> Vec<f64> {
        let range = self.block_range(j);
        let amp = 1.0 / (range.len() as f64).sqrt();
        let mut v = vec![0.0; self.dim()];
        for i in range {
            v[i] = amp;
        }
        v
    }

    /// Gap of the unperturbed part above its n-fold ground space,
    /// with the solver residual.
    pub fn unperturbed_gap(&self, tol: f64, seed: u64) -> Result<(f64, f64)> {
        let op = MatFreeOp::new(self.dim(), |x: &[f64], y: &mut [f64]| {
            self.apply_unperturbed(x, y)
        });
        let kernel: Vec<Vec<f64>> = (1..=self.n).map(|j| self.block_ground_vector(j)).collect();
        smallest_above_kernel(&op, &kernel, tol, seed)
    }
}

impl LinearOp for XChainOperator {
    fn dim(&self) -> usize {
        XChainOperator::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_unperturbed(x, y);
        let mut extra = vec![0.0; x.len()];
        self.apply_perturbation(x, &mut extra);
        for (yi, e) in y.iter_mut().zip(extra) {
            *yi += e;
        }
    }
}

/// One-marker hopping chain: exact squared amplitudes
/// `alpha_sq[j] = M_{n-j-1} / (2 M_{n-j})` and
/// `beta_sq[j] = M_{j-1} / (2 M_j)` for the bond (j, j+1), plus the
/// exact stationary weights `pi(j) = M_{j-1} M_{n-j} / Z`.
pub struct HoppingChain {
    n: usize,
    alpha_sq: Vec<BigRational>,
    beta_sq: Vec<BigRational>,
    pi: Vec<BigRational>,
}

/// Builds the hopping chain on `n` sites from exact Motzkin counts.
pub fn build_hopping(n: usize) -> Result<HoppingChain> {
    if n < 2 {
        return Err(Error::invalid(format!("chain length {n} below minimum 2")));
    }
    if n > HOPPING_SITE_CAP {
        return Err(Error::limit(format!(
            "hopping chain at length {n} exceeds cap {HOPPING_SITE_CAP}"
        )));
    }
    let m = motzkin_numbers_upto(n - 1);
    let big = |u: &BigUint| BigInt::from(u.clone());
    let alpha_sq: Vec<BigRational> = (1..n)
        .map(|j| BigRational::new(big(&m[n - j - 1]), 2 * big(&m[n - j])))
        .collect();
    let beta_sq: Vec<BigRational> = (1..n)
        .map(|j| BigRational::new(big(&m[j - 1]), 2 * big(&m[j])))
        .collect();
    let weights: Vec<BigInt> = (1..=n).map(|j| big(&m[j - 1]) * big(&m[n - j])).collect();
    let total: BigInt = weights.iter().sum();
    let pi = weights
        .into_iter()
        .map(|w| BigRational::new(w, total.clone()))
        .collect();
    Ok(HoppingChain {
        n,
        alpha_sq,
        beta_sq,
        pi,
    })
}

impl HoppingChain {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Squared right-hop amplitudes, bond j = 1..n-1.
    pub fn alpha_sq(&self) -> &[BigRational] {
        &self.alpha_sq
    }

    /// Squared left-hop amplitudes, bond j = 1..n-1.
    pub fn beta_sq(&self) -> &[BigRational] {
        &self.beta_sq
    }

    /// Exact stationary weights of the hopping walk, sites 1..n.
    pub fn stationary(&self) -> &[BigRational] {
        &self.pi
    }

    /// All squared amplitudes lie in [1/6, 1/2] exactly.
    pub fn amplitudes_in_bounds(&self) -> bool {
        let lo = BigRational::new(BigInt::one(), BigInt::from(6));
        let hi = BigRational::new(BigInt::one(), BigInt::from(2));
        self.alpha_sq
            .iter()
            .chain(&self.beta_sq)
            .all(|v| *v >= lo && *v <= hi)
    }

    /// Every bond operator is a nonnegative rank-1 term with trace
    /// `alpha_sq + beta_sq` in (0, 1]; it is an exact projector only
    /// when that trace is 1.
    pub fn bond_traces(&self) -> Vec<BigRational> {
        self.alpha_sq
            .iter()
            .zip(&self.beta_sq)
            .map(|(a, b)| a + b)
            .collect()
    }

    fn check_dense(&self) -> Result<()> {
        if self.n > HOPPING_DENSE_CAP {
            return Err(Error::limit(format!(
                "dense hopping matrix at length {} exceeds cap {HOPPING_DENSE_CAP}",
                self.n
            )));
        }
        Ok(())
    }

    /// Dense motion part: the sum of the rank-1 bond terms.
    pub fn move_matrix(&self) -> Result<DMatrix<f64>> {
        self.check_dense()?;
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n - 1 {
            let a2 = self.alpha_sq[j].to_f64().expect("amplitude fits in f64");
            let b2 = self.beta_sq[j].to_f64().expect("amplitude fits in f64");
            let ab = (a2 * b2).sqrt();
            m[(j, j)] += a2;
            m[(j + 1, j + 1)] += b2;
            m[(j, j + 1)] -= ab;
            m[(j + 1, j)] -= ab;
        }
        Ok(m)
    }

    /// Dense chain operator: marker detection at site 1 plus motion.
    pub fn matrix(&self) -> Result<DMatrix<f64>> {
        let mut m = self.move_matrix()?;
        m[(0, 0)] += 1.0;
        Ok(m)
    }

    /// Normalized ground state of the motion part, sites 1..n.
    pub fn ground(&self) -> Vec<f64> {
        self.pi
            .iter()
            .map(|p| p.to_f64().expect("weight fits in f64").sqrt())
            .collect()
    }

    /// Euclidean norm of (motion part) applied to the ground state;
    /// structurally zero, so this measures only rounding.
    pub fn move_ground_residual(&self) -> f64 {
        let g = self.ground();
        let n = self.n;
        let mut y = vec![0.0; n];
        for j in 0..n - 1 {
            let a2 = self.alpha_sq[j].to_f64().expect("amplitude fits in f64");
            let b2 = self.beta_sq[j].to_f64().expect("amplitude fits in f64");
            let ab = (a2 * b2).sqrt();
            y[j] += a2 * g[j] - ab * g[j + 1];
            y[j + 1] += b2 * g[j + 1] - ab * g[j];
        }
        y.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Ground energy of the chain operator with the site-1 detector.
    pub fn lambda1(&self) -> Result<f64> {
        let m = self.matrix()?;
        let eigs = m.symmetric_eigenvalues();
        Ok(eigs.iter().fold(f64::INFINITY, |a, &b| a.min(b)))
    }
}

/// Row-stochastic walk form of the hopping chain, all entries exact.
pub struct HoppingWalk {
    n: usize,
    up: Vec<BigRational>,
    down: Vec<BigRational>,
    diag: Vec<BigRational>,
    pi: Vec<BigRational>,
}

/// Walk matrix of the hopping chain on sites 1..n.
pub fn hopping_walk(n: usize) -> Result<HoppingWalk> {
    let chain = build_hopping(n)?;
    let one = BigRational::one();
    let mut diag = Vec::with_capacity(n);
    for j in 0..n {
        let mut d = one.clone();
        if j < n - 1 {
            d -= &chain.alpha_sq[j];
        }
        if j > 0 {
            d -= &chain.beta_sq[j - 1];
        }
        diag.push(d);
    }
    Ok(HoppingWalk {
        n,
        up: chain.alpha_sq.clone(),
        down: chain.beta_sq.clone(),
        diag,
        pi: chain.pi.clone(),
    })
}

/// Straight-line congestion certificate for the hopping walk.
#[derive(Debug, Clone)]
pub struct HoppingGapBound {
    pub n: usize,
    /// Maximum edge load over the 2(n-1) directed edges.
    pub rho: f64,
    /// Longest path, always n-1 steps.
    pub max_path_len: usize,
    /// Certified lower bound 1 / (rho * max_path_len) on the gap.
    pub gap_bound: f64,
    /// Directly computed walk gap.
    pub true_gap: f64,
}

impl HoppingWalk {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Transition probability from site j to site k (1-based).
    pub fn entry(&self, j: usize, k: usize) -> BigRational {
        match (j, k) {
            _ if j == k => self.diag[j - 1].clone(),
            _ if k == j + 1 => self.up[j - 1].clone(),
            _ if j == k + 1 => self.down[k - 1].clone(),
            _ => BigRational::zero(),
        }
    }

    /// Exact stationary distribution, sites 1..n.
    pub fn stationary(&self) -> &[BigRational] {
        &self.pi
    }

    /// Every row sums to exactly 1.
    pub fn rows_sum_to_one(&self) -> bool {
        let one = BigRational::one();
        (1..=self.n).all(|j| {
            let mut total = self.diag[j - 1].clone();
            if j < self.n {
                total += &self.up[j - 1];
            }
            if j > 1 {
                total += &self.down[j - 2];
            }
            total == one
        })
    }

    /// pi(j) P(j, j+1) = pi(j+1) P(j+1, j) exactly on every bond.
    pub fn detailed_balance_holds(&self) -> bool {
        (1..self.n).all(|j| &self.pi[j - 1] * &self.up[j - 1] == &self.pi[j] * &self.down[j - 1])
    }

    /// Every hop probability lies in [1/6, 1/2] exactly.
    pub fn offdiagonals_in_bounds(&self) -> bool {
        let lo = BigRational::new(BigInt::one(), BigInt::from(6));
        let hi = BigRational::new(BigInt::one(), BigInt::from(2));
        self.up
            .iter()
            .chain(&self.down)
            .all(|v| *v >= lo && *v <= hi)
    }

    /// Largest over smallest stationary weight, as a float.
    pub fn stationary_spread(&self) -> f64 {
        let max = self.pi.iter().max().expect("nonempty chain");
        let min = self.pi.iter().min().expect("nonempty chain");
        (max / min).to_f64().expect("spread fits in f64")
    }

    /// Routes every ordered site pair along the segment between them
    /// and evaluates the worst edge load exactly; the certified bound
    /// 1/(rho l) is compared against the directly computed gap.
    #[allow(clippy::needless_range_loop)] // a labels the edge (a, a+1) across four arrays
    pub fn straight_line_certificate(&self) -> Result<HoppingGapBound> {
        let n = self.n;
        // prefix[a] = pi(1) + .. + pi(a).
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(BigRational::zero());
        for p in &self.pi {
            let last = prefix.last().expect("nonempty").clone();
            prefix.push(last + p);
        }
        let total = prefix[n].clone();
        let mut rho = BigRational::zero();
        for a in 1..n {
            // Ordered pairs (s, t) with s <= a < t cross the edge
            // (a, a+1); the reverse pairs cross (a+1, a).
            let below = &prefix[a];
            let above = &total - below;
            let load = below * &above;
            let up_flow = &self.pi[a - 1] * &self.up[a - 1];
            let down_flow = &self.pi[a] * &self.down[a - 1];
            for flow in [up_flow, down_flow] {
                if flow.is_zero() {
                    return Err(Error::Numerical {
                        message: "hopping walk has a zero-probability bond".into(),
                        best_residual: f64::NAN,
                    });
                }
                let candidate = &load / &flow;
                if candidate > rho {
                    rho = candidate;
                }
            }
        }
        let max_path_len = n - 1;
        let bound_exact =
            (BigRational::from_integer(BigInt::from(max_path_len as u64)) * &rho).recip();
        let chain = build_hopping(n)?;
        let eigs = chain.move_matrix()?.symmetric_eigenvalues();
        let mut sorted: Vec<f64> = eigs.iter().copied().collect();
        sorted.sort_by(|a, b| a.total_cmp(b));
        // The walk gap 1 - lambda2(P) equals the second eigenvalue of
        // the motion part under the exact similarity transform.
        let true_gap = sorted[1];
        Ok(HoppingGapBound {
            n,
            rho: rho.to_f64().expect("rho fits in f64"),
            max_path_len,
            gap_bound: bound_exact.to_f64().expect("bound fits in f64"),
            true_gap,
        })
    }
}

/// Ground energy of one sector block.
#[derive(Debug, Clone)]
pub struct SectorEnergy {
    pub n: usize,
    pub label: SectorLabel,
    pub dim: usize,
    pub lambda1: f64,
    pub residual: f64,
}

/// Ground energy of an unbalanced sector under the chosen variant.
pub fn sector_energy(
    n: usize,
    label: SectorLabel,
    variant: Variant,
    tol: f64,
    seed: u64,
) -> Result<SectorEnergy> {
    if label.is_balanced() {
        return Err(Error::invalid(
            "sector energy scan targets unbalanced sectors",
        ));
    }
    let basis = Arc::new(SectorBasis::new(n, label)?);
    let block = sector_block_on(basis.clone(), variant)?;
    let res = lowest_eigenpairs(&block, 1, tol, seed)?;
    Ok(SectorEnergy {
        n,
        label,
        dim: basis.dim(),
        lambda1: res.eigenvalues[0],
        residual: res.residuals[0],
    })
}

/// Full spectrum of one sector block, ascending; dense, so the sector
/// dimension is capped.
pub fn sector_spectrum(n: usize, label: SectorLabel, variant: Variant) -> Result<Vec<f64>> {
    let basis = Arc::new(SectorBasis::with_cap(n, label, 2000)?);
    let block = sector_block_on(basis, variant)?;
    let dense = block.to_dense()?;
    let mut eigs: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(|a, b| a.total_cmp(b));
    Ok(eigs)
}

/// The one-boundary Hamiltonian cannot tell one unmatched closing
/// bracket beyond the first from an unmatched opening one: sectors
/// with the same total number of extra brackets (and at least one
/// closing) share their whole spectrum.
pub fn equal_total_spectra_match(n: usize, tol: f64) -> Result<bool> {
    let a = sector_spectrum(n, SectorLabel::new(1, 1), Variant::Simplified)?;
    let b = sector_spectrum(n, SectorLabel::new(2, 0), Variant::Simplified)?;
    if a.len() != b.len() {
        return Ok(false);
    }
    Ok(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol))
}

/// Checks the quoted hopping amplitudes against exact contractions of
/// the assembled single-marker operator: diagonal elements by exact
/// state counts, cross elements by verifying each stored transport
/// entry and the exact squared product.
pub fn first_order_matches(n: usize) -> Result<bool> {
    if n > 8 {
        return Err(Error::limit(format!(
            "first-order comparison at length {n} exceeds cap 8"
        )));
    }
    let op = build_hx(n)?;
    let chain = build_hopping(n)?;
    let big = |u: usize| BigInt::from(u as u64);
    for j in 1..n {
        let block_j = op.block_range(j);
        let block_j1 = op.block_range(j + 1);
        let n_j = block_j.len();
        let n_j1 = block_j1.len();
        // States with the marker at j that can hop right, and their
        // images; each contributes +1/2 on the diagonal and -1/2 across.
        let mut movers = 0usize;
        for i in block_j.clone() {
            let (s, t) = op.sides(i);
            if t.letters().first() == Some(&Letter::Zero) {
                movers += 1;
                let mut new_s = s.letters().to_vec();
                new_s.push(Letter::Zero);
                let new_t = SpinString::new(t.letters()[1..].to_vec());
                let col = op
                    .index_of(j + 1, &SpinString::new(new_s), &new_t)
                    .expect("hop image exists");
                if op.transport_entry(i, col) != -0.5 {
                    return Ok(false);
                }
            }
        }
        let mut receivers = 0usize;
        for i in block_j1.clone() {
            let (s, _) = op.sides(i);
            if s.letters().last() == Some(&Letter::Zero) {
                receivers += 1;
            }
        }
        if movers != receivers {
            return Ok(false);
        }
        // <psi_j| bond |psi_j> = movers / (2 N_j) must equal alpha_sq.
        let diag_j = BigRational::new(big(movers), 2 * big(n_j));
        if diag_j != chain.alpha_sq()[j - 1] {
            return Ok(false);
        }
        // <psi_{j+1}| bond |psi_{j+1}> = receivers / (2 N_{j+1}).
        let diag_j1 = BigRational::new(big(receivers), 2 * big(n_j1));
        if diag_j1 != chain.beta_sq()[j - 1] {
            return Ok(false);
        }
        // <psi_j| bond |psi_{j+1}> = -movers / (2 sqrt(N_j N_j1));
        // its square must equal alpha_sq * beta_sq exactly.
        let cross_sq = BigRational::new(big(movers) * big(movers), 4 * big(n_j) * big(n_j1));
        if cross_sq != &chain.alpha_sq()[j - 1] * &chain.beta_sq()[j - 1] {
            return Ok(false);
        }
    }
    Ok(true)
}
