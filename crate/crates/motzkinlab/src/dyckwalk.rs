//! Bracket-pattern reduction of the pair-creation term.
//!
//! Averaging a balanced chain over blank placements compresses it to its
//! bracket pattern.  The embedding of patterns back into chains is an
//! isometry `V`; conjugating the pair-creation term by `V` yields a small
//! symmetric operator on bracket patterns whose entries are ratios of
//! binomials.  Shifting and rescaling that operator gives a reversible
//! random walk that adds or removes one `lr` pair per step, with exact
//! rational transition probabilities.  Everything structural about the
//! walk (stochasticity, reversibility, laziness, per-edge lower bounds)
//! is asserted in exact arithmetic.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num::{BigInt, BigRational, BigUint, One, ToPrimitive, Zero};

use crate::combinatorics::{
    binomial, dyck_projection, enumerate_dyck, motzkin_number, DyckWord, SectorLabel,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{sector_block_on, SectorBasis, Variant};

/// Largest chain for which the walk matrix is built.
pub const WALK_SITE_CAP: usize = 16;

/// Largest chain for which the embedding is materialized.
pub const ISOMETRY_SITE_CAP: usize = 14;

/// Largest chain for which the pattern basis itself is enumerated.
pub const BASIS_SITE_CAP: usize = 20;

/// All bracket patterns that fit on `n` sites, grouped by pair count m
/// (level sizes are Catalan numbers), lexicographic inside each level.
#[derive(Debug)]
pub struct DyckBasis {
    n: usize,
    words: Vec<DyckWord>,
    level_start: Vec<usize>,
    level_of: Vec<usize>,
    index: HashMap<(usize, u64), usize>,
}

impl DyckBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("pattern basis needs at least two sites"));
        }
        if n > BASIS_SITE_CAP {
            return Err(Error::limit(format!(
                "pattern basis caps at {BASIS_SITE_CAP} sites, got {n}"
            )));
        }
        let mut words = Vec::new();
        let mut level_start = Vec::new();
        let mut level_of = Vec::new();
        for m in 0..=n / 2 {
            level_start.push(words.len());
            for w in enumerate_dyck(m)? {
                level_of.push(m);
                words.push(w);
            }
        }
        level_start.push(words.len());
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| ((w.semilength(), w.code()), i))
            .collect();
        Ok(DyckBasis {
            n,
            words,
            level_start,
            level_of,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &DyckWord {
        &self.words[i]
    }

    pub fn words(&self) -> &[DyckWord] {
        &self.words
    }

    /// Pair count of basis element `i`.
    pub fn level(&self, i: usize) -> usize {
        self.level_of[i]
    }

    /// Number of levels, ⌊n/2⌋ + 1.
    pub fn level_count(&self) -> usize {
        self.level_start.len() - 1
    }

    /// Index range of the patterns with m pairs.
    pub fn level_range(&self, m: usize) -> std::ops::Range<usize> {
        self.level_start[m]..self.level_start[m + 1]
    }

    pub fn index_of(&self, w: &DyckWord) -> Option<usize> {
        self.index.get(&(w.semilength(), w.code())).copied()
    }
}

/// The embedding of bracket patterns into balanced chains: each pattern
/// maps to the uniform superposition of the chains that reduce to it
/// when blanks are dropped.
#[derive(Debug)]
pub struct Isometry {
    sector: Arc<SectorBasis>,
    basis: Arc<DyckBasis>,
    /// Balanced-string indices in each column's support.
    columns: Vec<Vec<u32>>,
    /// Column amplitude 1/sqrt(C(n, 2m)), by column.
    amps: Vec<f64>,
}

/// Materializes the embedding for an `n`-site chain.
pub fn build_isometry(n: usize) -> Result<Isometry> {
    if n > ISOMETRY_SITE_CAP {
        return Err(Error::limit(format!(
            "explicit embedding caps at {ISOMETRY_SITE_CAP} sites, got {n}"
        )));
    }
    let basis = Arc::new(DyckBasis::new(n)?);
    let sector = Arc::new(SectorBasis::new(n, SectorLabel::balanced())?);
    build_isometry_on(sector, basis)
}

/// Same, reusing an existing sector basis and pattern basis.
pub fn build_isometry_on(
    sector: Arc<SectorBasis>,
    basis: Arc<DyckBasis>,
) -> Result<Isometry> {
    let n = basis.n();
    if sector.n() != n || !sector.label().is_balanced() {
        return Err(Error::invalid(
            "the embedding needs the balanced sector of the same chain",
        ));
    }
    let mut columns = vec![Vec::new(); basis.len()];
    for i in 0..sector.dim() {
        let pattern = dyck_projection(sector.state(i))?;
        let col = basis
            .index_of(&pattern)
            .ok_or_else(|| Error::invalid("balanced string maps outside the pattern basis"))?;
        columns[col].push(i as u32);
    }
    let amps = (0..basis.len())
        .map(|c| {
            let m = basis.level(c);
            1.0 / binomial(n, 2 * m).to_f64().expect("small binomial").sqrt()
        })
        .collect();
    Ok(Isometry {
        sector,
        basis,
        columns,
        amps,
    })
}

impl Isometry {
    pub fn basis(&self) -> &Arc<DyckBasis> {
        &self.basis
    }

    pub fn sector(&self) -> &Arc<SectorBasis> {
        &self.sector
    }

    /// V x: pattern coefficients to a balanced-sector vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.basis.len());
        let mut y = vec![0.0; self.sector.dim()];
        for (col, rows) in self.columns.iter().enumerate() {
            let v = self.amps[col] * x[col];
            if v != 0.0 {
                for &r in rows {
                    y[r as usize] = v;
                }
            }
        }
        y
    }

    /// V† y: balanced-sector vector to pattern coefficients.
    pub fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.sector.dim());
        self.columns
            .iter()
            .enumerate()
            .map(|(col, rows)| {
                let s: f64 = rows.iter().map(|&r| y[r as usize]).sum();
                self.amps[col] * s
            })
            .collect()
    }

    /// Largest deviation of V†V from the identity.  Columns have
    /// disjoint support, so the off-diagonal part vanishes structurally;
    /// the diagonal measures preimage counts against the amplitudes.
    pub fn gram_defect(&self) -> f64 {
        self.columns
            .iter()
            .zip(&self.amps)
            .map(|(rows, a)| (rows.len() as f64 * a * a - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// The conjugated pair-creation operator on a pattern basis, as a dense
/// symmetric matrix (pattern bases are small).
#[derive(Debug)]
pub struct EffectiveOperator {
    basis: Arc<DyckBasis>,
    matrix: DMatrix<f64>,
}

impl EffectiveOperator {
    pub fn basis(&self) -> &Arc<DyckBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    /// Two smallest eigenvalues.
    pub fn lowest_two(&self) -> (f64, f64) {
        let mut eigs: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eigs.sort_by(f64::total_cmp);
        (eigs[0], eigs[1])
    }

    /// Euclidean residual of the candidate ground vector.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(x);
        (&self.matrix * &v).norm()
    }
}

/// Multiplicity table of single-pair moves out of every pattern:
/// `up[i]` maps the index reached by inserting one `lr` pair to the
/// number of insertion gaps realizing it, `down[i]` likewise for peak
/// removals.
struct MoveTables {
    up: Vec<HashMap<usize, u64>>,
    down: Vec<HashMap<usize, u64>>,
}

fn move_tables(basis: &DyckBasis) -> Result<MoveTables> {
    let mut up = vec![HashMap::new(); basis.len()];
    let mut down = vec![HashMap::new(); basis.len()];
    for i in 0..basis.len() {
        let w = basis.word(i);
        for gap in 0..=w.len() {
            let bigger = w.insert_pair(gap)?;
            if let Some(j) = basis.index_of(&bigger) {
                *up[i].entry(j).or_insert(0) += 1;
            }
        }
        for pos in w.peak_positions() {
            let smaller = w.remove_pair(pos)?;
            let j = basis
                .index_of(&smaller)
                .ok_or_else(|| Error::invalid("pair removal left the basis"))?;
            *down[i].entry(j).or_insert(0) += 1;
        }
    }
    Ok(MoveTables { up, down })
}

/// Diagonal of the conjugated pair-creation operator:
/// [(n-1) C(n-2, 2m) + peaks * C(n-1, 2m-1)] / (2 C(n, 2m)).
fn heff_diagonal_rational(n: usize, m: usize, peaks: u64) -> BigRational {
    let mut num = binomial(n - 2, 2 * m) * BigUint::from((n - 1) as u64);
    if m > 0 {
        num += binomial(n - 1, 2 * m - 1) * BigUint::from(peaks);
    }
    let den = binomial(n, 2 * m) * BigUint::from(2u8);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Conjugated pair-creation operator from closed-form counts: the
/// diagonal counts adjacent blank-blank and bracket-pair slots over the
/// blank placements; an off-diagonal entry counts placements that keep
/// the inserted pair adjacent, once per realizing gap.
pub fn build_heff(n: usize) -> Result<EffectiveOperator> {
    if n > WALK_SITE_CAP {
        return Err(Error::limit(format!(
            "effective operator caps at {WALK_SITE_CAP} sites, got {n}"
        )));
    }
    let basis = Arc::new(DyckBasis::new(n)?);
    let moves = move_tables(&basis)?;
    let dim = basis.len();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        let m = basis.level(i);
        let peaks = basis.word(i).peak_positions().len() as u64;
        h[(i, i)] = heff_diagonal_rational(n, m, peaks)
            .to_f64()
            .expect("small rational");
        let scale = 0.5
            * binomial(n - 1, 2 * m + 1).to_f64().expect("small binomial")
            / (binomial(n, 2 * m).to_f64().expect("small binomial")
                * binomial(n, 2 * m + 2).to_f64().expect("small binomial"))
            .sqrt();
        for (&j, &mult) in &moves.up[i] {
            let v = -(mult as f64) * scale;
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(EffectiveOperator { basis, matrix: h })
}

/// Conjugated pair-creation operator by explicit triple product V† H V,
/// with H the pair-creation block on the balanced sector.  Validates the
/// closed-form route where both exist.
pub fn build_heff_algebraic(n: usize) -> Result<EffectiveOperator> {
    let iso = build_isometry(n)?;
    let block = sector_block_on(Arc::clone(iso.sector()), Variant::Interaction)?;
    let dim = iso.basis().len();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut x = vec![0.0; dim];
    for j in 0..dim {
        x[j] = 1.0;
        let col = iso.adjoint(&block.matvec(&iso.apply(&x)));
        x[j] = 0.0;
        for (i, v) in col.into_iter().enumerate() {
            h[(i, j)] = v;
        }
    }
    Ok(EffectiveOperator {
        basis: Arc::clone(iso.basis()),
        matrix: h,
    })
}

/// Ground vector of the conjugated operator: amplitude sqrt(C(n,2m)/M_n)
/// on every pattern with m pairs.
pub fn dyck_ground_state(basis: &DyckBasis) -> Vec<f64> {
    let n = basis.n();
    let total = motzkin_number(n).to_f64().expect("small count");
    (0..basis.len())
        .map(|i| {
            let m = basis.level(i);
            (binomial(n, 2 * m).to_f64().expect("small binomial") / total).sqrt()
        })
        .collect()
}

/// Squared ground amplitudes as exact rationals: pi(s) = C(n,2m)/M_n.
pub fn stationary_distribution(basis: &DyckBasis) -> Vec<BigRational> {
    let n = basis.n();
    let total = BigInt::from(motzkin_number(n));
    (0..basis.len())
        .map(|i| {
            let m = basis.level(i);
            BigRational::new(BigInt::from(binomial(n, 2 * m)), total.clone())
        })
        .collect()
}

/// Lazy reversible walk on bracket patterns with exact rational
/// transition probabilities; moves add or remove one `lr` pair.
#[derive(Debug)]
pub struct WalkMatrix {
    basis: Arc<DyckBasis>,
    pi: Vec<BigRational>,
    /// Sparse rows, diagonal included, columns ascending.
    rows: Vec<Vec<(usize, BigRational)>>,
}

/// Builds the walk: an upward edge realized by g gaps carries
/// probability g C(n-1, 2m+1) / (2n C(n, 2m)), a downward edge with g
/// removable peaks g C(n-1, 2m-1) / (2n C(n, 2m)), and the diagonal
/// keeps the rest.
pub fn build_walk(n: usize) -> Result<WalkMatrix> {
    if n > WALK_SITE_CAP {
        return Err(Error::limit(format!(
            "walk matrix caps at {WALK_SITE_CAP} sites, got {n}"
        )));
    }
    let basis = Arc::new(DyckBasis::new(n)?);
    let moves = move_tables(&basis)?;
    let pi = stationary_distribution(&basis);
    let mut rows = Vec::with_capacity(basis.len());
    for i in 0..basis.len() {
        let m = basis.level(i);
        let peaks = basis.word(i).peak_positions().len() as u64;
        let den = BigRational::new(
            BigInt::one(),
            BigInt::from(binomial(n, 2 * m) * BigUint::from(2 * n as u64)),
        );
        let up_binom = BigInt::from(binomial(n - 1, 2 * m + 1));
        let down_binom = if m > 0 {
            BigInt::from(binomial(n - 1, 2 * m - 1))
        } else {
            BigInt::zero()
        };
        let mut row: Vec<(usize, BigRational)> = Vec::new();
        for (&j, &mult) in &moves.up[i] {
            row.push((j, &den * BigRational::from(&up_binom * BigInt::from(mult))));
        }
        for (&j, &mult) in &moves.down[i] {
            row.push((j, &den * BigRational::from(&down_binom * BigInt::from(mult))));
        }
        let diag = BigRational::one()
            - heff_diagonal_rational(n, m, peaks) / BigRational::from(BigInt::from(n as u64));
        row.push((i, diag));
        row.sort_by_key(|&(j, _)| j);
        rows.push(row);
    }
    Ok(WalkMatrix { basis, pi, rows })
}

impl WalkMatrix {
    pub fn basis(&self) -> &Arc<DyckBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Stationary probability of pattern `i`.
    pub fn pi(&self, i: usize) -> &BigRational {
        &self.pi[i]
    }

    /// Transition probability, zero when no move connects the patterns.
    pub fn entry(&self, s: usize, t: usize) -> BigRational {
        match self.rows[s].binary_search_by_key(&t, |&(j, _)| j) {
            Ok(k) => self.rows[s][k].1.clone(),
            Err(_) => BigRational::zero(),
        }
    }

    pub fn row(&self, s: usize) -> &[(usize, BigRational)] {
        &self.rows[s]
    }

    /// Exact check that every row sums to one.
    pub fn rows_sum_to_one(&self) -> bool {
        self.rows.iter().all(|row| {
            let mut sum = BigRational::zero();
            for (_, p) in row {
                sum += p;
            }
            sum.is_one()
        })
    }

    /// Exact check of pi(s) P(s,t) = pi(t) P(t,s) on every stored entry.
    pub fn detailed_balance_holds(&self) -> bool {
        for (s, row) in self.rows.iter().enumerate() {
            for (t, p) in row {
                if &self.pi[s] * p != &self.pi[*t] * self.entry(*t, s) {
                    return false;
                }
            }
        }
        true
    }

    /// Exact check of the laziness bound P(s,s) >= 1/2.
    pub fn diagonal_at_least_half(&self) -> bool {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        (0..self.dim()).all(|s| self.entry(s, s) >= half.clone())
    }

    /// Smallest transition probability over pair insertions, with the
    /// guaranteed floor 1/(2n^3); `None` when no insertion exists.
    pub fn min_insert_probability(&self) -> Option<BigRational> {
        self.off_diagonal_min(true)
    }

    /// Smallest transition probability over pair removals, with the
    /// guaranteed floor 1/(2n^2).
    pub fn min_remove_probability(&self) -> Option<BigRational> {
        self.off_diagonal_min(false)
    }

    fn off_diagonal_min(&self, upward: bool) -> Option<BigRational> {
        let mut best: Option<BigRational> = None;
        for (s, row) in self.rows.iter().enumerate() {
            for (t, p) in row {
                if *t == s {
                    continue;
                }
                let is_up = self.basis.level(*t) > self.basis.level(s);
                if is_up != upward {
                    continue;
                }
                if best.as_ref().is_none_or(|b| p < b) {
                    best = Some(p.clone());
                }
            }
        }
        best
    }

    /// Exact per-edge floors: insertions at least 1/(2n^3), removals at
    /// least 1/(2n^2).
    pub fn move_bounds_hold(&self) -> bool {
        let n = self.basis.n() as u64;
        let insert_floor = BigRational::new(BigInt::one(), BigInt::from(2 * n * n * n));
        let remove_floor = BigRational::new(BigInt::one(), BigInt::from(2 * n * n));
        let ins = self.min_insert_probability().is_none_or(|p| p >= insert_floor);
        let rem = self.min_remove_probability().is_none_or(|p| p >= remove_floor);
        ins && rem
    }

    /// Off-diagonal support must match the single-pair move relation
    /// recomputed by direct splicing, in both directions.
    pub fn sparsity_matches_moves(&self) -> bool {
        for (s, row) in self.rows.iter().enumerate() {
            for (t, p) in row {
                if *t == s {
                    continue;
                }
                if !p.is_zero() && !differ_by_one_pair(self.basis.word(s), self.basis.word(*t)) {
                    return false;
                }
            }
        }
        // Every related pair must carry positive probability both ways.
        for s in 0..self.dim() {
            for t in 0..self.dim() {
                if differ_by_one_pair(self.basis.word(s), self.basis.word(t))
                    && (self.entry(s, t).is_zero() || self.entry(t, s).is_zero())
                {
                    return false;
                }
            }
        }
        true
    }

    /// Similarity transform D^{1/2} P D^{-1/2} (D = diag pi), which is
    /// symmetric by reversibility; shares the spectrum of P.
    pub fn symmetrized(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let sqrt_pi: Vec<f64> = self
            .pi
            .iter()
            .map(|p| p.to_f64().expect("small rational").sqrt())
            .collect();
        let mut s = DMatrix::<f64>::zeros(dim, dim);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, p) in row {
                s[(i, *j)] = p.to_f64().expect("small rational") * sqrt_pi[i] / sqrt_pi[*j];
            }
        }
        // Average out the last-bit asymmetry from the float conversion.
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = 0.5 * (s[(i, j)] + s[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        s
    }
}

/// True when `b` arises from `a` by inserting one `lr` pair at some gap
/// (or vice versa), checked by direct splicing.
pub fn differ_by_one_pair(a: &DyckWord, b: &DyckWord) -> bool {
    let (small, large) = if a.len() + 2 == b.len() {
        (a, b)
    } else if b.len() + 2 == a.len() {
        (b, a)
    } else {
        return false;
    };
    (0..=small.len()).any(|gap| {
        small
            .insert_pair(gap)
            .map(|w| w.letters() == large.letters())
            .unwrap_or(false)
    })
}

/// Both sides of the gap identity n (1 - lambda2(P)) = lambda2(H_eff),
/// computed through independent arithmetic paths.
#[derive(Debug, Clone, Copy)]
pub struct WalkGap {
    pub n: usize,
    pub dim: usize,
    /// Second largest eigenvalue of the walk.
    pub lambda2_p: f64,
    /// Spectral gap 1 - lambda2_p.
    pub gap_p: f64,
    /// Second smallest eigenvalue of the conjugated operator.
    pub lambda2_heff: f64,
    /// |lambda2_heff - n * gap_p|.
    pub identity_residual: f64,
    pub min_insert_prob: f64,
    pub min_remove_prob: f64,
}

/// Diagonalizes the symmetrized walk and the effective operator and
/// reports the identity residual together with the edge floors.
pub fn walk_gap(n: usize) -> Result<WalkGap> {
    let walk = build_walk(n)?;
    let heff = build_heff(n)?;

    let sym = walk.symmetrized();
    let mut walk_eigs: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    walk_eigs.sort_by(|a, b| b.total_cmp(a));
    if (walk_eigs[0] - 1.0).abs() > 1e-10 {
        return Err(Error::Numerical {
            message: format!("walk top eigenvalue {} strays from one", walk_eigs[0]),
            best_residual: (walk_eigs[0] - 1.0).abs(),
        });
    }
    let lambda2_p = walk_eigs[1];

    let (ground, lambda2_heff) = heff.lowest_two();
    if ground.abs() > 1e-10 {
        return Err(Error::Numerical {
            message: format!("effective ground level {ground} strays from zero"),
            best_residual: ground.abs(),
        });
    }

    let gap_p = 1.0 - lambda2_p;
    Ok(WalkGap {
        n,
        dim: walk.dim(),
        lambda2_p,
        gap_p,
        lambda2_heff,
        identity_residual: (lambda2_heff - n as f64 * gap_p).abs(),
        min_insert_prob: walk
            .min_insert_probability()
            .and_then(|p| p.to_f64())
            .unwrap_or(f64::NAN),
        min_remove_prob: walk
            .min_remove_probability()
            .and_then(|p| p.to_f64())
            .unwrap_or(f64::NAN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::catalan;
    use crate::hamiltonian::motzkin_vector;
    use crate::numerics::linear_fit;
    use std::str::FromStr;

    #[test]
    fn basis_levels_are_catalan_sized() {
        let basis = DyckBasis::new(12).unwrap();
        let expect = [1usize, 1, 2, 5, 14, 42, 132];
        assert_eq!(basis.level_count(), 7);
        for (m, &c) in expect.iter().enumerate() {
            assert_eq!(basis.level_range(m).len(), c);
            assert_eq!(catalan(m).to_f64().unwrap() as usize, c);
        }
        assert_eq!(basis.len(), expect.iter().sum::<usize>());
        for i in 0..basis.len() {
            assert_eq!(basis.index_of(basis.word(i)), Some(i));
            assert_eq!(basis.level(i), basis.word(i).semilength());
        }
    }

    #[test]
    fn two_site_pins() {
        let heff = build_heff(2).unwrap();
        assert_eq!(heff.dim(), 2);
        assert_eq!(heff.entry(0, 0), 0.5);
        assert_eq!(heff.entry(1, 1), 0.5);
        assert_eq!(heff.entry(0, 1), -0.5);
        assert_eq!(heff.entry(1, 0), -0.5);

        let walk = build_walk(2).unwrap();
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(walk.entry(0, 0), q(3, 4));
        assert_eq!(walk.entry(0, 1), q(1, 4));
        assert_eq!(walk.entry(1, 0), q(1, 4));
        assert_eq!(walk.entry(1, 1), q(3, 4));
        assert_eq!(*walk.pi(0), q(1, 2));
        assert_eq!(*walk.pi(1), q(1, 2));

        let gap = walk_gap(2).unwrap();
        assert!((gap.lambda2_p - 0.5).abs() < 1e-14);
        assert!((gap.lambda2_heff - 1.0).abs() < 1e-14);
        assert!(gap.identity_residual < 1e-14);
    }

    #[test]
    fn embedding_is_an_isometry() {
        for n in 2..=10 {
            let iso = build_isometry(n).unwrap();
            assert!(iso.gram_defect() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn embedding_carries_ground_to_ground() {
        for n in [4usize, 7, 10] {
            let iso = build_isometry(n).unwrap();
            let ground = dyck_ground_state(iso.basis());
            let image = iso.apply(&ground);
            let full = motzkin_vector(n).unwrap();
            // Compare on the balanced sector: the full-space vector is
            // supported there with equal amplitudes.
            let dim = iso.sector().dim();
            let amp = 1.0 / (dim as f64).sqrt();
            for (i, &v) in image.iter().enumerate() {
                assert!((v - amp).abs() < 1e-13, "n={n}, i={i}");
            }
            let nonzero = full.iter().filter(|&&x| x != 0.0).count();
            assert_eq!(nonzero, dim);
        }
    }

    #[test]
    fn closed_form_matches_triple_product() {
        for n in 2..=10 {
            let a = build_heff(n).unwrap();
            let b = build_heff_algebraic(n).unwrap();
            assert_eq!(a.dim(), b.dim());
            let mut worst = 0.0f64;
            for i in 0..a.dim() {
                for j in 0..a.dim() {
                    worst = worst.max((a.entry(i, j) - b.entry(i, j)).abs());
                }
            }
            assert!(worst < 1e-12, "n={n}: routes differ by {worst}");
        }
    }

    #[test]
    fn effective_operator_structure() {
        for n in [4usize, 9, 12] {
            let heff = build_heff(n).unwrap();
            let basis = heff.basis();
            let ground = dyck_ground_state(basis);
            assert!(heff.residual(&ground) < 1e-12, "n={n}");
            for i in 0..heff.dim() {
                assert!(heff.entry(i, i) <= n as f64 / 2.0 + 1e-15);
                for j in 0..heff.dim() {
                    if i != j {
                        assert!(heff.entry(i, j) <= 0.0, "positive off-diagonal at n={n}");
                        if heff.entry(i, j) != 0.0 {
                            assert!(differ_by_one_pair(basis.word(i), basis.word(j)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn walk_is_stochastic_reversible_lazy() {
        for n in 2..=10 {
            let walk = build_walk(n).unwrap();
            assert!(walk.rows_sum_to_one(), "rows at n={n}");
            assert!(walk.detailed_balance_holds(), "balance at n={n}");
            assert!(walk.diagonal_at_least_half(), "laziness at n={n}");
            assert!(walk.sparsity_matches_moves(), "support at n={n}");
            let mut total = BigRational::zero();
            for i in 0..walk.dim() {
                total += walk.pi(i);
            }
            assert!(total.is_one(), "stationary mass at n={n}");
        }
    }

    #[test]
    fn move_floors_hold_exactly() {
        for n in 2..=12 {
            let walk = build_walk(n).unwrap();
            assert!(walk.move_bounds_hold(), "floors at n={n}");
        }
    }

    #[test]
    fn stationary_ratio_pin() {
        // pi(empty)/pi(lr) = 1/C(n,2).
        for n in [4usize, 9, 14] {
            let basis = DyckBasis::new(n).unwrap();
            let pi = stationary_distribution(&basis);
            let ratio = &pi[0] / &pi[1];
            let expect = BigRational::new(BigInt::one(), BigInt::from(binomial(n, 2)));
            assert_eq!(ratio, expect);
        }
    }

    #[test]
    fn gap_identity_holds() {
        for n in [3usize, 6, 9, 12] {
            let gap = walk_gap(n).unwrap();
            assert!(gap.identity_residual < 1e-11, "n={n}: {}", gap.identity_residual);
            assert!(gap.gap_p > 0.0, "n={n}");
            assert!(gap.lambda2_heff > 0.0, "n={n}");
        }
    }

    #[test]
    fn walk_gap_shrinks_polynomially() {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for n in (4..=12).step_by(2) {
            let gap = walk_gap(n).unwrap();
            xs.push((n as f64).ln());
            ys.push(gap.gap_p.ln());
        }
        let fit = linear_fit(&xs, &ys).unwrap();
        // Frozen from direct runs: slope -2.11 on this size range.
        assert!(
            fit.slope < -1.6 && fit.slope > -2.6,
            "walk gap decay exponent {} left its band",
            fit.slope
        );
    }

    #[test]
    fn pair_move_predicate() {
        let a = DyckWord::from_str("lr").unwrap();
        let b = DyckWord::from_str("lrlr").unwrap();
        let c = DyckWord::from_str("llrr").unwrap();
        let d = DyckWord::from_str("llrrlr").unwrap();
        assert!(differ_by_one_pair(&a, &b));
        assert!(differ_by_one_pair(&a, &c));
        assert!(differ_by_one_pair(&b, &a));
        assert!(!differ_by_one_pair(&b, &c));
        assert!(!differ_by_one_pair(&a, &d));
        assert!(differ_by_one_pair(&c, &d));
    }

    #[test]
    fn input_validation() {
        assert!(DyckBasis::new(1).is_err());
        assert!(DyckBasis::new(21).is_err());
        assert!(build_walk(17).is_err());
        assert!(build_heff(17).is_err());
        assert!(build_isometry(15).is_err());
    }
}
