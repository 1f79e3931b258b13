//! Sparse assembly of the chain Hamiltonian, its weighted, split, and
//! perturbed variants, and sector-restricted blocks.
//!
//! Every matrix element is a multiple of 1/2 times a term weight, so
//! with unit weights assembly is exact in f64 and the structural tests
//! can compare entries with equality rather than tolerances.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::combinatorics::{ClassRanker, SectorLabel, SpinString, enumerate_class_capped};
use crate::error::{Error, Result};

/// Full-space builds stop here: 3^14 is about 4.8M basis states.
pub const FULL_SPACE_CAP: usize = 14;

/// Sector builds refuse bases above this dimension.
pub const SECTOR_DIM_CAP: usize = 3_000_000;

const PAIR_DIM: usize = 9;

/// Symmetric 9x9 operator on two adjacent spin-1 sites.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalProjector {
    mat: [[f64; PAIR_DIM]; PAIR_DIM],
}

impl LocalProjector {
    fn from_pair_states(pairs: &[(usize, usize)]) -> Self {
        // Each generator is (|ab> - |cd>)/sqrt(2); its outer product
        // contributes +1/2 on the two diagonal slots and -1/2 across.
        let mut mat = [[0.0; PAIR_DIM]; PAIR_DIM];
        for &(i, j) in pairs {
            mat[i][i] += 0.5;
            mat[j][j] += 0.5;
            mat[i][j] -= 0.5;
            mat[j][i] -= 0.5;
        }
        LocalProjector { mat }
    }

    /// Matrix entries, row-major, pair index 3*first + second.
    pub fn matrix(&self) -> &[[f64; PAIR_DIM]; PAIR_DIM] {
        &self.mat
    }

    /// Rank, exact because a projector's rank equals its trace.
    pub fn rank(&self) -> usize {
        let trace: f64 = (0..PAIR_DIM).map(|i| self.mat[i][i]).sum();
        trace.round() as usize
    }

    /// Largest entrywise defect of P*P against P.
    pub fn idempotence_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..PAIR_DIM {
            for c in 0..PAIR_DIM {
                let mut acc = 0.0;
                for k in 0..PAIR_DIM {
                    acc += self.mat[r][k] * self.mat[k][c];
                }
                worst = worst.max((acc - self.mat[r][c]).abs());
            }
        }
        worst
    }

    /// Largest entrywise asymmetry.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..PAIR_DIM {
            for c in 0..r {
                worst = worst.max((self.mat[r][c] - self.mat[c][r]).abs());
            }
        }
        worst
    }

    fn add_scaled(&self, other: &LocalProjector, scale: f64) -> LocalProjector {
        let mut mat = self.mat;
        for (row, other_row) in mat.iter_mut().zip(other.mat.iter()) {
            for (x, o) in row.iter_mut().zip(other_row.iter()) {
                *x += scale * o;
            }
        }
        LocalProjector { mat }
    }
}

// Pair indices: 3a+b with letters 0,l,r -> 0,1,2.
const P_00: usize = 0;
const P_0L: usize = 1;
const P_0R: usize = 2;
const P_L0: usize = 3;
const P_LR: usize = 5;
const P_R0: usize = 6;

/// Projector onto span{|0l>-|l0>, |0r>-|r0>, |00>-|lr>} (normalized).
pub fn projector_pi() -> LocalProjector {
    LocalProjector::from_pair_states(&[(P_0L, P_L0), (P_0R, P_R0), (P_00, P_LR)])
}

/// Bracket-transport part: span{|0l>-|l0>, |0r>-|r0>}.
pub fn projector_move() -> LocalProjector {
    LocalProjector::from_pair_states(&[(P_0L, P_L0), (P_0R, P_R0)])
}

/// Pair-creation part: the single state |00>-|lr>.
pub fn projector_int() -> LocalProjector {
    LocalProjector::from_pair_states(&[(P_00, P_LR)])
}

/// Which combination of boundary and bulk terms to assemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variant {
    /// Both boundary penalties plus the full bulk projector.
    Full,
    /// Left boundary penalty only, full bulk projector.
    Simplified,
    /// Bulk projectors only.
    Bulk,
    /// Bracket-transport bulk terms only.
    Move,
    /// Pair-creation bulk terms only.
    Interaction,
    /// Transport terms plus eps times the creation terms, 0 <= eps <= 1.
    Eps(f64),
}

impl Variant {
    fn boundaries(self) -> (f64, f64) {
        match self {
            Variant::Full => (1.0, 1.0),
            Variant::Simplified => (1.0, 0.0),
            _ => (0.0, 0.0),
        }
    }

    fn stencil(self) -> Result<LocalProjector> {
        Ok(match self {
            Variant::Full | Variant::Simplified | Variant::Bulk => projector_pi(),
            Variant::Move => projector_move(),
            Variant::Interaction => projector_int(),
            Variant::Eps(eps) => {
                if !(0.0..=1.0).contains(&eps) || !eps.is_finite() {
                    return Err(Error::invalid(format!(
                        "interaction weight {eps} outside [0, 1]"
                    )));
                }
                projector_move().add_scaled(&projector_int(), eps)
            }
        })
    }
}

/// Enumerated basis of one sector, with code-sorted lookup.
#[derive(Debug)]
pub struct SectorBasis {
    n: usize,
    label: SectorLabel,
    states: Vec<SpinString>,
    codes: Vec<u64>,
}

impl SectorBasis {
    /// Enumerate the sector with the default dimension cap.
    pub fn new(n: usize, label: SectorLabel) -> Result<Self> {
        Self::with_cap(n, label, SECTOR_DIM_CAP)
    }

    /// Enumerate the sector with an explicit dimension cap.
    pub fn with_cap(n: usize, label: SectorLabel, max_dim: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("sector basis needs n >= 1"));
        }
        if n > 40 {
            return Err(Error::limit(format!(
                "sector basis at length {n} exceeds the 40-letter code range"
            )));
        }
        let ranker = ClassRanker::new(n, label)?;
        let size = ranker.size();
        if size == 0 {
            return Err(Error::invalid(format!(
                "sector {label} is empty at length {n}"
            )));
        }
        if size > max_dim as u128 {
            return Err(Error::limit(format!(
                "sector {label} at length {n} has dimension {size}, cap {max_dim}"
            )));
        }
        let states = enumerate_class_capped(n, label, n)?;
        let codes: Vec<u64> = states.iter().map(|s| s.code()).collect();
        Ok(SectorBasis {
            n,
            label,
            states,
            codes,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> SectorLabel {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[SpinString] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &SpinString {
        &self.states[i]
    }

    /// Position of a string in the basis, if it belongs to the sector.
    pub fn index_of(&self, s: &SpinString) -> Option<usize> {
        self.index_of_code(s.code())
    }

    fn index_of_code(&self, code: u64) -> Option<usize> {
        self.codes.binary_search(&code).ok()
    }
}

/// Basis an operator acts on.
#[derive(Clone)]
pub enum Basis {
    /// All of Sigma^n; index = big-endian base-3 code of the string.
    Full { n: usize },
    /// One enumerated sector, lexicographic order.
    Sector(Arc<SectorBasis>),
}

impl Basis {
    pub fn n(&self) -> usize {
        match self {
            Basis::Full { n } => *n,
            Basis::Sector(b) => b.n(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::Full { n } => 3usize.pow(*n as u32),
            Basis::Sector(b) => b.dim(),
        }
    }

    /// String for a basis index.
    pub fn state(&self, i: usize) -> SpinString {
        match self {
            Basis::Full { n } => SpinString::from_code(i as u64, *n),
            Basis::Sector(b) => b.state(i).clone(),
        }
    }

    fn index_of_code(&self, code: u64) -> Option<usize> {
        match self {
            Basis::Full { .. } => Some(code as usize),
            Basis::Sector(b) => b.index_of_code(code),
        }
    }
}

/// Symmetric sparse operator in CSR form.
pub struct SparseOperator {
    basis: Basis,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    norm_bound: f64,
}

impl SparseOperator {
    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Declared bound on the magnitude of any entry.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// y = A x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            *out = acc;
        }
    }

    /// A x as a fresh vector.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }

    /// All stored entries as (row, col, value).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(move |k| (r, self.cols[k] as usize, self.vals[k]))
        })
    }

    /// Entry at (row, col); zero when absent.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.cols[lo..hi].binary_search(&(col as u32)) {
            Ok(k) => self.vals[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Dense copy, guarded for small dimensions only.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let dim = self.dim();
        if dim > 4000 {
            return Err(Error::limit(format!(
                "dense copy of a {dim}-dimensional operator refused"
            )));
        }
        let mut m = DMatrix::zeros(dim, dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        Ok(m)
    }

    /// Largest |A - A^T| entry; exact zero for all builders here.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (r, c, v) in self.entries() {
            worst = worst.max((v - self.entry(c, r)).abs());
        }
        worst
    }
}

struct TermPlan {
    left: f64,
    right: f64,
    bond_weights: Vec<f64>,
    stencil: LocalProjector,
}

fn assemble(basis: Basis, plan: &TermPlan) -> SparseOperator {
    let n = basis.n();
    let dim = basis.dim();
    // Sparse rows of the stencil: (pair index, value).
    let mut stencil_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); PAIR_DIM];
    for (r, row) in plan.stencil.matrix().iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v != 0.0 {
                stencil_rows[r].push((c, v));
            }
        }
    }
    let pow3: Vec<i64> = (0..n).map(|k| 3i64.pow(k as u32)).collect();

    let mut row_ptr = Vec::with_capacity(dim + 1);
    row_ptr.push(0usize);
    let mut cols: Vec<u32> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    let mut scratch: Vec<(u32, f64)> = Vec::with_capacity(2 * n + 2);

    for i in 0..dim {
        let state = basis.state(i);
        let letters = state.letters();
        let code = state.code() as i64;
        scratch.clear();
        if plan.left != 0.0 && letters[0] == crate::combinatorics::Letter::Right {
            scratch.push((i as u32, plan.left));
        }
        if plan.right != 0.0 && letters[n - 1] == crate::combinatorics::Letter::Left {
            scratch.push((i as u32, plan.right));
        }
        for j in 0..n.saturating_sub(1) {
            let w = plan.bond_weights[j];
            if w == 0.0 {
                continue;
            }
            let a = letters[j] as usize;
            let b = letters[j + 1] as usize;
            let hi = pow3[n - 1 - j];
            let lo = pow3[n - 2 - j];
            for &(target, v) in &stencil_rows[3 * a + b] {
                let (c, d) = (target / 3, target % 3);
                let tcode = code + (c as i64 - a as i64) * hi + (d as i64 - b as i64) * lo;
                let col = basis
                    .index_of_code(tcode as u64)
                    .expect("local term output stays in the basis");
                scratch.push((col as u32, w * v));
            }
        }
        scratch.sort_unstable_by_key(|&(c, _)| c);
        let mut k = 0;
        while k < scratch.len() {
            let col = scratch[k].0;
            let mut acc = 0.0;
            while k < scratch.len() && scratch[k].0 == col {
                acc += scratch[k].1;
                k += 1;
            }
            if acc != 0.0 {
                cols.push(col);
                vals.push(acc);
            }
        }
        row_ptr.push(cols.len());
    }

    let norm_bound =
        plan.left + plan.right + 0.5 * plan.bond_weights.iter().map(|w| w.abs()).sum::<f64>();
    SparseOperator {
        basis,
        row_ptr,
        cols,
        vals,
        norm_bound,
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("chain length {n} below minimum 2")));
    }
    Ok(())
}

fn full_basis(n: usize) -> Result<Basis> {
    check_n(n)?;
    if n > FULL_SPACE_CAP {
        return Err(Error::limit(format!(
            "full-space build at length {n} exceeds cap {FULL_SPACE_CAP}"
        )));
    }
    Ok(Basis::Full { n })
}

/// Weighted Hamiltonian on the full 3^n space.  `weights` holds the
/// n+1 coefficients: left boundary, the n-1 bond projectors, right
/// boundary, in chain order.  All must be >= 1.
pub fn build_hamiltonian(n: usize, weights: &[f64]) -> Result<SparseOperator> {
    let basis = full_basis(n)?;
    if weights.len() != n + 1 {
        return Err(Error::invalid(format!(
            "expected {} weights for length {n}, got {}",
            n + 1,
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 1.0) {
        return Err(Error::invalid("all term weights must be finite and >= 1"));
    }
    let plan = TermPlan {
        left: weights[0],
        right: weights[n],
        bond_weights: weights[1..n].to_vec(),
        stencil: projector_pi(),
    };
    Ok(assemble(basis, &plan))
}

fn plan_for(n: usize, variant: Variant) -> Result<TermPlan> {
    let (left, right) = variant.boundaries();
    Ok(TermPlan {
        left,
        right,
        bond_weights: vec![1.0; n - 1],
        stencil: variant.stencil()?,
    })
}

/// One variant on the full 3^n space with unit weights.
pub fn build_variant(n: usize, variant: Variant) -> Result<SparseOperator> {
    let basis = full_basis(n)?;
    let plan = plan_for(n, variant)?;
    Ok(assemble(basis, &plan))
}

/// Bracket-transport bulk term on the full space.
pub fn build_hmove(n: usize) -> Result<SparseOperator> {
    build_variant(n, Variant::Move)
}

/// Pair-creation bulk term on the full space.
pub fn build_hint(n: usize) -> Result<SparseOperator> {
    build_variant(n, Variant::Interaction)
}

/// Transport plus eps times creation on the full space.
pub fn build_heps(n: usize, eps: f64) -> Result<SparseOperator> {
    build_variant(n, Variant::Eps(eps))
}

/// One variant restricted to an already-enumerated sector basis.
pub fn sector_block_on(basis: Arc<SectorBasis>, variant: Variant) -> Result<SparseOperator> {
    let n = basis.n();
    check_n(n)?;
    let plan = plan_for(n, variant)?;
    Ok(assemble(Basis::Sector(basis), &plan))
}

/// One variant restricted to a freshly enumerated sector.
pub fn sector_block(n: usize, label: SectorLabel, variant: Variant) -> Result<SparseOperator> {
    check_n(n)?;
    let basis = Arc::new(SectorBasis::new(n, label)?);
    sector_block_on(basis, variant)
}

/// Normalized uniform superposition over one sector, as a full-space
/// vector.  For the balanced sector this is the ground state.
pub fn uniform_class_vector(n: usize, label: SectorLabel) -> Result<Vec<f64>> {
    let basis = full_basis(n)?;
    let states = enumerate_class_capped(n, label, n)?;
    if states.is_empty() {
        return Err(Error::invalid(format!(
            "sector {label} is empty at length {n}"
        )));
    }
    let amp = 1.0 / (states.len() as f64).sqrt();
    let mut v = vec![0.0; basis.dim()];
    for s in &states {
        v[s.code() as usize] = amp;
    }
    Ok(v)
}

/// Normalized uniform superposition over all balanced strings.
pub fn motzkin_vector(n: usize) -> Result<Vec<f64>> {
    uniform_class_vector(n, SectorLabel::balanced())
}
