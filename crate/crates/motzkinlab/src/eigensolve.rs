//! Extremal eigenvalues of sparse symmetric operators: a dense path
//! for small dimensions, a seeded thick-restart Krylov iteration with
//! full reorthogonalization above, gap scans over symmetry sectors,
//! and log-log power-law fits.
//!
//! The zero cluster of a frustration-free operator sits right where
//! extremal iterations are most fragile, so known kernel vectors are
//! deflated exactly: the iteration is kept orthogonal to them at every
//! step rather than trusting the recurrence.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{SectorLabel, dyck_projection};
use crate::error::{Error, Result};
use crate::hamiltonian::{SectorBasis, SparseOperator, Variant, sector_block_on};
use crate::numerics::linear_fit;

/// Dimensions up to this are diagonalized densely.
pub const DENSE_FALLBACK_DIM: usize = 2000;

/// Eigenvalues closer than this are treated as one cluster.
pub const CLUSTER_TOL: f64 = 1e-9;

/// Anything with a dimension and a symmetric matrix-vector product.
pub trait LinearOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Dense materialization by columns; operators with a cheaper
    /// route should override.
    fn to_dense_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        let mut e = vec![0.0; d];
        let mut col = vec![0.0; d];
        for j in 0..d {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            e[j] = 0.0;
            for i in 0..d {
                m[(i, j)] = col[i];
            }
        }
        m
    }
}

impl LinearOp for SparseOperator {
    fn dim(&self) -> usize {
        SparseOperator::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        SparseOperator::apply(self, x, y)
    }

    fn to_dense_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }
}

/// Matrix-free operator from a closure.
pub struct MatFreeOp<F: Fn(&[f64], &mut [f64])> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> MatFreeOp<F> {
    pub fn new(dim: usize, f: F) -> Self {
        MatFreeOp { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOp for MatFreeOp<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

/// Converged extremal eigenpairs, ascending.
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Matrix-vector products spent.
    pub matvecs: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Indices where a new eigenvalue cluster starts (input ascending).
pub fn cluster_starts(eigs: &[f64], tol: f64) -> Vec<usize> {
    let mut starts = Vec::new();
    for i in 0..eigs.len() {
        if i == 0 || eigs[i] - eigs[i - 1] > tol {
            starts.push(i);
        }
    }
    starts
}

/// Distance from the lowest cluster to the next one, if any.
pub fn gap_above_lowest_cluster(eigs: &[f64], tol: f64) -> Option<f64> {
    let starts = cluster_starts(eigs, tol);
    starts.get(1).map(|&i| eigs[i] - eigs[0])
}

fn dense_lowest<O: LinearOp>(op: &O, k: usize, tol: f64) -> Result<SpectrumResult> {
    let dim = op.dim();
    let m = op.to_dense_matrix();
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut worst = 0.0f64;
    for &idx in order.iter().take(k) {
        let v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let lambda = eig.eigenvalues[idx];
        let mut av = vec![0.0; dim];
        op.apply(&v, &mut av);
        axpy(&mut av, -lambda, &v);
        let res = norm(&av);
        worst = worst.max(res);
        eigenvalues.push(lambda);
        eigenvectors.push(v);
        residuals.push(res);
    }
    if worst > tol {
        return Err(Error::Numerical {
            message: format!("dense path residual {worst:.3e} exceeds tolerance {tol:.3e}"),
            best_residual: worst,
        });
    }
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        residuals,
        matvecs: dim,
    })
}

struct Krylov<'a, O: LinearOp> {
    op: &'a O,
    deflation: &'a [Vec<f64>],
    basis: Vec<Vec<f64>>,
    proj: DMatrix<f64>,
    beta_last: f64,
    matvecs: usize,
}

impl<'a, O: LinearOp> Krylov<'a, O> {
    /// Two-pass orthogonalization against deflation space and basis;
    /// coefficients against the basis are accumulated into `h`.
    fn orthogonalize(&self, w: &mut [f64], h: &mut [f64]) {
        for _ in 0..2 {
            for d in self.deflation {
                let c = dot(w, d);
                axpy(w, -c, d);
            }
            for (i, v) in self.basis.iter().enumerate() {
                let c = dot(w, v);
                h[i] += c;
                axpy(w, -c, v);
            }
        }
    }

    /// Grow the basis by one vector; returns false on breakdown.
    fn expand(&mut self) -> bool {
        let j = self.basis.len() - 1;
        let mut w = vec![0.0; self.op.dim()];
        self.op.apply(&self.basis[j], &mut w);
        self.matvecs += 1;
        let mut h = vec![0.0; self.basis.len()];
        self.orthogonalize(&mut w, &mut h);
        for (i, &c) in h.iter().enumerate() {
            self.proj[(i, j)] = c;
            self.proj[(j, i)] = c;
        }
        self.beta_last = norm(&w);
        if self.beta_last < 1e-13 {
            return false;
        }
        for x in w.iter_mut() {
            *x /= self.beta_last;
        }
        self.basis.push(w);
        true
    }

    /// Ritz values (ascending), Ritz coefficient matrix columns, and
    /// residual estimates |beta * last component|.
    fn ritz(&self) -> (Vec<f64>, DMatrix<f64>, Vec<f64>) {
        let m = self.basis.len() - 1;
        let t = self.proj.view((0, 0), (m, m)).into_owned();
        let eig = t.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let theta: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut y = DMatrix::zeros(m, m);
        let mut estimates = Vec::with_capacity(m);
        for (new, &old) in order.iter().enumerate() {
            y.set_column(new, &eig.eigenvectors.column(old));
            estimates.push((self.beta_last * eig.eigenvectors[(m - 1, old)]).abs());
        }
        (theta, y, estimates)
    }

    fn ritz_vector(&self, y: &DMatrix<f64>, col: usize) -> Vec<f64> {
        let m = y.nrows();
        let mut z = vec![0.0; self.op.dim()];
        for i in 0..m {
            axpy(&mut z, y[(i, col)], &self.basis[i]);
        }
        z
    }
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.random::<f64>() - 0.5).collect()
}

/// Thick-restart iteration for the k smallest eigenpairs of `op`
/// orthogonal to `deflation` (which must hold exact eigenvectors,
/// orthonormal among themselves).
fn lanczos_smallest<O: LinearOp>(
    op: &O,
    k: usize,
    tol: f64,
    seed: u64,
    deflation: &[Vec<f64>],
) -> Result<SpectrumResult> {
    let dim = op.dim();
    let free = dim - deflation.len();
    if k == 0 || k > free {
        return Err(Error::invalid(format!(
            "requested {k} eigenpairs from a space of dimension {free}"
        )));
    }
    let max_basis = (3 * k + 30).clamp(48, 120).min(free);
    if k + 2 > max_basis {
        return Err(Error::limit(format!(
            "{k} eigenpairs exceed the iterative basis budget {max_basis}"
        )));
    }
    let budget = ((50.0 * k as f64 * (dim as f64).ln()) as usize).max(3000);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut kry = Krylov {
        op,
        deflation,
        basis: Vec::with_capacity(max_basis + 1),
        proj: DMatrix::zeros(max_basis + 1, max_basis + 1),
        beta_last: 0.0,
        matvecs: 0,
    };
    let mut v0 = random_unit(dim, &mut rng);
    let mut h0 = Vec::new();
    kry.orthogonalize(&mut v0, &mut h0);
    let n0 = norm(&v0);
    if n0 < 1e-12 {
        return Err(Error::invalid("start vector lies in the deflated space"));
    }
    for x in v0.iter_mut() {
        *x /= n0;
    }
    kry.basis.push(v0);

    let mut best_residual = f64::INFINITY;
    loop {
        // Expand until the basis is full or the space is exhausted.
        while kry.basis.len() <= max_basis {
            if !kry.expand() {
                // Breakdown: the Krylov space closed. Restart the tail
                // with a fresh random direction if room remains.
                if kry.basis.len() > k {
                    break;
                }
                let mut v = random_unit(dim, &mut rng);
                let mut sink = vec![0.0; kry.basis.len()];
                kry.orthogonalize(&mut v, &mut sink);
                let nv = norm(&v);
                if nv < 1e-12 {
                    break;
                }
                for x in v.iter_mut() {
                    *x /= nv;
                }
                *kry.basis.last_mut().expect("nonempty basis") = v;
            }
            if kry.matvecs > budget {
                break;
            }
        }

        let (theta, y, estimates) = kry.ritz();
        let m = theta.len();
        let converged = theta
            .iter()
            .zip(&estimates)
            .take(k)
            .all(|(_, &e)| e <= 0.5 * tol);
        let exhausted = kry.matvecs > budget || m == free;
        if converged || exhausted {
            // Confirm with explicit residuals.
            let mut eigenvalues = Vec::with_capacity(k);
            let mut eigenvectors = Vec::with_capacity(k);
            let mut residuals = Vec::with_capacity(k);
            let mut worst = 0.0f64;
            for i in 0..k {
                let z = kry.ritz_vector(&y, i);
                let mut az = vec![0.0; dim];
                op.apply(&z, &mut az);
                kry.matvecs += 1;
                let rho = dot(&z, &az);
                axpy(&mut az, -rho, &z);
                let res = norm(&az);
                worst = worst.max(res);
                eigenvalues.push(rho);
                eigenvectors.push(z);
                residuals.push(res);
            }
            best_residual = best_residual.min(worst);
            if worst <= tol {
                // Rayleigh quotients of distinct Ritz vectors can
                // reorder within roundoff; sort defensively.
                let mut order: Vec<usize> = (0..k).collect();
                order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
                let eigenvalues: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
                let eigenvectors: Vec<Vec<f64>> = order
                    .iter()
                    .map(|&i| std::mem::take(&mut eigenvectors[i]))
                    .collect();
                let residuals: Vec<f64> = order.iter().map(|&i| residuals[i]).collect();
                return Ok(SpectrumResult {
                    eigenvalues,
                    eigenvectors,
                    residuals,
                    matvecs: kry.matvecs,
                });
            }
            if exhausted {
                return Err(Error::Numerical {
                    message: format!(
                        "no convergence after {} matrix-vector products (budget {budget})",
                        kry.matvecs
                    ),
                    best_residual,
                });
            }
        }

        // Thick restart: keep the leading Ritz vectors plus the
        // pending residual direction, re-enter the generic loop.
        let keep = (k + 12).min(m.saturating_sub(2)).max(k.min(m));
        let carry = kry.basis.pop().expect("pending vector");
        let mut new_basis: Vec<Vec<f64>> = (0..keep).map(|i| kry.ritz_vector(&y, i)).collect();
        let mut proj = DMatrix::zeros(max_basis + 1, max_basis + 1);
        for (i, &t) in theta.iter().enumerate().take(keep) {
            proj[(i, i)] = t;
        }
        new_basis.push(carry);
        kry.basis = new_basis;
        kry.proj = proj;
        kry.beta_last = 0.0;
    }
}

/// The k smallest eigenpairs of a symmetric operator: dense under
/// [`DENSE_FALLBACK_DIM`], seeded thick-restart iteration above.
pub fn lowest_eigenpairs_of<O: LinearOp>(
    op: &O,
    k: usize,
    tol: f64,
    seed: u64,
) -> Result<SpectrumResult> {
    if k == 0 || k > op.dim() {
        return Err(Error::invalid(format!(
            "requested {k} eigenpairs of a dimension-{} operator",
            op.dim()
        )));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive and finite"));
    }
    if op.dim() <= DENSE_FALLBACK_DIM {
        dense_lowest(op, k, tol)
    } else {
        lanczos_smallest(op, k, tol, seed, &[])
    }
}

/// The k smallest eigenpairs of a sparse operator.
pub fn lowest_eigenpairs(op: &SparseOperator, k: usize, tol: f64, seed: u64) -> Result<SpectrumResult> {
    lowest_eigenpairs_of(op, k, tol, seed)
}

/// Smallest eigenvalue strictly above a known exact kernel, with its
/// residual.  The kernel vectors must be orthonormal eigenvectors with
/// eigenvalue ~0; this is asserted before they are trusted.
pub fn smallest_above_kernel<O: LinearOp>(
    op: &O,
    kernel: &[Vec<f64>],
    tol: f64,
    seed: u64,
) -> Result<(f64, f64)> {
    let dim = op.dim();
    let mut scratch = vec![0.0; dim];
    for v in kernel {
        op.apply(v, &mut scratch);
        let res = norm(&scratch);
        if res > 1e-9 {
            return Err(Error::Numerical {
                message: format!("claimed kernel vector has residual {res:.3e}"),
                best_residual: res,
            });
        }
    }
    if dim <= DENSE_FALLBACK_DIM {
        let res = dense_lowest(op, (kernel.len() + 1).min(dim), tol)?;
        for (i, &lam) in res.eigenvalues.iter().take(kernel.len()).enumerate() {
            if lam.abs() > 1e-8 {
                return Err(Error::Numerical {
                    message: format!("expected kernel eigenvalue {i} but found {lam:.3e}"),
                    best_residual: lam.abs(),
                });
            }
        }
        let idx = kernel.len();
        Ok((res.eigenvalues[idx], res.residuals[idx]))
    } else {
        let res = lanczos_smallest(op, 1, tol, seed, kernel)?;
        Ok((res.eigenvalues[0], res.residuals[0]))
    }
}

/// One row of a gap scan.
#[derive(Clone, Debug)]
pub struct GapPoint {
    pub n: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub gap: f64,
    /// Sector holding the first excited state (representative with
    /// p >= q; the mirror sector is degenerate with it).
    pub sector: SectorLabel,
    /// Solver residual of the lambda2 eigenpair.
    pub residual: f64,
}

/// Gap table with its log-log least-squares fit (natural logs).
#[derive(Clone, Debug)]
pub struct GapFit {
    pub points: Vec<GapPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    /// True when every first excited state sits in a sector with one
    /// unmatched bracket.
    pub first_excited_one_unmatched: bool,
}

fn block_has_kernel(variant: Variant, label: SectorLabel) -> Result<bool> {
    Ok(match variant {
        Variant::Full => label.p == 0 && label.q == 0,
        Variant::Simplified => label.p == 0,
        Variant::Bulk => true,
        Variant::Eps(eps) => {
            if eps <= 0.0 {
                return Err(Error::invalid(
                    "transport-only spectra have large degenerate kernels; use heisenberg_gap_check",
                ));
            }
            true
        }
        Variant::Move | Variant::Interaction => {
            return Err(Error::invalid(
                "split bulk terms have large degenerate kernels; use heisenberg_gap_check",
            ));
        }
    })
}

fn uniform_vector(dim: usize) -> Vec<f64> {
    vec![1.0 / (dim as f64).sqrt(); dim]
}

/// Spectral gap per chain length via sector-restricted solves, plus a
/// power-law fit of gap against length.  For variants whose ground
/// space is degenerate (one uniform vector per sector), the gap is
/// measured from that kernel cluster to the next eigenvalue, matching
/// the clustering policy of [`CLUSTER_TOL`].
pub fn gap_scan(
    n_min: usize,
    n_max: usize,
    variant: Variant,
    tol: f64,
    seed: u64,
) -> Result<GapFit> {
    if n_min < 2 || n_min > n_max {
        return Err(Error::invalid(format!(
            "bad scan range [{n_min}, {n_max}]"
        )));
    }
    let mut points = Vec::with_capacity(n_max - n_min + 1);
    for n in n_min..=n_max {
        let mut lambda1 = f64::NAN;
        let mut best: Option<(f64, SectorLabel, f64)> = None;
        for m in 0..=n {
            for p in m.div_ceil(2)..=m {
                let label = SectorLabel::new(p, m - p);
                let basis = std::sync::Arc::new(SectorBasis::new(n, label)?);
                let block = sector_block_on(basis, variant)?;
                let (value, residual) = if block_has_kernel(variant, label)? {
                    let u = uniform_vector(block.dim());
                    if label.is_balanced() {
                        let au = block.matvec(&u);
                        lambda1 = dot(&u, &au);
                    }
                    if block.dim() == 1 {
                        continue; // kernel only, nothing above it
                    }
                    smallest_above_kernel(&block, std::slice::from_ref(&u), tol, seed)?
                } else {
                    let res = lowest_eigenpairs_of(&block, 1, tol, seed)?;
                    (res.eigenvalues[0], res.residuals[0])
                };
                if best.as_ref().is_none_or(|b| value < b.0) {
                    best = Some((value, label, residual));
                }
            }
        }
        let (lambda2, sector, residual) = best.ok_or_else(|| {
            Error::invalid(format!("no excited sector found at length {n}"))
        })?;
        points.push(GapPoint {
            n,
            lambda1,
            lambda2,
            gap: lambda2 - lambda1,
            sector,
            residual,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|p| {
            if p.gap > 0.0 {
                Ok(p.gap.ln())
            } else {
                Err(Error::Numerical {
                    message: format!("non-positive gap {} at n={}", p.gap, p.n),
                    best_residual: p.gap,
                })
            }
        })
        .collect::<Result<_>>()?;
    let (slope, intercept, rms_residual) = if points.len() >= 2 {
        let fit = linear_fit(&xs, &ys)?;
        (fit.slope, fit.intercept, fit.rms_residual)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    let first_excited_one_unmatched = points.iter().all(|p| p.sector.excess() == 1);
    Ok(GapFit {
        points,
        slope,
        intercept,
        rms_residual,
        first_excited_one_unmatched,
    })
}

/// Comparison of the transport-term gap against 1 - cos(pi/n).
#[derive(Clone, Copy, Debug)]
pub struct HeisenbergCheck {
    pub n: usize,
    pub numeric: f64,
    pub analytic: f64,
    pub difference: f64,
}

/// Uniform vectors over the bracket-pattern fibers of the balanced
/// sector; these span the exact kernel of the transport term.
fn bracket_fiber_vectors(basis: &SectorBasis) -> Vec<Vec<f64>> {
    use std::collections::HashMap;
    let mut fibers: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, s) in basis.states().iter().enumerate() {
        let key = dyck_projection(s)
            .expect("balanced strings project to balanced bracket words")
            .code();
        fibers.entry(key).or_default().push(i);
    }
    let mut keys: Vec<u64> = fibers.keys().copied().collect();
    keys.sort_unstable();
    keys.iter()
        .map(|k| {
            let members = &fibers[k];
            let amp = 1.0 / (members.len() as f64).sqrt();
            let mut v = vec![0.0; basis.dim()];
            for &i in members {
                v[i] = amp;
            }
            v
        })
        .collect()
}

/// Smallest nonzero eigenvalue of the transport term on the balanced
/// sector, against the closed-form chain gap.
pub fn heisenberg_gap_check(n: usize, tol: f64, seed: u64) -> Result<HeisenbergCheck> {
    if !(3..=12).contains(&n) {
        return Err(Error::invalid(format!(
            "transport gap check supports 3 <= n <= 12, got {n}"
        )));
    }
    let basis = std::sync::Arc::new(SectorBasis::new(n, SectorLabel::balanced())?);
    let kernel = bracket_fiber_vectors(&basis);
    let block = sector_block_on(basis, Variant::Move)?;
    let (numeric, _res) = smallest_above_kernel(&block, &kernel, tol, seed)?;
    let analytic = 1.0 - (std::f64::consts::PI / n as f64).cos();
    Ok(HeisenbergCheck {
        n,
        numeric,
        analytic,
        difference: numeric - analytic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::catalan;
    use crate::hamiltonian::{
        build_hamiltonian, build_variant, motzkin_vector, projector_pi, sector_block,
    };
    use num::ToPrimitive;

    fn projector_op() -> impl LinearOp {
        let pi = *projector_pi().matrix();
        MatFreeOp::new(9, move |x: &[f64], y: &mut [f64]| {
            for r in 0..9 {
                y[r] = (0..9).map(|c| pi[r][c] * x[c]).sum();
            }
        })
    }

    #[test]
    fn projector_spectrum_is_zeros_and_ones() {
        let op = projector_op();
        let res = lowest_eigenpairs_of(&op, 9, 1e-10, 1).unwrap();
        for i in 0..6 {
            assert!(res.eigenvalues[i].abs() < 1e-12, "zero part {i}");
        }
        for i in 6..9 {
            assert!((res.eigenvalues[i] - 1.0).abs() < 1e-12, "unit part {i}");
        }
    }

    #[test]
    fn two_site_gap_is_pinned() {
        let h = build_hamiltonian(2, &[1.0, 1.0, 1.0]).unwrap();
        let res = lowest_eigenpairs(&h, 2, 1e-12, 3).unwrap();
        assert!(res.eigenvalues[0].abs() < 1e-12);
        let expect = 1.0 - 1.0 / 2f64.sqrt();
        assert!((res.eigenvalues[1] - expect).abs() < 1e-12);
        // Ground vector proportional to |00> + |lr>.
        let v = &res.eigenvectors[0];
        let overlap = (v[0] + v[5]).abs() / 2f64.sqrt();
        assert!((overlap - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_shift_moves_the_spectrum() {
        let h = build_variant(3, Variant::Full).unwrap();
        let base = lowest_eigenpairs(&h, 3, 1e-10, 5).unwrap();
        let shifted_op = MatFreeOp::new(h.dim(), |x: &[f64], y: &mut [f64]| {
            h.apply(x, y);
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi += 0.75 * xi;
            }
        });
        let shifted = lowest_eigenpairs_of(&shifted_op, 3, 1e-10, 5).unwrap();
        for i in 0..3 {
            assert!(
                (shifted.eigenvalues[i] - base.eigenvalues[i] - 0.75).abs() < 1e-10,
                "pair {i}"
            );
        }
    }

    #[test]
    fn iterative_path_matches_dense() {
        let block = sector_block(7, SectorLabel::balanced(), Variant::Full).unwrap();
        let tol = 1e-10;
        let dense = dense_lowest(&block, 3, tol).unwrap();
        let iter = lanczos_smallest(&block, 3, tol, 11, &[]).unwrap();
        for i in 0..3 {
            assert!(
                (dense.eigenvalues[i] - iter.eigenvalues[i]).abs() <= 10.0 * tol,
                "pair {i}: dense {} vs iterative {}",
                dense.eigenvalues[i],
                iter.eigenvalues[i]
            );
            assert!(iter.residuals[i] <= tol);
        }
    }

    #[test]
    fn iterative_path_is_deterministic() {
        let block = sector_block(6, SectorLabel::new(1, 0), Variant::Full).unwrap();
        let a = lanczos_smallest(&block, 2, 1e-10, 42, &[]).unwrap();
        let b = lanczos_smallest(&block, 2, 1e-10, 42, &[]).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.matvecs, b.matvecs);
    }

    #[test]
    fn transport_kernel_counts_bracket_patterns() {
        for n in [6usize, 7] {
            let basis = std::sync::Arc::new(SectorBasis::new(n, SectorLabel::balanced()).unwrap());
            let fibers = bracket_fiber_vectors(&basis);
            let expect: usize = (0..=n / 2)
                .map(|m| catalan(m).to_usize().unwrap())
                .sum();
            assert_eq!(fibers.len(), expect, "n={n}");
            let block = sector_block_on(basis, Variant::Move).unwrap();
            let all = dense_lowest(&block, block.dim(), 1e-9).unwrap();
            let zeros = all.eigenvalues.iter().filter(|x| x.abs() < 1e-8).count();
            assert_eq!(zeros, expect, "n={n}");
        }
    }

    #[test]
    fn transport_gap_matches_chain_formula() {
        for n in 4..=8usize {
            let check = heisenberg_gap_check(n, 1e-11, 9).unwrap();
            assert!(
                check.difference.abs() < 1e-9,
                "n={n}: numeric {} vs analytic {}",
                check.numeric,
                check.analytic
            );
        }
        let c4 = heisenberg_gap_check(4, 1e-11, 9).unwrap();
        assert!((c4.analytic - 0.2928932188134524).abs() < 1e-15);
    }

    #[test]
    fn small_scan_finds_one_unmatched_sectors() {
        let fit = gap_scan(2, 5, Variant::Full, 1e-10, 7).unwrap();
        assert_eq!(fit.points.len(), 4);
        for p in &fit.points {
            assert!(p.lambda1.abs() < 1e-10, "n={}", p.n);
            assert!(p.gap > 0.0);
            assert_eq!(p.sector.excess(), 1, "n={}", p.n);
        }
        assert!(fit.first_excited_one_unmatched);
        // Two sites: the excited sector block [[1/2,-1/2],[-1/2,3/2]]
        // has smallest eigenvalue 1 - 1/sqrt(2).
        let expect = 1.0 - 1.0 / 2f64.sqrt();
        assert!((fit.points[0].gap - expect).abs() < 1e-10);
    }

    #[test]
    fn three_site_gap_regression() {
        // Frozen from a dense diagonalization of the 27-dimensional
        // chain; the first excited level is mirror-degenerate.
        let h = build_variant(3, Variant::Full).unwrap();
        let res = lowest_eigenpairs(&h, 3, 1e-12, 7).unwrap();
        assert!(res.eigenvalues[0].abs() < 1e-12);
        assert!((res.eigenvalues[1] - 0.080996939310093).abs() < 1e-11);
        assert!((res.eigenvalues[2] - res.eigenvalues[1]).abs() < 1e-10);
    }

    #[test]
    fn scan_rejects_degenerate_variants() {
        assert!(gap_scan(3, 4, Variant::Move, 1e-10, 7).is_err());
        assert!(gap_scan(3, 4, Variant::Eps(0.0), 1e-10, 7).is_err());
        assert!(gap_scan(4, 3, Variant::Full, 1e-10, 7).is_err());
    }

    #[test]
    fn eps_gap_never_exceeds_full_gap() {
        // The operator inequality compares restrictions to the
        // balanced sector, where both kernels are the uniform vector.
        for n in [4usize, 6] {
            let basis = std::sync::Arc::new(SectorBasis::new(n, SectorLabel::balanced()).unwrap());
            let u = uniform_vector(basis.dim());
            let full_block = sector_block_on(basis.clone(), Variant::Full).unwrap();
            let (full, _) = smallest_above_kernel(&full_block, std::slice::from_ref(&u), 1e-10, 7).unwrap();
            for eps in [0.1, 0.5, 1.0] {
                let block = sector_block_on(basis.clone(), Variant::Eps(eps)).unwrap();
                let (pert, _) =
                    smallest_above_kernel(&block, std::slice::from_ref(&u), 1e-10, 7).unwrap();
                assert!(
                    full >= pert - 1e-9,
                    "n={n} eps={eps}: full {full} vs perturbed {pert}"
                );
            }
        }
    }

    #[test]
    fn weighted_gap_never_shrinks() {
        for n in [4usize, 5] {
            let unit = build_variant(n, Variant::Full).unwrap();
            let weights: Vec<f64> = (0..=n).map(|k| 1.0 + (k % 3) as f64).collect();
            let heavy = build_hamiltonian(n, &weights).unwrap();
            let a = lowest_eigenpairs(&unit, 2, 1e-10, 7).unwrap();
            let b = lowest_eigenpairs(&heavy, 2, 1e-10, 7).unwrap();
            assert!(b.eigenvalues[0].abs() < 1e-10);
            assert!(b.eigenvalues[1] >= a.eigenvalues[1] - 1e-9, "n={n}");
        }
    }

    #[test]
    fn full_space_ground_state_is_unique_and_uniform() {
        for n in 3..=6usize {
            let h = build_variant(n, Variant::Full).unwrap();
            let res = lowest_eigenpairs(&h, 2, 1e-10, 7).unwrap();
            assert!(res.eigenvalues[0].abs() < 1e-10, "n={n}");
            assert!(res.eigenvalues[1] > 1e-10, "n={n}");
            let target = motzkin_vector(n).unwrap();
            let fidelity = dot(&res.eigenvectors[0], &target).abs();
            assert!(fidelity > 1.0 - 1e-10, "n={n} fidelity {fidelity}");
        }
    }

    #[test]
    fn cluster_utilities() {
        let eigs = [0.0, 1e-12, 3e-10, 0.25, 0.2500000001, 0.7];
        let starts = cluster_starts(&eigs, CLUSTER_TOL);
        assert_eq!(starts, vec![0, 3, 5]);
        let gap = gap_above_lowest_cluster(&eigs, CLUSTER_TOL).unwrap();
        assert!((gap - 0.25).abs() < 1e-12);
        assert!(gap_above_lowest_cluster(&[0.1], CLUSTER_TOL).is_none());
    }

    #[test]
    fn input_validation() {
        let h = build_variant(3, Variant::Full).unwrap();
        assert!(lowest_eigenpairs(&h, 0, 1e-10, 1).is_err());
        assert!(lowest_eigenpairs(&h, 28, 1e-10, 1).is_err());
        assert!(lowest_eigenpairs(&h, 2, 0.0, 1).is_err());
        assert!(heisenberg_gap_check(2, 1e-10, 1).is_err());
        assert!(heisenberg_gap_check(13, 1e-10, 1).is_err());
    }
}
