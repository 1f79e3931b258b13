//! Schmidt data of the balanced uniform superposition across a cut.
//!
//! Cutting the chain after `cut` sites turns the balanced uniform state
//! into a sum of uniform class states on each side, paired by the height
//! `m` at the cut.  The Schmidt coefficients are therefore ratios of
//! exact class counts, and everything here (spectrum, rank, entropy,
//! profile asymptotics, the sign-twisted excitation witness) is driven
//! by big-integer counting rather than state enumeration, which keeps
//! cuts of length-100000 chains in reach.

use std::sync::Arc;

use nalgebra::DMatrix;
use num::{BigRational, BigUint, ToPrimitive, Zero};

use crate::combinatorics::{
    class_size_row, enumerate_class, motzkin_number, Letter, SectorLabel, SpinString, TrinomialRow,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{motzkin_vector, sector_block_on, SectorBasis, Variant};
use crate::numerics::{exp2_f64, log2_biguint, KahanSum, Log2};

/// Largest chain the twisted-state builder will enumerate.
pub const TWISTED_SITE_CAP: usize = 14;

/// Largest chain for which the reduced density matrix is built densely.
pub const RDM_SITE_CAP: usize = 12;

/// Exact Schmidt coefficients p_m = numerators[m] / denominator across
/// one cut.  The shared denominator is kept unreduced so that building
/// the spectrum never runs big-integer gcds.
#[derive(Debug, Clone)]
pub struct SchmidtSpectrum {
    n: usize,
    cut: usize,
    numerators: Vec<BigUint>,
    denominator: BigUint,
}

impl SchmidtSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cut(&self) -> usize {
        self.cut
    }

    /// Number of nonzero coefficients; min(cut, n-cut) + 1.
    pub fn rank(&self) -> usize {
        self.numerators.len()
    }

    /// Unreduced numerator of p_m.
    pub fn numerator(&self, m: usize) -> Option<&BigUint> {
        self.numerators.get(m)
    }

    /// Shared denominator: the number of balanced strings.
    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    /// p_m as a reduced rational.
    pub fn coefficient(&self, m: usize) -> Option<BigRational> {
        self.numerators
            .get(m)
            .map(|num| BigRational::new(num.clone().into(), self.denominator.clone().into()))
    }

    /// All coefficients as reduced rationals.  Each reduction runs a
    /// big-integer gcd, so prefer the raw accessors for very large n.
    pub fn coefficients(&self) -> Vec<BigRational> {
        (0..self.rank()).map(|m| self.coefficient(m).expect("in range")).collect()
    }

    /// Exact check of the normalization identity sum_m p_m = 1.
    pub fn sum_is_one(&self) -> bool {
        let mut sum = BigUint::zero();
        for num in &self.numerators {
            sum += num;
        }
        sum == self.denominator
    }

    /// Entropy -sum p_m log2 p_m in bits, from split logarithms of the
    /// exact integers; safe when the coefficients underflow f64.
    pub fn entropy_bits(&self) -> Result<f64> {
        let den_log = log2_biguint(&self.denominator)?;
        let mut acc = KahanSum::new();
        for num in &self.numerators {
            let num_log = log2_biguint(num)?;
            entropy_term(&mut acc, num_log, den_log);
        }
        Ok(acc.value())
    }
}

/// Adds -p log2 p for p = 2^(num_log - den_log) to the accumulator.
fn entropy_term(acc: &mut KahanSum, num_log: Log2, den_log: Log2) {
    let y = (num_log.int - den_log.int) as f64 + (num_log.frac - den_log.frac);
    let p = exp2_f64(y);
    acc.add(-p * y);
}

/// Schmidt spectrum across the half-chain cut.
pub fn schmidt_spectrum(n: usize) -> Result<SchmidtSpectrum> {
    check_even(n)?;
    schmidt_spectrum_at_cut(n, n / 2)
}

/// Schmidt spectrum across the cut after `cut` sites.  The left factor
/// of the height-m term is the uniform state on strings with no
/// unmatched closer and m unmatched openers; the right factor mirrors
/// it, so p_m is a product of two class sizes over the balanced count.
pub fn schmidt_spectrum_at_cut(n: usize, cut: usize) -> Result<SchmidtSpectrum> {
    if n < 2 {
        return Err(Error::invalid("cut spectra need at least two sites"));
    }
    if cut == 0 || cut >= n {
        return Err(Error::invalid(format!(
            "cut must satisfy 1 <= cut < n, got cut={cut}, n={n}"
        )));
    }
    let denominator = motzkin_number(n);
    let numerators = if 2 * cut == n {
        half_cut_numerators(cut)
    } else {
        let left = class_size_row(cut);
        let right = class_size_row(n - cut);
        (0..=cut.min(n - cut)).map(|m| &left[m] * &right[m]).collect()
    };
    let mut sum = BigUint::zero();
    for num in &numerators {
        if num.is_zero() {
            return Err(Error::Numerical {
                message: format!("vanishing Schmidt coefficient at n={n}, cut={cut}"),
                best_residual: f64::NAN,
            });
        }
        sum += num;
    }
    if sum != denominator {
        return Err(Error::Numerical {
            message: format!(
                "cut coefficients fail to tile the balanced class at n={n}, cut={cut}"
            ),
            best_residual: f64::NAN,
        });
    }
    Ok(SchmidtSpectrum {
        n,
        cut,
        numerators,
        denominator,
    })
}

/// Squared class sizes of the half chain, streamed off one trinomial
/// row; index m counts unmatched openers.
fn half_cut_numerators(half: usize) -> Vec<BigUint> {
    let mut nums = vec![BigUint::zero(); half + 1];
    let mut window: [BigUint; 2] = [BigUint::zero(), BigUint::zero()];
    for (j, a) in TrinomialRow::new(half).enumerate() {
        let size = if j >= 2 { &a - &window[0] } else { a.clone() };
        nums[half - j] = &size * &size;
        window.swap(0, 1);
        window[1] = a;
    }
    nums
}

/// Streamed per-coefficient data for the half cut: split logarithms of
/// each class size, the log of the balanced count, and the exact argmax.
struct HalfCutLogs {
    size_logs: Vec<Log2>,
    den_log: Log2,
    argmax_m: usize,
}

impl HalfCutLogs {
    /// p_m in double precision (underflows gracefully to zero).
    fn probability(&self, m: usize) -> f64 {
        let l = self.size_logs[m];
        let y = (2 * l.int - self.den_log.int) as f64 + (2.0 * l.frac - self.den_log.frac);
        exp2_f64(y)
    }
}

/// One pass over the half-chain trinomial row: logs of every class
/// size, the running square sum checked exactly against the balanced
/// count, and the largest coefficient's position.
fn half_cut_logs(n: usize) -> Result<HalfCutLogs> {
    check_even(n)?;
    if n < 2 {
        return Err(Error::invalid("cut spectra need at least two sites"));
    }
    let half = n / 2;
    let denominator = motzkin_number(n);
    let mut size_logs = vec![Log2 { int: 0, frac: 0.0 }; half + 1];
    let mut sum_sq = BigUint::zero();
    let mut best: (BigUint, usize) = (BigUint::zero(), 0);
    let mut window: [BigUint; 2] = [BigUint::zero(), BigUint::zero()];
    for (j, a) in TrinomialRow::new(half).enumerate() {
        let size = if j >= 2 { &a - &window[0] } else { a.clone() };
        let m = half - j;
        size_logs[m] = log2_biguint(&size)?;
        sum_sq += &size * &size;
        if size > best.0 {
            best = (size, m);
        }
        window.swap(0, 1);
        window[1] = a;
    }
    if sum_sq != denominator {
        return Err(Error::Numerical {
            message: format!("half-cut square sum disagrees with the balanced count at n={n}"),
            best_residual: f64::NAN,
        });
    }
    Ok(HalfCutLogs {
        size_logs,
        den_log: log2_biguint(&denominator)?,
        argmax_m: best.1,
    })
}

/// Schmidt rank across the half cut, counted from class-size positivity
/// without forming squares or logarithms.
pub fn schmidt_rank(n: usize) -> Result<usize> {
    check_even(n)?;
    if n < 2 {
        return Err(Error::invalid("cut spectra need at least two sites"));
    }
    let half = n / 2;
    let mut rank = 0usize;
    let mut window: [BigUint; 2] = [BigUint::zero(), BigUint::zero()];
    for (j, a) in TrinomialRow::new(half).enumerate() {
        let size = if j >= 2 { &a - &window[0] } else { a.clone() };
        if !size.is_zero() {
            rank += 1;
        }
        window.swap(0, 1);
        window[1] = a;
    }
    Ok(rank)
}

/// Half-cut entanglement entropy in bits and its offset above the
/// half-log envelope.
#[derive(Debug, Clone, Copy)]
pub struct EntropyPoint {
    pub n: usize,
    /// S = -sum_m p_m log2 p_m.
    pub s_bits: f64,
    /// c_n = S - log2(n)/2.
    pub c_n: f64,
}

/// Streaming half-cut entropy.  Big integers are held only inside a
/// constant-size window, so this runs at n = 100000 in seconds.
pub fn entropy(n: usize) -> Result<EntropyPoint> {
    let logs = half_cut_logs(n)?;
    let mut acc = KahanSum::new();
    for l in &logs.size_logs {
        let double = Log2 {
            int: 2 * l.int,
            frac: 2.0 * l.frac,
        };
        entropy_term(&mut acc, double, logs.den_log);
    }
    let s_bits = acc.value();
    Ok(EntropyPoint {
        n,
        s_bits,
        c_n: s_bits - 0.5 * (n as f64).log2(),
    })
}

/// Comparison of the exact half-cut coefficients against the Gaussian
/// profile m^2 exp(-3 m^2 / n) on the window m in [sqrt(n)/2, 2 sqrt(n)].
#[derive(Debug, Clone, Copy)]
pub struct PmAsymptotics {
    pub n: usize,
    /// Largest relative deviation between the window-normalized exact
    /// and model profiles.
    pub max_rel_deviation: f64,
    /// Exact argmax of p_m (big-integer comparison, no rounding).
    pub argmax_m: usize,
    /// Model prediction sqrt(n/3) for the argmax.
    pub argmax_prediction: f64,
    /// max_m p_m scaled by sqrt(n); bounded in n.
    pub max_pm_times_sqrt_n: f64,
}

/// Profile check of the half-cut coefficients at large n.
pub fn pm_asymptotic_check(n: usize) -> Result<PmAsymptotics> {
    if n < 100 {
        return Err(Error::invalid("profile comparison needs n >= 100"));
    }
    let logs = half_cut_logs(n)?;
    let half = n / 2;
    let sqrt_n = (n as f64).sqrt();
    let lo = (sqrt_n / 2.0).ceil() as usize;
    let hi = ((2.0 * sqrt_n).floor() as usize).min(half);
    if lo >= hi {
        return Err(Error::invalid("profile window is empty"));
    }
    let model = |m: usize| {
        let x = m as f64;
        x * x * (-3.0 * x * x / n as f64).exp()
    };
    let mut exact_sum = KahanSum::new();
    let mut model_sum = KahanSum::new();
    for m in lo..=hi {
        exact_sum.add(logs.probability(m));
        model_sum.add(model(m));
    }
    let mut max_rel = 0.0f64;
    for m in lo..=hi {
        let p_hat = logs.probability(m) / exact_sum.value();
        let f_hat = model(m) / model_sum.value();
        max_rel = max_rel.max((p_hat - f_hat).abs() / f_hat);
    }
    Ok(PmAsymptotics {
        n,
        max_rel_deviation: max_rel,
        argmax_m: logs.argmax_m,
        argmax_prediction: (n as f64 / 3.0).sqrt(),
        max_pm_times_sqrt_n: logs.probability(logs.argmax_m) * sqrt_n,
    })
}

/// Variational excitation energy from a sign-twisted copy of the
/// balanced uniform state.
#[derive(Debug, Clone, Copy)]
pub struct TwistedEnergy {
    pub n: usize,
    /// Heights up to this value keep their sign; larger heights flip.
    pub twist_index: usize,
    /// Rayleigh quotient of the twisted state after projecting out the
    /// ground state; upper-bounds the first excited level.
    pub energy: f64,
    /// Residual overlap with the ground state after orthogonalization.
    pub ground_overlap: f64,
}

/// Builds the twisted state explicitly on the balanced sector: flips
/// the sign of every basis string whose mid-chain height exceeds the
/// cut index k, with k placed where the cumulative Schmidt weight is
/// exactly closest to one half, then orthogonalizes and evaluates the
/// energy.
pub fn twisted_state_energy(n: usize) -> Result<TwistedEnergy> {
    check_even(n)?;
    if n < 2 {
        return Err(Error::invalid("twisted state needs at least two sites"));
    }
    if n > TWISTED_SITE_CAP {
        return Err(Error::limit(format!(
            "twisted state is built explicitly; n={n} exceeds cap {TWISTED_SITE_CAP}"
        )));
    }
    let spectrum = schmidt_spectrum(n)?;
    let twist_index = median_twist_index(&spectrum);
    let half = n / 2;

    let basis = Arc::new(SectorBasis::new(n, SectorLabel::balanced())?);
    let block = sector_block_on(Arc::clone(&basis), Variant::Full)?;
    let dim = basis.dim();
    let amp = 1.0 / (dim as f64).sqrt();
    let mut phi: Vec<f64> = Vec::with_capacity(dim);
    for i in 0..dim {
        let m = mid_height(basis.state(i), half);
        phi.push(if m <= twist_index { amp } else { -amp });
    }
    let uniform = vec![amp; dim];

    let overlap: f64 = phi.iter().zip(&uniform).map(|(a, b)| a * b).sum();
    for (x, u) in phi.iter_mut().zip(&uniform) {
        *x -= overlap * u;
    }
    let norm = phi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(Error::Numerical {
            message: "twisted state collapsed onto the ground state".into(),
            best_residual: norm,
        });
    }
    for x in phi.iter_mut() {
        *x /= norm;
    }
    let h_phi = block.matvec(&phi);
    let energy: f64 = phi.iter().zip(&h_phi).map(|(a, b)| a * b).sum();
    let ground_overlap: f64 = phi.iter().zip(&uniform).map(|(a, b)| a * b).sum();
    Ok(TwistedEnergy {
        n,
        twist_index,
        energy,
        ground_overlap: ground_overlap.abs(),
    })
}

/// Index k minimizing |sum_{m<=k} p_m - 1/2|, by exact integer
/// comparison of 2*prefix against the denominator; ties keep the
/// smallest k.
fn median_twist_index(spectrum: &SchmidtSpectrum) -> usize {
    let den = spectrum.denominator();
    let mut prefix = BigUint::zero();
    let mut best: Option<(BigUint, usize)> = None;
    for m in 0..spectrum.rank() {
        prefix += spectrum.numerator(m).expect("in range");
        let twice = &prefix << 1;
        let diff = if twice >= *den {
            twice - den
        } else {
            den - twice
        };
        match &best {
            Some((d, _)) if *d <= diff => {}
            _ => best = Some((diff, m)),
        }
    }
    best.expect("nonempty spectrum").1
}

/// Height of the walk after the first `half` letters.
fn mid_height(s: &SpinString, half: usize) -> usize {
    let mut h: i64 = 0;
    for &l in &s.letters()[..half] {
        match l {
            Letter::Left => h += 1,
            Letter::Right => h -= 1,
            Letter::Zero => {}
        }
    }
    debug_assert!(h >= 0, "balanced strings never dip below the base line");
    h as usize
}

/// Eigenvalues of the reduced density matrix of the explicitly built
/// balanced uniform state, traced over the right half; sorted
/// descending.  Cross-checks the counting spectrum.
pub fn reduced_density_spectrum(n: usize) -> Result<Vec<f64>> {
    check_even(n)?;
    if n < 2 {
        return Err(Error::invalid("cut spectra need at least two sites"));
    }
    if n > RDM_SITE_CAP {
        return Err(Error::limit(format!(
            "dense reduced density matrix caps at {RDM_SITE_CAP} sites, got {n}"
        )));
    }
    let psi = motzkin_vector(n)?;
    let half_dim = 3usize.pow((n / 2) as u32);
    let mut coeff = DMatrix::<f64>::zeros(half_dim, half_dim);
    for (code, &a) in psi.iter().enumerate() {
        if a != 0.0 {
            coeff[(code / half_dim, code % half_dim)] = a;
        }
    }
    let rho = &coeff * coeff.transpose();
    let mut eigs: Vec<f64> = rho.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| b.total_cmp(a));
    Ok(eigs)
}

/// Rebuilds the balanced uniform state from its Schmidt factors (uniform
/// class states on each half, paired by cut height) and returns the
/// Euclidean distance to the directly built state.
pub fn schmidt_reconstruction_error(n: usize) -> Result<f64> {
    check_even(n)?;
    if n < 2 {
        return Err(Error::invalid("cut spectra need at least two sites"));
    }
    if n > 10 {
        return Err(Error::limit(format!(
            "full-space reconstruction caps at 10 sites, got {n}"
        )));
    }
    let psi = motzkin_vector(n)?;
    let spectrum = schmidt_spectrum(n)?;
    let half = n / 2;
    let half_dim = 3usize.pow(half as u32);
    let den = spectrum
        .denominator()
        .to_f64()
        .ok_or_else(|| Error::invalid("balanced count overflows f64"))?;
    let mut recon = vec![0.0f64; psi.len()];
    for m in 0..spectrum.rank() {
        let left = enumerate_class(half, SectorLabel::new(0, m))?;
        let right = enumerate_class(half, SectorLabel::new(m, 0))?;
        let product = BigUint::from(left.len()) * BigUint::from(right.len());
        if product != *spectrum.numerator(m).expect("in range") {
            return Err(Error::Numerical {
                message: format!("factor sizes disagree with the coefficient at m={m}"),
                best_residual: f64::NAN,
            });
        }
        let num = product.to_f64().expect("small at n <= 10");
        let sqrt_p = (num / den).sqrt();
        let amp = sqrt_p / ((left.len() as f64).sqrt() * (right.len() as f64).sqrt());
        for a in &left {
            let row = a.code() as usize * half_dim;
            for b in &right {
                recon[row + b.code() as usize] += amp;
            }
        }
    }
    let err2: f64 = recon
        .iter()
        .zip(&psi)
        .map(|(r, p)| (r - p) * (r - p))
        .sum();
    Ok(err2.sqrt())
}

fn check_even(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "the half cut needs an even site count, got {n}"
        )));
    }
    Ok(())
}
