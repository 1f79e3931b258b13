//! Exact counts: binomials, Catalan and Motzkin numbers, ballot counts,
//! and sector sizes.
//!
//! Sector sizes come in two independent forms: a closed-form sum (one
//! term per number of matched pairs) and a difference of trinomial
//! coefficients obtained by reflection.  The trinomial route streams a
//! whole row in O(n) big-integer operations, which is what makes exact
//! Schmidt spectra at n ~ 1e5 affordable.

use num::{BigUint, One, Zero};

use crate::error::{Error, Result};
use crate::numerics::log2_biguint;

/// Exact non-negative count.
pub type CountInt = BigUint;

/// Binomial coefficient; zero when k > n.
pub fn binomial(n: usize, k: usize) -> CountInt {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= (n - i) as u64;
        acc /= (i + 1) as u64;
    }
    acc
}

/// Catalan number C_k.
pub fn catalan(k: usize) -> CountInt {
    binomial(2 * k, k) / ((k + 1) as u64)
}

/// C_0..C_k via the ratio recurrence C_{i+1} = C_i * 2(2i+1)/(i+2).
pub fn catalans_upto(k: usize) -> Vec<CountInt> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(BigUint::one());
    for i in 0..k {
        let next = (&out[i] * (2 * (2 * i + 1)) as u64) / ((i + 2) as u64);
        out.push(next);
    }
    out
}

/// Number of bracket words with `pairs` matched pairs and `excess`
/// trailing unmatched opening brackets:
/// (excess+1)/(pairs+excess+1) * C(2*pairs+excess, pairs).
pub fn ballot_count(pairs: usize, excess: usize) -> CountInt {
    let b = binomial(2 * pairs + excess, pairs);
    (b * (excess + 1) as u64) / ((pairs + excess + 1) as u64)
}

/// Motzkin numbers M_0..M_n via
/// (k+3) M_{k+1} = (2k+3) M_k + 3k M_{k-1}.
pub fn motzkin_numbers_upto(n: usize) -> Vec<CountInt> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigUint::one());
    if n == 0 {
        return out;
    }
    out.push(BigUint::one());
    for k in 1..n {
        let a = &out[k] * (2 * k + 3) as u64;
        let b = &out[k - 1] * (3 * k) as u64;
        out.push((a + b) / ((k + 3) as u64));
    }
    out
}

/// Motzkin number M_n, with a constant-size window.
pub fn motzkin_number(n: usize) -> CountInt {
    let mut prev = BigUint::one();
    let mut cur = BigUint::one();
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = (&cur * (2 * k + 3) as u64 + &prev * (3 * k) as u64) / ((k + 3) as u64);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Size of the sector with `m` total unmatched brackets in length `n`
/// (it depends only on the total, not on the closing/opening split).
/// Closed-form sum over the number i of matched pairs:
/// sum_i (m+1) n! / ((i+m+1)! i! (n-2i-m)!).
pub fn class_size(n: usize, m: usize) -> CountInt {
    if m > n {
        return BigUint::zero();
    }
    // i = 0 term is C(n, m); successive terms by exact ratio.
    let mut term = binomial(n, m);
    let mut sum = term.clone();
    let mut i = 0usize;
    while 2 * i + m + 2 <= n {
        let num = ((n - 2 * i - m) as u64) * ((n - 2 * i - m - 1) as u64);
        let den = ((i + 1) as u64) * ((i + m + 2) as u64);
        term = (term * num) / den;
        sum += &term;
        i += 1;
    }
    sum
}

/// Streaming coefficients a_0..a_n of (1 + x + x^2)^n, by the
/// derivative recurrence (j+1) a_{j+1} = (n-j) a_j + (2n-j+1) a_{j-1}.
/// The row is symmetric, so the upper half is never needed.
pub struct TrinomialRow {
    n: usize,
    j: usize,
    prev2: BigUint,
    prev1: BigUint,
}

impl TrinomialRow {
    pub fn new(n: usize) -> Self {
        TrinomialRow {
            n,
            j: 0,
            prev2: BigUint::zero(),
            prev1: BigUint::zero(),
        }
    }
}

impl Iterator for TrinomialRow {
    type Item = BigUint;

    fn next(&mut self) -> Option<BigUint> {
        if self.j > self.n {
            return None;
        }
        let next = if self.j == 0 {
            BigUint::one()
        } else {
            let j = self.j - 1; // recurrence producing a_{j+1}
            let a = &self.prev1 * (self.n - j) as u64;
            let b = &self.prev2 * (2 * self.n - j + 1) as u64;
            (a + b) / ((j + 1) as u64)
        };
        self.prev2 = std::mem::replace(&mut self.prev1, next.clone());
        self.j += 1;
        Some(next)
    }
}

/// Whole row of sector sizes for length `n`: index m holds the size of
/// the m-unmatched sector.  Reflection gives size = a_{n-m} - a_{n-m-2}
/// on the trinomial row.  Memory is O(n) big integers; for entropy at
/// very large n prefer streaming over [`TrinomialRow`] directly.
pub fn class_size_row(n: usize) -> Vec<CountInt> {
    let a: Vec<BigUint> = TrinomialRow::new(n).collect();
    (0..=n)
        .map(|m| {
            let hi = &a[n - m];
            if n >= m + 2 {
                hi - &a[n - m - 2]
            } else {
                hi.clone()
            }
        })
        .collect()
}

/// Exact check of 1/3 <= M_k / M_{k+1} <= 1 for all k < n_max.
pub fn motzkin_ratio_bounds_hold(n_max: usize) -> bool {
    let ms = motzkin_numbers_upto(n_max);
    for k in 0..n_max {
        if ms[k] > ms[k + 1] {
            return false;
        }
        if &ms[k] * 3u64 < ms[k + 1] {
            return false;
        }
    }
    true
}

/// M_n * n^(3/2) / 3^n, evaluated through split logarithms so the huge
/// numerator and denominator never materialize as floats.
pub fn motzkin_scaled_growth(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("growth diagnostic needs n >= 1"));
    }
    let m = motzkin_number(n);
    let log_m = log2_biguint(&m)?.to_f64();
    let exponent = log_m + 1.5 * (n as f64).log2() - (n as f64) * 3f64.log2();
    Ok(exponent.exp2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(5, 2), BigUint::from_u64(10).unwrap());
        assert_eq!(binomial(5, 6), BigUint::zero());
        for n in 0..=20usize {
            for k in 0..=n {
                assert_eq!(binomial(n, k), binomial(n, n - k));
            }
            let total: BigUint = (0..=n).map(|k| binomial(n, k)).sum();
            assert_eq!(total, BigUint::from_u64(1 << n).unwrap());
        }
    }

    #[test]
    fn catalan_values() {
        let expect = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430, 4862];
        let row = catalans_upto(9);
        for (k, &e) in expect.iter().enumerate() {
            assert_eq!(row[k], BigUint::from_u64(e).unwrap());
            assert_eq!(catalan(k), BigUint::from_u64(e).unwrap());
        }
    }

    #[test]
    fn motzkin_values() {
        let expect = [
            1u64, 1, 2, 4, 9, 21, 51, 127, 323, 835, 2188, 5798, 15511, 41835, 113634, 310572,
            853467,
        ];
        let row = motzkin_numbers_upto(16);
        for (n, &e) in expect.iter().enumerate() {
            assert_eq!(row[n], BigUint::from_u64(e).unwrap(), "M_{n}");
        }
    }

    // Brute-force oracle for ballot counts: walk all bracket words.
    #[test]
    fn ballot_counts_match_enumeration() {
        for pairs in 0..=6usize {
            for excess in 0..=6usize {
                let len = 2 * pairs + excess;
                let mut count = 0u64;
                for mask in 0u64..(1 << len) {
                    let mut h = 0i64;
                    let mut ok = true;
                    for bit in 0..len {
                        // bit 0 = opening bracket
                        if mask >> bit & 1 == 0 {
                            h += 1;
                        } else {
                            h -= 1;
                        }
                        if h < 0 {
                            ok = false;
                            break;
                        }
                    }
                    if ok && h == excess as i64 {
                        count += 1;
                    }
                }
                assert_eq!(
                    ballot_count(pairs, excess),
                    BigUint::from_u64(count).unwrap(),
                    "pairs={pairs} excess={excess}"
                );
            }
        }
    }

    #[test]
    fn class_sizes_tie_out() {
        // Balanced sector = Motzkin numbers.
        let ms = motzkin_numbers_upto(60);
        for (n, motzkin) in ms.iter().enumerate() {
            assert_eq!(class_size(n, 0), *motzkin, "n={n}");
        }
        // Row route agrees with the closed-form sum.
        for n in 0..=40usize {
            let row = class_size_row(n);
            for (m, size) in row.iter().enumerate() {
                assert_eq!(*size, class_size(n, m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn class_sizes_partition_the_space() {
        // Sector (p,q) has size depending only on p+q, and there are
        // m+1 sectors with p+q = m, so sum_m (m+1)*size(n,m) = 3^n.
        for n in 0..=30usize {
            let row = class_size_row(n);
            let mut total = BigUint::zero();
            for (m, size) in row.iter().enumerate() {
                total += size * (m + 1) as u64;
            }
            assert_eq!(total, BigUint::from_u8(3).unwrap().pow(n as u32));
        }
    }

    #[test]
    fn squared_halves_rebuild_the_whole() {
        // sum_m size(N,m)^2 counts balanced strings of length 2N.
        for half in 0..=25usize {
            let row = class_size_row(half);
            let mut total = BigUint::zero();
            for size in &row {
                total += size * size;
            }
            assert_eq!(total, motzkin_number(2 * half), "half={half}");
        }
    }

    #[test]
    fn trinomial_row_matches_direct_expansion() {
        for n in 0..=12usize {
            // Direct polynomial power.
            let mut poly = vec![1u128];
            for _ in 0..n {
                let mut next = vec![0u128; poly.len() + 2];
                for (i, &c) in poly.iter().enumerate() {
                    next[i] += c;
                    next[i + 1] += c;
                    next[i + 2] += c;
                }
                poly = next;
            }
            let row: Vec<BigUint> = TrinomialRow::new(n).collect();
            assert_eq!(row.len(), n + 1);
            for (j, coeff) in row.iter().enumerate() {
                assert_eq!(coeff, &BigUint::from_u128(poly[j]).unwrap(), "n={n} j={j}");
            }
        }
    }

    #[test]
    fn ratio_bounds_hold_to_two_thousand() {
        assert!(motzkin_ratio_bounds_hold(2000));
    }

    #[test]
    fn growth_constant_is_near_its_limit() {
        // Limit is 3*sqrt(3)/(2*sqrt(pi)) ~ 1.4658.
        let v = motzkin_scaled_growth(2000).unwrap();
        assert!(v > 1.40 && v < 1.50, "scaled growth {v}");
    }
}
