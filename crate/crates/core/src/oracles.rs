//! Exact probabilities for small instances, used as ground truth for the
//! Poisson approximations and the Monte Carlo engine.
//!
//! All models here reduce to fair coins: for pairwise orthogonal points the
//! codes are iid uniform in `{0,1}^m`, so each answer is a dyadic rational.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::bounds::{one_to_one_window_with, EtaForm};
use crate::embedding::Boundary;
use crate::error::{Error, Result};
use crate::exact::{snap_to_lattice, ExactMethod, ExactProbability};

/// Probability that `n` iid uniform `m`-bit codes are pairwise distinct:
/// `∏_{k=1}^{n-1} (1 − k/2^m)`.
pub fn birthday_exact(n: u64, m: u64) -> Result<ExactProbability> {
    if n < 2 {
        return Err(Error::param("n", format!("need at least 2 points, got {n}")));
    }
    check_m(m)?;
    let cells = BigUint::one() << m;
    if BigUint::from(n) > cells {
        return Ok(ExactProbability::zero(ExactMethod::BirthdayProduct));
    }
    let numerator = (1..n).fold(BigUint::one(), |acc, k| acc * (&cells - k));
    Ok(ExactProbability::dyadic(numerator, m * (n - 1), ExactMethod::BirthdayProduct))
}

/// `P(Y ≥ a)` for `Y ~ Bin(m, 1/2)`, for `0 ≤ a ≤ m + 1`.
pub fn binomial_tail(m: u64, a: u64) -> Result<ExactProbability> {
    check_tail_args(m, a)?;
    let row = pascal_row(m);
    let sum: BigUint = row[a as usize..].iter().sum();
    Ok(ExactProbability::dyadic(sum, m, ExactMethod::BinomialTail))
}

/// `P(Y < a)` for `Y ~ Bin(m, 1/2)`, summed directly over the lower counts.
pub fn binomial_tail_complement(m: u64, a: u64) -> Result<ExactProbability> {
    check_tail_args(m, a)?;
    let row = pascal_row(m);
    let sum: BigUint = row[..a as usize].iter().sum();
    Ok(ExactProbability::dyadic(sum, m, ExactMethod::BinomialTail))
}

/// Whether a pair at Hamming count `h` out of `m`, true geodesic distance
/// `1/2`, satisfies the δ-band. Decided in integers on `|2h − m|` against
/// `2mδ`, with `2mδ` snapped onto the lattice when it is numerically an
/// integer.
pub fn in_half_band(m: u64, h: u64, delta: f64, boundary: Boundary) -> bool {
    let gap = (2 * h).abs_diff(m) as f64;
    let width = snap_to_lattice(2.0 * m as f64 * delta);
    if width.fract() == 0.0 && gap == width {
        return boundary == Boundary::Strict;
    }
    gap < width
}

/// Exact `P_RIP` for three pairwise orthogonal points.
///
/// Each column of the three codes contributes a disagreement pattern on the
/// pairs (12, 13, 23): `(0,0,0)` when all three bits agree, otherwise exactly
/// one point is the odd one out, giving `(1,1,0)`, `(1,0,1)` or `(0,1,1)`. All
/// four patterns have probability 1/4 and columns are independent, so with
/// counts `(a, b, c, d)` of the patterns the Hamming counts are
/// `H12 = a+b`, `H13 = a+c`, `H23 = b+c` and the cell has multinomial weight
/// `m! / (a! b! c! d!) / 4^m`.
pub fn rip_exact_three(m: u64, delta: f64, boundary: Boundary) -> Result<ExactProbability> {
    check_m(m)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("{delta} is not in (0, 1)")));
    }
    let mu = m as usize;
    let ok: Vec<bool> = (0..=m).map(|h| in_half_band(m, h, delta, boundary)).collect();
    let pascal = pascal_triangle(m);

    let mut total = BigUint::zero();
    for a in 0..=mu {
        for b in 0..=(mu - a) {
            if !ok[a + b] {
                continue;
            }
            let ab = &pascal[mu][a] * &pascal[mu - a][b];
            for c in 0..=(mu - a - b) {
                if ok[a + c] && ok[b + c] {
                    total += &ab * &pascal[mu - a - b][c];
                }
            }
        }
    }
    Ok(ExactProbability::dyadic(total, 2 * m, ExactMethod::MultinomialDp))
}

/// The exact injectivity probability set against its Poisson approximation
/// `e^{−C(n,2)/2^m}` and both forms of the Stein–Chen error term.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaComparison {
    pub n: u64,
    pub m: u64,
    pub exact: ExactProbability,
    pub poisson: f64,
    /// `|exact − poisson|`.
    pub deviation: f64,
    pub eta_pairwise: f64,
    pub eta_general: f64,
    pub pairwise_contains: bool,
    pub general_contains: bool,
}

pub fn eta_comparison(n: u64, m: u64) -> Result<EtaComparison> {
    let exact = birthday_exact(n, m)?;
    let pairwise = one_to_one_window_with(n, m, EtaForm::Pairwise)?;
    let general = one_to_one_window_with(n, m, EtaForm::General)?;
    let poisson = (-pairwise.lambda_lo).exp();
    // (1 − exact) + (e^{−λ} − 1) avoids cancelling two numbers near 1.
    let miss = (BigRational::one() - &exact.value).to_f64().unwrap_or(f64::NAN);
    let deviation = (miss + (-pairwise.lambda_lo).exp_m1()).abs();
    Ok(EtaComparison {
        n,
        m,
        poisson,
        deviation,
        eta_pairwise: pairwise.eta,
        eta_general: general.eta,
        pairwise_contains: deviation <= pairwise.eta,
        general_contains: deviation <= general.eta,
        exact,
    })
}

/// Row `m` of Pascal's triangle, built by repeated addition.
fn pascal_row(m: u64) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigUint::one());
        next.extend(row.windows(2).map(|w| &w[0] + &w[1]));
        next.push(BigUint::one());
        row = next;
    }
    row
}

fn pascal_triangle(m: u64) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
    for k in 1..=m as usize {
        let prev = &rows[k - 1];
        let mut next = Vec::with_capacity(k + 1);
        next.push(BigUint::one());
        next.extend(prev.windows(2).map(|w| &w[0] + &w[1]));
        next.push(BigUint::one());
        rows.push(next);
    }
    rows
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::param("m", "code length must be at least 1"));
    }
    Ok(())
}

fn check_tail_args(m: u64, a: u64) -> Result<()> {
    check_m(m)?;
    if a > m + 1 {
        return Err(Error::param("a", format!("{a} exceeds m + 1 = {}", m + 1)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn birthday_examples() {
        assert_eq!(birthday_exact(2, 1).unwrap().value, ratio(1, 2));
        let p = birthday_exact(10, 7).unwrap();
        assert_eq!(p.fraction(), "50242878679888125/72057594037927936");
        assert!((p.float_value - 0.697_260_009_173_252_4).abs() < 1e-15);
        assert!(p.is_dyadic());
        assert_eq!(birthday_exact(129, 7).unwrap().float_value, 0.0);
        assert!(birthday_exact(128, 7).unwrap().float_value > 0.0);
        assert!(birthday_exact(1, 7).is_err());
    }

    /// Every assignment of `m`-bit codes to `n` points, counted.
    fn birthday_brute(n: u32, m: u32) -> BigRational {
        let cells = 1u64 << m;
        let total = cells.pow(n);
        let distinct = (0..total)
            .filter(|&mut_idx| {
                let mut idx = mut_idx;
                let codes: Vec<u64> = (0..n)
                    .map(|_| {
                        let c = idx % cells;
                        idx /= cells;
                        c
                    })
                    .collect();
                (0..codes.len()).all(|i| (i + 1..codes.len()).all(|j| codes[i] != codes[j]))
            })
            .count();
        BigRational::new((distinct as i64).into(), (total as i64).into())
    }

    #[test]
    fn birthday_matches_enumeration() {
        for n in 2..=3 {
            for m in 1..=4 {
                assert_eq!(birthday_exact(n as u64, m as u64).unwrap().value, birthday_brute(n, m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn tail_examples() {
        assert_eq!(binomial_tail(10, 7).unwrap().value, ratio(176, 1024));
        assert_eq!(binomial_tail(10, 0).unwrap().value, ratio(1, 1));
        assert_eq!(binomial_tail(10, 11).unwrap().value, ratio(0, 1));
        assert!(binomial_tail(10, 12).is_err());
        assert!(binomial_tail(0, 0).is_err());
    }

    #[test]
    fn tail_identities() {
        for m in 1..=40u64 {
            for a in 0..=m + 1 {
                let upper = binomial_tail(m, a).unwrap();
                let lower = binomial_tail_complement(m, a).unwrap();
                assert_eq!(&upper.value + &lower.value, ratio(1, 1));
                assert!(upper.is_dyadic());
                if a <= m {
                    // P(Y ≥ a) = P(Y ≤ m − a) = P(Y < m − a + 1).
                    assert_eq!(upper.value, binomial_tail_complement(m, m - a + 1).unwrap().value);
                }
            }
        }
    }

    #[test]
    fn band_lattice_ties() {
        // m = 10, δ = 0.2: |2h − 10| vs 4, ties at h ∈ {3, 7}.
        assert!(in_half_band(10, 7, 0.2, Boundary::Strict));
        assert!(!in_half_band(10, 7, 0.2, Boundary::Inclusive));
        assert!(in_half_band(10, 6, 0.2, Boundary::Inclusive));
        assert!(!in_half_band(10, 8, 0.2, Boundary::Strict));
        // m = 16, δ = 0.2: width 6.4, no tie.
        assert!(in_half_band(16, 11, 0.2, Boundary::Inclusive));
        assert!(!in_half_band(16, 12, 0.2, Boundary::Strict));
    }

    #[test]
    fn rip_three_examples() {
        assert_eq!(rip_exact_three(1, 0.4, Boundary::Strict).unwrap().float_value, 0.0);
        // All three counts would have to be 1, but their sum is even.
        assert_eq!(rip_exact_three(2, 0.25, Boundary::Strict).unwrap().float_value, 0.0);
        assert_eq!(rip_exact_three(2, 0.25, Boundary::Inclusive).unwrap().float_value, 0.0);
        // A band just short of 1/2 still excludes h ∈ {0, m}.
        for m in [4, 9, 16] {
            let p = rip_exact_three(m, 0.499_999, Boundary::Strict).unwrap();
            assert!(p.float_value > 0.0 && p.float_value < 1.0);
        }
        // δ = 1/2 with a closed band admits every count.
        for m in [1, 5, 12] {
            assert_eq!(rip_exact_three(m, 0.5, Boundary::Strict).unwrap().float_value, 1.0);
            assert!(rip_exact_three(m, 0.5, Boundary::Inclusive).unwrap().float_value < 1.0);
        }
        assert!(rip_exact_three(0, 0.2, Boundary::Strict).is_err());
        assert!(rip_exact_three(4, 1.0, Boundary::Strict).is_err());
    }

    /// All `2^{3m}` bit assignments of three codes.
    fn rip_three_brute(m: u32, delta: f64, boundary: Boundary) -> BigRational {
        let mask = (1u64 << m) - 1;
        let total = 1u64 << (3 * m);
        let pass = (0..total)
            .filter(|&w| {
                let (x, y, s) = (w & mask, (w >> m) & mask, (w >> (2 * m)) & mask);
                [x ^ y, x ^ s, y ^ s].iter().all(|d| {
                    let dev = (d.count_ones() as f64 / m as f64 - 0.5).abs();
                    !boundary.violates(dev, delta)
                })
            })
            .count();
        BigRational::new((pass as i64).into(), (total as i64).into())
    }

    #[test]
    fn rip_three_matches_enumeration() {
        for m in 1..=7u32 {
            for delta in [0.1, 0.2, 0.25, 0.3, 0.4] {
                for boundary in [Boundary::Strict, Boundary::Inclusive] {
                    let exact = rip_exact_three(m as u64, delta, boundary).unwrap();
                    assert_eq!(exact.value, rip_three_brute(m, delta, boundary), "m={m} δ={delta} {boundary}");
                    assert!(exact.is_dyadic());
                }
            }
        }
    }

    #[test]
    fn eta_report_at_ten_points() {
        let r = eta_comparison(10, 7).unwrap();
        assert!((r.poisson - (-45.0f64 / 128.0).exp()).abs() < 1e-15);
        assert!((r.deviation - 0.006_327_865_172_375_158).abs() < 1e-12);
        assert_eq!(r.eta_pairwise, 45.0 / 16384.0);
        assert_eq!(r.eta_general, 45.0 * 33.0 / 16384.0);
        assert!(!r.pairwise_contains);
        assert!(r.general_contains);
    }

    #[test]
    fn eta_two_points() {
        for m in 1..=30 {
            let r = eta_comparison(2, m).unwrap();
            let x = 2f64.powi(-(m as i32));
            assert!(r.deviation <= x * x / 2.0 * (1.0 + 1e-9), "m={m}");
            assert!(r.pairwise_contains && r.general_contains);
        }
    }

    #[test]
    fn eta_large_m() {
        let r = eta_comparison(10, 40).unwrap();
        assert!(r.deviation < 1e-9);
        assert!(r.general_contains);
        // D·4^m tends to C(n,2)²/2 − Σ_{i<j<n} i·j = 142.5, above C(n,2) = 45.
        let scaled = r.deviation * 2f64.powi(80);
        assert!((scaled - 142.5).abs() < 1e-6, "{scaled}");
        assert!(!r.pairwise_contains);
    }
}
