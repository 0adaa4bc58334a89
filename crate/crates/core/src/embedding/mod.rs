//! The random one-bit map `B_m`, and the injectivity and δ-RIP checks on its
//! images.

mod code;

pub use code::{hamming_count, hamming_distance, words_for, BitCode, CodeSet, FORMAT_VERSION, MAGIC};

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::geometry::{geodesic_unchecked, sample_direction, PointSet, UnitVector};
use crate::seed;

/// Slack used when comparing a deviation against δ, so that a lattice value
/// such as `|7/10 − 1/2|` compares equal to `0.2` despite rounding.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// How a pair whose deviation equals δ exactly is classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Boundary {
    /// A pair fails only when `|d_H − d_geo| > δ`; equality passes.
    #[default]
    Strict,
    /// A pair fails when `|d_H − d_geo| ≥ δ`.
    Inclusive,
}

impl Boundary {
    #[inline]
    pub fn violates(self, abs_deviation: f64, delta: f64) -> bool {
        match self {
            Boundary::Strict => abs_deviation > delta + TIE_TOLERANCE,
            Boundary::Inclusive => abs_deviation >= delta - TIE_TOLERANCE,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Strict => "strict",
            Boundary::Inclusive => "inclusive",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Boundary::Strict),
            "inclusive" => Ok(Boundary::Inclusive),
            other => Err(Error::param("boundary", format!("{other:?} (expected strict|inclusive)"))),
        }
    }
}

/// `m` directions `θ_1..θ_m` on `S^{dim-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMap {
    directions: Vec<UnitVector>,
    dim: usize,
    seed: Option<u64>,
}

impl EmbeddingMap {
    /// A map with explicitly chosen directions (no seed).
    pub fn from_directions(directions: Vec<UnitVector>) -> Result<Self> {
        let set = PointSet::new(directions).map_err(|_| Error::param("m", "need at least one direction"))?;
        Ok(EmbeddingMap {
            dim: set.dim(),
            directions: set.points().to_vec(),
            seed: None,
        })
    }

    pub fn m(&self) -> usize {
        self.directions.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn directions(&self) -> &[UnitVector] {
        &self.directions
    }
}

/// Draws `m` iid uniform directions from the stream seeded by `seed`. The
/// same `(m, dim, seed)` always yields the same map.
pub fn sample_map(m: usize, dim: usize, seed: u64) -> Result<EmbeddingMap> {
    if m == 0 {
        return Err(Error::param("m", "target dimension must be at least 1"));
    }
    let mut rng = seed::stream(seed);
    let directions = (0..m)
        .map(|_| sample_direction(dim, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(EmbeddingMap {
        directions,
        dim,
        seed: Some(seed),
    })
}

/// `B_m x`: bit `j` is set iff `x·θ_j ≥ 0`.
pub fn embed(map: &EmbeddingMap, x: &UnitVector) -> Result<BitCode> {
    if x.dim() != map.dim {
        return Err(Error::DimensionMismatch {
            left: map.dim,
            right: x.dim(),
        });
    }
    let mut code = BitCode::zeros(map.m())?;
    for (j, theta) in map.directions.iter().enumerate() {
        if x.dot_unchecked(theta) >= 0.0 {
            code.set(j, true);
        }
    }
    Ok(code)
}

/// Embeds every point, preserving order.
pub fn embed_all(map: &EmbeddingMap, points: &PointSet) -> Result<CodeSet> {
    CodeSet::new(points.iter().map(|p| embed(map, p)).collect::<Result<_>>()?)
}

/// `d_H(B_m x, B_m y) − d_geo(x, y)`.
pub fn metric_deviation(map: &EmbeddingMap, x: &UnitVector, y: &UnitVector) -> Result<f64> {
    let h = hamming_distance(&embed(map, x)?, &embed(map, y)?)?;
    Ok(h - geodesic_unchecked(x, y))
}

/// Codes for `n` pairwise orthogonal points under a fresh map, sampled
/// directly as iid fair bits.
///
/// For orthonormal `x_1..x_n`, rotate so they become `e_1..e_n`; bit `j` of
/// point `i` is then the sign of coordinate `i` of `θ_j`, and the coordinate
/// signs of a uniform direction are independent fair coins. No geometry is
/// needed.
pub fn embed_orthogonal<R: RngCore + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<CodeSet> {
    if n < 2 {
        return Err(Error::param("n", format!("need at least 2 points, got {n}")));
    }
    CodeSet::random(n, m, rng)
}

/// Outcome of the injectivity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneToOne {
    pub injective: bool,
    /// Colliding index pairs `(i, j)`, `i < j`, sorted.
    pub collisions: Vec<(usize, usize)>,
}

pub fn check_one_to_one(codes: &CodeSet) -> Result<OneToOne> {
    if codes.len() < 2 {
        return Err(Error::param("n", "injectivity needs at least 2 codes"));
    }
    let collisions = codes.collisions();
    Ok(OneToOne {
        injective: collisions.is_empty(),
        collisions,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RipViolation {
    pub i: usize,
    pub j: usize,
    pub hamming: f64,
    pub geodesic: f64,
    /// Signed `d_H − d_geo`.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RipReport {
    pub delta: f64,
    pub boundary: Boundary,
    pub violations: Vec<RipViolation>,
    /// Largest `|d_H − d_geo|` over all pairs.
    pub max_deviation: f64,
    pub passed: bool,
}

/// δ-RIP check under the definition's convention (a pair fails only when its
/// deviation exceeds δ).
pub fn check_rip(codes: &CodeSet, points: &PointSet, delta: f64) -> Result<RipReport> {
    check_rip_with(codes, points, delta, Boundary::Strict)
}

pub fn check_rip_with(codes: &CodeSet, points: &PointSet, delta: f64, boundary: Boundary) -> Result<RipReport> {
    if codes.len() != points.len() {
        return Err(Error::Misaligned {
            codes: codes.len(),
            points: points.len(),
        });
    }
    if codes.len() < 2 {
        return Err(Error::param("n", "the RIP check needs at least 2 points"));
    }
    check_delta(delta)?;

    let geodesics = pair_geodesics(points);
    let mut violations = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for ((i, j), &g) in pairs(codes.len()).zip(&geodesics) {
        let h = hamming_distance(&codes.codes()[i], &codes.codes()[j])?;
        let deviation = h - g;
        max_deviation = max_deviation.max(deviation.abs());
        if boundary.violates(deviation.abs(), delta) {
            violations.push(RipViolation {
                i,
                j,
                hamming: h,
                geodesic: g,
                deviation,
            });
        }
    }
    Ok(RipReport {
        delta,
        boundary,
        passed: violations.is_empty(),
        violations,
        max_deviation,
    })
}

/// Pass/fail only, stopping at the first failing pair. `geodesics` is in
/// [`pairs`] order.
pub(crate) fn rip_passes(codes: &CodeSet, geodesics: &[f64], delta: f64, boundary: Boundary) -> bool {
    let m = codes.m() as f64;
    let c = codes.codes();
    pairs(c.len()).zip(geodesics).all(|((i, j), &g)| {
        let h = code::xor_popcount(c[i].words(), c[j].words()) as f64 / m;
        !boundary.violates((h - g).abs(), delta)
    })
}

/// Unordered index pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
}

pub(crate) fn pair_geodesics(points: &PointSet) -> Vec<f64> {
    let p = points.points();
    pairs(p.len()).map(|(i, j)| geodesic_unchecked(&p[i], &p[j])).collect()
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("{delta} is not in (0, 1)")));
    }
    Ok(())
}
