//! Points on the unit sphere and the normalized geodesic metric.

use std::f64::consts::PI;
use std::io::Read;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Accepted deviation of `‖x‖` from 1 for vectors taken as-is.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// A point of `S^{dim-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    components: Vec<f64>,
}

impl UnitVector {
    /// Wraps `components`, which must already have unit norm within
    /// [`NORM_TOLERANCE`].
    pub fn new(components: Vec<f64>) -> Result<Self> {
        check_dim(components.len())?;
        let norm = euclidean_norm(&components);
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::param("vector", format!("norm {norm} is not 1")));
        }
        Ok(UnitVector { components })
    }

    /// Rescales `components` onto the sphere.
    pub fn normalized(mut components: Vec<f64>) -> Result<Self> {
        check_dim(components.len())?;
        let norm = euclidean_norm(&components);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::param("vector", format!("cannot normalize a vector of norm {norm}")));
        }
        components.iter_mut().for_each(|c| *c /= norm);
        Ok(UnitVector { components })
    }

    /// The standard basis vector `e_{index+1}` of `R^dim`.
    pub fn basis(index: usize, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::param("index", format!("{index} >= dimension {dim}")));
        }
        let mut components = vec![0.0; dim];
        components[index] = 1.0;
        Ok(UnitVector { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn dot(&self, other: &UnitVector) -> Result<f64> {
        same_dim(self, other)?;
        Ok(self.dot_unchecked(other))
    }

    #[inline]
    pub(crate) fn dot_unchecked(&self, other: &UnitVector) -> f64 {
        dot(&self.components, &other.components)
    }

    /// The antipodal point `-x`.
    pub fn antipode(&self) -> UnitVector {
        UnitVector {
            components: self.components.iter().map(|c| -c).collect(),
        }
    }
}

/// An ordered finite subset of one sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<UnitVector>,
    dim: usize,
}

impl PointSet {
    pub fn new(points: Vec<UnitVector>) -> Result<Self> {
        let dim = points
            .first()
            .map(UnitVector::dim)
            .ok_or_else(|| Error::param("points", "empty point set"))?;
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: p.dim(),
            });
        }
        Ok(PointSet { points, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[UnitVector] {
        &self.points
    }

    pub fn get(&self, i: usize) -> Option<&UnitVector> {
        self.points.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, UnitVector> {
        self.points.iter()
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a UnitVector;
    type IntoIter = std::slice::Iter<'a, UnitVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Draws a direction uniformly from `S^{dim-1}` by normalizing a vector of
/// independent standard normals.
pub fn sample_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitVector> {
    check_dim(dim)?;
    let mut components = vec![0.0; dim];
    loop {
        for c in components.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let norm = euclidean_norm(&components);
        // Probability zero, but a zero draw must not leak out as NaN.
        if norm > 0.0 {
            components.iter_mut().for_each(|c| *c /= norm);
            return Ok(UnitVector { components });
        }
    }
}

/// `arccos(x·y)/π`, in `[0, 1]`; antipodal points are at distance 1.
///
/// Evaluated through the half-angle identity
/// `angle = 2·atan2(‖x−y‖, ‖x+y‖)`, which agrees with the arccos form but
/// stays accurate when `x·y` is within rounding of ±1.
pub fn geodesic_distance(x: &UnitVector, y: &UnitVector) -> Result<f64> {
    same_dim(x, y)?;
    Ok(geodesic_unchecked(x, y))
}

pub(crate) fn geodesic_unchecked(x: &UnitVector, y: &UnitVector) -> f64 {
    let (mut diff, mut sum) = (0.0, 0.0);
    for (a, b) in x.components.iter().zip(&y.components) {
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    let angle = 2.0 * diff.sqrt().atan2(sum.sqrt());
    (angle / PI).clamp(0.0, 1.0)
}

/// Whether the hyperplane orthogonal to `theta` separates `x` from `y`,
/// with `sgn(0) = +1`.
pub fn in_wedge(x: &UnitVector, y: &UnitVector, theta: &UnitVector) -> Result<bool> {
    same_dim(x, y)?;
    same_dim(x, theta)?;
    Ok((x.dot_unchecked(theta) >= 0.0) != (y.dot_unchecked(theta) >= 0.0))
}

/// The first `n` standard basis vectors of `R^dim`.
pub fn orthonormal_set(n: usize, dim: usize) -> Result<PointSet> {
    check_dim(dim)?;
    if n < 2 {
        return Err(Error::param("n", format!("need at least 2 points, got {n}")));
    }
    if n > dim {
        return Err(Error::TooManyPoints { n, dim });
    }
    let points = (0..n)
        .map(|i| UnitVector::basis(i, dim))
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(points)
}

/// Parses a headerless CSV with one vector per line.
///
/// With `normalize` each row is rescaled to unit norm; otherwise rows must
/// already be unit vectors within [`NORM_TOLERANCE`]. Rows are numbered from 1
/// in errors.
pub fn read_point_set<R: Read>(source: R, normalize: bool) -> Result<PointSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut points = Vec::new();
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let components = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|e| Error::Row {
                    row,
                    message: format!("bad component {field:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;

        match width {
            None => width = Some(components.len()),
            Some(w) if w != components.len() => {
                return Err(Error::Row {
                    row,
                    message: format!("expected {w} components, found {}", components.len()),
                })
            }
            _ => {}
        }
        if components.len() < 2 {
            return Err(Error::Row {
                row,
                message: format!("need at least 2 components, found {}", components.len()),
            });
        }

        let point = if normalize {
            UnitVector::normalized(components)
        } else {
            UnitVector::new(components)
        };
        points.push(point.map_err(|e| Error::Row {
            row,
            message: match e {
                Error::InvalidParameter { message, .. } => message,
                other => other.to_string(),
            },
        })?);
    }
    PointSet::new(points)
}

/// Writes points in the same CSV layout [`read_point_set`] accepts.
pub fn write_point_set<W: std::io::Write>(points: &PointSet, sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    for p in points {
        writer.write_record(p.components().iter().map(|c| format!("{c:?}")))?;
    }
    writer.flush()?;
    Ok(())
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn euclidean_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    Ok(())
}

fn same_dim(a: &UnitVector, b: &UnitVector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}
