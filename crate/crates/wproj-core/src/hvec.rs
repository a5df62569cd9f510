//! Points of the weight (+1, -1) projective space in homogeneous coordinates,
//! the scaling action, orbit equality, and the two canonical chart atlases.
//!
//! A point is a class [v, w] of pairs of nonzero complex vectors under
//! (v, w) ~ (lambda v, lambda^-1 w). The outer product v (x) w is constant on
//! each orbit and separates orbits, so equality tests reduce to comparing
//! matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tolerances::EPS_NONZERO;

/// An ordered tuple of complex scalars. Dimension zero is allowed: chart
/// coordinates on a one-dimensional factor have an empty ratio part.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVec {
    entries: Vec<Complex64>,
}

impl ComplexVec {
    pub fn new(entries: Vec<Complex64>) -> Self {
        ComplexVec { entries }
    }

    /// Convenience constructor from real parts only.
    pub fn from_reals(reals: &[f64]) -> Self {
        ComplexVec {
            entries: reals.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Sup norm; 0.0 for the empty vector.
    pub fn max_modulus(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Nonzero in the sense of the domain threshold, not exact arithmetic.
    pub fn is_nonzero(&self) -> bool {
        self.max_modulus() > EPS_NONZERO
    }

    /// Squared Hermitian norm, sum of |z_i|^2.
    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scaled(&self, c: Complex64) -> ComplexVec {
        ComplexVec {
            entries: self.entries.iter().map(|z| c * z).collect(),
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.entries.iter()
    }

    /// Largest componentwise distance to `other`; dims must already agree.
    pub fn max_abs_diff(&self, other: &ComplexVec) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for ComplexVec {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

// Complex scalars serialize as [re, im] pairs throughout the crate.
impl Serialize for ComplexVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.entries.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(ComplexVec {
            entries: pairs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        })
    }
}

/// Homogeneous coordinates of one point: a pair of nonzero blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomPoint {
    v: ComplexVec,
    w: ComplexVec,
}

impl HomPoint {
    /// Both blocks must be nonempty and nonzero in sup norm.
    pub fn new(v: ComplexVec, w: ComplexVec) -> Result<Self> {
        if v.dim() == 0 || w.dim() == 0 {
            return Err(Error::DomainViolation(format!(
                "point blocks must be nonempty, got dims ({}, {})",
                v.dim(),
                w.dim()
            )));
        }
        if !v.is_nonzero() {
            return Err(Error::DomainViolation(format!(
                "first block is numerically zero (max modulus {:e})",
                v.max_modulus()
            )));
        }
        if !w.is_nonzero() {
            return Err(Error::DomainViolation(format!(
                "second block is numerically zero (max modulus {:e})",
                w.max_modulus()
            )));
        }
        Ok(HomPoint { v, w })
    }

    /// For callers whose inputs are valid by construction (chart pivots are
    /// exactly 1, fibers are validated).
    pub(crate) fn new_unchecked(v: ComplexVec, w: ComplexVec) -> Self {
        HomPoint { v, w }
    }

    pub fn from_reals(v: &[f64], w: &[f64]) -> Result<Self> {
        HomPoint::new(ComplexVec::from_reals(v), ComplexVec::from_reals(w))
    }

    pub fn v(&self) -> &ComplexVec {
        &self.v
    }

    pub fn w(&self) -> &ComplexVec {
        &self.w
    }

    pub fn n(&self) -> usize {
        self.v.dim()
    }

    pub fn m(&self) -> usize {
        self.w.dim()
    }

    /// The scaling action lambda . (v, w) = (lambda v, lambda^-1 w).
    pub fn act(&self, lambda: Complex64) -> Result<HomPoint> {
        let modulus = lambda.norm();
        if modulus <= EPS_NONZERO {
            return Err(Error::ZeroScalar { modulus });
        }
        Ok(HomPoint {
            v: self.v.scaled(lambda),
            w: self.w.scaled(lambda.inv()),
        })
    }

    /// The outer product M[a][k] = v^a w^k: a complete orbit invariant,
    /// always rank one and nonzero.
    pub fn canonical_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n(), self.m(), |a, k| self.v[a] * self.w[k])
    }

    /// Relative Frobenius distance between the canonical matrices:
    /// ||M_p - M_q||_F / max(||M_p||_F, ||M_q||_F). Zero exactly on orbits.
    pub fn matrix_distance(&self, other: &HomPoint) -> Result<f64> {
        if self.n() != other.n() || self.m() != other.m() {
            return Err(Error::DimMismatch(format!(
                "points have dims ({}, {}) vs ({}, {})",
                self.n(),
                self.m(),
                other.n(),
                other.m()
            )));
        }
        let mp = self.canonical_matrix();
        let mq = other.canonical_matrix();
        let scale = mp.norm().max(mq.norm());
        Ok((mp - mq).norm() / scale)
    }

    /// Orbit equality within a relative tolerance.
    pub fn equivalent(&self, other: &HomPoint, rtol: f64) -> Result<bool> {
        Ok(self.matrix_distance(other)? <= rtol)
    }

    /// Inhomogeneous coordinates in the given chart. The pivot component is
    /// scaled to exactly 1 and dropped; the fiber keeps the other block,
    /// rescaled by the inverse weight.
    pub fn to_chart(&self, chart: ChartId) -> Result<ChartCoords> {
        let (pivot_block, other_block, dim) = match chart.atlas {
            Atlas::V => (&self.v, &self.w, self.n()),
            Atlas::W => (&self.w, &self.v, self.m()),
        };
        if chart.index >= dim {
            return Err(Error::DimMismatch(format!(
                "chart {chart} does not exist on a point with dims ({}, {})",
                self.n(),
                self.m()
            )));
        }
        let pivot = pivot_block[chart.index];
        let modulus = pivot.norm();
        if modulus <= EPS_NONZERO {
            return Err(Error::PivotTooSmall {
                index: chart.index,
                modulus,
                threshold: EPS_NONZERO,
            });
        }
        let u = ComplexVec::new(
            pivot_block
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != chart.index)
                .map(|(_, z)| z / pivot)
                .collect(),
        );
        // For the V atlas the pivot-normalizing scale is 1/v^{a0} and the
        // fiber is v^{a0} w; for the W atlas the scale is w^{k0} itself and
        // the fiber is w^{k0} v. Both read as multiplication by the pivot.
        let fiber = other_block.scaled(pivot);
        ChartCoords::new(chart, u, fiber)
    }

    /// The V-atlas chart with the largest pivot modulus, lowest index on
    /// ties. Deterministic, so reports are reproducible.
    pub fn best_chart(&self) -> ChartId {
        let mut best = 0;
        for a in 1..self.n() {
            if self.v[a].norm() > self.v[best].norm() {
                best = a;
            }
        }
        ChartId {
            atlas: Atlas::V,
            index: best,
        }
    }
}

impl<'de> Deserialize<'de> for HomPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            v: ComplexVec,
            w: ComplexVec,
        }
        let raw = Raw::deserialize(d)?;
        HomPoint::new(raw.v, raw.w).map_err(D::Error::custom)
    }
}

/// Which factor a chart inverts over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atlas {
    V,
    W,
}

/// One chart of either atlas, e.g. "v0" or "w1".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChartId {
    pub atlas: Atlas,
    pub index: usize,
}

impl ChartId {
    pub fn v(index: usize) -> Self {
        ChartId {
            atlas: Atlas::V,
            index,
        }
    }

    pub fn w(index: usize) -> Self {
        ChartId {
            atlas: Atlas::W,
            index,
        }
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.atlas {
            Atlas::V => 'v',
            Atlas::W => 'w',
        };
        write!(f, "{tag}{}", self.index)
    }
}

impl FromStr for ChartId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("chart id {s:?}, expected e.g. \"v0\" or \"w1\""));
        let mut chars = s.chars();
        let atlas = match chars.next() {
            Some('v') => Atlas::V,
            Some('w') => Atlas::W,
            _ => return Err(bad()),
        };
        let index = chars.as_str().parse::<usize>().map_err(|_| bad())?;
        Ok(ChartId { atlas, index })
    }
}

impl Serialize for ChartId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChartId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Inhomogeneous coordinates: the ratios `u` (pivot slot deleted) plus the
/// fiber vector of the other factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartCoords {
    chart: ChartId,
    u: ComplexVec,
    fiber: ComplexVec,
}

impl ChartCoords {
    /// The fiber must be a valid nonzero block and the chart index must fit
    /// inside the reconstructed dimension u.dim() + 1.
    pub fn new(chart: ChartId, u: ComplexVec, fiber: ComplexVec) -> Result<Self> {
        if fiber.dim() == 0 || !fiber.is_nonzero() {
            return Err(Error::DomainViolation(format!(
                "chart fiber must be a nonzero block (dim {}, max modulus {:e})",
                fiber.dim(),
                fiber.max_modulus()
            )));
        }
        if chart.index > u.dim() {
            return Err(Error::DimMismatch(format!(
                "chart {chart} incompatible with {} ratio coordinates",
                u.dim()
            )));
        }
        Ok(ChartCoords { chart, u, fiber })
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn u(&self) -> &ComplexVec {
        &self.u
    }

    pub fn fiber(&self) -> &ComplexVec {
        &self.fiber
    }

    /// Dimension of the V factor of the underlying point.
    pub fn n(&self) -> usize {
        match self.chart.atlas {
            Atlas::V => self.u.dim() + 1,
            Atlas::W => self.fiber.dim(),
        }
    }

    /// Dimension of the W factor of the underlying point.
    pub fn m(&self) -> usize {
        match self.chart.atlas {
            Atlas::V => self.fiber.dim(),
            Atlas::W => self.u.dim() + 1,
        }
    }

    /// The homogeneous representative with pivot exactly 1. Inverts to_chart:
    /// to_chart(c.to_point(), c.chart()) reproduces c bit for bit, because
    /// the pivot division is by 1.
    pub fn to_point(&self) -> HomPoint {
        let mut full = Vec::with_capacity(self.u.dim() + 1);
        full.extend_from_slice(self.u.entries());
        full.insert(self.chart.index, Complex64::new(1.0, 0.0));
        let full = ComplexVec::new(full);
        match self.chart.atlas {
            Atlas::V => HomPoint::new_unchecked(full, self.fiber.clone()),
            Atlas::W => HomPoint::new_unchecked(self.fiber.clone(), full),
        }
    }

    /// Change of chart: through the homogeneous representative and back down.
    pub fn transition(&self, target: ChartId) -> Result<ChartCoords> {
        self.to_point().to_chart(target)
    }

    /// Largest componentwise distance across both coordinate blocks, for
    /// points on the same chart.
    pub fn max_abs_diff(&self, other: &ChartCoords) -> Result<f64> {
        if self.chart != other.chart || self.u.dim() != other.u.dim()
            || self.fiber.dim() != other.fiber.dim()
        {
            return Err(Error::DimMismatch(
                "chart coordinates live on different charts".into(),
            ));
        }
        Ok(self
            .u
            .max_abs_diff(&other.u)
            .max(self.fiber.max_abs_diff(&other.fiber)))
    }
}

impl<'de> Deserialize<'de> for ChartCoords {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            chart: ChartId,
            u: ComplexVec,
            fiber: ComplexVec,
        }
        let raw = Raw::deserialize(d)?;
        ChartCoords::new(raw.chart, raw.u, raw.fiber).map_err(D::Error::custom)
    }
}
