//! Points on the circle `R/Z` and the torus `R^2/Z^2`, the flat quotient
//! metric, and distances between finite point sets.

use std::fmt;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduces a real number to `[0, 1)`.
#[inline]
pub fn reduce(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    // rem_euclid rounds tiny negatives up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Representative of `d` modulo 1 in `[-1/2, 1/2]`.
#[inline]
pub fn wrap(d: f64) -> f64 {
    d - d.round()
}

/// A point of the circle (`dim == 1`) or the 2-torus (`dim == 2`).
///
/// Coordinates are always reduced to `[0, 1)`. In dimension one the second
/// slot is held at zero so that derived equality and hashing behave.
#[derive(Clone, Copy, PartialEq)]
pub struct TorusPoint {
    coords: [f64; 2],
    dim: usize,
}

impl TorusPoint {
    pub fn circle(x: f64) -> Self {
        Self {
            coords: [reduce(x), 0.0],
            dim: 1,
        }
    }

    pub fn torus(x: f64, y: f64) -> Self {
        Self {
            coords: [reduce(x), reduce(y)],
            dim: 2,
        }
    }

    pub fn new(coords: &[f64]) -> Result<Self> {
        match *coords {
            [x] => Ok(Self::circle(x)),
            [x, y] => Ok(Self::torus(x, y)),
            _ => Err(Error::UnsupportedDimension(coords.len())),
        }
    }

    /// Builds a point of the given dimension from a lift; extra entries are ignored.
    pub(crate) fn from_lift(lift: [f64; 2], dim: usize) -> Self {
        if dim == 1 {
            Self::circle(lift[0])
        } else {
            Self::torus(lift[0], lift[1])
        }
    }

    pub fn origin(dim: usize) -> Self {
        Self::from_lift([0.0, 0.0], dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    /// Both slots, with the unused one zero in dimension one.
    pub(crate) fn raw(&self) -> [f64; 2] {
        self.coords
    }

    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    pub fn y(&self) -> f64 {
        self.coords[1]
    }

    /// Translates by a (possibly unreduced) vector and reduces again.
    pub fn translate(&self, v: [f64; 2]) -> Self {
        Self::from_lift([self.coords[0] + v[0], self.coords[1] + v[1]], self.dim)
    }

    /// Shortest displacement from `self` to `other`, each component in `[-1/2, 1/2]`.
    pub(crate) fn displacement_to(&self, other: &TorusPoint) -> [f64; 2] {
        let dx = wrap(other.coords[0] - self.coords[0]);
        let dy = if self.dim == 2 {
            wrap(other.coords[1] - self.coords[1])
        } else {
            0.0
        };
        [dx, dy]
    }

    fn check_dim(&self, other: &TorusPoint) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dim {
            1 => write!(f, "({})", self.coords[0]),
            _ => write!(f, "({}, {})", self.coords[0], self.coords[1]),
        }
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.dim))?;
        for c in self.coords() {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for TorusPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct PointVisitor;

        impl<'de> Visitor<'de> for PointVisitor {
            type Value = TorusPoint;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an array of one or two coordinates")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<TorusPoint, A::Error> {
                let mut coords = Vec::with_capacity(2);
                while let Some(c) = seq.next_element::<f64>()? {
                    coords.push(c);
                }
                TorusPoint::new(&coords).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_seq(PointVisitor)
    }
}

/// Quotient (flat) distance: Euclidean distance minimized over integer
/// translates of either lift.
///
/// The minimum over the `3^n` neighbouring lifts separates per axis into
/// `min(|a - b|, 1 - |a - b|)`, which is what `wrap` computes.
pub fn torus_dist(p: &TorusPoint, q: &TorusPoint) -> Result<f64> {
    p.check_dim(q)?;
    Ok(dist_unchecked(p, q))
}

#[inline]
pub(crate) fn dist_unchecked(p: &TorusPoint, q: &TorusPoint) -> f64 {
    let [dx, dy] = p.displacement_to(q);
    dx.hypot(dy)
}

/// Finite, nonempty set of points of one dimension (an orbit truncation or a
/// method image).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PointSet {
    points: Vec<TorusPoint>,
}

impl PointSet {
    pub fn new(points: Vec<TorusPoint>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptySet)?;
        for p in &points {
            first.check_dim(p)?;
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[TorusPoint] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same set with exact duplicates removed (order of first occurrence kept).
    pub fn deduplicated(&self) -> PointSet {
        let mut out: Vec<TorusPoint> = Vec::with_capacity(self.points.len());
        for p in &self.points {
            if !out.iter().any(|q| q.coords == p.coords) {
                out.push(*p);
            }
        }
        PointSet { points: out }
    }
}

/// `d(p, S) = min_{s in S} d(p, s)`.
pub fn point_to_set_dist(p: &TorusPoint, set: &PointSet) -> Result<f64> {
    p.check_dim(&set.points[0])?;
    Ok(point_to_points(p, &set.points))
}

#[inline]
pub(crate) fn point_to_points(p: &TorusPoint, points: &[TorusPoint]) -> f64 {
    points
        .iter()
        .map(|q| dist_unchecked(p, q))
        .fold(f64::INFINITY, f64::min)
}

/// Largest distance from a point of `from` to the set `to`, i.e. the smallest
/// closed-ball radius for which `from ⊂ B_r(to)`.
pub(crate) fn one_sided_excess(from: &[TorusPoint], to: &[TorusPoint]) -> f64 {
    from.iter().map(|p| point_to_points(p, to)).fold(0.0, f64::max)
}

/// Whether every point of `s1` lies in the closed `eps`-neighbourhood of `s2`.
pub fn one_sided_within(s1: &PointSet, s2: &PointSet, eps: f64) -> Result<bool> {
    s1.points[0].check_dim(&s2.points[0])?;
    Ok(one_sided_excess(&s1.points, &s2.points) <= eps)
}
