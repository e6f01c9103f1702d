use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ModelError;

/// A point of C^n stored as 2n reals `(x1, y1, ..., xn, yn)`, with n in 1..=3.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    coords: Vec<f64>,
}

/// Largest supported complex dimension.
pub const MAX_DIM: usize = 3;

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, ModelError> {
        let len = coords.len();
        if len == 0 || !len.is_multiple_of(2) || len / 2 > MAX_DIM {
            return Err(ModelError::BadPointLength(len));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        Ok(Point { coords })
    }

    /// Origin of C^n.
    pub fn origin(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension {n} out of range");
        Point { coords: vec![0.0; 2 * n] }
    }

    pub fn from_complex(zs: &[Complex64]) -> Result<Self, ModelError> {
        Point::new(zs.iter().flat_map(|z| [z.re, z.im]).collect())
    }

    /// Unchecked construction for internal sampling code; coordinates come
    /// from finite arithmetic on an existing point.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(coords.len().is_multiple_of(2) && coords.iter().all(|c| c.is_finite()));
        Point { coords }
    }

    /// Complex dimension n.
    pub fn dim(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn z(&self, j: usize) -> Complex64 {
        Complex64::new(self.coords[2 * j], self.coords[2 * j + 1])
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        distance(&self.coords, &other.coords)
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = ModelError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Complex coordinates of a raw coordinate slice, padded to [`MAX_DIM`].
pub(crate) fn complex_coords(coords: &[f64]) -> [Complex64; MAX_DIM] {
    let mut z = [Complex64::new(0.0, 0.0); MAX_DIM];
    for (j, zj) in z.iter_mut().enumerate().take(coords.len() / 2) {
        *zj = Complex64::new(coords[2 * j], coords[2 * j + 1]);
    }
    z
}
