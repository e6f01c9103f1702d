use num_complex::Complex64;
use serde::Serialize;

use super::point::{complex_coords, Point};
use super::poly::{roots, Polynomial};

/// A coordinate flat `{z : z_j = base_j for j in coords}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Flat {
    pub base: Point,
    /// Zero-based complex coordinate indices, sorted and distinct.
    pub coords: Vec<usize>,
}

impl Flat {
    /// Euclidean distance from a point to the flat.
    pub fn distance(&self, x: &[f64]) -> f64 {
        self.coords
            .iter()
            .map(|&j| {
                let dx = x[2 * j] - self.base.coords()[2 * j];
                let dy = x[2 * j + 1] - self.base.coords()[2 * j + 1];
                dx * dx + dy * dy
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Orthogonal projection of a point onto the flat.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for &j in &self.coords {
            out[2 * j] = self.base.coords()[2 * j];
            out[2 * j + 1] = self.base.coords()[2 * j + 1];
        }
        out
    }

    /// Intersection of two flats, if nonempty.
    pub fn intersect(&self, other: &Flat) -> Option<Flat> {
        let mut base = self.base.coords().to_vec();
        let mut coords = self.coords.clone();
        for &j in &other.coords {
            let (ox, oy) = (other.base.coords()[2 * j], other.base.coords()[2 * j + 1]);
            if self.coords.contains(&j) {
                if base[2 * j] != ox || base[2 * j + 1] != oy {
                    return None;
                }
            } else {
                base[2 * j] = ox;
                base[2 * j + 1] = oy;
                coords.push(j);
            }
        }
        coords.sort_unstable();
        Some(Flat { base: Point::from_raw(base), coords })
    }
}

/// An algebraic set containing the −∞ locus of an expression.
#[derive(Clone, Debug, PartialEq)]
pub enum SingularSet {
    Empty,
    Zeros(Polynomial),
    Flat(Flat),
    Union(Vec<SingularSet>),
    Intersection(Vec<SingularSet>),
}

impl SingularSet {
    pub(crate) fn union(parts: Vec<SingularSet>) -> SingularSet {
        let mut parts: Vec<SingularSet> = parts.into_iter().filter(|s| !s.is_empty()).collect();
        match parts.len() {
            0 => SingularSet::Empty,
            1 => parts.pop().unwrap(),
            _ => SingularSet::Union(parts),
        }
    }

    pub(crate) fn intersection(mut parts: Vec<SingularSet>) -> SingularSet {
        if parts.iter().any(|s| s.is_empty()) {
            return SingularSet::Empty;
        }
        if parts.len() == 1 {
            return parts.pop().unwrap();
        }
        SingularSet::Intersection(parts)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, SingularSet::Empty)
    }

    /// Membership up to `tol` (absolute value of the polynomial, or distance
    /// to a flat).
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            SingularSet::Empty => false,
            SingularSet::Zeros(p) => p.eval(&complex_coords(x)).norm() <= tol,
            SingularSet::Flat(f) => f.distance(x) <= tol,
            SingularSet::Union(v) => v.iter().any(|s| s.contains(x, tol)),
            SingularSet::Intersection(v) => v.iter().all(|s| s.contains(x, tol)),
        }
    }

    /// The set as a finite union of coordinate flats, when it has that form.
    pub fn flats(&self, dim: usize) -> Option<Vec<Flat>> {
        match self {
            SingularSet::Empty => Some(Vec::new()),
            SingularSet::Flat(f) => Some(vec![f.clone()]),
            SingularSet::Zeros(p) => {
                let support = p.support();
                match support.as_slice() {
                    [] => Some(Vec::new()),
                    &[j] => {
                        let zero = [Complex64::new(0.0, 0.0); 3];
                        let line = p.restrict_to_line(&zero, j);
                        Some(
                            roots(&line)
                                .into_iter()
                                .map(|r| {
                                    let mut base = vec![0.0; 2 * dim];
                                    base[2 * j] = r.re;
                                    base[2 * j + 1] = r.im;
                                    Flat { base: Point::from_raw(base), coords: vec![j] }
                                })
                                .collect(),
                        )
                    }
                    _ => None,
                }
            }
            SingularSet::Union(v) => {
                let mut out = Vec::new();
                for s in v {
                    out.extend(s.flats(dim)?);
                }
                Some(out)
            }
            SingularSet::Intersection(v) => {
                let mut acc = v.first()?.flats(dim)?;
                for s in &v[1..] {
                    let other = s.flats(dim)?;
                    acc = acc
                        .iter()
                        .flat_map(|a| other.iter().filter_map(move |b| a.intersect(b)))
                        .collect();
                }
                Some(acc)
            }
        }
    }

    /// Points of the set generated from base points: projections onto flats,
    /// and roots of the restriction of a polynomial to each coordinate line
    /// through a base point.
    pub fn candidates(&self, bases: &[Vec<f64>]) -> Vec<Vec<f64>> {
        match self {
            SingularSet::Empty => Vec::new(),
            SingularSet::Flat(f) => {
                let mut out = vec![f.base.coords().to_vec()];
                out.extend(bases.iter().map(|b| f.project(b)));
                out
            }
            SingularSet::Zeros(p) => {
                let mut out = Vec::new();
                let support = p.support();
                for b in bases {
                    let z = complex_coords(b);
                    for &j in &support {
                        for r in roots(&p.restrict_to_line(&z, j)) {
                            if !(r.re.is_finite() && r.im.is_finite()) {
                                continue;
                            }
                            let mut q = b.clone();
                            q[2 * j] = r.re;
                            q[2 * j + 1] = r.im;
                            out.push(q);
                        }
                    }
                    if support.len() == 1 {
                        break;
                    }
                }
                out
            }
            SingularSet::Union(v) => v.iter().flat_map(|s| s.candidates(bases)).collect(),
            SingularSet::Intersection(v) => {
                if let Some(flats) = self.flats(bases.first().map_or(1, |b| b.len() / 2)) {
                    return SingularSet::Union(flats.into_iter().map(SingularSet::Flat).collect())
                        .candidates(bases);
                }
                let first = v[0].candidates(bases);
                first
                    .into_iter()
                    .filter(|q| v[1..].iter().all(|s| s.contains(q, 1e-8)))
                    .collect()
            }
        }
    }
}
