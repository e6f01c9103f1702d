//! Domains of C^n, distance to the boundary, sampling, and the interior
//! sphere condition.

mod sampling;
mod sphere_check;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

pub use sampling::{sample_ball, sample_sphere};
pub use sphere_check::{interior_sphere_check, SphereVerdict};

pub(crate) use sampling::{fill_ball, fill_shell, fill_sphere};

use crate::function_model::grammar::Lexer;
use crate::function_model::{distance, ModelError, Point};
use crate::rng::{map_chunks, substream};

/// Points closer than this to the boundary count as boundary points.
pub const BOUNDARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("point is outside the domain")]
    NotInDomain,
    #[error("point is not on the boundary (distance {0:e})")]
    NotOnBoundary(f64),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("radius grid must be nonempty, positive and decreasing")]
    BadGrid,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// An open Euclidean ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBall")]
pub struct BallSpec {
    center: Point,
    radius: f64,
}

#[derive(Deserialize)]
struct RawBall {
    center: Point,
    radius: f64,
}

impl TryFrom<RawBall> for BallSpec {
    type Error = GeometryError;
    fn try_from(r: RawBall) -> Result<Self, Self::Error> {
        BallSpec::new(r.center, r.radius)
    }
}

impl BallSpec {
    pub fn new(center: Point, radius: f64) -> Result<Self, GeometryError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeometryError::InvalidDomain(format!("radius must be positive, got {radius}")));
        }
        Ok(BallSpec { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Same center, new radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self, GeometryError> {
        BallSpec::new(self.center.clone(), radius)
    }
}

/// `prod_j {|z_j - c_j| < r_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polydisk {
    center: Point,
    radii: Vec<f64>,
}

/// `{x + iy : 0 < x < 1, |y| < (1 - x)^alpha}` in C^1, `alpha > 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cusp {
    alpha: f64,
}

/// Points of `inner` farther than `margin` from its boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct Shrunk {
    inner: Box<Domain>,
    margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Ball(BallSpec),
    Polydisk(Polydisk),
    Cusp(Cusp),
    Shrunk(Shrunk),
}

impl Polydisk {
    pub fn new(center: Point, radii: Vec<f64>) -> Result<Self, GeometryError> {
        if radii.len() != center.dim() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(GeometryError::InvalidDomain("polydisk needs one positive radius per coordinate".into()));
        }
        Ok(Polydisk { center, radii })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    fn moduli<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = (f64, f64)> + 'a {
        let c = self.center.coords();
        self.radii.iter().enumerate().map(move |(j, &r)| {
            ((x[2 * j] - c[2 * j]).hypot(x[2 * j + 1] - c[2 * j + 1]), r)
        })
    }
}

impl Cusp {
    pub fn new(alpha: f64) -> Result<Self, GeometryError> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(GeometryError::InvalidDomain(format!("cusp exponent must exceed 1, got {alpha}")));
        }
        Ok(Cusp { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The tip `1 + 0i`, where the interior sphere condition fails.
    pub fn tip() -> Point {
        Point::new(vec![1.0, 0.0]).expect("valid point")
    }

    fn contains(&self, x: &[f64]) -> bool {
        x[0] > 0.0 && x[0] < 1.0 && x[1].abs() < (1.0 - x[0]).powf(self.alpha)
    }

    /// Distance to the upper boundary curve `t -> (t, (1 - t)^alpha)` from a
    /// point with nonnegative ordinate: dense sweep, then golden-section
    /// refinement of the best bracket.
    fn curve_distance(&self, px: f64, py: f64) -> f64 {
        const SWEEP: usize = 2000;
        let a = self.alpha;
        let d2 = |t: f64| (px - t).powi(2) + (py - (1.0 - t).powf(a)).powi(2);
        let mut best = 0;
        let mut best_v = f64::INFINITY;
        for i in 0..=SWEEP {
            let v = d2(i as f64 / SWEEP as f64);
            if v < best_v {
                best_v = v;
                best = i;
            }
        }
        let lo = best.saturating_sub(1) as f64 / SWEEP as f64;
        let hi = (best + 1).min(SWEEP) as f64 / SWEEP as f64;
        golden_min(d2, lo, hi, 1e-13).min(best_v).sqrt()
    }

    fn boundary_distance(&self, x: &[f64]) -> f64 {
        let (px, py) = (x[0], x[1].abs());
        let seg = px.abs().hypot((py - 1.0).max(0.0));
        seg.min(self.curve_distance(px, py))
    }
}

/// Minimum value of `f` on `[a, b]` by golden-section search.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = fc.min(fd).min(f(a)).min(f(b));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        best = best.min(fc).min(fd);
    }
    best
}

impl Shrunk {
    pub fn new(inner: Domain, margin: f64) -> Result<Self, GeometryError> {
        let inradius = inner.inradius();
        if !(margin.is_finite() && margin > 0.0 && margin < inradius) {
            return Err(GeometryError::InvalidDomain(format!(
                "margin must lie in (0, {inradius}), got {margin}"
            )));
        }
        Ok(Shrunk { inner: Box::new(inner), margin })
    }

    pub fn inner(&self) -> &Domain {
        &self.inner
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }
}

impl Domain {
    pub fn ball(center: Point, radius: f64) -> Result<Self, GeometryError> {
        Ok(Domain::Ball(BallSpec::new(center, radius)?))
    }

    pub fn polydisk(center: Point, radii: Vec<f64>) -> Result<Self, GeometryError> {
        Ok(Domain::Polydisk(Polydisk::new(center, radii)?))
    }

    pub fn cusp(alpha: f64) -> Result<Self, GeometryError> {
        Ok(Domain::Cusp(Cusp::new(alpha)?))
    }

    pub fn shrunk(inner: Domain, margin: f64) -> Result<Self, GeometryError> {
        Ok(Domain::Shrunk(Shrunk::new(inner, margin)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball(b) => b.dim(),
            Domain::Polydisk(p) => p.center.dim(),
            Domain::Cusp(_) => 1,
            Domain::Shrunk(s) => s.inner.dim(),
        }
    }

    /// Open-set membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Ball(b) => distance(x, b.center.coords()) < b.radius,
            Domain::Polydisk(p) => p.moduli(x).all(|(m, r)| m < r),
            Domain::Cusp(c) => c.contains(x),
            Domain::Shrunk(s) => s.inner.contains(x) && s.inner.boundary_distance(x) > s.margin,
        }
    }

    /// Unsigned distance from any point to the boundary.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match self {
            Domain::Ball(b) => (b.radius - distance(x, b.center.coords())).abs(),
            Domain::Polydisk(p) => {
                if self.contains(x) {
                    p.moduli(x).map(|(m, r)| r - m).fold(f64::INFINITY, f64::min)
                } else {
                    let out: f64 = p.moduli(x).map(|(m, r)| (m - r).max(0.0).powi(2)).sum();
                    if out > 0.0 {
                        out.sqrt()
                    } else {
                        0.0
                    }
                }
            }
            Domain::Cusp(c) => c.boundary_distance(x),
            Domain::Shrunk(s) => {
                if s.inner.contains(x) {
                    (s.inner.boundary_distance(x) - s.margin).abs()
                } else {
                    s.inner.boundary_distance(x) + s.margin
                }
            }
        }
    }

    /// Distance to the boundary for a point of the closure: `Ok(0)` on the
    /// boundary (within [`BOUNDARY_TOL`]), an error outside.
    pub fn dist_to_boundary(&self, z: &Point) -> Result<f64, GeometryError> {
        if z.dim() != self.dim() {
            return Err(ModelError::DimensionMismatch { expected: self.dim(), found: z.dim() }.into());
        }
        let d = self.boundary_distance(z.coords());
        if d <= BOUNDARY_TOL {
            Ok(0.0)
        } else if self.contains(z.coords()) {
            Ok(d)
        } else {
            Err(GeometryError::NotInDomain)
        }
    }

    /// Positive inside, negative outside, magnitude the boundary distance.
    pub(crate) fn signed_distance(&self, x: &[f64]) -> f64 {
        let d = self.boundary_distance(x);
        if self.contains(x) {
            d
        } else {
            -d
        }
    }

    pub fn in_closure(&self, x: &[f64]) -> bool {
        self.contains(x) || self.boundary_distance(x) <= BOUNDARY_TOL
    }

    /// Radius of the largest inscribed ball (exact for balls and polydisks,
    /// sampled along the axis for the cusp).
    pub fn inradius(&self) -> f64 {
        match self {
            Domain::Ball(b) => b.radius,
            Domain::Polydisk(p) => p.radii.iter().copied().fold(f64::INFINITY, f64::min),
            Domain::Cusp(c) => (1..400)
                .map(|i| c.boundary_distance(&[i as f64 / 400.0, 0.0]))
                .fold(0.0, f64::max),
            Domain::Shrunk(s) => s.inner.inradius() - s.margin,
        }
    }

    /// A deep interior point.
    pub fn anchor(&self) -> Point {
        match self {
            Domain::Ball(b) => b.center.clone(),
            Domain::Polydisk(p) => p.center.clone(),
            Domain::Cusp(c) => {
                let best = (1..400)
                    .map(|i| i as f64 / 400.0)
                    .max_by(|&a, &b| {
                        c.boundary_distance(&[a, 0.0]).total_cmp(&c.boundary_distance(&[b, 0.0]))
                    })
                    .expect("nonempty sweep");
                Point::from_raw(vec![best, 0.0])
            }
            Domain::Shrunk(s) => s.inner.anchor(),
        }
    }

    /// Axis-aligned box containing the domain.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Ball(b) => (
                b.center.coords().iter().map(|c| c - b.radius).collect(),
                b.center.coords().iter().map(|c| c + b.radius).collect(),
            ),
            Domain::Polydisk(p) => {
                let c = p.center.coords();
                let lo = (0..c.len()).map(|k| c[k] - p.radii[k / 2]).collect();
                let hi = (0..c.len()).map(|k| c[k] + p.radii[k / 2]).collect();
                (lo, hi)
            }
            Domain::Cusp(_) => (vec![0.0, -1.0], vec![1.0, 1.0]),
            Domain::Shrunk(s) => s.inner.bounding_box(),
        }
    }

    /// Uniform interior points (rejection from the bounding box, direct for balls).
    pub fn sample_interior(&self, count: usize, seed: u64) -> Vec<Point> {
        if let Domain::Ball(b) = self {
            return sample_ball(b, count, seed);
        }
        let (lo, hi) = self.bounding_box();
        map_chunks(count, seed, |rng, range| {
            range
                .map(|_| loop {
                    let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| rng.gen_range(*a..*b)).collect();
                    if self.contains(&x) {
                        break Point::from_raw(x);
                    }
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect()
    }

    /// Points on the boundary (not uniformly distributed for every variant).
    pub fn sample_boundary(&self, count: usize, seed: u64) -> Vec<Point> {
        match self {
            Domain::Ball(b) => sample_sphere(b, count, seed),
            Domain::Polydisk(p) => map_chunks(count, seed, |rng, range| {
                range
                    .map(|_| {
                        let n = p.radii.len();
                        let j = rng.gen_range(0..n);
                        let mut x = vec![0.0; 2 * n];
                        for k in 0..n {
                            let c = &p.center.coords()[2 * k..2 * k + 2];
                            if k == j {
                                fill_sphere(rng, c, p.radii[k], &mut x[2 * k..2 * k + 2]);
                            } else {
                                fill_ball(rng, c, p.radii[k], &mut x[2 * k..2 * k + 2]);
                            }
                        }
                        Point::from_raw(x)
                    })
                    .collect::<Vec<_>>()
            })
            .into_iter()
            .flatten()
            .collect(),
            Domain::Cusp(c) => map_chunks(count, seed, |rng, range| {
                range
                    .map(|_| {
                        let t: f64 = rng.gen();
                        let x = match rng.gen_range(0..3) {
                            0 => vec![0.0, 2.0 * t - 1.0],
                            1 => vec![t, (1.0 - t).powf(c.alpha)],
                            _ => vec![t, -(1.0 - t).powf(c.alpha)],
                        };
                        Point::from_raw(x)
                    })
                    .collect::<Vec<_>>()
            })
            .into_iter()
            .flatten()
            .collect(),
            Domain::Shrunk(_) => {
                // Bisect along rays from the anchor to interior samples.
                let a = self.anchor();
                self.sample_interior(count, substream(seed, 1))
                    .into_iter()
                    .map(|p| {
                        let dir: Vec<f64> = p.coords().iter().zip(a.coords()).map(|(x, c)| x - c).collect();
                        let at = |s: f64| -> Vec<f64> {
                            a.coords().iter().zip(&dir).map(|(c, d)| c + s * d).collect()
                        };
                        let (mut lo, mut hi) = (1.0, 2.0);
                        while self.contains(&at(hi)) {
                            hi *= 2.0;
                        }
                        for _ in 0..80 {
                            let mid = 0.5 * (lo + hi);
                            if self.contains(&at(mid)) {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        Point::from_raw(at(lo))
                    })
                    .collect()
            }
        }
    }

    /// Boundary features worth targeting when sampling centers (the cusp tip).
    pub fn features(&self) -> Vec<Point> {
        match self {
            Domain::Cusp(_) => vec![Cusp::tip()],
            Domain::Shrunk(s) => s.inner.features().into_iter().filter(|p| self.in_closure(p.coords())).collect(),
            _ => Vec::new(),
        }
    }
}

pub(crate) fn parse_domain(lx: &mut Lexer) -> Result<Domain, GeometryError> {
    let name = lx.ident()?;
    lx.expect_sym('(')?;
    let d = match name.as_str() {
        "ball" => {
            let mut v = lx.numbers();
            let r = v.pop().ok_or_else(|| ModelError::Parse("ball needs a radius".into()))?;
            Domain::ball(Point::new(v)?, r)?
        }
        "polydisk" => {
            let c = lx.numbers();
            lx.expect_sym('|')?;
            let r = lx.numbers();
            Domain::polydisk(Point::new(c)?, r)?
        }
        "cusp" => Domain::cusp(lx.number()?)?,
        "shrunk" => {
            let inner = parse_domain(lx)?;
            if lx.at_sym(',') {
                lx.expect_sym(',')?;
            }
            Domain::shrunk(inner, lx.number()?)?
        }
        other => return Err(ModelError::Parse(format!("unknown domain '{other}'")).into()),
    };
    lx.expect_sym(')')?;
    Ok(d)
}

impl FromStr for Domain {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lx = Lexer::new(s)?;
        let d = parse_domain(&mut lx)?;
        lx.finish()?;
        Ok(d)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Ball(b) => write!(f, "ball({} {})", b.center, b.radius),
            Domain::Polydisk(p) => {
                write!(f, "polydisk({} |", p.center)?;
                for r in &p.radii {
                    write!(f, " {r}")?;
                }
                f.write_str(")")
            }
            Domain::Cusp(c) => write!(f, "cusp({})", c.alpha),
            Domain::Shrunk(s) => write!(f, "shrunk({}, {})", s.inner, s.margin),
        }
    }
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn distances_to_boundary() {
        let b = Domain::ball(Point::origin(1), 1.0).unwrap();
        assert_eq!(b.dist_to_boundary(&Point::origin(1)).unwrap(), 1.0);
        assert_eq!(b.dist_to_boundary(&pt(&[1.0, 0.0])).unwrap(), 0.0);
        assert_eq!(b.dist_to_boundary(&pt(&[2.0, 0.0])), Err(GeometryError::NotInDomain));
        let s = Domain::shrunk(b, 0.1).unwrap();
        assert!((s.dist_to_boundary(&Point::origin(1)).unwrap() - 0.9).abs() < 1e-15);
        let p = Domain::polydisk(Point::origin(2), vec![1.0, 0.5]).unwrap();
        assert!((p.dist_to_boundary(&pt(&[0.2, 0.0, 0.1, 0.0])).unwrap() - 0.4).abs() < 1e-15);
    }

    /// Brute-force oracle: 10^6-point sweep of each boundary arc, refined by
    /// golden section around the best sample.
    fn cusp_oracle(alpha: f64, px: f64, py: f64) -> f64 {
        let n = 1_000_000;
        let f = |t: f64| (px - t).powi(2) + (py.abs() - (1.0 - t).powf(alpha)).powi(2);
        let (mut bi, mut bv) = (0usize, f64::INFINITY);
        for i in 0..=n {
            let v = f(i as f64 / n as f64);
            if v < bv {
                bi = i;
                bv = v;
            }
        }
        let curve = golden_min(f, bi.saturating_sub(1) as f64 / n as f64, ((bi + 1).min(n)) as f64 / n as f64, 1e-15)
            .min(bv)
            .sqrt();
        let mut seg = f64::INFINITY;
        for i in 0..=n {
            let y = -1.0 + 2.0 * i as f64 / n as f64;
            seg = seg.min(px.hypot(py - y));
        }
        curve.min(seg)
    }

    #[test]
    fn cusp_distance_matches_oracle() {
        let d = Domain::cusp(2.0).unwrap();
        for &(x, y) in &[(0.5, 0.0), (0.9, 0.005), (0.1, 0.3), (0.7, -0.05), (0.99, 0.0)] {
            let got = d.dist_to_boundary(&pt(&[x, y])).unwrap();
            let want = cusp_oracle(2.0, x, y);
            assert!((got - want).abs() < 1e-10, "({x},{y}): {got} vs {want}");
        }
        // frozen from the oracle
        let got = d.dist_to_boundary(&pt(&[0.5, 0.0])).unwrap();
        assert!((got - 0.18760397956103728).abs() < 1e-10, "{got}");
    }

    #[test]
    fn contains_agrees_with_distance_sign() {
        let domains = [
            "ball(0.2 -0.1 0.7)",
            "polydisk(0 0 1 0 | 1 0.5)",
            "cusp(2)",
            "cusp(1.5)",
            "shrunk(ball(0 0 1), 0.1)",
            "shrunk(cusp(2), 0.05)",
        ];
        for (i, text) in domains.iter().enumerate() {
            let d: Domain = text.parse().unwrap();
            assert_eq!(d.to_string(), *text);
            let (lo, hi) = d.bounding_box();
            let mut rng = crate::rng::stream(i as u64);
            for _ in 0..10_000 {
                let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| rng.gen_range(a - 0.2..b + 0.2)).collect();
                let p = Point::new(x).unwrap();
                match d.dist_to_boundary(&p) {
                    Ok(v) if v > 0.0 => assert!(d.contains(p.coords()), "{text} {p}"),
                    Ok(_) => assert!(d.boundary_distance(p.coords()) <= BOUNDARY_TOL),
                    Err(_) => assert!(!d.contains(p.coords()), "{text} {p}"),
                }
            }
        }
    }

    #[test]
    fn invalid_domains() {
        assert!(Domain::cusp(1.0).is_err());
        assert!(Domain::shrunk(Domain::ball(Point::origin(1), 1.0).unwrap(), 1.0).is_err());
        assert!("ball(0 0)".parse::<Domain>().is_err());
        assert!("ball(0 0 -1)".parse::<Domain>().is_err());
        assert!("polydisk(0 0 | 1 1)".parse::<Domain>().is_err());
        assert!("torus(1)".parse::<Domain>().is_err());
    }

    #[test]
    fn samplers_land_where_claimed() {
        for text in ["polydisk(0 0 1 0 | 1 0.5)", "cusp(2)", "shrunk(cusp(2), 0.05)", "shrunk(ball(0 0 1), 0.1)"] {
            let d: Domain = text.parse().unwrap();
            assert!(d.sample_interior(500, 1).iter().all(|p| d.contains(p.coords())), "{text}");
            for p in d.sample_boundary(500, 2) {
                assert!(d.boundary_distance(p.coords()) < 1e-9, "{text} {p}");
            }
        }
    }
}
