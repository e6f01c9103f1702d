use num_complex::Complex64;
use serde::Serialize;

use super::chi::ConvexChi;
use super::ext_real::ExtReal;
use super::point::{complex_coords, Point, MAX_DIM};
use super::poly::Polynomial;
use super::singular::{Flat, SingularSet};
use super::ModelError;

/// `log` of the Euclidean norm of `z - center` restricted to some coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LogNorm {
    center: Point,
    coords: Vec<usize>,
}

impl LogNorm {
    pub fn center(&self) -> &Point {
        &self.center
    }

    /// Zero-based complex coordinates entering the norm.
    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    fn sq_dist(&self, x: &[f64]) -> f64 {
        let c = self.center.coords();
        self.coords
            .iter()
            .map(|&j| {
                let dx = x[2 * j] - c[2 * j];
                let dy = x[2 * j + 1] - c[2 * j + 1];
                dx * dx + dy * dy
            })
            .sum()
    }
}

/// Tree node of a [`PshExpr`].
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    LogAbsPoly(Polynomial),
    LogNorm(LogNorm),
    Const(f64),
    Sum(Vec<(f64, PshExpr)>),
    Max(Vec<PshExpr>),
    Scale(f64, Box<PshExpr>),
    AddConst(f64, Box<PshExpr>),
    Compose(ConvexChi, Box<PshExpr>),
}

/// A plurisubharmonic function built from atoms and psh-preserving
/// combinators. Construction validates every node, so any value of this type
/// is psh wherever its compositions are in domain.
#[derive(Clone, Debug, PartialEq)]
pub struct PshExpr {
    node: Node,
    dim: Option<usize>,
}

/// Gradient in R^{2n}.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gradient {
    pub components: Vec<f64>,
    /// Central differences were used because the closed form was not finite.
    pub finite_difference: bool,
    /// Some `max` had two branches achieving the value.
    pub nonsmooth: bool,
}

impl Gradient {
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

type Grad = [f64; 2 * MAX_DIM];

fn merge_dims<'a>(dims: impl IntoIterator<Item = &'a PshExpr>) -> Result<Option<usize>, ModelError> {
    let mut out = None;
    for e in dims {
        match (out, e.dim) {
            (Some(a), Some(b)) if a != b => {
                return Err(ModelError::DimensionMismatch { expected: a, found: b })
            }
            (None, Some(b)) => out = Some(b),
            _ => {}
        }
    }
    Ok(out)
}

fn finite(x: f64, what: &str) -> Result<f64, ModelError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ModelError::InvalidNode(format!("{what} must be finite, got {x}")))
    }
}

impl PshExpr {
    /// `log|p(z)|`.
    pub fn log_abs(p: Polynomial) -> Self {
        let dim = Some(p.nvars());
        PshExpr { node: Node::LogAbsPoly(p), dim }
    }

    /// `log|z - a|` in C^1.
    pub fn log_abs_shift(a: Complex64) -> Self {
        PshExpr::log_abs(Polynomial::linear(1, 0, a).expect("valid linear polynomial"))
    }

    /// `log|z_j|` in C^n (zero-based `j`).
    pub fn log_abs_coord(n: usize, j: usize) -> Result<Self, ModelError> {
        Ok(PshExpr::log_abs(Polynomial::linear(n, j, Complex64::new(0.0, 0.0))?))
    }

    /// `log` of the norm of `z - center` over the chosen coordinates (all of
    /// them when `coords` is `None`).
    pub fn log_norm(center: Point, coords: Option<Vec<usize>>) -> Result<Self, ModelError> {
        let n = center.dim();
        let mut coords = coords.unwrap_or_else(|| (0..n).collect());
        coords.sort_unstable();
        coords.dedup();
        if coords.is_empty() {
            return Err(ModelError::InvalidNode("norm over no coordinates".into()));
        }
        if let Some(&j) = coords.iter().find(|&&j| j >= n) {
            return Err(ModelError::BadCoordinate(j + 1));
        }
        Ok(PshExpr { node: Node::LogNorm(LogNorm { center, coords }), dim: Some(n) })
    }

    pub fn constant(k: f64) -> Result<Self, ModelError> {
        Ok(PshExpr { node: Node::Const(finite(k, "constant")?), dim: None })
    }

    pub fn sum(terms: Vec<(f64, PshExpr)>) -> Result<Self, ModelError> {
        if terms.is_empty() {
            return Err(ModelError::InvalidNode("empty sum".into()));
        }
        for (w, _) in &terms {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(ModelError::InvalidNode(format!("sum weight must be >= 0, got {w}")));
            }
        }
        let dim = merge_dims(terms.iter().map(|(_, e)| e))?;
        Ok(PshExpr { node: Node::Sum(terms), dim })
    }

    pub fn max(children: Vec<PshExpr>) -> Result<Self, ModelError> {
        if children.is_empty() {
            return Err(ModelError::InvalidNode("empty max".into()));
        }
        let dim = merge_dims(&children)?;
        Ok(PshExpr { node: Node::Max(children), dim })
    }

    pub fn scale(c: f64, child: PshExpr) -> Result<Self, ModelError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(ModelError::InvalidNode(format!("scale factor must be > 0, got {c}")));
        }
        let dim = child.dim;
        Ok(PshExpr { node: Node::Scale(c, Box::new(child)), dim })
    }

    pub fn add_const(k: f64, child: PshExpr) -> Result<Self, ModelError> {
        let dim = child.dim;
        Ok(PshExpr { node: Node::AddConst(finite(k, "added constant")?, Box::new(child)), dim })
    }

    /// `chi ∘ child` without checking the domain bound; violations surface as
    /// errors at evaluation time. See [`super::compose_convex`] for the
    /// checked version.
    pub fn compose(chi: ConvexChi, child: PshExpr) -> Self {
        let dim = child.dim;
        PshExpr { node: Node::Compose(chi, Box::new(child)), dim }
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    /// Ambient complex dimension; `None` for expressions built from constants only.
    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    fn check_dim(&self, n: usize) -> Result<(), ModelError> {
        match self.dim {
            Some(d) if d != n => Err(ModelError::DimensionMismatch { expected: d, found: n }),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, z: &Point) -> Result<ExtReal, ModelError> {
        self.check_dim(z.dim())?;
        let v = self.eval_raw(z.coords())?;
        Ok(ExtReal::new(v).expect("psh expressions never evaluate to +inf or NaN"))
    }

    /// Evaluation on raw coordinates of the right length.
    pub(crate) fn eval_raw(&self, x: &[f64]) -> Result<f64, ModelError> {
        Ok(match &self.node {
            Node::LogAbsPoly(p) => p.eval(&complex_coords(x)).norm().ln(),
            Node::LogNorm(l) => 0.5 * l.sq_dist(x).ln(),
            Node::Const(k) => *k,
            Node::Sum(terms) => {
                let mut acc = 0.0;
                for (w, e) in terms {
                    if *w > 0.0 {
                        acc += w * e.eval_raw(x)?;
                    }
                }
                acc
            }
            Node::Max(children) => {
                let mut acc = f64::NEG_INFINITY;
                for e in children {
                    acc = acc.max(e.eval_raw(x)?);
                }
                acc
            }
            Node::Scale(c, e) => c * e.eval_raw(x)?,
            Node::AddConst(k, e) => e.eval_raw(x)? + k,
            Node::Compose(chi, e) => chi.apply(e.eval_raw(x)?)?,
        })
    }

    fn grad_rec(&self, x: &[f64], nonsmooth: &mut bool) -> Result<(f64, Grad), ModelError> {
        let mut g: Grad = [0.0; 2 * MAX_DIM];
        let v = match &self.node {
            Node::LogAbsPoly(p) => {
                let z = complex_coords(x);
                let (pv, dp) = p.eval_with_gradient(&z);
                for j in 0..p.nvars() {
                    let q = dp[j] / pv;
                    g[2 * j] = q.re;
                    g[2 * j + 1] = -q.im;
                }
                pv.norm().ln()
            }
            Node::LogNorm(l) => {
                let s = l.sq_dist(x);
                let c = l.center.coords();
                for &j in &l.coords {
                    g[2 * j] = (x[2 * j] - c[2 * j]) / s;
                    g[2 * j + 1] = (x[2 * j + 1] - c[2 * j + 1]) / s;
                }
                0.5 * s.ln()
            }
            Node::Const(k) => *k,
            Node::Sum(terms) => {
                let mut acc = 0.0;
                for (w, e) in terms {
                    if *w > 0.0 {
                        let (ev, eg) = e.grad_rec(x, nonsmooth)?;
                        acc += w * ev;
                        g.iter_mut().zip(eg).for_each(|(a, b)| *a += w * b);
                    }
                }
                acc
            }
            Node::Max(children) => {
                let mut best: Option<(f64, Grad)> = None;
                for e in children {
                    let (ev, eg) = e.grad_rec(x, nonsmooth)?;
                    match &best {
                        None => best = Some((ev, eg)),
                        Some((bv, _)) => {
                            if (ev - bv).abs() <= 1e-12 * (1.0 + bv.abs()) {
                                *nonsmooth = true;
                            } else if ev > *bv {
                                best = Some((ev, eg));
                            }
                        }
                    }
                }
                let (bv, bg) = best.expect("max has children");
                g = bg;
                bv
            }
            Node::Scale(c, e) => {
                let (ev, eg) = e.grad_rec(x, nonsmooth)?;
                g.iter_mut().zip(eg).for_each(|(a, b)| *a = c * b);
                c * ev
            }
            Node::AddConst(k, e) => {
                let (ev, eg) = e.grad_rec(x, nonsmooth)?;
                g = eg;
                ev + k
            }
            Node::Compose(chi, e) => {
                let (ev, eg) = e.grad_rec(x, nonsmooth)?;
                let out = chi.apply(ev)?;
                let d = chi.derivative(ev);
                g.iter_mut().zip(eg).for_each(|(a, b)| *a = d * b);
                out
            }
        };
        Ok((v, g))
    }

    /// Real gradient `(d/dx1, d/dy1, ..., d/dxn, d/dyn)`.
    pub fn grad(&self, z: &Point) -> Result<Gradient, ModelError> {
        self.check_dim(z.dim())?;
        self.grad_raw(z.coords())
    }

    pub(crate) fn grad_raw(&self, x: &[f64]) -> Result<Gradient, ModelError> {
        let m = x.len();
        let mut nonsmooth = false;
        let (v, g) = self.grad_rec(x, &mut nonsmooth)?;
        if v == f64::NEG_INFINITY {
            return Err(ModelError::SingularPoint);
        }
        if g[..m].iter().all(|c| c.is_finite()) {
            return Ok(Gradient { components: g[..m].to_vec(), finite_difference: false, nonsmooth });
        }
        let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let h = 1e-6 * norm.max(1.0);
        let mut comps = vec![0.0; m];
        let mut probe = x.to_vec();
        for (k, c) in comps.iter_mut().enumerate() {
            probe[k] = x[k] + h;
            let up = self.eval_raw(&probe)?;
            probe[k] = x[k] - h;
            let down = self.eval_raw(&probe)?;
            probe[k] = x[k];
            *c = (up - down) / (2.0 * h);
        }
        Ok(Gradient { components: comps, finite_difference: true, nonsmooth })
    }

    /// An algebraic set containing every point where the expression is −∞.
    pub fn singular_set(&self) -> SingularSet {
        match &self.node {
            Node::LogAbsPoly(p) => {
                if p.support().is_empty() {
                    SingularSet::Empty
                } else {
                    SingularSet::Zeros(p.clone())
                }
            }
            Node::LogNorm(l) => {
                SingularSet::Flat(Flat { base: l.center.clone(), coords: l.coords.clone() })
            }
            Node::Const(_) => SingularSet::Empty,
            Node::Sum(terms) => SingularSet::union(
                terms.iter().filter(|(w, _)| *w > 0.0).map(|(_, e)| e.singular_set()).collect(),
            ),
            Node::Max(children) => {
                SingularSet::intersection(children.iter().map(PshExpr::singular_set).collect())
            }
            Node::Scale(_, e) | Node::AddConst(_, e) => e.singular_set(),
            Node::Compose(chi, e) => {
                if chi.value_at_minus_infinity() > f64::NEG_INFINITY {
                    SingularSet::Empty
                } else {
                    e.singular_set()
                }
            }
        }
    }

    /// Where `|∇f|` can blow up: the singular set of the innermost atoms,
    /// seen through compositions even when the outer function is bounded
    /// below.
    pub fn pole_set(&self) -> SingularSet {
        match &self.node {
            Node::Compose(_, e) | Node::Scale(_, e) | Node::AddConst(_, e) => e.pole_set(),
            Node::Sum(terms) => {
                SingularSet::union(terms.iter().filter(|(w, _)| *w != 0.0).map(|(_, e)| e.pole_set()).collect())
            }
            _ => self.singular_set(),
        }
    }

    /// True when the structure alone forces every Lelong number to vanish:
    /// a composition with χ'(−∞) = 0 at the root, possibly under scalings,
    /// shifts, sums of such terms, or a max with one such branch.
    pub fn zero_lelong_certified(&self) -> bool {
        match &self.node {
            Node::Const(_) => true,
            Node::Compose(chi, _) => chi.prime_at_minus_infinity_zero(),
            Node::Scale(_, e) | Node::AddConst(_, e) => e.zero_lelong_certified(),
            Node::Sum(terms) => {
                terms.iter().all(|(w, e)| *w == 0.0 || e.zero_lelong_certified())
            }
            Node::Max(children) => children.iter().any(PshExpr::zero_lelong_certified),
            Node::LogAbsPoly(_) | Node::LogNorm(_) => false,
        }
    }
}
