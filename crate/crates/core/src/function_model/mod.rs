//! Plurisubharmonic test functions: points, values in [−∞, ∞), the
//! expression algebra, its text syntax, and the catalog of reference cases.

mod catalog;
mod chi;
mod expr;
mod ext_real;
pub(crate) mod grammar;
mod point;
mod poly;
mod singular;

pub use catalog::{catalog, catalog_entry, CatalogEntry};
pub use chi::{iterated_t_min_gamma, ChiKind, ConvexChi};
pub use expr::{Gradient, LogNorm, Node, PshExpr};
pub use ext_real::ExtReal;
pub use point::{Point, MAX_DIM};
pub use poly::{roots, Polynomial};
pub use singular::{Flat, SingularSet};

pub(crate) use point::distance;

use crate::geometry::Domain;
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("a point needs 2, 4 or 6 real coordinates, got {0}")]
    BadPointLength(usize),
    #[error("non-finite coordinate or coefficient")]
    NonFinite,
    #[error("complex dimension {0} is not supported (1 to 3)")]
    BadDimension(usize),
    #[error("dimension mismatch: expected C^{expected}, got C^{found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the zero polynomial has log|p| identically -inf")]
    ZeroPolynomial,
    #[error("coordinate {0} out of range")]
    BadCoordinate(usize),
    #[error("invalid outer function: {0}")]
    InvalidChi(String),
    #[error("invalid expression: {0}")]
    InvalidNode(String),
    #[error("composition out of domain: inner value {value} is not below {bound}")]
    DomainViolation { value: f64, bound: f64 },
    #[error("point lies on the singular set")]
    SingularPoint,
    #[error("parse error: {0}")]
    Parse(String),
}

/// `chi ∘ f`, after checking `f < -gamma` on `samples` interior and boundary
/// points of `domain`. The check is a sampled certificate, not a proof.
pub fn compose_convex(
    chi: ConvexChi,
    f: PshExpr,
    domain: &Domain,
    samples: usize,
    seed: u64,
) -> Result<PshExpr, ModelError> {
    if let Some(n) = f.dim() {
        if n != domain.dim() {
            return Err(ModelError::DimensionMismatch { expected: n, found: domain.dim() });
        }
    }
    if chi.restricts_domain() {
        // Interior points must satisfy the strict bound; boundary points only
        // its closure, since the domain is open.
        let half = samples.div_ceil(2).max(1);
        let interior = domain.sample_interior(half, substream(seed, 0));
        let boundary = domain.sample_boundary(half, substream(seed, 1));
        for (p, strict) in interior.iter().map(|p| (p, true)).chain(boundary.iter().map(|p| (p, false))) {
            let v = f.eval_raw(p.coords())?;
            let bad = if strict { !chi.in_domain(v) } else { v > -chi.gamma() + 1e-9 * chi.gamma().max(1.0) };
            if bad {
                return Err(ModelError::DomainViolation { value: v, bound: -chi.gamma() });
            }
        }
    }
    Ok(PshExpr::compose(chi, f))
}
