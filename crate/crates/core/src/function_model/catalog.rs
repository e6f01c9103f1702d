use serde::Serialize;

use super::{Point, PshExpr};
use crate::geometry::BallSpec;

/// A reference function with its distinguished point, a ball on which it is
/// defined, and known values of the Lelong number and integrability index.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Expression in the text syntax.
    pub text: &'static str,
    #[serde(skip)]
    pub expr: PshExpr,
    pub dim: usize,
    pub point: Point,
    pub working_radius: f64,
    pub nu: Option<f64>,
    pub iota: Option<f64>,
}

impl CatalogEntry {
    pub fn working_ball(&self) -> BallSpec {
        BallSpec::new(self.point.clone(), self.working_radius).expect("catalog radii are positive")
    }
}

const E_M2: f64 = 0.1353352832366127; // e^-2

/// Name, description, text, point, working radius, ν, ι.
type Row = (&'static str, &'static str, &'static str, &'static [f64], f64, Option<f64>, Option<f64>);

#[rustfmt::skip]
const ENTRIES: &[Row] = &[
    ("log_abs_shift", "log|z-1|", "logabs(poly 1 -1)", &[1.0, 0.0], 0.5, Some(1.0), Some(1.0)),
    ("single_log", "log|z|", "logabs(poly 1 0)", &[0.0, 0.0], 1.0, Some(1.0), Some(1.0)),
    ("double_log", "2 log|z|", "scale(2, logabs(poly 1 0))", &[0.0, 0.0], 1.0, Some(2.0), Some(2.0)),
    ("triple_log", "3 log|z|", "scale(3, logabs(poly 1 0))", &[0.0, 0.0], 1.0, Some(3.0), Some(3.0)),
    ("norm_log_C2", "log|z| in C^2", "lognorm(0 0 0 0)", &[0.0; 4], 1.0, Some(1.0), Some(0.5)),
    ("coord_log_C2", "log|z1| in C^2", "logabs(mpoly 2 {1 1 0})", &[0.0; 4], 1.0, Some(1.0), Some(1.0)),
    ("neg_inverse_log", "-1/log|z|", "compose(neginv gamma 2, logabs(poly 1 0))", &[0.0, 0.0], E_M2, Some(0.0), Some(0.0)),
    ("neg_log_neg_log", "-log(-log|z|)", "compose(neglogneg gamma 2, logabs(poly 1 0))", &[0.0, 0.0], E_M2, Some(0.0), Some(0.0)),
    ("neg_sqrt_neg_log", "-(-log|z|)^(1/2)", "compose(negpow 0.5 gamma 2, logabs(poly 1 0))", &[0.0, 0.0], E_M2, Some(0.0), Some(0.0)),
    ("neg_inverse_log_z1sq", "-1/log|z1|^2", "compose(neginv gamma 2, scale(2, logabs(mpoly 2 {1 1 0})))", &[0.0; 4], E_M2, Some(0.0), Some(0.0)),
    ("neg_log_neg_log_z1sq", "-log(-log|z1|^2)", "compose(neglogneg gamma 2, scale(2, logabs(mpoly 2 {1 1 0})))", &[0.0; 4], E_M2, Some(0.0), Some(0.0)),
    ("neg_pow_030_z1sq", "-(-log|z1|^2)^0.3", "compose(negpow 0.3 gamma 2, scale(2, logabs(mpoly 2 {1 1 0})))", &[0.0; 4], E_M2, Some(0.0), Some(0.0)),
    ("neg_pow_040_z1sq", "-(-log|z1|^2)^0.4", "compose(negpow 0.4 gamma 2, scale(2, logabs(mpoly 2 {1 1 0})))", &[0.0; 4], E_M2, Some(0.0), Some(0.0)),
    ("neg_pow_050_z1sq", "-(-log|z1|^2)^0.5", "compose(negpow 0.5 gamma 2, scale(2, logabs(mpoly 2 {1 1 0})))", &[0.0; 4], E_M2, Some(0.0), Some(0.0)),
    ("bounded_max", "max(log|z|, -10)", "max(logabs(poly 1 0), const(-10))", &[0.0, 0.0], 1.0, Some(0.0), Some(0.0)),
];

/// All reference functions.
pub fn catalog() -> Vec<CatalogEntry> {
    ENTRIES
        .iter()
        .map(|&(name, description, text, point, working_radius, nu, iota)| {
            let point = Point::new(point.to_vec()).expect("catalog points are valid");
            CatalogEntry {
                name,
                description,
                text,
                expr: text.parse().expect("catalog expressions parse"),
                dim: point.dim(),
                point,
                working_radius,
                nu,
                iota,
            }
        })
        .collect()
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}
