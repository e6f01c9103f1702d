use serde::{Serialize, Serializer};

/// A value in [−∞, ∞): a finite real or minus infinity. Never NaN or +∞.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const MINUS_INFINITY: ExtReal = ExtReal(f64::NEG_INFINITY);

    /// `None` for NaN and +∞.
    pub fn new(v: f64) -> Option<Self> {
        if v.is_nan() || v == f64::INFINITY {
            None
        } else {
            Some(ExtReal(v))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_minus_infinity(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn finite(self) -> Option<f64> {
        (!self.is_minus_infinity()).then_some(self.0)
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_minus_infinity() {
            f.write_str("-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Serialized as a number, or the string `"-inf"`.
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.finite() {
            Some(v) => s.serialize_f64(v),
            None => s.serialize_str("-inf"),
        }
    }
}
