//! Streaming moments and small least-squares helpers.

/// Count, mean and centered second moment, mergeable in a fixed order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.n as f64) * (other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }

    pub fn merge_all(parts: impl IntoIterator<Item = Moments>) -> Moments {
        parts.into_iter().fold(Moments::default(), Moments::merge)
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Ordinary least squares `y = a + b x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Slope standard error: the larger of the residual-based value and the
    /// value propagated from per-point errors.
    pub slope_stderr: f64,
    pub max_residual: f64,
}

pub(crate) fn fit_line(x: &[f64], y: &[f64], sigma: Option<&[f64]>) -> LineFit {
    let m = x.len();
    assert!(m >= 2 && y.len() == m);
    let xm = x.iter().sum::<f64>() / m as f64;
    let ym = y.iter().sum::<f64>() / m as f64;
    let sxx: f64 = x.iter().map(|&a| (a - xm) * (a - xm)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| (a - xm) * (b - ym)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = ym - slope * xm;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(&a, &b)| b - intercept - slope * a).collect();
    let max_residual = residuals.iter().fold(0.0_f64, |acc, r| acc.max(r.abs()));
    let mut se = 0.0;
    if sxx > 0.0 {
        if m > 2 {
            let rss: f64 = residuals.iter().map(|r| r * r).sum();
            se = (rss / (m - 2) as f64 / sxx).sqrt();
        }
        if let Some(s) = sigma {
            let prop: f64 = x.iter().zip(s).map(|(&a, &e)| ((a - xm) * e).powi(2)).sum();
            se = se.max(prop.sqrt() / sxx);
        }
    }
    LineFit { slope, intercept, slope_stderr: se, max_residual }
}

pub(crate) fn median3(a: f64, b: f64, c: f64) -> f64 {
    a.max(b).min(a.min(b).max(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        let m = a.merge(b);
        assert!((m.mean - all.mean).abs() < 1e-14);
        assert!((m.m2 - all.m2).abs() < 1e-12);
    }

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = fit_line(&x, &y, None);
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!((f.intercept - 1.0).abs() < 1e-14);
        assert!(f.max_residual < 1e-14);
    }

    #[test]
    fn median_of_three() {
        assert_eq!(median3(3.0, 1.0, 2.0), 2.0);
        assert_eq!(median3(1.0, 1.0, 5.0), 1.0);
        assert_eq!(median3(-1.0, 4.0, 0.5), 0.5);
    }
}
