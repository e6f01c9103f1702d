use std::collections::BTreeMap;

use num_complex::Complex64;

use super::point::MAX_DIM;
use super::ModelError;

/// A complex polynomial in `nvars` variables, stored as exponent vector to
/// nonzero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl Polynomial {
    pub fn new(
        nvars: usize,
        terms: impl IntoIterator<Item = (Complex64, Vec<u32>)>,
    ) -> Result<Self, ModelError> {
        if !(1..=MAX_DIM).contains(&nvars) {
            return Err(ModelError::BadDimension(nvars));
        }
        let mut map: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (c, e) in terms {
            if e.len() != nvars {
                return Err(ModelError::DimensionMismatch { expected: nvars, found: e.len() });
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(ModelError::NonFinite);
            }
            *map.entry(e).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| c.norm_sqr() > 0.0);
        if map.is_empty() {
            return Err(ModelError::ZeroPolynomial);
        }
        Ok(Polynomial { nvars, terms: map })
    }

    /// Polynomial in one variable from coefficients, highest degree first.
    pub fn univariate(descending: &[Complex64]) -> Result<Self, ModelError> {
        let d = descending.len().saturating_sub(1);
        Polynomial::new(
            1,
            descending.iter().enumerate().map(|(i, &c)| (c, vec![(d - i) as u32])),
        )
    }

    /// `z_var - root` in `nvars` variables.
    pub fn linear(nvars: usize, var: usize, root: Complex64) -> Result<Self, ModelError> {
        if var >= nvars {
            return Err(ModelError::BadCoordinate(var + 1));
        }
        let mut e = vec![0; nvars];
        e[var] = 1;
        Polynomial::new(nvars, [(Complex64::new(1.0, 0.0), e), (-root, vec![0; nvars])])
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Variables the polynomial actually depends on.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&j| self.degree_in(j) > 0).collect()
    }

    /// Coefficients of a univariate polynomial, highest degree first.
    pub fn descending_coefficients(&self) -> Option<Vec<Complex64>> {
        if self.nvars != 1 {
            return None;
        }
        let d = self.degree_in(0);
        Some(
            (0..=d)
                .rev()
                .map(|k| self.terms.get(&vec![k]).copied().unwrap_or(Complex64::new(0.0, 0.0)))
                .collect(),
        )
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, &c)| e.iter().zip(z).fold(c, |acc, (&k, &zj)| acc * zj.powu(k)))
            .sum()
    }

    /// Value and holomorphic partial derivatives `dp/dz_j`.
    pub fn eval_with_gradient(&self, z: &[Complex64]) -> (Complex64, [Complex64; MAX_DIM]) {
        let zero = Complex64::new(0.0, 0.0);
        let mut value = zero;
        let mut grad = [zero; MAX_DIM];
        for (e, &c) in &self.terms {
            value += e.iter().zip(z).fold(c, |acc, (&k, &zj)| acc * zj.powu(k));
            for j in 0..self.nvars {
                if e[j] == 0 {
                    continue;
                }
                let mut t = c * e[j] as f64;
                for (k, (&ek, &zk)) in e.iter().zip(z).enumerate() {
                    let p = if k == j { ek - 1 } else { ek };
                    t *= zk.powu(p);
                }
                grad[j] += t;
            }
        }
        (value, grad)
    }

    /// Ascending coefficients of `w -> p(z with z_var = w)`.
    pub fn restrict_to_line(&self, base: &[Complex64], var: usize) -> Vec<Complex64> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); d + 1];
        for (e, &c) in &self.terms {
            let mut t = c;
            for (k, (&ek, &zk)) in e.iter().zip(base).enumerate() {
                if k != var {
                    t *= zk.powu(ek);
                }
            }
            out[e[var] as usize] += t;
        }
        out
    }
}

/// Roots of a univariate polynomial given by ascending coefficients
/// (Durand-Kerner iteration followed by Newton polishing).
pub fn roots(ascending: &[Complex64]) -> Vec<Complex64> {
    let mut a: Vec<Complex64> = ascending.to_vec();
    while a.len() > 1 && a.last().is_some_and(|c| c.norm() == 0.0) {
        a.pop();
    }
    let deg = a.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = a[deg];
    let monic: Vec<Complex64> = a.iter().map(|c| c / lead).collect();
    if deg == 1 {
        return vec![-monic[0]];
    }
    let bound = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32) * (bound * 0.5)).collect();
    let horner = |x: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c);
    for _ in 0..1000 {
        let mut delta: f64 = 0.0;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 0.0);
            }
            let step = horner(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    let dcoef: Vec<Complex64> = (1..=deg).map(|k| monic[k] * k as f64).collect();
    for zi in &mut z {
        for _ in 0..3 {
            let d = dcoef.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * *zi + c);
            if d.norm() == 0.0 {
                break;
            }
            *zi -= horner(*zi) / d;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn univariate_eval() {
        // z^2 - 1
        let p = Polynomial::univariate(&[c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(p.eval(&[c(2.0, 0.0)]), c(3.0, 0.0));
        assert_eq!(p.degree_in(0), 2);
        assert_eq!(
            p.descending_coefficients().unwrap(),
            vec![c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]
        );
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(Polynomial::univariate(&[c(0.0, 0.0)]).is_err());
        assert!(Polynomial::new(2, [(c(1.0, 0.0), vec![1, 0]), (c(-1.0, 0.0), vec![1, 0])]).is_err());
    }

    #[test]
    fn gradient_matches_difference_quotient() {
        // z1^2 z2 + 3i z2
        let p = Polynomial::new(2, [(c(1.0, 0.0), vec![2, 1]), (c(0.0, 3.0), vec![0, 1])]).unwrap();
        let z = [c(0.3, -0.2), c(1.1, 0.4), c(0.0, 0.0)];
        let (_, g) = p.eval_with_gradient(&z);
        let h = 1e-7;
        for j in 0..2 {
            let mut zp = z;
            zp[j] += h;
            let fd = (p.eval(&zp) - p.eval(&z)) / h;
            assert!((fd - g[j]).norm() < 1e-5, "{j}: {fd} vs {}", g[j]);
        }
    }

    #[test]
    fn roots_of_cubic() {
        // (z-1)(z+2)(z-i) expanded, ascending
        let r = [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 1.0)];
        let asc = [
            -(r[0] * r[1] * r[2]),
            r[0] * r[1] + r[0] * r[2] + r[1] * r[2],
            -(r[0] + r[1] + r[2]),
            c(1.0, 0.0),
        ];
        let found = roots(&asc);
        assert_eq!(found.len(), 3);
        for target in r {
            assert!(found.iter().any(|z| (z - target).norm() < 1e-10), "{target} missing: {found:?}");
        }
    }

    #[test]
    fn restriction_to_line() {
        // z1 z2 - 1 restricted to z2 with z1 = 2 gives 2w - 1
        let p = Polynomial::new(2, [(c(1.0, 0.0), vec![1, 1]), (c(-1.0, 0.0), vec![0, 0])]).unwrap();
        let line = p.restrict_to_line(&[c(2.0, 0.0), c(0.0, 0.0)], 1);
        assert_eq!(line, vec![c(-1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(roots(&line), vec![c(0.5, 0.0)]);
    }
}
