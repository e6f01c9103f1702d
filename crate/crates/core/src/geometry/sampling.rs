use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::BallSpec;
use crate::function_model::Point;
use crate::rng::map_chunks;

/// Writes a uniform point of the sphere `|x - center| = radius` into `out`.
pub(crate) fn fill_sphere(rng: &mut ChaCha8Rng, center: &[f64], radius: f64, out: &mut [f64]) {
    loop {
        let mut s = 0.0;
        for o in out.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *o = g;
            s += g * g;
        }
        if s > 1e-300 {
            let k = radius / s.sqrt();
            for (o, c) in out.iter_mut().zip(center) {
                *o = c + k * *o;
            }
            return;
        }
    }
}

/// Writes a uniform point of the open ball into `out`.
pub(crate) fn fill_ball(rng: &mut ChaCha8Rng, center: &[f64], radius: f64, out: &mut [f64]) {
    let d = out.len() as f64;
    loop {
        let u: f64 = rng.gen();
        let rho = radius * u.powf(1.0 / d);
        fill_sphere(rng, center, rho, out);
        let r2: f64 = out.iter().zip(center).map(|(o, c)| (o - c) * (o - c)).sum();
        if r2 < radius * radius {
            return;
        }
    }
}

/// Uniform point of the shell `inner <= |x - center| < outer`.
pub(crate) fn fill_shell(
    rng: &mut ChaCha8Rng,
    center: &[f64],
    inner: f64,
    outer: f64,
    out: &mut [f64],
) {
    let d = out.len() as i32;
    let q = (inner / outer).powi(d);
    let u: f64 = rng.gen();
    let rho = outer * (q + u * (1.0 - q)).powf(1.0 / d as f64);
    fill_sphere(rng, center, rho.clamp(inner, outer), out);
}

fn sample_with(
    b: &BallSpec,
    count: usize,
    seed: u64,
    fill: fn(&mut ChaCha8Rng, &[f64], f64, &mut [f64]),
) -> Vec<Point> {
    let c = b.center().coords();
    map_chunks(count, seed, |rng, range| {
        range
            .map(|_| {
                let mut x = vec![0.0; c.len()];
                fill(rng, c, b.radius(), &mut x);
                Point::from_raw(x)
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Independent uniform points of the open ball.
pub fn sample_ball(b: &BallSpec, count: usize, seed: u64) -> Vec<Point> {
    sample_with(b, count, seed, fill_ball)
}

/// Independent uniform points of the sphere bounding the ball.
pub fn sample_sphere(b: &BallSpec, count: usize, seed: u64) -> Vec<Point> {
    sample_with(b, count, seed, fill_sphere)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> BallSpec {
        BallSpec::new(Point::origin(n), 1.0).unwrap()
    }

    #[test]
    fn mean_radius_in_the_disk() {
        let pts = sample_ball(&unit(1), 1_000_000, 11);
        let m = pts.iter().map(Point::norm).sum::<f64>() / pts.len() as f64;
        assert!((m - 2.0 / 3.0).abs() < 0.002, "{m}");
        assert!(pts.iter().all(|p| p.norm() < 1.0));
    }

    #[test]
    fn sphere_moments() {
        let pts = sample_sphere(&unit(1), 1_000_000, 12);
        let m = pts.iter().map(|p| p.coords()[0]).sum::<f64>() / pts.len() as f64;
        assert!(m.abs() < 0.002, "{m}");
        assert!(pts.iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
        let pts = sample_sphere(&unit(2), 1_000_000, 13);
        let m2 = pts.iter().map(|p| p.coords()[0].powi(2)).sum::<f64>() / pts.len() as f64;
        assert!((m2 - 0.25).abs() < 0.002, "{m2}");
    }

    #[test]
    fn same_seed_same_stream() {
        let b = BallSpec::new(Point::new(vec![0.5, -1.0, 2.0, 0.0]).unwrap(), 0.3).unwrap();
        assert_eq!(sample_ball(&b, 10_000, 5), sample_ball(&b, 10_000, 5));
        assert_ne!(sample_ball(&b, 100, 5), sample_ball(&b, 100, 6));
    }

    #[test]
    fn shell_stays_in_shell() {
        let mut rng = crate::rng::stream(1);
        let mut x = [0.0; 4];
        for _ in 0..10_000 {
            fill_shell(&mut rng, &[0.0; 4], 0.25, 0.5, &mut x);
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((0.25 - 1e-15..0.5 + 1e-15).contains(&r));
        }
    }

    /// Chi-square tests on radial and angular histograms; 0.001 critical
    /// values for 19 degrees of freedom.
    #[test]
    fn histograms_are_uniform() {
        const CRIT: f64 = 43.82;
        for n in [1usize, 2] {
            let pts = sample_ball(&unit(n), 1_000_000, 20 + n as u64);
            let d = 2 * n as i32;
            let mut radial = [0u64; 20];
            let mut angular = [0u64; 20];
            for p in &pts {
                // r^d is uniform on [0, 1)
                let u = p.norm().powi(d);
                radial[((u * 20.0) as usize).min(19)] += 1;
                let a = p.coords()[1].atan2(p.coords()[0]);
                let k = (((a + std::f64::consts::PI) / (2.0 * std::f64::consts::PI)) * 20.0) as usize;
                angular[k.min(19)] += 1;
            }
            for h in [radial, angular] {
                let e = pts.len() as f64 / 20.0;
                let chi2: f64 = h.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
                assert!(chi2 < CRIT, "n = {n}: chi2 = {chi2}");
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn samples_land_in_their_ball(
            c in proptest::collection::vec(-5.0f64..5.0, 4),
            r in 1e-6f64..3.0,
            seed: u64,
        ) {
            let b = BallSpec::new(Point::new(c).unwrap(), r).unwrap();
            for p in sample_ball(&b, 200, seed) {
                proptest::prop_assert!(p.distance(b.center()) < r * (1.0 + 1e-12));
            }
            for p in sample_sphere(&b, 200, seed) {
                proptest::prop_assert!((p.distance(b.center()) / r - 1.0).abs() < 1e-9);
            }
        }
    }
}
