use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{sample_sphere, BallSpec, Domain, GeometryError, BOUNDARY_TOL};
use crate::function_model::{ModelError, Point};
use crate::rng::{stream, substream};

const DIRECTIONS: usize = 1000;
const CERTIFICATE_POINTS: usize = 10_000;
const SEARCH_SEED: u64 = 0x5eed_5bee;

/// Outcome of the interior sphere search at one boundary point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SphereVerdict {
    /// A ball inside the domain whose closure touches the boundary point,
    /// verified on a dense sample of its bounding sphere.
    Holds { witness: BallSpec },
    /// No witness found at any radius of the grid, down to `r_min`.
    FailsUpTo { r_min: f64 },
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c /= n);
}

/// Searches, for each radius of a decreasing grid, for a ball of that radius
/// inside `d` that is tangent at `boundary_point`. Stops at the first radius
/// with a verified witness.
pub fn interior_sphere_check(
    d: &Domain,
    boundary_point: &Point,
    radius_grid: &[f64],
) -> Result<SphereVerdict, GeometryError> {
    if boundary_point.dim() != d.dim() {
        return Err(ModelError::DimensionMismatch { expected: d.dim(), found: boundary_point.dim() }.into());
    }
    if radius_grid.is_empty()
        || radius_grid.iter().any(|r| !(r.is_finite() && *r > 0.0))
        || radius_grid.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(GeometryError::BadGrid);
    }
    let p = boundary_point.coords();
    let off = d.boundary_distance(p);
    if off > BOUNDARY_TOL {
        return Err(GeometryError::NotOnBoundary(off));
    }
    let dim = p.len();
    for (k, &r) in radius_grid.iter().enumerate() {
        let margin = |n: &[f64]| -> f64 {
            let c: Vec<f64> = p.iter().zip(n).map(|(a, b)| a + r * b).collect();
            d.signed_distance(&c) - r
        };
        let mut rng = stream(substream(SEARCH_SEED, k as u64));
        let mut best = vec![0.0; dim];
        let mut best_m = f64::NEG_INFINITY;
        let mut dir: Vec<f64> = d.anchor().coords().iter().zip(p).map(|(a, b)| a - b).collect();
        if dir.iter().any(|c| *c != 0.0) {
            normalize(&mut dir);
            best_m = margin(&dir);
            best.copy_from_slice(&dir);
        }
        for _ in 0..DIRECTIONS {
            dir.iter_mut().for_each(|c| *c = StandardNormal.sample(&mut rng));
            normalize(&mut dir);
            let m = margin(&dir);
            if m > best_m {
                best_m = m;
                best.copy_from_slice(&dir);
            }
        }
        let mut theta = 0.2;
        let mut rounds = 0;
        while theta > 1e-12 && best_m < 0.0 && rounds < 400 {
            rounds += 1;
            let mut improved = false;
            for _ in 0..16 {
                for (c, b) in dir.iter_mut().zip(&best) {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    *c = b + theta * g;
                }
                normalize(&mut dir);
                let m = margin(&dir);
                if m > best_m {
                    best_m = m;
                    best.copy_from_slice(&dir);
                    improved = true;
                }
            }
            if !improved {
                theta *= 0.5;
            }
        }
        if best_m < -BOUNDARY_TOL {
            continue;
        }
        let center: Vec<f64> = p.iter().zip(&best).map(|(a, b)| a + r * b).collect();
        let witness = BallSpec::new(Point::from_raw(center), r)?;
        let certified = sample_sphere(&witness, CERTIFICATE_POINTS, substream(SEARCH_SEED, 1000 + k as u64))
            .iter()
            .all(|q| d.signed_distance(q.coords()) >= -BOUNDARY_TOL);
        if certified {
            return Ok(SphereVerdict::Holds { witness });
        }
    }
    Ok(SphereVerdict::FailsUpTo { r_min: *radius_grid.last().expect("nonempty grid") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_sphere;

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ball_has_concentric_witness() {
        let d = Domain::ball(Point::origin(1), 1.0).unwrap();
        match interior_sphere_check(&d, &pt(&[1.0, 0.0]), &[0.5]).unwrap() {
            SphereVerdict::Holds { witness } => {
                assert!(witness.center().distance(&pt(&[0.5, 0.0])) < 1e-4, "{:?}", witness);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn cusp_tip_fails() {
        let d = Domain::cusp(2.0).unwrap();
        let grid = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        assert_eq!(
            interior_sphere_check(&d, &Cusp::tip(), &grid).unwrap(),
            SphereVerdict::FailsUpTo { r_min: 1e-6 }
        );
    }

    #[test]
    fn polydisk_witness() {
        let d = Domain::polydisk(Point::origin(2), vec![1.0, 1.0]).unwrap();
        match interior_sphere_check(&d, &pt(&[1.0, 0.0, 0.0, 0.0]), &[0.3]).unwrap() {
            SphereVerdict::Holds { witness } => {
                assert!(witness.center().distance(&pt(&[0.7, 0.0, 0.0, 0.0])) < 1e-3);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn rejects_interior_points() {
        let d = Domain::ball(Point::origin(1), 1.0).unwrap();
        assert!(matches!(
            interior_sphere_check(&d, &pt(&[0.5, 0.0]), &[0.1]),
            Err(GeometryError::NotOnBoundary(_))
        ));
        assert!(matches!(interior_sphere_check(&d, &pt(&[1.0, 0.0]), &[0.1, 0.2]), Err(GeometryError::BadGrid)));
    }

    #[test]
    fn ball_holds_at_random_boundary_points() {
        let b = BallSpec::new(Point::origin(2), 1.0).unwrap();
        let d = Domain::Ball(b.clone());
        for (i, p) in sample_sphere(&b, 100, 77).iter().enumerate() {
            let r = 0.05 + 0.9 * (i as f64 / 100.0);
            assert!(
                matches!(interior_sphere_check(&d, p, &[r]).unwrap(), SphereVerdict::Holds { .. }),
                "{p} r={r}"
            );
        }
    }

    use super::super::Cusp;
}
