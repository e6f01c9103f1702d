//! Every default budget and tolerance of the harness. Bump [`VERSION`]
//! whenever a value changes so that reports stay comparable.

pub const VERSION: u32 = 1;

pub const SEED: u64 = 1;

/// Lelong radius grid `r0 q^k`, `k < count`.
pub const GRID_R0: f64 = 0.1;
pub const GRID_RATIO: f64 = 0.316_227_766_016_837_94; // 10^{-1/2}
pub const GRID_COUNT: usize = 9;
/// Samples per radius and estimator.
pub const LELONG_BUDGET: usize = 100_000;
/// Centers scanned by the uniform Lelong number, BMO norm and VMO profile.
pub const CENTER_BUDGET: usize = 16;

/// Samples for ball and sphere means and suprema.
pub const MEAN_BUDGET: usize = 100_000;
/// Samples per ball in BMO scans and VMO profiles.
pub const PROFILE_BUDGET: usize = 20_000;
pub const PROFILE_RADII: [f64; 7] = [1e-1, 3.162_277_660_168_38e-2, 1e-2, 3.162_277_660_168_379_5e-3, 1e-3, 3.162_277_660_168_379_5e-4, 1e-4];
pub const HARNACK_PROBES: usize = 100;
/// Radii of the interior sphere search, down to `1e-6`.
pub const SPHERE_RADII: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

pub const IOTA_WINDOW: [f64; 2] = [0.05, 4.0];
pub const IOTA_TOL: f64 = 0.05;
pub const IOTA_LEVELS: usize = 400;
pub const IOTA_BUDGET: usize = 10_000;
/// Lelong budget inside the Skoda report.
pub const SKODA_LELONG_BUDGET: usize = 20_000;

pub const JN_BUDGET: usize = 1_000_000;
pub const JN_STEPS: usize = 60;

pub const SOBOLEV_BUDGET: usize = 100_000;
pub const SOBOLEV_LEVELS: usize = 40;

/// Relative tolerance of `expect` and of the three-formula agreement.
pub const RELATIVE_TOLERANCE: f64 = 0.05;
/// Agreement required between the closed and numeric `κ`.
pub const KAPPA_TOLERANCE: f64 = 1e-10;

/// Ball radius when neither the config nor a catalog entry gives one.
pub const RADIUS: f64 = 0.5;
