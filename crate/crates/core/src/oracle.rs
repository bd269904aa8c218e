//! Finite-difference reference solver for the spinning-disk equilibrium
//! equation in displacement form.
//!
//! With the plane-stress closure `σ_r = C(u' + νu/r)`, `σ_θ = C(u/r + νu')`,
//! `C = E/(1−ν²)`, the equilibrium `d(rσ_r)/dr − σ_θ + ρω²r² = 0` becomes
//!
//! ```text
//! u'' + u'/r − u/r² = −ρω²r / C
//! ```
//!
//! solved on a uniform grid with central differences. Stress boundary rows
//! use the second-order one-sided derivative that stress recovery also uses,
//! so the imposed `σ_r = −p` is reproduced exactly at the ends. Solid disks
//! start at `r = ε` with the regularity condition `u(ε) = ε·u'(ε)`.
//!
//! Nothing here calls the closed-form solutions; they are only compared
//! against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AnnulusGeometry, LoadCase, Material, ProfileSample, RadialProfile, StressState};
use crate::numeric::solve_tridiagonal;
use crate::pressfit::RingSpec;

pub const MIN_NODES: usize = 16;
/// Upper limit on the solid-disk start radius, as a fraction of `b`.
pub const MAX_SOLID_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub node_count: usize,
    /// Start radius for solid disks, as a fraction of the outer radius.
    pub solid_epsilon: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            node_count: 2000,
            solid_epsilon: 1e-8,
        }
    }
}

impl OracleConfig {
    pub fn with_nodes(node_count: usize) -> Self {
        Self {
            node_count,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.node_count < MIN_NODES {
            return Err(Error::TooFewSamples {
                min: MIN_NODES,
                got: self.node_count,
            });
        }
        if !(self.solid_epsilon > 0.0 && self.solid_epsilon <= MAX_SOLID_EPSILON) {
            return Err(Error::OutOfRange(format!(
                "solid epsilon must lie in (0, {MAX_SOLID_EPSILON}], got {}",
                self.solid_epsilon
            )));
        }
        Ok(())
    }
}

/// Solves for `u(r)` and recovers stresses on the grid.
pub fn solve_radial_ode(
    material: &Material,
    geometry: &AnnulusGeometry,
    load: &LoadCase,
    config: &OracleConfig,
) -> Result<RadialProfile> {
    config.validate()?;
    let solid = geometry.is_solid();
    if solid && load.inner_pressure() != 0.0 {
        return Err(Error::SolidDiskRequired);
    }
    let n = config.node_count;
    let b = geometry.outer_radius();
    let lo = if solid { config.solid_epsilon * b } else { geometry.inner_radius() };
    let h = (b - lo) / (n - 1) as f64;
    let r: Vec<f64> = (0..n).map(|i| if i == n - 1 { b } else { lo + h * i as f64 }).collect();

    let nu = material.poisson_ratio();
    let c = material.elastic_modulus() / (1.0 - nu * nu);
    let body = material.density() * load.angular_speed().powi(2) / c;

    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 1..n - 1 {
        let ri = r[i];
        lower[i] = 1.0 - h / (2.0 * ri);
        diag[i] = -2.0 - h * h / (ri * ri);
        upper[i] = 1.0 + h / (2.0 * ri);
        rhs[i] = -body * ri * h * h;
    }

    // First row: coefficients on u0, u1, u2.
    let (mut c0, mut c1, mut c2, mut r0) = if solid {
        let k = r[0] / h;
        (2.0 + 3.0 * k, -4.0 * k, k, 0.0)
    } else {
        (-3.0 + 2.0 * h * nu / r[0], 4.0, -1.0, -2.0 * h * load.inner_pressure() / c)
    };
    // Eliminate u2 with the first interior row to stay tridiagonal.
    let f = c2 / upper[1];
    c0 -= f * lower[1];
    c1 -= f * diag[1];
    c2 = 0.0;
    r0 -= f * rhs[1];
    debug_assert_eq!(c2, 0.0);
    diag[0] = c0;
    upper[0] = c1;
    rhs[0] = r0;

    // Last row: coefficients on u_{n-3}, u_{n-2}, u_{n-1}.
    let mut d3 = 1.0;
    let mut d2 = -4.0;
    let mut d1 = 3.0 + 2.0 * h * nu / r[n - 1];
    let mut rl = -2.0 * h * load.outer_pressure() / c;
    let f = d3 / lower[n - 2];
    d2 -= f * diag[n - 2];
    d1 -= f * upper[n - 2];
    rl -= f * rhs[n - 2];
    d3 = 0.0;
    debug_assert_eq!(d3, 0.0);
    lower[n - 1] = d2;
    diag[n - 1] = d1;
    rhs[n - 1] = rl;

    let u = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;

    let samples = (0..n)
        .map(|i| {
            let du = if i == 0 {
                (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h)
            } else {
                (u[i + 1] - u[i - 1]) / (2.0 * h)
            };
            let ur = u[i] / r[i];
            ProfileSample {
                stress: StressState::new(r[i], c * (du + nu * ur), c * (ur + nu * du)),
                displacement: u[i],
            }
        })
        .collect();
    RadialProfile::new(samples)
}

/// Discrete equilibrium residual `d(rσ_r)/dr − σ_θ + ρω²r²` at interior nodes
/// of a profile, by central differences.
pub fn equilibrium_residual(profile: &RadialProfile, density: f64, angular_speed: f64) -> Vec<f64> {
    let s = profile.samples();
    (1..s.len() - 1)
        .map(|i| {
            let (l, m, r) = (&s[i - 1].stress, &s[i].stress, &s[i + 1].stress);
            let d = (r.radius * r.radial - l.radius * l.radial) / (r.radius - l.radius);
            d - m.hoop + density * angular_speed.powi(2) * m.radius * m.radius
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileComparison {
    /// Largest of the three per-field errors.
    pub max_rel_error: f64,
    pub radial: f64,
    pub hoop: f64,
    pub displacement: f64,
}

fn interpolate(profile: &RadialProfile, r: f64) -> ProfileSample {
    let s = profile.samples();
    let k = s.partition_point(|p| p.radius() < r).clamp(1, s.len() - 1);
    let (a, b) = (&s[k - 1], &s[k]);
    let w = ((r - a.radius()) / (b.radius() - a.radius())).clamp(0.0, 1.0);
    let lerp = |x: f64, y: f64| x + w * (y - x);
    ProfileSample {
        stress: StressState::new(r, lerp(a.stress.radial, b.stress.radial), lerp(a.stress.hoop, b.stress.hoop)),
        displacement: lerp(a.displacement, b.displacement),
    }
}

/// Max error per field, each normalised by the largest magnitude of that
/// field in either profile. Profiles on different grids are compared at the
/// coarser grid's radii, interpolating the finer one linearly.
pub fn compare_profiles(analytic: &RadialProfile, numeric: &RadialProfile) -> Result<ProfileComparison> {
    let (a0, a1) = (analytic.first().radius(), analytic.last().radius());
    let (n0, n1) = (numeric.first().radius(), numeric.last().radius());
    let span = (a1 - a0).abs().max((n1 - n0).abs());
    if (a0 - n0).abs() > 1e-6 * span || (a1 - n1).abs() > 1e-6 * span {
        return Err(Error::DomainMismatch(a0, a1, n0, n1));
    }
    let same_grid = analytic.len() == numeric.len()
        && analytic
            .samples()
            .iter()
            .zip(numeric.samples())
            .all(|(x, y)| (x.radius() - y.radius()).abs() <= 1e-9 * span);
    let pairs: Vec<(ProfileSample, ProfileSample)> = if same_grid {
        analytic.samples().iter().copied().zip(numeric.samples().iter().copied()).collect()
    } else if analytic.len() <= numeric.len() {
        analytic.samples().iter().map(|s| (*s, interpolate(numeric, s.radius()))).collect()
    } else {
        numeric.samples().iter().map(|s| (interpolate(analytic, s.radius()), *s)).collect()
    };

    let field_error = |get: fn(&ProfileSample) -> f64| {
        let norm = pairs.iter().fold(0.0f64, |m, (x, y)| m.max(get(x).abs()).max(get(y).abs()));
        if norm == 0.0 {
            return 0.0;
        }
        pairs.iter().fold(0.0f64, |m, (x, y)| m.max((get(x) - get(y)).abs())) / norm
    };
    let radial = field_error(|s| s.stress.radial);
    let hoop = field_error(|s| s.stress.hoop);
    let displacement = field_error(|s| s.displacement);
    Ok(ProfileComparison {
        max_rel_error: radial.max(hoop).max(displacement),
        radial,
        hoop,
        displacement,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub node_counts: Vec<usize>,
    pub errors: Vec<f64>,
    /// Observed order between successive levels.
    pub orders: Vec<f64>,
    /// Order between the two finest levels.
    pub order: f64,
}

/// Solves at `n`, `2n−1` and `4n−3` nodes (spacing halved each time) and
/// measures the error against `reference`, a function giving the exact
/// profile at the requested radii.
pub fn refinement_study<F>(
    material: &Material,
    geometry: &AnnulusGeometry,
    load: &LoadCase,
    coarse_nodes: usize,
    reference: F,
) -> Result<ConvergenceStudy>
where
    F: Fn(&[f64]) -> Result<RadialProfile>,
{
    let node_counts = vec![coarse_nodes, 2 * coarse_nodes - 1, 4 * coarse_nodes - 3];
    let mut errors = Vec::with_capacity(3);
    for &n in &node_counts {
        let numeric = solve_radial_ode(material, geometry, load, &OracleConfig::with_nodes(n))?;
        let exact = reference(&numeric.radii())?;
        errors.push(compare_profiles(&exact, &numeric)?.max_rel_error);
    }
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    if errors[2] > errors[1] && errors[1] > 1e-12 {
        return Err(Error::NonConvergent(format!("errors {errors:?} grow under refinement")));
    }
    Ok(ConvergenceStudy {
        order: orders[1],
        orders,
        node_counts,
        errors,
    })
}

/// Interface pressure of a shaft/ring pair at `angular_speed`, from two
/// finite-difference solves per body and a scalar compatibility equation.
pub fn two_body_interface_pressure(
    inner: &RingSpec,
    outer: &RingSpec,
    angular_speed: f64,
    config: &OracleConfig,
) -> Result<f64> {
    if (inner.outer_radius - outer.inner_radius).abs() > 1e-9 * outer.outer_radius {
        return Err(Error::NonNestedRings("oracle bodies do not share an interface".into()));
    }
    const UNIT: f64 = 1e6;
    let gi = AnnulusGeometry::new(inner.inner_radius, inner.outer_radius, 1.0)?;
    let go = AnnulusGeometry::new(outer.inner_radius, outer.outer_radius, 1.0)?;
    let spin = LoadCase::rotation(angular_speed)?;
    let edge = |p: &RadialProfile, inner_edge: bool| {
        if inner_edge {
            p.first().displacement
        } else {
            p.last().displacement
        }
    };
    let ui_w = edge(&solve_radial_ode(&inner.material, &gi, &spin, config)?, false);
    let ui_p = edge(&solve_radial_ode(&inner.material, &gi, &LoadCase::new(0.0, 0.0, UNIT)?, config)?, false) / UNIT;
    let uo_w = edge(&solve_radial_ode(&outer.material, &go, &spin, config)?, true);
    let uo_p = edge(&solve_radial_ode(&outer.material, &go, &LoadCase::new(0.0, UNIT, 0.0)?, config)?, true) / UNIT;
    let p = (outer.interference - uo_w + ui_w) / (uo_p - ui_p);
    Ok(p.max(0.0))
}
