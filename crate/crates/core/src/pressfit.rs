//! Shrink-fit mechanics for concentric bodies.
//!
//! Bodies are nested rings (the innermost may be a solid shaft). Each
//! interface carries a radial interference `δ`; contact pressures follow from
//! plane-stress displacement compatibility,
//! `u_outer(R) − u_inner(R) = δ`, which couples neighbouring interfaces into
//! a tridiagonal system.

use serde::{Deserialize, Serialize};

use crate::analytic::{DiskSolution, PeakStress};
use crate::error::{Error, Result};
use crate::model::{AnnulusGeometry, LoadCase, Material, RadialProfile};
use crate::numeric::{bisect, linspace, solve_tridiagonal};

/// Samples per ring profile in [`assembly_solve`].
pub const DEFAULT_RING_SAMPLES: usize = 201;
/// Upper bound for the separation-speed bracket, rad/s.
pub const DEFAULT_SEPARATION_BOUND: f64 = 1e5;

/// One body of a shrink-fit assembly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub material: Material,
    /// m; 0 for a solid shaft
    pub inner_radius: f64,
    /// m
    pub outer_radius: f64,
    /// Radial interference with the body inside this one, m. Ignored for the
    /// innermost body.
    #[serde(default)]
    pub interference: f64,
}

impl RingSpec {
    pub fn new(material: Material, inner_radius: f64, outer_radius: f64, interference: f64) -> Self {
        Self {
            material,
            inner_radius,
            outer_radius,
            interference,
        }
    }

    fn geometry(&self) -> Result<AnnulusGeometry> {
        // Height does not enter plane-stress results.
        AnnulusGeometry::new(self.inner_radius, self.outer_radius, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssemblyMode {
    /// Interface pressures fixed at their standstill values; rotation stress
    /// added on top.
    #[default]
    Superposition,
    /// Rotation enters the compatibility equations, so fits relax with speed.
    FullCompatibility,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingResult {
    pub inner_pressure: f64,
    pub outer_pressure: f64,
    pub profile: RadialProfile,
    pub peak: PeakStress,
    /// Peak von Mises over the ring's allowable stress.
    pub utilization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblySolution {
    pub mode: AssemblyMode,
    pub angular_speed: f64,
    /// One per interface, innermost first. Never negative.
    pub interface_pressures: Vec<f64>,
    /// Interfaces whose pressure was clamped to zero.
    pub separated: Vec<bool>,
    /// `u_outer − u_inner` at each interface, evaluated at the speed used in
    /// the compatibility equations (0 in superposition mode).
    pub displacement_jumps: Vec<f64>,
    pub rings: Vec<RingResult>,
    pub max_von_mises: f64,
    pub max_ring: usize,
    pub max_radius: f64,
    pub max_utilization: f64,
    pub max_utilization_ring: usize,
}

/// Radial displacement of one body at its inner and outer surface per unit
/// bore pressure, rim pressure and ω².
#[derive(Debug, Clone, Copy)]
struct Compliance {
    inner_by_pin: f64,
    inner_by_pout: f64,
    inner_by_w2: f64,
    outer_by_pin: f64,
    outer_by_pout: f64,
    outer_by_w2: f64,
}

impl Compliance {
    fn of(ring: &RingSpec) -> Result<Self> {
        let g = ring.geometry()?;
        let m = &ring.material;
        let (a, b) = (ring.inner_radius, ring.outer_radius);
        let unit = |load: LoadCase| DiskSolution::new(m, &g, &load);
        let pout = unit(LoadCase::new(0.0, 0.0, 1.0)?)?;
        let w2 = unit(LoadCase::rotation(1.0)?)?;
        let (inner_by_pin, outer_by_pin) = if g.is_solid() {
            (0.0, 0.0)
        } else {
            let pin = unit(LoadCase::new(0.0, 1.0, 0.0)?)?;
            (pin.displacement(a), pin.displacement(b))
        };
        Ok(Self {
            inner_by_pin,
            inner_by_pout: pout.displacement(a),
            inner_by_w2: w2.displacement(a),
            outer_by_pin,
            outer_by_pout: pout.displacement(b),
            outer_by_w2: w2.displacement(b),
        })
    }
}

fn validate(rings: &[RingSpec]) -> Result<()> {
    if rings.is_empty() {
        return Err(Error::NonNestedRings("assembly has no bodies".into()));
    }
    for (i, r) in rings.iter().enumerate() {
        r.geometry()?;
        if i > 0 && r.inner_radius == 0.0 {
            return Err(Error::NonNestedRings(format!("body {i} is solid but not innermost")));
        }
        if !(r.interference.is_finite() && r.interference >= 0.0) {
            return Err(Error::NegativeInterference(r.interference));
        }
    }
    for (i, w) in rings.windows(2).enumerate() {
        let (inner, outer) = (&w[0], &w[1]);
        let tol = 1e-9 * outer.outer_radius;
        if (inner.outer_radius - outer.inner_radius).abs() > tol {
            return Err(Error::NonNestedRings(format!(
                "interface {i}: body {i} ends at {} m but body {} starts at {} m",
                inner.outer_radius,
                i + 1,
                outer.inner_radius
            )));
        }
    }
    Ok(())
}

/// Interface pressures from compatibility at the given speed, with
/// separating interfaces clamped to zero.
fn interface_pressures(rings: &[RingSpec], compliance: &[Compliance], compat_speed: f64) -> Result<(Vec<f64>, Vec<bool>)> {
    let n = rings.len() - 1;
    let w2 = compat_speed * compat_speed;
    let mut separated = vec![false; n];
    loop {
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for j in 0..n {
            if separated[j] {
                diag[j] = 1.0;
                continue;
            }
            let inside = &compliance[j];
            let outside = &compliance[j + 1];
            // Scale rows to O(1) using the interface radius and outer modulus.
            let s = rings[j + 1].material.elastic_modulus() / rings[j].outer_radius;
            diag[j] = s * (outside.inner_by_pin - inside.outer_by_pout);
            if j + 1 < n {
                upper[j] = s * outside.inner_by_pout;
            }
            if j > 0 {
                lower[j] = -s * inside.outer_by_pin;
            }
            rhs[j] = s * (rings[j + 1].interference - (outside.inner_by_w2 - inside.outer_by_w2) * w2);
        }
        let p = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
        let scale = p.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let worst = (0..n)
            .filter(|&j| !separated[j] && p[j] < -1e-12 * scale)
            .min_by(|&i, &k| p[i].total_cmp(&p[k]));
        match worst {
            Some(j) => separated[j] = true,
            None => {
                let p = p.into_iter().map(|v| v.max(0.0)).collect();
                return Ok((p, separated));
            }
        }
    }
}

/// Solves the assembly at speed `angular_speed` with the default profile
/// resolution.
pub fn assembly_solve(rings: &[RingSpec], angular_speed: f64, mode: AssemblyMode) -> Result<AssemblySolution> {
    assembly_solve_with(rings, angular_speed, mode, DEFAULT_RING_SAMPLES)
}

pub fn assembly_solve_with(
    rings: &[RingSpec],
    angular_speed: f64,
    mode: AssemblyMode,
    samples: usize,
) -> Result<AssemblySolution> {
    validate(rings)?;
    if !(angular_speed.is_finite() && angular_speed >= 0.0) {
        return Err(Error::InvalidSpeed(angular_speed));
    }
    let compliance = rings.iter().map(Compliance::of).collect::<Result<Vec<_>>>()?;
    let compat_speed = match mode {
        AssemblyMode::Superposition => 0.0,
        AssemblyMode::FullCompatibility => angular_speed,
    };
    let (pressures, separated) = interface_pressures(rings, &compliance, compat_speed)?;

    let w2 = compat_speed * compat_speed;
    let displacement_jumps = (0..pressures.len())
        .map(|j| {
            let p_prev = if j > 0 { pressures[j - 1] } else { 0.0 };
            let p_next = pressures.get(j + 1).copied().unwrap_or(0.0);
            let inside = &compliance[j];
            let outside = &compliance[j + 1];
            let u_in = inside.outer_by_pin * p_prev + inside.outer_by_pout * pressures[j] + inside.outer_by_w2 * w2;
            let u_out = outside.inner_by_pin * pressures[j] + outside.inner_by_pout * p_next + outside.inner_by_w2 * w2;
            u_out - u_in
        })
        .collect();

    let mut results = Vec::with_capacity(rings.len());
    for (i, ring) in rings.iter().enumerate() {
        let p_in = if i > 0 { pressures[i - 1] } else { 0.0 };
        let p_out = pressures.get(i).copied().unwrap_or(0.0);
        let load = LoadCase::new(angular_speed, p_in, p_out)?;
        let disk = DiskSolution::new(&ring.material, &ring.geometry()?, &load)?;
        let radii = linspace(ring.inner_radius, ring.outer_radius, samples.max(2));
        let profile = RadialProfile::new(radii.iter().map(|&r| disk.sample(r)).collect())?;
        let peak = disk.peak();
        results.push(RingResult {
            inner_pressure: p_in,
            outer_pressure: p_out,
            profile,
            utilization: peak.value / ring.material.allowable_stress(),
            peak,
        });
    }

    let argmax = |key: fn(&RingResult) -> f64| {
        results
            .iter()
            .enumerate()
            .fold(0, |best, (i, r)| if key(r) > key(&results[best]) { i } else { best })
    };
    let max_ring = argmax(|r| r.peak.value);
    let max_utilization_ring = argmax(|r| r.utilization);
    Ok(AssemblySolution {
        mode,
        angular_speed,
        interface_pressures: pressures,
        separated,
        displacement_jumps,
        max_von_mises: results[max_ring].peak.value,
        max_radius: results[max_ring].peak.radius,
        max_ring,
        max_utilization: results[max_utilization_ring].utilization,
        max_utilization_ring,
        rings: results,
    })
}

/// Interface pressures only, innermost first, skipping stress recovery.
pub fn interface_pressures_at(rings: &[RingSpec], angular_speed: f64, mode: AssemblyMode) -> Result<Vec<f64>> {
    validate(rings)?;
    if !(angular_speed.is_finite() && angular_speed >= 0.0) {
        return Err(Error::InvalidSpeed(angular_speed));
    }
    let compliance = rings.iter().map(Compliance::of).collect::<Result<Vec<_>>>()?;
    let compat_speed = match mode {
        AssemblyMode::Superposition => 0.0,
        AssemblyMode::FullCompatibility => angular_speed,
    };
    Ok(interface_pressures(rings, &compliance, compat_speed)?.0)
}

/// Standstill contact pressure between an inner body and the ring shrunk
/// onto it with radial interference `interference`.
pub fn interference_pressure(inner_body: &RingSpec, outer_ring: &RingSpec, interference: f64) -> Result<f64> {
    if !(interference.is_finite() && interference >= 0.0) {
        return Err(Error::NegativeInterference(interference));
    }
    let rings = [
        inner_body.clone(),
        RingSpec {
            interference,
            ..outer_ring.clone()
        },
    ];
    validate(&rings)?;
    let compliance = rings.iter().map(Compliance::of).collect::<Result<Vec<_>>>()?;
    Ok(interface_pressures(&rings, &compliance, 0.0)?.0[0])
}

/// Lowest speed at which each interface pressure drops to zero under full
/// compatibility. `f64::INFINITY` when the interface holds up to `bound`.
pub fn separation_speed(rings: &[RingSpec], bound: f64) -> Result<Vec<f64>> {
    validate(rings)?;
    let compliance = rings.iter().map(Compliance::of).collect::<Result<Vec<_>>>()?;
    let n = rings.len() - 1;
    let open_at = |j: usize, w: f64| -> Result<bool> {
        let (p, sep) = interface_pressures(rings, &compliance, w)?;
        Ok(sep[j] || p[j] <= 0.0)
    };
    let mut speeds = Vec::with_capacity(n);
    for j in 0..n {
        if open_at(j, 0.0)? {
            speeds.push(0.0);
            continue;
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut found = false;
        while hi <= bound {
            if open_at(j, hi)? {
                found = true;
                break;
            }
            lo = hi;
            hi *= 2.0;
        }
        if !found {
            if open_at(j, bound)? {
                hi = bound;
            } else {
                speeds.push(f64::INFINITY);
                continue;
            }
        }
        let mut err = None;
        let (_, hi) = bisect(
            |w| match open_at(j, w) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    true
                }
            },
            lo,
            hi,
            1e-9,
        );
        if let Some(e) = err {
            return Err(e);
        }
        speeds.push(hi);
    }
    Ok(speeds)
}

/// Combined-load maximum against the sum of the single-load maxima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub combined: PeakStress,
    pub rotation_only: PeakStress,
    pub pressure_only: PeakStress,
    /// `combined ≤ rotation_only + pressure_only` within 1e-9 relative.
    pub holds: bool,
    /// `combined / (rotation_only + pressure_only)`, 1 when both vanish.
    pub ratio: f64,
    /// Distance of the combined maximum from the bore, m.
    pub location_drift: f64,
}

/// Relative slack allowed when checking the combined-load bound.
pub const LEMMA_TOLERANCE: f64 = 1e-9;

pub fn lemma_bound(material: &Material, geometry: &AnnulusGeometry, angular_speed: f64, inner_pressure: f64) -> Result<LemmaCheck> {
    if geometry.is_solid() {
        return Err(Error::AnnulusRequired);
    }
    let peak = |w: f64, p: f64| -> Result<PeakStress> {
        Ok(DiskSolution::new(material, geometry, &LoadCase::new(w, p, 0.0)?)?.peak())
    };
    let combined = peak(angular_speed, inner_pressure)?;
    let rotation_only = peak(angular_speed, 0.0)?;
    let pressure_only = peak(0.0, inner_pressure)?;
    let bound = rotation_only.value + pressure_only.value;
    Ok(LemmaCheck {
        combined,
        rotation_only,
        pressure_only,
        holds: combined.value <= bound * (1.0 + LEMMA_TOLERANCE),
        ratio: if bound > 0.0 { combined.value / bound } else { 1.0 },
        location_drift: combined.radius - geometry.inner_radius(),
    })
}

/// Speeds and shrink-fit percentages (`u' = δ/a`) at which the peak stress is
/// sampled for the linear design rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitGrid {
    pub speeds: Vec<f64>,
    pub interference_ratios: Vec<f64>,
}

impl FitGrid {
    /// `n` values uniform in ω² up to `max_speed` and `n` values of `u'` up to
    /// `max_ratio`, both starting at zero.
    pub fn uniform(max_speed: f64, max_ratio: f64, n: usize) -> Self {
        Self {
            speeds: linspace(0.0, max_speed * max_speed, n).into_iter().map(f64::sqrt).collect(),
            interference_ratios: linspace(0.0, max_ratio, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub speed_squared: f64,
    pub interference_ratio: f64,
    pub max_von_mises: f64,
}

/// `σ_m ≈ C1·ω² + C2·u'` for an annulus shrunk onto a solid shaft of the
/// same material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    /// Pa·s²
    pub c1: f64,
    /// Pa per unit interference ratio
    pub c2: f64,
    pub r_squared: f64,
    pub points: Vec<FitPoint>,
}

/// Peak von Mises of the annulus under rotation plus the standstill
/// shrink-fit pressure of a same-material solid shaft.
pub fn shrink_fit_peak(material: &Material, geometry: &AnnulusGeometry, angular_speed: f64, interference_ratio: f64) -> Result<PeakStress> {
    if geometry.is_solid() {
        return Err(Error::AnnulusRequired);
    }
    let a = geometry.inner_radius();
    let shaft = RingSpec::new(material.clone(), 0.0, a, 0.0);
    let ring = RingSpec::new(material.clone(), a, geometry.outer_radius(), 0.0);
    let p = interference_pressure(&shaft, &ring, interference_ratio * a)?;
    Ok(DiskSolution::new(material, geometry, &LoadCase::new(angular_speed, p, 0.0)?)?.peak())
}

/// Fits the linear design rule over `grid` in superposition mode.
///
/// The rotation-only column is exactly quadratic in ω, so `C1` is its
/// least-squares slope against ω². `C2` is then the least-squares slope of
/// the remaining stress against `u'` over the whole grid, and `r_squared`
/// measures how well the resulting plane explains every point.
pub fn fit_linear_coefficients(material: &Material, geometry: &AnnulusGeometry, grid: &FitGrid) -> Result<LinearFit> {
    let mut points = Vec::with_capacity(grid.speeds.len() * grid.interference_ratios.len());
    for &w in &grid.speeds {
        for &u in &grid.interference_ratios {
            points.push(FitPoint {
                speed_squared: w * w,
                interference_ratio: u,
                max_von_mises: shrink_fit_peak(material, geometry, w, u)?.value,
            });
        }
    }
    let (num, den) = points
        .iter()
        .filter(|p| p.interference_ratio == 0.0)
        .fold((0.0, 0.0), |(n, d), p| (n + p.max_von_mises * p.speed_squared, d + p.speed_squared * p.speed_squared));
    if den == 0.0 {
        return Err(Error::DegenerateFit("C1 indeterminate: grid has no rotation-only point with ω > 0".into()));
    }
    let c1 = num / den;
    let (num, den) = points.iter().fold((0.0, 0.0), |(n, d), p| {
        (n + (p.max_von_mises - c1 * p.speed_squared) * p.interference_ratio, d + p.interference_ratio * p.interference_ratio)
    });
    if den == 0.0 {
        return Err(Error::DegenerateFit("C2 indeterminate: grid has no interference variation".into()));
    }
    let c2 = num / den;
    let mean = points.iter().map(|p| p.max_von_mises).sum::<f64>() / points.len() as f64;
    let ss_tot: f64 = points.iter().map(|p| (p.max_von_mises - mean).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.max_von_mises - c1 * p.speed_squared - c2 * p.interference_ratio).powi(2))
        .sum();
    if ss_tot == 0.0 {
        return Err(Error::DegenerateFit("stress is constant over the grid".into()));
    }
    Ok(LinearFit {
        c1,
        c2,
        r_squared: 1.0 - ss_res / ss_tot,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MaterialSpec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn steel() -> Material {
        Material::steel_4340()
    }

    fn shaft_and_disk(delta: f64) -> Vec<RingSpec> {
        vec![RingSpec::new(steel(), 0.0, 0.2, 0.0), RingSpec::new(steel(), 0.2, 1.0, delta)]
    }

    #[test]
    fn interference_pressure_examples() {
        let r = shaft_and_disk(0.0);
        assert_eq!(interference_pressure(&r[0], &r[1], 0.0).unwrap(), 0.0);
        let p = interference_pressure(&r[0], &r[1], 1e-4).unwrap();
        assert_relative_eq!(p, 48e6, max_relative = 1e-12);
        // closed form Eδ(b²−a²)/(2ab²)
        assert_relative_eq!(p, 200e9 * 1e-4 * 0.96 / 0.4, max_relative = 1e-12);

        assert!(matches!(
            interference_pressure(&r[0], &r[1], -1e-5),
            Err(Error::NegativeInterference(_))
        ));
        let gap = RingSpec::new(steel(), 0.25, 1.0, 0.0);
        assert!(matches!(interference_pressure(&r[0], &gap, 1e-4), Err(Error::NonNestedRings(_))));
    }

    #[test]
    fn interference_pressure_large_ring_limit() {
        let a = 0.1;
        let delta = 5e-5;
        let shaft = RingSpec::new(steel(), 0.0, a, 0.0);
        let ring = RingSpec::new(steel(), a, 1e3, 0.0);
        let p = interference_pressure(&shaft, &ring, delta).unwrap();
        assert_relative_eq!(p, 200e9 * delta / (2.0 * a), max_relative = 1e-7);
    }

    #[test]
    fn single_body_matches_solid_disk() {
        let rings = vec![RingSpec::new(steel(), 0.0, 1.0, 0.0)];
        let sol = assembly_solve(&rings, 500.0, AssemblyMode::FullCompatibility).unwrap();
        assert!(sol.interface_pressures.is_empty());
        let solid = AnnulusGeometry::solid(1.0, 1.0).unwrap();
        let expected =
            crate::analytic::stress_profile(&steel(), &solid, &LoadCase::rotation(500.0).unwrap(), DEFAULT_RING_SAMPLES)
                .unwrap();
        assert_eq!(sol.rings[0].profile, expected);
        assert_eq!(sol.max_radius, 0.0);
    }

    #[test]
    fn two_body_standstill_either_mode() {
        for mode in [AssemblyMode::Superposition, AssemblyMode::FullCompatibility] {
            let sol = assembly_solve(&shaft_and_disk(1e-4), 0.0, mode).unwrap();
            assert_relative_eq!(sol.interface_pressures[0], 48e6, max_relative = 1e-12);
            assert!((sol.displacement_jumps[0] - 1e-4).abs() < 1e-9);
            let disk = &sol.rings[1];
            assert_relative_eq!(disk.profile.first().stress.radial, -48e6, max_relative = 1e-12);
            // shaft under uniform external pressure
            let shaft = &sol.rings[0];
            assert!(shaft.profile.samples().iter().all(|s| (s.stress.radial + 48e6).abs() < 1e-3));
        }
    }

    #[test]
    fn superposition_keeps_standstill_pressure() {
        let rings = shaft_and_disk(1e-4);
        let still = assembly_solve(&rings, 0.0, AssemblyMode::Superposition).unwrap();
        let fast = assembly_solve(&rings, 400.0, AssemblyMode::Superposition).unwrap();
        assert_eq!(still.interface_pressures, fast.interface_pressures);
        let expected = crate::analytic::annulus_stress(
            &steel(),
            &AnnulusGeometry::new(0.2, 1.0, 1.0).unwrap(),
            &LoadCase::new(400.0, 48e6, 0.0).unwrap(),
            0.2,
        )
        .unwrap();
        let got = fast.rings[1].profile.first().stress;
        assert_relative_eq!(got.hoop, expected.hoop, max_relative = 1e-12);
    }

    #[test]
    fn full_compatibility_relaxes_then_separates() {
        let rings = shaft_and_disk(1e-4);
        let speeds = linspace(0.0, 900.0, 46);
        let mut last = f64::INFINITY;
        let mut separated_seen = false;
        for w in speeds {
            let sol = assembly_solve(&rings, w, AssemblyMode::FullCompatibility).unwrap();
            let p = sol.interface_pressures[0];
            if sol.separated[0] {
                separated_seen = true;
                assert_eq!(p, 0.0);
            } else {
                assert!(p < last, "pressure must fall with speed");
                assert!((sol.displacement_jumps[0] - 1e-4).abs() < 1e-9);
            }
            last = p;
        }
        assert!(separated_seen);
    }

    #[test]
    fn separation_speed_examples() {
        assert_eq!(separation_speed(&shaft_and_disk(0.0), DEFAULT_SEPARATION_BOUND).unwrap(), vec![0.0]);

        let w1 = separation_speed(&shaft_and_disk(1e-4), DEFAULT_SEPARATION_BOUND).unwrap()[0];
        assert!(w1.is_finite() && w1 > 0.0);
        let w2 = separation_speed(&shaft_and_disk(2e-4), DEFAULT_SEPARATION_BOUND).unwrap()[0];
        assert_relative_eq!(w2 / w1, 2f64.sqrt(), max_relative = 1e-6);

        // independent check: p(ω) = p0 − cω² is exact for one interface
        let p_at = |w: f64| {
            assembly_solve(&shaft_and_disk(1e-4), w, AssemblyMode::FullCompatibility).unwrap().interface_pressures[0]
        };
        let c = (p_at(0.0) - p_at(100.0)) / 1e4;
        assert_relative_eq!(w1, (p_at(0.0) / c).sqrt(), max_relative = 1e-6);

        let never = separation_speed(&shaft_and_disk(1e-4), 10.0).unwrap()[0];
        assert_eq!(never, f64::INFINITY);
    }

    #[test]
    fn three_body_assembly() {
        let alloy = Material::new(MaterialSpec {
            name: "ti".into(),
            density: 4430.0,
            poisson_ratio: 0.34,
            elastic_modulus: 114e9,
            yield_strength: 880e6,
            tensile_strength: Some(950e6),
            cost_per_kg: 30.0,
            safety_factor: None,
        })
        .unwrap();
        let rings = vec![
            RingSpec::new(steel(), 0.0, 0.1, 0.0),
            RingSpec::new(alloy, 0.1, 0.4, 4e-5),
            RingSpec::new(steel(), 0.4, 0.9, 1.2e-4),
        ];
        let sol = assembly_solve(&rings, 0.0, AssemblyMode::Superposition).unwrap();
        assert_eq!(sol.interface_pressures.len(), 2);
        for (j, jump) in sol.displacement_jumps.iter().enumerate() {
            assert!((jump - rings[j + 1].interference).abs() < 1e-9 * 0.9);
            assert!(sol.interface_pressures[j] > 0.0);
        }
        // traction continuity across interfaces
        for j in 0..2 {
            let inside = sol.rings[j].profile.last().stress.radial;
            let outside = sol.rings[j + 1].profile.first().stress.radial;
            assert_relative_eq!(inside, outside, max_relative = 1e-10);
        }
    }

    #[test]
    fn non_nested_rejected() {
        let rings = vec![RingSpec::new(steel(), 0.0, 0.2, 0.0), RingSpec::new(steel(), 0.0, 1.0, 0.0)];
        assert!(matches!(assembly_solve(&rings, 0.0, AssemblyMode::Superposition), Err(Error::NonNestedRings(_))));
        assert!(assembly_solve(&[], 0.0, AssemblyMode::Superposition).is_err());
    }

    #[test]
    fn lemma_examples() {
        let m = steel();
        let g = AnnulusGeometry::new(0.2, 1.0, 0.1).unwrap();
        let only_p = lemma_bound(&m, &g, 0.0, 50e6).unwrap();
        assert_eq!(only_p.combined.value, only_p.pressure_only.value);
        assert_eq!(only_p.ratio, 1.0);
        let only_w = lemma_bound(&m, &g, 400.0, 0.0).unwrap();
        assert_eq!(only_w.combined.value, only_w.rotation_only.value);

        let both = lemma_bound(&m, &g, 400.0, 50e6).unwrap();
        assert!(both.holds);
        let q: f64 = 1.04 / 0.96;
        assert_relative_eq!(both.pressure_only.value, 50e6 * (1.0 + q + q * q).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(both.pressure_only.value, 90.2e6, max_relative = 1e-3);
        assert_relative_eq!(both.rotation_only.value, 1.025e9, max_relative = 1e-3);
        assert_relative_eq!(both.combined.value, 1.105e9, max_relative = 1e-3);
        assert_eq!(both.combined.radius, 0.2);
        assert_eq!(both.location_drift, 0.0);
        assert!(both.ratio > 0.0 && both.ratio < 1.0);
    }

    #[test]
    fn linear_rule_examples() {
        let m = steel();
        let g = AnnulusGeometry::new(0.2, 1.065, 0.225).unwrap();
        let w_max = crate::energy::shaftless_speed_limit(&m, 1.065);
        let fit = fit_linear_coefficients(&m, &g, &FitGrid::uniform(w_max, 1e-3, 10)).unwrap();
        assert!(fit.r_squared >= 0.9999, "r² = {}", fit.r_squared);

        let w = 321.0;
        let single = shrink_fit_peak(&m, &g, w, 0.0).unwrap().value / (w * w);
        assert_relative_eq!(single, fit.c1, max_relative = 1e-6);

        let degenerate = FitGrid {
            speeds: vec![0.0, 100.0, 200.0],
            interference_ratios: vec![0.0],
        };
        assert!(matches!(fit_linear_coefficients(&m, &g, &degenerate), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn superposition_affine_on_axes() {
        let m = steel();
        let g = AnnulusGeometry::new(0.3, 1.0, 0.2).unwrap();
        // exactly quadratic in ω at u' = 0, exactly linear in u' at ω = 0
        let s1 = shrink_fit_peak(&m, &g, 200.0, 0.0).unwrap().value;
        let s2 = shrink_fit_peak(&m, &g, 400.0, 0.0).unwrap().value;
        assert_relative_eq!(s2, 4.0 * s1, max_relative = 1e-12);
        let p1 = shrink_fit_peak(&m, &g, 0.0, 2e-4).unwrap().value;
        let p2 = shrink_fit_peak(&m, &g, 0.0, 6e-4).unwrap().value;
        assert_relative_eq!(p2, 3.0 * p1, max_relative = 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn compatibility_residual(d1 in 0.0f64..3e-4, d2 in 0.0f64..3e-4, c in 0.15f64..0.45, w in 0.0f64..600.0) {
            let rings = vec![
                RingSpec::new(steel(), 0.0, 0.1, 0.0),
                RingSpec::new(steel(), 0.1, c, d1),
                RingSpec::new(steel(), c, 1.0, d2),
            ];
            let sol = assembly_solve_with(&rings, w, AssemblyMode::FullCompatibility, 8).unwrap();
            for j in 0..2 {
                prop_assert!(sol.interface_pressures[j] >= 0.0);
                if !sol.separated[j] {
                    prop_assert!((sol.displacement_jumps[j] - rings[j + 1].interference).abs() <= 1e-9);
                } else {
                    prop_assert!(sol.displacement_jumps[j] >= rings[j + 1].interference - 1e-9);
                }
            }
        }

        #[test]
        fn full_pressure_non_increasing(delta in 1e-6f64..3e-4, w in 0.0f64..800.0, dw in 0.0f64..200.0) {
            let rings = shaft_and_disk(delta);
            let p = |w| assembly_solve_with(&rings, w, AssemblyMode::FullCompatibility, 4).unwrap().interface_pressures[0];
            prop_assert!(p(w + dw) <= p(w) + 1e-9 * p(0.0));
        }

        #[test]
        fn bound_ratio_in_unit_interval(t in 0.05f64..0.95, w in 0.0f64..900.0, pa in 0.0f64..2e8) {
            let g = AnnulusGeometry::new(t, 1.0, 0.1).unwrap();
            let chk = lemma_bound(&steel(), &g, w, pa).unwrap();
            prop_assert!(chk.holds);
            prop_assert!(chk.ratio > 0.0 || (w == 0.0 && pa == 0.0));
            prop_assert!(chk.ratio <= 1.0 + LEMMA_TOLERANCE);
        }
    }
}
