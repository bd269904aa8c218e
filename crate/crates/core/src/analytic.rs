//! Closed-form plane-stress solutions for spinning solid disks and annuli
//! loaded by bore and rim pressure.
//!
//! Every stress is the sum of three independent contributions, each a
//! dimensionless factor times its driving quantity:
//!
//! * inner pressure `p_a` (Lamé bore term),
//! * outer pressure `p_b` (Lamé rim term),
//! * rotation `ρω²b²`.
//!
//! The factors depend only on `t = a/b`, `x = r/b` and `ν`. A solid disk is
//! the `t = 0` case with no bore pressure.

use std::io::Write;
use std::ops::{Add, Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AnnulusGeometry, LoadCase, Material, ProfileSample, RadialProfile, StressState};
use crate::numeric::{linspace, scan_max};

pub use crate::model::von_mises;

/// Points in the dense scan used by [`max_von_mises`].
pub const PEAK_SCAN_POINTS: usize = 1024;
/// Golden-section tolerance for peak refinement, as a fraction of `b`.
pub const PEAK_TOLERANCE: f64 = 1e-9;

/// Radial/hoop stress pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PlaneStress {
    pub radial: f64,
    pub hoop: f64,
}

impl PlaneStress {
    pub fn new(radial: f64, hoop: f64) -> Self {
        Self { radial, hoop }
    }

    pub fn von_mises(&self) -> f64 {
        von_mises(self.radial, self.hoop)
    }
}

impl Add for PlaneStress {
    type Output = PlaneStress;
    fn add(self, o: PlaneStress) -> PlaneStress {
        PlaneStress::new(self.radial + o.radial, self.hoop + o.hoop)
    }
}

impl Mul<f64> for PlaneStress {
    type Output = PlaneStress;
    fn mul(self, k: f64) -> PlaneStress {
        PlaneStress::new(self.radial * k, self.hoop * k)
    }
}

impl Neg for PlaneStress {
    type Output = PlaneStress;
    fn neg(self) -> PlaneStress {
        PlaneStress::new(-self.radial, -self.hoop)
    }
}

/// Stress per unit `ρω²b²` from free rotation.
pub fn rotation_factors(nu: f64, t: f64, x: f64) -> PlaneStress {
    let c = (3.0 + nu) / 8.0;
    let k = (1.0 + 3.0 * nu) / (3.0 + nu);
    let bore = if t == 0.0 { 0.0 } else { t * t / (x * x) };
    PlaneStress::new(
        c * (t * t + 1.0 - x * x - bore),
        c * (t * t + 1.0 - k * x * x + bore),
    )
}

/// Stress per unit bore pressure.
pub fn inner_pressure_factors(t: f64, x: f64) -> PlaneStress {
    if t == 0.0 {
        return PlaneStress::default();
    }
    let c = t * t / (1.0 - t * t);
    let q = 1.0 / (x * x);
    PlaneStress::new(c * (1.0 - q), c * (1.0 + q))
}

/// Stress per unit rim pressure.
pub fn outer_pressure_factors(t: f64, x: f64) -> PlaneStress {
    let c = -1.0 / (1.0 - t * t);
    let q = if t == 0.0 { 0.0 } else { t * t / (x * x) };
    PlaneStress::new(c * (1.0 - q), c * (1.0 + q))
}

/// The three superposed parts of the stress at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadContributions {
    pub inner_pressure: PlaneStress,
    pub outer_pressure: PlaneStress,
    pub rotation: PlaneStress,
}

impl LoadContributions {
    pub fn total(&self) -> PlaneStress {
        self.inner_pressure + self.outer_pressure + self.rotation
    }
}

/// A disk, its material and its loads, ready for pointwise evaluation.
///
/// Construction validates the combination once; the evaluators then accept
/// any radius in the closed domain (a small round-off overshoot is clamped).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskSolution {
    nu: f64,
    modulus: f64,
    inner: f64,
    outer: f64,
    ratio: f64,
    rotation_scale: f64,
    inner_pressure: f64,
    outer_pressure: f64,
}

impl DiskSolution {
    pub fn new(material: &Material, geometry: &AnnulusGeometry, load: &LoadCase) -> Result<Self> {
        if geometry.is_solid() && load.inner_pressure() != 0.0 {
            return Err(Error::SolidDiskRequired);
        }
        let b = geometry.outer_radius();
        let w = load.angular_speed();
        Ok(Self {
            nu: material.poisson_ratio(),
            modulus: material.elastic_modulus(),
            inner: geometry.inner_radius(),
            outer: b,
            ratio: geometry.ratio(),
            rotation_scale: material.density() * w * w * b * b,
            inner_pressure: load.inner_pressure(),
            outer_pressure: load.outer_pressure(),
        })
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer
    }

    /// `ρω²b²`, the scale of every rotational stress.
    pub fn rotation_scale(&self) -> f64 {
        self.rotation_scale
    }

    pub fn check_radius(&self, r: f64) -> Result<f64> {
        let slack = 1e-12 * self.outer;
        if !(r >= self.inner - slack && r <= self.outer + slack) {
            return Err(Error::RadiusOutOfDomain {
                r,
                lo: self.inner,
                hi: self.outer,
            });
        }
        Ok(r.clamp(self.inner, self.outer))
    }

    pub fn contributions(&self, r: f64) -> LoadContributions {
        let x = r / self.outer;
        let t = self.ratio;
        LoadContributions {
            inner_pressure: inner_pressure_factors(t, x) * self.inner_pressure,
            outer_pressure: outer_pressure_factors(t, x) * self.outer_pressure,
            rotation: rotation_factors(self.nu, t, x) * self.rotation_scale,
        }
    }

    pub fn stress(&self, r: f64) -> StressState {
        let s = self.contributions(r).total();
        StressState::new(r, s.radial, s.hoop)
    }

    /// Plane-stress radial displacement `u = r(σ_θ − νσ_r)/E`.
    pub fn displacement(&self, r: f64) -> f64 {
        let s = self.contributions(r).total();
        displacement_from_stress(self.nu, self.modulus, r, s)
    }

    pub fn sample(&self, r: f64) -> ProfileSample {
        ProfileSample {
            stress: self.stress(r),
            displacement: self.displacement(r),
        }
    }

    /// Global von Mises maximum over `[a, b]`.
    pub fn peak(&self) -> PeakStress {
        self.peak_with(PEAK_SCAN_POINTS)
    }

    /// As [`peak`](Self::peak) with a coarser or finer initial scan.
    pub fn peak_with(&self, scan_points: usize) -> PeakStress {
        let (radius, value) = scan_max(
            |r| self.stress(r).von_mises,
            self.inner,
            self.outer,
            scan_points,
            PEAK_TOLERANCE * self.outer,
        );
        PeakStress { value, radius }
    }
}

pub fn displacement_from_stress(nu: f64, modulus: f64, r: f64, s: PlaneStress) -> f64 {
    r * (s.hoop - nu * s.radial) / modulus
}

/// Rotating solid disk with rim pressure.
pub fn solid_disk_stress(material: &Material, outer_radius: f64, load: &LoadCase, r: f64) -> Result<StressState> {
    if load.inner_pressure() != 0.0 {
        return Err(Error::SolidDiskRequired);
    }
    let geometry = AnnulusGeometry::solid(outer_radius, 1.0)?;
    let disk = DiskSolution::new(material, &geometry, load)?;
    Ok(disk.stress(disk.check_radius(r)?))
}

/// Rotating annulus with bore and rim pressure.
pub fn annulus_stress(material: &Material, geometry: &AnnulusGeometry, load: &LoadCase, r: f64) -> Result<StressState> {
    if geometry.is_solid() {
        return Err(Error::AnnulusRequired);
    }
    let disk = DiskSolution::new(material, geometry, load)?;
    Ok(disk.stress(disk.check_radius(r)?))
}

/// Per-load breakdown at one radius, for solid disks or annuli.
pub fn load_contributions(
    material: &Material,
    geometry: &AnnulusGeometry,
    load: &LoadCase,
    r: f64,
) -> Result<LoadContributions> {
    let disk = DiskSolution::new(material, geometry, load)?;
    Ok(disk.contributions(disk.check_radius(r)?))
}

/// Stress at `r` for either disk type.
pub fn stress_at(material: &Material, geometry: &AnnulusGeometry, load: &LoadCase, r: f64) -> Result<StressState> {
    let disk = DiskSolution::new(material, geometry, load)?;
    Ok(disk.stress(disk.check_radius(r)?))
}

/// Evenly sampled profile over `[a, b]`.
pub fn stress_profile(
    material: &Material,
    geometry: &AnnulusGeometry,
    load: &LoadCase,
    n_samples: usize,
) -> Result<RadialProfile> {
    if n_samples < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            got: n_samples,
        });
    }
    let radii = linspace(geometry.inner_radius(), geometry.outer_radius(), n_samples);
    profile_at(material, geometry, load, &radii)
}

/// Profile evaluated at caller-chosen radii (e.g. an oracle grid).
pub fn profile_at(
    material: &Material,
    geometry: &AnnulusGeometry,
    load: &LoadCase,
    radii: &[f64],
) -> Result<RadialProfile> {
    let disk = DiskSolution::new(material, geometry, load)?;
    let samples = radii
        .iter()
        .map(|&r| disk.check_radius(r).map(|r| disk.sample(r)))
        .collect::<Result<Vec<_>>>()?;
    RadialProfile::new(samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakStress {
    /// Pa
    pub value: f64,
    /// m
    pub radius: f64,
}

/// Maximum von Mises stress and where it occurs, found by search rather
/// than by assuming the bore or the axis.
pub fn max_von_mises(material: &Material, geometry: &AnnulusGeometry, load: &LoadCase) -> Result<PeakStress> {
    Ok(DiskSolution::new(material, geometry, load)?.peak())
}

/// Peak radial stress of a freely spinning annulus: `(3+ν)/8·ρω²(b−a)²` at
/// `r = √(ab)`.
pub fn max_rotational_radial_stress(material: &Material, geometry: &AnnulusGeometry, angular_speed: f64) -> Result<PeakStress> {
    if geometry.is_solid() {
        return Err(Error::AnnulusRequired);
    }
    if !(angular_speed.is_finite() && angular_speed >= 0.0) {
        return Err(Error::InvalidSpeed(angular_speed));
    }
    let (a, b) = (geometry.inner_radius(), geometry.outer_radius());
    let nu = material.poisson_ratio();
    Ok(PeakStress {
        value: (3.0 + nu) / 8.0 * material.density() * angular_speed.powi(2) * (b - a).powi(2),
        radius: (a * b).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContourKind {
    RotationalRadial,
    RotationalHoop,
    InnerPressureRadial,
    InnerPressureHoop,
    OuterPressureRadial,
    OuterPressureHoop,
}

impl ContourKind {
    pub const ALL: [ContourKind; 6] = [
        ContourKind::RotationalRadial,
        ContourKind::RotationalHoop,
        ContourKind::InnerPressureRadial,
        ContourKind::InnerPressureHoop,
        ContourKind::OuterPressureRadial,
        ContourKind::OuterPressureHoop,
    ];

    fn factor(self, nu: f64, t: f64, x: f64) -> f64 {
        match self {
            ContourKind::RotationalRadial => rotation_factors(nu, t, x).radial,
            ContourKind::RotationalHoop => rotation_factors(nu, t, x).hoop,
            ContourKind::InnerPressureRadial => inner_pressure_factors(t, x).radial,
            ContourKind::InnerPressureHoop => inner_pressure_factors(t, x).hoop,
            ContourKind::OuterPressureRadial => outer_pressure_factors(t, x).radial,
            ContourKind::OuterPressureHoop => outer_pressure_factors(t, x).hoop,
        }
    }
}

/// Dimensionless stress factor over (t, ξ) with `ξ = (r−a)/(b−a)`.
/// Rotational kinds are per `ρω²b²`, pressure kinds per unit pressure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourGrid {
    pub kind: ContourKind,
    pub poisson_ratio: f64,
    pub t_axis: Vec<f64>,
    pub r_axis: Vec<f64>,
    /// `values[i][j]` belongs to `t_axis[i]`, `r_axis[j]`.
    pub values: Vec<Vec<f64>>,
}

/// Default grid resolution per axis.
pub const DEFAULT_CONTOUR_POINTS: usize = 101;

/// Uniform axes: `t` at cell centres of (0, 1), `ξ` from 0 to 1 inclusive.
pub fn default_contour_axes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let t = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    (t, linspace(0.0, 1.0, n))
}

pub fn contour_grid(kind: ContourKind, poisson_ratio: f64, t_axis: &[f64], r_axis: &[f64]) -> Result<ContourGrid> {
    if t_axis.is_empty() {
        return Err(Error::EmptyAxis("t"));
    }
    if r_axis.is_empty() {
        return Err(Error::EmptyAxis("r"));
    }
    if !(poisson_ratio > 0.0 && poisson_ratio < 0.5) {
        return Err(Error::PoissonOutOfRange(poisson_ratio));
    }
    if let Some(t) = t_axis.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(Error::OutOfRange(format!("t = {t} must lie in (0, 1)")));
    }
    if let Some(xi) = r_axis.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::OutOfRange(format!("xi = {xi} must lie in [0, 1]")));
    }
    let values = t_axis
        .iter()
        .map(|&t| {
            r_axis
                .iter()
                .map(|&xi| kind.factor(poisson_ratio, t, t + xi * (1.0 - t)))
                .collect()
        })
        .collect();
    Ok(ContourGrid {
        kind,
        poisson_ratio,
        t_axis: t_axis.to_vec(),
        r_axis: r_axis.to_vec(),
        values,
    })
}

impl ContourGrid {
    /// Largest factor along the radius for the `i`-th t value.
    pub fn row_max(&self, i: usize) -> f64 {
        self.values[i].iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest magnitude along the radius for the `i`-th t value.
    pub fn row_max_abs(&self, i: usize) -> f64 {
        self.values[i].iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Header row is the ξ axis, first column the t axis.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t\\xi".to_string()];
        header.extend(self.r_axis.iter().map(|x| x.to_string()));
        w.write_record(&header)?;
        for (t, row) in self.t_axis.iter().zip(&self.values) {
            let mut rec = vec![t.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
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

    fn steel_nu(nu: f64) -> Material {
        Material::new(MaterialSpec {
            poisson_ratio: nu,
            ..MaterialSpec::steel_4340()
        })
        .unwrap()
    }

    fn annulus(a: f64, b: f64) -> AnnulusGeometry {
        AnnulusGeometry::new(a, b, 0.1).unwrap()
    }

    #[test]
    fn von_mises_examples() {
        assert_eq!(von_mises(0.0, 0.0), 0.0);
        assert_relative_eq!(von_mises(7.5e8, 7.5e8), 7.5e8, max_relative = 1e-15);
        // sqrt(100² + 50² + 100·50) = sqrt(17500)
        assert_relative_eq!(von_mises(100e6, -50e6), 132.2876e6, max_relative = 1e-6);
    }

    #[test]
    fn solid_disk_examples() {
        let m = steel();
        let none = LoadCase::unloaded();
        let s = solid_disk_stress(&m, 1.0, &none, 0.4).unwrap();
        assert_eq!((s.radial, s.hoop), (0.0, 0.0));

        let spin = LoadCase::rotation(300.0).unwrap();
        assert!(solid_disk_stress(&m, 1.0, &spin, 1.0).unwrap().radial.abs() < 1e-6);

        let w = 588.83;
        let spin = LoadCase::rotation(w).unwrap();
        let c = solid_disk_stress(&m, 1.0, &spin, 0.0).unwrap();
        let expected = 3.3 / 8.0 * 7700.0 * w * w;
        assert_relative_eq!(c.radial, expected, max_relative = 1e-14);
        assert_relative_eq!(c.hoop, expected, max_relative = 1e-14);
        assert_relative_eq!(c.von_mises, expected, max_relative = 1e-14);
        assert_relative_eq!(expected, 1.1013e9, max_relative = 1e-3);

        assert!(matches!(
            solid_disk_stress(&m, 1.0, &spin, 1.2),
            Err(Error::RadiusOutOfDomain { .. })
        ));
        let bore = LoadCase::new(0.0, 1e6, 0.0).unwrap();
        assert_eq!(solid_disk_stress(&m, 1.0, &bore, 0.1), Err(Error::SolidDiskRequired));
    }

    #[test]
    fn solid_disk_centre_with_rim_pressure() {
        let m = steel();
        let load = LoadCase::new(400.0, 0.0, 30e6).unwrap();
        let c = solid_disk_stress(&m, 0.8, &load, 0.0).unwrap();
        let expected = -30e6 + 3.3 / 8.0 * 7700.0 * 400.0f64.powi(2) * 0.64;
        assert_relative_eq!(c.radial, expected, max_relative = 1e-14);
        assert_relative_eq!(c.hoop, expected, max_relative = 1e-14);
    }

    #[test]
    fn annulus_examples() {
        let m = steel();
        let g = annulus(0.2, 1.0);
        let spin = LoadCase::rotation(400.0).unwrap();
        let s = annulus_stress(&m, &g, &spin, 0.2).unwrap();
        assert!(s.radial.abs() < 1e-6);
        let t2 = 0.04;
        let closed = 3.3 / 4.0 * 7700.0 * 160000.0 * (1.0 + t2 * 0.7 / 3.3);
        assert_relative_eq!(s.hoop, closed, max_relative = 1e-13);
        assert_relative_eq!(s.hoop, 1.025e9, max_relative = 1e-3);

        let bore = LoadCase::new(0.0, 50e6, 0.0).unwrap();
        let s = annulus_stress(&m, &g, &bore, 0.2).unwrap();
        assert_relative_eq!(s.radial, -50e6, max_relative = 1e-14);
        assert_relative_eq!(s.hoop, 50e6 * 1.04 / 0.96, max_relative = 1e-14);
        assert_relative_eq!(s.hoop, 54.17e6, max_relative = 1e-4);

        assert_eq!(
            annulus_stress(&m, &AnnulusGeometry::solid(1.0, 0.1).unwrap(), &spin, 0.5),
            Err(Error::AnnulusRequired)
        );
        assert!(annulus_stress(&m, &g, &spin, 0.1).is_err());
    }

    #[test]
    fn profiles() {
        let m = steel();
        let g = annulus(0.3, 1.0);
        let zero = stress_profile(&m, &g, &LoadCase::unloaded(), 11).unwrap();
        assert!(zero
            .samples()
            .iter()
            .all(|s| s.stress.radial == 0.0 && s.stress.hoop == 0.0 && s.displacement == 0.0));

        let spin = LoadCase::rotation(500.0).unwrap();
        let p = stress_profile(&m, &g, &spin, 57).unwrap();
        assert_eq!(p.first().stress, annulus_stress(&m, &g, &spin, 0.3).unwrap());
        assert_eq!(p.last().stress, annulus_stress(&m, &g, &spin, 1.0).unwrap());

        let solid = AnnulusGeometry::solid(1.0, 0.1).unwrap();
        let p = stress_profile(&m, &solid, &spin, 64).unwrap();
        let c = p.first();
        assert_eq!(c.radius(), 0.0);
        assert_eq!(c.displacement, 0.0);
        assert_eq!(c.stress.radial, c.stress.hoop);
        assert!(p.samples().iter().all(|s| s.stress.radial <= c.stress.radial && s.stress.hoop <= c.stress.hoop));

        assert!(matches!(
            stress_profile(&m, &g, &spin, 1),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn peak_locations() {
        let m = steel();
        let spin = LoadCase::rotation(500.0).unwrap();
        let solid = AnnulusGeometry::solid(1.0, 0.1).unwrap();
        let pk = max_von_mises(&m, &solid, &spin).unwrap();
        assert_eq!(pk.radius, 0.0);
        assert_relative_eq!(pk.value, 3.3 / 8.0 * 7700.0 * 250000.0, max_relative = 1e-12);

        let g = annulus(0.04, 1.0);
        let pk = max_von_mises(&m, &g, &spin).unwrap();
        assert_eq!(pk.radius, 0.04);
        let closed = 3.3 / 4.0 * 7700.0 * 250000.0 * (1.0 + 0.0016 * 0.7 / 3.3);
        assert_relative_eq!(pk.value, closed, max_relative = 1e-6);
    }

    #[test]
    fn rotational_radial_peak() {
        let m = steel();
        let g = annulus(0.25, 1.0);
        let pk = max_rotational_radial_stress(&m, &g, 500.0).unwrap();
        assert_eq!(pk.radius, 0.5);
        assert_relative_eq!(pk.value, 3.3 / 8.0 * 7700.0 * 250000.0 * 0.5625, max_relative = 1e-14);
        assert_relative_eq!(pk.value, 446.7e6, max_relative = 1e-4);

        // dense sampling of the full solution agrees
        let spin = LoadCase::rotation(500.0).unwrap();
        let disk = DiskSolution::new(&m, &g, &spin).unwrap();
        let (r, v) = scan_max(|r| disk.stress(r).radial, 0.25, 1.0, 4096, 1e-12);
        assert!((r - 0.5).abs() < 1e-6);
        assert_relative_eq!(v, pk.value, max_relative = 1e-10);

        let thin = annulus(0.999999, 1.0);
        assert!(max_rotational_radial_stress(&m, &thin, 500.0).unwrap().value < 1.0);
        assert!(max_rotational_radial_stress(&m, &AnnulusGeometry::solid(1.0, 0.1).unwrap(), 1.0).is_err());
    }

    #[test]
    fn contour_examples() {
        let g = contour_grid(ContourKind::InnerPressureHoop, 0.3, &[0.5], &[0.0]).unwrap();
        assert_relative_eq!(g.values[0][0], 1.25 / 0.75, max_relative = 1e-14);

        let g = contour_grid(ContourKind::RotationalHoop, 0.3, &[1e-6], &[0.0]).unwrap();
        assert_relative_eq!(g.values[0][0], 0.825, max_relative = 1e-9);

        let (t, xi) = default_contour_axes(DEFAULT_CONTOUR_POINTS);
        assert_eq!((t.len(), xi.len()), (101, 101));
        let g = contour_grid(ContourKind::InnerPressureRadial, 0.3, &t, &xi).unwrap();
        assert!(g.values.iter().all(|row| (row[0] + 1.0).abs() < 1e-12));
        let g = contour_grid(ContourKind::OuterPressureRadial, 0.3, &t, &xi).unwrap();
        assert!(g.values.iter().all(|row| (row[100] + 1.0).abs() < 1e-12));

        assert_eq!(contour_grid(ContourKind::RotationalHoop, 0.3, &[], &xi), Err(Error::EmptyAxis("t")));
        assert!(contour_grid(ContourKind::RotationalHoop, 0.3, &[1.0], &xi).is_err());
        assert!(contour_grid(ContourKind::RotationalHoop, 0.3, &[0.5], &[1.5]).is_err());
    }

    #[test]
    fn contour_monotone_claims() {
        let (t, xi) = default_contour_axes(DEFAULT_CONTOUR_POINTS);
        let hoop_p = contour_grid(ContourKind::InnerPressureHoop, 0.3, &t, &xi).unwrap();
        let rot_r = contour_grid(ContourKind::RotationalRadial, 0.3, &t, &xi).unwrap();
        let rot_h = contour_grid(ContourKind::RotationalHoop, 0.3, &t, &xi).unwrap();
        let outer_h = contour_grid(ContourKind::OuterPressureHoop, 0.3, &t, &xi).unwrap();
        for i in 1..t.len() {
            assert!(hoop_p.row_max(i) >= hoop_p.row_max(i - 1));
            assert!(outer_h.row_max_abs(i) >= outer_h.row_max_abs(i - 1));
            assert!(rot_r.row_max(i) <= rot_r.row_max(i - 1) + 1e-15);
            assert!(rot_h.row_max(i) >= rot_h.row_max(i - 1));
        }
    }

    #[test]
    fn contour_csv_layout() {
        let g = contour_grid(ContourKind::RotationalHoop, 0.3, &[0.25, 0.5], &[0.0, 0.5, 1.0]).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "t\\xi,0,0.5,1");
        assert!(lines[1].starts_with("0.25,"));
    }

    /// d(rσ_r)/dr − σ_θ + s·ρω²r² by central differences.
    fn equilibrium_residual(disk: &DiskSolution, density: f64, w: f64, r: f64, sign: f64) -> f64 {
        let h = 1e-5 * disk.outer_radius();
        let f = |r: f64| r * disk.stress(r).radial;
        (f(r + h) - f(r - h)) / (2.0 * h) - disk.stress(r).hoop + sign * density * w * w * r * r
    }

    #[test]
    fn equilibrium_body_force_sign() {
        // With σ_r, σ_θ from the closed form, only the "+ρω²r²" body-force
        // term balances the equation.
        let m = steel();
        let w = 600.0;
        let g = annulus(0.2, 1.0);
        let disk = DiskSolution::new(&m, &g, &LoadCase::new(w, 20e6, 5e6).unwrap()).unwrap();
        let scale = disk.rotation_scale();
        for r in linspace(0.21, 0.99, 40) {
            assert!(equilibrium_residual(&disk, 7700.0, w, r, 1.0).abs() < 1e-6 * scale);
            assert!(equilibrium_residual(&disk, 7700.0, w, r, -1.0).abs() > 1e-2 * scale);
        }
    }

    proptest! {
        #[test]
        fn boundary_conditions(
            t in 0.02f64..0.98, b in 0.1f64..3.0, w in 0.0f64..900.0,
            pa in 0.0f64..3e8, pb in 0.0f64..3e8, nu in 0.05f64..0.49,
        ) {
            let m = steel_nu(nu);
            let g = AnnulusGeometry::new(t * b, b, 0.1).unwrap();
            let load = LoadCase::new(w, pa, pb).unwrap();
            let disk = DiskSolution::new(&m, &g, &load).unwrap();
            let scale = pa.max(pb).max(disk.rotation_scale()).max(1.0);
            prop_assert!((disk.stress(t * b).radial + pa).abs() <= 1e-12 * scale);
            prop_assert!((disk.stress(b).radial + pb).abs() <= 1e-12 * scale);
        }

        #[test]
        fn superposition(
            t in 0.02f64..0.98, w in 0.0f64..900.0, pa in 0.0f64..3e8,
            pb in 0.0f64..3e8, xi in 0.0f64..=1.0,
        ) {
            let m = steel();
            let g = AnnulusGeometry::new(t, 1.0, 0.1).unwrap();
            let r = t + xi * (1.0 - t);
            let all = annulus_stress(&m, &g, &LoadCase::new(w, pa, pb).unwrap(), r).unwrap();
            let parts = [
                LoadCase::new(w, 0.0, 0.0).unwrap(),
                LoadCase::new(0.0, pa, 0.0).unwrap(),
                LoadCase::new(0.0, 0.0, pb).unwrap(),
            ]
            .map(|l| annulus_stress(&m, &g, &l, r).unwrap());
            let sr: f64 = parts.iter().map(|s| s.radial).sum();
            let st: f64 = parts.iter().map(|s| s.hoop).sum();
            let scale = parts.iter().map(|s| s.radial.abs().max(s.hoop.abs())).fold(1.0, f64::max);
            prop_assert!((all.radial - sr).abs() <= 1e-12 * scale);
            prop_assert!((all.hoop - st).abs() <= 1e-12 * scale);
        }

        #[test]
        fn equilibrium_residual_small(
            t in 0.05f64..0.9, w in 1.0f64..900.0, pa in 0.0f64..2e8, pb in 0.0f64..2e8, xi in 0.02f64..0.98,
        ) {
            let m = steel();
            let g = AnnulusGeometry::new(t, 1.0, 0.1).unwrap();
            let disk = DiskSolution::new(&m, &g, &LoadCase::new(w, pa, pb).unwrap()).unwrap();
            let r = t + xi * (1.0 - t);
            let scale = disk.rotation_scale().max(pa).max(pb);
            prop_assert!(equilibrium_residual(&disk, 7700.0, w, r, 1.0).abs() < 1e-6 * scale);
        }

        #[test]
        fn rotational_scaling(t in 0.05f64..0.9, xi in 0.0f64..=1.0, w in 10.0f64..900.0, b in 0.2f64..2.0) {
            let m = steel();
            let g = AnnulusGeometry::new(t * b, b, 0.1).unwrap();
            let s = annulus_stress(&m, &g, &LoadCase::rotation(w).unwrap(), t * b + xi * (1.0 - t) * b).unwrap();
            let f = rotation_factors(0.3, t, t + xi * (1.0 - t));
            let scale = 7700.0 * w * w * b * b;
            prop_assert!((s.radial / scale - f.radial).abs() < 1e-12);
            prop_assert!((s.hoop / scale - f.hoop).abs() < 1e-12);
        }

        #[test]
        fn pressure_scaling_linear(t in 0.05f64..0.9, xi in 0.0f64..=1.0, p in 1e5f64..1e8, k in 0.1f64..10.0) {
            let m = steel();
            let g = AnnulusGeometry::new(t, 1.0, 0.1).unwrap();
            let r = t + xi * (1.0 - t);
            let s1 = annulus_stress(&m, &g, &LoadCase::new(0.0, p, p).unwrap(), r).unwrap();
            let s2 = annulus_stress(&m, &g, &LoadCase::new(0.0, k * p, k * p).unwrap(), r).unwrap();
            prop_assert!((s2.hoop - k * s1.hoop).abs() <= 1e-12 * k * p * 100.0);
            prop_assert!((s2.radial - k * s1.radial).abs() <= 1e-12 * k * p * 100.0);
        }

        #[test]
        fn inner_pressure_signs(t in 0.01f64..0.99, xi in 0.0f64..=1.0, p in 1e3f64..5e8) {
            let m = steel();
            let g = AnnulusGeometry::new(t, 1.0, 0.1).unwrap();
            let s = annulus_stress(&m, &g, &LoadCase::new(0.0, p, 0.0).unwrap(), t + xi * (1.0 - t)).unwrap();
            prop_assert!(s.radial <= 1e-9 * p);
            prop_assert!(s.hoop >= 0.0);
        }
    }
}
