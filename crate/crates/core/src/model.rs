//! Shared domain types: materials, disk geometry, load cases and sampled
//! radial stress profiles.
//!
//! Everything is stored in SI units (Pa, m, kg, rad/s). Conversions to Wh,
//! kWh and rpm live at the presentation edge.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Joules per watt-hour.
pub const JOULES_PER_WH: f64 = 3600.0;

/// Raw material fields, as read from a config file or built in code.
///
/// `tensile_strength` defaults to the yield strength and `safety_factor`
/// to 1.0 when omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub name: String,
    /// kg/m³
    pub density: f64,
    pub poisson_ratio: f64,
    /// Pa
    pub elastic_modulus: f64,
    /// Pa
    pub yield_strength: f64,
    /// Pa
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensile_strength: Option<f64>,
    /// $/kg
    pub cost_per_kg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safety_factor: Option<f64>,
}

impl MaterialSpec {
    /// Heat-treated AISI 4340. Density, strength and cost from the usual
    /// rotor-material comparison; ν and E are handbook values.
    pub fn steel_4340() -> Self {
        Self {
            name: "steel-4340".into(),
            density: 7700.0,
            poisson_ratio: 0.3,
            elastic_modulus: 200e9,
            yield_strength: 1520e6,
            tensile_strength: None,
            cost_per_kg: 1.0,
            safety_factor: None,
        }
    }
}

/// A validated isotropic linear-elastic material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaterialSpec", into = "MaterialSpec")]
pub struct Material {
    name: String,
    density: f64,
    poisson_ratio: f64,
    elastic_modulus: f64,
    yield_strength: f64,
    tensile_strength: f64,
    cost_per_kg: f64,
    safety_factor: f64,
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

impl Material {
    pub fn new(spec: MaterialSpec) -> Result<Self> {
        if !positive(spec.density) {
            return Err(Error::NonPositiveDensity(spec.density));
        }
        if !(spec.poisson_ratio > 0.0 && spec.poisson_ratio < 0.5) {
            return Err(Error::PoissonOutOfRange(spec.poisson_ratio));
        }
        if !positive(spec.elastic_modulus) {
            return Err(Error::NonPositiveModulus(spec.elastic_modulus));
        }
        if !positive(spec.yield_strength) {
            return Err(Error::NonPositiveStrength {
                field: "yield_strength",
                value: spec.yield_strength,
            });
        }
        let tensile = spec.tensile_strength.unwrap_or(spec.yield_strength);
        if !positive(tensile) {
            return Err(Error::NonPositiveStrength {
                field: "tensile_strength",
                value: tensile,
            });
        }
        if tensile < spec.yield_strength {
            return Err(Error::TensileBelowYield {
                tensile,
                yield_strength: spec.yield_strength,
            });
        }
        if !positive(spec.cost_per_kg) {
            return Err(Error::NonPositiveCost(spec.cost_per_kg));
        }
        let safety_factor = spec.safety_factor.unwrap_or(1.0);
        if !(safety_factor.is_finite() && safety_factor >= 1.0) {
            return Err(Error::InvalidSafetyFactor(safety_factor));
        }
        Ok(Self {
            name: spec.name,
            density: spec.density,
            poisson_ratio: spec.poisson_ratio,
            elastic_modulus: spec.elastic_modulus,
            yield_strength: spec.yield_strength,
            tensile_strength: tensile,
            cost_per_kg: spec.cost_per_kg,
            safety_factor,
        })
    }

    pub fn steel_4340() -> Self {
        Self::new(MaterialSpec::steel_4340()).expect("preset is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn density(&self) -> f64 {
        self.density
    }
    pub fn poisson_ratio(&self) -> f64 {
        self.poisson_ratio
    }
    pub fn elastic_modulus(&self) -> f64 {
        self.elastic_modulus
    }
    pub fn yield_strength(&self) -> f64 {
        self.yield_strength
    }
    pub fn tensile_strength(&self) -> f64 {
        self.tensile_strength
    }
    pub fn cost_per_kg(&self) -> f64 {
        self.cost_per_kg
    }
    pub fn safety_factor(&self) -> f64 {
        self.safety_factor
    }

    /// Limit stress used by every speed and feasibility check: yield divided
    /// by the safety factor.
    pub fn allowable_stress(&self) -> f64 {
        self.yield_strength / self.safety_factor
    }

    pub fn spec(&self) -> MaterialSpec {
        self.clone().into()
    }
}

impl TryFrom<MaterialSpec> for Material {
    type Error = Error;
    fn try_from(spec: MaterialSpec) -> Result<Self> {
        Material::new(spec)
    }
}

impl From<Material> for MaterialSpec {
    fn from(m: Material) -> Self {
        MaterialSpec {
            name: m.name,
            density: m.density,
            poisson_ratio: m.poisson_ratio,
            elastic_modulus: m.elastic_modulus,
            yield_strength: m.yield_strength,
            tensile_strength: Some(m.tensile_strength),
            cost_per_kg: m.cost_per_kg,
            safety_factor: Some(m.safety_factor),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometrySpec {
    inner_radius: f64,
    outer_radius: f64,
    height: f64,
}

/// Flat disk or annulus of uniform axial height. `inner_radius == 0` is the
/// solid (shaftless) disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometrySpec", into = "GeometrySpec")]
pub struct AnnulusGeometry {
    inner_radius: f64,
    outer_radius: f64,
    height: f64,
}

impl AnnulusGeometry {
    pub fn new(inner_radius: f64, outer_radius: f64, height: f64) -> Result<Self> {
        if !(inner_radius.is_finite() && inner_radius >= 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "inner radius must be >= 0, got {inner_radius}"
            )));
        }
        if !(outer_radius.is_finite() && outer_radius > inner_radius) {
            return Err(Error::InvalidGeometry(format!(
                "outer radius {outer_radius} must exceed inner radius {inner_radius}"
            )));
        }
        if !positive(height) {
            return Err(Error::InvalidGeometry(format!(
                "height must be positive, got {height}"
            )));
        }
        Ok(Self {
            inner_radius,
            outer_radius,
            height,
        })
    }

    pub fn solid(outer_radius: f64, height: f64) -> Result<Self> {
        Self::new(0.0, outer_radius, height)
    }

    /// Builds an annulus from the outer radius and the ratio `t = a/b`.
    pub fn from_ratio(ratio: f64, outer_radius: f64, height: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&ratio) {
            return Err(Error::InvalidGeometry(format!(
                "radius ratio must lie in [0, 1), got {ratio}"
            )));
        }
        Self::new(ratio * outer_radius, outer_radius, height)
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }
    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }
    pub fn height(&self) -> f64 {
        self.height
    }

    /// Inner-to-outer radius ratio `t = a/b`, always in `[0, 1)`.
    pub fn ratio(&self) -> f64 {
        self.inner_radius / self.outer_radius
    }

    pub fn is_solid(&self) -> bool {
        self.inner_radius == 0.0
    }

    pub fn volume(&self) -> f64 {
        PI * (self.outer_radius.powi(2) - self.inner_radius.powi(2)) * self.height
    }
}

impl TryFrom<GeometrySpec> for AnnulusGeometry {
    type Error = Error;
    fn try_from(s: GeometrySpec) -> Result<Self> {
        AnnulusGeometry::new(s.inner_radius, s.outer_radius, s.height)
    }
}

impl From<AnnulusGeometry> for GeometrySpec {
    fn from(g: AnnulusGeometry) -> Self {
        GeometrySpec {
            inner_radius: g.inner_radius,
            outer_radius: g.outer_radius,
            height: g.height,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LoadSpec {
    #[serde(default)]
    angular_speed: f64,
    #[serde(default)]
    inner_pressure: f64,
    #[serde(default)]
    outer_pressure: f64,
}

/// Spin speed plus surface pressures. Positive pressure compresses the
/// loaded surface: the solution satisfies `σ_r(a) = -p_a`, `σ_r(b) = -p_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LoadSpec", into = "LoadSpec")]
pub struct LoadCase {
    angular_speed: f64,
    inner_pressure: f64,
    outer_pressure: f64,
}

impl LoadCase {
    pub fn new(angular_speed: f64, inner_pressure: f64, outer_pressure: f64) -> Result<Self> {
        if !(angular_speed.is_finite() && angular_speed >= 0.0) {
            return Err(Error::InvalidSpeed(angular_speed));
        }
        for (name, p) in [("inner", inner_pressure), ("outer", outer_pressure)] {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::InvalidLoad(format!(
                    "{name} pressure must be >= 0, got {p}"
                )));
            }
        }
        Ok(Self {
            angular_speed,
            inner_pressure,
            outer_pressure,
        })
    }

    pub fn rotation(angular_speed: f64) -> Result<Self> {
        Self::new(angular_speed, 0.0, 0.0)
    }

    pub fn unloaded() -> Self {
        Self {
            angular_speed: 0.0,
            inner_pressure: 0.0,
            outer_pressure: 0.0,
        }
    }

    pub fn angular_speed(&self) -> f64 {
        self.angular_speed
    }
    pub fn inner_pressure(&self) -> f64 {
        self.inner_pressure
    }
    pub fn outer_pressure(&self) -> f64 {
        self.outer_pressure
    }
}

impl TryFrom<LoadSpec> for LoadCase {
    type Error = Error;
    fn try_from(s: LoadSpec) -> Result<Self> {
        LoadCase::new(s.angular_speed, s.inner_pressure, s.outer_pressure)
    }
}

impl From<LoadCase> for LoadSpec {
    fn from(l: LoadCase) -> Self {
        LoadSpec {
            angular_speed: l.angular_speed,
            inner_pressure: l.inner_pressure,
            outer_pressure: l.outer_pressure,
        }
    }
}

/// Plane-stress von Mises equivalent stress.
pub fn von_mises(radial: f64, hoop: f64) -> f64 {
    (radial * radial + hoop * hoop - radial * hoop).max(0.0).sqrt()
}

/// Radial and hoop stress at one radius, with its von Mises equivalent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressState {
    pub radius: f64,
    pub radial: f64,
    pub hoop: f64,
    pub von_mises: f64,
}

impl StressState {
    pub fn new(radius: f64, radial: f64, hoop: f64) -> Self {
        Self {
            radius,
            radial,
            hoop,
            von_mises: von_mises(radial, hoop),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub stress: StressState,
    /// Radial displacement, m.
    pub displacement: f64,
}

impl ProfileSample {
    pub fn radius(&self) -> f64 {
        self.stress.radius
    }
}

/// Stresses and displacement sampled at strictly increasing radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    samples: Vec<ProfileSample>,
}

impl RadialProfile {
    pub fn new(samples: Vec<ProfileSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooFewSamples {
                min: 2,
                got: samples.len(),
            });
        }
        if samples.windows(2).any(|w| !(w[1].radius() > w[0].radius())) {
            return Err(Error::NonMonotoneProfile);
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[ProfileSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(ProfileSample::radius).collect()
    }

    pub fn first(&self) -> &ProfileSample {
        &self.samples[0]
    }

    pub fn last(&self) -> &ProfileSample {
        &self.samples[self.samples.len() - 1]
    }

    /// Largest sampled von Mises stress.
    pub fn peak(&self) -> &ProfileSample {
        self.samples
            .iter()
            .fold(&self.samples[0], |best, s| {
                if s.stress.von_mises > best.stress.von_mises {
                    s
                } else {
                    best
                }
            })
    }

    /// Writes `r, sigma_r, sigma_theta, sigma_v, u` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r_m", "sigma_r_pa", "sigma_theta_pa", "sigma_v_pa", "u_m"])?;
        for s in &self.samples {
            w.write_record(&[
                s.stress.radius.to_string(),
                s.stress.radial.to_string(),
                s.stress.hoop.to_string(),
                s.stress.von_mises.to_string(),
                s.displacement.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn rpm_to_rad_s(rpm: f64) -> Result<f64> {
    if !(rpm.is_finite() && rpm >= 0.0) {
        return Err(Error::InvalidSpeed(rpm));
    }
    Ok(rpm * 2.0 * PI / 60.0)
}

pub fn rad_s_to_rpm(omega: f64) -> Result<f64> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::InvalidSpeed(omega));
    }
    Ok(omega * 60.0 / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn steel_preset_is_valid() {
        let m = Material::steel_4340();
        assert_eq!(m.density(), 7700.0);
        assert_eq!(m.yield_strength(), 1520e6);
        assert_eq!(m.tensile_strength(), m.yield_strength());
        assert_eq!(m.cost_per_kg(), 1.0);
        assert_eq!(m.allowable_stress(), 1520e6);
    }

    #[test]
    fn rejects_bad_poisson_and_density() {
        let mut spec = MaterialSpec::steel_4340();
        spec.poisson_ratio = 0.6;
        assert_eq!(Material::new(spec), Err(Error::PoissonOutOfRange(0.6)));

        let mut spec = MaterialSpec::steel_4340();
        spec.density = 0.0;
        assert_eq!(Material::new(spec), Err(Error::NonPositiveDensity(0.0)));

        let mut spec = MaterialSpec::steel_4340();
        spec.elastic_modulus = -1.0;
        assert!(matches!(Material::new(spec), Err(Error::NonPositiveModulus(_))));

        let mut spec = MaterialSpec::steel_4340();
        spec.tensile_strength = Some(1e6);
        assert!(matches!(
            Material::new(spec),
            Err(Error::TensileBelowYield { .. })
        ));
    }

    #[test]
    fn safety_factor_scales_allowable() {
        let mut spec = MaterialSpec::steel_4340();
        spec.safety_factor = Some(2.0);
        let m = Material::new(spec).unwrap();
        assert_eq!(m.allowable_stress(), 760e6);
    }

    #[test]
    fn material_json_rejects_unknown_keys() {
        let doc = r#"{"name":"x","density":7700,"poisson_ratio":0.3,"elastic_modulus":2e11,
            "yield_strength":1.5e9,"cost_per_kg":1,"colour":"grey"}"#;
        assert!(serde_json::from_str::<Material>(doc).is_err());
        let doc = r#"{"name":"x","density":7700,"poisson_ratio":0.7,"elastic_modulus":2e11,
            "yield_strength":1.5e9,"cost_per_kg":1}"#;
        assert!(serde_json::from_str::<Material>(doc).is_err());
    }

    #[test]
    fn rpm_conversion() {
        assert_eq!(rpm_to_rad_s(0.0).unwrap(), 0.0);
        assert_relative_eq!(rpm_to_rad_s(5623.0).unwrap(), 588.839, epsilon = 1e-3);
        assert_relative_eq!(rpm_to_rad_s(60.0 / (2.0 * PI)).unwrap(), 1.0, epsilon = 1e-15);
        assert!(rpm_to_rad_s(-1.0).is_err());
    }

    #[test]
    fn geometry_validation() {
        assert!(AnnulusGeometry::new(0.5, 0.5, 0.1).is_err());
        assert!(AnnulusGeometry::new(-0.1, 0.5, 0.1).is_err());
        assert!(AnnulusGeometry::new(0.1, 0.5, 0.0).is_err());
        let g = AnnulusGeometry::solid(1.0, 0.2).unwrap();
        assert!(g.is_solid());
        assert_eq!(g.ratio(), 0.0);
    }

    #[test]
    fn profile_requires_increasing_radii() {
        let s = |r: f64| ProfileSample {
            stress: StressState::new(r, 0.0, 0.0),
            displacement: 0.0,
        };
        assert!(RadialProfile::new(vec![s(0.0), s(1.0)]).is_ok());
        assert_eq!(
            RadialProfile::new(vec![s(1.0), s(1.0)]),
            Err(Error::NonMonotoneProfile)
        );
        assert!(RadialProfile::new(vec![s(1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn rpm_round_trip(rpm in 0.0f64..1e6) {
            let back = rad_s_to_rpm(rpm_to_rad_s(rpm).unwrap()).unwrap();
            prop_assert!((back - rpm).abs() <= 1e-12 * rpm.max(1e-300));
        }

        #[test]
        fn geometry_ratio_in_unit_interval(a in 0.0f64..10.0, extra in 1e-6f64..10.0, h in 1e-3f64..1.0) {
            let g = AnnulusGeometry::new(a, a + extra, h).unwrap();
            prop_assert!(g.ratio() >= 0.0 && g.ratio() < 1.0);
        }

        #[test]
        fn material_validation_is_total(
            rho in -10.0f64..1e4, nu in -1.0f64..1.0, e in -1e9f64..3e11,
            sy in -1e6f64..2e9, cost in -1.0f64..100.0,
        ) {
            let spec = MaterialSpec {
                name: "p".into(), density: rho, poisson_ratio: nu, elastic_modulus: e,
                yield_strength: sy, tensile_strength: None, cost_per_kg: cost, safety_factor: None,
            };
            match Material::new(spec) {
                Ok(m) => {
                    prop_assert!(m.density() > 0.0 && m.poisson_ratio() > 0.0 && m.poisson_ratio() < 0.5);
                }
                Err(e) => prop_assert!(e.is_input_error()),
            }
        }
    }
}
