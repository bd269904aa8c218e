//! Stored energy, stress-limited speed, specific energy and the lift ratios
//! that compare a solid shaftless rotor with bored designs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{rad_s_to_rpm, AnnulusGeometry, Material, JOULES_PER_WH};

/// Operational energy over maximum energy reported for the reference rotor
/// (126 kWh of 148 kWh).
pub const DEFAULT_OPERATING_FRACTION: f64 = 126.0 / 148.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Solid disk, no bore and no shaft.
    Shaftless,
    /// Annulus shrink-fitted onto a shaft.
    #[serde(rename = "type1")]
    TypeI,
    /// Annulus with no shaft (shell).
    #[serde(rename = "type2")]
    TypeII,
    /// Concentric press-fitted bodies.
    RingAssembly,
}

/// `½·I·ω²`, J.
pub fn kinetic_energy(moment_of_inertia: f64, angular_speed: f64) -> f64 {
    0.5 * moment_of_inertia * angular_speed * angular_speed
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassProperties {
    /// kg
    pub mass: f64,
    /// kg·m²
    pub moment_of_inertia: f64,
}

/// Uniform-density cylinder or annulus about its axis.
pub fn moment_of_inertia(geometry: &AnnulusGeometry, density: f64) -> MassProperties {
    let (a, b) = (geometry.inner_radius(), geometry.outer_radius());
    let mass = density * PI * (b * b - a * a) * geometry.height();
    MassProperties {
        mass,
        moment_of_inertia: 0.5 * mass * (a * a + b * b),
    }
}

/// Speed at which the centre of a solid disk reaches the allowable stress.
pub fn shaftless_speed_limit(material: &Material, outer_radius: f64) -> f64 {
    let nu = material.poisson_ratio();
    (8.0 * material.allowable_stress() / ((3.0 + nu) * material.density() * outer_radius * outer_radius)).sqrt()
}

/// Ratio of bore hoop stress in a spinning annulus to the centre stress of a
/// solid disk of the same outer radius and speed.
pub fn bore_stress_factor(nu: f64, t: f64) -> f64 {
    (2.0 - 2.0 * nu) / (3.0 + nu) * t * t + 2.0
}

fn check_shrink(material: &Material, topology: Topology, shrink_stress: f64) -> Result<()> {
    if !(shrink_stress.is_finite() && shrink_stress >= 0.0) {
        return Err(Error::OutOfRange(format!("shrink-fit stress must be >= 0, got {shrink_stress}")));
    }
    match topology {
        Topology::Shaftless | Topology::TypeII if shrink_stress != 0.0 => Err(Error::OutOfRange(format!(
            "{topology:?} has no shrink fit; shrink-fit stress must be 0"
        ))),
        Topology::TypeI if shrink_stress >= material.allowable_stress() => Err(Error::InfeasibleShrink {
            shrink: shrink_stress,
            allowable: material.allowable_stress(),
        }),
        Topology::RingAssembly => Err(Error::InvalidProblem(
            "ring assemblies need the assembly solver, not the closed-form limit".into(),
        )),
        _ => Ok(()),
    }
}

/// Highest speed allowed by the material stress limit, rad/s.
///
/// A bored disk reaches the limit at the bore, where hoop stress is
/// `κ/2` times larger than at the centre of a solid disk; any shrink-fit
/// stress `σ_s` is subtracted from the allowable first.
pub fn max_speed(material: &Material, geometry: &AnnulusGeometry, topology: Topology, shrink_stress: f64) -> Result<f64> {
    check_shrink(material, topology, shrink_stress)?;
    let b = geometry.outer_radius();
    let nu = material.poisson_ratio();
    let rho = material.density();
    let limit = material.allowable_stress() - shrink_stress;
    Ok(match topology {
        Topology::Shaftless => shaftless_speed_limit(material, b),
        _ => {
            let kappa = bore_stress_factor(nu, geometry.ratio());
            (8.0 * limit / ((3.0 + nu) * rho * b * b * kappa)).sqrt()
        }
    })
}

/// Specific energy at the stress-limited speed, J/kg. Independent of size.
pub fn specific_energy(material: &Material, topology: Topology, ratio: f64, shrink_stress: f64) -> Result<f64> {
    check_shrink(material, topology, shrink_stress)?;
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::OutOfRange(format!("radius ratio must lie in [0, 1), got {ratio}")));
    }
    let nu = material.poisson_ratio();
    let rho = material.density();
    let sy = material.allowable_stress();
    let t2 = ratio * ratio;
    Ok(match topology {
        Topology::Shaftless => 2.0 * sy / (rho * (3.0 + nu)),
        _ => (t2 + 1.0) * (sy - shrink_stress) / (rho * (3.0 + nu + (1.0 - nu) * t2)),
    })
}

pub fn joules_to_wh(j: f64) -> f64 {
    j / JOULES_PER_WH
}

/// Specific-energy ratio of the shaftless rotor to an annulus on a shaft,
/// where `shrink_ratio` is shrink-fit stress over the material strength.
pub fn lift_ratio_type1(ratio: f64, nu: f64, shrink_ratio: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::OutOfRange(format!("radius ratio must lie in [0, 1), got {ratio}")));
    }
    if !(0.0..1.0).contains(&shrink_ratio) {
        return Err(Error::OutOfRange(format!("shrink stress ratio must lie in [0, 1), got {shrink_ratio}")));
    }
    let t2 = ratio * ratio;
    Ok(2.0 / (1.0 - shrink_ratio) * (1.0 - 2.0 * (1.0 + nu) * t2 / ((3.0 + nu) * (t2 + 1.0))))
}

/// Specific-energy ratio of the shaftless rotor to a shell of the same outer
/// radius. Falls from 2 at `t = 0` to `4/(3+ν)` at `t = 1`.
pub fn lift_ratio_type2(ratio: f64, nu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::OutOfRange(format!("radius ratio must lie in [0, 1], got {ratio}")));
    }
    let t2 = ratio * ratio;
    Ok(2.0 * ((1.0 - nu) / (3.0 + nu) * t2 + 1.0) / (1.0 + t2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialEconomics {
    pub material: String,
    pub shape_factor: f64,
    /// Wh/kg
    pub max_specific_energy: f64,
    /// Wh/$
    pub energy_per_dollar: f64,
}

/// `E/m = K·σ/ρ` with the tensile strength, and what that buys per dollar.
pub fn material_economics(material: &Material, shape_factor: f64) -> Result<MaterialEconomics> {
    if !(shape_factor > 0.0 && shape_factor <= 1.0) {
        return Err(Error::OutOfRange(format!("shape factor must lie in (0, 1], got {shape_factor}")));
    }
    let wh_per_kg = joules_to_wh(shape_factor * material.tensile_strength() / material.density());
    Ok(MaterialEconomics {
        material: material.name().to_string(),
        shape_factor,
        max_specific_energy: wh_per_kg,
        energy_per_dollar: wh_per_kg / material.cost_per_kg(),
    })
}

/// Energy figures of one design at its operating limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyMetrics {
    /// J
    pub kinetic_energy: f64,
    /// kg
    pub mass: f64,
    /// kg·m²
    pub moment_of_inertia: f64,
    /// rad/s
    pub max_speed: f64,
    /// Wh/kg
    pub specific_energy: f64,
    /// kWh/m³
    pub energy_density: f64,
    /// Wh/$
    pub energy_per_dollar: f64,
}

/// Optional values that replace computed ones, e.g. to reproduce a built
/// rotor whose inertia includes features not in the plane-disk model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignOverrides {
    /// rad/s
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angular_speed: Option<f64>,
    /// kg
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    /// kg·m²
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment_of_inertia: Option<f64>,
    /// m³; when absent, energy density uses the material volume mass/ρ
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope_volume: Option<f64>,
}

fn default_operating_fraction() -> f64 {
    DEFAULT_OPERATING_FRACTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    pub topology: Topology,
    pub material: Material,
    pub geometry: AnnulusGeometry,
    /// Pa
    #[serde(default)]
    pub shrink_stress: f64,
    /// Usable fraction of the maximum energy.
    #[serde(default = "default_operating_fraction")]
    pub operating_fraction: f64,
    #[serde(default)]
    pub overrides: DesignOverrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Input,
    Computed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportedValue {
    pub value: f64,
    pub unit: String,
    pub source: Source,
    pub basis: String,
}

impl ReportedValue {
    fn new(value: f64, unit: &str, source: Source, basis: &str) -> Self {
        Self {
            value,
            unit: unit.into(),
            source,
            basis: basis.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeBasis {
    Material,
    Envelope,
}

/// Table-style fields, each with where its number came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecificationTable {
    pub mass: ReportedValue,
    pub moment_of_inertia: ReportedValue,
    pub max_speed: ReportedValue,
    pub tip_speed: ReportedValue,
    pub max_energy: ReportedValue,
    pub operational_energy: ReportedValue,
    pub volume: ReportedValue,
}

/// Presentation units; everything else in the report is SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HumanReadable {
    pub max_speed_rpm: f64,
    pub max_energy_kwh: f64,
    pub operational_energy_kwh: f64,
    pub specific_energy_wh_per_kg: f64,
    pub operational_specific_energy_wh_per_kg: f64,
    pub energy_density_kwh_per_m3: f64,
    pub energy_per_dollar_wh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub topology: Topology,
    pub material: String,
    pub operating_fraction: f64,
    pub volume_basis: VolumeBasis,
    pub metrics: EnergyMetrics,
    pub table: SpecificationTable,
    pub human: HumanReadable,
}

/// Full energy figures for a design at its maximum allowed speed (or an
/// overridden speed).
pub fn design_report(spec: &DesignSpec) -> Result<EnergyReport> {
    if !(0.0..=1.0).contains(&spec.operating_fraction) {
        return Err(Error::OutOfRange(format!(
            "operating fraction must lie in [0, 1], got {}",
            spec.operating_fraction
        )));
    }
    let o = &spec.overrides;
    for (name, v) in [
        ("angular_speed", o.angular_speed),
        ("mass", o.mass),
        ("moment_of_inertia", o.moment_of_inertia),
        ("envelope_volume", o.envelope_volume),
    ] {
        if let Some(v) = v {
            let ok = v.is_finite() && if name == "angular_speed" { v >= 0.0 } else { v > 0.0 };
            if !ok {
                return Err(Error::OutOfRange(format!("override {name} = {v} is not admissible")));
            }
        }
    }
    if spec.topology == Topology::Shaftless && !spec.geometry.is_solid() {
        return Err(Error::InvalidGeometry("a shaftless rotor is a solid disk (inner radius 0)".into()));
    }
    if spec.topology != Topology::Shaftless && spec.geometry.is_solid() {
        return Err(Error::InvalidGeometry(format!("{:?} needs a bore (inner radius > 0)", spec.topology)));
    }

    let material = &spec.material;
    let computed = moment_of_inertia(&spec.geometry, material.density());
    let pick = |v: Option<f64>, fallback: f64| match v {
        Some(x) => (x, Source::Input),
        None => (fallback, Source::Computed),
    };
    let (mass, mass_src) = pick(o.mass, computed.mass);
    let (inertia, inertia_src) = pick(o.moment_of_inertia, computed.moment_of_inertia);
    let (speed, speed_src) = match o.angular_speed {
        Some(w) => (w, Source::Input),
        None => (
            max_speed(material, &spec.geometry, spec.topology, spec.shrink_stress)?,
            Source::Computed,
        ),
    };
    let (volume, basis) = match o.envelope_volume {
        Some(v) => (v, VolumeBasis::Envelope),
        None => (mass / material.density(), VolumeBasis::Material),
    };

    let energy = kinetic_energy(inertia, speed);
    let operational = energy * spec.operating_fraction;
    let wh = joules_to_wh(energy);
    let metrics = EnergyMetrics {
        kinetic_energy: energy,
        mass,
        moment_of_inertia: inertia,
        max_speed: speed,
        specific_energy: wh / mass,
        energy_density: wh / 1000.0 / volume,
        energy_per_dollar: wh / (mass * material.cost_per_kg()),
    };
    let tip = speed * spec.geometry.outer_radius();
    let table = SpecificationTable {
        mass: ReportedValue::new(mass, "kg", mass_src, "ρ·π(b²−a²)·h"),
        moment_of_inertia: ReportedValue::new(inertia, "kg·m²", inertia_src, "½·m·(a²+b²)"),
        max_speed: ReportedValue::new(speed, "rad/s", speed_src, "stress-limited speed at the allowable stress"),
        tip_speed: ReportedValue::new(tip, "m/s", Source::Computed, "ω·b"),
        max_energy: ReportedValue::new(energy, "J", Source::Computed, "½·I·ω²"),
        operational_energy: ReportedValue::new(operational, "J", Source::Computed, "max energy × operating fraction"),
        volume: ReportedValue::new(
            volume,
            "m³",
            if basis == VolumeBasis::Envelope { Source::Input } else { Source::Computed },
            match basis {
                VolumeBasis::Material => "material volume m/ρ",
                VolumeBasis::Envelope => "envelope volume",
            },
        ),
    };
    let human = HumanReadable {
        max_speed_rpm: rad_s_to_rpm(speed)?,
        max_energy_kwh: wh / 1000.0,
        operational_energy_kwh: joules_to_wh(operational) / 1000.0,
        specific_energy_wh_per_kg: metrics.specific_energy,
        operational_specific_energy_wh_per_kg: joules_to_wh(operational) / mass,
        energy_density_kwh_per_m3: metrics.energy_density,
        energy_per_dollar_wh: metrics.energy_per_dollar,
    };
    Ok(EnergyReport {
        topology: spec.topology,
        material: material.name().to_string(),
        operating_fraction: spec.operating_fraction,
        volume_basis: basis,
        metrics,
        table,
        human,
    })
}
