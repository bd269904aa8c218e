//! Self-check suite: closed forms against the finite-difference oracle, the
//! combined-load bound on random annuli, and the press-fit solver against a
//! two-body oracle solve.
//!
//! Every case draws from its own generator seeded from the suite seed and the
//! case index, so results do not depend on thread count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{profile_at, DiskSolution};
use crate::error::Result;
use crate::model::{AnnulusGeometry, LoadCase, Material, MaterialSpec, ProfileSample, RadialProfile, StressState};
use crate::oracle::{compare_profiles, refinement_study, solve_radial_ode, two_body_interface_pressure, OracleConfig, ProfileComparison};
use crate::pressfit::{assembly_solve_with, lemma_bound, AssemblyMode, RingSpec, LEMMA_TOLERANCE};

pub const ORACLE_TOLERANCE: f64 = 5e-3;
pub const ORDER_TARGET: f64 = 2.0;
pub const ORDER_TOLERANCE: f64 = 0.2;
pub const PRESSURE_TOLERANCE: f64 = 5e-3;
/// Bound ratio must reach 1 this closely when one load vanishes.
pub const TIGHTNESS_TOLERANCE: f64 = 1e-9;
const REPORTED_FAILURES: usize = 20;

/// Deliberate faults for checking that the suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Flip the sign of the rotational term of the closed form.
    RotationSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    pub oracle_cases: usize,
    pub oracle_nodes: usize,
    pub refinement_nodes: usize,
    pub lemma_cases: usize,
    pub pressfit_cases: usize,
    #[serde(default)]
    pub mutation: Option<Mutation>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            oracle_cases: 20,
            oracle_nodes: 2000,
            refinement_nodes: 101,
            lemma_cases: 10_000,
            pressfit_cases: 6,
            mutation: None,
        }
    }
}

impl VerifyConfig {
    /// Reduced suite: `cases` bound cases and at most that many oracle cases.
    pub fn quick(cases: usize) -> Self {
        let d = Self::default();
        Self {
            oracle_cases: d.oracle_cases.min(cases),
            pressfit_cases: d.pressfit_cases.min(cases),
            lemma_cases: cases,
            ..d
        }
    }
}

pub fn case_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub failures: usize,
}

/// Where a failing comparison is worst.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDiff {
    pub field: String,
    pub radius: f64,
    pub analytic: f64,
    pub numeric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub index: usize,
    pub seed: u64,
    pub poisson_ratio: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub angular_speed: f64,
    pub inner_pressure: f64,
    pub outer_pressure: f64,
    pub comparison: ProfileComparison,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<FieldDiff>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaCase {
    pub index: usize,
    pub seed: u64,
    pub poisson_ratio: f64,
    pub inner_ratio: f64,
    pub angular_speed: f64,
    pub inner_pressure: f64,
    pub combined: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressfitCase {
    pub index: usize,
    pub angular_speed: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub convergence_errors: Vec<f64>,
    pub convergence_order: f64,
    pub oracle_failures: Vec<OracleCase>,
    pub lemma_failures: Vec<LemmaCase>,
    pub pressfit_cases: Vec<PressfitCase>,
}

fn random_material(rng: &mut ChaCha8Rng) -> Result<Material> {
    Material::new(MaterialSpec {
        name: "random".into(),
        density: rng.gen_range(1500.0..8000.0),
        poisson_ratio: rng.gen_range(0.2..0.35),
        elastic_modulus: rng.gen_range(70e9..220e9),
        yield_strength: 1e9,
        tensile_strength: None,
        cost_per_kg: 1.0,
        safety_factor: None,
    })
}

/// Closed-form profile at `radii`, with an optional fault injected.
fn closed_form(
    material: &Material,
    geometry: &AnnulusGeometry,
    load: &LoadCase,
    radii: &[f64],
    mutation: Option<Mutation>,
) -> Result<RadialProfile> {
    match mutation {
        None => profile_at(material, geometry, load, radii),
        Some(Mutation::RotationSign) => {
            let disk = DiskSolution::new(material, geometry, load)?;
            let nu = material.poisson_ratio();
            let e = material.elastic_modulus();
            let samples = radii
                .iter()
                .map(|&r| {
                    let c = disk.contributions(r);
                    let s = c.inner_pressure + c.outer_pressure + -c.rotation;
                    ProfileSample {
                        stress: StressState::new(r, s.radial, s.hoop),
                        displacement: crate::analytic::displacement_from_stress(nu, e, r, s),
                    }
                })
                .collect();
            RadialProfile::new(samples)
        }
    }
}

fn worst_point(analytic: &RadialProfile, numeric: &RadialProfile) -> FieldDiff {
    let fields: [(&'static str, fn(&ProfileSample) -> f64); 3] = [
        ("sigma_r", |s| s.stress.radial),
        ("sigma_theta", |s| s.stress.hoop),
        ("u", |s| s.displacement),
    ];
    let mut worst = (f64::NEG_INFINITY, FieldDiff {
        field: String::new(),
        radius: 0.0,
        analytic: 0.0,
        numeric: 0.0,
    });
    for (name, get) in fields {
        let norm = analytic
            .samples()
            .iter()
            .chain(numeric.samples())
            .fold(0.0f64, |m, s| m.max(get(s).abs()))
            .max(f64::MIN_POSITIVE);
        for (a, n) in analytic.samples().iter().zip(numeric.samples()) {
            let d = (get(a) - get(n)).abs() / norm;
            if d > worst.0 {
                worst = (d, FieldDiff {
                    field: name.to_string(),
                    radius: a.radius(),
                    analytic: get(a),
                    numeric: get(n),
                });
            }
        }
    }
    worst.1
}

fn oracle_case(config: &VerifyConfig, index: usize) -> Result<OracleCase> {
    let seed = case_seed(config.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let material = random_material(&mut rng)?;
    let b = rng.gen_range(0.2..1.5);
    // every fifth case is a solid disk
    let solid = index % 5 == 4;
    let t = if solid { 0.0 } else { rng.gen_range(0.05..0.9) };
    let geometry = AnnulusGeometry::from_ratio(t, b, 0.1)?;
    let tip = rng.gen_range(0.0..600.0);
    let w = tip / b;
    let pa = if solid { 0.0 } else { rng.gen_range(0.0..200e6) };
    let pb = rng.gen_range(0.0..100e6);
    let load = LoadCase::new(w, pa, pb)?;

    let numeric = solve_radial_ode(&material, &geometry, &load, &OracleConfig::with_nodes(config.oracle_nodes))?;
    let analytic = closed_form(&material, &geometry, &load, &numeric.radii(), config.mutation)?;
    let comparison = compare_profiles(&analytic, &numeric)?;
    let passed = comparison.max_rel_error <= ORACLE_TOLERANCE;
    Ok(OracleCase {
        index,
        seed,
        poisson_ratio: material.poisson_ratio(),
        inner_radius: geometry.inner_radius(),
        outer_radius: b,
        angular_speed: w,
        inner_pressure: pa,
        outer_pressure: pb,
        comparison,
        passed,
        worst: (!passed).then(|| worst_point(&analytic, &numeric)),
    })
}

fn lemma_case(config: &VerifyConfig, index: usize) -> Result<(LemmaCase, bool, Option<bool>)> {
    let seed = case_seed(config.seed ^ 0x1E44A, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let material = random_material(&mut rng)?;
    let b = rng.gen_range(0.1..2.0);
    let t = rng.gen_range(0.02..0.95);
    let geometry = AnnulusGeometry::from_ratio(t, b, 0.1)?;
    let mut w = rng.gen_range(0.0..800.0) / b;
    let mut p = rng.gen_range(0.0..300e6);
    // a slice of the cases switches one load off to probe tightness
    let single = match index % 50 {
        0 => {
            p = 0.0;
            true
        }
        1 => {
            w = 0.0;
            true
        }
        _ => false,
    };
    let check = lemma_bound(&material, &geometry, w, p)?;
    let bound = check.rotation_only.value + check.pressure_only.value;
    let case = LemmaCase {
        index,
        seed,
        poisson_ratio: material.poisson_ratio(),
        inner_ratio: t,
        angular_speed: w,
        inner_pressure: p,
        combined: check.combined.value,
        bound,
        ratio: check.ratio,
    };
    let tight = single.then(|| (check.ratio - 1.0).abs() <= TIGHTNESS_TOLERANCE);
    Ok((case, check.holds, tight))
}

fn pressfit_case(config: &VerifyConfig, index: usize) -> Result<PressfitCase> {
    let oracle = OracleConfig::with_nodes(config.oracle_nodes);
    let (inner, outer, w) = if index == 0 {
        // standstill steel shaft and hub, 0.1 mm interference
        let m = Material::steel_4340();
        (RingSpec::new(m.clone(), 0.0, 0.2, 0.0), RingSpec::new(m, 0.2, 1.0, 1e-4), 0.0)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(case_seed(config.seed ^ 0x9F17, index));
        let m_in = random_material(&mut rng)?;
        let m_out = random_material(&mut rng)?;
        let b = rng.gen_range(0.2..1.5);
        let c = b * rng.gen_range(0.15..0.8);
        let a = if index % 2 == 0 { 0.0 } else { c * rng.gen_range(0.1..0.7) };
        let delta = c * rng.gen_range(2e-4..1.5e-3);
        let w = rng.gen_range(0.0..150.0) / b;
        (RingSpec::new(m_in, a, c, 0.0), RingSpec::new(m_out, c, b, delta), w)
    };
    let closed = assembly_solve_with(&[inner.clone(), outer.clone()], w, AssemblyMode::FullCompatibility, 2)?
        .interface_pressures[0];
    let numeric = two_body_interface_pressure(&inner, &outer, w, &oracle)?;
    let scale = closed.abs().max(numeric.abs()).max(f64::MIN_POSITIVE);
    Ok(PressfitCase {
        index,
        angular_speed: w,
        closed_form: closed,
        oracle: numeric,
        relative_error: (closed - numeric).abs() / scale,
    })
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

/// Runs every check. Verification failures are reported, not returned as
/// errors; errors mean a case could not be run at all.
pub fn run_suite(config: &VerifyConfig) -> Result<VerifyReport> {
    let mut checks = Vec::new();

    let oracle = (0..config.oracle_cases)
        .into_par_iter()
        .map(|i| oracle_case(config, i))
        .collect::<Result<Vec<_>>>()?;
    let failed: Vec<OracleCase> = oracle.iter().filter(|c| !c.passed).cloned().collect();
    checks.push(CheckResult {
        name: "oracle_agreement".into(),
        passed: failed.is_empty(),
        measured: max_of(oracle.iter().map(|c| c.comparison.max_rel_error)),
        tolerance: ORACLE_TOLERANCE,
        cases: oracle.len(),
        failures: failed.len(),
    });

    // fixed mixed-load annulus for the refinement study
    let material = Material::steel_4340();
    let geometry = AnnulusGeometry::new(0.25, 1.0, 0.1)?;
    let load = LoadCase::new(500.0, 60e6, 20e6)?;
    let study = refinement_study(&material, &geometry, &load, config.refinement_nodes, |r| {
        closed_form(&material, &geometry, &load, r, config.mutation)
    });
    let (convergence_errors, order) = match study {
        Ok(s) => (s.errors, s.order),
        Err(_) => (Vec::new(), f64::NAN),
    };
    checks.push(CheckResult {
        name: "convergence_order".into(),
        passed: (order - ORDER_TARGET).abs() <= ORDER_TOLERANCE,
        measured: order,
        tolerance: ORDER_TOLERANCE,
        cases: 1,
        failures: usize::from(!((order - ORDER_TARGET).abs() <= ORDER_TOLERANCE)),
    });

    let lemma = (0..config.lemma_cases)
        .into_par_iter()
        .map(|i| lemma_case(config, i))
        .collect::<Result<Vec<_>>>()?;
    let violations: Vec<LemmaCase> = lemma.iter().filter(|(_, holds, _)| !holds).map(|(c, ..)| *c).collect();
    checks.push(CheckResult {
        name: "lemma_bound".into(),
        passed: violations.is_empty(),
        measured: max_of(lemma.iter().map(|(c, ..)| c.ratio)),
        tolerance: LEMMA_TOLERANCE,
        cases: lemma.len(),
        failures: violations.len(),
    });
    let tight: Vec<&(LemmaCase, bool, Option<bool>)> = lemma.iter().filter(|(.., t)| t.is_some()).collect();
    let loose = tight.iter().filter(|(.., t)| *t == Some(false)).count();
    checks.push(CheckResult {
        name: "lemma_tightness".into(),
        passed: loose == 0,
        measured: max_of(tight.iter().map(|(c, ..)| (c.ratio - 1.0).abs())),
        tolerance: TIGHTNESS_TOLERANCE,
        cases: tight.len(),
        failures: loose,
    });

    let pressfit = (0..config.pressfit_cases)
        .into_par_iter()
        .map(|i| pressfit_case(config, i))
        .collect::<Result<Vec<_>>>()?;
    let bad = pressfit.iter().filter(|c| c.relative_error > PRESSURE_TOLERANCE).count();
    checks.push(CheckResult {
        name: "two_body_pressure".into(),
        passed: bad == 0,
        measured: max_of(pressfit.iter().map(|c| c.relative_error)),
        tolerance: PRESSURE_TOLERANCE,
        cases: pressfit.len(),
        failures: bad,
    });

    Ok(VerifyReport {
        config: *config,
        passed: checks.iter().all(|c| c.passed),
        checks,
        convergence_errors,
        convergence_order: order,
        oracle_failures: failed.into_iter().take(REPORTED_FAILURES).collect(),
        lemma_failures: violations.into_iter().take(REPORTED_FAILURES).collect(),
        pressfit_cases: pressfit,
    })
}
