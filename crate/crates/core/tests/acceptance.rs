//! Acceptance gate: runs every criterion, prints one PASS/FAIL line each and
//! fails if any criterion misses.
//!
//! `cargo test -p flywheel-core --test acceptance -- --nocapture`

use std::collections::BTreeMap;

use flywheel_core::analytic::{max_rotational_radial_stress, max_von_mises};
use flywheel_core::energy::{
    design_report, joules_to_wh, kinetic_energy, lift_ratio_type2, material_economics, DesignOverrides, DesignSpec, Topology,
    DEFAULT_OPERATING_FRACTION,
};
use flywheel_core::optimizer::{
    evaluate_design, optimize, BaseDesign, Bounds, Objective, OptimizationProblem, StressCriterion, Variable,
};
use flywheel_core::oracle::{two_body_interface_pressure, OracleConfig};
use flywheel_core::pressfit::{
    assembly_solve_with, fit_linear_coefficients, interference_pressure, separation_speed, AssemblyMode, FitGrid, RingSpec,
    DEFAULT_SEPARATION_BOUND,
};
use flywheel_core::verify::{run_suite, VerifyConfig};
use flywheel_core::{AnnulusGeometry, LoadCase, Material, MaterialSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn rpm(x: f64) -> f64 {
    flywheel_core::model::rpm_to_rad_s(x).unwrap()
}

fn steel() -> Material {
    Material::steel_4340()
}

fn c1_table2_energy() -> Outcome {
    let kwh = joules_to_wh(kinetic_energy(3087.0, rpm(5623.0))) / 1000.0;
    let err = rel(kwh, 148.0);
    Ok((err <= 0.01, format!("E = {kwh:.2} kWh vs 148 (err {:.2}%)", 100.0 * err)))
}

fn c2_table2_specific_energy() -> Outcome {
    let spec = DesignSpec {
        topology: Topology::Shaftless,
        material: steel(),
        geometry: AnnulusGeometry::solid(1.0, 0.225).map_err(|e| e.to_string())?,
        shrink_stress: 0.0,
        operating_fraction: DEFAULT_OPERATING_FRACTION,
        overrides: DesignOverrides {
            angular_speed: Some(rpm(5623.0)),
            mass: Some(5443.0),
            moment_of_inertia: Some(3087.0),
            envelope_volume: None,
        },
    };
    let r = design_report(&spec).map_err(|e| e.to_string())?;
    let v = r.human.operational_specific_energy_wh_per_kg;
    let direct = 126e3 / 5443.0;
    let err = rel(v, 23.0);
    Ok((
        err <= 0.02 && rel(direct, 23.0) <= 0.02,
        format!("{v:.2} Wh/kg operational (126 kWh/5443 kg = {direct:.2}) vs 23 (err {:.2}%)", 100.0 * err),
    ))
}

fn c3_lift_ratio_limits() -> Outcome {
    let lo = lift_ratio_type2(1e-6, 0.3).map_err(|e| e.to_string())?;
    let hi = lift_ratio_type2(1.0, 0.3).map_err(|e| e.to_string())?;
    Ok((
        (lo - 2.0).abs() <= 1e-6 && (hi - 1.2121).abs() <= 1e-4,
        format!("λ_II(1e-6) = {lo:.9}, λ_II(1) = {hi:.6}"),
    ))
}

fn composite(name: &str, density: f64, tensile_mpa: f64, cost: f64) -> Material {
    Material::new(MaterialSpec {
        name: name.into(),
        density,
        poisson_ratio: 0.25,
        elastic_modulus: 80e9,
        yield_strength: tensile_mpa * 1e6,
        tensile_strength: Some(tensile_mpa * 1e6),
        cost_per_kg: cost,
        safety_factor: None,
    })
    .unwrap()
}

fn c4_table1_economics() -> Outcome {
    // (material, shape factor, printed Wh/$)
    let rows = [
        (steel(), 0.9118, 50.0),
        (composite("E-glass", 2000.0, 100.0, 11.0), 1.0, 1.27),
        (composite("S2-glass", 1920.0, 1470.0, 24.6), 0.9874, 8.54),
        (composite("Carbon T1000", 1520.0, 1950.0, 101.8), 0.9822, 3.47),
        (composite("Carbon AS4C", 1510.0, 1650.0, 31.3), 0.9884, 9.59),
    ];
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (m, k, printed) in rows {
        let e = material_economics(&m, k).map_err(|e| e.to_string())?;
        let err = rel(e.energy_per_dollar, printed);
        worst = worst.max(err);
        detail.push(format!("{} {:.3}", m.name(), e.energy_per_dollar));
    }
    Ok((worst <= 0.015, format!("{}; worst err {:.2}%", detail.join(", "), 100.0 * worst)))
}

fn suite_check(config: &VerifyConfig, names: &[&str]) -> Outcome {
    let report = run_suite(config).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut detail = Vec::new();
    for name in names {
        let c = report.checks.iter().find(|c| c.name == *name).ok_or(format!("no check {name}"))?;
        ok &= c.passed;
        detail.push(format!("{name}: {} cases, {} failures, measured {:.3e}", c.cases, c.failures, c.measured));
    }
    Ok((ok, detail.join("; ")))
}

fn c5_lemma_suite() -> Outcome {
    let config = VerifyConfig {
        oracle_cases: 0,
        pressfit_cases: 0,
        ..VerifyConfig::default()
    };
    if config.lemma_cases < 10_000 {
        return Err("suite smaller than 10^4 cases".into());
    }
    suite_check(&config, &["lemma_bound", "lemma_tightness"])
}

fn c6_oracle_equivalence() -> Outcome {
    let config = VerifyConfig {
        lemma_cases: 0,
        pressfit_cases: 0,
        ..VerifyConfig::default()
    };
    if config.oracle_cases < 20 || config.oracle_nodes != 2000 {
        return Err("oracle suite below 20 cases at 2000 nodes".into());
    }
    suite_check(&config, &["oracle_agreement", "convergence_order"])
}

fn c7_locations() -> Outcome {
    let m = steel();
    let g = AnnulusGeometry::new(0.2, 1.0, 0.1).map_err(|e| e.to_string())?;
    let w = 588.83;
    let radial = max_rotational_radial_stress(&m, &g, w).map_err(|e| e.to_string())?;
    let target = (0.2f64 * 1.0).sqrt();
    // grid resolution of the peak search
    let ok_radial = (radial.radius - target).abs() <= 1.0 / 1023.0;

    let annulus = max_von_mises(&m, &g, &LoadCase::rotation(w).unwrap()).map_err(|e| e.to_string())?;
    let ok_annulus = annulus.radius == 0.2;

    let solid = AnnulusGeometry::solid(1.0, 0.1).map_err(|e| e.to_string())?;
    let peak = max_von_mises(&m, &solid, &LoadCase::rotation(w).unwrap()).map_err(|e| e.to_string())?;
    let expected = (3.0 + 0.3) / 8.0 * 7700.0 * w * w;
    let ok_solid = peak.radius == 0.0 && rel(peak.value, expected) <= 1e-9;
    Ok((
        ok_radial && ok_annulus && ok_solid,
        format!(
            "σ_r max at {:.6} (√ab {target:.6}); annulus σ_v max at {}; solid max {:.6e} at {} (exact {expected:.6e})",
            radial.radius, annulus.radius, peak.value, peak.radius
        ),
    ))
}

fn c8_linear_rule() -> Outcome {
    let m = steel();
    let g = AnnulusGeometry::new(0.2, 1.065, 0.225).map_err(|e| e.to_string())?;
    let w_max = flywheel_core::energy::shaftless_speed_limit(&m, 1.065);
    let fit = fit_linear_coefficients(&m, &g, &FitGrid::uniform(w_max, 1e-3, 10)).map_err(|e| e.to_string())?;
    Ok((
        fit.r_squared >= 0.9999 && fit.points.len() == 100,
        format!("r² = {:.6} over {} points, C1 = {:.4e}, C2 = {:.4e}", fit.r_squared, fit.points.len(), fit.c1, fit.c2),
    ))
}

fn c9_pressfit() -> Outcome {
    let m = steel();
    let shaft = RingSpec::new(m.clone(), 0.0, 0.2, 0.0);
    let hub = RingSpec::new(m, 0.2, 1.0, 1e-4);
    let closed = interference_pressure(&shaft, &hub, 1e-4).map_err(|e| e.to_string())?;
    let oracle = two_body_interface_pressure(&shaft, &hub, 0.0, &OracleConfig::default()).map_err(|e| e.to_string())?;
    let err = rel(oracle, closed);

    let rings = [shaft, hub];
    let sep = separation_speed(&rings, DEFAULT_SEPARATION_BOUND).map_err(|e| e.to_string())?[0];
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    for i in 0..=60 {
        let w = 1.2 * sep * i as f64 / 60.0;
        let p = assembly_solve_with(&rings, w, AssemblyMode::FullCompatibility, 2)
            .map_err(|e| e.to_string())?
            .interface_pressures[0];
        monotone &= p <= prev;
        prev = p;
    }
    Ok((
        err <= 5e-3 && rel(closed, 48e6) <= 5e-3 && monotone && prev == 0.0,
        format!(
            "p = {:.3} MPa closed form, {:.3} MPa oracle (err {:.3}%); full-compatibility pressure non-increasing to separation at {sep:.1} rad/s: {monotone}",
            closed / 1e6,
            oracle / 1e6,
            100.0 * err
        ),
    ))
}

fn t_problem(variables: Vec<Bounds>) -> OptimizationProblem {
    OptimizationProblem {
        objective: Objective::SpecificEnergy,
        topology: Topology::TypeI,
        material: steel(),
        inner_material: None,
        base: BaseDesign {
            outer_radius: 1.0,
            height: 0.225,
            inner_ratio: 0.2,
            angular_speed: None,
            interference_ratio: 0.0,
            ring_radius: None,
        },
        variables,
        couplings: Vec::new(),
        criterion: StressCriterion::ExactCombined,
        safety_factor: None,
        assembly_mode: AssemblyMode::Superposition,
        mass_budget: None,
        seed: 42,
        starts: 6,
        max_evaluations: 20_000,
        snap: None,
    }
}

fn c10_optimizer() -> Outcome {
    let t_bounds = Bounds {
        variable: Variable::InnerRatio,
        lower: 0.05,
        upper: 0.9,
    };
    let p = t_problem(vec![t_bounds]);
    let a = optimize(&p).map_err(|e| e.to_string())?;
    let b = optimize(&p).map_err(|e| e.to_string())?;
    let identical = serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap()
        && a.objective.to_bits() == b.objective.to_bits();
    let t = a.variables[&Variable::InnerRatio];
    let at_lower = (t - 0.05) <= 1e-6 * (0.9 - 0.05);

    // conservativeness of the bound criterion
    let mut exact = t_problem(vec![
        t_bounds,
        Bounds {
            variable: Variable::InterferenceRatio,
            lower: 0.0,
            upper: 2e-3,
        },
        Bounds {
            variable: Variable::AngularSpeed,
            lower: 0.0,
            upper: 700.0,
        },
    ]);
    let mut lemma = exact.clone();
    lemma.criterion = StressCriterion::LemmaBound;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut bound_feasible = 0;
    let mut violations = 0;
    for _ in 0..1000 {
        let c = BTreeMap::from([
            (Variable::InnerRatio, rng.gen_range(0.05..0.9)),
            (Variable::InterferenceRatio, rng.gen_range(0.0..2e-3)),
            (Variable::AngularSpeed, rng.gen_range(0.0..700.0)),
        ]);
        let l = evaluate_design(&lemma, &c).map_err(|e| e.to_string())?;
        let e = evaluate_design(&exact, &c).map_err(|e| e.to_string())?;
        if l.feasible {
            bound_feasible += 1;
            violations += usize::from(!e.feasible);
        }
    }
    exact.variables.pop();
    exact.criterion = StressCriterion::LemmaBound;
    let optimized = optimize(&exact).map_err(|e| e.to_string())?;
    Ok((
        identical && at_lower && violations == 0 && bound_feasible > 0 && optimized.exact_feasible,
        format!(
            "repeat identical: {identical}; t* = {t:.8} (lower 0.05); bound-feasible {bound_feasible}/1000 with {violations} exact violations; optimized bound design exact-feasible: {}",
            optimized.exact_feasible
        ),
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Table II maximum energy", c1_table2_energy),
        ("Table II operational specific energy", c2_table2_specific_energy),
        ("Shell lift-ratio limits", c3_lift_ratio_limits),
        ("Table I energy per dollar", c4_table1_economics),
        ("Combined-load bound suite", c5_lemma_suite),
        ("Closed form vs finite-difference oracle", c6_oracle_equivalence),
        ("Peak stress locations", c7_locations),
        ("Linear shrink-fit design rule", c8_linear_rule),
        ("Press-fit pressure and relaxation", c9_pressfit),
        ("Optimizer determinism and sanity", c10_optimizer),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        println!("criterion {:>2} {} {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
