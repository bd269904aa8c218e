use std::fmt::Write as _;

use anyhow::anyhow;
use flywheel_core::analytic::{contour_grid, default_contour_axes, max_von_mises, stress_profile, ContourKind, DEFAULT_CONTOUR_POINTS};
use flywheel_core::energy::{design_report, lift_ratio_type1, lift_ratio_type2, material_economics, DesignSpec, EnergyReport, MaterialEconomics, Topology};
use flywheel_core::optimizer::{optimize, preload_study, sweep, Axis, OptimizationProblem, PreloadStudy, SweepSpec};
use flywheel_core::pressfit::{assembly_solve_with, separation_speed, AssemblyMode, AssemblySolution, RingSpec, DEFAULT_RING_SAMPLES, DEFAULT_SEPARATION_BOUND};
use flywheel_core::verify::{run_suite, Mutation, VerifyConfig};
use flywheel_core::{AnnulusGeometry, LoadCase, Material, RadialProfile};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::io::{json_report, load, parse, write_output, Loaded};
use crate::{Command, Failure, Format, MutateArg, Options, Outcome};

fn default_samples() -> usize {
    DEFAULT_RING_SAMPLES
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> flywheel_core::Result<()>) -> Outcome<Vec<u8>> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

fn require_input(opts: &Options, command: &str) -> Outcome<Loaded> {
    let path = opts
        .input
        .as_deref()
        .ok_or_else(|| Failure::config(anyhow!("{command} needs --input")))?;
    load(path, &opts.sets)
}

pub fn run(command: Command, opts: &Options) -> Outcome<()> {
    let (name, bytes) = match command {
        Command::Analyze => ("analyze", analyze(opts)?),
        Command::Contour => ("contour", contour(opts)?),
        Command::Energy => ("energy", energy(opts)?),
        Command::Compare => ("compare", compare(opts)?),
        Command::Assembly => ("assembly", assembly(opts)?),
        Command::Optimize => ("optimize", optimize_cmd(opts)?),
        Command::Verify => return verify(opts),
        Command::Report => ("report", report(opts)?),
    };
    let ext = match opts.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    write_output(opts.output.as_deref(), &format!("{name}.{ext}"), &bytes)
}

fn emit<T: Serialize>(opts: &Options, command: &str, input: &Loaded, result: T, csv: impl FnOnce() -> Outcome<Vec<u8>>) -> Outcome<Vec<u8>> {
    match opts.format {
        Format::Json => json_report(command, Some(&input.sha256), &input.overrides, result),
        Format::Csv => csv(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyzeInput {
    material: Material,
    geometry: AnnulusGeometry,
    load: LoadCase,
    #[serde(default = "default_samples")]
    samples: usize,
}

#[derive(Serialize)]
struct BoundaryResiduals {
    /// `σ_r(a) + p_a`, Pa; absent for a solid disk
    #[serde(skip_serializing_if = "Option::is_none")]
    inner: Option<f64>,
    /// `σ_r(b) + p_b`, Pa
    outer: f64,
}

#[derive(Serialize)]
struct AnalyzeReport {
    material: String,
    inner_radius: f64,
    outer_radius: f64,
    angular_speed: f64,
    inner_pressure: f64,
    outer_pressure: f64,
    max_von_mises: f64,
    max_von_mises_location: f64,
    /// peak over allowable stress
    utilization: f64,
    boundary_residuals: BoundaryResiduals,
    samples: usize,
}

fn analyze(opts: &Options) -> Outcome<Vec<u8>> {
    let input = require_input(opts, "analyze")?;
    let a: AnalyzeInput = parse(&input.value)?;
    let peak = max_von_mises(&a.material, &a.geometry, &a.load)?;
    let profile = stress_profile(&a.material, &a.geometry, &a.load, a.samples)?;
    let result = AnalyzeReport {
        material: a.material.name().to_string(),
        inner_radius: a.geometry.inner_radius(),
        outer_radius: a.geometry.outer_radius(),
        angular_speed: a.load.angular_speed(),
        inner_pressure: a.load.inner_pressure(),
        outer_pressure: a.load.outer_pressure(),
        max_von_mises: peak.value,
        max_von_mises_location: peak.radius,
        utilization: peak.value / a.material.allowable_stress(),
        boundary_residuals: BoundaryResiduals {
            inner: (!a.geometry.is_solid()).then(|| profile.first().stress.radial + a.load.inner_pressure()),
            outer: profile.last().stress.radial + a.load.outer_pressure(),
        },
        samples: profile.len(),
    };
    emit(opts, "analyze", &input, result, || csv_bytes(|b| profile.write_csv(b)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ContourInput {
    kind: ContourKind,
    poisson_ratio: f64,
    #[serde(default)]
    points: Option<usize>,
    #[serde(default)]
    t_axis: Option<Vec<f64>>,
    #[serde(default)]
    r_axis: Option<Vec<f64>>,
}

fn contour(opts: &Options) -> Outcome<Vec<u8>> {
    let input = require_input(opts, "contour")?;
    let c: ContourInput = parse(&input.value)?;
    let (t, r) = default_contour_axes(c.points.unwrap_or(DEFAULT_CONTOUR_POINTS));
    let grid = contour_grid(c.kind, c.poisson_ratio, c.t_axis.as_deref().unwrap_or(&t), c.r_axis.as_deref().unwrap_or(&r))?;
    emit(opts, "contour", &input, &grid, || csv_bytes(|b| grid.write_csv(b)))
}

fn energy_csv(report: &EnergyReport) -> Vec<u8> {
    let t = &report.table;
    let mut out = String::from("quantity,value,unit,source,basis\n");
    for (name, v) in [
        ("mass", &t.mass),
        ("moment_of_inertia", &t.moment_of_inertia),
        ("max_speed", &t.max_speed),
        ("tip_speed", &t.tip_speed),
        ("max_energy", &t.max_energy),
        ("operational_energy", &t.operational_energy),
        ("volume", &t.volume),
    ] {
        let source = serde_json::to_value(v.source).ok().and_then(|s| s.as_str().map(String::from)).unwrap_or_default();
        let _ = writeln!(out, "{name},{},{},{source},\"{}\"", v.value, v.unit, v.basis.replace('"', "'"));
    }
    out.into_bytes()
}

fn energy(opts: &Options) -> Outcome<Vec<u8>> {
    let input = require_input(opts, "energy")?;
    let spec: DesignSpec = parse(&input.value)?;
    let report = design_report(&spec)?;
    emit(opts, "energy", &input, &report, || Ok(energy_csv(&report)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialRow {
    material: Material,
    shape_factor: f64,
    /// A published Wh/$ figure to compare against.
    #[serde(default)]
    reference_energy_per_dollar: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftRatioInput {
    poisson_ratio: f64,
    t: Axis,
    #[serde(default)]
    shrink_ratios: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareInput {
    #[serde(default)]
    materials: Vec<MaterialRow>,
    #[serde(default)]
    lift_ratio: Option<LiftRatioInput>,
}

#[derive(Serialize)]
struct EconomicsRow {
    #[serde(flatten)]
    economics: MaterialEconomics,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference_energy_per_dollar: Option<f64>,
    /// relative difference from the reference
    #[serde(skip_serializing_if = "Option::is_none")]
    deviation: Option<f64>,
}

#[derive(Serialize)]
struct CompareReport {
    economics: Vec<EconomicsRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lift_ratio: Option<flywheel_core::optimizer::SweepTable>,
}

fn compare(opts: &Options) -> Outcome<Vec<u8>> {
    let input = require_input(opts, "compare")?;
    let c: CompareInput = parse(&input.value)?;
    if c.materials.is_empty() && c.lift_ratio.is_none() {
        return Err(Failure::config(anyhow!("compare needs `materials`, `lift_ratio` or both")));
    }
    let economics = c
        .materials
        .iter()
        .map(|row| {
            let e = material_economics(&row.material, row.shape_factor)?;
            let deviation = row.reference_energy_per_dollar.map(|r| (e.energy_per_dollar - r) / r);
            Ok(EconomicsRow {
                economics: e,
                reference_energy_per_dollar: row.reference_energy_per_dollar,
                deviation,
            })
        })
        .collect::<Outcome<Vec<_>>>()?;
    let lift_ratio = c
        .lift_ratio
        .map(|l| {
            sweep(&SweepSpec::LiftRatio {
                poisson_ratio: l.poisson_ratio,
                t: l.t,
                shrink_ratios: l.shrink_ratios,
            })
        })
        .transpose()?;
    let report = CompareReport { economics, lift_ratio };
    emit(opts, "compare", &input, &report, || {
        if report.economics.is_empty() {
            let table = report.lift_ratio.as_ref().expect("checked above");
            return csv_bytes(|b| table.write_csv(b));
        }
        let mut out = String::from("material,shape_factor,max_specific_energy_wh_per_kg,energy_per_dollar_wh,reference,deviation\n");
        for r in &report.economics {
            let e = &r.economics;
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "\"{}\",{},{},{},{},{}",
                e.material.replace('"', "'"),
                e.shape_factor,
                e.max_specific_energy,
                e.energy_per_dollar,
                opt(r.reference_energy_per_dollar),
                opt(r.deviation)
            );
        }
        Ok(out.into_bytes())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AssemblyInput {
    rings: Vec<RingSpec>,
    #[serde(default)]
    angular_speed: f64,
    #[serde(default)]
    mode: AssemblyMode,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default)]
    separation_bound: Option<f64>,
}

#[derive(Serialize)]
struct AssemblyReport {
    solution: AssemblySolution,
    /// rad/s per interface; null when the fit holds up to the search bound
    separation_speeds: Vec<Option<f64>>,
}

fn profiles_csv(profiles: &[(usize, &RadialProfile)]) -> Vec<u8> {
    let mut out = String::from("body,r_m,sigma_r_pa,sigma_theta_pa,sigma_v_pa,u_m\n");
    for (i, p) in profiles {
        for s in p.samples() {
            let st = &s.stress;
            let _ = writeln!(out, "{i},{},{},{},{},{}", st.radius, st.radial, st.hoop, st.von_mises, s.displacement);
        }
    }
    out.into_bytes()
}

fn assembly(opts: &Options) -> Outcome<Vec<u8>> {
    let input = require_input(opts, "assembly")?;
    let a: AssemblyInput = parse(&input.value)?;
    let solution = assembly_solve_with(&a.rings, a.angular_speed, a.mode, a.samples)?;
    let separation_speeds = if a.rings.len() > 1 {
        separation_speed(&a.rings, a.separation_bound.unwrap_or(DEFAULT_SEPARATION_BOUND))?
            .into_iter()
            .map(|w| w.is_finite().then_some(w))
            .collect()
    } else {
        Vec::new()
    };
    let report = AssemblyReport {
        solution,
        separation_speeds,
    };
    emit(opts, "assembly", &input, &report, || {
        let profiles: Vec<(usize, &RadialProfile)> = report.solution.rings.iter().enumerate().map(|(i, r)| (i, &r.profile)).collect();
        Ok(profiles_csv(&profiles))
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizeInput {
    #[serde(default)]
    problem: Option<OptimizationProblem>,
    #[serde(default)]
    sweep: Option<SweepSpec>,
    #[serde(default)]
    preload_study: Option<PreloadStudy>,
}

fn optimize_cmd(opts: &Options) -> Outcome<Vec<u8>> {
    let input = require_input(opts, "optimize")?;
    let o: OptimizeInput = parse(&input.value)?;
    match (o.problem, o.sweep, o.preload_study) {
        (Some(mut problem), None, None) => {
            if let Some(seed) = opts.seed {
                problem.seed = seed;
            }
            let result = optimize(&problem)?;
            emit(opts, "optimize", &input, &result, || {
                let mut out = String::from("evaluations,objective\n");
                for t in &result.trace {
                    let _ = writeln!(out, "{},{}", t.evaluations, t.objective);
                }
                Ok(out.into_bytes())
            })
        }
        (None, Some(spec), None) => {
            let table = sweep(&spec)?;
            emit(opts, "optimize", &input, &table, || csv_bytes(|b| table.write_csv(b)))
        }
        (None, None, Some(mut study)) => {
            if let Some(seed) = opts.seed {
                study.seed = seed;
            }
            let report = preload_study(&study)?;
            emit(opts, "optimize", &input, &report, || {
                Ok(format!(
                    "ring_radius_m,interference_ratio,baseline_speed_rad_s,best_speed_rad_s,speed_gain_percent,energy_gain_percent\n{},{},{},{},{},{}\n",
                    report.ring_radius,
                    report.interference_ratio,
                    report.baseline_speed,
                    report.best_speed,
                    report.speed_gain_percent,
                    report.energy_gain_percent
                )
                .into_bytes())
            })
        }
        _ => Err(Failure::config(anyhow!("optimize input needs exactly one of `problem`, `sweep`, `preload_study`"))),
    }
}

fn verify(opts: &Options) -> Outcome<()> {
    let mut config = serde_json::to_value(VerifyConfig::default()).map_err(|e| Failure::analysis(e.into()))?;
    let (sha, overrides) = match &opts.input {
        Some(path) => {
            let loaded = load(path, &opts.sets)?;
            if let (Value::Object(base), Value::Object(given)) = (&mut config, loaded.value) {
                base.extend(given);
            } else {
                return Err(Failure::config(anyhow!("verify input must be a JSON object")));
            }
            (Some(loaded.sha256), loaded.overrides)
        }
        None => (None, opts.sets.clone()),
    };
    let mut config: VerifyConfig = parse(&config)?;
    if let Some(cases) = opts.cases {
        config.lemma_cases = cases;
        config.oracle_cases = config.oracle_cases.min(cases);
        config.pressfit_cases = config.pressfit_cases.min(cases);
    }
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    if let Some(MutateArg::RotationSign) = opts.mutate {
        config.mutation = Some(Mutation::RotationSign);
    }
    let report = run_suite(&config)?;
    let bytes = match opts.format {
        Format::Json => json_report("verify", sha.as_deref(), &overrides, &report)?,
        Format::Csv => {
            let mut out = String::from("check,passed,measured,tolerance,cases,failures\n");
            for c in &report.checks {
                let _ = writeln!(out, "{},{},{},{},{},{}", c.name, c.passed, c.measured, c.tolerance, c.cases, c.failures);
            }
            out.into_bytes()
        }
    };
    let ext = if opts.format == Format::Csv { "csv" } else { "json" };
    write_output(opts.output.as_deref(), &format!("verify.{ext}"), &bytes)?;
    if report.passed {
        return Ok(());
    }
    let mut failing: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} ({} of {} cases)", c.name, c.failures, c.cases))
        .collect();
    if let Some(case) = report.oracle_failures.first() {
        failing.push(format!(
            "first oracle failure: case {} (seed {}), error {:.3e}",
            case.index, case.seed, case.comparison.max_rel_error
        ));
    }
    Err(Failure::verification(anyhow!("verification failed: {}", failing.join("; "))))
}

#[derive(Serialize)]
struct StressSummary {
    /// rad/s
    angular_speed: f64,
    max_von_mises: f64,
    max_von_mises_location: f64,
    utilization: f64,
}

#[derive(Serialize)]
struct DesignSummary {
    energy: EnergyReport,
    /// Rotation-only stress at the report speed.
    stress: StressSummary,
    /// Specific energy of a shaftless rotor over this design's.
    lift_ratio: f64,
}

fn report(opts: &Options) -> Outcome<Vec<u8>> {
    let input = require_input(opts, "report")?;
    let spec: DesignSpec = parse(&input.value)?;
    let energy = design_report(&spec)?;
    let w = energy.metrics.max_speed;
    let load = LoadCase::rotation(w)?;
    let peak = max_von_mises(&spec.material, &spec.geometry, &load)?;
    let nu = spec.material.poisson_ratio();
    let t = spec.geometry.ratio();
    let lift_ratio = match spec.topology {
        Topology::Shaftless => 1.0,
        Topology::TypeI => lift_ratio_type1(t, nu, spec.shrink_stress / spec.material.allowable_stress())?,
        Topology::TypeII => lift_ratio_type2(t, nu)?,
        Topology::RingAssembly => return Err(Failure::config(anyhow!("report does not cover ring assemblies; use assembly"))),
    };
    let summary = DesignSummary {
        stress: StressSummary {
            angular_speed: w,
            max_von_mises: peak.value,
            max_von_mises_location: peak.radius,
            utilization: peak.value / spec.material.allowable_stress(),
        },
        energy,
        lift_ratio,
    };
    emit(opts, "report", &input, &summary, || {
        let profile = stress_profile(&spec.material, &spec.geometry, &load, DEFAULT_RING_SAMPLES)?;
        csv_bytes(|b| profile.write_csv(b))
    })
}
