//! Design search over rotor parameters under a stress limit.
//!
//! The search is a multi-start compass (pattern) search in the unit box of
//! the free variables. Starts come from a seeded Latin hypercube, ranking is
//! feasibility-first (feasible by objective, infeasible by violation) and the
//! poll reduction runs in a fixed order, so a given problem and seed always
//! give the same answer whether polls run serially or in parallel.
//!
//! Rotors are evaluated whole: a type-1 design is its shaft plus the annulus
//! shrunk onto it, so mass and energy include the shaft.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::DiskSolution;
use crate::energy::{lift_ratio_type1, lift_ratio_type2, moment_of_inertia, Topology};
use crate::error::{Error, Result};
use crate::model::{rad_s_to_rpm, rpm_to_rad_s, AnnulusGeometry, LoadCase, Material};
use crate::numeric::{bisect, linspace};
use crate::pressfit::{fit_linear_coefficients, interface_pressures_at, AssemblyMode, FitGrid, RingSpec};

/// Scan resolution for peak stress inside the search loop.
const PEAK_POINTS: usize = 256;
/// Speed samples (uniform in ω²) before bisecting the first limit crossing.
const SPEED_SCAN_POINTS: usize = 32;
const FEASIBILITY_SLACK: f64 = 1e-12;
const INITIAL_STEP: f64 = 0.25;
/// Final poll step as a fraction of each variable's range.
pub const STEP_TOLERANCE: f64 = 1e-6;
pub const MAX_SWEEP_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    /// `t = a/b`
    InnerRatio,
    /// `b`, m
    OuterRadius,
    /// Axial thickness, m
    Height,
    /// rad/s
    AngularSpeed,
    /// `u' = δ/r` at the fitted interface
    InterferenceRatio,
    /// Interface radius of a two-body assembly, m
    RingRadius,
}

impl Variable {
    pub const ALL: [Variable; 6] = [
        Variable::InnerRatio,
        Variable::OuterRadius,
        Variable::Height,
        Variable::AngularSpeed,
        Variable::InterferenceRatio,
        Variable::RingRadius,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::InnerRatio => "inner_ratio",
            Variable::OuterRadius => "outer_radius",
            Variable::Height => "height",
            Variable::AngularSpeed => "angular_speed",
            Variable::InterferenceRatio => "interference_ratio",
            Variable::RingRadius => "ring_radius",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// J/kg
    SpecificEnergy,
    /// J
    TotalEnergy,
    /// rad/s
    MaxSpeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StressCriterion {
    /// Peak von Mises of the combined load.
    #[default]
    ExactCombined,
    /// Rotation-only peak plus pressure-only peak, per body.
    LemmaBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub variable: Variable,
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    fn range(&self) -> f64 {
        self.upper - self.lower
    }

    fn is_free(&self) -> bool {
        self.upper > self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub variable: Variable,
    pub coefficient: f64,
}

/// `variable = constant + Σ coefficient·term`, evaluated after the free
/// variables. Optional limits on the dependent value count as constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    pub variable: Variable,
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<Term>,
    #[serde(default)]
    pub lower: Option<f64>,
    #[serde(default)]
    pub upper: Option<f64>,
}

/// Values used for anything that is neither a variable nor coupled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseDesign {
    pub outer_radius: f64,
    pub height: f64,
    #[serde(default)]
    pub inner_ratio: f64,
    /// `None`: run at the highest speed the stress limit admits.
    #[serde(default)]
    pub angular_speed: Option<f64>,
    #[serde(default)]
    pub interference_ratio: f64,
    #[serde(default)]
    pub ring_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapGrid {
    /// m
    pub length: f64,
    pub speed_rpm: f64,
}

impl Default for SnapGrid {
    fn default() -> Self {
        Self {
            length: 5e-4,
            speed_rpm: 1.0,
        }
    }
}

fn default_starts() -> usize {
    8
}

fn default_budget() -> usize {
    20_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizationProblem {
    pub objective: Objective,
    pub topology: Topology,
    /// Rotor material; the outer body of an assembly.
    pub material: Material,
    /// Shaft (type 1) or inner ring (assembly); defaults to `material`.
    #[serde(default)]
    pub inner_material: Option<Material>,
    pub base: BaseDesign,
    pub variables: Vec<Bounds>,
    #[serde(default)]
    pub couplings: Vec<Coupling>,
    #[serde(default)]
    pub criterion: StressCriterion,
    /// Replaces the materials' own safety factor when set.
    #[serde(default)]
    pub safety_factor: Option<f64>,
    #[serde(default)]
    pub assembly_mode: AssemblyMode,
    /// Fixes total mass, kg; height then follows from the radii.
    #[serde(default)]
    pub mass_budget: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_budget")]
    pub max_evaluations: usize,
    #[serde(default)]
    pub snap: Option<SnapGrid>,
}

pub type Candidate = BTreeMap<Variable, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub objective: f64,
    pub feasible: bool,
    /// 0 when feasible; otherwise how far past the limits.
    pub violation: f64,
    /// Pa, in the governing body.
    pub max_stress: f64,
    pub max_utilization: f64,
    pub governing_body: usize,
    /// rad/s
    pub angular_speed: f64,
    /// kg
    pub mass: f64,
    /// kg·m²
    pub moment_of_inertia: f64,
    /// J
    pub energy: f64,
    /// J/kg
    pub specific_energy: f64,
}

impl Evaluation {
    fn invalid(violation: f64) -> Self {
        Self {
            objective: 0.0,
            feasible: false,
            violation,
            max_stress: 0.0,
            max_utilization: 0.0,
            governing_body: 0,
            angular_speed: 0.0,
            mass: 0.0,
            moment_of_inertia: 0.0,
            energy: 0.0,
            specific_energy: 0.0,
        }
    }

    /// Strictly better under feasibility-first ranking.
    pub fn better_than(&self, other: &Evaluation) -> bool {
        match (self.feasible, other.feasible) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => self.objective > other.objective,
            (false, false) => self.violation < other.violation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub evaluations: usize,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub variables: Candidate,
    /// Resolved values of coupled variables.
    pub dependent: Candidate,
    pub objective: f64,
    pub evaluation: Evaluation,
    pub binding_constraints: Vec<String>,
    pub evaluations: usize,
    /// Best feasible objective so far; non-decreasing.
    pub trace: Vec<TracePoint>,
    pub snapped: bool,
    /// Re-checked against the exact combined stress at the design speed.
    pub exact_feasible: bool,
}

#[derive(Debug, Clone, Copy)]
struct Design {
    t: f64,
    b: f64,
    h: f64,
    omega: Option<f64>,
    u: f64,
    c: Option<f64>,
}

struct Prepared {
    problem: OptimizationProblem,
    material: Material,
    inner_material: Material,
    /// Free variables in canonical order.
    free: Vec<Bounds>,
    fixed: Candidate,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidProblem(msg.into())
}

fn with_safety_factor(m: &Material, sf: Option<f64>) -> Result<Material> {
    match sf {
        None => Ok(m.clone()),
        Some(sf) => {
            let mut spec = m.spec();
            spec.safety_factor = Some(sf);
            Material::new(spec)
        }
    }
}

impl Prepared {
    fn new(problem: &OptimizationProblem, require_free: bool) -> Result<Self> {
        let p = problem;
        let mut seen = BTreeMap::new();
        for b in &p.variables {
            if seen.insert(b.variable, ()).is_some() {
                return Err(invalid(format!("variable {} listed twice", b.variable.name())));
            }
            if !(b.lower.is_finite() && b.upper.is_finite() && b.lower <= b.upper) {
                return Err(invalid(format!(
                    "bounds of {} must be finite with lower <= upper, got [{}, {}]",
                    b.variable.name(),
                    b.lower,
                    b.upper
                )));
            }
        }
        for c in &p.couplings {
            if seen.insert(c.variable, ()).is_some() {
                return Err(invalid(format!("{} is both free and coupled, or coupled twice", c.variable.name())));
            }
            for term in &c.terms {
                if !p.variables.iter().any(|b| b.variable == term.variable) {
                    return Err(invalid(format!(
                        "coupling of {} refers to {}, which is not a variable",
                        c.variable.name(),
                        term.variable.name()
                    )));
                }
            }
        }
        let used = |v: Variable| seen.contains_key(&v);
        let topo = p.topology;
        if used(Variable::InnerRatio) && topo == Topology::Shaftless {
            return Err(invalid("a shaftless rotor has no inner ratio"));
        }
        if used(Variable::InterferenceRatio) && !matches!(topo, Topology::TypeI | Topology::RingAssembly) {
            return Err(invalid("interference needs a type1 or ring_assembly topology"));
        }
        if used(Variable::RingRadius) && topo != Topology::RingAssembly {
            return Err(invalid("ring radius needs the ring_assembly topology"));
        }
        if topo == Topology::RingAssembly && !used(Variable::RingRadius) && p.base.ring_radius.is_none() {
            return Err(invalid("ring_assembly needs a ring radius"));
        }
        if let Some(m) = p.mass_budget {
            if !(m.is_finite() && m > 0.0) {
                return Err(invalid(format!("mass budget must be positive, got {m}")));
            }
            if used(Variable::Height) {
                return Err(invalid("height is set by the mass budget and cannot also vary"));
            }
        }
        if let Some(sf) = p.safety_factor {
            if !(sf.is_finite() && sf >= 1.0) {
                return Err(Error::InvalidSafetyFactor(sf));
            }
        }
        if p.starts == 0 || p.max_evaluations == 0 {
            return Err(invalid("starts and max_evaluations must be at least 1"));
        }
        if let Some(s) = p.snap {
            if !(s.length > 0.0 && s.speed_rpm > 0.0) {
                return Err(invalid("snap grid spacings must be positive"));
            }
        }
        let mut free: Vec<Bounds> = p.variables.iter().copied().filter(Bounds::is_free).collect();
        free.sort_by_key(|b| b.variable);
        if require_free && free.is_empty() {
            return Err(invalid("no free variable: every bound has lower == upper"));
        }
        let fixed = p.variables.iter().filter(|b| !b.is_free()).map(|b| (b.variable, b.lower)).collect();
        let material = with_safety_factor(&p.material, p.safety_factor)?;
        let inner_material = with_safety_factor(p.inner_material.as_ref().unwrap_or(&p.material), p.safety_factor)?;
        Ok(Self {
            problem: p.clone(),
            material,
            inner_material,
            free,
            fixed,
        })
    }

    fn check_candidate(&self, candidate: &Candidate) -> Result<()> {
        for (v, x) in candidate {
            let Some(b) = self.problem.variables.iter().find(|b| b.variable == *v) else {
                return Err(invalid(format!("candidate sets {}, which is not a variable", v.name())));
            };
            let slack = 1e-12 * b.range().max(b.upper.abs());
            if !(x.is_finite() && *x >= b.lower - slack && *x <= b.upper + slack) {
                return Err(invalid(format!(
                    "candidate {} = {x} outside [{}, {}]",
                    v.name(),
                    b.lower,
                    b.upper
                )));
            }
        }
        for b in &self.free {
            if !candidate.contains_key(&b.variable) {
                return Err(invalid(format!("candidate is missing {}", b.variable.name())));
            }
        }
        Ok(())
    }

    /// Fills in base values and couplings. Returns the design, the coupled
    /// values and the coupling-limit violation.
    fn resolve(&self, candidate: &Candidate) -> (Design, Candidate, f64) {
        let base = &self.problem.base;
        let mut values: Candidate = self.fixed.clone();
        values.extend(candidate.iter().map(|(k, v)| (*k, *v)));
        let mut dependent = Candidate::new();
        let mut violation = 0.0;
        for c in &self.problem.couplings {
            let x = c.constant + c.terms.iter().map(|t| t.coefficient * values[&t.variable]).sum::<f64>();
            let scale = x.abs().max(1e-12);
            if let Some(lo) = c.lower {
                violation += ((lo - x) / scale).max(0.0);
            }
            if let Some(hi) = c.upper {
                violation += ((x - hi) / scale).max(0.0);
            }
            dependent.insert(c.variable, x);
            values.insert(c.variable, x);
        }
        let get = |v: Variable, default: f64| values.get(&v).copied().unwrap_or(default);
        let design = Design {
            t: get(Variable::InnerRatio, base.inner_ratio),
            b: get(Variable::OuterRadius, base.outer_radius),
            h: get(Variable::Height, base.height),
            omega: values.get(&Variable::AngularSpeed).copied().or(base.angular_speed),
            u: get(Variable::InterferenceRatio, base.interference_ratio),
            c: values.get(&Variable::RingRadius).copied().or(base.ring_radius),
        };
        (design, dependent, violation)
    }

    /// Bodies from the axis out, or the amount by which the geometry is
    /// invalid.
    fn bodies(&self, d: &Design) -> std::result::Result<Vec<RingSpec>, f64> {
        let topo = self.problem.topology;
        let mut bad = 0.0;
        bad += (-d.b).max(0.0) + (-d.h).max(0.0) + (-d.u).max(0.0);
        bad += (-d.t).max(0.0) + (d.t - (1.0 - 1e-9)).max(0.0);
        if matches!(topo, Topology::TypeI | Topology::TypeII) && d.t <= 0.0 {
            bad += 1e-9;
        }
        if d.omega.is_some_and(|w| !(w >= 0.0)) {
            bad += 1.0;
        }
        let a = d.t * d.b;
        if topo == Topology::RingAssembly {
            let c = d.c.unwrap_or(0.0);
            let margin = 1e-6 * d.b;
            bad += ((a + margin - c) / d.b.max(1e-12)).max(0.0) + ((c + margin - d.b) / d.b.max(1e-12)).max(0.0);
        }
        if bad > 0.0 || !(d.b.is_finite() && d.h.is_finite()) {
            return Err(bad.max(1e-9));
        }
        let m = self.material.clone();
        let inner = self.inner_material.clone();
        Ok(match topo {
            Topology::Shaftless => vec![RingSpec::new(m, 0.0, d.b, 0.0)],
            Topology::TypeII => vec![RingSpec::new(m, a, d.b, 0.0)],
            Topology::TypeI => vec![RingSpec::new(inner, 0.0, a, 0.0), RingSpec::new(m, a, d.b, d.u * a)],
            Topology::RingAssembly => {
                let c = d.c.unwrap_or(0.0);
                vec![RingSpec::new(inner, a, c, 0.0), RingSpec::new(m, c, d.b, d.u * c)]
            }
        })
    }

    fn body_peak(body: &RingSpec, w: f64, p_in: f64, p_out: f64) -> Result<f64> {
        let g = AnnulusGeometry::new(body.inner_radius, body.outer_radius, 1.0)?;
        Ok(DiskSolution::new(&body.material, &g, &LoadCase::new(w, p_in, p_out)?)?
            .peak_with(PEAK_POINTS)
            .value)
    }

    /// Largest utilization over the bodies at speed `w`: (utilization,
    /// stress, body).
    fn utilization(&self, bodies: &[RingSpec], w: f64, criterion: StressCriterion) -> Result<(f64, f64, usize)> {
        let pressures = if bodies.len() > 1 {
            interface_pressures_at(bodies, w, self.problem.assembly_mode)?
        } else {
            Vec::new()
        };
        let mut worst = (f64::NEG_INFINITY, 0.0, 0);
        for (i, body) in bodies.iter().enumerate() {
            let p_in = if i > 0 { pressures[i - 1] } else { 0.0 };
            let p_out = pressures.get(i).copied().unwrap_or(0.0);
            let stress = match criterion {
                StressCriterion::ExactCombined => Self::body_peak(body, w, p_in, p_out)?,
                StressCriterion::LemmaBound => {
                    Self::body_peak(body, w, 0.0, 0.0)? + Self::body_peak(body, 0.0, p_in, p_out)?
                }
            };
            let u = stress / body.material.allowable_stress();
            if u > worst.0 {
                worst = (u, stress, i);
            }
        }
        Ok(worst)
    }

    /// Highest speed with utilization ≤ 1, 0 if even standstill fails.
    fn admissible_speed(&self, bodies: &[RingSpec], criterion: StressCriterion) -> Result<f64> {
        // The outermost body only sees bore pressure, which can only raise
        // its peak above the rotation-only value, so its rotation-only limit
        // bounds the answer from above.
        let outer = bodies.last().expect("at least one body");
        let unit = Self::body_peak(outer, 1.0, 0.0, 0.0)? / outer.material.allowable_stress();
        let w_hi = (1.0 / unit).sqrt();
        if bodies.len() == 1 {
            return Ok(w_hi);
        }
        let over = |w: f64| -> Result<bool> { Ok(self.utilization(bodies, w, criterion)?.0 > 1.0) };
        if over(0.0)? {
            return Ok(0.0);
        }
        let mut prev = 0.0;
        for k in 1..=SPEED_SCAN_POINTS {
            let w = w_hi * (k as f64 / SPEED_SCAN_POINTS as f64).sqrt();
            if over(w)? {
                let mut err = None;
                let (lo, _) = bisect(
                    |x| match over(x) {
                        Ok(v) => v,
                        Err(e) => {
                            err.get_or_insert(e);
                            true
                        }
                    },
                    prev,
                    w,
                    1e-12,
                );
                return match err {
                    Some(e) => Err(e),
                    None => Ok(lo),
                };
            }
            prev = w;
        }
        Ok(w_hi)
    }

    fn evaluate(&self, candidate: &Candidate) -> Result<Evaluation> {
        self.evaluate_with(candidate, self.problem.criterion, None)
    }

    fn evaluate_with(&self, candidate: &Candidate, criterion: StressCriterion, speed: Option<f64>) -> Result<Evaluation> {
        let (mut design, _, coupling_violation) = self.resolve(candidate);
        if speed.is_some() {
            design.omega = speed;
        }
        let bodies = match self.bodies(&design) {
            Ok(b) => b,
            Err(bad) => return Ok(Evaluation::invalid(1.0 + bad + coupling_violation)),
        };
        let area_density: f64 = bodies
            .iter()
            .map(|r| {
                let g = AnnulusGeometry::new(r.inner_radius, r.outer_radius, 1.0).expect("validated");
                moment_of_inertia(&g, r.material.density()).mass
            })
            .sum();
        let height = self.problem.mass_budget.map_or(design.h, |m| m / area_density);
        let (mass, inertia) = bodies.iter().fold((0.0, 0.0), |(m, i), r| {
            let g = AnnulusGeometry::new(r.inner_radius, r.outer_radius, height).expect("validated");
            let mp = moment_of_inertia(&g, r.material.density());
            (m + mp.mass, i + mp.moment_of_inertia)
        });

        let (omega, admissible_zero) = match design.omega {
            Some(w) => (w, false),
            None => {
                let w = self.admissible_speed(&bodies, criterion)?;
                (w, w <= 0.0)
            }
        };
        let (util, stress, body) = self.utilization(&bodies, omega, criterion)?;
        let stress_violation = (util - 1.0).max(0.0);
        let violation = coupling_violation + if stress_violation > FEASIBILITY_SLACK { stress_violation } else { 0.0 };
        let feasible = violation == 0.0 && !admissible_zero;
        let energy = 0.5 * inertia * omega * omega;
        let specific = energy / mass;
        Ok(Evaluation {
            objective: match self.problem.objective {
                Objective::SpecificEnergy => specific,
                Objective::TotalEnergy => energy,
                Objective::MaxSpeed => omega,
            },
            feasible,
            violation: if feasible { 0.0 } else { violation.max(FEASIBILITY_SLACK) },
            max_stress: stress,
            max_utilization: util,
            governing_body: body,
            angular_speed: omega,
            mass,
            moment_of_inertia: inertia,
            energy,
            specific_energy: specific,
        })
    }

    fn to_candidate(&self, z: &[f64]) -> Candidate {
        self.free
            .iter()
            .zip(z)
            .map(|(b, &zi)| (b.variable, if zi >= 1.0 { b.upper } else { b.lower + zi * b.range() }))
            .collect()
    }
}

/// Scores one candidate. Infeasible designs come back with
/// `feasible = false`; only malformed candidates are errors.
pub fn evaluate_design(problem: &OptimizationProblem, candidate: &Candidate) -> Result<Evaluation> {
    let prep = Prepared::new(problem, false)?;
    prep.check_candidate(candidate)?;
    prep.evaluate(candidate)
}

fn latin_hypercube(n: usize, dims: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![vec![0.0; dims]; n];
    for d in 0..dims {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        for (s, p) in points.iter_mut().enumerate() {
            p[d] = (perm[s] as f64 + rng.gen::<f64>()) / n as f64;
        }
    }
    points
}

struct Search<'a> {
    prep: &'a Prepared,
    evaluations: usize,
    best: Option<(Vec<f64>, Evaluation)>,
    trace: Vec<TracePoint>,
}

impl Search<'_> {
    fn eval_batch(&mut self, points: &[Vec<f64>]) -> Result<Vec<Evaluation>> {
        let prep = self.prep;
        let out: Vec<Result<Evaluation>> = points.par_iter().map(|z| prep.evaluate(&prep.to_candidate(z))).collect();
        self.evaluations += points.len();
        let out = out.into_iter().collect::<Result<Vec<_>>>()?;
        for (z, e) in points.iter().zip(&out) {
            let improves = match &self.best {
                None => true,
                Some((_, b)) => e.better_than(b),
            };
            if improves {
                self.best = Some((z.clone(), *e));
                if e.feasible {
                    self.trace.push(TracePoint {
                        evaluations: self.evaluations,
                        objective: e.objective,
                    });
                }
            }
        }
        Ok(out)
    }

    fn run_from(&mut self, start: Vec<f64>) -> Result<()> {
        let budget = self.prep.problem.max_evaluations;
        if self.evaluations >= budget {
            return Ok(());
        }
        let mut x = start;
        let mut fx = self.eval_batch(std::slice::from_ref(&x))?[0];
        let mut step = INITIAL_STEP;
        while step >= STEP_TOLERANCE && self.evaluations < budget {
            let mut polls = Vec::with_capacity(2 * x.len());
            for d in 0..x.len() {
                for sign in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[d] = (y[d] + sign * step).clamp(0.0, 1.0);
                    if y[d] != x[d] {
                        polls.push(y);
                    }
                }
            }
            polls.truncate(budget - self.evaluations);
            let evals = self.eval_batch(&polls)?;
            let mut winner: Option<usize> = None;
            for (i, e) in evals.iter().enumerate() {
                let incumbent = winner.map_or(&fx, |w| &evals[w]);
                if e.better_than(incumbent) {
                    winner = Some(i);
                }
            }
            match winner {
                Some(i) => {
                    x = polls[i].clone();
                    fx = evals[i];
                }
                None => step *= 0.5,
            }
        }
        Ok(())
    }
}

fn snap_candidates(prep: &Prepared, candidate: &Candidate, grid: &SnapGrid) -> Vec<Candidate> {
    let within = |v: Variable, x: f64| {
        prep.free
            .iter()
            .find(|b| b.variable == v)
            .is_none_or(|b| x >= b.lower && x <= b.upper)
    };
    let round = |x: f64, step: f64| [(x / step).floor() * step, (x / step).ceil() * step];
    let mut out: Vec<Candidate> = vec![candidate.clone()];
    // outer radius first so the inner ratio can snap the bore radius
    for v in [
        Variable::OuterRadius,
        Variable::Height,
        Variable::RingRadius,
        Variable::AngularSpeed,
        Variable::InnerRatio,
    ] {
        if !prep.free.iter().any(|b| b.variable == v) {
            continue;
        }
        let mut next = Vec::new();
        for c in &out {
            let x = c[&v];
            let options: Vec<f64> = match v {
                Variable::AngularSpeed => {
                    let rpm = rad_s_to_rpm(x).unwrap_or(0.0);
                    round(rpm, grid.speed_rpm)
                        .iter()
                        .filter_map(|&r| rpm_to_rad_s(r).ok())
                        .collect()
                }
                Variable::InnerRatio => {
                    let b = c.get(&Variable::OuterRadius).copied().unwrap_or(prep.problem.base.outer_radius);
                    round(x * b, grid.length).iter().map(|a| a / b).collect()
                }
                _ => round(x, grid.length).to_vec(),
            };
            let mut kept: Vec<f64> = options.into_iter().filter(|&y| within(v, y)).collect();
            kept.dedup();
            if kept.is_empty() {
                kept.push(x);
            }
            for y in kept {
                let mut c2 = c.clone();
                c2.insert(v, y);
                next.push(c2);
            }
        }
        out = next;
    }
    out
}

fn binding_constraints(prep: &Prepared, candidate: &Candidate, dependent: &Candidate, e: &Evaluation) -> Vec<String> {
    let mut out = Vec::new();
    if e.max_utilization >= 1.0 - 1e-6 {
        out.push(format!("stress limit (body {})", e.governing_body));
    }
    for b in &prep.free {
        let x = candidate[&b.variable];
        let tol = 1e-6 * b.range();
        if x - b.lower <= tol {
            out.push(format!("{} at lower bound", b.variable.name()));
        } else if b.upper - x <= tol {
            out.push(format!("{} at upper bound", b.variable.name()));
        }
    }
    for c in &prep.problem.couplings {
        let x = dependent[&c.variable];
        let tol = 1e-6 * x.abs().max(1e-12);
        if c.lower.is_some_and(|lo| (x - lo).abs() <= tol) || c.upper.is_some_and(|hi| (x - hi).abs() <= tol) {
            out.push(format!("{} coupling limit", c.variable.name()));
        }
    }
    out
}

/// Multi-start compass search. Returns the best feasible design found.
pub fn optimize(problem: &OptimizationProblem) -> Result<OptimizationResult> {
    let prep = Prepared::new(problem, true)?;
    let starts = latin_hypercube(problem.starts, prep.free.len(), problem.seed);
    let mut search = Search {
        prep: &prep,
        evaluations: 0,
        best: None,
        trace: Vec::new(),
    };
    for s in starts {
        search.run_from(s)?;
    }
    let (z, best) = search.best.clone().expect("at least one evaluation");
    if !best.feasible {
        return Err(Error::NoFeasiblePoint(search.evaluations));
    }
    let mut candidate = prep.to_candidate(&z);
    let mut evaluation = best;
    let mut snapped = false;
    if let Some(grid) = &problem.snap {
        let options = snap_candidates(&prep, &candidate, grid);
        let evals = options
            .par_iter()
            .map(|c| prep.evaluate(c))
            .collect::<Result<Vec<_>>>()?;
        search.evaluations += options.len();
        let mut pick: Option<usize> = None;
        for (i, e) in evals.iter().enumerate() {
            if e.feasible && pick.is_none_or(|p| e.better_than(&evals[p])) {
                pick = Some(i);
            }
        }
        if let Some(i) = pick {
            candidate = options[i].clone();
            evaluation = evals[i];
            snapped = true;
        }
    }
    // fresh re-verification
    let verified = prep.evaluate(&candidate)?;
    search.evaluations += 1;
    if !verified.feasible {
        return Err(Error::NoFeasiblePoint(search.evaluations));
    }
    debug_assert_eq!(verified, evaluation);
    let exact_feasible = match problem.criterion {
        StressCriterion::ExactCombined => true,
        StressCriterion::LemmaBound => {
            search.evaluations += 1;
            prep.evaluate_with(&candidate, StressCriterion::ExactCombined, Some(verified.angular_speed))?
                .feasible
        }
    };
    // snapping may lower the objective; the trace records it as a final point
    // only when it does not
    let mut trace = search.trace;
    if trace.last().is_none_or(|t| verified.objective >= t.objective) {
        trace.push(TracePoint {
            evaluations: search.evaluations,
            objective: verified.objective,
        });
    }
    let (_, dependent, _) = prep.resolve(&candidate);
    let mut variables = prep.fixed.clone();
    variables.extend(candidate.iter().map(|(k, v)| (*k, *v)));
    Ok(OptimizationResult {
        binding_constraints: binding_constraints(&prep, &candidate, &dependent, &verified),
        variables,
        dependent,
        objective: verified.objective,
        evaluation: verified,
        evaluations: search.evaluations,
        trace,
        snapped,
        exact_feasible,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

impl Axis {
    fn values(&self, name: &str) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(Error::EmptyAxis(axis_name(name)));
        }
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower <= self.upper) {
            return Err(Error::OutOfRange(format!("axis {name}: need finite lower <= upper")));
        }
        Ok(linspace(self.lower, self.upper, self.count))
    }
}

fn axis_name(name: &str) -> &'static str {
    match name {
        "t" => "t",
        "speed" => "speed",
        "interference_ratio" => "interference_ratio",
        _ => "design",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepSpec {
    /// `λ_II` and one `λ_I` column per shrink-stress ratio.
    LiftRatio {
        poisson_ratio: f64,
        t: Axis,
        #[serde(default)]
        shrink_ratios: Vec<f64>,
    },
    /// Peak stress of an annulus on a same-material shaft over (ω², u').
    StressPlane {
        material: Material,
        geometry: AnnulusGeometry,
        max_speed: f64,
        max_interference_ratio: f64,
        count: usize,
    },
    /// Every grid point of the listed variables; others at mid-range.
    Design {
        problem: OptimizationProblem,
        axes: BTreeMap<Variable, Axis>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneFit {
    pub c1: f64,
    pub c2: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    #[serde(default)]
    pub fit: Option<PlaneFit>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_size(points: usize, n: usize) -> Result<()> {
    if points > MAX_SWEEP_POINTS || n > MAX_SWEEP_POINTS {
        return Err(Error::OversizeGrid(points.max(n), MAX_SWEEP_POINTS));
    }
    Ok(())
}

pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    match spec {
        SweepSpec::LiftRatio {
            poisson_ratio,
            t,
            shrink_ratios,
        } => {
            check_size(t.count.saturating_mul(shrink_ratios.len() + 1), 0)?;
            let ts = t.values("t")?;
            let mut columns = vec!["t".to_string(), "lambda_ii".to_string()];
            columns.extend(shrink_ratios.iter().map(|d| format!("lambda_i_{d}")));
            let rows = ts
                .iter()
                .map(|&ti| {
                    let mut row = vec![ti, lift_ratio_type2(ti, *poisson_ratio)?];
                    for &d in shrink_ratios {
                        // λ_I is undefined at t = 1
                        row.push(lift_ratio_type1(ti, *poisson_ratio, d).unwrap_or(f64::NAN));
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepTable {
                columns,
                rows,
                fit: None,
            })
        }
        SweepSpec::StressPlane {
            material,
            geometry,
            max_speed,
            max_interference_ratio,
            count,
        } => {
            check_size(count.saturating_mul(*count), 0)?;
            if *count == 0 {
                return Err(Error::EmptyAxis("speed"));
            }
            let fit = fit_linear_coefficients(material, geometry, &FitGrid::uniform(*max_speed, *max_interference_ratio, *count))?;
            Ok(SweepTable {
                columns: vec!["omega_sq".into(), "interference_ratio".into(), "sigma_m_pa".into()],
                rows: fit
                    .points
                    .iter()
                    .map(|p| vec![p.speed_squared, p.interference_ratio, p.max_von_mises])
                    .collect(),
                fit: Some(PlaneFit {
                    c1: fit.c1,
                    c2: fit.c2,
                    r_squared: fit.r_squared,
                }),
            })
        }
        SweepSpec::Design { problem, axes } => {
            let prep = Prepared::new(problem, false)?;
            let points = axes.values().fold(1usize, |n, a| n.saturating_mul(a.count));
            check_size(points, 0)?;
            let mut grid: Vec<Candidate> = vec![prep
                .free
                .iter()
                .map(|b| (b.variable, b.lower + 0.5 * b.range()))
                .collect()];
            for (v, axis) in axes {
                if !prep.free.iter().any(|b| b.variable == *v) {
                    return Err(invalid(format!("sweep axis {} is not a free variable", v.name())));
                }
                let values = axis.values(v.name())?;
                grid = grid
                    .iter()
                    .flat_map(|c| {
                        values.iter().map(move |&x| {
                            let mut c = c.clone();
                            c.insert(*v, x);
                            c
                        })
                    })
                    .collect();
            }
            for c in &grid {
                prep.check_candidate(c)?;
            }
            let evals = grid.par_iter().map(|c| prep.evaluate(c)).collect::<Result<Vec<_>>>()?;
            let mut columns: Vec<String> = prep.free.iter().map(|b| b.variable.name().to_string()).collect();
            columns.extend(
                ["objective", "feasible", "max_stress_pa", "max_utilization", "angular_speed"].map(String::from),
            );
            let rows = grid
                .iter()
                .zip(&evals)
                .map(|(c, e)| {
                    let mut row: Vec<f64> = prep.free.iter().map(|b| c[&b.variable]).collect();
                    row.extend([
                        e.objective,
                        if e.feasible { 1.0 } else { 0.0 },
                        e.max_stress,
                        e.max_utilization,
                        e.angular_speed,
                    ]);
                    row
                })
                .collect();
            Ok(SweepTable {
                columns,
                rows,
                fit: None,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub lower: f64,
    pub upper: f64,
}

fn default_full() -> AssemblyMode {
    AssemblyMode::FullCompatibility
}

/// A monolithic rotor split at a ring radius, the inner ring shrunk into
/// the outer body to preload it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreloadStudy {
    pub material: Material,
    #[serde(default)]
    pub ring_material: Option<Material>,
    pub outer_radius: f64,
    pub height: f64,
    /// Bore of the base rotor; 0 for a solid disk.
    #[serde(default)]
    pub inner_ratio: f64,
    pub ring_radius: Range,
    pub interference_ratio: Range,
    #[serde(default = "default_full")]
    pub assembly_mode: AssemblyMode,
    #[serde(default)]
    pub criterion: StressCriterion,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default)]
    pub snap: Option<SnapGrid>,
}

pub const PRELOAD_CAVEAT: &str = "Plane-stress, axisymmetric model: gains come only from interference preload of \
the disk body. Improvements from relieving 3-D stress concentrations (fillets, holes, hubs) are outside this \
model and are not reproduced here.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreloadReport {
    pub baseline: Evaluation,
    pub best: OptimizationResult,
    /// m
    pub ring_radius: f64,
    pub interference_ratio: f64,
    /// rad/s
    pub baseline_speed: f64,
    /// rad/s
    pub best_speed: f64,
    pub speed_gain_percent: f64,
    pub energy_gain_percent: f64,
    pub caveat: String,
}

pub fn preload_study(study: &PreloadStudy) -> Result<PreloadReport> {
    let base = BaseDesign {
        outer_radius: study.outer_radius,
        height: study.height,
        inner_ratio: study.inner_ratio,
        angular_speed: None,
        interference_ratio: 0.0,
        ring_radius: None,
    };
    let monolithic = OptimizationProblem {
        objective: Objective::MaxSpeed,
        topology: if study.inner_ratio > 0.0 { Topology::TypeII } else { Topology::Shaftless },
        material: study.material.clone(),
        inner_material: None,
        base,
        variables: Vec::new(),
        couplings: Vec::new(),
        criterion: study.criterion,
        safety_factor: None,
        assembly_mode: study.assembly_mode,
        mass_budget: None,
        seed: study.seed,
        starts: study.starts,
        max_evaluations: default_budget(),
        snap: None,
    };
    let baseline = Prepared::new(&monolithic, false)?.evaluate(&Candidate::new())?;
    let assembly = OptimizationProblem {
        topology: Topology::RingAssembly,
        inner_material: study.ring_material.clone(),
        variables: vec![
            Bounds {
                variable: Variable::RingRadius,
                lower: study.ring_radius.lower,
                upper: study.ring_radius.upper,
            },
            Bounds {
                variable: Variable::InterferenceRatio,
                lower: study.interference_ratio.lower,
                upper: study.interference_ratio.upper,
            },
        ],
        snap: study.snap,
        ..monolithic
    };
    let best = optimize(&assembly)?;
    let ring_radius = best.variables[&Variable::RingRadius];
    let interference_ratio = best.variables[&Variable::InterferenceRatio];
    Ok(PreloadReport {
        baseline_speed: baseline.angular_speed,
        best_speed: best.evaluation.angular_speed,
        speed_gain_percent: 100.0 * (best.evaluation.angular_speed / baseline.angular_speed - 1.0),
        energy_gain_percent: 100.0 * (best.evaluation.energy / baseline.energy - 1.0),
        baseline,
        best,
        ring_radius,
        interference_ratio,
        caveat: PRELOAD_CAVEAT.to_string(),
    })
}
