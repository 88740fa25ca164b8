//! Scenario-driven orchestration: JSON configs in, deterministic JSON
//! report plus CSV tables out. The canned scenarios reproduce the worked
//! examples end to end.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{
    barrier_params_71, barrier_supersolution_check, exhaustion, gauge_forward,
    gauge_residual_identity, solve, Barrier71, BarrierResidualReport, ComparisonReport,
    HeatSolution, ParabolicProblem, ProblemForm, SpaceTimeSample, Stepper,
};
use crate::manifold::GridFunction;
use crate::manifold::{GreenIntegral, ModelManifold, RadialGrid, WarpingFunction};
use crate::numerics::bump;
use crate::potential::Potential;
use crate::spectrum::{estimate_lambda1, Lambda1Sweep};
use crate::stationary::{
    explicit_71, explicit_72, explicit_75, verify_stationary, weak_supersolution_check,
    ProfileKind, ResidualMode, ResidualReport, StationaryProfile, WeakCheck,
};
use crate::uniqueness::{
    equivalence_18_16, h_admissible, verdict, weighted_integral, Condition, HFunction,
    Lambda1Evidence, UniquenessReport, VerdictInputs,
};

// ---------------------------------------------------------------- config

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WarpConfig {
    pub family: String,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifoldConfig {
    pub warp: WarpConfig,
    pub dimension: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialConfig {
    pub family: String,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub b_coef: Option<f64>,
    #[serde(default)]
    pub coef: Option<f64>,
    #[serde(default)]
    pub exponent: Option<f64>,
    #[serde(default)]
    pub offset: Option<f64>,
    #[serde(default)]
    pub floor: Option<f64>,
    #[serde(default)]
    pub growth: Option<GrowthConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub c0: f64,
    pub alpha: f64,
    pub r_bar: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridConfig {
    pub radius: f64,
    pub cells: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeConfig {
    pub t_final: f64,
    pub dt: f64,
    #[serde(default = "default_stepper")]
    pub stepper: String,
}

fn default_stepper() -> String {
    "backward_euler".into()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HConfig {
    #[serde(default = "one")]
    pub c: f64,
    pub kappa: f64,
    #[serde(default)]
    pub log_power: u32,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub radii: Vec<f64>,
    pub cells_per_unit: usize,
    /// Run the sweep on V ≡ 0 instead of the scenario potential
    /// (spectral anchors on curved spaces).
    #[serde(default)]
    pub zero_potential: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BarrierConfig {
    pub r_split: f64,
    #[serde(default = "one")]
    pub a_decay: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExhaustionConfig {
    pub j_schedule: Vec<f64>,
    pub cells_per_unit: usize,
    pub dt: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniquenessConfig {
    /// "eq14" | "eq18" | "eq34" | "eq39" | "eq78"
    pub condition: String,
    #[serde(default)]
    pub data_nonnegative: bool,
    /// Weight by the user-supplied bounded profile
    /// `φ(r) = δ + (1-δ) e^{-r}` instead of the family profile, and report
    /// the two-sided comparison against the unweighted condition.
    #[serde(default)]
    pub bounded_delta: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GreenConfig {
    pub r: f64,
    pub r_max: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub manifold: ManifoldConfig,
    pub potential: PotentialConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub time: Option<TimeConfig>,
    pub analyses: Vec<String>,
    #[serde(default)]
    pub h: Option<HConfig>,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default)]
    pub barrier: Option<BarrierConfig>,
    #[serde(default)]
    pub exhaustion: Option<ExhaustionConfig>,
    #[serde(default)]
    pub uniqueness: Option<UniquenessConfig>,
    #[serde(default)]
    pub green: Option<GreenConfig>,
}

fn default_p() -> f64 {
    1.5
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| Error::BadConfig(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        const KNOWN: [&str; 6] =
            ["stationary", "spectrum", "evolve", "gauge", "exhaustion", "uniqueness"];
        for a in &self.analyses {
            if !KNOWN.contains(&a.as_str()) {
                return Err(Error::BadConfig(format!("unknown analysis '{a}'")));
            }
        }
        if self.grid.radius <= 0.0 || self.grid.cells < 8 {
            return Err(Error::BadConfig("grid needs radius > 0 and cells >= 8".into()));
        }
        if !(self.p > 1.0 && self.p <= 2.0) {
            return Err(Error::BadConfig(format!("p = {} outside (1, 2]", self.p)));
        }
        let needs_time = ["evolve", "gauge"];
        if self.analyses.iter().any(|a| needs_time.contains(&a.as_str())) && self.time.is_none() {
            return Err(Error::BadConfig("evolve/gauge analyses need a time section".into()));
        }
        if self.analyses.iter().any(|a| a == "gauge")
            && !self.analyses.iter().any(|a| a == "evolve")
        {
            return Err(Error::BadConfig("gauge analysis requires evolve".into()));
        }
        if self.analyses.iter().any(|a| a == "exhaustion")
            && (self.exhaustion.is_none() || self.barrier.is_none())
        {
            return Err(Error::BadConfig(
                "exhaustion analysis needs exhaustion and barrier sections".into(),
            ));
        }
        if self.analyses.iter().any(|a| a == "uniqueness") {
            if self.uniqueness.is_none() || self.h.is_none() {
                return Err(Error::BadConfig(
                    "uniqueness analysis needs uniqueness and h sections".into(),
                ));
            }
            let cond = &self.uniqueness.as_ref().expect("checked").condition;
            let has_u_source = self.analyses.iter().any(|a| a == "evolve")
                || (cond == "eq78" && self.barrier.is_some());
            if !has_u_source {
                return Err(Error::BadConfig(
                    "uniqueness needs evolve output or a barrier family".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn build_manifold(&self) -> Result<ModelManifold> {
        let warp = match self.manifold.warp.family.as_str() {
            "euclidean" => WarpingFunction::euclidean(),
            "hyperbolic" => WarpingFunction::hyperbolic(),
            "exp_power" => WarpingFunction::exp_power(
                self.manifold.warp.alpha.unwrap_or(1.0),
                self.manifold.warp.gamma.unwrap_or(2.0),
            )?,
            other => return Err(Error::BadConfig(format!("unknown warp family '{other}'"))),
        };
        ModelManifold::new(self.manifold.dimension, warp)
    }

    pub fn build_potential(&self, manifold: &ModelManifold) -> Result<Potential> {
        let c = &self.potential;
        let pot = match c.family.as_str() {
            "zero" => Potential::zero(),
            "example71" => Potential::example_71(
                c.a.unwrap_or(1.0),
                c.b.unwrap_or(3.0),
                self.manifold.dimension,
            )?,
            "example72" => {
                Potential::example_72(c.a.unwrap_or(1.0), c.b.unwrap_or(3.0), manifold)?
            }
            "example75" => {
                Potential::example_75(c.b_coef.unwrap_or(4.0), self.manifold.dimension)?
            }
            "inline_power" => Potential::inline_power(
                c.coef.unwrap_or(1.0),
                c.exponent.unwrap_or(2.0),
                c.offset.unwrap_or(0.0),
            ),
            other => return Err(Error::BadConfig(format!("unknown potential family '{other}'"))),
        };
        let mut pot = pot;
        if let Some(floor) = c.floor {
            pot = pot.with_floor_cert(floor);
        }
        if let Some(g) = &c.growth {
            pot = pot.with_growth_cert(crate::potential::GrowthCert {
                c0: g.c0,
                alpha: g.alpha,
                r_bar: g.r_bar,
            });
        }
        Ok(pot)
    }

    /// The exact stationary profile paired with the configured potential
    /// family, when one exists.
    pub fn build_profile(&self, manifold: &ModelManifold) -> Result<Option<StationaryProfile>> {
        let c = &self.potential;
        Ok(match c.family.as_str() {
            "example71" => Some(explicit_71(c.a.unwrap_or(1.0), c.b.unwrap_or(3.0))?),
            "example72" => Some(explicit_72(c.a.unwrap_or(1.0), c.b.unwrap_or(3.0), manifold)?),
            "example75" => Some(explicit_75(
                c.b_coef.unwrap_or(4.0),
                self.manifold.dimension,
            )?),
            _ => None,
        })
    }

    fn build_h(&self) -> Option<HFunction> {
        self.h.as_ref().map(|h| HFunction::PowerLog {
            c_h: h.c,
            kappa: h.kappa,
            m_log: h.log_power,
        })
    }

    fn build_stepper(&self) -> Result<Stepper> {
        match self.time.as_ref().map(|t| t.stepper.as_str()) {
            None | Some("backward_euler") => Ok(Stepper::BackwardEuler),
            Some("crank_nicolson") => Ok(Stepper::CrankNicolson),
            Some(other) => Err(Error::BadConfig(format!("unknown stepper '{other}'"))),
        }
    }
}

// ---------------------------------------------------------------- report

#[derive(Clone, Debug, Serialize)]
pub struct StationarySection {
    pub analytic: ResidualReport,
    pub finite_difference: ResidualReport,
    pub weak_check: WeakCheck,
    pub profile_kind: ProfileKind,
    pub decay_tag: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolveSection {
    pub stepper: String,
    pub dt: f64,
    pub steps: usize,
    pub cells: usize,
    pub radius: f64,
    pub sup_norm_initial: f64,
    pub sup_norm_final: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeSection {
    pub two_route_max_discrepancy: f64,
    pub identity_max_abs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BarrierSection {
    pub params: Barrier71,
    pub residual: BarrierResidualReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExhaustionSection {
    pub barrier: BarrierSection,
    pub j_schedule: Vec<f64>,
    pub comparison: ComparisonReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessSection {
    pub report: UniquenessReport,
    pub equivalence_discrepancy: Option<f64>,
    pub lambda1_evidence: Lambda1Evidence,
    pub truncation_ladder: Vec<(f64, f64)>,
    pub bounded_comparison: Option<BoundedComparison>,
}

/// Consequence of two-sided profile bounds `δ <= φ <= 1`: the weighted
/// integral is sandwiched by the unweighted one, so the two conditions
/// are equivalent.
#[derive(Clone, Debug, Serialize)]
pub struct BoundedComparison {
    pub delta: f64,
    pub unweighted_value: f64,
    pub weighted_value: f64,
    /// `weighted / unweighted`, inside `[δ^{2-p}, 1]`.
    pub ratio: f64,
    pub lower_bound: f64,
    pub within_bounds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GreenSection {
    pub result: GreenIntegral,
    /// The same integral one dimension down, for the parabolic contrast.
    pub lower_dimension_non_parabolic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub dimension: u32,
    pub warp: String,
    pub potential: String,
    pub grid_radius: f64,
    pub grid_cells: usize,
    pub p: f64,
    pub green: Option<GreenSection>,
    pub stationary: Option<StationarySection>,
    pub spectrum: Option<Lambda1Sweep>,
    pub evolve: Option<EvolveSection>,
    pub gauge: Option<GaugeSection>,
    pub exhaustion: Option<ExhaustionSection>,
    pub uniqueness: Option<UniquenessSection>,
}

/// A named artifact with its full contents; the CLI writes them to disk,
/// other frontends consume them directly.
pub type Artifact = (String, String);

pub struct RunOutput {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

// ---------------------------------------------------------------- runner

/// Executes the scenario's analyses in dependency order and renders the
/// report plus CSV artifacts. Pure function of the config: identical
/// configs produce byte-identical outputs.
pub fn run_scenario(scenario: &Scenario) -> Result<RunOutput> {
    scenario.validate()?;
    let manifold = scenario.build_manifold()?;
    let pot = scenario.build_potential(&manifold)?;
    let profile = scenario.build_profile(&manifold)?;
    let grid = RadialGrid::new(scenario.grid.radius, scenario.grid.cells)?;
    let has = |name: &str| scenario.analyses.iter().any(|a| a == name);

    let mut artifacts: Vec<Artifact> = Vec::new();

    let green = match &scenario.green {
        Some(g) => {
            let result = manifold.green_integral_pole(g.r, g.r_max)?;
            let lower = ModelManifold::new(
                (manifold.dim() - 1).max(2),
                manifold.warp().clone(),
            )?;
            let lower_result = lower.green_integral_pole(g.r, g.r_max)?;
            Some(GreenSection {
                result,
                lower_dimension_non_parabolic: lower_result.non_parabolic,
            })
        }
        None => None,
    };

    let stationary = if has("stationary") {
        let prof = profile.as_ref().ok_or_else(|| {
            Error::BadConfig("stationary analysis needs an explicit-profile potential".into())
        })?;
        let analytic = verify_stationary(prof, &pot, &manifold, &grid, ResidualMode::Analytic)?;
        let fd = verify_stationary(prof, &pot, &manifold, &grid, ResidualMode::FiniteDifference)?;
        // weak form on a pole-centered subwindow fine enough for the
        // truncation error to sit inside the sign tolerance
        let weak_grid = RadialGrid::new(grid.r_outer().min(2.0), 8192)?;
        let weak = weak_supersolution_check(prof, &pot, &manifold, &weak_grid)?;
        Some(StationarySection {
            analytic,
            finite_difference: fd,
            weak_check: weak,
            profile_kind: prof.kind,
            decay_tag: prof.decay_tag.clone(),
        })
    } else {
        None
    };

    let spectrum = if has("spectrum") {
        let cfg = scenario
            .spectrum
            .as_ref()
            .ok_or_else(|| Error::BadConfig("spectrum analysis needs a spectrum section".into()))?;
        let sweep_pot = if cfg.zero_potential { Potential::zero() } else { pot.clone() };
        let sweep = estimate_lambda1(&manifold, &sweep_pot, &cfg.radii, cfg.cells_per_unit)?;
        let mut csv = String::from("R,N,lambda1,residual,iterations\n");
        for row in &sweep.rows {
            csv.push_str(&format!(
                "{},{},{:.12e},{:.3e},{}\n",
                row.radius, row.cells, row.lambda, row.residual, row.iterations
            ));
        }
        artifacts.push(("spectrum_sweep.csv".into(), csv));
        Some(sweep)
    } else {
        None
    };

    let heat = if has("evolve") {
        let time = scenario.time.as_ref().expect("validated");
        let u0 = GridFunction::sample(grid, |r| {
            bump(r, grid.r_outer() / 8.0, grid.r_outer() / 12.0)
        });
        let problem = ParabolicProblem {
            form: ProblemForm::Original(pot.clone()),
            manifold: manifold.clone(),
            grid,
            u0,
            t_final: time.t_final,
            dt: time.dt,
            stepper: scenario.build_stepper()?,
        };
        Some(solve(&problem)?)
    } else {
        None
    };

    let evolve_section = heat.as_ref().map(|sol| {
        let sup = |f: &[f64]| f.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        // frame dumps at the first, middle, and final time
        for (label, k) in
            [("t0", 0usize), ("tmid", sol.frames.len() / 2), ("tfinal", sol.frames.len() - 1)]
        {
            let mut csv = String::from("r,u\n");
            for (i, &u) in sol.frames[k].iter().enumerate() {
                csv.push_str(&format!("{:.12e},{:.12e}\n", sol.grid.node(i), u));
            }
            artifacts.push((format!("frame_{label}.csv"), csv));
        }
        EvolveSection {
            stepper: scenario
                .time
                .as_ref()
                .map(|t| t.stepper.clone())
                .unwrap_or_else(default_stepper),
            dt: scenario.time.as_ref().expect("validated").dt,
            steps: sol.frames.len() - 1,
            cells: sol.grid.n_cells(),
            radius: sol.grid.r_outer(),
            sup_norm_initial: sup(&sol.frames[0]),
            sup_norm_final: sup(sol.last_frame()),
        }
    });

    let gauge = if has("gauge") {
        let prof = profile.as_ref().ok_or_else(|| {
            Error::BadConfig("gauge analysis needs an explicit-profile potential".into())
        })?;
        let sol = heat.as_ref().expect("validated: gauge requires evolve");
        let transformed = gauge_forward(sol, prof)?;
        let w0 = GridFunction::new(
            grid,
            sol.frames[0]
                .iter()
                .enumerate()
                .map(|(i, &u)| u / prof.value(grid.node(i)))
                .collect(),
        );
        let weighted_problem = ParabolicProblem {
            form: ProblemForm::Weighted(prof.clone()),
            manifold: manifold.clone(),
            grid,
            u0: w0,
            t_final: scenario.time.as_ref().expect("validated").t_final,
            dt: scenario.time.as_ref().expect("validated").dt,
            stepper: scenario.build_stepper()?,
        };
        let direct = solve(&weighted_problem)?;
        let mut max_disc = 0.0f64;
        for (fa, fb) in transformed.frames.iter().zip(&direct.frames) {
            for (a, b) in fa.iter().zip(fb) {
                max_disc = max_disc.max((a - b).abs());
            }
        }
        let test_u = |r: f64, t: f64| {
            let spatial = (-r * r).exp();
            let temporal = (-t).exp();
            SpaceTimeSample {
                value: temporal * spatial,
                dr: temporal * (-2.0 * r) * spatial,
                drr: temporal * (4.0 * r * r - 2.0) * spatial,
                dt: -temporal * spatial,
            }
        };
        let r_probes: Vec<f64> = (1..=40).map(|i| 0.1 + 1.9 * i as f64 / 40.0).collect();
        let t_probes: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        let identity =
            gauge_residual_identity(prof, &pot, &manifold, &test_u, &r_probes, &t_probes)?;
        Some(GaugeSection {
            two_route_max_discrepancy: max_disc,
            identity_max_abs: identity.max_abs_discrepancy,
        })
    } else {
        None
    };

    let exhaustion_section = if has("exhaustion") {
        let bar_cfg = scenario.barrier.as_ref().expect("validated");
        let ex_cfg = scenario.exhaustion.as_ref().expect("validated");
        let bar = build_barrier(scenario, &pot, bar_cfg)?;
        let j_max = *ex_cfg.j_schedule.last().ok_or_else(|| {
            Error::BadConfig("exhaustion needs a nonempty j schedule".into())
        })?;
        let check_grid =
            RadialGrid::new(j_max, ((j_max * 250.0) as usize).max(500))?;
        let t_probes: Vec<f64> = (0..=8).map(|i| bar.t_max * i as f64 / 8.0).collect();
        let residual =
            barrier_supersolution_check(&bar, &pot, &manifold, &check_grid, &t_probes)?;
        let run = exhaustion(
            &bar,
            &pot,
            &manifold,
            &ex_cfg.j_schedule,
            ex_cfg.cells_per_unit,
            ex_cfg.dt,
        )?;
        let mut csv = String::from("j,cauchy_gap\n");
        for (j, gap) in ex_cfg.j_schedule.windows(2).zip(&run.report.cauchy_gaps) {
            csv.push_str(&format!("{},{:.12e}\n", j[1], gap));
        }
        artifacts.push(("exhaustion_cauchy.csv".into(), csv));
        Some(ExhaustionSection {
            barrier: BarrierSection { params: bar, residual },
            j_schedule: run.j_schedule.clone(),
            comparison: run.report.clone(),
        })
    } else {
        None
    };

    let uniqueness_section = if has("uniqueness") {
        let u_cfg = scenario.uniqueness.as_ref().expect("validated");
        let h = scenario.build_h().expect("validated");
        let h_ok = h_admissible(&h)?;

        // the solution family under test: the evolve run, or the barrier
        // family for the growth condition
        let (sol, data_nonnegative) = match (&heat, u_cfg.condition.as_str()) {
            (Some(sol), _) => (sol.clone(), frames_nonnegative(sol)),
            (None, "eq78") => {
                let bar_cfg = scenario.barrier.as_ref().expect("validated");
                let bar = build_barrier(scenario, &pot, bar_cfg)?;
                let sample_grid = RadialGrid::new(8.0, 800)?;
                let times: Vec<f64> =
                    (0..=16).map(|k| bar.t_max * k as f64 / 16.0).collect();
                let sol = HeatSolution::from_fn(
                    sample_grid,
                    times,
                    |r, t| bar.eval(r, t).expect("t inside the window"),
                    false,
                );
                (sol, true)
            }
            _ => unreachable!("validated"),
        };

        let condition = parse_condition(&u_cfg.condition, scenario, &pot)?;
        let bounded_profile = u_cfg.bounded_delta.map(|delta| {
            StationaryProfile::from_parts(
                ProfileKind::Supersolution,
                format!("{delta} + {}*exp(-r)", 1.0 - delta),
                f64::INFINITY,
                move |r| {
                    let e = (-r).exp();
                    (delta + (1.0 - delta) * e, -(1.0 - delta) * e, (1.0 - delta) * e)
                },
            )
        });
        let weight = match condition {
            Condition::Eq18 | Condition::Eq34 => bounded_profile.clone().or_else(|| profile.clone()),
            _ => None,
        };
        let (value, finite) =
            weighted_integral(&sol, &h, weight.as_ref(), scenario.p, &manifold, condition)?;

        // truncation ladder artifact
        let mut ladder = Vec::new();
        let mut csv = String::from("r_trunc,value\n");
        for frac in [0.25, 0.5, 0.75, 1.0] {
            let cells = ((sol.grid.n_cells() as f64 * frac).round() as usize).max(8);
            let sub_grid = RadialGrid::new(cells as f64 * sol.grid.spacing(), cells)?;
            let sub = HeatSolution {
                grid: sub_grid,
                times: sol.times.clone(),
                frames: sol.frames.iter().map(|f| f[..cells].to_vec()).collect(),
                weighted: sol.weighted,
            };
            let (v, _) =
                weighted_integral(&sub, &h, weight.as_ref(), scenario.p, &manifold, condition)?;
            ladder.push((sub_grid.r_outer(), v));
            csv.push_str(&format!("{:.6},{:.12e}\n", sub_grid.r_outer(), v));
        }
        artifacts.push(("uniqueness_truncation.csv".into(), csv));

        let equivalence_discrepancy = match (&bounded_profile, &profile) {
            (Some(prof), _) | (None, Some(prof)) if heat.is_some() => {
                Some(equivalence_18_16(&sol, prof, &h, scenario.p, &manifold)?)
            }
            _ => None,
        };

        let bounded_comparison = match (&bounded_profile, u_cfg.bounded_delta) {
            (Some(prof), Some(delta)) => {
                let (unweighted, _) =
                    weighted_integral(&sol, &h, None, scenario.p, &manifold, Condition::Eq14)?;
                let (weighted_v, _) = weighted_integral(
                    &sol,
                    &h,
                    Some(prof),
                    scenario.p,
                    &manifold,
                    Condition::Eq18,
                )?;
                let ratio = weighted_v / unweighted.max(f64::MIN_POSITIVE);
                let lower_bound = delta.powf(2.0 - scenario.p);
                Some(BoundedComparison {
                    delta,
                    unweighted_value: unweighted,
                    weighted_value: weighted_v,
                    ratio,
                    lower_bound,
                    within_bounds: ratio >= lower_bound * (1.0 - 1e-12)
                        && ratio <= 1.0 + 1e-12,
                })
            }
            _ => None,
        };

        // spectral-bottom evidence: a verified exact profile certifies
        // Λ₁ >= 0 outright; otherwise extrapolate from the ball sweep
        let lambda1 = if let Some(prof) = &profile {
            let check =
                verify_stationary(prof, &pot, &manifold, &grid, ResidualMode::Analytic)?;
            if check.max_abs
                < 1e-8 * grid.nodes().map(|r| pot.eval(r).abs()).fold(1.0, f64::max)
            {
                Lambda1Evidence::NonnegativeByPositiveSolution
            } else {
                Lambda1Evidence::Unknown
            }
        } else if let Some(sweep) = &spectrum {
            if scenario.spectrum.as_ref().is_some_and(|c| !c.zero_potential) {
                Lambda1Evidence::Estimated(sweep.extrapolated)
            } else {
                own_lambda1_evidence(scenario, &manifold, &pot)?
            }
        } else {
            own_lambda1_evidence(scenario, &manifold, &pot)?
        };

        let inputs = VerdictInputs {
            condition,
            p: scenario.p,
            h_admissible: h_ok,
            lambda1,
            profile_kind: if bounded_profile.is_some() {
                None
            } else {
                profile.as_ref().map(|p| p.kind)
            },
            data_nonnegative: data_nonnegative || u_cfg.data_nonnegative,
            has_growth_cert: pot.growth_cert.is_some(),
            has_floor_cert: pot.floor_cert.is_some(),
            integral_finite: finite,
        };
        let report = verdict(&inputs, value);
        Some(UniquenessSection {
            report,
            equivalence_discrepancy,
            lambda1_evidence: lambda1,
            truncation_ladder: ladder,
            bounded_comparison,
        })
    } else {
        None
    };

    let report = Report {
        scenario: scenario.name.clone(),
        dimension: scenario.manifold.dimension,
        warp: scenario.manifold.warp.family.clone(),
        potential: pot.label.clone(),
        grid_radius: scenario.grid.radius,
        grid_cells: scenario.grid.cells,
        p: scenario.p,
        green,
        stationary,
        spectrum,
        evolve: evolve_section,
        gauge,
        exhaustion: exhaustion_section,
        uniqueness: uniqueness_section,
    };
    Ok(RunOutput { report, artifacts })
}

/// Dedicated λ₁ sweep on the scenario potential at radii `{R/2, 3R/4, R}`.
fn own_lambda1_evidence(
    scenario: &Scenario,
    manifold: &ModelManifold,
    pot: &Potential,
) -> Result<Lambda1Evidence> {
    let r = scenario.grid.radius;
    let density = (scenario.grid.cells as f64 / r).round().max(50.0) as usize;
    let sweep = estimate_lambda1(manifold, pot, &[r / 2.0, 0.75 * r, r], density)?;
    Ok(Lambda1Evidence::Estimated(sweep.extrapolated))
}

fn frames_nonnegative(sol: &HeatSolution) -> bool {
    let peak = sol
        .frames
        .iter()
        .flat_map(|f| f.iter())
        .fold(0.0f64, |a, &b| a.max(b.abs()));
    sol.frames
        .iter()
        .all(|f| f.iter().all(|&v| v >= -1e-12 * peak))
}

fn build_barrier(
    scenario: &Scenario,
    pot: &Potential,
    cfg: &BarrierConfig,
) -> Result<Barrier71> {
    let a = scenario.potential.a.unwrap_or(1.0);
    let b = scenario.potential.b.unwrap_or(3.0);
    let n = scenario.manifold.dimension;
    let c0 = pot
        .growth_cert
        .ok_or_else(|| Error::BadConfig("barrier needs a growth certificate".into()))?
        .c0;
    let m_floor = pot
        .floor_cert
        .ok_or_else(|| Error::BadConfig("barrier needs a floor certificate".into()))?;
    barrier_params_71(a, b, n, c0, cfg.r_split, m_floor, scenario.p, cfg.a_decay)
}

fn parse_condition(name: &str, scenario: &Scenario, pot: &Potential) -> Result<Condition> {
    Ok(match name {
        "eq14" => Condition::Eq14,
        "eq18" => Condition::Eq18,
        "eq34" => Condition::Eq34,
        "eq39" => {
            let cert = pot.growth_cert.ok_or_else(|| {
                Error::BadConfig("eq39 needs a growth certificate for a0".into())
            })?;
            let e = crate::potential::CriticalExponent::from_cert(&cert);
            Condition::Eq39 { a0: e.a0, gamma: e.gamma_exp }
        }
        "eq78" => Condition::Eq78 {
            a_decay: scenario.potential.a.unwrap_or(1.0),
            b: scenario.potential.b.unwrap_or(3.0),
        },
        other => return Err(Error::BadConfig(format!("unknown condition '{other}'"))),
    })
}

// ------------------------------------------------------------- reproduce

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleId {
    Ex71a,
    Ex71b,
    Ex72,
    Ex73,
    Ex74,
    Ex75,
}

impl std::str::FromStr for ExampleId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ex71a" => ExampleId::Ex71a,
            "ex71b" => ExampleId::Ex71b,
            "ex72" => ExampleId::Ex72,
            "ex73" => ExampleId::Ex73,
            "ex74" => ExampleId::Ex74,
            "ex75" => ExampleId::Ex75,
            other => return Err(Error::UnknownExample(other.into())),
        })
    }
}

/// Canned scenario for each worked example.
pub fn reproduce(id: ExampleId) -> Scenario {
    let json = match id {
        ExampleId::Ex71a => {
            r#"{
  "name": "ex71a",
  "manifold": {"warp": {"family": "euclidean"}, "dimension": 3},
  "potential": {"family": "example71", "a": 1.0, "b": 3.0},
  "grid": {"radius": 6.0, "cells": 1200},
  "time": {"t_final": 0.02, "dt": 1e-4, "stepper": "backward_euler"},
  "analyses": ["stationary", "spectrum", "evolve", "gauge", "uniqueness"],
  "h": {"kappa": 2.0},
  "p": 1.5,
  "spectrum": {"radii": [6.0, 9.0, 12.0], "cells_per_unit": 500},
  "uniqueness": {"condition": "eq18"}
}"#
        }
        ExampleId::Ex71b => {
            r#"{
  "name": "ex71b",
  "manifold": {"warp": {"family": "euclidean"}, "dimension": 3},
  "potential": {"family": "example71", "a": 1.0, "b": 3.0},
  "grid": {"radius": 8.0, "cells": 1600},
  "analyses": ["exhaustion", "uniqueness"],
  "h": {"kappa": 2.0},
  "p": 1.5,
  "barrier": {"r_split": 2.0, "a_decay": 1.0},
  "exhaustion": {"j_schedule": [4.0, 6.0, 8.0], "cells_per_unit": 200, "dt": 1e-4},
  "uniqueness": {"condition": "eq78"}
}"#
        }
        ExampleId::Ex72 => {
            r#"{
  "name": "ex72",
  "manifold": {"warp": {"family": "exp_power", "alpha": 1.0, "gamma": 2.0}, "dimension": 3},
  "potential": {"family": "example72", "a": 1.0, "b": 3.0},
  "grid": {"radius": 5.0, "cells": 1000},
  "analyses": ["stationary"]
}"#
        }
        ExampleId::Ex73 => {
            r#"{
  "name": "ex73",
  "manifold": {"warp": {"family": "hyperbolic"}, "dimension": 3},
  "potential": {"family": "inline_power", "coef": 1.0, "exponent": 2.0, "offset": -0.9,
                "floor": 1.0, "growth": {"c0": 0.5, "alpha": 2.0, "r_bar": 1.35}},
  "grid": {"radius": 10.0, "cells": 2000},
  "time": {"t_final": 0.05, "dt": 5e-4, "stepper": "backward_euler"},
  "analyses": ["spectrum", "evolve", "uniqueness"],
  "h": {"kappa": 2.0},
  "p": 1.5,
  "spectrum": {"radii": [10.0, 20.0, 40.0], "cells_per_unit": 200, "zero_potential": true},
  "uniqueness": {"condition": "eq39", "data_nonnegative": true}
}"#
        }
        ExampleId::Ex74 => {
            r#"{
  "name": "ex74",
  "manifold": {"warp": {"family": "euclidean"}, "dimension": 3},
  "potential": {"family": "zero"},
  "grid": {"radius": 10.0, "cells": 1000},
  "time": {"t_final": 0.05, "dt": 5e-4, "stepper": "backward_euler"},
  "analyses": ["evolve", "uniqueness"],
  "h": {"kappa": 2.0},
  "p": 1.5,
  "uniqueness": {"condition": "eq18", "bounded_delta": 0.5},
  "green": {"r": 1.0, "r_max": 1000.0}
}"#
        }
        ExampleId::Ex75 => {
            r#"{
  "name": "ex75",
  "manifold": {"warp": {"family": "euclidean"}, "dimension": 3},
  "potential": {"family": "example75", "b_coef": 4.0},
  "grid": {"radius": 20.0, "cells": 2000},
  "time": {"t_final": 0.05, "dt": 5e-4, "stepper": "backward_euler"},
  "analyses": ["stationary", "evolve", "uniqueness"],
  "h": {"kappa": 2.0},
  "p": 1.5,
  "uniqueness": {"condition": "eq18"}
}"#
        }
    };
    Scenario::from_json(json).expect("canned scenarios validate")
}

/// Runs a scenario and writes `report.json` plus CSV artifacts to
/// `out_dir`, creating it if needed.
pub fn run_to_dir(scenario: &Scenario, out_dir: &Path) -> Result<Report> {
    let output = run_scenario(scenario)?;
    std::fs::create_dir_all(out_dir)?;
    let mut json = serde_json::to_string_pretty(&output.report)?;
    json.push('\n');
    std::fs::write(out_dir.join("report.json"), json)?;
    for (name, contents) in &output.artifacts {
        std::fs::write(out_dir.join(name), contents)?;
    }
    Ok(output.report)
}
