//! Implicit time stepping for the original flow `u_t = Δu - Vu` and the
//! weighted flow `w_t = Δ_μ w`, the gauge transform between them, growing
//! supersolution barriers for the sign-changing polynomial potential, and
//! the exhaustion scheme on nested balls.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::{GridFunction, ModelManifold, RadialGrid};
use crate::numerics::{smoothstep, solve_tridiagonal};
use crate::potential::Potential;
use crate::spectrum::{assemble, assemble_weighted};
use crate::stationary::StationaryProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stepper {
    /// Monotone (M-matrix) stepping; the default for comparison work.
    BackwardEuler,
    /// Second order in time; for accuracy studies only.
    CrankNicolson,
}

#[derive(Clone, Debug)]
pub enum ProblemForm {
    Original(Potential),
    Weighted(StationaryProfile),
}

#[derive(Clone, Debug)]
pub struct ParabolicProblem {
    pub form: ProblemForm,
    pub manifold: ModelManifold,
    pub grid: RadialGrid,
    pub u0: GridFunction,
    pub t_final: f64,
    pub dt: f64,
    pub stepper: Stepper,
}

/// Time-indexed family of frames; `weighted` tags which flow produced it.
#[derive(Clone, Debug)]
pub struct HeatSolution {
    pub grid: RadialGrid,
    pub times: Vec<f64>,
    pub frames: Vec<Vec<f64>>,
    pub weighted: bool,
}

impl HeatSolution {
    pub fn frame(&self, k: usize) -> &[f64] {
        &self.frames[k]
    }

    pub fn last_frame(&self) -> &[f64] {
        self.frames.last().expect("solutions always hold the initial frame")
    }

    /// Builds a synthetic solution from a space-time callable (used to
    /// feed closed-form families into the space-time integrals).
    pub fn from_fn(
        grid: RadialGrid,
        times: Vec<f64>,
        f: impl Fn(f64, f64) -> f64,
        weighted: bool,
    ) -> Self {
        let frames = times
            .iter()
            .map(|&t| grid.nodes().map(|r| f(r, t)).collect())
            .collect();
        Self { grid, times, frames, weighted }
    }
}

/// Implicit solve of the parabolic problem. The step count is
/// `ceil(T/dt)` with the step shrunk to cover `[0, T]` exactly; Dirichlet
/// zero on the outer face, zero flux through the pole.
pub fn solve(problem: &ParabolicProblem) -> Result<HeatSolution> {
    if problem.t_final <= 0.0 || problem.dt <= 0.0 {
        return Err(Error::BadConfig("need t_final > 0 and dt > 0".into()));
    }
    let (op, weighted) = match &problem.form {
        ProblemForm::Original(pot) => {
            (assemble(&problem.manifold, pot, &problem.grid)?, false)
        }
        ProblemForm::Weighted(profile) => {
            (assemble_weighted(&problem.manifold, profile, &problem.grid)?, true)
        }
    };
    assert_eq!(problem.u0.grid, problem.grid, "initial data lives on the solve grid");

    let steps = (problem.t_final / problem.dt).ceil().max(1.0) as usize;
    let dt = problem.t_final / steps as f64;

    let n = op.n();
    let mass = op.mass_weights();
    let a_diag = op.diag();
    let a_off = op.off_diag();

    // system matrix M + θ dt A with θ = 1 (BE) or 1/2 (CN)
    let theta = match problem.stepper {
        Stepper::BackwardEuler => 1.0,
        Stepper::CrankNicolson => 0.5,
    };
    let sys_diag: Vec<f64> = (0..n).map(|i| mass[i] + theta * dt * a_diag[i]).collect();
    let sys_off: Vec<f64> = a_off.iter().map(|o| theta * dt * o).collect();

    let mut times = Vec::with_capacity(steps + 1);
    let mut frames = Vec::with_capacity(steps + 1);
    times.push(0.0);
    frames.push(problem.u0.values.clone());

    let mut current = problem.u0.values.clone();
    for k in 1..=steps {
        let mut rhs = vec![0.0; n];
        match problem.stepper {
            Stepper::BackwardEuler => {
                for i in 0..n {
                    rhs[i] = mass[i] * current[i];
                }
            }
            Stepper::CrankNicolson => {
                let au = op.apply(&current);
                for i in 0..n {
                    rhs[i] = mass[i] * current[i] - 0.5 * dt * au[i];
                }
            }
        }
        solve_tridiagonal(&sys_off, &sys_diag, &sys_off, &mut rhs)?;
        current = rhs;
        times.push(k as f64 * dt);
        frames.push(current.clone());
    }
    Ok(HeatSolution { grid: problem.grid, times, frames, weighted })
}

/// Gauge transform `w = u/φ`: divides every frame pointwise and retags the
/// solution as weighted (`dμ = φ² dν`). Nodes where φ underflows the
/// double-precision guard are rejected; runs are set up to stay inside it.
pub fn gauge_forward(u: &HeatSolution, profile: &StationaryProfile) -> Result<HeatSolution> {
    let phi: Vec<f64> = u.grid.nodes().map(|r| profile.value(r)).collect();
    for (i, &p) in phi.iter().enumerate() {
        if p < 1e-300 {
            return Err(Error::GaugeUnderflow(u.grid.node(i)));
        }
    }
    let frames = u
        .frames
        .iter()
        .map(|f| f.iter().zip(&phi).map(|(v, p)| v / p).collect())
        .collect();
    Ok(HeatSolution { grid: u.grid, times: u.times.clone(), frames, weighted: true })
}

/// Space-time sample of a smooth test function: value and the radial/time
/// derivatives the residual identity needs.
#[derive(Clone, Copy, Debug)]
pub struct SpaceTimeSample {
    pub value: f64,
    pub dr: f64,
    pub drr: f64,
    pub dt: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GaugeIdentityReport {
    pub max_abs_discrepancy: f64,
    pub probes: usize,
}

/// Checks the pointwise identity `res_μ(u/φ) = res_orig(u)/φ` for an
/// exact stationary φ, with analytic derivatives on a probe lattice:
/// `res_orig(u) = u_t - Δu + Vu`, `res_μ(w) = w_t - Δw - 2(φ'/φ) w'`.
pub fn gauge_residual_identity(
    profile: &StationaryProfile,
    pot: &Potential,
    manifold: &ModelManifold,
    test_u: &dyn Fn(f64, f64) -> SpaceTimeSample,
    r_probes: &[f64],
    t_probes: &[f64],
) -> Result<GaugeIdentityReport> {
    // precondition: φ is an exact solution on the probe range
    for &r in r_probes {
        let (phi, dphi, ddphi) = profile.eval(r);
        let res = ddphi + manifold.drift(r)? * dphi - pot.eval(r) * phi;
        if res.abs() > 1e-8 * (pot.eval(r).abs() * phi + ddphi.abs()).max(1e-30) {
            return Err(Error::InvalidParameter {
                name: "profile",
                value: r,
                reason: "gauge identity needs an exact stationary profile",
            });
        }
    }

    let mut max_abs = 0.0f64;
    let mut probes = 0usize;
    for &r in r_probes {
        let m = manifold.drift(r)?;
        let (phi, dphi, ddphi) = profile.eval(r);
        for &t in t_probes {
            let s = test_u(r, t);
            let res_orig = s.dt - (s.drr + m * s.dr) + pot.eval(r) * s.value;

            let _w = s.value / phi;
            let dw = (s.dr * phi - s.value * dphi) / (phi * phi);
            let ddw = s.drr / phi - 2.0 * s.dr * dphi / (phi * phi)
                - s.value * ddphi / (phi * phi)
                + 2.0 * s.value * dphi * dphi / (phi * phi * phi);
            let dwt = s.dt / phi;
            let res_mu = dwt - (ddw + m * dw) - 2.0 * (dphi / phi) * dw;

            max_abs = max_abs.max((res_mu - res_orig / phi).abs());
            probes += 1;
        }
    }
    Ok(GaugeIdentityReport { max_abs_discrepancy: max_abs, probes })
}

/// Growing supersolution barrier `ū = exp(θ)` with
/// `θ(r, t) = A(1+Qt) r^b + A Q R^b t`.
///
/// The time drift term `A Q R^b t` is what makes the ball estimate work:
/// `θ_t = AQ(r^b + R^b) >= A Q R^b` dominates the potential floor on
/// `B_R`, while outside `B_R` it is a nonnegative bonus on top of the
/// certified growth of V. At `t = 0` the barrier is plain `exp(A r^b)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Barrier71 {
    /// Growth amplitude A.
    pub a_growth: f64,
    /// Time rate Q.
    pub q_rate: f64,
    /// Usable window end, fixed at 1/(4Q).
    pub t_max: f64,
    pub b: f64,
    /// K = A(1 + Q T_max); the uniqueness-class growth exponent.
    pub k_growth: f64,
    /// Region split radius R: growth certificate outside, floor inside.
    pub r_split: f64,
    /// |inf V| over the ball B_R.
    pub m_floor: f64,
}

/// Deterministic barrier parameter selection: A starts at the outer-region
/// cap `(1/b)√(c0/2)` and halves until
///   (i)   A² b² C <= c0/2                      (quadratic gradient term),
///   (ii)  A √C b(n+b-2) <= (c0/4) R^b          (Laplacian term),
///   (iii) K = A(1+Q T_max) < a_decay (2 - p)   (integrability),
/// with `C = (1 + Q T_max)² = 25/16` pinned by `T_max = 1/(4Q)`. Q is then
/// the smallest rate satisfying the ball inequality
/// `A Q R^b >= A √C b(n+b-2) R^{b-2} + A² C b² R^{2b-2} + M`, times a 1.25
/// safety factor that keeps the margin clear of discretization error.
#[allow(clippy::too_many_arguments)]
pub fn barrier_params_71(
    a: f64,
    b: f64,
    n: u32,
    c0: f64,
    r_split: f64,
    m_floor: f64,
    p: f64,
    a_decay: f64,
) -> Result<Barrier71> {
    if !(1.0 < p && p < 2.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "barrier selection needs 1 < p < 2",
        });
    }
    if a <= 0.0 || b <= 2.0 || c0 <= 0.0 || r_split <= 0.0 || m_floor < 0.0 {
        return Err(Error::InvalidParameter {
            name: "barrier inputs",
            value: c0,
            reason: "need a > 0, b > 2, c0 > 0, R > 0, M >= 0",
        });
    }
    let nn = n as f64;
    let lam = 1.25; // 1 + Q T_max with T_max = 1/(4Q)
    let big_c = lam * lam;

    let a_cap = (1.0 / b) * (c0 / 2.0).sqrt();
    let mut binding: &'static str = "initial cap";
    for k in 0..=60 {
        let a_growth = a_cap * 0.5f64.powi(k);
        if a_growth * a_growth * b * b * big_c > c0 / 2.0 {
            binding = "outer gradient bound A²b²C <= c0/2";
            continue;
        }
        if a_growth * lam * b * (nn + b - 2.0) > c0 / 4.0 * r_split.powf(b) {
            binding = "outer Laplacian bound A√C b(n+b-2) <= c0 R^b/4";
            continue;
        }
        let k_growth = a_growth * lam;
        if k_growth >= a_decay * (2.0 - p) {
            binding = "integrability bound K < a(2-p)";
            continue;
        }
        let rhs = a_growth * lam * b * (nn + b - 2.0) * r_split.powf(b - 2.0)
            + a_growth * a_growth * big_c * b * b * r_split.powf(2.0 * b - 2.0)
            + m_floor;
        let q_rate = 1.25 * rhs / (a_growth * r_split.powf(b));
        let t_max = 1.0 / (4.0 * q_rate);
        debug_assert!(a_growth * q_rate * r_split.powf(b) >= rhs);
        return Ok(Barrier71 {
            a_growth,
            q_rate,
            t_max,
            b,
            k_growth,
            r_split,
            m_floor,
        });
    }
    Err(Error::BarrierInfeasible { halvings: 60, binding })
}

impl Barrier71 {
    pub fn theta(&self, r: f64, t: f64) -> f64 {
        self.a_growth * (1.0 + self.q_rate * t) * r.powf(self.b)
            + self.a_growth * self.q_rate * self.r_split.powf(self.b) * t
    }

    /// `ū(r, t) = exp(θ)`, defined on the window `0 <= t <= t_max`.
    pub fn eval(&self, r: f64, t: f64) -> Result<f64> {
        if !(0.0..=self.t_max * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::BarrierTimeRange { t, t_max: self.t_max });
        }
        Ok(self.theta(r, t).exp())
    }

    /// Initial slice `ū(·, 0) = exp(A r^b)`.
    pub fn initial(&self, r: f64) -> f64 {
        (self.a_growth * r.powf(self.b)).exp()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BarrierResidualReport {
    pub min_relative_residual: f64,
    /// `(r, t)` of the deepest residual, when it dips below tolerance.
    pub violation: Option<(f64, f64)>,
    pub probes: usize,
}

/// Signed supersolution residual of the barrier,
/// `θ_t - Δθ - |∇θ|² + V` with analytic derivatives at every
/// (node, t_probe) pair; nonnegative (within 1e-9 of scale) for barriers
/// produced by the parameter selection.
pub fn barrier_supersolution_check(
    bar: &Barrier71,
    pot: &Potential,
    manifold: &ModelManifold,
    grid: &RadialGrid,
    t_probes: &[f64],
) -> Result<BarrierResidualReport> {
    let mut min_rel = f64::INFINITY;
    let mut violation = None;
    let mut probes = 0usize;
    for r in grid.nodes() {
        let m = manifold.drift(r)?;
        let v = pot.eval(r);
        for &t in t_probes {
            if t < 0.0 || t > bar.t_max {
                return Err(Error::BarrierTimeRange { t, t_max: bar.t_max });
            }
            let lam = 1.0 + bar.q_rate * t;
            let theta_t = bar.a_growth
                * bar.q_rate
                * (r.powf(bar.b) + bar.r_split.powf(bar.b));
            let dtheta = bar.a_growth * lam * bar.b * r.powf(bar.b - 1.0);
            let ddtheta = bar.a_growth * lam * bar.b * (bar.b - 1.0) * r.powf(bar.b - 2.0);
            let g = theta_t - ddtheta - m * dtheta - dtheta * dtheta + v;
            let scale = theta_t.abs() + ddtheta.abs() + (m * dtheta).abs()
                + dtheta * dtheta
                + v.abs()
                + f64::MIN_POSITIVE;
            let rel = g / scale;
            if rel < min_rel {
                min_rel = rel;
                if rel < -1e-9 {
                    violation = Some((r, t));
                }
            }
            probes += 1;
        }
    }
    Ok(BarrierResidualReport { min_relative_residual: min_rel, violation, probes })
}

/// Smooth cutoff for the exhaustion scheme: 1 on `B_{j-1}`, cubic
/// smoothstep down to 0 on the shell `[j-1, j]`.
pub fn cutoff(r: f64, j: f64) -> f64 {
    1.0 - smoothstep(r - (j - 1.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    /// Worst violation of `u_j >= 0`, relative to the local barrier value.
    pub max_negative_rel: f64,
    /// Worst violation of `u_j <= u_{j+1}` on the common ball.
    pub max_monotone_violation_rel: f64,
    /// Worst violation of `u_j <= ū`.
    pub max_barrier_violation_rel: f64,
    /// `sup_{B_{j_min}} (u_{j+1} - u_j)` at the final time, per pair.
    pub cauchy_gaps: Vec<f64>,
}

#[derive(Debug)]
pub struct ExhaustionRun {
    pub j_schedule: Vec<f64>,
    pub solutions: Vec<HeatSolution>,
    pub report: ComparisonReport,
}

/// Solves the original problem on the nested balls `B_j` with initial data
/// `ū(·,0)·χ_j`, backward Euler, shared grid spacing, and certifies the
/// comparison chain `0 <= u_j <= u_{j+1} <= ū` frame by frame.
pub fn exhaustion(
    bar: &Barrier71,
    pot: &Potential,
    manifold: &ModelManifold,
    j_schedule: &[f64],
    cells_per_unit: usize,
    dt: f64,
) -> Result<ExhaustionRun> {
    if j_schedule.len() < 2 || j_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadConfig("exhaustion needs an increasing j schedule".into()));
    }
    // monotone-stepping criterion: dt · max(0, -inf V) < 1/2
    let j_max = *j_schedule.last().expect("schedule nonempty");
    let master = RadialGrid::new(j_max, (j_max * cells_per_unit as f64).round() as usize)?;
    let min_v = master.nodes().map(|r| pot.eval(r)).fold(f64::INFINITY, f64::min);
    if dt * (-min_v).max(0.0) >= 0.5 {
        return Err(Error::BadConfig(format!(
            "dt = {dt} too large for potential floor {min_v}: monotone stepping needs dt·|min V| < 1/2"
        )));
    }

    let mut solutions = Vec::with_capacity(j_schedule.len());
    for &j in j_schedule {
        let cells = (j * cells_per_unit as f64).round() as usize;
        let grid = RadialGrid::new(j, cells)?;
        let u0 = GridFunction::sample(grid, |r| bar.initial(r) * cutoff(r, j));
        let problem = ParabolicProblem {
            form: ProblemForm::Original(pot.clone()),
            manifold: manifold.clone(),
            grid,
            u0,
            t_final: bar.t_max,
            dt,
            stepper: Stepper::BackwardEuler,
        };
        solutions.push(solve(&problem)?);
    }

    // comparison chain, relative to the local barrier value
    let mut max_neg = 0.0f64;
    let mut max_mono = 0.0f64;
    let mut max_bar = 0.0f64;
    for (si, sol) in solutions.iter().enumerate() {
        for (k, frame) in sol.frames.iter().enumerate() {
            let t = sol.times[k];
            for (i, &u) in frame.iter().enumerate() {
                let ubar = bar.eval(sol.grid.node(i), t)?;
                max_neg = max_neg.max(-u / ubar);
                max_bar = max_bar.max((u - ubar) / ubar);
                if si + 1 < solutions.len() {
                    let bigger = solutions[si + 1].frames[k][i];
                    max_mono = max_mono.max((u - bigger) / ubar);
                }
            }
        }
    }

    // Cauchy trend on the smallest ball at the final time
    let j0_cells = solutions[0].grid.n_cells();
    let mut cauchy_gaps = Vec::new();
    for pair in solutions.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let gap = (0..j0_cells)
            .map(|i| (b.last_frame()[i] - a.last_frame()[i]).abs())
            .fold(0.0f64, f64::max);
        cauchy_gaps.push(gap);
    }

    Ok(ExhaustionRun {
        j_schedule: j_schedule.to_vec(),
        solutions,
        report: ComparisonReport {
            max_negative_rel: max_neg,
            max_monotone_violation_rel: max_mono,
            max_barrier_violation_rel: max_bar,
            cauchy_gaps,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::explicit_71;
    use rand::{Rng, SeedableRng};

    fn flat3() -> ModelManifold {
        ModelManifold::euclidean(3)
    }

    #[test]
    fn zero_data_stays_zero() {
        let grid = RadialGrid::new(1.0, 64).unwrap();
        for form in [
            ProblemForm::Original(Potential::example_71(1.0, 3.0, 3).unwrap()),
            ProblemForm::Weighted(explicit_71(1.0, 3.0).unwrap()),
        ] {
            let problem = ParabolicProblem {
                form,
                manifold: flat3(),
                grid,
                u0: GridFunction::sample(grid, |_| 0.0),
                t_final: 0.1,
                dt: 0.01,
                stepper: Stepper::BackwardEuler,
            };
            let sol = solve(&problem).unwrap();
            assert!(sol.frames.iter().all(|f| f.iter().all(|&v| v == 0.0)));
            assert_eq!(sol.times[0], 0.0);
            assert_eq!(*sol.times.last().unwrap(), 0.1);
        }
    }

    #[test]
    fn ground_mode_decays_at_its_eigenrate() {
        let grid = RadialGrid::new(1.0, 2000).unwrap();
        let m = flat3();
        let op = assemble(&m, &Potential::zero(), &grid).unwrap();
        let eig = op.lowest_eigenpair().unwrap();

        let t_final = 0.05;
        let problem = ParabolicProblem {
            form: ProblemForm::Original(Potential::zero()),
            manifold: m,
            grid,
            u0: eig.profile.clone(),
            t_final,
            dt: 1e-4,
            stepper: Stepper::BackwardEuler,
        };
        let sol = solve(&problem).unwrap();
        let decay = (-eig.lambda * t_final).exp();
        // compare on nodes carrying real amplitude
        let peak = eig.profile.max_abs();
        for (i, &u) in sol.last_frame().iter().enumerate() {
            let expected = eig.profile.values[i] * decay;
            if eig.profile.values[i] > 0.05 * peak {
                assert!(
                    (u - expected).abs() / expected.abs() < 0.01,
                    "node {i}: {u} vs {expected}"
                );
            }
        }
        // the eigenrate matches π² because the ball is the unit 3-ball
        assert!((eig.lambda - std::f64::consts::PI.powi(2)).abs() < 0.01);
    }

    #[test]
    fn sup_norm_nonincreasing_for_nonnegative_potential() {
        let grid = RadialGrid::new(2.0, 400).unwrap();
        let problem = ParabolicProblem {
            form: ProblemForm::Original(Potential::inline_power(1.0, 2.0, 0.0)),
            manifold: flat3(),
            grid,
            u0: GridFunction::sample(grid, |r| crate::numerics::bump(r, 1.0, 0.5)),
            t_final: 0.2,
            dt: 2e-3,
            stepper: Stepper::BackwardEuler,
        };
        let sol = solve(&problem).unwrap();
        let mut last = f64::INFINITY;
        for f in &sol.frames {
            let sup = f.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            assert!(sup <= last * (1.0 + 1e-12));
            last = sup;
        }
    }

    #[test]
    fn backward_euler_preserves_ordering() {
        // discrete comparison: ordered data stay ordered under BE stepping
        let grid = RadialGrid::new(4.0, 300).unwrap();
        let pot = Potential::example_71(1.0, 3.0, 3).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..5 {
            let base: Vec<f64> = (0..grid.n_cells()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let upper: Vec<f64> = base.iter().map(|v| v + rng.gen_range(0.0..0.5)).collect();
            let mk = |vals: Vec<f64>| ParabolicProblem {
                form: ProblemForm::Original(pot.clone()),
                manifold: flat3(),
                grid,
                u0: GridFunction::new(grid, vals),
                t_final: 0.05,
                dt: 1e-3,
                stepper: Stepper::BackwardEuler,
            };
            let lo = solve(&mk(base)).unwrap();
            let hi = solve(&mk(upper)).unwrap();
            let scale = hi.frames[0].iter().fold(0.0f64, |a, &b| a.max(b));
            for k in 0..lo.frames.len() {
                for i in 0..grid.n_cells() {
                    assert!(lo.frames[k][i] <= hi.frames[k][i] + 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn trivial_gauge_is_identity() {
        let grid = RadialGrid::new(1.0, 128).unwrap();
        let problem = ParabolicProblem {
            form: ProblemForm::Original(Potential::zero()),
            manifold: flat3(),
            grid,
            u0: GridFunction::sample(grid, |r| crate::numerics::bump(r, 0.5, 0.3)),
            t_final: 0.05,
            dt: 1e-3,
            stepper: Stepper::BackwardEuler,
        };
        let u = solve(&problem).unwrap();
        let w = gauge_forward(&u, &StationaryProfile::constant_one()).unwrap();
        assert!(w.weighted);
        for (fu, fw) in u.frames.iter().zip(&w.frames) {
            assert_eq!(fu, fw);
        }
    }

    #[test]
    fn gauge_identity_on_smooth_test_function() {
        let phi = explicit_71(1.0, 3.0).unwrap();
        let pot = Potential::example_71(1.0, 3.0, 3).unwrap();
        let m = flat3();
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
        let r_probes: Vec<f64> = (1..=60).map(|i| 0.1 + 1.9 * i as f64 / 60.0).collect();
        let t_probes: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let rep =
            gauge_residual_identity(&phi, &pot, &m, &test_u, &r_probes, &t_probes).unwrap();
        assert!(rep.max_abs_discrepancy < 1e-9, "{}", rep.max_abs_discrepancy);

        // trivial gauge: φ ≡ 1, V ≡ 0
        let rep = gauge_residual_identity(
            &StationaryProfile::constant_one(),
            &Potential::zero(),
            &m,
            &test_u,
            &r_probes,
            &t_probes,
        )
        .unwrap();
        assert_eq!(rep.max_abs_discrepancy, 0.0);
    }

    #[test]
    fn gauge_identity_rejects_mismatched_profile() {
        let phi = explicit_71(1.0, 3.0).unwrap();
        let m = flat3();
        let test_u = |_r: f64, _t: f64| SpaceTimeSample { value: 1.0, dr: 0.0, drr: 0.0, dt: 0.0 };
        let out = gauge_residual_identity(
            &phi,
            &Potential::zero(),
            &m,
            &test_u,
            &[0.5, 1.0],
            &[0.0],
        );
        assert!(out.is_err());
    }

    #[test]
    fn barrier_selection_for_worked_family() {
        let pot = Potential::example_71(1.0, 3.0, 3).unwrap();
        let m_floor = pot.floor_cert.unwrap();
        let bar = barrier_params_71(1.0, 3.0, 3, 4.5, 2.0, m_floor, 1.5, 1.0).unwrap();
        assert!(bar.k_growth < 0.5, "K = {}", bar.k_growth);
        assert!(bar.t_max < 1.0 / (2.0 * bar.q_rate));
        assert!((bar.t_max - 1.0 / (4.0 * bar.q_rate)).abs() < 1e-15);

        // the selection satisfies the ball inequality with slack
        let lam = 1.25;
        let rhs = bar.a_growth * lam * 3.0 * 4.0 * 2.0
            + bar.a_growth * bar.a_growth * lam * lam * 9.0 * 16.0
            + m_floor;
        assert!(bar.a_growth * bar.q_rate * 8.0 >= rhs);
    }

    #[test]
    fn barrier_near_p2_still_feasible() {
        let pot = Potential::example_71(1.0, 3.0, 3).unwrap();
        let m_floor = pot.floor_cert.unwrap();
        let bar = barrier_params_71(1.0, 3.0, 3, 4.5, 2.0, m_floor, 1.999, 1.0).unwrap();
        assert!(bar.k_growth < 0.001);
    }

    #[test]
    fn barrier_eval_values() {
        let bar = Barrier71 {
            a_growth: 0.1,
            q_rate: 0.1,
            t_max: 2.5,
            b: 3.0,
            k_growth: 0.125,
            r_split: 2.0,
            m_floor: 1.0,
        };
        assert_eq!(bar.eval(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bar.initial(1.0), (0.1f64).exp());
        // θ(1, 1) = 0.1·1.1·1 + 0.1·0.1·8·1 = 0.19
        assert!((bar.eval(1.0, 1.0).unwrap() - (0.19f64).exp()).abs() < 1e-15);
        // monotone in r and t
        assert!(bar.eval(2.0, 1.0).unwrap() > bar.eval(1.0, 1.0).unwrap());
        assert!(bar.eval(1.0, 2.0).unwrap() > bar.eval(1.0, 1.0).unwrap());
        assert!(matches!(bar.eval(1.0, 3.0), Err(Error::BarrierTimeRange { .. })));
    }

    #[test]
    fn barrier_residual_nonnegative_for_selected_params() {
        let pot = Potential::example_71(1.0, 3.0, 3).unwrap();
        let m_floor = pot.floor_cert.unwrap();
        let bar = barrier_params_71(1.0, 3.0, 3, 4.5, 2.0, m_floor, 1.5, 1.0).unwrap();
        let grid = RadialGrid::new(8.0, 2000).unwrap();
        let t_probes: Vec<f64> = (0..=8).map(|i| bar.t_max * i as f64 / 8.0).collect();
        let rep =
            barrier_supersolution_check(&bar, &pot, &flat3(), &grid, &t_probes).unwrap();
        assert!(rep.min_relative_residual >= 0.0, "min = {}", rep.min_relative_residual);
        assert!(rep.violation.is_none());
    }

    #[test]
    fn barrier_residual_detects_broken_parameters() {
        let pot = Potential::example_71(1.0, 3.0, 3).unwrap();
        let m_floor = pot.floor_cert.unwrap();
        let good = barrier_params_71(1.0, 3.0, 3, 4.5, 2.0, m_floor, 1.5, 1.0).unwrap();
        let grid = RadialGrid::new(8.0, 1000).unwrap();
        let t_probes = [0.0, good.t_max];

        // gradient cap broken: violation appears at large radius
        let mut too_steep = good;
        too_steep.a_growth *= 4.0;
        let rep =
            barrier_supersolution_check(&too_steep, &pot, &flat3(), &grid, &t_probes).unwrap();
        let (r_viol, _) = rep.violation.expect("supersolution property must fail");
        assert!(r_viol > too_steep.r_split);

        // ball inequality broken: violation appears inside the ball
        let mut too_slow = good;
        too_slow.q_rate = 1.0;
        too_slow.t_max = 0.25;
        let rep =
            barrier_supersolution_check(&too_slow, &pot, &flat3(), &grid, &t_probes).unwrap();
        let (r_viol, _) = rep.violation.expect("ball estimate must fail");
        assert!(r_viol < too_slow.r_split);
    }

    #[test]
    fn barrier_without_potential_fails_at_large_radius() {
        let bar = Barrier71 {
            a_growth: 0.25,
            q_rate: 2.0,
            t_max: 0.125,
            b: 3.0,
            k_growth: 0.3125,
            r_split: 2.0,
            m_floor: 0.0,
        };
        let grid = RadialGrid::new(10.0, 500).unwrap();
        let rep = barrier_supersolution_check(&bar, &Potential::zero(), &flat3(), &grid, &[0.0])
            .unwrap();
        let (r_viol, _) = rep.violation.expect("gradient term must dominate");
        assert!(r_viol > 2.0);
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(2.9, 4.0), 1.0);
        assert_eq!(cutoff(4.0, 4.0), 0.0);
        assert_eq!(cutoff(4.5, 4.0), 0.0);
        let mid = cutoff(3.5, 4.0);
        assert!((mid - 0.5).abs() < 1e-15);
        // monotone between the plateaus, and nested in j
        for i in 0..50 {
            let r = 3.0 + i as f64 / 50.0;
            assert!(cutoff(r, 4.0) >= cutoff(r + 0.02, 4.0));
            assert!(cutoff(r, 4.0) <= cutoff(r, 5.0));
        }
    }

    #[test]
    fn exhaustion_initialization_and_zero_data() {
        let pot = Potential::example_71(1.0, 3.0, 3).unwrap();
        let m_floor = pot.floor_cert.unwrap();
        let bar = barrier_params_71(1.0, 3.0, 3, 4.5, 2.0, m_floor, 1.5, 1.0).unwrap();
        let run = exhaustion(&bar, &pot, &flat3(), &[3.0, 4.0], 100, 1e-3).unwrap();
        // u_j(·, 0) = ū(·,0)·χ_j exactly
        let sol = &run.solutions[0];
        for (i, &u) in sol.frames[0].iter().enumerate() {
            let r = sol.grid.node(i);
            assert_eq!(u, bar.initial(r) * cutoff(r, 3.0));
        }
        assert!(run.report.max_negative_rel <= 1e-12);
    }

    #[test]
    fn exhaustion_rejects_oversized_dt() {
        let pot = Potential::example_71(1.0, 3.0, 3).unwrap();
        let bar = barrier_params_71(1.0, 3.0, 3, 4.5, 2.0, pot.floor_cert.unwrap(), 1.5, 1.0)
            .unwrap();
        assert!(exhaustion(&bar, &pot, &flat3(), &[3.0, 4.0], 50, 0.2).is_err());
    }
}
