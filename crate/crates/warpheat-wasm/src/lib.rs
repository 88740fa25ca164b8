//! Browser bindings for the interactive demo page. Three operations,
//! each taking and returning JSON strings so the page needs no generated
//! type glue:
//!
//! * [`stationary_curves`] — potential, exact profile, and residual along
//!   the radius for a chosen family and manifold;
//! * [`heat_frames`] — implicit heat-flow frames for time-slider playback,
//!   in original or gauge-transformed (weighted) view;
//! * [`lambda_sweep`] — Dirichlet eigenvalues on expanding balls with the
//!   extrapolated spectral bottom.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use warpheat::evolve::{gauge_forward, solve, ParabolicProblem, ProblemForm, Stepper};
use warpheat::manifold::{GridFunction, ModelManifold, RadialGrid, WarpingFunction};
use warpheat::potential::Potential;
use warpheat::spectrum::estimate_lambda1;
use warpheat::stationary::{explicit_71, explicit_72, explicit_75, StationaryProfile};
use warpheat::Error;

#[derive(Deserialize)]
struct ManifoldSpec {
    /// "euclidean" | "hyperbolic" | "exp_power"
    warp: String,
    #[serde(default = "default_dim")]
    dimension: u32,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_gamma")]
    gamma: f64,
}

fn default_dim() -> u32 {
    3
}
fn default_alpha() -> f64 {
    1.0
}
fn default_gamma() -> f64 {
    2.0
}

impl ManifoldSpec {
    fn build(&self) -> Result<ModelManifold, Error> {
        let warp = match self.warp.as_str() {
            "euclidean" => WarpingFunction::euclidean(),
            "hyperbolic" => WarpingFunction::hyperbolic(),
            "exp_power" => WarpingFunction::exp_power(self.alpha, self.gamma)?,
            other => return Err(Error::BadConfig(format!("unknown warp '{other}'"))),
        };
        ModelManifold::new(self.dimension, warp)
    }
}

#[derive(Deserialize)]
struct PotentialSpec {
    /// "example71" | "example72" | "example75" | "zero"
    family: String,
    #[serde(default = "default_a")]
    a: f64,
    #[serde(default = "default_b")]
    b: f64,
    #[serde(default = "default_bcoef")]
    b_coef: f64,
}

fn default_a() -> f64 {
    1.0
}
fn default_b() -> f64 {
    3.0
}
fn default_bcoef() -> f64 {
    4.0
}

impl PotentialSpec {
    fn build(&self, manifold: &ModelManifold) -> Result<Potential, Error> {
        match self.family.as_str() {
            "zero" => Ok(Potential::zero()),
            "example71" => Potential::example_71(self.a, self.b, manifold.dim()),
            "example72" => Potential::example_72(self.a, self.b, manifold),
            "example75" => Potential::example_75(self.b_coef, manifold.dim()),
            other => Err(Error::BadConfig(format!("unknown potential '{other}'"))),
        }
    }

    fn profile(&self, manifold: &ModelManifold) -> Result<Option<StationaryProfile>, Error> {
        Ok(match self.family.as_str() {
            "example71" => Some(explicit_71(self.a, self.b)?),
            "example72" => Some(explicit_72(self.a, self.b, manifold)?),
            "example75" => Some(explicit_75(self.b_coef, manifold.dim())?),
            _ => None,
        })
    }
}

// ------------------------------------------------------------ stationary

#[derive(Deserialize)]
struct StationaryRequest {
    manifold: ManifoldSpec,
    potential: PotentialSpec,
    #[serde(default = "default_rmax")]
    r_max: f64,
    #[serde(default = "default_samples")]
    samples: usize,
}

fn default_rmax() -> f64 {
    5.0
}
fn default_samples() -> usize {
    400
}

#[derive(Serialize)]
struct StationaryResponse {
    r: Vec<f64>,
    potential: Vec<f64>,
    profile: Vec<f64>,
    residual: Vec<f64>,
    max_abs_residual: f64,
    decay_tag: String,
}

fn stationary_curves_impl(request: &str) -> Result<String, Error> {
    let req: StationaryRequest =
        serde_json::from_str(request).map_err(|e| Error::BadConfig(e.to_string()))?;
    let manifold = req.manifold.build()?;
    let pot = req.potential.build(&manifold)?;
    let profile = req
        .potential
        .profile(&manifold)?
        .ok_or_else(|| Error::BadConfig("chosen family has no explicit profile".into()))?;

    let n = req.samples.clamp(16, 4000);
    let mut out = StationaryResponse {
        r: Vec::with_capacity(n),
        potential: Vec::with_capacity(n),
        profile: Vec::with_capacity(n),
        residual: Vec::with_capacity(n),
        max_abs_residual: 0.0,
        decay_tag: profile.decay_tag.clone(),
    };
    for i in 0..n {
        let r = req.r_max * (i as f64 + 0.5) / n as f64;
        let (phi, dphi, ddphi) = profile.eval(r);
        let v = pot.eval(r);
        let res = ddphi + manifold.drift(r)? * dphi - v * phi;
        out.r.push(r);
        out.potential.push(v);
        out.profile.push(phi);
        out.residual.push(res);
        out.max_abs_residual = out.max_abs_residual.max(res.abs());
    }
    Ok(serde_json::to_string(&out)?)
}

/// Sampled potential, stationary profile, and pointwise residual.
#[wasm_bindgen]
pub fn stationary_curves(request: &str) -> Result<String, JsValue> {
    stationary_curves_impl(request).map_err(to_js)
}

// ----------------------------------------------------------------- heat

#[derive(Deserialize)]
struct HeatRequest {
    manifold: ManifoldSpec,
    potential: PotentialSpec,
    #[serde(default = "default_radius")]
    radius: f64,
    #[serde(default = "default_cells")]
    cells: usize,
    #[serde(default = "default_tfinal")]
    t_final: f64,
    #[serde(default = "default_dt")]
    dt: f64,
    /// "original" or "gauge" (divide frames by the stationary profile)
    #[serde(default = "default_view")]
    view: String,
    #[serde(default = "default_frames")]
    max_frames: usize,
    #[serde(default = "default_center")]
    bump_center: f64,
    #[serde(default = "default_width")]
    bump_width: f64,
}

fn default_radius() -> f64 {
    4.0
}
fn default_cells() -> usize {
    400
}
fn default_tfinal() -> f64 {
    0.1
}
fn default_dt() -> f64 {
    1e-3
}
fn default_view() -> String {
    "original".into()
}
fn default_frames() -> usize {
    50
}
fn default_center() -> f64 {
    1.0
}
fn default_width() -> f64 {
    0.5
}

#[derive(Serialize)]
struct HeatResponse {
    r: Vec<f64>,
    times: Vec<f64>,
    frames: Vec<Vec<f64>>,
    sup_norms: Vec<f64>,
    weighted_view: bool,
}

fn heat_frames_impl(request: &str) -> Result<String, Error> {
    let req: HeatRequest =
        serde_json::from_str(request).map_err(|e| Error::BadConfig(e.to_string()))?;
    let manifold = req.manifold.build()?;
    let pot = req.potential.build(&manifold)?;
    let grid = RadialGrid::new(req.radius, req.cells.clamp(16, 4000))?;
    let u0 = GridFunction::sample(grid, |r| {
        warpheat::numerics::bump(r, req.bump_center, req.bump_width)
    });
    let problem = ParabolicProblem {
        form: ProblemForm::Original(pot),
        manifold: manifold.clone(),
        grid,
        u0,
        t_final: req.t_final,
        dt: req.dt,
        stepper: Stepper::BackwardEuler,
    };
    let mut sol = solve(&problem)?;
    if req.view == "gauge" {
        let profile = req
            .potential
            .profile(&manifold)?
            .ok_or_else(|| Error::BadConfig("gauge view needs an explicit profile".into()))?;
        sol = gauge_forward(&sol, &profile)?;
    }

    let stride = (sol.frames.len() / req.max_frames.clamp(2, 200)).max(1);
    let mut out = HeatResponse {
        r: grid.nodes().collect(),
        times: Vec::new(),
        frames: Vec::new(),
        sup_norms: Vec::new(),
        weighted_view: sol.weighted,
    };
    for (k, frame) in sol.frames.iter().enumerate() {
        if k % stride == 0 || k == sol.frames.len() - 1 {
            out.times.push(sol.times[k]);
            out.frames.push(frame.clone());
            out.sup_norms
                .push(frame.iter().fold(0.0f64, |a, &b| a.max(b.abs())));
        }
    }
    Ok(serde_json::to_string(&out)?)
}

/// Backward-Euler heat flow frames for slider playback.
#[wasm_bindgen]
pub fn heat_frames(request: &str) -> Result<String, JsValue> {
    heat_frames_impl(request).map_err(to_js)
}

// ---------------------------------------------------------------- sweep

#[derive(Deserialize)]
struct SweepRequest {
    manifold: ManifoldSpec,
    potential: PotentialSpec,
    radii: Vec<f64>,
    #[serde(default = "default_density")]
    cells_per_unit: usize,
}

fn default_density() -> usize {
    200
}

#[derive(Serialize)]
struct SweepResponse {
    radii: Vec<f64>,
    lambdas: Vec<f64>,
    extrapolated: f64,
}

fn lambda_sweep_impl(request: &str) -> Result<String, Error> {
    let req: SweepRequest =
        serde_json::from_str(request).map_err(|e| Error::BadConfig(e.to_string()))?;
    let manifold = req.manifold.build()?;
    let pot = req.potential.build(&manifold)?;
    let sweep = estimate_lambda1(&manifold, &pot, &req.radii, req.cells_per_unit.clamp(20, 1000))?;
    Ok(serde_json::to_string(&SweepResponse {
        radii: sweep.rows.iter().map(|r| r.radius).collect(),
        lambdas: sweep.rows.iter().map(|r| r.lambda).collect(),
        extrapolated: sweep.extrapolated,
    })?)
}

/// Dirichlet eigenvalue sweep on expanding balls.
#[wasm_bindgen]
pub fn lambda_sweep(request: &str) -> Result<String, JsValue> {
    lambda_sweep_impl(request).map_err(to_js)
}

fn to_js(err: Error) -> JsValue {
    JsValue::from_str(&err.to_string())
}
