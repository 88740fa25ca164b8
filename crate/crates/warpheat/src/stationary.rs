//! Stationary profiles of `Δφ - Vφ = 0`: exact solutions for the worked
//! potential families, decaying supersolutions for certified-growth
//! potentials, min-gluing, and strong/weak residual verification.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::{ModelManifold, RadialGrid};
use crate::potential::{CriticalExponent, GrowthCert, Potential};
use crate::spectrum::assemble;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProfileKind {
    ExactSolution,
    Supersolution,
    GluedSupersolution,
}

type ProfileFn = Arc<dyn Fn(f64) -> (f64, f64, f64) + Send + Sync>;

/// Radial profile with analytic value and first two derivatives.
#[derive(Clone)]
pub struct StationaryProfile {
    eval_fn: ProfileFn,
    pub kind: ProfileKind,
    pub decay_tag: String,
    /// Radius beyond which the (super)solution property is claimed;
    /// zero for exact solutions.
    pub valid_from: f64,
}

impl std::fmt::Debug for StationaryProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StationaryProfile")
            .field("kind", &self.kind)
            .field("decay_tag", &self.decay_tag)
            .field("valid_from", &self.valid_from)
            .finish()
    }
}

impl StationaryProfile {
    pub fn from_parts(
        kind: ProfileKind,
        decay_tag: impl Into<String>,
        valid_from: f64,
        f: impl Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static,
    ) -> Self {
        Self { eval_fn: Arc::new(f), kind, decay_tag: decay_tag.into(), valid_from }
    }

    /// (φ, φ', φ'').
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        (self.eval_fn)(r)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    /// The constant profile 1 (exact solution when V ≡ 0; supersolution
    /// whenever V >= 0).
    pub fn constant_one() -> Self {
        Self::from_parts(ProfileKind::ExactSolution, "1", 0.0, |_| (1.0, 0.0, 0.0))
    }
}

/// `φ(r) = exp(-a r^b)`, the exact solution paired with the sign-changing
/// flat-space potential.
pub fn explicit_71(a: f64, b: f64) -> Result<StationaryProfile> {
    if a <= 0.0 || b <= 2.0 {
        return Err(Error::InvalidParameter {
            name: if a <= 0.0 { "a" } else { "b" },
            value: if a <= 0.0 { a } else { b },
            reason: "profile needs a > 0, b > 2",
        });
    }
    Ok(StationaryProfile::from_parts(
        ProfileKind::ExactSolution,
        format!("exp(-{a}*r^{b})"),
        0.0,
        move |r| {
            let phi = (-a * r.powf(b)).exp();
            let dphi = -a * b * r.powf(b - 1.0) * phi;
            let ddphi =
                (-a * b * (b - 1.0) * r.powf(b - 2.0) + a * a * b * b * r.powf(2.0 * b - 2.0)) * phi;
            (phi, dphi, ddphi)
        },
    ))
}

/// Same profile as [`explicit_71`]; on a model manifold it solves the
/// drift-adjusted potential exactly, for any warp.
pub fn explicit_72(a: f64, b: f64, _manifold: &ModelManifold) -> Result<StationaryProfile> {
    explicit_71(a, b)
}

/// Roots `β±` of `β² + (n-2)β = b`.
pub fn beta_roots(b_coef: f64, n: u32) -> (f64, f64) {
    let nm2 = n as f64 - 2.0;
    let disc = (nm2 * nm2 + 4.0 * b_coef).sqrt();
    ((-nm2 - disc) / 2.0, (-nm2 + disc) / 2.0)
}

/// Inner extension of `r^{β₋}` to the unit ball: a quintic
/// `p(r) = δ + c₃r³ + c₄r⁴ + c₅r⁵` matching value, slope, and curvature
/// at r = 1, flat to second order at the pole, positive throughout.
#[derive(Clone, Copy, Debug)]
pub struct PowerBlend {
    pub beta_minus: f64,
    pub beta_plus: f64,
    delta: f64,
    c3: f64,
    c4: f64,
    c5: f64,
}

impl PowerBlend {
    pub fn new(b_coef: f64, n: u32) -> Result<Self> {
        let (beta_minus, beta_plus) = beta_roots(b_coef, n);
        let delta = 2.0;
        let beta = beta_minus;
        let s = 1.0 - delta;
        let t1 = beta - 3.0 * s;
        let t2 = beta * (beta - 1.0) - 6.0 * s;
        let c5 = (t2 - 6.0 * t1) / 2.0;
        let c4 = t1 - 2.0 * c5;
        let c3 = s - c4 - c5;
        let blend = Self { beta_minus, beta_plus, delta, c3, c4, c5 };
        // positivity probe across the inner interval
        for i in 0..=2000 {
            let r = i as f64 / 2000.0;
            if blend.eval_inner(r).0 <= 0.0 {
                return Err(Error::BlendNotPositive(r));
            }
        }
        Ok(blend)
    }

    /// (p, p', p'') on [0, 1].
    pub fn eval_inner(&self, r: f64) -> (f64, f64, f64) {
        let r2 = r * r;
        let r3 = r2 * r;
        let p = self.delta + self.c3 * r3 + self.c4 * r3 * r + self.c5 * r3 * r2;
        let dp = 3.0 * self.c3 * r2 + 4.0 * self.c4 * r3 + 5.0 * self.c5 * r2 * r2;
        let ddp = 6.0 * self.c3 * r + 12.0 * self.c4 * r2 + 20.0 * self.c5 * r3;
        (p, dp, ddp)
    }
}

/// Power profile `r^{β₋}` outside the unit ball with the positive quintic
/// continuation inside; exact against the example-7.5 potential.
pub fn explicit_75(b_coef: f64, n: u32) -> Result<StationaryProfile> {
    if b_coef <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "b_coef",
            value: b_coef,
            reason: "need b_coef > 0",
        });
    }
    if n < 3 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "power profile construction needs dimension >= 3",
        });
    }
    let blend = PowerBlend::new(b_coef, n)?;
    let beta = blend.beta_minus;
    Ok(StationaryProfile::from_parts(
        ProfileKind::ExactSolution,
        format!("r^({beta})"),
        0.0,
        move |r| {
            if r > 1.0 {
                (
                    r.powf(beta),
                    beta * r.powf(beta - 1.0),
                    beta * (beta - 1.0) * r.powf(beta - 2.0),
                )
            } else {
                blend.eval_inner(r)
            }
        },
    ))
}

/// Decaying supersolution `z(r) = exp(-a₀ r^{α/2+1})` for potentials with
/// growth certificate `(c0, α, r_bar)`, valid beyond `r_bar` on manifolds
/// with nonnegative drift. With `a₀γ = √c0` the closed-form residual is
/// `z·(a₀²γ²r^{2γ-2} - a₀γ(γ-1)r^{γ-2} - m(r)a₀γr^{γ-1} - c0 r^α) <= 0`.
pub fn build_supersolution_63(
    cert: &GrowthCert,
    manifold: &ModelManifold,
) -> Result<StationaryProfile> {
    let probe_outer = (2.0 * cert.r_bar).max(10.0);
    let probe = RadialGrid::new(probe_outer, 2048)?;
    manifold.check_drift_nonnegative(&probe)?;

    let exponent = CriticalExponent::from_cert(cert);
    let (a0, gamma) = (exponent.a0, exponent.gamma_exp);
    Ok(StationaryProfile::from_parts(
        ProfileKind::Supersolution,
        format!("exp(-{a0}*r^{gamma})"),
        cert.r_bar,
        move |r| {
            let z = (-a0 * r.powf(gamma)).exp();
            let dz = -a0 * gamma * r.powf(gamma - 1.0) * z;
            let ddz = (a0 * a0 * gamma * gamma * r.powf(2.0 * gamma - 2.0)
                - a0 * gamma * (gamma - 1.0) * r.powf(gamma - 2.0))
                * z;
            (z, dz, ddz)
        },
    ))
}

/// Gluing window and scaling for the min construction.
#[derive(Clone, Copy, Debug)]
pub struct GlueSpec {
    pub r1: f64,
    pub r2: f64,
    pub c_under: f64,
}

impl GlueSpec {
    /// Largest scaling with `C·η <= z` on `[r1, r2]`, from a probe ladder.
    pub fn fit(eta: &StationaryProfile, z: &StationaryProfile, r1: f64, r2: f64) -> Result<Self> {
        if !(0.0 < r1 && r1 < r2) {
            return Err(Error::InvalidParameter {
                name: "r1",
                value: r1,
                reason: "need 0 < r1 < r2",
            });
        }
        let mut c_under = f64::INFINITY;
        for i in 0..=1024 {
            let r = r1 + (r2 - r1) * i as f64 / 1024.0;
            let ev = eta.value(r);
            if ev <= 0.0 {
                return Err(Error::NonpositiveProfile { r, value: ev });
            }
            c_under = c_under.min(z.value(r) / ev);
        }
        Ok(Self { r1, r2, c_under })
    }
}

/// Min-glued global supersolution: `C·η` inside the certificate radius,
/// `min(C·η, z)` outside. `η` must be a supersolution on all of M, `z`
/// beyond `r_bar = z.valid_from`, and the window must bracket it.
pub fn glue_supersolution_67(
    eta: &StationaryProfile,
    z: &StationaryProfile,
    spec: &GlueSpec,
) -> Result<StationaryProfile> {
    let r_bar = z.valid_from;
    if !(spec.r1 < r_bar && r_bar < spec.r2) {
        return Err(Error::InvalidParameter {
            name: "glue window",
            value: r_bar,
            reason: "need r1 < r_bar < r2",
        });
    }
    // the gluing inequality C·η <= z across the window
    for i in 0..=1024 {
        let r = spec.r1 + (spec.r2 - spec.r1) * i as f64 / 1024.0;
        let c_eta = spec.c_under * eta.value(r);
        let zv = z.value(r);
        if c_eta > zv * (1.0 + 1e-12) {
            return Err(Error::GlueBoundViolated { r, c_eta, z: zv });
        }
    }
    let eta = eta.clone();
    let z = z.clone();
    let c = spec.c_under;
    let tag = format!("min({c}*eta, {})", z.decay_tag);
    Ok(StationaryProfile::from_parts(
        ProfileKind::GluedSupersolution,
        tag,
        0.0,
        move |r| {
            let (ev, dev, ddev) = eta.eval(r);
            let scaled = (c * ev, c * dev, c * ddev);
            if r <= r_bar {
                scaled
            } else {
                let zv = z.eval(r);
                if scaled.0 <= zv.0 {
                    scaled
                } else {
                    zv
                }
            }
        },
    ))
}

/// Residual summary of a profile against `Δφ - Vφ` on a grid.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub signed_max: f64,
    pub order_estimate: Option<f64>,
    pub nodes_checked: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualMode {
    /// Uses the profile's own derivatives.
    Analytic,
    /// Centered second-order stencils on node samples only; also reports
    /// the empirical convergence order from grids N and 2N.
    FiniteDifference,
}

/// Evaluates `φ'' + m(r) φ' - V φ` over the grid.
///
/// Finite-difference mode skips a pole margin (max(4h, R/80)) where the
/// drift term is under-resolved by the centered stencil, and estimates the
/// convergence order from a doubled grid over the same window.
pub fn verify_stationary(
    profile: &StationaryProfile,
    pot: &Potential,
    manifold: &ModelManifold,
    grid: &RadialGrid,
    mode: ResidualMode,
) -> Result<ResidualReport> {
    match mode {
        ResidualMode::Analytic => {
            let mut max_abs = 0.0f64;
            let mut signed_max = f64::NEG_INFINITY;
            let mut nodes = 0;
            for r in grid.nodes() {
                let (phi, dphi, ddphi) = profile.eval(r);
                if phi <= 0.0 {
                    return Err(Error::NonpositiveProfile { r, value: phi });
                }
                let res = ddphi + manifold.drift(r)? * dphi - pot.eval(r) * phi;
                max_abs = max_abs.max(res.abs());
                signed_max = signed_max.max(res);
                nodes += 1;
            }
            Ok(ResidualReport { max_abs, signed_max, order_estimate: None, nodes_checked: nodes })
        }
        ResidualMode::FiniteDifference => {
            let margin = (4.0 * grid.spacing()).max(grid.r_outer() / 80.0);
            let coarse = fd_residual_max(profile, pot, manifold, grid, margin)?;
            let fine_grid = RadialGrid::new(grid.r_outer(), grid.n_cells() * 2)?;
            let fine = fd_residual_max(profile, pot, manifold, &fine_grid, margin)?;
            let order = (coarse.0 / fine.0).log2();
            Ok(ResidualReport {
                max_abs: coarse.0,
                signed_max: coarse.1,
                order_estimate: Some(order),
                nodes_checked: coarse.2,
            })
        }
    }
}

fn fd_residual_max(
    profile: &StationaryProfile,
    pot: &Potential,
    manifold: &ModelManifold,
    grid: &RadialGrid,
    margin: f64,
) -> Result<(f64, f64, usize)> {
    let h = grid.spacing();
    let samples: Vec<f64> = grid.nodes().map(|r| profile.value(r)).collect();
    for (i, &s) in samples.iter().enumerate() {
        if s <= 0.0 {
            return Err(Error::NonpositiveProfile { r: grid.node(i), value: s });
        }
    }
    let mut max_abs = 0.0f64;
    let mut signed_max = f64::NEG_INFINITY;
    let mut nodes = 0;
    for i in 1..grid.n_cells() - 1 {
        let r = grid.node(i);
        if r < margin {
            continue;
        }
        let ddphi = (samples[i + 1] - 2.0 * samples[i] + samples[i - 1]) / (h * h);
        let dphi = (samples[i + 1] - samples[i - 1]) / (2.0 * h);
        let res = ddphi + manifold.drift(r)? * dphi - pot.eval(r) * samples[i];
        max_abs = max_abs.max(res.abs());
        signed_max = signed_max.max(res);
        nodes += 1;
    }
    Ok((max_abs, signed_max, nodes))
}

/// Outcome of the discrete weak-supersolution test.
#[derive(Clone, Debug, Serialize)]
pub struct WeakCheck {
    pub ok: bool,
    /// First node (index, radius) where the hat-form value dips below
    /// the tolerance.
    pub first_failure: Option<(usize, f64)>,
    pub min_relative_value: f64,
    pub nodes_skipped: usize,
}

/// Tests `∫⟨∇φ,∇η⟩dν + ∫Vφη dν >= 0` against every interior hat function
/// on the grid, i.e. nonnegativity of the assembled-operator rows applied
/// to the profile samples. Nodes where the profile has decayed below
/// 1e-250 of its maximum are rounding noise and are skipped (counted).
pub fn weak_supersolution_check(
    profile: &StationaryProfile,
    pot: &Potential,
    manifold: &ModelManifold,
    grid: &RadialGrid,
) -> Result<WeakCheck> {
    let op = assemble(manifold, pot, grid)?;
    let samples: Vec<f64> = grid.nodes().map(|r| profile.value(r)).collect();
    let rows = op.apply(&samples);
    let coupling = op.couplings();
    let pot_diag = op.potential_diag();
    let max_sample = samples.iter().fold(0.0f64, |a, &b| a.max(b.abs()));

    let mut ok = true;
    let mut first_failure = None;
    let mut min_rel = f64::INFINITY;
    let mut skipped = 0usize;
    for i in 1..grid.n_cells() - 1 {
        if samples[i].abs() < 1e-250 * max_sample {
            skipped += 1;
            continue;
        }
        // gross scale: sum of magnitudes of everything the row summed
        let scale = coupling[i] * (samples[i].abs() + samples[i - 1].abs())
            + coupling[i + 1] * (samples[i].abs() + samples[i + 1].abs())
            + pot_diag[i].abs() * samples[i].abs()
            + f64::MIN_POSITIVE;
        let rel = rows[i] / scale;
        min_rel = min_rel.min(rel);
        if rel < -1e-9 && ok {
            ok = false;
            first_failure = Some((i, grid.node(i)));
        }
    }
    Ok(WeakCheck { ok, first_failure, min_relative_value: min_rel, nodes_skipped: skipped })
}
