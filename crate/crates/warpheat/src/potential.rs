//! Radial potentials: the explicit worked families, power-growth and
//! floor certificates, and the critical decay exponent they induce.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::manifold::{ModelManifold, RadialGrid};

/// Certificate `V(r) >= c0 r^alpha` for all `r > r_bar`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthCert {
    pub c0: f64,
    pub alpha: f64,
    pub r_bar: f64,
}

/// Critical decay exponent attached to a growth certificate:
/// the constructed supersolution is `exp(-a0 r^{gamma_exp})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalExponent {
    pub a0: f64,
    pub alpha: f64,
    pub gamma_exp: f64,
}

impl CriticalExponent {
    /// `a0 = 2 sqrt(c0) / (alpha + 2)`, `gamma_exp = alpha/2 + 1`.
    pub fn from_cert(cert: &GrowthCert) -> Self {
        Self {
            a0: 2.0 * cert.c0.sqrt() / (cert.alpha + 2.0),
            alpha: cert.alpha,
            gamma_exp: cert.alpha / 2.0 + 1.0,
        }
    }
}

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A radial potential with optional growth and floor certificates.
///
/// Potentials are callables, never sampled arrays: every solver samples
/// at its own grid and refinement.
#[derive(Clone)]
pub struct Potential {
    eval_fn: RadialFn,
    pub growth_cert: Option<GrowthCert>,
    /// `V >= -floor_cert` everywhere, when present.
    pub floor_cert: Option<f64>,
    pub label: String,
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Potential")
            .field("label", &self.label)
            .field("growth_cert", &self.growth_cert)
            .field("floor_cert", &self.floor_cert)
            .finish()
    }
}

impl Potential {
    pub fn from_fn(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval_fn: Arc::new(f),
            growth_cert: None,
            floor_cert: None,
            label: label.into(),
        }
    }

    pub fn zero() -> Self {
        Self::from_fn("zero", |_| 0.0)
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.eval_fn)(r)
    }

    pub fn with_growth_cert(mut self, cert: GrowthCert) -> Self {
        self.growth_cert = Some(cert);
        self
    }

    pub fn with_floor_cert(mut self, floor: f64) -> Self {
        self.floor_cert = Some(floor);
        self
    }

    /// Shifted potential `V + c`, certificates dropped (callers re-derive).
    pub fn shifted(&self, c: f64) -> Self {
        let inner = self.eval_fn.clone();
        Self {
            eval_fn: Arc::new(move |r| inner(r) + c),
            growth_cert: None,
            floor_cert: None,
            label: format!("{}{:+}", self.label, c),
        }
    }

    /// Sign-changing polynomial potential on flat space:
    /// `V(r) = -a b (n+b-2) r^{b-2} + a² b² r^{2b-2}`, negative inside the
    /// critical radius `r0 = ((n+b-2)/(ab))^{1/b}` and positive outside.
    ///
    /// Growth certificate: `c0 = a²b²/2`, `alpha = 2b-2`,
    /// `r_bar = (2(n+b-2)/(ab))^{1/b}` (half the leading coefficient so the
    /// bound holds from a finite radius on, not only asymptotically).
    pub fn example_71(a: f64, b: f64, n: u32) -> Result<Self> {
        check_71_params(a, b, n)?;
        let (aa, bb, nn) = (a, b, n as f64);
        let eval = move |r: f64| {
            -aa * bb * (nn + bb - 2.0) * r.powf(bb - 2.0)
                + aa * aa * bb * bb * r.powf(2.0 * bb - 2.0)
        };
        let cert = GrowthCert {
            c0: a * a * b * b / 2.0,
            alpha: 2.0 * b - 2.0,
            r_bar: (2.0 * (nn + b - 2.0) / (a * b)).powf(1.0 / b),
        };
        let floor = floor_71(a, b, n);
        Ok(Self::from_fn(format!("example71(a={a},b={b},n={n})"), eval)
            .with_growth_cert(cert)
            .with_floor_cert(floor))
    }

    /// Critical radius `r0` where the example-71 potential changes sign.
    pub fn critical_radius_71(a: f64, b: f64, n: u32) -> f64 {
        ((n as f64 + b - 2.0) / (a * b)).powf(1.0 / b)
    }

    /// Model-manifold potential solved exactly by `exp(-a r^b)`:
    /// `V(r) = -ab(b-1) r^{b-2} + a²b² r^{2b-2} - ab(n-1) (ψ'/ψ) r^{b-1}`.
    ///
    /// A growth certificate is attached only when the warp regime makes V
    /// eventually positive (drift growing slower than `r^{b-1}`).
    pub fn example_72(a: f64, b: f64, manifold: &ModelManifold) -> Result<Self> {
        check_71_params(a, b, manifold.dim())?;
        let m = manifold.clone();
        let (aa, bb) = (a, b);
        let eval = move |r: f64| {
            let drift = m.drift(r).expect("potential sampled at r > 0");
            -aa * bb * (bb - 1.0) * r.powf(bb - 2.0) + aa * aa * bb * bb * r.powf(2.0 * bb - 2.0)
                - aa * bb * drift * r.powf(bb - 1.0)
        };
        let mut pot = Self::from_fn(
            format!("example72(a={a},b={b},n={})", manifold.dim()),
            eval,
        );
        if let Some(cert) = growth_cert_72(a, b, manifold) {
            pot = pot.with_growth_cert(cert);
        }
        Ok(pot)
    }

    /// Inverse-square potential `b/r²` outside the unit ball, continued
    /// inside by the potential induced by the stationary module's positive
    /// blend of `r^{β₋}` (so that the blend solves `Δφ = Vφ` exactly).
    pub fn example_75(b_coef: f64, n: u32) -> Result<Self> {
        if b_coef <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "b_coef",
                value: b_coef,
                reason: "inverse-square coefficient must be positive",
            });
        }
        if n < 3 {
            // the power-profile construction used here needs the
            // non-parabolic regime
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                reason: "example 7.5 requires dimension >= 3",
            });
        }
        let blend = crate::stationary::PowerBlend::new(b_coef, n)?;
        let nn = n as f64;
        let eval = move |r: f64| {
            if r > 1.0 {
                b_coef / (r * r)
            } else {
                let (p, dp, ddp) = blend.eval_inner(r);
                (ddp + (nn - 1.0) / r * dp) / p
            }
        };
        Ok(Self::from_fn(format!("example75(b={b_coef},n={n})"), eval))
    }

    /// `V(r) = coef · r^exponent + offset`.
    pub fn inline_power(coef: f64, exponent: f64, offset: f64) -> Self {
        Self::from_fn(
            format!("power(coef={coef},exp={exponent},offset={offset})"),
            move |r| coef * r.powf(exponent) + offset,
        )
    }

    /// Re-checks the growth certificate at every grid node beyond `r_bar`.
    pub fn verify_growth_cert(&self, grid: &RadialGrid) -> Result<()> {
        if let Some(cert) = &self.growth_cert {
            for r in grid.nodes().filter(|r| *r > cert.r_bar) {
                let v = self.eval(r);
                if v < cert.c0 * r.powf(cert.alpha) {
                    return Err(Error::InvalidParameter {
                        name: "growth_cert",
                        value: r,
                        reason: "certificate inequality fails at a grid node",
                    });
                }
            }
        }
        Ok(())
    }

    /// Re-checks the floor certificate at every grid node.
    pub fn verify_floor_cert(&self, grid: &RadialGrid) -> Result<()> {
        if let Some(floor) = self.floor_cert {
            for r in grid.nodes() {
                if self.eval(r) < -floor {
                    return Err(Error::InvalidParameter {
                        name: "floor_cert",
                        value: r,
                        reason: "floor inequality fails at a grid node",
                    });
                }
            }
        }
        Ok(())
    }
}

fn check_71_params(a: f64, b: f64, n: u32) -> Result<()> {
    if a <= 0.0 {
        return Err(Error::InvalidParameter { name: "a", value: a, reason: "need a > 0" });
    }
    if b <= 2.0 {
        return Err(Error::InvalidParameter { name: "b", value: b, reason: "need b > 2" });
    }
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "need dimension >= 2",
        });
    }
    Ok(())
}

/// `|min V|` for the example-71 family: the minimum of
/// `-A r^{b-2} + B r^{2b-2}` sits at `r* = (A(b-2) / (B(2b-2)))^{1/b}`.
fn floor_71(a: f64, b: f64, n: u32) -> f64 {
    let big_a = a * b * (n as f64 + b - 2.0);
    let big_b = a * a * b * b;
    let r_star = (big_a * (b - 2.0) / (big_b * (2.0 * b - 2.0))).powf(1.0 / b);
    let v_min = -big_a * r_star.powf(b - 2.0) + big_b * r_star.powf(2.0 * b - 2.0);
    (-v_min).max(0.0)
}

/// Regime analysis for the example-72 potential on warp `ψ`:
/// the drift term grows like `r^{γ-1}` for exp-power warps, so V is
/// eventually dominated by `a²b² r^{2b-2}` iff `γ < b` (or `γ = b` with a
/// positive net coefficient). The returned `r_bar` comes from a probe-ladder
/// scan of the certificate inequality.
fn growth_cert_72(a: f64, b: f64, manifold: &ModelManifold) -> Option<GrowthCert> {
    use crate::manifold::WarpFamily;
    let c0 = match &manifold.warp().family {
        WarpFamily::Euclidean | WarpFamily::Hyperbolic => a * a * b * b / 2.0,
        WarpFamily::ExpPower { alpha, gamma } => {
            if *gamma < b {
                a * a * b * b / 2.0
            } else if (*gamma - b).abs() < 1e-12 {
                let net = a * a * b * b - a * b * (manifold.dim() as f64 - 1.0) * alpha * gamma;
                if net > 0.0 {
                    net / 2.0
                } else {
                    return None;
                }
            } else {
                return None;
            }
        }
        WarpFamily::Custom(_) => return None,
    };
    let alpha = 2.0 * b - 2.0;
    let probes: Vec<f64> = (1..=4096).map(|i| i as f64 * (64.0 / 4096.0)).collect();
    let pot = |r: f64| {
        let drift = manifold.drift(r).unwrap();
        -a * b * (b - 1.0) * r.powf(b - 2.0) + a * a * b * b * r.powf(2.0 * b - 2.0)
            - a * b * drift * r.powf(b - 1.0)
    };
    let mut last_violation = None;
    for &r in &probes {
        if pot(r) < c0 * r.powf(alpha) {
            last_violation = Some(r);
        }
    }
    match last_violation {
        Some(r) if r > 32.0 => None, // not settled inside the probe window
        Some(r) => Some(GrowthCert { c0, alpha, r_bar: r }),
        None => Some(GrowthCert { c0, alpha, r_bar: probes[0] }),
    }
}

/// Largest `c0` (within factor-2 halving) and smallest node-aligned
/// `r_bar <= R/2` with `V(r_i) >= c0 r_i^{alpha_target}` at every node
/// beyond `r_bar`. `None` when no such pair exists.
pub fn classify_growth(
    pot: &Potential,
    grid: &RadialGrid,
    alpha_target: f64,
) -> Option<GrowthCert> {
    let nodes: Vec<f64> = grid.nodes().collect();
    let half = grid.r_outer() / 2.0;
    let c_start = nodes
        .iter()
        .filter(|r| **r > half)
        .map(|&r| pot.eval(r) / r.powf(alpha_target))
        .fold(f64::NEG_INFINITY, f64::max);
    // NaN-safe: a non-finite or nonpositive start ratio means no certificate
    if c_start.is_nan() || c_start <= 0.0 || !c_start.is_finite() {
        return None;
    }
    let mut c = c_start;
    for _ in 0..=60 {
        let mut last_violation: Option<f64> = None;
        for &r in &nodes {
            if pot.eval(r) < c * r.powf(alpha_target) {
                last_violation = Some(r);
            }
        }
        let r_bar = last_violation.unwrap_or(nodes[0]);
        if r_bar <= half {
            return Some(GrowthCert { c0: c, alpha: alpha_target, r_bar });
        }
        c /= 2.0;
    }
    None
}
