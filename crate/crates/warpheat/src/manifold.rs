//! Rotationally symmetric manifolds `dr² + ψ(r)² dθ²`, their radial
//! coefficients, grids, measures, and the pole-centered Green integral.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{trapezoid, unit_sphere_area};

/// Warp evaluated as `r -> (ψ, ψ')`.
pub type CustomWarp = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

#[derive(Clone)]
pub enum WarpFamily {
    /// ψ(r) = r (flat space).
    Euclidean,
    /// ψ(r) = sinh r (constant curvature -1).
    Hyperbolic,
    /// ψ(r) = exp(α r^γ) for r > 1, joined to class-𝒜 behavior near the
    /// pole by ψ(r) = r·exp(c₁ r² + c₂ r⁴) on [0, 1] with (c₁, c₂) chosen
    /// so that value and slope match at r = 1.
    ExpPower { alpha: f64, gamma: f64 },
    Custom(CustomWarp),
}

impl std::fmt::Debug for WarpFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WarpFamily::Euclidean => write!(f, "Euclidean"),
            WarpFamily::Hyperbolic => write!(f, "Hyperbolic"),
            WarpFamily::ExpPower { alpha, gamma } => {
                write!(f, "ExpPower {{ alpha: {alpha}, gamma: {gamma} }}")
            }
            WarpFamily::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WarpingFunction {
    pub family: WarpFamily,
}

impl WarpingFunction {
    pub fn euclidean() -> Self {
        Self { family: WarpFamily::Euclidean }
    }

    pub fn hyperbolic() -> Self {
        Self { family: WarpFamily::Hyperbolic }
    }

    pub fn exp_power(alpha: f64, gamma: f64) -> Result<Self> {
        if alpha <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "exp-power warp needs alpha > 0",
            });
        }
        if gamma < 1.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "exp-power warp needs gamma >= 1",
            });
        }
        Ok(Self { family: WarpFamily::ExpPower { alpha, gamma } })
    }

    pub fn custom(f: CustomWarp) -> Self {
        Self { family: WarpFamily::Custom(f) }
    }

    /// Inner-blend exponents for the exp-power family. Matching value and
    /// slope of `exp(α r^γ)` at r = 1 needs two coefficients; a single
    /// quadratic exponent cannot satisfy both.
    fn blend_coeffs(alpha: f64, gamma: f64) -> (f64, f64) {
        let c2 = (alpha * gamma - 1.0 - 2.0 * alpha) / 2.0;
        let c1 = alpha - c2;
        (c1, c2)
    }

    /// (ψ, ψ').
    pub fn eval(&self, r: f64) -> (f64, f64) {
        match &self.family {
            WarpFamily::Euclidean => (r, 1.0),
            WarpFamily::Hyperbolic => (r.sinh(), r.cosh()),
            WarpFamily::ExpPower { alpha, gamma } => {
                if r > 1.0 {
                    let psi = (alpha * r.powf(*gamma)).exp();
                    (psi, alpha * gamma * r.powf(gamma - 1.0) * psi)
                } else {
                    let (c1, c2) = Self::blend_coeffs(*alpha, *gamma);
                    let e = (c1 * r * r + c2 * r.powi(4)).exp();
                    let psi = r * e;
                    let dpsi = (1.0 + 2.0 * c1 * r * r + 4.0 * c2 * r.powi(4)) * e;
                    (psi, dpsi)
                }
            }
            WarpFamily::Custom(f) => f(r),
        }
    }

    /// ψ'/ψ, evaluated without forming ψ (the exp-power weight overflows
    /// long before the ratio does).
    pub fn log_derivative(&self, r: f64) -> Result<f64> {
        match &self.family {
            WarpFamily::Euclidean => Ok(1.0 / r),
            WarpFamily::Hyperbolic => Ok(1.0 / r.tanh()),
            WarpFamily::ExpPower { alpha, gamma } => {
                if r > 1.0 {
                    Ok(alpha * gamma * r.powf(gamma - 1.0))
                } else {
                    let (c1, c2) = Self::blend_coeffs(*alpha, *gamma);
                    Ok(1.0 / r + 2.0 * c1 * r + 4.0 * c2 * r.powi(3))
                }
            }
            WarpFamily::Custom(f) => {
                let (psi, dpsi) = f(r);
                if psi <= 0.0 {
                    return Err(Error::NonpositiveWarp { r, psi });
                }
                Ok(dpsi / psi)
            }
        }
    }

    /// ln ψ, stable for warps whose ψ overflows f64.
    pub fn log_psi(&self, r: f64) -> f64 {
        match &self.family {
            WarpFamily::Euclidean => r.ln(),
            WarpFamily::Hyperbolic => {
                if r > 20.0 {
                    // sinh r = e^r (1 - e^{-2r}) / 2
                    r - std::f64::consts::LN_2 + (-(-2.0 * r).exp()).ln_1p()
                } else {
                    r.sinh().ln()
                }
            }
            WarpFamily::ExpPower { alpha, gamma } => {
                if r > 1.0 {
                    alpha * r.powf(*gamma)
                } else {
                    let (c1, c2) = Self::blend_coeffs(*alpha, *gamma);
                    r.ln() + c1 * r * r + c2 * r.powi(4)
                }
            }
            WarpFamily::Custom(f) => f(r).0.ln(),
        }
    }
}

/// A model manifold: dimension and warping function.
#[derive(Clone, Debug)]
pub struct ModelManifold {
    dim: u32,
    warp: WarpingFunction,
}

impl ModelManifold {
    pub fn new(dim: u32, warp: WarpingFunction) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter {
                name: "dim",
                value: dim as f64,
                reason: "model manifolds need dimension >= 2",
            });
        }
        Ok(Self { dim, warp })
    }

    pub fn euclidean(dim: u32) -> Self {
        Self::new(dim, WarpingFunction::euclidean()).expect("dim checked by caller")
    }

    pub fn hyperbolic(dim: u32) -> Self {
        Self::new(dim, WarpingFunction::hyperbolic()).expect("dim checked by caller")
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn warp(&self) -> &WarpingFunction {
        &self.warp
    }

    pub fn psi(&self, r: f64) -> f64 {
        self.warp.eval(r).0
    }

    /// Radial drift m(r) = (n-1) ψ'/ψ of the Laplace-Beltrami operator.
    pub fn drift(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::NonpositiveRadius(r));
        }
        Ok((self.dim - 1) as f64 * self.warp.log_derivative(r)?)
    }

    /// Measure weight ψ(r)^{n-1} of the radial volume element.
    pub fn volume_weight(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::NonpositiveRadius(r));
        }
        let (psi, _) = self.warp.eval(r);
        if psi <= 0.0 {
            return Err(Error::NonpositiveWarp { r, psi });
        }
        Ok(psi.powi(self.dim as i32 - 1))
    }

    /// (n-1)·ln ψ(r) for integrands that would overflow in linear scale.
    pub fn log_volume_weight(&self, r: f64) -> f64 {
        (self.dim - 1) as f64 * self.warp.log_psi(r)
    }

    /// Volume of the geodesic ball of radius `radius`:
    /// `ω_{n-1} ∫_0^R ψ^{n-1} dr` by composite trapezoid.
    pub fn ball_volume(&self, radius: f64) -> Result<f64> {
        if radius <= 0.0 {
            return Err(Error::NonpositiveRadius(radius));
        }
        let panels = 4096;
        let integral = trapezoid(
            |r| {
                if r == 0.0 {
                    0.0
                } else {
                    self.warp.eval(r).0.powi(self.dim as i32 - 1)
                }
            },
            0.0,
            radius,
            panels,
        );
        Ok(unit_sphere_area(self.dim) * integral)
    }

    /// Truncated radial Green integral from the pole,
    /// `∫_r^{r_max} ψ(s)^{1-n} ds`, with a non-parabolicity verdict from
    /// doubling the truncation radius twice and testing stabilization.
    pub fn green_integral_pole(&self, r: f64, r_max: f64) -> Result<GreenIntegral> {
        if r <= 0.0 {
            return Err(Error::NonpositiveRadius(r));
        }
        if r_max <= r {
            return Err(Error::BadTruncation { r, r_max });
        }
        let integrand = |s: f64| self.warp.eval(s).0.powi(1 - self.dim as i32);
        let quad = |hi: f64| {
            let panels = (((hi - r) * 64.0) as usize).clamp(4096, 1 << 21);
            trapezoid(integrand, r, hi, panels)
        };
        let base = quad(r_max);
        let once = quad(2.0 * r_max);
        let twice = quad(4.0 * r_max);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
        let non_parabolic = rel(once, base) < 1e-3 && rel(twice, once) < 1e-3;
        Ok(GreenIntegral { value: base, non_parabolic })
    }

    /// Verifies hypothesis (ii) of the pole assumption: drift nonnegative
    /// at every node of `grid`.
    pub fn check_drift_nonnegative(&self, grid: &RadialGrid) -> Result<()> {
        for r in grid.nodes() {
            let m = self.drift(r)?;
            if m < 0.0 {
                return Err(Error::NegativeDrift { r, m });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct GreenIntegral {
    pub value: f64,
    pub non_parabolic: bool,
}

/// Cell-centered uniform grid on [0, R]: nodes r_i = (i + 1/2) h with
/// h = R/N. The first node sits at h/2, clear of the drift singularity
/// at the pole.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialGrid {
    r_outer: f64,
    n_cells: usize,
}

impl RadialGrid {
    pub fn new(r_outer: f64, n_cells: usize) -> Result<Self> {
        if r_outer <= 0.0 {
            return Err(Error::NonpositiveRadius(r_outer));
        }
        if n_cells < 8 {
            return Err(Error::GridTooCoarse(n_cells));
        }
        Ok(Self { r_outer, n_cells })
    }

    pub fn r_outer(&self) -> f64 {
        self.r_outer
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn spacing(&self) -> f64 {
        self.r_outer / self.n_cells as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }

    /// Cell face i sits at i·h, i = 0..=N.
    pub fn face(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(move |i| self.node(i))
    }
}

/// Real samples on the nodes of a radial grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.n_cells(), "sample length must match grid");
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { grid, values }
    }

    pub fn sample(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(f).collect();
        Self::new(grid, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent sinh via its Taylor series.
    fn sinh_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for k in 1..30 {
            term *= x * x / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn drift_euclidean_examples() {
        let m3 = ModelManifold::euclidean(3);
        assert_eq!(m3.drift(2.0).unwrap(), 1.0);
        let m2 = ModelManifold::euclidean(2);
        assert_eq!(m2.drift(0.5).unwrap(), 2.0);
    }

    #[test]
    fn drift_hyperbolic_tends_to_n_minus_one() {
        // coth(50) -> 1; series oracle (1+e^{-100})/(1-e^{-100})
        let m = ModelManifold::hyperbolic(2);
        let oracle = (1.0 + (-100.0f64).exp()) / (1.0 - (-100.0f64).exp());
        let d = m.drift(50.0).unwrap();
        assert!((d - oracle).abs() < 1e-12);
        assert!((d - 1.0).abs() < 1e-6);
    }

    #[test]
    fn drift_rejects_nonpositive_radius() {
        let m = ModelManifold::euclidean(3);
        assert!(m.drift(0.0).is_err());
        assert!(m.drift(-1.0).is_err());
    }

    #[test]
    fn drift_detects_nonpositive_custom_warp() {
        let warp = WarpingFunction::custom(Arc::new(|r: f64| (r - 2.0, 1.0)));
        let m = ModelManifold::new(3, warp).unwrap();
        assert!(matches!(
            m.drift(1.0),
            Err(Error::NonpositiveWarp { .. })
        ));
    }

    #[test]
    fn volume_weight_examples() {
        assert_eq!(ModelManifold::euclidean(3).volume_weight(2.0).unwrap(), 4.0);
        assert_eq!(ModelManifold::euclidean(4).volume_weight(1.0).unwrap(), 1.0);
        let hyp = ModelManifold::hyperbolic(3);
        let oracle = sinh_series(1.0).powi(2);
        assert!((hyp.volume_weight(1.0).unwrap() - oracle).abs() < 1e-12);
        assert!((hyp.volume_weight(1.0).unwrap() - 1.3811).abs() < 1e-4);
    }

    #[test]
    fn ball_volume_closed_forms() {
        let v3 = ModelManifold::euclidean(3).ball_volume(1.0).unwrap();
        let exact3 = 4.0 * std::f64::consts::PI / 3.0;
        assert!((v3 - exact3).abs() / exact3 < 1e-4);

        let v2 = ModelManifold::euclidean(2).ball_volume(2.0).unwrap();
        let exact2 = 4.0 * std::f64::consts::PI;
        assert!((v2 - exact2).abs() / exact2 < 1e-4);
    }

    #[test]
    fn ball_volume_small_radius_asymptotics() {
        // V(R) ~ ω_{n-1} R^n / n as R -> 0 for any class-𝒜 warp.
        for m in [ModelManifold::euclidean(3), ModelManifold::hyperbolic(3)] {
            let r = 1e-3_f64;
            let lead = unit_sphere_area(3) * r.powi(3) / 3.0;
            let v = m.ball_volume(r).unwrap();
            assert!((v - lead).abs() / lead < 1e-5, "v={v} lead={lead}");
        }
    }

    #[test]
    fn ball_volume_increasing_and_second_order() {
        let m = ModelManifold::hyperbolic(3);
        let mut last = 0.0;
        for i in 1..=10 {
            let v = m.ball_volume(0.5 * i as f64).unwrap();
            assert!(v > last);
            last = v;
        }
        // quadrature order on the Euclidean closed form
        let exact = 4.0 * std::f64::consts::PI / 3.0;
        let err = |panels: usize| {
            let integral = trapezoid(|r| r * r, 0.0, 1.0, panels);
            (unit_sphere_area(3) * integral - exact).abs()
        };
        let order = (err(256) / err(512)).log2();
        assert!(order > 1.9, "order {order}");
    }

    #[test]
    fn green_integral_euclidean_3d() {
        let m = ModelManifold::euclidean(3);
        let g = m.green_integral_pole(1.0, 1e3).unwrap();
        // ∫_1^∞ s^{-2} ds = 1
        assert!((g.value - (1.0 - 1e-3)).abs() < 1e-4);
        assert!((g.value - 1.0).abs() < 2e-3);
        assert!(g.non_parabolic);
    }

    #[test]
    fn green_integral_euclidean_2d_diverges() {
        let m = ModelManifold::euclidean(2);
        let g = m.green_integral_pole(1.0, 1e3).unwrap();
        assert!(!g.non_parabolic);
    }

    #[test]
    fn green_integral_hyperbolic_3d() {
        let m = ModelManifold::hyperbolic(3);
        let g = m.green_integral_pole(1.0, 100.0).unwrap();
        // ∫_1^∞ sinh^{-2} = coth(1) - 1
        let coth = |x: f64| 1.0 / x.tanh();
        assert!((g.value - (coth(1.0) - 1.0)).abs() < 1e-4);
        assert!(g.non_parabolic);
    }

    #[test]
    fn green_integral_rejects_bad_range() {
        let m = ModelManifold::euclidean(3);
        assert!(m.green_integral_pole(2.0, 1.0).is_err());
    }

    #[test]
    fn euclidean_drift_times_r_is_exact() {
        let grid = RadialGrid::new(10.0, 64).unwrap();
        for n in [2u32, 3, 5] {
            let m = ModelManifold::euclidean(n);
            for r in grid.nodes() {
                let err = (m.drift(r).unwrap() * r - (n - 1) as f64).abs();
                assert!(err <= 2.0 * f64::EPSILON * (n - 1) as f64);
            }
        }
    }

    #[test]
    fn hyperbolic_drift_decreasing_and_comparison_bound() {
        let grid = RadialGrid::new(20.0, 256).unwrap();
        let m = ModelManifold::hyperbolic(3);
        let mut prev = f64::INFINITY;
        for r in grid.nodes() {
            let d = m.drift(r).unwrap();
            // coth saturates to 1.0 in f64 beyond r ~ 19, so non-strict there
            if r < 15.0 {
                assert!(d < prev);
            } else {
                assert!(d <= prev);
            }
            assert!(d >= 2.0 / r); // m(r) >= (n-1)/r on Cartan-Hadamard
            assert!(d >= 2.0); // bounded below by n-1
            prev = d;
        }
    }

    #[test]
    fn exp_power_blend_is_c1_and_pole_normalized() {
        for (alpha, gamma) in [(1.0, 2.0), (1.0, 4.0), (0.5, 3.0)] {
            let w = WarpingFunction::exp_power(alpha, gamma).unwrap();
            let (psi_l, dpsi_l) = w.eval(1.0 - 1e-12);
            let (psi_r, dpsi_r) = w.eval(1.0 + 1e-12);
            assert!((psi_l - psi_r).abs() / psi_r < 1e-9);
            assert!((dpsi_l - dpsi_r).abs() / dpsi_r < 1e-8);

            // ψ(r)/r -> 1 at the pole
            for r in [1e-3, 1e-4, 1e-5] {
                let (psi, _) = w.eval(r);
                assert!((psi / r - 1.0).abs() < 1e-2 * r, "r={r}");
            }
        }
    }

    #[test]
    fn exp_power_drift_nonnegative() {
        let w = WarpingFunction::exp_power(1.0, 2.0).unwrap();
        let m = ModelManifold::new(3, w).unwrap();
        let grid = RadialGrid::new(6.0, 512).unwrap();
        m.check_drift_nonnegative(&grid).unwrap();
        for r in grid.nodes().filter(|r| *r > 1.0) {
            assert!(m.drift(r).unwrap() >= 0.0);
        }
    }

    #[test]
    fn log_volume_weight_matches_linear_scale() {
        let m = ModelManifold::hyperbolic(3);
        for r in [0.3, 1.0, 5.0, 15.0] {
            let lin = m.volume_weight(r).unwrap().ln();
            assert!((m.log_volume_weight(r) - lin).abs() < 1e-10);
        }
        // and stays finite where the linear scale overflows
        let w = WarpingFunction::exp_power(1.0, 4.0).unwrap();
        let mx = ModelManifold::new(3, w).unwrap();
        assert!(mx.log_volume_weight(8.0).is_finite());
        assert!(!mx.volume_weight(8.0).unwrap().is_finite());
    }

    #[test]
    fn grid_nodes_strictly_increasing_and_offset() {
        let g = RadialGrid::new(2.0, 16).unwrap();
        let h = g.spacing();
        assert_eq!(g.node(0), h / 2.0);
        assert_eq!(g.node(15), 2.0 - h / 2.0);
        let nodes: Vec<f64> = g.nodes().collect();
        assert!(nodes.windows(2).all(|w| w[1] > w[0]));
        assert!(RadialGrid::new(1.0, 4).is_err());
    }
}
