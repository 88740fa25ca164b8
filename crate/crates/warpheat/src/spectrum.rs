//! Flux-form discretization of `-Δ + V` on balls, lowest Dirichlet
//! eigenpairs, spectral-bottom estimation on expanding balls, and the
//! quadratic form `Q[ζ] = ∫ |∇ζ|² + V ζ² dν`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::{GridFunction, ModelManifold, RadialGrid};
use crate::numerics::solve_tridiagonal;
use crate::potential::Potential;

/// Symmetric tridiagonal stiffness-plus-potential operator in the
/// measure-weighted inner product `m(u,v) = Σ u_i v_i w_i`,
/// `w_i = ψ(r_i)^{n-1} h`.
///
/// Face couplings `c_i = ψ(f_i)^{n-1}/h` connect neighboring cells; the
/// pole face carries zero flux, the outer face a mirror ghost so the
/// Dirichlet value sits on `r = R` itself (`c_N = 2 ψ(R)^{n-1}/h`).
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pub grid: RadialGrid,
    diag: Vec<f64>,
    off: Vec<f64>,
    mass: Vec<f64>,
    coupling: Vec<f64>,
    potential_diag: Vec<f64>,
}

/// Assembles the operator for `manifold`, `pot` on `grid`.
pub fn assemble(
    manifold: &ModelManifold,
    pot: &Potential,
    grid: &RadialGrid,
) -> Result<DiscreteOperator> {
    let n = grid.n_cells();
    let h = grid.spacing();

    let mut v = Vec::with_capacity(n);
    for r in grid.nodes() {
        let val = pot.eval(r);
        if !val.is_finite() {
            return Err(Error::NonFinitePotential(r));
        }
        v.push(val);
    }
    for i in 0..n - 1 {
        let jump = (v[i + 1] - v[i]).abs();
        if jump > 1e3 * (v[i].abs().min(v[i + 1].abs()) + 1.0) {
            return Err(Error::UnresolvedPotential {
                r_lo: grid.node(i),
                r_hi: grid.node(i + 1),
                jump,
            });
        }
    }

    let weight = |r: f64| manifold.psi(r).powi(manifold.dim() as i32 - 1);
    let mut coupling = Vec::with_capacity(n + 1);
    coupling.push(0.0); // zero flux through the pole
    for i in 1..n {
        coupling.push(weight(grid.face(i)) / h);
    }
    // mirror ghost: Dirichlet value on the face r = R
    coupling.push(2.0 * weight(grid.r_outer()) / h);

    let mass: Vec<f64> = grid.nodes().map(|r| weight(r) * h).collect();
    let potential_diag: Vec<f64> = (0..n).map(|i| v[i] * mass[i]).collect();

    let diag: Vec<f64> = (0..n)
        .map(|i| coupling[i] + coupling[i + 1] + potential_diag[i])
        .collect();
    let off: Vec<f64> = (1..n).map(|i| -coupling[i]).collect();

    Ok(DiscreteOperator { grid: *grid, diag, off, mass, coupling, potential_diag })
}

/// Assembles the weighted Laplacian `-Δ_μ` for `dμ = φ² dν`: same flux
/// form with face weights `ψ^{n-1} φ²` and node masses `w_i φ(r_i)²`,
/// no potential term.
pub fn assemble_weighted(
    manifold: &ModelManifold,
    profile: &crate::stationary::StationaryProfile,
    grid: &RadialGrid,
) -> Result<DiscreteOperator> {
    let n = grid.n_cells();
    let h = grid.spacing();

    let weight = |r: f64| {
        let phi = profile.value(r);
        manifold.psi(r).powi(manifold.dim() as i32 - 1) * phi * phi
    };
    for r in grid.nodes() {
        let phi = profile.value(r);
        if phi <= 0.0 {
            return Err(Error::NonpositiveProfile { r, value: phi });
        }
    }

    let mut coupling = Vec::with_capacity(n + 1);
    coupling.push(0.0);
    for i in 1..n {
        coupling.push(weight(grid.face(i)) / h);
    }
    coupling.push(2.0 * weight(grid.r_outer()) / h);

    let mass: Vec<f64> = grid.nodes().map(|r| weight(r) * h).collect();
    let potential_diag = vec![0.0; n];
    let diag: Vec<f64> = (0..n).map(|i| coupling[i] + coupling[i + 1]).collect();
    let off: Vec<f64> = (1..n).map(|i| -coupling[i]).collect();

    Ok(DiscreteOperator { grid: *grid, diag, off, mass, coupling, potential_diag })
}

impl DiscreteOperator {
    pub fn n(&self) -> usize {
        self.mass.len()
    }

    pub fn mass_weights(&self) -> &[f64] {
        &self.mass
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diag(&self) -> &[f64] {
        &self.off
    }

    pub fn couplings(&self) -> &[f64] {
        &self.coupling
    }

    pub fn potential_diag(&self) -> &[f64] {
        &self.potential_diag
    }

    /// `A u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(u.len(), n);
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * u[i];
            if i > 0 {
                acc += self.off[i - 1] * u[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * u[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    /// Bilinear form `a(u, v) = u·(A v)`.
    pub fn form(&self, u: &[f64], v: &[f64]) -> f64 {
        self.apply(v).iter().zip(u).map(|(av, u)| av * u).sum()
    }

    /// Mass inner product `Σ u_i v_i w_i`.
    pub fn mass_ip(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(&self.mass).map(|((a, b), w)| a * b * w).sum()
    }

    /// Rayleigh quotient `a(ζ,ζ) / m(ζ,ζ)`.
    pub fn rayleigh(&self, zeta: &GridFunction) -> Result<f64> {
        let mm = self.mass_ip(&zeta.values, &zeta.values);
        if mm <= 0.0 {
            return Err(Error::ZeroMassNorm);
        }
        Ok(self.form(&zeta.values, &zeta.values) / mm)
    }

    /// Solves `(A - σ M) x = rhs` in place.
    fn solve_shifted(&self, sigma: f64, rhs: &mut [f64]) -> Result<()> {
        let shifted: Vec<f64> = self
            .diag
            .iter()
            .zip(&self.mass)
            .map(|(d, w)| d - sigma * w)
            .collect();
        solve_tridiagonal(&self.off, &shifted, &self.off, rhs)
    }

    /// Adds `c` to the potential part (matrix becomes `A + c M`).
    pub fn shifted_potential(&self, c: f64) -> DiscreteOperator {
        let mut out = self.clone();
        for i in 0..out.n() {
            out.diag[i] += c * out.mass[i];
            out.potential_diag[i] += c * out.mass[i];
        }
        out
    }

    /// Smallest generalized eigenpair of `(A, M)` by shifted inverse power
    /// iteration: a warmup phase with a safe shift below the spectrum,
    /// then Rayleigh-updated shifts `σ = λ̂ - 0.1`.
    pub fn lowest_eigenpair(&self) -> Result<EigenResult> {
        let cap = 10_000usize;

        // measure-weighted Gaussian bump at the pole: guaranteed overlap
        // with the positive ground state
        let width = self.grid.r_outer() / 6.0;
        let mut v: Vec<f64> = self
            .grid
            .nodes()
            .map(|r| (-(r / width).powi(2)).exp())
            .collect();
        normalize_mass(self, &mut v)?;

        // safe shift strictly below the spectrum: a(u,u) >= (min V) m(u,u)
        let min_v = self
            .potential_diag
            .iter()
            .zip(&self.mass)
            .map(|(pv, w)| pv / w)
            .fold(f64::INFINITY, f64::min);
        let sigma_safe = min_v.min(0.0) - 1.0;

        let mut lambda = rayleigh_raw(self, &v);
        let mut iterations = 0usize;
        let mut converged = false;

        for k in 0..cap {
            let sigma = if k < 30 { sigma_safe } else { lambda - 0.1 };
            let mut x: Vec<f64> = v.iter().zip(&self.mass).map(|(vi, w)| vi * w).collect();
            if self.solve_shifted(sigma, &mut x).is_err() {
                // shift landed on an eigenvalue; nudge and retry once
                let mut y: Vec<f64> = v.iter().zip(&self.mass).map(|(vi, w)| vi * w).collect();
                self.solve_shifted(sigma - 1e-8 * (1.0 + sigma.abs()), &mut y)?;
                x = y;
            }
            normalize_mass(self, &mut x)?;
            let next = rayleigh_raw(self, &x);
            v = x;
            iterations = k + 1;
            if k >= 30 && (next - lambda).abs() < 1e-10 * (1.0 + next.abs()) {
                lambda = next;
                converged = true;
                break;
            }
            lambda = next;
        }

        // ground states are positive; fix the harmless global sign
        let total: f64 = v.iter().zip(&self.mass).map(|(vi, w)| vi * w).sum();
        if total < 0.0 {
            for vi in &mut v {
                *vi = -*vi;
            }
        }

        let av = self.apply(&v);
        let num: f64 = av
            .iter()
            .zip(v.iter().zip(&self.mass))
            .map(|(a, (vi, w))| (a - lambda * vi * w).powi(2))
            .sum::<f64>()
            .sqrt();
        let den: f64 = v
            .iter()
            .zip(&self.mass)
            .map(|(vi, w)| (vi * w).powi(2))
            .sum::<f64>()
            .sqrt();

        Ok(EigenResult {
            lambda,
            profile: GridFunction::new(self.grid, v),
            iterations,
            residual: num / den,
            converged,
        })
    }
}

fn normalize_mass(op: &DiscreteOperator, v: &mut [f64]) -> Result<()> {
    let norm = op.mass_ip(v, v).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroMassNorm);
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    Ok(())
}

fn rayleigh_raw(op: &DiscreteOperator, v: &[f64]) -> f64 {
    op.form(v, v) / op.mass_ip(v, v)
}

/// Lowest eigenpair with mass-normalized positive profile.
#[derive(Clone, Debug)]
pub struct EigenResult {
    pub lambda: f64,
    pub profile: GridFunction,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub radius: f64,
    pub cells: usize,
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Dirichlet eigenvalues on an expanding ball schedule plus the
/// Richardson-extrapolated spectral bottom.
#[derive(Clone, Debug, Serialize)]
pub struct Lambda1Sweep {
    pub rows: Vec<SweepRow>,
    pub extrapolated: f64,
    /// `Λ₁ >= -1e-6` verdict, emitted when the potential carries a floor
    /// certificate.
    pub lemma66_nonnegative: Option<bool>,
}

/// Runs `lowest_eigenpair` on each ball of the schedule. `cells_per_unit`
/// fixes the grid density (h identical across the schedule, so domain
/// monotonicity is not polluted by resolution changes). The extrapolation
/// removes the leading `C/R²` Dirichlet excess from the final two entries.
pub fn estimate_lambda1(
    manifold: &ModelManifold,
    pot: &Potential,
    r_schedule: &[f64],
    cells_per_unit: usize,
) -> Result<Lambda1Sweep> {
    if r_schedule.len() < 3 {
        return Err(Error::BadConfig(
            "eigenvalue schedule needs at least 3 radii".into(),
        ));
    }
    let mut rows = Vec::with_capacity(r_schedule.len());
    for &radius in r_schedule {
        let cells = ((radius * cells_per_unit as f64).round() as usize).max(8);
        let grid = RadialGrid::new(radius, cells)?;
        let op = assemble(manifold, pot, &grid)?;
        let eig = op.lowest_eigenpair()?;
        rows.push(SweepRow {
            radius,
            cells,
            lambda: eig.lambda,
            residual: eig.residual,
            iterations: eig.iterations,
        });
    }
    for pair in rows.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b.lambda > a.lambda + 1e-8 * a.lambda.abs().max(1.0) {
            return Err(Error::NonMonotoneSweep {
                r_prev: a.radius,
                prev: a.lambda,
                r_next: b.radius,
                next: b.lambda,
            });
        }
    }
    let k = rows.len();
    let (r1, l1) = (rows[k - 2].radius, rows[k - 2].lambda);
    let (r2, l2) = (rows[k - 1].radius, rows[k - 1].lambda);
    let c = (l1 - l2) / (1.0 / (r1 * r1) - 1.0 / (r2 * r2));
    let extrapolated = l2 - c / (r2 * r2);

    let lemma66_nonnegative = pot.floor_cert.map(|_| extrapolated >= -1e-6);

    Ok(Lambda1Sweep { rows, extrapolated, lemma66_nonnegative })
}

/// Ground-shift normalization: returns `F - λ₀(B_{r_big})` with the growth
/// certificate degraded (`c0/2`, `r_bar` enlarged) so it survives the shift,
/// plus the subtracted `λ₀`.
pub fn normalize_shift(
    manifold: &ModelManifold,
    pot: &Potential,
    r_big: f64,
    cells: usize,
) -> Result<(Potential, f64)> {
    let grid = RadialGrid::new(r_big, cells)?;
    let op = assemble(manifold, pot, &grid)?;
    let eig = op.lowest_eigenpair()?;
    let lambda0 = eig.lambda;

    let mut shifted = pot.shifted(-lambda0);
    if let Some(cert) = pot.growth_cert {
        let new_cert = if lambda0 > 0.0 {
            crate::potential::GrowthCert {
                c0: cert.c0 / 2.0,
                alpha: cert.alpha,
                r_bar: cert.r_bar.max((2.0 * lambda0 / cert.c0).powf(1.0 / cert.alpha)),
            }
        } else {
            cert
        };
        shifted = shifted.with_growth_cert(new_cert);
    }
    if let Some(floor) = pot.floor_cert {
        shifted = shifted.with_floor_cert(if lambda0 > 0.0 { floor + lambda0 } else { floor });
    }
    Ok((shifted, lambda0))
}
