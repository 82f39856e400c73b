//! Mixed Gaussian states: the closed-form density matrix with coherence factor
//! `P`, and brute-force averages of pure density matrices over a Gaussian
//! spread of classical centers.

mod hermite;
mod identities;

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::analytic::{center_state, gaussian_density_values, quadrature_shape};
use crate::error::{invariant, Error, Result};
use crate::grid::GridSpec;
use crate::params::{CenterTrajectory, GaussianStateSpec, SqueezeDynamics};
use crate::sample::DensityMatrixSample;

pub use hermite::standard_normal_rule;
pub use identities::{gaussian_identity_exponential, gaussian_identity_shifted};

/// Smallest Gauss–Hermite rule accepted per axis.
pub const MIN_NODES: usize = 16;

/// Peak-relative change allowed when the node count is doubled.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-8;

/// Default sample count of the Monte Carlo mode.
pub const DEFAULT_MC_SAMPLES: usize = 100_000;

/// Members are accumulated into the density matrix in blocks of this size.
const MEMBER_BLOCK: usize = 512;

/// A pure squeezed state whose center is smeared by an isotropic Gaussian of
/// width `σ_a` in the `(x_c, p_c/mω)` plane.
///
/// The mean center at `t = 0` is the base state's center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedGaussianSpec {
    base: GaussianStateSpec,
    sigma_a: f64,
}

impl MixedGaussianSpec {
    pub fn new(base: GaussianStateSpec, sigma_a: f64) -> Result<Self> {
        if !base.is_pure() {
            return Err(invariant(
                "base state pure (P = 1)",
                format!("P = {}", base.purity_product()),
            ));
        }
        if !(sigma_a >= 0.0 && sigma_a.is_finite()) {
            return Err(invariant("sigma_a >= 0", format!("sigma_a = {sigma_a}")));
        }
        Ok(Self { base, sigma_a })
    }

    pub fn base(&self) -> &GaussianStateSpec {
        &self.base
    }

    pub fn sigma_a(&self) -> f64 {
        self.sigma_a
    }

    /// `(x̄_c, p̄_c)` at `t = 0`.
    pub fn mean_center(&self) -> (f64, f64) {
        center_state(&self.base.center, &self.base.osc, 0.0)
    }
}

/// The closed-form parameters of the mixture: `A0 → A0 + σ_a²/σ_gr²`, with
/// `ΔA`, `φ_sq` and the mean center unchanged and `P` recomputed.
pub fn reparameterize(spec: &MixedGaussianSpec) -> GaussianStateSpec {
    let base = spec.base;
    let ratio = spec.sigma_a * spec.sigma_a / base.osc.ground_variance();
    let sq = &base.squeeze;
    let squeeze = SqueezeDynamics::new(sq.mean_variance() + ratio, sq.amplitude(), sq.phase())
        .expect("widening A0 keeps A0 > dA and P >= 1");
    let (x0, p0) = spec.mean_center();
    let center = CenterTrajectory::through(x0, p0, &base.osc);
    let product = squeeze.purity_product();
    GaussianStateSpec::with_purity_product(base.osc, squeeze, center, product)
        .expect("P taken from the squeeze itself")
}

/// Closed-form Gaussian density matrix with coherence factor `P ≥ 1`.
pub fn eval_mixed_density(spec: &GaussianStateSpec, grid: &GridSpec, t: f64) -> Result<DensityMatrixSample> {
    if spec.purity_product() < 1.0 - crate::params::PURITY_PRODUCT_TOLERANCE {
        return Err(Error::Domain(format!("mixed density requires P >= 1, got {}", spec.purity_product())));
    }
    grid.check_covers(spec)?;
    DensityMatrixSample::new(*grid, gaussian_density_values(spec, grid, t), t)
}

/// One ensemble member: weight and initial center offsets in units of `σ_a`.
#[derive(Debug, Clone, Copy)]
struct Member {
    weight: f64,
    u: f64,
    v: f64,
}

/// `Σ_k w_k ψ_k(x) ψ_k*(x')` over members evolved classically to time `t`.
///
/// Blocks of members are summed in a fixed order and every row is reduced
/// sequentially, so the result does not depend on the thread count.
fn accumulate(spec: &MixedGaussianSpec, grid: &GridSpec, t: f64, members: &[Member]) -> Array2<Complex64> {
    let base = &spec.base;
    let osc = &base.osc;
    let mw = osc.mass() * osc.angular_frequency();
    let (a, b) = quadrature_shape(&base.squeeze, osc.angular_frequency(), t);
    let s = osc.ground_variance() * a;
    let amplitude = (2.0 * PI * s).powf(-0.25);
    let chirp = Complex64::new(1.0, b) / (4.0 * s);
    let (x_bar, p_bar) = spec.mean_center();
    let xs = grid.points();
    let n = xs.len();
    let mut rho = Array2::<Complex64>::zeros((n, n));

    for block in members.chunks(MEMBER_BLOCK) {
        let k = block.len();
        // psi[i * k + m] = √w_m ψ_m(x_i)
        let mut psi = vec![Complex64::new(0.0, 0.0); n * k];
        psi.par_chunks_mut(k).zip(xs.par_iter()).for_each(|(row, &x)| {
            for (slot, member) in row.iter_mut().zip(block) {
                let x0 = x_bar + spec.sigma_a * member.u;
                let p0 = p_bar + mw * spec.sigma_a * member.v;
                let (xc, pc) = center_state(&CenterTrajectory::through(x0, p0, osc), osc, t);
                let d = x - xc;
                let exponent = -chirp * d * d + Complex64::new(0.0, pc * x / osc.hbar());
                *slot = member.weight.sqrt() * amplitude * exponent.exp();
            }
        });
        let upper: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let ri = &psi[i * k..(i + 1) * k];
                (i..n)
                    .map(|j| {
                        let rj = &psi[j * k..(j + 1) * k];
                        ri.iter().zip(rj).map(|(p, q)| p * q.conj()).sum()
                    })
                    .collect()
            })
            .collect();
        for (i, row) in upper.into_iter().enumerate() {
            for (offset, value) in row.into_iter().enumerate() {
                rho[[i, i + offset]] += value;
            }
        }
    }
    for i in 0..n {
        rho[[i, i]].im = 0.0;
        for j in 0..i {
            rho[[i, j]] = rho[[j, i]].conj();
        }
    }
    rho
}

/// Tensor Gauss–Hermite average with `n_nodes` nodes per axis, without the
/// convergence check.
pub fn gauss_hermite_average(
    spec: &MixedGaussianSpec,
    grid: &GridSpec,
    t: f64,
    n_nodes: usize,
) -> Result<DensityMatrixSample> {
    if n_nodes == 0 {
        return Err(Error::Domain("at least one node per axis is required".into()));
    }
    grid.check_covers(&reparameterize(spec))?;
    let members = if spec.sigma_a == 0.0 {
        vec![Member { weight: 1.0, u: 0.0, v: 0.0 }]
    } else {
        let (nodes, weights) = standard_normal_rule(n_nodes);
        let mut members = Vec::with_capacity(n_nodes * n_nodes);
        for (u, wu) in nodes.iter().zip(&weights) {
            for (v, wv) in nodes.iter().zip(&weights) {
                members.push(Member { weight: wu * wv, u: *u, v: *v });
            }
        }
        members
    };
    DensityMatrixSample::new(*grid, accumulate(spec, grid, t, &members), t)
}

/// Tensor Gauss–Hermite average of pure density matrices over the initial
/// center distribution, each member moved along its classical orbit to `t`.
///
/// The rule is compared against one with twice the nodes; a peak-relative
/// change above [`CONVERGENCE_TOLERANCE`] is a [`Error::Convergence`].
pub fn ensemble_average_density(
    spec: &MixedGaussianSpec,
    grid: &GridSpec,
    t: f64,
    n_nodes: usize,
) -> Result<DensityMatrixSample> {
    if n_nodes < MIN_NODES {
        return Err(Error::Domain(format!("need at least {MIN_NODES} nodes per axis, got {n_nodes}")));
    }
    let coarse = gauss_hermite_average(spec, grid, t, n_nodes)?;
    if spec.sigma_a == 0.0 {
        return Ok(coarse);
    }
    let fine = gauss_hermite_average(spec, grid, t, 2 * n_nodes)?;
    let change = fine.peak_relative_deviation(&coarse)?;
    if change > CONVERGENCE_TOLERANCE {
        return Err(Error::Convergence {
            nodes: n_nodes,
            change,
            tolerance: CONVERGENCE_TOLERANCE,
        });
    }
    Ok(coarse)
}

/// Monte Carlo average over `samples` members drawn with a seeded generator.
///
/// The draws are stratified: the unit square of the two normal quantiles is cut
/// into `m × m` cells, `m = ⌈√samples⌉`, with one jittered point per cell.
pub fn monte_carlo_average(
    spec: &MixedGaussianSpec,
    grid: &GridSpec,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<DensityMatrixSample> {
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    grid.check_covers(&reparameterize(spec))?;
    let side = (samples as f64).sqrt().ceil() as usize;
    let normal = Normal::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = 1.0 / (side * side) as f64;
    let mut members = Vec::with_capacity(side * side);
    for i in 0..side {
        for j in 0..side {
            let qu = (i as f64 + rng.random::<f64>()) / side as f64;
            let qv = (j as f64 + rng.random::<f64>()) / side as f64;
            members.push(Member {
                weight,
                u: normal.inverse_cdf(qu),
                v: normal.inverse_cdf(qv),
            });
        }
    }
    // an endpoint draw of exactly 0 maps to -inf; such a member carries no mass
    members.retain(|m| m.u.is_finite() && m.v.is_finite());
    DensityMatrixSample::new(*grid, accumulate(spec, grid, t, &members), t)
}
