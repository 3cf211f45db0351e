//! Discrete Gaussian sampling over Z and over lattices given by an integer
//! basis, together with the parameter checks that gate the samplers.
//!
//! Widths are standard deviations: ρ_{s,c}(x) = exp(−‖x − c‖² / 2s²).

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::RingParams;

/// Default ε for the smoothing-parameter floor.
pub const DEFAULT_SMOOTHING_EPSILON: f64 = 5.421010862427522e-20; // 2^-64

/// Half-width of the support window of [`sample_z`], in units of `s`.
pub const TAIL_CUT: f64 = 10.0;

/// Errors raised by lattice samplers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("width {s} is below the smoothing floor {floor}")]
    ParamTooSmall { s: f64, floor: f64 },
    #[error("basis is not square and full rank")]
    DegenerateBasis,
    #[error("center has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("width must be positive and finite, got {0}")]
    InvalidWidth(f64),
}

/// Samples z ∈ Z with Pr[z] ∝ exp(−(z − c)² / 2s²), restricted to
/// |z − c| ≤ ⌈10s⌉.
///
/// Rejection sampling from a two-sided geometric proposal centred at the
/// integer nearest `c` with scale `b = max(s, 1)`. The envelope constant is
/// the exact maximum of target/proposal over the integers, so the accepted
/// pmf is exactly the truncated Gaussian.
pub fn sample_z<R: Rng + ?Sized>(s: f64, c: f64, rng: &mut R) -> i64 {
    assert!(s > 0.0 && s.is_finite(), "sample_z needs a positive width");
    let c0 = c.round();
    let delta = c - c0;
    let b = s.max(1.0);
    let window = (TAIL_CUT * s).ceil();
    // log(target/proposal) at offset k from c0, up to a constant.
    let log_ratio = |k: f64| -(k - delta).powi(2) / (2.0 * s * s) + k.abs() / b;
    let peak = s * s / b;
    let up = (delta + peak).max(0.0);
    let down = (-delta + peak).max(0.0);
    let log_envelope = [0.0, up.floor(), up.ceil(), -down.floor(), -down.ceil()]
        .into_iter()
        .map(log_ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let geom = Geometric::new(1.0 - (-1.0 / b).exp()).expect("valid geometric parameter");
    loop {
        let k = geom.sample(rng) as f64;
        let negative = rng.random::<bool>();
        if k == 0.0 && negative {
            continue;
        }
        let k = if negative { -k } else { k };
        if (k - delta).abs() > window {
            continue;
        }
        let log_accept = log_ratio(k) - log_envelope;
        if rng.random::<f64>() < log_accept.exp() {
            return (c0 + k) as i64;
        }
    }
}

/// Smoothing-parameter floor η_ε(Z^n) in the standard-deviation convention:
/// √(ln(2n(1 + 1/ε)) / π) / √(2π).
pub fn smoothing_floor(epsilon: f64, n: usize) -> f64 {
    let pi = std::f64::consts::PI;
    ((2.0 * n as f64 * (1.0 + 1.0 / epsilon)).ln() / pi).sqrt() / (2.0 * pi).sqrt()
}

/// Gaussian tail bound τ^n · e^{(n/2)(1 − τ²)} for τ > 1, and 1 otherwise.
pub fn tail_bound(n: usize, tau: f64) -> f64 {
    if tau <= 1.0 {
        return 1.0;
    }
    let n = n as f64;
    (n * tau.ln() + 0.5 * n * (1.0 - tau * tau)).exp()
}

/// An integer lattice basis (rows) with its Gram–Schmidt data.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBasis {
    rows: Vec<Vec<i64>>,
    gs_rows: Vec<Vec<f64>>,
    gs_norms: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl LatticeBasis {
    /// Orthogonalizes `rows` with modified Gram–Schmidt in row order.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(LatticeError::DegenerateBasis);
        }
        let mut gs_rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut norms_sq: Vec<f64> = Vec::with_capacity(n);
        for row in &rows {
            let mut v: Vec<f64> = row.iter().map(|&x| x as f64).collect();
            let scale = dot(&v, &v).sqrt();
            for (g, &nsq) in gs_rows.iter().zip(&norms_sq) {
                let mu = dot(&v, g) / nsq;
                v.iter_mut().zip(g).for_each(|(x, y)| *x -= mu * y);
            }
            let nsq = dot(&v, &v);
            if nsq <= (scale * 1e-10).powi(2) {
                return Err(LatticeError::DegenerateBasis);
            }
            gs_rows.push(v);
            norms_sq.push(nsq);
        }
        Ok(LatticeBasis {
            rows,
            gs_rows,
            gs_norms: norms_sq.into_iter().map(f64::sqrt).collect(),
        })
    }

    /// Lattice dimension.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Integer basis rows.
    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Gram–Schmidt vectors b̃_i.
    pub fn gs_rows(&self) -> &[Vec<f64>] {
        &self.gs_rows
    }

    /// Gram–Schmidt norms ‖b̃_i‖.
    pub fn gs_norms(&self) -> &[f64] {
        &self.gs_norms
    }

    /// ‖B‖_GS = max_i ‖b̃_i‖.
    pub fn max_gs_norm(&self) -> f64 {
        self.gs_norms.iter().copied().fold(0.0, f64::max)
    }

    /// Largest |⟨b̃_i, b̃_j⟩| / (‖b̃_i‖‖b̃_j‖) over i ≠ j.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst = 0f64;
        for i in 0..self.dim() {
            for j in 0..i {
                let r = dot(&self.gs_rows[i], &self.gs_rows[j]).abs()
                    / (self.gs_norms[i] * self.gs_norms[j]);
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Smallest width accepted by [`klein_sample`] at the given ε.
    pub fn klein_floor(&self, epsilon: f64) -> f64 {
        smoothing_floor(epsilon, self.dim()) * self.max_gs_norm()
    }
}

/// Klein's randomized nearest-plane sampler: returns a lattice point
/// distributed close to D_{Λ(B), s, center}.
///
/// The output is an exact integer combination of the basis rows.
pub fn klein_sample<R: Rng + ?Sized>(
    basis: &LatticeBasis,
    s: f64,
    center: &[f64],
    epsilon: f64,
    rng: &mut R,
) -> Result<Vec<i64>, LatticeError> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(LatticeError::InvalidWidth(s));
    }
    let n = basis.dim();
    if center.len() != n {
        return Err(LatticeError::DimensionMismatch {
            expected: n,
            got: center.len(),
        });
    }
    let floor = basis.klein_floor(epsilon);
    if s < floor {
        return Err(LatticeError::ParamTooSmall { s, floor });
    }
    let mut c = center.to_vec();
    let mut out = vec![0i64; n];
    for i in (0..n).rev() {
        let norm = basis.gs_norms[i];
        let ci = dot(&c, &basis.gs_rows[i]) / (norm * norm);
        let z = sample_z(s / norm, ci, rng);
        if z == 0 {
            continue;
        }
        for (k, &b) in basis.rows[i].iter().enumerate() {
            c[k] -= (z * b) as f64;
            out[k] += z * b;
        }
    }
    Ok(out)
}

/// Outcome of the parameter checks for a trapdoor sampler over R_q.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamReport {
    /// Lattice dimension n = 2M.
    pub dimension: usize,
    pub epsilon: f64,
    pub tau: f64,
    pub s: f64,
    /// η_ε(Z^n) closed form.
    pub smoothing_floor: f64,
    /// Upper bound smoothing_floor · α√q on η_ε(Λ) for a trapdoor of quality α.
    pub eta_bound: f64,
    /// s ≥ eta_bound, the width needed by the preimage sampler.
    pub sampler_width_ok: bool,
    /// ε < 1/3, the range where the min-entropy floor applies.
    pub min_entropy_applicable: bool,
    /// s ≥ 2·eta_bound.
    pub min_entropy_width_ok: bool,
    /// 2M − 1 bits when both conditions above hold.
    pub min_entropy_floor: Option<f64>,
    /// τ^n e^{(n/2)(1−τ²)}, or 1 when τ ≤ 1.
    pub tail_bound: f64,
    /// Set when τ ≤ 1 makes the tail bound trivial.
    pub tail_vacuous: bool,
    /// All checks that gate signing passed.
    pub passed: bool,
}

/// Evaluates the sampler width, min-entropy and tail-bound conditions.
pub fn validate_params(
    ring: RingParams,
    s: f64,
    epsilon: f64,
    tau: f64,
    alpha_quality: f64,
) -> ParamReport {
    let dimension = 2 * ring.degree();
    let floor = smoothing_floor(epsilon, dimension);
    let eta_bound = floor * alpha_quality * f64::from(ring.modulus()).sqrt();
    let epsilon_ok = epsilon > 0.0 && epsilon < 1.0;
    let sampler_width_ok = epsilon_ok && s >= eta_bound;
    let min_entropy_applicable = epsilon > 0.0 && epsilon < 1.0 / 3.0;
    let min_entropy_width_ok = s >= 2.0 * eta_bound;
    let min_entropy_floor = (min_entropy_applicable && min_entropy_width_ok)
        .then_some(dimension as f64 - 1.0);
    let tail_vacuous = tau <= 1.0;
    ParamReport {
        dimension,
        epsilon,
        tau,
        s,
        smoothing_floor: floor,
        eta_bound,
        sampler_width_ok,
        min_entropy_applicable,
        min_entropy_width_ok,
        min_entropy_floor,
        tail_bound: tail_bound(dimension, tau),
        tail_vacuous,
        passed: sampler_width_ok && !tail_vacuous,
    }
}
