//! Ring preimage sampleable function over NTRU lattices.
//!
//! For a ring of public keys h_1..h_N the function maps
//! d = (u_1, …, u_N, v) ∈ R_q^{N+1} to v + Σ h_i·u_i. Domain samples are
//! spherical discrete Gaussians of width s; preimages are sampled with the
//! signer's trapdoor on a lattice coset, so they are always exact.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::{
    klein_sample, sample_z, smoothing_floor, tail_bound, validate_params, LatticeError, ParamReport,
    DEFAULT_SMOOTHING_EPSILON,
};
use crate::ntru::{ntru_trapdoor_gen, NtruTrapdoor, TrapdoorError, DEFAULT_RETRY_BUDGET};
use crate::ring::{coeff_norm, poly_mul, Poly, RingError, RingParams};

/// Default trapdoor quality α in ‖B‖_GS ≤ α√q.
pub const DEFAULT_ALPHA_QUALITY: f64 = 1.17;

/// Errors from the function layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RpsfError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("ring has {size} keys, more than the maximum {kappa}")]
    RingTooLarge { size: usize, kappa: usize },
    #[error("signer's public key is not in the ring")]
    SignerNotInRing,
    #[error("domain element has {got} polynomials, expected {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Trapdoor(#[from] TrapdoorError),
}

/// User-facing configuration; unset fields take recommended values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RpsfConfig {
    pub m: usize,
    pub q: u32,
    pub kappa: usize,
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Gaussian width; defaults to [`recommended_width`].
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default = "default_alpha")]
    pub alpha_quality: f64,
    /// Key width; defaults to 1.17·√(q/2M).
    #[serde(default)]
    pub s_key: Option<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_budget")]
    pub retry_budget: usize,
}

fn default_tau() -> f64 {
    1.2
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA_QUALITY
}
fn default_epsilon() -> f64 {
    DEFAULT_SMOOTHING_EPSILON
}
fn default_budget() -> usize {
    DEFAULT_RETRY_BUDGET
}

impl RpsfConfig {
    /// Configuration with recommended defaults for the given ring and κ.
    pub fn new(m: usize, q: u32, kappa: usize) -> Self {
        RpsfConfig {
            m,
            q,
            kappa,
            tau: default_tau(),
            s: None,
            alpha_quality: default_alpha(),
            s_key: None,
            epsilon: default_epsilon(),
            retry_budget: default_budget(),
        }
    }
}

/// Validated public parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpsfParams {
    pub ring: RingParams,
    pub s: f64,
    pub kappa: usize,
    pub tau: f64,
    /// Domain norm bound τ·s·√((κ+1)M).
    pub beta: f64,
    pub alpha_quality: f64,
    pub s_key: f64,
    pub epsilon: f64,
    pub retry_budget: usize,
    /// Correctness loss δ(κ) = τ^{(κ+1)M}·e^{((κ+1)M/2)(1−τ²)}.
    pub delta_kappa: f64,
    /// log₂ of the range size C = q^M.
    pub range_size_log2: f64,
    pub report: ParamReport,
}

impl RpsfParams {
    /// Recomputes β from (τ, s, κ, M).
    pub fn compute_beta(&self) -> f64 {
        domain_bound(self.tau, self.s, self.kappa, self.ring.degree())
    }
}

/// β = τ·s·√((κ+1)M).
pub fn domain_bound(tau: f64, s: f64, kappa: usize, m: usize) -> f64 {
    tau * s * (((kappa + 1) * m) as f64).sqrt()
}

/// Smallest width for which preimage sampling is guaranteed to run with any
/// trapdoor of quality α: η_ε(Z^{2M})·α·√q.
pub fn recommended_width(ring: RingParams, alpha_quality: f64, epsilon: f64) -> f64 {
    smoothing_floor(epsilon, 2 * ring.degree()) * alpha_quality * f64::from(ring.modulus()).sqrt()
}

/// Validates a configuration and derives β, δ(κ) and the parameter report.
pub fn rpsf_setup(config: &RpsfConfig) -> Result<RpsfParams, RpsfError> {
    let invalid = |msg: &str| Err(RpsfError::InvalidConfig(msg.to_owned()));
    let ring = RingParams::new(config.m, config.q)
        .map_err(|e| RpsfError::InvalidConfig(e.to_string()))?;
    if config.kappa == 0 {
        return invalid("kappa must be at least 1");
    }
    if !(config.tau > 1.0 && config.tau.is_finite()) {
        return invalid("tau must exceed 1");
    }
    if !(config.alpha_quality > 0.0 && config.alpha_quality.is_finite()) {
        return invalid("alpha_quality must be positive");
    }
    if !(config.epsilon > 0.0 && config.epsilon < 1.0) {
        return invalid("epsilon must lie in (0, 1)");
    }
    let s = config
        .s
        .unwrap_or_else(|| recommended_width(ring, config.alpha_quality, config.epsilon));
    if !(s > 0.0 && s.is_finite()) {
        return invalid("s must be positive");
    }
    let s_key = config
        .s_key
        .unwrap_or_else(|| 1.17 * (f64::from(config.q) / (2.0 * config.m as f64)).sqrt());
    if !(s_key > 0.0 && s_key.is_finite()) {
        return invalid("s_key must be positive");
    }
    let report = validate_params(ring, s, config.epsilon, config.tau, config.alpha_quality);
    Ok(RpsfParams {
        ring,
        s,
        kappa: config.kappa,
        tau: config.tau,
        beta: domain_bound(config.tau, s, config.kappa, config.m),
        alpha_quality: config.alpha_quality,
        s_key,
        epsilon: config.epsilon,
        retry_budget: config.retry_budget,
        delta_kappa: tail_bound((config.kappa + 1) * config.m, config.tau),
        range_size_log2: config.m as f64 * f64::from(config.q).log2(),
        report,
    })
}

/// Public key h.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RpsfPublicKey {
    h: Poly,
}

impl RpsfPublicKey {
    /// Wraps a non-zero ring element.
    pub fn new(h: Poly) -> Result<Self, RpsfError> {
        if h.is_zero() {
            return Err(RpsfError::InvalidConfig("public key must be non-zero".into()));
        }
        Ok(RpsfPublicKey { h })
    }

    pub fn h(&self) -> &Poly {
        &self.h
    }

    /// Header-free canonical bytes (little-endian u16 coefficients).
    pub fn to_bytes(&self) -> Vec<u8> {
        self.h.to_bytes()
    }
}

/// Secret key: the trapdoor and a copy of its public key.
#[derive(Debug, Clone, PartialEq)]
pub struct RpsfSecretKey {
    trapdoor: NtruTrapdoor,
    public: RpsfPublicKey,
}

impl RpsfSecretKey {
    /// Wraps a trapdoor; the public key is its h.
    pub fn from_trapdoor(trapdoor: NtruTrapdoor) -> Result<Self, RpsfError> {
        let public = RpsfPublicKey::new(trapdoor.h().clone())?;
        Ok(RpsfSecretKey { trapdoor, public })
    }

    pub fn trapdoor(&self) -> &NtruTrapdoor {
        &self.trapdoor
    }

    /// μ(sk).
    pub fn public_key(&self) -> &RpsfPublicKey {
        &self.public
    }
}

/// A point (u_1, …, u_N, v) of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainElement {
    polys: Vec<Poly>,
}

impl DomainElement {
    /// Wraps N+1 polynomials sharing one parameter set.
    pub fn new(polys: Vec<Poly>) -> Result<Self, RpsfError> {
        if polys.len() < 2 {
            return Err(RpsfError::ShapeMismatch {
                expected: 2,
                got: polys.len(),
            });
        }
        if polys.iter().any(|p| p.params() != polys[0].params()) {
            return Err(RingError::ParamMismatch.into());
        }
        Ok(DomainElement { polys })
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    /// Euclidean norm of the centered coefficients.
    pub fn norm(&self) -> f64 {
        coeff_norm(&self.polys).expect("shared parameters")
    }

    /// ‖d‖ ≤ β.
    pub fn in_domain(&self, params: &RpsfParams) -> bool {
        self.polys[0].params() == params.ring && self.norm() <= params.beta
    }

    /// Count byte N+1 followed by the polynomial blocks.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![self.polys.len() as u8];
        for p in &self.polys {
            out.extend(p.to_bytes());
        }
        out
    }

    /// Parses [`DomainElement::to_bytes`] output; returns the remainder.
    pub fn from_bytes(ring: RingParams, bytes: &[u8]) -> Result<(Self, &[u8]), RpsfError> {
        let (&count, mut rest) = bytes.split_first().ok_or(RingError::Format)?;
        let mut polys = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let (p, r) = Poly::from_bytes(ring, rest)?;
            polys.push(p);
            rest = r;
        }
        Ok((DomainElement::new(polys)?, rest))
    }
}

/// Generates a key pair.
pub fn rpsf_keygen<R: Rng + ?Sized>(
    params: &RpsfParams,
    rng: &mut R,
) -> Result<(RpsfPublicKey, RpsfSecretKey), RpsfError> {
    let td = ntru_trapdoor_gen(
        params.ring,
        params.s_key,
        params.alpha_quality,
        params.retry_budget,
        rng,
    )?;
    let sk = RpsfSecretKey::from_trapdoor(td)?;
    Ok((sk.public.clone(), sk))
}

/// f_ρ(d) = v + Σ h_i·u_i.
pub fn rpsf_eval(ring: &[RpsfPublicKey], d: &DomainElement) -> Result<Poly, RpsfError> {
    if d.polys.len() != ring.len() + 1 {
        return Err(RpsfError::ShapeMismatch {
            expected: ring.len() + 1,
            got: d.polys.len(),
        });
    }
    let mut acc = d.polys[ring.len()].clone();
    for (pk, u) in ring.iter().zip(&d.polys) {
        acc = acc.add(&poly_mul(&pk.h, u)?)?;
    }
    Ok(acc)
}

fn gaussian_poly<R: Rng + ?Sized>(ring: RingParams, s: f64, rng: &mut R) -> Poly {
    let c: Vec<i64> = (0..ring.degree()).map(|_| sample_z(s, 0.0, rng)).collect();
    Poly::from_signed(ring, &c).expect("length M")
}

fn check_ring_size(ring: &[RpsfPublicKey], params: &RpsfParams) -> Result<(), RpsfError> {
    if ring.len() > params.kappa {
        return Err(RpsfError::RingTooLarge {
            size: ring.len(),
            kappa: params.kappa,
        });
    }
    if ring.is_empty() {
        return Err(RpsfError::ShapeMismatch {
            expected: 1,
            got: 0,
        });
    }
    if ring.iter().any(|pk| pk.h.params() != params.ring) {
        return Err(RingError::ParamMismatch.into());
    }
    Ok(())
}

/// Draws N+1 independent D_{R,s} polynomials. The result may fall outside
/// the domain norm bound.
pub fn rpsf_sample_dom<R: Rng + ?Sized>(
    ring: &[RpsfPublicKey],
    params: &RpsfParams,
    rng: &mut R,
) -> Result<DomainElement, RpsfError> {
    check_ring_size(ring, params)?;
    let polys = (0..=ring.len())
        .map(|_| gaussian_poly(params.ring, params.s, rng))
        .collect();
    Ok(DomainElement { polys })
}

/// Samples d with f_ρ(d) = target using the trapdoor of the ring member
/// matching `sk`.
///
/// Non-signer slots are fresh D_{R,s} draws. For the signer slot j the
/// remaining target c_j = target − Σ_{i≠j} h_i·u_i is hit by sampling a
/// lattice point w near −(0, c_j) and returning (0, c_j) + w.
pub fn rpsf_sample_pre<R: Rng + ?Sized>(
    ring: &[RpsfPublicKey],
    sk: &RpsfSecretKey,
    target: &Poly,
    params: &RpsfParams,
    rng: &mut R,
) -> Result<DomainElement, RpsfError> {
    check_ring_size(ring, params)?;
    if target.params() != params.ring || sk.trapdoor.params() != params.ring {
        return Err(RingError::ParamMismatch.into());
    }
    let j = ring
        .iter()
        .position(|pk| *pk == sk.public)
        .ok_or(RpsfError::SignerNotInRing)?;
    let mut polys: Vec<Poly> = Vec::with_capacity(ring.len() + 1);
    let mut c_j = target.clone();
    for (i, pk) in ring.iter().enumerate() {
        if i == j {
            polys.push(Poly::zero(params.ring));
            continue;
        }
        let u = gaussian_poly(params.ring, params.s, rng);
        c_j = c_j.sub(&poly_mul(&pk.h, &u)?)?;
        polys.push(u);
    }
    let (u_j, v) = coset_preimage(&sk.trapdoor, &c_j, params.s, params.epsilon, rng)?;
    polys[j] = u_j;
    polys.push(v);
    Ok(DomainElement { polys })
}

/// Short (u, v) with h·u + v = c, sampled as (0, c) + w for a lattice point
/// w near −(0, c).
pub fn coset_preimage<R: Rng + ?Sized>(
    trapdoor: &NtruTrapdoor,
    c: &Poly,
    s: f64,
    epsilon: f64,
    rng: &mut R,
) -> Result<(Poly, Poly), RpsfError> {
    let ring = trapdoor.params();
    let m = ring.degree();
    let c_lift = c.centered();
    let mut center = vec![0f64; 2 * m];
    for (k, &x) in c_lift.iter().enumerate() {
        center[m + k] = -(x as f64);
    }
    let w = klein_sample(trapdoor.basis(), s, &center, epsilon, rng)?;
    let u = Poly::from_signed(ring, &w[..m])?;
    let v_coeffs: Vec<i64> = c_lift.iter().zip(&w[m..]).map(|(a, b)| a + b).collect();
    let v = Poly::from_signed(ring, &v_coeffs)?;
    Ok((u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::hash_to_ring;
    use crate::stats::{ks_p_value, ks_statistic};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    use std::collections::HashMap;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    fn params(m: usize, q: u32, kappa: usize) -> RpsfParams {
        rpsf_setup(&RpsfConfig::new(m, q, kappa)).unwrap()
    }

    fn keys(p: &RpsfParams, n: usize, seed: u64) -> Vec<(RpsfPublicKey, RpsfSecretKey)> {
        let mut r = rng(seed);
        (0..n).map(|_| rpsf_keygen(p, &mut r).unwrap()).collect()
    }

    fn poly(m: usize, q: u32, c: &[u32]) -> Poly {
        Poly::from_coeffs(RingParams::new(m, q).unwrap(), c.to_vec()).unwrap()
    }

    #[test]
    fn setup_examples() {
        let mut cfg = RpsfConfig::new(64, 12289, 1);
        cfg.s = Some(10.0);
        let p = rpsf_setup(&cfg).unwrap();
        assert!((p.beta - 1.2 * 10.0 * 128f64.sqrt()).abs() < 1e-12);
        assert!((p.beta - 135.76).abs() < 0.01);
        assert_eq!(p.compute_beta(), p.beta);
        assert!(!p.report.sampler_width_ok);
        cfg.kappa = 0;
        assert!(matches!(rpsf_setup(&cfg), Err(RpsfError::InvalidConfig(_))));
        let mut cfg = RpsfConfig::new(64, 12289, 1);
        cfg.tau = 1.0;
        assert!(matches!(rpsf_setup(&cfg), Err(RpsfError::InvalidConfig(_))));
        let p = params(64, 12289, 1);
        assert!((p.delta_kappa / 8.1e-3 - 1.0).abs() < 0.01);
        assert!(p.report.passed);
    }

    #[test]
    fn keygen_examples() {
        let p = params(16, 12289, 2);
        let ks = keys(&p, 2, 1);
        for (pk, sk) in &ks {
            assert_eq!(pk, sk.public_key());
            assert_eq!(pk.h(), sk.trapdoor().h());
            assert!(!pk.h().is_zero());
        }
        assert_ne!(ks[0].0, ks[1].0);
    }

    #[test]
    fn eval_example() {
        let pk = RpsfPublicKey::new(poly(2, 17, &[2, 0])).unwrap();
        let d = DomainElement::new(vec![poly(2, 17, &[1, 0]), poly(2, 17, &[3, 0])]).unwrap();
        assert_eq!(rpsf_eval(std::slice::from_ref(&pk), &d).unwrap(), poly(2, 17, &[5, 0]));
        let zero = DomainElement::new(vec![poly(2, 17, &[0, 0]); 2]).unwrap();
        assert!(rpsf_eval(std::slice::from_ref(&pk), &zero).unwrap().is_zero());
        let short = DomainElement::new(vec![poly(2, 17, &[0, 0]); 2]).unwrap();
        assert!(matches!(
            rpsf_eval(&[pk.clone(), pk], &short),
            Err(RpsfError::ShapeMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn eval_is_linear(seed in any::<u64>(), n in 1usize..4) {
            let ring_p = RingParams::new(8, 97).unwrap();
            let mut r = rng(seed);
            let rand_poly = |r: &mut ChaCha20Rng| {
                Poly::from_coeffs(ring_p, (0..8).map(|_| r.random_range(0..97)).collect()).unwrap()
            };
            let ring: Vec<RpsfPublicKey> = (0..n).map(|_| RpsfPublicKey::new(rand_poly(&mut r)).unwrap_or_else(|_| RpsfPublicKey::new(Poly::one(ring_p)).unwrap())).collect();
            let d1 = DomainElement::new((0..=n).map(|_| rand_poly(&mut r)).collect()).unwrap();
            let d2 = DomainElement::new((0..=n).map(|_| rand_poly(&mut r)).collect()).unwrap();
            let sum = DomainElement::new(d1.polys().iter().zip(d2.polys()).map(|(a, b)| a.add(b).unwrap()).collect()).unwrap();
            let lhs = rpsf_eval(&ring, &sum).unwrap();
            let rhs = rpsf_eval(&ring, &d1).unwrap().add(&rpsf_eval(&ring, &d2).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn sample_dom_shape_and_tail() {
        let p = params(64, 12289, 1);
        let ks = keys(&p, 1, 2);
        let ring = vec![ks[0].0.clone()];
        let mut r = rng(3);
        let n = 10_000;
        let mut outside = 0;
        for _ in 0..n {
            let d = rpsf_sample_dom(&ring, &p, &mut r).unwrap();
            assert_eq!(d.polys().len(), 2);
            if !d.in_domain(&p) {
                outside += 1;
            }
        }
        let limit = p.delta_kappa * n as f64 + 3.0 * (n as f64 * p.delta_kappa).sqrt();
        assert!((outside as f64) <= limit, "{outside} > {limit}");
        let too_big = vec![ks[0].0.clone(); 2];
        assert!(matches!(rpsf_sample_dom(&too_big, &p, &mut r), Err(RpsfError::RingTooLarge { .. })));
    }

    #[test]
    fn sample_dom_image_is_uniform() {
        let mut cfg = RpsfConfig::new(4, 17, 1);
        cfg.s = Some(20.0);
        let p = rpsf_setup(&cfg).unwrap();
        let pk = RpsfPublicKey::new(poly(4, 17, &[3, 1, 4, 1])).unwrap();
        let mut r = rng(4);
        let n = 20_000u64;
        let mut counts = [[0u64; 17]; 4];
        for _ in 0..n {
            let d = rpsf_sample_dom(std::slice::from_ref(&pk), &p, &mut r).unwrap();
            let y = rpsf_eval(std::slice::from_ref(&pk), &d).unwrap();
            for (k, &c) in y.coeffs().iter().enumerate() {
                counts[k][c as usize] += 1;
            }
        }
        let chi = ChiSquared::new(16.0).unwrap();
        let e = n as f64 / 17.0;
        for row in counts {
            let stat: f64 = row.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
            assert!(chi.sf(stat) > 0.001);
        }
    }

    #[test]
    fn sample_pre_is_exact() {
        let p = params(16, 12289, 3);
        let ks = keys(&p, 3, 5);
        let mut r = rng(6);
        for trial in 0..1000usize {
            let n = 1 + trial % 3;
            let ring: Vec<RpsfPublicKey> = ks[..n].iter().map(|k| k.0.clone()).collect();
            let signer = &ks[trial % n].1;
            let target = hash_to_ring(b"test", &trial.to_le_bytes(), p.ring);
            let d = rpsf_sample_pre(&ring, signer, &target, &p, &mut r).unwrap();
            assert_eq!(rpsf_eval(&ring, &d).unwrap(), target);
        }
        let outsider = &keys(&p, 1, 99)[0].1;
        let ring = vec![ks[0].0.clone()];
        let target = Poly::zero(p.ring);
        assert_eq!(
            rpsf_sample_pre(&ring, outsider, &target, &p, &mut r),
            Err(RpsfError::SignerNotInRing)
        );
    }

    #[test]
    fn single_key_reduces_to_coset_preimage() {
        let p = params(16, 12289, 1);
        let (pk, sk) = keys(&p, 1, 7).remove(0);
        let target = hash_to_ring(b"test", b"single", p.ring);
        let d = rpsf_sample_pre(std::slice::from_ref(&pk), &sk, &target, &p, &mut rng(8)).unwrap();
        let (u, v) = coset_preimage(sk.trapdoor(), &target, p.s, p.epsilon, &mut rng(8)).unwrap();
        assert_eq!(d.polys(), &[u.clone(), v.clone()]);
        assert_eq!(poly_mul(pk.h(), &u).unwrap().add(&v).unwrap(), target);
    }

    #[test]
    fn preimage_norm_within_beta() {
        let p = params(64, 12289, 1);
        let (pk, sk) = keys(&p, 1, 9).remove(0);
        let mut r = rng(10);
        let n = 10_000;
        let mut outside = 0;
        for i in 0..n {
            let target = hash_to_ring(b"norm", &(i as u64).to_le_bytes(), p.ring);
            let d = rpsf_sample_pre(std::slice::from_ref(&pk), &sk, &target, &p, &mut r).unwrap();
            if !d.in_domain(&p) {
                outside += 1;
            }
        }
        let limit = p.delta_kappa * n as f64 + 3.0 * (n as f64 * p.delta_kappa).sqrt();
        assert!((outside as f64) <= limit);
    }

    #[test]
    fn signer_position_does_not_shift_norms() {
        let p = params(64, 12289, 2);
        let ks = keys(&p, 2, 11);
        let ring: Vec<RpsfPublicKey> = ks.iter().map(|k| k.0.clone()).collect();
        let mut r = rng(12);
        let n = 10_000;
        let mut norms = [[Vec::new(), Vec::new()], [Vec::new(), Vec::new()]];
        for (signer, slot) in norms.iter_mut().enumerate() {
            for i in 0..n {
                let target = hash_to_ring(b"sym", &(i as u64).to_le_bytes(), p.ring);
                let d = rpsf_sample_pre(&ring, &ks[signer].1, &target, &p, &mut r).unwrap();
                for k in 0..2 {
                    slot[k].push(coeff_norm(&d.polys()[k..k + 1]).unwrap());
                }
            }
        }
        for k in 0..2 {
            let d = ks_statistic(&norms[0][k], &norms[1][k]);
            assert!(ks_p_value(d, n, n) > 0.001, "coordinate {k}: D = {d}");
        }
    }

    #[test]
    fn collisions_at_birthday_rate() {
        let mut cfg = RpsfConfig::new(2, 17, 1);
        cfg.s = Some(20.0);
        let p = rpsf_setup(&cfg).unwrap();
        let pk = RpsfPublicKey::new(poly(2, 17, &[5, 11])).unwrap();
        let mut r = rng(13);
        let n = 10_000u64;
        let mut images: HashMap<Vec<u8>, u64> = HashMap::new();
        let mut inputs: HashMap<Vec<u8>, u64> = HashMap::new();
        for _ in 0..n {
            let d = rpsf_sample_dom(std::slice::from_ref(&pk), &p, &mut r).unwrap();
            *inputs.entry(d.to_bytes()).or_insert(0) += 1;
            let y = rpsf_eval(std::slice::from_ref(&pk), &d).unwrap();
            *images.entry(y.to_bytes()).or_insert(0) += 1;
        }
        let pairs = |m: &HashMap<_, u64>| m.values().map(|&c| c * (c - 1) / 2).sum::<u64>();
        let collisions = pairs(&images) - pairs(&inputs);
        let expected = (n * (n - 1) / 2) as f64 / 289.0;
        assert!((collisions as f64 / expected - 1.0).abs() < 0.05, "{collisions} vs {expected}");
    }

    #[test]
    fn domain_element_round_trip() {
        let p = params(8, 97, 2);
        let ks = keys(&p, 2, 14);
        let ring: Vec<RpsfPublicKey> = ks.iter().map(|k| k.0.clone()).collect();
        let d = rpsf_sample_dom(&ring, &p, &mut rng(15)).unwrap();
        let bytes = d.to_bytes();
        assert_eq!(bytes[0], 3);
        let (back, rest) = DomainElement::from_bytes(p.ring, &bytes).unwrap();
        assert!(rest.is_empty());
        assert_eq!(back, d);
        assert!(DomainElement::from_bytes(p.ring, &bytes[..5]).is_err());
    }
}
