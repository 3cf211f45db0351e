//! Concrete-security calculator. Every bound is a pure function of
//! [`BoundParams`]; reports carry the sub-terms next to the totals so the
//! dominating contribution is visible.
//!
//! Rényi-form bounds take the Hölder exponent (α−1)/α from [`RenyiOrder`],
//! which is exactly 1 at α = ∞. Range sizes that overflow `f64` (such as
//! q^M) are handled in log₂ form.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::RenyiOrder;
use crate::gaussian::tail_bound;
use crate::rpsf::RpsfParams;

/// Errors from parameter handling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("unknown theorem {0:?}")]
    UnknownTheorem(String),
    #[error("unknown or non-numeric parameter {0:?}")]
    UnknownParam(String),
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

/// Every symbol used by the bounds. Unset fields default to the neutral
/// value: zero counts, advantages and distances, unit Rényi divergences,
/// infinite orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundParams {
    /// Signing queries q_s.
    pub q_s: f64,
    /// Hash queries q_H; also the query count q for single-oracle bounds.
    pub q_h: f64,
    /// Challenge queries q_c.
    pub q_c: f64,
    /// Ring size N.
    pub n: f64,
    /// Maximal ring size κ.
    pub kappa: f64,
    /// Salt bits k.
    pub k: f64,
    /// Hash range size |𝒴|.
    pub y_size: f64,
    /// Challenge space size |𝒞|.
    pub challenge_space: f64,
    /// Number of commitments ℓ.
    pub ell: f64,
    /// Largest challenge set size ω.
    pub omega: f64,
    /// Largest preimage class of the challenge map γ_cl.
    pub gamma_cl: f64,
    /// sz_triv of the extraction family.
    pub sz_triv: f64,
    /// log₂ C, the minimal range size of an honest ring.
    pub range_size_log2: f64,
    /// Rényi orders α₁ (domain), α₂ (preimage) and α (single-order bounds).
    pub alpha1: RenyiOrder,
    pub alpha2: RenyiOrder,
    pub alpha: RenyiOrder,
    pub eps_dom: f64,
    pub delta_dom: f64,
    pub eps_pre: f64,
    pub delta_pre: f64,
    pub eps_kl_pre: f64,
    pub eps_hvzk: f64,
    pub delta_hvzk: f64,
    pub eps_kl_hvzk: f64,
    pub adv_col: f64,
    pub adv_ow: f64,
    pub adv_cur: f64,
    pub adv_wrec: f64,
    pub adv_imp: f64,
    pub adv_ufnra: f64,
    pub adv_ntru_sis: f64,
    pub adv_ntru_isis: f64,
    /// Min-entropy β(λ) in bits.
    pub min_entropy: f64,
    /// Correctness loss δ(κ).
    pub delta_kappa: f64,
    /// Ring degree M and modulus q.
    pub m: f64,
    pub q: f64,
    /// Gaussian width and tail factor.
    pub s: f64,
    pub tau: f64,
    /// Smoothing parameter ε.
    pub smoothing_eps: f64,
    /// Statistical distance ε between two oracle output distributions.
    pub eps_stat: f64,
    /// Small-range size r and the divergence R_α(P‖Q) it switches under.
    pub r_small_range: f64,
    pub delta_sr: f64,
    /// Winning probability against the Q-oracle.
    pub p_win: f64,
    /// Reprogramming count R and max input probability p_max.
    pub repro_count: f64,
    pub p_max: f64,
    /// Δ(Q, U(𝒴)) and R_α(U(𝒴)‖Q) of the reprogramming distribution.
    pub delta_qu: f64,
    pub renyi_uq: f64,
    /// Winning probability in the distribution-switched reprogramming game.
    pub p_repro1: f64,
    /// Number of measured stages n.
    pub stages: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            q_s: 0.0,
            q_h: 0.0,
            q_c: 0.0,
            n: 1.0,
            kappa: 1.0,
            k: 0.0,
            y_size: 2f64.powi(256),
            challenge_space: 1.0,
            ell: 1.0,
            omega: 1.0,
            gamma_cl: 1.0,
            sz_triv: 0.0,
            range_size_log2: 0.0,
            alpha1: RenyiOrder::Infinity,
            alpha2: RenyiOrder::Infinity,
            alpha: RenyiOrder::Infinity,
            eps_dom: 0.0,
            delta_dom: 1.0,
            eps_pre: 0.0,
            delta_pre: 1.0,
            eps_kl_pre: 0.0,
            eps_hvzk: 0.0,
            delta_hvzk: 1.0,
            eps_kl_hvzk: 0.0,
            adv_col: 0.0,
            adv_ow: 0.0,
            adv_cur: 0.0,
            adv_wrec: 0.0,
            adv_imp: 0.0,
            adv_ufnra: 0.0,
            adv_ntru_sis: 0.0,
            adv_ntru_isis: 0.0,
            min_entropy: 0.0,
            delta_kappa: 0.0,
            m: 64.0,
            q: 12289.0,
            s: 0.0,
            tau: 1.2,
            smoothing_eps: 0.0,
            eps_stat: 0.0,
            r_small_range: 1.0,
            delta_sr: 1.0,
            p_win: 0.0,
            repro_count: 0.0,
            p_max: 0.0,
            delta_qu: 0.0,
            renyi_uq: 1.0,
            p_repro1: 0.0,
            stages: 0.0,
        }
    }
}

impl BoundParams {
    /// Checks the documented ranges: counts ≥ 0, probabilities and
    /// advantages in [0, 1], Rényi divergences ≥ 1.
    pub fn validate(&self) -> Result<(), BoundsError> {
        let counts = [
            ("q_s", self.q_s),
            ("q_h", self.q_h),
            ("q_c", self.q_c),
            ("n", self.n),
            ("kappa", self.kappa),
            ("k", self.k),
            ("ell", self.ell),
            ("omega", self.omega),
            ("sz_triv", self.sz_triv),
            ("min_entropy", self.min_entropy),
            ("repro_count", self.repro_count),
            ("stages", self.stages),
            ("m", self.m),
            ("s", self.s),
        ];
        for (name, v) in counts {
            if v.is_nan() || v < 0.0 {
                return Err(BoundsError::Invalid(format!("{name} = {v} must be ≥ 0")));
            }
        }
        let positive = [
            ("y_size", self.y_size),
            ("challenge_space", self.challenge_space),
            ("gamma_cl", self.gamma_cl),
            ("r_small_range", self.r_small_range),
            ("q", self.q),
        ];
        for (name, v) in positive {
            if v.is_nan() || v <= 0.0 {
                return Err(BoundsError::Invalid(format!("{name} = {v} must be > 0")));
            }
        }
        let probs = [
            ("eps_dom", self.eps_dom),
            ("eps_pre", self.eps_pre),
            ("eps_hvzk", self.eps_hvzk),
            ("adv_col", self.adv_col),
            ("adv_ow", self.adv_ow),
            ("adv_cur", self.adv_cur),
            ("adv_wrec", self.adv_wrec),
            ("adv_imp", self.adv_imp),
            ("adv_ufnra", self.adv_ufnra),
            ("adv_ntru_sis", self.adv_ntru_sis),
            ("adv_ntru_isis", self.adv_ntru_isis),
            ("delta_kappa", self.delta_kappa),
            ("eps_stat", self.eps_stat),
            ("p_win", self.p_win),
            ("p_max", self.p_max),
            ("delta_qu", self.delta_qu),
            ("p_repro1", self.p_repro1),
            ("smoothing_eps", self.smoothing_eps),
        ];
        for (name, v) in probs {
            if !(0.0..=1.0).contains(&v) {
                return Err(BoundsError::Invalid(format!("{name} = {v} outside [0, 1]")));
            }
        }
        for (name, v) in [("eps_kl_pre", self.eps_kl_pre), ("eps_kl_hvzk", self.eps_kl_hvzk)] {
            if v.is_nan() || v < 0.0 {
                return Err(BoundsError::Invalid(format!("{name} = {v} must be ≥ 0")));
            }
        }
        let divs = [
            ("delta_dom", self.delta_dom),
            ("delta_pre", self.delta_pre),
            ("delta_hvzk", self.delta_hvzk),
            ("delta_sr", self.delta_sr),
            ("renyi_uq", self.renyi_uq),
        ];
        for (name, v) in divs {
            if v.is_nan() || v < 1.0 {
                return Err(BoundsError::Invalid(format!("{name} = {v} must be ≥ 1")));
            }
        }
        Ok(())
    }

    /// Fills the lattice fields from a parameter set: M, q, s, τ, κ, δ(κ),
    /// log₂ q^M, and the divergence constants implied by the smoothing ε at
    /// order `alpha` (α₁ = α₂ = α).
    pub fn with_rpsf(mut self, params: &RpsfParams, alpha: f64) -> Self {
        let (dom, kl, pre) = rpsf_divergence_constants(params.epsilon, alpha);
        self.m = params.ring.degree() as f64;
        self.q = f64::from(params.ring.modulus());
        self.s = params.s;
        self.tau = params.tau;
        self.kappa = params.kappa as f64;
        self.delta_kappa = params.delta_kappa;
        self.range_size_log2 = params.range_size_log2;
        self.smoothing_eps = params.epsilon;
        self.delta_dom = dom;
        self.delta_pre = pre;
        self.eps_kl_pre = kl;
        self.alpha = RenyiOrder::Finite(alpha);
        self.alpha1 = RenyiOrder::Finite(alpha);
        self.alpha2 = RenyiOrder::Finite(alpha);
        self
    }

    /// Sets a numeric field by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), BoundsError> {
        let mut v = serde_json::to_value(&*self).expect("serializable");
        let slot = v
            .get_mut(name)
            .filter(|s| s.is_number())
            .ok_or_else(|| BoundsError::UnknownParam(name.to_string()))?;
        *slot = serde_json::json!(value);
        *self = serde_json::from_value(v).map_err(|e| BoundsError::Invalid(e.to_string()))?;
        Ok(())
    }
}

/// Named bound values plus the sub-terms composing them. Values that
/// overflow `f64` are infinite and serialize as JSON `null`; the
/// measure-and-reprogram reports carry a finite log₂ term alongside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem: String,
    pub terms: IndexMap<String, f64>,
    pub bounds: IndexMap<String, f64>,
}

impl BoundReport {
    fn new(theorem: Theorem) -> Self {
        BoundReport {
            theorem: theorem.to_string(),
            terms: IndexMap::new(),
            bounds: IndexMap::new(),
        }
    }

    fn term(mut self, name: &str, v: f64) -> Self {
        self.terms.insert(name.to_string(), v);
        self
    }

    fn bound(mut self, name: &str, v: f64) -> Self {
        self.bounds.insert(name.to_string(), v);
        self
    }

    /// Bounds capped at 1 for display; the raw values stay in `bounds`.
    pub fn clamped(&self) -> IndexMap<String, f64> {
        self.bounds.iter().map(|(k, &v)| (k.clone(), v.min(1.0))).collect()
    }
}

/// Selector for [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    Osw,
    Sr,
    Repro,
    Mandr,
    Qcol,
    Thm7,
    Thm8,
    Anon,
    Thm10,
    Thm11,
    Thm13,
    Thm17,
    Gandalf,
}

impl Theorem {
    pub const ALL: [Theorem; 13] = [
        Theorem::Osw,
        Theorem::Sr,
        Theorem::Repro,
        Theorem::Mandr,
        Theorem::Qcol,
        Theorem::Thm7,
        Theorem::Thm8,
        Theorem::Anon,
        Theorem::Thm10,
        Theorem::Thm11,
        Theorem::Thm13,
        Theorem::Thm17,
        Theorem::Gandalf,
    ];
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Theorem::Osw => "osw",
            Theorem::Sr => "sr",
            Theorem::Repro => "repro",
            Theorem::Mandr => "mandr",
            Theorem::Qcol => "qcol",
            Theorem::Thm7 => "thm7",
            Theorem::Thm8 => "thm8",
            Theorem::Anon => "anon",
            Theorem::Thm10 => "thm10",
            Theorem::Thm11 => "thm11",
            Theorem::Thm13 => "thm13",
            Theorem::Thm17 => "thm17",
            Theorem::Gandalf => "gandalf",
        };
        f.write_str(s)
    }
}

impl FromStr for Theorem {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| BoundsError::UnknownTheorem(s.to_string()))
    }
}

/// Oracle distribution switching: 8q√(2ε).
pub fn osw_statistical_bound(q: f64, eps: f64) -> f64 {
    8.0 * q * (2.0 * eps).sqrt()
}

/// ℓ(q) = π²(2q)³/6.
pub fn small_range_ell(q: f64) -> f64 {
    PI * PI * (2.0 * q).powi(3) / 6.0
}

/// (δ^r(p + ℓ(q)/r))^{(α−1)/α} + ℓ(q)/r.
pub fn small_range_bound(q: f64, r: f64, alpha: RenyiOrder, delta: f64, p_win_q: f64) -> f64 {
    let l = small_range_ell(q) / r;
    (delta.powf(r) * (p_win_q + l)).powf(alpha.holder_exponent()) + l
}

/// δ_repr = (3R/2)√(q·p_max).
pub fn adaptive_repro_delta(r: f64, q: f64, p_max: f64) -> f64 {
    1.5 * r * (q * p_max).sqrt()
}

/// Statistical form: R·Δ(Q, U) + δ_repr.
pub fn adaptive_repro_switch(r: f64, q: f64, p_max: f64, delta_qu: f64) -> f64 {
    r * delta_qu + adaptive_repro_delta(r, q, p_max)
}

/// Rényi form: (R_α(U‖Q)^R · p₁)^{(α−1)/α} + δ_repr.
pub fn adaptive_repro_switch_renyi(
    r: f64,
    q: f64,
    p_max: f64,
    renyi_uq: f64,
    alpha: RenyiOrder,
    p_repro1: f64,
) -> f64 {
    (renyi_uq.powf(r) * p_repro1).powf(alpha.holder_exponent()) + adaptive_repro_delta(r, q, p_max)
}

/// Measure-and-reprogram loss (2q+1)^{2n}.
pub fn mandr_factor(q: f64, n: f64) -> f64 {
    (2.0 * q + 1.0).powf(2.0 * n)
}

/// ½(2(q_H+N)+1)^{2N}·Adv_IMP.
pub fn thm11_bound(q_h: f64, n: f64, adv_imp: f64) -> f64 {
    if adv_imp == 0.0 {
        return 0.0;
    }
    0.5 * mandr_factor(q_h + n, n) * adv_imp
}

/// 10q²(q−1)γ_cl/|𝒴|.
pub fn qrom_collision_bound(q: f64, gamma_cl: f64, y_size: f64) -> f64 {
    10.0 * q * q * (q - 1.0).max(0.0) * gamma_cl / y_size
}

/// (q_c·ε_pre, √(q_c·ε_KL/2)).
pub fn anon_bounds(q_c: f64, eps_pre: f64, eps_kl: f64) -> (f64, f64) {
    (q_c * eps_pre, (q_c * eps_kl / 2.0).sqrt())
}

/// 20x³/2^{log2_c}, evaluated in log domain.
fn cubic_over_range(x: f64, range_log2: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    (20f64.ln() + 3.0 * x.ln() - range_log2 * std::f64::consts::LN_2).exp()
}

/// δ^e without the 0·∞ trap when e = 0.
fn pow_div(delta: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        delta.powf(e)
    }
}

/// Four salted hash-and-sign bounds: full Rényi, Rényi in the preimage
/// step, Rényi in the domain step, and fully statistical.
pub fn thm7_bounds(p: &BoundParams) -> BoundReport {
    let total = p.q_s + p.q_h + 1.0;
    let reprogram = 1.5 * p.q_s * (total * 2f64.powf(-p.k)).sqrt();
    let eps_prime = reprogram + p.q_s * p.delta_kappa;
    let collision = cubic_over_range(total, p.range_size_log2);
    let eps = p.adv_col + collision + total * total * p.adv_ow;
    let e1 = p.alpha1.holder_exponent();
    let e2 = p.alpha2.holder_exponent();
    let dom = pow_div(p.delta_dom, p.q_s);
    let pre = pow_div(p.delta_pre, p.q_s);
    let b1 = (dom * (pre * eps).powf(e2)).powf(e1) + eps_prime;
    let b2 = p.q_s * (pre * eps).powf(e2) + p.q_s * p.eps_dom + eps_prime;
    let b3 = (dom * (eps + p.q_s * p.eps_pre).powf(e2)).powf(e1) + eps_prime;
    let b4 = p.q_s * (p.eps_dom + p.eps_pre) + eps + eps_prime;
    BoundReport::new(Theorem::Thm7)
        .term("reprogramming", reprogram)
        .term("correctness_loss", p.q_s * p.delta_kappa)
        .term("eps_prime", eps_prime)
        .term("collision", collision)
        .term("one_wayness", total * total * p.adv_ow)
        .term("eps", eps)
        .bound("full_renyi", b1)
        .bound("renyi_pre_alpha2", b2)
        .bound("renyi_dom_alpha2", b3)
        .bound("statistical", b4)
}

/// Unsalted hash-and-sign: statistical and Rényi forms.
pub fn thm8_bounds(p: &BoundParams) -> BoundReport {
    let eps = 8.0 * (p.q_s + p.q_h) * (2.0 * p.eps_dom).sqrt();
    let extract = 2f64.powf(-p.min_entropy);
    let tv = eps + p.q_s * p.eps_pre + extract + p.adv_col;
    let renyi = eps + (pow_div(p.delta_pre, p.q_s) * (extract + p.adv_col)).powf(p.alpha.holder_exponent());
    BoundReport::new(Theorem::Thm8)
        .term("eps", eps)
        .term("extractor_failure", extract)
        .bound("statistical", tv)
        .bound("renyi", renyi)
}

/// Circular Fiat–Shamir: unforgeability (statistical, Rényi) and
/// anonymity (statistical, KL).
pub fn thm10_bounds(p: &BoundParams) -> BoundReport {
    let entropy = 2f64.powf(-p.min_entropy);
    let eps_repr = 1.5 * p.q_s * ((p.q_h + p.kappa * p.q_s + p.n) * entropy).sqrt();
    let total = p.q_h + p.n * p.q_s + p.n;
    let collision = 20.0 * total.powi(3) / p.challenge_space;
    let eps_repr1 = p.n * (p.adv_cur + p.adv_wrec) + collision;
    let eps_repr2 = 1.5 * p.q_c * ((p.q_h + p.kappa * p.q_c) * entropy).sqrt();
    let unf_tv = p.adv_ufnra + p.q_s * p.eps_hvzk + eps_repr + eps_repr1;
    let unf_renyi = (pow_div(p.delta_hvzk, p.q_s) * p.adv_ufnra).powf(p.alpha.holder_exponent())
        + eps_repr
        + eps_repr1;
    let den_tv = p.q_c * p.eps_hvzk + eps_repr2;
    let den_kl = (p.q_c * p.eps_kl_hvzk / 2.0).sqrt() + eps_repr2;
    BoundReport::new(Theorem::Thm10)
        .term("eps_repr", eps_repr)
        .term("eps_repr_prime", eps_repr1)
        .term("eps_repr_double_prime", eps_repr2)
        .term("challenge_collision", collision)
        .bound("unf_statistical", unf_tv)
        .bound("unf_renyi", unf_renyi)
        .bound("den_statistical", den_tv)
        .bound("den_kl", den_kl)
}

fn extraction_bound(p: &BoundParams, theorem: Theorem) -> BoundReport {
    let merkle = theorem == Theorem::Thm17;
    let wrec = p.n * p.adv_wrec;
    let opening = if merkle {
        2.0 * p.n * (p.omega * p.ell.log2() + 1.0) / p.y_size
    } else {
        2.0 * p.n * (p.omega + 1.0) / p.y_size
    };
    let qm1 = (p.q_h - 1.0).max(0.0);
    let targets = p.gamma_cl * p.sz_triv.powf(p.n);
    let alt = if merkle { 2.0 * qm1 } else { qm1 * p.ell };
    let inner = (qm1 * p.gamma_cl).sqrt() + alt.max(targets).sqrt();
    let search = p.q_h * p.q_h * 10.0 / p.y_size * inner * inner;
    let factor = if merkle { 20.0 } else { 10.0 * p.ell };
    let spread = 1.0 + 2.0 * p.sz_triv.powf(p.n / 2.0) + p.sz_triv.powf(p.n);
    let search_expanded = p.q_h * p.q_h * qm1 * factor * p.gamma_cl / p.y_size * spread;
    BoundReport::new(theorem)
        .term("witness_recovery", wrec)
        .term("opening", opening)
        .term("search", search)
        .term("search_expanded", search_expanded)
        .bound("exact", wrec + opening + search)
        .bound("expanded", wrec + opening + search_expanded)
}

/// No-query unforgeability of circular commit-and-open signatures.
pub fn thm13_bound(p: &BoundParams) -> BoundReport {
    extraction_bound(p, Theorem::Thm13)
}

/// The Merkle-tree commitment variant; log ℓ is taken base 2.
pub fn thm17_bound(p: &BoundParams) -> BoundReport {
    extraction_bound(p, Theorem::Thm17)
}

/// δ(κ) = τ^{(κ+1)M}·e^{((κ+1)M/2)(1−τ²)}.
pub fn delta_kappa(tau: f64, kappa: f64, m: f64) -> f64 {
    tail_bound(((kappa + 1.0) * m) as usize, tau)
}

/// The composed NTRU-instantiated bound with range size q^M and the δ(κ)
/// correctness term computed from (τ, κ, M).
pub fn gandalf_bound(p: &BoundParams) -> BoundReport {
    let total = p.q_s + p.q_h + 1.0;
    let range_log2 = p.m * p.q.log2();
    let dk = delta_kappa(p.tau, p.kappa, p.m);
    let collision = cubic_over_range(total, range_log2);
    let eps_prime = p.adv_ntru_sis + collision + total * total * p.adv_ntru_isis + p.q_s * dk;
    let renyi = (pow_div(p.delta_dom, p.q_s)
        * (pow_div(p.delta_pre, p.q_s) * eps_prime).powf(p.alpha2.holder_exponent()))
    .powf(p.alpha1.holder_exponent());
    let reprogram = 1.5 * p.q_s * (total / 2f64.powf(p.k)).sqrt();
    BoundReport::new(Theorem::Gandalf)
        .term("delta_kappa", dk)
        .term("range_size_log2", range_log2)
        .term("collision", collision)
        .term("one_wayness", total * total * p.adv_ntru_isis)
        .term("correctness_loss", p.q_s * dk)
        .term("eps_prime", eps_prime)
        .term("reprogramming", reprogram)
        .bound("suf_cra", renyi + reprogram)
}

/// Domain and preimage divergence constants implied by smoothing
/// parameter ε at finite order α: (R_α dom, ε_KL pre, R_α pre) with
/// R_α dom ≈ 1 + 2αε²/(1−ε)², ε_KL ≈ 2ε², R_α pre ≈ 1 + 2αε².
pub fn rpsf_divergence_constants(eps: f64, alpha: f64) -> (f64, f64, f64) {
    let e2 = eps * eps;
    (
        1.0 + 2.0 * alpha * e2 / ((1.0 - eps) * (1.0 - eps)),
        2.0 * e2,
        1.0 + 2.0 * alpha * e2,
    )
}

/// Evaluates one theorem.
pub fn evaluate(theorem: Theorem, p: &BoundParams) -> Result<BoundReport, BoundsError> {
    p.validate()?;
    Ok(match theorem {
        Theorem::Osw => BoundReport::new(theorem).bound("statistical", osw_statistical_bound(p.q_h, p.eps_stat)),
        Theorem::Sr => BoundReport::new(theorem)
            .term("ell_q", small_range_ell(p.q_h))
            .term("ell_q_over_r", small_range_ell(p.q_h) / p.r_small_range)
            .bound(
                "renyi",
                small_range_bound(p.q_h, p.r_small_range, p.alpha, p.delta_sr, p.p_win),
            ),
        Theorem::Repro => BoundReport::new(theorem)
            .term("delta_repr", adaptive_repro_delta(p.repro_count, p.q_h, p.p_max))
            .bound(
                "statistical",
                adaptive_repro_switch(p.repro_count, p.q_h, p.p_max, p.delta_qu),
            )
            .bound(
                "renyi",
                adaptive_repro_switch_renyi(p.repro_count, p.q_h, p.p_max, p.renyi_uq, p.alpha, p.p_repro1),
            ),
        Theorem::Mandr => BoundReport::new(theorem)
            .term("log2_factor", 2.0 * p.stages * (2.0 * p.q_h + 1.0).log2())
            .bound("factor", mandr_factor(p.q_h, p.stages)),
        Theorem::Qcol => {
            BoundReport::new(theorem).bound("collision", qrom_collision_bound(p.q_h, p.gamma_cl, p.y_size))
        }
        Theorem::Thm7 => thm7_bounds(p),
        Theorem::Thm8 => thm8_bounds(p),
        Theorem::Anon => {
            let (tv, kl) = anon_bounds(p.q_c, p.eps_pre, p.eps_kl_pre);
            BoundReport::new(theorem).bound("statistical", tv).bound("kl", kl)
        }
        Theorem::Thm10 => thm10_bounds(p),
        Theorem::Thm11 => BoundReport::new(theorem)
            .term("mandr_factor", mandr_factor(p.q_h + p.n, p.n))
            .term("log2_mandr_factor", 2.0 * p.n * (2.0 * (p.q_h + p.n) + 1.0).log2())
            .bound("ufnra", thm11_bound(p.q_h, p.n, p.adv_imp)),
        Theorem::Thm13 => thm13_bound(p),
        Theorem::Thm17 => thm17_bound(p),
        Theorem::Gandalf => gandalf_bound(p),
    })
}

/// Evaluates `theorem` while `param` takes each of `values`.
pub fn sweep(
    theorem: Theorem,
    base: &BoundParams,
    param: &str,
    values: &[f64],
) -> Result<Vec<(f64, BoundReport)>, BoundsError> {
    values
        .iter()
        .map(|&v| {
            let mut p = base.clone();
            p.set(param, v)?;
            Ok((v, evaluate(theorem, &p)?))
        })
        .collect()
}
