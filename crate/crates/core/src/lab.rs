//! Classical numerics for quantum oracle distribution switching: the
//! Deutsch–Jozsa ratio counterexample, the Grover tightness band, small-range
//! oracle tables and a classical reprogramming game.
//!
//! Nothing here simulates a quantum state vector. Acceptance probabilities
//! and trace distances are evaluated in closed form, with Monte Carlo only
//! over the random function draws.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::osw_statistical_bound;
use crate::dist::{stat_distance, DiscreteDist, DistError};

/// Largest n + n′ whose padding half is enumerated.
pub const DJ_ENUMERATION_LIMIT: u32 = 22;

/// Errors from lab experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("Q(y0) = {0} leaves nothing to balance")]
    DegenerateQ(f64),
    #[error("n + n' = {0} exceeds the enumeration budget of {DJ_ENUMERATION_LIMIT}")]
    BudgetExceeded(u32),
    #[error(transparent)]
    Dist(#[from] DistError),
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Deutsch–Jozsa experiment parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DjConfig {
    /// Domain exponent n of f.
    pub n: u32,
    /// Padding exponent n′.
    pub n_prime: u32,
    pub p: DiscreteDist,
    pub q: DiscreteDist,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_mc_samples() -> usize {
    10_000
}

/// Closed-form evaluation of E[Z²] under both oracles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DjClosedForm {
    /// Point of maximal ratio P(y)/Q(y); ties go to the smallest label.
    pub y0: String,
    pub p_y0: f64,
    pub q_y0: f64,
    pub ep_z2: f64,
    pub eq_z2: f64,
    pub ratio: f64,
    /// Zeros on the b = 1 half, ⌊2^{n+n′}(1−Q(y₀))⌋.
    pub padding_zeros: u64,
    /// 2^{n+n′}(1−Q(y₀)) − padding_zeros.
    pub padding_imbalance: f64,
}

/// Monte Carlo estimates over random function tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DjMonteCarlo {
    pub ep_z2_hat: f64,
    pub eq_z2_hat: f64,
    pub ratio_hat: f64,
    pub var_p_hat: f64,
    pub var_q_hat: f64,
    /// 2^{2+n+2n′}·x_f for each oracle.
    pub var_p_formula: f64,
    pub var_q_formula: f64,
    pub z_p: Vec<i64>,
    pub z_q: Vec<i64>,
}

impl DjConfig {
    fn validate(&self) -> Result<(), LabError> {
        if self.p.support().any(|y| self.q.prob(y) == 0.0) {
            return Err(LabError::InvalidConfig("supp(P) must lie inside supp(Q)".into()));
        }
        if self.n + self.n_prime + 1 >= 62 {
            return Err(LabError::InvalidConfig("n + n' too large for i64 amplitudes".into()));
        }
        Ok(())
    }

    /// argmax over supp(P) of P(y)/Q(y).
    pub fn y0(&self) -> &str {
        let mut best: Option<(&str, f64)> = None;
        for y in self.p.support() {
            let r = self.p.prob(y) / self.q.prob(y);
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((y, r));
            }
        }
        best.expect("distribution has non-empty support").0
    }

    fn half(&self) -> u64 {
        1u64 << (self.n + self.n_prime)
    }
}

/// Evaluates (2^n(P(y₀)−Q(y₀))² + P(y₀)(1−P(y₀))) / (Q(y₀)(1−Q(y₀))) along
/// with both unnormalized second moments.
pub fn dj_ratio_closed_form(cfg: &DjConfig) -> Result<DjClosedForm, LabError> {
    cfg.validate()?;
    let y0 = cfg.y0().to_string();
    let (p, q) = (cfg.p.prob(&y0), cfg.q.prob(&y0));
    if q <= 0.0 || q >= 1.0 {
        return Err(LabError::DegenerateQ(q));
    }
    let (n, np) = (f64::from(cfg.n), f64::from(cfg.n_prime));
    let mean = 2f64.powf(1.0 + n + np) * (p - q);
    let var_unit = 2f64.powf(2.0 + n + 2.0 * np);
    let ep_z2 = mean * mean + var_unit * p * (1.0 - p);
    let eq_z2 = var_unit * q * (1.0 - q);
    let exact_zeros = cfg.half() as f64 * (1.0 - q);
    let padding_zeros = exact_zeros.floor() as u64;
    Ok(DjClosedForm {
        y0,
        p_y0: p,
        q_y0: q,
        ep_z2,
        eq_z2,
        ratio: (2f64.powf(n) * (p - q) * (p - q) + p * (1.0 - p)) / (q * (1.0 - q)),
        padding_zeros,
        padding_imbalance: exact_zeros - padding_zeros as f64,
    })
}

/// The b = 1 half of h_f: zeros on a prefix of length `zeros`, ones after.
pub fn dj_padding_half(n: u32, n_prime: u32, zeros: u64) -> Result<Vec<u8>, LabError> {
    if n + n_prime > DJ_ENUMERATION_LIMIT {
        return Err(LabError::BudgetExceeded(n + n_prime));
    }
    let len = 1usize << (n + n_prime);
    Ok((0..len).map(|i| u8::from(i as u64 >= zeros)).collect())
}

/// g_f(x) = 0 iff f(x) = y₀.
pub fn dj_g_table(f: &[String], y0: &str) -> Vec<u8> {
    f.iter().map(|y| u8::from(y != y0)).collect()
}

/// Full truth table of h_f over {0,1}^{1+n+n′}, indexed by b‖x‖z with z in
/// the low bits.
pub fn dj_h_table(g: &[u8], n_prime: u32, padding: &[u8]) -> Vec<u8> {
    let reps = 1usize << n_prime;
    let mut h: Vec<u8> = g.iter().flat_map(|&v| std::iter::repeat_n(v, reps)).collect();
    h.extend_from_slice(padding);
    h
}

/// Z_f = Σ_x (−1)^{f(x)}.
pub fn dj_amplitude(table: &[u8]) -> i64 {
    table.iter().map(|&b| if b == 0 { 1i64 } else { -1 }).sum()
}

/// Draws f_P and f_Q tables over {0,1}^n and computes Z_{h_f} exactly per
/// draw. The padding half is enumerated once; the b = 0 half contributes
/// 2^{n′}·Z_{g_f}.
pub fn dj_ratio_monte_carlo(cfg: &DjConfig) -> Result<DjMonteCarlo, LabError> {
    let closed = dj_ratio_closed_form(cfg)?;
    if cfg.mc_samples < 2 {
        return Err(LabError::InvalidConfig("mc_samples must be at least 2".into()));
    }
    let padding = dj_padding_half(cfg.n, cfg.n_prime, closed.padding_zeros)?;
    let z_pad = dj_amplitude(&padding);
    let size = 1usize << cfg.n;
    let reps = 1i64 << cfg.n_prime;
    let sample_z = |dist: &DiscreteDist, stream_base: u64| -> Vec<i64> {
        let sampler = dist.sampler();
        (0..cfg.mc_samples as u64)
            .into_par_iter()
            .map(|draw| {
                let mut rng = stream_rng(cfg.seed, stream_base + draw);
                let zg: i64 = (0..size)
                    .map(|_| if sampler.sample(&mut rng) == closed.y0 { 1 } else { -1 })
                    .sum();
                reps * zg + z_pad
            })
            .collect()
    };
    let z_p = sample_z(&cfg.p, 0);
    let z_q = sample_z(&cfg.q, 1 << 40);
    let moments = |z: &[i64]| {
        let len = z.len() as f64;
        let mean = z.iter().map(|&v| v as f64).sum::<f64>() / len;
        let second = z.iter().map(|&v| (v as f64).powi(2)).sum::<f64>() / len;
        let var = z.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (len - 1.0);
        (second, var)
    };
    let (ep, var_p) = moments(&z_p);
    let (eq, var_q) = moments(&z_q);
    let var_unit = 2f64.powf(2.0 + f64::from(cfg.n) + 2.0 * f64::from(cfg.n_prime));
    Ok(DjMonteCarlo {
        ep_z2_hat: ep,
        eq_z2_hat: eq,
        ratio_hat: ep / eq,
        var_p_hat: var_p,
        var_q_hat: var_q,
        var_p_formula: var_unit * closed.p_y0 * (1.0 - closed.p_y0),
        var_q_formula: var_unit * closed.q_y0 * (1.0 - closed.q_y0),
        z_p,
        z_q,
    })
}

/// Grover tightness experiment parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroverConfig {
    pub n_domain: u64,
    /// Marking probability ε.
    pub eps: f64,
    /// Grover iterations.
    pub q: u32,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

/// One Grover trial with t marked elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroverTrial {
    pub t: u64,
    pub theta: f64,
    /// 2|sin(qθ)|, the trace distance of the two pure states.
    pub distance: f64,
    /// The same distance from an explicit rotation in span{|α⟩, |β⟩}.
    pub rotation_distance: f64,
    pub band_low: f64,
    pub band_high: f64,
    /// 8q√(2t/N).
    pub osw_bound: f64,
    pub in_band: bool,
    pub below_osw: bool,
    /// qθ > π/2, outside the regime where the band is proven.
    pub regime_violation: bool,
}

/// Per-trial Grover distances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroverReport {
    pub trials: Vec<GroverTrial>,
    pub all_in_band: bool,
    pub all_below_osw: bool,
    pub regime_violations: usize,
    pub max_rotation_error: f64,
}

/// Applies q Grover iterations to (cos θ/2, sin θ/2) as 2×2 reflections
/// and returns 2√(1 − ⟨ψ^{(q)}|ψ⟩²), computed as twice the wedge product
/// of the two unit vectors.
pub fn grover_rotation_distance(theta: f64, q: u32) -> f64 {
    let psi = [(theta / 2.0).cos(), (theta / 2.0).sin()];
    let mut s = psi;
    for _ in 0..q {
        // Oracle flips the marked component, then reflect about |ψ⟩.
        s[1] = -s[1];
        let dot = psi[0] * s[0] + psi[1] * s[1];
        s = [2.0 * dot * psi[0] - s[0], 2.0 * dot * psi[1] - s[1]];
    }
    2.0 * (s[0] * psi[1] - s[1] * psi[0]).abs()
}

/// Evaluates one trial with t marked elements out of `n_domain`.
pub fn grover_trial(n_domain: u64, t: u64, q: u32) -> GroverTrial {
    let frac = t as f64 / n_domain as f64;
    let root = frac.sqrt();
    let theta = 2.0 * root.asin();
    let qf = f64::from(q);
    let distance = 2.0 * (qf * theta).sin().abs();
    let band_low = 8.0 / PI * qf * root;
    let band_high = 2.0 * PI * qf * root;
    let osw_bound = osw_statistical_bound(qf, frac);
    GroverTrial {
        t,
        theta,
        distance,
        rotation_distance: grover_rotation_distance(theta, q),
        band_low,
        band_high,
        osw_bound,
        in_band: band_low <= distance && distance <= band_high,
        below_osw: distance <= osw_bound,
        regime_violation: qf * theta > PI / 2.0,
    }
}

/// Samples t ~ Binomial(N, ε) per trial and checks the trace-distance band.
pub fn grover_tightness(cfg: &GroverConfig) -> Result<GroverReport, LabError> {
    if !(cfg.eps > 0.0 && cfg.eps < 1.0) || cfg.q == 0 || cfg.n_domain == 0 {
        return Err(LabError::InvalidConfig("need 0 < eps < 1, q ≥ 1, n_domain ≥ 1".into()));
    }
    let binomial = Binomial::new(cfg.n_domain, cfg.eps)
        .map_err(|e| LabError::InvalidConfig(e.to_string()))?;
    let trials: Vec<GroverTrial> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let t = binomial.sample(&mut stream_rng(cfg.seed, i));
            grover_trial(cfg.n_domain, t, cfg.q)
        })
        .collect();
    Ok(GroverReport {
        all_in_band: trials.iter().all(|t| t.in_band),
        all_below_osw: trials.iter().all(|t| t.below_osw),
        regime_violations: trials.iter().filter(|t| t.regime_violation).count(),
        max_rotation_error: trials
            .iter()
            .map(|t| (t.distance - t.rotation_distance).abs())
            .fold(0.0, f64::max),
        trials,
    })
}

/// Small-range table: r values y_i ~ D, then each input picks a uniform
/// index i ∈ [r].
pub fn small_range_build<R: Rng + ?Sized>(
    r: usize,
    dist: &DiscreteDist,
    domain_size: usize,
    rng: &mut R,
) -> Result<Vec<String>, LabError> {
    if r == 0 {
        return Err(LabError::InvalidConfig("r must be at least 1".into()));
    }
    let sampler = dist.sampler();
    let values: Vec<&str> = (0..r).map(|_| sampler.sample(rng)).collect();
    Ok((0..domain_size).map(|_| values[rng.random_range(0..r)].to_string()).collect())
}

/// Small-range experiment parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallRangeConfig {
    pub r: usize,
    pub dist: DiscreteDist,
    pub domain_size: usize,
    #[serde(default)]
    pub seed: u64,
}

/// One small-range table and its distinct-output count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallRangeReport {
    pub table: Vec<String>,
    pub distinct_outputs: usize,
}

/// Builds one table from a config.
pub fn small_range_run(cfg: &SmallRangeConfig) -> Result<SmallRangeReport, LabError> {
    let table = small_range_build(cfg.r, &cfg.dist, cfg.domain_size, &mut stream_rng(cfg.seed, 0))?;
    let distinct = table.iter().collect::<std::collections::BTreeSet<_>>().len();
    Ok(SmallRangeReport { table, distinct_outputs: distinct })
}

/// Classical reprogramming-game parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproConfig {
    /// Number of reprogrammed points R.
    pub r: usize,
    /// Reprogramming distribution Q; 𝒴 is its label set.
    pub q_dist: DiscreteDist,
    pub trials: usize,
    /// Random-oracle queries made before reprogramming.
    #[serde(default)]
    pub learn_queries: usize,
    #[serde(default)]
    pub seed: u64,
}

/// Monte Carlo estimate of the two game outcomes against the bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproReport {
    pub p_game0: f64,
    pub p_game1: f64,
    pub lhs_advantage: f64,
    pub stderr: f64,
    pub delta_qu: f64,
    /// Zero: the classical distinguisher never queried the fresh inputs.
    pub delta_repr: f64,
    pub rhs_bound: f64,
    pub pass: bool,
}

/// Plays one game: a lazily sampled uniform oracle, a learning phase,
/// then R fresh inputs whose outputs are resampled from Q in game 1. The
/// distinguisher is the likelihood-ratio test Π Q(y_i) > Π U(y_i).
fn repro_game(cfg: &ReproConfig, uniform: &DiscreteDist, reprogram: bool, rng: &mut ChaCha20Rng) -> bool {
    let u_sampler = uniform.sampler();
    let q_sampler = cfg.q_dist.sampler();
    let mut table = std::collections::HashMap::new();
    for _ in 0..cfg.learn_queries {
        let x: u64 = rng.random();
        table.entry(x).or_insert_with(|| u_sampler.sample(rng).to_string());
    }
    let mut fresh = Vec::with_capacity(cfg.r);
    while fresh.len() < cfg.r {
        let x: u64 = rng.random();
        if !table.contains_key(&x) && !fresh.contains(&x) {
            fresh.push(x);
        }
    }
    let mut log_lr = 0.0;
    for x in fresh {
        let y = if reprogram { q_sampler.sample(rng) } else { u_sampler.sample(rng) }.to_string();
        log_lr += cfg.q_dist.prob(&y).ln() - uniform.prob(&y).ln();
        table.insert(x, y);
    }
    log_lr > 1e-12
}

/// Runs both games `trials` times and compares the observed advantage to
/// R·Δ(Q, U(𝒴)) + δ_repr with a 3σ allowance.
pub fn repro_classical_check(cfg: &ReproConfig) -> Result<ReproReport, LabError> {
    if cfg.trials == 0 || cfg.r == 0 {
        return Err(LabError::InvalidConfig("trials and r must be positive".into()));
    }
    let uniform = DiscreteDist::uniform(cfg.q_dist.labels().map(str::to_string))?;
    let win_rate = |reprogram: bool, base: u64| {
        let wins = (0..cfg.trials as u64)
            .into_par_iter()
            .filter(|&i| repro_game(cfg, &uniform, reprogram, &mut stream_rng(cfg.seed, base + i)))
            .count();
        wins as f64 / cfg.trials as f64
    };
    let p0 = win_rate(false, 0);
    let p1 = win_rate(true, 1 << 40);
    let n = cfg.trials as f64;
    let stderr = (p0 * (1.0 - p0) / n + p1 * (1.0 - p1) / n).sqrt();
    let delta_qu = stat_distance(&cfg.q_dist, &uniform);
    let rhs = cfg.r as f64 * delta_qu;
    let lhs = (p1 - p0).abs();
    Ok(ReproReport {
        p_game0: p0,
        p_game1: p1,
        lhs_advantage: lhs,
        stderr,
        delta_qu,
        delta_repr: 0.0,
        rhs_bound: rhs,
        pass: lhs <= rhs + 3.0 * stderr,
    })
}
