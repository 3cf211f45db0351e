//! Executable security games for ring signatures with pluggable classical
//! adversaries: strong and pair-fresh unforgeability under chosen-ring
//! attacks, anonymity under full key exposure, and a no-query forgery game
//! whose hash transcript is mined for a witness.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::random_oracle::{Query, RecordingOracle, Shake256Oracle};
use crate::ringsig::{
    AosScheme, AosSecretKey, AosSignature, Ring, RingSigError, RingSignatureScheme, RpsfScheme,
};
use crate::sigma::{
    sigma_commit, sigma_extract, sigma_respond, simulate_with_pair, Challenge, CnoCommitment,
    CnoResponse, OpenedMessage, SigmaInstance, SigmaWitness, DISTINCT_COLOR_PAIRS,
};
use crate::stats::binomial_stderr;

/// Errors raised by the game harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("adversary protocol violation: {0}")]
    AdversaryProtocolViolation(String),
    #[error("invalid game configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Scheme(#[from] RingSigError),
}

/// Parameters shared by all games.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameConfig {
    /// Number of honest keys N.
    pub ring_size: usize,
    /// Oracle budget: q_s for the forgery games, q_c for anonymity.
    pub budget: usize,
    pub seed: u64,
    /// Hands the secret key with this index to the adversary out of band.
    /// Validates harness plumbing; a real game never sets it.
    pub leak_key: Option<usize>,
    /// Exposes the anonymity challenge bit to the adversary. A deliberate
    /// harness bug used as a control.
    pub leak_challenge_bit: bool,
}

impl GameConfig {
    pub fn new(ring_size: usize, budget: usize, seed: u64) -> Self {
        GameConfig {
            ring_size,
            budget,
            seed,
            leak_key: None,
            leak_challenge_bit: false,
        }
    }

    fn validate(&self, kappa: usize) -> Result<(), GameError> {
        if self.ring_size == 0 || self.ring_size > kappa {
            return Err(GameError::InvalidConfig(format!(
                "ring size {} outside 1..={kappa}",
                self.ring_size
            )));
        }
        if let Some(i) = self.leak_key {
            if i >= self.ring_size {
                return Err(GameError::InvalidConfig(format!("leaked key index {i} out of range")));
            }
        }
        Ok(())
    }
}

/// Outcome of one forgery game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameResult {
    pub won: bool,
    pub queries_used: usize,
    /// The forgery verified but repeated an entry of the query list.
    pub freshness_violation: bool,
    /// Entries added to the query list.
    pub list_len: usize,
}

/// A claimed forgery (ρ*, m*, σ*).
#[derive(Debug, Clone)]
pub struct Forgery<S: RingSignatureScheme> {
    pub ring: Ring<S::PublicKey>,
    pub message: Vec<u8>,
    pub sig: S::Signature,
}

/// Which entries the signing oracle records, and what counts as fresh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Freshness {
    /// List of (ρ, m, σ); a forgery must be a new triple.
    Strong,
    /// List of (ρ, m); repeated pairs are refused and a forgery needs a new pair.
    Pairs,
}

fn derive_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

// One answered signing query: (ring, message, signature).
type SignedEntry<S> = (
    Ring<<S as RingSignatureScheme>::PublicKey>,
    Vec<u8>,
    <S as RingSignatureScheme>::Signature,
);

// Honest public keys with the matching secret keys.
type KeyPairs<S> = (
    Vec<<S as RingSignatureScheme>::PublicKey>,
    Vec<<S as RingSignatureScheme>::SecretKey>,
);

/// State visible to a forgery adversary: the honest ring and the signing
/// oracle.
pub struct SignContext<'a, S: RingSignatureScheme> {
    scheme: &'a S,
    ring: Ring<S::PublicKey>,
    secret_keys: Vec<S::SecretKey>,
    leaked: Option<S::SecretKey>,
    freshness: Freshness,
    budget: usize,
    used: usize,
    overflow: bool,
    list: Vec<SignedEntry<S>>,
    rng: ChaCha20Rng,
}

impl<S: RingSignatureScheme> SignContext<'_, S> {
    pub fn scheme(&self) -> &S {
        self.scheme
    }

    /// The honest ring ρ.
    pub fn ring(&self) -> &Ring<S::PublicKey> {
        &self.ring
    }

    /// The key handed over by a leaking harness, if any.
    pub fn leaked_key(&self) -> Option<&S::SecretKey> {
        self.leaked.as_ref()
    }

    pub fn queries_used(&self) -> usize {
        self.used
    }

    /// O_Sign(i, ρ′, m): signs with the honest key whose public key is the
    /// i-th member of ρ′. Returns ⊥ when the budget is spent, the key is not
    /// honest, or the pair was already queried in [`Freshness::Pairs`] mode.
    pub fn sign(&mut self, i: usize, ring: &Ring<S::PublicKey>, message: &[u8]) -> Option<S::Signature> {
        if self.freshness == Freshness::Pairs
            && self.list.iter().any(|(r, m, _)| r == ring && m == message)
        {
            return None;
        }
        if self.used == self.budget {
            self.overflow = true;
            return None;
        }
        self.used += 1;
        let pk = ring.keys().get(i)?;
        let j = self
            .secret_keys
            .iter()
            .position(|sk| self.scheme.public_key(sk) == *pk)?;
        let sig = self
            .scheme
            .sign(&self.secret_keys[j], ring, message, &mut self.rng)
            .ok()?;
        self.list.push((ring.clone(), message.to_vec(), sig.clone()));
        Some(sig)
    }
}

/// A classical forgery adversary.
pub trait ForgeryAdversary<S: RingSignatureScheme> {
    fn run(&mut self, ctx: &mut SignContext<'_, S>, rng: &mut ChaCha20Rng) -> Option<Forgery<S>>;
}

fn honest_keys<S: RingSignatureScheme>(
    scheme: &S,
    n: usize,
    rng: &mut ChaCha20Rng,
) -> Result<KeyPairs<S>, GameError> {
    let mut pks = Vec::with_capacity(n);
    let mut sks = Vec::with_capacity(n);
    for _ in 0..n {
        let (pk, sk) = scheme.keygen(rng)?;
        pks.push(pk);
        sks.push(sk);
    }
    Ok((pks, sks))
}

fn run_forgery_game<S: RingSignatureScheme>(
    scheme: &S,
    config: &GameConfig,
    adversary: &mut dyn ForgeryAdversary<S>,
    freshness: Freshness,
) -> Result<GameResult, GameError> {
    config.validate(scheme.kappa())?;
    let mut rng = derive_rng(config.seed, 0);
    let (pks, sks) = honest_keys(scheme, config.ring_size, &mut rng)?;
    let ring = Ring::new(pks, scheme.kappa())?;
    let mut ctx = SignContext {
        scheme,
        ring: ring.clone(),
        leaked: config.leak_key.map(|i| sks[i].clone()),
        secret_keys: sks,
        freshness,
        budget: config.budget,
        used: 0,
        overflow: false,
        list: Vec::new(),
        rng: derive_rng(config.seed, 1),
    };
    let mut adv_rng = derive_rng(config.seed, 2);
    let forgery = adversary.run(&mut ctx, &mut adv_rng);
    if ctx.overflow {
        return Err(GameError::AdversaryProtocolViolation(format!(
            "signing queries exceeded the budget of {}",
            config.budget
        )));
    }
    let mut result = GameResult {
        won: false,
        queries_used: ctx.used,
        freshness_violation: false,
        list_len: ctx.list.len(),
    };
    let Some(f) = forgery else {
        return Ok(result);
    };
    if !f.ring.is_subset_of(&ring) || !scheme.verify(&f.ring, &f.message, &f.sig) {
        return Ok(result);
    }
    let repeated = ctx.list.iter().any(|(r, m, s)| {
        *r == f.ring
            && *m == f.message
            && match freshness {
                Freshness::Strong => *s == f.sig,
                Freshness::Pairs => true,
            }
    });
    result.freshness_violation = repeated;
    result.won = !repeated;
    Ok(result)
}

/// Strong unforgeability under chosen-ring attacks: the forgery must be a
/// triple never returned by the signing oracle, on a subring of ρ.
pub fn run_sufcra<S: RingSignatureScheme>(
    scheme: &S,
    config: &GameConfig,
    adversary: &mut dyn ForgeryAdversary<S>,
) -> Result<GameResult, GameError> {
    run_forgery_game(scheme, config, adversary, Freshness::Strong)
}

/// Unforgeability with pair freshness: the oracle records (ρ, m) pairs,
/// refuses repeats, and the forgery must be on a new pair.
pub fn run_ufcra1<S: RingSignatureScheme>(
    scheme: &S,
    config: &GameConfig,
    adversary: &mut dyn ForgeryAdversary<S>,
) -> Result<GameResult, GameError> {
    run_forgery_game(scheme, config, adversary, Freshness::Pairs)
}

/// Queries one signature on the honest ring and replays it.
#[derive(Debug, Default)]
pub struct ReplayAdversary;

impl<S: RingSignatureScheme> ForgeryAdversary<S> for ReplayAdversary {
    fn run(&mut self, ctx: &mut SignContext<'_, S>, _rng: &mut ChaCha20Rng) -> Option<Forgery<S>> {
        let ring = ctx.ring().clone();
        let sig = ctx.sign(0, &ring, b"replayed")?;
        Some(Forgery {
            ring,
            message: b"replayed".to_vec(),
            sig,
        })
    }
}

/// Signs a fresh message with a leaked key.
#[derive(Debug, Default)]
pub struct StolenKeyAdversary;

impl<S: RingSignatureScheme> ForgeryAdversary<S> for StolenKeyAdversary {
    fn run(&mut self, ctx: &mut SignContext<'_, S>, rng: &mut ChaCha20Rng) -> Option<Forgery<S>> {
        let sk = ctx.leaked_key()?.clone();
        let ring = ctx.ring().clone();
        let sig = ctx.scheme().sign(&sk, &ring, b"stolen", rng).ok()?;
        Some(Forgery {
            ring,
            message: b"stolen".to_vec(),
            sig,
        })
    }
}

/// Queries (ρ, m), then signs the same pair again with a leaked key so the
/// forgery is a new signature on an old pair.
#[derive(Debug, Default)]
pub struct RerandomizeAdversary;

impl<S: RingSignatureScheme> ForgeryAdversary<S> for RerandomizeAdversary {
    fn run(&mut self, ctx: &mut SignContext<'_, S>, rng: &mut ChaCha20Rng) -> Option<Forgery<S>> {
        let ring = ctx.ring().clone();
        let first = ctx.sign(0, &ring, b"pair")?;
        let sk = ctx.leaked_key()?.clone();
        let sig = loop {
            let s = ctx.scheme().sign(&sk, &ring, b"pair", rng).ok()?;
            if s != first {
                break s;
            }
        };
        Some(Forgery {
            ring,
            message: b"pair".to_vec(),
            sig,
        })
    }
}

/// Queries the same (ρ, m) twice and records what the oracle returned.
#[derive(Debug, Default)]
pub struct DuplicateQueryAdversary {
    pub answers: Vec<bool>,
}

impl<S: RingSignatureScheme> ForgeryAdversary<S> for DuplicateQueryAdversary {
    fn run(&mut self, ctx: &mut SignContext<'_, S>, _rng: &mut ChaCha20Rng) -> Option<Forgery<S>> {
        let ring = ctx.ring().clone();
        let a = ctx.sign(0, &ring, b"twice");
        let b = ctx.sign(0, &ring, b"twice");
        self.answers = vec![a.is_some(), b.is_some()];
        Some(Forgery {
            ring,
            message: b"twice".to_vec(),
            sig: a?,
        })
    }
}

/// Issues one query more than the budget allows.
#[derive(Debug, Default)]
pub struct BudgetExceedingAdversary;

impl<S: RingSignatureScheme> ForgeryAdversary<S> for BudgetExceedingAdversary {
    fn run(&mut self, ctx: &mut SignContext<'_, S>, _rng: &mut ChaCha20Rng) -> Option<Forgery<S>> {
        let ring = ctx.ring().clone();
        for k in 0..=ctx.budget {
            ctx.sign(0, &ring, format!("q{k}").as_bytes());
        }
        None
    }
}

/// Aggregate of repeated anonymity games.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnonResult {
    pub trials: u64,
    pub wins: u64,
    /// |win rate − ½|.
    pub advantage: f64,
    /// Binomial standard error of the win rate.
    pub stderr: f64,
}

/// State visible to an anonymity adversary: every key and the challenge
/// oracle.
pub struct AnonContext<'a, S: RingSignatureScheme> {
    scheme: &'a S,
    public_keys: Vec<S::PublicKey>,
    secret_keys: Vec<S::SecretKey>,
    bit: bool,
    leak_bit: bool,
    budget: usize,
    used: usize,
    overflow: bool,
    rng: ChaCha20Rng,
}

impl<S: RingSignatureScheme> AnonContext<'_, S> {
    pub fn scheme(&self) -> &S {
        self.scheme
    }

    /// pk_1..pk_N in generation order.
    pub fn public_keys(&self) -> &[S::PublicKey] {
        &self.public_keys
    }

    /// Full key exposure.
    pub fn secret_keys(&self) -> &[S::SecretKey] {
        &self.secret_keys
    }

    /// The challenge bit, visible only through a deliberately buggy harness.
    pub fn leaked_bit(&self) -> Option<bool> {
        self.leak_bit.then_some(self.bit)
    }

    /// CHAL(i_0, i_1, ρ′, m): signs with sk_{i_b} after checking that both
    /// pk_{i_0} and pk_{i_1} lie in ρ′.
    pub fn challenge(
        &mut self,
        i0: usize,
        i1: usize,
        ring: &Ring<S::PublicKey>,
        message: &[u8],
    ) -> Option<S::Signature> {
        if self.used == self.budget {
            self.overflow = true;
            return None;
        }
        self.used += 1;
        let pk0 = self.public_keys.get(i0)?;
        let pk1 = self.public_keys.get(i1)?;
        if ring.position(pk0).is_none() || ring.position(pk1).is_none() {
            return None;
        }
        let i = if self.bit { i1 } else { i0 };
        self.scheme
            .sign(&self.secret_keys[i], ring, message, &mut self.rng)
            .ok()
    }
}

/// A classical anonymity adversary; returns its guess b′.
pub trait AnonAdversary<S: RingSignatureScheme> {
    fn run(&mut self, ctx: &mut AnonContext<'_, S>, rng: &mut ChaCha20Rng) -> bool;
}

fn anon_trial<S: RingSignatureScheme, A: AnonAdversary<S>>(
    scheme: &S,
    config: &GameConfig,
    adversary: &mut A,
    trial: u64,
) -> Result<bool, GameError> {
    let mut rng = derive_rng(config.seed, 3 * trial);
    let (pks, sks) = honest_keys(scheme, config.ring_size, &mut rng)?;
    let bit = rng.random_bool(0.5);
    let mut ctx = AnonContext {
        scheme,
        public_keys: pks,
        secret_keys: sks,
        bit,
        leak_bit: config.leak_challenge_bit,
        budget: config.budget,
        used: 0,
        overflow: false,
        rng: derive_rng(config.seed, 3 * trial + 1),
    };
    let guess = adversary.run(&mut ctx, &mut derive_rng(config.seed, 3 * trial + 2));
    if ctx.overflow {
        return Err(GameError::AdversaryProtocolViolation(format!(
            "challenge queries exceeded the budget of {}",
            config.budget
        )));
    }
    Ok(guess == bit)
}

/// Runs the anonymity game `trials` times, each with fresh keys, and
/// reports the empirical advantage. Trials run in parallel; the result is
/// independent of scheduling.
pub fn run_anon<S, A, F>(
    scheme: &S,
    config: &GameConfig,
    make_adversary: F,
    trials: u64,
) -> Result<AnonResult, GameError>
where
    S: RingSignatureScheme + Sync,
    A: AnonAdversary<S>,
    F: Fn() -> A + Sync,
{
    if trials == 0 {
        return Err(GameError::InvalidConfig("trials must be at least 1".into()));
    }
    config.validate(scheme.kappa())?;
    if config.ring_size < 2 {
        return Err(GameError::InvalidConfig("anonymity needs at least two keys".into()));
    }
    let outcomes: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| anon_trial(scheme, config, &mut make_adversary(), t))
        .collect::<Result<_, _>>()?;
    let wins = outcomes.iter().filter(|&&w| w).count() as u64;
    let rate = wins as f64 / trials as f64;
    Ok(AnonResult {
        trials,
        wins,
        advantage: (rate - 0.5).abs(),
        stderr: binomial_stderr(rate, trials),
    })
}

/// Ignores everything and flips a coin.
#[derive(Debug, Default, Clone)]
pub struct RandomGuessAdversary;

impl<S: RingSignatureScheme> AnonAdversary<S> for RandomGuessAdversary {
    fn run(&mut self, _ctx: &mut AnonContext<'_, S>, rng: &mut ChaCha20Rng) -> bool {
        rng.random_bool(0.5)
    }
}

/// Outputs the challenge bit read through the harness leak.
#[derive(Debug, Default, Clone)]
pub struct CanaryAdversary;

impl<S: RingSignatureScheme> AnonAdversary<S> for CanaryAdversary {
    fn run(&mut self, ctx: &mut AnonContext<'_, S>, rng: &mut ChaCha20Rng) -> bool {
        ctx.leaked_bit().unwrap_or_else(|| rng.random_bool(0.5))
    }
}

/// Asks for a signature by key 0 or key 1 on their two-member ring and
/// guesses that the signer sits in the slot whose u-coordinate has the
/// larger norm.
#[derive(Debug, Default, Clone)]
pub struct NormStatisticAdversary;

impl AnonAdversary<RpsfScheme> for NormStatisticAdversary {
    fn run(&mut self, ctx: &mut AnonContext<'_, RpsfScheme>, rng: &mut ChaCha20Rng) -> bool {
        let pks = ctx.public_keys().to_vec();
        let Ok(ring) = Ring::new(vec![pks[0].clone(), pks[1].clone()], ctx.scheme().kappa()) else {
            return rng.random_bool(0.5);
        };
        let Some(sig) = ctx.challenge(0, 1, &ring, b"anon") else {
            return rng.random_bool(0.5);
        };
        let slot = |pk| ring.position(pk).expect("member");
        let norm = |i: usize| {
            sig.d.polys()[i]
                .centered()
                .iter()
                .map(|&c| (c * c) as f64)
                .sum::<f64>()
        };
        norm(slot(&pks[1])) > norm(slot(&pks[0]))
    }
}

/// Circular scheme whose hash calls are all recorded.
pub type RecordedAos = AosScheme<RecordingOracle<Shake256Oracle>>;

/// Ordered log of classical hash queries made during a game.
pub type RoTranscript = Vec<Query>;

/// Parameters of the circular scheme used by the extraction game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AosSetup {
    pub vertices: u16,
    pub edge_density: f64,
    pub lambda_r: u16,
    pub kappa: usize,
}

impl AosSetup {
    fn scheme(&self) -> RecordedAos {
        AosScheme::new(
            RecordingOracle::new(Shake256Oracle),
            self.vertices,
            self.edge_density,
            self.lambda_r,
            self.kappa,
        )
    }
}

/// State visible to a no-query forger: the ring, the recording scheme
/// (whose oracle every hash must go through), and an optional leaked key.
pub struct NoQueryContext<'a> {
    scheme: &'a RecordedAos,
    ring: Ring<SigmaInstance>,
    leaked: Option<AosSecretKey>,
}

impl NoQueryContext<'_> {
    pub fn scheme(&self) -> &RecordedAos {
        self.scheme
    }

    pub fn ring(&self) -> &Ring<SigmaInstance> {
        &self.ring
    }

    pub fn leaked_key(&self) -> Option<&AosSecretKey> {
        self.leaked.as_ref()
    }
}

/// A forger without a signing oracle.
pub trait NoQueryAdversary {
    fn run(&mut self, ctx: &NoQueryContext<'_>, rng: &mut ChaCha20Rng) -> Option<(Vec<u8>, AosSignature)>;
}

/// Outcome of the extraction game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractionResult {
    pub forgery_valid: bool,
    pub witness_extracted: bool,
    /// 0-based ring slots whose openings yielded a proper coloring.
    pub extracted_slots: Vec<usize>,
    pub transcript_len: usize,
}

/// D⁻¹(y): the recorded preimage of y. With several distinct preimages the
/// lexicographically smallest wins; with none the result is ⊥.
pub fn transcript_inverse(transcript: &[Query], y: &[u8; 32]) -> Option<Vec<u8>> {
    transcript
        .iter()
        .filter(|q| &q.output == y)
        .map(|q| &q.input)
        .min()
        .cloned()
}

/// Runs the no-query forgery game on the circular scheme and, on a valid
/// forgery, inverts every commitment through the hash transcript and runs
/// the extractor on each ring slot.
pub fn run_ufnra_with_extraction(
    setup: &AosSetup,
    config: &GameConfig,
    adversary: &mut dyn NoQueryAdversary,
) -> Result<(ExtractionResult, Vec<SigmaWitness>), GameError> {
    config.validate(setup.kappa)?;
    let scheme = setup.scheme();
    let mut rng = derive_rng(config.seed, 0);
    let (pks, sks) = honest_keys(&scheme, config.ring_size, &mut rng)?;
    let ring = Ring::new(pks, setup.kappa)?;
    let ctx = NoQueryContext {
        scheme: &scheme,
        ring: ring.clone(),
        leaked: config.leak_key.map(|i| sks[i].clone()),
    };
    let forgery = adversary.run(&ctx, &mut derive_rng(config.seed, 2));
    let mut result = ExtractionResult {
        forgery_valid: false,
        witness_extracted: false,
        extracted_slots: Vec::new(),
        transcript_len: 0,
    };
    let Some((message, sig)) = forgery else {
        return Ok((result, Vec::new()));
    };
    result.forgery_valid = scheme.verify(&ring, &message, &sig);
    let transcript = scheme.oracle().queries();
    result.transcript_len = transcript.len();
    if !result.forgery_valid {
        return Ok((result, Vec::new()));
    }
    let mut witnesses = Vec::new();
    for (slot, ((com, _), inst)) in sig.parts.iter().zip(ring.keys()).enumerate() {
        let messages: Vec<Option<OpenedMessage>> = com
            .y
            .iter()
            .enumerate()
            .map(|(i, y)| {
                transcript_inverse(&transcript, y)
                    .and_then(|x| OpenedMessage::from_oracle_input(&x))
                    .filter(|m| m.index as usize == i)
            })
            .collect();
        if let Ok(w) = sigma_extract(inst, &messages) {
            result.extracted_slots.push(slot);
            witnesses.push(w);
        }
    }
    result.witness_extracted = !witnesses.is_empty();
    Ok((result, witnesses))
}

/// Signs honestly with a leaked witness.
#[derive(Debug, Default)]
pub struct HonestProverAdversary;

impl NoQueryAdversary for HonestProverAdversary {
    fn run(&mut self, ctx: &NoQueryContext<'_>, rng: &mut ChaCha20Rng) -> Option<(Vec<u8>, AosSignature)> {
        let sk = ctx.leaked_key()?;
        let sig = ctx.scheme().sign(sk, ctx.ring(), b"honest", rng).ok()?;
        Some((b"honest".to_vec(), sig))
    }
}

/// Outputs random bytes shaped like a signature.
#[derive(Debug, Default)]
pub struct GarbageAdversary;

impl NoQueryAdversary for GarbageAdversary {
    fn run(&mut self, ctx: &NoQueryContext<'_>, rng: &mut ChaCha20Rng) -> Option<(Vec<u8>, AosSignature)> {
        let parts = ctx
            .ring()
            .keys()
            .iter()
            .map(|inst| {
                let y = (0..inst.vertices())
                    .map(|_| {
                        let mut b = [0u8; 32];
                        rng.fill_bytes(&mut b);
                        b
                    })
                    .collect();
                let opened = (0..2)
                    .map(|_| OpenedMessage {
                        index: rng.random_range(0..inst.vertices() as u16),
                        color: rng.random_range(0..3),
                        rand: vec![0; inst.lambda_r() as usize / 8],
                    })
                    .collect();
                (CnoCommitment { y }, CnoResponse { opened })
            })
            .collect();
        Some((b"garbage".to_vec(), AosSignature { parts }))
    }
}

/// Builds well-formed openings but fabricates the commitments instead of
/// hashing, then chains challenges honestly.
#[derive(Debug, Default)]
pub struct FabricatedCommitmentAdversary;

impl NoQueryAdversary for FabricatedCommitmentAdversary {
    fn run(&mut self, ctx: &NoQueryContext<'_>, rng: &mut ChaCha20Rng) -> Option<(Vec<u8>, AosSignature)> {
        let ring = ctx.ring();
        let n = ring.len();
        let coms: Vec<CnoCommitment> = ring
            .keys()
            .iter()
            .map(|inst| CnoCommitment {
                y: (0..inst.vertices())
                    .map(|_| {
                        let mut b = [0u8; 32];
                        rng.fill_bytes(&mut b);
                        b
                    })
                    .collect(),
            })
            .collect();
        let parts = (1..=n)
            .map(|j| {
                let prev = &coms[(j + n - 2) % n];
                let ch = ctx.scheme().challenge(ring, j, prev, b"fabricated");
                let (u, v) = ring.keys()[j - 1].edges()[ch.0];
                let rand = vec![0; ring.keys()[j - 1].lambda_r() as usize / 8];
                let opened = vec![
                    OpenedMessage { index: u, color: 0, rand: rand.clone() },
                    OpenedMessage { index: v, color: 1, rand },
                ];
                (coms[j - 1].clone(), CnoResponse { opened })
            })
            .collect();
        Some((b"fabricated".to_vec(), AosSignature { parts }))
    }
}

/// Source of transcripts compared against the honest prover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HvzkSimulator {
    /// The protocol's simulator.
    Standard,
    /// The honest prover itself (control).
    HonestProver,
    /// Forces the opened pair to (0, 1) with probability ⅓ (test fixture).
    Biased,
}

fn pair_counts<F>(samples: u64, mut draw: F) -> BTreeMap<(u8, u8), u64>
where
    F: FnMut() -> (u8, u8),
{
    let mut counts = BTreeMap::new();
    for _ in 0..samples {
        *counts.entry(draw()).or_insert(0) += 1;
    }
    counts
}

fn empirical_tv(a: &BTreeMap<(u8, u8), u64>, b: &BTreeMap<(u8, u8), u64>, n: u64) -> f64 {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter()
        .map(|k| {
            let pa = *a.get(k).unwrap_or(&0) as f64;
            let pb = *b.get(k).unwrap_or(&0) as f64;
            (pa - pb).abs()
        })
        .sum::<f64>()
        / (2.0 * n as f64)
}

/// Empirical statistical distance between honest and simulated transcript
/// features (the opened ordered color pair) for each fixed challenge;
/// returns the largest over all challenges.
pub fn hvzk_distance_with(
    inst: &SigmaInstance,
    w: &SigmaWitness,
    samples: u64,
    simulator: HvzkSimulator,
    seed: u64,
) -> f64 {
    let oracle = Shake256Oracle;
    (0..inst.edges().len())
        .into_par_iter()
        .map(|e| {
            let ch = Challenge(e);
            let mut rng = derive_rng(seed, 2 * e as u64);
            let honest_pair = |rng: &mut ChaCha20Rng| {
                let (_, st) = sigma_commit(inst, w, rng, &oracle);
                let rsp = sigma_respond(inst, &st, ch);
                (rsp.opened[0].color, rsp.opened[1].color)
            };
            let honest = pair_counts(samples, || honest_pair(&mut rng));
            let mut rng = derive_rng(seed, 2 * e as u64 + 1);
            let simulated = pair_counts(samples, || match simulator {
                HvzkSimulator::HonestProver => honest_pair(&mut rng),
                HvzkSimulator::Standard | HvzkSimulator::Biased => {
                    let pair = if simulator == HvzkSimulator::Biased && rng.random_bool(1.0 / 3.0) {
                        (0, 1)
                    } else {
                        DISTINCT_COLOR_PAIRS[rng.random_range(0..6)]
                    };
                    let (_, rsp) = simulate_with_pair(inst, ch, pair, &mut rng, &oracle);
                    (rsp.opened[0].color, rsp.opened[1].color)
                }
            });
            empirical_tv(&honest, &simulated, samples)
        })
        .reduce(|| 0.0, f64::max)
}

/// [`hvzk_distance_with`] for the protocol's own simulator.
pub fn hvzk_distance_estimate(inst: &SigmaInstance, w: &SigmaWitness, samples: u64, seed: u64) -> f64 {
    hvzk_distance_with(inst, w, samples, HvzkSimulator::Standard, seed)
}

/// Convenience: the circular scheme over plain SHAKE256.
pub fn aos_scheme(setup: &AosSetup) -> AosScheme<Shake256Oracle> {
    AosScheme::new(Shake256Oracle, setup.vertices, setup.edge_density, setup.lambda_r, setup.kappa)
}
