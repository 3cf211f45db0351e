//! Ring signatures from the preimage-sampleable function (salted
//! hash-and-sign) and from the commit-and-open sigma protocol (circular
//! Fiat–Shamir), behind one interface.

use std::fmt::Debug;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use thiserror::Error;

use crate::random_oracle::{framed, RandomOracle};
use crate::ring::{hash_to_ring, Poly};
use crate::rpsf::{
    rpsf_eval, rpsf_keygen, rpsf_sample_pre, DomainElement, RpsfError, RpsfParams, RpsfPublicKey,
    RpsfSecretKey,
};
use crate::sigma::{
    decode_exchange, encode_exchange, sigma_commit, sigma_gen, sigma_respond, sigma_simulate,
    sigma_verify, Challenge, CnoCommitment, CnoResponse, Reader, SigmaError, SigmaInstance,
    SigmaWitness,
};

/// Domain tag of the hash-and-sign target.
pub const RPSF_SIGN_TAG: &[u8] = b"RPSF-RS";

/// Domain tag of the circular challenge chain.
pub const AOS_SIGN_TAG: &[u8] = b"AOS-RS";

/// Default salt length in bits.
pub const DEFAULT_SALT_BITS: usize = 128;

/// Signing attempts before giving up on an in-domain preimage.
pub const MAX_SIGN_ATTEMPTS: usize = 64;

/// Errors from key handling, signing and decoding.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RingSigError {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("signer's public key is not in the ring")]
    SignerNotInRing,
    #[error("no in-domain signature after {attempts} attempts")]
    RetriesExhausted { attempts: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed encoding")]
    Format,
    #[error(transparent)]
    Rpsf(#[from] RpsfError),
    #[error(transparent)]
    Sigma(#[from] SigmaError),
}

/// A public key with a canonical byte encoding.
pub trait RingKey: Clone + Eq + Debug {
    fn key_bytes(&self) -> Vec<u8>;
}

impl RingKey for RpsfPublicKey {
    fn key_bytes(&self) -> Vec<u8> {
        self.to_bytes()
    }
}

impl RingKey for SigmaInstance {
    fn key_bytes(&self) -> Vec<u8> {
        self.to_bytes()
    }
}

/// A set of public keys in canonical order: sorted by encoding, deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ring<K> {
    keys: Vec<K>,
}

impl<K: RingKey> Ring<K> {
    /// Canonicalizes `keys`; the result must hold between 1 and `kappa` keys.
    pub fn new(keys: Vec<K>, kappa: usize) -> Result<Self, RingSigError> {
        let mut tagged: Vec<(Vec<u8>, K)> = keys.into_iter().map(|k| (k.key_bytes(), k)).collect();
        tagged.sort_by(|a, b| a.0.cmp(&b.0));
        tagged.dedup_by(|a, b| a.0 == b.0);
        if tagged.is_empty() {
            return Err(RingSigError::InvalidRing("empty ring".into()));
        }
        if tagged.len() > kappa {
            return Err(RingSigError::InvalidRing(format!(
                "{} keys exceed the maximum {kappa}",
                tagged.len()
            )));
        }
        Ok(Ring {
            keys: tagged.into_iter().map(|(_, k)| k).collect(),
        })
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Position of `key` in canonical order.
    pub fn position(&self, key: &K) -> Option<usize> {
        self.keys.iter().position(|k| k == key)
    }

    /// Whether every key of `self` is in `other`.
    pub fn is_subset_of(&self, other: &Ring<K>) -> bool {
        self.keys.iter().all(|k| other.keys.contains(k))
    }

    /// `N ‖ (len ‖ key)*` with u16 little-endian counts.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = (self.keys.len() as u16).to_le_bytes().to_vec();
        for k in &self.keys {
            let b = k.key_bytes();
            out.extend_from_slice(&(b.len() as u16).to_le_bytes());
            out.extend(b);
        }
        out
    }
}

/// Common interface of both constructions.
pub trait RingSignatureScheme {
    type PublicKey: RingKey;
    type SecretKey: Clone + Debug;
    type Signature: Clone + Eq + Debug;

    /// Largest admissible ring.
    fn kappa(&self) -> usize;

    fn keygen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Self::PublicKey, Self::SecretKey), RingSigError>;

    /// μ(sk).
    fn public_key(&self, sk: &Self::SecretKey) -> Self::PublicKey;

    fn sign<R: Rng + ?Sized>(
        &self,
        sk: &Self::SecretKey,
        ring: &Ring<Self::PublicKey>,
        message: &[u8],
        rng: &mut R,
    ) -> Result<Self::Signature, RingSigError>;

    fn verify(&self, ring: &Ring<Self::PublicKey>, message: &[u8], sig: &Self::Signature) -> bool;
}

/// Salted hash-and-sign signature (salt, d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RpsfRingSignature {
    pub salt: Vec<u8>,
    pub d: DomainElement,
}

impl RpsfRingSignature {
    /// `salt_len u16 ‖ salt ‖ d`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = (self.salt.len() as u16).to_le_bytes().to_vec();
        out.extend_from_slice(&self.salt);
        out.extend(self.d.to_bytes());
        out
    }

    /// Parses [`RpsfRingSignature::to_bytes`] output; trailing bytes are rejected.
    pub fn from_bytes(params: &RpsfParams, bytes: &[u8]) -> Result<Self, RingSigError> {
        let mut r = Reader(bytes);
        let len = r.u16().map_err(|_| RingSigError::Format)? as usize;
        let salt = r.take(len).map_err(|_| RingSigError::Format)?.to_vec();
        let (d, rest) = DomainElement::from_bytes(params.ring, r.0).map_err(|_| RingSigError::Format)?;
        if !rest.is_empty() {
            return Err(RingSigError::Format);
        }
        Ok(RpsfRingSignature { salt, d })
    }
}

/// Hash-and-sign over the preimage-sampleable function.
#[derive(Debug, Clone, PartialEq)]
pub struct RpsfScheme {
    pub params: RpsfParams,
    salt_bits: usize,
}

impl RpsfScheme {
    /// `salt_bits` must be a multiple of 8; zero disables salting.
    pub fn new(params: RpsfParams, salt_bits: usize) -> Result<Self, RingSigError> {
        if !salt_bits.is_multiple_of(8) || salt_bits > 8 * u16::MAX as usize {
            return Err(RingSigError::InvalidConfig(format!(
                "salt length {salt_bits} is not a whole number of bytes"
            )));
        }
        Ok(RpsfScheme { params, salt_bits })
    }

    pub fn salt_bits(&self) -> usize {
        self.salt_bits
    }

    /// hash_to_ring(RPSF_SIGN_TAG, ring ‖ salt ‖ m).
    pub fn target(&self, ring: &Ring<RpsfPublicKey>, salt: &[u8], message: &[u8]) -> Poly {
        let mut input = ring.to_bytes();
        input.extend_from_slice(&(salt.len() as u16).to_le_bytes());
        input.extend_from_slice(salt);
        input.extend_from_slice(message);
        hash_to_ring(RPSF_SIGN_TAG, &input, self.params.ring)
    }
}

impl RingSignatureScheme for RpsfScheme {
    type PublicKey = RpsfPublicKey;
    type SecretKey = RpsfSecretKey;
    type Signature = RpsfRingSignature;

    fn kappa(&self) -> usize {
        self.params.kappa
    }

    fn keygen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(RpsfPublicKey, RpsfSecretKey), RingSigError> {
        Ok(rpsf_keygen(&self.params, rng)?)
    }

    fn public_key(&self, sk: &RpsfSecretKey) -> RpsfPublicKey {
        sk.public_key().clone()
    }

    /// Draws a fresh salt and a preimage of its target, retrying with a new
    /// salt while the preimage falls outside the domain.
    fn sign<R: Rng + ?Sized>(
        &self,
        sk: &RpsfSecretKey,
        ring: &Ring<RpsfPublicKey>,
        message: &[u8],
        rng: &mut R,
    ) -> Result<RpsfRingSignature, RingSigError> {
        if ring.position(sk.public_key()).is_none() {
            return Err(RingSigError::SignerNotInRing);
        }
        for _ in 0..MAX_SIGN_ATTEMPTS {
            let mut salt = vec![0u8; self.salt_bits / 8];
            rng.fill_bytes(&mut salt);
            let target = self.target(ring, &salt, message);
            let d = rpsf_sample_pre(ring.keys(), sk, &target, &self.params, rng)?;
            if d.in_domain(&self.params) {
                return Ok(RpsfRingSignature { salt, d });
            }
        }
        Err(RingSigError::RetriesExhausted {
            attempts: MAX_SIGN_ATTEMPTS,
        })
    }

    /// Accepts iff ‖d‖ ≤ β and f_ρ(d) equals the salted target.
    fn verify(&self, ring: &Ring<RpsfPublicKey>, message: &[u8], sig: &RpsfRingSignature) -> bool {
        if ring.len() > self.params.kappa
            || sig.salt.len() * 8 != self.salt_bits
            || sig.d.polys().len() != ring.len() + 1
            || !sig.d.in_domain(&self.params)
        {
            return false;
        }
        match rpsf_eval(ring.keys(), &sig.d) {
            Ok(image) => image == self.target(ring, &sig.salt, message),
            Err(_) => false,
        }
    }
}

/// Secret key of the circular scheme: an instance and its coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AosSecretKey {
    pub instance: SigmaInstance,
    pub witness: SigmaWitness,
}

/// One (commitment, response) pair per ring slot, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AosSignature {
    pub parts: Vec<(CnoCommitment, CnoResponse)>,
}

impl AosSignature {
    /// `N ‖ exchange*`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = (self.parts.len() as u16).to_le_bytes().to_vec();
        for (com, rsp) in &self.parts {
            encode_exchange(com, rsp, &mut out);
        }
        out
    }

    /// Parses [`AosSignature::to_bytes`] output; trailing bytes are rejected.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, RingSigError> {
        let mut r = Reader(bytes);
        let n = r.u16().map_err(|_| RingSigError::Format)? as usize;
        let mut parts = Vec::with_capacity(n);
        for _ in 0..n {
            parts.push(decode_exchange(&mut r).map_err(|_| RingSigError::Format)?);
        }
        if !r.0.is_empty() {
            return Err(RingSigError::Format);
        }
        Ok(AosSignature { parts })
    }
}

/// Maps a hash output to an edge: y read big-endian, reduced mod |E|.
/// Also returns γ_cl = ⌈2^256/|E|⌉, the largest preimage class size.
pub fn challenge_map(y: &[u8; 32], inst: &SigmaInstance) -> (Challenge, BigUint) {
    let e = BigUint::from(inst.edges().len());
    let idx = (BigUint::from_bytes_be(y) % &e).to_usize().expect("below |E|");
    let space = BigUint::one() << 256u32;
    let gamma_cl = (&space + &e - BigUint::one()) / &e;
    (Challenge(idx), gamma_cl)
}

/// Circular Fiat–Shamir over the commit-and-open protocol.
#[derive(Debug, Clone)]
pub struct AosScheme<O> {
    oracle: O,
    pub vertices: u16,
    pub edge_density: f64,
    pub lambda_r: u16,
    pub kappa: usize,
}

impl<O: RandomOracle> AosScheme<O> {
    /// Keys are planted 3-colorable graphs on `vertices` vertices.
    pub fn new(oracle: O, vertices: u16, edge_density: f64, lambda_r: u16, kappa: usize) -> Self {
        AosScheme {
            oracle,
            vertices,
            edge_density,
            lambda_r,
            kappa,
        }
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    /// ch_j = γ(H(j, ρ, com_{j−1}, m)) for the 1-based slot j.
    pub fn challenge(
        &self,
        ring: &Ring<SigmaInstance>,
        j: usize,
        prev: &CnoCommitment,
        message: &[u8],
    ) -> Challenge {
        let mut payload = (j as u16).to_le_bytes().to_vec();
        payload.extend(ring.to_bytes());
        payload.extend_from_slice(&(prev.y.len() as u16).to_le_bytes());
        payload.extend(prev.to_bytes());
        payload.extend_from_slice(message);
        let y = self.oracle.hash(&framed(AOS_SIGN_TAG, &payload));
        challenge_map(&y, &ring.keys()[j - 1]).0
    }

    /// All N challenges as verification recomputes them.
    pub fn recompute_challenges(
        &self,
        ring: &Ring<SigmaInstance>,
        message: &[u8],
        sig: &AosSignature,
    ) -> Vec<Challenge> {
        let n = sig.parts.len();
        (1..=n)
            .map(|j| {
                let prev = if j == 1 { n } else { j - 1 };
                self.challenge(ring, j, &sig.parts[prev - 1].0, message)
            })
            .collect()
    }
}

impl<O: RandomOracle> RingSignatureScheme for AosScheme<O> {
    type PublicKey = SigmaInstance;
    type SecretKey = AosSecretKey;
    type Signature = AosSignature;

    fn kappa(&self) -> usize {
        self.kappa
    }

    fn keygen<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(SigmaInstance, AosSecretKey), RingSigError> {
        let (instance, witness) = loop {
            match sigma_gen(self.vertices, self.edge_density, self.lambda_r, rng) {
                Err(SigmaError::DegenerateGraph) => continue,
                other => break other?,
            }
        };
        Ok((instance.clone(), AosSecretKey { instance, witness }))
    }

    fn public_key(&self, sk: &AosSecretKey) -> SigmaInstance {
        sk.instance.clone()
    }

    /// Commits at the signer slot i, simulates slots i+1, …, i−1 (mod N)
    /// from their chained challenges, then answers ch_i honestly.
    fn sign<R: Rng + ?Sized>(
        &self,
        sk: &AosSecretKey,
        ring: &Ring<SigmaInstance>,
        message: &[u8],
        rng: &mut R,
    ) -> Result<AosSignature, RingSigError> {
        let n = ring.len();
        let i = ring.position(&sk.instance).ok_or(RingSigError::SignerNotInRing)? + 1;
        if !sk.witness.is_proper_for(&sk.instance) {
            return Err(RingSigError::SignerNotInRing);
        }
        let mut parts: Vec<Option<(CnoCommitment, CnoResponse)>> = vec![None; n];
        let (com_i, state) = sigma_commit(&sk.instance, &sk.witness, rng, &self.oracle);
        let mut prev = com_i.clone();
        let mut j = i % n + 1;
        while j != i {
            let ch = self.challenge(ring, j, &prev, message);
            let (com, rsp) = sigma_simulate(&ring.keys()[j - 1], ch, rng, &self.oracle);
            prev = com.clone();
            parts[j - 1] = Some((com, rsp));
            j = j % n + 1;
        }
        let ch_i = self.challenge(ring, i, &prev, message);
        let rsp_i = sigma_respond(&sk.instance, &state, ch_i);
        parts[i - 1] = Some((com_i, rsp_i));
        Ok(AosSignature {
            parts: parts.into_iter().map(|p| p.expect("every slot filled")).collect(),
        })
    }

    fn verify(&self, ring: &Ring<SigmaInstance>, message: &[u8], sig: &AosSignature) -> bool {
        if sig.parts.len() != ring.len() || ring.len() > self.kappa {
            return false;
        }
        if sig
            .parts
            .iter()
            .zip(ring.keys())
            .any(|((com, _), inst)| com.y.len() != inst.vertices())
        {
            return false;
        }
        let chs = self.recompute_challenges(ring, message, sig);
        sig.parts
            .iter()
            .zip(ring.keys())
            .zip(chs)
            .all(|(((com, rsp), inst), ch)| sigma_verify(inst, com, ch, rsp, &self.oracle))
    }
}
