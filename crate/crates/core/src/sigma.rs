//! Commit-and-open sigma protocol for graph 3-coloring.
//!
//! The prover permutes its coloring, commits to every vertex as
//! y_i = H(i ‖ color_i ‖ rand_i), and opens the two endpoints of the
//! challenged edge. The extractor accepts a full set of openings that forms
//! a proper coloring, so the extraction family is {E} and sz_triv = |E| − 1.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::random_oracle::{framed, unframe, RandomOracle};

/// Domain tag of commitment hashes.
pub const COMMIT_TAG: &[u8] = b"AOS-CO";

/// Default commitment randomness length in bits.
pub const DEFAULT_LAMBDA_R: u16 = 128;

/// The six ordered pairs of distinct colors.
pub const DISTINCT_COLOR_PAIRS: [(u8, u8); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

const PERMUTATIONS: [[u8; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Errors from instance handling and extraction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SigmaError {
    #[error("graph has no edges")]
    DegenerateGraph,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("extraction failed: {0}")]
    ExtractFail(String),
    #[error("malformed encoding")]
    Format,
}

/// A graph together with the commitment randomness length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SigmaInstance {
    vertices: u16,
    edges: Vec<(u16, u16)>,
    lambda_r: u16,
}

impl SigmaInstance {
    /// Validates: u < v < V on every edge, no duplicates, at least one edge,
    /// and λ_r a positive multiple of 8.
    pub fn new(vertices: u16, edges: Vec<(u16, u16)>, lambda_r: u16) -> Result<Self, SigmaError> {
        if edges.is_empty() {
            return Err(SigmaError::DegenerateGraph);
        }
        if lambda_r == 0 || !lambda_r.is_multiple_of(8) {
            return Err(SigmaError::InvalidInstance(format!(
                "lambda_r = {lambda_r} must be a positive multiple of 8"
            )));
        }
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if u >= v || v >= vertices {
                return Err(SigmaError::InvalidInstance(format!("bad edge ({u}, {v})")));
            }
            if !seen.insert((u, v)) {
                return Err(SigmaError::InvalidInstance(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(SigmaInstance {
            vertices,
            edges,
            lambda_r,
        })
    }

    pub fn vertices(&self) -> usize {
        self.vertices as usize
    }

    pub fn edges(&self) -> &[(u16, u16)] {
        &self.edges
    }

    /// Commitment randomness length in bits.
    pub fn lambda_r(&self) -> u16 {
        self.lambda_r
    }

    fn rand_len(&self) -> usize {
        self.lambda_r as usize / 8
    }

    /// `V ‖ λ_r ‖ |E| ‖ edges`, all little-endian u16.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(6 + 4 * self.edges.len());
        out.extend_from_slice(&self.vertices.to_le_bytes());
        out.extend_from_slice(&self.lambda_r.to_le_bytes());
        out.extend_from_slice(&(self.edges.len() as u16).to_le_bytes());
        for &(u, v) in &self.edges {
            out.extend_from_slice(&u.to_le_bytes());
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Parses [`SigmaInstance::to_bytes`] output; returns the remainder.
    pub fn from_bytes(bytes: &[u8]) -> Result<(Self, &[u8]), SigmaError> {
        let mut r = Reader(bytes);
        let vertices = r.u16()?;
        let lambda_r = r.u16()?;
        let count = r.u16()? as usize;
        let mut edges = Vec::with_capacity(count);
        for _ in 0..count {
            edges.push((r.u16()?, r.u16()?));
        }
        Ok((SigmaInstance::new(vertices, edges, lambda_r)?, r.0))
    }
}

pub(crate) struct Reader<'a>(pub(crate) &'a [u8]);

impl<'a> Reader<'a> {
    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], SigmaError> {
        if self.0.len() < n {
            return Err(SigmaError::Format);
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }

    pub(crate) fn u8(&mut self) -> Result<u8, SigmaError> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16, SigmaError> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }
}

/// A 3-coloring of the vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaWitness {
    coloring: Vec<u8>,
}

impl SigmaWitness {
    /// Wraps a coloring; entries must lie in {0, 1, 2}.
    pub fn new(coloring: Vec<u8>) -> Result<Self, SigmaError> {
        if coloring.iter().any(|&c| c > 2) {
            return Err(SigmaError::InvalidInstance("color outside {0,1,2}".into()));
        }
        Ok(SigmaWitness { coloring })
    }

    pub fn coloring(&self) -> &[u8] {
        &self.coloring
    }

    /// Every edge joins differently colored vertices.
    pub fn is_proper_for(&self, inst: &SigmaInstance) -> bool {
        self.coloring.len() == inst.vertices()
            && inst
                .edges
                .iter()
                .all(|&(u, v)| self.coloring[u as usize] != self.coloring[v as usize])
    }
}

/// One committed message m_i = (i, color, randomness).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpenedMessage {
    pub index: u16,
    pub color: u8,
    pub rand: Vec<u8>,
}

impl OpenedMessage {
    /// Oracle input `framed(COMMIT_TAG, i ‖ color ‖ rand)`.
    pub fn oracle_input(&self) -> Vec<u8> {
        let mut payload = Vec::with_capacity(3 + self.rand.len());
        payload.extend_from_slice(&self.index.to_le_bytes());
        payload.push(self.color);
        payload.extend_from_slice(&self.rand);
        framed(COMMIT_TAG, &payload)
    }

    /// Inverse of [`OpenedMessage::oracle_input`].
    pub fn from_oracle_input(input: &[u8]) -> Option<Self> {
        let (tag, payload) = unframe(input)?;
        if tag != COMMIT_TAG || payload.len() < 3 {
            return None;
        }
        Some(OpenedMessage {
            index: u16::from_le_bytes([payload[0], payload[1]]),
            color: payload[2],
            rand: payload[3..].to_vec(),
        })
    }

    /// y = H(m).
    pub fn commit<O: RandomOracle + ?Sized>(&self, oracle: &O) -> [u8; 32] {
        oracle.hash(&self.oracle_input())
    }
}

/// First message: one hash per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnoCommitment {
    pub y: Vec<[u8; 32]>,
}

impl CnoCommitment {
    /// Concatenated commitments.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.y.iter().flatten().copied().collect()
    }
}

/// Openings of the challenged vertices, sorted by index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnoResponse {
    pub opened: Vec<OpenedMessage>,
}

/// Index of the challenged edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Challenge(pub usize);

/// Prover state between commit and respond.
#[derive(Debug, Clone)]
pub struct ProverState {
    messages: Vec<OpenedMessage>,
}

impl ProverState {
    /// All committed messages, one per vertex.
    pub fn messages(&self) -> &[OpenedMessage] {
        &self.messages
    }
}

/// Generates a graph with a planted 3-coloring. Colors are assigned
/// round-robin and shuffled; each bichromatic pair becomes an edge with
/// probability `edge_density`.
pub fn sigma_gen<R: Rng + ?Sized>(
    vertices: u16,
    edge_density: f64,
    lambda_r: u16,
    rng: &mut R,
) -> Result<(SigmaInstance, SigmaWitness), SigmaError> {
    if vertices < 3 {
        return Err(SigmaError::InvalidInstance("need at least 3 vertices".into()));
    }
    if !(0.0..=1.0).contains(&edge_density) {
        return Err(SigmaError::InvalidInstance("edge density outside [0, 1]".into()));
    }
    let mut coloring: Vec<u8> = (0..vertices).map(|i| (i % 3) as u8).collect();
    coloring.shuffle(rng);
    let mut edges = Vec::new();
    for u in 0..vertices {
        for v in u + 1..vertices {
            if coloring[u as usize] != coloring[v as usize] && rng.random_bool(edge_density) {
                edges.push((u, v));
            }
        }
    }
    let inst = SigmaInstance::new(vertices, edges, lambda_r)?;
    Ok((inst, SigmaWitness { coloring }))
}

fn fresh_rand<R: Rng + ?Sized>(inst: &SigmaInstance, rng: &mut R) -> Vec<u8> {
    let mut r = vec![0u8; inst.rand_len()];
    rng.fill_bytes(&mut r);
    r
}

fn commit_all<O: RandomOracle + ?Sized>(messages: &[OpenedMessage], oracle: &O) -> CnoCommitment {
    CnoCommitment {
        y: messages.iter().map(|m| m.commit(oracle)).collect(),
    }
}

/// Commits to a uniformly permuted copy of the witness coloring.
pub fn sigma_commit<R: Rng + ?Sized, O: RandomOracle + ?Sized>(
    inst: &SigmaInstance,
    w: &SigmaWitness,
    rng: &mut R,
    oracle: &O,
) -> (CnoCommitment, ProverState) {
    let perm = PERMUTATIONS[rng.random_range(0..6)];
    commit_with_permutation(inst, w, perm, rng, oracle)
}

fn commit_with_permutation<R: Rng + ?Sized, O: RandomOracle + ?Sized>(
    inst: &SigmaInstance,
    w: &SigmaWitness,
    perm: [u8; 3],
    rng: &mut R,
    oracle: &O,
) -> (CnoCommitment, ProverState) {
    let messages: Vec<OpenedMessage> = w
        .coloring
        .iter()
        .enumerate()
        .map(|(i, &c)| OpenedMessage {
            index: i as u16,
            color: perm[c as usize],
            rand: fresh_rand(inst, rng),
        })
        .collect();
    (commit_all(&messages, oracle), ProverState { messages })
}

/// Opens the endpoints of the challenged edge.
pub fn sigma_respond(inst: &SigmaInstance, state: &ProverState, ch: Challenge) -> CnoResponse {
    let (u, v) = inst.edges[ch.0];
    CnoResponse {
        opened: vec![
            state.messages[u as usize].clone(),
            state.messages[v as usize].clone(),
        ],
    }
}

/// Accepts iff the response opens exactly the challenged endpoints, both
/// openings re-hash to their commitments, and the colors are distinct
/// elements of {0, 1, 2}.
pub fn sigma_verify<O: RandomOracle + ?Sized>(
    inst: &SigmaInstance,
    com: &CnoCommitment,
    ch: Challenge,
    rsp: &CnoResponse,
    oracle: &O,
) -> bool {
    let Some(&(u, v)) = inst.edges.get(ch.0) else {
        return false;
    };
    if com.y.len() != inst.vertices() || rsp.opened.len() != 2 {
        return false;
    }
    let (a, b) = (&rsp.opened[0], &rsp.opened[1]);
    if a.index != u || b.index != v {
        return false;
    }
    if a.color > 2 || b.color > 2 || a.color == b.color {
        return false;
    }
    if a.rand.len() != inst.rand_len() || b.rand.len() != inst.rand_len() {
        return false;
    }
    a.commit(oracle) == com.y[u as usize] && b.commit(oracle) == com.y[v as usize]
}

/// Honest-verifier simulator: a uniform ordered pair of distinct colors on
/// the challenged edge and uniform colors elsewhere, all freshly committed.
pub fn sigma_simulate<R: Rng + ?Sized, O: RandomOracle + ?Sized>(
    inst: &SigmaInstance,
    ch: Challenge,
    rng: &mut R,
    oracle: &O,
) -> (CnoCommitment, CnoResponse) {
    let pair = DISTINCT_COLOR_PAIRS[rng.random_range(0..6)];
    simulate_with_pair(inst, ch, pair, rng, oracle)
}

/// Simulator with the opened color pair fixed by the caller.
pub fn simulate_with_pair<R: Rng + ?Sized, O: RandomOracle + ?Sized>(
    inst: &SigmaInstance,
    ch: Challenge,
    pair: (u8, u8),
    rng: &mut R,
    oracle: &O,
) -> (CnoCommitment, CnoResponse) {
    let (u, v) = inst.edges[ch.0];
    let messages: Vec<OpenedMessage> = (0..inst.vertices)
        .map(|i| {
            let color = if i == u {
                pair.0
            } else if i == v {
                pair.1
            } else {
                rng.random_range(0..3)
            };
            OpenedMessage {
                index: i,
                color,
                rand: fresh_rand(inst, rng),
            }
        })
        .collect();
    let com = commit_all(&messages, oracle);
    let rsp = CnoResponse {
        opened: vec![messages[u as usize].clone(), messages[v as usize].clone()],
    };
    (com, rsp)
}

/// Reads a coloring from one message per vertex. Succeeds only when every
/// position is present, each message sits at its own index, and the
/// coloring is proper, i.e. the openings satisfy the verifier on all edges.
pub fn sigma_extract(
    inst: &SigmaInstance,
    messages: &[Option<OpenedMessage>],
) -> Result<SigmaWitness, SigmaError> {
    if messages.len() != inst.vertices() {
        return Err(SigmaError::ExtractFail(format!(
            "{} messages for {} vertices",
            messages.len(),
            inst.vertices()
        )));
    }
    let mut coloring = Vec::with_capacity(messages.len());
    for (i, m) in messages.iter().enumerate() {
        let m = m
            .as_ref()
            .ok_or_else(|| SigmaError::ExtractFail(format!("no opening for vertex {i}")))?;
        if m.index as usize != i || m.color > 2 {
            return Err(SigmaError::ExtractFail(format!("malformed opening at {i}")));
        }
        coloring.push(m.color);
    }
    let w = SigmaWitness { coloring };
    if !w.is_proper_for(inst) {
        return Err(SigmaError::ExtractFail("openings violate an edge".into()));
    }
    Ok(w)
}

/// sz_triv = |E| − 1 for the extraction family {E}.
pub fn sz_triv(inst: &SigmaInstance) -> usize {
    inst.edges.len() - 1
}

/// `V ‖ |E| ‖ edges ‖ commitments ‖ count ‖ (index, color, rand)*`.
pub fn encode_transcript(inst: &SigmaInstance, com: &CnoCommitment, rsp: &CnoResponse) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&inst.vertices.to_le_bytes());
    out.extend_from_slice(&(inst.edges.len() as u16).to_le_bytes());
    for &(u, v) in &inst.edges {
        out.extend_from_slice(&u.to_le_bytes());
        out.extend_from_slice(&v.to_le_bytes());
    }
    encode_exchange(com, rsp, &mut out);
    out
}

/// Appends `commitments ‖ count ‖ (index, color, rand)*`.
pub(crate) fn encode_exchange(com: &CnoCommitment, rsp: &CnoResponse, out: &mut Vec<u8>) {
    out.extend_from_slice(&(com.y.len() as u16).to_le_bytes());
    out.extend(com.to_bytes());
    out.push(rsp.opened.len() as u8);
    for m in &rsp.opened {
        out.extend_from_slice(&m.index.to_le_bytes());
        out.push(m.color);
        out.extend_from_slice(&(m.rand.len() as u16).to_le_bytes());
        out.extend_from_slice(&m.rand);
    }
}

/// Parses output of [`encode_exchange`].
pub(crate) fn decode_exchange(r: &mut Reader<'_>) -> Result<(CnoCommitment, CnoResponse), SigmaError> {
    let count = r.u16()? as usize;
    let mut y = Vec::with_capacity(count);
    for _ in 0..count {
        y.push(r.take(32)?.try_into().expect("32 bytes"));
    }
    let opened_count = r.u8()? as usize;
    let mut opened = Vec::with_capacity(opened_count);
    for _ in 0..opened_count {
        let index = r.u16()?;
        let color = r.u8()?;
        let len = r.u16()? as usize;
        opened.push(OpenedMessage {
            index,
            color,
            rand: r.take(len)?.to_vec(),
        });
    }
    Ok((CnoCommitment { y }, CnoResponse { opened }))
}
