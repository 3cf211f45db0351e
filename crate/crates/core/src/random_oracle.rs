//! Hash functions modelled as random oracles, plus a recording wrapper that
//! lets experiments inspect every query an adversary or signer made.

use std::cell::RefCell;

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

/// Leading byte of every oracle input, distinct from `hash_to_ring`'s.
pub const ORACLE_DOMAIN: u8 = 0x02;

/// A 256-bit random oracle.
pub trait RandomOracle {
    fn hash(&self, input: &[u8]) -> [u8; 32];
}

impl<O: RandomOracle + ?Sized> RandomOracle for &O {
    fn hash(&self, input: &[u8]) -> [u8; 32] {
        (**self).hash(input)
    }
}

/// SHAKE256 over `ORACLE_DOMAIN ‖ input`, truncated to 32 bytes.
#[derive(Debug, Clone, Copy, Default)]
pub struct Shake256Oracle;

impl RandomOracle for Shake256Oracle {
    fn hash(&self, input: &[u8]) -> [u8; 32] {
        let mut xof = Shake256::default();
        xof.update(&[ORACLE_DOMAIN]);
        xof.update(input);
        let mut out = [0u8; 32];
        xof.finalize_xof().read(&mut out);
        out
    }
}

/// Frames `payload` under a domain tag: `len(tag) as u16 LE ‖ tag ‖ payload`.
pub fn framed(tag: &[u8], payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 + tag.len() + payload.len());
    out.extend_from_slice(&(tag.len() as u16).to_le_bytes());
    out.extend_from_slice(tag);
    out.extend_from_slice(payload);
    out
}

/// Splits a framed input back into `(tag, payload)`.
pub fn unframe(input: &[u8]) -> Option<(&[u8], &[u8])> {
    let len = u16::from_le_bytes([*input.first()?, *input.get(1)?]) as usize;
    let tag = input.get(2..2 + len)?;
    Some((tag, &input[2 + len..]))
}

/// One recorded oracle call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub input: Vec<u8>,
    pub output: [u8; 32],
}

/// Wraps an oracle and records every query in order.
#[derive(Debug, Default)]
pub struct RecordingOracle<O> {
    inner: O,
    log: RefCell<Vec<Query>>,
}

impl<O: RandomOracle> RecordingOracle<O> {
    pub fn new(inner: O) -> Self {
        RecordingOracle {
            inner,
            log: RefCell::new(Vec::new()),
        }
    }

    /// All queries so far, in call order.
    pub fn queries(&self) -> Vec<Query> {
        self.log.borrow().clone()
    }

    /// Number of queries so far.
    pub fn query_count(&self) -> usize {
        self.log.borrow().len()
    }

    /// Distinct recorded inputs that hashed to `output`, in first-seen order.
    pub fn preimages(&self, output: &[u8; 32]) -> Vec<Vec<u8>> {
        let mut seen: Vec<Vec<u8>> = Vec::new();
        for q in self.log.borrow().iter() {
            if &q.output == output && !seen.contains(&q.input) {
                seen.push(q.input.clone());
            }
        }
        seen
    }
}

impl<O: RandomOracle> RandomOracle for RecordingOracle<O> {
    fn hash(&self, input: &[u8]) -> [u8; 32] {
        let output = self.inner.hash(input);
        self.log.borrow_mut().push(Query {
            input: input.to_vec(),
            output,
        });
        output
    }
}
