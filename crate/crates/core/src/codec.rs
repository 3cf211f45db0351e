//! Versioned binary file formats for keys and signatures.
//!
//! Every file starts with a 4-byte magic and a version byte. Lattice
//! objects follow with the `(M, q)` ring header; signatures also carry the
//! scheme parameters they were produced under, so a verifier holding
//! different parameters rejects them before parsing the body.
//!
//! | magic  | content                                   |
//! |--------|-------------------------------------------|
//! | `RFPK` | lattice public key: header, h             |
//! | `RFSK` | lattice trapdoor: header, f, g, F, G (i32)|
//! | `RFAP` | commit-and-open public key: instance      |
//! | `RFAK` | commit-and-open secret key: instance, coloring |
//! | `RFS1` | lattice ring signature                    |
//! | `RFA1` | commit-and-open ring signature            |

use thiserror::Error;

use crate::ntru::NtruTrapdoor;
use crate::ring::{Poly, RingParams};
use crate::ringsig::{AosScheme, AosSecretKey, AosSignature, RpsfRingSignature, RpsfScheme};
use crate::rpsf::{RpsfPublicKey, RpsfSecretKey};
use crate::sigma::{SigmaInstance, SigmaWitness};

pub const FORMAT_VERSION: u8 = 1;
pub const MAGIC_RPSF_PK: &[u8; 4] = b"RFPK";
pub const MAGIC_RPSF_SK: &[u8; 4] = b"RFSK";
pub const MAGIC_AOS_PK: &[u8; 4] = b"RFAP";
pub const MAGIC_AOS_SK: &[u8; 4] = b"RFAK";
pub const MAGIC_RPSF_SIG: &[u8; 4] = b"RFS1";
pub const MAGIC_AOS_SIG: &[u8; 4] = b"RFA1";

/// Decoding failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("malformed {0}")]
    Format(&'static str),
    #[error("file was produced under different parameters: {0}")]
    ParamMismatch(String),
}

fn header(magic: &[u8; 4]) -> Vec<u8> {
    let mut out = magic.to_vec();
    out.push(FORMAT_VERSION);
    out
}

fn strip_header<'a>(magic: &[u8; 4], bytes: &'a [u8]) -> Result<&'a [u8], CodecError> {
    if bytes.len() < 5 || &bytes[..4] != magic {
        return Err(CodecError::BadMagic {
            expected: String::from_utf8_lossy(magic).into_owned(),
            found: String::from_utf8_lossy(&bytes[..bytes.len().min(4)]).into_owned(),
        });
    }
    if bytes[4] != FORMAT_VERSION {
        return Err(CodecError::UnsupportedVersion(bytes[4]));
    }
    Ok(&bytes[5..])
}

fn finish<T>(value: T, rest: &[u8], what: &'static str) -> Result<T, CodecError> {
    if rest.is_empty() {
        Ok(value)
    } else {
        Err(CodecError::Format(what))
    }
}

fn take<'a>(bytes: &'a [u8], n: usize, what: &'static str) -> Result<(&'a [u8], &'a [u8]), CodecError> {
    if bytes.len() < n {
        return Err(CodecError::Format(what));
    }
    Ok(bytes.split_at(n))
}

fn read_u16<'a>(bytes: &'a [u8], what: &'static str) -> Result<(u16, &'a [u8]), CodecError> {
    let (b, rest) = take(bytes, 2, what)?;
    Ok((u16::from_le_bytes([b[0], b[1]]), rest))
}

fn read_f64<'a>(bytes: &'a [u8], what: &'static str) -> Result<(f64, &'a [u8]), CodecError> {
    let (b, rest) = take(bytes, 8, what)?;
    Ok((f64::from_le_bytes(b.try_into().expect("8 bytes")), rest))
}

fn read_ring<'a>(bytes: &'a [u8], what: &'static str) -> Result<(RingParams, &'a [u8]), CodecError> {
    RingParams::read_header(bytes).map_err(|_| CodecError::Format(what))
}

/// `RFPK ‖ v ‖ (M, q) ‖ h`.
pub fn encode_rpsf_public_key(pk: &RpsfPublicKey) -> Vec<u8> {
    let mut out = header(MAGIC_RPSF_PK);
    pk.h().params().write_header(&mut out);
    out.extend(pk.to_bytes());
    out
}

pub fn decode_rpsf_public_key(bytes: &[u8]) -> Result<RpsfPublicKey, CodecError> {
    const WHAT: &str = "lattice public key";
    let (ring, rest) = read_ring(strip_header(MAGIC_RPSF_PK, bytes)?, WHAT)?;
    let (h, rest) = Poly::from_bytes(ring, rest).map_err(|_| CodecError::Format(WHAT))?;
    let pk = RpsfPublicKey::new(h).map_err(|_| CodecError::Format(WHAT))?;
    finish(pk, rest, WHAT)
}

/// `RFSK ‖ v ‖ (M, q) ‖ f ‖ g ‖ F ‖ G`, coefficients as little-endian i32.
/// Gram–Schmidt data is recomputed on load.
pub fn encode_rpsf_secret_key(sk: &RpsfSecretKey) -> Vec<u8> {
    let td = sk.trapdoor();
    let mut out = header(MAGIC_RPSF_SK);
    td.params().write_header(&mut out);
    for poly in [td.f(), td.g(), td.big_f(), td.big_g()] {
        for &c in poly {
            out.extend_from_slice(&(c as i32).to_le_bytes());
        }
    }
    out
}

pub fn decode_rpsf_secret_key(bytes: &[u8]) -> Result<RpsfSecretKey, CodecError> {
    const WHAT: &str = "lattice secret key";
    let (ring, mut rest) = read_ring(strip_header(MAGIC_RPSF_SK, bytes)?, WHAT)?;
    let m = ring.degree();
    let mut polys = Vec::with_capacity(4);
    for _ in 0..4 {
        let (block, r) = take(rest, 4 * m, WHAT)?;
        polys.push(
            block
                .chunks_exact(4)
                .map(|c| i64::from(i32::from_le_bytes(c.try_into().expect("4 bytes"))))
                .collect::<Vec<_>>(),
        );
        rest = r;
    }
    finish((), rest, WHAT)?;
    let big_g = polys.pop().expect("four blocks");
    let big_f = polys.pop().expect("four blocks");
    let g = polys.pop().expect("four blocks");
    let f = polys.pop().expect("four blocks");
    let td = NtruTrapdoor::from_parts(ring, f, g, big_f, big_g).map_err(|_| CodecError::Format(WHAT))?;
    RpsfSecretKey::from_trapdoor(td).map_err(|_| CodecError::Format(WHAT))
}

/// `RFAP ‖ v ‖ instance`.
pub fn encode_aos_public_key(inst: &SigmaInstance) -> Vec<u8> {
    let mut out = header(MAGIC_AOS_PK);
    out.extend(inst.to_bytes());
    out
}

pub fn decode_aos_public_key(bytes: &[u8]) -> Result<SigmaInstance, CodecError> {
    const WHAT: &str = "commit-and-open public key";
    let (inst, rest) =
        SigmaInstance::from_bytes(strip_header(MAGIC_AOS_PK, bytes)?).map_err(|_| CodecError::Format(WHAT))?;
    finish(inst, rest, WHAT)
}

/// `RFAK ‖ v ‖ instance ‖ coloring` with one byte per vertex.
pub fn encode_aos_secret_key(sk: &AosSecretKey) -> Vec<u8> {
    let mut out = header(MAGIC_AOS_SK);
    out.extend(sk.instance.to_bytes());
    out.extend_from_slice(sk.witness.coloring());
    out
}

pub fn decode_aos_secret_key(bytes: &[u8]) -> Result<AosSecretKey, CodecError> {
    const WHAT: &str = "commit-and-open secret key";
    let (instance, rest) =
        SigmaInstance::from_bytes(strip_header(MAGIC_AOS_SK, bytes)?).map_err(|_| CodecError::Format(WHAT))?;
    let (coloring, rest) = take(rest, instance.vertices(), WHAT)?;
    finish((), rest, WHAT)?;
    let witness = SigmaWitness::new(coloring.to_vec()).map_err(|_| CodecError::Format(WHAT))?;
    if !witness.is_proper_for(&instance) {
        return Err(CodecError::Format(WHAT));
    }
    Ok(AosSecretKey { instance, witness })
}

fn rpsf_param_header(scheme: &RpsfScheme) -> Vec<u8> {
    let p = &scheme.params;
    let mut out = Vec::new();
    p.ring.write_header(&mut out);
    out.extend_from_slice(&(p.kappa as u16).to_le_bytes());
    out.extend_from_slice(&(scheme.salt_bits() as u16).to_le_bytes());
    out.extend_from_slice(&p.s.to_le_bytes());
    out.extend_from_slice(&p.tau.to_le_bytes());
    out
}

/// `RFS1 ‖ v ‖ (M, q, κ, salt bits, s, τ) ‖ signature`.
pub fn encode_rpsf_signature(scheme: &RpsfScheme, sig: &RpsfRingSignature) -> Vec<u8> {
    let mut out = header(MAGIC_RPSF_SIG);
    out.extend(rpsf_param_header(scheme));
    out.extend(sig.to_bytes());
    out
}

pub fn decode_rpsf_signature(scheme: &RpsfScheme, bytes: &[u8]) -> Result<RpsfRingSignature, CodecError> {
    const WHAT: &str = "lattice signature";
    let body = strip_header(MAGIC_RPSF_SIG, bytes)?;
    let expected = rpsf_param_header(scheme);
    let (ring, rest) = read_ring(body, WHAT)?;
    let (kappa, rest) = read_u16(rest, WHAT)?;
    let (salt_bits, rest) = read_u16(rest, WHAT)?;
    let (s, rest) = read_f64(rest, WHAT)?;
    let (tau, rest) = read_f64(rest, WHAT)?;
    if body[..expected.len()] != expected[..] {
        return Err(CodecError::ParamMismatch(format!(
            "signature has M={} q={} kappa={kappa} salt_bits={salt_bits} s={s} tau={tau}",
            ring.degree(),
            ring.modulus()
        )));
    }
    RpsfRingSignature::from_bytes(&scheme.params, rest).map_err(|_| CodecError::Format(WHAT))
}

/// `RFA1 ‖ v ‖ (λ_r, κ) ‖ signature`.
pub fn encode_aos_signature<O>(scheme: &AosScheme<O>, sig: &AosSignature) -> Vec<u8> {
    let mut out = header(MAGIC_AOS_SIG);
    out.extend_from_slice(&scheme.lambda_r.to_le_bytes());
    out.extend_from_slice(&(scheme.kappa as u16).to_le_bytes());
    out.extend(sig.to_bytes());
    out
}

pub fn decode_aos_signature<O>(scheme: &AosScheme<O>, bytes: &[u8]) -> Result<AosSignature, CodecError> {
    const WHAT: &str = "commit-and-open signature";
    let rest = strip_header(MAGIC_AOS_SIG, bytes)?;
    let (lambda_r, rest) = read_u16(rest, WHAT)?;
    let (kappa, rest) = read_u16(rest, WHAT)?;
    if lambda_r != scheme.lambda_r || usize::from(kappa) != scheme.kappa {
        return Err(CodecError::ParamMismatch(format!(
            "signature has lambda_r={lambda_r} kappa={kappa}"
        )));
    }
    AosSignature::from_bytes(rest).map_err(|_| CodecError::Format(WHAT))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random_oracle::Shake256Oracle;
    use crate::ringsig::{Ring, RingSignatureScheme};
    use crate::rpsf::{rpsf_setup, RpsfConfig};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rpsf_scheme() -> RpsfScheme {
        RpsfScheme::new(rpsf_setup(&RpsfConfig::new(16, 12289, 3)).unwrap(), 128).unwrap()
    }

    fn aos_scheme() -> AosScheme<Shake256Oracle> {
        AosScheme::new(Shake256Oracle, 12, 0.6, 128, 3)
    }

    #[test]
    fn rpsf_files_round_trip_bit_exactly() {
        let scheme = rpsf_scheme();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (pk, sk) = scheme.keygen(&mut rng).unwrap();
        let (pk2, _) = scheme.keygen(&mut rng).unwrap();
        let pk_bytes = encode_rpsf_public_key(&pk);
        assert_eq!(decode_rpsf_public_key(&pk_bytes).unwrap(), pk);
        assert_eq!(encode_rpsf_public_key(&decode_rpsf_public_key(&pk_bytes).unwrap()), pk_bytes);
        let sk_bytes = encode_rpsf_secret_key(&sk);
        let sk_back = decode_rpsf_secret_key(&sk_bytes).unwrap();
        assert_eq!(sk_back, sk);
        assert_eq!(encode_rpsf_secret_key(&sk_back), sk_bytes);
        let ring = Ring::new(vec![pk, pk2], 3).unwrap();
        let sig = scheme.sign(&sk_back, &ring, b"m", &mut rng).unwrap();
        let sig_bytes = encode_rpsf_signature(&scheme, &sig);
        let back = decode_rpsf_signature(&scheme, &sig_bytes).unwrap();
        assert_eq!(back, sig);
        assert_eq!(encode_rpsf_signature(&scheme, &back), sig_bytes);
        assert!(scheme.verify(&ring, b"m", &back));
    }

    #[test]
    fn aos_files_round_trip_bit_exactly() {
        let scheme = aos_scheme();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (pk, sk) = scheme.keygen(&mut rng).unwrap();
        let pk_bytes = encode_aos_public_key(&pk);
        assert_eq!(decode_aos_public_key(&pk_bytes).unwrap(), pk);
        let sk_bytes = encode_aos_secret_key(&sk);
        assert_eq!(decode_aos_secret_key(&sk_bytes).unwrap(), sk);
        let ring = Ring::new(vec![pk], 3).unwrap();
        let sig = scheme.sign(&sk, &ring, b"m", &mut rng).unwrap();
        let sig_bytes = encode_aos_signature(&scheme, &sig);
        let back = decode_aos_signature(&scheme, &sig_bytes).unwrap();
        assert_eq!(back, sig);
        assert_eq!(encode_aos_signature(&scheme, &back), sig_bytes);
    }

    #[test]
    fn rejects_wrong_magic_version_and_trailing_bytes() {
        let scheme = rpsf_scheme();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (pk, sk) = scheme.keygen(&mut rng).unwrap();
        let mut bytes = encode_rpsf_secret_key(&sk);
        bytes[0] ^= 1;
        assert!(matches!(decode_rpsf_secret_key(&bytes), Err(CodecError::BadMagic { .. })));
        let mut bytes = encode_rpsf_public_key(&pk);
        bytes[4] = 9;
        assert_eq!(decode_rpsf_public_key(&bytes), Err(CodecError::UnsupportedVersion(9)));
        let mut bytes = encode_rpsf_public_key(&pk);
        bytes.push(0);
        assert!(matches!(decode_rpsf_public_key(&bytes), Err(CodecError::Format(_))));
        assert!(matches!(decode_aos_public_key(&encode_rpsf_public_key(&pk)), Err(CodecError::BadMagic { .. })));
        assert!(matches!(decode_rpsf_public_key(b"RF"), Err(CodecError::BadMagic { .. })));
    }

    #[test]
    fn corrupted_trapdoor_is_rejected() {
        let scheme = rpsf_scheme();
        let (_, sk) = scheme.keygen(&mut ChaCha20Rng::seed_from_u64(4)).unwrap();
        let mut bytes = encode_rpsf_secret_key(&sk);
        bytes[9] ^= 1;
        assert!(matches!(decode_rpsf_secret_key(&bytes), Err(CodecError::Format(_))));
    }

    #[test]
    fn improper_coloring_is_rejected() {
        let scheme = aos_scheme();
        let (_, sk) = scheme.keygen(&mut ChaCha20Rng::seed_from_u64(5)).unwrap();
        let (u, v) = sk.instance.edges()[0];
        let mut bytes = encode_aos_secret_key(&sk);
        let base = bytes.len() - sk.instance.vertices();
        bytes[base + usize::from(v)] = bytes[base + usize::from(u)];
        assert!(matches!(decode_aos_secret_key(&bytes), Err(CodecError::Format(_))));
    }

    #[test]
    fn signature_parameter_mismatch_is_reported() {
        let scheme = rpsf_scheme();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let (pk, sk) = scheme.keygen(&mut rng).unwrap();
        let ring = Ring::new(vec![pk], 3).unwrap();
        let sig = scheme.sign(&sk, &ring, b"m", &mut rng).unwrap();
        let bytes = encode_rpsf_signature(&scheme, &sig);
        let other = RpsfScheme::new(scheme.params.clone(), 64).unwrap();
        assert!(matches!(decode_rpsf_signature(&other, &bytes), Err(CodecError::ParamMismatch(_))));
        let aos = aos_scheme();
        let other = AosScheme::new(Shake256Oracle, 12, 0.6, 256, 3);
        let bytes = encode_aos_signature(&aos, &AosSignature { parts: vec![] });
        assert!(matches!(decode_aos_signature(&other, &bytes), Err(CodecError::ParamMismatch(_))));
    }

    proptest! {
        #[test]
        fn decoders_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..200), magic in 0usize..6) {
            let magics = [MAGIC_RPSF_PK, MAGIC_RPSF_SK, MAGIC_AOS_PK, MAGIC_AOS_SK, MAGIC_RPSF_SIG, MAGIC_AOS_SIG];
            let mut input = header(magics[magic]);
            input.extend(bytes);
            let _ = decode_rpsf_public_key(&input);
            let _ = decode_rpsf_secret_key(&input);
            let _ = decode_aos_public_key(&input);
            let _ = decode_aos_secret_key(&input);
            let _ = decode_rpsf_signature(&rpsf_scheme(), &input);
            let _ = decode_aos_signature(&aos_scheme(), &input);
        }
    }
}
