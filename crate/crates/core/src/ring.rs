//! Arithmetic in R_q = Z_q[X]/(X^M + 1) for power-of-two M and prime q < 2^16.
//!
//! Multiplication is schoolbook negacyclic convolution. Inversion runs the
//! extended Euclidean algorithm in Z_q[X] against X^M + 1. Norms use the
//! centered representatives in (−q/2, q/2].

use serde::{Deserialize, Serialize};
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;
use thiserror::Error;

/// Leading byte of every `hash_to_ring` input.
pub const HASH_TO_RING_DOMAIN: u8 = 0x01;

/// Errors from ring construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("degree {0} is not a power of two >= 2")]
    InvalidDegree(usize),
    #[error("modulus {0} is not an odd prime below 2^16")]
    InvalidModulus(u32),
    #[error("operands use different ring parameters")]
    ParamMismatch,
    #[error("polynomial is not invertible mod (q, X^M + 1)")]
    NotInvertible,
    #[error("coefficient vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("coefficient {0} is not reduced mod q")]
    Unreduced(u32),
    #[error("truncated or malformed encoding")]
    Format,
}

/// Ring parameters (M, q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRingParams", into = "RawRingParams")]
pub struct RingParams {
    m: usize,
    q: u32,
}

#[derive(Serialize, Deserialize)]
struct RawRingParams {
    m: usize,
    q: u32,
}

impl TryFrom<RawRingParams> for RingParams {
    type Error = RingError;
    fn try_from(r: RawRingParams) -> Result<Self, RingError> {
        RingParams::new(r.m, r.q)
    }
}

impl From<RingParams> for RawRingParams {
    fn from(p: RingParams) -> Self {
        RawRingParams { m: p.m, q: p.q }
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl RingParams {
    /// Validated parameters: M a power of two ≥ 2, q an odd prime < 2^16.
    pub fn new(m: usize, q: u32) -> Result<Self, RingError> {
        if m < 2 || !m.is_power_of_two() || m > u16::MAX as usize {
            return Err(RingError::InvalidDegree(m));
        }
        if !(3..1 << 16).contains(&q) || !is_prime(q) {
            return Err(RingError::InvalidModulus(q));
        }
        Ok(RingParams { m, q })
    }

    /// Degree M.
    pub fn degree(&self) -> usize {
        self.m
    }

    /// Modulus q.
    pub fn modulus(&self) -> u32 {
        self.q
    }

    /// Number of bits sampled per coefficient by `hash_to_ring`.
    pub fn coeff_bits(&self) -> u32 {
        32 - (self.q - 1).leading_zeros()
    }

    /// Appends the 4-byte `(M, q)` header: two little-endian u16 values.
    pub fn write_header(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.m as u16).to_le_bytes());
        out.extend_from_slice(&(self.q as u16).to_le_bytes());
    }

    /// Parses a header written by [`RingParams::write_header`].
    pub fn read_header(bytes: &[u8]) -> Result<(Self, &[u8]), RingError> {
        if bytes.len() < 4 {
            return Err(RingError::Format);
        }
        let m = u16::from_le_bytes([bytes[0], bytes[1]]) as usize;
        let q = u16::from_le_bytes([bytes[2], bytes[3]]) as u32;
        Ok((RingParams::new(m, q)?, &bytes[4..]))
    }

    /// Reduces a signed integer into [0, q).
    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.q as i64) as u32
    }

    /// Centered representative of `x` in (−q/2, q/2].
    pub fn center(&self, x: u32) -> i64 {
        let q = self.q as i64;
        let x = x as i64;
        if 2 * x > q {
            x - q
        } else {
            x
        }
    }
}

/// An element of R_q with coefficients reduced to [0, q).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    params: RingParams,
    coeffs: Vec<u32>,
}

impl Poly {
    /// The zero polynomial.
    pub fn zero(params: RingParams) -> Self {
        Poly {
            params,
            coeffs: vec![0; params.m],
        }
    }

    /// The constant 1.
    pub fn one(params: RingParams) -> Self {
        let mut p = Self::zero(params);
        p.coeffs[0] = 1;
        p
    }

    /// Builds from reduced coefficients.
    pub fn from_coeffs(params: RingParams, coeffs: Vec<u32>) -> Result<Self, RingError> {
        if coeffs.len() != params.m {
            return Err(RingError::LengthMismatch {
                expected: params.m,
                got: coeffs.len(),
            });
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= params.q) {
            return Err(RingError::Unreduced(c));
        }
        Ok(Poly { params, coeffs })
    }

    /// Builds from arbitrary integers, reducing each mod q.
    pub fn from_signed(params: RingParams, coeffs: &[i64]) -> Result<Self, RingError> {
        if coeffs.len() != params.m {
            return Err(RingError::LengthMismatch {
                expected: params.m,
                got: coeffs.len(),
            });
        }
        Ok(Poly {
            params,
            coeffs: coeffs.iter().map(|&c| params.reduce(c)).collect(),
        })
    }

    /// Ring parameters.
    pub fn params(&self) -> RingParams {
        self.params
    }

    /// Coefficients in [0, q), lowest degree first.
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// Coefficients lifted to (−q/2, q/2].
    pub fn centered(&self) -> Vec<i64> {
        self.coeffs.iter().map(|&c| self.params.center(c)).collect()
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Poly) -> Result<(), RingError> {
        if self.params != other.params {
            Err(RingError::ParamMismatch)
        } else {
            Ok(())
        }
    }

    /// Sum.
    pub fn add(&self, other: &Poly) -> Result<Poly, RingError> {
        self.check(other)?;
        let q = self.params.q;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + b) % q)
            .collect();
        Ok(Poly {
            params: self.params,
            coeffs,
        })
    }

    /// Difference.
    pub fn sub(&self, other: &Poly) -> Result<Poly, RingError> {
        self.check(other)?;
        let q = self.params.q;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + q - b) % q)
            .collect();
        Ok(Poly {
            params: self.params,
            coeffs,
        })
    }

    /// Additive inverse.
    pub fn neg(&self) -> Poly {
        let q = self.params.q;
        Poly {
            params: self.params,
            coeffs: self.coeffs.iter().map(|&a| (q - a) % q).collect(),
        }
    }

    /// Negacyclic product.
    pub fn mul(&self, other: &Poly) -> Result<Poly, RingError> {
        poly_mul(self, other)
    }

    /// Little-endian u16 coefficient encoding, without header.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.coeffs
            .iter()
            .flat_map(|&c| (c as u16).to_le_bytes())
            .collect()
    }

    /// Decodes `2M` bytes written by [`Poly::to_bytes`]; returns the rest.
    pub fn from_bytes(params: RingParams, bytes: &[u8]) -> Result<(Poly, &[u8]), RingError> {
        let need = 2 * params.m;
        if bytes.len() < need {
            return Err(RingError::Format);
        }
        let coeffs = bytes[..need]
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as u32)
            .collect();
        Ok((Poly::from_coeffs(params, coeffs)?, &bytes[need..]))
    }
}

/// Negacyclic convolution a·b mod (q, X^M + 1).
pub fn poly_mul(a: &Poly, b: &Poly) -> Result<Poly, RingError> {
    a.check(b)?;
    let m = a.params.m;
    let q = a.params.q as u64;
    let mut acc = vec![0u64; m];
    for (i, &ai) in a.coeffs.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.coeffs.iter().enumerate() {
            let prod = ai as u64 * bj as u64 % q;
            let k = i + j;
            if k < m {
                acc[k] = (acc[k] + prod) % q;
            } else {
                acc[k - m] = (acc[k - m] + q - prod) % q;
            }
        }
    }
    Ok(Poly {
        params: a.params,
        coeffs: acc.into_iter().map(|c| c as u32).collect(),
    })
}

fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1u64;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}

/// Inverse of `x` mod the prime `q`; `x` must be non-zero.
pub(crate) fn inv_mod(x: u64, q: u64) -> u64 {
    pow_mod(x, q - 2, q)
}

// Dense polynomials over F_q, lowest degree first, no trailing zeros.
fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn poly_divmod(num: &[u64], den: &[u64], q: u64) -> (Vec<u64>, Vec<u64>) {
    let mut rem = num.to_vec();
    trim(&mut rem);
    let dl = den.len();
    if rem.len() < dl {
        return (Vec::new(), rem);
    }
    let lead_inv = inv_mod(den[dl - 1], q);
    let mut quot = vec![0u64; rem.len() - dl + 1];
    while rem.len() >= dl {
        let shift = rem.len() - dl;
        let coef = rem[rem.len() - 1] * lead_inv % q;
        quot[shift] = coef;
        for (i, &d) in den.iter().enumerate() {
            rem[shift + i] = (rem[shift + i] + q - coef * d % q) % q;
        }
        trim(&mut rem);
    }
    (quot, rem)
}

fn poly_mul_plain(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % q;
        }
    }
    trim(&mut out);
    out
}

fn poly_sub_plain(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + q - y) % q
        })
        .collect();
    trim(&mut out);
    out
}

/// Multiplicative inverse in R_q, or `NotInvertible` when
/// gcd(a(X), X^M + 1) ≠ 1 in Z_q[X].
pub fn poly_inverse(a: &Poly) -> Result<Poly, RingError> {
    let params = a.params;
    let q = params.q as u64;
    let mut modulus = vec![0u64; params.m + 1];
    modulus[0] = 1;
    modulus[params.m] = 1;
    let mut r0 = modulus;
    let mut r1: Vec<u64> = a.coeffs.iter().map(|&c| c as u64).collect();
    trim(&mut r1);
    let mut t0: Vec<u64> = Vec::new();
    let mut t1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (quot, rem) = poly_divmod(&r0, &r1, q);
        let t2 = poly_sub_plain(&t0, &poly_mul_plain(&quot, &t1, q), q);
        r0 = std::mem::replace(&mut r1, rem);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.len() != 1 {
        return Err(RingError::NotInvertible);
    }
    let scale = inv_mod(r0[0], q);
    let mut coeffs = vec![0u32; params.m];
    for (i, &t) in t0.iter().enumerate() {
        coeffs[i] = (t * scale % q) as u32;
    }
    Ok(Poly { params, coeffs })
}

/// Euclidean norm of the concatenated centered coefficients.
pub fn coeff_norm(polys: &[Poly]) -> Result<f64, RingError> {
    let Some(first) = polys.first() else {
        return Ok(0.0);
    };
    let mut sq = 0f64;
    for p in polys {
        first.check(p)?;
        sq += p
            .centered()
            .iter()
            .map(|&c| (c * c) as f64)
            .sum::<f64>();
    }
    Ok(sq.sqrt())
}

/// Hashes `(tag, input)` to a uniform element of R_q.
///
/// SHAKE256 absorbs `HASH_TO_RING_DOMAIN ‖ len(tag) as u16 LE ‖ tag ‖ input`.
/// Each coefficient reads two output bytes, keeps the low ⌈log₂ q⌉ bits and
/// rejects values ≥ q.
pub fn hash_to_ring(tag: &[u8], input: &[u8], params: RingParams) -> Poly {
    let mut xof = Shake256::default();
    xof.update(&[HASH_TO_RING_DOMAIN]);
    xof.update(&(tag.len() as u16).to_le_bytes());
    xof.update(tag);
    xof.update(input);
    let mut reader = xof.finalize_xof();
    let mask = if params.coeff_bits() == 32 {
        u32::MAX
    } else {
        (1u32 << params.coeff_bits()) - 1
    };
    let mut coeffs = Vec::with_capacity(params.m);
    let mut buf = [0u8; 2];
    while coeffs.len() < params.m {
        reader.read(&mut buf);
        let c = u16::from_le_bytes(buf) as u32 & mask;
        if c < params.q {
            coeffs.push(c);
        }
    }
    Poly { params, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn p(m: usize, q: u32, c: &[u32]) -> Poly {
        Poly::from_coeffs(RingParams::new(m, q).unwrap(), c.to_vec()).unwrap()
    }

    fn random_poly(params: RingParams, rng: &mut impl Rng) -> Poly {
        let c = (0..params.degree())
            .map(|_| rng.random_range(0..params.modulus()))
            .collect();
        Poly::from_coeffs(params, c).unwrap()
    }

    // Full integer convolution followed by the X^M = −1 fold.
    fn oracle_mul(a: &Poly, b: &Poly) -> Vec<u32> {
        let m = a.params().degree();
        let q = a.params().modulus() as i128;
        let mut full = vec![0i128; 2 * m];
        for i in 0..m {
            for j in 0..m {
                full[i + j] += a.coeffs()[i] as i128 * b.coeffs()[j] as i128;
            }
        }
        (0..m)
            .map(|i| (full[i] - full[i + m]).rem_euclid(q) as u32)
            .collect()
    }

    #[test]
    fn params_validation() {
        assert!(RingParams::new(3, 17).is_err());
        assert!(RingParams::new(1, 17).is_err());
        assert!(RingParams::new(4, 15).is_err());
        assert!(RingParams::new(4, 2).is_err());
        assert!(RingParams::new(4, 65537).is_err());
        assert!(RingParams::new(64, 12289).is_ok());
        assert_eq!(RingParams::new(4, 17).unwrap().coeff_bits(), 5);
        assert_eq!(RingParams::new(4, 12289).unwrap().coeff_bits(), 14);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(poly_mul(&p(2, 17, &[1, 1]), &p(2, 17, &[1, 1])).unwrap(), p(2, 17, &[0, 2]));
        assert_eq!(poly_mul(&p(2, 5, &[0, 1]), &p(2, 5, &[0, 1])).unwrap(), p(2, 5, &[4, 0]));
        let a = p(4, 17, &[3, 5, 7, 11]);
        assert_eq!(poly_mul(&a, &Poly::one(a.params())).unwrap(), a);
        assert_eq!(poly_mul(&a, &p(4, 13, &[1, 0, 0, 0])), Err(RingError::ParamMismatch));
    }

    #[test]
    fn inverse_examples() {
        let one = p(2, 5, &[1, 0]);
        assert_eq!(poly_inverse(&one).unwrap(), one);
        assert_eq!(poly_inverse(&p(2, 5, &[2, 1])), Err(RingError::NotInvertible));
        assert_eq!(poly_inverse(&p(2, 5, &[0, 0])), Err(RingError::NotInvertible));
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let params = RingParams::new(16, 12289).unwrap();
        let mut checked = 0;
        while checked < 20 {
            let a = random_poly(params, &mut rng);
            if let Ok(inv) = poly_inverse(&a) {
                assert_eq!(poly_mul(&a, &inv).unwrap(), Poly::one(params));
                checked += 1;
            }
        }
    }

    #[test]
    fn norm_examples() {
        let params = RingParams::new(2, 17).unwrap();
        assert_eq!(coeff_norm(&[Poly::zero(params)]).unwrap(), 0.0);
        assert!((coeff_norm(&[p(2, 17, &[1, 16])]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let a = p(2, 17, &[3, 9]);
        let b = p(2, 17, &[8, 12]);
        let joint = coeff_norm(&[a.clone(), b.clone()]).unwrap();
        let sep = coeff_norm(&[a]).unwrap().powi(2) + coeff_norm(&[b]).unwrap().powi(2);
        assert!((joint.powi(2) - sep).abs() < 1e-9);
        assert_eq!(params.center(8), 8);
        assert_eq!(params.center(9), -8);
    }

    #[test]
    fn hash_determinism_and_sensitivity() {
        let params = RingParams::new(8, 97).unwrap();
        let a = hash_to_ring(b"T", b"input", params);
        assert_eq!(a, hash_to_ring(b"T", b"input", params));
        assert_ne!(a, hash_to_ring(b"T", b"inpus", params));
        assert_ne!(a, hash_to_ring(b"U", b"input", params));
        // Moving a byte between tag and input changes the hash.
        assert_ne!(hash_to_ring(b"Ti", b"nput", params), a);
    }

    #[test]
    fn hash_fixed_vector() {
        let params = RingParams::new(4, 17).unwrap();
        let h = hash_to_ring(b"ringforge", b"abc", params);
        assert_eq!(h.coeffs(), FROZEN_HASH_M4_Q17);
    }

    // Produced by an independent SHAKE256 script using the same framing.
    const FROZEN_HASH_M4_Q17: &[u32] = &[9, 6, 0, 14];

    #[test]
    fn hash_uniformity_chi_square() {
        let params = RingParams::new(4, 17).unwrap();
        let mut counts = [[0u64; 17]; 4];
        let n = 100_000u64;
        for i in 0..n {
            let h = hash_to_ring(b"uniformity", &i.to_le_bytes(), params);
            for (k, &c) in h.coeffs().iter().enumerate() {
                counts[k][c as usize] += 1;
            }
        }
        let expected = n as f64 / 17.0;
        let chi = ChiSquared::new(16.0).unwrap();
        for row in counts {
            let stat: f64 = row
                .iter()
                .map(|&o| (o as f64 - expected).powi(2) / expected)
                .sum();
            assert!(chi.sf(stat) > 0.001, "chi-square {stat}");
        }
    }

    #[test]
    fn encoding_round_trip() {
        let params = RingParams::new(8, 12289).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let a = random_poly(params, &mut rng);
        let mut buf = Vec::new();
        params.write_header(&mut buf);
        buf.extend(a.to_bytes());
        let (pp, rest) = RingParams::read_header(&buf).unwrap();
        let (b, rest) = Poly::from_bytes(pp, rest).unwrap();
        assert!(rest.is_empty());
        assert_eq!(a, b);
        assert_eq!(Poly::from_bytes(params, &buf[4..10]), Err(RingError::Format));
    }

    fn arb_params() -> impl Strategy<Value = RingParams> {
        (prop_oneof![Just(2usize), Just(4), Just(8)], prop_oneof![Just(5u32), Just(17), Just(97), Just(12289)])
            .prop_map(|(m, q)| RingParams::new(m, q).unwrap())
    }

    fn arb_triple() -> impl Strategy<Value = (Poly, Poly, Poly)> {
        (arb_params(), any::<u64>()).prop_map(|(params, seed)| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            (
                random_poly(params, &mut rng),
                random_poly(params, &mut rng),
                random_poly(params, &mut rng),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn mul_matches_convolution_oracle((a, b, _) in arb_triple()) {
            let prod = poly_mul(&a, &b).unwrap();
            prop_assert_eq!(prod.coeffs(), &oracle_mul(&a, &b)[..]);
        }

        #[test]
        fn ring_axioms((a, b, c) in arb_triple()) {
            let ab = poly_mul(&a, &b).unwrap();
            prop_assert_eq!(&ab, &poly_mul(&b, &a).unwrap());
            prop_assert_eq!(poly_mul(&ab, &c).unwrap(), poly_mul(&a, &poly_mul(&b, &c).unwrap()).unwrap());
            let lhs = poly_mul(&a, &b.add(&c).unwrap()).unwrap();
            let rhs = ab.add(&poly_mul(&a, &c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert!(a.sub(&a).unwrap().is_zero());
            prop_assert!(a.add(&a.neg()).unwrap().is_zero());
        }

        #[test]
        fn inverse_round_trip((a, _, _) in arb_triple()) {
            if let Ok(inv) = poly_inverse(&a) {
                prop_assert_eq!(poly_mul(&a, &inv).unwrap(), Poly::one(a.params()));
            }
        }
    }
}
