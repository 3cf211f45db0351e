//! NTRU trapdoor generation: short (f, g), the completion (F, G) with
//! fG − gF = q, and the Gram–Schmidt data of the 2M-dimensional basis.
//!
//! (F, G) comes from Bézout coefficients of the resultants of f and g with
//! X^M + 1, followed by an exact Babai reduction against (f, g).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::gaussian::{sample_z, LatticeBasis, LatticeError};
use crate::ring::{poly_inverse, poly_mul, Poly, RingError, RingParams};

/// Default number of (f, g) draws before giving up.
pub const DEFAULT_RETRY_BUDGET: usize = 1000;

/// Largest degree supported by the big-integer solver.
pub const MAX_TRAPDOOR_DEGREE: usize = 64;

/// Errors from trapdoor generation and reconstruction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrapdoorError {
    #[error("no trapdoor of quality {alpha} found in {attempts} attempts")]
    QualityUnreachable { alpha: f64, attempts: usize },
    #[error("degree {0} exceeds the supported maximum of 64")]
    DegreeTooLarge(usize),
    #[error("key width must be positive, got {0}")]
    InvalidWidth(f64),
    #[error("f·G − g·F does not equal q")]
    NtruEquation,
    #[error("f is not invertible mod q")]
    NotInvertible,
    #[error("coefficient vector has the wrong length")]
    Shape,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

// Big-integer polynomials in Z[X]/(X^n + 1), lowest degree first.
type ZPoly = Vec<BigInt>;

fn zmul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len();
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let p = x * y;
            if i + j < n {
                out[i + j] += p;
            } else {
                out[i + j - n] -= p;
            }
        }
    }
    out
}

fn zsub(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn zadd(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn zscale(a: &[BigInt], k: &BigInt) -> ZPoly {
    a.iter().map(|x| x * k).collect()
}

fn to_z(a: &[i64]) -> ZPoly {
    a.iter().map(|&x| BigInt::from(x)).collect()
}

/// a(−X).
fn galois_conjugate(a: &[BigInt]) -> ZPoly {
    a.iter()
        .enumerate()
        .map(|(i, x)| if i % 2 == 1 { -x } else { x.clone() })
        .collect()
}

/// The adjoint a(X^{-1}) = a_0 − a_{n−1}X − … − a_1X^{n−1}.
fn adjoint(a: &[BigInt]) -> ZPoly {
    let n = a.len();
    (0..n)
        .map(|i| if i == 0 { a[0].clone() } else { -&a[n - i] })
        .collect()
}

/// Field norm to Z[Y]/(Y^{n/2} + 1): N(a)(X²) = a(X)·a(−X).
fn field_norm(a: &[BigInt]) -> ZPoly {
    let half = a.len() / 2;
    let even: ZPoly = a.iter().step_by(2).cloned().collect();
    let odd: ZPoly = a.iter().skip(1).step_by(2).cloned().collect();
    let e2 = zmul(&even, &even);
    let o2 = zmul(&odd, &odd);
    // Y·o2 in Z[Y]/(Y^half + 1).
    let mut y_o2 = vec![BigInt::zero(); half];
    for i in 0..half {
        if i + 1 < half {
            y_o2[i + 1] = o2[i].clone();
        } else {
            y_o2[0] = -&o2[i];
        }
    }
    zsub(&e2, &y_o2)
}

/// b(X²) for b in Z[Y]/(Y^{n/2} + 1).
fn lift(b: &[BigInt]) -> ZPoly {
    let mut out = vec![BigInt::zero(); 2 * b.len()];
    for (i, x) in b.iter().enumerate() {
        out[2 * i] = x.clone();
    }
    out
}

/// Returns (r, adj) with a·adj = r in Z[X]/(X^n + 1), r = Res(a, X^n + 1).
fn resultant_adjugate(a: &[BigInt]) -> (BigInt, ZPoly) {
    if a.len() == 1 {
        return (a[0].clone(), vec![BigInt::one()]);
    }
    let (r, adj_norm) = resultant_adjugate(&field_norm(a));
    (r, zmul(&galois_conjugate(a), &lift(&adj_norm)))
}

/// round(a / b) for b > 0, halves rounded up.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (a * &two + b).div_floor(&(b * &two))
}

/// Solves fG − gF = q over Z[X]/(X^n + 1) and size-reduces (F, G) against
/// (f, g). Returns `None` when Res(f) and Res(g) share a factor.
pub fn ntru_solve(f: &[i64], g: &[i64], q: u32) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    let (f, g) = (to_z(f), to_z(g));
    let (rf, adj_f) = resultant_adjugate(&f);
    let (rg, adj_g) = resultant_adjugate(&g);
    let ext = rf.extended_gcd(&rg);
    let (u, v) = if ext.gcd.is_one() {
        (ext.x, ext.y)
    } else if (-&ext.gcd).is_one() {
        (-ext.x, -ext.y)
    } else {
        return None;
    };
    // u·Rf + v·Rg = 1, so f·(q·u·adj_f) − g·(−q·v·adj_g) = q.
    let q = BigInt::from(q);
    let mut big_g = zscale(&adj_f, &(&q * &u));
    let mut big_f = zscale(&adj_g, &(-&q * &v));
    babai_reduce(&f, &g, &mut big_f, &mut big_g);
    Some((big_f, big_g))
}

/// Replaces (F, G) by (F − kf, G − kg) with k = round((F f̄ + G ḡ)/(f f̄ + g ḡ)),
/// computed exactly through the adjugate of the denominator.
fn babai_reduce(f: &[BigInt], g: &[BigInt], big_f: &mut ZPoly, big_g: &mut ZPoly) {
    let (fa, ga) = (adjoint(f), adjoint(g));
    let den = zadd(&zmul(f, &fa), &zmul(g, &ga));
    let (mut r, mut adj) = resultant_adjugate(&den);
    if r.is_negative() {
        r = -r;
        adj = adj.into_iter().map(|x| -x).collect();
    }
    for _ in 0..4 {
        let num = zadd(&zmul(big_f, &fa), &zmul(big_g, &ga));
        let k: ZPoly = zmul(&num, &adj).iter().map(|c| div_round(c, &r)).collect();
        if k.iter().all(Zero::is_zero) {
            break;
        }
        *big_f = zsub(big_f, &zmul(&k, f));
        *big_g = zsub(big_g, &zmul(&k, g));
    }
}

/// x^i · a in Z[X]/(X^n + 1).
pub(crate) fn rotate(a: &[i64], i: usize) -> Vec<i64> {
    let n = a.len();
    let mut out = vec![0i64; n];
    for (j, &x) in a.iter().enumerate() {
        let k = i + j;
        if k < n {
            out[k] = x;
        } else {
            out[k - n] = -x;
        }
    }
    out
}

/// NTRU trapdoor (f, g, F, G) with public key h = g·f⁻¹ mod q and the
/// Gram–Schmidt data of its basis.
///
/// Basis rows are x^i·(f, −g) for i < M followed by x^i·(F, −G). Every row
/// (w_u, w_v) satisfies h·w_u + w_v ≡ 0 mod q.
#[derive(Debug, Clone, PartialEq)]
pub struct NtruTrapdoor {
    params: RingParams,
    f: Vec<i64>,
    g: Vec<i64>,
    big_f: Vec<i64>,
    big_g: Vec<i64>,
    h: Poly,
    basis: LatticeBasis,
}

impl NtruTrapdoor {
    /// Rebuilds a trapdoor from its four polynomials, checking the NTRU
    /// equation and recomputing h and the Gram–Schmidt data.
    pub fn from_parts(
        params: RingParams,
        f: Vec<i64>,
        g: Vec<i64>,
        big_f: Vec<i64>,
        big_g: Vec<i64>,
    ) -> Result<Self, TrapdoorError> {
        let m = params.degree();
        if [&f, &g, &big_f, &big_g].iter().any(|p| p.len() != m) {
            return Err(TrapdoorError::Shape);
        }
        if !ntru_equation_holds(&f, &g, &big_f, &big_g, params.modulus()) {
            return Err(TrapdoorError::NtruEquation);
        }
        let f_q = Poly::from_signed(params, &f).map_err(|_| TrapdoorError::Shape)?;
        let g_q = Poly::from_signed(params, &g).map_err(|_| TrapdoorError::Shape)?;
        let f_inv = poly_inverse(&f_q).map_err(|_| TrapdoorError::NotInvertible)?;
        let h = poly_mul(&g_q, &f_inv).expect("same parameters");
        let basis = LatticeBasis::new(basis_rows(&f, &g, &big_f, &big_g))?;
        Ok(NtruTrapdoor {
            params,
            f,
            g,
            big_f,
            big_g,
            h,
            basis,
        })
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn f(&self) -> &[i64] {
        &self.f
    }

    pub fn g(&self) -> &[i64] {
        &self.g
    }

    pub fn big_f(&self) -> &[i64] {
        &self.big_f
    }

    pub fn big_g(&self) -> &[i64] {
        &self.big_g
    }

    /// Public key h = g·f⁻¹ mod q.
    pub fn h(&self) -> &Poly {
        &self.h
    }

    /// The 2M × 2M basis with Gram–Schmidt data.
    pub fn basis(&self) -> &LatticeBasis {
        &self.basis
    }

    /// ‖B‖_GS.
    pub fn gs_norm(&self) -> f64 {
        self.basis.max_gs_norm()
    }
}

fn basis_rows(f: &[i64], g: &[i64], big_f: &[i64], big_g: &[i64]) -> Vec<Vec<i64>> {
    let m = f.len();
    let row = |a: &[i64], b: &[i64], i: usize| -> Vec<i64> {
        let mut r = rotate(a, i);
        r.extend(rotate(b, i).into_iter().map(|x| -x));
        r
    };
    (0..m)
        .map(|i| row(f, g, i))
        .chain((0..m).map(|i| row(big_f, big_g, i)))
        .collect()
}

/// Checks fG − gF = q exactly over Z[X]/(X^M + 1).
pub fn ntru_equation_holds(f: &[i64], g: &[i64], big_f: &[i64], big_g: &[i64], q: u32) -> bool {
    let lhs = zsub(&zmul(&to_z(f), &to_z(big_g)), &zmul(&to_z(g), &to_z(big_f)));
    lhs.iter()
        .enumerate()
        .all(|(i, c)| if i == 0 { *c == BigInt::from(q) } else { c.is_zero() })
}

/// Samples (f, g) from D_{Z^M, s_key} until the basis has ‖B‖_GS ≤ α√q,
/// f is invertible mod q and the NTRU equation is solvable.
pub fn ntru_trapdoor_gen<R: Rng + ?Sized>(
    params: RingParams,
    s_key: f64,
    alpha_quality: f64,
    retry_budget: usize,
    rng: &mut R,
) -> Result<NtruTrapdoor, TrapdoorError> {
    let m = params.degree();
    if m > MAX_TRAPDOOR_DEGREE {
        return Err(TrapdoorError::DegreeTooLarge(m));
    }
    if !(s_key > 0.0 && s_key.is_finite()) {
        return Err(TrapdoorError::InvalidWidth(s_key));
    }
    let target = alpha_quality * f64::from(params.modulus()).sqrt();
    for _ in 0..retry_budget {
        let f: Vec<i64> = (0..m).map(|_| sample_z(s_key, 0.0, rng)).collect();
        let g: Vec<i64> = (0..m).map(|_| sample_z(s_key, 0.0, rng)).collect();
        // The first Gram–Schmidt vector is (f, −g) itself.
        let norm = f.iter().chain(&g).map(|&x| (x * x) as f64).sum::<f64>().sqrt();
        if norm > target {
            continue;
        }
        let f_q = Poly::from_signed(params, &f).expect("length M");
        if matches!(poly_inverse(&f_q), Err(RingError::NotInvertible)) {
            continue;
        }
        let Some((big_f, big_g)) = ntru_solve(&f, &g, params.modulus()) else {
            continue;
        };
        let (Some(big_f), Some(big_g)) = (to_small(&big_f), to_small(&big_g)) else {
            continue;
        };
        let Ok(td) = NtruTrapdoor::from_parts(params, f, g, big_f, big_g) else {
            continue;
        };
        if td.gs_norm() <= target {
            return Ok(td);
        }
    }
    Err(TrapdoorError::QualityUnreachable {
        alpha: alpha_quality,
        attempts: retry_budget,
    })
}

fn to_small(a: &[BigInt]) -> Option<Vec<i64>> {
    const LIMIT: i64 = 1 << 40;
    a.iter()
        .map(|x| x.to_i64().filter(|v| v.abs() < LIMIT))
        .collect()
}
