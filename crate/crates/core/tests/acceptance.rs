//! End-to-end acceptance checks for the library.
//!
//! Runs as a plain binary (`harness = false`) so that one PASS/FAIL line per
//! criterion appears in ordinary `cargo test` output. The process exits
//! nonzero when any criterion fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use ringforge::bounds::{
    adaptive_repro_delta, delta_kappa, mandr_factor, qrom_collision_bound, small_range_ell, sweep, BoundParams,
    Theorem,
};
use ringforge::dist::{empirical_dist, stat_distance, DiscreteDist, RenyiOrder};
use ringforge::games::{
    hvzk_distance_estimate, hvzk_distance_with, run_anon, run_ufnra_with_extraction, AosSetup,
    CanaryAdversary, GameConfig, HonestProverAdversary, HvzkSimulator, NormStatisticAdversary,
};
use ringforge::gaussian::{klein_sample, LatticeBasis, DEFAULT_SMOOTHING_EPSILON};
use ringforge::lab::{dj_ratio_closed_form, dj_ratio_monte_carlo, grover_tightness, DjConfig, GroverConfig};
use ringforge::ntru::{ntru_trapdoor_gen, DEFAULT_RETRY_BUDGET};
use ringforge::ring::{hash_to_ring, poly_mul, Poly, RingParams};
use ringforge::ringsig::{AosScheme, Ring, RingSignatureScheme, RpsfScheme};
use ringforge::rpsf::{rpsf_eval, rpsf_keygen, rpsf_sample_pre, rpsf_setup, RpsfConfig, RpsfParams};
use ringforge::random_oracle::Shake256Oracle;
use ringforge::sigma::{sigma_extract, sigma_gen, OpenedMessage, SigmaInstance};
use std::process::ExitCode;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rpsf_params(kappa: usize) -> RpsfParams {
    rpsf_setup(&RpsfConfig::new(64, 12289, kappa)).expect("recommended parameters are valid")
}

fn exact_preimage() -> Outcome {
    let params = rpsf_params(4);
    let mut r = rng(1);
    let keys: Vec<_> = (0..4).map(|_| rpsf_keygen(&params, &mut r).unwrap()).collect();
    let ring: Vec<_> = keys.iter().map(|k| k.0.clone()).collect();
    let mut failures = 0;
    for n in 1..=4 {
        for t in 0..1000u32 {
            let target = hash_to_ring(b"acceptance", &t.to_le_bytes(), params.ring);
            let signer = t as usize % n;
            let d = rpsf_sample_pre(&ring[..n], &keys[signer].1, &target, &params, &mut r).map_err(|e| e.to_string())?;
            if rpsf_eval(&ring[..n], &d).map_err(|e| e.to_string())? != target {
                failures += 1;
            }
        }
    }
    ensure(failures == 0, || format!("{failures} of 4000 preimages missed"))?;
    Ok("4000 preimages, 0 failures".into())
}

fn flip_bit(bytes: &mut [u8], r: &mut ChaCha20Rng) {
    let bit = r.random_range(0..bytes.len() * 8);
    bytes[bit / 8] ^= 1 << (bit % 8);
}

fn round_trips() -> Outcome {
    let mut r = rng(2);
    let rpsf = RpsfScheme::new(rpsf_params(4), 128).unwrap();
    let aos = AosScheme::new(Shake256Oracle, 96, 1.0, 128, 4);
    let rpsf_keys: Vec<_> = (0..4).map(|_| rpsf.keygen(&mut r).unwrap()).collect();
    let aos_keys: Vec<_> = (0..4).map(|_| aos.keygen(&mut r).unwrap()).collect();
    let mut counts = [0usize; 7];
    for n in 1..=4 {
        let rpsf_ring = Ring::new(rpsf_keys[..n].iter().map(|k| k.0.clone()).collect(), 4).unwrap();
        let aos_ring = Ring::new(aos_keys[..n].iter().map(|k| k.0.clone()).collect(), 4).unwrap();
        for t in 0..100 {
            let mut msg = format!("message {n}/{t}").into_bytes();
            let i = t % n;

            let sig = rpsf.sign(&rpsf_keys[i].1, &rpsf_ring, &msg, &mut r).map_err(|e| e.to_string())?;
            counts[0] += rpsf.verify(&rpsf_ring, &msg, &sig) as usize;
            let mut bad = sig.clone();
            flip_bit(&mut bad.salt, &mut r);
            counts[1] += !rpsf.verify(&rpsf_ring, &msg, &bad) as usize;
            let mut bad_msg = msg.clone();
            flip_bit(&mut bad_msg, &mut r);
            counts[2] += !rpsf.verify(&rpsf_ring, &bad_msg, &sig) as usize;

            msg.push(b'!');
            let sig = aos.sign(&aos_keys[i].1, &aos_ring, &msg, &mut r).map_err(|e| e.to_string())?;
            counts[3] += aos.verify(&aos_ring, &msg, &sig) as usize;
            let mut bad_msg = msg.clone();
            flip_bit(&mut bad_msg, &mut r);
            counts[4] += !aos.verify(&aos_ring, &bad_msg, &sig) as usize;
            let slot = r.random_range(0..sig.parts.len());
            let mut bad = sig.clone();
            let com = &mut bad.parts[slot].0.y;
            let k = r.random_range(0..com.len());
            flip_bit(&mut com[k], &mut r);
            counts[5] += !aos.verify(&aos_ring, &msg, &bad) as usize;
            let mut bad = sig.clone();
            let opened = &mut bad.parts[slot].1.opened;
            let k = r.random_range(0..opened.len());
            opened[k].color ^= 1 << r.random_range(0..8);
            counts[6] += !aos.verify(&aos_ring, &msg, &bad) as usize;
        }
    }
    ensure(counts.iter().all(|&c| c == 400), || {
        format!("accepted/rejected counts out of 400: {counts:?}")
    })?;
    Ok("N=1..4: 400/400 accepted per scheme, all 5 tamper kinds rejected 400/400".into())
}

fn klein_law() -> Outcome {
    let basis = LatticeBasis::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
    let (s, c) = (2.0, [0.5, 0.5]);
    let mut r = rng(3);
    let mut samples = Vec::with_capacity(100_000);
    for _ in 0..100_000 {
        let v = klein_sample(&basis, s, &c, DEFAULT_SMOOTHING_EPSILON, &mut r).map_err(|e| e.to_string())?;
        samples.push(format!("{},{}", v[0], v[1]));
    }
    let emp = empirical_dist(samples).map_err(|e| e.to_string())?;
    let mut w = Vec::new();
    for x in -10i64..=10 {
        for y in -10i64..=10 {
            let d2 = (x as f64 - c[0]).powi(2) + (y as f64 - c[1]).powi(2);
            w.push((format!("{x},{y}"), (-d2 / (2.0 * s * s)).exp()));
        }
    }
    let total: f64 = w.iter().map(|p| p.1).sum();
    let exact = DiscreteDist::from_pairs(w.into_iter().map(|(l, p)| (l, p / total))).map_err(|e| e.to_string())?;
    let tv = stat_distance(&emp, &exact);
    ensure(tv <= 0.02, || format!("TV {tv:.5} > 0.02"))?;
    Ok(format!("TV {tv:.5}"))
}

// Schoolbook product in Z[X]/(X^n + 1), independent of the ring module.
fn negacyclic_i128(a: &[i64], b: &[i64]) -> Vec<i128> {
    let n = a.len();
    let mut full = vec![0i128; 2 * n];
    for i in 0..n {
        for j in 0..n {
            full[i + j] += a[i] as i128 * b[j] as i128;
        }
    }
    (0..n).map(|i| full[i] - full[i + n]).collect()
}

fn ntru_algebra() -> Outcome {
    let q = 12289u32;
    let mut r = rng(4);
    for m in [8usize, 16] {
        let params = RingParams::new(m, q).unwrap();
        let s_key = 1.17 * (f64::from(q) / (2.0 * m as f64)).sqrt();
        for k in 0..20 {
            let td = ntru_trapdoor_gen(params, s_key, 1.17, DEFAULT_RETRY_BUDGET, &mut r).map_err(|e| e.to_string())?;
            let lhs: Vec<i128> = negacyclic_i128(td.f(), td.big_g())
                .iter()
                .zip(negacyclic_i128(td.g(), td.big_f()))
                .map(|(a, b)| a - b)
                .collect();
            let mut expect = vec![0i128; m];
            expect[0] = q as i128;
            ensure(lhs == expect, || format!("M={m} #{k}: fG - gF != q"))?;
            let f = Poly::from_signed(params, td.f()).unwrap();
            let g = Poly::from_signed(params, td.g()).unwrap();
            ensure(poly_mul(td.h(), &f).unwrap() == g, || format!("M={m} #{k}: h*f != g"))?;
            let rows = td.basis().rows();
            ensure(rows.len() == 2 * m, || format!("M={m} #{k}: {} rows", rows.len()))?;
            for row in rows {
                let wu = Poly::from_signed(params, &row[..m]).unwrap();
                let wv = Poly::from_signed(params, &row[m..]).unwrap();
                ensure(poly_mul(td.h(), &wu).unwrap().add(&wv).unwrap().is_zero(), || {
                    format!("M={m} #{k}: basis row outside the lattice")
                })?;
            }
        }
    }
    Ok("40 trapdoors, all identities exact".into())
}

fn dj(n: u32, p: f64, q: f64) -> DjConfig {
    DjConfig {
        n,
        n_prime: 2,
        p: DiscreteDist::from_pairs([("a", p), ("b", 1.0 - p)]).unwrap(),
        q: DiscreteDist::from_pairs([("a", q), ("b", 1.0 - q)]).unwrap(),
        mc_samples: 10_000,
        seed: 0,
    }
}

fn dj_counterexample() -> Outcome {
    let cfg = dj(10, 0.9, 0.5);
    let c = dj_ratio_closed_form(&cfg).map_err(|e| e.to_string())?;
    ensure((c.ratio - 655.72).abs() <= 1e-9, || format!("ratio {}", c.ratio))?;
    let mc = dj_ratio_monte_carlo(&cfg).map_err(|e| e.to_string())?;
    let ep = (mc.ep_z2_hat / c.ep_z2 - 1.0).abs();
    let eq = (mc.eq_z2_hat / c.eq_z2 - 1.0).abs();
    ensure(ep <= 0.05 && eq <= 0.05, || format!("Monte Carlo relative errors {ep:.4}, {eq:.4}"))?;
    let r15 = dj_ratio_closed_form(&dj(15, 0.9, 0.5)).map_err(|e| e.to_string())?.ratio;
    let r16 = dj_ratio_closed_form(&dj(16, 0.9, 0.5)).map_err(|e| e.to_string())?.ratio;
    let growth = r16 / r15;
    ensure((growth / 2.0 - 1.0).abs() <= 0.05, || format!("r16/r15 = {growth}"))?;
    Ok(format!(
        "ratio {:.6}, MC errors {ep:.4}/{eq:.4}, r16/r15 {growth:.4}",
        c.ratio
    ))
}

fn grover_band() -> Outcome {
    let cfg = GroverConfig {
        n_domain: 1 << 16,
        eps: 1e-3,
        q: 5,
        trials: 1000,
        seed: 6,
    };
    let rep = grover_tightness(&cfg).map_err(|e| e.to_string())?;
    ensure(rep.trials.len() == 1000, || format!("{} trials", rep.trials.len()))?;
    ensure(rep.all_in_band, || "a trial left the band".into())?;
    ensure(rep.all_below_osw, || "a trial exceeded the statistical bound".into())?;
    ensure(rep.max_rotation_error <= 1e-12, || {
        format!("rotation error {:e}", rep.max_rotation_error)
    })?;
    Ok(format!("1000 trials in band, rotation error {:.1e}", rep.max_rotation_error))
}

fn monotone_base() -> BoundParams {
    BoundParams {
        q_s: 100.0,
        q_c: 10.0,
        n: 4.0,
        kappa: 8.0,
        k: 128.0,
        y_size: 2f64.powi(128),
        challenge_space: 2f64.powi(64),
        ell: 64.0,
        omega: 16.0,
        gamma_cl: 1000.0,
        sz_triv: 5.0,
        range_size_log2: 600.0,
        alpha1: RenyiOrder::Finite(2.0),
        alpha2: RenyiOrder::Finite(2.0),
        alpha: RenyiOrder::Finite(2.0),
        eps_dom: 1e-8,
        delta_dom: 1.0 + 1e-8,
        eps_pre: 1e-8,
        delta_pre: 1.0 + 1e-8,
        eps_kl_pre: 1e-8,
        eps_hvzk: 1e-8,
        delta_hvzk: 1.0 + 1e-8,
        eps_kl_hvzk: 1e-8,
        adv_col: 1e-12,
        adv_ow: 1e-12,
        adv_cur: 1e-12,
        adv_wrec: 1e-12,
        adv_imp: 1e-12,
        ..Default::default()
    }
}

fn bound_goldens() -> Outcome {
    let ell1 = small_range_ell(1.0);
    ensure((ell1 - std::f64::consts::PI.powi(2) * 8.0 / 6.0).abs() <= 1e-9, || format!("ell(1) = {ell1}"))?;
    for q in 1..=100 {
        let q = q as f64;
        ensure(small_range_ell(q) < 14.0 * q.powi(3), || format!("ell({q}) >= 14 q^3"))?;
    }
    ensure(mandr_factor(2.0, 1.0) == 25.0, || "mandr_factor(2,1) != 25".into())?;
    ensure(adaptive_repro_delta(1.0, 4.0, 1.0 / 16.0) == 0.75, || "adaptive_repro_delta != 0.75".into())?;
    ensure(qrom_collision_bound(3.0, 1.0, 256.0) == 0.703125, || "collision bound != 0.703125".into())?;
    let dk = delta_kappa(1.2, 1.0, 64.0);
    ensure((dk / 8.1e-3 - 1.0).abs() <= 0.01, || format!("delta(kappa) = {dk:e}"))?;

    let values: Vec<f64> = (0..100).map(|i| (2f64.powf(1.0 + 0.4 * i as f64)).floor()).collect();
    let base = monotone_base();
    for t in Theorem::ALL {
        let rows = sweep(t, &base, "q_h", &values).map_err(|e| format!("{t}: {e}"))?;
        for w in rows.windows(2) {
            for (name, &a) in &w[0].1.bounds {
                let b = w[1].1.bounds[name];
                ensure(b >= a * (1.0 - 1e-12) || (a.is_infinite() && b.is_infinite()), || {
                    format!("{t} {name} decreased from q_h={} to q_h={}: {a} -> {b}", w[0].0, w[1].0)
                })?;
            }
        }
    }
    Ok(format!("goldens exact, delta(kappa) {dk:.3e}, {} theorems monotone in q_h", Theorem::ALL.len()))
}

fn anon_shadow() -> Outcome {
    let scheme = RpsfScheme::new(rpsf_setup(&RpsfConfig::new(32, 12289, 2)).unwrap(), 128).unwrap();
    let norm = run_anon(&scheme, &GameConfig::new(2, 1, 8), || NormStatisticAdversary, 10_000)
        .map_err(|e| e.to_string())?;
    ensure(norm.advantage.abs() <= 3.0 * norm.stderr, || {
        format!("norm statistic advantage {} vs stderr {}", norm.advantage, norm.stderr)
    })?;
    let cfg = GameConfig {
        leak_challenge_bit: true,
        ..GameConfig::new(2, 1, 8)
    };
    let canary = run_anon(&scheme, &cfg, || CanaryAdversary, 1000).map_err(|e| e.to_string())?;
    ensure(canary.advantage > 0.4, || format!("canary advantage {}", canary.advantage))?;
    Ok(format!(
        "M=32 norm statistic {:+.4} (stderr {:.4}), canary {:.3}",
        norm.advantage, norm.stderr, canary.advantage
    ))
}

fn improper_case(r: &mut ChaCha20Rng) -> (SigmaInstance, Vec<u8>) {
    let v = r.random_range(3u16..12);
    let mut edges = Vec::new();
    for a in 0..v {
        for b in a + 1..v {
            if r.random_bool(0.4) {
                edges.push((a, b));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, 1));
    }
    let inst = SigmaInstance::new(v, edges, 128).unwrap();
    let mut colors: Vec<u8> = (0..v).map(|_| r.random_range(0..3)).collect();
    let (a, b) = inst.edges()[r.random_range(0..inst.edges().len())];
    colors[b as usize] = colors[a as usize];
    (inst, colors)
}

fn extraction() -> Outcome {
    let setup = AosSetup {
        vertices: 12,
        edge_density: 0.8,
        lambda_r: 128,
        kappa: 4,
    };
    let mut extracted = 0;
    for seed in 0..100 {
        let cfg = GameConfig {
            leak_key: Some(0),
            ..GameConfig::new(3, 0, seed)
        };
        let (res, _) = run_ufnra_with_extraction(&setup, &cfg, &mut HonestProverAdversary).map_err(|e| e.to_string())?;
        extracted += (res.forgery_valid && res.witness_extracted) as usize;
    }
    ensure(extracted >= 99, || format!("extracted {extracted}/100"))?;

    let mut r = rng(9);
    let mut false_accepts = 0;
    for _ in 0..10_000 {
        let (inst, colors) = improper_case(&mut r);
        let messages: Vec<Option<OpenedMessage>> = colors
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                Some(OpenedMessage {
                    index: i as u16,
                    color: c,
                    rand: vec![i as u8; 16],
                })
            })
            .collect();
        false_accepts += sigma_extract(&inst, &messages).is_ok() as usize;
    }
    ensure(false_accepts == 0, || format!("{false_accepts} improper colorings accepted"))?;
    Ok(format!("extracted {extracted}/100, 0/10000 false accepts"))
}

fn hvzk() -> Outcome {
    let mut r = rng(10);
    let (inst, w) = sigma_gen(4, 1.0, 128, &mut r).map_err(|e| e.to_string())?;
    let sim = hvzk_distance_estimate(&inst, &w, 60_000, 1);
    ensure(sim < 0.02, || format!("simulator distance {sim}"))?;
    let biased = hvzk_distance_with(&inst, &w, 60_000, HvzkSimulator::Biased, 2);
    ensure(biased > 0.1, || format!("biased fixture distance {biased}"))?;
    Ok(format!("simulator {sim:.4}, biased fixture {biased:.4}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact preimage", exact_preimage),
        ("ring signature round trips", round_trips),
        ("Klein sampler law", klein_law),
        ("NTRU algebra", ntru_algebra),
        ("DJ counterexample", dj_counterexample),
        ("Grover tightness band", grover_band),
        ("bound calculator goldens", bound_goldens),
        ("ANON statistical shadow", anon_shadow),
        ("extraction", extraction),
        ("HVZK distance", hvzk),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
