//! `ringforge` command-line front end.
//!
//! Exit codes: 0 success or accept, 1 signature rejected, 2 invalid
//! parameters, 3 malformed file, 4 signer not in ring, 5 any other failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use ringforge::bounds::{evaluate, sweep, BoundParams, BoundsError, Theorem};
use ringforge::codec::{self, CodecError};
use ringforge::games::{
    aos_scheme, run_anon, run_sufcra, run_ufcra1, run_ufnra_with_extraction, AnonAdversary, AosSetup,
    BudgetExceedingAdversary, CanaryAdversary, DuplicateQueryAdversary, FabricatedCommitmentAdversary,
    ForgeryAdversary, GameConfig, GameError, GarbageAdversary, HonestProverAdversary, NoQueryAdversary,
    NormStatisticAdversary, RandomGuessAdversary, ReplayAdversary, RerandomizeAdversary, StolenKeyAdversary,
};
use ringforge::lab::{
    dj_ratio_closed_form, dj_ratio_monte_carlo, grover_tightness, repro_classical_check, small_range_run,
    DjConfig, GroverConfig, LabError, ReproConfig, SmallRangeConfig,
};
use ringforge::random_oracle::Shake256Oracle;
use ringforge::ringsig::{AosScheme, Ring, RingSigError, RingSignatureScheme, RpsfScheme};
use ringforge::rpsf::{rpsf_setup, RpsfConfig};

#[derive(Parser)]
#[command(name = "ringforge", version, about = "Ring signatures, security games, bound evaluation and oracle experiments")]
struct Cli {
    /// RNG seed for every randomized step.
    #[arg(long, global = true, env = "RINGFORGE_SEED")]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo trials (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair, writing <OUT>.pk and <OUT>.sk.
    Keygen {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sign a message file for a ring of public-key files.
    Sign {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        sk: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        ring: Vec<PathBuf>,
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a signature; exits 0 on accept and 1 on reject.
    Verify {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        ring: Vec<PathBuf>,
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Evaluate concrete-security bounds.
    Bounds {
        #[command(subcommand)]
        action: BoundsCommand,
    },
    /// Run a security game.
    Game {
        #[command(subcommand)]
        action: GameCommand,
    },
    /// Run an oracle-switching experiment from a JSON config.
    Lab {
        experiment: LabExperiment,
        #[arg(long)]
        config: PathBuf,
        /// Emit per-trial rows as CSV instead of a JSON report.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Evaluate one theorem and print a JSON report.
    Eval {
        #[arg(long)]
        theorem: String,
        /// JSON object of parameters; omitted fields take neutral defaults.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Evaluate a theorem while one parameter takes each listed value.
    Sweep {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Subcommand)]
enum GameCommand {
    /// Play a game and print a JSON summary.
    Run(GameArgs),
}

#[derive(Args)]
struct GameArgs {
    #[arg(long)]
    game: GameKind,
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    adversary: String,
    #[arg(long, default_value_t = 2)]
    ring_size: usize,
    /// Signing or challenge query budget.
    #[arg(long, default_value_t = 4)]
    budget: usize,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Hand this honest secret key to the adversary (harness control).
    /// The honest-prover adversary defaults to key 0.
    #[arg(long)]
    leak_key: Option<usize>,
    /// Reveal the anonymity challenge bit (harness control).
    #[arg(long)]
    leak_challenge_bit: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GameKind {
    Sufcra,
    Ufcra1,
    Anon,
    Ufnra,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabExperiment {
    Dj,
    Grover,
    SmallRange,
    Repro,
}

/// Scheme parameter file.
#[derive(Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase", deny_unknown_fields)]
enum SchemeParams {
    Rpsf {
        rpsf: RpsfConfig,
        #[serde(default = "default_salt_bits")]
        salt_bits: usize,
    },
    Aos {
        aos: AosSetup,
    },
}

fn default_salt_bits() -> usize {
    ringforge::ringsig::DEFAULT_SALT_BITS
}

enum Scheme {
    Rpsf(RpsfScheme),
    Aos(AosScheme<Shake256Oracle>, AosSetup),
}

#[derive(Debug)]
enum CliError {
    Params(String),
    Format(String),
    SignerNotInRing,
    Other(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Params(_) => 2,
            CliError::Format(_) => 3,
            CliError::SignerNotInRing => 4,
            CliError::Other(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Params(m) => write!(f, "invalid parameters: {m}"),
            CliError::Format(m) => write!(f, "format error: {m}"),
            CliError::SignerNotInRing => f.write_str("signer's public key is not in the ring"),
            CliError::Other(m) => f.write_str(m),
        }
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::ParamMismatch(_) => CliError::Params(e.to_string()),
            _ => CliError::Format(e.to_string()),
        }
    }
}

impl From<RingSigError> for CliError {
    fn from(e: RingSigError) -> Self {
        match e {
            RingSigError::SignerNotInRing => CliError::SignerNotInRing,
            RingSigError::InvalidRing(_) | RingSigError::InvalidConfig(_) => CliError::Params(e.to_string()),
            RingSigError::Format => CliError::Format(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::InvalidConfig(_) => CliError::Params(e.to_string()),
            GameError::Scheme(inner) => inner.into(),
            GameError::AdversaryProtocolViolation(_) => CliError::Other(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        CliError::Params(e.to_string())
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        CliError::Params(e.to_string())
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let bytes = read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Params(format!("{}: {e}", path.display())))
}

fn load_scheme(path: &Path) -> Result<Scheme, CliError> {
    match read_json::<SchemeParams>(path)? {
        SchemeParams::Rpsf { rpsf, salt_bits } => {
            let params = rpsf_setup(&rpsf).map_err(|e| CliError::Params(e.to_string()))?;
            Ok(Scheme::Rpsf(RpsfScheme::new(params, salt_bits)?))
        }
        SchemeParams::Aos { aos } => {
            if aos.kappa == 0 || aos.lambda_r == 0 || aos.lambda_r % 8 != 0 || aos.vertices < 2 {
                return Err(CliError::Params("aos needs kappa ≥ 1, vertices ≥ 2, lambda_r a positive multiple of 8".into()));
            }
            Ok(Scheme::Aos(aos_scheme(&aos), aos))
        }
    }
}

fn print_json(value: &Value) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Other(e.to_string()))?;
    writeln!(out).map_err(|e| CliError::Other(e.to_string()))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn csv_writer() -> csv::Writer<io::Stdout> {
    csv::Writer::from_writer(io::stdout())
}

/// Shortest round-trip float text; non-finite values as `inf`/`nan`.
fn num(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite float")
    } else {
        x.to_string()
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Other(e.to_string())
}

fn cmd_keygen(params: &Path, out: &Path, seed: u64) -> Result<(), CliError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (pk, sk) = match load_scheme(params)? {
        Scheme::Rpsf(s) => {
            let (pk, sk) = s.keygen(&mut rng)?;
            (codec::encode_rpsf_public_key(&pk), codec::encode_rpsf_secret_key(&sk))
        }
        Scheme::Aos(s, _) => {
            let (pk, sk) = s.keygen(&mut rng)?;
            (codec::encode_aos_public_key(&pk), codec::encode_aos_secret_key(&sk))
        }
    };
    let with_ext = |ext: &str| {
        let mut p = out.as_os_str().to_owned();
        p.push(ext);
        PathBuf::from(p)
    };
    write(&with_ext(".pk"), &pk)?;
    write(&with_ext(".sk"), &sk)
}

fn load_ring<K: ringforge::ringsig::RingKey + Clone>(
    files: &[PathBuf],
    kappa: usize,
    decode: impl Fn(&[u8]) -> Result<K, CodecError>,
) -> Result<Ring<K>, CliError> {
    let keys = files
        .iter()
        .map(|f| Ok(decode(&read(f)?)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Ring::new(keys, kappa)?)
}

fn check_rpsf_ring(s: &RpsfScheme, ring: &Ring<ringforge::rpsf::RpsfPublicKey>) -> Result<(), CliError> {
    if ring.keys().iter().any(|k| k.h().params() != s.params.ring) {
        return Err(CliError::Params("public key ring degree or modulus differs from params".into()));
    }
    Ok(())
}

fn cmd_sign(params: &Path, sk: &Path, ring: &[PathBuf], message: &Path, out: &Path, seed: u64) -> Result<(), CliError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let msg = read(message)?;
    let sk_bytes = read(sk)?;
    let sig = match load_scheme(params)? {
        Scheme::Rpsf(s) => {
            let sk = codec::decode_rpsf_secret_key(&sk_bytes)?;
            let ring = load_ring(ring, s.kappa(), codec::decode_rpsf_public_key)?;
            check_rpsf_ring(&s, &ring)?;
            let sig = s.sign(&sk, &ring, &msg, &mut rng)?;
            codec::encode_rpsf_signature(&s, &sig)
        }
        Scheme::Aos(s, _) => {
            let sk = codec::decode_aos_secret_key(&sk_bytes)?;
            let ring = load_ring(ring, s.kappa(), codec::decode_aos_public_key)?;
            let sig = s.sign(&sk, &ring, &msg, &mut rng)?;
            codec::encode_aos_signature(&s, &sig)
        }
    };
    write(out, &sig)
}

fn cmd_verify(params: &Path, ring: &[PathBuf], message: &Path, sig: &Path) -> Result<bool, CliError> {
    let msg = read(message)?;
    let sig_bytes = read(sig)?;
    Ok(match load_scheme(params)? {
        Scheme::Rpsf(s) => {
            let ring = load_ring(ring, s.kappa(), codec::decode_rpsf_public_key)?;
            check_rpsf_ring(&s, &ring)?;
            let sig = codec::decode_rpsf_signature(&s, &sig_bytes)?;
            s.verify(&ring, &msg, &sig)
        }
        Scheme::Aos(s, _) => {
            let ring = load_ring(ring, s.kappa(), codec::decode_aos_public_key)?;
            let sig = codec::decode_aos_signature(&s, &sig_bytes)?;
            s.verify(&ring, &msg, &sig)
        }
    })
}

fn load_bound_params(path: Option<&Path>) -> Result<BoundParams, CliError> {
    match path {
        Some(p) => read_json(p),
        None => Ok(BoundParams::default()),
    }
}

fn cmd_bounds(action: &BoundsCommand) -> Result<(), CliError> {
    match action {
        BoundsCommand::Eval { theorem, params } => {
            let theorem: Theorem = theorem.parse()?;
            let report = evaluate(theorem, &load_bound_params(params.as_deref())?)?;
            let mut v = to_value(&report);
            v["clamped"] = to_value(&report.clamped());
            print_json(&v)
        }
        BoundsCommand::Sweep { theorem, params, param, values, csv } => {
            let theorem: Theorem = theorem.parse()?;
            let rows = sweep(theorem, &load_bound_params(params.as_deref())?, param, values)?;
            if !csv {
                let rows: Vec<Value> = rows
                    .iter()
                    .map(|(x, r)| json!({ "value": x, "bounds": r.bounds, "terms": r.terms }))
                    .collect();
                return print_json(&json!({ "theorem": theorem.to_string(), "param": param, "rows": rows }));
            }
            let mut w = csv_writer();
            if let Some((_, first)) = rows.first() {
                let mut head = vec![param.clone()];
                head.extend(first.bounds.keys().cloned());
                head.extend(first.terms.keys().map(|k| format!("term:{k}")));
                w.write_record(&head).map_err(csv_err)?;
            }
            for (x, r) in &rows {
                let mut rec = vec![num(*x)];
                rec.extend(r.bounds.values().copied().map(num));
                rec.extend(r.terms.values().copied().map(num));
                w.write_record(&rec).map_err(csv_err)?;
            }
            w.flush().map_err(|e| CliError::Other(e.to_string()))
        }
    }
}

fn forgery_adversary<S: RingSignatureScheme>(name: &str) -> Result<Box<dyn ForgeryAdversary<S>>, CliError> {
    Ok(match name {
        "replay" => Box::new(ReplayAdversary),
        "stolen-key" => Box::new(StolenKeyAdversary),
        "rerandomize" => Box::new(RerandomizeAdversary),
        "duplicate-query" => Box::<DuplicateQueryAdversary>::default(),
        "budget-exceeding" => Box::new(BudgetExceedingAdversary),
        other => return Err(CliError::Params(format!("unknown forgery adversary {other:?}"))),
    })
}

fn forgery_games<S: RingSignatureScheme>(scheme: &S, args: &GameArgs, base: &GameConfig) -> Result<Value, CliError> {
    let mut results = Vec::new();
    let mut wins = 0u64;
    for trial in 0..args.trials {
        let mut config = base.clone();
        config.seed = base.seed.wrapping_add(trial);
        let mut adv = forgery_adversary::<S>(&args.adversary)?;
        let outcome = match args.game {
            GameKind::Sufcra => run_sufcra(scheme, &config, adv.as_mut()),
            _ => run_ufcra1(scheme, &config, adv.as_mut()),
        };
        match outcome {
            Ok(r) => {
                wins += u64::from(r.won);
                results.push(to_value(&r));
            }
            Err(GameError::AdversaryProtocolViolation(m)) => {
                results.push(json!({ "won": false, "protocol_violation": m }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(json!({ "trials": args.trials, "wins": wins, "results": results }))
}

fn anon_game<S, A>(scheme: &S, config: &GameConfig, trials: u64, make: fn() -> A) -> Result<Value, CliError>
where
    S: RingSignatureScheme + Sync,
    A: AnonAdversary<S>,
{
    Ok(to_value(&run_anon(scheme, config, make, trials)?))
}

fn cmd_game(args: &GameArgs, seed: u64) -> Result<(), CliError> {
    if args.trials == 0 {
        return Err(CliError::Params("trials must be at least 1".into()));
    }
    let mut config = GameConfig::new(args.ring_size, args.budget, seed);
    config.leak_key = args
        .leak_key
        .or_else(|| (args.adversary == "honest-prover").then_some(0));
    config.leak_challenge_bit = args.leak_challenge_bit;
    let scheme = load_scheme(&args.params)?;
    let report = match (args.game, &scheme) {
        (GameKind::Sufcra | GameKind::Ufcra1, Scheme::Rpsf(s)) => forgery_games(s, args, &config)?,
        (GameKind::Sufcra | GameKind::Ufcra1, Scheme::Aos(s, _)) => forgery_games(s, args, &config)?,
        (GameKind::Anon, Scheme::Rpsf(s)) => match args.adversary.as_str() {
            "random" => anon_game(s, &config, args.trials, || RandomGuessAdversary)?,
            "canary" => anon_game(s, &config, args.trials, || CanaryAdversary)?,
            "norm-statistic" => anon_game(s, &config, args.trials, || NormStatisticAdversary)?,
            other => return Err(CliError::Params(format!("unknown anonymity adversary {other:?}"))),
        },
        (GameKind::Anon, Scheme::Aos(s, _)) => match args.adversary.as_str() {
            "random" => anon_game(s, &config, args.trials, || RandomGuessAdversary)?,
            "canary" => anon_game(s, &config, args.trials, || CanaryAdversary)?,
            other => return Err(CliError::Params(format!("unknown anonymity adversary {other:?} for aos"))),
        },
        (GameKind::Ufnra, Scheme::Aos(_, setup)) => {
            let mut results = Vec::new();
            let (mut valid, mut extracted) = (0u64, 0u64);
            for trial in 0..args.trials {
                let mut adv: Box<dyn NoQueryAdversary> = match args.adversary.as_str() {
                    "honest-prover" => Box::new(HonestProverAdversary),
                    "garbage" => Box::new(GarbageAdversary),
                    "fabricated-commitment" => Box::new(FabricatedCommitmentAdversary),
                    other => return Err(CliError::Params(format!("unknown no-query adversary {other:?}"))),
                };
                let mut c = config.clone();
                c.seed = seed.wrapping_add(trial);
                let (r, _) = run_ufnra_with_extraction(setup, &c, adv.as_mut())?;
                valid += u64::from(r.forgery_valid);
                extracted += u64::from(r.witness_extracted);
                results.push(to_value(&r));
            }
            json!({ "trials": args.trials, "valid_forgeries": valid, "extractions": extracted, "results": results })
        }
        (GameKind::Ufnra, Scheme::Rpsf(_)) => {
            return Err(CliError::Params("the extraction game runs on the aos scheme only".into()))
        }
    };
    print_json(&report)
}

fn cmd_lab(experiment: LabExperiment, config: &Path, csv: bool, seed: Option<u64>) -> Result<(), CliError> {
    match experiment {
        LabExperiment::Dj => {
            let mut cfg: DjConfig = read_json(config)?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            let closed = dj_ratio_closed_form(&cfg)?;
            let mc = dj_ratio_monte_carlo(&cfg)?;
            if csv {
                let mut w = csv_writer();
                w.write_record(["draw", "z_p", "z_q"]).map_err(csv_err)?;
                for (i, (p, q)) in mc.z_p.iter().zip(&mc.z_q).enumerate() {
                    w.write_record([i.to_string(), p.to_string(), q.to_string()]).map_err(csv_err)?;
                }
                return w.flush().map_err(|e| CliError::Other(e.to_string()));
            }
            print_json(&json!({ "closed_form": closed, "monte_carlo": mc }))
        }
        LabExperiment::Grover => {
            let mut cfg: GroverConfig = read_json(config)?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            let report = grover_tightness(&cfg)?;
            if csv {
                let mut w = csv_writer();
                for t in &report.trials {
                    w.serialize(t).map_err(csv_err)?;
                }
                return w.flush().map_err(|e| CliError::Other(e.to_string()));
            }
            print_json(&to_value(&report))
        }
        LabExperiment::SmallRange => {
            let mut cfg: SmallRangeConfig = read_json(config)?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            let report = small_range_run(&cfg)?;
            if csv {
                let mut w = csv_writer();
                w.write_record(["x", "y"]).map_err(csv_err)?;
                for (x, y) in report.table.iter().enumerate() {
                    w.write_record([x.to_string(), y.clone()]).map_err(csv_err)?;
                }
                return w.flush().map_err(|e| CliError::Other(e.to_string()));
            }
            print_json(&to_value(&report))
        }
        LabExperiment::Repro => {
            let mut cfg: ReproConfig = read_json(config)?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            let report = repro_classical_check(&cfg)?;
            if csv {
                let mut w = csv_writer();
                w.serialize(&report).map_err(csv_err)?;
                return w.flush().map_err(|e| CliError::Other(e.to_string()));
            }
            print_json(&to_value(&report))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Keygen { params, out } => cmd_keygen(params, out, seed)?,
        Command::Sign { params, sk, ring, message, out } => cmd_sign(params, sk, ring, message, out, seed)?,
        Command::Verify { params, ring, message, sig } => {
            let ok = cmd_verify(params, ring, message, sig)?;
            println!("{}", if ok { "accept" } else { "reject" });
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Bounds { action } => cmd_bounds(action)?,
        Command::Game { action: GameCommand::Run(args) } => cmd_game(args, seed)?,
        Command::Lab { experiment, config, csv } => cmd_lab(*experiment, config, *csv, cli.seed)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
