//! Subcommand definitions and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use rsp_core::protocols::{
    column_epsilon, entangled_rsp_round, net_only_protocol, teleport, ColumnRunner,
    EntangledParams, Message, PiRunner, Transcript,
};
use rsp_core::qmath::{LabeledState, StateJson};
use rsp_core::randomize::{
    build_randomizing_set, epsilon_net, verify_randomizing, weyl_set, UnitarySet,
};
use rsp_core::sampling::Rng;
use rsp_core::stats::binomial_sigma;
use rsp_core::tradeoff::{
    brute_force_oracle, entangled_endpoints, solve_curve_with, CurveEval, CurveKind, EnsembleFile,
    SolverParams,
};
use rsp_core::typicality::{typical_projector, TypeVector};
use rsp_core::verify::{self, Scale};

use crate::output::{emit, json_document, sidecar_path, Format, Meta};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(#[from] rsp_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Json(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Core(rsp_core::Error::BudgetExceeded(_)) => 3,
            CliError::Core(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rsp",
    version = rsp_core::VERSION,
    about = "Remote state preparation experiments: randomizing sets, protocols, trade-off curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Rayon worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a randomizing unitary set and verify it.
    Randomize(RandomizeArgs),
    /// Run a remote-state-preparation protocol batch.
    Rsp(RspArgs),
    /// Sweep a trade-off curve over cbit rates.
    Tradeoff(TradeoffArgs),
    /// Entangled-ensemble endpoints and a protocol round.
    Entangled(EntangledArgs),
    /// Typicality report for a diagonal qubit/qudit state.
    Typicality(TypicalityArgs),
    /// Run the full verification battery.
    VerifyAll(VerifyAllArgs),
}

pub fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Randomize(args) => cmd_randomize(args),
        Command::Rsp(args) => cmd_rsp(args),
        Command::Tradeoff(args) => cmd_tradeoff(args),
        Command::Entangled(args) => cmd_entangled(args),
        Command::Typicality(args) => cmd_typicality(args),
        Command::VerifyAll(args) => cmd_verify_all(args),
    }
}

// ---------------------------------------------------------------------------
// randomize
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct RandomizeArgs {
    /// Hilbert space dimension.
    #[arg(long)]
    pub d: usize,
    /// Target accuracy ε (ignored for --mode weyl).
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// haar: theorem-sized random set; weyl: the exact D² set.
    #[arg(long, default_value = "haar")]
    pub mode: String,
    #[arg(long)]
    pub seed: u64,
    /// Construction retries before giving up.
    #[arg(long, default_value_t = 3)]
    pub retries: usize,
    /// Monte Carlo probe pairs for the verifier.
    #[arg(long, default_value_t = 512)]
    pub probes: usize,
    /// Alternating-ascent restarts for the verifier.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Also write the set itself (JSON) here.
    #[arg(long)]
    pub set_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

fn cmd_randomize(args: RandomizeArgs) -> Result<u8, CliError> {
    let (set, report) = match args.mode.as_str() {
        "weyl" => {
            let set = weyl_set(args.d);
            let report = verify_randomizing(
                &set,
                args.probes,
                args.restarts,
                &Rng::with_stream(args.seed, 1),
            );
            (set, report)
        }
        "haar" => build_randomizing_set(args.d, args.epsilon, &Rng::new(args.seed), args.retries)?,
        other => return Err(CliError::Usage(format!("unknown mode {other}"))),
    };
    let results = json!({
        "k": set.len(),
        "dev_max": report.dev_max,
        "dev_min": report.dev_min,
        "threshold": report.threshold,
        "pass": report.pass,
        "heuristic": report.heuristic,
    });
    if let Some(path) = &args.set_out {
        emit(Some(path), &serde_json::to_string_pretty(&set.to_json())?)?;
    }
    let pass = report.pass;
    let meta = Meta::new("randomize", &args);
    match args.format {
        Format::Json | Format::Jsonl => emit(args.out.as_ref(), &json_document(&meta, &results)?)?,
        Format::Csv => {
            let mut text = meta.csv_header()?;
            text.push_str("k,dev_max,dev_min,threshold,pass\n");
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                set.len(),
                report.dev_max,
                report.dev_min,
                report.threshold,
                report.pass
            ));
            emit(args.out.as_ref(), &text)?;
        }
    }
    if pass {
        Ok(0)
    } else {
        Err(CliError::Verification(format!(
            "set deviation {:.4e} exceeds ε/D = {:.4e}",
            report.dev(),
            report.threshold
        )))
    }
}

// ---------------------------------------------------------------------------
// rsp (protocol batches)
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct RspArgs {
    /// pi | column | net | teleport
    #[arg(long)]
    pub protocol: String,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    /// Randomizing-set accuracy for pi (haar mode).
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Use the exact Weyl set for pi.
    #[arg(long, default_value_t = false)]
    pub weyl: bool,
    /// Copies K for the column method.
    #[arg(long, default_value_t = 3)]
    pub copies: usize,
    /// Fidelity slack ε′ for the net protocol.
    #[arg(long, default_value_t = 0.06)]
    pub eps_prime: f64,
    /// Candidate budget for net construction.
    #[arg(long, default_value_t = 200_000)]
    pub net_candidates: usize,
    /// Target state as a JSON file {dims, re, im}; Haar-random otherwise.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Include receiver output matrices in JSONL transcripts.
    #[arg(long, default_value_t = false)]
    pub emit_states: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Serialize)]
struct TranscriptJson<'a> {
    protocol: &'a str,
    input: &'a str,
    message: &'a Message,
    success: bool,
    cbits_sent: f64,
    ebits_consumed: f64,
    fidelity_to_target: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_cbits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    receiver_output: Option<StateJson>,
}

fn transcript_line(t: &Transcript, emit_states: bool) -> Result<String, CliError> {
    let row = TranscriptJson {
        protocol: &t.protocol,
        input: &t.input,
        message: &t.message,
        success: t.success,
        cbits_sent: t.cbits_sent,
        ebits_consumed: t.ebits_consumed,
        fidelity_to_target: t.fidelity_to_target,
        expected_cbits: t.expected_cbits,
        receiver_output: emit_states.then(|| StateJson::from_density(&t.receiver_output)),
    };
    Ok(serde_json::to_string(&row)?)
}

fn cmd_rsp(args: RspArgs) -> Result<u8, CliError> {
    if args.trials == 0 {
        return Err(CliError::Usage("need --trials ≥ 1".into()));
    }
    let mut rng = Rng::new(args.seed);
    let psi = match &args.state {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let parsed: StateJson = serde_json::from_str(&text)?;
            parsed.to_pure()?
        }
        None => rng.pure_state(args.d),
    };
    if psi.dim() != args.d {
        return Err(CliError::Usage(format!(
            "state dimension {} does not match --d {}",
            psi.dim(),
            args.d
        )));
    }

    let mut run_rng = rng.split(1);
    let transcripts: Vec<Transcript> = match args.protocol.as_str() {
        "pi" => {
            let set: UnitarySet = if args.weyl {
                weyl_set(args.d)
            } else {
                build_randomizing_set(args.d, args.epsilon, &rng.split(2), 3)?.0
            };
            let runner = PiRunner::new(&psi, &set)?;
            (0..args.trials).map(|_| runner.run(&mut run_rng)).collect()
        }
        "column" => {
            let runner = ColumnRunner::new(&psi, args.d, args.copies)?;
            (0..args.trials).map(|_| runner.run(&mut run_rng)).collect()
        }
        "net" => {
            // Each trial draws its own target; the net is fixed.
            let eps_net = (4.0 * args.eps_prime).sqrt();
            let net = epsilon_net(args.d, eps_net, &mut rng.split(3), args.net_candidates)?;
            (0..args.trials)
                .map(|_| net_only_protocol(&run_rng.pure_state(args.d), &net))
                .collect::<Result<Vec<_>, _>>()?
        }
        "teleport" => {
            let input = LabeledState::from_density("S", &psi.density());
            (0..args.trials)
                .map(|_| teleport(&input, "S", &mut run_rng).map(|o| o.transcript))
                .collect::<Result<Vec<_>, _>>()?
        }
        other => return Err(CliError::Usage(format!("unknown protocol {other}"))),
    };

    let successes = transcripts.iter().filter(|t| t.success).count();
    let success_rate = successes as f64 / transcripts.len() as f64;
    let mean_fidelity: f64 = transcripts
        .iter()
        .map(|t| t.fidelity_to_target)
        .sum::<f64>()
        / transcripts.len() as f64;
    let cbits = transcripts[0].cbits_sent;
    let ebits = transcripts[0].ebits_consumed;
    let sigma = binomial_sigma(success_rate, transcripts.len());
    let params = match args.protocol.as_str() {
        "pi" => format!("epsilon={};weyl={}", args.epsilon, args.weyl),
        "column" => format!(
            "copies={};eps={}",
            args.copies,
            column_epsilon(args.d, args.copies)
        ),
        "net" => format!("eps_prime={}", args.eps_prime),
        _ => String::new(),
    };
    let meta = Meta::new("rsp", &args);
    match args.format {
        Format::Csv => {
            let mut text = meta.csv_header()?;
            text.push_str(
                "protocol,d,params,trials,success_rate,success_sigma,mean_fidelity,cbits,ebits\n",
            );
            text.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                args.protocol,
                args.d,
                params,
                transcripts.len(),
                success_rate,
                sigma,
                mean_fidelity,
                cbits,
                ebits
            ));
            emit(args.out.as_ref(), &text)?;
        }
        Format::Jsonl => {
            let mut text = String::new();
            text.push_str(&serde_json::to_string(&json!({"meta": &meta}))?);
            text.push('\n');
            for t in &transcripts {
                text.push_str(&transcript_line(t, args.emit_states)?);
                text.push('\n');
            }
            emit(args.out.as_ref(), &text)?;
        }
        Format::Json => {
            let results = json!({
                "protocol": args.protocol,
                "d": args.d,
                "params": params,
                "trials": transcripts.len(),
                "success_rate": success_rate,
                "success_sigma": sigma,
                "mean_fidelity": mean_fidelity,
                "cbits": cbits,
                "ebits": ebits,
            });
            emit(args.out.as_ref(), &json_document(&meta, &results)?)?;
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// tradeoff
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct TradeoffArgs {
    /// Ensemble file {dims, probs, states, cut?}.
    #[arg(long)]
    pub ensemble: PathBuf,
    /// qct | rsp | entangled
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub r_min: f64,
    #[arg(long)]
    pub r_max: f64,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long)]
    pub seed: u64,
    /// Add a brute-force oracle column at this grid step.
    #[arg(long, default_value_t = false)]
    pub oracle: bool,
    #[arg(long, default_value_t = 0.05)]
    pub grid_step: f64,
    /// Emit the (R+Q, Q) transform of a qct curve alongside.
    #[arg(long, default_value_t = false)]
    pub qct_to_rsp: bool,
    /// Oracle channel budget.
    #[arg(long, default_value_t = 200_000_000)]
    pub budget: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn cmd_tradeoff(args: TradeoffArgs) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&args.ensemble)?;
    let file: EnsembleFile = serde_json::from_str(&text)?;
    let kind = match args.kind.as_str() {
        "qct" => CurveKind::QStar,
        "rsp" => CurveKind::EStar,
        "entangled" => CurveKind::EntangledN,
        other => return Err(CliError::Usage(format!("unknown kind {other}"))),
    };
    let eval = match kind {
        CurveKind::EntangledN => CurveEval::for_bipartite(&file.to_bipartite()?)?,
        _ => CurveEval::for_ensemble(&file.to_ensemble()?, kind)?,
    };
    if args.steps < 2 || args.r_max < args.r_min {
        return Err(CliError::Usage("need steps ≥ 2 and r_max ≥ r_min".into()));
    }
    let params = SolverParams::default();
    let rng = Rng::new(args.seed);
    let rs: Vec<f64> = (0..args.steps)
        .map(|i| args.r_min + (args.r_max - args.r_min) * i as f64 / (args.steps - 1) as f64)
        .collect();
    let points: Vec<_> = rs
        .iter()
        .enumerate()
        .map(|(i, &r)| solve_curve_with(&eval, r, &params, &rng.split(i as u64)))
        .collect();
    let oracle: Option<Vec<f64>> = if args.oracle {
        Some(
            rs.iter()
                .map(|&r| brute_force_oracle(&eval, r, args.grid_step, args.budget))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        None
    };

    let meta = Meta::new("tradeoff", &args);
    let mut csv = meta.csv_header()?;
    let mut header = String::from("r,value,channel_hash");
    if args.oracle {
        header.push_str(",oracle");
    }
    if args.qct_to_rsp {
        header.push_str(",r_plus_q,q");
    }
    csv.push_str(&header);
    csv.push('\n');
    for (i, p) in points.iter().enumerate() {
        let mut row = format!("{},{},{:016x}", p.r, p.value, p.channel.hash());
        if let Some(oracle) = &oracle {
            row.push_str(&format!(",{}", oracle[i]));
        }
        if args.qct_to_rsp {
            let (rq, q) = rsp_core::tradeoff::qct_to_rsp_point(p.r, p.value);
            row.push_str(&format!(",{rq},{q}"));
        }
        csv.push_str(&row);
        csv.push('\n');
    }
    match args.format {
        Format::Csv => emit(args.out.as_ref(), &csv)?,
        Format::Json | Format::Jsonl => {
            let rows: Vec<_> = points
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    json!({
                        "r": p.r,
                        "value": p.value,
                        "channel_hash": format!("{:016x}", p.channel.hash()),
                        "oracle": oracle.as_ref().map(|o| o[i]),
                    })
                })
                .collect();
            emit(args.out.as_ref(), &json_document(&meta, &rows)?)?;
        }
    }
    // Channel sidecar rides along when writing to a file.
    if let Some(out) = &args.out {
        let channels: Vec<_> = points
            .iter()
            .map(|p| {
                json!({
                    "r": p.r,
                    "value": p.value,
                    "hash": format!("{:016x}", p.channel.hash()),
                    "channel": p.channel.rows(),
                })
            })
            .collect();
        let side = sidecar_path(out, ".channels.json");
        emit(
            Some(&side),
            &format!("{}\n", serde_json::to_string_pretty(&channels)?),
        )?;
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// entangled
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct EntangledArgs {
    /// Bipartite ensemble file (must carry `cut`).
    #[arg(long)]
    pub ensemble: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Input letters, comma separated; sampled i.i.d. from p when absent.
    #[arg(long)]
    pub letters: Option<String>,
    /// Block length when sampling letters.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 0.4)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    /// Unitary count override (default: the union-bound formula).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

fn cmd_entangled(args: EntangledArgs) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&args.ensemble)?;
    let file: EnsembleFile = serde_json::from_str(&text)?;
    let ens = file.to_bipartite()?;
    let endpoints = entangled_endpoints(&ens);
    let mut rng = Rng::new(args.seed);
    let letters: Vec<usize> = match &args.letters {
        Some(text) => text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("bad letter {s}")))
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => {
            let probs = ens.probs().to_vec();
            (0..args.n)
                .map(|_| {
                    let x = rng.uniform();
                    let mut acc = 0.0;
                    for (i, &p) in probs.iter().enumerate() {
                        acc += p;
                        if x < acc {
                            return i;
                        }
                    }
                    probs.len() - 1
                })
                .collect()
        }
    };
    let params = EntangledParams {
        delta: args.delta,
        epsilon: args.epsilon,
        k_override: args.k,
        ..Default::default()
    };
    let round = match entangled_rsp_round(&letters, &ens, &params, &mut rng.split(1)) {
        Ok(round) => Some(round),
        Err(rsp_core::Error::Abort(reason)) => {
            eprintln!("round aborted: {reason}");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let meta = Meta::new("entangled", &args);
    let results = json!({
        "endpoints": {
            "r_start_chi": endpoints.r_start,
            "e_start": endpoints.e_start,
            "e_floor": endpoints.e_floor,
            "r_floor": endpoints.r_floor,
        },
        "letters": letters,
        "round": round.as_ref().map(|r| json!({
            "success": r.transcript.success,
            "message": r.transcript.message,
            "cbits_sent": r.transcript.cbits_sent,
            "ebits_consumed": r.transcript.ebits_consumed,
            "fidelity_to_target": r.transcript.fidelity_to_target,
            "fidelity_bound": r.fidelity_bound,
            "typical_dim": r.typical_dim,
            "tr_pi": r.tr_pi,
            "eps_typ": r.eps_typ,
            "k_used": r.k_used,
        })),
        "aborted": round.is_none(),
    });
    emit(args.out.as_ref(), &json_document(&meta, &results)?)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// typicality
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct TypicalityArgs {
    /// Eigenvalues of the source state, comma separated (normalized).
    #[arg(long, default_value = "0.75,0.25")]
    pub probs: String,
    /// Largest block length to report.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

fn cmd_typicality(args: TypicalityArgs) -> Result<u8, CliError> {
    let probs: Vec<f64> = args
        .probs
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad probability {s}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(CliError::Usage(format!("probabilities sum to {total}")));
    }
    let rho = rsp_core::qmath::DensityOperator::new(rsp_core::linalg::CMat::diag(&probs))
        .map_err(CliError::Core)?;
    let entropy = rsp_core::qmath::entropy_bits(&probs);
    let mut rows = Vec::new();
    for n in 1..=args.n {
        let proj = typical_projector(&rho, n, args.delta)?;
        let rank = proj.rank();
        let weight = proj.weight();
        let upper = 2f64.powf(n as f64 * (entropy + args.delta));
        let lower = (weight) * 2f64.powf(n as f64 * (entropy - args.delta));
        // Type-class counting sandwich at the flattest type.
        let counts: Vec<usize> = probs
            .iter()
            .map(|&p| (p * n as f64).round() as usize)
            .collect();
        let type_ok = if counts.iter().sum::<usize>() == n {
            rsp_core::typicality::type_sandwich_holds(&TypeVector::from_counts(counts))
        } else {
            true
        };
        rows.push(json!({
            "n": n,
            "rank": rank,
            "weight": weight,
            "rank_upper": upper,
            "rank_lower": lower,
            "rank_within_bounds": (rank as f64) <= upper + 1e-9 && (rank as f64) >= lower - 1e-9,
            "type_sandwich": type_ok,
        }));
    }
    let meta = Meta::new("typicality", &args);
    match args.format {
        Format::Csv => {
            let mut text = meta.csv_header()?;
            text.push_str("n,rank,weight,rank_upper,rank_lower,rank_within_bounds\n");
            for row in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row["n"],
                    row["rank"],
                    row["weight"],
                    row["rank_upper"],
                    row["rank_lower"],
                    row["rank_within_bounds"]
                ));
            }
            emit(args.out.as_ref(), &text)?;
        }
        Format::Json | Format::Jsonl => {
            emit(args.out.as_ref(), &json_document(&meta, &rows)?)?;
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify-all
// ---------------------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct VerifyAllArgs {
    #[arg(long)]
    pub seed: u64,
    /// Divide Monte Carlo budgets by 10.
    #[arg(long, default_value_t = false)]
    pub quick: bool,
    /// Run only these criteria (comma-separated ids like C01,C12).
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn cmd_verify_all(args: VerifyAllArgs) -> Result<u8, CliError> {
    let scale = if args.quick {
        Scale::Quick
    } else {
        Scale::Full
    };
    let wanted: Option<Vec<String>> = args
        .only
        .as_ref()
        .map(|s| s.split(',').map(|x| x.trim().to_uppercase()).collect());
    let all: Vec<(&'static str, Box<dyn Fn() -> verify::Check>)> = vec![
        (
            "C01",
            Box::new(move || verify::criterion_01_pi_exactness(args.seed, scale)),
        ),
        (
            "C02",
            Box::new(move || verify::criterion_02_pi_failure_rate(args.seed, scale)),
        ),
        (
            "C03",
            Box::new(move || verify::criterion_03_column_method(args.seed, scale)),
        ),
        ("C04", Box::new(verify::criterion_04_resource_headline)),
        (
            "C05",
            Box::new(move || verify::criterion_05_randomization(args.seed)),
        ),
        (
            "C06",
            Box::new(move || verify::criterion_06_solver_vs_oracle(args.seed)),
        ),
        (
            "C07",
            Box::new(move || verify::criterion_07_curve_properties(args.seed)),
        ),
        (
            "C08",
            Box::new(move || verify::criterion_08_entangled_endpoints(args.seed)),
        ),
        ("C09", Box::new(verify::criterion_09_typicality)),
        (
            "C10",
            Box::new(move || verify::criterion_10_concentration(args.seed, scale)),
        ),
        (
            "C11",
            Box::new(move || verify::criterion_11_obliviousness(args.seed)),
        ),
        ("C12", Box::new(verify::criterion_12_calculators)),
    ];
    let mut checks = Vec::new();
    for (id, f) in all {
        if let Some(wanted) = &wanted {
            if !wanted.iter().any(|w| w == id) {
                continue;
            }
        }
        let check = f();
        println!("{}", check.line());
        checks.push(check);
    }
    if checks.is_empty() {
        return Err(CliError::Usage("no matching criteria".into()));
    }
    if let Some(out) = &args.out {
        let meta = Meta::new("verify-all", &args);
        emit(Some(out), &json_document(&meta, &checks)?)?;
    }
    if checks.iter().all(|c| c.pass) {
        Ok(0)
    } else {
        Err(CliError::Verification(format!(
            "{} of {} criteria failed",
            checks.iter().filter(|c| !c.pass).count(),
            checks.len()
        )))
    }
}
