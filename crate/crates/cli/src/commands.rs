use std::fmt;
use std::io;
use std::process::ExitCode;

use ebitsim_core::channel::{
    average_extra_bits, mean_realizations, outcome_frequencies, run_channel_with_cap,
    ChannelTranscript,
};
use ebitsim_core::harness::{
    derive_seed, estimate_joint, max_discrepancy_curve, phi_grid, substream, sweep_phi,
};
use ebitsim_core::hilbert::{sample_haar_basis, sample_haar_vector};
use ebitsim_core::oracle::{born_conditional, born_joint, measurement_family};
use ebitsim_core::{OrthonormalBasis, Protocol, ProtocolKind, StateVector};
use serde::Serialize;

use crate::output::{float, json, sink, CsvWriter};
use crate::{
    ChannelArgs, Common, Fig3Args, JointArgs, OutputFormat, StateChoice, SweepArgs, VerifyArgs,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(ebitsim_core::Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Run(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<ebitsim_core::Error> for CliError {
    fn from(e: ebitsim_core::Error) -> Self {
        CliError::Run(e)
    }
}

type CmdResult = Result<ExitCode, CliError>;

fn setup(common: &Common) -> Result<u64, CliError> {
    if let Some(threads) = common.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match common.seed {
        Some(seed) => Ok(seed),
        None if std::env::var_os("CI").is_some() => {
            Err(CliError::Usage("--seed is required when CI is set".into()))
        }
        None => {
            let seed = rand::random::<u64>();
            eprintln!("seed: {seed}");
            Ok(seed)
        }
    }
}

fn protocol(kind: ProtocolKind, dim: usize) -> Result<Protocol, CliError> {
    Protocol::new(kind, dim)
        .map_err(|e| CliError::Usage(format!("--protocol {kind} --dim {dim}: {e}")))
}

pub fn sweep(args: &SweepArgs) -> CmdResult {
    let seed = setup(&args.common)?;
    let p = protocol(args.protocol.into(), args.dim)?;
    let mb = OrthonormalBasis::computational(args.dim)?;
    let grid = phi_grid(args.phi_points as usize);
    let points = sweep_phi(&p, &mb, &grid, args.trials.count(), seed)?;
    let out = sink(args.common.output.as_deref())?;
    match args.common.output_format {
        OutputFormat::Csv => {
            let mut w = CsvWriter::new(
                out,
                &["phi", "p_model", "stderr", "p_quantum", "discrepancy"],
            )?;
            for pt in &points {
                w.row(&[
                    float(pt.phi),
                    float(pt.p_model),
                    float(pt.stderr),
                    float(pt.p_quantum),
                    float(pt.discrepancy),
                ])?;
            }
            w.finish()?;
        }
        OutputFormat::Json => json(out, &points)?,
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Fig3Row {
    #[serde(rename = "N")]
    dim: usize,
    protocol: ProtocolKind,
    max_discrepancy: f64,
    stderr: f64,
    phi_at_max: f64,
    trials: u64,
    phi_points: u64,
    seed: u64,
}

pub fn fig3(args: &Fig3Args) -> CmdResult {
    let seed = setup(&args.common)?;
    for &kind in &args.protocols {
        for &dim in &args.dims {
            protocol(kind.into(), dim)?;
        }
    }
    let grid = phi_grid(args.phi_points as usize);
    let trials = args.trials.count();
    let mut rows = Vec::new();
    for &kind in &args.protocols {
        let kind: ProtocolKind = kind.into();
        for c in max_discrepancy_curve(kind, &args.dims, &grid, trials, seed)? {
            eprintln!(
                "{kind} N={}: max discrepancy {:.5}",
                c.dim, c.max_discrepancy
            );
            rows.push(Fig3Row {
                dim: c.dim,
                protocol: kind,
                max_discrepancy: c.max_discrepancy,
                stderr: c.stderr,
                phi_at_max: c.phi_at_max,
                trials,
                phi_points: args.phi_points,
                seed,
            });
        }
    }
    let out = sink(args.common.output.as_deref())?;
    match args.common.output_format {
        OutputFormat::Csv => {
            let header = [
                "N",
                "protocol",
                "max_discrepancy",
                "trials",
                "phi_points",
                "seed",
            ];
            let mut w = CsvWriter::new(out, &header)?;
            for r in &rows {
                w.row(&[
                    r.dim.to_string(),
                    r.protocol.to_string(),
                    float(r.max_discrepancy),
                    r.trials.to_string(),
                    r.phi_points.to_string(),
                    r.seed.to_string(),
                ])?;
            }
            w.finish()?;
        }
        OutputFormat::Json => json(out, &rows)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn choose_basis(choice: StateChoice, dim: usize, seed: u64) -> Result<OrthonormalBasis, CliError> {
    Ok(match choice {
        StateChoice::Computational => OrthonormalBasis::computational(dim)?,
        StateChoice::Random => sample_haar_basis(dim, &mut substream(seed, 0))?,
    })
}

fn choose_state(choice: StateChoice, dim: usize, seed: u64) -> Result<StateVector, CliError> {
    Ok(match choice {
        StateChoice::Computational => StateVector::basis(dim, 0)?,
        StateChoice::Random => sample_haar_vector(dim, &mut substream(seed, 0))?,
    })
}

#[derive(Serialize)]
struct ChannelSummary {
    protocol: ProtocolKind,
    dim: usize,
    calls: u64,
    seed: u64,
    protocol_bits: u32,
    mean_realizations: f64,
    average_extra_bits: f64,
    outcome_frequencies: Vec<f64>,
    born_probabilities: Vec<f64>,
}

#[derive(Serialize)]
struct ChannelReport<'a> {
    summary: ChannelSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    transcripts: Option<&'a [ChannelTranscript]>,
}

pub fn channel(args: &ChannelArgs) -> CmdResult {
    let seed = setup(&args.common)?;
    let kind: ProtocolKind = args.protocol.into();
    let p = protocol(kind, args.dim)?;
    let input = choose_state(args.input, args.dim, derive_seed(seed, 1))?;
    let ma = choose_basis(args.measurement, args.dim, derive_seed(seed, 2))?;
    let run_seed = derive_seed(seed, 3);
    let calls = args.calls;
    let transcripts = run_channel_with_cap(&p, &input, &ma, calls, run_seed, args.realization_cap)?;
    let summary = ChannelSummary {
        protocol: kind,
        dim: args.dim,
        calls,
        seed,
        protocol_bits: transcripts[0].protocol_bits,
        mean_realizations: mean_realizations(&transcripts)?,
        average_extra_bits: average_extra_bits(&transcripts)?,
        outcome_frequencies: outcome_frequencies(&transcripts, args.dim),
        born_probabilities: born_conditional(&ma, &input)?,
    };
    eprintln!(
        "mean realizations {:.4}, average extra bits {:.4} (protocol bits {})",
        summary.mean_realizations, summary.average_extra_bits, summary.protocol_bits
    );
    let out = sink(args.common.output.as_deref())?;
    match args.common.output_format {
        OutputFormat::Csv if args.summary_only => {
            let header = [
                "protocol",
                "N",
                "calls",
                "mean_realizations",
                "average_extra_bits",
                "protocol_bits",
                "seed",
            ];
            let mut w = CsvWriter::new(out, &header)?;
            w.row(&[
                kind.to_string(),
                args.dim.to_string(),
                calls.to_string(),
                float(summary.mean_realizations),
                float(summary.average_extra_bits),
                summary.protocol_bits.to_string(),
                seed.to_string(),
            ])?;
            w.finish()?;
        }
        OutputFormat::Csv => {
            let header = [
                "call",
                "outcome",
                "skips",
                "protocol_bits",
                "total_bits_estimate",
            ];
            let mut w = CsvWriter::new(out, &header)?;
            for (i, t) in transcripts.iter().enumerate() {
                w.row(&[
                    (i + 1).to_string(),
                    (t.outcome + 1).to_string(),
                    t.skips.to_string(),
                    t.protocol_bits.to_string(),
                    float(t.total_bits_estimate),
                ])?;
            }
            w.finish()?;
        }
        OutputFormat::Json => {
            let report = ChannelReport {
                summary,
                transcripts: (!args.summary_only).then_some(&transcripts[..]),
            };
            json(out, &report)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct PairReport {
    pair: u64,
    max_abs_deviation: f64,
    max_sigma: f64,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    protocol: ProtocolKind,
    trials: u64,
    seed: u64,
    sigmas: f64,
    max_sigma: f64,
    passed: bool,
    pairs: &'a [PairReport],
}

/// Largest deviation of an estimated table from the Born table, absolute and
/// in binomial standard errors of the Born probability.
pub fn born_deviation(
    p: &Protocol,
    ma: &OrthonormalBasis,
    mb: &OrthonormalBasis,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64), ebitsim_core::Error> {
    let est = estimate_joint(p, ma, mb, trials, seed)?;
    let born = born_joint(ma, mb)?;
    let mut worst = (0.0_f64, 0.0_f64);
    for a in 0..est.dim() {
        for b in 0..est.dim() {
            let q = born.get(a, b);
            let dev = (est.estimate(a, b) - q).abs();
            let sigma = (q * (1.0 - q) / trials as f64).sqrt();
            let z = if sigma > 0.0 {
                dev / sigma
            } else if dev == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            worst = (worst.0.max(dev), worst.1.max(z));
        }
    }
    Ok(worst)
}

pub fn verify(args: &VerifyArgs) -> CmdResult {
    let seed = setup(&args.common)?;
    let kind: ProtocolKind = args.protocol.into();
    let p = protocol(kind, 2)?;
    let trials = args.trials.count();
    let mut rng = substream(derive_seed(seed, 0), 0);
    let mut reports = Vec::new();
    for pair in 0..args.pairs {
        let ma = sample_haar_basis(2, &mut rng)?;
        let mb = sample_haar_basis(2, &mut rng)?;
        let (dev, z) = born_deviation(&p, &ma, &mb, trials, derive_seed(seed, pair + 1))?;
        reports.push(PairReport {
            pair: pair + 1,
            max_abs_deviation: dev,
            max_sigma: z,
        });
    }
    let max_sigma = reports.iter().map(|r| r.max_sigma).fold(0.0, f64::max);
    let passed = max_sigma <= args.sigmas;
    eprintln!(
        "{kind}: max deviation {max_sigma:.3} sigma over {} pairs -> {}",
        args.pairs,
        if passed { "PASS" } else { "FAIL" }
    );
    let out = sink(args.common.output.as_deref())?;
    match args.common.output_format {
        OutputFormat::Csv => {
            let mut w = CsvWriter::new(out, &["pair", "max_abs_deviation", "max_sigma"])?;
            for r in &reports {
                w.row(&[
                    r.pair.to_string(),
                    float(r.max_abs_deviation),
                    float(r.max_sigma),
                ])?;
            }
            w.finish()?;
        }
        OutputFormat::Json => json(
            out,
            &VerifyReport {
                protocol: kind,
                trials,
                seed,
                sigmas: args.sigmas,
                max_sigma,
                passed,
                pairs: &reports,
            },
        )?,
    }
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct JointReport {
    protocol: ProtocolKind,
    dim: usize,
    trials: u64,
    seed: u64,
    counts: Vec<Vec<u64>>,
    estimates: Vec<Vec<f64>>,
    stderr: Vec<Vec<f64>>,
    born: Vec<Vec<f64>>,
}

pub fn joint(args: &JointArgs) -> CmdResult {
    let seed = setup(&args.common)?;
    let kind: ProtocolKind = args.protocol.into();
    let p = protocol(kind, args.dim)?;
    let (ma, mb) = match args.phi {
        Some(phi) => {
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&phi) {
                return Err(CliError::Usage("--phi must lie in [0, pi/2]".into()));
            }
            let mb = OrthonormalBasis::computational(args.dim)?;
            (measurement_family(&mb, phi)?, mb)
        }
        None => {
            let mut rng = substream(derive_seed(seed, 0), 0);
            let ma = sample_haar_basis(args.dim, &mut rng)?;
            (ma, sample_haar_basis(args.dim, &mut rng)?)
        }
    };
    let trials = args.trials.count();
    let est = estimate_joint(&p, &ma, &mb, trials, derive_seed(seed, 1))?;
    let born = born_joint(&ma, &mb)?;
    let out = sink(args.common.output.as_deref())?;
    match args.common.output_format {
        OutputFormat::Csv => {
            let header = ["a", "b", "count", "estimate", "stderr", "p_quantum"];
            let mut w = CsvWriter::new(out, &header)?;
            for a in 0..args.dim {
                for b in 0..args.dim {
                    w.row(&[
                        (a + 1).to_string(),
                        (b + 1).to_string(),
                        est.count(a, b).to_string(),
                        float(est.estimate(a, b)),
                        float(est.stderr(a, b)),
                        float(born.get(a, b)),
                    ])?;
                }
            }
            w.finish()?;
        }
        OutputFormat::Json => {
            let dim = args.dim;
            json(
                out,
                &JointReport {
                    protocol: kind,
                    dim,
                    trials,
                    seed,
                    counts: est.counts(),
                    estimates: est.estimates(),
                    stderr: est.stderrs(),
                    born: (0..dim)
                        .map(|a| (0..dim).map(|b| born.get(a, b)).collect())
                        .collect(),
                },
            )?
        }
    }
    Ok(ExitCode::SUCCESS)
}
