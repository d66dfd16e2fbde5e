//! `cm` — classify signals with projector scores, the F functional, and
//! frame dissimilarities. All output is deterministic: identical inputs and
//! seeds produce byte-identical results.

mod demo;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use clustering_machine::frame::{Frame, FrameMeasure};
use clustering_machine::gates::{
    similarity_obstruction, GateKind, GateMachine, ProjectorId, TransportMap,
};
use clustering_machine::machine::{ClusteringMachine, OrthonormalSet};
use clustering_machine::nnclassify::{diagnose, LabeledDataset, Metric};
use clustering_machine::signal::{dissimilarity_f, sq_distance, Signal};
use clustering_machine::tones::{
    add_spectral_noise, load_wav, magnitude_spectrum, recognize, save_wav, synth_tone,
    ReferenceToneSet, ToneMeasure, SPECTRUM_BINS,
};

#[derive(Parser)]
#[command(
    name = "cm",
    version,
    about = "Signal classification with projectors and frames"
)]
struct Cli {
    /// Output format for machine (json) or human (table) consumption.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Score a color against the R/G/B machine and named reference points.
    Rgb(RgbArgs),
    /// Tone recognition utilities over one-second WAV audio.
    #[command(subcommand)]
    Tone(ToneCommand),
    /// XOR/OR gate scores, truth tables, and the projector transport.
    Gate(GateArgs),
    /// Nearest-neighbor diagnosis of query vectors against a labeled dataset.
    Classify(ClassifyArgs),
    /// Inspect frames, test cluster membership, build scaled-pair frames.
    #[command(subcommand)]
    Frame(FrameCommand),
    /// Run the built-in golden checks; exit 0 only if all pass.
    Demo,
}

#[derive(Args)]
struct RgbArgs {
    /// Input color as "r,g,b".
    #[arg(long)]
    color: String,
    #[arg(long, default_value_t = 0.9)]
    theta_hi: f64,
    #[arg(long, default_value_t = 0.05)]
    theta_lo: f64,
    /// Extra reference points as NAME=x,y,z (repeatable).
    #[arg(long = "ref", value_name = "NAME=X,Y,Z")]
    references: Vec<String>,
}

#[derive(Subcommand)]
enum ToneCommand {
    /// Rank the 48 reference tones against a WAV recording.
    Recognize(RecognizeArgs),
    /// Synthesize a harmonic tone fixture into a WAV file.
    Synth(SynthArgs),
    /// Export the magnitude spectrum of a WAV file as CSV (bin,magnitude).
    Spectrum(SpectrumArgs),
}

#[derive(Args)]
struct RecognizeArgs {
    file: PathBuf,
    /// Harmonics per reference tone (n_h).
    #[arg(long, default_value_t = 2)]
    harmonics: usize,
    #[arg(long, value_enum, default_value_t = MeasureArg::Sqnorm)]
    measure: MeasureArg,
    /// Add seeded uniform noise to this many leading spectrum bins.
    #[arg(long, default_value_t = 0, requires = "seed")]
    noise_bins: usize,
    #[arg(long, default_value_t = 0.1)]
    noise_amp: f64,
    /// Seed for the noise draw (required with --noise-bins).
    #[arg(long)]
    seed: Option<u64>,
    /// Frame JSON for delta/nabla; defaults to the scaled-pair frame.
    #[arg(long)]
    frame: Option<PathBuf>,
    /// Keep only the best N entries of the ranking.
    #[arg(long)]
    top: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    Sqnorm,
    #[value(name = "F", alias = "f")]
    F,
    Delta,
    Nabla,
}

impl From<MeasureArg> for ToneMeasure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Sqnorm => ToneMeasure::SqNorm,
            MeasureArg::F => ToneMeasure::F,
            MeasureArg::Delta => ToneMeasure::Delta,
            MeasureArg::Nabla => ToneMeasure::Nabla,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Fundamental frequency bin (Hz).
    #[arg(long)]
    fundamental: usize,
    /// Harmonic amplitudes "a1,a2,..." (a1 at the fundamental).
    #[arg(long, default_value = "1,2,1")]
    amplitudes: String,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    file: PathBuf,
    /// Scale the spectrum to unit norm before export.
    #[arg(long)]
    normalize: bool,
    /// Write CSV here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GateArgs {
    /// Optional signal "a,b,c,d" to score against both gates.
    #[arg(long)]
    input: Option<String>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Training CSV: header row, feature columns, final 0/1 label column.
    #[arg(long)]
    train: PathBuf,
    /// Query CSV: header row, the same feature columns.
    #[arg(long)]
    query: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricArg::F)]
    metric: MetricArg,
    /// Scale every record and query to unit norm first.
    #[arg(long)]
    normalize: bool,
    /// Enforce the 0..=10 feature range while loading.
    #[arg(long)]
    range_check: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    #[value(name = "F", alias = "f")]
    F,
    Sqnorm,
}

#[derive(Subcommand)]
enum FrameCommand {
    /// Bounds, tightness, and norm sums of a frame file.
    Info(FrameFileArgs),
    /// Canonical dual vectors of a frame file, as frame JSON.
    Dual(FrameFileArgs),
    /// Distances and ε-cluster membership of a signal around a center.
    Member(MemberArgs),
    /// Emit the tight frame {e_i, scale·e_i} as frame JSON.
    ScaledPair(ScaledPairArgs),
}

#[derive(Args)]
struct FrameFileArgs {
    #[arg(long)]
    file: PathBuf,
}

#[derive(Args)]
struct MemberArgs {
    #[arg(long)]
    file: PathBuf,
    /// Cluster center "x,y,...".
    #[arg(long)]
    center: String,
    /// Signal to test, "x,y,...".
    #[arg(long)]
    signal: String,
    #[arg(long)]
    epsilon: f64,
}

#[derive(Args)]
struct ScaledPairArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 0.5)]
    scale: f64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            match format {
                Format::Json => eprintln!("{}", json!({ "error": format!("{e:#}") })),
                Format::Table => eprintln!("error: {e:#}"),
            }
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Rgb(args) => cmd_rgb(args, cli.format),
        Command::Tone(cmd) => cmd_tone(cmd, cli.format),
        Command::Gate(args) => cmd_gate(args, cli.format),
        Command::Classify(args) => cmd_classify(args, cli.format),
        Command::Frame(cmd) => cmd_frame(cmd, cli.format),
        Command::Demo => demo::run(cli.format),
    }
}

fn parse_signal(text: &str) -> Result<Signal> {
    Signal::from_csv_row(text).map_err(|e| anyhow!("cannot parse signal {text:?}: {e}"))
}

fn cmd_rgb(args: RgbArgs, format: Format) -> Result<ExitCode> {
    let color = parse_signal(&args.color)?;
    if color.dim() != 3 {
        bail!("--color needs exactly 3 components, got {}", color.dim());
    }
    let machine = ClusteringMachine::new(
        OrthonormalSet::canonical(3),
        vec![vec![0], vec![1], vec![2]],
        vec!["R".into(), "G".into(), "B".into()],
    )
    .unwrap();
    let scores = machine.project_scores(&color)?;
    let verdict = machine.classify(&color, args.theta_hi, args.theta_lo)?;

    let mut references: Vec<(String, Signal)> = vec![
        ("R".into(), Signal::basis_vector(3, 0).unwrap()),
        ("G".into(), Signal::basis_vector(3, 1).unwrap()),
        ("B".into(), Signal::basis_vector(3, 2).unwrap()),
    ];
    for spec in &args.references {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| anyhow!("--ref must look like NAME=x,y,z"))?;
        let point = parse_signal(value)?;
        if point.dim() != 3 {
            bail!("reference {name} needs 3 components");
        }
        references.push((name.to_string(), point));
    }
    let comparisons: Vec<_> = references
        .iter()
        .map(|(name, p)| {
            Ok(json!({
                "name": name,
                "sq_distance": sq_distance(p, &color)?,
                "dissimilarity_f": dissimilarity_f(p, &color)?,
            }))
        })
        .collect::<Result<_>>()?;

    let labeled_scores: Vec<_> = machine
        .labels()
        .iter()
        .zip(&scores.scores)
        .map(|(label, q)| json!({ "label": label, "score": q }))
        .collect();
    let out = json!({
        "color": color.entries(),
        "scores": labeled_scores,
        "total": scores.total,
        "norm_sq": scores.input_norm_sq,
        "verdict": verdict,
        "references": comparisons,
    });
    match format {
        Format::Json => println!("{out}"),
        Format::Table => {
            for s in &scores.scores {
                print!("{s:.6} ");
            }
            println!();
            println!("verdict: {:?}", verdict.kind);
            for c in out["references"].as_array().unwrap() {
                println!(
                    "{:<10} |P-f|^2={:<12.6} F={:.6}",
                    c["name"].as_str().unwrap(),
                    c["sq_distance"].as_f64().unwrap(),
                    c["dissimilarity_f"].as_f64().unwrap()
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_tone(cmd: ToneCommand, format: Format) -> Result<ExitCode> {
    match cmd {
        ToneCommand::Recognize(args) => {
            let time =
                load_wav(&args.file).with_context(|| format!("reading {}", args.file.display()))?;
            let mut spectrum = magnitude_spectrum(&time, true);
            if args.noise_bins > 0 {
                // clap guarantees a seed is present alongside --noise-bins
                spectrum = add_spectral_noise(
                    &spectrum,
                    args.noise_bins,
                    args.noise_amp,
                    args.seed.unwrap(),
                )?;
            }
            let measure = ToneMeasure::from(args.measure);
            let refs = ReferenceToneSet::new(args.harmonics)?;
            let frame = match measure {
                ToneMeasure::Delta | ToneMeasure::Nabla => Some(match &args.frame {
                    Some(path) => Frame::from_json(
                        &std::fs::read_to_string(path)
                            .with_context(|| format!("reading {}", path.display()))?,
                    )?,
                    None => Frame::scaled_pair(SPECTRUM_BINS, 0.5).unwrap(),
                }),
                _ => None,
            };
            let mut ranked = recognize(&spectrum, &refs, measure, frame.as_ref())?;
            if let Some(top) = args.top {
                ranked.truncate(top);
            }
            let rows: Vec<_> = ranked
                .iter()
                .map(|(id, value)| json!({ "tone": id.to_string(), "value": value }))
                .collect();
            let out = json!({
                "file": args.file.display().to_string(),
                "harmonics": args.harmonics,
                "measure": measure,
                "recognized": rows.first().map(|r| r["tone"].clone()),
                "ranking": rows,
            });
            match format {
                Format::Json => println!("{out}"),
                Format::Table => {
                    for (id, value) in &ranked {
                        println!("{id:<4} {value:.6}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        ToneCommand::Synth(args) => {
            let amplitudes = parse_signal(&args.amplitudes)?;
            let tone = synth_tone(args.fundamental, amplitudes.entries())?;
            save_wav(&args.out, &tone)?;
            let out = json!({
                "written": args.out.display().to_string(),
                "fundamental": args.fundamental,
                "amplitudes": amplitudes.entries(),
            });
            if format == Format::Json {
                println!("{out}");
            } else {
                println!("wrote {}", args.out.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        ToneCommand::Spectrum(args) => {
            let time =
                load_wav(&args.file).with_context(|| format!("reading {}", args.file.display()))?;
            let spectrum = magnitude_spectrum(&time, args.normalize);
            let csv = spectrum.to_csv();
            match args.out {
                Some(path) => std::fs::write(&path, csv)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_gate(args: GateArgs, format: Format) -> Result<ExitCode> {
    let xor = GateMachine::new(GateKind::Xor);
    let or = GateMachine::new(GateKind::Or);
    let map = TransportMap::new();

    let table = |gate: &GateMachine| -> Vec<serde_json::Value> {
        gate.truth_table()
            .iter()
            .map(|((a, b), out)| json!({ "input": [a, b], "output": out }))
            .collect()
    };
    let transport = json!({
        "or_to_xor": [
            { "from": "Q~1", "to": format!("{:?}", map.or_to_xor(ProjectorId::Or1).unwrap()) },
            { "from": "Q~2", "to": format!("{:?}", map.or_to_xor(ProjectorId::Or2).unwrap()) },
        ],
        "round_trip_identity": ProjectorId::ALL.iter().all(|id| match *id {
            ProjectorId::Or1 | ProjectorId::Or2 =>
                map.xor_to_or(map.or_to_xor(*id).unwrap()).unwrap() == *id,
            _ => map.or_to_xor(map.xor_to_or(*id).unwrap()).unwrap() == *id,
        }),
        "traces": { "xor": [xor.projector_trace(0), xor.projector_trace(1)],
                     "or": [or.projector_trace(0), or.projector_trace(1)] },
        "similarity_obstruction": similarity_obstruction(),
    });

    let scored_input = match &args.input {
        Some(text) => {
            let f = parse_signal(text)?;
            let (x1, x2) = xor.scores(&f)?;
            let (o1, o2) = or.scores(&f)?;
            Some(json!({ "signal": f.entries(), "xor": [x1, x2], "or": [o1, o2] }))
        }
        None => None,
    };

    let out = json!({
        "xor_truth_table": table(&xor),
        "or_truth_table": table(&or),
        "transport": transport,
        "input": scored_input,
    });
    match format {
        Format::Json => println!("{out}"),
        Format::Table => {
            println!("XOR: {:?}", xor.truth_table().map(|(_, o)| o));
            println!("OR:  {:?}", or.truth_table().map(|(_, o)| o));
            println!("traces: xor Q1 = 2, or Q~1 = 1 (no similarity possible)");
            if let Some(i) = &scored_input {
                println!("xor scores: {}", i["xor"]);
                println!("or scores:  {}", i["or"]);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(args: ClassifyArgs, format: Format) -> Result<ExitCode> {
    let range = args.range_check.then_some((0.0, 10.0));
    let mut dataset = LabeledDataset::load_csv(&args.train, range)
        .with_context(|| format!("loading {}", args.train.display()))?;
    if args.normalize {
        dataset = dataset.normalized();
    }
    let metric = match args.metric {
        MetricArg::F => Metric::F,
        MetricArg::Sqnorm => Metric::SqNorm,
    };

    let text = std::fs::read_to_string(&args.query)
        .with_context(|| format!("loading {}", args.query.display()))?;
    let mut lines = text.lines().enumerate();
    lines.next(); // header
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < dataset.dim() {
            bail!(
                "query row {i}: expected {} features, got {}",
                dataset.dim(),
                fields.len()
            );
        }
        let mut query = parse_signal(&fields[..dataset.dim()].join(","))
            .with_context(|| format!("query row {i}"))?;
        if args.normalize {
            query = query.normalized().unwrap_or(query);
        }
        let diagnosis = diagnose(&dataset, &query, metric)?;
        match format {
            Format::Json => println!("{}", serde_json::to_string(&diagnosis)?),
            Format::Table => println!(
                "row {i}: label={} d0={:.6} d1={:.6} tie_rounds={}",
                diagnosis.label, diagnosis.d0, diagnosis.d1, diagnosis.tie_rounds
            ),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_frame(cmd: FrameCommand, format: Format) -> Result<ExitCode> {
    match cmd {
        FrameCommand::Info(args) => {
            let frame = load_frame(&args.file)?;
            let (a, b) = frame.bounds();
            let (sum_primal, sum_dual) = frame.norm_sums();
            let out = json!({
                "dim": frame.dim(),
                "count": frame.len(),
                "bounds": [a, b],
                "tight": frame.is_tight(),
                "norm_sums": [sum_primal, sum_dual],
            });
            match format {
                Format::Json => println!("{out}"),
                Format::Table => println!(
                    "dim {} count {} bounds ({a}, {b}) tight {}",
                    frame.dim(),
                    frame.len(),
                    frame.is_tight()
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        FrameCommand::Dual(args) => {
            let frame = load_frame(&args.file)?;
            let duals: Vec<Vec<f64>> = (0..frame.len())
                .map(|j| frame.dual(j).entries().to_vec())
                .collect();
            println!("{}", json!({ "dim": frame.dim(), "vectors": duals }));
            Ok(ExitCode::SUCCESS)
        }
        FrameCommand::Member(args) => {
            let frame = load_frame(&args.file)?;
            let center = parse_signal(&args.center)?;
            let signal = parse_signal(&args.signal)?;
            let report = frame.dissimilarity(&signal, &center)?;
            let norm_distance = sq_distance(&center, &signal)?.sqrt();
            let member = |m| frame.cluster_member(&center, &signal, args.epsilon, m);
            let out = json!({
                "epsilon": args.epsilon,
                "norm_distance": norm_distance,
                "delta": report.delta,
                "nabla": report.nabla,
                "member": {
                    "norm": clustering_machine::norm_ball_member(&center, &signal, args.epsilon)?,
                    "delta": member(FrameMeasure::Delta)?,
                    "nabla": member(FrameMeasure::Nabla)?,
                },
            });
            match format {
                Format::Json => println!("{out}"),
                Format::Table => println!(
                    "norm {norm_distance:.6} delta {:.6} nabla {:.6} members {}",
                    report.delta, report.nabla, out["member"]
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        FrameCommand::ScaledPair(args) => {
            let frame = Frame::scaled_pair(args.dim, args.scale)?;
            let text = frame.to_json();
            match args.out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_frame(path: &PathBuf) -> Result<Frame> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Frame::from_json(&text)?)
}
