use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use entanglekit::criteria::{self, Verdict};
use entanglekit::distillation;
use entanglekit::geometry::{ProductSearch, Witness};
use entanglekit::measures::{self, MeasureKind, MeasureResult};
use entanglekit::nonlocality::{self, ChshSettings};
use entanglekit::oracle;
use entanglekit::simplex::{self, Family, Line3x3, ScanSpec, Slice};
use entanglekit::states::{DensityMatrix, StateFile, WernerParam};
use entanglekit::tol::{self, Tolerances};
use serde::Serialize;

use crate::{ChshArgs, Cli, Command, DistillArgs, FamilyKind, InputArgs, MeasureArgs, ScanArgs, TOL_ENV};

/// Largest gap tolerated between the closed-form and brute-force CHSH values.
const CHSH_CONFIRM: f64 = 1e-4;

pub enum Failure {
    Input(anyhow::Error),
    Io(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<u8, Failure>;

pub fn run(cli: &Cli) -> Outcome {
    let tols = tolerances()?;
    match &cli.command {
        Command::Classify(args) => classify(cli, args, &tols),
        Command::Measure(args) => measure(cli, args, &tols),
        Command::Distill(args) => distill(cli, args),
        Command::Scan(args) => scan(cli, args, &tols),
        Command::Chsh(args) => chsh(cli, args, &tols),
        Command::WitnessCheck(args) => witness_check(cli, args),
    }
}

fn tolerances() -> anyhow::Result<Tolerances> {
    let mut tols = Tolerances::default();
    if let Ok(raw) = std::env::var(TOL_ENV) {
        let v: f64 = raw
            .trim()
            .parse()
            .with_context(|| format!("{TOL_ENV}={raw:?} is not a number"))?;
        if !v.is_finite() || v > 0.0 {
            bail!("{TOL_ENV} must be a finite cutoff <= 0, got {v}");
        }
        tols.psd_cutoff = v;
    }
    Ok(tols)
}

fn read_input(path: &Path) -> anyhow::Result<StateFile> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    StateFile::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_state(path: &Path, tols: &Tolerances) -> anyhow::Result<DensityMatrix> {
    read_input(path)?
        .to_state(tols)
        .with_context(|| format!("invalid state in {}", path.display()))
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    let result = match &cli.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .context("writing stdout")
        }
    };
    result.map_err(Failure::Io)
}

fn emit_json<T: Serialize>(cli: &Cli, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.into()))?;
    text.push('\n');
    emit(cli, &text)
}

fn classify(cli: &Cli, args: &InputArgs, tols: &Tolerances) -> Outcome {
    let rho = read_state(&args.input, tols)?;
    let report = criteria::classify_with(&rho, tols);
    emit_json(cli, &report)?;
    Ok(match report.verdict {
        Verdict::Separable => 0,
        Verdict::Undecided => 2,
        _ => 1,
    })
}

fn measure(cli: &Cli, args: &MeasureArgs, tols: &Tolerances) -> Outcome {
    let rho = read_state(&args.input, tols)?;
    let (d1, d2) = rho.dims();
    let kinds: Vec<MeasureKind> = if args.measures.is_empty() {
        let two_qubits = (d1, d2) == (2, 2);
        MeasureKind::ALL
            .into_iter()
            .filter(|k| two_qubits || !k.two_qubit_only())
            .collect()
    } else {
        args.measures
            .iter()
            .map(|s| s.trim().parse::<MeasureKind>())
            .collect::<Result<_, _>>()
            .map_err(|e| anyhow!("{e} (known: {})", known_measures()))?
    };
    let results: Vec<MeasureResult> = kinds
        .into_iter()
        .map(|k| measures::measure(k, &rho, cli.seed).with_context(|| format!("measure {k}")))
        .collect::<anyhow::Result<_>>()?;
    emit_json(cli, &results)?;
    Ok(0)
}

fn known_measures() -> String {
    MeasureKind::ALL.map(|k| k.name()).join(", ")
}

fn distill(cli: &Cli, args: &DistillArgs) -> Outcome {
    let f0 = WernerParam::new(args.f0).context("--f0")?;
    let trace = distillation::iterate_distill(f0, args.steps).context("--steps")?;
    if args.f0 <= 0.5 {
        eprintln!("note: F0 = {} <= 1/2, the map does not increase the fidelity", args.f0);
    }
    emit(cli, &trace.to_csv())?;
    Ok(0)
}

fn parse_point(s: &str) -> anyhow::Result<(usize, usize)> {
    let digits: Vec<usize> = s
        .trim()
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as usize))
        .collect::<Option<_>>()
        .ok_or_else(|| anyhow!("point {s:?} must be two digits"))?;
    match digits[..] {
        [k, l] if k < 3 && l < 3 => Ok((k, l)),
        _ => bail!("point {s:?} must be two digits in 0..3"),
    }
}

fn scan_family(args: &ScanArgs) -> anyhow::Result<Family> {
    if args.points.is_empty() {
        return Ok(match args.family {
            FamilyKind::Line => Family::default_line(),
            FamilyKind::Offline => Family::default_offline(),
        });
    }
    let pts: Vec<(usize, usize)> = args.points.iter().map(|s| parse_point(s)).collect::<anyhow::Result<_>>()?;
    let pts: [(usize, usize); 3] = pts
        .try_into()
        .map_err(|_| anyhow!("--points needs exactly three vertices"))?;
    Ok(match args.family {
        FamilyKind::Line => Family::Line(Line3x3::new(pts).context("--points")?),
        FamilyKind::Offline => Family::offline(pts).context("--points")?,
    })
}

fn scan(cli: &Cli, args: &ScanArgs, tols: &Tolerances) -> Outcome {
    if !args.gamma.is_finite() {
        return Err(anyhow!("--gamma must be finite").into());
    }
    let spec = ScanSpec {
        family: scan_family(args)?,
        grid: args.grid,
        lo: args.lo,
        hi: args.hi,
        slice: if args.full { Slice::Full } else { Slice::FixedGamma(args.gamma) },
    };
    let cells = simplex::scan_region(&spec, tols).context("scan")?;
    let csv = simplex::cells_to_csv(&cells).map_err(|e| Failure::Io(e.into()))?;
    emit(cli, &csv)?;
    Ok(0)
}

#[derive(Serialize)]
struct ChshReport {
    chsh_max: f64,
    settings_found: ChshSettings,
    brute_force_value: f64,
    confirmed: bool,
    violates_local_bound: bool,
}

fn chsh_state(args: &ChshArgs, tols: &Tolerances) -> anyhow::Result<DensityMatrix> {
    if let Some(path) = &args.input {
        return read_state(path, tols);
    }
    let [lambda, product] = args.hidden[..] else {
        bail!("--hidden takes two values: lambda,alpha*beta");
    };
    let alpha = nonlocality::alpha_from_product(product)?;
    let rho = nonlocality::hidden_nonlocality_state(lambda, alpha)?;
    if args.filtered {
        let f = nonlocality::hidden_nonlocality_filter(alpha)?;
        return Ok(nonlocality::apply_filter(&rho, &f)?);
    }
    Ok(rho)
}

fn chsh(cli: &Cli, args: &ChshArgs, tols: &Tolerances) -> Outcome {
    let rho = chsh_state(args, tols)?;
    let closed = nonlocality::chsh_max(&rho).context("chsh")?;
    let (brute, settings) = oracle::chsh_brute_force(&rho, args.brute_grid).context("chsh")?;
    let report = ChshReport {
        chsh_max: closed,
        settings_found: settings,
        brute_force_value: brute,
        confirmed: (closed - brute).abs() <= CHSH_CONFIRM,
        violates_local_bound: closed > 2.0,
    };
    emit_json(cli, &report)?;
    Ok(0)
}

#[derive(Serialize)]
struct WitnessReport {
    d1: usize,
    d2: usize,
    min_product_expectation: f64,
    cutoff: f64,
    verified: bool,
}

fn witness_check(cli: &Cli, args: &InputArgs) -> Outcome {
    let file = read_input(&args.input)?;
    let op = file.to_matrix().context("operator")?;
    let w = Witness::new(op, file.d1, file.d2).context("operator")?;
    let w = w.verify_with(&ProductSearch::with_seed(cli.seed));
    let report = WitnessReport {
        d1: w.d1,
        d2: w.d2,
        min_product_expectation: w.min_product_expectation.expect("verified above"),
        cutoff: tol::WITNESS_CUTOFF,
        verified: w.verified,
    };
    emit_json(cli, &report)?;
    Ok(if w.verified { 0 } else { 1 })
}
