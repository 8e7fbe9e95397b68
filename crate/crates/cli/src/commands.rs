//! Subcommand implementations, generic over the working scalar.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use twospectra::admissibility::{self, Verdict};
use twospectra::direct::{self, DirectOptions, Status};
use twospectra::inverse::{self, InverseInput, ZeroCaseHint};
use twospectra::mass_spring::{self, ScanGrid};
use twospectra::types::default_zero_tolerance;
use twospectra::{Complex, JacobiMatrix, Real, SpectrumPair, Theta};

use crate::decimal::Scalar;
use crate::format::{FormatError, Kind, Payload, ProblemFile, RawPair};
use crate::report;

/// Why a command did not succeed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Usage, I/O or parse problems: exit 1.
    Input(String),
    /// A mathematical gate rejected the data: exit 2.
    Gate { name: String, detail: String },
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Gate { .. } => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(msg) => write!(f, "error: {msg}"),
            Failure::Gate { name, detail } => write!(f, "rejected: {name}: {detail}"),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<twospectra::Error> for Failure {
    fn from(e: twospectra::Error) -> Self {
        Failure::Gate {
            name: e.name().into(),
            detail: e.to_string(),
        }
    }
}

pub type Outcome = Result<(), Failure>;

/// Settings shared by all subcommands.
#[derive(Clone, Debug, Default)]
pub struct Context {
    pub zero_tol: Option<String>,
    /// Overrides the identity-check tolerances of `direct` and `inverse`.
    pub tolerance: Option<f64>,
    pub plot: Option<PathBuf>,
}

impl Context {
    fn zero_tol<T: Scalar>(&self) -> Result<Option<T>, Failure> {
        self.zero_tol.as_deref().map(|s| number("--zero-tol", s)).transpose()
    }
}

#[derive(Clone, Debug, Default)]
pub struct HintText {
    pub q1: Option<String>,
    pub alpha0: Option<String>,
    pub theta: Option<String>,
}

pub fn number<T: Scalar>(what: &str, text: &str) -> Result<T, Failure> {
    T::parse_decimal(text).ok_or_else(|| Failure::Input(format!("{what}: not a finite number: {text:?}")))
}

fn theta_from<T: Scalar>(what: &str, text: &str) -> Result<Theta<T>, Failure> {
    Theta::new(number(what, text)?).map_err(|e| Failure::Input(format!("{what}: {e}")))
}

/// Hint from the flags, or else from `hint_*` metadata keys of the input file.
fn resolve_hint<T: Scalar>(
    flags: &HintText,
    file: &ProblemFile<T>,
) -> Result<Option<ZeroCaseHint<T>>, Failure> {
    let from_flags = [("--q1", &flags.q1), ("--alpha0", &flags.alpha0), ("--theta", &flags.theta)];
    let from_meta = [
        ("metadata.hint_q1", file.metadata.get("hint_q1")),
        ("metadata.hint_alpha0", file.metadata.get("hint_alpha0")),
        ("metadata.hint_theta", file.metadata.get("hint_theta")),
    ];
    let pick = |entries: [(&'static str, Option<&String>); 3]| -> Result<Option<ZeroCaseHint<T>>, Failure> {
        let given: Vec<_> = entries.iter().enumerate().filter(|(_, (_, v))| v.is_some()).collect();
        match given.as_slice() {
            [] => Ok(None),
            [(i, (what, Some(text)))] => {
                Ok(Some(match i {
                    0 => ZeroCaseHint::Q1(number(what, text)?),
                    1 => ZeroCaseHint::Alpha0(number(what, text)?),
                    _ => ZeroCaseHint::Theta(theta_from(what, text)?),
                }))
            }
            _ => Err(Failure::Input("give at most one of q1, alpha0 and theta as a hint".into())),
        }
    };
    match pick(from_flags.map(|(w, v)| (w, v.as_ref())))? {
        Some(h) => Ok(Some(h)),
        None => pick(from_meta),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => print_stdout(text),
    }
}

/// Writes to standard output; a closed pipe is not an error.
fn print_stdout(text: &str) -> Result<(), Failure> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Input(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn wrong_kind(path: &Path, found: Kind, wanted: &str) -> Failure {
    Failure::Input(format!("{}: expected a {wanted} file, found {found}", path.display()))
}

fn matrix_of<T: Scalar>(path: &Path, file: ProblemFile<T>) -> Result<JacobiMatrix<T>, Failure> {
    match file.payload {
        Payload::Matrix(j) => Ok(j),
        Payload::Chain(c) => Ok(mass_spring::chain_to_jacobi(&c)),
        other => Err(wrong_kind(path, other.kind(), "matrix or chain")),
    }
}

fn pair_of<T: Scalar>(path: &Path, file: &ProblemFile<T>) -> Result<RawPair<T>, Failure> {
    match &file.payload {
        Payload::SpectraPair(p) => Ok(p.clone()),
        other => Err(wrong_kind(path, other.kind(), "spectra_pair")),
    }
}

fn pair_zero_tol<T: Scalar>(ctx: &Context, raw: &RawPair<T>) -> Result<T, Failure> {
    Ok(match ctx.zero_tol()? {
        Some(t) => t,
        None => {
            let radius = raw
                .lambdas
                .iter()
                .chain(&raw.mus)
                .map(Real::abs)
                .fold(T::zero(), T::max_of);
            default_zero_tolerance(&radius)
        }
    })
}

/// Writes the eigenvalue ladder and `𝔪(x + i/2)` along the real axis as
/// whitespace-separated columns.
fn emit_plot<T: Scalar>(path: &Path, pair: &SpectrumPair<T>) -> Result<(), Failure> {
    let mut out = String::from("# ladder: index lambda mu\n");
    for (k, l, m) in pair.iter() {
        let _ = writeln!(out, "{k} {} {}", l.to_decimal(), m.to_decimal());
    }
    let ends = pair.lambdas().values().iter().chain(pair.mus().values());
    let lo = ends.clone().map(Real::to_f64).fold(f64::INFINITY, f64::min) - 1.0;
    let hi = ends.map(Real::to_f64).fold(f64::NEG_INFINITY, f64::max) + 1.0;
    out.push_str("\n# mgoth: re_zeta im_zeta re_value im_value\n");
    const SAMPLES: usize = 400;
    for i in 0..=SAMPLES {
        let x = lo + (hi - lo) * i as f64 / SAMPLES as f64;
        let zeta = Complex::new(T::from_f64(x), T::from_f64(0.5));
        if let Ok(v) = direct::mgoth_eval(pair, &zeta) {
            let _ = writeln!(out, "{x} 0.5 {:e} {:e}", v.re.to_f64(), v.im.to_f64());
        }
    }
    std::fs::write(path, out).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Result of a command that produces a file: the file, diagnostics for the
/// error stream, and a gate failure to report after the file is written.
pub struct Produced<T> {
    pub file: ProblemFile<T>,
    pub notes: String,
    pub failure: Option<Failure>,
}

pub fn direct_file<T: Scalar>(
    ctx: &Context,
    path: &Path,
    file: ProblemFile<T>,
    theta: &Theta<T>,
) -> Result<Produced<T>, Failure> {
    let j = matrix_of(path, file)?;
    let options = DirectOptions {
        zero_tolerance: ctx.zero_tol()?,
        tolerance: ctx.tolerance.unwrap_or(direct::DEFAULT_TOLERANCE),
    };
    let report = direct::spectra_pair_with(&j, theta, &options)?;
    if let Some(plot) = &ctx.plot {
        emit_plot(plot, &report.pair)?;
    }
    let mut out = ProblemFile::new(Payload::SpectraPair(RawPair {
        lambdas: report.pair.lambdas().values().to_vec(),
        mus: report.pair.mus().values().to_vec(),
    }))
    .with_meta("theta", theta.get().to_decimal())
    .with_meta("status", report.status.name())
    .with_meta("shift", report.pair.shift().name());
    for c in &report.diagnostics {
        out = out.with_meta(&format!("check_{}", c.name), format!("{:e}", c.residual));
    }
    let failure = (report.status == Status::Fail).then(|| {
        let failed: Vec<_> = report.diagnostics.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
        Failure::Gate {
            name: "IdentityCheck".into(),
            detail: failed.join(", "),
        }
    });
    Ok(Produced {
        file: out,
        notes: report::direct_text(&report),
        failure,
    })
}

pub fn inverse_file<T: Scalar>(
    ctx: &Context,
    path: &Path,
    file: &ProblemFile<T>,
    hint: &HintText,
) -> Result<Produced<T>, Failure> {
    let raw = pair_of(path, file)?;
    let hint = resolve_hint(hint, file)?;
    let pair = SpectrumPair::from_values(&raw.lambdas, &raw.mus, &pair_zero_tol(ctx, &raw)?)?;
    if let Some(plot) = &ctx.plot {
        emit_plot(plot, &pair)?;
    }
    let input = InverseInput::new(pair, hint)?;
    let solution = inverse::solve_with(&input, ctx.tolerance.unwrap_or(inverse::DEFAULT_TOLERANCE))?;
    let mut out =
        ProblemFile::new(Payload::Matrix(solution.matrix)).with_meta("theta", solution.theta.get().to_decimal());
    for c in &solution.residuals {
        out = out.with_meta(&format!("residual_{}", c.name), format!("{:e}", c.residual));
    }
    Ok(Produced {
        file: out,
        notes: format!(
            "theta: {}\nresiduals:\n{}",
            solution.theta.get().to_decimal(),
            report::checks_text(&solution.residuals)
        ),
        failure: None,
    })
}

/// Recovers the matrix of a stored spectral measure.
pub fn measure_file<T: Scalar>(path: &Path, file: &ProblemFile<T>) -> Result<Produced<T>, Failure> {
    let Payload::Measure(measure) = &file.payload else {
        return Err(wrong_kind(path, file.kind(), "measure"));
    };
    let j = inverse::reconstruct_jacobi(measure)?;
    Ok(Produced {
        file: ProblemFile::new(Payload::Matrix(j)),
        notes: String::new(),
        failure: None,
    })
}

fn finish<T: Scalar>(produced: Produced<T>, out: Option<&Path>) -> Outcome {
    eprint!("{}", produced.notes);
    write_output(out, &produced.file.to_json())?;
    produced.failure.map_or(Ok(()), Err)
}

pub fn cmd_direct<T: Scalar>(ctx: &Context, input: &Path, theta: &str, out: Option<&Path>) -> Outcome {
    let theta = theta_from("--theta", theta)?;
    let file = ProblemFile::<T>::load(input)?;
    finish(direct_file(ctx, input, file, &theta)?, out)
}

pub fn cmd_inverse<T: Scalar>(ctx: &Context, input: &Path, hint: &HintText, out: Option<&Path>) -> Outcome {
    let file = ProblemFile::<T>::load(input)?;
    finish(inverse_file(ctx, input, &file, hint)?, out)
}

pub fn cmd_verify<T: Scalar>(ctx: &Context, input: &Path, hint: &HintText) -> Outcome {
    let file = ProblemFile::<T>::load(input)?;
    let raw = pair_of(input, &file)?;
    let hint = resolve_hint(hint, &file)?;
    let tol = pair_zero_tol(ctx, &raw)?;
    let report = admissibility::admissible(&raw.lambdas, &raw.mus, hint.as_ref(), &tol);
    if let (Some(plot), Ok(pair)) = (&ctx.plot, SpectrumPair::from_values(&raw.lambdas, &raw.mus, &tol)) {
        emit_plot(plot, &pair)?;
    }
    let json = serde_json::to_string_pretty(&report::admissibility_json(&report)).expect("report serializes");
    print_stdout(&format!("{}\n{json}\n", report::admissibility_text(&report)))?;
    match report.verdict {
        Verdict::Admissible => Ok(()),
        Verdict::Rejected(gate) => {
            let detail = match (&report.condition_a, &report.theta_error) {
                (Err(e), _) | (_, Some(e)) => e.to_string(),
                _ => "candidate pair is not admissible".into(),
            };
            Err(Failure::Gate {
                name: gate.name().into(),
                detail,
            })
        }
    }
}

pub enum MassMode {
    Seed { k1: String, m1: String },
    Scan,
}

pub fn cmd_masses<T: Scalar>(input: &Path, mode: &MassMode, out: Option<&Path>) -> Outcome {
    let file = ProblemFile::<T>::load(input)?;
    let j = matrix_of(input, file)?;
    match mode {
        MassMode::Seed { k1, m1 } => {
            let chain = mass_spring::jacobi_to_chain(&j, number("--k1", k1)?, number("--m1", m1)?)?;
            write_output(out, &ProblemFile::new(Payload::Chain(chain)).to_json())
        }
        MassMode::Scan => {
            let intervals = mass_spring::admissible_ratio_scan(&j, &ScanGrid::for_matrix(&j))?;
            let mut text = String::from("# admissible k1/m1 intervals: lo hi\n");
            for (lo, hi) in intervals {
                let _ = writeln!(text, "{} {}", lo.to_decimal(), hi.to_decimal());
            }
            write_output(out, &text)
        }
    }
}

/// Processes every `*.json` file of `dir` on worker threads. Matrix and chain
/// files go through `direct` (needs `theta`), spectra pairs through
/// `inverse`, measures through the reconstruction. Outputs land in `out`
/// as `<stem>.out.json`.
pub fn cmd_batch<T: Scalar>(ctx: &Context, dir: &Path, theta: Option<&str>, out: &Path) -> Outcome {
    let theta = theta.map(|t| theta_from::<T>("--theta", t)).transpose()?;
    let read = |p: &Path| std::fs::read_dir(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())));
    let mut inputs: Vec<PathBuf> = read(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    inputs.sort();
    std::fs::create_dir_all(out).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    let batch_ctx = Context {
        plot: None,
        ..ctx.clone()
    };

    let process = |path: &Path| -> Outcome {
        let file = ProblemFile::<T>::load(path)?;
        let produced = match file.kind() {
            Kind::Matrix | Kind::Chain => {
                let theta = theta
                    .as_ref()
                    .ok_or_else(|| Failure::Input("matrix and chain inputs need --theta".into()))?;
                direct_file(&batch_ctx, path, file, theta)?
            }
            Kind::SpectraPair => inverse_file(&batch_ctx, path, &file, &HintText::default())?,
            Kind::Measure => measure_file(path, &file)?,
        };
        let stem = path.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
        write_output(Some(&out.join(format!("{stem}.out.json"))), &produced.file.to_json())?;
        produced.failure.map_or(Ok(()), Err)
    };

    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(inputs.len().max(1));
    let results: Vec<(usize, Outcome)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let inputs = &inputs;
                let process = &process;
                scope.spawn(move || {
                    (w..inputs.len())
                        .step_by(workers)
                        .map(|i| (i, process(&inputs[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("batch worker panicked")).collect()
    });

    let mut results = results;
    results.sort_by_key(|(i, _)| *i);
    let mut worst = 0;
    for (i, result) in &results {
        match result {
            Ok(()) => eprintln!("{}: ok", inputs[*i].display()),
            Err(f) => {
                eprintln!("{}: {f}", inputs[*i].display());
                worst = worst.max(f.exit_code());
            }
        }
    }
    match worst {
        0 => Ok(()),
        1 => Err(Failure::Input("some batch inputs could not be processed".into())),
        _ => Err(Failure::Gate {
            name: "batch".into(),
            detail: "some batch inputs were rejected".into(),
        }),
    }
}
