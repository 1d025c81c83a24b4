mod document;
mod error;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdos_core::diagram::{
    build_complete_diagram, mark_information_flow, render, simplify_diagram, RenderFormat, RenderStyle,
    MAX_DIAGRAM_QUBITS,
};
use qdos_core::random::{random_angle, random_special_unitary, random_state, random_unitary};
use qdos_core::synth::{self, DiagonalPhases, EulerAngles, SynthesisResult, RESIDUAL_BOUND, U4_RESIDUAL_BOUND};
use qdos_core::{align_global_phase, circuit_to_unitary, simulate, Circuit, ComplexMatrix, Error, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use document::{Certificate, CircuitDocument, StateDocument};
use error::CliError;

/// Gate synthesis, verification and diagrams of states for small registers.
#[derive(Debug, Parser)]
#[command(name = "qdos", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a circuit and certify it against its target.
    Synth(SynthArgs),
    /// Draw the diagram of states of a circuit.
    Render(RenderArgs),
    /// Compare a circuit with a target unitary or state.
    Verify(VerifyArgs),
    /// Run a circuit on a basis state or a state file.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SynthKind {
    Su2,
    Cphase,
    Csu2,
    Cu,
    C2u,
    C2phase,
    U4,
    Diag,
    State,
}

#[derive(Debug, Args)]
struct SynthArgs {
    kind: SynthKind,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Comma-separated phases phi_1, phi_2, ... of a diagonal.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phis: Vec<f64>,
    /// Number of qubits for `diag` and random `state`.
    #[arg(long)]
    n: Option<usize>,
    /// Target matrix in the text matrix format.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Target state as JSON `{"n_qubits", "amps": [[re, im], ...]}`.
    #[arg(long)]
    amps: Option<PathBuf>,
    /// Draw the target at random instead of reading it.
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Read angle flags in degrees.
    #[arg(long)]
    degrees: bool,
    /// Residual bound overriding the default of the synthesis.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the circuit document here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the certificate here.
    #[arg(long)]
    cert: Option<PathBuf>,
    #[arg(long)]
    human: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Svg,
    Ascii,
}

#[derive(Debug, Args)]
struct RenderArgs {
    circuit: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Svg)]
    format: Format,
    #[arg(long)]
    simplified: bool,
    /// Mark information flow from this basis state.
    #[arg(long)]
    input_state: Option<usize>,
    #[arg(long)]
    junctions: bool,
    #[arg(long)]
    show_normalization: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("reference").required(true).args(["target", "target_state"]))]
struct VerifyArgs {
    circuit: PathBuf,
    /// Target unitary in the text matrix format.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Target state reached from |0...0>.
    #[arg(long)]
    target_state: Option<PathBuf>,
    #[arg(long, default_value_t = RESIDUAL_BOUND)]
    tol: f64,
    #[arg(long)]
    human: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    circuit: PathBuf,
    /// Basis state index to start from.
    #[arg(long, conflicts_with = "state")]
    input: Option<usize>,
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long)]
    human: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Render(a) => cmd_render(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Simulate(a) => cmd_simulate(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdos: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn print(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn read_circuit(path: &Path) -> Result<Circuit, CliError> {
    CircuitDocument::parse(&read(path)?)
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    Ok(ComplexMatrix::from_text(&read(path)?)?)
}

fn certificate(residual: f64, global_phase: f64, bound: f64) -> Certificate {
    Certificate {
        residual,
        global_phase,
        bound,
        within_bound: residual <= bound,
    }
}

fn check(cert: &Certificate) -> Result<(), CliError> {
    if cert.within_bound {
        Ok(())
    } else {
        Err(CliError::Residual {
            residual: cert.residual,
            bound: cert.bound,
        })
    }
}

struct SynthInputs<'a> {
    args: &'a SynthArgs,
    rng: ChaCha8Rng,
}

impl SynthInputs<'_> {
    fn angle(&mut self, name: &str, value: Option<f64>) -> Result<f64, CliError> {
        match value {
            Some(v) if v.is_finite() => Ok(if self.args.degrees { v.to_radians() } else { v }),
            Some(v) => Err(CliError::Parse(format!("--{name} is {v}"))),
            None if self.args.random => Ok(random_angle(&mut self.rng)),
            None => Ok(0.0),
        }
    }

    fn required_angle(&mut self, name: &str, value: Option<f64>) -> Result<f64, CliError> {
        if value.is_none() && !self.args.random {
            return Err(CliError::Parse(format!("--{name} or --random is required")));
        }
        self.angle(name, value)
    }

    /// Target matrix from `--matrix`, or drawn by `draw` under `--random`.
    fn matrix(&mut self, draw: impl FnOnce(&mut ChaCha8Rng) -> ComplexMatrix) -> Result<ComplexMatrix, CliError> {
        match (&self.args.matrix, self.args.random) {
            (Some(path), _) => read_matrix(path),
            (None, true) => Ok(draw(&mut self.rng)),
            (None, false) => Err(CliError::Parse("--matrix or --random is required".into())),
        }
    }
}

fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let mut inputs = SynthInputs {
        args,
        rng: ChaCha8Rng::seed_from_u64(args.seed),
    };
    let mut bound = RESIDUAL_BOUND;
    let result: SynthesisResult = match args.kind {
        SynthKind::Su2 => match &args.matrix {
            Some(path) => {
                let u = read_matrix(path)?;
                let r = synth::su2_from_euler(synth::euler_from_su2(&u)?)?;
                let al = align_global_phase(u.data(), circuit_to_unitary(&r.circuit)?.data());
                SynthesisResult {
                    residual: al.residual,
                    global_phase: al.phase,
                    ..r
                }
            }
            None => {
                let alpha = inputs.angle("alpha", args.alpha)?;
                let delta = inputs.angle("delta", args.delta)?;
                let gamma = inputs.angle("gamma", args.gamma)?;
                synth::su2_from_euler(EulerAngles::new(alpha, delta, gamma))?
            }
        },
        SynthKind::Cphase => synth::synth_cphase(inputs.required_angle("delta", args.delta)?)?,
        SynthKind::C2phase => synth::synth_c2phase(inputs.required_angle("delta", args.delta)?)?,
        SynthKind::Csu2 => synth::synth_csu2(&inputs.matrix(|r| random_special_unitary(2, r))?)?,
        SynthKind::Cu => synth::synth_cu(&inputs.matrix(|r| random_unitary(2, r))?)?,
        SynthKind::C2u => synth::synth_c2u(&inputs.matrix(|r| random_unitary(2, r))?)?,
        SynthKind::U4 => {
            bound = U4_RESIDUAL_BOUND;
            synth::synth_2q_unitary(&inputs.matrix(|r| random_unitary(4, r))?)?
        }
        SynthKind::Diag => {
            let n = args.n.unwrap_or(2);
            let phis = if args.phis.is_empty() && args.random {
                let count = (1usize << n.min(3)) - 1;
                (0..count).map(|_| random_angle(&mut inputs.rng)).collect()
            } else if args.degrees {
                args.phis.iter().map(|p| p.to_radians()).collect()
            } else {
                args.phis.clone()
            };
            synth::synth_diag(&DiagonalPhases::new(n, phis)?)?
        }
        SynthKind::State => {
            let target = match (&args.amps, args.random) {
                (Some(path), _) => StateDocument::parse(&read(path)?)?,
                (None, true) => random_state(args.n.unwrap_or(2), &mut inputs.rng),
                (None, false) => return Err(CliError::Parse("--amps or --random is required".into())),
            };
            synth::synth_state(&target)?
        }
    };
    if let Some(tol) = args.tol {
        bound = tol;
    }

    let cert = certificate(result.residual, result.global_phase, bound);
    let doc = CircuitDocument::from_circuit(&result.circuit);
    if let Some(path) = &args.out {
        write(path, &to_json(&doc))?;
    }
    if let Some(path) = &args.cert {
        write(path, &to_json(&cert))?;
    }
    if args.human {
        let mut text = format!(
            "{} ops on {} qubits\nresidual {:.3e} (bound {:.1e})\nglobal phase {:.15}\n",
            result.circuit.len(),
            result.circuit.n_qubits(),
            cert.residual,
            cert.bound,
            cert.global_phase
        );
        for op in &doc.ops {
            text.push_str(&format!("  {}\n", serde_json::to_string(op).expect("op serializes")));
        }
        print(&text)?;
    } else {
        #[derive(Serialize)]
        struct Output<'a> {
            circuit: &'a CircuitDocument,
            certificate: &'a Certificate,
        }
        print(&to_json(&Output {
            circuit: &doc,
            certificate: &cert,
        }))?;
    }
    check(&cert)
}

fn cmd_render(args: &RenderArgs) -> Result<(), CliError> {
    let circuit = read_circuit(&args.circuit)?;
    if circuit.n_qubits() > MAX_DIAGRAM_QUBITS {
        return Err(CliError::Size(format!(
            "{} qubits; diagrams are drawn for at most {MAX_DIAGRAM_QUBITS}",
            circuit.n_qubits()
        )));
    }
    let mut diagram = build_complete_diagram(&circuit)?;
    if let Some(k) = args.input_state {
        diagram = mark_information_flow(&diagram, k)?;
    }
    if args.simplified {
        diagram = simplify_diagram(&diagram)?;
    }
    let style = RenderStyle {
        format: match args.format {
            Format::Svg => RenderFormat::Svg,
            Format::Ascii => RenderFormat::Ascii,
        },
        show_normalization: args.show_normalization,
        mark_junctions: args.junctions,
        ..RenderStyle::default()
    };
    let text = render(&diagram, &style);
    match &args.out {
        Some(path) => write(path, &text),
        None => print(&text),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let circuit = read_circuit(&args.circuit)?;
    let al = match (&args.target, &args.target_state) {
        (Some(path), _) => {
            let target = read_matrix(path)?;
            if target.dim() != circuit.dim() {
                return Err(Error::DimensionMismatch {
                    expected: circuit.dim(),
                    found: target.dim(),
                }
                .into());
            }
            align_global_phase(target.data(), circuit_to_unitary(&circuit)?.data())
        }
        (None, Some(path)) => {
            let target = StateDocument::parse(&read(path)?)?;
            if target.dim() != circuit.dim() {
                return Err(Error::DimensionMismatch {
                    expected: circuit.dim(),
                    found: target.dim(),
                }
                .into());
            }
            let out = simulate(&circuit, &StateVector::basis(circuit.n_qubits(), 0)?)?;
            target.align_to(&out)?
        }
        (None, None) => unreachable!("clap requires a reference"),
    };
    let cert = certificate(al.residual, al.phase, args.tol);
    if args.human {
        let verdict = if cert.within_bound { "equal" } else { "different" };
        print(&format!(
            "{verdict} up to global phase: residual {:.3e}, phase {:.15}\n",
            cert.residual, cert.global_phase
        ))?;
    } else {
        print(&to_json(&cert))?;
    }
    check(&cert)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let circuit = read_circuit(&args.circuit)?;
    let input = match (&args.state, args.input) {
        (Some(path), _) => StateDocument::parse(&read(path)?)?,
        (None, k) => StateVector::basis(circuit.n_qubits(), k.unwrap_or(0))?,
    };
    if input.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.dim(),
            found: input.dim(),
        }
        .into());
    }
    let out = StateDocument::from_state(&simulate(&circuit, &input)?);
    if !args.human {
        return print(&out.to_json());
    }
    let mut text = String::new();
    for (k, [re, im]) in out.amps.iter().enumerate() {
        text.push_str(&format!("|{k:0w$b}\u{27e9}  {re:+.15} {im:+.15}i\n", w = out.n_qubits));
    }
    print(&text)
}
