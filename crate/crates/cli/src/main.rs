use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wexpand::analysis::{
    grid_to_csv, linspace, scan_pdbs_deviation, sweep_cascade, sweep_coincidence, sweep_expansion,
    table_to_csv, ScanGrid, MAX_SWEEP_N,
};
use wexpand::registry::{beamsplitter_methods, detector_responses};
use wexpand::wgate::{cascade_prepare_with, expand_w_with, FeedPort, GateOutcome};
use wexpand::{selfcheck, Error, PdbsParams};

// stdout writes that tolerate a closed pipe (e.g. `| head`)
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout().lock(), $($arg)*);
    }};
}

macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "wexpand",
    version,
    about = "Post-selected W-state expansion gate simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand W_N to W_{N+1} once and report probability, fidelity and state.
    Expand {
        #[arg(long = "n", value_parser = clap::value_parser!(u16).range(1..=MAX_SWEEP_N as i64))]
        n: u16,
        #[command(flatten)]
        gate: GateArgs,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        format: Report,
    },
    /// Prepare W_{k+1} from a single V photon with k cascaded gates.
    Cascade {
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..=16))]
        k: u16,
        /// Gate output fed into the next gate.
        #[arg(long, value_enum, default_value_t = Feed::Out4)]
        feed: Feed,
        #[command(flatten)]
        gate: GateArgs,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        format: Report,
    },
    /// Fidelity and probability grid over beamsplitter deviations.
    ///
    /// Writes fidelity.csv and probability.csv into --out. Each file has a
    /// header row `delta\Delta,<Delta values...>` followed by one row per
    /// delta value (H deviation), cells in row-major order. With
    /// --format json a single scan.json holds delta_axis, Delta_axis,
    /// fidelity and probability.
    Scan {
        #[arg(long = "delta-min", default_value_t = -0.15, allow_hyphen_values = true)]
        delta_min: f64,
        #[arg(long = "delta-max", default_value_t = 0.15, allow_hyphen_values = true)]
        delta_max: f64,
        #[arg(long = "Delta-min", default_value_t = -0.15, allow_hyphen_values = true)]
        delta_v_min: f64,
        #[arg(long = "Delta-max", default_value_t = 0.15, allow_hyphen_values = true)]
        delta_v_max: f64,
        /// Points per axis.
        #[arg(long, default_value_t = 121, value_parser = clap::value_parser!(u32).range(1..=2001))]
        grid: u32,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Machine::Csv)]
        format: Machine,
    },
    /// Four-fold coincidence probability and true-coincidence ratio.
    Coincidence {
        /// Pair amplitude(s), comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        gamma: Vec<f64>,
        /// Detector efficiency(ies), comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        eta: Vec<f64>,
        /// Detector response strategy.
        #[arg(long, default_value = "onoff")]
        detector: String,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        format: Report,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Probability table of W_N -> W_{N+1} for N = 1..=n-max.
    ExpansionTable {
        #[arg(long = "n-max", default_value_t = 6)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        format: Report,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cumulative probability and fidelity for cascades k = 1..=k-max.
    CascadeTable {
        #[arg(long = "k-max", default_value_t = 5)]
        k_max: usize,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        format: Report,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Replay every reference closed-form number; exit 2 on any mismatch.
    Selfcheck {
        #[arg(long, value_enum, default_value_t = Report::Text)]
        format: Report,
    },
    /// List registered beamsplitter and detector strategies.
    Strategies,
}

#[derive(Args, Debug)]
struct GateArgs {
    /// H transmission (default: ideal value).
    #[arg(long)]
    mu: Option<f64>,
    /// V transmission (default: ideal value).
    #[arg(long)]
    nu: Option<f64>,
    /// Deviation added to mu.
    #[arg(long = "delta", default_value_t = 0.0, allow_hyphen_values = true)]
    delta_h: f64,
    /// Deviation added to nu.
    #[arg(long = "Delta", default_value_t = 0.0, allow_hyphen_values = true)]
    delta_v: f64,
    /// Beamsplitter transformation strategy.
    #[arg(long, default_value = "monomial")]
    method: String,
}

impl GateArgs {
    fn params(&self) -> PdbsParams {
        let ideal = PdbsParams::ideal();
        PdbsParams {
            mu: self.mu.unwrap_or(ideal.mu),
            nu: self.nu.unwrap_or(ideal.nu),
            delta_h: self.delta_h,
            delta_v: self.delta_v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Report {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Machine {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Feed {
    Out3,
    Out4,
}

enum Failure {
    Usage(String),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation(msg) => Failure::Validation(msg),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Expand { n, gate, format } => {
            let method = beamsplitter_methods().get(&gate.method)?;
            let out = expand_w_with(method.as_ref(), n as usize, &gate.params())?;
            emit_gate(&format!("W{n} -> W{}", n + 1), &out, format)
        }
        Command::Cascade {
            k,
            feed,
            gate,
            format,
        } => {
            let method = beamsplitter_methods().get(&gate.method)?;
            let feed = match feed {
                Feed::Out3 => FeedPort::Out3,
                Feed::Out4 => FeedPort::Out4,
            };
            let c = cascade_prepare_with(method.as_ref(), k as usize, &gate.params(), feed)?;
            emit_gate(
                &format!("cascade of {k} gates -> W{}", k + 1),
                &c.outcome,
                format,
            )
        }
        Command::Scan {
            delta_min,
            delta_max,
            delta_v_min,
            delta_v_max,
            grid,
            out,
            format,
        } => {
            if delta_min > delta_max || delta_v_min > delta_v_max {
                return Err(Failure::Usage("scan range minimum exceeds maximum".into()));
            }
            let rows = linspace(delta_min, delta_max, grid as usize);
            let cols = linspace(delta_v_min, delta_v_max, grid as usize);
            let scan = scan_pdbs_deviation(&rows, &cols)?;
            fs::create_dir_all(&out).map_err(|e| io_failure(&out, e))?;
            write_scan(&scan, &out, format)
        }
        Command::Coincidence {
            gamma,
            eta,
            detector,
            format,
            output,
        } => {
            let rows = sweep_coincidence(&gamma, &eta, &detector, &PdbsParams::ideal())?;
            if format == Report::Text {
                let mut text = String::from("gamma      eta        p_c            p_t            p_f            ratio      analytic   residual\n");
                for r in &rows {
                    text.push_str(&format!(
                        "{:<10.6} {:<10.6} {:<14.6e} {:<14.6e} {:<14.6e} {:<10.6} {:<10.6} {:.6e}\n",
                        r.gamma, r.eta, r.p_c, r.p_t, r.p_f, r.ratio, r.analytic_ratio, r.residual
                    ));
                }
                sink(output.as_deref(), &text)
            } else {
                emit_table(&rows, format, output.as_deref())
            }
        }
        Command::ExpansionTable {
            n_max,
            format,
            output,
        } => {
            let rows = sweep_expansion(n_max)?;
            if format == Report::Text {
                let mut text = String::from("N  probability  (N+1)/5N   fidelity\n");
                for r in &rows {
                    text.push_str(&format!(
                        "{:<2} {:<12.6} {:<10.6} {:.6}\n",
                        r.n, r.probability, r.expected, r.fidelity
                    ));
                }
                sink(output.as_deref(), &text)
            } else {
                emit_table(&rows, format, output.as_deref())
            }
        }
        Command::CascadeTable {
            k_max,
            format,
            output,
        } => {
            let rows = sweep_cascade(k_max)?;
            if format == Report::Text {
                let mut text = String::from("k  probability  (k+1)5^-k  fidelity\n");
                for r in &rows {
                    text.push_str(&format!(
                        "{:<2} {:<12.6} {:<10.6} {:.6}\n",
                        r.k, r.probability, r.expected, r.fidelity
                    ));
                }
                sink(output.as_deref(), &text)
            } else {
                emit_table(&rows, format, output.as_deref())
            }
        }
        Command::Selfcheck { format } => {
            let items = selfcheck::run()?;
            let failed = items.iter().filter(|i| !i.passed).count();
            match format {
                Report::Text => {
                    for i in &items {
                        outln!(
                            "[{}] {}: expected {:.6}, got {:.6}",
                            if i.passed { "PASS" } else { "FAIL" },
                            i.name,
                            i.expected,
                            i.actual
                        );
                    }
                    outln!("{} of {} checks passed", items.len() - failed, items.len());
                }
                Report::Csv => out!("{}", table_to_csv(&items)?),
                Report::Json => outln!("{}", to_json(&items)?),
            }
            if failed > 0 {
                return Err(Failure::Validation(format!("{failed} check(s) failed")));
            }
            Ok(())
        }
        Command::Strategies => {
            for reg in [beamsplitter_methods().names(), detector_responses().names()]
                .iter()
                .zip(["beamsplitter", "detector"])
            {
                outln!("{}: {}", reg.1, reg.0.join(", "));
            }
            Ok(())
        }
    }
}

fn emit_gate(title: &str, out: &GateOutcome, format: Report) -> Result<(), Failure> {
    let summary = out.summary();
    match format {
        Report::Text => {
            outln!("{title}");
            outln!("success probability: {:.6}", summary.success_prob);
            outln!("fidelity: {:.6}", summary.fidelity);
            outln!("post-selected state ({} terms):", summary.terms.len());
            for t in &summary.terms {
                if t.im == 0.0 {
                    outln!("  {:+.6} {}", t.re, t.basis);
                } else {
                    outln!("  ({:+.6}{:+.6}i) {}", t.re, t.im, t.basis);
                }
            }
        }
        Report::Csv => out!("{}", table_to_csv(&summary.terms)?),
        Report::Json => outln!("{}", to_json(&summary)?),
    }
    Ok(())
}

fn emit_table<T: Serialize>(
    rows: &[T],
    format: Report,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let text = match format {
        Report::Json => to_json(&rows)? + "\n",
        _ => table_to_csv(rows)?,
    };
    sink(output, &text)
}

fn write_scan(scan: &ScanGrid, dir: &Path, format: Machine) -> Result<(), Failure> {
    match format {
        Machine::Csv => {
            for (name, cells) in [
                ("fidelity.csv", &scan.fidelity),
                ("probability.csv", &scan.probability),
            ] {
                let text = grid_to_csv(&scan.delta_axis, &scan.delta_v_axis, cells)?;
                write_file(&dir.join(name), &text)?;
            }
        }
        Machine::Json => write_file(&dir.join("scan.json"), &(to_json(scan)? + "\n"))?,
    }
    let (r, c) = scan.shape();
    outln!("wrote {r}x{c} grid to {}", dir.display());
    Ok(())
}

fn sink(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("cannot write {}: {e}", path.display()))
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))
}
