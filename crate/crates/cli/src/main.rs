use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coulomb_cli::job::report_error;
use coulomb_cli::{diff_series, json, CliError, Command, JobSpec, SliceInput, EXIT_DIFFERENT, EXIT_OK};
use coulomb_core::gauge::DetSign;
use coulomb_core::series::Units;

#[derive(Parser)]
#[command(name = "coulomb", version, about = "Monopole-formula Hilbert series of quiver gauge theories and slices")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hilbert series of a framed theory (homological grading by default).
    Hilbert {
        /// Theory JSON.
        #[arg(long)]
        theory: PathBuf,
        #[arg(long, value_enum, default_value_t = GradingArg::Homological)]
        grading: GradingArg,
        /// Grading vector for loop/character gradings; defaults to dimV.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[command(flatten)]
        series: SeriesOpts,
        #[command(flatten)]
        common: Common,
    },
    /// Hilbert series of a finite slice, graded by loop rotation.
    Slice {
        #[command(flatten)]
        slice: SliceOpts,
        #[command(flatten)]
        series: SeriesOpts,
        #[command(flatten)]
        common: Common,
    },
    /// Hilbert series of an affine slice.
    AffineSlice {
        #[command(flatten)]
        slice: SliceOpts,
        #[command(flatten)]
        series: SeriesOpts,
        #[command(flatten)]
        common: Common,
    },
    /// Character of a zastava space, graded by t and z.
    Zastava {
        /// Quiver (or theory) JSON.
        #[arg(long)]
        quiver: PathBuf,
        /// Degree, e.g. `1,1` or `a1+a2`; defaults to the dimV of the input.
        #[arg(long)]
        alpha: Option<String>,
        #[command(flatten)]
        series: SeriesOpts,
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether the monopole sum converges (exit 0 for every verdict).
    Properness {
        /// Theory JSON.
        #[arg(long)]
        theory: PathBuf,
        #[arg(long, value_enum, default_value_t = GradingArg::Homological)]
        grading: GradingArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Dominant representative of an affine Weyl orbit at fixed level.
    OrbitRep {
        /// Affine quiver JSON.
        #[arg(long)]
        quiver: PathBuf,
        /// Extending vertex id.
        #[arg(long)]
        node: Option<String>,
        /// Affine weight: JSON or an expression such as `w0 + 3w1 - d`.
        #[arg(long, allow_hyphen_values = true)]
        weight: String,
        #[command(flatten)]
        common: Common,
    },
    /// Fold a simply-laced Cartan matrix along a diagram automorphism.
    Fold {
        #[arg(long)]
        quiver: PathBuf,
        /// Images of the vertices in order (`3,2,1`), or a JSON id map.
        #[arg(long)]
        automorphism: String,
        #[command(flatten)]
        common: Common,
    },
    /// Dominant weights between mu and lambda.
    LeafInterval {
        #[command(flatten)]
        slice: SliceOpts,
        /// Read weights and theories as affine.
        #[arg(long)]
        affine: bool,
        /// Largest delta coefficient of lambda - lambda' (affine only).
        #[arg(long)]
        energy_bound: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare two series files up to the smaller truncation order.
    Diff {
        a: PathBuf,
        b: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GradingArg {
    Homological,
    Loop,
    Character,
}

impl GradingArg {
    fn name(self) -> &'static str {
        match self {
            GradingArg::Homological => "homological",
            GradingArg::Loop => "loop",
            GradingArg::Character => "character",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitsArg {
    Half,
    Integer,
    Doubled,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Flipped,
    Literal,
}

#[derive(Args)]
struct SliceOpts {
    /// Slice JSON.
    #[arg(long)]
    slice: Option<PathBuf>,
    /// Theory JSON, read through the slice dictionary.
    #[arg(long)]
    theory: Option<PathBuf>,
    /// Quiver JSON, used with --lambda and --mu or --alpha.
    #[arg(long)]
    quiver: Option<PathBuf>,
    /// Extending vertex of an affine quiver.
    #[arg(long)]
    node: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// lambda - mu as a vector over the vertices.
    #[arg(long)]
    alpha: Option<String>,
}

impl SliceOpts {
    fn into_input(self) -> SliceInput {
        SliceInput {
            slice: self.slice,
            theory: self.theory,
            quiver: self.quiver,
            node: self.node,
            lambda: self.lambda,
            mu: self.mu,
            alpha: self.alpha,
        }
    }
}

#[derive(Args)]
struct SeriesOpts {
    /// Truncation order in powers of t.
    #[arg(long)]
    order: u32,
    /// How exponents are printed in the series file.
    #[arg(long, value_enum, default_value_t = UnitsArg::Half)]
    units: UnitsArg,
    /// Enumerate this l-infinity ball even when the sum is not proper.
    #[arg(long)]
    radius: Option<u64>,
    /// Largest radius the enumeration may reach on its own.
    #[arg(long)]
    radius_cap: Option<u64>,
}

#[derive(Args)]
struct Common {
    /// Worker threads; falls back to COULOMB_THREADS, then all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Output path. Series jobs also write `<output>.json`.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Reuse results stored under this directory.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Leave the wall time out of the envelope.
    #[arg(long)]
    omit_timing: bool,
    /// Sign of the determinant correction in the exponent.
    #[arg(long, value_enum, default_value_t = SignArg::Flipped)]
    det_sign: SignArg,
    /// Sign patterns examined before properness is declared inconclusive.
    #[arg(long)]
    cone_cap: Option<u64>,
}

fn job(command: Command, series: Option<SeriesOpts>, common: Common) -> JobSpec {
    let mut job = JobSpec::new(command);
    if let Some(s) = series {
        job.order = Some(s.order);
        job.units = match s.units {
            UnitsArg::Half => Units::Half,
            UnitsArg::Integer => Units::Integer,
            UnitsArg::Doubled => Units::Doubled,
        };
        job.radius_override = s.radius;
        if let Some(cap) = s.radius_cap {
            job.radius_cap = cap;
        }
    }
    job.det_sign = match common.det_sign {
        SignArg::Flipped => DetSign::Flipped,
        SignArg::Literal => DetSign::Literal,
    };
    if let Some(cap) = common.cone_cap {
        job.cone_cap = cap;
    }
    job.threads = common.threads;
    job.output = common.output;
    job.cache_dir = common.cache_dir;
    job.omit_timing = common.omit_timing;
    job
}

fn run_diff(a: PathBuf, b: PathBuf, output: Option<PathBuf>) -> i32 {
    let read = |p: &PathBuf| fs::read_to_string(p).map_err(|e| CliError::io(p, e));
    let outcome = read(&a).and_then(|x| read(&b).and_then(|y| diff_series(&x, &y)));
    match outcome {
        Ok(report) => {
            let text = json::to_text(&report.to_json());
            let written = match output {
                Some(p) => fs::write(&p, text).map_err(|e| CliError::io(&p, e)),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Err(e) => report_error(&e),
                Ok(()) if report.is_equal() => EXIT_OK,
                Ok(()) => EXIT_DIFFERENT,
            }
        }
        Err(e) => report_error(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Cmd::Hilbert {
            theory,
            grading,
            alpha,
            series,
            common,
        } => coulomb_cli::run(&job(
            Command::Hilbert {
                theory,
                grading: grading.name().into(),
                alpha,
            },
            Some(series),
            common,
        )),
        Cmd::Slice { slice, series, common } => {
            coulomb_cli::run(&job(Command::Slice(slice.into_input()), Some(series), common))
        }
        Cmd::AffineSlice { slice, series, common } => {
            coulomb_cli::run(&job(Command::AffineSlice(slice.into_input()), Some(series), common))
        }
        Cmd::Zastava {
            quiver,
            alpha,
            series,
            common,
        } => coulomb_cli::run(&job(Command::Zastava { quiver, alpha }, Some(series), common)),
        Cmd::Properness {
            theory,
            grading,
            alpha,
            common,
        } => coulomb_cli::run(&job(
            Command::Properness {
                theory,
                grading: grading.name().into(),
                alpha,
            },
            None,
            common,
        )),
        Cmd::OrbitRep {
            quiver,
            node,
            weight,
            common,
        } => coulomb_cli::run(&job(Command::OrbitRep { quiver, node, weight }, None, common)),
        Cmd::Fold {
            quiver,
            automorphism,
            common,
        } => coulomb_cli::run(&job(Command::Fold { quiver, automorphism }, None, common)),
        Cmd::LeafInterval {
            slice,
            affine,
            energy_bound,
            common,
        } => coulomb_cli::run(&job(
            Command::LeafInterval {
                input: slice.into_input(),
                affine,
                energy_bound,
            },
            None,
            common,
        )),
        Cmd::Diff { a, b, output } => run_diff(a, b, output),
    };
    ExitCode::from(code as u8)
}
