mod commands;
mod io;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Load;
use crate::io::{emit, CliError, CliResult};

/// Green's functions, boundary conditions and spectra for the finite beam on an elastic foundation.
#[derive(Parser)]
#[command(name = "beam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    /// Half-length of the beam.
    #[arg(long, default_value_t = 1.0)]
    l: f64,
    /// Stiffness ratio (k/EI)^(1/4).
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Foundation spring density.
    #[arg(long, default_value_t = 1.0)]
    k: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Well-posedness test: det of the 4x4 tilde matrix.
    Wellposed {
        /// q, clamped, free, hinged, or a JSON file {"M": ..., "name": ...}.
        #[arg(long)]
        bc: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Green's matrices G-, G+ and Gamma, optionally the kernel at (x, xi).
    Greens {
        #[arg(long)]
        bc: String,
        #[arg(long, requires = "xi")]
        x: Option<f64>,
        #[arg(long, requires = "x")]
        xi: Option<f64>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Gamma(M) as a 4x4 matrix.
    Gamma {
        #[arg(long)]
        bc: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Boundary condition with the given Gamma.
    GammaInv {
        /// JSON file {"rows": 4, "cols": 4, "data": [[re, im], ...]}.
        #[arg(long)]
        g: PathBuf,
        /// Return a real condition; G must lie in pibar(4).
        #[arg(long)]
        real: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Real eigenvalues in an interval by the characteristic equation.
    Spectrum {
        #[arg(long)]
        bc: String,
        #[arg(long, num_args = 2, required = true, value_names = ["A", "B"], allow_negative_numbers = true)]
        interval: Vec<f64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 4000)]
        grid: usize,
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Eigenvalues mu_n, nu_n of K_Q.
    Specq {
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Deflection u = K_M[w] for a built-in load.
    Solve {
        #[arg(long)]
        bc: String,
        #[arg(long, value_enum, default_value_t = Load::Uniform)]
        load: Load,
        #[arg(long, default_value_t = 200)]
        nodes: usize,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Real well-posed condition with a prescribed real eigenvalue.
    Construct {
        #[arg(long, allow_negative_numbers = true, conflicts_with = "input")]
        lambda: Option<f64>,
        /// JSON file {"lambda": x, "params": {"l": .., "alpha": .., "k": ..}}.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Nystrom nodes for the verification (0 to skip).
        #[arg(long, default_value_t = 400)]
        nodes: usize,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Nystrom eigenvalues with residuals and doubling deltas.
    Oracle {
        #[arg(long)]
        bc: String,
        #[arg(long, default_value_t = 400)]
        nodes: usize,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long)]
        no_doubling: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run the invariant suite and print a PASS/FAIL table.
    Verify {
        #[arg(long)]
        json: bool,
    },
}

fn p(a: ParamArgs) -> CliResult<beam_bvp::matrix_kit::BeamParams> {
    io::params(a.l, a.alpha, a.k)
}

fn execute(cmd: Command) -> CliResult<(String, bool)> {
    Ok(match cmd {
        Command::Wellposed { bc, params } => {
            let p = p(params)?;
            (emit(&commands::wellposed(&io::boundary_condition(&bc, &p)?, &p))?, true)
        }
        Command::Greens { bc, x, xi, params } => {
            let p = p(params)?;
            (emit(&commands::greens(&io::boundary_condition(&bc, &p)?, &p, x.zip(xi))?)?, true)
        }
        Command::Gamma { bc, params } => {
            let p = p(params)?;
            (emit(&commands::gamma_matrix(&io::boundary_condition(&bc, &p)?, &p)?)?, true)
        }
        Command::GammaInv { g, real, params } => {
            let p = p(params)?;
            (emit(&commands::gamma_inv(&io::matrix4(&g)?, &p, real)?)?, true)
        }
        Command::Spectrum { bc, interval, count, grid, csv, params } => {
            let p = p(params)?;
            let s = commands::spectrum(&io::boundary_condition(&bc, &p)?, &p, (interval[0], interval[1]), count, grid)?;
            (if csv { io::csv(&commands::spectrum_rows(&s)) } else { emit(&s)? }, true)
        }
        Command::Specq { count, csv, params } => {
            let p = p(params)?;
            let s = commands::specq(&p, count)?;
            (if csv { io::csv(&s.rows) } else { emit(&s)? }, true)
        }
        Command::Solve { bc, load, nodes, points, csv, params } => {
            let p = p(params)?;
            let s = commands::solve(&io::boundary_condition(&bc, &p)?, &p, load, nodes, points)?;
            let out = if csv {
                let mut t = String::from("x,u_re,u_im\n");
                for (x, u) in s.x.iter().zip(&s.u) {
                    t.push_str(&format!("{x:e},{:e},{:e}\n", u[0], u[1]));
                }
                t
            } else {
                emit(&s)?
            };
            (out, true)
        }
        Command::Construct { lambda, input, nodes, params } => {
            let (lambda, p) = match (lambda, input) {
                (Some(l), None) => (l, p(params)?),
                (None, Some(path)) => {
                    let inp: commands::ConstructInput = io::input(&path)?;
                    let p = match inp.params {
                        Some(q) => io::params(q.l, q.alpha, q.k)?,
                        None => p(params)?,
                    };
                    (inp.lambda, p)
                }
                _ => return Err(CliError::Usage("give exactly one of --lambda or --input".into())),
            };
            let nodes = (nodes > 0).then_some(nodes);
            (emit(&commands::construct(lambda, &p, nodes)?)?, true)
        }
        Command::Oracle { bc, nodes, top, no_doubling, params } => {
            let p = p(params)?;
            (emit(&commands::oracle(&io::boundary_condition(&bc, &p)?, &p, nodes, top, !no_doubling)?)?, true)
        }
        Command::Verify { json } => {
            let results = verify::run();
            let ok = results.iter().all(|r| r.pass);
            (if json { emit(&results)? } else { verify::table(&results) }, ok)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", CliError::Usage(e.to_string().trim().to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    match execute(cli.command) {
        Ok((out, ok)) => {
            let mut stdout = std::io::stdout().lock();
            let written = stdout.write_all(out.as_bytes()).and_then(|_| if out.ends_with('\n') { Ok(()) } else { stdout.write_all(b"\n") });
            if written.is_err() {
                return ExitCode::from(1);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
