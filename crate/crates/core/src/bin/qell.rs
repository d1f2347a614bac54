//! Command-line frontend. Exit codes: 0 ok, 2 parse, 3 math, 4 precision,
//! 5 resource caps.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qell::cli::{self, FunctorKind, TorusArgs};
use qell::config::Config;
use qell::error::Error;
use qell::format::parse_field_spec;

#[derive(Parser)]
#[command(
    name = "qell",
    about = "Exact computer algebra for q-twisted Laurent algebras: q-difference module classification, cocycle solving, quantum tori, and lattice moduli"
)]
struct Cli {
    /// Coefficient field: rational | quadratic:d | padic:p:N
    #[arg(long, global = true, default_value = "rational")]
    field: String,
    /// The twist q as a scalar literal in the field
    #[arg(long, global = true, default_value = "2")]
    q: String,
    /// Working precision in z-exponents
    #[arg(long, global = true, default_value_t = 32)]
    prec: i64,
    /// Orbit identification bound M
    #[arg(long = "orbit-bound", global = true, default_value_t = 24)]
    orbit_bound: i64,
    /// Seed for the randomized cyclic-vector search
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a module file into normal-form labels
    Classify { module: PathBuf },
    /// Build the direct-sum module of a label file
    Build { labels: PathBuf },
    /// Isomorphism test with window-supported witnesses
    Isocheck {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 8)]
        window: i64,
    },
    /// Dimension of the intertwiner space at a window
    Homdim {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 6)]
        window: i64,
    },
    /// Solve a(qz) - a(z) = g - g_0 and report the obstruction
    Cocycle {
        #[arg(long)]
        g: String,
        /// Also emit the small-divisor CSV up to this n
        #[arg(long = "diag-n", default_value_t = 0)]
        diag_n: u32,
    },
    /// Picard class of the unit cocycle c z^k exp(g)
    Picard {
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 0)]
        k: i64,
        #[arg(long)]
        g: Option<String>,
    },
    /// Exact small-divisor table |q^n - 1| as CSV
    Diagq {
        #[arg(long, default_value_t = 64)]
        n: u32,
    },
    /// Covering push-forward (functor f: along z -> z^n; g: induction)
    Pushforward {
        module: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "f")]
        functor: String,
        /// n-th root s of q, needed by functor g
        #[arg(long)]
        root: Option<String>,
    },
    /// Covering pull-back (functor f: substitution, needs --root; g: iterate)
    Pullback {
        module: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "f")]
        functor: String,
        #[arg(long)]
        root: Option<String>,
    },
    /// Twisted product of two torus element files
    TorusMul {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long = "padic-prec", default_value_t = 12)]
        padic_prec: u32,
        /// Commutation scalar chi[0][1]
        #[arg(long, default_value = "2")]
        chi: String,
    },
    /// Banach norm of a torus element for a radius vector
    TorusNorm {
        a: PathBuf,
        #[arg(long, default_value = "1,1")]
        r: String,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long = "padic-prec", default_value_t = 12)]
        padic_prec: u32,
        #[arg(long, default_value = "2")]
        chi: String,
    },
    /// Lattice moduli operations
    Moduli {
        #[command(subcommand)]
        sub: ModuliCmd,
    },
}

#[derive(Subcommand)]
enum ModuliCmd {
    /// Reduce an upper-half point into the fundamental domain
    Reduce {
        #[arg(long)]
        tau: String,
    },
    /// Decide SL2(Z) equivalence of two points
    Equiv {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        mu: String,
    },
    /// Continued-fraction expansion of a real quadratic point
    Cf {
        #[arg(long)]
        tau: String,
    },
    /// Similarity of two quasi-lattices "w1, w2"
    Similar {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        lattice2: String,
    },
    /// Stabilizer group and isometry-group description of a quasi-lattice
    Stab {
        #[arg(long)]
        lattice: String,
    },
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<String, Error> {
    let field = parse_field_spec(&cli.field)?;
    let mut cfg = Config::new(field, &cli.q)?;
    cfg.prec = cli.prec;
    cfg.orbit_bound = cli.orbit_bound;
    cfg.seed = cli.seed;
    let job = match &cli.cmd {
        Cmd::Classify { module } => cli::cmd_classify(&read(module)?, &cfg)?,
        Cmd::Build { labels } => cli::cmd_build(&read(labels)?, &cfg)?,
        Cmd::Isocheck { a, b, window } => cli::cmd_isocheck(&read(a)?, &read(b)?, *window, &cfg)?,
        Cmd::Homdim { a, b, window } => cli::cmd_homdim(&read(a)?, &read(b)?, *window, &cfg)?,
        Cmd::Cocycle { g, diag_n } => cli::cmd_cocycle(g, *diag_n, &cfg)?,
        Cmd::Picard { c, k, g } => cli::cmd_picard(c, *k, g.as_deref(), &cfg)?,
        Cmd::Diagq { n } => cli::cmd_diagq(*n, &cfg)?,
        Cmd::Pushforward { module, n, functor, root } => cli::cmd_pushforward(
            &read(module)?,
            *n,
            functor_kind(functor)?,
            root.as_deref(),
            &cfg,
        )?,
        Cmd::Pullback { module, n, functor, root } => cli::cmd_pullback(
            &read(module)?,
            *n,
            functor_kind(functor)?,
            root.as_deref(),
            &cfg,
        )?,
        Cmd::TorusMul { a, b, d, p, padic_prec, chi } => {
            let args = TorusArgs { d: *d, p: *p, prec: *padic_prec, chi_literal: chi.clone() };
            cli::cmd_torus_mul(&read(a)?, &read(b)?, &args, &cfg)?
        }
        Cmd::TorusNorm { a, r, d, p, padic_prec, chi } => {
            let args = TorusArgs { d: *d, p: *p, prec: *padic_prec, chi_literal: chi.clone() };
            cli::cmd_torus_norm(&read(a)?, r, &args, &cfg)?
        }
        Cmd::Moduli { sub } => match sub {
            ModuliCmd::Reduce { tau } => cli::cmd_moduli_reduce(tau, &cfg)?,
            ModuliCmd::Equiv { tau, mu } => cli::cmd_moduli_equiv(tau, mu, &cfg)?,
            ModuliCmd::Cf { tau } => cli::cmd_moduli_cf(tau, &cfg)?,
            ModuliCmd::Similar { lattice, lattice2 } => {
                cli::cmd_moduli_similar(lattice, lattice2, &cfg)?
            }
            ModuliCmd::Stab { lattice } => cli::cmd_moduli_stab(lattice, &cfg)?,
        },
    };
    let text = job.render();
    if let Some(path) = &cli.out {
        std::fs::write(path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(String::new())
    } else {
        Ok(text)
    }
}

fn functor_kind(s: &str) -> Result<FunctorKind, Error> {
    match s {
        "f" => Ok(FunctorKind::F),
        "g" => Ok(FunctorKind::G),
        _ => Err(Error::Unsupported("functor must be 'f' or 'g'".into())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
