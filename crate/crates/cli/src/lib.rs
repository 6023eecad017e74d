//! Command-line front end: argument grammar, dispatch and the reproduction
//! suites.

pub mod commands;
pub mod output;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

pub const GRAMMAR: &str = "\
Expression grammar:
  expr   := term (('+' | '-') term)*
  term   := cochain ('*' scalar)?  |  scalar '*' cochain
  cochain:= 'ps[' i1,...,in ';' t ']'   odd basis cochain, inputs e^I, output e_t (1-based)
          | 'ph[' i1,...,in ';' t ']'   even basis cochain
  scalar := rational | name | '(' scalar ')' | scalar op scalar, op in + - * / ^
Example: \"ps[1,1,0;1]*a + ps[2,0,0;3]*(1/2)\"";

#[derive(Debug, Parser)]
#[command(name = "linfty", about = "Exact computations with codifferentials on small graded spaces", after_help = GRAMMAR)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GradingArg {
    #[value(name = "Z")]
    Z,
    #[value(name = "Z2")]
    Z2,
}

impl From<GradingArg> for linfty_core::space::Grading {
    fn from(g: GradingArg) -> Self {
        match g {
            GradingArg::Z => linfty_core::space::Grading::Z,
            GradingArg::Z2 => linfty_core::space::Grading::Z2,
        }
    }
}

/// The space a command works on: explicit degrees or a catalog profile.
#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    /// Degrees of the basis elements, e.g. 0,-1,1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub degrees: Option<Vec<i64>>,
    /// Catalog profile: onebar2_x0, twobar1_012 or twobar1_m2m10.
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long, value_enum, default_value = "Z")]
    pub grading: GradingArg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graded bracket [f,g]; pass `same` as the second argument for [f,f].
    Bracket {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Action g*(d) of a linear automorphism.
    Act {
        #[command(flatten)]
        space: SpaceArgs,
        /// Matrix rows separated by ';', entries by ','. Column j is the image of e_j.
        #[arg(long, allow_hyphen_values = true)]
        auto: String,
        #[arg(allow_hyphen_values = true)]
        d: String,
    },
    /// exp(-ad_gen) applied to d, truncated at the cutoff.
    Expad {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        gen: String,
        #[arg(long)]
        cutoff: u32,
        #[arg(allow_hyphen_values = true)]
        d: String,
    },
    /// Cohomology of D = [d,-] in exterior degree n and internal degree s.
    Cohomology {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        d: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
        /// Range of exterior degrees, e.g. 1..5.
        #[arg(long)]
        range: Option<String>,
        #[arg(long)]
        cutoff: Option<u32>,
    },
    /// Matrix of D: C^l_s -> C^{k+l-1}_{s+1}.
    Cobmatrix {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        d: String,
        #[arg(long)]
        l: u32,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
    },
    /// Miniversal deformation of a codifferential or catalog class.
    Deform {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        /// Catalog class (with --profile) instead of --d.
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_order: u32,
        #[arg(long)]
        cutoff: Option<u32>,
    },
    /// Obstruction to extending d by a term with n+1 inputs.
    Obstruction {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        d: String,
        #[arg(long)]
        n: u32,
    },
    /// Class of a codifferential in the profile's catalog.
    Classify {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        cutoff: Option<u32>,
        #[arg(allow_hyphen_values = true)]
        d: String,
    },
    /// Class of a point of the miniversal deformation of a catalog class.
    Identify {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        base: String,
        /// Parameter values, e.g. t3=1,s5=2.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        bind: Vec<String>,
        #[arg(long)]
        cutoff: Option<u32>,
        #[arg(long, default_value_t = 4)]
        max_order: u32,
    },
    /// Search for an automorphism taking one codifferential to another.
    Equiv {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        cutoff: Option<u32>,
        #[arg(allow_hyphen_values = true)]
        d1: String,
        #[arg(allow_hyphen_values = true)]
        d2: String,
    },
    /// Catalog, adjacencies and Z -> Z2 verdict for a profile.
    Report {
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
    },
    /// Run a golden-file suite: matrices, cohomology-tables, miniversal,
    /// identify, z2map, blocks, or all.
    Reproduce { suite: String },
}

/// Failures of a run, split by exit status.
#[derive(Debug)]
pub enum RunError {
    /// Bad invocation or unparsable input; exit 2.
    Usage(String),
    /// The computation refused the input; exit 1.
    Domain(anyhow::Error),
}

impl From<anyhow::Error> for RunError {
    fn from(e: anyhow::Error) -> Self {
        RunError::Domain(e)
    }
}

/// Parses `args`, runs the command and writes its document. Returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = writeln!(err, "{}", e.render());
                    let _ = writeln!(err, "{GRAMMAR}");
                    2
                }
            };
        }
    };
    match commands::dispatch(&cli) {
        Ok((name, answer, code)) => {
            let _ = writeln!(out, "{}", answer.render(name, cli.format));
            code
        }
        Err(RunError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            let _ = writeln!(err, "{GRAMMAR}");
            2
        }
        Err(RunError::Domain(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}
