use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use commands::CliError;
use report::Status;

/// Finite local po-spaces, sheaves on their open-dicover sites, and
/// progress graphs of PV programs.
#[derive(Parser)]
#[command(name = "geoconc", version)]
struct Cli {
    /// Write the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Space,
    Presheaf,
    Bundle,
    Dimap,
    Cover,
    Pv,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a document describes a valid object.
    Validate {
        file: PathBuf,
        #[arg(long = "as", value_enum, default_value = "space")]
        kind: Kind,
    },
    /// Germ normal form of a space given by germs or an atlas.
    Canonicalize {
        file: PathBuf,
        /// Another atlas on the same space to test for equivalence.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Decide whether a point map is a dimap.
    DimapCheck { file: PathBuf },
    /// Check the sheaf condition over all covers of every open.
    SheafCheck { file: PathBuf },
    /// Sheafify a presheaf by applying the plus construction twice.
    Sheafify { file: PathBuf },
    /// Stalk of a presheaf at a point.
    Stalk {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Sections, germ space and the round trip for a bundle.
    EtaleRoundtrip { file: PathBuf },
    /// Level tables of the Čech nerve of a cover.
    CechNerve {
        file: PathBuf,
        /// Highest level; defaults to $GEOCONC_TRUNCATE or 3.
        #[arg(long)]
        truncate: Option<usize>,
    },
    /// Stalkwise equivalence of a dimap over an ambient list of spaces.
    StalkwiseEquiv {
        file: PathBuf,
        /// Ambient spaces; defaults to the source and the target.
        #[arg(long, value_delimiter = ',')]
        ambient: Vec<PathBuf>,
    },
    /// Dihomotopy equivalences between two spaces under a context.
    DihomotopyEquiv {
        source: PathBuf,
        target: PathBuf,
        /// Context document with its maps into both spaces.
        #[arg(long)]
        context: Option<PathBuf>,
        #[arg(long, default_value_t = geoconc::dihomotopy::DEFAULT_NMAX)]
        nmax: usize,
        /// Test this point map only.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, default_value_t = geoconc::dihomotopy::DEFAULT_HOM_CAP)]
        cap: usize,
    },
    /// Progress model of a PV program and its dipath classes.
    PvBuild {
        file: PathBuf,
        /// Points per action along each process.
        #[arg(long, default_value_t = 1)]
        granularity: usize,
        /// Dipath length to classify; defaults to one more than the shortest.
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, default_value_t = geoconc::dihomotopy::DEFAULT_HOM_CAP)]
        cap: usize,
        /// Also write the model as a space document.
        #[arg(long)]
        emit_space: Option<PathBuf>,
    },
}

fn run(cmd: Command) -> Result<report::Report, CliError> {
    match cmd {
        Command::Validate { file, kind } => commands::validate(&file, kind),
        Command::Canonicalize { file, compare } => commands::canonicalize(&file, compare.as_deref()),
        Command::DimapCheck { file } => commands::dimap_check(&file),
        Command::SheafCheck { file } => commands::sheaf_check(&file),
        Command::Sheafify { file } => commands::sheafify(&file),
        Command::Stalk { file, point } => commands::stalk(&file, &point),
        Command::EtaleRoundtrip { file } => commands::etale_roundtrip(&file),
        Command::CechNerve { file, truncate } => commands::cech_nerve(&file, truncate),
        Command::StalkwiseEquiv { file, ambient } => commands::stalkwise_equiv(&file, &ambient),
        Command::DihomotopyEquiv { source, target, context, nmax, map, cap } => {
            commands::dihomotopy_equiv(&source, &target, context.as_deref(), nmax, map.as_deref(), cap)
        }
        Command::PvBuild { file, granularity, length, cap, emit_space } => {
            commands::pv_build(&file, granularity, length, cap, emit_space.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(r) => {
            print!("{}", if cli.json { r.to_json() } else { r.to_text() });
            match r.status {
                Status::Pass => ExitCode::SUCCESS,
                Status::Fail => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            ExitCode::from(2)
        }
    }
}
