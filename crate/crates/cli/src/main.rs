//! `tauttrack`: checks taut structures, loops and disk diagrams from the
//! command line.
//!
//! Exit status is 0 when a check passes or a refutation is found, 1 when an
//! audit fails (or a certificate survives), and 2 when the inputs are unusable.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "tauttrack", version, about = "Taut triangulations, loops and disk diagrams")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Print the proof transcript alongside text reports.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Triangulation documents.
    #[command(subcommand)]
    Tri(TriCmd),
    /// Taut structures.
    #[command(subcommand)]
    Taut(TautCmd),
    /// Co-orientations.
    #[command(subcommand)]
    Transverse(TransverseCmd),
    /// The double cover of a taut structure.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Dual and normal loops.
    #[command(subcommand)]
    Loop(LoopCmd),
    /// Disk diagrams.
    #[command(subcommand)]
    Disk(DiskCmd),
    /// Test corpus.
    #[command(subcommand)]
    Corpus(CorpusCmd),
}

#[derive(Subcommand, Debug)]
pub enum TriCmd {
    /// Checks gluings, edge classes and orientability.
    Validate { tri: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum TautCmd {
    /// Checks the angle sum around every edge.
    Verify { tri: PathBuf, taut: PathBuf },
    /// Lists every taut structure.
    Enumerate { tri: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum TransverseCmd {
    /// Finds a transverse co-orientation if there is one.
    Detect { tri: PathBuf, taut: PathBuf },
    /// Checks a co-orientation.
    Verify { tri: PathBuf, taut: PathBuf, coor: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum CoverCmd {
    /// Writes the cover triangulation to OUT, with OUT.taut and OUT.coor beside it.
    Build {
        tri: PathBuf,
        taut: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

// triangulation and taut structure, with an optional co-orientation
#[derive(Args, Debug)]
pub struct Structure {
    pub tri: PathBuf,
    pub taut: PathBuf,
    /// Co-orientation file; detected (or the double cover used) when absent.
    #[arg(long)]
    pub coor: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum LoopCmd {
    /// Checks that a dual loop crosses the equator at every step.
    CheckVertical {
        #[command(flatten)]
        structure: Structure,
        dual: PathBuf,
    },
    /// Checks that a normal loop is normal.
    CheckNormal {
        #[command(flatten)]
        structure: Structure,
        normal: PathBuf,
    },
    /// Raises a normal loop and types its arcs.
    Raise {
        #[command(flatten)]
        structure: Structure,
        normal: PathBuf,
    },
    /// Pushes a normal loop up across one tetrahedron.
    PushUp {
        #[command(flatten)]
        structure: Structure,
        normal: PathBuf,
        #[arg(long)]
        site: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Vertical,
    Normal,
}

#[derive(Subcommand, Debug)]
pub enum DiskCmd {
    /// Checks the total index and minimal form.
    Audit {
        #[command(flatten)]
        structure: Structure,
        diagram: PathBuf,
    },
    /// Lists regions with their corners, cusps and index.
    Census {
        tri: PathBuf,
        diagram: PathBuf,
    },
    /// Pushes a min-bigon (the first in boundary order unless --bigon is given).
    PushMin {
        #[command(flatten)]
        structure: Structure,
        diagram: PathBuf,
        #[arg(long)]
        bigon: Option<usize>,
        /// Where to write the pushed diagram; printed otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs surgery on a max-bigon.
    Surgery {
        #[command(flatten)]
        structure: Structure,
        diagram: PathBuf,
        #[arg(long)]
        bigon: usize,
    },
    /// Tries to refute the disk and prints a certificate.
    Refute {
        #[command(flatten)]
        structure: Structure,
        diagram: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Normal loop on the boundary; defaults to the diagram's `boundary loop=` file.
        #[arg(long)]
        normal: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CorpusCmd {
    /// TAUTTRACK_SEED, when set, overrides --seed.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Normal-boundary diagrams written per corpus (all are generated).
        #[arg(long, default_value_t = 400)]
        max_normal: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli.command) {
        Ok(report) => {
            print!("{}", report.render(cli.format, cli.verbose));
            ExitCode::from(report.status.code())
        }
        Err(e) => {
            eprintln!("tauttrack: {e}");
            ExitCode::from(2)
        }
    }
}
