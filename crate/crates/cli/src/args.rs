use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "blockers",
    version,
    about = "Blockers of 123-avoiding permutation matrices"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalOpts {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Override the largest order a command accepts.
    #[arg(long, global = true, value_name = "N")]
    pub limit: Option<usize>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true, value_name = "K")]
    pub threads: Option<usize>,
    /// Write a run manifest (parameters, timestamps, outcome) here.
    #[arg(long, global = true, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
    /// Neither read nor write the avoider cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the 123-avoiding permutations of order n.
    Avoiders(AvoidersArgs),
    /// Show the cyclic-Hankel label of every cell.
    Hankel(OrderArgs),
    /// Emit the flag-shaped blocker B_n(m,t).
    Flag(FlagArgs),
    /// Emit the L-shaped blocker with width s and height r.
    Lshape(LshapeArgs),
    /// Check whether a cell set is a blocker, and optionally minimum or minimal.
    Verify(VerifyArgs),
    /// List the avoiders meeting a cell set in exactly one cell.
    Once(SetArgs),
    /// Exact rank of the face a blocker determines.
    FaceRank(FaceRankArgs),
    /// Check that no once-intersecting avoider enters the forbidden corner.
    CornerCheck(CornerArgs),
    /// Compare achievable flag cardinalities with the closed-form predicate.
    CardAudit(AuditArgs),
    /// Enumerate minimum blockers up to a cardinality cap.
    Search(SearchArgs),
    /// Look for a minimum blocker larger than r*s.
    Conjecture(ConjectureArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Avoiders(_) => "avoiders",
            Command::Hankel(_) => "hankel",
            Command::Flag(_) => "flag",
            Command::Lshape(_) => "lshape",
            Command::Verify(_) => "verify",
            Command::Once(_) => "once",
            Command::FaceRank(_) => "face-rank",
            Command::CornerCheck(_) => "corner-check",
            Command::CardAudit(_) => "card-audit",
            Command::Search(_) => "search",
            Command::Conjecture(_) => "conjecture",
        }
    }

    pub fn parameters(&self) -> serde_json::Value {
        let v = match self {
            Command::Avoiders(a) => serde_json::to_value(a),
            Command::Hankel(a) => serde_json::to_value(a),
            Command::Flag(a) => serde_json::to_value(a),
            Command::Lshape(a) => serde_json::to_value(a),
            Command::Verify(a) => serde_json::to_value(a),
            Command::Once(a) => serde_json::to_value(a),
            Command::FaceRank(a) => serde_json::to_value(a),
            Command::CornerCheck(a) => serde_json::to_value(a),
            Command::CardAudit(a) => serde_json::to_value(a),
            Command::Search(a) => serde_json::to_value(a),
            Command::Conjecture(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }

    /// Input files whose content goes into the manifest hash.
    pub fn input_files(&self) -> Vec<PathBuf> {
        let set = match self {
            Command::Verify(a) => Some(&a.set),
            Command::Once(a) => Some(a),
            Command::FaceRank(a) => Some(&a.set),
            _ => None,
        };
        let mut files: Vec<PathBuf> = set.and_then(|s| s.file.clone()).into_iter().collect();
        if let Command::Search(a) = self {
            files.extend(a.checkpoint.iter().filter(|p| p.exists()).cloned());
        }
        files
    }
}

#[derive(Debug, Args, Serialize)]
pub struct OrderArgs {
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct AvoidersArgs {
    #[arg(long)]
    pub n: usize,
    /// Print only the number of avoiders.
    #[arg(long)]
    pub count_only: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct FlagArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub t: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct LshapeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub r: usize,
}

/// A cell set given either as a file (JSON or grid) or as flag parameters.
#[derive(Debug, Args, Serialize)]
pub struct SetArgs {
    /// JSON position set or '.'/'X' grid.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["m", "t"])]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, requires = "t")]
    pub m: Option<usize>,
    #[arg(long, requires = "m")]
    pub t: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: SetArgs,
    /// Also require every cell to be necessary.
    #[arg(long)]
    pub minimum: bool,
    /// Also require the smallest possible size, n cells.
    #[arg(long)]
    pub minimal: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct FaceRankArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: SetArgs,
    /// Every valid flag of order n.
    #[arg(long, conflicts_with_all = ["file", "m", "t"], requires = "n")]
    pub all_flags: bool,
    /// CSV rows with a fixed header.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CornerArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, requires = "t", conflicts_with = "all_flags")]
    pub m: Option<usize>,
    #[arg(long, requires = "m")]
    pub t: Option<usize>,
    /// Every valid flag of order n (the default when m and t are absent).
    #[arg(long)]
    pub all_flags: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct AuditArgs {
    /// A single order.
    #[arg(long, conflicts_with = "max_n")]
    pub n: Option<usize>,
    /// Every order from 1 up to this one.
    #[arg(long, default_value_t = 30)]
    pub max_n: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    /// Largest cardinality explored; defaults to the largest flag size.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Report every blocker rather than one per symmetry class.
    #[arg(long)]
    pub no_dedup: bool,
    /// Stop after this many search-tree nodes.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Permit order 7 (requires --budget).
    #[arg(long = "allow-order-7")]
    pub allow_order_seven: bool,
    /// Resume from and save progress to this file.
    #[arg(long, value_name = "PATH")]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConjectureArgs {
    #[arg(long)]
    pub n: usize,
    /// Stop after this many search-tree nodes.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Permit order 7 (requires --budget).
    #[arg(long = "allow-order-7")]
    pub allow_order_seven: bool,
}
