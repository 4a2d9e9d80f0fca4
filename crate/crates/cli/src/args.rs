use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cubetight", version, about = "Cube complexes, walls, hyperbolicity diagnostics and tight spans")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Input file (JSON, or CSV for metrics); stdin when omitted or `-`.
    #[arg(short, long, global = true)]
    pub input: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Convergence tolerance for tight-span retraction.
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub tol: f64,

    /// Seed for randomized commands.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricArg {
    L1,
    Linf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaMetric {
    L1,
    Linf,
    Dl,
    Curtain,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Wall systems.
    #[command(subcommand)]
    Walls(WallsCmd),
    /// Hyperplane calculus on a cube complex.
    #[command(subcommand)]
    Cube(CubeCmd),
    /// Sageev's dual complex and its inverse.
    #[command(subcommand)]
    Sageev(SageevCmd),
    /// Median graph recognition.
    #[command(subcommand)]
    Median(MedianCmd),
    /// Hyperbolicity diagnostics.
    #[command(subcommand)]
    Hyp(HypCmd),
    /// Injective hulls of finite metric spaces.
    #[command(subcommand)]
    Tightspan(TightspanCmd),
}

#[derive(Subcommand, Debug)]
pub enum WallsCmd {
    /// Report every violated wall invariant.
    Validate,
    /// A random wall system.
    Random {
        #[arg(long, default_value_t = 6)]
        points: usize,
        #[arg(long, default_value_t = 5)]
        walls: usize,
    },
    /// Longest chain of walls separating two points.
    Chain {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum CubeCmd {
    Dist {
        #[arg(long, value_enum, default_value_t = MetricArg::L1)]
        metric: MetricArg,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    Median {
        #[arg(long = "vertices", num_args = 1.., required = true)]
        vertices: Vec<String>,
    },
    Interval {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    Hull {
        #[arg(long, num_args = 1.., required = true)]
        vertices: Vec<String>,
    },
    /// Nearest vertex of a convex set.
    Gate {
        #[arg(long)]
        from: String,
        #[arg(long, num_args = 1.., required = true)]
        target: Vec<String>,
    },
    Geodesic {
        #[arg(long, num_args = 1.., required = true)]
        path: Vec<String>,
    },
    Dimension,
    /// Common point of a family of balls, given as `vertex:radius`.
    Helly {
        #[arg(long, value_enum, default_value_t = MetricArg::L1)]
        metric: MetricArg,
        #[arg(long = "ball", required = true)]
        balls: Vec<String>,
    },
    /// The complex itself (JSON, or DOT with `--format dot`).
    Dot,
}

#[derive(Subcommand, Debug)]
pub enum SageevCmd {
    /// Dual cube complex of a wall system.
    Dual,
    /// Hyperplane walls of a complex.
    Walls,
    /// Wall system → dual → walls, with explicit isomorphisms.
    Roundtrip,
}

#[derive(Subcommand, Debug)]
pub enum MedianCmd {
    Check,
    /// Cube complex structure of a median graph.
    Cubify,
}

#[derive(Subcommand, Debug)]
pub enum HypCmd {
    /// Bottleneck widths of disjoint wall pairs, or one L-separation test.
    Lsep {
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long = "L")]
        l: Option<usize>,
    },
    /// Thickest grid of walls.
    Grids,
    /// `dist_L` for every vertex pair.
    Dl {
        #[arg(long = "L")]
        l: usize,
    },
    /// Curtain-model distance `Σ_L dist_L / L^p` for every vertex pair.
    CurtainModel {
        #[arg(long, default_value_t = 4)]
        exponent: u32,
    },
    /// Four-point δ of a distance on the vertices.
    Delta {
        #[arg(long, value_enum, default_value_t = DeltaMetric::L1)]
        metric: DeltaMetric,
        #[arg(long = "L", default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 4)]
        exponent: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum TightspanCmd {
    /// Zero-cells of the tight span and the coarse gap.
    Cells,
    /// Push a metric form onto the tight span.
    Retract {
        /// Comma-separated values, or a point name for its distance form.
        #[arg(long)]
        form: String,
    },
    /// Common point of balls `point:radius`.
    Helly {
        #[arg(long = "ball", required = true)]
        balls: Vec<String>,
    },
    Tripod {
        #[arg(long, num_args = 1.., required = true)]
        points: Vec<String>,
    },
    Center {
        #[arg(long, num_args = 1.., required = true)]
        points: Vec<String>,
    },
    /// Point at parameter `t` on the combing path from `f` to `g`.
    Comb {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        t: String,
    },
}
