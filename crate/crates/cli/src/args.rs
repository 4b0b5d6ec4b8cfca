use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "bjorling", version, about = "Minimal surfaces from analytic strips, with symmetry checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Grid node counts, e.g. 101x101.
    #[arg(long, value_name = "NUxNV")]
    pub grid: Option<String>,
    /// Parameter rectangle, e.g. -pi:pi,-1:1.
    #[arg(long, value_name = "uMIN:uMAX,vMIN:vMAX", allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// Check tolerance (scale-normalised).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub quad_tol: Option<f64>,
    /// Tolerance of fitted relations (self-adjointness, domain rotations, congruence).
    #[arg(long)]
    pub registration_tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Mesh output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report path; printed to stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_name = "obj|ply")]
    pub format: Option<String>,
    /// Checks deciding the exit status (comma separated or repeated; `all` for every measurement).
    #[arg(long, value_delimiter = ',')]
    pub check: Vec<String>,
    /// Worker threads (default: rayon's choice).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Record wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Spec file.
    #[arg(conflicts_with = "catalog")]
    pub spec: Option<PathBuf>,
    /// Built-in strip instead of a spec file.
    #[arg(long)]
    pub catalog: Option<String>,
    /// Catalog parameter, e.g. --param k=2.
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the surface and write a mesh.
    Transform(InputArgs),
    /// Minimality and boundary residuals.
    Verify(InputArgs),
    /// Extract the perpendicular geodesic and test the self-CPG relation.
    Cpg {
        #[command(flatten)]
        input: InputArgs,
        /// Samples along the imaginary axis.
        #[arg(long, default_value_t = 41)]
        samples: usize,
    },
    /// Adjoint surface mesh and its checks.
    Adjoint(InputArgs),
    /// Reflections, dihedral identities, self-adjointness and the dihedral search.
    Symmetry {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 12)]
        max_order: u32,
    },
    /// Congruence of two surfaces sampled on grids of equal size.
    Relate {
        /// Two inputs: spec paths or catalog:NAME[:k=v,...].
        #[arg(num_args = 2, required = true)]
        inputs: Vec<String>,
        #[arg(long)]
        allow_scale: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Minimise the self-CPG residual over a curve family.
    Search {
        /// Spec file with a [search] section; the a t² + b t⁴, c t + d t³ family otherwise.
        spec: Option<PathBuf>,
        #[arg(long)]
        budget: Option<usize>,
        /// Starting coefficients, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        start: Option<Vec<f64>>,
        #[arg(long)]
        restarts: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// List the built-in strips, or print one as a spec file.
    Catalog {
        name: Option<String>,
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Transform(_) => "transform",
            Command::Verify(_) => "verify",
            Command::Cpg { .. } => "cpg",
            Command::Adjoint(_) => "adjoint",
            Command::Symmetry { .. } => "symmetry",
            Command::Relate { .. } => "relate",
            Command::Search { .. } => "search",
            Command::Catalog { .. } => "catalog",
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Transform(i) | Command::Verify(i) | Command::Adjoint(i) => &i.common,
            Command::Cpg { input, .. } | Command::Symmetry { input, .. } => &input.common,
            Command::Relate { common, .. } | Command::Search { common, .. } | Command::Catalog { common, .. } => common,
        }
    }
}
