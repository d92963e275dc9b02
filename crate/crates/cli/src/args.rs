use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "kolmo",
    version,
    about = "Kernel decompositions, frame dilations and wavelet dilations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Positive-definite kernels and their intertwiners.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// GNS representation of a state on a matrix algebra.
    Gns(GnsArgs),
    /// Unitary representations of finite groups.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Gabor unitary pairs `UV = λVU`.
    #[command(subcommand)]
    Gabor(GaborCmd),
    /// Finite frames and normalized tight frame dilations.
    #[command(subcommand)]
    Frames(FramesCmd),
    /// Filters, transfer operators, cycles and cascades.
    #[command(subcommand)]
    Filter(FilterCmd),
    /// The cycle dilation of a wavelet frame.
    #[command(subcommand)]
    Dilate(DilateCmd),
}

#[derive(Debug, Args)]
pub struct Input {
    /// Input JSON file.
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Tol {
    /// Tolerance override.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub grid_start: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Number of grid points, a power of two.
    #[arg(long)]
    pub grid_count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Terms {
    /// Factors in the infinite product.
    #[arg(long)]
    pub terms: Option<u32>,
}

#[derive(Debug, Args)]
pub struct Pmax {
    /// Longest cycle searched for.
    #[arg(long)]
    pub pmax: Option<u32>,
}

#[derive(Debug, Args)]
pub struct Window {
    #[arg(long)]
    pub window_m: Option<i64>,
    #[arg(long)]
    pub window_n: Option<i64>,
}

#[derive(Debug, Subcommand)]
pub enum KernelCmd {
    /// Minimal-rank Kolmogorov decomposition, as a vector family.
    Decompose {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
    /// Hermitian, positivity and round-trip checks.
    Check {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
    /// Least `c` with `K' ≤ cK`, for `K'` in `--in`.
    Dominate {
        #[command(flatten)]
        input: Input,
        /// The dominating kernel `K`.
        #[arg(long, value_name = "FILE")]
        reference: PathBuf,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
    /// Operator induced by the bi-kernel in `--in`.
    Intertwine {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "FILE")]
        left: PathBuf,
        #[arg(long, value_name = "FILE")]
        right: PathBuf,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
}

#[derive(Debug, Args)]
pub struct GnsArgs {
    /// `{"rho": matrix}`.
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub tol: Tol,
}

#[derive(Debug, Subcommand)]
pub enum GroupCmd {
    /// Representation with cyclic vector from a positive-type kernel.
    Rep {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "FILE")]
        kernel: PathBuf,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
    /// Dilation of the orbit frame into the left regular representation.
    Dilate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "FILE")]
        kernel: PathBuf,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
}

#[derive(Debug, Subcommand)]
pub enum GaborCmd {
    /// Gabor pair from a covariant kernel on `Z_q × Z_q`.
    Build {
        #[command(flatten)]
        input: Input,
        /// `re,im`.
        #[arg(long, allow_negative_numbers = true)]
        lambda: String,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
    /// Kernel of the orbit over `0 ≤ m < window-m`, `0 ≤ n < window-n`.
    Kernel {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        window: Window,
        #[command(flatten)]
        output: Output,
    },
    /// Dilation of the orbit frame into the regular pair.
    Dilate {
        #[command(flatten)]
        input: Input,
        /// Torus size; the order of λ when omitted.
        #[arg(long)]
        q: Option<usize>,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
}

#[derive(Debug, Subcommand)]
pub enum FramesCmd {
    /// Optimal frame bounds of a vector family.
    Bounds {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Whether a kernel is a normalized tight frame kernel.
    Ntf {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
    /// Dilation of the NTF kernel in `--in` into the one in `--into`.
    Dilate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "FILE")]
        into: PathBuf,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
}

#[derive(Debug, Subcommand)]
pub enum FilterCmd {
    Qmf {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
    Cycles {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pmax: Pmax,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
    /// Matrix of the transfer operator on its invariant window.
    Transfer {
        #[command(flatten)]
        input: Input,
        /// Second filter `m0'`; `m0` itself when omitted.
        #[arg(long, value_name = "FILE")]
        other: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Basis of the fixed points of the transfer operator.
    Fixedpoints {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "FILE")]
        other: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
    /// Completes a two-band low-pass filter to a filter bank.
    Complete {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tol,
    },
    /// Scaling function as CSV.
    Cascade {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        terms: Terms,
        #[command(flatten)]
        grid: GridArgs,
        /// Sample the spectrum instead of the time-domain function.
        #[arg(long)]
        frequency: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Wavelet as CSV, from a bank or a two-band low-pass filter.
    Wavelet {
        #[command(flatten)]
        input: Input,
        /// Which high-pass filter, from 1.
        #[arg(long, default_value_t = 1)]
        index: usize,
        #[command(flatten)]
        terms: Terms,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        frequency: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
pub enum DilateCmd {
    /// Dilated scaling vector as CSV, with a JSON summary on stdout.
    Build {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pmax: Pmax,
        #[command(flatten)]
        terms: Terms,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        tol: Tol,
        /// CSV destination for `φ₀`.
        #[command(flatten)]
        output: Output,
    },
    /// Defect report for the dilated wavelet system.
    Check {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pmax: Pmax,
        #[command(flatten)]
        terms: Terms,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        window: Window,
        #[command(flatten)]
        output: Output,
    },
    /// Writes phi.csv, psi.csv and report.json for the stretched Haar filter.
    DemoStretchedHaar {
        /// Output directory.
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        pmax: Pmax,
        #[command(flatten)]
        terms: Terms,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        window: Window,
    },
}
