//! Experiment runner for the mapi library.
//!
//! One subcommand per experiment track plus kernel self-checks. Every run
//! writes CSV traces and a JSON report with an embedded manifest into the
//! output directory; re-running a manifest reproduces the outputs byte
//! for byte in single-threaded mode.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "mapi", version, about = "Multiplication-avoiding power iteration experiments")]
struct Cli {
    /// Output directory (default: $MAPI_OUT_DIR, then ./out)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; any value produces identical results
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the kernel property suites and print a pass/fail table
    KernelCheck {
        /// Emit machine-readable JSON instead of the table
        #[arg(long)]
        json: bool,
    },
    /// Verify the diamond-operator closed-form fixed point on a random
    /// positive matrix
    Prop1 {
        /// Matrix size
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Occlude grayscale images and reconstruct them from their corrupted
    /// copies
    Reconstruct {
        /// Directory of PGM images (P2 or P5)
        #[arg(long, required_unless_present = "builtin")]
        images: Option<PathBuf>,
        /// Use the three bundled benchmark images instead
        #[arg(long)]
        builtin: bool,
        /// Product operator: min1, min2, diamond, or dot
        #[arg(long, default_value = "min2")]
        op: String,
        /// Number of corrupted copies per image
        #[arg(long = "n-corrupt", default_value_t = 10)]
        n_corrupt: usize,
        /// Tile edge length in pixels
        #[arg(long, default_value_t = 16)]
        tile: usize,
        /// Tiles replaced with noise per copy
        #[arg(long = "n-tiles", default_value_t = 3)]
        n_tiles: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Power-iteration budget per component
        #[arg(long, default_value_t = 30)]
        iters: usize,
        /// Covariance divisor: "n" or "n-1"
        #[arg(long, default_value = "n-1")]
        divisor: String,
    },
    /// Mini-batch power iteration with momentum on a synthetic eigen-gap
    /// dataset
    Stochastic {
        /// Sample count
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        /// Dimension
        #[arg(long, default_value_t = 10)]
        d: usize,
        /// Eigen-gap of the Gram matrix
        #[arg(long, default_value_t = 0.1)]
        gap: f64,
        /// Mini-batch size
        #[arg(long, default_value_t = 128)]
        batch: usize,
        /// Momentum coefficient
        #[arg(long, default_value_t = 0.225)]
        beta: f64,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        /// Variant: min1 or dot
        #[arg(long, default_value = "min1")]
        op: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run min1 up to this iteration, then switch to the regular
        /// variant for the remainder
        #[arg(long = "switch-at")]
        switch_at: Option<usize>,
    },
    /// PageRank on a SNAP edge-list graph
    Pagerank {
        #[arg(long)]
        graph: PathBuf,
        /// Damping factor
        #[arg(long, default_value_t = 0.85)]
        alpha: f64,
        #[arg(long, default_value_t = 10)]
        iters: usize,
        /// rpi, mapi-min1, or mapi-min2
        #[arg(long, default_value = "mapi-min1")]
        method: String,
        /// Ranks reported in the JSON output
        #[arg(long, default_value_t = 10)]
        topk: usize,
        /// Run both rpi and mapi-min1 and report their rank overlap
        #[arg(long)]
        compare: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative jitter on the uniform start vector
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
    },
    /// Print dataset download instructions; verify a downloaded file
    Datasets {
        /// Edge-list file to verify
        #[arg(long)]
        verify: Option<PathBuf>,
    },
}

fn out_dir(cli_out: &Option<PathBuf>) -> PathBuf {
    cli_out
        .clone()
        .or_else(|| std::env::var_os("MAPI_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        eprintln!("error: could not configure {} threads: {e}", cli.threads);
        return ExitCode::from(1);
    }
    let out = out_dir(&cli.out);
    let threads = cli.threads;
    let result = match cli.command {
        Command::KernelCheck { json } => commands::kernel_check::run(json),
        Command::Prop1 { n, seed } => commands::prop1::run(&out, threads, n, seed),
        Command::Reconstruct {
            images,
            builtin,
            op,
            n_corrupt,
            tile,
            n_tiles,
            seed,
            iters,
            divisor,
        } => commands::reconstruct::run(
            &out,
            threads,
            commands::reconstruct::Args {
                images,
                builtin,
                op,
                n_corrupt,
                tile,
                n_tiles,
                seed,
                iters,
                divisor,
            },
        ),
        Command::Stochastic {
            n,
            d,
            gap,
            batch,
            beta,
            iters,
            op,
            seed,
            switch_at,
        } => commands::stochastic::run(
            &out,
            threads,
            commands::stochastic::Args {
                n,
                d,
                gap,
                batch,
                beta,
                iters,
                op,
                seed,
                switch_at,
            },
        ),
        Command::Pagerank {
            graph,
            alpha,
            iters,
            method,
            topk,
            compare,
            seed,
            jitter,
        } => commands::pagerank::run(
            &out,
            threads,
            commands::pagerank::Args {
                graph,
                alpha,
                iters,
                method,
                topk,
                compare,
                seed,
                jitter,
            },
        ),
        Command::Datasets { verify } => commands::datasets::run(verify.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
