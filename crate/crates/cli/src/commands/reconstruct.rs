use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use mapi::pca::{self, pgm, samples, CovarianceDivisor, OcclusionConfig};
use mapi::MavpOperator;
use serde::Serialize;

use crate::manifest::RunManifest;

pub struct Args {
    pub images: Option<PathBuf>,
    pub builtin: bool,
    pub op: String,
    pub n_corrupt: usize,
    pub tile: usize,
    pub n_tiles: usize,
    pub seed: u64,
    pub iters: usize,
    pub divisor: String,
}

#[derive(Serialize)]
struct TargetRow {
    target_index: usize,
    psnr_occluded_db: Option<f64>,
    psnr_reconstructed_db: Option<f64>,
}

#[derive(Serialize)]
struct ImageReport {
    name: String,
    width: usize,
    height: usize,
    psnr_occluded_mean_db: f64,
    psnr_reconstructed_mean_db: f64,
    psnr_mean_image_db: Option<f64>,
    targets: Vec<TargetRow>,
}

#[derive(Serialize)]
struct ReconstructReport {
    manifest: RunManifest,
    operator: MavpOperator,
    images: Vec<ImageReport>,
    average_psnr_occluded_db: f64,
    average_psnr_reconstructed_db: f64,
}

fn load_images(args: &Args, manifest: &mut RunManifest) -> Result<Vec<(String, pca::ImageGrid)>> {
    if args.builtin {
        return Ok(samples::bundled_images()
            .into_iter()
            .map(|(n, i)| (n.to_string(), i))
            .collect());
    }
    let dir = args.images.as_ref().expect("clap enforces images|builtin");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading image directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "pgm").unwrap_or(false))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .pgm files in {}", dir.display());
    }
    let mut images = Vec::new();
    for p in paths {
        manifest.add_input(&p)?;
        let img = pgm::read_pgm(&p).with_context(|| format!("parsing {}", p.display()))?;
        let name = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "image".into());
        images.push((name, img));
    }
    Ok(images)
}

pub fn run(out: &Path, threads: usize, args: Args) -> Result<ExitCode> {
    let operator: MavpOperator = args.op.parse()?;
    let divisor = match args.divisor.as_str() {
        "n" => CovarianceDivisor::Samples,
        "n-1" => CovarianceDivisor::SamplesMinusOne,
        other => bail!("invalid divisor {other:?} (expected \"n\" or \"n-1\")"),
    };
    let mut manifest = RunManifest::new(
        "reconstruct",
        args.seed,
        threads,
        serde_json::json!({
            "op": operator,
            "n_corrupt": args.n_corrupt,
            "tile": args.tile,
            "n_tiles": args.n_tiles,
            "seed": args.seed,
            "iters": args.iters,
            "divisor": divisor,
            "builtin": args.builtin,
        }),
    )?;
    let images = load_images(&args, &mut manifest)?;
    super::ensure_dir(out)?;

    let mut reports = Vec::new();
    let mut occ_all = Vec::new();
    let mut rec_all = Vec::new();
    for (name, img) in &images {
        let m = img.width() * img.height();
        if m > 8192 {
            eprintln!(
                "warning: {name} has {m} pixels; the covariance matrix is {m}x{m} and \
                 extraction cost grows with its square"
            );
        }
        let cfg = OcclusionConfig {
            operator,
            n_copies: args.n_corrupt,
            tile: args.tile,
            n_tiles: args.n_tiles,
            iterations: args.iters,
            seed: args.seed,
            divisor,
        };
        let report = pca::occlusion_experiment(img, &cfg)?;

        let img_dir = out.join(name);
        super::ensure_dir(&img_dir)?;
        for o in &report.outcomes {
            pgm::write_pgm(
                &img_dir.join(format!("reconstructed_{:02}.pgm", o.target_index)),
                &o.image,
            )?;
        }
        for (trace, file) in [
            (&report.traces.first, "trace_w1.csv"),
            (&report.traces.second, "trace_w2.csv"),
        ] {
            let mut w = BufWriter::new(File::create(img_dir.join(file))?);
            trace.write_csv(&mut w)?;
        }

        occ_all.push(report.psnr_occluded_mean_db);
        rec_all.push(report.psnr_reconstructed_mean_db);
        println!(
            "{name}: occluded {:.2} dB -> reconstructed {:.2} dB (mean-image baseline {})",
            report.psnr_occluded_mean_db,
            report.psnr_reconstructed_mean_db,
            report
                .psnr_mean_image_db
                .map(|v| format!("{v:.2} dB"))
                .unwrap_or_else(|| "inf".into()),
        );
        reports.push(ImageReport {
            name: name.clone(),
            width: img.width(),
            height: img.height(),
            psnr_occluded_mean_db: report.psnr_occluded_mean_db,
            psnr_reconstructed_mean_db: report.psnr_reconstructed_mean_db,
            psnr_mean_image_db: report.psnr_mean_image_db,
            targets: report
                .outcomes
                .iter()
                .map(|o| TargetRow {
                    target_index: o.target_index,
                    psnr_occluded_db: o.psnr_occluded_db,
                    psnr_reconstructed_db: o.psnr_reconstructed_db,
                })
                .collect(),
        });
    }

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let avg_occ = mean(&occ_all);
    let avg_rec = mean(&rec_all);
    println!("average: occluded {avg_occ:.2} dB -> reconstructed {avg_rec:.2} dB");
    super::write_json(
        &out.join("reconstruct_report.json"),
        &ReconstructReport {
            manifest,
            operator,
            images: reports,
            average_psnr_occluded_db: avg_occ,
            average_psnr_reconstructed_db: avg_rec,
        },
    )?;
    Ok(ExitCode::SUCCESS)
}
