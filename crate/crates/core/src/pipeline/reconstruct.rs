use std::path::Path;

use crate::error::Result;
use crate::pipeline::config::RunConfig;
use crate::pipeline::manifest::RunManifest;
use crate::timedomain::{read_quadratures_file, QuadratureRecord};
use crate::tomography::{bootstrap_uncertainty, mle_reconstruct, ReconstructionReport, ReconstructionResult};

/// Maximum-likelihood estimate plus the bootstrap spread configured in
/// `cfg.analysis` (skipped when fewer than two resamples are requested).
pub fn reconstruct_records(
    records: &[QuadratureRecord],
    cfg: &RunConfig,
) -> Result<(ReconstructionResult, ReconstructionReport)> {
    let result = mle_reconstruct(records, &cfg.tomography)?;
    let boot = if cfg.analysis.bootstrap_resamples >= 2 {
        Some(bootstrap_uncertainty(
            records,
            &cfg.tomography,
            cfg.analysis.bootstrap_resamples,
            cfg.seed,
            Some(&result.rho),
        )?)
    } else {
        None
    };
    let report = ReconstructionReport::new(&result, boot.as_ref());
    Ok((result, report))
}

/// Reads a quadrature CSV and writes `<stem>_rho.json` and
/// `<stem>_report.json` to `out_dir`.
pub fn cmd_reconstruct(
    data_csv: &Path,
    cfg: &RunConfig,
    out_dir: &Path,
) -> Result<(ReconstructionReport, RunManifest)> {
    cfg.validate()?;
    let records = read_quadratures_file(data_csv)?;
    let (result, report) = reconstruct_records(&records, cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let stem = data_csv.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
    let mut manifest = RunManifest::new("reconstruct", None, cfg);
    manifest.emit(out_dir, &format!("{stem}_rho.json"), result.rho.to_json()?.as_bytes())?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    manifest.emit(out_dir, &format!("{stem}_report.json"), text.as_bytes())?;
    manifest.record("records", records.len())?;
    manifest.record("source", data_csv.display().to_string())?;
    let manifest = manifest.finish_as(out_dir, &format!("{stem}_manifest.json"))?;
    Ok((report, manifest))
}
