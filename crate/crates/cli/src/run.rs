//! Subcommand dispatch.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use randseries::bits::{self, BitSource, SeededBits};
use randseries::brownian::{self, FourierWienerSeries};
use randseries::fourier::{BlockIndex, DyadicInterval};
use randseries::gaussian::NormalSequence;
use randseries::verify::{self, SupnormTarget, Trials};
use randseries::{CoefficientSequence, Exec, RademacherSeries, TrialReport, TrigSeriesConfig};

use crate::config::{Command, ExperimentConfig, Suite};
use crate::output::{self, real, PlotData, Table};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "RANDSERIES_OUT_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// False when a verify check failed.
    pub passed: bool,
    pub files: Vec<PathBuf>,
    /// Text for stdout when no output path was resolved.
    pub stdout: Option<String>,
    pub reports: Vec<TrialReport>,
}

fn exec(cfg: &ExperimentConfig) -> Exec {
    if cfg.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

/// Where the main output goes: `out`, else `$RANDSERIES_OUT_DIR/<command>.<ext>`,
/// else stdout.
pub fn resolve_out(cfg: &ExperimentConfig) -> Option<PathBuf> {
    let ext = if cfg.command == Command::Verify { "json" } else { "csv" };
    cfg.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|d| Path::new(&d).join(format!("{}.{ext}", cfg.command)))
    })
}

/// Bits needed for `count` normals at `precision`: the largest paired index plus one.
fn normal_bits(count: u64, precision: u32) -> Result<u64> {
    Ok(bits::pairing(count.saturating_sub(1), precision as u64 - 1)? + 1)
}

fn source(cfg: &ExperimentConfig, bits_needed: u64) -> Result<Arc<dyn BitSource>> {
    Ok(match &cfg.bits_file {
        Some(p) => Arc::new(bits::bits_from_file(p, bits_needed as usize, cfg.bits_mode)?),
        None => Arc::new(SeededBits::new(cfg.seed.unwrap_or(0))),
    })
}

fn header(cfg: &ExperimentConfig, t: &mut Table) {
    t.meta(format!("randseries {}", cfg.command));
    for (k, v) in cfg.entries() {
        if k != "out" && k != "plot" {
            t.meta(format!("{k}={v}"));
        }
    }
}

fn brownian_path(cfg: &ExperimentConfig, grid: &[f64]) -> Result<randseries::PathSample> {
    let needed = normal_bits(2 * cfg.terms + 2, cfg.precision)?;
    let fw = FourierWienerSeries::from_source(source(cfg, needed)?, cfg.terms, cfg.precision)?;
    Ok(fw.fw_path_with(grid, exec(cfg))?)
}

fn data_table(cfg: &ExperimentConfig) -> Result<(Table, Option<randseries::PathSample>)> {
    let mut path = None;
    let table = match cfg.command {
        Command::Rademacher => {
            let u = cfg.family.build()?;
            let s = RademacherSeries::new(u, source(cfg, cfg.terms + 1)?);
            let mut t = Table::new(&["n", "partial_sum"]);
            header(cfg, &mut t);
            for (i, v) in s.partial_sums(cfg.terms)?.into_iter().enumerate() {
                t.row(vec![(i + 1).to_string(), real(v)]);
            }
            t
        }
        Command::Fourier => {
            let trig = TrigSeriesConfig::new(cfg.family.build()?, cfg.phases.build()?, source(cfg, cfg.terms + 1)?);
            let grid = brownian::uniform_grid(cfg.grid);
            let rows = exec(cfg).try_map(grid.len(), |i| -> Result<Vec<String>> {
                let x = grid[i];
                Ok(vec![
                    real(x),
                    real(trig.series_partial_sum(x, cfg.terms)?),
                    real(trig.fejer_sum(x, cfg.terms)?),
                ])
            })?;
            let mut t = Table::new(&["t", "partial_sum", "fejer_sum"]);
            header(cfg, &mut t);
            t.rows = rows;
            t
        }
        Command::Brownian => {
            let p = brownian_path(cfg, &brownian::uniform_grid(cfg.grid))?;
            let mut t = Table::new(&["t", "W"]);
            header(cfg, &mut t);
            if let Some(b) = p.tail_bound_reported {
                t.meta(format!("tail_bound={}", real(b)));
            }
            for (&x, &w) in p.grid.iter().zip(&p.values) {
                t.row(vec![real(x), real(w)]);
            }
            path = Some(p);
            t
        }
        Command::Normals => {
            let ns = NormalSequence::new(source(cfg, normal_bits(cfg.terms, cfg.precision)?)?, cfg.terms as usize, cfg.precision)?;
            let mut t = Table::new(&["k", "value"]);
            header(cfg, &mut t);
            for (k, v) in ns.values().iter().enumerate() {
                t.row(vec![k.to_string(), real(*v)]);
            }
            t
        }
        Command::Encode => {
            let p = brownian_path(cfg, &brownian::uniform_grid(brownian::default_oscillation_grid(cfg.n) + 1))?;
            let code = brownian::encode_cn(&p, cfg.n)?;
            let nodes = code.node_values();
            let mut t = Table::new(&["i", "sign", "value"]);
            header(cfg, &mut t);
            t.meta(format!(
                "oscillation_distance={}",
                real(brownian::oscillation_distance(&p, cfg.n, brownian::default_oscillation_grid(cfg.n))?)
            ));
            for (i, v) in nodes.iter().enumerate() {
                let sign = if i == 0 { String::new() } else { code.signs[i - 1].to_string() };
                t.row(vec![i.to_string(), sign, real(*v)]);
            }
            path = Some(brownian::decode_cn(&code)?);
            t
        }
        Command::Oscillation => {
            let top = cfg.ns.iter().copied().max().unwrap_or(1);
            let p = brownian_path(cfg, &brownian::uniform_grid(brownian::default_oscillation_grid(top) + 1))?;
            let mut t = Table::new(&["n", "distance"]);
            header(cfg, &mut t);
            for &n in &cfg.ns {
                let d = brownian::oscillation_distance(&p, n, brownian::default_oscillation_grid(n))?;
                t.row(vec![n.to_string(), real(d)]);
            }
            path = Some(p);
            t
        }
        Command::Verify => unreachable!("verify has its own output"),
    };
    Ok((table, path))
}

/// Runs the verify suite with the parameters used by the acceptance run,
/// scaled by `cfg.trials`.
pub fn suite_reports(cfg: &ExperimentConfig) -> Result<Vec<TrialReport>> {
    let trials = Trials::new(cfg.trials).seed_base(cfg.seed_base).exec(exec(cfg));
    let want = |s: Suite| cfg.suite == Suite::All || cfg.suite == s;
    let mut out = Vec::new();
    if want(Suite::Kolmogorov) {
        out.push(verify::kolmogorov_inequality_test(&CoefficientSequence::power(1.0), 3.0, 1000, &trials)?);
    }
    if want(Suite::PaleyZygmund) {
        let ones = CoefficientSequence::constant(1.0);
        out.push(verify::paley_zygmund_test(&ones, 0.5, 100, &trials)?);
        out.push(verify::paley_zygmund_test(&ones, 0.5, 10, &trials)?);
    }
    if want(Suite::Supnorm) {
        let trig = SupnormTarget::Trig {
            amps: CoefficientSequence::power(1.0),
            phases: CoefficientSequence::zero(),
        };
        out.push(verify::supnorm_deviation_test(&trig, BlockIndex::new(1), 4096, &trials)?);
        let fw = SupnormTarget::FourierWiener { precision: cfg.precision };
        out.push(verify::supnorm_deviation_test(&fw, BlockIndex::new(2), 4096, &trials)?);
    }
    if want(Suite::Brownian) {
        out.push(verify::brownian_moment_test(&[0.5, 1.0], cfg.terms, cfg.precision, &trials)?);
        out.push(verify::variance_identity_check(0.5, 4096));
    }
    if want(Suite::Divergence) {
        out.push(verify::divergence_test(&CoefficientSequence::harmonic_root(), 0.5, 3, &trials)?);
        out.push(verify::divergence_control(&CoefficientSequence::power(2.0), 0.5, 3, 1_000_000));
    }
    if want(Suite::Fejer) {
        let ns = [16, 64, 256, 1024, 4096];
        let iv = DyadicInterval::new(3, 2)?;
        let zero = CoefficientSequence::zero();
        out.push(verify::fejer_growth_test(&CoefficientSequence::harmonic_root(), &zero, &ns, 4, iv, &trials)?);
        out.push(verify::fejer_control_test(&CoefficientSequence::power(1.0), &zero, &ns, 4, iv, &trials)?);
    }
    Ok(out)
}

fn write_all(files: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    let mut done: Vec<&Path> = Vec::new();
    for (p, bytes) in files {
        if let Err(e) = output::write_atomic(p, bytes) {
            for d in done {
                let _ = std::fs::remove_file(d);
            }
            return Err(e);
        }
        done.push(p);
    }
    Ok(())
}

/// Runs one experiment. Nothing is written unless every computation succeeds.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let out = resolve_out(cfg);
    let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    let mut stdout = None;
    let mut reports = Vec::new();
    let mut passed = true;

    if cfg.command == Command::Verify {
        reports = suite_reports(cfg)?;
        passed = reports.iter().all(TrialReport::passed);
        let json = serde_json::to_string_pretty(&reports)? + "\n";
        match out {
            Some(p) => files.push((p, json.into_bytes())),
            None => stdout = Some(json),
        }
        if let Some(p) = &cfg.plot {
            files.push((p.clone(), output::plotdata_table(PlotData::Reports(&reports)).render().into_bytes()));
        }
    } else {
        let (table, path) = data_table(cfg).with_context(|| format!("running {}", cfg.command))?;
        match out {
            Some(p) => files.push((p, table.render().into_bytes())),
            None => stdout = Some(table.render()),
        }
        if let Some(p) = &cfg.plot {
            let sample = path.context("config.plot: this subcommand has no path to plot")?;
            files.push((p.clone(), output::plotdata_table(PlotData::Path(&sample)).render().into_bytes()));
        }
    }
    write_all(&files)?;
    Ok(Outcome {
        passed,
        files: files.into_iter().map(|(p, _)| p).collect(),
        stdout,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_bit_budget_covers_last_index() {
        assert_eq!(normal_bits(1, 1).unwrap(), 1);
        // β_1 at p = 2 reads bits φ(1,0) = 1 and φ(1,1) = 4.
        assert_eq!(normal_bits(2, 2).unwrap(), 5);
    }

    #[test]
    fn plot_on_normals_is_rejected_without_writing() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::new(Command::Normals);
        cfg.terms = 4;
        cfg.out = Some(dir.path().join("n.csv"));
        cfg.plot = Some(dir.path().join("p.csv"));
        assert!(run(&cfg).is_err());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
