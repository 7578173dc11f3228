use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use pclab_core::congruence::{
    check_progression, square_class_set, verify_propagation, CongruenceStatus,
};
use pclab_core::density::{decade_grid, survivor_density, DensityCurve};
use pclab_core::exclusion::{exclude_range, recheck_witness, ExclusionScan};
use pclab_core::ptable::build_table;
use pclab_core::qseries::{build_f_series, match_dicks, select_t_sequence, squarefree_support};
use pclab_core::PartitionTable;

use crate::config::{CommandKind, RunConfig};
use crate::{tables, CliError};

/// Coefficient bound used to scan and to pick t's for `density`.
pub const DENSITY_BOUND: u64 = 1_000_000;

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

/// Writes through `f` to `path`, or to `stdout` when there is no path.
fn emit<F>(path: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    match path {
        Some(p) => {
            let mut out = BufWriter::new(File::create(p)?);
            f(&mut out)?;
            out.flush()?;
        }
        None => f(stdout)?,
    }
    Ok(())
}

fn series_table(
    cfg: &RunConfig,
    bound: u64,
    stderr: &mut dyn Write,
) -> Result<PartitionTable, CliError> {
    tables::obtain(
        cfg.ell.unwrap(),
        (bound + 1) / 24,
        cfg.table_path.as_deref(),
        stderr,
    )
}

fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage {
                    flag: "--threads",
                    message: e.to_string(),
                })?;
            Ok(pool.install(f))
        }
    }
}

fn audit(scan: &ExclusionScan, table: &PartitionTable) -> Result<(), CliError> {
    for row in scan.rows.iter().filter(|r| r.is_excluded()) {
        if !recheck_witness(row, table).map_err(|e| CliError::Internal(e.to_string()))? {
            return Err(CliError::Internal(format!(
                "witness failed recheck: {}",
                row.csv_row()
            )));
        }
    }
    Ok(())
}

pub(crate) fn dispatch<O: Write, E: Write>(
    cfg: &RunConfig,
    stdout: &mut O,
    stderr: &mut E,
) -> Result<(), CliError> {
    let stdout: &mut dyn Write = stdout;
    let stderr: &mut dyn Write = stderr;
    match cfg.command {
        CommandKind::PtableBuild => {
            let (ell, n_max) = (cfg.ell.unwrap(), cfg.n_max.unwrap());
            let table = build_table(ell, n_max).map_err(|e| CliError::Usage {
                flag: "--max",
                message: e.to_string(),
            })?;
            let out = cfg.output_path.as_deref().unwrap();
            tables::write(&table, out)?;
            writeln!(
                stderr,
                "wrote p(n) mod {ell} for n <= {n_max} to {}",
                out.display()
            )?;
        }
        CommandKind::SeriesBuild => {
            let n_max = cfg.n_max.unwrap();
            let table = series_table(cfg, n_max, stderr)?;
            let f = build_f_series(&table, cfg.delta.unwrap(), n_max).map_err(input)?;
            if let Some(path) = cfg.output_path.as_deref() {
                let out = BufWriter::new(File::create(path)?);
                f.dump(out).map_err(input)?;
            }
            writeln!(
                stdout,
                "ell={} delta={} n_max={} lambda={} r={} nonzero={} first_nonzero={}",
                f.ell(),
                cfg.delta.unwrap(),
                f.n_max(),
                f.weight_lambda().unwrap(),
                f.multiplier_r().unwrap(),
                f.count_nonzero(),
                f.first_nonzero()
                    .map_or("none".to_string(), |n| n.to_string()),
            )?;
        }
        CommandKind::VerifyRamanujan => {
            let ell = cfg.ell.unwrap();
            let limit = cfg.coeff_bound.unwrap();
            let beta = match ell {
                5 => 4,
                7 => 5,
                _ => 6,
            };
            let table = tables::obtain(ell, ell * limit + beta, None, stderr)?;
            let status = check_progression(&table, ell, beta, limit).map_err(input)?;
            writeln!(stdout, "{}", CongruenceStatus::CSV_HEADER)?;
            writeln!(stdout, "{}", status.csv_row())?;
            if !status.holds() {
                return Err(CliError::Internal(format!(
                    "p({ell}n+{beta}) is nonzero mod {ell}: {}",
                    status.csv_row()
                )));
            }
        }
        CommandKind::VerifyPropagation => {
            let (ell, m) = (cfg.ell.unwrap(), cfg.modulus.unwrap());
            let limit = cfg.coeff_bound.unwrap();
            let needed = m
                .checked_mul(limit)
                .and_then(|v| v.checked_add(m - 1))
                .ok_or_else(|| CliError::Usage {
                    flag: "--limit",
                    message: "m * limit overflows".into(),
                })?;
            let table = tables::obtain(ell, needed, None, stderr)?;
            let report = verify_propagation(&table, m, cfg.beta.unwrap(), limit).map_err(input)?;
            writeln!(stdout, "{}", CongruenceStatus::CSV_HEADER)?;
            for s in std::iter::once(&report.base).chain(&report.members) {
                writeln!(stdout, "{}", s.csv_row())?;
            }
            if !report.consistent() {
                return Err(CliError::Internal(format!(
                    "beta = {} holds but its square class does not",
                    report.base.beta
                )));
            }
        }
        CommandKind::Classes => {
            let set = square_class_set(cfg.modulus.unwrap(), cfg.beta.unwrap()).map_err(input)?;
            writeln!(stdout, "{set}")?;
        }
        CommandKind::Exclude => {
            let bound = cfg.coeff_bound.unwrap();
            let (qmin, qmax) = cfg.q_range.unwrap();
            let table = series_table(cfg, bound, stderr)?;
            let scan = with_threads(cfg.thread_count, || {
                exclude_range(&table, cfg.delta.unwrap(), qmin, qmax, bound)
            })?
            .map_err(input)?;
            audit(&scan, &table)?;
            emit(cfg.output_path.as_deref(), stdout, |w| scan.write_csv(w))?;
            let excluded = scan.rows.iter().filter(|r| r.is_excluded()).count();
            writeln!(
                stderr,
                "{} rows, {excluded} excluded, {} not excluded",
                scan.rows.len(),
                scan.rows.len() - excluded
            )?;
        }
        CommandKind::Density => {
            let delta = cfg.delta.unwrap();
            let epsilon = cfg.epsilon.unwrap();
            let (_, xmax) = cfg.q_range.unwrap();
            let table = series_table(cfg, DENSITY_BOUND, stderr)?;
            let f = build_f_series(&table, delta, DENSITY_BOUND).map_err(input)?;
            let support = squarefree_support(&f, DENSITY_BOUND).map_err(input)?;
            let scan = exclude_range(&table, delta, 5, xmax, DENSITY_BOUND).map_err(input)?;
            audit(&scan, &table)?;
            let forbidden: BTreeSet<u64> = scan.survivors(epsilon).map(|r| r.q).collect();
            let ts = select_t_sequence(&support, cfg.k.unwrap(), &forbidden).map_err(|e| {
                CliError::Usage {
                    flag: "--k",
                    message: e.to_string(),
                }
            })?;
            let curve: DensityCurve =
                survivor_density(&scan, &decade_grid(xmax), &ts, epsilon).map_err(input)?;
            if !curve.bound_holds() {
                return Err(CliError::Internal("S_k(X) < 2^k * survivors(X)".into()));
            }
            emit(cfg.output_path.as_deref(), stdout, |w| curve.write_csv(w))?;
            let ts: Vec<String> = ts.entries().iter().map(u64::to_string).collect();
            writeln!(stderr, "t = {}", ts.join(","))?;
        }
        CommandKind::ThetaMatch => {
            let bound = cfg.coeff_bound.unwrap();
            let table = series_table(cfg, bound, stderr)?;
            let f = build_f_series(&table, cfg.delta.unwrap(), bound).map_err(input)?;
            let verdict = match_dicks(&f, bound).map_err(input)?;
            writeln!(stdout, "{verdict}")?;
        }
    }
    Ok(())
}
