use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use pclab_core::ptable::{build_table, load_table, store_table, TableError};
use pclab_core::PartitionTable;

use crate::CliError;

/// Directory holding cached tables, one file per `ell`.
pub const TABLE_DIR_ENV: &str = "PCLAB_TABLE_DIR";

pub fn cached_table_path(dir: &Path, ell: u64) -> PathBuf {
    dir.join(format!("p_mod_{ell}.ptab"))
}

fn build(ell: u64, n_max: u64) -> Result<PartitionTable, CliError> {
    build_table(ell, n_max).map_err(|e| CliError::Input(format!("building table: {e}")))
}

fn read(path: &Path) -> Result<PartitionTable, TableError> {
    load_table(BufReader::new(File::open(path)?))
}

pub(crate) fn write(table: &PartitionTable, path: &Path) -> Result<(), CliError> {
    let tmp = path.with_extension("ptab.tmp");
    let mut out = BufWriter::new(File::create(&tmp)?);
    store_table(table, &mut out).map_err(|e| CliError::Input(e.to_string()))?;
    out.flush()?;
    drop(out);
    fs::rename(&tmp, path)?;
    Ok(())
}

/// A table for `ell` covering `n <= n_needed`: the `--table` file if given,
/// else the cache directory from the environment, else a fresh build.
pub(crate) fn obtain(
    ell: u64,
    n_needed: u64,
    explicit: Option<&Path>,
    stderr: &mut dyn Write,
) -> Result<PartitionTable, CliError> {
    if let Some(path) = explicit {
        let table = read(path).map_err(|e| CliError::Usage {
            flag: "--table",
            message: format!("{}: {e}", path.display()),
        })?;
        if table.ell() != ell {
            return Err(CliError::Usage {
                flag: "--table",
                message: format!("table is mod {}, --ell is {ell}", table.ell()),
            });
        }
        if table.n_max() < n_needed {
            return Err(CliError::Usage {
                flag: "--table",
                message: format!("table covers n <= {}, need n <= {n_needed}", table.n_max()),
            });
        }
        return Ok(table);
    }
    let Some(dir) = std::env::var_os(TABLE_DIR_ENV).filter(|d| !d.is_empty()) else {
        return build(ell, n_needed);
    };
    let dir = PathBuf::from(dir);
    let path = cached_table_path(&dir, ell);
    if path.exists() {
        match read(&path) {
            Ok(t) if t.ell() == ell && t.n_max() >= n_needed => return Ok(t),
            Ok(_) => {}
            Err(e) => {
                let _ = writeln!(
                    stderr,
                    "note: rebuilding cached table {}: {e}",
                    path.display()
                );
            }
        }
    }
    let table = build(ell, n_needed)?;
    fs::create_dir_all(&dir)?;
    write(&table, &path)?;
    Ok(table)
}
