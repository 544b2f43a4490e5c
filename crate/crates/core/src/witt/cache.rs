//! On-disk store for Witt structure tables. One JSON file per
//! (setup, n, op); every file is re-verified on load and rebuilt when it
//! fails to parse or to verify.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{install_table, WittOp, WittPolyTable};
use crate::algebra::{parse_poly, PiRing};
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "WITTJET_CACHE_DIR";

/// The serialized form of a table, shared by the store and the CLI.
#[derive(Debug, Serialize, Deserialize)]
pub struct TableDocument {
    pub schema_version: u32,
    pub setup: String,
    pub n: usize,
    pub op: WittOp,
    pub polys: Vec<String>,
}

impl TableDocument {
    pub fn new<R: PiRing>(setup_key: &str, table: &WittPolyTable<R>) -> Self {
        TableDocument {
            schema_version: SCHEMA_VERSION,
            setup: setup_key.to_string(),
            n: table.n,
            op: table.op,
            polys: table.polys.iter().map(|p| p.to_string()).collect(),
        }
    }
}

/// What happened when a table was requested through the store.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Built,
    Rebuilt,
}

fn file_name(setup_key: &str, n: usize, op: WittOp) -> String {
    let safe: String = setup_key
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    format!("{safe}_n{n}_{}.json", op.name())
}

pub fn table_path(dir: &Path, setup_key: &str, n: usize, op: WittOp) -> PathBuf {
    dir.join(file_name(setup_key, n, op))
}

fn try_load<R: PiRing>(path: &Path, ring: &R, setup_key: &str, n: usize, op: WittOp) -> Option<WittPolyTable<R>> {
    let text = fs::read_to_string(path).ok()?;
    let file: TableDocument = serde_json::from_str(&text).ok()?;
    if file.schema_version != SCHEMA_VERSION || file.setup != setup_key || file.n != n || file.op != op {
        return None;
    }
    let polys = file.polys.iter().map(|s| parse_poly(ring, s)).collect::<Result<Vec<_>>>().ok()?;
    let table = WittPolyTable { ring: ring.clone(), n, op, polys };
    table.verify().ok()?;
    Some(table)
}

/// Loads the table from `dir`, or builds and writes it.
pub fn load_or_build<R: PiRing>(
    dir: &Path,
    ring: &R,
    setup_key: &str,
    n: usize,
    op: WittOp,
) -> Result<(WittPolyTable<R>, CacheOutcome)> {
    let path = table_path(dir, setup_key, n, op);
    let existed = path.exists();
    if let Some(t) = try_load(&path, ring, setup_key, n, op) {
        install_table(t.clone());
        return Ok((t, CacheOutcome::Hit));
    }
    let table = WittPolyTable::build(ring, n, op)?;
    fs::create_dir_all(dir)?;
    let file = TableDocument::new(setup_key, &table);
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_string_pretty(&file)?)?;
    fs::rename(&tmp, &path)?;
    install_table(table.clone());
    let outcome = if existed { CacheOutcome::Rebuilt } else { CacheOutcome::Built };
    Ok((table, outcome))
}
