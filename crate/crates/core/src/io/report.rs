use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::connections::SweepRow;
use crate::error::{QsError, QsResult};

pub const SWEEP_HEADER: [&str; 7] = ["re_rho", "im_rho", "re_h1", "im_h1", "re_h2", "im_h2", "resonance_flag"];

/// Pretty JSON with a trailing newline; non-finite numbers become `null`.
pub fn to_json<T: Serialize>(value: &T) -> QsResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| QsError::IoError(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Sweep rows as CSV, one row per sample in window order.
pub fn sweep_csv(rows: &[SweepRow]) -> QsResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| QsError::IoError(e.to_string());
    w.write_record(SWEEP_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.rho.re.to_string(),
            r.rho.im.to_string(),
            r.h1.re.to_string(),
            r.h1.im.to_string(),
            r.h2.re.to_string(),
            r.h2.im.to_string(),
            u8::from(r.resonant).to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| QsError::IoError(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| QsError::IoError(e.to_string()))
}

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> QsResult<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents).map_err(|e| QsError::IoError(format!("{}: {e}", path.display())))
}
