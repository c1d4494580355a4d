//! SHA-256 fingerprints of the problem data, echoed in every report.

use sha2::{Digest, Sha256};

use relfix_core::leslie_gower::LgModel;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the dims (u64 little-endian), then every exposure, then every
/// loss (f64 little-endian, row-major).
pub fn rating_digest(dims: &[usize], exposures: &[f64], losses: &[f64]) -> String {
    let mut h = Sha256::new();
    h.update((dims.len() as u64).to_le_bytes());
    for &d in dims {
        h.update((d as u64).to_le_bytes());
    }
    for v in exposures.iter().chain(losses) {
        h.update(v.to_le_bytes());
    }
    hex(&h.finalize())
}

/// Hash of the species count, `b`, then `C` row-major.
pub fn lg_digest(model: &LgModel) -> String {
    let mut h = Sha256::new();
    h.update((model.species() as u64).to_le_bytes());
    for v in model.b().iter().chain(model.c().data()) {
        h.update(v.to_le_bytes());
    }
    hex(&h.finalize())
}
