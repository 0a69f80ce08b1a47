//! File ingestion and serialization: Matrix Market and FROSTT text readers,
//! the `.sfrm` binary container, and `key = value` hardware config files.

mod bits;
pub mod container;
pub mod hwconfig;
pub mod mtx;
pub mod tns;

pub use container::{
    container_bytes, parse_container, read_container, write_container, ContainerPayload,
};
pub use hwconfig::{parse_hw_config, read_hw_config};
pub use mtx::{parse_mtx, read_mtx};
pub use tns::{parse_tns, read_tns};

use std::path::Path;

use crate::error::{Error, Result};

/// Write `bytes` to `path` through a sibling temp file and a rename, so an
/// interrupted write never leaves a partial file at the destination.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Container(format!("`{}` has no file name", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, bytes)?;
    if let Err(e) = std::fs::rename(&tmp, path) {
        let _ = std::fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}
