//! Benchmark workload catalog: the matrix and tensor shapes used in the
//! evaluation, with their published densities for cross-checking.

use super::KernelKind;

/// Operand geometry of one catalog workload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogShape {
    Matrix { rows: usize, cols: usize },
    Tensor { dims: [usize; 3] },
}

impl CatalogShape {
    pub fn cells(&self) -> u64 {
        match *self {
            CatalogShape::Matrix { rows, cols } => rows as u64 * cols as u64,
            CatalogShape::Tensor { dims } => dims.iter().map(|&d| d as u64).product(),
        }
    }
}

/// One benchmark workload: shape, nonzero count, and the density percentage
/// as published, for consistency checks against `nnz / cells`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kernel: KernelKind,
    pub shape: CatalogShape,
    pub nnz: u64,
    pub published_density_percent: f64,
}

impl CatalogEntry {
    /// Actual density of the cataloged instance.
    pub fn density(&self) -> f64 {
        self.nnz as f64 / self.shape.cells() as f64
    }

    /// Relative deviation of the actual density from the published figure.
    pub fn density_error(&self) -> f64 {
        let published = self.published_density_percent / 100.0;
        ((self.density() - published) / published).abs()
    }
}

const fn matrix(
    name: &'static str,
    rows: usize,
    cols: usize,
    nnz: u64,
    published_density_percent: f64,
) -> CatalogEntry {
    CatalogEntry {
        name,
        kernel: KernelKind::MatMul,
        shape: CatalogShape::Matrix { rows, cols },
        nnz,
        published_density_percent,
    }
}

const fn tensor(
    name: &'static str,
    kernel: KernelKind,
    dims: [usize; 3],
    nnz: u64,
    published_density_percent: f64,
) -> CatalogEntry {
    CatalogEntry {
        name,
        kernel,
        shape: CatalogShape::Tensor { dims },
        nnz,
        published_density_percent,
    }
}

/// The thirteen benchmark workloads, densest first. Matrix shapes follow
/// the published rounded dimensions; the two tensor collections whose
/// rounded shapes drift past the published density (Crime, Uber) use their
/// upstream catalog dimensions instead.
pub const CATALOG: [CatalogEntry; 13] = [
    matrix("journal", 124, 124, 12_000, 78.5),
    matrix("bibd_17_8", 171, 92_000, 3_300_000, 20.9),
    matrix("dendrimer", 730, 730, 63_000, 11.8),
    matrix("speech1", 11_000, 3_600, 3_900_000, 10.0),
    matrix("speech2", 7_700, 2_600, 1_000_000, 5.0),
    matrix("nd3k", 9_000, 9_000, 3_300_000, 4.1),
    matrix("cavity14", 2_600, 2_600, 76_000, 1.1),
    matrix("model3", 1_600, 4_600, 24_000, 0.32),
    matrix("cat_ears_4_4", 5_200, 13_200, 40_000, 0.057),
    matrix("m3plates", 11_000, 11_000, 6_600, 0.0054),
    tensor("BrainQ", KernelKind::SpTtm, [60, 70_000, 9], 11_000_000, 29.1),
    tensor("Crime", KernelKind::Mttkrp, [6_186, 24, 2_464], 5_330_673, 1.5),
    tensor("Uber", KernelKind::SpTtm, [4_392, 1_140, 1_717], 3_309_490, 0.039),
];

/// Look up a catalog workload by name (case-insensitive).
pub fn catalog_entry(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG
        .iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
}
