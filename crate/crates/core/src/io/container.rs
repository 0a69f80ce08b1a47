//! The `.sfrm` binary container: any supported matrix or rank-3 tensor
//! format serialized losslessly, including its encoding parameters.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "SFRM" | version u16 | rank u8 | format u8 | dtype_bits u8
//! run_bits u8 | block_rows u16 | block_cols u16 | mode_order [u8;3]
//! n_counts u8 | n_sections u8 | reserved u8
//! dims:   rank x u64
//! counts: n_counts x u64        (format-specific element counts)
//! section byte offsets: n_sections x u64, from the start of the payload
//! payload_len u64
//! payload: bit-packed sections, each starting on a byte boundary
//! crc32 of the payload, u32
//! ```
//!
//! Index and pointer sections are packed at the same widths the storage
//! model charges, so each section occupies its modeled bit count rounded up
//! to whole bytes. Values are stored as IEEE bits at `dtype_bits` (32 or
//! 64); writing refuses values that would not survive a 32-bit round trip.

use std::path::Path;

use crate::cost::{ceil_log2, index_bits, pointer_bits};
use crate::error::{Error, Result};
use crate::formats::{
    BsrMatrix, CooMatrix, CooTensor3, CscMatrix, CsfTensor3, CsrMatrix, DenseMatrix, DenseTensor3,
    FormatId, FormattedMatrix, FormattedTensor3, RlcMatrix, ZvcMatrix, ZvcTensor3,
};

use super::bits::{BitReader, BitWriter};
use super::write_atomic;

const MAGIC: [u8; 4] = *b"SFRM";
const VERSION: u16 = 1;
/// Bytes before the variable-length dims/counts/offsets arrays.
const PRELUDE_LEN: usize = 20;

/// A value loaded from or destined for a container, either rank.
#[derive(Debug, Clone, PartialEq)]
pub enum ContainerPayload {
    Matrix(FormattedMatrix),
    Tensor3(FormattedTensor3),
}

impl ContainerPayload {
    pub fn format(&self) -> FormatId {
        match self {
            ContainerPayload::Matrix(m) => m.format(),
            ContainerPayload::Tensor3(t) => t.format(),
        }
    }

    pub fn rank(&self) -> u8 {
        match self {
            ContainerPayload::Matrix(_) => 2,
            ContainerPayload::Tensor3(_) => 3,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            ContainerPayload::Matrix(m) => vec![m.rows(), m.cols()],
            ContainerPayload::Tensor3(t) => t.dims().to_vec(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            ContainerPayload::Matrix(m) => m.nnz(),
            ContainerPayload::Tensor3(t) => t.nnz(),
        }
    }

    pub fn density(&self) -> f64 {
        match self {
            ContainerPayload::Matrix(m) => m.density(),
            ContainerPayload::Tensor3(t) => t.density(),
        }
    }
}

fn format_code(f: FormatId) -> u8 {
    match f {
        FormatId::Dense => 0,
        FormatId::Coo => 1,
        FormatId::Csr => 2,
        FormatId::Csc => 3,
        FormatId::Bsr => 4,
        FormatId::Rlc => 5,
        FormatId::Zvc => 6,
        FormatId::Csf => 7,
    }
}

fn code_format(c: u8) -> Result<FormatId> {
    Ok(match c {
        0 => FormatId::Dense,
        1 => FormatId::Coo,
        2 => FormatId::Csr,
        3 => FormatId::Csc,
        4 => FormatId::Bsr,
        5 => FormatId::Rlc,
        6 => FormatId::Zvc,
        7 => FormatId::Csf,
        other => return Err(Error::Container(format!("unknown format code {other}"))),
    })
}

/// Everything the header records about a value's shape and parameters.
struct Header {
    rank: u8,
    format: FormatId,
    dtype_bits: u32,
    run_bits: u32,
    block: (usize, usize),
    mode_order: [usize; 3],
    dims: Vec<usize>,
    counts: Vec<usize>,
}

#[derive(Clone, Copy)]
struct Section {
    width: u32,
    count: usize,
}

impl Section {
    fn len_bytes(self) -> Result<usize> {
        self.count
            .checked_mul(self.width as usize)
            .map(|bits| bits.div_ceil(8))
            .ok_or_else(|| Error::Container("section size overflows".into()))
    }
}

fn checked_cells(dims: &[usize]) -> Result<usize> {
    dims.iter().try_fold(1usize, |acc, &d| {
        acc.checked_mul(d)
            .ok_or_else(|| Error::Container("dimension product overflows".into()))
    })
}

/// The packed sections implied by a header, in on-disk order.
fn sections(h: &Header) -> Result<Vec<Section>> {
    let b = h.dtype_bits;
    let need = |want: usize| -> Result<()> {
        if h.counts.len() != want {
            return Err(Error::Container(format!(
                "{} expects {want} count field(s), header has {}",
                h.format,
                h.counts.len()
            )));
        }
        Ok(())
    };
    let sec = |width: u32, count: usize| Section { width, count };
    if h.rank == 2 {
        let (m, k) = (h.dims[0], h.dims[1]);
        let cells = checked_cells(&h.dims)?;
        let (iw_m, iw_k) = (index_bits(m), index_bits(k));
        Ok(match h.format {
            FormatId::Dense => {
                need(0)?;
                vec![sec(b, cells)]
            }
            FormatId::Coo => {
                need(1)?;
                let n = h.counts[0];
                vec![sec(iw_m, n), sec(iw_k, n), sec(b, n)]
            }
            FormatId::Csr => {
                need(1)?;
                let n = h.counts[0];
                vec![sec(pointer_bits(n), m + 1), sec(iw_k, n), sec(b, n)]
            }
            FormatId::Csc => {
                need(1)?;
                let n = h.counts[0];
                vec![sec(pointer_bits(n), k + 1), sec(iw_m, n), sec(b, n)]
            }
            FormatId::Zvc => {
                need(1)?;
                vec![sec(1, cells), sec(b, h.counts[0])]
            }
            FormatId::Rlc => {
                need(1)?;
                let p = h.counts[0];
                if !(1..=32).contains(&h.run_bits) {
                    return Err(Error::Container(format!(
                        "rlc run width must be in 1..=32, header says {}",
                        h.run_bits
                    )));
                }
                vec![sec(h.run_bits, p), sec(b, p)]
            }
            FormatId::Bsr => {
                need(1)?;
                let nblk = h.counts[0];
                let (br, bc) = h.block;
                if br == 0 || bc == 0 {
                    return Err(Error::Container("bsr block dims must be positive".into()));
                }
                let grid_rows = m.div_ceil(br);
                let grid_cols = k.div_ceil(bc);
                let cells_per_block = br
                    .checked_mul(bc)
                    .and_then(|c| c.checked_mul(nblk))
                    .ok_or_else(|| Error::Container("bsr payload size overflows".into()))?;
                vec![
                    sec(pointer_bits(nblk), grid_rows + 1),
                    sec(index_bits(grid_cols), nblk),
                    sec(b, cells_per_block),
                ]
            }
            FormatId::Csf => return Err(Error::Container("csf is a tensor format".into())),
        })
    } else {
        let cells = checked_cells(&h.dims)?;
        let iw: Vec<u32> = h.dims.iter().map(|&d| index_bits(d)).collect();
        Ok(match h.format {
            FormatId::Dense => {
                need(0)?;
                vec![sec(b, cells)]
            }
            FormatId::Coo => {
                need(1)?;
                let n = h.counts[0];
                vec![sec(iw[0], n), sec(iw[1], n), sec(iw[2], n), sec(b, n)]
            }
            FormatId::Zvc => {
                need(1)?;
                vec![sec(1, cells), sec(b, h.counts[0])]
            }
            FormatId::Csf => {
                need(3)?;
                let [n0, n1, nnz] = [h.counts[0], h.counts[1], h.counts[2]];
                let o = h.mode_order;
                if {
                    let mut seen = [false; 3];
                    o.iter().any(|&m| m > 2 || std::mem::replace(&mut seen[m], true))
                } {
                    return Err(Error::Container("mode order is not a permutation".into()));
                }
                vec![
                    sec(index_bits(h.dims[o[0]]), n0),
                    sec(ceil_log2(n1 + 2), n0 + 1),
                    sec(index_bits(h.dims[o[1]]), n1),
                    sec(pointer_bits(nnz), n1 + 1),
                    sec(index_bits(h.dims[o[2]]), nnz),
                    sec(b, nnz),
                ]
            }
            other => return Err(Error::Container(format!("{other} is not a tensor format"))),
        })
    }
}

fn header_for(value: &ContainerPayload, dtype_bits: u32) -> Result<Header> {
    if !matches!(dtype_bits, 32 | 64) {
        return Err(Error::Container(format!(
            "containers store 32- or 64-bit values, not {dtype_bits}"
        )));
    }
    let violations = match value {
        ContainerPayload::Matrix(m) => m.validate(),
        ContainerPayload::Tensor3(t) => t.validate(),
    };
    if let Some(v) = violations.first() {
        return Err(Error::Container(format!(
            "refusing to write invalid {} value: {v}",
            value.format()
        )));
    }
    let mut h = Header {
        rank: value.rank(),
        format: value.format(),
        dtype_bits,
        run_bits: 0,
        block: (0, 0),
        mode_order: [0, 1, 2],
        dims: value.dims(),
        counts: Vec::new(),
    };
    match value {
        ContainerPayload::Matrix(m) => match m {
            FormattedMatrix::Dense(_) => {}
            FormattedMatrix::Coo(_) | FormattedMatrix::Csr(_) | FormattedMatrix::Csc(_) => {
                h.counts.push(m.nnz())
            }
            FormattedMatrix::Zvc(z) => h.counts.push(z.values.len()),
            FormattedMatrix::Rlc(r) => {
                h.run_bits = r.run_bits;
                h.counts.push(r.pairs.len());
            }
            FormattedMatrix::Bsr(x) => {
                if x.block_rows > u16::MAX as usize || x.block_cols > u16::MAX as usize {
                    return Err(Error::Container("bsr block dims exceed 65535".into()));
                }
                h.block = (x.block_rows, x.block_cols);
                h.counts.push(x.block_col_ids.len());
            }
        },
        ContainerPayload::Tensor3(t) => match t {
            FormattedTensor3::Dense(_) => {}
            FormattedTensor3::Coo(_) => h.counts.push(t.nnz()),
            FormattedTensor3::Zvc(z) => h.counts.push(z.values.len()),
            FormattedTensor3::Csf(c) => {
                h.mode_order = c.mode_order;
                h.counts = vec![c.idx0.len(), c.idx1.len(), c.values.len()];
            }
        },
    }
    Ok(h)
}

fn pack_value(w: &mut BitWriter, v: f64, dtype_bits: u32) -> Result<()> {
    if dtype_bits == 64 {
        w.push(v.to_bits(), 64);
    } else {
        let narrow = v as f32;
        if narrow as f64 != v {
            return Err(Error::Container(format!(
                "value {v} does not survive a 32-bit round trip; write with 64-bit values"
            )));
        }
        w.push(narrow.to_bits() as u64, 32);
    }
    Ok(())
}

fn pack_indices(ids: &[usize], width: u32) -> Vec<u8> {
    let mut w = BitWriter::new();
    for &i in ids {
        w.push(i as u64, width);
    }
    w.into_bytes()
}

fn pack_values(vals: &[f64], dtype_bits: u32) -> Result<Vec<u8>> {
    let mut w = BitWriter::new();
    for &v in vals {
        pack_value(&mut w, v, dtype_bits)?;
    }
    Ok(w.into_bytes())
}

fn pack_payload(value: &ContainerPayload, h: &Header, spec: &[Section]) -> Result<Vec<Vec<u8>>> {
    let b = h.dtype_bits;
    let out: Vec<Vec<u8>> = match value {
        ContainerPayload::Matrix(FormattedMatrix::Dense(d)) => vec![pack_values(&d.values, b)?],
        ContainerPayload::Matrix(FormattedMatrix::Coo(c)) => vec![
            pack_indices(&c.row_ids, spec[0].width),
            pack_indices(&c.col_ids, spec[1].width),
            pack_values(&c.values, b)?,
        ],
        ContainerPayload::Matrix(FormattedMatrix::Csr(c)) => vec![
            pack_indices(&c.row_ptr, spec[0].width),
            pack_indices(&c.col_ids, spec[1].width),
            pack_values(&c.values, b)?,
        ],
        ContainerPayload::Matrix(FormattedMatrix::Csc(c)) => vec![
            pack_indices(&c.col_ptr, spec[0].width),
            pack_indices(&c.row_ids, spec[1].width),
            pack_values(&c.values, b)?,
        ],
        ContainerPayload::Matrix(FormattedMatrix::Zvc(z)) => {
            let mask: Vec<usize> = z.mask.iter().map(|&m| m as usize).collect();
            vec![pack_indices(&mask, 1), pack_values(&z.values, b)?]
        }
        ContainerPayload::Matrix(FormattedMatrix::Rlc(r)) => {
            let runs: Vec<usize> = r.pairs.iter().map(|&(run, _)| run as usize).collect();
            let vals: Vec<f64> = r.pairs.iter().map(|&(_, v)| v).collect();
            vec![pack_indices(&runs, spec[0].width), pack_values(&vals, b)?]
        }
        ContainerPayload::Matrix(FormattedMatrix::Bsr(x)) => vec![
            pack_indices(&x.block_row_ptr, spec[0].width),
            pack_indices(&x.block_col_ids, spec[1].width),
            pack_values(&x.block_values, b)?,
        ],
        ContainerPayload::Tensor3(FormattedTensor3::Dense(d)) => vec![pack_values(&d.values, b)?],
        ContainerPayload::Tensor3(FormattedTensor3::Coo(c)) => vec![
            pack_indices(&c.coords[0], spec[0].width),
            pack_indices(&c.coords[1], spec[1].width),
            pack_indices(&c.coords[2], spec[2].width),
            pack_values(&c.values, b)?,
        ],
        ContainerPayload::Tensor3(FormattedTensor3::Zvc(z)) => {
            let mask: Vec<usize> = z.mask.iter().map(|&m| m as usize).collect();
            vec![pack_indices(&mask, 1), pack_values(&z.values, b)?]
        }
        ContainerPayload::Tensor3(FormattedTensor3::Csf(c)) => vec![
            pack_indices(&c.idx0, spec[0].width),
            pack_indices(&c.ptr0, spec[1].width),
            pack_indices(&c.idx1, spec[2].width),
            pack_indices(&c.ptr1, spec[3].width),
            pack_indices(&c.idx2, spec[4].width),
            pack_values(&c.values, b)?,
        ],
    };
    debug_assert_eq!(out.len(), spec.len());
    for (bytes, s) in out.iter().zip(spec) {
        debug_assert_eq!(bytes.len(), s.len_bytes().unwrap());
    }
    Ok(out)
}

/// Serialize a value to container bytes at the given value width.
pub fn container_bytes(value: &ContainerPayload, dtype_bits: u32) -> Result<Vec<u8>> {
    let h = header_for(value, dtype_bits)?;
    let spec = sections(&h)?;
    let section_bytes = pack_payload(value, &h, &spec)?;

    let mut out = Vec::new();
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(h.rank);
    out.push(format_code(h.format));
    out.push(h.dtype_bits as u8);
    out.push(h.run_bits as u8);
    out.extend_from_slice(&(h.block.0 as u16).to_le_bytes());
    out.extend_from_slice(&(h.block.1 as u16).to_le_bytes());
    out.extend_from_slice(&[
        h.mode_order[0] as u8,
        h.mode_order[1] as u8,
        h.mode_order[2] as u8,
    ]);
    out.push(h.counts.len() as u8);
    out.push(spec.len() as u8);
    out.push(0);
    debug_assert_eq!(out.len(), PRELUDE_LEN);
    for &d in &h.dims {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for &c in &h.counts {
        out.extend_from_slice(&(c as u64).to_le_bytes());
    }
    let mut offset = 0u64;
    for bytes in &section_bytes {
        out.extend_from_slice(&offset.to_le_bytes());
        offset += bytes.len() as u64;
    }
    out.extend_from_slice(&offset.to_le_bytes());
    let payload_start = out.len();
    for bytes in &section_bytes {
        out.extend_from_slice(bytes);
    }
    let crc = crc32fast::hash(&out[payload_start..]);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Container("file is truncated".into()));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize> {
        self.u64()?
            .try_into()
            .map_err(|_| Error::Container("count does not fit this platform".into()))
    }
}

fn unpack_indices(bytes: &[u8], s: Section) -> Result<Vec<usize>> {
    let mut r = BitReader::new(bytes);
    let mut out = Vec::with_capacity(s.count);
    for _ in 0..s.count {
        out.push(r.read(s.width)? as usize);
    }
    Ok(out)
}

fn unpack_values(bytes: &[u8], s: Section, dtype_bits: u32) -> Result<Vec<f64>> {
    let mut r = BitReader::new(bytes);
    let mut out = Vec::with_capacity(s.count);
    for _ in 0..s.count {
        let raw = r.read(s.width)?;
        out.push(if dtype_bits == 64 {
            f64::from_bits(raw)
        } else {
            f32::from_bits(raw as u32) as f64
        });
    }
    Ok(out)
}

/// Deserialize container bytes back into a formatted value.
pub fn parse_container(bytes: &[u8]) -> Result<ContainerPayload> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(Error::Container("bad magic, not an sfrm container".into()));
    }
    let version = c.u16()?;
    if version != VERSION {
        return Err(Error::Container(format!(
            "unsupported container version {version}, this build reads {VERSION}"
        )));
    }
    let rank = c.u8()?;
    if !matches!(rank, 2 | 3) {
        return Err(Error::Container(format!("rank must be 2 or 3, found {rank}")));
    }
    let format = code_format(c.u8()?)?;
    let dtype_bits = c.u8()? as u32;
    if !matches!(dtype_bits, 32 | 64) {
        return Err(Error::Container(format!(
            "value width must be 32 or 64 bits, found {dtype_bits}"
        )));
    }
    let run_bits = c.u8()? as u32;
    let block = (c.u16()? as usize, c.u16()? as usize);
    let mo = c.take(3)?;
    let mode_order = [mo[0] as usize, mo[1] as usize, mo[2] as usize];
    let n_counts = c.u8()? as usize;
    let n_sections = c.u8()? as usize;
    let _reserved = c.u8()?;

    let mut dims = Vec::with_capacity(rank as usize);
    for _ in 0..rank {
        dims.push(c.usize()?);
    }
    let mut counts = Vec::with_capacity(n_counts);
    for _ in 0..n_counts {
        counts.push(c.usize()?);
    }
    let mut offsets = Vec::with_capacity(n_sections);
    for _ in 0..n_sections {
        offsets.push(c.usize()?);
    }
    let payload_len = c.usize()?;

    let h = Header {
        rank,
        format,
        dtype_bits,
        run_bits,
        block,
        mode_order,
        dims,
        counts,
    };
    let spec = sections(&h)?;
    if spec.len() != n_sections {
        return Err(Error::Container(format!(
            "{} stores {} sections, header lists {n_sections}",
            h.format,
            spec.len()
        )));
    }
    let mut expected_offset = 0usize;
    for (i, s) in spec.iter().enumerate() {
        if offsets[i] != expected_offset {
            return Err(Error::Container(format!(
                "section {i} offset {} does not match its computed position {expected_offset}",
                offsets[i]
            )));
        }
        expected_offset = expected_offset
            .checked_add(s.len_bytes()?)
            .ok_or_else(|| Error::Container("payload size overflows".into()))?;
    }
    if payload_len != expected_offset {
        return Err(Error::Container(format!(
            "payload length {payload_len} does not match the header's section sizes ({expected_offset})"
        )));
    }
    let payload = c.take(payload_len)?;
    let crc = c.u32()?;
    if c.pos != bytes.len() {
        return Err(Error::Container("trailing bytes after checksum".into()));
    }
    if crc32fast::hash(payload) != crc {
        return Err(Error::Container("payload checksum mismatch".into()));
    }

    let mut sects: Vec<&[u8]> = Vec::with_capacity(spec.len());
    let mut start = 0usize;
    for s in &spec {
        let len = s.len_bytes()?;
        sects.push(&payload[start..start + len]);
        start += len;
    }
    let idx = |i: usize| unpack_indices(sects[i], spec[i]);
    let vals = |i: usize| unpack_values(sects[i], spec[i], dtype_bits);

    let value = if rank == 2 {
        let (rows, cols) = (h.dims[0], h.dims[1]);
        ContainerPayload::Matrix(match format {
            FormatId::Dense => FormattedMatrix::Dense(DenseMatrix {
                rows,
                cols,
                values: vals(0)?,
            }),
            FormatId::Coo => FormattedMatrix::Coo(CooMatrix {
                rows,
                cols,
                row_ids: idx(0)?,
                col_ids: idx(1)?,
                values: vals(2)?,
            }),
            FormatId::Csr => FormattedMatrix::Csr(CsrMatrix {
                rows,
                cols,
                row_ptr: idx(0)?,
                col_ids: idx(1)?,
                values: vals(2)?,
            }),
            FormatId::Csc => FormattedMatrix::Csc(CscMatrix {
                rows,
                cols,
                col_ptr: idx(0)?,
                row_ids: idx(1)?,
                values: vals(2)?,
            }),
            FormatId::Zvc => FormattedMatrix::Zvc(ZvcMatrix {
                rows,
                cols,
                mask: idx(0)?.into_iter().map(|b| b != 0).collect(),
                values: vals(1)?,
            }),
            FormatId::Rlc => {
                let runs = idx(0)?;
                let values = vals(1)?;
                FormattedMatrix::Rlc(RlcMatrix {
                    rows,
                    cols,
                    run_bits,
                    pairs: runs.into_iter().map(|r| r as u64).zip(values).collect(),
                })
            }
            FormatId::Bsr => FormattedMatrix::Bsr(BsrMatrix {
                rows,
                cols,
                block_rows: block.0,
                block_cols: block.1,
                block_row_ptr: idx(0)?,
                block_col_ids: idx(1)?,
                block_values: vals(2)?,
            }),
            FormatId::Csf => unreachable!("rejected by sections()"),
        })
    } else {
        let dims = [h.dims[0], h.dims[1], h.dims[2]];
        ContainerPayload::Tensor3(match format {
            FormatId::Dense => FormattedTensor3::Dense(DenseTensor3 {
                dims,
                values: vals(0)?,
            }),
            FormatId::Coo => FormattedTensor3::Coo(CooTensor3 {
                dims,
                coords: [idx(0)?, idx(1)?, idx(2)?],
                values: vals(3)?,
            }),
            FormatId::Zvc => FormattedTensor3::Zvc(ZvcTensor3 {
                dims,
                mask: idx(0)?.into_iter().map(|b| b != 0).collect(),
                values: vals(1)?,
            }),
            FormatId::Csf => FormattedTensor3::Csf(CsfTensor3 {
                dims,
                mode_order,
                idx0: idx(0)?,
                ptr0: idx(1)?,
                idx1: idx(2)?,
                ptr1: idx(3)?,
                idx2: idx(4)?,
                values: vals(5)?,
            }),
            other => unreachable!("{other} rejected by sections()"),
        })
    };

    let violations = match &value {
        ContainerPayload::Matrix(m) => m.validate(),
        ContainerPayload::Tensor3(t) => t.validate(),
    };
    if let Some(v) = violations.first() {
        return Err(Error::Container(format!(
            "decoded {} value violates invariants: {v}",
            value.format()
        )));
    }
    Ok(value)
}

/// Write a container atomically: the path either keeps its old content or
/// holds the complete new file, never a partial one.
pub fn write_container(path: &Path, value: &ContainerPayload, dtype_bits: u32) -> Result<()> {
    write_atomic(path, &container_bytes(value, dtype_bits)?)
}

pub fn read_container(path: &Path) -> Result<ContainerPayload> {
    parse_container(&std::fs::read(path)?)
}
