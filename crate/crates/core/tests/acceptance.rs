//! End-to-end acceptance gates. Each test exercises one gate at its stated
//! tolerance and prints a single verdict line; run with
//! `cargo test --test acceptance -- --nocapture` to see every line.

use sfrm::cost::{rank_mcf, storage_bits, HardwareConfig, MatrixStats};
use sfrm::formats::{
    from_dense_matrix, from_dense_tensor3, CooMatrix, CooTensor3, DenseMatrix, EncodeParams,
    FormatId, FormattedMatrix, FormattedTensor3,
};
use sfrm::kernels::{gemm_dense, matmul_acf, mttkrp, mttkrp_dense_oracle, spttm, spttm_dense_oracle};
use sfrm::mint::{convert, convert_tensor, plan_matrix_conversion};
use sfrm::perf::{matrix_stream_descriptor, max_elems_per_cycle, pack_stream, SparsityProfile};
use sfrm::sage::{
    baseline_compare, catalog_entry, recommend, CatalogShape, McfConstraint, WorkloadSpec, CATALOG,
};
use sfrm::synth::{gen_matrix, gen_tensor3};

type Check = Result<(), String>;

fn verdict(n: usize, label: &str, outcome: Check) {
    match outcome {
        Ok(()) => println!("ACCEPTANCE {n} ({label}): PASS"),
        Err(msg) => {
            println!("ACCEPTANCE {n} ({label}): FAIL - {msg}");
            panic!("acceptance gate {n} ({label}) failed: {msg}");
        }
    }
}

macro_rules! check {
    ($cond:expr, $($arg:tt)+) => {
        if !($cond) {
            return Err(format!($($arg)+));
        }
    };
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// splitmix64; deterministic shape choices independent of the value RNG.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn pick(h: u64, lo: usize, hi: usize) -> usize {
    lo + (mix(h) % (hi - lo + 1) as u64) as usize
}

const DENSITIES: [f64; 6] = [0.0, 1e-4, 1e-2, 0.1, 0.5, 1.0];

/// Shared corpus descriptors: format x density x 20 seeds, with shapes up
/// to 512x512 (128x128 once dense work dominates) and up to 32^3.
fn matrix_cases() -> Vec<(FormatId, f64, u64, usize, usize)> {
    let mut out = Vec::new();
    for &fmt in &FormatId::MATRIX {
        for (di, &d) in DENSITIES.iter().enumerate() {
            for seed in 0..20u64 {
                let h = mix(fmt as u64 * 131 + di as u64 * 977 + seed * 6151);
                let hi = if d >= 0.5 { 128 } else { 512 };
                out.push((fmt, d, seed, pick(h, 1, hi), pick(h ^ 0xA5, 1, hi)));
            }
        }
    }
    out
}

fn tensor_cases() -> Vec<(FormatId, f64, u64, [usize; 3])> {
    let mut out = Vec::new();
    for &fmt in &FormatId::TENSOR3 {
        for (di, &d) in DENSITIES.iter().enumerate() {
            for seed in 0..20u64 {
                let h = mix(0x7E45 ^ (fmt as u64 * 151 + di as u64 * 419 + seed * 7919));
                let dims = [pick(h, 1, 32), pick(h ^ 1, 1, 32), pick(h ^ 2, 1, 32)];
                out.push((fmt, d, seed, dims));
            }
        }
    }
    out
}

fn random_dense(rows: usize, cols: usize, density: f64, seed: u64) -> DenseMatrix {
    FormattedMatrix::Coo(gen_matrix(rows, cols, density, seed).unwrap()).to_dense()
}

#[test]
fn criterion_01_format_round_trip() {
    verdict(1, "format round-trip", (|| -> Check {
        let params = EncodeParams::default();
        for (fmt, d, seed, rows, cols) in matrix_cases() {
            let dense = random_dense(rows, cols, d, seed.wrapping_mul(0x51ed) ^ fmt as u64);
            let enc = from_dense_matrix(&dense, fmt, &params).map_err(err)?;
            check!(
                enc.to_dense() == dense,
                "{fmt} {rows}x{cols} density {d} seed {seed} did not round-trip"
            );
        }
        for (fmt, d, seed, dims) in tensor_cases() {
            let coo = gen_tensor3(dims, d, seed.wrapping_mul(0x2ab7) ^ fmt as u64).map_err(err)?;
            let dense = FormattedTensor3::Coo(coo).to_dense();
            let enc = from_dense_tensor3(&dense, fmt, &params).map_err(err)?;
            check!(
                enc.to_dense() == dense,
                "{fmt} {dims:?} density {d} seed {seed} did not round-trip"
            );
        }
        Ok(())
    })());
}

fn canonical_matrix() -> DenseMatrix {
    DenseMatrix::from_rows(&[
        &[5.0, 0.0, 0.0, 7.0][..],
        &[0.0, 0.0, 0.0, 0.0][..],
        &[0.0, 3.0, 0.0, 0.0][..],
        &[0.0, 0.0, 1.0, 0.0][..],
    ])
}

fn micro_examples() -> Check {
    let hw = HardwareConfig::default();
    let params = EncodeParams::default();
    let dense = canonical_matrix();
    let csr = from_dense_matrix(&dense, FormatId::Csr, &params).map_err(err)?;
    let rlc = from_dense_matrix(&dense, FormatId::Rlc, &params).map_err(err)?;

    let (got, _) = convert(&csr, FormatId::Csc, &hw, &params).map_err(err)?;
    match got {
        FormattedMatrix::Csc(c) => {
            check!(c.col_ptr == vec![0, 1, 2, 3, 4], "transpose col_ptr {:?}", c.col_ptr);
            check!(c.row_ids == vec![0, 2, 3, 0], "transpose row_ids {:?}", c.row_ids);
            check!(c.values == vec![5.0, 3.0, 1.0, 7.0], "transpose values {:?}", c.values);
        }
        other => check!(false, "expected CSC output, got {}", other.format()),
    }

    let (got, _) = convert(&rlc, FormatId::Coo, &hw, &params).map_err(err)?;
    match got {
        FormattedMatrix::Coo(c) => {
            check!(c.row_ids == vec![0, 0, 2, 3], "run expansion rows {:?}", c.row_ids);
            check!(c.col_ids == vec![0, 3, 1, 2], "run expansion cols {:?}", c.col_ids);
            check!(c.values == vec![5.0, 7.0, 3.0, 1.0], "run expansion values {:?}", c.values);
        }
        other => check!(false, "expected COO output, got {}", other.format()),
    }

    let block_params = EncodeParams {
        block: (2, 2),
        ..params
    };
    let (got, _) = convert(&csr, FormatId::Bsr, &hw, &block_params).map_err(err)?;
    match got {
        FormattedMatrix::Bsr(b) => {
            check!(b.block_row_ptr == vec![0, 2, 4], "blocking row ptr {:?}", b.block_row_ptr);
            check!(b.block_col_ids == vec![0, 1, 0, 1], "blocking col ids {:?}", b.block_col_ids);
            let want = [
                5.0, 0.0, 0.0, 0.0, 0.0, 7.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0,
            ];
            check!(b.block_values == want, "blocking payload {:?}", b.block_values);
        }
        other => check!(false, "expected BSR output, got {}", other.format()),
    }

    let coo3 = CooTensor3 {
        dims: [2, 2, 2],
        coords: [vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1]],
        values: vec![2.0, 3.0, 4.0],
    };
    let dense3 = FormattedTensor3::Coo(coo3).to_dense();
    let (got, _) = convert_tensor(
        &FormattedTensor3::Dense(dense3),
        FormatId::Csf,
        &hw,
        &params,
    )
    .map_err(err)?;
    match got {
        FormattedTensor3::Csf(c) => {
            check!(c.idx0 == vec![0, 1], "tree idx0 {:?}", c.idx0);
            check!(c.ptr0 == vec![0, 2, 3], "tree ptr0 {:?}", c.ptr0);
            check!(c.idx1 == vec![0, 1, 0], "tree idx1 {:?}", c.idx1);
            check!(c.ptr1 == vec![0, 1, 2, 3], "tree ptr1 {:?}", c.ptr1);
            check!(c.idx2 == vec![0, 1, 1], "tree idx2 {:?}", c.idx2);
            check!(c.values == vec![2.0, 3.0, 4.0], "tree values {:?}", c.values);
        }
        other => check!(false, "expected CSF output, got {}", other.format()),
    }
    Ok(())
}

#[test]
fn criterion_02_conversion_equivalence() {
    verdict(2, "conversion equivalence", (|| -> Check {
        let hw = HardwareConfig::default();
        let params = EncodeParams::default();
        for (fmt, d, seed, rows, cols) in matrix_cases() {
            let dense = random_dense(rows, cols, d, seed.wrapping_mul(0x51ed) ^ fmt as u64);
            let enc = from_dense_matrix(&dense, fmt, &params).map_err(err)?;
            for &dst in &FormatId::MATRIX {
                let (converted, _) = convert(&enc, dst, &hw, &params).map_err(err)?;
                check!(
                    converted.to_dense() == dense,
                    "{fmt}->{dst} on {rows}x{cols} density {d} seed {seed} changed contents"
                );
            }
        }
        for (fmt, d, seed, dims) in tensor_cases() {
            let coo = gen_tensor3(dims, d, seed.wrapping_mul(0x2ab7) ^ fmt as u64).map_err(err)?;
            let dense = FormattedTensor3::Coo(coo).to_dense();
            let enc = from_dense_tensor3(&dense, fmt, &params).map_err(err)?;
            for &dst in &FormatId::TENSOR3 {
                let (converted, _) = convert_tensor(&enc, dst, &hw, &params).map_err(err)?;
                check!(
                    converted.to_dense() == dense,
                    "{fmt}->{dst} on {dims:?} density {d} seed {seed} changed contents"
                );
            }
        }
        micro_examples()
    })());
}

fn all_close(x: &[f64], y: &[f64]) -> bool {
    x.len() == y.len()
        && x.iter()
            .zip(y)
            .all(|(a, b)| (a - b).abs() <= 1e-9 * b.abs().max(1e-12))
}

#[test]
fn criterion_03_kernel_oracles() {
    verdict(3, "kernel oracles", (|| -> Check {
        let params = EncodeParams::default();
        let pair_densities = [0.05, 0.15, 0.4, 0.9];
        let stream = [FormatId::Dense, FormatId::Csr, FormatId::Csc, FormatId::Coo];
        let stationary = [FormatId::Dense, FormatId::Csc, FormatId::Coo];
        for (pi, &fa) in stream.iter().enumerate() {
            for (pj, &fb) in stationary.iter().enumerate() {
                for case in 0..200u64 {
                    let h = mix(case * 12 + (pi * 3 + pj) as u64);
                    let (m, k, n) = (pick(h, 1, 20), pick(h ^ 7, 1, 20), pick(h ^ 9, 1, 20));
                    let da = pair_densities[(mix(h ^ 11) % 4) as usize];
                    let db = pair_densities[(mix(h ^ 13) % 4) as usize];
                    let a_dense = random_dense(m, k, da, h ^ 21);
                    let b_dense = random_dense(k, n, db, h ^ 22);
                    let a = from_dense_matrix(&a_dense, fa, &params).map_err(err)?;
                    let b = from_dense_matrix(&b_dense, fb, &params).map_err(err)?;
                    let got = matmul_acf(&a, &b).map_err(err)?;
                    let want = gemm_dense(&a_dense, &b_dense).map_err(err)?;
                    check!(
                        all_close(&got.values, &want.values),
                        "matmul {fa}x{fb} case {case} ({m}x{k}x{n}) deviates"
                    );
                }
            }
        }
        for case in 0..200u64 {
            let h = mix(0xDEAD + case);
            let dims = [pick(h, 1, 10), pick(h ^ 1, 1, 10), pick(h ^ 2, 1, 10)];
            let f = pick(h ^ 3, 1, 8);
            let d = pair_densities[(mix(h ^ 4) % 4) as usize];
            let fmt = FormatId::TENSOR3[(case % 4) as usize];
            let t_dense = FormattedTensor3::Coo(gen_tensor3(dims, d, h ^ 5).map_err(err)?).to_dense();
            let t = from_dense_tensor3(&t_dense, fmt, &params).map_err(err)?;
            let b = random_dense(dims[2], f, 1.0, h ^ 6);
            let got = spttm(&t, &b).map_err(err)?;
            let want = spttm_dense_oracle(&t_dense, &b).map_err(err)?;
            check!(
                all_close(&got.values, &want.values),
                "mode-2 contraction case {case} ({fmt}, {dims:?}, f={f}) deviates"
            );
        }
        for case in 0..200u64 {
            let h = mix(0xBEEF + case);
            let dims = [pick(h, 1, 10), pick(h ^ 1, 1, 10), pick(h ^ 2, 1, 10)];
            let f = pick(h ^ 3, 1, 8);
            let d = pair_densities[(mix(h ^ 4) % 4) as usize];
            let fmt = FormatId::TENSOR3[(case % 4) as usize];
            let t_dense = FormattedTensor3::Coo(gen_tensor3(dims, d, h ^ 5).map_err(err)?).to_dense();
            let t = from_dense_tensor3(&t_dense, fmt, &params).map_err(err)?;
            let b = random_dense(dims[1], f, 1.0, h ^ 6);
            let c = random_dense(dims[2], f, 1.0, h ^ 7);
            let got = mttkrp(&t, &b, &c).map_err(err)?;
            let want = mttkrp_dense_oracle(&t_dense, &b, &c).map_err(err)?;
            check!(
                all_close(&got.values, &want.values),
                "factored contraction case {case} ({fmt}, {dims:?}, f={f}) deviates"
            );
        }
        Ok(())
    })());
}

#[test]
fn criterion_04_storage_ranking_stars() {
    verdict(4, "storage ranking stars", (|| -> Check {
        let hw = HardwareConfig::default();
        let side = 11_000usize;
        let cells = (side * side) as f64;
        let stars = [
            (1e-8, FormatId::Coo),
            (0.10, FormatId::Rlc),
            (0.50, FormatId::Zvc),
            (1.0, FormatId::Dense),
        ];
        for (d, want) in stars {
            let nnz = (d * cells).round() as usize;
            let ranked = rank_mcf(side, side, nnz, &hw);
            check!(
                ranked[0].0 == want,
                "density {d}: expected {want} most compact, got {} ({} bits)",
                ranked[0].0,
                ranked[0].1.total_bits()
            );
        }
        Ok(())
    })());
}

#[test]
fn criterion_05_metadata_growth_under_quantization() {
    verdict(5, "metadata growth under quantization", (|| -> Check {
        let params = EncodeParams::default();
        let instance = FormattedMatrix::Coo(gen_matrix(1000, 1000, 0.05, 42).map_err(err)?);
        let stats = MatrixStats::from_matrix(&instance, &params);
        let compressed = [
            FormatId::Coo,
            FormatId::Csr,
            FormatId::Csc,
            FormatId::Bsr,
            FormatId::Rlc,
            FormatId::Zvc,
        ];
        for fmt in compressed {
            let fractions: Vec<f64> = [32u32, 16, 8]
                .iter()
                .map(|&b| {
                    let mut hw = HardwareConfig::default();
                    hw.dtype_bits = b;
                    storage_bits(fmt, &stats, &hw, &params).metadata_fraction()
                })
                .collect();
            check!(
                fractions[0] < fractions[1] && fractions[1] < fractions[2],
                "{fmt}: metadata fraction not strictly increasing at 32/16/8 bits: {fractions:?}"
            );
        }
        Ok(())
    })());
}

#[test]
fn criterion_06_stream_packing_cycles() {
    verdict(6, "stream packing cycles", (|| -> Check {
        let mut hw = HardwareConfig::default();
        hw.n_pe = 4;
        hw.bus_elems_per_cycle = 5;
        hw.pe_buffer_elems = 8;
        let a = CooMatrix {
            rows: 4,
            cols: 8,
            row_ids: vec![0, 0, 1, 2],
            col_ids: vec![1, 5, 2, 6],
            values: vec![1.0, 2.0, 3.0, 4.0],
        };
        let p = SparsityProfile::from_matrix(&FormattedMatrix::Coo(a));
        for (fmt, want) in [
            (FormatId::Dense, 8),
            (FormatId::Csr, 3),
            (FormatId::Coo, 4),
        ] {
            let got = pack_stream(&p, fmt, &hw).map_err(err)?;
            check!(got == want, "{fmt}: expected {want} bus cycles, got {got}");
        }
        let desc = matrix_stream_descriptor(FormatId::Coo).map_err(err)?;
        let n = max_elems_per_cycle(&desc, &hw).map_err(err)?;
        // Each coordinate entry carries two index fields, so a width-5 bus
        // fits floor(5 / (1 + 2)) = 1 entry per cycle.
        check!(n == 1, "coordinate packing bound: expected 1 element/cycle, got {n}");
        Ok(())
    })());
}

fn r_squared(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean = sy / n;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean).powi(2)).sum();
    1.0 - ss_res / ss_tot
}

fn catalog_matrix_workload(name: &str) -> WorkloadSpec {
    let e = catalog_entry(name).unwrap();
    let CatalogShape::Matrix { rows, cols } = e.shape else {
        panic!("{name} is not a matrix workload");
    };
    let d = e.density();
    let a = FormattedMatrix::Coo(gen_matrix(rows, cols, d, 0x5EED).unwrap());
    let b = FormattedMatrix::Coo(gen_matrix(cols, rows, d, 0x5EED + 1).unwrap());
    WorkloadSpec::MatMul { a, b }
}

#[test]
fn criterion_07_conversion_scaling_and_share() {
    verdict(7, "conversion op-count scaling and energy share", (|| -> Check {
        let hw = HardwareConfig::default();
        let params = EncodeParams::default();

        let shapes = [(128, 128), (128, 256), (256, 256), (256, 512), (512, 512)];
        let mut pts = Vec::new();
        for (m, k) in shapes {
            let nnz = (0.05 * (m * k) as f64).round() as usize;
            let st = MatrixStats::estimate(m, k, nnz, &params);
            let plan =
                plan_matrix_conversion(FormatId::Dense, FormatId::Csr, &st, &hw, &params)
                    .map_err(err)?;
            pts.push(((m * k) as f64, plan.op_count() as f64));
        }
        let r2 = r_squared(&pts);
        check!(r2 >= 0.99, "dense-to-row-compressed op count vs cells: R^2 = {r2:.6}");

        let mut pts = Vec::new();
        for side in [128usize, 192, 256, 384, 512] {
            let nnz = (0.05 * (side * side) as f64).round() as usize;
            let st = MatrixStats::estimate(side, side, nnz, &params);
            let plan = plan_matrix_conversion(FormatId::Csr, FormatId::Csc, &st, &hw, &params)
                .map_err(err)?;
            pts.push(((nnz + side) as f64, plan.op_count() as f64));
        }
        let r2 = r_squared(&pts);
        check!(r2 >= 0.99, "transpose op count vs nnz+K: R^2 = {r2:.6}");

        for name in ["journal", "cavity14", "m3plates"] {
            let w = catalog_matrix_workload(name);
            let rec = recommend(&w, &hw, McfConstraint::default()).map_err(err)?;
            let share = rec.best.input_conversion_share();
            check!(
                share < 0.01,
                "{name}: input conversion is {:.4}% of total energy",
                share * 100.0
            );
        }
        Ok(())
    })());
}

#[test]
fn criterion_08_recommender_dominance() {
    verdict(8, "recommender dominance over presets", (|| -> Check {
        let hw = HardwareConfig::default();
        let mut strict_wins = 0usize;
        for i in 0..50u64 {
            let h = mix(0xC0FFEE + i);
            let m = pick(h, 32, 256);
            let k = pick(h ^ 1, 32, 256);
            let n = pick(h ^ 2, 32, 256);
            let da = 10f64.powf(-6.0 * (mix(h ^ 3) % 1000) as f64 / 999.0);
            let db = 10f64.powf(-6.0 * (mix(h ^ 4) % 1000) as f64 / 999.0);
            let a = FormattedMatrix::Coo(gen_matrix(m, k, da, 7000 + i).map_err(err)?);
            let b = FormattedMatrix::Coo(gen_matrix(k, n, db, 8000 + i).map_err(err)?);
            let cmp = baseline_compare(&WorkloadSpec::MatMul { a, b }, &hw).map_err(err)?;
            let sage = cmp.sage().edp;
            let mut worst = f64::NEG_INFINITY;
            for (name, report) in &cmp.rows[..cmp.rows.len() - 1] {
                check!(
                    sage <= report.edp,
                    "workload {i} ({m}x{k}x{n}, densities {da:.2e}/{db:.2e}): preset {name} \
                     has EDP {} below the recommender's {sage}",
                    report.edp
                );
                worst = worst.max(report.edp);
            }
            if sage < worst {
                strict_wins += 1;
            }
        }
        check!(
            strict_wins >= 45,
            "strictly better than the worst preset on only {strict_wins}/50 workloads"
        );
        Ok(())
    })());
}

#[test]
fn criterion_09_extreme_density_format_picks() {
    verdict(9, "extreme-density format picks", (|| -> Check {
        let hw = HardwareConfig::default();

        let w = catalog_matrix_workload("journal");
        let best = recommend(&w, &hw, McfConstraint::default()).map_err(err)?.best;
        check!(
            best.combo.mcf_a == FormatId::Zvc && best.combo.mcf_b == FormatId::Zvc,
            "journal: expected bitmask storage for both operands, got {} / {}",
            best.combo.mcf_a,
            best.combo.mcf_b
        );
        check!(
            best.combo.acf_a == FormatId::Dense && best.combo.acf_b == FormatId::Dense,
            "journal: expected dense-dense compute, got {} / {}",
            best.combo.acf_a,
            best.combo.acf_b
        );

        let w = catalog_matrix_workload("m3plates");
        let best = recommend(&w, &hw, McfConstraint::default()).map_err(err)?.best;
        check!(
            best.combo.acf_a == FormatId::Csr && best.combo.acf_b == FormatId::Csc,
            "m3plates: expected row-compressed stream against column-compressed stationary, \
             got {} / {}",
            best.combo.acf_a,
            best.combo.acf_b
        );
        check!(
            best.combo.mcf_a == FormatId::Coo,
            "m3plates: expected coordinate storage for the streamed operand, got {}",
            best.combo.mcf_a
        );
        Ok(())
    })());
}

#[test]
fn criterion_10_catalog_densities() {
    verdict(10, "catalog density check", (|| -> Check {
        check!(CATALOG.len() == 13, "catalog has {} rows", CATALOG.len());
        for e in &CATALOG {
            check!(
                e.density_error() < 0.03,
                "{}: nnz/cells = {:.6}% vs published {}% ({:.2}% off)",
                e.name,
                e.density() * 100.0,
                e.published_density_percent,
                e.density_error() * 100.0
            );
        }
        Ok(())
    })());
}
