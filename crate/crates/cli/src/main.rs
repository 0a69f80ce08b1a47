//! Command-line surface for the sparse-format toolkit: generate synthetic
//! operands, inspect and convert stored files, simulate the accelerator,
//! ask the recommender for a format plan, and emit sweep tables for
//! plotting.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use sfrm::cost::{
    rank_mcf, storage_bits, storage_bits_tensor, HardwareConfig, MatrixStats, TensorStats,
    MCF_CANDIDATES,
};
use sfrm::io::{
    read_container, read_hw_config, read_mtx, read_tns, write_atomic, write_container,
    ContainerPayload,
};
use sfrm::mint::{convert, convert_tensor, ConversionCost};
use sfrm::perf::{simulate_ws, SparsityProfile};
use sfrm::sage::{recommend, CostReport, McfConstraint, WorkloadSpec, STATIONARY_ACF, STREAM_ACF};
use sfrm::synth::{gen_matrix, gen_tensor3};
use sfrm::{EncodeParams, FormatId, FormattedMatrix, FormattedTensor3};

#[derive(Parser)]
#[command(
    name = "sfrm",
    version,
    about = "Sparse format toolkit: generate, inspect, convert, simulate, recommend, sweep"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic uniform-random operand and write it as a container
    Gen(GenArgs),
    /// Print shape, density and per-format storage costs of a stored operand
    Inspect(InspectArgs),
    /// Convert a stored operand to another format, reporting the hardware cost
    Convert(ConvertArgs),
    /// Model one weight-stationary run of A x B under chosen compute formats
    Simulate(SimulateArgs),
    /// Rank every storage/compute format combination by energy-delay product
    Recommend(RecommendArgs),
    /// Emit storage and cycle tables over a density range for plotting
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Matrix rows (use --tensor for rank-3 operands)
    #[arg(long, conflicts_with = "tensor", required_unless_present = "tensor")]
    rows: Option<usize>,
    /// Matrix columns
    #[arg(long, conflicts_with = "tensor", required_unless_present = "tensor")]
    cols: Option<usize>,
    /// Rank-3 shape as d0,d1,d2
    #[arg(long, value_parser = parse_dims3)]
    tensor: Option<[usize; 3]>,
    /// Fraction of cells that are nonzero, in [0, 1]
    #[arg(long)]
    density: f64,
    /// RNG seed; the same seed always produces byte-identical output
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Storage format of the written container
    #[arg(long, default_value = "coo", value_parser = parse_format)]
    format: FormatId,
    /// Stored value width: 32 or 64 bits
    #[arg(long, default_value_t = 64)]
    dtype_bits: u32,
    /// Output path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InspectArgs {
    /// Input file: .mtx, .tns, or .sfrm container
    file: PathBuf,
    /// Shape override for .tns inputs (otherwise inferred from coordinates)
    #[arg(long, value_parser = parse_dims3)]
    dims: Option<[usize; 3]>,
}

#[derive(Args)]
struct ConvertArgs {
    /// Input file: .mtx, .tns, or .sfrm container
    file: PathBuf,
    /// Target format
    #[arg(long, value_parser = parse_format)]
    to: FormatId,
    /// Block shape for BSR targets, as R,C
    #[arg(long, value_parser = parse_pair)]
    block: Option<(usize, usize)>,
    /// Zero-run field width for RLC targets
    #[arg(long)]
    run_bits: Option<u32>,
    /// Level-to-mode order for CSF targets, as a permutation of 0,1,2
    #[arg(long, value_parser = parse_dims3)]
    order: Option<[usize; 3]>,
    /// Shape override for .tns inputs
    #[arg(long, value_parser = parse_dims3)]
    dims: Option<[usize; 3]>,
    /// Hardware config file for the conversion cost model
    #[arg(long)]
    config: Option<PathBuf>,
    /// Stored value width of the written container: 32 or 64 bits
    #[arg(long, default_value_t = 64)]
    dtype_bits: u32,
    /// Output path; defaults to the input name with `.<format>.sfrm`
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Streamed operand A
    a: PathBuf,
    /// Stationary operand B
    b: PathBuf,
    /// Compute format A is streamed in
    #[arg(long, value_parser = parse_format)]
    acf_a: FormatId,
    /// Compute format B is buffered in
    #[arg(long, value_parser = parse_format)]
    acf_b: FormatId,
    /// Hardware config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also append the report as one CSV row to this file
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RecommendArgs {
    /// Sparse operand: a matrix (with B) or a rank-3 tensor
    a: PathBuf,
    /// Second operand: the matmul B matrix or a dense factor shape donor
    b: Option<PathBuf>,
    /// Second dense factor, making the tensor kernel a Khatri-Rao contraction
    c: Option<PathBuf>,
    /// Dense factor width for tensor kernels run without factor files
    #[arg(long)]
    factor_cols: Option<usize>,
    /// Tensor kernel when it cannot be inferred: spttm or mttkrp
    #[arg(long)]
    kernel: Option<String>,
    /// Shape override for .tns inputs
    #[arg(long, value_parser = parse_dims3)]
    dims: Option<[usize; 3]>,
    /// Hardware config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pin storage formats as `a[,b[,out]]`; empty slots stay free
    #[arg(long, value_parser = parse_fixed_mcf)]
    fixed_mcf: Option<McfConstraint>,
    /// Keep only the best N rows of the ranking
    #[arg(long)]
    top: Option<usize>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Matrix shape as M,K
    #[arg(long, value_parser = parse_pair)]
    dims: (usize, usize),
    /// Densities to evaluate, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    densities: Vec<f64>,
    /// Storage formats for the bits table (default: the six ranked candidates)
    #[arg(long, value_delimiter = ',', value_parser = parse_format)]
    formats: Vec<FormatId>,
    /// Storage table output path
    #[arg(long)]
    out: PathBuf,
    /// Cycle table output path; defaults to the storage path with `.cycles`
    #[arg(long)]
    cycles_out: Option<PathBuf>,
    /// Seed for the synthetic instances behind the cycle table
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip cycle rows whose operands would exceed this many nonzeros
    #[arg(long, default_value_t = 4_000_000)]
    max_sim_nnz: usize,
    /// Hardware config file
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_dims3(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated values, found {}", parts.len()));
    }
    let mut out = [0usize; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("`{part}` is not a non-negative integer"))?;
    }
    Ok(out)
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated values, found {}", parts.len()));
    }
    let a = parts[0].trim().parse().map_err(|_| format!("`{}` is not an integer", parts[0]))?;
    let b = parts[1].trim().parse().map_err(|_| format!("`{}` is not an integer", parts[1]))?;
    Ok((a, b))
}

fn parse_format(s: &str) -> Result<FormatId, String> {
    FormatId::parse(s).map_err(|e| e.to_string())
}

fn parse_fixed_mcf(s: &str) -> Result<McfConstraint, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() > 3 {
        return Err("at most three slots: a,b,out".into());
    }
    let slot = |i: usize| -> Result<Option<FormatId>, String> {
        match parts.get(i).map(|p| p.trim()) {
            None | Some("") | Some("any") => Ok(None),
            Some(tok) => parse_format(tok).map(Some),
        }
    };
    Ok(McfConstraint {
        a: slot(0)?,
        b: slot(1)?,
        out: slot(2)?,
    })
}

fn main() {
    // Die quietly when the downstream end of a pipe closes, like other
    // line-oriented tools, instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Inspect(args) => cmd_inspect(args),
        Cmd::Convert(args) => cmd_convert(args),
        Cmd::Simulate(args) => cmd_simulate(args),
        Cmd::Recommend(args) => cmd_recommend(args),
        Cmd::Sweep(args) => cmd_sweep(args),
    }
}

/// Load any supported file; `.mtx` and `.tns` come in as COO, containers in
/// their stored format.
fn load(path: &Path, dims: Option<[usize; 3]>) -> Result<ContainerPayload> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let value = match ext {
        "mtx" => ContainerPayload::Matrix(FormattedMatrix::Coo(read_mtx(path)?)),
        "tns" => ContainerPayload::Tensor3(FormattedTensor3::Coo(read_tns(path, dims)?)),
        _ => read_container(path)?,
    };
    Ok(value)
}

fn load_with_context(path: &Path, dims: Option<[usize; 3]>) -> Result<ContainerPayload> {
    load(path, dims).with_context(|| format!("reading {}", path.display()))
}

fn load_matrix(path: &Path) -> Result<FormattedMatrix> {
    match load_with_context(path, None)? {
        ContainerPayload::Matrix(m) => Ok(m),
        ContainerPayload::Tensor3(_) => {
            bail!("{} holds a rank-3 tensor, expected a matrix", path.display())
        }
    }
}

fn hw_from(config: &Option<PathBuf>) -> Result<HardwareConfig> {
    match config {
        Some(path) => {
            read_hw_config(path).with_context(|| format!("reading {}", path.display()))
        }
        None => Ok(HardwareConfig::default()),
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let dtype = args.dtype_bits;
    let value = match args.tensor {
        Some(dims) => {
            ContainerPayload::Tensor3(FormattedTensor3::Coo(gen_tensor3(dims, args.density, args.seed)?))
        }
        None => {
            let (rows, cols) = (args.rows.unwrap(), args.cols.unwrap());
            ContainerPayload::Matrix(FormattedMatrix::Coo(gen_matrix(
                rows,
                cols,
                args.density,
                args.seed,
            )?))
        }
    };
    let value = reformat(value, args.format, &EncodeParams::default(), &HardwareConfig::default())?.0;
    write_container(&args.out, &value, dtype)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} ({} {}, nnz {})",
        args.out.display(),
        value.format(),
        dims_label(&value),
        value.nnz()
    );
    Ok(())
}

/// Re-encode a payload into `to`, returning the modeled conversion cost.
fn reformat(
    value: ContainerPayload,
    to: FormatId,
    params: &EncodeParams,
    hw: &HardwareConfig,
) -> Result<(ContainerPayload, ConversionCost)> {
    Ok(match value {
        ContainerPayload::Matrix(m) => {
            let (out, cost) = convert(&m, to, hw, params)?;
            (ContainerPayload::Matrix(out), cost)
        }
        ContainerPayload::Tensor3(t) => {
            let (out, cost) = convert_tensor(&t, to, hw, params)?;
            (ContainerPayload::Tensor3(out), cost)
        }
    })
}

fn dims_label(value: &ContainerPayload) -> String {
    value
        .dims()
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("x")
}

fn cmd_inspect(args: InspectArgs) -> Result<()> {
    let value = load_with_context(&args.file, args.dims)?;
    let hw = HardwareConfig::default();
    let params = EncodeParams {
        run_bits: hw.run_bits,
        ..EncodeParams::default()
    };
    println!("kind: {}", if value.rank() == 2 { "matrix" } else { "tensor" });
    println!("format: {}", value.format());
    println!("dims: {}", dims_label(&value));
    println!("nnz: {}", value.nnz());
    println!("density: {}", value.density());
    println!();
    println!(
        "{:<8} {:>16} {:>16} {:>16} {:>10}",
        "format", "data_bits", "metadata_bits", "total_bits", "meta_frac"
    );
    let rows: Vec<(FormatId, sfrm::cost::StorageBreakdown)> = match &value {
        ContainerPayload::Matrix(m) => {
            let stats = MatrixStats::from_matrix(m, &params);
            FormatId::MATRIX
                .iter()
                .map(|&f| (f, storage_bits(f, &stats, &hw, &params)))
                .collect()
        }
        ContainerPayload::Tensor3(t) => {
            let stats = TensorStats::from_tensor(t, &params);
            FormatId::TENSOR3
                .iter()
                .map(|&f| (f, storage_bits_tensor(f, &stats, &hw, &params)))
                .collect()
        }
    };
    for (f, s) in rows {
        println!(
            "{:<8} {:>16} {:>16} {:>16} {:>10.4}",
            f.name(),
            s.data_bits,
            s.metadata_bits,
            s.total_bits(),
            s.metadata_fraction()
        );
    }
    Ok(())
}

fn cmd_convert(args: ConvertArgs) -> Result<()> {
    let value = load_with_context(&args.file, args.dims)?;
    let hw = hw_from(&args.config)?;
    let mut params = EncodeParams {
        run_bits: hw.run_bits,
        ..EncodeParams::default()
    };
    if let Some(block) = args.block {
        params.block = block;
    }
    if let Some(r) = args.run_bits {
        params.run_bits = r;
    }
    if let Some(order) = args.order {
        params.mode_order = order;
    }
    let src = value.format();
    let (converted, cost) = reformat(value, args.to, &params, &hw)?;
    let out = args.out.unwrap_or_else(|| {
        let stem = args
            .file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into());
        args.file
            .with_file_name(format!("{stem}.{}.sfrm", args.to.name()))
    });
    write_container(&out, &converted, args.dtype_bits)
        .with_context(|| format!("writing {}", out.display()))?;

    println!("conversion: {} -> {}", src, args.to.name());
    println!("ops: {}", cost.op_count());
    println!("cycles: {}", cost.cycles);
    println!("energy: {}", cost.energy);
    if !cost.stages.is_empty() {
        println!("stages:");
        for s in &cost.stages {
            println!(
                "  {:<20} elements={:<10} cycles={:<8} energy={}",
                s.block.to_string(),
                s.elements,
                s.cycles,
                s.energy
            );
        }
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let a = load_matrix(&args.a)?;
    let b = load_matrix(&args.b)?;
    let hw = hw_from(&args.config)?;
    hw.validate()?;
    let report = simulate_ws(
        &SparsityProfile::from_matrix(&a),
        &SparsityProfile::from_matrix(&b),
        args.acf_a,
        args.acf_b,
        &hw,
    )?;
    println!("acf_a={}", args.acf_a);
    println!("acf_b={}", args.acf_b);
    println!("load_cycles={}", report.load_cycles);
    println!("stream_cycles={}", report.stream_cycles);
    println!("total_cycles={}", report.total_cycles);
    println!("output_cycles={}", report.output_cycles);
    println!("useful_macs={}", report.useful_macs);
    println!("pe_utilization={}", report.pe_utilization);
    println!("buffer_data_elems={}", report.buffer_data_elems);
    println!("buffer_metadata_elems={}", report.buffer_metadata_elems);
    println!("k_tiles={}", report.k_tiles);
    println!("col_tiles={}", report.col_tiles);
    println!("energy={}", report.energy);
    if let Some(csv) = &args.csv {
        let header = "a,b,acf_a,acf_b,load_cycles,stream_cycles,total_cycles,output_cycles,\
                      useful_macs,pe_utilization,energy";
        let row = format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            args.a.display(),
            args.b.display(),
            args.acf_a,
            args.acf_b,
            report.load_cycles,
            report.stream_cycles,
            report.total_cycles,
            report.output_cycles,
            report.useful_macs,
            report.pe_utilization,
            report.energy
        );
        let mut text = match std::fs::read_to_string(csv) {
            Ok(existing) => existing,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => format!("{header}\n"),
            Err(e) => return Err(e).with_context(|| format!("reading {}", csv.display())),
        };
        text.push_str(&row);
        text.push('\n');
        write_atomic(csv, text.as_bytes())
            .with_context(|| format!("writing {}", csv.display()))?;
    }
    Ok(())
}

fn tensor_kernel(name: &str) -> Result<&'static str> {
    match name.to_ascii_lowercase().as_str() {
        "spttm" => Ok("spttm"),
        "mttkrp" => Ok("mttkrp"),
        other => bail!("unknown kernel `{other}`; expected spttm or mttkrp"),
    }
}

fn build_workload(args: &RecommendArgs) -> Result<WorkloadSpec> {
    let a = load_with_context(&args.a, args.dims)?;
    match a {
        ContainerPayload::Matrix(a) => {
            let Some(b_path) = &args.b else {
                bail!("a matrix workload needs the stationary operand B");
            };
            if args.c.is_some() {
                bail!("matrix workloads take exactly two operands");
            }
            if args.factor_cols.is_some() || args.kernel.is_some() {
                bail!("--factor-cols/--kernel apply only to tensor workloads");
            }
            let b = load_matrix(b_path)?;
            Ok(WorkloadSpec::MatMul { a, b })
        }
        ContainerPayload::Tensor3(tensor) => {
            let dims = tensor.dims();
            let kernel = match (&args.b, &args.c, &args.kernel) {
                (_, Some(_), k) => {
                    if let Some(k) = k {
                        if tensor_kernel(k)? != "mttkrp" {
                            bail!("two factor files imply mttkrp, but --kernel says {k}");
                        }
                    }
                    "mttkrp"
                }
                (Some(_), None, None) => "spttm",
                (Some(_), None, Some(k)) => tensor_kernel(k)?,
                (None, None, Some(k)) => tensor_kernel(k)?,
                (None, None, None) => {
                    bail!("a tensor workload needs factor files or --factor-cols with --kernel")
                }
            };
            let factor_cols = match (&args.b, args.factor_cols) {
                (Some(b_path), None) => {
                    let b = load_matrix(b_path)?;
                    let want_rows = if kernel == "spttm" { dims[2] } else { dims[1] };
                    if b.rows() != want_rows {
                        bail!(
                            "factor {} is {}x{}, but {} needs {} rows",
                            b_path.display(),
                            b.rows(),
                            b.cols(),
                            kernel,
                            want_rows
                        );
                    }
                    if let Some(c_path) = &args.c {
                        let c = load_matrix(c_path)?;
                        if c.rows() != dims[2] || c.cols() != b.cols() {
                            bail!(
                                "second factor {} is {}x{}, expected {}x{}",
                                c_path.display(),
                                c.rows(),
                                c.cols(),
                                dims[2],
                                b.cols()
                            );
                        }
                    }
                    b.cols()
                }
                (None, Some(f)) => f,
                (Some(_), Some(_)) => bail!("give either a factor file or --factor-cols, not both"),
                (None, None) => bail!("a tensor workload needs factor files or --factor-cols"),
            };
            Ok(if kernel == "spttm" {
                WorkloadSpec::SpTtm { tensor, factor_cols }
            } else {
                WorkloadSpec::Mttkrp { tensor, factor_cols }
            })
        }
    }
}

fn report_row(r: &CostReport) -> String {
    let total_bits = r.a.storage_bits + r.b.storage_bits + r.output.storage_bits;
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.combo.mcf_a,
        r.combo.mcf_b,
        r.combo.acf_a,
        r.combo.acf_b,
        r.combo.mcf_out,
        total_bits,
        r.total_cycles,
        r.total_energy,
        r.edp
    )
}

fn cmd_recommend(args: RecommendArgs) -> Result<()> {
    let workload = build_workload(&args)?;
    let hw = hw_from(&args.config)?;
    let fix = args.fixed_mcf.unwrap_or_default();
    let rec = recommend(&workload, &hw, fix)?;
    let mut out = String::from(
        "mcf_a,mcf_b,acf_a,acf_b,mcf_out,total_bits,total_cycles,total_energy,edp\n",
    );
    let keep = args.top.unwrap_or(rec.ranking.len());
    for r in rec.ranking.iter().take(keep) {
        out.push_str(&report_row(r));
        out.push('\n');
    }
    match &args.out {
        Some(path) => {
            write_atomic(path, out.as_bytes())
                .with_context(|| format!("writing {}", path.display()))?;
            println!(
                "wrote {} ({} of {} combinations)",
                path.display(),
                keep.min(rec.ranking.len()),
                rec.ranking.len()
            );
        }
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let hw = hw_from(&args.config)?;
    hw.validate()?;
    let (rows, cols) = args.dims;
    let cells = rows as f64 * cols as f64;
    let formats = if args.formats.is_empty() {
        MCF_CANDIDATES.to_vec()
    } else {
        args.formats.clone()
    };
    if let Some(bad) = formats.iter().find(|f| !f.is_matrix_format()) {
        bail!("{bad} is not a matrix storage format");
    }
    for &d in &args.densities {
        if !(0.0..=1.0).contains(&d) {
            bail!("density {d} is outside [0, 1]");
        }
    }

    let mut storage = String::from("density,format,total_bits,metadata_bits,metadata_fraction\n");
    for &density in &args.densities {
        let nnz = (density * cells).round() as usize;
        let ranked = rank_mcf(rows, cols, nnz, &hw);
        for &fmt in &formats {
            let s = ranked
                .iter()
                .find(|(f, _)| *f == fmt)
                .map(|&(_, s)| s)
                .unwrap_or_else(|| {
                    // BSR is not in the ranked set; price it directly.
                    let params = EncodeParams {
                        run_bits: hw.run_bits,
                        ..EncodeParams::default()
                    };
                    let stats = MatrixStats::estimate(rows, cols, nnz, &params);
                    storage_bits(fmt, &stats, &hw, &params)
                });
            storage.push_str(&format!(
                "{},{},{},{},{}\n",
                density,
                fmt,
                s.total_bits(),
                s.metadata_bits,
                s.metadata_fraction()
            ));
        }
    }
    write_atomic(&args.out, storage.as_bytes())
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {}", args.out.display());

    let cycles_path = args.cycles_out.clone().unwrap_or_else(|| {
        let stem = args
            .out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "sweep".into());
        args.out.with_file_name(format!("{stem}.cycles.csv"))
    });
    let mut cycles = String::from("density,acf_a,acf_b,load_cycles,stream_cycles,total_cycles\n");
    let mut skipped = 0usize;
    for &density in &args.densities {
        let nnz = (density * cells).round() as usize;
        if nnz > args.max_sim_nnz {
            skipped += 1;
            continue;
        }
        let a = FormattedMatrix::Coo(gen_matrix(rows, cols, density, args.seed)?);
        let b = FormattedMatrix::Coo(gen_matrix(cols, rows, density, args.seed + 1)?);
        let pa = SparsityProfile::from_matrix(&a);
        let pb = SparsityProfile::from_matrix(&b);
        for &acf_a in &STREAM_ACF {
            for &acf_b in &STATIONARY_ACF {
                let r = simulate_ws(&pa, &pb, acf_a, acf_b, &hw)?;
                cycles.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    density, acf_a, acf_b, r.load_cycles, r.stream_cycles, r.total_cycles
                ));
            }
        }
    }
    write_atomic(&cycles_path, cycles.as_bytes())
        .with_context(|| format!("writing {}", cycles_path.display()))?;
    if skipped > 0 {
        eprintln!(
            "note: skipped {skipped} cycle-table densit{} above {} nonzeros; raise --max-sim-nnz to include them",
            if skipped == 1 { "y" } else { "ies" },
            args.max_sim_nnz
        );
    }
    println!("wrote {}", cycles_path.display());
    Ok(())
}
