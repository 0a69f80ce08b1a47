//! `key = value` hardware configuration files. Every key names a
//! [`HardwareConfig`] field; omitted fields keep their defaults, unknown
//! keys are errors so typos cannot silently fall back to a default.

use std::path::Path;

use crate::cost::{HardwareConfig, MintVariant, PrefixVariant};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn num<T: std::str::FromStr>(value: &str, key: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| parse_err(line, format!("`{value}` is not a valid value for {key}")))
}

/// Parse configuration text into a validated [`HardwareConfig`].
pub fn parse_hw_config(text: &str) -> Result<HardwareConfig> {
    let mut hw = HardwareConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_err(lineno, format!("expected `key = value`, found `{line}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "n_pe" => hw.n_pe = num(value, key, lineno)?,
            "bus_elems_per_cycle" => hw.bus_elems_per_cycle = num(value, key, lineno)?,
            "pe_buffer_elems" => hw.pe_buffer_elems = num(value, key, lineno)?,
            "vector_lanes" => hw.vector_lanes = num(value, key, lineno)?,
            "dtype_bits" => hw.dtype_bits = num(value, key, lineno)?,
            "dram_bits_per_cycle" => hw.dram_bits_per_cycle = num(value, key, lineno)?,
            "e_dram_per_bit" => hw.e_dram_per_bit = num(value, key, lineno)?,
            "e_mac" => hw.e_mac = num(value, key, lineno)?,
            "e_buf_access" => hw.e_buf_access = num(value, key, lineno)?,
            "e_stream_elem" => hw.e_stream_elem = num(value, key, lineno)?,
            "e_conv_op" => hw.e_conv_op = num(value, key, lineno)?,
            "div_mod_lanes" => hw.div_mod_lanes = num(value, key, lineno)?,
            "prefix_width" => hw.prefix_width = num(value, key, lineno)?,
            "sorter_width" => hw.sorter_width = num(value, key, lineno)?,
            "run_bits" => hw.run_bits = num(value, key, lineno)?,
            "meta_width_ratio" => hw.meta_width_ratio = num(value, key, lineno)?,
            "overlap_conversion" => {
                hw.overlap_conversion = match value {
                    "true" => true,
                    "false" => false,
                    _ => {
                        return Err(parse_err(
                            lineno,
                            format!("overlap_conversion must be true or false, found `{value}`"),
                        ))
                    }
                }
            }
            "prefix_variant" => {
                hw.prefix_variant = match value {
                    "serial_chain" => PrefixVariant::SerialChain,
                    "work_efficient" => PrefixVariant::WorkEfficient,
                    "highly_parallel" => PrefixVariant::HighlyParallel,
                    _ => {
                        return Err(parse_err(
                            lineno,
                            format!(
                                "prefix_variant must be serial_chain, work_efficient or \
                                 highly_parallel, found `{value}`"
                            ),
                        ))
                    }
                }
            }
            "mint_variant" => {
                hw.mint_variant = match value {
                    "baseline" => MintVariant::Baseline,
                    "merged" => MintVariant::Merged,
                    "merged_reuse" => MintVariant::MergedReuse,
                    _ => {
                        return Err(parse_err(
                            lineno,
                            format!(
                                "mint_variant must be baseline, merged or merged_reuse, \
                                 found `{value}`"
                            ),
                        ))
                    }
                }
            }
            _ => return Err(parse_err(lineno, format!("unknown key `{key}`"))),
        }
    }
    hw.validate()?;
    Ok(hw)
}

pub fn read_hw_config(path: &Path) -> Result<HardwareConfig> {
    parse_hw_config(&std::fs::read_to_string(path)?)
}
