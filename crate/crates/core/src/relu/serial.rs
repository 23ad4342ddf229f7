//! Bit-exact JSON serialization for networks.
//!
//! Weights are written as C99-style hex-float literals ("0x1.8p+1"), the
//! only decimal-free way to round-trip every finite f64 exactly. Encoding
//! is canonical (lowercase, trimmed trailing zeros, explicit exponent
//! sign) and the decoder accepts exactly that canon.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Layer, ReluNetwork};

const MANT_BITS: u64 = (1u64 << 52) - 1;

/// Canonical hex-float form of a finite value.
pub fn encode_hex(v: f64) -> String {
    let bits = v.to_bits();
    debug_assert!(v.is_finite(), "networks never hold non-finite values");
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_raw = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & MANT_BITS;
    if exp_raw == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_raw == 0 {
        ('0', -1022) // subnormal
    } else {
        ('1', exp_raw - 1023)
    };
    let mut frac = format!("{mant:013x}");
    while frac.ends_with('0') {
        frac.pop();
    }
    if frac.is_empty() {
        format!("{sign}0x{lead}p{exp:+}")
    } else {
        format!("{sign}0x{lead}.{frac}p{exp:+}")
    }
}

/// Inverse of [`encode_hex`]; rejects anything outside the canonical form.
pub fn decode_hex(s: &str) -> Result<f64> {
    let bad = || Error::invalid(format!("malformed float literal {s:?}"));
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let t = t.strip_prefix("0x").ok_or_else(bad)?;
    let (mantissa, exp) = t.split_once('p').ok_or_else(bad)?;
    if !exp.starts_with('+') && !exp.starts_with('-') {
        return Err(bad());
    }
    let exp: i64 = exp.parse().map_err(|_| bad())?;
    let (lead, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if frac.len() > 13
        || !frac.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
        || (mantissa.contains('.') && frac.is_empty())
    {
        return Err(bad());
    }
    let mant = if frac.is_empty() {
        0
    } else {
        u64::from_str_radix(&format!("{frac:0<13}"), 16).map_err(|_| bad())?
    };
    let bits = match lead {
        "1" => {
            if !(-1022..=1023).contains(&exp) {
                return Err(bad());
            }
            (((exp + 1023) as u64) << 52) | mant
        }
        "0" => {
            if mant == 0 {
                if exp != 0 {
                    return Err(bad());
                }
                0
            } else {
                if exp != -1022 {
                    return Err(bad());
                }
                mant
            }
        }
        _ => return Err(bad()),
    };
    Ok(f64::from_bits(bits | if neg { 1u64 << 63 } else { 0 }))
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    weight: Vec<Vec<String>>,
    offset: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct NetFile {
    final_layer_linear: bool,
    layers: Vec<LayerFile>,
}

pub fn to_json(net: &ReluNetwork) -> String {
    let file = NetFile {
        final_layer_linear: net.final_layer_linear(),
        layers: net
            .layers()
            .iter()
            .map(|l| LayerFile {
                weight: l
                    .weight
                    .rows()
                    .into_iter()
                    .map(|row| row.iter().map(|v| encode_hex(*v)).collect())
                    .collect(),
                offset: l.offset.iter().map(|v| encode_hex(*v)).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("network serialization cannot fail")
}

pub fn from_json(text: &str) -> Result<ReluNetwork> {
    let file: NetFile =
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("network JSON: {e}")))?;
    let mut layers = Vec::with_capacity(file.layers.len());
    for lf in &file.layers {
        let rows = lf.weight.len();
        let cols = lf.weight.first().map(|r| r.len()).unwrap_or(0);
        if rows == 0 || cols == 0 || lf.weight.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged or empty weight matrix"));
        }
        let mut flat = Vec::with_capacity(rows * cols);
        for row in &lf.weight {
            for cell in row {
                flat.push(decode_hex(cell)?);
            }
        }
        let offset = lf
            .offset
            .iter()
            .map(|s| decode_hex(s))
            .collect::<Result<Vec<f64>>>()?;
        layers.push(Layer::new(
            Array2::from_shape_vec((rows, cols), flat).expect("shape checked above"),
            Array1::from(offset),
        )?);
    }
    ReluNetwork::new(layers, file.final_layer_linear)
}
