//! Depth-efficient network form of the block-sparse triangle generator.
//!
//! Per block coordinate the generator restricted to one sub-interval is a
//! double triangle of half-width interval_len/2. The network first applies a
//! centered soft-clip `g` repeatedly, doubling the slope each time, then a
//! four-unit triangle shaper `f`. To keep every intermediate non-negative
//! (so the rectifier between stages is a no-op) the chain carries the
//! shifted value g(u) + rho, where rho in [1/2, 1) is the working amplitude
//! 2^D * r/(n/k).

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::model::GenModelParams;

use super::{Layer, ReluNetwork};

/// Default cap on the output amplitude accepted by
/// [`build_double_triangle_deep`]; keeps every constructed weight <= 4.
pub const DEFAULT_AMPLITUDE_CAP: f64 = 1.0;

/// Soft clip: -r below -r/2, slope 2 through the origin, r above r/2.
/// One hidden layer of width 2, affine output.
pub fn build_g(r: f64) -> Result<ReluNetwork> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid("radius must be positive and finite"));
    }
    let w1 = Array2::from_shape_vec((2, 1), vec![1.0, 1.0]).unwrap();
    let b1 = Array1::from(vec![r / 2.0, -r / 2.0]);
    let w2 = Array2::from_shape_vec((1, 2), vec![2.0, -2.0]).unwrap();
    let b2 = Array1::from(vec![-r]);
    ReluNetwork::new(
        vec![Layer { weight: w1, offset: b1 }, Layer { weight: w2, offset: b2 }],
        true,
    )
}

/// Double triangle on [-r, r]: up to +r at -r/2, back through zero, down to
/// -r at r/2, zero at both ends and outside. Slopes are +/-2.
pub fn build_f(r: f64) -> Result<ReluNetwork> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid("radius must be positive and finite"));
    }
    let f = super::pwl::PwlFunction::new(
        vec![-r, -r / 2.0, 0.0, r / 2.0, r],
        vec![0.0, r, 0.0, -r, 0.0],
        true,
        true,
    )?;
    super::pwl::build_from_pwl(&f)
}

/// Number of slope-doubling stages for the deep construction, and the
/// working amplitude rho = ratio-normalized half-width, rho in [1/2, 1).
fn stage_count(params: &GenModelParams) -> Result<(usize, f64)> {
    let ratio = params.n as f64 / (2.0 * params.r * params.k as f64);
    if ratio <= 0.5 * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "n/(2rk) = {ratio:.6} rounds below one stage; sub-intervals are \
             wider than the unit shaper can cover"
        )));
    }
    let mut d = 0u32;
    while ((1u64 << d) as f64) < ratio * (1.0 - 1e-12) {
        d += 1;
    }
    let rho = params.r * params.k as f64 / params.n as f64 * (1u64 << d) as f64;
    Ok((d as usize, rho))
}

/// Deep network computing exactly the same map as
/// [`GenModelParams::generate`]: k inputs, n outputs, depth 2D+2 with
/// D = ceil(log2(n/(2rk))). Weights stay within magnitude 4 as long as
/// x_max <= cap = 1.
pub fn build_double_triangle_deep(params: &GenModelParams) -> Result<ReluNetwork> {
    build_double_triangle_deep_capped(params, DEFAULT_AMPLITUDE_CAP)
}

/// Same with an explicit amplitude cap; weights scale linearly in the cap.
pub fn build_double_triangle_deep_capped(
    params: &GenModelParams,
    amplitude_cap: f64,
) -> Result<ReluNetwork> {
    if params.x_max > amplitude_cap {
        return Err(Error::invalid(format!(
            "amplitude {} exceeds the configured cap {amplitude_cap}",
            params.x_max
        )));
    }
    let (depth_d, rho) = stage_count(params)?;
    let n = params.n;
    let k = params.k;
    let block_len = params.block_len();
    let ell = params.interval_len();
    let centers: Vec<f64> = (0..n)
        .map(|e| -params.r + (((e % block_len) as f64) + 0.5) * ell)
        .collect();
    let sf = 2.0 * params.x_max / rho;

    let mut layers: Vec<Layer> = Vec::with_capacity(2 * depth_d + 2);
    if depth_d >= 1 {
        // entry chains: sigma(z_i - c_e +/- rho/2), recombined to g(u) + rho
        let mut w = Array2::zeros((2 * n, k));
        let mut b = Array1::zeros(2 * n);
        for e in 0..n {
            let blk = e / block_len;
            w[[2 * e, blk]] = 1.0;
            b[2 * e] = -centers[e] + rho / 2.0;
            w[[2 * e + 1, blk]] = 1.0;
            b[2 * e + 1] = -centers[e] - rho / 2.0;
        }
        layers.push(Layer { weight: w, offset: b });
        layers.push(recombine_layer(n));
        for _ in 1..depth_d {
            // v in [0, 2rho]; recenter and clip again
            let mut w = Array2::zeros((2 * n, n));
            let mut b = Array1::zeros(2 * n);
            for e in 0..n {
                w[[2 * e, e]] = 1.0;
                b[2 * e] = -rho / 2.0;
                w[[2 * e + 1, e]] = 1.0;
                b[2 * e + 1] = -1.5 * rho;
            }
            layers.push(Layer { weight: w, offset: b });
            layers.push(recombine_layer(n));
        }
        // triangle shaper on w = v - rho, four tent-basis units per entry
        let mut w = Array2::zeros((4 * n, n));
        let mut b = Array1::zeros(4 * n);
        for e in 0..n {
            for (u, t) in [-rho, -rho / 2.0, rho / 2.0, rho].iter().enumerate() {
                w[[4 * e + u, e]] = sf;
                b[4 * e + u] = -sf * (rho + t);
            }
        }
        layers.push(Layer { weight: w, offset: b });
    } else {
        // single stage: shaper applied directly to z_i - c_e
        let mut w = Array2::zeros((4 * n, k));
        let mut b = Array1::zeros(4 * n);
        for e in 0..n {
            let blk = e / block_len;
            for (u, t) in [-rho, -rho / 2.0, rho / 2.0, rho].iter().enumerate() {
                w[[4 * e + u, blk]] = sf;
                b[4 * e + u] = -sf * (centers[e] + t);
            }
        }
        layers.push(Layer { weight: w, offset: b });
    }
    let mut w = Array2::zeros((n, 4 * n));
    for e in 0..n {
        for (u, c) in [1.0, -2.0, 2.0, -1.0].iter().enumerate() {
            w[[e, 4 * e + u]] = *c;
        }
    }
    layers.push(Layer { weight: w, offset: Array1::zeros(n) });
    ReluNetwork::new(layers, true)
}

fn recombine_layer(n: usize) -> Layer {
    let mut w = Array2::zeros((n, 2 * n));
    for e in 0..n {
        w[[e, 2 * e]] = 2.0;
        w[[e, 2 * e + 1]] = -2.0;
    }
    Layer { weight: w, offset: Array1::zeros(n) }
}
