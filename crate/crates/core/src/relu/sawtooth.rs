//! Sawtooth networks by tent-map composition, and the trapezoid shaper
//! that turns teeth into flat-topped pulses.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

use super::{Layer, ReluNetwork};

/// The unit tent on [0,1]: 0 at both ends, 1 at 1/2, zero outside. Two
/// hidden units, rectified output (the tent is non-negative).
fn tent_stage() -> ReluNetwork {
    let w1 = Array2::from_shape_vec((2, 1), vec![1.0, 1.0]).unwrap();
    let b1 = Array1::from(vec![0.0, -0.5]);
    let w2 = Array2::from_shape_vec((1, 2), vec![2.0, -4.0]).unwrap();
    ReluNetwork::new(
        vec![
            Layer { weight: w1, offset: b1 },
            Layer { weight: w2, offset: Array1::zeros(1) },
        ],
        false,
    )
    .unwrap()
}

/// Sawtooth with exactly R teeth on [0,1], zero outside; R must be a power
/// of two. Composing the tent with itself t times gives 2^t teeth, so the
/// network has depth 2(t+1) = 2 log2(R) + 2 and width 2.
pub fn build_sawtooth(r_teeth: u64) -> Result<ReluNetwork> {
    if r_teeth == 0 || !r_teeth.is_power_of_two() {
        return Err(Error::invalid(format!(
            "tooth count {r_teeth} is not a power of two; round up before \
             calling (the recursive builder does this itself)"
        )));
    }
    let mut net = tent_stage();
    let mut teeth = 1u64;
    while teeth < r_teeth {
        net = super::compose(&tent_stage(), &net)?;
        teeth *= 2;
    }
    Ok(net)
}

/// One hidden layer mapping a tooth value v in [0,1] to a ramp that tops
/// out at `height`: zero at v=0, saturated from v = 1 - plateau/width on.
/// Applied after a sawtooth whose teeth have base `width`, each tooth
/// becomes a trapezoid pulse whose flat top has length `plateau`.
pub fn build_trapezoid_shaper(width: f64, plateau: f64, height: f64) -> Result<ReluNetwork> {
    if !(width > 0.0) || !plateau.is_finite() || !height.is_finite() {
        return Err(Error::invalid("degenerate shaper dimensions"));
    }
    if !(plateau > 0.0 && plateau < width) {
        return Err(Error::invalid(format!(
            "plateau {plateau} must lie strictly inside (0, width={width})"
        )));
    }
    let theta = 1.0 - plateau / width;
    let w1 = Array2::from_shape_vec((2, 1), vec![1.0, 1.0]).unwrap();
    let b1 = Array1::from(vec![0.0, -theta]);
    let w2 =
        Array2::from_shape_vec((1, 2), vec![height / theta, -height / theta]).unwrap();
    ReluNetwork::new(
        vec![
            Layer { weight: w1, offset: b1 },
            Layer { weight: w2, offset: Array1::zeros(1) },
        ],
        true,
    )
}
