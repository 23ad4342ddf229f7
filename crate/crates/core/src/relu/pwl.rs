//! Scalar piecewise-linear functions and their two-layer network form.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

use super::{Layer, ReluNetwork};

/// A continuous piecewise-linear function given by its breakpoints and the
/// values there. Outside the breakpoint span each side either stays constant
/// at the boundary value or continues the boundary segment's slope.
#[derive(Debug, Clone, PartialEq)]
pub struct PwlFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    left_constant: bool,
    right_constant: bool,
}

impl PwlFunction {
    pub fn new(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        left_constant: bool,
        right_constant: bool,
    ) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::invalid("need at least two breakpoints"));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: breakpoints.len(),
                got: values.len(),
                context: "piecewise-linear value list",
            });
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("breakpoints and values must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("breakpoints must be strictly increasing"));
        }
        Ok(PwlFunction {
            breakpoints,
            values,
            left_constant,
            right_constant,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn slope(&self, piece: usize) -> f64 {
        (self.values[piece + 1] - self.values[piece])
            / (self.breakpoints[piece + 1] - self.breakpoints[piece])
    }

    /// Direct evaluation, the reference the network form is tested against.
    pub fn eval(&self, z: f64) -> f64 {
        let b = &self.breakpoints;
        let v = &self.values;
        let last = b.len() - 1;
        if z <= b[0] {
            return if self.left_constant {
                v[0]
            } else {
                v[0] + self.slope(0) * (z - b[0])
            };
        }
        if z >= b[last] {
            return if self.right_constant {
                v[last]
            } else {
                v[last] + self.slope(last - 1) * (z - b[last])
            };
        }
        let piece = match b.partition_point(|x| *x <= z) {
            0 => 0,
            p => p - 1,
        };
        v[piece] + self.slope(piece) * (z - b[piece])
    }
}

/// Realize a piecewise-linear function as a depth-2 network: one rectifier
/// unit per breakpoint, plus one mirrored unit for the leading ray when the
/// left side is not constant. Exact everywhere, extensions included.
pub fn build_from_pwl(f: &PwlFunction) -> Result<ReluNetwork> {
    let b = f.breakpoints();
    let v = f.values();
    let nb = b.len();
    let units = nb + usize::from(!f.left_constant);
    let mut w1 = Array2::zeros((units, 1));
    let mut b1 = Array1::zeros(units);
    let mut w2 = Array2::zeros((1, units));
    for j in 0..nb {
        w1[[j, 0]] = 1.0;
        b1[j] = -b[j];
        // to the left of b_0 every sigma(z - b_j) is off; the ray unit
        // alone carries a linear left extension
        let before = if j == 0 { 0.0 } else { f.slope(j - 1) };
        let after = if j == nb - 1 {
            if f.right_constant { 0.0 } else { f.slope(nb - 2) }
        } else {
            f.slope(j)
        };
        w2[[0, j]] = after - before;
    }
    if !f.left_constant {
        // ray unit fires left of the first breakpoint
        w1[[nb, 0]] = -1.0;
        b1[nb] = b[0];
        w2[[0, nb]] = -f.slope(0);
    }
    ReluNetwork::new(
        vec![
            Layer { weight: w1, offset: b1 },
            Layer { weight: w2, offset: Array1::from(vec![v[0]]) },
        ],
        true,
    )
}
