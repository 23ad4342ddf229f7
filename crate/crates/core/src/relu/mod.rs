//! Feed-forward ReLU networks with explicit weights, built layer by layer.
//!
//! A network is a chain of affine layers; every layer output passes through
//! the rectifier except, optionally, the last (`final_layer_linear`), which
//! is how signed outputs are realized. Depth counts all layers including an
//! affine final one; width is the largest layer output size.
//!
//! Combinator bookkeeping:
//! * [`compose`] is function-exact. When the inner network ends with an
//!   affine layer that layer is folded into the outer network's first layer
//!   (depth d1 + d2 - 1); when the inner network ends rectified the layers
//!   are simply stacked (depth d1 + d2).
//! * [`parallel`] runs networks on disjoint input slices, [`bundle`] runs
//!   them on one shared input; both pad shorter branches with identity
//!   layers so every branch has the same depth, and widths add per layer.
//! * [`sum`] adds outputs in the final affine layer, so it costs no depth
//!   beyond alignment.

pub mod deep;
pub mod pwl;
pub mod recursive;
pub mod sawtooth;
pub mod serial;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// One affine layer: `x -> W x + b`. Whether the rectifier follows is
/// decided by the layer's position in the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weight: Array2<f64>,
    pub offset: Array1<f64>,
}

impl Layer {
    pub fn new(weight: Array2<f64>, offset: Array1<f64>) -> Result<Self> {
        if weight.nrows() != offset.len() {
            return Err(Error::DimensionMismatch {
                expected: weight.nrows(),
                got: offset.len(),
                context: "layer offset length",
            });
        }
        if weight.iter().any(|w| !w.is_finite()) || offset.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("layer parameters must be finite"));
        }
        Ok(Layer { weight, offset })
    }

    fn out_dim(&self) -> usize {
        self.weight.nrows()
    }

    fn in_dim(&self) -> usize {
        self.weight.ncols()
    }
}

/// A ReLU network; see module docs for the depth/width conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct ReluNetwork {
    layers: Vec<Layer>,
    final_layer_linear: bool,
}

/// Shape and magnitude summary of a network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkStats {
    pub depth: usize,
    pub width: usize,
    pub max_weight: f64,
    pub max_offset: f64,
}

impl ReluNetwork {
    pub fn new(layers: Vec<Layer>, final_layer_linear: bool) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("a network needs at least one layer"));
        }
        for w in layers.windows(2) {
            if w[1].in_dim() != w[0].out_dim() {
                return Err(Error::DimensionMismatch {
                    expected: w[0].out_dim(),
                    got: w[1].in_dim(),
                    context: "consecutive layer shapes",
                });
            }
        }
        Ok(ReluNetwork {
            layers,
            final_layer_linear,
        })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn final_layer_linear(&self) -> bool {
        self.final_layer_linear
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().out_dim()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Evaluate the network at `z`.
    pub fn forward(&self, z: &[f64]) -> Result<Array1<f64>> {
        if z.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: z.len(),
                context: "network input",
            });
        }
        let mut v = Array1::from(z.to_vec());
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            v = layer.weight.dot(&v) + &layer.offset;
            if l != last || !self.final_layer_linear {
                v.mapv_inplace(|x| x.max(0.0));
            }
        }
        Ok(v)
    }

    /// Scalar convenience for 1-in/1-out networks.
    pub fn forward_scalar(&self, z: f64) -> Result<f64> {
        let out = self.forward(&[z])?;
        if out.len() != 1 {
            return Err(Error::Undefined(format!(
                "forward_scalar on a network with {} outputs",
                out.len()
            )));
        }
        Ok(out[0])
    }

    pub fn stats(&self) -> NetworkStats {
        let mut max_weight: f64 = 0.0;
        let mut max_offset: f64 = 0.0;
        let mut width = 0;
        for layer in &self.layers {
            width = width.max(layer.out_dim());
            for w in layer.weight.iter() {
                max_weight = max_weight.max(w.abs());
            }
            for b in layer.offset.iter() {
                max_offset = max_offset.max(b.abs());
            }
        }
        NetworkStats {
            depth: self.depth(),
            width,
            max_weight,
            max_offset,
        }
    }

    /// Count linear pieces of a scalar network on [lo, hi] by slope changes
    /// of secants over a uniform grid with `grid_n` intervals. Returns the
    /// breakpoint count including both endpoints, so an affine function
    /// reports 2 and a tent reports 3. Breakpoints closer than one grid cell
    /// merge; pick `grid_n` well above the expected piece count.
    pub fn breakpoint_count(&self, lo: f64, hi: f64, grid_n: usize) -> Result<usize> {
        if self.input_dim() != 1 || self.output_dim() != 1 {
            return Err(Error::Undefined(
                "piece counting is defined for scalar networks only".into(),
            ));
        }
        if !(hi > lo) || grid_n < 4 {
            return Err(Error::invalid("need hi > lo and at least 4 grid cells"));
        }
        let h = (hi - lo) / grid_n as f64;
        let mut vals = Vec::with_capacity(grid_n + 1);
        for i in 0..=grid_n {
            vals.push(self.forward_scalar(lo + i as f64 * h)?);
        }
        let slopes: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let max_slope = slopes.iter().fold(0.0f64, |a, s| a.max(s.abs()));
        let tol = 1e-6 * (1.0 + max_slope);
        let mut interior = 0;
        let mut in_cluster = false;
        for w in slopes.windows(2) {
            if (w[1] - w[0]).abs() > tol {
                if !in_cluster {
                    interior += 1;
                }
                in_cluster = true;
            } else {
                in_cluster = false;
            }
        }
        Ok(interior + 2)
    }
}

/// Identity on d coordinates via the |z| gadget: z = relu(z) - relu(-z).
/// Two layers, hidden width 2d, affine final layer.
pub fn identity_network(dim: usize) -> ReluNetwork {
    let mut w1 = Array2::zeros((2 * dim, dim));
    let mut w2 = Array2::zeros((dim, 2 * dim));
    for i in 0..dim {
        w1[[2 * i, i]] = 1.0;
        w1[[2 * i + 1, i]] = -1.0;
        w2[[i, 2 * i]] = 1.0;
        w2[[i, 2 * i + 1]] = -1.0;
    }
    ReluNetwork {
        layers: vec![
            Layer { weight: w1, offset: Array1::zeros(2 * dim) },
            Layer { weight: w2, offset: Array1::zeros(dim) },
        ],
        final_layer_linear: true,
    }
}

/// outer after inner, function-exact; see module docs for the depth rule.
pub fn compose(outer: &ReluNetwork, inner: &ReluNetwork) -> Result<ReluNetwork> {
    if outer.input_dim() != inner.output_dim() {
        return Err(Error::DimensionMismatch {
            expected: inner.output_dim(),
            got: outer.input_dim(),
            context: "compose interface",
        });
    }
    let mut layers = inner.layers.clone();
    if inner.final_layer_linear {
        // fold the inner affine output into the outer first layer
        let tail = layers.pop().unwrap();
        let head = &outer.layers[0];
        let weight = head.weight.dot(&tail.weight);
        let offset = head.weight.dot(&tail.offset) + &head.offset;
        layers.push(Layer { weight, offset });
        layers.extend_from_slice(&outer.layers[1..]);
    } else {
        layers.extend_from_slice(&outer.layers);
    }
    ReluNetwork::new(layers, outer.final_layer_linear)
}

/// Extend `net` to exactly `depth` layers without changing its function.
/// Affine-ended networks gain identity gadgets (one layer per step);
/// rectified-ended networks gain plain identity layers, a no-op on their
/// non-negative outputs.
pub fn pad_to_depth(net: &ReluNetwork, depth: usize) -> Result<ReluNetwork> {
    if depth < net.depth() {
        return Err(Error::invalid(format!(
            "cannot pad depth {} down to {depth}",
            net.depth()
        )));
    }
    let mut out = net.clone();
    while out.depth() < depth {
        if out.final_layer_linear {
            out = compose(&identity_network(out.output_dim()), &out)?;
        } else {
            let d = out.output_dim();
            out.layers.push(Layer {
                weight: Array2::eye(d),
                offset: Array1::zeros(d),
            });
        }
    }
    Ok(out)
}

/// Give every network the same depth and the same kind of final layer so
/// they can be stacked layer by layer.
fn align(nets: &[ReluNetwork]) -> Result<Vec<ReluNetwork>> {
    if nets.is_empty() {
        return Err(Error::invalid("need at least one network"));
    }
    let mut nets: Vec<ReluNetwork> = nets.to_vec();
    if nets.iter().any(|n| n.final_layer_linear) {
        for n in nets.iter_mut() {
            if !n.final_layer_linear {
                // a rectified output is non-negative; copying it through an
                // affine identity changes nothing
                let d = n.output_dim();
                n.layers.push(Layer {
                    weight: Array2::eye(d),
                    offset: Array1::zeros(d),
                });
                n.final_layer_linear = true;
            }
        }
    }
    let depth = nets.iter().map(|n| n.depth()).max().unwrap();
    nets.iter().map(|n| pad_to_depth(n, depth)).collect()
}

fn stack(nets: &[ReluNetwork], shared_input: bool) -> Result<ReluNetwork> {
    let nets = align(nets)?;
    if shared_input {
        let d0 = nets[0].input_dim();
        if nets.iter().any(|n| n.input_dim() != d0) {
            return Err(Error::DimensionMismatch {
                expected: d0,
                got: nets.iter().map(|n| n.input_dim()).find(|d| *d != d0).unwrap(),
                context: "bundle input dimension",
            });
        }
    }
    let depth = nets[0].depth();
    let mut layers = Vec::with_capacity(depth);
    for l in 0..depth {
        let in_dims: Vec<usize> = nets.iter().map(|n| n.layers[l].in_dim()).collect();
        let out_dims: Vec<usize> = nets.iter().map(|n| n.layers[l].out_dim()).collect();
        let in_total = if l == 0 && shared_input {
            in_dims[0]
        } else {
            in_dims.iter().sum()
        };
        let out_total: usize = out_dims.iter().sum();
        let mut weight = Array2::zeros((out_total, in_total));
        let mut offset = Array1::zeros(out_total);
        let mut row = 0;
        let mut col = 0;
        for (ni, net) in nets.iter().enumerate() {
            let lw = &net.layers[l].weight;
            let c0 = if l == 0 && shared_input { 0 } else { col };
            for i in 0..lw.nrows() {
                for j in 0..lw.ncols() {
                    weight[[row + i, c0 + j]] = lw[[i, j]];
                }
                offset[row + i] = net.layers[l].offset[i];
            }
            row += out_dims[ni];
            if !(l == 0 && shared_input) {
                col += in_dims[ni];
            }
        }
        layers.push(Layer { weight, offset });
    }
    ReluNetwork::new(layers, nets[0].final_layer_linear)
}

/// Block-diagonal stack: inputs concatenate, outputs concatenate.
pub fn parallel(nets: &[ReluNetwork]) -> Result<ReluNetwork> {
    stack(nets, false)
}

/// Stack on one shared input: every branch reads the same coordinates,
/// outputs concatenate.
pub fn bundle(nets: &[ReluNetwork]) -> Result<ReluNetwork> {
    stack(nets, true)
}

/// Replace the final affine layer output `y` by `c y + d`. Free of depth
/// cost; requires an affine final layer.
pub fn affine_combine(net: &ReluNetwork, c: &Array2<f64>, d: &Array1<f64>) -> Result<ReluNetwork> {
    if !net.final_layer_linear {
        return Err(Error::Undefined(
            "affine_combine needs an affine final layer".into(),
        ));
    }
    if c.ncols() != net.output_dim() || c.nrows() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: net.output_dim(),
            got: c.ncols(),
            context: "affine_combine shape",
        });
    }
    let mut out = net.clone();
    let tail = out.layers.pop().unwrap();
    out.layers.push(Layer {
        weight: c.dot(&tail.weight),
        offset: c.dot(&tail.offset) + d,
    });
    Ok(out)
}

/// Pointwise sum of networks with identical input and output shapes.
pub fn sum(nets: &[ReluNetwork]) -> Result<ReluNetwork> {
    if nets.is_empty() {
        return Err(Error::invalid("need at least one network"));
    }
    let (din, dout) = (nets[0].input_dim(), nets[0].output_dim());
    for n in nets {
        if n.input_dim() != din || n.output_dim() != dout {
            return Err(Error::DimensionMismatch {
                expected: dout,
                got: n.output_dim(),
                context: "sum operand shape",
            });
        }
    }
    let stacked = bundle(nets)?;
    let stacked = if stacked.final_layer_linear() {
        stacked
    } else {
        // all-rectified operands: append one affine collector
        let d = stacked.output_dim();
        let mut s = stacked;
        s.layers.push(Layer {
            weight: Array2::eye(d),
            offset: Array1::zeros(d),
        });
        s.final_layer_linear = true;
        s
    };
    let mut c = Array2::zeros((dout, dout * nets.len()));
    for b in 0..nets.len() {
        for i in 0..dout {
            c[[i, b * dout + i]] = 1.0;
        }
    }
    affine_combine(&stacked, &c, &Array1::zeros(dout))
}
