//! Multiscale signed-pulse generator, one network per latent coordinate.
//!
//! Per copy the unit interval splits recursively: M = 2 n0/k0 branches per
//! level, k0 levels. A finest cell is addressed by its base-M digit string
//! d_1..d_k0 (most significant first); digit d at level l writes +/-xi into
//! block-l entry floor(d/2), sign + for even d. Every finest cell therefore
//! realizes a distinct signed pattern with exactly one active entry per
//! block, and the M^k0 cells enumerate all of them.
//!
//! The network realizes this map with trapezoid pulses: at level l and
//! entry q, a positive pulse occupies sub-interval 2q and a negative pulse
//! sub-interval 2q+1 of every level-l cell. Transitions have a fixed width
//! (a fraction of a finest cell), so all finest-cell midpoints land on
//! plateaus and take the idealized values exactly.
//!
//! Three builds trade depth for width. `Wide` writes each coordinate as one
//! flat piecewise-linear layer. `Deep` generates the per-level pulse trains
//! from tent-map sawtooths (pulse count doubles per pair of layers).
//! `Mixed` fixes the depth and fattens the per-stage sawtooth base instead.
//! Tooth counts round up to a power of two (or a power of the base); the
//! excess teeth fall at or beyond z = 1 and are harmless, since the map is
//! only specified on [0,1] per copy.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

use super::pwl::{build_from_pwl, PwlFunction};
use super::{affine_combine, bundle, compose, pad_to_depth, parallel, Layer, ReluNetwork};

/// Geometry of the per-copy recursive map.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursiveGenParams {
    /// independent copies; input dimension of the final network
    pub copies: usize,
    /// levels of recursion = active entries per copy
    pub k0: usize,
    /// outputs per copy; block length is n0/k0
    pub n0: usize,
    /// pulse amplitude
    pub xi: f64,
    /// trapezoid edge width as a fraction of a finest cell, in (0, 1/2)
    pub transition_width: f64,
    /// reject when n0/k0 falls below this (structural floor is 2)
    pub min_ratio: usize,
    /// force the per-stage tooth base in the mixed build
    pub mixed_base_override: Option<u64>,
}

impl RecursiveGenParams {
    pub fn new(copies: usize, k0: usize, n0: usize, xi: f64) -> Result<Self> {
        let p = RecursiveGenParams {
            copies,
            k0,
            n0,
            xi,
            transition_width: 0.25,
            min_ratio: 4,
            mixed_base_override: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_transition_width(mut self, w: f64) -> Result<Self> {
        self.transition_width = w;
        self.validate()?;
        Ok(self)
    }

    pub fn with_min_ratio(mut self, ratio: usize) -> Result<Self> {
        self.min_ratio = ratio;
        self.validate()?;
        Ok(self)
    }

    pub fn with_mixed_base(mut self, base: u64) -> Result<Self> {
        self.mixed_base_override = Some(base);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.copies == 0 || self.k0 == 0 || self.n0 == 0 {
            return Err(Error::invalid("copies, k0 and n0 must be positive"));
        }
        if self.n0 % self.k0 != 0 {
            return Err(Error::NotGroupSparse(format!(
                "n0 = {} is not a multiple of k0 = {}",
                self.n0, self.k0
            )));
        }
        if self.min_ratio < 2 {
            return Err(Error::invalid("min_ratio below the structural floor of 2"));
        }
        if self.n0 < 2 * self.k0 {
            // the per-cell geometry needs at least two entries per block
            return Err(Error::invalid(format!(
                "n0/k0 = {} below the structural floor of 2",
                self.n0 / self.k0
            )));
        }
        if !(self.xi > 0.0) || !self.xi.is_finite() {
            return Err(Error::invalid("amplitude must be positive and finite"));
        }
        if !(self.transition_width > 0.0 && self.transition_width < 0.5) {
            return Err(Error::invalid(
                "transition width must be a fraction of a finest cell in (0, 1/2)",
            ));
        }
        if let Some(b) = self.mixed_base_override {
            if b == 0 || !b.is_power_of_two() {
                return Err(Error::invalid("mixed base must be a power of two"));
            }
        }
        Ok(())
    }

    /// Build-time precondition: the block length must clear the configured
    /// floor (default 4; lower it deliberately via [`Self::with_min_ratio`]).
    fn check_ratio_floor(&self) -> Result<()> {
        if self.n0 < self.min_ratio * self.k0 {
            return Err(Error::invalid(format!(
                "n0/k0 = {} below the configured floor {}",
                self.n0 / self.k0,
                self.min_ratio
            )));
        }
        Ok(())
    }

    /// Entries per block.
    pub fn block_len(&self) -> usize {
        self.n0 / self.k0
    }

    /// Branching factor M = 2 n0 / k0: signed sub-intervals per cell.
    pub fn branching(&self) -> usize {
        2 * self.block_len()
    }

    /// Side length of a finest cell, M^{-k0}.
    pub fn finest_cell(&self) -> f64 {
        (self.branching() as f64).powi(-(self.k0 as i32))
    }

    /// Finest cells per copy = distinct signed patterns per copy.
    pub fn pattern_count(&self) -> Result<u128> {
        (self.branching() as u128)
            .checked_pow(self.k0 as u32)
            .ok_or_else(|| Error::invalid("pattern count overflows"))
    }

    pub fn output_dim(&self) -> usize {
        self.n0 * self.copies
    }

    /// Absolute trapezoid edge width in z units.
    fn edge(&self) -> f64 {
        self.transition_width * self.finest_cell()
    }

    fn digits(&self, cell: u128) -> Result<Vec<usize>> {
        let m = self.branching() as u128;
        if cell >= self.pattern_count()? {
            return Err(Error::invalid(format!("cell index {cell} out of range")));
        }
        Ok((1..=self.k0)
            .map(|l| ((cell / m.pow((self.k0 - l) as u32)) % m) as usize)
            .collect())
    }
}

/// Depth/width trade-off of [`build_recursive_generator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// one hidden layer, width exponential in k0
    Wide,
    /// tent-map sawtooths, depth ~ 2 k0 log2(M), width linear in output
    Deep,
    /// fixed even depth >= 4; per-stage sawtooth base grows to compensate
    Mixed { depth: usize },
}

/// Closed-form resource budget a build is asserted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeBudget {
    pub depth: usize,
    pub width: u128,
}

fn ceil_log2(x: u128) -> u32 {
    if x <= 1 {
        0
    } else {
        128 - (x - 1).leading_zeros()
    }
}

/// Composed tooth count of `stages` sawtooth stages with `base` teeth each,
/// saturating on overflow.
fn composed_teeth(stages: u32, base: u64, target_hint: u128) -> u128 {
    let mut teeth: u128 = 1;
    for s in 0..stages {
        let factor = if s == 0 { base as u128 } else { 2 * base as u128 };
        teeth = match teeth.checked_mul(factor) {
            Some(t) => t,
            None => return target_hint.saturating_mul(2),
        };
    }
    teeth
}

/// Smallest power-of-two base whose composed tooth count reaches `target`.
fn pick_base(stages: u32, target: u128) -> u64 {
    let mut base = 1u64;
    while composed_teeth(stages, base, target) < target {
        base *= 2;
    }
    base
}

fn mixed_stage_count(depth: usize) -> Result<u32> {
    if depth < 4 || depth % 2 != 0 {
        return Err(Error::invalid(
            "mixed regime depth must be even and at least 4",
        ));
    }
    Ok(((depth - 2) / 2) as u32)
}

/// Cells at recursion level l (1-based): M^{l-1}.
fn cells_at(p: &RecursiveGenParams, level: usize) -> Result<u128> {
    (p.branching() as u128)
        .checked_pow((level - 1) as u32)
        .ok_or_else(|| Error::invalid("cell count overflows"))
}

pub fn regime_budget(p: &RecursiveGenParams, regime: &Regime) -> Result<RegimeBudget> {
    p.validate()?;
    p.check_ratio_floor()?;
    let n = p.output_dim() as u128;
    match regime {
        Regime::Wide => Ok(RegimeBudget {
            depth: 2,
            width: 8 * p.copies as u128 * p.pattern_count()?,
        }),
        Regime::Deep => {
            let finest = cells_at(p, p.k0)?;
            Ok(RegimeBudget {
                depth: 2 * ceil_log2(finest) as usize + 4,
                width: 6 * n,
            })
        }
        Regime::Mixed { depth } => {
            let stages = mixed_stage_count(*depth)?;
            let finest = cells_at(p, p.k0)?;
            let base = p
                .mixed_base_override
                .unwrap_or_else(|| pick_base(stages, finest));
            Ok(RegimeBudget {
                depth: *depth,
                width: n * 2 * (2 * base as u128 + 1),
            })
        }
    }
}

/// z with each copy at the midpoint of its requested finest cell.
pub fn finest_cell_midpoint(p: &RecursiveGenParams, cells: &[u128]) -> Result<Vec<f64>> {
    if cells.len() != p.copies {
        return Err(Error::DimensionMismatch {
            expected: p.copies,
            got: cells.len(),
            context: "one cell index per copy",
        });
    }
    let w = p.finest_cell();
    cells
        .iter()
        .map(|c| {
            p.digits(*c)?;
            Ok((*c as f64 + 0.5) * w)
        })
        .collect()
}

/// The signed pattern the map takes at that midpoint.
pub fn idealized_pattern(p: &RecursiveGenParams, cells: &[u128]) -> Result<Vec<f64>> {
    if cells.len() != p.copies {
        return Err(Error::DimensionMismatch {
            expected: p.copies,
            got: cells.len(),
            context: "one cell index per copy",
        });
    }
    let b0 = p.block_len();
    let mut x = vec![0.0; p.output_dim()];
    for (i, cell) in cells.iter().enumerate() {
        for (l, d) in p.digits(*cell)?.iter().enumerate() {
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            x[i * p.n0 + l * b0 + d / 2] = sign * p.xi;
        }
    }
    Ok(x)
}

/// Sawtooth stage with `base` teeth on [0,1], zero outside, rectified
/// output; width 2 base + 1.
fn saw_stage(base: u64) -> Result<ReluNetwork> {
    let teeth = base as usize;
    let mut bp = Vec::with_capacity(2 * teeth + 1);
    let mut vals = Vec::with_capacity(2 * teeth + 1);
    for j in 0..=(2 * teeth) {
        bp.push(j as f64 / (2 * teeth) as f64);
        vals.push((j % 2) as f64);
    }
    let net = build_from_pwl(&PwlFunction::new(bp, vals, true, true)?)?;
    // the piecewise form is non-negative everywhere, so rectifying the
    // output changes nothing and lets stages chain without an affine seam
    ReluNetwork::new(net.layers().to_vec(), false)
}

/// Reparametrize a scalar-input network: z |-> scale*z + shift.
fn with_input_affine(net: &ReluNetwork, scale: f64, shift: f64) -> Result<ReluNetwork> {
    if net.input_dim() != 1 {
        return Err(Error::Undefined("input reparametrization is scalar-only".into()));
    }
    let mut layers = net.layers().to_vec();
    let first = &mut layers[0];
    let col: Vec<f64> = (0..first.weight.nrows()).map(|i| first.weight[[i, 0]]).collect();
    for (i, w) in col.iter().enumerate() {
        first.weight[[i, 0]] = w * scale;
        first.offset[i] += w * shift;
    }
    ReluNetwork::new(layers, net.final_layer_linear())
}

/// Pulse train for one (level, entry, sign): teeth aligned so each level-l
/// cell's chosen sub-interval carries one trapezoid of amplitude +/-xi.
fn pulse_chain(
    p: &RecursiveGenParams,
    level: usize,
    entry: usize,
    negative: bool,
    stages: u32,
    base: u64,
) -> Result<ReluNetwork> {
    let m = p.branching() as f64;
    let cells = cells_at(p, level)?;
    let teeth = composed_teeth(stages, base, cells);
    if teeth < cells {
        return Err(Error::invalid(format!(
            "{stages} stages of base {base} give {teeth} teeth, fewer than \
             the {cells} cells at level {level}"
        )));
    }
    let pitch = m.powi(-(level as i32 - 1));
    let span = teeth as f64 * pitch;
    let sub = 2 * entry + usize::from(negative);
    let shift = pitch * ((sub as f64 + 0.5) / m - 0.5);

    let mut net = with_input_affine(&saw_stage(base)?, 1.0 / span, -shift / span)?;
    for _ in 1..stages {
        net = compose(&saw_stage(base)?, &net)?;
    }

    let theta1 = 1.0 - 1.0 / m;
    let theta2 = theta1 + 2.0 * p.edge() / pitch;
    let amp = if negative { -p.xi } else { p.xi };
    let w1 = Array2::from_shape_vec((2, 1), vec![1.0, 1.0]).unwrap();
    let b1 = Array1::from(vec![-theta1, -theta2]);
    let gain = amp / (theta2 - theta1);
    let w2 = Array2::from_shape_vec((1, 2), vec![gain, -gain]).unwrap();
    let shaper = ReluNetwork::new(
        vec![
            Layer { weight: w1, offset: b1 },
            Layer { weight: w2, offset: Array1::zeros(1) },
        ],
        true,
    )?;
    compose(&shaper, &net)
}

/// Flat per-coordinate pulse train as an explicit piecewise-linear layer.
fn wide_coordinate(p: &RecursiveGenParams, level: usize, entry: usize) -> Result<ReluNetwork> {
    let m = p.branching();
    let cells = cells_at(p, level)?;
    let pitch = (m as f64).powi(-(level as i32 - 1));
    let cw = pitch / m as f64;
    let tau = p.edge();
    let mut bp = Vec::new();
    let mut vals = Vec::new();
    for c in 0..cells {
        let a = c as f64 * pitch + (2 * entry) as f64 * cw;
        bp.extend_from_slice(&[
            a,
            a + tau,
            a + cw - tau,
            a + cw,
            a + cw + tau,
            a + 2.0 * cw - tau,
            a + 2.0 * cw,
        ]);
        vals.extend_from_slice(&[0.0, p.xi, p.xi, 0.0, -p.xi, -p.xi, 0.0]);
    }
    build_from_pwl(&PwlFunction::new(bp, vals, true, true)?)
}

/// Build the k-copy generator in the requested regime. Input dim = copies,
/// output dim = n0 * copies; see module docs for the map itself.
pub fn build_recursive_generator(
    p: &RecursiveGenParams,
    regime: &Regime,
) -> Result<ReluNetwork> {
    p.validate()?;
    p.check_ratio_floor()?;
    let b0 = p.block_len();
    let copy = match regime {
        Regime::Wide => {
            let mut coords = Vec::with_capacity(p.n0);
            for level in 1..=p.k0 {
                for entry in 0..b0 {
                    coords.push(wide_coordinate(p, level, entry)?);
                }
            }
            bundle(&coords)?
        }
        Regime::Deep | Regime::Mixed { .. } => {
            let mut chains = Vec::with_capacity(2 * p.n0);
            for level in 1..=p.k0 {
                let cells = cells_at(p, level)?;
                let (stages, base) = match regime {
                    Regime::Deep => (ceil_log2(cells) + 1, 1),
                    Regime::Mixed { depth } => {
                        let stages = mixed_stage_count(*depth)?;
                        let base = p
                            .mixed_base_override
                            .unwrap_or_else(|| pick_base(stages, cells));
                        (stages, base)
                    }
                    Regime::Wide => unreachable!("outer match sends Wide elsewhere"),
                };
                for entry in 0..b0 {
                    chains.push(pulse_chain(p, level, entry, false, stages, base)?);
                    chains.push(pulse_chain(p, level, entry, true, stages, base)?);
                }
            }
            let depth = chains.iter().map(|c| c.depth()).max().unwrap();
            let chains: Vec<ReluNetwork> = chains
                .iter()
                .map(|c| pad_to_depth(c, depth))
                .collect::<Result<_>>()?;
            let bundled = bundle(&chains)?;
            // adjacent chain pairs (+,-) sum into one output coordinate
            let mut pair = Array2::zeros((p.n0, 2 * p.n0));
            for t in 0..p.n0 {
                pair[[t, 2 * t]] = 1.0;
                pair[[t, 2 * t + 1]] = 1.0;
            }
            affine_combine(&bundled, &pair, &Array1::zeros(p.n0))?
        }
    };
    let copies: Vec<ReluNetwork> = (0..p.copies).map(|_| copy.clone()).collect();
    parallel(&copies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeSet;

    fn small() -> RecursiveGenParams {
        RecursiveGenParams::new(1, 2, 4, 1.0)
            .unwrap()
            .with_min_ratio(2)
            .unwrap()
    }

    #[test]
    fn validation() {
        assert!(RecursiveGenParams::new(1, 2, 5, 1.0).is_err());
        assert!(RecursiveGenParams::new(1, 2, 2, 1.0).is_err()); // one entry per block
        assert!(RecursiveGenParams::new(1, 1, 4, 0.0).is_err());
        assert!(small().with_transition_width(0.5).is_err());
        assert!(small().with_min_ratio(1).is_err());
        assert!(small().with_mixed_base(3).is_err());
        assert!(RecursiveGenParams::new(1, 1, 4, 1.0).is_ok());
        // ratio 2 constructs, but only builds once the floor is lowered
        let tight = RecursiveGenParams::new(1, 2, 4, 1.0).unwrap();
        assert!(build_recursive_generator(&tight, &Regime::Wide).is_err());
        assert!(regime_budget(&tight, &Regime::Wide).is_err());
        let eased = tight.with_min_ratio(2).unwrap();
        assert!(build_recursive_generator(&eased, &Regime::Wide).is_ok());
    }

    #[test]
    fn geometry_counts() {
        let p = small();
        assert_eq!(p.branching(), 4);
        assert_eq!(p.pattern_count().unwrap(), 16);
        assert_abs_diff_eq!(p.finest_cell(), 1.0 / 16.0);
        assert_eq!(p.digits(1).unwrap(), vec![0, 1]);
        assert_eq!(p.digits(14).unwrap(), vec![3, 2]);
        assert!(p.digits(16).is_err());
    }

    #[test]
    fn first_two_cells_give_frozen_patterns() {
        let p = small();
        // cell 0 midpoint 1/32: level 1 digit 0 -> +xi at entry 0;
        // level 2 digit 0 -> +xi at entry 2
        assert_abs_diff_eq!(finest_cell_midpoint(&p, &[0]).unwrap()[0], 1.0 / 32.0);
        assert_eq!(idealized_pattern(&p, &[0]).unwrap(), vec![1.0, 0.0, 1.0, 0.0]);
        // cell 1 midpoint 3/32 flips the finest sign
        assert_abs_diff_eq!(finest_cell_midpoint(&p, &[1]).unwrap()[0], 3.0 / 32.0);
        assert_eq!(idealized_pattern(&p, &[1]).unwrap(), vec![1.0, 0.0, -1.0, 0.0]);
    }

    fn check_midpoints(p: &RecursiveGenParams, net: &ReluNetwork) {
        let total = p.pattern_count().unwrap();
        for c in 0..total {
            let cells = vec![c; p.copies];
            let z = finest_cell_midpoint(p, &cells).unwrap();
            let want = idealized_pattern(p, &cells).unwrap();
            let got = net.forward(&z).unwrap();
            for (g, w) in got.iter().zip(&want) {
                assert_abs_diff_eq!(g, w, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn wide_matches_idealized_midpoints() {
        let p = small();
        let net = build_recursive_generator(&p, &Regime::Wide).unwrap();
        assert_eq!(net.depth(), 2);
        check_midpoints(&p, &net);
    }

    #[test]
    fn deep_matches_idealized_midpoints() {
        let p = small();
        let net = build_recursive_generator(&p, &Regime::Deep).unwrap();
        check_midpoints(&p, &net);
    }

    #[test]
    fn mixed_matches_idealized_midpoints() {
        let p = small();
        for depth in [4usize, 6, 8] {
            let net = build_recursive_generator(&p, &Regime::Mixed { depth }).unwrap();
            assert_eq!(net.depth(), depth);
            check_midpoints(&p, &net);
        }
    }

    #[test]
    fn midpoint_patterns_are_a_bijection() {
        let p = small();
        let net = build_recursive_generator(&p, &Regime::Deep).unwrap();
        let mut seen = BTreeSet::new();
        for c in 0..p.pattern_count().unwrap() {
            let z = finest_cell_midpoint(&p, &[c]).unwrap();
            let out = net.forward(&z).unwrap();
            let signature: Vec<i8> = out
                .iter()
                .map(|v| {
                    if *v > p.xi / 2.0 {
                        1
                    } else if *v < -p.xi / 2.0 {
                        -1
                    } else {
                        assert!(v.abs() < 1e-9, "ambiguous output {v}");
                        0
                    }
                })
                .collect();
            assert!(seen.insert(signature), "pattern repeated at cell {c}");
        }
        assert_eq!(seen.len() as u128, p.pattern_count().unwrap());
    }

    #[test]
    fn two_copies_act_independently() {
        let p = RecursiveGenParams::new(2, 1, 4, 0.5).unwrap();
        let net = build_recursive_generator(&p, &Regime::Deep).unwrap();
        assert_eq!(net.input_dim(), 2);
        assert_eq!(net.output_dim(), 8);
        let z = finest_cell_midpoint(&p, &[2, 5]).unwrap();
        let want = idealized_pattern(&p, &[2, 5]).unwrap();
        let got = net.forward(&z).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert_abs_diff_eq!(g, w, epsilon = 1e-9);
        }
    }

    #[test]
    fn budgets_hold_for_all_regimes() {
        for (k0, n0) in [(1usize, 4usize), (2, 4), (2, 6), (3, 6)] {
            let p = RecursiveGenParams::new(2, k0, n0, 1.0)
                .unwrap()
                .with_min_ratio(2)
                .unwrap();
            for regime in [Regime::Wide, Regime::Deep, Regime::Mixed { depth: 6 }] {
                let budget = regime_budget(&p, &regime).unwrap();
                let stats = build_recursive_generator(&p, &regime).unwrap().stats();
                assert!(
                    stats.depth <= budget.depth && stats.width as u128 <= budget.width,
                    "k0={k0} n0={n0} {regime:?}: {stats:?} vs {budget:?}"
                );
                if let Regime::Mixed { depth } = regime {
                    assert_eq!(stats.depth, depth);
                }
            }
        }
    }

    #[test]
    fn deep_depth_follows_closed_form() {
        for (k0, n0) in [(1usize, 4usize), (2, 4), (3, 6)] {
            let p = RecursiveGenParams::new(1, k0, n0, 1.0)
                .unwrap()
                .with_min_ratio(2)
                .unwrap();
            let m = p.branching() as u128;
            let want = 2 * ceil_log2(m.pow((k0 - 1) as u32)) as usize + 4;
            let net = build_recursive_generator(&p, &Regime::Deep).unwrap();
            assert_eq!(net.depth(), want);
        }
    }

    #[test]
    fn transitions_reach_zero_at_sub_interval_boundaries() {
        let p = small();
        for regime in [Regime::Wide, Regime::Deep] {
            let net = build_recursive_generator(&p, &regime).unwrap();
            // boundary between cells 0 and 1 where the finest sign flips:
            // the finest-level coordinate must vanish
            let out = net.forward(&[1.0 / 16.0]).unwrap();
            assert!(out[2].abs() < 1e-9, "{regime:?}: {}", out[2]);
            // level-1 coordinate is mid-plateau there
            assert_abs_diff_eq!(out[0], p.xi, epsilon = 1e-9);
        }
    }

    #[test]
    fn mixed_base_search_and_override() {
        // level-2 cells = 4, one stage at depth 4: base must reach 4 teeth
        let p = small();
        let auto = regime_budget(&p, &Regime::Mixed { depth: 4 }).unwrap();
        assert_eq!(auto.width, 4 * 2 * (2 * 4 + 1));
        let forced = small().with_mixed_base(8).unwrap();
        let b = regime_budget(&forced, &Regime::Mixed { depth: 4 }).unwrap();
        assert_eq!(b.width, 4 * 2 * (2 * 8 + 1));
        check_midpoints(
            &forced,
            &build_recursive_generator(&forced, &Regime::Mixed { depth: 4 }).unwrap(),
        );
        // an undersized forced base is rejected
        let tiny = small().with_mixed_base(1).unwrap();
        assert!(build_recursive_generator(&tiny, &Regime::Mixed { depth: 4 }).is_err());
    }
}
