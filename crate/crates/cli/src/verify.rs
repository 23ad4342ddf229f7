//! Cell bodies for the three verification kinds. Each body either fails to
//! construct (the dispatcher turns parameter-domain errors into skips), or
//! returns measured metrics plus an optional failure message when a
//! measurement misses its budget.

use gslab_core::bounds::{self, oracles};
use gslab_core::model::{GenModelParams, SignedSupport};
use gslab_core::relu::recursive::{
    build_recursive_generator, regime_budget, RecursiveGenParams, Regime,
};
use gslab_core::relu::{deep::build_double_triangle_deep, sawtooth::build_sawtooth, ReluNetwork};
use gslab_core::rng::{PhiloxStream, Purpose, StreamId};
use gslab_core::{Error, Result};
use std::collections::BTreeSet;

/// Forward/direct agreement tolerance for exact constructions.
pub const EQ_TOL: f64 = 1e-9;
/// Magnitude budgets every emitted network must respect.
pub const WEIGHT_BUDGET: f64 = 4.0;
/// Relative slack on floating-point inequality checks.
pub const FP_SLACK: f64 = 1e-12;
/// Pattern enumerations above this are skipped, not truncated.
pub const PATTERN_CAP: u128 = 1 << 16;
/// Grid used for brute-force breakpoint enumeration.
pub const BREAKPOINT_GRID: usize = 1 << 16;

#[derive(Debug)]
pub struct CellBody {
    pub metrics: Vec<(&'static str, String)>,
    pub failure: Option<String>,
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn max_forward_deviation(net: &ReluNetwork, p: &GenModelParams, z: &[f64]) -> Result<f64> {
    let out = net.forward(z)?;
    let direct = p.generate(z)?;
    Ok(out
        .iter()
        .zip(direct.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Deep construction: network output equals the direct generator on a per-
/// coordinate sweep (64 points per sub-interval, other coordinates held at
/// random draws) plus random full points; weight/offset budgets hold.
pub fn deep_cell(n: usize, k: usize, r: f64, x_max: f64, seed: u64, stream: u64) -> Result<CellBody> {
    let p = GenModelParams::new(n, k, r, x_max)?;
    let net = build_double_triangle_deep(&p)?;
    let b = n / k;
    let ell = 2.0 * r / b as f64;
    let mut rng = PhiloxStream::new(seed, StreamId::new(Purpose::Generic, stream));
    let mut max_err: f64 = 0.0;
    for block in 0..k {
        let mut z: Vec<f64> = (0..k).map(|_| rng.next_in(-r, r)).collect();
        for sub in 0..b {
            for j in 0..64 {
                z[block] = -r + (sub as f64 + (j as f64 + 0.5) / 64.0) * ell;
                max_err = max_err.max(max_forward_deviation(&net, &p, &z)?);
            }
        }
    }
    for _ in 0..256 {
        let z: Vec<f64> = (0..k).map(|_| rng.next_in(-r, r)).collect();
        max_err = max_err.max(max_forward_deviation(&net, &p, &z)?);
    }
    let stats = net.stats();
    let offset_budget = 4.0 * r;
    let mut failure = None;
    if max_err > EQ_TOL {
        failure = Some(format!("forward deviates from direct map by {max_err:e}"));
    } else if stats.max_weight > WEIGHT_BUDGET {
        failure = Some(format!("weight {} above budget {WEIGHT_BUDGET}", stats.max_weight));
    } else if stats.max_offset > offset_budget {
        failure = Some(format!("offset {} above budget {offset_budget}", stats.max_offset));
    }
    Ok(CellBody {
        metrics: vec![
            ("max_abs_err", num(max_err)),
            ("max_weight", num(stats.max_weight)),
            ("max_offset", num(stats.max_offset)),
            ("depth", stats.depth.to_string()),
            ("width", stats.width.to_string()),
        ],
        failure,
    })
}

/// Sawtooth accounting: exactly 2R+1 breakpoints on [0,1] by brute-force
/// enumeration, width at most 3, depth at most 2 ceil(log2 R) + 2.
pub fn sawtooth_cell(teeth: u64) -> Result<CellBody> {
    let net = build_sawtooth(teeth)?;
    let breakpoints = net.breakpoint_count(0.0, 1.0, BREAKPOINT_GRID)?;
    let stats = net.stats();
    let expected = 2 * teeth as usize + 1;
    let depth_budget = 2 * (64 - (teeth.max(1) - 1).leading_zeros() as usize).min(64) + 2;
    let mut failure = None;
    if breakpoints != expected {
        failure = Some(format!("{breakpoints} breakpoints, expected {expected}"));
    } else if stats.width > 3 {
        failure = Some(format!("width {} above budget 3", stats.width));
    } else if stats.depth > depth_budget {
        failure = Some(format!("depth {} above budget {depth_budget}", stats.depth));
    }
    Ok(CellBody {
        metrics: vec![
            ("breakpoints", breakpoints.to_string()),
            ("expected_breakpoints", expected.to_string()),
            ("depth", stats.depth.to_string()),
            ("depth_budget", depth_budget.to_string()),
            ("width", stats.width.to_string()),
        ],
        failure,
    })
}

/// Recursive construction: the finest-cell midpoints hit every signed
/// group-sparse pattern exactly once, the network agrees with the idealized
/// pattern there, and depth/width stay within the regime's closed form.
pub fn recursive_cell(
    k0: usize,
    n0: usize,
    regime: &Regime,
    xi: f64,
    min_ratio: Option<usize>,
) -> Result<CellBody> {
    let mut p = RecursiveGenParams::new(1, k0, n0, xi)?;
    if let Some(mr) = min_ratio {
        p = p.with_min_ratio(mr)?;
    }
    let count = p.pattern_count()?;
    if count > PATTERN_CAP {
        return Err(Error::EnumerationCap {
            size: count,
            cap: PATTERN_CAP,
        });
    }
    let budget = regime_budget(&p, regime)?;
    let net = build_recursive_generator(&p, regime)?;
    let b0 = n0 / k0;

    let quantize = |vals: &mut dyn Iterator<Item = f64>| -> Vec<i64> {
        vals.map(|v| (v / xi).round() as i64).collect()
    };
    let mut expected: BTreeSet<Vec<i64>> = BTreeSet::new();
    for rank in 0..SignedSupport::count(k0, b0) {
        let sig = SignedSupport::from_rank(rank, k0, b0).materialize(b0, xi);
        expected.insert(quantize(&mut sig.values().iter().copied()));
    }

    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut max_err: f64 = 0.0;
    let mut duplicate = None;
    for idx in 0..count {
        let z = gslab_core::relu::recursive::finest_cell_midpoint(&p, &[idx])?;
        let out = net.forward(&z)?;
        let ideal = gslab_core::relu::recursive::idealized_pattern(&p, &[idx])?;
        let err = out
            .iter()
            .zip(&ideal)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        max_err = max_err.max(err);
        if !seen.insert(quantize(&mut out.iter().copied())) {
            duplicate = Some(idx);
        }
    }
    let stats = net.stats();
    let mut failure = None;
    if let Some(idx) = duplicate {
        failure = Some(format!("midpoint {idx} repeats an earlier pattern"));
    } else if seen != expected {
        failure = Some(format!(
            "pattern sets differ: {} produced vs {} enumerated",
            seen.len(),
            expected.len()
        ));
    } else if max_err > EQ_TOL {
        failure = Some(format!("midpoint output off ideal pattern by {max_err:e}"));
    } else if stats.depth > budget.depth {
        failure = Some(format!("depth {} above budget {}", stats.depth, budget.depth));
    } else if (stats.width as u128) > budget.width {
        failure = Some(format!("width {} above budget {}", stats.width, budget.width));
    }
    Ok(CellBody {
        metrics: vec![
            ("patterns", count.to_string()),
            ("max_abs_err", num(max_err)),
            ("depth", stats.depth.to_string()),
            ("depth_budget", budget.depth.to_string()),
            ("width", stats.width.to_string()),
            ("width_budget", budget.width.to_string()),
        ],
        failure,
    })
}

/// Slope law: the empirical expansion ratio over random latent pairs never
/// exceeds 2 n x_max / (k r), and same-piece pairs get within 0.1% of it.
pub fn lipschitz_cell(
    n: usize,
    k: usize,
    r: f64,
    x_max: f64,
    pairs: usize,
    seed: u64,
    stream: u64,
) -> Result<CellBody> {
    let p = GenModelParams::new(n, k, r, x_max)?;
    let bound = 2.0 * n as f64 * x_max / (k as f64 * r);
    let mut rng = PhiloxStream::new(seed, StreamId::new(Purpose::Panel, stream));
    let mut sup: f64 = 0.0;
    for _ in 0..pairs {
        let z: Vec<f64> = (0..k).map(|_| rng.next_in(-r, r)).collect();
        let w: Vec<f64> = (0..k).map(|_| rng.next_in(-r, r)).collect();
        let dz2: f64 = z.iter().zip(&w).map(|(a, b)| (a - b) * (a - b)).sum();
        if dz2 == 0.0 {
            continue;
        }
        let gz = p.generate(&z)?;
        let gw = p.generate(&w)?;
        let dx2: f64 = gz
            .values()
            .iter()
            .zip(gw.values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        sup = sup.max((dx2 / dz2).sqrt());
    }
    // same linear piece in every block: the first rising quarter-segment
    let ell = 2.0 * r / (n / k) as f64;
    let z: Vec<f64> = vec![-r + ell / 8.0; k];
    let w: Vec<f64> = vec![-r + ell / 8.0 + ell / 100.0; k];
    let gz = p.generate(&z)?;
    let gw = p.generate(&w)?;
    let dx2: f64 = gz
        .values()
        .iter()
        .zip(gw.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let dz2: f64 = z.iter().zip(&w).map(|(a, b)| (a - b) * (a - b)).sum();
    let adversarial = (dx2 / dz2).sqrt();

    let mut failure = None;
    if sup > bound * (1.0 + FP_SLACK) {
        failure = Some(format!("observed ratio {sup} above bound {bound}"));
    } else if adversarial < 0.999 * bound {
        failure = Some(format!(
            "same-piece pair reaches only {adversarial} of bound {bound}"
        ));
    }
    Ok(CellBody {
        metrics: vec![
            ("lipschitz_bound", num(bound)),
            ("sup_ratio", num(sup)),
            ("adversarial_ratio", num(adversarial)),
            ("pairs", pairs.to_string()),
        ],
        failure,
    })
}

/// Combinatorics of the signed-support family: exact size against the
/// closed form, exact neighborhood count against the analytic bound, the
/// packing-ratio inequality, and isotropy of the family covariance.
pub fn packing_cell(n: usize, k: usize, cap: u128) -> Result<CellBody> {
    let stats = bounds::packing_stats(n, k)?;
    let b = n / k;
    let count = SignedSupport::count(k, b);
    if count > cap {
        return Err(Error::EnumerationCap { size: count, cap });
    }
    let formula = 2u128.pow(k as u32) * (b as u128).pow(k as u32);
    let nmax = oracles::nmax_oracle(n, k, k as f64 / 2.0, cap)?;
    let log_v = (count as f64).ln();
    let log_nmax = (nmax as f64).ln();
    let ratio_lhs = log_v - log_nmax;
    let cov_dev = oracles::cov_deviation(n, k, cap)?;

    let mut failure = None;
    if count != formula {
        failure = Some(format!("family size {count} not equal to closed form {formula}"));
    } else if log_nmax > stats.log_nmax_bound + FP_SLACK {
        failure = Some(format!(
            "exact log neighborhood {log_nmax} above analytic bound {}",
            stats.log_nmax_bound
        ));
    } else if ratio_lhs < stats.ratio_bound - FP_SLACK {
        failure = Some(format!(
            "packing ratio {ratio_lhs} below required {}",
            stats.ratio_bound
        ));
    } else if cov_dev > 1e-12 {
        failure = Some(format!("covariance off isotropy by {cov_dev:e}"));
    }
    Ok(CellBody {
        metrics: vec![
            ("family_size", count.to_string()),
            ("family_size_formula", formula.to_string()),
            ("nmax_exact", nmax.to_string()),
            ("log_v", num(log_v)),
            ("log_nmax_exact", num(log_nmax)),
            ("log_nmax_bound", num(stats.log_nmax_bound)),
            ("ratio_lhs", num(ratio_lhs)),
            ("ratio_bound", num(stats.ratio_bound)),
            ("cov_deviation", num(cov_dev)),
        ],
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deep_cell_passes_at_small_size() {
        let body = deep_cell(8, 2, 1.0, 1.0, 11, 0).unwrap();
        assert!(body.failure.is_none(), "{:?}", body.failure);
        let err: f64 = body.metrics[0].1.parse().unwrap();
        assert!(err <= EQ_TOL);
    }

    #[test]
    fn sawtooth_cell_counts_teeth() {
        let body = sawtooth_cell(4).unwrap();
        assert!(body.failure.is_none(), "{:?}", body.failure);
        assert_eq!(body.metrics[0], ("breakpoints", "9".to_string()));
    }

    #[test]
    fn recursive_cell_bijects() {
        let body = recursive_cell(2, 6, &Regime::Deep, 1.0, Some(2)).unwrap();
        assert!(body.failure.is_none(), "{:?}", body.failure);
        assert_eq!(body.metrics[0], ("patterns", "36".to_string()));
    }

    #[test]
    fn lipschitz_cell_flags_nothing_at_base_tuple() {
        let body = lipschitz_cell(8, 2, 1.0, 1.0, 2000, 5, 0).unwrap();
        assert!(body.failure.is_none(), "{:?}", body.failure);
        let bound: f64 = body.metrics[0].1.parse().unwrap();
        assert_eq!(bound, 8.0);
    }

    #[test]
    fn packing_cell_is_exact_at_16_2() {
        let body = packing_cell(16, 2, 1 << 20).unwrap();
        assert!(body.failure.is_none(), "{:?}", body.failure);
        assert_eq!(body.metrics[0], ("family_size", "256".to_string()));
        assert_eq!(body.metrics[2], ("nmax_exact", "3".to_string()));
    }

    #[test]
    fn oversized_packing_cell_asks_to_be_skipped() {
        let err = packing_cell(1 << 12, 1, 1000).unwrap_err();
        assert!(matches!(err, Error::EnumerationCap { .. }));
    }
}
