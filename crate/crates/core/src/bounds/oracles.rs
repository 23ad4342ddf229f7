//! Brute-force enumeration oracles backing the closed forms in the parent
//! module: an explicit greedy covering net, exact neighborhood counts over
//! the signed-pattern family, and its exact second moment.

use std::collections::HashMap;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::{enumerate_signed_supports, SignedSupport};

/// Grid sizes past this make the greedy cover pointless to wait for.
const GRID_CAP: usize = 1 << 22;

/// Dense covariance matrices are only worth materializing for small n;
/// above this use [`cov_deviation`], which stores the handful of entries
/// the patterns actually touch.
const DENSE_COV_CAP: usize = 256;

/// Explicit eps-net of the cube [-r, r]^k in the l2 metric, k <= 2.
///
/// The continuous cube is discretized to a grid fine enough that every
/// point sits within eps - eps_eff of a grid point; covering every grid
/// point within the shrunken radius eps_eff then certifies a true eps-net.
/// Centers are chosen by max-coverage greedy: repeatedly take the first
/// uncovered grid point in scan order and place the center at whichever
/// candidate within eps_eff of it covers the most uncovered points (ties to
/// scan order). Placing the center at the uncovered point itself would
/// waste half of every boundary ball and lose the single-ball cover at
/// large eps.
pub fn covering_net(k: usize, r: f64, eps: f64) -> Result<Vec<Vec<f64>>> {
    if k == 0 || k > 2 {
        return Err(Error::invalid(format!(
            "greedy cover enumerates a k-dimensional grid; k = {k} is not in {{1, 2}}"
        )));
    }
    for (v, name) in [(r, "radius"), (eps, "ball radius")] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(format!("{name} must be positive and finite")));
        }
    }
    let sqrt_k = (k as f64).sqrt();
    // grid pitch <= 0.2 eps / sqrt(k), so eps_eff >= 0.9 eps stays positive
    let steps = ((2.0 * r) / (0.2 * eps / sqrt_k)).ceil().max(1.0) as usize;
    let per_dim = steps + 1;
    let total = per_dim.pow(k as u32);
    if total > GRID_CAP {
        return Err(Error::EnumerationCap {
            size: total as u128,
            cap: GRID_CAP as u128,
        });
    }
    let h = 2.0 * r / steps as f64;
    let eps_eff = eps - sqrt_k * h / 2.0;
    // coverage radius in index units; all distance tests run on integer
    // index offsets so the geometry is exact
    let rad = eps_eff / h;
    let rad2 = rad * rad;
    let ir = rad.floor() as isize;

    let coords = |id: usize| -> Vec<isize> {
        match k {
            1 => vec![id as isize],
            _ => vec![(id / per_dim) as isize, (id % per_dim) as isize],
        }
    };
    let flat = |p: &[isize]| -> usize {
        match k {
            1 => p[0] as usize,
            _ => p[0] as usize * per_dim + p[1] as usize,
        }
    };
    let in_ball = |a: &[isize], b: &[isize]| -> bool {
        let d2: isize = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        (d2 as f64) <= rad2
    };
    // every grid point within the index ball around `c`, in scan order
    let ball = |c: &[isize]| -> Vec<usize> {
        let mut out = Vec::new();
        let clamp = |v: isize| v.clamp(0, steps as isize);
        match k {
            1 => {
                for x in clamp(c[0] - ir)..=clamp(c[0] + ir) {
                    if in_ball(&[x], c) {
                        out.push(flat(&[x]));
                    }
                }
            }
            _ => {
                for x in clamp(c[0] - ir)..=clamp(c[0] + ir) {
                    for y in clamp(c[1] - ir)..=clamp(c[1] + ir) {
                        if in_ball(&[x, y], c) {
                            out.push(flat(&[x, y]));
                        }
                    }
                }
            }
        }
        out
    };

    let mut covered = vec![false; total];
    let mut centers: Vec<Vec<f64>> = Vec::new();
    let mut cursor = 0usize;
    loop {
        while cursor < total && covered[cursor] {
            cursor += 1;
        }
        if cursor == total {
            break;
        }
        let u = coords(cursor);
        let mut best: Option<(usize, Vec<isize>)> = None;
        for cand_id in ball(&u) {
            let cand = coords(cand_id);
            let gain = ball(&cand).iter().filter(|p| !covered[**p]).count();
            // strict > keeps the earliest candidate on ties
            if best.as_ref().map_or(true, |(g, _)| gain > *g) {
                best = Some((gain, cand));
            }
        }
        let (_, center) = best.expect("the uncovered point is its own candidate");
        for p in ball(&center) {
            covered[p] = true;
        }
        centers.push(center.iter().map(|i| -r + *i as f64 * h).collect());
    }
    Ok(centers)
}

/// Size of the net built by [`covering_net`]; stays within
/// [`super::covering_bound`] (checked by tests across parameter sweeps, not
/// re-verified per call).
pub fn covering_oracle(k: usize, r: f64, eps: f64) -> Result<usize> {
    Ok(covering_net(k, r, eps)?.len())
}

/// Exact max over the signed-pattern family of the number of members
/// within Hamming distance t (coordinates counted, so an in-place sign
/// flip is 1 and a support move is 2).
///
/// Block-preserving coordinate permutations and sign flips act
/// transitively on the family and preserve the distance, so the count is
/// the same at every member; it is computed at 64 spread-out members and
/// the agreement asserted.
pub fn nmax_oracle(n: usize, k: usize, t: f64, cap: u128) -> Result<u128> {
    if k == 0 || n == 0 || n % k != 0 {
        return Err(Error::NotGroupSparse(format!(
            "n = {n} does not split into k = {k} equal blocks"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::invalid("distance threshold must be non-negative"));
    }
    let b = n / k;
    let family: Vec<SignedSupport> = enumerate_signed_supports(k, b, cap)?.collect();
    let total = family.len() as u128;
    let samples = 64u128.min(total);
    let mut common: Option<u128> = None;
    for s in 0..samples {
        let v = &family[(s * total / samples) as usize];
        let count = family
            .iter()
            .filter(|w| (v.hamming(w) as f64) <= t)
            .count() as u128;
        match common {
            None => common = Some(count),
            Some(c) => assert_eq!(
                c, count,
                "neighborhood size must be member-independent by symmetry"
            ),
        }
    }
    Ok(common.expect("family is never empty"))
}

/// Exact second moment (1/|V|) sum of v v^T over the unit-amplitude
/// signed-pattern family, as a dense matrix. Equals (k/n) I; kept dense
/// only for small n, the sweep-sized check is [`cov_deviation`].
pub fn cov_v(n: usize, k: usize, cap: u128) -> Result<Array2<f64>> {
    if n > DENSE_COV_CAP {
        return Err(Error::invalid(format!(
            "dense n x n covariance at n = {n} is wasteful; use cov_deviation"
        )));
    }
    let (entries, total) = accumulate_second_moment(n, k, cap)?;
    let mut m = Array2::zeros((n, n));
    for ((i, j), sum) in entries {
        m[(i, j)] = sum as f64 / total as f64;
    }
    Ok(m)
}

/// Max elementwise deviation of the family's exact second moment from
/// (k/n) I. Only entries some pattern touches are stored, so this runs at
/// family sizes where the dense matrix would not fit.
pub fn cov_deviation(n: usize, k: usize, cap: u128) -> Result<f64> {
    let (entries, total) = accumulate_second_moment(n, k, cap)?;
    let target = k as f64 / n as f64;
    let mut worst = 0.0f64;
    let mut diagonals_seen = 0usize;
    for ((i, j), sum) in entries {
        let value = sum as f64 / total as f64;
        let want = if i == j {
            diagonals_seen += 1;
            target
        } else {
            0.0
        };
        worst = worst.max((value - want).abs());
    }
    // untouched entries are exactly zero, which is correct off the
    // diagonal; every diagonal entry is touched because every coordinate
    // is active in some pattern
    assert_eq!(diagonals_seen, n, "every diagonal entry must be accumulated");
    Ok(worst)
}

/// Integer-exact accumulation of sum of v v^T: only the k^2 entries each
/// pattern touches are visited, so the cost is |V| k^2 with |V|-many
/// +-1 additions per touched key.
fn accumulate_second_moment(
    n: usize,
    k: usize,
    cap: u128,
) -> Result<(HashMap<(usize, usize), i64>, u128)> {
    if k == 0 || n == 0 || n % k != 0 {
        return Err(Error::NotGroupSparse(format!(
            "n = {n} does not split into k = {k} equal blocks"
        )));
    }
    let b = n / k;
    let total = SignedSupport::count(k, b);
    let mut entries: HashMap<(usize, usize), i64> = HashMap::new();
    for v in enumerate_signed_supports(k, b, cap)? {
        let active: Vec<(usize, i64)> = v
            .entries
            .iter()
            .enumerate()
            .map(|(block, &(j, s))| (block * b + j, s as i64))
            .collect();
        for &(ci, si) in &active {
            for &(cj, sj) in &active {
                *entries.entry((ci, cj)).or_insert(0) += si * sj;
            }
        }
    }
    Ok((entries, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{covering_bound, packing_stats};
    use crate::rng::{PhiloxStream, StreamId};
    use approx::assert_abs_diff_eq;

    #[test]
    fn covering_rejects_bad_inputs() {
        assert!(covering_net(0, 1.0, 1.0).is_err());
        assert!(covering_net(3, 1.0, 1.0).is_err());
        assert!(covering_net(1, -1.0, 1.0).is_err());
        assert!(covering_net(1, 1.0, 0.0).is_err());
        assert!(matches!(
            covering_net(2, 1.0, 1e-4),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn covering_single_ball_at_large_eps() {
        assert_eq!(covering_oracle(1, 1.0, 2.0).unwrap(), 1);
        assert_eq!(covering_oracle(2, 1.0, 4.0).unwrap(), 1);
    }

    #[test]
    fn covering_stays_under_the_analytic_bound() {
        for k in [1usize, 2] {
            for eps in [0.25, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0] {
                let size = covering_oracle(k, 1.0, eps).unwrap();
                let bound = covering_bound(k, 1.0, eps).unwrap();
                assert!(
                    (size as f64) <= bound,
                    "greedy {size} exceeds bound {bound:.3} at k = {k}, eps = {eps}"
                );
            }
        }
        assert!(covering_oracle(1, 1.0, 1.0).unwrap() <= 3);
        assert!(covering_oracle(2, 1.0, 0.5).unwrap() <= 44);
    }

    #[test]
    fn covering_net_actually_covers() {
        for (k, eps) in [(1usize, 0.3), (2, 0.6), (2, 1.7)] {
            let centers = covering_net(k, 1.0, eps).unwrap();
            let mut s = PhiloxStream::new(11, StreamId(7));
            for _ in 0..2000 {
                let p: Vec<f64> = (0..k).map(|_| s.next_in(-1.0, 1.0)).collect();
                let nearest = centers
                    .iter()
                    .map(|c| {
                        c.iter()
                            .zip(&p)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    nearest <= eps * (1.0 + 1e-12),
                    "point {p:?} at distance {nearest} from the net, eps = {eps}"
                );
            }
        }
    }

    #[test]
    fn nmax_small_cases() {
        assert_eq!(nmax_oracle(4, 2, 0.0, 1 << 20).unwrap(), 1);
        // distance 1 means an in-place sign flip; one per block
        assert_eq!(nmax_oracle(4, 2, 1.0, 1 << 20).unwrap(), 3);
        assert_eq!(nmax_oracle(16, 2, 1.0, 1 << 20).unwrap(), 3);
        // distance 2 adds double flips and support moves within one block
        let two = nmax_oracle(4, 2, 2.0, 1 << 20).unwrap();
        assert_eq!(two, 1 + 2 + 1 + 2 * 2);
    }

    #[test]
    fn nmax_monotone_in_t_and_capped() {
        let mut prev = 0u128;
        for t in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0] {
            let v = nmax_oracle(8, 2, t, 1 << 20).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        // t = k/2 with fractional value rounds nothing: distance is integer
        assert_eq!(
            nmax_oracle(8, 2, 1.0, 1 << 20).unwrap(),
            nmax_oracle(8, 2, 1.5, 1 << 20).unwrap()
        );
        assert!(matches!(
            nmax_oracle(512, 8, 4.0, 1 << 20),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn nmax_stays_under_the_analytic_bound() {
        for (n, k) in [(8usize, 2usize), (16, 2), (12, 3), (16, 4), (32, 2)] {
            let exact = nmax_oracle(n, k, k as f64 / 2.0, 1 << 20).unwrap();
            let stats = packing_stats(n, k).unwrap();
            assert!(
                (exact as f64).ln() <= stats.log_nmax_bound + 1e-12,
                "exact count {exact} above the analytic bound at ({n}, {k})"
            );
        }
    }

    #[test]
    fn cov_matches_identity() {
        for (n, k, want) in [(4usize, 2usize, 0.5), (8, 2, 0.25), (12, 3, 0.25)] {
            let m = cov_v(n, k, 1 << 20).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let target = if i == j { want } else { 0.0 };
                    assert_abs_diff_eq!(m[(i, j)], target, epsilon = 1e-12);
                }
            }
            assert!(cov_deviation(n, k, 1 << 20).unwrap() < 1e-12);
        }
    }

    #[test]
    fn cov_deviation_scales_past_the_dense_cap() {
        assert!(cov_v(1024, 1, 1 << 20).is_err());
        assert!(cov_deviation(1024, 1, 1 << 20).unwrap() < 1e-12);
    }

    #[test]
    fn separation_between_materialized_patterns() {
        // squared l2 distance dominates xi^2 times the Hamming distance,
        // which is the packing separation the lower bound runs on
        let (k, b, xi) = (2usize, 3usize, 0.7);
        let family: Vec<SignedSupport> =
            enumerate_signed_supports(k, b, 1 << 20).unwrap().collect();
        for v in &family {
            for w in &family {
                let d = v.hamming(w);
                let dv = v.materialize(b, xi);
                let dw = w.materialize(b, xi);
                let l2sq: f64 = dv
                    .values()
                    .iter()
                    .zip(dw.values())
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum();
                assert!(l2sq >= xi * xi * d as f64 - 1e-12);
                for t in [0.5, 1.0, 2.5] {
                    if d as f64 > t {
                        assert!(l2sq.sqrt() > xi * t.sqrt() - 1e-12);
                    }
                }
            }
        }
    }
}
