//! Group-sparse signals and the piecewise-linear generative model that
//! produces them.
//!
//! The ambient dimension n splits into k contiguous blocks of length n/k.
//! Latent coordinate z_i controls block i alone. Its range [-r, r] splits
//! into n/k sub-intervals of length 2rk/n; inside sub-interval j the model
//! traces a double triangle: zero at both ends and at the midpoint, +x_max a
//! quarter of the way in, -x_max three quarters in, linear between. The
//! entry written is the j-th entry of block i, every other entry of the
//! block is zero, so each block carries at most one non-zero.
//!
//! Slopes are +-4 x_max / interval_len, hence the exact Lipschitz constant
//! L = 2 n x_max / (k r) returned by [`GenModelParams::lipschitz`].

use ndarray::Array1;

use crate::error::{Error, Result};

/// Parameters of the rectangular-domain model. `n` must be a positive
/// multiple of `k`; callers with other shapes zero-pad before entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenModelParams {
    pub n: usize,
    pub k: usize,
    pub r: f64,
    pub x_max: f64,
}

impl GenModelParams {
    pub fn new(n: usize, k: usize, r: f64, x_max: f64) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::invalid("n and k must be positive"));
        }
        if n % k != 0 {
            return Err(Error::invalid(format!(
                "n = {n} is not a multiple of k = {k}; zero-pad the signal first"
            )));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::invalid(format!("radius r must be positive, got {r}")));
        }
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(Error::invalid(format!(
                "amplitude x_max must be positive, got {x_max}"
            )));
        }
        Ok(GenModelParams { n, k, r, x_max })
    }

    /// Entries per block.
    pub fn block_len(&self) -> usize {
        self.n / self.k
    }

    /// Width of one latent sub-interval, 2rk/n.
    pub fn interval_len(&self) -> f64 {
        2.0 * self.r / self.block_len() as f64
    }

    /// Exact Lipschitz constant of the map, 2 n x_max / (k r).
    pub fn lipschitz(&self) -> f64 {
        2.0 * self.n as f64 * self.x_max / (self.k as f64 * self.r)
    }

    /// Same model with the radius replaced; used to express the spherical
    /// variant through the rectangular one.
    pub fn with_radius(&self, r: f64) -> Result<Self> {
        GenModelParams::new(self.n, self.k, r, self.x_max)
    }

    /// Radius of the box inscribed in the ball of radius `r`: r / sqrt(k).
    pub fn inscribed_radius(&self) -> f64 {
        self.r / (self.k as f64).sqrt()
    }

    /// The double-triangle profile for one block: which in-block entry is
    /// active at latent value `z` and with what amplitude. Sub-interval
    /// boundaries follow the [a, b) convention; z = r belongs to the last
    /// sub-interval so the map stays defined on the closed box.
    fn block_value(&self, z: f64) -> (usize, f64) {
        let b = self.block_len();
        let ell = self.interval_len();
        let t = (z + self.r) / ell;
        let mut j = t.floor() as isize;
        if j < 0 {
            j = 0;
        }
        if j as usize >= b {
            j = b as isize - 1;
        }
        let j = j as usize;
        let u = t - j as f64; // offset within the sub-interval, in [0, 1)
        let tri = if u <= 0.25 {
            4.0 * u
        } else if u <= 0.75 {
            2.0 - 4.0 * u
        } else {
            4.0 * u - 4.0
        };
        (j, self.x_max * tri)
    }

    /// Evaluate the generator at `z` in [-r, r]^k.
    pub fn generate(&self, z: &[f64]) -> Result<GroupSparseSignal> {
        if z.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: z.len(),
                context: "latent dimension",
            });
        }
        let b = self.block_len();
        let mut values = vec![0.0; self.n];
        for (i, &zi) in z.iter().enumerate() {
            if !zi.is_finite() || zi.abs() > self.r {
                return Err(Error::DomainViolation(format!(
                    "z[{i}] = {zi} lies outside [-{}, {}]",
                    self.r, self.r
                )));
            }
            let (j, v) = self.block_value(zi);
            values[i * b + j] = v;
        }
        Ok(GroupSparseSignal {
            values: Array1::from(values),
            k: self.k,
        })
    }

    /// Evaluate the spherical-domain variant at `z` with ||z||_2 <= r.
    ///
    /// Internally this is the rectangular model at radius r/sqrt(k),
    /// extended by zero: any coordinate beyond that band contributes a zero
    /// block. On the inscribed box the two models agree exactly.
    pub fn generate_spherical(&self, z: &[f64]) -> Result<GroupSparseSignal> {
        if z.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: z.len(),
                context: "latent dimension",
            });
        }
        let norm2: f64 = z.iter().map(|v| v * v).sum();
        if !norm2.is_finite() || norm2.sqrt() > self.r * (1.0 + 1e-12) {
            return Err(Error::DomainViolation(format!(
                "||z||_2 = {} exceeds r = {}",
                norm2.sqrt(),
                self.r
            )));
        }
        let inner = self.with_radius(self.inscribed_radius())?;
        let b = self.block_len();
        let mut values = vec![0.0; self.n];
        for (i, &zi) in z.iter().enumerate() {
            if zi.abs() <= inner.r {
                let (j, v) = inner.block_value(zi);
                values[i * b + j] = v;
            }
            // outside the band the block stays zero: the per-coordinate maps
            // extend by zero beyond their sub-interval range
        }
        Ok(GroupSparseSignal {
            values: Array1::from(values),
            k: self.k,
        })
    }

    /// Canonical right inverse of [`generate`]: maps a group-sparse signal
    /// with amplitudes in [-x_max, x_max] to a latent point that reproduces
    /// it exactly.
    ///
    /// Block with value v >= 0 at in-block index j: z = interval start plus
    /// (v / x_max) * (interval_len / 4), the rising segment. Block with
    /// v < 0: z = interval midpoint plus (|v| / x_max) * (interval_len / 4),
    /// the segment just after the midpoint. An all-zero block maps to -r.
    pub fn invert(&self, x: &GroupSparseSignal) -> Result<Vec<f64>> {
        if x.values.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.values.len(),
                context: "ambient dimension",
            });
        }
        if x.k != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: x.k,
                context: "block count",
            });
        }
        let b = self.block_len();
        let ell = self.interval_len();
        let mut z = Vec::with_capacity(self.k);
        for i in 0..self.k {
            let block = &x.values.as_slice().unwrap()[i * b..(i + 1) * b];
            let mut nz: Option<(usize, f64)> = None;
            for (j, &v) in block.iter().enumerate() {
                if v != 0.0 {
                    if nz.is_some() {
                        return Err(Error::NotGroupSparse(format!(
                            "block {i} has more than one non-zero entry"
                        )));
                    }
                    nz = Some((j, v));
                }
            }
            match nz {
                None => z.push(-self.r),
                Some((j, v)) => {
                    if v.abs() > self.x_max * (1.0 + 1e-12) {
                        return Err(Error::DomainViolation(format!(
                            "entry amplitude {v} exceeds x_max = {}",
                            self.x_max
                        )));
                    }
                    let start = -self.r + j as f64 * ell;
                    let zi = if v >= 0.0 {
                        start + (v / self.x_max) * (ell / 4.0)
                    } else {
                        start + ell / 2.0 + (-v / self.x_max) * (ell / 4.0)
                    };
                    z.push(zi);
                }
            }
        }
        Ok(z)
    }
}

/// A signal with at most one non-zero entry per length-(n/k) block.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSparseSignal {
    values: Array1<f64>,
    k: usize,
}

impl GroupSparseSignal {
    /// Validating constructor; rejects shapes that are not k equal blocks or
    /// blocks with two or more non-zeros.
    pub fn new(values: Array1<f64>, k: usize) -> Result<Self> {
        if k == 0 || values.len() % k != 0 {
            return Err(Error::invalid(format!(
                "length {} does not split into {k} equal blocks",
                values.len()
            )));
        }
        if !is_group_sparse(values.as_slice().unwrap(), k) {
            return Err(Error::NotGroupSparse(
                "some block has more than one non-zero entry".into(),
            ));
        }
        Ok(GroupSparseSignal { values, k })
    }

    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn block_len(&self) -> usize {
        self.values.len() / self.k
    }
}

/// Exact zero test per block: true iff every length-(len/k) block has at
/// most one non-zero entry. Comparison is exact; the model writes exact
/// zeros off-support.
pub fn is_group_sparse(values: &[f64], k: usize) -> bool {
    if k == 0 || values.len() % k != 0 {
        return false;
    }
    let b = values.len() / k;
    values
        .chunks_exact(b)
        .all(|block| block.iter().filter(|v| **v != 0.0).count() <= 1)
}

/// A fully-supported sign pattern: per block, which entry is active and with
/// which sign. Materialized at amplitude xi these are the signals
/// {xi * v : v in V} used by the packing arguments and the hard prior.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedSupport {
    /// One (in-block index, sign) pair per block; sign is -1 or +1.
    pub entries: Vec<(usize, i8)>,
}

impl SignedSupport {
    /// Number of patterns for k blocks of length b: (2b)^k.
    pub fn count(k: usize, block_len: usize) -> u128 {
        (2 * block_len as u128).pow(k as u32)
    }

    /// Pattern at `rank` in lexicographic order: blocks are compared left to
    /// right, and within a block (index, sign) with sign - before +. This is
    /// the tie-break order used by the exhaustive decoder.
    pub fn from_rank(rank: u128, k: usize, block_len: usize) -> Self {
        let base = 2 * block_len as u128;
        let mut digits = vec![0u128; k];
        let mut r = rank;
        for i in (0..k).rev() {
            digits[i] = r % base;
            r /= base;
        }
        let entries = digits
            .into_iter()
            .map(|d| ((d / 2) as usize, if d % 2 == 0 { -1 } else { 1 }))
            .collect();
        SignedSupport { entries }
    }

    pub fn rank(&self, block_len: usize) -> u128 {
        let base = 2 * block_len as u128;
        let mut r = 0u128;
        for &(j, s) in &self.entries {
            let digit = 2 * j as u128 + if s > 0 { 1 } else { 0 };
            r = r * base + digit;
        }
        r
    }

    /// Dense ambient vector with entries in {-1, 0, +1}.
    pub fn to_vector(&self, block_len: usize) -> Vec<f64> {
        let k = self.entries.len();
        let mut v = vec![0.0; k * block_len];
        for (i, &(j, s)) in self.entries.iter().enumerate() {
            v[i * block_len + j] = s as f64;
        }
        v
    }

    /// The signal xi * v as a [`GroupSparseSignal`].
    pub fn materialize(&self, block_len: usize, xi: f64) -> GroupSparseSignal {
        let mut v = self.to_vector(block_len);
        for x in v.iter_mut() {
            *x *= xi;
        }
        GroupSparseSignal {
            values: Array1::from(v),
            k: self.entries.len(),
        }
    }

    /// Coordinates at which two patterns differ (Hamming distance of the
    /// ambient sign vectors).
    pub fn hamming(&self, other: &SignedSupport) -> usize {
        debug_assert_eq!(self.entries.len(), other.entries.len());
        let mut d = 0;
        for (&(ja, sa), &(jb, sb)) in self.entries.iter().zip(&other.entries) {
            if ja == jb {
                if sa != sb {
                    d += 1;
                }
            } else {
                d += 2;
            }
        }
        d
    }
}

/// Iterator over all (2 * block_len)^k signed supports in lexicographic
/// order. Errors if the family exceeds `cap`.
pub fn enumerate_signed_supports(
    k: usize,
    block_len: usize,
    cap: u128,
) -> Result<impl Iterator<Item = SignedSupport>> {
    let total = SignedSupport::count(k, block_len);
    if total > cap {
        return Err(Error::EnumerationCap { size: total, cap });
    }
    Ok((0..total).map(move |r| SignedSupport::from_rank(r, k, block_len)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(n: usize, k: usize, r: f64, x_max: f64) -> GenModelParams {
        GenModelParams::new(n, k, r, x_max).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(GenModelParams::new(10, 3, 1.0, 1.0).is_err());
        assert!(GenModelParams::new(0, 1, 1.0, 1.0).is_err());
        assert!(GenModelParams::new(8, 2, 0.0, 1.0).is_err());
        assert!(GenModelParams::new(8, 2, 1.0, -1.0).is_err());
    }

    #[test]
    fn zero_at_interval_endpoints_and_midpoints() {
        let p = params(8, 2, 1.0, 1.0);
        // boundaries of the four sub-intervals of [-1, 1]
        for z in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let x = p.generate(&[z, z]).unwrap();
            assert!(
                x.values().iter().all(|v| v.abs() < 1e-12),
                "boundary z = {z} must map to the zero signal, got {:?}",
                x.values()
            );
        }
        // midpoints of each sub-interval
        for z in [-0.75, -0.25, 0.25, 0.75] {
            let x = p.generate(&[z, z]).unwrap();
            assert!(x.values().iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn quarter_points_hit_plus_minus_xmax() {
        let p = params(8, 2, 1.0, 1.0);
        // first sub-interval of block 0 is [-1, -0.5]
        let x = p.generate(&[-0.875, -1.0]).unwrap();
        assert_abs_diff_eq!(x.values()[0], 1.0, epsilon = 1e-12);
        assert!(x.values().iter().skip(1).all(|v| *v == 0.0));

        let x = p.generate(&[-0.625, -1.0]).unwrap();
        assert_abs_diff_eq!(x.values()[0], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn rising_segment_is_linear() {
        // an eighth into the sub-interval sits halfway up the rising edge
        let p = params(8, 2, 1.0, 1.0);
        let x = p.generate(&[-0.9375, -1.0]).unwrap();
        assert_abs_diff_eq!(x.values()[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn lipschitz_constant_formula() {
        assert_abs_diff_eq!(params(8, 2, 1.0, 1.0).lipschitz(), 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(params(8, 2, 1.0, 2.0).lipschitz(), 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(params(8, 4, 2.0, 1.0).lipschitz(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn adversarial_pair_on_one_segment_attains_the_constant() {
        let p = params(32, 4, 1.5, 2.0);
        let ell = p.interval_len();
        let l = p.lipschitz();
        // both points on the rising edge of block 2, sub-interval 3
        let a = -p.r + 3.0 * ell + ell / 16.0;
        let b = a + ell / 8.0;
        let mut za = vec![-p.r; 4];
        let mut zb = za.clone();
        za[2] = a;
        zb[2] = b;
        let xa = p.generate(&za).unwrap();
        let xb = p.generate(&zb).unwrap();
        let dx: f64 = xa
            .values()
            .iter()
            .zip(xb.values())
            .map(|(u, v)| (u - v) * (u - v))
            .sum::<f64>()
            .sqrt();
        let ratio = dx / (b - a);
        assert!(
            ratio >= (1.0 - 1e-9) * l && ratio <= l * (1.0 + 1e-12),
            "segment ratio {ratio} vs L = {l}"
        );
    }

    #[test]
    fn invert_round_trips_the_examples() {
        let p = params(8, 2, 1.0, 1.0);

        let x = GroupSparseSignal::new(
            Array1::from(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            2,
        )
        .unwrap();
        let z = p.invert(&x).unwrap();
        assert_abs_diff_eq!(z[0], -0.875, epsilon = 1e-12);
        assert_abs_diff_eq!(z[1], -1.0, epsilon = 1e-12);
        assert_eq!(p.generate(&z).unwrap(), x);

        let x = GroupSparseSignal::new(
            Array1::from(vec![0.0, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            2,
        )
        .unwrap();
        let z = p.invert(&x).unwrap();
        assert_abs_diff_eq!(z[0], -0.1875, epsilon = 1e-12);
        assert_eq!(p.generate(&z).unwrap(), x);
    }

    #[test]
    fn invert_rejects_bad_signals() {
        let p = params(8, 2, 1.0, 1.0);
        let two_per_block =
            Array1::from(vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(GroupSparseSignal::new(two_per_block, 2).is_err());

        let too_big = GroupSparseSignal {
            values: Array1::from(vec![2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            k: 2,
        };
        assert!(matches!(
            p.invert(&too_big),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn spherical_matches_rectangular_on_inscribed_box() {
        let p = params(16, 2, 1.0, 1.0);
        let inner = p.with_radius(p.inscribed_radius()).unwrap();
        let mut s = crate::rng::PhiloxStream::new(5, crate::rng::StreamId(0));
        for _ in 0..200 {
            let z: Vec<f64> = (0..2).map(|_| s.next_in(-inner.r, inner.r)).collect();
            assert_eq!(
                p.generate_spherical(&z).unwrap(),
                inner.generate(&z).unwrap()
            );
        }
    }

    #[test]
    fn spherical_is_zero_outside_the_band() {
        let p = params(8, 2, 1.0, 1.0);
        let r_in = p.inscribed_radius(); // 1/sqrt(2) ~ 0.7071
        let x = p.generate_spherical(&[0.9, 0.1]).unwrap();
        assert!(0.9 > r_in);
        let b = p.block_len();
        assert!(
            x.values().iter().take(b).all(|v| *v == 0.0),
            "coordinate beyond the inscribed band must give a zero block"
        );
    }

    #[test]
    fn spherical_at_origin_is_zero_signal() {
        let p = params(8, 2, 1.0, 1.0);
        let x = p.generate_spherical(&[0.0, 0.0]).unwrap();
        assert!(x.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn spherical_rejects_large_norm() {
        let p = params(8, 2, 1.0, 1.0);
        assert!(matches!(
            p.generate_spherical(&[0.9, 0.9]),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn spherical_surjectivity_via_scaled_invert() {
        let p = params(8, 2, 1.0, 1.0);
        let inner = p.with_radius(p.inscribed_radius()).unwrap();
        for (j0, v0, j1, v1) in [(0, 0.5, 2, -0.25), (3, 1.0, 0, 0.0), (1, -1.0, 3, 1.0)] {
            let mut vals = vec![0.0; 8];
            vals[j0] = v0;
            vals[4 + j1] = v1;
            let x = GroupSparseSignal::new(Array1::from(vals), 2).unwrap();
            let z = inner.invert(&x).unwrap();
            let norm: f64 = z.iter().map(|v| v * v).sum::<f64>();
            assert!(norm.sqrt() <= p.r + 1e-12);
            // the inscribed radius is irrational, so the round trip picks
            // up a few ulps
            let back = p.generate_spherical(&z).unwrap();
            for (a, b) in back.values().iter().zip(x.values()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn is_group_sparse_cases() {
        // one non-zero in each of four blocks of length four
        let mut x = vec![0.0; 16];
        x[1] = 1.0;
        x[6] = -0.5;
        x[8] = 0.25;
        x[15] = 1.0;
        assert!(is_group_sparse(&x, 4));
        x[2] = 0.1; // second non-zero in block 0
        assert!(!is_group_sparse(&x, 4));
        assert!(is_group_sparse(&[0.0; 6], 3));
        assert!(!is_group_sparse(&[0.0; 5], 2)); // 5 does not split into 2 blocks
    }

    #[test]
    fn signed_support_rank_round_trip_and_order() {
        let (k, b) = (2, 3);
        let total = SignedSupport::count(k, b);
        assert_eq!(total, 36);
        let all: Vec<SignedSupport> = enumerate_signed_supports(k, b, 1 << 20)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 36);
        for (r, s) in all.iter().enumerate() {
            assert_eq!(s.rank(b), r as u128);
        }
        // first pattern: index 0 with sign - in every block
        assert_eq!(all[0].entries, vec![(0, -1), (0, -1)]);
        // second differs only in the last block's sign
        assert_eq!(all[1].entries, vec![(0, -1), (0, 1)]);
    }

    #[test]
    fn hamming_counts_coordinate_differences() {
        let b = 4;
        let a = SignedSupport { entries: vec![(0, 1), (2, -1)] };
        let same = a.clone();
        let sign_flip = SignedSupport { entries: vec![(0, -1), (2, -1)] };
        let moved = SignedSupport { entries: vec![(1, 1), (2, -1)] };
        assert_eq!(a.hamming(&same), 0);
        assert_eq!(a.hamming(&sign_flip), 1);
        assert_eq!(a.hamming(&moved), 2);
        // cross-check against dense vectors
        let dv = |s: &SignedSupport, t: &SignedSupport| {
            s.to_vector(b)
                .iter()
                .zip(t.to_vector(b))
                .filter(|(u, v)| **u != *v)
                .count()
        };
        assert_eq!(dv(&a, &sign_flip), 1);
        assert_eq!(dv(&a, &moved), 2);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        assert!(matches!(
            enumerate_signed_supports(8, 16, 1 << 20),
            Err(Error::EnumerationCap { .. })
        ));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        /// generate into invert into generate is the identity on signals.
        #[test]
        fn generate_invert_round_trip(seed in 0u64..1000) {
            let p = params(24, 4, 1.25, 2.0);
            let mut s = crate::rng::PhiloxStream::new(seed, crate::rng::StreamId(1));
            let z: Vec<f64> = (0..4).map(|_| s.next_in(-p.r, p.r)).collect();
            let x = p.generate(&z).unwrap();
            let z2 = p.invert(&x).unwrap();
            let x2 = p.generate(&z2).unwrap();
            for (a, b) in x.values().iter().zip(x2.values()) {
                proptest::prop_assert!((a - b).abs() < 1e-9);
            }
        }

        /// outputs are always group sparse with amplitudes within x_max,
        /// and block i depends only on z_i.
        #[test]
        fn output_structure_and_block_locality(seed in 0u64..1000) {
            let p = params(12, 3, 0.8, 1.5);
            let mut s = crate::rng::PhiloxStream::new(seed, crate::rng::StreamId(2));
            let z: Vec<f64> = (0..3).map(|_| s.next_in(-p.r, p.r)).collect();
            let x = p.generate(&z).unwrap();
            proptest::prop_assert!(is_group_sparse(x.values().as_slice().unwrap(), 3));
            proptest::prop_assert!(x.values().iter().all(|v| v.abs() <= p.x_max + 1e-12));

            // changing z_2 alone must leave blocks 0 and 1 untouched
            let mut z2 = z.clone();
            z2[2] = s.next_in(-p.r, p.r);
            let x2 = p.generate(&z2).unwrap();
            let b = p.block_len();
            for j in 0..2 * b {
                proptest::prop_assert_eq!(x.values()[j], x2.values()[j]);
            }
        }

        /// sampled pairs never exceed the Lipschitz constant.
        #[test]
        fn sampled_lipschitz_ratio(seed in 0u64..300) {
            let p = params(16, 2, 1.0, 1.0);
            let l = p.lipschitz();
            let mut s = crate::rng::PhiloxStream::new(seed, crate::rng::StreamId(3));
            let za: Vec<f64> = (0..2).map(|_| s.next_in(-p.r, p.r)).collect();
            let zb: Vec<f64> = (0..2).map(|_| s.next_in(-p.r, p.r)).collect();
            let xa = p.generate(&za).unwrap();
            let xb = p.generate(&zb).unwrap();
            let dx: f64 = xa.values().iter().zip(xb.values())
                .map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
            let dz: f64 = za.iter().zip(&zb).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
            if dz > 0.0 {
                proptest::prop_assert!(dx <= l * dz * (1.0 + 1e-12));
            }
        }
    }
}
