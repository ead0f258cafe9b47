//! Randomized classical comparison of two `m`-bit integers.
//!
//! Binary search for the longest common prefix, testing each candidate
//! prefix with `k` public-coin parity fingerprints sent by Alice and a
//! one-bit verdict from Bob. After the search Alice sends the first
//! differing bit and Bob announces the outcome in two bits. An equality test
//! only errs by accepting unequal prefixes, with probability `2^-k`, so
//! `k = ceil(log2(steps / eps))` bounds the total error by `eps`. When the
//! direct protocol (Alice sends `x`) is no more expensive it is used instead
//! and the answer is exact.

use std::cmp::Ordering;

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NisanOutcome {
    /// Claimed ordering of `x` relative to `y`.
    #[serde(serialize_with = "ser_ordering")]
    pub ordering: Ordering,
    pub bits_exchanged: u64,
    /// True when the direct exact protocol was used.
    pub exact: bool,
}

fn ser_ordering<S: serde::Serializer>(o: &Ordering, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(ordering_name(*o))
}

pub fn ordering_name(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    }
}

/// Number of binary-search steps for `m`-bit inputs.
fn steps(m: u32) -> u64 {
    let mut s = 0;
    while (1u64 << s) < m as u64 + 1 {
        s += 1;
    }
    s
}

/// Fingerprint length per equality test.
pub fn fingerprint_bits(m: u32, eps: f64) -> u64 {
    let s = steps(m).max(1) as f64;
    (s / eps).log2().ceil().max(1.0) as u64
}

/// Bits the randomized protocol sends, independent of the inputs.
pub fn randomized_cost(m: u32, eps: f64) -> u64 {
    steps(m) * (fingerprint_bits(m, eps) + 1) + 3
}

/// Compares `x` and `y` using public randomness from `rng`.
pub fn nisan_compare(x: u64, y: u64, m: u32, eps: f64, rng: &mut impl Rng) -> Result<NisanOutcome> {
    if !(eps > 0.0 && eps < 0.5) {
        return domain(format!("eps = {eps} outside (0, 1/2)"));
    }
    if !(1..=63).contains(&m) {
        return domain(format!("m = {m} outside 1..=63"));
    }
    if x >> m != 0 || y >> m != 0 {
        return domain(format!("inputs exceed {m} bits"));
    }
    let direct = m as u64 + 2;
    if direct <= randomized_cost(m, eps) {
        return Ok(NisanOutcome { ordering: x.cmp(&y), bits_exchanged: direct, exact: true });
    }
    let k = fingerprint_bits(m, eps);
    let prefix = |v: u64, len: u32| if len == 0 { 0 } else { v >> (m - len) };
    let mut bits = 0;
    // invariant: prefixes of length lo agree (as far as the tests can tell)
    let (mut lo, mut hi) = (0u32, m);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        let (px, py) = (prefix(x, mid), prefix(y, mid));
        let mut equal = true;
        for _ in 0..k {
            let r: u64 = rng.random::<u64>() & ((1u64 << mid) - 1);
            if (px & r).count_ones() % 2 != (py & r).count_ones() % 2 {
                equal = false;
            }
        }
        bits += k + 1;
        if equal {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let ordering = if lo == m {
        Ordering::Equal
    } else {
        let bit = |v: u64| (v >> (m - lo - 1)) & 1;
        bit(x).cmp(&bit(y))
    };
    // pad to the fixed schedule so the cost does not leak the inputs
    bits = bits.max(steps(m) * (k + 1)) + 3;
    Ok(NisanOutcome { ordering, bits_exchanged: bits, exact: false })
}
