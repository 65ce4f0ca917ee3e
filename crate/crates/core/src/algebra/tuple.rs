//! Base-`d` tuple encoding, most significant coordinate first.
//!
//! Every table, bitset and file format in the crate indexes tuples this way:
//! `(a_1, ..., a_n)` sits at `a_1 * d^(n-1) + ... + a_n`.

use crate::error::{Error, Result};

/// Upper bound on table or bitset sizes handled anywhere in the crate.
pub const MAX_TABLE_LEN: usize = 1 << 28;

/// `d^n`, refusing anything larger than [`MAX_TABLE_LEN`].
pub fn table_len(d: usize, n: usize) -> Result<usize> {
    let mut len: u128 = 1;
    for _ in 0..n {
        len *= d as u128;
        if len > MAX_TABLE_LEN as u128 {
            return Err(Error::TooLarge(len));
        }
    }
    Ok(len as usize)
}

#[inline]
pub fn encode(d: usize, tuple: &[u8]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * d + a as usize)
}

#[inline]
pub fn decode_into(d: usize, mut index: usize, out: &mut [u8]) {
    for slot in out.iter_mut().rev() {
        *slot = (index % d) as u8;
        index /= d;
    }
}

pub fn decode(d: usize, n: usize, index: usize) -> Vec<u8> {
    let mut out = vec![0; n];
    decode_into(d, index, &mut out);
    out
}

/// Odometer over all of `{0..d-1}^n` in encoding order.
#[derive(Debug, Clone)]
pub struct Tuples {
    d: u8,
    current: Vec<u8>,
    done: bool,
}

impl Tuples {
    pub fn new(d: usize, n: usize) -> Self {
        Tuples {
            d: d as u8,
            current: vec![0; n],
            done: d == 0,
        }
    }
}

impl Iterator for Tuples {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        if !increment(&mut self.current, self.d) {
            self.done = true;
        }
        Some(out)
    }
}

/// Increments a mixed odometer with uniform radix `d`; returns `false` on wrap-around.
#[inline]
pub fn increment(tuple: &mut [u8], d: u8) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < d {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Increments an odometer whose positions have individual radices.
#[inline]
pub fn increment_mixed(counter: &mut [usize], radices: &[usize]) -> bool {
    for (slot, &radix) in counter.iter_mut().zip(radices).rev() {
        *slot += 1;
        if *slot < radix {
            return true;
        }
        *slot = 0;
    }
    false
}
