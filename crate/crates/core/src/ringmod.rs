//! Arithmetic in `Z[sqrt(d)] / (p)` on bare coordinate pairs.
//!
//! Elements do not carry their modulus; a [`RingCtx`] is built once per
//! `(d, p)` task and passed to every operation.

use crate::error::{Error, Result};

/// `x + y sqrt(d)` with both coordinates reduced mod the context prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingElem {
    pub x: u32,
    pub y: u32,
}

impl RingElem {
    pub const ONE: RingElem = RingElem { x: 1, y: 0 };

    pub fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingCtx {
    p: u32,
    d_mod_p: u32,
}

impl RingCtx {
    pub fn new(p: u32, d: u64) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "ring modulus must be an odd prime, got {p}"
            )));
        }
        Ok(Self {
            p,
            d_mod_p: (d % p as u64) as u32,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn d_mod_p(&self) -> u32 {
        self.d_mod_p
    }

    /// Rejects elements whose coordinates are not reduced for this context.
    pub fn check(&self, a: RingElem) -> Result<RingElem> {
        if a.x < self.p && a.y < self.p {
            Ok(a)
        } else {
            Err(Error::InvalidArgument(format!(
                "element ({}, {}) does not belong to the ring mod {}",
                a.x, a.y, self.p
            )))
        }
    }

    // Single reduction seam; products of two residues fit in u64.
    #[inline(always)]
    fn mulmod(&self, a: u32, b: u32) -> u64 {
        a as u64 * b as u64 % self.p as u64
    }

    #[inline(always)]
    fn addmod(&self, a: u64, b: u64) -> u32 {
        let s = a + b;
        let p = self.p as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    pub fn mul(&self, a: RingElem, b: RingElem) -> RingElem {
        debug_assert!(a.x < self.p && a.y < self.p && b.x < self.p && b.y < self.p);
        let yy = self.mulmod(a.y, b.y) as u32;
        let x = self.addmod(self.mulmod(a.x, b.x), self.mulmod(yy, self.d_mod_p));
        let y = self.addmod(self.mulmod(a.x, b.y), self.mulmod(a.y, b.x));
        RingElem { x, y }
    }

    /// `mul` with both operands validated against the context.
    pub fn try_mul(&self, a: RingElem, b: RingElem) -> Result<RingElem> {
        Ok(self.mul(self.check(a)?, self.check(b)?))
    }

    /// Left-to-right square-and-multiply.
    pub fn pow(&self, base: RingElem, e: u64) -> RingElem {
        if e == 0 {
            return RingElem::ONE;
        }
        let mut acc = base;
        for bit in (0..63 - e.leading_zeros()).rev() {
            acc = self.mul(acc, acc);
            if e >> bit & 1 == 1 {
                acc = self.mul(acc, base);
            }
        }
        acc
    }

    /// `x^2 - d y^2 mod p`.
    pub fn norm(&self, a: RingElem) -> u32 {
        let xx = self.mulmod(a.x, a.x);
        let dyy = self.mulmod(self.mulmod(a.y, a.y) as u32, self.d_mod_p);
        let p = self.p as u64;
        ((xx + p - dyy) % p) as u32
    }
}
