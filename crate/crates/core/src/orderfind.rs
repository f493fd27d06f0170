//! Index `n(p)` of the first power of the fundamental unit lying in the
//! order of conductor `p`, and the quotient `q = q0 / n(p)`.
//!
//! `eps^nu` lies in the order of conductor `p` exactly when its `sqrt(d)`
//! coordinate vanishes mod `p`. The exponents with that property form the
//! multiples of `n(p)`, and `q0` (below) is always one of them, so `n(p)` is
//! recovered by stripping from `q0` every prime power that can be removed
//! while the coordinate stays zero.

use std::fmt;

use crate::arith::{factorize_trial, jacobi, PrimeTables};
use crate::error::{Error, Result};
use crate::pell::{check_conductor, UnitResidue};
use crate::ringmod::{RingCtx, RingElem};

/// Which of the four frequency sequences a `(d, p)` pair contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseKey {
    /// Norm +1, `(d/p) = +1`.
    J1 = 1,
    /// Norm +1, `(d/p) = -1`.
    J2 = 2,
    /// Norm -1, `(d/p) = +1`.
    J3 = 3,
    /// Norm -1, `(d/p) = -1`.
    J4 = 4,
}

impl CaseKey {
    pub const ALL: [CaseKey; 4] = [CaseKey::J1, CaseKey::J2, CaseKey::J3, CaseKey::J4];

    pub fn new(norm_sign: i8, ls: i32) -> Self {
        match (norm_sign > 0, ls > 0) {
            (true, true) => CaseKey::J1,
            (true, false) => CaseKey::J2,
            (false, true) => CaseKey::J3,
            (false, false) => CaseKey::J4,
        }
    }

    pub fn from_index(j: u8) -> Option<Self> {
        Self::ALL.get((j as usize).wrapping_sub(1)).copied()
    }

    pub fn j(self) -> u8 {
        self as u8
    }

    /// Position in a `[_; 4]` array.
    pub fn slot(self) -> usize {
        self as usize - 1
    }

    pub fn norm_sign(self) -> i8 {
        if matches!(self, CaseKey::J1 | CaseKey::J2) {
            1
        } else {
            -1
        }
    }

    pub fn legendre(self) -> i32 {
        if matches!(self, CaseKey::J1 | CaseKey::J3) {
            1
        } else {
            -1
        }
    }

    /// Table header, e.g. `N(eps)=+1, (d/p)=-1`.
    pub fn label(self) -> String {
        let sign = |s: i32| if s > 0 { "+1" } else { "-1" };
        format!(
            "N(eps)={}, (d/p)={}",
            sign(self.norm_sign() as i32),
            sign(self.legendre())
        )
    }
}

impl fmt::Display for CaseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "j={}", self.j())
    }
}

pub fn case_key(norm_sign: i8, ls: i32) -> CaseKey {
    CaseKey::new(norm_sign, ls)
}

/// Outcome for one `(d, p)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderResult {
    pub d: u64,
    pub p: u32,
    pub case: CaseKey,
    pub ls: i32,
    /// `(p - ls) / 2` for norm +1, `p - ls` for norm -1.
    pub q0: u32,
    /// `n(p)`.
    pub n: u32,
    pub q: u32,
}

/// The starting exponent: a multiple of `n(p)` fixed by the norm and `(d/p)`.
pub fn starting_exponent(p: u32, norm_sign: i8, ls: i32) -> u32 {
    let base = if ls > 0 { p - 1 } else { p + 1 };
    if norm_sign > 0 {
        base / 2
    } else {
        base
    }
}

/// Validated entry point; see [`order_and_quotient_unchecked`] for the sweep path.
pub fn order_and_quotient(
    unit: &UnitResidue,
    p: u32,
    d: u64,
    tables: &PrimeTables,
) -> Result<OrderResult> {
    check_conductor(d, p as u64)?;
    if unit.p != p || unit.d_mod_p as u64 != d % p as u64 {
        return Err(Error::InvalidArgument(format!(
            "unit residue is for p={}, not p={p}",
            unit.p
        )));
    }
    if p as u64 + 1 > tables.limit() as u64 {
        return Err(Error::InvalidArgument(format!(
            "prime tables up to {} cannot factor {}",
            tables.limit(),
            p as u64 + 1
        )));
    }
    order_and_quotient_unchecked(unit, d, tables)
}

/// Same as [`order_and_quotient`] but factors `q0` by trial division, for
/// single queries with `p` too large for a sieve.
pub fn order_and_quotient_single(unit: &UnitResidue, p: u32, d: u64) -> Result<OrderResult> {
    check_conductor(d, p as u64)?;
    if unit.p != p || unit.d_mod_p as u64 != d % p as u64 {
        return Err(Error::InvalidArgument(format!(
            "unit residue is for p={}, not p={p}",
            unit.p
        )));
    }
    let (ls, q0) = starting_point(unit);
    let factors = factorize_trial(q0 as u64)?;
    strip_prime_powers(unit, d, ls, q0, factors.pairs.into_iter())
}

fn starting_point(unit: &UnitResidue) -> (i32, u32) {
    let ls = jacobi(unit.d_mod_p as u64, unit.p as u64);
    debug_assert!(ls != 0);
    (ls, starting_exponent(unit.p, unit.norm_sign, ls))
}

#[inline]
pub(crate) fn order_and_quotient_unchecked(
    unit: &UnitResidue,
    d: u64,
    tables: &PrimeTables,
) -> Result<OrderResult> {
    let (ls, q0) = starting_point(unit);
    strip_prime_powers(unit, d, ls, q0, tables.prime_powers(q0))
}

fn strip_prime_powers(
    unit: &UnitResidue,
    d: u64,
    ls: i32,
    q0: u32,
    factors: impl Iterator<Item = (u32, u32)>,
) -> Result<OrderResult> {
    let p = unit.p;

    let ctx = RingCtx::new(p, d)?;
    let eps = RingElem::new(unit.x, unit.y);
    if ctx.pow(eps, q0 as u64).y != 0 {
        return Err(Error::Consistency(format!(
            "sqrt(d) coordinate of eps^{q0} is nonzero mod p (d={d}, p={p}, x={}, y={})",
            unit.x, unit.y
        )));
    }

    let mut quotient = 1u32;
    for (prime, exponent) in factors {
        // Largest b <= exponent with eps^(q0 / prime^b) still in the order.
        // The admissible b form an initial segment, so stop at the first miss.
        let mut strip = 1u32;
        for _ in 0..exponent {
            let next = strip * prime;
            if ctx.pow(eps, (q0 / next) as u64).y != 0 {
                break;
            }
            strip = next;
        }
        quotient *= strip;
    }

    Ok(OrderResult {
        d,
        p,
        case: CaseKey::new(unit.norm_sign, ls),
        ls,
        q0,
        n: q0 / quotient,
        q: quotient,
    })
}

/// Oracle: walk `eps, eps^2, ...` until the `sqrt(d)` coordinate vanishes.
pub fn naive_order(unit: &UnitResidue, p: u32, d: u64, cap: u64) -> Result<u64> {
    check_conductor(d, p as u64)?;
    if cap < p as u64 + 1 {
        return Err(Error::InvalidArgument(format!(
            "cap {cap} is below p + 1 = {}",
            p as u64 + 1
        )));
    }
    let ctx = RingCtx::new(p, d)?;
    let eps = ctx.check(RingElem::new(unit.x, unit.y))?;
    let mut acc = eps;
    for nu in 1..=cap {
        if acc.y == 0 {
            return Ok(nu);
        }
        acc = ctx.mul(acc, eps);
    }
    Err(Error::OracleFailure {
        d,
        p: p as u64,
        cap,
    })
}
