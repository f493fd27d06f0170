//! Continued fraction of `sqrt(d)` and the fundamental unit it yields.
//!
//! For `d = 2, 3 (mod 4)` the fundamental unit is `x1 + y1 sqrt(d)` where
//! `(x1, y1)` is the convergent `h_{l-1} / k_{l-1}` at the end of the first
//! period of length `l`, and its norm is `(-1)^l`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::arith::{classify_d, DClass};
use crate::error::{Error, Result};

/// Guard against a runaway expansion. No admissible `d` below `2^40` comes close.
pub const MAX_PERIOD: usize = 10_000_000;

/// A validated field parameter: `d` squarefree with `d = 2, 3 (mod 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldParams {
    d: u64,
    floor_sqrt_d: u64,
}

impl FieldParams {
    pub fn new(d: u64) -> Result<Self> {
        if d > 1 << 40 {
            return Err(Error::InvalidArgument(format!("d={d} is out of range")));
        }
        match classify_d(d) {
            DClass::Valid(_) => Ok(Self {
                d,
                floor_sqrt_d: isqrt(d),
            }),
            DClass::Invalid => Err(Error::InvalidArgument(format!(
                "d={d} must be squarefree and congruent to 2 or 3 mod 4"
            ))),
        }
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn floor_sqrt_d(&self) -> u64 {
        self.floor_sqrt_d
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// One full period `a_0; a_1, ..., a_l` of the continued fraction of `sqrt(d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion {
    d: u64,
    partial_quotients: Vec<u64>,
}

impl CfExpansion {
    pub fn d(&self) -> u64 {
        self.d
    }

    /// `a_0, ..., a_l`; the last entry equals `2 a_0`.
    pub fn partial_quotients(&self) -> &[u64] {
        &self.partial_quotients
    }

    pub fn period(&self) -> usize {
        self.partial_quotients.len() - 1
    }

    pub fn norm_sign(&self) -> i8 {
        if self.period().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Quotients driving the convergent recurrence up to `h_{l-1}, k_{l-1}`.
    fn convergent_quotients(&self) -> &[u64] {
        &self.partial_quotients[..self.period()]
    }

    /// Fundamental unit reduced mod `p`, running the convergent recurrence
    /// with residues only. Caller guarantees `p` is an odd prime below `2^32`
    /// that does not divide `d`.
    pub(crate) fn unit_mod_p_unchecked(&self, p: u32) -> UnitResidue {
        let m = p as u64;
        // (h_{-1}, h_{-2}) = (1, 0), (k_{-1}, k_{-2}) = (0, 1)
        let (mut h1, mut h2) = (1u64, 0u64);
        let (mut k1, mut k2) = (0u64, 1u64);
        for &a in self.convergent_quotients() {
            let a = a % m;
            let h = (a * h1 + h2) % m;
            let k = (a * k1 + k2) % m;
            (h2, h1) = (h1, h);
            (k2, k1) = (k1, k);
        }
        UnitResidue {
            x: h1 as u32,
            y: k1 as u32,
            p,
            d_mod_p: (self.d % m) as u32,
            norm_sign: self.norm_sign(),
        }
    }
}

/// Expands `sqrt(d)` with the `(P, Q)` recurrence until the state after the
/// first step recurs.
pub fn cf_expand(params: &FieldParams) -> CfExpansion {
    let d = params.d;
    let a0 = params.floor_sqrt_d;
    let bound = 2 * a0 + 1;

    let step = |p: u64, q: u64| -> (u64, u64, u64) {
        let a = (p + a0) / q;
        let p_next = a * q - p;
        let q_next = (d - p_next * p_next) / q;
        assert!(
            p_next <= bound && q_next >= 1 && q_next <= bound,
            "continued fraction state out of bounds for d={d}: P={p_next} Q={q_next}"
        );
        (a, p_next, q_next)
    };

    let mut quotients = Vec::new();
    let (a, p1, q1) = step(0, 1);
    quotients.push(a);
    let (mut p, mut q) = (p1, q1);
    loop {
        let (a, p_next, q_next) = step(p, q);
        quotients.push(a);
        if (p_next, q_next) == (p1, q1) {
            break;
        }
        (p, q) = (p_next, q_next);
        assert!(
            quotients.len() <= MAX_PERIOD,
            "continued fraction period of sqrt({d}) exceeds {MAX_PERIOD}"
        );
    }
    CfExpansion {
        d,
        partial_quotients: quotients,
    }
}

/// Fundamental solution of `x^2 - d y^2 = +-1` in exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitExact {
    pub x1: BigUint,
    pub y1: BigUint,
    pub norm_sign: i8,
}

impl UnitExact {
    pub fn reduce(&self, p: u32) -> (u32, u32) {
        let m = BigUint::from(p);
        let x = (&self.x1 % &m)
            .to_u32_digits()
            .first()
            .copied()
            .unwrap_or(0);
        let y = (&self.y1 % &m)
            .to_u32_digits()
            .first()
            .copied()
            .unwrap_or(0);
        (x, y)
    }
}

pub fn fundamental_unit_exact(params: &FieldParams) -> Result<UnitExact> {
    let cf = cf_expand(params);
    let (mut h1, mut h2) = (BigUint::one(), BigUint::zero());
    let (mut k1, mut k2) = (BigUint::zero(), BigUint::one());
    for &a in cf.convergent_quotients() {
        let h = &h1 * a + &h2;
        let k = &k1 * a + &k2;
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
    }
    let norm_sign = cf.norm_sign();

    let lhs = &h1 * &h1;
    let rhs = &k1 * &k1 * params.d;
    let holds = if norm_sign == 1 {
        lhs == rhs + 1u32
    } else {
        lhs + 1u32 == rhs
    };
    if !holds {
        return Err(Error::Consistency(format!(
            "Pell identity fails for d={} with norm {norm_sign}",
            params.d
        )));
    }
    Ok(UnitExact {
        x1: h1,
        y1: k1,
        norm_sign,
    })
}

/// The fundamental unit reduced mod an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitResidue {
    pub x: u32,
    pub y: u32,
    pub p: u32,
    pub d_mod_p: u32,
    pub norm_sign: i8,
}

impl UnitResidue {
    /// `x^2 - d y^2 mod p`.
    pub fn norm_mod_p(&self) -> u32 {
        let m = self.p as u64;
        let xx = self.x as u64 * self.x as u64 % m;
        let dyy = self.y as u64 * self.y as u64 % m * self.d_mod_p as u64 % m;
        ((xx + m - dyy) % m) as u32
    }
}

pub fn fundamental_unit_mod_p(params: &FieldParams, p: u64) -> Result<UnitResidue> {
    check_conductor(params.d, p)?;
    Ok(cf_expand(params).unit_mod_p_unchecked(p as u32))
}

/// Odd prime below `2^32` not dividing `d`.
pub(crate) fn check_conductor(d: u64, p: u64) -> Result<()> {
    if p.is_multiple_of(2) || p >= 1 << 32 || !crate::arith::is_prime_u64(p) {
        return Err(Error::InvalidArgument(format!(
            "{p} is not an odd prime below 2^32"
        )));
    }
    if d.is_multiple_of(p) {
        return Err(Error::PDividesD { d, p });
    }
    Ok(())
}
