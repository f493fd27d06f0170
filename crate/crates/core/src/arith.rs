//! Integer substrate: prime sieves with a smallest-prime-factor table,
//! factorization, the Legendre symbol and squarefree classification of `d`.

use crate::error::{Error, Result};

/// Primality bitset plus smallest prime factor for every `n <= limit`.
///
/// Immutable after construction; shared by reference across sweep workers.
#[derive(Debug, Clone)]
pub struct PrimeTables {
    limit: u32,
    is_prime: Vec<u64>,
    spf: Vec<u32>,
}

impl PrimeTables {
    /// Linear sieve over `[0, limit]`.
    pub fn build(limit: u32) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidArgument(format!(
                "prime table limit must be at least 2, got {limit}"
            )));
        }
        let len = limit as usize + 1;
        let mut spf = vec![0u32; len];
        let mut primes: Vec<u32> = Vec::new();
        let mut is_prime = vec![0u64; len.div_ceil(64)];
        for n in 2..len {
            if spf[n] == 0 {
                spf[n] = n as u32;
                primes.push(n as u32);
                is_prime[n / 64] |= 1 << (n % 64);
            }
            let least = spf[n];
            for &p in &primes {
                if p > least {
                    break;
                }
                let m = n * p as usize;
                if m >= len {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(Self {
            limit,
            is_prime,
            spf,
        })
    }

    pub fn limit(&self) -> u32 {
        self.limit
    }

    pub fn is_prime(&self, n: u32) -> bool {
        n <= self.limit && self.is_prime[n as usize / 64] >> (n % 64) & 1 == 1
    }

    /// Smallest prime factor of `n`; `None` for `n < 2` or beyond the limit.
    pub fn spf(&self, n: u32) -> Option<u32> {
        if n < 2 || n > self.limit {
            None
        } else {
            Some(self.spf[n as usize])
        }
    }

    /// Primes in `[lo, hi]`, ascending.
    pub fn primes_in(&self, lo: u32, hi: u32) -> Vec<u32> {
        let hi = hi.min(self.limit);
        (lo.max(2)..=hi).filter(|&n| self.is_prime(n)).collect()
    }

    /// Allocation-free walk over the prime powers of `n`. Caller guarantees
    /// `1 <= n <= limit`.
    pub(crate) fn prime_powers(&self, n: u32) -> PrimePowers<'_> {
        debug_assert!(n >= 1 && n <= self.limit);
        PrimePowers {
            spf: &self.spf,
            rest: n,
        }
    }

    pub fn factorize(&self, n: u32) -> Result<Factorization> {
        if n == 0 || n > self.limit {
            return Err(Error::InvalidArgument(format!(
                "cannot factor {n} with tables up to {}",
                self.limit
            )));
        }
        Ok(Factorization {
            pairs: self.prime_powers(n).collect(),
        })
    }
}

pub(crate) struct PrimePowers<'a> {
    spf: &'a [u32],
    rest: u32,
}

impl Iterator for PrimePowers<'_> {
    type Item = (u32, u32);

    fn next(&mut self) -> Option<(u32, u32)> {
        if self.rest <= 1 {
            return None;
        }
        let p = self.spf[self.rest as usize];
        let mut e = 0;
        while self.rest.is_multiple_of(p) {
            self.rest /= p;
            e += 1;
        }
        Some((p, e))
    }
}

/// Prime factorization as `(prime, exponent)` pairs with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub pairs: Vec<(u32, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.pairs.iter().map(|&(p, e)| (p as u64).pow(e)).product()
    }
}

/// Trial-division factorization for one-off values beyond any sieve.
pub fn factorize_trial(mut n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidArgument("cannot factor 0".into()));
    }
    let mut pairs = Vec::new();
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k) {
            let mut e = 0;
            while n.is_multiple_of(k) {
                n /= k;
                e += 1;
            }
            pairs.push((k as u32, e));
        }
        k += if k == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let p = u32::try_from(n)
            .map_err(|_| Error::InvalidArgument(format!("prime factor {n} exceeds 32 bits")))?;
        pairs.push((p, 1));
    }
    Ok(Factorization { pairs })
}

/// Trial-division primality, for validating single arguments outside the sweep.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut k = 3u64;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

/// Jacobi symbol `(a/n)` for odd `n`, by the binary reciprocity iteration.
/// Returns 0 when `gcd(a, n) > 1`.
pub fn jacobi(mut a: u64, mut n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut t = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        // (2/n) = -1 iff n = 3, 5 (mod 8)
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Legendre symbol `(d/p)` for an odd prime `p` not dividing `d`.
pub fn legendre(d: i64, p: u64) -> Result<i32> {
    if p.is_multiple_of(2) || !is_prime_u64(p) {
        return Err(Error::InvalidArgument(format!("{p} is not an odd prime")));
    }
    let a = d.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Err(Error::PDividesD {
            d: d.unsigned_abs(),
            p,
        });
    }
    Ok(jacobi(a, p))
}

/// Whether `d` is admissible as a field parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DClass {
    /// Squarefree with `d mod 4` equal to the stored residue (2 or 3).
    Valid(u8),
    Invalid,
}

impl DClass {
    pub fn is_valid(self) -> bool {
        matches!(self, DClass::Valid(_))
    }
}

pub fn is_squarefree(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut rest = d;
    let mut k = 2u64;
    while k * k <= rest {
        if rest.is_multiple_of(k) {
            rest /= k;
            if rest.is_multiple_of(k) {
                return false;
            }
        }
        k += 1;
    }
    true
}

pub fn classify_d(d: u64) -> DClass {
    let residue = (d % 4) as u8;
    if d >= 2 && matches!(residue, 2 | 3) && is_squarefree(d) {
        DClass::Valid(residue)
    } else {
        DClass::Invalid
    }
}

/// Validity mask for every `d` in `[lo, hi]`: squarefree and `d = 2, 3 (mod 4)`.
/// Index `i` corresponds to `d = lo + i`.
pub fn valid_d_mask(lo: u64, hi: u64) -> Vec<bool> {
    if hi < lo {
        return Vec::new();
    }
    let len = (hi - lo + 1) as usize;
    let mut mask: Vec<bool> = (lo..=hi)
        .map(|d| d >= 2 && matches!(d % 4, 2 | 3))
        .collect();
    // Strike multiples of k^2 for every k >= 2; composite k are redundant but harmless.
    let mut k = 2u64;
    while k * k <= hi {
        if k == 2 || k % 2 == 1 {
            let sq = k * k;
            let mut m = lo.div_ceil(sq) * sq;
            while m <= hi {
                mask[(m - lo) as usize] = false;
                m += sq;
            }
        }
        k += 1;
    }
    debug_assert_eq!(mask.len(), len);
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_up_to_ten() {
        let t = PrimeTables::build(10).unwrap();
        let primes: Vec<u32> = (0..=10).filter(|&n| t.is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7]);
        assert_eq!(t.spf(9), Some(3));
        assert_eq!(t.spf(10), Some(2));
        assert_eq!(t.spf(7), Some(7));
        assert_eq!(t.spf(1), None);
    }

    #[test]
    fn tiny_limit_rejected() {
        assert!(matches!(
            PrimeTables::build(1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn factorize_examples() {
        let t = PrimeTables::build(100).unwrap();
        assert_eq!(t.factorize(6).unwrap().pairs, vec![(2, 1), (3, 1)]);
        assert_eq!(t.factorize(4).unwrap().pairs, vec![(2, 2)]);
        assert!(t.factorize(1).unwrap().pairs.is_empty());
        assert!(t.factorize(0).is_err());
        assert!(t.factorize(101).is_err());
    }

    #[test]
    fn factorization_reconstructs_every_value() {
        let t = PrimeTables::build(50_000).unwrap();
        for n in 1..=50_000u32 {
            let f = t.factorize(n).unwrap();
            assert_eq!(f.value(), n as u64);
            assert!(f.pairs.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.pairs.iter().all(|&(p, e)| t.is_prime(p) && e >= 1));
        }
    }

    #[test]
    fn trial_factorization_agrees_with_tables() {
        let t = PrimeTables::build(5000).unwrap();
        for n in 1..=5000u32 {
            assert_eq!(factorize_trial(n as u64).unwrap(), t.factorize(n).unwrap());
        }
        assert_eq!(
            factorize_trial(4_294_967_292).unwrap().pairs,
            vec![(2, 2), (3, 2), (7, 1), (11, 1), (31, 1), (151, 1), (331, 1)]
        );
        assert_eq!(
            factorize_trial(4_294_967_291).unwrap().pairs,
            vec![(4_294_967_291, 1)]
        );
        assert!(factorize_trial(0).is_err());
    }

    #[test]
    fn sieve_agrees_with_trial_division() {
        let t = PrimeTables::build(20_000).unwrap();
        for n in 0..=20_000u32 {
            assert_eq!(t.is_prime(n), is_prime_u64(n as u64), "n={n}");
        }
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(2, 7).unwrap(), 1);
        assert_eq!(legendre(3, 5).unwrap(), -1);
        assert!(matches!(legendre(6, 3), Err(Error::PDividesD { .. })));
        assert!(matches!(legendre(2, 9), Err(Error::InvalidArgument(_))));
        assert!(matches!(legendre(3, 2), Err(Error::InvalidArgument(_))));
        assert_eq!(legendre(-1, 5).unwrap(), 1);
        assert_eq!(legendre(-1, 7).unwrap(), -1);
    }

    #[test]
    fn legendre_matches_square_search() {
        for p in (3..=200u64).filter(|&p| is_prime_u64(p)) {
            let squares: Vec<bool> = {
                let mut s = vec![false; p as usize];
                for x in 1..p {
                    s[(x * x % p) as usize] = true;
                }
                s
            };
            for d in 1..p {
                let expected = if squares[d as usize] { 1 } else { -1 };
                assert_eq!(legendre(d as i64, p).unwrap(), expected, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_d(2), DClass::Valid(2));
        assert_eq!(classify_d(3), DClass::Valid(3));
        assert_eq!(classify_d(5), DClass::Invalid);
        assert_eq!(classify_d(12), DClass::Invalid);
        assert_eq!(classify_d(18), DClass::Invalid);
        assert_eq!(classify_d(19), DClass::Valid(3));
    }

    fn squarefree_by_trial_division(d: u64) -> bool {
        let mut p = 2;
        while p * p <= d {
            if d.is_multiple_of(p * p) {
                return false;
            }
            p += 1;
        }
        true
    }

    #[test]
    fn mask_matches_trial_division_to_one_million() {
        let mask = valid_d_mask(2, 1_000_000);
        for (i, &valid) in mask.iter().enumerate() {
            let d = 2 + i as u64;
            let expected = matches!(d % 4, 2 | 3) && squarefree_by_trial_division(d);
            assert_eq!(valid, expected, "d={d}");
            if d <= 20_000 {
                assert_eq!(classify_d(d).is_valid(), expected, "d={d}");
            }
        }
    }

    #[test]
    fn mask_with_offset_window() {
        let mask = valid_d_mask(1000, 1100);
        for (i, &valid) in mask.iter().enumerate() {
            assert_eq!(valid, classify_d(1000 + i as u64).is_valid());
        }
    }
}
