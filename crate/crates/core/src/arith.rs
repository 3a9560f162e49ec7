//! Integer arithmetic: primality, factorization, divisors and multiplicative
//! orders. Everything runs on `u128` with exact checked arithmetic, which
//! covers the 60..70-bit values the searches produce with room to spare.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Witness bases that make Miller-Rabin deterministic below 3.3 * 10^24,
/// comfortably past 2^64.
const MR_BASES: [u128; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Randomized rounds on top of [`MR_BASES`] for inputs at or above 2^64.
const MR_EXTRA_ROUNDS: u64 = 28;

static MR_SEED: AtomicU64 = AtomicU64::new(0x9e37_79b9_7f4a_7c15);

/// Sets the seed that drives the randomized Miller-Rabin rounds used for
/// inputs >= 2^64. Every operation is deterministic for a fixed seed.
pub fn set_probabilistic_seed(seed: u64) {
    MR_SEED.store(seed, Ordering::Relaxed);
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

pub fn lcm(a: u128, b: u128) -> Result<u128> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b)).checked_mul(b).ok_or(Error::Overflow("lcm"))
}

/// a + b mod m for a, b < m, safe for any modulus up to u128::MAX.
fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

/// a * b mod m without overflow for any operands.
pub fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    debug_assert!(m >= 1);
    if m == 1 {
        return 0;
    }
    let mut a = a % m;
    let mut b = b % m;
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
        b >>= 1;
        if b > 0 {
            a = add_mod(a, a, m);
        }
    }
    acc
}

/// base^exponent mod modulus by binary exponentiation.
pub fn mod_pow(base: u128, mut exponent: u128, modulus: u128) -> u128 {
    debug_assert!(modulus >= 1);
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u128;
    let mut base = base % modulus;
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = mul_mod(result, base, modulus);
        }
        exponent >>= 1;
        base = mul_mod(base, base, modulus);
    }
    result
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn miller_rabin_round(n: u128, base: u128, d: u128, s: u32) -> bool {
    let base = base % n;
    if base == 0 {
        return true;
    }
    let mut x = mod_pow(base, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Primality test: deterministic below 2^64, error < 2^-80 above
/// (12 fixed witnesses plus 28 seeded pseudo-random rounds).
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    for &base in &MR_BASES {
        if !miller_rabin_round(n, base, d, s) {
            return false;
        }
    }
    if n >= 1 << 64 {
        let seed = MR_SEED.load(Ordering::Relaxed);
        let mut state = seed ^ (n as u64) ^ ((n >> 64) as u64);
        for _ in 0..MR_EXTRA_ROUNDS {
            state = splitmix64(state);
            // draw a base in [2, n-2]
            let wide = ((state as u128) << 64) | splitmix64(state ^ 0x5851_f42d) as u128;
            let base = 2 + wide % (n - 3);
            if !miller_rabin_round(n, base, d, s) {
                return false;
            }
        }
    }
    true
}

/// Prime factorization, sorted ascending by prime with exponents >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u128, u32)>,
}

impl Factorization {
    /// The empty factorization (value 1).
    pub fn one() -> Self {
        Factorization { factors: Vec::new() }
    }

    /// Builds a factorization from explicit pairs, checking the type
    /// invariants: strictly increasing primes, exponents >= 1, and a product
    /// that fits in u128.
    pub fn from_pairs(pairs: Vec<(u128, u32)>) -> Result<Self> {
        for window in pairs.windows(2) {
            if window[0].0 >= window[1].0 {
                return Err(Error::HypothesisViolation(
                    "factorization primes must be strictly increasing".into(),
                ));
            }
        }
        for &(p, e) in &pairs {
            if e == 0 {
                return Err(Error::HypothesisViolation(
                    "factorization exponents must be >= 1".into(),
                ));
            }
            if !is_prime(p) {
                return Err(Error::NotPrime { n: p });
            }
        }
        let f = Factorization { factors: pairs };
        f.value()?;
        Ok(f)
    }

    pub fn factors(&self) -> &[(u128, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn distinct_primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u128) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// The factored value, i.e. the product of prime^exponent.
    pub fn value(&self) -> Result<u128> {
        let mut acc = 1u128;
        for &(p, e) in &self.factors {
            for _ in 0..e {
                acc = acc.checked_mul(p).ok_or(Error::Overflow("factorization value"))?;
            }
        }
        Ok(acc)
    }

    pub fn divisor_count(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |acc, &(_, e)| acc * (e as u128 + 1))
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(p, e)| {
                if e == 1 {
                    p.to_string()
                } else {
                    format!("{p}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// Multiplicative order data for g modulo m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderProfile {
    /// The base g.
    pub base: u128,
    /// The modulus m.
    pub modulus: u128,
    /// o_g(m), the least k >= 1 with g^k = 1 (mod m).
    pub order: u128,
    pub order_factorization: Factorization,
    /// iota_g(m): the largest l with o_g(m^l) = o_g(m); present only when m
    /// is an odd prime.
    pub iota: Option<u128>,
}

const WHEEL: [u128; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
const TRIAL_LIMIT: u128 = 10_000;

/// Prime factorization of n >= 1: wheel trial division up to 10^4, then
/// Pollard rho with Brent cycling on what remains.
pub fn factor(n: u128) -> Factorization {
    assert!(n >= 1, "factor requires n >= 1");
    let mut map: BTreeMap<u128, u32> = BTreeMap::new();
    let mut rest = n;
    for p in [2u128, 3, 5] {
        while rest.is_multiple_of(p) {
            *map.entry(p).or_insert(0) += 1;
            rest /= p;
        }
    }
    let mut p = 7u128;
    let mut wheel = WHEEL.iter().cycle();
    while p <= TRIAL_LIMIT && p * p <= rest {
        while rest.is_multiple_of(p) {
            *map.entry(p).or_insert(0) += 1;
            rest /= p;
        }
        p += wheel.next().unwrap();
    }
    if rest > 1 {
        if p * p > rest {
            *map.entry(rest).or_insert(0) += 1;
        } else {
            split(rest, &mut map);
        }
    }
    Factorization {
        factors: map.into_iter().collect(),
    }
}

fn split(n: u128, map: &mut BTreeMap<u128, u32>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        *map.entry(n).or_insert(0) += 1;
        return;
    }
    let d = pollard_brent(n);
    split(d, map);
    split(n / d, map);
}

/// One non-trivial factor of an odd composite n, Brent's cycle variant.
fn pollard_brent(n: u128) -> u128 {
    debug_assert!(n > 1 && !is_prime(n) && n % 2 == 1);
    for c in 1u128.. {
        if let Some(d) = brent_attempt(n, c) {
            return d;
        }
    }
    unreachable!()
}

fn brent_attempt(n: u128, c: u128) -> Option<u128> {
    let f = |x: u128| add_mod(mul_mod(x, x, n), c % n, n);
    let m = 128u64;
    let mut y = 2u128;
    let mut r = 1u64;
    let mut q = 1u128;
    let mut g = 1u128;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0u64;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// All positive divisors of the factored value, sorted ascending.
pub fn divisors(f: &Factorization) -> Vec<u128> {
    let mut out = vec![1u128];
    for &(p, e) in f.factors() {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for &d in &out {
            let mut pe = 1u128;
            for _ in 0..=e {
                next.push(d * pe);
                if pe.checked_mul(p).is_none() {
                    break;
                }
                pe *= p;
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

/// Order of g modulo the odd prime p, by reducing p - 1.
fn order_mod_prime(g: u128, p: u128) -> u128 {
    let mut t = p - 1;
    for q in factor(p - 1).distinct_primes() {
        while t.is_multiple_of(q) && mod_pow(g, t / q, p) == 1 {
            t /= q;
        }
    }
    debug_assert_eq!(mod_pow(g, t, p), 1);
    t
}

/// Order of g modulo p^k: the order mod p, lifted one power at a time.
fn order_mod_prime_power(g: u128, p: u128, k: u32) -> Result<u128> {
    let mut order = order_mod_prime(g, p);
    let mut pk = p;
    for _ in 1..k {
        pk = pk.checked_mul(p).ok_or(Error::Overflow("prime power"))?;
        if mod_pow(g, order, pk) != 1 {
            order = order.checked_mul(p).ok_or(Error::Overflow("order lift"))?;
        }
    }
    Ok(order)
}

fn order_mod(g: u128, m: u128) -> Result<u128> {
    if m == 1 {
        return Ok(1);
    }
    let mut result = 1u128;
    for &(p, k) in factor(m).factors() {
        result = lcm(result, order_mod_prime_power(g, p, k)?)?;
    }
    Ok(result)
}

/// iota_g(p) for an odd prime p coprime to g; assumes the caller validated.
fn iota_unchecked(g: u128, p: u128) -> u128 {
    let order = order_mod_prime(g, p);
    let mut l = 1u128;
    let mut pl = p;
    while let Some(next) = pl.checked_mul(p) {
        if mod_pow(g, order, next) != 1 {
            break;
        }
        l += 1;
        pl = next;
    }
    l
}

/// o_g(m) with its factorization, computed by group-exponent reduction per
/// prime power of m (never by linear scan). m = 1 yields the trivial order 1.
pub fn multiplicative_order(g: u128, m: u128) -> Result<OrderProfile> {
    if m == 0 {
        return Err(Error::HypothesisViolation("modulus must be >= 1".into()));
    }
    if gcd(g, m) != 1 {
        return Err(Error::NotCoprime { a: g, b: m });
    }
    let order = order_mod(g, m)?;
    let iota = (m > 2 && is_prime(m)).then(|| iota_unchecked(g, m));
    Ok(OrderProfile {
        base: g,
        modulus: m,
        order,
        order_factorization: factor(order),
        iota,
    })
}

/// iota_g(p): the largest l with o_g(p^l) = o_g(p).
pub fn iota(g: u128, p: u128) -> Result<u128> {
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    if gcd(g, p) != 1 {
        return Err(Error::NotCoprime { a: g, b: p });
    }
    Ok(iota_unchecked(g, p))
}

/// o_g of a product of prime powers via the closed form
/// prod p_i^max(k_i - j_i - iota_i, 0) * lcm(o_g(p_i)), where j_i is the
/// p_i-adic valuation of the lcm. Exponent-0 entries contribute nothing.
pub fn order_of_power_product(g: u128, entries: &[(u128, u32)]) -> Result<u128> {
    let active: Vec<(u128, u32)> = entries.iter().copied().filter(|&(_, k)| k > 0).collect();
    for (i, &(p, _)) in active.iter().enumerate() {
        if !is_prime(p) {
            return Err(Error::NotPrime { n: p });
        }
        if p % 2 == 0 || gcd(g, p) != 1 {
            return Err(Error::NotCoprime { a: g, b: p });
        }
        if active[..i].iter().any(|&(q, _)| q == p) {
            return Err(Error::HypothesisViolation(format!("repeated prime {p}")));
        }
    }
    let mut big_l = 1u128;
    for &(p, _) in &active {
        big_l = lcm(big_l, order_mod_prime(g, p))?;
    }
    let mut result = big_l;
    for &(p, k) in &active {
        let mut j = 0u32;
        let mut l = big_l;
        while l.is_multiple_of(p) {
            l /= p;
            j += 1;
        }
        let iota = iota_unchecked(g, p) as u32;
        let extra = k.saturating_sub(j + iota);
        for _ in 0..extra {
            result = result.checked_mul(p).ok_or(Error::Overflow("order of product"))?;
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(6, 0, 55987), 1);
        assert_eq!(mod_pow(6, 7, 55987), 1);
        assert_eq!(mod_pow(16, 2, 17), 1);
    }

    #[test]
    fn is_prime_examples() {
        assert!(is_prime(55987));
        assert!(!is_prime(1));
        assert!(is_prime(3154757));
        assert!(!is_prime(0));
        assert!(is_prime(2));
        assert!(!is_prime(9331));
    }

    #[test]
    fn is_prime_beyond_64_bits() {
        // Mersenne prime 2^107 - 1 exercises the randomized rounds
        assert!(is_prime((1u128 << 107) - 1));
        assert!(!is_prime((1u128 << 101) - 1));
        assert!(!is_prime(1u128 << 100));
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor(9331).factors(), &[(7, 1), (31, 1), (43, 1)]);
        assert_eq!(factor(279937).factors(), &[(7, 2), (29, 1), (197, 1)]);
        assert_eq!(factor(1).factors(), &[]);
        // the quotient (4^13 - 1) / 3 splits into two primes
        assert_eq!(factor(22369621).factors(), &[(2731, 1), (8191, 1)]);
    }

    #[test]
    fn factor_large_semiprime() {
        let n = 178481u128 * 2796203;
        assert_eq!(factor(n).factors(), &[(178481, 1), (2796203, 1)]);
    }

    #[test]
    fn divisors_examples() {
        let f = Factorization::from_pairs(vec![(3, 1)]).unwrap();
        assert_eq!(divisors(&f), vec![1, 3]);
        let f = factor(9331);
        let d = divisors(&f);
        assert_eq!(d.len(), 8);
        assert_eq!(*d.last().unwrap(), 9331);
        assert_eq!(divisors(&Factorization::one()), vec![1]);
    }

    #[test]
    fn multiplicative_order_examples() {
        assert_eq!(multiplicative_order(6, 55987).unwrap().order, 7);
        assert_eq!(multiplicative_order(16, 19).unwrap().order, 9);
        assert_eq!(multiplicative_order(36, 43).unwrap().order, 3);
        assert_eq!(multiplicative_order(6, 1).unwrap().order, 1);
        assert_eq!(
            multiplicative_order(6, 9),
            Err(Error::NotCoprime { a: 6, b: 9 })
        );
    }

    #[test]
    fn iota_examples() {
        assert_eq!(iota(16, 17).unwrap(), 1);
        assert_eq!(iota(36, 43).unwrap(), 1);
        assert_eq!(iota(16, 19).unwrap(), 1);
        assert_eq!(iota(16, 15), Err(Error::NotPrime { n: 15 }));
        assert_eq!(iota(6, 3), Err(Error::NotCoprime { a: 6, b: 3 }));
        // o_36(43^2) = 129 and o_16(19^2) = 171 pin the simple-prime checks
        assert_eq!(multiplicative_order(36, 43 * 43).unwrap().order, 129);
        assert_eq!(multiplicative_order(16, 19 * 19).unwrap().order, 171);
    }

    #[test]
    fn order_of_power_product_examples() {
        assert_eq!(order_of_power_product(16, &[(17, 1), (19, 1)]).unwrap(), 18);
        assert_eq!(order_of_power_product(16, &[(17, 2)]).unwrap(), 34);
        assert_eq!(order_of_power_product(6, &[]).unwrap(), 1);
        assert_eq!(order_of_power_product(6, &[(7, 0)]).unwrap(), 1);
    }

    #[test]
    fn prop_2_19_order_of_prime_powers() {
        // o_g(p^k) = p^(k - iota) * o_g(p) for k > iota, grid p <= 100, k <= 3
        for g in [4u128, 6, 16, 36] {
            for p in [3u128, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97] {
                if gcd(g, p) != 1 {
                    continue;
                }
                let base = multiplicative_order(g, p).unwrap().order;
                let i = iota(g, p).unwrap();
                for k in 1u32..=3 {
                    let pk = p.pow(k);
                    let got = multiplicative_order(g, pk).unwrap().order;
                    let expect = if (k as u128) <= i {
                        base
                    } else {
                        p.pow(k - i as u32) * base
                    };
                    assert_eq!(got, expect, "g={g} p={p} k={k}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn order_is_minimal(g in 2u128..200, m in 3u128..50_000) {
            prop_assume!(m % 2 == 1 && gcd(g, m) == 1);
            let profile = multiplicative_order(g, m).unwrap();
            prop_assert_eq!(mod_pow(g, profile.order, m), 1);
            for q in profile.order_factorization.distinct_primes() {
                prop_assert_ne!(mod_pow(g, profile.order / q, m), 1);
            }
        }

        #[test]
        fn prop_2_17_lcm_law(
            g in 2u128..60,
            a in (1u128..1_000).prop_map(|v| 2 * v + 1),
            b in (1u128..1_000).prop_map(|v| 2 * v + 1),
        ) {
            prop_assume!(gcd(a, b) == 1);
            prop_assume!(gcd(g, a) == 1 && gcd(g, b) == 1);
            let oa = multiplicative_order(g, a).unwrap().order;
            let ob = multiplicative_order(g, b).unwrap().order;
            let oab = multiplicative_order(g, a * b).unwrap().order;
            prop_assert_eq!(oab, lcm(oa, ob).unwrap());
        }

        #[test]
        fn factor_roundtrip(n in 1u128..=u64::MAX as u128) {
            let f = factor(n);
            prop_assert_eq!(f.value().unwrap(), n);
            for (p, e) in f.factors() {
                prop_assert!(is_prime(*p));
                prop_assert!(*e >= 1);
            }
            for w in f.factors().windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
        }

        #[test]
        fn divisor_count_matches(n in 1u128..5_000_000) {
            let f = factor(n);
            let d = divisors(&f);
            prop_assert_eq!(d.len() as u128, f.divisor_count());
            prop_assert!(d.iter().all(|x| n % x == 0));
        }

        #[test]
        fn power_product_matches_direct(
            g in prop::sample::select(vec![4u128, 6, 10, 16]),
            ka in 0u32..3, kb in 0u32..3,
        ) {
            let (pa, pb) = (7u128, 11u128);
            prop_assume!(gcd(g, pa) == 1 && gcd(g, pb) == 1);
            let closed = order_of_power_product(g, &[(pa, ka), (pb, kb)]).unwrap();
            let expanded = pa.pow(ka) * pb.pow(kb);
            let direct = multiplicative_order(g, expanded).unwrap().order;
            prop_assert_eq!(closed, direct);
        }
    }
}
