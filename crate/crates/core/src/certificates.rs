//! Theorem-rule verdicts that avoid cycle enumeration. Every certificate
//! carries a witness an independent checker can re-verify; rules whose
//! mathematical hypotheses fail return Inconclusive, and only structurally
//! invalid input raises. All threshold comparisons are exact integer
//! arithmetic; no floating point touches a verdict.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::arith::{self, factor, gcd, is_prime, lcm, mul_mod, multiplicative_order};
use crate::cycles::{cycle_point_bound, enumerate_cycles_refine, ExtremeCycle, Instance};
use crate::error::{Error, Result};

/// Cap on the orbit length walked while hunting group witnesses; orders
/// beyond it make th2_12 / th2_13 report Inconclusive rather than stall.
pub const DEFAULT_GROUP_SCAN_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rule {
    Lem2_6,
    Lem2_4_1,
    Lem2_5,
    Lem2_8,
    Th2_12,
    Th2_13,
    Th2_18,
    Lem2_24,
    Th2_26,
    Lem2_29,
    Th2_30,
    Cor2_32,
    Cor2_34,
    Cor2_35,
    Cor2_37_1,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Lem2_6 => "LEM_2_6",
            Rule::Lem2_4_1 => "LEM_2_4_1",
            Rule::Lem2_5 => "LEM_2_5",
            Rule::Lem2_8 => "LEM_2_8",
            Rule::Th2_12 => "TH_2_12",
            Rule::Th2_13 => "TH_2_13",
            Rule::Th2_18 => "TH_2_18",
            Rule::Lem2_24 => "LEM_2_24",
            Rule::Th2_26 => "TH_2_26",
            Rule::Lem2_29 => "LEM_2_29",
            Rule::Th2_30 => "TH_2_30",
            Rule::Cor2_32 => "COR_2_32",
            Rule::Cor2_34 => "COR_2_34",
            Rule::Cor2_35 => "COR_2_35",
            Rule::Cor2_37_1 => "COR_2_37_1",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertVerdict {
    Complete,
    NotPrimitive,
    Incomplete,
    Inconclusive,
}

impl fmt::Display for CertVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertVerdict::Complete => write!(f, "complete"),
            CertVerdict::NotPrimitive => write!(f, "not-primitive"),
            CertVerdict::Incomplete => write!(f, "incomplete"),
            CertVerdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Rule-specific payload that re-checks under an independent verifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// m/(g-1) < 1: the window holds no integer.
    EmptyWindow,
    /// The fixed point m/(g-1) with digit m.
    UnitCycle { point: u128 },
    /// A proper incomplete divisor and one of its cycles scaled to m.
    IncompleteDivisor { divisor: u128, scaled_cycle: ExtremeCycle },
    /// gcd(m, g) > 1 rules out primitivity.
    SharedFactor { gcd: u128 },
    /// c = g^exponent (mod m) landed in the theorem's witness range.
    GroupElement { residue: u128, exponent: u128 },
    /// o_g(p) is even, so -1 is a power of g.
    EvenOrder { order: u128 },
    /// g = root^2, so a square root of g is a power of g.
    SquareScale { root: u128 },
    /// An order/bound comparison that fired: order > bound (or >= for
    /// the LEM_2_24 rule), with the exact integer bound recorded.
    OrderThreshold { order: u128, bound: u128 },
    /// The (a, b) split compared by LEM_2_24 / LEM_2_29.
    Split { a: u128, b: u128, order_ab: u128, order_b: u128 },
    /// The verified base-case number of the TH_2_26 rule.
    BaseCase { value: u128 },
    /// Hypothesis checklist of the composite corollaries.
    Checklist { items: Vec<String> },
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub rule: Rule,
    pub verdict: CertVerdict,
    /// The number the verdict speaks about.
    pub subject: u128,
    pub witness: Witness,
}

impl Certificate {
    fn inconclusive(rule: Rule, subject: u128) -> Self {
        Certificate {
            rule,
            verdict: CertVerdict::Inconclusive,
            subject,
            witness: Witness::None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub known_incomplete: Vec<u128>,
    pub group_scan_cap: u128,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            known_incomplete: Vec::new(),
            group_scan_cap: DEFAULT_GROUP_SCAN_CAP,
        }
    }
}

/// The cyclic set {g^j mod m : j >= 0} of size o_g(m).
pub fn group_generated(g: u128, m: u128) -> Result<BTreeSet<u128>> {
    if gcd(g, m) != 1 {
        return Err(Error::NotCoprime { a: g, b: m });
    }
    let mut set = BTreeSet::new();
    let mut x = 1 % m;
    loop {
        if !set.insert(x) {
            return Ok(set);
        }
        x = mul_mod(x, g, m);
    }
}

/// Smallest n >= 0 with g^n >= num/den, i.e. ceil(log_g(num/den)) clamped
/// at 0; computed by repeated multiplication only.
fn ceil_log(g: u128, num: u128, den: u128) -> Result<u32> {
    debug_assert!(g >= 2 && den >= 1);
    let mut n = 0u32;
    let mut reach = den;
    while reach < num {
        reach = reach.checked_mul(g).ok_or(Error::Overflow("ceil_log"))?;
        n += 1;
    }
    Ok(n)
}

fn two_pow(n: u32) -> Result<u128> {
    if n >= 128 {
        return Err(Error::Overflow("2^n"));
    }
    Ok(1u128 << n)
}

fn integer_sqrt(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.saturating_mul(x) > n {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 1) <= n {
        x += 1;
    }
    x
}

fn square_root_of(g: u128) -> Option<u128> {
    let r = integer_sqrt(g);
    (r * r == g).then_some(r)
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::HypothesisViolation(msg.to_string()))
    }
}

/// Streams g^1, g^2, ... (mod m) until a residue from `targets` appears,
/// the order is exhausted, or `cap` steps pass.
fn hunt_witness(
    g: u128,
    m: u128,
    order: u128,
    targets: &HashSet<u128>,
    cap: u128,
) -> Option<(u128, u128)> {
    let mut x = 1 % m;
    let steps = order.min(cap);
    for j in 1..steps {
        x = mul_mod(x, g, m);
        if targets.contains(&x) {
            return Some((x, j));
        }
    }
    None
}

/// TH_2_12: m > g-1 odd, (g-1) not dividing m; if one of -1..-(g-2) or
/// 2..g-1 (mod m) is a power of g, then m is complete.
pub fn th2_12(g: u128, m: u128) -> Result<Certificate> {
    th2_12_with(g, m, DEFAULT_GROUP_SCAN_CAP)
}

pub fn th2_12_with(g: u128, m: u128, cap: u128) -> Result<Certificate> {
    require(m % 2 == 1 && m > g - 1, "need odd m > g-1")?;
    require(!m.is_multiple_of(g - 1), "need (g-1) not dividing m")?;
    require(gcd(g, m) == 1, "need gcd(g, m) = 1")?;
    let mut targets: HashSet<u128> = (2..=g - 1).collect();
    targets.extend((1..=g - 2).map(|c| m - c));
    let order = multiplicative_order(g, m)?.order;
    match hunt_witness(g, m, order, &targets, cap) {
        Some((residue, exponent)) => Ok(Certificate {
            rule: Rule::Th2_12,
            verdict: CertVerdict::Complete,
            subject: m,
            witness: Witness::GroupElement { residue, exponent },
        }),
        None => Ok(Certificate::inconclusive(Rule::Th2_12, m)),
    }
}

/// TH_2_13: m > g(g-1) odd, (g-1) not dividing m; if one of g+1..g(g-1)
/// (mod m) is a power of g, then m is complete.
pub fn th2_13(g: u128, m: u128) -> Result<Certificate> {
    th2_13_with(g, m, DEFAULT_GROUP_SCAN_CAP)
}

pub fn th2_13_with(g: u128, m: u128, cap: u128) -> Result<Certificate> {
    require(m % 2 == 1 && m > g * (g - 1), "need odd m > g(g-1)")?;
    require(!m.is_multiple_of(g - 1), "need (g-1) not dividing m")?;
    require(gcd(g, m) == 1, "need gcd(g, m) = 1")?;
    let targets: HashSet<u128> = (g + 1..=g * (g - 1)).collect();
    let order = multiplicative_order(g, m)?.order;
    match hunt_witness(g, m, order, &targets, cap) {
        Some((residue, exponent)) => Ok(Certificate {
            rule: Rule::Th2_13,
            verdict: CertVerdict::Complete,
            subject: m,
            witness: Witness::GroupElement { residue, exponent },
        }),
        None => Ok(Certificate::inconclusive(Rule::Th2_13, m)),
    }
}

/// TH_2_18: for a prime p > g-1, p^n is complete when o_g(p) is even, or
/// when g is a perfect square.
pub fn th2_18(g: u128, p: u128, n: u32) -> Result<Certificate> {
    require(is_prime(p), "p must be prime")?;
    require(p > g - 1, "need p > g-1")?;
    require(n >= 1, "need n >= 1")?;
    let mut subject = p;
    for _ in 1..n {
        subject = subject.checked_mul(p).ok_or(Error::Overflow("p^n"))?;
    }
    let order = multiplicative_order(g, p)?.order;
    if order % 2 == 0 {
        return Ok(Certificate {
            rule: Rule::Th2_18,
            verdict: CertVerdict::Complete,
            subject,
            witness: Witness::EvenOrder { order },
        });
    }
    if let Some(root) = square_root_of(g) {
        return Ok(Certificate {
            rule: Rule::Th2_18,
            verdict: CertVerdict::Complete,
            subject,
            witness: Witness::SquareScale { root },
        });
    }
    Ok(Certificate::inconclusive(Rule::Th2_18, subject))
}

/// LEM_2_24: for odd a, b > 1, if
/// o_g(ab) >= ((a/(g-1) - 2/g - 1 + g) / (g/2)) * o_g(b) then ab is not
/// primitive. Decided over a common denominator in exact integers.
pub fn lem2_24(g: u128, a: u128, b: u128) -> Result<Certificate> {
    require(a > 1 && b > 1, "need a, b > 1")?;
    require(a % 2 == 1 && b % 2 == 1, "need odd a, b")?;
    let ab = a.checked_mul(b).ok_or(Error::Overflow("a*b"))?;
    if gcd(ab, g) != 1 {
        // not primitive outright: primitive numbers are coprime to g
        return Ok(Certificate {
            rule: Rule::Lem2_8,
            verdict: CertVerdict::NotPrimitive,
            subject: ab,
            witness: Witness::SharedFactor { gcd: gcd(ab, g) },
        });
    }
    let order_ab = multiplicative_order(g, ab)?.order;
    let order_b = multiplicative_order(g, b)?.order;
    // o_g(ab) * g^2 (g-1)  >=  2 o_g(b) * (a g - 2(g-1) + g (g-1)^2)
    let lhs = order_ab
        .checked_mul(g * g)
        .and_then(|v| v.checked_mul(g - 1))
        .ok_or(Error::Overflow("lem2_24 lhs"))?;
    let term = a
        .checked_mul(g)
        .and_then(|v| v.checked_add(g * (g - 1) * (g - 1)))
        .and_then(|v| v.checked_sub(2 * (g - 1)))
        .ok_or(Error::Overflow("lem2_24 rhs"))?;
    let rhs = order_b
        .checked_mul(2)
        .and_then(|v| v.checked_mul(term))
        .ok_or(Error::Overflow("lem2_24 rhs"))?;
    if lhs >= rhs {
        Ok(Certificate {
            rule: Rule::Lem2_24,
            verdict: CertVerdict::NotPrimitive,
            subject: ab,
            witness: Witness::Split { a, b, order_ab, order_b },
        })
    } else {
        Ok(Certificate::inconclusive(Rule::Lem2_24, ab))
    }
}

/// LEM_2_29: for odd a, b >= 1 coprime to g, if
/// o_g(ab) > 2^ceil(log_g(a/(g-1))) * o_g(b) then ab is not primitive.
pub fn lem2_29(g: u128, a: u128, b: u128) -> Result<Certificate> {
    require(a >= 1 && b >= 1 && a % 2 == 1 && b % 2 == 1, "need odd a, b >= 1")?;
    let ab = a.checked_mul(b).ok_or(Error::Overflow("a*b"))?;
    if gcd(ab, g) != 1 {
        return Err(Error::NotCoprime { a: ab, b: g });
    }
    let order_ab = multiplicative_order(g, ab)?.order;
    let order_b = multiplicative_order(g, b)?.order;
    let n = ceil_log(g, a, g - 1)?;
    let bound = two_pow(n)?
        .checked_mul(order_b)
        .ok_or(Error::Overflow("lem2_29 bound"))?;
    if order_ab > bound {
        Ok(Certificate {
            rule: Rule::Lem2_29,
            verdict: CertVerdict::NotPrimitive,
            subject: ab,
            witness: Witness::Split { a, b, order_ab, order_b },
        })
    } else {
        Ok(Certificate::inconclusive(Rule::Lem2_29, ab))
    }
}

/// TH_2_30: when o_g(m) exceeds the cycle-point bound, m is not primitive;
/// with all proper divisors certified complete by the caller, m is complete.
pub fn th2_30(g: u128, m: u128, proper_divisors_complete: bool) -> Result<Certificate> {
    require(m % 2 == 1, "need odd m")?;
    require(gcd(g, m) == 1, "need gcd(g, m) = 1")?;
    require(!m.is_multiple_of(g - 1), "need (g-1) not dividing m")?;
    let inst = Instance::new(g, m)?;
    let bound = cycle_point_bound(&inst)?;
    let order = multiplicative_order(g, m)?.order;
    if order > bound {
        Ok(Certificate {
            rule: Rule::Th2_30,
            verdict: if proper_divisors_complete {
                CertVerdict::Complete
            } else {
                CertVerdict::NotPrimitive
            },
            subject: m,
            witness: Witness::OrderThreshold { order, bound },
        })
    } else {
        Ok(Certificate::inconclusive(Rule::Th2_30, m))
    }
}

/// COR_2_32: o_g(m) > 2^ceil(log_g(m/(g-1))) makes m non-primitive.
pub fn cor2_32(g: u128, m: u128) -> Result<Certificate> {
    require(m % 2 == 1, "need odd m")?;
    if gcd(g, m) != 1 {
        return Err(Error::NotCoprime { a: g, b: m });
    }
    let order = multiplicative_order(g, m)?.order;
    let bound = two_pow(ceil_log(g, m, g - 1)?)?;
    if order > bound {
        Ok(Certificate {
            rule: Rule::Cor2_32,
            verdict: CertVerdict::NotPrimitive,
            subject: m,
            witness: Witness::OrderThreshold { order, bound },
        })
    } else {
        Ok(Certificate::inconclusive(Rule::Cor2_32, m))
    }
}

/// TH_2_26: with j_i the p_i-adic valuation of lcm(o_g(p_i)), completeness
/// of the base case prod p_i^(iota_i + j_i) extends to every exponent
/// vector. The base case must be certified by the caller.
pub fn th2_26(g: u128, primes: &[u128], base_case_complete: bool) -> Result<Certificate> {
    require(!primes.is_empty(), "need at least one prime")?;
    for (i, &p) in primes.iter().enumerate() {
        require(is_prime(p), "entries must be prime")?;
        require(p % 2 == 1, "entries must be odd")?;
        require(gcd(g, p) == 1, "entries must be coprime to g")?;
        require(!primes[..i].contains(&p), "entries must be distinct")?;
    }
    let mut big_l = 1u128;
    for &p in primes {
        big_l = lcm(big_l, multiplicative_order(g, p)?.order)?;
    }
    let mut base = 1u128;
    for &p in primes {
        let mut j = 0u32;
        let mut l = big_l;
        while l.is_multiple_of(p) {
            l /= p;
            j += 1;
        }
        let exp = arith::iota(g, p)? as u32 + j;
        for _ in 0..exp {
            base = base.checked_mul(p).ok_or(Error::Overflow("base case"))?;
        }
    }
    require(base_case_complete, "base case not certified complete by caller")?;
    let subject = primes.iter().product();
    Ok(Certificate {
        rule: Rule::Th2_26,
        verdict: CertVerdict::Complete,
        subject,
        witness: Witness::BaseCase { value: base },
    })
}

struct PrimeData {
    p: u128,
    order: u128,
    iota: u128,
}

fn load_primes(g: u128, primes: &[u128]) -> Result<Vec<PrimeData>> {
    for (i, &p) in primes.iter().enumerate() {
        require(is_prime(p), "entries must be prime")?;
        require(p % 2 == 1, "entries must be odd")?;
        require(!primes[..i].contains(&p), "entries must be distinct")?;
    }
    primes
        .iter()
        .map(|&p| {
            let profile = multiplicative_order(g, p)?;
            Ok(PrimeData {
                p,
                order: profile.order,
                iota: profile.iota.unwrap_or(1),
            })
        })
        .collect()
}

/// Shared hypothesis core of the composite corollaries: simple primes above
/// g-1, no order divisible by a listed prime, and the subset inequality
/// lcm(orders of S) > 2^ceil(log_g(prod S / (g-1))) for every |S| >= 2.
fn composite_checks(g: u128, data: &[PrimeData], items: &mut Vec<String>) -> Result<bool> {
    for d in data {
        if d.p < g {
            return Ok(false);
        }
        if d.iota != 1 {
            return Ok(false);
        }
        items.push(format!("{} simple with o_{}({}) = {}", d.p, g, d.p, d.order));
    }
    for d in data {
        if data.iter().any(|e| d.order % e.p == 0) {
            return Ok(false);
        }
    }
    let r = data.len();
    require(r <= 20, "too many primes")?;
    for mask in 1u32..(1 << r) {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut l = 1u128;
        let mut prod = 1u128;
        for (i, d) in data.iter().enumerate() {
            if mask >> i & 1 == 1 {
                l = lcm(l, d.order)?;
                prod = prod.checked_mul(d.p).ok_or(Error::Overflow("subset product"))?;
            }
        }
        let bound = two_pow(ceil_log(g, prod, g - 1)?)?;
        if l <= bound {
            return Ok(false);
        }
        items.push(format!("lcm {l} > {bound} for subset product {prod}"));
    }
    Ok(true)
}

/// COR_2_34: simple primes > g-1 whose singleton powers are complete
/// (even order or square g), pairwise order/prime non-divisibility, and the
/// subset lcm inequality give completeness of every product of powers.
pub fn cor2_34(g: u128, primes: &[u128]) -> Result<Certificate> {
    let data = load_primes(g, primes)?;
    let subject = primes.iter().product();
    let mut items = Vec::new();
    for d in &data {
        if d.order % 2 == 0 {
            items.push(format!("o_{}({}) = {} even", g, d.p, d.order));
        } else if square_root_of(g).is_some() {
            items.push(format!("{} odd order, g = {} a perfect square", d.p, g));
        } else {
            return Ok(Certificate::inconclusive(Rule::Cor2_34, subject));
        }
    }
    if !composite_checks(g, &data, &mut items)? {
        return Ok(Certificate::inconclusive(Rule::Cor2_34, subject));
    }
    Ok(Certificate {
        rule: Rule::Cor2_34,
        verdict: CertVerdict::Complete,
        subject,
        witness: Witness::Checklist { items },
    })
}

/// COR_2_35, the perfect-square variant: the square scale certifies every
/// singleton, the subset inequalities are checked in the exact 2^ceil(log)
/// form.
pub fn cor2_35(g: u128, primes: &[u128]) -> Result<Certificate> {
    let data = load_primes(g, primes)?;
    let subject = primes.iter().product();
    let Some(root) = square_root_of(g) else {
        return Ok(Certificate::inconclusive(Rule::Cor2_35, subject));
    };
    let mut items = vec![format!("g = {g} = {root}^2")];
    if !composite_checks(g, &data, &mut items)? {
        return Ok(Certificate::inconclusive(Rule::Cor2_35, subject));
    }
    Ok(Certificate {
        rule: Rule::Cor2_35,
        verdict: CertVerdict::Complete,
        subject,
        witness: Witness::Checklist { items },
    })
}

/// COR_2_37_1: a complete, p a simple prime > g-1 not dividing a, with
/// gcd(o_g(p), o_g(a)) = 1 and o_g(p) > 2^ceil(log_g(p/(g-1))); then p^k a
/// is complete for every k. Completeness of a is established internally by
/// the rule engine alone.
pub fn cor2_37_1(g: u128, a: u128, p: u128) -> Result<Certificate> {
    require(is_prime(p), "p must be prime")?;
    require(p % 2 == 1, "p must be odd")?;
    require(a >= 1 && a % 2 == 1, "a must be odd and >= 1")?;
    let subject = a.checked_mul(p).ok_or(Error::Overflow("p*a"))?;
    if p < g || a.is_multiple_of(p) || gcd(a, g) != 1 || gcd(g, p) != 1 {
        return Ok(Certificate::inconclusive(Rule::Cor2_37_1, subject));
    }
    let p_profile = multiplicative_order(g, p)?;
    if p_profile.iota != Some(1) {
        return Ok(Certificate::inconclusive(Rule::Cor2_37_1, subject));
    }
    let order_a = multiplicative_order(g, a)?.order;
    if gcd(p_profile.order, order_a) != 1 {
        return Ok(Certificate::inconclusive(Rule::Cor2_37_1, subject));
    }
    let bound = two_pow(ceil_log(g, p, g - 1)?)?;
    if p_profile.order <= bound {
        return Ok(Certificate::inconclusive(Rule::Cor2_37_1, subject));
    }
    let Some(chain) = complete_by_rules(g, a, DEFAULT_GROUP_SCAN_CAP, 8) else {
        return Ok(Certificate::inconclusive(Rule::Cor2_37_1, subject));
    };
    Ok(Certificate {
        rule: Rule::Cor2_37_1,
        verdict: CertVerdict::Complete,
        subject,
        witness: Witness::Checklist {
            items: vec![
                format!("o_{g}({p}) = {} > {bound}", p_profile.order),
                format!("gcd(o_{g}({p}), o_{g}({a})) = 1"),
                format!("{a} complete by {chain}"),
            ],
        },
    })
}

/// Establishes completeness of a through the rule set only (no cycle
/// enumeration); returns the rule chain on success.
fn complete_by_rules(g: u128, a: u128, cap: u128, depth: u32) -> Option<String> {
    if depth == 0 {
        return None;
    }
    if a == 1 {
        return Some("trivial".into());
    }
    if a <= g - 2 {
        return Some("LEM_2_6".into());
    }
    if a.is_multiple_of(g - 1) || gcd(a, g) != 1 {
        return None;
    }
    let f = factor(a);
    let primes: Vec<u128> = f.distinct_primes().collect();
    if primes.len() == 1 {
        let p = primes[0];
        if p > g - 1 {
            if let Ok(c) = th2_18(g, p, 1) {
                if c.verdict == CertVerdict::Complete {
                    return Some("TH_2_18".into());
                }
            }
        }
    } else {
        if let Ok(c) = cor2_34(g, &primes) {
            if c.verdict == CertVerdict::Complete {
                return Some("COR_2_34".into());
            }
        }
        // peel one prime power off and recurse
        for &p in &primes {
            let mut rest = a;
            while rest.is_multiple_of(p) {
                rest /= p;
            }
            let Ok(cert) = peel_hypotheses(g, rest, p) else { continue };
            if !cert {
                continue;
            }
            if let Some(inner) = complete_by_rules(g, rest, cap, depth - 1) {
                return Some(format!("COR_2_37_1({p}) after {inner}"));
            }
        }
    }
    for th in [th2_12_with, th2_13_with] {
        if let Ok(c) = th(g, a, cap) {
            if c.verdict == CertVerdict::Complete {
                return Some(c.rule.to_string());
            }
        }
    }
    None
}

/// The purely arithmetic hypotheses of cor2_37_1 for the pair (rest, p).
fn peel_hypotheses(g: u128, rest: u128, p: u128) -> Result<bool> {
    if p < g || gcd(rest, g) != 1 {
        return Ok(false);
    }
    let p_profile = multiplicative_order(g, p)?;
    if p_profile.iota != Some(1) {
        return Ok(false);
    }
    let order_rest = multiplicative_order(g, rest)?.order;
    if gcd(p_profile.order, order_rest) != 1 {
        return Ok(false);
    }
    let bound = two_pow(ceil_log(g, p, g - 1)?)?;
    Ok(p_profile.order > bound)
}

/// Runs every applicable rule cheap-first and returns the certificates that
/// reached a verdict. Never contradicts classify.
pub fn certify(g: u128, m: u128) -> Result<Vec<Certificate>> {
    certify_with(g, m, &CertifyOptions::default())
}

pub fn certify_with(g: u128, m: u128, opts: &CertifyOptions) -> Result<Vec<Certificate>> {
    let inst = Instance::new(g, m)?;
    let mut certs = Vec::new();

    if m <= g - 2 {
        certs.push(Certificate {
            rule: Rule::Lem2_6,
            verdict: CertVerdict::Complete,
            subject: m,
            witness: Witness::EmptyWindow,
        });
        return Ok(certs);
    }
    if m == g - 1 {
        certs.push(Certificate {
            rule: Rule::Lem2_4_1,
            verdict: CertVerdict::Incomplete,
            subject: m,
            witness: Witness::UnitCycle { point: 1 },
        });
        return Ok(certs);
    }
    // LEM_2_5 with the cache (g-1 is always known incomplete)
    let mut known = vec![g - 1];
    known.extend(opts.known_incomplete.iter().copied());
    if let Some(&d) = known.iter().filter(|&&d| d > 1 && d < m && m.is_multiple_of(d)).min() {
        let sub = Instance::new(g, d)?;
        let sub_cycles = enumerate_cycles_refine(&sub)?;
        debug_assert!(!sub_cycles.is_empty());
        let k = m / d;
        let scaled_points: Vec<u128> = sub_cycles[0].points().iter().map(|&x| x * k).collect();
        let scaled = ExtremeCycle::from_walk(&inst, scaled_points);
        certs.push(Certificate {
            rule: Rule::Lem2_5,
            verdict: CertVerdict::Incomplete,
            subject: m,
            witness: Witness::IncompleteDivisor { divisor: d, scaled_cycle: scaled.clone() },
        });
        certs.push(Certificate {
            rule: Rule::Lem2_5,
            verdict: CertVerdict::NotPrimitive,
            subject: m,
            witness: Witness::IncompleteDivisor { divisor: d, scaled_cycle: scaled },
        });
    }
    if gcd(g, m) != 1 {
        certs.push(Certificate {
            rule: Rule::Lem2_8,
            verdict: CertVerdict::NotPrimitive,
            subject: m,
            witness: Witness::SharedFactor { gcd: gcd(g, m) },
        });
        certs.sort_by_key(|c| c.rule);
        return Ok(certs);
    }

    let push = |c: Certificate, certs: &mut Vec<Certificate>| {
        if c.verdict != CertVerdict::Inconclusive {
            certs.push(c);
        }
    };

    if m > g - 1 && !m.is_multiple_of(g - 1) {
        push(th2_12_with(g, m, opts.group_scan_cap)?, &mut certs);
        if m > g * (g - 1) {
            push(th2_13_with(g, m, opts.group_scan_cap)?, &mut certs);
        }
    }
    let f = factor(m);
    let primes: Vec<u128> = f.distinct_primes().collect();
    if primes.len() == 1 && primes[0] > g - 1 {
        push(th2_18(g, primes[0], f.exponent_of(primes[0]))?, &mut certs);
    }
    push(cor2_32(g, m)?, &mut certs);
    if !m.is_multiple_of(g - 1) {
        push(th2_30(g, m, false)?, &mut certs);
    }
    if primes.len() >= 2 {
        push(cor2_34(g, &primes)?, &mut certs);
        push(cor2_35(g, &primes)?, &mut certs);
        for &p in &primes {
            let mut rest = m;
            while rest.is_multiple_of(p) {
                rest /= p;
            }
            push(cor2_37_1(g, rest, p)?, &mut certs);
        }
    }
    certs.sort_by_key(|c| c.rule);
    certs.dedup();
    Ok(certs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::mod_pow;

    #[test]
    fn group_generated_examples() {
        let set: Vec<u128> = group_generated(6, 7).unwrap().into_iter().collect();
        assert_eq!(set, vec![1, 6]);
        let set: Vec<u128> = group_generated(4, 5).unwrap().into_iter().collect();
        assert_eq!(set, vec![1, 4]);
        let set: Vec<u128> = group_generated(16, 17).unwrap().into_iter().collect();
        assert_eq!(set, vec![1, 16]);
        assert!(group_generated(6, 9).is_err());
    }

    #[test]
    fn th2_12_examples() {
        let c = th2_12(6, 7).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
        // witness is -1 = 6 (mod 7)
        assert_eq!(c.witness, Witness::GroupElement { residue: 6, exponent: 1 });

        let c = th2_12(4, 67).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
        if let Witness::GroupElement { residue, exponent } = c.witness {
            assert_eq!(mod_pow(4, exponent, 67), residue);
        } else {
            panic!("wrong witness shape");
        }

        let c = th2_12(6, 55987).unwrap();
        assert_eq!(c.verdict, CertVerdict::Inconclusive);

        assert!(th2_12(4, 9).is_err()); // divisible by g-1
        assert!(th2_12(4, 2).is_err());
    }

    #[test]
    fn th2_13_examples() {
        let c = th2_13(4, 251).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
        assert_eq!(c.witness, Witness::GroupElement { residue: 5, exponent: 4 });

        let c = th2_13(6, 55987).unwrap();
        assert_eq!(c.verdict, CertVerdict::Inconclusive);
    }

    #[test]
    fn th2_18_examples() {
        let c = th2_18(4, 5, 3).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
        assert_eq!(c.subject, 125);

        let c = th2_18(6, 7, 1).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
        assert_eq!(c.witness, Witness::EvenOrder { order: 2 });

        let c = th2_18(6, 55987, 1).unwrap();
        assert_eq!(c.verdict, CertVerdict::Inconclusive);

        assert!(th2_18(4, 9, 1).is_err());
    }

    #[test]
    fn lem2_24_examples() {
        assert!(lem2_24(4, 1, 5).is_err());
        let c = lem2_24(6, 25, 7).unwrap();
        assert_eq!(c.verdict, CertVerdict::NotPrimitive);
        assert_eq!(c.subject, 175);
        // shared factor with g reports LEM_2_8
        let c = lem2_24(6, 3, 5).unwrap();
        assert_eq!(c.rule, Rule::Lem2_8);
        assert_eq!(c.verdict, CertVerdict::NotPrimitive);
    }

    #[test]
    fn lem2_29_examples() {
        let c = lem2_29(6, 13, 1).unwrap();
        assert_eq!(c.verdict, CertVerdict::NotPrimitive);
        let c = lem2_29(6, 55987, 1).unwrap();
        assert_eq!(c.verdict, CertVerdict::Inconclusive);
        let c = lem2_29(4, 85, 1).unwrap();
        assert_eq!(c.verdict, CertVerdict::Inconclusive);
    }

    #[test]
    fn th2_30_examples() {
        let c = th2_30(6, 13, false).unwrap();
        assert_eq!(c.verdict, CertVerdict::NotPrimitive);
        assert_eq!(c.witness, Witness::OrderThreshold { order: 12, bound: 2 });
        let c = th2_30(4, 85, false).unwrap();
        assert_eq!(c.verdict, CertVerdict::Inconclusive);
        let c = th2_30(6, 55987, false).unwrap();
        assert_eq!(c.verdict, CertVerdict::Inconclusive);
        // caller-certified divisors upgrade to Complete
        let c = th2_30(6, 13, true).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
    }

    #[test]
    fn cor2_32_examples() {
        assert_eq!(cor2_32(6, 13).unwrap().verdict, CertVerdict::NotPrimitive);
        assert_eq!(cor2_32(6, 55987).unwrap().verdict, CertVerdict::Inconclusive);
        assert_eq!(cor2_32(4, 3).unwrap().verdict, CertVerdict::Inconclusive);
    }

    #[test]
    fn th2_26_examples() {
        let c = th2_26(16, &[17, 19], true).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
        // base case: iota = 1, j = 0 for both, so 17 * 19
        assert_eq!(c.witness, Witness::BaseCase { value: 323 });
        let c = th2_26(36, &[37, 43], true).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
        assert!(th2_26(16, &[17, 19], false).is_err());
        assert!(th2_26(16, &[15], true).is_err());
    }

    #[test]
    fn cor2_34_examples() {
        let c = cor2_34(16, &[17, 19]).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
        let c = cor2_34(36, &[37, 43]).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
    }

    #[test]
    fn cor2_35_examples() {
        let c = cor2_35(16, &[17, 19]).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
        // g = 6 is not a perfect square
        let c = cor2_35(6, &[7, 11]).unwrap();
        assert_eq!(c.verdict, CertVerdict::Inconclusive);
    }

    #[test]
    fn cor2_37_1_examples() {
        let c = cor2_37_1(36, 37, 43).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
        let c = cor2_37_1(36, 37 * 37, 43).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
        // chained: 47^k 53^l 59^j for g = 36
        let c = cor2_37_1(36, 47 * 53, 59).unwrap();
        assert_eq!(c.verdict, CertVerdict::Complete);
    }

    #[test]
    fn certify_examples() {
        let certs = certify(4, 5).unwrap();
        assert!(certs.iter().any(|c| c.verdict == CertVerdict::Complete));

        let certs = certify(4, 9).unwrap();
        assert!(certs
            .iter()
            .any(|c| c.rule == Rule::Lem2_5 && c.verdict == CertVerdict::Incomplete));

        let certs = certify(6, 55987).unwrap();
        assert!(certs.iter().all(|c| c.verdict != CertVerdict::Complete));
    }

    #[test]
    fn ceil_log_matches_definition() {
        // ceil(log_g x) = k iff g^(k-1) < x <= g^k, for x = num/den
        for g in [4u128, 6, 16] {
            for num in 1u128..200 {
                for den in 1u128..8 {
                    let k = ceil_log(g, num, den).unwrap();
                    // g^k * den >= num
                    assert!(g.pow(k) * den >= num);
                    if k > 0 {
                        assert!(g.pow(k - 1) * den < num);
                    }
                }
            }
        }
    }
}
