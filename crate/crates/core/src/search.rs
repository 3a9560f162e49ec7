//! Generators and sweeps that locate incomplete and primitive numbers:
//! digit-word construction, quotient construction, the base-g repunit, the
//! small-order catalogue, and the divisor-ladder workflow over g^n - 1.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::arith::{factor, gcd, is_prime, multiplicative_order, Factorization};
use crate::cycles::{
    classify_with, enumerate_cycles_refine, Classification, ClassifyOptions, DigitWord,
    ExtremeCycle, Instance, Verdict,
};
use crate::error::{Error, Result};

/// Default budget on classify calls inside sweeps and the conjecture scan.
pub const DEFAULT_CLASSIFY_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    DigitWord,
    Quotient,
    Repunit,
    DivisorSweep,
    Scan,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Construction::DigitWord => "digit-word",
            Construction::Quotient => "quotient",
            Construction::Repunit => "repunit",
            Construction::DivisorSweep => "divisor-sweep",
            Construction::Scan => "scan",
        };
        write!(f, "{s}")
    }
}

/// A verified primitive number together with how it was found.
#[derive(Debug, Clone)]
pub struct PrimitiveRecord {
    pub m: u128,
    pub order: u128,
    pub construction: Construction,
    pub factorization: Factorization,
    pub cycles: Vec<ExtremeCycle>,
}

fn make_record(
    g: u128,
    m: u128,
    construction: Construction,
    cycles: Vec<ExtremeCycle>,
) -> Result<PrimitiveRecord> {
    let order = multiplicative_order(g, m)?.order;
    debug_assert!(cycles.iter().all(|c| c.len() as u128 == order));
    Ok(PrimitiveRecord {
        m,
        order,
        construction,
        factorization: factor(m),
        cycles,
    })
}

fn checked_pow(g: u128, n: u32) -> Result<u128> {
    g.checked_pow(n).ok_or(Error::Overflow("g^n"))
}

/// From a digit word (k_0.. k_{n-1}) builds m = (g^n - 1)/d with
/// d = gcd(sum k_i g^i, g^n - 1) and the extreme cycle through V/d. The
/// output is always incomplete, not necessarily primitive.
pub fn construct_from_digits(g: u128, word: &DigitWord) -> Result<(u128, ExtremeCycle)> {
    let v = word.value(g)?;
    if v == 0 {
        return Err(Error::InvalidWord);
    }
    let pn1 = checked_pow(g, word.len() as u32)? - 1;
    let d = gcd(v, pn1);
    let m = pn1 / d;
    let inst = Instance::new(g, m)?;
    let x0 = v / d;
    // the walk must close within the word length
    let mut walk = vec![x0];
    let mut x = x0;
    for _ in 0..word.len() {
        let (next, _) = crate::cycles::successor(&inst, x)?
            .ok_or_else(|| Error::HypothesisViolation("digit word did not close".into()))?;
        if next == x0 {
            return Ok((m, ExtremeCycle::from_walk(&inst, walk)));
        }
        walk.push(next);
        x = next;
    }
    Err(Error::HypothesisViolation("digit word did not close".into()))
}

/// m = (g^q - 1)/(g - 1) for q > g-1 coprime to g-1; incomplete with
/// o_g(m) = q. Returns (m, order).
pub fn construct_quotient(g: u128, q: u128) -> Result<(u128, u128)> {
    if q < g || gcd(q, g - 1) != 1 {
        return Err(Error::HypothesisViolation(format!(
            "need q > g-1 with gcd(q, g-1) = 1, got q = {q}, g = {g}"
        )));
    }
    let q32: u32 = q.try_into().map_err(|_| Error::Overflow("g^q"))?;
    let m = (checked_pow(g, q32)? - 1) / (g - 1);
    let order = multiplicative_order(g, m)?.order;
    debug_assert_eq!(order, q);
    Ok((m, order))
}

/// The base-g repunit m = (g^g - 1)/(g - 1), primitive with the unique
/// length-g cycle through the point with digits 1 2 .. (g-1) in base g.
pub fn repunit(g: u128) -> Result<PrimitiveRecord> {
    let g32: u32 = g.try_into().map_err(|_| Error::Overflow("g^g"))?;
    let m = (checked_pow(g, g32)? - 1) / (g - 1);
    let inst = Instance::new(g, m)?;
    // x0 = 1 2 3 .. (g-1) read in base g
    let mut x0 = 0u128;
    for digit in 1..g {
        x0 = x0
            .checked_mul(g)
            .and_then(|v| v.checked_add(digit))
            .ok_or(Error::Overflow("repunit cycle point"))?;
    }
    let cycles = enumerate_cycles_refine(&inst)?;
    debug_assert_eq!(cycles.len(), 1, "repunit must have a unique cycle");
    debug_assert!(cycles[0].points().contains(&x0));
    debug_assert_eq!(cycles[0].len() as u128, g);
    make_record(g, m, Construction::Repunit, cycles)
}

/// The complete catalogue of primitive numbers of order <= 5:
/// order 1 is {g-1}; orders 2 and 3 are empty; orders 4 and 5 hold
/// (g^4-1)/3 and (g^5-1)/3 exactly when 3 | g-1.
pub fn order_catalogue(g: u128, order: u128) -> Result<Vec<u128>> {
    match order {
        1 => Ok(vec![g - 1]),
        2 | 3 => Ok(Vec::new()),
        4 | 5 => {
            if (g - 1).is_multiple_of(3) {
                Ok(vec![(checked_pow(g, order as u32)? - 1) / 3])
            } else {
                Ok(Vec::new())
            }
        }
        _ => Err(Error::HypothesisViolation(format!(
            "order {order} is outside the catalogued range 1..=5"
        ))),
    }
}

/// The prime divisors of g^n - 1 with their orders; each order divides n.
pub fn prime_divisor_orders(g: u128, n: u32) -> Result<BTreeMap<u128, u128>> {
    if n == 0 {
        return Err(Error::HypothesisViolation("need n >= 1".into()));
    }
    let value = checked_pow(g, n)? - 1;
    let mut map = BTreeMap::new();
    for p in factor(value).distinct_primes() {
        let order = multiplicative_order(g, p)?.order;
        debug_assert_eq!(n as u128 % order, 0);
        map.insert(p, order);
    }
    Ok(map)
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub classify_budget: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            classify_budget: DEFAULT_CLASSIFY_BUDGET,
        }
    }
}

/// Walks the divisor lattice of g^n - 1 top-down: candidates containing a
/// known primitive shed one of its primes; the rest are classified, pruned
/// when complete, and recorded primitive when incomplete with every
/// one-prime-removed child complete. Returns the newly found records.
pub fn divisor_sweep(g: u128, n: u32, known_primitives: &[u128]) -> Result<Vec<PrimitiveRecord>> {
    divisor_sweep_with(g, n, known_primitives, &SweepOptions::default())
}

pub fn divisor_sweep_with(
    g: u128,
    n: u32,
    known_primitives: &[u128],
    opts: &SweepOptions,
) -> Result<Vec<PrimitiveRecord>> {
    if n == 0 {
        return Err(Error::HypothesisViolation("need n >= 1".into()));
    }
    let top = checked_pow(g, n)? - 1;
    let mut known: Vec<u128> = known_primitives.to_vec();
    if !known.contains(&(g - 1)) {
        known.push(g - 1);
    }
    let mut sweep = Sweep {
        g,
        memo: HashMap::new(),
        calls: 0,
        budget: opts.classify_budget,
    };
    let mut heap: BinaryHeap<u128> = BinaryHeap::new();
    let mut seen: BTreeSet<u128> = BTreeSet::new();
    heap.push(top);
    seen.insert(top);
    let mut found: Vec<PrimitiveRecord> = Vec::new();
    while let Some(c) = heap.pop() {
        if c == 1 {
            continue;
        }
        if let Some(&p_known) = known.iter().find(|&&k| k > 1 && c % k == 0 && c != k) {
            // shed one prime of the dividing primitive at a time
            for p in factor(p_known).distinct_primes() {
                let child = c / p;
                if seen.insert(child) {
                    heap.push(child);
                }
            }
            continue;
        }
        if known.contains(&c) {
            continue;
        }
        if sweep.is_complete(c)? {
            continue;
        }
        let children: Vec<u128> = factor(c).distinct_primes().map(|p| c / p).collect();
        sweep.classify_batch(&children)?;
        let mut all_complete = true;
        for &child in &children {
            if !sweep.is_complete(child)? {
                all_complete = false;
                if seen.insert(child) {
                    heap.push(child);
                }
            }
        }
        if all_complete {
            let cls = sweep.full(c)?;
            debug_assert!(cls.primitive);
            found.push(make_record(g, c, Construction::DivisorSweep, cls.cycles)?);
            known.push(c);
        }
    }
    found.sort_by_key(|r| r.m);
    Ok(found)
}

struct Sweep {
    g: u128,
    memo: HashMap<u128, bool>,
    calls: u64,
    budget: u64,
}

impl Sweep {
    fn charge(&mut self, amount: u64) -> Result<()> {
        self.calls += amount;
        if self.calls > self.budget {
            return Err(Error::ResourceLimit {
                needed: self.calls as u128,
                limit: self.budget as u128,
            });
        }
        Ok(())
    }

    fn is_complete(&mut self, c: u128) -> Result<bool> {
        if let Some(&v) = self.memo.get(&c) {
            return Ok(v);
        }
        self.charge(1)?;
        let v = self.full(c)?.verdict == Verdict::Complete;
        self.memo.insert(c, v);
        Ok(v)
    }

    fn full(&self, c: u128) -> Result<Classification> {
        let inst = Instance::new(self.g, c)?;
        classify_with(&inst, &ClassifyOptions::default())
    }

    /// Classifies the uncached candidates in parallel, then merges.
    fn classify_batch(&mut self, candidates: &[u128]) -> Result<()> {
        let todo: Vec<u128> = candidates
            .iter()
            .copied()
            .filter(|c| !self.memo.contains_key(c))
            .collect();
        if todo.is_empty() {
            return Ok(());
        }
        self.charge(todo.len() as u64)?;
        let g = self.g;
        let results: Result<Vec<(u128, bool)>> = todo
            .par_iter()
            .map(|&c| {
                let inst = Instance::new(g, c)?;
                let cls = classify_with(&inst, &ClassifyOptions::default())?;
                Ok((c, cls.verdict == Verdict::Complete))
            })
            .collect();
        for (c, v) in results? {
            self.memo.insert(c, v);
        }
        Ok(())
    }
}

/// Classifies every odd m <= m_max, sieving odd multiples of primitives
/// already found, and returns all primitive records ascending. Batches are
/// classified in parallel; the sieve grows only between batches.
pub fn scan_primitives(g: u128, m_max: u128) -> Result<Vec<PrimitiveRecord>> {
    scan_primitives_with(g, m_max, &SweepOptions::default())
}

pub fn scan_primitives_with(
    g: u128,
    m_max: u128,
    opts: &SweepOptions,
) -> Result<Vec<PrimitiveRecord>> {
    const BATCH: u128 = 2048;
    let mut found: Vec<PrimitiveRecord> = Vec::new();
    let mut calls: u64 = 0;
    let mut base = 1u128;
    while base <= m_max {
        let end = (base + 2 * BATCH).min(m_max + 1);
        let sieve: Vec<u128> = found.iter().map(|r| r.m).collect();
        let candidates: Vec<u128> = (base..end)
            .step_by(2)
            .filter(|&m| !sieve.iter().any(|&p| m % p == 0 && m != p))
            .collect();
        calls += candidates.len() as u64;
        if calls > opts.classify_budget {
            return Err(Error::ResourceLimit {
                needed: calls as u128,
                limit: opts.classify_budget as u128,
            });
        }
        let results: Result<Vec<(u128, Classification)>> = candidates
            .par_iter()
            .map(|&m| {
                let inst = Instance::new(g, m)?;
                Ok((m, classify_with(&inst, &ClassifyOptions::default())?))
            })
            .collect();
        for (m, cls) in results? {
            if cls.verdict == Verdict::Incomplete && cls.primitive {
                found.push(make_record(g, m, Construction::Scan, cls.cycles)?);
            }
        }
        base = end.max(base + 2 * BATCH);
        if base.is_multiple_of(2) {
            base += 1;
        }
    }
    found.sort_by_key(|r| r.m);
    Ok(found)
}

/// Evidence report for the first-primitive conjecture at scale g = p + 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConjectureReport {
    /// No primitive exists strictly between g-1 and the repunit.
    Verified { upper: u128 },
    /// A primitive below the repunit refutes the conjecture.
    Counterexample { m: u128 },
    /// The classify budget ran out at this candidate.
    BudgetExhausted { checked_to: u128 },
}

/// Scans (g-1, (g^g-1)/(g-1)) for primitives, evidence-gathering only.
pub fn conjecture_scan(g: u128) -> Result<ConjectureReport> {
    conjecture_scan_with(g, DEFAULT_CLASSIFY_BUDGET)
}

pub fn conjecture_scan_with(g: u128, budget: u64) -> Result<ConjectureReport> {
    if !is_prime(g - 1) {
        return Err(Error::HypothesisViolation(format!(
            "g - 1 = {} is not prime",
            g - 1
        )));
    }
    let g32: u32 = g.try_into().map_err(|_| Error::Overflow("g^g"))?;
    let upper = (checked_pow(g, g32)? - 1) / (g - 1);
    let mut calls = 0u64;
    let mut m = g + 1;
    while m < upper {
        if !m.is_multiple_of(g - 1) && gcd(m, g) == 1 {
            if calls >= budget {
                return Ok(ConjectureReport::BudgetExhausted { checked_to: m - 2 });
            }
            calls += 1;
            let inst = Instance::new(g, m)?;
            let cls = classify_with(&inst, &ClassifyOptions::default())?;
            if cls.verdict == Verdict::Incomplete && cls.primitive {
                return Ok(ConjectureReport::Counterexample { m });
            }
        }
        m += 2;
    }
    Ok(ConjectureReport::Verified { upper })
}
