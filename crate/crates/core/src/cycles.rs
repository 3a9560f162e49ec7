//! Extreme-cycle enumeration and the complete / incomplete / primitive
//! classification for a digit set {0, m} at scale g.
//!
//! Two independent searches are provided: an exhaustive walk of the successor
//! graph over the integer window (scan) and a branch-and-bound refinement of
//! attractor intervals (refine). They must return identical cycle sets.

use std::collections::BTreeSet;
use std::fmt;

use crate::arith::{self, gcd};
use crate::error::{Error, Result};

/// Default ceiling on the scan window; larger instances must use refine.
pub const DEFAULT_SCAN_CEILING: u128 = 100_000_000;

/// Default number of integers at which refine stops splitting an interval
/// and tests candidates directly.
pub const DEFAULT_LEAF_THRESHOLD: u128 = 4;

/// The pair (g, m): even scale g >= 4, odd digit m >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instance {
    g: u128,
    m: u128,
}

impl Instance {
    pub fn new(g: u128, m: u128) -> Result<Self> {
        if g < 4 || !g.is_multiple_of(2) || m.is_multiple_of(2) {
            return Err(Error::InvalidInstance { g, m });
        }
        Ok(Instance { g, m })
    }

    pub fn g(&self) -> u128 {
        self.g
    }

    pub fn m(&self) -> u128 {
        self.m
    }

    /// floor(m / (g-1)): every non-trivial cycle point lies in [1, window].
    pub fn window(&self) -> u128 {
        self.m / (self.g - 1)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(g={}, m={})", self.g, self.m)
    }
}

/// A 0/1 word (k_0, ..., k_{n-1}); k_i scales the digit applied at step i,
/// so the word value is sum k_i g^i and the i-th map is x -> (x + m k_i)/g.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitWord {
    bits: Vec<u8>,
}

impl DigitWord {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() || bits.iter().any(|&b| b > 1) || bits.iter().all(|&b| b == 0) {
            return Err(Error::InvalidWord);
        }
        Ok(DigitWord { bits })
    }

    /// Parses a string over {0,1}, read left to right as k_0 ... k_{n-1}.
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidWord),
            })
            .collect::<Result<_>>()?;
        DigitWord::new(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// sum k_i g^i.
    pub fn value(&self, g: u128) -> Result<u128> {
        let mut acc = 0u128;
        for &b in self.bits.iter().rev() {
            acc = acc
                .checked_mul(g)
                .and_then(|v| v.checked_add(b as u128))
                .ok_or(Error::Overflow("digit word value"))?;
        }
        Ok(acc)
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// A non-trivial extreme cycle in canonical rotation (smallest point first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremeCycle {
    points: Vec<u128>,
    digits: DigitWord,
}

impl ExtremeCycle {
    /// Builds a cycle from points listed in successor order; rotates so the
    /// smallest point comes first and rederives the digit word.
    pub(crate) fn from_walk(inst: &Instance, walk: Vec<u128>) -> Self {
        debug_assert!(!walk.is_empty());
        let start = walk
            .iter()
            .enumerate()
            .min_by_key(|&(_, &x)| x)
            .map(|(i, _)| i)
            .unwrap();
        let mut points = Vec::with_capacity(walk.len());
        points.extend_from_slice(&walk[start..]);
        points.extend_from_slice(&walk[..start]);
        let bits: Vec<u8> = points
            .iter()
            .map(|&x| if x % inst.g == 0 { 0 } else { 1 })
            .collect();
        let cycle = ExtremeCycle {
            points,
            digits: DigitWord { bits },
        };
        debug_assert!(verify_cycle(inst, cycle.points(), cycle.digits()));
        cycle
    }

    pub fn points(&self) -> &[u128] {
        &self.points
    }

    pub fn digits(&self) -> &DigitWord {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn smallest(&self) -> u128 {
        self.points[0]
    }

    pub fn gcd_points(&self) -> u128 {
        self.points.iter().copied().fold(0, gcd)
    }

    pub fn point_set(&self) -> BTreeSet<u128> {
        self.points.iter().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Complete,
    Incomplete,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Complete => write!(f, "complete"),
            Verdict::Incomplete => write!(f, "incomplete"),
        }
    }
}

/// Outcome of classifying an instance. `cycles` is empty iff Complete;
/// `primitive` is meaningful only when Incomplete.
#[derive(Debug, Clone)]
pub struct Classification {
    pub verdict: Verdict,
    pub cycles: Vec<ExtremeCycle>,
    pub primitive: bool,
    /// A proper incomplete divisor of m, present when primitivity fails
    /// through a cycle with gcd > 1 or a cached divisor.
    pub witness_divisor: Option<u128>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchAlgorithm {
    Scan,
    Refine,
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub algorithm: SearchAlgorithm,
    pub scan_ceiling: u128,
    pub leaf_threshold: u128,
    /// Numbers already known incomplete; a proper divisor of m in this list
    /// short-circuits enumeration (odd multiples of incomplete numbers are
    /// incomplete).
    pub known_incomplete: Vec<u128>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            algorithm: SearchAlgorithm::Refine,
            scan_ceiling: DEFAULT_SCAN_CEILING,
            leaf_threshold: DEFAULT_LEAF_THRESHOLD,
            known_incomplete: Vec::new(),
        }
    }
}

/// One application of the inverse maps: x/g when g | x, (x+m)/g when
/// g | x+m, absent otherwise. At most one branch applies since m is odd.
/// Returns the successor and the scaled digit bit consumed at x.
pub fn successor(inst: &Instance, x: u128) -> Result<Option<(u128, u8)>> {
    let bound = inst.window();
    if x < 1 || x > bound {
        return Err(Error::OutOfRange { x, bound });
    }
    Ok(successor_unchecked(inst, x))
}

fn successor_unchecked(inst: &Instance, x: u128) -> Option<(u128, u8)> {
    if x.is_multiple_of(inst.g) {
        Some((x / inst.g, 0))
    } else if (x + inst.m).is_multiple_of(inst.g) {
        Some(((x + inst.m) / inst.g, 1))
    } else {
        None
    }
}

/// True iff the walk from x returns to x (Brent cycle detection; walks that
/// die or loop elsewhere are rejected exactly, with no step-count heuristic).
fn is_cycle_point(inst: &Instance, x0: u128) -> bool {
    let mut mark = x0;
    let mut limit = 1u64;
    let mut steps = 0u64;
    let mut x = x0;
    loop {
        match successor_unchecked(inst, x) {
            None => return false,
            Some((next, _)) => x = next,
        }
        if x == x0 {
            return true;
        }
        if x == mark {
            return false;
        }
        steps += 1;
        if steps == limit {
            mark = x;
            steps = 0;
            limit *= 2;
        }
    }
}

/// Walks the full cycle through a verified cycle point.
fn walk_cycle(inst: &Instance, x0: u128) -> Vec<u128> {
    let mut points = vec![x0];
    let mut x = x0;
    loop {
        let (next, _) = successor_unchecked(inst, x).expect("cycle point has a successor");
        if next == x0 {
            return points;
        }
        points.push(next);
        x = next;
    }
}

/// Exhaustive search: walks the partial successor graph over [1, window]
/// with visited marking and reports every directed cycle.
pub fn enumerate_cycles_scan(inst: &Instance) -> Result<Vec<ExtremeCycle>> {
    enumerate_cycles_scan_with(inst, DEFAULT_SCAN_CEILING)
}

pub fn enumerate_cycles_scan_with(inst: &Instance, ceiling: u128) -> Result<Vec<ExtremeCycle>> {
    let window = inst.window();
    if window > ceiling {
        return Err(Error::ResourceLimit {
            needed: window,
            limit: ceiling,
        });
    }
    let mut state = vec![0u8; window as usize + 1]; // 0 new, 1 on path, 2 retired
    let mut cycles = Vec::new();
    let mut path: Vec<u128> = Vec::new();
    for start in 1..=window {
        if state[start as usize] != 0 {
            continue;
        }
        path.clear();
        let mut x = start;
        loop {
            match state[x as usize] {
                1 => {
                    // closed a new cycle: it is the path suffix from x
                    let idx = path.iter().rposition(|&v| v == x).unwrap();
                    cycles.push(ExtremeCycle::from_walk(inst, path[idx..].to_vec()));
                    break;
                }
                2 => break,
                _ => {}
            }
            state[x as usize] = 1;
            path.push(x);
            match successor_unchecked(inst, x) {
                Some((next, _)) => x = next,
                None => break,
            }
        }
        for &v in &path {
            state[v as usize] = 2;
        }
    }
    cycles.sort_by_key(ExtremeCycle::smallest);
    Ok(cycles)
}

/// Branch-and-bound search over digit words. Each interval
/// [mS/g^n, m(1+(g-1)S)/((g-1)g^n)] is split by the two maps until it holds
/// at most `leaf_threshold` integers, which are then tested by iteration.
pub fn enumerate_cycles_refine(inst: &Instance) -> Result<Vec<ExtremeCycle>> {
    enumerate_cycles_refine_with(inst, DEFAULT_LEAF_THRESHOLD)
}

pub fn enumerate_cycles_refine_with(
    inst: &Instance,
    leaf_threshold: u128,
) -> Result<Vec<ExtremeCycle>> {
    let leaf_threshold = leaf_threshold.max(1);
    let g = inst.g;
    let m = inst.m;
    let gm1 = g - 1;
    let mut found: BTreeSet<u128> = BTreeSet::new();
    // nodes are (g^n, S) for the digit word of value S and length n
    let mut stack: Vec<(u128, u128)> = vec![(1, 0)];
    while let Some((power, s)) = stack.pop() {
        let lo_num = m.checked_mul(s).ok_or(Error::Overflow("refine interval"))?;
        let lo = lo_num.div_ceil(power).max(1);
        let hi_inner = s
            .checked_mul(gm1)
            .and_then(|v| v.checked_add(1))
            .ok_or(Error::Overflow("refine interval"))?;
        let hi_num = m.checked_mul(hi_inner).ok_or(Error::Overflow("refine interval"))?;
        let hi_den = gm1.checked_mul(power).ok_or(Error::Overflow("refine interval"))?;
        // right endpoints are integers only when (g-1) | m; floor keeps them
        let hi = hi_num / hi_den;
        if lo > hi {
            continue;
        }
        if hi - lo < leaf_threshold {
            for x in lo..=hi {
                if is_cycle_point(inst, x) {
                    found.insert(x);
                }
            }
        } else {
            // splitting prepends the innermost digit: S -> gS and gS + 1
            let next_power = power.checked_mul(g).ok_or(Error::Overflow("refine depth"))?;
            let s_zero = s.checked_mul(g).ok_or(Error::Overflow("refine word"))?;
            stack.push((next_power, s_zero));
            stack.push((next_power, s_zero + 1));
        }
    }
    // group the verified points into cycles; ascending starts keep the list
    // sorted by smallest point
    let mut cycles = Vec::new();
    let mut used: BTreeSet<u128> = BTreeSet::new();
    for &x in &found {
        if used.contains(&x) {
            continue;
        }
        let walk = walk_cycle(inst, x);
        for &p in &walk {
            used.insert(p);
            debug_assert!(found.contains(&p), "cycle point {p} missed by refinement");
        }
        cycles.push(ExtremeCycle::from_walk(inst, walk));
    }
    Ok(cycles)
}

/// min over n of 2^n * ceil(m / ((g-1) g^n)): an upper bound on the total
/// number of non-trivial cycle points; requires (g-1) not dividing m.
pub fn cycle_point_bound(inst: &Instance) -> Result<u128> {
    let g = inst.g;
    let m = inst.m;
    if m.is_multiple_of(g - 1) {
        return Err(Error::DivisibilityViolation { m, divisor: g - 1 });
    }
    let mut best = u128::MAX;
    let mut two_n = 1u128;
    let mut den = g - 1;
    loop {
        let candidate = two_n.saturating_mul(m.div_ceil(den));
        best = best.min(candidate);
        two_n = match two_n.checked_mul(2) {
            Some(v) if v < best => v,
            _ => break,
        };
        den = match den.checked_mul(g) {
            Some(v) => v,
            None => break,
        };
    }
    Ok(best)
}

/// Classifies m as Complete or Incomplete, with the primitivity flag
/// (incomplete and gcd 1 on every cycle) and a witness divisor otherwise.
pub fn classify(inst: &Instance) -> Result<Classification> {
    classify_with(inst, &ClassifyOptions::default())
}

pub fn classify_with(inst: &Instance, opts: &ClassifyOptions) -> Result<Classification> {
    let g = inst.g;
    let m = inst.m;
    // odd numbers up to g-2 have an empty window
    if m <= g - 2 {
        return Ok(Classification {
            verdict: Verdict::Complete,
            cycles: Vec::new(),
            primitive: false,
            witness_divisor: None,
        });
    }
    // known incomplete proper divisor: scale its cycles instead of searching
    if let Some(&d) = opts
        .known_incomplete
        .iter()
        .filter(|&&d| d > 1 && d < m && m.is_multiple_of(d))
        .min()
    {
        let sub = Instance::new(g, d)?;
        let k = m / d;
        let cycles: Vec<ExtremeCycle> = enumerate(&sub, opts)?
            .into_iter()
            .map(|c| {
                let scaled: Vec<u128> = c.points.iter().map(|&x| x * k).collect();
                ExtremeCycle::from_walk(inst, scaled)
            })
            .collect();
        debug_assert!(!cycles.is_empty(), "cached divisor {d} is not incomplete");
        return Ok(Classification {
            verdict: Verdict::Incomplete,
            cycles,
            primitive: false,
            witness_divisor: Some(d),
        });
    }
    let cycles = enumerate(inst, opts)?;
    if cycles.is_empty() {
        return Ok(Classification {
            verdict: Verdict::Complete,
            cycles,
            primitive: false,
            witness_divisor: None,
        });
    }
    let offending = cycles.iter().map(ExtremeCycle::gcd_points).find(|&k| k > 1);
    Ok(Classification {
        verdict: Verdict::Incomplete,
        primitive: offending.is_none(),
        witness_divisor: offending.map(|k| m / k),
        cycles,
    })
}

fn enumerate(inst: &Instance, opts: &ClassifyOptions) -> Result<Vec<ExtremeCycle>> {
    match opts.algorithm {
        SearchAlgorithm::Scan => enumerate_cycles_scan_with(inst, opts.scan_ceiling),
        SearchAlgorithm::Refine => enumerate_cycles_refine_with(inst, opts.leaf_threshold),
    }
}

/// Exact check of the extreme-cycle invariants for explicit data.
pub fn verify_cycle(inst: &Instance, points: &[u128], word: &DigitWord) -> bool {
    let g = inst.g;
    let m = inst.m;
    let r = points.len();
    if r == 0 || word.len() != r {
        return false;
    }
    if word.bits().iter().all(|&b| b == 0) {
        return false;
    }
    let mut seen = BTreeSet::new();
    for (i, &x) in points.iter().enumerate() {
        if x == 0 || !seen.insert(x) {
            return false;
        }
        // window: x <= m/(g-1), strict when (g-1) does not divide m
        match x.checked_mul(g - 1) {
            Some(v) if v < m || (v == m && m.is_multiple_of(g - 1)) => {}
            _ => return false,
        }
        let step = x + m * word.bits()[i] as u128;
        if !step.is_multiple_of(g) || step / g != points[(i + 1) % r] {
            return false;
        }
    }
    // canonical rotation starts at the smallest point
    points[0] == *points.iter().min().unwrap()
}

/// True iff the cycle's point set equals the coset x_0 * {g^j mod m}.
/// Points sharing a factor with m cannot lie in a coset of units, so any
/// such point yields false.
pub fn coset_check(inst: &Instance, cycle: &ExtremeCycle) -> Result<bool> {
    let g = inst.g;
    let m = inst.m;
    if gcd(g, m) != 1 {
        return Err(Error::NotCoprime { a: g, b: m });
    }
    if cycle.points.iter().any(|&x| gcd(x, m) != 1) {
        return Ok(false);
    }
    let x0 = cycle.smallest() % m;
    let mut coset = BTreeSet::new();
    let mut value = x0;
    loop {
        if !coset.insert(value) {
            break;
        }
        value = arith::mul_mod(value, g, m);
    }
    let points: BTreeSet<u128> = cycle.points.iter().map(|&x| x % m).collect();
    Ok(points == coset)
}
