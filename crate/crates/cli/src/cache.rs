//! Append-only factorization cache: one JSON object per line. Loading
//! tolerates corrupt or inconsistent lines by dropping them.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use excycle::{is_prime, Factorization};

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    value: String,
    factorization: Vec<(String, u32)>,
}

pub struct FactorCache {
    map: HashMap<u128, Vec<(u128, u32)>>,
    path: Option<PathBuf>,
}

impl FactorCache {
    pub fn disabled() -> Self {
        FactorCache {
            map: HashMap::new(),
            path: None,
        }
    }

    pub fn open(path: &Path) -> Self {
        let mut map = HashMap::new();
        if let Ok(file) = File::open(path) {
            for line in BufReader::new(file).lines() {
                let Ok(line) = line else { break };
                if let Some((value, pairs)) = parse_entry(&line) {
                    map.insert(value, pairs);
                }
            }
        }
        FactorCache {
            map,
            path: Some(path.to_path_buf()),
        }
    }

    /// Factors through the cache, appending fresh results to disk.
    pub fn factor(&mut self, n: u128) -> Factorization {
        if let Some(pairs) = self.map.get(&n) {
            if let Ok(f) = Factorization::from_pairs(pairs.clone()) {
                return f;
            }
        }
        let f = excycle::factor(n);
        self.record(n, &f);
        f
    }

    fn record(&mut self, n: u128, f: &Factorization) {
        self.map.insert(n, f.factors().to_vec());
        let Some(path) = &self.path else { return };
        let entry = CacheEntry {
            value: n.to_string(),
            factorization: f
                .factors()
                .iter()
                .map(|&(p, e)| (p.to_string(), e))
                .collect(),
        };
        if let Ok(mut file) = OpenOptions::new().create(true).append(true).open(path) {
            let mut line = serde_json::to_string(&entry).expect("serializable entry");
            line.push('\n');
            let _ = file.write_all(line.as_bytes());
        }
    }
}

/// Parses and validates one cache line; product and primality must check out.
fn parse_entry(line: &str) -> Option<(u128, Vec<(u128, u32)>)> {
    let entry: CacheEntry = serde_json::from_str(line).ok()?;
    let value: u128 = entry.value.parse().ok()?;
    let mut pairs = Vec::with_capacity(entry.factorization.len());
    for (p, e) in entry.factorization {
        let p: u128 = p.parse().ok()?;
        if e == 0 || !is_prime(p) {
            return None;
        }
        pairs.push((p, e));
    }
    let mut product = 1u128;
    for &(p, e) in &pairs {
        for _ in 0..e {
            product = product.checked_mul(p)?;
        }
    }
    for w in pairs.windows(2) {
        if w[0].0 >= w[1].0 {
            return None;
        }
    }
    (product == value).then_some((value, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_entry_validates() {
        assert!(parse_entry(r#"{"value":"9331","factorization":[["7",1],["31",1],["43",1]]}"#).is_some());
        // wrong product
        assert!(parse_entry(r#"{"value":"9332","factorization":[["7",1],["31",1],["43",1]]}"#).is_none());
        // composite listed as prime
        assert!(parse_entry(r#"{"value":"81","factorization":[["9",2]]}"#).is_none());
        // unsorted
        assert!(parse_entry(r#"{"value":"21","factorization":[["7",1],["3",1]]}"#).is_none());
        // garbage line
        assert!(parse_entry("not json").is_none());
    }
}
