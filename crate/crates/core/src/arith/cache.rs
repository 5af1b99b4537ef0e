use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::RwLock;

use num_bigint::BigUint;

use super::{factorize, ArithError, FactorBudget, Factorization};

/// Factorization cache shared read-only by workers; new results are
/// buffered and written once by the owner via [`FactorCache::save`].
///
/// On-disk format: one line per integer, `n,p1^e1,p2^e2,...` (`1` alone for
/// the empty product), sorted by `n`.
#[derive(Debug, Default)]
pub struct FactorCache {
    known: RwLock<BTreeMap<BigUint, Factorization>>,
}

impl FactorCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self, ArithError> {
        if !path.exists() {
            return Ok(Self::new());
        }
        let text = fs::read_to_string(path).map_err(|e| ArithError::Io(e.to_string()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ArithError> {
        let mut known = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| ArithError::CacheFormat {
                line: idx + 1,
                reason: reason.to_string(),
            };
            let mut fields = line.split(',');
            let n: BigUint = fields
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| bad("leading integer"))?;
            let mut pairs = Vec::new();
            for field in fields {
                let (p, e) = field.trim().split_once('^').ok_or_else(|| bad("expected p^e"))?;
                let p: BigUint = p.parse().map_err(|_| bad("prime"))?;
                let e: u32 = e.parse().map_err(|_| bad("exponent"))?;
                pairs.push((p, e));
            }
            let f = Factorization::from_pairs(pairs);
            if f.value() != n {
                return Err(bad("factors do not multiply to n"));
            }
            known.insert(n, f);
        }
        Ok(Self {
            known: RwLock::new(known),
        })
    }

    pub fn get(&self, n: &BigUint) -> Option<Factorization> {
        self.known.read().ok()?.get(n).cloned()
    }

    pub fn len(&self) -> usize {
        self.known.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Look up `n`, factoring and remembering it on a miss.
    pub fn factorize(&self, n: &BigUint, budget: &FactorBudget) -> Result<Factorization, ArithError> {
        if let Some(f) = self.get(n) {
            return Ok(f);
        }
        let f = factorize(n, budget)?;
        if let Ok(mut known) = self.known.write() {
            known.insert(n.clone(), f.clone());
        }
        Ok(f)
    }

    pub fn to_csv(&self) -> String {
        let known = self.known.read().expect("cache lock poisoned");
        let mut out = String::new();
        for (n, f) in known.iter() {
            out.push_str(&n.to_string());
            if !f.is_empty() {
                out.push(',');
                out.push_str(&f.to_csv_fields());
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), ArithError> {
        let mut file = fs::File::create(path).map_err(|e| ArithError::Io(e.to_string()))?;
        file.write_all(self.to_csv().as_bytes())
            .map_err(|e| ArithError::Io(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_disk() {
        let cache = FactorCache::new();
        for n in [1u64, 108, 13824, 1_000_000_007] {
            cache.factorize(&BigUint::from(n), &FactorBudget::default()).unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("factors.csv");
        cache.save(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "1\n108,2^2,3^3\n13824,2^9,3^3\n1000000007,1000000007^1\n");
        let again = FactorCache::load(&path).unwrap();
        assert_eq!(again.len(), 4);
        assert_eq!(again.get(&BigUint::from(108u32)), cache.get(&BigUint::from(108u32)));
    }

    #[test]
    fn rejects_inconsistent_lines() {
        assert!(FactorCache::parse("12,2^2,3^2\n").is_err());
        assert!(FactorCache::parse("12,2-2\n").is_err());
    }
}
