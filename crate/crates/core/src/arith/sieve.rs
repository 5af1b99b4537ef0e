use std::sync::{Arc, OnceLock, RwLock};

const SEGMENT: u64 = 1 << 16;

struct Table {
    limit: u64,
    primes: Arc<Vec<u64>>,
}

static TABLE: OnceLock<RwLock<Table>> = OnceLock::new();

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes below 2^16, for trial division.
pub fn small_primes() -> &'static [u64] {
    static SMALL: OnceLock<Vec<u64>> = OnceLock::new();
    SMALL.get_or_init(|| simple_sieve(1 << 16))
}

/// All primes `<= limit`, served from a shared table that grows on demand.
pub fn prime_table(limit: u64) -> Arc<Vec<u64>> {
    let lock = TABLE.get_or_init(|| {
        RwLock::new(Table {
            limit: 1 << 16,
            primes: Arc::new(simple_sieve(1 << 16)),
        })
    });
    let primes = {
        let table = lock.read().expect("prime table poisoned");
        (table.limit >= limit).then(|| table.primes.clone())
    };
    let primes = match primes {
        Some(p) => p,
        None => {
            let mut table = lock.write().expect("prime table poisoned");
            if table.limit < limit {
                table.limit = limit;
                table.primes = Arc::new(simple_sieve(limit));
            }
            table.primes.clone()
        }
    };
    if primes.last().is_some_and(|&p| p > limit) {
        let end = primes.partition_point(|&p| p <= limit);
        Arc::new(primes[..end].to_vec())
    } else {
        primes
    }
}

/// Primes `p` with `lo < p <= hi`, ascending, optionally restricted to
/// `p ≡ r (mod m)`. Segmented sieve of Eratosthenes; memory is
/// `O(sqrt(hi) + SEGMENT)`.
pub fn primes_in(lo: u64, hi: u64, residue_filter: Option<(u64, u64)>) -> Vec<u64> {
    if hi <= lo || hi < 2 {
        return Vec::new();
    }
    let keep = |p: u64| residue_filter.is_none_or(|(r, m)| m != 0 && p % m == r % m);
    let start = lo.saturating_add(1).max(2);
    let root = hi.isqrt();
    let base = prime_table(root);
    let mut out = Vec::new();
    let mut seg_lo = start;
    let mut marks = vec![false; SEGMENT as usize];
    while seg_lo <= hi {
        let seg_hi = hi.min(seg_lo.saturating_add(SEGMENT - 1));
        let len = (seg_hi - seg_lo + 1) as usize;
        marks[..len].iter_mut().for_each(|b| *b = false);
        for &p in base.iter() {
            if p * p > seg_hi {
                break;
            }
            let first = (p * p).max(seg_lo.div_ceil(p) * p);
            let mut j = first;
            while j <= seg_hi {
                marks[(j - seg_lo) as usize] = true;
                j += p;
            }
        }
        for (i, &c) in marks[..len].iter().enumerate() {
            let v = seg_lo + i as u64;
            if !c && keep(v) {
                out.push(v);
            }
        }
        if seg_hi == u64::MAX {
            break;
        }
        seg_lo = seg_hi + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(primes_in(1, 10, None), vec![2, 3, 5, 7]);
        assert_eq!(primes_in(1, 20, Some((1, 3))), vec![7, 13, 19]);
        assert_eq!(primes_in(144, 160, Some((1, 3))), vec![151, 157]);
        assert!(primes_in(10, 10, None).is_empty());
        assert_eq!(primes_in(0, 2, None), vec![2]);
    }

    #[test]
    fn segmented_matches_simple_across_segments() {
        let all = simple_sieve(400_000);
        let got = primes_in(100_000, 400_000, None);
        let want: Vec<u64> = all.into_iter().filter(|&p| p > 100_000).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn table_grows() {
        let t = prime_table(200_000);
        assert_eq!(*t.last().unwrap(), 199_999);
        assert_eq!(prime_table(10).as_slice(), &[2, 3, 5, 7]);
    }
}
