//! Pure prime-degree fields `Q(a^(1/l))` and the construction of runs of
//! consecutive radicands `d+1, ..., d+k` whose fields carry large
//! class-number proxies.
//!
//! Module map:
//! - [`arith`]: primality, factorization, CRT, power-free parts, prime sieve.
//! - [`purefield`]: radicand normalization, discriminants (with a Dedekind
//!   criterion cross-check), Stender units and their logarithmic embeddings.
//! - [`symbols`]: l-th power residue tests, exact character sums, the
//!   consecutive-residue search behind the congruence class `m0 (mod q)`.
//! - [`construction`]: `P`, `Δ(m)`, `F_j(m)`, the congruence target and the
//!   power-free sieve producing admissible `m`.
//! - [`lseries`]: Dirichlet coefficients `λ(p)` of `ζ_K/ζ` from splitting
//!   types, truncated Euler-product proxies, Chebotarev tallies.
//! - [`classnum`]: class-number-formula assembly and regulator bound ratios.
//! - [`pipeline`]: run configuration, construct/analyze orchestration and
//!   the named verification suites used by the CLI.

pub mod arith;
pub mod bigserde;
pub mod classnum;
pub mod construction;
pub mod fpoly;
pub mod hp;
pub mod lseries;
pub mod numfield;
pub mod pipeline;
pub mod purefield;
pub mod symbols;

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}
