//! Sequence-level convergence machinery: interleaved product sequences,
//! bounded-term convergence certificates, and the admissible value set that
//! isolates 0 on the diagonal.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::arith::Prime;
use crate::error::{Error, Result};
use crate::powersum::{min_terms_bounded, SignedPowerSum};
use crate::sunit::{admissible_sums, SearchLimits};

/// The product-group interleaving c_{2n} = (a_n, 0), c_{2n+1} = (0, b_n),
/// emitted while the needed source element exists.
pub fn interleave(seq_a: &[BigInt], seq_b: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let zero = BigInt::from(0);
    let mut out = Vec::new();
    for i in 0.. {
        let source = if i % 2 == 0 { seq_a } else { seq_b };
        match source.get(i / 2) {
            None => break,
            Some(x) if i % 2 == 0 => out.push((x.clone(), zero.clone())),
            Some(x) => out.push((zero.clone(), x.clone())),
        }
    }
    out
}

/// Witness that every element from `tail_start` on is a sum of at most `k`
/// signed powers of the prime; the bounded-representation condition a
/// sequence converging in Z{p^n} must eventually satisfy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceCertificate {
    pub k: u32,
    pub tail_start: usize,
    /// witnesses[i] represents seq[tail_start + i]; zeros get the empty sum.
    pub witnesses: Vec<SignedPowerSum>,
}

/// Why no tail could be certified: the sequence's final stretch contains an
/// element needing more than `cap` terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceRefusal {
    /// Index of the first element with no representation within the cap.
    pub index: usize,
    pub element: BigInt,
    pub cap: u32,
    /// The element's true minimal term count, when a widened search finds it.
    pub min_terms_found: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvergenceOutcome {
    Certified(ConvergenceCertificate),
    Refused(ConvergenceRefusal),
}

impl ConvergenceOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, ConvergenceOutcome::Certified(_))
    }

    pub fn to_json(&self) -> Value {
        match self {
            ConvergenceOutcome::Certified(c) => json!({
                "certified": true,
                "k": c.k,
                "tail_start": c.tail_start,
                "witnesses": c.witnesses.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            }),
            ConvergenceOutcome::Refused(r) => json!({
                "certified": false,
                "index": r.index,
                "element": r.element.to_string(),
                "cap": r.cap,
                "min_terms": r.min_terms_found,
            }),
        }
    }
}

/// Certifies the longest tail of `seq` whose every element is a sum of at
/// most `k` signed powers of `p` with exponents ≤ `max_exp`. This is the
/// necessary condition for convergence in Z{p^n}; it is not sufficient, and
/// no claim of convergence is made. Refuses when the final element itself
/// has no bounded representation, citing the first such element.
pub fn convergence_certificate(
    seq: &[BigInt],
    p: Prime,
    k: u32,
    max_exp: u32,
) -> Result<ConvergenceOutcome> {
    if k < 1 {
        return Err(Error::InvalidParameter("term cap must be at least 1".into()));
    }
    let reps: Vec<Option<SignedPowerSum>> = seq
        .iter()
        .map(|u| min_terms_bounded(u, p, k, max_exp).map(|(_, rep)| rep))
        .collect();
    match reps.iter().rposition(|r| r.is_none()) {
        Some(last_fail) if last_fail == seq.len() - 1 => {
            let index = reps.iter().position(|r| r.is_none()).unwrap();
            let widened = min_terms_bounded(&seq[index], p, k + 16, max_exp);
            Ok(ConvergenceOutcome::Refused(ConvergenceRefusal {
                index,
                element: seq[index].clone(),
                cap: k,
                min_terms_found: widened.map(|(count, _)| count),
            }))
        }
        last_fail => {
            let tail_start = last_fail.map_or(0, |i| i + 1);
            Ok(ConvergenceOutcome::Certified(ConvergenceCertificate {
                k,
                tail_start,
                witnesses: reps[tail_start..]
                    .iter()
                    .map(|r| r.clone().expect("tail elements are representable"))
                    .collect(),
            }))
        }
    }
}

/// Integers representable in at most `k` terms over BOTH primes at once,
/// exponents ≤ `max_exp`. A diagonal sequence converging to 0 eventually
/// lives in this finite set, and 0 is isolated in it.
pub fn diagonal_admissible_set(
    p: Prime,
    q: Prime,
    k: u32,
    max_exp: u32,
    limits: &SearchLimits,
) -> Result<BTreeSet<BigInt>> {
    admissible_sums(p, q, k, k, max_exp, limits)
}
