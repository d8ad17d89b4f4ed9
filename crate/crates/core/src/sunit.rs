//! Joint solutions of x_1+...+x_k = y_1+...+y_l in signed powers of two
//! distinct primes, under three subsum regimes, with the derived F-sets,
//! admissible sums, and saturation reports.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::Prime;
use crate::error::{Error, Result};
use crate::powersum::{
    subset_sum_table, vanishing_subsum_indices, visit_multisets, visit_multisets_from,
    SignedPowerSum, Term,
};

/// Which subsums of a candidate solution are required not to vanish.
///
/// The predicates are nested: fully subsum-free implies side subsum-free
/// implies unrestricted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubsumMode {
    /// Only the defining equation must hold, with nonzero value.
    Unrestricted,
    /// No non-empty proper sub-multiset of either side vanishes.
    SideSubsumFree,
    /// No non-trivial subsum of the combined equation
    /// x_1+...+x_k - y_1-...-y_l = 0 vanishes.
    FullySubsumFree,
}

impl fmt::Display for SubsumMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubsumMode::Unrestricted => "unrestricted",
            SubsumMode::SideSubsumFree => "side-subsum-free",
            SubsumMode::FullySubsumFree => "fully-subsum-free",
        })
    }
}

/// A nonzero integer written simultaneously as a signed p-power sum and a
/// signed q-power sum over distinct primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointSolution {
    value: BigInt,
    pside: SignedPowerSum,
    qside: SignedPowerSum,
}

impl JointSolution {
    pub fn new(pside: SignedPowerSum, qside: SignedPowerSum) -> Result<Self> {
        if pside.base() == qside.base() {
            return Err(Error::EqualPrimes(pside.base().get()));
        }
        let value = pside.eval();
        if value != qside.eval() {
            return Err(Error::InvalidParameter(format!(
                "sides evaluate to {} and {}, not a joint solution",
                value,
                qside.eval()
            )));
        }
        Ok(JointSolution { value, pside, qside })
    }

    fn from_parts(value: BigInt, pside: SignedPowerSum, qside: SignedPowerSum) -> Self {
        JointSolution { value, pside, qside }
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn p_side(&self) -> &SignedPowerSum {
        &self.pside
    }

    pub fn q_side(&self) -> &SignedPowerSum {
        &self.qside
    }

    /// The term-wise sign flip of both sides, a solution for −value.
    pub fn negated(&self) -> Self {
        JointSolution {
            value: -&self.value,
            pside: self.pside.negated(),
            qside: self.qside.negated(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value.to_string(),
            "p_side": self.pside.to_string(),
            "q_side": self.qside.to_string(),
        })
    }
}

impl fmt::Display for JointSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} = {}", self.value, self.pside, self.qside)
    }
}

/// Canonical solution order: |value|, then value, then the two sides.
fn solution_cmp(a: &JointSolution, b: &JointSolution) -> Ordering {
    a.value
        .magnitude()
        .cmp(b.value.magnitude())
        .then_with(|| a.value.cmp(&b.value))
        .then_with(|| a.pside.order_key().cmp(&b.pside.order_key()))
        .then_with(|| a.qside.order_key().cmp(&b.qside.order_key()))
}

/// Resource guard for the enumeration's in-memory side index.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    /// Refuse searches whose index-size estimate exceeds this entry count.
    pub memory_cap: u128,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { memory_cap: 100_000_000 }
    }
}

impl SearchLimits {
    /// Bounds the hash of one side's partial sums by (2·max_exp+2)^terms.
    fn check(&self, max_exp: u32, side_terms: u32) -> Result<()> {
        let base = 2 * max_exp as u128 + 2;
        let estimated = base.checked_pow(side_terms).unwrap_or(u128::MAX);
        if estimated > self.memory_cap {
            return Err(Error::ResourceLimit { estimated, cap: self.memory_cap });
        }
        Ok(())
    }
}

fn validate(p: Prime, q: Prime, k: u32, l: u32) -> Result<()> {
    if p == q {
        return Err(Error::EqualPrimes(p.get()));
    }
    if k < 1 || l < 1 {
        return Err(Error::InvalidParameter(format!(
            "term bounds must be at least 1, got k={k}, l={l}"
        )));
    }
    Ok(())
}

fn side_subsum_free(terms: &[Term], base: Prime) -> bool {
    let vals: Vec<BigInt> = terms.iter().map(|t| t.value(base)).collect();
    vanishing_subsum_indices(&vals).is_none()
}

/// No subsum of the combined equation vanishes apart from the full equation:
/// there is no pair of sub-multisets S of the p-side and T of the q-side,
/// not both empty and not both full, with sum(S) = sum(T). Both sides are
/// assumed side-subsum-free already, which settles the cases where S or T
/// is empty.
fn fully_cross_free(pvals: &[BigInt], qvals: &[BigInt], value: &BigInt) -> bool {
    let ptab = subset_sum_table(pvals);
    let qtab = subset_sum_table(qvals);
    for (v, p_proper) in &ptab {
        if let Some(q_proper) = qtab.get(v) {
            if v != value || *p_proper || *q_proper {
                return false;
            }
        }
    }
    true
}

/// All joint solutions with at most `k` p-side and `l` q-side terms,
/// exponents ≤ `max_exp`, nonzero value, satisfying `mode`, in canonical
/// order. Meet-in-the-middle: the q-side sums are indexed by value, the
/// p-side sums are streamed against the index, partitioned over workers by
/// the leading p-side item; the final sort makes the output independent of
/// the partitioning.
pub fn enumerate_joint_solutions(
    p: Prime,
    q: Prime,
    k: u32,
    l: u32,
    max_exp: u32,
    mode: SubsumMode,
    limits: &SearchLimits,
) -> Result<Vec<JointSolution>> {
    validate(p, q, k, l)?;
    limits.check(max_exp, l)?;

    let mut qindex: HashMap<BigInt, Vec<Vec<Term>>> = HashMap::new();
    visit_multisets(q, l, max_exp, None, &mut |terms, sum| {
        if sum.is_zero() {
            return;
        }
        if mode != SubsumMode::Unrestricted && !side_subsum_free(terms, q) {
            return;
        }
        qindex.entry(sum.clone()).or_default().push(terms.to_vec());
    });

    let items = 2 * (max_exp as usize + 1);
    let mut all: Vec<JointSolution> = (0..items)
        .into_par_iter()
        .map(|first| {
            let mut found = Vec::new();
            visit_multisets_from(p, first, k, max_exp, None, &mut |terms, sum| {
                if sum.is_zero() {
                    return;
                }
                let Some(qsides) = qindex.get(sum) else { return };
                if mode != SubsumMode::Unrestricted && !side_subsum_free(terms, p) {
                    return;
                }
                let pvals: Vec<BigInt> = terms.iter().map(|t| t.value(p)).collect();
                for qterms in qsides {
                    if mode == SubsumMode::FullySubsumFree {
                        let qvals: Vec<BigInt> =
                            qterms.iter().map(|t| t.value(q)).collect();
                        if !fully_cross_free(&pvals, &qvals, sum) {
                            continue;
                        }
                    }
                    found.push(JointSolution::from_parts(
                        sum.clone(),
                        SignedPowerSum::new(p, terms.to_vec()),
                        SignedPowerSum::new(q, qterms.clone()),
                    ));
                }
            });
            found
        })
        .reduce(Vec::new, |mut a, mut b| {
            a.append(&mut b);
            a
        });
    all.sort_unstable_by(solution_cmp);
    Ok(all)
}

/// A finite set of powers of one prime, stored by exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSet {
    base: Prime,
    exps: BTreeSet<u32>,
}

impl PowerSet {
    pub fn base(&self) -> Prime {
        self.base
    }

    pub fn exponents(&self) -> impl DoubleEndedIterator<Item = u32> + '_ {
        self.exps.iter().copied()
    }

    pub fn max_exponent(&self) -> Option<u32> {
        self.exps.iter().next_back().copied()
    }

    pub fn contains_exp(&self, exp: u32) -> bool {
        self.exps.contains(&exp)
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn is_subset_of(&self, other: &PowerSet) -> bool {
        self.base == other.base && self.exps.is_subset(&other.exps)
    }

    /// Largest member as an integer, if the set is non-empty.
    pub fn max_power(&self) -> Option<BigInt> {
        self.exps.iter().next_back().map(|&e| self.base.power(e))
    }

    pub fn powers(&self) -> Vec<BigInt> {
        self.exps.iter().map(|&e| self.base.power(e)).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "base": self.base.get(),
            "exponents": self.exps.iter().collect::<Vec<_>>(),
            "powers": self.powers().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// F(p,q,k,l): the powers of p occurring on the p-side of some side
/// subsum-free joint solution within the bounds.
pub fn f_set(
    p: Prime,
    q: Prime,
    k: u32,
    l: u32,
    max_exp: u32,
    limits: &SearchLimits,
) -> Result<PowerSet> {
    let sols = enumerate_joint_solutions(p, q, k, l, max_exp, SubsumMode::SideSubsumFree, limits)?;
    let mut exps = BTreeSet::new();
    for sol in &sols {
        for t in sol.p_side().terms() {
            exps.insert(t.exp);
        }
    }
    Ok(PowerSet { base: p, exps })
}

/// F(p,q,s) = ∪_{k,l≤s} F(p,q,k,l). Term bounds are "at most", so the union
/// collapses to the single largest member F(p,q,s,s).
pub fn f_cumulative(
    p: Prime,
    q: Prime,
    s: u32,
    max_exp: u32,
    limits: &SearchLimits,
) -> Result<PowerSet> {
    f_set(p, q, s, s, max_exp, limits)
}

/// Values taken by x_1+...+x_k where each x_i is 0 or ±p^a, subject to the
/// same sum being reachable as y_1+...+y_l with each y_j 0 or ±q^b: the
/// intersection of the two reachable-value sets. Zero and vanishing subsums
/// are allowed here.
pub fn admissible_sums(
    p: Prime,
    q: Prime,
    k: u32,
    l: u32,
    max_exp: u32,
    limits: &SearchLimits,
) -> Result<BTreeSet<BigInt>> {
    validate(p, q, k, l)?;
    limits.check(max_exp, k)?;
    limits.check(max_exp, l)?;
    let mut pvals: HashSet<BigInt> = HashSet::new();
    visit_multisets(p, k, max_exp, None, &mut |_, sum| {
        pvals.insert(sum.clone());
    });
    let mut out = BTreeSet::new();
    visit_multisets(q, l, max_exp, None, &mut |_, sum| {
        if pvals.contains(sum) {
            out.insert(sum.clone());
        }
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationEntry {
    pub max_exp: u32,
    pub count: usize,
    /// Solutions not present at the previous bound; absent on the first entry.
    pub new_count: Option<usize>,
}

/// Solution counts along an ascending ladder of exponent bounds; evidence
/// that the enumeration has stopped growing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationReport {
    pub entries: Vec<SaturationEntry>,
    /// Whether the last step added nothing; absent with fewer than two bounds.
    pub saturated: Option<bool>,
}

impl SaturationReport {
    pub fn to_json(&self) -> Value {
        json!({
            "entries": self.entries.iter().map(|e| json!({
                "max_exp": e.max_exp,
                "count": e.count,
                "new_count": e.new_count,
            })).collect::<Vec<_>>(),
            "saturated": self.saturated,
        })
    }
}

pub fn saturation_report(
    p: Prime,
    q: Prime,
    k: u32,
    l: u32,
    mode: SubsumMode,
    exp_bounds: &[u32],
    limits: &SearchLimits,
) -> Result<SaturationReport> {
    if exp_bounds.is_empty() {
        return Err(Error::InvalidParameter("at least one exponent bound required".into()));
    }
    if exp_bounds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!(
            "exponent bounds must be strictly ascending, got {exp_bounds:?}"
        )));
    }
    let mut entries = Vec::new();
    let mut previous: HashSet<JointSolution> = HashSet::new();
    for &bound in exp_bounds {
        let sols = enumerate_joint_solutions(p, q, k, l, bound, mode, limits)?;
        let new_count = if entries.is_empty() {
            None
        } else {
            Some(sols.iter().filter(|s| !previous.contains(s)).count())
        };
        entries.push(SaturationEntry { max_exp: bound, count: sols.len(), new_count });
        previous = sols.into_iter().collect();
    }
    let saturated = if entries.len() < 2 {
        None
    } else {
        Some(entries.last().unwrap().new_count == Some(0))
    };
    Ok(SaturationReport { entries, saturated })
}
