//! Signed power-sum representations of integers over a single prime base:
//! evaluation, vanishing-subsum detection, canonical balanced forms, minimal
//! term counts, and bounded enumeration.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::arith::Prime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Plus sorts before Minus in canonical term order.
    fn rank(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    fn glyph(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// One signed monomial ±p^exp; the base lives on the enclosing sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub exp: u32,
    pub sign: Sign,
}

impl Term {
    pub fn new(exp: u32, sign: Sign) -> Self {
        Term { exp, sign }
    }

    pub fn value(&self, base: Prime) -> BigInt {
        let v = base.power(self.exp);
        match self.sign {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }
}

/// Display/storage order: exponent descending, '+' before '-'.
fn term_cmp(a: &Term, b: &Term) -> Ordering {
    b.exp
        .cmp(&a.exp)
        .then_with(|| a.sign.rank().cmp(&b.sign.rank()))
}

/// A finite multiset of signed prime powers over one base; repeated terms are
/// allowed. Terms are kept sorted (exponent descending) so equal multisets
/// compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPowerSum {
    base: Prime,
    terms: Vec<Term>,
}

impl SignedPowerSum {
    pub fn new(base: Prime, mut terms: Vec<Term>) -> Self {
        terms.sort_by(term_cmp);
        SignedPowerSum { base, terms }
    }

    pub fn empty(base: Prime) -> Self {
        SignedPowerSum { base, terms: Vec::new() }
    }

    pub fn base(&self) -> Prime {
        self.base
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exp(&self) -> Option<u32> {
        self.terms.first().map(|t| t.exp)
    }

    /// Exact signed sum of the terms.
    pub fn eval(&self) -> BigInt {
        let mut acc = BigInt::zero();
        for t in &self.terms {
            acc += t.value(self.base);
        }
        acc
    }

    /// The term-wise sign flip, evaluating to the negated value.
    pub fn negated(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(t.exp, t.sign.flip()))
            .collect();
        Self::new(self.base, terms)
    }

    /// Sort key realizing the canonical representation order: term count
    /// first, then the exponent-ascending term list compared lexicographically.
    pub fn order_key(&self) -> (usize, Vec<(u32, u8)>) {
        let mut key: Vec<(u32, u8)> = self
            .terms
            .iter()
            .map(|t| (t.exp, t.sign.rank()))
            .collect();
        key.sort();
        (self.terms.len(), key)
    }

    /// Finds a non-empty *proper* sub-multiset summing to zero, if any.
    ///
    /// Properness excludes the full multiset: for a two-term cancellation like
    /// +p^1 -p^1 the only vanishing subsum is the whole sum, which does not
    /// count. Sub-multisets are scanned by size, then in index order over the
    /// sorted terms, so the witness is deterministic.
    pub fn vanishing_subsum(&self) -> Option<SignedPowerSum> {
        let vals: Vec<BigInt> = self.terms.iter().map(|t| t.value(self.base)).collect();
        let idx = vanishing_subsum_indices(&vals)?;
        Some(Self::new(
            self.base,
            idx.iter().map(|&i| self.terms[i]).collect(),
        ))
    }
}

impl fmt::Display for SignedPowerSum {
    /// Space-separated signed monomials, exponents decreasing: "+2^5 -2^2".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}^{}", t.sign.glyph(), self.base, t.exp)?;
        }
        Ok(())
    }
}

/// Index set of the first (size-then-lexicographic) non-empty proper subset of
/// `vals` summing to zero, if one exists.
pub(crate) fn vanishing_subsum_indices(vals: &[BigInt]) -> Option<Vec<usize>> {
    let n = vals.len();
    if n < 2 {
        return None;
    }
    // Size 1 never vanishes: each value is ±p^e. Start at 2.
    for size in 2..n {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let sum: BigInt = idx.iter().map(|&i| &vals[i]).sum();
            if sum.is_zero() {
                return Some(idx);
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    None
}

/// Advances `idx` to the next k-combination of {0..n} in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] != i + n - k {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All sub-multiset sums of `vals` (non-empty subsets), mapped to whether the
/// value is attained by some *proper* subset. Used for cross-side checks.
pub(crate) fn subset_sum_table(vals: &[BigInt]) -> BTreeMap<BigInt, bool> {
    let n = vals.len();
    let mut table: BTreeMap<BigInt, bool> = BTreeMap::new();
    for mask in 1u64..(1u64 << n) {
        let mut sum = BigInt::zero();
        for (i, v) in vals.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum += v;
            }
        }
        let proper = mask != (1u64 << n) - 1;
        table
            .entry(sum)
            .and_modify(|p| *p |= proper)
            .or_insert(proper);
    }
    table
}

/// Canonical subsum-free representation of `u`: the balanced signed-digit
/// expansion in base p (non-adjacent form for p = 2). Digits stay in the
/// balanced range, so no non-empty sub-multiset of the result can vanish; for
/// p ∈ {2, 3} all exponents are distinct.
pub fn balanced_rep(u: &BigInt, p: Prime) -> SignedPowerSum {
    let mut terms = Vec::new();
    let mut v = u.clone();
    if p.get() == 2 {
        // non-adjacent form: digit -1 when v ≡ 3 (mod 4), +1 when v ≡ 1
        let four = BigInt::from(4);
        let mut exp = 0u32;
        while !v.is_zero() {
            if v.is_odd() {
                let r = v.mod_floor(&four);
                let d: i64 = if r == BigInt::from(1) { 1 } else { -1 };
                terms.push(Term::new(exp, if d > 0 { Sign::Plus } else { Sign::Minus }));
                v -= d;
            }
            v /= 2;
            exp += 1;
        }
    } else {
        let pb = p.to_bigint();
        let half = BigInt::from((p.get() - 1) / 2);
        let mut exp = 0u32;
        while !v.is_zero() {
            let mut d = v.mod_floor(&pb);
            if d > half {
                d -= &pb;
            }
            if !d.is_zero() {
                let sign = if d.is_positive() { Sign::Plus } else { Sign::Minus };
                let count = i64::try_from(d.abs()).expect("balanced digit exceeds desk scale");
                for _ in 0..count {
                    terms.push(Term::new(exp, sign));
                }
            }
            v = (v - d) / &pb;
            exp += 1;
        }
    }
    SignedPowerSum::new(p, terms)
}

fn ilog_prime(u: &BigInt, p: Prime) -> u32 {
    let a = u.abs();
    let pb = p.to_bigint();
    let mut pow = pb.clone();
    let mut e = 0u32;
    while pow <= a {
        pow *= &pb;
        e += 1;
    }
    e
}

/// Minimal number of signed powers of `p` (repetition allowed, exponents
/// unrestricted) summing to `u`, or None when the minimum exceeds `cap`.
pub fn min_terms(u: &BigInt, p: Prime, cap: u32) -> Option<u32> {
    min_terms_with_witness(u, p, cap).map(|(k, _)| k)
}

/// As [`min_terms`], also returning a representation attaining the minimum.
pub fn min_terms_with_witness(u: &BigInt, p: Prime, cap: u32) -> Option<(u32, SignedPowerSum)> {
    // Some minimum-weight representation has all exponents at most
    // ilog_p(|u|) + 2, so a search bounded there is exact; the extra slack
    // from `cap` keeps the bound monotone in the budget.
    let bound = ilog_prime(u, p) + cap.max(2);
    min_terms_bounded(u, p, cap, bound)
}

/// Minimal term count restricted to exponents ≤ `max_exp`, with a witness.
///
/// Dynamic program over digit positions: state = the value still owed divided
/// by the processed power, transitions pick a signed digit congruent to it
/// mod p, costs add digit magnitudes. Budget pruning keeps only states
/// reachable within `cap`, so each level holds O(cap) states.
pub fn min_terms_bounded(
    u: &BigInt,
    p: Prime,
    cap: u32,
    max_exp: u32,
) -> Option<(u32, SignedPowerSum)> {
    let pb = p.to_bigint();
    let pi = i128::try_from(p.get()).expect("prime fits i128");
    // state -> (cost, digits chosen so far, least significant first)
    let mut level: BTreeMap<BigInt, (u32, Vec<i32>)> = BTreeMap::new();
    level.insert(u.clone(), (0, Vec::new()));
    for _pos in 0..=max_exp {
        let mut next: BTreeMap<BigInt, (u32, Vec<i32>)> = BTreeMap::new();
        for (v, (cost, digits)) in &level {
            let budget = (cap - cost) as i128;
            let r = i128::try_from(v.mod_floor(&pb)).expect("residue fits i128");
            let mut d = -(budget - (budget + r).rem_euclid(pi)); // smallest admissible digit
            while d <= budget {
                let mut digits = digits.clone();
                digits.push(d as i32);
                let new_cost = cost + d.unsigned_abs() as u32;
                let vnext: BigInt = (v - BigInt::from(d)) / &pb;
                match next.get(&vnext) {
                    Some((c, existing))
                        if *c < new_cost || (*c == new_cost && *existing <= digits) => {}
                    _ => {
                        next.insert(vnext, (new_cost, digits));
                    }
                }
                d += pi;
            }
        }
        level = next;
        if level.is_empty() {
            return None;
        }
    }
    let (cost, digits) = level.get(&BigInt::zero())?;
    let mut terms = Vec::new();
    for (exp, &d) in digits.iter().enumerate() {
        let sign = if d > 0 { Sign::Plus } else { Sign::Minus };
        for _ in 0..d.unsigned_abs() {
            terms.push(Term::new(exp as u32, sign));
        }
    }
    Some((*cost, SignedPowerSum::new(p, terms)))
}

/// Depth-first walk over all term multisets with at most `max_terms` terms
/// and exponents ≤ `max_exp`, visiting every node (the empty multiset
/// included) with its exact value. Items are chosen with non-increasing
/// indices so each multiset is produced exactly once.
///
/// When `target` is given, subtrees that cannot reach it within the remaining
/// term budget are pruned; visited nodes are unaffected otherwise.
pub(crate) fn visit_multisets<F: FnMut(&[Term], &BigInt)>(
    p: Prime,
    max_terms: u32,
    max_exp: u32,
    target: Option<&BigInt>,
    visit: &mut F,
) {
    let powers: Vec<BigInt> = (0..=max_exp).map(|e| p.power(e)).collect();
    let mut terms: Vec<Term> = Vec::new();
    let mut sum = BigInt::zero();
    visit(&terms, &sum);
    if max_terms == 0 {
        return;
    }
    let top = 2 * (max_exp as usize + 1) - 1;
    descend(&powers, top, max_terms, target, &mut terms, &mut sum, visit);
}

/// Same walk restricted to multisets whose first (largest-index) item is
/// `first_idx`; used to partition the search across workers.
pub(crate) fn visit_multisets_from<F: FnMut(&[Term], &BigInt)>(
    p: Prime,
    first_idx: usize,
    max_terms: u32,
    max_exp: u32,
    target: Option<&BigInt>,
    visit: &mut F,
) {
    if max_terms == 0 {
        return;
    }
    let powers: Vec<BigInt> = (0..=max_exp).map(|e| p.power(e)).collect();
    let mut terms = vec![decode_item(first_idx)];
    let mut sum = item_value(&powers, first_idx);
    visit(&terms, &sum);
    if max_terms > 1 {
        descend(&powers, first_idx, max_terms - 1, target, &mut terms, &mut sum, visit);
    }
}

fn decode_item(idx: usize) -> Term {
    let exp = (idx / 2) as u32;
    let sign = if idx % 2 == 0 { Sign::Plus } else { Sign::Minus };
    Term::new(exp, sign)
}

fn item_value(powers: &[BigInt], idx: usize) -> BigInt {
    let v = powers[idx / 2].clone();
    if idx % 2 == 0 {
        v
    } else {
        -v
    }
}

fn descend<F: FnMut(&[Term], &BigInt)>(
    powers: &[BigInt],
    start_idx: usize,
    left: u32,
    target: Option<&BigInt>,
    terms: &mut Vec<Term>,
    sum: &mut BigInt,
    visit: &mut F,
) {
    for idx in (0..=start_idx).rev() {
        if let Some(t) = target {
            // everything still choosable is bounded by the current power
            let reach = &powers[idx / 2] * BigInt::from(left);
            if (t - &*sum).abs() > reach {
                continue;
            }
        }
        let v = item_value(powers, idx);
        terms.push(decode_item(idx));
        *sum += &v;
        visit(terms, sum);
        if left > 1 {
            descend(powers, idx, left - 1, target, terms, sum, visit);
        }
        *sum -= &v;
        terms.pop();
    }
}

/// All representations of `u` with at most `max_terms` terms and exponents
/// ≤ `max_exp`, in canonical order (term count, then lexicographic on the
/// sorted terms). Deterministic across runs and thread counts.
pub fn enumerate_reps(
    u: &BigInt,
    p: Prime,
    max_terms: u32,
    max_exp: u32,
) -> Vec<SignedPowerSum> {
    let mut out = Vec::new();
    visit_multisets(p, max_terms, max_exp, Some(u), &mut |terms, sum| {
        if sum == u {
            out.push(SignedPowerSum::new(p, terms.to_vec()));
        }
    });
    out.sort_by_cached_key(|r| r.order_key());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn rep(base: u64, terms: &[(u32, Sign)]) -> SignedPowerSum {
        SignedPowerSum::new(
            p(base),
            terms.iter().map(|&(e, s)| Term::new(e, s)).collect(),
        )
    }

    use Sign::{Minus, Plus};

    #[test]
    fn eval_examples() {
        assert_eq!(rep(2, &[(3, Plus), (0, Plus)]).eval(), BigInt::from(9));
        assert_eq!(rep(3, &[]).eval(), BigInt::zero());
        assert_eq!(
            rep(2, &[(2, Plus), (1, Minus), (1, Minus)]).eval(),
            BigInt::zero()
        );
    }

    #[test]
    fn vanishing_subsum_examples() {
        assert_eq!(rep(2, &[(1, Plus), (0, Plus)]).vanishing_subsum(), None);
        let w = rep(2, &[(2, Plus), (1, Minus), (1, Minus), (0, Plus)])
            .vanishing_subsum()
            .unwrap();
        assert_eq!(w, rep(2, &[(2, Plus), (1, Minus), (1, Minus)]));
        // the only vanishing subsum is the full multiset, which is excluded
        assert_eq!(rep(3, &[(1, Plus), (1, Minus)]).vanishing_subsum(), None);
    }

    #[test]
    fn balanced_rep_examples() {
        assert_eq!(
            balanced_rep(&BigInt::from(2), p(3)),
            rep(3, &[(1, Plus), (0, Minus)])
        );
        assert_eq!(
            balanced_rep(&BigInt::from(7), p(2)),
            rep(2, &[(3, Plus), (0, Minus)])
        );
        assert!(balanced_rep(&BigInt::zero(), p(5)).is_empty());
    }

    #[test]
    fn balanced_rep_round_trips_small_range() {
        for base in [2u64, 3, 5, 7] {
            let pr = p(base);
            for u in -2000i64..=2000 {
                let b = BigInt::from(u);
                let r = balanced_rep(&b, pr);
                assert_eq!(r.eval(), b, "balanced rep of {u} base {base}");
                assert_eq!(r.vanishing_subsum(), None, "subsum-free {u} base {base}");
            }
        }
    }

    #[test]
    fn balanced_rep_distinct_exponents_for_two_and_three() {
        for base in [2u64, 3] {
            for u in -2000i64..=2000 {
                let r = balanced_rep(&BigInt::from(u), p(base));
                let mut exps: Vec<u32> = r.terms().iter().map(|t| t.exp).collect();
                exps.dedup();
                assert_eq!(exps.len(), r.len());
            }
        }
    }

    #[test]
    fn min_terms_examples() {
        assert_eq!(min_terms(&BigInt::zero(), p(2), 5), Some(0));
        assert_eq!(min_terms(&BigInt::from(3), p(2), 5), Some(2));
        assert_eq!(min_terms(&BigInt::from(11), p(2), 5), Some(3));
    }

    #[test]
    fn min_terms_cap_is_reported() {
        assert_eq!(min_terms(&BigInt::from(11), p(2), 2), None);
        assert_eq!(min_terms(&BigInt::from(11), p(2), 3), Some(3));
    }

    #[test]
    fn min_terms_witness_evaluates_back() {
        for u in -300i64..=300 {
            let b = BigInt::from(u);
            let (k, w) = min_terms_with_witness(&b, p(3), 12).unwrap();
            assert_eq!(w.eval(), b);
            assert_eq!(w.len() as u32, k);
        }
    }

    #[test]
    fn bounded_min_terms_respects_exponent_cap() {
        // 8 = 2^3 needs exponent 3 as a single term; with exponents ≤ 2 the
        // best is 4+4 (two terms).
        let b = BigInt::from(8);
        assert_eq!(min_terms_bounded(&b, p(2), 4, 3).unwrap().0, 1);
        assert_eq!(min_terms_bounded(&b, p(2), 4, 2).unwrap().0, 2);
    }

    #[test]
    fn enumerate_reps_examples() {
        let one = enumerate_reps(&BigInt::from(1), p(2), 1, 10);
        assert_eq!(one, vec![rep(2, &[(0, Plus)])]);

        let three = enumerate_reps(&BigInt::from(3), p(2), 2, 10);
        assert_eq!(
            three,
            vec![rep(2, &[(1, Plus), (0, Plus)]), rep(2, &[(2, Plus), (0, Minus)])]
        );

        assert!(enumerate_reps(&BigInt::from(5), p(3), 1, 10).is_empty());
    }

    /// Breadth-first oracle over a bounded value window; exact as long as an
    /// optimal representation stays inside the window, which holds for the
    /// exponent budget used here.
    fn bfs_min_terms_table(base: u64, max_u: i64) -> (Vec<u32>, i64) {
        let pr = p(base);
        let e = ilog_prime(&BigInt::from(max_u), pr) + 3;
        let m = (base as i64).pow(e + 2);
        let size = (2 * m + 1) as usize;
        let mut dist = vec![u32::MAX; size];
        let offset = m;
        let mut frontier = vec![0i64];
        dist[offset as usize] = 0;
        let mut steps = 0u32;
        while !frontier.is_empty() && steps < 32 {
            steps += 1;
            let mut next = Vec::new();
            for v in frontier {
                for exp in 0..=e {
                    let pw = (base as i64).pow(exp);
                    for cand in [v + pw, v - pw] {
                        if cand.abs() <= m {
                            let i = (cand + offset) as usize;
                            if dist[i] == u32::MAX {
                                dist[i] = steps;
                                next.push(cand);
                            }
                        }
                    }
                }
            }
            frontier = next;
        }
        (dist, offset)
    }

    #[test]
    fn min_terms_matches_bfs_oracle_small() {
        for base in [2u64, 3] {
            let (dist, offset) = bfs_min_terms_table(base, 200);
            for u in -200i64..=200 {
                let expect = dist[(u + offset) as usize];
                assert_eq!(
                    min_terms(&BigInt::from(u), p(base), 16),
                    Some(expect),
                    "u={u} base={base}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn balanced_rep_round_trips(u in -1_000_000i64..=1_000_000, pi in 0usize..4) {
            let base = [2u64, 3, 5, 7][pi];
            let b = BigInt::from(u);
            prop_assert_eq!(balanced_rep(&b, p(base)).eval(), b);
        }

        #[test]
        fn min_terms_bounded_by_balanced_len(u in -5000i64..=5000, pi in 0usize..4) {
            let base = [2u64, 3, 5, 7][pi];
            let b = BigInt::from(u);
            let bal = balanced_rep(&b, p(base));
            let cap = bal.len() as u32 + 1;
            let k = min_terms(&b, p(base), cap).expect("balanced rep fits the cap");
            prop_assert!(k <= bal.len() as u32);
        }

        #[test]
        fn min_terms_is_sign_symmetric(u in -5000i64..=5000) {
            let b = BigInt::from(u);
            prop_assert_eq!(min_terms(&b, p(3), 16), min_terms(&(-b), p(3), 16));
        }

        #[test]
        fn enumerate_reps_is_canonical(u in -40i64..=40, k in 1u32..4, e in 0u32..5) {
            let b = BigInt::from(u);
            let reps = enumerate_reps(&b, p(2), k, e);
            for r in &reps {
                prop_assert_eq!(r.eval(), b.clone());
                prop_assert!(r.len() as u32 <= k);
                prop_assert!(r.max_exp().unwrap_or(0) <= e);
            }
            let mut keys: Vec<_> = reps.iter().map(|r| r.order_key()).collect();
            let sorted = {
                let mut s = keys.clone();
                s.sort();
                s
            };
            prop_assert_eq!(&keys, &sorted);
            keys.dedup();
            prop_assert_eq!(keys.len(), reps.len());
        }
    }
}
