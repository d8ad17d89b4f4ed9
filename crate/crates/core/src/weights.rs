//! Slow-decreasing weight functions built from the F-sets, the restricted
//! norms they induce, and the diagonal discreteness certificate that ties
//! them together.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::arith::{format_rational, Prime};
use crate::error::{Error, Result};
use crate::powersum::{enumerate_reps, SignedPowerSum};
use crate::sunit::{enumerate_joint_solutions, f_cumulative, JointSolution, SearchLimits, SubsumMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightEntry {
    pub exp: u32,
    pub weight: BigRational,
    /// The smallest s with p^exp ≤ max F(p,q,s); the weight is its reciprocal.
    pub min_s: u32,
}

/// The weight function δ on powers of `p`, derived from the F-sets of the
/// prime pair (p, q): δ(p^n) = 1/min{s : p^n ≤ max F(p,q,s)}. Swapping the
/// roles of the primes yields ε.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightTable {
    p: Prime,
    q: Prime,
    s_max: u32,
    max_exp: u32,
    entries: Vec<WeightEntry>,
}

impl WeightTable {
    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn q(&self) -> Prime {
        self.q
    }

    pub fn s_max(&self) -> u32 {
        self.s_max
    }

    pub fn max_exp(&self) -> u32 {
        self.max_exp
    }

    pub fn entries(&self) -> &[WeightEntry] {
        &self.entries
    }

    /// Largest exponent inside the table's domain.
    pub fn domain_max_exp(&self) -> u32 {
        self.entries.last().expect("table domain is never empty").exp
    }

    pub fn weight(&self, exp: u32) -> Option<&BigRational> {
        self.entries.get(exp as usize).map(|e| &e.weight)
    }

    pub fn min_s(&self, exp: u32) -> Option<u32> {
        self.entries.get(exp as usize).map(|e| e.min_s)
    }

    fn power_label(&self, exp: u32) -> String {
        format!("{}^{}", self.p, exp)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p.get(),
            "q": self.q.get(),
            "s_max": self.s_max,
            "max_exp": self.max_exp,
            "entries": self.entries.iter().map(|e| json!({
                "power": self.power_label(e.exp),
                "weight": format_rational(&e.weight),
                "min_s": e.min_s,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Builds δ for the pair (p, q): enumerates F(p,q,s) for s ≤ s_max, reads off
/// the thresholds max F(p,q,s), and tabulates 1/min_s over the domain
/// {p^n : p^n ≤ max F(p,q,s_max)}.
pub fn build_delta(
    p: Prime,
    q: Prime,
    s_max: u32,
    max_exp: u32,
    limits: &SearchLimits,
) -> Result<WeightTable> {
    if s_max < 1 {
        return Err(Error::InvalidParameter("s_max must be at least 1".into()));
    }
    let mut fsets = Vec::with_capacity(s_max as usize);
    for s in 1..=s_max {
        let f = f_cumulative(p, q, s, max_exp, limits)?;
        assert!(!f.is_empty(), "F({p},{q},{s}) lost the solution 1 = 1");
        fsets.push(f);
    }
    // max F(p,q,s) is itself a power of p, so the domain cutoff and the
    // thresholds reduce to exponent comparisons
    let threshold_exps: Vec<u32> = fsets
        .iter()
        .map(|f| f.max_exponent().expect("non-empty F-set"))
        .collect();
    let domain_top = *threshold_exps.last().unwrap();
    let entries: Vec<WeightEntry> = (0..=domain_top)
        .map(|n| {
            let min_s = threshold_exps
                .iter()
                .position(|&t| n <= t)
                .expect("n is within the domain cutoff") as u32
                + 1;
            WeightEntry {
                exp: n,
                weight: BigRational::new(BigInt::one(), BigInt::from(min_s)),
                min_s,
            }
        })
        .collect();
    // p^n ∈ F(p,q,s) must imply δ(p^n) ≥ 1/s for every enumerated member
    for (idx, f) in fsets.iter().enumerate() {
        let s = idx as u32 + 1;
        for n in f.exponents() {
            assert!(
                entries[n as usize].min_s <= s,
                "weight table violates the F-set implication at {p}^{n}, s={s}"
            );
        }
    }
    Ok(WeightTable { p, q, s_max, max_exp, entries })
}

/// Minimum total weight over all representations of `u` with at most
/// `max_terms` terms and exponents inside the table's domain, together with a
/// representation attaining it. This is an upper bound on the true infimum
/// norm, which ranges over unboundedly many representations.
pub fn restricted_norm(
    u: &BigInt,
    table: &WeightTable,
    max_terms: u32,
) -> Result<(BigRational, SignedPowerSum)> {
    if max_terms < 1 {
        return Err(Error::InvalidParameter("max_terms must be at least 1".into()));
    }
    if u.is_zero() {
        return Ok((BigRational::zero(), SignedPowerSum::empty(table.p())));
    }
    let reps = enumerate_reps(u, table.p(), max_terms, table.domain_max_exp());
    let p_divides = u.is_multiple_of(&table.p().to_bigint());
    let mut best: Option<(BigRational, &SignedPowerSum)> = None;
    for rep in &reps {
        assert!(
            p_divides || rep.terms().iter().any(|t| t.exp == 0),
            "a representation of a unit residue must spend an exponent-0 term"
        );
        let total = rep.terms().iter().fold(BigRational::zero(), |acc, t| {
            acc + table.weight(t.exp).expect("enumeration stayed inside the domain")
        });
        match &best {
            Some((b, _)) if *b <= total => {}
            _ => best = Some((total, rep)),
        }
    }
    best.map(|(w, rep)| (w, rep.clone()))
        .ok_or_else(|| Error::NotRepresentable { value: u.to_string() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideDetail {
    /// weight(term) − 1/s for each term, in the side's canonical term order.
    pub margins: Vec<BigRational>,
    pub total: BigRational,
    /// Whether this side's term count attains s = max(k, l).
    pub is_max_side: bool,
}

impl SideDetail {
    fn to_json(&self) -> Value {
        json!({
            "margins": self.margins.iter().map(format_rational).collect::<Vec<_>>(),
            "total": format_rational(&self.total),
            "is_max_side": self.is_max_side,
        })
    }
}

/// Outcome of the per-solution weight argument: every term weight at least
/// 1/s and the fuller side's total at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointWeightDetail {
    pub pass: bool,
    pub s: u32,
    pub p_side: SideDetail,
    pub q_side: SideDetail,
}

impl JointWeightDetail {
    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.pass,
            "s": self.s,
            "p_side": self.p_side.to_json(),
            "q_side": self.q_side.to_json(),
        })
    }
}

fn side_detail(
    side: &SignedPowerSum,
    table: &WeightTable,
    floor: &BigRational,
    s: u32,
) -> Result<SideDetail> {
    let mut margins = Vec::with_capacity(side.len());
    let mut total = BigRational::zero();
    for t in side.terms() {
        let w = table.weight(t.exp).ok_or_else(|| Error::DomainExceeded {
            power: table.power_label(t.exp),
            max: table.power_label(table.domain_max_exp()),
        })?;
        margins.push(w - floor);
        total += w;
    }
    Ok(SideDetail { margins, total, is_max_side: side.len() as u32 == s })
}

/// Checks one joint solution against the weight tables of its two primes:
/// with s = max(k, l), every p-side weight and every q-side weight must be at
/// least 1/s, which forces the side with s terms to carry total weight at
/// least 1. Terms outside a table's domain are a hard error, never a pass.
pub fn joint_weight_check(
    sol: &JointSolution,
    dtab: &WeightTable,
    etab: &WeightTable,
) -> Result<JointWeightDetail> {
    if sol.p_side().base() != dtab.p() || sol.q_side().base() != etab.p() {
        return Err(Error::InvalidParameter(format!(
            "solution over ({}, {}) does not match tables over ({}, {})",
            sol.p_side().base(),
            sol.q_side().base(),
            dtab.p(),
            etab.p()
        )));
    }
    let k = sol.p_side().len() as u32;
    let l = sol.q_side().len() as u32;
    let s = k.max(l);
    if s == 0 {
        return Err(Error::InvalidParameter("solution has no terms to weigh".into()));
    }
    let floor = BigRational::new(BigInt::one(), BigInt::from(s));
    let p_side = side_detail(sol.p_side(), dtab, &floor, s)?;
    let q_side = side_detail(sol.q_side(), etab, &floor, s)?;
    let one = BigRational::one();
    let margins_ok = p_side
        .margins
        .iter()
        .chain(q_side.margins.iter())
        .all(|m| !m.is_negative());
    let totals_ok = (!p_side.is_max_side || p_side.total >= one)
        && (!q_side.is_max_side || q_side.total >= one);
    Ok(JointWeightDetail { pass: margins_ok && totals_ok, s, p_side, q_side })
}

/// The certificate that the diagonal is discrete at the given scale: every
/// nonzero integer with a side-subsum-free joint representation carries
/// weight at least 1 on its fuller side, in both the δ and the ε table.
#[derive(Debug, Clone)]
pub struct DiscretenessReport {
    pub p: Prime,
    pub q: Prime,
    pub s: u32,
    pub max_exp: u32,
    pub pass: bool,
    pub solutions_checked: usize,
    /// Distinct jointly representable nonzero values, sorted by |u| then u.
    pub u_values: Vec<BigInt>,
    pub failures: Vec<(JointSolution, JointWeightDetail)>,
}

impl DiscretenessReport {
    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p.get(),
            "q": self.q.get(),
            "s": self.s,
            "max_exp": self.max_exp,
            "pass": self.pass,
            "solutions_checked": self.solutions_checked,
            "u_values": self.u_values.iter().map(|u| u.to_string()).collect::<Vec<_>>(),
            "failures": self.failures.iter().map(|(sol, detail)| json!({
                "solution": sol.to_json(),
                "detail": detail.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn abs_then_value(a: &BigInt, b: &BigInt) -> Ordering {
    a.magnitude().cmp(b.magnitude()).then_with(|| a.cmp(b))
}

pub fn diagonal_discreteness_certificate(
    p: Prime,
    q: Prime,
    s: u32,
    max_exp: u32,
    limits: &SearchLimits,
) -> Result<DiscretenessReport> {
    let dtab = build_delta(p, q, s, max_exp, limits)?;
    let etab = build_delta(q, p, s, max_exp, limits)?;
    let sols =
        enumerate_joint_solutions(p, q, s, s, max_exp, SubsumMode::SideSubsumFree, limits)?;
    let mut u_values: Vec<BigInt> = Vec::new();
    let mut failures = Vec::new();
    for sol in &sols {
        if u_values.last() != Some(sol.value()) {
            u_values.push(sol.value().clone());
        }
        let detail = joint_weight_check(sol, &dtab, &etab)?;
        if !detail.pass {
            failures.push((sol.clone(), detail));
        }
    }
    u_values.sort_unstable_by(abs_then_value);
    u_values.dedup();
    Ok(DiscretenessReport {
        p,
        q,
        s,
        max_exp,
        pass: failures.is_empty(),
        solutions_checked: sols.len(),
        u_values,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powersum::{balanced_rep, Sign, Term};

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn limits() -> SearchLimits {
        SearchLimits::default()
    }

    fn delta234() -> WeightTable {
        build_delta(p(2), p(3), 3, 40, &limits()).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    use Sign::Plus;

    #[test]
    fn delta_small_values() {
        let tab = delta234();
        assert_eq!(tab.weight(0), Some(&rat(1, 1)));
        assert_eq!(tab.min_s(0), Some(1));
        assert_eq!(tab.weight(1), Some(&rat(1, 2)));
        // 2^8 = 256 is the largest power within max F(2,3,2,40), via
        // 2^8 - 2^4 = 3^5 - 3^1
        assert_eq!(tab.weight(8), Some(&rat(1, 2)));
        assert_eq!(tab.min_s(9), Some(3));
    }

    #[test]
    fn delta_is_non_increasing_and_unit_bounded() {
        for (pp, qq) in [(2u64, 3u64), (3, 2), (2, 5)] {
            let tab = build_delta(p(pp), p(qq), 3, 20, &limits()).unwrap();
            let mut prev: Option<BigRational> = None;
            for e in tab.entries() {
                assert!(e.weight > BigRational::zero());
                assert!(e.weight <= BigRational::one());
                assert_eq!(e.weight, rat(1, e.min_s as i64));
                assert_eq!(e.weight == BigRational::one(), e.min_s == 1);
                if let Some(prev) = prev {
                    assert!(e.weight <= prev);
                }
                prev = Some(e.weight.clone());
            }
        }
    }

    #[test]
    fn table_json_shape() {
        let tab = build_delta(p(2), p(3), 1, 10, &limits()).unwrap();
        assert_eq!(
            serde_json::to_string(&tab.to_json()).unwrap(),
            r#"{"p":2,"q":3,"s_max":1,"max_exp":10,"entries":[{"power":"2^0","weight":"1","min_s":1}]}"#
        );
    }

    #[test]
    fn norm_of_zero_is_zero_with_empty_witness() {
        let (w, rep) = restricted_norm(&BigInt::zero(), &delta234(), 4).unwrap();
        assert_eq!(w, BigRational::zero());
        assert!(rep.is_empty());
    }

    #[test]
    fn norm_of_one_is_one() {
        let (w, rep) = restricted_norm(&BigInt::one(), &delta234(), 4).unwrap();
        assert_eq!(w, BigRational::one());
        assert_eq!(rep.terms(), &[Term::new(0, Plus)]);
    }

    #[test]
    fn norm_is_sign_symmetric() {
        let tab = delta234();
        for u in 1i64..=40 {
            let plus = restricted_norm(&BigInt::from(u), &tab, 4).unwrap().0;
            let minus = restricted_norm(&BigInt::from(-u), &tab, 4).unwrap().0;
            assert_eq!(plus, minus, "u = {u}");
        }
    }

    #[test]
    fn norm_witness_attains_the_bound() {
        let tab = delta234();
        for u in -30i64..=30 {
            let b = BigInt::from(u);
            let (w, rep) = restricted_norm(&b, &tab, 4).unwrap();
            assert_eq!(rep.eval(), b);
            let recomputed = rep.terms().iter().fold(BigRational::zero(), |acc, t| {
                acc + tab.weight(t.exp).unwrap()
            });
            assert_eq!(w, recomputed);
        }
    }

    #[test]
    fn norm_of_units_is_at_least_one() {
        let tab = delta234();
        for u in [1i64, 3, 5, 7, 9, 11, 25, 31] {
            let w = restricted_norm(&BigInt::from(u), &tab, 5).unwrap().0;
            assert!(w >= BigRational::one(), "odd {u} got {w}");
        }
    }

    #[test]
    fn norm_is_subadditive_at_matched_caps() {
        let tab = delta234();
        for u in -12i64..=12 {
            for v in -12i64..=12 {
                let nu = restricted_norm(&BigInt::from(u), &tab, 3).unwrap().0;
                let nv = restricted_norm(&BigInt::from(v), &tab, 3).unwrap().0;
                let nuv = restricted_norm(&BigInt::from(u + v), &tab, 6).unwrap().0;
                assert!(nuv <= nu + nv, "u={u}, v={v}");
            }
        }
    }

    #[test]
    fn norm_reports_unrepresentable_inputs() {
        assert_eq!(
            restricted_norm(&BigInt::from(3), &delta234(), 1),
            Err(Error::NotRepresentable { value: "3".into() })
        );
    }

    fn sol(pterms: &[(u32, Sign)], qterms: &[(u32, Sign)]) -> JointSolution {
        JointSolution::new(
            SignedPowerSum::new(p(2), pterms.iter().map(|&(e, s)| Term::new(e, s)).collect()),
            SignedPowerSum::new(p(3), qterms.iter().map(|&(e, s)| Term::new(e, s)).collect()),
        )
        .unwrap()
    }

    #[test]
    fn joint_weight_check_passes_the_small_identities() {
        let dtab = delta234();
        let etab = build_delta(p(3), p(2), 3, 40, &limits()).unwrap();

        let three = sol(&[(1, Plus), (0, Plus)], &[(1, Plus)]);
        let detail = joint_weight_check(&three, &dtab, &etab).unwrap();
        assert!(detail.pass);
        assert_eq!(detail.s, 2);
        assert!(detail.p_side.is_max_side);
        assert_eq!(detail.p_side.total, rat(3, 2));

        let unity = sol(&[(0, Plus)], &[(0, Plus)]);
        let detail = joint_weight_check(&unity, &dtab, &etab).unwrap();
        assert!(detail.pass);
        assert_eq!(detail.p_side.total, BigRational::one());
    }

    #[test]
    fn joint_weight_check_flags_domain_escapes() {
        let dtab = build_delta(p(2), p(3), 2, 12, &limits()).unwrap();
        let etab = build_delta(p(3), p(2), 2, 12, &limits()).unwrap();
        let escape = JointSolution::new(
            SignedPowerSum::new(p(2), vec![Term::new(10, Plus)]),
            balanced_rep(&BigInt::from(1024), p(3)),
        )
        .unwrap();
        match joint_weight_check(&escape, &dtab, &etab) {
            Err(Error::DomainExceeded { power, max }) => {
                assert_eq!(power, "2^10");
                assert_eq!(max, format!("2^{}", dtab.domain_max_exp()));
            }
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn joint_weight_check_rejects_mismatched_tables() {
        let dtab = delta234();
        let unity = sol(&[(0, Plus)], &[(0, Plus)]);
        assert!(matches!(
            joint_weight_check(&unity, &dtab, &dtab),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn certificate_at_one_term() {
        let report = diagonal_discreteness_certificate(p(2), p(3), 1, 40, &limits()).unwrap();
        assert!(report.pass);
        assert_eq!(report.u_values, vec![BigInt::from(-1), BigInt::from(1)]);
        assert!(report.failures.is_empty());
    }

    #[test]
    fn certificate_at_two_terms() {
        let report = diagonal_discreteness_certificate(p(2), p(3), 2, 40, &limits()).unwrap();
        assert!(report.pass);
        for m in [1i64, 2, 3, 4, 8, 9, 28, 30, 36, 72, 80, 240] {
            assert!(report.u_values.contains(&BigInt::from(m)), "missing {m}");
            assert!(report.u_values.contains(&BigInt::from(-m)), "missing {}", -m);
        }
    }

    #[test]
    fn certificate_u_values_are_swap_symmetric() {
        let a = diagonal_discreteness_certificate(p(2), p(3), 2, 20, &limits()).unwrap();
        let b = diagonal_discreteness_certificate(p(3), p(2), 2, 20, &limits()).unwrap();
        assert_eq!(a.u_values, b.u_values);
        assert_eq!(a.solutions_checked, b.solutions_checked);
    }
}
