//! Character algebra for the topologized integers Z{p^n}, their products,
//! and the diagonal: separation and extension of characters, the diagonal
//! annihilator, and the two counterexample witnesses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::arith::{
    denominator_support, distinct_primes, smallest_prime_outside, Prime, TorusElement,
};
use crate::error::{Error, Result};

fn require_support(t: &TorusElement, allowed: Prime) -> Result<()> {
    let support = denominator_support(t);
    if !support.is_subset_of(&[allowed.get()]) {
        return Err(Error::SupportViolation {
            value: t.to_string(),
            found: support.to_vec(),
            allowed: vec![allowed.get()],
        });
    }
    Ok(())
}

/// A character of Z{p^n} × Z{q^n}, pinned down by its values at (1,0) and
/// (0,1): χ(u,v) = αu + βv. Continuity forces the denominator support of α
/// into {p} and that of β into {q}, which the constructor enforces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCharacter {
    alpha: TorusElement,
    beta: TorusElement,
    p: Prime,
    q: Prime,
}

impl ProductCharacter {
    pub fn new(alpha: TorusElement, beta: TorusElement, p: Prime, q: Prime) -> Result<Self> {
        if p == q {
            return Err(Error::EqualPrimes(p.get()));
        }
        require_support(&alpha, p)?;
        require_support(&beta, q)?;
        Ok(ProductCharacter { alpha, beta, p, q })
    }

    pub fn zero(p: Prime, q: Prime) -> Result<Self> {
        Self::new(TorusElement::zero(), TorusElement::zero(), p, q)
    }

    pub fn alpha(&self) -> &TorusElement {
        &self.alpha
    }

    pub fn beta(&self) -> &TorusElement {
        &self.beta
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero()
    }

    /// χ(u,v) = αu + βv in T.
    pub fn eval(&self, u: &BigInt, v: &BigInt) -> TorusElement {
        self.alpha.scale(u).add(&self.beta.scale(v))
    }

    /// Whether χ is identically zero on the diagonal, i.e. α + β ≡ 0 (mod 1);
    /// by linearity this settles χ(u,u) for every u.
    pub fn vanishes_on_diagonal(&self) -> bool {
        self.alpha.add(&self.beta).is_zero()
    }
}

/// The forced derivation that only the zero character vanishes on the
/// diagonal, so no point off the diagonal can be separated from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnihilatorDerivation {
    p: Prime,
    q: Prime,
    steps: Vec<String>,
}

impl AnnihilatorDerivation {
    pub fn steps(&self) -> &[String] {
        &self.steps
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p.get(),
            "q": self.q.get(),
            "annihilator": "{0}",
            "steps": self.steps,
        })
    }
}

pub fn diagonal_annihilator(p: Prime, q: Prime) -> Result<AnnihilatorDerivation> {
    let (p, q) = distinct_primes(p.get(), q.get())?;
    let steps = vec![
        format!(
            "a character of Z{{{p}^n}} x Z{{{q}^n}} has the form chi(u,v) = alpha*u + beta*v \
             with alpha = chi(1,0) supported on {{{p}}} and beta = chi(0,1) supported on {{{q}}}"
        ),
        "chi vanishes on the diagonal iff chi(1,1) = alpha + beta = 0 in T, \
         so alpha = -beta"
            .to_string(),
        format!(
            "the denominator support of alpha = -beta then lies in {{{p}}} and in {{{q}}}, \
             hence in their intersection, which is empty"
        ),
        "a torus element with empty denominator support is an integer, i.e. 0 in T; \
         so alpha = beta = 0 and the annihilator of the diagonal is trivial"
            .to_string(),
    ];
    Ok(AnnihilatorDerivation { p, q, steps })
}

/// A character value at the diagonal generator, written as a sum of one
/// p-supported and one q-supported torus element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalSplit {
    pub alpha: TorusElement,
    pub beta: TorusElement,
}

/// Decides whether the character of the (discrete) diagonal with value `t`
/// at the generator extends to the full product, returning the witnessing
/// split t = alpha + beta when it does. Extendability is exactly denominator
/// support inside {p, q}.
pub fn diag_char_split(t: &TorusElement, p: Prime, q: Prime) -> Result<Option<DiagonalSplit>> {
    let (p, q) = distinct_primes(p.get(), q.get())?;
    let support = denominator_support(t);
    if !support.is_subset_of(&[p.get(), q.get()]) {
        return Ok(None);
    }
    let pb = p.to_bigint();
    let mut pa = BigInt::one();
    let mut qb = t.denom().clone();
    while (&qb % &pb).is_zero() {
        qb /= &pb;
        pa *= &pb;
    }
    // t = n/(p^a q^b); solve x*q^b + y*p^a = n modulo p^a q^b by inverting
    // each factor modulo the other
    let n = t.numer();
    let x = if pa.is_one() {
        BigInt::zero()
    } else {
        let inv = qb.extended_gcd(&pa).x.mod_floor(&pa);
        (n * inv).mod_floor(&pa)
    };
    let y = if qb.is_one() {
        BigInt::zero()
    } else {
        ((n - &x * &qb) / &pa).mod_floor(&qb)
    };
    let alpha = TorusElement::new(BigRational::new(x, pa));
    let beta = TorusElement::new(BigRational::new(y, qb));
    debug_assert_eq!(alpha.add(&beta), *t);
    Ok(Some(DiagonalSplit { alpha, beta }))
}

pub fn is_extendable_diag_char(t: &TorusElement, p: Prime, q: Prime) -> Result<bool> {
    Ok(diag_char_split(t, p, q)?.is_some())
}

/// The point (1,0) together with the derivation that no character separates
/// it from the diagonal: the product fails to be dually closed at Δ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X1Witness {
    pub point: (BigInt, BigInt),
    pub derivation: AnnihilatorDerivation,
}

impl X1Witness {
    pub fn to_json(&self) -> Value {
        let mut steps: Vec<String> = vec![format!(
            "({}, {}) lies outside the diagonal since {} != {}",
            self.point.0, self.point.1, self.point.0, self.point.1
        )];
        steps.extend(self.derivation.steps().iter().cloned());
        steps.push(format!(
            "any character separating ({}, {}) from the diagonal would vanish on the \
             diagonal yet not at the point; the trivial annihilator leaves no candidate",
            self.point.0, self.point.1
        ));
        json!({
            "witness": format!("({}, {})", self.point.0, self.point.1),
            "derivation": steps,
        })
    }
}

pub fn x1_witness(p: Prime, q: Prime) -> Result<X1Witness> {
    let derivation = diagonal_annihilator(p, q)?;
    Ok(X1Witness { point: (BigInt::one(), BigInt::zero()), derivation })
}

/// A character of the diagonal that extends to no character of the product:
/// value 1/r at the generator, r the smallest prime outside {p, q}. The
/// product fails to be dually embedded at Δ.
pub fn x2_witness(p: Prime, q: Prime) -> Result<TorusElement> {
    let (p, q) = distinct_primes(p.get(), q.get())?;
    let r = smallest_prime_outside(&[p.get(), q.get()]);
    let t = TorusElement::new(BigRational::new(BigInt::one(), r.to_bigint()));
    assert!(
        !is_extendable_diag_char(&t, p, q)?,
        "1/{r} must not split over supports {{{p}}} and {{{q}}}"
    );
    Ok(t)
}

/// The character 1/p^m of Z{p^n}, which kills the closed subgroup p^m Z while
/// staying nonzero at `g`; witnesses that the subgroup is dually closed.
pub fn separating_character(p: Prime, m: u32, g: &BigInt) -> Result<TorusElement> {
    let modulus = p.power(m);
    if g.is_multiple_of(&modulus) {
        return Err(Error::ElementInSubgroup {
            element: g.to_string(),
            modulus: modulus.to_string(),
        });
    }
    Ok(TorusElement::new(BigRational::new(BigInt::one(), modulus)))
}

/// Extends the character of p^m Z with value `t` at the generator p^m to the
/// character t/p^m of the whole group; witnesses that the subgroup is dually
/// embedded.
pub fn extend_subgroup_character(p: Prime, m: u32, t: &TorusElement) -> Result<TorusElement> {
    require_support(t, p)?;
    Ok(t.div_int(&p.power(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_p_power_character, parse_rational};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn torus(s: &str) -> TorusElement {
        TorusElement::new(parse_rational(s).unwrap())
    }

    fn chi(alpha: &str, beta: &str) -> ProductCharacter {
        ProductCharacter::new(torus(alpha), torus(beta), p(2), p(3)).unwrap()
    }

    #[test]
    fn eval_examples() {
        let c = chi("1/2", "1/3");
        assert_eq!(c.eval(&BigInt::one(), &BigInt::one()), torus("5/6"));

        let c = chi("1/4", "0");
        assert_eq!(c.eval(&BigInt::from(4), &BigInt::from(7)), TorusElement::zero());

        let c = chi("0", "0");
        assert_eq!(c.eval(&BigInt::from(9), &BigInt::from(-5)), TorusElement::zero());
    }

    #[test]
    fn eval_is_additive() {
        let mut rng = StdRng::seed_from_u64(7);
        let c = chi("3/8", "2/9");
        for _ in 0..200 {
            let (u, u2) = (BigInt::from(rng.gen_range(-50i64..50)), BigInt::from(rng.gen_range(-50i64..50)));
            let (v, v2) = (BigInt::from(rng.gen_range(-50i64..50)), BigInt::from(rng.gen_range(-50i64..50)));
            assert_eq!(
                c.eval(&(&u + &u2), &(&v + &v2)),
                c.eval(&u, &v).add(&c.eval(&u2, &v2))
            );
        }
    }

    #[test]
    fn diagonal_vanishing_examples() {
        assert!(chi("0", "0").vanishes_on_diagonal());
        assert!(!chi("1/2", "1/3").vanishes_on_diagonal());
        assert!(matches!(
            ProductCharacter::new(torus("1/2"), torus("1/2"), p(2), p(3)),
            Err(Error::SupportViolation { .. })
        ));
    }

    #[test]
    fn vanishing_agrees_with_pointwise_evaluation() {
        for c in [chi("0", "0"), chi("1/2", "1/3"), chi("1/4", "2/3"), chi("0", "1/9")] {
            let pointwise = (1..=100).all(|u| {
                c.eval(&BigInt::from(u), &BigInt::from(u)).is_zero()
            });
            assert_eq!(c.vanishes_on_diagonal(), pointwise);
        }
    }

    #[test]
    fn annihilator_is_forced_to_zero() {
        let derivation = diagonal_annihilator(p(2), p(3)).unwrap();
        assert_eq!(derivation.steps().len(), 4);
        assert!(diagonal_annihilator(p(5), p(5)).is_err());

        // the only valid character with alpha + beta integral is (0, 0):
        // any nonzero alpha forces beta = -alpha, whose support is {p}, not {q}
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = rng.gen_range(1u64..64);
            let alpha = torus(&format!("{}/64", a));
            let beta = alpha.neg();
            let built = ProductCharacter::new(alpha.clone(), beta, p(2), p(3));
            if alpha.is_zero() {
                assert!(built.unwrap().is_zero());
            } else {
                assert!(matches!(built, Err(Error::SupportViolation { .. })));
            }
        }
        assert!(ProductCharacter::zero(p(2), p(3)).unwrap().vanishes_on_diagonal());
    }

    #[test]
    fn split_examples() {
        let split = diag_char_split(&torus("1/6"), p(2), p(3)).unwrap().unwrap();
        assert_eq!(split.alpha, torus("1/2"));
        assert_eq!(split.beta, torus("2/3"));

        assert_eq!(diag_char_split(&torus("1/5"), p(2), p(3)).unwrap(), None);
        assert!(is_extendable_diag_char(&TorusElement::zero(), p(2), p(3)).unwrap());
    }

    #[test]
    fn split_respects_supports_and_reassembles() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..500 {
            let num = rng.gen_range(0i64..10_000);
            let denom = 2i64.pow(rng.gen_range(0..8)) * 3i64.pow(rng.gen_range(0..6));
            let t = TorusElement::new(BigRational::new(num.into(), denom.into()));
            let split = diag_char_split(&t, p(2), p(3)).unwrap().unwrap();
            assert!(denominator_support(&split.alpha).is_subset_of(&[2]));
            assert!(denominator_support(&split.beta).is_subset_of(&[3]));
            assert_eq!(split.alpha.add(&split.beta), t);
        }
    }

    #[test]
    fn extendable_characters_form_a_subgroup() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..500 {
            let t1 = TorusElement::new(BigRational::new(
                rng.gen_range(0i64..1000).into(),
                (2i64.pow(rng.gen_range(0..6)) * 3i64.pow(rng.gen_range(0..5))).into(),
            ));
            let t2 = TorusElement::new(BigRational::new(
                rng.gen_range(0i64..1000).into(),
                (2i64.pow(rng.gen_range(0..6)) * 3i64.pow(rng.gen_range(0..5))).into(),
            ));
            assert!(is_extendable_diag_char(&t1.add(&t2), p(2), p(3)).unwrap());
            assert!(is_extendable_diag_char(&t1.neg(), p(2), p(3)).unwrap());
        }
    }

    #[test]
    fn x1_witness_shape() {
        let w = x1_witness(p(2), p(3)).unwrap();
        assert_eq!(w.point, (BigInt::one(), BigInt::zero()));
        assert_ne!(w.point.0, w.point.1);
        // every annihilating character takes value alpha = 0 at the point
        let zero = ProductCharacter::zero(p(2), p(3)).unwrap();
        assert!(zero.eval(&w.point.0, &w.point.1).is_zero());
        assert_eq!(w.to_json()["witness"], "(1, 0)");
    }

    #[test]
    fn x2_witness_rule() {
        assert_eq!(x2_witness(p(2), p(3)).unwrap(), torus("1/5"));
        assert_eq!(x2_witness(p(2), p(5)).unwrap(), torus("1/3"));
        assert_eq!(x2_witness(p(3), p(5)).unwrap(), torus("1/2"));
        assert!(!is_extendable_diag_char(&x2_witness(p(2), p(3)).unwrap(), p(2), p(3)).unwrap());
    }

    #[test]
    fn separating_character_examples() {
        let c = separating_character(p(2), 2, &BigInt::from(3)).unwrap();
        assert_eq!(c, torus("1/4"));
        assert_eq!(c.scale(&BigInt::from(3)), torus("3/4"));

        let c = separating_character(p(3), 1, &BigInt::from(5)).unwrap();
        assert_eq!(c, torus("1/3"));
        assert_eq!(c.scale(&BigInt::from(5)), torus("2/3"));

        assert_eq!(
            separating_character(p(2), 2, &BigInt::from(4)),
            Err(Error::ElementInSubgroup { element: "4".into(), modulus: "4".into() })
        );
        assert!(is_p_power_character(&separating_character(p(7), 3, &BigInt::from(2)).unwrap(), p(7)));
    }

    #[test]
    fn separating_character_kills_the_subgroup() {
        let c = separating_character(p(2), 3, &BigInt::from(5)).unwrap();
        for mult in -20i64..=20 {
            assert!(c.scale(&BigInt::from(8 * mult)).is_zero());
        }
        assert!(!c.scale(&BigInt::from(5)).is_zero());
    }

    #[test]
    fn extend_subgroup_character_round_trips() {
        let e = extend_subgroup_character(p(2), 1, &torus("1/2")).unwrap();
        assert_eq!(e, torus("1/4"));
        assert_eq!(e.scale(&BigInt::from(2)), torus("1/2"));

        let e = extend_subgroup_character(p(3), 2, &torus("1/3")).unwrap();
        assert_eq!(e, torus("1/27"));
        assert_eq!(e.scale(&BigInt::from(9)), torus("1/3"));
        assert!(is_p_power_character(&e, p(3)));

        assert!(matches!(
            extend_subgroup_character(p(2), 1, &torus("1/3")),
            Err(Error::SupportViolation { .. })
        ));
    }
}
