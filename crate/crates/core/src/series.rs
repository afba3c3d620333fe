//! Degree-truncated normal-ordered power series in `psi` and `chi` with the
//! invertible group-like generator `Q = q^{phi/2}`.
//!
//! Relations: `Q psi = q psi Q`, `Q chi = q chi Q`, `psi chi = chi psi`.
//! Terms are kept in the normal order `psi^a Q^m chi^b` with `a + b` bounded
//! by the context's truncation degree; `Q`-powers are unbounded integers.
//! Reordering `psi^{a1} Q^{m1} chi^{b1} * psi^{a2} Q^{m2} chi^{b2}` produces
//! the exact phase `q^{m1 a2 - m2 b1}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{QcvError, Result};
use crate::matrix::{QExpBase, Ring};
use crate::scalar::{q_factorial, QScalar};
use crate::torus::{TorusContext, TorusElement};
use crate::verify::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesContext {
    degree: u32,
}

impl SeriesContext {
    pub fn new(degree: u32) -> Arc<Self> {
        assert!(degree >= 1, "truncation degree must be at least 1");
        Arc::new(SeriesContext { degree })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

/// Key: (psi-degree, Q-power, chi-degree).
type Key = (u32, i64, u32);

#[derive(Debug, Clone)]
pub struct SkewSeries {
    ctx: Arc<SeriesContext>,
    terms: BTreeMap<Key, QScalar>,
}

impl PartialEq for SkewSeries {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.degree == other.ctx.degree && self.terms == other.terms
    }
}

impl SkewSeries {
    pub fn zero(ctx: Arc<SeriesContext>) -> Self {
        SkewSeries { ctx, terms: BTreeMap::new() }
    }

    pub fn one(ctx: Arc<SeriesContext>) -> Self {
        Self::term(ctx, 0, 0, 0, QScalar::one())
    }

    pub fn scalar(ctx: Arc<SeriesContext>, s: QScalar) -> Self {
        Self::term(ctx, 0, 0, 0, s)
    }

    /// `coeff * psi^a Q^m chi^b`.
    pub fn term(ctx: Arc<SeriesContext>, a: u32, m: i64, b: u32, coeff: QScalar) -> Self {
        let mut s = SkewSeries { ctx, terms: BTreeMap::new() };
        s.add_term((a, m, b), coeff);
        s
    }

    pub fn psi(ctx: Arc<SeriesContext>) -> Self {
        Self::term(ctx, 1, 0, 0, QScalar::one())
    }

    pub fn chi(ctx: Arc<SeriesContext>) -> Self {
        Self::term(ctx, 0, 0, 1, QScalar::one())
    }

    /// `Q^m = q^{m phi / 2}`.
    pub fn q_phi_half_pow(ctx: Arc<SeriesContext>, m: i64) -> Self {
        Self::term(ctx, 0, m, 0, QScalar::one())
    }

    pub fn context(&self) -> &Arc<SeriesContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &QScalar)> {
        self.terms.iter()
    }

    pub fn coeff_of(&self, a: u32, m: i64, b: u32) -> QScalar {
        self.terms.get(&(a, m, b)).cloned().unwrap_or_else(QScalar::zero)
    }

    fn add_term(&mut self, key: Key, coeff: QScalar) {
        if coeff.is_zero() || key.0 + key.2 > self.ctx.degree {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(c) => {
                *c += &coeff;
                if c.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.ctx.degree, rhs.ctx.degree, "context mismatch in series add");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        SkewSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, s: &QScalar) -> Self {
        if s.is_zero() {
            return SkewSeries::zero(self.ctx.clone());
        }
        SkewSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect(),
        }
    }

    /// Normal-ordered product, truncated at the context degree.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ctx.degree, rhs.ctx.degree, "context mismatch in series mul");
        let mut out = SkewSeries::zero(self.ctx.clone());
        for (&(a1, m1, b1), c1) in &self.terms {
            for (&(a2, m2, b2), c2) in &rhs.terms {
                let a = a1 + a2;
                let b = b1 + b2;
                if a + b > self.ctx.degree {
                    continue;
                }
                let phase = 2 * (m1 * a2 as i64 - m2 * b1 as i64);
                let coeff = &(c1 * c2) * &QScalar::v_pow(phase);
                out.add_term((a, m1 + m2, b), coeff);
            }
        }
        out
    }

    /// Lowest total psi+chi degree present.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, _, b)| a + b).min()
    }

    /// The degree-zero part (pure Q-powers).
    fn degree_zero_part(&self) -> Vec<(i64, QScalar)> {
        self.terms
            .iter()
            .filter(|((a, _, b), _)| *a == 0 && *b == 0)
            .map(|((_, m, _), c)| (*m, c.clone()))
            .collect()
    }

    /// Inverse of `u (1 + N)` where `u` is a single invertible monomial
    /// (pure Q-power times a nonzero scalar) and `N` has positive degree:
    /// `(1 + N)^{-1} u^{-1}` via the finite geometric series.
    pub fn invert(&self) -> Result<Self> {
        let unit = self.degree_zero_part();
        if unit.len() != 1 {
            return Err(QcvError::NotInvertible);
        }
        let (m0, c0) = unit.into_iter().next().unwrap();
        if c0.is_zero() {
            return Err(QcvError::NotInvertible);
        }
        let u_inv = SkewSeries::term(self.ctx.clone(), 0, -m0, 0, c0.inv());
        // N = u^{-1} (A - u), strictly positive degree.
        let u = SkewSeries::term(self.ctx.clone(), 0, m0, 0, c0.clone());
        let n = u_inv.mul(&self.sub(&u));
        debug_assert!(n.min_degree().map(|d| d >= 1).unwrap_or(true));
        let mut geom = SkewSeries::one(self.ctx.clone());
        let mut power = SkewSeries::one(self.ctx.clone());
        for _ in 0..self.ctx.degree {
            power = power.mul(&n).neg();
            if power.is_zero() {
                break;
            }
            geom = geom.add(&power);
        }
        Ok(geom.mul(&u_inv))
    }

    /// Retruncate to a coarser degree.
    pub fn truncate_to(&self, degree: u32) -> Self {
        let ctx = SeriesContext::new(degree);
        let mut out = SkewSeries::zero(ctx);
        for (k, c) in &self.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

/// q-exponential of a series with no degree-zero part:
/// `sum_{n<=D} arg^n/[n]! * base^{-n(n-1)/2}`.
pub fn qexp_series(arg: &SkewSeries, base: QExpBase) -> Result<SkewSeries> {
    if !arg.degree_zero_part().is_empty() {
        return Err(QcvError::NonNilpotentArgument);
    }
    let mut acc = SkewSeries::one(arg.ctx.clone());
    let mut power = SkewSeries::one(arg.ctx.clone());
    for n in 1..=arg.ctx.degree as i64 {
        power = power.mul(arg);
        if power.is_zero() {
            break;
        }
        let coeff = &q_factorial(n as u32).inv() * &QScalar::v_pow(base.phase_v_exp(n));
        acc = acc.add(&power.scale(&coeff));
    }
    Ok(acc)
}

impl Ring for SkewSeries {
    fn zero_like(&self) -> Self {
        SkewSeries::zero(self.ctx.clone())
    }
    fn one_like(&self) -> Self {
        SkewSeries::one(self.ctx.clone())
    }
    fn is_zero(&self) -> bool {
        SkewSeries::is_zero(self)
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn ring_neg(&self) -> Self {
        self.neg()
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn scale_q(&self, s: &QScalar) -> Self {
        self.scale(s)
    }
}

impl fmt::Display for SkewSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, m, b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let trivial = a == 0 && m == 0 && b == 0;
            if !c.is_one() || trivial {
                write!(f, "({})", c)?;
                if !trivial {
                    write!(f, "*")?;
                }
            }
            let mut sep = "";
            if a > 0 {
                write!(f, "psi{}", if a > 1 { format!("^{}", a) } else { String::new() })?;
                sep = " ";
            }
            if m != 0 {
                write!(f, "{}Q^{}", sep, m)?;
                sep = " ";
            }
            if b > 0 {
                write!(f, "{}chi{}", sep, if b > 1 { format!("^{}", b) } else { String::new() })?;
            }
        }
        Ok(())
    }
}

/// Components of the alternative-parametrization change of variables:
/// `q^{beta/2} = Q + psi Q^{-1} chi`, with
/// `alpha = Q^{-1} chi Q^{-1} (1 + psi Q^{-1} chi Q^{-1})^{-1}` and
/// `gamma = (1 + Q^{-1} psi Q^{-1} chi)^{-1} Q^{-1} psi Q^{-1}`.
pub struct Albega {
    pub alpha: SkewSeries,
    pub q_beta_half: SkewSeries,
    pub gamma: SkewSeries,
}

/// Build `alpha`, `q^{beta/2}`, `gamma` at truncation degree `d`.
pub fn albega_elements(d: u32) -> Albega {
    let ctx = SeriesContext::new(d);
    let q = |m: i64| SkewSeries::q_phi_half_pow(ctx.clone(), m);
    let psi = SkewSeries::psi(ctx.clone());
    let chi = SkewSeries::chi(ctx.clone());
    let one = SkewSeries::one(ctx.clone());

    let q_beta_half = q(1).add(&psi.mul(&q(-1)).mul(&chi));

    let qcq = q(-1).mul(&chi).mul(&q(-1));
    let alpha = qcq.mul(
        &one.add(&psi.mul(&q(-1)).mul(&chi).mul(&q(-1)))
            .invert()
            .expect("unit-plus-nilpotent"),
    );

    let qpq = q(-1).mul(&psi).mul(&q(-1));
    let gamma = one
        .add(&q(-1).mul(&psi).mul(&q(-1)).mul(&chi))
        .invert()
        .expect("unit-plus-nilpotent")
        .mul(&qpq);

    Albega { alpha, q_beta_half, gamma }
}

/// Build the alternative-parametrization elements and verify, to degree `d`:
///  (i) `alpha q^{beta/2} gamma + q^{-beta/2} = q^{-phi/2}`;
/// (ii) `q^beta alpha = q^2 alpha q^beta` and `q^beta gamma = q^2 gamma q^beta`;
/// (iii) `alpha gamma = gamma alpha`.
pub fn compute_albega(d: u32) -> (Albega, VerificationReport) {
    let elems = albega_elements(d);
    let report = albega_checks(&elems, d);
    (elems, report)
}

pub(crate) fn albega_checks(elems: &Albega, d: u32) -> VerificationReport {
    let Albega { alpha, q_beta_half, gamma } = elems;
    let ctx = q_beta_half.context().clone();
    let report =
        VerificationReport::new("albega", "albega-relations").with_param("degree", d);

    let q_beta_half_inv = match q_beta_half.invert() {
        Ok(s) => s,
        Err(_) => {
            return report.fail(
                "q^{beta/2}".into(),
                "not invertible".into(),
                "unit-plus-nilpotent expected".into(),
            )
        }
    };

    // (i) fourth consistency equation.
    let lhs = alpha.mul(q_beta_half).mul(gamma).add(&q_beta_half_inv);
    let rhs = SkewSeries::q_phi_half_pow(ctx.clone(), -1);
    if let Some(m) = first_series_mismatch(&lhs, &rhs) {
        return report.fail(format!("alpha q^(b/2) gamma + q^(-b/2) at {}", m.0), m.1, m.2);
    }

    // (ii) q^beta alpha = q^2 alpha q^beta, same for gamma.
    let q_beta = q_beta_half.mul(q_beta_half);
    for (name, elem) in [("alpha", alpha), ("gamma", gamma)] {
        let lhs = q_beta.mul(elem);
        let rhs = elem.mul(&q_beta).scale(&QScalar::q_pow(2));
        if let Some(m) = first_series_mismatch(&lhs, &rhs) {
            return report.fail(format!("q^beta {} commutation at {}", name, m.0), m.1, m.2);
        }
    }

    // (iii) alpha gamma = gamma alpha.
    let lhs = alpha.mul(gamma);
    let rhs = gamma.mul(alpha);
    if let Some(m) = first_series_mismatch(&lhs, &rhs) {
        return report.fail(format!("alpha gamma commutation at {}", m.0), m.1, m.2);
    }
    report
}

pub(crate) fn first_series_mismatch(
    lhs: &SkewSeries,
    rhs: &SkewSeries,
) -> Option<(String, String, String)> {
    let mut keys: Vec<Key> = lhs.terms.keys().chain(rhs.terms.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    for k in keys {
        let a = lhs.coeff_of(k.0, k.1, k.2);
        let b = rhs.coeff_of(k.0, k.1, k.2);
        if a != b {
            return Some((
                format!("psi^{} Q^{} chi^{}", k.0, k.1, k.2),
                a.to_string(),
                b.to_string(),
            ));
        }
    }
    None
}

/// Check the q-exponential factorization on the quantum plane:
/// `e_q(y) e_q(x) = e_q(x + y)` when `x y = q^2 y x`, and the `1/q` variant
/// when `x y = q^{-2} y x`. Both sides are truncated at total degree `d` and
/// compared coefficient by coefficient; all contributions to degree <= d come
/// from partial sums with n <= d, so the comparison is exact to that order.
pub fn check_qexp_factorization(d: u32, base: QExpBase) -> VerificationReport {
    let omega = match base {
        QExpBase::Q => 2,
        QExpBase::QInv => -2,
    };
    let report = VerificationReport::new(
        "qexp-factorization",
        match base {
            QExpBase::Q => "qexp-factorization-q",
            QExpBase::QInv => "qexp-factorization-1/q",
        },
    )
    .with_param("degree", d)
    .with_param("plane", format!("x y = q^{} y x", omega));
    qexp_factorization_inner(d, base, omega, report)
}

/// Same comparison with an arbitrary plane relation `x y = q^w y x`;
/// used as a negative control with the wrong phase.
pub fn check_qexp_factorization_with_omega(
    d: u32,
    base: QExpBase,
    omega: i64,
) -> VerificationReport {
    let report =
        VerificationReport::new("qexp-factorization", "qexp-factorization-negative-control")
            .with_param("degree", d)
            .with_param("plane", format!("x y = q^{} y x", omega));
    qexp_factorization_inner(d, base, omega, report)
}

fn qexp_factorization_inner(
    d: u32,
    base: QExpBase,
    omega: i64,
    report: VerificationReport,
) -> VerificationReport {
    let ctx = TorusContext::new(
        vec!["x".into(), "y".into()],
        vec![vec![0, omega], vec![-omega, 0]],
    );
    let x = TorusElement::var_pow(ctx.clone(), 0, 2);
    let y = TorusElement::var_pow(ctx.clone(), 1, 2);

    let lhs = truncated_qexp_torus(&y, base, d).mul(&truncated_qexp_torus(&x, base, d));
    let rhs = truncated_qexp_torus(&x.add(&y), base, d);

    let filter = |e: &TorusElement| -> BTreeMap<Vec<i64>, QScalar> {
        e.terms()
            .filter(|(k, _)| (k[0] + k[1]) / 2 <= d as i64)
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect()
    };
    let (lmap, rmap) = (filter(&lhs), filter(&rhs));
    let mut keys: Vec<_> = lmap.keys().chain(rmap.keys()).cloned().collect();
    keys.sort_unstable();
    keys.dedup();
    for k in keys {
        let a = lmap.get(&k).cloned().unwrap_or_else(QScalar::zero);
        let b = rmap.get(&k).cloned().unwrap_or_else(QScalar::zero);
        if a != b {
            return report.fail(
                format!("x^{} y^{}", k[0] / 2, k[1] / 2),
                a.to_string(),
                b.to_string(),
            );
        }
    }
    report
}

/// Partial sums of the q-exponential of a positive-degree torus element,
/// truncated at total (doubled/2) degree `d`.
fn truncated_qexp_torus(arg: &TorusElement, base: QExpBase, d: u32) -> TorusElement {
    let mut acc = TorusElement::one(arg.context().clone());
    let mut power = TorusElement::one(arg.context().clone());
    for n in 1..=d as i64 {
        power = power.mul(arg);
        let coeff = &q_factorial(n as u32).inv() * &QScalar::v_pow(base.phase_v_exp(n));
        acc = acc.add(&power.scale(&coeff));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Status;

    fn ctx(d: u32) -> Arc<SeriesContext> {
        SeriesContext::new(d)
    }

    #[test]
    fn q_moves_past_psi_with_phase_q() {
        let c = ctx(4);
        let q = SkewSeries::q_phi_half_pow(c.clone(), 1);
        let psi = SkewSeries::psi(c.clone());
        // Q psi = q psi Q
        let lhs = q.mul(&psi);
        let rhs = psi.mul(&q).scale(&QScalar::q_pow(1));
        assert_eq!(lhs, rhs);
        // psi chi = chi psi
        let chi = SkewSeries::chi(c.clone());
        assert_eq!(psi.mul(&chi), chi.mul(&psi));
    }

    #[test]
    fn word_oracle_for_psi_qinv_chi_squared() {
        // (psi Q^{-1} chi)^2: letter-by-letter reordering gives
        // psi^2 Q^{-2} chi^2 with coefficient exactly 1.
        let c = ctx(4);
        let q = |m| SkewSeries::q_phi_half_pow(c.clone(), m);
        let w = SkewSeries::psi(c.clone()).mul(&q(-1)).mul(&SkewSeries::chi(c.clone()));
        let sq = w.mul(&w);
        assert_eq!(sq, SkewSeries::term(c.clone(), 2, -2, 2, QScalar::one()));
    }

    #[test]
    fn inversion_examples() {
        let c = ctx(6);
        let one = SkewSeries::one(c.clone());
        assert_eq!(one.invert().unwrap(), one);

        let q = SkewSeries::q_phi_half_pow(c.clone(), 1);
        assert_eq!(q.invert().unwrap(), SkewSeries::q_phi_half_pow(c.clone(), -1));

        // A = 1 + psi Q^{-1} chi: two-sided inverse up to truncation.
        let n = SkewSeries::term(c.clone(), 1, -1, 1, QScalar::one());
        let a = one.add(&n);
        let inv = a.invert().unwrap();
        assert_eq!(a.mul(&inv), one);
        assert_eq!(inv.mul(&a), one);

        // Degree-zero part with two Q-powers is not a monomial unit.
        let bad = one.add(&q);
        assert!(matches!(bad.invert(), Err(QcvError::NotInvertible)));
    }

    #[test]
    fn qexp_small_expansion() {
        // arg = psi, D = 2, base q: 1 + psi + q^{-1} psi^2 / [2].
        let c = ctx(2);
        let e = qexp_series(&SkewSeries::psi(c.clone()), QExpBase::Q).unwrap();
        let expected = SkewSeries::one(c.clone())
            .add(&SkewSeries::psi(c.clone()))
            .add(&SkewSeries::term(
                c.clone(),
                2,
                0,
                0,
                &QScalar::q_pow(-1) * &q_factorial(2).inv(),
            ));
        assert_eq!(e, expected);

        assert_eq!(
            qexp_series(&SkewSeries::zero(c.clone()), QExpBase::Q).unwrap(),
            SkewSeries::one(c.clone())
        );
        assert!(matches!(
            qexp_series(&SkewSeries::one(c.clone()), QExpBase::Q),
            Err(QcvError::NonNilpotentArgument)
        ));
    }

    #[test]
    fn factorization_passes_and_controls_fail() {
        assert_eq!(check_qexp_factorization(6, QExpBase::Q).status, Status::Pass);
        assert_eq!(check_qexp_factorization(6, QExpBase::QInv).status, Status::Pass);
        let bad = check_qexp_factorization_with_omega(6, QExpBase::Q, 1);
        assert_eq!(bad.status, Status::Fail);
        let m = bad.mismatch.unwrap();
        assert_eq!(m.location, "x^1 y^1");
    }

    #[test]
    fn albega_passes_and_degenerate_degree() {
        let (_, report) = compute_albega(8);
        assert!(report.passed(), "{}", report);

        // Degree 1: alpha and gamma reduce to their leading terms.
        let (elems, report) = compute_albega(1);
        assert!(report.passed(), "{}", report);
        // Q^{-1} chi Q^{-1} = q Q^{-2} chi; Q^{-1} psi Q^{-1} = q^{-1} psi Q^{-2}.
        assert_eq!(
            elems.alpha,
            SkewSeries::term(elems.alpha.context().clone(), 0, -2, 1, QScalar::q_pow(1))
        );
        assert_eq!(
            elems.gamma,
            SkewSeries::term(elems.gamma.context().clone(), 1, -2, 0, QScalar::q_pow(-1))
        );
    }

    #[test]
    fn albega_perturbed_definition_fails() {
        // q^{beta/2} := Q + psi Q^{+1} chi breaks alpha-gamma commutativity.
        let d = 6;
        let c = ctx(d);
        let elems = albega_elements(d);
        let perturbed = Albega {
            q_beta_half: SkewSeries::q_phi_half_pow(c.clone(), 1).add(&SkewSeries::term(
                c.clone(),
                1,
                1,
                1,
                QScalar::one(),
            )),
            alpha: elems.alpha.clone(),
            gamma: elems.gamma.clone(),
        };
        let report = albega_checks(&perturbed, d);
        assert!(!report.passed());
    }

    #[test]
    fn truncation_coherence() {
        let (coarse, _) = compute_albega(4);
        let (fine, _) = compute_albega(8);
        assert_eq!(fine.alpha.truncate_to(4), coarse.alpha);
        assert_eq!(fine.gamma.truncate_to(4), coarse.gamma);
        assert_eq!(fine.q_beta_half.truncate_to(4), coarse.q_beta_half);
    }

    #[test]
    fn mul_associativity_sweep() {
        let c = ctx(5);
        let atoms = vec![
            SkewSeries::psi(c.clone()),
            SkewSeries::chi(c.clone()),
            SkewSeries::q_phi_half_pow(c.clone(), 2),
            SkewSeries::term(c.clone(), 1, -1, 1, QScalar::v_pow(3)),
            SkewSeries::one(c.clone())
                .add(&SkewSeries::term(c.clone(), 0, 1, 1, QScalar::from_int(2))),
        ];
        for a in &atoms {
            for b in &atoms {
                for d in &atoms {
                    assert_eq!(a.mul(b).mul(d), a.mul(&b.mul(d)));
                }
            }
        }
    }
}
