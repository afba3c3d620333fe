//! Quantum torus: normal-ordered Laurent monomials in named variables with
//! exponents in (1/2)Z, subject to `z_a z_b = q^{w_ab} z_b z_a`.
//!
//! Exponents are stored doubled (integers), so `w^{1/2}` has stored exponent 1.
//! The normal form puts variables in declared order; reordering phases are
//! absorbed into the `QScalar` coefficient as powers of `v`. A product of two
//! normal-ordered monomials with doubled exponents `e`, `f` picks up the phase
//! `v^{(1/2) sum_{a>b} e_a w_ab f_b}`. Standard contexts have even `w`, which
//! makes that exponent an integer for arbitrary half-integer monomials; a
//! context with odd entries (used by negative controls) is accepted as long as
//! every phase that actually occurs stays integral, which is checked at
//! runtime.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{QcvError, Result};
use crate::matrix::Ring;
use crate::scalar::{BigRational, QScalar};

/// Variable names plus the integer skew matrix `w` in the convention
/// `z_a z_b = q^{w_ab} z_b z_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusContext {
    names: Vec<String>,
    omega: Vec<Vec<i64>>,
}

impl TorusContext {
    pub fn new(names: Vec<String>, omega: Vec<Vec<i64>>) -> Arc<Self> {
        let n = names.len();
        assert_eq!(omega.len(), n, "omega has wrong number of rows");
        for (i, row) in omega.iter().enumerate() {
            assert_eq!(row.len(), n, "omega has wrong number of columns");
            for j in 0..n {
                assert_eq!(row[j], -omega[j][i], "omega must be antisymmetric");
            }
        }
        Arc::new(TorusContext { names, omega })
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn omega(&self, a: usize, b: usize) -> i64 {
        self.omega[a][b]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `g^T w h` for doubled exponent vectors; the q-exponent of the
    /// commutation phase between the corresponding monomials is this over 4.
    pub fn skew_pairing_numerator(&self, g: &[i64], h: &[i64]) -> i64 {
        let mut acc = 0i64;
        for (u, &gu) in g.iter().enumerate() {
            if gu == 0 {
                continue;
            }
            for (v, &hv) in h.iter().enumerate() {
                if hv != 0 {
                    acc += gu * self.omega[u][v] * hv;
                }
            }
        }
        acc
    }

    /// Reordering phase (as a `v`-exponent) produced when the normal-ordered
    /// monomial with doubled exponents `e` is multiplied by the one with `f`.
    fn product_phase_v(&self, e: &[i64], f: &[i64]) -> i64 {
        // (1/2) sum_{a>b} e_a w_ab f_b
        let mut acc = 0i64;
        for (a, &ea) in e.iter().enumerate() {
            if ea == 0 {
                continue;
            }
            for (b, &fb) in f.iter().enumerate().take(a) {
                if fb != 0 {
                    acc += ea * self.omega[a][b] * fb;
                }
            }
        }
        assert!(
            acc % 2 == 0,
            "non-integral commutation phase v^{acc}/2; odd skew entries require even exponents"
        );
        acc / 2
    }

    fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}

/// Single monomial `coeff * prod_a z_a^{exps_a / 2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusMonomial {
    pub coeff: QScalar,
    pub exps: Vec<i64>,
}

impl TorusMonomial {
    pub fn new(coeff: QScalar, exps: Vec<i64>) -> Self {
        TorusMonomial { coeff, exps }
    }

    /// `z_idx^{doubled/2}` with coefficient one.
    pub fn var_pow(ctx: &TorusContext, idx: usize, doubled: i64) -> Self {
        let mut exps = vec![0; ctx.num_vars()];
        exps[idx] = doubled;
        TorusMonomial { coeff: QScalar::one(), exps }
    }

    pub fn unit(ctx: &TorusContext) -> Self {
        TorusMonomial { coeff: QScalar::one(), exps: vec![0; ctx.num_vars()] }
    }
}

/// Normal-ordered finite sum of torus monomials. Equality is structural.
#[derive(Debug, Clone)]
pub struct TorusElement {
    ctx: Arc<TorusContext>,
    terms: BTreeMap<Vec<i64>, QScalar>,
}

impl PartialEq for TorusElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.terms == other.terms
    }
}

impl TorusElement {
    pub fn zero(ctx: Arc<TorusContext>) -> Self {
        TorusElement { ctx, terms: BTreeMap::new() }
    }

    pub fn one(ctx: Arc<TorusContext>) -> Self {
        Self::from_monomial(ctx.clone(), TorusMonomial::unit(&ctx))
    }

    pub fn scalar(ctx: Arc<TorusContext>, s: QScalar) -> Self {
        let n = ctx.num_vars();
        Self::from_monomial(ctx, TorusMonomial::new(s, vec![0; n]))
    }

    pub fn from_monomial(ctx: Arc<TorusContext>, m: TorusMonomial) -> Self {
        assert_eq!(m.exps.len(), ctx.num_vars(), "exponent vector length");
        let mut terms = BTreeMap::new();
        if !m.coeff.is_zero() {
            terms.insert(m.exps, m.coeff);
        }
        TorusElement { ctx, terms }
    }

    pub fn var_pow(ctx: Arc<TorusContext>, idx: usize, doubled: i64) -> Self {
        let m = TorusMonomial::var_pow(&ctx, idx, doubled);
        Self::from_monomial(ctx, m)
    }

    pub fn context(&self) -> &Arc<TorusContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &QScalar)> {
        self.terms.iter()
    }

    pub fn coeff_of(&self, exps: &[i64]) -> QScalar {
        self.terms.get(exps).cloned().unwrap_or_else(QScalar::zero)
    }

    fn add_term(&mut self, exps: Vec<i64>, coeff: QScalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(c) => {
                *c += &coeff;
                if c.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, coeff);
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert!(self.ctx.same(&rhs.ctx), "context mismatch in torus add");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        TorusElement {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Normal-ordered product; bilinear over the term sums.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert!(self.ctx.same(&rhs.ctx), "context mismatch in torus mul");
        let mut out = TorusElement::zero(self.ctx.clone());
        for (e, c) in &self.terms {
            for (f, d) in &rhs.terms {
                let phase = self.ctx.product_phase_v(e, f);
                let coeff = &(c * d) * &QScalar::v_pow(phase);
                let exps: Vec<i64> = e.iter().zip(f).map(|(a, b)| a + b).collect();
                out.add_term(exps, coeff);
            }
        }
        out
    }

    pub fn scale(&self, s: &QScalar) -> Self {
        if s.is_zero() {
            return TorusElement::zero(self.ctx.clone());
        }
        TorusElement {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    /// The element as a single monomial, if it is one.
    pub fn as_monomial(&self) -> Option<TorusMonomial> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some(TorusMonomial::new(c.clone(), e.clone()))
        } else {
            None
        }
    }

    /// Two-sided inverse of a single monomial. The reordering phase between
    /// `z^e` and `z^{-e}` is folded into the coefficient so that both
    /// `m * m^{-1}` and `m^{-1} * m` are 1.
    pub fn invert_monomial(&self) -> Result<Self> {
        let m = self.as_monomial().ok_or(QcvError::NotInvertible)?;
        if m.coeff.is_zero() {
            return Err(QcvError::NotInvertible);
        }
        let neg: Vec<i64> = m.exps.iter().map(|e| -e).collect();
        let phase = self.ctx.product_phase_v(&m.exps, &neg);
        let coeff = &m.coeff.inv() * &QScalar::v_pow(-phase);
        Ok(Self::from_monomial(self.ctx.clone(), TorusMonomial::new(coeff, neg)))
    }

    /// Map the coefficients through `v -> 1`; the result is the classical
    /// (commutative) form of the element, keyed by the same exponent vectors.
    pub fn classical_coeffs(&self) -> Result<BTreeMap<Vec<i64>, BigRational>> {
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let value = c.evaluate(&BigRational::one())?;
            if !value.is_zero() {
                out.insert(e.clone(), value);
            }
        }
        Ok(out)
    }

    /// Total doubled degree of the highest-degree monomial (sum of absolute
    /// exponents), handy for size diagnostics.
    pub fn max_abs_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|x| x.abs()).sum())
            .max()
            .unwrap_or(0)
    }
}

/// Power of a monomial with half-integer exponent `num/2`.
///
/// The family `m^t` is fixed by `m^1 = m` and `m^t m^s = q^{ts S/4} m^{t+s}`
/// with `S = sum_{u>v} w_uv g_u g_v`, which gives the phase `v^{(t^2-t) S/4}`
/// relative to naive exponent scaling.
pub fn monomial_pow(
    ctx: &Arc<TorusContext>,
    m: &TorusMonomial,
    num: i64,
    variable_for_errors: &str,
) -> Result<TorusMonomial> {
    if num == 0 {
        return Ok(TorusMonomial::unit(ctx));
    }
    let mut exps = Vec::with_capacity(m.exps.len());
    for &g in &m.exps {
        let prod = num * g;
        if prod % 2 != 0 {
            return Err(QcvError::NonIntegralSubstitution {
                variable: variable_for_errors.to_string(),
            });
        }
        exps.push(prod / 2);
    }
    // S = sum_{u>v} w_uv g_u g_v over the doubled exponents.
    let mut s = 0i64;
    for (u, &gu) in m.exps.iter().enumerate() {
        if gu == 0 {
            continue;
        }
        for (v, &gv) in m.exps.iter().enumerate().take(u) {
            if gv != 0 {
                s += ctx.omega(u, v) * gu * gv;
            }
        }
    }
    // v-exponent of the phase: (t^2 - t) S / 4 with t = num/2.
    let theta_num = num * (num - 2) * s;
    if theta_num % 16 != 0 {
        return Err(QcvError::NonIntegralSubstitution {
            variable: variable_for_errors.to_string(),
        });
    }
    let phase = QScalar::v_pow(theta_num / 16);

    let coeff = if num % 2 == 0 {
        m.coeff.pow(num / 2)
    } else if m.coeff.is_one() {
        QScalar::one()
    } else if let Some((k, c)) = m.coeff.as_monomial() {
        // c * v^k with c = 1 handled above; a general rational has no exact
        // half power in the coefficient field unless c = 1 and k*num is even.
        if c.is_one() && (k * num) % 2 == 0 {
            QScalar::v_pow(k * num / 2)
        } else {
            return Err(QcvError::NonIntegralSubstitution {
                variable: variable_for_errors.to_string(),
            });
        }
    } else {
        return Err(QcvError::NonIntegralSubstitution {
            variable: variable_for_errors.to_string(),
        });
    };
    Ok(TorusMonomial::new(&coeff * &phase, exps))
}

/// Algebra homomorphism induced by mapping each source variable to a monomial
/// over the destination context.
///
/// Before substituting, the map is checked to be skew-compatible: for every
/// variable pair the images must commute with exactly the source phase
/// `q^{w^src_ab}`.
pub fn torus_substitute(
    src: &Arc<TorusContext>,
    dst: &Arc<TorusContext>,
    images: &[TorusMonomial],
    a: &TorusElement,
) -> Result<TorusElement> {
    if !a.ctx.same(src) {
        return Err(QcvError::ContextMismatch(
            "element does not live over the source context".into(),
        ));
    }
    if images.len() != src.num_vars() {
        return Err(QcvError::ContextMismatch(
            "substitution map must cover every source variable".into(),
        ));
    }
    for (i, img) in images.iter().enumerate() {
        if img.exps.len() != dst.num_vars() {
            return Err(QcvError::ContextMismatch(format!(
                "image of {} has wrong exponent length",
                src.name(i)
            )));
        }
    }
    // Skew-compatibility guard.
    for i in 0..src.num_vars() {
        for j in 0..i {
            let pairing = dst.skew_pairing_numerator(&images[i].exps, &images[j].exps);
            if pairing % 4 != 0 || pairing / 4 != src.omega(i, j) {
                return Err(QcvError::SkewIncompatible {
                    var_a: src.name(i).to_string(),
                    var_b: src.name(j).to_string(),
                    expected: src.omega(i, j),
                    found: pairing / 4,
                });
            }
        }
    }
    let mut out = TorusElement::zero(dst.clone());
    for (e, c) in &a.terms {
        let mut term = TorusElement::scalar(dst.clone(), c.clone());
        for (idx, &num) in e.iter().enumerate() {
            if num == 0 {
                continue;
            }
            let factor = monomial_pow(dst, &images[idx], num, src.name(idx))?;
            term = term.mul(&TorusElement::from_monomial(dst.clone(), factor));
        }
        out = out.add(&term);
    }
    Ok(out)
}

impl Ring for TorusElement {
    fn zero_like(&self) -> Self {
        TorusElement::zero(self.ctx.clone())
    }
    fn one_like(&self) -> Self {
        TorusElement::one(self.ctx.clone())
    }
    fn is_zero(&self) -> bool {
        TorusElement::is_zero(self)
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

impl fmt::Display for TorusElement {
    /// Canonical text form: monomials sorted by exponent vector, coefficients
    /// with explicit `v`-powers, exponents printed as integers or halves.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let trivial = e.iter().all(|&x| x == 0);
            if !c.is_one() || trivial {
                if c.numerator().num_terms() > 1 || !c.denominator().is_one() {
                    write!(f, "({})", c)?;
                } else {
                    write!(f, "{}", c)?;
                }
                if !trivial {
                    write!(f, "*")?;
                }
            }
            let mut first_var = true;
            for (idx, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if !first_var {
                    write!(f, " ")?;
                }
                first_var = false;
                let name = self.ctx.name(idx);
                if x == 2 {
                    write!(f, "{}", name)?;
                } else if x % 2 == 0 {
                    write!(f, "{}^{}", name, x / 2)?;
                } else {
                    write!(f, "{}^({}/2)", name, x)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Context (w, x, y) with x w = q^2 w x, x y = q^2 y x, w y = y w.
    fn wxy() -> Arc<TorusContext> {
        TorusContext::new(
            vec!["w".into(), "x".into(), "y".into()],
            vec![vec![0, -2, 0], vec![2, 0, 2], vec![0, -2, 0]],
        )
    }

    fn var(ctx: &Arc<TorusContext>, name: &str, doubled: i64) -> TorusElement {
        TorusElement::var_pow(ctx.clone(), ctx.var_index(name).unwrap(), doubled)
    }

    #[test]
    fn xw_reorders_with_q_squared() {
        let ctx = wxy();
        let x = var(&ctx, "x", 2);
        let w = var(&ctx, "w", 2);
        // x * w = q^2 w x
        let prod = x.mul(&w);
        let expected = TorusElement::from_monomial(
            ctx.clone(),
            TorusMonomial::new(QScalar::q_pow(2), vec![2, 2, 0]),
        );
        assert_eq!(prod, expected);
        // w * y = y * w with coefficient 1
        let w1 = var(&ctx, "w", 2);
        let y = var(&ctx, "y", 2);
        assert_eq!(w1.mul(&y), y.mul(&w1));
    }

    #[test]
    fn half_power_square_gives_wxy() {
        let ctx = wxy();
        let half = TorusElement::from_monomial(
            ctx.clone(),
            TorusMonomial::new(QScalar::one(), vec![1, 1, 1]),
        );
        let prod = half.mul(&half);
        let full = TorusElement::from_monomial(
            ctx.clone(),
            TorusMonomial::new(QScalar::one(), vec![2, 2, 2]),
        );
        assert_eq!(prod, full);
    }

    #[test]
    fn wxy_equals_yxw() {
        let ctx = wxy();
        let (w, x, y) = (var(&ctx, "w", 2), var(&ctx, "x", 2), var(&ctx, "y", 2));
        let wxy = w.mul(&x).mul(&y);
        let yxw = y.mul(&x).mul(&w);
        assert_eq!(wxy, yxw);
    }

    #[test]
    fn monomial_inverse_two_sided() {
        let ctx = wxy();
        let m = TorusElement::from_monomial(
            ctx.clone(),
            TorusMonomial::new(&QScalar::v_pow(3) * &QScalar::from_int(2), vec![1, -3, 2]),
        );
        let inv = m.invert_monomial().unwrap();
        let one = TorusElement::one(ctx.clone());
        assert_eq!(m.mul(&inv), one);
        assert_eq!(inv.mul(&m), one);
    }

    #[test]
    fn substitution_identity_map() {
        let ctx = wxy();
        let images: Vec<TorusMonomial> = (0..3).map(|i| TorusMonomial::var_pow(&ctx, i, 2)).collect();
        let a = var(&ctx, "w", 1)
            .mul(&var(&ctx, "x", -1))
            .add(&var(&ctx, "y", 2).scale(&QScalar::q_pow(3)));
        let b = torus_substitute(&ctx, &ctx, &images, &a).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn substitution_rejects_incompatible_map() {
        // MV-style context (psi, qphi, chi).
        let mv = TorusContext::new(
            vec!["psi".into(), "qphi".into(), "chi".into()],
            vec![vec![0, -2, 0], vec![2, 0, 2], vec![0, -2, 0]],
        );
        let fg = wxy();
        // psi -> x, chi -> w is skew-incompatible: images commute with q^2,
        // but psi chi = chi psi requires q^0.
        let images = vec![
            TorusMonomial::var_pow(&fg, 1, 2), // psi -> x
            TorusMonomial::new(QScalar::one(), vec![2, 2, 2]),
            TorusMonomial::var_pow(&fg, 0, 2), // chi -> w
        ];
        let a = TorusElement::var_pow(mv.clone(), 0, 2);
        assert!(matches!(
            torus_substitute(&mv, &fg, &images, &a),
            Err(QcvError::SkewIncompatible { .. })
        ));
        // The psi-chi pair itself conflicts with phases q^0 vs q^2: the images
        // x and w commute with q^2 while psi chi = chi psi needs q^0.
        let pairing = fg.skew_pairing_numerator(&images[0].exps, &images[2].exps);
        assert_eq!(pairing / 4, 2);
        assert_eq!(mv.omega(0, 2), 0);
    }

    #[test]
    fn mv_to_fg_substitution_passes_guard() {
        let mv = TorusContext::new(
            vec!["psi".into(), "qphi".into(), "chi".into()],
            vec![vec![0, -2, 0], vec![2, 0, 2], vec![0, -2, 0]],
        );
        let fg = wxy();
        let images = vec![
            TorusMonomial::var_pow(&fg, 0, 2),                    // psi -> w
            TorusMonomial::new(QScalar::one(), vec![2, 2, 2]),    // q^phi -> w x y
            TorusMonomial::var_pow(&fg, 2, 2),                    // chi -> y
        ];
        // q^{phi/2} maps to w^{1/2} x^{1/2} y^{1/2} with coefficient 1.
        let qphi_half = TorusElement::var_pow(mv.clone(), 1, 1);
        let img = torus_substitute(&mv, &fg, &images, &qphi_half).unwrap();
        let expected = TorusElement::from_monomial(
            fg.clone(),
            TorusMonomial::new(QScalar::one(), vec![1, 1, 1]),
        );
        assert_eq!(img, expected);
    }

    #[test]
    fn display_canonical_text() {
        let ctx = wxy();
        let e = var(&ctx, "w", 1)
            .mul(&var(&ctx, "x", -1))
            .scale(&QScalar::v_pow(2))
            .add(&TorusElement::one(ctx.clone()));
        assert_eq!(e.to_string(), "1 + v^2*w^(1/2) x^(-1/2)");
    }
}
