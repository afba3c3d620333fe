//! Chevalley generator matrices for `U_q(sl_N)`.
//!
//! Provides the fundamental representation of `sl_N`, the (k+1)-dimensional
//! symmetric representations of `sl_2`, and the top-left truncation of the
//! lowest-weight infinite-dimensional representation, together with twisting,
//! diagonal variable powers and the closed-form q-exponential matrices.
//!
//! Twisted generators satisfy the same commutation relations as the untwisted
//! ones, so matrix formulas for group elements use the plain (untwisted)
//! matrices to represent positively- or negatively-twisted generators; the
//! explicit products `q^H T` are exposed by [`Generators::twist`] for the
//! formulas that mix the two conventions.

use std::sync::Arc;

use crate::error::{QcvError, Result};
use crate::matrix::{q_exp_matrix, QExpBase, RingMatrix};
use crate::scalar::{q_binomial, q_int, QScalar};
use crate::torus::{TorusContext, TorusElement, TorusMonomial};

/// Which twist convention an explicit generator product uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwistSign {
    /// `T_+ = q^H T̂_+`, `T_- = T̂_- q^{-H}`.
    Positive,
    /// `T_- = q^H T̂_-`, `T_+ = T̂_+ q^{-H}`.
    Negative,
}

/// Chevalley generators of a representation. `H_i` is always diagonal here
/// with half-integer entries, stored doubled.
#[derive(Debug, Clone)]
pub struct Generators {
    pub dim: usize,
    pub rank: usize,
    /// Doubled diagonal entries of each `H_i`.
    h: Vec<Vec<i64>>,
    t_plus: Vec<RingMatrix<QScalar>>,
    t_minus: Vec<RingMatrix<QScalar>>,
    /// Cartan matrix `C_ij`.
    cartan: Vec<Vec<i64>>,
}

impl Generators {
    pub fn h_doubled(&self, i: usize) -> &[i64] {
        &self.h[i]
    }

    pub fn t_plus(&self, i: usize) -> &RingMatrix<QScalar> {
        &self.t_plus[i]
    }

    pub fn t_minus(&self, i: usize) -> &RingMatrix<QScalar> {
        &self.t_minus[i]
    }

    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        self.cartan[i][j]
    }

    /// `H_i` as a matrix of exact rational constants.
    pub fn h_matrix(&self, i: usize) -> RingMatrix<QScalar> {
        RingMatrix::diagonal(
            self.h[i]
                .iter()
                .map(|&d| {
                    QScalar::from_rational(crate::scalar::BigRational::new(d.into(), 2.into()))
                })
                .collect(),
        )
    }

    /// `q^{c H_i}` as a diagonal matrix of `v`-powers (`c` integer).
    pub fn q_power_h(&self, i: usize, c: i64) -> RingMatrix<QScalar> {
        RingMatrix::diagonal(self.h[i].iter().map(|&d| QScalar::v_pow(c * d)).collect())
    }

    /// Explicitly twisted simple-root generators `(T_{+i}, T_{-i})`.
    pub fn twist(&self, sign: TwistSign) -> (Vec<RingMatrix<QScalar>>, Vec<RingMatrix<QScalar>>) {
        let mut plus = Vec::with_capacity(self.rank);
        let mut minus = Vec::with_capacity(self.rank);
        for i in 0..self.rank {
            match sign {
                TwistSign::Positive => {
                    plus.push(self.q_power_h(i, 1).mul(&self.t_plus[i]));
                    minus.push(self.t_minus[i].mul(&self.q_power_h(i, -1)));
                }
                TwistSign::Negative => {
                    minus.push(self.q_power_h(i, 1).mul(&self.t_minus[i]));
                    plus.push(self.t_plus[i].mul(&self.q_power_h(i, -1)));
                }
            }
        }
        (plus, minus)
    }

    /// Check the quantum commutation relations exactly on the leading
    /// `block` x `block` principal block (full size when `block == dim`):
    /// `q^{H_i} T_{±j} q^{-H_i} = q^{±C_ij/2} T_{±j}` and
    /// `[T_{+i}, T_{-j}] = δ_ij (q^{2H_i} - q^{-2H_i})/(q - q^{-1})`.
    #[allow(clippy::needless_range_loop)]
    pub fn check_relations_on(
        &self,
        t_plus: &[RingMatrix<QScalar>],
        t_minus: &[RingMatrix<QScalar>],
        block: usize,
    ) -> Result<()> {
        for i in 0..self.rank {
            let qh = self.q_power_h(i, 1);
            let qh_inv = self.q_power_h(i, -1);
            for j in 0..self.rank {
                let c = self.cartan[i][j];
                let plus = qh.mul(&t_plus[j]).mul(&qh_inv).leading_block(block);
                let plus_expect = t_plus[j].scale_q(&QScalar::v_pow(c)).leading_block(block);
                if plus != plus_expect {
                    return Err(QcvError::RelationCheckFailed(format!(
                        "q^H_{} conjugation of T_+{}",
                        i + 1,
                        j + 1
                    )));
                }
                let minus = qh.mul(&t_minus[j]).mul(&qh_inv).leading_block(block);
                let minus_expect = t_minus[j].scale_q(&QScalar::v_pow(-c)).leading_block(block);
                if minus != minus_expect {
                    return Err(QcvError::RelationCheckFailed(format!(
                        "q^H_{} conjugation of T_-{}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let denom = &QScalar::q_pow(1) - &QScalar::q_pow(-1);
        for i in 0..self.rank {
            for j in 0..self.rank {
                let comm = t_plus[i]
                    .mul(&t_minus[j])
                    .add(&t_minus[j].mul(&t_plus[i]).scale_q(&QScalar::from_int(-1)))
                    .leading_block(block);
                let expect = if i == j {
                    self.q_power_h(i, 2)
                        .add(&self.q_power_h(i, -2).scale_q(&QScalar::from_int(-1)))
                        .scale_q(&denom.inv())
                        .leading_block(block)
                } else {
                    RingMatrix::zeros(block, &QScalar::zero())
                };
                if comm != expect {
                    return Err(QcvError::RelationCheckFailed(format!(
                        "[T_+{}, T_-{}] commutator",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn check_relations(&self) -> Result<()> {
        self.check_relations_on(&self.t_plus, &self.t_minus, self.dim)
    }
}

/// Fundamental representation of `sl_N`: `T̂_{+i} = E_{i,i+1}`,
/// `T̂_{-i} = E_{i+1,i}`, `H_i = (E_ii - E_{i+1,i+1})/2`, with the standard
/// `A_{N-1}` Cartan matrix. The relations are verified on construction.
pub fn fundamental_rep(n_size: usize) -> Generators {
    assert!(n_size >= 2, "fundamental representation needs N >= 2");
    let rank = n_size - 1;
    let zero = QScalar::zero();
    let mut h = Vec::with_capacity(rank);
    let mut t_plus = Vec::with_capacity(rank);
    let mut t_minus = Vec::with_capacity(rank);
    for i in 0..rank {
        let mut hd = vec![0i64; n_size];
        hd[i] = 1;
        hd[i + 1] = -1;
        h.push(hd);
        let mut tp = RingMatrix::zeros(n_size, &zero);
        tp.set(i, i + 1, QScalar::one());
        t_plus.push(tp);
        let mut tm = RingMatrix::zeros(n_size, &zero);
        tm.set(i + 1, i, QScalar::one());
        t_minus.push(tm);
    }
    let mut cartan = vec![vec![0i64; rank]; rank];
    for i in 0..rank {
        cartan[i][i] = 2;
        if i + 1 < rank {
            cartan[i][i + 1] = -1;
            cartan[i + 1][i] = -1;
        }
    }
    let gens = Generators { dim: n_size, rank, h, t_plus, t_minus, cartan };
    gens.check_relations().expect("fundamental representation must satisfy the relations");
    gens
}

/// Symmetric (spin k/2) representation of `sl_2` on basis `e_0..e_k`:
/// `H = diag(k/2, k/2 - 1, ..., -k/2)`, `T̂_+ e_j = [j] e_{j-1}`,
/// `T̂_- e_j = [k-j] e_{j+1}`. Fails with `RelationCheckFailed` if the
/// constructed matrices violate the algebra.
pub fn symmetric_rep_sl2(k: usize) -> Result<Generators> {
    assert!(k >= 1, "spin representation needs k >= 1");
    let dim = k + 1;
    let zero = QScalar::zero();
    let h: Vec<i64> = (0..dim).map(|j| k as i64 - 2 * j as i64).collect();
    let mut tp = RingMatrix::zeros(dim, &zero);
    let mut tm = RingMatrix::zeros(dim, &zero);
    for j in 1..dim {
        tp.set(j - 1, j, q_int(j as i64));
    }
    for j in 0..dim - 1 {
        tm.set(j + 1, j, q_int((k - j) as i64));
    }
    let gens = Generators {
        dim,
        rank: 1,
        h: vec![h],
        t_plus: vec![tp],
        t_minus: vec![tm],
        cartan: vec![vec![2]],
    };
    gens.check_relations()?;
    Ok(gens)
}

/// Top-left `M x M` corner of the lowest-weight infinite-dimensional
/// representation: `H = diag(-1, -2, ...)`, superdiagonal `[i]` on `T̂_+`,
/// subdiagonal `-[i+1]` on `T̂_-`.
///
/// The corner is not closed under the algebra: the commutator relation fails
/// in the last row/column band, so no relation check runs on construction;
/// use [`Generators::check_relations_on`] with an interior block instead.
pub fn truncated_lowest_weight_rep(m_size: usize) -> Generators {
    assert!(m_size >= 2, "truncation needs M >= 2");
    let zero = QScalar::zero();
    let h: Vec<i64> = (1..=m_size).map(|i| -2 * (i as i64)).collect();
    let mut tp = RingMatrix::zeros(m_size, &zero);
    let mut tm = RingMatrix::zeros(m_size, &zero);
    for i in 1..m_size {
        tp.set(i - 1, i, q_int(i as i64));
        tm.set(i, i - 1, -&q_int(i as i64 + 1));
    }
    Generators {
        dim: m_size,
        rank: 1,
        h: vec![h],
        t_plus: vec![tp],
        t_minus: vec![tm],
        cartan: vec![vec![2]],
    }
}

/// Diagonal matrix `var^H` over the torus: entry `var^{h_jj}` as a monomial
/// with doubled exponent equal to the doubled `H` entry.
pub fn diagonal_power(
    ctx: &Arc<TorusContext>,
    var_idx: usize,
    h_doubled: &[i64],
) -> RingMatrix<TorusElement> {
    RingMatrix::diagonal(
        h_doubled
            .iter()
            .map(|&d| {
                TorusElement::from_monomial(ctx.clone(), TorusMonomial::var_pow(ctx, var_idx, d))
            })
            .collect(),
    )
}

/// The four closed-form q-exponential matrices of the truncated lowest-weight
/// representation, built directly from quantum binomials (1-indexed `i`, `j`):
///
/// - `EqQhTp`:   `e_q(q^H T̂_+)_{ij}   = [j-1 over i-1] q^{-(j-i)(j-1)}`
/// - `E1qTmQh`:  `e_{1/q}(T̂_- q^{-H})_{ij} = [i over j] (-1)^{i-j} q^{(i-j)(i-1)}`
/// - `E1qQhTm`:  `e_{1/q}(q^H T̂_-)_{ij} = [i over j] (-1)^{i-j} q^{-(i-j)(j+1)}`
/// - `EqTpQh`:   `e_q(T̂_+ q^{-H})_{ij} = [j-1 over i-1] q^{(j-i)(i+1)}`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QExpKind {
    EqQhTp,
    E1qTmQh,
    E1qQhTm,
    EqTpQh,
}

impl QExpKind {
    pub const ALL: [QExpKind; 4] = [
        QExpKind::EqQhTp,
        QExpKind::E1qTmQh,
        QExpKind::E1qQhTm,
        QExpKind::EqTpQh,
    ];

    pub fn label(self) -> &'static str {
        match self {
            QExpKind::EqQhTp => "e_q(q^H T+)",
            QExpKind::E1qTmQh => "e_1/q(T- q^-H)",
            QExpKind::E1qQhTm => "e_1/q(q^H T-)",
            QExpKind::EqTpQh => "e_q(T+ q^-H)",
        }
    }
}

pub fn qexp_matrix_elements_closed_form(kind: QExpKind, m_size: usize) -> RingMatrix<QScalar> {
    RingMatrix::from_fn(m_size, |r, c| {
        let (i, j) = (r as i64 + 1, c as i64 + 1);
        match kind {
            QExpKind::EqQhTp => &q_binomial(j - 1, i - 1) * &QScalar::q_pow(-(j - i) * (j - 1)),
            QExpKind::E1qTmQh => {
                let sign = if (i - j).rem_euclid(2) == 0 { 1 } else { -1 };
                &(&q_binomial(i, j) * &QScalar::from_int(sign)) * &QScalar::q_pow((i - j) * (i - 1))
            }
            QExpKind::E1qQhTm => {
                let sign = if (i - j).rem_euclid(2) == 0 { 1 } else { -1 };
                &(&q_binomial(i, j) * &QScalar::from_int(sign))
                    * &QScalar::q_pow(-(i - j) * (j + 1))
            }
            QExpKind::EqTpQh => &q_binomial(j - 1, i - 1) * &QScalar::q_pow((j - i) * (i + 1)),
        }
    })
}

/// The q-exponential series of the corresponding twisted truncated-rep
/// generator, for comparison against the closed form.
pub fn qexp_truncated_generator(kind: QExpKind, m_size: usize) -> RingMatrix<QScalar> {
    let gens = truncated_lowest_weight_rep(m_size);
    let (pos_p, pos_m) = gens.twist(TwistSign::Positive);
    let (neg_p, neg_m) = gens.twist(TwistSign::Negative);
    let (matrix, base) = match kind {
        QExpKind::EqQhTp => (pos_p[0].clone(), QExpBase::Q),
        QExpKind::E1qTmQh => (pos_m[0].clone(), QExpBase::QInv),
        QExpKind::E1qQhTm => (neg_m[0].clone(), QExpBase::QInv),
        QExpKind::EqTpQh => (neg_p[0].clone(), QExpBase::Q),
    };
    q_exp_matrix(&matrix, base, m_size + 1).expect("triangular corner is nilpotent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::BigRational;
    use num_traits::One;

    #[test]
    fn fundamental_sl2_matches_standard_matrices() {
        let g = fundamental_rep(2);
        assert_eq!(g.h_doubled(0), &[1, -1]);
        assert_eq!(g.t_plus(0).get(0, 1), &QScalar::one());
        assert_eq!(g.t_minus(0).get(1, 0), &QScalar::one());
        // [T+, T-] = diag([1], -[1]).
        let comm = g
            .t_plus(0)
            .mul(g.t_minus(0))
            .add(&g.t_minus(0).mul(g.t_plus(0)).scale_q(&QScalar::from_int(-1)));
        assert_eq!(comm.get(0, 0), &q_int(1));
        assert_eq!(comm.get(1, 1), &(-&q_int(1)));
    }

    #[test]
    fn fundamental_sl3_cartan_conjugation() {
        // q^{H_1} T+_2 q^{-H_1} = q^{-1/2} T+_2 (C_12 = -1).
        let g = fundamental_rep(3);
        let lhs = g.q_power_h(0, 1).mul(g.t_plus(1)).mul(&g.q_power_h(0, -1));
        let rhs = g.t_plus(1).scale_q(&QScalar::v_pow(-1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn fundamental_relations_up_to_sl5() {
        for n in 2..=5 {
            fundamental_rep(n); // panics inside if the relation check fails
        }
    }

    #[test]
    fn symmetric_rep_coincides_with_fundamental_at_k1() {
        let spin = symmetric_rep_sl2(1).unwrap();
        let fun = fundamental_rep(2);
        assert_eq!(spin.h_doubled(0), fun.h_doubled(0));
        assert_eq!(spin.t_plus(0), fun.t_plus(0));
        assert_eq!(spin.t_minus(0), fun.t_minus(0));
    }

    #[test]
    fn symmetric_rep_relation_check_passes_up_to_k20() {
        for k in [2usize, 3, 5, 10, 20] {
            symmetric_rep_sl2(k).unwrap();
        }
    }

    #[test]
    fn symmetric_rep_classical_limit() {
        // At v = 1 the generators become the classical spin matrices.
        let k = 4;
        let g = symmetric_rep_sl2(k).unwrap();
        let one = BigRational::one();
        for j in 1..=k {
            assert_eq!(
                g.t_plus(0).get(j - 1, j).evaluate(&one).unwrap(),
                BigRational::from_integer((j as i64).into())
            );
            assert_eq!(
                g.t_minus(0).get(j, j - 1).evaluate(&one).unwrap(),
                BigRational::from_integer((k as i64 - j as i64 + 1).into())
            );
        }
    }

    #[test]
    fn truncated_rep_matrices() {
        let g = truncated_lowest_weight_rep(3);
        assert_eq!(g.h_doubled(0), &[-2, -4, -6]);
        assert_eq!(g.t_plus(0).get(0, 1), &q_int(1));
        assert_eq!(g.t_plus(0).get(1, 2), &q_int(2));
        assert_eq!(g.t_minus(0).get(1, 0), &(-&q_int(2)));
        assert_eq!(g.t_minus(0).get(2, 1), &(-&q_int(3)));
        // Degenerate size still constructs.
        truncated_lowest_weight_rep(2);
    }

    #[test]
    fn truncated_rep_interior_relations() {
        // The commutator relation holds away from the truncation corner.
        let g = truncated_lowest_weight_rep(5);
        g.check_relations_on(&g.t_plus, &g.t_minus, 4).unwrap();
        assert!(g.check_relations().is_err());
    }

    #[test]
    fn twist_entries_fundamental() {
        let g = fundamental_rep(2);
        let (pos_p, _) = g.twist(TwistSign::Positive);
        assert_eq!(pos_p[0].get(0, 1), &QScalar::v_pow(1));
        // Negative twist gives the same entry here because T+ is a corner
        // matrix in the fundamental representation.
        let (neg_p, _) = g.twist(TwistSign::Negative);
        assert_eq!(neg_p[0].get(0, 1), &QScalar::v_pow(1));
    }

    #[test]
    fn twisted_generators_satisfy_relations() {
        for n in [2usize, 3] {
            let g = fundamental_rep(n);
            for sign in [TwistSign::Positive, TwistSign::Negative] {
                let (tp, tm) = g.twist(sign);
                g.check_relations_on(&tp, &tm, g.dim).unwrap();
            }
        }
    }

    #[test]
    fn qexp_of_spin1_raising() {
        // I + T+ + q^{-1} T+^2/[2] in the 3-dimensional representation.
        let g = symmetric_rep_sl2(2).unwrap();
        let e = q_exp_matrix(g.t_plus(0), QExpBase::Q, 5).unwrap();
        let t = g.t_plus(0);
        let t2 = t.mul(t);
        let expected = RingMatrix::identity(3, &QScalar::one())
            .add(t)
            .add(&t2.scale_q(&(&QScalar::q_pow(-1) * &crate::scalar::q_factorial(2).inv())));
        assert_eq!(e, expected);
    }

    #[test]
    fn closed_form_entries_small() {
        let m = qexp_matrix_elements_closed_form(QExpKind::EqQhTp, 4);
        assert_eq!(m.get(0, 0), &QScalar::one());
        // (1,2): [1 over 0] q^{-1}.
        assert_eq!(m.get(0, 1), &QScalar::q_pow(-1));
        // Direct series agrees on the full corner for the triangular kinds.
        for kind in QExpKind::ALL {
            let closed = qexp_matrix_elements_closed_form(kind, 6);
            let series = qexp_truncated_generator(kind, 6);
            assert_eq!(
                closed.leading_block(4),
                series.leading_block(4),
                "{}",
                kind.label()
            );
        }
    }
}
