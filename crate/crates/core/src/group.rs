//! Cluster-seed data and the group element: building blocks in MV and FG
//! parametrizations, the square-bracket map, the word of roots, the factorized
//! coproduct and the 2n-dimensional symplectic leaf.
//!
//! A rank-`n` group element is an ordered product of `n(n+1)/2` building
//! blocks; block `i` carries its own triple of dual variables. The torus
//! contexts group variables block-major, so `w_i, x_i, y_i` (or
//! `psi_i, qphi_i, chi_i`) are adjacent in the normal order. The variable
//! named `qphi_i` stands for `q^{phi_i}`; its half powers (doubled exponent 1)
//! are `q^{phi_i/2}`, which keeps every skew-matrix entry even.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{QcvError, Result};
use crate::matrix::{kron, q_exp_matrix, QExpBase, RingMatrix};
use crate::repr::{diagonal_power, Generators};
use crate::torus::{torus_substitute, TorusContext, TorusElement, TorusMonomial};

/// Building-block parametrization. `Mv`/`Fg` represent positively twisted
/// generators, `MvPrime`/`FgPrime` negatively twisted ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockForm {
    Mv,
    Fg,
    MvPrime,
    FgPrime,
}

/// Number of building blocks for rank `n`.
pub fn num_blocks(n: usize) -> usize {
    n * (n + 1) / 2
}

/// The square-bracket map: block indices `1..=n(n+1)/2` map onto simple roots
/// in descending runs of length `n, n-1, ..., 1`; position `p` of a run maps
/// to root `p`.
pub fn square_bracket(n: usize, i: usize) -> Result<usize> {
    let max = num_blocks(n);
    if i < 1 || i > max {
        return Err(QcvError::IndexOutOfRange { index: i, max, rank: n });
    }
    let mut idx = i;
    let mut run_len = n;
    loop {
        if idx <= run_len {
            return Ok(idx);
        }
        idx -= run_len;
        run_len -= 1;
    }
}

/// The word of roots `D`: each block `i` contributes the positive letter
/// `[i]` followed by the negative letter (encoded as `-[i]`).
pub fn word_d(n: usize) -> Vec<i64> {
    let mut word = Vec::with_capacity(2 * num_blocks(n));
    for i in 1..=num_blocks(n) {
        let root = square_bracket(n, i).unwrap() as i64;
        word.push(root);
        word.push(-root);
    }
    word
}

/// Cluster-seed data: the word of roots, the exchange matrix over all dual
/// variables (in the documented order `w_1, x_1, y_1, w_2, ...`), and the
/// multiplier vector `d` (all ones for a simply-laced group).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub n: usize,
    /// Signed root letters; `k` is the k-th positive simple root, `-k` the
    /// corresponding negative one.
    pub d_word: Vec<i64>,
    /// Variable names in the order the epsilon matrix is written in.
    pub variables: Vec<String>,
    /// Dense antisymmetric exchange matrix; the torus skew matrix is `2 *
    /// epsilon`.
    pub epsilon: Vec<Vec<i64>>,
    /// Multiplier vector, identically 1.
    pub d: Vec<i64>,
}

/// Variable layout shared by all block-major contexts: block `i` (0-based)
/// owns variable slots `3i`, `3i+1`, `3i+2`.
pub fn block_var(block: usize, offset: usize) -> usize {
    3 * block + offset
}

fn block_major_context(n: usize, names: [&str; 3], omega_pattern: [[i64; 3]; 3]) -> Arc<TorusContext> {
    let m = num_blocks(n);
    let mut var_names = Vec::with_capacity(3 * m);
    for i in 1..=m {
        for name in names {
            var_names.push(format!("{}{}", name, i));
        }
    }
    let mut omega = vec![vec![0i64; 3 * m]; 3 * m];
    for b in 0..m {
        for r in 0..3 {
            for c in 0..3 {
                omega[block_var(b, r)][block_var(b, c)] = omega_pattern[r][c];
            }
        }
    }
    TorusContext::new(var_names, omega)
}

/// FG context: per block `(w, x, y)` with `x w = q^2 w x`, `x y = q^2 y x`,
/// `w y = y w`; different blocks commute.
pub fn fg_context(n: usize) -> Arc<TorusContext> {
    block_major_context(n, ["w", "x", "y"], [[0, -2, 0], [2, 0, 2], [0, -2, 0]])
}

/// MV context: per block `(psi, qphi, chi)` with `q^phi psi = q^2 psi q^phi`,
/// `q^phi chi = q^2 chi q^phi`, `psi chi = chi psi`.
pub fn mv_context(n: usize) -> Arc<TorusContext> {
    mv_context_scaled(n, 2)
}

/// MV context with the `(q^phi, psi)` and `(q^phi, chi)` skew entries set to
/// `scale` instead of 2. `scale = 0` makes all dual variables commute;
/// `scale = 1` realizes `q^phi psi = q psi q^phi`. Used by negative controls.
pub fn mv_context_scaled(n: usize, scale: i64) -> Arc<TorusContext> {
    block_major_context(
        n,
        ["psi", "qphi", "chi"],
        [[0, -scale, 0], [scale, 0, scale], [0, -scale, 0]],
    )
}

/// FG-prime context: per block `(a, b, c)` with `b a = q^{-2} a b`,
/// `b c = q^{-2} c b`, `a c = c a`.
pub fn fg_prime_context(n: usize) -> Arc<TorusContext> {
    block_major_context(n, ["a", "b", "c"], [[0, 2, 0], [-2, 0, -2], [0, 2, 0]])
}

/// MV-prime context: per block `(alpha, qbeta, gamma)` with
/// `q^beta alpha = q^2 alpha q^beta`, `q^beta gamma = q^2 gamma q^beta`,
/// `alpha gamma = gamma alpha`.
pub fn mv_prime_context(n: usize) -> Arc<TorusContext> {
    block_major_context(n, ["alpha", "qbeta", "gamma"], [[0, -2, 0], [2, 0, 2], [0, -2, 0]])
}

/// Leaf context: only `w_i, x_i` for the first `n` blocks, with the same
/// phases as in the full FG context (the subalgebra is closed under the
/// commutation relations).
pub fn leaf_context(n: usize) -> Arc<TorusContext> {
    let mut names = Vec::with_capacity(2 * n);
    for i in 1..=n {
        names.push(format!("w{}", i));
        names.push(format!("x{}", i));
    }
    let mut omega = vec![vec![0i64; 2 * n]; 2 * n];
    for b in 0..n {
        omega[2 * b + 1][2 * b] = 2;
        omega[2 * b][2 * b + 1] = -2;
    }
    TorusContext::new(names, omega)
}

/// Emit the cluster-seed data for rank `n`.
pub fn cluster_seed(n: usize) -> Seed {
    let ctx = fg_context(n);
    let m = num_blocks(n);
    let epsilon: Vec<Vec<i64>> = (0..3 * m)
        .map(|r| (0..3 * m).map(|c| ctx.omega(r, c) / 2).collect())
        .collect();
    Seed {
        n,
        d_word: word_d(n),
        variables: ctx.names().to_vec(),
        epsilon,
        d: vec![1; 3 * m],
    }
}

/// The substitution map taking MV variables to FG variables:
/// `psi_i -> w_i`, `q^{phi_i} -> w_i x_i y_i`, `chi_i -> y_i`.
pub fn mv_to_fg_images(n: usize, fg: &Arc<TorusContext>) -> Vec<TorusMonomial> {
    let m = num_blocks(n);
    let mut images = Vec::with_capacity(3 * m);
    for b in 0..m {
        images.push(TorusMonomial::var_pow(fg, block_var(b, 0), 2)); // psi -> w
        let mut exps = vec![0i64; 3 * m];
        exps[block_var(b, 0)] = 2;
        exps[block_var(b, 1)] = 2;
        exps[block_var(b, 2)] = 2;
        images.push(TorusMonomial::new(crate::scalar::QScalar::one(), exps)); // q^phi -> w x y
        images.push(TorusMonomial::var_pow(fg, block_var(b, 2), 2)); // chi -> y
    }
    images
}

fn lift(
    ctx: &Arc<TorusContext>,
    m: &RingMatrix<crate::scalar::QScalar>,
) -> RingMatrix<TorusElement> {
    m.map(|s| TorusElement::scalar(ctx.clone(), s.clone()))
}

/// Scalar torus variable times a lifted generator matrix.
fn scaled_generator(
    ctx: &Arc<TorusContext>,
    var_idx: usize,
    m: &RingMatrix<crate::scalar::QScalar>,
) -> RingMatrix<TorusElement> {
    let var = TorusElement::var_pow(ctx.clone(), var_idx, 2);
    lift(ctx, m).scale_left(&var)
}

/// Single building block `B(i)` (1-based `i`) in the requested form over the
/// matching context.
pub fn building_block(
    n: usize,
    i: usize,
    form: BlockForm,
    rep: &Generators,
    ctx: &Arc<TorusContext>,
) -> Result<RingMatrix<TorusElement>> {
    let root = square_bracket(n, i)? - 1;
    let b = i - 1;
    let max_terms = rep.dim + 1;
    match form {
        BlockForm::Fg => {
            // w^H e_q(T+) x^H e_1/q(T-) y^H
            let eq = q_exp_matrix(&lift(ctx, rep.t_plus(root)), QExpBase::Q, max_terms)?;
            let e1q =
                q_exp_matrix(&lift(ctx, rep.t_minus(root)), QExpBase::QInv, max_terms)?;
            let w = diagonal_power(ctx, block_var(b, 0), rep.h_doubled(root));
            let x = diagonal_power(ctx, block_var(b, 1), rep.h_doubled(root));
            let y = diagonal_power(ctx, block_var(b, 2), rep.h_doubled(root));
            Ok(w.mul(&eq).mul(&x).mul(&e1q).mul(&y))
        }
        BlockForm::Mv => {
            // e_q(psi T+) q^{phi H} e_1/q(chi T-)
            let epsi = q_exp_matrix(
                &scaled_generator(ctx, block_var(b, 0), rep.t_plus(root)),
                QExpBase::Q,
                max_terms,
            )?;
            let echi = q_exp_matrix(
                &scaled_generator(ctx, block_var(b, 2), rep.t_minus(root)),
                QExpBase::QInv,
                max_terms,
            )?;
            let qphi = diagonal_power(ctx, block_var(b, 1), rep.h_doubled(root));
            Ok(epsi_mul(epsi, qphi, echi))
        }
        BlockForm::FgPrime => {
            // a^H e_1/q(T-) b^H e_q(T+) c^H
            let e1q =
                q_exp_matrix(&lift(ctx, rep.t_minus(root)), QExpBase::QInv, max_terms)?;
            let eq = q_exp_matrix(&lift(ctx, rep.t_plus(root)), QExpBase::Q, max_terms)?;
            let a = diagonal_power(ctx, block_var(b, 0), rep.h_doubled(root));
            let bm = diagonal_power(ctx, block_var(b, 1), rep.h_doubled(root));
            let c = diagonal_power(ctx, block_var(b, 2), rep.h_doubled(root));
            Ok(a.mul(&e1q).mul(&bm).mul(&eq).mul(&c))
        }
        BlockForm::MvPrime => {
            // e_1/q(alpha T-) q^{beta H} e_q(gamma T+)
            let ealpha = q_exp_matrix(
                &scaled_generator(ctx, block_var(b, 0), rep.t_minus(root)),
                QExpBase::QInv,
                max_terms,
            )?;
            let egamma = q_exp_matrix(
                &scaled_generator(ctx, block_var(b, 2), rep.t_plus(root)),
                QExpBase::Q,
                max_terms,
            )?;
            let qbeta = diagonal_power(ctx, block_var(b, 1), rep.h_doubled(root));
            Ok(epsi_mul(ealpha, qbeta, egamma))
        }
    }
}

fn epsi_mul(
    left: RingMatrix<TorusElement>,
    mid: RingMatrix<TorusElement>,
    right: RingMatrix<TorusElement>,
) -> RingMatrix<TorusElement> {
    left.mul(&mid).mul(&right)
}

/// The group element: ordered product of all building blocks.
#[derive(Debug, Clone)]
pub struct GroupElement {
    pub n: usize,
    pub form: BlockForm,
    pub ctx: Arc<TorusContext>,
    pub matrix: RingMatrix<TorusElement>,
}

pub fn group_element(
    n: usize,
    form: BlockForm,
    rep: &Generators,
    ctx: &Arc<TorusContext>,
) -> Result<GroupElement> {
    let mut matrix: Option<RingMatrix<TorusElement>> = None;
    for i in 1..=num_blocks(n) {
        let block = building_block(n, i, form, rep, ctx)?;
        matrix = Some(match matrix {
            Some(m) => m.mul(&block),
            None => block,
        });
    }
    Ok(GroupElement { n, form, ctx: ctx.clone(), matrix: matrix.expect("n >= 1") })
}

/// Which comultiplication rules the coproduct factorization uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoproductTwist {
    /// The factorization matching the positively twisted ansatz.
    Positive,
    /// Negative-twist rules; breaks the defining equation for the MV ansatz
    /// and is used as a negative control.
    Negative,
}

/// The coproduct of the MV group element, computed from the factorized form:
/// for each block, six tensor-product factors built from `rep (x) rep`
/// generator matrices scaled by the block's dual variables.
pub fn coproduct_group_element(
    n: usize,
    rep: &Generators,
    ctx: &Arc<TorusContext>,
    twist: CoproductTwist,
) -> Result<RingMatrix<TorusElement>> {
    let dim = rep.dim;
    let id = RingMatrix::identity(dim, &crate::scalar::QScalar::one());
    let max_terms = dim * dim + 1;
    let mut total: Option<RingMatrix<TorusElement>> = None;
    for i in 1..=num_blocks(n) {
        let root = square_bracket(n, i)? - 1;
        let b = i - 1;
        let psi = block_var(b, 0);
        let chi = block_var(b, 2);

        let tp = rep.t_plus(root);
        let tm = rep.t_minus(root);
        let q2h = rep.q_power_h(root, 2);
        let q2h_inv = rep.q_power_h(root, -2);

        // Delta(e_q(psi T+)) factorized via the q-exponential identity.
        let psi_factor = match twist {
            CoproductTwist::Positive => {
                let left = scaled_generator(ctx, psi, &kron(tp, &id));
                let right_t = scaled_generator(ctx, psi, &kron(&q2h, tp));
                q_exp_matrix(&left, QExpBase::Q, max_terms)?
                    .mul(&q_exp_matrix(&right_t, QExpBase::Q, max_terms)?)
            }
            CoproductTwist::Negative => {
                let right = scaled_generator(ctx, psi, &kron(&id, tp));
                let left_t = scaled_generator(ctx, psi, &kron(tp, &q2h_inv));
                q_exp_matrix(&right, QExpBase::Q, max_terms)?
                    .mul(&q_exp_matrix(&left_t, QExpBase::Q, max_terms)?)
            }
        };

        // Delta(q^{phi H}) = q^{phi H} (x) q^{phi H}: primitive Cartan.
        let qphi_l = kron_diag_left(ctx, b, rep, root, dim);
        let qphi_r = kron_diag_right(ctx, b, rep, root, dim);
        let phi_factor = qphi_l.mul(&qphi_r);

        // Delta(e_1/q(chi T-)) factorized.
        let chi_factor = match twist {
            CoproductTwist::Positive => {
                let left_t = scaled_generator(ctx, chi, &kron(tm, &q2h_inv));
                let right = scaled_generator(ctx, chi, &kron(&id, tm));
                q_exp_matrix(&left_t, QExpBase::QInv, max_terms)?
                    .mul(&q_exp_matrix(&right, QExpBase::QInv, max_terms)?)
            }
            CoproductTwist::Negative => {
                let left = scaled_generator(ctx, chi, &kron(tm, &id));
                let right_t = scaled_generator(ctx, chi, &kron(&q2h, tm));
                q_exp_matrix(&left, QExpBase::QInv, max_terms)?
                    .mul(&q_exp_matrix(&right_t, QExpBase::QInv, max_terms)?)
            }
        };

        let factor = psi_factor.mul(&phi_factor).mul(&chi_factor);
        total = Some(match total {
            Some(t) => t.mul(&factor),
            None => factor,
        });
    }
    Ok(total.expect("n >= 1"))
}

/// `q^{phi_i H} (x) I` as a diagonal matrix over the torus.
fn kron_diag_left(
    ctx: &Arc<TorusContext>,
    block: usize,
    rep: &Generators,
    root: usize,
    dim: usize,
) -> RingMatrix<TorusElement> {
    let h = rep.h_doubled(root);
    RingMatrix::diagonal(
        (0..dim * dim)
            .map(|r| {
                TorusElement::from_monomial(
                    ctx.clone(),
                    TorusMonomial::var_pow(ctx, block_var(block, 1), h[r / dim]),
                )
            })
            .collect(),
    )
}

/// `I (x) q^{phi_i H}`.
fn kron_diag_right(
    ctx: &Arc<TorusContext>,
    block: usize,
    rep: &Generators,
    root: usize,
    dim: usize,
) -> RingMatrix<TorusElement> {
    let h = rep.h_doubled(root);
    RingMatrix::diagonal(
        (0..dim * dim)
            .map(|r| {
                TorusElement::from_monomial(
                    ctx.clone(),
                    TorusMonomial::var_pow(ctx, block_var(block, 1), h[r % dim]),
                )
            })
            .collect(),
    )
}

/// The 2n-dimensional symplectic leaf: the product of the first `n` blocks
/// with the `y` factors removed, over the `w_i, x_i` context.
pub fn symplectic_leaf(
    n: usize,
    rep: &Generators,
) -> Result<(Arc<TorusContext>, RingMatrix<TorusElement>)> {
    let ctx = leaf_context(n);
    let max_terms = rep.dim + 1;
    let mut matrix: Option<RingMatrix<TorusElement>> = None;
    for i in 1..=n {
        let root = i - 1;
        let eq = q_exp_matrix(&lift(&ctx, rep.t_plus(root)), QExpBase::Q, max_terms)?;
        let e1q =
            q_exp_matrix(&lift(&ctx, rep.t_minus(root)), QExpBase::QInv, max_terms)?;
        let w = diagonal_power(&ctx, 2 * (i - 1), rep.h_doubled(root));
        let x = diagonal_power(&ctx, 2 * (i - 1) + 1, rep.h_doubled(root));
        let block = w.mul(&eq).mul(&x).mul(&e1q);
        matrix = Some(match matrix {
            Some(m) => m.mul(&block),
            None => block,
        });
    }
    Ok((ctx, matrix.expect("n >= 1")))
}

/// Substitute MV variables by FG variables in an MV-form matrix; with the
/// standard contexts this maps the MV group element onto the FG one.
pub fn substitute_mv_matrix_to_fg(
    n: usize,
    mv: &Arc<TorusContext>,
    fg: &Arc<TorusContext>,
    matrix: &RingMatrix<TorusElement>,
) -> Result<RingMatrix<TorusElement>> {
    let images = mv_to_fg_images(n, fg);
    let mut out = RingMatrix::zeros(matrix.size(), &TorusElement::zero(fg.clone()));
    for ((r, c), e) in matrix.entries() {
        out.set(r, c, torus_substitute(mv, fg, &images, e)?);
    }
    Ok(out)
}
