//! Abelian codes as ideals of F_q G: generator matrices in canonical reduced
//! form, the coordinatewise inner product, duals, and the LCD versus
//! self-orthogonal classification with its *-cleanness equivalence.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::algebra::{AlgebraElem, Involution};
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem};
use crate::group::AbelianGroup;
use crate::idem::PrimitiveIdempotent;
use crate::linalg::Matrix;
use crate::numtheory::solve_power_congruence;

/// An ideal of F_q G represented by the canonical reduced row-echelon basis
/// of its coefficient vectors, columns in group-element order.
#[derive(Clone, Debug)]
pub struct AbelianCode {
    group: AbelianGroup,
    ctx: Arc<FieldCtx>,
    basis: Matrix,
    dimension: usize,
}

impl AbelianCode {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of codewords q^dim when it fits in a u64.
    pub fn codewords(&self) -> Option<u64> {
        let q = self.ctx.size_u64()?;
        let mut acc: u64 = 1;
        for _ in 0..self.dimension {
            acc = acc.checked_mul(q)?;
        }
        Some(acc)
    }

    /// Basis rows as algebra elements.
    pub fn basis_elements(&self) -> Vec<AlgebraElem> {
        (0..self.dimension)
            .map(|i| {
                AlgebraElem::from_terms(
                    &self.group,
                    &self.ctx,
                    self.basis
                        .row(i)
                        .iter()
                        .enumerate()
                        .map(|(j, c)| (self.group.elem_at(j as u64), c.clone())),
                )
                .expect("basis entries share the code context")
            })
            .collect()
    }
}

fn require_semisimple(group: &AbelianGroup, ctx: &FieldCtx) -> Result<()> {
    if group.order() % ctx.p() == 0 {
        return Err(Error::NotSemisimple {
            q: ctx.p(),
            order: group.order(),
        });
    }
    Ok(())
}

/// The abelian code generated by the primitive idempotent of a cyclotomic
/// class: the row space of { g * e : g in G }.
pub fn code_from_class(prim: &PrimitiveIdempotent) -> Result<AbelianCode> {
    let e = &prim.element;
    let group = e.group().clone();
    let ctx = Arc::clone(e.ctx());
    require_semisimple(&group, &ctx)?;
    let rows: Vec<Vec<FieldElem>> = group
        .elements()
        .map(|g| e.mul_elem(&g).to_dense())
        .collect();
    let basis = Matrix::from_rows(rows)?.row_space_basis(&ctx);
    let dimension = basis.rows();
    debug_assert_eq!(dimension, prim.class.size());
    Ok(AbelianCode {
        group,
        ctx,
        basis,
        dimension,
    })
}

/// Coordinatewise inner product of coefficient vectors.
pub fn inner_product(a: &AlgebraElem, b: &AlgebraElem) -> Result<FieldElem> {
    if a.group() != b.group() {
        return Err(Error::GroupMismatch);
    }
    if a.ctx() != b.ctx() {
        return Err(Error::CtxMismatch);
    }
    let ctx = a.ctx();
    let mut acc = ctx.zero();
    for (g, c) in a.terms() {
        let d = b.coeff(g);
        if !ctx.is_zero(&d) {
            acc = ctx.add(&acc, &ctx.mul(c, &d));
        }
    }
    Ok(acc)
}

/// The dual code: the null space of the basis under the coordinate inner
/// product, in canonical reduced form.
pub fn dual_code(code: &AbelianCode) -> AbelianCode {
    let basis = if code.dimension == 0 {
        // dual of the zero code is everything
        let n = code.group.order() as usize;
        let mut m = Matrix::zeros(&code.ctx, n, n);
        for i in 0..n {
            m.set(i, i, code.ctx.one());
        }
        m
    } else {
        code.basis.nullspace(&code.ctx)
    };
    let dimension = basis.rows();
    debug_assert_eq!(dimension + code.dimension, code.group.order() as usize);
    AbelianCode {
        group: code.group.clone(),
        ctx: Arc::clone(&code.ctx),
        basis,
        dimension,
    }
}

/// Checks the structural dual identity: the dual of C_psi is the direct sum
/// of the codes of every class other than the class of psi^-1.
pub fn dual_structure_check(prims: &[PrimitiveIdempotent], idx: usize) -> Result<bool> {
    let psi_inv = prims[idx].class.rep.inverse();
    let excluded = prims
        .iter()
        .position(|p| p.class.contains(&psi_inv))
        .ok_or_else(|| Error::Internal("inverse character missing from all classes".into()))?;
    let dual = dual_code(&code_from_class(&prims[idx])?);
    let mut stacked: Option<Matrix> = None;
    for (j, p) in prims.iter().enumerate() {
        if j == excluded {
            continue;
        }
        let c = code_from_class(p)?;
        stacked = Some(match stacked {
            None => c.basis,
            Some(acc) => acc.stack(&c.basis)?,
        });
    }
    let ctx = prims[idx].element.ctx();
    Ok(match stacked {
        None => dual.dimension == 0,
        Some(m) => m.same_row_space(&dual.basis, ctx),
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeKind {
    Lcd,
    SelfOrthogonal,
}

/// Classification of a class code, carrying both the number-theoretic verdict
/// and the linear-algebra evidence that re-proves it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub class_rep: Vec<u64>,
    pub char_order: u64,
    pub dimension: usize,
    pub kind: CodeKind,
    /// Least t with q^t = -1 (mod ord psi) when the code is LCD.
    pub witness_t: Option<u64>,
    /// C intersect C-perp is trivial (computed by rank of the Gram matrix).
    pub lcd_by_rank: bool,
    /// C is contained in C-perp (the Gram matrix vanishes).
    pub self_orthogonal_by_gram: bool,
}

/// Classifies the code of a cyclotomic class as LCD or self-orthogonal.
///
/// Number theory decides: C_psi is LCD iff psi^-1 lies in the class of psi,
/// i.e. some t has q^t = -1 (mod ord psi); otherwise it is self-orthogonal.
/// The linear-algebra definitions are evaluated independently and must agree,
/// so the classification re-proves itself on every call.
pub fn classify_code(prim: &PrimitiveIdempotent) -> Result<Classification> {
    let ctx = prim.element.ctx();
    let q = ctx.size_u64().ok_or(Error::SizeBound {
        what: "coefficient field",
        value: ctx.size_big().try_into().unwrap_or(u128::MAX),
        bound: crate::gf::MAX_BASE_SIZE as u128,
    })?;
    let d = prim.class.rep.order();
    let witness = solve_power_congruence(q, -1, d)?;
    let nt_lcd = witness.is_some();
    debug_assert_eq!(nt_lcd, prim.class.contains(&prim.class.rep.inverse()));

    let code = code_from_class(prim)?;
    let gram = code.basis.mul_transpose(&code.basis, ctx)?;
    let lcd_by_rank = gram.rank(ctx) == code.dimension;
    let self_orthogonal_by_gram = gram.is_zero(ctx);
    if nt_lcd != lcd_by_rank || nt_lcd == self_orthogonal_by_gram {
        return Err(Error::Internal(format!(
            "classification mismatch for class {:?}: congruence says LCD={nt_lcd}, \
             rank says LCD={lcd_by_rank}, gram-zero says SO={self_orthogonal_by_gram}",
            prim.class.rep.exponents()
        )));
    }
    Ok(Classification {
        class_rep: prim.class.rep.exponents().to_vec(),
        char_order: d,
        dimension: code.dimension,
        kind: if nt_lcd {
            CodeKind::Lcd
        } else {
            CodeKind::SelfOrthogonal
        },
        witness_t: witness,
        lcd_by_rank,
        self_orthogonal_by_gram,
    })
}

/// Exhaustive minimum distance, only for codes with at most `max_codewords`
/// codewords; `None` otherwise (and for the zero code).
pub fn min_distance(code: &AbelianCode, max_codewords: u64) -> Option<u64> {
    if code.dimension == 0 {
        return None;
    }
    let total = code.codewords().filter(|&c| c <= max_codewords)?;
    let ctx = &code.ctx;
    let field: Vec<FieldElem> = ctx.elements().ok()?.collect();
    let q = field.len() as u64;
    let n = code.group.order() as usize;
    let mut best = u64::MAX;
    for mut counter in 1..total {
        let mut word = vec![ctx.zero(); n];
        for row in 0..code.dimension {
            let c = &field[(counter % q) as usize];
            counter /= q;
            if ctx.is_zero(c) {
                continue;
            }
            for (slot, entry) in word.iter_mut().zip(code.basis.row(row)) {
                *slot = ctx.add(slot, &ctx.mul(c, entry));
            }
        }
        let weight = word.iter().filter(|c| !ctx.is_zero(c)).count() as u64;
        if weight > 0 {
            best = best.min(weight);
        }
    }
    (best != u64::MAX).then_some(best)
}

/// The four equivalent conditions tying *-cleanness (classical involution)
/// to the code classification, evaluated side by side with the congruence
/// criterion; they must all agree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Theorem43Report {
    pub all_lcd: bool,
    pub none_self_orthogonal: bool,
    pub exists_full_order_lcd: bool,
    pub exists_full_order_not_self_orthogonal: bool,
    pub star_clean: bool,
    pub witness_t: Option<u64>,
    /// n = 1 has no character of full order other than the trivial one; the
    /// degenerate reading is flagged rather than interpreted.
    pub degenerate: bool,
}

pub fn theorem43_report(field: &Arc<FieldCtx>, g: &AbelianGroup) -> Result<Theorem43Report> {
    require_semisimple(g, field)?;
    let prims = crate::idem::primitive_idempotents(g, field)?;
    let classifications: Vec<Classification> = prims
        .iter()
        .map(classify_code)
        .collect::<Result<Vec<_>>>()?;
    let n = g.exponent();
    let all_lcd = classifications.iter().all(|c| c.kind == CodeKind::Lcd);
    let none_self_orthogonal = !classifications
        .iter()
        .any(|c| c.kind == CodeKind::SelfOrthogonal);
    let exists_full_order_lcd = classifications
        .iter()
        .any(|c| c.char_order == n && c.kind == CodeKind::Lcd);
    let exists_full_order_not_self_orthogonal = classifications
        .iter()
        .any(|c| c.char_order == n && c.kind != CodeKind::SelfOrthogonal);
    let criterion = crate::starclean::analyze(
        field,
        g,
        &Involution::classical(),
        false,
        false,
        crate::idem::DEFAULT_SUBSET_BOUND,
    )?;
    let conditions = [
        all_lcd,
        none_self_orthogonal,
        exists_full_order_lcd,
        exists_full_order_not_self_orthogonal,
    ];
    if conditions.iter().any(|&c| c != criterion.verdict) {
        return Err(Error::Internal(format!(
            "theorem-level equivalence failed for {g} over {}: conditions {conditions:?} \
             vs criterion {}",
            field, criterion.verdict
        )));
    }
    Ok(Theorem43Report {
        all_lcd,
        none_self_orthogonal,
        exists_full_order_lcd,
        exists_full_order_not_self_orthogonal,
        star_clean: criterion.verdict,
        witness_t: criterion.witness_t,
        degenerate: n == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_element;
    use crate::idem::primitive_idempotents;

    fn prims_for(spec: &str, q: u64) -> (AbelianGroup, Arc<FieldCtx>, Vec<PrimitiveIdempotent>) {
        let (p, k) = crate::numtheory::prime_power_split(q).unwrap();
        let f = FieldCtx::build(p, k, 1).unwrap();
        let g = AbelianGroup::parse(spec).unwrap();
        let prims = primitive_idempotents(&g, &f).unwrap();
        (g, f, prims)
    }

    #[test]
    fn the_c3xc3_code() {
        let (g, f, prims) = prims_for("C3xC3", 2);
        let prim = prims
            .iter()
            .find(|p| p.class.rep.exponents() == [0, 1])
            .unwrap();
        let code = code_from_class(prim).unwrap();
        assert_eq!(code.dimension(), 2);
        assert_eq!(code.codewords(), Some(4));

        // codewords are exactly {0, e, ey, ey^2}
        let e = &prim.element;
        let words: Vec<AlgebraElem> = (0..3u64)
            .map(|i| e.mul_elem(&g.elem(&[0, i]).unwrap()))
            .collect();
        for w in &words {
            let dense = w.to_dense();
            let m = code
                .basis()
                .clone()
                .stack(&Matrix::from_rows(vec![dense]).unwrap())
                .unwrap();
            assert_eq!(m.rank(&f), code.dimension(), "codeword outside the code");
        }

        // inner products <e*y^i, e*y^j> = 1 for i != j
        for i in 0..3u64 {
            for j in 0..3u64 {
                if i != j {
                    let a = e.mul_elem(&g.elem(&[0, i]).unwrap());
                    let b = e.mul_elem(&g.elem(&[0, j]).unwrap());
                    assert_eq!(inner_product(&a, &b).unwrap(), f.one());
                }
            }
        }

        let cls = classify_code(prim).unwrap();
        assert_eq!(cls.kind, CodeKind::Lcd);
        assert_eq!(cls.witness_t, Some(1)); // 2 = -1 (mod 3)
        assert_eq!(cls.dimension, 2);
    }

    #[test]
    fn the_c7xc7_code() {
        let (g, f, prims) = prims_for("C7xC7", 2);
        let prim = prims
            .iter()
            .find(|p| p.class.rep.exponents() == [0, 1])
            .unwrap();
        let code = code_from_class(prim).unwrap();
        assert_eq!(code.dimension(), 3);
        assert_eq!(code.codewords(), Some(8));

        let e = &prim.element;
        for i in 0..7u64 {
            for j in 0..7u64 {
                if i != j {
                    let a = e.mul_elem(&g.elem(&[0, i]).unwrap());
                    let b = e.mul_elem(&g.elem(&[0, j]).unwrap());
                    assert!(f.is_zero(&inner_product(&a, &b).unwrap()));
                }
            }
        }

        let cls = classify_code(prim).unwrap();
        assert_eq!(cls.kind, CodeKind::SelfOrthogonal);
        assert_eq!(cls.witness_t, None);
        assert!(cls.self_orthogonal_by_gram);
    }

    #[test]
    fn trivial_class_gives_the_repetition_style_code() {
        let (g, f, prims) = prims_for("C5", 2);
        let prim = prims.iter().find(|p| p.class.rep.is_trivial()).unwrap();
        let code = code_from_class(prim).unwrap();
        assert_eq!(code.dimension(), 1);
        // spanned by the all-ones vector
        assert!(code.basis().row(0).iter().all(|c| *c == f.one()));
        let cls = classify_code(prim).unwrap();
        assert_eq!(cls.kind, CodeKind::Lcd);
        let _ = g;
    }

    #[test]
    fn dual_laws() {
        let (g, f, prims) = prims_for("C3xC3", 2);
        for prim in &prims {
            let code = code_from_class(prim).unwrap();
            let dual = dual_code(&code);
            assert_eq!(
                code.dimension() + dual.dimension(),
                g.order() as usize,
                "rank-nullity"
            );
            let double = dual_code(&dual);
            assert!(double.basis().same_row_space(code.basis(), &f));
            // dual vectors annihilate the code
            let prod = code.basis().mul_transpose(dual.basis(), &f).unwrap();
            assert!(prod.is_zero(&f));
        }

        // dual of the whole algebra is zero
        let whole = {
            let n = g.order() as usize;
            let mut m = Matrix::zeros(&f, n, n);
            for i in 0..n {
                m.set(i, i, f.one());
            }
            AbelianCode {
                group: g.clone(),
                ctx: Arc::clone(&f),
                basis: m,
                dimension: n,
            }
        };
        assert_eq!(dual_code(&whole).dimension(), 0);
    }

    #[test]
    fn dual_structure_identity_on_small_groups() {
        for (spec, q) in [("C3xC3", 2u64), ("C7", 2), ("C5", 3), ("C9", 2), ("C4xC4", 3)] {
            let (_, _, prims) = prims_for(spec, q);
            for idx in 0..prims.len() {
                assert!(
                    dual_structure_check(&prims, idx).unwrap(),
                    "{spec} over GF({q}), class {:?}",
                    prims[idx].class.rep.exponents()
                );
            }
        }
    }

    #[test]
    fn ideal_closure_of_class_codes() {
        let (g, f, prims) = prims_for("C3xC9", 2);
        for prim in &prims {
            let code = code_from_class(prim).unwrap();
            for row in code.basis_elements() {
                for gen in 0..g.rank() {
                    let mut exps = vec![0u64; g.rank()];
                    exps[gen] = 1;
                    let shifted = row.mul_elem(&g.elem(&exps).unwrap());
                    let stacked = code
                        .basis()
                        .clone()
                        .stack(&Matrix::from_rows(vec![shifted.to_dense()]).unwrap())
                        .unwrap();
                    assert_eq!(stacked.rank(&f), code.dimension());
                }
            }
        }
    }

    #[test]
    fn inner_product_basics() {
        let g = AbelianGroup::parse("C3").unwrap();
        let f = FieldCtx::build(2, 1, 1).unwrap();
        let a = parse_element("1 + x1", &g, &f).unwrap();
        let zero = AlgebraElem::zero(&g, &f);
        assert!(f.is_zero(&inner_product(&a, &zero).unwrap()));
        let b = parse_element("x1 + x1^2", &g, &f).unwrap();
        assert_eq!(inner_product(&a, &b).unwrap(), f.one());
    }

    #[test]
    fn minimum_distances() {
        let (_, _, prims) = prims_for("C3xC3", 2);
        let prim = prims
            .iter()
            .find(|p| p.class.rep.exponents() == [0, 1])
            .unwrap();
        let code = code_from_class(prim).unwrap();
        // codewords: 0, e (weight 6), ey, ey^2 (same weight)
        assert_eq!(min_distance(&code, 1 << 16), Some(6));
        assert_eq!(min_distance(&code, 2), None); // refused by the bound
    }

    #[test]
    fn theorem43_outcomes() {
        let f2 = FieldCtx::build(2, 1, 1).unwrap();
        let yes = theorem43_report(&f2, &AbelianGroup::parse("C3xC9").unwrap()).unwrap();
        assert!(yes.all_lcd && yes.none_self_orthogonal);
        assert!(yes.exists_full_order_lcd && yes.exists_full_order_not_self_orthogonal);
        assert!(yes.star_clean);
        assert!(!yes.degenerate);

        let no = theorem43_report(&f2, &AbelianGroup::parse("C3xC15").unwrap()).unwrap();
        assert!(!no.all_lcd && !no.none_self_orthogonal);
        assert!(!no.exists_full_order_lcd && !no.exists_full_order_not_self_orthogonal);
        assert!(!no.star_clean);

        let degenerate = theorem43_report(&f2, &AbelianGroup::trivial()).unwrap();
        assert!(degenerate.star_clean);
        assert!(degenerate.degenerate);

        assert!(matches!(
            theorem43_report(&f2, &AbelianGroup::parse("C6").unwrap()),
            Err(Error::NotSemisimple { .. })
        ));
    }
}
