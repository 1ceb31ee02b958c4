//! The idempotent engine: character idempotents e_psi, q-cyclotomic classes,
//! primitive idempotents of F_q H, full idempotent enumeration, and the
//! squaring-orbit form of idempotents over GF(2).
//!
//! All character arithmetic runs in one splitting field GF(q)(omega_m) with
//! m = exponent(H); the orbit sum over a q-cyclotomic class collects exactly
//! the Galois conjugates of e_psi, so it equals the relative trace without
//! per-character subfield constructions.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{is_idempotent, AlgebraElem};
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, SubfieldMap};
use crate::group::{characters, AbelianGroup, Character, GroupElem, SylowSplit};
use crate::numtheory::{gcd, mul_order};

/// Default cap on subset-sum enumeration.
pub const DEFAULT_SUBSET_BOUND: u64 = 1 << 20;

/// Order of q modulo m, extended by ord(1) = 1 for the trivial exponent.
pub fn ord_mod(q: u64, m: u64) -> Result<u64> {
    if m == 1 {
        Ok(1)
    } else {
        mul_order(q, m)
    }
}

/// The splitting field GF(q)(omega_m) of a base field for exponent m:
/// relative degree d = ord_m(q) over the base.
pub fn splitting_field(base: &Arc<FieldCtx>, m: u64) -> Result<Arc<FieldCtx>> {
    let q = base.size_u64().ok_or(Error::SizeBound {
        what: "coefficient field",
        value: base.size_big().try_into().unwrap_or(u128::MAX),
        bound: crate::gf::MAX_BASE_SIZE as u128,
    })?;
    let d = ord_mod(q, m)? as u32;
    if d == 1 {
        Ok(Arc::clone(base))
    } else {
        FieldCtx::build(base.p(), base.degree(), d)
    }
}

/// The orbit of a character under psi -> psi^q, with the lexicographically
/// least exponent vector as representative.
#[derive(Clone, Debug)]
pub struct CyclotomicClass {
    pub rep: Character,
    pub orbit: Vec<Character>,
}

impl CyclotomicClass {
    pub fn size(&self) -> usize {
        self.orbit.len()
    }

    pub fn contains(&self, psi: &Character) -> bool {
        self.orbit.iter().any(|c| c == psi)
    }
}

fn classes_from_chars(chars: &[Character], q: u64) -> Vec<CyclotomicClass> {
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut classes = Vec::new();
    // chars are in lexicographic order, so the first unvisited member of an
    // orbit is its least exponent vector
    for psi in chars {
        if seen.contains(psi.exponents()) {
            continue;
        }
        let mut orbit = Vec::new();
        let mut cur = psi.clone();
        loop {
            seen.insert(cur.exponents().to_vec());
            orbit.push(cur.clone());
            cur = cur.pow(q as i64);
            if cur == *psi {
                break;
            }
        }
        classes.push(CyclotomicClass {
            rep: psi.clone(),
            orbit,
        });
    }
    classes
}

/// Partitions the character group of H into q-cyclotomic classes, valued in
/// the given field (which must contain omega_(exponent H)).
pub fn cyclotomic_classes(
    h: &AbelianGroup,
    q: u64,
    field: &Arc<FieldCtx>,
) -> Result<Vec<CyclotomicClass>> {
    if gcd(q, h.order()) != 1 {
        return Err(Error::NotSemisimple {
            q,
            order: h.order(),
        });
    }
    let chars = characters(h, field)?;
    let classes = classes_from_chars(&chars, q);
    debug_assert_eq!(
        classes.iter().map(CyclotomicClass::size).sum::<usize>() as u64,
        h.order()
    );
    Ok(classes)
}

/// The character idempotent e_psi = (1/|H|) sum over h of psi(h) h, as an
/// element of the splitting-field group algebra.
pub fn e_psi(psi: &Character) -> Result<AlgebraElem> {
    let env = psi.env();
    let field = &env.field;
    let h = &env.group;
    let inv_order = field
        .inv(&field.from_int(h.order() % field.p()))
        .map_err(|_| Error::NotSemisimple {
            q: field.p(),
            order: h.order(),
        })?;
    AlgebraElem::from_terms(
        h,
        field,
        h.elements()
            .map(|g| {
                let v = psi.value(&g)?;
                Ok((g, field.mul(&v, &inv_order)))
            })
            .collect::<Result<Vec<_>>>()?,
    )
}

/// A primitive idempotent of F_q H, carrying its cyclotomic class and the
/// element re-expressed over the base field.
#[derive(Clone, Debug)]
pub struct PrimitiveIdempotent {
    pub class: CyclotomicClass,
    pub element: AlgebraElem,
}

/// All primitive idempotents of F_q H, one per q-cyclotomic class, in
/// class-representative order.
///
/// Each is the orbit sum of the e_phi over its class, computed in the
/// splitting field GF(q)(omega_m); every coefficient is checked to be fixed
/// by x -> x^q and pulled back to the base field.
pub fn primitive_idempotents(
    h: &AbelianGroup,
    base: &Arc<FieldCtx>,
) -> Result<Vec<PrimitiveIdempotent>> {
    if h.order() % base.p() == 0 {
        return Err(Error::NotSemisimple {
            q: base.p(),
            order: h.order(),
        });
    }
    let q = base.size_u64().ok_or(Error::SizeBound {
        what: "coefficient field",
        value: base.size_big().try_into().unwrap_or(u128::MAX),
        bound: crate::gf::MAX_BASE_SIZE as u128,
    })?;
    let ext = splitting_field(base, h.exponent())?;
    let map = SubfieldMap::build(base, &ext)?;
    let chars = characters(h, &ext)?;
    let classes = classes_from_chars(&chars, q);
    let inv_order = ext
        .inv(&ext.from_int(h.order() % ext.p()))
        .expect("|H| invertible in a semisimple setting");

    let mut prims = Vec::with_capacity(classes.len());
    let mut total = AlgebraElem::zero(h, base);
    for class in classes {
        let mut terms = Vec::new();
        for g in h.elements() {
            let mut sum = ext.zero();
            for phi in &class.orbit {
                sum = ext.add(&sum, &phi.value(&g)?);
            }
            let c = ext.mul(&sum, &inv_order);
            if ext.is_zero(&c) {
                continue;
            }
            if ext.frobenius_base(&c) != c {
                return Err(Error::Internal(format!(
                    "orbit-sum coefficient at {} is not Frobenius-fixed",
                    h.render_elem(&g)
                )));
            }
            let pulled = map.pull_back(&c).ok_or_else(|| {
                Error::Internal("Frobenius-fixed coefficient outside base subfield".into())
            })?;
            terms.push((g, pulled));
        }
        let element = AlgebraElem::from_terms(h, base, terms)?;
        if !is_idempotent(&element) {
            return Err(Error::Internal(
                "orbit sum failed the idempotency re-check".into(),
            ));
        }
        total = total.add(&element)?;
        prims.push(PrimitiveIdempotent { class, element });
    }
    if total != AlgebraElem::one(h, base) {
        return Err(Error::Internal(
            "primitive idempotents do not sum to 1".into(),
        ));
    }
    Ok(prims)
}

/// Iterator over all 2^s subset sums of the primitive idempotents: exactly
/// the idempotent set of F_q H. Refuses when 2^s exceeds the bound.
pub fn all_idempotents(
    prims: &[PrimitiveIdempotent],
    group: &AbelianGroup,
    ctx: &Arc<FieldCtx>,
    max_subsets: u64,
) -> Result<impl Iterator<Item = AlgebraElem>> {
    let s = prims.len();
    if s >= 63 || (1u64 << s) > max_subsets {
        return Err(Error::EnumerationBound {
            subsets: s,
            bound: max_subsets,
        });
    }
    let elements: Vec<AlgebraElem> = prims.iter().map(|p| p.element.clone()).collect();
    let zero = AlgebraElem::zero(group, ctx);
    Ok((0u64..1 << s).map(move |mask| {
        let mut acc = zero.clone();
        for (i, e) in elements.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = acc.add(e).expect("primitive idempotents share a context");
            }
        }
        acc
    }))
}

/// Whether every support element of an idempotent lies in the embedded
/// coprime part of the split.
pub fn idempotent_support_check(e: &AlgebraElem, split: &SylowSplit) -> Result<bool> {
    if e.group() != split.group() {
        return Err(Error::GroupMismatch);
    }
    if !is_idempotent(e) {
        return Err(Error::NotIdempotent);
    }
    Ok(e.support().all(|g| split.is_in_coprime(g)))
}

/// Decomposes the support of an idempotent of F_2 G (G of odd order) into
/// squaring orbits {g, g^2, g^4, ...}; returns the least member and length
/// of each orbit. A support that is not closed under squaring certifies that
/// the element was not an idempotent.
pub fn f2_orbit_form(e: &AlgebraElem) -> Result<Vec<(GroupElem, u64)>> {
    let ctx = e.ctx();
    if ctx.p() != 2 || ctx.degree() != 1 {
        return Err(Error::CtxMismatch);
    }
    let group = e.group();
    if group.order() % 2 == 0 {
        return Err(Error::EvenOrder(group.order()));
    }
    let support: BTreeSet<GroupElem> = e.support().cloned().collect();
    let mut visited: BTreeSet<GroupElem> = BTreeSet::new();
    let mut orbits = Vec::new();
    for g in &support {
        if visited.contains(g) {
            continue;
        }
        let mut len = 0u64;
        let mut cur = g.clone();
        loop {
            if !support.contains(&cur) {
                return Err(Error::NotClosedUnderSquaring);
            }
            visited.insert(cur.clone());
            len += 1;
            cur = group.mul(&cur, &cur);
            if cur == *g {
                break;
            }
        }
        orbits.push((g.clone(), len));
    }
    Ok(orbits)
}

/// JSON form of a primitive idempotent.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct PrimitiveIdempotentReport {
    pub class_rep: Vec<u64>,
    pub orbit_size: usize,
    pub coefficients: BTreeMap<String, String>,
}

impl PrimitiveIdempotent {
    pub fn report(&self) -> PrimitiveIdempotentReport {
        let group = self.element.group();
        let ctx = self.element.ctx();
        PrimitiveIdempotentReport {
            class_rep: self.class.rep.exponents().to_vec(),
            orbit_size: self.class.size(),
            coefficients: self
                .element
                .terms()
                .map(|(g, c)| (group.render_elem(g), ctx.render_coeff(c)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_element;

    #[test]
    fn e_psi_on_c3_over_gf4() {
        let f4 = FieldCtx::build(2, 2, 1).unwrap();
        let c3 = AbelianGroup::parse("C3").unwrap();
        let chars = characters(&c3, &f4).unwrap();

        // trivial psi: (1/|H|) sum of all h; 1/3 = 1 in GF(4)
        let e0 = e_psi(&chars[0]).unwrap();
        assert_eq!(e0, parse_element("1 + x1 + x1^2", &c3, &f4).unwrap());

        // psi(y) = w gives 1 + w*y + w^2*y^2
        let e1 = e_psi(&chars[1]).unwrap();
        assert_eq!(e1, parse_element("1 + w*x1 + w^2*x1^2", &c3, &f4).unwrap());
        assert!(is_idempotent(&e1));

        // the conjugate character carries the conjugate coefficients
        let e2 = e_psi(&chars[2]).unwrap();
        assert_eq!(e2, parse_element("1 + w^2*x1 + w*x1^2", &c3, &f4).unwrap());

        // properties (1)-(3) on all of the character group
        for (i, a) in chars.iter().enumerate() {
            let ea = e_psi(a).unwrap();
            assert!(is_idempotent(&ea));
            for (j, b) in chars.iter().enumerate() {
                if i != j {
                    let prod = ea.mul(&e_psi(b).unwrap()).unwrap();
                    assert!(prod.is_zero());
                }
            }
        }
        let sum = chars
            .iter()
            .map(|c| e_psi(c).unwrap())
            .fold(AlgebraElem::zero(&c3, &f4), |acc, e| acc.add(&e).unwrap());
        assert_eq!(sum, AlgebraElem::one(&c3, &f4));
    }

    #[test]
    fn cyclotomic_class_shapes() {
        // C7 under q=2: orbit sizes {1, 3, 3}
        let f8 = FieldCtx::build(2, 1, 3).unwrap();
        let c7 = AbelianGroup::parse("C7").unwrap();
        let classes = cyclotomic_classes(&c7, 2, &f8).unwrap();
        let mut sizes: Vec<usize> = classes.iter().map(CyclotomicClass::size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 3]);

        // trivial group: one class
        let f2 = FieldCtx::build(2, 1, 1).unwrap();
        let classes = cyclotomic_classes(&AbelianGroup::trivial(), 2, &f2).unwrap();
        assert_eq!(classes.len(), 1);

        // C3xC3 under q=2: one trivial class and four of size 2
        let f4 = FieldCtx::build(2, 1, 2).unwrap();
        let c33 = AbelianGroup::parse("C3xC3").unwrap();
        let classes = cyclotomic_classes(&c33, 2, &f4).unwrap();
        assert_eq!(classes.len(), 5);
        let mut sizes: Vec<usize> = classes.iter().map(CyclotomicClass::size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 2, 2, 2]);

        // representatives are the least exponent vectors of their orbits
        for class in &classes {
            for member in &class.orbit {
                assert!(class.rep.exponents() <= member.exponents());
            }
        }

        assert!(cyclotomic_classes(&c33, 3, &f4).is_err());
    }

    #[test]
    fn primitive_idempotents_of_f2_c3xc3() {
        let f2 = FieldCtx::build(2, 1, 1).unwrap();
        let c33 = AbelianGroup::parse("C3xC3").unwrap();
        let prims = primitive_idempotents(&c33, &f2).unwrap();
        assert_eq!(prims.len(), 5);

        // the class of psi(x)=1, psi(y)=omega yields (1+x+x^2)(y+y^2)
        let target = parse_element(
            "x2 + x2^2 + x1*x2 + x1*x2^2 + x1^2*x2 + x1^2*x2^2",
            &c33,
            &f2,
        )
        .unwrap();
        let prim = prims
            .iter()
            .find(|p| p.class.rep.exponents() == [0, 1])
            .expect("class (0,1) exists");
        assert_eq!(prim.element, target);
        assert_eq!(prim.class.size(), 2);

        // pairwise orthogonal, sum to 1
        for (i, a) in prims.iter().enumerate() {
            for (j, b) in prims.iter().enumerate() {
                if i != j {
                    assert!(a.element.mul(&b.element).unwrap().is_zero());
                }
            }
        }
        let sum = prims
            .iter()
            .fold(AlgebraElem::zero(&c33, &f2), |acc, p| {
                acc.add(&p.element).unwrap()
            });
        assert_eq!(sum, AlgebraElem::one(&c33, &f2));
    }

    #[test]
    fn primitive_idempotents_of_f2_c7xc7_match_the_worked_generator() {
        let f2 = FieldCtx::build(2, 1, 1).unwrap();
        let g = AbelianGroup::parse("C7xC7").unwrap();
        let prims = primitive_idempotents(&g, &f2).unwrap();
        // class of psi(x)=1, psi(y)=omega_7: (sum_i x^i)(1 + y^3 + y^5 + y^6)
        let prim = prims
            .iter()
            .find(|p| p.class.rep.exponents() == [0, 1])
            .unwrap();
        assert_eq!(prim.class.size(), 3);
        let mut terms = String::new();
        for a in 0..7 {
            for b in [0u64, 3, 5, 6] {
                if !terms.is_empty() {
                    terms.push('+');
                }
                terms.push_str(&format!("x1^{a}*x2^{b}"));
            }
        }
        let target = parse_element(&terms, &g, &f2).unwrap();
        assert_eq!(prim.element, target);
    }

    #[test]
    fn trivial_group_has_the_single_idempotent_one() {
        let f2 = FieldCtx::build(2, 1, 1).unwrap();
        let t = AbelianGroup::trivial();
        let prims = primitive_idempotents(&t, &f2).unwrap();
        assert_eq!(prims.len(), 1);
        assert_eq!(prims[0].element, AlgebraElem::one(&t, &f2));
        let all: Vec<AlgebraElem> =
            all_idempotents(&prims, &t, &f2, DEFAULT_SUBSET_BOUND)
                .unwrap()
                .collect();
        assert_eq!(all.len(), 2); // {0, 1}
    }

    #[test]
    fn all_idempotents_matches_brute_force_on_f2_c7() {
        let f2 = FieldCtx::build(2, 1, 1).unwrap();
        let c7 = AbelianGroup::parse("C7").unwrap();
        let prims = primitive_idempotents(&c7, &f2).unwrap();
        let from_subsets: BTreeSet<Vec<u64>> =
            all_idempotents(&prims, &c7, &f2, DEFAULT_SUBSET_BOUND)
                .unwrap()
                .map(|e| {
                    e.to_dense()
                        .iter()
                        .map(|c| c.coeffs()[0])
                        .collect::<Vec<u64>>()
                })
                .collect();
        assert_eq!(from_subsets.len(), 8);

        // independent oracle: scan all 128 elements for a^2 = a
        let mut brute = BTreeSet::new();
        for mask in 0u32..128 {
            let a = AlgebraElem::from_terms(
                &c7,
                &f2,
                (0..7u64)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| (c7.elem_at(i), f2.one())),
            )
            .unwrap();
            if is_idempotent(&a) {
                brute.insert(
                    a.to_dense()
                        .iter()
                        .map(|c| c.coeffs()[0])
                        .collect::<Vec<u64>>(),
                );
            }
        }
        assert_eq!(from_subsets, brute);
    }

    #[test]
    fn all_idempotents_respects_the_bound() {
        let f2 = FieldCtx::build(2, 1, 1).unwrap();
        let c7 = AbelianGroup::parse("C7").unwrap();
        let prims = primitive_idempotents(&c7, &f2).unwrap();
        assert!(matches!(
            all_idempotents(&prims, &c7, &f2, 4),
            Err(Error::EnumerationBound { .. })
        ));
    }

    #[test]
    fn support_check_on_f2_c2xc3() {
        let f2 = FieldCtx::build(2, 1, 1).unwrap();
        let g = AbelianGroup::parse("C2xC3").unwrap(); // = C6
        let split = SylowSplit::new(&g, 2).unwrap();
        let one = AlgebraElem::one(&g, &f2);
        assert!(idempotent_support_check(&one, &split).unwrap());

        // brute-force every idempotent of the 64-element algebra
        let mut count = 0;
        for mask in 0u32..64 {
            let a = AlgebraElem::from_terms(
                &g,
                &f2,
                (0..6u64)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| (g.elem_at(i), f2.one())),
            )
            .unwrap();
            if is_idempotent(&a) {
                assert!(idempotent_support_check(&a, &split).unwrap());
                count += 1;
            }
        }
        assert_eq!(count, 4); // idempotents of F_2 C_3, shifted into C_6

        let x = parse_element("x1", &g, &f2).unwrap();
        assert!(matches!(
            idempotent_support_check(&x, &split),
            Err(Error::NotIdempotent)
        ));
    }

    #[test]
    fn f2_orbit_forms() {
        let f2 = FieldCtx::build(2, 1, 1).unwrap();
        let c7 = AbelianGroup::parse("C7").unwrap();
        let one = AlgebraElem::one(&c7, &f2);
        assert_eq!(
            f2_orbit_form(&one).unwrap(),
            vec![(c7.identity(), 1)]
        );

        let a = parse_element("x1 + x1^2 + x1^4", &c7, &f2).unwrap();
        assert_eq!(
            f2_orbit_form(&a).unwrap(),
            vec![(c7.elem(&[1]).unwrap(), 3)]
        );

        let c3 = AbelianGroup::parse("C3").unwrap();
        let b = parse_element("x1 + x1^2", &c3, &f2).unwrap();
        assert_eq!(
            f2_orbit_form(&b).unwrap(),
            vec![(c3.elem(&[1]).unwrap(), 2)]
        );

        // support not closed under squaring is rejected
        let bad = parse_element("x1", &c7, &f2).unwrap();
        assert!(matches!(
            f2_orbit_form(&bad),
            Err(Error::NotClosedUnderSquaring)
        ));

        // even order and non-GF(2) contexts are rejected
        let c6 = AbelianGroup::parse("C6").unwrap();
        let even = AlgebraElem::one(&c6, &f2);
        assert!(matches!(f2_orbit_form(&even), Err(Error::EvenOrder(6))));
        let f4 = FieldCtx::build(2, 2, 1).unwrap();
        let wrong_field = AlgebraElem::one(&c7, &f4);
        assert!(matches!(
            f2_orbit_form(&wrong_field),
            Err(Error::CtxMismatch)
        ));
    }

    #[test]
    fn orbit_sizes_sum_to_group_order_across_fields() {
        // Wedderburn dimension bookkeeping over several (q, H) pairs
        for (p, k, spec) in [
            (2u64, 1u32, "C9"),
            (2, 1, "C3xC9"),
            (2, 2, "C5"),
            (3, 1, "C8"),
            (5, 1, "C6"),
            (3, 2, "C10"),
        ] {
            let base = FieldCtx::build(p, k, 1).unwrap();
            let h = AbelianGroup::parse(spec).unwrap();
            let prims = primitive_idempotents(&h, &base).unwrap();
            let total: usize = prims.iter().map(|pr| pr.class.size()).sum();
            assert_eq!(total as u64, h.order(), "q={} H={spec}", base.base_size());
        }
    }

    #[test]
    fn report_shape() {
        let f2 = FieldCtx::build(2, 1, 1).unwrap();
        let c7 = AbelianGroup::parse("C7").unwrap();
        let prims = primitive_idempotents(&c7, &f2).unwrap();
        let rep = prims[1].report();
        assert_eq!(rep.class_rep, vec![1]);
        assert_eq!(rep.orbit_size, 3);
        // the class {1,2,4} idempotent is 1 + x^3 + x^5 + x^6
        assert_eq!(rep.coefficients.get("1"), Some(&"1".to_string()));
        assert_eq!(rep.coefficients.get("x1^3"), Some(&"1".to_string()));
        assert_eq!(rep.coefficients.get("x1"), None);
        assert_eq!(rep.coefficients.len(), 4);
    }
}
