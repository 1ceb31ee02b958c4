//! The group algebra F·G: sparse ring arithmetic, the involution families,
//! and element predicates via the regular representation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem};
use crate::group::{AbelianGroup, GroupElem, SylowSplit};
use crate::linalg::Matrix;
use crate::numtheory::normalize_mod;

/// An element of F·G as a sparse coefficient map; stored coefficients are
/// nonzero, so derived equality is algebra equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraElem {
    group: AbelianGroup,
    ctx: Arc<FieldCtx>,
    coeffs: BTreeMap<GroupElem, FieldElem>,
}

impl AlgebraElem {
    pub fn zero(group: &AbelianGroup, ctx: &Arc<FieldCtx>) -> AlgebraElem {
        AlgebraElem {
            group: group.clone(),
            ctx: Arc::clone(ctx),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(group: &AbelianGroup, ctx: &Arc<FieldCtx>) -> AlgebraElem {
        Self::monomial(group, ctx, group.identity(), ctx.one())
    }

    pub fn scalar(group: &AbelianGroup, ctx: &Arc<FieldCtx>, c: FieldElem) -> AlgebraElem {
        Self::monomial(group, ctx, group.identity(), c)
    }

    pub fn monomial(
        group: &AbelianGroup,
        ctx: &Arc<FieldCtx>,
        g: GroupElem,
        c: FieldElem,
    ) -> AlgebraElem {
        let mut coeffs = BTreeMap::new();
        if !ctx.is_zero(&c) {
            coeffs.insert(g, c);
        }
        AlgebraElem {
            group: group.clone(),
            ctx: Arc::clone(ctx),
            coeffs,
        }
    }

    pub fn from_terms(
        group: &AbelianGroup,
        ctx: &Arc<FieldCtx>,
        terms: impl IntoIterator<Item = (GroupElem, FieldElem)>,
    ) -> Result<AlgebraElem> {
        let mut out = Self::zero(group, ctx);
        for (g, c) in terms {
            if !group.contains(&g) {
                return Err(Error::GroupMismatch);
            }
            ctx.check(&c)?;
            out.add_term(g, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, g: GroupElem, c: FieldElem) {
        if self.ctx.is_zero(&c) {
            return;
        }
        match self.coeffs.entry(g) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = self.ctx.add(e.get(), &c);
                if self.ctx.is_zero(&sum) {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of g (zero when absent).
    pub fn coeff(&self, g: &GroupElem) -> FieldElem {
        self.coeffs
            .get(g)
            .cloned()
            .unwrap_or_else(|| self.ctx.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElem, &FieldElem)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElem> {
        self.coeffs.keys()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    fn compatible(&self, other: &AlgebraElem) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        if self.ctx != other.ctx {
            return Err(Error::CtxMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &AlgebraElem) -> Result<AlgebraElem> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (g, c) in &other.coeffs {
            out.add_term(g.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> AlgebraElem {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = self.ctx.neg(c);
        }
        out
    }

    pub fn sub(&self, other: &AlgebraElem) -> Result<AlgebraElem> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElem) -> AlgebraElem {
        let mut out = AlgebraElem::zero(&self.group, &self.ctx);
        if self.ctx.is_zero(c) {
            return out;
        }
        for (g, a) in &self.coeffs {
            out.add_term(g.clone(), self.ctx.mul(a, c));
        }
        out
    }

    /// Convolution product: the coefficient of g in a*b is
    /// sum over h of a_h * b_(h^-1 g).
    pub fn mul(&self, other: &AlgebraElem) -> Result<AlgebraElem> {
        self.compatible(other)?;
        let mut out = AlgebraElem::zero(&self.group, &self.ctx);
        for (g, a) in &self.coeffs {
            for (h, b) in &other.coeffs {
                out.add_term(self.group.mul(g, h), self.ctx.mul(a, b));
            }
        }
        Ok(out)
    }

    /// Multiplication by a single group element: a support permutation.
    pub fn mul_elem(&self, g: &GroupElem) -> AlgebraElem {
        let mut coeffs = BTreeMap::new();
        for (h, c) in &self.coeffs {
            coeffs.insert(self.group.mul(h, g), c.clone());
        }
        AlgebraElem {
            group: self.group.clone(),
            ctx: Arc::clone(&self.ctx),
            coeffs,
        }
    }

    /// Dense coefficient vector in canonical element order.
    pub fn to_dense(&self) -> Vec<FieldElem> {
        let mut v = vec![self.ctx.zero(); self.group.order() as usize];
        for (g, c) in &self.coeffs {
            v[self.group.index_of(g)] = c.clone();
        }
        v
    }
}

impl fmt::Display for AlgebraElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (g, c) in &self.coeffs {
            let gs = self.group.render_elem(g);
            let cs = self.ctx.render_coeff(c);
            let term = if gs == "1" {
                cs
            } else if cs == "1" {
                gs
            } else {
                format!("{cs}*{gs}")
            };
            parts.push(term);
        }
        write!(f, "{}", parts.join(" + "))
    }
}

// ---------------------------------------------------------------------------
// Involutions.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InvolutionKind {
    /// g -> g^-1 (the identity map on groups of exponent <= 2).
    Classical,
    /// g -> g^v with v^2 = 1 (mod n), v != 1 (mod n).
    Sigma1,
    /// coefficient -> coefficient^q and g -> g^v on F_(q^2) G.
    Sigma2,
}

impl InvolutionKind {
    pub fn name(&self) -> &'static str {
        match self {
            InvolutionKind::Classical => "classical",
            InvolutionKind::Sigma1 => "sigma1",
            InvolutionKind::Sigma2 => "sigma2",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Involution {
    pub kind: InvolutionKind,
    pub v: i64,
}

impl Involution {
    pub fn classical() -> Involution {
        Involution {
            kind: InvolutionKind::Classical,
            v: -1,
        }
    }

    pub fn sigma1(v: i64) -> Involution {
        Involution {
            kind: InvolutionKind::Sigma1,
            v,
        }
    }

    pub fn sigma2(v: i64) -> Involution {
        Involution {
            kind: InvolutionKind::Sigma2,
            v,
        }
    }

    /// Correctness constraints: the map must be a self-inverse ring map on
    /// F·G. `v^2 = 1 (mod exponent)` for the group action, and sigma2 needs a
    /// square field (even degree over the prime field) for the coefficient
    /// automorphism.
    pub fn validate_on(&self, group: &AbelianGroup, ctx: &FieldCtx) -> Result<()> {
        let n = group.exponent();
        let v = normalize_mod(self.v, n);
        if (v as u128 * v as u128) % n as u128 != 1 % n as u128 {
            return Err(Error::BadInvolution(format!(
                "v = {} does not satisfy v^2 = 1 (mod {n})",
                self.v
            )));
        }
        if self.kind == InvolutionKind::Sigma2 && ctx.degree() % 2 != 0 {
            return Err(Error::BadInvolution(format!(
                "sigma2 requires a square coefficient field, got degree {} over GF({})",
                ctx.degree(),
                ctx.p()
            )));
        }
        Ok(())
    }

    /// The classification constraint on top of correctness: sigma1 excludes
    /// the identity map (v = 1 mod n) from *-cleanness analysis.
    pub fn validate_for_analysis(&self, group: &AbelianGroup, ctx: &FieldCtx) -> Result<()> {
        self.validate_on(group, ctx)?;
        if self.kind == InvolutionKind::Sigma1 {
            let n = group.exponent();
            if normalize_mod(self.v, n) == 1 % n {
                return Err(Error::BadInvolution(format!(
                    "sigma1 requires v != 1 (mod {n}); the identity map is not accepted for \
                     *-cleanness analysis",
                )));
            }
        }
        Ok(())
    }

    /// Whether the map degenerates to the identity: the classical involution
    /// on a group of exponent <= 2.
    pub fn is_degenerate_identity(&self, group: &AbelianGroup) -> bool {
        self.kind == InvolutionKind::Classical && group.exponent() <= 2
    }

    /// Exponent of the coefficient automorphism as a power of p: sigma2 maps
    /// coefficients through x -> x^(p^(e/2)); the others fix coefficients.
    fn coeff_frobenius(&self, ctx: &FieldCtx) -> u32 {
        match self.kind {
            InvolutionKind::Sigma2 => ctx.degree() / 2,
            _ => 0,
        }
    }
}

/// Applies an involution. Validates the correctness constraints only; the
/// v != 1 classification rule is enforced by the analysis entry points.
pub fn involute(a: &AlgebraElem, iota: &Involution) -> Result<AlgebraElem> {
    iota.validate_on(&a.group, &a.ctx)?;
    let j = iota.coeff_frobenius(&a.ctx);
    let mut out = AlgebraElem::zero(&a.group, &a.ctx);
    for (g, c) in &a.coeffs {
        let c = if j == 0 {
            c.clone()
        } else {
            a.ctx.frobenius_pow(c, j)
        };
        out.add_term(a.group.pow(g, iota.v), c);
    }
    Ok(out)
}

/// a * a = a.
pub fn is_idempotent(a: &AlgebraElem) -> bool {
    a.mul(a).map(|sq| sq == *a).unwrap_or(false)
}

/// An involution-fixed idempotent.
pub fn is_projection(a: &AlgebraElem, iota: &Involution) -> Result<bool> {
    Ok(is_idempotent(a) && involute(a, iota)? == *a)
}

/// Invertibility via the regular representation: the |G| x |G| matrix of
/// multiplication by `a` has full rank iff `a` is a unit.
pub fn is_unit(a: &AlgebraElem) -> bool {
    let n = a.group.order() as usize;
    let mut m = Matrix::zeros(&a.ctx, n, n);
    let elems: Vec<GroupElem> = a.group.elements().collect();
    for (j, gj) in elems.iter().enumerate() {
        // column j holds the coefficients of a * g_j
        let prod = a.mul_elem(gj);
        for (g, c) in &prod.coeffs {
            m.set(a.group.index_of(g), j, c.clone());
        }
    }
    m.rref(&a.ctx) == n
}

/// Writes `a = u + e` with `u` a unit and `e` an idempotent, trying the
/// subset sums of the primitive idempotents in a fixed order until the
/// complement is invertible. The group algebra is clean, so some idempotent
/// always works; failure is an internal-consistency error.
pub fn clean_decomposition(
    a: &AlgebraElem,
    max_subsets: u64,
) -> Result<(AlgebraElem, AlgebraElem)> {
    let split = SylowSplit::new(&a.group, a.ctx.p())?;
    let prims = crate::idem::primitive_idempotents(&split.coprime, &a.ctx)?;
    // embed the primitives of F·H into F·G
    let embedded: Vec<AlgebraElem> = prims
        .iter()
        .map(|pi| {
            AlgebraElem::from_terms(
                &a.group,
                &a.ctx,
                pi.element
                    .terms()
                    .map(|(h, c)| (split.embed_coprime(h), c.clone())),
            )
        })
        .collect::<Result<_>>()?;
    let s = embedded.len();
    if s >= 63 || (1u64 << s) > max_subsets {
        return Err(Error::EnumerationBound {
            subsets: s,
            bound: max_subsets,
        });
    }
    for mask in 0u64..1 << s {
        let mut e = AlgebraElem::zero(&a.group, &a.ctx);
        for (i, prim) in embedded.iter().enumerate() {
            if mask >> i & 1 == 1 {
                e = e.add(prim)?;
            }
        }
        let u = a.sub(&e)?;
        if is_unit(&u) {
            debug_assert!(is_idempotent(&e));
            return Ok((u, e));
        }
    }
    Err(Error::Internal(
        "no clean decomposition found; the algebra should be clean".into(),
    ))
}

// ---------------------------------------------------------------------------
// Element literals.
// ---------------------------------------------------------------------------

/// Parses element literals like `1 + x1*x2^2` or `w^2*x2 + w*x2^2`, with
/// coefficients in the base field rendered per the field context.
pub fn parse_element(s: &str, group: &AbelianGroup, ctx: &Arc<FieldCtx>) -> Result<AlgebraElem> {
    let mut out = AlgebraElem::zero(group, ctx);
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Internal("empty element literal".into()));
    }
    // split into signed terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut chars = cleaned.chars().peekable();
    // leading sign
    if let Some(&c) = chars.peek() {
        if c == '-' {
            neg = true;
            chars.next();
        } else if c == '+' {
            chars.next();
        }
    }
    for c in chars {
        if (c == '+' || c == '-') && !cur.ends_with('^') {
            terms.push((neg, std::mem::take(&mut cur)));
            neg = c == '-';
        } else {
            cur.push(c);
        }
    }
    terms.push((neg, cur));

    for (negated, term) in terms {
        if term.is_empty() {
            return Err(Error::Internal(format!("bad element literal {s:?}")));
        }
        let mut coeff = ctx.one();
        let mut elem = group.identity();
        for factor in term.split('*') {
            if factor.starts_with(['x', 'X']) {
                let body = &factor[1..];
                let (idx_s, exp_s) = match body.split_once('^') {
                    Some((i, e)) => (i, Some(e)),
                    None => (body, None),
                };
                let idx: usize = idx_s
                    .parse()
                    .map_err(|_| Error::Internal(format!("bad generator {factor:?}")))?;
                if idx == 0 || idx > group.rank() {
                    return Err(Error::Internal(format!(
                        "generator x{idx} out of range for {group}"
                    )));
                }
                let exp: u64 = match exp_s {
                    Some(e) => e
                        .parse()
                        .map_err(|_| Error::Internal(format!("bad exponent in {factor:?}")))?,
                    None => 1,
                };
                let mut exps = vec![0u64; group.rank()];
                exps[idx - 1] = exp % group.invariant_factors()[idx - 1];
                elem = group.mul(&elem, &group.elem(&exps)?);
            } else {
                coeff = ctx.mul(&coeff, &ctx.parse_coeff(factor)?);
            }
        }
        if negated {
            coeff = ctx.neg(&coeff);
        }
        out.add_term(elem, coeff);
    }
    Ok(out)
}
