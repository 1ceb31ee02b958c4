//! Finite abelian groups in invariant-factor form: elements as exponent
//! vectors, Sylow decompositions, and the character group valued in a
//! splitting field.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem};
use crate::numtheory::{factorize, gcd, is_prime, lcm, normalize_mod};

/// Group orders are kept desk-scale; this also bounds exponent arithmetic.
pub const MAX_GROUP_ORDER: u64 = 1 << 20;

/// A finite abelian group `C_{m_1} x ... x C_{m_r}` with `1 < m_1 | ... | m_r`.
/// The empty factor list is the trivial group.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

/// An element as a vector of exponents `(a_1, ..., a_r)` with `a_i < m_i`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GroupElem {
    exps: Vec<u64>,
}

impl GroupElem {
    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            factors: Vec::new(),
        }
    }

    /// From an invariant-factor chain; rejects lists violating the chain.
    pub fn from_invariant_factors(factors: Vec<u64>) -> Result<Self> {
        for w in factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::BadGroupSpec(format!(
                    "invariant factors must form a divisibility chain, got {factors:?}"
                )));
            }
        }
        if factors.iter().any(|&m| m < 2) {
            return Err(Error::BadGroupSpec(format!(
                "invariant factors must exceed 1, got {factors:?}"
            )));
        }
        let g = AbelianGroup { factors };
        g.check_order()?;
        Ok(g)
    }

    /// From arbitrary cyclic factors, normalized to invariant-factor form by
    /// collecting Sylow parts per prime and reassembling by CRT. Factors of 1
    /// are identity factors and are dropped.
    pub fn from_cyclic_factors(cyclics: &[u64]) -> Result<Self> {
        if cyclics.iter().any(|&n| n == 0) {
            return Err(Error::BadGroupSpec("cyclic factor 0".into()));
        }
        // prime -> multiset of prime-power exponents, largest first
        let mut per_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &n in cyclics {
            for &(p, e) in factorize(n).factors() {
                per_prime.entry(p).or_default().push(e);
            }
        }
        for exps in per_prime.values_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
        }
        let depth = per_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = Vec::new();
        for i in (0..depth).rev() {
            let mut m = 1u64;
            for (&p, exps) in &per_prime {
                if let Some(&e) = exps.get(i) {
                    m = m
                        .checked_mul(p.pow(e))
                        .ok_or(Error::BadGroupSpec("group order overflow".into()))?;
                }
            }
            factors.push(m);
        }
        let g = AbelianGroup { factors };
        g.check_order()?;
        Ok(g)
    }

    /// Parses the spec grammar `C<n>(xC<n>)*`, case-insensitive.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if s.is_empty() {
            return Err(Error::BadGroupSpec(spec.into()));
        }
        let mut cyclics = Vec::new();
        for tok in s.split(['x', 'X']) {
            let tok = tok.trim();
            let digits = tok
                .strip_prefix(['c', 'C'])
                .ok_or_else(|| Error::BadGroupSpec(spec.into()))?;
            let n: u64 = digits
                .parse()
                .map_err(|_| Error::BadGroupSpec(spec.into()))?;
            if n == 0 {
                return Err(Error::BadGroupSpec(spec.into()));
            }
            cyclics.push(n);
        }
        Self::from_cyclic_factors(&cyclics)
    }

    fn check_order(&self) -> Result<()> {
        let mut order = 1u64;
        for &m in &self.factors {
            order = order
                .checked_mul(m)
                .filter(|&o| o <= MAX_GROUP_ORDER)
                .ok_or(Error::SizeBound {
                    what: "group order",
                    value: u128::MAX,
                    bound: MAX_GROUP_ORDER as u128,
                })?;
        }
        Ok(())
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem {
            exps: vec![0; self.factors.len()],
        }
    }

    /// Element from raw exponents, reduced componentwise.
    pub fn elem(&self, exps: &[u64]) -> Result<GroupElem> {
        if exps.len() != self.factors.len() {
            return Err(Error::GroupMismatch);
        }
        Ok(GroupElem {
            exps: exps
                .iter()
                .zip(&self.factors)
                .map(|(&a, &m)| a % m)
                .collect(),
        })
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        g.exps.len() == self.factors.len()
            && g.exps.iter().zip(&self.factors).all(|(&a, &m)| a < m)
    }

    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        GroupElem {
            exps: a
                .exps
                .iter()
                .zip(&b.exps)
                .zip(&self.factors)
                .map(|((&x, &y), &m)| (x + y) % m)
                .collect(),
        }
    }

    pub fn inv(&self, a: &GroupElem) -> GroupElem {
        GroupElem {
            exps: a
                .exps
                .iter()
                .zip(&self.factors)
                .map(|(&x, &m)| (m - x) % m)
                .collect(),
        }
    }

    /// g^n for a possibly negative exponent.
    pub fn pow(&self, a: &GroupElem, n: i64) -> GroupElem {
        GroupElem {
            exps: a
                .exps
                .iter()
                .zip(&self.factors)
                .map(|(&x, &m)| (x as u128 * normalize_mod(n, m) as u128 % m as u128) as u64)
                .collect(),
        }
    }

    pub fn elem_order(&self, a: &GroupElem) -> u64 {
        a.exps
            .iter()
            .zip(&self.factors)
            .map(|(&x, &m)| m / gcd(m, x))
            .fold(1, lcm)
    }

    /// All elements in lexicographic exponent order (last coordinate fastest).
    pub fn elements(&self) -> impl Iterator<Item = GroupElem> + '_ {
        let total = self.order();
        (0..total).map(|i| self.elem_at(i))
    }

    /// Canonical index of an element: mixed-radix with the last factor least
    /// significant, matching the iteration order of `elements`.
    pub fn index_of(&self, g: &GroupElem) -> usize {
        let mut idx = 0u64;
        for (&a, &m) in g.exps.iter().zip(&self.factors) {
            idx = idx * m + a;
        }
        idx as usize
    }

    pub fn elem_at(&self, mut idx: u64) -> GroupElem {
        let mut exps = vec![0u64; self.factors.len()];
        for (slot, &m) in exps.iter_mut().zip(&self.factors).rev() {
            *slot = idx % m;
            idx /= m;
        }
        GroupElem { exps }
    }

    /// Renders an element as `x1^a1*x2^a2` with unit exponents shortened and
    /// zero exponents dropped; the identity is `1`.
    pub fn render_elem(&self, g: &GroupElem) -> String {
        let mut parts = Vec::new();
        for (i, &a) in g.exps.iter().enumerate() {
            match a {
                0 => {}
                1 => parts.push(format!("x{}", i + 1)),
                _ => parts.push(format!("x{}^{}", i + 1, a)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "C1");
        }
        let parts: Vec<String> = self.factors.iter().map(|m| format!("C{m}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

// ---------------------------------------------------------------------------
// Sylow decomposition G = Syl_p(G) x H.
// ---------------------------------------------------------------------------

/// The decomposition of each invariant factor `m_i = s_i * t_i` into its
/// p-power part and coprime part, with CRT embeddings of both subgroups.
#[derive(Clone, Debug)]
pub struct SylowSplit {
    pub prime: u64,
    pub p_part: AbelianGroup,
    pub coprime: AbelianGroup,
    group: AbelianGroup,
    /// Per original factor: (p-power part, coprime part).
    parts: Vec<(u64, u64)>,
}

impl SylowSplit {
    pub fn new(g: &AbelianGroup, p: u64) -> Result<SylowSplit> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut parts = Vec::with_capacity(g.factors.len());
        let mut p_factors = Vec::new();
        let mut h_factors = Vec::new();
        for &m in &g.factors {
            let mut s = 1u64;
            let mut t = m;
            while t % p == 0 {
                s *= p;
                t /= p;
            }
            parts.push((s, t));
            if s > 1 {
                p_factors.push(s);
            }
            if t > 1 {
                h_factors.push(t);
            }
        }
        Ok(SylowSplit {
            prime: p,
            p_part: AbelianGroup { factors: p_factors },
            coprime: AbelianGroup { factors: h_factors },
            group: g.clone(),
            parts,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// Embeds an element of the coprime part H into G; the generator of the
    /// order-t_i subgroup of C_{m_i} is x_i^{s_i}.
    pub fn embed_coprime(&self, h: &GroupElem) -> GroupElem {
        let mut exps = Vec::with_capacity(self.parts.len());
        let mut it = h.exps.iter();
        for &(s, t) in &self.parts {
            if t > 1 {
                let &b = it.next().expect("coprime exponent");
                exps.push(b * s);
            } else {
                exps.push(0);
            }
        }
        GroupElem { exps }
    }

    /// Embeds an element of the Sylow p-part into G.
    pub fn embed_p_part(&self, u: &GroupElem) -> GroupElem {
        let mut exps = Vec::with_capacity(self.parts.len());
        let mut it = u.exps.iter();
        for &(s, t) in &self.parts {
            if s > 1 {
                let &b = it.next().expect("p-part exponent");
                exps.push(b * t);
            } else {
                exps.push(0);
            }
        }
        GroupElem { exps }
    }

    /// Whether g lies in the embedded coprime subgroup.
    pub fn is_in_coprime(&self, g: &GroupElem) -> bool {
        g.exps
            .iter()
            .zip(&self.parts)
            .all(|(&a, &(s, _))| a % s == 0)
    }

    /// The unique factorization g = u * h with u in the p-part and h in H,
    /// returned in the subgroups' own coordinates.
    pub fn factor_elem(&self, g: &GroupElem) -> (GroupElem, GroupElem) {
        let mut p_exps = Vec::new();
        let mut h_exps = Vec::new();
        for (&a, &(s, t)) in g.exps.iter().zip(&self.parts) {
            if s > 1 {
                // coordinate of the p-component in C_s
                let t_inv = invmod(t % s, s);
                p_exps.push(a % s * t_inv % s);
            }
            if t > 1 {
                let s_inv = invmod(s % t, t);
                h_exps.push(a % t * s_inv % t);
            }
        }
        (GroupElem { exps: p_exps }, GroupElem { exps: h_exps })
    }

    /// Pulls an element of the embedded coprime subgroup back to H.
    pub fn project_coprime(&self, g: &GroupElem) -> Result<GroupElem> {
        if !self.is_in_coprime(g) {
            return Err(Error::GroupMismatch);
        }
        let mut exps = Vec::new();
        for (&a, &(s, t)) in g.exps.iter().zip(&self.parts) {
            if t > 1 {
                exps.push(a / s);
            }
        }
        Ok(GroupElem { exps })
    }
}

fn invmod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    debug_assert_eq!(gcd(a, m), 1);
    let phi = factorize(m).euler_phi();
    crate::numtheory::mod_pow(a, phi - 1, m)
}

// ---------------------------------------------------------------------------
// Enumeration of abelian groups.
// ---------------------------------------------------------------------------

/// Partitions of k with parts in descending order, lexicographically.
fn partitions(k: u32) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let top = remaining.min(max_part);
        for part in (1..=top).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    out
}

/// Every abelian group of order n up to isomorphism, in a deterministic
/// order: one per choice of partition of each prime multiplicity.
pub fn abelian_groups_of_order(n: u64) -> Result<Vec<AbelianGroup>> {
    if n == 0 || n > MAX_GROUP_ORDER {
        return Err(Error::SizeBound {
            what: "group order",
            value: n as u128,
            bound: MAX_GROUP_ORDER as u128,
        });
    }
    if n == 1 {
        return Ok(vec![AbelianGroup::trivial()]);
    }
    let fact = factorize(n);
    let per_prime: Vec<(u64, Vec<Vec<u32>>)> = fact
        .factors()
        .iter()
        .map(|&(p, e)| (p, partitions(e)))
        .collect();
    let mut combos: Vec<Vec<u64>> = vec![Vec::new()];
    for (p, parts) in &per_prime {
        let mut next = Vec::new();
        for combo in &combos {
            for partition in parts {
                let mut cyclics = combo.clone();
                cyclics.extend(partition.iter().map(|&e| p.pow(e)));
                next.push(cyclics);
            }
        }
        combos = next;
    }
    let mut groups: Vec<AbelianGroup> = combos
        .iter()
        .map(|cyclics| AbelianGroup::from_cyclic_factors(cyclics))
        .collect::<Result<_>>()?;
    groups.sort();
    groups.dedup();
    Ok(groups)
}

// ---------------------------------------------------------------------------
// Characters.
// ---------------------------------------------------------------------------

/// Shared data for the character group of H valued in a field containing a
/// primitive root of unity of order exponent(H).
pub struct CharEnv {
    pub group: AbelianGroup,
    pub field: Arc<FieldCtx>,
    /// Exponent of the group.
    pub m: u64,
    /// m / m_j per invariant factor.
    weights: Vec<u64>,
    /// omega_m^i for i in [0, m).
    omega_pows: Vec<FieldElem>,
}

impl CharEnv {
    pub fn new(group: &AbelianGroup, field: &Arc<FieldCtx>) -> Result<Arc<CharEnv>> {
        if group.order() % field.p() == 0 {
            return Err(Error::NotSemisimple {
                q: field.p(),
                order: group.order(),
            });
        }
        let m = group.exponent();
        let omega = field.root_of_unity(m)?;
        let mut omega_pows = Vec::with_capacity(m as usize);
        let mut cur = field.one();
        for _ in 0..m {
            omega_pows.push(cur.clone());
            cur = field.mul(&cur, &omega);
        }
        let weights = group
            .invariant_factors()
            .iter()
            .map(|&mj| m / mj)
            .collect();
        Ok(Arc::new(CharEnv {
            group: group.clone(),
            field: Arc::clone(field),
            m,
            weights,
            omega_pows,
        }))
    }

    pub fn omega(&self) -> &FieldElem {
        &self.omega_pows[if self.m > 1 { 1 } else { 0 }]
    }
}

/// A character psi: H -> F determined by exponents `(c_1, ..., c_r)`:
/// `psi(x_j) = omega_m^((m/m_j) c_j)`.
#[derive(Clone)]
pub struct Character {
    env: Arc<CharEnv>,
    exps: Vec<u64>,
}

impl PartialEq for Character {
    fn eq(&self, other: &Self) -> bool {
        debug_assert_eq!(self.env.group, other.env.group);
        self.exps == other.exps
    }
}
impl Eq for Character {}

impl PartialOrd for Character {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Character {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.exps.cmp(&other.exps)
    }
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Character({:?})", self.exps)
    }
}

impl Character {
    pub fn env(&self) -> &Arc<CharEnv> {
        &self.env
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&c| c == 0)
    }

    /// Value at a group element: omega^(sum_j (m/m_j) c_j a_j mod m).
    pub fn value(&self, h: &GroupElem) -> Result<FieldElem> {
        if !self.env.group.contains(h) {
            return Err(Error::GroupMismatch);
        }
        let m = self.env.m as u128;
        if self.env.m <= 1 {
            return Ok(self.env.field.one());
        }
        let mut acc: u128 = 0;
        for ((&c, &a), &w) in self
            .exps
            .iter()
            .zip(h.exponents())
            .zip(&self.env.weights)
        {
            acc = (acc + w as u128 * c as u128 % m * a as u128) % m;
        }
        Ok(self.env.omega_pows[acc as usize].clone())
    }

    /// psi^n with n reduced in each coordinate.
    pub fn pow(&self, n: i64) -> Character {
        let exps = self
            .exps
            .iter()
            .zip(self.env.group.invariant_factors())
            .map(|(&c, &mj)| (c as u128 * normalize_mod(n, mj) as u128 % mj as u128) as u64)
            .collect();
        Character {
            env: Arc::clone(&self.env),
            exps,
        }
    }

    pub fn inverse(&self) -> Character {
        self.pow(-1)
    }

    /// Order of psi in the character group: lcm of m_j / gcd(m_j, c_j).
    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(self.env.group.invariant_factors())
            .map(|(&c, &mj)| mj / gcd(mj, c))
            .fold(1, lcm)
    }
}

/// All |H| characters of H, indexed by exponent vectors in lexicographic
/// order. Requires gcd(char(F), |H|) = 1 and a primitive exponent(H)-th root
/// of unity in the field.
pub fn characters(group: &AbelianGroup, field: &Arc<FieldCtx>) -> Result<Vec<Character>> {
    let env = CharEnv::new(group, field)?;
    Ok(group
        .elements()
        .map(|g| Character {
            env: Arc::clone(&env),
            exps: g.exponents().to_vec(),
        })
        .collect())
}
