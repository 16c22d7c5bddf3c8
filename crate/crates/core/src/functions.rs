//! Symbolic functions on a hypergroup.
//!
//! Every function here is a finite sum `x ↦ Σ_j c_j [∂^{α_j} Q_x](λ_j)`:
//! order-zero terms are the exponentials `x ↦ Q_x(λ)`, first-order terms are
//! sine functions, a full order tower at one point is a moment-function
//! family. The class is closed under translation (translates expand through
//! the Leibniz rule into lower-order terms at the same point), which is what
//! makes varieties of these functions finite-dimensional and makes modified
//! differences computable exactly.
//!
//! Canonical form: terms are merged on equal `(order, point)` — point
//! equality is exact scalar equality — sorted deterministically, and zero
//! coefficients are dropped. Whether a *nonzero symbol* is the zero
//! *function* is decidable by sampling a determination box: along each
//! coordinate the values form a linear dynamical system whose transition
//! matrix is constant once the recurrence tail rule applies, so vanishing on
//! a window of twice the tower size propagates to all of `ℕ`.

use core::cmp::Ordering;

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hypergroup::{Element, Hypergroup};
use crate::multiindex::MultiIndex;
use crate::polyring::MultiPoly;
use crate::rng::SplitMix64;
use crate::scalar::{Rational, Scalar};

/// One summand `c · [∂^{order} Q_·](point)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Scalar,
    pub order: MultiIndex,
    pub point: Vec<Scalar>,
}

/// A symbolic function `Σ_j c_j [∂^{α_j} Q_·](λ_j)`, in canonical form.
#[derive(Clone)]
pub struct HFunction {
    base: Arc<Hypergroup>,
    terms: Vec<Term>,
}

pub(crate) fn cmp_points(a: &[Scalar], b: &[Scalar]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.canonical_cmp(y) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

fn points_equal(a: &[Scalar], b: &[Scalar]) -> bool {
    cmp_points(a, b) == Ordering::Equal
}

impl HFunction {
    pub fn zero(base: Arc<Hypergroup>) -> Self {
        HFunction {
            base,
            terms: Vec::new(),
        }
    }

    /// Normalizes: merges equal `(order, point)` terms, drops zeros.
    pub fn from_terms(base: Arc<Hypergroup>, terms: impl IntoIterator<Item = Term>) -> Self {
        let dim = base.dim();
        let mut terms: Vec<Term> = terms.into_iter().collect();
        for t in &terms {
            assert_eq!(t.point.len(), dim, "term point dimension mismatch");
            assert_eq!(t.order.dim(), dim, "term order dimension mismatch");
        }
        terms.sort_by(|s, t| cmp_points(&s.point, &t.point).then_with(|| s.order.cmp(&t.order)));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.order == t.order && points_equal(&last.point, &t.point) => {
                    last.coeff = &last.coeff + &t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        HFunction {
            base,
            terms: merged,
        }
    }

    /// The exponential `x ↦ Q_x(λ)`: single term, coefficient 1, order 0.
    pub fn exponential(base: Arc<Hypergroup>, point: Vec<Scalar>) -> Self {
        let order = MultiIndex::zero(base.dim());
        HFunction::from_terms(
            base,
            [Term {
                coeff: Scalar::one(),
                order,
                point,
            }],
        )
    }

    /// The sine function `Σ_i a_i [∂_i Q_·](λ)` for the exponential at `λ`.
    pub fn sine(base: Arc<Hypergroup>, coeffs: &[Scalar], point: Vec<Scalar>) -> Self {
        assert_eq!(coeffs.len(), base.dim(), "sine coefficient count mismatch");
        let dim = base.dim();
        let terms: Vec<Term> = coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| Term {
                coeff: a.clone(),
                order: MultiIndex::unit(dim, i),
                point: point.clone(),
            })
            .collect();
        HFunction::from_terms(base, terms)
    }

    pub fn base(&self) -> &Arc<Hypergroup> {
        &self.base
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero_symbol(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.coeff.is_exact() && t.point.iter().all(Scalar::is_exact))
    }

    /// `Some(λ)` when this is structurally an exponential: one term with
    /// coefficient 1 and order 0.
    pub fn exponential_point(&self) -> Option<&[Scalar]> {
        match self.terms.as_slice() {
            [t] if t.coeff.is_one() && t.order.is_zero() => Some(&t.point),
            _ => None,
        }
    }

    /// The common point of all terms, if there is one.
    pub fn single_point(&self) -> Option<&[Scalar]> {
        let first = self.terms.first()?;
        self.terms
            .iter()
            .all(|t| points_equal(&t.point, &first.point))
            .then_some(first.point.as_slice())
    }

    /// Componentwise max of the term orders.
    pub fn order_cap(&self) -> MultiIndex {
        let dim = self.base.dim();
        let mut cap = vec![0u32; dim];
        for t in &self.terms {
            for (slot, &e) in cap.iter_mut().zip(t.order.entries()) {
                *slot = (*slot).max(e);
            }
        }
        MultiIndex::new(cap)
    }

    /// Exact pointwise evaluation `Σ_j c_j [∂^{α_j} Q_x](λ_j)`.
    pub fn evaluate(&self, x: &Element) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for t in &self.terms {
            let v = self.base.basis_deriv_eval(x, &t.order, &t.point)?;
            acc = &acc + &(&t.coeff * &v);
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Scalar) -> HFunction {
        if c.is_zero() {
            return HFunction::zero(self.base.clone());
        }
        HFunction {
            base: self.base.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: &t.coeff * c,
                    order: t.order.clone(),
                    point: t.point.clone(),
                })
                .collect(),
        }
    }

    /// The translate `x ↦ f(x*y)`, expanded symbolically: each term
    /// `(c, α, λ)` becomes `Σ_{β≤α} c·binom(α,β)·[∂^{α-β}Q_y](λ) · (β, λ)`.
    /// Numerically this agrees with pairing `f` against `δ_x * δ_y`.
    pub fn translate(&self, y: &Element) -> Result<HFunction> {
        assert_eq!(
            y.dim(),
            self.base.dim(),
            "translate element dimension mismatch"
        );
        let mut out = Vec::new();
        for t in &self.terms {
            for beta in t.order.downset() {
                let gamma = t.order.checked_sub(&beta).expect("beta ≤ order");
                let qy = self.base.basis_deriv_eval(y, &gamma, &t.point)?;
                if qy.is_zero() {
                    continue;
                }
                let binom = Scalar::from_rational(Rational::from_integer(t.order.binomial(&beta)));
                out.push(Term {
                    coeff: &(&t.coeff * &binom) * &qy,
                    order: beta,
                    point: t.point.clone(),
                });
            }
        }
        Ok(HFunction::from_terms(self.base.clone(), out))
    }

    /// Iterated modified difference `Δ_{m;y_1,…,y_k} f`, computed
    /// symbolically; one step is `f(·*y) − m(y)·f`. The operators commute,
    /// so the order of `ys` is irrelevant.
    pub fn mod_diff(&self, m: &HFunction, ys: &[Element]) -> Result<HFunction> {
        let Some(lambda) = m.exponential_point() else {
            return Err(Error::NotExponential);
        };
        let lambda = lambda.to_vec();
        crate::measures::assert_same_base(&self.base, &m.base);
        assert!(!ys.is_empty(), "modified difference needs at least one y");
        let zero_order = MultiIndex::zero(self.base.dim());
        let mut acc = self.clone();
        for y in ys {
            let my = self.base.basis_deriv_eval(y, &zero_order, &lambda)?;
            acc = &acc.translate(y)? - &acc.scale(&my);
        }
        Ok(acc)
    }

    /// Per-coordinate sampling caps that determine the function: beyond
    /// them, coordinate sections satisfy a constant-coefficient linear
    /// recurrence (the tail regime), so vanishing on the box implies
    /// vanishing everywhere.
    pub(crate) fn determination_box(&self) -> Vec<usize> {
        let dim = self.base.dim();
        let mut caps = Vec::with_capacity(dim);
        for i in 0..dim {
            // Σ over distinct coordinate values of 2·(max order + 1)
            let mut towers: Vec<(&Scalar, u32)> = Vec::new();
            for t in &self.terms {
                match towers
                    .iter_mut()
                    .find(|(v, _)| v.canonical_cmp(&t.point[i]) == Ordering::Equal)
                {
                    Some(slot) => slot.1 = slot.1.max(t.order[i]),
                    None => towers.push((&t.point[i], t.order[i])),
                }
            }
            let state_dim: usize = towers.iter().map(|(_, s)| 2 * (*s as usize + 1)).sum();
            caps.push(self.base.factor_rec(i).tail_start() + state_dim);
        }
        caps
    }

    /// Whether this symbol is the zero *function*, decided exactly by
    /// evaluating on the determination box. Trustworthy for exact scalars;
    /// float terms are compared bitwise against zero.
    pub fn is_zero_fn(&self) -> Result<bool> {
        if self.terms.is_empty() {
            return Ok(true);
        }
        let caps = self.determination_box();
        let sampler = Sampler::new(self, &caps)?;
        for x in grid_elements(&caps) {
            if !sampler.value(&x).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Symbol equality: same hypergroup, identical canonical term lists.
impl PartialEq for HFunction {
    fn eq(&self, other: &Self) -> bool {
        crate::measures::base_eq(&self.base, &other.base) && self.terms == other.terms
    }
}

impl core::ops::Add<&HFunction> for &HFunction {
    type Output = HFunction;
    fn add(self, rhs: &HFunction) -> HFunction {
        crate::measures::assert_same_base(&self.base, &rhs.base);
        HFunction::from_terms(
            self.base.clone(),
            self.terms.iter().chain(&rhs.terms).cloned(),
        )
    }
}

impl core::ops::Sub<&HFunction> for &HFunction {
    type Output = HFunction;
    fn sub(self, rhs: &HFunction) -> HFunction {
        self + &rhs.scale(&-Scalar::one())
    }
}

impl core::ops::Neg for &HFunction {
    type Output = HFunction;
    fn neg(self) -> HFunction {
        self.scale(&-Scalar::one())
    }
}

impl core::fmt::Debug for HFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})·∂^{}Q(", t.coeff, t.order)?;
            for (j, p) in t.point.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// The moment family at `λ` up to order cap `A`: members
/// `f_α = [∂^α Q_·](λ)` for `α ≤ A`. The order-zero member is the
/// generating exponential; the family satisfies
/// `f_α(x*y) = Σ_{β≤α} binom(α,β) f_β(x) f_{α-β}(y)`.
#[derive(Clone)]
pub struct MomentFamily {
    base: Arc<Hypergroup>,
    point: Vec<Scalar>,
    cap: MultiIndex,
    members: BTreeMap<MultiIndex, HFunction>,
}

impl MomentFamily {
    pub fn new(base: Arc<Hypergroup>, point: Vec<Scalar>, cap: MultiIndex) -> Self {
        assert_eq!(point.len(), base.dim(), "point dimension mismatch");
        assert_eq!(cap.dim(), base.dim(), "cap dimension mismatch");
        let members = cap
            .downset()
            .into_iter()
            .map(|alpha| {
                let member = HFunction::from_terms(
                    base.clone(),
                    [Term {
                        coeff: Scalar::one(),
                        order: alpha.clone(),
                        point: point.clone(),
                    }],
                );
                (alpha, member)
            })
            .collect();
        MomentFamily {
            base,
            point,
            cap,
            members,
        }
    }

    pub fn base(&self) -> &Arc<Hypergroup> {
        &self.base
    }

    pub fn point(&self) -> &[Scalar] {
        &self.point
    }

    pub fn cap(&self) -> &MultiIndex {
        &self.cap
    }

    pub fn member(&self, alpha: &MultiIndex) -> Option<&HFunction> {
        self.members.get(alpha)
    }

    pub fn members(&self) -> impl Iterator<Item = (&MultiIndex, &HFunction)> {
        self.members.iter()
    }

    /// The generating exponential `f_0`.
    pub fn exponential(&self) -> &HFunction {
        &self.members[&MultiIndex::zero(self.base.dim())]
    }
}

/// `x ↦ [P(∂)Q_x](λ)` for a constant-coefficient operator polynomial `P`:
/// the monomial `a_α ξ^α` contributes the term `(a_α, α, λ)`.
pub fn apply_pdo(p: &MultiPoly, point: &[Scalar], base: &Arc<Hypergroup>) -> HFunction {
    assert_eq!(
        p.dim(),
        base.dim(),
        "operator polynomial dimension mismatch"
    );
    assert_eq!(point.len(), base.dim(), "point dimension mismatch");
    let terms: Vec<Term> = p
        .terms()
        .map(|(alpha, c)| Term {
            coeff: c.clone(),
            order: alpha.clone(),
            point: point.to_vec(),
        })
        .collect();
    HFunction::from_terms(base.clone(), terms)
}

/// The smallest `n ≤ n_max` such that every `(n+1)`-fold modified
/// difference of `f` annihilates, or `None` if there is none in range.
///
/// One difference `Δ_{m;y}` splits symbolically into components indexed by
/// `γ > 0` (and, for terms at points other than m's, the untouched group):
/// all `(n+1)`-fold differences vanish iff all level-`(n+1)` components are
/// zero functions. When every term of `f` sits at m's point the split is
/// exact for *every* λ (the evaluation matrix `[∂^γ Q_{γ'}](λ)` is
/// triangular with diagonal `lc·γ! ≠ 0`); for mixed-point seeds the result
/// is an upper bound. Random `(n+1)`-tuples from `{0..=box}^d` spot-check
/// the returned level.
pub fn monomial_degree(
    f: &HFunction,
    m: &HFunction,
    box_n: usize,
    n_max: usize,
    trials: usize,
    rng: &mut SplitMix64,
) -> Result<Option<usize>> {
    let Some(lambda) = m.exponential_point() else {
        return Err(Error::NotExponential);
    };
    crate::measures::assert_same_base(f.base(), m.base());
    let lambda = lambda.to_vec();
    let mut level: Vec<HFunction> = vec![f.clone()];
    for n in 0..=n_max {
        let next = difference_components(&level, &lambda);
        let mut all_zero = true;
        for g in &next {
            if !g.is_zero_fn()? {
                all_zero = false;
                break;
            }
        }
        if all_zero {
            // spot-check: random (n+1)-tuples must annihilate
            for _ in 0..trials {
                let ys: Vec<Element> = (0..=n)
                    .map(|_| rng.element(f.base().dim(), 0, box_n as u32))
                    .collect();
                let diff = f.mod_diff(m, &ys)?;
                assert!(
                    diff.is_zero_fn()?,
                    "difference components vanished but a sampled tuple did not"
                );
            }
            return Ok(Some(n));
        }
        level = reduce_span(next);
    }
    Ok(None)
}

/// Components of `span{Δ_{m;y} g : y}` for all `g` in the level.
fn difference_components(level: &[HFunction], lambda: &[Scalar]) -> Vec<HFunction> {
    let mut out = Vec::new();
    for g in level {
        let base = g.base().clone();
        // group terms by point
        let mut groups: Vec<(Vec<Scalar>, Vec<&Term>)> = Vec::new();
        for t in g.terms() {
            match groups.iter_mut().find(|(p, _)| points_equal(p, &t.point)) {
                Some((_, ts)) => ts.push(t),
                None => groups.push((t.point.clone(), vec![t])),
            }
        }
        for (point, ts) in groups {
            let at_m_point = points_equal(&point, lambda);
            if !at_m_point {
                // the whole group survives with coefficient Q_y(λ') − Q_y(λ)
                out.push(HFunction::from_terms(
                    base.clone(),
                    ts.iter().map(|t| (*t).clone()),
                ));
            }
            // γ-components: Σ_j c_j binom(α_j, γ) (α_j − γ, point), γ > 0
            let mut gammas: Vec<MultiIndex> = Vec::new();
            for t in &ts {
                for gamma in t.order.downset() {
                    if !gamma.is_zero() && !gammas.contains(&gamma) {
                        gammas.push(gamma);
                    }
                }
            }
            for gamma in gammas {
                let terms: Vec<Term> = ts
                    .iter()
                    .filter(|t| gamma.leq(&t.order))
                    .map(|t| Term {
                        coeff: &t.coeff
                            * &Scalar::from_rational(Rational::from_integer(
                                t.order.binomial(&gamma),
                            )),
                        order: t.order.checked_sub(&gamma).expect("gamma ≤ order"),
                        point: point.clone(),
                    })
                    .collect();
                let h = HFunction::from_terms(base.clone(), terms);
                if !h.is_zero_symbol() {
                    out.push(h);
                }
            }
        }
    }
    out
}

/// Keeps a spanning subset of the given functions that is linearly
/// independent as symbols, to stop level sets growing combinatorially.
fn reduce_span(fns: Vec<HFunction>) -> Vec<HFunction> {
    // atom universe over (order, point)
    let mut atoms: Vec<(MultiIndex, Vec<Scalar>)> = Vec::new();
    for f in &fns {
        for t in f.terms() {
            if !atoms
                .iter()
                .any(|(o, p)| *o == t.order && points_equal(p, &t.point))
            {
                atoms.push((t.order.clone(), t.point.clone()));
            }
        }
    }
    let exact = fns.iter().all(HFunction::is_exact);
    if !exact {
        return fns; // float symbols: skip reduction, levels stay small anyway
    }
    let mut ech = crate::linalg::Echelon::new(atoms.len());
    let mut kept = Vec::new();
    for f in fns {
        let mut row = vec![Scalar::zero(); atoms.len()];
        for t in f.terms() {
            let idx = atoms
                .iter()
                .position(|(o, p)| *o == t.order && points_equal(p, &t.point))
                .expect("atom registered");
            row[idx] = t.coeff.clone();
        }
        if ech.insert(row) {
            kept.push(f);
        }
    }
    kept
}

/// Per-term, per-coordinate derivative chains for fast repeated evaluation
/// of one function on a box.
pub(crate) struct Sampler {
    terms: Vec<(Scalar, Vec<(usize, u32)>)>,
    chains: Vec<Vec<Vec<Scalar>>>,
}

impl Sampler {
    /// Chains are built up to `caps[i]` in coordinate `i`.
    pub(crate) fn new(f: &HFunction, caps: &[usize]) -> Result<Sampler> {
        let dim = f.base().dim();
        assert_eq!(caps.len(), dim, "cap count mismatch");
        // (coordinate, point value) → (chain index, max order)
        let mut keys: Vec<(usize, Scalar, u32)> = Vec::new();
        for t in f.terms() {
            for i in 0..dim {
                match keys
                    .iter_mut()
                    .find(|(c, v, _)| *c == i && v.canonical_cmp(&t.point[i]) == Ordering::Equal)
                {
                    Some(slot) => slot.2 = slot.2.max(t.order[i]),
                    None => keys.push((i, t.point[i].clone(), t.order[i])),
                }
            }
        }
        let mut chains = Vec::with_capacity(keys.len());
        for (i, v, orders) in &keys {
            chains.push(f.base().deriv_chain(*i, v, *orders, caps[*i])?);
        }
        let terms = f
            .terms()
            .iter()
            .map(|t| {
                let cols = (0..dim)
                    .map(|i| {
                        let idx = keys
                            .iter()
                            .position(|(c, v, _)| {
                                *c == i && v.canonical_cmp(&t.point[i]) == Ordering::Equal
                            })
                            .expect("chain registered");
                        (idx, t.order[i])
                    })
                    .collect();
                (t.coeff.clone(), cols)
            })
            .collect();
        Ok(Sampler { terms, chains })
    }

    pub(crate) fn value(&self, x: &Element) -> Scalar {
        let mut acc = Scalar::zero();
        for (coeff, cols) in &self.terms {
            let mut term = coeff.clone();
            for (i, (chain, order)) in cols.iter().enumerate() {
                let v = &self.chains[*chain][x[i] as usize][*order as usize];
                if v.is_zero() {
                    term = Scalar::zero();
                    break;
                }
                term = &term * v;
            }
            acc = &acc + &term;
        }
        acc
    }
}

/// All points of `Π_i {0..=caps[i]}` in graded-lex order.
pub(crate) fn grid_elements(caps: &[usize]) -> Vec<Element> {
    MultiIndex::new(caps.iter().map(|&c| c as u32).collect()).downset()
}
