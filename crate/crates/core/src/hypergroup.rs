//! Polynomial hypergroups on `ℕ^d`.
//!
//! A one-dimensional family is given by a three-term recurrence
//!
//! ```text
//! x·P_n = a_n P_{n+1} + b_n P_n + c_n P_{n-1},    P_0 = 1, P_{-1} = 0,
//! ```
//!
//! with `a_n > 0`, `a_n + b_n + c_n = 1` (which forces `P_n(1) = 1`) and
//! `c_0 = 0`. Products `P_k·P_l = Σ_n c(k,l,n) P_n` define the linearization
//! coefficients; the family generates a hypergroup exactly when these are
//! nonnegative, and construction certifies a finite box of them, eagerly.
//! Higher-dimensional hypergroups are (flattened) tensor products of
//! one-dimensional ones; their coefficients factor across coordinates.
//!
//! Coefficients are computed by the product recurrence obtained by applying
//! the three-term rule inside `x·(P_k P_l)`:
//!
//! ```text
//! c(k+1,l,n) = [ a_{n-1} c(k,l,n-1) + (b_n - b_k) c(k,l,n)
//!                + c_{n+1} c(k,l,n+1) - c_k c(k-1,l,n) ] / a_k.
//! ```
//!
//! The brute-force route (multiply basis polynomials, convert back with
//! [`Hypergroup::expand_in_basis`]) is kept as an independent cross-check in
//! [`Hypergroup::verify_axioms`] and in the test suites.

use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::multiindex::MultiIndex;
use crate::polyring::MultiPoly;
use crate::scalar::{Rational, Scalar};

/// Points of the basic set `ℕ^d`.
pub type Element = MultiIndex;

/// Default certification box for the presets.
pub const DEFAULT_CERTIFIED_BOX: usize = 32;

/// One step of the three-term recurrence.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceCoeffs {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl RecurrenceCoeffs {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Self {
        RecurrenceCoeffs { a, b, c }
    }
}

/// Recurrence coefficients as an explicit prefix plus an optional
/// eventually-constant tail.
#[derive(Clone, Debug, PartialEq)]
pub struct Recurrence1D {
    prefix: Vec<RecurrenceCoeffs>,
    tail: Option<RecurrenceCoeffs>,
}

impl Recurrence1D {
    pub fn new(prefix: Vec<RecurrenceCoeffs>, tail: Option<RecurrenceCoeffs>) -> Result<Self> {
        if prefix.is_empty() && tail.is_none() {
            return Err(Error::InvalidRecurrence(
                "no coefficients given (empty prefix, no tail)".into(),
            ));
        }
        let rec = Recurrence1D { prefix, tail };
        let check = |n: usize, co: &RecurrenceCoeffs| -> Result<()> {
            if !co.a.is_positive() {
                return Err(Error::InvalidRecurrence(format!(
                    "a_{n} = {} is not positive",
                    co.a
                )));
            }
            if !(co.a.clone() + &co.b + &co.c).is_one() {
                return Err(Error::InvalidRecurrence(format!(
                    "a_{n} + b_{n} + c_{n} = {} instead of 1",
                    co.a.clone() + &co.b + &co.c
                )));
            }
            Ok(())
        };
        for (n, co) in rec.prefix.iter().enumerate() {
            check(n, co)?;
        }
        if let Some(t) = &rec.tail {
            check(rec.prefix.len(), t)?;
        }
        if !rec.coeffs(0).expect("n = 0 is covered").c.is_zero() {
            return Err(Error::InvalidRecurrence("c_0 must be zero".into()));
        }
        Ok(rec)
    }

    /// `xT_n = ½(T_{n-1} + T_{n+1})`: `a_0 = 1`, then `a_n = c_n = ½`.
    pub fn chebyshev() -> Self {
        let half = || Rational::new(1.into(), 2.into());
        Recurrence1D {
            prefix: vec![RecurrenceCoeffs::new(
                Rational::one(),
                Rational::zero(),
                Rational::zero(),
            )],
            tail: Some(RecurrenceCoeffs::new(half(), Rational::zero(), half())),
        }
    }

    pub fn coeffs(&self, n: usize) -> Option<&RecurrenceCoeffs> {
        self.prefix.get(n).or(self.tail.as_ref())
    }

    /// Index from which the tail rule applies.
    pub fn tail_start(&self) -> usize {
        self.prefix.len()
    }

    pub fn has_tail(&self) -> bool {
        self.tail.is_some()
    }

    /// `P_0 .. P_{up_to}` as one-variable polynomials; `Err(n)` if the
    /// coefficients at index `n` are missing.
    fn basis_polys(&self, up_to: usize) -> core::result::Result<Vec<MultiPoly>, usize> {
        let mut polys = Vec::with_capacity(up_to + 1);
        polys.push(MultiPoly::one(1));
        if up_to == 0 {
            return Ok(polys);
        }
        let x = MultiPoly::var(1, 0);
        for n in 0..up_to {
            let co = self.coeffs(n).ok_or(n)?;
            let scaled_prev = if n == 0 {
                MultiPoly::zero(1)
            } else {
                polys[n - 1].scale(&Scalar::from_rational(co.c.clone()))
            };
            let shifted =
                &(&x - &MultiPoly::constant(1, Scalar::from_rational(co.b.clone()))) * &polys[n];
            let next = (&shifted - &scaled_prev)
                .scale(&(Scalar::one() / Scalar::from_rational(co.a.clone())));
            polys.push(next);
        }
        Ok(polys)
    }

    /// Derivative value chains: `table[n][s] = P_n^{(s)}(λ)` for `n ≤ up_to`
    /// and `s ≤ orders`, from the differentiated recurrence.
    fn deriv_values(
        &self,
        lambda: &Scalar,
        orders: u32,
        up_to: usize,
    ) -> core::result::Result<Vec<Vec<Scalar>>, usize> {
        let width = orders as usize + 1;
        let mut table = Vec::with_capacity(up_to + 1);
        let mut p0 = vec![Scalar::zero(); width];
        p0[0] = Scalar::one();
        table.push(p0);
        for n in 0..up_to {
            let co = self.coeffs(n).ok_or(n)?;
            let b = Scalar::from_rational(co.b.clone());
            let c = Scalar::from_rational(co.c.clone());
            let inv_a = Scalar::one() / Scalar::from_rational(co.a.clone());
            let shift = lambda - &b;
            let mut next = Vec::with_capacity(width);
            for s in 0..width {
                let mut acc = &shift * &table[n][s];
                if s > 0 {
                    acc = &acc + &(&Scalar::from_int(s as i64) * &table[n][s - 1]);
                }
                if n > 0 && !c.is_zero() {
                    acc = &acc - &(&c * &table[n - 1][s]);
                }
                next.push(&acc * &inv_a);
            }
            table.push(next);
        }
        Ok(table)
    }

    /// Linearization rows `rows[k][n] = c(k,l,n)` for `k ≤ k_max` at fixed
    /// `l`, by the product recurrence. `Err(n)` on missing coefficients.
    pub(crate) fn lin_rows(
        &self,
        k_max: usize,
        l: usize,
    ) -> core::result::Result<Vec<Vec<Rational>>, usize> {
        let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(k_max + 1);
        let mut row0 = vec![Rational::zero(); l + 1];
        row0[l] = Rational::one();
        rows.push(row0);
        for k in 0..k_max {
            let ck = self.coeffs(k).ok_or(k)?.clone();
            let deg = k + l; // degree of the current row
            let mut next = vec![Rational::zero(); deg + 2];
            for (n, slot) in next.iter_mut().enumerate() {
                let mut acc = Rational::zero();
                if n >= 1 && n - 1 <= deg && !rows[k][n - 1].is_zero() {
                    acc += self.coeffs(n - 1).ok_or(n - 1)?.a.clone() * &rows[k][n - 1];
                }
                if n <= deg && !rows[k][n].is_zero() {
                    let diff = self.coeffs(n).ok_or(n)?.b.clone() - &ck.b;
                    if !diff.is_zero() {
                        acc += diff * &rows[k][n];
                    }
                }
                if n < deg && !rows[k][n + 1].is_zero() {
                    acc += self.coeffs(n + 1).ok_or(n + 1)?.c.clone() * &rows[k][n + 1];
                }
                if k >= 1 && !ck.c.is_zero() && n < deg && !rows[k - 1][n].is_zero() {
                    acc -= ck.c.clone() * &rows[k - 1][n];
                }
                if !acc.is_zero() {
                    *slot = acc / &ck.a;
                }
            }
            rows.push(next);
        }
        Ok(rows)
    }
}

/// Certified table of `c(k,l,·)` for `k,l ≤ box_n`.
struct LinTable {
    box_n: usize,
    rows: Vec<Vec<Rational>>,
}

impl LinTable {
    fn build(rec: &Recurrence1D, box_n: usize, coordinate: usize) -> Result<LinTable> {
        let mut rows = Vec::with_capacity((box_n + 1) * (box_n + 1));
        for l in 0..=box_n {
            let cols = rec
                .lin_rows(box_n, l)
                .map_err(|needed| tail_error(rec, coordinate, needed))?;
            for (k, row) in cols.iter().enumerate() {
                check_row_signs(row, coordinate, k, l)?;
            }
            rows.extend(cols);
        }
        // stored as rows[l*(box_n+1) + k]
        Ok(LinTable { box_n, rows })
    }

    fn get(&self, k: usize, l: usize) -> &[Rational] {
        &self.rows[l * (self.box_n + 1) + k]
    }
}

fn check_row_signs(row: &[Rational], coordinate: usize, k: usize, l: usize) -> Result<()> {
    for (n, v) in row.iter().enumerate() {
        if v.is_negative() {
            return Err(Error::NegativeCoefficient {
                coordinate,
                k,
                l,
                n,
                value: v.clone(),
            });
        }
    }
    Ok(())
}

pub(crate) fn tail_error(rec: &Recurrence1D, coordinate: usize, needed: usize) -> Error {
    Error::TailRequired {
        coordinate,
        needed,
        available: rec.tail_start(),
    }
}

struct Factor {
    rec: Recurrence1D,
    table: LinTable,
}

/// A polynomial hypergroup on `ℕ^d`, stored as the flattened list of its
/// one-dimensional factors. Immutable and `Sync`; share it through the
/// `Arc` the constructors hand out.
pub struct Hypergroup {
    factors: Vec<Arc<Factor>>,
}

impl PartialEq for Hypergroup {
    fn eq(&self, other: &Self) -> bool {
        self.factors.len() == other.factors.len()
            && self
                .factors
                .iter()
                .zip(&other.factors)
                .all(|(a, b)| a.rec == b.rec)
    }
}

impl core::fmt::Debug for Hypergroup {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Hypergroup(d={}", self.dim())?;
        if self.is_chebyshev() {
            write!(f, ", chebyshev")?;
        }
        write!(f, ")")
    }
}

impl Hypergroup {
    /// Builds a one-dimensional hypergroup, certifying nonnegativity of all
    /// `c(k,l,n)` with `k,l ≤ certify_up_to`. Rejects with an exact witness
    /// otherwise.
    pub fn from_recurrence(rec: Recurrence1D, certify_up_to: usize) -> Result<Arc<Hypergroup>> {
        let table = LinTable::build(&rec, certify_up_to, 0)?;
        Ok(Arc::new(Hypergroup {
            factors: vec![Arc::new(Factor { rec, table })],
        }))
    }

    /// The `d`-fold Chebyshev hypergroup, certified on the default box.
    pub fn chebyshev(d: usize) -> Arc<Hypergroup> {
        Hypergroup::chebyshev_certified(d, DEFAULT_CERTIFIED_BOX)
    }

    pub fn chebyshev_certified(d: usize, certify_up_to: usize) -> Arc<Hypergroup> {
        assert!(d >= 1, "dimension must be at least 1");
        let one = Hypergroup::from_recurrence(Recurrence1D::chebyshev(), certify_up_to)
            .expect("Chebyshev coefficients are nonnegative");
        let factor = one.factors[0].clone();
        Arc::new(Hypergroup {
            factors: vec![factor; d],
        })
    }

    /// Tensor product; basis polynomials multiply and linearization
    /// coefficients factor coordinatewise.
    pub fn product(a: &Arc<Hypergroup>, b: &Arc<Hypergroup>) -> Arc<Hypergroup> {
        let mut factors = a.factors.clone();
        factors.extend(b.factors.iter().cloned());
        Arc::new(Hypergroup { factors })
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    /// The identity element `o = (0,…,0)`.
    pub fn identity(&self) -> Element {
        Element::zero(self.dim())
    }

    /// Size of the certified coefficient box (min over coordinates).
    pub fn certified_box(&self) -> usize {
        self.factors
            .iter()
            .map(|f| f.table.box_n)
            .min()
            .unwrap_or(0)
    }

    pub fn is_chebyshev(&self) -> bool {
        let cheb = Recurrence1D::chebyshev();
        self.factors.iter().all(|f| f.rec == cheb)
    }

    pub(crate) fn factor_rec(&self, coordinate: usize) -> &Recurrence1D {
        &self.factors[coordinate].rec
    }

    /// `P_n^{(s)}(λ)` chains for one coordinate; the workhorse behind
    /// symbolic function evaluation.
    pub(crate) fn deriv_chain(
        &self,
        coordinate: usize,
        lambda: &Scalar,
        orders: u32,
        up_to: usize,
    ) -> Result<Vec<Vec<Scalar>>> {
        let rec = &self.factors[coordinate].rec;
        rec.deriv_values(lambda, orders, up_to)
            .map_err(|needed| tail_error(rec, coordinate, needed))
    }

    /// One coordinate's linearization row `c(k,l,·)`; table lookup inside
    /// the certified box, recomputed (and re-certified) beyond it.
    pub(crate) fn lin_row(
        &self,
        coordinate: usize,
        k: usize,
        l: usize,
    ) -> Result<Cow<'_, [Rational]>> {
        let factor = &self.factors[coordinate];
        if k <= factor.table.box_n && l <= factor.table.box_n {
            return Ok(Cow::Borrowed(factor.table.get(k, l)));
        }
        let rows = factor
            .rec
            .lin_rows(k, l)
            .map_err(|needed| tail_error(&factor.rec, coordinate, needed))?;
        for (kk, row) in rows.iter().enumerate() {
            check_row_signs(row, coordinate, kk, l)?;
        }
        Ok(Cow::Owned(
            rows.into_iter().next_back().expect("k row present"),
        ))
    }

    /// The basis polynomial `Q_x`, an exact polynomial in `d` variables.
    pub fn basis_poly(&self, x: &Element) -> Result<MultiPoly> {
        assert_eq!(x.dim(), self.dim(), "element dimension mismatch");
        let tables = self.coordinate_polys(x.entries())?;
        Ok(tensor_basis(&tables, x))
    }

    /// Per-coordinate `P_0..P_{deg_i}` tables.
    fn coordinate_polys(&self, degrees: &[u32]) -> Result<Vec<Vec<MultiPoly>>> {
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.rec
                    .basis_polys(degrees[i] as usize)
                    .map_err(|needed| tail_error(&f.rec, i, needed))
            })
            .collect()
    }

    /// `[∂^α Q_x](λ)` evaluated through the per-coordinate derivative
    /// chains, without constructing `Q_x`.
    pub fn basis_deriv_eval(
        &self,
        x: &Element,
        alpha: &MultiIndex,
        lambda: &[Scalar],
    ) -> Result<Scalar> {
        assert_eq!(x.dim(), self.dim(), "element dimension mismatch");
        assert_eq!(alpha.dim(), self.dim(), "order dimension mismatch");
        assert_eq!(lambda.len(), self.dim(), "point dimension mismatch");
        let mut acc = Scalar::one();
        for i in 0..self.dim() {
            let chain = self.deriv_chain(i, &lambda[i], alpha[i], x[i] as usize)?;
            acc = &acc * &chain[x[i] as usize][alpha[i] as usize];
            if acc.is_zero() {
                return Ok(acc);
            }
        }
        Ok(acc)
    }

    /// The convolution measure `δ_x * δ_y = Σ_w c(x,y,w) δ_w`.
    pub fn linearization(self: &Arc<Self>, x: &Element, y: &Element) -> Result<Measure> {
        assert_eq!(x.dim(), self.dim(), "element dimension mismatch");
        assert_eq!(y.dim(), self.dim(), "element dimension mismatch");
        let rows: Vec<Cow<'_, [Rational]>> = (0..self.dim())
            .map(|i| self.lin_row(i, x[i] as usize, y[i] as usize))
            .collect::<Result<_>>()?;
        let mut weights: Vec<(Element, Scalar)> = Vec::new();
        let mut stack: Vec<(usize, Vec<u32>, Rational)> = vec![(0, Vec::new(), Rational::one())];
        while let Some((coord, prefix, w)) = stack.pop() {
            if coord == self.dim() {
                weights.push((Element::new(prefix), Scalar::from_rational(w)));
                continue;
            }
            for (n, v) in rows[coord].iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let mut next = prefix.clone();
                next.push(n as u32);
                stack.push((coord + 1, next, w.clone() * v));
            }
        }
        Ok(Measure::from_weights(self.clone(), weights))
    }

    /// Expands an exact polynomial in the basis `{Q_x}`: the unique finitely
    /// supported `c` with `Σ_x c_x Q_x = p`. This is the degree-graded
    /// triangular solve; uniqueness comes from the degree-basis property.
    pub fn expand_in_basis(self: &Arc<Self>, p: &MultiPoly) -> Result<Measure> {
        assert_eq!(p.dim(), self.dim(), "polynomial dimension mismatch");
        if !p.is_exact() {
            return Err(Error::NotExact);
        }
        let mut degrees = vec![0u32; self.dim()];
        for (alpha, _) in p.terms() {
            for i in 0..self.dim() {
                degrees[i] = degrees[i].max(alpha[i]);
            }
        }
        let tables = self.coordinate_polys(&degrees)?;
        let mut work = p.clone();
        let mut out: Vec<(Element, Scalar)> = Vec::new();
        while let Some((gamma, lead)) = work.leading_term() {
            let gamma = gamma.clone();
            let lead = lead.clone();
            let q = tensor_basis(&tables, &gamma);
            let lc = q.coeff(&gamma);
            debug_assert!(!lc.is_zero(), "leading coefficient of Q_x must not vanish");
            let c = &lead / &lc;
            work = &work - &q.scale(&c);
            out.push((gamma, c));
        }
        Ok(Measure::from_weights(self.clone(), out))
    }

    /// Axiom sweep over the box `{0..=box_n}^d`; see [`AxiomReport`].
    /// Failed checks become report entries, not errors.
    pub fn verify_axioms(self: &Arc<Self>, box_n: usize) -> Result<AxiomReport> {
        self.verify_axioms_chunk(box_n, 0, 1)
    }

    /// One deterministic chunk of the sweep (`chunk` of `num_chunks`);
    /// chunk reports merge with [`AxiomReport::merge`]. Checks that are not
    /// amenable to partitioning run in chunk 0.
    pub fn verify_axioms_chunk(
        self: &Arc<Self>,
        box_n: usize,
        chunk: usize,
        num_chunks: usize,
    ) -> Result<AxiomReport> {
        assert!(num_chunks > 0 && chunk < num_chunks, "bad chunk spec");
        verify::run(self, box_n, chunk, num_chunks)
    }
}

/// `Q_x = Π_i P_{x_i}(z_i)` from per-coordinate tables.
pub(crate) fn tensor_basis(tables: &[Vec<MultiPoly>], x: &Element) -> MultiPoly {
    let dim = tables.len();
    let mut acc = MultiPoly::one(dim);
    for (i, table) in tables.iter().enumerate() {
        acc = &acc * &table[x[i] as usize].embed(dim, i);
    }
    acc
}

/// Outcome of one named axiom check.
#[derive(Clone, Debug)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub pass: bool,
    /// Number of instances checked (pairs, triples, rows — per check).
    pub checked: u64,
    /// First failure witness, or a note on a passed check.
    pub detail: Option<String>,
}

/// Per-check outcomes of a [`Hypergroup::verify_axioms`] sweep.
#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub box_n: usize,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Merges chunk reports: counts add, passes conjoin, first failure
    /// witness wins. Checks are aligned by name.
    pub fn merge(parts: Vec<AxiomReport>) -> AxiomReport {
        let mut iter = parts.into_iter();
        let mut base = iter.next().expect("at least one part");
        for part in iter {
            for check in part.checks {
                if let Some(slot) = base.checks.iter_mut().find(|c| c.name == check.name) {
                    slot.checked += check.checked;
                    if slot.pass && !check.pass {
                        slot.pass = false;
                        slot.detail = check.detail;
                    }
                } else {
                    base.checks.push(check);
                }
            }
        }
        base
    }
}

mod verify {
    //! The axiom sweep. Works on locally computed (uncertified) coefficient
    //! rows so that sign violations surface as report entries, and so the
    //! sweep never pays the per-call recomputation cost outside the
    //! certified box.

    use super::*;

    /// Caps keeping the measure-level cross-check sweeps bounded in higher
    /// dimensions; the coordinate-level sweeps always cover the full box.
    fn capped_box(dim: usize, box_n: usize, budget_pairs: u64) -> usize {
        let fits = |cap: usize| -> bool {
            (cap as u64 + 1)
                .checked_pow(2 * dim as u32)
                .is_some_and(|pairs| pairs <= budget_pairs)
        };
        let mut cap = box_n;
        while cap > 1 && !fits(cap) {
            cap -= 1;
        }
        cap
    }

    struct FactorRows {
        /// rows[l][k] = c(k,l,·), for l ≤ box, k ≤ 2·box (the longer k
        /// range serves the associativity middle terms).
        rows: Vec<Vec<Vec<Rational>>>,
    }

    impl FactorRows {
        fn get(&self, k: usize, l: usize) -> &[Rational] {
            if l < self.rows.len() {
                &self.rows[l][k]
            } else {
                &self.rows[k][l]
            }
        }
    }

    pub(super) fn run(
        hg: &Arc<Hypergroup>,
        box_n: usize,
        chunk: usize,
        num_chunks: usize,
    ) -> Result<AxiomReport> {
        let dim = hg.dim();
        let mut checks = Vec::new();

        // local coefficient rows per factor
        let mut factors = Vec::with_capacity(dim);
        for (i, f) in hg.factors.iter().enumerate() {
            let mut rows = Vec::with_capacity(box_n + 1);
            for l in 0..=box_n {
                rows.push(
                    f.rec
                        .lin_rows(2 * box_n, l)
                        .map_err(|needed| tail_error(&f.rec, i, needed))?,
                );
            }
            factors.push(FactorRows { rows });
        }

        checks.push(nonnegativity(&factors, box_n, chunk, num_chunks));
        checks.push(mass(&factors, box_n, chunk, num_chunks));
        checks.push(support(&factors, box_n, chunk, num_chunks));
        checks.push(identity_law(hg, &factors, box_n, chunk, num_chunks));
        checks.push(commutativity(&factors, box_n, chunk, num_chunks));
        checks.push(associativity(&factors, box_n, chunk, num_chunks));
        if chunk == 0 {
            checks.push(degree_basis(hg, box_n)?);
            checks.push(basis_product_oracle(hg, box_n)?);
            if hg.is_chebyshev() {
                checks.push(chebyshev_closed_form(hg, &factors, box_n));
            }
        }
        Ok(AxiomReport { box_n, checks })
    }

    fn per_factor_pairs(
        name: &'static str,
        factors: &[FactorRows],
        box_n: usize,
        chunk: usize,
        num_chunks: usize,
        mut test: impl FnMut(usize, usize, usize, &FactorRows) -> Option<String>,
    ) -> AxiomCheck {
        let mut checked = 0;
        let mut detail = None;
        'outer: for (i, f) in factors.iter().enumerate() {
            for k in 0..=box_n {
                if k % num_chunks != chunk {
                    continue;
                }
                for l in 0..=box_n {
                    checked += 1;
                    if let Some(witness) = test(i, k, l, f) {
                        detail = Some(witness);
                        break 'outer;
                    }
                }
            }
        }
        AxiomCheck {
            name,
            pass: detail.is_none(),
            checked,
            detail,
        }
    }

    fn nonnegativity(
        factors: &[FactorRows],
        box_n: usize,
        chunk: usize,
        num_chunks: usize,
    ) -> AxiomCheck {
        per_factor_pairs(
            "nonnegativity",
            factors,
            box_n,
            chunk,
            num_chunks,
            |i, k, l, f| {
                let row = f.get(k, l);
                row.iter()
                    .enumerate()
                    .find(|(_, v)| v.is_negative())
                    .map(|(n, v)| format!("coordinate {i}: c({k},{l},{n}) = {v}"))
            },
        )
    }

    fn mass(factors: &[FactorRows], box_n: usize, chunk: usize, num_chunks: usize) -> AxiomCheck {
        per_factor_pairs("mass", factors, box_n, chunk, num_chunks, |i, k, l, f| {
            let total: Rational = f.get(k, l).iter().sum();
            if total.is_one() {
                None
            } else {
                Some(format!("coordinate {i}: Σ_n c({k},{l},n) = {total}"))
            }
        })
    }

    fn support(
        factors: &[FactorRows],
        box_n: usize,
        chunk: usize,
        num_chunks: usize,
    ) -> AxiomCheck {
        per_factor_pairs(
            "support",
            factors,
            box_n,
            chunk,
            num_chunks,
            |i, k, l, f| {
                let row = f.get(k, l);
                let lo = k.abs_diff(l);
                row.iter().enumerate().find_map(|(n, v)| {
                    if !v.is_zero() && (n < lo || n > k + l) {
                        Some(format!(
                            "coordinate {i}: c({k},{l},{n}) = {v} outside [{lo},{}]",
                            k + l
                        ))
                    } else {
                        None
                    }
                })
            },
        )
    }

    fn commutativity(
        factors: &[FactorRows],
        box_n: usize,
        chunk: usize,
        num_chunks: usize,
    ) -> AxiomCheck {
        per_factor_pairs(
            "commutativity",
            factors,
            box_n,
            chunk,
            num_chunks,
            |i, k, l, f| {
                let a = f.get(k, l);
                let b = f.get(l, k);
                if rows_equal(a, b) {
                    None
                } else {
                    Some(format!("coordinate {i}: c({k},{l},·) ≠ c({l},{k},·)"))
                }
            },
        )
    }

    fn identity_law(
        hg: &Arc<Hypergroup>,
        factors: &[FactorRows],
        box_n: usize,
        chunk: usize,
        num_chunks: usize,
    ) -> AxiomCheck {
        // coordinate level: c(k,0,·) = δ_k, complete for products
        let mut check = per_factor_pairs(
            "identity",
            factors,
            box_n,
            chunk,
            num_chunks,
            |i, k, l, f| {
                if l != 0 {
                    return None;
                }
                let row = f.get(k, 0);
                let ok = row.iter().enumerate().all(
                    |(n, v)| {
                        if n == k {
                            v.is_one()
                        } else {
                            v.is_zero()
                        }
                    },
                );
                if ok {
                    None
                } else {
                    Some(format!("coordinate {i}: c({k},0,·) ≠ δ_{k}"))
                }
            },
        );
        // measure level, capped: δ_x * δ_o = δ_x through the public API
        if chunk == 0 && check.pass {
            let cap = capped_box(hg.dim(), box_n, 512);
            let o = hg.identity();
            for x in box_elements(hg.dim(), cap) {
                check.checked += 1;
                let conv = match hg.linearization(&x, &o) {
                    Ok(m) => m,
                    Err(e) => {
                        check.pass = false;
                        check.detail = Some(format!("linearization({x},o) failed: {e}"));
                        break;
                    }
                };
                if conv != Measure::dirac(hg.clone(), x.clone()) {
                    check.pass = false;
                    check.detail = Some(format!("δ_{x} * δ_o ≠ δ_{x}"));
                    break;
                }
            }
        }
        check
    }

    fn associativity(
        factors: &[FactorRows],
        box_n: usize,
        chunk: usize,
        num_chunks: usize,
    ) -> AxiomCheck {
        let mut checked = 0;
        let mut detail = None;
        'outer: for (i, f) in factors.iter().enumerate() {
            for k in 0..=box_n {
                if k % num_chunks != chunk {
                    continue;
                }
                for l in 0..=box_n {
                    for m in 0..=box_n {
                        checked += 1;
                        // (δ_k*δ_l)*δ_m vs δ_k*(δ_l*δ_m), at row level
                        let left = row_then(f, f.get(k, l), m, false);
                        let right = row_then(f, f.get(l, m), k, true);
                        if !rows_equal(&left, &right) {
                            detail = Some(format!(
                                "coordinate {i}: (δ_{k}*δ_{l})*δ_{m} ≠ δ_{k}*(δ_{l}*δ_{m})"
                            ));
                            break 'outer;
                        }
                    }
                }
            }
        }
        AxiomCheck {
            name: "associativity",
            pass: detail.is_none(),
            checked,
            detail,
        }
    }

    /// Convolves a coefficient row against a point mass: Σ_n row[n]·c(n,m,·)
    /// (or c(m,n,·) when `flip`).
    fn row_then(f: &FactorRows, row: &[Rational], m: usize, flip: bool) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); row.len() + m];
        for (n, w) in row.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let inner = if flip { f.get(m, n) } else { f.get(n, m) };
            for (t, v) in inner.iter().enumerate() {
                if !v.is_zero() {
                    out[t] += w.clone() * v;
                }
            }
        }
        out
    }

    fn rows_equal(a: &[Rational], b: &[Rational]) -> bool {
        let len = a.len().max(b.len());
        let zero = Rational::zero();
        (0..len).all(|n| a.get(n).unwrap_or(&zero) == b.get(n).unwrap_or(&zero))
    }

    /// Degree-basis property: `Q_x` has total degree `|x|` with leading
    /// monomial exactly `x`, so `{Q_x : |x| ≤ n}` is triangular over the
    /// monomials of degree ≤ n and hence a basis; cross-checked by an exact
    /// rank computation for small n.
    fn degree_basis(hg: &Arc<Hypergroup>, box_n: usize) -> Result<AxiomCheck> {
        let dim = hg.dim();
        let mut checked = 0;
        let mut detail = None;
        let elements = simplex_elements(dim, box_n as u32);
        'outer: for x in &elements {
            checked += 1;
            let q = hg.basis_poly(x)?;
            let Some((lead, _)) = q.leading_term() else {
                detail = Some(format!("Q_{x} is zero"));
                break;
            };
            if lead != x || q.total_degree() != Some(x.total()) {
                detail = Some(format!("Q_{x} leading monomial {lead} ≠ {x}"));
                break 'outer;
            }
        }
        // small-n rank oracle: the coefficient matrix of {Q_x : |x| ≤ n}
        // over the monomial basis must have full rank
        if detail.is_none() {
            let small = box_n.min(if dim == 1 { 6 } else { 4 }) as u32;
            let polys: Vec<(Element, MultiPoly)> = simplex_elements(dim, small)
                .into_iter()
                .map(|x| hg.basis_poly(&x).map(|q| (x, q)))
                .collect::<Result<_>>()?;
            let monomials: Vec<MultiIndex> = simplex_elements(dim, small).into_iter().collect();
            let col_of: BTreeMap<&MultiIndex, usize> =
                monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let rows: Vec<Vec<Scalar>> = polys
                .iter()
                .map(|(_, q)| {
                    let mut row = vec![Scalar::zero(); monomials.len()];
                    for (alpha, c) in q.terms() {
                        row[col_of[alpha]] = c.clone();
                    }
                    row
                })
                .collect();
            checked += rows.len() as u64;
            if crate::linalg::rank(&rows) != rows.len() {
                detail = Some(format!(
                    "rank of {{Q_x : |x| ≤ {small}}} below {} — not a basis",
                    rows.len()
                ));
            }
        }
        Ok(AxiomCheck {
            name: "degree_basis",
            pass: detail.is_none(),
            checked,
            detail,
        })
    }

    /// The dual route: multiply basis polynomials and convert back, compare
    /// with the recurrence-computed convolution. Capped subbox.
    fn basis_product_oracle(hg: &Arc<Hypergroup>, box_n: usize) -> Result<AxiomCheck> {
        let cap = capped_box(hg.dim(), box_n, 256).min(8);
        let mut checked = 0;
        let mut detail = None;
        let elements = box_elements(hg.dim(), cap);
        'outer: for x in &elements {
            for y in &elements {
                checked += 1;
                let product = &hg.basis_poly(x)? * &hg.basis_poly(y)?;
                let expanded = hg.expand_in_basis(&product)?;
                // sign rejections become failed entries, not hard errors
                let conv = match hg.linearization(x, y) {
                    Ok(conv) => conv,
                    Err(e @ Error::NegativeCoefficient { .. }) => {
                        detail = Some(format!("{e}"));
                        break 'outer;
                    }
                    Err(e) => return Err(e),
                };
                if expanded != conv {
                    detail = Some(format!(
                        "expand(Q_{x}·Q_{y}) disagrees with the convolution table"
                    ));
                    break 'outer;
                }
            }
        }
        Ok(AxiomCheck {
            name: "basis_product_oracle",
            pass: detail.is_none(),
            checked,
            detail,
        })
    }

    /// For Chebyshev structure, the convolution has a closed form: the
    /// average of the 2^d point masses at the coordinatewise choices of
    /// `|x_i - y_i|` or `x_i + y_i`, duplicates coalescing. Checked per
    /// coordinate on the full box and at the tensor level on a capped box.
    fn chebyshev_closed_form(
        hg: &Arc<Hypergroup>,
        factors: &[FactorRows],
        box_n: usize,
    ) -> AxiomCheck {
        let dim = hg.dim();
        let mut checked = 0;
        let mut detail = None;
        let half = Rational::new(1.into(), 2.into());
        'outer: for (i, f) in factors.iter().enumerate() {
            for k in 0..=box_n {
                for l in 0..=box_n {
                    checked += 1;
                    let row = f.get(k, l);
                    let mut expected = vec![Rational::zero(); k + l + 1];
                    if k == 0 || l == 0 {
                        expected[k + l] = Rational::one();
                    } else {
                        expected[k.abs_diff(l)] += &half;
                        expected[k + l] += &half;
                    }
                    if !rows_equal(row, &expected) {
                        detail = Some(format!(
                            "coordinate {i}: c({k},{l},·) differs from ½(δ_|k-l| + δ_(k+l))"
                        ));
                        break 'outer;
                    }
                }
            }
        }
        // tensor level: computed convolution vs the coalesced 2^d-term form
        if detail.is_none() && dim > 1 {
            let cap = capped_box(dim, box_n, 20_000);
            let elements = box_elements(dim, cap);
            'pairs: for x in &elements {
                for y in &elements {
                    checked += 1;
                    let mut computed: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
                    tensor_from_rows(factors, x, y, &mut computed);
                    let mut expected: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
                    let quarter_pow = Rational::new(1.into(), (1i64 << dim).into());
                    for mask in 0u32..(1 << dim) {
                        let point: Vec<u32> = (0..dim)
                            .map(|i| {
                                if mask & (1 << i) == 0 {
                                    x[i].abs_diff(y[i])
                                } else {
                                    x[i] + y[i]
                                }
                            })
                            .collect();
                        *expected.entry(point).or_insert_with(Rational::zero) += &quarter_pow;
                    }
                    if computed != expected {
                        detail = Some(format!("δ_{x} * δ_{y} differs from the closed form"));
                        break 'pairs;
                    }
                }
            }
        }
        AxiomCheck {
            name: "chebyshev_closed_form",
            pass: detail.is_none(),
            checked,
            detail,
        }
    }

    /// Tensor product of the per-coordinate rows at (x, y), zeros dropped.
    fn tensor_from_rows(
        factors: &[FactorRows],
        x: &Element,
        y: &Element,
        out: &mut BTreeMap<Vec<u32>, Rational>,
    ) {
        let dim = factors.len();
        let mut stack: Vec<(usize, Vec<u32>, Rational)> = vec![(0, Vec::new(), Rational::one())];
        while let Some((coord, prefix, w)) = stack.pop() {
            if coord == dim {
                out.insert(prefix, w);
                continue;
            }
            let row = factors[coord].get(x[coord] as usize, y[coord] as usize);
            for (n, v) in row.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let mut next = prefix.clone();
                next.push(n as u32);
                stack.push((coord + 1, next, w.clone() * v));
            }
        }
    }

    /// `{0..=cap}^dim` in graded-lex order.
    pub(crate) fn box_elements(dim: usize, cap: usize) -> Vec<Element> {
        MultiIndex::new(vec![cap as u32; dim]).downset()
    }

    /// `{x : |x| ≤ total}` in graded-lex order.
    fn simplex_elements(dim: usize, total: u32) -> Vec<Element> {
        MultiIndex::new(vec![total; dim])
            .downset()
            .into_iter()
            .filter(|x| x.total() <= total)
            .collect()
    }
}

pub(crate) use verify::box_elements;
