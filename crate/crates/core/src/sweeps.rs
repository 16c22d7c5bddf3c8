//! Exhaustive functional-equation checks over finite boxes.
//!
//! Each check sweeps all `x, y` in `{0..=box}^d` (tuples are sampled for the
//! degree check), comparing both sides of the defining equation. In exact
//! mode the first counterexample is reported; in float mode the maximum
//! sup-norm residual is compared against the tolerance. Function values and
//! convolution rows are precomputed on grids, so a sweep costs scalar
//! arithmetic per pair, not symbolic work.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::functions::{grid_elements, HFunction, MomentFamily, Sampler};
use crate::hypergroup::{box_elements, tail_error, Element, Hypergroup};
use crate::multiindex::MultiIndex;
use crate::rng::SplitMix64;
use crate::scalar::{Rational, Scalar};

/// Comparison mode for a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    Float { tol: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquationKind {
    Exponential,
    Sine,
    Moment,
    Degree,
}

impl EquationKind {
    pub fn name(&self) -> &'static str {
        match self {
            EquationKind::Exponential => "exponential",
            EquationKind::Sine => "sine",
            EquationKind::Moment => "moment",
            EquationKind::Degree => "degree",
        }
    }
}

/// First failing instance of an exact sweep.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub x: Element,
    pub ys: Vec<Element>,
    /// Moment member index, when applicable.
    pub alpha: Option<MultiIndex>,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

#[derive(Clone, Debug)]
pub struct EquationReport {
    pub kind: EquationKind,
    pub box_n: usize,
    pub mode: Mode,
    pub pass: bool,
    pub checked: u64,
    pub max_residual: Option<f64>,
    pub counterexample: Option<Counterexample>,
}

/// What to check.
pub enum EquationSpec<'a> {
    /// `m(x*y) = m(x)·m(y)` for a structural exponential.
    Exponential { m: &'a HFunction },
    /// `s(x*y) = s(x)m(y) + s(y)m(x)`; `s` arbitrary, `m` an exponential.
    Sine { s: &'a HFunction, m: &'a HFunction },
    /// `f_α(x*y) = Σ_{β≤α} binom(α,β) f_β(x) f_{α-β}(y)` for all `α ≤ cap`.
    Moment { family: &'a MomentFamily },
    /// All `(degree+1)`-fold modified differences of `f` vanish; random
    /// tuples from the box, `trials` of them.
    Degree {
        f: &'a HFunction,
        m: &'a HFunction,
        degree: usize,
        trials: usize,
        seed: u64,
    },
}

pub fn check_equation(spec: EquationSpec<'_>, box_n: usize, mode: Mode) -> Result<EquationReport> {
    match spec {
        EquationSpec::Exponential { m } => check_exponential(m, box_n, mode),
        EquationSpec::Sine { s, m } => check_sine(s, m, box_n, mode),
        EquationSpec::Moment { family } => check_moment(family, box_n, mode),
        EquationSpec::Degree {
            f,
            m,
            degree,
            trials,
            seed,
        } => check_degree(f, m, degree, trials, seed, box_n, mode),
    }
}

/// Running comparison state shared by the sweeps.
struct Outcome {
    mode: Mode,
    pass: bool,
    checked: u64,
    max_residual: Option<f64>,
    counterexample: Option<Counterexample>,
}

impl Outcome {
    fn new(mode: Mode) -> Self {
        Outcome {
            mode,
            pass: true,
            checked: 0,
            max_residual: match mode {
                Mode::Exact => None,
                Mode::Float { .. } => Some(0.0),
            },
            counterexample: None,
        }
    }

    /// Returns `true` when the sweep can stop early (exact counterexample).
    fn record(
        &mut self,
        lhs: &Scalar,
        rhs: &Scalar,
        witness: impl FnOnce() -> (Element, Vec<Element>, Option<MultiIndex>),
    ) -> bool {
        self.checked += 1;
        match self.mode {
            Mode::Exact => {
                if lhs != rhs {
                    self.pass = false;
                    let (x, ys, alpha) = witness();
                    self.counterexample = Some(Counterexample {
                        x,
                        ys,
                        alpha,
                        lhs: lhs.clone(),
                        rhs: rhs.clone(),
                    });
                    return true;
                }
                false
            }
            Mode::Float { tol } => {
                let residual = (lhs - rhs).sup_norm();
                let max = self.max_residual.get_or_insert(0.0);
                if residual > *max {
                    *max = residual;
                }
                if residual > tol && self.pass {
                    self.pass = false;
                    let (x, ys, alpha) = witness();
                    self.counterexample = Some(Counterexample {
                        x,
                        ys,
                        alpha,
                        lhs: lhs.clone(),
                        rhs: rhs.clone(),
                    });
                }
                false
            }
        }
    }

    fn finish(self, kind: EquationKind, box_n: usize) -> EquationReport {
        EquationReport {
            kind,
            box_n,
            mode: self.mode,
            pass: self.pass,
            checked: self.checked,
            max_residual: self.max_residual,
            counterexample: self.counterexample,
        }
    }
}

fn require_mode_compatible(mode: Mode, exact_inputs: bool) -> Result<()> {
    if matches!(mode, Mode::Exact) && !exact_inputs {
        return Err(Error::NotExact);
    }
    Ok(())
}

/// Convolution rows for all pairs in the box, one table per coordinate.
pub(crate) struct RowTables {
    tables: Vec<Vec<Vec<Vec<Rational>>>>,
}

impl RowTables {
    pub(crate) fn build(hg: &Hypergroup, box_n: usize) -> Result<RowTables> {
        let mut tables = Vec::with_capacity(hg.dim());
        for i in 0..hg.dim() {
            let rec = hg.factor_rec(i);
            let mut per_l = Vec::with_capacity(box_n + 1);
            for l in 0..=box_n {
                per_l.push(
                    rec.lin_rows(box_n, l)
                        .map_err(|needed| tail_error(rec, i, needed))?,
                );
            }
            tables.push(per_l);
        }
        Ok(RowTables { tables })
    }

    pub(crate) fn row(&self, coord: usize, k: usize, l: usize) -> &[Rational] {
        &self.tables[coord][l][k]
    }

    /// `Σ_w c(x,y,w)·g(w)` with `g` given on a grid.
    pub(crate) fn pair_value(&self, x: &Element, y: &Element, g: &Grid) -> Scalar {
        let dim = self.tables.len();
        let mut acc = Scalar::zero();
        let mut stack: Vec<(usize, Vec<u32>, Rational)> = vec![(0, Vec::new(), Rational::one())];
        while let Some((coord, prefix, w)) = stack.pop() {
            if coord == dim {
                let v = g.at(&prefix);
                acc = &acc + &(&Scalar::from_rational(w) * v);
                continue;
            }
            let row = self.row(coord, x[coord] as usize, y[coord] as usize);
            for (n, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut next = prefix.clone();
                next.push(n as u32);
                stack.push((coord + 1, next, w.clone() * c));
            }
        }
        acc
    }
}

/// Dense value table of one function over `Π {0..=cap_i}`.
pub(crate) struct Grid {
    caps: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<Scalar>,
}

impl Grid {
    pub(crate) fn build(f: &HFunction, caps: &[usize]) -> Result<Grid> {
        let sampler = Sampler::new(f, caps)?;
        let mut strides = vec![1usize; caps.len()];
        for i in (0..caps.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (caps[i + 1] + 1);
        }
        let total: usize = caps.iter().map(|c| c + 1).product();
        let mut values = Vec::with_capacity(total);
        for linear in 0..total {
            let mut rem = linear;
            let idx: Vec<u32> = strides
                .iter()
                .map(|&s| {
                    let v = rem / s;
                    rem %= s;
                    v as u32
                })
                .collect();
            values.push(sampler.value(&Element::new(idx)));
        }
        Ok(Grid {
            caps: caps.to_vec(),
            strides,
            values,
        })
    }

    pub(crate) fn at(&self, x: &[u32]) -> &Scalar {
        let mut idx = 0;
        for (i, &e) in x.iter().enumerate() {
            debug_assert!(e as usize <= self.caps[i]);
            idx += self.strides[i] * e as usize;
        }
        &self.values[idx]
    }

    pub(crate) fn at_element(&self, x: &Element) -> &Scalar {
        self.at(x.entries())
    }
}

/// `m(x*y) = m(x)m(y)`. Uses the product structure of exponentials for the
/// sweep: both sides factor through per-coordinate tables.
fn check_exponential(m: &HFunction, box_n: usize, mode: Mode) -> Result<EquationReport> {
    let Some(lambda) = m.exponential_point() else {
        return Err(Error::NotExponential);
    };
    require_mode_compatible(mode, m.is_exact())?;
    let hg = m.base();
    let dim = hg.dim();
    let rows = RowTables::build(hg, box_n)?;
    // per-coordinate values m_i(n) = P_n(λ_i) for n ≤ 2·box
    let mut coord_values: Vec<Vec<Scalar>> = Vec::with_capacity(dim);
    for (i, point) in lambda.iter().enumerate() {
        let chain = hg.deriv_chain(i, point, 0, 2 * box_n)?;
        coord_values.push(
            chain
                .into_iter()
                .map(|mut row| row.swap_remove(0))
                .collect(),
        );
    }
    // partial sums S_i(k,l) = Σ_n c_i(k,l,n)·m_i(n), the coordinate-i
    // factor of m(x*y), plus the matching product table m_i(k)·m_i(l)
    let mut partial: Vec<Vec<Vec<Scalar>>> = Vec::with_capacity(dim);
    // same_factor[i][k][l] marks S_i(k,l) == m_i(k)·m_i(l); when it holds in
    // every coordinate of a pair, both sides are literally equal products
    let mut same_factor: Vec<Vec<Vec<bool>>> = Vec::with_capacity(dim);
    for (i, values) in coord_values.iter().enumerate() {
        let mut per_k = Vec::with_capacity(box_n + 1);
        let mut same_k = Vec::with_capacity(box_n + 1);
        for k in 0..=box_n {
            let mut per_l = Vec::with_capacity(box_n + 1);
            let mut same_l = Vec::with_capacity(box_n + 1);
            for l in 0..=box_n {
                let mut acc = Scalar::zero();
                for (n, c) in rows.row(i, k, l).iter().enumerate() {
                    if !c.is_zero() {
                        acc = &acc + &(&Scalar::from_rational(c.clone()) * &values[n]);
                    }
                }
                let prod = &values[k] * &values[l];
                same_l.push(matches!(mode, Mode::Exact) && acc == prod);
                per_l.push(acc);
            }
            per_k.push(per_l);
            same_k.push(same_l);
        }
        partial.push(per_k);
        same_factor.push(same_k);
    }
    let elements = box_elements(dim, box_n);
    let value_of = |x: &Element| -> Scalar {
        let mut acc = Scalar::one();
        for i in 0..dim {
            acc = &acc * &coord_values[i][x[i] as usize];
        }
        acc
    };
    let values: Vec<Scalar> = elements.iter().map(value_of).collect();
    let mut outcome = Outcome::new(mode);
    'sweep: for (xi, x) in elements.iter().enumerate() {
        for (yi, y) in elements.iter().enumerate() {
            if (0..dim).all(|i| same_factor[i][x[i] as usize][y[i] as usize]) {
                outcome.checked += 1;
                continue;
            }
            let mut lhs = Scalar::one();
            for i in 0..dim {
                lhs = &lhs * &partial[i][x[i] as usize][y[i] as usize];
            }
            let rhs = &values[xi] * &values[yi];
            if outcome.record(&lhs, &rhs, || (x.clone(), vec![y.clone()], None)) {
                break 'sweep;
            }
        }
    }
    Ok(outcome.finish(EquationKind::Exponential, box_n))
}

/// `s(x*y) = s(x)m(y) + s(y)m(x)`.
fn check_sine(s: &HFunction, m: &HFunction, box_n: usize, mode: Mode) -> Result<EquationReport> {
    if m.exponential_point().is_none() {
        return Err(Error::NotExponential);
    }
    crate::measures::assert_same_base(s.base(), m.base());
    require_mode_compatible(mode, s.is_exact() && m.is_exact())?;
    let hg = s.base();
    let dim = hg.dim();
    let rows = RowTables::build(hg, box_n)?;
    let caps = vec![2 * box_n; dim];
    let s_grid = Grid::build(s, &caps)?;
    let m_grid = Grid::build(m, &caps)?;
    let elements = box_elements(dim, box_n);
    let mut outcome = Outcome::new(mode);
    'sweep: for x in &elements {
        for y in &elements {
            let lhs = rows.pair_value(x, y, &s_grid);
            let rhs = &(s_grid.at_element(x) * m_grid.at_element(y))
                + &(s_grid.at_element(y) * m_grid.at_element(x));
            if outcome.record(&lhs, &rhs, || (x.clone(), vec![y.clone()], None)) {
                break 'sweep;
            }
        }
    }
    Ok(outcome.finish(EquationKind::Sine, box_n))
}

/// The moment identity for every member of the family.
fn check_moment(family: &MomentFamily, box_n: usize, mode: Mode) -> Result<EquationReport> {
    let exact = family.members().all(|(_, f)| f.is_exact());
    require_mode_compatible(mode, exact)?;
    let hg = family.base();
    let dim = hg.dim();
    let rows = RowTables::build(hg, box_n)?;
    let caps = vec![2 * box_n; dim];
    let grids: Vec<(MultiIndex, Grid)> = family
        .members()
        .map(|(alpha, f)| Grid::build(f, &caps).map(|g| (alpha.clone(), g)))
        .collect::<Result<_>>()?;
    let grid_of = |alpha: &MultiIndex| -> &Grid {
        &grids
            .iter()
            .find(|(a, _)| a == alpha)
            .expect("member grid")
            .1
    };
    let elements = box_elements(dim, box_n);
    let mut outcome = Outcome::new(mode);
    'sweep: for (alpha, _) in family.members() {
        let pieces: Vec<(MultiIndex, MultiIndex, Scalar)> = alpha
            .downset()
            .into_iter()
            .map(|beta| {
                let rest = alpha.checked_sub(&beta).expect("beta ≤ alpha");
                let binom = Scalar::from_rational(Rational::from_integer(alpha.binomial(&beta)));
                (beta, rest, binom)
            })
            .collect();
        let lhs_grid = grid_of(alpha);
        for x in &elements {
            for y in &elements {
                let lhs = rows.pair_value(x, y, lhs_grid);
                let mut rhs = Scalar::zero();
                for (beta, rest, binom) in &pieces {
                    let fx = grid_of(beta).at_element(x);
                    let fy = grid_of(rest).at_element(y);
                    rhs = &rhs + &(&(binom * fx) * fy);
                }
                if outcome.record(&lhs, &rhs, || {
                    (x.clone(), vec![y.clone()], Some(alpha.clone()))
                }) {
                    break 'sweep;
                }
            }
        }
    }
    Ok(outcome.finish(EquationKind::Moment, box_n))
}

/// Samples random `(degree+1)`-tuples and checks the iterated difference is
/// the zero function (exact mode) or has small residual on the box (float).
fn check_degree(
    f: &HFunction,
    m: &HFunction,
    degree: usize,
    trials: usize,
    seed: u64,
    box_n: usize,
    mode: Mode,
) -> Result<EquationReport> {
    if m.exponential_point().is_none() {
        return Err(Error::NotExponential);
    }
    require_mode_compatible(mode, f.is_exact() && m.is_exact())?;
    let dim = f.base().dim();
    let mut rng = SplitMix64::new(seed);
    let mut outcome = Outcome::new(mode);
    let zero = Scalar::zero();
    'trials: for _ in 0..trials {
        let ys: Vec<Element> = (0..=degree)
            .map(|_| rng.element(dim, 0, box_n as u32))
            .collect();
        let diff = f.mod_diff(m, &ys)?;
        match mode {
            Mode::Exact => {
                outcome.checked += 1;
                if !diff.is_zero_fn()? {
                    // locate a witness point for the report
                    let caps = diff.determination_box();
                    let witness = grid_elements(&caps)
                        .into_iter()
                        .find(|x| !diff.evaluate(x).map(|v| v.is_zero()).unwrap_or(true));
                    outcome.pass = false;
                    let x = witness.unwrap_or_else(|| Element::zero(dim));
                    let lhs = diff.evaluate(&x)?;
                    outcome.counterexample = Some(Counterexample {
                        x,
                        ys,
                        alpha: None,
                        lhs,
                        rhs: zero.clone(),
                    });
                    break 'trials;
                }
            }
            Mode::Float { .. } => {
                for x in box_elements(dim, box_n) {
                    let v = diff.evaluate(&x)?;
                    if outcome.record(&v, &zero, || (x.clone(), ys.clone(), None)) {
                        break 'trials;
                    }
                }
            }
        }
    }
    Ok(outcome.finish(EquationKind::Degree, box_n))
}

impl core::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "x = {}", self.x)?;
        if let Some(alpha) = &self.alpha {
            write!(f, ", α = {alpha}")?;
        }
        write!(f, ", ys =")?;
        for y in &self.ys {
            write!(f, " {y}")?;
        }
        write!(f, ": lhs = {} vs rhs = {}", self.lhs, self.rhs)
    }
}
