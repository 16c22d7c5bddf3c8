//! Finite-dimensional varieties and decomposition into moment functions.
//!
//! The variety of a symbolic function is the span of its translates. For
//! functions of the form `Σ c_j ∂^{α_j}Q_·(λ_j)` the translate expansion
//! stays inside the finitely many atoms `∂^β Q_·(λ)` with `β` below the
//! seed's orders, so the variety is finite-dimensional and can be captured
//! exactly. Membership tests come back with explicit coefficients and hold
//! as identities of functions, never just on samples.
//!
//! Rank computations factor through the atoms whenever the atom functions
//! are linearly independent — which is established exactly by sampling them
//! on a determination box (beyond it, coordinate sections obey a
//! constant-coefficient linear recurrence, so vanishing propagates). The
//! sampled value matrix of the translates is then (coefficients)·(atom
//! samples) with the right factor of full row rank, so its rank on every
//! box containing the determination box equals the rank of the small
//! coefficient matrix; this is what makes the exact solves cheap. When the
//! atoms degenerate (special `λ`), everything falls back to literal
//! row-echelon over the sampled values with symbolic residual certificates.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::functions::{cmp_points, grid_elements, HFunction, MomentFamily, Sampler, Term};
use crate::hypergroup::Hypergroup;
use crate::linalg::Echelon;
use crate::multiindex::MultiIndex;
use crate::scalar::Scalar;
use crate::sweeps::{Grid, RowTables};

/// Stability margin for the rank-vs-box check.
const MARGIN: usize = 4;

/// An atom `∂^order Q_·(point)`.
#[derive(Clone, Debug)]
struct AtomKey {
    order: MultiIndex,
    point: Vec<Scalar>,
}

impl AtomKey {
    fn matches(&self, order: &MultiIndex, point: &[Scalar]) -> bool {
        self.order == *order && cmp_points(&self.point, point).is_eq()
    }

    fn function(&self, base: &Arc<Hypergroup>) -> HFunction {
        HFunction::from_terms(
            base.clone(),
            [Term {
                coeff: Scalar::one(),
                order: self.order.clone(),
                point: self.point.clone(),
            }],
        )
    }
}

/// All atoms reachable from the seed by lowering orders, deduplicated, in a
/// deterministic order.
fn atom_set(f: &HFunction) -> Vec<AtomKey> {
    let mut atoms: Vec<AtomKey> = Vec::new();
    for t in f.terms() {
        for beta in t.order.downset() {
            if !atoms.iter().any(|a| a.matches(&beta, &t.point)) {
                atoms.push(AtomKey {
                    order: beta,
                    point: t.point.clone(),
                });
            }
        }
    }
    atoms.sort_by(|a, b| cmp_points(&a.point, &b.point).then_with(|| a.order.cmp(&b.order)));
    atoms
}

/// Coordinates of `g` over the atom list; `None` if a term falls outside.
fn atom_vector(g: &HFunction, atoms: &[AtomKey]) -> Option<Vec<Scalar>> {
    let mut row = vec![Scalar::zero(); atoms.len()];
    for t in g.terms() {
        let idx = atoms.iter().position(|a| a.matches(&t.order, &t.point))?;
        row[idx] = t.coeff.clone();
    }
    Some(row)
}

/// Determination caps covering all the given atoms at once.
fn combined_caps(base: &Arc<Hypergroup>, atoms: &[AtomKey]) -> Vec<usize> {
    let combined = HFunction::from_terms(
        base.clone(),
        atoms.iter().map(|a| Term {
            coeff: Scalar::one(),
            order: a.order.clone(),
            point: a.point.clone(),
        }),
    );
    combined.determination_box()
}

/// Whether the atom functions are linearly independent (as functions),
/// decided exactly on their determination box.
fn atoms_independent(base: &Arc<Hypergroup>, atoms: &[AtomKey]) -> Result<bool> {
    let caps = combined_caps(base, atoms);
    let width = grid_elements(&caps).len();
    let mut ech = Echelon::new(width);
    for atom in atoms {
        let row = sample_row(&atom.function(base), &caps)?;
        if !ech.insert(row) {
            return Ok(false);
        }
    }
    Ok(true)
}

enum Engine {
    /// Atoms independent: ranks and solves run over atom coordinates.
    Atomic {
        atoms: Vec<AtomKey>,
        echelon: Echelon,
    },
    /// Degenerate atoms or too small a box: literal sampled rows.
    Sampled { echelon: Echelon },
}

/// The sampled variety `τ(f)` of a seed function on a box.
pub struct Variety {
    base: Arc<Hypergroup>,
    box_n: usize,
    stable: bool,
    generators: Vec<HFunction>,
    basis: Vec<HFunction>,
    caps: Vec<usize>,
    engine: Engine,
}

impl Variety {
    pub fn base(&self) -> &Arc<Hypergroup> {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn box_size(&self) -> usize {
        self.box_n
    }

    pub fn stable(&self) -> bool {
        self.stable
    }

    pub fn generators(&self) -> &[HFunction] {
        &self.generators
    }

    pub fn basis(&self) -> &[HFunction] {
        &self.basis
    }

    /// Exact span membership. `Some(coefficients)` expresses `g` over
    /// [`Variety::basis`] as an identity of functions.
    pub fn contains(&self, g: &HFunction) -> Result<Option<Vec<Scalar>>> {
        crate::measures::assert_same_base(&self.base, g.base());
        match &self.engine {
            Engine::Atomic { atoms, echelon } => {
                if let Some(vector) = atom_vector(g, atoms) {
                    // coefficient vectors agree ⟹ symbols agree ⟹ equal
                    // as functions; no further certificate needed
                    return Ok(echelon.express(&vector));
                }
                // g reaches outside the atom set; if the union is still
                // independent, the extra coordinates rule membership out
                let mut extended = atoms.clone();
                for t in g.terms() {
                    if !extended.iter().any(|a| a.matches(&t.order, &t.point)) {
                        extended.push(AtomKey {
                            order: t.order.clone(),
                            point: t.point.clone(),
                        });
                    }
                }
                if atoms_independent(&self.base, &extended)? {
                    return Ok(None);
                }
                let mut ech = Echelon::new(grid_elements(&self.caps).len());
                for b in &self.basis {
                    ech.insert(sample_row(b, &self.caps)?);
                }
                self.express_certified(&ech, g)
            }
            Engine::Sampled { echelon } => self.express_certified(echelon, g),
        }
    }

    /// Literal route: exact solve on the sample grid plus a symbolic
    /// residual certificate.
    fn express_certified(&self, ech: &Echelon, g: &HFunction) -> Result<Option<Vec<Scalar>>> {
        let row = sample_row(g, &self.caps)?;
        let Some(coeffs) = ech.express(&row) else {
            return Ok(None);
        };
        let mut residual = g.clone();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            residual = &residual - &b.scale(c);
        }
        if residual.is_zero_fn()? {
            Ok(Some(coeffs))
        } else {
            Ok(None)
        }
    }

    /// Dimension of `{s in the variety : s(x*y) = s(x)m(y) + s(y)m(x)}`,
    /// computed by imposing the sine equation as exact linear constraints.
    /// The constraint grid covers a determination box, so the sampled null
    /// space is exactly the global sine subspace.
    ///
    /// With independent atoms the constraints act on atom coordinates and
    /// the result is the intersection dimension with the variety's
    /// coordinate space; otherwise they act on the basis coordinates
    /// directly.
    pub fn sine_dimension(&self, m: &HFunction) -> Result<usize> {
        if m.exponential_point().is_none() {
            return Err(Error::NotExponential);
        }
        if self.contains(m)?.is_none() {
            return Err(Error::NotInVariety);
        }
        if let Engine::Atomic { atoms, .. } = &self.engine {
            if atom_vector(m, atoms).is_some() {
                return self.sine_dimension_atomic(m, atoms);
            }
        }
        self.sine_dimension_sampled(m)
    }

    /// Null space of the sine constraints over atom coordinates,
    /// intersected with the span of the basis coordinate vectors:
    /// dim(U ∩ N) = dim U + dim N − dim(U + N).
    fn sine_dimension_atomic(&self, m: &HFunction, atoms: &[AtomKey]) -> Result<usize> {
        let dim = self.base.dim();
        let mut caps = m.determination_box();
        for atom in atoms {
            for (i, c) in atom
                .function(&self.base)
                .determination_box()
                .into_iter()
                .enumerate()
            {
                caps[i] = caps[i].max(c);
            }
        }
        let cap_n = caps.iter().copied().max().unwrap_or(1);
        let rows = RowTables::build(&self.base, cap_n)?;
        let m_point = m.exponential_point().expect("checked above").to_vec();

        // per-atom chains P_n^{(s)}(λ_i) up to 2·cap, and the pair sums
        // S_a,i(k,l) = Σ_n c_i(k,l,n)·P_n^{(order_i)}(λ_i)
        let mut chains: Vec<Vec<Vec<Vec<Scalar>>>> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            let mut per_coord = Vec::with_capacity(dim);
            for i in 0..dim {
                per_coord.push(self.base.deriv_chain(
                    i,
                    &atom.point[i],
                    atom.order[i],
                    2 * cap_n,
                )?);
            }
            chains.push(per_coord);
        }
        let mut m_chain: Vec<Vec<Vec<Scalar>>> = Vec::with_capacity(dim);
        for (i, point) in m_point.iter().enumerate() {
            m_chain.push(self.base.deriv_chain(i, point, 0, cap_n)?);
        }
        let mut pair_sums: Vec<Vec<Vec<Vec<Scalar>>>> = Vec::with_capacity(atoms.len());
        for (atom, atom_chains) in atoms.iter().zip(&chains) {
            let mut per_coord = Vec::with_capacity(dim);
            for (i, chain) in atom_chains.iter().enumerate() {
                let order = atom.order[i] as usize;
                let mut table = Vec::with_capacity(cap_n + 1);
                for k in 0..=cap_n {
                    let mut per_l = Vec::with_capacity(cap_n + 1);
                    for l in 0..=cap_n {
                        let mut acc = Scalar::zero();
                        for (n, c) in rows.row(i, k, l).iter().enumerate() {
                            if !c.is_zero() {
                                acc =
                                    &acc + &(&Scalar::from_rational(c.clone()) * &chain[n][order]);
                            }
                        }
                        per_l.push(acc);
                    }
                    table.push(per_l);
                }
                per_coord.push(table);
            }
            pair_sums.push(per_coord);
        }
        let atom_value = |a: usize, x: &MultiIndex| -> Scalar {
            let mut acc = Scalar::one();
            for i in 0..dim {
                acc = &acc * &chains[a][i][x[i] as usize][atoms[a].order[i] as usize];
            }
            acc
        };
        let m_value = |x: &MultiIndex| -> Scalar {
            let mut acc = Scalar::one();
            for i in 0..dim {
                acc = &acc * &m_chain[i][x[i] as usize][0];
            }
            acc
        };

        // constraint rows B_a(x,y) over the (symmetric) pair grid
        let points = grid_elements(&vec![cap_n; dim]);
        let mut constraint_echelon = Echelon::new(atoms.len());
        for (xi, x) in points.iter().enumerate() {
            let mx = m_value(x);
            let ax: Vec<Scalar> = (0..atoms.len()).map(|a| atom_value(a, x)).collect();
            for y in points.iter().skip(xi) {
                let my = m_value(y);
                let row: Vec<Scalar> = (0..atoms.len())
                    .map(|a| {
                        let mut conv = Scalar::one();
                        for i in 0..dim {
                            conv = &conv * &pair_sums[a][i][x[i] as usize][y[i] as usize];
                        }
                        let cross = &(&ax[a] * &my) + &(&atom_value(a, y) * &mx);
                        &conv - &cross
                    })
                    .collect();
                if row.iter().any(|v| !v.is_zero()) {
                    constraint_echelon.insert(row);
                }
            }
        }
        // N = global sine solutions in atom coordinates
        let n_basis = crate::linalg::null_space_of(&constraint_echelon);
        // dim(U ∩ N) with U = span of the basis coordinate vectors
        let u_dim = self.basis.len();
        let n_dim = n_basis.len();
        let mut stacked = Echelon::new(atoms.len());
        for g in &self.basis {
            let v = atom_vector(g, atoms).expect("basis lives in the atom span");
            stacked.insert(v);
        }
        for v in n_basis {
            stacked.insert(v);
        }
        Ok(u_dim + n_dim - stacked.rank())
    }

    /// Fallback: constraints over basis coordinates from sampled values.
    fn sine_dimension_sampled(&self, m: &HFunction) -> Result<usize> {
        let dim = self.base.dim();
        let mut caps = m.determination_box();
        for b in &self.basis {
            for (i, c) in b.determination_box().into_iter().enumerate() {
                caps[i] = caps[i].max(c);
            }
        }
        let cap_n = caps.iter().copied().max().unwrap_or(1);
        let rows = RowTables::build(&self.base, cap_n)?;
        let value_caps = vec![2 * cap_n; dim];
        let m_grid = Grid::build(m, &value_caps)?;
        let b_grids: Vec<Grid> = self
            .basis
            .iter()
            .map(|b| Grid::build(b, &value_caps))
            .collect::<Result<_>>()?;
        let points = grid_elements(&vec![cap_n; dim]);
        let mut constraints: Vec<Vec<Scalar>> = Vec::new();
        for x in &points {
            for y in &points {
                let row: Vec<Scalar> = b_grids
                    .iter()
                    .map(|bg| {
                        let conv = rows.pair_value(x, y, bg);
                        let cross = &(bg.at_element(x) * m_grid.at_element(y))
                            + &(bg.at_element(y) * m_grid.at_element(x));
                        &conv - &cross
                    })
                    .collect();
                if row.iter().any(|v| !v.is_zero()) {
                    constraints.push(row);
                }
            }
        }
        Ok(crate::linalg::null_space(&constraints, self.basis.len()).len())
    }

    /// Which of the candidate points have their exponential inside the
    /// variety.
    pub fn exponentials_in(&self, candidates: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
        let mut found = Vec::new();
        for lambda in candidates {
            let m = HFunction::exponential(self.base.clone(), lambda.clone());
            if self.contains(&m)?.is_some() {
                found.push(lambda.clone());
            }
        }
        Ok(found)
    }
}

fn sample_row(f: &HFunction, caps: &[usize]) -> Result<Vec<Scalar>> {
    let sampler = Sampler::new(f, caps)?;
    Ok(grid_elements(caps)
        .iter()
        .map(|x| sampler.value(x))
        .collect())
}

/// Number of distinct `(order, point)` atoms reachable from the seed's
/// terms by lowering orders: the symbolic bound on the variety dimension.
pub fn atom_bound(f: &HFunction) -> usize {
    atom_set(f).len()
}

/// The default box policy: `4·(symbolic dimension bound) + 4`.
pub fn default_box(f: &HFunction) -> usize {
    4 * atom_bound(f) + 4
}

/// Builds the variety of `f` sampled on `{0..=box_n + margin}^d`.
///
/// Generators are the translates of `f` by all `y` with `|y|_∞` at most the
/// order bound + 1 (the translate expansion produces nothing outside their
/// span), deduplicated symbolically. The rank must agree between the box
/// and the margin-enlarged box; on disagreement the box is doubled once
/// before giving up with [`Error::RankUnstable`].
pub fn variety_basis(f: &HFunction, box_n: usize) -> Result<Variety> {
    match variety_attempt(f, box_n)? {
        Ok(v) => Ok(v),
        Err(_) => match variety_attempt(f, 2 * box_n)? {
            Ok(v) => Ok(v),
            Err((dim_small, dim_large)) => Err(Error::RankUnstable {
                box_n: 2 * box_n,
                dim_small,
                dim_large,
            }),
        },
    }
}

/// Inner result: `Err((inner_rank, full_rank))` signals instability.
#[allow(clippy::type_complexity)]
fn variety_attempt(
    f: &HFunction,
    box_n: usize,
) -> Result<core::result::Result<Variety, (usize, usize)>> {
    let base = f.base().clone();
    let dim = base.dim();
    let spread = f.order_cap().entries().iter().copied().max().unwrap_or(0) as usize + 1;
    let mut generators: Vec<HFunction> = Vec::new();
    for y in grid_elements(&vec![spread; dim]) {
        let t = f.translate(&y)?;
        if !t.is_zero_symbol() && !generators.contains(&t) {
            generators.push(t);
        }
    }
    let caps = vec![box_n + MARGIN; dim];

    let atoms = atom_set(f);
    let probe_caps = combined_caps(&base, &atoms);
    // the atomic route needs the box to contain the determination grid, so
    // that ranks on the box provably coincide with coefficient ranks
    let atomic_ok = probe_caps.iter().all(|&c| c <= box_n) && atoms_independent(&base, &atoms)?;
    if atomic_ok {
        let mut echelon = Echelon::new(atoms.len());
        let mut basis = Vec::new();
        for g in &generators {
            let vector = atom_vector(g, &atoms).expect("translates stay inside the atom set");
            if echelon.insert(vector) {
                basis.push(g.clone());
            }
        }
        // sampled ranks on the box and the enlarged box both equal the
        // coefficient rank because the atom sample matrix has full row rank
        // on every grid containing the determination box
        return Ok(Ok(Variety {
            base,
            box_n,
            stable: true,
            generators,
            basis,
            caps,
            engine: Engine::Atomic { atoms, echelon },
        }));
    }

    let inner_caps = vec![box_n; dim];
    let mut echelon = Echelon::new(grid_elements(&caps).len());
    let mut inner_echelon = Echelon::new(grid_elements(&inner_caps).len());
    let mut basis = Vec::new();
    for g in &generators {
        let row = sample_row(g, &caps)?;
        if echelon.insert(row) {
            basis.push(g.clone());
        }
        inner_echelon.insert(sample_row(g, &inner_caps)?);
    }
    if inner_echelon.rank() != echelon.rank() {
        return Ok(Err((inner_echelon.rank(), echelon.rank())));
    }
    Ok(Ok(Variety {
        base,
        box_n,
        stable: true,
        generators,
        basis,
        caps,
        engine: Engine::Sampled { echelon },
    }))
}

/// A decomposition of a seed into moment functions at its point.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub seed: HFunction,
    /// Atom identifiers `(β, λ)` in graded-lex order of `β`.
    pub atoms: Vec<(MultiIndex, Vec<Scalar>)>,
    pub coefficients: Vec<Scalar>,
    /// Exact residual of `seed − Σ c·atom`; zero for valid inputs.
    pub residual: Scalar,
    /// False when the atom system was rank-deficient (degenerate `λ`) and a
    /// tie-break picked one of several exact solutions.
    pub unique: bool,
}

/// Expresses `f` as a linear combination of moment functions
/// `f_β = ∂^β Q_·(λ)` contained in its variety. Atoms are enumerated in
/// graded-lex order up to the componentwise order cap of `f`; membership
/// goes through [`Variety::contains`]. When translates only reach some
/// members in locked ratios, the members-in-variety system is inconsistent
/// and the solve falls back to the full order downset. Returns the
/// decomposition along with the variety it was computed in.
pub fn moment_span_decompose(f: &HFunction, box_n: usize) -> Result<(Decomposition, Variety)> {
    let lambda = f
        .single_point()
        .expect("decomposition seed must carry a single point")
        .to_vec();
    let base = f.base().clone();
    let variety = variety_basis(f, box_n)?;
    let family = MomentFamily::new(base.clone(), lambda.clone(), f.order_cap());
    let mut atoms: Vec<(MultiIndex, HFunction)> = Vec::new();
    for (alpha, member) in family.members() {
        if variety.contains(member)?.is_some() {
            atoms.push((alpha.clone(), member.clone()));
        }
    }
    let (coefficients, unique) = solve_over_atoms(f, &atoms, &variety)?;
    let (coefficients, atoms, unique) = match coefficients {
        Some(c) => (c, atoms, unique),
        None => {
            let all: Vec<(MultiIndex, HFunction)> = family
                .members()
                .map(|(a, m)| (a.clone(), m.clone()))
                .collect();
            let (c, unique_all) = solve_over_atoms(f, &all, &variety)?;
            (
                c.expect("seed terms are atoms, the full system is consistent"),
                all,
                unique_all,
            )
        }
    };
    let mut residual_fn = f.clone();
    for (c, (_, member)) in coefficients.iter().zip(&atoms) {
        residual_fn = &residual_fn - &member.scale(c);
    }
    let residual = if residual_fn.is_zero_fn()? {
        Scalar::zero()
    } else {
        first_nonzero_value(&residual_fn)?
    };
    let decomposition = Decomposition {
        seed: f.clone(),
        atoms: atoms
            .into_iter()
            .map(|(alpha, _)| (alpha, lambda.clone()))
            .collect(),
        coefficients,
        residual,
        unique,
    };
    Ok((decomposition, variety))
}

/// Exact solve of `f = Σ c_a atom_a`. When the member functions are
/// independent the coefficients can be read off the seed's canonical terms;
/// otherwise (degenerate `λ`) the system is solved on the sample grid with
/// dependent atoms pinned to zero in graded-lex order, the deterministic
/// tie-break. `None` if the system is inconsistent.
#[allow(clippy::type_complexity)]
fn solve_over_atoms(
    f: &HFunction,
    atoms: &[(MultiIndex, HFunction)],
    variety: &Variety,
) -> Result<(Option<Vec<Scalar>>, bool)> {
    let base = f.base();
    let keys: Vec<AtomKey> = atoms
        .iter()
        .map(|(alpha, _)| AtomKey {
            order: alpha.clone(),
            point: f.single_point().expect("single-point seed").to_vec(),
        })
        .collect();
    if atoms_independent(base, &keys)? {
        // coefficients are the seed's own term coefficients; consistency
        // means every seed term has a slot among the atoms
        let Some(vector) = atom_vector(f, &keys) else {
            return Ok((None, true));
        };
        return Ok((Some(vector), true));
    }
    let mut echelon = Echelon::new(grid_elements(&variety.caps).len());
    let mut accepted: Vec<usize> = Vec::new();
    for (i, (_, member)) in atoms.iter().enumerate() {
        if echelon.insert(sample_row(member, &variety.caps)?) {
            accepted.push(i);
        }
    }
    let unique = accepted.len() == atoms.len();
    let target = sample_row(f, &variety.caps)?;
    let Some(combo) = echelon.express(&target) else {
        return Ok((None, unique));
    };
    let mut coefficients = vec![Scalar::zero(); atoms.len()];
    for (c, &slot) in combo.into_iter().zip(&accepted) {
        coefficients[slot] = c;
    }
    // sampled solves need the symbolic certificate
    let mut residual = f.clone();
    for (c, (_, member)) in coefficients.iter().zip(atoms) {
        residual = &residual - &member.scale(c);
    }
    if residual.is_zero_fn()? {
        Ok((Some(coefficients), unique))
    } else {
        Ok((None, unique))
    }
}

fn first_nonzero_value(f: &HFunction) -> Result<Scalar> {
    let caps = f.determination_box();
    for x in grid_elements(&caps) {
        let v = f.evaluate(&x)?;
        if !v.is_zero() {
            return Ok(v);
        }
    }
    Ok(Scalar::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::MultiPoly;

    fn q(p: i64, den: i64) -> Scalar {
        Scalar::from_ratio(p, den)
    }

    fn mi(entries: &[u32]) -> MultiIndex {
        MultiIndex::new(entries.to_vec())
    }

    #[test]
    fn variety_of_exponential_is_one_dimensional() {
        let hg = Hypergroup::chebyshev(1);
        let m = HFunction::exponential(hg.clone(), vec![q(2, 5)]);
        let v = variety_basis(&m, default_box(&m)).unwrap();
        assert_eq!(v.dim(), 1);
        assert!(v.stable());
    }

    #[test]
    fn variety_of_first_order_member_is_two_dimensional() {
        let hg = Hypergroup::chebyshev(1);
        let fam = MomentFamily::new(hg.clone(), vec![q(3, 7)], mi(&[1]));
        let f = fam.member(&mi(&[1])).unwrap();
        let v = variety_basis(f, default_box(f)).unwrap();
        assert_eq!(v.dim(), 2);
        // the exponential and the sine both lie inside
        assert!(v.contains(fam.exponential()).unwrap().is_some());
        let s = HFunction::sine(hg.clone(), &[q(1, 1)], vec![q(3, 7)]);
        assert!(v.contains(&s).unwrap().is_some());
    }

    #[test]
    fn variety_of_mixed_member_in_two_dims_has_dim_four() {
        let hg = Hypergroup::chebyshev(2);
        let fam = MomentFamily::new(hg.clone(), vec![q(1, 3), q(2, 7)], mi(&[1, 1]));
        let f = fam.member(&mi(&[1, 1])).unwrap();
        let v = variety_basis(f, default_box(f)).unwrap();
        assert_eq!(v.dim(), 4);
        for (_, member) in fam.members() {
            assert!(v.contains(member).unwrap().is_some());
        }
    }

    #[test]
    fn sampled_fallback_on_tiny_box_agrees() {
        // a box below the determination caps forces the literal route
        let hg = Hypergroup::chebyshev(1);
        let fam = MomentFamily::new(hg.clone(), vec![q(3, 7)], mi(&[1]));
        let f = fam.member(&mi(&[1])).unwrap();
        let v = variety_basis(f, 2).unwrap();
        assert_eq!(v.dim(), 2);
        assert!(v.contains(fam.exponential()).unwrap().is_some());
        let foreign = HFunction::exponential(hg.clone(), vec![q(1, 9)]);
        assert!(v.contains(&foreign).unwrap().is_none());
    }

    #[test]
    fn contains_rejects_outsiders() {
        let hg = Hypergroup::chebyshev(1);
        let m = HFunction::exponential(hg.clone(), vec![q(2, 5)]);
        let v = variety_basis(&m, default_box(&m)).unwrap();
        let s = HFunction::sine(hg.clone(), &[q(1, 1)], vec![q(2, 5)]);
        assert!(v.contains(&s).unwrap().is_none());
        let other = HFunction::exponential(hg.clone(), vec![q(1, 5)]);
        assert!(v.contains(&other).unwrap().is_none());
    }

    #[test]
    fn membership_coefficients_reconstruct_the_function() {
        let hg = Hypergroup::chebyshev(2);
        let fam = MomentFamily::new(hg.clone(), vec![q(1, 3), q(2, 7)], mi(&[1, 1]));
        let f = fam.member(&mi(&[1, 1])).unwrap();
        let v = variety_basis(f, default_box(f)).unwrap();
        let g = fam.member(&mi(&[1, 0])).unwrap();
        let coeffs = v.contains(g).unwrap().unwrap();
        let mut rebuilt = HFunction::zero(hg.clone());
        for (c, b) in coeffs.iter().zip(v.basis()) {
            rebuilt = &rebuilt + &b.scale(c);
        }
        assert_eq!(&rebuilt, g);
    }

    #[test]
    fn sine_dimension_matches_ambient_dimension() {
        // d = 1: one sine direction; d = 2: two of them
        let hg1 = Hypergroup::chebyshev(1);
        let fam1 = MomentFamily::new(hg1.clone(), vec![q(2, 9)], mi(&[1]));
        let f1 = fam1.member(&mi(&[1])).unwrap();
        let v1 = variety_basis(f1, default_box(f1)).unwrap();
        assert_eq!(v1.sine_dimension(fam1.exponential()).unwrap(), 1);

        let hg2 = Hypergroup::chebyshev(2);
        let fam2 = MomentFamily::new(hg2.clone(), vec![q(1, 2), q(1, 5)], mi(&[1, 1]));
        let f2 = fam2.member(&mi(&[1, 1])).unwrap();
        let v2 = variety_basis(f2, default_box(f2)).unwrap();
        assert_eq!(v2.sine_dimension(fam2.exponential()).unwrap(), 2);
    }

    #[test]
    fn sine_dimension_of_second_order_line_variety_is_one() {
        // τ(f_(2)) on the line: dim 3, but only one sine direction
        let hg = Hypergroup::chebyshev(1);
        let fam = MomentFamily::new(hg.clone(), vec![q(5, 8)], mi(&[2]));
        let f = fam.member(&mi(&[2])).unwrap();
        let v = variety_basis(f, default_box(f)).unwrap();
        assert_eq!(v.dim(), 3);
        assert_eq!(v.sine_dimension(fam.exponential()).unwrap(), 1);
    }

    #[test]
    fn sine_dimension_is_three_in_three_dims() {
        let hg = Hypergroup::chebyshev(3);
        let point = vec![q(1, 2), q(2, 5), q(-3, 7)];
        let fam = MomentFamily::new(hg.clone(), point, mi(&[1, 1, 1]));
        let f = fam.member(&mi(&[1, 1, 1])).unwrap();
        let v = variety_basis(f, default_box(f)).unwrap();
        assert_eq!(v.dim(), 8);
        assert_eq!(v.sine_dimension(fam.exponential()).unwrap(), 3);
    }

    #[test]
    fn variety_dimension_is_product_of_order_ranges() {
        // dim τ(f_α) = Π(α_i + 1) for the members with entries ≤ 2
        let hg = Hypergroup::chebyshev(2);
        let point = vec![q(4, 9), q(-2, 11)];
        let fam = MomentFamily::new(hg.clone(), point, mi(&[2, 2]));
        for (alpha, member) in fam.members() {
            let v = variety_basis(member, default_box(member)).unwrap();
            let expected: u32 = alpha.entries().iter().map(|a| a + 1).product();
            assert_eq!(v.dim(), expected as usize, "α = {alpha}");
        }
    }

    #[test]
    fn sine_dimension_of_exponential_variety_is_zero() {
        let hg = Hypergroup::chebyshev(1);
        let m = HFunction::exponential(hg.clone(), vec![q(1, 4)]);
        let v = variety_basis(&m, default_box(&m)).unwrap();
        assert_eq!(v.sine_dimension(&m).unwrap(), 0);
    }

    #[test]
    fn sine_dimension_requires_membership() {
        let hg = Hypergroup::chebyshev(1);
        let m = HFunction::exponential(hg.clone(), vec![q(1, 4)]);
        let v = variety_basis(&m, default_box(&m)).unwrap();
        let foreign = HFunction::exponential(hg.clone(), vec![q(1, 5)]);
        assert_eq!(v.sine_dimension(&foreign).unwrap_err(), Error::NotInVariety);
    }

    #[test]
    fn decompose_recovers_pdo_coefficients() {
        let hg = Hypergroup::chebyshev(2);
        let lambda = vec![q(2, 7), q(-3, 5)];
        let mut p = MultiPoly::zero(2);
        p.add_term(mi(&[0, 0]), q(5, 1));
        p.add_term(mi(&[1, 1]), q(-2, 3));
        p.add_term(mi(&[2, 0]), q(7, 4));
        let f = crate::functions::apply_pdo(&p, &lambda, &hg);
        let (dec, v) = moment_span_decompose(&f, default_box(&f)).unwrap();
        assert!(dec.residual.is_zero());
        assert!(dec.unique);
        assert!(v.stable());
        for (atom, coeff) in dec.atoms.iter().zip(&dec.coefficients) {
            assert_eq!(*coeff, p.coeff(&atom.0), "atom {}", atom.0);
        }
        // every monomial of p appears among the atoms
        for (alpha, _) in p.terms() {
            assert!(dec.atoms.iter().any(|(a, _)| a == alpha));
        }
    }

    #[test]
    fn locked_ratio_members_are_outside_the_variety() {
        // translates carry f_11 and f_20 only in the ratio -2/3 : 7/4, so
        // neither member alone lies in τ(f) and the full-downset fallback
        // must kick in
        let hg = Hypergroup::chebyshev(2);
        let lambda = vec![q(2, 7), q(-3, 5)];
        let mut p = MultiPoly::zero(2);
        p.add_term(mi(&[1, 1]), q(-2, 3));
        p.add_term(mi(&[2, 0]), q(7, 4));
        let f = crate::functions::apply_pdo(&p, &lambda, &hg);
        let v = variety_basis(&f, default_box(&f)).unwrap();
        let fam = MomentFamily::new(hg.clone(), lambda.clone(), f.order_cap());
        assert!(v
            .contains(fam.member(&mi(&[1, 1])).unwrap())
            .unwrap()
            .is_none());
        assert!(v
            .contains(fam.member(&mi(&[2, 0])).unwrap())
            .unwrap()
            .is_none());
        assert!(v.contains(&f).unwrap().is_some());
    }

    #[test]
    fn decompose_exponential_is_single_atom() {
        let hg = Hypergroup::chebyshev(1);
        let m = HFunction::exponential(hg.clone(), vec![q(4, 11)]);
        let (dec, _) = moment_span_decompose(&m, default_box(&m)).unwrap();
        assert_eq!(dec.atoms.len(), 1);
        assert!(dec.coefficients[0].is_one());
        assert!(dec.residual.is_zero());
    }

    #[test]
    fn decompose_sine_recovers_directions() {
        let hg = Hypergroup::chebyshev(2);
        let lambda = vec![q(1, 2), q(2, 5)];
        let s = HFunction::sine(hg.clone(), &[q(3, 1), q(-5, 1)], lambda.clone());
        let (dec, _) = moment_span_decompose(&s, default_box(&s)).unwrap();
        assert!(dec.residual.is_zero());
        let coeff_of = |alpha: &MultiIndex| -> Scalar {
            dec.atoms
                .iter()
                .zip(&dec.coefficients)
                .find(|((a, _), _)| a == alpha)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(Scalar::zero)
        };
        assert_eq!(coeff_of(&mi(&[1, 0])), q(3, 1));
        assert_eq!(coeff_of(&mi(&[0, 1])), q(-5, 1));
    }

    #[test]
    fn exponentials_in_variety_finds_exactly_the_generator() {
        let hg = Hypergroup::chebyshev(2);
        let lambda = vec![q(1, 3), q(1, 6)];
        let fam = MomentFamily::new(hg.clone(), lambda.clone(), mi(&[1, 1]));
        let f = fam.member(&mi(&[1, 1])).unwrap();
        let v = variety_basis(f, default_box(f)).unwrap();
        let mut candidates = vec![lambda.clone()];
        for k in 0..5i64 {
            candidates.push(vec![q(2 + k, 7), q(-1 - k, 9)]);
        }
        let found = v.exponentials_in(&candidates).unwrap();
        assert_eq!(found, vec![lambda]);
    }

    #[test]
    fn sum_of_two_exponentials_contains_both() {
        let hg = Hypergroup::chebyshev(1);
        let l1 = vec![q(1, 2)];
        let l2 = vec![q(1, 3)];
        let m1 = HFunction::exponential(hg.clone(), l1.clone());
        let m2 = HFunction::exponential(hg.clone(), l2.clone());
        let f = &m1 + &m2;
        let v = variety_basis(&f, default_box(&f)).unwrap();
        assert_eq!(v.dim(), 2);
        let found = v
            .exponentials_in(&[l1.clone(), l2.clone(), vec![q(1, 4)]])
            .unwrap();
        assert_eq!(found, vec![l1, l2]);
    }
}
