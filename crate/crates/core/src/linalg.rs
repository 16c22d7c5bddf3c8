//! Exact rational linear algebra: incremental reduced row echelon with
//! combination tracking, span membership, and null spaces.
//!
//! Everything here requires exact scalars; the synthesis and verification
//! code never feeds it floats.

use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::Scalar;

/// Incremental RREF over rows of a fixed width.
///
/// Accepted rows (those that increased the rank) are remembered as the
/// "original" generators; every echelon row carries its expression in terms
/// of them, so span membership comes back with explicit coefficients.
pub struct Echelon {
    width: usize,
    rows: Vec<Vec<Scalar>>,
    combos: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(width: usize) -> Self {
        Echelon {
            width,
            rows: Vec::new(),
            combos: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Reduces `row` against the current echelon. Returns the residual and
    /// the coefficients over the accepted originals that were subtracted.
    fn reduce(&self, mut row: Vec<Scalar>) -> (Vec<Scalar>, Vec<Scalar>) {
        let mut combo = vec![Scalar::zero(); self.rank()];
        for (r, pivot_col) in self.pivots.iter().enumerate() {
            let factor = row[*pivot_col].clone();
            if factor.is_zero() {
                continue;
            }
            for (dst, src) in row.iter_mut().zip(&self.rows[r]) {
                if !src.is_zero() {
                    *dst = &*dst - &(&factor * src);
                }
            }
            for (acc, base) in combo.iter_mut().zip(&self.combos[r]) {
                *acc = &*acc + &(&factor * base);
            }
        }
        (row, combo)
    }

    /// Inserts a row; returns `true` if it was independent of the span so
    /// far (and is now counted among the original generators).
    pub fn insert(&mut self, row: Vec<Scalar>) -> bool {
        assert_eq!(row.len(), self.width, "row width mismatch");
        debug_assert!(
            row.iter().all(Scalar::is_exact),
            "echelon needs exact scalars"
        );
        let (mut row, combo) = self.reduce(row);
        let Some(pivot_col) = row.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        // normalize the pivot to 1
        let pivot = row[pivot_col].clone();
        for c in row.iter_mut() {
            if !c.is_zero() {
                *c = &*c / &pivot;
            }
        }
        // the new row = (original - Σ combo_j · orig_j) / pivot
        let mut own_combo: Vec<Scalar> = combo.iter().map(|c| &(-c) / &pivot).collect();
        own_combo.push(&Scalar::one() / &pivot);
        for existing in self.combos.iter_mut() {
            existing.push(Scalar::zero());
        }
        // back-substitute so every stored row is zero at this pivot
        for (stored, combo_row) in self.rows.iter_mut().zip(&mut self.combos) {
            let factor = stored[pivot_col].clone();
            if factor.is_zero() {
                continue;
            }
            for (dst, src) in stored.iter_mut().zip(&row) {
                if !src.is_zero() {
                    *dst = &*dst - &(&factor * src);
                }
            }
            for (acc, base) in combo_row.iter_mut().zip(&own_combo) {
                *acc = &*acc - &(&factor * base);
            }
        }
        self.rows.push(row);
        self.combos.push(own_combo);
        self.pivots.push(pivot_col);
        true
    }

    /// Coefficients over the accepted originals if `row` lies in their span.
    pub fn express(&self, row: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(row.len(), self.width, "row width mismatch");
        let (residual, combo) = self.reduce(row.to_vec());
        if residual.iter().all(Scalar::is_zero) {
            Some(combo)
        } else {
            None
        }
    }
}

/// Rank of a dense exact matrix.
pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut ech = Echelon::new(first.len());
    for row in rows {
        ech.insert(row.clone());
    }
    ech.rank()
}

/// Basis of `{t : M t = 0}` for the constraint matrix `M` given by rows of
/// width `unknowns`. Free variables are set to 1 one at a time, in column
/// order, which makes the result deterministic.
pub fn null_space(rows: &[Vec<Scalar>], unknowns: usize) -> Vec<Vec<Scalar>> {
    let mut ech = Echelon::new(unknowns);
    for row in rows {
        ech.insert(row.clone());
    }
    null_space_of(&ech)
}

/// Null-space basis read off an already-built constraint echelon.
pub fn null_space_of(ech: &Echelon) -> Vec<Vec<Scalar>> {
    let unknowns = ech.width;
    let mut is_pivot = vec![false; unknowns];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in 0..unknowns {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![Scalar::zero(); unknowns];
        v[free] = Scalar::one();
        for (r, &p) in ech.pivots.iter().enumerate() {
            v[p] = -&ech.rows[r][free];
        }
        basis.push(v);
    }
    basis
}
