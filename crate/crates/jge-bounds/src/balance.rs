//! Column-scale balancing of CPD factors.
//!
//! A CPD is invariant under `(A D, B D^-1, C)` for diagonal invertible
//! `D`, but the certificate quantity `sigma_min(A) * sigma_min(B)` is
//! not. The default balance equalizes the column norms of `A` and `B`;
//! the alternating mode climbs the objective
//! `sigma_min(A D) * sigma_min(B D^-1)` one diagonal entry at a time.

use nalgebra::DMatrix;
use tensor_core::{min_singular_value, FactorTriple};

use crate::BoundsError;

/// How to distribute column scales between `A` and `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceMode {
    /// Equalize the norms of corresponding `A` and `B` columns.
    ColumnNorm,
    /// Coordinate ascent on `sigma_min(A D) * sigma_min(B D^-1)`,
    /// started from the column-norm balance.
    Alternating,
}

/// Stop the alternating mode at this relative objective improvement.
const ALS_TOL: f64 = 1e-6;
/// Maximum alternating sweeps over the diagonal entries.
const ALS_SWEEPS: usize = 100;

/// Rebalance the `A` and `B` columns of a CPD without changing the
/// tensor it represents (`C` is untouched).
pub fn balance_factors(f: &FactorTriple, mode: BalanceMode) -> Result<FactorTriple, BoundsError> {
    let r = f.rank();
    for col in 0..r {
        if f.a.column(col).norm() == 0.0 || f.b.column(col).norm() == 0.0 {
            return Err(BoundsError::InvalidArgument(format!(
                "column {col} of A or B is zero; the scale split is undefined"
            )));
        }
    }

    // Column-norm balance: move scale so |a_r| = |b_r| per column.
    let mut a = f.a.clone();
    let mut b = f.b.clone();
    for col in 0..r {
        let (na, nb) = (a.column(col).norm(), b.column(col).norm());
        let d = (nb / na).sqrt();
        let mut ca = a.column_mut(col);
        ca *= d;
        let mut cb = b.column_mut(col);
        cb /= d;
    }

    if mode == BalanceMode::Alternating {
        let mut best = objective(&a, &b);
        for _ in 0..ALS_SWEEPS {
            let sweep_start = best;
            for col in 0..r {
                let (scale, value) = line_search(&a, &b, col, best);
                if value > best {
                    let mut ca = a.column_mut(col);
                    ca *= scale;
                    let mut cb = b.column_mut(col);
                    cb /= scale;
                    best = value;
                }
            }
            if best - sweep_start <= ALS_TOL * sweep_start.max(1e-300) {
                break;
            }
        }
    }

    Ok(FactorTriple::new(a, b, f.c.clone())?)
}

fn objective(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    min_singular_value(a) * min_singular_value(b)
}

/// Golden-section search over the log-scale of one column, returning the
/// best multiplicative factor and the objective it achieves.
fn line_search(a: &DMatrix<f64>, b: &DMatrix<f64>, col: usize, current: f64) -> (f64, f64) {
    let eval = |log_s: f64| -> f64 {
        let s = log_s.exp();
        let mut at = a.clone();
        let mut bt = b.clone();
        let mut ca = at.column_mut(col);
        ca *= s;
        let mut cb = bt.column_mut(col);
        cb /= s;
        objective(&at, &bt)
    };

    // Bracket on a coarse grid, then refine by golden section.
    let mut best_log = 0.0;
    let mut best_val = current;
    for i in -6..=6 {
        let log_s = i as f64 * 0.5;
        let v = eval(log_s);
        if v > best_val {
            best_val = v;
            best_log = log_s;
        }
    }
    let (mut lo, mut hi) = (best_log - 0.5, best_log + 0.5);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    for _ in 0..40 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = eval(x2);
        }
    }
    let (log_s, val) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if val > best_val {
        (log_s.exp(), val)
    } else {
        (best_log.exp(), best_val)
    }
}
