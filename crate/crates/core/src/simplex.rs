//! Exact two-phase simplex over `BigRational` for systems `A x = b, x >= 0`.
//!
//! Dense tableau with Bland's rule, so it terminates on degenerate systems.
//! Phase one either finds a basic feasible solution or returns a Farkas
//! certificate `y` with `y^T A <= 0` and `y^T b > 0`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseOne {
    Feasible(Tableau),
    /// Multipliers over the original rows proving infeasibility.
    Infeasible(Vec<BigRational>),
}

/// A feasible basis for `A x = b, x >= 0` with redundant rows removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Tableau {
    columns: usize,
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
}

pub fn phase_one(a: &[Vec<BigRational>], b: &[BigRational]) -> PhaseOne {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + m;
    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (row, value)) in a.iter().zip(b).enumerate() {
        let flip = value.is_negative();
        signs.push(flip);
        let mut t: Vec<BigRational> = row
            .iter()
            .map(|x| if flip { -x } else { x.clone() })
            .collect();
        t.resize(width, BigRational::zero());
        t[n + i] = BigRational::one();
        rows.push(t);
        rhs.push(if flip { -value } else { value.clone() });
    }
    let mut tableau = Tableau {
        columns: width,
        rows,
        rhs,
        basis: (n..n + m).collect(),
    };
    let cost: Vec<BigRational> = (0..width)
        .map(|j| {
            if j < n {
                BigRational::zero()
            } else {
                BigRational::one()
            }
        })
        .collect();
    tableau
        .minimize(&cost, width)
        .expect("phase one objective is bounded below by zero");

    let objective: BigRational = tableau
        .basis
        .iter()
        .zip(&tableau.rhs)
        .filter(|(j, _)| **j >= n)
        .map(|(_, v)| v.clone())
        .sum();
    if objective.is_positive() {
        // y = c_B B^{-1}; B^{-1} sits in the artificial columns.
        let y: Vec<BigRational> = (0..m)
            .map(|i| {
                let mut yi = BigRational::zero();
                for (r, &j) in tableau.basis.iter().enumerate() {
                    if j >= n {
                        yi += &tableau.rows[r][n + i];
                    }
                }
                if signs[i] {
                    -yi
                } else {
                    yi
                }
            })
            .collect();
        return PhaseOne::Infeasible(y);
    }

    // Drive artificial variables (all at level zero) out of the basis; rows
    // where that is impossible are linear combinations of the others.
    let mut r = 0;
    while r < tableau.rows.len() {
        if tableau.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| !tableau.rows[r][j].is_zero()) {
                tableau.pivot(r, j);
            } else {
                tableau.rows.remove(r);
                tableau.rhs.remove(r);
                tableau.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }
    for row in &mut tableau.rows {
        row.truncate(n);
    }
    tableau.columns = n;
    PhaseOne::Feasible(tableau)
}

impl Tableau {
    /// Values of all variables at the current basis.
    pub fn solution(&self) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); self.columns];
        for (r, &j) in self.basis.iter().enumerate() {
            x[j] = self.rhs[r].clone();
        }
        x
    }

    /// Maximizes `objective . x` from the current basis, leaving the tableau
    /// at an optimal vertex.
    pub fn maximize(&mut self, objective: &[BigRational]) -> Result<BigRational> {
        let cost: Vec<BigRational> = objective.iter().map(|c| -c).collect();
        self.minimize(&cost, self.columns)?;
        Ok(self.value(objective))
    }

    fn value(&self, objective: &[BigRational]) -> BigRational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&j, v)| &objective[j] * v)
            .sum()
    }

    fn minimize(&mut self, cost: &[BigRational], entering_limit: usize) -> Result<()> {
        loop {
            // Bland: smallest-index column with negative reduced cost.
            let entering = (0..entering_limit).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut reduced = cost[j].clone();
                for (r, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[r][j].is_zero() {
                        reduced -= &cost[b] * &self.rows[r][j];
                    }
                }
                reduced.is_negative()
            });
            let Some(j) = entering else { return Ok(()) };

            let mut leaving: Option<(usize, BigRational)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][j].is_positive() {
                    let ratio = &self.rhs[r] / &self.rows[r][j];
                    let better = match &leaving {
                        None => true,
                        Some((best_r, best)) => {
                            ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r])
                        }
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leaving else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, j);
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let inv = self.rows[r][j].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][j].is_zero() {
                continue;
            }
            let factor = self.rows[i][j].clone();
            for (x, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        self.basis[r] = j;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn rows(data: &[&[i64]]) -> Vec<Vec<BigRational>> {
        data.iter()
            .map(|r| r.iter().map(|x| int(*x)).collect())
            .collect()
    }

    #[test]
    fn feasible_two_by_two() {
        let a = rows(&[&[1, 0], &[0, 1], &[1, 1]]);
        let b = vec![rat(1, 3), rat(2, 3), int(1)];
        let PhaseOne::Feasible(t) = phase_one(&a, &b) else {
            panic!("expected feasible")
        };
        assert_eq!(t.solution(), vec![rat(1, 3), rat(2, 3)]);
    }

    #[test]
    fn infeasible_with_certificate() {
        // x0 + x1 = 1 and x0 + x1 = 2
        let a = rows(&[&[1, 1], &[1, 1]]);
        let b = vec![int(1), int(2)];
        let PhaseOne::Infeasible(y) = phase_one(&a, &b) else {
            panic!("expected infeasible")
        };
        for j in 0..2 {
            let col: BigRational = (0..2).map(|i| &y[i] * &a[i][j]).sum();
            assert!(!col.is_positive());
        }
        let yb: BigRational = y.iter().zip(&b).map(|(y, b)| y * b).sum();
        assert!(yb.is_positive());
    }

    #[test]
    fn negative_rhs_needs_negative_variable() {
        let a = rows(&[&[1, 1]]);
        let b = vec![int(-1)];
        let PhaseOne::Infeasible(y) = phase_one(&a, &b) else {
            panic!("expected infeasible")
        };
        assert!((&y[0] * &b[0]).is_positive());
        assert!(!(&y[0] * &a[0][0]).is_positive());
    }

    #[test]
    fn maximize_over_simplex() {
        // x0 + x1 + x2 = 1, x0 - x1 = 0: max x2 = 1, max x0 = 1/2
        let a = rows(&[&[1, 1, 1], &[1, -1, 0]]);
        let b = vec![int(1), int(0)];
        let PhaseOne::Feasible(t) = phase_one(&a, &b) else {
            panic!()
        };
        let mut t2 = t.clone();
        assert_eq!(t2.maximize(&[int(0), int(0), int(1)]).unwrap(), int(1));
        let mut t0 = t;
        assert_eq!(t0.maximize(&[int(1), int(0), int(0)]).unwrap(), rat(1, 2));
        assert_eq!(t0.solution(), vec![rat(1, 2), rat(1, 2), int(0)]);
    }

    #[test]
    fn redundant_rows_removed() {
        let a = rows(&[&[1, 1], &[1, 1], &[2, 2], &[0, 0]]);
        let b = vec![int(1), int(1), int(2), int(0)];
        let PhaseOne::Feasible(t) = phase_one(&a, &b) else {
            panic!()
        };
        assert_eq!(t.basis.len(), 1);
    }

    #[test]
    fn unbounded_detected() {
        let a = rows(&[&[1, -1]]);
        let b = vec![int(0)];
        let PhaseOne::Feasible(mut t) = phase_one(&a, &b) else {
            panic!()
        };
        assert_eq!(t.maximize(&[int(1), int(0)]), Err(Error::Unbounded));
    }
}
