//! Valid inequalities for a player's integer points: knapsack covers on
//! rows over binaries, and Gomory mixed-integer cuts from an optimal
//! simplex tableau.

use crate::error::Result;
use crate::lp::{solve_lp_with_tableau, ColumnState, FinalTableau, LpStatus, PlayerProgram};
use crate::numerics::dot;
use crate::poly::Polyhedron;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutKind {
    Cover,
    Gomory,
}

/// `row · x ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub row: Vec<f64>,
    pub rhs: f64,
    pub kind: CutKind,
}

impl Cut {
    pub fn violation(&self, x: &[f64]) -> f64 {
        dot(&self.row, x) - self.rhs
    }

    /// Scales so the largest coefficient has magnitude one.
    fn normalized(mut self) -> Option<Cut> {
        let big = self.row.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if big <= 1e-12 || !big.is_finite() || !self.rhs.is_finite() {
            return None;
        }
        for v in &mut self.row {
            *v /= big;
            if v.abs() < 1e-12 {
                *v = 0.0;
            }
        }
        self.rhs /= big;
        Some(self)
    }
}

const EXACT_COVER_LIMIT: usize = 16;

fn is_binary(p: &PlayerProgram, j: usize) -> bool {
    p.is_integer(j) && p.lower()[j] == 0.0 && p.upper()[j] == 1.0
}

/// Most violated cover inequality of the rows of `A x ≤ b` whose nonzeros
/// are all on binary variables. Negative coefficients are handled by
/// complementing the variable.
pub fn cover_cuts(p: &PlayerProgram, sigma: &[f64], min_violation: f64) -> Vec<Cut> {
    let a = p.constraints().to_dense();
    let mut out = Vec::new();
    for (row, &b) in a.rows().zip(p.rhs()) {
        let support: Vec<usize> = (0..row.len()).filter(|&j| row[j] != 0.0).collect();
        if support.is_empty() || !support.iter().all(|&j| is_binary(p, j)) {
            continue;
        }
        // y_j = x_j for a_j > 0, y_j = 1 − x_j otherwise; Σ |a_j| y_j ≤ b'
        let mut cap = b;
        let weights: Vec<f64> = support.iter().map(|&j| row[j].abs()).collect();
        let y: Vec<f64> = support
            .iter()
            .map(|&j| {
                if row[j] > 0.0 {
                    sigma[j]
                } else {
                    cap -= row[j];
                    1.0 - sigma[j]
                }
            })
            .collect();
        if weights.iter().sum::<f64>() <= cap + 1e-9 {
            continue;
        }
        let Some(cover) = best_cover(&weights, &y, cap) else {
            continue;
        };
        let mut cut_row = vec![0.0; p.num_vars()];
        let mut rhs = cover.len() as f64 - 1.0;
        for &k in &cover {
            let j = support[k];
            if row[j] > 0.0 {
                cut_row[j] = 1.0;
            } else {
                cut_row[j] = -1.0;
                rhs -= 1.0;
            }
        }
        let cut = Cut {
            row: cut_row,
            rhs,
            kind: CutKind::Cover,
        };
        if cut.violation(sigma) >= min_violation {
            out.push(cut);
        }
    }
    out
}

/// Cover `K` (`Σ_K w > cap`) minimizing `Σ_K (1 − y_k)`, then made minimal.
fn best_cover(w: &[f64], y: &[f64], cap: f64) -> Option<Vec<usize>> {
    let m = w.len();
    let cost = |k: usize| (1.0 - y[k]).max(0.0);
    let mut best: Option<(f64, Vec<usize>)> = None;
    if m <= EXACT_COVER_LIMIT {
        for mask in 1u32..(1 << m) {
            let members: Vec<usize> = (0..m).filter(|k| mask >> k & 1 == 1).collect();
            let weight: f64 = members.iter().map(|&k| w[k]).sum();
            if weight <= cap + 1e-9 {
                continue;
            }
            let c: f64 = members.iter().map(|&k| cost(k)).sum();
            if best.as_ref().is_none_or(|(bc, bm)| {
                c < bc - 1e-12 || (c <= bc + 1e-12 && members.len() < bm.len())
            }) {
                best = Some((c, members));
            }
        }
    } else {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            (cost(a) / w[a])
                .total_cmp(&(cost(b) / w[b]))
                .then(a.cmp(&b))
        });
        let mut members = Vec::new();
        let mut weight = 0.0;
        for k in order {
            members.push(k);
            weight += w[k];
            if weight > cap + 1e-9 {
                break;
            }
        }
        if weight > cap + 1e-9 {
            let c = members.iter().map(|&k| cost(k)).sum();
            best = Some((c, members));
        }
    }
    let (_, mut members) = best?;
    // drop members while the rest still covers, most costly first
    members.sort_by(|&a, &b| cost(b).total_cmp(&cost(a)).then(a.cmp(&b)));
    let mut i = 0;
    while i < members.len() {
        let rest: f64 = members
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, &k)| w[k])
            .sum();
        if rest > cap + 1e-9 {
            members.remove(i);
        } else {
            i += 1;
        }
    }
    members.sort_unstable();
    Some(members)
}

fn frac(v: f64) -> f64 {
    v - v.floor()
}

fn near_integer(v: f64) -> bool {
    (v - v.round()).abs() <= 1e-9
}

/// Gomory mixed-integer cuts read off the optimal tableau of
/// `min objective · x` over `region`. Valid for every point of `region`
/// whose `integers` coordinates are integral.
pub fn gomory_cuts(
    region: &Polyhedron,
    integers: &[usize],
    objective: &[f64],
    sigma: &[f64],
    min_violation: f64,
) -> Result<Vec<Cut>> {
    let lp = region.linear_program(objective.to_vec())?;
    let (res, tab) = solve_lp_with_tableau(&lp)?;
    let (LpStatus::Optimal, Some(tab)) = (res.status, tab) else {
        return Ok(Vec::new());
    };
    let n = region.dim();
    let mut int_col = vec![false; n + region.num_rows()];
    for &j in integers {
        int_col[j] = true;
    }
    // a slack is integral when its row is integral over integer columns
    for (i, (row, &bi)) in region.a().rows().zip(region.b()).enumerate() {
        int_col[n + i] = near_integer(bi)
            && row
                .iter()
                .enumerate()
                .all(|(j, &v)| v == 0.0 || (int_col[j] && near_integer(v)));
    }
    let mut out = Vec::new();
    for r in 0..tab.basic.len() {
        let bj = tab.basic[r];
        if bj >= n || !int_col[bj] {
            continue;
        }
        let f0 = frac(tab.basic_values[r]);
        if !(1e-6..=1.0 - 1e-6).contains(&f0) {
            continue;
        }
        if let Some(cut) = gmi_row(&tab, region, &int_col, r, f0) {
            if cut.violation(sigma) >= min_violation {
                out.push(cut);
            }
        }
    }
    Ok(out)
}

fn gmi_row(
    tab: &FinalTableau,
    region: &Polyhedron,
    int_col: &[bool],
    r: usize,
    f0: f64,
) -> Option<Cut> {
    let n = tab.num_structural;
    // Σ_j g_j t_j ≥ 1 over nonbasic t_j ≥ 0
    let mut x_row = vec![0.0; n];
    let mut rhs = 1.0;
    let add_structural = |j: usize, coef: f64, x_row: &mut Vec<f64>, rhs: &mut f64| {
        // t = x − l  or  t = u − x
        match tab.states[j] {
            ColumnState::AtLower => {
                x_row[j] += coef;
                *rhs += coef * tab.lower[j];
            }
            _ => {
                x_row[j] -= coef;
                *rhs -= coef * tab.upper[j];
            }
        }
    };
    for (j, &a) in tab.rows.row(r).iter().enumerate() {
        let state = tab.states[j];
        if state == ColumnState::Basic || a.abs() < 1e-12 {
            continue;
        }
        if tab.lower[j] == tab.upper[j] {
            continue;
        }
        let abar = match state {
            ColumnState::AtLower => a,
            ColumnState::AtUpper => -a,
            ColumnState::FreeZero | ColumnState::Basic => return None,
        };
        let bound = if state == ColumnState::AtLower {
            tab.lower[j]
        } else {
            tab.upper[j]
        };
        let coef = if int_col[j] && near_integer(bound) {
            let fj = frac(abar);
            if fj <= f0 {
                fj / f0
            } else {
                (1.0 - fj) / (1.0 - f0)
            }
        } else if abar >= 0.0 {
            abar / f0
        } else {
            -abar / (1.0 - f0)
        };
        if coef == 0.0 {
            continue;
        }
        if j < n {
            add_structural(j, coef, &mut x_row, &mut rhs);
        } else {
            // slack s_i = b_i − a_i·x, nonbasic at its lower bound 0
            let i = j - n;
            if state != ColumnState::AtLower {
                return None;
            }
            for (xr, av) in x_row.iter_mut().zip(region.a().row(i)) {
                *xr -= coef * av;
            }
            rhs -= coef * region.b()[i];
        }
    }
    // x_row · x ≥ rhs  ⇔  −x_row · x ≤ −rhs
    let cut = Cut {
        row: x_row.into_iter().map(|v| -v).collect(),
        rhs: -rhs,
        kind: CutKind::Gomory,
    }
    .normalized()?;
    let small = cut
        .row
        .iter()
        .filter(|v| **v != 0.0)
        .fold(f64::INFINITY, |a, v| a.min(v.abs()));
    (small >= 1e-6).then_some(cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{canonical_knapsack_game, random_knapsack_program, CapacityRule};
    use crate::numerics::seeded_rng;

    fn binary_points(p: &PlayerProgram) -> Vec<Vec<f64>> {
        let m = p.num_vars();
        (0u32..1 << m)
            .map(|mask| (0..m).map(|j| f64::from(mask >> j & 1)).collect::<Vec<_>>())
            .filter(|x| p.is_feasible(x, 1e-9))
            .collect()
    }

    #[test]
    fn blue_cover_separates_half_point() {
        let g = canonical_knapsack_game();
        let blue = g.player(0);
        let cuts = cover_cuts(blue, &[1.0, 0.5], 1e-7);
        assert_eq!(
            cuts,
            vec![Cut {
                row: vec![1.0, 1.0],
                rhs: 1.0,
                kind: CutKind::Cover
            }]
        );
        assert!((cuts[0].violation(&[1.0, 0.5]) - 0.5).abs() < 1e-12);
        assert!(cuts[0].violation(&[0.0, 1.0]) <= 0.0);
        assert!(cover_cuts(blue, &[0.0, 1.0], 1e-7).is_empty());
    }

    #[test]
    fn covers_are_valid_and_violated() {
        let mut rng = seeded_rng(11);
        for _ in 0..200 {
            let p = random_knapsack_program(&mut rng, "p", 5, 0, 9, CapacityRule::HalfSum);
            let lp = p.relaxation();
            let sigma = lp.minimize(p.cost()).unwrap().x;
            for cut in cover_cuts(&p, &sigma, 1e-7) {
                assert!(cut.violation(&sigma) >= 1e-7);
                for z in binary_points(&p) {
                    assert!(cut.violation(&z) <= 1e-9, "{cut:?} cuts off {z:?}");
                }
            }
        }
    }

    #[test]
    fn gomory_cuts_are_valid_and_violated() {
        let mut rng = seeded_rng(5);
        let mut produced = 0;
        for _ in 0..200 {
            let p = random_knapsack_program(&mut rng, "p", 4, 0, 9, CapacityRule::HalfSum);
            let region = p.relaxation();
            let sol = region.minimize(p.cost()).unwrap();
            let cuts = gomory_cuts(&region, p.integers(), p.cost(), &sol.x, 1e-7).unwrap();
            produced += cuts.len();
            for cut in cuts {
                assert!(cut.violation(&sol.x) >= 1e-7);
                for z in binary_points(&p) {
                    assert!(cut.violation(&z) <= 1e-7, "{cut:?} cuts off {z:?}");
                }
            }
        }
        assert!(produced > 0);
    }

    #[test]
    fn gomory_after_cover_round() {
        // fractional vertex of the blue relaxation with its cover added
        let g = canonical_knapsack_game();
        let blue = g.player(0);
        let region = blue.relaxation().with_row(&[1.0, 1.0], 1.0).unwrap();
        let obj = [-1.0, -1.5];
        let sol = region.minimize(&obj).unwrap();
        assert!(sol.x.iter().all(|v| (v - v.round()).abs() < 1e-9));
        let cuts = gomory_cuts(&region, blue.integers(), &obj, &sol.x, 1e-7).unwrap();
        assert!(cuts.is_empty());
    }
}
