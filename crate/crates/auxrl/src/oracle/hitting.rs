/// Expected steps to reach a target set in a Markov chain, one value per
/// state. `rows[s]` is the chain's outgoing distribution (policy already
/// applied). Targets get 0. States with any probability of drifting into a
/// region that cannot reach the target get `f64::INFINITY` and a warning on
/// stderr; the rest solve the linear system h = 1 + P h by Gaussian
/// elimination with partial pivoting (fine for the few hundred states used
/// here).
pub fn hitting_times(rows: &[Vec<(usize, f64)>], target: &[bool]) -> Vec<f64> {
    let n = rows.len();
    assert_eq!(target.len(), n);

    // States that can reach the target at all: reverse BFS from the targets.
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, row) in rows.iter().enumerate() {
        for &(next, p) in row {
            if p > 0.0 {
                incoming[next].push(s);
            }
        }
    }
    let mut co_reachable = target.to_vec();
    let mut queue: Vec<usize> = (0..n).filter(|&s| target[s]).collect();
    while let Some(s) = queue.pop() {
        for &prev in &incoming[s] {
            if !co_reachable[prev] {
                co_reachable[prev] = true;
                queue.push(prev);
            }
        }
    }

    // A finite expectation needs almost-sure hitting: states that can step
    // (directly or transitively) into the non-co-reachable region escape the
    // target with positive probability, so their expectation is infinite.
    let mut infinite: Vec<bool> = (0..n).map(|s| !co_reachable[s]).collect();
    let mut queue: Vec<usize> = (0..n).filter(|&s| infinite[s]).collect();
    while let Some(s) = queue.pop() {
        for &prev in &incoming[s] {
            if !infinite[prev] && !target[prev] {
                infinite[prev] = true;
                queue.push(prev);
            }
        }
    }
    if infinite.iter().any(|&i| i) {
        eprintln!(
            "hitting_times: {} state(s) cannot reach the target almost surely; reporting infinity",
            infinite.iter().filter(|&&i| i).count()
        );
    }

    // Solve over the remaining transient states.
    let solve: Vec<usize> =
        (0..n).filter(|&s| !target[s] && !infinite[s]).collect();
    let index_of: Vec<Option<usize>> = {
        let mut m = vec![None; n];
        for (i, &s) in solve.iter().enumerate() {
            m[s] = Some(i);
        }
        m
    };
    let k = solve.len();
    let mut a = vec![vec![0.0f64; k + 1]; k];
    for (i, &s) in solve.iter().enumerate() {
        a[i][i] = 1.0;
        a[i][k] = 1.0;
        for &(next, p) in &rows[s] {
            if let Some(j) = index_of[next] {
                a[i][j] -= p;
            }
            // Transitions to targets contribute 0; transitions to infinite
            // states cannot occur for states in `solve` by construction.
        }
    }
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let p = a[col][col];
        assert!(p.abs() > 1e-300, "singular hitting-time system");
        for row in col + 1..k {
            let factor = a[row][col] / p;
            if factor != 0.0 {
                for c in col..=k {
                    a[row][c] -= factor * a[col][c];
                }
            }
        }
    }
    let mut h = vec![0.0f64; k];
    for row in (0..k).rev() {
        let mut acc = a[row][k];
        for c in row + 1..k {
            acc -= a[row][c] * h[c];
        }
        h[row] = acc / a[row][row];
    }

    (0..n)
        .map(|s| {
            if target[s] {
                0.0
            } else if infinite[s] {
                f64::INFINITY
            } else {
                h[index_of[s].unwrap()]
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Three-location chain with persistent move attempts succeeding with
    /// probability `p`, always heading toward location 1 (left pot):
    /// location 2 must pass through 0 first.
    fn leftward_chain(p: f64) -> Vec<Vec<(usize, f64)>> {
        vec![
            vec![(1, p), (0, 1.0 - p)],
            vec![(1, 1.0)],
            vec![(0, p), (2, 1.0 - p)],
        ]
    }

    #[test]
    fn geometric_travel_times() {
        let h = hitting_times(&leftward_chain(0.6), &[false, true, false]);
        assert!((h[0] - 1.0 / 0.6).abs() < 1e-12);
        assert!((h[2] - 2.0 / 0.6).abs() < 1e-12);
        assert_eq!(h[1], 0.0);
    }

    #[test]
    fn residual_is_tiny_off_target() {
        let rows = leftward_chain(0.37);
        let target = [false, true, false];
        let h = hitting_times(&rows, &target);
        for s in 0..rows.len() {
            if target[s] {
                continue;
            }
            let expected: f64 =
                1.0 + rows[s].iter().map(|&(next, p)| p * h[next]).sum::<f64>();
            assert!((h[s] - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn unreachable_states_report_infinity() {
        // State 2 is absorbing and off-target; state 0 can fall into it.
        let rows = vec![
            vec![(1, 0.5), (2, 0.5)],
            vec![(1, 1.0)],
            vec![(2, 1.0)],
        ];
        let h = hitting_times(&rows, &[false, true, false]);
        assert!(h[0].is_infinite());
        assert_eq!(h[1], 0.0);
        assert!(h[2].is_infinite());
    }
}
