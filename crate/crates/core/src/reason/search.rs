use std::collections::BTreeSet;

use crate::semantics::ground::{Formula, Tri};

/// Outcome of a bounded search over one universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Search {
    Model(Vec<bool>),
    Exhausted { decisions: u64 },
}

/// Backtracking search for a total assignment satisfying every formula.
///
/// Open atoms default to false. The search only decides atoms of formulas
/// that default violates; formulas with a single open atom are propagated.
/// Only the formulas connected to `seeds` through shared atoms are searched;
/// every other atom is left false, which is sound whenever the remaining
/// formulas hold under the all-false assignment (checked here).
pub fn solve(atom_count: usize, formulas: &[Formula], seeds: &[usize]) -> Search {
    let atoms_of: Vec<Vec<usize>> = formulas
        .iter()
        .map(|f| {
            let mut v = Vec::new();
            f.atoms(&mut v);
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); atom_count];
    for (i, atoms) in atoms_of.iter().enumerate() {
        for &a in atoms {
            occurs[a].push(i);
        }
    }

    let active = cone(formulas, &atoms_of, &occurs, seeds);
    let all_false = |_: usize| Some(false);
    for (i, f) in formulas.iter().enumerate() {
        if !active[i] && f.eval3(&all_false) == Some(false) {
            // Formulas false under the default assignment join the search.
            return solve_all(atom_count, formulas, &atoms_of, &occurs, &vec![true; formulas.len()]);
        }
    }
    solve_all(atom_count, formulas, &atoms_of, &occurs, &active)
}

fn cone(formulas: &[Formula], atoms_of: &[Vec<usize>], occurs: &[Vec<usize>], seeds: &[usize]) -> Vec<bool> {
    let mut active = vec![false; formulas.len()];
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut stack: Vec<usize> = seeds.to_vec();
    for (i, a) in atoms_of.iter().enumerate() {
        if a.is_empty() {
            active[i] = true;
        }
    }
    while let Some(a) = stack.pop() {
        if !seen.insert(a) {
            continue;
        }
        for &f in &occurs[a] {
            if !active[f] {
                active[f] = true;
                stack.extend(atoms_of[f].iter().copied());
            }
        }
    }
    active
}

struct State<'a> {
    formulas: &'a [Formula],
    atoms_of: &'a [Vec<usize>],
    occurs: &'a [Vec<usize>],
    active: &'a [bool],
    val: Vec<Tri>,
    trail: Vec<usize>,
    decisions: u64,
}

impl State<'_> {
    fn value(&self, f: usize) -> Tri {
        let val = &self.val;
        self.formulas[f].eval3(&|a| val[a])
    }

    fn assign(&mut self, a: usize, v: bool) {
        self.val[a] = Some(v);
        self.trail.push(a);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let a = self.trail.pop().unwrap();
            self.val[a] = None;
        }
    }

    /// Propagates from the atoms assigned since `from`; false on conflict.
    fn propagate(&mut self, mut from: usize) -> bool {
        while from < self.trail.len() {
            let a = self.trail[from];
            from += 1;
            let occurs = self.occurs;
            for &f in &occurs[a] {
                if !self.active[f] {
                    continue;
                }
                match self.value(f) {
                    Some(false) => return false,
                    Some(true) => continue,
                    None => {}
                }
                let open: Vec<usize> =
                    self.atoms_of[f].iter().copied().filter(|&b| self.val[b].is_none()).collect();
                if open.len() != 1 {
                    continue;
                }
                let b = open[0];
                self.val[b] = Some(false);
                let when_false = self.value(f);
                self.val[b] = Some(true);
                let when_true = self.value(f);
                self.val[b] = None;
                match (when_false, when_true) {
                    (Some(false), Some(false)) => return false,
                    (Some(false), _) => self.assign(b, true),
                    (_, Some(false)) => self.assign(b, false),
                    _ => {}
                }
            }
        }
        true
    }

    /// Open atoms of the active formula with the fewest of them among
    /// those the all-false completion violates; `None` when the completion
    /// is a model.
    fn violated(&self) -> Option<Vec<usize>> {
        let val = &self.val;
        let mut best: Option<Vec<usize>> = None;
        for f in 0..self.formulas.len() {
            if !self.active[f] || self.formulas[f].eval(&|a| val[a].unwrap_or(false)) {
                continue;
            }
            let open: Vec<usize> = self.atoms_of[f].iter().copied().filter(|&a| val[a].is_none()).collect();
            if best.as_ref().is_none_or(|b| open.len() < b.len()) {
                let done = open.len() <= 1;
                best = Some(open);
                if done {
                    break;
                }
            }
        }
        best
    }

    /// Branches on which open atom of a violated formula is the first one
    /// made true: every model extending the current assignment picks one.
    fn dfs(&mut self) -> bool {
        let Some(open) = self.violated() else { return true };
        for (i, &a) in open.iter().enumerate() {
            self.decisions += 1;
            let mark = self.trail.len();
            for &b in &open[..i] {
                self.assign(b, false);
            }
            self.assign(a, true);
            if self.propagate(mark) && self.dfs() {
                return true;
            }
            self.undo(mark);
        }
        false
    }
}

fn solve_all(
    atom_count: usize,
    formulas: &[Formula],
    atoms_of: &[Vec<usize>],
    occurs: &[Vec<usize>],
    active: &[bool],
) -> Search {
    let mut in_cone = vec![false; atom_count];
    for (f, atoms) in atoms_of.iter().enumerate() {
        if active[f] {
            for &a in atoms {
                in_cone[a] = true;
            }
        }
    }
    let mut st = State {
        formulas,
        atoms_of,
        occurs,
        active,
        val: vec![None; atom_count],
        trail: Vec::new(),
        decisions: 0,
    };
    for (f, formula) in formulas.iter().enumerate() {
        if active[f] && formula.eval3(&|_| None) == Some(false) {
            return Search::Exhausted { decisions: 0 };
        }
    }
    for (a, &inside) in in_cone.iter().enumerate() {
        if !inside {
            st.val[a] = Some(false);
        }
    }
    // Formulas whose atoms are all out of the cone are now decided.
    let order: Vec<usize> = (0..atom_count).filter(|&a| in_cone[a]).collect();
    let mut ok = (0..formulas.len()).all(|f| !active[f] || st.value(f) != Some(false));
    if ok {
        // Seed propagation from every formula with one open atom.
        let mark = st.trail.len();
        st.trail.extend(order.iter().copied());
        let snapshot = st.trail.len();
        ok = st.propagate(mark);
        let forced: Vec<usize> = st.trail.drain(snapshot..).collect();
        st.trail.truncate(mark);
        st.trail.extend(forced);
    }
    if ok && st.dfs() {
        Search::Model(st.val.iter().map(|v| v.unwrap_or(false)).collect())
    } else {
        Search::Exhausted { decisions: st.decisions }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::ground::{and, at_most, not, or};

    fn lit(a: usize) -> Formula {
        Formula::Lit(a, true)
    }

    #[test]
    fn finds_models_and_exhausts() {
        let fs = vec![or([lit(0), lit(1)]), not(lit(0)), at_most(1, vec![lit(1), lit(2)])];
        match solve(3, &fs, &[0]) {
            Search::Model(m) => assert!(fs.iter().all(|f| f.eval(&|a| m[a]))),
            other => panic!("{other:?}"),
        }
        let fs = vec![lit(0), not(lit(0))];
        assert!(matches!(solve(1, &fs, &[0]), Search::Exhausted { .. }));
    }

    #[test]
    fn atoms_outside_the_cone_stay_false() {
        let fs = vec![lit(0), or([not(lit(1)), lit(2)])];
        let Search::Model(m) = solve(3, &fs, &[0]) else { panic!() };
        assert_eq!(m, vec![true, false, false]);
        let fs = vec![lit(0), and([lit(1), lit(2)])];
        let Search::Model(m) = solve(3, &fs, &[0]) else { panic!() };
        assert_eq!(m, vec![true, true, true]);
    }

    #[test]
    fn brute_force_agreement() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = 5;
            let fs: Vec<Formula> = (0..rng.gen_range(1..5))
                .map(|_| {
                    let ls: Vec<Formula> =
                        (0..3).map(|_| Formula::Lit(rng.gen_range(0..n), rng.gen_bool(0.5))).collect();
                    match rng.gen_range(0..3) {
                        0 => or(ls),
                        1 => at_most(1, ls),
                        _ => crate::semantics::ground::at_least(2, ls),
                    }
                })
                .collect();
            let brute = (0..1u32 << n).any(|bits| fs.iter().all(|f| f.eval(&|a| bits >> a & 1 == 1)));
            let got = solve(n, &fs, &[0]);
            if let Search::Model(m) = &got {
                assert!(fs.iter().all(|f| f.eval(&|a| m[a])));
            }
            assert_eq!(matches!(got, Search::Model(_)), brute);
        }
    }
}
