//! Comparison of a printed (possibly erroneous) multiplication table with an
//! enumerated one, up to relabeling and transposition.

use super::table::GroupTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMismatch {
    pub row: String,
    pub column: String,
    pub printed: String,
    pub expected: String,
}

impl std::fmt::Display for CellMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "row {} column {}: printed {}, expected {}",
            self.row, self.column, self.printed, self.expected
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureReport {
    /// The printed table matched best with rows as the right factor.
    pub transposed: bool,
    /// `(printed name, enumerated name)` pairs of the best relabeling.
    pub mapping: Vec<(String, String)>,
    /// Cells that disagree under the best relabeling, in printed names.
    pub mismatches: Vec<CellMismatch>,
    /// Group-axiom violations of the printed table itself.
    pub violations: Vec<String>,
}

impl FixtureReport {
    pub fn is_exact(&self) -> bool {
        self.mismatches.is_empty() && self.violations.is_empty()
    }
}

struct Search<'a> {
    n: usize,
    printed: &'a [usize],
    expected: &'a GroupTable,
    // cells grouped by the last printed element they depend on
    cells_by_last: Vec<Vec<(usize, usize)>>,
    map: Vec<usize>,
    used: Vec<bool>,
    best_cost: usize,
    best_map: Vec<usize>,
}

impl Search<'_> {
    fn cell_cost(&self, a: usize, b: usize) -> usize {
        let v = self.printed[a * self.n + b];
        let want = self.expected.row(self.map[a])[self.map[b]];
        usize::from(self.map[v] != want)
    }

    fn run(&mut self, k: usize, cost: usize) {
        if cost >= self.best_cost {
            return;
        }
        if k == self.n {
            self.best_cost = cost;
            self.best_map = self.map.clone();
            return;
        }
        for img in 0..self.n {
            if self.used[img] {
                continue;
            }
            self.used[img] = true;
            self.map[k] = img;
            let added: usize = self.cells_by_last[k]
                .iter()
                .map(|&(a, b)| self.cell_cost(a, b))
                .sum();
            self.run(k + 1, cost + added);
            self.used[img] = false;
        }
        self.map[k] = usize::MAX;
    }
}

fn best_relabeling(printed: &GroupTable, expected: &GroupTable) -> (usize, Vec<usize>) {
    let n = printed.order();
    let flat: Vec<usize> = (0..n).flat_map(|a| printed.row(a).to_vec()).collect();
    let mut cells_by_last = vec![Vec::new(); n];
    for a in 0..n {
        for b in 0..n {
            let last = a.max(b).max(flat[a * n + b]);
            cells_by_last[last].push((a, b));
        }
    }
    let mut s = Search {
        n,
        printed: &flat,
        expected,
        cells_by_last,
        map: vec![usize::MAX; n],
        used: vec![false; n],
        best_cost: n * n + 1,
        best_map: Vec::new(),
    };
    s.run(0, 0);
    (s.best_cost, s.best_map)
}

/// Finds the relabeling (and orientation) of `printed` closest to
/// `expected` and reports every residual disagreement.
///
/// Returns `None` when the orders differ.
pub fn compare_fixture(printed: &GroupTable, expected: &GroupTable) -> Option<FixtureReport> {
    let n = printed.order();
    if n != expected.order() {
        return None;
    }
    let straight = best_relabeling(printed, expected);
    let transposed_table = printed.transposed();
    let flipped = best_relabeling(&transposed_table, expected);
    let (transposed, table, (_, map)) = if flipped.0 < straight.0 {
        (true, &transposed_table, flipped)
    } else {
        (false, printed, straight)
    };
    let mut back = vec![0; n];
    for (p, &e) in map.iter().enumerate() {
        back[e] = p;
    }
    let name = |i: usize| printed.names()[i].clone();
    let mut mismatches = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let got = table.row(a)[b];
            let want = back[expected.row(map[a])[map[b]]];
            if got != want {
                mismatches.push(CellMismatch {
                    row: name(a),
                    column: name(b),
                    printed: name(got),
                    expected: name(want),
                });
            }
        }
    }
    Some(FixtureReport {
        transposed,
        mapping: map
            .iter()
            .enumerate()
            .map(|(p, &e)| (name(p), expected.names()[e].clone()))
            .collect(),
        mismatches,
        violations: printed.describe_violations(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{dihedral_table, parse_grid};

    #[test]
    fn exact_match_after_relabel() {
        let d3 = dihedral_table(3);
        let r = d3.relabeled(&[0, 4, 2, 5, 1, 3]);
        let rep = compare_fixture(&r, &d3).unwrap();
        assert!(rep.is_exact());
    }

    #[test]
    fn transpose_detected() {
        let d3 = dihedral_table(3);
        // a non-abelian table read the other way round is still a group,
        // so the relabeling alone may absorb it; only require exactness
        let rep = compare_fixture(&d3.transposed(), &d3).unwrap();
        assert!(rep.mismatches.is_empty());
    }

    #[test]
    fn single_typo_reported() {
        let text = "e a b c\na e c b\nb c e a\nc b a a\n";
        let t = parse_grid(text).unwrap();
        let k4 = crate::group::klein_four_table();
        let rep = compare_fixture(&t, &k4).unwrap();
        assert_eq!(rep.mismatches.len(), 1);
        assert_eq!(rep.mismatches[0].to_string(), "row c column c: printed a, expected e");
        assert!(!rep.violations.is_empty());
    }

    #[test]
    fn order_mismatch() {
        assert!(compare_fixture(&crate::group::cyclic_table(2), &crate::group::cyclic_table(3)).is_none());
    }
}
