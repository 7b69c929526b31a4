use std::fmt;

use super::GroupError;

/// Index of an element in a [`GroupTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub usize);

impl GroupElement {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Finite multiplication table. `product(a, b)` is `a * b` with `a` the row
/// (left factor).
///
/// A table may be built from untrusted cells; [`GroupTable::validate`] lists
/// every group axiom it breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    names: Vec<String>,
    cells: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RowRepeats { row: usize, element: usize },
    ColumnRepeats { column: usize, element: usize },
    NoIdentity,
    IdentityRow { identity: usize, column: usize },
    IdentityColumn { identity: usize, row: usize },
    NoInverse { element: usize },
    InverseNotInvolutive { element: usize },
    NotAssociative { a: usize, b: usize, c: usize },
}

impl Violation {
    pub fn describe(&self, names: &[String]) -> String {
        let n = |i: &usize| names.get(*i).cloned().unwrap_or_else(|| format!("#{i}"));
        match self {
            Violation::RowRepeats { row, element } => {
                format!("row {} is not a permutation: {} appears twice", n(row), n(element))
            }
            Violation::ColumnRepeats { column, element } => {
                format!("column {} is not a permutation: {} appears twice", n(column), n(element))
            }
            Violation::NoIdentity => "no element acts as identity".to_string(),
            Violation::IdentityRow { identity, column } => {
                format!("{} * {} != {}", n(identity), n(column), n(column))
            }
            Violation::IdentityColumn { identity, row } => {
                format!("{} * {} != {}", n(row), n(identity), n(row))
            }
            Violation::NoInverse { element } => format!("{} has no two-sided inverse", n(element)),
            Violation::InverseNotInvolutive { element } => {
                format!("inverse of the inverse of {} is not {}", n(element), n(element))
            }
            Violation::NotAssociative { a, b, c } => format!(
                "({} * {}) * {} != {} * ({} * {})",
                n(a),
                n(b),
                n(c),
                n(a),
                n(b),
                n(c)
            ),
        }
    }
}

impl GroupTable {
    /// Builds a table from row-major cells, checking only shape and range.
    pub fn from_cells(names: Vec<String>, cells: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = names.len();
        if n == 0 {
            return Err(GroupError::EmptyTable);
        }
        if cells.len() != n || cells.iter().any(|r| r.len() != n) {
            return Err(GroupError::NotSquare {
                rows: cells.len(),
                columns: cells.iter().map(|r| r.len()).max().unwrap_or(0),
                names: n,
            });
        }
        if cells.iter().flatten().any(|&c| c >= n) {
            return Err(GroupError::CellOutOfRange);
        }
        let flat: Vec<usize> = cells.into_iter().flatten().collect();
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| flat[e * n + x] == x && flat[x * n + e] == x))
            .or_else(|| (0..n).find(|&e| (0..n).all(|x| flat[e * n + x] == x)))
            .unwrap_or(0);
        let inverse = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| flat[g * n + h] == identity && flat[h * n + g] == identity)
                    .unwrap_or(usize::MAX)
            })
            .collect();
        Ok(GroupTable {
            names,
            cells: flat,
            identity,
            inverse,
        })
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, g: GroupElement) -> &str {
        &self.names[g.0]
    }

    pub fn element(&self, name: &str) -> Option<GroupElement> {
        self.names.iter().position(|n| n == name).map(GroupElement)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(self.identity)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.order()).map(GroupElement)
    }

    pub fn product(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        GroupElement(self.cells[a.0 * self.order() + b.0])
    }

    /// Inverse of `g`; only meaningful on a table that validates.
    pub fn inverse(&self, g: GroupElement) -> GroupElement {
        GroupElement(self.inverse[g.0])
    }

    pub fn element_order(&self, g: GroupElement) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity() {
            x = self.product(x, g);
            k += 1;
            if k > self.order() {
                return 0;
            }
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.cells[a * n + b] == self.cells[b * n + a]))
    }

    pub fn row(&self, a: usize) -> &[usize] {
        let n = self.order();
        &self.cells[a * n..(a + 1) * n]
    }

    /// Table with the operands swapped, `b * a`.
    pub fn transposed(&self) -> GroupTable {
        let n = self.order();
        let cells = (0..n)
            .map(|a| (0..n).map(|b| self.cells[b * n + a]).collect())
            .collect();
        GroupTable::from_cells(self.names.clone(), cells).expect("same shape")
    }

    /// Same group with elements renamed/reindexed: new element `i` is old
    /// element `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> GroupTable {
        let n = self.order();
        let mut pos = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            pos[old] = new;
        }
        let names = perm.iter().map(|&o| self.names[o].clone()).collect();
        let cells = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| pos[self.cells[perm[a] * n + perm[b]]])
                    .collect()
            })
            .collect();
        GroupTable::from_cells(names, cells).expect("same shape")
    }

    /// Every violated group axiom; empty iff the table is a group.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.order();
        let mut out = Vec::new();
        for r in 0..n {
            let mut seen = vec![false; n];
            for c in 0..n {
                let v = self.cells[r * n + c];
                if std::mem::replace(&mut seen[v], true) {
                    out.push(Violation::RowRepeats { row: r, element: v });
                }
            }
        }
        for c in 0..n {
            let mut seen = vec![false; n];
            for r in 0..n {
                let v = self.cells[r * n + c];
                if std::mem::replace(&mut seen[v], true) {
                    out.push(Violation::ColumnRepeats { column: c, element: v });
                }
            }
        }
        let e = self.identity;
        let has_identity = (0..n).all(|x| self.cells[e * n + x] == x && self.cells[x * n + e] == x);
        if !has_identity {
            out.push(Violation::NoIdentity);
            for x in 0..n {
                if self.cells[e * n + x] != x {
                    out.push(Violation::IdentityRow { identity: e, column: x });
                }
                if self.cells[x * n + e] != x {
                    out.push(Violation::IdentityColumn { identity: e, row: x });
                }
            }
        }
        for g in 0..n {
            let inv = self.inverse[g];
            if inv == usize::MAX {
                out.push(Violation::NoInverse { element: g });
            } else if self.inverse[inv] != g {
                out.push(Violation::InverseNotInvolutive { element: g });
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.cells[a * n + b];
                for c in 0..n {
                    let bc = self.cells[b * n + c];
                    if self.cells[ab * n + c] != self.cells[a * n + bc] {
                        out.push(Violation::NotAssociative { a, b, c });
                    }
                }
            }
        }
        out
    }

    pub fn describe_violations(&self) -> Vec<String> {
        self.validate()
            .iter()
            .map(|v| v.describe(&self.names))
            .collect()
    }

    /// Letter grid, one row per left factor.
    pub fn to_grid(&self) -> String {
        let n = self.order();
        let width = self.names.iter().map(|s| s.len()).max().unwrap_or(1);
        let mut s = String::new();
        for r in 0..n {
            let row: Vec<String> = (0..n)
                .map(|c| format!("{:<width$}", self.names[self.cells[r * n + c]]))
                .collect();
            s.push_str(row.join(" ").trim_end());
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_grid())
    }
}

/// Parses a square letter grid without checking the group axioms.
///
/// Each non-empty line is a row of whitespace-separated element names (or,
/// when a line has no whitespace, one element per character). Row `i` and
/// column `i` both belong to the `i`-th name of the first row, the usual
/// layout when the first row is the identity's; `#` starts a comment.
pub fn parse_grid(text: &str) -> Result<GroupTable, GroupError> {
    let rows: Vec<Vec<String>> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            if l.contains(char::is_whitespace) {
                l.split_whitespace().map(str::to_string).collect()
            } else {
                l.chars().map(|c| c.to_string()).collect()
            }
        })
        .collect();
    if rows.is_empty() {
        return Err(GroupError::EmptyTable);
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(GroupError::NotSquare {
            rows: n,
            columns: rows.iter().map(|r| r.len()).max().unwrap_or(0),
            names: n,
        });
    }
    // Element order: the first row, plus any name that only appears later.
    let mut names: Vec<String> = Vec::new();
    for name in rows.iter().flatten() {
        if !names.contains(name) {
            names.push(name.clone());
        }
    }
    if names.len() != n {
        return Err(GroupError::NotSquare {
            rows: n,
            columns: n,
            names: names.len(),
        });
    }
    // Rows and columns are both indexed in header order.
    let index = |s: &String| names.iter().position(|x| x == s).expect("collected");
    let cells: Vec<Vec<usize>> = rows
        .iter()
        .map(|row| row.iter().map(index).collect())
        .collect();
    GroupTable::from_cells(names, cells)
}

/// Parses a letter grid and rejects it unless it satisfies the group axioms.
pub fn parse_table(text: &str) -> Result<GroupTable, GroupError> {
    let t = parse_grid(text)?;
    let v = t.describe_violations();
    if v.is_empty() {
        Ok(t)
    } else {
        Err(GroupError::InvalidTable(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_table() {
        let t = parse_table("e a\na e\n").unwrap();
        assert_eq!(t.order(), 2);
        assert_eq!(t.identity(), GroupElement(0));
        assert_eq!(t.to_grid(), "e a\na e\n");
    }

    #[test]
    fn trivial_table_validates() {
        let t = parse_table("e").unwrap();
        assert_eq!(t.order(), 1);
        assert!(t.validate().is_empty());
    }

    #[test]
    fn compact_rows_accepted() {
        let t = parse_grid("eab\naeb\nbbe").unwrap();
        assert_eq!(t.order(), 3);
        assert!(!t.validate().is_empty());
    }

    #[test]
    fn swapped_entry_is_reported() {
        // Z3 with two cells swapped in the last row.
        let good = parse_table("e a b\na b e\nb e a").unwrap();
        assert!(good.validate().is_empty());
        let bad = parse_grid("e a b\na b e\nb a e").unwrap();
        let v = bad.validate();
        assert!(!v.is_empty());
        assert!(v.iter().any(|x| matches!(x, Violation::ColumnRepeats { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::NotAssociative { .. })));
        let text = bad.describe_violations().join("\n");
        assert!(text.contains(") * "), "{text}");
    }

    #[test]
    fn duplicate_letter_in_row_is_a_latin_violation() {
        let err = parse_table("e a b\na a e\nb e a").unwrap_err();
        match err {
            GroupError::InvalidTable(v) => assert!(v.iter().any(|s| s.contains("row a"))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_square_grid_rejected() {
        assert!(matches!(parse_grid("e a\na"), Err(GroupError::NotSquare { .. })));
        assert!(matches!(parse_grid(""), Err(GroupError::EmptyTable)));
    }

    #[test]
    fn relabel_and_transpose_preserve_validity() {
        let t = parse_table("e a b\na b e\nb e a").unwrap();
        let r = t.relabeled(&[2, 0, 1]);
        assert!(r.validate().is_empty());
        assert_eq!(r.identity(), GroupElement(1));
        assert!(t.transposed().validate().is_empty());
    }
}
