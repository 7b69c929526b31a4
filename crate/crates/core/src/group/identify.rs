//! Small-group identification by brute-force isomorphism search against
//! reference constructions.

use std::fmt;

use super::table::{GroupElement, GroupTable};

/// Largest order `identify` will try to name.
pub const MAX_IDENTIFY_ORDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupName {
    Trivial,
    Cyclic(usize),
    KleinFour,
    Dihedral(usize),
    Other,
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupName::Trivial => write!(f, "trivial"),
            GroupName::Cyclic(n) => write!(f, "Z{n}"),
            GroupName::KleinFour => write!(f, "Z2×Z2"),
            GroupName::Dihedral(3) => write!(f, "S3/D3"),
            GroupName::Dihedral(n) => write!(f, "D{n}"),
            GroupName::Other => write!(f, "other"),
        }
    }
}

fn numbered(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("g{i}")).collect()
}

pub fn cyclic_table(n: usize) -> GroupTable {
    let cells = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    GroupTable::from_cells(numbered(n), cells).expect("cyclic table")
}

pub fn klein_four_table() -> GroupTable {
    let cells = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
    GroupTable::from_cells(numbered(4), cells).expect("klein table")
}

/// Dihedral group of order `2n`: element `i + n*j` is `r^i s^j`.
pub fn dihedral_table(n: usize) -> GroupTable {
    let decode = |x: usize| (x % n, x / n);
    let cells = (0..2 * n)
        .map(|a| {
            (0..2 * n)
                .map(|b| {
                    let (i, j) = decode(a);
                    let (k, l) = decode(b);
                    // r^i s^j r^k s^l = r^(i ± k) s^(j+l), using s r^k = r^-k s
                    let rot = if j == 0 { (i + k) % n } else { (i + n - k) % n };
                    rot + n * ((j + l) % 2)
                })
                .collect()
        })
        .collect();
    GroupTable::from_cells(numbered(2 * n), cells).expect("dihedral table")
}

/// Greedy generating set: repeatedly add an element outside the subgroup
/// generated so far, preferring high-order elements.
fn generating_set(t: &GroupTable) -> Vec<GroupElement> {
    let mut elems: Vec<GroupElement> = t.elements().collect();
    elems.sort_by_key(|&g| std::cmp::Reverse(t.element_order(g)));
    let mut gens = Vec::new();
    let mut span = closure(t, &gens);
    for g in elems {
        if !span[g.index()] {
            gens.push(g);
            span = closure(t, &gens);
        }
    }
    gens
}

fn closure(t: &GroupTable, gens: &[GroupElement]) -> Vec<bool> {
    let mut seen = vec![false; t.order()];
    let mut stack = vec![t.identity()];
    seen[t.identity().index()] = true;
    while let Some(x) = stack.pop() {
        for &g in gens {
            let y = t.product(x, g);
            if !seen[y.index()] {
                seen[y.index()] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Tries to extend `gens -> images` to an isomorphism `a -> b`.
fn extend(a: &GroupTable, b: &GroupTable, gens: &[GroupElement], images: &[GroupElement]) -> Option<Vec<usize>> {
    let n = a.order();
    let mut map = vec![usize::MAX; n];
    map[a.identity().index()] = b.identity().index();
    let mut queue = std::collections::VecDeque::from([a.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&g, &h) in gens.iter().zip(images) {
            let y = a.product(x, g).index();
            let img = b.product(GroupElement(map[x.index()]), h).index();
            if map[y] == usize::MAX {
                map[y] = img;
                queue.push_back(GroupElement(y));
            } else if map[y] != img {
                return None;
            }
        }
    }
    let mut used = vec![false; n];
    for &m in &map {
        if m == usize::MAX || used[m] {
            return None;
        }
        used[m] = true;
    }
    for x in 0..n {
        for y in 0..n {
            let xy = a.product(GroupElement(x), GroupElement(y)).index();
            if map[xy] != b.product(GroupElement(map[x]), GroupElement(map[y])).index() {
                return None;
            }
        }
    }
    Some(map)
}

/// An isomorphism `a -> b` as an index map, if one exists.
pub fn isomorphism(a: &GroupTable, b: &GroupTable) -> Option<Vec<usize>> {
    if a.order() != b.order() {
        return None;
    }
    let order_hist = |t: &GroupTable| {
        let mut h: Vec<usize> = t.elements().map(|g| t.element_order(g)).collect();
        h.sort_unstable();
        h
    };
    if order_hist(a) != order_hist(b) {
        return None;
    }
    let gens = generating_set(a);
    let candidates: Vec<Vec<GroupElement>> = gens
        .iter()
        .map(|&g| {
            let k = a.element_order(g);
            b.elements().filter(|&h| b.element_order(h) == k).collect()
        })
        .collect();
    let mut images = Vec::with_capacity(gens.len());
    search(a, b, &gens, &candidates, &mut images)
}

fn search(
    a: &GroupTable,
    b: &GroupTable,
    gens: &[GroupElement],
    candidates: &[Vec<GroupElement>],
    images: &mut Vec<GroupElement>,
) -> Option<Vec<usize>> {
    if images.len() == gens.len() {
        return extend(a, b, gens, images);
    }
    for &h in &candidates[images.len()] {
        images.push(h);
        if let Some(m) = search(a, b, gens, candidates, images) {
            return Some(m);
        }
        images.pop();
    }
    None
}

/// Names the group if it is one of the small reference groups.
pub fn identify(t: &GroupTable) -> GroupName {
    let n = t.order();
    if n == 1 {
        return GroupName::Trivial;
    }
    if n > MAX_IDENTIFY_ORDER {
        return GroupName::Other;
    }
    if isomorphism(t, &cyclic_table(n)).is_some() {
        return GroupName::Cyclic(n);
    }
    if n == 4 && isomorphism(t, &klein_four_table()).is_some() {
        return GroupName::KleinFour;
    }
    if n % 2 == 0 && n >= 6 && isomorphism(t, &dihedral_table(n / 2)).is_some() {
        return GroupName::Dihedral(n / 2);
    }
    GroupName::Other
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_tables_validate() {
        for n in 1..=12 {
            assert!(cyclic_table(n).validate().is_empty());
        }
        for n in 2..=8 {
            assert!(dihedral_table(n).validate().is_empty(), "D{n}");
        }
        assert!(klein_four_table().validate().is_empty());
    }

    #[test]
    fn names() {
        assert_eq!(identify(&cyclic_table(1)), GroupName::Trivial);
        assert_eq!(identify(&cyclic_table(2)), GroupName::Cyclic(2));
        assert_eq!(identify(&cyclic_table(6)), GroupName::Cyclic(6));
        assert_eq!(identify(&klein_four_table()), GroupName::KleinFour);
        assert_eq!(identify(&dihedral_table(3)), GroupName::Dihedral(3));
        assert_eq!(identify(&dihedral_table(5)), GroupName::Dihedral(5));
        assert_eq!(GroupName::Dihedral(3).to_string(), "S3/D3");
        assert_eq!(GroupName::KleinFour.to_string(), "Z2×Z2");
        assert_eq!(GroupName::Dihedral(5).to_string(), "D5");
    }

    #[test]
    fn d2_is_klein_and_z6_is_not_dihedral() {
        assert_eq!(identify(&dihedral_table(2)), GroupName::KleinFour);
        assert!(isomorphism(&cyclic_table(6), &dihedral_table(3)).is_none());
    }

    #[test]
    fn quaternions_are_other() {
        // Q8 via unit quaternion multiplication on (sign, axis) pairs
        let idx = |s: usize, k: usize| s * 4 + k;
        let mul = |a: usize, b: usize| {
            let (sa, ka) = (a / 4, a % 4);
            let (sb, kb) = (b / 4, b % 4);
            // table for 1,i,j,k with signs
            const T: [[(usize, usize); 4]; 4] = [
                [(0, 0), (0, 1), (0, 2), (0, 3)],
                [(0, 1), (1, 0), (0, 3), (1, 2)],
                [(0, 2), (1, 3), (1, 0), (0, 1)],
                [(0, 3), (0, 2), (1, 1), (1, 0)],
            ];
            let (s, k) = T[ka][kb];
            idx((sa + sb + s) % 2, k)
        };
        let cells = (0..8).map(|a| (0..8).map(|b| mul(a, b)).collect()).collect();
        let q8 = GroupTable::from_cells(numbered(8), cells).unwrap();
        assert!(q8.validate().is_empty());
        assert_eq!(identify(&q8), GroupName::Other);
    }

    #[test]
    fn relabeling_invariance() {
        let d5 = dihedral_table(5);
        let perm = [0, 7, 3, 9, 1, 5, 2, 8, 4, 6];
        let r = d5.relabeled(&perm);
        assert_eq!(identify(&r), GroupName::Dihedral(5));
        assert!(isomorphism(&d5, &r).is_some());
    }
}
