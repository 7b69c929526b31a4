//! Coset enumeration over the trivial subgroup (HLT strategy with
//! coincidence processing), producing the regular representation and from
//! it the multiplication table.

use std::collections::VecDeque;

use super::table::{GroupElement, GroupTable};
use super::word::{Presentation, Word};
use super::GroupError;

/// Default bound on the number of cosets defined during enumeration.
pub const DEFAULT_MAX_COSETS: usize = 10_000;

const NONE: usize = usize::MAX;

/// Result of enumerating a presentation: the table plus where each
/// presentation generator went.
#[derive(Debug, Clone)]
pub struct EnumeratedGroup {
    pub table: GroupTable,
    pub generator_images: Vec<GroupElement>,
    pub generator_names: Vec<String>,
}

impl EnumeratedGroup {
    pub fn generator(&self, name: &str) -> Option<GroupElement> {
        self.generator_names
            .iter()
            .position(|g| g == name)
            .map(|i| self.generator_images[i])
    }

    /// Evaluates a word in the generators.
    pub fn eval(&self, w: &Word) -> GroupElement {
        let t = &self.table;
        w.letters().iter().fold(t.identity(), |acc, l| {
            let g = self.generator_images[l.generator];
            let g = if l.inverse { t.inverse(g) } else { g };
            t.product(acc, g)
        })
    }
}

/// Appends `g^order` for every generator.
pub fn add_branching_relators(p: &Presentation, order: u32) -> Presentation {
    let mut relators = p.relators.clone();
    for g in 0..p.generators.len() {
        relators.push(Word::power(g, order as i64));
    }
    Presentation {
        generators: p.generators.clone(),
        relators,
    }
}

struct CosetTable {
    cols: usize,
    rows: Vec<usize>,
    forward: Vec<usize>,
    queue: Vec<usize>,
    max_cosets: usize,
}

impl CosetTable {
    fn new(cols: usize, max_cosets: usize) -> Self {
        CosetTable {
            cols,
            rows: vec![NONE; cols],
            forward: vec![0],
            queue: Vec::new(),
            max_cosets,
        }
    }

    fn len(&self) -> usize {
        self.forward.len()
    }

    #[inline]
    fn get(&self, c: usize, x: usize) -> usize {
        self.rows[c * self.cols + x]
    }

    #[inline]
    fn set(&mut self, c: usize, x: usize, d: usize) {
        self.rows[c * self.cols + x] = d;
    }

    fn is_live(&self, c: usize) -> bool {
        self.forward[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> Result<(), GroupError> {
        if self.len() >= self.max_cosets {
            return Err(GroupError::CosetLimit(self.max_cosets));
        }
        let d = self.len();
        self.forward.push(d);
        self.rows.extend(std::iter::repeat_n(NONE, self.cols));
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(())
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut root = c;
        while self.forward[root] != root {
            root = self.forward[root];
        }
        let mut mu = c;
        while self.forward[mu] != root && mu != root {
            let next = self.forward[mu];
            self.forward[mu] = root;
            mu = next;
        }
        root
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (pa, pb) = (self.rep(a), self.rep(b));
        if pa != pb {
            let (lo, hi) = (pa.min(pb), pa.max(pb));
            self.forward[hi] = lo;
            self.queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let d = self.get(g, x);
                if d == NONE {
                    continue;
                }
                self.set(d, x ^ 1, NONE);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mx = self.get(mu, x);
                if mx != NONE {
                    self.merge(nu, mx);
                } else {
                    let nx = self.get(nu, x ^ 1);
                    if nx != NONE {
                        self.merge(mu, nx);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, x ^ 1, mu);
                    }
                }
            }
        }
        self.queue.clear();
    }

    fn scan_and_fill(&mut self, start: usize, w: &[usize]) -> Result<(), GroupError> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = start;
        let mut b = start;
        let mut i = 0usize;
        let mut j = w.len() as isize - 1;
        loop {
            while (i as isize) <= j && self.get(f, w[i]) != NONE {
                f = self.get(f, w[i]);
                i += 1;
            }
            if (i as isize) > j {
                if f != start {
                    self.coincidence(f, start);
                }
                return Ok(());
            }
            while j >= i as isize && self.get(b, w[j as usize] ^ 1) != NONE {
                b = self.get(b, w[j as usize] ^ 1);
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            } else if j == i as isize {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return Ok(());
            } else {
                self.define(f, w[i])?;
            }
        }
    }
}

/// Enumerates the cosets of the trivial subgroup of `p` and returns the
/// validated multiplication table of the group.
pub fn enumerate(p: &Presentation, max_cosets: usize) -> Result<EnumeratedGroup, GroupError> {
    if p.generators.is_empty() {
        return Err(GroupError::EmptyGenerators);
    }
    let cols = 2 * p.generators.len();
    let relators: Vec<Vec<usize>> = p
        .relators
        .iter()
        .map(|r| r.cyclically_reduced())
        .filter(|r| !r.is_empty())
        .map(|r| r.letters().iter().map(|l| l.column()).collect())
        .collect();

    let mut ct = CosetTable::new(cols, max_cosets.max(1));
    let mut alpha = 0;
    while alpha < ct.len() {
        if ct.is_live(alpha) {
            for r in &relators {
                ct.scan_and_fill(alpha, r)?;
                if !ct.is_live(alpha) {
                    break;
                }
            }
            if ct.is_live(alpha) {
                for x in 0..cols {
                    if ct.get(alpha, x) == NONE {
                        ct.define(alpha, x)?;
                    }
                }
            }
        }
        alpha += 1;
    }

    // Breadth-first renumbering of live cosets from the identity coset, with
    // a spanning-tree word for each.
    let mut order: Vec<usize> = Vec::new();
    let mut number = vec![NONE; ct.len()];
    let mut words: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    number[0] = 0;
    order.push(0);
    words.push(Vec::new());
    queue.push_back(0usize);
    while let Some(c) = queue.pop_front() {
        for x in 0..cols {
            let d = ct.get(c, x);
            debug_assert!(d != NONE, "incomplete coset table");
            let d = ct.rep(d);
            if number[d] == NONE {
                number[d] = order.len();
                let mut w = words[number[c]].clone();
                w.push(x);
                order.push(d);
                words.push(w);
                queue.push_back(d);
            }
        }
    }
    let n = order.len();
    let act = |ct: &mut CosetTable, c: usize, x: usize| -> usize {
        let d = ct.get(order[c], x);
        number[ct.rep(d)]
    };
    let mut action = vec![vec![0usize; cols]; n];
    for (c, row) in action.iter_mut().enumerate() {
        for (x, slot) in row.iter_mut().enumerate() {
            *slot = act(&mut ct, c, x);
        }
    }

    // Element numbering: identity, then generator images, then the rest in
    // discovery order.
    let gen_cosets: Vec<usize> = (0..p.generators.len()).map(|g| action[0][2 * g]).collect();
    let mut perm: Vec<usize> = vec![0];
    for &c in &gen_cosets {
        if !perm.contains(&c) {
            perm.push(c);
        }
    }
    for c in 0..n {
        if !perm.contains(&c) {
            perm.push(c);
        }
    }
    let mut pos = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        pos[old] = new;
    }

    let mut names: Vec<Option<String>> = vec![None; n];
    names[0] = Some("e".to_string());
    for (g, &c) in gen_cosets.iter().enumerate() {
        let slot = &mut names[pos[c]];
        if slot.is_none() {
            *slot = Some(p.generators[g].clone());
        }
    }
    let mut fresh = fresh_names(names.iter().flatten().cloned().collect());
    let names: Vec<String> = names
        .into_iter()
        .map(|s| s.unwrap_or_else(|| fresh.next().expect("infinite")))
        .collect();

    // table[a][b] = coset of a followed by the word of b.
    let cells: Vec<Vec<usize>> = (0..n)
        .map(|a_new| {
            let a = perm[a_new];
            (0..n)
                .map(|b_new| {
                    let b = perm[b_new];
                    let c = words[b].iter().fold(a, |c, &x| action[c][x]);
                    pos[c]
                })
                .collect()
        })
        .collect();
    let table = GroupTable::from_cells(names, cells)?;
    let violations = table.describe_violations();
    if !violations.is_empty() {
        return Err(GroupError::InvalidTable(violations));
    }
    let generator_images = gen_cosets.iter().map(|&c| GroupElement(pos[c])).collect();
    Ok(EnumeratedGroup {
        table,
        generator_images,
        generator_names: p.generators.clone(),
    })
}

/// Lower-case letters other than `e`, then `g1, g2, ...`, skipping taken
/// names.
fn fresh_names(taken: Vec<String>) -> impl Iterator<Item = String> {
    let letters = ('a'..='z').filter(|&c| c != 'e').map(|c| c.to_string());
    let numbered = (1..).map(|i| format!("g{i}"));
    letters
        .chain(numbered)
        .filter(move |s| !taken.contains(s))
}

/// Convenience: enumerate with squared generators and the default bound.
pub fn order_two_quotient(p: &Presentation) -> Result<EnumeratedGroup, GroupError> {
    enumerate(&add_branching_relators(p, 2), DEFAULT_MAX_COSETS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::word::Letter;

    fn pres(gens: &[&str], rels: &[&str]) -> Presentation {
        Presentation::parse(gens, rels).unwrap()
    }

    #[test]
    fn branching_relators_appended() {
        let p = pres(&["a"], &[]);
        let q = add_branching_relators(&p, 2);
        assert_eq!(q.to_string(), "< a | a a >");
        let q3 = add_branching_relators(&p, 3);
        assert_eq!(q3.relators, vec![Word::power(0, 3)]);
    }

    #[test]
    fn cyclic_of_order_two() {
        let g = enumerate(&pres(&["a"], &["a^2"]), 100).unwrap();
        assert_eq!(g.table.order(), 2);
        assert_eq!(g.table.names(), ["e", "a"]);
        assert_eq!(g.table.to_grid(), "e a\na e\n");
    }

    #[test]
    fn dihedral_presentations() {
        let s3 = enumerate(&pres(&["x", "y"], &["x^2", "y^2", "(xy)^3"]), 1000).unwrap();
        assert_eq!(s3.table.order(), 6);
        let d5 = enumerate(&pres(&["x", "y"], &["x^2", "y^2", "(xy)^5"]), 1000).unwrap();
        assert_eq!(d5.table.order(), 10);
        let k4 = enumerate(&pres(&["a", "b"], &["a^2", "b^2", "(ab)^2"]), 1000).unwrap();
        assert_eq!(k4.table.order(), 4);
    }

    #[test]
    fn braid_quotients_by_powers() {
        // <x,y | xyx = yxy, x^n>: orders 6, 24, 96, 600 for n = 2..5
        for (n, order) in [(2u32, 6usize), (3, 24), (4, 96), (5, 600)] {
            let base = pres(&["x", "y"], &["x y x Y X Y"]);
            let g = enumerate(&add_branching_relators(&base, n), 20_000).unwrap();
            assert_eq!(g.table.order(), order, "n = {n}");
        }
    }

    #[test]
    fn trivial_group_from_collapsing_relators() {
        let g = enumerate(&pres(&["a", "b"], &["a", "b A"]), 100).unwrap();
        assert_eq!(g.table.order(), 1);
        assert_eq!(g.generator_images, vec![GroupElement(0), GroupElement(0)]);
        assert!(g.table.validate().is_empty());
    }

    #[test]
    fn coset_limit_for_infinite_groups() {
        let free = pres(&["a", "b"], &[]);
        assert!(matches!(enumerate(&free, 500), Err(GroupError::CosetLimit(500))));
        let z = pres(&["a"], &[]);
        assert!(matches!(enumerate(&z, 50), Err(GroupError::CosetLimit(50))));
    }

    #[test]
    fn squares_only_on_one_generator() {
        let g = order_two_quotient(&pres(&["a"], &[])).unwrap();
        assert_eq!(g.table.order(), 2);
    }

    #[test]
    fn generator_images_and_eval() {
        let g = enumerate(&pres(&["x", "y"], &["x^2", "y^2", "(xy)^3"]), 1000).unwrap();
        let x = g.generator("x").unwrap();
        let y = g.generator("y").unwrap();
        assert_eq!(g.table.name(x), "x");
        assert_eq!(g.table.name(y), "y");
        let xy = g.table.product(x, y);
        assert_eq!(g.eval(&Word(vec![Letter::new(0), Letter::new(1)])), xy);
        assert_ne!(g.table.product(x, y), g.table.product(y, x));
        // remaining elements named in discovery order, skipping `e`
        let mut names = g.table.names().to_vec();
        names.sort();
        assert_eq!(names, ["a", "b", "c", "e", "x", "y"]);
    }
}
