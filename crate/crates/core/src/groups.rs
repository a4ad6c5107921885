//! Finite abelian groups presented as direct sums of cyclic groups.
//!
//! Elements are residue tuples. Every group also carries a dense indexing of
//! its elements in mixed radix, first component most significant, so that
//! index order coincides with the lexicographic order of residue tuples.
//! Hot loops elsewhere in the crate work on these indices directly.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid group {0:?}: expected something like Z13 or Z2xZ4")]
    Parse(String),
    #[error("cyclic factor orders must be at least 1")]
    ZeroOrder,
    #[error("element {element} does not belong to {group}")]
    NotAMember { element: String, group: String },
    #[error("operands belong to different groups ({left} vs {right})")]
    Mismatch { left: String, right: String },
    #[error("duplicate element {0} in subset")]
    Duplicate(String),
    #[error("invalid element {0:?}: expected an integer or a tuple like (1,3)")]
    ElementSyntax(String),
}

/// `Z_{n_1} + ... + Z_{n_t}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    orders: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    residues: Vec<usize>,
}

impl GroupElement {
    pub fn residues(&self) -> &[usize] {
        &self.residues
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.residues.len() == 1 {
            return write!(f, "{}", self.residues[0]);
        }
        write!(f, "(")?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl AbelianGroup {
    pub fn new(orders: Vec<usize>) -> Result<Self, GroupError> {
        if orders.is_empty() {
            return Err(GroupError::Parse(String::new()));
        }
        if orders.contains(&0) {
            return Err(GroupError::ZeroOrder);
        }
        Ok(Self { orders })
    }

    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        Self::new(vec![n])
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// `|G|`.
    pub fn order(&self) -> usize {
        self.orders.iter().product()
    }

    pub fn is_cyclic_presentation(&self) -> bool {
        self.orders.len() == 1
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.orders.len()],
        }
    }

    /// Builds an element from arbitrary integers, reducing each component.
    pub fn reduce(&self, values: &[i64]) -> Result<GroupElement, GroupError> {
        if values.len() != self.orders.len() {
            return Err(GroupError::NotAMember {
                element: format!("{values:?}"),
                group: self.to_string(),
            });
        }
        let residues = values
            .iter()
            .zip(&self.orders)
            .map(|(&x, &n)| x.rem_euclid(n as i64) as usize)
            .collect();
        Ok(GroupElement { residues })
    }

    /// Parses `7`, `-1` or `(1,3)`; components are reduced modulo the
    /// factor orders. A bare integer is accepted only for one-factor groups.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement, GroupError> {
        let err = || GroupError::ElementSyntax(s.to_string());
        let t = s.trim();
        let inner = match t.strip_prefix('(') {
            Some(rest) => rest.strip_suffix(')').ok_or_else(err)?,
            None => t,
        };
        let values = inner
            .split(',')
            .map(|c| c.trim().parse::<i64>().map_err(|_| err()))
            .collect::<Result<Vec<_>, _>>()?;
        self.reduce(&values)
    }

    /// Parses a comma-separated list of elements such as `7,8,11` or
    /// `(0,1),(1,3)`, optionally wrapped in braces. Repeated elements are
    /// rejected.
    pub fn parse_subset(&self, s: &str) -> Result<GroupSubset, GroupError> {
        let t = s.trim();
        let s = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .unwrap_or(t);
        let mut items = Vec::new();
        let mut depth = 0usize;
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth = depth
                        .checked_sub(1)
                        .ok_or_else(|| GroupError::ElementSyntax(s.to_string()))?
                }
                ',' if depth == 0 => {
                    items.push(&s[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        items.push(&s[start..]);
        let elements = items
            .into_iter()
            .filter(|t| !t.trim().is_empty())
            .map(|t| self.parse_element(t))
            .collect::<Result<Vec<_>, _>>()?;
        GroupSubset::new(self, elements)
    }

    /// Builds an element from residues that must already be reduced.
    pub fn element(&self, residues: Vec<usize>) -> Result<GroupElement, GroupError> {
        let g = GroupElement { residues };
        self.check(&g)?;
        Ok(g)
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.residues.len() == self.orders.len()
            && g.residues.iter().zip(&self.orders).all(|(&r, &n)| r < n)
    }

    fn check(&self, g: &GroupElement) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(GroupError::NotAMember {
                element: g.to_string(),
                group: self.to_string(),
            })
        }
    }

    pub fn index_of(&self, g: &GroupElement) -> usize {
        debug_assert!(self.contains(g));
        g.residues
            .iter()
            .zip(&self.orders)
            .fold(0, |acc, (&r, &n)| acc * n + r)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        debug_assert!(index < self.order());
        let mut residues = vec![0; self.orders.len()];
        for (slot, &n) in residues.iter_mut().zip(&self.orders).rev() {
            *slot = index % n;
            index /= n;
        }
        GroupElement { residues }
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |i| self.element_at(i))
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.add_unchecked(g, h))
    }

    pub fn neg(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        Ok(self.neg_unchecked(g))
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.add_unchecked(g, &self.neg_unchecked(h)))
    }

    fn add_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let residues = g
            .residues
            .iter()
            .zip(&h.residues)
            .zip(&self.orders)
            .map(|((&a, &b), &n)| (a + b) % n)
            .collect();
        GroupElement { residues }
    }

    fn neg_unchecked(&self, g: &GroupElement) -> GroupElement {
        let residues = g
            .residues
            .iter()
            .zip(&self.orders)
            .map(|(&a, &n)| (n - a) % n)
            .collect();
        GroupElement { residues }
    }

    /// Sum of two elements given by index.
    pub fn add_idx(&self, mut i: usize, mut j: usize) -> usize {
        let mut out = 0;
        let mut scale = 1;
        for &n in self.orders.iter().rev() {
            out += ((i % n + j % n) % n) * scale;
            scale *= n;
            i /= n;
            j /= n;
        }
        out
    }

    pub fn neg_idx(&self, mut i: usize) -> usize {
        let mut out = 0;
        let mut scale = 1;
        for &n in self.orders.iter().rev() {
            out += ((n - i % n) % n) * scale;
            scale *= n;
            i /= n;
        }
        out
    }

    pub fn sub_idx(&self, i: usize, j: usize) -> usize {
        self.add_idx(i, self.neg_idx(j))
    }

    /// Number of elements of order exactly two.
    pub fn order2_count(&self) -> usize {
        self.orders
            .iter()
            .map(|&n| if n % 2 == 0 { 2 } else { 1 })
            .product::<usize>()
            - 1
    }

    /// All `a` with `a + a = c`, as indices in ascending order.
    pub fn halves_idx(&self, c: usize) -> Vec<usize> {
        let target = self.element_at(c);
        // Per component: solutions of 2x = t (mod n).
        let mut per_component: Vec<Vec<usize>> = Vec::with_capacity(self.orders.len());
        for (&t, &n) in target.residues.iter().zip(&self.orders) {
            let sols = if n % 2 == 1 {
                // 2 is invertible, inverse is (n+1)/2.
                vec![t * n.div_ceil(2) % n]
            } else if t % 2 == 0 {
                vec![t / 2, t / 2 + n / 2]
            } else {
                Vec::new()
            };
            if sols.is_empty() {
                return Vec::new();
            }
            per_component.push(sols);
        }
        let mut out = vec![0usize];
        for (sols, &n) in per_component.iter().zip(&self.orders) {
            out = out
                .iter()
                .flat_map(|&prefix| sols.iter().map(move |&s| prefix * n + s))
                .collect();
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.orders.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "Z{n}")?;
        }
        Ok(())
    }
}

impl FromStr for AbelianGroup {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GroupError::Parse(s.to_string());
        let lowered = s.trim().to_ascii_lowercase();
        if lowered.is_empty() {
            return Err(err());
        }
        let mut orders = Vec::new();
        for factor in lowered.split('x') {
            let digits = factor.trim().strip_prefix('z').ok_or_else(err)?;
            let n: usize = digits.trim().parse().map_err(|_| err())?;
            orders.push(n);
        }
        AbelianGroup::new(orders)
    }
}

/// A set of elements of one group, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSubset {
    group: AbelianGroup,
    elements: Vec<GroupElement>,
}

impl GroupSubset {
    /// Rejects foreign and repeated elements.
    pub fn new(group: &AbelianGroup, elements: Vec<GroupElement>) -> Result<Self, GroupError> {
        for g in &elements {
            group.check(g)?;
        }
        let mut sorted = elements;
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(GroupError::Duplicate(w[0].to_string()));
        }
        Ok(Self {
            group: group.clone(),
            elements: sorted,
        })
    }

    /// Builds the set from element indices, collapsing repeats.
    pub fn from_indices(group: &AbelianGroup, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut idx: Vec<usize> = indices.into_iter().collect();
        idx.sort_unstable();
        idx.dedup();
        Self {
            group: group.clone(),
            elements: idx.into_iter().map(|i| group.element_at(i)).collect(),
        }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    /// Element indices, ascending.
    pub fn indices(&self) -> Vec<usize> {
        self.elements
            .iter()
            .map(|g| self.group.index_of(g))
            .collect()
    }

    fn same_group(&self, other: &AbelianGroup) -> Result<(), GroupError> {
        if &self.group == other {
            Ok(())
        } else {
            Err(GroupError::Mismatch {
                left: self.group.to_string(),
                right: other.to_string(),
            })
        }
    }

    /// `B + a`.
    pub fn translate(&self, a: &GroupElement) -> Result<GroupSubset, GroupError> {
        self.group.check(a)?;
        let shifted = self
            .elements
            .iter()
            .map(|b| self.group.add_unchecked(b, a))
            .collect();
        GroupSubset::new(&self.group, shifted)
    }

    /// `-B`.
    pub fn negate(&self) -> GroupSubset {
        let negated = self
            .elements
            .iter()
            .map(|b| self.group.neg_unchecked(b))
            .collect();
        GroupSubset::new(&self.group, negated).expect("negation is a bijection")
    }

    pub fn intersects(&self, other: &GroupSubset) -> Result<bool, GroupError> {
        self.same_group(&other.group)?;
        Ok(self.elements.iter().any(|g| other.contains(g)))
    }
}

impl fmt::Display for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

/// Every `a` for which `B + a` meets its own negative, i.e. `b1 + b2 + 2a = 0`
/// for some `b1, b2` in `B` (possibly equal).
pub fn bad_translations(block: &GroupSubset) -> GroupSubset {
    let group = block.group();
    let idx = block.indices();
    let mut bad = Vec::new();
    for (i, &b1) in idx.iter().enumerate() {
        for &b2 in &idx[i..] {
            let target = group.neg_idx(group.add_idx(b1, b2));
            bad.extend(group.halves_idx(target));
        }
    }
    GroupSubset::from_indices(group, bad)
}

/// Upper bound `2^C k^2` on the number of bad translations of a `k`-subset,
/// saturating at `u128::MAX`.
pub fn bad_translation_bound(group: &AbelianGroup, k: usize) -> u128 {
    let c = group.order2_count() as u32;
    let k2 = (k as u128) * (k as u128);
    1u128
        .checked_shl(c)
        .filter(|_| c < 128)
        .and_then(|p| p.checked_mul(k2))
        .unwrap_or(u128::MAX)
}

/// Every `a` for which `B + a` meets `X`.
pub fn blocking_translations(
    block: &GroupSubset,
    forbidden: &GroupSubset,
) -> Result<GroupSubset, GroupError> {
    block.same_group(&forbidden.group)?;
    let group = block.group();
    let bs = block.indices();
    let hits = forbidden
        .indices()
        .into_iter()
        .flat_map(|x| bs.iter().map(move |&b| group.sub_idx(x, b)))
        .collect::<Vec<_>>();
    Ok(GroupSubset::from_indices(group, hits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> AbelianGroup {
        AbelianGroup::cyclic(n).unwrap()
    }

    fn set(g: &AbelianGroup, xs: &[usize]) -> GroupSubset {
        GroupSubset::from_indices(g, xs.iter().copied())
    }

    // Oracle: scan every translation.
    fn bad_by_scan(block: &GroupSubset) -> Vec<usize> {
        let g = block.group();
        (0..g.order())
            .filter(|&a| {
                let t = block.translate(&g.element_at(a)).unwrap();
                t.intersects(&t.negate()).unwrap()
            })
            .collect()
    }

    #[test]
    fn element_parsing() {
        let z13: AbelianGroup = "Z13".parse().unwrap();
        assert_eq!(z13.parse_element("-1").unwrap().to_string(), "12");
        let b = z13.parse_subset("7, 8,11").unwrap();
        assert_eq!(b.indices(), vec![7, 8, 11]);
        assert!(z13.parse_subset("1,14").is_err());
        assert!(z13.parse_element("(1,2)").is_err());
        let g: AbelianGroup = "Z2xZ4".parse().unwrap();
        let b = g.parse_subset("(0,1),(1,3)").unwrap();
        assert_eq!(
            b.to_string(),
            g.parse_subset(&b.to_string()).unwrap().to_string()
        );
        assert!(g.parse_element("3").is_err());
        assert!(g.parse_subset("(0,1").is_err());
    }

    #[test]
    fn parse_and_display() {
        let g: AbelianGroup = "Z2xZ4".parse().unwrap();
        assert_eq!(g.orders(), &[2, 4]);
        assert_eq!(g.order(), 8);
        assert_eq!(g.to_string(), "Z2xZ4");
        assert_eq!("z3XZ3xz7".parse::<AbelianGroup>().unwrap().order(), 63);
        assert!("Z".parse::<AbelianGroup>().is_err());
        assert!("Z0".parse::<AbelianGroup>().is_err());
        assert!("13".parse::<AbelianGroup>().is_err());
        assert!("".parse::<AbelianGroup>().is_err());
    }

    #[test]
    fn index_roundtrip_is_lexicographic() {
        let g: AbelianGroup = "Z3xZ2xZ4".parse().unwrap();
        let all: Vec<_> = g.elements().collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        for (i, e) in all.iter().enumerate() {
            assert_eq!(g.index_of(e), i);
        }
    }

    #[test]
    fn negation_examples() {
        let g = z(13);
        assert_eq!(set(&g, &[7, 8, 11]).negate(), set(&g, &[6, 5, 2]));
        let h: AbelianGroup = "Z2xZ4".parse().unwrap();
        let x = h.element(vec![1, 3]).unwrap();
        assert_eq!(h.neg(&x).unwrap(), h.element(vec![1, 1]).unwrap());
    }

    #[test]
    fn translate_by_zero_is_identity() {
        let g = z(13);
        let b = set(&g, &[7, 8, 11]);
        assert_eq!(b.translate(&g.zero()).unwrap(), b);
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        let b = set(&z(7), &[0, 1, 3]);
        assert!(b.translate(&z(13).element(vec![9]).unwrap()).is_err());
        assert!(blocking_translations(&b, &set(&z(13), &[1])).is_err());
        assert!(z(7)
            .add(&z(7).zero(), &z(13).element(vec![9]).unwrap())
            .is_err());
    }

    #[test]
    fn duplicate_elements_are_rejected() {
        let g = z(5);
        let e = g.element(vec![1]).unwrap();
        assert!(GroupSubset::new(&g, vec![e.clone(), e]).is_err());
    }

    #[test]
    fn order2_counts() {
        assert_eq!(z(13).order2_count(), 0);
        assert_eq!("Z2xZ2".parse::<AbelianGroup>().unwrap().order2_count(), 3);
        assert_eq!(z(12).order2_count(), 1);
        // Enumeration oracle on a few groups.
        for name in ["Z2xZ2", "Z12", "Z2xZ4xZ3", "Z8", "Z2xZ2xZ2"] {
            let g: AbelianGroup = name.parse().unwrap();
            let brute = (1..g.order()).filter(|&i| g.add_idx(i, i) == 0).count();
            assert_eq!(g.order2_count(), brute, "{name}");
        }
    }

    #[test]
    fn bad_translations_z13() {
        let g = z(13);
        let bad = bad_translations(&set(&g, &[7, 8, 11]));
        assert_eq!(bad.len(), 6);
        assert_eq!(bad.indices(), bad_by_scan(&set(&g, &[7, 8, 11])));
        assert_eq!(bad_translations(&set(&g, &[0])).indices(), vec![0]);
    }

    #[test]
    fn elementary_abelian_two_group_is_all_bad() {
        let g: AbelianGroup = "Z2xZ2xZ2".parse().unwrap();
        let bad = bad_translations(&set(&g, &[1, 6]));
        assert_eq!(bad.len(), g.order());
    }

    #[test]
    fn bad_translations_matches_scan_on_mixed_groups() {
        for name in ["Z12", "Z2xZ6", "Z4xZ3", "Z15"] {
            let g: AbelianGroup = name.parse().unwrap();
            for start in 0..g.order() {
                let b = set(
                    &g,
                    &[start, (start * 5 + 1) % g.order(), (start + 3) % g.order()],
                );
                assert_eq!(
                    bad_translations(&b).indices(),
                    bad_by_scan(&b),
                    "{name} {b}"
                );
            }
        }
    }

    #[test]
    fn blocking_examples() {
        let g = z(15);
        let b = set(&g, &[0, 1, 4]);
        let x = set(&g, &[0, 5, 10]);
        let blocked = blocking_translations(&b, &x).unwrap();
        assert!(blocked.len() <= 9);
        assert!(!blocked.contains(&g.element(vec![2]).unwrap()));

        let g7 = z(7);
        let blocked = blocking_translations(&set(&g7, &[0, 1, 3]), &set(&g7, &[0])).unwrap();
        assert_eq!(blocked.indices(), vec![0, 4, 6]);

        let empty = GroupSubset::from_indices(&g7, []);
        assert!(blocking_translations(&set(&g7, &[0, 1, 3]), &empty)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn halving_in_even_cyclic_group() {
        let g = z(12);
        assert_eq!(g.halves_idx(4), vec![2, 8]);
        assert!(g.halves_idx(3).is_empty());
        assert_eq!(z(7).halves_idx(3), vec![5]);
    }

    #[test]
    fn bound_saturates() {
        let g: AbelianGroup = "Z2xZ2xZ2xZ2xZ2xZ2xZ2xZ2".parse().unwrap();
        assert_eq!(bad_translation_bound(&g, 3), u128::MAX);
        assert_eq!(bad_translation_bound(&z(13), 3), 9);
        assert_eq!(bad_translation_bound(&z(12), 3), 18);
    }
}
