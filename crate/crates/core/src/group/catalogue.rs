use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{GroupError, MonomialUnitary};
use crate::numerics::SeededRng;

pub const DEFAULT_CAP: usize = 1_000_000;

/// Finite group of monomial unitaries, stored in canonical (sorted) order.
#[derive(Debug, Clone)]
pub struct GroupCatalogue {
    elements: Vec<MonomialUnitary>,
    index: HashMap<MonomialUnitary, usize>,
}

/// Breadth-first closure of `generators` under right multiplication.
///
/// In a finite group the inverse of `g` is a positive power of `g`, so
/// closing under products alone yields the generated group.
pub fn enumerate_group(generators: &[MonomialUnitary], cap: usize) -> Result<GroupCatalogue, GroupError> {
    let n = generators.first().map_or(1, MonomialUnitary::dim);
    if generators.iter().any(|g| g.dim() != n) {
        return Err(GroupError::DimensionMismatch);
    }
    let id = MonomialUnitary::identity(n);
    let mut seen: HashSet<MonomialUnitary> = HashSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = g.mul(s);
            if !seen.contains(&h) {
                if seen.len() >= cap {
                    return Err(GroupError::CapExceeded { cap, found: seen.len() });
                }
                seen.insert(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(GroupCatalogue::from_elements(seen.into_iter().collect()))
}

impl GroupCatalogue {
    fn from_elements(mut elements: Vec<MonomialUnitary>) -> Self {
        elements.sort();
        let index = elements.iter().enumerate().map(|(k, g)| (g.clone(), k)).collect();
        Self { elements, index }
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[MonomialUnitary] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &MonomialUnitary {
        &self.elements[k]
    }

    pub fn index_of(&self, g: &MonomialUnitary) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &MonomialUnitary) -> bool {
        self.index.contains_key(g)
    }

    pub fn identity_index(&self) -> usize {
        let n = self.elements[0].dim();
        self.index[&MonomialUnitary::identity(n)]
    }

    pub fn product(&self, x: usize, y: usize) -> Result<usize, GroupError> {
        self.index_of(&self.elements[x].mul(&self.elements[y]))
            .ok_or(GroupError::NotAnElement)
    }

    pub fn inverse(&self, x: usize) -> Result<usize, GroupError> {
        self.index_of(&self.elements[x].inverse()).ok_or(GroupError::NotAnElement)
    }

    /// Full table; `size²` entries, so meant for groups of at most a few thousand elements.
    pub fn multiplication_table(&self) -> Result<MultiplicationTable, GroupError> {
        let n = self.size();
        let mut entries = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                entries.push(self.product(x, y)? as u32);
            }
        }
        Ok(MultiplicationTable { size: n, entries })
    }

    /// Elements commuting with every element.
    pub fn center(&self) -> Vec<usize> {
        (0..self.size())
            .filter(|&x| self.elements.iter().all(|g| self.elements[x].commutes_with(g)))
            .collect()
    }

    /// Element order → number of elements of that order.
    pub fn order_histogram(&self) -> BTreeMap<u64, usize> {
        let mut h = BTreeMap::new();
        for g in &self.elements {
            *h.entry(g.element_order()).or_insert(0) += 1;
        }
        h
    }

    /// True when both catalogues hold the same set of elements.
    pub fn same_elements(&self, other: &GroupCatalogue) -> bool {
        self.elements == other.elements
    }

    /// JSON list of `{"index", "shift", "phases"}` objects.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Entry<'a> {
            index: usize,
            shift: u32,
            phases: &'a [u32],
        }
        let list: Vec<Entry> = self
            .elements
            .iter()
            .enumerate()
            .map(|(index, g)| Entry {
                index,
                shift: g.shift(),
                phases: g.phases(),
            })
            .collect();
        serde_json::to_value(list).expect("plain data serializes")
    }

    /// Long-form CSV `x,y,product` of the multiplication table.
    pub fn write_table_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "x,y,product")?;
        for x in 0..self.size() {
            for y in 0..self.size() {
                let p = self.product(x, y).map_err(|e| std::io::Error::other(e.to_string()))?;
                writeln!(out, "{x},{y},{p}")?;
            }
        }
        Ok(())
    }
}

/// Cayley table of a finite group on elements `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicationTable {
    size: usize,
    entries: Vec<u32>,
}

impl MultiplicationTable {
    pub fn new(size: usize, entries: Vec<u32>) -> Result<Self, String> {
        let t = Self { size, entries };
        t.validate()?;
        Ok(t)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn product(&self, x: usize, y: usize) -> usize {
        self.entries[x * self.size + y] as usize
    }

    /// Checks shape, range, the Latin-square property and the existence of an identity.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.size;
        if n == 0 {
            return Err("empty table".into());
        }
        if self.entries.len() != n * n {
            return Err(format!("{} entries for {n} elements", self.entries.len()));
        }
        if let Some(e) = self.entries.iter().find(|&&e| e as usize >= n) {
            return Err(format!("entry {e} out of range"));
        }
        for x in 0..n {
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for y in 0..n {
                let r = self.product(x, y);
                let c = self.product(y, x);
                if row[r] || col[c] {
                    return Err(format!("row or column {x} repeats an element"));
                }
                row[r] = true;
                col[c] = true;
            }
        }
        if self.identity().is_none() {
            return Err("no identity element".into());
        }
        Ok(())
    }

    pub fn identity(&self) -> Option<usize> {
        (0..self.size).find(|&e| (0..self.size).all(|x| self.product(e, x) == x && self.product(x, e) == x))
    }

    /// Number of sampled triples violating `(xy)z = x(yz)`.
    pub fn associativity_failures(&self, samples: usize, rng: &mut SeededRng) -> usize {
        let n = self.size as u64;
        (0..samples)
            .filter(|_| {
                let x = rng.below(n) as usize;
                let y = rng.below(n) as usize;
                let z = rng.below(n) as usize;
                self.product(self.product(x, y), z) != self.product(x, self.product(y, z))
            })
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_of_shift() {
        let c = enumerate_group(&[MonomialUnitary::shift_x(3)], DEFAULT_CAP).unwrap();
        assert_eq!(c.size(), 3);
    }

    #[test]
    fn cap_is_enforced() {
        let gens = MonomialUnitary::alice_generators(4);
        match enumerate_group(&gens, 10) {
            Err(GroupError::CapExceeded { cap: 10, found }) => assert_eq!(found, 10),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn table_validation_catches_non_latin() {
        assert!(MultiplicationTable::new(2, vec![0, 1, 1, 1]).is_err());
        assert!(MultiplicationTable::new(2, vec![0, 1, 1, 0]).is_ok());
        assert!(MultiplicationTable::new(2, vec![0, 1, 1, 2]).is_err());
    }

    #[test]
    fn dihedral_table_is_a_group() {
        let c = enumerate_group(&MonomialUnitary::alice_generators(2), DEFAULT_CAP).unwrap();
        assert_eq!(c.size(), 8);
        let t = c.multiplication_table().unwrap();
        t.validate().unwrap();
        assert_eq!(t.identity(), Some(c.identity_index()));
        let mut rng = SeededRng::new(1);
        assert_eq!(t.associativity_failures(500, &mut rng), 0);
        // D4 has a center of order 2 and orders {1:1, 2:5, 4:2}.
        assert_eq!(c.center().len(), 2);
        let h = c.order_histogram();
        assert_eq!(h.get(&2), Some(&5));
        assert_eq!(h.get(&4), Some(&2));
    }

    #[test]
    fn csv_export_has_all_products() {
        let c = enumerate_group(&[MonomialUnitary::shift_x(3)], DEFAULT_CAP).unwrap();
        let mut buf = Vec::new();
        c.write_table_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        assert!(text.starts_with("x,y,product\n"));
    }
}
