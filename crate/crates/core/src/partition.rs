//! Partitions of the sample space and their classicality predicates,
//! including the construction of the principle classical partition from fat
//! co-events.

use num_rational::BigRational;
use num_traits::Zero;

use crate::coevent::primitive_duals;
use crate::error::{Error, Result};
use crate::event::{full_mask, Event};
use crate::theory::{propagate_down, HistoriesTheory};

/// Pairwise-disjoint nonempty blocks covering the sample space, ordered by
/// least member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    blocks: Vec<Event>,
}

impl Partition {
    pub fn new(n: usize, mut blocks: Vec<Event>) -> Result<Self> {
        let mut covered = 0u32;
        for b in &blocks {
            if b.space_size() != n {
                return Err(Error::SpaceMismatch {
                    left: b.space_size(),
                    right: n,
                });
            }
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if covered & b.bits() != 0 {
                return Err(Error::InvalidPartition(format!(
                    "block {b} overlaps another block"
                )));
            }
            covered |= b.bits();
        }
        if covered != full_mask(n) {
            return Err(Error::InvalidPartition(format!(
                "blocks cover {covered:#x}, not the whole space {:#x}",
                full_mask(n)
            )));
        }
        blocks.sort_by_key(|b| b.bits().trailing_zeros());
        Ok(Partition { n, blocks })
    }

    /// Partition into single histories.
    pub fn singletons(n: usize) -> Self {
        Partition {
            n,
            blocks: (0..n).map(|i| Event::singleton(n, i)).collect(),
        }
    }

    /// The one-block partition `{Omega}`.
    pub fn trivial(n: usize) -> Self {
        Partition {
            n,
            blocks: vec![Event::full(n)],
        }
    }

    pub fn space_size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Event] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub(crate) fn check_space(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::SpaceMismatch {
                left: self.n,
                right: n,
            });
        }
        Ok(())
    }

    /// The block containing a history.
    pub fn block_of(&self, history: usize) -> Option<Event> {
        self.blocks.iter().copied().find(|b| b.contains(history))
    }

    /// All unions of blocks: the subalgebra the partition generates.
    pub fn block_unions(&self) -> Vec<Event> {
        let k = self.blocks.len();
        let mut unions = vec![Event::empty(self.n); 1 << k];
        for mask in 1..(1usize << k) {
            let low = mask.trailing_zeros() as usize;
            unions[mask] = unions[mask & (mask - 1)].union(self.blocks[low]);
        }
        unions
    }
}

/// Every partition of an `n`-history space, in restricted-growth order.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn grow(n: usize, labels: &mut Vec<usize>, blocks: usize, out: &mut Vec<Partition>) {
        if labels.len() == n {
            let mut bits = vec![0u32; blocks];
            for (i, &l) in labels.iter().enumerate() {
                bits[l] |= 1 << i;
            }
            let blocks = bits.into_iter().map(|b| Event::from_bits(n, b)).collect();
            out.push(Partition { n, blocks });
            return;
        }
        for label in 0..=blocks {
            labels.push(label);
            grow(n, labels, blocks.max(label + 1), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    grow(n, &mut Vec::with_capacity(n), 0, &mut out);
    out
}

/// True when every block of `coarse` is a union of blocks of `fine`.
pub fn refines(fine: &Partition, coarse: &Partition) -> Result<bool> {
    fine.check_space(coarse.n)?;
    Ok(coarse.blocks.iter().all(|c| {
        let inside = fine
            .blocks
            .iter()
            .filter(|f| f.is_subset_of(*c))
            .fold(Event::empty(fine.n), |acc, f| acc.union(*f));
        inside == *c
    }))
}

/// Exact decoherence: `D(X, Y) = 0` for every pair of distinct blocks.
pub fn is_decoherent(theory: &HistoriesTheory, partition: &Partition) -> Result<bool> {
    partition.check_space(theory.size())?;
    if !theory.is_decoherence_form() {
        return Err(Error::NotDecoherenceForm);
    }
    let blocks = partition.blocks();
    for (i, x) in blocks.iter().enumerate() {
        for y in &blocks[i + 1..] {
            if !theory.decoherence(*x, *y)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// For every null `Z` and block `A`, either `Z` misses `A` or some null event
/// inside `A` contains `Z ∩ A` (non-strict containment).
pub fn is_preclusively_separable(theory: &HistoriesTheory, partition: &Partition) -> Result<bool> {
    partition.check_space(theory.size())?;
    let n = theory.size();
    let table = theory.mu_table()?;
    let nulls: Vec<usize> = (0..table.len()).filter(|&m| table[m].is_zero()).collect();
    for block in partition.blocks() {
        let a = block.bits() as usize;
        // Subsets of A covered by a null event lying inside A.
        let mut covered = vec![false; table.len()];
        for &z in &nulls {
            if z & !a == 0 {
                covered[z] = true;
            }
        }
        propagate_down(n, &mut covered);
        if nulls.iter().any(|&z| z & a != 0 && !covered[z & a]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every primitive (eps-)preclusive dual lies inside a single block.
pub fn is_classical_wrt_m(
    theory: &HistoriesTheory,
    partition: &Partition,
    eps: &BigRational,
) -> Result<bool> {
    partition.check_space(theory.size())?;
    let duals = primitive_duals(theory, eps)?;
    Ok(duals_inside_blocks(&duals, partition))
}

fn duals_inside_blocks(duals: &[Event], partition: &Partition) -> bool {
    duals
        .iter()
        .all(|d| partition.blocks().iter().any(|b| d.is_subset_of(*b)))
}

/// Intersection-equivalence classes of primitive duals and their unions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FatCoEventSet {
    /// Primitive duals grouped by class, each class ascending; classes in
    /// the order of their fat duals.
    pub classes: Vec<Vec<Event>>,
    /// Union of each class, ordered by least member.
    pub fat_duals: Vec<Event>,
    /// Histories covered by no primitive dual.
    pub uncovered: Event,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut i = i;
        while self.parent[i] != root {
            let next = self.parent[i];
            self.parent[i] = root;
            i = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Groups events into classes of the transitive closure of "intersects".
pub fn intersection_classes(n: usize, duals: &[Event]) -> FatCoEventSet {
    // Two duals are chained through intersecting duals exactly when their
    // members are connected in the graph joining the members of each dual,
    // so the union-find runs over histories.
    let mut sets = DisjointSets::new(n);
    let mut covered = Event::empty(n);
    for d in duals {
        covered = covered.union(*d);
        let mut members = d.members();
        if let Some(first) = members.next() {
            for m in members {
                sets.union(first, m);
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut classes: Vec<Vec<Event>> = Vec::new();
    let mut fat: Vec<Event> = Vec::new();
    for d in duals {
        let Some(first) = d.members().next() else {
            continue;
        };
        let root = sets.find(first);
        let slot = match roots.iter().position(|r| *r == root) {
            Some(slot) => slot,
            None => {
                roots.push(root);
                classes.push(Vec::new());
                fat.push(Event::empty(n));
                roots.len() - 1
            }
        };
        classes[slot].push(*d);
        fat[slot] = fat[slot].union(*d);
    }
    let mut order: Vec<usize> = (0..fat.len()).collect();
    order.sort_by_key(|&i| fat[i].bits().trailing_zeros());
    let classes = order.iter().map(|&i| {
        let mut c = classes[i].clone();
        c.sort();
        c
    });
    FatCoEventSet {
        classes: classes.collect(),
        fat_duals: order.iter().map(|&i| fat[i]).collect(),
        uncovered: covered.complement(),
    }
}

/// The finest partition classical with respect to the primitive
/// (eps-)preclusive co-events: fat duals plus uncovered singletons.
pub fn principle_classical_partition(
    theory: &HistoriesTheory,
    eps: &BigRational,
) -> Result<(Partition, FatCoEventSet)> {
    let n = theory.size();
    let duals = primitive_duals(theory, eps)?;
    let fat = intersection_classes(n, &duals);
    let mut blocks = fat.fat_duals.clone();
    blocks.extend(fat.uncovered.members().map(|i| Event::singleton(n, i)));
    let partition = Partition::new(n, blocks)?;
    Ok((partition, fat))
}
