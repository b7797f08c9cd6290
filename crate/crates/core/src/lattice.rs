//! Finite Boolean algebra core.
//!
//! The algebra is presented by a list of atoms; elements are atom
//! subsets stored as bitmasks, so meets, joins, relative complements,
//! ultrafilters and (principal) ideals are all exactly computable.

use std::fmt;

use crate::error::Error;

pub type AtomId = u8;

pub const MAX_ATOMS: usize = 32;

/// A finite Boolean algebra, presented by its atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    atom_names: Vec<String>,
}

impl Algebra {
    pub fn new(atom_names: Vec<String>) -> Result<Self, Error> {
        if atom_names.is_empty() {
            return Err(Error::Invalid("an algebra needs at least one atom".into()));
        }
        if atom_names.len() > MAX_ATOMS {
            return Err(Error::Invalid(format!(
                "at most {MAX_ATOMS} atoms supported"
            )));
        }
        for (i, a) in atom_names.iter().enumerate() {
            if atom_names[..i].contains(a) {
                return Err(Error::Invalid(format!("duplicate atom name `{a}`")));
            }
        }
        Ok(Algebra { atom_names })
    }

    pub fn atom_count(&self) -> usize {
        self.atom_names.len()
    }

    pub fn atom_name(&self, a: AtomId) -> &str {
        &self.atom_names[a as usize]
    }

    pub fn atom_by_name(&self, name: &str) -> Option<AtomId> {
        self.atom_names
            .iter()
            .position(|n| n == name)
            .map(|i| i as AtomId)
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        (0..self.atom_count()).map(|i| i as AtomId)
    }

    pub fn empty(&self) -> AtomSet {
        AtomSet {
            bits: 0,
            universe: self.atom_count() as u8,
        }
    }

    pub fn top(&self) -> AtomSet {
        let n = self.atom_count();
        AtomSet {
            bits: full_mask(n),
            universe: n as u8,
        }
    }

    pub fn singleton(&self, a: AtomId) -> AtomSet {
        assert!((a as usize) < self.atom_count(), "atom out of range");
        AtomSet {
            bits: 1 << a,
            universe: self.atom_count() as u8,
        }
    }

    pub fn set_from(&self, atoms: impl IntoIterator<Item = AtomId>) -> AtomSet {
        let mut s = self.empty();
        for a in atoms {
            assert!((a as usize) < self.atom_count(), "atom out of range");
            s.bits |= 1 << a;
        }
        s
    }

    /// Every element of the algebra, ∅ first, ⊤ last.
    pub fn elements(&self) -> impl Iterator<Item = AtomSet> + '_ {
        let n = self.atom_count() as u8;
        (0..=full_mask(self.atom_count())).map(move |bits| AtomSet { bits, universe: n })
    }

    /// One ultrafilter per atom: in a finite Boolean algebra these are
    /// exactly the principal filters of atoms.
    pub fn ultrafilters(&self) -> Vec<Ultrafilter> {
        self.atoms().map(Ultrafilter).collect()
    }

    /// The Stone set `Z(A)`: ultrafilters containing `A`, realized as
    /// the atoms of `A`.
    pub fn stone_set(&self, a: &AtomSet) -> Vec<Ultrafilter> {
        a.iter().map(Ultrafilter).collect()
    }
}

fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// An element of the algebra: a subset of atoms.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomSet {
    bits: u32,
    universe: u8,
}

impl AtomSet {
    fn check_same(&self, other: &AtomSet) {
        assert_eq!(
            self.universe, other.universe,
            "atom sets over different algebras"
        );
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains(&self, a: AtomId) -> bool {
        self.bits & (1 << a) != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = AtomId> + '_ {
        let bits = self.bits;
        (0..32u8).filter(move |a| bits & (1 << a) != 0)
    }

    /// The unique atom of a singleton set.
    pub fn the_atom(&self) -> Option<AtomId> {
        if self.len() == 1 {
            self.iter().next()
        } else {
            None
        }
    }

    pub fn meet(&self, other: &AtomSet) -> AtomSet {
        self.check_same(other);
        AtomSet {
            bits: self.bits & other.bits,
            universe: self.universe,
        }
    }

    pub fn join(&self, other: &AtomSet) -> AtomSet {
        self.check_same(other);
        AtomSet {
            bits: self.bits | other.bits,
            universe: self.universe,
        }
    }

    /// Relative complement `self \ other`.
    pub fn minus(&self, other: &AtomSet) -> AtomSet {
        self.check_same(other);
        AtomSet {
            bits: self.bits & !other.bits,
            universe: self.universe,
        }
    }

    /// The order `self ⊆ other`, i.e. `self ∩ other = self`.
    pub fn leq(&self, other: &AtomSet) -> bool {
        self.check_same(other);
        self.bits & other.bits == self.bits
    }

    pub fn intersects(&self, other: &AtomSet) -> bool {
        self.check_same(other);
        self.bits & other.bits != 0
    }

    /// All subsets of `self`, ∅ included.
    pub fn subsets(&self) -> Vec<AtomSet> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut sub = self.bits;
        loop {
            out.push(AtomSet {
                bits: sub,
                universe: self.universe,
            });
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & self.bits;
        }
        out.reverse(); // ∅ first
        out
    }

    pub fn display<'a>(&'a self, alg: &'a Algebra) -> impl fmt::Display + 'a {
        DisplaySet { set: self, alg }
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AtomSet({:b})", self.bits)
    }
}

struct DisplaySet<'a> {
    set: &'a AtomSet,
    alg: &'a Algebra,
}

impl fmt::Display for DisplaySet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.set.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.alg.atom_name(a))?;
        }
        write!(f, "}}")
    }
}

/// An ultrafilter `ξ_a = {A : a ∈ A}`, identified by its atom.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Ultrafilter(pub AtomId);

impl Ultrafilter {
    pub fn contains(&self, a: &AtomSet) -> bool {
        a.contains(self.0)
    }

    /// The members of the filter, as explicit sets.
    pub fn members(&self, alg: &Algebra) -> Vec<AtomSet> {
        alg.elements().filter(|s| self.contains(s)).collect()
    }
}

/// An ideal of the algebra. Every ideal of a finite Boolean algebra is
/// principal, so it is stored by its generator: membership is the
/// single comparison `A ⊆ gen`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Ideal {
    gen: AtomSet,
}

impl Ideal {
    pub fn principal(gen: AtomSet) -> Self {
        Ideal { gen }
    }

    pub fn gen(&self) -> AtomSet {
        self.gen
    }

    pub fn contains(&self, a: &AtomSet) -> bool {
        a.leq(&self.gen)
    }

    /// Ideal intersection is generator meet.
    pub fn intersect(&self, other: &Ideal) -> Ideal {
        Ideal {
            gen: self.gen.meet(&other.gen),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.gen.is_empty()
    }
}

/// The up-set `↑F` of a family of sets, within the whole algebra.
pub fn up_set(alg: &Algebra, family: &[AtomSet]) -> Vec<AtomSet> {
    assert!(!family.is_empty(), "up-set of the empty family");
    alg.elements()
        .filter(|b| family.iter().any(|a| a.leq(b)))
        .collect()
}

/// The relative up-set `↑_I F`: members of `↑F` that lie in the ideal.
pub fn up_set_in_ideal(alg: &Algebra, family: &[AtomSet], ideal: &Ideal) -> Vec<AtomSet> {
    up_set(alg, family)
        .into_iter()
        .filter(|b| ideal.contains(b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_atoms() -> Algebra {
        Algebra::new(vec!["1".into(), "2".into()]).unwrap()
    }

    #[test]
    fn element_ops_examples() {
        let alg = two_atoms();
        let a1 = alg.singleton(0);
        let a2 = alg.singleton(1);
        assert!(a1.meet(&a2).is_empty());
        assert_eq!(a1.join(&a2).minus(&a1), a2);
        assert!(a1.leq(&a1.join(&a2)));
    }

    #[test]
    #[should_panic(expected = "different algebras")]
    fn mismatched_algebras_rejected() {
        let alg = two_atoms();
        let other = Algebra::new(vec!["v".into()]).unwrap();
        let _ = alg.top().meet(&other.top());
    }

    #[test]
    fn ultrafilters_enumerate_atoms() {
        let alg = two_atoms();
        let us = alg.ultrafilters();
        assert_eq!(us.len(), 2);
        assert_eq!(alg.stone_set(&alg.top()), us);
        assert!(alg.stone_set(&alg.empty()).is_empty());
    }

    #[test]
    fn up_set_examples() {
        let alg = two_atoms();
        let a1 = alg.singleton(0);
        // ↑{{1}} in P({1,2}) = {{1},{1,2}}
        assert_eq!(up_set(&alg, &[a1]), vec![a1, alg.top()]);
        // ↑ restricted to ↓{1} = {{1}}
        let ideal = Ideal::principal(a1);
        assert_eq!(up_set_in_ideal(&alg, &[a1], &ideal), vec![a1]);
        // ↑{⊤} = {⊤}
        assert_eq!(up_set(&alg, &[alg.top()]), vec![alg.top()]);
    }

    #[test]
    fn ideal_membership_is_principal() {
        let alg = two_atoms();
        let ideal = Ideal::principal(alg.singleton(0));
        for s in alg.elements() {
            assert_eq!(ideal.contains(&s), s.leq(&alg.singleton(0)));
        }
    }

    #[test]
    fn distributivity_and_relcomp_exhaustive() {
        let alg = two_atoms();
        let els: Vec<_> = alg.elements().collect();
        for x in &els {
            for y in &els {
                for z in &els {
                    assert_eq!(x.meet(&y.join(z)), x.meet(y).join(&x.meet(z)));
                }
                // (y \ x) ∩ x = ∅ and (y \ x) ∪ (x ∩ y) = y
                assert!(y.minus(x).meet(x).is_empty());
                assert_eq!(y.minus(x).join(&x.meet(y)), *y);
            }
        }
    }

    #[test]
    fn ultrafilter_prime_equivalences_exhaustive() {
        // ξ ultrafilter ⟺ prime ⟺ {A : A∩B ≠ ∅ ∀B ∈ ξ} ⊆ ξ, checked on
        // every atom filter of a 3-atom algebra.
        let alg = Algebra::new(vec!["x".into(), "y".into(), "z".into()]).unwrap();
        let els: Vec<_> = alg.elements().collect();
        for u in alg.ultrafilters() {
            for a in &els {
                for b in &els {
                    if u.contains(&a.join(b)) {
                        assert!(u.contains(a) || u.contains(b));
                    }
                }
            }
            for a in &els {
                let meets_all = els
                    .iter()
                    .filter(|b| u.contains(b))
                    .all(|b| a.intersects(b));
                if meets_all {
                    assert!(u.contains(a));
                }
            }
        }
    }

    #[test]
    fn subsets_enumeration() {
        let alg = two_atoms();
        assert_eq!(alg.top().subsets().len(), 4);
        assert_eq!(alg.empty().subsets(), vec![alg.empty()]);
    }
}
