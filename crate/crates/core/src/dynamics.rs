//! Actions, word actions, cycles, the no-exit test, Condition (L),
//! ultrafilter cycles, and word ideals.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::Error;
use crate::lattice::{Algebra, AtomId, AtomSet, Ideal, Ultrafilter};

pub type LetterId = u8;

/// One action of the system: a per-atom image map with pairwise
/// disjoint atom images. On a finite Boolean algebra this is exactly
/// the condition that the induced set map preserves ∩, ∪, \ and ∅, so
/// invalid inputs are rejected at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    images: Vec<AtomSet>,
}

impl Action {
    pub fn new(alg: &Algebra, images: Vec<AtomSet>) -> Result<Self, Error> {
        if images.len() != alg.atom_count() {
            return Err(Error::Invalid("one image per atom required".into()));
        }
        let mut seen = alg.empty();
        for (a, img) in images.iter().enumerate() {
            if img.intersects(&seen) {
                return Err(Error::Axiom(format!(
                    "non-disjoint atom images (atom index {a})"
                )));
            }
            seen = seen.join(img);
        }
        Ok(Action { images })
    }

    pub fn image_of_atom(&self, a: AtomId) -> AtomSet {
        self.images[a as usize]
    }

    pub fn apply(&self, set: &AtomSet) -> AtomSet {
        // θ(∅) = ∅ over the same universe as the images.
        let mut out = self.images[0].minus(&self.images[0]);
        for a in set.iter() {
            out = out.join(&self.images[a as usize]);
        }
        out
    }

    /// The unique atom whose image contains `b`, if any. Uniqueness is
    /// exactly the pairwise disjointness of atom images.
    pub fn preimage_atom(&self, b: AtomId) -> Option<AtomId> {
        self.images
            .iter()
            .position(|img| img.contains(b))
            .map(|i| i as AtomId)
    }
}

/// A finite word over the alphabet. The empty word is allowed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct Word(pub Vec<LetterId>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: LetterId) -> Self {
        Word(vec![l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeat(&self, k: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            v.extend_from_slice(&self.0);
        }
        Word(v)
    }

    /// `self` is a beginning of `other`.
    pub fn is_beginning_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// If `other = self · rest`, return `rest`.
    pub fn strip_beginning(&self, other: &Word) -> Option<Word> {
        if self.is_beginning_of(other) {
            Some(Word(other.0[self.0.len()..].to_vec()))
        } else {
            None
        }
    }

    pub fn comparable(&self, other: &Word) -> bool {
        self.is_beginning_of(other) || other.is_beginning_of(self)
    }

    /// The subword `w_{i..=j}` (1-based, inclusive); empty when `j < i`.
    pub fn slice(&self, i: usize, j: usize) -> Word {
        if j < i {
            Word::empty()
        } else {
            Word(self.0[i - 1..j].to_vec())
        }
    }

    pub fn display<'a>(&'a self, sys: &'a Gbds) -> impl fmt::Display + 'a {
        DisplayWord { word: self, sys }
    }
}

struct DisplayWord<'a> {
    word: &'a Word,
    sys: &'a Gbds,
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "e");
        }
        for &l in &self.word.0 {
            write!(f, "{}", self.sys.letter_name(l))?;
        }
        Ok(())
    }
}

/// A candidate cycle: a nonempty word together with a nonempty base set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CyclePair {
    pub word: Word,
    pub base: AtomSet,
}

/// A generalized Boolean dynamical system over a finite algebra and a
/// finite alphabet: one action per letter and one principal ideal
/// generator per letter with θ_letter(⊤) below it.
#[derive(Clone, Debug)]
pub struct Gbds {
    algebra: Algebra,
    letter_names: Vec<String>,
    actions: Vec<Action>,
    ideal_gens: Vec<AtomSet>,
}

impl Gbds {
    pub fn new(
        algebra: Algebra,
        letter_names: Vec<String>,
        actions: Vec<Action>,
        ideal_gens: Vec<AtomSet>,
    ) -> Result<Self, Error> {
        if letter_names.is_empty() {
            return Err(Error::Invalid(
                "an alphabet needs at least one letter".into(),
            ));
        }
        for (i, l) in letter_names.iter().enumerate() {
            if letter_names[..i].contains(l) {
                return Err(Error::Invalid(format!("duplicate letter `{l}`")));
            }
        }
        if actions.len() != letter_names.len() || ideal_gens.len() != letter_names.len() {
            return Err(Error::Invalid(
                "one action and one ideal per letter required".into(),
            ));
        }
        let sys = Gbds {
            algebra,
            letter_names,
            actions,
            ideal_gens,
        };
        for l in sys.letters() {
            let range = sys.action(l).apply(&sys.algebra.top());
            if !range.leq(&sys.ideal_gens[l as usize]) {
                return Err(Error::Axiom(format!(
                    "action range of `{}` not contained in its ideal",
                    sys.letter_name(l)
                )));
            }
        }
        Ok(sys)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn letter_count(&self) -> usize {
        self.letter_names.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = LetterId> + '_ {
        (0..self.letter_count()).map(|i| i as LetterId)
    }

    pub fn letter_name(&self, l: LetterId) -> &str {
        &self.letter_names[l as usize]
    }

    pub fn letter_by_name(&self, name: &str) -> Option<LetterId> {
        self.letter_names
            .iter()
            .position(|n| n == name)
            .map(|i| i as LetterId)
    }

    pub fn action(&self, l: LetterId) -> &Action {
        &self.actions[l as usize]
    }

    pub fn letter_ideal_gen(&self, l: LetterId) -> AtomSet {
        self.ideal_gens[l as usize]
    }

    /// θ_w, with the first letter applied first: θ_{uv}(A) = θ_v(θ_u(A)).
    pub fn apply_word(&self, w: &Word, set: &AtomSet) -> AtomSet {
        let mut cur = *set;
        for &l in &w.0 {
            cur = self.actions[l as usize].apply(&cur);
        }
        cur
    }

    /// Δ_B: the letters acting nonzero on `B`.
    pub fn active_letters(&self, set: &AtomSet) -> BTreeSet<LetterId> {
        self.letters()
            .filter(|&l| !self.action(l).apply(set).is_empty())
            .collect()
    }

    /// A set is regular when each of its atoms admits at least one
    /// letter; the alphabet is finite, so the finiteness half of the
    /// condition is automatic (a documented assumption, not a check).
    /// ∅ counts as regular.
    pub fn is_regular(&self, set: &AtomSet) -> bool {
        set.iter()
            .all(|a| !self.active_letters(&self.algebra.singleton(a)).is_empty())
    }

    /// Whether (w, base) is a cycle: θ_w fixes every subset of `base`.
    ///
    /// Equivalent to fixing every atom of `base`: atoms generate all
    /// subsets under joins and θ_w preserves joins, so fixing the atoms
    /// fixes every subset; conversely atoms are themselves subsets.
    pub fn is_cycle(&self, word: &Word, base: &AtomSet) -> bool {
        assert!(
            !word.is_empty() && !base.is_empty(),
            "cycle needs nonempty word and base"
        );
        base.iter().all(|a| {
            let s = self.algebra.singleton(a);
            self.apply_word(word, &s) == s
        })
    }

    /// Whether the cycle (w, base) has no exits: at every position t
    /// along the cycle, every atom of θ_{w_{1..t}}(base) admits exactly
    /// the next cycle letter. The atom-level check suffices because Δ
    /// of a set is the union of the Δ's of its atoms, and regularity of
    /// the intermediate sets is implied by the singleton Δ's.
    ///
    /// Panics if (w, base) is not a cycle.
    pub fn has_no_exits(&self, word: &Word, base: &AtomSet) -> bool {
        assert!(self.is_cycle(word, base), "has_no_exits requires a cycle");
        let n = word.len();
        let mut cur = *base;
        for t in 1..=n {
            cur = self.action(word.0[t - 1]).apply(&cur);
            let next = if t == n { word.0[0] } else { word.0[t] };
            for b in cur.iter() {
                let delta = self.active_letters(&self.algebra.singleton(b));
                if delta.len() != 1 || !delta.contains(&next) {
                    return false;
                }
            }
        }
        true
    }

    /// Ultrafilter cycle test for (w, ξ_a): θ_w(A) ∈ ξ_a for all A ∈ ξ_a.
    /// For an atom filter this reduces to a ⊆ θ_w(a): the singleton {a}
    /// is in the filter, and monotonicity gives the rest.
    pub fn is_ultrafilter_cycle(&self, word: &Word, eta: Ultrafilter) -> bool {
        assert!(!word.is_empty(), "ultrafilter cycle needs a nonempty word");
        let s = self.algebra.singleton(eta.0);
        s.leq(&self.apply_word(word, &s))
    }

    /// The alternate ultrafilter-cycle predicate: A ∩ θ_w(A) ≠ ∅ for
    /// every member A of the filter. Kept separate so the equivalence
    /// of the two forms can be tested rather than assumed.
    pub fn is_ultrafilter_cycle_by_intersection(&self, word: &Word, eta: Ultrafilter) -> bool {
        assert!(!word.is_empty(), "ultrafilter cycle needs a nonempty word");
        self.algebra
            .elements()
            .filter(|a| eta.contains(a))
            .all(|a| a.intersects(&self.apply_word(word, &a)))
    }

    /// The word ideal I_w, as its principal generator. I_∅ = the whole
    /// algebra; for w = w_1 w_2 ⋯ w_n the ideal is the smallest one
    /// containing θ_{w_2 ⋯ w_n}(I_{w_1}), i.e. the principal ideal of
    /// θ_{w_2 ⋯ w_n}(g_{w_1}).
    pub fn word_ideal(&self, w: &Word) -> Ideal {
        if w.is_empty() {
            return Ideal::principal(self.algebra.top());
        }
        let head_gen = self.ideal_gens[w.0[0] as usize];
        let rest = Word(w.0[1..].to_vec());
        Ideal::principal(self.apply_word(&rest, &head_gen))
    }

    /// Whether the word is realizable (its word ideal is nonzero).
    pub fn word_is_realizable(&self, w: &Word) -> bool {
        !self.word_ideal(w).is_zero()
    }

    /// Decide Condition (L): no cycle with no exits.
    ///
    /// Deterministic search. For each nonempty base set A the no-exit
    /// condition forces the trajectory completely: every atom of the
    /// current set must admit exactly one letter, all atoms must agree
    /// on it, and no atom image may split into two atoms or die
    /// (splitting is permanent because disjoint nonempty sets stay
    /// disjoint and nonempty under forced steps, and a dead image
    /// contradicts the forced letter being admitted). The per-atom
    /// images therefore form an injection atoms(A) → atoms at every
    /// step, and a no-exit cycle over A is exactly a return of that
    /// injection to the identity. Tracking visited injections makes the
    /// walk terminate; exhausting all base sets without a return proves
    /// no no-exit cycle exists, because a no-exit cycle (w, A) would
    /// make the walk from A follow w and return to the identity.
    pub fn condition_l(&self) -> ConditionL {
        let mut examined = 0usize;
        for base in self.algebra.elements() {
            if base.is_empty() {
                continue;
            }
            examined += 1;
            if let Some(word) = self.forced_no_exit_walk(&base) {
                debug_assert!(self.is_cycle(&word, &base) && self.has_no_exits(&word, &base));
                return ConditionL::Fails {
                    witness: CyclePair { word, base },
                };
            }
        }
        ConditionL::Holds {
            bases_examined: examined,
        }
    }

    /// The forced walk from one base set; `Some(word)` when it closes
    /// into a no-exit cycle over exactly this base.
    fn forced_no_exit_walk(&self, base: &AtomSet) -> Option<Word> {
        let start: Vec<AtomId> = base.iter().collect();
        let mut current: Vec<AtomId> = start.clone();
        let mut word = Vec::new();
        let mut visited: BTreeSet<Vec<AtomId>> = BTreeSet::new();
        visited.insert(current.clone());
        loop {
            // the single letter every atom of the current set admits
            let mut forced = None;
            for &a in &current {
                let delta = self.active_letters(&self.algebra.singleton(a));
                if delta.len() != 1 {
                    return None;
                }
                let l = *delta.iter().next().unwrap();
                match forced {
                    None => forced = Some(l),
                    Some(f) if f != l => return None,
                    _ => {}
                }
            }
            let l = forced?;
            let mut next = Vec::with_capacity(current.len());
            for &a in &current {
                let img = self.action(l).apply(&self.algebra.singleton(a));
                // split or death: the walk can never return to the identity
                next.push(img.the_atom()?);
            }
            word.push(l);
            current = next;
            if current == start {
                return Some(Word(word));
            }
            if !visited.insert(current.clone()) {
                return None;
            }
        }
    }

    /// Every cycle word of length ≤ `max_len`, with its maximal base
    /// (the join of all fixed atoms) and the atoms whose singleton
    /// cycle has no exits. A pair (w, A) is a cycle iff A is below the
    /// maximal base, and has no exits iff every atom of A is a no-exit
    /// atom.
    pub fn cycles_up_to(&self, max_len: usize) -> Vec<CycleReport> {
        let mut out = Vec::new();
        for word in self.words_up_to(max_len) {
            if word.is_empty() {
                continue;
            }
            let fixed: Vec<AtomId> = self
                .algebra
                .atoms()
                .filter(|&a| {
                    let s = self.algebra.singleton(a);
                    self.apply_word(&word, &s) == s
                })
                .collect();
            if fixed.is_empty() {
                continue;
            }
            let base = self.algebra.set_from(fixed.iter().copied());
            let no_exit_atoms = self.algebra.set_from(fixed.iter().copied().filter(|&a| {
                let s = self.algebra.singleton(a);
                self.has_no_exits(&word, &s)
            }));
            out.push(CycleReport {
                word,
                max_base: base,
                no_exit_atoms,
            });
        }
        out
    }

    /// All words of length 0..=n in length-then-letter order.
    pub fn words_up_to(&self, n: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &layer {
                for l in self.letters() {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

/// Outcome of the Condition (L) decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConditionL {
    /// Every cycle has an exit; the search examined every nonempty
    /// base set.
    Holds { bases_examined: usize },
    /// A cycle with no exits exists.
    Fails { witness: CyclePair },
}

impl ConditionL {
    pub fn holds(&self) -> bool {
        matches!(self, ConditionL::Holds { .. })
    }
}

#[derive(Clone, Debug)]
pub struct CycleReport {
    pub word: Word,
    pub max_base: AtomSet,
    pub no_exit_atoms: AtomSet,
}
