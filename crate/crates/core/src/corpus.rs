//! Random small systems and the per-system invariant suite used by
//! the corpus command and the acceptance checks.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{Action, Gbds, Word};
use crate::genalg::{self, enumerate_triples, orthogonalize, refine_family, AlgElement, GenTriple};
use crate::groupoid::{self, kappa, oracle_product_check};
use crate::lattice::Algebra;
use crate::paths::composable_paths;
use crate::scalar::Scalar;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random system: 1–4 atoms, 1–3 letters, actions sampled as random
/// disjoint assignments (each target atom picks at most one source),
/// ideal generators sampled above the action range.
pub fn random_system(rng: &mut ChaCha8Rng) -> Gbds {
    let atom_count = rng.gen_range(1..=4usize);
    let letter_count = rng.gen_range(1..=3usize);
    random_system_sized(rng, atom_count, letter_count)
}

pub fn random_system_sized(rng: &mut ChaCha8Rng, atom_count: usize, letter_count: usize) -> Gbds {
    let atom_names: Vec<String> = (1..=atom_count).map(|i| i.to_string()).collect();
    let algebra = Algebra::new(atom_names).unwrap();
    let letter_names: Vec<String> = (0..letter_count)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let mut actions = Vec::new();
    for _ in 0..letter_count {
        let mut images = vec![algebra.empty(); atom_count];
        for target in algebra.atoms() {
            // at most one source per target keeps images disjoint
            let pick = rng.gen_range(0..=atom_count);
            if pick > 0 {
                let src = pick - 1;
                images[src] = images[src].join(&algebra.singleton(target));
            }
        }
        actions.push(Action::new(&algebra, images).unwrap());
    }
    let mut ideal_gens = Vec::new();
    for action in &actions {
        let mut g = action.apply(&algebra.top());
        for a in algebra.atoms() {
            if rng.gen_bool(0.25) {
                g = g.join(&algebra.singleton(a));
            }
        }
        ideal_gens.push(g);
    }
    Gbds::new(algebra, letter_names, actions, ideal_gens).unwrap()
}

/// A random valid generator with words up to the given length, if the
/// system admits one at this size.
pub fn random_triple(sys: &Gbds, rng: &mut ChaCha8Rng, max_word: usize) -> Option<GenTriple> {
    for _ in 0..64 {
        let li = rng.gen_range(0..=max_word);
        let ri = rng.gen_range(0..=max_word);
        let left = random_word(sys, rng, li);
        let right = random_word(sys, rng, ri);
        let carrier = sys
            .word_ideal(&left)
            .gen()
            .meet(&sys.word_ideal(&right).gen());
        if carrier.is_empty() {
            continue;
        }
        let atoms: Vec<_> = carrier.iter().collect();
        let mut set = sys.algebra().empty();
        for &a in &atoms {
            if rng.gen_bool(0.5) {
                set = set.join(&sys.algebra().singleton(a));
            }
        }
        if set.is_empty() {
            set = sys
                .algebra()
                .singleton(atoms[rng.gen_range(0..atoms.len())]);
        }
        return GenTriple::new(sys, left, set, right).ok();
    }
    None
}

fn random_word(sys: &Gbds, rng: &mut ChaCha8Rng, len: usize) -> Word {
    Word(
        (0..len)
            .map(|_| rng.gen_range(0..sys.letter_count()) as u8)
            .collect(),
    )
}

/// A random element with at most `max_terms` terms and small integer
/// coefficients.
pub fn random_element(
    sys: &Gbds,
    rng: &mut ChaCha8Rng,
    max_terms: usize,
    max_word: usize,
) -> AlgElement {
    let n = rng.gen_range(1..=max_terms);
    let mut out = AlgElement::zero();
    for _ in 0..n {
        if let Some(t) = random_triple(sys, rng, max_word) {
            let c = Scalar::from_int(rng.gen_range(-3..=3i64));
            out.add_term(t, c);
        }
    }
    out
}

/// One named check of the invariant suite.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Run the cross-cutting invariants on one system. `oracle_pairs`
/// controls how many random product pairs feed the convolution
/// cross-check.
pub fn run_invariant_suite(
    sys: &Gbds,
    rng: &mut ChaCha8Rng,
    oracle_pairs: usize,
) -> Vec<CheckResult> {
    let mut out = Vec::new();

    // action laws on every pair of elements
    {
        let els: Vec<_> = sys.algebra().elements().collect();
        let mut cases = 0;
        let mut failures = 0;
        for l in sys.letters() {
            let th = sys.action(l);
            for a in &els {
                for b in &els {
                    cases += 1;
                    let ok = th.apply(&a.meet(b)) == th.apply(a).meet(&th.apply(b))
                        && th.apply(&a.join(b)) == th.apply(a).join(&th.apply(b))
                        && th.apply(&b.minus(a)) == th.apply(b).minus(&th.apply(a));
                    if !ok {
                        failures += 1;
                    }
                }
            }
        }
        out.push(CheckResult {
            name: "action-homomorphism",
            cases,
            failures,
        });
    }

    // the two ultrafilter-cycle predicates agree (words ≤ 4)
    {
        let mut cases = 0;
        let mut failures = 0;
        for word in sys.words_up_to(4) {
            if word.is_empty() {
                continue;
            }
            for u in sys.algebra().ultrafilters() {
                cases += 1;
                if sys.is_ultrafilter_cycle(&word, u)
                    != sys.is_ultrafilter_cycle_by_intersection(&word, u)
                {
                    failures += 1;
                }
            }
        }
        out.push(CheckResult {
            name: "ultrafilter-cycle-forms",
            cases,
            failures,
        });
    }

    // loops are ultrafilter cycles of the label at the end atom
    {
        let mut cases = 0;
        let mut failures = 0;
        for layer in composable_paths(sys, 4).iter().skip(1) {
            for p in layer {
                cases += 1;
                let a = p.domain_atom().unwrap();
                if p.is_loop()
                    != sys.is_ultrafilter_cycle(&p.label(), crate::lattice::Ultrafilter(a))
                {
                    failures += 1;
                }
            }
        }
        out.push(CheckResult {
            name: "loop-ultrafilter-cycle",
            cases,
            failures,
        });
    }

    // rewriting product vs groupoid convolution
    {
        let mut cases = 0;
        let mut failures = 0;
        for _ in 0..oracle_pairs {
            let (Some(x), Some(y)) = (random_triple(sys, rng, 2), random_triple(sys, rng, 2))
            else {
                continue;
            };
            cases += 1;
            if !oracle_product_check(
                sys,
                &AlgElement::from_triple(x),
                &AlgElement::from_triple(y),
            ) {
                failures += 1;
            }
        }
        out.push(CheckResult {
            name: "product-oracle",
            cases,
            failures,
        });
    }

    // orthogonalization on sampled families
    {
        let mut cases = 0;
        let mut failures = 0;
        for _ in 0..4 {
            let size = rng.gen_range(1..=4usize);
            let family: Vec<GenTriple> = (0..size)
                .filter_map(|_| random_triple(sys, rng, 2))
                .map(|t| GenTriple::new(sys, t.left.clone(), t.set, t.left.clone()).unwrap())
                .collect();
            if family.is_empty() {
                continue;
            }
            cases += 1;
            if !orthogonalization_sound(sys, &family) {
                failures += 1;
            }
        }
        out.push(CheckResult {
            name: "orthogonalization",
            cases,
            failures,
        });
    }

    // representation relations under the groupoid image
    {
        let (cases, failures) = representation_relations(sys);
        out.push(CheckResult {
            name: "representation-relations",
            cases,
            failures,
        });
    }

    // the four-way effectiveness record is internally consistent
    {
        let report = groupoid::effectiveness_suite(sys, 3);
        out.push(CheckResult {
            name: "effectiveness-consistency",
            cases: 1,
            failures: if report.consistent { 0 } else { 1 },
        });
    }

    out
}

/// Refine a family, orthogonalize, and check pairwise orthogonality
/// plus the reconstruction identity for every input member, all
/// through the groupoid oracle.
pub fn orthogonalization_sound(sys: &Gbds, family: &[GenTriple]) -> bool {
    let Ok(refined) = refine_family(sys, family) else {
        return false;
    };
    let qs = orthogonalize(sys, &refined);
    for (i, u) in refined.members().iter().enumerate() {
        for v in refined.members().iter().skip(i + 1) {
            let prod = qs[u].mul(sys, &qs[v]);
            if !groupoid::oracle_equal(sys, &prod, &AlgElement::zero()) {
                return false;
            }
        }
    }
    for x in family {
        let mut sum = AlgElement::zero();
        for v in refined.members() {
            if genalg::diag_leq(sys, v, x) {
                sum = sum.add(&qs[v]);
            }
        }
        if !groupoid::oracle_equal(sys, &AlgElement::from_triple(x.clone()), &sum) {
            return false;
        }
    }
    true
}

/// Check the four defining relations of a representation as pointwise
/// identities of groupoid functions. The range relation is restricted
/// to regular sets.
pub fn representation_relations(sys: &Gbds) -> (usize, usize) {
    let mut cases = 0;
    let mut failures = 0;
    let els: Vec<_> = sys.algebra().elements().collect();
    let proj = |s| match GenTriple::projection(sys, s) {
        Ok(t) => AlgElement::from_triple(t),
        Err(_) => AlgElement::zero(),
    };

    // products and joins of projections
    for a in &els {
        for b in &els {
            cases += 1;
            let lhs = kappa(sys, &proj(a.meet(b)));
            let rhs = kappa(sys, &proj(*a)).convolve(sys, &kappa(sys, &proj(*b)));
            if !lhs.fn_equal(sys, &rhs) {
                failures += 1;
            }
            cases += 1;
            let join = kappa(sys, &proj(a.join(b)));
            let sum = kappa(sys, &proj(*a))
                .add(sys, &kappa(sys, &proj(*b)))
                .add(sys, &kappa(sys, &proj(a.meet(b))).scale(&-Scalar::one()));
            if !join.fn_equal(sys, &sum) {
                failures += 1;
            }
        }
    }

    // intertwining: p_A s_{l,B} = s_{l,B} p_{θ_l(A)}
    for l in sys.letters() {
        for a in &els {
            for b in sys.letter_ideal_gen(l).subsets() {
                if b.is_empty() {
                    continue;
                }
                let s =
                    AlgElement::from_triple(GenTriple::isometry(sys, Word::letter(l), b).unwrap());
                cases += 1;
                let lhs = kappa(sys, &proj(*a)).convolve(sys, &kappa(sys, &s));
                let rhs = kappa(sys, &s).convolve(sys, &kappa(sys, &proj(sys.action(l).apply(a))));
                if !lhs.fn_equal(sys, &rhs) {
                    failures += 1;
                }
            }
        }
    }

    // adjoint products: s*_{l,B} s_{l',B'} = δ p_{B∩B'}
    for l in sys.letters() {
        for l2 in sys.letters() {
            for b in sys.letter_ideal_gen(l).subsets() {
                if b.is_empty() {
                    continue;
                }
                for b2 in sys.letter_ideal_gen(l2).subsets() {
                    if b2.is_empty() {
                        continue;
                    }
                    let s = kappa(
                        sys,
                        &AlgElement::from_triple(
                            GenTriple::isometry(sys, Word::letter(l), b).unwrap(),
                        ),
                    );
                    let s2 = kappa(
                        sys,
                        &AlgElement::from_triple(
                            GenTriple::isometry(sys, Word::letter(l2), b2).unwrap(),
                        ),
                    );
                    cases += 1;
                    let lhs = s.adjoint(sys).convolve(sys, &s2);
                    let rhs = if l == l2 {
                        kappa(sys, &proj(b.meet(&b2)))
                    } else {
                        groupoid::GroupoidFn::zero()
                    };
                    if !lhs.fn_equal(sys, &rhs) {
                        failures += 1;
                    }
                }
            }
        }
    }

    // range relation on regular sets
    for a in &els {
        if a.is_empty() || !sys.is_regular(a) {
            continue;
        }
        cases += 1;
        let mut sum = groupoid::GroupoidFn::zero();
        for l in sys.active_letters(a) {
            let img = sys.action(l).apply(a);
            let t = GenTriple::new(sys, Word::letter(l), img, Word::letter(l)).unwrap();
            sum = sum.add(sys, &kappa(sys, &AlgElement::from_triple(t)));
        }
        if !kappa(sys, &proj(*a)).fn_equal(sys, &sum) {
            failures += 1;
        }
    }

    (cases, failures)
}

/// Exhaustive core-generator enumeration used by sampling tests: all
/// core generators with word lengths within the bound.
pub fn core_generators(sys: &Gbds, max_word: usize) -> Vec<GenTriple> {
    enumerate_triples(sys, max_word)
        .into_iter()
        .filter(|t| genalg::in_abelian_core(sys, t))
        .collect()
}
