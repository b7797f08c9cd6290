//! The partial action of the free group on the boundary path space,
//! the transformation groupoid, and finitely supported functions on it.
//!
//! Finitely supported functions are the image of algebra elements
//! under the generator-to-indicator map, and their convolution gives
//! an independent implementation of the product. Pointwise equality of
//! such functions is decidable: membership in every support set is
//! prefix-local up to a known depth, every realizable prefix of that
//! depth extends to a boundary path, and the depth classes partition
//! the space, so comparing coefficients on depth classes decides
//! equality exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::dynamics::{ConditionL, Gbds, Word};
use crate::error::Error;
use crate::genalg::AlgElement;
use crate::lattice::AtomId;
use crate::paths::{
    all_edges, edges_with_range, is_singular, BoundaryPath, Cylinder, Edge, FinitePath,
    InfinitePath, Vertex,
};
use crate::scalar::Scalar;

// ---------------------------------------------------------------------------
// Free group elements
// ---------------------------------------------------------------------------

/// A freely reduced word over the alphabet and its formal inverses.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Default)]
pub struct GroupElem {
    letters: Vec<(u8, bool)>, // (letter, inverted)
}

impl GroupElem {
    pub fn identity() -> Self {
        GroupElem::default()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Free reduction of a raw signed-letter sequence.
    pub fn reduce(raw: impl IntoIterator<Item = (u8, bool)>) -> Self {
        let mut stack: Vec<(u8, bool)> = Vec::new();
        for x in raw {
            match stack.last() {
                Some(&(l, s)) if l == x.0 && s != x.1 => {
                    stack.pop();
                }
                _ => stack.push(x),
            }
        }
        GroupElem { letters: stack }
    }

    pub fn from_word(w: &Word) -> Self {
        GroupElem {
            letters: w.0.iter().map(|&l| (l, false)).collect(),
        }
    }

    /// The element w1 · w2^{-1}, reduced.
    pub fn transfer(w1: &Word, w2: &Word) -> Self {
        GroupElem::reduce(
            w1.0.iter()
                .map(|&l| (l, false))
                .chain(w2.0.iter().rev().map(|&l| (l, true))),
        )
    }

    pub fn inverse(&self) -> Self {
        GroupElem {
            letters: self.letters.iter().rev().map(|&(l, s)| (l, !s)).collect(),
        }
    }

    pub fn mul(&self, other: &GroupElem) -> Self {
        GroupElem::reduce(self.letters.iter().chain(other.letters.iter()).copied())
    }

    /// Split as a positive word followed by an inverted positive word,
    /// when the element has that shape. Only such elements have a
    /// nonempty domain in the partial action.
    pub fn as_transfer(&self) -> Option<(Word, Word)> {
        let split = self
            .letters
            .iter()
            .position(|&(_, s)| s)
            .unwrap_or(self.letters.len());
        if self.letters[split..].iter().any(|&(_, s)| !s) {
            return None;
        }
        let pos = Word(self.letters[..split].iter().map(|&(l, _)| l).collect());
        let neg = Word(
            self.letters[split..]
                .iter()
                .rev()
                .map(|&(l, _)| l)
                .collect(),
        );
        Some((pos, neg))
    }

    pub fn display<'a>(&'a self, sys: &'a Gbds) -> impl fmt::Display + 'a {
        DisplayGroupElem { g: self, sys }
    }
}

struct DisplayGroupElem<'a> {
    g: &'a GroupElem,
    sys: &'a Gbds,
}

impl fmt::Display for DisplayGroupElem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.g.letters.is_empty() {
            return write!(f, "e");
        }
        match self.g.as_transfer() {
            Some((pos, neg)) if !neg.is_empty() => {
                write!(f, "{}/{}", pos.display(self.sys), neg.display(self.sys))
            }
            _ => {
                for (i, &(l, s)) in self.g.letters.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(
                        f,
                        "{}{}",
                        self.sys.letter_name(l),
                        if s { "^-1" } else { "" }
                    )?;
                }
                Ok(())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Domains and the partial action
// ---------------------------------------------------------------------------

/// Membership of a boundary path in the domain U_t.
pub fn in_domain(sys: &Gbds, t: &GroupElem, path: &BoundaryPath) -> bool {
    let Some((alpha, beta)) = t.as_transfer() else {
        return false;
    };
    let k = alpha.len();
    match (path.label_prefix(k), path.vertex_at(k)) {
        (Some(labels), Some(v)) => {
            if labels != alpha {
                return false;
            }
            // an empty coword puts no condition on the filter at the
            // cut; in particular U of the identity is the whole space
            if beta.is_empty() {
                return true;
            }
            match v {
                Vertex::Atom(b) => sys.word_ideal(&beta).contains(&sys.algebra().singleton(b)),
                Vertex::Infinity => false,
            }
        }
        _ => false,
    }
}

/// The backward edge chain that realizes a word ending at a given
/// atom: the unique composable `alpha`-labeled edge sequence whose
/// final atom is `end`.
fn glue_chain(sys: &Gbds, alpha: &Word, end: AtomId) -> Result<Vec<Edge>, Error> {
    let n = alpha.len();
    let mut atoms = vec![end];
    let mut cur = end;
    for i in (1..n).rev() {
        // range of the edge at position i+1 is the atom at position i
        let letter = alpha.0[i];
        match sys.action(letter).preimage_atom(cur) {
            Some(b) => {
                atoms.push(b);
                cur = b;
            }
            None => {
                return Err(Error::Domain(
                    "word cannot be traced back to a realizing path".into(),
                ))
            }
        }
    }
    atoms.reverse();
    let mut edges = Vec::with_capacity(n);
    for (i, &a) in atoms.iter().enumerate() {
        let letter = alpha.0[i];
        if !sys
            .algebra()
            .singleton(a)
            .leq(&sys.letter_ideal_gen(letter))
        {
            return Err(Error::Domain("traced atom escapes the letter ideal".into()));
        }
        edges.push(Edge { letter, atom: a });
    }
    Ok(edges)
}

/// Apply φ_t to a boundary path in U_{t^{-1}}: strip the inverted-part
/// prefix and glue the positive-part prefix recomputed backwards from
/// the atom at the cut.
pub fn apply_phi(sys: &Gbds, t: &GroupElem, path: &BoundaryPath) -> Result<BoundaryPath, Error> {
    if t.is_identity() {
        return Ok(path.clone());
    }
    if !in_domain(sys, &t.inverse(), path) {
        return Err(Error::Domain(
            "path outside the domain of the action".into(),
        ));
    }
    let (alpha, beta) = t
        .as_transfer()
        .expect("nonempty domain elements are transfers");
    let cut = path
        .vertex_at(beta.len())
        .and_then(|v| v.atom())
        .expect("domain membership pins an atom at the cut");
    let stripped = path.strip(sys, beta.len())?;
    if alpha.is_empty() {
        return Ok(stripped);
    }
    let chain = glue_chain(sys, &alpha, cut)?;
    stripped.glue(sys, chain)
}

// ---------------------------------------------------------------------------
// Depth classes and compact-open sets
// ---------------------------------------------------------------------------

/// All depth classes of the boundary space: composable length-`depth`
/// prefixes (plus, at depth 0, one class per range value), and the
/// finite boundary paths shorter than the depth. The classes partition
/// the space and each is nonempty.
pub fn classes_at_depth(sys: &Gbds, depth: usize) -> (Vec<FinitePath>, Vec<FinitePath>) {
    let layers = crate::paths::composable_paths(sys, depth);
    let mut long = Vec::new();
    let mut short = Vec::new();
    if depth == 0 {
        for a in sys.algebra().atoms() {
            long.push(FinitePath::at_vertex(a));
        }
        if all_edges(sys)
            .iter()
            .any(|e| e.range(sys) == Vertex::Infinity)
        {
            long.push(FinitePath::class_root(Vertex::Infinity));
        }
        return (long, short);
    }
    for (len, layer) in layers.iter().enumerate() {
        for p in layer {
            match p.domain_atom() {
                Some(a) if is_singular(sys, a) => {
                    if len < depth {
                        short.push(p.clone());
                    } else {
                        long.push(p.clone());
                    }
                }
                Some(_) if len == depth => long.push(p.clone()),
                _ => {}
            }
        }
    }
    (long, short)
}

/// One boundary path per depth class, extending long classes greedily
/// until a singular atom or a repeated atom closes a period.
pub fn class_representatives(sys: &Gbds, depth: usize) -> Vec<BoundaryPath> {
    let (long, short) = classes_at_depth(sys, depth);
    let mut out: Vec<BoundaryPath> = short.into_iter().map(BoundaryPath::Finite).collect();
    for class in long {
        out.push(representative_of(sys, &class));
    }
    out.sort();
    out
}

fn representative_of(sys: &Gbds, class: &FinitePath) -> BoundaryPath {
    let mut edges: Vec<Edge> = class.edges().to_vec();
    let mut cur: AtomId = match class.domain() {
        Vertex::Atom(a) => a,
        Vertex::Infinity => {
            // realize the class by any first edge at infinity
            let e = edges_with_range(sys, Vertex::Infinity)
                .into_iter()
                .next()
                .expect("infinity class is nonempty");
            edges.push(e);
            e.atom
        }
    };
    let base_len = edges.len();
    let mut visited: Vec<AtomId> = vec![cur];
    loop {
        if is_singular(sys, cur) {
            let p = if edges.is_empty() {
                FinitePath::at_vertex(cur)
            } else {
                FinitePath::from_edges(sys, edges).expect("walk composes")
            };
            return BoundaryPath::Finite(p);
        }
        let e = edges_with_range(sys, Vertex::Atom(cur))
            .into_iter()
            .next()
            .expect("regular atom admits an edge");
        edges.push(e);
        cur = e.atom;
        if let Some(i) = visited.iter().position(|&a| a == cur) {
            let cut = base_len + i;
            let prefix = edges[..cut].to_vec();
            let period = edges[cut..].to_vec();
            return BoundaryPath::Infinite(
                InfinitePath::new(sys, prefix, period).expect("closed walk is periodic"),
            );
        }
        visited.push(cur);
    }
}

/// A depth-bounded symbolic compact-open subset of the boundary space:
/// `long` holds length-`depth` prefix classes, `short` holds finite
/// boundary paths shorter than the depth.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CompactOpen {
    depth: usize,
    long: BTreeSet<FinitePath>,
    short: BTreeSet<FinitePath>,
}

impl CompactOpen {
    pub fn empty(depth: usize) -> Self {
        CompactOpen {
            depth,
            long: BTreeSet::new(),
            short: BTreeSet::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_empty(&self) -> bool {
        self.long.is_empty() && self.short.is_empty()
    }

    pub fn long(&self) -> &BTreeSet<FinitePath> {
        &self.long
    }

    pub fn short(&self) -> &BTreeSet<FinitePath> {
        &self.short
    }

    pub fn whole_space(sys: &Gbds) -> Self {
        let (long, short) = classes_at_depth(sys, 0);
        CompactOpen {
            depth: 0,
            long: long.into_iter().collect(),
            short: short.into_iter().collect(),
        }
    }

    pub fn from_cylinder(sys: &Gbds, cyl: &Cylinder) -> Self {
        let depth = cyl.word.len();
        let mut co = CompactOpen::empty(depth);
        if cyl.set.is_empty() {
            return co;
        }
        if depth == 0 {
            for a in cyl.set.iter() {
                co.long.insert(FinitePath::at_vertex(a));
            }
            return co;
        }
        // forward enumeration of labeled composable paths
        let mut layer: Vec<FinitePath> = Vec::new();
        let first = cyl.word.0[0];
        for a in sys.letter_ideal_gen(first).iter() {
            layer.push(
                FinitePath::from_edges(
                    sys,
                    vec![Edge {
                        letter: first,
                        atom: a,
                    }],
                )
                .unwrap(),
            );
        }
        for &letter in &cyl.word.0[1..] {
            let mut next = Vec::new();
            for p in &layer {
                let end = p.domain_atom().unwrap();
                let img = sys.action(letter).apply(&sys.algebra().singleton(end));
                for b in img.iter() {
                    next.push(p.extended(sys, Edge { letter, atom: b }).unwrap());
                }
            }
            layer = next;
        }
        for p in layer {
            if cyl.set.contains(p.domain_atom().unwrap()) {
                co.long.insert(p);
            }
        }
        co
    }

    pub fn contains(&self, sys: &Gbds, path: &BoundaryPath) -> bool {
        match path.len() {
            Some(l) if l < self.depth => match path {
                BoundaryPath::Finite(p) => self.short.contains(p),
                BoundaryPath::Infinite(_) => unreachable!("infinite paths have no length"),
            },
            _ => {
                if self.depth == 0 {
                    self.long.contains(&FinitePath::class_root(path.range()))
                } else {
                    match path.prefix_path(sys, self.depth) {
                        Some(prefix) => self.long.contains(&prefix),
                        None => false,
                    }
                }
            }
        }
    }

    /// Re-express at a larger depth; exact because refinement expands
    /// each class into the classes and short paths it contains.
    pub fn refined(&self, sys: &Gbds, to_depth: usize) -> CompactOpen {
        assert!(to_depth >= self.depth, "refinement only increases depth");
        if to_depth == self.depth {
            return self.clone();
        }
        let mut out = CompactOpen::empty(to_depth);
        out.short.extend(self.short.iter().cloned());
        for class in &self.long {
            let (long, short) = refine_class(sys, class, to_depth);
            out.long.extend(long);
            out.short.extend(short);
        }
        out
    }

    pub fn union(&self, sys: &Gbds, other: &CompactOpen) -> CompactOpen {
        let d = self.depth.max(other.depth);
        let a = self.refined(sys, d);
        let b = other.refined(sys, d);
        CompactOpen {
            depth: d,
            long: a.long.union(&b.long).cloned().collect(),
            short: a.short.union(&b.short).cloned().collect(),
        }
    }

    pub fn intersect(&self, sys: &Gbds, other: &CompactOpen) -> CompactOpen {
        let d = self.depth.max(other.depth);
        let a = self.refined(sys, d);
        let b = other.refined(sys, d);
        CompactOpen {
            depth: d,
            long: a.long.intersection(&b.long).cloned().collect(),
            short: a.short.intersection(&b.short).cloned().collect(),
        }
    }

    pub fn complement(&self, sys: &Gbds) -> CompactOpen {
        let (long, short) = classes_at_depth(sys, self.depth);
        CompactOpen {
            depth: self.depth,
            long: long
                .into_iter()
                .filter(|c| !self.long.contains(c))
                .collect(),
            short: short
                .into_iter()
                .filter(|c| !self.short.contains(c))
                .collect(),
        }
    }

    /// Set equality as subsets of the boundary space.
    pub fn same_set(&self, sys: &Gbds, other: &CompactOpen) -> bool {
        let d = self.depth.max(other.depth);
        self.refined(sys, d) == other.refined(sys, d)
    }
}

/// Expand a class at its own depth into classes and short paths at a
/// larger depth.
fn refine_class(
    sys: &Gbds,
    class: &FinitePath,
    to_depth: usize,
) -> (Vec<FinitePath>, Vec<FinitePath>) {
    let mut long = Vec::new();
    let mut short = Vec::new();
    let mut frontier = vec![class.clone()];
    loop {
        let mut next = Vec::new();
        for p in frontier {
            if p.len() == to_depth {
                long.push(p);
                continue;
            }
            match p.domain() {
                Vertex::Atom(a) if is_singular(sys, a) => {
                    // no extensions: the path itself is the only member
                    short.push(p);
                }
                v => {
                    for e in edges_with_range(sys, v) {
                        if p.is_empty() && p.root() == Vertex::Infinity {
                            next.push(
                                FinitePath::from_edges(sys, vec![e]).expect("edge is a path"),
                            );
                        } else {
                            next.push(p.extended(sys, e).expect("extension composes"));
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    (long, short)
}

/// Whether every member of a class lies in U_{βα^{-1}}; exact when the
/// class is at least |β| deep (the caller refines first).
fn class_in_strip_domain(sys: &Gbds, beta: &Word, alpha: &Word, p: &FinitePath) -> bool {
    let k = beta.len();
    if p.len() < k {
        return false;
    }
    if p.edges()[..k]
        .iter()
        .map(|e| e.letter)
        .ne(beta.0.iter().copied())
    {
        return false;
    }
    if alpha.is_empty() {
        return true;
    }
    match p.vertex_at(k) {
        Vertex::Atom(b) => sys.word_ideal(alpha).contains(&sys.algebra().singleton(b)),
        Vertex::Infinity => false,
    }
}

/// The prefix surgery on one class: strip |β| edges, glue the α-chain
/// ending at the cut atom. Classes map to classes bijectively.
fn transport_class(sys: &Gbds, alpha: &Word, beta: &Word, p: &FinitePath) -> Option<FinitePath> {
    if !class_in_strip_domain(sys, beta, alpha, p) {
        return None;
    }
    if alpha.is_empty() && beta.is_empty() {
        return Some(p.clone());
    }
    let cut = match p.vertex_at(beta.len()) {
        Vertex::Atom(b) => b,
        Vertex::Infinity => return None,
    };
    let tail = p.edges()[beta.len()..].to_vec();
    let mut edges = if alpha.is_empty() {
        Vec::new()
    } else {
        glue_chain(sys, alpha, cut).ok()?
    };
    edges.extend(tail);
    if edges.is_empty() {
        Some(FinitePath::class_root(Vertex::Atom(cut)))
    } else {
        Some(FinitePath::from_edges(sys, edges).expect("surgery output composes"))
    }
}

// ---------------------------------------------------------------------------
// Finitely supported functions on the groupoid
// ---------------------------------------------------------------------------

/// A linear combination of depth classes: a locally constant function
/// on the boundary space with known constancy depth.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimpleFn {
    depth: usize,
    long: BTreeMap<FinitePath, Scalar>,
    short: BTreeMap<FinitePath, Scalar>,
}

impl SimpleFn {
    pub fn zero(depth: usize) -> Self {
        SimpleFn {
            depth,
            long: BTreeMap::new(),
            short: BTreeMap::new(),
        }
    }

    pub fn indicator(co: &CompactOpen, coeff: &Scalar) -> Self {
        let mut f = SimpleFn::zero(co.depth);
        if coeff.is_zero() {
            return f;
        }
        for c in &co.long {
            f.long.insert(c.clone(), coeff.clone());
        }
        for c in &co.short {
            f.short.insert(c.clone(), coeff.clone());
        }
        f
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_zero(&self) -> bool {
        self.long.is_empty() && self.short.is_empty()
    }

    fn prune(&mut self) {
        self.long.retain(|_, c| !c.is_zero());
        self.short.retain(|_, c| !c.is_zero());
    }

    pub fn refined(&self, sys: &Gbds, to_depth: usize) -> SimpleFn {
        if to_depth == self.depth {
            return self.clone();
        }
        let mut out = SimpleFn::zero(to_depth);
        out.short
            .extend(self.short.iter().map(|(k, v)| (k.clone(), v.clone())));
        for (class, coeff) in &self.long {
            let (long, short) = refine_class(sys, class, to_depth);
            for c in long {
                out.long.insert(c, coeff.clone());
            }
            for c in short {
                out.short.insert(c, coeff.clone());
            }
        }
        out
    }

    pub fn add(&self, sys: &Gbds, other: &SimpleFn) -> SimpleFn {
        let d = self.depth.max(other.depth);
        let mut a = self.refined(sys, d);
        let b = other.refined(sys, d);
        for (k, v) in b.long {
            *a.long.entry(k).or_insert_with(Scalar::zero) += v;
        }
        for (k, v) in b.short {
            *a.short.entry(k).or_insert_with(Scalar::zero) += v;
        }
        a.prune();
        a
    }

    /// Pointwise product.
    pub fn mul(&self, sys: &Gbds, other: &SimpleFn) -> SimpleFn {
        let d = self.depth.max(other.depth);
        let a = self.refined(sys, d);
        let b = other.refined(sys, d);
        let mut out = SimpleFn::zero(d);
        for (k, v) in &a.long {
            if let Some(w) = b.long.get(k) {
                out.long.insert(k.clone(), v * w);
            }
        }
        for (k, v) in &a.short {
            if let Some(w) = b.short.get(k) {
                out.short.insert(k.clone(), v * w);
            }
        }
        out.prune();
        out
    }

    pub fn conj(&self) -> SimpleFn {
        SimpleFn {
            depth: self.depth,
            long: self
                .long
                .iter()
                .map(|(k, v)| (k.clone(), v.conj()))
                .collect(),
            short: self
                .short
                .iter()
                .map(|(k, v)| (k.clone(), v.conj()))
                .collect(),
        }
    }

    /// Push the function forward along φ_t, restricting to the domain
    /// U_{t^{-1}} first. Classes transport bijectively, so coefficients
    /// ride along.
    pub fn transported(&self, sys: &Gbds, t: &GroupElem) -> SimpleFn {
        let Some((alpha, beta)) = t.as_transfer() else {
            return SimpleFn::zero(0);
        };
        let working = self.refined(sys, self.depth.max(beta.len()));
        let out_depth = working.depth - beta.len() + alpha.len();
        let mut out = SimpleFn::zero(out_depth);
        for (class, coeff) in &working.long {
            if let Some(c) = transport_class(sys, &alpha, &beta, class) {
                out.long.insert(c, coeff.clone());
            }
        }
        for (p, coeff) in &working.short {
            if let Some(c) = transport_class(sys, &alpha, &beta, p) {
                out.short.insert(c, coeff.clone());
            }
        }
        out
    }

    pub fn eval(&self, sys: &Gbds, path: &BoundaryPath) -> Scalar {
        match path.len() {
            Some(l) if l < self.depth => match path {
                BoundaryPath::Finite(p) => self.short.get(p).cloned().unwrap_or_else(Scalar::zero),
                BoundaryPath::Infinite(_) => unreachable!(),
            },
            _ => {
                let key = if self.depth == 0 {
                    FinitePath::class_root(path.range())
                } else {
                    match path.prefix_path(sys, self.depth) {
                        Some(p) => p,
                        None => return Scalar::zero(),
                    }
                };
                self.long.get(&key).cloned().unwrap_or_else(Scalar::zero)
            }
        }
    }

    /// Whether the support lies inside U_t.
    pub fn supported_in(&self, sys: &Gbds, t: &GroupElem) -> bool {
        let Some((alpha, beta)) = t.as_transfer() else {
            return self.is_zero();
        };
        let working = self.refined(sys, self.depth.max(alpha.len()));
        working
            .long
            .keys()
            .chain(working.short.keys())
            .all(|c| class_in_strip_domain(sys, &alpha, &beta, c))
    }
}

/// A finitely supported function on the transformation groupoid: one
/// locally constant coefficient function per group element, each
/// supported in the element's domain.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GroupoidFn {
    parts: BTreeMap<GroupElem, SimpleFn>,
}

impl GroupoidFn {
    pub fn zero() -> Self {
        GroupoidFn::default()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> impl Iterator<Item = (&GroupElem, &SimpleFn)> {
        self.parts.iter()
    }

    pub fn add_part(&mut self, sys: &Gbds, t: GroupElem, f: SimpleFn) {
        assert!(
            f.supported_in(sys, &t),
            "support escapes the domain of its group element"
        );
        let merged = match self.parts.remove(&t) {
            Some(old) => old.add(sys, &f),
            None => f,
        };
        if !merged.is_zero() {
            self.parts.insert(t, merged);
        }
    }

    pub fn add(&self, sys: &Gbds, other: &GroupoidFn) -> GroupoidFn {
        let mut out = self.clone();
        for (t, f) in &other.parts {
            out.add_part(sys, t.clone(), f.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> GroupoidFn {
        if c.is_zero() {
            return GroupoidFn::zero();
        }
        let mut out = GroupoidFn::zero();
        for (t, f) in &self.parts {
            let mut g = f.clone();
            g.long = g.long.into_iter().map(|(k, v)| (k, &v * c)).collect();
            g.short = g.short.into_iter().map(|(k, v)| (k, &v * c)).collect();
            out.parts.insert(t.clone(), g);
        }
        out
    }

    /// The adjoint: conjugate, transport, and invert the coordinates.
    pub fn adjoint(&self, sys: &Gbds) -> GroupoidFn {
        let mut out = GroupoidFn::zero();
        for (t, f) in &self.parts {
            let ti = t.inverse();
            out.add_part(sys, ti.clone(), f.conj().transported(sys, &ti));
        }
        out
    }

    /// Convolution: bilinear extension of
    /// (f δ_s)(g δ_t) = φ̂_s(φ̂_{s^{-1}}(f) · g) δ_{st}.
    pub fn convolve(&self, sys: &Gbds, other: &GroupoidFn) -> GroupoidFn {
        let mut out = GroupoidFn::zero();
        for (s, f) in &self.parts {
            let pulled = f.transported(sys, &s.inverse());
            for (t, g) in &other.parts {
                let product = pulled.mul(sys, g);
                if product.is_zero() {
                    continue;
                }
                let pushed = product.transported(sys, s);
                if pushed.is_zero() {
                    continue;
                }
                out.add_part(sys, s.mul(t), pushed);
            }
        }
        out
    }

    /// Pointwise equality, decided on common refinements.
    pub fn fn_equal(&self, sys: &Gbds, other: &GroupoidFn) -> bool {
        let keys: BTreeSet<&GroupElem> = self.parts.keys().chain(other.parts.keys()).collect();
        for t in keys {
            match (self.parts.get(t), other.parts.get(t)) {
                (Some(a), Some(b)) => {
                    let d = a.depth().max(b.depth());
                    if a.refined(sys, d) != b.refined(sys, d) {
                        return false;
                    }
                }
                (Some(a), None) | (None, Some(a)) => {
                    if !a.is_zero() {
                        return false;
                    }
                }
                (None, None) => {}
            }
        }
        true
    }

    pub fn eval(&self, sys: &Gbds, t: &GroupElem, path: &BoundaryPath) -> Scalar {
        self.parts
            .get(t)
            .map(|f| f.eval(sys, path))
            .unwrap_or_else(Scalar::zero)
    }
}

/// The generator-to-indicator map: each triple (α, A, β) becomes its
/// scalar times the indicator of {αβ^{-1}} × N(α, A).
pub fn kappa(sys: &Gbds, x: &AlgElement) -> GroupoidFn {
    let mut out = GroupoidFn::zero();
    for (triple, coeff) in x.terms() {
        let t = GroupElem::transfer(&triple.left, &triple.right);
        let co = CompactOpen::from_cylinder(
            sys,
            &Cylinder {
                word: triple.left.clone(),
                set: triple.set,
            },
        );
        out.add_part(sys, t, SimpleFn::indicator(&co, coeff));
    }
    out
}

/// Convenience wrapper for the oracle: pointwise equality of the
/// groupoid images of two algebra elements.
pub fn oracle_equal(sys: &Gbds, x: &AlgElement, y: &AlgElement) -> bool {
    kappa(sys, x).fn_equal(sys, &kappa(sys, y))
}

/// The central cross-check: the rewriting product agrees with
/// convolution of the groupoid images.
pub fn oracle_product_check(sys: &Gbds, x: &AlgElement, y: &AlgElement) -> bool {
    let lhs = kappa(sys, x).convolve(sys, &kappa(sys, y));
    let rhs = kappa(sys, &x.mul(sys, y));
    lhs.fn_equal(sys, &rhs)
}

// ---------------------------------------------------------------------------
// Groupoid points and isotropy
// ---------------------------------------------------------------------------

/// A point (t, μ) of the transformation groupoid: μ must lie in U_t.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupoidPoint {
    pub t: GroupElem,
    pub path: BoundaryPath,
}

impl GroupoidPoint {
    pub fn new(sys: &Gbds, t: GroupElem, path: BoundaryPath) -> Result<Self, Error> {
        if !t.is_identity() && !in_domain(sys, &t, &path) {
            return Err(Error::Domain(
                "path outside the domain of the group element".into(),
            ));
        }
        Ok(GroupoidPoint { t, path })
    }

    pub fn range(&self) -> &BoundaryPath {
        &self.path
    }

    pub fn source(&self, sys: &Gbds) -> BoundaryPath {
        apply_phi(sys, &self.t.inverse(), &self.path).expect("groupoid point is in domain")
    }

    pub fn inverse(&self, sys: &Gbds) -> GroupoidPoint {
        GroupoidPoint {
            t: self.t.inverse(),
            path: self.source(sys),
        }
    }

    /// Composition: defined exactly when the source of `self` is the
    /// range of `other`.
    pub fn compose(&self, sys: &Gbds, other: &GroupoidPoint) -> Option<GroupoidPoint> {
        if self.source(sys) != other.path {
            return None;
        }
        Some(GroupoidPoint {
            t: self.t.mul(&other.t),
            path: self.path.clone(),
        })
    }
}

/// Membership in the isotropy bundle, decided structurally: a nonunit
/// (t, μ) is isotropy exactly when t transfers (α, β) with one word a
/// beginning of the other, and the edges of μ repeat with period
/// |difference| from the shorter length on — the conjugated-cycle
/// shape with the period forming a loop.
pub fn iso_contains(sys: &Gbds, point: &GroupoidPoint) -> bool {
    if point.t.is_identity() {
        return true;
    }
    let Some((alpha, beta)) = point.t.as_transfer() else {
        return false;
    };
    debug_assert!(in_domain(sys, &point.t, &point.path));
    let (delta_len, gamma) = if beta.is_beginning_of(&alpha) && alpha.len() > beta.len() {
        (beta.len(), beta.strip_beginning(&alpha).unwrap())
    } else if alpha.is_beginning_of(&beta) && beta.len() > alpha.len() {
        (alpha.len(), alpha.strip_beginning(&beta).unwrap())
    } else {
        return false;
    };
    let mu = match &point.path {
        BoundaryPath::Finite(_) => return false,
        BoundaryPath::Infinite(p) => p,
    };
    // the label tail must spell γ repeating and the edges must repeat
    // with period |γ| from depth |δ| on: canonical prefix within |δ|
    // and canonical period dividing |γ|
    let labels_match = (0..gamma.len()).all(|j| mu.edge_at(delta_len + j).letter == gamma.0[j]);
    labels_match && mu.prefix().len() <= delta_len && gamma.len() % mu.period().len() == 0
}

/// Direct fixed-point check used as the semantic cross-check for
/// isotropy: φ_{t^{-1}} fixes the path.
pub fn is_fixed_point(sys: &Gbds, t: &GroupElem, path: &BoundaryPath) -> bool {
    in_domain(sys, t, path)
        && apply_phi(sys, &t.inverse(), path)
            .map(|q| q == *path)
            .unwrap_or(false)
}

/// Whether the basic bisection {t} × N(cylinder) lies in the interior
/// of the isotropy bundle. Requires the bisection to be inside the
/// groupoid (every member of the cylinder in U_t); a violation is a
/// usage error.
pub fn bisection_in_iso_interior(sys: &Gbds, t: &GroupElem, cyl: &Cylinder) -> Result<bool, Error> {
    let co = CompactOpen::from_cylinder(sys, cyl);
    // precondition: {t} × N(cyl) ⊆ groupoid
    if let Some((alpha0, beta0)) = t.as_transfer() {
        let deep = co.refined(sys, co.depth().max(alpha0.len()));
        let ok = deep
            .long()
            .iter()
            .chain(deep.short().iter())
            .all(|c| class_in_strip_domain(sys, &alpha0, &beta0, c));
        if !ok {
            return Err(Error::Usage(
                "cylinder not contained in the element's domain".into(),
            ));
        }
    } else {
        return Err(Error::Usage("group element has empty domain".into()));
    }
    if t.is_identity() {
        return Ok(true);
    }
    if co.is_empty() {
        // the empty bisection sits inside every open set
        return Ok(true);
    }

    // reconstruct the unreduced pair: t = α β^{-1} with α the cylinder
    // word, β = t^{-1}·α when that is a positive word
    let alpha = cyl.word.clone();
    let beta_elem = t.inverse().mul(&GroupElem::from_word(&alpha));
    let beta = match beta_elem.as_transfer() {
        Some((pos, neg)) if neg.is_empty() => pos,
        _ => {
            return Err(Error::Usage(
                "group element does not match the cylinder word".into(),
            ))
        }
    };
    if !sys.word_ideal(&beta).contains(&cyl.set) {
        return Err(Error::Usage("cylinder set escapes the coword ideal".into()));
    }

    let gamma = if let Some(g) = beta.strip_beginning(&alpha) {
        g
    } else if let Some(g) = alpha.strip_beginning(&beta) {
        g
    } else {
        return Ok(false);
    };
    if gamma.is_empty() {
        // α = β means t reduced to the identity, handled above
        return Ok(false);
    }
    let fixed = cyl.set.meet(&sys.apply_word(&gamma, &cyl.set));
    if fixed.is_empty() {
        return Ok(false);
    }
    if !(sys.is_cycle(&gamma, &fixed) && sys.has_no_exits(&gamma, &fixed)) {
        return Ok(false);
    }
    // the cylinder must not see anything outside the fixed part
    let shrunk = CompactOpen::from_cylinder(
        sys,
        &Cylinder {
            word: alpha,
            set: fixed,
        },
    );
    Ok(co.same_set(sys, &shrunk))
}

// ---------------------------------------------------------------------------
// Effectiveness and Condition (L) in groupoid terms
// ---------------------------------------------------------------------------

/// The verdicts of the four related structural checks. The first
/// three are provably equivalent for finite data, so `consistent`
/// failing indicates a bug rather than an interesting system.
#[derive(Clone, Debug)]
pub struct EffectivenessReport {
    pub condition_l: ConditionL,
    pub topologically_free: bool,
    pub entrance_free_loop: Option<FinitePath>,
    pub effective: bool,
    pub interior_witness: Option<(Word, Cylinder)>,
    pub principal_shadow: bool,
    pub shadow_depth: usize,
    pub consistent: bool,
}

/// A loop all of whose edges are the unique edge with their range, if
/// one exists: directed cycle search over uniquely-ranged edges.
pub fn entrance_free_loop(sys: &Gbds) -> Option<FinitePath> {
    // arcs r(e) → d(e) over entrance-free edges
    let mut arcs: BTreeMap<AtomId, (Edge, AtomId)> = BTreeMap::new();
    for e in all_edges(sys) {
        if let Vertex::Atom(r) = e.range(sys) {
            if edges_with_range(sys, Vertex::Atom(r)) == vec![e] {
                arcs.insert(r, (e, e.atom));
            }
        }
    }
    // each source atom has at most one entrance-free arc, so cycles
    // are found by walking
    for &start in arcs.keys() {
        let mut cur = start;
        let mut steps = 0;
        while let Some(&(_, next)) = arcs.get(&cur) {
            cur = next;
            steps += 1;
            if cur == start {
                // reconstruct the loop edges from start
                let mut edges = Vec::with_capacity(steps);
                let mut a = start;
                for _ in 0..steps {
                    let (e, next) = arcs[&a];
                    edges.push(e);
                    a = next;
                }
                return Some(FinitePath::from_edges(sys, edges).expect("arc walk composes"));
            }
            if steps > arcs.len() {
                break;
            }
        }
    }
    None
}

/// Run the four-way suite at the given shadow depth.
pub fn effectiveness_suite(sys: &Gbds, shadow_depth: usize) -> EffectivenessReport {
    let condition_l = sys.condition_l();

    // topological freeness via entrance-free loops: such a loop is a
    // single-atom no-exit cycle whose cylinder is fixed pointwise
    let loop_witness = entrance_free_loop(sys);
    let topologically_free = match &loop_witness {
        None => true,
        Some(p) => {
            let word = p.label();
            let base = sys
                .algebra()
                .singleton(p.domain_atom().expect("loop ends at an atom"));
            debug_assert!(sys.is_cycle(&word, &base) && sys.has_no_exits(&word, &base));
            let mu = BoundaryPath::Infinite(
                InfinitePath::new(sys, vec![], p.edges().to_vec()).expect("loop closes"),
            );
            debug_assert!(is_fixed_point(sys, &GroupElem::from_word(&word), &mu));
            false
        }
    };

    // effectiveness via interior-isotropy bisections over candidate
    // cycle words; a minimal no-exit cycle has word length at most the
    // atom count, so the bounded search is complete
    let mut interior_witness = None;
    'outer: for word in sys.words_up_to(sys.algebra().atom_count()) {
        if word.is_empty() {
            continue;
        }
        let carrier = sys.word_ideal(&word).gen();
        for set in carrier.subsets() {
            if set.is_empty() {
                continue;
            }
            let cyl = Cylinder {
                word: word.clone(),
                set,
            };
            let t = GroupElem::from_word(&word);
            if bisection_in_iso_interior(sys, &t, &cyl).unwrap_or(false)
                && !CompactOpen::from_cylinder(sys, &cyl).is_empty()
            {
                interior_witness = Some((word.clone(), cyl));
                break 'outer;
            }
        }
    }
    let effective = interior_witness.is_none();

    // density shadow: every depth class contains a point with trivial
    // isotropy (a finite path, or a non-eventually-periodic walk)
    let (long, _short) = classes_at_depth(sys, shadow_depth);
    let principal_shadow = long.iter().all(|c| class_has_trivial_point(sys, c));

    let consistent = condition_l.holds() == topologically_free && topologically_free == effective;
    EffectivenessReport {
        condition_l,
        topologically_free,
        entrance_free_loop: loop_witness,
        effective,
        interior_witness,
        principal_shadow,
        shadow_depth,
        consistent,
    }
}

fn reachable_atoms(sys: &Gbds, start: &[AtomId]) -> BTreeSet<AtomId> {
    let mut seen: BTreeSet<AtomId> = start.iter().copied().collect();
    let mut frontier: Vec<AtomId> = start.to_vec();
    while let Some(a) = frontier.pop() {
        for e in edges_with_range(sys, Vertex::Atom(a)) {
            if seen.insert(e.atom) {
                frontier.push(e.atom);
            }
        }
    }
    seen
}

/// Whether some boundary path in the class has trivial isotropy: the
/// class reaches a singular atom (a finite member exists) or an atom
/// with two distinct returning edges (a non-eventually-periodic member
/// exists; a single returning edge per atom forces every infinite
/// member to fall into one deterministic loop).
fn class_has_trivial_point(sys: &Gbds, class: &FinitePath) -> bool {
    let start: Vec<AtomId> = match class.domain() {
        Vertex::Atom(a) => vec![a],
        Vertex::Infinity => edges_with_range(sys, Vertex::Infinity)
            .iter()
            .map(|e| e.atom)
            .collect(),
    };
    let reach = reachable_atoms(sys, &start);
    if reach.iter().any(|&a| is_singular(sys, a)) {
        return true;
    }
    for &c in &reach {
        let returning = edges_with_range(sys, Vertex::Atom(c))
            .into_iter()
            .filter(|e| reachable_atoms(sys, &[e.atom]).contains(&c))
            .count();
        if returning >= 2 {
            return true;
        }
    }
    false
}
