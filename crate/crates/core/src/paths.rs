//! The labeled graph of a system, the boundary path space, cylinders,
//! loops, and the filter-transport maps between ultrafilter spaces.
//!
//! Edges are pairs (letter, atom below the letter's ideal generator).
//! The domain of an edge is its atom; its range is the unique atom
//! whose image under the letter contains it, or the point at infinity
//! when no such atom exists (uniqueness is the pairwise disjointness
//! of atom images). Paths compose range-to-domain, so the atom
//! sequence of a path moves forward under the actions.

use std::collections::BTreeSet;
use std::fmt;

use crate::dynamics::{Gbds, Word};
use crate::error::Error;
use crate::lattice::{AtomId, AtomSet};

/// A point of the extended vertex space: an atom of the algebra, or
/// the isolated extra point that absorbs ranges with no preimage atom.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Vertex {
    Atom(AtomId),
    Infinity,
}

impl Vertex {
    pub fn atom(&self) -> Option<AtomId> {
        match self {
            Vertex::Atom(a) => Some(*a),
            Vertex::Infinity => None,
        }
    }
}

/// An edge of the graph: a letter together with an atom below the
/// letter's ideal generator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Edge {
    pub letter: u8,
    pub atom: AtomId,
}

impl Edge {
    pub fn new(sys: &Gbds, letter: u8, atom: AtomId) -> Result<Self, Error> {
        let gen = sys.letter_ideal_gen(letter);
        if !sys.algebra().singleton(atom).leq(&gen) {
            return Err(Error::Invalid(format!(
                "atom `{}` not below the ideal generator of `{}`",
                sys.algebra().atom_name(atom),
                sys.letter_name(letter)
            )));
        }
        Ok(Edge { letter, atom })
    }

    pub fn domain(&self) -> Vertex {
        Vertex::Atom(self.atom)
    }

    pub fn range(&self, sys: &Gbds) -> Vertex {
        match sys.action(self.letter).preimage_atom(self.atom) {
            Some(b) => Vertex::Atom(b),
            None => Vertex::Infinity,
        }
    }

    pub fn display<'a>(&'a self, sys: &'a Gbds) -> impl fmt::Display + 'a {
        DisplayEdge { edge: self, sys }
    }
}

struct DisplayEdge<'a> {
    edge: &'a Edge,
    sys: &'a Gbds,
}

impl fmt::Display for DisplayEdge<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "e^{}_{}",
            self.sys.letter_name(self.edge.letter),
            self.sys.algebra().atom_name(self.edge.atom)
        )
    }
}

/// Every edge of the graph, in (letter, atom) order.
pub fn all_edges(sys: &Gbds) -> Vec<Edge> {
    let mut out = Vec::new();
    for l in sys.letters() {
        for a in sys.letter_ideal_gen(l).iter() {
            out.push(Edge { letter: l, atom: a });
        }
    }
    out
}

/// Edges whose range is the given vertex.
pub fn edges_with_range(sys: &Gbds, v: Vertex) -> Vec<Edge> {
    match v {
        Vertex::Atom(a) => {
            let mut out = Vec::new();
            for l in sys.letters() {
                let img = sys.action(l).apply(&sys.algebra().singleton(a));
                for b in img.iter() {
                    out.push(Edge { letter: l, atom: b });
                }
            }
            out
        }
        Vertex::Infinity => all_edges(sys)
            .into_iter()
            .filter(|e| e.range(sys) == Vertex::Infinity)
            .collect(),
    }
}

/// Atoms admitting no letter at all; finite boundary paths end here.
///
/// This is the finite reduction of the general singular-vertex
/// condition: the filter of an atom consists of the sets containing
/// it, and none of them is regular exactly when the atom itself
/// admits no letter, while an atom with a letter is itself a regular
/// set. The receiving-infinitely-many-edges case cannot occur with a
/// finite alphabet over a finite algebra.
pub fn singular_atoms(sys: &Gbds) -> AtomSet {
    sys.algebra().set_from(
        sys.algebra()
            .atoms()
            .filter(|&a| sys.active_letters(&sys.algebra().singleton(a)).is_empty()),
    )
}

pub fn is_singular(sys: &Gbds, a: AtomId) -> bool {
    sys.active_letters(&sys.algebra().singleton(a)).is_empty()
}

/// A finite path: a root vertex followed by a composable edge
/// sequence. When the edge sequence is nonempty the root equals the
/// range of the first edge; a root of `Infinity` with no edges never
/// denotes an actual path, only the depth-0 evaluation class of paths
/// whose range lies at infinity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct FinitePath {
    root: Vertex,
    edges: Vec<Edge>,
}

impl FinitePath {
    pub fn at_vertex(a: AtomId) -> Self {
        FinitePath {
            root: Vertex::Atom(a),
            edges: Vec::new(),
        }
    }

    /// Depth-0 evaluation class keyed by a range value.
    pub fn class_root(v: Vertex) -> Self {
        FinitePath {
            root: v,
            edges: Vec::new(),
        }
    }

    pub fn from_edges(sys: &Gbds, edges: Vec<Edge>) -> Result<Self, Error> {
        if edges.is_empty() {
            return Err(Error::Usage(
                "a path from edges needs at least one edge".into(),
            ));
        }
        for i in 0..edges.len() - 1 {
            if edges[i + 1].range(sys) != edges[i].domain() {
                return Err(Error::Invalid(format!(
                    "edges {} and {} do not compose",
                    i,
                    i + 1
                )));
            }
        }
        let root = edges[0].range(sys);
        Ok(FinitePath { root, edges })
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn range(&self) -> Vertex {
        self.root
    }

    /// The domain end of the path; the root for a length-0 path.
    pub fn domain(&self) -> Vertex {
        match self.edges.last() {
            Some(e) => e.domain(),
            None => self.root,
        }
    }

    pub fn domain_atom(&self) -> Option<AtomId> {
        self.domain().atom()
    }

    pub fn label(&self) -> Word {
        Word(self.edges.iter().map(|e| e.letter).collect())
    }

    /// The ultrafilter at depth `k`: the root for `k = 0`, otherwise
    /// the atom of the k-th edge.
    pub fn vertex_at(&self, k: usize) -> Vertex {
        if k == 0 {
            self.root
        } else {
            Vertex::Atom(self.edges[k - 1].atom)
        }
    }

    /// Extend at the domain end by one edge (the new edge's range must
    /// be the current domain).
    pub fn extended(&self, sys: &Gbds, e: Edge) -> Result<FinitePath, Error> {
        if e.range(sys) != self.domain() {
            return Err(Error::Invalid(
                "edge does not compose at the domain end".into(),
            ));
        }
        let mut edges = self.edges.clone();
        edges.push(e);
        let root = if self.edges.is_empty() {
            e.range(sys)
        } else {
            self.root
        };
        Ok(FinitePath { root, edges })
    }

    /// The subpath of edges i..=j (1-based). Its root is the range of
    /// its first edge, which interior edges carry as the previous
    /// edge's atom.
    pub fn subpath(&self, i: usize, j: usize) -> Option<FinitePath> {
        if j < i || i == 0 {
            return None;
        }
        let edges: Vec<Edge> = self.edges.get(i - 1..j)?.to_vec();
        let root = if i == 1 {
            self.root
        } else {
            Vertex::Atom(self.edges[i - 2].atom)
        };
        Some(FinitePath { root, edges })
    }

    /// Whether the path is a loop: range and domain coincide in the
    /// atom space.
    pub fn is_loop(&self) -> bool {
        !self.edges.is_empty() && matches!(self.root, Vertex::Atom(_)) && self.root == self.domain()
    }

    /// Whether every edge of the path is the unique edge of the whole
    /// graph with its range vertex.
    pub fn has_no_entrance(&self, sys: &Gbds) -> bool {
        self.edges
            .iter()
            .all(|e| edges_with_range(sys, e.range(sys)) == vec![*e])
    }

    pub fn display<'a>(&'a self, sys: &'a Gbds) -> impl fmt::Display + 'a {
        DisplayPath { path: self, sys }
    }
}

struct DisplayPath<'a> {
    path: &'a FinitePath,
    sys: &'a Gbds,
}

impl fmt::Display for DisplayPath<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.edges.is_empty() {
            return match self.path.root {
                Vertex::Atom(a) => write!(f, "({})", self.sys.algebra().atom_name(a)),
                Vertex::Infinity => write!(f, "(inf)"),
            };
        }
        for (i, e) in self.path.edges.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", e.display(self.sys))?;
        }
        Ok(())
    }
}

/// An eventually periodic infinite path in canonical form: shortest
/// period, then shortest prefix. Canonical form makes path equality
/// syntactic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct InfinitePath {
    root: Vertex,
    prefix: Vec<Edge>,
    period: Vec<Edge>,
}

impl InfinitePath {
    /// Build from any prefix + repeating block and canonicalize. The
    /// block must close into a loop (domain of its last edge equals
    /// range of its first) and compose with the prefix end.
    pub fn new(sys: &Gbds, prefix: Vec<Edge>, period: Vec<Edge>) -> Result<Self, Error> {
        if period.is_empty() {
            return Err(Error::Usage("infinite path needs a nonempty period".into()));
        }
        let all: Vec<Edge> = prefix.iter().chain(period.iter()).copied().collect();
        for i in 0..all.len() - 1 {
            if all[i + 1].range(sys) != all[i].domain() {
                return Err(Error::Invalid("edges do not compose".into()));
            }
        }
        if period[0].range(sys) != period[period.len() - 1].domain() {
            return Err(Error::Invalid("period does not close into a loop".into()));
        }

        // shortest period: smallest divisor of |period| that repeats
        // the block cyclically
        let plen = period.len();
        let mut k = plen;
        for cand in 1..=plen {
            if !plen.is_multiple_of(cand) {
                continue;
            }
            if (0..plen).all(|j| period[(j + cand) % plen] == period[j]) {
                k = cand;
                break;
            }
        }
        // shortest prefix: pull period elements out of the prefix tail
        let seq = |i: usize| -> Edge {
            if i < prefix.len() {
                prefix[i]
            } else {
                period[(i - prefix.len()) % plen]
            }
        };
        let mut m = prefix.len();
        while m > 0 && seq(m - 1) == seq(m - 1 + k) {
            m -= 1;
        }
        let canon_prefix: Vec<Edge> = (0..m).map(seq).collect();
        let canon_period: Vec<Edge> = (m..m + k).map(seq).collect();
        let first = canon_prefix.first().copied().unwrap_or(canon_period[0]);
        Ok(InfinitePath {
            root: first.range(sys),
            prefix: canon_prefix,
            period: canon_period,
        })
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn prefix(&self) -> &[Edge] {
        &self.prefix
    }

    pub fn period(&self) -> &[Edge] {
        &self.period
    }

    /// The edge at 0-based position `i`.
    pub fn edge_at(&self, i: usize) -> Edge {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn vertex_at(&self, k: usize) -> Vertex {
        if k == 0 {
            self.root
        } else {
            Vertex::Atom(self.edge_at(k - 1).atom)
        }
    }

    /// The label word `δγ^∞` reported as (δ, γ) in canonical form.
    pub fn label_parts(&self) -> (Word, Word) {
        (
            Word(self.prefix.iter().map(|e| e.letter).collect()),
            Word(self.period.iter().map(|e| e.letter).collect()),
        )
    }

    pub fn display<'a>(&'a self, sys: &'a Gbds) -> impl fmt::Display + 'a {
        DisplayInfinite { path: self, sys }
    }
}

struct DisplayInfinite<'a> {
    path: &'a InfinitePath,
    sys: &'a Gbds,
}

impl fmt::Display for DisplayInfinite<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.path.prefix {
            write!(f, "{} ", e.display(self.sys))?;
        }
        write!(f, "(")?;
        for (i, e) in self.path.period.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", e.display(self.sys))?;
        }
        write!(f, ")^inf")
    }
}

/// A point of the boundary path space: a finite path whose domain atom
/// is singular, or an eventually periodic infinite path.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum BoundaryPath {
    Finite(FinitePath),
    Infinite(InfinitePath),
}

impl BoundaryPath {
    pub fn finite(sys: &Gbds, path: FinitePath) -> Result<Self, Error> {
        match path.domain() {
            Vertex::Atom(a) if is_singular(sys, a) => Ok(BoundaryPath::Finite(path)),
            Vertex::Atom(_) => Err(Error::Invalid(
                "finite boundary path must end at a singular atom".into(),
            )),
            Vertex::Infinity => Err(Error::Invalid("path domain must be an atom".into())),
        }
    }

    /// The length of a finite path; infinite paths have none.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        match self {
            BoundaryPath::Finite(p) => Some(p.len()),
            BoundaryPath::Infinite(_) => None,
        }
    }

    pub fn range(&self) -> Vertex {
        match self {
            BoundaryPath::Finite(p) => p.range(),
            BoundaryPath::Infinite(p) => p.root(),
        }
    }

    pub fn edge_at(&self, i: usize) -> Option<Edge> {
        match self {
            BoundaryPath::Finite(p) => p.edges().get(i).copied(),
            BoundaryPath::Infinite(p) => Some(p.edge_at(i)),
        }
    }

    /// The ultrafilter at depth `k` (0 = range).
    pub fn vertex_at(&self, k: usize) -> Option<Vertex> {
        match self {
            BoundaryPath::Finite(p) => {
                if k <= p.len() {
                    Some(p.vertex_at(k))
                } else {
                    None
                }
            }
            BoundaryPath::Infinite(p) => Some(p.vertex_at(k)),
        }
    }

    /// Labels of the first `k` edges, if the path is that long.
    pub fn label_prefix(&self, k: usize) -> Option<Word> {
        match self {
            BoundaryPath::Finite(p) => {
                if k <= p.len() {
                    Some(Word(p.edges()[..k].iter().map(|e| e.letter).collect()))
                } else {
                    None
                }
            }
            BoundaryPath::Infinite(p) => Some(Word((0..k).map(|i| p.edge_at(i).letter).collect())),
        }
    }

    /// The first `k` edges as a finite path (for `k ≥ 1`).
    pub fn prefix_path(&self, sys: &Gbds, k: usize) -> Option<FinitePath> {
        if k == 0 {
            return None;
        }
        let edges: Option<Vec<Edge>> = (0..k).map(|i| self.edge_at(i)).collect();
        edges.map(|es| FinitePath::from_edges(sys, es).expect("prefix of a path composes"))
    }

    /// Remove the first `k` edges. For a finite path `k` must not
    /// exceed its length.
    pub fn strip(&self, sys: &Gbds, k: usize) -> Result<BoundaryPath, Error> {
        if k == 0 {
            return Ok(self.clone());
        }
        match self {
            BoundaryPath::Finite(p) => {
                if k > p.len() {
                    return Err(Error::Domain("cannot strip past the end of a path".into()));
                }
                let edges = p.edges()[k..].to_vec();
                if edges.is_empty() {
                    let a = p.domain_atom().expect("boundary path ends at an atom");
                    Ok(BoundaryPath::Finite(FinitePath::at_vertex(a)))
                } else {
                    Ok(BoundaryPath::Finite(
                        FinitePath::from_edges(sys, edges).expect("suffix composes"),
                    ))
                }
            }
            BoundaryPath::Infinite(p) => {
                let plen = p.prefix.len();
                let unroll = if k > plen {
                    // shift the period start instead of unrolling copies
                    let shift = (k - plen) % p.period.len();
                    let mut per = p.period.clone();
                    per.rotate_left(shift);
                    (Vec::new(), per)
                } else {
                    (p.prefix[k..].to_vec(), p.period.clone())
                };
                Ok(BoundaryPath::Infinite(InfinitePath::new(
                    sys, unroll.0, unroll.1,
                )?))
            }
        }
    }

    /// Prepend edges (they must compose with the current range).
    pub fn glue(&self, sys: &Gbds, edges: Vec<Edge>) -> Result<BoundaryPath, Error> {
        if edges.is_empty() {
            return Ok(self.clone());
        }
        if edges[edges.len() - 1].domain() != self.range() {
            return Err(Error::Domain(
                "glued edges do not meet the path range".into(),
            ));
        }
        match self {
            BoundaryPath::Finite(p) => {
                let mut all = edges;
                all.extend_from_slice(p.edges());
                Ok(BoundaryPath::Finite(FinitePath::from_edges(sys, all)?))
            }
            BoundaryPath::Infinite(p) => {
                let mut all = edges;
                all.extend_from_slice(&p.prefix);
                Ok(BoundaryPath::Infinite(InfinitePath::new(
                    sys,
                    all,
                    p.period.clone(),
                )?))
            }
        }
    }

    pub fn display<'a>(&'a self, sys: &'a Gbds) -> impl fmt::Display + 'a {
        DisplayBoundary { path: self, sys }
    }
}

struct DisplayBoundary<'a> {
    path: &'a BoundaryPath,
    sys: &'a Gbds,
}

impl fmt::Display for DisplayBoundary<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.path {
            BoundaryPath::Finite(p) => write!(f, "{}", p.display(self.sys)),
            BoundaryPath::Infinite(p) => write!(f, "{}", p.display(self.sys)),
        }
    }
}

/// A cylinder `N(word, set)`: membership depends only on the first
/// |word| edges of a boundary path (on its range value when the word
/// is empty).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cylinder {
    pub word: Word,
    pub set: AtomSet,
}

impl Cylinder {
    pub fn new(sys: &Gbds, word: Word, set: AtomSet) -> Result<Self, Error> {
        if !sys.word_ideal(&word).contains(&set) {
            return Err(Error::Invalid(
                "cylinder set must lie in the ideal of its word".into(),
            ));
        }
        Ok(Cylinder { word, set })
    }

    pub fn contains(&self, path: &BoundaryPath) -> bool {
        if self.set.is_empty() {
            return false;
        }
        let k = self.word.len();
        if k == 0 {
            return match path.range() {
                Vertex::Atom(a) => self.set.contains(a),
                Vertex::Infinity => false,
            };
        }
        match (path.label_prefix(k), path.vertex_at(k)) {
            (Some(labels), Some(Vertex::Atom(a))) => labels == self.word && self.set.contains(a),
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Filter transports between the ultrafilter spaces X_w.
//
// A point of X_w is an ultrafilter of the ideal I_w; in the finite
// model it is an atom below gen(I_w). The three maps below restrict a
// filter to a smaller carrier, enlarge the carrier, and trace a filter
// backwards through a word action. Restriction and enlargement are
// mutually inverse.
// ---------------------------------------------------------------------------

/// g: restrict an atom-filter of I_beta to the smaller ideal I_{alpha
/// beta}; the atom survives, the carrier shrinks.
pub fn restrict_filter(
    sys: &Gbds,
    alpha: &Word,
    beta: &Word,
    atom: AtomId,
) -> Result<AtomId, Error> {
    let s = sys.algebra().singleton(atom);
    if !sys.word_ideal(beta).contains(&s) {
        return Err(Error::Domain(
            "filter atom outside the carrier ideal".into(),
        ));
    }
    if !sys.word_ideal(&alpha.concat(beta)).contains(&s) {
        return Err(Error::Domain(
            "filter does not meet the smaller ideal".into(),
        ));
    }
    Ok(atom)
}

/// h: enlarge the carrier of an atom-filter of I_{alpha beta} to
/// I_beta; the atom survives.
pub fn extend_filter(sys: &Gbds, alpha: &Word, beta: &Word, atom: AtomId) -> Result<AtomId, Error> {
    let s = sys.algebra().singleton(atom);
    if !sys.word_ideal(&alpha.concat(beta)).contains(&s) {
        return Err(Error::Domain(
            "filter atom outside the carrier ideal".into(),
        ));
    }
    Ok(atom)
}

/// f: trace an atom-filter of I_{alpha beta} back through θ_beta,
/// landing in X_alpha; the result is the unique atom whose image
/// contains the given one. For an empty `alpha` the map lands in the
/// extended vertex space and may return the point at infinity.
pub fn trace_filter(sys: &Gbds, alpha: &Word, beta: &Word, atom: AtomId) -> Result<Vertex, Error> {
    let s = sys.algebra().singleton(atom);
    if !sys.word_ideal(&alpha.concat(beta)).contains(&s) {
        return Err(Error::Domain(
            "filter atom outside the carrier ideal".into(),
        ));
    }
    let target = sys
        .algebra()
        .atoms()
        .find(|&b| s.leq(&sys.apply_word(beta, &sys.algebra().singleton(b))));
    match target {
        Some(b) => {
            let sb = sys.algebra().singleton(b);
            if alpha.is_empty() || sys.word_ideal(alpha).contains(&sb) {
                Ok(Vertex::Atom(b))
            } else {
                Err(Error::Domain("traced atom escapes the target ideal".into()))
            }
        }
        None => {
            if alpha.is_empty() {
                Ok(Vertex::Infinity)
            } else {
                Err(Error::Domain(
                    "no preimage atom under the word action".into(),
                ))
            }
        }
    }
}

/// The range of a path via the composite transport formula
/// f_{∅[w]} ∘ g_{(w_{1..n-1}) w_n} applied to the last edge's atom;
/// must agree with the range of the first edge.
pub fn range_by_transport(sys: &Gbds, path: &FinitePath) -> Result<Vertex, Error> {
    assert!(!path.is_empty(), "transport range needs at least one edge");
    let w = path.label();
    let n = w.len();
    let head = w.slice(1, n - 1);
    let last = Word::letter(w.0[n - 1]);
    let atom = path.edges()[n - 1].atom;
    let restricted = restrict_filter(sys, &head, &last, atom)?;
    trace_filter(sys, &Word::empty(), &w, restricted)
}

// ---------------------------------------------------------------------------
// Boundary path enumeration
// ---------------------------------------------------------------------------

/// The result of a depth-bounded boundary enumeration.
#[derive(Clone, Debug, Default)]
pub struct BoundaryEnum {
    /// Finite boundary paths of length ≤ the requested depth.
    pub finite: Vec<FinitePath>,
    /// Composable paths of length 1..=depth that are prefixes of
    /// boundary paths strictly longer than the requested depth.
    pub prefixes: Vec<FinitePath>,
    /// Eventually periodic infinite paths with |prefix|+|period| ≤
    /// depth, canonically represented.
    pub periodic: Vec<InfinitePath>,
}

/// All composable paths of each length 0..=n (length 0 = one path per
/// atom).
pub fn composable_paths(sys: &Gbds, n: usize) -> Vec<Vec<FinitePath>> {
    let mut layers: Vec<Vec<FinitePath>> = Vec::with_capacity(n + 1);
    layers.push(sys.algebra().atoms().map(FinitePath::at_vertex).collect());
    if n == 0 {
        return layers;
    }
    let mut current: Vec<FinitePath> = all_edges(sys)
        .into_iter()
        .map(|e| FinitePath::from_edges(sys, vec![e]).unwrap())
        .collect();
    layers.push(current.clone());
    for _ in 2..=n {
        let mut next = Vec::new();
        for p in &current {
            if let Some(a) = p.domain_atom() {
                for e in edges_with_range(sys, Vertex::Atom(a)) {
                    next.push(p.extended(sys, e).unwrap());
                }
            }
        }
        layers.push(next.clone());
        current = next;
    }
    layers
}

/// Whether a walk of `steps` more edges exists from the atom.
pub fn can_walk(sys: &Gbds, atom: AtomId, steps: usize) -> bool {
    if steps == 0 {
        return true;
    }
    edges_with_range(sys, Vertex::Atom(atom))
        .iter()
        .any(|e| can_walk(sys, e.atom, steps - 1))
}

/// Enumerate the boundary path space to a depth bound.
pub fn boundary_paths(sys: &Gbds, depth: usize) -> BoundaryEnum {
    let layers = composable_paths(sys, depth);
    let mut out = BoundaryEnum::default();
    for (len, layer) in layers.iter().enumerate() {
        for p in layer {
            match p.domain_atom() {
                Some(a) if is_singular(sys, a) => out.finite.push(p.clone()),
                Some(a) if len >= 1 && can_walk(sys, a, depth + 1 - len) => {
                    out.prefixes.push(p.clone());
                }
                Some(_) => {}
                None => {}
            }
        }
    }
    // loops of length k, prefixes of length ≤ depth - k landing on the
    // loop's range
    let mut seen: BTreeSet<InfinitePath> = BTreeSet::new();
    for k in 1..=depth {
        for q in &layers[k] {
            if !q.is_loop() {
                continue;
            }
            for (plen, layer) in layers.iter().enumerate().take(depth - k + 1) {
                for p in layer {
                    if plen == 0 {
                        // pure periodic: anchored at the loop itself
                        if p.root() != q.range() {
                            continue;
                        }
                    } else if p.domain() != q.range() {
                        continue;
                    }
                    let prefix = if plen == 0 {
                        Vec::new()
                    } else {
                        p.edges().to_vec()
                    };
                    if let Ok(ip) = InfinitePath::new(sys, prefix, q.edges().to_vec()) {
                        if ip.prefix().len() + ip.period().len() <= depth {
                            seen.insert(ip);
                        }
                    }
                }
            }
        }
    }
    out.periodic = seen.into_iter().collect();
    out
}

/// Every boundary path with length < depth, plus one representative
/// story per depth-class is *not* what this returns: it returns the
/// exact finite points below the depth and the periodic points within
/// the budget; evaluation classes live in the groupoid module.
pub fn boundary_points_up_to(sys: &Gbds, depth: usize) -> Vec<BoundaryPath> {
    let e = boundary_paths(sys, depth);
    let mut out: Vec<BoundaryPath> = e.finite.into_iter().map(BoundaryPath::Finite).collect();
    out.extend(e.periodic.into_iter().map(BoundaryPath::Infinite));
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn graph_structure_f4() {
        let f4 = fixtures::f4();
        let edges = all_edges(&f4);
        assert_eq!(edges.len(), 2);
        let e1 = Edge { letter: 0, atom: 0 };
        let e2 = Edge { letter: 0, atom: 1 };
        assert_eq!(e2.range(&f4), Vertex::Atom(0));
        assert_eq!(e2.domain(), Vertex::Atom(1));
        assert_eq!(e1.range(&f4), Vertex::Infinity);
    }

    #[test]
    fn graph_structure_f1() {
        let f1 = fixtures::f1();
        let e = Edge { letter: 0, atom: 0 };
        assert_eq!(e.range(&f1), Vertex::Atom(0));
        assert_eq!(e.domain(), Vertex::Atom(0));
    }

    #[test]
    fn transports_f4() {
        let f4 = fixtures::f4();
        let a = Word::letter(0);
        // f_{∅[a]}(ξ_2) = ξ_1; f_{∅[a]}(ξ_1) = ∅
        assert_eq!(
            trace_filter(&f4, &Word::empty(), &a, 1),
            Ok(Vertex::Atom(0))
        );
        assert_eq!(
            trace_filter(&f4, &Word::empty(), &a, 0),
            Ok(Vertex::Infinity)
        );
    }

    #[test]
    fn restrict_then_extend_is_identity() {
        for sys in fixtures::all() {
            for alpha in sys.words_up_to(3) {
                for beta in sys.words_up_to(2) {
                    for atom in sys.algebra().atoms() {
                        if let Ok(b) = restrict_filter(&sys, &alpha, &beta, atom) {
                            assert_eq!(extend_filter(&sys, &alpha, &beta, b), Ok(atom));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn range_of_path_examples() {
        let f4 = fixtures::f4();
        let e1 = Edge { letter: 0, atom: 0 };
        let e2 = Edge { letter: 0, atom: 1 };
        let p = FinitePath::from_edges(&f4, vec![e1, e2]).unwrap();
        assert_eq!(p.range(), Vertex::Infinity);
        let f1 = fixtures::f1();
        let q = FinitePath::from_edges(&f1, vec![Edge { letter: 0, atom: 0 }]).unwrap();
        assert_eq!(q.range(), Vertex::Atom(0));
        let v = FinitePath::at_vertex(1);
        assert_eq!(v.range(), v.domain());
    }

    #[test]
    fn range_agrees_with_transport_formula() {
        for sys in fixtures::all() {
            for layer in composable_paths(&sys, 4).iter().skip(1) {
                for p in layer {
                    assert_eq!(range_by_transport(&sys, p).unwrap(), p.range());
                }
            }
        }
    }

    #[test]
    fn singular_vertices_examples() {
        assert_eq!(
            singular_atoms(&fixtures::f4()).iter().collect::<Vec<_>>(),
            vec![1]
        );
        assert!(singular_atoms(&fixtures::f1()).is_empty());
        assert!(singular_atoms(&fixtures::f2()).is_empty());
    }

    #[test]
    fn boundary_enumeration_f4() {
        let f4 = fixtures::f4();
        let e = boundary_paths(&f4, 3);
        assert_eq!(e.finite.len(), 3); // vertex 2, e^a_2, e^a_1 e^a_2
        assert!(e.prefixes.is_empty());
        assert!(e.periodic.is_empty());
        let lens: Vec<usize> = e.finite.iter().map(|p| p.len()).collect();
        assert_eq!(lens, vec![0, 1, 2]);
    }

    #[test]
    fn boundary_enumeration_f1() {
        let f1 = fixtures::f1();
        let e = boundary_paths(&f1, 2);
        assert!(e.finite.is_empty());
        assert_eq!(e.prefixes.len(), 2); // e^a_v and e^a_v e^a_v
        assert_eq!(e.periodic.len(), 1); // (e^a_v)^inf
        assert!(e.periodic[0].prefix().is_empty());
        assert_eq!(e.periodic[0].period().len(), 1);
    }

    #[test]
    fn boundary_enumeration_depth_zero() {
        for sys in fixtures::all() {
            let e = boundary_paths(&sys, 0);
            let singular = singular_atoms(&sys);
            assert_eq!(e.finite.len(), singular.len());
            assert!(e.prefixes.is_empty());
            assert!(e.periodic.is_empty());
        }
    }

    #[test]
    fn cylinder_membership_examples() {
        let f4 = fixtures::f4();
        let e1 = Edge { letter: 0, atom: 0 };
        let e2 = Edge { letter: 0, atom: 1 };
        let mu = BoundaryPath::Finite(FinitePath::from_edges(&f4, vec![e1, e2]).unwrap());
        let n_a1 = Cylinder::new(&f4, Word::letter(0), f4.algebra().singleton(0)).unwrap();
        assert!(n_a1.contains(&mu));
        // and it is the only member among the three boundary points
        let members: Vec<_> = boundary_points_up_to(&f4, 3)
            .into_iter()
            .filter(|p| n_a1.contains(p))
            .collect();
        assert_eq!(members, vec![mu]);

        // empty cylinder set
        let empty = Cylinder::new(&f4, Word::letter(0), f4.algebra().empty()).unwrap();
        for p in boundary_points_up_to(&f4, 3) {
            assert!(!empty.contains(&p));
        }

        let f1 = fixtures::f1();
        let loop_edge = Edge { letter: 0, atom: 0 };
        let inf = BoundaryPath::Infinite(InfinitePath::new(&f1, vec![], vec![loop_edge]).unwrap());
        let n_aa = Cylinder::new(&f1, Word(vec![0, 0]), f1.algebra().singleton(0)).unwrap();
        assert!(n_aa.contains(&inf));
    }

    #[test]
    fn loop_check_examples() {
        let f1 = fixtures::f1();
        let p = FinitePath::from_edges(&f1, vec![Edge { letter: 0, atom: 0 }]).unwrap();
        assert!(p.is_loop());
        assert!(p.has_no_entrance(&f1));

        let f2 = fixtures::f2();
        let q = FinitePath::from_edges(&f2, vec![Edge { letter: 0, atom: 0 }]).unwrap();
        assert!(q.is_loop());
        assert!(!q.has_no_entrance(&f2)); // e^b_v shares the range v

        let f4 = fixtures::f4();
        let r = FinitePath::from_edges(&f4, vec![Edge { letter: 0, atom: 1 }]).unwrap();
        assert!(!r.is_loop());
    }

    #[test]
    fn loops_match_ultrafilter_cycles() {
        // every composable path of length ≤ 4: loop ⟺ ultrafilter
        // cycle of its label at its domain atom
        for sys in fixtures::all() {
            for layer in composable_paths(&sys, 4).iter().skip(1) {
                for p in layer {
                    let a = p.domain_atom().unwrap();
                    assert_eq!(
                        p.is_loop(),
                        sys.is_ultrafilter_cycle(&p.label(), crate::lattice::Ultrafilter(a)),
                        "path label/loop mismatch"
                    );
                }
            }
        }
    }

    #[test]
    fn no_exit_cycles_yield_entrance_free_loops() {
        for sys in fixtures::all() {
            for rep in sys.cycles_up_to(3) {
                for a in rep.no_exit_atoms.iter() {
                    // follow the per-atom loop induced by the cycle
                    let mut edges = Vec::new();
                    let mut cur = a;
                    for &l in &rep.word.0 {
                        let img = sys.action(l).apply(&sys.algebra().singleton(cur));
                        let next = img.the_atom().expect("no-exit images stay atoms");
                        edges.push(Edge {
                            letter: l,
                            atom: next,
                        });
                        cur = next;
                    }
                    let p = FinitePath::from_edges(&sys, edges).unwrap();
                    assert!(p.is_loop());
                    assert!(p.has_no_entrance(&sys));
                }
            }
        }
    }

    #[test]
    fn canonical_infinite_form() {
        let f3 = fixtures::f3();
        let e1 = Edge { letter: 0, atom: 0 };
        let e2 = Edge { letter: 0, atom: 1 };
        // prefix e1 with period (e2 e1) is the same point as period (e1 e2)
        let a = InfinitePath::new(&f3, vec![e2], vec![e1, e2]).unwrap();
        let b = InfinitePath::new(&f3, vec![], vec![e2, e1]).unwrap();
        assert_eq!(a, b);
        // doubled period collapses
        let f1 = fixtures::f1();
        let e = Edge { letter: 0, atom: 0 };
        let c = InfinitePath::new(&f1, vec![e], vec![e, e]).unwrap();
        assert!(c.prefix().is_empty());
        assert_eq!(c.period().len(), 1);
    }
}
