//! Complete Heyting prealgebras and the finite instances the modalities
//! and propositions are valued in.
//!
//! Everything is stated against a preorder: equality between truth
//! values is never assumed, only mutual `leq`. Instances are carrier
//! objects holding whatever runtime data they need (a poset, a probe
//! range), with elements as plain values.

use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

use crate::report::{LawItem, LawReport};

pub trait Heyting {
    type Elem: Clone + PartialEq + Ord + fmt::Debug;

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    fn top(&self) -> Self::Elem;
    fn bottom(&self) -> Self::Elem;
    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Residuated implication: `a ≤ implies(b, c)` iff `meet(a, b) ≤ c`.
    fn implies(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Infimum of a finite list; the empty infimum is top.
    fn inf<I: IntoIterator<Item = Self::Elem>>(&self, xs: I) -> Self::Elem {
        let mut acc = self.top();
        for x in xs {
            acc = self.meet(&acc, &x);
        }
        acc
    }

    /// Order-equivalence: mutual `leq`.
    fn equiv(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.leq(a, b) && self.leq(b, a)
    }

    /// Finite enumeration of (representatives of) the carrier.
    fn elements(&self) -> Vec<Self::Elem>;

    fn render(&self, e: &Self::Elem) -> String {
        format!("{e:?}")
    }
}

/// Joins, for the instances that have them. The frame construction needs
/// only meets and implication; the modalities of the shipped effects need
/// joins as well, and every shipped instance provides them.
pub trait HeytingJoins: Heyting {
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Supremum of a finite list; the empty supremum is bottom.
    fn sup<I: IntoIterator<Item = Self::Elem>>(&self, xs: I) -> Self::Elem {
        let mut acc = self.bottom();
        for x in xs {
            acc = self.join(&acc, &x);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// The two-point instance
// ---------------------------------------------------------------------------

/// `{⊥, ⊤}`: the subsets of a one-element set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TwoPoint;

impl Heyting for TwoPoint {
    type Elem = bool;

    fn leq(&self, a: &bool, b: &bool) -> bool {
        !a | b
    }

    fn top(&self) -> bool {
        true
    }

    fn bottom(&self) -> bool {
        false
    }

    fn meet(&self, a: &bool, b: &bool) -> bool {
        a & b
    }

    fn implies(&self, a: &bool, b: &bool) -> bool {
        !a | b
    }

    fn elements(&self) -> Vec<bool> {
        vec![false, true]
    }

    fn render(&self, e: &bool) -> String {
        if *e { "⊤" } else { "⊥" }.to_string()
    }
}

impl HeytingJoins for TwoPoint {
    fn join(&self, a: &bool, b: &bool) -> bool {
        a | b
    }
}

// ---------------------------------------------------------------------------
// Finite preordered sets and their upper sets
// ---------------------------------------------------------------------------

/// A finite preordered set over elements `0..size`, closed from a list of
/// covering pairs.
#[derive(Clone, Debug)]
pub struct Poset {
    size: usize,
    leq: Vec<Vec<bool>>,
}

impl Poset {
    /// Reflexive-transitive closure of `lo < hi` covering pairs.
    pub fn from_covers(size: usize, covers: &[(usize, usize)]) -> Poset {
        let mut leq = vec![vec![false; size]; size];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(lo, hi) in covers {
            leq[lo][hi] = true;
        }
        // Floyd-Warshall style closure
        for k in 0..size {
            for i in 0..size {
                if leq[i][k] {
                    for j in 0..size {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        Poset { size, leq }
    }

    pub fn chain(size: usize) -> Poset {
        let covers: Vec<(usize, usize)> = (1..size).map(|i| (i - 1, i)).collect();
        Poset::from_covers(size, &covers)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }
}

/// An upward-closed subset of a finite poset.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct UpperSet(pub BTreeSet<usize>);

impl fmt::Debug for UpperSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Upper sets of a finite poset under inclusion, with the Alexandrov
/// implication: `U ⊐ V` is the largest upper set whose meet with `U`
/// lies inside `V`.
#[derive(Clone, Debug)]
pub struct UpperSets {
    pub poset: Rc<Poset>,
}

impl UpperSets {
    pub fn new(poset: Poset) -> Self {
        UpperSets {
            poset: Rc::new(poset),
        }
    }

    pub fn is_upper(&self, s: &BTreeSet<usize>) -> bool {
        for &a in s {
            for b in 0..self.poset.size() {
                if self.poset.leq(a, b) && !s.contains(&b) {
                    return false;
                }
            }
        }
        true
    }

    /// Smallest upper set containing `x`.
    pub fn principal(&self, x: usize) -> UpperSet {
        UpperSet(
            (0..self.poset.size())
                .filter(|&b| self.poset.leq(x, b))
                .collect(),
        )
    }
}

impl Heyting for UpperSets {
    type Elem = UpperSet;

    fn leq(&self, a: &UpperSet, b: &UpperSet) -> bool {
        a.0.is_subset(&b.0)
    }

    fn top(&self) -> UpperSet {
        UpperSet((0..self.poset.size()).collect())
    }

    fn bottom(&self) -> UpperSet {
        UpperSet(BTreeSet::new())
    }

    fn meet(&self, a: &UpperSet, b: &UpperSet) -> UpperSet {
        UpperSet(a.0.intersection(&b.0).copied().collect())
    }

    fn implies(&self, a: &UpperSet, b: &UpperSet) -> UpperSet {
        // σ is in U ⊐ V iff every σ' ≥ σ in U is also in V
        let mut out = BTreeSet::new();
        for s in 0..self.poset.size() {
            let ok = (0..self.poset.size()).all(|t| {
                !self.poset.leq(s, t) || !a.0.contains(&t) || b.0.contains(&t)
            });
            if ok {
                out.insert(s);
            }
        }
        UpperSet(out)
    }

    fn elements(&self) -> Vec<UpperSet> {
        let n = self.poset.size();
        assert!(n <= 16, "upper-set enumeration is exponential");
        let mut out = Vec::new();
        for mask in 0..(1u32 << n) {
            let s: BTreeSet<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if self.is_upper(&s) {
                out.push(UpperSet(s));
            }
        }
        out
    }
}

impl HeytingJoins for UpperSets {
    fn join(&self, a: &UpperSet, b: &UpperSet) -> UpperSet {
        UpperSet(a.0.union(&b.0).copied().collect())
    }
}

// ---------------------------------------------------------------------------
// Future-stable state predicates over the natural-number chain
// ---------------------------------------------------------------------------

/// A monotone map from natural-number states to the two-point algebra.
/// On a chain every such map is a threshold: false below some state,
/// true from it onward, or never true at all.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StatePred {
    Never,
    From(u64),
}

impl StatePred {
    pub fn at(&self, state: u64) -> bool {
        match self {
            StatePred::Never => false,
            StatePred::From(t) => state >= *t,
        }
    }
}

impl fmt::Debug for StatePred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatePred::Never => write!(f, "never"),
            StatePred::From(t) => write!(f, "from({t})"),
        }
    }
}

/// The algebra of future-stable state predicates, pointwise ordered.
/// `horizon` bounds the thresholds enumerated for exhaustive law checks.
#[derive(Clone, Debug)]
pub struct StatePreds {
    pub horizon: u64,
}

impl Default for StatePreds {
    fn default() -> Self {
        StatePreds { horizon: 8 }
    }
}

impl StatePreds {
    /// Threshold form of a monotone valuation sampled on ascending
    /// states: holds from the first sampled state where it does, with
    /// the window-edge value persisting beyond the window; `Never` when
    /// it holds at no sampled state.
    pub fn from_samples(samples: &[(u64, bool)]) -> StatePred {
        for &(s, v) in samples {
            if v {
                return StatePred::From(s);
            }
        }
        StatePred::Never
    }
}

impl Heyting for StatePreds {
    type Elem = StatePred;

    fn leq(&self, a: &StatePred, b: &StatePred) -> bool {
        match (a, b) {
            (StatePred::Never, _) => true,
            (StatePred::From(_), StatePred::Never) => false,
            (StatePred::From(x), StatePred::From(y)) => y <= x,
        }
    }

    fn top(&self) -> StatePred {
        StatePred::From(0)
    }

    fn bottom(&self) -> StatePred {
        StatePred::Never
    }

    fn meet(&self, a: &StatePred, b: &StatePred) -> StatePred {
        match (a, b) {
            (StatePred::Never, _) | (_, StatePred::Never) => StatePred::Never,
            (StatePred::From(x), StatePred::From(y)) => StatePred::From(*x.max(y)),
        }
    }

    fn implies(&self, a: &StatePred, b: &StatePred) -> StatePred {
        match (a, b) {
            (StatePred::Never, _) => StatePred::From(0),
            (StatePred::From(_), StatePred::Never) => StatePred::Never,
            (StatePred::From(x), StatePred::From(y)) => {
                if y <= x {
                    StatePred::From(0)
                } else {
                    StatePred::From(*y)
                }
            }
        }
    }

    fn elements(&self) -> Vec<StatePred> {
        let mut out = vec![StatePred::Never];
        out.extend((0..=self.horizon).map(StatePred::From));
        out
    }

    fn render(&self, e: &StatePred) -> String {
        format!("{e:?}")
    }
}

impl HeytingJoins for StatePreds {
    fn join(&self, a: &StatePred, b: &StatePred) -> StatePred {
        match (a, b) {
            (StatePred::Never, x) | (x, StatePred::Never) => *x,
            (StatePred::From(x), StatePred::From(y)) => StatePred::From(*x.min(y)),
        }
    }
}

// ---------------------------------------------------------------------------
// Exhaustive law checking for finite instances
// ---------------------------------------------------------------------------

/// Exhaustively verify the prealgebra axioms over `H::elements()`:
/// preorder laws, bounds, the greatest-lower-bound property of meets,
/// infima over small lists, and residuation.
pub fn check_heyting_laws<H: Heyting>(h: &H, name: &str) -> LawReport {
    let mut report = LawReport::new(format!("heyting[{name}]"));
    let elems = h.elements();
    let fmt1 = |a: &H::Elem| h.render(a);

    let mut refl = LawItem::new("leq-reflexive");
    for a in &elems {
        refl.record_bool(h.leq(a, a), || fmt1(a));
    }
    report.push(refl);

    let mut trans = LawItem::new("leq-transitive");
    for a in &elems {
        for b in &elems {
            for c in &elems {
                let ok = !(h.leq(a, b) && h.leq(b, c)) || h.leq(a, c);
                trans.record_bool(ok, || format!("{} ≤ {} ≤ {}", fmt1(a), fmt1(b), fmt1(c)));
            }
        }
    }
    report.push(trans);

    let mut bounds = LawItem::new("top-greatest-bottom-least");
    for a in &elems {
        bounds.record_bool(h.leq(a, &h.top()) && h.leq(&h.bottom(), a), || fmt1(a));
    }
    report.push(bounds);

    let mut glb = LawItem::new("meet-is-glb");
    for a in &elems {
        for b in &elems {
            let m = h.meet(a, b);
            let mut ok = h.leq(&m, a) && h.leq(&m, b);
            for c in &elems {
                if h.leq(c, a) && h.leq(c, b) && !h.leq(c, &m) {
                    ok = false;
                }
            }
            glb.record_bool(ok, || format!("{} ⊓ {}", fmt1(a), fmt1(b)));
        }
    }
    report.push(glb);

    let mut inf = LawItem::new("inf-finite-lists");
    inf.record_bool(h.equiv(&h.inf([]), &h.top()), || "empty inf".to_string());
    for a in &elems {
        inf.record_bool(h.equiv(&h.inf([a.clone()]), a), || fmt1(a));
        for b in &elems {
            let i = h.inf([a.clone(), b.clone()]);
            inf.record_bool(h.equiv(&i, &h.meet(a, b)), || {
                format!("inf[{}, {}]", fmt1(a), fmt1(b))
            });
        }
    }
    report.push(inf);

    let mut resid = LawItem::new("residuation");
    for a in &elems {
        for b in &elems {
            for c in &elems {
                let lhs = h.leq(&h.meet(a, b), c);
                let rhs = h.leq(a, &h.implies(b, c));
                resid.record_bool(lhs == rhs, || {
                    format!("a={} b={} c={}", fmt1(a), fmt1(b), fmt1(c))
                });
            }
        }
    }
    report.push(resid);

    report
}
