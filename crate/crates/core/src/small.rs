//! The small subalgebra generated by harmonic vectors under products and the standard homotopy,
//! computed both from colored binary trees and by closure.

use std::fmt;

use serde::Serialize;

use crate::algebra::{subalgebra, Cdga};
use crate::error::{Error, Result};
use crate::graded::GradedMap;
use crate::hodge::{standard_homotopy, HodgeData, HodgeHomotopy};
use crate::homology::homology;
use crate::linalg::{self, Echelon, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Edge {
    /// Identity.
    White,
    /// The homotopy `h`.
    Black,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    /// Position of the leaf among the ordered leaves.
    Leaf(usize),
    Join(Box<ColoredTree>, Box<ColoredTree>),
}

/// Rooted binary tree whose every edge (including the root edge) carries a color.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColoredTree {
    pub edge: Edge,
    pub node: Node,
}

impl ColoredTree {
    pub fn leaf(i: usize) -> ColoredTree {
        ColoredTree { edge: Edge::White, node: Node::Leaf(i) }
    }

    pub fn join(edge: Edge, left: ColoredTree, right: ColoredTree) -> ColoredTree {
        ColoredTree { edge, node: Node::Join(Box::new(left), Box::new(right)) }
    }

    pub fn leaves(&self) -> usize {
        match &self.node {
            Node::Leaf(_) => 1,
            Node::Join(l, r) => l.leaves() + r.leaves(),
        }
    }

    pub fn black_edges(&self) -> usize {
        let own = usize::from(self.edge == Edge::Black);
        match &self.node {
            Node::Leaf(_) => own,
            Node::Join(l, r) => own + l.black_edges() + r.black_edges(),
        }
    }

    fn shifted(&self, by: usize) -> ColoredTree {
        let node = match &self.node {
            Node::Leaf(i) => Node::Leaf(i + by),
            Node::Join(l, r) => Node::Join(Box::new(l.shifted(by)), Box::new(r.shifted(by))),
        };
        ColoredTree { edge: self.edge, node }
    }

    /// `w(w[k] b(...))`: edge color, then `[leaf]` or `(left right)`.
    pub fn serialize_with(&self, label: &dyn Fn(usize) -> String) -> String {
        let c = match self.edge {
            Edge::White => 'w',
            Edge::Black => 'b',
        };
        match &self.node {
            Node::Leaf(i) => format!("{c}[{}]", label(*i)),
            Node::Join(l, r) => format!("{c}({} {})", l.serialize_with(label), r.serialize_with(label)),
        }
    }

    /// Parses the serialization, assigning leaf positions left to right; returns the tree and
    /// the leaf labels.
    pub fn parse(text: &str) -> Result<(ColoredTree, Vec<String>)> {
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0;
        let mut labels = Vec::new();
        let t = parse_tree(&chars, &mut pos, &mut labels)?;
        if pos != chars.len() {
            return Err(Error::Malformed(format!("trailing input in tree at {pos}")));
        }
        Ok((t, labels))
    }
}

fn parse_tree(s: &[char], pos: &mut usize, labels: &mut Vec<String>) -> Result<ColoredTree> {
    let bad = |p: usize, what: &str| Error::Malformed(format!("tree syntax: expected {what} at {p}"));
    let edge = match s.get(*pos) {
        Some('w') => Edge::White,
        Some('b') => Edge::Black,
        _ => return Err(bad(*pos, "edge color")),
    };
    *pos += 1;
    match s.get(*pos) {
        Some('[') => {
            let start = *pos + 1;
            let end = (start..s.len()).find(|&i| s[i] == ']').ok_or_else(|| bad(start, "]"))?;
            labels.push(s[start..end].iter().collect());
            *pos = end + 1;
            Ok(ColoredTree { edge, node: Node::Leaf(labels.len() - 1) })
        }
        Some('(') => {
            *pos += 1;
            let l = parse_tree(s, pos, labels)?;
            if s.get(*pos) != Some(&' ') {
                return Err(bad(*pos, "space"));
            }
            *pos += 1;
            let r = parse_tree(s, pos, labels)?;
            if s.get(*pos) != Some(&')') {
                return Err(bad(*pos, ")"));
            }
            *pos += 1;
            Ok(ColoredTree::join(edge, l, r))
        }
        _ => Err(bad(*pos, "[ or (")),
    }
}

impl fmt::Display for ColoredTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize_with(&|i| (i + 1).to_string()))
    }
}

fn shapes(lo: usize, hi: usize) -> Vec<ColoredTree> {
    if hi - lo == 1 {
        return vec![ColoredTree::leaf(lo)];
    }
    let mut out = Vec::new();
    for split in lo + 1..hi {
        for l in shapes(lo, split) {
            for r in shapes(split, hi) {
                for edge in [Edge::White, Edge::Black] {
                    out.push(ColoredTree::join(edge, l.clone(), r.clone()));
                }
            }
        }
    }
    out
}

/// Every shape and coloring with `l` ordered leaves whose value degree
/// `Σ leafDegrees − #black` is at most `max_out_degree`. Leaf edges are always white, since `h`
/// vanishes on harmonic vectors.
pub fn enumerate_trees(l: usize, max_out_degree: usize, leaf_degrees: &[usize]) -> Vec<ColoredTree> {
    assert!(l >= 1 && leaf_degrees.len() == l, "one degree per leaf");
    let total: usize = leaf_degrees.iter().sum();
    if total.saturating_sub(l - 1) > max_out_degree {
        return Vec::new();
    }
    shapes(0, l).into_iter().filter(|t| total - t.black_edges() <= max_out_degree).collect()
}

/// Whether levels `⌈(L+1)/2⌉..=L` are all empty, in which case every later level is empty too:
/// level `L+1` only combines levels `p, q` with `p + q = L + 1`.
fn tail_empty(levels: impl DoubleEndedIterator<Item = bool> + ExactSizeIterator) -> bool {
    let l = levels.len();
    let need = (l + 1) - (l + 1).div_ceil(2);
    l >= 2 && levels.rev().take(need).all(|e| e)
}

/// Context for evaluating trees: the algebra, its homotopy and a degree cap above which values
/// are dropped.
pub struct TreeEvaluator<'a> {
    pub algebra: &'a Cdga,
    pub homotopy: &'a HodgeHomotopy,
    pub cap: usize,
}

impl TreeEvaluator<'_> {
    fn edge_op(&self, edge: Edge, d: usize, v: Vector) -> Option<(usize, Vector)> {
        match edge {
            Edge::White => Some((d, v)),
            Edge::Black if d == 0 => None,
            Edge::Black => Some((d - 1, self.homotopy.h.apply(d, &v))),
        }
    }

    fn product(&self, (i, x): (usize, Vector), (j, y): (usize, Vector)) -> Option<(usize, Vector)> {
        if i + j > self.cap.min(self.algebra.max_degree()) {
            return None;
        }
        Some((i + j, self.algebra.mul(i, &x, j, &y)))
    }

    /// `Ev(t; leaves)`, or `None` if an intermediate value leaves the degree range.
    pub fn eval(&self, t: &ColoredTree, leaves: &[(usize, Vector)]) -> Option<(usize, Vector)> {
        let (d, v) = match &t.node {
            Node::Leaf(i) => leaves[*i].clone(),
            Node::Join(l, r) => self.product(self.eval(l, leaves)?, self.eval(r, leaves)?)?,
        };
        self.edge_op(t.edge, d, v)
    }
}

/// Harmonic vectors other than multiples of the unit, as `(degree, index, vector)`.
pub fn harmonic_leaves(a: &Cdga, hd: &HodgeData) -> Vec<(usize, usize, Vector)> {
    let field = a.field();
    let unit = Echelon::from_vectors(field, a.dim(0), &[a.unit_vector()]);
    (0..=a.max_degree())
        .flat_map(|d| hd.harmonic(d).iter().enumerate().map(move |(i, v)| (d, i, v.clone())))
        .filter(|(d, _, v)| *d > 0 || !unit.contains(v))
        .collect()
}

/// One nonzero tree evaluation with basis harmonic leaves.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub tree: ColoredTree,
    /// Index into [`harmonic_leaves`] for each leaf position.
    pub leaves: Vec<usize>,
    pub degree: usize,
    pub value: Vector,
}

#[derive(Clone, Debug)]
pub struct TreeEvaluations {
    /// `by_leaves[l − 1]` holds the evaluations with `l` leaves.
    pub by_leaves: Vec<Vec<Evaluation>>,
    pub cap: usize,
    pub complete: bool,
}

/// All nonzero evaluations of colored trees on basis harmonic leaves, built bottom-up so that
/// trees with a vanishing subtree are never formed. Stops early (marking the result incomplete)
/// once `budget` evaluations have been produced.
pub fn tree_evaluations(a: &Cdga, hd: &HodgeData, hh: &HodgeHomotopy, cap: usize, budget: usize) -> TreeEvaluations {
    let ev = TreeEvaluator { algebra: a, homotopy: hh, cap };
    let cap = cap.min(a.max_degree());
    let leaves = harmonic_leaves(a, hd);
    let mut by_leaves: Vec<Vec<Evaluation>> = Vec::new();
    let first: Vec<Evaluation> = leaves
        .iter()
        .enumerate()
        .filter(|(_, (d, _, _))| *d <= cap)
        .map(|(k, (d, _, v))| Evaluation { tree: ColoredTree::leaf(0), leaves: vec![k], degree: *d, value: v.clone() })
        .collect();
    let mut count = first.len();
    by_leaves.push(first);
    let mut complete = true;
    let max_leaves = 2 * cap + 2;
    'levels: for l in 2..=max_leaves {
        let mut level = Vec::new();
        for p in 1..l {
            let (left, right) = (&by_leaves[p - 1], &by_leaves[l - p - 1]);
            for x in left {
                for y in right {
                    let Some((d, v)) = ev.product((x.degree, x.value.clone()), (y.degree, y.value.clone())) else {
                        continue;
                    };
                    if linalg::is_zero_vector(&v) {
                        continue;
                    }
                    let mut leaf_ids = x.leaves.clone();
                    leaf_ids.extend(&y.leaves);
                    for edge in [Edge::White, Edge::Black] {
                        if let Some((dd, vv)) = ev.edge_op(edge, d, v.clone()) {
                            if !linalg::is_zero_vector(&vv) {
                                let tree = ColoredTree::join(edge, x.tree.clone(), y.tree.shifted(p));
                                level.push(Evaluation { tree, leaves: leaf_ids.clone(), degree: dd, value: vv });
                                count += 1;
                                if count >= budget {
                                    complete = false;
                                    by_leaves.push(level);
                                    break 'levels;
                                }
                            }
                        }
                    }
                }
            }
        }
        by_leaves.push(level);
        if tail_empty(by_leaves.iter().map(Vec::is_empty)) {
            break;
        }
        if l == max_leaves {
            complete = false;
        }
    }
    TreeEvaluations { by_leaves, cap, complete }
}

impl TreeEvaluations {
    /// Span of the unit and all evaluations, per degree up to the cap.
    pub fn span(&self, a: &Cdga) -> Vec<Vec<Vector>> {
        let field = a.field();
        let mut ech: Vec<Echelon> = (0..=self.cap).map(|d| Echelon::new(field, a.dim(d))).collect();
        ech[0].insert(&a.unit_vector());
        for e in self.by_leaves.iter().flatten() {
            ech[e.degree].insert(&e.value);
        }
        ech.iter().map(Echelon::basis).collect()
    }

    /// Nonzero evaluations with `l` leaves and degree `< l + 1`.
    pub fn degree_bound_violations(&self) -> Vec<&Evaluation> {
        self.by_leaves
            .iter()
            .enumerate()
            .flat_map(|(k, evs)| evs.iter().filter(move |e| e.degree < k + 2))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.by_leaves.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Degreewise span of all tree values by number of leaves: `W₁ = H⁺`,
/// `U_l = Σ_{p+q=l} W_p ∧ W_q`, `W_l = U_l + h(U_l)`.
/// Gives up after `2·cap + 2` leaves (possible only without simple connectivity), reporting the
/// span as incomplete.
pub fn tree_span(a: &Cdga, hd: &HodgeData, hh: &HodgeHomotopy, cap: usize) -> (Vec<Vec<Vector>>, bool) {
    let field = a.field();
    let cap = cap.min(a.max_degree());
    let ev = TreeEvaluator { algebra: a, homotopy: hh, cap };
    let leaves = harmonic_leaves(a, hd);
    let new_level = || -> Vec<Echelon> { (0..=cap).map(|d| Echelon::new(field, a.dim(d))).collect() };
    let mut w: Vec<Vec<Echelon>> = Vec::new();
    let mut first = new_level();
    for (d, _, v) in &leaves {
        if *d <= cap {
            first[*d].insert(v);
        }
    }
    w.push(first);
    let mut total = new_level();
    total[0].insert(&a.unit_vector());
    for (d, e) in w[0].iter().enumerate() {
        for v in e.basis() {
            total[d].insert(&v);
        }
    }
    let max_leaves = 2 * cap + 2;
    let mut complete = true;
    for l in 2..=max_leaves {
        let mut level = new_level();
        for p in 1..l {
            let (x, y) = (&w[p - 1], &w[l - p - 1]);
            for i in 0..=cap {
                for j in 0..=cap - i {
                    for u in x[i].basis() {
                        for v in y[j].basis() {
                            if let Some((d, prod)) = ev.product((i, u.clone()), (j, v)) {
                                if !linalg::is_zero_vector(&prod) {
                                    if d > 0 {
                                        level[d - 1].insert(&hh.h.apply(d, &prod));
                                    }
                                    level[d].insert(&prod);
                                }
                            }
                        }
                    }
                }
            }
        }
        for (d, e) in level.iter().enumerate() {
            for v in e.basis() {
                total[d].insert(&v);
            }
        }
        w.push(level);
        if tail_empty(w.iter().map(|lv| lv.iter().all(Echelon::is_empty))) {
            break;
        }
        if l == max_leaves {
            complete = false;
            break;
        }
    }
    (total.iter().map(Echelon::basis).collect(), complete)
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallSubalgebra {
    #[serde(skip)]
    pub basis: Vec<Vec<Vector>>,
    pub dims: Vec<usize>,
    pub cap: usize,
    /// Degrees above the cap in which a nonzero product or differential was dropped.
    #[serde(rename = "capHits")]
    pub cap_hits: Vec<usize>,
    /// Degrees `≤ completeThrough` are certified complete.
    #[serde(rename = "completeThrough")]
    pub complete_through: usize,
    pub rounds: usize,
    /// Homology is connected and simply connected, which guarantees finiteness.
    pub guaranteed: bool,
}

/// Closure of `H ∪ {1}` under `∧`, `D` and `h` within degrees `≤ cap`.
pub fn small_subalgebra(a: &Cdga, hd: &HodgeData, cap: usize) -> Result<(SmallSubalgebra, HodgeHomotopy)> {
    let hh = standard_homotopy(a.complex(), hd)?;
    let s = small_closure(a, hd, &hh, cap);
    Ok((s, hh))
}

pub fn small_closure(a: &Cdga, hd: &HodgeData, hh: &HodgeHomotopy, cap: usize) -> SmallSubalgebra {
    let field = a.field();
    let top = a.max_degree();
    let cap_eff = cap.min(top);
    let mut ech: Vec<Echelon> = (0..=cap_eff).map(|d| Echelon::new(field, a.dim(d))).collect();
    let mut members: Vec<Vec<Vector>> = vec![Vec::new(); cap_eff + 1];
    let mut pending: Vec<(usize, Vector)> = vec![(0, a.unit_vector())];
    for d in 0..=cap_eff {
        pending.extend(hd.harmonic(d).iter().map(|v| (d, v.clone())));
    }
    let mut cap_hits = std::collections::BTreeSet::new();
    let mut rounds = 0;
    while !pending.is_empty() {
        rounds += 1;
        let mut fresh = Vec::new();
        for (d, v) in pending.drain(..) {
            if ech[d].insert(&v) {
                fresh.push((d, v));
            }
        }
        let mut next = Vec::new();
        for (d, v) in &fresh {
            members[*d].push(v.clone());
        }
        for (d, v) in &fresh {
            let (d, v) = (*d, v);
            if d < top {
                let dv = a.apply_d(d, v);
                if !linalg::is_zero_vector(&dv) {
                    if d < cap_eff {
                        next.push((d + 1, dv));
                    } else {
                        cap_hits.insert(d + 1);
                    }
                }
            }
            if d > 0 {
                let hv = hh.h.apply(d, v);
                if !linalg::is_zero_vector(&hv) {
                    next.push((d - 1, hv));
                }
            }
            for (j, ms) in members.iter().enumerate() {
                if d + j > top {
                    break;
                }
                for m in ms {
                    let p = a.mul(d, v, j, m);
                    if linalg::is_zero_vector(&p) {
                        continue;
                    }
                    if d + j <= cap_eff {
                        next.push((d + j, p));
                    } else {
                        cap_hits.insert(d + j);
                    }
                }
            }
        }
        pending = next;
    }
    let mut basis: Vec<Vec<Vector>> = ech.iter().map(Echelon::basis).collect();
    // Put the unit first so the result can be used as a subalgebra basis directly.
    let rest = std::mem::take(&mut basis[0]);
    basis[0] = vec![a.unit_vector()];
    let keep = linalg::extend_greedy(field, a.dim(0), &basis[0], &rest);
    basis[0].extend(keep.into_iter().map(|i| rest[i].clone()));
    let h = homology(a.complex());
    let guaranteed = h.dim(0) == 1 && h.dim(1) == 0;
    let complete_through = if cap_hits.is_empty() { cap_eff } else { cap_eff.saturating_sub(1) };
    SmallSubalgebra {
        dims: basis.iter().map(Vec::len).collect(),
        basis,
        cap: cap_eff,
        cap_hits: cap_hits.into_iter().collect(),
        complete_through,
        rounds,
        guaranteed,
    }
}

impl SmallSubalgebra {
    /// The subalgebra as a CDGA with its inclusion; requires the cap to reach the top degree.
    pub fn to_cdga(&self, a: &Cdga, name: &str) -> Result<(Cdga, GradedMap)> {
        if self.cap < a.max_degree() {
            return Err(Error::Precondition(format!(
                "small subalgebra was computed only up to degree {} of {}",
                self.cap,
                a.max_degree()
            )));
        }
        subalgebra(a, &self.basis, name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    #[serde(rename = "containsHarmonic")]
    pub contains_harmonic: bool,
    #[serde(rename = "differentialClosed")]
    pub d_closed: bool,
    #[serde(rename = "homotopyClosed")]
    pub h_closed: bool,
    #[serde(rename = "productClosed")]
    pub product_closed: bool,
    /// `S = H ⊕ DS ⊕ h(S)` in every degree below the cap.
    #[serde(rename = "hodgeSplit")]
    pub hodge_split: bool,
    pub problems: Vec<String>,
}

impl ClosureReport {
    pub fn all_pass(&self) -> bool {
        self.contains_harmonic && self.d_closed && self.h_closed && self.product_closed && self.hodge_split
    }
}

/// Checks the closure properties of a subspace `basis` (per degree, up to `cap`).
pub fn verify_closure(a: &Cdga, hd: &HodgeData, hh: &HodgeHomotopy, basis: &[Vec<Vector>], cap: usize) -> ClosureReport {
    let field = a.field();
    let cap = cap.min(a.max_degree());
    let fam = |d: usize| basis.get(d).map_or(&[][..], |v| v.as_slice());
    let ech: Vec<Echelon> = (0..=cap).map(|d| Echelon::from_vectors(field, a.dim(d), fam(d))).collect();
    let mut problems = Vec::new();
    let mut contains_harmonic = true;
    let mut d_closed = true;
    let mut h_closed = true;
    let mut product_closed = true;
    let mut hodge_split = true;
    let label = |d: usize, v: &Vector| a.space().format_vector(d, v);
    for d in 0..=cap {
        for v in hd.harmonic(d) {
            if !ech[d].contains(v) {
                contains_harmonic = false;
                problems.push(format!("harmonic {} missing", label(d, v)));
            }
        }
        for v in fam(d) {
            if d < cap {
                let dv = a.apply_d(d, v);
                if !ech[d + 1].contains(&dv) {
                    d_closed = false;
                    problems.push(format!("D({}) missing", label(d, v)));
                }
            }
            if d > 0 {
                let hv = hh.h.apply(d, v);
                if !ech[d - 1].contains(&hv) {
                    h_closed = false;
                    problems.push(format!("h({}) = {} missing", label(d, v), label(d - 1, &hv)));
                }
            }
            for j in 0..=cap - d {
                for w in fam(j) {
                    if !ech[d + j].contains(&a.mul(d, v, j, w)) {
                        product_closed = false;
                        problems.push(format!("{} ∧ {} missing", label(d, v), label(j, w)));
                    }
                }
            }
        }
        if d < cap {
            let mut parts: Vec<Vector> = hd.harmonic(d).to_vec();
            if d > 0 {
                parts.extend(fam(d - 1).iter().map(|v| a.apply_d(d - 1, v)));
            }
            parts.extend(fam(d + 1).iter().map(|v| hh.h.apply(d + 1, v)));
            let dh = hd.harmonic(d).len();
            let dd = if d > 0 { linalg::span_dim(field, a.dim(d), &parts[dh..dh + fam(d - 1).len()]) } else { 0 };
            let dhs = linalg::span_dim(field, a.dim(d), &parts[dh + if d > 0 { fam(d - 1).len() } else { 0 }..]);
            let whole = linalg::span_dim(field, a.dim(d), &parts);
            if !(whole == ech[d].len() && whole == dh + dd + dhs && parts.iter().all(|p| ech[d].contains(p))) {
                hodge_split = false;
                problems.push(format!("H ⊕ DS ⊕ h(S) does not exhaust S in degree {d}"));
            }
        }
    }
    problems.truncate(50);
    ClosureReport { contains_harmonic, d_closed, h_closed, product_closed, hodge_split, problems }
}
