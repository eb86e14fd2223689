//! Finite groups acting on finite point sets.
//!
//! Groups are explicit multiplication tables and actions explicit tables
//! `act[g][x]`. Everything is indexed by position; labels are only carried
//! for display and serialization.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::StructureError;
use crate::pointset::PointSet;
use crate::scalar::{int, Rational};

/// Index of a group element.
pub type GroupElem = usize;
/// Index of a point of `X`.
pub type Point = usize;

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<Vec<GroupElem>>,
    identity: GroupElem,
    inverses: Vec<GroupElem>,
}

impl FiniteGroup {
    /// Validates the table by full enumeration: closure, identity,
    /// associativity and inverses.
    pub fn new(labels: Vec<String>, table: Vec<Vec<GroupElem>>) -> Result<Self, StructureError> {
        let n = labels.len();
        if n == 0 {
            return Err(StructureError::EmptyGroup);
        }
        check_unique(&labels)?;
        if table.len() != n {
            return Err(StructureError::TableShape { row: table.len(), len: table.len(), expected: n });
        }
        for (row, entries) in table.iter().enumerate() {
            if entries.len() != n {
                return Err(StructureError::TableShape { row, len: entries.len(), expected: n });
            }
            if let Some((col, &value)) = entries.iter().enumerate().find(|(_, &v)| v >= n) {
                return Err(StructureError::TableEntryOutOfRange { row, col, value });
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or(StructureError::NoIdentity)?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(StructureError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for g in 0..n {
            let inv = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or(StructureError::NoInverse { element: g })?;
            inverses.push(inv);
        }
        Ok(FiniteGroup { labels, table, identity, inverses })
    }

    /// The cyclic group `Z/n`, labels `"0"`, ..., `"n-1"`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        let labels = (0..n).map(|k| k.to_string()).collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::new(labels, table).expect("cyclic table is a group")
    }

    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    /// Direct product; element `(a, b)` has index `a * |right| + b`.
    pub fn product(left: &FiniteGroup, right: &FiniteGroup) -> Self {
        let (n, m) = (left.order(), right.order());
        let mut labels = Vec::with_capacity(n * m);
        for a in 0..n {
            for b in 0..m {
                labels.push(format!("({},{})", left.labels[a], right.labels[b]));
            }
        }
        let table = (0..n * m)
            .map(|x| {
                (0..n * m)
                    .map(|y| left.mul(x / m, y / m) * m + right.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        FiniteGroup::new(labels, table).expect("product of groups is a group")
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> GroupElem {
        self.identity
    }

    pub fn mul(&self, g: GroupElem, h: GroupElem) -> GroupElem {
        self.table[g][h]
    }

    pub fn inv(&self, g: GroupElem) -> GroupElem {
        self.inverses[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, g: GroupElem) -> &str {
        &self.labels[g]
    }

    pub fn table(&self) -> &[Vec<GroupElem>] {
        &self.table
    }

    pub fn index_of(&self, label: &str) -> Option<GroupElem> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn elements(&self) -> core::ops::Range<GroupElem> {
        0..self.order()
    }
}

fn check_unique(labels: &[String]) -> Result<(), StructureError> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(StructureError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// A finite group acting on a finite set of points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynSystem {
    group: FiniteGroup,
    points: Vec<String>,
    act: Vec<Vec<Point>>,
}

/// Diagnostic summary of a validated system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemReport {
    pub group_order: usize,
    pub num_points: usize,
    pub free: bool,
    pub minimal: bool,
    pub orbits: Vec<PointSet>,
}

impl DynSystem {
    /// Validates the action axioms `e·x = x` and `g·(h·x) = (gh)·x`.
    pub fn new(group: FiniteGroup, points: Vec<String>, act: Vec<Vec<Point>>) -> Result<Self, StructureError> {
        check_unique(&points)?;
        let (n, m) = (group.order(), points.len());
        if act.len() != n {
            return Err(StructureError::ActionShape { rows: act.len(), expected: n });
        }
        for (g, row) in act.iter().enumerate() {
            if row.len() != m {
                return Err(StructureError::TableShape { row: g, len: row.len(), expected: m });
            }
            if let Some((point, &value)) = row.iter().enumerate().find(|(_, &v)| v >= m) {
                return Err(StructureError::ActionEntryOutOfRange { group: g, point, value });
            }
        }
        let e = group.identity();
        if let Some(point) = (0..m).find(|&x| act[e][x] != x) {
            return Err(StructureError::IdentityMoves { point });
        }
        for g in 0..n {
            for h in 0..n {
                for x in 0..m {
                    if act[g][act[h][x]] != act[group.mul(g, h)][x] {
                        return Err(StructureError::NotCompatible { g, h, point: x });
                    }
                }
            }
        }
        Ok(DynSystem { group, points, act })
    }

    /// Left translation of a group on itself.
    pub fn translation(group: FiniteGroup) -> Self {
        DynSystem::translation_copies(group, 1)
    }

    /// `copies` disjoint copies of the left translation action; point
    /// `(c, h)` has index `c * |G| + h`. Free, with `copies` orbits.
    pub fn translation_copies(group: FiniteGroup, copies: usize) -> Self {
        let n = group.order();
        let points = (0..copies)
            .flat_map(|c| {
                let group = &group;
                (0..n).map(move |h| if copies == 1 { group.label(h).to_string() } else { format!("{c}:{}", group.label(h)) })
            })
            .collect();
        let act = (0..n)
            .map(|g| (0..copies * n).map(|p| (p / n) * n + group.mul(g, p % n)).collect())
            .collect();
        DynSystem::new(group, points, act).expect("translation is an action")
    }

    /// The group acting trivially on `num_points` points.
    pub fn trivial_action(group: FiniteGroup, num_points: usize) -> Self {
        let points = (0..num_points).map(|x| x.to_string()).collect();
        let act = vec![(0..num_points).collect::<Vec<_>>(); group.order()];
        DynSystem::new(group, points, act).expect("trivial action")
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point_label(&self, x: Point) -> &str {
        &self.points[x]
    }

    pub fn point_index(&self, label: &str) -> Option<Point> {
        self.points.iter().position(|l| l == label)
    }

    pub fn action_table(&self) -> &[Vec<Point>] {
        &self.act
    }

    /// `g · x`.
    pub fn act(&self, g: GroupElem, x: Point) -> Point {
        self.act[g][x]
    }

    /// `g · S`.
    pub fn translate(&self, g: GroupElem, set: &PointSet) -> PointSet {
        set.map(|x| self.act(g, x))
    }

    pub fn is_free(&self) -> bool {
        let e = self.group.identity();
        self.group.elements().filter(|&g| g != e).all(|g| (0..self.num_points()).all(|x| self.act(g, x) != x))
    }

    /// Orbits ordered by least point index.
    pub fn orbits(&self) -> Vec<PointSet> {
        let m = self.num_points();
        let mut seen = PointSet::empty(m);
        let mut out = Vec::new();
        for x in 0..m {
            if seen.contains(x) {
                continue;
            }
            let orbit = PointSet::from_points(m, self.group.elements().map(|g| self.act(g, x)));
            seen = seen.union(&orbit);
            out.push(orbit);
        }
        out
    }

    /// Index of the orbit containing each point.
    pub fn orbit_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.num_points()];
        for (k, orbit) in self.orbits().iter().enumerate() {
            for x in orbit.iter() {
                idx[x] = k;
            }
        }
        idx
    }

    /// A finite system is minimal exactly when it is transitive.
    pub fn is_minimal(&self) -> bool {
        self.num_points() > 0 && self.orbits().len() == 1
    }

    pub fn report(&self) -> SystemReport {
        SystemReport {
            group_order: self.group.order(),
            num_points: self.num_points(),
            free: self.is_free(),
            minimal: self.is_minimal(),
            orbits: self.orbits(),
        }
    }

    /// The extreme invariant probability measures: uniform on each orbit.
    pub fn extreme_invariant_measures(&self) -> Vec<InvariantMeasure> {
        let m = self.num_points();
        self.orbits()
            .into_iter()
            .map(|orbit| {
                let w = Rational::new(1.into(), (orbit.len() as i64).into());
                let weights = (0..m).map(|x| if orbit.contains(x) { w.clone() } else { Rational::zero() }).collect();
                InvariantMeasure { weights }
            })
            .collect()
    }

    /// `Z/n × G` acting on `{0..n-1} × X` by cyclic shift times the given
    /// action. Group element `(c, g)` has index `c·|G| + g`; point `(i, x)`
    /// has index `i·|X| + x`.
    pub fn product_with_cyclic(&self, n: usize) -> DynSystem {
        assert!(n > 0, "product with Z/0");
        let group = FiniteGroup::product(&FiniteGroup::cyclic(n), &self.group);
        let (gs, m) = (self.group.order(), self.num_points());
        let mut points = Vec::with_capacity(n * m);
        for i in 0..n {
            for x in 0..m {
                points.push(format!("({},{})", i, self.points[x]));
            }
        }
        let act = (0..n * gs)
            .map(|cg| {
                let (c, g) = (cg / gs, cg % gs);
                (0..n * m).map(|p| ((p / m + c) % n) * m + self.act(g, p % m)).collect()
            })
            .collect();
        DynSystem::new(group, points, act).expect("product action is an action")
    }
}

/// Validates raw tables and reports freeness, minimality and orbits.
pub fn validate_system(
    group_labels: Vec<String>,
    table: Vec<Vec<GroupElem>>,
    points: Vec<String>,
    act: Vec<Vec<Point>>,
) -> Result<SystemReport, StructureError> {
    let group = FiniteGroup::new(group_labels, table)?;
    Ok(DynSystem::new(group, points, act)?.report())
}

/// A `G`-invariant probability measure on `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantMeasure {
    pub weights: Vec<Rational>,
}

impl InvariantMeasure {
    pub fn measure(&self, set: &PointSet) -> Rational {
        set.iter().fold(Rational::zero(), |acc, x| acc + &self.weights[x])
    }

    pub fn is_invariant(&self, sys: &DynSystem) -> bool {
        let total = self.weights.iter().fold(Rational::zero(), |a, w| a + w);
        total == int(1)
            && self.weights.iter().all(|w| *w >= Rational::zero())
            && sys.group().elements().all(|g| (0..sys.num_points()).all(|x| self.weights[sys.act(g, x)] == self.weights[x]))
    }
}
