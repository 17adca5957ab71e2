//! Eventual behaviour of boolean combinations.
//!
//! Past a bound, every leaf with finitely many elements (or gaps) is constant and
//! leaves with a finite symmetric difference coincide. What remains is a boolean
//! function of independent leaf variables, compared over every assignment.

use std::cell::Cell;

use num_bigint::BigUint;

use super::{Finiteness, IndexSet};

/// Largest number of free leaf variables enumerated.
const MAX_VARS: usize = 10;
/// Largest expression size handled.
const MAX_NODES: usize = 96;

#[derive(Clone, Copy)]
enum Atom {
    Const(bool),
    Var(usize),
}

struct Leaves {
    atoms: Vec<(IndexSet, Atom)>,
    reps: Vec<IndexSet>,
    bound: BigUint,
}

fn size(s: &IndexSet) -> usize {
    match s {
        IndexSet::Union(a, b) | IndexSet::Inter(a, b) | IndexSet::Diff(a, b) => {
            1 + size(a) + size(b)
        }
        IndexSet::Compl(a) => 1 + size(a),
        _ => 1,
    }
}

impl Leaves {
    fn new() -> Self {
        Leaves {
            atoms: Vec::new(),
            reps: Vec::new(),
            bound: BigUint::default(),
        }
    }

    fn collect(&mut self, s: &IndexSet) -> Option<()> {
        match s {
            IndexSet::Union(a, b) | IndexSet::Inter(a, b) | IndexSet::Diff(a, b) => {
                self.collect(a)?;
                self.collect(b)
            }
            IndexSet::Compl(a) => self.collect(a),
            leaf => self.add(leaf),
        }
    }

    fn add(&mut self, leaf: &IndexSet) -> Option<()> {
        if self.atoms.iter().any(|(l, _)| l == leaf) {
            return Some(());
        }
        let atom = if let Finiteness::Finite(b) = leaf.finiteness() {
            self.bound = self.bound.clone().max(b);
            Atom::Const(false)
        } else if let Finiteness::Finite(b) = leaf.cofiniteness() {
            self.bound = self.bound.clone().max(b);
            Atom::Const(true)
        } else if let Some((i, b)) = self
            .reps
            .iter()
            .enumerate()
            .find_map(|(i, r)| leaf.finite_symdiff_bound(r).map(|b| (i, b)))
        {
            self.bound = self.bound.clone().max(b);
            Atom::Var(i)
        } else {
            if self.reps.len() == MAX_VARS {
                return None;
            }
            self.reps.push(leaf.clone());
            Atom::Var(self.reps.len() - 1)
        };
        self.atoms.push((leaf.clone(), atom));
        Some(())
    }

    fn eval(&self, s: &IndexSet, bits: u32) -> bool {
        match s {
            IndexSet::Union(a, b) => self.eval(a, bits) || self.eval(b, bits),
            IndexSet::Inter(a, b) => self.eval(a, bits) && self.eval(b, bits),
            IndexSet::Diff(a, b) => self.eval(a, bits) && !self.eval(b, bits),
            IndexSet::Compl(a) => !self.eval(a, bits),
            leaf => match self.atoms.iter().find(|(l, _)| l == leaf).map(|(_, a)| *a) {
                Some(Atom::Const(v)) => v,
                Some(Atom::Var(i)) => bits >> i & 1 == 1,
                None => unreachable!("every leaf was collected"),
            },
        }
    }

    fn assignments(&self) -> impl Iterator<Item = u32> {
        0..1u32 << self.reps.len()
    }
}

fn leaves_of(sets: &[&IndexSet]) -> Option<Leaves> {
    if sets.iter().map(|s| size(s)).sum::<usize>() > MAX_NODES {
        return None;
    }
    let mut leaves = Leaves::new();
    for s in sets {
        leaves.collect(s)?;
    }
    Some(leaves)
}

thread_local! {
    /// Set while an eventual value is computed; leaf comparisons inside it stay structural.
    static ACTIVE: Cell<bool> = const { Cell::new(false) };
}

fn guarded<T>(f: impl FnOnce() -> Option<T>) -> Option<T> {
    if ACTIVE.with(|a| a.replace(true)) {
        return None;
    }
    let out = f();
    ACTIVE.with(|a| a.set(false));
    out
}

impl IndexSet {
    /// `Some((v, b))` when membership equals `v` for every `t > b`.
    pub(crate) fn guarded_eventual_value(&self) -> Option<(bool, BigUint)> {
        guarded(|| self.eventual_value())
    }

    fn eventual_value(&self) -> Option<(bool, BigUint)> {
        if !self.is_boolean_node() {
            return None;
        }
        let leaves = leaves_of(&[self])?;
        let mut values = leaves.assignments().map(|bits| leaves.eval(self, bits));
        let first = values.next()?;
        values.all(|v| v == first).then_some((first, leaves.bound))
    }

    /// A bound past which `self` and `other` have the same elements, when the
    /// leaf-level argument proves one.
    pub fn eventually_equal(&self, other: &IndexSet) -> Option<BigUint> {
        guarded(|| {
            let leaves = leaves_of(&[self, other])?;
            leaves
                .assignments()
                .all(|bits| leaves.eval(self, bits) == leaves.eval(other, bits))
                .then_some(leaves.bound)
        })
    }

    /// A bound past which every element of `self` lies in `other`.
    pub fn eventually_subset(&self, other: &IndexSet) -> Option<BigUint> {
        guarded(|| {
            let leaves = leaves_of(&[self, other])?;
            leaves
                .assignments()
                .all(|bits| !leaves.eval(self, bits) || leaves.eval(other, bits))
                .then_some(leaves.bound)
        })
    }
}
