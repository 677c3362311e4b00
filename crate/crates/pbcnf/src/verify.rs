//! Executable oracles for the propagation-strength contracts.
//!
//! The encoders promise specific behaviour of unit propagation on their
//! output: some force exactly the literals that restoring arc consistency
//! on the source constraint would fix (PAC), some at least derive a
//! conflict whenever arc consistency detects an inconsistency (PIC). This
//! module makes those definitions executable: a unit propagator, an arc
//! consistency oracle for pseudo-Boolean constraints, exhaustive model
//! enumerators, and a small complete SAT solver used for projection checks.
//! Correctness, not speed, is the contract here.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::encode::{CnfFormula, EncoderId, VarAllocator};
use crate::model::{Literal, Variable};
use crate::normalize::RawConstraint;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("enumeration over {count} variables exceeds the guard of {max}")]
    TooManyVariables { count: usize, max: usize },
}

/// A partial assignment over input variables; each variable is bound at
/// most once.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialAssignment {
    map: BTreeMap<Variable, bool>,
}

impl PartialAssignment {
    pub fn new() -> Self {
        PartialAssignment::default()
    }

    /// Binds a variable. Panics when the variable is already bound.
    pub fn assign(&mut self, var: Variable, value: bool) {
        let previous = self.map.insert(var, value);
        assert!(previous.is_none(), "variable {var} bound twice");
    }

    pub fn value(&self, var: Variable) -> Option<bool> {
        self.map.get(&var).copied()
    }

    pub fn is_bound(&self, var: Variable) -> bool {
        self.map.contains_key(&var)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// The assignment as literals, in ascending variable order.
    pub fn literals(&self) -> Vec<Literal> {
        self.map.iter().map(|(v, b)| v.lit(*b)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Variable, bool)> + '_ {
        self.map.iter().map(|(v, b)| (*v, *b))
    }

    /// True when the literal evaluates to true under this assignment.
    pub fn satisfies_literal(&self, lit: Literal) -> Option<bool> {
        self.value(lit.var()).map(|v| v == lit.is_positive())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpStatus {
    Fixpoint,
    Conflict,
}

/// Outcome of unit propagation: the derived literals (assumptions excluded,
/// auxiliaries included) and whether an empty clause was reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpResult {
    pub status: UpStatus,
    pub forced: BTreeSet<Literal>,
}

impl UpResult {
    /// The forced literals restricted to the given variables.
    pub fn forced_over(&self, vars: &BTreeSet<Variable>) -> BTreeSet<Literal> {
        self.forced
            .iter()
            .filter(|l| vars.contains(&l.var()))
            .copied()
            .collect()
    }
}

const UNASSIGNED: i8 = 0;

/// Reusable unit-propagation engine over one formula. Building the
/// occurrence lists once and replaying many assumption sets is what makes
/// the exhaustive PAC/PIC sweeps affordable.
pub struct Propagator {
    clauses: Vec<Vec<(u32, bool)>>,
    /// Clause indices per (variable id, sign).
    occurrences: Vec<[Vec<u32>; 2]>,
    vars_by_id: Vec<Option<Variable>>,
    assign: Vec<i8>,
    false_count: Vec<u32>,
    sat_count: Vec<u32>,
}

impl Propagator {
    pub fn new(formula: &CnfFormula) -> Self {
        let mut prop = Propagator {
            clauses: Vec::with_capacity(formula.clause_count()),
            occurrences: Vec::new(),
            vars_by_id: Vec::new(),
            assign: Vec::new(),
            false_count: vec![0; formula.clause_count()],
            sat_count: vec![0; formula.clause_count()],
        };
        for clause in formula.clauses() {
            let idx = prop.clauses.len() as u32;
            let mut lits = Vec::with_capacity(clause.len());
            for l in clause.lits() {
                prop.register(l.var());
                lits.push((l.var().id(), l.is_positive()));
                prop.occurrences[l.var().id() as usize][l.is_positive() as usize].push(idx);
            }
            prop.clauses.push(lits);
        }
        prop
    }

    fn register(&mut self, var: Variable) {
        let id = var.id() as usize;
        if id >= self.vars_by_id.len() {
            self.vars_by_id.resize(id + 1, None);
            self.occurrences.resize_with(id + 1, Default::default);
            self.assign.resize(id + 1, UNASSIGNED);
        }
        self.vars_by_id[id] = Some(var);
    }

    /// Runs unit propagation to fixpoint under the given assumptions.
    /// Contradictory assumptions yield a conflict with an empty forced set.
    pub fn propagate(&mut self, assumptions: &[Literal]) -> UpResult {
        for a in self.assign.iter_mut() {
            *a = UNASSIGNED;
        }
        for c in self.false_count.iter_mut() {
            *c = 0;
        }
        for c in self.sat_count.iter_mut() {
            *c = 0;
        }

        let mut forced: BTreeSet<Literal> = BTreeSet::new();
        for lit in assumptions {
            self.register(lit.var());
            let id = lit.var().id() as usize;
            let value = if lit.is_positive() { 1 } else { -1 };
            if self.assign[id] == -value {
                return UpResult {
                    status: UpStatus::Conflict,
                    forced: BTreeSet::new(),
                };
            }
            self.assign[id] = value;
        }

        // Queue of literals made true, assumptions first, then initial units.
        let mut queue: Vec<(u32, bool)> = assumptions
            .iter()
            .map(|l| (l.var().id(), l.is_positive()))
            .collect();
        let mut head = 0;
        for (idx, clause) in self.clauses.iter().enumerate() {
            if clause.is_empty() {
                return UpResult {
                    status: UpStatus::Conflict,
                    forced,
                };
            }
            if clause.len() == 1 {
                let (id, sign) = clause[0];
                match self.assign[id as usize] {
                    UNASSIGNED => {
                        self.assign[id as usize] = if sign { 1 } else { -1 };
                        let lit = self.vars_by_id[id as usize].unwrap().lit(sign);
                        forced.insert(lit);
                        queue.push((id, sign));
                    }
                    v => {
                        if (v == 1) != sign {
                            let _ = idx;
                            return UpResult {
                                status: UpStatus::Conflict,
                                forced,
                            };
                        }
                    }
                }
            }
        }

        while head < queue.len() {
            let (id, sign) = queue[head];
            head += 1;
            for &cl in &self.occurrences[id as usize][sign as usize] {
                self.sat_count[cl as usize] += 1;
            }
            // Each clause holding the falsified literal may become unit.
            let watch = std::mem::take(&mut self.occurrences[id as usize][!sign as usize]);
            let mut conflict = false;
            for &cl in &watch {
                let cl = cl as usize;
                self.false_count[cl] += 1;
                if self.sat_count[cl] > 0 {
                    continue;
                }
                let len = self.clauses[cl].len() as u32;
                if self.false_count[cl] == len {
                    conflict = true;
                    break;
                }
                if self.false_count[cl] == len - 1 {
                    // The remaining literal may already be queued true with
                    // its sat_count bump pending; then there is nothing to
                    // force.
                    let unit = self.clauses[cl]
                        .iter()
                        .copied()
                        .find(|&(vid, _)| self.assign[vid as usize] == UNASSIGNED);
                    if let Some((vid, vsign)) = unit {
                        self.assign[vid as usize] = if vsign { 1 } else { -1 };
                        forced.insert(self.vars_by_id[vid as usize].unwrap().lit(vsign));
                        queue.push((vid, vsign));
                    }
                }
            }
            self.occurrences[id as usize][!sign as usize] = watch;
            if conflict {
                return UpResult {
                    status: UpStatus::Conflict,
                    forced,
                };
            }
        }

        UpResult {
            status: UpStatus::Fixpoint,
            forced,
        }
    }
}

/// One-shot unit propagation.
pub fn unit_propagate(formula: &CnfFormula, assumptions: &[Literal]) -> UpResult {
    Propagator::new(formula).propagate(assumptions)
}

/// Outcome of restoring arc consistency on a constraint under a partial
/// assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AcOutcome {
    /// No complete extension satisfies the constraint.
    Inconsistent,
    /// The literals every satisfying extension agrees on, over unassigned
    /// variables only.
    Forced(BTreeSet<Literal>),
}

/// Arc consistency oracle via the minimum-sum argument: extending by
/// all-false minimizes the left-hand side, so the assignment is consistent
/// iff the coefficients of its true literals stay within the bound, and an
/// unassigned literal is forced false iff adding its coefficient would not.
pub fn ac_forced_literals(r: &RawConstraint, sigma: &PartialAssignment) -> AcOutcome {
    let mut min_sum = BigInt::zero();
    for (c, l) in r.terms() {
        if sigma.satisfies_literal(*l) == Some(true) {
            min_sum += c;
        }
    }
    if min_sum > *r.bound() {
        return AcOutcome::Inconsistent;
    }
    let mut forced = BTreeSet::new();
    for (c, l) in r.terms() {
        if !sigma.is_bound(l.var()) && &min_sum + c > *r.bound() {
            forced.insert(l.negated());
        }
    }
    AcOutcome::Forced(forced)
}

/// Independent arc consistency implementation by literal enumeration of all
/// extensions; cross-checks [`ac_forced_literals`] at small sizes.
pub fn ac_forced_by_enumeration(r: &RawConstraint, sigma: &PartialAssignment) -> AcOutcome {
    let unassigned: Vec<Variable> = r
        .variables()
        .into_iter()
        .filter(|v| !sigma.is_bound(*v))
        .collect();
    assert!(unassigned.len() <= 20, "enumeration oracle limited to 20 free variables");
    let mut candidate: Option<Vec<Option<bool>>> = None;
    let mut any = false;
    for mask in 0u64..(1 << unassigned.len()) {
        let value_of = |v: Variable| -> bool {
            match sigma.value(v) {
                Some(b) => b,
                None => {
                    let idx = unassigned.iter().position(|u| *u == v).unwrap();
                    (mask >> idx) & 1 == 1
                }
            }
        };
        let mut sum = BigInt::zero();
        for (c, l) in r.terms() {
            if value_of(l.var()) == l.is_positive() {
                sum += c;
            }
        }
        if sum <= *r.bound() {
            any = true;
            let values: Vec<Option<bool>> = unassigned
                .iter()
                .map(|v| Some((mask >> unassigned.iter().position(|u| u == v).unwrap()) & 1 == 1))
                .collect();
            match &mut candidate {
                None => candidate = Some(values),
                Some(agreed) => {
                    for (slot, v) in agreed.iter_mut().zip(values) {
                        if *slot != v {
                            *slot = None;
                        }
                    }
                }
            }
        }
    }
    if !any {
        return AcOutcome::Inconsistent;
    }
    let mut forced = BTreeSet::new();
    if let Some(agreed) = candidate {
        for (v, value) in unassigned.iter().zip(agreed) {
            if let Some(value) = value {
                forced.insert(v.lit(value));
            }
        }
    }
    AcOutcome::Forced(forced)
}

/// Exhaustively enumerates the assignments satisfying every constraint.
/// Bit `i` of a returned mask is the value of `vars[i]`.
pub fn enumerate_pb_models(
    constraints: &[RawConstraint],
    vars: &[Variable],
) -> Result<BTreeSet<u64>, VerifyError> {
    const MAX_VARS: usize = 20;
    if vars.len() > MAX_VARS {
        return Err(VerifyError::TooManyVariables {
            count: vars.len(),
            max: MAX_VARS,
        });
    }
    let mut models = BTreeSet::new();
    'mask: for mask in 0u64..(1 << vars.len()) {
        for r in constraints {
            let mut sum = BigInt::zero();
            for (c, l) in r.terms() {
                let idx = vars
                    .iter()
                    .position(|v| *v == l.var())
                    .expect("constraint variable missing from enumeration set");
                if ((mask >> idx) & 1 == 1) == l.is_positive() {
                    sum += c;
                }
            }
            if sum > *r.bound() {
                continue 'mask;
            }
        }
        models.insert(mask);
    }
    Ok(models)
}

/// Backtracking SAT solver with unit propagation. Complete at test scale;
/// the projection enumerator below drives it with blocking clauses.
/// Decisions go to the priority variables first, which keeps the search
/// tree within the projection space during enumeration.
struct DpllSolver {
    clauses: Vec<Vec<(u32, bool)>>,
    occurrences: Vec<[Vec<u32>; 2]>,
    assign: Vec<i8>,
    trail: Vec<(u32, bool)>,
    prop_head: usize,
    false_count: Vec<u32>,
    sat_count: Vec<u32>,
    satisfied: usize,
    priority: Vec<u32>,
}

impl DpllSolver {
    fn new(formula: &CnfFormula, priority_vars: &[Variable]) -> Self {
        let max_id = formula
            .max_var_id()
            .max(priority_vars.iter().map(|v| v.id()).max().unwrap_or(0))
            as usize;
        let mut solver = DpllSolver {
            clauses: Vec::with_capacity(formula.clause_count()),
            occurrences: vec![Default::default(); max_id + 1],
            assign: vec![UNASSIGNED; max_id + 1],
            trail: Vec::new(),
            prop_head: 0,
            false_count: Vec::new(),
            sat_count: Vec::new(),
            satisfied: 0,
            priority: priority_vars.iter().map(|v| v.id()).collect(),
        };
        for clause in formula.clauses() {
            let lits: Vec<(u32, bool)> = clause
                .lits()
                .iter()
                .map(|l| (l.var().id(), l.is_positive()))
                .collect();
            solver.add_clause(lits);
        }
        solver
    }

    fn add_clause(&mut self, lits: Vec<(u32, bool)>) {
        let idx = self.clauses.len() as u32;
        let mut sat = 0u32;
        let mut falsified = 0u32;
        for &(id, sign) in &lits {
            self.occurrences[id as usize][sign as usize].push(idx);
            match self.assign[id as usize] {
                UNASSIGNED => {}
                v => {
                    if (v == 1) == sign {
                        sat += 1;
                    } else {
                        falsified += 1;
                    }
                }
            }
        }
        if sat > 0 {
            self.satisfied += 1;
        }
        self.sat_count.push(sat);
        self.false_count.push(falsified);
        self.clauses.push(lits);
    }

    fn assign_lit(&mut self, id: u32, sign: bool) {
        debug_assert_eq!(self.assign[id as usize], UNASSIGNED);
        self.assign[id as usize] = if sign { 1 } else { -1 };
        self.trail.push((id, sign));
        for i in 0..self.occurrences[id as usize][sign as usize].len() {
            let cl = self.occurrences[id as usize][sign as usize][i] as usize;
            if self.sat_count[cl] == 0 {
                self.satisfied += 1;
            }
            self.sat_count[cl] += 1;
        }
        for i in 0..self.occurrences[id as usize][!sign as usize].len() {
            let cl = self.occurrences[id as usize][!sign as usize][i] as usize;
            self.false_count[cl] += 1;
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (id, sign) = self.trail.pop().unwrap();
            self.assign[id as usize] = UNASSIGNED;
            for i in 0..self.occurrences[id as usize][sign as usize].len() {
                let cl = self.occurrences[id as usize][sign as usize][i] as usize;
                self.sat_count[cl] -= 1;
                if self.sat_count[cl] == 0 {
                    self.satisfied -= 1;
                }
            }
            for i in 0..self.occurrences[id as usize][!sign as usize].len() {
                let cl = self.occurrences[id as usize][!sign as usize][i] as usize;
                self.false_count[cl] -= 1;
            }
        }
        self.prop_head = self.prop_head.min(mark);
    }

    /// Propagates every pending trail entry; false on conflict.
    fn propagate(&mut self) -> bool {
        while self.prop_head < self.trail.len() {
            let (id, sign) = self.trail[self.prop_head];
            self.prop_head += 1;
            let watch = std::mem::take(&mut self.occurrences[id as usize][!sign as usize]);
            let mut conflict = false;
            for &cl in &watch {
                let cl = cl as usize;
                if self.sat_count[cl] > 0 {
                    continue;
                }
                let len = self.clauses[cl].len() as u32;
                if self.false_count[cl] == len {
                    conflict = true;
                    break;
                }
                if self.false_count[cl] == len - 1 {
                    let unit = self.clauses[cl]
                        .iter()
                        .copied()
                        .find(|&(vid, _)| self.assign[vid as usize] == UNASSIGNED);
                    if let Some((vid, vsign)) = unit {
                        // vid differs from id (it is unassigned), so its
                        // occurrence lists are untouched by the take above.
                        self.assign_lit(vid, vsign);
                    }
                }
            }
            self.occurrences[id as usize][!sign as usize] = watch;
            if conflict {
                return false;
            }
        }
        true
    }

    fn pick_branch(&self) -> Option<(u32, bool)> {
        for &id in &self.priority {
            if self.assign[id as usize] == UNASSIGNED {
                return Some((id, true));
            }
        }
        for (idx, clause) in self.clauses.iter().enumerate() {
            if self.sat_count[idx] > 0 {
                continue;
            }
            for &(id, sign) in clause {
                if self.assign[id as usize] == UNASSIGNED {
                    return Some((id, sign));
                }
            }
        }
        None
    }

    fn search(&mut self) -> bool {
        if !self.propagate() {
            return false;
        }
        if self.satisfied == self.clauses.len() {
            return true;
        }
        let (id, sign) = match self.pick_branch() {
            Some(lit) => lit,
            // Unsatisfied clauses but nothing left to branch on.
            None => return false,
        };
        let mark = self.trail.len();
        self.assign_lit(id, sign);
        if self.search() {
            return true;
        }
        self.undo_to(mark);
        self.assign_lit(id, !sign);
        if self.search() {
            return true;
        }
        self.undo_to(mark);
        false
    }

    fn solve(&mut self) -> bool {
        // Seed units; empty clauses conflict immediately.
        for idx in 0..self.clauses.len() {
            match self.clauses[idx].len() {
                0 => return false,
                1 if self.sat_count[idx] == 0 => {
                    let (id, sign) = self.clauses[idx][0];
                    if self.assign[id as usize] == UNASSIGNED {
                        self.assign_lit(id, sign);
                    } else if (self.assign[id as usize] == 1) != sign {
                        return false;
                    }
                }
                _ => {}
            }
        }
        self.search()
    }

    fn value(&self, id: u32) -> Option<bool> {
        match self.assign[id as usize] {
            UNASSIGNED => None,
            v => Some(v == 1),
        }
    }
}

/// Sound and complete satisfiability check; `None` means unsatisfiable.
/// Variables left free by the search come back as `false`.
pub fn solve_cnf(formula: &CnfFormula) -> Option<BTreeMap<Variable, bool>> {
    let mut registry: BTreeMap<u32, Variable> = BTreeMap::new();
    for clause in formula.clauses() {
        for l in clause.lits() {
            registry.insert(l.var().id(), l.var());
        }
    }
    let mut solver = DpllSolver::new(formula, &[]);
    if !solver.solve() {
        return None;
    }
    Some(
        registry
            .into_iter()
            .map(|(id, var)| (var, solver.value(id).unwrap_or(false)))
            .collect(),
    )
}

/// Enumerates the projections of the formula's models onto `onto`, as masks
/// with bit `i` carrying the value of `onto[i]`. Works by repeatedly solving
/// and blocking the projection found; variables of `onto` the search left
/// unbound expand to both values.
pub fn enumerate_cnf_projections(formula: &CnfFormula, onto: &[Variable]) -> BTreeSet<u64> {
    assert!(onto.len() <= 20, "projection enumeration limited to 20 variables");
    let mut solver = DpllSolver::new(formula, onto);
    let mut projections = BTreeSet::new();
    loop {
        solver.undo_to(0);
        if !solver.solve() {
            return projections;
        }
        let mut fixed_bits = 0u64;
        let mut fixed_mask = 0u64;
        let mut blocking: Vec<(u32, bool)> = Vec::new();
        for (i, v) in onto.iter().enumerate() {
            if let Some(value) = solver.value(v.id()) {
                fixed_bits |= 1 << i;
                if value {
                    fixed_mask |= 1 << i;
                }
                blocking.push((v.id(), !value));
            }
        }
        // Expand the variables the solver never had to decide.
        let free: Vec<usize> = (0..onto.len()).filter(|i| fixed_bits & (1 << i) == 0).collect();
        for combo in 0u64..(1 << free.len()) {
            let mut mask = fixed_mask;
            for (j, &bit) in free.iter().enumerate() {
                if (combo >> j) & 1 == 1 {
                    mask |= 1 << bit;
                }
            }
            projections.insert(mask);
        }
        if blocking.is_empty() {
            // The formula does not constrain the projection at all.
            return projections;
        }
        solver.undo_to(0);
        solver.add_clause(blocking);
    }
}

/// A witness that unit propagation on an encoding does not mimic arc
/// consistency under some partial assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacCounterexample {
    pub assignment: PartialAssignment,
    pub up_forced: BTreeSet<Literal>,
    pub ac_forced: BTreeSet<Literal>,
    /// Unit propagation conflicted although the assignment is consistent.
    pub up_conflict: bool,
}

/// A witness that unit propagation misses an inconsistency arc consistency
/// detects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PicCounterexample {
    pub assignment: PartialAssignment,
}

fn partial_assignments(vars: &[Variable]) -> impl Iterator<Item = PartialAssignment> + '_ {
    // Ternary counting in ascending variable-id order: digit 0 leaves the
    // variable unassigned, 1 binds false, 2 binds true.
    let total = 3u64.pow(vars.len() as u32);
    (0..total).map(move |code| {
        let mut sigma = PartialAssignment::new();
        let mut rest = code;
        for v in vars {
            match rest % 3 {
                0 => {}
                1 => sigma.assign(*v, false),
                _ => sigma.assign(*v, true),
            }
            rest /= 3;
        }
        sigma
    })
}

fn sorted_vars(r: &RawConstraint) -> Vec<Variable> {
    let mut vars = r.variables();
    vars.sort();
    vars
}

/// Checks that unit propagation on the encoding forces exactly the input
/// literals arc consistency forces, for every consistent partial
/// assignment. Returns the first mismatch in ternary counting order.
pub fn check_pac(encoder: EncoderId, r: &RawConstraint) -> Result<(), PacCounterexample> {
    assert!(encoder.is_cnf(), "PAC is defined for CNF encoders");
    let vars = sorted_vars(r);
    assert!(vars.len() <= 6, "PAC sweep enumerates 3^n assignments; keep n <= 6");
    let var_set: BTreeSet<Variable> = vars.iter().copied().collect();
    let mut alloc = VarAllocator::after_constraint(r);
    let formula = encoder.encode_cnf(r, &mut alloc);
    let mut propagator = Propagator::new(&formula);
    for sigma in partial_assignments(&vars) {
        let ac = match ac_forced_literals(r, &sigma) {
            AcOutcome::Inconsistent => continue,
            AcOutcome::Forced(forced) => forced,
        };
        let up = propagator.propagate(&sigma.literals());
        let up_input = up.forced_over(&var_set);
        if up.status == UpStatus::Conflict || up_input != ac {
            return Err(PacCounterexample {
                assignment: sigma,
                up_forced: up_input,
                ac_forced: ac,
                up_conflict: up.status == UpStatus::Conflict,
            });
        }
    }
    Ok(())
}

/// Checks that unit propagation on the encoding derives a conflict for
/// every partial assignment arc consistency reports inconsistent.
pub fn check_pic(encoder: EncoderId, r: &RawConstraint) -> Result<(), PicCounterexample> {
    assert!(encoder.is_cnf(), "PIC is defined for CNF encoders");
    let vars = sorted_vars(r);
    assert!(vars.len() <= 6, "PIC sweep enumerates 3^n assignments; keep n <= 6");
    let mut alloc = VarAllocator::after_constraint(r);
    let formula = encoder.encode_cnf(r, &mut alloc);
    let mut propagator = Propagator::new(&formula);
    for sigma in partial_assignments(&vars) {
        if ac_forced_literals(r, &sigma) != AcOutcome::Inconsistent {
            continue;
        }
        let up = propagator.propagate(&sigma.literals());
        if up.status != UpStatus::Conflict {
            return Err(PicCounterexample { assignment: sigma });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::Clause;
    use crate::model::{InputModel, Variable};
    use proptest::prelude::*;

    fn vars(n: usize) -> (InputModel, Vec<Variable>) {
        let mut m = InputModel::new();
        let vs = (0..n).map(|_| m.new_variable()).collect();
        (m, vs)
    }

    fn formula(clauses: Vec<Vec<Literal>>) -> CnfFormula {
        let mut f = CnfFormula::new();
        for lits in clauses {
            f.push_clause(Clause::new(lits).unwrap());
        }
        f
    }

    fn raw(coeffs: &[i64], signs: &[bool], bound: i64) -> (RawConstraint, Vec<Variable>) {
        let (_m, vs) = vars(coeffs.len());
        let terms = coeffs
            .iter()
            .zip(signs)
            .zip(&vs)
            .map(|((c, s), v)| (BigInt::from(*c), v.lit(*s)))
            .collect();
        (RawConstraint::new(terms, BigInt::from(bound)), vs)
    }

    #[test]
    fn up_single_unit() {
        let (_m, v) = vars(1);
        let f = formula(vec![vec![v[0].pos_lit()]]);
        let up = unit_propagate(&f, &[]);
        assert_eq!(up.status, UpStatus::Fixpoint);
        assert_eq!(up.forced.into_iter().collect::<Vec<_>>(), vec![v[0].pos_lit()]);
    }

    #[test]
    fn up_chains_through_implications() {
        let (_m, v) = vars(2);
        let f = formula(vec![
            vec![v[0].neg_lit(), v[1].pos_lit()],
            vec![v[0].pos_lit()],
        ]);
        let up = unit_propagate(&f, &[]);
        assert_eq!(up.status, UpStatus::Fixpoint);
        assert!(up.forced.contains(&v[0].pos_lit()));
        assert!(up.forced.contains(&v[1].pos_lit()));
    }

    #[test]
    fn up_under_assumptions() {
        let (_m, v) = vars(3);
        let f = formula(vec![vec![v[0].neg_lit(), v[1].pos_lit(), v[2].neg_lit()]]);
        let up = unit_propagate(&f, &[v[0].pos_lit(), v[2].pos_lit()]);
        assert_eq!(up.status, UpStatus::Fixpoint);
        assert_eq!(up.forced.into_iter().collect::<Vec<_>>(), vec![v[1].pos_lit()]);
    }

    #[test]
    fn up_contradictory_assumptions() {
        let (_m, v) = vars(1);
        let f = formula(vec![vec![v[0].pos_lit()]]);
        let up = unit_propagate(&f, &[v[0].pos_lit(), v[0].neg_lit()]);
        assert_eq!(up.status, UpStatus::Conflict);
        assert!(up.forced.is_empty());
    }

    #[test]
    fn up_conflict_on_falsified_clause() {
        let (_m, v) = vars(2);
        let f = formula(vec![vec![v[0].pos_lit(), v[1].pos_lit()]]);
        let up = unit_propagate(&f, &[v[0].neg_lit(), v[1].neg_lit()]);
        assert_eq!(up.status, UpStatus::Conflict);
    }

    #[test]
    fn ac_forces_saturating_literal() {
        let (r, v) = raw(&[5, 3, 1], &[true, false, true], 8);
        let mut sigma = PartialAssignment::new();
        sigma.assign(v[0], true);
        sigma.assign(v[2], true);
        let forced = match ac_forced_literals(&r, &sigma) {
            AcOutcome::Forced(f) => f,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(forced.into_iter().collect::<Vec<_>>(), vec![v[1].pos_lit()]);
    }

    #[test]
    fn ac_empty_assignment_forces_nothing() {
        let (r, _v) = raw(&[5, 3, 1], &[true, false, true], 8);
        let sigma = PartialAssignment::new();
        assert_eq!(ac_forced_literals(&r, &sigma), AcOutcome::Forced(BTreeSet::new()));
    }

    #[test]
    fn ac_detects_inconsistency() {
        let (r, v) = raw(&[2, 2], &[true, true], 3);
        let mut sigma = PartialAssignment::new();
        sigma.assign(v[0], true);
        sigma.assign(v[1], true);
        assert_eq!(ac_forced_literals(&r, &sigma), AcOutcome::Inconsistent);
    }

    /// The two arc-consistency implementations agree on every partial
    /// assignment of a batch of small constraints.
    #[test]
    fn ac_implementations_agree() {
        let cases: Vec<(Vec<i64>, Vec<bool>, i64)> = vec![
            (vec![5, 3, 1], vec![true, false, true], 8),
            (vec![3, 3], vec![true, true], 5),
            (vec![4, 2, 1, 1], vec![false, true, true, false], 5),
            (vec![2, 2, 2], vec![true, true, true], 3),
            (vec![7, 5, 3, 1], vec![true, false, false, true], 9),
        ];
        for (coeffs, signs, bound) in cases {
            let (r, vs) = raw(&coeffs, &signs, bound);
            for code in 0..3u32.pow(vs.len() as u32) {
                let mut sigma = PartialAssignment::new();
                let mut rest = code;
                for v in &vs {
                    match rest % 3 {
                        0 => {}
                        1 => sigma.assign(*v, false),
                        _ => sigma.assign(*v, true),
                    }
                    rest /= 3;
                }
                assert_eq!(
                    ac_forced_literals(&r, &sigma),
                    ac_forced_by_enumeration(&r, &sigma),
                    "{r} sigma {sigma:?}"
                );
            }
        }
    }

    #[test]
    fn enumerate_introductory_constraint() {
        let (r, v) = raw(&[5, 3, 1], &[true, false, true], 8);
        let models = enumerate_pb_models(std::slice::from_ref(&r), &v).unwrap();
        assert_eq!(models.len(), 7);
        // Only x1=1, x2=0, x3=1 violates: mask 0b101.
        assert!(!models.contains(&0b101));
    }

    #[test]
    fn enumerate_no_constraints() {
        let (_m, v) = vars(2);
        let models = enumerate_pb_models(&[], &v).unwrap();
        assert_eq!(models.len(), 4);
    }

    #[test]
    fn enumerate_unit_halves_space() {
        let (_m, v) = vars(4);
        let terms = vec![(BigInt::from(1), v[0].pos_lit())];
        let r = RawConstraint::new(terms, BigInt::from(0));
        let models = enumerate_pb_models(std::slice::from_ref(&r), &v).unwrap();
        assert_eq!(models.len(), 8);
        assert!(models.iter().all(|m| m & 1 == 0));
    }

    #[test]
    fn enumerate_guard() {
        let (_m, v) = vars(21);
        assert_eq!(
            enumerate_pb_models(&[], &v),
            Err(VerifyError::TooManyVariables { count: 21, max: 20 })
        );
    }

    #[test]
    fn solve_empty_formula() {
        let f = CnfFormula::new();
        assert_eq!(solve_cnf(&f), Some(BTreeMap::new()));
    }

    #[test]
    fn solve_contradiction() {
        let (_m, v) = vars(1);
        let f = formula(vec![vec![v[0].pos_lit()], vec![v[0].neg_lit()]]);
        assert_eq!(solve_cnf(&f), None);
    }

    #[test]
    fn solve_returns_a_model() {
        let (_m, v) = vars(3);
        let f = formula(vec![
            vec![v[0].pos_lit(), v[1].pos_lit()],
            vec![v[0].neg_lit(), v[2].pos_lit()],
            vec![v[1].neg_lit(), v[2].neg_lit()],
        ]);
        let model = solve_cnf(&f).unwrap();
        let val = |l: Literal| model[&l.var()] == l.is_positive();
        assert!(val(v[0].pos_lit()) || val(v[1].pos_lit()));
        assert!(val(v[0].neg_lit()) || val(v[2].pos_lit()));
        assert!(val(v[1].neg_lit()) || val(v[2].neg_lit()));
    }

    /// The solver agrees with truth-table evaluation on random formulas.
    #[test]
    fn solver_agrees_with_truth_tables() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6usize);
            let n_clauses = rng.gen_range(1..=10usize);
            let (_m, vs) = vars(n);
            let mut clauses = Vec::new();
            for _ in 0..n_clauses {
                let width = rng.gen_range(1..=3usize);
                let lits: Vec<Literal> = (0..width)
                    .map(|_| vs[rng.gen_range(0..n)].lit(rng.gen_bool(0.5)))
                    .collect();
                if let Some(c) = Clause::new(lits) {
                    clauses.push(c);
                }
            }
            let mut f = CnfFormula::new();
            for c in &clauses {
                f.push_clause(c.clone());
            }
            let brute_sat = (0u32..(1 << n)).any(|mask| {
                clauses.iter().all(|c| {
                    c.lits().iter().any(|l| {
                        let idx = vs.iter().position(|v| *v == l.var()).unwrap();
                        ((mask >> idx) & 1 == 1) == l.is_positive()
                    })
                })
            });
            assert_eq!(solve_cnf(&f).is_some(), brute_sat);
        }
    }

    #[test]
    fn projection_ignores_free_auxiliaries() {
        // A satisfiable formula over an auxiliary leaves the projection
        // variables completely free.
        let (_m, v) = vars(3);
        let f = formula(vec![vec![v[2].pos_lit()]]);
        let projected = enumerate_cnf_projections(&f, &v[..2]);
        assert_eq!(projected.len(), 4);
    }

    #[test]
    fn pac_holds_for_direct_and_bdd() {
        let (r, _) = raw(&[5, 3, 1], &[true, false, true], 8);
        assert_eq!(check_pac(EncoderId::Direct, &r), Ok(()));
        assert_eq!(check_pac(EncoderId::Bdd, &r), Ok(()));
        assert_eq!(check_pac(EncoderId::Watchdog, &r), Ok(()));
    }

    #[test]
    fn pic_holds_for_bargraph() {
        let (r, _) = raw(&[5, 3, 1], &[true, false, true], 8);
        assert_eq!(check_pic(EncoderId::Bargraph, &r), Ok(()));
        let (r2, _) = raw(&[3, 3, 2, 2], &[true, true, false, true], 6);
        assert_eq!(check_pic(EncoderId::Bargraph, &r2), Ok(()));
    }

    #[test]
    fn adder_fails_pac_on_witness() {
        let (r, v) = raw(&[3, 3], &[true, true], 5);
        let cx = check_pac(EncoderId::Adder, &r).unwrap_err();
        assert!(!cx.up_conflict);
        assert_eq!(cx.assignment.value(v[0]), Some(true));
        assert!(cx.ac_forced.contains(&v[1].neg_lit()));
        assert!(!cx.up_forced.contains(&v[1].neg_lit()));
    }

    /// Any encoder passing the arc-consistency sweep on an instance also
    /// passes the inconsistency sweep on it.
    #[test]
    fn pac_implies_pic() {
        let cases: Vec<(Vec<i64>, Vec<bool>, i64)> = vec![
            (vec![5, 3, 1], vec![true, false, true], 8),
            (vec![2, 2, 1], vec![true, true, false], 3),
            (vec![4, 3, 2, 1], vec![false, true, true, true], 6),
        ];
        for (coeffs, signs, bound) in cases {
            for encoder in EncoderId::ALL_CNF {
                let (r, _) = raw(&coeffs, &signs, bound);
                if check_pac(encoder, &r).is_ok() {
                    assert_eq!(check_pic(encoder, &r), Ok(()), "{encoder} on {r}");
                }
            }
        }
    }

    proptest! {
        /// Enlarging the assumption set never shrinks the forced set
        /// (short of a conflict).
        #[test]
        fn up_monotone_in_assumptions(
            clause_picks in proptest::collection::vec(
                proptest::collection::vec((0usize..5, any::<bool>()), 1..4),
                1..8,
            ),
            base in proptest::collection::vec((0usize..5, any::<bool>()), 0..3),
            extra in (0usize..5, any::<bool>()),
        ) {
            let (_m, vs) = vars(5);
            let mut f = CnfFormula::new();
            for lits in &clause_picks {
                let lits: Vec<Literal> = lits.iter().map(|(i, s)| vs[*i].lit(*s)).collect();
                if let Some(c) = Clause::new(lits) {
                    f.push_clause(c);
                }
            }
            let mut seen = std::collections::BTreeSet::new();
            let base_lits: Vec<Literal> = base
                .iter()
                .filter(|(i, _)| seen.insert(*i))
                .map(|(i, s)| vs[*i].lit(*s))
                .collect();
            if seen.contains(&extra.0) {
                return Ok(());
            }
            let mut larger = base_lits.clone();
            larger.push(vs[extra.0].lit(extra.1));

            let small = unit_propagate(&f, &base_lits);
            let large = unit_propagate(&f, &larger);
            if small.status == UpStatus::Fixpoint && large.status == UpStatus::Fixpoint {
                // The extra assumption may subsume a previously forced
                // literal, so compare modulo the assumption itself.
                for lit in &small.forced {
                    prop_assert!(
                        large.forced.contains(lit) || larger.contains(lit),
                        "lost {lit} when assuming more"
                    );
                }
            }
        }
    }
}
