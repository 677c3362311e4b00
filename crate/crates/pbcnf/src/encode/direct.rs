//! Direct encoding: one clause per BDD path to the false terminal, so no
//! auxiliary variable is needed. Exponential in general; callers watch the
//! clause count.

use crate::model::Literal;
use crate::normalize::RawConstraint;

use super::{build_robdd, BddRef, CnfFormula, FormulaBuilder, VarAllocator};

/// Encodes the constraint as the negations of all falsifying BDD paths,
/// depth first with the high branch explored first. The clause literals
/// follow the path, which is the canonical term order.
pub fn encode_direct(r: &RawConstraint, alloc: &mut VarAllocator) -> CnfFormula {
    let bdd = build_robdd(r);
    let mut out = FormulaBuilder::new(alloc);
    let mut path: Vec<Literal> = Vec::new();
    walk(&bdd, r, bdd.root(), &mut path, &mut out);
    out.finish()
}

fn walk(
    bdd: &super::Bdd,
    r: &RawConstraint,
    cursor: BddRef,
    path: &mut Vec<Literal>,
    out: &mut FormulaBuilder<'_>,
) {
    match cursor {
        BddRef::True => {}
        BddRef::False => {
            // The path conjunction violates the constraint; forbid it.
            out.push(path.clone());
        }
        BddRef::Node(i) => {
            let node = &bdd.nodes()[i as usize];
            let branch = r.terms()[node.level].1;
            path.push(branch.negated());
            walk(bdd, r, node.high, path, out);
            path.pop();
            path.push(branch);
            walk(bdd, r, node.low, path, out);
            path.pop();
        }
    }
}
