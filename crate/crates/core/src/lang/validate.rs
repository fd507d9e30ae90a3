//! Static checks: line numbering and definite assignment.

use std::collections::BTreeSet;

use super::ast::*;
use crate::error::{Error, Result};

/// Checks that statement lines are unique and strictly increasing in textual
/// order, and that no variable can be read before it is assigned. Variables
/// never assigned anywhere are inputs and may be read freely.
pub fn validate(p: &Program) -> Result<()> {
    let mut seen = BTreeSet::new();
    let mut prev = 0;
    for line in p.lines() {
        if !seen.insert(line) {
            return Err(Error::DuplicateLine { line });
        }
        if line <= prev {
            return Err(Error::UnorderedLine { line });
        }
        prev = line;
    }

    let assigned_somewhere = p.assigned_vars();
    check_assigned(&p.statements, &assigned_somewhere, &mut BTreeSet::new())
}

fn check_reads(
    reads: Vec<String>,
    line: Line,
    assigned_somewhere: &BTreeSet<String>,
    definite: &BTreeSet<String>,
) -> Result<()> {
    for name in reads {
        if assigned_somewhere.contains(&name) && !definite.contains(&name) {
            return Err(Error::UseBeforeAssign { name, line });
        }
    }
    Ok(())
}

/// Walks the statements accumulating the set of definitely assigned
/// variables. After a conditional only the intersection of the two arms'
/// outcomes survives.
fn check_assigned(
    statements: &[Statement],
    assigned_somewhere: &BTreeSet<String>,
    definite: &mut BTreeSet<String>,
) -> Result<()> {
    for s in statements {
        match s {
            Statement::Assign(a) => {
                check_reads(a.expr.vars(), a.line, assigned_somewhere, definite)?;
                definite.insert(a.target.clone());
            }
            Statement::If(i) => {
                check_reads(i.cond.vars(), i.line, assigned_somewhere, definite)?;
                let mut then_defs = definite.clone();
                check_assigned(&i.then_body, assigned_somewhere, &mut then_defs)?;
                let mut else_defs = definite.clone();
                check_assigned(&i.else_body, assigned_somewhere, &mut else_defs)?;
                *definite = then_defs.intersection(&else_defs).cloned().collect();
            }
        }
    }
    Ok(())
}
