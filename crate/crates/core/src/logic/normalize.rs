use thiserror::Error;

use super::derivation::{Derivation, Rule, Side};
use super::formula::{classify_formula, Formula, PolarityClass};

pub const DEFAULT_STEP_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("normalization exceeded {0} reduction steps")]
    StepLimit(usize),
}

/// Removes every logical detour, innermost first.
pub fn normalize(d: &Derivation) -> Result<Derivation, NormalizeError> {
    normalize_with_limit(d, DEFAULT_STEP_LIMIT)
}

pub fn normalize_with_limit(d: &Derivation, limit: usize) -> Result<Derivation, NormalizeError> {
    let mut steps = 0;
    norm(d, &mut steps, limit)
}

fn norm(d: &Derivation, steps: &mut usize, limit: usize) -> Result<Derivation, NormalizeError> {
    let premises = d.premises.iter().map(|p| norm(p, steps, limit)).collect::<Result<Vec<_>, _>>()?;
    let node = Derivation { rule: d.rule.clone(), conclusion: d.conclusion.clone(), premises };
    if !node.is_redex() {
        return Ok(node);
    }
    *steps += 1;
    if *steps > limit {
        return Err(NormalizeError::StepLimit(limit));
    }
    norm(&contract(node), steps, limit)
}

/// One detour contraction at the root. The caller guarantees a redex.
fn contract(d: Derivation) -> Derivation {
    let mut premises = d.premises.into_iter();
    let major = premises.next().expect("redex has a major premise");
    let mut inner = major.premises.into_iter();
    match (d.rule, major.rule) {
        (Rule::ImpElim, Rule::ImpIntro(u)) => {
            let body = inner.next().expect("imp-intro premise");
            let arg = premises.next().expect("imp-elim minor premise");
            body.graft(&u, &arg)
        }
        (Rule::AndElim(side), Rule::AndIntro) => {
            let left = inner.next().expect("and-intro left");
            let right = inner.next().expect("and-intro right");
            if side == Side::Left {
                left
            } else {
                right
            }
        }
        (Rule::OrElim(u, v), Rule::OrIntro(side)) => {
            let proof = inner.next().expect("or-intro premise");
            let left = premises.next().expect("or-elim left case");
            let right = premises.next().expect("or-elim right case");
            match side {
                Side::Left => left.graft(&u, &proof),
                Side::Right => right.graft(&v, &proof),
            }
        }
        (Rule::ExistsElim { label, eigen }, Rule::ExistsIntro(w)) => {
            let proof = inner.next().expect("exists-intro premise");
            let minor = premises.next().expect("exists-elim minor premise");
            minor.subst_term(&eigen, &w).graft(&label, &proof)
        }
        (Rule::ForallElim(t), Rule::ForallIntro(y)) => {
            let body = inner.next().expect("forall-intro premise");
            body.subst_term(&y, &t)
        }
        (rule, _) => unreachable!("`{}` is not a redex", rule.name()),
    }
}

/// First node, in pre-order, whose formula is not strongly positive.
pub fn assert_sp_proof(d: &Derivation) -> Result<(), (Vec<usize>, Formula)> {
    for (path, node) in d.nodes() {
        if classify_formula(&node.conclusion) != PolarityClass::StronglyPositive {
            return Err((path, node.conclusion.clone()));
        }
    }
    Ok(())
}
