use super::{Coalition, Dialect, Formula, FormulaError, PathFormula};

/// A flat NatATL formula with its modality replaced by the universal path
/// quantifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalCtl {
    pub coalition: Coalition,
    pub bound: u32,
    pub ctl: Formula,
}

pub(crate) fn check_nesting(f: &Formula) -> Result<(), FormulaError> {
    if f.is_strategic() && f.children().iter().any(|c| c.strategic_count() > 0) {
        return Err(FormulaError::Nested);
    }
    f.children().into_iter().try_for_each(check_nesting)
}

fn check_single(f: &Formula) -> Result<(), FormulaError> {
    check_nesting(f)?;
    match f.strategic_count() {
        1 => Ok(()),
        0 => Err(FormulaError::Unsupported("no strategic modality".into())),
        _ => Err(FormulaError::Unsupported(
            "more than one strategic modality".into(),
        )),
    }
}

/// Exactly one strategic modality and nothing strategic below it.
pub fn is_flat(f: &Formula) -> bool {
    check_single(f).is_ok()
}

fn map_path(path: &PathFormula, g: &mut impl FnMut(&Formula) -> Formula) -> PathFormula {
    match path {
        PathFormula::Next(a) => PathFormula::Next(g(a)),
        PathFormula::Globally(a) => PathFormula::Globally(g(a)),
        PathFormula::Until(a, b) => PathFormula::Until(g(a), g(b)),
    }
}

pub fn to_universal_ctl(f: &Formula) -> Result<UniversalCtl, FormulaError> {
    f.check_dialect(Dialect::NatAtl)?;
    check_single(f)?;
    let mut found = None;
    let ctl = strip(f, true, &mut found)?;
    let (coalition, bound) = found.expect("exactly one modality");
    Ok(UniversalCtl {
        coalition,
        bound,
        ctl,
    })
}

fn strip(
    f: &Formula,
    positive: bool,
    found: &mut Option<(Coalition, u32)>,
) -> Result<Formula, FormulaError> {
    Ok(match f {
        Formula::Nat {
            coalition,
            bound,
            path,
        } => {
            if !positive {
                return Err(FormulaError::Unsupported(
                    "strategic modality under negation".into(),
                ));
            }
            *found = Some((coalition.clone(), *bound));
            Formula::All(path.clone())
        }
        Formula::Not(g) => Formula::not(strip(g, !positive, found)?),
        Formula::And(a, b) => Formula::and(strip(a, positive, found)?, strip(b, positive, found)?),
        Formula::Or(a, b) => Formula::or(strip(a, positive, found)?, strip(b, positive, found)?),
        other => other.clone(),
    })
}

pub fn atl_to_natatl(f: &Formula, bound: u32) -> Result<Formula, FormulaError> {
    if bound == 0 {
        return Err(FormulaError::ZeroBound);
    }
    f.check_dialect(Dialect::Atl)?;
    check_single(f)?;
    Ok(annotate(f, bound))
}

fn annotate(f: &Formula, bound: u32) -> Formula {
    match f {
        Formula::Atl { coalition, path } => Formula::Nat {
            coalition: coalition.clone(),
            bound,
            path: Box::new(map_path(path, &mut |g| annotate(g, bound))),
        },
        Formula::Not(g) => Formula::not(annotate(g, bound)),
        Formula::And(a, b) => Formula::and(annotate(a, bound), annotate(b, bound)),
        Formula::Or(a, b) => Formula::or(annotate(a, bound), annotate(b, bound)),
        other => other.clone(),
    }
}
