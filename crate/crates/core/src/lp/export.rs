use std::fmt::Write;

use super::{LpModel, Relation, Sense};

fn term_list(out: &mut String, terms: impl Iterator<Item = (String, f64)>) {
    let mut first = true;
    for (name, coef) in terms {
        if coef == 0.0 {
            continue;
        }
        let sign = if coef < 0.0 { "-" } else { "+" };
        if first && coef >= 0.0 {
            let _ = write!(out, " {} {}", coef.abs(), name);
        } else {
            let _ = write!(out, " {} {} {}", sign, coef.abs(), name);
        }
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
}

/// Renders the model in CPLEX LP text format.
pub fn write_lp_format(model: &LpModel) -> String {
    let mut out = String::new();
    out.push_str(match model.sense {
        Sense::Maximize => "Maximize\n obj:",
        Sense::Minimize => "Minimize\n obj:",
    });
    term_list(
        &mut out,
        model
            .variables
            .iter()
            .map(|v| (v.name.clone(), v.objective)),
    );
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        term_list(
            &mut out,
            c.terms
                .iter()
                .map(|&(v, a)| (model.variables[v.0].name.clone(), a)),
        );
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " {} {}", rel, c.rhs);
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        if v.upper.is_infinite() {
            let _ = writeln!(out, " {} <= {}", v.lower, v.name);
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
        }
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_model_renders() {
        let mut m = LpModel::new(Sense::Maximize);
        let x = m.add_var("x".into(), 0.0, 1.0, 2.0);
        let y = m.add_var("y".into(), 0.0, f64::INFINITY, 0.0);
        m.add_constraint("c1".into(), vec![(x, 1.0), (y, -3.0)], Relation::Le, 4.0);
        let text = write_lp_format(&m);
        assert_eq!(
            text,
            "Maximize\n obj: 2 x\nSubject To\n c1: 1 x - 3 y <= 4\nBounds\n 0 <= x <= 1\n 0 <= y\nEnd\n"
        );
    }
}
