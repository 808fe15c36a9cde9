use super::Formula;

// Binding strength, loosest first.
const QUANT: u8 = 0;
const IFF: u8 = 1;
const IMPL: u8 = 2;
const DISJ: u8 = 3;
const CONJ: u8 = 4;
const UNARY: u8 = 5;
const ATOM: u8 = 6;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Forall(..) | Formula::Exists(..) => QUANT,
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPL,
        Formula::Or(..) => DISJ,
        Formula::And(..) => CONJ,
        Formula::Not(_) | Formula::Box(..) | Formula::Diamond(..) => UNARY,
        _ => ATOM,
    }
}

/// Renders a formula in the concrete grammar accepted by
/// [`parse_formula`](super::parse_formula), with the minimum of parentheses
/// except that equalities under a unary operator are always bracketed.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, QUANT, &mut out);
    out
}

fn write(f: &Formula, min: u8, out: &mut String) {
    if level(f) < min {
        out.push('(');
        write(f, QUANT, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Atom { pred, args } => {
            out.push_str(pred);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(a.as_str());
            }
            out.push(')');
        }
        Formula::Equal(x, y) => {
            out.push_str(x.as_str());
            out.push_str(" = ");
            out.push_str(y.as_str());
        }
        Formula::Top => out.push('T'),
        Formula::Bottom => out.push('F'),
        Formula::Not(g) => {
            out.push('~');
            operand(g, out);
        }
        Formula::Box(k, g) => {
            out.push_str(&format!("[{k}] "));
            operand(g, out);
        }
        Formula::Diamond(k, g) => {
            out.push_str(&format!("<{k}> "));
            operand(g, out);
        }
        Formula::And(a, b) => binary(a, " & ", b, CONJ, UNARY, out),
        Formula::Or(a, b) => binary(a, " | ", b, DISJ, CONJ, out),
        Formula::Implies(a, b) => binary(a, " -> ", b, DISJ, IMPL, out),
        Formula::Iff(a, b) => binary(a, " <-> ", b, IFF, IMPL, out),
        Formula::Forall(x, g) | Formula::Exists(x, g) => {
            out.push_str(if matches!(f, Formula::Forall(..)) { "forall " } else { "exists " });
            out.push_str(x.as_str());
            out.push_str(". ");
            write(g, QUANT, out);
        }
    }
}

fn operand(g: &Formula, out: &mut String) {
    if matches!(g, Formula::Equal(..)) {
        out.push('(');
        write(g, QUANT, out);
        out.push(')');
    } else {
        write(g, UNARY, out);
    }
}

fn binary(a: &Formula, op: &str, b: &Formula, left: u8, right: u8, out: &mut String) {
    write(a, left, out);
    out.push_str(op);
    write(b, right, out);
}
