//! Canonical text output. Rendering is the inverse of parsing on normalized
//! trees: `parse(render(e)) == e`.

use super::Expr;
use num_traits::Signed;

pub fn render(e: &Expr) -> String {
    render_add(e)
}

fn render_add(e: &Expr) -> String {
    match e {
        Expr::Sum(ts) => {
            let mut out = String::new();
            for (i, t) in ts.iter().enumerate() {
                let (q, key) = t.split_coeff();
                if i == 0 {
                    out.push_str(&render_mul(t));
                } else if q.is_negative() {
                    out.push_str(" - ");
                    out.push_str(&render_mul(&super::normal::attach_coeff(-q, key)));
                } else {
                    out.push_str(" + ");
                    out.push_str(&render_mul(t));
                }
            }
            out
        }
        _ => render_mul(e),
    }
}

fn render_mul(e: &Expr) -> String {
    match e {
        Expr::Prod(fs) => {
            let mut parts: Vec<String> = Vec::with_capacity(fs.len());
            let mut lead = String::new();
            for (i, f) in fs.iter().enumerate() {
                if i == 0 {
                    if let Expr::Num(q) = f {
                        if *q == super::qint(-1) {
                            lead = "-".into();
                            continue;
                        }
                    }
                }
                parts.push(render_factor(f));
            }
            format!("{lead}{}", parts.join("*"))
        }
        _ => render_factor(e),
    }
}

fn render_factor(e: &Expr) -> String {
    match e {
        Expr::Pow(b, x) => format!("{}^{}", render_atom(b), render_atom(x)),
        Expr::Num(_) => render_num(e),
        _ => render_atom(e),
    }
}

/// Bare numeral: `3`, `-3`, `3/2`, `-3/2`. Valid at factor position.
fn render_num(e: &Expr) -> String {
    match e {
        Expr::Num(q) => {
            if q.is_integer() {
                q.numer().to_string()
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        }
        _ => unreachable!(),
    }
}

fn render_atom(e: &Expr) -> String {
    match e {
        Expr::Num(q) => {
            if q.is_integer() && !q.is_negative() {
                q.numer().to_string()
            } else {
                format!("({})", render_num(e))
            }
        }
        Expr::Const(s) | Expr::Var(s) => s.name().to_string(),
        Expr::Func(f, a) => format!("{}({})", f.name(), render_add(a)),
        Expr::Unknown(u) => {
            let mut head = u.name.name().to_string();
            let sig = u.name.unknown_signature().unwrap_or(&[]);
            if u.total_order() > 0 {
                if sig.len() == 1 {
                    for _ in 0..u.deriv[0] {
                        head.push('\'');
                    }
                } else {
                    head.push('_');
                    for (slot, count) in u.deriv.iter().enumerate() {
                        for _ in 0..*count {
                            head.push_str(sig[slot].name());
                        }
                    }
                }
            }
            if u.total_order() > 0 && u.has_default_args() {
                head
            } else {
                let args: Vec<String> = u.args.iter().map(render_add).collect();
                format!("{head}({})", args.join(","))
            }
        }
        Expr::Pow(..) | Expr::Prod(..) | Expr::Sum(..) => format!("({})", render_add(e)),
    }
}
