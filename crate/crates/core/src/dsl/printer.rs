use std::fmt::Write;

use super::ast::*;
use super::exppoly::ExpPoly;

fn exponent(e: &ExpPoly) -> String {
    match e.as_integer() {
        Some(1) => String::new(),
        Some(k) if k >= 0 => format!("^{k}"),
        Some(k) => format!("^({k})"),
        None => format!("^({e})"),
    }
}

/// Prints a monomial without a constant sign, or `None` if it is `1`.
fn mono_body(m: &MonoExpr) -> Option<String> {
    let mut parts = Vec::new();
    if let Some(e) = m.sign_exponent() {
        parts.push(format!("(-1){}", exponent(e)));
    }
    for (b, e) in m.constants() {
        if *b != -1 {
            parts.push(format!("{b}{}", exponent(e)));
        }
    }
    if !m.q_exponent().is_zero() {
        parts.push(format!("q{}", exponent(m.q_exponent())));
    }
    for (s, e) in m.symbols() {
        parts.push(format!("{s}{}", exponent(e)));
    }
    (!parts.is_empty()).then(|| parts.join("*"))
}

/// A monomial with its sign, as it appears in Pochhammer arguments.
pub fn print_mono(m: &MonoExpr) -> String {
    let (neg, rest) = m.split_sign();
    let body = mono_body(&rest).unwrap_or_else(|| "1".into());
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn print_length(l: &Length) -> String {
    match l {
        Length::Infinite => "inf".into(),
        Length::Finite(e) => e.to_string(),
    }
}

fn print_poch(p: &Poch) -> String {
    let args: Vec<String> = p.args.iter().map(print_mono).collect();
    let base = if p.base == 1 {
        "q".to_string()
    } else {
        format!("q^{}", p.base)
    };
    format!("poch({}; {base}; {})", args.join(", "), print_length(&p.length))
}

fn print_range(r: &Range) -> String {
    match r {
        Range::From(lo) => format!(">={lo}"),
        Range::Bilateral => " in Z".into(),
    }
}

fn print_factor(f: &Factor, last: bool) -> String {
    match f {
        Factor::Poch(p) => print_poch(p),
        Factor::Group(g) => format!("({})", print_expr(g)),
        Factor::Sum(s) => {
            let text = format!(
                "sum({}{}) {}",
                s.var,
                print_range(&s.range),
                print_term_unsigned(&s.body)
            );
            if last {
                text
            } else {
                format!("({text})")
            }
        }
    }
}

/// A term without its constant sign.
fn print_term_unsigned(t: &Term) -> String {
    let mut out = String::new();
    let head = mono_body(&t.mono);
    let n = t.factors.len();
    if let Some(h) = &head {
        out.push_str(h);
    }
    for (i, (f, k)) in t.factors.iter().enumerate() {
        // a sum is only safe unparenthesized as the last, unpowered factor
        let last = i + 1 == n && k.abs() == 1;
        let mut text = print_factor(f, last);
        if k.abs() != 1 {
            let _ = write!(text, "^{}", k.abs());
        }
        if out.is_empty() {
            if *k < 0 {
                out.push_str("1 / ");
            }
        } else {
            out.push_str(if *k < 0 { " / " } else { " * " });
        }
        out.push_str(&text);
    }
    if out.is_empty() {
        out.push('1');
    }
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    for (i, t) in e.terms.iter().enumerate() {
        let (neg, mono) = t.mono.split_sign();
        let body = print_term_unsigned(&Term {
            mono,
            factors: t.factors.clone(),
        });
        match (i, neg) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(&body);
    }
    out
}

fn print_instance(s: &InstanceSpec) -> String {
    let mut out = format!("instance({}", s.parent);
    let mut binds: Vec<String> = s
        .symbols
        .iter()
        .map(|(k, v)| format!("{k} = {}", print_mono(v)))
        .collect();
    binds.extend(s.ints.iter().map(|(k, v)| format!("{k} = {v}")));
    if !binds.is_empty() {
        let _ = write!(out, "; {}", binds.join(", "));
    }
    if let Some((sign, power)) = s.qsub {
        let target = if power == 1 {
            "q".to_string()
        } else {
            format!("q^{power}")
        };
        let _ = write!(out, "; q -> {}{target}", if sign < 0 { "-" } else { "" });
    }
    out.push(')');
    out
}

/// Prints a record in canonical form; parsing the output gives back an
/// equal record.
pub fn print_record(r: &IdentityRecord) -> String {
    let mut out = String::new();
    if let Some(s) = &r.source {
        let _ = writeln!(out, "@source {s}");
    }
    if !r.tags.is_empty() {
        let _ = writeln!(out, "@tags {}", r.tags.join(", "));
    }
    let body = match &r.body {
        RecordBody::Equation { lhs, rhs } => format!("{} = {}", print_expr(lhs), print_expr(rhs)),
        RecordBody::Instance(s) => print_instance(s),
    };
    let _ = writeln!(out, "{}: {body}", r.id);
    out
}
