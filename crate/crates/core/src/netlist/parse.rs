use super::{GateKind, Netlist, NetlistBuilder, NetlistError};

/// Parses `.bench` text into a validated [`Netlist`].
///
/// Accepted statements, one per line: `INPUT(x)`, `OUTPUT(x)`,
/// `x = DFF(d)` and `x = GATE(a, b, ...)`. `#` starts a comment.
pub fn parse_bench(text: &str) -> Result<Netlist, NetlistError> {
    let mut builder = NetlistBuilder::new("netlist");
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: &str| NetlistError::Syntax {
            line: line_no,
            message: message.to_string(),
        };
        if !line.is_ascii() {
            return Err(syntax("non-ASCII characters"));
        }

        if let Some((lhs, rhs)) = line.split_once('=') {
            let target = lhs.trim();
            check_name(target).map_err(|m| syntax(&m))?;
            let (func, args) = call(rhs.trim()).map_err(|m| syntax(&m))?;
            if func.eq_ignore_ascii_case("DFF") {
                if args.len() != 1 {
                    return Err(syntax("DFF takes exactly one input"));
                }
                builder.dff(target, args[0], line_no);
            } else {
                let kind = GateKind::from_keyword(func)
                    .ok_or_else(|| syntax(&format!("unknown gate type `{func}`")))?;
                if !kind.arity_ok(args.len()) {
                    return Err(NetlistError::Arity {
                        kind,
                        name: target.to_string(),
                        got: args.len(),
                        line: line_no,
                    });
                }
                builder.gate(kind, target, &args, line_no);
            }
        } else {
            let (func, args) = call(line).map_err(|m| syntax(&m))?;
            if args.len() != 1 {
                return Err(syntax(&format!("{func} takes exactly one net")));
            }
            if func.eq_ignore_ascii_case("INPUT") {
                builder.input(args[0], line_no);
            } else if func.eq_ignore_ascii_case("OUTPUT") {
                builder.output(args[0], line_no);
            } else {
                return Err(syntax(&format!("unexpected statement `{func}`")));
            }
        }
    }
    builder.build()
}

fn call(text: &str) -> Result<(&str, Vec<&str>), String> {
    let open = text.find('(').ok_or("expected `(`")?;
    if !text.ends_with(')') {
        return Err("expected `)` at end of statement".into());
    }
    let func = text[..open].trim();
    if func.is_empty() {
        return Err("missing keyword before `(`".into());
    }
    let inner = &text[open + 1..text.len() - 1];
    let mut args = Vec::new();
    for arg in inner.split(',') {
        let arg = arg.trim();
        check_name(arg)?;
        args.push(arg);
    }
    Ok((func, args))
}

fn check_name(name: &str) -> Result<(), String> {
    if name.is_empty() {
        return Err("empty net name".into());
    }
    if let Some(c) = name
        .chars()
        .find(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '='))
    {
        return Err(format!("invalid character `{c}` in net name `{name}`"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::Driver;

    #[test]
    fn minimal_file() {
        let n = parse_bench("INPUT(a)\nOUTPUT(z)\nz = NOT(a)\n").unwrap();
        assert_eq!(n.inputs().len(), 1);
        assert_eq!(n.outputs().len(), 1);
        assert_eq!(n.gates().len(), 1);
        assert_eq!(n.dffs().len(), 0);
    }

    #[test]
    fn ids_follow_first_appearance() {
        let n = parse_bench("OUTPUT(z)\nINPUT(a)\nz = AND(a, q)\nq = DFF(z)\n").unwrap();
        let names: Vec<_> = n.net_names().iter().map(String::as_str).collect();
        assert_eq!(names, ["z", "a", "q"]);
        assert_eq!(n.driver(n.net("q").unwrap()), Driver::Dff(0));
    }

    #[test]
    fn comments_blank_lines_and_case() {
        let text = "# header\n\ninput(a) # trailing\nINPUT(b)\nOUTPUT(y)\ny = nand(a,b)\n";
        let n = parse_bench(text).unwrap();
        assert_eq!(n.gates()[0].kind, GateKind::Nand);
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_bench("INPUT(a)\nOUTPUT(z)\nz = NOT a\n").unwrap_err();
        assert!(matches!(err, NetlistError::Syntax { line: 3, .. }), "{err}");
        let err = parse_bench("INPUT(a)\nz = FOO(a, a)\n").unwrap_err();
        assert!(matches!(err, NetlistError::Syntax { line: 2, .. }), "{err}");
    }

    #[test]
    fn undeclared_net() {
        let err = parse_bench("INPUT(a)\nOUTPUT(z)\nz = AND(a, b)\n").unwrap_err();
        assert_eq!(
            err,
            NetlistError::UndeclaredNet {
                name: "b".into(),
                line: 3
            }
        );
    }

    #[test]
    fn duplicate_driver() {
        let err = parse_bench("INPUT(a)\nz = NOT(a)\nz = BUF(a)\n").unwrap_err();
        assert_eq!(
            err,
            NetlistError::DuplicateDriver {
                name: "z".into(),
                line: 3
            }
        );
        let err = parse_bench("INPUT(a)\na = DFF(a)\n").unwrap_err();
        assert!(matches!(err, NetlistError::DuplicateDriver { line: 2, .. }));
    }

    #[test]
    fn combinational_cycle_is_rejected() {
        let err = parse_bench("INPUT(a)\nx = AND(a, y)\ny = NOT(x)\n").unwrap_err();
        match err {
            NetlistError::CombinationalCycle { nets } => {
                assert!(nets.contains(&"x".to_string()) && nets.contains(&"y".to_string()))
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn cycle_through_dff_is_fine() {
        parse_bench("q = DFF(d)\nd = NOT(q)\n").unwrap();
    }

    #[test]
    fn arity_is_checked() {
        let err = parse_bench("INPUT(a)\nINPUT(b)\nz = NOT(a, b)\n").unwrap_err();
        assert!(matches!(err, NetlistError::Arity { got: 2, .. }));
        let err = parse_bench("INPUT(a)\nz = AND(a)\n").unwrap_err();
        assert!(matches!(err, NetlistError::Arity { got: 1, .. }));
    }
}
