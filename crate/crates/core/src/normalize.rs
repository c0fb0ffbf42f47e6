//! Whitespace normalization used to compare generated text against
//! hand-wrapped reference listings.

/// One line per top-level s-expression with every whitespace run inside it
/// collapsed to a single space. `;` comments are dropped; string literals
/// and `|quoted|` symbols are kept verbatim.
pub fn normalize_smt(text: &str) -> String {
    let mut forms: Vec<String> = Vec::new();
    let mut current = String::new();
    let mut depth = 0usize;
    let mut pending_space = false;
    let mut chars = text.chars().peekable();

    let flush_space = |current: &mut String, pending: &mut bool| {
        if *pending && !current.is_empty() {
            current.push(' ');
        }
        *pending = false;
    };

    while let Some(c) = chars.next() {
        match c {
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
                pending_space = true;
            }
            c if c.is_whitespace() => pending_space = true,
            '"' | '|' => {
                flush_space(&mut current, &mut pending_space);
                current.push(c);
                while let Some(d) = chars.next() {
                    current.push(d);
                    if d == c {
                        // A doubled quote inside a string literal is an escape.
                        if c == '"' && chars.peek() == Some(&'"') {
                            current.push(chars.next().unwrap());
                            continue;
                        }
                        break;
                    }
                }
            }
            _ => {
                flush_space(&mut current, &mut pending_space);
                current.push(c);
                if c == '(' {
                    depth += 1;
                } else if c == ')' {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        forms.push(std::mem::take(&mut current));
                        pending_space = false;
                    }
                }
            }
        }
    }
    if !current.is_empty() {
        forms.push(current);
    }
    forms.iter().map(|f| format!("{f}\n")).collect()
}

/// One line per blank-line-separated block with every whitespace run inside
/// the block collapsed to a single space.
pub fn normalize_prop(text: &str) -> String {
    let text = text.replace("\r\n", "\n");
    let mut blocks = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in text.split('\n') {
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(current.join(" "));
                current.clear();
            }
        } else {
            current.push(line);
        }
    }
    if !current.is_empty() {
        blocks.push(current.join(" "));
    }
    blocks
        .iter()
        .map(|b| format!("{}\n", b.split_whitespace().collect::<Vec<_>>().join(" ")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smt_forms_are_collapsed() {
        let wrapped = "(define-fun f () Bool\n  (and (or a\n      b) c))\n\n(assert f)\n(check-sat) ; + (get-model) if requested\n";
        assert_eq!(normalize_smt(wrapped), "(define-fun f () Bool (and (or a b) c))\n(assert f)\n(check-sat)\n");
    }

    #[test]
    fn strings_are_preserved() {
        assert_eq!(normalize_smt("(assert (= s \"a  \"\" ; b\"))"), "(assert (= s \"a  \"\" ; b\"))\n");
    }

    #[test]
    fn prop_blocks() {
        assert_eq!(normalize_prop("a:=\n[(x &\n y)]\n\n\nb:=\n[z]\n"), "a:= [(x & y)]\nb:= [z]\n");
    }
}
