//! Line-oriented rule files.
//!
//! ```text
//! # comment
//! var meanParticlesPerBin 0 100
//! term meanParticlesPerBin.Low trap 0 0 2 4
//! term meanParticlesPerBin.High tri 2 10 100
//! rule if meanParticlesPerBin == High and not (meanParticlesPerBin == Low) then "LC-C08-N3L-SoA-CSF1".Suitability == Good
//! ```

use super::{Expr, FuzzyRule, LinguisticVariable, RuleBase, Shape, Term};
use crate::config::Configuration;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    Str(String),
    Eq,
    Dot,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> std::result::Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '.' => {
                out.push(Token::Dot);
                i += 1;
            }
            '=' => {
                if chars.get(i + 1) != Some(&'=') {
                    return Err("expected `==`".into());
                }
                out.push(Token::Eq);
                i += 2;
            }
            '"' => {
                let end = chars[i + 1..].iter().position(|&c| c == '"').ok_or("unterminated string")?;
                out.push(Token::Str(chars[i + 1..i + 1 + end].iter().collect()));
                i += end + 2;
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    vars: &'a [LinguisticVariable],
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token::Ident(s)) if s == kw)
    }

    fn or(&mut self) -> std::result::Result<Expr, String> {
        let mut lhs = self.and()?;
        while self.keyword("or") {
            self.pos += 1;
            lhs = Expr::Or(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> std::result::Result<Expr, String> {
        let mut lhs = self.unary()?;
        while self.keyword("and") {
            self.pos += 1;
            lhs = Expr::And(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> std::result::Result<Expr, String> {
        if self.keyword("not") {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        match self.peek().cloned() {
            Some(Token::LParen) => {
                self.pos += 1;
                let e = self.or()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err("expected `)`".into());
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Token::Ident(var)) => {
                self.pos += 1;
                if self.peek() != Some(&Token::Eq) {
                    return Err(format!("expected `==` after `{var}`"));
                }
                self.pos += 1;
                let Some(Token::Ident(term)) = self.peek().cloned() else {
                    return Err(format!("expected a term of `{var}`"));
                };
                self.pos += 1;
                let vi = self.vars.iter().position(|v| v.name == var).ok_or(format!("unknown variable `{var}`"))?;
                let ti = self.vars[vi]
                    .terms
                    .iter()
                    .position(|t| t.name == term)
                    .ok_or(format!("unknown term `{term}` of variable `{var}`"))?;
                Ok(Expr::Is { var: vi, term: ti })
            }
            Some(t) => Err(format!("unexpected {t:?}")),
            None => Err("unexpected end of expression".into()),
        }
    }
}

fn numbers(fields: &[&str]) -> std::result::Result<Vec<f64>, String> {
    fields
        .iter()
        .map(|f| f.parse::<f64>().map_err(|_| format!("`{f}` is not a number")))
        .collect()
}

fn parse_line(rb: &mut RuleBase, line: &str, number: usize) -> std::result::Result<(), String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    match fields[0] {
        "var" => {
            let [_, name, lo, hi] = fields[..] else { return Err("expected `var <name> <min> <max>`".into()) };
            let n = numbers(&[lo, hi])?;
            if !(n[0] < n[1]) {
                return Err(format!("empty universe [{}, {}]", n[0], n[1]));
            }
            if rb.input(name).is_some() || name == rb.output.name {
                return Err(format!("variable `{name}` declared twice"));
            }
            rb.inputs.push(LinguisticVariable::new(name, n[0], n[1]));
        }
        "term" => {
            if fields.len() < 3 {
                return Err("expected `term <var>.<name> tri|trap <corners>`".into());
            }
            let (var, name) = fields[1].split_once('.').ok_or("expected `<var>.<term>`")?;
            let n = numbers(&fields[3..])?;
            let shape = match (fields[2], n.len()) {
                ("tri", 3) => Shape::Triangular(n[0], n[1], n[2]),
                ("trap", 4) => Shape::Trapezoidal(n[0], n[1], n[2], n[3]),
                ("tri", _) => return Err("`tri` takes three corners".into()),
                ("trap", _) => return Err("`trap` takes four corners".into()),
                (other, _) => return Err(format!("unknown shape `{other}`")),
            };
            if !shape.is_well_formed() {
                return Err("term corners must be finite and non-decreasing".into());
            }
            let v = rb.inputs.iter_mut().find(|v| v.name == var).ok_or(format!("unknown variable `{var}`"))?;
            if v.term(name).is_some() {
                return Err(format!("term `{var}.{name}` declared twice"));
            }
            v.terms.push(Term { name: name.to_string(), shape });
        }
        "rule" => {
            let tokens = tokenize(line.trim_start().strip_prefix("rule").unwrap())?;
            if tokens.first() != Some(&Token::Ident("if".into())) {
                return Err("expected `if` after `rule`".into());
            }
            let then = tokens
                .iter()
                .position(|t| *t == Token::Ident("then".into()))
                .ok_or("missing `then`")?;
            let mut p = ExprParser { tokens: &tokens[1..then], pos: 0, vars: &rb.inputs };
            let antecedent = p.or()?;
            if p.pos != then - 1 {
                return Err(format!("unexpected {:?} in condition", tokens[1 + p.pos]));
            }
            let [Token::Str(cfg), Token::Dot, Token::Ident(out), Token::Eq, Token::Ident(term)] = &tokens[then + 1..] else {
                return Err("expected `\"<configuration>\".Suitability == <term>` after `then`".into());
            };
            let config: Configuration = cfg.parse().map_err(|_| format!("unknown configuration \"{cfg}\""))?;
            if *out != rb.output.name {
                return Err(format!("unknown output variable `{out}`"));
            }
            let consequent = rb
                .output
                .terms
                .iter()
                .position(|t| t.name == *term)
                .ok_or(format!("unknown suitability term `{term}`"))?;
            rb.rules.push(FuzzyRule { antecedent, config, consequent, line: number });
        }
        other => return Err(format!("unknown directive `{other}`")),
    }
    Ok(())
}

/// Parses a rule file. Errors carry the 1-based line number.
pub fn parse_rule_file(text: &str) -> Result<RuleBase> {
    let mut rb = RuleBase::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        parse_line(&mut rb, line, i + 1).map_err(|message| Error::RuleParse { line: i + 1, message })?;
    }
    Ok(rb)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "var meanParticlesPerBin 0 100\nterm meanParticlesPerBin.Low trap 0 0 2 4\nterm meanParticlesPerBin.High tri 2 10 100\n";

    #[test]
    fn parses_a_rule() {
        let rb = parse_rule_file(&format!(
            "{HEADER}rule if meanParticlesPerBin == High then \"LC-C08-N3L-SoA-CSF1\".Suitability == Good # note\n"
        ))
        .unwrap();
        assert_eq!(rb.rules.len(), 1);
        assert_eq!(rb.rules[0].config.to_string(), "LC-C08-N3L-SoA-CSF1");
        assert_eq!(rb.rules[0].line, 4);
    }

    #[test]
    fn precedence_and_parentheses() {
        let rb = parse_rule_file(&format!(
            "{HEADER}rule if not meanParticlesPerBin == Low and (meanParticlesPerBin == High or meanParticlesPerBin == Low) then \"VL-List_Iter-NoN3L-AoS\".Suitability == Okay\n"
        ))
        .unwrap();
        let Expr::And(lhs, rhs) = &rb.rules[0].antecedent else { panic!() };
        assert!(matches!(**lhs, Expr::Not(_)));
        assert!(matches!(**rhs, Expr::Or(_, _)));
    }

    #[test]
    fn errors_name_the_line_and_problem() {
        let err = parse_rule_file(&format!("{HEADER}\nrule if meanParticlesPerBin == High then \"LC-C99-N3L-SoA-CSF1\".Suitability == Good"))
            .unwrap_err();
        let Error::RuleParse { line, message } = err else { panic!() };
        assert_eq!(line, 5);
        assert!(message.contains("LC-C99-N3L-SoA-CSF1"));

        for bad in [
            "rule if x == High then \"LC-C08-N3L-SoA-CSF1\".Suitability == Good",
            "rule if meanParticlesPerBin == Medium then \"LC-C08-N3L-SoA-CSF1\".Suitability == Good",
            "rule if meanParticlesPerBin == High then \"LC-C08-N3L-SoA-CSF1\".Suitability == Great",
            "rule if (meanParticlesPerBin == High then \"LC-C08-N3L-SoA-CSF1\".Suitability == Good",
            "rule if meanParticlesPerBin == High \"LC-C08-N3L-SoA-CSF1\".Suitability == Good",
            "term meanParticlesPerBin.Mid tri 3 2 1",
            "frobnicate",
        ] {
            assert!(matches!(parse_rule_file(&format!("{HEADER}{bad}")), Err(Error::RuleParse { line: 4, .. })), "{bad}");
        }
    }

    #[test]
    fn empty_file_is_empty_rule_base() {
        assert!(parse_rule_file("# nothing\n\n").unwrap().is_empty());
    }
}
