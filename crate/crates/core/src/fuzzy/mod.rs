//! Fuzzy inference: piecewise-linear linguistic terms, Mamdani rules with
//! Zadeh operators, centre-of-gravity defuzzification, and the rule-driven
//! candidate filter of the expert strategy.

mod parser;

pub use parser::parse_rule_file;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::stats::LiveStatistics;

/// Grid resolution used for centre-of-gravity integration.
pub const COG_POINTS: usize = 10_001;

/// Rules shipped with the crate.
pub const DEFAULT_RULES: &str = include_str!("../../rules/default.rules");

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Triangular(f64, f64, f64),
    Trapezoidal(f64, f64, f64, f64),
}

impl Shape {
    fn corners(&self) -> [f64; 4] {
        match *self {
            Shape::Triangular(a, b, c) => [a, b, b, c],
            Shape::Trapezoidal(a, b, c, d) => [a, b, c, d],
        }
    }

    pub fn is_well_formed(&self) -> bool {
        let [a, b, c, d] = self.corners();
        [a, b, c, d].iter().all(|v| v.is_finite()) && a <= b && b <= c && c <= d
    }

    /// Degree of membership of `x`; a vertical edge (`a == b` or `c == d`)
    /// makes a shoulder.
    pub fn degree(&self, x: f64) -> f64 {
        degree_at(self.corners(), x)
    }
}

#[inline]
fn degree_at([a, b, c, d]: [f64; 4], x: f64) -> f64 {
    if x < a || x > d {
        0.0
    } else if x >= b && x <= c {
        1.0
    } else if x < b {
        (x - a) / (b - a)
    } else {
        (d - x) / (d - c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub name: String,
    pub shape: Shape,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinguisticVariable {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub terms: Vec<Term>,
}

impl LinguisticVariable {
    pub fn new(name: impl Into<String>, min: f64, max: f64) -> Self {
        LinguisticVariable { name: name.into(), min, max, terms: Vec::new() }
    }

    pub fn with_term(mut self, name: impl Into<String>, shape: Shape) -> Self {
        self.terms.push(Term { name: name.into(), shape });
        self
    }

    pub fn term(&self, name: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.name == name)
    }

    /// Membership of `x`, clamped into the universe, in the term `term`.
    pub fn membership(&self, term: &Term, x: f64) -> f64 {
        term.shape.degree(x.clamp(self.min, self.max))
    }

    /// The output variable of every configuration: suitability on `[0, 1]`.
    pub fn suitability() -> Self {
        LinguisticVariable::new("Suitability", 0.0, 1.0)
            .with_term("Bad", Shape::Triangular(0.0, 0.0, 0.5))
            .with_term("Okay", Shape::Triangular(0.25, 0.5, 0.75))
            .with_term("Good", Shape::Triangular(0.5, 1.0, 1.0))
    }
}

/// Antecedent expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Is { var: usize, term: usize },
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzyRule {
    pub antecedent: Expr,
    pub config: Configuration,
    /// Index of the consequent term in the output variable.
    pub consequent: usize,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleBase {
    pub inputs: Vec<LinguisticVariable>,
    pub output: LinguisticVariable,
    pub rules: Vec<FuzzyRule>,
}

impl Default for RuleBase {
    fn default() -> Self {
        RuleBase { inputs: Vec::new(), output: LinguisticVariable::suitability(), rules: Vec::new() }
    }
}

/// Activation of `expr` with Zadeh operators: `and` = min, `or` = max, `not` = 1 - x.
pub fn evaluate(expr: &Expr, vars: &[LinguisticVariable], inputs: &dyn Fn(&str) -> Option<f64>) -> Result<f64> {
    Ok(match expr {
        Expr::Is { var, term } => {
            let v = &vars[*var];
            let x = inputs(&v.name).ok_or_else(|| Error::MissingVariable(v.name.clone()))?;
            v.membership(&v.terms[*term], x)
        }
        Expr::And(a, b) => evaluate(a, vars, inputs)?.min(evaluate(b, vars, inputs)?),
        Expr::Or(a, b) => evaluate(a, vars, inputs)?.max(evaluate(b, vars, inputs)?),
        Expr::Not(a) => 1.0 - evaluate(a, vars, inputs)?,
    })
}

/// Mamdani inference over `(activation, consequent shape)` pairs: each shape
/// clipped at its activation, combined by pointwise max, defuzzified by the
/// centre of gravity on a grid of `points` samples over `[lo, hi]`. Zero total
/// activation gives the midpoint of the universe.
pub fn infer_and_defuzzify(clipped: &[(f64, Shape)], lo: f64, hi: f64, points: usize) -> f64 {
    assert!(points >= 3 && points % 2 == 1, "centre of gravity needs an odd number of grid points");
    assert!(hi > lo);
    let intervals = (points - 1) as f64;
    let scale = intervals / (hi - lo);
    // memberships are evaluated in grid-index coordinates so that mirror-image
    // grid points see bit-identical arithmetic
    let scaled: Vec<(f64, [f64; 4])> = clipped
        .iter()
        .filter(|(a, _)| *a > 0.0)
        .map(|(a, s)| (a.min(1.0), s.corners().map(|v| (v - lo) * scale)))
        .collect();
    let mu = |i: usize| -> f64 {
        let x = i as f64;
        let mut m: f64 = 0.0;
        for (a, corners) in &scaled {
            m = m.max(degree_at(*corners, x).min(*a));
        }
        m
    };
    let weight = |i: usize| if i == 0 || i == points - 1 { 0.5 } else { 1.0 };
    let mid = (points - 1) / 2;
    let mut total = weight(mid) * mu(mid);
    let mut moment = 0.0;
    for j in 1..=mid {
        let up = weight(mid + j) * mu(mid + j);
        let down = weight(mid - j) * mu(mid - j);
        total += up + down;
        moment += j as f64 * (up - down);
    }
    if total == 0.0 {
        return 0.5 * (lo + hi);
    }
    let centre = mid as f64 + moment / total;
    (lo + centre / scale).clamp(lo, hi)
}

impl RuleBase {
    pub fn parse(text: &str) -> Result<Self> {
        parse_rule_file(text)
    }

    /// The rules shipped with the crate.
    pub fn default_rules() -> Self {
        parse_rule_file(DEFAULT_RULES).expect("shipped rules parse")
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn input(&self, name: &str) -> Option<&LinguisticVariable> {
        self.inputs.iter().find(|v| v.name == name)
    }

    /// Configurations with at least one rule, in order of first mention.
    pub fn configurations(&self) -> Vec<Configuration> {
        let mut out: Vec<Configuration> = Vec::new();
        for r in &self.rules {
            if !out.contains(&r.config) {
                out.push(r.config);
            }
        }
        out
    }

    /// Crisp suitability of `config`, or `None` if no rule targets it.
    pub fn suitability_with(&self, config: &Configuration, inputs: &dyn Fn(&str) -> Option<f64>, points: usize) -> Result<Option<f64>> {
        let mut clipped = Vec::new();
        for r in self.rules.iter().filter(|r| r.config == *config) {
            let a = evaluate(&r.antecedent, &self.inputs, inputs)?;
            clipped.push((a, self.output.terms[r.consequent].shape));
        }
        if clipped.is_empty() {
            return Ok(None);
        }
        Ok(Some(infer_and_defuzzify(&clipped, self.output.min, self.output.max, points)))
    }

    pub fn suitability(&self, config: &Configuration, stats: &LiveStatistics) -> Result<Option<f64>> {
        self.suitability_with(config, &|name| stats.feature(name), COG_POINTS)
    }
}

/// Configurations of `space` whose rules rate them at least `threshold`; the
/// single best-rated one if none does. Configurations without rules are
/// never proposed. Without any applicable rules the whole space is returned.
pub fn expert_candidates(
    stats: &LiveStatistics,
    rules: &RuleBase,
    space: &[Configuration],
    threshold: f64,
) -> Result<Vec<Configuration>> {
    let mut rated = Vec::new();
    for c in space {
        if let Some(s) = rules.suitability(c, stats)? {
            rated.push((*c, s));
        }
    }
    if rated.is_empty() {
        return crate::tuning::full_search_candidates(space);
    }
    let good: Vec<Configuration> = rated.iter().filter(|(_, s)| *s >= threshold).map(|(c, _)| *c).collect();
    if !good.is_empty() {
        return Ok(good);
    }
    let mut best = rated[0];
    for r in &rated[1..] {
        if r.1 > best.1 {
            best = *r;
        }
    }
    Ok(vec![best.0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(a: f64, b: f64, c: f64) -> Shape {
        Shape::Triangular(a, b, c)
    }

    #[test]
    fn triangular_membership() {
        let t = tri(0.0, 5.0, 10.0);
        assert_eq!(t.degree(5.0), 1.0);
        assert_eq!(t.degree(2.5), 0.5);
        assert_eq!(t.degree(-1.0), 0.0);
        assert_eq!(t.degree(11.0), 0.0);
        assert_eq!(tri(0.0, 0.0, 0.5).degree(0.0), 1.0);
        assert_eq!(Shape::Trapezoidal(0.0, 1.0, 2.0, 3.0).degree(1.5), 1.0);
    }

    #[test]
    fn membership_clamps_into_universe() {
        let v = LinguisticVariable::new("x", 0.0, 10.0).with_term("High", Shape::Trapezoidal(5.0, 10.0, 10.0, 10.0));
        assert_eq!(v.membership(&v.terms[0], 50.0), 1.0);
    }

    #[test]
    fn zadeh_operators() {
        let v = vec![LinguisticVariable::new("x", 0.0, 1.0)
            .with_term("A", Shape::Trapezoidal(0.0, 0.7, 0.7, 0.7))
            .with_term("B", Shape::Trapezoidal(0.0, 0.4, 0.4, 0.4))];
        // at x = 0.28: A = 0.4, B = 0.7
        let inputs = |_: &str| Some(0.28);
        let a = Expr::Is { var: 0, term: 0 };
        let b = Expr::Is { var: 0, term: 1 };
        let and = Expr::And(Box::new(a.clone()), Box::new(b.clone()));
        let or = Expr::Or(Box::new(a.clone()), Box::new(b.clone()));
        assert!((evaluate(&and, &v, &inputs).unwrap() - 0.4).abs() < 1e-12);
        assert!((evaluate(&or, &v, &inputs).unwrap() - 0.7).abs() < 1e-12);
        assert!((evaluate(&Expr::Not(Box::new(a)), &v, &inputs).unwrap() - 0.6).abs() < 1e-12);
        assert!(matches!(evaluate(&b, &v, &|_| None), Err(Error::MissingVariable(_))));
    }

    #[test]
    fn symmetric_consequent_defuzzifies_to_its_peak() {
        for a in [1e-3, 0.3, 0.5, 1.0] {
            assert_eq!(infer_and_defuzzify(&[(a, tri(0.25, 0.5, 0.75))], 0.0, 1.0, COG_POINTS), 0.5);
        }
        let out = LinguisticVariable::suitability();
        let bad = out.term("Bad").unwrap().shape;
        let good = out.term("Good").unwrap().shape;
        assert_eq!(infer_and_defuzzify(&[(0.5, good), (0.5, bad)], 0.0, 1.0, COG_POINTS), 0.5);
    }

    #[test]
    fn inactive_rules_do_not_contribute() {
        let out = LinguisticVariable::suitability();
        let good = out.term("Good").unwrap().shape;
        let okay = out.term("Okay").unwrap().shape;
        let alone = infer_and_defuzzify(&[(1.0, good)], 0.0, 1.0, COG_POINTS);
        assert_eq!(infer_and_defuzzify(&[(1.0, good), (0.0, okay)], 0.0, 1.0, COG_POINTS), alone);
        // centroid of the right triangle over [0.5, 1] is 5/6
        assert!((alone - 5.0 / 6.0).abs() < 1e-6);
        assert_eq!(infer_and_defuzzify(&[(0.0, good)], 0.0, 1.0, COG_POINTS), 0.5);
    }
}
