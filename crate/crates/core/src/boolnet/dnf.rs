//! Plain-text rule-set documents.
//!
//! ```text
//! # positive class: >50K
//! education=Doctorate AND sex=Male → >50K
//! TRUE → >50K
//! otherwise → <=50K
//! ```
//!
//! Only selected rules are listed. A rule without literals is written
//! `TRUE`. The header line keeps the positive class recoverable when no rule
//! is selected.

use std::fmt;
use std::sync::Arc;

use super::{AndLayer, OrLayer, RuleNetwork};
use crate::bits::BitVec;
use crate::dataset::AttributeSchema;
use crate::error::{Error, Result};

const ARROW: &str = " → ";
const AND: &str = " AND ";
const HEADER: &str = "# positive class: ";
const DEFAULT: &str = "otherwise";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSetDocument {
    pub positive_class: String,
    pub default_class: String,
    /// Conjunctions of `(attribute, value)` literals.
    pub rules: Vec<Vec<(String, String)>>,
}

impl fmt::Display for RuleSetDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}{}", self.positive_class)?;
        for rule in &self.rules {
            if rule.is_empty() {
                f.write_str("TRUE")?;
            }
            for (i, (a, v)) in rule.iter().enumerate() {
                if i > 0 {
                    f.write_str(AND)?;
                }
                write!(f, "{a}={v}")?;
            }
            writeln!(f, "{ARROW}{}", self.positive_class)?;
        }
        writeln!(f, "{DEFAULT}{ARROW}{}", self.default_class)
    }
}

pub fn to_dnf(network: &RuleNetwork) -> RuleSetDocument {
    let schema = network.schema();
    let rules = network
        .or_layer
        .selected_rules()
        .map(|j| {
            network
                .and_layer
                .literals(j)
                .map(|l| {
                    let (a, v) = schema.describe(l);
                    (a.to_string(), v.to_string())
                })
                .collect()
        })
        .collect();
    RuleSetDocument {
        positive_class: network.positive_class.clone(),
        default_class: network.negative_class.clone(),
        rules,
    }
}

fn parse_literal(schema: &AttributeSchema, text: &str) -> Option<usize> {
    // Attribute names may themselves contain '=', so try every split point.
    text.match_indices('=')
        .find_map(|(i, _)| schema.find_literal(&text[..i], &text[i + 1..]))
}

/// Parses a document written by [`RuleSetDocument`]'s `Display` back into a
/// network holding exactly the listed rules, all selected.
pub fn parse_dnf(text: &str, schema: Arc<AttributeSchema>) -> Result<RuleNetwork> {
    let err = |line: usize, message: String| Error::Dnf { line, message };
    let mut positive: Option<String> = None;
    let mut default: Option<String> = None;
    let mut rules: Vec<Vec<usize>> = Vec::new();

    for (n, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if line.is_empty() {
            continue;
        }
        if let Some(class) = line.strip_prefix(HEADER) {
            positive = Some(class.to_string());
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let (body, class) = line
            .rsplit_once(ARROW)
            .ok_or_else(|| err(n, "expected `body → class`".into()))?;
        if body == DEFAULT {
            default = Some(class.to_string());
            continue;
        }
        match &positive {
            Some(p) if p != class => {
                return Err(err(n, format!("rule predicts `{class}`, expected `{p}`")));
            }
            Some(_) => {}
            None => positive = Some(class.to_string()),
        }
        if body == "TRUE" {
            rules.push(Vec::new());
            continue;
        }
        let lits = body
            .split(AND)
            .map(|t| parse_literal(&schema, t).ok_or_else(|| err(n, format!("unknown literal `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        rules.push(lits);
    }

    let positive = positive.ok_or_else(|| err(0, "positive class not stated".into()))?;
    let default = default.ok_or_else(|| err(0, "missing `otherwise` line".into()))?;
    let and_layer = AndLayer::from_literals(schema, &rules)?;
    let or_layer = OrLayer::from_bits(BitVec::ones(rules.len()));
    RuleNetwork::new(and_layer, or_layer, positive, default)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Attribute;

    fn schema() -> Arc<AttributeSchema> {
        Arc::new(
            AttributeSchema::new(vec![
                Attribute::nominal("education", ["Bachelors", "Doctorate"]),
                Attribute::nominal("sex", ["Female", "Male"]),
            ])
            .unwrap(),
        )
    }

    #[test]
    fn renders_selected_rules_only() {
        let s = schema();
        let layer = AndLayer::from_literals(s, &[vec![1, 3], vec![0], vec![]]).unwrap();
        let or = OrLayer::from_bits(BitVec::from_bools([true, false, true]));
        let net = RuleNetwork::new(layer, or, ">50K", "<=50K").unwrap();
        let text = to_dnf(&net).to_string();
        assert_eq!(
            text,
            "# positive class: >50K\n\
             education=Doctorate AND sex=Male → >50K\n\
             TRUE → >50K\n\
             otherwise → <=50K\n"
        );
    }

    #[test]
    fn empty_rule_set_states_default() {
        let net = RuleNetwork::new(AndLayer::empty(schema(), 2), OrLayer::none(2), "p", "n").unwrap();
        let doc = to_dnf(&net);
        assert!(doc.rules.is_empty());
        assert_eq!(doc.to_string(), "# positive class: p\notherwise → n\n");
        let back = parse_dnf(&doc.to_string(), schema()).unwrap();
        assert_eq!(back.n_rules(), 0);
        assert_eq!(back.positive_class, "p");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "# positive class: p\nfoo=bar → p\notherwise → n\n";
        assert!(matches!(parse_dnf(bad, schema()), Err(Error::Dnf { line: 2, .. })));
        assert!(parse_dnf("# positive class: p\n", schema()).is_err());
    }
}
