use super::AndLayer;
use crate::error::{Error, Result};

/// Direction of a single AND-layer change. `Remove` orders before `Add`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlipDirection {
    Remove,
    Add,
}

/// A change of one AND-layer entry. Adding a literal evicts any literal of
/// the same attribute already in the rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flip {
    pub rule: usize,
    pub literal: usize,
    pub direction: FlipDirection,
    pub evicted: Vec<usize>,
}

impl Flip {
    pub fn remove(rule: usize, literal: usize) -> Self {
        Self {
            rule,
            literal,
            direction: FlipDirection::Remove,
            evicted: Vec::new(),
        }
    }

    /// Add `literal` to `rule`, filling `evicted` from the layer's current state.
    pub fn add(layer: &AndLayer, rule: usize, literal: usize) -> Self {
        let attr = layer.schema().attribute_of(literal);
        Self {
            rule,
            literal,
            direction: FlipDirection::Add,
            evicted: layer.literals_of_attribute(rule, attr),
        }
    }

    /// The flip that undoes this one once it has been applied.
    pub fn inverse(&self) -> Self {
        match (self.direction, self.evicted.as_slice()) {
            (FlipDirection::Remove, _) => Self {
                direction: FlipDirection::Add,
                ..self.clone()
            },
            (FlipDirection::Add, []) => Self::remove(self.rule, self.literal),
            (FlipDirection::Add, [e]) => Self {
                rule: self.rule,
                literal: *e,
                direction: FlipDirection::Add,
                evicted: vec![self.literal],
            },
            (FlipDirection::Add, _) => {
                unreachable!("a contradiction-free rule evicts at most one literal")
            }
        }
    }

    /// Checks the flip against the current layer state.
    pub fn validate(&self, layer: &AndLayer) -> Result<()> {
        if self.rule >= layer.n_rules() || self.literal >= layer.n_literals() {
            return Err(Error::IllegalFlip(format!(
                "rule {} / literal {} out of range",
                self.rule, self.literal
            )));
        }
        let present = layer.contains(self.rule, self.literal);
        match self.direction {
            FlipDirection::Remove if !present => Err(Error::IllegalFlip(format!(
                "remove of literal {} absent from rule {}",
                self.literal, self.rule
            ))),
            FlipDirection::Remove if !self.evicted.is_empty() => {
                Err(Error::IllegalFlip("remove cannot evict".into()))
            }
            FlipDirection::Add if present => Err(Error::IllegalFlip(format!(
                "add of literal {} already in rule {}",
                self.literal, self.rule
            ))),
            FlipDirection::Add => {
                let attr = layer.schema().attribute_of(self.literal);
                let expected = layer.literals_of_attribute(self.rule, attr);
                if expected != self.evicted {
                    return Err(Error::IllegalFlip(format!(
                        "add evicts {:?}, rule holds {:?}",
                        self.evicted, expected
                    )));
                }
                Ok(())
            }
            FlipDirection::Remove => Ok(()),
        }
    }
}

/// Returns a new layer with `flip` applied.
pub fn apply_flip(layer: &AndLayer, flip: &Flip) -> Result<AndLayer> {
    flip.validate(layer)?;
    let mut out = layer.clone();
    let rule = &mut out.rules_mut()[flip.rule];
    for &e in &flip.evicted {
        rule.set(e, false);
    }
    rule.set(flip.literal, flip.direction == FlipDirection::Add);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dataset::{Attribute, AttributeSchema};
    use proptest::prelude::*;

    fn schema() -> Arc<AttributeSchema> {
        Arc::new(
            AttributeSchema::new(vec![
                Attribute::nominal("A", ["a", "b", "c"]),
                Attribute::nominal("B", ["x", "y"]),
            ])
            .unwrap(),
        )
    }

    #[test]
    fn add_evicts_same_attribute() {
        let layer = AndLayer::from_literals(schema(), &[vec![0, 3]]).unwrap();
        let flip = Flip::add(&layer, 0, 1);
        assert_eq!(flip.evicted, vec![0]);
        let out = apply_flip(&layer, &flip).unwrap();
        assert_eq!(out.literals(0).collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn remove_only_literal_leaves_empty_rule() {
        let layer = AndLayer::from_literals(schema(), &[vec![4]]).unwrap();
        let out = apply_flip(&layer, &Flip::remove(0, 4)).unwrap();
        assert_eq!(out.literals(0).count(), 0);
    }

    #[test]
    fn illegal_flips_rejected() {
        let layer = AndLayer::from_literals(schema(), &[vec![0]]).unwrap();
        assert!(apply_flip(&layer, &Flip::remove(0, 1)).is_err());
        let mut add = Flip::add(&layer, 0, 3);
        add.literal = 0;
        assert!(apply_flip(&layer, &add).is_err());
        let stale = Flip {
            rule: 0,
            literal: 2,
            direction: FlipDirection::Add,
            evicted: vec![],
        };
        assert!(matches!(apply_flip(&layer, &stale), Err(Error::IllegalFlip(_))));
        assert!(apply_flip(&layer, &Flip::remove(1, 0)).is_err());
    }

    #[test]
    fn inverse_restores_layer() {
        let layer = AndLayer::from_literals(schema(), &[vec![0, 3], vec![]]).unwrap();
        for flip in [Flip::add(&layer, 0, 2), Flip::remove(0, 3), Flip::add(&layer, 1, 4)] {
            let there = apply_flip(&layer, &flip).unwrap();
            let back = apply_flip(&there, &flip.inverse()).unwrap();
            assert_eq!(back, layer, "{flip:?}");
        }
    }

    proptest! {
        #[test]
        fn flips_never_create_contradictions(ops in prop::collection::vec((0usize..3, 0usize..5), 0..60)) {
            let mut layer = AndLayer::empty(schema(), 3);
            for (rule, lit) in ops {
                let flip = if layer.contains(rule, lit) { Flip::remove(rule, lit) } else { Flip::add(&layer, rule, lit) };
                layer = apply_flip(&layer, &flip).unwrap();
                prop_assert!(layer.first_contradiction().is_none());
            }
        }
    }
}
