use serde::Serialize;

use super::RuleNode;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Range> {
        values.into_iter().fold(None, |acc, v| match acc {
            None => Some(Range { min: v, max: v }),
            Some(r) => Some(Range { min: r.min.min(v), max: r.max.max(v) }),
        })
    }

    /// Position of `v` in the range, 0..=1. A zero-width range maps to 0.5.
    pub fn normalize(&self, v: f64) -> f64 {
        let width = self.max - self.min;
        if width <= 0.0 {
            0.5
        } else {
            ((v - self.min) / width).clamp(0.0, 1.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisualScale {
    pub radius_min: f64,
    pub radius_max: f64,
}

impl Default for VisualScale {
    fn default() -> Self {
        VisualScale {
            radius_min: 0.15,
            radius_max: 0.45,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeVisuals {
    /// Layout units, linear in support.
    pub radius: f64,
    /// 0 (lightest) to 1 (deepest), linear in lift.
    pub shade: f64,
}

pub fn node_visuals(node: &RuleNode, support: Range, lift: Range, scale: &VisualScale) -> NodeVisuals {
    let t = support.normalize(node.support);
    NodeVisuals {
        radius: scale.radius_min * (1.0 - t) + scale.radius_max * t,
        shade: lift.normalize(node.lift),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(support: f64, lift: f64) -> RuleNode {
        RuleNode { rule_id: 1, support, lift }
    }

    #[test]
    fn endpoints_and_midpoint() {
        let s = Range { min: 0.2, max: 0.6 };
        let l = Range { min: 1.2, max: 3.0 };
        let scale = VisualScale::default();
        assert_eq!(node_visuals(&node(0.2, 2.0), s, l, &scale).radius, scale.radius_min);
        assert_eq!(node_visuals(&node(0.6, 2.0), s, l, &scale).radius, scale.radius_max);
        assert_eq!(node_visuals(&node(0.3, 3.0), s, l, &scale).shade, 1.0);
        assert_eq!(node_visuals(&node(0.3, 1.2), s, l, &scale).shade, 0.0);
        let mid = node_visuals(&node(0.4, 2.1), s, l, &scale);
        assert!((mid.radius - (scale.radius_min + scale.radius_max) / 2.0).abs() < 1e-12);
        assert!((mid.shade - 0.5).abs() < 1e-12);
    }

    #[test]
    fn monotone() {
        let s = Range { min: 0.0, max: 1.0 };
        let l = Range { min: 1.0, max: 5.0 };
        let scale = VisualScale::default();
        let a = node_visuals(&node(0.3, 2.0), s, l, &scale);
        let b = node_visuals(&node(0.31, 2.01), s, l, &scale);
        assert!(b.radius > a.radius && b.shade > a.shade);
    }

    #[test]
    fn degenerate_range() {
        let r = Range::of([0.5, 0.5]).unwrap();
        assert_eq!(r.normalize(0.5), 0.5);
        assert!(Range::of(std::iter::empty()).is_none());
    }
}
