use std::collections::HashMap;

use super::{Heap, Value};

/// The part of a heap reachable from a list of root values, with locations
/// renamed in breadth-first discovery order. Two configurations with equal
/// shapes behave identically up to renaming of locations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    roots: Vec<Option<usize>>,
    objs: Vec<(String, String, Vec<Option<usize>>)>,
}

impl Shape {
    pub fn of(heap: &Heap, roots: &[Value]) -> Shape {
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let mut order: Vec<usize> = Vec::new();
        let visit = |v: Value, ids: &mut HashMap<usize, usize>, order: &mut Vec<usize>| match v {
            Value::Null => None,
            Value::Loc(l) => Some(*ids.entry(l).or_insert_with(|| {
                order.push(l);
                order.len() - 1
            })),
        };
        let roots: Vec<Option<usize>> = roots.iter().map(|&v| visit(v, &mut ids, &mut order)).collect();
        let mut objs = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let o = &heap.objs[order[i]];
            let fields = o.fields.values().map(|&v| visit(v, &mut ids, &mut order)).collect();
            objs.push((o.class.clone(), o.label.clone(), fields));
            i += 1;
        }
        Shape { roots, objs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::Obj;
    use std::collections::BTreeMap;

    fn obj(next: Value) -> Obj {
        Obj { class: "N".into(), fields: BTreeMap::from([("next".into(), next)]), label: "l".into() }
    }

    #[test]
    fn renaming_invariant() {
        // Self-loop at location 0 versus at location 2 behind garbage.
        let a = Heap { objs: vec![obj(Value::Loc(0))] };
        let b = Heap { objs: vec![obj(Value::Null), obj(Value::Null), obj(Value::Loc(2))] };
        assert_eq!(Shape::of(&a, &[Value::Loc(0)]), Shape::of(&b, &[Value::Loc(2)]));
        assert_ne!(Shape::of(&a, &[Value::Loc(0)]), Shape::of(&b, &[Value::Loc(0)]));
    }
}
