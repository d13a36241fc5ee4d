use super::{Elem, FiniteRing};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which unit action: `Ux`, `xU` or `UxU`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitKind {
    Left,
    Right,
    Double,
}

/// Partition of the ring into unit orbits. Classes are ordered by their
/// minimal element, which is also the class representative; class 0 is `{0}`
/// whenever 0 is the zero index.
#[derive(Debug, Clone)]
pub struct OrbitPartition {
    kind: OrbitKind,
    class_of: Vec<u32>,
    classes: Vec<Vec<Elem>>,
}

const PAR_THRESHOLD: usize = 4096;

impl OrbitPartition {
    pub(super) fn one_sided(ring: &FiniteRing, kind: OrbitKind) -> Self {
        let act = |u: Elem, x: Elem| match kind {
            OrbitKind::Left => ring.mul(u, x),
            _ => ring.mul(x, u),
        };
        let units = ring.units();
        let mut class_of = vec![u32::MAX; ring.order()];
        let mut classes = Vec::new();
        for x in ring.elements() {
            if class_of[x as usize] != u32::MAX {
                continue;
            }
            let id = classes.len() as u32;
            let images: Vec<Elem> = if units.len() > PAR_THRESHOLD {
                units.par_iter().map(|&u| act(u, x)).collect()
            } else {
                units.iter().map(|&u| act(u, x)).collect()
            };
            let mut members = Vec::new();
            for y in images {
                if class_of[y as usize] == u32::MAX {
                    class_of[y as usize] = id;
                    members.push(y);
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        OrbitPartition { kind, class_of, classes }
    }

    /// `UxU` as unions of right orbits `xU` glued by left unit multiplication.
    pub(super) fn double(ring: &FiniteRing, right: &OrbitPartition) -> Self {
        let n = right.classes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for c in 0..n {
            let x = right.classes[c][0];
            let targets: Vec<u32> = if ring.units().len() > PAR_THRESHOLD {
                ring.units().par_iter().map(|&u| right.class_of[ring.mul(u, x) as usize]).collect()
            } else {
                ring.units().iter().map(|&u| right.class_of[ring.mul(u, x) as usize]).collect()
            };
            for t in targets {
                let (a, b) = (find(&mut parent, c), find(&mut parent, t as usize));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut root_id = vec![u32::MAX; n];
        let mut classes: Vec<Vec<Elem>> = Vec::new();
        for c in 0..n {
            let root = find(&mut parent, c);
            if root_id[root] == u32::MAX {
                root_id[root] = classes.len() as u32;
                classes.push(Vec::new());
            }
            classes[root_id[root] as usize].extend_from_slice(&right.classes[c]);
        }
        let mut class_of = vec![0u32; ring.order()];
        for (id, members) in classes.iter_mut().enumerate() {
            members.sort_unstable();
            for &x in members.iter() {
                class_of[x as usize] = id as u32;
            }
        }
        OrbitPartition { kind: OrbitKind::Double, class_of, classes }
    }

    pub fn kind(&self) -> OrbitKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[Vec<Elem>] {
        &self.classes
    }

    pub fn class(&self, id: usize) -> &[Elem] {
        &self.classes[id]
    }

    pub fn class_of(&self, x: Elem) -> usize {
        self.class_of[x as usize] as usize
    }

    /// Minimal element of the class containing `x`.
    pub fn representative(&self, x: Elem) -> Elem {
        self.classes[self.class_of(x)][0]
    }

    pub fn representatives(&self) -> impl Iterator<Item = Elem> + '_ {
        self.classes.iter().map(|c| c[0])
    }
}
