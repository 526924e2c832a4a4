use std::collections::BTreeMap;

use thiserror::Error;

use super::{candidate_check, Lineage, Sapling, Violation};
use crate::graphs::{components_rel, BirootedAutomaton, Vertex, VertexSet};
use crate::stephen::ApproxAutomaton;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrowError {
    #[error("gluing the copies produced a non-deterministic graph")]
    Nondeterministic,
    #[error("grown graph is not a sapling: {0}")]
    Violation(#[from] Violation),
}

/// One growth step: glues a copy of `Γᶜ(x₀,Xᵢ)` onto `Yᵢ` for every pair,
/// along `φᵢ` on the overlap `Xᵢ^{+K} ∩ Γᶜ(x₀,Xᵢ)`.
///
/// Old vertices keep their ids; new ones are appended. The new pairs are
/// `(χᵢ(Yⱼ), Yⱼ)` for every `Yⱼ ⊆ Γᶜ(x₀,Xᵢ)`, where `χᵢ` is the copy map.
pub fn grow(s: &Sapling) -> Result<Sapling, GrowError> {
    let g = s.graph();
    let x0 = s.x0();
    let k = s.big_k();
    let mut h = g.clone();
    let mut new_ys = Vec::new();
    let mut new_xs = Vec::new();
    let mut parents = Vec::new();
    for (i, pair) in s.pairs.iter().enumerate() {
        let gc = components_rel(g, &pair.x, x0).expect("x₀ ∉ X").1;
        let ball = g.neighborhood(&pair.x, k);
        let mut chi: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        for &t in &gc {
            let image = if ball.contains(&t) {
                pair.phi[&t]
            } else {
                h.add_vertex()
            };
            chi.insert(t, image);
        }
        for &u in &gc {
            for &(l, v) in g.out(u) {
                if l.is_positive() && gc.contains(&v) {
                    h.add_edge(chi[&u], l, chi[&v]);
                }
            }
        }
        for other in &s.pairs {
            if other.y.is_subset(&gc) {
                new_ys.push(other.y.iter().map(|v| chi[v]).collect::<VertexSet>());
                new_xs.push(other.y.clone());
                parents.push(i);
            }
        }
    }
    if !h.is_deterministic() {
        return Err(GrowError::Nondeterministic);
    }
    let approx = ApproxAutomaton {
        auto: BirootedAutomaton {
            graph: h,
            start: x0,
            end: s.approx.end(),
        },
        ..s.approx.clone()
    };
    let c = candidate_check(&approx, &new_ys, &new_xs)?;
    let mut levels = s.lineage.levels.clone();
    levels.push(
        new_ys
            .into_iter()
            .zip(parents)
            .map(|(y, p)| (y, Some(p)))
            .collect(),
    );
    Ok(Sapling {
        approx: c.approx,
        pairs: c.pairs,
        k: s.k,
        lineage: Lineage {
            levels,
            branch_width: s.lineage.branch_width,
        },
    })
}

/// `r` growth steps.
pub fn materialize(s: &Sapling, r: usize) -> Result<Sapling, GrowError> {
    let mut cur = s.clone();
    for _ in 0..r {
        cur = grow(&cur)?;
    }
    Ok(cur)
}

/// Blocks of the tree decomposition induced by the `Y` hierarchy: the
/// root block `⋂ Γ(x₀,Y) ∪ ⋃ Y` over the first level, then for each `Y`
/// the components of `(Γᶜ(x₀,Y) ∩ ⋂_{children c} Γ(x₀,c)) ∪ ⋃ c`.
pub fn tree_partition(s: &Sapling) -> Vec<VertexSet> {
    let g = s.graph();
    let x0 = s.x0();
    let levels = &s.lineage.levels;
    let mut blocks = vec![root_block(s)];
    for (t, level) in levels.iter().enumerate() {
        for (q, (y, _)) in level.iter().enumerate() {
            let mut part = components_rel(g, y, x0).expect("x₀ ∉ Y").1;
            if let Some(next) = levels.get(t + 1) {
                for (c, _) in next.iter().filter(|(_, p)| *p == Some(q)) {
                    let gam = components_rel(g, c, x0).expect("x₀ ∉ Y").0;
                    part = part.intersection(&gam).copied().collect();
                    part.extend(c.iter().copied());
                }
            }
            blocks.extend(g.components(&part));
        }
    }
    blocks.retain(|b| !b.is_empty());
    blocks
}

fn root_block(s: &Sapling) -> VertexSet {
    let g = s.graph();
    let first = &s.lineage.levels[0];
    let mut inter = g.all_vertices();
    for (y, _) in first {
        let gam = components_rel(g, y, s.x0()).expect("x₀ ∉ Y").0;
        inter = inter.intersection(&gam).copied().collect();
    }
    for (y, _) in first {
        inter.extend(y.iter().copied());
    }
    inter
}

/// Width guaranteed for [`tree_partition`] at every growth stage.
pub fn width_bound(s: &Sapling) -> usize {
    let root = root_block(s);
    let d = s.graph().diameter(&root).unwrap_or(0);
    d.max(s.lineage.branch_width)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{sapling_check, verify};
    use super::*;
    use crate::geometry::strong_tree_check;
    use crate::stephen::expand;

    fn bicyclic_sapling() -> Sapling {
        let (a, r) = bicyclic_ray(7);
        let c = super::super::candidate_check(&a, &[set(&[r[5]])], &[set(&[r[2]])]).unwrap();
        sapling_check(&c, 3).unwrap()
    }

    #[test]
    fn bicyclic_growth_extends_ray() {
        let s = bicyclic_sapling();
        let g1 = grow(&s).unwrap();
        assert_eq!(g1.graph().vertex_count(), 11);
        assert_eq!(verify(&g1), Ok(true));
        let g3 = materialize(&s, 3).unwrap();
        assert_eq!(g3.graph().vertex_count(), 17);
        // it is a ray: exactly as exp_16(MT(1))
        let e = expand(&w("1"), &bicyclic(), 16);
        assert!(crate::graphs::rooted_iso(&g3.approx.auto, &e.auto));
        assert_eq!(g3.lineage.levels.len(), 4);
    }

    #[test]
    fn integer_growth_and_partition() {
        let z = expand(&w("a a'"), &integers(), 6);
        let g = z.graph();
        let at = |s: &str| g.read_word(z.start(), &w(s)).unwrap();
        let c = super::super::candidate_check(
            &z,
            &[set(&[at("a a a a a")]), set(&[at("a' a' a' a'")])],
            &[set(&[at("a a")]), set(&[at("a'")])],
        )
        .unwrap();
        let s = sapling_check(&c, 3).unwrap();
        let bound = width_bound(&s);
        for r in 0..4 {
            let m = materialize(&s, r).unwrap();
            assert_eq!(verify(&m), Ok(true), "stage {r}");
            assert_eq!(m.graph().vertex_count(), 14 + 6 * r);
            let blocks = tree_partition(&m);
            assert_eq!(strong_tree_check(m.graph(), &blocks, bound), Ok(true), "stage {r}");
        }
    }

    #[test]
    fn grown_words_are_accepted_by_expansion() {
        // Every word accepted by a materialised bicyclic sapling is accepted
        // by a deep enough Stephen approximation and vice versa.
        let s = materialize(&bicyclic_sapling(), 2).unwrap();
        let e = expand(&w("1"), &bicyclic(), 13);
        for u in crate::words::words_up_to(&bicyclic().alphabet, 6) {
            assert_eq!(s.approx.accepts(&u), e.accepts(&u), "{u}");
        }
    }

    #[test]
    fn nondeterministic_gluing_is_reported() {
        let (_, r) = bicyclic_ray(7);
        let mut s = bicyclic_sapling();
        // send the overlap back near the root so the copied a-edge clashes
        s.pairs[0].phi.insert(r[3], r[1]);
        assert_eq!(grow(&s).unwrap_err(), GrowError::Nondeterministic);
    }
}
