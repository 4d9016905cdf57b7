use std::collections::HashMap;
use std::sync::Arc;

use super::{FacetTag, Mesh, NO_CELL};
use crate::{Error, Result};

/// Role of a facet of the correction subdomain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubFacetKind {
    Interior,
    Fault,
    /// Fault-parallel side on the `-n` side of the fault (x = x_f - L_s).
    FluxPlus,
    /// Fault-parallel side on the `+n` side of the fault (x = x_f + L_s).
    FluxMinus,
    /// Remaining boundary, where the outer pressure trace is imposed.
    DirichletOther,
}

/// The subdomain cells of a parent mesh as a mesh of their own.
#[derive(Debug)]
pub struct SubMesh {
    pub mesh: Arc<Mesh>,
    pub cell_parent: Vec<usize>,
    pub facet_parent: Vec<usize>,
    pub vertex_parent: Vec<usize>,
    pub facet_kind: Vec<SubFacetKind>,
    parent_cell_child: HashMap<usize, usize>,
}

impl SubMesh {
    /// Sub-mesh cell corresponding to a parent cell, if it is inside.
    pub fn child_of(&self, parent_cell: usize) -> Option<usize> {
        self.parent_cell_child.get(&parent_cell).copied()
    }

    pub fn flux_facets(&self) -> impl Iterator<Item = usize> + '_ {
        self.facet_kind
            .iter()
            .enumerate()
            .filter(|(_, k)| matches!(k, SubFacetKind::FluxPlus | SubFacetKind::FluxMinus))
            .map(|(f, _)| f)
    }
}

/// Restricts `mesh` to its inside-subdomain cells.
pub fn extract_subdomain(mesh: &Mesh) -> Result<SubMesh> {
    if mesh.dim() == 1 {
        return Err(Error::SubdomainIn1d);
    }
    let sbox = *mesh.subdomain_box().ok_or(Error::EmptySubdomain)?;
    let cell_parent: Vec<usize> = (0..mesh.n_cells()).filter(|&c| mesh.in_subdomain(c)).collect();
    if cell_parent.is_empty() {
        return Err(Error::EmptySubdomain);
    }

    let mut vertex_child: HashMap<usize, usize> = HashMap::new();
    let mut vertex_parent = Vec::new();
    let mut cells = Vec::with_capacity(cell_parent.len() * 3);
    for &pc in &cell_parent {
        for &v in mesh.cell_vertices(pc) {
            let child = *vertex_child.entry(v).or_insert_with(|| {
                vertex_parent.push(v);
                vertex_parent.len() - 1
            });
            cells.push(child);
        }
    }
    let vertices = vertex_parent.iter().map(|&v| mesh.vertex(v)).collect();

    let mut parent_facet_by_key: HashMap<[usize; 2], usize> = HashMap::new();
    for &pc in &cell_parent {
        for &f in mesh.cell_facets(pc) {
            let fv = mesh.facet_vertices(f);
            let mut key = [fv[0], fv[1]];
            key.sort_unstable();
            parent_facet_by_key.insert(key, f);
        }
    }

    let x_f = mesh.fault().normal_coord;
    let sub = Mesh::from_cells(
        2,
        vertices,
        cells,
        *mesh.fault(),
        mesh.sizes(),
        Some(sbox),
        |pts, boundary| {
            let (a, b) = (pts[0], pts[1]);
            if boundary {
                if a[0] == b[0] && (a[0] == sbox.x.0 || a[0] == sbox.x.1) {
                    FacetTag::Neumann
                } else {
                    FacetTag::Dirichlet(u8::MAX)
                }
            } else {
                // fault facets are resolved against the parent tags below
                FacetTag::Interior
            }
        },
        |_| true,
    )?;

    let mut facet_parent = Vec::with_capacity(sub.n_facets());
    let mut facet_kind = Vec::with_capacity(sub.n_facets());
    for f in 0..sub.n_facets() {
        let fv = sub.facet_vertices(f);
        let mut key = [vertex_parent[fv[0]], vertex_parent[fv[1]]];
        key.sort_unstable();
        let pf = parent_facet_by_key[&key];
        facet_parent.push(pf);
        let boundary = sub.facet_cells(f)[1] == NO_CELL;
        let kind = if boundary {
            let m = sub.facet_midpoint(f);
            match sub.facet_tag(f) {
                FacetTag::Neumann if m[0] < x_f => SubFacetKind::FluxPlus,
                FacetTag::Neumann => SubFacetKind::FluxMinus,
                _ => SubFacetKind::DirichletOther,
            }
        } else if mesh.facet_tag(pf) == FacetTag::Fault {
            SubFacetKind::Fault
        } else {
            SubFacetKind::Interior
        };
        facet_kind.push(kind);
    }
    let mut sub = sub;
    for (f, k) in facet_kind.iter().enumerate() {
        if *k == SubFacetKind::Fault {
            sub.facet_tags[f] = FacetTag::Fault;
        }
    }

    let parent_cell_child = cell_parent.iter().enumerate().map(|(c, &p)| (p, c)).collect();
    Ok(SubMesh { mesh: Arc::new(sub), cell_parent, facet_parent, vertex_parent, facet_kind, parent_cell_child })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_interval_mesh, generate_rect_mesh, FaultGeometry, RectDomain};
    use std::collections::HashSet;

    fn parent() -> Mesh {
        let fault = FaultGeometry::segment(1.0, 0.3, 0.7, 2.0).unwrap();
        generate_rect_mesh(RectDomain { lx: 2.0, ly: 1.0 }, fault, 0.1, 0.04, 0.2).unwrap()
    }

    #[test]
    fn cell_count_and_round_trip() {
        let m = parent();
        let s = extract_subdomain(&m).unwrap();
        let inside = (0..m.n_cells()).filter(|&c| m.in_subdomain(c)).count();
        assert_eq!(s.mesh.n_cells(), inside);
        for (c, &p) in s.cell_parent.iter().enumerate() {
            assert_eq!(s.child_of(p), Some(c));
        }
        let uniq: HashSet<_> = s.facet_parent.iter().collect();
        assert_eq!(uniq.len(), s.facet_parent.len());
        let uniq: HashSet<_> = s.vertex_parent.iter().collect();
        assert_eq!(uniq.len(), s.vertex_parent.len());
    }

    #[test]
    fn fault_facets_carried_over() {
        let m = parent();
        let s = extract_subdomain(&m).unwrap();
        let parent_fault: HashSet<usize> = m.fault_facets().into_iter().collect();
        let child_fault: HashSet<usize> = s.mesh.fault_facets().iter().map(|&f| s.facet_parent[f]).collect();
        assert_eq!(parent_fault, child_fault);
    }

    #[test]
    fn flux_sides_by_position() {
        let m = parent();
        let s = extract_subdomain(&m).unwrap();
        let sb = *m.subdomain_box().unwrap();
        for f in 0..s.mesh.n_facets() {
            let fv = s.mesh.facet_vertices(f);
            let (a, b) = (s.mesh.vertex(fv[0]), s.mesh.vertex(fv[1]));
            match s.facet_kind[f] {
                SubFacetKind::FluxPlus => assert!(a[0] == sb.x.0 && b[0] == sb.x.0),
                SubFacetKind::FluxMinus => assert!(a[0] == sb.x.1 && b[0] == sb.x.1),
                SubFacetKind::DirichletOther => assert!(a[1] == b[1] && (a[1] == sb.y.0 || a[1] == sb.y.1)),
                _ => {}
            }
        }
        assert!(s.flux_facets().count() > 0);
    }

    #[test]
    fn interval_mesh_has_no_subdomain() {
        let m = generate_interval_mesh(10.0, 10, FaultGeometry::point(5.0, 0.2).unwrap()).unwrap();
        assert!(matches!(extract_subdomain(&m), Err(Error::SubdomainIn1d)));
    }
}
