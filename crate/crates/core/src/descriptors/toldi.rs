use super::{bin, require_local, DescriptorKind, DescriptorParams, Feature};
use crate::error::Result;
use crate::patch::LocalPatch;

/// `(u, v, depth)` coordinate indices of the xy, yz and xz local depth images.
const VIEWS: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (0, 2, 1)];

/// Three orthogonal local depth images.
///
/// Each cell stores the smallest signed distance of its points to the
/// projection plane, mapped by `(s + R) / 2R` into `[0, 1]`; cells no point
/// falls into hold 1.
pub fn describe_toldi(patch: &LocalPatch, params: &DescriptorParams) -> Result<Feature> {
    require_local(patch)?;
    let n = params.toldi_divisions;
    let r = patch.support_radius;
    let mut out = Vec::with_capacity(DescriptorKind::Toldi.dimension(params));
    for (u, v, depth) in VIEWS {
        let mut cells = vec![f64::INFINITY; n * n];
        for q in &patch.points {
            let c = bin(q[v], -r, r, n) * n + bin(q[u], -r, r, n);
            cells[c] = cells[c].min(q[depth]);
        }
        out.extend(cells.into_iter().map(|s| {
            if s.is_finite() {
                ((s + r) / (2.0 * r)).clamp(0.0, 1.0)
            } else {
                1.0
            }
        }));
    }
    Ok(Feature::real(DescriptorKind::Toldi, out))
}
