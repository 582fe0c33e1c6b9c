use super::rotation::view_rotation;
use super::{bin, require_local, BitVector, DescriptorKind, DescriptorParams, Feature};
use crate::error::Result;
use crate::patch::LocalPatch;

/// Occupied cells that have at least one occupied 8-neighbor.
pub(crate) fn connected_silhouette(occupied: &[bool], n: usize) -> Vec<bool> {
    let at = |i: isize, j: isize| -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < n
            && (j as usize) < n
            && occupied[i as usize * n + j as usize]
    };
    (0..n * n)
        .map(|c| {
            let (i, j) = ((c / n) as isize, (c % n) as isize);
            occupied[c]
                && (-1..=1).any(|di| (-1..=1).any(|dj| (di, dj) != (0, 0) && at(i + di, j + dj)))
        })
        .collect()
}

/// Multi-view silhouette bits.
///
/// Views are the same rotations as RCS; each projection onto the xy-plane is
/// rasterized over `[−R, R]²` (row = y, column = x) and isolated cells are
/// dropped.
pub fn describe_rsm(patch: &LocalPatch, params: &DescriptorParams) -> Result<Feature> {
    require_local(patch)?;
    let n = params.rsm_divisions;
    let r = patch.support_radius;
    let mut bits = BitVector::zeros(DescriptorKind::Rsm.dimension(params));
    for k in 0..params.rsm_rotations {
        let rot = view_rotation(k, params.rsm_rotations);
        let mut occupied = vec![false; n * n];
        for q in &patch.points {
            let p = rot * q;
            occupied[bin(p.y, -r, r, n) * n + bin(p.x, -r, r, n)] = true;
        }
        for (c, on) in connected_silhouette(&occupied, n).into_iter().enumerate() {
            if on {
                bits.set(k * n * n + c);
            }
        }
    }
    Ok(Feature::bits(DescriptorKind::Rsm, bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolated_cell_is_dropped() {
        let n = 5;
        let mut occ = vec![false; n * n];
        occ[0] = true;
        occ[12] = true;
        occ[18] = true;
        let s = connected_silhouette(&occ, n);
        assert!(!s[0]);
        assert!(s[12] && s[18]);
    }
}
