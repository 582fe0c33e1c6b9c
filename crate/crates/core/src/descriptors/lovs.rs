use super::{bin, require_local, BitVector, DescriptorKind, DescriptorParams, Feature};
use crate::error::Result;
use crate::patch::LocalPatch;

/// Voxel occupancy bits over the bounding cube, x-fastest then y then z.
pub fn describe_lovs(patch: &LocalPatch, params: &DescriptorParams) -> Result<Feature> {
    require_local(patch)?;
    let n = params.lovs_divisions;
    let h = patch.half_edge();
    let mut bits = BitVector::zeros(DescriptorKind::Lovs.dimension(params));
    for q in patch.points.iter().filter(|q| q.amax() <= h) {
        let [x, y, z] = [0, 1, 2].map(|a| bin(q[a], -h, h, n));
        bits.set((z * n + y) * n + x);
    }
    Ok(Feature::bits(DescriptorKind::Lovs, bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patch::{cube_half_edge, Frame, PatchShape};
    use crate::Vec3;

    fn cube(points: Vec<Vec3>, r: f64) -> LocalPatch {
        LocalPatch {
            keypoint: Vec3::zeros(),
            indices: (0..points.len()).collect(),
            points,
            normals: None,
            frame: Frame::Local,
            shape: PatchShape::Cube,
            support_radius: r,
        }
    }

    #[test]
    fn keypoint_sets_the_center_voxel() {
        let f = describe_lovs(
            &cube(vec![Vec3::zeros()], 1.0),
            &DescriptorParams::default(),
        )
        .unwrap();
        let b = f.as_bits().unwrap();
        assert_eq!(b.len(), 729);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![(4 * 9 + 4) * 9 + 4]);
    }

    #[test]
    fn empty_patch_is_all_zero() {
        let f = describe_lovs(&cube(vec![], 1.0), &DescriptorParams::default()).unwrap();
        assert_eq!(f.as_bits().unwrap().count_ones(), 0);
    }

    #[test]
    fn dense_cube_sets_every_bit() {
        let r = 2.0;
        let h = cube_half_edge(r);
        let m = 27;
        let mut pts = Vec::new();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let c = |t: usize| -h + (t as f64 + 0.5) * 2.0 * h / m as f64;
                    pts.push(Vec3::new(c(i), c(j), c(k)));
                }
            }
        }
        let f = describe_lovs(&cube(pts, r), &DescriptorParams::default()).unwrap();
        assert_eq!(f.as_bits().unwrap().count_ones(), 729);
    }
}
