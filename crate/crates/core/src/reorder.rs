//! Gathers the lines along one axis of a field into a contiguous buffer and
//! scatters them back, with cache-blocked (tiled) loops.
//!
//! Buffer layout: lines are ordered row-major over the remaining axes, and
//! each line of length `extent[axis]` is contiguous. This is pure data
//! movement; `scatter_lines(gather_lines(f)) == f` bit for bit.

use crate::error::{PoissonError, Result};
use crate::field::{FieldView, FieldViewMut, Layout, MAX_DIMS};

pub const DEFAULT_TILE: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReorderPlan {
    extents: [usize; MAX_DIMS],
    strides: [usize; MAX_DIMS],
    offset: usize,
    // axes of the padded 3D view: outer, middle (both non-target), target
    outer: usize,
    middle: usize,
    target: usize,
    axis: usize,
    tile: usize,
}

impl ReorderPlan {
    pub fn new(layout: &Layout, axis: usize) -> Result<Self> {
        Self::with_tile(layout, axis, DEFAULT_TILE)
    }

    pub fn with_tile(layout: &Layout, axis: usize, tile: usize) -> Result<Self> {
        if axis >= layout.dims() {
            return Err(PoissonError::InvalidArgument(format!(
                "axis {axis} out of range for {} dimensions",
                layout.dims()
            )));
        }
        if tile == 0 {
            return Err(PoissonError::InvalidArgument("tile size must be positive".into()));
        }
        let (extents, strides) = layout.padded();
        let target = axis + MAX_DIMS - layout.dims();
        let others: Vec<usize> = (0..MAX_DIMS).filter(|&a| a != target).collect();
        Ok(Self {
            extents,
            strides,
            offset: layout.offset(),
            outer: others[0],
            middle: others[1],
            target,
            axis,
            tile,
        })
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn tile(&self) -> usize {
        self.tile
    }

    pub fn line_len(&self) -> usize {
        self.extents[self.target]
    }

    pub fn num_lines(&self) -> usize {
        self.extents[self.outer] * self.extents[self.middle]
    }

    pub fn buffer_len(&self) -> usize {
        self.line_len() * self.num_lines()
    }

    fn check(&self, layout: &Layout, buffer_len: usize) -> Result<()> {
        let (e, s) = layout.padded();
        if e != self.extents || s != self.strides || layout.offset() != self.offset {
            return Err(PoissonError::InvalidLayout(
                "field layout differs from the reorder plan".into(),
            ));
        }
        if buffer_len != self.buffer_len() {
            return Err(PoissonError::LengthMismatch {
                expected: self.buffer_len(),
                found: buffer_len,
            });
        }
        Ok(())
    }

    // Calls f(field_index, buffer_index) in tiled order.
    #[inline]
    fn walk(&self, mut f: impl FnMut(usize, usize)) {
        let (no, nm, nt) = (
            self.extents[self.outer],
            self.extents[self.middle],
            self.extents[self.target],
        );
        let (so, sm, st) = (
            self.strides[self.outer],
            self.strides[self.middle],
            self.strides[self.target],
        );
        let tile = self.tile;
        for io in 0..no {
            let fo = self.offset + io * so;
            let bo = io * nm * nt;
            for mb in (0..nm).step_by(tile) {
                let me = (mb + tile).min(nm);
                for tb in (0..nt).step_by(tile) {
                    let te = (tb + tile).min(nt);
                    for im in mb..me {
                        let fm = fo + im * sm;
                        let bm = bo + im * nt;
                        for it in tb..te {
                            f(fm + it * st, bm + it);
                        }
                    }
                }
            }
        }
    }
}

/// Copies every line along the plan's axis into `buffer`, contiguously.
pub fn gather_lines<T: Copy>(plan: &ReorderPlan, field: &FieldView<'_, T>, buffer: &mut [T]) -> Result<()> {
    plan.check(field.layout(), buffer.len())?;
    let src = field.raw();
    plan.walk(|f, b| buffer[b] = src[f]);
    Ok(())
}

/// Inverse of [`gather_lines`].
pub fn scatter_lines<T: Copy>(plan: &ReorderPlan, buffer: &[T], field: &mut FieldViewMut<'_, T>) -> Result<()> {
    plan.check(field.layout(), buffer.len())?;
    let dst = field.raw_mut();
    plan.walk(|f, b| dst[f] = buffer[b]);
    Ok(())
}

/// Slice-level variants used by the solver on its own contiguous work arrays.
pub(crate) fn gather_slice<T: Copy>(plan: &ReorderPlan, src: &[T], buffer: &mut [T]) {
    debug_assert_eq!(buffer.len(), plan.buffer_len());
    plan.walk(|f, b| buffer[b] = src[f]);
}

pub(crate) fn scatter_slice<T: Copy>(plan: &ReorderPlan, buffer: &[T], dst: &mut [T]) {
    debug_assert_eq!(buffer.len(), plan.buffer_len());
    plan.walk(|f, b| dst[f] = buffer[b]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn two_by_three_transpose() {
        let f = Field::from_vec(&[2, 3], vec![1, 2, 3, 4, 5, 6]).unwrap();
        let plan = ReorderPlan::new(f.layout(), 0).unwrap();
        let mut buf = vec![0; 6];
        gather_lines(&plan, &f.view(), &mut buf).unwrap();
        assert_eq!(buf, vec![1, 4, 2, 5, 3, 6]);
        let plan = ReorderPlan::new(f.layout(), 1).unwrap();
        gather_lines(&plan, &f.view(), &mut buf).unwrap();
        assert_eq!(buf, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn middle_axis_of_3d() {
        let f = Field::from_fn(&[2, 3, 4], |i| i[0] * 100 + i[1] * 10 + i[2]).unwrap();
        let plan = ReorderPlan::with_tile(f.layout(), 1, 2).unwrap();
        let mut buf = vec![0; 24];
        gather_lines(&plan, &f.view(), &mut buf).unwrap();
        // line (i, k) holds j = 0..3
        assert_eq!(&buf[..3], &[0, 10, 20]);
        assert_eq!(&buf[3..6], &[1, 11, 21]);
        assert_eq!(&buf[12..15], &[100, 110, 120]);
    }

    #[test]
    fn sub_block_gathers_like_tight_array() {
        let extents = [3, 4];
        let tight = Field::from_fn(&extents, |i| (i[0] * 4 + i[1]) as f64).unwrap();
        let layout = Layout::sub_block(&[5, 7], &[1, 2], &extents).unwrap();
        let mut parent = Field::with_layout(vec![f64::NAN; 35], layout).unwrap();
        parent.view_mut().copy_from_slice(&tight.to_vec());
        for axis in 0..2 {
            let a = ReorderPlan::new(tight.layout(), axis).unwrap();
            let b = ReorderPlan::new(parent.layout(), axis).unwrap();
            let mut ba = vec![0.0; 12];
            let mut bb = vec![0.0; 12];
            gather_lines(&a, &tight.view(), &mut ba).unwrap();
            gather_lines(&b, &parent.view(), &mut bb).unwrap();
            assert_eq!(ba, bb);
        }
    }

    #[test]
    fn rejects_mismatched_buffers() {
        let f = Field::<f64>::zeros(&[4, 4]).unwrap();
        let plan = ReorderPlan::new(f.layout(), 0).unwrap();
        let mut buf = vec![0.0; 15];
        assert!(gather_lines(&plan, &f.view(), &mut buf).is_err());
        let g = Field::<f64>::zeros(&[4, 5]).unwrap();
        let mut buf = vec![0.0; 20];
        assert!(gather_lines(&plan, &g.view(), &mut buf).is_err());
        assert!(ReorderPlan::new(f.layout(), 2).is_err());
        assert!(ReorderPlan::with_tile(f.layout(), 0, 0).is_err());
    }
}
