//! Dense 1-3 dimensional scalar arrays, optionally addressing a sub-block of a
//! larger allocation (e.g. the interior of an array padded with ghost cells).
//!
//! Indexing is row-major: the last axis is contiguous for a tight layout.

use crate::error::{PoissonError, Result};

pub const MAX_DIMS: usize = 3;

/// Maps a d-dimensional index onto a flat allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    dims: usize,
    extents: [usize; MAX_DIMS],
    strides: [usize; MAX_DIMS],
    offset: usize,
}

fn check_dims(extents: &[usize]) -> Result<()> {
    if extents.is_empty() || extents.len() > MAX_DIMS {
        return Err(PoissonError::InvalidLayout(format!(
            "expected 1 to {MAX_DIMS} axes, got {}",
            extents.len()
        )));
    }
    if extents.iter().any(|&e| e == 0) {
        return Err(PoissonError::InvalidLayout(format!(
            "zero extent in {extents:?}"
        )));
    }
    Ok(())
}

fn row_major_strides(extents: &[usize]) -> [usize; MAX_DIMS] {
    let mut strides = [0; MAX_DIMS];
    let mut s = 1;
    for a in (0..extents.len()).rev() {
        strides[a] = s;
        s *= extents[a];
    }
    strides
}

impl Layout {
    /// Tight row-major layout covering the whole allocation.
    pub fn contiguous(extents: &[usize]) -> Result<Self> {
        check_dims(extents)?;
        let mut e = [1; MAX_DIMS];
        e[..extents.len()].copy_from_slice(extents);
        Ok(Self {
            dims: extents.len(),
            extents: e,
            strides: row_major_strides(extents),
            offset: 0,
        })
    }

    /// Block of `extents` starting at `offsets` inside a row-major parent of `parent_extents`.
    pub fn sub_block(parent_extents: &[usize], offsets: &[usize], extents: &[usize]) -> Result<Self> {
        check_dims(parent_extents)?;
        check_dims(extents)?;
        if parent_extents.len() != extents.len() || offsets.len() != extents.len() {
            return Err(PoissonError::InvalidLayout(
                "parent extents, offsets and extents must have the same length".into(),
            ));
        }
        for a in 0..extents.len() {
            if offsets[a] + extents[a] > parent_extents[a] {
                return Err(PoissonError::InvalidLayout(format!(
                    "block {:?}+{:?} exceeds parent {:?} on axis {a}",
                    offsets, extents, parent_extents
                )));
            }
        }
        let strides = row_major_strides(parent_extents);
        let offset = (0..extents.len()).map(|a| offsets[a] * strides[a]).sum();
        let mut e = [1; MAX_DIMS];
        e[..extents.len()].copy_from_slice(extents);
        Ok(Self {
            dims: extents.len(),
            extents: e,
            strides,
            offset,
        })
    }

    /// Arbitrary strided layout. Validated against an allocation when a view is built.
    pub fn strided(extents: &[usize], strides: &[usize], offset: usize) -> Result<Self> {
        check_dims(extents)?;
        if strides.len() != extents.len() {
            return Err(PoissonError::InvalidLayout(
                "one stride per axis is required".into(),
            ));
        }
        let mut e = [1; MAX_DIMS];
        e[..extents.len()].copy_from_slice(extents);
        let mut s = [0; MAX_DIMS];
        s[..strides.len()].copy_from_slice(strides);
        let layout = Self {
            dims: extents.len(),
            extents: e,
            strides: s,
            offset,
        };
        if !layout.is_injective() {
            return Err(PoissonError::InvalidLayout(format!(
                "strides {strides:?} alias elements for extents {extents:?}"
            )));
        }
        Ok(layout)
    }

    // Sufficient condition: sorted by stride, each stride exceeds the span of the smaller axes.
    fn is_injective(&self) -> bool {
        let mut axes: Vec<usize> = (0..self.dims).filter(|&a| self.extents[a] > 1).collect();
        axes.sort_by_key(|&a| self.strides[a]);
        let mut span = 0;
        for a in axes {
            if self.strides[a] <= span {
                return false;
            }
            span += (self.extents[a] - 1) * self.strides[a];
        }
        true
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents[..self.dims]
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides[..self.dims]
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Number of addressed elements.
    pub fn len(&self) -> usize {
        self.extents().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest allocation length that contains every addressed element.
    pub fn required_len(&self) -> usize {
        self.offset
            + (0..self.dims)
                .map(|a| (self.extents[a] - 1) * self.strides[a])
                .sum::<usize>()
            + 1
    }

    pub fn is_contiguous(&self) -> bool {
        self.offset == 0 && self.strides() == &row_major_strides(self.extents())[..self.dims]
    }

    /// Flat allocation index of a d-dimensional index.
    #[inline]
    pub fn index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims);
        self.offset
            + idx
                .iter()
                .zip(&self.strides)
                .map(|(i, s)| i * s)
                .sum::<usize>()
    }

    /// Extents and strides padded to three axes by prepending unit axes.
    pub(crate) fn padded(&self) -> ([usize; MAX_DIMS], [usize; MAX_DIMS]) {
        let shift = MAX_DIMS - self.dims;
        let mut e = [1; MAX_DIMS];
        let mut s = [0; MAX_DIMS];
        for a in 0..self.dims {
            e[a + shift] = self.extents[a];
            s[a + shift] = self.strides[a];
        }
        (e, s)
    }

    /// Visits allocation indices in row-major order of the addressed block.
    pub fn for_each_flat(&self, mut f: impl FnMut(usize)) {
        let (e, s) = self.padded();
        for i in 0..e[0] {
            let bi = self.offset + i * s[0];
            for j in 0..e[1] {
                let bj = bi + j * s[1];
                for k in 0..e[2] {
                    f(bj + k * s[2]);
                }
            }
        }
    }

    fn check_alloc(&self, len: usize) -> Result<()> {
        if self.required_len() > len {
            return Err(PoissonError::InvalidLayout(format!(
                "layout needs {} elements, allocation has {len}",
                self.required_len()
            )));
        }
        Ok(())
    }
}

/// Read-only view of a field.
#[derive(Debug, Clone, Copy)]
pub struct FieldView<'a, T> {
    data: &'a [T],
    layout: &'a Layout,
}

/// Mutable view of a field.
#[derive(Debug)]
pub struct FieldViewMut<'a, T> {
    data: &'a mut [T],
    layout: &'a Layout,
}

impl<'a, T: Copy> FieldView<'a, T> {
    pub fn new(data: &'a [T], layout: &'a Layout) -> Result<Self> {
        layout.check_alloc(data.len())?;
        Ok(Self { data, layout })
    }

    pub fn layout(&self) -> &Layout {
        self.layout
    }

    pub fn extents(&self) -> &[usize] {
        self.layout.extents()
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[self.layout.index(idx)]
    }

    pub(crate) fn raw(&self) -> &'a [T] {
        self.data
    }

    /// Copies the addressed block, row-major, into `out`.
    pub fn copy_to_slice(&self, out: &mut [T]) {
        assert_eq!(out.len(), self.layout.len());
        if self.layout.is_contiguous() {
            out.copy_from_slice(&self.data[..out.len()]);
            return;
        }
        let mut n = 0;
        self.layout.for_each_flat(|f| {
            out[n] = self.data[f];
            n += 1;
        });
    }

    pub fn to_vec(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.layout.len());
        self.layout.for_each_flat(|f| v.push(self.data[f]));
        v
    }
}

impl<'a, T: Copy> FieldViewMut<'a, T> {
    pub fn new(data: &'a mut [T], layout: &'a Layout) -> Result<Self> {
        layout.check_alloc(data.len())?;
        Ok(Self { data, layout })
    }

    pub fn layout(&self) -> &Layout {
        self.layout
    }

    pub fn extents(&self) -> &[usize] {
        self.layout.extents()
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[self.layout.index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: T) {
        let f = self.layout.index(idx);
        self.data[f] = value;
    }

    pub(crate) fn raw_mut(&mut self) -> &mut [T] {
        self.data
    }

    pub fn as_view(&self) -> FieldView<'_, T> {
        FieldView {
            data: self.data,
            layout: self.layout,
        }
    }

    /// Writes a row-major block from `src` into the addressed elements.
    pub fn copy_from_slice(&mut self, src: &[T]) {
        assert_eq!(src.len(), self.layout.len());
        if self.layout.is_contiguous() {
            self.data[..src.len()].copy_from_slice(src);
            return;
        }
        let mut n = 0;
        let data = &mut *self.data;
        self.layout.for_each_flat(|f| {
            data[f] = src[n];
            n += 1;
        });
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.as_view().to_vec()
    }
}

/// Owned field: an allocation plus the layout of the addressed block.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    data: Vec<T>,
    layout: Layout,
}

impl<T: Copy + Default> Field<T> {
    pub fn zeros(extents: &[usize]) -> Result<Self> {
        let layout = Layout::contiguous(extents)?;
        Ok(Self {
            data: vec![T::default(); layout.len()],
            layout,
        })
    }

    /// Tight field filled from `f(index)`.
    pub fn from_fn(extents: &[usize], mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        let layout = Layout::contiguous(extents)?;
        let (e, _) = layout.padded();
        let shift = MAX_DIMS - layout.dims();
        let mut data = Vec::with_capacity(layout.len());
        let mut idx = [0usize; MAX_DIMS];
        for i in 0..e[0] {
            for j in 0..e[1] {
                for k in 0..e[2] {
                    idx[0] = i;
                    idx[1] = j;
                    idx[2] = k;
                    data.push(f(&idx[shift..]));
                }
            }
        }
        Ok(Self { data, layout })
    }
}

impl<T: Copy> Field<T> {
    pub fn from_vec(extents: &[usize], data: Vec<T>) -> Result<Self> {
        let layout = Layout::contiguous(extents)?;
        if data.len() != layout.len() {
            return Err(PoissonError::InvalidLayout(format!(
                "{} values do not fill extents {extents:?}",
                data.len()
            )));
        }
        Ok(Self { data, layout })
    }

    /// Wraps an allocation whose addressed block is described by `layout`.
    pub fn with_layout(data: Vec<T>, layout: Layout) -> Result<Self> {
        layout.check_alloc(data.len())?;
        Ok(Self { data, layout })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn extents(&self) -> &[usize] {
        self.layout.extents()
    }

    /// The whole allocation, including elements outside the addressed block.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[self.layout.index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: T) {
        let f = self.layout.index(idx);
        self.data[f] = value;
    }

    pub fn view(&self) -> FieldView<'_, T> {
        FieldView {
            data: &self.data,
            layout: &self.layout,
        }
    }

    pub fn view_mut(&mut self) -> FieldViewMut<'_, T> {
        FieldViewMut {
            data: &mut self.data,
            layout: &self.layout,
        }
    }

    /// Addressed block as a tight row-major vector.
    pub fn to_vec(&self) -> Vec<T> {
        self.view().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_layout_covers_allocation() {
        let l = Layout::contiguous(&[2, 3, 4]).unwrap();
        assert_eq!(l.strides(), &[12, 4, 1]);
        assert_eq!(l.required_len(), 24);
        assert!(l.is_contiguous());
        let mut seen = Vec::new();
        l.for_each_flat(|f| seen.push(f));
        assert_eq!(seen, (0..24).collect::<Vec<_>>());
    }

    #[test]
    fn sub_block_leaves_ghosts_untouched() {
        let sentinel = -999.0;
        let parent = [6, 7];
        let layout = Layout::sub_block(&parent, &[1, 2], &[4, 3]).unwrap();
        let mut data = vec![sentinel; 42];
        let mut f = FieldViewMut::new(&mut data, &layout).unwrap();
        let block: Vec<f64> = (0..12).map(|v| v as f64).collect();
        f.copy_from_slice(&block);
        assert_eq!(f.to_vec(), block);
        assert_eq!(f.get(&[0, 0]), 0.0);
        assert_eq!(f.get(&[3, 2]), 11.0);
        let touched = data.iter().filter(|&&v| v != sentinel).count();
        assert_eq!(touched, 12);
        for i in 0..6 {
            for j in 0..7 {
                let inside = (1..5).contains(&i) && (2..5).contains(&j);
                assert_eq!(data[i * 7 + j] != sentinel, inside, "({i},{j})");
            }
        }
    }

    #[test]
    fn rejects_out_of_bounds() {
        assert!(Layout::sub_block(&[4, 4], &[2, 0], &[3, 4]).is_err());
        assert!(Layout::contiguous(&[]).is_err());
        assert!(Layout::contiguous(&[2, 2, 2, 2]).is_err());
        assert!(Layout::contiguous(&[3, 0]).is_err());
        let l = Layout::contiguous(&[3, 3]).unwrap();
        let d = vec![0.0; 8];
        assert!(FieldView::new(&d, &l).is_err());
        assert!(Layout::strided(&[3, 3], &[1, 1], 0).is_err());
        assert!(Layout::strided(&[3, 3], &[1, 3], 0).is_ok());
    }

    #[test]
    fn from_fn_is_row_major() {
        let f = Field::from_fn(&[2, 3], |i| (i[0] * 10 + i[1]) as f64).unwrap();
        assert_eq!(f.as_slice(), &[0.0, 1.0, 2.0, 10.0, 11.0, 12.0]);
        assert_eq!(f.get(&[1, 2]), 12.0);
    }
}
