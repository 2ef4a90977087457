use poisson_bench::reorder_seconds_per_element;

// Reordering is O(N): per-element cost may not grow by more than 2x while the
// field grows 16x.
#[test]
fn reorder_cost_grows_linearly() {
    for (small, large, axis) in [(vec![256, 256], vec![1024, 1024], 0), (vec![16, 16, 16], vec![16, 64, 64], 1)] {
        let a = reorder_seconds_per_element(&small, axis, 31);
        let b = reorder_seconds_per_element(&large, axis, 9);
        let ratio = b / a;
        println!("{small:?} -> {large:?} axis {axis}: per-element ratio {ratio:.2}");
        assert!(ratio <= 2.0, "{small:?} -> {large:?}: per-element ratio {ratio:.2}");
    }
}
