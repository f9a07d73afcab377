//! Read-prefetch hint. A no-op unless the `prefetch` feature is on and the
//! target has a prefetch instruction; search results never depend on it.

#[inline(always)]
pub(crate) fn prefetch_at(data: &[u64], index: usize) {
    #[cfg(all(feature = "prefetch", target_arch = "x86_64"))]
    {
        use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
        // prefetch never faults, so an address past the end is harmless; the
        // pointer is only formed with wrapping arithmetic and never read
        let p = data.as_ptr().wrapping_add(index) as *const i8;
        #[allow(unused_unsafe)]
        unsafe {
            _mm_prefetch::<_MM_HINT_T0>(p)
        };
    }
    #[cfg(not(all(feature = "prefetch", target_arch = "x86_64")))]
    {
        let _ = (data, index);
    }
}
