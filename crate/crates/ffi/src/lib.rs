pub fn ffi_placeholder() {}
