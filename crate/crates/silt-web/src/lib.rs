//! Browser bindings (placeholder).
