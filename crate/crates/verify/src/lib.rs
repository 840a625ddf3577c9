//! Holds the `acceptance` test target: `cargo test -p segangle-verify --test acceptance`.
