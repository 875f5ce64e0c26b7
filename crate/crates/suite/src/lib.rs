//! Holds the `acceptance` test target; the criteria live in `virial_core::acceptance`.
