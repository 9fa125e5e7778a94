//! Serialization helpers: big integers always travel as decimal strings.

use num_bigint::BigUint;

pub(crate) fn biguint<S: serde::Serializer>(
    v: &BigUint,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

pub(crate) fn opt_biguint<S: serde::Serializer>(
    v: &Option<BigUint>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_str_radix(10)),
        None => s.serialize_none(),
    }
}
