//! Big integers serialize as decimal strings so JSON consumers never lose digits.

use num_bigint::BigInt;
use serde::ser::SerializeSeq;
use serde::Serializer;

pub(crate) fn big<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub(crate) fn big_vec<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}
