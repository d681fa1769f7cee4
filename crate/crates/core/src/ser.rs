//! Serde helpers: exact numbers go out as strings so no JSON consumer ever
//! rounds them through a float.

use num_bigint::BigInt;
use serde::ser::SerializeSeq;
use serde::Serializer;

use crate::ratlin::{fmt_rational, Rational};

pub fn rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

pub fn rationals<S: Serializer>(rs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(rs.len()))?;
    for r in rs {
        seq.serialize_element(&fmt_rational(r))?;
    }
    seq.end()
}

pub fn bigint<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

pub fn bigints<S: Serializer>(ns: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(ns.len()))?;
    for n in ns {
        seq.serialize_element(&n.to_string())?;
    }
    seq.end()
}
