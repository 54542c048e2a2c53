//! Canonical index elements and their string codec.
//!
//! Every directed-set instance in this crate indexes its members with
//! [`Element`] values. The codec is the canonical encoding used in logs and
//! JSON reports: naturals as decimal, tuples as `(a,b)`, finite sets as
//! sorted `{a,b}`. Structural equality coincides with encoding equality.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Nat(u64),
    Tuple(Vec<Element>),
    Set(BTreeSet<u64>),
}

impl Element {
    pub fn nat(n: u64) -> Self {
        Element::Nat(n)
    }

    pub fn pair(a: Element, b: Element) -> Self {
        Element::Tuple(vec![a, b])
    }

    pub fn tuple(items: Vec<Element>) -> Self {
        Element::Tuple(items)
    }

    pub fn set<I: IntoIterator<Item = u64>>(items: I) -> Self {
        Element::Set(items.into_iter().collect())
    }

    /// Canonical UTF-8 encoding.
    pub fn encode(&self) -> String {
        self.to_string()
    }

    /// Inverse of [`Element::encode`].
    pub fn decode(s: &str) -> Result<Element, Error> {
        s.parse()
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Element::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Element]> {
        match self {
            Element::Tuple(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<u64>> {
        match self {
            Element::Set(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Nat(n) => write!(f, "{n}"),
            Element::Tuple(items) => {
                write!(f, "(")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
            Element::Set(s) => {
                write!(f, "{{")?;
                for (i, n) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{n}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

impl FromStr for Element {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let (e, used) = parse_element(bytes, 0).ok_or_else(|| Error::Parse(s.to_string()))?;
        if used != bytes.len() {
            return Err(Error::Parse(s.to_string()));
        }
        Ok(e)
    }
}

fn parse_nat(bytes: &[u8], mut pos: usize) -> Option<(u64, usize)> {
    let start = pos;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    if pos == start {
        return None;
    }
    // reject leading zeros: they would break encode/decode bijectivity
    if pos - start > 1 && bytes[start] == b'0' {
        return None;
    }
    let n = std::str::from_utf8(&bytes[start..pos]).ok()?.parse().ok()?;
    Some((n, pos))
}

fn parse_element(bytes: &[u8], pos: usize) -> Option<(Element, usize)> {
    match bytes.get(pos)? {
        b'(' => {
            let mut items = Vec::new();
            let mut p = pos + 1;
            loop {
                let (e, next) = parse_element(bytes, p)?;
                items.push(e);
                p = next;
                match bytes.get(p)? {
                    b',' => p += 1,
                    b')' => return Some((Element::Tuple(items), p + 1)),
                    _ => return None,
                }
            }
        }
        b'{' => {
            let mut items = BTreeSet::new();
            let mut p = pos + 1;
            if bytes.get(p) == Some(&b'}') {
                return Some((Element::Set(items), p + 1));
            }
            loop {
                let (n, next) = parse_nat(bytes, p)?;
                // require strictly ascending entries (canonical sorted form)
                if let Some(&last) = items.iter().next_back() {
                    if n <= last {
                        return None;
                    }
                }
                items.insert(n);
                p = next;
                match bytes.get(p)? {
                    b',' => p += 1,
                    b'}' => return Some((Element::Set(items), p + 1)),
                    _ => return None,
                }
            }
        }
        _ => {
            let (n, next) = parse_nat(bytes, pos)?;
            Some((Element::Nat(n), next))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn encodings_match_spec_forms() {
        assert_eq!(Element::nat(3).encode(), "3");
        assert_eq!(
            Element::pair(Element::nat(2), Element::nat(7)).encode(),
            "(2,7)"
        );
        assert_eq!(Element::set([2, 1]).encode(), "{1,2}");
        assert_eq!(
            Element::tuple(vec![
                Element::pair(Element::nat(1), Element::nat(2)),
                Element::nat(3)
            ])
            .encode(),
            "((1,2),3)"
        );
    }

    #[test]
    fn decode_rejects_garbage() {
        assert!(Element::decode("").is_err());
        assert!(Element::decode("(1,").is_err());
        assert!(Element::decode("01").is_err());
        assert!(Element::decode("{2,1}").is_err());
        assert!(Element::decode("3x").is_err());
    }

    fn arb_element() -> impl Strategy<Value = Element> {
        let leaf = prop_oneof![
            (0u64..1_000_000).prop_map(Element::Nat),
            proptest::collection::btree_set(0u64..50, 0..5).prop_map(Element::Set),
        ];
        leaf.prop_recursive(3, 16, 4, |inner| {
            proptest::collection::vec(inner, 1..4).prop_map(Element::Tuple)
        })
    }

    proptest! {
        #[test]
        fn codec_roundtrip(e in arb_element()) {
            let s = e.encode();
            prop_assert_eq!(Element::decode(&s).unwrap(), e);
        }

        #[test]
        fn equal_encodings_iff_equal(a in arb_element(), b in arb_element()) {
            prop_assert_eq!(a.encode() == b.encode(), a == b);
        }
    }
}
