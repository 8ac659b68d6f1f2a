//! Nets shipped with the crate, in the text format of [`crate::interface::dsl`].

use crate::interface::dsl::{parse_net, ParseError};
use crate::model::{Marking, Net};

pub const CATALYSIS: &str = include_str!("../nets/catalysis.rpn");
pub const BACKTRACK: &str = include_str!("../nets/backtrack.rpn");
pub const CAUSAL: &str = include_str!("../nets/causal.rpn");
pub const OUT_OF_ORDER: &str = include_str!("../nets/out_of_order.rpn");
pub const TRANSACTION: &str = include_str!("../nets/transaction.rpn");

/// Every bundled net as `(name, source)`.
pub const ALL: [(&str, &str); 5] = [
    ("catalysis", CATALYSIS),
    ("backtrack", BACKTRACK),
    ("causal", CAUSAL),
    ("out_of_order", OUT_OF_ORDER),
    ("transaction", TRANSACTION),
];

/// Parses a bundled net by name.
pub fn load(name: &str) -> Option<Result<(Net, Marking), ParseError>> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, src)| parse_net(src))
}
