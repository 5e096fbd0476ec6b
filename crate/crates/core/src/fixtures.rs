//! Bundled example inputs.

use crate::navgraph::{parse_edge_list, Multidigraph};
use crate::scalar::Weight;

/// Eight-link example digraph whose optimal postman tour splits into
/// `E1·E3·E4·E5 + E1·E7 + E1·E2·E6 + E0`. Page names are placeholders.
pub const FIGURE1_EDGES: &str = include_str!("../fixtures/figure1.edges");

/// Login page leading to a welcome page, in the XML navigation format.
pub const WEBADMIN_XML: &str = include_str!("../fixtures/webadmin.xml");

/// Five-state invoice application in the graph DSL.
pub const INVOICES_NAV: &str = include_str!("../fixtures/invoices.nav");

/// Two faults of each kind for [`INVOICES_NAV`].
pub const INVOICES_FAULTS: &str = include_str!("../fixtures/invoices.faults");

/// Two recorded scripts sharing their first two rows.
pub const SCRIPT_SEARCH_HTML: &str = include_str!("../fixtures/scripts/search.html");
pub const SCRIPT_PROFILE_HTML: &str = include_str!("../fixtures/scripts/profile.html");

pub fn figure1<W: Weight>() -> Multidigraph<W> {
    parse_edge_list(FIGURE1_EDGES).expect("bundled fixture is valid")
}
