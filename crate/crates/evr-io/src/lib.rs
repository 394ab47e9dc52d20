//! Reading and writing instances, and producing synthetic ones.
//!
//! Instance text format, one record per line, `#` starts a comment line:
//!
//! ```text
//! ev <n> <m> <k> <capacity_wh>
//! a <tail> <head> <drive_s> <cons_wh>                      (m lines)
//! s <vertex> <init_s> swap                                  (k station lines
//! s <vertex> <init_s> curve <p> <t1> <b1> ... <tp> <bp>      in any of these
//! s <vertex> type <SWAP|SUPER|KW44|KW22|KW11>                forms)
//! ```
//!
//! Query files hold lines `q <s> <t> <soc_wh>`. Decimals are written with
//! six fractional digits.

mod format;
mod generate;
mod library;
mod rank;
mod scenario;

pub use format::{
    parse_instance, parse_queries, render_queries, Instance, InstanceError, ParseError, Query,
    StationSpec, VehicleParams,
};
pub use generate::{generate_synthetic, GenParams};
pub use library::{StationType, ALL_TYPES};
pub use rank::{dijkstra_order, generate_rank_queries, random_queries, RankError, RankQuery};
pub use scenario::{apportion, assign_scenario, Scenario};
