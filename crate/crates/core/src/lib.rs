//! Construction and verification of nested block designs.
//!
//! The crate covers four connected problems:
//!
//! * verifying BIBDs, packings and nestings, together with the equivalence
//!   between nestings and harmonious colorings of the Levi graph
//!   ([`designs`]);
//! * difference families over finite abelian groups and their Banff
//!   refinement ([`groups`], [`diff_families`]);
//! * choosing pairwise disjoint representatives from the block orbits of a
//!   cyclic BIBD ([`cyclic`]);
//! * the auxiliary bipartite hypergraphs whose `A`-perfect matchings encode
//!   all of the above, and solvers for those matchings ([`hypergraph`],
//!   [`matching`]).
//!
//! The [`cli`] module wires everything into the `nestkit` command line tool.

pub mod cli;
pub mod cyclic;
pub mod designs;
pub mod diff_families;
pub mod groups;
pub mod hypergraph;
pub mod matching;
