//! Amnesiac Flooding laboratory.
//!
//! * [`graph`]: graphs, gadgets, cycle/FEC enumeration and structural queries.
//! * [`engine`]: the flooding operator, traces and reverse-time replay.
//! * [`balance`]: the balance condition that decides termination.
//! * [`variants`]: Parrot, 1-Bit, Neighbourhood-2 and Random Flooding.
//! * [`faults`]: message drops, link failures and weak-Byzantine adversaries.
//! * [`protosearch`]: explicit protocol tables and exhaustive search over them.
//! * [`suites`]: batch checks of the results above over desk-scale graph sets.

pub mod balance;
pub mod engine;
pub mod faults;
pub mod graph;
pub mod protosearch;
pub mod suites;
pub mod variants;
