//! Syndrome-domain decoders for CSS quantum LDPC codes and a deterministic
//! Monte Carlo harness for measuring their frame error rate and message cost.
//!
//! The library is organized as a pipeline:
//!
//! * [`gf2`]: dense GF(2) linear algebra on bit-packed rows.
//! * [`code`]: CSS code construction (hypergraph products, alist files,
//!   manifests, built-in test codes) and Tanner graph extraction.
//! * [`channel`]: independent X-error channel and per-trial RNG streams.
//! * [`decoders`]: flooding BP, sequential check/variable schedules (SCNS,
//!   SVNS), guided decimation (BPGD), and BP plus order-0 OSD.
//! * [`eval`]: outcome classification against the degeneracy group, campaign
//!   driver, and Clopper-Pearson interval statistics.
//!
//! Everything downstream of a `(code, seed)` pair is deterministic: trials
//! use counter-addressed RNG streams, so results do not depend on thread
//! count or scheduling.

pub mod channel;
pub mod code;
pub mod decoders;
pub mod eval;
pub mod gf2;
