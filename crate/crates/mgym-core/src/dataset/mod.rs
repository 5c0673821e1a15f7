//! Result dataset: canonical serialization, schema validation, and the
//! on-disk record store.

pub mod canonical;
pub mod record;
pub mod schema;
pub mod store;
