//! Benchmark protocol implementations.
//!
//! Eight protocols ship with the engine: BSEQ, EPLG, Mirror Circuits,
//! CLOPS, QML Kernel, WIT, LR-QAOA, and QFT. Every `*_run` entry point is
//! a pure function of `(device, params, seed)`: the same inputs always
//! produce the same result record, which is what makes asynchronous
//! dispatch/poll execution bit-identical to a synchronous call.

pub mod bseq;
pub mod clops;
pub mod eplg;
pub mod mirror;
pub mod qaoa;
pub mod qft;
pub mod qml;
pub mod rb;
pub mod wit;

use std::fmt;

use serde::{Deserialize, Serialize};

/// Identifies one of the eight benchmark protocols in the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkKind {
    Bseq,
    Eplg,
    Mirror,
    Clops,
    QmlKernel,
    LrQaoa,
    Wit,
    Qft,
}

impl BenchmarkKind {
    /// All benchmarks, in canonical suite order.
    pub const ALL: [BenchmarkKind; 8] = [
        BenchmarkKind::Bseq,
        BenchmarkKind::Eplg,
        BenchmarkKind::Mirror,
        BenchmarkKind::Clops,
        BenchmarkKind::QmlKernel,
        BenchmarkKind::LrQaoa,
        BenchmarkKind::Wit,
        BenchmarkKind::Qft,
    ];

    /// Stable snake_case key used in series specs, fixtures, and configs.
    pub fn key(self) -> &'static str {
        match self {
            BenchmarkKind::Bseq => "bseq",
            BenchmarkKind::Eplg => "eplg",
            BenchmarkKind::Mirror => "mirror",
            BenchmarkKind::Clops => "clops",
            BenchmarkKind::QmlKernel => "qml_kernel",
            BenchmarkKind::LrQaoa => "lr_qaoa",
            BenchmarkKind::Wit => "wit",
            BenchmarkKind::Qft => "qft",
        }
    }

    /// Kebab-case slug used inside dataset file names.
    pub fn path_slug(self) -> &'static str {
        match self {
            BenchmarkKind::QmlKernel => "qml-kernel",
            BenchmarkKind::LrQaoa => "lr-qaoa",
            other => other.key(),
        }
    }

    /// Human-readable short name.
    pub fn display_name(self) -> &'static str {
        match self {
            BenchmarkKind::Bseq => "BSEQ",
            BenchmarkKind::Eplg => "EPLG",
            BenchmarkKind::Mirror => "Mirror Circuits",
            BenchmarkKind::Clops => "CLOPS",
            BenchmarkKind::QmlKernel => "QML Kernel",
            BenchmarkKind::LrQaoa => "LR-QAOA",
            BenchmarkKind::Wit => "WIT",
            BenchmarkKind::Qft => "QFT",
        }
    }

    /// The `benchmark_name` value this benchmark uses in config files and
    /// stored records.
    pub fn config_name(self) -> &'static str {
        match self {
            BenchmarkKind::LrQaoa => "Linear Ramp QAOA",
            BenchmarkKind::Qft => "Quantum Fourier Transform",
            other => other.display_name(),
        }
    }

    /// Parse a benchmark identifier from its key, path slug, display
    /// name, or config name (case-insensitive).
    pub fn parse(text: &str) -> Option<BenchmarkKind> {
        let lowered = text.trim().to_ascii_lowercase();
        BenchmarkKind::ALL.into_iter().find(|kind| {
            lowered == kind.key()
                || lowered == kind.path_slug()
                || lowered == kind.display_name().to_ascii_lowercase()
                || lowered == kind.config_name().to_ascii_lowercase()
        })
    }
}

impl fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_and_slugs_round_trip() {
        for kind in BenchmarkKind::ALL {
            assert_eq!(BenchmarkKind::parse(kind.key()), Some(kind));
            assert_eq!(BenchmarkKind::parse(kind.path_slug()), Some(kind));
            assert_eq!(BenchmarkKind::parse(kind.display_name()), Some(kind));
            assert_eq!(BenchmarkKind::parse(kind.config_name()), Some(kind));
        }
        assert_eq!(BenchmarkKind::parse("QML Kernel"), Some(BenchmarkKind::QmlKernel));
        assert_eq!(BenchmarkKind::parse("lr-qaoa"), Some(BenchmarkKind::LrQaoa));
        assert_eq!(BenchmarkKind::parse("Linear Ramp QAOA"), Some(BenchmarkKind::LrQaoa));
        assert_eq!(BenchmarkKind::parse("Quantum Fourier Transform"), Some(BenchmarkKind::Qft));
        assert_eq!(BenchmarkKind::parse("nope"), None);
    }

    #[test]
    fn serde_uses_snake_case_keys() {
        let json = serde_json::to_string(&BenchmarkKind::QmlKernel).unwrap();
        assert_eq!(json, "\"qml_kernel\"");
        let back: BenchmarkKind = serde_json::from_str("\"lr_qaoa\"").unwrap();
        assert_eq!(back, BenchmarkKind::LrQaoa);
    }
}
