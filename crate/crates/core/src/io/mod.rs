//! PLY clouds, poses, synthetic shapes, dataset manifests and report files.

mod manifest;
mod ply;
mod pose;
mod report;
mod synthetic;

pub use manifest::{
    load_manifest, parse_manifest, DatasetManifest, ManifestPair, PairSource,
    MANIFEST_SCHEMA_VERSION,
};
pub use ply::{parse_ply, read_ply, write_ply, write_ply_to, PlyEncoding};
pub use pose::{format_pose, parse_pose, read_pose, write_pose};
pub use report::{
    aggregate_reports, format_report, read_csv, read_report_csv, report_rows_csv, rpc_file_name,
    write_report, write_report_rows, write_rpc_csv, write_timing_rows, ReportRow, RpcRow,
    TimingCsvRow, TimingProtocolRow, FAILURES_CSV, METADATA_FILE, REPORT_CSV, REPORT_TXT, RPC_DIR,
    TIMING_CSV,
};
pub use synthetic::{
    generate_shape, generate_synthetic_pair, ShapeKind, SyntheticShapeSpec, MIN_SYNTHETIC_POINTS,
};
