"""File formats: Netpbm images, FSPK pattern packs, plan/measurement text, manifests."""

from formats.netpbm import (
    write_pgm, read_pgm, write_ppm, read_ppm, Rescale, fit_rescale, export_pgm, read_unit_image,
)
from formats.pattern_pack import (
    PatternPackWriter, write_pattern_pack, read_pattern_pack, iter_pattern_pack,
    payload_bytes, pack_size, storage_ratio, patterns_per_memory, HEADER_SIZE,
)
from formats.records import (
    write_plan, read_plan, write_measurements, read_measurements, write_trace,
)
from formats.manifest import RunManifest, read_manifest, TOOL_VERSION
