"""Hybrid network covert channel simulator and entropy-based analysis toolkit."""

from .detector import (BaselineProfile, DetectionReport, FieldMonitor, Symbolizer, Verdict,
                       build_baseline, detect, field_entropy_series)
from .errors import (CapacityError, ConfigError, ConstraintError, CovertLabError,
                     FixtureOnlyProtocolError, TraceFormatError, TraceValidationError,
                     TrainingError, UnknownFieldError)
from .headers import (REGISTRY, FieldDescriptor, PacketRecord, ProtocolKind, TrapdoorRegistry,
                      field_bits, trapdoor_capacity, validate_packet, validate_trace)
from .hybrid import (HybridChannelConfig, ScenarioConfig, ScenarioKind, TrapdoorSpec,
                     embed_hybrid, extract_hybrid, extract_noiseless, scenario_noiseless,
                     scenario_noisy, trapdoor_slack)
from .metrics import (ce_ratio, channel_capacity, covertness_ncc, covertness_subliminal,
                      embed_feasible, entropy_report, min_code_bits, robustness, shannon_entropy)
from .schemes import (SchemeId, esp_subliminal_embed, esp_subliminal_extract, scheme1_decode,
                      scheme1_encode, scheme2_decode, scheme2_encode, scheme3_bits,
                      scheme3_decode_stream, scheme3_encode_stream)
from .tables import TABLE_CAPACITY, reproduce_tables
from .traces import gen_legit_trace, read_trace, write_trace

__version__ = "0.1.0"
