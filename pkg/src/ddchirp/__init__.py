"""ddchirp: low-complexity delay-Doppler detection of Zadoff-Chu preambles.

Public surface re-exports the main types and operations of each module.
"""

from .grid import (GridConfig, RootSet, build_root_set, crt_combine, mod_inverse,
                   valid_root_count, validate_shift)
from .transforms import (dd_inner_product, dd_extended, dzt, idzt, td_to_tf,
                         twisted_shift)
from .sequences import Preamble, PreambleBank, self_product, tone_frequency_of, zc_sequence
from .channel import (ChannelProfile, ChannelRealization, ShapingConfig, add_awgn,
                      apply_channel, load_profile, rrc_kernel, sample_channel,
                      sample_veh_a, superpose)
from .detectors import (CandidateSet, DetectionReport, dd_row_sums, detect_multi,
                        detect_single, line_candidates_dd, line_candidates_tf,
                        tf_col_sums)
from .sensing import (SensingConfig, SensingMatrix, block_energies,
                      build_sensing_matrix, load_matrix, ost_detect,
                      restrict_columns, save_matrix)
from .harness import (BenchResult, ExperimentConfig, ExperimentContext, SweepResult,
                      emit_bench_csv, emit_csv, parse_config, run_bench, run_sweep,
                      run_trial, serialize_config)

__version__ = "0.1.0"
