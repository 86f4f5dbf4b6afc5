__version__ = "0.1.0"

from .errors import FclshError, UsageError, DataError, ResourceError
from .config import Settings, SeedStreams, get_settings
from .presets import Experiment
from .bitvectors import BitVector, Dataset, hamming_distance, and_mask, popcount
from .datafiles import read_dataset, write_dataset, read_ground_truth, write_ground_truth
from .hadamard import HadamardCodeMatrix, generate_code_matrix, fht_in_place, fht_mod, batch_hash_kernel
from .covering import CoveringFamily, build_family, family_from_mapping, hash_slow, hash_fast, sketch, collision_count
from .transform import PreprocessPlan, make_plan, apply_replicate, apply_partition
from .classic import BitSampleFamily, choose_k, build_bit_sampling, hash_all
from .index import IndexSet, QueryReport, DedupBitmap, FamilyConfig, build_index, query_r_nn, query_c_r_nn, linear_scan
from .mih import MihIndex, build_mih, enumerate_ball, query_mih
from .workloads import gen_synthetic, binarize, oracle_scan, distance_histogram, holdout_queries
from .bench import ExperimentConfig, MetricsRow, run_experiment, bench_hashing, summarize
__all__ = ["FclshError", "UsageError", "DataError", "ResourceError",
           "Settings", "SeedStreams", "get_settings", "Experiment",
           "BitVector", "Dataset", "hamming_distance", "and_mask", "popcount",
           "read_dataset", "write_dataset", "read_ground_truth", "write_ground_truth",
           "HadamardCodeMatrix", "generate_code_matrix", "fht_in_place", "fht_mod", "batch_hash_kernel",
           "CoveringFamily", "build_family", "family_from_mapping", "hash_slow", "hash_fast", "sketch",
           "collision_count",
           "PreprocessPlan", "make_plan", "apply_replicate", "apply_partition",
           "BitSampleFamily", "choose_k", "build_bit_sampling", "hash_all",
           "IndexSet", "QueryReport", "DedupBitmap", "FamilyConfig", "build_index", "query_r_nn",
           "query_c_r_nn", "linear_scan",
           "MihIndex", "build_mih", "enumerate_ball", "query_mih",
           "gen_synthetic", "binarize", "oracle_scan", "distance_histogram", "holdout_queries",
           "ExperimentConfig", "MetricsRow", "run_experiment", "bench_hashing", "summarize"]
