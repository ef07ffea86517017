"""Quantized peak-topography fingerprinting of GC x GC chromatograms."""
__version__ = "0.1.0"

from .baselines import PcaModel, corr2, fit_pca, jacobi_eigh, l2_dist, pca_similarity
from .chromatogram import (
    Chromatogram,
    ChromatogramError,
    DimensionMismatch,
    LibraryError,
    ParseError,
    SourceLibrary,
    ValidationError,
    load_chromatogram,
    load_library,
    save_chromatogram,
)
from .classify import (
    ConfusionMatrix2,
    MetricSet,
    ScoreRow,
    binary_classify,
    cross_score_matrix,
    decide,
    metrics,
    normalize_scores,
    run_binary,
    score,
    score_batch,
)
from .config import MethodId, RunConfig
from .peaks import Peak, PeakMap, extract_peaks, max_along_interval
from .quantize import Alphabet, make_alphabet, paa, paa_dist, sax, sax_dist
from .similarity import (
    CalibrationCurve,
    WeightMask,
    apply_weights,
    build_weight_mask,
    calibrate_epsilon,
    pairwise_deviation,
    peak_sim,
)
from .synth import FamilySpec, PeakSpec, gulf_families, make_benchmark, render
