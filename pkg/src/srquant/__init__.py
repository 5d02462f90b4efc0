"""Amplitude estimation of weak sinusoids in Rayleigh noise with a 3-level
stochastic-resonance quantizer."""
from .errors import InvalidConfiguration, NumericFailure, ScanFormatError
from .estimators import AmplitudeEstimate, Method, estimate, estimate_sigma
from .noise_model import A_NORM, M_MEAN, UNIT_SCALE, RayleighParams, fit_scale
from .quantizer import QuantizedCounts, QuantizerConfig, quantize, threshold_stats
from .scan_pipeline import ScanDataset, ScanProfile, detect_object, ingest, run_scan, write_dataset
from .signal_synth import Phantom, SignalSpec, TimeSeries, rod_phantom, synthesize
from .sr_theory import optimal_threshold, theoretical_mu, threshold_sweep

__version__ = "0.1.0"

__all__ = [
    "A_NORM", "M_MEAN", "UNIT_SCALE", "AmplitudeEstimate", "InvalidConfiguration", "Method",
    "NumericFailure", "Phantom", "QuantizedCounts", "QuantizerConfig", "RayleighParams",
    "ScanDataset", "ScanFormatError", "ScanProfile", "SignalSpec", "TimeSeries", "detect_object",
    "estimate", "estimate_sigma", "fit_scale", "ingest", "optimal_threshold", "quantize",
    "rod_phantom", "run_scan", "synthesize", "theoretical_mu", "threshold_stats",
    "threshold_sweep", "write_dataset",
]
