"""Software model of a low-cost CMOS critical-angle refractometer."""

from refracto.calibration import (
    CalibrationModel,
    LinearSegment,
    Measurement,
    build_model,
    calibrate_zero,
    measure,
)
from refracto.dsp_pipeline import BoundaryDetection, PipelineConfig, process_frame
from refracto.oversampling import OversampleConfig, oversample_decimate
from refracto.sensor_sim import Level, PixelFrame, SimGeometry, SimScenario, preset_scenario, synth_frame
from refracto.stats import PairedTestResult, paired_t_test

__version__ = "0.1.0"
