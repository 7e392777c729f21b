"""incrprobe: a lab for measuring how incrementally LSTM encoders process input.

Trains small encoder-decoder models (with and without dot attention, plus
attention masking and a next-input-prediction loss) on the SCAN navigation
task and scores their encoders with three metrics: diagnostic-classifier
accuracy, integration ratio, and representational similarity.
"""

from . import analysis, metrics, model, numcore, pipeline, scan_data, trainer

__version__ = "0.1.0"

__all__ = [
    "analysis",
    "metrics",
    "model",
    "numcore",
    "pipeline",
    "scan_data",
    "trainer",
    "__version__",
]
