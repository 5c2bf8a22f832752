"""Weight and activation export from torch ResNet-50 to LPWT/LPFM files."""

from .export import (ExportError, ExportManifest, export_reference_activations,
                     export_weights, write_mapping_csv)
from .resnet import conv_taps, get_model

__all__ = [
    "ExportError",
    "ExportManifest",
    "conv_taps",
    "export_reference_activations",
    "export_weights",
    "get_model",
    "write_mapping_csv",
]

__version__ = "0.1.0"
