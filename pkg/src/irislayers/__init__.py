"""Layer-wise deep-feature evaluation pipeline for iris recognition.

Normalize iris images with the rubber-sheet mapping, run a
fully-convolutional residual network with activation taps at every conv
layer, and score each layer's features via min-max scaling, randomized-SVD
PCA with a 90% variance cutoff, and a one-vs-rest linear SVM with
accuracy, ROC / TPR@FMR, and sub-split statistics.
"""

from .normalize import (CircleAnnotation, rubber_sheet, replicate_channels,
                        InvalidAnnotationError, DegenerateAnnotationError)
from .synthgen import SynthConfig, generate
from .model import (build_spec, init_random, load_weights, save_weights,
                    forward_with_taps, conv2d, batchnorm, relu, maxpool,
                    global_avg_pool, save_tap_table, PRESETS)
from .features import (FeatureMatrix, MinMaxScaler, flatten, unflatten,
                       minmax_fit, minmax_transform)
from .pca import PcaModel, randomized_svd, pca_fit, pca_transform
from .svm import (LinearBinaryModel, OvRModel, train_binary, train_ovr,
                  decision_scores, predict)
from .evaluate import (SplitPlan, RocCurve, EvalReport, PipelineConfig,
                       stratified_split, accuracy, roc_from_scores,
                       roc_from_genuine_impostor, tpr_at_fmr, subsplit_stats,
                       layer_sweep, extract_tap_features)
from .report import emit, load_report

__version__ = "0.1.0"
