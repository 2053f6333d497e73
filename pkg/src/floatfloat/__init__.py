"""Float-float arithmetic.

Pairs of single-precision floats carry about 44 significant bits through
error-free transformations (two-sum, Dekker split and two-product).  The
package also provides a configurable software floating-point simulator, an
exact dyadic oracle, a paranoia-style error probe and an accuracy and
benchmark harness.
"""

from .eft import (EftPair, SplitOverflowError, UnderflowRiskError, add12, add12_fast,
                  default_split_point, mul12, split)
from .ff_ops import (FloatFloat, add22, ff_from_parts, ff_from_wide, ff_to_dyadic,
                     ff_to_wide, is_normalized, mul22)
from .fpmodel import (BINARY32, PRESETS, Backend, DivideByZeroError, FpFormat,
                      FpOverflowError, GuardDigits, NativeBackend, SimBackend, SimFloat,
                      ZeroArgumentError, native_backend, parse_format, sim_backend)
from .harness import (AccuracyReport, BenchReport, SelftestReport, UnknownOpError,
                      evaluate_case, exhaustive_octave, run_accuracy, run_bench, run_selftest)
from .oracle import (BothZeroError, Dyadic, ExactIsZeroError, Rounding, error_bits,
                     error_ulps, round_quotient)
from .probe import Op, UlpInterval, probe_op, probe_report
from .simarray import SimArray

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport", "BINARY32", "Backend", "BenchReport", "BothZeroError",
    "DivideByZeroError", "Dyadic", "EftPair", "ExactIsZeroError", "FloatFloat",
    "FpFormat", "FpOverflowError", "GuardDigits", "NativeBackend", "Op", "PRESETS",
    "Rounding", "SelftestReport", "SimArray", "SimBackend", "SimFloat",
    "SplitOverflowError", "UlpInterval", "UnderflowRiskError", "UnknownOpError",
    "ZeroArgumentError", "add12", "add12_fast", "add22", "default_split_point",
    "error_bits", "error_ulps", "evaluate_case", "exhaustive_octave", "ff_from_parts", "ff_from_wide", "ff_to_dyadic",
    "ff_to_wide", "is_normalized", "mul12", "mul22", "native_backend", "parse_format",
    "probe_op", "probe_report", "round_quotient", "run_accuracy", "run_bench",
    "run_selftest", "sim_backend", "split",
]
