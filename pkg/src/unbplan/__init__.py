"""unbplan: planning toolkit for multiband ultra-narrowband IoT networks.

Simulate random-access uplink traffic with SINR-based decoding, fit
stochastic-geometry models of decoding probabilities, and optimize base
station placement and band assignment.
"""

from unbplan._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = ["__version__", "kernel_backend"]
