"""Physics-informed neural network benchmark: cases, methods, metrics, harness."""

import torch

# fourth-order nested derivatives lose too much precision in single precision
torch.set_default_dtype(torch.float64)
DTYPE = torch.float64

__version__ = "0.1.0"
