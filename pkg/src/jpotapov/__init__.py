"""Matrix interpolation for J-Potapov functions.

Classification of coefficient sequences, all solutions as a linear
fractional transformation of a Schur parameter, Weyl matrix balls, the
Potapov-Ginzburg transform and the limit behaviour of ball parameters.
"""

from .errors import *  # noqa: F401,F403
from .matkernel import *  # noqa: F401,F403
from .polynomials import *  # noqa: F401,F403
from .sequence import *  # noqa: F401,F403
from .serialize import *  # noqa: F401,F403
from .solve import *  # noqa: F401,F403
from .weyl import *  # noqa: F401,F403
from . import errors, matkernel, polynomials, sequence, serialize, solve, weyl

__version__ = "0.1.0"

__all__ = (
    errors.__all__ + matkernel.__all__ + polynomials.__all__ + sequence.__all__
    + serialize.__all__ + solve.__all__ + weyl.__all__
)
