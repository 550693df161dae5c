"""octofc Core Package.

This package contains the octonion arithmetic, para-linear operator algebra,
spectra, slice function and functional calculus modules, along with the
shared logging, configuration and error handling.
"""

__version__ = "0.1.0"
