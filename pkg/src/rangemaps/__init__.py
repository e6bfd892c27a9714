"""Range-preserving maps between spaces of vector-valued functions on finite spaces."""

__version__ = "0.1.0"
