"""p-adic families of ternary theta series attached to definite quaternion orders."""

__version__ = "0.1.0"
